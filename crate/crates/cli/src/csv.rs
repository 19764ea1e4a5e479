//! CSV output with `%.17g` number formatting.

use std::io::{self, Write};

/// C `printf("%.17g")` formatting.
pub fn g17(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{v:.16e}");
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent");
    if (-4..17).contains(&exp) {
        let fixed = format!("{:.*}", (16 - exp) as usize, v);
        strip_zeros(&fixed).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mant), exp.abs())
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub struct CsvWriter<W: Write> {
    out: W,
}

impl<W: Write> CsvWriter<W> {
    pub fn new(out: W) -> Self {
        Self { out }
    }

    pub fn header<S: AsRef<str>>(&mut self, cols: &[S]) -> io::Result<()> {
        let cols: Vec<&str> = cols.iter().map(|c| c.as_ref()).collect();
        writeln!(self.out, "{}", cols.join(","))
    }

    pub fn row(&mut self, values: &[f64]) -> io::Result<()> {
        let cells: Vec<String> = values.iter().map(|v| g17(*v)).collect();
        writeln!(self.out, "{}", cells.join(","))
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.out.flush()
    }
}
