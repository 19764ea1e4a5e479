use std::io::Write;
use std::path::Path;

use hoalg::algebroid::AlgebroidStructure;
use hoalg::mechanics::{self, OracleFamily, VariationGenerator};
use hoalg::problem::ProblemFile;
use hoalg::solver;
use hoalg::verify;
use hoalg::Error;

use crate::csv::{g17, CsvWriter};
use crate::Failure;

pub struct Options {
    pub seed: u64,
    pub tol: Option<f64>,
    pub samples: Option<usize>,
}

type Out = Box<dyn Write>;

fn load(path: &Path, opts: &Options) -> Result<ProblemFile, Failure> {
    let src = std::fs::read_to_string(path).map_err(|e| Failure::Schema(format!("cannot read {}: {e}", path.display())))?;
    let mut p = ProblemFile::from_json(&src)?;
    if let Some(n) = opts.samples {
        p.samples = n;
    }
    Ok(p)
}

fn structure(p: &ProblemFile) -> Result<AlgebroidStructure, Failure> {
    let a = p.algebroid()?;
    for w in a.warnings() {
        eprintln!("warning: {w}");
    }
    Ok(a)
}

pub fn check(path: &Path, opts: &Options, out: Out) -> Result<(), Failure> {
    let p = load(path, opts)?;
    let a = structure(&p)?;
    let n = opts.samples.unwrap_or(32);
    let tol = opts.tol.unwrap_or(1e-9);
    let rep = a.check_axioms_default(n, -1.0, 1.0, tol)?;
    let mut out = out;
    writeln!(out, "structure,{}", a.label())?;
    writeln!(out, "m,{}", a.m())?;
    writeln!(out, "r,{}", a.r())?;
    writeln!(out, "samples,{}", rep.samples)?;
    writeln!(out, "max_skew,{}", g17(rep.max_skew))?;
    writeln!(out, "max_compat,{}", g17(rep.max_compat))?;
    writeln!(out, "residual,{}", g17(rep.max_skew.max(rep.max_compat)))?;
    writeln!(out, "tol,{}", g17(rep.tol))?;
    writeln!(out, "status,{}", if rep.pass { "PASS" } else { "FAIL" })?;
    out.flush()?;
    if rep.pass {
        Ok(())
    } else {
        Err(Failure::Identity(format!("axiom check failed: residual {}", g17(rep.max_skew.max(rep.max_compat)))))
    }
}

pub fn force(path: &Path, opts: &Options, out: Out) -> Result<(), Failure> {
    let p = load(path, opts)?;
    let a = structure(&p)?;
    let l = p.lagrangian(&a)?;
    let path = p.path(&a)?;
    let mut w = CsvWriter::new(out);
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=a.r()).map(|i| format!("F{i}")));
    w.header(&cols)?;
    for t in p.sample_times() {
        let f = mechanics::force(&a, &l, &path, t)?;
        let mut row = vec![t];
        row.extend(f.f);
        w.row(&row)?;
    }
    Ok(w.finish()?)
}

pub fn momentum(path: &Path, opts: &Options, out: Out) -> Result<(), Failure> {
    let p = load(path, opts)?;
    let a = structure(&p)?;
    let l = p.lagrangian(&a)?;
    let path = p.path(&a)?;
    let k = l.order();
    let mut w = CsvWriter::new(out);
    let mut cols = vec!["t".to_string()];
    for i in 1..=a.r() {
        cols.extend((0..k).map(|b| format!("m{i}_{b}")));
    }
    w.header(&cols)?;
    for t in p.sample_times() {
        let m = mechanics::momentum(&a, &l, &path, t)?;
        let mut row = vec![t];
        row.extend(m.m.into_iter().flatten());
        w.row(&row)?;
    }
    w.finish()?;
    let bc = p.boundary_condition(&a)?;
    let tol = opts.tol.unwrap_or(1e-9);
    let rep = mechanics::transversality_check(&a, &l, &path, &bc, tol)?;
    eprintln!(
        "transversality {} residual={} tol={} {}",
        rep.kind,
        g17(rep.residual),
        g17(rep.tol),
        if rep.pass { "PASS" } else { "FAIL" }
    );
    Ok(())
}

pub fn solve(path: &Path, opts: &Options, out: Out) -> Result<(), Failure> {
    let p = load(path, opts)?;
    let a = structure(&p)?;
    let mut prob = p.collocation(&a)?;
    if let Some(tol) = opts.tol {
        prob.options.force_tol = tol;
    }
    let rep = solver::solve(&prob)?;
    let traj = prob.path(&rep.coeffs)?;
    let mut w = CsvWriter::new(out);
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=a.r()).map(|i| format!("y{i}")));
    cols.extend((1..=a.m()).map(|i| format!("x{i}")));
    cols.extend((1..=a.r()).map(|i| format!("F{i}")));
    w.header(&cols)?;
    for t in p.sample_times() {
        let pt = traj.ak_point(&a, t, 1)?;
        let f = mechanics::force(&a, &prob.lagrangian, &traj, t)?;
        let mut row = vec![t];
        row.extend(pt.y.iter().map(|r| r[0]));
        row.extend(pt.x);
        row.extend(f.f);
        w.row(&row)?;
    }
    w.finish()?;
    let v = solver::verify_solution(&prob, &rep.coeffs)?;
    eprintln!("converged {}", rep.converged);
    eprintln!("iterations {}", rep.iterations);
    eprintln!("sup_force {}", g17(rep.sup_force));
    eprintln!("boundary_residual {}", g17(rep.boundary_residual));
    eprintln!("condition {}", g17(rep.condition));
    eprintln!("coefficients {}", rep.coeffs.iter().map(|c| g17(*c)).collect::<Vec<_>>().join(" "));
    eprintln!("dense_check nodes={} sup_force={} {}", v.nodes, g17(v.sup_force), if v.pass { "PASS" } else { "FAIL" });
    if rep.converged {
        Ok(())
    } else {
        Err(Failure::Numeric(format!("solver did not converge (sup force {}, condition {})", g17(rep.sup_force), g17(rep.condition))))
    }
}

fn line(out: &mut Out, pass: bool, name: &str, instances: usize, residual: f64, tol: f64) -> std::io::Result<()> {
    writeln!(
        out,
        "{} {:<22} instances={:<5} max_residual={:.3e} tol={:.0e}",
        if pass { "PASS" } else { "FAIL" },
        name,
        instances,
        residual,
        tol
    )
}

pub fn verify(file: Option<&Path>, all: bool, suites: &[String], opts: &Options, mut out: Out) -> Result<(), Failure> {
    if file.is_none() && !all && suites.is_empty() {
        return Err(Failure::Schema("nothing to verify: pass a problem file, --all, or --suite NAME".into()));
    }
    let mut failed = Vec::new();
    let names: Vec<&str> = if all { verify::SUITES.to_vec() } else { suites.iter().map(|s| s.as_str()).collect() };
    for name in names {
        let r = verify::run_suite(name, opts.seed)?;
        line(&mut out, r.pass, r.name, r.instances, r.max_residual, r.tol)?;
        if !r.pass {
            failed.push(name.to_string());
        }
    }
    if let Some(path) = file {
        failed.extend(verify_file(path, opts, &mut out)?);
    }
    out.flush()?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Identity(format!("failed: {}", failed.join(", "))))
    }
}

fn verify_file(path: &Path, opts: &Options, out: &mut Out) -> Result<Vec<String>, Failure> {
    let p = load(path, opts)?;
    let a = structure(&p)?;
    let mut failed = Vec::new();
    let rep = a.check_axioms_default(32, -1.0, 1.0, opts.tol.unwrap_or(1e-9))?;
    line(out, rep.pass, "axioms", rep.samples, rep.max_skew.max(rep.max_compat), rep.tol)?;
    if !rep.pass {
        failed.push("axioms".to_string());
    }
    if p.lagrangian.is_none() || p.path.is_none() {
        return Ok(failed);
    }
    let l = p.lagrangian(&a)?;
    let path = p.path(&a)?;
    let times = p.sample_times();
    let tol = opts.tol.unwrap_or(1e-7);
    for fam in OracleFamily::ALL {
        let mut worst: f64 = 0.0;
        let mut applicable = true;
        for &t in &times {
            match mechanics::oracle_el(&a, &l, &path, t, fam) {
                Ok(o) => {
                    let f = mechanics::force(&a, &l, &path, t)?.f;
                    worst = f.iter().zip(&o).map(|(u, v)| (u - v).abs()).fold(worst, f64::max);
                }
                Err(Error::Inapplicable { .. }) => {
                    applicable = false;
                    break;
                }
                Err(e) => return Err(e.into()),
            }
        }
        if applicable {
            let name = format!("oracle:{}", fam.name());
            line(out, worst <= tol, &name, times.len(), worst, tol)?;
            if worst > tol {
                failed.push(name);
            }
        }
    }
    let mut rng = verify::rng(opts.seed);
    let b = verify::random_curve(&mut rng, a.r());
    let b = VariationGenerator::from_strs(&b.iter().map(|s| s.as_str()).collect::<Vec<_>>())?;
    let mut worst: f64 = 0.0;
    for &t in &times {
        worst = worst.max(mechanics::variational_identity(&a, &l, &path, &b, t)?.residual());
    }
    line(out, worst <= tol, "pointwise", times.len(), worst, tol)?;
    if worst > tol {
        failed.push("pointwise".to_string());
    }
    Ok(failed)
}
