//! The expression language for structure functions, Lagrangians and paths.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | 'pi' | ident | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | exp | log | sqrt | tanh
//! ident   := [A-Za-z][A-Za-z0-9_]*
//! number  := digits ['.' digits] [('e' | 'E') ['+' | '-'] digits]
//! ```

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::error::{Error, ParseError, Result};
use crate::jet::{JetFunction, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Tanh,
}

impl Func {
    pub const ALL: [Func; 6] = [Func::Sin, Func::Cos, Func::Exp, Func::Log, Func::Sqrt, Func::Tanh];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Tanh => "tanh",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    Var(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

/// Name to value map used by [`Expr::eval`].
pub type Binding<S> = HashMap<String, S>;

pub fn parse(src: &str) -> Result<Expr, ParseError> {
    Expr::parse(src)
}

impl std::str::FromStr for Expr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        Expr::parse(s)
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ParseError> {
        let tokens = lex(src)?;
        let mut p = Parser { tokens, pos: 0, end: src.len() };
        let e = p.expr()?;
        match p.peek() {
            None => Ok(e),
            Some(t) => Err(ParseError {
                offset: t.offset,
                message: format!("unexpected {}", t.kind.describe()),
                expected: vec!["operator".into(), "end of input".into()],
            }),
        }
    }

    pub fn num(v: f64) -> Expr {
        if v < 0.0 {
            Expr::Neg(Box::new(Expr::Num(-v)))
        } else {
            Expr::Num(v)
        }
    }

    pub fn var(name: &str) -> Expr {
        Expr::Var(name.to_string())
    }

    /// Identifiers appearing in the expression.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Num(_) | Expr::Pi => {}
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Neg(a) | Expr::Call(_, a) => a.collect_vars(out),
            Expr::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Rewrites every identifier through `f`.
    pub fn rename_vars(&self, f: &dyn Fn(&str) -> String) -> Expr {
        match self {
            Expr::Num(v) => Expr::Num(*v),
            Expr::Pi => Expr::Pi,
            Expr::Var(v) => Expr::Var(f(v)),
            Expr::Neg(a) => Expr::Neg(Box::new(a.rename_vars(f))),
            Expr::Call(g, a) => Expr::Call(*g, Box::new(a.rename_vars(f))),
            Expr::Bin(op, a, b) => {
                Expr::Bin(*op, Box::new(a.rename_vars(f)), Box::new(b.rename_vars(f)))
            }
        }
    }

    /// True when the expression is the literal zero (possibly negated).
    pub fn is_zero_literal(&self) -> bool {
        match self {
            Expr::Num(v) => *v == 0.0,
            Expr::Neg(a) => a.is_zero_literal(),
            _ => false,
        }
    }

    /// Binds identifiers to argument slots in the order given by `names`.
    pub fn compile(&self, names: &[&str]) -> Result<Compiled> {
        let index: HashMap<&str, usize> = names.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        Ok(Compiled { node: lower(self, &index)?, arity: names.len() })
    }

    /// Evaluates with named bindings. Values must share one jet order.
    pub fn eval<S: Scalar>(&self, env: &Binding<S>) -> Result<S> {
        let like = match env.values().next() {
            Some(v) => v.clone(),
            None => return Err(Error::Contract("empty binding; use eval_const".into())),
        };
        let vars: Vec<String> = self.free_vars().into_iter().collect();
        let mut args = Vec::with_capacity(vars.len());
        for v in &vars {
            match env.get(v) {
                Some(x) => args.push(x.clone()),
                None => return Err(Error::Unbound(v.clone())),
            }
        }
        let names: Vec<&str> = vars.iter().map(|s| s.as_str()).collect();
        self.compile(&names)?.eval_like(&like, &args)
    }

    /// Evaluates an expression without identifiers.
    pub fn eval_const(&self) -> Result<f64> {
        self.compile(&[])?.eval_like(&0.0, &[])
    }
}

#[derive(Clone, Debug)]
enum Node {
    Const(f64),
    Slot(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    PowI(Box<Node>, i64),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

fn lower(e: &Expr, index: &HashMap<&str, usize>) -> Result<Node> {
    let b = |x: &Expr| lower(x, index).map(Box::new);
    Ok(match e {
        Expr::Num(v) => Node::Const(*v),
        Expr::Pi => Node::Const(std::f64::consts::PI),
        Expr::Var(v) => match index.get(v.as_str()) {
            Some(&i) => Node::Slot(i),
            None => return Err(Error::Unbound(v.clone())),
        },
        Expr::Neg(a) => Node::Neg(b(a)?),
        Expr::Call(f, a) => Node::Call(*f, b(a)?),
        Expr::Bin(op, l, r) => match op {
            BinOp::Add => Node::Add(b(l)?, b(r)?),
            BinOp::Sub => Node::Sub(b(l)?, b(r)?),
            BinOp::Mul => Node::Mul(b(l)?, b(r)?),
            BinOp::Div => Node::Div(b(l)?, b(r)?),
            BinOp::Pow => {
                let exponent = if r.free_vars().is_empty() { r.eval_const().ok() } else { None };
                match exponent {
                    Some(n) if n.fract() == 0.0 && n.abs() <= 1024.0 => Node::PowI(b(l)?, n as i64),
                    _ => Node::Pow(b(l)?, b(r)?),
                }
            }
        },
    })
}

/// An expression with identifiers resolved to argument positions.
#[derive(Clone, Debug)]
pub struct Compiled {
    node: Node,
    arity: usize,
}

impl Compiled {
    /// A compiled constant expression.
    pub fn constant(v: f64) -> Compiled {
        Compiled { node: Node::Const(v), arity: 0 }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Evaluates with positional arguments; `like` fixes the ring shape of
    /// literals (needed when there are no arguments).
    pub fn eval_like<S: Scalar>(&self, like: &S, args: &[S]) -> Result<S> {
        if args.len() != self.arity {
            return Err(Error::Contract(format!(
                "expected {} arguments, got {}",
                self.arity,
                args.len()
            )));
        }
        let order = like.jet_order();
        for a in args {
            if a.jet_order() != order {
                return Err(Error::OrderMismatch { left: order, right: a.jet_order() });
            }
        }
        eval_node(&self.node, like, args)
    }

    /// True when the compiled expression is the literal zero.
    pub fn is_zero(&self) -> bool {
        matches!(self.node, Node::Const(v) if v == 0.0)
    }
}

impl JetFunction for Compiled {
    fn arity(&self) -> usize {
        self.arity
    }

    fn call<S: Scalar>(&self, args: &[S]) -> Result<S> {
        match args.first() {
            Some(like) => self.eval_like(&like.clone(), args),
            None => Err(Error::Contract("cannot infer ring of a nullary call".into())),
        }
    }
}

fn eval_node<S: Scalar>(n: &Node, like: &S, args: &[S]) -> Result<S> {
    let ev = |x: &Node| eval_node(x, like, args);
    Ok(match n {
        Node::Const(v) => like.constant_like(*v),
        Node::Slot(i) => args[*i].clone(),
        Node::Neg(a) => -ev(a)?,
        Node::Add(a, b) => ev(a)? + ev(b)?,
        Node::Sub(a, b) => ev(a)? - ev(b)?,
        Node::Mul(a, b) => ev(a)? * ev(b)?,
        Node::Div(a, b) => {
            let num = ev(a)?;
            let den = ev(b)?;
            if den.value() == 0.0 {
                return Err(Error::Domain { op: "division", detail: "divisor has zero constant term".into() });
            }
            num / den
        }
        Node::PowI(a, k) => {
            let base = ev(a)?;
            if *k < 0 && base.value() == 0.0 {
                return Err(Error::Domain { op: "power", detail: "negative power of zero".into() });
            }
            base.powi(*k)
        }
        Node::Pow(a, b) => {
            let base = ev(a)?;
            if base.value() <= 0.0 {
                return Err(Error::Domain {
                    op: "power",
                    detail: format!("non-integer power of non-positive base {}", base.value()),
                });
            }
            base.powf(&ev(b)?)
        }
        Node::Call(f, a) => {
            let x = ev(a)?;
            match f {
                Func::Sin => x.sin(),
                Func::Cos => x.cos(),
                Func::Exp => x.exp(),
                Func::Tanh => x.tanh(),
                Func::Log => {
                    if x.value() <= 0.0 {
                        return Err(Error::Domain {
                            op: "log",
                            detail: format!("non-positive argument {}", x.value()),
                        });
                    }
                    x.ln()
                }
                Func::Sqrt => {
                    if x.value() < 0.0 {
                        return Err(Error::Domain {
                            op: "sqrt",
                            detail: format!("negative argument {}", x.value()),
                        });
                    }
                    x.sqrt()
                }
            }
        }
    })
}

// ---- lexer ----

#[derive(Clone, Debug, PartialEq)]
enum TokKind {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

impl TokKind {
    fn describe(&self) -> String {
        match self {
            TokKind::Num(v) => format!("number {v}"),
            TokKind::Ident(s) => format!("identifier `{s}`"),
            TokKind::Op(c) => format!("`{c}`"),
            TokKind::LParen => "`(`".into(),
            TokKind::RParen => "`)`".into(),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    kind: TokKind,
    offset: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push(Token { kind: TokKind::Op(c as char), offset: start });
                i += 1;
            }
            b'(' => {
                out.push(Token { kind: TokKind::LParen, offset: start });
                i += 1;
            }
            b')' => {
                out.push(Token { kind: TokKind::RParen, offset: start });
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    } else {
                        return Err(ParseError {
                            offset: j,
                            message: "malformed exponent".into(),
                            expected: vec!["digit".into()],
                        });
                    }
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| ParseError {
                    offset: start,
                    message: format!("malformed number `{text}`"),
                    expected: vec!["number".into()],
                })?;
                out.push(Token { kind: TokKind::Num(v), offset: start });
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token { kind: TokKind::Ident(src[start..i].to_string()), offset: start });
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                    expected: atom_expected(),
                });
            }
        }
    }
    Ok(out)
}

fn atom_expected() -> Vec<String> {
    vec!["number".into(), "identifier".into(), "`(`".into(), "`-`".into()]
}

// ---- parser ----

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_op(&self) -> Option<char> {
        match self.peek() {
            Some(Token { kind: TokKind::Op(c), .. }) => Some(*c),
            _ => None,
        }
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end, |t| t.offset)
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek_op() == Some('-') {
            self.pos += 1;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => {
                return Err(ParseError {
                    offset,
                    message: "unexpected end of input".into(),
                    expected: atom_expected(),
                })
            }
        };
        self.pos += 1;
        match tok.kind {
            TokKind::Num(v) => Ok(Expr::Num(v)),
            TokKind::LParen => {
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            TokKind::Ident(name) => {
                if matches!(self.peek(), Some(Token { kind: TokKind::LParen, .. })) {
                    let f = Func::from_name(&name).ok_or_else(|| ParseError {
                        offset: tok.offset,
                        message: format!("unknown function `{name}`"),
                        expected: Func::ALL.iter().map(|f| f.name().to_string()).collect(),
                    })?;
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    Ok(Expr::Call(f, Box::new(arg)))
                } else if name == "pi" {
                    Ok(Expr::Pi)
                } else if Func::from_name(&name).is_some() {
                    Err(ParseError {
                        offset: self.offset(),
                        message: format!("function `{name}` needs an argument"),
                        expected: vec!["`(`".into()],
                    })
                } else {
                    Ok(Expr::Var(name))
                }
            }
            other => Err(ParseError {
                offset,
                message: format!("unexpected {}", other.describe()),
                expected: atom_expected(),
            }),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Some(Token { kind: TokKind::RParen, .. }) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(ParseError {
                offset: self.offset(),
                message: "unclosed parenthesis".into(),
                expected: vec!["`)`".into(), "operator".into()],
            }),
        }
    }
}

// ---- printer ----

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        Expr::Neg(_) => 3,
        Expr::Bin(BinOp::Pow, ..) => 4,
        _ => 5,
    }
}

fn write_paren(f: &mut fmt::Formatter<'_>, e: &Expr, paren: bool) -> fmt::Result {
    if paren {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v:?}"),
            Expr::Pi => write!(f, "pi"),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(a) => {
                write!(f, "-")?;
                write_paren(f, a, prec(a) < 3)
            }
            Expr::Call(g, a) => write!(f, "{}({a})", g.name()),
            Expr::Bin(BinOp::Pow, a, b) => {
                write_paren(f, a, prec(a) <= 4)?;
                write!(f, "^")?;
                write_paren(f, b, prec(b) < 3)
            }
            Expr::Bin(op, a, b) => {
                let p = prec(self);
                write_paren(f, a, prec(a) < p)?;
                write!(f, "{}", op.symbol())?;
                write_paren(f, b, prec(b) <= p)
            }
        }
    }
}
