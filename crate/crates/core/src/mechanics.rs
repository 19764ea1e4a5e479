//! Lagrangians, admissible paths, forces, momenta and the closed-form
//! Euler–Lagrange oracles.

use crate::algebroid::AlgebroidStructure;
use crate::error::{Error, Result};
use crate::expr::{Compiled, Expr};
use crate::jet::{binom, gradient, Jet, Scalar};
use crate::prolong::{embed_ek, eps_k, pairing_momentum, pairing_tk, EkCovector, EkPoint, TkCovector};

/// Default cap on the Lagrangian order.
pub const DEFAULT_MAX_ORDER: usize = 6;

/// Coordinate names `x1..xm, y1_0..y1_{k−1}, ..., yr_0..yr_{k−1}`.
pub fn coordinate_names(m: usize, r: usize, k: usize) -> Vec<String> {
    let mut names: Vec<String> = (1..=m).map(|a| format!("x{a}")).collect();
    for i in 1..=r {
        for alpha in 0..k {
            names.push(format!("y{i}_{alpha}"));
        }
    }
    names
}

fn sign(a: usize) -> f64 {
    if a.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// A k-th order Lagrangian on Eᵏ.
#[derive(Clone, Debug)]
pub struct Lagrangian {
    k: usize,
    m: usize,
    r: usize,
    expr: Expr,
    compiled: Compiled,
}

impl Lagrangian {
    pub fn new(expr: Expr, m: usize, r: usize, k: usize) -> Result<Self> {
        Self::with_max_order(expr, m, r, k, DEFAULT_MAX_ORDER)
    }

    pub fn with_max_order(expr: Expr, m: usize, r: usize, k: usize, max_order: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::Schema("Lagrangian order must be at least 1".into()));
        }
        if k > max_order {
            return Err(Error::OrderTooLarge { order: k, max: max_order });
        }
        if r == 0 {
            return Err(Error::Schema("rank must be at least 1".into()));
        }
        let names = coordinate_names(m, r, k);
        for v in expr.free_vars() {
            if !names.contains(&v) {
                return Err(Error::Schema(format!(
                    "Lagrangian references `{v}`; allowed are x1..x{m} and yi_α with i <= {r}, α < {k}"
                )));
            }
        }
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let compiled = expr.compile(&refs)?;
        Ok(Self { k, m, r, expr, compiled })
    }

    pub fn parse(src: &str, m: usize, r: usize, k: usize) -> Result<Self> {
        Self::new(crate::expr::parse(src)?, m, r, k)
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    fn args<S: Scalar>(&self, x: &[S], y: &[Vec<S>]) -> Vec<S> {
        let mut args: Vec<S> = x.to_vec();
        for row in y {
            args.extend(row.iter().take(self.k).cloned());
        }
        args
    }

    pub fn value<S: Scalar>(&self, x: &[S], y: &[Vec<S>], like: &S) -> Result<S> {
        self.compiled.eval_like(like, &self.args(x, y))
    }

    /// `(∂L/∂x, ∂L/∂y^{(α)})` through order-1 seeds.
    #[allow(clippy::type_complexity)]
    pub fn differential<S: Scalar>(&self, x: &[S], y: &[Vec<S>]) -> Result<(Vec<S>, Vec<Vec<S>>)> {
        if x.len() != self.m || y.len() != self.r {
            return Err(Error::Contract("point does not match the Lagrangian's dimensions".into()));
        }
        let g = gradient(&self.compiled, &self.args(x, y))?;
        let dx = g[..self.m].to_vec();
        let dy = (0..self.r).map(|i| g[self.m + i * self.k..self.m + (i + 1) * self.k].to_vec()).collect();
        Ok((dx, dy))
    }
}

/// The generator curve `y(t)` of an admissible path.
#[derive(Clone, Debug)]
pub enum YCurve<S = f64> {
    Exprs(Vec<Compiled>),
    /// `yⁱ(t) = Σ_j coeffs[i][j]·((t − t0)/h)ʲ`.
    Poly { t0: f64, h: f64, coeffs: Vec<Vec<S>> },
}

impl<S: Scalar> YCurve<S> {
    pub fn from_exprs(y: &[Expr]) -> Result<Self> {
        for e in y {
            if let Some(v) = e.free_vars().into_iter().find(|v| v != "t") {
                return Err(Error::Schema(format!("path expression references `{v}`; only t is allowed")));
            }
        }
        Ok(YCurve::Exprs(y.iter().map(|e| e.compile(&["t"])).collect::<Result<_>>()?))
    }

    fn rank(&self) -> usize {
        match self {
            YCurve::Exprs(v) => v.len(),
            YCurve::Poly { coeffs, .. } => coeffs.len(),
        }
    }

    /// Jets of `y(t)` of the given order.
    pub fn jets(&self, t: f64, order: usize, like: &S) -> Result<Vec<Jet<S>>> {
        match self {
            YCurve::Exprs(v) => {
                let tj = Jet::variable(order, like.constant_like(t));
                v.iter().map(|e| e.eval_like(&tj, std::slice::from_ref(&tj))).collect()
            }
            YCurve::Poly { t0, h, coeffs } => {
                let mut u = Jet::constant_of(order, like.constant_like((t - t0) / h));
                if order >= 1 {
                    u = Jet::from_vec(
                        u.into_coeffs()
                            .into_iter()
                            .enumerate()
                            .map(|(i, c)| if i == 1 { like.constant_like(1.0 / h) } else { c })
                            .collect(),
                    );
                }
                Ok(coeffs
                    .iter()
                    .map(|row| {
                        let mut acc = Jet::constant_of(order, like.zero_like());
                        for c in row.iter().rev() {
                            acc = acc * u.clone() + Jet::constant_of(order, c.clone());
                        }
                        acc
                    })
                    .collect())
            }
        }
    }

    fn values(&self, t: f64, like: &S) -> Result<Vec<S>> {
        Ok(self.jets(t, 0, like)?.into_iter().map(|j| j.coeff(0).clone()).collect())
    }
}

/// An admissible path: the generator `y(t)` with the base curve obtained by
/// integrating `ẋ = ρ(x)·y` from `x0`.
#[derive(Clone, Debug)]
pub struct AdmissiblePath<S = f64> {
    pub y: YCurve<S>,
    pub x0: Vec<S>,
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
    nodes: Vec<Vec<S>>,
    like: S,
}

const DENSE_ORDER: usize = 8;

impl AdmissiblePath<f64> {
    pub fn from_exprs(a: &AlgebroidStructure, y: &[Expr], x0: &[f64], interval: (f64, f64), steps: usize) -> Result<Self> {
        Self::new(a, YCurve::from_exprs(y)?, x0.to_vec(), interval, steps, 0.0)
    }

    pub fn from_strs(a: &AlgebroidStructure, y: &[&str], x0: &[f64], interval: (f64, f64), steps: usize) -> Result<Self> {
        let y = y.iter().map(|s| crate::expr::parse(s).map_err(Error::from)).collect::<Result<Vec<_>>>()?;
        Self::from_exprs(a, &y, x0, interval, steps)
    }
}

impl<S: Scalar> AdmissiblePath<S> {
    pub fn new(a: &AlgebroidStructure, y: YCurve<S>, x0: Vec<S>, interval: (f64, f64), steps: usize, like: S) -> Result<Self> {
        let (t0, t1) = interval;
        if !t0.is_finite() || !t1.is_finite() || t1 <= t0 {
            return Err(Error::Schema(format!("invalid interval [{t0}, {t1}]")));
        }
        if steps == 0 {
            return Err(Error::Schema("need at least one integration step".into()));
        }
        if y.rank() != a.r() || x0.len() != a.m() {
            return Err(Error::Schema(format!(
                "path has {} generator components and {} initial coordinates; structure has r={} m={}",
                y.rank(),
                x0.len(),
                a.r(),
                a.m()
            )));
        }
        let mut p = AdmissiblePath { y, x0, t0, t1, steps, nodes: Vec::new(), like };
        p.integrate(a)?;
        Ok(p)
    }

    pub fn like(&self) -> &S {
        &self.like
    }

    fn h(&self) -> f64 {
        (self.t1 - self.t0) / self.steps as f64
    }

    fn rhs(&self, a: &AlgebroidStructure, t: f64, x: &[S]) -> Result<Vec<S>> {
        let y = self.y.values(t, &self.like)?;
        Ok(a.at(x, &self.like)?.anchor(&y))
    }

    fn integrate(&mut self, a: &AlgebroidStructure) -> Result<()> {
        let m = a.m();
        let mut x = self.x0.clone();
        self.nodes = vec![x.clone()];
        if m == 0 {
            return Ok(());
        }
        let h = self.h();
        let axpy = |x: &[S], k: &[S], s: f64| -> Vec<S> { x.iter().zip(k).map(|(a, b)| a.clone() + b.scale(s)).collect() };
        for n in 0..self.steps {
            let t = self.t0 + n as f64 * h;
            let k1 = self.rhs(a, t, &x)?;
            let k2 = self.rhs(a, t + 0.5 * h, &axpy(&x, &k1, 0.5 * h))?;
            let k3 = self.rhs(a, t + 0.5 * h, &axpy(&x, &k2, 0.5 * h))?;
            let k4 = self.rhs(a, t + h, &axpy(&x, &k3, h))?;
            x = (0..m)
                .map(|i| {
                    let inc = k1[i].clone() + (k2[i].clone() + k3[i].clone()).scale(2.0) + k4[i].clone();
                    x[i].clone() + inc.scale(h / 6.0)
                })
                .collect();
            if let Some(i) = x.iter().position(|v| !v.is_finite()) {
                return Err(Error::Numeric(format!("base integration produced a non-finite value in x{} at step {}", i + 1, n + 1)));
            }
            self.nodes.push(x.clone());
        }
        Ok(())
    }

    /// `x(t)` by Taylor re-expansion from the nearest integration node.
    pub fn base_at(&self, a: &AlgebroidStructure, t: f64) -> Result<Vec<S>> {
        if a.m() == 0 {
            return Ok(Vec::new());
        }
        let h = self.h();
        let n = (((t - self.t0) / h).round().max(0.0) as usize).min(self.steps);
        let tn = self.t0 + n as f64 * h;
        let dt = t - tn;
        if dt == 0.0 {
            return Ok(self.nodes[n].clone());
        }
        let y = self.y.jets(tn, DENSE_ORDER - 1, &self.like)?;
        let rows: Vec<Vec<S>> = y.into_iter().map(|j| j.into_coeffs()).collect();
        let xj = embed_ek(a, &self.nodes[n], &rows, DENSE_ORDER, &self.like)?;
        Ok(xj
            .into_iter()
            .map(|row| {
                let mut acc = row[DENSE_ORDER].clone();
                for q in (0..DENSE_ORDER).rev() {
                    acc = acc.scale(dt / (q + 1) as f64) + row[q].clone();
                }
                acc
            })
            .collect())
    }

    /// Time jets of `aᵏ(t)`: base jets and graded fiber jets, all of order `order`.
    #[allow(clippy::type_complexity)]
    pub fn ak_tjets(&self, a: &AlgebroidStructure, t: f64, k: usize, order: usize) -> Result<(Vec<Jet<S>>, Vec<Vec<Jet<S>>>)> {
        let x = self.base_at(a, t)?;
        let y = self.y.jets(t, order + k - 1, &self.like)?;
        let rows: Vec<Vec<S>> = y.into_iter().map(|j| j.into_coeffs()).collect();
        let xj = embed_ek(a, &x, &rows, order, &self.like)?.into_iter().map(Jet::from_vec).collect();
        let yj = rows
            .iter()
            .map(|row| (0..k).map(|alpha| Jet::from_vec(row[alpha..=alpha + order].to_vec())).collect())
            .collect();
        Ok((xj, yj))
    }

    /// The point `aᵏ(t)` of Eᵏ.
    pub fn ak_point(&self, a: &AlgebroidStructure, t: f64, k: usize) -> Result<EkPoint<S>> {
        let x = self.base_at(a, t)?;
        let y = self.y.jets(t, k - 1, &self.like)?.into_iter().map(|j| j.into_coeffs()).collect();
        EkPoint::new(k, x, y)
    }
}

/// `Λ_L = ε_k(dL)` along the path, as time jets of order `order`.
pub fn lambda_tjet<S: Scalar>(
    a: &AlgebroidStructure,
    l: &Lagrangian,
    path: &AdmissiblePath<S>,
    t: f64,
    order: usize,
) -> Result<TkCovector<Jet<S>>> {
    let k = l.order();
    let (xj, yj) = path.ak_tjets(a, t, k, order)?;
    let (dx, dy) = l.differential(&xj, &yj)?;
    let tlike = Jet::constant_of(order, path.like().clone());
    let psi = EkCovector { base: EkPoint { k, x: xj, y: yj }, dx, dy };
    eps_k(a, &psi, &tlike)
}

/// `Fᵢ = Σ_α (−1)^α C(k,α) ξᵢ^{(α,k−α)}` in the path's ring.
pub fn force_generic<S: Scalar>(a: &AlgebroidStructure, l: &Lagrangian, path: &AdmissiblePath<S>, t: f64) -> Result<Vec<S>> {
    let k = l.order();
    let lam = lambda_tjet(a, l, path, t, k)?;
    Ok(lam
        .xi
        .iter()
        .map(|z| {
            let mut acc = path.like().zero_like();
            for alpha in 0..=k {
                acc = acc + z[k - alpha].coeff(alpha).scale(sign(alpha) * binom(k as i64, alpha as i64));
            }
            acc
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ForceSample {
    pub t: f64,
    pub f: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentumSample {
    pub t: f64,
    /// Base jet `x^{(0..k−1)}`.
    pub xjet: Vec<Vec<f64>>,
    /// `m[i][β] = mᵢ^{(β)}`, β < k.
    pub m: Vec<Vec<f64>>,
}

pub fn force(a: &AlgebroidStructure, l: &Lagrangian, path: &AdmissiblePath, t: f64) -> Result<ForceSample> {
    let f = force_generic(a, l, path, t)?;
    if let Some(i) = f.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { component: i });
    }
    Ok(ForceSample { t, f })
}

/// `m^{(β)} = Σ_{a+b=β} (−1)^a C(k,b) dᵃζ^{(b)}` together with its time
/// derivative, from `Λ_L` time jets of order ≥ k.
#[allow(clippy::type_complexity)]
fn momentum_from_lambda<S: Scalar>(lam: &TkCovector<Jet<S>>, k: usize, shift: usize) -> Vec<Vec<S>> {
    lam.xi
        .iter()
        .map(|z| {
            (0..k)
                .map(|beta| {
                    let mut acc = z[0].coeff(0).zero_like();
                    for a in 0..=beta {
                        let b = beta - a;
                        acc = acc + z[b].coeff(a + shift).scale(sign(a) * binom(k as i64, b as i64));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn momentum_generic<S: Scalar>(a: &AlgebroidStructure, l: &Lagrangian, path: &AdmissiblePath<S>, t: f64) -> Result<Vec<Vec<S>>> {
    let k = l.order();
    let lam = lambda_tjet(a, l, path, t, k - 1)?;
    Ok(momentum_from_lambda(&lam, k, 0))
}

pub fn momentum(a: &AlgebroidStructure, l: &Lagrangian, path: &AdmissiblePath, t: f64) -> Result<MomentumSample> {
    let k = l.order();
    let lam = lambda_tjet(a, l, path, t, k - 1)?;
    let m = momentum_from_lambda(&lam, k, 0);
    let xjet = lam.xjet.iter().map(|row| row[0].coeffs()[..k].to_vec()).collect();
    Ok(MomentumSample { t, xjet, m })
}

/// Compiled variation generator `b(t)`.
#[derive(Clone, Debug)]
pub struct VariationGenerator {
    b: Vec<Compiled>,
}

impl VariationGenerator {
    pub fn new(b: &[Expr]) -> Result<Self> {
        match YCurve::<f64>::from_exprs(b)? {
            YCurve::Exprs(b) => Ok(Self { b }),
            YCurve::Poly { .. } => unreachable!(),
        }
    }

    pub fn from_strs(b: &[&str]) -> Result<Self> {
        let b = b.iter().map(|s| crate::expr::parse(s).map_err(Error::from)).collect::<Result<Vec<_>>>()?;
        Self::new(&b)
    }

    /// `b^{(0..=order)}(t)` per component.
    pub fn jet(&self, t: f64, order: usize) -> Result<Vec<Vec<f64>>> {
        let tj = Jet::variable(order, t);
        self.b.iter().map(|e| e.eval_like(&tj, std::slice::from_ref(&tj)).map(|j| j.into_coeffs())).collect()
    }
}

/// Tangent vector to Eᵏ: components along `xᵃ` and `y^{i,(α)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct EkTangent {
    pub dx: Vec<f64>,
    pub dy: Vec<Vec<f64>>,
}

/// The admissible variation `δ_b aᵏ(t)`, from `⟨Ψ, δ⟩ = ⟨ε_k(Ψ), jᵏb⟩` over
/// the coordinate covector basis.
pub fn variation_apply(a: &AlgebroidStructure, path: &AdmissiblePath, b: &VariationGenerator, t: f64, k: usize) -> Result<EkTangent> {
    let (m, r) = (a.m(), a.r());
    if b.b.len() != r {
        return Err(Error::Contract(format!("variation generator needs {r} components")));
    }
    let base = path.ak_point(a, t, k)?;
    let jb = b.jet(t, k)?;
    let basis = |ax: Option<usize>, ay: Option<(usize, usize)>| -> Result<f64> {
        let mut dx = vec![0.0; m];
        let mut dy = vec![vec![0.0; k]; r];
        if let Some(c) = ax {
            dx[c] = 1.0;
        }
        if let Some((i, al)) = ay {
            dy[i][al] = 1.0;
        }
        let z = eps_k(a, &EkCovector { base: base.clone(), dx, dy }, &0.0)?;
        pairing_tk(&z.xi, &jb, k)
    };
    let mut dx = vec![0.0; m];
    for (c, v) in dx.iter_mut().enumerate() {
        *v = basis(Some(c), None)?;
    }
    let mut dy = vec![vec![0.0; k]; r];
    for (i, row) in dy.iter_mut().enumerate() {
        for (al, v) in row.iter_mut().enumerate() {
            *v = basis(None, Some((i, al)))?;
        }
    }
    Ok(EkTangent { dx, dy })
}

/// Terms of the pointwise identity `⟨dL, δ_b⟩ = ⟨F, b⟩ + d/dt⟨M, j^{k−1}b⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityTerms {
    pub lhs: f64,
    pub force_term: f64,
    pub boundary_term: f64,
}

impl IdentityTerms {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.force_term - self.boundary_term).abs()
    }
}

pub fn variational_identity(
    a: &AlgebroidStructure,
    l: &Lagrangian,
    path: &AdmissiblePath,
    b: &VariationGenerator,
    t: f64,
) -> Result<IdentityTerms> {
    let k = l.order();
    let delta = variation_apply(a, path, b, t, k)?;
    let base = path.ak_point(a, t, k)?;
    let (dx, dy) = l.differential(&base.x, &base.y)?;
    let mut lhs: f64 = dx.iter().zip(&delta.dx).map(|(u, v)| u * v).sum();
    for (ru, rv) in dy.iter().zip(&delta.dy) {
        lhs += ru.iter().zip(rv).map(|(u, v)| u * v).sum::<f64>();
    }
    let lam = lambda_tjet(a, l, path, t, k)?;
    let jb = b.jet(t, k)?;
    let mut force_term = 0.0;
    for (z, bj) in lam.xi.iter().zip(&jb) {
        let mut f = 0.0;
        for alpha in 0..=k {
            f += sign(alpha) * binom(k as i64, alpha as i64) * z[k - alpha].coeffs()[alpha];
        }
        force_term += f * bj[0];
    }
    let m0 = momentum_from_lambda(&lam, k, 0);
    let m1 = momentum_from_lambda(&lam, k, 1);
    let mut boundary_term = 0.0;
    for i in 0..a.r() {
        for g in 0..k {
            boundary_term += m1[i][g] * jb[i][k - 1 - g] + m0[i][g] * jb[i][k - g];
        }
    }
    Ok(IdentityTerms { lhs, force_term, boundary_term })
}

/// `∫ L(aᵏ(t)) dt` by composite Simpson at the path resolution.
pub fn action(a: &AlgebroidStructure, l: &Lagrangian, path: &AdmissiblePath) -> Result<f64> {
    let n = if path.steps.is_multiple_of(2) { path.steps } else { path.steps + 1 };
    let h = (path.t1 - path.t0) / n as f64;
    let k = l.order();
    let mut acc = 0.0;
    for j in 0..=n {
        let t = path.t0 + j as f64 * h;
        let p = path.ak_point(a, t, k)?;
        let v = l.value(&p.x, &p.y, &0.0)?;
        let w = if j == 0 || j == n {
            1.0
        } else if j % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * v;
    }
    Ok(acc * h / 3.0)
}

/// Closed-form Euler–Lagrange families.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleFamily {
    Tangent,
    AlgebroidK1,
    AlgebroidK2,
    EulerPoincare,
    HamelK2,
}

impl OracleFamily {
    pub const ALL: [OracleFamily; 5] = [
        OracleFamily::Tangent,
        OracleFamily::AlgebroidK1,
        OracleFamily::AlgebroidK2,
        OracleFamily::EulerPoincare,
        OracleFamily::HamelK2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OracleFamily::Tangent => "tangent",
            OracleFamily::AlgebroidK1 => "algebroid_k1",
            OracleFamily::AlgebroidK2 => "algebroid_k2",
            OracleFamily::EulerPoincare => "euler_poincare",
            OracleFamily::HamelK2 => "hamel_k2",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == s)
    }
}

fn const_value(e: &Expr) -> Option<f64> {
    if e.free_vars().is_empty() {
        e.eval_const().ok()
    } else {
        None
    }
}

/// Size of the leading tangent block: the largest n such that ρ restricted
/// to the first n sections is the identity on the base and the bracket
/// vanishes whenever a tangent index is involved.
fn tangent_block(a: &AlgebroidStructure) -> Option<usize> {
    let (m, r) = (a.m(), a.r());
    if m > r {
        return None;
    }
    for (b, row) in a.rho_exprs().iter().enumerate() {
        for (i, e) in row.iter().enumerate() {
            if const_value(e)? != if b == i { 1.0 } else { 0.0 } {
                return None;
            }
        }
    }
    let c = a.c_exprs();
    for k in 0..r {
        for i in 0..r {
            for j in 0..r {
                let v = const_value(&c[k][i][j])?;
                if (k < m || i < m || j < m) && v != 0.0 {
                    return None;
                }
            }
        }
    }
    Some(m)
}

fn inapplicable(f: OracleFamily, reason: &str) -> Error {
    Error::Inapplicable { family: f.name().to_string(), reason: reason.to_string() }
}

/// `d^n` of the time jet `j` at the expansion point.
fn d(j: &Jet, n: usize) -> f64 {
    j.coeffs()[n]
}

/// Closed-form residual of the given family, evaluated by differentiating
/// `dL` along the path directly (no ε_k).
pub fn oracle_el(a: &AlgebroidStructure, l: &Lagrangian, path: &AdmissiblePath, t: f64, family: OracleFamily) -> Result<Vec<f64>> {
    let k = l.order();
    let (m, r) = (a.m(), a.r());
    match family {
        OracleFamily::Tangent => {
            if tangent_block(a) != Some(r) {
                return Err(inapplicable(family, "structure is not a tangent bundle"));
            }
        }
        OracleFamily::AlgebroidK1 if k != 1 => return Err(inapplicable(family, "requires order 1")),
        OracleFamily::AlgebroidK2 if k != 2 => return Err(inapplicable(family, "requires order 2")),
        OracleFamily::EulerPoincare if m != 0 => return Err(inapplicable(family, "requires a Lie algebra (m = 0)")),
        OracleFamily::HamelK2 => {
            if k != 2 {
                return Err(inapplicable(family, "requires order 2"));
            }
            if tangent_block(a).is_none() {
                return Err(inapplicable(family, "requires a tangent factor followed by a Lie algebra factor"));
            }
        }
        _ => {}
    }
    let (xj, yj) = path.ak_tjets(a, t, k, k)?;
    let (dx, dy) = l.differential(&xj, &yj)?;
    let x0: Vec<f64> = xj.iter().map(|j| j.coeffs()[0]).collect();
    let y0: Vec<f64> = yj.iter().map(|row| row[0].coeffs()[0]).collect();
    let at = a.at(&x0, &0.0)?;
    let c = at.c_dense();
    let rho = at.rho_dense();

    // Σ_α (−1)^α dᵅ ∂L/∂x^{(α)} on the tangent block (x^{(α)} = y^{(α−1)})
    let tangent_el = |i: usize| -> f64 {
        let mut acc = d(&dx[i], 0);
        for alpha in 1..=k {
            acc += sign(alpha) * d(&dy[i][alpha - 1], alpha);
        }
        acc
    };
    // E_i = Σ_α (−1)^α dᵅ ∂L/∂y^{(α)} as a time jet of order 1
    let ep_inner = |i: usize| -> (f64, f64) {
        let mut e0 = 0.0;
        let mut e1 = 0.0;
        for alpha in 0..k {
            e0 += sign(alpha) * d(&dy[i][alpha], alpha);
            e1 += sign(alpha) * d(&dy[i][alpha], alpha + 1);
        }
        (e0, e1)
    };
    let mut out = vec![0.0; r];
    match family {
        OracleFamily::Tangent => {
            for (i, o) in out.iter_mut().enumerate() {
                *o = tangent_el(i);
            }
        }
        OracleFamily::AlgebroidK1 => {
            // −[(δ d/dt + cᵏᵢⱼ yʲ) ∂L/∂yᵏ − ρᵃᵢ ∂L/∂xᵃ]
            for (i, o) in out.iter_mut().enumerate() {
                let mut v = d(&dy[i][0], 1);
                for kk in 0..r {
                    for j in 0..r {
                        v += c[kk][i][j] * y0[j] * d(&dy[kk][0], 0);
                    }
                }
                for b in 0..m {
                    v -= rho[b][i] * d(&dx[b], 0);
                }
                *o = -v;
            }
        }
        OracleFamily::AlgebroidK2 => {
            // (δ d/dt + cᵏᵢⱼ yʲ)(d/dt ∂L/∂y^{k,(1)} − ∂L/∂yᵏ) + ρᵃᵢ ∂L/∂xᵃ
            let q = |kk: usize, n: usize| d(&dy[kk][1], n + 1) - d(&dy[kk][0], n);
            for (i, o) in out.iter_mut().enumerate() {
                let mut v = q(i, 1);
                for kk in 0..r {
                    for j in 0..r {
                        v += c[kk][i][j] * y0[j] * q(kk, 0);
                    }
                }
                for b in 0..m {
                    v += rho[b][i] * d(&dx[b], 0);
                }
                *o = v;
            }
        }
        OracleFamily::EulerPoincare => {
            // (−d/dt + ad*_{a⁰}) E with (ad*_a v)ⱼ = cᵏᵢⱼ aⁱ vₖ
            let e: Vec<(f64, f64)> = (0..r).map(ep_inner).collect();
            for (j, o) in out.iter_mut().enumerate() {
                let mut v = -e[j].1;
                for kk in 0..r {
                    for i in 0..r {
                        v += c[kk][i][j] * y0[i] * e[kk].0;
                    }
                }
                *o = v;
            }
        }
        OracleFamily::HamelK2 => {
            let n = m;
            for (i, o) in out.iter_mut().enumerate().take(n) {
                *o = tangent_el(i);
            }
            // (δ d/dt + cᵏᵢⱼ aʲ)(d/dt ∂L/∂ȧᵏ − ∂L/∂aᵏ) on the Lie block
            let q = |kk: usize, s: usize| d(&dy[kk][1], s + 1) - d(&dy[kk][0], s);
            for i in n..r {
                let mut v = q(i, 1);
                for kk in n..r {
                    for j in n..r {
                        v += c[kk][i][j] * y0[j] * q(kk, 0);
                    }
                }
                out[i] = v;
            }
        }
    }
    Ok(out)
}

/// Admissible boundary data for the transversality conditions.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryCondition {
    Fixed,
    Free,
    /// Pairs `(j^{k−1}b(t0), j^{k−1}b(t1))`, each `r × k`.
    Spanned(Vec<(Vec<Vec<f64>>, Vec<Vec<f64>>)>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransversalityReport {
    pub kind: &'static str,
    pub m0: Vec<Vec<f64>>,
    pub m1: Vec<Vec<f64>>,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn transversality_check(
    a: &AlgebroidStructure,
    l: &Lagrangian,
    path: &AdmissiblePath,
    bc: &BoundaryCondition,
    tol: f64,
) -> Result<TransversalityReport> {
    let k = l.order();
    let m0 = momentum(a, l, path, path.t0)?.m;
    let m1 = momentum(a, l, path, path.t1)?.m;
    let (kind, residual) = match bc {
        BoundaryCondition::Fixed => ("fixed", 0.0),
        BoundaryCondition::Free => {
            let sup = m0.iter().chain(&m1).flatten().fold(0.0f64, |s, v| s.max(v.abs()));
            ("free", sup)
        }
        BoundaryCondition::Spanned(pairs) => {
            let mut worst: f64 = 0.0;
            for (b0, b1) in pairs {
                let v = pairing_momentum(&m1, b1, k - 1)? - pairing_momentum(&m0, b0, k - 1)?;
                worst = worst.max(v.abs());
            }
            ("spanned", worst)
        }
    };
    Ok(TransversalityReport { kind, m0, m1, residual, tol, pass: residual <= tol })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tangent1() -> AlgebroidStructure {
        AlgebroidStructure::tangent(1)
    }

    #[test]
    fn integrate_examples() {
        let a = tangent1();
        let p = AdmissiblePath::from_strs(&a, &["2*t"], &[0.0], (0.0, 1.0), 10).unwrap();
        for t in [0.0, 0.13, 0.5, 0.77, 1.0] {
            assert!((p.base_at(&a, t).unwrap()[0] - t * t).abs() < 1e-14);
        }
        let lie = AlgebroidStructure::lie_preset("so3-like").unwrap();
        let p = AdmissiblePath::from_strs(&lie, &["1", "0", "0"], &[], (0.0, 1.0), 10).unwrap();
        assert!(p.base_at(&lie, 0.5).unwrap().is_empty());
        let act = AlgebroidStructure::from_strings(1, 1, &[vec!["x1"]], &[vec![vec!["0"]]], "action").unwrap();
        let p = AdmissiblePath::from_strs(&act, &["1"], &[1.0], (0.0, 1.0), 1000).unwrap();
        for t in [0.25, 0.5, 0.6123, 1.0] {
            assert!((p.base_at(&act, t).unwrap()[0] - f64::exp(t)).abs() < 1e-8);
        }
    }

    #[test]
    fn force_examples() {
        let a = tangent1();
        let l = Lagrangian::parse("y1_1^2/2", 1, 1, 2).unwrap();
        // x = t⁴ ⇒ y = 4t³
        let p = AdmissiblePath::from_strs(&a, &["4*t^3"], &[0.0], (0.0, 1.0), 50).unwrap();
        for t in [0.0, 0.3, 0.8] {
            assert!((force(&a, &l, &p, t).unwrap().f[0] - 24.0).abs() < 1e-9);
        }
        let p = AdmissiblePath::from_strs(&a, &["3*t^2"], &[0.0], (0.0, 1.0), 50).unwrap();
        assert!(force(&a, &l, &p, 0.4).unwrap().f[0].abs() < 1e-12);

        let so3 = AlgebroidStructure::lie_preset("so3-like").unwrap();
        let l = Lagrangian::parse("(1*y1_0^2 + 2*y2_0^2 + 3*y3_0^2)/2", 0, 3, 1).unwrap();
        let p = AdmissiblePath::from_strs(&so3, &["1", "0", "0"], &[], (0.0, 1.0), 10).unwrap();
        assert_eq!(force(&so3, &l, &p, 0.5).unwrap().f, vec![0.0; 3]);
    }

    #[test]
    fn momentum_examples() {
        let a = tangent1();
        let l = Lagrangian::parse("y1_1^2/2", 1, 1, 2).unwrap();
        let p = AdmissiblePath::from_strs(&a, &["4*t^3"], &[0.0], (0.0, 1.0), 50).unwrap();
        let t = 0.6;
        let m = momentum(&a, &l, &p, t).unwrap();
        assert!((m.m[0][0] - 12.0 * t * t).abs() < 1e-12);
        assert!((m.m[0][1] + 24.0 * t).abs() < 1e-12);
        assert!((m.xjet[0][0] - t.powi(4)).abs() < 1e-12);

        let l = Lagrangian::parse("y1_0^2/2", 1, 1, 2).unwrap();
        assert_eq!(momentum(&a, &l, &p, t).unwrap().m[0][0], 0.0);

        let heis = AlgebroidStructure::affine_heis("x2").unwrap();
        let l = Lagrangian::parse("x1*y1_0^2 + y2_0*y3_0 + x2", 2, 3, 1).unwrap();
        let p = AdmissiblePath::from_strs(&heis, &["1+t", "t^2", "-t"], &[0.2, 0.1], (0.0, 1.0), 100).unwrap();
        let pt = p.ak_point(&heis, 0.4, 1).unwrap();
        let (_, dy) = l.differential(&pt.x, &pt.y).unwrap();
        let m = momentum(&heis, &l, &p, 0.4).unwrap();
        for i in 0..3 {
            assert_eq!(m.m[i][0], dy[i][0]);
        }
    }

    #[test]
    fn action_examples() {
        let a = tangent1();
        let p = AdmissiblePath::from_strs(&a, &["1"], &[0.0], (0.0, 2.0), 10).unwrap();
        assert_eq!(action(&a, &Lagrangian::parse("0", 1, 1, 1).unwrap(), &p).unwrap(), 0.0);
        assert!((action(&a, &Lagrangian::parse("1", 1, 1, 1).unwrap(), &p).unwrap() - 2.0).abs() < 1e-14);
        let p = AdmissiblePath::from_strs(&a, &["1"], &[0.0], (0.0, 1.0), 10).unwrap();
        assert!((action(&a, &Lagrangian::parse("y1_0^2/2", 1, 1, 1).unwrap(), &p).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn tangent_variation_is_jet_of_generator() {
        let a = tangent1();
        let p = AdmissiblePath::from_strs(&a, &["sin(t)"], &[0.3], (0.0, 1.0), 20).unwrap();
        let b = VariationGenerator::from_strs(&["t^3 + 2*t"]).unwrap();
        let t = 0.5;
        let d = variation_apply(&a, &p, &b, t, 3).unwrap();
        let jb = b.jet(t, 3).unwrap();
        assert!((d.dx[0] - jb[0][0]).abs() < 1e-14);
        for alpha in 0..3 {
            assert!((d.dy[0][alpha] - jb[0][alpha + 1]).abs() < 1e-13);
        }
    }

    #[test]
    fn k1_variation_matches_kappa() {
        use crate::algebroid::TEVector;
        let a = AlgebroidStructure::affine_heis("x2").unwrap();
        let p = AdmissiblePath::from_strs(&a, &["1+t", "t^2", "-t"], &[0.2, 0.1], (0.0, 1.0), 100).unwrap();
        let b = VariationGenerator::from_strs(&["cos(t)", "t", "1-t^2"]).unwrap();
        let t = 0.4;
        let d = variation_apply(&a, &p, &b, t, 1).unwrap();
        let pt = p.ak_point(&a, t, 1).unwrap();
        let y: Vec<f64> = pt.y.iter().map(|r| r[0]).collect();
        let jb = b.jet(t, 1).unwrap();
        let bv: Vec<f64> = jb.iter().map(|r| r[0]).collect();
        let bdot: Vec<f64> = jb.iter().map(|r| r[1]).collect();
        // X = (x, b, ρ(x)y, ḃ) is κ-related to a vector over y
        let at = a.at(&pt.x, &0.0).unwrap();
        let xv = TEVector { x: pt.x.clone(), y: bv, xdot: at.anchor(&y), ydot: bdot };
        let kx = a.kappa_apply(&xv, &y).unwrap();
        for c in 0..2 {
            assert!((kx.xdot[c] - d.dx[c]).abs() < 1e-12);
        }
        for i in 0..3 {
            assert!((kx.ydot[i] - d.dy[i][0]).abs() < 1e-12);
        }
    }

    #[test]
    fn transversality_examples() {
        let a = tangent1();
        let l = Lagrangian::parse("y1_0^2/2", 1, 1, 1).unwrap();
        let p = AdmissiblePath::from_strs(&a, &["1"], &[0.0], (0.0, 1.0), 10).unwrap();
        assert!(transversality_check(&a, &l, &p, &BoundaryCondition::Fixed, 1e-9).unwrap().pass);
        let rep = transversality_check(&a, &l, &p, &BoundaryCondition::Free, 1e-9).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.residual, 1.0);
        let p = AdmissiblePath::from_strs(&a, &["0"], &[2.0], (0.0, 1.0), 10).unwrap();
        assert!(transversality_check(&a, &l, &p, &BoundaryCondition::Free, 1e-9).unwrap().pass);
    }

    #[test]
    fn schema_checks() {
        assert!(matches!(Lagrangian::parse("t*y1_0", 1, 1, 1), Err(Error::Schema(_))));
        assert!(matches!(Lagrangian::parse("y1_1", 1, 1, 1), Err(Error::Schema(_))));
        assert!(matches!(Lagrangian::parse("y1_0", 1, 1, 7), Err(Error::OrderTooLarge { .. })));
        assert!(Lagrangian::with_max_order(crate::expr::parse("y1_6").unwrap(), 1, 1, 7, 8).is_ok());
        let a = tangent1();
        assert!(matches!(AdmissiblePath::from_strs(&a, &["x1"], &[0.0], (0.0, 1.0), 10), Err(Error::Schema(_))));
    }

    #[test]
    fn oracle_applicability() {
        let heis = AlgebroidStructure::affine_heis("x2").unwrap();
        let l = Lagrangian::parse("y1_0^2", 2, 3, 1).unwrap();
        let p = AdmissiblePath::from_strs(&heis, &["1", "0", "0"], &[0.0, 0.0], (0.0, 1.0), 10).unwrap();
        for f in [OracleFamily::Tangent, OracleFamily::AlgebroidK2, OracleFamily::EulerPoincare, OracleFamily::HamelK2] {
            assert!(matches!(oracle_el(&heis, &l, &p, 0.5, f), Err(Error::Inapplicable { .. })), "{f:?}");
        }
    }
}
