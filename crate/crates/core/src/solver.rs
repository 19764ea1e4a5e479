//! Least-squares collocation for stationary trajectories.

use nalgebra::{DMatrix, DVector};

use crate::algebroid::AlgebroidStructure;
use crate::error::{Error, Result};
use crate::expr::{Compiled, Expr};
use crate::jet::{Jet, Scalar};
use crate::mechanics::{force_generic, momentum_generic, AdmissiblePath, Lagrangian, YCurve};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endpoint {
    Start,
    End,
}

/// Prescribed `y^{i,(α)}` at an endpoint (`component` is zero-based).
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryValue {
    pub endpoint: Endpoint,
    pub component: usize,
    pub order: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    pub penalty: f64,
    pub max_iter: usize,
    pub lambda0: f64,
    pub force_tol: f64,
    pub boundary_tol: f64,
    /// RK4 steps for the base curve.
    pub steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { penalty: 1e6, max_iter: 200, lambda0: 1e-3, force_tol: 1e-6, boundary_tol: 1e-8, steps: 200 }
    }
}

#[derive(Clone, Debug)]
pub struct CollocationProblem {
    pub algebroid: AlgebroidStructure,
    pub lagrangian: Lagrangian,
    pub interval: (f64, f64),
    pub x0: Vec<f64>,
    pub degree: usize,
    pub nodes: usize,
    pub boundary: Vec<BoundaryValue>,
    /// Endpoints where all momentum components must vanish.
    pub free_momentum: Vec<Endpoint>,
    /// Optional target for `x(t1)`.
    pub base_target: Option<Vec<f64>>,
    /// Optional external force `f(t)`; the residual is `F − f`.
    pub external: Option<Vec<Expr>>,
    pub options: SolverOptions,
}

/// `n` Chebyshev points of the first kind on `[t0, t1]`, ascending.
pub fn chebyshev_nodes(n: usize, t0: f64, t1: f64) -> Vec<f64> {
    let (mid, half) = (0.5 * (t0 + t1), 0.5 * (t1 - t0));
    (0..n)
        .rev()
        .map(|j| mid + half * (std::f64::consts::PI * (2 * j + 1) as f64 / (2 * n) as f64).cos())
        .collect()
}

#[derive(Clone, Debug)]
struct Residuals<S> {
    force: Vec<S>,
    boundary: Vec<S>,
}

impl CollocationProblem {
    pub fn new(algebroid: AlgebroidStructure, lagrangian: Lagrangian, interval: (f64, f64), x0: Vec<f64>, degree: usize) -> Self {
        let nodes = (degree + 1).max(2 * degree);
        Self {
            algebroid,
            lagrangian,
            interval,
            x0,
            degree,
            nodes,
            boundary: Vec::new(),
            free_momentum: Vec::new(),
            base_target: None,
            external: None,
            options: SolverOptions::default(),
        }
    }

    pub fn unknowns(&self) -> usize {
        self.algebroid.r() * (self.degree + 1)
    }

    fn h(&self) -> f64 {
        self.interval.1 - self.interval.0
    }

    fn validate(&self) -> Result<Vec<Compiled>> {
        let (r, k) = (self.algebroid.r(), self.lagrangian.order());
        if self.nodes < self.degree + 1 {
            return Err(Error::Schema(format!("need at least {} collocation nodes", self.degree + 1)));
        }
        if self.x0.len() != self.algebroid.m() {
            return Err(Error::Schema(format!("x0 must have {} components", self.algebroid.m())));
        }
        for b in &self.boundary {
            if b.component >= r || b.order >= k {
                return Err(Error::Schema(format!(
                    "boundary value y{}^({}) out of range (r = {r}, orders < {k})",
                    b.component + 1,
                    b.order
                )));
            }
        }
        if let Some(x) = &self.base_target {
            if x.len() != self.algebroid.m() {
                return Err(Error::Schema(format!("base target must have {} components", self.algebroid.m())));
            }
        }
        match &self.external {
            None => Ok(Vec::new()),
            Some(f) if f.len() != r => Err(Error::Schema(format!("external force needs {r} components"))),
            Some(f) => match YCurve::<f64>::from_exprs(f)? {
                YCurve::Exprs(c) => Ok(c),
                YCurve::Poly { .. } => unreachable!(),
            },
        }
    }

    fn coeff_rows<S: Clone>(&self, theta: &[S]) -> Vec<Vec<S>> {
        theta.chunks(self.degree + 1).map(|c| c.to_vec()).collect()
    }

    /// The admissible path of the ansatz with coefficients `theta`
    /// (row-major per component, monomials in `(t − t0)/(t1 − t0)`).
    pub fn path_generic<S: Scalar>(&self, theta: &[S], like: &S) -> Result<AdmissiblePath<S>> {
        let y = YCurve::Poly { t0: self.interval.0, h: self.h(), coeffs: self.coeff_rows(theta) };
        let x0 = self.x0.iter().map(|v| like.constant_like(*v)).collect();
        AdmissiblePath::new(&self.algebroid, y, x0, self.interval, self.options.steps, like.clone())
    }

    pub fn path(&self, theta: &[f64]) -> Result<AdmissiblePath> {
        self.path_generic(theta, &0.0)
    }

    fn endpoint(&self, e: Endpoint) -> f64 {
        match e {
            Endpoint::Start => self.interval.0,
            Endpoint::End => self.interval.1,
        }
    }

    fn residuals<S: Scalar>(&self, theta: &[S], like: &S, nodes: &[f64], external: &[Compiled]) -> Result<Residuals<S>> {
        let a = &self.algebroid;
        let path = self.path_generic(theta, like)?;
        let mut force = Vec::with_capacity(nodes.len() * a.r());
        for &t in nodes {
            let f = force_generic(a, &self.lagrangian, &path, t)?;
            let ext: Vec<f64> = external.iter().map(|e| e.eval_like(&t, &[t])).collect::<Result<_>>()?;
            for (i, fi) in f.into_iter().enumerate() {
                force.push(if ext.is_empty() { fi } else { fi - like.constant_like(ext[i]) });
            }
        }
        let w = self.options.penalty.sqrt();
        let mut boundary = Vec::new();
        for b in &self.boundary {
            let y = path.y.jets(self.endpoint(b.endpoint), b.order, like)?;
            boundary.push((y[b.component].coeff(b.order).clone() - like.constant_like(b.value)).scale(w));
        }
        if let Some(target) = &self.base_target {
            let x = path.base_at(a, self.interval.1)?;
            for (xi, ti) in x.into_iter().zip(target) {
                boundary.push((xi - like.constant_like(*ti)).scale(w));
            }
        }
        for &e in &self.free_momentum {
            for row in momentum_generic(a, &self.lagrangian, &path, self.endpoint(e))? {
                boundary.extend(row.into_iter().map(|v| v.scale(w)));
            }
        }
        Ok(Residuals { force, boundary })
    }

    /// Linear interpolation of the prescribed endpoint values `y^{i,(0)}`,
    /// zero higher coefficients.
    pub fn initial_guess(&self) -> Vec<f64> {
        let d = self.degree;
        let mut theta = vec![0.0; self.unknowns()];
        for i in 0..self.algebroid.r() {
            let find = |e: Endpoint| self.boundary.iter().find(|b| b.component == i && b.order == 0 && b.endpoint == e).map(|b| b.value);
            match (find(Endpoint::Start), find(Endpoint::End)) {
                (Some(a), Some(b)) => {
                    theta[i * (d + 1)] = a;
                    if d >= 1 {
                        theta[i * (d + 1) + 1] = b - a;
                    }
                }
                (Some(v), None) | (None, Some(v)) => theta[i * (d + 1)] = v,
                (None, None) => {}
            }
        }
        theta
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |s, x| s.max(x.abs()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    /// Row-major per component, monomials in `(t − t0)/(t1 − t0)`.
    pub coeffs: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub sup_force: f64,
    /// Largest unweighted boundary residual.
    pub boundary_residual: f64,
    /// Accepted least-squares cost after each step, starting with the initial guess.
    pub history: Vec<f64>,
    pub condition: f64,
    pub singular: bool,
}

struct Evaluated {
    r: Vec<f64>,
    n_force: usize,
}

impl Evaluated {
    fn cost(&self) -> f64 {
        self.r.iter().map(|v| v * v).sum()
    }
}

fn evaluate(p: &CollocationProblem, theta: &[f64], nodes: &[f64], ext: &[Compiled]) -> Result<Evaluated> {
    let res = p.residuals(theta, &0.0, nodes, ext)?;
    let n_force = res.force.len();
    let mut r = res.force;
    r.extend(res.boundary);
    if let Some(i) = r.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { component: i });
    }
    Ok(Evaluated { r, n_force })
}

fn jacobian(p: &CollocationProblem, theta: &[f64], nodes: &[f64], ext: &[Compiled]) -> Result<DMatrix<f64>> {
    let n = theta.len();
    let column = |j: usize| -> Result<Vec<f64>> {
        let seeded: Vec<Jet> = theta
            .iter()
            .enumerate()
            .map(|(q, &v)| if q == j { Jet::variable(1, v) } else { Jet::constant_of(1, v) })
            .collect();
        let res = p.residuals(&seeded, &Jet::constant_of(1, 0.0), nodes, ext)?;
        Ok(res.force.iter().chain(&res.boundary).map(|v| v.coeffs()[1]).collect())
    };
    let cols: Vec<Result<Vec<f64>>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..n).map(|j| s.spawn(move || column(j))).collect();
        handles.into_iter().map(|h| h.join().expect("jacobian worker panicked")).collect()
    });
    let cols = cols.into_iter().collect::<Result<Vec<_>>>()?;
    let rows = cols.first().map_or(0, |c| c.len());
    Ok(DMatrix::from_fn(rows, n, |i, j| cols[j][i]))
}

fn condition_number(j: &DMatrix<f64>) -> f64 {
    let sv = j.clone().svd(false, false).singular_values;
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Levenberg–Marquardt on `Σ |F(tₙ)|² + penalty·|boundary|²`.
pub fn solve(p: &CollocationProblem) -> Result<SolveReport> {
    solve_from(p, p.initial_guess())
}

pub fn solve_from(p: &CollocationProblem, mut theta: Vec<f64>) -> Result<SolveReport> {
    let ext = p.validate()?;
    if theta.len() != p.unknowns() {
        return Err(Error::Contract(format!("need {} coefficients", p.unknowns())));
    }
    let nodes = chebyshev_nodes(p.nodes, p.interval.0, p.interval.1);
    let o = &p.options;
    let w = o.penalty.sqrt();
    let mut cur = evaluate(p, &theta, &nodes, &ext)?;
    let mut history = vec![cur.cost()];
    let converged = |e: &Evaluated| sup(&e.r[..e.n_force]) <= o.force_tol && sup(&e.r[e.n_force..]) / w <= o.boundary_tol;
    let mut lambda = o.lambda0;
    let mut iterations = 0;
    let mut jac = jacobian(p, &theta, &nodes, &ext)?;
    // Once converged, take up to three more steps while each still halves the cost.
    let mut polished = false;
    let mut polish_steps = 0;
    while iterations < o.max_iter {
        let done = converged(&cur);
        if done && (polished || cur.cost() == 0.0) {
            break;
        }
        iterations += 1;
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * DVector::from_column_slice(&cur.r);
        let mut a = jtj;
        for q in 0..a.nrows() {
            a[(q, q)] += lambda;
        }
        let step = match a.clone().cholesky() {
            Some(ch) => ch.solve(&(-&g)),
            None => match a.lu().solve(&(-&g)) {
                Some(s) => s,
                None => {
                    lambda *= 4.0;
                    continue;
                }
            },
        };
        let trial: Vec<f64> = theta.iter().zip(step.iter()).map(|(t, s)| t + s).collect();
        match evaluate(p, &trial, &nodes, &ext) {
            Ok(next) if next.cost() < cur.cost() => {
                if done {
                    polish_steps += 1;
                }
                polished = done && (next.cost() > 0.5 * cur.cost() || polish_steps >= 3);
                theta = trial;
                cur = next;
                history.push(cur.cost());
                lambda *= 0.5;
                jac = jacobian(p, &theta, &nodes, &ext)?;
            }
            _ => {
                polished = done;
                lambda *= 4.0;
                if lambda > 1e20 {
                    break;
                }
            }
        }
    }
    let condition = condition_number(&jac);
    Ok(SolveReport {
        converged: converged(&cur),
        sup_force: sup(&cur.r[..cur.n_force]),
        boundary_residual: sup(&cur.r[cur.n_force..]) / w,
        coeffs: theta,
        iterations,
        history,
        singular: !condition.is_finite() || condition > 1e14,
        condition,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub nodes: usize,
    pub sup_force: f64,
    pub boundary_residual: f64,
    /// Largest endpoint momentum over the free endpoints.
    pub momentum_residual: f64,
    pub pass: bool,
}

/// Re-evaluates the residuals on a node set four times denser.
pub fn verify_solution(p: &CollocationProblem, coeffs: &[f64]) -> Result<VerifyReport> {
    let ext = p.validate()?;
    if coeffs.len() != p.unknowns() {
        return Err(Error::Contract(format!("need {} coefficients", p.unknowns())));
    }
    let n = 4 * p.nodes;
    let nodes = chebyshev_nodes(n, p.interval.0, p.interval.1);
    let res = p.residuals(coeffs, &0.0, &nodes, &ext)?;
    let w = p.options.penalty.sqrt();
    let sup_force = sup(&res.force);
    let boundary_residual = sup(&res.boundary) / w;
    let path = p.path(coeffs)?;
    let mut momentum_residual: f64 = 0.0;
    for &e in &p.free_momentum {
        let m = momentum_generic(&p.algebroid, &p.lagrangian, &path, p.endpoint(e))?;
        momentum_residual = momentum_residual.max(m.iter().map(|r| sup(r)).fold(0.0, f64::max));
    }
    let o = &p.options;
    Ok(VerifyReport {
        nodes: n,
        sup_force,
        boundary_residual,
        momentum_residual,
        pass: sup_force <= o.force_tol && boundary_residual <= o.boundary_tol && momentum_residual <= o.boundary_tol,
    })
}
