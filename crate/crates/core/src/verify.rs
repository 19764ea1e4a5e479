//! Seeded random instances and the identity suites behind `hoalg verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebroid::{cotangent_pairing, tangent_pairing, AlgebroidStructure, TEVector, TStarEVector};
use crate::error::{Error, Result};
use crate::jet::{binom, Jet};
use crate::mechanics::{
    coordinate_names, force, momentum, oracle_el, variational_identity, AdmissiblePath, Lagrangian, OracleFamily,
    VariationGenerator,
};
use crate::prolong::{
    binom_identity_check, eps_k, eps_k_with_extension, green_identity_check, p_k_project, pairing_iterated,
    pairing_tk, EkCovector, EkPoint, SemiHolonomicBlock,
};
use crate::solver::{solve, BoundaryValue, CollocationProblem, Endpoint};

pub type Rand = ChaCha8Rng;

pub fn rng(seed: u64) -> Rand {
    ChaCha8Rng::seed_from_u64(seed)
}

fn uniform(rng: &mut Rand) -> f64 {
    rng.gen_range(-1.0..1.0)
}

fn uniform_vec(rng: &mut Rand, n: usize) -> Vec<f64> {
    (0..n).map(|_| uniform(rng)).collect()
}

fn uniform_mat(rng: &mut Rand, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows).map(|_| uniform_vec(rng, cols)).collect()
}

/// Random polynomial in `vars` with `terms` monomials of degree ≤ `max_deg`.
pub fn random_poly(rng: &mut Rand, vars: &[String], max_deg: usize, terms: usize) -> String {
    let mut out = Vec::with_capacity(terms);
    for _ in 0..terms {
        let mut s = format!("({:?})", uniform(rng));
        if !vars.is_empty() {
            for _ in 0..rng.gen_range(0..=max_deg) {
                s.push('*');
                s.push_str(&vars[rng.gen_range(0..vars.len())]);
            }
        }
        out.push(s);
    }
    if out.is_empty() {
        "0".into()
    } else {
        out.join(" + ")
    }
}

/// A random almost Lie algebroid of rank 3 over R² with polynomial structure
/// functions. With `mix`, a random constant change of basis is applied.
pub fn random_algebroid(rng: &mut Rand, mix: bool) -> Result<AlgebroidStructure> {
    let xs = vec!["x1".to_string(), "x2".to_string()];
    let g12 = random_poly(rng, &xs, 2, 3);
    let g13 = random_poly(rng, &xs, 1, 2);
    let g23 = random_poly(rng, &xs, 1, 2);
    let z = || "0".to_string();
    let rho = [vec!["1".to_string(), z(), z()], vec![z(), "x1".to_string(), "1".to_string()]];
    let mut c = vec![vec![vec![z(); 3]; 3]; 3];
    let upper = [
        (0, 1, [z(), format!("({g12})"), format!("1 - x1*({g12})")]),
        (0, 2, [z(), format!("({g13})"), format!("-x1*({g13})")]),
        (1, 2, [z(), format!("({g23})"), format!("-x1*({g23})")]),
    ];
    for (i, j, comps) in upper {
        for (k, e) in comps.into_iter().enumerate() {
            c[k][j][i] = format!("-({e})");
            c[k][i][j] = e;
        }
    }
    if mix {
        let (s, sinv) = loop {
            let s = nalgebra::Matrix3::from_fn(|i, j| if i == j { 1.0 } else { 0.0 } + 0.5 * uniform(rng));
            if let Some(inv) = s.try_inverse() {
                if s.determinant().abs() > 0.2 {
                    break (s, inv);
                }
            }
        };
        let lin = |terms: Vec<(f64, &String)>| -> String {
            let v: Vec<String> = terms.into_iter().filter(|(w, e)| *w != 0.0 && e.as_str() != "0").map(|(w, e)| format!("({w:?})*({e})")).collect();
            if v.is_empty() {
                "0".into()
            } else {
                v.join(" + ")
            }
        };
        let rho2: Vec<Vec<String>> = (0..2).map(|a| (0..3).map(|i| lin((0..3).map(|l| (s[(l, i)], &rho[a][l])).collect())).collect()).collect();
        let mut c2 = vec![vec![vec![z(); 3]; 3]; 3];
        for (q, cq) in c2.iter_mut().enumerate() {
            for (i, ci) in cq.iter_mut().enumerate() {
                for (j, cij) in ci.iter_mut().enumerate() {
                    let mut terms = Vec::new();
                    for p in 0..3 {
                        for l in 0..3 {
                            for n in 0..3 {
                                terms.push((sinv[(q, p)] * s[(l, i)] * s[(n, j)], &c[p][l][n]));
                            }
                        }
                    }
                    *cij = lin(terms);
                }
            }
        }
        let rs: Vec<Vec<&str>> = rho2.iter().map(|r| r.iter().map(|s| s.as_str()).collect()).collect();
        let cs: Vec<Vec<Vec<&str>>> = c2.iter().map(|a| a.iter().map(|r| r.iter().map(|s| s.as_str()).collect()).collect()).collect();
        return AlgebroidStructure::from_strings(2, 3, &rs, &cs, "random-mixed");
    }
    let rs: Vec<Vec<&str>> = rho.iter().map(|r| r.iter().map(|s| s.as_str()).collect()).collect();
    let cs: Vec<Vec<Vec<&str>>> = c.iter().map(|a| a.iter().map(|r| r.iter().map(|s| s.as_str()).collect()).collect()).collect();
    AlgebroidStructure::from_strings(2, 3, &rs, &cs, "random")
}

/// Random polynomial Lagrangian plus a quadratic term in the top coordinates.
pub fn random_lagrangian(rng: &mut Rand, m: usize, r: usize, k: usize) -> Result<Lagrangian> {
    let names = coordinate_names(m, r, k);
    let mut src = random_poly(rng, &names, 3, 6);
    for i in 1..=r {
        src.push_str(&format!(" + ({:?})*y{i}_{}^2", 0.5 + 0.5 * uniform(rng).abs(), k - 1));
    }
    Lagrangian::parse(&src, m, r, k)
}

/// Random cubic generator curve.
pub fn random_curve(rng: &mut Rand, r: usize) -> Vec<String> {
    (0..r)
        .map(|_| {
            let c = uniform_vec(rng, 4);
            format!("({:?}) + ({:?})*t + ({:?})*t^2 + ({:?})*t^3", c[0], c[1], c[2], c[3])
        })
        .collect()
}

pub fn random_path(rng: &mut Rand, a: &AlgebroidStructure) -> Result<AdmissiblePath> {
    let y = random_curve(rng, a.r());
    let x0: Vec<f64> = uniform_vec(rng, a.m()).into_iter().map(|v| 0.5 * v).collect();
    let ys: Vec<&str> = y.iter().map(|s| s.as_str()).collect();
    AdmissiblePath::from_strs(a, &ys, &x0, (0.0, 1.0), 100)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub instances: usize,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl std::fmt::Display for SuiteResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {:<14} instances={:<5} max_residual={:.3e} tol={:.0e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.instances,
            self.max_residual,
            self.tol
        )
    }
}

struct Acc {
    name: &'static str,
    instances: usize,
    max: f64,
    tol: f64,
}

impl Acc {
    fn new(name: &'static str, tol: f64) -> Self {
        Self { name, instances: 0, max: 0.0, tol }
    }

    fn add(&mut self, residual: f64) {
        self.instances += 1;
        // NaN must fail
        self.max = if residual.is_nan() { f64::INFINITY } else { self.max.max(residual) };
    }

    fn finish(self) -> SuiteResult {
        SuiteResult { name: self.name, instances: self.instances, max_residual: self.max, tol: self.tol, pass: self.max <= self.tol }
    }
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
}

pub const SUITES: [&str; 12] = [
    "binomial",
    "green",
    "projection",
    "eps-lie",
    "extension",
    "oracles",
    "momentum",
    "pointwise",
    "solver",
    "degenerate-k1",
    "duality",
    "axioms",
];

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteResult> {
    let mut rng = rng(seed);
    match name {
        "binomial" => Ok(suite_binomial()),
        "green" => suite_green(&mut rng),
        "projection" => suite_projection(&mut rng),
        "eps-lie" => suite_eps_lie(&mut rng),
        "extension" => suite_extension(&mut rng),
        "oracles" => suite_oracles(&mut rng),
        "momentum" => suite_momentum(&mut rng),
        "pointwise" => suite_pointwise(&mut rng),
        "solver" => suite_solver(),
        "degenerate-k1" => suite_degenerate(&mut rng),
        "duality" => suite_duality(&mut rng),
        "axioms" => suite_axioms(&mut rng),
        _ => Err(Error::Schema(format!("unknown suite `{name}`; known: {}", SUITES.join(", ")))),
    }
}

pub fn run_all(seed: u64) -> Result<Vec<SuiteResult>> {
    SUITES.iter().map(|s| run_suite(s, seed)).collect()
}

fn suite_binomial() -> SuiteResult {
    let mut acc = Acc::new("binomial", 0.0);
    for k in 0..=12 {
        let rep = binom_identity_check(k);
        acc.instances += rep.checked;
        if !rep.pass {
            acc.max = acc.max.max(rep.failures.len() as f64);
        }
    }
    acc.finish()
}

pub fn random_block(rng: &mut Rand, k: usize, m: usize, r: usize) -> Result<SemiHolonomicBlock> {
    let basejet = uniform_mat(rng, m, 2 * k + 1);
    let xi = (0..r).map(|_| uniform_mat(rng, k + 1, k + 1)).collect();
    SemiHolonomicBlock::new(k, basejet, xi)
}

fn suite_green(rng: &mut Rand) -> Result<SuiteResult> {
    let mut acc = Acc::new("green", 1e-9);
    for k in 1..=4 {
        for r in 1..=3 {
            for _ in 0..200 {
                let m = rng.gen_range(1..=2);
                let phi = random_block(rng, k, m, r)?;
                let base: Vec<Vec<f64>> = phi.basejet.iter().map(|b| b[..=k].to_vec()).collect();
                let eta = uniform_mat(rng, r, k + 1);
                acc.add(green_identity_check(&phi, &base, &eta)?);
            }
        }
    }
    Ok(acc.finish())
}

fn suite_projection(rng: &mut Rand) -> Result<SuiteResult> {
    let mut acc = Acc::new("projection", 1e-12);
    for k in 1..=4 {
        for _ in 0..200 {
            let (m, r) = (rng.gen_range(1..=2), rng.gen_range(1..=3));
            let n = 1usize << k;
            let xjet = uniform_mat(rng, m, k + 1);
            let base: Vec<Vec<f64>> = xjet.iter().map(|row| (0..n).map(|e| row[e.count_ones() as usize]).collect()).collect();
            let fiber = uniform_mat(rng, r, n);
            let phi = uniform_mat(rng, r, k + 1);
            let phi_it: Vec<Vec<f64>> = phi.iter().map(|row| (0..n).map(|e| row[e.count_ones() as usize]).collect()).collect();
            let (_, pf) = p_k_project(&base, &fiber, k)?;
            let lhs = pairing_tk(&pf, &phi, k)?;
            let rhs = pairing_iterated(&fiber, &phi_it, k)?;
            acc.add((lhs - rhs).abs());
        }
    }
    Ok(acc.finish())
}

/// Closed form of ε_k on a Lie algebra: ζ^{(β)} = C(k,β)⁻¹[ξ_{k−1−β} +
/// Σ_{s<β} C(k−β+s, s) ad*_{a^s} ξ_{k−β+s}], with `a[i][s]`, `xi[i][s]`.
pub fn eps_lie_closed(c: &[Vec<Vec<f64>>], a: &[Vec<f64>], xi: &[Vec<f64>], k: usize) -> Vec<Vec<f64>> {
    let r = a.len();
    let ad = |s: usize, idx: usize| -> Vec<f64> {
        (0..r)
            .map(|j| {
                let mut acc = 0.0;
                for (q, cq) in c.iter().enumerate() {
                    for i in 0..r {
                        acc += cq[i][j] * a[i][s] * xi[q][idx];
                    }
                }
                acc
            })
            .collect()
    };
    let mut z = vec![vec![0.0; k + 1]; r];
    for beta in 0..=k {
        let mut v = vec![0.0; r];
        if beta < k {
            for (i, vi) in v.iter_mut().enumerate() {
                *vi = xi[i][k - 1 - beta];
            }
        }
        for s in 0..beta {
            let w = binom((k - beta + s) as i64, s as i64);
            for (vi, di) in v.iter_mut().zip(ad(s, k - beta + s)) {
                *vi += w * di;
            }
        }
        let norm = binom(k as i64, beta as i64);
        for i in 0..r {
            z[i][beta] = v[i] / norm;
        }
    }
    z
}

fn suite_eps_lie(rng: &mut Rand) -> Result<SuiteResult> {
    let mut acc = Acc::new("eps-lie", 1e-10);
    for name in ["so3-like", "heis3-like"] {
        let g = AlgebroidStructure::lie_preset(name)?;
        let c = crate::algebroid::lie_constants(name)?;
        for k in 1..=4 {
            for _ in 0..100 {
                let a = uniform_mat(rng, 3, k);
                let xi = uniform_mat(rng, 3, k);
                let psi = EkCovector { base: EkPoint::new(k, vec![], a.clone())?, dx: vec![], dy: xi.clone() };
                let z = eps_k(&g, &psi, &0.0)?;
                let want = eps_lie_closed(&c, &a, &xi, k);
                acc.add(z.xi.iter().zip(&want).map(|(u, v)| max_diff(u, v)).fold(0.0, f64::max));
            }
        }
    }
    Ok(acc.finish())
}

fn suite_extension(rng: &mut Rand) -> Result<SuiteResult> {
    let mut acc = Acc::new("extension", 1e-9);
    for k in 1..=3 {
        for _ in 0..5 {
            let a = random_algebroid(rng, false)?;
            let base = EkPoint::new(k, uniform_vec(rng, 2), uniform_mat(rng, 3, k))?;
            let psi = EkCovector { base, dx: uniform_vec(rng, 2), dy: uniform_mat(rng, 3, k) };
            let canon = eps_k(&a, &psi, &0.0)?;
            for _ in 0..20 {
                let upper = uniform_mat(rng, 2, k - 1);
                let z = eps_k_with_extension(&a, &psi, &upper)?;
                let d = z
                    .xi
                    .iter()
                    .zip(&canon.xi)
                    .chain(z.xjet.iter().zip(&canon.xjet))
                    .map(|(u, v)| max_diff(u, v))
                    .fold(0.0, f64::max);
                acc.add(d);
            }
        }
    }
    Ok(acc.finish())
}

const SAMPLE_TIMES: usize = 11;

fn times() -> impl Iterator<Item = f64> {
    (0..SAMPLE_TIMES).map(|i| i as f64 / (SAMPLE_TIMES - 1) as f64)
}

fn suite_oracles(rng: &mut Rand) -> Result<SuiteResult> {
    let mut acc = Acc::new("oracles", 1e-7);
    let mut cases: Vec<(AlgebroidStructure, usize, OracleFamily)> = Vec::new();
    for k in 1..=3 {
        cases.push((AlgebroidStructure::tangent(2), k, OracleFamily::Tangent));
        for name in ["so3-like", "heis3-like"] {
            cases.push((AlgebroidStructure::lie_preset(name)?, k, OracleFamily::EulerPoincare));
        }
    }
    for _ in 0..2 {
        cases.push((random_algebroid(rng, false)?, 1, OracleFamily::AlgebroidK1));
        cases.push((random_algebroid(rng, false)?, 2, OracleFamily::AlgebroidK2));
    }
    let hamel = AlgebroidStructure::product(&[AlgebroidStructure::tangent(1), AlgebroidStructure::lie_preset("so3-like")?])?;
    cases.push((hamel, 2, OracleFamily::HamelK2));
    for (a, k, fam) in &cases {
        for _ in 0..3 {
            let l = random_lagrangian(rng, a.m(), a.r(), *k)?;
            let p = random_path(rng, a)?;
            let mut worst: f64 = 0.0;
            for t in times() {
                let f = force(a, &l, &p, t)?.f;
                let o = oracle_el(a, &l, &p, t, *fam)?;
                worst = worst.max(max_diff(&f, &o));
            }
            acc.add(worst);
        }
    }
    Ok(acc.finish())
}

/// `m^{(γ)} = Σ_{α+β=γ} (−1)^α dᵅ ∂L/∂x^{(k−β)}` on a tangent bundle.
pub fn tangent_momentum_oracle(a: &AlgebroidStructure, l: &Lagrangian, p: &AdmissiblePath, t: f64) -> Result<Vec<Vec<f64>>> {
    let k = l.order();
    let (xj, yj) = p.ak_tjets(a, t, k, k)?;
    let (dx, dy) = l.differential(&xj, &yj)?;
    let dl = |i: usize, j: usize| -> &Jet { if j == 0 { &dx[i] } else { &dy[i][j - 1] } };
    Ok((0..a.r())
        .map(|i| {
            (0..k)
                .map(|g| {
                    (0..=g)
                        .map(|al| {
                            let s = if al.is_multiple_of(2) { 1.0 } else { -1.0 };
                            s * dl(i, k - (g - al)).coeffs()[al]
                        })
                        .sum()
                })
                .collect()
        })
        .collect())
}

fn suite_momentum(rng: &mut Rand) -> Result<SuiteResult> {
    let mut acc = Acc::new("momentum", 1e-7);
    let a = AlgebroidStructure::tangent(2);
    for k in 2..=3 {
        for _ in 0..10 {
            let l = random_lagrangian(rng, 2, 2, k)?;
            let p = random_path(rng, &a)?;
            let mut worst: f64 = 0.0;
            for t in times() {
                let m = momentum(&a, &l, &p, t)?.m;
                let o = tangent_momentum_oracle(&a, &l, &p, t)?;
                worst = worst.max(m.iter().zip(&o).map(|(u, v)| max_diff(u, v)).fold(0.0, f64::max));
            }
            acc.add(worst);
        }
    }
    Ok(acc.finish())
}

fn suite_pointwise(rng: &mut Rand) -> Result<SuiteResult> {
    let mut acc = Acc::new("pointwise", 1e-7);
    let mut run = |rng: &mut Rand, a: &AlgebroidStructure, k: usize| -> Result<()> {
        let l = random_lagrangian(rng, a.m(), a.r(), k)?;
        let p = random_path(rng, a)?;
        let b = random_curve(rng, a.r());
        let b = VariationGenerator::from_strs(&b.iter().map(|s| s.as_str()).collect::<Vec<_>>())?;
        let t = rng.gen_range(0.05..0.95);
        acc.add(variational_identity(a, &l, &p, &b, t)?.residual());
        Ok(())
    };
    for k in 1..=2 {
        for _ in 0..50 {
            let a = random_algebroid(rng, false)?;
            run(rng, &a, k)?;
        }
    }
    let lie = [AlgebroidStructure::lie_preset("so3-like")?, AlgebroidStructure::lie_preset("heis3-like")?];
    for k in 1..=3 {
        for q in 0..50 {
            run(rng, &lie[q % 2], k)?;
        }
    }
    Ok(acc.finish())
}

/// The k=2 tangent benchmark `L = ½ẍ²` with `x(0)=0, ẋ(0)=0, x(1)=1, ẋ(1)=0`.
pub fn cubic_benchmark(nodes: usize) -> Result<CollocationProblem> {
    let a = AlgebroidStructure::tangent(1);
    let l = Lagrangian::parse("y1_1^2/2", 1, 1, 2)?;
    let mut p = CollocationProblem::new(a, l, (0.0, 1.0), vec![0.0], 3);
    p.nodes = nodes;
    for e in [Endpoint::Start, Endpoint::End] {
        p.boundary.push(BoundaryValue { endpoint: e, component: 0, order: 0, value: 0.0 });
    }
    p.base_target = Some(vec![1.0]);
    Ok(p)
}

fn suite_solver() -> Result<SuiteResult> {
    let mut acc = Acc::new("solver", 1e-8);
    let p = cubic_benchmark(8)?;
    let rep = solve(&p)?;
    // y = ẋ = 6t − 6t²
    let err = max_diff(&rep.coeffs, &[0.0, 6.0, -6.0, 0.0]);
    acc.add(if rep.converged && rep.sup_force <= 1e-6 { err } else { f64::INFINITY });
    Ok(acc.finish())
}

fn suite_degenerate(rng: &mut Rand) -> Result<SuiteResult> {
    let mut acc = Acc::new("degenerate-k1", 1e-12);
    for q in 0..100 {
        let a = random_algebroid(rng, q % 2 == 1)?;
        let (x, y, pv, piv) = (uniform_vec(rng, 2), uniform_vec(rng, 3), uniform_vec(rng, 2), uniform_vec(rng, 3));
        let psi = EkCovector { base: EkPoint::new(1, x.clone(), y.iter().map(|v| vec![*v]).collect())?, dx: pv.clone(), dy: piv.iter().map(|v| vec![*v]).collect() };
        let z = eps_k(&a, &psi, &0.0)?;
        let e = a.epsilon_apply(&TStarEVector { x, y, p: pv, piv })?;
        let mut d: f64 = 0.0;
        for i in 0..3 {
            d = d.max((z.xi[i][0] - e.xi[i]).abs()).max((z.xi[i][1] - e.xidot[i]).abs());
        }
        let l = random_lagrangian(rng, 2, 3, 1)?;
        let p = random_path(rng, &a)?;
        let t = rng.gen_range(0.0..1.0);
        let f = force(&a, &l, &p, t)?.f;
        let direct = direct_force_k1(&a, &l, &p, t)?;
        d = d.max(max_diff(&f, &direct));
        let m = momentum(&a, &l, &p, t)?.m;
        let pt = p.ak_point(&a, t, 1)?;
        let (_, dy) = l.differential(&pt.x, &pt.y)?;
        for i in 0..3 {
            d = d.max((m[i][0] - dy[i][0]).abs());
        }
        acc.add(d);
    }
    Ok(acc.finish())
}

/// `ρᵀ ∂L/∂x − d/dt ∂L/∂y + ad*_y ∂L/∂y` evaluated directly.
fn direct_force_k1(a: &AlgebroidStructure, l: &Lagrangian, p: &AdmissiblePath, t: f64) -> Result<Vec<f64>> {
    let (xj, yj) = p.ak_tjets(a, t, 1, 1)?;
    let (dx, dy) = l.differential(&xj, &yj)?;
    let x: Vec<f64> = xj.iter().map(|j| j.coeffs()[0]).collect();
    let y: Vec<f64> = yj.iter().map(|r| r[0].coeffs()[0]).collect();
    let at = a.at(&x, &0.0)?;
    let pi: Vec<f64> = dy.iter().map(|r| r[0].coeffs()[0]).collect();
    let rt = at.anchor_transpose(&dx.iter().map(|j| j.coeffs()[0]).collect::<Vec<_>>());
    let co = at.coadjoint(&y, &pi);
    Ok((0..a.r()).map(|i| rt[i] - dy[i][0].coeffs()[1] + co[i]).collect())
}

fn suite_duality(rng: &mut Rand) -> Result<SuiteResult> {
    let mut acc = Acc::new("duality", 1e-12);
    for q in 0..100 {
        let a = random_algebroid(rng, q % 2 == 1)?;
        let x = uniform_vec(rng, 2);
        let (u, w, ydot) = (uniform_vec(rng, 3), uniform_vec(rng, 3), uniform_vec(rng, 3));
        let at = a.at(&x, &0.0)?;
        let xv = TEVector { x: x.clone(), y: u, xdot: at.anchor(&w), ydot };
        let kx = a.kappa_apply(&xv, &w)?;
        let cov = TStarEVector { x, y: w, p: uniform_vec(rng, 2), piv: uniform_vec(rng, 3) };
        let lhs = tangent_pairing(&a.epsilon_apply(&cov)?, &xv)?;
        let rhs = cotangent_pairing(&cov, &kx)?;
        acc.add((lhs - rhs).abs());
    }
    Ok(acc.finish())
}

fn suite_axioms(rng: &mut Rand) -> Result<SuiteResult> {
    let mut acc = Acc::new("axioms", 1e-9);
    let mut structures = vec![
        AlgebroidStructure::tangent(3),
        AlgebroidStructure::lie_preset("so3-like")?,
        AlgebroidStructure::lie_preset("heis3-like")?,
    ];
    for q in 0..10 {
        structures.push(random_algebroid(rng, q % 2 == 1)?);
    }
    for a in &structures {
        let rep = a.check_axioms_default(16, -1.0, 1.0, 1e-9)?;
        acc.add(rep.max_skew.max(rep.max_compat) / rep.scale.max(1.0));
    }
    Ok(acc.finish())
}
