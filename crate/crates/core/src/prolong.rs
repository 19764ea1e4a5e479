//! The prolongations Eᵏ, the dual map ε_k, pairings, and the
//! integration-by-parts maps on semi-holonomic blocks.
//!
//! All jet data here uses the derivative convention (no factorials).

use crate::algebroid::{epsilon_at, AlgebroidStructure};
use crate::error::{Error, Result};
use crate::jet::{binom, binomial, Jet, Scalar};

/// A point of Eᵏ in graded coordinates: `y[i][α] = y^{i,(α)}`, α < k.
#[derive(Clone, Debug, PartialEq)]
pub struct EkPoint<S = f64> {
    pub k: usize,
    pub x: Vec<S>,
    pub y: Vec<Vec<S>>,
}

/// A covector on Eᵏ at `base`.
#[derive(Clone, Debug, PartialEq)]
pub struct EkCovector<S = f64> {
    pub base: EkPoint<S>,
    pub dx: Vec<S>,
    pub dy: Vec<Vec<S>>,
}

/// A point of TᵏE*: base jet `xjet[a][0..=k]` and fiber `xi[i][0..=k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TkCovector<S = f64> {
    pub k: usize,
    pub xjet: Vec<Vec<S>>,
    pub xi: Vec<Vec<S>>,
}

/// An order-K jet of a curve in TE*: `(x, ξ, ẋ, ξ̇)` with K+1 coefficients each.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedCovectorJet<S = f64> {
    pub order: usize,
    pub x: Vec<Vec<S>>,
    pub xi: Vec<Vec<S>>,
    pub xdot: Vec<Vec<S>>,
    pub xidot: Vec<Vec<S>>,
}

/// Semi-holonomic element of TᵏTᵏE*: `xi[i][α][β] = ξᵢ^{(α,β)}` over a
/// single base jet of order 2k.
#[derive(Clone, Debug, PartialEq)]
pub struct SemiHolonomicBlock {
    pub k: usize,
    pub basejet: Vec<Vec<f64>>,
    pub xi: Vec<Vec<Vec<f64>>>,
}

impl<S: Scalar> EkPoint<S> {
    pub fn new(k: usize, x: Vec<S>, y: Vec<Vec<S>>) -> Result<Self> {
        if k == 0 {
            return Err(Error::Contract("prolongation order must be at least 1".into()));
        }
        if y.iter().any(|row| row.len() != k) {
            return Err(Error::Contract(format!("each fiber row needs {k} graded components")));
        }
        Ok(Self { k, x, y })
    }
}

fn check_dims(a: &AlgebroidStructure, x: usize, y: usize) -> Result<()> {
    if x != a.m() || y != a.r() {
        return Err(Error::Contract(format!(
            "point has dimensions ({x}, {y}), structure has ({}, {})",
            a.m(),
            a.r()
        )));
    }
    Ok(())
}

/// The base jet `ρ_k(e) ∈ TᵏM`: `x^{(α+1)}` is the α-th derivative of
/// `ρ(x(t))·y(t)`. Returns `m` rows of `k+1` coefficients.
pub fn embed_ek<S: Scalar>(a: &AlgebroidStructure, x: &[S], y: &[Vec<S>], k: usize, like: &S) -> Result<Vec<Vec<S>>> {
    check_dims(a, x.len(), y.len())?;
    if y.iter().any(|row| row.len() < k) {
        return Err(Error::Contract(format!("embedding to order {k} needs {k} graded fiber components")));
    }
    let m = a.m();
    let mut out: Vec<Vec<S>> = x.iter().map(|xa| vec![xa.clone()]).collect();
    if m == 0 {
        return Ok(out);
    }
    for alpha in 0..k {
        let xj: Vec<Jet<S>> = out.iter().map(|row| Jet::from_vec(row.clone())).collect();
        let yj: Vec<Jet<S>> = y.iter().map(|row| Jet::from_vec(row[..=alpha].to_vec())).collect();
        let jl = Jet::constant_of(alpha, like.clone());
        let at = a.at(&xj, &jl)?;
        let v = at.anchor(&yj);
        for (row, va) in out.iter_mut().zip(v) {
            row.push(va.coeff(alpha).clone());
        }
    }
    Ok(out)
}

/// Dual of the canonical flip on TᴷM: `p^{(α)} = C(K,α)⁻¹·p_{(K−α)}`.
pub fn eps_km_rescale<S: Scalar>(p: &[S], big_k: usize) -> Result<Vec<S>> {
    if p.len() != big_k + 1 {
        return Err(Error::Contract(format!("expected {} components, got {}", big_k + 1, p.len())));
    }
    Ok((0..=big_k).map(|alpha| p[big_k - alpha].scale(1.0 / binom(big_k as i64, alpha as i64))).collect())
}

/// Steps (1)-(3) of ε_k for an explicit extension `(P, Π)` of a covector on
/// Eᵏ to T^{k−1}E: `big_p[a][β]`, `big_pi[i][β]`, β < k. Returns the
/// order-(k−1) jet of TE* produced by T^{k−1}ε.
pub fn eps_k_mixed<S: Scalar>(
    a: &AlgebroidStructure,
    base: &EkPoint<S>,
    big_p: &[Vec<S>],
    big_pi: &[Vec<S>],
    like: &S,
) -> Result<MixedCovectorJet<S>> {
    let k = base.k;
    let big_k = k - 1;
    check_dims(a, base.x.len(), base.y.len())?;
    let xs = embed_ek(a, &base.x, &base.y, big_k, like)?;
    let jl = Jet::constant_of(big_k, like.clone());
    let xj: Vec<Jet<S>> = xs.into_iter().map(Jet::from_vec).collect();
    let yj: Vec<Jet<S>> = base.y.iter().map(|row| Jet::from_vec(row.clone())).collect();
    let pj = big_p
        .iter()
        .map(|row| eps_km_rescale(row, big_k).map(Jet::from_vec))
        .collect::<Result<Vec<_>>>()?;
    let pij = big_pi
        .iter()
        .map(|row| eps_km_rescale(row, big_k).map(Jet::from_vec))
        .collect::<Result<Vec<_>>>()?;
    let at = a.at(&xj, &jl)?;
    let (xdot, xidot) = epsilon_at(&at, &yj, &pj, &pij);
    let coeffs = |v: Vec<Jet<S>>| v.into_iter().map(|j| j.into_coeffs()).collect::<Vec<_>>();
    Ok(MixedCovectorJet {
        order: big_k,
        x: coeffs(xj),
        xi: coeffs(pij),
        xdot: coeffs(xdot),
        xidot: coeffs(xidot),
    })
}

/// Step (4): the dual of the inclusion TᵏE → T^{k−1}TE,
/// `ζ^{(β)} = C(k,β)⁻¹[C(k−1,β)ξ^{(β)} + C(k−1,β−1)ξ̇^{(β−1)}]`.
pub fn iota_star<S: Scalar>(mixed: &MixedCovectorJet<S>, tol: f64) -> Result<TkCovector<S>> {
    let big_k = mixed.order;
    let k = big_k + 1;
    for (a, (xr, dr)) in mixed.x.iter().zip(&mixed.xdot).enumerate() {
        for beta in 0..big_k {
            let (u, v) = (dr[beta].value(), xr[beta + 1].value());
            if (u - v).abs() > tol * (1.0 + u.abs().max(v.abs())) {
                return Err(Error::Consistency(format!(
                    "base jet is not semi-holonomic at x{}: order {} velocity {u} vs {v}",
                    a + 1,
                    beta + 1
                )));
            }
        }
    }
    let xjet = mixed
        .x
        .iter()
        .zip(&mixed.xdot)
        .map(|(xr, dr)| {
            let mut row = xr.clone();
            row.push(dr[big_k].clone());
            row
        })
        .collect();
    let (ki, kk) = (k as i64, big_k as i64);
    let xi = mixed
        .xi
        .iter()
        .zip(&mixed.xidot)
        .map(|(xr, dr)| {
            (0..=k)
                .map(|beta| {
                    let b = beta as i64;
                    let w = 1.0 / binom(ki, b);
                    let mut acc = xr[0].zero_like();
                    if beta <= big_k {
                        acc = acc + xr[beta].scale(binom(kk, b) * w);
                    }
                    if beta >= 1 {
                        acc = acc + dr[beta - 1].scale(binom(kk, b - 1) * w);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Ok(TkCovector { k, xjet, xi })
}

/// The canonical extension: `P_{(0)} = dx`, `P_{(β≥1)} = 0`, `Π = dy`.
fn canonical_extension<S: Scalar>(psi: &EkCovector<S>, like: &S) -> (Vec<Vec<S>>, Vec<Vec<S>>) {
    let k = psi.base.k;
    let big_p = psi
        .dx
        .iter()
        .map(|d| {
            let mut row = vec![like.zero_like(); k];
            row[0] = d.clone();
            row
        })
        .collect();
    (big_p, psi.dy.clone())
}

/// ε_k: T*Eᵏ → TᵏE* through the canonical extension.
pub fn eps_k<S: Scalar>(a: &AlgebroidStructure, psi: &EkCovector<S>, like: &S) -> Result<TkCovector<S>> {
    check_covector(a, psi)?;
    let (big_p, big_pi) = canonical_extension(psi, like);
    let mixed = eps_k_mixed(a, &psi.base, &big_p, &big_pi, like)?;
    iota_star(&mixed, 1e-9)
}

fn check_covector<S: Scalar>(a: &AlgebroidStructure, psi: &EkCovector<S>) -> Result<()> {
    let k = psi.base.k;
    if k == 0 {
        return Err(Error::Contract("prolongation order must be at least 1".into()));
    }
    check_dims(a, psi.base.x.len(), psi.base.y.len())?;
    if psi.dx.len() != a.m() || psi.dy.len() != a.r() || psi.dy.iter().chain(&psi.base.y).any(|r| r.len() != k) {
        return Err(Error::Contract("covector components do not match the base point".into()));
    }
    Ok(())
}

/// Jacobian of the embedding coordinates `x^{(β)}`, β = 1..k−1, with
/// respect to `x` and the graded fiber coordinates. Returns
/// `(d[b][β−1][a], e[b][β−1][i][α])`.
#[allow(clippy::type_complexity)]
pub fn embed_jacobian(a: &AlgebroidStructure, base: &EkPoint) -> Result<(Vec<Vec<Vec<f64>>>, Vec<Vec<Vec<Vec<f64>>>>)> {
    let (m, r, k) = (a.m(), a.r(), base.k);
    let big_k = k - 1;
    let seed = |x: &[f64], y: &[Vec<f64>], which: Option<(bool, usize, usize)>| -> Result<Vec<Vec<Jet>>> {
        let xs: Vec<Jet> = x
            .iter()
            .enumerate()
            .map(|(i, &v)| Jet::from_vec(vec![v, if which == Some((true, i, 0)) { 1.0 } else { 0.0 }]))
            .collect();
        let ys: Vec<Vec<Jet>> = y
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(al, &v)| Jet::from_vec(vec![v, if which == Some((false, i, al)) { 1.0 } else { 0.0 }]))
                    .collect()
            })
            .collect();
        embed_ek(a, &xs, &ys, big_k, &Jet::constant_of(1, 0.0))
    };
    let mut dx = vec![vec![vec![0.0; m]; big_k]; m];
    let mut dy = vec![vec![vec![vec![0.0; k]; r]; big_k]; m];
    for c in 0..m {
        let out = seed(&base.x, &base.y, Some((true, c, 0)))?;
        for b in 0..m {
            for beta in 1..=big_k {
                dx[b][beta - 1][c] = out[b][beta].coeffs()[1];
            }
        }
    }
    for i in 0..r {
        for al in 0..k {
            let out = seed(&base.x, &base.y, Some((false, i, al)))?;
            for b in 0..m {
                for beta in 1..=big_k {
                    dy[b][beta - 1][i][al] = out[b][beta].coeffs()[1];
                }
            }
        }
    }
    Ok((dx, dy))
}

/// ε_k through a non-canonical extension: `upper[a][β−1]` are arbitrary
/// components along `x^{(β)}`, β ≥ 1; the remaining components are solved
/// from the pullback constraint via the embedding Jacobian.
pub fn eps_k_with_extension(a: &AlgebroidStructure, psi: &EkCovector, upper: &[Vec<f64>]) -> Result<TkCovector> {
    check_covector(a, psi)?;
    let (m, r, k) = (a.m(), a.r(), psi.base.k);
    if upper.len() != m || upper.iter().any(|row| row.len() != k - 1) {
        return Err(Error::Contract(format!("extension must be {m}x{}", k - 1)));
    }
    let (jx, jy) = embed_jacobian(a, &psi.base)?;
    let mut big_p = vec![vec![0.0; k]; m];
    for c in 0..m {
        let mut v = psi.dx[c];
        for b in 0..m {
            for beta in 1..k {
                v -= upper[b][beta - 1] * jx[b][beta - 1][c];
            }
        }
        big_p[c][0] = v;
        big_p[c][1..].copy_from_slice(&upper[c]);
    }
    let mut big_pi = psi.dy.clone();
    for (i, row) in big_pi.iter_mut().enumerate().take(r) {
        for (al, v) in row.iter_mut().enumerate() {
            for b in 0..m {
                for beta in 1..k {
                    *v -= upper[b][beta - 1] * jy[b][beta - 1][i][al];
                }
            }
        }
    }
    let mixed = eps_k_mixed(a, &psi.base, &big_p, &big_pi, &0.0)?;
    iota_star(&mixed, 1e-9)
}

/// `Σᵢ Σ_α C(k,α) ξᵢ^{(α)} y^{i,(k−α)}`.
pub fn pairing_tk<S: Scalar>(xi: &[Vec<S>], v: &[Vec<S>], k: usize) -> Result<S> {
    if xi.len() != v.len() || xi.is_empty() {
        return Err(Error::Contract("pairing needs equal, non-zero rank".into()));
    }
    if xi.iter().chain(v).any(|row| row.len() != k + 1) {
        return Err(Error::Contract(format!("pairing at order {k} needs {} components", k + 1)));
    }
    let mut acc = xi[0][0].zero_like();
    for (xr, vr) in xi.iter().zip(v) {
        for alpha in 0..=k {
            acc = acc + (xr[alpha].clone() * vr[k - alpha].clone()).scale(binom(k as i64, alpha as i64));
        }
    }
    Ok(acc)
}

/// `Σᵢ Σ_γ mᵢ^{(γ)} y^{i,(k−γ)}`: the pairing under which the local momenta
/// of `momenta_map` satisfy integration by parts (they are the summed,
/// not averaged, components of the semi-holonomic projection).
pub fn pairing_momentum<S: Scalar>(m: &[Vec<S>], v: &[Vec<S>], k: usize) -> Result<S> {
    if m.len() != v.len() || m.is_empty() {
        return Err(Error::Contract("pairing needs equal, non-zero rank".into()));
    }
    if m.iter().chain(v).any(|row| row.len() != k + 1) {
        return Err(Error::Contract(format!("pairing at order {k} needs {} components", k + 1)));
    }
    let mut acc = m[0][0].zero_like();
    for (mr, vr) in m.iter().zip(v) {
        for g in 0..=k {
            acc = acc + mr[g].clone() * vr[k - g].clone();
        }
    }
    Ok(acc)
}

/// `Σ_ε ξ^{(ε)} y^{(1…1)−ε}`, multi-indices ε ∈ {0,1}ᵏ stored as bitmasks.
pub fn pairing_iterated(xi: &[Vec<f64>], v: &[Vec<f64>], k: usize) -> Result<f64> {
    let n = 1usize << k;
    if xi.len() != v.len() || xi.iter().chain(v).any(|row| row.len() != n) {
        return Err(Error::Contract(format!("iterated pairing at order {k} needs {n} components per row")));
    }
    let full = n - 1;
    Ok(xi.iter().zip(v).map(|(xr, vr)| (0..n).map(|e| xr[e] * vr[full ^ e]).sum::<f64>()).sum())
}

/// Averages an element of the iterated tangent bundle over multi-indices of
/// equal total degree. `base` and `fiber` rows have 2ᵏ components.
#[allow(clippy::type_complexity)]
pub fn p_k_project(base: &[Vec<f64>], fiber: &[Vec<f64>], k: usize) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let n = 1usize << k;
    if base.iter().chain(fiber).any(|row| row.len() != n) {
        return Err(Error::Contract(format!("rows must have {n} components")));
    }
    let mut bh = Vec::with_capacity(base.len());
    for (a, row) in base.iter().enumerate() {
        let mut out = vec![f64::NAN; k + 1];
        for (e, &v) in row.iter().enumerate() {
            let d = e.count_ones() as usize;
            if out[d].is_nan() {
                out[d] = v;
            } else if (out[d] - v).abs() > 1e-12 * (1.0 + v.abs()) {
                return Err(Error::Contract(format!("base coordinate x{} is not holonomic at degree {d}", a + 1)));
            }
        }
        bh.push(out);
    }
    let fb = fiber
        .iter()
        .map(|row| {
            let mut out = vec![0.0; k + 1];
            for (e, &v) in row.iter().enumerate() {
                out[e.count_ones() as usize] += v;
            }
            for (alpha, o) in out.iter_mut().enumerate() {
                *o /= binom(k as i64, alpha as i64);
            }
            out
        })
        .collect();
    Ok((bh, fb))
}

impl SemiHolonomicBlock {
    pub fn new(k: usize, basejet: Vec<Vec<f64>>, xi: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if basejet.iter().any(|row| row.len() != 2 * k + 1) {
            return Err(Error::Contract(format!("base jet must have order {}", 2 * k)));
        }
        if xi.iter().any(|ri| ri.len() != k + 1 || ri.iter().any(|row| row.len() != k + 1)) {
            return Err(Error::Contract(format!("fiber block must be {0}x{0} per component", k + 1)));
        }
        Ok(Self { k, basejet, xi })
    }

    pub fn rank(&self) -> usize {
        self.xi.len()
    }
}

/// `Fᵢ = Σ_α (−1)^α C(k,α) ξᵢ^{(α,k−α)}`.
pub fn upsilon(phi: &SemiHolonomicBlock) -> Vec<f64> {
    let k = phi.k;
    phi.xi
        .iter()
        .map(|x| (0..=k).map(|al| sign(al) * binom(k as i64, al as i64) * x[al][k - al]).sum())
        .collect()
}

/// `m^{(β)} = Σ_{a+b=β} (−1)^a C(k+1,b) ξ^{(a,b)}`, β = 0..k.
pub fn momenta_map(phi: &SemiHolonomicBlock) -> Vec<Vec<f64>> {
    momenta_from(&phi.xi, phi.k, 0)
}

fn momenta_from(xi: &[Vec<Vec<f64>>], k: usize, shift: usize) -> Vec<Vec<f64>> {
    xi.iter()
        .map(|x| {
            (0..=k)
                .map(|beta| {
                    (0..=beta)
                        .map(|a| sign(a) * binom(k as i64 + 1, (beta - a) as i64) * x[a + shift][beta - a])
                        .sum()
                })
                .collect()
        })
        .collect()
}

fn sign(a: usize) -> f64 {
    if a.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `|⟨Φ^{(0,k)}, jᵏη⟩ − ⟨Υ(Φ), η⟩ − d/dt⟨μ(Φ^{(k,k−1)}), j^{k−1}η⟩|`.
/// `base` is the order-k base jet of η and `eta[i][α] = η^{i,(α)}`.
pub fn green_identity_check(phi: &SemiHolonomicBlock, base: &[Vec<f64>], eta: &[Vec<f64>]) -> Result<f64> {
    let k = phi.k;
    if k == 0 {
        return Err(Error::Contract("order must be at least 1".into()));
    }
    if base.len() != phi.basejet.len() || eta.len() != phi.rank() {
        return Err(Error::Contract("feet do not match".into()));
    }
    for (b, pb) in base.iter().zip(&phi.basejet) {
        if b.len() != k + 1 || b.iter().zip(pb).any(|(u, v)| (u - v).abs() > 1e-12 * (1.0 + v.abs())) {
            return Err(Error::Contract("feet do not match".into()));
        }
    }
    if eta.iter().any(|row| row.len() != k + 1) {
        return Err(Error::Contract(format!("section jet must have order {k}")));
    }
    let top: Vec<Vec<f64>> = phi.xi.iter().map(|x| x[0].clone()).collect();
    let lhs = pairing_tk(&top, eta, k)?;
    let ups = upsilon(phi);
    let mut rhs: f64 = ups.iter().zip(eta).map(|(u, e)| u * e[0]).sum();
    let m0 = momenta_from(&phi.xi, k - 1, 0);
    let m1 = momenta_from(&phi.xi, k - 1, 1);
    for i in 0..phi.rank() {
        for g in 0..k {
            rhs += m0[i][g] * eta[i][k - g] + m1[i][g] * eta[i][k - 1 - g];
        }
    }
    Ok((lhs - rhs).abs())
}

#[derive(Clone, Debug, PartialEq)]
pub struct BinomReport {
    pub k: usize,
    pub checked: usize,
    pub failures: Vec<String>,
    pub pass: bool,
}

fn binom_i(n: i64, k: i64) -> i128 {
    if n < 0 || k < 0 || k > n {
        0
    } else {
        binomial(n as usize, k as usize) as i128
    }
}

fn sgn_i(j: i64) -> i128 {
    if j % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `Σ_{j=a}^{k} (−1)ʲ C(j,a) C(k,j)`; defined for `a < k`.
pub fn binom_identity_a(k: usize, a: usize) -> Result<i128> {
    if a >= k {
        return Err(Error::Contract(format!("first identity requires a < k (got a={a}, k={k})")));
    }
    let (k, a) = (k as i64, a as i64);
    Ok((a..=k).map(|j| sgn_i(j) * binom_i(j, a) * binom_i(k, j)).sum())
}

/// Returns `(Σ_{j=a}^{k−b} (−1)ʲ C(j,a) C(k−j,b) C(k+1,j+1), (−1)ᵃ C(k+1,b))`.
pub fn binom_identity_b(k: usize, a: usize, b: usize) -> Result<(i128, i128)> {
    if a + b > k {
        return Err(Error::Contract(format!("second identity requires a+b <= k (got a={a}, b={b}, k={k})")));
    }
    let (k, a, b) = (k as i64, a as i64, b as i64);
    let lhs = (a..=k - b).map(|j| sgn_i(j) * binom_i(j, a) * binom_i(k - j, b) * binom_i(k + 1, j + 1)).sum();
    Ok((lhs, sgn_i(a) * binom_i(k + 1, b)))
}

/// Checks both binomial identities for every admissible index at order k.
pub fn binom_identity_check(k: usize) -> BinomReport {
    let mut checked = 0;
    let mut failures = Vec::new();
    for a in 0..k {
        checked += 1;
        match binom_identity_a(k, a) {
            Ok(0) => {}
            Ok(v) => failures.push(format!("first identity k={k} a={a}: sum {v}")),
            Err(e) => failures.push(e.to_string()),
        }
    }
    for a in 0..=k {
        for b in 0..=(k - a) {
            checked += 1;
            match binom_identity_b(k, a, b) {
                Ok((l, r)) if l == r => {}
                Ok((l, r)) => failures.push(format!("second identity k={k} a={a} b={b}: {l} != {r}")),
                Err(e) => failures.push(e.to_string()),
            }
        }
    }
    BinomReport { k, checked, pass: failures.is_empty(), failures }
}
