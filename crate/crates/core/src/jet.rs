//! Truncated Taylor arithmetic in the derivative convention.
//!
//! A [`Jet`] of order `K` stores `coeffs[α] = dᵅf/dtᵅ` at the expansion
//! point, *without* the `1/α!` normalisation. Products therefore follow the
//! Leibniz rule with binomial weights. Jets are generic over their
//! coefficient ring, so `Jet<Jet<f64>>` gives nested univariate seeds (a jet
//! in `t` whose coefficients carry a forward-mode derivative, and so on).

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest jet order accepted by the checked constructors.
pub const MAX_ORDER: usize = 12;

const BINOM_N: usize = 40;

const BINOM_TABLE: [[u64; BINOM_N]; BINOM_N] = {
    let mut t = [[0u64; BINOM_N]; BINOM_N];
    let mut n = 0;
    while n < BINOM_N {
        t[n][0] = 1;
        let mut k = 1;
        while k <= n {
            t[n][k] = t[n - 1][k - 1] + t[n - 1][k];
            k += 1;
        }
        n += 1;
    }
    t
};

/// Exact binomial coefficient; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    if n < BINOM_N {
        return BINOM_TABLE[n][k];
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// Binomial coefficient as a float, accepting signed arguments
/// (out-of-range arguments give zero).
pub fn binom(n: i64, k: i64) -> f64 {
    if n < 0 || k < 0 || k > n {
        0.0
    } else {
        binomial(n as usize, k as usize) as f64
    }
}

/// Numeric ring used by every evaluator in the crate.
///
/// Implemented for `f64` and recursively for `Jet<T>`. Binary operators on
/// jets of different orders are contract violations and panic; the checked
/// entry points (`Jet::try_mul` and friends) report them as errors.
pub trait Scalar:
    Sized
    + Clone
    + Debug
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// A constant with the same shape (jet orders) as `self`.
    fn constant_like(&self, v: f64) -> Self;

    fn zero_like(&self) -> Self {
        self.constant_like(0.0)
    }

    /// The innermost constant term.
    fn value(&self) -> f64;

    fn scale(&self, f: f64) -> Self;

    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn sin_cos(&self) -> (Self, Self);
    fn tanh(&self) -> Self;
    fn is_finite(&self) -> bool;

    /// Order of the outermost jet layer (0 for plain floats).
    fn jet_order(&self) -> usize {
        0
    }

    fn sin(&self) -> Self {
        self.sin_cos().0
    }

    fn cos(&self) -> Self {
        self.sin_cos().1
    }

    /// Integer power by repeated squaring.
    fn powi(&self, n: i64) -> Self {
        let mut base = self.clone();
        let mut e = n.unsigned_abs();
        let mut acc = self.constant_like(1.0);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        if n < 0 {
            self.constant_like(1.0) / acc
        } else {
            acc
        }
    }

    /// Real power evaluated as `exp(e·ln b)`.
    fn powf(&self, e: &Self) -> Self {
        (e.clone() * self.ln()).exp()
    }
}

impl Scalar for f64 {
    fn constant_like(&self, v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn scale(&self, f: f64) -> Self {
        self * f
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn sin_cos(&self) -> (Self, Self) {
        (f64::sin(*self), f64::cos(*self))
    }
    fn tanh(&self) -> Self {
        f64::tanh(*self)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

/// Order-`K` truncated Taylor data of a scalar in one variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<T = f64> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Jet<T> {
    /// Builds a jet from its derivative coefficients.
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Contract("a jet needs at least one coefficient".into()));
        }
        if coeffs.len() - 1 > MAX_ORDER {
            return Err(Error::OrderTooLarge { order: coeffs.len() - 1, max: MAX_ORDER });
        }
        if let Some(i) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { component: i });
        }
        Ok(Self { coeffs })
    }

    /// Unchecked constructor for internal use; `coeffs` must be non-empty.
    pub(crate) fn from_vec(coeffs: Vec<T>) -> Self {
        debug_assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    /// The jet of the constant `c` at the given order.
    pub fn constant_of(order: usize, c: T) -> Self {
        let z = c.zero_like();
        let mut coeffs = vec![z; order + 1];
        coeffs[0] = c;
        Self { coeffs }
    }

    /// The jet of `t ↦ x0 + t` (an independent variable seed).
    pub fn variable(order: usize, x0: T) -> Self {
        let mut j = Self::constant_of(order, x0);
        if order >= 1 {
            j.coeffs[1] = j.coeffs[0].constant_like(1.0);
        }
        j
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn coeff(&self, alpha: usize) -> &T {
        &self.coeffs[alpha]
    }

    pub fn value_ref(&self) -> &T {
        &self.coeffs[0]
    }

    /// Keeps the coefficients up to `order`.
    pub fn truncate(&self, order: usize) -> Self {
        assert!(order <= self.order(), "cannot truncate to a higher order");
        Self { coeffs: self.coeffs[..=order].to_vec() }
    }

    /// The jet of the derivative, one order lower. An order-0 jet maps to zero.
    pub fn derivative(&self) -> Self {
        if self.order() == 0 {
            return Self { coeffs: vec![self.coeffs[0].zero_like()] };
        }
        Self { coeffs: self.coeffs[1..].to_vec() }
    }

    /// Factorial-normalised Taylor coefficients `f⁽ᵅ⁾/α!`.
    pub fn to_taylor(&self) -> Vec<T> {
        let mut fact = 1.0;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(a, c)| {
                if a > 0 {
                    fact *= a as f64;
                }
                c.scale(1.0 / fact)
            })
            .collect()
    }

    /// Inverse of [`Jet::to_taylor`].
    pub fn from_taylor(taylor: &[T]) -> Self {
        let mut fact = 1.0;
        let coeffs = taylor
            .iter()
            .enumerate()
            .map(|(a, c)| {
                if a > 0 {
                    fact *= a as f64;
                }
                c.scale(fact)
            })
            .collect();
        Self::from_vec(coeffs)
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::OrderMismatch { left: self.order(), right: other.order() });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(self.clone() + other.clone())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(leibniz(&self.coeffs, &other.coeffs))
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        if other.coeffs[0].value() == 0.0 {
            return Err(Error::Domain {
                op: "division",
                detail: "divisor jet has zero constant term".into(),
            });
        }
        Ok(self.clone() / other.clone())
    }

    fn assert_same(&self, other: &Self) {
        assert_eq!(
            self.order(),
            other.order(),
            "jet order mismatch (contract violation)"
        );
    }
}

fn leibniz<T: Scalar>(a: &[T], b: &[T]) -> Jet<T> {
    let n = a.len();
    let mut out = Vec::with_capacity(n);
    for alpha in 0..n {
        let mut acc = a[0].clone() * b[alpha].clone();
        for s in 1..=alpha {
            let term = (a[s].clone() * b[alpha - s].clone()).scale(binom(alpha as i64, s as i64));
            acc = acc + term;
        }
        out.push(acc);
    }
    Jet { coeffs: out }
}

/// `Σ_{s=0}^{n} C(n,s)·f⁽ˢ⁺¹⁾·g⁽ⁿ⁻ˢ⁾`: the n-th derivative of `f'·g`.
fn dprod<T: Scalar>(f: &[T], g: &[T], n: usize) -> T {
    let mut acc = f[1].clone() * g[n].clone();
    for s in 1..=n {
        acc = acc + (f[s + 1].clone() * g[n - s].clone()).scale(binom(n as i64, s as i64));
    }
    acc
}

impl<T: Scalar> Add for Jet<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        self.assert_same(&rhs);
        Jet { coeffs: self.coeffs.into_iter().zip(rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl<T: Scalar> Sub for Jet<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self.assert_same(&rhs);
        Jet { coeffs: self.coeffs.into_iter().zip(rhs.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl<T: Scalar> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.assert_same(&rhs);
        leibniz(&self.coeffs, &rhs.coeffs)
    }
}

impl<T: Scalar> Div for Jet<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self.assert_same(&rhs);
        let a = &self.coeffs;
        let b = &rhs.coeffs;
        let mut q: Vec<T> = Vec::with_capacity(a.len());
        for n in 0..a.len() {
            let mut num = a[n].clone();
            for s in 0..n {
                num = num - (q[s].clone() * b[n - s].clone()).scale(binom(n as i64, s as i64));
            }
            q.push(num / b[0].clone());
        }
        Jet { coeffs: q }
    }
}

impl<T: Scalar> Neg for Jet<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Jet { coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

impl<T: Scalar> Scalar for Jet<T> {
    fn constant_like(&self, v: f64) -> Self {
        let c = self.coeffs[0].constant_like(v);
        Self::constant_of(self.order(), c)
    }

    fn value(&self) -> f64 {
        self.coeffs[0].value()
    }

    fn scale(&self, f: f64) -> Self {
        Jet { coeffs: self.coeffs.iter().map(|c| c.scale(f)).collect() }
    }

    fn exp(&self) -> Self {
        let f = &self.coeffs;
        let mut g = vec![f[0].exp()];
        for n in 0..self.order() {
            g.push(dprod(f, &g, n));
        }
        Jet { coeffs: g }
    }

    fn ln(&self) -> Self {
        let f = &self.coeffs;
        let mut g = vec![f[0].ln()];
        for n in 0..self.order() {
            // f·g' = f'  differentiated n times
            let mut num = f[n + 1].clone();
            for s in 1..=n {
                num = num - (f[s].clone() * g[n + 1 - s].clone()).scale(binom(n as i64, s as i64));
            }
            g.push(num / f[0].clone());
        }
        Jet { coeffs: g }
    }

    fn sqrt(&self) -> Self {
        let f = &self.coeffs;
        let mut g = vec![f[0].sqrt()];
        for n in 0..self.order() {
            // 2·g·g' = f'  differentiated n times
            let mut num = f[n + 1].scale(0.5);
            for s in 1..=n {
                num = num - (g[s].clone() * g[n + 1 - s].clone()).scale(binom(n as i64, s as i64));
            }
            g.push(num / g[0].clone());
        }
        Jet { coeffs: g }
    }

    fn sin_cos(&self) -> (Self, Self) {
        let f = &self.coeffs;
        let (s0, c0) = f[0].sin_cos();
        let mut s = vec![s0];
        let mut c = vec![c0];
        for n in 0..self.order() {
            let ds = dprod(f, &c, n);
            let dc = -dprod(f, &s, n);
            s.push(ds);
            c.push(dc);
        }
        (Jet { coeffs: s }, Jet { coeffs: c })
    }

    fn tanh(&self) -> Self {
        let f = &self.coeffs;
        let mut g = vec![f[0].tanh()];
        // h = 1 − g², built alongside g
        let mut h: Vec<T> = Vec::new();
        for n in 0..self.order() {
            let mut sq = g[0].clone() * g[n].clone();
            for s in 1..=n {
                sq = sq + (g[s].clone() * g[n - s].clone()).scale(binom(n as i64, s as i64));
            }
            let hn = if n == 0 { sq.constant_like(1.0) - sq } else { -sq };
            h.push(hn);
            g.push(dprod(f, &h, n));
        }
        Jet { coeffs: g }
    }

    fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    fn jet_order(&self) -> usize {
        self.order()
    }
}

/// A jet of a curve in Rⁿ: one jet per coordinate, all of the same order.
#[derive(Clone, Debug, PartialEq)]
pub struct JetPoint<T = f64> {
    components: Vec<Jet<T>>,
}

impl<T: Scalar> JetPoint<T> {
    pub fn new(components: Vec<Jet<T>>) -> Result<Self> {
        if let Some(first) = components.first() {
            for c in &components[1..] {
                if c.order() != first.order() {
                    return Err(Error::OrderMismatch { left: first.order(), right: c.order() });
                }
            }
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[Jet<T>] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn order(&self) -> Option<usize> {
        self.components.first().map(|c| c.order())
    }
}

/// A scalar map on Rⁿ that can be evaluated in any [`Scalar`] ring.
pub trait JetFunction {
    fn arity(&self) -> usize;
    fn call<S: Scalar>(&self, args: &[S]) -> Result<S>;
}

/// The jet of `t ↦ f(curve(t))` where `a` is the jet of the curve.
pub fn jet_compose<F: JetFunction>(f: &F, a: &JetPoint) -> Result<Jet> {
    if a.dim() != f.arity() {
        return Err(Error::Contract(format!(
            "function takes {} arguments, jet point has {}",
            f.arity(),
            a.dim()
        )));
    }
    let out = f.call(a.components())?;
    if let Some(i) = out.coeffs().iter().position(|c| !c.is_finite()) {
        return Err(Error::NonFinite { component: i });
    }
    Ok(out)
}

/// `d/ds|₀ f(x + s·v)` through an order-1 seed.
pub fn directional_derivative<F: JetFunction>(f: &F, x: &[f64], v: &[f64]) -> Result<f64> {
    if x.len() != v.len() || x.len() != f.arity() {
        return Err(Error::Contract("point, direction and arity must agree".into()));
    }
    let args: Vec<Jet> = x.iter().zip(v).map(|(&xi, &vi)| Jet::from_vec(vec![xi, vi])).collect();
    let out = f.call(&args)?;
    let d = out.coeffs()[1];
    if !d.is_finite() {
        return Err(Error::NonFinite { component: 1 });
    }
    Ok(d)
}

/// Gradient of `f` at a point whose coordinates live in any ring, assembled
/// from one order-1 seed per coordinate.
pub fn gradient<F: JetFunction, S: Scalar>(f: &F, x: &[S]) -> Result<Vec<S>> {
    let mut grad = Vec::with_capacity(x.len());
    for k in 0..x.len() {
        let args: Vec<Jet<S>> = x
            .iter()
            .enumerate()
            .map(|(i, xi)| {
                let seed = xi.constant_like(if i == k { 1.0 } else { 0.0 });
                Jet::from_vec(vec![xi.clone(), seed])
            })
            .collect();
        let out = f.call(&args)?;
        grad.push(out.coeffs[1].clone());
    }
    Ok(grad)
}
