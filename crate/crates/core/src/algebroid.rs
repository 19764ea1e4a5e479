//! Almost Lie algebroid structures in local coordinates.

use crate::error::{Error, Result};
use crate::expr::{parse, BinOp, Compiled, Expr};
use crate::jet::{gradient, Scalar};

/// Names of the base coordinates `x1..xm`.
pub fn base_names(m: usize) -> Vec<String> {
    (1..=m).map(|a| format!("x{a}")).collect()
}

/// Anchor `ρᵃᵢ(x)` and bracket coefficients `cᵏᵢⱼ(x)` (layout `c[k][i][j]`).
#[derive(Clone, Debug)]
pub struct AlgebroidStructure {
    m: usize,
    r: usize,
    label: String,
    rho: Vec<Vec<Expr>>,
    c: Vec<Vec<Vec<Expr>>>,
    rho_c: Vec<(usize, usize, Compiled)>,
    c_c: Vec<(usize, usize, usize, Compiled)>,
    warnings: Vec<String>,
}

/// Structure functions evaluated at one base point, in any ring.
#[derive(Clone, Debug)]
pub struct StructureAt<S> {
    pub m: usize,
    pub r: usize,
    zero: S,
    rho: Vec<(usize, usize, S)>,
    c: Vec<(usize, usize, usize, S)>,
}

impl<S: Scalar> StructureAt<S> {
    /// `ρᵃᵢ yⁱ`
    pub fn anchor(&self, y: &[S]) -> Vec<S> {
        let mut out = vec![self.zero.clone(); self.m];
        for (a, i, v) in &self.rho {
            out[*a] = out[*a].clone() + v.clone() * y[*i].clone();
        }
        out
    }

    /// `ρᵃⱼ pₐ`
    pub fn anchor_transpose(&self, p: &[S]) -> Vec<S> {
        let mut out = vec![self.zero.clone(); self.r];
        for (a, j, v) in &self.rho {
            out[*j] = out[*j].clone() + v.clone() * p[*a].clone();
        }
        out
    }

    /// `cᵏᵢⱼ uⁱ vʲ`
    pub fn bracket(&self, u: &[S], v: &[S]) -> Vec<S> {
        let mut out = vec![self.zero.clone(); self.r];
        for (k, i, j, c) in &self.c {
            out[*k] = out[*k].clone() + c.clone() * u[*i].clone() * v[*j].clone();
        }
        out
    }

    /// `(ad*_u π)ⱼ = cᵏᵢⱼ uⁱ πₖ`
    pub fn coadjoint(&self, u: &[S], pi: &[S]) -> Vec<S> {
        let mut out = vec![self.zero.clone(); self.r];
        for (k, i, j, c) in &self.c {
            out[*j] = out[*j].clone() + c.clone() * u[*i].clone() * pi[*k].clone();
        }
        out
    }

    /// Dense `ρ` as an m×r matrix.
    pub fn rho_dense(&self) -> Vec<Vec<S>> {
        let mut out = vec![vec![self.zero.clone(); self.r]; self.m];
        for (a, i, v) in &self.rho {
            out[*a][*i] = v.clone();
        }
        out
    }

    /// Dense `c` with layout `c[k][i][j]`.
    pub fn c_dense(&self) -> Vec<Vec<Vec<S>>> {
        let mut out = vec![vec![vec![self.zero.clone(); self.r]; self.r]; self.r];
        for (k, i, j, v) in &self.c {
            out[*k][*i][*j] = v.clone();
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomReport {
    pub samples: usize,
    pub max_skew: f64,
    pub max_compat: f64,
    /// Largest term magnitude seen, used for the relative tolerance.
    pub scale: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Tangent vector to E: `(xᵃ, yⁱ, ẋᵃ, ẏⁱ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TEVector {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub xdot: Vec<f64>,
    pub ydot: Vec<f64>,
}

/// Covector on E: `(xᵃ, yⁱ, p_b, π_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TStarEVector {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub p: Vec<f64>,
    pub piv: Vec<f64>,
}

/// Tangent vector to E*: `(xᵃ, ξᵢ, ẋᵃ, ξ̇ᵢ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TEStarVector {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
    pub xdot: Vec<f64>,
    pub xidot: Vec<f64>,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn sub_expr(a: &Expr, b: &Expr) -> Expr {
    Expr::Bin(BinOp::Sub, Box::new(a.clone()), Box::new(b.clone()))
}

fn neg_expr(a: &Expr) -> Expr {
    match a {
        Expr::Neg(inner) => (**inner).clone(),
        e if e.is_zero_literal() => Expr::Num(0.0),
        e => Expr::Neg(Box::new(e.clone())),
    }
}

impl AlgebroidStructure {
    /// Builds a structure, validating shapes and identifiers. The bracket is
    /// antisymmetrized; a warning is recorded when the input was not skew.
    pub fn new(
        m: usize,
        r: usize,
        rho: Vec<Vec<Expr>>,
        c: Vec<Vec<Vec<Expr>>>,
        label: &str,
    ) -> Result<Self> {
        if rho.len() != m || rho.iter().any(|row| row.len() != r) {
            return Err(Error::Schema(format!("rho must be a {m}x{r} matrix")));
        }
        if c.len() != r || c.iter().any(|ck| ck.len() != r || ck.iter().any(|row| row.len() != r)) {
            return Err(Error::Schema(format!("c must be a {r}x{r}x{r} array")));
        }
        let names = base_names(m);
        let allowed: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let check = |e: &Expr, what: String| -> Result<()> {
            for v in e.free_vars() {
                if !allowed.contains(&v.as_str()) {
                    return Err(Error::Schema(format!(
                        "{what} references `{v}`; structure functions may use only x1..x{m}"
                    )));
                }
            }
            Ok(())
        };
        for (a, row) in rho.iter().enumerate() {
            for (i, e) in row.iter().enumerate() {
                check(e, format!("rho[{a}][{i}]"))?;
            }
        }
        for (k, ck) in c.iter().enumerate() {
            for (i, row) in ck.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    check(e, format!("c[{k}][{i}][{j}]"))?;
                }
            }
        }

        let mut s = AlgebroidStructure {
            m,
            r,
            label: label.to_string(),
            rho,
            c: c.clone(),
            rho_c: Vec::new(),
            c_c: Vec::new(),
            warnings: Vec::new(),
        };
        s.compile()?;

        // skewness of the raw input, probed at a few points
        let probes = halton_points(m, 8, -1.0, 1.0);
        let mut raw_skew: f64 = 0.0;
        for x in &probes {
            let dense = s.at(x, &0.0)?.c_dense();
            for k in 0..r {
                for i in 0..r {
                    for j in 0..r {
                        raw_skew = raw_skew.max((dense[k][i][j] + dense[k][j][i]).abs());
                    }
                }
            }
        }
        let mut skew = vec![vec![vec![Expr::Num(0.0); r]; r]; r];
        for k in 0..r {
            for i in 0..r {
                for j in (i + 1)..r {
                    let e = if raw_skew <= 1e-12 {
                        if c[k][i][j].is_zero_literal() {
                            neg_expr(&c[k][j][i])
                        } else {
                            c[k][i][j].clone()
                        }
                    } else {
                        let d = sub_expr(&c[k][i][j], &c[k][j][i]);
                        Expr::Bin(BinOp::Div, Box::new(d), Box::new(Expr::Num(2.0)))
                    };
                    skew[k][j][i] = neg_expr(&e);
                    skew[k][i][j] = e;
                }
            }
        }
        if raw_skew > 1e-12 {
            s.warnings.push(format!(
                "bracket coefficients were not skew-symmetric (max |c^k_ij + c^k_ji| = {raw_skew:e}); antisymmetrized"
            ));
        }
        s.c = skew;
        s.compile()?;
        Ok(s)
    }

    /// Convenience constructor from expression strings.
    pub fn from_strings(
        m: usize,
        r: usize,
        rho: &[Vec<&str>],
        c: &[Vec<Vec<&str>>],
        label: &str,
    ) -> Result<Self> {
        let p = |s: &str| parse(s).map_err(Error::from);
        let rho = rho.iter().map(|row| row.iter().map(|s| p(s)).collect()).collect::<Result<_>>()?;
        let c = c
            .iter()
            .map(|ck| ck.iter().map(|row| row.iter().map(|s| p(s)).collect()).collect())
            .collect::<Result<_>>()?;
        Self::new(m, r, rho, c, label)
    }

    /// Constant structure functions.
    pub fn from_constants(m: usize, r: usize, rho: &[Vec<f64>], c: &[Vec<Vec<f64>>], label: &str) -> Result<Self> {
        let rho = rho.iter().map(|row| row.iter().map(|&v| Expr::num(v)).collect()).collect();
        let c = c
            .iter()
            .map(|ck| ck.iter().map(|row| row.iter().map(|&v| Expr::num(v)).collect()).collect())
            .collect();
        Self::new(m, r, rho, c, label)
    }

    fn compile(&mut self) -> Result<()> {
        let names = base_names(self.m);
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        self.rho_c.clear();
        self.c_c.clear();
        for (a, row) in self.rho.iter().enumerate() {
            for (i, e) in row.iter().enumerate() {
                if !e.is_zero_literal() {
                    self.rho_c.push((a, i, e.compile(&refs)?));
                }
            }
        }
        for (k, ck) in self.c.iter().enumerate() {
            for (i, row) in ck.iter().enumerate() {
                for (j, e) in row.iter().enumerate() {
                    if !e.is_zero_literal() {
                        self.c_c.push((k, i, j, e.compile(&refs)?));
                    }
                }
            }
        }
        Ok(())
    }

    /// The tangent algebroid of Rⁿ.
    pub fn tangent(n: usize) -> Self {
        let mut rho = vec![vec![0.0; n]; n];
        for (a, row) in rho.iter_mut().enumerate() {
            row[a] = 1.0;
        }
        let c = vec![vec![vec![0.0; n]; n]; n];
        Self::from_constants(n, n, &rho, &c, &format!("tangent({n})")).expect("valid tangent structure")
    }

    /// A Lie algebra over a point with the given structure constants `c[k][i][j]`.
    pub fn lie(c: &[Vec<Vec<f64>>], label: &str) -> Result<Self> {
        Self::from_constants(0, c.len(), &[], c, label)
    }

    /// Named Lie algebra fixtures: "so3-like" (Levi-Civita) and
    /// "heis3-like" (`[e1,e2] = e3`).
    pub fn lie_preset(name: &str) -> Result<Self> {
        Self::lie(&lie_constants(name)?, name)
    }

    /// Block product of structures, with base and fiber indices offset.
    pub fn product(factors: &[AlgebroidStructure]) -> Result<Self> {
        let m: usize = factors.iter().map(|f| f.m).sum();
        let r: usize = factors.iter().map(|f| f.r).sum();
        let mut rho = vec![vec![Expr::Num(0.0); r]; m];
        let mut c = vec![vec![vec![Expr::Num(0.0); r]; r]; r];
        let (mut mo, mut ro) = (0, 0);
        for f in factors {
            let shift = mo;
            let rename = move |v: &str| match v.strip_prefix('x').and_then(|s| s.parse::<usize>().ok()) {
                Some(a) => format!("x{}", a + shift),
                None => v.to_string(),
            };
            for a in 0..f.m {
                for i in 0..f.r {
                    rho[mo + a][ro + i] = f.rho[a][i].rename_vars(&rename);
                }
            }
            for k in 0..f.r {
                for i in 0..f.r {
                    for j in 0..f.r {
                        c[ro + k][ro + i][ro + j] = f.c[k][i][j].rename_vars(&rename);
                    }
                }
            }
            mo += f.m;
            ro += f.r;
        }
        let label = factors.iter().map(|f| f.label.as_str()).collect::<Vec<_>>().join(" x ");
        Self::new(m, r, rho, c, &label)
    }

    /// An algebroid on R² with bracket coefficients depending on the base:
    /// anchors `∂1, x1∂2, ∂2`, with `g` entering the kernel direction of `[e1,e2]`.
    pub fn affine_heis(g: &str) -> Result<Self> {
        let g = parse(g)?;
        let x1 = Expr::var("x1");
        let one = Expr::Num(1.0);
        let zero = Expr::Num(0.0);
        let rho = vec![vec![one.clone(), zero.clone(), zero.clone()], vec![zero.clone(), x1.clone(), one.clone()]];
        let mut c = vec![vec![vec![zero.clone(); 3]; 3]; 3];
        c[1][0][1] = g.clone();
        c[2][0][1] = sub_expr(&one, &Expr::Bin(BinOp::Mul, Box::new(x1), Box::new(g)));
        for k in 1..3 {
            c[k][1][0] = neg_expr(&c[k][0][1]);
        }
        Self::new(2, 3, rho, c, "affine-heis")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn rho_exprs(&self) -> &[Vec<Expr>] {
        &self.rho
    }

    pub fn c_exprs(&self) -> &[Vec<Vec<Expr>>] {
        &self.c
    }

    /// True when every structure function is free of base coordinates.
    pub fn is_constant(&self) -> bool {
        self.rho.iter().flatten().chain(self.c.iter().flatten().flatten()).all(|e| e.free_vars().is_empty())
    }

    /// Evaluates the structure functions at `x` in the ring of `like`.
    pub fn at<S: Scalar>(&self, x: &[S], like: &S) -> Result<StructureAt<S>> {
        if x.len() != self.m {
            return Err(Error::Contract(format!("base point has {} coordinates, expected {}", x.len(), self.m)));
        }
        let mut rho = Vec::with_capacity(self.rho_c.len());
        for (a, i, e) in &self.rho_c {
            rho.push((*a, *i, e.eval_like(like, x)?));
        }
        let mut c = Vec::with_capacity(self.c_c.len());
        for (k, i, j, e) in &self.c_c {
            c.push((*k, *i, *j, e.eval_like(like, x)?));
        }
        Ok(StructureAt { m: self.m, r: self.r, zero: like.zero_like(), rho, c })
    }

    /// `∂_b ρᵃᵢ(x)` as `[a][i][b]`.
    fn rho_gradient(&self, x: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
        let mut out = vec![vec![vec![0.0; self.m]; self.r]; self.m];
        if self.m == 0 {
            return Ok(out);
        }
        for (a, i, e) in &self.rho_c {
            out[*a][*i] = gradient(e, x)?;
        }
        Ok(out)
    }

    /// Sampled check of skew-symmetry and anchor/bracket compatibility.
    pub fn check_axioms(&self, samples: &[Vec<f64>], tol: f64) -> Result<AxiomReport> {
        let (m, r) = (self.m, self.r);
        let mut max_skew: f64 = 0.0;
        let mut max_compat: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for x in samples {
            let at = self.at(x, &0.0)?;
            let c = at.c_dense();
            let rho = at.rho_dense();
            for k in 0..r {
                for i in 0..r {
                    for j in 0..r {
                        max_skew = max_skew.max((c[k][i][j] + c[k][j][i]).abs());
                        scale = scale.max(c[k][i][j].abs());
                    }
                }
            }
            let drho = self.rho_gradient(x)?;
            for a in 0..m {
                for j in 0..r {
                    for k in 0..r {
                        let mut lhs = 0.0;
                        for b in 0..m {
                            lhs += drho[a][k][b] * rho[b][j] - drho[a][j][b] * rho[b][k];
                        }
                        let mut rhs = 0.0;
                        for (i, rho_ai) in rho[a].iter().enumerate() {
                            rhs += rho_ai * c[i][j][k];
                        }
                        scale = scale.max(lhs.abs()).max(rhs.abs());
                        max_compat = max_compat.max((lhs - rhs).abs());
                    }
                }
            }
        }
        let bound = tol * scale.max(1.0);
        Ok(AxiomReport {
            samples: samples.len(),
            max_skew,
            max_compat,
            scale,
            tol,
            pass: max_skew <= bound && max_compat <= bound,
        })
    }

    /// Axiom check at quasi-random points of the box `[lo, hi]ᵐ`.
    pub fn check_axioms_default(&self, n: usize, lo: f64, hi: f64, tol: f64) -> Result<AxiomReport> {
        self.check_axioms(&halton_points(self.m, n, lo, hi), tol)
    }

    /// Bracket of two sections given as expressions in the base coordinates.
    pub fn bracket_sections(&self, xs: &[Expr], ys: &[Expr], x: &[f64]) -> Result<Vec<f64>> {
        let r = self.r;
        if xs.len() != r || ys.len() != r {
            return Err(Error::Contract(format!("sections must have {r} components")));
        }
        let names = base_names(self.m);
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let compile_all = |v: &[Expr]| -> Result<Vec<Compiled>> { v.iter().map(|e| e.compile(&refs)).collect() };
        let xc = compile_all(xs)?;
        let yc = compile_all(ys)?;
        let xv = xc.iter().map(|e| e.eval_like(&0.0, x)).collect::<Result<Vec<_>>>()?;
        let yv = yc.iter().map(|e| e.eval_like(&0.0, x)).collect::<Result<Vec<_>>>()?;
        let at = self.at(x, &0.0)?;
        let mut out = at.bracket(&xv, &yv);
        if self.m > 0 {
            let rx = at.anchor(&xv);
            let ry = at.anchor(&yv);
            for k in 0..r {
                let gy = gradient(&yc[k], x)?;
                let gx = gradient(&xc[k], x)?;
                for a in 0..self.m {
                    out[k] += rx[a] * gy[a] - ry[a] * gx[a];
                }
            }
        }
        Ok(out)
    }

    /// The κ-related vector over `ytarget`.
    pub fn kappa_apply(&self, v: &TEVector, ytarget: &[f64]) -> Result<TEVector> {
        self.kappa_apply_tol(v, ytarget, 1e-9)
    }

    pub fn kappa_apply_tol(&self, v: &TEVector, ytarget: &[f64], tol: f64) -> Result<TEVector> {
        self.check_te(v)?;
        if ytarget.len() != self.r {
            return Err(Error::Contract("target fiber point has the wrong rank".into()));
        }
        let at = self.at(&v.x, &0.0)?;
        let expect = at.anchor(ytarget);
        let residual = max_abs(&expect.iter().zip(&v.xdot).map(|(a, b)| a - b).collect::<Vec<_>>());
        if residual > tol * max_abs(&expect).max(1.0) {
            return Err(Error::NotInRelation { residual });
        }
        let br = at.bracket(ytarget, &v.y);
        Ok(TEVector {
            x: v.x.clone(),
            y: ytarget.to_vec(),
            xdot: at.anchor(&v.y),
            ydot: v.ydot.iter().zip(&br).map(|(a, b)| a + b).collect(),
        })
    }

    /// The dual map ε: T*E → TE*.
    pub fn epsilon_apply(&self, w: &TStarEVector) -> Result<TEStarVector> {
        let (m, r) = (self.m, self.r);
        if w.x.len() != m || w.p.len() != m || w.y.len() != r || w.piv.len() != r {
            return Err(Error::Contract("covector has the wrong shape".into()));
        }
        if !w.x.iter().chain(&w.y).chain(&w.p).chain(&w.piv).all(|v| v.is_finite()) {
            return Err(Error::NonFinite { component: 0 });
        }
        let at = self.at(&w.x, &0.0)?;
        let (xdot, xidot) = epsilon_at(&at, &w.y, &w.p, &w.piv);
        Ok(TEStarVector { x: w.x.clone(), xi: w.piv.clone(), xdot, xidot })
    }

    fn check_te(&self, v: &TEVector) -> Result<()> {
        if v.x.len() != self.m || v.xdot.len() != self.m || v.y.len() != self.r || v.ydot.len() != self.r {
            return Err(Error::Contract("tangent vector has the wrong shape".into()));
        }
        Ok(())
    }
}

/// ε on arbitrary ring values: returns `(ẋ, ξ̇)` for a covector with
/// fiber foot `y`, base part `p` and fiber part `π`.
pub fn epsilon_at<S: Scalar>(at: &StructureAt<S>, y: &[S], p: &[S], piv: &[S]) -> (Vec<S>, Vec<S>) {
    let xdot = at.anchor(y);
    let co = at.coadjoint(y, piv);
    let rt = at.anchor_transpose(p);
    let xidot = co.into_iter().zip(rt).map(|(a, b)| a + b).collect();
    (xdot, xidot)
}

/// `⟨V, X⟩ = ξ̇·y + ξ·ẏ` for V ∈ TE*, X ∈ TE over the same point of TM.
pub fn tangent_pairing(v: &TEStarVector, x: &TEVector) -> Result<f64> {
    let foot = max_abs(&v.x.iter().zip(&x.x).map(|(a, b)| a - b).collect::<Vec<_>>())
        .max(max_abs(&v.xdot.iter().zip(&x.xdot).map(|(a, b)| a - b).collect::<Vec<_>>()));
    if foot > 1e-9 {
        return Err(Error::Contract(format!("feet differ by {foot:e}")));
    }
    Ok(v.xidot.iter().zip(&x.y).map(|(a, b)| a * b).sum::<f64>()
        + v.xi.iter().zip(&x.ydot).map(|(a, b)| a * b).sum::<f64>())
}

/// `⟨w, Y⟩ = p·ẋ + π·ẏ` for w ∈ T*E, Y ∈ TE over the same point of E.
pub fn cotangent_pairing(w: &TStarEVector, y: &TEVector) -> Result<f64> {
    let foot = max_abs(&w.x.iter().zip(&y.x).map(|(a, b)| a - b).collect::<Vec<_>>())
        .max(max_abs(&w.y.iter().zip(&y.y).map(|(a, b)| a - b).collect::<Vec<_>>()));
    if foot > 1e-9 {
        return Err(Error::Contract(format!("feet differ by {foot:e}")));
    }
    Ok(w.p.iter().zip(&y.xdot).map(|(a, b)| a * b).sum::<f64>()
        + w.piv.iter().zip(&y.ydot).map(|(a, b)| a * b).sum::<f64>())
}

/// Structure constants of the named Lie algebra fixtures.
pub fn lie_constants(name: &str) -> Result<Vec<Vec<Vec<f64>>>> {
    let mut c = vec![vec![vec![0.0; 3]; 3]; 3];
    match name {
        "so3-like" => {
            for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
                c[k][i][j] = 1.0;
                c[k][j][i] = -1.0;
            }
        }
        "heis3-like" => {
            c[2][0][1] = 1.0;
            c[2][1][0] = -1.0;
        }
        other => return Err(Error::Schema(format!("unknown Lie algebra preset `{other}`"))),
    }
    Ok(c)
}

/// Halton points in `[lo, hi]ᵐ` (bases 2, 3, 5, ...). For `m = 0` this is
/// `n` copies of the empty point.
pub fn halton_points(m: usize, n: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    let mut primes: Vec<u64> = Vec::with_capacity(m);
    let mut cand = 2u64;
    while primes.len() < m {
        if primes.iter().all(|p| !cand.is_multiple_of(*p)) {
            primes.push(cand);
        }
        cand += 1;
    }
    (1..=n as u64)
        .map(|idx| {
            primes
                .iter()
                .map(|&base| {
                    let (mut f, mut v, mut i) = (1.0, 0.0, idx);
                    while i > 0 {
                        f /= base as f64;
                        v += f * (i % base) as f64;
                        i /= base;
                    }
                    lo + (hi - lo) * v
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn so3() -> AlgebroidStructure {
        AlgebroidStructure::lie_preset("so3-like").unwrap()
    }

    #[test]
    fn tangent_axioms_pass_exactly() {
        let rep = AlgebroidStructure::tangent(3).check_axioms_default(64, -1.0, 1.0, 1e-8).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.max_skew, 0.0);
        assert_eq!(rep.max_compat, 0.0);
    }

    #[test]
    fn lie_over_point_passes() {
        let rep = so3().check_axioms_default(4, -1.0, 1.0, 1e-8).unwrap();
        assert!(rep.pass);
        let rep = AlgebroidStructure::lie_preset("heis3-like").unwrap().check_axioms_default(4, -1.0, 1.0, 1e-8).unwrap();
        assert!(rep.pass);
    }

    #[test]
    fn broken_structure_fails_with_unit_residual() {
        let mut c = vec![vec![vec![0.0; 2]; 2]; 2];
        c[0][0][1] = 1.0;
        c[0][1][0] = -1.0;
        let a = AlgebroidStructure::from_constants(2, 2, &[vec![1.0, 0.0], vec![0.0, 1.0]], &c, "broken").unwrap();
        let rep = a.check_axioms_default(16, -1.0, 1.0, 1e-8).unwrap();
        assert!(!rep.pass);
        assert!((rep.max_compat - 1.0).abs() < 1e-12);
    }

    #[test]
    fn affine_heis_is_valid() {
        let a = AlgebroidStructure::affine_heis("x2 + 0.5*x1*x2").unwrap();
        let rep = a.check_axioms_default(64, -2.0, 2.0, 1e-8).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert!(rep.max_compat < 1e-12);
    }

    #[test]
    fn non_skew_input_is_antisymmetrized_with_warning() {
        let mut c = vec![vec![vec![0.0; 2]; 2]; 2];
        c[1][0][1] = 3.0;
        c[1][1][0] = 1.0;
        let a = AlgebroidStructure::lie(&c, "lopsided").unwrap();
        assert_eq!(a.warnings().len(), 1);
        let d = a.at(&[], &0.0).unwrap().c_dense();
        assert_eq!(d[1][0][1], 1.0);
        assert_eq!(d[1][1][0], -1.0);
        assert!(so3().warnings().is_empty());
    }

    #[test]
    fn schema_violations() {
        assert!(matches!(
            AlgebroidStructure::from_strings(1, 1, &[vec!["t"]], &[vec![vec!["0"]]], "bad"),
            Err(Error::Schema(_))
        ));
        assert!(matches!(
            AlgebroidStructure::from_strings(1, 1, &[vec!["1", "0"]], &[vec![vec!["0"]]], "bad"),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn bracket_examples() {
        let e = |v: [f64; 3]| v.iter().map(|&x| Expr::num(x)).collect::<Vec<_>>();
        let out = so3().bracket_sections(&e([1.0, 0.0, 0.0]), &e([0.0, 1.0, 0.0]), &[]).unwrap();
        assert_eq!(out, vec![0.0, 0.0, 1.0]);
        let x = e([0.3, -0.2, 0.7]);
        assert_eq!(so3().bracket_sections(&x, &x, &[]).unwrap(), vec![0.0; 3]);
        let t = AlgebroidStructure::tangent(1);
        let out = t.bracket_sections(&[Expr::num(1.0)], &[Expr::var("x1")], &[0.4]).unwrap();
        assert_eq!(out, vec![1.0]);
    }

    #[test]
    fn kappa_examples() {
        let t = AlgebroidStructure::tangent(2);
        let v = TEVector { x: vec![1.0, 2.0], y: vec![3.0, 4.0], xdot: vec![5.0, 6.0], ydot: vec![7.0, 8.0] };
        let out = t.kappa_apply(&v, &[5.0, 6.0]).unwrap();
        assert_eq!(out, TEVector { x: vec![1.0, 2.0], y: vec![5.0, 6.0], xdot: vec![3.0, 4.0], ydot: vec![7.0, 8.0] });
        assert!(matches!(t.kappa_apply(&v, &[0.0, 6.0]), Err(Error::NotInRelation { .. })));

        let v = TEVector { x: vec![], y: vec![1.0, 0.0, 0.0], xdot: vec![], ydot: vec![0.0; 3] };
        let out = so3().kappa_apply(&v, &[0.0, 1.0, 0.0]).unwrap();
        assert_eq!(out.ydot, vec![0.0, 0.0, -1.0]);
        let back = so3().kappa_apply(&out, &v.y).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn epsilon_examples() {
        let t = AlgebroidStructure::tangent(2);
        let w = TStarEVector { x: vec![1.0, 2.0], y: vec![3.0, 4.0], p: vec![5.0, 6.0], piv: vec![7.0, 8.0] };
        let out = t.epsilon_apply(&w).unwrap();
        assert_eq!(out, TEStarVector { x: vec![1.0, 2.0], xi: vec![7.0, 8.0], xdot: vec![3.0, 4.0], xidot: vec![5.0, 6.0] });

        let w = TStarEVector { x: vec![], y: vec![1.0, 0.0, 0.0], p: vec![], piv: vec![0.0, 1.0, 0.0] };
        assert_eq!(so3().epsilon_apply(&w).unwrap().xidot, vec![0.0, 0.0, -1.0]);
    }

    #[test]
    fn product_blocks() {
        let p = AlgebroidStructure::product(&[AlgebroidStructure::affine_heis("x2").unwrap(), AlgebroidStructure::tangent(1)]).unwrap();
        assert_eq!((p.m(), p.r()), (3, 4));
        assert_eq!(p.rho_exprs()[2][3], Expr::num(1.0));
        assert_eq!(p.rho_exprs()[1][1], Expr::var("x1"));
        assert!(p.check_axioms_default(32, -1.0, 1.0, 1e-8).unwrap().pass);
        let q = AlgebroidStructure::product(&[AlgebroidStructure::tangent(1), AlgebroidStructure::affine_heis("x2").unwrap()]).unwrap();
        assert_eq!(q.rho_exprs()[2][2], Expr::var("x2"));
        assert!(q.check_axioms_default(32, -1.0, 1.0, 1e-8).unwrap().pass);
    }

    #[test]
    fn halton_in_box() {
        let pts = halton_points(2, 10, -1.0, 1.0);
        assert_eq!(pts.len(), 10);
        assert_eq!(pts[0][0], 0.0);
        assert!((pts[0][1] + 1.0 / 3.0).abs() < 1e-15);
        assert!(pts.iter().flatten().all(|v| (-1.0..=1.0).contains(v)));
    }
}
