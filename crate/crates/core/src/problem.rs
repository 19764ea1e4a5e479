//! JSON problem files.

use serde::Deserialize;

use crate::algebroid::AlgebroidStructure;
use crate::error::{Error, Result};
use crate::expr::{parse, Expr};
use crate::mechanics::{AdmissiblePath, BoundaryCondition, Lagrangian, DEFAULT_MAX_ORDER};
use crate::solver::{BoundaryValue, CollocationProblem, Endpoint, SolverOptions};

/// An expression given either as a string or as a number.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ExprSrc {
    Num(f64),
    Str(String),
}

impl ExprSrc {
    pub fn to_expr(&self) -> Result<Expr> {
        match self {
            ExprSrc::Num(v) => Ok(Expr::num(*v)),
            ExprSrc::Str(s) => Ok(parse(s)?),
        }
    }

    fn as_string(&self) -> String {
        match self {
            ExprSrc::Num(v) => format!("{v:?}"),
            ExprSrc::Str(s) => s.clone(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AlgebroidSpec {
    Tangent {
        n: usize,
    },
    Lie {
        #[serde(default)]
        name: Option<String>,
        #[serde(default)]
        c: Option<Vec<Vec<Vec<f64>>>>,
    },
    Product {
        factors: Vec<AlgebroidSpec>,
    },
    AffineHeis {
        g: ExprSrc,
    },
    Custom {
        m: usize,
        r: usize,
        rho: Vec<Vec<ExprSrc>>,
        c: Vec<Vec<Vec<ExprSrc>>>,
        #[serde(default)]
        label: Option<String>,
    },
}

impl AlgebroidSpec {
    pub fn build(&self) -> Result<AlgebroidStructure> {
        match self {
            AlgebroidSpec::Tangent { n } => Ok(AlgebroidStructure::tangent(*n)),
            AlgebroidSpec::Lie { name: Some(n), c: None } => AlgebroidStructure::lie_preset(n),
            AlgebroidSpec::Lie { name, c: Some(c) } => AlgebroidStructure::lie(c, name.as_deref().unwrap_or("lie")),
            AlgebroidSpec::Lie { name: None, c: None } => Err(Error::Schema("lie algebroid needs `name` or `c`".into())),
            AlgebroidSpec::Product { factors } => {
                let f = factors.iter().map(|s| s.build()).collect::<Result<Vec<_>>>()?;
                AlgebroidStructure::product(&f)
            }
            AlgebroidSpec::AffineHeis { g } => AlgebroidStructure::affine_heis(&g.as_string()),
            AlgebroidSpec::Custom { m, r, rho, c, label } => {
                let rho: Vec<Vec<String>> = rho.iter().map(|row| row.iter().map(|e| e.as_string()).collect()).collect();
                let c: Vec<Vec<Vec<String>>> = c.iter().map(|a| a.iter().map(|row| row.iter().map(|e| e.as_string()).collect()).collect()).collect();
                let rs: Vec<Vec<&str>> = rho.iter().map(|r| r.iter().map(|s| s.as_str()).collect()).collect();
                let cs: Vec<Vec<Vec<&str>>> = c.iter().map(|a| a.iter().map(|r| r.iter().map(|s| s.as_str()).collect()).collect()).collect();
                AlgebroidStructure::from_strings(*m, *r, &rs, &cs, label.as_deref().unwrap_or("custom"))
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSpec {
    pub y: Vec<ExprSrc>,
    #[serde(default)]
    pub x0: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum EndpointSpec {
    Start,
    End,
}

impl From<EndpointSpec> for Endpoint {
    fn from(e: EndpointSpec) -> Self {
        match e {
            EndpointSpec::Start => Endpoint::Start,
            EndpointSpec::End => Endpoint::End,
        }
    }
}

/// `y{component}^({order})(endpoint) = value`; `component` is 1-based.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValueSpec {
    pub at: EndpointSpec,
    pub component: usize,
    #[serde(default)]
    pub order: usize,
    pub value: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpanPairSpec {
    pub start: Vec<Vec<f64>>,
    pub end: Vec<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    #[default]
    Fixed,
    Free,
    Spanned,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpec {
    #[serde(default)]
    pub kind: BoundaryKind,
    #[serde(default)]
    pub pairs: Vec<SpanPairSpec>,
    #[serde(default)]
    pub values: Vec<ValueSpec>,
    #[serde(default)]
    pub free_momentum: Vec<EndpointSpec>,
    #[serde(default)]
    pub base_target: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default)]
    pub degree: Option<usize>,
    #[serde(default)]
    pub nodes: Option<usize>,
    #[serde(default)]
    pub penalty: Option<f64>,
    #[serde(default)]
    pub max_iter: Option<usize>,
    #[serde(default)]
    pub external: Option<Vec<ExprSrc>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub algebroid: AlgebroidSpec,
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default)]
    pub max_order: Option<usize>,
    #[serde(default)]
    pub lagrangian: Option<ExprSrc>,
    #[serde(default)]
    pub path: Option<PathSpec>,
    #[serde(default = "default_interval")]
    pub interval: [f64; 2],
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub boundary: BoundarySpec,
    #[serde(default)]
    pub solver: SolverSpec,
}

fn default_order() -> usize {
    1
}

fn default_interval() -> [f64; 2] {
    [0.0, 1.0]
}

fn default_samples() -> usize {
    11
}

fn default_steps() -> usize {
    200
}

impl ProblemFile {
    pub fn from_json(src: &str) -> Result<Self> {
        serde_json::from_str(src).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn algebroid(&self) -> Result<AlgebroidStructure> {
        self.algebroid.build()
    }

    pub fn lagrangian(&self, a: &AlgebroidStructure) -> Result<Lagrangian> {
        let l = self.lagrangian.as_ref().ok_or_else(|| Error::Schema("missing `lagrangian`".into()))?;
        Lagrangian::with_max_order(l.to_expr()?, a.m(), a.r(), self.order, self.max_order.unwrap_or(DEFAULT_MAX_ORDER))
    }

    pub fn path(&self, a: &AlgebroidStructure) -> Result<AdmissiblePath> {
        let p = self.path.as_ref().ok_or_else(|| Error::Schema("missing `path`".into()))?;
        let y = p.y.iter().map(|e| e.to_expr()).collect::<Result<Vec<_>>>()?;
        AdmissiblePath::from_exprs(a, &y, &p.x0, (self.interval[0], self.interval[1]), self.steps)
    }

    /// `samples` equally spaced times covering the interval.
    pub fn sample_times(&self) -> Vec<f64> {
        let [t0, t1] = self.interval;
        match self.samples {
            0 => Vec::new(),
            1 => vec![t0],
            n => (0..n).map(|i| if i == n - 1 { t1 } else { t0 + (t1 - t0) * i as f64 / (n - 1) as f64 }).collect(),
        }
    }

    pub fn boundary_condition(&self, a: &AlgebroidStructure) -> Result<BoundaryCondition> {
        let b = &self.boundary;
        Ok(match b.kind {
            BoundaryKind::Fixed => BoundaryCondition::Fixed,
            BoundaryKind::Free => BoundaryCondition::Free,
            BoundaryKind::Spanned => {
                let k = self.order;
                let ok = |v: &Vec<Vec<f64>>| v.len() == a.r() && v.iter().all(|row| row.len() == k);
                if b.pairs.iter().any(|p| !ok(&p.start) || !ok(&p.end)) {
                    return Err(Error::Schema(format!("spanning pairs must be {} × {k} jets", a.r())));
                }
                BoundaryCondition::Spanned(b.pairs.iter().map(|p| (p.start.clone(), p.end.clone())).collect())
            }
        })
    }

    pub fn collocation(&self, a: &AlgebroidStructure) -> Result<CollocationProblem> {
        let l = self.lagrangian(a)?;
        let x0 = self.path.as_ref().map(|p| p.x0.clone()).unwrap_or_else(|| vec![0.0; a.m()]);
        let degree = self.solver.degree.unwrap_or((2 * self.order - 1).max(2));
        let mut p = CollocationProblem::new(a.clone(), l, (self.interval[0], self.interval[1]), x0, degree);
        if let Some(n) = self.solver.nodes {
            p.nodes = n;
        }
        let mut options = SolverOptions { steps: self.steps, ..SolverOptions::default() };
        if let Some(v) = self.solver.penalty {
            options.penalty = v;
        }
        if let Some(v) = self.solver.max_iter {
            options.max_iter = v;
        }
        p.options = options;
        for v in &self.boundary.values {
            if v.component == 0 {
                return Err(Error::Schema("boundary components are 1-based".into()));
            }
            p.boundary.push(BoundaryValue { endpoint: v.at.into(), component: v.component - 1, order: v.order, value: v.value });
        }
        p.free_momentum = self.boundary.free_momentum.iter().map(|e| (*e).into()).collect();
        p.base_target = self.boundary.base_target.clone();
        if let Some(ext) = &self.solver.external {
            p.external = Some(ext.iter().map(|e| e.to_expr()).collect::<Result<_>>()?);
        }
        Ok(p)
    }
}
