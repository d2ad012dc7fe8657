//! Metric, frame metric and field strength built from catalog entries.

use thiserror::Error;

use crate::adiff::{ChartPoint, DomainError, Expr, Jet1, DIM};
use crate::catalog::{Chart, ExprMat, GroupModel, MetricForm, PotentialTable};
use crate::linalg::{self, Mat4};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("singular metric (det = {det:e}) at u = {point:?}")]
    SingularMetric { det: f64, point: [f64; DIM] },
    #[error("invalid eta: {0}")]
    InvalidEta(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Constant frame metric `η_{αβ}` with its inverses.
#[derive(Debug, Clone, PartialEq)]
pub struct Eta {
    cov: Mat4,
    con: Mat4,
    block_con: Option<[[f64; 3]; 3]>,
}

impl Eta {
    pub fn new(cov: Mat4) -> Result<Self, GeometryError> {
        if cov.iter().flatten().any(|x| !x.is_finite()) {
            return Err(GeometryError::InvalidEta("entries must be finite".into()));
        }
        if !linalg::is_symmetric(&cov) {
            return Err(GeometryError::InvalidEta("eta must be symmetric".into()));
        }
        let (det, con) = linalg::det_inverse(&cov);
        let con = con
            .ok_or_else(|| GeometryError::InvalidEta(format!("eta is degenerate (det = {det})")))?;
        let block: [[f64; 3]; 3] = std::array::from_fn(|a| std::array::from_fn(|b| cov[a][b]));
        Ok(Eta {
            cov,
            con,
            block_con: linalg::inverse3(&block),
        })
    }

    pub fn diag(d: [f64; DIM]) -> Result<Self, GeometryError> {
        let mut m = [[0.0; DIM]; DIM];
        for (i, v) in d.iter().enumerate() {
            m[i][i] = *v;
        }
        Eta::new(m)
    }

    /// `diag(1, −1, −1, −1)`.
    pub fn lorentzian() -> Self {
        Eta::diag([1.0, -1.0, -1.0, -1.0]).unwrap()
    }

    /// `diag(1, 1, 1, 1)`.
    pub fn euclidean() -> Self {
        Eta::diag([1.0; DIM]).unwrap()
    }

    /// `η_{αβ}`.
    pub fn cov(&self) -> &Mat4 {
        &self.cov
    }

    /// `η^{αβ}`.
    pub fn con(&self) -> &Mat4 {
        &self.con
    }

    /// Inverse of the upper-left 3×3 block, used by the block metric form.
    pub fn block_con(&self) -> Option<&[[f64; 3]; 3]> {
        self.block_con.as_ref()
    }

    /// Compact label, e.g. `diag(1,-1,-1,-1)` or the full matrix.
    pub fn label(&self) -> String {
        let diagonal = (0..DIM).all(|i| (0..DIM).all(|j| i == j || self.cov[i][j] == 0.0));
        if diagonal {
            let d: Vec<String> = (0..DIM).map(|i| format!("{}", self.cov[i][i])).collect();
            format!("diag({})", d.join(","))
        } else {
            format!("{:?}", self.cov)
        }
    }
}

pub type JetMat = [[Jet1; DIM]; DIM];

pub fn mat_jets(m: &ExprMat, u: &ChartPoint) -> Result<JetMat, DomainError> {
    let mut out = [[Jet1::ZERO; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            out[i][j] = m[i][j].jet(u)?;
        }
    }
    Ok(out)
}

pub fn vec_jets(v: &[Expr; DIM], u: &ChartPoint) -> Result<[Jet1; DIM], DomainError> {
    let mut out = [Jet1::ZERO; DIM];
    for (o, e) in out.iter_mut().zip(v) {
        *o = e.jet(u)?;
    }
    Ok(out)
}

pub fn values(m: &JetMat) -> Mat4 {
    m.map(|row| row.map(|j| j.value))
}

/// `g^{ij}` with its coordinate gradient.
pub fn metric_con_jet(chart: &Chart, eta: &Eta, u: &ChartPoint) -> Result<JetMat, GeometryError> {
    let t = &chart.tetrad;
    let mut e = [[Jet1::ZERO; DIM]; DIM];
    for (a, row) in e.iter_mut().enumerate() {
        for (i, slot) in row.iter_mut().enumerate() {
            *slot = t.con(a, i).jet(u)?;
        }
    }
    let mut g = [[Jet1::ZERO; DIM]; DIM];
    match chart.metric_form {
        MetricForm::Full => {
            let ec = eta.con();
            for i in 0..DIM {
                for j in i..DIM {
                    let mut acc = Jet1::ZERO;
                    for a in 0..DIM {
                        for b in 0..DIM {
                            if ec[a][b] != 0.0 {
                                acc = acc + e[a][i] * e[b][j] * ec[a][b];
                            }
                        }
                    }
                    g[i][j] = acc;
                    g[j][i] = acc;
                }
            }
        }
        MetricForm::Block3 => {
            let ec = eta.block_con().ok_or(GeometryError::InvalidEta(
                "upper-left 3x3 block of eta is degenerate".into(),
            ))?;
            for i in 0..DIM {
                for j in i..DIM {
                    let mut acc = Jet1::constant(if i == 3 && j == 3 { 1.0 } else { 0.0 });
                    for a in 0..3 {
                        for b in 0..3 {
                            if ec[a][b] != 0.0 {
                                acc = acc + e[a][i] * e[b][j] * ec[a][b];
                            }
                        }
                    }
                    g[i][j] = acc;
                    g[j][i] = acc;
                }
            }
        }
    }
    Ok(g)
}

/// Contravariant and covariant metric at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricAt {
    pub g_con: Mat4,
    pub g_cov: Mat4,
}

fn invert(m: Mat4, u: &ChartPoint) -> Result<Mat4, GeometryError> {
    let (det, inv) = linalg::det_inverse(&m);
    inv.ok_or(GeometryError::SingularMetric { det, point: u.0 })
}

pub fn metric_at_chart(
    chart: &Chart,
    eta: &Eta,
    u: &ChartPoint,
) -> Result<MetricAt, GeometryError> {
    let g_con = values(&metric_con_jet(chart, eta, u)?);
    let g_cov = invert(g_con, u)?;
    Ok(MetricAt { g_con, g_cov })
}

pub fn metric_at(group: &GroupModel, u: &ChartPoint) -> Result<MetricAt, GeometryError> {
    metric_at_chart(&group.chart, &group.params.eta, u)
}

/// `𝐆^{αβ} = ξ^α_i ξ^β_j g^{ij}` with gradient.
pub fn frame_metric_con_jet(
    chart: &Chart,
    eta: &Eta,
    u: &ChartPoint,
) -> Result<JetMat, GeometryError> {
    let g = metric_con_jet(chart, eta, u)?;
    let d = mat_jets(&chart.frame.dual, u)?;
    let mut out = [[Jet1::ZERO; DIM]; DIM];
    for a in 0..DIM {
        for b in a..DIM {
            let mut acc = Jet1::ZERO;
            for i in 0..DIM {
                for j in 0..DIM {
                    acc = acc + d[i][a] * d[j][b] * g[i][j];
                }
            }
            out[a][b] = acc;
            out[b][a] = acc;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameMetricAt {
    pub g_con: Mat4,
    pub g_cov: Mat4,
}

pub fn frame_metric_at(group: &GroupModel, u: &ChartPoint) -> Result<FrameMetricAt, GeometryError> {
    let g_con = values(&frame_metric_con_jet(&group.chart, &group.params.eta, u)?);
    let g_cov = invert(g_con, u)?;
    Ok(FrameMetricAt { g_con, g_cov })
}

/// `F_{ij} = A_{j,i} − A_{i,j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FaradayAt {
    pub f: Mat4,
}

pub fn potential_jets(
    table: &PotentialTable,
    alphas: &[f64; DIM],
    u: &ChartPoint,
) -> Result<[Jet1; DIM], DomainError> {
    let mut out = [Jet1::ZERO; DIM];
    for (b, &a) in alphas.iter().enumerate() {
        if a != 0.0 {
            let basis = vec_jets(&table.basis[b], u)?;
            for k in 0..DIM {
                out[k] = out[k] + basis[k] * a;
            }
        }
    }
    Ok(out)
}

pub fn faraday_from_jets(a: &[Jet1; DIM]) -> FaradayAt {
    let mut f = [[0.0; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            f[i][j] = a[j].grad[i] - a[i].grad[j];
        }
    }
    FaradayAt { f }
}

pub fn faraday_at(group: &GroupModel, u: &ChartPoint) -> Result<FaradayAt, DomainError> {
    let a = potential_jets(&group.holonomic.table, &group.params.em_alphas, u)?;
    Ok(faraday_from_jets(&a))
}
