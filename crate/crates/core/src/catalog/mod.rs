//! The group catalog: Killing frames, structure constants, tetrads and
//! potential tables for the fifteen simply transitive G4 variants.
//!
//! Matrix layout follows the source tables: *subscripts number the lines*.
//! So `xi[α][i] = ξ_α^i`, `dual[i][α] = ξ^α_i`, and a printed tetrad pair
//! stores `e^α_i` with rows `i` and `e_α^i` with rows `α` — unless
//! [`orient_tetrad`] decides otherwise for a given entry.

mod groups;

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::adiff::{ChartPoint, DomainError, Expr, DIM};
use crate::checks::{self, Mode};
use crate::geometry::Eta;

pub type ExprVec = [Expr; DIM];
pub type ExprMat = [[Expr; DIM]; DIM];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CatalogError {
    #[error("unknown group id `{0}` (try `g4 list`)")]
    UnknownGroup(String),
    #[error("invalid parameters for {group}: {reason}")]
    InvalidParams { group: GroupId, reason: String },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupId {
    G4_I_cne1,
    G4_I_ceq1,
    G4_II,
    G4_III,
    G4_IV,
    G4_V,
    G4_VI_1,
    G4_VI_2,
    G4_VI_3,
    G4_VI_4_1,
    G4_VI_4_2,
    G4_VII_a,
    G4_VII_b,
    G4_VIII_a,
    G4_VIII_b,
}

impl GroupId {
    pub const ALL: [GroupId; 15] = [
        GroupId::G4_I_cne1,
        GroupId::G4_I_ceq1,
        GroupId::G4_II,
        GroupId::G4_III,
        GroupId::G4_IV,
        GroupId::G4_V,
        GroupId::G4_VI_1,
        GroupId::G4_VI_2,
        GroupId::G4_VI_3,
        GroupId::G4_VI_4_1,
        GroupId::G4_VI_4_2,
        GroupId::G4_VII_a,
        GroupId::G4_VII_b,
        GroupId::G4_VIII_a,
        GroupId::G4_VIII_b,
    ];

    /// Identifier used on the command line and in reports.
    pub fn as_str(self) -> &'static str {
        match self {
            GroupId::G4_I_cne1 => "g4-i-cne1",
            GroupId::G4_I_ceq1 => "g4-i-ceq1",
            GroupId::G4_II => "g4-ii",
            GroupId::G4_III => "g4-iii",
            GroupId::G4_IV => "g4-iv",
            GroupId::G4_V => "g4-v",
            GroupId::G4_VI_1 => "g4-vi-1",
            GroupId::G4_VI_2 => "g4-vi-2",
            GroupId::G4_VI_3 => "g4-vi-3",
            GroupId::G4_VI_4_1 => "g4-vi-4-1",
            GroupId::G4_VI_4_2 => "g4-vi-4-2",
            GroupId::G4_VII_a => "g4-vii-a",
            GroupId::G4_VII_b => "g4-vii-b",
            GroupId::G4_VIII_a => "g4-viii-a",
            GroupId::G4_VIII_b => "g4-viii-b",
        }
    }

    /// Conventional name, e.g. `G4(VI4)1`.
    pub fn title(self) -> &'static str {
        match self {
            GroupId::G4_I_cne1 => "G4(I), c != 1",
            GroupId::G4_I_ceq1 => "G4(I), c = 1",
            GroupId::G4_II => "G4(II)",
            GroupId::G4_III => "G4(III)",
            GroupId::G4_IV => "G4(IV)",
            GroupId::G4_V => "G4(V)",
            GroupId::G4_VI_1 => "G4(VI1)",
            GroupId::G4_VI_2 => "G4(VI2)",
            GroupId::G4_VI_3 => "G4(VI3)",
            GroupId::G4_VI_4_1 => "G4(VI4)1",
            GroupId::G4_VI_4_2 => "G4(VI4)2",
            GroupId::G4_VII_a => "G4(VII), X4 = p4",
            GroupId::G4_VII_b => "G4(VII), X4 = p1 + p4",
            GroupId::G4_VIII_a => "G4(VIII), X4 = p4",
            GroupId::G4_VIII_b => "G4(VIII), X4 = p3 + p4",
        }
    }

    pub fn index(self) -> usize {
        GroupId::ALL.iter().position(|g| *g == self).unwrap()
    }

    pub fn is_abelian_family(self) -> bool {
        matches!(
            self,
            GroupId::G4_VI_1
                | GroupId::G4_VI_2
                | GroupId::G4_VI_3
                | GroupId::G4_VI_4_1
                | GroupId::G4_VI_4_2
        )
    }

    /// Human-readable parameter constraints.
    pub fn constraints(self) -> Vec<&'static str> {
        match self {
            GroupId::G4_I_cne1 => vec!["c != 1"],
            GroupId::G4_III => vec!["sin(alpha-angle) != 0"],
            GroupId::G4_VI_4_1 => vec!["k != eps01"],
            _ => vec![],
        }
        .into_iter()
        .chain(["eps01 in {0, 1}", "eta symmetric, nondegenerate"])
        .collect()
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GroupId {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GroupId::ALL
            .into_iter()
            .find(|g| g.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| CatalogError::UnknownGroup(s.to_string()))
    }
}

impl Serialize for GroupId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// Free constants of the catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupParams {
    /// G4(I) exponent `c` (ε = c − 1).
    pub c: f64,
    /// G4(III) angle α.
    pub alpha_angle: f64,
    pub k: f64,
    pub l: f64,
    /// ε ∈ {0, 1} of the G4(VI) matrices.
    pub eps01: f64,
    /// Potential constants α₁..α₄.
    pub em_alphas: [f64; DIM],
    pub eta: Eta,
}

impl Default for GroupParams {
    fn default() -> Self {
        GroupParams {
            c: 2.0,
            alpha_angle: std::f64::consts::FRAC_PI_3,
            k: 2.0,
            l: 3.0,
            eps01: 1.0,
            em_alphas: [1.0; DIM],
            eta: Eta::lorentzian(),
        }
    }
}

impl GroupParams {
    pub fn validate(&self, group: GroupId) -> Result<(), CatalogError> {
        let bad = |reason: String| Err(CatalogError::InvalidParams { group, reason });
        let finite = [self.c, self.alpha_angle, self.k, self.l, self.eps01]
            .iter()
            .chain(&self.em_alphas)
            .all(|x| x.is_finite());
        if !finite {
            return bad("parameters must be finite".into());
        }
        if self.eps01 != 0.0 && self.eps01 != 1.0 {
            return bad(format!("eps01 must be 0 or 1, got {}", self.eps01));
        }
        match group {
            GroupId::G4_I_cne1 if (self.c - 1.0).abs() < 1e-12 => {
                bad("c = 1 is the separate G4(I) c=1 entry".into())
            }
            GroupId::G4_III if self.alpha_angle.sin().abs() < 1e-6 => {
                bad("sin(alpha-angle) must be nonzero".into())
            }
            GroupId::G4_VI_4_1 if (self.k - self.eps01).abs() < 1e-6 => {
                bad("k must differ from eps01".into())
            }
            _ => Ok(()),
        }
    }
}

/// `C^γ_{αβ}`, stored as `c[γ][α][β]` with 0-based indices.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureConstants {
    pub c: [[[f64; DIM]; DIM]; DIM],
}

impl StructureConstants {
    pub fn zero() -> Self {
        StructureConstants {
            c: [[[0.0; DIM]; DIM]; DIM],
        }
    }

    /// Build from 1-based entries `(γ, α, β, value)`; antisymmetry is filled in.
    pub fn from_entries(entries: &[(usize, usize, usize, f64)]) -> Self {
        let mut out = StructureConstants::zero();
        for &(g, a, b, v) in entries {
            out.c[g - 1][a - 1][b - 1] = v;
            out.c[g - 1][b - 1][a - 1] = -v;
        }
        out
    }

    pub fn get(&self, gamma: usize, alpha: usize, beta: usize) -> f64 {
        self.c[gamma][alpha][beta]
    }

    /// Nonzero entries with `α < β`, 1-based.
    pub fn nonzero(&self) -> Vec<(usize, usize, usize, f64)> {
        let mut out = Vec::new();
        for a in 0..DIM {
            for b in a + 1..DIM {
                for g in 0..DIM {
                    let v = self.c[g][a][b];
                    if v != 0.0 {
                        out.push((g + 1, a + 1, b + 1, v));
                    }
                }
            }
        }
        out
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..DIM).all(|g| (0..DIM).all(|a| (0..DIM).all(|b| self.c[g][a][b] == -self.c[g][b][a])))
    }
}

/// Killing frame `ξ_α^i` (rows α) and its dual `ξ^α_i` (rows i).
#[derive(Debug, Clone)]
pub struct FrameField {
    pub xi: ExprMat,
    pub dual: ExprMat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    /// Stored rows carry the lower index: `e^α_i` rows `i`, `e_α^i` rows `α`.
    SubscriptRows,
    /// Both stored matrices transposed relative to the above.
    SuperscriptRows,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Orientation::SubscriptRows => Orientation::SuperscriptRows,
            Orientation::SuperscriptRows => Orientation::SubscriptRows,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TetradSource {
    Printed,
    /// Printed table with a sign/typo repair (see the group notes).
    Repaired,
    /// Not printed; derived in closed form from the frame.
    Derived,
}

/// A tetrad pair as stored, plus the orientation used to read it.
#[derive(Debug, Clone)]
pub struct Tetrad {
    pub stored_cov: ExprMat,
    pub stored_con: ExprMat,
    pub orientation: Orientation,
    pub source: TetradSource,
}

impl Tetrad {
    pub fn new(stored_cov: ExprMat, stored_con: ExprMat, source: TetradSource) -> Self {
        Tetrad {
            stored_cov,
            stored_con,
            orientation: Orientation::SubscriptRows,
            source,
        }
    }

    pub fn with_orientation(&self, orientation: Orientation) -> Tetrad {
        Tetrad {
            orientation,
            ..self.clone()
        }
    }

    /// `e^α_i`.
    pub fn cov(&self, i: usize, alpha: usize) -> &Expr {
        match self.orientation {
            Orientation::SubscriptRows => &self.stored_cov[i][alpha],
            Orientation::SuperscriptRows => &self.stored_cov[alpha][i],
        }
    }

    /// `e_α^i`.
    pub fn con(&self, alpha: usize, i: usize) -> &Expr {
        match self.orientation {
            Orientation::SubscriptRows => &self.stored_con[alpha][i],
            Orientation::SuperscriptRows => &self.stored_con[i][alpha],
        }
    }

    /// The left-invariant potential basis: `basis[β][i] = e^β_i`.
    pub fn potential_table(&self) -> PotentialTable {
        PotentialTable {
            basis: std::array::from_fn(|b| std::array::from_fn(|i| self.cov(i, b).clone())),
        }
    }
}

/// How the contravariant metric is assembled from the tetrad.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricForm {
    /// `g^{ij} = η^{αβ} e_α^i e_β^j` over all four frame indices.
    Full,
    /// `g^{ij} = δ₄^i δ₄^j + η^{ab} e_a^i e_b^j` with `a, b ≤ 3`.
    Block3,
}

/// Coordinates, Killing frame and tetrad that belong together.
#[derive(Debug, Clone)]
pub struct Chart {
    pub name: &'static str,
    pub frame: FrameField,
    pub tetrad: Tetrad,
    pub metric_form: MetricForm,
}

/// A potential that is linear in α₁..α₄, stored by basis vector:
/// `basis[β][k]` is component `k` for `α = e_β`.
#[derive(Debug, Clone)]
pub struct PotentialTable {
    pub basis: [ExprVec; DIM],
}

impl PotentialTable {
    /// Tabulate a linear formula by feeding it the unit constants.
    pub fn from_linear(f: impl Fn(&[Expr; DIM]) -> ExprVec) -> Self {
        PotentialTable {
            basis: std::array::from_fn(|b| {
                let unit: [Expr; DIM] =
                    std::array::from_fn(|k| Expr::constant(if k == b { 1.0 } else { 0.0 }));
                f(&unit)
            }),
        }
    }

    pub fn zero() -> Self {
        PotentialTable {
            basis: std::array::from_fn(|_| std::array::from_fn(|_| Expr::zero())),
        }
    }

    /// Components for the given constants, as fields.
    pub fn combine(&self, alphas: &[f64; DIM]) -> ExprVec {
        std::array::from_fn(|k| {
            (0..DIM).fold(Expr::zero(), |acc, b| acc + alphas[b] * &self.basis[b][k])
        })
    }

    pub fn eval(&self, alphas: &[f64; DIM], u: &ChartPoint) -> Result<[f64; DIM], DomainError> {
        let mut out = [0.0; DIM];
        for (k, o) in out.iter_mut().enumerate() {
            for b in 0..DIM {
                if alphas[b] != 0.0 {
                    *o += alphas[b] * self.basis[b][k].eval(u)?;
                }
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        PotentialTable {
            basis: self.basis.clone().map(|row| row.map(|e| factor * e)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChartSel {
    Primary,
    Companion,
}

/// A printed holonomic table `A_i` and the chart in which it is meant.
#[derive(Debug, Clone)]
pub struct HolonomicTable {
    pub table: PotentialTable,
    pub chart: ChartSel,
    /// Asserted tables must satisfy the admissibility condition; report-mode
    /// tables are audited and surfaced.
    pub mode: Mode,
}

/// Per-coordinate closed sampling intervals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleDomain {
    pub bounds: [(f64, f64); DIM],
    pub excluded: Option<&'static str>,
}

impl SampleDomain {
    pub fn cube(half_width: f64) -> Self {
        SampleDomain {
            bounds: [(-half_width, half_width); DIM],
            excluded: None,
        }
    }

    pub fn contains(&self, u: &ChartPoint) -> bool {
        u.0.iter()
            .zip(&self.bounds)
            .all(|(x, (lo, hi))| *lo <= *x && *x <= *hi)
    }
}

/// Printed material that the catalog does not use directly but still audits.
#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum Erratum {
    /// A printed dual frame that is not the inverse of the Killing frame.
    Dual { dual: ExprMat, note: &'static str },
    /// Printed structure constants that the frame does not close on.
    Structure {
        constants: StructureConstants,
        note: &'static str,
    },
    /// A printed tetrad pair replaced by a repaired one.
    Tetrad { tetrad: Tetrad, note: &'static str },
    /// The printed holonomic table evaluated in a chart where it does not belong.
    Holonomic { chart: ChartSel, note: &'static str },
}

impl Erratum {
    pub fn note(&self) -> &'static str {
        match self {
            Erratum::Dual { note, .. }
            | Erratum::Structure { note, .. }
            | Erratum::Tetrad { note, .. }
            | Erratum::Holonomic { note, .. } => note,
        }
    }
}

/// One fully populated catalog entry.
#[derive(Debug, Clone)]
pub struct GroupModel {
    pub id: GroupId,
    pub params: GroupParams,
    pub constants: StructureConstants,
    pub chart: Chart,
    /// A second chart carrying the same algebra, when a printed table only
    /// makes sense there.
    pub companion: Option<Chart>,
    pub holonomic: HolonomicTable,
    /// Printed frame components `𝐀_α`, when the source gives them.
    pub frame_table: Option<PotentialTable>,
    pub domain: SampleDomain,
    pub errata: Vec<Erratum>,
    pub notes: Vec<String>,
    pub orientation: OrientationDecision,
}

impl GroupModel {
    pub fn chart(&self, sel: ChartSel) -> &Chart {
        match sel {
            ChartSel::Primary => &self.chart,
            ChartSel::Companion => self.companion.as_ref().unwrap_or(&self.chart),
        }
    }

    /// Chart in which the printed holonomic table is meant.
    pub fn holonomic_chart(&self) -> &Chart {
        self.chart(self.holonomic.chart)
    }
}

/// Build a catalog entry, resolving the tetrad orientation.
pub fn get_group(id: GroupId, params: &GroupParams) -> Result<GroupModel, CatalogError> {
    params.validate(id)?;
    let mut model = groups::build(id, params);
    let decision = match orient_tetrad(&model) {
        Ok(d) => d,
        Err(OrientationError::Ambiguous(mut d)) => {
            d.note = format!("{}; falling back to subscript rows", d.note);
            d
        }
        Err(OrientationError::Failed(mut d)) => {
            d.note = format!("{}; entry flagged, keeping subscript rows", d.note);
            d
        }
    };
    model.chart.tetrad.orientation = decision.orientation;
    model.orientation = decision;
    Ok(model)
}

/// Every entry with its default parameters.
pub fn all_groups(params: &GroupParams) -> Result<Vec<GroupModel>, CatalogError> {
    GroupId::ALL
        .iter()
        .map(|&id| get_group(id, params))
        .collect()
}

/// Deterministic uniform samples from `dom`.
pub fn sample_points(dom: &SampleDomain, n: usize, seed: u64) -> Vec<ChartPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            ChartPoint(std::array::from_fn(|k| {
                rng.random_range(dom.bounds[k].0..=dom.bounds[k].1)
            }))
        })
        .collect()
}

/// Printed holonomic potential `A_i` at `u` for the model's constants.
pub fn potential(group: &GroupModel, u: &ChartPoint) -> Result<[f64; DIM], DomainError> {
    group.holonomic.table.eval(&group.params.em_alphas, u)
}

/// Left-invariant potential `α_β e^β_i` at `u`.
pub fn potential_from_tetrad(
    group: &GroupModel,
    u: &ChartPoint,
) -> Result<[f64; DIM], DomainError> {
    group
        .chart
        .tetrad
        .potential_table()
        .eval(&group.params.em_alphas, u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecidedBy {
    Duality,
    HolonomicTable,
    Admissibility,
    Fallback,
}

/// Evidence for the orientation choice: index 0 is subscript rows, 1 the transpose.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrientationDecision {
    pub orientation: Orientation,
    pub decided_by: DecidedBy,
    pub duality: [f64; 2],
    pub holonomic: Option<[f64; 2]>,
    pub admissibility: [f64; 2],
    pub note: String,
}

impl OrientationDecision {
    fn placeholder() -> Self {
        OrientationDecision {
            orientation: Orientation::SubscriptRows,
            decided_by: DecidedBy::Fallback,
            duality: [0.0; 2],
            holonomic: None,
            admissibility: [0.0; 2],
            note: String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrientationError {
    #[error("tetrad orientation ambiguous: {}", .0.note)]
    Ambiguous(OrientationDecision),
    #[error("no tetrad orientation is consistent: {}", .0.note)]
    Failed(OrientationDecision),
}

const ORIENT_SEED: u64 = 0x0e1e_7a2d;
const ORIENT_POINTS: usize = 32;
const ORIENT_TOL: f64 = 1e-9;

/// Decide whether the stored tetrad rows carry the lower or the upper index.
///
/// Duality is tried first, then basis-wise agreement of `α_β e^β_i` with the
/// printed holonomic table, then the admissibility of the resulting
/// left-invariant potential. An undecidable case is reported as ambiguous.
pub fn orient_tetrad(group: &GroupModel) -> Result<OrientationDecision, OrientationError> {
    let points = sample_points(&group.domain, ORIENT_POINTS, ORIENT_SEED);
    let chart = &group.chart;
    let candidates = [Orientation::SubscriptRows, Orientation::SuperscriptRows];
    let tetrads = candidates.map(|o| chart.tetrad.with_orientation(o));

    let duality = tetrads
        .clone()
        .map(|t| checks::tetrad_duality_residual(&t, &points).unwrap_or(f64::INFINITY));
    let holonomic = (group.holonomic.chart == ChartSel::Primary).then(|| {
        tetrads.clone().map(|t| {
            checks::table_distance(&t.potential_table(), &group.holonomic.table, &points)
                .unwrap_or(f64::INFINITY)
        })
    });
    let admissibility = tetrads.clone().map(|t| {
        checks::admissibility_residuals(&chart.frame.xi, &t.potential_table(), &points)
            .map(|r| r.into_iter().fold(0.0, f64::max))
            .unwrap_or(f64::INFINITY)
    });

    let ok = |r: f64| r <= ORIENT_TOL;
    let mut decision = OrientationDecision {
        orientation: Orientation::SubscriptRows,
        decided_by: DecidedBy::Fallback,
        duality,
        holonomic,
        admissibility,
        note: String::new(),
    };
    let fmt_pair = |r: [f64; 2]| format!("[{:.3e}, {:.3e}]", r[0], r[1]);

    if !ok(duality[0]) && !ok(duality[1]) {
        decision.note = format!("duality fails in both orientations {}", fmt_pair(duality));
        return Err(OrientationError::Failed(decision));
    }
    let tiers: [(DecidedBy, [f64; 2]); 3] = [
        (DecidedBy::Duality, duality),
        (
            DecidedBy::HolonomicTable,
            holonomic.unwrap_or([f64::INFINITY; 2]),
        ),
        (DecidedBy::Admissibility, admissibility),
    ];
    for (by, r) in tiers {
        if ok(r[0]) != ok(r[1]) {
            decision.orientation = if ok(r[0]) {
                candidates[0]
            } else {
                candidates[1]
            };
            decision.decided_by = by;
            decision.note = format!(
                "{:?} selected by {:?} (duality {}, admissibility {})",
                decision.orientation,
                by,
                fmt_pair(duality),
                fmt_pair(admissibility)
            );
            return Ok(decision);
        }
    }
    decision.note = format!(
        "orientations indistinguishable (duality {}, admissibility {})",
        fmt_pair(duality),
        fmt_pair(admissibility)
    );
    Err(OrientationError::Ambiguous(decision))
}

#[cfg(test)]
mod tests;
