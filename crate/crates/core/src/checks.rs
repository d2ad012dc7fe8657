//! Residual computations for every identity the catalog is supposed to
//! satisfy, and the [`CheckResult`] record they are reported in.
//!
//! Residuals are maxima over free indices and sample points of
//! `|lhs − rhs| / (1 + Σ|terms|)`, so exponentially large entries do not
//! swamp the comparison.

use serde::Serialize;

use crate::adiff::{finite_diff_gradient, ChartPoint, DomainError, Expr, Jet1, DIM};
use crate::catalog::{
    Chart, ExprMat, FrameField, GroupId, GroupModel, PotentialTable, StructureConstants, Tetrad,
};
use crate::geometry::{self, Eta, GeometryError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Failure makes the run fail.
    Asserted,
    /// Audit of printed material; failure is flagged, never fatal.
    Report,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Flag,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub group: GroupId,
    pub label: String,
    pub mode: Mode,
    pub n_points: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub notes: Vec<String>,
}

impl CheckResult {
    pub fn new(
        check: &str,
        group: GroupId,
        label: impl Into<String>,
        mode: Mode,
        n_points: usize,
        max_residual: f64,
        tolerance: f64,
    ) -> Self {
        CheckResult {
            check: check.to_string(),
            group,
            label: label.into(),
            mode,
            n_points,
            max_residual,
            tolerance,
            // NaN never passes
            passed: max_residual <= tolerance,
            notes: Vec::new(),
        }
    }

    /// Build from a fallible residual; evaluation errors fail the check.
    pub fn from_result<E: std::fmt::Display>(
        check: &str,
        group: GroupId,
        label: impl Into<String>,
        mode: Mode,
        n_points: usize,
        residual: Result<f64, E>,
        tolerance: f64,
    ) -> Self {
        match residual {
            Ok(r) => CheckResult::new(check, group, label, mode, n_points, r, tolerance),
            Err(e) => CheckResult::new(
                check,
                group,
                label,
                mode,
                n_points,
                f64::INFINITY,
                tolerance,
            )
            .with_note(format!("evaluation error: {e}")),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn status(&self) -> Status {
        match (self.passed, self.mode) {
            (true, _) => Status::Pass,
            (false, Mode::Asserted) => Status::Fail,
            (false, Mode::Report) => Status::Flag,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToleranceConfig {
    /// Algebraic identities.
    pub tol_exact: f64,
    /// Identities involving derivatives.
    pub tol_deriv: f64,
    /// Agreement with finite differences.
    pub fd_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            tol_exact: 1e-12,
            tol_deriv: 1e-9,
            fd_tol: 1e-6,
        }
    }
}

impl ToleranceConfig {
    pub fn is_valid(&self) -> bool {
        [self.tol_exact, self.tol_deriv, self.fd_tol]
            .iter()
            .all(|t| t.is_finite() && *t > 0.0)
    }
}

/// Finite-difference step used by the oracle comparison.
pub const FD_STEP: f64 = 1e-5;

fn scaled(residual: f64, terms: f64) -> f64 {
    residual.abs() / (1.0 + terms)
}

fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// `max |ξ_α^i ξ^β_i − δ_α^β|`.
pub fn duality_residual(frame: &FrameField, points: &[ChartPoint]) -> Result<f64, DomainError> {
    let mut worst = 0.0f64;
    for u in points {
        let x = geometry::mat_jets(&frame.xi, u)?;
        let d = geometry::mat_jets(&frame.dual, u)?;
        for a in 0..DIM {
            for b in 0..DIM {
                let (mut s, mut t) = (0.0, 0.0);
                for i in 0..DIM {
                    let p = x[a][i].value * d[i][b].value;
                    s += p;
                    t += p.abs();
                }
                worst = worst.max(scaled(s - delta(a, b), t));
            }
        }
    }
    Ok(worst)
}

/// `max |e^α_i e_β^i − δ^α_β|` in the tetrad's current orientation.
pub fn tetrad_duality_residual(tetrad: &Tetrad, points: &[ChartPoint]) -> Result<f64, DomainError> {
    let mut worst = 0.0f64;
    for u in points {
        let mut cov = [[0.0; DIM]; DIM];
        let mut con = [[0.0; DIM]; DIM];
        for i in 0..DIM {
            for a in 0..DIM {
                cov[i][a] = tetrad.cov(i, a).eval(u)?;
                con[a][i] = tetrad.con(a, i).eval(u)?;
            }
        }
        for a in 0..DIM {
            for b in 0..DIM {
                let (mut s, mut t) = (0.0, 0.0);
                for i in 0..DIM {
                    let p = cov[i][a] * con[b][i];
                    s += p;
                    t += p.abs();
                }
                worst = worst.max(scaled(s - delta(a, b), t));
            }
        }
    }
    Ok(worst)
}

/// Jacobi identity over all index combinations (exact arithmetic on the table).
pub fn jacobi_residual(c: &StructureConstants) -> f64 {
    let mut worst = 0.0f64;
    for a in 0..DIM {
        for b in 0..DIM {
            for g in 0..DIM {
                for n in 0..DIM {
                    let mut s = 0.0;
                    for m in 0..DIM {
                        s += c.get(m, a, b) * c.get(n, m, g)
                            + c.get(m, b, g) * c.get(n, m, a)
                            + c.get(m, g, a) * c.get(n, m, b);
                    }
                    worst = worst.max(s.abs());
                }
            }
        }
    }
    worst
}

/// Outcome of the bracket comparison for both candidate signs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LieClosure {
    pub residual_plus: f64,
    pub residual_minus: f64,
}

impl LieClosure {
    /// The sign with the smaller residual, and that residual.
    pub fn best(&self) -> (i8, f64) {
        if self.residual_plus <= self.residual_minus {
            (1, self.residual_plus)
        } else {
            (-1, self.residual_minus)
        }
    }
}

/// Compare `[ξ_α, ξ_β]^i` with `± C^γ_{αβ} ξ_γ^i`.
pub fn lie_closure(
    xi: &ExprMat,
    c: &StructureConstants,
    points: &[ChartPoint],
) -> Result<LieClosure, DomainError> {
    let mut out = LieClosure {
        residual_plus: 0.0,
        residual_minus: 0.0,
    };
    for u in points {
        let x = geometry::mat_jets(xi, u)?;
        for a in 0..DIM {
            for b in 0..DIM {
                for i in 0..DIM {
                    let (mut br, mut t) = (0.0, 0.0);
                    for j in 0..DIM {
                        let p = x[a][j].value * x[b][i].grad[j];
                        let q = x[b][j].value * x[a][i].grad[j];
                        br += p - q;
                        t += p.abs() + q.abs();
                    }
                    let mut rhs = 0.0;
                    for g in 0..DIM {
                        let r = c.get(g, a, b) * x[g][i].value;
                        rhs += r;
                        t += r.abs();
                    }
                    out.residual_plus = out.residual_plus.max(scaled(br - rhs, t));
                    out.residual_minus = out.residual_minus.max(scaled(br + rhs, t));
                }
            }
        }
    }
    Ok(out)
}

/// Killing equations in contravariant form:
/// `g^{il} ξ_α^j,_l + g^{jl} ξ_α^i,_l − g^{ij},_l ξ_α^l = 0`.
pub fn killing_residual(
    chart: &Chart,
    eta: &Eta,
    points: &[ChartPoint],
) -> Result<f64, GeometryError> {
    let mut worst = 0.0f64;
    for u in points {
        let g = geometry::metric_con_jet(chart, eta, u)?;
        let x = geometry::mat_jets(&chart.frame.xi, u)?;
        for a in 0..DIM {
            for i in 0..DIM {
                for j in i..DIM {
                    let (mut s, mut t) = (0.0, 0.0);
                    for l in 0..DIM {
                        let terms = [
                            g[i][l].value * x[a][j].grad[l],
                            g[j][l].value * x[a][i].grad[l],
                            -g[i][j].grad[l] * x[a][l].value,
                        ];
                        for v in terms {
                            s += v;
                            t += v.abs();
                        }
                    }
                    worst = worst.max(scaled(s, t));
                }
            }
        }
    }
    Ok(worst)
}

/// Frame form: `ξ_γ(𝐆^{αβ}) = s (𝐆^{ατ} C^β_{τγ} + 𝐆^{βτ} C^α_{τγ})`.
pub fn frame_killing_residual(
    chart: &Chart,
    eta: &Eta,
    c: &StructureConstants,
    sign: f64,
    points: &[ChartPoint],
) -> Result<f64, GeometryError> {
    let mut worst = 0.0f64;
    for u in points {
        let gm = geometry::frame_metric_con_jet(chart, eta, u)?;
        let x = geometry::mat_jets(&chart.frame.xi, u)?;
        for g in 0..DIM {
            let dir = x[g].map(|j| j.value);
            for a in 0..DIM {
                for b in a..DIM {
                    let lhs = gm[a][b].directional(&dir);
                    let mut t = gm[a][b]
                        .grad
                        .iter()
                        .zip(&dir)
                        .map(|(p, q)| (p * q).abs())
                        .sum::<f64>();
                    let mut rhs = 0.0;
                    for tau in 0..DIM {
                        let r1 = gm[a][tau].value * c.get(b, tau, g);
                        let r2 = gm[b][tau].value * c.get(a, tau, g);
                        rhs += r1 + r2;
                        t += r1.abs() + r2.abs();
                    }
                    worst = worst.max(scaled(lhs - sign * rhs, t));
                }
            }
        }
    }
    Ok(worst)
}

/// Invariance of each basis potential under the frame:
/// `(ξ_α^j A_j),_i − ξ_α^j F_{ij}`, i.e. `ξ_α^j,_i A_j + ξ_α^j A_i,_j`.
/// Returns the residual per basis vector of the constants.
pub fn admissibility_residuals(
    xi: &ExprMat,
    table: &PotentialTable,
    points: &[ChartPoint],
) -> Result<[f64; DIM], DomainError> {
    let mut worst = [0.0f64; DIM];
    for u in points {
        let x = geometry::mat_jets(xi, u)?;
        for (bi, basis) in table.basis.iter().enumerate() {
            let a = geometry::vec_jets(basis, u)?;
            worst[bi] = worst[bi].max(admissibility_at(&x, &a));
        }
    }
    Ok(worst)
}

fn admissibility_at(x: &geometry::JetMat, a: &[Jet1; DIM]) -> f64 {
    let mut worst = 0.0f64;
    for al in 0..DIM {
        for i in 0..DIM {
            // lhs = Σ_j (∂_i ξ^j A_j + ξ^j ∂_i A_j), rhs = Σ_j ξ^j (∂_i A_j − ∂_j A_i)
            let (mut lhs, mut rhs, mut t) = (0.0, 0.0, 0.0);
            for j in 0..DIM {
                let l1 = x[al][j].grad[i] * a[j].value;
                let l2 = x[al][j].value * a[j].grad[i];
                let r1 = x[al][j].value * a[i].grad[j];
                lhs += l1 + l2;
                rhs += l2 - r1;
                t += l1.abs() + l2.abs() + r1.abs();
            }
            worst = worst.max(scaled(lhs - rhs, t));
        }
    }
    worst
}

/// Frame potential of a holonomic table: `𝐀_α = ξ_α^i A_i`, per basis vector.
pub fn frame_components(frame: &FrameField, table: &PotentialTable) -> PotentialTable {
    PotentialTable {
        basis: std::array::from_fn(|b| {
            std::array::from_fn(|a| {
                (0..DIM).fold(Expr::zero(), |acc, i| {
                    acc + &frame.xi[a][i] * &table.basis[b][i]
                })
            })
        }),
    }
}

/// Frame defining equations `ξ_β(𝐀_α) = s C^γ_{βα} 𝐀_γ`.
/// Returns `residual[basis][α]`, maximised over β and points.
pub fn frame_defining_residuals(
    xi: &ExprMat,
    c: &StructureConstants,
    sign: f64,
    frame_table: &PotentialTable,
    points: &[ChartPoint],
) -> Result<[[f64; DIM]; DIM], DomainError> {
    let mut worst = [[0.0f64; DIM]; DIM];
    for u in points {
        let x = geometry::mat_jets(xi, u)?;
        for (bi, basis) in frame_table.basis.iter().enumerate() {
            let fa = geometry::vec_jets(basis, u)?;
            for al in 0..DIM {
                for be in 0..DIM {
                    let dir = x[be].map(|j| j.value);
                    let lhs = fa[al].directional(&dir);
                    let mut t: f64 = fa[al]
                        .grad
                        .iter()
                        .zip(&dir)
                        .map(|(p, q)| (p * q).abs())
                        .sum();
                    let mut rhs = 0.0;
                    for g in 0..DIM {
                        let r = c.get(g, be, al) * fa[g].value;
                        rhs += r;
                        t += r.abs();
                    }
                    worst[bi][al] = worst[bi][al].max(scaled(lhs - sign * rhs, t));
                }
            }
        }
    }
    Ok(worst)
}

/// `A_i − ξ^α_i 𝐀_α` per basis vector and component `i`.
pub fn frame_holonomic_residuals(
    frame: &FrameField,
    frame_table: &PotentialTable,
    holo: &PotentialTable,
    points: &[ChartPoint],
) -> Result<[[f64; DIM]; DIM], DomainError> {
    let mut worst = [[0.0f64; DIM]; DIM];
    for u in points {
        let d = geometry::mat_jets(&frame.dual, u)?;
        for b in 0..DIM {
            let fa = geometry::vec_jets(&frame_table.basis[b], u)?;
            let ha = geometry::vec_jets(&holo.basis[b], u)?;
            for i in 0..DIM {
                let (mut s, mut t) = (ha[i].value, ha[i].value.abs());
                for a in 0..DIM {
                    let p = d[i][a].value * fa[a].value;
                    s -= p;
                    t += p.abs();
                }
                worst[b][i] = worst[b][i].max(scaled(s, t));
            }
        }
    }
    Ok(worst)
}

/// Basis-wise distance between two potential tables.
pub fn table_distance(
    a: &PotentialTable,
    b: &PotentialTable,
    points: &[ChartPoint],
) -> Result<f64, DomainError> {
    let mut worst = 0.0f64;
    for u in points {
        for k in 0..DIM {
            for i in 0..DIM {
                let x = a.basis[k][i].eval(u)?;
                let y = b.basis[k][i].eval(u)?;
                worst = worst.max(scaled(x - y, x.abs() + y.abs()));
            }
        }
    }
    Ok(worst)
}

/// `max |F_{ij}|` for each basis vector and for the combined constants.
pub fn field_strength_residual(
    table: &PotentialTable,
    alphas: &[f64; DIM],
    points: &[ChartPoint],
) -> Result<f64, DomainError> {
    let mut configs: Vec<[f64; DIM]> = (0..DIM)
        .map(|b| std::array::from_fn(|k| delta(k, b)))
        .collect();
    configs.push(*alphas);
    let mut worst = 0.0f64;
    for u in points {
        for cfg in &configs {
            let a = geometry::potential_jets(table, cfg, u)?;
            for i in 0..DIM {
                for j in 0..DIM {
                    let (p, q) = (a[j].grad[i], a[i].grad[j]);
                    worst = worst.max(scaled(p - q, p.abs() + q.abs()));
                }
            }
        }
    }
    Ok(worst)
}

/// Worst mixed discrepancy `|g_ad − g_fd| / (1 + |g_fd|)` between the
/// exact gradient of `ad` and the central difference of `fd`.
///
/// Passing the same field twice is the oracle check proper; passing a
/// perturbed field as `fd` is its negative control.
pub fn gradient_discrepancy(
    ad: &Expr,
    fd: &Expr,
    points: &[ChartPoint],
) -> Result<f64, DomainError> {
    let mut worst = 0.0f64;
    for u in points {
        let exact = ad.jet(u)?.grad;
        let approx = finite_diff_gradient(fd, u, FD_STEP)?;
        for (x, y) in exact.iter().zip(&approx) {
            worst = worst.max((x - y).abs() / (1.0 + y.abs()));
        }
    }
    Ok(worst)
}

/// Every field of the entry whose gradient the other checks rely on.
pub fn differentiated_fields(group: &GroupModel) -> Vec<&Expr> {
    let mut out = Vec::new();
    let charts = std::iter::once(&group.chart).chain(group.companion.as_ref());
    for chart in charts {
        out.extend(chart.frame.xi.iter().flatten());
        out.extend(chart.frame.dual.iter().flatten());
        out.extend(chart.tetrad.stored_cov.iter().flatten());
        out.extend(chart.tetrad.stored_con.iter().flatten());
    }
    out.extend(group.holonomic.table.basis.iter().flatten());
    if let Some(t) = &group.frame_table {
        out.extend(t.basis.iter().flatten());
    }
    out.retain(|e| e.as_const().is_none());
    out
}

pub fn fd_oracle_residual(group: &GroupModel, points: &[ChartPoint]) -> Result<f64, DomainError> {
    let mut worst = 0.0f64;
    for f in differentiated_fields(group) {
        worst = worst.max(gradient_discrepancy(f, f, points)?);
    }
    Ok(worst)
}

// Wrappers over the primary chart of an entry.

pub fn check_duality(
    group: &GroupModel,
    points: &[ChartPoint],
    tol: &ToleranceConfig,
) -> CheckResult {
    CheckResult::from_result(
        "duality",
        group.id,
        "killing-frame",
        Mode::Asserted,
        points.len(),
        duality_residual(&group.chart.frame, points),
        tol.tol_exact,
    )
}

pub fn check_jacobi(group: &GroupModel, tol: &ToleranceConfig) -> CheckResult {
    CheckResult::new(
        "jacobi",
        group.id,
        "structure-constants",
        Mode::Asserted,
        0,
        jacobi_residual(&group.constants),
        tol.tol_exact,
    )
}

/// Closure of the frame on the structure constants; the note records the sign.
pub fn check_lie_closure(
    group: &GroupModel,
    points: &[ChartPoint],
    tol: &ToleranceConfig,
) -> (CheckResult, Option<i8>) {
    match lie_closure(&group.chart.frame.xi, &group.constants, points) {
        Ok(lc) => {
            let (s, r) = lc.best();
            let res = CheckResult::new(
                "lie-closure",
                group.id,
                "killing-frame",
                Mode::Asserted,
                points.len(),
                r,
                tol.tol_deriv,
            );
            if res.passed {
                let note = format!(
                    "bracket sign s = {s:+} (residuals: +1 -> {:.3e}, -1 -> {:.3e})",
                    lc.residual_plus, lc.residual_minus
                );
                (res.with_note(note), Some(s))
            } else {
                let note = format!(
                    "closure failed for both signs (+1 -> {:.3e}, -1 -> {:.3e})",
                    lc.residual_plus, lc.residual_minus
                );
                (res.with_note(note), None)
            }
        }
        Err(e) => (
            CheckResult::from_result::<DomainError>(
                "lie-closure",
                group.id,
                "killing-frame",
                Mode::Asserted,
                points.len(),
                Err(e),
                tol.tol_deriv,
            ),
            None,
        ),
    }
}

pub fn check_killing(
    group: &GroupModel,
    eta: &Eta,
    points: &[ChartPoint],
    tol: &ToleranceConfig,
) -> CheckResult {
    CheckResult::from_result(
        "killing",
        group.id,
        format!("eta={}", eta.label()),
        Mode::Asserted,
        points.len(),
        killing_residual(&group.chart, eta, points),
        tol.tol_deriv,
    )
}

pub fn check_frame_killing(
    group: &GroupModel,
    eta: &Eta,
    sign: i8,
    points: &[ChartPoint],
    tol: &ToleranceConfig,
) -> CheckResult {
    CheckResult::from_result(
        "frame-killing",
        group.id,
        format!("eta={}", eta.label()),
        Mode::Asserted,
        points.len(),
        frame_killing_residual(&group.chart, eta, &group.constants, sign as f64, points),
        tol.tol_deriv,
    )
}

/// Admissibility of a potential table, basis-wise; notes list each basis residual.
pub fn check_admissibility(
    group: &GroupModel,
    chart: &Chart,
    table: &PotentialTable,
    label: &str,
    mode: Mode,
    points: &[ChartPoint],
    tol: &ToleranceConfig,
) -> CheckResult {
    match admissibility_residuals(&chart.frame.xi, table, points) {
        Ok(r) => {
            let worst = r.iter().cloned().fold(0.0, f64::max);
            let mut res = CheckResult::new(
                "admissibility",
                group.id,
                label,
                mode,
                points.len(),
                worst,
                tol.tol_deriv,
            );
            for (b, v) in r.iter().enumerate() {
                let verdict = if *v <= tol.tol_deriv { "ok" } else { "fails" };
                res.notes
                    .push(format!("alpha{} basis: {v:.3e} {verdict}", b + 1));
            }
            res
        }
        Err(e) => CheckResult::from_result::<DomainError>(
            "admissibility",
            group.id,
            label,
            mode,
            points.len(),
            Err(e),
            tol.tol_deriv,
        ),
    }
}

/// Frame defining equations for a frame table; notes list failing components.
#[allow(clippy::too_many_arguments)]
pub fn check_frame_defining(
    group: &GroupModel,
    chart: &Chart,
    frame_table: &PotentialTable,
    sign: i8,
    label: &str,
    mode: Mode,
    points: &[ChartPoint],
    tol: &ToleranceConfig,
) -> CheckResult {
    match frame_defining_residuals(
        &chart.frame.xi,
        &group.constants,
        sign as f64,
        frame_table,
        points,
    ) {
        Ok(r) => {
            let worst = r.iter().flatten().cloned().fold(0.0, f64::max);
            let mut res = CheckResult::new(
                "frame-defining",
                group.id,
                label,
                mode,
                points.len(),
                worst,
                tol.tol_deriv,
            );
            for a in 0..DIM {
                let failing: Vec<String> = (0..DIM)
                    .filter(|&b| r[b][a] > tol.tol_deriv)
                    .map(|b| format!("alpha{}", b + 1))
                    .collect();
                if !failing.is_empty() {
                    res.notes.push(format!(
                        "component A{} fails for {}",
                        a + 1,
                        failing.join(", ")
                    ));
                }
            }
            res
        }
        Err(e) => CheckResult::from_result::<DomainError>(
            "frame-defining",
            group.id,
            label,
            mode,
            points.len(),
            Err(e),
            tol.tol_deriv,
        ),
    }
}

/// Field strength of the printed Abelian-family potential must vanish.
pub fn check_abelian_zero_field(
    group: &GroupModel,
    points: &[ChartPoint],
    tol: &ToleranceConfig,
) -> CheckResult {
    CheckResult::from_result(
        "abelian-zero-field",
        group.id,
        "holonomic-table",
        Mode::Asserted,
        points.len(),
        field_strength_residual(&group.holonomic.table, &group.params.em_alphas, points),
        tol.tol_exact,
    )
}

pub fn check_fd_oracle(
    group: &GroupModel,
    points: &[ChartPoint],
    tol: &ToleranceConfig,
) -> CheckResult {
    let n = differentiated_fields(group).len();
    CheckResult::from_result(
        "fd-oracle",
        group.id,
        "all-fields",
        Mode::Asserted,
        points.len(),
        fd_oracle_residual(group, points),
        tol.fd_tol,
    )
    .with_note(format!(
        "{n} non-constant fields, central differences with h = {FD_STEP:e}"
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{get_group, sample_points, GroupParams, MetricForm, TetradSource};

    fn identity() -> ExprMat {
        std::array::from_fn(|i| std::array::from_fn(|j| Expr::constant(delta(i, j))))
    }

    fn flat_chart() -> Chart {
        Chart {
            name: "flat",
            frame: FrameField {
                xi: identity(),
                dual: identity(),
            },
            tetrad: Tetrad::new(identity(), identity(), TetradSource::Derived),
            metric_form: MetricForm::Full,
        }
    }

    fn pts(n: usize) -> Vec<ChartPoint> {
        sample_points(&crate::catalog::SampleDomain::cube(1.5), n, 9)
    }

    #[test]
    fn identity_frame_has_zero_duality_residual() {
        assert_eq!(duality_residual(&flat_chart().frame, &pts(5)).unwrap(), 0.0);
    }

    #[test]
    fn abelian_and_zero_tables() {
        assert_eq!(jacobi_residual(&StructureConstants::zero()), 0.0);
        let lc = lie_closure(&identity(), &StructureConstants::zero(), &pts(5)).unwrap();
        assert_eq!(lc.best().1, 0.0);
    }

    #[test]
    fn flat_translations_are_killing() {
        let chart = flat_chart();
        let eta = Eta::lorentzian();
        assert_eq!(killing_residual(&chart, &eta, &pts(5)).unwrap(), 0.0);
        assert_eq!(
            frame_killing_residual(&chart, &eta, &StructureConstants::zero(), 1.0, &pts(5))
                .unwrap(),
            0.0
        );
    }

    #[test]
    fn zero_potential_is_admissible() {
        let xi = get_group(GroupId::G4_II, &GroupParams::default())
            .unwrap()
            .chart
            .frame
            .xi;
        let r = admissibility_residuals(&xi, &PotentialTable::zero(), &pts(5)).unwrap();
        assert_eq!(r, [0.0; DIM]);
        let c = StructureConstants::from_entries(&[(1, 2, 3, 1.0)]);
        let r = frame_defining_residuals(&xi, &c, 1.0, &PotentialTable::zero(), &pts(5)).unwrap();
        assert_eq!(r, [[0.0; DIM]; DIM]);
    }

    #[test]
    fn g4_i_first_frame_component_decays_at_rate_c() {
        // A1 = alpha2 exp(-c u4), so xi4(A1) = -c A1 on the u4-axis
        let g = get_group(GroupId::G4_I_cne1, &GroupParams::default()).unwrap();
        let table = g.frame_table.as_ref().unwrap();
        let u = ChartPoint([0.0, 0.0, 0.0, 0.3]);
        let j = table.basis[1][0].jet(&u).unwrap();
        assert!((j.grad[3] + 2.0 * j.value).abs() < 1e-15);
    }

    #[test]
    fn status_follows_mode() {
        let ok = CheckResult::new("x", GroupId::G4_II, "", Mode::Report, 1, 0.0, 1.0);
        assert_eq!(ok.status(), Status::Pass);
        let flag = CheckResult::new("x", GroupId::G4_II, "", Mode::Report, 1, 2.0, 1.0);
        assert_eq!(flag.status(), Status::Flag);
        let fail = CheckResult::new("x", GroupId::G4_II, "", Mode::Asserted, 1, f64::NAN, 1.0);
        assert_eq!(fail.status(), Status::Fail);
    }
}
