//! Verification runs over catalog entries and their serialized reports.
//!
//! Every entry is checked independently (one thread per entry); results are
//! collected in catalog order, so the report does not depend on scheduling.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::adiff::{ChartPoint, DIM};
use crate::catalog::{
    self, Chart, ChartSel, Erratum, FrameField, GroupId, GroupModel, GroupParams,
    OrientationDecision, PotentialTable,
};
use crate::checks::{self, CheckResult, Mode, Status, ToleranceConfig};
use crate::geometry::Eta;
use crate::mechanics::{self, PhasePoint};

pub const SCHEMA_VERSION: u32 = 1;
/// Points used by the finite-difference oracle comparison.
pub const FD_SUBSAMPLE: usize = 20;

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub groups: Vec<GroupId>,
    pub params: GroupParams,
    pub n_points: usize,
    pub seed: u64,
    pub tol: ToleranceConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            groups: GroupId::ALL.to_vec(),
            params: GroupParams::default(),
            n_points: 200,
            seed: 42,
            tol: ToleranceConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamsEcho {
    pub c: f64,
    pub alpha_angle: f64,
    pub k: f64,
    pub l: f64,
    pub eps01: f64,
    pub em_alphas: [f64; DIM],
    pub eta: String,
}

impl From<&GroupParams> for ParamsEcho {
    fn from(p: &GroupParams) -> Self {
        ParamsEcho {
            c: p.c,
            alpha_angle: p.alpha_angle,
            k: p.k,
            l: p.l,
            eps01: p.eps01,
            em_alphas: p.em_alphas,
            eta: p.eta.label(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub groups: Vec<GroupId>,
    pub seed: u64,
    pub n_points: usize,
    pub params: ParamsEcho,
    pub tolerances: ToleranceConfig,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupSummary {
    pub group: GroupId,
    pub passed: usize,
    pub failed: usize,
    pub flagged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrientationEntry {
    pub group: GroupId,
    #[serde(flatten)]
    pub decision: OrientationDecision,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FindingKind {
    /// A catalog decision about printed material.
    Note,
    /// Printed material replaced in the catalog and audited separately.
    Erratum,
    /// A report-mode check that did not pass.
    FlaggedCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Inconsistency {
    pub group: GroupId,
    pub kind: FindingKind,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub tool: String,
    pub version: String,
    pub config: ConfigEcho,
    pub results: Vec<CheckResult>,
    pub summary: Vec<GroupSummary>,
    pub orientation: Vec<OrientationEntry>,
    pub inconsistencies: Vec<Inconsistency>,
}

impl VerificationReport {
    /// True when no asserted check failed; flagged report-mode checks do not count.
    pub fn all_asserted_pass(&self) -> bool {
        self.results.iter().all(|r| r.status() != Status::Fail)
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_asserted_pass() {
            0
        } else {
            1
        }
    }

    pub fn to_json(&self) -> String {
        to_json_string(self)
    }

    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("group,check,label,mode,n_points,max_residual,tolerance,status\n");
        for r in &self.results {
            let mode = match r.mode {
                Mode::Asserted => "asserted",
                Mode::Report => "report",
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.group,
                r.check,
                csv_field(&r.label),
                mode,
                r.n_points,
                fmt_float(r.max_residual),
                fmt_float(r.tolerance),
                status_str(r.status())
            );
        }
        out
    }

    /// Per-entry table followed by the orientation and inconsistency sections.
    pub fn to_human(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} {} (seed {}, {} points)",
            self.tool, self.version, self.config.seed, self.config.n_points
        );
        for s in &self.summary {
            let _ = writeln!(
                out,
                "\n== {} — {} passed, {} failed, {} flagged",
                s.group, s.passed, s.failed, s.flagged
            );
            let _ = writeln!(
                out,
                "{:<28} {:<44} {:>12} {:>10}  status",
                "check", "label", "max residual", "tolerance"
            );
            for r in self.results.iter().filter(|r| r.group == s.group) {
                let _ = writeln!(
                    out,
                    "{:<28} {:<44} {:>12.3e} {:>10.1e}  {}",
                    r.check,
                    r.label,
                    r.max_residual,
                    r.tolerance,
                    status_str(r.status())
                );
            }
        }
        let _ = writeln!(out, "\n== tetrad orientation");
        for o in &self.orientation {
            let _ = writeln!(
                out,
                "{:<14} {:?} by {:?}: {}",
                o.group.as_str(),
                o.decision.orientation,
                o.decision.decided_by,
                o.decision.note
            );
        }
        let _ = writeln!(out, "\n== inconsistencies in the printed tables");
        for i in &self.inconsistencies {
            let kind = match i.kind {
                FindingKind::Note => "note",
                FindingKind::Erratum => "erratum",
                FindingKind::FlaggedCheck => "flagged",
            };
            let _ = writeln!(out, "{:<14} {:<8} {}", i.group.as_str(), kind, i.detail);
        }
        let verdict = if self.all_asserted_pass() {
            "PASS"
        } else {
            "FAIL"
        };
        let _ = writeln!(out, "\noverall: {verdict}");
        out
    }
}

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Flag => "FLAG",
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// 17 significant digits; non-finite values become `null`/`nan` markers upstream.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

/// Pretty JSON in which every float is written with 17 significant digits
/// and object keys are sorted, so equal inputs give identical bytes.
/// Non-finite floats serialize as `null`.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report types serialize to JSON");
    let mut out = String::new();
    emit(&v, 0, &mut out);
    out.push('\n');
    out
}

fn emit(v: &Value, depth: usize, out: &mut String) {
    let pad = |d: usize, out: &mut String| out.extend(std::iter::repeat_n("  ", d));
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(n) => match n.as_f64() {
            Some(f) if n.is_f64() => out.push_str(&format!("{f:.16e}")),
            _ => out.push_str(&n.to_string()),
        },
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (k, item) in items.iter().enumerate() {
                pad(depth + 1, out);
                emit(item, depth + 1, out);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(depth, out);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push_str("{\n");
            for (k, (key, item)) in map.iter().enumerate() {
                pad(depth + 1, out);
                out.push_str(&Value::String(key.clone()).to_string());
                out.push_str(": ");
                emit(item, depth + 1, out);
                out.push_str(if k + 1 < map.len() { ",\n" } else { "\n" });
            }
            pad(depth, out);
            out.push('}');
        }
    }
}

/// Per-entry seed; distinct entries get unrelated streams.
pub fn group_seed(seed: u64, group: GroupId) -> u64 {
    seed ^ (group.index() as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

/// Coordinate samples and phase points used for one entry.
pub fn sample_for(group: &GroupModel, seed: u64, n: usize) -> (Vec<ChartPoint>, Vec<PhasePoint>) {
    let s = group_seed(seed, group.id);
    let points = catalog::sample_points(&group.domain, n, s);
    let phase = mechanics::phase_points(&points, s.rotate_left(17) ^ 0x5eed);
    (points, phase)
}

/// The configured η followed by the Euclidean signature, without repeats.
pub fn etas_for(params: &GroupParams) -> Vec<Eta> {
    let mut out = vec![params.eta.clone()];
    let e = Eta::euclidean();
    if e != params.eta {
        out.push(e);
    }
    out
}

fn charts(group: &GroupModel) -> Vec<(&'static str, &Chart)> {
    let mut out = vec![("primary", &group.chart)];
    if let Some(c) = &group.companion {
        out.push(("companion", c));
    }
    out
}

fn chart_label(sel: ChartSel) -> &'static str {
    match sel {
        ChartSel::Primary => "primary",
        ChartSel::Companion => "companion",
    }
}

/// Every check for one entry, in a fixed order.
pub fn verify_group(group: &GroupModel, cfg: &VerifyConfig) -> Vec<CheckResult> {
    let tol = &cfg.tol;
    let (points, phase) = sample_for(group, cfg.seed, cfg.n_points);
    let n = points.len();
    let etas = etas_for(&group.params);
    let mut out = Vec::new();

    out.push(checks::check_jacobi(group, tol));

    let mut sign: i8 = 1;
    for (tag, chart) in charts(group) {
        let lc = checks::lie_closure(&chart.frame.xi, &group.constants, &points);
        let res = match lc {
            Ok(lc) => {
                let (s, r) = lc.best();
                let res = CheckResult::new(
                    "lie-closure",
                    group.id,
                    format!("chart={tag}"),
                    Mode::Asserted,
                    n,
                    r,
                    tol.tol_deriv,
                );
                if tag == "primary" && res.passed {
                    sign = s;
                }
                res.with_note(format!(
                    "bracket sign s = {s:+} (residuals: +1 -> {:.3e}, -1 -> {:.3e})",
                    lc.residual_plus, lc.residual_minus
                ))
            }
            Err(e) => CheckResult::from_result::<crate::adiff::DomainError>(
                "lie-closure",
                group.id,
                format!("chart={tag}"),
                Mode::Asserted,
                n,
                Err(e),
                tol.tol_deriv,
            ),
        };
        out.push(res);
    }

    for (tag, chart) in charts(group) {
        out.push(CheckResult::from_result(
            "duality",
            group.id,
            format!("killing-frame, chart={tag}"),
            Mode::Asserted,
            n,
            checks::duality_residual(&chart.frame, &points),
            tol.tol_exact,
        ));
        let mut r = CheckResult::from_result(
            "tetrad-duality",
            group.id,
            format!("{:?} tetrad, chart={tag}", chart.tetrad.source).to_lowercase(),
            Mode::Asserted,
            n,
            checks::tetrad_duality_residual(&chart.tetrad, &points),
            tol.tol_exact,
        );
        if tag == "primary" {
            r = r.with_note(group.orientation.note.clone());
        }
        out.push(r);
    }

    for eta in &etas {
        for (tag, chart) in charts(group) {
            let label = format!("eta={}, chart={tag}", eta.label());
            out.push(CheckResult::from_result(
                "killing",
                group.id,
                label.clone(),
                Mode::Asserted,
                n,
                checks::killing_residual(chart, eta, &points),
                tol.tol_deriv,
            ));
            out.push(CheckResult::from_result(
                "frame-killing",
                group.id,
                label,
                Mode::Asserted,
                n,
                checks::frame_killing_residual(chart, eta, &group.constants, sign as f64, &points),
                tol.tol_deriv,
            ));
        }
    }

    let holo_chart = group.holonomic_chart();
    let holo_tag = chart_label(group.holonomic.chart);
    for (tag, chart) in charts(group) {
        let table = chart.tetrad.potential_table();
        out.push(checks::check_admissibility(
            group,
            chart,
            &table,
            &format!("tetrad-potential, chart={tag}"),
            Mode::Asserted,
            &points,
            tol,
        ));
    }
    out.push(checks::check_admissibility(
        group,
        holo_chart,
        &group.holonomic.table,
        &format!("holonomic-table, chart={holo_tag}"),
        group.holonomic.mode,
        &points,
        tol,
    ));

    for (tag, chart) in charts(group) {
        let table = checks::frame_components(&chart.frame, &chart.tetrad.potential_table());
        out.push(checks::check_frame_defining(
            group,
            chart,
            &table,
            sign,
            &format!("tetrad-potential, chart={tag}"),
            Mode::Asserted,
            &points,
            tol,
        ));
    }
    let holo_frame = checks::frame_components(&holo_chart.frame, &group.holonomic.table);
    out.push(checks::check_frame_defining(
        group,
        holo_chart,
        &holo_frame,
        sign,
        &format!("holonomic-table, chart={holo_tag}"),
        group.holonomic.mode,
        &points,
        tol,
    ));
    if let Some(ft) = &group.frame_table {
        out.push(checks::check_frame_defining(
            group,
            holo_chart,
            ft,
            sign,
            "printed frame table",
            Mode::Report,
            &points,
            tol,
        ));
        out.push(frame_holonomic_check(group, holo_chart, ft, &points, tol));
    }

    if group.id.is_abelian_family() {
        out.push(checks::check_abelian_zero_field(group, &points, tol));
    }

    for (tag, chart) in charts(group) {
        out.push(mechanics::check_integral_algebra(
            group, chart, sign, &phase, tol,
        ));
        let _ = tag;
    }
    for eta in &etas {
        for (tag, chart) in charts(group) {
            let table = chart.tetrad.potential_table();
            out.push(mechanics::check_hamiltonian_integrals(
                group,
                chart,
                eta,
                &table,
                &format!("tetrad-potential, chart={tag}"),
                Mode::Asserted,
                &phase,
                tol,
            ));
        }
        out.push(mechanics::check_hamiltonian_integrals(
            group,
            holo_chart,
            eta,
            &group.holonomic.table,
            &format!("holonomic-table, chart={holo_tag}"),
            group.holonomic.mode,
            &phase,
            tol,
        ));
    }

    let fd_points = &points[..points.len().min(FD_SUBSAMPLE)];
    out.push(checks::check_fd_oracle(group, fd_points, tol));

    out.extend(errata_checks(group, &points, sign, &etas[0], tol));
    out
}

fn frame_holonomic_check(
    group: &GroupModel,
    chart: &Chart,
    ft: &PotentialTable,
    points: &[ChartPoint],
    tol: &ToleranceConfig,
) -> CheckResult {
    match checks::frame_holonomic_residuals(&chart.frame, ft, &group.holonomic.table, points) {
        Ok(r) => {
            let worst = r.iter().flatten().cloned().fold(0.0, f64::max);
            let mut res = CheckResult::new(
                "frame-holonomic-consistency",
                group.id,
                "printed frame vs holonomic table",
                Mode::Report,
                points.len(),
                worst,
                tol.tol_deriv,
            );
            for (b, row) in r.iter().enumerate() {
                let bad: Vec<String> = (0..DIM)
                    .filter(|&i| row[i] > tol.tol_deriv)
                    .map(|i| format!("A{}", i + 1))
                    .collect();
                if !bad.is_empty() {
                    res.notes
                        .push(format!("alpha{} basis: {} disagree", b + 1, bad.join(", ")));
                }
            }
            res
        }
        Err(e) => CheckResult::from_result::<crate::adiff::DomainError>(
            "frame-holonomic-consistency",
            group.id,
            "printed frame vs holonomic table",
            Mode::Report,
            points.len(),
            Err(e),
            tol.tol_deriv,
        ),
    }
}

/// Audits of printed material the catalog replaced; always report mode.
fn errata_checks(
    group: &GroupModel,
    points: &[ChartPoint],
    sign: i8,
    eta: &Eta,
    tol: &ToleranceConfig,
) -> Vec<CheckResult> {
    let n = points.len();
    let mut out = Vec::new();
    for e in &group.errata {
        match e {
            Erratum::Dual { dual, note } => {
                let frame = FrameField {
                    xi: group.chart.frame.xi.clone(),
                    dual: dual.clone(),
                };
                out.push(
                    CheckResult::from_result(
                        "duality",
                        group.id,
                        "printed dual",
                        Mode::Report,
                        n,
                        checks::duality_residual(&frame, points),
                        tol.tol_exact,
                    )
                    .with_note(*note),
                );
            }
            Erratum::Structure { constants, note } => {
                let r = checks::lie_closure(&group.chart.frame.xi, constants, points).map(|lc| {
                    if sign > 0 {
                        lc.residual_plus
                    } else {
                        lc.residual_minus
                    }
                });
                out.push(
                    CheckResult::from_result(
                        "lie-closure",
                        group.id,
                        "printed constants",
                        Mode::Report,
                        n,
                        r,
                        tol.tol_deriv,
                    )
                    .with_note(*note),
                );
            }
            Erratum::Tetrad { tetrad, note } => {
                let t = tetrad.with_orientation(group.chart.tetrad.orientation);
                out.push(
                    CheckResult::from_result(
                        "tetrad-duality",
                        group.id,
                        "printed tetrad",
                        Mode::Report,
                        n,
                        checks::tetrad_duality_residual(&t, points),
                        tol.tol_exact,
                    )
                    .with_note(*note),
                );
                let chart = Chart {
                    tetrad: t,
                    ..group.chart.clone()
                };
                out.push(CheckResult::from_result(
                    "killing",
                    group.id,
                    format!("printed tetrad, eta={}", eta.label()),
                    Mode::Report,
                    n,
                    checks::killing_residual(&chart, eta, points),
                    tol.tol_deriv,
                ));
                out.push(checks::check_admissibility(
                    group,
                    &chart,
                    &chart.tetrad.potential_table(),
                    "printed tetrad potential",
                    Mode::Report,
                    points,
                    tol,
                ));
            }
            Erratum::Holonomic { chart, note } => {
                out.push(
                    checks::check_admissibility(
                        group,
                        group.chart(*chart),
                        &group.holonomic.table,
                        &format!("holonomic-table, chart={}", chart_label(*chart)),
                        Mode::Report,
                        points,
                        tol,
                    )
                    .with_note(*note),
                );
            }
        }
    }
    out
}

fn summarize(group: GroupId, results: &[CheckResult]) -> GroupSummary {
    let mut s = GroupSummary {
        group,
        passed: 0,
        failed: 0,
        flagged: 0,
    };
    for r in results.iter().filter(|r| r.group == group) {
        match r.status() {
            Status::Pass => s.passed += 1,
            Status::Fail => s.failed += 1,
            Status::Flag => s.flagged += 1,
        }
    }
    s
}

fn findings(group: &GroupModel, results: &[CheckResult]) -> Vec<Inconsistency> {
    let mut out: Vec<Inconsistency> = group
        .notes
        .iter()
        .map(|n| Inconsistency {
            group: group.id,
            kind: FindingKind::Note,
            detail: n.clone(),
        })
        .collect();
    out.extend(group.errata.iter().map(|e| Inconsistency {
        group: group.id,
        kind: FindingKind::Erratum,
        detail: e.note().to_string(),
    }));
    out.extend(
        results
            .iter()
            .filter(|r| r.status() == Status::Flag)
            .map(|r| {
                let mut detail = format!(
                    "{} [{}]: residual {:.3e} > {:.1e}",
                    r.check, r.label, r.max_residual, r.tolerance
                );
                if !r.notes.is_empty() {
                    detail.push_str("; ");
                    detail.push_str(&r.notes.join("; "));
                }
                Inconsistency {
                    group: group.id,
                    kind: FindingKind::FlaggedCheck,
                    detail,
                }
            }),
    );
    out
}

/// Build every selected entry (rejecting bad parameters before any work),
/// then check them concurrently.
pub fn run_verification(cfg: &VerifyConfig) -> Result<VerificationReport, catalog::CatalogError> {
    let models: Vec<GroupModel> = cfg
        .groups
        .iter()
        .map(|&id| catalog::get_group(id, &cfg.params))
        .collect::<Result<_, _>>()?;
    let per_group: Vec<Vec<CheckResult>> = std::thread::scope(|scope| {
        let handles: Vec<_> = models
            .iter()
            .map(|m| scope.spawn(move || verify_group(m, cfg)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("verification thread panicked"))
            .collect()
    });

    let mut report = VerificationReport {
        schema: SCHEMA_VERSION,
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: ConfigEcho {
            groups: cfg.groups.clone(),
            seed: cfg.seed,
            n_points: cfg.n_points,
            params: (&cfg.params).into(),
            tolerances: cfg.tol,
        },
        results: Vec::new(),
        summary: Vec::new(),
        orientation: Vec::new(),
        inconsistencies: Vec::new(),
    };
    for (m, results) in models.iter().zip(per_group) {
        report.summary.push(summarize(m.id, &results));
        report.orientation.push(OrientationEntry {
            group: m.id,
            decision: m.orientation.clone(),
        });
        report.inconsistencies.extend(findings(m, &results));
        report.results.extend(results);
    }
    Ok(report)
}
