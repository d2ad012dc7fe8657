//! Charged-particle Hamiltonian, Poisson brackets, the linear integrals
//! `Y_α = ξ_α^i p_i`, and fixed-step RK4 trajectories.
//!
//! Momentum derivatives are written out by hand (H is quadratic in p, Y is
//! linear); coordinate derivatives come from the forward-mode jets.

use std::io::{self, Write};

use serde::Serialize;
use thiserror::Error;

use crate::adiff::{ChartPoint, DomainError, DIM};
use crate::catalog::{
    Chart, ExprMat, ExprVec, GroupModel, PotentialTable, SampleDomain, StructureConstants,
};
use crate::checks::{CheckResult, Mode, ToleranceConfig};
use crate::geometry::{self, Eta, GeometryError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MechanicsError {
    #[error("step size must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("final time must be positive and finite, got {0}")]
    InvalidTime(f64),
    #[error("initial state is not finite or lies outside the sampling domain")]
    InvalidInitialState,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

impl From<DomainError> for MechanicsError {
    fn from(e: DomainError) -> Self {
        MechanicsError::Geometry(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub u: ChartPoint,
    pub p: [f64; DIM],
}

impl PhasePoint {
    pub fn new(u: [f64; DIM], p: [f64; DIM]) -> Self {
        PhasePoint {
            u: ChartPoint(u),
            p,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.p.iter().all(|x| x.is_finite())
    }

    fn axpy(&self, h: f64, d: &PhaseVelocity) -> PhasePoint {
        PhasePoint {
            u: ChartPoint(std::array::from_fn(|i| self.u.0[i] + h * d.du[i])),
            p: std::array::from_fn(|i| self.p[i] + h * d.dp[i]),
        }
    }
}

/// Value of a phase-space observable with its gradients in `u` and `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseJet {
    pub value: f64,
    pub du: [f64; DIM],
    pub dp: [f64; DIM],
}

impl PhaseJet {
    pub fn constant(value: f64) -> Self {
        PhaseJet {
            value,
            du: [0.0; DIM],
            dp: [0.0; DIM],
        }
    }

    pub fn coordinate(state: &PhasePoint, i: usize) -> Self {
        let mut j = PhaseJet::constant(state.u.0[i]);
        j.du[i] = 1.0;
        j
    }

    pub fn momentum(state: &PhasePoint, i: usize) -> Self {
        let mut j = PhaseJet::constant(state.p[i]);
        j.dp[i] = 1.0;
        j
    }

    pub fn add(&self, o: &PhaseJet) -> PhaseJet {
        PhaseJet {
            value: self.value + o.value,
            du: std::array::from_fn(|i| self.du[i] + o.du[i]),
            dp: std::array::from_fn(|i| self.dp[i] + o.dp[i]),
        }
    }

    pub fn mul(&self, o: &PhaseJet) -> PhaseJet {
        PhaseJet {
            value: self.value * o.value,
            du: std::array::from_fn(|i| self.du[i] * o.value + self.value * o.du[i]),
            dp: std::array::from_fn(|i| self.dp[i] * o.value + self.value * o.dp[i]),
        }
    }
}

/// `{f, g} = ∂f/∂p_i ∂g/∂u^i − ∂f/∂u^i ∂g/∂p_i`.
///
/// With this ordering `{H, f}` is the rate of change of `f` along the flow,
/// `{p_i, u^j} = δ_i^j`, and `{Y_α, Y_β} = C^γ_{αβ} Y_γ` whenever
/// `[ξ_α, ξ_β] = C^γ_{αβ} ξ_γ`.
pub fn poisson_bracket(f: &PhaseJet, g: &PhaseJet) -> f64 {
    (0..DIM)
        .map(|i| f.dp[i] * g.du[i] - f.du[i] * g.dp[i])
        .sum()
}

/// Sum of absolute products in the bracket, used to scale residuals.
fn bracket_scale(f: &PhaseJet, g: &PhaseJet) -> f64 {
    (0..DIM)
        .map(|i| (f.dp[i] * g.du[i]).abs() + (f.du[i] * g.dp[i]).abs())
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    Coordinate(usize),
    Momentum(usize),
    Hamiltonian,
    /// `Y_α`, 0-based.
    Integral(usize),
}

/// A concrete Hamiltonian system: chart, frame metric and potential.
#[derive(Debug, Clone)]
pub struct Dynamics {
    pub chart: Chart,
    pub eta: Eta,
    pub potential: ExprVec,
    pub domain: SampleDomain,
}

impl Dynamics {
    pub fn new(
        chart: &Chart,
        eta: &Eta,
        table: &PotentialTable,
        alphas: &[f64; DIM],
        domain: &SampleDomain,
    ) -> Self {
        Dynamics {
            chart: chart.clone(),
            eta: eta.clone(),
            potential: table.combine(alphas),
            domain: domain.clone(),
        }
    }

    /// The entry's configured system: the printed holonomic table in its
    /// chart when that table is asserted admissible, the tetrad potential
    /// otherwise.
    pub fn for_group(group: &GroupModel) -> Self {
        if group.holonomic.mode == Mode::Asserted {
            Dynamics::new(
                group.holonomic_chart(),
                &group.params.eta,
                &group.holonomic.table,
                &group.params.em_alphas,
                &group.domain,
            )
        } else {
            Dynamics::new(
                &group.chart,
                &group.params.eta,
                &group.chart.tetrad.potential_table(),
                &group.params.em_alphas,
                &group.domain,
            )
        }
    }

    /// `H = g^{ij} P_i P_j` with `P = p + A`.
    pub fn hamiltonian_jet(&self, s: &PhasePoint) -> Result<PhaseJet, GeometryError> {
        let g = geometry::metric_con_jet(&self.chart, &self.eta, &s.u)?;
        let a = geometry::vec_jets(&self.potential, &s.u)?;
        let pp: [f64; DIM] = std::array::from_fn(|i| s.p[i] + a[i].value);
        let mut out = PhaseJet::constant(0.0);
        for i in 0..DIM {
            for j in 0..DIM {
                let gij = g[i][j].value;
                out.value += gij * pp[i] * pp[j];
                out.dp[i] += 2.0 * gij * pp[j];
                for k in 0..DIM {
                    out.du[k] += g[i][j].grad[k] * pp[i] * pp[j] + 2.0 * gij * pp[i] * a[j].grad[k];
                }
            }
        }
        Ok(out)
    }

    /// `Y_α = ξ_α^i p_i` (0-based α).
    pub fn integral_jet(&self, alpha: usize, s: &PhasePoint) -> Result<PhaseJet, DomainError> {
        integral_jet(&self.chart.frame.xi, alpha, s)
    }

    pub fn observable(&self, o: Observable, s: &PhasePoint) -> Result<PhaseJet, GeometryError> {
        Ok(match o {
            Observable::Coordinate(i) => PhaseJet::coordinate(s, i),
            Observable::Momentum(i) => PhaseJet::momentum(s, i),
            Observable::Hamiltonian => self.hamiltonian_jet(s)?,
            Observable::Integral(a) => self.integral_jet(a, s)?,
        })
    }

    pub fn integrals(&self, s: &PhasePoint) -> Result<[f64; DIM], DomainError> {
        let mut y = [0.0; DIM];
        for (a, slot) in y.iter_mut().enumerate() {
            *slot = self.integral_jet(a, s)?.value;
        }
        Ok(y)
    }

    fn velocity(&self, s: &PhasePoint) -> Result<PhaseVelocity, GeometryError> {
        let h = self.hamiltonian_jet(s)?;
        Ok(PhaseVelocity {
            du: h.dp,
            dp: h.du.map(|x| -x),
        })
    }
}

fn integral_jet(xi: &ExprMat, alpha: usize, s: &PhasePoint) -> Result<PhaseJet, DomainError> {
    let mut out = PhaseJet::constant(0.0);
    for i in 0..DIM {
        let x = xi[alpha][i].jet(&s.u)?;
        out.value += x.value * s.p[i];
        out.dp[i] = x.value;
        for k in 0..DIM {
            out.du[k] += x.grad[k] * s.p[i];
        }
    }
    Ok(out)
}

pub fn hamiltonian(group: &GroupModel, state: &PhasePoint) -> Result<f64, GeometryError> {
    Ok(Dynamics::for_group(group).hamiltonian_jet(state)?.value)
}

/// `Y_α` for the entry's primary Killing frame (0-based α).
pub fn motion_integral(
    group: &GroupModel,
    alpha: usize,
    state: &PhasePoint,
) -> Result<f64, DomainError> {
    Ok(integral_jet(&group.chart.frame.xi, alpha, state)?.value)
}

/// Deterministic phase points: coordinates from `points`, momenta uniform in
/// `[−1, 1]⁴` from their own seeded stream.
pub fn phase_points(points: &[ChartPoint], seed: u64) -> Vec<PhasePoint> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    points
        .iter()
        .map(|u| PhasePoint {
            u: *u,
            p: std::array::from_fn(|_| rng.random_range(-1.0..=1.0)),
        })
        .collect()
}

/// `max |{H, Y_α}|`, scaled, over α and states.
pub fn hamiltonian_integral_residual(
    dynamics: &Dynamics,
    states: &[PhasePoint],
) -> Result<f64, GeometryError> {
    let mut worst = 0.0f64;
    for s in states {
        let h = dynamics.hamiltonian_jet(s)?;
        for a in 0..DIM {
            let y = dynamics.integral_jet(a, s)?;
            worst = worst.max(poisson_bracket(&h, &y).abs() / (1.0 + bracket_scale(&h, &y)));
        }
    }
    Ok(worst)
}

/// `max |{Y_α, Y_β} − s C^γ_{αβ} Y_γ|`, scaled.
pub fn integral_algebra_residual(
    xi: &ExprMat,
    c: &StructureConstants,
    sign: f64,
    states: &[PhasePoint],
) -> Result<f64, DomainError> {
    let mut worst = 0.0f64;
    for s in states {
        let mut y = Vec::with_capacity(DIM);
        for a in 0..DIM {
            y.push(integral_jet(xi, a, s)?);
        }
        for a in 0..DIM {
            for b in a + 1..DIM {
                let lhs = poisson_bracket(&y[a], &y[b]);
                let mut t = bracket_scale(&y[a], &y[b]);
                let mut rhs = 0.0;
                for g in 0..DIM {
                    let r = c.get(g, a, b) * y[g].value;
                    rhs += r;
                    t += r.abs();
                }
                worst = worst.max((lhs - sign * rhs).abs() / (1.0 + t));
            }
        }
    }
    Ok(worst)
}

pub fn check_integral_algebra(
    group: &GroupModel,
    chart: &Chart,
    sign: i8,
    states: &[PhasePoint],
    tol: &ToleranceConfig,
) -> CheckResult {
    CheckResult::from_result(
        "integral-algebra",
        group.id,
        format!("chart={}", chart.name),
        Mode::Asserted,
        states.len(),
        integral_algebra_residual(&chart.frame.xi, &group.constants, sign as f64, states),
        tol.tol_deriv,
    )
}

/// `{H, Y_α} = 0` for each basis vector of `table` separately.
#[allow(clippy::too_many_arguments)]
pub fn check_hamiltonian_integrals(
    group: &GroupModel,
    chart: &Chart,
    eta: &Eta,
    table: &PotentialTable,
    label: &str,
    mode: Mode,
    states: &[PhasePoint],
    tol: &ToleranceConfig,
) -> CheckResult {
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    for b in 0..DIM {
        let alphas: [f64; DIM] = std::array::from_fn(|k| if k == b { 1.0 } else { 0.0 });
        let dynamics = Dynamics::new(chart, eta, table, &alphas, &group.domain);
        match hamiltonian_integral_residual(&dynamics, states) {
            Ok(r) => {
                if r > tol.tol_deriv {
                    notes.push(format!("alpha{} basis: {r:.3e} fails", b + 1));
                }
                worst = worst.max(r);
            }
            Err(e) => {
                notes.push(format!("alpha{} basis: evaluation error: {e}", b + 1));
                worst = f64::INFINITY;
            }
        }
    }
    let mut res = CheckResult::new(
        "hamiltonian-integrals",
        group.id,
        format!("{label}, eta={}", eta.label()),
        mode,
        states.len(),
        worst,
        tol.tol_deriv,
    );
    res.notes = notes;
    res
}

struct PhaseVelocity {
    du: [f64; DIM],
    dp: [f64; DIM],
}

/// Why an integration stopped before its final time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainExit {
    /// Time of the first step that was not recorded.
    pub t: f64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhasePoint>,
    pub h_values: Vec<f64>,
    pub y_values: Vec<[f64; DIM]>,
    pub exit: Option<DomainExit>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,u1,u2,u3,u4,p1,p2,p3,p4,H,Y1,Y2,Y3,Y4")?;
        for k in 0..self.len() {
            let s = &self.states[k];
            let row: Vec<String> = std::iter::once(self.times[k])
                .chain(s.u.0)
                .chain(s.p)
                .chain(std::iter::once(self.h_values[k]))
                .chain(self.y_values[k])
                .map(|x| format!("{x:.16e}"))
                .collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn rk4_step(dynamics: &Dynamics, s: &PhasePoint, h: f64) -> Result<PhasePoint, GeometryError> {
    let k1 = dynamics.velocity(s)?;
    let k2 = dynamics.velocity(&s.axpy(0.5 * h, &k1))?;
    let k3 = dynamics.velocity(&s.axpy(0.5 * h, &k2))?;
    let k4 = dynamics.velocity(&s.axpy(h, &k3))?;
    let d = PhaseVelocity {
        du: std::array::from_fn(|i| (k1.du[i] + 2.0 * k2.du[i] + 2.0 * k3.du[i] + k4.du[i]) / 6.0),
        dp: std::array::from_fn(|i| (k1.dp[i] + 2.0 * k2.dp[i] + 2.0 * k3.dp[i] + k4.dp[i]) / 6.0),
    };
    Ok(s.axpy(h, &d))
}

/// Classical RK4 on Hamilton's equations with `round(T/h)` fixed steps.
///
/// A state that leaves the sampling domain, is non-finite, or cannot be
/// evaluated ends the run; everything up to the previous step is returned.
pub fn integrate(
    dynamics: &Dynamics,
    state0: &PhasePoint,
    t_final: f64,
    h: f64,
) -> Result<Trajectory, MechanicsError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(MechanicsError::InvalidStep(h));
    }
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(MechanicsError::InvalidTime(t_final));
    }
    if !state0.is_finite() || !dynamics.domain.contains(&state0.u) {
        return Err(MechanicsError::InvalidInitialState);
    }
    let steps = ((t_final / h).round() as usize).max(1);
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        h_values: Vec::with_capacity(steps + 1),
        y_values: Vec::with_capacity(steps + 1),
        exit: None,
    };
    traj.times.push(0.0);
    traj.states.push(*state0);
    traj.h_values.push(dynamics.hamiltonian_jet(state0)?.value);
    traj.y_values.push(dynamics.integrals(state0)?);

    let mut s = *state0;
    for k in 1..=steps {
        let t = k as f64 * h;
        let exit = |reason: String| DomainExit { t, reason };
        let next = match rk4_step(dynamics, &s, h) {
            Ok(n) => n,
            Err(e) => {
                traj.exit = Some(exit(format!("evaluation failed: {e}")));
                break;
            }
        };
        if !next.is_finite() {
            traj.exit = Some(exit("non-finite state".into()));
            break;
        }
        if !dynamics.domain.contains(&next.u) {
            traj.exit = Some(exit(format!(
                "left the sampling domain at u = {:?}",
                next.u.0
            )));
            break;
        }
        let (hv, yv) = match (dynamics.hamiltonian_jet(&next), dynamics.integrals(&next)) {
            (Ok(hj), Ok(y)) => (hj.value, y),
            (Err(e), _) => {
                traj.exit = Some(exit(format!("evaluation failed: {e}")));
                break;
            }
            (_, Err(e)) => {
                traj.exit = Some(exit(format!("evaluation failed: {e}")));
                break;
            }
        };
        traj.times.push(t);
        traj.states.push(next);
        traj.h_values.push(hv);
        traj.y_values.push(yv);
        s = next;
    }
    Ok(traj)
}

/// [`integrate`] for the entry's configured system.
pub fn integrate_trajectory(
    group: &GroupModel,
    state0: &PhasePoint,
    t_final: f64,
    h: f64,
) -> Result<Trajectory, MechanicsError> {
    integrate(&Dynamics::for_group(group), state0, t_final, h)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Drift {
    pub observable: String,
    pub initial: f64,
    /// `max_t |value(t) − value(0)|`.
    pub max_abs: f64,
    /// `max_abs / |initial|`, absent when the initial value is zero.
    pub relative: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftStats {
    pub drifts: Vec<Drift>,
    pub steps: usize,
    pub final_time: f64,
    pub domain_exit: Option<DomainExit>,
}

impl DriftStats {
    pub fn hamiltonian(&self) -> &Drift {
        &self.drifts[0]
    }

    pub fn max_abs(&self) -> f64 {
        self.drifts.iter().map(|d| d.max_abs).fold(0.0, f64::max)
    }
}

fn drift_of(name: String, series: impl Iterator<Item = f64> + Clone) -> Drift {
    let initial = series.clone().next().unwrap_or(0.0);
    let max_abs = series.map(|v| (v - initial).abs()).fold(0.0, f64::max);
    Drift {
        observable: name,
        initial,
        max_abs,
        relative: (initial != 0.0).then(|| max_abs / initial.abs()),
    }
}

/// Per-observable conservation drift. Empty trajectories give an empty list.
pub fn drift_report(traj: &Trajectory) -> DriftStats {
    let mut drifts = Vec::new();
    if !traj.is_empty() {
        drifts.push(drift_of("H".into(), traj.h_values.iter().copied()));
        for a in 0..DIM {
            drifts.push(drift_of(
                format!("Y{}", a + 1),
                traj.y_values.iter().map(move |y| y[a]),
            ));
        }
    }
    DriftStats {
        drifts,
        steps: traj.len().saturating_sub(1),
        final_time: traj.times.last().copied().unwrap_or(0.0),
        domain_exit: traj.exit.clone(),
    }
}
