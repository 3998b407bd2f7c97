//! Packaged experiments: atom mirror, beam splitter, Bloch regimes, calibration and
//! quasi-momentum spread averaging.
//!
//! Pulse timing is expressed relative to the climbing crossings. With `Δt = 2/|α|`,
//! the crossing `(k, k+1)` toward the target happens at the time where the chirp rate
//! equals `∓(2k+1)`. A [`PulsePlan`] puts the switch-on half maximum `lead` before the
//! first crossing and the switch-off half maximum `lag` after the last one, so the
//! plateau grows by exactly `Δt` per extra rung.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ladder::{
    ChirpProfile, ChirpSign, Drive, Drives, EnvelopeShape, Frame, LadderConfig, Mode, PulseEnvelope, StateVector,
};
use crate::observables::{bloch_period, oscillation_amplitude, transfer_fidelity, SummaryMetrics};
use crate::propagator::{propagate, IntegratorSpec, Trajectory};
use crate::spectrum::{adiabaticity_report, AdiabaticityRow};

/// Levels kept beyond the target when no truncation is given.
pub const DEFAULT_MARGIN: usize = 8;

/// Envelope parameters relative to the crossing window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulsePlan {
    pub omega0: f64,
    pub ramp_up: f64,
    pub ramp_down: f64,
    /// Switch-on half maximum this long before the first climbing crossing.
    pub lead: f64,
    /// Switch-off half maximum this long after the last climbing crossing.
    pub lag: f64,
    pub shape: EnvelopeShape,
}

impl PulsePlan {
    /// Mirror timing at `α = 0.1`: 16-unit ramps, switching 6 units outside the crossings.
    pub fn mirror() -> Self {
        Self {
            omega0: 0.7,
            ramp_up: 16.0,
            ramp_down: 16.0,
            lead: 6.0,
            lag: 6.0,
            shape: EnvelopeShape::SinSquared,
        }
    }

    /// Splitter timing at `α = 0.1`. The fast switch-on lands before the symmetric
    /// wrong-branch crossings, which then load both branches together.
    pub fn splitter() -> Self {
        Self {
            omega0: 0.438,
            ramp_up: 6.7,
            ramp_down: 19.0,
            lead: 21.7,
            lag: 7.5,
            shape: EnvelopeShape::SinSquared,
        }
    }

    /// Same plan with every duration multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            ramp_up: self.ramp_up * factor,
            ramp_down: self.ramp_down * factor,
            lead: self.lead * factor,
            lag: self.lag * factor,
            ..*self
        }
    }

    /// Envelope covering the `|target|` climbing crossings of `chirp`.
    pub fn envelope(&self, chirp: &ChirpProfile, target: i64) -> Result<PulseEnvelope> {
        let (first, last) = crossing_window(chirp, target)?;
        let on = first - self.lead;
        let off = last + self.lag;
        let plateau = off - on - 0.5 * (self.ramp_up + self.ramp_down);
        if plateau < 0.0 {
            return Err(Error::invalid(
                "ramp_up",
                format!("ramps are too long for the crossing window ({:.3} short)", -plateau),
            ));
        }
        PulseEnvelope::new(
            self.omega0,
            on - 0.5 * self.ramp_up,
            self.ramp_up,
            plateau,
            self.ramp_down,
            self.shape,
        )
    }
}

/// Times of the first and last climbing crossing from `n = 0` to `target` (at `q = 0`).
pub fn crossing_window(chirp: &ChirpProfile, target: i64) -> Result<(f64, f64)> {
    if target == 0 {
        return Err(Error::invalid("target", "must be nonzero"));
    }
    let d = target.signum() as f64;
    let n = target.unsigned_abs() as f64;
    let (Some(first), Some(last)) = (chirp.time_of_rate(-d), chirp.time_of_rate(-d * (2.0 * n - 1.0))) else {
        return Err(Error::invalid("alpha", "chirp rate must be nonzero"));
    };
    if last < first {
        return Err(Error::invalid(
            "alpha",
            format!("the chirp sweeps away from target {target}; flip the chirp sign"),
        ));
    }
    Ok((first, last))
}

/// A fully resolved propagation with the levels that count as success.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    pub ladder: LadderConfig,
    pub integrator: IntegratorSpec,
    pub t_span: (f64, f64),
    /// Target magnitude; the splitter aims at both `±target`.
    pub target: i64,
    pub initial_level: i64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub trajectory: Trajectory,
    pub metrics: SummaryMetrics,
    pub adiabaticity: Vec<AdiabaticityRow>,
    pub warnings: Vec<String>,
}

impl Experiment {
    pub fn targets(&self) -> Vec<i64> {
        match self.ladder.mode() {
            Mode::Mirror => vec![self.target],
            Mode::Splitter => vec![self.target, -self.target],
        }
    }

    pub fn initial_state(&self) -> Result<StateVector> {
        let mut s = StateVector::basis(self.ladder.n_max(), self.initial_level)?;
        s.time = self.t_span.0;
        Ok(s)
    }

    /// Every chirp reversed and the targets mirrored.
    pub fn reversed(&self) -> Result<Self> {
        let drives = match *self.ladder.drives() {
            Drives::Mirror(d) => Drives::Mirror(Drive::new(d.envelope, d.chirp.reversed())),
            Drives::Splitter { plus, minus } => Drives::Splitter {
                plus: Drive::new(plus.envelope, plus.chirp.reversed()),
                minus: Drive::new(minus.envelope, minus.chirp.reversed()),
            },
        };
        Ok(Self {
            ladder: self.ladder.with_drives(drives)?,
            target: -self.target,
            initial_level: -self.initial_level,
            ..*self
        })
    }

    pub fn run(&self) -> Result<RunOutcome> {
        let trajectory = propagate(&self.ladder, &self.integrator, self.t_span, &self.initial_state()?)?;
        let mut metrics = transfer_fidelity(&trajectory, &self.targets());
        metrics.bloch_period = plateau_period(&self.ladder, &trajectory);
        let adiabaticity = adiabaticity_report(&self.ladder)?;
        let mut warnings = trajectory.warnings.clone();
        warnings.extend(adiabaticity.iter().filter(|r| r.flagged).map(|r| {
            format!(
                "adiabaticity: crossing {:?} at t = {:.3} has t_lz/spacing = {:.3}",
                r.pair, r.t_cross, r.ratio
            )
        }));
        Ok(RunOutcome {
            trajectory,
            metrics,
            adiabaticity,
            warnings,
        })
    }
}

/// Velocity oscillation period over the plateau of the primary envelope, if any.
fn plateau_period(ladder: &LadderConfig, traj: &Trajectory) -> Option<f64> {
    let env = ladder.primary_drive().envelope;
    let lo = env.start() + env.ramp_up();
    window_period(traj, (lo, lo + env.plateau())).ok()
}

fn window(traj: &Trajectory, (lo, hi): (f64, f64)) -> (Vec<f64>, Vec<f64>) {
    traj.times
        .iter()
        .zip(&traj.mean_velocity)
        .filter(|(t, _)| **t >= lo && **t <= hi)
        .map(|(t, v)| (*t, *v))
        .unzip()
}

fn window_period(traj: &Trajectory, span: (f64, f64)) -> Result<f64> {
    let (t, v) = window(traj, span);
    bloch_period(&t, &v)
}

fn default_n_max(n_max: Option<usize>, target: i64) -> usize {
    n_max.unwrap_or(target.unsigned_abs() as usize + DEFAULT_MARGIN)
}

/// Single standing wave climbing to `target`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MirrorParams {
    pub target: i64,
    pub n_max: Option<usize>,
    pub alpha: f64,
    pub t_c: f64,
    pub delta0: f64,
    /// `None` selects the climbing convention.
    pub sign: Option<ChirpSign>,
    pub q: f64,
    pub frame: Frame,
    pub pulse: PulsePlan,
    pub integrator: IntegratorSpec,
}

impl Default for MirrorParams {
    fn default() -> Self {
        Self {
            target: 25,
            n_max: None,
            alpha: 0.1,
            t_c: 10.0,
            delta0: 0.0,
            sign: None,
            q: 0.0,
            frame: Frame::Rotating,
            pulse: PulsePlan::mirror(),
            integrator: IntegratorSpec::default(),
        }
    }
}

impl MirrorParams {
    pub fn chirp(&self) -> ChirpProfile {
        ChirpProfile::with_sign(
            self.alpha,
            self.t_c,
            self.delta0,
            self.sign.unwrap_or_else(ChirpSign::climbing),
        )
    }

    pub fn experiment(&self) -> Result<Experiment> {
        let chirp = self.chirp();
        let envelope = self.pulse.envelope(&chirp, self.target)?;
        let ladder = LadderConfig::mirror(default_n_max(self.n_max, self.target), Drive::new(envelope, chirp))?
            .with_frame(self.frame)
            .with_q(self.q)?;
        Ok(Experiment {
            ladder,
            integrator: self.integrator,
            t_span: (envelope.start().min(0.0), envelope.end()),
            target: self.target,
            initial_level: 0,
        })
    }
}

pub fn run_mirror(params: &MirrorParams) -> Result<RunOutcome> {
    params.experiment()?.run()
}

/// Two standing waves with opposite chirps splitting toward `±target`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitterParams {
    pub target: i64,
    pub n_max: Option<usize>,
    pub alpha: f64,
    pub t_c: f64,
    pub delta0: f64,
    pub delta0_2: f64,
    pub sign: Option<ChirpSign>,
    /// Peak of the second field; `None` means equal to the first.
    pub omega0_2: Option<f64>,
    pub q: f64,
    pub frame: Frame,
    pub pulse: PulsePlan,
    pub integrator: IntegratorSpec,
}

impl Default for SplitterParams {
    fn default() -> Self {
        Self {
            target: 25,
            n_max: None,
            alpha: 0.1,
            t_c: 20.0,
            delta0: 0.0,
            delta0_2: 0.0,
            sign: None,
            omega0_2: None,
            q: 0.0,
            frame: Frame::Bare,
            pulse: PulsePlan::splitter(),
            integrator: IntegratorSpec::default(),
        }
    }
}

impl SplitterParams {
    pub fn chirps(&self) -> (ChirpProfile, ChirpProfile) {
        let sign = self.sign.unwrap_or_else(ChirpSign::climbing);
        (
            ChirpProfile::with_sign(self.alpha, self.t_c, self.delta0, sign),
            ChirpProfile::with_sign(-self.alpha, self.t_c, self.delta0_2, sign),
        )
    }

    pub fn experiment(&self) -> Result<Experiment> {
        if self.target <= 0 {
            return Err(Error::invalid(
                "target",
                "splitter target is the positive magnitude n of ±n",
            ));
        }
        let (c1, c2) = self.chirps();
        let e1 = self.pulse.envelope(&c1, self.target)?;
        let peak2 = self.omega0_2.unwrap_or(self.pulse.omega0);
        if !(peak2.is_finite() && peak2 >= 0.0) {
            return Err(Error::invalid("omega0_2", "peak Rabi frequency must be >= 0"));
        }
        let e2 = e1.with_peak(peak2);
        let ladder = LadderConfig::splitter(
            default_n_max(self.n_max, self.target),
            Drive::new(e1, c1),
            Drive::new(e2, c2),
        )?
        .with_frame(self.frame)
        .with_q(self.q)?;
        Ok(Experiment {
            ladder,
            integrator: self.integrator,
            t_span: (e1.start().min(0.0), e1.end()),
            target: self.target,
            initial_level: 0,
        })
    }
}

pub fn run_splitter(params: &SplitterParams) -> Result<RunOutcome> {
    params.experiment()?.run()
}

/// One mean-velocity regime of a long linearly chirped pulse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlochRegime {
    pub label: String,
    pub alpha: f64,
    pub omega0: f64,
    /// Number of crossings under the pulse.
    pub crossings: i64,
}

impl BlochRegime {
    pub fn new(label: &str, alpha: f64, omega0: f64, crossings: i64) -> Self {
        Self {
            label: label.to_string(),
            alpha,
            omega0,
            crossings,
        }
    }

    /// Mirror parameters with the default plan rescaled to this chirp rate.
    pub fn mirror_params(&self, integrator: IntegratorSpec) -> MirrorParams {
        let period = 2.0 / self.alpha.abs();
        MirrorParams {
            target: self.crossings,
            n_max: None,
            alpha: self.alpha,
            t_c: 0.5 * period,
            pulse: PulsePlan {
                omega0: self.omega0,
                ..PulsePlan::mirror().scaled(period / 20.0)
            },
            integrator,
            ..MirrorParams::default()
        }
    }

    /// Adiabatic ladder climbing at a slow chirp.
    pub fn dotted() -> Self {
        Self::new("dotted", 0.01, 0.15, 5)
    }
    /// Same chirp, strong coupling: oscillations suppressed.
    pub fn dashed() -> Self {
        Self::new("dashed", 0.01, 0.7, 5)
    }
    /// Mirror chirp rate with residual non-adiabatic oscillations.
    pub fn solid() -> Self {
        Self::new("solid", 0.1, 0.7, 25)
    }
}

#[derive(Debug, Clone)]
pub struct BlochSeries {
    pub regime: BlochRegime,
    pub outcome: RunOutcome,
    /// Interval between the first and last crossing used for the analysis.
    pub window: (f64, f64),
    pub period: Option<f64>,
    pub amplitude: f64,
}

/// Mean-velocity series for each regime with its oscillation period and amplitude.
pub fn run_bloch(regimes: &[BlochRegime], integrator: IntegratorSpec) -> Result<Vec<BlochSeries>> {
    regimes
        .par_iter()
        .map(|regime| {
            let params = regime.mirror_params(integrator);
            let outcome = run_mirror(&params)?;
            let window = crossing_window(&params.chirp(), params.target)?;
            let (t, v) = self::window(&outcome.trajectory, window);
            Ok(BlochSeries {
                regime: regime.clone(),
                period: bloch_period(&t, &v).ok(),
                amplitude: oscillation_amplitude(&t, &v),
                window,
                outcome,
            })
        })
        .collect()
}

/// Swept parameter with one set of metrics per value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub parameter: String,
    pub values: Vec<f64>,
    pub metrics: Vec<SummaryMetrics>,
    /// Snapshot of the configuration the scan started from.
    pub provenance: serde_json::Value,
}

impl ScanResult {
    pub fn fidelities(&self) -> Vec<f64> {
        self.metrics.iter().map(|m| m.fidelity).collect()
    }
}

fn check_monotone(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::invalid("values", "scan needs at least one value"));
    }
    let up = values.windows(2).all(|w| w[1] > w[0]);
    let down = values.windows(2).all(|w| w[1] < w[0]);
    if !(up || down) || values.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid(
            "values",
            "scan values must be finite and strictly monotone",
        ));
    }
    Ok(())
}

/// Evaluate `run` at every value (concurrently) and collect the metrics in order.
pub fn scan<F>(parameter: &str, values: &[f64], provenance: serde_json::Value, run: F) -> Result<ScanResult>
where
    F: Fn(f64) -> Result<SummaryMetrics> + Sync,
{
    check_monotone(values)?;
    let metrics = values.par_iter().map(|&v| run(v)).collect::<Result<Vec<_>>>()?;
    Ok(ScanResult {
        parameter: parameter.to_string(),
        values: values.to_vec(),
        metrics,
        provenance,
    })
}

/// Quadrature nodes `q_j` over `±3σ` around `center` with normalised Gaussian weights.
pub fn spread_nodes(center: f64, sigma: f64, points: usize) -> Result<Vec<(f64, f64)>> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::invalid("sigma_q", "must be finite and >= 0"));
    }
    if points == 0 || points.is_multiple_of(2) {
        return Err(Error::invalid("q_points", format!("must be odd, got {points}")));
    }
    if sigma == 0.0 || points == 1 {
        return Ok(vec![(center, 1.0)]);
    }
    let half = (points / 2) as f64;
    let raw: Vec<(f64, f64)> = (0..points)
        .map(|j| {
            let x = 3.0 * (j as f64 - half) / half;
            (center + x * sigma, (-0.5 * x * x).exp())
        })
        .collect();
    let total: f64 = raw.iter().map(|(_, w)| w).sum();
    Ok(raw.into_iter().map(|(q, w)| (q, w / total)).collect())
}

/// Split a quasi-momentum into a ladder shift `k` and a remainder in `[-1, 1]`.
fn wrap_q(q: f64) -> (i64, f64) {
    let k = (q / 2.0).round();
    (k as i64, q - 2.0 * k)
}

/// Incoherent average over a Gaussian quasi-momentum distribution.
///
/// Offsets beyond `|q| = 1` are folded back onto the ladder by relabelling momenta,
/// so populations always refer to `n` relative to the atom's own initial momentum.
pub fn spread_average(exp: &Experiment, sigma: f64, points: usize) -> Result<RunOutcome> {
    let nodes = spread_nodes(exp.ladder.q(), sigma, points)?;
    if nodes.len() == 1 {
        return exp.run();
    }
    let runs = nodes
        .par_iter()
        .map(|&(q, w)| {
            let (k, rem) = wrap_q(q);
            let shifted = Experiment {
                ladder: exp.ladder.with_q(rem)?,
                initial_level: exp.initial_level + k,
                ..*exp
            };
            let traj = propagate(
                &shifted.ladder,
                &shifted.integrator,
                shifted.t_span,
                &shifted.initial_state()?,
            )?;
            Ok((k, w, traj))
        })
        .collect::<Result<Vec<_>>>()?;
    let (_, _, first) = &runs[0];
    let rows = first.times.len();
    let dim = 2 * first.n_max + 1;
    let mut populations = vec![vec![0.0; dim]; rows];
    let mut norm = vec![0.0; rows];
    let mut mean_velocity = vec![0.0; rows];
    let mut warnings = Vec::new();
    let mut steps = 0;
    for (k, w, traj) in &runs {
        debug_assert_eq!(traj.times.len(), rows);
        for (r, pops) in traj.populations.iter().enumerate() {
            for (j, slot) in populations[r].iter_mut().enumerate() {
                let src = j as i64 + k;
                if (0..dim as i64).contains(&src) {
                    *slot += w * pops[src as usize];
                }
            }
            norm[r] += w * traj.norm[r];
            mean_velocity[r] += w * traj.mean_velocity[r];
        }
        steps += traj.steps;
        for msg in &traj.warnings {
            if !warnings.contains(msg) {
                warnings.push(msg.clone());
            }
        }
    }
    let trajectory = Trajectory {
        n_max: first.n_max,
        q: exp.ladder.q(),
        times: first.times.clone(),
        populations,
        norm,
        mean_velocity,
        amplitudes: None,
        final_state: None,
        steps,
        warnings: warnings.clone(),
    };
    let mut metrics = transfer_fidelity(&trajectory, &exp.targets());
    metrics.bloch_period = plateau_period(&exp.ladder, &trajectory);
    Ok(RunOutcome {
        trajectory,
        metrics,
        adiabaticity: adiabaticity_report(&exp.ladder)?,
        warnings,
    })
}

/// Spread-averaged fidelity against the quasi-momentum width.
pub fn q_spread_scan(exp: &Experiment, sigmas: &[f64], points: usize) -> Result<ScanResult> {
    spread_nodes(0.0, 0.0, points)?;
    let provenance = serde_json::to_value(exp)?;
    scan("sigma_q", sigmas, provenance, |s| {
        Ok(spread_average(exp, s, points)?.metrics)
    })
}

/// Search space and acceptance rule for [`calibrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSpec {
    pub base: MirrorParams,
    pub target_fidelity: f64,
    /// Ceiling on the transient population of the first level against the climb.
    pub max_transient: f64,
    pub omega0: (f64, f64),
    pub omega0_steps: usize,
    pub ramp_up: (f64, f64),
    pub ramp_up_steps: usize,
    pub ramp_down: (f64, f64),
    pub ramp_down_steps: usize,
    /// Bisection steps on `Ω₀` below the first feasible grid value.
    pub refinements: usize,
}

impl Default for CalibrationSpec {
    fn default() -> Self {
        Self {
            base: MirrorParams::default(),
            target_fidelity: 0.99,
            max_transient: 0.06,
            omega0: (0.6, 0.8),
            omega0_steps: 5,
            ramp_up: (8.0, 24.0),
            ramp_up_steps: 3,
            ramp_down: (8.0, 24.0),
            ramp_down_steps: 3,
            refinements: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationPoint {
    pub omega0: f64,
    pub ramp_up: f64,
    pub ramp_down: f64,
    pub fidelity: f64,
    pub max_transient: f64,
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub chosen: CalibrationPoint,
    pub evaluated: Vec<CalibrationPoint>,
}

impl CalibrationSpec {
    /// Mirror parameters at a calibrated point.
    pub fn params_at(&self, omega0: f64, ramp_up: f64, ramp_down: f64) -> MirrorParams {
        MirrorParams {
            pulse: PulsePlan {
                omega0,
                ramp_up,
                ramp_down,
                ..self.base.pulse
            },
            ..self.base
        }
    }

    fn evaluate(&self, omega0: f64, ramp_up: f64, ramp_down: f64) -> Result<CalibrationPoint> {
        let params = self.params_at(omega0, ramp_up, ramp_down);
        let m = run_mirror(&params)?.metrics;
        let max_transient = m.max_transient_of(-params.target.signum());
        Ok(CalibrationPoint {
            omega0,
            ramp_up,
            ramp_down,
            fidelity: m.fidelity,
            max_transient,
            feasible: m.fidelity >= self.target_fidelity && max_transient <= self.max_transient,
        })
    }
}

fn grid(name: &'static str, (lo, hi): (f64, f64), steps: usize) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite()) || lo > hi || lo < 0.0 {
        return Err(Error::invalid(
            name,
            format!("bounds [{lo}, {hi}] are empty or negative"),
        ));
    }
    if steps == 0 || (steps == 1 && lo != hi) {
        return Err(Error::invalid(
            name,
            "need at least two grid steps for a non-degenerate range",
        ));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    Ok((0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .collect())
}

/// Smallest `Ω₀` (with its best ramps) reaching the fidelity target while the level
/// behind the start stays below `max_transient`.
///
/// A coarse grid over `(Ω₀, ramp_up, ramp_down)` is followed by bisection on `Ω₀`
/// between the first feasible grid value and the one below it.
pub fn calibrate(spec: &CalibrationSpec) -> Result<Calibration> {
    let omegas = grid("omega0", spec.omega0, spec.omega0_steps)?;
    let ups = grid("ramp_up", spec.ramp_up, spec.ramp_up_steps)?;
    let downs = grid("ramp_down", spec.ramp_down, spec.ramp_down_steps)?;
    let mut combos = Vec::with_capacity(omegas.len() * ups.len() * downs.len());
    for &o in &omegas {
        for &u in &ups {
            for &d in &downs {
                combos.push((o, u, d));
            }
        }
    }
    let mut evaluated = combos
        .par_iter()
        .map(|&(o, u, d)| spec.evaluate(o, u, d))
        .collect::<Result<Vec<_>>>()?;

    // Grid order is by Ω₀ first, so the first feasible Ω₀ is the smallest one.
    let Some(first) = evaluated.iter().position(|p| p.feasible) else {
        let best = evaluated
            .iter()
            .max_by(|a, b| a.fidelity.total_cmp(&b.fidelity))
            .expect("grid is non-empty");
        return Err(Error::Infeasible(format!(
            "no point reaches fidelity {} with transient <= {}; best found: omega0 = {}, ramp_up = {}, ramp_down = {}, fidelity = {:.6}, transient = {:.6}",
            spec.target_fidelity, spec.max_transient, best.omega0, best.ramp_up, best.ramp_down, best.fidelity, best.max_transient
        )));
    };
    let omega = evaluated[first].omega0;
    let mut chosen = *evaluated
        .iter()
        .filter(|p| p.feasible && p.omega0 == omega)
        .max_by(|a, b| a.fidelity.total_cmp(&b.fidelity))
        .expect("at least one feasible point");

    let below = omegas.iter().rev().find(|&&o| o < omega).copied();
    if let Some(mut lo) = below {
        for _ in 0..spec.refinements {
            let mid = 0.5 * (lo + chosen.omega0);
            let p = spec.evaluate(mid, chosen.ramp_up, chosen.ramp_down)?;
            evaluated.push(p);
            if p.feasible {
                chosen = p;
            } else {
                lo = mid;
            }
        }
    }
    Ok(Calibration { chosen, evaluated })
}
