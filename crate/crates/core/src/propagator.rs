//! Time stepping of `i da/dt = H(t) a` on the truncated ladder.
//!
//! Both integrators work in the interaction picture of the diagonal of `H` frozen at the
//! step midpoint (Lawson / integrating-factor Runge-Kutta). The large kinetic and
//! quasi-energy diagonal is then propagated exactly by phase factors and the explicit
//! stages only see the couplings, whose size sets the stability limit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ladder::{HamiltonianSource, LadderConfig, StateVector, TridiagonalH};
use crate::observables;

/// `dt * coupling radius` must not exceed this for the fixed-step method.
pub const STABILITY_LIMIT: f64 = 0.05;
/// Single-step norm change that aborts a propagation.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;
/// Edge population above which the truncation is reported as too small.
pub const TRUNCATION_WARNING: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "method")]
pub enum Method {
    /// Classical fourth-order Runge-Kutta with a fixed step.
    Rk4Fixed { dt: f64 },
    /// Dormand-Prince 5(4) with local error control on the amplitudes.
    RkAdaptive { tolerance: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorSpec {
    pub method: Method,
    /// Record every this many steps (the final point is always recorded).
    pub record_stride: usize,
    pub keep_amplitudes: bool,
}

impl Default for IntegratorSpec {
    fn default() -> Self {
        Self::rk4(1e-3)
    }
}

impl IntegratorSpec {
    pub fn rk4(dt: f64) -> Self {
        Self {
            method: Method::Rk4Fixed { dt },
            record_stride: 100,
            keep_amplitudes: false,
        }
    }

    pub fn adaptive(tolerance: f64) -> Self {
        Self {
            method: Method::RkAdaptive { tolerance },
            record_stride: 20,
            keep_amplitudes: false,
        }
    }

    pub fn with_record_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn with_amplitudes(mut self, keep: bool) -> Self {
        self.keep_amplitudes = keep;
        self
    }

    /// Validate the step parameters against a Hamiltonian source.
    pub fn validate(&self, source: &impl HamiltonianSource) -> Result<()> {
        if self.record_stride == 0 {
            return Err(Error::invalid("record_stride", "must be >= 1"));
        }
        match self.method {
            Method::Rk4Fixed { dt } => {
                if !dt.is_finite() || dt <= 0.0 {
                    return Err(Error::invalid("dt", format!("must be > 0, got {dt}")));
                }
                let radius = source.coupling_radius() + 0.5 * dt * source.diagonal_drift_rate();
                let product = dt * radius;
                if product > STABILITY_LIMIT {
                    return Err(Error::Stability {
                        dt,
                        product,
                        limit: STABILITY_LIMIT,
                    });
                }
            }
            Method::RkAdaptive { tolerance } => {
                if !tolerance.is_finite() || tolerance <= 0.0 {
                    return Err(Error::invalid("tolerance", format!("must be > 0, got {tolerance}")));
                }
            }
        }
        Ok(())
    }
}

/// Recorded time series of one propagation.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub n_max: usize,
    pub q: f64,
    pub times: Vec<f64>,
    /// `populations[k][j]` is `|a_n|^2` for label `n = j - n_max` at `times[k]`.
    pub populations: Vec<Vec<f64>>,
    pub norm: Vec<f64>,
    pub mean_velocity: Vec<f64>,
    pub amplitudes: Option<Vec<Vec<Complex64>>>,
    /// Final amplitudes; absent for averages over several propagations.
    pub final_state: Option<StateVector>,
    pub steps: usize,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn labels(&self) -> impl Iterator<Item = i64> {
        let n = self.n_max as i64;
        -n..=n
    }

    pub fn index(&self, n: i64) -> Option<usize> {
        let idx = n + self.n_max as i64;
        (0..(2 * self.n_max + 1) as i64).contains(&idx).then_some(idx as usize)
    }

    pub fn final_populations(&self) -> &[f64] {
        self.populations
            .last()
            .expect("trajectory always holds the initial point")
    }

    pub fn final_population(&self, n: i64) -> f64 {
        self.index(n).map_or(0.0, |i| self.final_populations()[i])
    }

    /// Population time series of ladder state `n`.
    pub fn series(&self, n: i64) -> Vec<f64> {
        match self.index(n) {
            Some(i) => self.populations.iter().map(|p| p[i]).collect(),
            None => vec![0.0; self.times.len()],
        }
    }

    pub fn max_norm_deviation(&self) -> f64 {
        self.norm.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// Direction of the diagonal phase change between frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameDirection {
    /// `a_n -> a_n e^{+i n φ}`.
    RotatingToBare,
    /// `a_n -> a_n e^{-i n φ}`.
    BareToRotating,
}

/// Diagonal phase transformation between the rotating and bare frames.
pub fn frame_transform(state: &StateVector, phi: f64, direction: FrameDirection) -> StateVector {
    let sign = match direction {
        FrameDirection::RotatingToBare => 1.0,
        FrameDirection::BareToRotating => -1.0,
    };
    let mut out = state.clone();
    let n_max = state.n_max() as i64;
    for (j, a) in out.amplitudes_mut().iter_mut().enumerate() {
        let n = j as i64 - n_max;
        *a *= Complex64::from_polar(1.0, sign * n as f64 * phi);
    }
    out
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);

/// Workspace for the interaction-picture steppers.
pub struct Stepper {
    dim: usize,
    h: Vec<TridiagonalH>,
    diag: Vec<f64>,
    phases: Vec<Vec<Complex64>>,
    stages: Vec<Vec<Complex64>>,
    y: Vec<Complex64>,
    acc: Vec<Complex64>,
}

/// Dormand-Prince 5(4) tableau.
const DP_C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

impl Stepper {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            h: (0..8).map(|_| TridiagonalH::zeros(dim)).collect(),
            diag: vec![0.0; dim],
            phases: vec![vec![ZERO; dim]; 7],
            stages: vec![vec![ZERO; dim]; 7],
            y: vec![ZERO; dim],
            acc: vec![ZERO; dim],
        }
    }

    /// `out = -i (H - diag) x`.
    fn apply_coupling(h: &TridiagonalH, diag: &[f64], x: &[Complex64], out: &mut [Complex64]) {
        h.apply(x, out);
        for ((o, xi), d) in out.iter_mut().zip(x).zip(diag) {
            *o = MINUS_I * (*o - xi * d);
        }
    }

    fn freeze_diagonal(&mut self, source: &impl HamiltonianSource, t_mid: f64) {
        source.fill(t_mid, &mut self.h[7]);
        self.diag.copy_from_slice(&self.h[7].diag);
    }

    fn fill_phases(&mut self, slot: usize, theta: f64) {
        for (p, d) in self.phases[slot].iter_mut().zip(&self.diag) {
            *p = Complex64::from_polar(1.0, -d * theta);
        }
    }

    /// One fourth-order step of size `dt` from `t`, in place.
    pub fn rk4_step(&mut self, source: &impl HamiltonianSource, a: &mut [Complex64], t: f64, dt: f64) {
        debug_assert_eq!(a.len(), self.dim);
        let half = 0.5 * dt;
        self.freeze_diagonal(source, t + half);
        source.fill(t, &mut self.h[0]);
        source.fill(t + dt, &mut self.h[2]);
        self.fill_phases(0, half);
        let (e1, rest) = self.phases.split_at_mut(1);
        let e1 = &e1[0];
        let e2 = &mut rest[0];
        for (p2, p1) in e2.iter_mut().zip(e1) {
            *p2 = p1 * p1;
        }
        let [k1, k2, k3, k4, ..] = &mut self.stages[..] else {
            unreachable!()
        };
        // The midpoint Hamiltonian has exactly the frozen diagonal.
        let hm = &self.h[7];
        Self::apply_coupling(&self.h[0], &self.diag, a, k1);
        for j in 0..self.dim {
            self.y[j] = e1[j] * (a[j] + half * k1[j]);
        }
        Self::apply_coupling(hm, &self.diag, &self.y, k2);
        for j in 0..self.dim {
            self.y[j] = e1[j] * a[j] + half * k2[j];
        }
        Self::apply_coupling(hm, &self.diag, &self.y, k3);
        for j in 0..self.dim {
            self.y[j] = e2[j] * a[j] + dt * e1[j] * k3[j];
        }
        Self::apply_coupling(&self.h[2], &self.diag, &self.y, k4);
        let w = dt / 6.0;
        for j in 0..self.dim {
            a[j] = e2[j] * a[j] + w * (e2[j] * k1[j] + 2.0 * e1[j] * (k2[j] + k3[j]) + k4[j]);
        }
    }

    /// One Dormand-Prince attempt of size `dt`; writes the fifth-order solution into `out`
    /// and returns the max-norm local error estimate.
    pub fn dp_step(
        &mut self,
        source: &impl HamiltonianSource,
        a: &[Complex64],
        out: &mut [Complex64],
        t: f64,
        dt: f64,
    ) -> f64 {
        self.freeze_diagonal(source, t + 0.5 * dt);
        for (i, &c) in DP_C.iter().enumerate() {
            self.fill_phases(i, c * dt);
        }
        for i in 0..7 {
            // z-picture argument, mapped to the lab picture at t + c_i dt.
            for j in 0..self.dim {
                let mut z = a[j];
                for (s, &aij) in DP_A[i].iter().enumerate().take(i) {
                    if aij != 0.0 {
                        z += dt * aij * self.stages[s][j];
                    }
                }
                self.y[j] = self.phases[i][j] * z;
            }
            source.fill(t + DP_C[i] * dt, &mut self.h[i]);
            Self::apply_coupling(&self.h[i], &self.diag, &self.y, &mut self.acc);
            for j in 0..self.dim {
                self.stages[i][j] = self.phases[i][j].conj() * self.acc[j];
            }
        }
        let mut err = 0.0f64;
        for j in 0..self.dim {
            let mut z = a[j];
            let mut e = ZERO;
            for i in 0..7 {
                z += dt * DP_B[i] * self.stages[i][j];
                e += dt * DP_E[i] * self.stages[i][j];
            }
            out[j] = self.phases[6][j] * z;
            err = err.max(e.norm());
        }
        err
    }
}

fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// Integrate `amplitudes` over `t_span` under `source`, invoking `record(t, a)` at the
/// initial time, every `record_stride` steps and at the final time.
///
/// Returns the number of accepted steps.
pub fn evolve(
    source: &impl HamiltonianSource,
    spec: &IntegratorSpec,
    t_span: (f64, f64),
    amplitudes: &mut [Complex64],
    mut record: impl FnMut(f64, &[Complex64]),
) -> Result<usize> {
    spec.validate(source)?;
    let (t0, t1) = t_span;
    if !(t1 > t0) {
        return Err(Error::invalid("t_span", format!("end {t1} must exceed start {t0}")));
    }
    if amplitudes.len() != source.dim() {
        return Err(Error::invalid("amplitudes", "dimension does not match the Hamiltonian"));
    }
    let mut stepper = Stepper::new(source.dim());
    record(t0, amplitudes);
    match spec.method {
        Method::Rk4Fixed { dt } => {
            let n_steps = ((t1 - t0) / dt - 1e-9).ceil().max(1.0) as usize;
            let h = (t1 - t0) / n_steps as f64;
            let mut before = norm_sqr(amplitudes);
            for k in 0..n_steps {
                let t = t0 + k as f64 * h;
                stepper.rk4_step(source, amplitudes, t, h);
                let after = norm_sqr(amplitudes);
                if (after - before).abs() > NORM_DRIFT_LIMIT || !after.is_finite() {
                    return Err(Error::NormDrift {
                        time: t + h,
                        drift: (after - before).abs(),
                    });
                }
                before = after;
                if (k + 1) % spec.record_stride == 0 || k + 1 == n_steps {
                    let t_rec = if k + 1 == n_steps { t1 } else { t0 + (k + 1) as f64 * h };
                    record(t_rec, amplitudes);
                }
            }
            Ok(n_steps)
        }
        Method::RkAdaptive { tolerance } => {
            let mut t = t0;
            let mut h = (1e-2f64).min(t1 - t0);
            let mut trial = vec![ZERO; amplitudes.len()];
            let mut accepted = 0usize;
            let mut before = norm_sqr(amplitudes);
            while t < t1 {
                let last = t + h >= t1;
                let step = if last { t1 - t } else { h };
                let err = stepper.dp_step(source, amplitudes, &mut trial, t, step);
                if err <= tolerance {
                    let after = norm_sqr(&trial);
                    if (after - before).abs() > NORM_DRIFT_LIMIT || !after.is_finite() {
                        return Err(Error::NormDrift {
                            time: t + step,
                            drift: (after - before).abs(),
                        });
                    }
                    before = after;
                    amplitudes.copy_from_slice(&trial);
                    t = if last { t1 } else { t + step };
                    accepted += 1;
                    if accepted.is_multiple_of(spec.record_stride) || last {
                        record(t, amplitudes);
                    }
                }
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * (tolerance / err).powf(0.2)).clamp(0.2, 5.0)
                };
                h = step * factor;
                if h < 1e-12 * (1.0 + t.abs()) {
                    return Err(Error::StepUnderflow { time: t, step: h });
                }
            }
            Ok(accepted)
        }
    }
}

/// Single step `state(t) -> state(t + dt)` under `source`.
pub fn step(state: &StateVector, source: &impl HamiltonianSource, t: f64, dt: f64) -> Result<StateVector> {
    IntegratorSpec::rk4(dt).validate(source)?;
    let mut out = state.clone();
    let before = out.norm_sqr();
    Stepper::new(state.dim()).rk4_step(source, out.amplitudes_mut(), t, dt);
    let drift = (out.norm_sqr() - before).abs();
    if drift > NORM_DRIFT_LIMIT {
        return Err(Error::NormDrift { time: t + dt, drift });
    }
    out.time = t + dt;
    Ok(out)
}

/// Propagate `initial` across `t_span` on the ladder described by `cfg`.
pub fn propagate(
    cfg: &LadderConfig,
    spec: &IntegratorSpec,
    t_span: (f64, f64),
    initial: &StateVector,
) -> Result<Trajectory> {
    if initial.n_max() != cfg.n_max() {
        return Err(Error::invalid(
            "initial",
            format!("state has n_max {} but the ladder has {}", initial.n_max(), cfg.n_max()),
        ));
    }
    let n_max = cfg.n_max();
    let q = cfg.q();
    let mut times = Vec::new();
    let mut populations = Vec::new();
    let mut norm = Vec::new();
    let mut mean_velocity = Vec::new();
    let mut amplitudes = spec.keep_amplitudes.then(Vec::new);
    let mut a = initial.amplitudes().to_vec();
    let steps = evolve(cfg, spec, t_span, &mut a, |t, amps| {
        let pops: Vec<f64> = amps.iter().map(|x| x.norm_sqr()).collect();
        times.push(t);
        norm.push(pops.iter().sum());
        mean_velocity.push(observables::mean_velocity_of(&pops, n_max, q));
        populations.push(pops);
        if let Some(store) = amplitudes.as_mut() {
            store.push(amps.to_vec());
        }
    })?;
    let mut final_state = StateVector::from_amplitudes(a, t_span.1)?;
    final_state.time = t_span.1;
    let mut warnings = Vec::new();
    let edge = final_state
        .amplitude(-(n_max as i64))
        .norm_sqr()
        .max(final_state.amplitude(n_max as i64).norm_sqr());
    if edge > TRUNCATION_WARNING {
        warnings.push(format!(
            "truncation: edge population {edge:.3e} exceeds {TRUNCATION_WARNING:e}; increase n_max"
        ));
    }
    Ok(Trajectory {
        n_max,
        q,
        times,
        populations,
        norm,
        mean_velocity,
        amplitudes,
        final_state: Some(final_state),
        steps,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ladder::{ChirpProfile, Drive, EnvelopeShape, Frame, PulseEnvelope};

    /// Fixed Hermitian tridiagonal `H(t) = A + sin(t) B` on `dim` levels.
    struct Driven {
        base: TridiagonalH,
        mod_: TridiagonalH,
    }

    impl HamiltonianSource for Driven {
        fn dim(&self) -> usize {
            self.base.dim()
        }
        fn fill(&self, t: f64, h: &mut TridiagonalH) {
            let s = t.sin();
            for j in 0..self.dim() {
                h.diag[j] = self.base.diag[j] + s * self.mod_.diag[j];
            }
            for j in 0..self.dim() - 1 {
                h.offdiag[j] = self.base.offdiag[j] + s * self.mod_.offdiag[j];
            }
        }
        fn coupling_radius(&self) -> f64 {
            let off = |h: &TridiagonalH| h.offdiag.iter().map(|c| c.norm()).fold(0.0, f64::max);
            2.0 * (off(&self.base) + off(&self.mod_))
        }
        fn diagonal_drift_rate(&self) -> f64 {
            self.mod_.diag.iter().map(|d| d.abs()).fold(0.0, f64::max)
        }
    }

    fn constant(diag: Vec<f64>, off: Complex64) -> impl HamiltonianSource {
        let dim = diag.len();
        Driven {
            base: TridiagonalH {
                diag,
                offdiag: vec![off; dim - 1],
            },
            mod_: TridiagonalH::zeros(dim),
        }
    }

    #[test]
    fn zero_hamiltonian_leaves_state_unchanged() {
        let src = constant(vec![0.0; 5], ZERO);
        let s =
            StateVector::from_amplitudes((0..5).map(|k| Complex64::new(0.1 * k as f64, 0.3)).collect(), 0.0).unwrap();
        let out = step(&s, &src, 0.0, 0.01).unwrap();
        assert_eq!(out.amplitudes(), s.amplitudes());
    }

    #[test]
    fn constant_diagonal_is_exact_phase() {
        let energies = vec![3.0, -1.0, 0.0, 7.5, 400.0];
        let src = constant(energies.clone(), ZERO);
        let mut s = StateVector::from_amplitudes(vec![Complex64::new(0.2, 0.0); 5], 0.0).unwrap();
        s.normalize();
        let dt = 0.01;
        let out = step(&s, &src, 0.0, dt).unwrap();
        for j in 0..5 {
            let expect = s.amplitudes()[j] * Complex64::from_polar(1.0, -energies[j] * dt);
            assert!((out.amplitudes()[j] - expect).norm() < 1e-15);
        }
    }

    #[test]
    fn stability_rule_enforced() {
        let src = constant(vec![0.0; 3], Complex64::new(1.0, 0.0));
        assert!(IntegratorSpec::rk4(0.02).validate(&src).is_ok());
        assert!(matches!(
            IntegratorSpec::rk4(0.05).validate(&src),
            Err(Error::Stability { .. })
        ));
        assert!(IntegratorSpec::rk4(-1.0).validate(&src).is_err());
        assert!(IntegratorSpec::adaptive(0.0).validate(&src).is_err());
    }

    #[test]
    fn frame_transform_round_trip() {
        let s =
            StateVector::from_amplitudes((0..7).map(|k| Complex64::new(0.1 * k as f64, 0.05)).collect(), 0.0).unwrap();
        assert_eq!(frame_transform(&s, 0.0, FrameDirection::RotatingToBare), s);
        let there = frame_transform(&s, 1.234, FrameDirection::RotatingToBare);
        let back = frame_transform(&there, 1.234, FrameDirection::BareToRotating);
        for (a, b) in back.amplitudes().iter().zip(s.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
        for (a, b) in there.amplitudes().iter().zip(s.amplitudes()) {
            assert!((a.norm_sqr() - b.norm_sqr()).abs() < 1e-15);
        }
    }

    fn small_mirror(peak: f64) -> LadderConfig {
        let env = PulseEnvelope::new(peak, 10.0, 10.0, 60.0, 10.0, EnvelopeShape::SinSquared).unwrap();
        LadderConfig::mirror(8, Drive::new(env, ChirpProfile::new(0.1, 10.0, 0.0))).unwrap()
    }

    #[test]
    fn no_coupling_keeps_ground_state() {
        let cfg = small_mirror(0.0);
        let traj = propagate(&cfg, &IntegratorSpec::rk4(1e-2), (0.0, 100.0), &StateVector::ground(8)).unwrap();
        for p in traj.series(0) {
            assert_eq!(p, 1.0);
        }
        assert_eq!(*traj.times.last().unwrap(), 100.0);
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn records_stride_plus_final() {
        let cfg = small_mirror(0.3);
        let spec = IntegratorSpec::rk4(0.01).with_record_stride(7).with_amplitudes(true);
        let traj = propagate(&cfg, &spec, (0.0, 1.0), &StateVector::ground(8)).unwrap();
        // 100 steps: initial + 14 strided + final.
        assert_eq!(traj.times.len(), 16);
        assert_eq!(traj.amplitudes.as_ref().unwrap().len(), 16);
        assert_eq!(traj.steps, 100);
    }

    #[test]
    fn mismatched_initial_state_rejected() {
        let cfg = small_mirror(0.3);
        assert!(propagate(&cfg, &IntegratorSpec::default(), (0.0, 1.0), &StateVector::ground(3)).is_err());
        assert!(propagate(&cfg, &IntegratorSpec::default(), (1.0, 1.0), &StateVector::ground(8)).is_err());
    }

    #[test]
    fn adaptive_agrees_with_fixed_step() {
        let cfg = small_mirror(0.5);
        let init = StateVector::ground(8);
        let fixed = propagate(&cfg, &IntegratorSpec::rk4(1e-3), (0.0, 100.0), &init).unwrap();
        let adapt = propagate(&cfg, &IntegratorSpec::adaptive(1e-11), (0.0, 100.0), &init).unwrap();
        for (a, b) in fixed.final_populations().iter().zip(adapt.final_populations()) {
            assert!((a - b).abs() < 1e-8, "{a} vs {b}");
        }
        assert!(adapt.max_norm_deviation() < 1e-9);
    }

    #[test]
    fn truncation_warning_when_edge_populated() {
        let env = PulseEnvelope::new(0.7, 0.0, 5.0, 60.0, 5.0, EnvelopeShape::SinSquared).unwrap();
        let cfg = LadderConfig::mirror(2, Drive::new(env, ChirpProfile::new(0.1, 10.0, 0.0)))
            .unwrap()
            .with_frame(Frame::Rotating);
        let traj = propagate(&cfg, &IntegratorSpec::rk4(1e-2), (0.0, 70.0), &StateVector::ground(2)).unwrap();
        assert!(!traj.warnings.is_empty());
    }
}
