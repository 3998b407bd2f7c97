//! Oracles shared by the integration test targets.
#![allow(dead_code)]

use chirped_bragg::ladder::HamiltonianSource;
use chirped_bragg::propagator::evolve;
use chirped_bragg::spectrum::instantaneous_spectrum;
use chirped_bragg::*;
use num_complex::Complex64;

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn amp_err(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Largest pointwise population difference between two recordings on the same grid.
pub fn trajectory_diff(a: &Trajectory, b: &Trajectory) -> f64 {
    assert_eq!(a.times, b.times);
    a.populations
        .iter()
        .zip(&b.populations)
        .map(|(x, y)| max_abs_diff(x, y))
        .fold(0.0, f64::max)
}

/// Largest `|P_n(t) - P_{-n}(t)|` over a recording.
pub fn reflection_asymmetry(t: &Trajectory) -> f64 {
    t.populations
        .iter()
        .map(|row| {
            let rev: Vec<f64> = row.iter().rev().copied().collect();
            max_abs_diff(row, &rev)
        })
        .fold(0.0, f64::max)
}

/// States `{0, 1}` only, constant coupling, linear sweep through their crossing.
pub struct TwoLevel {
    pub omega: f64,
    pub chirp: ChirpProfile,
}

impl HamiltonianSource for TwoLevel {
    fn dim(&self) -> usize {
        2
    }
    fn fill(&self, t: f64, h: &mut TridiagonalH) {
        let r = self.chirp.rate(t);
        h.diag[0] = quasi_energy(0, r, 0.0);
        h.diag[1] = quasi_energy(1, r, 0.0);
        h.offdiag[0] = Complex64::new(-self.omega, 0.0);
    }
    fn coupling_radius(&self) -> f64 {
        2.0 * self.omega
    }
    fn diagonal_drift_rate(&self) -> f64 {
        self.chirp.slope().abs()
    }
}

/// Adiabatic eigenvector with the larger weight on diabatic state 0.
fn adiabatic_zero(src: &TwoLevel, t: f64) -> Vec<Complex64> {
    let s = instantaneous_spectrum(&src.hamiltonian(t), true);
    s.vectors
        .unwrap()
        .into_iter()
        .max_by(|a, b| a[0].norm().total_cmp(&b[0].norm()))
        .unwrap()
}

/// Diabatic survival through one crossing, swept over ±20 gap widths.
///
/// Start and end are projected on the adiabatic basis so the result is free of the
/// constant-coupling dressing of the diabatic states at finite detuning.
pub fn lz_survival(omega: f64, alpha: f64) -> f64 {
    let chirp = ChirpProfile::new(alpha, 0.0, 0.0);
    let t_x = chirp.time_of_rate(-1.0).unwrap();
    let half = 20.0 * 2.0 * omega / alpha;
    let src = TwoLevel { omega, chirp };
    let span = (t_x - half, t_x + half);
    let mut a = adiabatic_zero(&src, span.0);
    evolve(&src, &IntegratorSpec::rk4(1e-3), span, &mut a, |_, _| {}).unwrap();
    let v = adiabatic_zero(&src, span.1);
    v.iter()
        .zip(&a)
        .map(|(x, y)| x.conj() * y)
        .sum::<Complex64>()
        .norm_sqr()
}

pub fn lz_oracle(omega: f64, alpha: f64) -> f64 {
    (-2.0 * std::f64::consts::PI * omega * omega / alpha).exp()
}

fn order_ladder() -> LadderConfig {
    let env = PulseEnvelope::new(0.5, 0.0, 5.0, 30.0, 5.0, EnvelopeShape::SinSquared).unwrap();
    LadderConfig::mirror(4, Drive::new(env, ChirpProfile::new(0.1, 10.0, 0.0))).unwrap()
}

fn final_amplitudes(cfg: &LadderConfig, dt: f64, span: (f64, f64)) -> Vec<Complex64> {
    let t = propagate(cfg, &IntegratorSpec::rk4(dt), span, &StateVector::ground(cfg.n_max())).unwrap();
    t.final_state.unwrap().into_amplitudes()
}

/// Global error ratio under dt halving (0.03 -> 0.015) against a dt/20 reference.
pub fn rk4_global_ratio() -> f64 {
    let cfg = order_ladder();
    let span = (0.0, 40.0);
    let reference = final_amplitudes(&cfg, 0.0015, span);
    let e1 = amp_err(&final_amplitudes(&cfg, 0.03, span), &reference);
    let e2 = amp_err(&final_amplitudes(&cfg, 0.015, span), &reference);
    e1 / e2
}

/// Constant coupling around the first crossings so every gap sees the plateau value.
pub fn flat_mirror(alpha: f64, peak: f64, n_max: usize) -> LadderConfig {
    let env = PulseEnvelope::new(peak, -110.0, 10.0, 2100.0, 10.0, EnvelopeShape::SinSquared).unwrap();
    LadderConfig::mirror(n_max, Drive::new(env, ChirpProfile::new(alpha, 10.0, 0.0))).unwrap()
}
