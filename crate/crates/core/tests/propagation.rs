//! Propagator checks against independent oracles: analytic Landau-Zener survival,
//! Richardson-style order estimates, frame and truncation equivalence, reflection symmetry.

mod common;

use chirped_bragg::ladder::HamiltonianSource;
use chirped_bragg::propagator::{frame_transform, step, FrameDirection};
use chirped_bragg::scenarios::{MirrorParams, SplitterParams};
use chirped_bragg::*;
use common::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn landau_zener_survival_matches_analytic_formula() {
    for alpha in [0.05, 0.1, 0.2] {
        let (got, want) = (lz_survival(0.1, alpha), lz_oracle(0.1, alpha));
        assert!((got - want).abs() <= 1e-3, "alpha {alpha}: survival {got} vs {want}");
    }
}

#[test]
fn rk4_global_error_ratio_is_sixteen() {
    let ratio = rk4_global_ratio();
    assert!((ratio - 16.0).abs() <= 2.0, "ratio {ratio}");
}

/// Deterministic pseudo-random Hermitian tridiagonal source.
struct Fixed(TridiagonalH);

impl HamiltonianSource for Fixed {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn fill(&self, _t: f64, h: &mut TridiagonalH) {
        h.clone_from(&self.0);
    }
    fn coupling_radius(&self) -> f64 {
        2.0 * self.0.offdiag.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }
}

fn lcg(seed: &mut u64) -> f64 {
    *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    (*seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
}

#[test]
fn single_step_local_error_is_fifth_order() {
    let mut seed = 7;
    let mut h = TridiagonalH::zeros(5);
    for d in h.diag.iter_mut() {
        *d = 4.0 * lcg(&mut seed);
    }
    for o in h.offdiag.iter_mut() {
        *o = c(lcg(&mut seed), lcg(&mut seed));
    }
    let src = Fixed(h);
    let mut amps: Vec<Complex64> = (0..5).map(|_| c(lcg(&mut seed), lcg(&mut seed))).collect();
    let n = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= n);
    let s0 = StateVector::from_amplitudes(amps, 0.0).unwrap();
    let err = |dt: f64| {
        let one = step(&s0, &src, 0.0, dt).unwrap();
        // dt/10 substeps, Richardson-corrected for their own fourth-order error.
        let fine = |sub: usize| {
            let mut s = s0.clone();
            for k in 0..sub {
                s = step(&s, &src, k as f64 * dt / sub as f64, dt / sub as f64).unwrap();
            }
            s.into_amplitudes()
        };
        let (f10, f20) = (fine(10), fine(20));
        let reference: Vec<Complex64> = f20.iter().zip(&f10).map(|(b, a)| b + (b - a) / 15.0).collect();
        amp_err(one.amplitudes(), &reference)
    };
    let ratio = err(0.04) / err(0.02);
    assert!((ratio - 32.0).abs() <= 4.0, "local error ratio {ratio}");
}

fn small_mirror(frame: Frame, n_max: Option<usize>) -> Trajectory {
    let p = MirrorParams {
        target: 10,
        n_max,
        frame,
        ..MirrorParams::default()
    };
    let exp = p.experiment().unwrap();
    propagate(&exp.ladder, &exp.integrator, exp.t_span, &exp.initial_state().unwrap()).unwrap()
}

#[test]
fn bare_and_rotating_frames_agree_pointwise() {
    let rot = small_mirror(Frame::Rotating, None);
    let bare = small_mirror(Frame::Bare, None);
    let worst = trajectory_diff(&rot, &bare);
    assert!(worst <= 1e-8, "{worst:e}");
    assert!(rot.max_norm_deviation() <= 1e-9);
    assert!(bare.max_norm_deviation() <= 1e-9);
}

#[test]
fn truncation_converged_at_default_margin() {
    let base = small_mirror(Frame::Rotating, None);
    let wide = small_mirror(Frame::Rotating, Some(base.n_max + 10));
    let worst = base
        .labels()
        .map(|n| (base.final_population(n) - wide.final_population(n)).abs())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-8, "{worst:e}");
}

#[test]
fn final_state_transforms_between_frames() {
    let p = MirrorParams {
        target: 4,
        ..MirrorParams::default()
    };
    let exp = p.experiment().unwrap();
    let spec = IntegratorSpec::rk4(1e-3);
    let init = exp.initial_state().unwrap();
    let rot = propagate(&exp.ladder, &spec, exp.t_span, &init)
        .unwrap()
        .final_state
        .unwrap();
    let bare = propagate(&exp.ladder.with_frame(Frame::Bare), &spec, exp.t_span, &init)
        .unwrap()
        .final_state
        .unwrap();
    let phi = exp.ladder.primary_drive().chirp.phase(exp.t_span.1);
    let mapped = frame_transform(&rot, phi, FrameDirection::RotatingToBare);
    // Amplitudes agree up to the global phase left by the kinetic term convention.
    let g: Complex64 = bare
        .amplitudes()
        .iter()
        .zip(mapped.amplitudes())
        .map(|(b, m)| b * m.conj())
        .sum();
    let g = g / g.norm();
    let err = amp_err(
        bare.amplitudes(),
        &mapped.amplitudes().iter().map(|m| m * g).collect::<Vec<_>>(),
    );
    assert!(err <= 1e-7, "{err:e}");
}

#[test]
fn splitter_reflection_symmetry_pointwise() {
    let p = SplitterParams {
        target: 10,
        ..SplitterParams::default()
    };
    let exp = p.experiment().unwrap();
    let traj = propagate(&exp.ladder, &exp.integrator, exp.t_span, &exp.initial_state().unwrap()).unwrap();
    let worst = reflection_asymmetry(&traj);
    assert!(worst <= 1e-9, "{worst:e}");
}

#[test]
fn constant_coupling_without_pulse_stays_put() {
    let env = PulseEnvelope::new(0.0, 0.0, 5.0, 50.0, 5.0, EnvelopeShape::SinSquared).unwrap();
    let cfg = LadderConfig::mirror(6, Drive::new(env, ChirpProfile::new(0.1, 10.0, 0.0))).unwrap();
    let t = propagate(&cfg, &IntegratorSpec::rk4(1e-2), (0.0, 60.0), &StateVector::ground(6)).unwrap();
    assert!(t.series(0).iter().all(|&p| p == 1.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn norm_is_conserved(peak in 0.0f64..1.0, alpha in 0.02f64..0.3, q in -1.0f64..1.0, bare in any::<bool>()) {
        let env = PulseEnvelope::new(peak, 0.0, 4.0, 20.0, 4.0, EnvelopeShape::SinSquared).unwrap();
        let frame = if bare { Frame::Bare } else { Frame::Rotating };
        let cfg = LadderConfig::mirror(6, Drive::new(env, ChirpProfile::new(alpha, 5.0, 0.0)))
            .unwrap()
            .with_frame(frame)
            .with_q(q)
            .unwrap();
        let t = propagate(&cfg, &IntegratorSpec::rk4(2e-3), (0.0, 28.0), &StateVector::ground(6)).unwrap();
        prop_assert!(t.max_norm_deviation() <= 1e-9);
        prop_assert!(t.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn frame_transform_preserves_populations(phi in -50.0f64..50.0, seed in any::<u64>()) {
        let mut s = seed;
        let amps: Vec<Complex64> = (0..9).map(|_| c(lcg(&mut s), lcg(&mut s))).collect();
        let st = StateVector::from_amplitudes(amps, 0.0).unwrap();
        let f = frame_transform(&st, phi, FrameDirection::RotatingToBare);
        for (a, b) in st.amplitudes().iter().zip(f.amplitudes()) {
            prop_assert!((a.norm_sqr() - b.norm_sqr()).abs() <= 1e-14);
        }
        let back = frame_transform(&f, phi, FrameDirection::BareToRotating);
        prop_assert!(amp_err(back.amplitudes(), st.amplitudes()) <= 1e-12);
    }
}
