//! Packaged experiments: duration targeting, splitter variants, Bloch scaling,
//! calibration and quasi-momentum spread.

use chirped_bragg::scenarios::*;
use chirped_bragg::*;

fn quick(target: i64) -> MirrorParams {
    MirrorParams {
        target,
        ..MirrorParams::default()
    }
}

#[test]
fn plateau_sets_the_final_rung() {
    for n in [5, 10, 25] {
        let m = run_mirror(&quick(n)).unwrap().metrics;
        assert_eq!(m.dominant_level, n);
        assert!(m.fidelity >= 0.99, "n = {n}: {}", m.fidelity);
    }
}

#[test]
fn two_periods_shorter_stops_two_rungs_early() {
    let mut exp = MirrorParams::default().experiment().unwrap();
    let drive = *exp.ladder.primary_drive();
    let e = drive.envelope;
    let env = PulseEnvelope::new(
        e.peak(),
        e.start(),
        e.ramp_up(),
        e.plateau() - 40.0,
        e.ramp_down(),
        e.shape(),
    )
    .unwrap();
    exp.ladder = exp
        .ladder
        .with_drives(Drives::Mirror(Drive::new(env, drive.chirp)))
        .unwrap();
    exp.t_span.1 = env.end();
    let m = exp.run().unwrap().metrics;
    assert_eq!(m.dominant_level, 23);
    assert!(m.final_population(23) >= 0.98, "{}", m.final_population(23));
}

#[test]
fn longer_splitter_reaches_27() {
    let m = run_splitter(&SplitterParams {
        target: 27,
        ..SplitterParams::default()
    })
    .unwrap()
    .metrics;
    assert_eq!(m.dominant_level.abs(), 27);
    assert!(m.fidelity >= 0.98, "{}", m.fidelity);
    assert!(m.asymmetry.unwrap() <= 1e-9);
}

#[test]
fn splitter_with_second_field_off_is_the_mirror() {
    let split = SplitterParams {
        target: 5,
        omega0_2: Some(0.0),
        pulse: PulsePlan::mirror(),
        t_c: 10.0,
        ..SplitterParams::default()
    }
    .experiment()
    .unwrap();
    let drive = *split.ladder.primary_drive();
    let mirror = LadderConfig::mirror(split.ladder.n_max(), drive)
        .unwrap()
        .with_frame(Frame::Bare);
    let a = propagate(
        &split.ladder,
        &split.integrator,
        split.t_span,
        &split.initial_state().unwrap(),
    )
    .unwrap();
    let b = propagate(
        &mirror,
        &split.integrator,
        split.t_span,
        &split.initial_state().unwrap(),
    )
    .unwrap();
    assert_eq!(a.populations, b.populations);
    assert!(b.final_population(5) >= 0.99);
}

#[test]
fn bloch_period_scales_inversely_with_chirp_over_a_decade() {
    // Fixed adiabaticity Ω²/α keeps both runs in the same regime.
    let regimes = [
        BlochRegime::new("slow", 0.005, 0.15 * 0.5f64.sqrt(), 5),
        BlochRegime::new("fast", 0.05, 0.15 * 5f64.sqrt(), 5),
    ];
    for s in run_bloch(&regimes, IntegratorSpec::default()).unwrap() {
        let expected = 2.0 / s.regime.alpha;
        let p = s.period.unwrap();
        assert!(
            (p / expected - 1.0).abs() <= 0.03,
            "{}: {p} vs {expected}",
            s.regime.label
        );
    }
}

#[test]
fn overlapping_crossings_are_flagged_but_still_run() {
    let out = run_mirror(&MirrorParams {
        target: 3,
        pulse: PulsePlan {
            omega0: 2.5,
            ..PulsePlan::mirror()
        },
        ..MirrorParams::default()
    })
    .unwrap();
    assert!(out.adiabaticity.iter().any(|r| r.flagged && r.ratio < 2.0));
    assert!(out.warnings.iter().any(|w| w.contains("adiabaticity")));
}

fn small_spec(omega0: (f64, f64), steps: usize) -> CalibrationSpec {
    CalibrationSpec {
        base: quick(5),
        omega0,
        omega0_steps: steps,
        ramp_up: (16.0, 16.0),
        ramp_up_steps: 1,
        ramp_down: (16.0, 16.0),
        ramp_down_steps: 1,
        refinements: 2,
        ..CalibrationSpec::default()
    }
}

#[test]
fn calibration_finds_smallest_feasible_coupling() {
    let cal = calibrate(&small_spec((0.3, 0.7), 3)).unwrap();
    let c = cal.chosen;
    assert!(c.feasible && c.fidelity >= 0.99 && c.max_transient <= 0.06);
    assert!(c.omega0 <= 0.5 && c.omega0 > 0.3, "{c:?}");
    // Nothing evaluated below the choice is feasible.
    assert!(cal
        .evaluated
        .iter()
        .filter(|p| p.omega0 < c.omega0)
        .all(|p| !p.feasible));
    // Deterministic given the grid.
    assert_eq!(calibrate(&small_spec((0.3, 0.7), 3)).unwrap(), cal);
}

#[test]
fn calibration_reports_infeasible_targets() {
    let mut exact = small_spec((0.7, 0.7), 1);
    exact.target_fidelity = 1.0;
    match calibrate(&exact) {
        Err(Error::Infeasible(msg)) => assert!(msg.contains("best found")),
        other => panic!("{other:?}"),
    }
    match calibrate(&small_spec((0.0, 0.01), 2)) {
        Err(Error::Infeasible(_)) => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn spread_of_zero_is_the_plain_run() {
    let exp = quick(5).experiment().unwrap();
    let plain = exp.run().unwrap().metrics;
    let spread = spread_average(&exp, 0.0, 21).unwrap().metrics;
    assert_eq!(plain, spread);
    let curve = q_spread_scan(&exp, &[0.0, 0.1, 0.3], 5).unwrap();
    assert_eq!(curve.metrics[0].fidelity, plain.fidelity);
    let f = curve.fidelities();
    assert!(f.windows(2).all(|w| w[1] <= w[0]), "{f:?}");
}

#[test]
fn single_offset_is_reported() {
    let exp = quick(5).experiment().unwrap();
    let shifted = Experiment {
        ladder: exp.ladder.with_q(0.05).unwrap(),
        ..exp
    };
    let m = shifted.run().unwrap().metrics;
    assert!(m.fidelity > 0.9 && m.fidelity <= 1.0);
    assert!((m.final_populations.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
}

#[test]
fn identical_parameters_are_bit_identical() {
    let a = run_mirror(&quick(4)).unwrap();
    let b = run_mirror(&quick(4)).unwrap();
    assert_eq!(a.metrics, b.metrics);
    assert_eq!(a.trajectory, b.trajectory);
}

#[test]
fn reversed_chirp_mirrors_small_ladder() {
    let exp = quick(6).experiment().unwrap();
    let up = exp.run().unwrap().trajectory;
    let down = exp.reversed().unwrap().run().unwrap().trajectory;
    for n in up.labels() {
        assert!((up.final_population(n) - down.final_population(-n)).abs() <= 1e-8);
    }
}
