//! Reductions of states and trajectories to measured quantities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ladder::StateVector;
use crate::propagator::Trajectory;

/// `|a_n|^2` in storage order.
pub fn populations(state: &StateVector) -> Vec<f64> {
    state.amplitudes().iter().map(|a| a.norm_sqr()).collect()
}

/// Mean velocity in units of `2ħk/m`: `Σ n P_n + q/2`.
pub fn mean_velocity(state: &StateVector, q: f64) -> f64 {
    mean_velocity_of(&populations(state), state.n_max(), q)
}

pub(crate) fn mean_velocity_of(pops: &[f64], n_max: usize, q: f64) -> f64 {
    let total: f64 = pops.iter().sum();
    let first: f64 = pops
        .iter()
        .enumerate()
        .map(|(j, p)| (j as f64 - n_max as f64) * p)
        .sum();
    first + 0.5 * q * total
}

/// Residual of a least-squares straight-line fit.
pub fn detrend(times: &[f64], values: &[f64]) -> Vec<f64> {
    let n = times.len() as f64;
    let mt = times.iter().sum::<f64>() / n;
    let mv = values.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (t, v) in times.iter().zip(values) {
        sxy += (t - mt) * (v - mv);
        sxx += (t - mt) * (t - mt);
    }
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    times
        .iter()
        .zip(values)
        .map(|(t, v)| v - (mv + slope * (t - mt)))
        .collect()
}

/// Linearly interpolated zero crossings; samples within round-off of zero are skipped.
fn zero_crossings(times: &[f64], values: &[f64]) -> Vec<f64> {
    let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let eps = (1e-9 * scale).max(1e-12);
    let mut out = Vec::new();
    let mut last: Option<(f64, f64)> = None;
    for (&t, &v) in times.iter().zip(values) {
        if v.abs() <= eps {
            continue;
        }
        if let Some((tp, vp)) = last {
            if vp.signum() != v.signum() {
                out.push(tp + vp / (vp - v) * (t - tp));
            }
        }
        last = Some((t, v));
    }
    out
}

/// Oscillation period of a velocity series.
///
/// The series is linearly detrended; the period is twice the mean spacing between zero
/// crossings, taken over an odd number of crossings so the span covers whole cycles.
pub fn bloch_period(times: &[f64], velocities: &[f64]) -> Result<f64> {
    if times.len() != velocities.len() || times.len() < 3 {
        return Err(Error::NoPeriod { crossings: 0 });
    }
    let residual = detrend(times, velocities);
    let mut crossings = zero_crossings(times, &residual);
    if crossings.len() < 3 {
        return Err(Error::NoPeriod {
            crossings: crossings.len(),
        });
    }
    if crossings.len().is_multiple_of(2) {
        crossings.pop();
    }
    let spacing = (crossings[crossings.len() - 1] - crossings[0]) / (crossings.len() - 1) as f64;
    Ok(2.0 * spacing)
}

/// Half the peak-to-peak excursion of the linearly detrended series.
pub fn oscillation_amplitude(times: &[f64], values: &[f64]) -> f64 {
    let r = detrend(times, values);
    let hi = r.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = r.iter().cloned().fold(f64::INFINITY, f64::min);
    0.5 * (hi - lo)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelPopulation {
    pub n: i64,
    pub population: f64,
}

/// Figure-of-merit summary of one propagation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryMetrics {
    pub targets: Vec<i64>,
    /// Sum of final populations over `targets`.
    pub fidelity: f64,
    pub target_populations: Vec<LevelPopulation>,
    /// Final population on `|n|` strictly below the smallest target magnitude.
    pub residual_low: f64,
    /// `|P_{+n} - P_{-n}|` when the targets are a symmetric pair.
    pub asymmetry: Option<f64>,
    pub dominant_level: i64,
    pub final_time: f64,
    pub n_max: usize,
    /// Final populations for `n = -n_max ..= n_max`.
    pub final_populations: Vec<f64>,
    /// Largest population reached by each level over the recorded trajectory.
    pub max_transient: Vec<f64>,
    pub max_norm_deviation: f64,
    pub bloch_period: Option<f64>,
}

impl SummaryMetrics {
    pub fn final_population(&self, n: i64) -> f64 {
        let idx = n + self.n_max as i64;
        if (0..self.final_populations.len() as i64).contains(&idx) {
            self.final_populations[idx as usize]
        } else {
            0.0
        }
    }

    pub fn max_transient_of(&self, n: i64) -> f64 {
        let idx = n + self.n_max as i64;
        if (0..self.max_transient.len() as i64).contains(&idx) {
            self.max_transient[idx as usize]
        } else {
            0.0
        }
    }
}

/// Summarise a finished trajectory against the target ladder states.
pub fn transfer_fidelity(traj: &Trajectory, targets: &[i64]) -> SummaryMetrics {
    let finals = traj.final_populations().to_vec();
    let target_populations: Vec<LevelPopulation> = targets
        .iter()
        .map(|&n| LevelPopulation {
            n,
            population: traj.final_population(n),
        })
        .collect();
    let fidelity = target_populations.iter().map(|l| l.population).sum();
    let floor = targets.iter().map(|n| n.abs()).min().unwrap_or(0);
    let residual_low = traj
        .labels()
        .zip(&finals)
        .filter(|(n, _)| n.abs() < floor)
        .map(|(_, p)| p)
        .sum();
    let asymmetry = match targets {
        [a, b] if *a == -*b && *a != 0 => Some((traj.final_population(*a) - traj.final_population(*b)).abs()),
        _ => None,
    };
    let mut max_transient = vec![0.0f64; finals.len()];
    for pops in &traj.populations {
        for (m, p) in max_transient.iter_mut().zip(pops) {
            *m = m.max(*p);
        }
    }
    let dominant = finals
        .iter()
        .enumerate()
        .fold(
            (0usize, f64::NEG_INFINITY),
            |best, (j, &p)| if p > best.1 { (j, p) } else { best },
        )
        .0;
    SummaryMetrics {
        targets: targets.to_vec(),
        fidelity,
        target_populations,
        residual_low,
        asymmetry,
        dominant_level: dominant as i64 - traj.n_max as i64,
        final_time: *traj.times.last().unwrap_or(&0.0),
        n_max: traj.n_max,
        final_populations: finals,
        max_transient,
        max_norm_deviation: traj.max_norm_deviation(),
        bloch_period: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    #[test]
    fn populations_and_velocity_examples() {
        let s = StateVector::ground(30);
        let p = populations(&s);
        assert_eq!(p[30], 1.0);
        assert_eq!(p.iter().sum::<f64>(), 1.0);
        assert_eq!(mean_velocity(&s, 0.0), 0.0);

        let s = StateVector::basis(30, 25).unwrap();
        assert_eq!(mean_velocity(&s, 0.0), 25.0);
        assert_eq!(mean_velocity(&s, 0.4), 25.2);

        let mut amps = vec![Complex64::new(0.0, 0.0); 61];
        amps[5] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        amps[55] = Complex64::new(0.0, FRAC_1_SQRT_2);
        let s = StateVector::from_amplitudes(amps, 0.0).unwrap();
        let p = populations(&s);
        assert!((p[5] - 0.5).abs() < 1e-15 && (p[55] - 0.5).abs() < 1e-15);
        assert!(mean_velocity(&s, 0.0).abs() < 1e-14);
    }

    proptest::proptest! {
        #[test]
        fn random_state_populations_sum_to_one(
            re in proptest::collection::vec(-1.0f64..1.0, 21),
            im in proptest::collection::vec(-1.0f64..1.0, 21),
        ) {
            let amps: Vec<Complex64> = re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect();
            let mut s = StateVector::from_amplitudes(amps, 0.0).unwrap();
            proptest::prop_assume!(s.norm_sqr() > 1e-6);
            s.normalize();
            let total: f64 = populations(&s).iter().sum();
            proptest::prop_assert!((total - 1.0).abs() < 1e-12);
            let v = mean_velocity(&s, 0.0);
            proptest::prop_assert!(v.abs() <= 10.0 + 1e-12);
            proptest::prop_assert!((mean_velocity(&s.reflected(), 0.0) + v).abs() < 1e-12);
        }
    }

    #[test]
    fn period_of_sine_on_a_ramp() {
        for &period in &[20.0, 200.0] {
            let times: Vec<f64> = (0..4000).map(|k| k as f64 * period * 5.0 / 4000.0).collect();
            let v: Vec<f64> = times
                .iter()
                .map(|t| 0.01 * t + (2.0 * PI * t / period + 0.3).sin())
                .collect();
            let est = bloch_period(&times, &v).unwrap();
            assert!((est / period - 1.0).abs() < 0.02, "{est} vs {period}");
        }
    }

    #[test]
    fn constant_series_has_no_period() {
        let times: Vec<f64> = (0..100).map(|k| k as f64).collect();
        let v = vec![3.0; 100];
        assert!(matches!(bloch_period(&times, &v), Err(Error::NoPeriod { .. })));
        assert_eq!(oscillation_amplitude(&times, &v), 0.0);
    }

    #[test]
    fn amplitude_of_detrended_sine() {
        let times: Vec<f64> = (0..2001).map(|k| k as f64 * 0.05).collect();
        let v: Vec<f64> = times
            .iter()
            .map(|t| 2.0 * t + 0.3 * (2.0 * PI * t / 10.0).cos())
            .collect();
        assert!((oscillation_amplitude(&times, &v) - 0.3).abs() < 0.01);
    }
}
