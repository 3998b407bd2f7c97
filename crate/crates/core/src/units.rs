//! Conversion between recoil-scaled quantities and laboratory units.
//!
//! Everything inside the crate is measured in the two-photon recoil frequency `ω_k`:
//! frequencies in `ω_k`, times in `1/ω_k`, chirp rates in `ω_k²`, momenta in `ħk`.
//! Laboratory frequencies here are cyclic (`ω/2π`, in Hz).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabUnits {
    omega_k_hz: f64,
}

impl LabUnits {
    /// `omega_k_hz` is `ω_k/2π` in Hz.
    pub fn new(omega_k_hz: f64) -> Result<Self> {
        if !(omega_k_hz.is_finite() && omega_k_hz > 0.0) {
            return Err(Error::invalid(
                "omega_k_hz",
                "recoil frequency must be positive and finite",
            ));
        }
        Ok(Self { omega_k_hz })
    }

    pub fn omega_k_hz(&self) -> f64 {
        self.omega_k_hz
    }

    /// `ω_k` in rad/s.
    pub fn omega_k(&self) -> f64 {
        2.0 * PI * self.omega_k_hz
    }

    /// Recoil-scaled angular frequency to cyclic frequency in Hz.
    pub fn frequency_hz(&self, w: f64) -> f64 {
        w * self.omega_k_hz
    }

    pub fn frequency_from_hz(&self, hz: f64) -> f64 {
        hz / self.omega_k_hz
    }

    pub fn duration_s(&self, t: f64) -> f64 {
        t / self.omega_k()
    }

    pub fn duration_from_s(&self, s: f64) -> f64 {
        s * self.omega_k()
    }

    /// `α/2π` in Hz/s for a recoil-scaled chirp rate: `α̃ ω_k² / 2π`.
    pub fn chirp_hz_per_s(&self, alpha: f64) -> f64 {
        alpha * self.omega_k() * self.omega_k_hz
    }

    pub fn chirp_from_hz_per_s(&self, hz_per_s: f64) -> f64 {
        hz_per_s / (self.omega_k() * self.omega_k_hz)
    }
}

/// Recoil-scaled inputs of the unit sheet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoilParams {
    /// Ladder rung reached (momentum `2nħk`).
    pub n: u32,
    pub alpha: f64,
    /// Total pulse duration; defaults to `n` crossing periods when absent.
    pub duration: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSheet {
    pub omega_k_hz: f64,
    pub n: u32,
    pub alpha: f64,
    /// Frequency range the two-photon detuning has to sweep: `2n ω_k/2π`.
    pub span_hz: f64,
    pub chirp_hz_per_s: f64,
    pub chirp_khz_per_us: f64,
    /// Time between crossings `2/α` in seconds.
    pub crossing_period_s: f64,
    pub duration: f64,
    pub duration_s: f64,
    /// `Δp_c` in units of `ħk` for this duration.
    pub critical_spread: f64,
}

pub fn convert_units(lab: &LabUnits, params: &RecoilParams) -> Result<UnitSheet> {
    if params.n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    if !(params.alpha.is_finite() && params.alpha != 0.0) {
        return Err(Error::invalid("alpha", "chirp rate must be nonzero and finite"));
    }
    let period = 2.0 / params.alpha.abs();
    let duration = params.duration.unwrap_or(params.n as f64 * period);
    let chirp = lab.chirp_hz_per_s(params.alpha);
    Ok(UnitSheet {
        omega_k_hz: lab.omega_k_hz(),
        n: params.n,
        alpha: params.alpha,
        span_hz: lab.frequency_hz(2.0 * params.n as f64),
        chirp_hz_per_s: chirp,
        chirp_khz_per_us: chirp * 1e-9,
        crossing_period_s: lab.duration_s(period),
        duration,
        duration_s: lab.duration_s(duration),
        critical_spread: critical_spread(params.n, duration)?,
    })
}

/// Recover the recoil-scaled inputs from a sheet.
pub fn recoil_params(sheet: &UnitSheet) -> Result<RecoilParams> {
    let lab = LabUnits::new(sheet.omega_k_hz)?;
    Ok(RecoilParams {
        n: (lab.frequency_from_hz(sheet.span_hz) / 2.0).round() as u32,
        alpha: lab.chirp_from_hz_per_s(sheet.chirp_hz_per_s),
        duration: Some(lab.duration_from_s(sheet.duration_s)),
    })
}

/// `Δp_c = ħk / (2 n ω_k T)` in units of `ħk`.
pub fn critical_spread(n: u32, duration: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::invalid("duration", "must be positive"));
    }
    Ok(1.0 / (2.0 * n as f64 * duration))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sheet(hz: f64, n: u32, alpha: f64) -> UnitSheet {
        convert_units(
            &LabUnits::new(hz).unwrap(),
            &RecoilParams {
                n,
                alpha,
                duration: None,
            },
        )
        .unwrap()
    }

    #[test]
    fn fifty_khz_sheet() {
        let s = sheet(50e3, 25, 0.1);
        assert_eq!(s.span_hz, 2.5e6);
        assert!((s.chirp_khz_per_us - 1.6).abs() / 1.6 < 0.02, "{}", s.chirp_khz_per_us);
        assert!((s.chirp_khz_per_us - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn chirp_scales_quadratically() {
        let s = sheet(25e3, 25, 0.1);
        assert!((s.chirp_khz_per_us - sheet(50e3, 25, 0.1).chirp_khz_per_us / 4.0).abs() < 1e-12);
        assert!((s.chirp_khz_per_us - 0.39).abs() < 0.01);
    }

    #[test]
    fn critical_spread_values() {
        assert_eq!(critical_spread(1, 1.0).unwrap(), 0.5);
        assert_eq!(critical_spread(25, 520.0).unwrap(), 1.0 / 26000.0);
        assert!((critical_spread(25, 520.0).unwrap() - 3.85e-5).abs() < 1e-7);
        assert_eq!(
            critical_spread(7, 80.0).unwrap(),
            2.0 * critical_spread(7, 160.0).unwrap()
        );
        assert!(critical_spread(0, 1.0).is_err());
        assert!(critical_spread(1, 0.0).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(LabUnits::new(0.0).is_err());
        assert!(LabUnits::new(f64::NAN).is_err());
        let lab = LabUnits::new(5e4).unwrap();
        assert!(convert_units(
            &lab,
            &RecoilParams {
                n: 3,
                alpha: 0.0,
                duration: None
            }
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn round_trip(hz in 1e3f64..1e6, n in 1u32..200, alpha in 1e-3f64..2.0, dur in 1.0f64..1e4) {
            let lab = LabUnits::new(hz).unwrap();
            let p = RecoilParams { n, alpha, duration: Some(dur) };
            let back = recoil_params(&convert_units(&lab, &p).unwrap()).unwrap();
            prop_assert_eq!(back.n, n);
            prop_assert!((back.alpha - alpha).abs() <= 4.0 * f64::EPSILON * alpha);
            prop_assert!((back.duration.unwrap() - dur).abs() <= 4.0 * f64::EPSILON * dur);
        }
    }
}
