//! Pulse envelopes and linear chirp schedules.

use std::f64::consts::FRAC_PI_2;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::quasi_energy;
use crate::error::{Error, Result};

/// Functional form of the switch-on and switch-off stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvelopeShape {
    SinSquared,
    Linear,
}

impl EnvelopeShape {
    pub fn name(self) -> &'static str {
        match self {
            EnvelopeShape::SinSquared => "sin-squared",
            EnvelopeShape::Linear => "linear",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "sin-squared" | "sin2" => Some(EnvelopeShape::SinSquared),
            "linear" => Some(EnvelopeShape::Linear),
            _ => None,
        }
    }

    /// Rising edge on `x` in `[0, 1]`.
    fn rise(self, x: f64) -> f64 {
        match self {
            EnvelopeShape::SinSquared => (FRAC_PI_2 * x).sin().powi(2),
            EnvelopeShape::Linear => x,
        }
    }
}

/// Ramp / plateau / ramp envelope carrying the peak effective Rabi frequency.
///
/// The support is `[start, start + ramp_up + plateau + ramp_down]`; outside it the
/// envelope is exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseEnvelope {
    peak: f64,
    start: f64,
    ramp_up: f64,
    plateau: f64,
    ramp_down: f64,
    shape: EnvelopeShape,
}

impl PulseEnvelope {
    pub fn new(
        peak: f64,
        start: f64,
        ramp_up: f64,
        plateau: f64,
        ramp_down: f64,
        shape: EnvelopeShape,
    ) -> Result<Self> {
        for (name, v) in [("ramp_up", ramp_up), ("plateau", plateau), ("ramp_down", ramp_down)] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(name, format!("duration must be >= 0, got {v}")));
            }
        }
        if !peak.is_finite() || peak < 0.0 {
            return Err(Error::invalid("omega0", format!("peak must be >= 0, got {peak}")));
        }
        if !start.is_finite() {
            return Err(Error::invalid("pulse_start", "must be finite"));
        }
        Ok(Self {
            peak,
            start,
            ramp_up,
            plateau,
            ramp_down,
            shape,
        })
    }

    pub fn peak(&self) -> f64 {
        self.peak
    }
    pub fn start(&self) -> f64 {
        self.start
    }
    pub fn ramp_up(&self) -> f64 {
        self.ramp_up
    }
    pub fn plateau(&self) -> f64 {
        self.plateau
    }
    pub fn ramp_down(&self) -> f64 {
        self.ramp_down
    }
    pub fn shape(&self) -> EnvelopeShape {
        self.shape
    }

    pub fn end(&self) -> f64 {
        self.start + self.duration()
    }

    pub fn duration(&self) -> f64 {
        self.ramp_up + self.plateau + self.ramp_down
    }

    pub fn with_peak(mut self, peak: f64) -> Self {
        self.peak = peak;
        self
    }

    /// Dimensionless envelope value in `[0, 1]`.
    pub fn value(&self, t: f64) -> f64 {
        let s = t - self.start;
        if s <= 0.0 {
            return 0.0;
        }
        if s < self.ramp_up {
            return self.shape.rise(s / self.ramp_up);
        }
        let s = s - self.ramp_up;
        if s <= self.plateau {
            return 1.0;
        }
        let s = s - self.plateau;
        if s < self.ramp_down {
            return self.shape.rise(1.0 - s / self.ramp_down);
        }
        0.0
    }

    /// Effective Rabi frequency `peak * value(t)`.
    pub fn rabi(&self, t: f64) -> f64 {
        self.peak * self.value(t)
    }
}

/// Sign convention relating the chirp rate to the slope of the two-photon phase rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChirpSign {
    Positive,
    Negative,
}

impl ChirpSign {
    pub fn value(self) -> f64 {
        match self {
            ChirpSign::Positive => 1.0,
            ChirpSign::Negative => -1.0,
        }
    }

    pub fn from_value(v: f64) -> Option<Self> {
        if v == 1.0 {
            Some(ChirpSign::Positive)
        } else if v == -1.0 {
            Some(ChirpSign::Negative)
        } else {
            None
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            ChirpSign::Positive => ChirpSign::Negative,
            ChirpSign::Negative => ChirpSign::Positive,
        }
    }

    /// The sign under which a positive chirp rate climbs the positive momentum branch.
    ///
    /// Resolved once per process by [`detect_climbing_sign`].
    pub fn climbing() -> Self {
        static SIGN: OnceLock<ChirpSign> = OnceLock::new();
        *SIGN.get_or_init(detect_climbing_sign)
    }
}

/// Startup self-test for the chirp sign convention.
///
/// For each candidate sign, a unit chirp centred at `t = 0` is swept forward and the
/// first adjacent quasi-energy degeneracy involving `n = 0` is located. The sign whose
/// first degeneracy is with `n = +1` is the climbing sign.
pub fn detect_climbing_sign() -> ChirpSign {
    for sign in [ChirpSign::Positive, ChirpSign::Negative] {
        let chirp = ChirpProfile::with_sign(1.0, 0.0, 0.0, sign);
        let gap = |n: i64, t: f64| quasi_energy(n, chirp.rate(t), 0.0) - quasi_energy(0, chirp.rate(t), 0.0);
        let (mut plus, mut minus) = (None, None);
        let dt = 1e-3;
        let mut t = 0.0;
        while t < 5.0 && plus.is_none() && minus.is_none() {
            let t1 = t + dt;
            if gap(1, t) * gap(1, t1) <= 0.0 {
                plus = Some(t1);
            }
            if gap(-1, t) * gap(-1, t1) <= 0.0 {
                minus = Some(t1);
            }
            t = t1;
        }
        if plus.is_some() && minus.is_none() {
            return sign;
        }
    }
    unreachable!("quasi-energies admit no climbing sign")
}

/// Linear chirp: phase rate `sign * alpha * (t - t_c) - delta0`, phase zero at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpProfile {
    pub alpha: f64,
    pub t_c: f64,
    pub delta0: f64,
    pub sign: ChirpSign,
}

impl ChirpProfile {
    /// Chirp using the climbing sign convention.
    pub fn new(alpha: f64, t_c: f64, delta0: f64) -> Self {
        Self::with_sign(alpha, t_c, delta0, ChirpSign::climbing())
    }

    pub fn with_sign(alpha: f64, t_c: f64, delta0: f64, sign: ChirpSign) -> Self {
        Self {
            alpha,
            t_c,
            delta0,
            sign,
        }
    }

    /// Slope of the phase rate, `sign * alpha`.
    pub fn slope(&self) -> f64 {
        self.sign.value() * self.alpha
    }

    /// Phase rate (two-photon detuning) at `t`.
    pub fn rate(&self, t: f64) -> f64 {
        self.slope() * (t - self.t_c) - self.delta0
    }

    /// Phase at `t`: closed-form antiderivative of [`rate`](Self::rate) with zero at `t = 0`.
    pub fn phase(&self, t: f64) -> f64 {
        self.slope() * t * (0.5 * t - self.t_c) - self.delta0 * t
    }

    /// Time at which the phase rate equals `value`, if the chirp is not flat.
    pub fn time_of_rate(&self, value: f64) -> Option<f64> {
        let slope = self.slope();
        (slope != 0.0).then(|| self.t_c + (value + self.delta0) / slope)
    }

    /// Same chirp with reversed rate.
    pub fn reversed(&self) -> Self {
        Self {
            alpha: -self.alpha,
            ..*self
        }
    }
}
