//! Momentum ladder: physical types and the time-dependent tridiagonal Hamiltonian.
//!
//! All quantities are recoil-scaled: frequencies in units of the two-photon recoil
//! frequency, times in its inverse, momenta in units of `ħk`. Ladder state `n`
//! carries momentum `(2n + q) ħk`.

mod hamiltonian;
mod pulse;
mod state;

pub use hamiltonian::{
    branch_quasi_energy, mirror_hamiltonian, splitter_couplings, splitter_hamiltonian, HamiltonianSource, TridiagonalH,
};
pub use pulse::{detect_climbing_sign, ChirpProfile, ChirpSign, EnvelopeShape, PulseEnvelope};
pub use state::StateVector;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Quasi-energy of ladder state `n` in the frame rotating with phase rate `phidot`.
///
/// Kinetic term `(2n + q)^2 / 4` plus the field energy `n * phidot`; at `q = 0` this is
/// `n^2 + n * phidot`.
pub fn quasi_energy(n: i64, phidot: f64, q: f64) -> f64 {
    let k = n as f64 + 0.5 * q;
    k * k + n as f64 * phidot
}

/// Representation used for the amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Frame {
    /// Momentum amplitudes; field phases sit on the couplings.
    Bare,
    /// Amplitudes rotated by `exp(-i n phi(t))`; the chirp appears on the diagonal.
    Rotating,
}

impl Frame {
    pub fn name(self) -> &'static str {
        match self {
            Frame::Bare => "bare",
            Frame::Rotating => "rotating",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "bare" => Some(Frame::Bare),
            "rotating" => Some(Frame::Rotating),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Mirror,
    Splitter,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Mirror => "mirror",
            Mode::Splitter => "splitter",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "mirror" => Some(Mode::Mirror),
            "splitter" => Some(Mode::Splitter),
            _ => None,
        }
    }
}

/// One chirped standing wave: its effective-Rabi envelope and its phase schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Drive {
    pub envelope: PulseEnvelope,
    pub chirp: ChirpProfile,
}

impl Drive {
    pub fn new(envelope: PulseEnvelope, chirp: ChirpProfile) -> Self {
        Self { envelope, chirp }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Drives {
    Mirror(Drive),
    /// `plus` carries the coupling with phase `phi_1`, `minus` the one with `phi_2`.
    Splitter {
        plus: Drive,
        minus: Drive,
    },
}

/// Truncated ladder `n = -n_max ..= n_max` with its drives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderConfig {
    n_max: usize,
    q: f64,
    frame: Frame,
    drives: Drives,
}

impl LadderConfig {
    pub fn new(n_max: usize, q: f64, frame: Frame, drives: Drives) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::invalid("n_max", "truncation must be at least 1"));
        }
        if !q.is_finite() || q.abs() > 1.0 {
            return Err(Error::invalid(
                "q",
                format!("quasi-momentum must satisfy |q| <= 1, got {q}"),
            ));
        }
        Ok(Self {
            n_max,
            q,
            frame,
            drives,
        })
    }

    pub fn mirror(n_max: usize, drive: Drive) -> Result<Self> {
        Self::new(n_max, 0.0, Frame::Rotating, Drives::Mirror(drive))
    }

    pub fn splitter(n_max: usize, plus: Drive, minus: Drive) -> Result<Self> {
        Self::new(n_max, 0.0, Frame::Bare, Drives::Splitter { plus, minus })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }
    pub fn dim(&self) -> usize {
        2 * self.n_max + 1
    }
    pub fn q(&self) -> f64 {
        self.q
    }
    pub fn frame(&self) -> Frame {
        self.frame
    }
    pub fn drives(&self) -> &Drives {
        &self.drives
    }

    pub fn mode(&self) -> Mode {
        match self.drives {
            Drives::Mirror(_) => Mode::Mirror,
            Drives::Splitter { .. } => Mode::Splitter,
        }
    }

    /// The drive whose phase defines the rotating frame.
    pub fn primary_drive(&self) -> &Drive {
        match &self.drives {
            Drives::Mirror(d) => d,
            Drives::Splitter { plus, .. } => plus,
        }
    }

    pub fn with_frame(mut self, frame: Frame) -> Self {
        self.frame = frame;
        self
    }

    pub fn with_q(self, q: f64) -> Result<Self> {
        Self::new(self.n_max, q, self.frame, self.drives)
    }

    pub fn with_n_max(self, n_max: usize) -> Result<Self> {
        Self::new(n_max, self.q, self.frame, self.drives)
    }

    pub fn with_drives(self, drives: Drives) -> Result<Self> {
        Self::new(self.n_max, self.q, self.frame, drives)
    }

    /// Ladder labels in storage order.
    pub fn labels(&self) -> impl Iterator<Item = i64> {
        let n = self.n_max as i64;
        -n..=n
    }

    /// Largest effective Rabi frequency any drive can reach.
    pub fn peak_coupling(&self) -> f64 {
        match &self.drives {
            Drives::Mirror(d) => d.envelope.peak(),
            Drives::Splitter { plus, minus } => plus.envelope.peak() + minus.envelope.peak(),
        }
    }

    /// Largest `|alpha|` over the drives.
    pub fn max_chirp_rate(&self) -> f64 {
        match &self.drives {
            Drives::Mirror(d) => d.chirp.alpha.abs(),
            Drives::Splitter { plus, minus } => plus.chirp.alpha.abs().max(minus.chirp.alpha.abs()),
        }
    }

    /// Time span covering every drive's envelope support.
    pub fn pulse_support(&self) -> (f64, f64) {
        match &self.drives {
            Drives::Mirror(d) => (d.envelope.start(), d.envelope.end()),
            Drives::Splitter { plus, minus } => (
                plus.envelope.start().min(minus.envelope.start()),
                plus.envelope.end().max(minus.envelope.end()),
            ),
        }
    }

    /// Effective Rabi frequency of the primary drive.
    pub fn rabi(&self, t: f64) -> f64 {
        self.primary_drive().envelope.rabi(t)
    }
}
