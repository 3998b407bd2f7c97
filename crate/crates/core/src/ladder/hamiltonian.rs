use num_complex::Complex64;

use super::{quasi_energy, Drive, Drives, Frame, LadderConfig};
use crate::error::{Error, Result};

/// Hermitian tridiagonal matrix.
///
/// `offdiag[j]` is the lower element `H[j+1][j]`; the upper element `H[j][j+1]` is its
/// conjugate, so Hermiticity holds by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalH {
    pub diag: Vec<f64>,
    pub offdiag: Vec<Complex64>,
}

impl TridiagonalH {
    pub fn zeros(dim: usize) -> Self {
        Self {
            diag: vec![0.0; dim],
            offdiag: vec![Complex64::new(0.0, 0.0); dim.saturating_sub(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Element `H[i][j]`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        if i == j {
            Complex64::new(self.diag[i], 0.0)
        } else if i == j + 1 {
            self.offdiag[j]
        } else if j == i + 1 {
            self.offdiag[i].conj()
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// `out = H x`.
    pub fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        let n = self.dim();
        debug_assert_eq!(x.len(), n);
        debug_assert_eq!(out.len(), n);
        for i in 0..n {
            out[i] = x[i] * self.diag[i];
        }
        for j in 0..n.saturating_sub(1) {
            let lo = self.offdiag[j];
            out[j + 1] += lo * x[j];
            out[j] += lo.conj() * x[j + 1];
        }
    }

    /// Dense row-major copy, for tests and small diagnostics.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let n = self.dim();
        (0..n).map(|i| (0..n).map(|j| self.get(i, j)).collect()).collect()
    }

    /// Upper bound on the spectral radius (Gershgorin).
    pub fn gershgorin_radius(&self) -> f64 {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.offdiag[i - 1].norm() } else { 0.0 };
                let right = if i + 1 < n { self.offdiag[i].norm() } else { 0.0 };
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }
}

/// Anything that can assemble a tridiagonal Hamiltonian at a given time into a buffer.
pub trait HamiltonianSource {
    fn dim(&self) -> usize;
    fn fill(&self, t: f64, h: &mut TridiagonalH);

    /// Bound on the off-diagonal (coupling) part over the whole evolution.
    fn coupling_radius(&self) -> f64;

    /// Bound on `|d/dt diag(H)|`, the diagonal change seen within one step.
    fn diagonal_drift_rate(&self) -> f64 {
        0.0
    }

    fn hamiltonian(&self, t: f64) -> TridiagonalH {
        let mut h = TridiagonalH::zeros(self.dim());
        self.fill(t, &mut h);
        h
    }
}

impl HamiltonianSource for LadderConfig {
    fn dim(&self) -> usize {
        LadderConfig::dim(self)
    }

    fn fill(&self, t: f64, h: &mut TridiagonalH) {
        match &self.drives {
            Drives::Mirror(d) => fill_mirror(self, d, t, h),
            Drives::Splitter { plus, minus } => fill_splitter(self, plus, minus, t, h),
        }
    }

    fn coupling_radius(&self) -> f64 {
        2.0 * self.peak_coupling()
    }

    fn diagonal_drift_rate(&self) -> f64 {
        match self.frame {
            Frame::Bare => 0.0,
            Frame::Rotating => self.n_max as f64 * self.max_chirp_rate(),
        }
    }
}

fn fill_diag(cfg: &LadderConfig, phidot: f64, h: &mut TridiagonalH) {
    for (slot, n) in h.diag.iter_mut().zip(cfg.labels()) {
        *slot = quasi_energy(n, phidot, cfg.q);
    }
}

fn fill_mirror(cfg: &LadderConfig, d: &Drive, t: f64, h: &mut TridiagonalH) {
    let omega = d.envelope.rabi(t);
    let coupling = match cfg.frame {
        Frame::Rotating => {
            fill_diag(cfg, d.chirp.rate(t), h);
            Complex64::new(-omega, 0.0)
        }
        Frame::Bare => {
            fill_diag(cfg, 0.0, h);
            -Complex64::from_polar(omega, d.chirp.phase(t))
        }
    };
    h.offdiag.fill(coupling);
}

fn fill_splitter(cfg: &LadderConfig, plus: &Drive, minus: &Drive, t: f64, h: &mut TridiagonalH) {
    let (op, om) = (plus.envelope.rabi(t), minus.envelope.rabi(t));
    let (phi1, phi2) = (plus.chirp.phase(t), minus.chirp.phase(t));
    let coupling = match cfg.frame {
        Frame::Bare => {
            fill_diag(cfg, 0.0, h);
            -(Complex64::from_polar(op, phi1) + Complex64::from_polar(om, phi2))
        }
        // Single global frame rotating with the first chirp.
        Frame::Rotating => {
            fill_diag(cfg, plus.chirp.rate(t), h);
            -(Complex64::new(op, 0.0) + Complex64::from_polar(om, phi2 - phi1))
        }
    };
    h.offdiag.fill(coupling);
}

/// Single-chirp ladder Hamiltonian in the configured frame.
pub fn mirror_hamiltonian(cfg: &LadderConfig, t: f64) -> Result<TridiagonalH> {
    match cfg.drives {
        Drives::Mirror(_) => Ok(cfg.hamiltonian(t)),
        Drives::Splitter { .. } => Err(Error::ModeMismatch {
            expected: "mirror",
            found: "splitter",
        }),
    }
}

/// Two-chirp ladder Hamiltonian. The bare frame carries the coupling
/// `Ω⁺ e^{iφ₁} + Ω⁻ e^{iφ₂}`; the rotating frame follows the first chirp.
pub fn splitter_hamiltonian(cfg: &LadderConfig, t: f64) -> Result<TridiagonalH> {
    match cfg.drives {
        Drives::Splitter { .. } => Ok(cfg.hamiltonian(t)),
        Drives::Mirror(_) => Err(Error::ModeMismatch {
            expected: "splitter",
            found: "mirror",
        }),
    }
}

/// Branch couplings `(Ω₋, Ω₊)` of the two-chirp ladder.
///
/// `Ω₋ = Ω⁺ + Ω⁻ e^{-iδ}` and `Ω₊ = Ω⁺ e^{iδ} + Ω⁻` with `δ = φ₂ - φ₁`. They are the
/// upper couplings `-H[n][n+1]` in the frames rotating with `φ₁` and `φ₂` respectively.
pub fn splitter_couplings(cfg: &LadderConfig, t: f64) -> Result<(Complex64, Complex64)> {
    let Drives::Splitter { plus, minus } = &cfg.drives else {
        return Err(Error::ModeMismatch {
            expected: "splitter",
            found: "mirror",
        });
    };
    let (op, om) = (plus.envelope.rabi(t), minus.envelope.rabi(t));
    let delta = minus.chirp.phase(t) - plus.chirp.phase(t);
    let omega_minus = op + Complex64::from_polar(om, -delta);
    let omega_plus = Complex64::from_polar(op, delta) + om;
    Ok((omega_minus, omega_plus))
}

/// Branch-resolved quasi-energy of the two-chirp ladder: states with `n > 0` are dressed
/// by the chirp that climbs them (the first), states with `n < 0` by the second.
pub fn branch_quasi_energy(cfg: &LadderConfig, n: i64, t: f64) -> Result<f64> {
    let Drives::Splitter { plus, minus } = &cfg.drives else {
        return Err(Error::ModeMismatch {
            expected: "splitter",
            found: "mirror",
        });
    };
    let rate = if n >= 0 {
        plus.chirp.rate(t)
    } else {
        minus.chirp.rate(t)
    };
    Ok(quasi_energy(n, rate, cfg.q))
}
