use num_complex::Complex64;

use crate::error::{Error, Result};

/// Ladder amplitudes `a_n`, `n = -n_max ..= n_max`, at a given time.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    n_max: usize,
    pub time: f64,
}

impl StateVector {
    /// Atom at rest: `a_0 = 1`.
    pub fn ground(n_max: usize) -> Self {
        Self::basis(n_max, 0).expect("n = 0 is always on the ladder")
    }

    /// Unit amplitude on ladder state `n`.
    pub fn basis(n_max: usize, n: i64) -> Result<Self> {
        let mut s = Self {
            amplitudes: vec![Complex64::new(0.0, 0.0); 2 * n_max + 1],
            n_max,
            time: 0.0,
        };
        let idx = s
            .index(n)
            .ok_or_else(|| Error::invalid("n", format!("state {n} outside ladder of size {n_max}")))?;
        s.amplitudes[idx] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// Wrap raw amplitudes; the length must be odd.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>, time: f64) -> Result<Self> {
        if amplitudes.len().is_multiple_of(2) {
            return Err(Error::invalid("amplitudes", "ladder dimension must be odd"));
        }
        let n_max = amplitudes.len() / 2;
        Ok(Self {
            amplitudes,
            n_max,
            time,
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn index(&self, n: i64) -> Option<usize> {
        let idx = n + self.n_max as i64;
        (0..self.dim() as i64).contains(&idx).then_some(idx as usize)
    }

    pub fn label(&self, idx: usize) -> i64 {
        idx as i64 - self.n_max as i64
    }

    pub fn amplitude(&self, n: i64) -> Complex64 {
        self.index(n).map_or(Complex64::new(0.0, 0.0), |i| self.amplitudes[i])
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        if norm > 0.0 {
            self.amplitudes.iter_mut().for_each(|a| *a /= norm);
        }
    }

    /// Same state embedded in (or cropped to) a ladder of size `n_max`.
    pub fn resized(&self, n_max: usize) -> Self {
        let mut out = vec![Complex64::new(0.0, 0.0); 2 * n_max + 1];
        let m = n_max.min(self.n_max) as i64;
        for n in -m..=m {
            out[(n + n_max as i64) as usize] = self.amplitude(n);
        }
        Self {
            amplitudes: out,
            n_max,
            time: self.time,
        }
    }

    /// Amplitude reflection `a_n -> a_{-n}`.
    pub fn reflected(&self) -> Self {
        let mut s = self.clone();
        s.amplitudes.reverse();
        s
    }
}
