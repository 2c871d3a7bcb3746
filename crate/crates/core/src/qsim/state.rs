use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::torus::StreamRng;

/// Dense state of `m` qubits: 2^m complex amplitudes, unit norm.
///
/// Qubit 0 is the least significant bit of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    qubits: usize,
}

impl StateVector {
    /// The computational basis state |0…0⟩.
    pub fn zero_state(m: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << m];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self { amplitudes, qubits: m }
    }

    pub(crate) fn from_amplitudes(amplitudes: Vec<Complex64>, qubits: usize) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << qubits);
        Self { amplitudes, qubits }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    /// Σ |amplitude|².
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Inner product ⟨self | other⟩.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.qubits != other.qubits {
            return Err(Error::DimensionMismatch { left: self.qubits, right: other.qubits });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Haar-ish random unit vector for tests: Gaussian amplitudes, normalized.
    pub fn random(rng: &mut StreamRng, m: usize) -> Self {
        let gauss = |r: &mut StreamRng| {
            // Box-Muller from two uniforms.
            let u1: f64 = r.gen::<f64>().max(1e-12);
            let u2: f64 = r.gen();
            (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
        };
        let mut amplitudes: Vec<Complex64> = (0..(1usize << m))
            .map(|_| Complex64::new(gauss(rng), gauss(rng)))
            .collect();
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amplitudes {
            *a /= norm;
        }
        Self { amplitudes, qubits: m }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_state_is_normalized() {
        let s = StateVector::zero_state(3);
        assert_eq!(s.len(), 8);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        assert_eq!(s.amplitudes()[0], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn random_state_is_normalized() {
        let mut rng = StreamRng::new(1, 1);
        let s = StateVector::random(&mut rng, 4);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }
}
