//! Geometry, metric, and sampling on the d-dimensional torus with period 2π.
//!
//! Points carry one canonical chart: every coordinate lives in `[0, 2π)`.
//! Distances use the geodesic ℓ¹ metric, the sum over coordinates of the
//! shorter arc `min(|Δ|, 2π − |Δ|)`.

use std::f64::consts::TAU;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::util::stream_id;

/// A point on the torus 𝕋^d, each coordinate canonically in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TorusPoint {
    coords: Vec<f64>,
}

impl TorusPoint {
    /// Canonicalizes raw angles into `[0, 2π)` coordinate-wise.
    ///
    /// Rejects non-finite entries; everything downstream assumes finite,
    /// wrapped coordinates.
    pub fn wrap(raw: &[f64]) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidInput("torus dimension must be at least 1".into()));
        }
        let mut coords = Vec::with_capacity(raw.len());
        for (i, &x) in raw.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::NonFiniteCoordinate(i));
            }
            coords.push(wrap_angle(x));
        }
        Ok(Self { coords })
    }

    /// Number of coordinates d.
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Geodesic ℓ¹ distance: Σᵢ min(|aᵢ−bᵢ|, 2π−|aᵢ−bᵢ|).
    ///
    /// Each coordinate contributes at most π, so the metric diameter is dπ.
    pub fn l1_distance(&self, other: &Self) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: other.dim() });
        }
        let mut total = 0.0;
        for (a, b) in self.coords.iter().zip(&other.coords) {
            total += arc_length(a - b);
        }
        Ok(total)
    }

    /// Coordinate-wise addition mod 2π.
    pub fn translate(&self, shift: &Self) -> Result<Self> {
        if self.dim() != shift.dim() {
            return Err(Error::DimensionMismatch { left: self.dim(), right: shift.dim() });
        }
        let raw: Vec<f64> =
            self.coords.iter().zip(&shift.coords).map(|(a, b)| a + b).collect();
        Self::wrap(&raw)
    }
}

/// Reduces a single finite angle to `[0, 2π)`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut v = x.rem_euclid(TAU);
    // rem_euclid can round up to exactly 2π for tiny negative inputs.
    if v >= TAU {
        v = 0.0;
    }
    v
}

/// Shorter arc between two angles given their raw difference.
pub fn arc_length(delta: f64) -> f64 {
    let d = wrap_angle(delta);
    d.min(TAU - d)
}

/// Squared geodesic ℓ¹ displacement between two raw coordinate slices.
///
/// Low-level variant of [`TorusPoint::l1_distance`] for hot loops; callers
/// guarantee equal lengths.
pub fn l1_distance_raw(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| arc_length(x - y)).sum()
}

/// Deterministic seeded generator with independent sub-streams.
///
/// Built on ChaCha8, whose 64-bit stream parameter makes `(seed, stream)`
/// pairs address non-overlapping sequences. Derivation of child streams
/// depends only on the parent identifiers, never on how much of the parent
/// sequence was consumed, so per-particle streams are order-independent.
#[derive(Debug, Clone)]
pub struct StreamRng {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl StreamRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, stream, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Child generator addressed by `(seed, mix(stream, id))`.
    pub fn derive(&self, id: u64) -> Self {
        Self::new(self.seed, stream_id(&[self.stream, id]))
    }
}

impl RngCore for StreamRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

/// Samples a point with i.i.d. uniform coordinates on `[0, 2π)`.
pub fn sample_uniform(rng: &mut StreamRng, d: usize) -> Result<TorusPoint> {
    if d == 0 {
        return Err(Error::InvalidInput("torus dimension must be at least 1".into()));
    }
    let coords: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() * TAU).collect();
    Ok(TorusPoint { coords })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn wrap_examples() {
        let p = TorusPoint::wrap(&[0.0, TAU, -FRAC_PI_2]).unwrap();
        assert_eq!(p.coords()[0], 0.0);
        assert_eq!(p.coords()[1], 0.0);
        assert!((p.coords()[2] - 3.0 * FRAC_PI_2).abs() < 1e-12);

        let q = TorusPoint::wrap(&[PI]).unwrap();
        assert_eq!(q.coords()[0], PI);

        let r = TorusPoint::wrap(&[7.0 * PI]).unwrap();
        assert!((r.coords()[0] - PI).abs() < 1e-12);
    }

    #[test]
    fn wrap_rejects_non_finite() {
        let err = TorusPoint::wrap(&[0.0, f64::NAN]).unwrap_err();
        assert!(err.to_string().contains("non-finite coordinate"));
        assert!(TorusPoint::wrap(&[f64::INFINITY]).is_err());
    }

    #[test]
    fn wrap_stays_in_range() {
        let mut rng = StreamRng::new(11, 0);
        for _ in 0..10_000 {
            let x = (rng.gen::<f64>() - 0.5) * 1.0e6;
            let w = wrap_angle(x);
            assert!((0.0..TAU).contains(&w), "wrap({x}) = {w}");
        }
        // Tiny negative values must not round up to 2π itself.
        assert!(wrap_angle(-1e-18) < TAU);
    }

    #[test]
    fn distance_examples() {
        let a = TorusPoint::wrap(&[0.0, 0.0]).unwrap();
        assert_eq!(a.l1_distance(&a).unwrap(), 0.0);

        let b = TorusPoint::wrap(&[PI, 3.0 * FRAC_PI_2]).unwrap();
        assert!((a.l1_distance(&b).unwrap() - (PI + FRAC_PI_2)).abs() < 1e-12);

        let c = TorusPoint::wrap(&[0.0]).unwrap();
        let d = TorusPoint::wrap(&[PI + 0.1]).unwrap();
        assert!((c.l1_distance(&d).unwrap() - (PI - 0.1)).abs() < 1e-12);
    }

    #[test]
    fn distance_dimension_mismatch() {
        let a = TorusPoint::wrap(&[0.0]).unwrap();
        let b = TorusPoint::wrap(&[0.0, 0.0]).unwrap();
        assert!(a.l1_distance(&b).is_err());
    }

    #[test]
    fn distance_symmetry_and_coordinate_cap() {
        let mut rng = StreamRng::new(7, 1);
        for _ in 0..1000 {
            let a = sample_uniform(&mut rng, 4).unwrap();
            let b = sample_uniform(&mut rng, 4).unwrap();
            let dab = a.l1_distance(&b).unwrap();
            let dba = b.l1_distance(&a).unwrap();
            assert!((dab - dba).abs() < 1e-12);
            assert!(dab <= 4.0 * PI + 1e-12);
        }
    }

    #[test]
    fn triangle_inequality_random_triples() {
        let mut rng = StreamRng::new(42, 2);
        for _ in 0..10_000 {
            let a = sample_uniform(&mut rng, 3).unwrap();
            let b = sample_uniform(&mut rng, 3).unwrap();
            let c = sample_uniform(&mut rng, 3).unwrap();
            let ab = a.l1_distance(&b).unwrap();
            let bc = b.l1_distance(&c).unwrap();
            let ac = a.l1_distance(&c).unwrap();
            assert!(ac <= ab + bc + 1e-12);
        }
    }

    #[test]
    fn distance_invariant_under_period_shifts() {
        let mut rng = StreamRng::new(3, 3);
        for _ in 0..1000 {
            let a = sample_uniform(&mut rng, 3).unwrap();
            let b = sample_uniform(&mut rng, 3).unwrap();
            let base = a.l1_distance(&b).unwrap();
            let shift_a: Vec<f64> = a
                .coords()
                .iter()
                .enumerate()
                .map(|(i, &x)| x + TAU * ((i as f64) - 1.0))
                .collect();
            let shift_b: Vec<f64> =
                b.coords().iter().map(|&x| x + 2.0 * TAU).collect();
            let a2 = TorusPoint::wrap(&shift_a).unwrap();
            let b2 = TorusPoint::wrap(&shift_b).unwrap();
            assert!((a2.l1_distance(&b2).unwrap() - base).abs() < 1e-12);
        }
    }

    #[test]
    fn distance_invariant_under_common_translation() {
        let mut rng = StreamRng::new(9, 4);
        for _ in 0..1000 {
            let a = sample_uniform(&mut rng, 5).unwrap();
            let b = sample_uniform(&mut rng, 5).unwrap();
            let t = sample_uniform(&mut rng, 5).unwrap();
            let base = a.l1_distance(&b).unwrap();
            let shifted = a
                .translate(&t)
                .unwrap()
                .l1_distance(&b.translate(&t).unwrap())
                .unwrap();
            assert!((base - shifted).abs() < 1e-12);
        }
    }

    #[test]
    fn sampling_is_reproducible_per_stream() {
        let a = sample_uniform(&mut StreamRng::new(5, 17), 6).unwrap();
        let b = sample_uniform(&mut StreamRng::new(5, 17), 6).unwrap();
        assert_eq!(a, b);

        let c = sample_uniform(&mut StreamRng::new(5, 18), 6).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn derived_streams_do_not_depend_on_consumption() {
        let parent = StreamRng::new(1, 2);
        let mut consumed = parent.clone();
        let _ = sample_uniform(&mut consumed, 8).unwrap();
        let a = sample_uniform(&mut parent.derive(4), 3).unwrap();
        let b = sample_uniform(&mut consumed.derive(4), 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn uniform_sample_mean() {
        // Per-coordinate mean of U[0, 2π) is π with σ = (2π/√12)/√n.
        let n = 100_000;
        let d = 3;
        let mut rng = StreamRng::new(2024, 0);
        let mut sums = vec![0.0; d];
        for _ in 0..n {
            let p = sample_uniform(&mut rng, d).unwrap();
            for (s, &x) in sums.iter_mut().zip(p.coords()) {
                *s += x;
            }
        }
        let sigma = (TAU / 12.0f64.sqrt()) / (n as f64).sqrt();
        for s in sums {
            let mean = s / n as f64;
            assert!((mean - PI).abs() < 3.0 * sigma, "mean {mean} vs π");
        }
    }
}
