use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::{StreamRng, TorusPoint};

use super::pauli::{parse_pauli_label, Pauli, PauliString};
use super::state::StateVector;

/// Largest supported qubit count; the dense state doubles per qubit.
pub const MAX_QUBITS: usize = 12;

/// Rotation axis for encoder layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RotationAxis {
    X,
    Y,
    Z,
}

/// One data-dependent unitary layer.
///
/// Feature components drive per-qubit rotations: qubit `q` rotates by
/// `x[q mod p]`. The CNOT ladder entangles neighbours `(q, q+1)` in index
/// order and is feature-independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EncoderLayer {
    Identity,
    FeatureRotations { axis: RotationAxis, entangle: bool },
    CnotLadder,
}

impl EncoderLayer {
    pub fn label(&self) -> String {
        match self {
            EncoderLayer::Identity => "identity".into(),
            EncoderLayer::FeatureRotations { axis, entangle } => {
                let a = match axis {
                    RotationAxis::X => "x",
                    RotationAxis::Y => "y",
                    RotationAxis::Z => "z",
                };
                if *entangle {
                    format!("{a}-rotations+ladder")
                } else {
                    format!("{a}-rotations")
                }
            }
            EncoderLayer::CnotLadder => "cnot-ladder".into(),
        }
    }

    pub fn parse(label: &str) -> Result<Self> {
        let (base, entangle) = match label.strip_suffix("+ladder") {
            Some(b) => (b, true),
            None => (label, false),
        };
        let axis = |a| EncoderLayer::FeatureRotations { axis: a, entangle };
        match base {
            "identity" if !entangle => Ok(EncoderLayer::Identity),
            "cnot-ladder" if !entangle => Ok(EncoderLayer::CnotLadder),
            "x-rotations" => Ok(axis(RotationAxis::X)),
            "y-rotations" => Ok(axis(RotationAxis::Y)),
            "z-rotations" => Ok(axis(RotationAxis::Z)),
            _ => Err(Error::InvalidInput(format!("unknown encoder layer {label:?}"))),
        }
    }
}

/// A parametric circuit: encoder layers alternating with Pauli rotations,
/// measured through a Pauli observable.
///
/// The prepared state is `V_d W_d(θ_d) V_{d-1} ⋯ W_1(θ_1) V_0 |0…0⟩` with
/// `W_k(θ) = exp(-i θ G_k / 2)`, and the model value is the observable
/// expectation in that state. All generators and the observable are Pauli
/// strings, so their operator norm is exactly 1.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSpec {
    qubits: usize,
    generators: Vec<PauliString>,
    encoders: Vec<EncoderLayer>,
    observable: PauliString,
}

impl CircuitSpec {
    pub fn new(
        qubits: usize,
        generators: Vec<PauliString>,
        encoders: Vec<EncoderLayer>,
        observable: PauliString,
    ) -> Result<Self> {
        if qubits == 0 || qubits > MAX_QUBITS {
            return Err(Error::InvalidInput(format!(
                "qubit count {qubits} outside supported range 1..={MAX_QUBITS}"
            )));
        }
        if encoders.len() != generators.len() + 1 {
            return Err(Error::InvalidInput(format!(
                "expected {} encoder layers for {} rotations, got {}",
                generators.len() + 1,
                generators.len(),
                encoders.len()
            )));
        }
        for g in generators.iter().chain(std::iter::once(&observable)) {
            if g.qubits() != qubits {
                return Err(Error::DimensionMismatch { left: g.qubits(), right: qubits });
            }
        }
        Ok(Self { qubits, generators, encoders, observable })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    /// Number of trainable rotation parameters d.
    pub fn depth(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    pub fn encoders(&self) -> &[EncoderLayer] {
        &self.encoders
    }

    pub fn observable(&self) -> &PauliString {
        &self.observable
    }

    /// Deterministic default family for a given size.
    ///
    /// Encoder 0 embeds features through Z rotations plus a CNOT ladder;
    /// later layers alternate plain Y feature rotations with bare ladders.
    /// Generators cycle single-qubit X/Y/Z over the qubits, with every
    /// fourth gate widened to an adjacent two-qubit string. The observable
    /// is Z on the first qubit.
    pub fn standard(qubits: usize, depth: usize) -> Result<Self> {
        let axes = [Pauli::X, Pauli::Y, Pauli::Z];
        let mut generators = Vec::with_capacity(depth);
        for k in 0..depth {
            let q = k % qubits;
            let a = axes[k % 3];
            let g = if k % 4 == 3 && qubits >= 2 {
                let b = axes[(k + 1) % 3];
                PauliString::from_ops(qubits, &[(q, a), ((q + 1) % qubits, b)])?
            } else {
                PauliString::from_ops(qubits, &[(q, a)])?
            };
            generators.push(g);
        }
        let mut encoders = Vec::with_capacity(depth + 1);
        encoders.push(EncoderLayer::FeatureRotations { axis: RotationAxis::Z, entangle: true });
        for k in 1..=depth {
            if k % 2 == 1 {
                encoders.push(EncoderLayer::FeatureRotations {
                    axis: RotationAxis::Y,
                    entangle: false,
                });
            } else {
                encoders.push(EncoderLayer::CnotLadder);
            }
        }
        let observable = PauliString::from_ops(qubits, &[(0, Pauli::Z)])?;
        Self::new(qubits, generators, encoders, observable)
    }

    /// Random circuit of the same family, for verification suites.
    pub fn sample(rng: &mut StreamRng, qubits: usize, depth: usize) -> Result<Self> {
        let letters = [Pauli::X, Pauli::Y, Pauli::Z];
        let mut generators = Vec::with_capacity(depth);
        for _ in 0..depth {
            let q = rng.gen_range(0..qubits);
            let a = letters[rng.gen_range(0..3)];
            let g = if qubits >= 2 && rng.gen_range(0..3) == 0 {
                let b = letters[rng.gen_range(0..3)];
                PauliString::from_ops(qubits, &[(q, a), ((q + 1) % qubits, b)])?
            } else {
                PauliString::from_ops(qubits, &[(q, a)])?
            };
            generators.push(g);
        }
        let mut encoders = Vec::with_capacity(depth + 1);
        for k in 0..=depth {
            let layer = match rng.gen_range(0..4) {
                0 => EncoderLayer::Identity,
                1 => EncoderLayer::CnotLadder,
                _ => EncoderLayer::FeatureRotations {
                    axis: match rng.gen_range(0..3) {
                        0 => RotationAxis::X,
                        1 => RotationAxis::Y,
                        _ => RotationAxis::Z,
                    },
                    entangle: k == 0 && qubits >= 2,
                },
            };
            encoders.push(layer);
        }
        let observable =
            PauliString::from_ops(qubits, &[(rng.gen_range(0..qubits), letters[rng.gen_range(0..3)])])?;
        Self::new(qubits, generators, encoders, observable)
    }

    /// Model value f(θ, x) = ⟨0|U† O U|0⟩ ∈ [-1, 1].
    pub fn evaluate(&self, theta: &TorusPoint, x: &[f64]) -> Result<f64> {
        self.evaluate_raw(theta.coords(), x)
    }

    /// As [`evaluate`](Self::evaluate) on raw angles; f is 2π-periodic in
    /// each component, so any chart gives the same value.
    pub fn evaluate_raw(&self, theta: &[f64], x: &[f64]) -> Result<f64> {
        let state = self.prepare(theta, x)?;
        self.observable.expectation(&state)
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.depth() {
            return Err(Error::DimensionMismatch { left: theta.len(), right: self.depth() });
        }
        Ok(())
    }

    /// Runs the full circuit on |0…0⟩.
    fn prepare(&self, theta: &[f64], x: &[f64]) -> Result<StateVector> {
        self.check_theta(theta)?;
        let mut state = StateVector::zero_state(self.qubits);
        apply_encoder_mut(&mut state, &self.encoders[0], x)?;
        for (k, angle) in theta.iter().enumerate() {
            state = apply_pauli_rotation(&state, &self.generators[k], *angle)?;
            apply_encoder_mut(&mut state, &self.encoders[k + 1], x)?;
        }
        Ok(state)
    }

    /// Exact gradient by one forward and one backward sweep.
    ///
    /// Each gate is applied (or undone) a constant number of times, for an
    /// O(d · 2^m) total. With G² = I the component formula reduces to
    /// Im ⟨λ_k | G_k | φ_k⟩ with λ, φ the partially unwound bra and ket.
    pub fn gradient_adjoint(&self, theta: &TorusPoint, x: &[f64]) -> Result<Vec<f64>> {
        self.gradient_adjoint_raw(theta.coords(), x)
    }

    pub fn gradient_adjoint_raw(&self, theta: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        self.check_theta(theta)?;
        let d = self.depth();
        let mut grad = vec![0.0; d];
        let mut ket = self.prepare(theta, x)?;
        let mut bra = self.observable.apply(&ket)?;
        for k in (0..d).rev() {
            apply_encoder_inverse_mut(&mut ket, &self.encoders[k + 1], x)?;
            apply_encoder_inverse_mut(&mut bra, &self.encoders[k + 1], x)?;
            let g_ket = self.generators[k].apply(&ket)?;
            grad[k] = bra.inner(&g_ket)?.im;
            ket = apply_pauli_rotation(&ket, &self.generators[k], -theta[k])?;
            bra = apply_pauli_rotation(&bra, &self.generators[k], -theta[k])?;
        }
        Ok(grad)
    }

    /// Independent gradient oracle: two shifted evaluations per parameter.
    ///
    /// Valid because every generator is a Pauli string (eigenvalues ±1), so
    /// f is a sinusoid in each parameter.
    pub fn gradient_parameter_shift(&self, theta: &TorusPoint, x: &[f64]) -> Result<Vec<f64>> {
        self.gradient_parameter_shift_raw(theta.coords(), x)
    }

    pub fn gradient_parameter_shift_raw(&self, theta: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        self.check_theta(theta)?;
        let mut grad = vec![0.0; self.depth()];
        let mut shifted = theta.to_vec();
        for k in 0..self.depth() {
            shifted[k] = theta[k] + FRAC_PI_2;
            let plus = self.evaluate_raw(&shifted, x)?;
            shifted[k] = theta[k] - FRAC_PI_2;
            let minus = self.evaluate_raw(&shifted, x)?;
            shifted[k] = theta[k];
            grad[k] = 0.5 * (plus - minus);
        }
        Ok(grad)
    }

    /// Second derivative ∂_j ∂_k f via the exact four-point shift formula
    /// (shifting by ±π/2 in each index; coinciding indices reduce to the
    /// ±π diagonal rule through periodicity).
    pub fn hessian_entry(&self, theta: &TorusPoint, x: &[f64], j: usize, k: usize) -> Result<f64> {
        self.hessian_entry_raw(theta.coords(), x, j, k)
    }

    pub fn hessian_entry_raw(&self, theta: &[f64], x: &[f64], j: usize, k: usize) -> Result<f64> {
        self.check_theta(theta)?;
        let d = self.depth();
        if j >= d {
            return Err(Error::ParameterOutOfRange { index: j, count: d });
        }
        if k >= d {
            return Err(Error::ParameterOutOfRange { index: k, count: d });
        }
        let mut shifted = theta.to_vec();
        let mut acc = 0.0;
        for (sj, sk, w) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)]
        {
            shifted.copy_from_slice(theta);
            shifted[j] += sj * FRAC_PI_2;
            shifted[k] += sk * FRAC_PI_2;
            acc += w * self.evaluate_raw(&shifted, x)?;
        }
        Ok(0.25 * acc)
    }

    /// Serializes to the structured text block used inside config files.
    pub fn to_config_string(&self) -> Result<String> {
        let mirror = CircuitSpecConfig {
            qubits: self.qubits,
            depth: self.depth(),
            generators: self.generators.iter().map(|g| g.to_string()).collect(),
            encoders: self.encoders.iter().map(|e| e.label()).collect(),
            observable: self.observable.to_string(),
        };
        Ok(toml::to_string(&mirror)?)
    }

    pub fn from_config_string(text: &str) -> Result<Self> {
        let mirror: CircuitSpecConfig = toml::from_str(text)?;
        mirror.build()
    }
}

/// Serialized form of a [`CircuitSpec`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct CircuitSpecConfig {
    pub qubits: usize,
    pub depth: usize,
    pub generators: Vec<String>,
    pub encoders: Vec<String>,
    pub observable: String,
}

impl CircuitSpecConfig {
    pub fn build(&self) -> Result<CircuitSpec> {
        if self.generators.len() != self.depth {
            return Err(Error::Config(format!(
                "generators: expected {} entries for depth {}, got {}",
                self.depth,
                self.depth,
                self.generators.len()
            )));
        }
        let generators = self
            .generators
            .iter()
            .map(|l| parse_pauli_label(l, self.qubits))
            .collect::<Result<Vec<_>>>()?;
        let encoders = self
            .encoders
            .iter()
            .map(|l| EncoderLayer::parse(l))
            .collect::<Result<Vec<_>>>()?;
        let observable = parse_pauli_label(&self.observable, self.qubits)?;
        CircuitSpec::new(self.qubits, generators, encoders, observable)
    }
}

/// `out = cos(angle/2)·ψ − i sin(angle/2)·(G ψ)` for a Pauli generator G.
pub fn apply_pauli_rotation(
    state: &StateVector,
    generator: &PauliString,
    angle: f64,
) -> Result<StateVector> {
    let applied = generator.apply(state)?;
    let c = Complex64::new((0.5 * angle).cos(), 0.0);
    let s = Complex64::new(0.0, -(0.5 * angle).sin());
    let amps = state
        .amplitudes()
        .iter()
        .zip(applied.amplitudes())
        .map(|(a, g)| c * a + s * g)
        .collect();
    Ok(StateVector::from_amplitudes(amps, state.qubits()))
}

/// Applies a data-encoding layer.
pub fn apply_encoder(state: &StateVector, layer: &EncoderLayer, x: &[f64]) -> Result<StateVector> {
    let mut out = state.clone();
    apply_encoder_mut(&mut out, layer, x)?;
    Ok(out)
}

fn apply_encoder_mut(state: &mut StateVector, layer: &EncoderLayer, x: &[f64]) -> Result<()> {
    match layer {
        EncoderLayer::Identity => Ok(()),
        EncoderLayer::CnotLadder => {
            apply_cnot_ladder(state);
            Ok(())
        }
        EncoderLayer::FeatureRotations { axis, entangle } => {
            apply_feature_rotations(state, *axis, x, 1.0)?;
            if *entangle {
                apply_cnot_ladder(state);
            }
            Ok(())
        }
    }
}

fn apply_encoder_inverse_mut(state: &mut StateVector, layer: &EncoderLayer, x: &[f64]) -> Result<()> {
    match layer {
        EncoderLayer::Identity => Ok(()),
        EncoderLayer::CnotLadder => {
            apply_cnot_ladder_reversed(state);
            Ok(())
        }
        EncoderLayer::FeatureRotations { axis, entangle } => {
            if *entangle {
                apply_cnot_ladder_reversed(state);
            }
            apply_feature_rotations(state, *axis, x, -1.0)?;
            Ok(())
        }
    }
}

fn apply_feature_rotations(
    state: &mut StateVector,
    axis: RotationAxis,
    x: &[f64],
    sign: f64,
) -> Result<()> {
    if x.is_empty() {
        return Err(Error::InvalidInput("empty feature vector".into()));
    }
    let m = state.qubits();
    for q in 0..m {
        let angle = sign * x[q % x.len()];
        rotate_single_qubit(state, q, axis, angle);
    }
    Ok(())
}

/// In-place single-qubit rotation exp(-i angle P_q / 2).
fn rotate_single_qubit(state: &mut StateVector, q: usize, axis: RotationAxis, angle: f64) {
    let c = (0.5 * angle).cos();
    let s = (0.5 * angle).sin();
    let bit = 1usize << q;
    let amps = state.amplitudes_mut();
    match axis {
        RotationAxis::Z => {
            let phase0 = Complex64::new(c, -s);
            let phase1 = Complex64::new(c, s);
            for (idx, a) in amps.iter_mut().enumerate() {
                *a *= if idx & bit == 0 { phase0 } else { phase1 };
            }
        }
        RotationAxis::X => {
            for idx in 0..amps.len() {
                if idx & bit == 0 {
                    let a0 = amps[idx];
                    let a1 = amps[idx | bit];
                    amps[idx] = c * a0 - Complex64::new(0.0, s) * a1;
                    amps[idx | bit] = c * a1 - Complex64::new(0.0, s) * a0;
                }
            }
        }
        RotationAxis::Y => {
            for idx in 0..amps.len() {
                if idx & bit == 0 {
                    let a0 = amps[idx];
                    let a1 = amps[idx | bit];
                    amps[idx] = c * a0 - s * a1;
                    amps[idx | bit] = c * a1 + s * a0;
                }
            }
        }
    }
}

fn apply_cnot(state: &mut StateVector, control: usize, target: usize) {
    let cbit = 1usize << control;
    let tbit = 1usize << target;
    let amps = state.amplitudes_mut();
    for idx in 0..amps.len() {
        if idx & cbit != 0 && idx & tbit == 0 {
            amps.swap(idx, idx | tbit);
        }
    }
}

fn apply_cnot_ladder(state: &mut StateVector) {
    let m = state.qubits();
    for q in 0..m.saturating_sub(1) {
        apply_cnot(state, q, q + 1);
    }
}

fn apply_cnot_ladder_reversed(state: &mut StateVector) {
    let m = state.qubits();
    for q in (0..m.saturating_sub(1)).rev() {
        apply_cnot(state, q, q + 1);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_3, PI, TAU};

    use crate::torus::sample_uniform;

    /// m=1 circuit with G=X, trivial encoders, O=Z: f(θ) = cos θ.
    fn cos_circuit() -> CircuitSpec {
        CircuitSpec::new(
            1,
            vec![PauliString::from_ops(1, &[(0, Pauli::X)]).unwrap()],
            vec![EncoderLayer::Identity, EncoderLayer::Identity],
            PauliString::from_ops(1, &[(0, Pauli::Z)]).unwrap(),
        )
        .unwrap()
    }

    fn point(coords: &[f64]) -> TorusPoint {
        TorusPoint::wrap(coords).unwrap()
    }

    #[test]
    fn rotation_angle_zero_is_identity() {
        let mut rng = StreamRng::new(8, 0);
        let state = StateVector::random(&mut rng, 3);
        let g = PauliString::from_ops(3, &[(1, Pauli::Y)]).unwrap();
        let out = apply_pauli_rotation(&state, &g, 0.0).unwrap();
        assert_eq!(out.amplitudes(), state.amplitudes());
    }

    #[test]
    fn rotation_x_pi_on_zero_state() {
        let state = StateVector::zero_state(1);
        let g = PauliString::from_ops(1, &[(0, Pauli::X)]).unwrap();
        let out = apply_pauli_rotation(&state, &g, PI).unwrap();
        assert!(out.amplitudes()[0].norm() < 1e-15);
        assert!((out.amplitudes()[1] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn rotation_four_pi_fixes_expectation() {
        let spec = cos_circuit();
        for theta in [0.3, 1.1, 4.9] {
            let a = spec.evaluate_raw(&[theta], &[0.0]).unwrap();
            let b = spec.evaluate_raw(&[theta + 2.0 * TAU], &[0.0]).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_rejects_out_of_range_qubit() {
        let state = StateVector::zero_state(2);
        let g = PauliString::from_ops(3, &[(2, Pauli::X)]).unwrap();
        assert!(apply_pauli_rotation(&state, &g, 1.0).is_err());
    }

    #[test]
    fn encoder_trivial_cases() {
        let state = StateVector::zero_state(3);
        let id = apply_encoder(&state, &EncoderLayer::Identity, &[1.0]).unwrap();
        assert_eq!(id.amplitudes(), state.amplitudes());

        // Z rotations with zero features leave the state untouched.
        let z0 = apply_encoder(
            &state,
            &EncoderLayer::FeatureRotations { axis: RotationAxis::Z, entangle: false },
            &[0.0],
        )
        .unwrap();
        for (a, b) in z0.amplitudes().iter().zip(state.amplitudes()) {
            assert!((a - b).norm() < 1e-15);
        }

        // CNOTs fix |0…0⟩.
        let ladder = apply_encoder(&state, &EncoderLayer::CnotLadder, &[1.0]).unwrap();
        assert_eq!(ladder.amplitudes(), state.amplitudes());
    }

    #[test]
    fn evaluate_cos_circuit() {
        let spec = cos_circuit();
        assert!((spec.evaluate(&point(&[0.0]), &[0.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((spec.evaluate(&point(&[PI]), &[0.0]).unwrap() + 1.0).abs() < 1e-15);
        assert!((spec.evaluate(&point(&[FRAC_PI_3]), &[0.0]).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn evaluate_rejects_dimension_mismatch() {
        let spec = cos_circuit();
        assert!(spec.evaluate(&point(&[0.0, 0.0]), &[0.0]).is_err());
    }

    #[test]
    fn evaluate_bounded_on_random_specs() {
        let mut rng = StreamRng::new(77, 0);
        for _ in 0..100 {
            let spec = CircuitSpec::sample(&mut rng, 3, 5).unwrap();
            let theta = sample_uniform(&mut rng, 5).unwrap();
            let x: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() * TAU).collect();
            let f = spec.evaluate(&theta, &x).unwrap();
            assert!(f.abs() <= 1.0 + 1e-12, "|f| = {}", f.abs());
        }
    }

    #[test]
    fn gradient_cos_circuit() {
        let spec = cos_circuit();
        let g = spec.gradient_adjoint(&point(&[FRAC_PI_2]), &[0.0]).unwrap();
        assert!((g[0] + 1.0).abs() < 1e-12);
        let g0 = spec.gradient_adjoint(&point(&[0.0]), &[0.0]).unwrap();
        assert!(g0[0].abs() < 1e-12);
    }

    #[test]
    fn parameter_shift_cos_circuit() {
        let spec = cos_circuit();
        let g = spec.gradient_parameter_shift(&point(&[FRAC_PI_2]), &[0.0]).unwrap();
        assert_eq!(g[0], -1.0);
        let g0 = spec.gradient_parameter_shift(&point(&[0.0]), &[0.0]).unwrap();
        assert!(g0[0].abs() < 1e-15);
    }

    #[test]
    fn adjoint_matches_parameter_shift() {
        let mut rng = StreamRng::new(123, 0);
        for _ in 0..60 {
            let d = rng.gen_range(1..=6);
            let spec = CircuitSpec::sample(&mut rng, 3, d).unwrap();
            let theta = sample_uniform(&mut rng, d).unwrap();
            let x: Vec<f64> = (0..4).map(|_| rng.gen::<f64>() * TAU).collect();
            let adj = spec.gradient_adjoint(&theta, &x).unwrap();
            let shift = spec.gradient_parameter_shift(&theta, &x).unwrap();
            for (a, s) in adj.iter().zip(&shift) {
                assert!((a - s).abs() < 1e-9, "adjoint {a} vs shift {s}");
            }
        }
    }

    #[test]
    fn adjoint_matches_finite_differences() {
        let mut rng = StreamRng::new(321, 0);
        let h = 1e-5;
        for _ in 0..25 {
            let spec = CircuitSpec::sample(&mut rng, 3, 4).unwrap();
            let theta = sample_uniform(&mut rng, 4).unwrap();
            let x: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() * TAU).collect();
            let adj = spec.gradient_adjoint(&theta, &x).unwrap();
            for k in 0..4 {
                let mut plus = theta.coords().to_vec();
                let mut minus = plus.clone();
                plus[k] += h;
                minus[k] -= h;
                let fd = (spec.evaluate_raw(&plus, &x).unwrap()
                    - spec.evaluate_raw(&minus, &x).unwrap())
                    / (2.0 * h);
                assert!((adj[k] - fd).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn hessian_cos_circuit() {
        let spec = cos_circuit();
        let h00 = spec.hessian_entry(&point(&[0.0]), &[0.0], 0, 0).unwrap();
        assert!((h00 + 1.0).abs() < 1e-12);
        let h = spec.hessian_entry(&point(&[FRAC_PI_2]), &[0.0], 0, 0).unwrap();
        assert!(h.abs() < 1e-12);
        assert!(spec.hessian_entry(&point(&[0.0]), &[0.0], 0, 1).is_err());
    }

    #[test]
    fn hessian_symmetric_and_bounded() {
        let mut rng = StreamRng::new(55, 0);
        for _ in 0..20 {
            let spec = CircuitSpec::sample(&mut rng, 3, 4).unwrap();
            let theta = sample_uniform(&mut rng, 4).unwrap();
            let x: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() * TAU).collect();
            for j in 0..4 {
                for k in j..4 {
                    let jk = spec.hessian_entry(&theta, &x, j, k).unwrap();
                    let kj = spec.hessian_entry(&theta, &x, k, j).unwrap();
                    assert!((jk - kj).abs() < 1e-9);
                    assert!(jk.abs() <= 1.0 + 1e-12);
                }
            }
        }
    }

    #[test]
    fn norm_preserved_through_circuits() {
        let mut rng = StreamRng::new(99, 0);
        for _ in 0..40 {
            let spec = CircuitSpec::sample(&mut rng, 4, 6).unwrap();
            let theta = sample_uniform(&mut rng, 6).unwrap();
            let x: Vec<f64> = (0..4).map(|_| rng.gen::<f64>() * TAU).collect();
            let state = spec.prepare(theta.coords(), &x).unwrap();
            assert!((state.norm_sqr() - 1.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn periodicity_in_each_component() {
        let mut rng = StreamRng::new(66, 0);
        let spec = CircuitSpec::sample(&mut rng, 3, 4).unwrap();
        let theta = sample_uniform(&mut rng, 4).unwrap();
        let x: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() * TAU).collect();
        let base = spec.evaluate(&theta, &x).unwrap();
        for k in 0..4 {
            let mut shifted = theta.coords().to_vec();
            shifted[k] += TAU;
            let v = spec.evaluate_raw(&shifted, &x).unwrap();
            assert!((v - base).abs() < 1e-12);
        }
    }

    #[test]
    fn lipschitz_bounds_on_random_pairs() {
        // |f(θ)-f(θ')| ≤ ||θ-θ'||₁ and ||∇f(θ)-∇f(θ')||₁ ≤ d·||θ-θ'||₁.
        let mut rng = StreamRng::new(471, 0);
        let d = 4;
        for _ in 0..50 {
            let spec = CircuitSpec::sample(&mut rng, 3, d).unwrap();
            let x: Vec<f64> = (0..3).map(|_| rng.gen::<f64>() * TAU).collect();
            let a = sample_uniform(&mut rng, d).unwrap();
            let b = sample_uniform(&mut rng, d).unwrap();
            let dist = a.l1_distance(&b).unwrap();
            let fa = spec.evaluate(&a, &x).unwrap();
            let fb = spec.evaluate(&b, &x).unwrap();
            assert!((fa - fb).abs() <= dist + 1e-9);
            let ga = spec.gradient_adjoint(&a, &x).unwrap();
            let gb = spec.gradient_adjoint(&b, &x).unwrap();
            let gdist: f64 = ga.iter().zip(&gb).map(|(p, q)| (p - q).abs()).sum();
            assert!(gdist <= d as f64 * dist + 1e-9);
        }
    }

    #[test]
    fn config_round_trip_is_exact() {
        let mut rng = StreamRng::new(2, 9);
        for _ in 0..20 {
            let spec = CircuitSpec::sample(&mut rng, 3, 5).unwrap();
            let text = spec.to_config_string().unwrap();
            let back = CircuitSpec::from_config_string(&text).unwrap();
            assert_eq!(spec, back);
            assert_eq!(text, back.to_config_string().unwrap());
        }
        let std = CircuitSpec::standard(3, 6).unwrap();
        let back = CircuitSpec::from_config_string(&std.to_config_string().unwrap()).unwrap();
        assert_eq!(std, back);
    }
}
