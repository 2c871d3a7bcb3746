use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::state::StateVector;

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A Pauli string on `m` qubits: one letter per qubit.
///
/// Pauli strings are Hermitian and unitary, so their operator norm is exactly
/// 1 (identity included). They serve both as rotation generators and as
/// observables.
///
/// The text form lists non-identity letters with their qubit indices, e.g.
/// `"X0"` or `"Z1Z2"`; the bare identity is `"I"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    /// Identity on `m` qubits.
    pub fn identity(m: usize) -> Self {
        Self { letters: vec![Pauli::I; m] }
    }

    /// Builds a string from `(qubit, letter)` pairs on `m` qubits.
    pub fn from_ops(m: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        let mut letters = vec![Pauli::I; m];
        for &(q, p) in ops {
            if q >= m {
                return Err(Error::QubitOutOfRange { qubit: q, qubits: m });
            }
            letters[q] = p;
        }
        Ok(Self { letters })
    }

    pub fn qubits(&self) -> usize {
        self.letters.len()
    }

    /// Qubits carrying a non-identity letter.
    pub fn support(&self) -> Vec<usize> {
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != Pauli::I)
            .map(|(q, _)| q)
            .collect()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    /// Applies the string to a state: `out = P |ψ⟩`.
    ///
    /// On a basis state, X/Y flip the qubit's bit; Y and Z contribute phases
    /// ±i and ±1 respectively.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if self.qubits() != state.qubits() {
            return Err(Error::DimensionMismatch {
                left: self.qubits(),
                right: state.qubits(),
            });
        }
        let mut flip_mask = 0usize;
        let mut y_mask = 0usize;
        let mut z_mask = 0usize;
        for (q, &p) in self.letters.iter().enumerate() {
            match p {
                Pauli::I => {}
                Pauli::X => flip_mask |= 1 << q,
                Pauli::Y => {
                    flip_mask |= 1 << q;
                    y_mask |= 1 << q;
                }
                Pauli::Z => z_mask |= 1 << q,
            }
        }
        let n = state.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        let y_count = y_mask.count_ones() as usize;
        for (idx, amp) in state.amplitudes().iter().enumerate() {
            // Sign from Z letters on set bits, and from Y letters: Y|b⟩ = i(-1)^b |1-b⟩.
            let z_par = (idx & z_mask).count_ones() as usize;
            let y_par = (idx & y_mask).count_ones() as usize;
            let sign = if (z_par + y_par) % 2 == 0 { 1.0 } else { -1.0 };
            let phase = match y_count % 4 {
                0 => Complex64::new(sign, 0.0),
                1 => Complex64::new(0.0, sign),
                2 => Complex64::new(-sign, 0.0),
                _ => Complex64::new(0.0, -sign),
            };
            out[idx ^ flip_mask] = phase * amp;
        }
        Ok(StateVector::from_amplitudes(out, state.qubits()))
    }

    /// Real expectation `⟨ψ| P |ψ⟩`.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        let applied = self.apply(state)?;
        let value = state.inner(&applied)?;
        debug_assert!(value.im.abs() < 1e-10, "Hermitian expectation must be real");
        Ok(value.re)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let support = self.support();
        if support.is_empty() {
            return write!(f, "I");
        }
        for q in support {
            write!(f, "{}{}", self.letters[q].letter(), q)?;
        }
        Ok(())
    }
}

/// Parses the compact label form; requires the target qubit count.
pub fn parse_pauli_label(label: &str, m: usize) -> Result<PauliString> {
    let trimmed = label.trim();
    if trimmed.is_empty() {
        return Err(Error::InvalidInput(format!("empty Pauli label {label:?}")));
    }
    if trimmed == "I" {
        return Ok(PauliString::identity(m));
    }
    let mut ops = Vec::new();
    let mut chars = trimmed.chars().peekable();
    while let Some(c) = chars.next() {
        if c.is_whitespace() {
            continue;
        }
        let p = match c {
            'X' | 'x' => Pauli::X,
            'Y' | 'y' => Pauli::Y,
            'Z' | 'z' => Pauli::Z,
            other => {
                return Err(Error::InvalidInput(format!(
                    "invalid Pauli letter {other:?} in {label:?}"
                )))
            }
        };
        let mut digits = String::new();
        while let Some(d) = chars.peek() {
            if d.is_ascii_digit() {
                digits.push(*d);
                chars.next();
            } else {
                break;
            }
        }
        if digits.is_empty() {
            return Err(Error::InvalidInput(format!(
                "missing qubit index after {c:?} in {label:?}"
            )));
        }
        let q: usize = digits
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad qubit index in {label:?}")))?;
        ops.push((q, p));
    }
    PauliString::from_ops(m, &ops)
}

impl FromStr for Pauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "i" => Ok(Pauli::I),
            "X" | "x" => Ok(Pauli::X),
            "Y" | "y" => Ok(Pauli::Y),
            "Z" | "z" => Ok(Pauli::Z),
            other => Err(Error::InvalidInput(format!("invalid Pauli letter {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn apply_x_flips_basis_state() {
        let state = StateVector::zero_state(1);
        let x = PauliString::from_ops(1, &[(0, Pauli::X)]).unwrap();
        let out = x.apply(&state).unwrap();
        assert_eq!(out.amplitudes()[0], Complex64::new(0.0, 0.0));
        assert_eq!(out.amplitudes()[1], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn apply_y_adds_phase() {
        let state = StateVector::zero_state(1);
        let y = PauliString::from_ops(1, &[(0, Pauli::Y)]).unwrap();
        let out = y.apply(&state).unwrap();
        assert_eq!(out.amplitudes()[1], Complex64::new(0.0, 1.0));
        // Y|1⟩ = -i|0⟩
        let back = y.apply(&out).unwrap();
        assert_eq!(back.amplitudes()[0], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn pauli_strings_square_to_identity() {
        use crate::torus::StreamRng;
        use rand::Rng;
        let mut rng = StreamRng::new(31, 0);
        for _ in 0..50 {
            let m = 3;
            let ops: Vec<(usize, Pauli)> = (0..m)
                .filter_map(|q| {
                    match rng.gen_range(0..4) {
                        0 => None,
                        1 => Some((q, Pauli::X)),
                        2 => Some((q, Pauli::Y)),
                        _ => Some((q, Pauli::Z)),
                    }
                })
                .collect();
            let p = PauliString::from_ops(m, &ops).unwrap();
            let psi = StateVector::random(&mut rng, m);
            let twice = p.apply(&p.apply(&psi).unwrap()).unwrap();
            for (a, b) in twice.amplitudes().iter().zip(psi.amplitudes()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn label_round_trip() {
        for label in ["X0", "Z1Z2", "Y0X2", "I"] {
            let p = parse_pauli_label(label, 3).unwrap();
            assert_eq!(p.to_string(), label);
        }
        assert!(parse_pauli_label("X9", 3).is_err());
        assert!(parse_pauli_label("Q0", 3).is_err());
        assert!(parse_pauli_label("X", 3).is_err());
    }
}
