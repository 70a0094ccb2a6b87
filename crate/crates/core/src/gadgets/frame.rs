use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{mat_x, mat_z, Gate, Mat2};

/// Pauli by-product record `prod_j X_j^{x_j} Z_j^{z_j}` over register qubits.
///
/// The physical state equals the frame operator applied to the ideal state,
/// up to global phase.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PauliFrame {
    pub x: Vec<bool>,
    pub z: Vec<bool>,
}

/// Result of pushing a frame through a gate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameStep {
    pub frame: PauliFrame,
    /// The gate's rotation angle must be negated for the ideal gate to result.
    pub negate_angle: bool,
}

impl PauliFrame {
    pub fn identity(n: usize) -> Self {
        Self {
            x: vec![false; n],
            z: vec![false; n],
        }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        !self.x.iter().chain(&self.z).any(|&b| b)
    }

    pub fn get(&self, q: usize) -> (bool, bool) {
        (self.x[q], self.z[q])
    }

    pub fn set(&mut self, q: usize, x: bool, z: bool) {
        self.x[q] = x;
        self.z[q] = z;
    }

    /// Multiplies in `X^x Z^z` on qubit `q` (phases ignored).
    pub fn toggle(&mut self, q: usize, x: bool, z: bool) {
        self.x[q] ^= x;
        self.z[q] ^= z;
    }

    /// Composes another frame of the same length into this one.
    pub fn compose(&mut self, other: &PauliFrame) -> Result<()> {
        if other.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        for q in 0..self.len() {
            self.toggle(q, other.x[q], other.z[q]);
        }
        Ok(())
    }

    /// The 2x2 operator `X^x Z^z` on qubit `q`.
    pub fn operator(&self, q: usize) -> Mat2 {
        pauli_operator(self.x[q], self.z[q])
    }
}

/// `X^x Z^z` as a matrix.
pub fn pauli_operator(x: bool, z: bool) -> Mat2 {
    let mut m = crate::qsim::mat_identity2();
    if z {
        m = mat_z();
    }
    if x {
        m = crate::qsim::mul2(&mat_x(), &m);
    }
    m
}

/// Pushes `frame` through `gate` on `targets`.
///
/// With `P` the incoming frame and `U` the gate, returns `P'` and an angle
/// adaptation such that `U_adapted P = P' U` up to phase.
pub fn frame_conjugate(frame: &PauliFrame, gate: &Gate, targets: &[usize]) -> Result<FrameStep> {
    if targets.len() != gate.arity() {
        return Err(Error::ArityMismatch {
            expected: gate.arity(),
            got: targets.len(),
        });
    }
    for &t in targets {
        if t >= frame.len() {
            return Err(Error::QubitOutOfRange {
                index: t,
                num_qubits: frame.len(),
            });
        }
    }
    let mut out = frame.clone();
    let mut negate = false;
    match (gate, targets) {
        (Gate::H, [q]) => out.set(*q, frame.z[*q], frame.x[*q]),
        (Gate::RZ(_), [q]) => negate = frame.x[*q],
        (Gate::RX(_), [q]) => negate = frame.z[*q],
        (Gate::HRZ(_), [q]) => {
            negate = frame.x[*q];
            out.set(*q, frame.z[*q], frame.x[*q]);
        }
        (Gate::CZ, [i, j]) => {
            if i == j {
                return Err(Error::DuplicateTargets);
            }
            out.z[*j] ^= frame.x[*i];
            out.z[*i] ^= frame.x[*j];
        }
        (g, _) => return Err(Error::UnsupportedGate(format!("{g:?}"))),
    }
    Ok(FrameStep {
        frame: out,
        negate_angle: negate,
    })
}
