use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// 2x2 complex matrix in row-major order.
pub type Mat2 = [[C64; 2]; 2];
/// 4x4 complex matrix in row-major order.
pub type Mat4 = [[C64; 4]; 4];
/// Amplitudes of a single qubit, `[<0|psi>, <1|psi>]`.
pub type Qubit = [C64; 2];

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 20;

const NORM_TOLERANCE: f64 = 1e-9;

/// Dense state vector over `num_qubits` qubits.
///
/// Little-endian: qubit 0 is the least significant bit of the amplitude index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0...0>` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    /// Computational basis state `|index>`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_size(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::InvalidState(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    /// Builds a state from raw amplitudes. The vector must already be normalised.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidState(format!(
                "amplitude length {len} is not a power of two >= 2"
            )));
        }
        let num_qubits = len.trailing_zeros() as usize;
        check_size(num_qubits)?;
        let state = Self { num_qubits, amps };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!("norm {norm} differs from 1")));
        }
        Ok(state)
    }

    /// Like [`from_amplitudes`](Self::from_amplitudes) but rescales to unit norm first.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-300 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(amps)
    }

    /// Tensor product of single-qubit states; `qubits[0]` becomes qubit 0.
    pub fn product(qubits: &[Qubit]) -> Result<Self> {
        let (first, rest) = qubits
            .split_first()
            .ok_or_else(|| Error::InvalidState("empty product".into()))?;
        let mut state = Self::normalized(first.to_vec())?;
        for q in rest {
            state.push_qubit(*q)?;
        }
        Ok(state)
    }

    /// Haar-random pure state drawn from normalised complex Gaussians.
    pub fn random<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Result<Self> {
        check_size(num_qubits)?;
        let amps = (0..1usize << num_qubits)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::normalized(amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.num_qubits, other.num_qubits));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub(crate) fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            Err(Error::QubitOutOfRange {
                index: q,
                num_qubits: self.num_qubits,
            })
        } else {
            Ok(())
        }
    }

    fn renormalize(&mut self) {
        let norm = self.norm();
        self.amps.iter_mut().for_each(|a| *a /= norm);
    }

    /// Appends a fresh qubit in state `q` as the new most significant qubit.
    /// Returns its index.
    pub fn push_qubit(&mut self, q: Qubit) -> Result<usize> {
        check_size(self.num_qubits + 1)?;
        let qn = (q[0].norm_sqr() + q[1].norm_sqr()).sqrt();
        if (qn - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "qubit norm {qn} differs from 1"
            )));
        }
        let dim = self.dim();
        let mut amps = Vec::with_capacity(2 * dim);
        amps.extend(self.amps.iter().map(|a| a * q[0]));
        amps.extend(self.amps.iter().map(|a| a * q[1]));
        self.amps = amps;
        self.num_qubits += 1;
        Ok(self.num_qubits - 1)
    }

    /// Contracts qubit `q` with `<bra|` and removes it, renormalising the rest.
    ///
    /// Returns the squared norm of the contracted vector, i.e. the probability of
    /// finding the qubit in `bra`.
    pub fn project_out(&mut self, q: usize, bra: Qubit) -> Result<f64> {
        self.check_qubit(q)?;
        if self.num_qubits == 1 {
            return Err(Error::InvalidState("cannot remove the last qubit".into()));
        }
        let mask = 1usize << q;
        let low = mask - 1;
        let half = self.dim() / 2;
        let (b0, b1) = (bra[0].conj(), bra[1].conj());
        let mut amps = Vec::with_capacity(half);
        for j in 0..half {
            let i0 = ((j & !low) << 1) | (j & low);
            amps.push(b0 * self.amps[i0] + b1 * self.amps[i0 | mask]);
        }
        let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if p < 1e-300 {
            return Err(Error::InvalidState("projection has zero norm".into()));
        }
        self.amps = amps;
        self.num_qubits -= 1;
        self.renormalize();
        Ok(p)
    }

    /// If qubit `q` is in a pure product state with the rest, returns that state.
    pub fn factor_qubit(&self, q: usize) -> Result<Option<Qubit>> {
        self.check_qubit(q)?;
        let mask = 1usize << q;
        // Reduced density matrix of q.
        let (mut r00, mut r11, mut r01) = (0.0, 0.0, C64::new(0.0, 0.0));
        for i in 0..self.dim() {
            if i & mask == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | mask];
                r00 += a0.norm_sqr();
                r11 += a1.norm_sqr();
                r01 += a0 * a1.conj();
            }
        }
        // Purity 1 <=> det = 0.
        let det = r00 * r11 - r01.norm_sqr();
        if det.abs() > 1e-12 {
            return Ok(None);
        }
        // Pure state is the column of rho with the larger diagonal, normalised.
        let q_state = if r00 >= r11 {
            let n = r00.sqrt();
            [C64::new(n, 0.0), r01.conj() / n]
        } else {
            let n = r11.sqrt();
            [r01 / n, C64::new(n, 0.0)]
        };
        Ok(Some(q_state))
    }

    /// Applies a single-qubit matrix in place.
    pub fn apply_mat2(&mut self, m: &Mat2, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        let mask = 1usize << q;
        let low = mask - 1;
        for j in 0..self.dim() / 2 {
            let i0 = ((j & !low) << 1) | (j & low);
            let i1 = i0 | mask;
            let (a0, a1) = (self.amps[i0], self.amps[i1]);
            self.amps[i0] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[i1] = m[1][0] * a0 + m[1][1] * a1;
        }
        Ok(())
    }

    /// Applies a diagonal single-qubit phase `diag(1, phase)` in place.
    pub fn apply_phase(&mut self, phase: C64, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        let mask = 1usize << q;
        self.amps
            .iter_mut()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .for_each(|(_, a)| *a *= phase);
        Ok(())
    }

    /// Applies a two-qubit matrix in place. The 4x4 index is `2*bit(q0) + bit(q1)`,
    /// so `q0` is the first tensor factor.
    pub fn apply_mat4(&mut self, m: &Mat4, q0: usize, q1: usize) -> Result<()> {
        self.check_qubit(q0)?;
        self.check_qubit(q1)?;
        if q0 == q1 {
            return Err(Error::DuplicateTargets);
        }
        let (m0, m1) = (1usize << q0, 1usize << q1);
        for i in 0..self.dim() {
            if i & (m0 | m1) != 0 {
                continue;
            }
            let idx = [i, i | m1, i | m0, i | m0 | m1];
            let a = idx.map(|k| self.amps[k]);
            for (r, &k) in idx.iter().enumerate() {
                self.amps[k] = m[r][0] * a[0] + m[r][1] * a[1] + m[r][2] * a[2] + m[r][3] * a[3];
            }
        }
        Ok(())
    }

    /// Controlled-Z between two qubits, in place.
    pub fn apply_cz(&mut self, q0: usize, q1: usize) -> Result<()> {
        self.check_qubit(q0)?;
        self.check_qubit(q1)?;
        if q0 == q1 {
            return Err(Error::DuplicateTargets);
        }
        let both = (1usize << q0) | (1usize << q1);
        self.amps
            .iter_mut()
            .enumerate()
            .filter(|(i, _)| i & both == both)
            .for_each(|(_, a)| *a = -*a);
        Ok(())
    }

    /// Born probabilities of the two eigenstates `e` of a single-qubit basis.
    pub fn outcome_probabilities(&self, q: usize, e: &[Qubit; 2]) -> Result<[f64; 2]> {
        self.check_qubit(q)?;
        let mask = 1usize << q;
        let low = mask - 1;
        let mut p = [0.0; 2];
        for j in 0..self.dim() / 2 {
            let i0 = ((j & !low) << 1) | (j & low);
            let (a0, a1) = (self.amps[i0], self.amps[i0 | mask]);
            for (k, ek) in e.iter().enumerate() {
                p[k] += (ek[0].conj() * a0 + ek[1].conj() * a1).norm_sqr();
            }
        }
        let total = p[0] + p[1];
        Ok([p[0] / total, p[1] / total])
    }

    /// Projects qubit `q` onto `e` (keeping the qubit) and renormalises.
    pub fn collapse(&mut self, q: usize, e: Qubit) -> Result<f64> {
        self.check_qubit(q)?;
        let mask = 1usize << q;
        let low = mask - 1;
        let mut p = 0.0;
        for j in 0..self.dim() / 2 {
            let i0 = ((j & !low) << 1) | (j & low);
            let i1 = i0 | mask;
            let c = e[0].conj() * self.amps[i0] + e[1].conj() * self.amps[i1];
            p += c.norm_sqr();
            self.amps[i0] = c * e[0];
            self.amps[i1] = c * e[1];
        }
        if p < 1e-300 {
            return Err(Error::InvalidState(
                "collapse onto zero-probability outcome".into(),
            ));
        }
        self.renormalize();
        Ok(p)
    }
}

fn check_size(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        Err(Error::InvalidState(format!(
            "qubit count {num_qubits} outside 1..={MAX_QUBITS}"
        )))
    } else {
        Ok(())
    }
}

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// `|<a|b>|^2`, insensitive to global phase.
pub fn fidelity_up_to_phase(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}
