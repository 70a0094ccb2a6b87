use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::state::StateVector;
use crate::error::{Error, Result};

/// Density operator on `num_qubits` qubits. Same little-endian ordering as
/// [`StateVector`].
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    entries: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn from_pure(state: &StateVector) -> Self {
        let a = state.amplitudes();
        let n = a.len();
        Self {
            num_qubits: state.num_qubits(),
            entries: DMatrix::from_fn(n, n, |i, j| a[i] * a[j].conj()),
        }
    }

    /// Wraps a matrix after checking Hermiticity, unit trace and positivity.
    pub fn from_matrix(entries: DMatrix<C64>) -> Result<Self> {
        let n = entries.nrows();
        if n != entries.ncols() || n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidState(format!(
                "density matrix must be square with power-of-two size, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let rho = Self {
            num_qubits: n.trailing_zeros() as usize,
            entries,
        };
        rho.validate()?;
        Ok(rho)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn trace(&self) -> C64 {
        self.entries.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.entries - self.entries.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.entries)
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > 1e-10 {
            return Err(Error::InvalidState(format!("not Hermitian ({herm:.3e})")));
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let min = self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -1e-9 {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    /// `sum_i w_i rho_i` for weights that sum to one.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let n = first.1.entries.nrows();
        let mut acc = DMatrix::<C64>::zeros(n, n);
        for (w, rho) in parts {
            if rho.entries.nrows() != n {
                return Err(Error::DimensionMismatch(first.1.num_qubits, rho.num_qubits));
            }
            acc += &rho.entries * C64::new(*w, 0.0);
        }
        Ok(Self {
            num_qubits: first.1.num_qubits,
            entries: acc,
        })
    }
}

/// Real eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    // Symmetrise to kill rounding asymmetry before the Hermitian solver.
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    sym.symmetric_eigen().eigenvalues.iter().copied().collect()
}

/// Reduced density matrix on `keep`; `keep[0]` becomes qubit 0 of the result.
pub fn partial_trace(state: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    let n = state.num_qubits();
    if keep.is_empty() {
        return Err(Error::InvalidState("keep set is empty".into()));
    }
    for (i, &q) in keep.iter().enumerate() {
        state.check_qubit(q)?;
        if keep[..i].contains(&q) {
            return Err(Error::DuplicateTargets);
        }
    }
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let k = keep.len();
    let dk = 1usize << k;
    let amps = state.amplitudes();
    let full_index = |kept: usize, rest: usize| -> usize {
        let mut idx = 0;
        for (b, &q) in keep.iter().enumerate() {
            idx |= ((kept >> b) & 1) << q;
        }
        for (b, &q) in traced.iter().enumerate() {
            idx |= ((rest >> b) & 1) << q;
        }
        idx
    };
    let mut rho = DMatrix::<C64>::zeros(dk, dk);
    for rest in 0..1usize << traced.len() {
        let col: Vec<C64> = (0..dk).map(|i| amps[full_index(i, rest)]).collect();
        for i in 0..dk {
            if col[i] == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..dk {
                rho[(i, j)] += col[i] * col[j].conj();
            }
        }
    }
    Ok(DensityMatrix {
        num_qubits: k,
        entries: rho,
    })
}

/// Trace distance `1/2 ||rho - sigma||_1`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.num_qubits != sigma.num_qubits {
        return Err(Error::DimensionMismatch(rho.num_qubits, sigma.num_qubits));
    }
    let diff = &rho.entries - &sigma.entries;
    Ok(0.5
        * hermitian_eigenvalues(&diff)
            .iter()
            .map(|x| x.abs())
            .sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{apply_gate, Gate};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn product_state_trace() {
        // |0>_q0 (x) |1>_q1 -> index 2.
        let s = StateVector::basis(2, 2).unwrap();
        let r0 = partial_trace(&s, &[0]).unwrap();
        assert!((r0.entries()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
        assert!(r0.entries()[(1, 1)].norm() < 1e-12);
        let r1 = partial_trace(&s, &[1]).unwrap();
        assert!((r1.entries()[(1, 1)] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let bell = StateVector::from_amplitudes(vec![
            c(FRAC_1_SQRT_2, 0.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            c(FRAC_1_SQRT_2, 0.0),
        ])
        .unwrap();
        let r = partial_trace(&bell, &[0]).unwrap();
        let half = DensityMatrix::from_matrix(DMatrix::identity(2, 2) * c(0.5, 0.0)).unwrap();
        assert!(trace_distance(&r, &half).unwrap() < 1e-12);
    }

    #[test]
    fn entangler_marginal_matches_matrix_oracle() {
        // Qubit 0 = ancilla in |+>, qubit 1 = register in |0>.
        let mut s = StateVector::zero(2).unwrap();
        s = apply_gate(&s, &Gate::H, &[0]).unwrap();
        s = apply_gate(&s, &Gate::EntanglerHHCZ, &[0, 1]).unwrap();
        let r = partial_trace(&s, &[1]).unwrap();
        // Oracle: CZ|+,0> = |+,0>, so (H(x)H) gives |0>|+>; register is |+><+|.
        for i in 0..2 {
            for j in 0..2 {
                assert!((r.entries()[(i, j)] - c(0.5, 0.0)).norm() < 1e-12);
            }
        }
        r.validate().unwrap();
    }

    #[test]
    fn partial_trace_errors() {
        let s = StateVector::zero(2).unwrap();
        assert!(partial_trace(&s, &[]).is_err());
        assert!(matches!(
            partial_trace(&s, &[2]),
            Err(Error::QubitOutOfRange { .. })
        ));
        assert!(matches!(
            partial_trace(&s, &[0, 0]),
            Err(Error::DuplicateTargets)
        ));
    }

    #[test]
    fn keep_order_controls_output_ordering() {
        let s = StateVector::basis(2, 1).unwrap(); // q0=1, q1=0
        let r = partial_trace(&s, &[1, 0]).unwrap();
        // new qubit 0 = old q1 = 0, new qubit 1 = old q0 = 1 -> index 2
        assert!((r.entries()[(2, 2)] - c(1.0, 0.0)).norm() < 1e-12);
    }
}
