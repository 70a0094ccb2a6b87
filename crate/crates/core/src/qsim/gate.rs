use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::state::{c, Mat2, Mat4, StateVector};
use crate::error::{Error, Result};

/// Gates understood by the simulator.
///
/// Rotation conventions follow the diagonal form `RZ(t) = diag(1, e^{it})`,
/// `RX(t) = [[cos t/2, -i sin t/2], [-i sin t/2, cos t/2]]` and
/// `HRZ(t) = H * RZ(t)`. Two-qubit matrices are indexed `2*bit(t0) + bit(t1)`
/// for targets `[t0, t1]`; the entanglers take `[ancilla, register]`.
#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    X,
    Y,
    Z,
    H,
    CZ,
    RZ(f64),
    RX(f64),
    HRZ(f64),
    /// `(H (x) H) * CZ`
    EntanglerHHCZ,
    /// `CZ * (H (x) H)`
    EntanglerCZHH,
    Custom1(Mat2),
    Custom2(Mat4),
}

pub(crate) const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub(crate) const ONE: C64 = C64 { re: 1.0, im: 0.0 };

pub fn mat_h() -> Mat2 {
    let h = c(FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

pub fn mat_rz(theta: f64) -> Mat2 {
    [[ONE, ZERO], [ZERO, C64::from_polar(1.0, theta)]]
}

pub fn mat_rx(theta: f64) -> Mat2 {
    let (s, co) = (theta / 2.0).sin_cos();
    [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
}

pub fn mat_x() -> Mat2 {
    [[ZERO, ONE], [ONE, ZERO]]
}

pub fn mat_y() -> Mat2 {
    [[ZERO, c(0.0, -1.0)], [c(0.0, 1.0), ZERO]]
}

pub fn mat_z() -> Mat2 {
    [[ONE, ZERO], [ZERO, -ONE]]
}

pub fn mat_identity2() -> Mat2 {
    [[ONE, ZERO], [ZERO, ONE]]
}

pub fn mul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn mul4(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn dagger2(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

/// `a (x) b` with `a` as the first (most significant) factor.
pub fn kron2(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = [[ZERO; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[i / 2][j / 2] * b[i % 2][j % 2];
        }
    }
    out
}

fn mat_cz() -> Mat4 {
    let mut m = [[ZERO; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = if i == 3 { -ONE } else { ONE };
    }
    m
}

impl Gate {
    pub fn arity(&self) -> usize {
        match self {
            Gate::CZ | Gate::EntanglerHHCZ | Gate::EntanglerCZHH | Gate::Custom2(_) => 2,
            _ => 1,
        }
    }

    /// The single-qubit matrix, if this is a one-qubit gate.
    pub fn mat2(&self) -> Option<Mat2> {
        Some(match self {
            Gate::X => mat_x(),
            Gate::Y => mat_y(),
            Gate::Z => mat_z(),
            Gate::H => mat_h(),
            Gate::RZ(t) => mat_rz(*t),
            Gate::RX(t) => mat_rx(*t),
            Gate::HRZ(t) => mul2(&mat_h(), &mat_rz(*t)),
            Gate::Custom1(m) => *m,
            _ => return None,
        })
    }

    /// The two-qubit matrix, if this is a two-qubit gate.
    pub fn mat4(&self) -> Option<Mat4> {
        let hh = kron2(&mat_h(), &mat_h());
        Some(match self {
            Gate::CZ => mat_cz(),
            Gate::EntanglerHHCZ => mul4(&hh, &mat_cz()),
            Gate::EntanglerCZHH => mul4(&mat_cz(), &hh),
            Gate::Custom2(m) => *m,
            _ => return None,
        })
    }

    /// Dense matrix form.
    pub fn matrix(&self) -> DMatrix<C64> {
        if let Some(m) = self.mat2() {
            DMatrix::from_fn(2, 2, |i, j| m[i][j])
        } else {
            let m = self.mat4().expect("two-qubit gate");
            DMatrix::from_fn(4, 4, |i, j| m[i][j])
        }
    }

    /// Largest entry of `|U^dagger U - I|`.
    pub fn unitarity_error(&self) -> f64 {
        let m = self.matrix();
        let prod = m.adjoint() * &m;
        let id = DMatrix::<C64>::identity(m.nrows(), m.ncols());
        (prod - id).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Applies `gate` to `targets` in place.
pub fn apply_gate_mut(state: &mut StateVector, gate: &Gate, targets: &[usize]) -> Result<()> {
    if targets.len() != gate.arity() {
        return Err(Error::ArityMismatch {
            expected: gate.arity(),
            got: targets.len(),
        });
    }
    match (gate, targets) {
        (Gate::CZ, [a, b]) => state.apply_cz(*a, *b),
        (Gate::RZ(t), [q]) => state.apply_phase(C64::from_polar(1.0, *t), *q),
        (Gate::Z, [q]) => state.apply_phase(-ONE, *q),
        (g, [q]) => state.apply_mat2(&g.mat2().expect("one-qubit gate"), *q),
        (g, [a, b]) => state.apply_mat4(&g.mat4().expect("two-qubit gate"), *a, *b),
        _ => unreachable!("arity checked above"),
    }
}

/// Returns `U|psi>` for `gate` on `targets`.
pub fn apply_gate(state: &StateVector, gate: &Gate, targets: &[usize]) -> Result<StateVector> {
    let mut out = state.clone();
    apply_gate_mut(&mut out, gate, targets)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::fidelity_up_to_phase;
    use std::f64::consts::PI;

    #[test]
    fn every_gate_is_unitary() {
        let gates = [
            Gate::X,
            Gate::Y,
            Gate::Z,
            Gate::H,
            Gate::CZ,
            Gate::RZ(0.3),
            Gate::RX(1.7),
            Gate::HRZ(-2.2),
            Gate::EntanglerHHCZ,
            Gate::EntanglerCZHH,
        ];
        for g in gates {
            assert!(g.unitarity_error() < 1e-10, "{g:?}");
        }
    }

    #[test]
    fn x_flips_zero() {
        let s = apply_gate(&StateVector::zero(1).unwrap(), &Gate::X, &[0]).unwrap();
        assert_eq!(s, StateVector::basis(1, 1).unwrap());
    }

    #[test]
    fn rz_pi_maps_plus_to_minus() {
        let plus = apply_gate(&StateVector::zero(1).unwrap(), &Gate::H, &[0]).unwrap();
        let out = apply_gate(&plus, &Gate::RZ(PI), &[0]).unwrap();
        let minus = StateVector::normalized(vec![c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert!((out.inner(&minus).unwrap() - ONE).norm() < 1e-12);
    }

    #[test]
    fn arity_and_range_errors() {
        let s = StateVector::zero(2).unwrap();
        assert!(matches!(
            apply_gate(&s, &Gate::CZ, &[0]),
            Err(Error::ArityMismatch {
                expected: 2,
                got: 1
            })
        ));
        assert!(matches!(
            apply_gate(&s, &Gate::H, &[5]),
            Err(Error::QubitOutOfRange { .. })
        ));
        assert!(matches!(
            apply_gate(&s, &Gate::CZ, &[1, 1]),
            Err(Error::DuplicateTargets)
        ));
    }

    #[test]
    fn entangler_on_plus_plus_is_maximally_entangled() {
        let mut s = StateVector::zero(2).unwrap();
        apply_gate_mut(&mut s, &Gate::H, &[0]).unwrap();
        apply_gate_mut(&mut s, &Gate::H, &[1]).unwrap();
        apply_gate_mut(&mut s, &Gate::EntanglerHHCZ, &[0, 1]).unwrap();
        // Oracle: explicit 4x4 product (H(x)H) CZ |++>.
        let plus = [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)];
        let mut v = [ZERO; 4];
        for i in 0..4 {
            v[i] = plus[i / 2] * plus[i % 2];
        }
        v[3] = -v[3];
        let hh = kron2(&mat_h(), &mat_h());
        let expect: Vec<C64> = (0..4)
            .map(|i| (0..4).map(|k| hh[i][k] * v[k]).sum())
            .collect();
        // StateVector index is little endian: index = bit0 + 2 bit1, matrix row = 2 bit(t0) + bit(t1)
        // with t0 = qubit 0, so swap the middle entries.
        let expect =
            StateVector::from_amplitudes(vec![expect[0], expect[2], expect[1], expect[3]]).unwrap();
        assert!((fidelity_up_to_phase(&s, &expect).unwrap() - 1.0).abs() < 1e-12);
        // Schmidt coefficients: singular values of the 2x2 amplitude matrix.
        let a = s.amplitudes();
        let m = nalgebra::Matrix2::new(a[0], a[2], a[1], a[3]);
        let sv = m.svd(false, false).singular_values;
        for x in sv.iter() {
            assert!((x - FRAC_1_SQRT_2).abs() < 1e-12);
        }
    }

    #[test]
    fn entangler_on_one_one() {
        let s = apply_gate(
            &StateVector::basis(2, 3).unwrap(),
            &Gate::EntanglerHHCZ,
            &[0, 1],
        )
        .unwrap();
        let minus = [c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)];
        let mm = StateVector::product(&[minus, minus]).unwrap();
        // -|-->
        assert!((s.inner(&mm).unwrap() + ONE).norm() < 1e-12);
        let e = Gate::EntanglerHHCZ.matrix();
        let prod = e.adjoint() * &e;
        assert!((prod - DMatrix::<C64>::identity(4, 4)).norm() < 1e-12);
    }
}
