use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::state::{c, Qubit, StateVector};
use crate::error::{Error, Result};

/// Single-qubit projective measurement basis. Outcome 0 is the first eigenstate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasurementBasis {
    PauliX,
    PauliY,
    PauliZ,
    /// Eigenstates `cos(a/2)|0> +- e^{i phi} sin(a/2)|1>`.
    Rotated {
        alpha: f64,
        phi: f64,
    },
}

/// `cos(alpha/2)|0> + sign * e^{i phi} sin(alpha/2)|1>`.
pub fn rotated_state(alpha: f64, phi: f64, negative: bool) -> Qubit {
    let s = (alpha / 2.0).sin() * if negative { -1.0 } else { 1.0 };
    [c((alpha / 2.0).cos(), 0.0), C64::from_polar(s, phi)]
}

impl MeasurementBasis {
    /// Equatorial basis `{|+-_{pi/2, phi}>}`.
    pub fn equatorial(phi: f64) -> Self {
        MeasurementBasis::Rotated {
            alpha: FRAC_PI_2,
            phi,
        }
    }

    /// The two eigenstates, outcome 0 first. Rejects non-orthogonal pairs.
    pub fn eigenstates(&self) -> Result<[Qubit; 2]> {
        let h = FRAC_1_SQRT_2;
        Ok(match *self {
            MeasurementBasis::PauliZ => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
            MeasurementBasis::PauliX => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
            MeasurementBasis::PauliY => [[c(h, 0.0), c(0.0, h)], [c(h, 0.0), c(0.0, -h)]],
            MeasurementBasis::Rotated { alpha, phi } => {
                let e0 = rotated_state(alpha, phi, false);
                let e1 = rotated_state(alpha, phi, true);
                let overlap = (e0[0].conj() * e1[0] + e0[1].conj() * e1[1]).norm();
                if overlap > 1e-10 {
                    return Err(Error::DegenerateBasis(overlap));
                }
                [e0, e1]
            }
        })
    }
}

/// Projective measurement driven by a uniform `coin` in `[0, 1)`.
///
/// Returns the outcome bit, the collapsed state (same qubit count) and the
/// probability of the observed outcome.
pub fn measure(
    state: &StateVector,
    qubit: usize,
    basis: MeasurementBasis,
    coin: f64,
) -> Result<(u8, StateVector, f64)> {
    if !(0.0..1.0).contains(&coin) {
        return Err(Error::InvalidCoin(coin));
    }
    let e = basis.eigenstates()?;
    let p = state.outcome_probabilities(qubit, &e)?;
    let outcome = if coin < p[0] || p[1] == 0.0 { 0 } else { 1 };
    let mut post = state.clone();
    post.collapse(qubit, e[outcome as usize])?;
    Ok((outcome, post, p[outcome as usize]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{apply_gate, fidelity_up_to_phase, Gate};
    use std::f64::consts::PI;

    #[test]
    fn rotated_matches_pauli_bases() {
        let rx = MeasurementBasis::equatorial(0.0).eigenstates().unwrap();
        let px = MeasurementBasis::PauliX.eigenstates().unwrap();
        let ry = MeasurementBasis::equatorial(FRAC_PI_2)
            .eigenstates()
            .unwrap();
        let py = MeasurementBasis::PauliY.eigenstates().unwrap();
        for k in 0..2 {
            for i in 0..2 {
                assert!((rx[k][i] - px[k][i]).norm() < 1e-12);
                assert!((ry[k][i] - py[k][i]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn non_equatorial_rotated_basis_is_rejected() {
        let b = MeasurementBasis::Rotated {
            alpha: 1.0,
            phi: 0.0,
        };
        assert!(matches!(b.eigenstates(), Err(Error::DegenerateBasis(_))));
    }

    #[test]
    fn plus_in_x_is_deterministic() {
        let plus = apply_gate(&StateVector::zero(1).unwrap(), &Gate::H, &[0]).unwrap();
        for coin in [0.0, 0.5, 0.999] {
            let (o, post, p) = measure(&plus, 0, MeasurementBasis::PauliX, coin).unwrap();
            assert_eq!(o, 0);
            assert!((p - 1.0).abs() < 1e-12);
            assert!((fidelity_up_to_phase(&post, &plus).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_in_x_is_uniform() {
        let z = StateVector::zero(1).unwrap();
        let (o0, _, p0) = measure(&z, 0, MeasurementBasis::PauliX, 0.2).unwrap();
        let (o1, _, p1) = measure(&z, 0, MeasurementBasis::PauliX, 0.7).unwrap();
        assert_eq!((o0, o1), (0, 1));
        assert!((p0 - 0.5).abs() < 1e-12 && (p1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn tilted_state_in_z() {
        // |+_{pi/3, pi/2}>: amplitude-squared oracle cos^2(pi/6) = 0.75.
        let gamma = PI / 3.0;
        let s =
            StateVector::from_amplitudes(rotated_state(gamma, FRAC_PI_2, false).to_vec()).unwrap();
        let expected = (gamma / 2.0).cos().powi(2);
        assert!((expected - 0.75).abs() < 1e-12);
        let (o, _, p) = measure(&s, 0, MeasurementBasis::PauliZ, 0.1).unwrap();
        assert_eq!(o, 0);
        assert!((p - 0.75).abs() < 1e-12);
    }

    #[test]
    fn coin_out_of_range() {
        let z = StateVector::zero(1).unwrap();
        assert!(matches!(
            measure(&z, 0, MeasurementBasis::PauliZ, 1.0),
            Err(Error::InvalidCoin(_))
        ));
    }
}
