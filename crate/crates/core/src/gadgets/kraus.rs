use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::octant::Octant;
use crate::error::{Error, Result};
use crate::qsim::{rotated_state, Gate, Mat2, MeasurementBasis, Qubit};

/// Which form of the fixed coupling is used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntanglerVariant {
    /// `(H (x) H) CZ`
    HHCZ,
    /// `CZ (H (x) H)`
    CZHH,
}

/// The ancilla-register coupling; targets are `[ancilla, register]`.
pub fn entangling_operator(variant: EntanglerVariant) -> Gate {
    match variant {
        EntanglerVariant::HHCZ => Gate::EntanglerHHCZ,
        EntanglerVariant::CZHH => Gate::EntanglerCZHH,
    }
}

/// Ancilla state `|+-_{gamma, phase}>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AncillaPrep {
    pub gamma: f64,
    pub phase: f64,
    /// Selects `|->` instead of `|+>`.
    pub negative: bool,
}

impl AncillaPrep {
    pub fn new(gamma: f64, phase: f64, negative: bool) -> Result<Self> {
        for t in [gamma, phase] {
            if !(0.0..TAU).contains(&t) {
                return Err(Error::InvalidState(format!(
                    "ancilla angle {t} outside [0, 2pi)"
                )));
            }
        }
        Ok(Self {
            gamma,
            phase,
            negative,
        })
    }

    /// The protocol family `|+-_{k pi/4, pi/2}>`.
    pub fn octant(gamma: Octant, negative: bool) -> Self {
        Self {
            gamma: gamma.radians(),
            phase: FRAC_PI_2,
            negative,
        }
    }

    pub fn state(&self) -> Qubit {
        rotated_state(self.gamma, self.phase, self.negative)
    }
}

/// Back-action operators of one ancilla measurement on the register.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrausPair {
    /// Outcome 0.
    pub k_plus: Mat2,
    /// Outcome 1.
    pub k_minus: Mat2,
}

impl KrausPair {
    /// Largest entry of `|K+^dag K+ + K-^dag K- - I|`.
    pub fn completeness_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut v = C64::new(0.0, 0.0);
                for k in [&self.k_plus, &self.k_minus] {
                    v += (0..2).map(|r| k[r][i].conj() * k[r][j]).sum::<C64>();
                }
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v - target).norm());
            }
        }
        worst
    }

    pub fn get(&self, outcome: u8) -> &Mat2 {
        if outcome == 0 {
            &self.k_plus
        } else {
            &self.k_minus
        }
    }
}

/// `K_m = <m|_A E |prep>_A`, contracted over the ancilla.
pub fn kraus_backaction(
    prep: &AncillaPrep,
    meas: MeasurementBasis,
    variant: EntanglerVariant,
) -> Result<KrausPair> {
    let e = entangling_operator(variant).mat4().expect("two-qubit gate");
    let a = prep.state();
    let basis = meas.eigenstates()?;
    let mut ks = [[[C64::new(0.0, 0.0); 2]; 2]; 2];
    for (m, bra) in basis.iter().enumerate() {
        for r_out in 0..2 {
            for r_in in 0..2 {
                // Matrix index is 2*ancilla + register.
                let mut v = C64::new(0.0, 0.0);
                for a_out in 0..2 {
                    for (a_in, amp) in a.iter().enumerate() {
                        v += bra[a_out].conj() * e[2 * a_out + r_out][2 * a_in + r_in] * amp;
                    }
                }
                ks[m][r_out][r_in] = v;
            }
        }
    }
    Ok(KrausPair {
        k_plus: ks[0],
        k_minus: ks[1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{mat_h, mat_rz, mul2};
    use std::f64::consts::FRAC_1_SQRT_2;

    /// Residual of `A` after removing its least-squares multiple of `B`.
    fn proportional(a: &Mat2, b: &Mat2) -> f64 {
        let mut inner = C64::new(0.0, 0.0);
        let mut nb = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                inner += b[i][j].conj() * a[i][j];
                nb += b[i][j].norm_sqr();
            }
        }
        let scale = inner / nb;
        let mut res: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                res = res.max((a[i][j] - scale * b[i][j]).norm());
            }
        }
        res
    }

    #[test]
    fn completeness_for_all_combinations() {
        for g in Octant::all() {
            for basis in [
                MeasurementBasis::PauliX,
                MeasurementBasis::PauliZ,
                MeasurementBasis::equatorial(g.radians()),
            ] {
                for v in [EntanglerVariant::HHCZ, EntanglerVariant::CZHH] {
                    let k = kraus_backaction(&AncillaPrep::octant(g, false), basis, v).unwrap();
                    assert!(k.completeness_error() < 1e-10, "{g} {basis:?} {v:?}");
                }
            }
        }
    }

    #[test]
    fn plus_ancilla_x_measurement() {
        let prep = AncillaPrep::new(FRAC_PI_2, 0.0, false).unwrap();
        let k = kraus_backaction(&prep, MeasurementBasis::PauliX, EntanglerVariant::HHCZ).unwrap();
        assert!(k.completeness_error() < 1e-10);
        // Outcome 0 leaves H / sqrt(2) on the register.
        let h = mat_h().map(|r| r.map(|v| v * FRAC_1_SQRT_2));
        assert!(proportional(&k.k_plus, &h) < 1e-12);
    }

    #[test]
    fn y_ancilla_z_measurement_is_h_rz_minus_half_pi() {
        let prep = AncillaPrep::octant(Octant::new(2).unwrap(), false);
        let k = kraus_backaction(&prep, MeasurementBasis::PauliZ, EntanglerVariant::HHCZ).unwrap();
        let target = mul2(&mat_h(), &mat_rz(-FRAC_PI_2));
        assert!(proportional(&k.k_plus, &target) < 1e-9);
    }

    #[test]
    fn negative_sign_conjugates_off_diagonal_phase() {
        let g = 1.1;
        let plus = AncillaPrep::new(g, FRAC_PI_2, false).unwrap();
        let minus = AncillaPrep::new(g, FRAC_PI_2, true).unwrap();
        let kp = kraus_backaction(&plus, MeasurementBasis::PauliZ, EntanglerVariant::HHCZ).unwrap();
        let km =
            kraus_backaction(&minus, MeasurementBasis::PauliZ, EntanglerVariant::HHCZ).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!((kp.k_plus[i][j].norm() - km.k_plus[i][j].norm()).abs() < 1e-12);
            }
        }
        // Outcome 0 realises H RZ(-g) for |+> and H RZ(+g) for |->.
        assert!(proportional(&kp.k_plus, &mul2(&mat_h(), &mat_rz(-g))) < 1e-9);
        assert!(proportional(&km.k_plus, &mul2(&mat_h(), &mat_rz(g))) < 1e-9);
    }

    #[test]
    fn zero_ancilla_gives_plain_hadamard() {
        let prep = AncillaPrep::new(0.0, 0.0, false).unwrap();
        for basis in [MeasurementBasis::PauliZ, MeasurementBasis::PauliX] {
            let k = kraus_backaction(&prep, basis, EntanglerVariant::HHCZ).unwrap();
            for m in [0u8, 1] {
                let km = k.get(m);
                let norm: f64 = km.iter().flatten().map(|v| v.norm_sqr()).sum();
                if norm > 1e-12 {
                    assert!(proportional(km, &mat_h()) < 1e-9);
                }
            }
        }
    }

    #[test]
    fn invalid_prep_angles() {
        assert!(AncillaPrep::new(7.0, 0.0, false).is_err());
        assert!(AncillaPrep::new(0.0, -0.1, false).is_err());
    }
}
