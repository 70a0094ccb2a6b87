use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::octant::Octant;
use crate::error::{Error, Result};
use crate::qsim::{mat_rx, mat_rz, mul2, Mat2};

/// `e^{i alpha} RZ(beta) RX(gamma_e) RZ(delta_e)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerAngles {
    pub alpha: f64,
    pub beta: f64,
    pub gamma_e: f64,
    pub delta_e: f64,
}

const DEGENERATE: f64 = 1e-12;

fn wrap(t: f64) -> f64 {
    let r = t.rem_euclid(TAU);
    // rem_euclid can return TAU itself for tiny negative inputs.
    if r >= TAU - 1e-15 {
        0.0
    } else {
        r
    }
}

impl EulerAngles {
    pub fn reconstruct(&self) -> Mat2 {
        let m = mul2(
            &mul2(&mat_rz(self.beta), &mat_rx(self.gamma_e)),
            &mat_rz(self.delta_e),
        );
        let ph = C64::from_polar(1.0, self.alpha);
        m.map(|row| row.map(|v| v * ph))
    }

    /// The three rotation angles as octants `[beta, gamma_e, delta_e]`.
    pub fn octants(&self, tol: f64) -> Result<[Octant; 3]> {
        Ok([
            Octant::from_radians(self.beta, tol)?,
            Octant::from_radians(self.gamma_e, tol)?,
            Octant::from_radians(self.delta_e, tol)?,
        ])
    }
}

pub(crate) fn unitarity_error(u: &Mat2) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let v: C64 = (0..2).map(|k| u[k][i].conj() * u[k][j]).sum();
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((v - target).norm());
        }
    }
    worst
}

/// ZXZ decomposition of a single-qubit unitary.
///
/// Writing `c = cos(gamma/2)` and `s = sin(gamma/2)`, the product expands to
/// `u00 = e^{ia} c`, `u01 = -i s e^{i(a+d)}`, `u10 = -i s e^{i(a+b)}` and
/// `u11 = c e^{i(a+b+d)}`, which is inverted entrywise. When `gamma` is 0 or
/// `pi`, `beta` carries the whole Z rotation and `delta_e = 0`.
pub fn decompose_unitary(u: &Mat2) -> Result<EulerAngles> {
    let err = unitarity_error(u);
    if err > 1e-10 {
        return Err(Error::NotUnitary(err));
    }
    let c = u[0][0].norm();
    let s = u[1][0].norm();
    let gamma = 2.0 * s.atan2(c);
    let (alpha, beta, delta) = if s < DEGENERATE {
        let a = u[0][0].arg();
        (a, u[1][1].arg() - a, 0.0)
    } else if c < DEGENERATE {
        let a = u[0][1].arg() + FRAC_PI_2;
        (a, u[1][0].arg() - a + FRAC_PI_2, 0.0)
    } else {
        let a = u[0][0].arg();
        (
            a,
            u[1][0].arg() - a + FRAC_PI_2,
            u[0][1].arg() - a + FRAC_PI_2,
        )
    };
    Ok(EulerAngles {
        alpha: wrap(alpha),
        beta: wrap(beta),
        gamma_e: wrap(gamma),
        delta_e: wrap(delta),
    })
}
