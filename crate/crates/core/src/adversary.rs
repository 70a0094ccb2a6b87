//! Attack models and escape-probability analysis.

use std::f64::consts::FRAC_PI_4;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocols::{
    draw_pauli_positions, run_protocol, AdversaryConfig, ProtocolConfig, ProtocolKind,
};
use crate::qsim::{apply_gate_mut, Gate, StateVector};

/// Summary of a detection experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscapeAnalysis {
    /// Attack description, `"none"` for an honest server.
    pub attack: String,
    /// Exact escape probability where a closed form applies.
    pub exact: Option<f64>,
    /// Analytic upper bound where one applies.
    pub bound: Option<f64>,
    /// Fraction of trials accepted despite the attack.
    pub empirical: f64,
    pub trials: usize,
    /// Binomial standard error of `empirical` around `exact` (or itself).
    pub sigma: f64,
}

impl EscapeAnalysis {
    /// `|empirical - exact| <= k sigma`; true when there is no exact value.
    pub fn within(&self, k: f64) -> bool {
        match self.exact {
            Some(p) => (self.empirical - p).abs() <= k * self.sigma.max(1e-12),
            None => true,
        }
    }

    /// Whether the exact value respects the bound.
    pub fn bound_holds(&self) -> bool {
        match (self.exact, self.bound) {
            (Some(p), Some(b)) => p <= b + 1e-12,
            _ => true,
        }
    }
}

/// Applies `X` to `a`, `Z` to `b` and `XZ` to `c` uniformly chosen distinct qubits.
pub fn apply_random_pauli_attack<R: Rng + ?Sized>(
    state: &StateVector,
    a: usize,
    b: usize,
    c: usize,
    rng: &mut R,
) -> Result<(StateVector, Vec<(usize, bool, bool)>)> {
    let positions = draw_pauli_positions(state.num_qubits(), a, b, c, rng)?;
    let mut out = state.clone();
    for &(q, x, z) in &positions {
        if z {
            apply_gate_mut(&mut out, &Gate::Z, &[q])?;
        }
        if x {
            apply_gate_mut(&mut out, &Gate::X, &[q])?;
        }
    }
    Ok((out, positions))
}

fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Probability that `a` X, `b` Z and `c` XZ operators on distinct uniformly
/// random positions leave every trap intact.
///
/// `counts` is `(registers, zero_traps, plus_traps)`. X is harmless on plus
/// traps and registers, Z on zero traps and registers, XZ only on registers.
pub fn escape_probability_exact(
    n: usize,
    counts: (usize, usize, usize),
    a: usize,
    b: usize,
    c: usize,
) -> Result<f64> {
    let (r, z0, p) = counts;
    if r + z0 + p != n {
        return Err(Error::InvalidConfig(format!(
            "layout counts {r}+{z0}+{p} do not sum to {n}"
        )));
    }
    if a + b + c > n {
        return Err(Error::InvalidConfig(format!(
            "{} operators on {n} positions",
            a + b + c
        )));
    }
    if c > r {
        return Ok(0.0);
    }
    let mut good = 0.0;
    for i in 0..=a.min(r - c) {
        if a - i > p {
            continue;
        }
        good += binom(r - c, i) * binom(p, a - i) * binom(r - c - i + z0, b);
    }
    good *= binom(r, c);
    // Ordered choice of the three labelled position sets.
    let total = binom(n, a) * binom(n - a, b) * binom(n - a - b, c);
    Ok(good / total)
}

/// `(2/3)^(alpha/3)`.
pub fn escape_bound(alpha: usize) -> f64 {
    (2.0f64 / 3.0).powf(alpha as f64 / 3.0)
}

fn describe(adv: &AdversaryConfig) -> String {
    match adv {
        AdversaryConfig::None => "none".into(),
        AdversaryConfig::RandomPauli { a, b, c } => format!("pauli:{a},{b},{c}"),
        AdversaryConfig::TrapTamper { delta } => format!("tamper:{delta}"),
        AdversaryConfig::EntangledProbe { .. } => "probe".into(),
    }
}

/// Runs `trials` independent protocol executions with the configured attack
/// and reports the accepted fraction next to the exact value and bound.
pub fn simulate_detection(config: &ProtocolConfig, trials: usize) -> Result<EscapeAnalysis> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    config.validate()?;
    let accepted: Vec<bool> = (0..trials as u64)
        .into_par_iter()
        .map(|t| run_protocol(config, t, false).map(|o| o.report.accepted))
        .collect::<Result<_>>()?;
    let empirical = accepted.iter().filter(|&&a| a).count() as f64 / trials as f64;
    let n = config.num_register_qubits;
    let (exact, bound) = match (&config.adversary, config.protocol) {
        (AdversaryConfig::None, _) => (Some(1.0), None),
        (AdversaryConfig::RandomPauli { a, b, c }, ProtocolKind::P1)
            if config.accept_threshold == 0 =>
        {
            let exact = escape_probability_exact(n, (n / 3, n / 3, n / 3), *a, *b, *c)?;
            (Some(exact), Some(escape_bound(a + b + c)))
        }
        (AdversaryConfig::TrapTamper { delta }, _) if config.accept_threshold == 0 => {
            (Some(delta.powi(config.trap_count as i32)), None)
        }
        _ => (None, None),
    };
    let p = exact.unwrap_or(empirical);
    Ok(EscapeAnalysis {
        attack: describe(&config.adversary),
        exact,
        bound,
        empirical,
        trials,
        sigma: (p * (1.0 - p) / trials as f64).sqrt(),
    })
}

/// `|1>` weight of the probe's `A` qubit (qubit 0).
pub fn probe_weight(psi: &StateVector) -> f64 {
    psi.amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| i & 1 == 1)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// Gram matrix of `RZ(k pi/4)` on `A` applied to a three-qubit probe, `k` in `0..8`.
///
/// Basis index is `4 B1 + 2 B2 + A`.
pub fn probe_gram_matrix(psi: &StateVector) -> Result<DMatrix<C64>> {
    if psi.num_qubits() != 3 {
        return Err(Error::DimensionMismatch(psi.num_qubits(), 3));
    }
    if (psi.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidState(format!("probe norm {}", psi.norm())));
    }
    let rotated: Vec<StateVector> = (0..8)
        .map(|k| {
            let mut s = psi.clone();
            apply_gate_mut(&mut s, &Gate::RZ(k as f64 * FRAC_PI_4), &[0])?;
            Ok(s)
        })
        .collect::<Result<_>>()?;
    let mut g = DMatrix::zeros(8, 8);
    for i in 0..8 {
        for j in 0..8 {
            g[(i, j)] = rotated[i].inner(&rotated[j])?;
        }
    }
    Ok(g)
}

/// `(1 - w) + w e^{i (k' - k) pi/4}`.
pub fn probe_gram_closed_form(w: f64, k: usize, k_prime: usize) -> C64 {
    let d = (k_prime as f64 - k as f64) * FRAC_PI_4;
    C64::new(1.0 - w, 0.0) + C64::from_polar(w, d)
}
