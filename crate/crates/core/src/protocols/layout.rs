use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::ProtocolKind;
use super::transcript::WireBasis;
use crate::error::{Error, Result};
use crate::gadgets::PauliFrame;
use crate::qsim::{mat_h, mat_identity2, mat_x, mul2, Mat2};

/// Known state of a trap qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrapKind {
    Zero,
    One,
    Plus,
    Minus,
}

impl TrapKind {
    pub fn basis(self) -> WireBasis {
        match self {
            TrapKind::Zero | TrapKind::One => WireBasis::Z,
            TrapKind::Plus | TrapKind::Minus => WireBasis::X,
        }
    }

    pub fn expected_bit(self) -> u8 {
        match self {
            TrapKind::Zero | TrapKind::Plus => 0,
            TrapKind::One | TrapKind::Minus => 1,
        }
    }

    /// Gate taking `|0>` to the trap state.
    pub fn preparation(self) -> Mat2 {
        match self {
            TrapKind::Zero => mat_identity2(),
            TrapKind::One => mat_x(),
            TrapKind::Plus => mat_h(),
            TrapKind::Minus => mul2(&mat_h(), &mat_x()),
        }
    }
}

/// Hidden placement of computation and trap qubits among the `N` outputs.
///
/// Logical index `k < n_comp` is computation qubit `k`; the rest are traps.
/// `permutation[k]` is the physical position of logical qubit `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrapLayout {
    pub permutation: Vec<usize>,
    /// Trap kind by physical position; `None` for computation positions.
    pub traps: Vec<Option<TrapKind>>,
    /// Output measurement basis by physical position.
    pub bases: Vec<WireBasis>,
}

impl TrapLayout {
    pub fn len(&self) -> usize {
        self.permutation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutation.is_empty()
    }

    pub fn n_comp(&self) -> usize {
        self.traps.iter().filter(|t| t.is_none()).count()
    }

    pub fn position(&self, logical: usize) -> usize {
        self.permutation[logical]
    }

    /// `(zero-type, plus-type)` trap counts; `|1>` counts as zero-type.
    pub fn trap_type_counts(&self) -> (usize, usize) {
        let zero = self
            .traps
            .iter()
            .filter(|t| matches!(t, Some(k) if k.basis() == WireBasis::Z))
            .count();
        let plus = self
            .traps
            .iter()
            .filter(|t| matches!(t, Some(k) if k.basis() == WireBasis::X))
            .count();
        (zero, plus)
    }
}

/// Draws a uniformly random permutation and the trap states.
///
/// P1 uses `N/3` zero and `N/3` plus traps; P2 draws each trap from
/// `{|0>, |1>, |+>, |->}`. Computation outputs get a uniformly random basis.
pub fn place_traps<R: Rng + ?Sized>(
    n: usize,
    trap_count: usize,
    protocol: ProtocolKind,
    rng: &mut R,
) -> Result<TrapLayout> {
    if trap_count >= n {
        return Err(Error::InvalidConfig(format!(
            "{trap_count} traps leave no computation qubit among {n}"
        )));
    }
    let n_comp = n - trap_count;
    let mut logical_traps: Vec<TrapKind> = match protocol {
        ProtocolKind::Sueki => {
            if trap_count != 0 {
                return Err(Error::InvalidConfig(
                    "the Sueki protocol has no traps".into(),
                ));
            }
            Vec::new()
        }
        ProtocolKind::P1 => {
            if !n.is_multiple_of(3) || trap_count != 2 * n / 3 {
                return Err(Error::InvalidConfig(format!(
                    "P1 needs N divisible by 3 and 2N/3 traps, got N = {n}, traps = {trap_count}"
                )));
            }
            let mut v = vec![TrapKind::Zero; n / 3];
            v.extend(vec![TrapKind::Plus; n / 3]);
            v
        }
        ProtocolKind::P2 => {
            if trap_count == 0 {
                return Err(Error::InvalidConfig("P2 needs at least one trap".into()));
            }
            let kinds = [
                TrapKind::Zero,
                TrapKind::One,
                TrapKind::Plus,
                TrapKind::Minus,
            ];
            (0..trap_count)
                .map(|_| kinds[rng.random_range(0..4)])
                .collect()
        }
    };
    let mut permutation: Vec<usize> = (0..n).collect();
    permutation.shuffle(rng);
    let mut traps = vec![None; n];
    for (i, kind) in logical_traps.drain(..).enumerate() {
        traps[permutation[n_comp + i]] = Some(kind);
    }
    let bases = traps
        .iter()
        .map(|t| match t {
            Some(k) => k.basis(),
            None => {
                if rng.random_bool(0.5) {
                    WireBasis::X
                } else {
                    WireBasis::Z
                }
            }
        })
        .collect();
    Ok(TrapLayout {
        permutation,
        traps,
        bases,
    })
}

/// Decoded output of one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodedOutput {
    /// Computation results in logical order.
    pub computation: Vec<u8>,
    /// Per trap position, whether the decoded bit matched.
    pub trap_results: Vec<(usize, bool)>,
}

impl DecodedOutput {
    pub fn trap_errors(&self) -> usize {
        self.trap_results.iter().filter(|(_, ok)| !ok).count()
    }
}

/// Undoes the frame on raw output bits and splits computation from traps.
///
/// An X by-product flips a Z-basis result and a Z by-product flips an
/// X-basis result.
pub fn decode_output(raw: &[u8], frame: &PauliFrame, layout: &TrapLayout) -> Result<DecodedOutput> {
    let n = layout.len();
    for len in [raw.len(), frame.len()] {
        if len != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: len,
            });
        }
    }
    let bits: Vec<u8> = (0..n)
        .map(|j| {
            let flip = match layout.bases[j] {
                WireBasis::Z => frame.x[j],
                _ => frame.z[j],
            };
            raw[j] ^ flip as u8
        })
        .collect();
    let computation = (0..layout.n_comp())
        .map(|k| bits[layout.position(k)])
        .collect();
    let trap_results = (0..n)
        .filter_map(|j| layout.traps[j].map(|t| (j, bits[j] == t.expected_bit())))
        .collect();
    Ok(DecodedOutput {
        computation,
        trap_results,
    })
}
