use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::octant::Octant;
use super::wiring::{pauli_letter, MeasureKind, PrepKind, Wiring};
use crate::error::{Error, Result};
use crate::protocols::{ClientCapability, World};
use crate::qsim::{
    apply_gate, apply_gate_mut, enumerate_choices, fidelity_up_to_phase, Gate, StateVector,
    BRANCH_BUDGET,
};

const MATCH_TOL: f64 = 1e-9;

/// Bounds of the wiring search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TemplateSpace {
    pub max_couplings: usize,
    /// Allow trailing Hadamard cancellation on register slots.
    pub hcancel: bool,
    /// Random inputs each candidate is checked against.
    pub inputs: usize,
    pub seed: u64,
}

impl Default for TemplateSpace {
    fn default() -> Self {
        Self {
            max_couplings: 3,
            hcancel: true,
            inputs: 3,
            seed: 0x5eed,
        }
    }
}

fn preps() -> Vec<PrepKind> {
    let mut v = vec![PrepKind::Zero];
    v.extend((1..8).map(|k| PrepKind::Gamma(Octant::new(k).expect("octant"))));
    v.push(PrepKind::Plus);
    v
}

fn measures() -> Vec<MeasureKind> {
    let mut v = vec![MeasureKind::Discard, MeasureKind::X, MeasureKind::Z];
    v.extend((0..8).map(|k| MeasureKind::Rotated(Octant::new(k).expect("octant"))));
    v
}

/// All sequences of `len` slots from `0..arity`, lexicographic.
fn sequences(len: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..arity).map(move |s| {
                    let mut q = p.clone();
                    q.push(s);
                    q
                })
            })
            .collect();
    }
    out
}

/// Subsets of `0..arity` ordered by bitmask.
fn subsets(arity: usize) -> Vec<Vec<usize>> {
    (0..1usize << arity)
        .map(|m| (0..arity).filter(|b| m >> b & 1 == 1).collect())
        .collect()
}

/// Applies the Pauli encoded by `mask` (x bits low, z bits high) to `state`.
fn apply_pauli(state: &StateVector, n: usize, mask: usize) -> Result<StateVector> {
    let mut s = state.clone();
    for q in 0..n {
        if mask >> (n + q) & 1 == 1 {
            apply_gate_mut(&mut s, &Gate::Z, &[q])?;
        }
        if mask >> q & 1 == 1 {
            apply_gate_mut(&mut s, &Gate::X, &[q])?;
        }
    }
    Ok(s)
}

fn mask_string(mask: usize, n: usize) -> String {
    (0..n)
        .map(|q| pauli_letter(mask >> q & 1 == 1, mask >> (n + q) & 1 == 1))
        .collect()
}

/// Per-outcome Pauli masks making `wiring` act as `target`, or `None`.
///
/// Every nonzero-probability branch with outcome `m` must equal
/// `P_m target |psi>` up to phase, with the same `P_m` for all inputs.
fn corrections_for(
    wiring: &Wiring,
    target: &Gate,
    inputs: &[StateVector],
) -> Result<Option<Vec<String>>> {
    let n = target.arity();
    let outcomes = wiring.measure.outcomes();
    let mut chosen: Vec<Option<usize>> = vec![None; outcomes];
    for psi in inputs {
        let ideal = apply_gate(psi, target, &(0..n).collect::<Vec<_>>())?;
        let leaves = enumerate_choices(BRANCH_BUDGET, |ch| {
            let (mut world, ids) =
                World::with_register(ClientCapability::PrepareOnly, false, psi.clone())?;
            let m = wiring.run(&mut world, &ids, ch)?;
            Ok((m, world.state_of(&ids)?))
        })?;
        for leaf in leaves {
            if leaf.probability < 1e-12 {
                continue;
            }
            let (m, state) = leaf.value;
            let m = m as usize;
            let candidates: Vec<usize> = match chosen[m] {
                Some(p) => vec![p],
                None => (0..1usize << (2 * n)).collect(),
            };
            let mut hit = None;
            for mask in candidates {
                let expect = apply_pauli(&ideal, n, mask)?;
                if fidelity_up_to_phase(&state, &expect)? >= 1.0 - MATCH_TOL {
                    hit = Some(mask);
                    break;
                }
            }
            match hit {
                Some(mask) => chosen[m] = Some(mask),
                None => return Ok(None),
            }
        }
    }
    Ok(Some(
        chosen
            .into_iter()
            .map(|c| mask_string(c.unwrap_or(0), n))
            .collect(),
    ))
}

/// Checks `wiring` against `target` on `inputs` random states and returns
/// whether its recorded corrections are right.
pub fn verify_wiring(wiring: &Wiring, target: &Gate, inputs: usize, seed: u64) -> Result<bool> {
    let states = random_inputs(target.arity(), inputs, seed)?;
    Ok(corrections_for(wiring, target, &states)?.as_deref() == Some(&wiring.corrections[..]))
}

fn random_inputs(n: usize, count: usize, seed: u64) -> Result<Vec<StateVector>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| StateVector::random(n, &mut rng))
        .collect()
}

/// First wiring in `space` that realises `target` up to Pauli corrections.
///
/// Candidates are ordered by coupling count, then preparation
/// (`|0>`, tilted octants 1..7, `|+>`), coupling sequence, measurement and
/// cancellation subset.
pub fn synthesize_gadget(target: &Gate, space: &TemplateSpace) -> Result<Wiring> {
    let n = target.arity();
    if !matches!(
        target,
        Gate::H | Gate::HRZ(_) | Gate::CZ | Gate::RZ(_) | Gate::X | Gate::Z
    ) {
        return Err(Error::UnsupportedGate(format!("{target:?}")));
    }
    let inputs = random_inputs(n, space.inputs, space.seed)?;
    let cancels = if space.hcancel {
        subsets(n)
    } else {
        vec![Vec::new()]
    };
    for len in 1..=space.max_couplings {
        for prep in preps() {
            for couplings in sequences(len, n) {
                for measure in measures() {
                    for hcancel in &cancels {
                        let mut w = Wiring {
                            prep,
                            couplings: couplings.clone(),
                            measure,
                            hcancel: hcancel.clone(),
                            corrections: Vec::new(),
                        };
                        if w.arity() != n {
                            continue;
                        }
                        if let Some(c) = corrections_for(&w, target, &inputs)? {
                            w.corrections = c;
                            return Ok(w);
                        }
                    }
                }
            }
        }
    }
    Err(Error::SearchExhausted)
}
