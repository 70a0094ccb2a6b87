use rand::Rng;

use super::basis::MeasurementBasis;
use super::gate::{apply_gate_mut, Gate};
use super::state::StateVector;
use crate::error::{Error, Result};

/// Largest number of leaves any exhaustive enumeration may produce.
pub const BRANCH_BUDGET: usize = 1 << 16;

/// Weights at or below this are treated as impossible outcomes.
pub const ZERO_WEIGHT: f64 = 1e-12;

/// Source of measurement outcomes and other random branch points.
pub trait Chooser {
    /// Picks an index into `weights`. Weights are non-negative and need not be
    /// normalised; indices with zero weight are never returned.
    fn choose(&mut self, weights: &[f64]) -> Result<usize>;
}

fn pick(weights: &[f64], u: f64) -> Result<usize> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::InvalidState("no outcome has positive weight".into()));
    }
    let target = u * total;
    let mut acc = 0.0;
    let mut last = None;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last = Some(i);
        if target < acc {
            return Ok(i);
        }
    }
    Ok(last.expect("positive total implies a positive weight"))
}

/// Samples outcomes from an RNG.
#[derive(Clone, Debug)]
pub struct RngChooser<R> {
    pub rng: R,
}

impl<R: Rng> RngChooser<R> {
    pub fn new(rng: R) -> Self {
        Self { rng }
    }
}

impl<R: Rng> Chooser for RngChooser<R> {
    fn choose(&mut self, weights: &[f64]) -> Result<usize> {
        let u: f64 = self.rng.random();
        pick(weights, u)
    }
}

/// Consumes an explicit list of uniform coins in `[0, 1)`.
#[derive(Clone, Debug)]
pub struct CoinChooser<'a> {
    coins: &'a [f64],
    used: usize,
}

impl<'a> CoinChooser<'a> {
    pub fn new(coins: &'a [f64]) -> Self {
        Self { coins, used: 0 }
    }

    pub fn used(&self) -> usize {
        self.used
    }
}

impl Chooser for CoinChooser<'_> {
    fn choose(&mut self, weights: &[f64]) -> Result<usize> {
        let coin = *self
            .coins
            .get(self.used)
            .ok_or_else(|| Error::InvalidState("ran out of coins".into()))?;
        if !(0.0..1.0).contains(&coin) {
            return Err(Error::InvalidCoin(coin));
        }
        self.used += 1;
        pick(weights, coin)
    }
}

/// Replays a fixed prefix of choices, then takes the first possible option at
/// every further branch point. Records each decision with its probability.
#[derive(Clone, Debug, Default)]
pub struct ScriptedChooser {
    script: Vec<usize>,
    log: Vec<(usize, Vec<f64>)>,
    probability: f64,
}

impl ScriptedChooser {
    pub fn new(script: Vec<usize>) -> Self {
        Self {
            script,
            log: Vec::new(),
            probability: 1.0,
        }
    }

    /// Product of the normalised weights of all choices taken so far.
    pub fn probability(&self) -> f64 {
        self.probability
    }

    pub fn choices(&self) -> Vec<usize> {
        self.log.iter().map(|(c, _)| *c).collect()
    }

    /// The script for the next leaf in depth-first order, if any.
    fn successor(&self) -> Option<Vec<usize>> {
        for i in (0..self.log.len()).rev() {
            let (taken, weights) = &self.log[i];
            if let Some(j) = (taken + 1..weights.len()).find(|&j| weights[j] > ZERO_WEIGHT) {
                let mut next: Vec<usize> = self.log[..i].iter().map(|(c, _)| *c).collect();
                next.push(j);
                return Some(next);
            }
        }
        None
    }
}

impl Chooser for ScriptedChooser {
    fn choose(&mut self, weights: &[f64]) -> Result<usize> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidState("no outcome has positive weight".into()));
        }
        let norm: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let idx = match self.script.get(self.log.len()) {
            Some(&i) if i < norm.len() => i,
            Some(&i) => {
                return Err(Error::InvalidState(format!(
                    "scripted choice {i} out of range"
                )))
            }
            None => norm
                .iter()
                .position(|&w| w > ZERO_WEIGHT)
                .ok_or_else(|| Error::InvalidState("no outcome has positive weight".into()))?,
        };
        self.probability *= norm[idx];
        self.log.push((idx, norm));
        Ok(idx)
    }
}

/// One leaf of an exhaustive enumeration over a chooser-driven procedure.
#[derive(Clone, Debug)]
pub struct Leaf<T> {
    pub choices: Vec<usize>,
    pub probability: f64,
    pub value: T,
}

/// Runs `f` once per distinct sequence of possible choices, depth first.
pub fn enumerate_choices<T, F>(budget: usize, mut f: F) -> Result<Vec<Leaf<T>>>
where
    F: FnMut(&mut ScriptedChooser) -> Result<T>,
{
    let mut leaves = Vec::new();
    let mut script = Vec::new();
    loop {
        let mut chooser = ScriptedChooser::new(script);
        let value = f(&mut chooser)?;
        leaves.push(Leaf {
            choices: chooser.choices(),
            probability: chooser.probability(),
            value,
        });
        if leaves.len() > budget {
            return Err(Error::BranchBudgetExceeded(budget));
        }
        match chooser.successor() {
            Some(next) => script = next,
            None => return Ok(leaves),
        }
    }
}

/// A step of a static circuit program.
#[derive(Clone, Debug, PartialEq)]
pub enum ProgramStep {
    Gate {
        gate: Gate,
        targets: Vec<usize>,
    },
    /// Projective measurement; the measured qubit stays in the state, collapsed.
    Measure {
        qubit: usize,
        basis: MeasurementBasis,
    },
}

/// A fully resolved measurement history.
#[derive(Clone, Debug)]
pub struct Branch {
    pub outcomes: Vec<u8>,
    pub probability: f64,
    pub final_state: StateVector,
}

/// Depth-first expansion of every nonzero-probability outcome of `program`.
pub fn enumerate_branches(initial: &StateVector, program: &[ProgramStep]) -> Result<Vec<Branch>> {
    let mut out = Vec::new();
    expand(initial.clone(), program, Vec::new(), 1.0, &mut out)?;
    Ok(out)
}

fn expand(
    mut state: StateVector,
    program: &[ProgramStep],
    outcomes: Vec<u8>,
    probability: f64,
    out: &mut Vec<Branch>,
) -> Result<()> {
    for (i, step) in program.iter().enumerate() {
        match step {
            ProgramStep::Gate { gate, targets } => apply_gate_mut(&mut state, gate, targets)?,
            ProgramStep::Measure { qubit, basis } => {
                let e = basis.eigenstates()?;
                let p = state.outcome_probabilities(*qubit, &e)?;
                for (bit, (&pk, ek)) in p.iter().zip(e).enumerate() {
                    if pk <= ZERO_WEIGHT {
                        continue;
                    }
                    let mut post = state.clone();
                    post.collapse(*qubit, ek)?;
                    let mut o = outcomes.clone();
                    o.push(bit as u8);
                    expand(post, &program[i + 1..], o, probability * pk, out)?;
                }
                return Ok(());
            }
        }
    }
    if out.len() >= BRANCH_BUDGET {
        return Err(Error::BranchBudgetExceeded(BRANCH_BUDGET));
    }
    out.push(Branch {
        outcomes,
        probability,
        final_state: state,
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::measure;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mz(q: usize) -> ProgramStep {
        ProgramStep::Measure {
            qubit: q,
            basis: MeasurementBasis::PauliZ,
        }
    }

    fn h(q: usize) -> ProgramStep {
        ProgramStep::Gate {
            gate: Gate::H,
            targets: vec![q],
        }
    }

    #[test]
    fn deterministic_measurement_has_one_branch() {
        let b = enumerate_branches(&StateVector::zero(1).unwrap(), &[mz(0)]).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].outcomes, vec![0]);
        assert!((b[0].probability - 1.0).abs() < 1e-12);
        assert_eq!(b[0].final_state, StateVector::zero(1).unwrap());
    }

    #[test]
    fn plus_splits_evenly() {
        let b = enumerate_branches(&StateVector::zero(1).unwrap(), &[h(0), mz(0)]).unwrap();
        assert_eq!(b.len(), 2);
        for br in &b {
            assert!((br.probability - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn sampling_matches_enumeration() {
        // Three qubits, non-trivial correlations, two measurements.
        let program = vec![
            h(0),
            ProgramStep::Gate {
                gate: Gate::RX(1.1),
                targets: vec![1],
            },
            ProgramStep::Gate {
                gate: Gate::CZ,
                targets: vec![0, 1],
            },
            h(1),
            mz(0),
            ProgramStep::Measure {
                qubit: 1,
                basis: MeasurementBasis::PauliX,
            },
        ];
        let init = StateVector::zero(2).unwrap();
        let branches = enumerate_branches(&init, &program).unwrap();
        let total: f64 = branches.iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < 1e-9);

        let trials = 10_000;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut counts = std::collections::HashMap::new();
        for _ in 0..trials {
            let mut s = init.clone();
            let mut outs = Vec::new();
            for step in &program {
                match step {
                    ProgramStep::Gate { gate, targets } => {
                        apply_gate_mut(&mut s, gate, targets).unwrap()
                    }
                    ProgramStep::Measure { qubit, basis } => {
                        let (o, post, _) = measure(&s, *qubit, *basis, rng.random()).unwrap();
                        s = post;
                        outs.push(o);
                    }
                }
            }
            *counts.entry(outs).or_insert(0usize) += 1;
        }
        for b in &branches {
            let p = b.probability;
            let f = *counts.get(&b.outcomes).unwrap_or(&0) as f64 / trials as f64;
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            assert!(
                (f - p).abs() <= 4.0 * sigma + 1e-12,
                "{:?}: {f} vs {p}",
                b.outcomes
            );
        }
    }

    #[test]
    fn budget_is_enforced() {
        // Alternating X and Z measurements of one qubit double the leaves each time.
        let mut program = Vec::new();
        for _ in 0..17 {
            program.push(h(0));
            program.push(mz(0));
        }
        let r = enumerate_branches(&StateVector::zero(1).unwrap(), &program);
        assert!(matches!(r, Err(Error::BranchBudgetExceeded(_))));
    }

    #[test]
    fn odometer_visits_every_leaf_once() {
        let leaves = enumerate_choices(BRANCH_BUDGET, |ch| {
            let a = ch.choose(&[0.5, 0.5])?;
            let b = if a == 0 {
                ch.choose(&[0.25, 0.0, 0.75])?
            } else {
                0
            };
            Ok((a, b))
        })
        .unwrap();
        let values: Vec<_> = leaves.iter().map(|l| l.value).collect();
        assert_eq!(values, vec![(0, 0), (0, 2), (1, 0)]);
        let probs: Vec<f64> = leaves.iter().map(|l| l.probability).collect();
        assert!((probs[0] - 0.125).abs() < 1e-12);
        assert!((probs[1] - 0.375).abs() < 1e-12);
        assert!((probs[2] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn coin_chooser_thresholds() {
        let coins = [0.1, 0.9];
        let mut ch = CoinChooser::new(&coins);
        assert_eq!(ch.choose(&[0.5, 0.5]).unwrap(), 0);
        assert_eq!(ch.choose(&[0.5, 0.5]).unwrap(), 1);
        assert!(ch.choose(&[0.5, 0.5]).is_err());
        let bad = [1.5];
        assert!(matches!(
            CoinChooser::new(&bad).choose(&[1.0]),
            Err(Error::InvalidCoin(_))
        ));
    }
}
