use super::basis::MeasurementBasis;
use super::branch::Chooser;
use super::density::{partial_trace, DensityMatrix};
#[cfg(test)]
use super::gate::ONE;
use super::gate::{Gate, ZERO};
use super::state::{Mat2, Mat4, Qubit, StateVector};
use crate::error::{Error, Result};

/// Stable handle to a qubit inside a [`QubitPool`].
pub type QubitId = usize;

#[derive(Clone, Debug)]
struct Cluster {
    ids: Vec<QubitId>,
    state: StateVector,
}

/// A collection of qubits stored as independent entangled clusters.
///
/// Clusters merge when a two-qubit operation spans them and shrink when a qubit
/// is measured or discarded, so product-heavy workloads stay cheap.
#[derive(Clone, Debug, Default)]
pub struct QubitPool {
    clusters: Vec<Cluster>,
    next_id: QubitId,
}

fn kron_states(low: &StateVector, high: &StateVector) -> Result<StateVector> {
    let (a, b) = (low.amplitudes(), high.amplitudes());
    let mut amps = Vec::with_capacity(a.len() * b.len());
    for y in b {
        amps.extend(a.iter().map(|x| x * y));
    }
    StateVector::from_amplitudes(amps)
}

/// Reorders qubits so that old qubit `order[k]` becomes new qubit `k`.
pub fn permute_qubits(state: &StateVector, order: &[usize]) -> Result<StateVector> {
    let n = state.num_qubits();
    if order.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: order.len(),
        });
    }
    let amps = state.amplitudes();
    let mut out = vec![ZERO; amps.len()];
    for (new_idx, slot) in out.iter_mut().enumerate() {
        let mut old = 0;
        for (k, &q) in order.iter().enumerate() {
            old |= ((new_idx >> k) & 1) << q;
        }
        *slot = amps[old];
    }
    StateVector::from_amplitudes(out)
}

impl QubitPool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Allocates a fresh qubit in state `q`.
    pub fn alloc(&mut self, q: Qubit) -> Result<QubitId> {
        let state = StateVector::from_amplitudes(q.to_vec())?;
        Ok(self.alloc_state(state)[0])
    }

    /// Allocates the qubits of `state` as one cluster; qubit k gets the k-th id.
    pub fn alloc_state(&mut self, state: StateVector) -> Vec<QubitId> {
        let ids: Vec<QubitId> = (self.next_id..self.next_id + state.num_qubits()).collect();
        self.next_id += ids.len();
        self.clusters.push(Cluster {
            ids: ids.clone(),
            state,
        });
        ids
    }

    pub fn contains(&self, id: QubitId) -> bool {
        self.locate(id).is_ok()
    }

    /// Live qubit ids in ascending order.
    pub fn live_ids(&self) -> Vec<QubitId> {
        let mut ids: Vec<QubitId> = self.clusters.iter().flat_map(|c| c.ids.clone()).collect();
        ids.sort_unstable();
        ids
    }

    fn locate(&self, id: QubitId) -> Result<(usize, usize)> {
        for (ci, c) in self.clusters.iter().enumerate() {
            if let Some(pos) = c.ids.iter().position(|&x| x == id) {
                return Ok((ci, pos));
            }
        }
        Err(Error::QubitOutOfRange {
            index: id,
            num_qubits: self.next_id,
        })
    }

    /// Merges the clusters holding `a` and `b`; returns the merged cluster index.
    fn join(&mut self, a: QubitId, b: QubitId) -> Result<usize> {
        let (ca, _) = self.locate(a)?;
        let (cb, _) = self.locate(b)?;
        if ca == cb {
            return Ok(ca);
        }
        let (keep, gone) = (ca.min(cb), ca.max(cb));
        let moved = self.clusters.remove(gone);
        let target = &mut self.clusters[keep];
        target.state = kron_states(&target.state, &moved.state)?;
        target.ids.extend(moved.ids);
        Ok(keep)
    }

    pub fn apply1(&mut self, id: QubitId, m: &Mat2) -> Result<()> {
        let (ci, pos) = self.locate(id)?;
        self.clusters[ci].state.apply_mat2(m, pos)
    }

    pub fn apply2(&mut self, a: QubitId, b: QubitId, m: &Mat4) -> Result<()> {
        if a == b {
            return Err(Error::DuplicateTargets);
        }
        let ci = self.join(a, b)?;
        let c = &mut self.clusters[ci];
        let pa = c.ids.iter().position(|&x| x == a).expect("joined");
        let pb = c.ids.iter().position(|&x| x == b).expect("joined");
        c.state.apply_mat4(m, pa, pb)
    }

    pub fn apply_gate(&mut self, gate: &Gate, targets: &[QubitId]) -> Result<()> {
        if targets.len() != gate.arity() {
            return Err(Error::ArityMismatch {
                expected: gate.arity(),
                got: targets.len(),
            });
        }
        match targets {
            [q] => {
                let (ci, pos) = self.locate(*q)?;
                super::gate::apply_gate_mut(&mut self.clusters[ci].state, gate, &[pos])
            }
            [a, b] => self.apply2(*a, *b, &gate.mat4().expect("two-qubit gate")),
            _ => unreachable!("gate arity is 1 or 2"),
        }
    }

    /// Born probabilities of measuring `id` in `basis`.
    pub fn probabilities(&self, id: QubitId, basis: MeasurementBasis) -> Result<[f64; 2]> {
        let (ci, pos) = self.locate(id)?;
        self.clusters[ci]
            .state
            .outcome_probabilities(pos, &basis.eigenstates()?)
    }

    /// Measures `id` in `basis` and removes it from the pool.
    pub fn measure(
        &mut self,
        id: QubitId,
        basis: MeasurementBasis,
        chooser: &mut dyn Chooser,
    ) -> Result<u8> {
        let e = basis.eigenstates()?;
        let p = self.probabilities(id, basis)?;
        let outcome = chooser.choose(&p)?;
        self.remove_onto(id, e[outcome])?;
        Ok(outcome as u8)
    }

    /// Projects `id` onto `bra` and removes it; returns the projection probability.
    pub fn remove_onto(&mut self, id: QubitId, bra: Qubit) -> Result<f64> {
        let (ci, pos) = self.locate(id)?;
        let c = &mut self.clusters[ci];
        if c.ids.len() == 1 {
            let a = c.state.amplitudes();
            let p = (bra[0].conj() * a[0] + bra[1].conj() * a[1]).norm_sqr();
            self.clusters.remove(ci);
            return Ok(p);
        }
        let p = c.state.project_out(pos, bra)?;
        c.ids.remove(pos);
        Ok(p)
    }

    /// Drops `id`. A qubit in product with the rest is removed exactly; an
    /// entangled one is measured in Z and the outcome forgotten, which leaves
    /// the remaining qubits in the correct mixture.
    pub fn discard(&mut self, id: QubitId, chooser: &mut dyn Chooser) -> Result<()> {
        let (ci, pos) = self.locate(id)?;
        match self.clusters[ci].state.factor_qubit(pos)? {
            Some(q) => {
                self.remove_onto(id, q)?;
            }
            None => {
                self.measure(id, MeasurementBasis::PauliZ, chooser)?;
            }
        }
        Ok(())
    }

    /// Pure state of exactly the live qubits `ids`, with `ids[k]` as qubit k.
    /// The qubits must not be entangled with anything outside `ids`.
    pub fn state_of(&self, ids: &[QubitId]) -> Result<StateVector> {
        let (joint, order) = self.joint(ids)?;
        if order.len() != ids.len() {
            return Err(Error::InvalidState(
                "requested qubits are entangled with others".into(),
            ));
        }
        let positions: Vec<usize> = ids
            .iter()
            .map(|id| order.iter().position(|x| x == id).expect("collected"))
            .collect();
        permute_qubits(&joint, &positions)
    }

    /// Reduced density matrix of `ids`, with `ids[k]` as qubit k.
    pub fn reduced(&self, ids: &[QubitId]) -> Result<DensityMatrix> {
        let (joint, order) = self.joint(ids)?;
        let keep: Vec<usize> = ids
            .iter()
            .map(|id| order.iter().position(|x| x == id).expect("collected"))
            .collect();
        partial_trace(&joint, &keep)
    }

    /// Tensor product of every cluster touching `ids`, and its qubit order.
    fn joint(&self, ids: &[QubitId]) -> Result<(StateVector, Vec<QubitId>)> {
        let mut touched: Vec<usize> = Vec::new();
        for (i, &id) in ids.iter().enumerate() {
            if ids[..i].contains(&id) {
                return Err(Error::DuplicateTargets);
            }
            let (ci, _) = self.locate(id)?;
            if !touched.contains(&ci) {
                touched.push(ci);
            }
        }
        touched.sort_unstable();
        let mut state: Option<StateVector> = None;
        let mut order = Vec::new();
        for ci in touched {
            let c = &self.clusters[ci];
            state = Some(match state {
                None => c.state.clone(),
                Some(s) => kron_states(&s, &c.state)?,
            });
            order.extend(c.ids.iter().copied());
        }
        let state = state.ok_or_else(|| Error::InvalidState("no qubits requested".into()))?;
        Ok((state, order))
    }
}
