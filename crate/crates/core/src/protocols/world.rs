use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use super::transcript::{EventKind, OpKind, Party, Payload, Transcript};
use crate::error::{Error, Result};
use crate::gadgets::entangling_operator;
use crate::gadgets::EntanglerVariant;
use crate::qsim::{
    Chooser, DensityMatrix, Gate, MeasurementBasis, Qubit, QubitId, QubitPool, StateVector,
};

/// What the client is physically able to do.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClientCapability {
    /// Prepares single-qubit states only.
    PrepareOnly,
    /// Performs Pauli X, Y and Z measurements only.
    MeasureOnly,
    /// Applies `RZ(pi/4)` only.
    GateOnly,
}

/// Shared quantum state plus who holds each qubit, with an optional transcript.
#[derive(Clone, Debug)]
pub struct World {
    pool: QubitPool,
    holder: BTreeMap<QubitId, Party>,
    transcript: Option<Transcript>,
    client: ClientCapability,
}

fn basis_name(b: &MeasurementBasis) -> String {
    match b {
        MeasurementBasis::PauliX => "x".into(),
        MeasurementBasis::PauliY => "y".into(),
        MeasurementBasis::PauliZ => "z".into(),
        MeasurementBasis::Rotated { alpha, phi } => format!("rotated({alpha:.6},{phi:.6})"),
    }
}

impl World {
    pub fn new(client: ClientCapability, record: bool) -> Self {
        Self {
            pool: QubitPool::new(),
            holder: BTreeMap::new(),
            transcript: record.then(Transcript::new),
            client,
        }
    }

    /// Bob holds `state` as a register; returns the qubit ids in order.
    pub fn with_register(
        client: ClientCapability,
        record: bool,
        state: StateVector,
    ) -> Result<(Self, Vec<QubitId>)> {
        let mut w = Self::new(client, record);
        let ids = w.prepare_state(Party::Bob, state, "register")?;
        Ok((w, ids))
    }

    pub fn client(&self) -> ClientCapability {
        self.client
    }

    pub fn pool(&self) -> &QubitPool {
        &self.pool
    }

    pub fn transcript(&self) -> Option<&Transcript> {
        self.transcript.as_ref()
    }

    pub fn take_transcript(&mut self) -> Option<Transcript> {
        self.transcript.take()
    }

    pub fn is_recording(&self) -> bool {
        self.transcript.is_some()
    }

    pub fn holder(&self, id: QubitId) -> Result<Party> {
        self.holder.get(&id).copied().ok_or(Error::QubitOutOfRange {
            index: id,
            num_qubits: self.holder.len(),
        })
    }

    /// Ids of live qubits held by `party`, ascending.
    pub fn held_by(&self, party: Party) -> Vec<QubitId> {
        self.holder
            .iter()
            .filter(|(_, p)| **p == party)
            .map(|(id, _)| *id)
            .collect()
    }

    fn log(&mut self, kind: EventKind, from: Party, to: Party, payload: impl FnOnce() -> Payload) {
        if let Some(t) = self.transcript.as_mut() {
            t.push(kind, from, to, payload());
        }
    }

    fn local(&mut self, party: Party, op: OpKind, detail: impl FnOnce() -> String) {
        self.log(EventKind::LocalOp, party, party, || Payload::Op {
            op,
            detail: detail(),
        });
    }

    fn require_holder(&self, party: Party, id: QubitId) -> Result<()> {
        let h = self.holder(id)?;
        if h != party {
            return Err(Error::InvalidState(format!(
                "{party:?} acts on qubit {id} held by {h:?}"
            )));
        }
        Ok(())
    }

    fn violation(&self, what: &str) -> Error {
        Error::CapabilityViolation(format!("{:?} client cannot {what}", self.client))
    }

    pub fn prepare(&mut self, party: Party, q: Qubit, label: &str) -> Result<QubitId> {
        if party == Party::Alice && self.client != ClientCapability::PrepareOnly {
            return Err(self.violation("prepare states"));
        }
        let id = self.pool.alloc(q)?;
        self.holder.insert(id, party);
        self.local(party, OpKind::Prepare, || label.to_string());
        Ok(id)
    }

    /// Multi-qubit preparation, e.g. a Bell pair. Server only.
    pub fn prepare_state(
        &mut self,
        party: Party,
        state: StateVector,
        label: &str,
    ) -> Result<Vec<QubitId>> {
        if party == Party::Alice
            && (self.client != ClientCapability::PrepareOnly || state.num_qubits() > 1)
        {
            return Err(self.violation("prepare multi-qubit states"));
        }
        let ids = self.pool.alloc_state(state);
        for &id in &ids {
            self.holder.insert(id, party);
        }
        self.local(party, OpKind::Prepare, || label.to_string());
        Ok(ids)
    }

    pub fn gate(&mut self, party: Party, gate: &Gate, targets: &[QubitId]) -> Result<()> {
        if party == Party::Alice {
            let ok = self.client == ClientCapability::GateOnly
                && matches!(gate, Gate::RZ(t) if (t - FRAC_PI_4).abs() < 1e-12);
            if !ok {
                return Err(self.violation("apply this gate"));
            }
        }
        for &t in targets {
            self.require_holder(party, t)?;
        }
        self.pool.apply_gate(gate, targets)?;
        self.local(party, OpKind::Gate, || format!("{gate:?} on {targets:?}"));
        Ok(())
    }

    /// The fixed ancilla-register coupling, performed by the server.
    pub fn couple(&mut self, ancilla: QubitId, register: QubitId) -> Result<()> {
        self.require_holder(Party::Bob, ancilla)?;
        self.require_holder(Party::Bob, register)?;
        let e = entangling_operator(EntanglerVariant::HHCZ);
        self.pool.apply_gate(&e, &[ancilla, register])?;
        self.local(Party::Bob, OpKind::Couple, || {
            format!("{ancilla} -> {register}")
        });
        Ok(())
    }

    /// Measures and removes `id`; logs the outcome as local to `party`.
    pub fn measure(
        &mut self,
        party: Party,
        id: QubitId,
        basis: MeasurementBasis,
        chooser: &mut dyn Chooser,
    ) -> Result<u8> {
        if party == Party::Alice {
            let pauli = matches!(
                basis,
                MeasurementBasis::PauliX | MeasurementBasis::PauliY | MeasurementBasis::PauliZ
            );
            if self.client != ClientCapability::MeasureOnly || !pauli {
                return Err(self.violation("perform this measurement"));
            }
        }
        self.require_holder(party, id)?;
        let bit = self.pool.measure(id, basis, chooser)?;
        self.holder.remove(&id);
        self.local(party, OpKind::Measure, || {
            format!("{id} in {}", basis_name(&basis))
        });
        self.log(EventKind::Outcome, party, party, || Payload::Outcome {
            bit,
        });
        Ok(bit)
    }

    pub fn discard(&mut self, party: Party, id: QubitId, chooser: &mut dyn Chooser) -> Result<()> {
        self.require_holder(party, id)?;
        self.pool.discard(id, chooser)?;
        self.holder.remove(&id);
        self.local(party, OpKind::Discard, || id.to_string());
        Ok(())
    }

    pub fn send_qubit(&mut self, from: Party, id: QubitId, label: &str) -> Result<()> {
        self.require_holder(from, id)?;
        self.holder.insert(id, from.other());
        self.log(EventKind::Qubit, from, from.other(), || Payload::Qubit {
            label: label.to_string(),
        });
        Ok(())
    }

    pub fn send(&mut self, from: Party, payload: impl FnOnce() -> Payload) {
        self.log(EventKind::Classical, from, from.other(), payload);
    }

    /// Server-side deviation: applies `gate` to a qubit Bob holds without the
    /// client's capability rules and without a transcript entry.
    pub fn tamper(&mut self, gate: &Gate, targets: &[QubitId]) -> Result<()> {
        for &t in targets {
            self.require_holder(Party::Bob, t)?;
        }
        self.pool.apply_gate(gate, targets)
    }

    /// Pure state of `ids`, which must not be entangled with other live qubits.
    pub fn state_of(&self, ids: &[QubitId]) -> Result<StateVector> {
        self.pool.state_of(ids)
    }

    /// Reduced state of every qubit Bob currently holds, ordered by id.
    pub fn bob_marginal(&self) -> Result<DensityMatrix> {
        self.pool.reduced(&self.held_by(Party::Bob))
    }
}
