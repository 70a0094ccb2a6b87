use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::gadgets::Octant;

/// The two protocol participants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    /// The client.
    Alice,
    /// The server.
    Bob,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Classical,
    Qubit,
    LocalOp,
    Outcome,
}

/// Kinds of local quantum operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    Prepare,
    Gate,
    Measure,
    Couple,
    Discard,
}

/// Pauli measurement bases as they appear on the wire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WireBasis {
    X,
    Y,
    Z,
}

/// Event contents. Angles travel as octants and outcomes as bits.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Payload {
    Angle {
        octant: Octant,
    },
    Bit {
        bit: u8,
    },
    Basis {
        basis: WireBasis,
    },
    /// A plain-text leak used only by negative-control variants.
    Secret {
        value: String,
    },
    Qubit {
        label: String,
    },
    Op {
        op: OpKind,
        detail: String,
    },
    Outcome {
        bit: u8,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Event {
    pub seq: u64,
    pub kind: EventKind,
    pub from: Party,
    pub to: Party,
    pub payload: Payload,
}

impl Event {
    /// Whether Bob sends, receives or locally produces this event.
    pub fn visible_to_bob(&self) -> bool {
        self.from == Party::Bob || self.to == Party::Bob
    }
}

/// Append-only, sequence-numbered event log.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    events: Vec<Event>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, kind: EventKind, from: Party, to: Party, payload: Payload) {
        let seq = self.events.len() as u64;
        self.events.push(Event {
            seq,
            kind,
            from,
            to,
            payload,
        });
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// The events Bob can see, in order.
    pub fn bob_view(&self) -> Vec<&Event> {
        self.events.iter().filter(|e| e.visible_to_bob()).collect()
    }

    /// Classical payloads Bob sends or receives, in order.
    pub fn bob_classical(&self) -> Vec<&Payload> {
        self.events
            .iter()
            .filter(|e| e.kind == EventKind::Classical && e.visible_to_bob())
            .map(|e| &e.payload)
            .collect()
    }

    /// One JSON object per line.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("events serialize"));
            out.push('\n');
        }
        out
    }

    /// SHA-256 hex digest of the JSON-lines export.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_json_lines().as_bytes()))
    }

    pub fn count(&self, kind: EventKind, from: Party, to: Party) -> usize {
        self.events
            .iter()
            .filter(|e| e.kind == kind && e.from == from && e.to == to)
            .count()
    }
}
