use std::f64::consts::FRAC_PI_4;

use super::transcript::{Party, Payload};
use super::world::{ClientCapability, World};
use crate::error::{Error, Result};
use crate::gadgets::{Octant, PauliFrame};
use crate::qsim::{mat_h, Chooser, Gate, MeasurementBasis, QubitId, StateVector};

/// Outcome of one gate-only-client HR_Z gadget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct P2Outcome {
    pub s: u8,
    pub x_delta: bool,
}

/// Runs the gadget realising `HRZ(k pi/4)` on `reg`.
///
/// The server couples a `|+>` ancilla and sends it; the client applies
/// `RZ(pi/4)` `k` times and returns it; the server X-measures and reports `S`.
/// With `substitute`, the server sends that qubit instead of the coupled
/// ancilla and measures the ancilla unrotated.
pub fn p2_hrz_step(
    world: &mut World,
    reg: QubitId,
    k: Octant,
    substitute: Option<QubitId>,
    chooser: &mut dyn Chooser,
) -> Result<P2Outcome> {
    let anc = world.prepare(Party::Bob, mat_h()[0], "ancilla")?;
    world.couple(anc, reg)?;
    let sent = substitute.unwrap_or(anc);
    world.send_qubit(Party::Bob, sent, "ancilla")?;
    for _ in 0..k.k() {
        world.gate(Party::Alice, &Gate::RZ(FRAC_PI_4), &[sent])?;
    }
    world.send_qubit(Party::Alice, sent, "ancilla")?;
    let s = world.measure(Party::Bob, anc, MeasurementBasis::PauliX, chooser)?;
    world.send(Party::Bob, || Payload::Bit { bit: s });
    Ok(P2Outcome { s, x_delta: s == 1 })
}

/// Standalone result of [`p2_hrz`].
#[derive(Clone, Debug)]
pub struct P2Result {
    pub s: u8,
    pub frame_update: PauliFrame,
    pub state: StateVector,
}

/// `HRZ(k pi/4)` on `target` up to the returned frame delta; `k` in `0..=7`.
pub fn p2_hrz(
    state: &StateVector,
    target: usize,
    k: u8,
    chooser: &mut dyn Chooser,
) -> Result<P2Result> {
    let k = Octant::new(k).map_err(|_| Error::InvalidOctant(k))?;
    let n = state.num_qubits();
    if target >= n {
        return Err(Error::QubitOutOfRange {
            index: target,
            num_qubits: n,
        });
    }
    let (mut world, ids) = World::with_register(ClientCapability::GateOnly, false, state.clone())?;
    let out = p2_hrz_step(&mut world, ids[target], k, None, chooser)?;
    let mut frame = PauliFrame::identity(n);
    frame.toggle(target, out.x_delta, false);
    Ok(P2Result {
        s: out.s,
        frame_update: frame,
        state: world.state_of(&ids)?,
    })
}
