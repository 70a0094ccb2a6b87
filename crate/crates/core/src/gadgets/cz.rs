use std::sync::OnceLock;

use super::frame::PauliFrame;
use super::wiring::Wiring;
use crate::error::{Error, Result};
use crate::protocols::{ClientCapability, World};
use crate::qsim::{Chooser, QubitId, StateVector};

/// Frozen CZ wiring found by [`super::synthesize_gadget`].
pub const CZ_FIXTURE: &str = include_str!("../../fixtures/cz.wiring");

pub fn cz_wiring() -> &'static Wiring {
    static W: OnceLock<Wiring> = OnceLock::new();
    W.get_or_init(|| Wiring::parse(CZ_FIXTURE).expect("bundled CZ fixture parses"))
}

/// Standalone result of [`gadget_cz`].
#[derive(Clone, Debug)]
pub struct CzResult {
    pub s_prime: u8,
    pub frame_update: PauliFrame,
    pub state: StateVector,
}

/// Runs the CZ wiring on register qubits `a`, `b` inside `world`.
/// Returns the reported outcome and the `(x, z)` by-products on `a` and `b`.
pub fn cz_step(
    world: &mut World,
    a: QubitId,
    b: QubitId,
    chooser: &mut dyn Chooser,
) -> Result<(u8, [(bool, bool); 2])> {
    if a == b {
        return Err(Error::DuplicateTargets);
    }
    let (m, delta) = cz_wiring().execute(world, &[a, b], chooser)?;
    Ok((m, [delta[0], delta[1]]))
}

/// Realises `CZ_{ij}` on `state` up to the returned frame delta.
pub fn gadget_cz(
    state: &StateVector,
    i: usize,
    j: usize,
    chooser: &mut dyn Chooser,
) -> Result<CzResult> {
    let n = state.num_qubits();
    for q in [i, j] {
        if q >= n {
            return Err(Error::QubitOutOfRange {
                index: q,
                num_qubits: n,
            });
        }
    }
    if i == j {
        return Err(Error::DuplicateTargets);
    }
    let (mut world, ids) =
        World::with_register(ClientCapability::PrepareOnly, false, state.clone())?;
    let (s_prime, d) = cz_step(&mut world, ids[i], ids[j], chooser)?;
    let mut frame = PauliFrame::identity(n);
    frame.toggle(i, d[0].0, d[0].1);
    frame.toggle(j, d[1].0, d[1].1);
    Ok(CzResult {
        s_prime,
        frame_update: frame,
        state: world.state_of(&ids)?,
    })
}
