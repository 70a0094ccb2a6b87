use std::f64::consts::{FRAC_PI_2, PI};

use super::frame::PauliFrame;
use super::kraus::AncillaPrep;
use super::octant::Octant;
use crate::error::{Error, Result};
use crate::protocols::{ClientCapability, Party, Payload, World};
use crate::qsim::{mat_h, Chooser, MeasurementBasis, Qubit, QubitId, StateVector};

const ZERO_STATE: Qubit = [
    num_complex::Complex64 { re: 1.0, im: 0.0 },
    num_complex::Complex64 { re: 0.0, im: 0.0 },
];

/// What happened during one HR_Z gadget run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuekiOutcome {
    /// The angle sent to the server, in radians.
    pub theta_public: f64,
    pub s1: u8,
    pub s2: u8,
    /// X by-product left on the register: `s2 xor r`.
    pub x_delta: bool,
}

/// Standalone result of [`gadget_hrz_sueki`].
#[derive(Clone, Debug)]
pub struct SuekiResult {
    pub theta_public: f64,
    pub outcomes: (u8, u8),
    pub frame_update: PauliFrame,
    pub state: StateVector,
}

/// The disclosed angle `-theta - (-1)^{s1} (gamma_eff + r pi)`.
///
/// A `|->` ancilla acts as `|+>` with `gamma` negated, so `gamma_eff = -gamma`
/// in that case.
pub fn theta_public_radians(theta: f64, prep: &AncillaPrep, r: u8, s1: u8) -> f64 {
    let g = if prep.negative {
        -prep.gamma
    } else {
        prep.gamma
    };
    let sign = if s1 == 0 { 1.0 } else { -1.0 };
    (-theta - sign * (g + r as f64 * PI)).rem_euclid(2.0 * PI)
}

/// Octant form of [`theta_public_radians`].
pub fn theta_public(theta: Octant, gamma: Octant, negative: bool, r: u8, s1: u8) -> Octant {
    let g = gamma.signed(negative).k() as i64 + 4 * r as i64;
    let sign = if s1 == 0 { 1 } else { -1 };
    Octant::wrap(-(theta.k() as i64) - sign * g)
}

/// Runs the gadget on register qubit `reg` of `world`.
///
/// Alice prepares the tilted ancilla; Bob couples and Z-measures it, cancels
/// the surplus Hadamard with a fresh `|0>` ancilla that is then discarded,
/// receives the disclosed angle, and measures a coupled `|+>` ancilla in the
/// equatorial basis at that angle.
pub fn sueki_hrz_step(
    world: &mut World,
    reg: QubitId,
    theta: f64,
    prep: &AncillaPrep,
    r: u8,
    chooser: &mut dyn Chooser,
) -> Result<SuekiOutcome> {
    if (prep.phase - FRAC_PI_2).abs() > 1e-12 {
        return Err(Error::InvalidState("ancilla phase must be pi/2".into()));
    }
    if r > 1 {
        return Err(Error::InvalidState(format!("r must be a bit, got {r}")));
    }
    let anc = world.prepare(Party::Alice, prep.state(), "ancilla")?;
    world.send_qubit(Party::Alice, anc, "ancilla")?;
    world.couple(anc, reg)?;
    let s1 = world.measure(Party::Bob, anc, MeasurementBasis::PauliZ, chooser)?;
    world.send(Party::Bob, || Payload::Bit { bit: s1 });

    let h = world.prepare(Party::Bob, ZERO_STATE, "h-cancel")?;
    world.couple(h, reg)?;
    world.discard(Party::Bob, h, chooser)?;

    let theta_public = theta_public_radians(theta, prep, r, s1);
    if world.is_recording() {
        let octant = Octant::from_radians(theta_public, 1e-9)?;
        world.send(Party::Alice, || Payload::Angle { octant });
    }

    let a2 = world.prepare(Party::Bob, mat_h()[0], "ancilla")?;
    world.couple(a2, reg)?;
    let s2 = world.measure(
        Party::Bob,
        a2,
        MeasurementBasis::equatorial(theta_public),
        chooser,
    )?;
    world.send(Party::Bob, || Payload::Bit { bit: s2 });
    Ok(SuekiOutcome {
        theta_public,
        s1,
        s2,
        x_delta: (s2 ^ r) == 1,
    })
}

/// Realises `HRZ(theta_desired)` on `target` up to the returned X by-product.
pub fn gadget_hrz_sueki(
    state: &StateVector,
    target: usize,
    theta_desired: f64,
    prep: &AncillaPrep,
    r: u8,
    chooser: &mut dyn Chooser,
) -> Result<SuekiResult> {
    let n = state.num_qubits();
    if target >= n {
        return Err(Error::QubitOutOfRange {
            index: target,
            num_qubits: n,
        });
    }
    let (mut world, ids) =
        World::with_register(ClientCapability::PrepareOnly, false, state.clone())?;
    let out = sueki_hrz_step(&mut world, ids[target], theta_desired, prep, r, chooser)?;
    let mut frame = PauliFrame::identity(n);
    frame.toggle(target, out.x_delta, false);
    Ok(SuekiResult {
        theta_public: out.theta_public,
        outcomes: (out.s1, out.s2),
        frame_update: frame,
        state: world.state_of(&ids)?,
    })
}
