use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::transcript::{Party, Payload, WireBasis};
use super::world::{ClientCapability, World};
use crate::error::{Error, Result};
use crate::gadgets::{classify_angle, AngleSet, Octant, PauliFrame};
use crate::qsim::{Chooser, Gate, MeasurementBasis, Qubit, QubitId, StateVector};

/// Number of steps in either case; checkpoints run from 0 to this.
pub const P1_STEPS: u8 = 9;

const ZERO_STATE: Qubit = [C64 { re: 1.0, im: 0.0 }, C64 { re: 0.0, im: 0.0 }];

fn bell() -> StateVector {
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let z = C64::new(0.0, 0.0);
    StateVector::from_amplitudes(vec![h, z, z, h]).expect("normalized")
}

/// Knobs for audits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct P1Options {
    /// Stop after this many steps (0 stops before the first).
    pub stop_after: Option<u8>,
    /// Negative control: the client announces its X/Y basis choice.
    pub leak_basis: bool,
}

/// What one P1 gadget produced.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct P1Outcome {
    pub case: AngleSet,
    /// Client outcomes in the order they occur.
    pub outcomes: Vec<u8>,
    /// X by-product on the register (meaningful only when `completed`).
    pub x_delta: bool,
    pub completed: bool,
}

/// Picks the X (`phi = 0`) or Y (`phi = 2`) basis so that the realised angle
/// `rho(phi)` differs from `theta` by a multiple of `pi`. Returns
/// `(phi, k)` with `k = (rho - theta) / pi mod 2`.
fn pick_basis(theta: Octant, rho: impl Fn(i64) -> i64) -> (i64, bool) {
    for phi in [0, 2] {
        let d = (rho(phi) - theta.k() as i64).rem_euclid(8);
        if d % 4 == 0 {
            return (phi, d == 4);
        }
    }
    unreachable!("one of the two bases always matches")
}

fn basis_of(phi: i64) -> (MeasurementBasis, WireBasis) {
    if phi == 0 {
        (MeasurementBasis::PauliX, WireBasis::X)
    } else {
        (MeasurementBasis::PauliY, WireBasis::Y)
    }
}

/// Runs the measure-only-client HR_Z gadget on `reg`.
///
/// Case A (even octants): the client X-measures half of a Bell pair, measures
/// the coupled ancilla in X or Y, and Z-measures half of a second pair whose
/// coupled ancilla it discards. Case B swaps the roles of the two pairs. The
/// server's actions are identical in both cases.
pub fn p1_hrz_step(
    world: &mut World,
    reg: QubitId,
    theta: Octant,
    opts: P1Options,
    chooser: &mut dyn Chooser,
) -> Result<P1Outcome> {
    if let Some(s) = opts.stop_after {
        if s > P1_STEPS {
            return Err(Error::CheckpointOutOfRange(s));
        }
    }
    let case = classify_angle(theta);
    let mut out = P1Outcome {
        case,
        outcomes: Vec::new(),
        x_delta: false,
        completed: false,
    };
    let stop = |step: u8| opts.stop_after == Some(step);
    if stop(0) {
        return Ok(out);
    }

    // 1: first Bell pair, one half to the client.
    let p = world.prepare_state(Party::Bob, bell(), "bell")?;
    world.send_qubit(Party::Bob, p[0], "bell half")?;
    if stop(1) {
        return Ok(out);
    }
    // 2: X (case A) or Z (case B) on the client half.
    let first = match case {
        AngleSet::A => MeasurementBasis::PauliX,
        AngleSet::B => MeasurementBasis::PauliZ,
    };
    let a = world.measure(Party::Alice, p[0], first, chooser)?;
    out.outcomes.push(a);
    if stop(2) {
        return Ok(out);
    }
    // 3: couple the server half and send it over.
    world.couple(p[1], reg)?;
    world.send_qubit(Party::Bob, p[1], "ancilla")?;
    if stop(3) {
        return Ok(out);
    }
    // 4: case A measures in X/Y, case B discards.
    let mut case_a_delta = (0, false);
    match case {
        AngleSet::A => {
            let sign = if a == 0 { 1 } else { -1 };
            let (phi, k) = pick_basis(theta, |phi| -sign * phi);
            let (basis, wire) = basis_of(phi);
            if opts.leak_basis {
                world.send(Party::Alice, || Payload::Basis { basis: wire });
            }
            let s = world.measure(Party::Alice, p[1], basis, chooser)?;
            out.outcomes.push(s);
            case_a_delta = (s, k);
        }
        AngleSet::B => world.discard(Party::Alice, p[1], chooser)?,
    }
    if stop(4) {
        return Ok(out);
    }
    // 5: cancel the surplus Hadamard.
    let h = world.prepare(Party::Bob, ZERO_STATE, "h-cancel")?;
    world.couple(h, reg)?;
    world.discard(Party::Bob, h, chooser)?;
    if stop(5) {
        return Ok(out);
    }
    // 6: second Bell pair.
    let q = world.prepare_state(Party::Bob, bell(), "bell")?;
    world.send_qubit(Party::Bob, q[0], "bell half")?;
    if stop(6) {
        return Ok(out);
    }
    // 7: the other Pauli on the second client half.
    let second = match case {
        AngleSet::A => MeasurementBasis::PauliZ,
        AngleSet::B => MeasurementBasis::PauliX,
    };
    let b = world.measure(Party::Alice, q[0], second, chooser)?;
    out.outcomes.push(b);
    if stop(7) {
        return Ok(out);
    }
    // 8: couple, RZ(pi/4) on the ancilla, send.
    world.couple(q[1], reg)?;
    world.gate(Party::Bob, &Gate::RZ(FRAC_PI_4), &[q[1]])?;
    world.send_qubit(Party::Bob, q[1], "ancilla")?;
    if stop(8) {
        return Ok(out);
    }
    // 9: case A discards, case B measures in X/Y.
    out.x_delta = match case {
        AngleSet::A => {
            world.discard(Party::Alice, q[1], chooser)?;
            let (s, k) = case_a_delta;
            ((b ^ s) == 1) ^ k
        }
        AngleSet::B => {
            let sign = if b == 0 { 1 } else { -1 };
            let (phi, k) = pick_basis(theta, |phi| sign * (1 - phi));
            let (basis, wire) = basis_of(phi);
            if opts.leak_basis {
                world.send(Party::Alice, || Payload::Basis { basis: wire });
            }
            let s = world.measure(Party::Alice, q[1], basis, chooser)?;
            out.outcomes.push(s);
            ((s ^ a) == 1) ^ k
        }
    };
    out.completed = true;
    Ok(out)
}

/// Standalone result of the P1 gadget on a state vector.
#[derive(Clone, Debug)]
pub struct P1Result {
    pub outcomes: Vec<u8>,
    pub frame_update: PauliFrame,
    pub state: StateVector,
}

fn standalone(
    state: &StateVector,
    target: usize,
    theta: Octant,
    want: AngleSet,
    chooser: &mut dyn Chooser,
) -> Result<P1Result> {
    if classify_angle(theta) != want {
        return Err(Error::InadmissibleAngle {
            octant: theta.k(),
            reason: match want {
                AngleSet::A => "case A needs an even octant",
                AngleSet::B => "case B needs an odd octant",
            },
        });
    }
    let n = state.num_qubits();
    if target >= n {
        return Err(Error::QubitOutOfRange {
            index: target,
            num_qubits: n,
        });
    }
    let (mut world, ids) =
        World::with_register(ClientCapability::MeasureOnly, false, state.clone())?;
    let out = p1_hrz_step(
        &mut world,
        ids[target],
        theta,
        P1Options::default(),
        chooser,
    )?;
    let mut frame = PauliFrame::identity(n);
    frame.toggle(target, out.x_delta, false);
    Ok(P1Result {
        outcomes: out.outcomes,
        frame_update: frame,
        state: world.state_of(&ids)?,
    })
}

/// Case A gadget: `HRZ(theta)` for `theta` in `{0, 2, 4, 6}` octants.
pub fn p1_hrz_case_a(
    state: &StateVector,
    target: usize,
    theta: Octant,
    chooser: &mut dyn Chooser,
) -> Result<P1Result> {
    standalone(state, target, theta, AngleSet::A, chooser)
}

/// Case B gadget: `HRZ(theta)` for `theta` in `{1, 3, 5, 7}` octants.
pub fn p1_hrz_case_b(
    state: &StateVector,
    target: usize,
    theta: Octant,
    chooser: &mut dyn Chooser,
) -> Result<P1Result> {
    standalone(state, target, theta, AngleSet::B, chooser)
}
