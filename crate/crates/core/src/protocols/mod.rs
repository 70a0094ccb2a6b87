//! Client/server protocol engine: configs, trap layouts, compiled schedules,
//! the three HR_Z gadget families and run drivers.

mod config;
mod layout;
mod p1;
mod p2;
mod runner;
mod schedule;
mod transcript;
mod world;

pub use config::{
    single_octants, AdversaryConfig, GateKind, GateRequest, Primitive, ProtocolConfig, ProtocolKind,
};
pub use layout::{decode_output, place_traps, DecodedOutput, TrapKind, TrapLayout};
pub use p1::{p1_hrz_case_a, p1_hrz_case_b, p1_hrz_step, P1Options, P1Outcome, P1Result, P1_STEPS};
pub use p2::{p2_hrz, p2_hrz_step, P2Outcome, P2Result};
pub use runner::{
    draw_pauli_positions, exact_distribution, exec_step, run_protocol, run_protocol1,
    run_protocol2, run_sueki, ExactDistribution, RunContext, RunOutcome, RunState,
    VerificationReport,
};
pub use schedule::{compile, slot_angles, Plan, Step};
pub use transcript::{Event, EventKind, OpKind, Party, Payload, Transcript, WireBasis};
pub use world::{ClientCapability, World};
