//! Ancilla-driven gadgets: HR_Z and CZ wirings, the Pauli frame, Euler
//! decomposition, and the wiring search used to recover gadget layouts.

mod cz;
mod euler;
mod frame;
mod kraus;
mod octant;
mod sueki;
mod synth;
mod wiring;

pub use cz::{cz_step, cz_wiring, gadget_cz, CzResult, CZ_FIXTURE};
pub use euler::{decompose_unitary, EulerAngles};
pub use frame::{frame_conjugate, pauli_operator, FrameStep, PauliFrame};
pub use kraus::{entangling_operator, kraus_backaction, AncillaPrep, EntanglerVariant, KrausPair};
pub use octant::{classify_angle, AngleSet, Octant};
pub use sueki::{
    gadget_hrz_sueki, sueki_hrz_step, theta_public, theta_public_radians, SuekiOutcome, SuekiResult,
};
pub use synth::{synthesize_gadget, verify_wiring, TemplateSpace};
pub use wiring::{pauli_bits, pauli_letter, MeasureKind, PrepKind, Wiring};
