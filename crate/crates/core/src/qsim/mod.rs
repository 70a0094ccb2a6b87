//! Dense statevector simulation: states, gates, measurement, partial trace and
//! exhaustive branch enumeration.

mod basis;
mod branch;
mod density;
pub(crate) mod gate;
mod pool;
mod state;

pub use basis::{measure, rotated_state, MeasurementBasis};
pub use branch::{
    enumerate_branches, enumerate_choices, Branch, Chooser, CoinChooser, Leaf, ProgramStep,
    RngChooser, ScriptedChooser, BRANCH_BUDGET, ZERO_WEIGHT,
};
pub use density::{hermitian_eigenvalues, partial_trace, trace_distance, DensityMatrix};
pub use gate::{
    apply_gate, apply_gate_mut, dagger2, kron2, mat_h, mat_identity2, mat_rx, mat_rz, mat_x, mat_y,
    mat_z, mul2, mul4, Gate,
};
pub use pool::{permute_qubits, QubitId, QubitPool};
pub use state::{fidelity_up_to_phase, Mat2, Mat4, Qubit, StateVector, MAX_QUBITS};
