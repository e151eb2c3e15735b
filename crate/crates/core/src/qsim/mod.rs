//! Exact dense simulation of few-qubit states.
//!
//! Qubit `k` is the `k`-th most significant bit of a basis index, so the
//! one-based qubit labels used in circuit diagrams map to `label − 1`.

pub mod density;
pub mod gate;
pub(crate) mod kernel;
pub mod measure;
pub mod pauli;
pub mod pure;
pub mod state;

pub use density::DensityMatrix;
pub use gate::Gate;
pub use measure::{
    bell_project_distribution, bell_project_forced, bell_project_sample, measure_distribution,
    measure_forced, measure_out, measure_sample, Basis, Bell, MeasurementRecord, Outcome,
};
pub use pauli::{Pauli, PauliString};
pub use pure::PureState;
pub use state::{QState, QuantumState, MAX_QUBITS};

use crate::error::Result;
use crate::scalar::Scalar;

/// `|0…0⟩` on `num_qubits` qubits.
pub fn make_basis_state<T: Scalar>(num_qubits: usize) -> Result<PureState<T>> {
    PureState::basis(num_qubits)
}

/// Bell state `|Φ⁺⟩ = (|00⟩ + |11⟩)/√2`.
pub fn phi_plus<T: Scalar>() -> PureState<T> {
    PureState::from_amplitudes(measure::Bell::PhiPlus.ket::<T>().to_vec()).expect("normalized")
}

/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz<T: Scalar>(num_qubits: usize) -> Result<PureState<T>> {
    let one = num_complex::Complex::new(T::one(), T::zero());
    PureState::from_sparse(num_qubits, &[(0, one), ((1 << num_qubits) - 1, one)])
}
