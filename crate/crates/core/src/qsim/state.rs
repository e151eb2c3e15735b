use num_complex::Complex;

use super::density::DensityMatrix;
use super::gate::Gate;
use super::pauli::PauliString;
use super::pure::PureState;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MAX_QUBITS: usize = 12;

/// Operations shared by pure and mixed states.
///
/// Methods returning `Option<Self>` yield `None` when the branch probability
/// is below `T::min_branch_prob()`.
pub trait QuantumState<T: Scalar>: Clone + Send + Sync + Sized {
    fn num_qubits(&self) -> usize;

    fn apply_unitary(&mut self, gate: &Gate<T>, targets: &[usize]) -> Result<()>;

    fn apply_pauli(&mut self, op: &PauliString) -> Result<()>;

    fn expectation(&self, op: &PauliString) -> Result<T>;

    /// Projects onto the `sign` eigenspace of a Hermitian Pauli string and
    /// renormalizes. Qubits are kept.
    fn project(&self, op: &PauliString, sign: i8) -> Result<(T, Option<Self>)>;

    /// Contracts `qubits` against `⟨ket|` (ket indexed with `qubits[0]` as the
    /// most significant bit) and removes them; the remaining qubits keep their
    /// relative order.
    fn contract(&self, qubits: &[usize], ket: &[Complex<T>]) -> Result<(T, Option<Self>)>;

    fn partial_trace(&self, discard: &[usize]) -> Result<DensityMatrix<T>>;

    fn to_density(&self) -> DensityMatrix<T>;

    /// `⟨target|ρ|target⟩`.
    fn fidelity(&self, target: &PureState<T>) -> Result<T>;
}

pub(crate) fn check_qubits(qubits: &[usize], num_qubits: usize) -> Result<()> {
    for (i, &q) in qubits.iter().enumerate() {
        if q >= num_qubits {
            return Err(Error::QubitOutOfRange { qubit: q, num_qubits });
        }
        if qubits[..i].contains(&q) {
            return Err(Error::DuplicateQubits(qubits.to_vec()));
        }
    }
    Ok(())
}

pub(crate) fn check_pauli(op: &PauliString, num_qubits: usize) -> Result<()> {
    match op.max_qubit() {
        Some(q) if q >= num_qubits => Err(Error::QubitOutOfRange { qubit: q, num_qubits }),
        _ => Ok(()),
    }
}

pub(crate) fn check_gate<T: Scalar>(gate: &Gate<T>, targets: &[usize], n: usize) -> Result<()> {
    if gate.arity() != targets.len() {
        return Err(Error::TargetArity {
            expected: gate.arity(),
            got: targets.len(),
        });
    }
    check_qubits(targets, n)
}

/// A state that starts pure and becomes mixed once loss or noise is applied.
#[derive(Debug, Clone, PartialEq)]
pub enum QState<T> {
    Pure(PureState<T>),
    Mixed(DensityMatrix<T>),
}

impl<T: Scalar> QState<T> {
    pub fn is_pure(&self) -> bool {
        matches!(self, QState::Pure(_))
    }

    /// Traces out `qubits`, promoting to a density matrix. An empty loss set
    /// leaves the state untouched.
    pub fn lose(&self, qubits: &[usize]) -> Result<QState<T>> {
        if qubits.is_empty() {
            return Ok(self.clone());
        }
        Ok(QState::Mixed(self.partial_trace(qubits)?))
    }

    pub fn into_density(self) -> DensityMatrix<T> {
        match self {
            QState::Pure(p) => p.to_density(),
            QState::Mixed(m) => m,
        }
    }

    pub fn as_mixed_mut(&mut self) -> &mut DensityMatrix<T> {
        if let QState::Pure(p) = self {
            *self = QState::Mixed(p.to_density());
        }
        match self {
            QState::Mixed(m) => m,
            QState::Pure(_) => unreachable!(),
        }
    }
}

impl<T: Scalar> From<PureState<T>> for QState<T> {
    fn from(p: PureState<T>) -> Self {
        QState::Pure(p)
    }
}

impl<T: Scalar> From<DensityMatrix<T>> for QState<T> {
    fn from(m: DensityMatrix<T>) -> Self {
        QState::Mixed(m)
    }
}

macro_rules! dispatch {
    ($self:ident, $s:ident => $e:expr) => {
        match $self {
            QState::Pure($s) => $e,
            QState::Mixed($s) => $e,
        }
    };
}

impl<T: Scalar> QuantumState<T> for QState<T> {
    fn num_qubits(&self) -> usize {
        dispatch!(self, s => s.num_qubits())
    }

    fn apply_unitary(&mut self, gate: &Gate<T>, targets: &[usize]) -> Result<()> {
        dispatch!(self, s => s.apply_unitary(gate, targets))
    }

    fn apply_pauli(&mut self, op: &PauliString) -> Result<()> {
        dispatch!(self, s => s.apply_pauli(op))
    }

    fn expectation(&self, op: &PauliString) -> Result<T> {
        dispatch!(self, s => s.expectation(op))
    }

    fn project(&self, op: &PauliString, sign: i8) -> Result<(T, Option<Self>)> {
        match self {
            QState::Pure(s) => s.project(op, sign).map(|(p, s)| (p, s.map(QState::Pure))),
            QState::Mixed(s) => s.project(op, sign).map(|(p, s)| (p, s.map(QState::Mixed))),
        }
    }

    fn contract(&self, qubits: &[usize], ket: &[Complex<T>]) -> Result<(T, Option<Self>)> {
        match self {
            QState::Pure(s) => s
                .contract(qubits, ket)
                .map(|(p, s)| (p, s.map(QState::Pure))),
            QState::Mixed(s) => s
                .contract(qubits, ket)
                .map(|(p, s)| (p, s.map(QState::Mixed))),
        }
    }

    fn partial_trace(&self, discard: &[usize]) -> Result<DensityMatrix<T>> {
        dispatch!(self, s => s.partial_trace(discard))
    }

    fn to_density(&self) -> DensityMatrix<T> {
        dispatch!(self, s => s.to_density())
    }

    fn fidelity(&self, target: &PureState<T>) -> Result<T> {
        dispatch!(self, s => s.fidelity(target))
    }
}
