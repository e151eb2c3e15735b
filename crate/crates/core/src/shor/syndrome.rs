use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::CodeLayout;
use crate::error::{Error, Result};
use crate::qsim::{DensityMatrix, Pauli, PauliString, QuantumState};
use crate::scalar::Scalar;

const SHOR_QUBITS: usize = 9;

/// `Z₁Z₂, Z₂Z₃, Z₄Z₅, Z₅Z₆, Z₇Z₈, Z₈Z₉, X₁…X₆, X₄…X₉` on zero-based indices.
pub fn stabilizers() -> Vec<PauliString> {
    let mut out: Vec<PauliString> = (0..3)
        .flat_map(|b| {
            let q = 3 * b;
            [PauliString::zs(&[q, q + 1]), PauliString::zs(&[q + 1, q + 2])]
        })
        .collect();
    out.push(PauliString::xs(&[0, 1, 2, 3, 4, 5]));
    out.push(PauliString::xs(&[3, 4, 5, 6, 7, 8]));
    out
}

/// Outcomes (or expectations) of `S_Z^1..S_Z^6` and `S_X^1, S_X^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SyndromeRecord<V> {
    #[serde(rename = "SZ")]
    pub sz: [V; 6],
    #[serde(rename = "SX")]
    pub sx: [V; 2],
}

impl<V: Copy> SyndromeRecord<V> {
    pub fn from_values(v: [V; 8]) -> Self {
        Self {
            sz: [v[0], v[1], v[2], v[3], v[4], v[5]],
            sx: [v[6], v[7]],
        }
    }

    /// In stabilizer order.
    pub fn values(&self) -> [V; 8] {
        let z = self.sz;
        [z[0], z[1], z[2], z[3], z[4], z[5], self.sx[0], self.sx[1]]
    }
}

impl SyndromeRecord<i8> {
    pub fn trivial() -> Self {
        Self::from_values([1; 8])
    }
}

fn check_nine<T: Scalar, S: QuantumState<T>>(state: &S) -> Result<()> {
    if state.num_qubits() != SHOR_QUBITS {
        return Err(Error::DimensionMismatch(state.num_qubits(), SHOR_QUBITS));
    }
    Ok(())
}

/// Expectation of every stabilizer.
pub fn measure_syndromes<T: Scalar, S: QuantumState<T>>(state: &S) -> Result<SyndromeRecord<T>> {
    check_nine(state)?;
    let stabs = stabilizers();
    let mut values = [T::zero(); 8];
    for (v, s) in values.iter_mut().zip(&stabs) {
        *v = state.expectation(s)?;
    }
    Ok(SyndromeRecord::from_values(values))
}

/// Measures the eight commuting stabilizers in order, one uniform variate
/// each, and returns the post-measurement state.
pub fn sample_syndromes<T: Scalar, S: QuantumState<T>, R: Rng + ?Sized>(
    state: &S,
    rng: &mut R,
) -> Result<(SyndromeRecord<i8>, S)> {
    check_nine(state)?;
    let mut current = state.clone();
    let mut values = [1i8; 8];
    for (v, s) in values.iter_mut().zip(&stabilizers()) {
        let p_plus = (T::one() + current.expectation(s)?) * T::lit(0.5);
        let u: f64 = rng.random();
        let sign = if u < p_plus.as_f64() { 1 } else { -1 };
        let (p, post) = current.project(s, sign)?;
        current = post.ok_or(Error::ImpossibleOutcome(p.as_f64()))?;
        *v = sign;
    }
    Ok((SyndromeRecord::from_values(values), current))
}

/// Syndrome flipped by a Pauli error acting on a codeword.
pub fn syndrome_of_error(error: &PauliString) -> SyndromeRecord<i8> {
    let mut values = [1i8; 8];
    for (v, s) in values.iter_mut().zip(&stabilizers()) {
        if !s.commutes_with(error) {
            *v = -1;
        }
    }
    SyndromeRecord::from_values(values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlipKind {
    BitFlip,
    PhaseFlip,
}

impl FlipKind {
    pub fn pauli(self) -> Pauli {
        match self {
            FlipKind::BitFlip => Pauli::X,
            FlipKind::PhaseFlip => Pauli::Z,
        }
    }
}

/// `ρ → (1 − p)ρ + p EρE` with `E = X` or `Z` on `qubit`.
pub fn apply_flip_channel<T: Scalar>(
    rho: &DensityMatrix<T>,
    qubit: usize,
    kind: FlipKind,
    p: T,
) -> Result<DensityMatrix<T>> {
    if !(T::zero()..=T::one()).contains(&p) {
        return Err(Error::InvalidProbability(p.as_f64()));
    }
    let mut out = rho.clone();
    out.mix_pauli(&PauliString::single(qubit, kind.pauli()), p)?;
    Ok(out)
}

/// Minimal single-qubit explanation of a syndrome. Phase flips are only
/// resolved up to their code block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ErrorHypothesis {
    None,
    BitFlip { qubit: usize },
    PhaseFlip { block: usize },
    /// Bit and phase flip on the same qubit.
    Both { qubit: usize },
    Unidentifiable,
}

impl ErrorHypothesis {
    /// Pauli that undoes the hypothesis; a block phase flip is undone on the
    /// block's lowest-indexed qubit.
    pub fn correction(&self) -> Result<PauliString> {
        let layout = CodeLayout::shor();
        Ok(match *self {
            ErrorHypothesis::None => PauliString::identity(),
            ErrorHypothesis::BitFlip { qubit } => PauliString::single(qubit, Pauli::X),
            ErrorHypothesis::PhaseFlip { block } => {
                PauliString::single(layout.qubit_of(block, 0), Pauli::Z)
            }
            ErrorHypothesis::Both { qubit } => PauliString::single(qubit, Pauli::Y),
            ErrorHypothesis::Unidentifiable => return Err(Error::Unidentifiable),
        })
    }
}

fn hypothesis_table() -> &'static [(SyndromeRecord<i8>, ErrorHypothesis)] {
    static TABLE: OnceLock<Vec<(SyndromeRecord<i8>, ErrorHypothesis)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let layout = CodeLayout::shor();
        let mut table = vec![(SyndromeRecord::trivial(), ErrorHypothesis::None)];
        let mut push = |err: PauliString, hyp: ErrorHypothesis| {
            let s = syndrome_of_error(&err);
            if !table.iter().any(|(t, _)| *t == s) {
                table.push((s, hyp));
            }
        };
        for q in 0..SHOR_QUBITS {
            push(PauliString::single(q, Pauli::X), ErrorHypothesis::BitFlip { qubit: q });
        }
        for q in 0..SHOR_QUBITS {
            let block = layout.locate(q).0;
            push(PauliString::single(q, Pauli::Z), ErrorHypothesis::PhaseFlip { block });
        }
        for q in 0..SHOR_QUBITS {
            push(PauliString::single(q, Pauli::Y), ErrorHypothesis::Both { qubit: q });
        }
        table
    })
}

pub fn diagnose(syndrome: &SyndromeRecord<i8>) -> ErrorHypothesis {
    hypothesis_table()
        .iter()
        .find(|(s, _)| s == syndrome)
        .map(|(_, h)| *h)
        .unwrap_or(ErrorHypothesis::Unidentifiable)
}

pub fn correct<T: Scalar, S: QuantumState<T>>(state: &S, hypothesis: &ErrorHypothesis) -> Result<S> {
    let fix = hypothesis.correction()?;
    let mut out = state.clone();
    out.apply_pauli(&fix)?;
    Ok(out)
}
