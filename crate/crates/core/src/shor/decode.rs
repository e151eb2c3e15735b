//! Readout of the logical state onto qubit 0 by measuring every other
//! surviving qubit.
//!
//! Surviving qubits of blocks 1 and 2 are measured in `Z`, qubits 1 and 2 of
//! block 0 in `X`. With `s` the parity of the two outer block values and `t`
//! the parity of the `X` outcomes, qubit 0 is left in `H·X^t·Z^s|ψ⟩`; the
//! decoder applies `H` and then the correction `CORRECTION_TABLE[s][t]`.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{encode_shor, CodeLayout, LogicalInput};
use crate::error::{Error, Result};
use crate::qsim::{
    measure_out, Basis, DensityMatrix, Gate, MeasurementRecord, Outcome, Pauli, PauliString,
    QState, QuantumState,
};
use crate::rng::SimRng;
use crate::scalar::Scalar;

/// Set of lost register indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LossPattern {
    lost: BTreeSet<usize>,
}

impl LossPattern {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(lost: impl IntoIterator<Item = usize>) -> Self {
        Self {
            lost: lost.into_iter().collect(),
        }
    }

    pub fn contains(&self, qubit: usize) -> bool {
        self.lost.contains(&qubit)
    }

    pub fn lost(&self) -> Vec<usize> {
        self.lost.iter().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.lost.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lost.is_empty()
    }

    /// Errors when the output qubit or a whole block is gone; otherwise
    /// returns whether the readout loses its guarantee (loss inside block 0).
    pub fn check_readout(&self, layout: &CodeLayout) -> Result<bool> {
        if let Some(&q) = self.lost.iter().find(|&&q| q >= layout.num_qubits()) {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                num_qubits: layout.num_qubits(),
            });
        }
        if self.contains(0) {
            return Err(Error::OutputQubitLost);
        }
        for b in 0..layout.n_blocks() {
            if layout.block(b).iter().all(|q| self.contains(*q)) {
                return Err(Error::BlockFullyLost { block: b });
            }
        }
        Ok(layout.block(0).iter().any(|q| self.contains(*q)))
    }
}

/// Pauli correction applied to the output qubit after the fixed Hadamard.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Correction {
    I,
    Z,
    X,
    /// `Z·X`: X first, then Z.
    ZX,
}

impl Correction {
    pub const ALL: [Correction; 4] = [Correction::I, Correction::Z, Correction::X, Correction::ZX];

    pub fn pauli(self, qubit: usize) -> PauliString {
        match self {
            Correction::I => PauliString::identity(),
            Correction::Z => PauliString::single(qubit, Pauli::Z),
            Correction::X => PauliString::single(qubit, Pauli::X),
            // ZX = iY; the global phase is dropped
            Correction::ZX => PauliString::single(qubit, Pauli::Y),
        }
    }
}

/// Correction indexed by `[s][t]`. Regenerated by [`derive_correction_table`].
pub const CORRECTION_TABLE: [[Correction; 2]; 2] = [
    [Correction::I, Correction::X],
    [Correction::Z, Correction::ZX],
];

#[derive(Debug, Clone)]
pub struct DecodeResult<T> {
    /// State of the output qubit.
    pub output: DensityMatrix<T>,
    pub correction: Correction,
    pub transcript: Vec<MeasurementRecord<T>>,
    /// Probability of this measurement branch.
    pub probability: T,
    /// Set when block 0 lost a qubit other than the output.
    pub degraded: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecodeReport<T> {
    pub fidelity: T,
    pub probability: T,
    pub correction: Correction,
    pub degraded: bool,
    pub transcript: Vec<MeasurementRecord<T>>,
}

impl<T: Scalar> DecodeResult<T> {
    pub fn fidelity(&self, input: &LogicalInput<T>) -> T {
        self.output.fidelity(&input.ket()).expect("single-qubit output")
    }

    pub fn report(&self, input: &LogicalInput<T>) -> DecodeReport<T> {
        DecodeReport {
            fidelity: self.fidelity(input),
            probability: self.probability,
            correction: self.correction,
            degraded: self.degraded,
            transcript: self.transcript.clone(),
        }
    }
}

pub enum ReadoutMode<'a> {
    /// Every branch with non-negligible probability.
    Enumerate,
    /// One branch; one uniform variate per measured qubit.
    Sample(&'a mut SimRng),
    /// One branch with outcomes given in measurement order.
    Forced(&'a [Outcome]),
}

/// Block value read from `Z` outcomes: majority vote, ties to the first.
pub(crate) fn block_value(outcomes: &[Outcome]) -> u8 {
    let ones = outcomes.iter().filter(|o| **o == Outcome::Minus).count();
    let zeros = outcomes.len() - ones;
    match ones.cmp(&zeros) {
        std::cmp::Ordering::Greater => 1,
        std::cmp::Ordering::Less => 0,
        std::cmp::Ordering::Equal => outcomes.first().map_or(0, |o| o.bit()),
    }
}

struct Leaf<T> {
    /// Output qubit after the fixed Hadamard, before correction.
    state: QState<T>,
    transcript: Vec<MeasurementRecord<T>>,
    probability: T,
    s: u8,
    t: u8,
}

fn plan(layout: &CodeLayout, losses: &LossPattern) -> Vec<(usize, Basis)> {
    let mut steps = Vec::new();
    for b in 1..layout.n_blocks() {
        for q in layout.block(b) {
            if !losses.contains(q) {
                steps.push((q, Basis::Z));
            }
        }
    }
    for q in layout.block(0).into_iter().skip(1) {
        if !losses.contains(q) {
            steps.push((q, Basis::X));
        }
    }
    steps
}

fn finish<T: Scalar>(
    layout: &CodeLayout,
    mut state: QState<T>,
    transcript: Vec<MeasurementRecord<T>>,
    probability: T,
) -> Result<Leaf<T>> {
    debug_assert_eq!(state.num_qubits(), 1);
    state.apply_unitary(&Gate::h(), &[0])?;
    let mut s = 0;
    for b in 1..layout.n_blocks() {
        let block = layout.block(b);
        let zs: Vec<Outcome> = transcript
            .iter()
            .filter(|r| r.basis == Basis::Z && block.contains(&r.qubit))
            .map(|r| r.outcome)
            .collect();
        s ^= block_value(&zs);
    }
    let t = transcript
        .iter()
        .filter(|r| r.basis == Basis::X)
        .fold(0, |acc, r| acc ^ r.outcome.bit());
    Ok(Leaf {
        state,
        transcript,
        probability,
        s,
        t,
    })
}

enum Chooser<'a> {
    All,
    Sample(&'a mut SimRng),
    Forced(&'a [Outcome]),
}

fn walk<T: Scalar>(
    layout: &CodeLayout,
    state: QState<T>,
    alive: Vec<usize>,
    steps: &[(usize, Basis)],
    transcript: Vec<MeasurementRecord<T>>,
    probability: T,
    chooser: &mut Chooser<'_>,
    leaves: &mut Vec<Leaf<T>>,
) -> Result<()> {
    let Some(&(qubit, basis)) = steps.first() else {
        leaves.push(finish(layout, state, transcript, probability)?);
        return Ok(());
    };
    let pos = alive.iter().position(|&q| q == qubit).expect("planned qubit alive");
    let mut rest_alive = alive.clone();
    rest_alive.remove(pos);

    let branches: Vec<(Outcome, T, Option<QState<T>>)> = Outcome::BOTH
        .iter()
        .map(|&o| measure_out(&state, pos, basis, o).map(|(p, s)| (o, p, s)))
        .collect::<Result<_>>()?;

    let chosen: Vec<(Outcome, T, Option<QState<T>>)> = match chooser {
        Chooser::All => branches,
        Chooser::Forced(outcomes) => {
            let step = transcript.len();
            let want = *outcomes
                .get(step)
                .ok_or_else(|| Error::InvalidParameter(format!("missing forced outcome {step}")))?;
            let (o, p, s) = branches.into_iter().find(|b| b.0 == want).expect("both outcomes");
            if s.is_none() {
                return Err(Error::ImpossibleOutcome(p.as_f64()));
            }
            vec![(o, p, s)]
        }
        Chooser::Sample(rng) => {
            let u: f64 = rng.random();
            let p_plus = branches[0].1.as_f64();
            let pick = if u < p_plus && branches[0].2.is_some() || branches[1].2.is_none() {
                0
            } else {
                1
            };
            vec![branches.into_iter().nth(pick).expect("two branches")]
        }
    };

    for (outcome, p, post) in chosen {
        let Some(post) = post else { continue };
        let mut t = transcript.clone();
        t.push(MeasurementRecord {
            qubit,
            basis,
            outcome,
            probability: p,
        });
        walk(layout, post, rest_alive.clone(), &steps[1..], t, probability * p, chooser, leaves)?;
    }
    Ok(())
}

fn leaves<T: Scalar>(
    state: &QState<T>,
    losses: &LossPattern,
    chooser: &mut Chooser<'_>,
) -> Result<(bool, Vec<Leaf<T>>)> {
    let layout = CodeLayout::shor();
    if state.num_qubits() != layout.num_qubits() {
        return Err(Error::DimensionMismatch(state.num_qubits(), layout.num_qubits()));
    }
    let degraded = losses.check_readout(&layout)?;
    let reduced = state.lose(&losses.lost())?;
    let alive: Vec<usize> = (0..layout.num_qubits()).filter(|q| !losses.contains(*q)).collect();
    let steps = plan(&layout, losses);
    let mut out = Vec::new();
    walk(&layout, reduced, alive, &steps, Vec::new(), T::one(), chooser, &mut out)?;
    Ok((degraded, out))
}

/// Decodes a nine-qubit code state after removing `losses`.
pub fn decode_readout<T: Scalar>(
    state: &QState<T>,
    losses: &LossPattern,
    mode: ReadoutMode<'_>,
) -> Result<Vec<DecodeResult<T>>> {
    let mut chooser = match mode {
        ReadoutMode::Enumerate => Chooser::All,
        ReadoutMode::Sample(rng) => Chooser::Sample(rng),
        ReadoutMode::Forced(o) => Chooser::Forced(o),
    };
    let (degraded, leaves) = leaves(state, losses, &mut chooser)?;
    leaves
        .into_iter()
        .map(|leaf| {
            let correction = CORRECTION_TABLE[leaf.s as usize][leaf.t as usize];
            let mut out = leaf.state;
            out.apply_pauli(&correction.pauli(0))?;
            Ok(DecodeResult {
                output: out.into_density(),
                correction,
                transcript: leaf.transcript,
                probability: leaf.probability,
                degraded,
            })
        })
        .collect()
}

/// Finds, for every `(s, t)`, the unique correction that returns three
/// non-coplanar probe inputs exactly on every lossless branch.
pub fn derive_correction_table() -> Result<[[Correction; 2]; 2]> {
    let probes = [
        LogicalInput::<f64>::h(),
        LogicalInput::d(),
        LogicalInput::r(),
    ];
    let mut allowed = [[Correction::ALL.to_vec(), Correction::ALL.to_vec()], [
        Correction::ALL.to_vec(),
        Correction::ALL.to_vec(),
    ]];
    for probe in &probes {
        let code: QState<f64> = encode_shor(probe)?.into();
        let (_, leaves) = leaves(&code, &LossPattern::none(), &mut Chooser::All)?;
        for leaf in leaves {
            allowed[leaf.s as usize][leaf.t as usize].retain(|c| {
                let mut s = leaf.state.clone();
                s.apply_pauli(&c.pauli(0)).expect("one qubit");
                (s.fidelity(&probe.ket()).expect("one qubit") - 1.0).abs() < f64::EXACT_TOL
            });
        }
    }
    let mut table = [[Correction::I; 2]; 2];
    for s in 0..2 {
        for t in 0..2 {
            match allowed[s][t].as_slice() {
                [only] => table[s][t] = *only,
                other => {
                    return Err(Error::InvalidScenario(format!(
                        "correction for s={s} t={t} not unique: {other:?}"
                    )))
                }
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::run_rng;
    use crate::shor::run_inverse;
    use crate::shor::encoding_circuit;

    fn inputs() -> Vec<LogicalInput<f64>> {
        let mut v: Vec<_> = LogicalInput::cardinal().iter().map(|(_, i)| *i).collect();
        v.push(LogicalInput::from_bloch(1.234, -0.77).unwrap());
        v
    }

    #[test]
    fn frozen_table_matches_derivation() {
        assert_eq!(derive_correction_table().unwrap(), CORRECTION_TABLE);
    }

    #[test]
    fn lossless_decode_is_exact() {
        for input in inputs() {
            let code: QState<f64> = encode_shor(&input).unwrap().into();
            let branches = decode_readout(&code, &LossPattern::none(), ReadoutMode::Enumerate).unwrap();
            // 2 outcomes per outer block, 4 for the two X measurements
            assert_eq!(branches.len(), 16);
            let total: f64 = branches.iter().map(|b| b.probability).sum();
            assert!((total - 1.0).abs() < 1e-10);
            for b in &branches {
                assert!((b.fidelity(&input) - 1.0).abs() < 1e-10);
                assert!(!b.degraded);
                assert_eq!(b.transcript.len(), 8);
            }
        }
    }

    #[test]
    fn matches_inverse_circuit_oracle() {
        let input = LogicalInput::from_bloch(0.9, 2.2).unwrap();
        let code = encode_shor(&input).unwrap();
        let mut undone = code.clone();
        run_inverse(&mut undone, &encoding_circuit(&CodeLayout::shor())).unwrap();
        let oracle = undone.partial_trace(&(1..9).collect::<Vec<_>>()).unwrap();
        let state: QState<f64> = code.into();
        for b in decode_readout(&state, &LossPattern::none(), ReadoutMode::Enumerate).unwrap() {
            for (x, y) in b.output.entries().iter().zip(oracle.entries()) {
                assert!((x - y).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn tolerates_loss_of_six_and_four_six() {
        for lost in [vec![5], vec![3, 5]] {
            let losses = LossPattern::new(lost);
            for input in [LogicalInput::d(), LogicalInput::a()] {
                let code: QState<f64> = encode_shor(&input).unwrap().into();
                let branches = decode_readout(&code, &losses, ReadoutMode::Enumerate).unwrap();
                let total: f64 = branches.iter().map(|b| b.probability).sum();
                assert!((total - 1.0).abs() < 1e-10);
                for b in branches {
                    assert!((b.fidelity(&input) - 1.0).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn precondition_errors() {
        let code: QState<f64> = encode_shor(&LogicalInput::d()).unwrap().into();
        let run = |l: Vec<usize>| decode_readout(&code, &LossPattern::new(l), ReadoutMode::Enumerate);
        assert_eq!(run(vec![0]).unwrap_err(), Error::OutputQubitLost);
        assert_eq!(run(vec![3, 4, 5]).unwrap_err(), Error::BlockFullyLost { block: 1 });
        assert!(matches!(run(vec![9]), Err(Error::QubitOutOfRange { .. })));
    }

    #[test]
    fn block_zero_loss_is_degraded() {
        // losing qubit 1 dephases the output in the X basis: |D⟩ survives, |H⟩ is scrambled
        for (input, want) in [(LogicalInput::d(), 1.0), (LogicalInput::h(), 0.5)] {
            let code: QState<f64> = encode_shor(&input).unwrap().into();
            let branches =
                decode_readout(&code, &LossPattern::new([1]), ReadoutMode::Enumerate).unwrap();
            assert!(branches.iter().all(|b| b.degraded));
            for b in branches {
                assert!((b.fidelity(&input) - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn sample_and_forced_agree() {
        let input = LogicalInput::r();
        let code: QState<f64> = encode_shor(&input).unwrap().into();
        let mut rng = run_rng(11);
        let sampled = decode_readout(&code, &LossPattern::new([5]), ReadoutMode::Sample(&mut rng)).unwrap();
        assert_eq!(sampled.len(), 1);
        let outcomes: Vec<Outcome> = sampled[0].transcript.iter().map(|r| r.outcome).collect();
        let forced = decode_readout(&code, &LossPattern::new([5]), ReadoutMode::Forced(&outcomes)).unwrap();
        assert_eq!(forced[0].correction, sampled[0].correction);
        assert!((forced[0].probability - sampled[0].probability).abs() < 1e-12);
        assert!((sampled[0].fidelity(&input) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn impossible_forced_branch() {
        let code: QState<f64> = encode_shor(&LogicalInput::h()).unwrap().into();
        // block 1 reads 0 then 1: outside the code space
        let outcomes = [Outcome::Plus, Outcome::Minus];
        assert!(matches!(
            decode_readout(&code, &LossPattern::none(), ReadoutMode::Forced(&outcomes)),
            Err(Error::ImpossibleOutcome(_))
        ));
    }

    #[test]
    fn majority_block_value() {
        use Outcome::*;
        assert_eq!(block_value(&[Plus, Plus, Minus]), 0);
        assert_eq!(block_value(&[Minus, Minus, Plus]), 1);
        assert_eq!(block_value(&[Minus, Plus]), 1);
        assert_eq!(block_value(&[]), 0);
    }
}
