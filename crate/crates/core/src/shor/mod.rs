//! Nine-qubit Shor code and its generalization to `n` blocks of `m` qubits
//! (quantum parity code): encoding, syndromes, correction and readout.

pub mod decode;
pub mod syndrome;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{Gate, PureState, QuantumState, MAX_QUBITS};
use crate::scalar::Scalar;

pub use decode::{
    decode_readout, derive_correction_table, Correction, DecodeResult, LossPattern, ReadoutMode,
    CORRECTION_TABLE,
};
pub use syndrome::{
    apply_flip_channel, correct, diagnose, measure_syndromes, sample_syndromes, stabilizers,
    syndrome_of_error, ErrorHypothesis, FlipKind, SyndromeRecord,
};

/// Normalized single-qubit input `α|0⟩ + β|1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogicalInput<T> {
    pub alpha: Complex<T>,
    pub beta: Complex<T>,
}

impl<T: Scalar> LogicalInput<T> {
    pub fn new(alpha: Complex<T>, beta: Complex<T>) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - T::one()).abs() > T::exact_tol() {
            return Err(Error::NotNormalized(norm.as_f64()));
        }
        Ok(Self { alpha, beta })
    }

    /// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
    pub fn from_bloch(theta: T, phi: T) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Bloch angles must be finite, got theta={theta} phi={phi}"
            )));
        }
        let half = theta * T::lit(0.5);
        let alpha = Complex::new(half.cos(), T::zero());
        let beta = Complex::from_polar(half.sin(), phi);
        Self::new(alpha, beta)
    }

    fn real(a: f64, b: f64) -> Self {
        Self {
            alpha: Complex::new(T::lit(a), T::zero()),
            beta: Complex::new(T::lit(b), T::zero()),
        }
    }

    /// `|H⟩ = |0⟩`
    pub fn h() -> Self {
        Self::real(1.0, 0.0)
    }

    /// `|V⟩ = |1⟩`
    pub fn v() -> Self {
        Self::real(0.0, 1.0)
    }

    /// `|D⟩ = |+⟩`
    pub fn d() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::real(s, s)
    }

    /// `|A⟩ = |−⟩`
    pub fn a() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::real(s, -s)
    }

    /// `|R⟩ = (|0⟩ + i|1⟩)/√2`
    pub fn r() -> Self {
        let s = T::lit(std::f64::consts::FRAC_1_SQRT_2);
        Self {
            alpha: Complex::new(s, T::zero()),
            beta: Complex::new(T::zero(), s),
        }
    }

    /// `|L⟩ = (|0⟩ − i|1⟩)/√2`
    pub fn l() -> Self {
        let s = T::lit(std::f64::consts::FRAC_1_SQRT_2);
        Self {
            alpha: Complex::new(s, T::zero()),
            beta: Complex::new(T::zero(), -s),
        }
    }

    /// The six polarization states `H, V, D, A, R, L` with their labels.
    pub fn cardinal() -> [(&'static str, Self); 6] {
        [
            ("H", Self::h()),
            ("V", Self::v()),
            ("D", Self::d()),
            ("A", Self::a()),
            ("R", Self::r()),
            ("L", Self::l()),
        ]
    }

    pub fn ket(&self) -> PureState<T> {
        PureState::from_unnormalized(vec![self.alpha, self.beta]).expect("normalized input")
    }
}

/// Block-major assignment of `n_blocks × block_size` code qubits to
/// register indices: `qubit_of(b, k) = b·m + k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeLayout {
    n_blocks: usize,
    block_size: usize,
}

impl CodeLayout {
    pub fn new(n_blocks: usize, block_size: usize) -> Result<Self> {
        if n_blocks == 0 || block_size == 0 {
            return Err(Error::InvalidCode(format!(
                "n = {n_blocks} and m = {block_size} must both be at least 1"
            )));
        }
        if n_blocks * block_size > MAX_QUBITS {
            return Err(Error::InvalidCode(format!(
                "n·m = {} exceeds {MAX_QUBITS} qubits",
                n_blocks * block_size
            )));
        }
        Ok(Self {
            n_blocks,
            block_size,
        })
    }

    /// Blocks `{0,1,2}, {3,4,5}, {6,7,8}`.
    pub fn shor() -> Self {
        Self {
            n_blocks: 3,
            block_size: 3,
        }
    }

    pub fn n_blocks(&self) -> usize {
        self.n_blocks
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn num_qubits(&self) -> usize {
        self.n_blocks * self.block_size
    }

    pub fn qubit_of(&self, block: usize, position: usize) -> usize {
        assert!(block < self.n_blocks && position < self.block_size);
        block * self.block_size + position
    }

    /// `(block, position)` of a register index.
    pub fn locate(&self, qubit: usize) -> (usize, usize) {
        assert!(qubit < self.num_qubits());
        (qubit / self.block_size, qubit % self.block_size)
    }

    pub fn block(&self, block: usize) -> Vec<usize> {
        (0..self.block_size)
            .map(|k| self.qubit_of(block, k))
            .collect()
    }

    pub fn leaders(&self) -> Vec<usize> {
        (0..self.n_blocks).map(|b| self.qubit_of(b, 0)).collect()
    }

    /// Generators: adjacent `ZZ` pairs inside each block, then `X^{⊗2m}` on
    /// each pair of neighbouring blocks.
    pub fn stabilizers(&self) -> Vec<crate::qsim::PauliString> {
        use crate::qsim::PauliString;
        let mut out = Vec::new();
        for b in 0..self.n_blocks {
            for k in 0..self.block_size.saturating_sub(1) {
                out.push(PauliString::zs(&[self.qubit_of(b, k), self.qubit_of(b, k + 1)]));
            }
        }
        for b in 0..self.n_blocks.saturating_sub(1) {
            let mut qs = self.block(b);
            qs.extend(self.block(b + 1));
            out.push(PauliString::xs(&qs));
        }
        out
    }
}

/// One gate layer of the encoding circuit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CircuitStep {
    /// CNOTs from `control` onto each target, all targets starting in `|0⟩`.
    Encoder { control: usize, targets: Vec<usize> },
    Hadamard(usize),
}

/// Encoder onto the other block leaders, Hadamard on every leader, then one
/// encoder per block.
pub fn encoding_circuit(layout: &CodeLayout) -> Vec<CircuitStep> {
    let leaders = layout.leaders();
    let mut steps = vec![CircuitStep::Encoder {
        control: leaders[0],
        targets: leaders[1..].to_vec(),
    }];
    steps.extend(leaders.iter().map(|&q| CircuitStep::Hadamard(q)));
    for b in 0..layout.n_blocks() {
        let block = layout.block(b);
        steps.push(CircuitStep::Encoder {
            control: block[0],
            targets: block[1..].to_vec(),
        });
    }
    steps.retain(|s| !matches!(s, CircuitStep::Encoder { targets, .. } if targets.is_empty()));
    steps
}

pub fn apply_step<T: Scalar, S: QuantumState<T>>(state: &mut S, step: &CircuitStep) -> Result<()> {
    match step {
        CircuitStep::Encoder { control, targets } => {
            let cnot = Gate::cnot();
            for &t in targets {
                state.apply_unitary(&cnot, &[*control, t])?;
            }
            Ok(())
        }
        CircuitStep::Hadamard(q) => state.apply_unitary(&Gate::h(), &[*q]),
    }
}

pub fn run_circuit<T: Scalar, S: QuantumState<T>>(state: &mut S, steps: &[CircuitStep]) -> Result<()> {
    steps.iter().try_for_each(|s| apply_step(state, s))
}

/// Runs `steps` backwards; every step is self-inverse.
pub fn run_inverse<T: Scalar, S: QuantumState<T>>(state: &mut S, steps: &[CircuitStep]) -> Result<()> {
    steps.iter().rev().try_for_each(|s| apply_step(state, s))
}

/// `input ⊗ |0…0⟩` on `num_qubits` qubits.
fn padded_input<T: Scalar>(input: &LogicalInput<T>, num_qubits: usize) -> Result<PureState<T>> {
    if num_qubits == 1 {
        return Ok(input.ket());
    }
    input.ket().tensor(&PureState::basis(num_qubits - 1)?)
}

/// `α|000⟩ + β|111⟩` from the two-CNOT encoder.
pub fn encode_block<T: Scalar>(input: &LogicalInput<T>) -> Result<PureState<T>> {
    let mut state = padded_input(input, 3)?;
    apply_step(
        &mut state,
        &CircuitStep::Encoder {
            control: 0,
            targets: vec![1, 2],
        },
    )?;
    Ok(state)
}

/// `α|0_L⟩^{⊗n} + β|1_L⟩^{⊗n}` with `|0/1_L⟩ = (|0⟩^{⊗m} ± |1⟩^{⊗m})/√2`.
pub fn encode_qpc<T: Scalar>(input: &LogicalInput<T>, n: usize, m: usize) -> Result<PureState<T>> {
    let layout = CodeLayout::new(n, m)?;
    let mut state = padded_input(input, layout.num_qubits())?;
    run_circuit(&mut state, &encoding_circuit(&layout))?;
    Ok(state)
}

/// Nine-qubit Shor codeword of `input`.
pub fn encode_shor<T: Scalar>(input: &LogicalInput<T>) -> Result<PureState<T>> {
    encode_qpc(input, 3, 3)
}

/// Shor codeword of `|D⟩ = |+⟩`: `[(|000⟩+|111⟩)^{⊗3} + (|000⟩−|111⟩)^{⊗3}]/4`.
pub fn d_state<T: Scalar>() -> PureState<T> {
    encode_shor(&LogicalInput::d()).expect("fixed input")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::{kernel::zeros, PauliString};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    /// Expands α|0_L⟩^n + β|1_L⟩^n term by term, independent of the circuit.
    fn expansion_oracle(input: &LogicalInput<f64>, n: usize, m: usize) -> Vec<Complex<f64>> {
        let nm = n * m;
        let mut amps = zeros::<f64>(1 << nm);
        let block_norm = (0.5f64).sqrt().powi(n as i32);
        let ones = (1usize << m) - 1;
        for pattern in 0..1usize << n {
            // pattern bit b (MSB = block 0) selects |1…1⟩ in block b
            let mut index = 0;
            let mut flips = 0;
            for b in 0..n {
                let bit = pattern >> (n - 1 - b) & 1;
                index = (index << m) | if bit == 1 { ones } else { 0 };
                flips += bit;
            }
            let minus = if flips % 2 == 1 { -1.0 } else { 1.0 };
            amps[index] += (input.alpha + input.beta * minus) * block_norm;
        }
        amps
    }

    fn close(a: &[Complex<f64>], b: &[Complex<f64>], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() < tol)
    }

    #[test]
    fn encode_block_examples() {
        let zero = encode_block(&LogicalInput::<f64>::h()).unwrap();
        assert_eq!(zero.support(1e-12), vec![0]);
        let ghz = encode_block(&LogicalInput::<f64>::d()).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((ghz.amplitude(0).re - s).abs() < 1e-12 && (ghz.amplitude(7).re - s).abs() < 1e-12);
        // direct matrix product: CNOT(0,2)·CNOT(0,1)·(ψ ⊗ |00⟩) for ψ = |R⟩
        let r = encode_block(&LogicalInput::r()).unwrap();
        let mut want = zeros::<f64>(8);
        want[0] = c(s, 0.0);
        want[7] = c(0.0, s);
        assert!(close(r.amplitudes(), &want, 1e-12));
    }

    #[test]
    fn encode_shor_examples() {
        let h = encode_shor(&LogicalInput::<f64>::h()).unwrap();
        let v = encode_shor(&LogicalInput::<f64>::v()).unwrap();
        let w = 1.0 / (2.0 * 2f64.sqrt());
        for s in [&h, &v] {
            assert_eq!(s.support(1e-12).len(), 8);
        }
        assert!((h.amplitude(0b111_111_111).re - w).abs() < 1e-12);
        assert!((v.amplitude(0b111_111_111).re + w).abs() < 1e-12);
        assert!((v.amplitude(0b111_000_000).re + w).abs() < 1e-12);
        assert!((v.amplitude(0b111_111_000).re - w).abs() < 1e-12);
    }

    #[test]
    fn d_state_matches_expansion() {
        // |D⟩_l = ¼[(|000⟩+|111⟩)^{⊗3} + (|000⟩−|111⟩)^{⊗3}]: even number of |111⟩ blocks, weight ½
        let d = d_state::<f64>();
        let support = d.support(1e-12);
        assert_eq!(
            support,
            vec![0b000_000_000, 0b000_111_111, 0b111_000_111, 0b111_111_000]
        );
        for i in support {
            assert!((d.amplitude(i).re - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn qpc_matches_expansion_oracle() {
        for (n, m) in [(1, 1), (2, 2), (3, 3), (2, 3), (4, 2), (3, 1), (1, 4)] {
            for (_, input) in LogicalInput::<f64>::cardinal() {
                let got = encode_qpc(&input, n, m).unwrap();
                assert!(close(got.amplitudes(), &expansion_oracle(&input, n, m), 1e-12));
            }
        }
    }

    #[test]
    fn qpc_small_examples() {
        // (1,1) is H applied to the input
        let input = LogicalInput::<f64>::from_bloch(1.1, 0.4).unwrap();
        let mut want = input.ket();
        want.apply_unitary(&Gate::h(), &[0]).unwrap();
        assert!(close(
            encode_qpc(&input, 1, 1).unwrap().amplitudes(),
            want.amplitudes(),
            1e-12
        ));
        // (2,2) on |0⟩: (|00⟩+|11⟩)(|00⟩+|11⟩)/2
        let s = encode_qpc(&LogicalInput::<f64>::h(), 2, 2).unwrap();
        assert_eq!(s.support(1e-12), vec![0b0000, 0b0011, 0b1100, 0b1111]);
    }

    #[test]
    fn qpc_3x3_is_shor() {
        let input = LogicalInput::<f64>::from_bloch(0.7, 2.0).unwrap();
        assert!(close(
            encode_qpc(&input, 3, 3).unwrap().amplitudes(),
            encode_shor(&input).unwrap().amplitudes(),
            1e-12
        ));
    }

    #[test]
    fn qpc_size_cap() {
        assert!(encode_qpc(&LogicalInput::<f64>::h(), 4, 4).is_err());
        assert!(CodeLayout::new(0, 3).is_err());
    }

    #[test]
    fn unnormalized_input_rejected() {
        assert!(LogicalInput::new(c(1.0, 0.0), c(1.0, 0.0)).is_err());
        assert!(LogicalInput::<f64>::from_bloch(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn generalized_stabilizers_hold() {
        for (n, m) in [(2, 2), (3, 3), (4, 3), (2, 5)] {
            let layout = CodeLayout::new(n, m).unwrap();
            let s = encode_qpc(&LogicalInput::<f64>::from_bloch(0.3, 1.0).unwrap(), n, m).unwrap();
            for g in layout.stabilizers() {
                assert!((s.expectation(&g).unwrap() - 1.0).abs() < 1e-10, "{g}");
            }
        }
        assert_eq!(CodeLayout::shor().stabilizers(), stabilizers());
        let _ = PauliString::identity();
    }

    #[test]
    fn f32_encoding_agrees() {
        let s32 = d_state::<f32>();
        let s64 = d_state::<f64>();
        for (a, b) in s32.amplitudes().iter().zip(s64.amplitudes()) {
            assert!((a.re as f64 - b.re).abs() < 1e-6);
        }
    }
}
