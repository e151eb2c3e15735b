use num_complex::Complex;

use super::density::DensityMatrix;
use super::gate::Gate;
use super::kernel::{self, complement, scatter_table, PauliMasks};
use super::pauli::PauliString;
use super::state::{check_gate, check_pauli, check_qubits, QuantumState, MAX_QUBITS};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// State vector over `num_qubits` qubits, big-endian: qubit 0 is the most
/// significant bit of the basis index.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T> {
    num_qubits: usize,
    amps: Vec<Complex<T>>,
}

pub(crate) fn log2_exact(len: usize) -> Result<usize> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::BadLength(len));
    }
    Ok(len.trailing_zeros() as usize)
}

impl<T: Scalar> PureState<T> {
    /// `|0…0⟩` on `num_qubits ∈ 1..=12` qubits.
    pub fn basis(num_qubits: usize) -> Result<Self> {
        Self::computational(num_qubits, 0)
    }

    pub fn computational(num_qubits: usize, index: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&num_qubits) {
            return Err(Error::QubitCount(num_qubits));
        }
        let mut amps = kernel::zeros(1 << num_qubits);
        if index >= amps.len() {
            return Err(Error::BadLength(index));
        }
        amps[index] = Complex::new(T::one(), T::zero());
        Ok(Self { num_qubits, amps })
    }

    /// Takes ownership of a normalized amplitude vector.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let num_qubits = log2_exact(amps.len())?;
        if num_qubits > MAX_QUBITS {
            return Err(Error::QubitCount(num_qubits));
        }
        let norm = kernel::norm_sqr(&amps);
        if (norm - T::one()).abs() > T::exact_tol() {
            return Err(Error::NotNormalized(norm.as_f64()));
        }
        Ok(Self { num_qubits, amps })
    }

    /// Normalizes `amps` first.
    pub fn from_unnormalized(mut amps: Vec<Complex<T>>) -> Result<Self> {
        let norm = kernel::norm_sqr(&amps).sqrt();
        if norm <= T::zero() {
            return Err(Error::NotNormalized(0.0));
        }
        for a in &mut amps {
            *a /= norm;
        }
        Self::from_amplitudes(amps)
    }

    /// Normalized superposition of the listed basis indices.
    pub fn from_sparse(num_qubits: usize, terms: &[(usize, Complex<T>)]) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&num_qubits) {
            return Err(Error::QubitCount(num_qubits));
        }
        let mut amps = kernel::zeros(1 << num_qubits);
        for &(i, a) in terms {
            *amps.get_mut(i).ok_or(Error::BadLength(i))? += a;
        }
        Self::from_unnormalized(amps)
    }

    pub(crate) fn from_raw(num_qubits: usize, amps: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(amps.len(), 1 << num_qubits);
        Self { num_qubits, amps }
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex<T> {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> T {
        kernel::norm_sqr(&self.amps)
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &PureState<T>) -> Result<Complex<T>> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch(self.num_qubits, other.num_qubits));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a.conj() * b
            }))
    }

    /// `self ⊗ other`; `self` occupies the leading qubits.
    pub fn tensor(&self, other: &PureState<T>) -> Result<Self> {
        let n = self.num_qubits + other.num_qubits;
        if n > MAX_QUBITS {
            return Err(Error::QubitCount(n));
        }
        let mut amps = Vec::with_capacity(1 << n);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Self::from_raw(n, amps))
    }

    /// Reorders qubits: qubit `i` of the result is qubit `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let n = self.num_qubits;
        if order.len() != n {
            return Err(Error::DimensionMismatch(order.len(), n));
        }
        check_qubits(order, n)?;
        let table = scatter_table(n, order);
        let mut amps = kernel::zeros(self.amps.len());
        for (j, a) in amps.iter_mut().enumerate() {
            *a = self.amps[table[j]];
        }
        Ok(Self::from_raw(n, amps))
    }

    /// Basis indices with `|amplitude|² > tol`, ascending.
    pub fn support(&self, tol: T) -> Vec<usize> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > tol)
            .map(|(i, _)| i)
            .collect()
    }

    /// Probability of every computational basis string.
    pub fn probabilities(&self) -> Vec<T> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

impl<T: Scalar> QuantumState<T> for PureState<T> {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn apply_unitary(&mut self, gate: &Gate<T>, targets: &[usize]) -> Result<()> {
        check_gate(gate, targets, self.num_qubits)?;
        kernel::apply_matrix(&mut self.amps, self.num_qubits, targets, gate.matrix());
        Ok(())
    }

    fn apply_pauli(&mut self, op: &PauliString) -> Result<()> {
        check_pauli(op, self.num_qubits)?;
        let masks = PauliMasks::compile(op, self.num_qubits, 0, false);
        kernel::apply_pauli(&mut self.amps, masks);
        Ok(())
    }

    fn expectation(&self, op: &PauliString) -> Result<T> {
        check_pauli(op, self.num_qubits)?;
        let masks = PauliMasks::compile(op, self.num_qubits, 0, false);
        let mut acc = Complex::new(T::zero(), T::zero());
        for (i, a) in self.amps.iter().enumerate() {
            acc += self.amps[i ^ masks.x].conj() * masks.coefficient::<T>(i) * a;
        }
        Ok(acc.re)
    }

    fn project(&self, op: &PauliString, sign: i8) -> Result<(T, Option<Self>)> {
        check_pauli(op, self.num_qubits)?;
        let masks = PauliMasks::compile(op, self.num_qubits, 0, false);
        let mut amps = self.amps.clone();
        kernel::project_pauli(&mut amps, masks, sign);
        let p = kernel::norm_sqr(&amps);
        if p < T::min_branch_prob() {
            return Ok((p, None));
        }
        let s = p.sqrt();
        amps.iter_mut().for_each(|a| *a /= s);
        Ok((p, Some(Self::from_raw(self.num_qubits, amps))))
    }

    fn contract(&self, qubits: &[usize], ket: &[Complex<T>]) -> Result<(T, Option<Self>)> {
        let n = self.num_qubits;
        check_qubits(qubits, n)?;
        if ket.len() != 1 << qubits.len() {
            return Err(Error::BadLength(ket.len()));
        }
        let rest = complement(n, qubits);
        let sel = scatter_table(n, qubits);
        let keep = scatter_table(n, &rest);
        let mut amps = kernel::zeros(keep.len());
        for (r, out) in amps.iter_mut().enumerate() {
            for (a, k) in ket.iter().enumerate() {
                *out += k.conj() * self.amps[sel[a] | keep[r]];
            }
        }
        let p = kernel::norm_sqr(&amps);
        if p < T::min_branch_prob() {
            return Ok((p, None));
        }
        let s = p.sqrt();
        amps.iter_mut().for_each(|a| *a /= s);
        Ok((p, Some(Self::from_raw(rest.len(), amps))))
    }

    fn partial_trace(&self, discard: &[usize]) -> Result<DensityMatrix<T>> {
        let n = self.num_qubits;
        check_qubits(discard, n)?;
        if discard.is_empty() {
            return Err(Error::EmptyDiscard);
        }
        if discard.len() == n {
            return Err(Error::DiscardAll);
        }
        let rest = complement(n, discard);
        let sel = scatter_table(n, discard);
        let keep = scatter_table(n, &rest);
        let dk = keep.len();
        let mut data = kernel::zeros(dk * dk);
        for r in 0..dk {
            for c in 0..dk {
                let mut acc = Complex::new(T::zero(), T::zero());
                for d in &sel {
                    acc += self.amps[d | keep[r]] * self.amps[d | keep[c]].conj();
                }
                data[r * dk + c] = acc;
            }
        }
        Ok(DensityMatrix::from_raw(rest.len(), data))
    }

    fn to_density(&self) -> DensityMatrix<T> {
        let d = self.amps.len();
        let mut data = kernel::zeros(d * d);
        for r in 0..d {
            for c in 0..d {
                data[r * d + c] = self.amps[r] * self.amps[c].conj();
            }
        }
        DensityMatrix::from_raw(self.num_qubits, data)
    }

    fn fidelity(&self, target: &PureState<T>) -> Result<T> {
        Ok(target.inner(self)?.norm_sqr())
    }
}
