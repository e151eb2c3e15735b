use nalgebra::DMatrix;
use num_complex::Complex;

use super::gate::Gate;
use super::kernel::{self, complement, scatter_table, PauliMasks};
use super::pauli::PauliString;
use super::pure::{log2_exact, PureState};
use super::state::{check_gate, check_pauli, check_qubits, QuantumState, MAX_QUBITS};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major `2^n × 2^n` density matrix with the same big-endian qubit order
/// as [`PureState`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    num_qubits: usize,
    data: Vec<Complex<T>>,
}

impl<T: Scalar> DensityMatrix<T> {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn from_entries(entries: Vec<Complex<T>>) -> Result<Self> {
        let dim2 = entries.len();
        let dim = (dim2 as f64).sqrt().round() as usize;
        if dim * dim != dim2 {
            return Err(Error::BadLength(dim2));
        }
        let n = log2_exact(dim)?;
        if !(1..=MAX_QUBITS).contains(&n) {
            return Err(Error::QubitCount(n));
        }
        let rho = Self::from_raw(n, entries);
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_raw(num_qubits: usize, data: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(data.len(), 1 << (2 * num_qubits));
        Self { num_qubits, data }
    }

    pub fn maximally_mixed(num_qubits: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&num_qubits) {
            return Err(Error::QubitCount(num_qubits));
        }
        let d = 1usize << num_qubits;
        let mut data = kernel::zeros(d * d);
        let w = T::one() / T::from_usize(d).unwrap();
        for i in 0..d {
            data[i * d + i] = Complex::new(w, T::zero());
        }
        Ok(Self::from_raw(num_qubits, data))
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex<T> {
        self.data[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex<T> {
        let d = self.dim();
        (0..d).fold(Complex::new(T::zero(), T::zero()), |acc, i| acc + self.data[i * d + i])
    }

    /// Diagonal of the matrix: computational-basis probabilities.
    pub fn probabilities(&self) -> Vec<T> {
        let d = self.dim();
        (0..d).map(|i| self.data[i * d + i].re).collect()
    }

    pub fn purity(&self) -> T {
        // tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        let d = self.dim();
        let mut dev = 0.0f64;
        for r in 0..d {
            for c in r..d {
                let delta = self.data[r * d + c] - self.data[c * d + r].conj();
                dev = dev.max(delta.norm().as_f64());
            }
        }
        dev
    }

    /// Smallest eigenvalue, computed in f64.
    pub fn min_eigenvalue(&self) -> f64 {
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |r, c| {
            let z = self.data[r * d + c];
            Complex::new(z.re.as_f64(), z.im.as_f64())
        });
        m.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_deviation();
        if herm > T::EXACT_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = self.trace();
        if (tr.re - T::one()).abs() > T::exact_tol() || tr.im.abs() > T::exact_tol() {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
        }
        let min = self.min_eigenvalue();
        if min < -T::PSD_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min:e}"
            )));
        }
        Ok(())
    }

    pub fn tensor(&self, other: &DensityMatrix<T>) -> Result<Self> {
        let n = self.num_qubits + other.num_qubits;
        if n > MAX_QUBITS {
            return Err(Error::QubitCount(n));
        }
        let (da, db) = (self.dim(), other.dim());
        let d = da * db;
        let mut data = kernel::zeros(d * d);
        for ar in 0..da {
            for ac in 0..da {
                let a = self.data[ar * da + ac];
                for br in 0..db {
                    for bc in 0..db {
                        data[(ar * db + br) * d + ac * db + bc] = a * other.data[br * db + bc];
                    }
                }
            }
        }
        Ok(Self::from_raw(n, data))
    }

    /// `(1 − p) ρ + p PρP`.
    pub fn mix_pauli(&mut self, op: &PauliString, p: T) -> Result<()> {
        if !(T::zero()..=T::one()).contains(&p) {
            return Err(Error::InvalidProbability(p.as_f64()));
        }
        let mut flipped = self.clone();
        flipped.apply_pauli(op)?;
        let keep = T::one() - p;
        for (a, b) in self.data.iter_mut().zip(&flipped.data) {
            *a = *a * keep + *b * p;
        }
        Ok(())
    }

    /// Scales the coherence between the Z eigenstates of `qubit` by
    /// `visibility`: `ρ → V ρ + (1 − V)(ρ + ZρZ)/2`.
    pub fn dephase(&mut self, qubit: usize, visibility: T) -> Result<()> {
        if !(T::zero()..=T::one()).contains(&visibility) {
            return Err(Error::InvalidProbability(visibility.as_f64()));
        }
        let p = (T::one() - visibility) * T::lit(0.5);
        self.mix_pauli(&PauliString::zs(&[qubit]), p)
    }

    /// Element-wise linear combination `a·self + b·other`.
    pub fn combine(&self, a: T, other: &DensityMatrix<T>, b: T) -> Result<Self> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch(self.num_qubits, other.num_qubits));
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| *x * a + *y * b)
            .collect();
        Ok(Self::from_raw(self.num_qubits, data))
    }

    fn virtual_bits(&self) -> usize {
        2 * self.num_qubits
    }

    fn renormalized(mut self) -> (T, Option<Self>) {
        let p = self.trace().re;
        if p < T::min_branch_prob() {
            return (p, None);
        }
        self.data.iter_mut().for_each(|z| *z /= p);
        (p, Some(self))
    }
}

impl<T: Scalar> QuantumState<T> for DensityMatrix<T> {
    fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    fn apply_unitary(&mut self, gate: &Gate<T>, targets: &[usize]) -> Result<()> {
        let n = self.num_qubits;
        check_gate(gate, targets, n)?;
        let cols: Vec<usize> = targets.iter().map(|q| q + n).collect();
        let vb = self.virtual_bits();
        kernel::apply_matrix(&mut self.data, vb, targets, gate.matrix());
        kernel::apply_matrix(&mut self.data, vb, &cols, gate.conjugate().matrix());
        Ok(())
    }

    fn apply_pauli(&mut self, op: &PauliString) -> Result<()> {
        let n = self.num_qubits;
        check_pauli(op, n)?;
        let vb = self.virtual_bits();
        kernel::apply_pauli(&mut self.data, PauliMasks::compile(op, vb, 0, false));
        kernel::apply_pauli(&mut self.data, PauliMasks::compile(op, vb, n, true));
        Ok(())
    }

    fn expectation(&self, op: &PauliString) -> Result<T> {
        check_pauli(op, self.num_qubits)?;
        let masks = PauliMasks::compile(op, self.num_qubits, 0, false);
        let d = self.dim();
        let mut acc = Complex::new(T::zero(), T::zero());
        for k in 0..d {
            acc += masks.coefficient::<T>(k) * self.data[k * d + (k ^ masks.x)];
        }
        Ok(acc.re)
    }

    fn project(&self, op: &PauliString, sign: i8) -> Result<(T, Option<Self>)> {
        let n = self.num_qubits;
        check_pauli(op, n)?;
        let vb = self.virtual_bits();
        let mut out = self.clone();
        kernel::project_pauli(&mut out.data, PauliMasks::compile(op, vb, 0, false), sign);
        kernel::project_pauli(&mut out.data, PauliMasks::compile(op, vb, n, true), sign);
        Ok(out.renormalized())
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
        let (d, dk) = (self.dim(), keep.len());
        // weights w[a][b] = conj(k_a) k_b
        let weights: Vec<(usize, usize, Complex<T>)> = (0..ket.len())
            .flat_map(|a| (0..ket.len()).map(move |b| (a, b)))
            .map(|(a, b)| (sel[a], sel[b], ket[a].conj() * ket[b]))
            .filter(|(_, _, w)| w.norm_sqr() > T::zero())
            .collect();
        let mut data = kernel::zeros(dk * dk);
        for r in 0..dk {
            for c in 0..dk {
                let mut acc = Complex::new(T::zero(), T::zero());
                for &(sa, sb, w) in &weights {
                    acc += w * self.data[(sa | keep[r]) * d + (sb | keep[c])];
                }
                data[r * dk + c] = acc;
            }
        }
        Ok(Self::from_raw(rest.len(), data).renormalized())
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
        let (d, dk) = (self.dim(), keep.len());
        let mut data = kernel::zeros(dk * dk);
        for r in 0..dk {
            for c in 0..dk {
                let mut acc = Complex::new(T::zero(), T::zero());
                for s in &sel {
                    acc += self.data[(s | keep[r]) * d + (s | keep[c])];
                }
                data[r * dk + c] = acc;
            }
        }
        Ok(Self::from_raw(rest.len(), data))
    }

    fn to_density(&self) -> DensityMatrix<T> {
        self.clone()
    }

    fn fidelity(&self, target: &PureState<T>) -> Result<T> {
        if target.num_qubits() != self.num_qubits {
            return Err(Error::DimensionMismatch(self.num_qubits, target.num_qubits()));
        }
        let t = target.amplitudes();
        let d = self.dim();
        let mut acc = Complex::new(T::zero(), T::zero());
        for r in 0..d {
            if t[r].norm_sqr() == T::zero() {
                continue;
            }
            let mut row = Complex::new(T::zero(), T::zero());
            for c in 0..d {
                row += self.data[r * d + c] * t[c];
            }
            acc += t[r].conj() * row;
        }
        Ok(acc.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    fn bell() -> PureState<f64> {
        PureState::from_sparse(2, &[(0, c(1.0)), (3, c(1.0))]).unwrap()
    }

    #[test]
    fn trace_out_bell_half_is_mixed() {
        let rho = bell().partial_trace(&[1]).unwrap();
        let mixed = DensityMatrix::<f64>::maximally_mixed(1).unwrap();
        for (a, b) in rho.entries().iter().zip(mixed.entries()) {
            assert!((a - b).norm() < 1e-12);
        }
        // same from the density-matrix route
        let rho2 = bell().to_density().partial_trace(&[1]).unwrap();
        assert_eq!(rho, rho2);
    }

    #[test]
    fn trace_out_product_keeps_plus() {
        let plus_zero = PureState::<f64>::from_sparse(2, &[(0b00, c(1.0)), (0b10, c(1.0))]).unwrap();
        let rho = plus_zero.partial_trace(&[1]).unwrap();
        for z in rho.entries() {
            assert!((z - c(0.5)).norm() < 1e-12);
        }
    }

    #[test]
    fn discard_everything_rejected() {
        assert_eq!(bell().partial_trace(&[0, 1]), Err(Error::DiscardAll));
        assert_eq!(bell().partial_trace(&[]), Err(Error::EmptyDiscard));
    }

    #[test]
    fn fidelity_examples() {
        let b = bell();
        assert!((b.to_density().fidelity(&b).unwrap() - 1.0).abs() < 1e-12);
        let zero = PureState::<f64>::basis(1).unwrap();
        let half = DensityMatrix::maximally_mixed(1).unwrap();
        assert!((half.fidelity(&zero).unwrap() - 0.5).abs() < 1e-12);
        let quarter = DensityMatrix::maximally_mixed(2).unwrap();
        assert!((quarter.fidelity(&b).unwrap() - 0.25).abs() < 1e-12);
        assert!(matches!(
            quarter.fidelity(&zero),
            Err(Error::DimensionMismatch(2, 1))
        ));
    }

    #[test]
    fn unitary_matches_pure_route() {
        let mut pure = PureState::<f64>::from_sparse(2, &[(0, c(0.6)), (2, Complex::new(0.0, 0.8))]).unwrap();
        let mut rho = pure.to_density();
        pure.apply_unitary(&Gate::cnot(), &[0, 1]).unwrap();
        pure.apply_unitary(&Gate::s(), &[1]).unwrap();
        rho.apply_unitary(&Gate::cnot(), &[0, 1]).unwrap();
        rho.apply_unitary(&Gate::s(), &[1]).unwrap();
        let expected = pure.to_density();
        for (a, b) in rho.entries().iter().zip(expected.entries()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn from_entries_validates() {
        let bad = vec![c(1.0), c(0.0), c(0.0), c(1.0)];
        assert!(DensityMatrix::from_entries(bad).is_err());
        let neg = vec![c(1.5), c(0.0), c(0.0), c(-0.5)];
        assert!(DensityMatrix::from_entries(neg).is_err());
        let ok = vec![c(0.5), c(0.5), c(0.5), c(0.5)];
        assert!(DensityMatrix::from_entries(ok).is_ok());
    }

    #[test]
    fn dephasing_full_kills_coherence() {
        let mut rho = bell().to_density();
        rho.dephase(0, 0.0).unwrap();
        assert!(rho.entry(0, 3).norm() < 1e-12);
        assert!((rho.fidelity(&bell()).unwrap() - 0.5).abs() < 1e-12);
    }
}
