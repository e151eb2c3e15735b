//! Index arithmetic and in-place kernels over big-endian amplitude vectors.
//!
//! A vector over `n_bits` virtual qubits stores qubit 0 in the most
//! significant bit of the index. Density matrices are handled as vectors over
//! `2n` virtual qubits: row qubits `0..n`, column qubits `n..2n`.

use num_complex::Complex;

use super::pauli::{Pauli, PauliString};
use crate::scalar::Scalar;

#[inline]
pub(crate) fn qubit_bit(n_bits: usize, qubit: usize) -> usize {
    1 << (n_bits - 1 - qubit)
}

/// `table[j]` is the index with the bits of `j` scattered onto `positions`,
/// `positions[0]` receiving the most significant bit of `j`.
pub(crate) fn scatter_table(n_bits: usize, positions: &[usize]) -> Vec<usize> {
    let k = positions.len();
    (0..1usize << k)
        .map(|j| {
            positions
                .iter()
                .enumerate()
                .filter(|(t, _)| j >> (k - 1 - t) & 1 == 1)
                .fold(0, |acc, (_, &q)| acc | qubit_bit(n_bits, q))
        })
        .collect()
}

/// Qubits of `0..n` not in `sel`, ascending.
pub(crate) fn complement(n: usize, sel: &[usize]) -> Vec<usize> {
    (0..n).filter(|q| !sel.contains(q)).collect()
}

/// Multiplies the `2^k × 2^k` row-major `matrix` onto `targets`.
pub(crate) fn apply_matrix<T: Scalar>(
    data: &mut [Complex<T>],
    n_bits: usize,
    targets: &[usize],
    matrix: &[Complex<T>],
) {
    let d = 1usize << targets.len();
    debug_assert_eq!(matrix.len(), d * d);
    let offsets = scatter_table(n_bits, targets);
    let mask = offsets[d - 1];
    let mut buf = vec![Complex::new(T::zero(), T::zero()); d];
    for base in 0..data.len() {
        if base & mask != 0 {
            continue;
        }
        for (b, off) in buf.iter_mut().zip(&offsets) {
            *b = data[base | off];
        }
        for (r, off) in offsets.iter().enumerate() {
            let row = &matrix[r * d..(r + 1) * d];
            data[base | off] = row
                .iter()
                .zip(&buf)
                .fold(Complex::new(T::zero(), T::zero()), |acc, (m, v)| acc + m * v);
        }
    }
}

/// Compiled form of a Pauli string acting on `n_bits` virtual qubits.
#[derive(Debug, Clone, Copy)]
pub(crate) struct PauliMasks {
    pub x: usize,
    pub z: usize,
    /// Power of i contributed by the Y factors and the sign.
    pub phase: u8,
}

impl PauliMasks {
    /// `offset` shifts qubit indices (column block of a density matrix);
    /// `conjugate` compiles the complex conjugate operator.
    pub fn compile(p: &PauliString, n_bits: usize, offset: usize, conjugate: bool) -> Self {
        let mut x = 0;
        let mut z = 0;
        let mut ys = 0u8;
        for (q, f) in p.factors() {
            let bit = qubit_bit(n_bits, q + offset);
            match f {
                Pauli::I => {}
                Pauli::X => x |= bit,
                Pauli::Z => z |= bit,
                Pauli::Y => {
                    x |= bit;
                    z |= bit;
                    ys += 1;
                }
            }
        }
        // Y = i·XZ, conj(Y) = -i·XZ.
        let mut phase = if conjugate { (4 - ys % 4) % 4 } else { ys % 4 };
        if p.is_negative() {
            phase = (phase + 2) % 4;
        }
        Self { x, z, phase }
    }

    /// Factor `c` with `P|i⟩ = c |i ^ x⟩`.
    #[inline]
    pub fn coefficient<T: Scalar>(&self, i: usize) -> Complex<T> {
        let parity = (i & self.z).count_ones() as u8 * 2;
        i_power((self.phase + parity) % 4)
    }
}

#[inline]
pub(crate) fn i_power<T: Scalar>(k: u8) -> Complex<T> {
    let (o, z) = (T::one(), T::zero());
    match k % 4 {
        0 => Complex::new(o, z),
        1 => Complex::new(z, o),
        2 => Complex::new(-o, z),
        _ => Complex::new(z, -o),
    }
}

pub(crate) fn apply_pauli<T: Scalar>(data: &mut Vec<Complex<T>>, masks: PauliMasks) {
    let mut out = vec![Complex::new(T::zero(), T::zero()); data.len()];
    for (i, v) in data.iter().enumerate() {
        out[i ^ masks.x] = masks.coefficient::<T>(i) * v;
    }
    *data = out;
}

/// `(v + s·P v) / 2`, the projection onto the `s` eigenspace of `P`.
pub(crate) fn project_pauli<T: Scalar>(data: &mut [Complex<T>], masks: PauliMasks, sign: i8) {
    let half = T::lit(0.5);
    let s = if sign > 0 { T::one() } else { -T::one() };
    let src = data.to_vec();
    for (j, out) in data.iter_mut().enumerate() {
        // (P v)[j] = c(j ^ x) · v[j ^ x]
        let i = j ^ masks.x;
        let pv = masks.coefficient::<T>(i) * src[i];
        *out = (src[j] + pv * s) * half;
    }
}

pub(crate) fn norm_sqr<T: Scalar>(data: &[Complex<T>]) -> T {
    data.iter().map(|a| a.norm_sqr()).sum()
}

pub(crate) fn zeros<T: Scalar>(len: usize) -> Vec<Complex<T>> {
    vec![Complex::new(T::zero(), T::zero()); len]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scatter_big_endian() {
        // three qubits, targets [2, 0]: j=0b10 sets qubit 2 (bit 0), j=0b01 sets qubit 0 (bit 2)
        assert_eq!(scatter_table(3, &[2, 0]), vec![0, 4, 1, 5]);
    }

    #[test]
    fn complement_ascending() {
        assert_eq!(complement(5, &[3, 1]), vec![0, 2, 4]);
    }
}
