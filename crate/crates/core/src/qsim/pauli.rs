use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Single-qubit product `self · other` as `(power of i, result)`.
    pub fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, X) => (3, Z),
            (Y, Z) => (1, X),
            (Z, Y) => (3, X),
            (Z, X) => (1, Y),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }

    pub fn anticommutes(self, other: Pauli) -> bool {
        self != Pauli::I && other != Pauli::I && self != other
    }

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Signed tensor product of Pauli operators over zero-based qubit indices.
/// Identity factors are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PauliString {
    negative: bool,
    factors: BTreeMap<usize, Pauli>,
}

impl PauliString {
    pub fn identity() -> Self {
        Self::default()
    }

    /// Builds a string from `(qubit, pauli)` pairs; a qubit may appear once.
    pub fn new<I>(factors: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Pauli)>,
    {
        let mut map = BTreeMap::new();
        let mut seen = Vec::new();
        for (q, p) in factors {
            if seen.contains(&q) {
                seen.push(q);
                return Err(Error::DuplicateQubits(seen));
            }
            seen.push(q);
            if p != Pauli::I {
                map.insert(q, p);
            }
        }
        Ok(Self {
            negative: false,
            factors: map,
        })
    }

    pub fn single(qubit: usize, pauli: Pauli) -> Self {
        Self::new([(qubit, pauli)]).expect("single factor")
    }

    /// Same Pauli on every listed qubit. Panics on duplicates.
    pub fn uniform(pauli: Pauli, qubits: &[usize]) -> Self {
        Self::new(qubits.iter().map(|&q| (q, pauli))).expect("distinct qubits")
    }

    pub fn xs(qubits: &[usize]) -> Self {
        Self::uniform(Pauli::X, qubits)
    }

    pub fn ys(qubits: &[usize]) -> Self {
        Self::uniform(Pauli::Y, qubits)
    }

    pub fn zs(qubits: &[usize]) -> Self {
        Self::uniform(Pauli::Z, qubits)
    }

    pub fn negated(mut self) -> Self {
        self.negative = !self.negative;
        self
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        self.factors.get(&qubit).copied().unwrap_or(Pauli::I)
    }

    pub fn factors(&self) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        self.factors.iter().map(|(&q, &p)| (q, p))
    }

    pub fn support(&self) -> Vec<usize> {
        self.factors.keys().copied().collect()
    }

    pub fn weight(&self) -> usize {
        self.factors.len()
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty() && !self.negative
    }

    /// Largest qubit index touched, if any.
    pub fn max_qubit(&self) -> Option<usize> {
        self.factors.keys().next_back().copied()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let clashes = self
            .factors
            .iter()
            .filter(|(q, p)| p.anticommutes(other.get(**q)))
            .count();
        clashes % 2 == 0
    }

    /// Product `self · other` as `(power of i, string)`; the string's own sign
    /// absorbs any real −1.
    pub fn mul(&self, other: &PauliString) -> (u8, PauliString) {
        let mut phase = 0u8;
        let mut factors = self.factors.clone();
        for (&q, &p) in &other.factors {
            let mine = factors.remove(&q).unwrap_or(Pauli::I);
            let (k, r) = mine.mul(p);
            phase = (phase + k) % 4;
            if r != Pauli::I {
                factors.insert(q, r);
            }
        }
        let mut negative = self.negative ^ other.negative;
        if phase >= 2 {
            negative = !negative;
            phase -= 2;
        }
        (phase, PauliString { negative, factors })
    }

    /// Relabels every qubit through `map`.
    pub fn relabel(&self, map: impl Fn(usize) -> usize) -> Result<PauliString> {
        let mut out = PauliString::new(self.factors().map(|(q, p)| (map(q), p)))?;
        out.negative = self.negative;
        Ok(out)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", if self.negative { '-' } else { '+' })?;
        if self.factors.is_empty() {
            return write!(f, "I");
        }
        for (q, p) in &self.factors {
            write!(f, "{}{}", p.symbol(), q)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_qubits_rejected() {
        assert!(PauliString::new([(0, Pauli::X), (0, Pauli::Z)]).is_err());
    }

    #[test]
    fn identity_factors_dropped() {
        let p = PauliString::new([(0, Pauli::I), (1, Pauli::X)]).unwrap();
        assert_eq!(p.support(), vec![1]);
        assert_eq!(p.to_string(), "+X1");
    }

    #[test]
    fn xz_product_is_minus_i_y() {
        let (phase, p) = PauliString::single(0, Pauli::X).mul(&PauliString::single(0, Pauli::Z));
        // XZ = -iY: phase i^1 with negated sign.
        assert_eq!(phase, 1);
        assert!(p.is_negative());
        assert_eq!(p.get(0), Pauli::Y);
    }

    #[test]
    fn commutation() {
        let xx = PauliString::xs(&[0, 1]);
        let zz = PauliString::zs(&[0, 1]);
        let zi = PauliString::zs(&[0]);
        assert!(xx.commutes_with(&zz));
        assert!(!xx.commutes_with(&zi));
    }

    #[test]
    fn square_is_identity() {
        let p = PauliString::new([(0, Pauli::Y), (3, Pauli::X)]).unwrap().negated();
        let (phase, sq) = p.mul(&p);
        assert_eq!(phase, 0);
        assert!(sq.is_identity());
    }
}
