//! Single-qubit Pauli measurements and two-qubit Bell-state projections.

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::pauli::{Pauli, PauliString};
use super::state::{check_qubits, QuantumState};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    X,
    Y,
    Z,
}

impl Basis {
    pub fn pauli(self) -> Pauli {
        match self {
            Basis::X => Pauli::X,
            Basis::Y => Pauli::Y,
            Basis::Z => Pauli::Z,
        }
    }

    /// Eigenket of the `outcome` eigenvalue in the computational basis.
    pub fn eigenket<T: Scalar>(self, outcome: Outcome) -> [Complex<T>; 2] {
        let h = T::lit(std::f64::consts::FRAC_1_SQRT_2);
        let (o, z) = (T::one(), T::zero());
        let s = if outcome == Outcome::Plus { h } else { -h };
        match (self, outcome) {
            (Basis::Z, Outcome::Plus) => [Complex::new(o, z), Complex::new(z, z)],
            (Basis::Z, Outcome::Minus) => [Complex::new(z, z), Complex::new(o, z)],
            (Basis::X, _) => [Complex::new(h, z), Complex::new(s, z)],
            (Basis::Y, _) => [Complex::new(h, z), Complex::new(z, s)],
        }
    }
}

/// Eigenvalue `±1` of a Pauli observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn value(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    pub fn from_value(v: i8) -> Self {
        if v >= 0 {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }

    /// 0 for `+1`, 1 for `−1`.
    pub fn bit(self) -> u8 {
        (self == Outcome::Minus) as u8
    }
}

impl Serialize for Outcome {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.value())
    }
}

impl<'de> Deserialize<'de> for Outcome {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match i8::deserialize(d)? {
            1 => Ok(Outcome::Plus),
            -1 => Ok(Outcome::Minus),
            v => Err(serde::de::Error::custom(format!("outcome must be ±1, got {v}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord<T> {
    pub qubit: usize,
    pub basis: Basis,
    pub outcome: Outcome,
    pub probability: T,
}

fn observable(qubit: usize, basis: Basis) -> PauliString {
    PauliString::single(qubit, basis.pauli())
}

fn check_one<T: Scalar, S: QuantumState<T>>(state: &S, qubit: usize) -> Result<()> {
    check_qubits(&[qubit], state.num_qubits())
}

/// Measures with a prescribed outcome; the qubit stays in the register.
pub fn measure_forced<T: Scalar, S: QuantumState<T>>(
    state: &S,
    qubit: usize,
    basis: Basis,
    outcome: Outcome,
) -> Result<(MeasurementRecord<T>, S)> {
    check_one(state, qubit)?;
    let (p, post) = state.project(&observable(qubit, basis), outcome.value())?;
    let post = post.ok_or(Error::ImpossibleOutcome(p.as_f64()))?;
    Ok((
        MeasurementRecord {
            qubit,
            basis,
            outcome,
            probability: p,
        },
        post,
    ))
}

/// Both branches; a branch with negligible probability carries `None`.
pub fn measure_distribution<T: Scalar, S: QuantumState<T>>(
    state: &S,
    qubit: usize,
    basis: Basis,
) -> Result<Vec<(MeasurementRecord<T>, Option<S>)>> {
    check_one(state, qubit)?;
    Outcome::BOTH
        .iter()
        .map(|&outcome| {
            let (p, post) = state.project(&observable(qubit, basis), outcome.value())?;
            Ok((
                MeasurementRecord {
                    qubit,
                    basis,
                    outcome,
                    probability: p,
                },
                post,
            ))
        })
        .collect()
}

/// Draws exactly one uniform variate from `rng`.
pub fn measure_sample<T: Scalar, S: QuantumState<T>, R: Rng + ?Sized>(
    state: &S,
    qubit: usize,
    basis: Basis,
    rng: &mut R,
) -> Result<(MeasurementRecord<T>, S)> {
    check_one(state, qubit)?;
    let p_plus = (T::one() + state.expectation(&observable(qubit, basis))?) * T::lit(0.5);
    let u: f64 = rng.random();
    let outcome = if u < p_plus.as_f64() {
        Outcome::Plus
    } else {
        Outcome::Minus
    };
    measure_forced(state, qubit, basis, outcome)
}

/// Measures `qubit` with a prescribed outcome and removes it from the register.
pub fn measure_out<T: Scalar, S: QuantumState<T>>(
    state: &S,
    qubit: usize,
    basis: Basis,
    outcome: Outcome,
) -> Result<(T, Option<S>)> {
    state.contract(&[qubit], &basis.eigenket::<T>(outcome))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Bell {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl Bell {
    pub const ALL: [Bell; 4] = [Bell::PhiPlus, Bell::PhiMinus, Bell::PsiPlus, Bell::PsiMinus];

    /// Amplitudes over `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub fn ket<T: Scalar>(self) -> [Complex<T>; 4] {
        let h = T::lit(std::f64::consts::FRAC_1_SQRT_2);
        let z = Complex::new(T::zero(), T::zero());
        let p = Complex::new(h, T::zero());
        match self {
            Bell::PhiPlus => [p, z, z, p],
            Bell::PhiMinus => [p, z, z, -p],
            Bell::PsiPlus => [z, p, p, z],
            Bell::PsiMinus => [z, p, -p, z],
        }
    }

    /// Index 0..4 in `ALL` order; bit 1 set for Ψ, bit 0 set for the minus sign.
    pub fn index(self) -> usize {
        match self {
            Bell::PhiPlus => 0,
            Bell::PhiMinus => 1,
            Bell::PsiPlus => 2,
            Bell::PsiMinus => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Bell::PhiPlus => "Phi+",
            Bell::PhiMinus => "Phi-",
            Bell::PsiPlus => "Psi+",
            Bell::PsiMinus => "Psi-",
        }
    }
}

fn check_pair(num_qubits: usize, qa: usize, qb: usize) -> Result<()> {
    check_qubits(&[qa, qb], num_qubits)
}

/// Projects `(qa, qb)` onto a prescribed Bell state and removes both qubits.
pub fn bell_project_forced<T: Scalar, S: QuantumState<T>>(
    state: &S,
    qa: usize,
    qb: usize,
    outcome: Bell,
) -> Result<(T, S)> {
    check_pair(state.num_qubits(), qa, qb)?;
    let (p, post) = state.contract(&[qa, qb], &outcome.ket::<T>())?;
    Ok((p, post.ok_or(Error::ImpossibleOutcome(p.as_f64()))?))
}

/// All four Bell outcomes in `Bell::ALL` order.
pub fn bell_project_distribution<T: Scalar, S: QuantumState<T>>(
    state: &S,
    qa: usize,
    qb: usize,
) -> Result<Vec<(Bell, T, Option<S>)>> {
    check_pair(state.num_qubits(), qa, qb)?;
    Bell::ALL
        .iter()
        .map(|&b| {
            let (p, post) = state.contract(&[qa, qb], &b.ket::<T>())?;
            Ok((b, p, post))
        })
        .collect()
}

/// Draws exactly one uniform variate from `rng`.
pub fn bell_project_sample<T: Scalar, S: QuantumState<T>, R: Rng + ?Sized>(
    state: &S,
    qa: usize,
    qb: usize,
    rng: &mut R,
) -> Result<(Bell, T, S)> {
    let branches = bell_project_distribution(state, qa, qb)?;
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = None;
    for (b, p, post) in branches {
        if let Some(post) = post {
            acc += p.as_f64();
            if u < acc {
                return Ok((b, p, post));
            }
            last = Some((b, p, post));
        }
    }
    // u landed in the rounding gap above the accumulated mass
    last.ok_or(Error::ImpossibleOutcome(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::pure::PureState;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    fn ghz3() -> PureState<f64> {
        PureState::from_sparse(3, &[(0, c(1.0)), (7, c(1.0))]).unwrap()
    }

    #[test]
    fn plus_in_x_is_certain() {
        let plus = PureState::<f64>::from_sparse(1, &[(0, c(1.0)), (1, c(1.0))]).unwrap();
        let d = measure_distribution(&plus, 0, Basis::X).unwrap();
        assert!((d[0].0.probability - 1.0).abs() < 1e-12);
        assert!(d[1].1.is_none());
    }

    #[test]
    fn zero_in_x_is_even() {
        let zero = PureState::<f64>::basis(1).unwrap();
        for (rec, post) in measure_distribution(&zero, 0, Basis::X).unwrap() {
            assert!((rec.probability - 0.5).abs() < 1e-12);
            let post = post.unwrap();
            let want = if rec.outcome == Outcome::Plus { 1.0 } else { -1.0 };
            assert!((post.expectation(&PauliString::xs(&[0])).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn ghz_collapse() {
        let (rec, post) = measure_forced(&ghz3(), 1, Basis::Z, Outcome::Plus).unwrap();
        assert!((rec.probability - 0.5).abs() < 1e-12);
        assert_eq!(post.support(1e-12), vec![0]);
    }

    #[test]
    fn impossible_forced_outcome() {
        let zero = PureState::<f64>::basis(1).unwrap();
        assert!(matches!(
            measure_forced(&zero, 0, Basis::Z, Outcome::Minus),
            Err(Error::ImpossibleOutcome(_))
        ));
    }

    #[test]
    fn y_eigenkets_are_eigenstates() {
        for o in Outcome::BOTH {
            let k = Basis::Y.eigenket::<f64>(o);
            let s = PureState::from_amplitudes(k.to_vec()).unwrap();
            let y = s.expectation(&PauliString::ys(&[0])).unwrap();
            assert!((y - o.value() as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn bell_on_phi_plus() {
        let phi = PureState::<f64>::from_sparse(2, &[(0, c(1.0)), (3, c(1.0))]).unwrap();
        let d = bell_project_distribution(&phi, 0, 1).unwrap();
        assert!((d[0].1 - 1.0).abs() < 1e-12);
        assert!(d[1..].iter().all(|(_, p, _)| *p < 1e-12));
    }

    #[test]
    fn bell_on_zero_zero() {
        let zz = PureState::<f64>::basis(2).unwrap();
        let d = bell_project_distribution(&zz, 0, 1).unwrap();
        assert!((d[0].1 - 0.5).abs() < 1e-12);
        assert!((d[1].1 - 0.5).abs() < 1e-12);
        assert!(d[2].1 < 1e-12 && d[3].1 < 1e-12);
        assert!(bell_project_forced(&zz, 0, 1, Bell::PsiPlus).is_err());
        assert!(bell_project_forced(&zz, 0, 0, Bell::PhiPlus).is_err());
    }
}
