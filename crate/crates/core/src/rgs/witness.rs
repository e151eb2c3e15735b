use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{phi_plus, DensityMatrix, PauliString, QuantumState};
use crate::scalar::Scalar;

/// Bell-fidelity witness `W = I/2 − |Φ⁺⟩⟨Φ⁺|` evaluated from the three
/// correlators of `|Φ⁺⟩⟨Φ⁺| = (I + XX − YY + ZZ)/4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WitnessResult<T> {
    pub xx: T,
    pub yy: T,
    pub zz: T,
    pub fidelity: T,
    pub witness: T,
}

impl<T: Scalar> WitnessResult<T> {
    pub fn from_correlators(xx: T, yy: T, zz: T) -> Self {
        let fidelity = (T::one() + xx - yy + zz) * T::lit(0.25);
        WitnessResult {
            xx,
            yy,
            zz,
            fidelity,
            witness: T::lit(0.5) - fidelity,
        }
    }

    /// Negative witness value certifies entanglement.
    pub fn is_entangled(&self) -> bool {
        self.witness < T::zero()
    }
}

pub fn witness<T: Scalar>(rho: &DensityMatrix<T>) -> Result<WitnessResult<T>> {
    if rho.num_qubits() != 2 {
        return Err(Error::DimensionMismatch(rho.num_qubits(), 2));
    }
    let c = |p: fn(&[usize]) -> PauliString| rho.expectation(&p(&[0, 1]));
    Ok(WitnessResult::from_correlators(
        c(PauliString::xs)?,
        c(PauliString::ys)?,
        c(PauliString::zs)?,
    ))
}

/// `p|Φ⁺⟩⟨Φ⁺| + (1 − p) I/4`.
pub fn werner<T: Scalar>(p: T) -> Result<DensityMatrix<T>> {
    if !(T::zero()..=T::one()).contains(&p) {
        return Err(Error::InvalidProbability(p.as_f64()));
    }
    phi_plus::<T>()
        .to_density()
        .combine(p, &DensityMatrix::maximally_mixed(2)?, T::one() - p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_plus_values() {
        let w = witness(&phi_plus::<f64>().to_density()).unwrap();
        assert!((w.xx - 1.0).abs() < 1e-12);
        assert!((w.yy + 1.0).abs() < 1e-12);
        assert!((w.zz - 1.0).abs() < 1e-12);
        assert!((w.fidelity - 1.0).abs() < 1e-12);
        assert!((w.witness + 0.5).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_values() {
        let w = witness(&DensityMatrix::<f64>::maximally_mixed(2).unwrap()).unwrap();
        assert!((w.fidelity - 0.25).abs() < 1e-12);
        assert!((w.witness - 0.25).abs() < 1e-12);
        assert!(!w.is_entangled());
    }

    #[test]
    fn werner_fidelity() {
        // F = p + (1 − p)/4
        let rho = werner(0.56f64).unwrap();
        let w = witness(&rho).unwrap();
        assert!((w.fidelity - 0.67).abs() < 1e-12);
        assert!((w.witness + 0.17).abs() < 1e-12);
        let direct = rho.fidelity(&phi_plus()).unwrap();
        assert!((direct - w.fidelity).abs() < 1e-12);
    }

    #[test]
    fn wrong_size() {
        let rho = DensityMatrix::<f64>::maximally_mixed(3).unwrap();
        assert!(witness(&rho).is_err());
    }
}
