//! Repeater graph states, the entanglement-connection protocol and the
//! two-qubit Bell witness.

mod builtin;
mod scenario;
mod witness;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qsim::{ghz, Gate, PureState, QuantumState};
use crate::scalar::Scalar;
use crate::shor::{apply_step, encode_qpc, CircuitStep, LogicalInput};

pub use builtin::{
    bare_connection, frozen_corrections, logical_loss_scenario, logical_loss_test,
    partial_connection, CORRECTIONS_FILE, CORRECTIONS_VERSION,
};
pub use scenario::{
    derive_corrections, run_connection, BranchStep, Channel, ConnectionBranch, ConnectionMode,
    CorrectionTable, NetworkScenario, PlanStep, RgsPhotons,
};
pub use witness::{werner, witness, WitnessResult};

/// Largest photon count of an RGS inside a scenario.
pub const MAX_RGS_PHOTONS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RgsKind {
    /// `n`-photon GHZ state.
    Bare,
    /// GHZ state whose last qubit is encoded into an `m`-photon block.
    Partial,
    /// Every one of the `n` qubits encoded into an `m`-photon block.
    Encoded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RgsSpec {
    pub kind: RgsKind,
    /// Logical qubits.
    pub n: usize,
    /// Photons per encoded logical qubit.
    pub m: usize,
}

impl RgsSpec {
    pub fn bare(n: usize) -> Self {
        RgsSpec { kind: RgsKind::Bare, n, m: 1 }
    }

    /// Three bare qubits plus one `m`-photon logical qubit.
    pub fn partial(m: usize) -> Self {
        RgsSpec { kind: RgsKind::Partial, n: 4, m }
    }

    pub fn encoded(n: usize, m: usize) -> Self {
        RgsSpec { kind: RgsKind::Encoded, n, m }
    }

    pub fn num_photons(&self) -> usize {
        match self.kind {
            RgsKind::Bare => self.n,
            RgsKind::Partial => self.n - 1 + self.m,
            RgsKind::Encoded => self.n * self.m,
        }
    }

    /// Register indices of each logical qubit, in register order.
    pub fn logical_groups(&self) -> Vec<Vec<usize>> {
        match self.kind {
            RgsKind::Bare => (0..self.n).map(|q| vec![q]).collect(),
            RgsKind::Partial => {
                let mut groups: Vec<Vec<usize>> = (0..self.n - 1).map(|q| vec![q]).collect();
                groups.push((self.n - 1..self.n - 1 + self.m).collect());
                groups
            }
            RgsKind::Encoded => (0..self.n)
                .map(|b| (b * self.m..(b + 1) * self.m).collect())
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match self.kind {
            RgsKind::Bare => self.n >= 2 && self.m == 1,
            RgsKind::Partial => self.n >= 2 && self.m >= 1,
            RgsKind::Encoded => self.n >= 1 && self.m >= 1,
        };
        if !ok || self.num_photons() > MAX_RGS_PHOTONS {
            return Err(Error::InvalidCode(format!(
                "{:?} RGS with n = {}, m = {} ({} photons, at most {MAX_RGS_PHOTONS})",
                self.kind,
                self.n,
                self.m,
                self.num_photons()
            )));
        }
        Ok(())
    }

    pub fn build<T: Scalar>(&self) -> Result<PureState<T>> {
        self.validate()?;
        match self.kind {
            RgsKind::Bare => ghz(self.n),
            RgsKind::Partial => partial_state(self.n, self.m),
            RgsKind::Encoded => encode_qpc(&LogicalInput::d(), self.n, self.m),
        }
    }
}

fn partial_state<T: Scalar>(n: usize, m: usize) -> Result<PureState<T>> {
    let last = n - 1;
    let mut state = ghz::<T>(n)?;
    if m > 1 {
        state = state.tensor(&PureState::basis(m - 1)?)?;
    }
    state.apply_unitary(&Gate::h(), &[last])?;
    apply_step(
        &mut state,
        &CircuitStep::Encoder {
            control: last,
            targets: (last + 1..last + m).collect(),
        },
    )?;
    Ok(state)
}

/// `(|0⟩^{⊗n} + |1⟩^{⊗n})/√2`.
pub fn build_bare_rgs<T: Scalar>(n: usize) -> Result<PureState<T>> {
    RgsSpec::bare(n).build()
}

/// `(|000⟩|0⟩_l + |111⟩|1⟩_l)/√2` with `|0/1⟩_l = (|0⟩^{⊗m} ± |1⟩^{⊗m})/√2`.
pub fn build_partial_encoded<T: Scalar>(m: usize) -> Result<PureState<T>> {
    RgsSpec::partial(m).build()
}

/// Encoded RGS: the parity-code state of `|+⟩` with `n` blocks of `m`.
pub fn build_encoded_rgs<T: Scalar>(n: usize, m: usize) -> Result<PureState<T>> {
    if n * m > crate::qsim::MAX_QUBITS {
        return Err(Error::InvalidCode(format!("{n}×{m} exceeds the register size")));
    }
    encode_qpc(&LogicalInput::d(), n, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::PauliString;
    use num_complex::Complex;

    fn assert_amps(state: &PureState<f64>, expected: &[(usize, f64)]) {
        let mut dense = vec![Complex::new(0.0, 0.0); state.amplitudes().len()];
        for &(i, a) in expected {
            dense[i] = Complex::new(a, 0.0);
        }
        for (a, b) in state.amplitudes().iter().zip(&dense) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn bare_two_is_phi_plus() {
        let s = build_bare_rgs::<f64>(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_amps(&s, &[(0, h), (3, h)]);
    }

    #[test]
    fn bare_ghz3_stabilizers() {
        let s = build_bare_rgs::<f64>(3).unwrap();
        for op in [PauliString::xs(&[0, 1, 2]), PauliString::zs(&[0, 1]), PauliString::zs(&[1, 2])] {
            assert!((s.expectation(&op).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bare_size_limits() {
        assert!(build_bare_rgs::<f64>(1).is_err());
        assert!(build_bare_rgs::<f64>(11).is_err());
    }

    #[test]
    fn partial_m1_is_ghz4_with_hadamard() {
        let s = build_partial_encoded::<f64>(1).unwrap();
        // |000⟩|+⟩ + |111⟩|−⟩ over 2
        assert_amps(&s, &[(0, 0.5), (1, 0.5), (14, 0.5), (15, -0.5)]);
    }

    #[test]
    fn partial_m3_expansion() {
        let s = build_partial_encoded::<f64>(3).unwrap();
        assert_eq!(s.num_qubits(), 6);
        // (|000⟩(|000⟩+|111⟩) + |111⟩(|000⟩−|111⟩))/2
        assert_amps(&s, &[(0b000000, 0.5), (0b000111, 0.5), (0b111000, 0.5), (0b111111, -0.5)]);
        let x_all = PauliString::xs(&[0, 1, 2, 3, 4, 5]);
        assert!((s.expectation(&x_all).unwrap() + 0.0).abs() < 1e-12);
        let xxx_z = PauliString::new([
            (0, crate::qsim::Pauli::X),
            (1, crate::qsim::Pauli::X),
            (2, crate::qsim::Pauli::X),
            (3, crate::qsim::Pauli::Z),
        ])
        .unwrap();
        assert!((s.expectation(&xxx_z).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn encoded_small_cases() {
        let h = 0.5;
        let s = build_encoded_rgs::<f64>(2, 1).unwrap();
        // (|++⟩ + |−−⟩)/√2
        assert_amps(&s, &[(0, 1.0 / 2f64.sqrt()), (3, 1.0 / 2f64.sqrt())]);
        let s = build_encoded_rgs::<f64>(3, 1).unwrap();
        // (|+++⟩ + |−−−⟩)/√2 has support on even-weight strings
        assert_amps(&s, &[(0, h), (3, h), (5, h), (6, h)]);
    }

    #[test]
    fn encoded_three_by_three_is_d_state() {
        let s = build_encoded_rgs::<f64>(3, 3).unwrap();
        let d = crate::shor::d_state::<f64>();
        assert!((s.inner(&d).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn groups() {
        assert_eq!(
            RgsSpec::partial(3).logical_groups(),
            vec![vec![0], vec![1], vec![2], vec![3, 4, 5]]
        );
        assert_eq!(RgsSpec::encoded(2, 2).logical_groups(), vec![vec![0, 1], vec![2, 3]]);
    }
}
