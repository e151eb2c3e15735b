//! The connection experiments on the six-photon partially encoded RGS and
//! the nine-photon encoded RGS, with photon labels `1'…10'`.
//!
//! Partially encoded connection: channels `(1', 2')` and `(9', 8')`, RGS
//! photons `3', 10', 7'` (bare) and logical qubit `C4 = {4', 5', 6'}`.
//! Encoded loss test: `C1 = {1', 2', 3'}`, `C3 = {4', 5', 6'}`,
//! `C2 = {7', 8', 9'}` with terminals `1'` and `9'`.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::scenario::{
    run_connection, Channel, ConnectionBranch, ConnectionMode, CorrectionTable, NetworkScenario,
    PlanStep, RgsPhotons,
};
use super::RgsSpec;
use crate::error::{Error, Result};
use crate::qsim::Basis;
use crate::scalar::Scalar;

pub const CORRECTIONS_VERSION: u32 = 1;
pub const CORRECTIONS_FILE: &str = include_str!("../../tables/corrections.v1.json");

#[derive(Debug, Serialize, Deserialize)]
struct CorrectionsFile {
    version: u32,
    tables: BTreeMap<String, CorrectionTable>,
}

fn frozen() -> &'static CorrectionsFile {
    static TABLES: OnceLock<CorrectionsFile> = OnceLock::new();
    TABLES.get_or_init(|| {
        let f: CorrectionsFile = serde_json::from_str(CORRECTIONS_FILE).expect("bundled table parses");
        assert_eq!(f.version, CORRECTIONS_VERSION);
        f
    })
}

/// Frozen correction table of a built-in scenario.
pub fn frozen_corrections(name: &str) -> Option<CorrectionTable> {
    frozen().tables.get(name).cloned()
}

fn labels(ls: &[&str]) -> Vec<String> {
    ls.iter().map(|s| s.to_string()).collect()
}

fn channel(terminal: &str, interface: &str) -> Channel {
    Channel {
        terminal: terminal.into(),
        interface: interface.into(),
    }
}

fn measure(photon: &str, basis: Basis) -> PlanStep {
    PlanStep::Measure {
        photon: photon.into(),
        basis,
    }
}

fn bsm(a: &str, b: &str) -> PlanStep {
    PlanStep::Bsm { a: a.into(), b: b.into() }
}

fn check_count(lost: usize, max: usize) -> Result<()> {
    if lost > max {
        return Err(Error::InvalidParameter(format!(
            "{lost} lost photons requested from a {max}-photon logical qubit"
        )));
    }
    Ok(())
}

const C4: [&str; 3] = ["4'", "5'", "6'"];

fn connection(
    name: &str,
    spec: RgsSpec,
    photons: &[&str],
    block: (&[&str], Basis),
    lost: &[&str],
) -> NetworkScenario {
    NetworkScenario {
        name: name.into(),
        channels: vec![channel("1'", "2'"), channel("9'", "8'")],
        rgs: RgsPhotons {
            spec,
            photons: labels(photons),
            logical_names: labels(&["C2", "C1", "C3", "C4"]),
        },
        terminals: ["1'".into(), "9'".into()],
        loss: labels(lost),
        plan: vec![
            measure("10'", Basis::X),
            PlanStep::MeasureBlock {
                photons: labels(block.0),
                basis: block.1,
            },
            bsm("2'", "3'"),
            bsm("8'", "7'"),
        ],
        visibility: None,
        corrections: frozen_corrections(name),
    }
}

/// Partially encoded RGS with `m = 3` and the last `lost_on_c4` photons of
/// `C4` lost (`6'`, then `5'`, then `4'`).
pub fn partial_connection(lost_on_c4: usize) -> Result<NetworkScenario> {
    check_count(lost_on_c4, 3)?;
    Ok(connection(
        "partial-connection",
        RgsSpec::partial(3),
        &["3'", "10'", "7'", "4'", "5'", "6'"],
        (&C4, Basis::Z),
        &C4[3 - lost_on_c4..],
    ))
}

/// Bare GHZ₄ RGS on `3', 10', 7', 4'`, optionally losing `4'`. Without the
/// block encoding the spare arm `4'` is read out in `X`.
pub fn bare_connection(lose_4: bool) -> NetworkScenario {
    let lost: &[&str] = if lose_4 { &["4'"] } else { &[] };
    connection(
        "bare-connection",
        RgsSpec::bare(4),
        &["3'", "10'", "7'", "4'"],
        (&["4'"], Basis::X),
        lost,
    )
}

/// Encoded `(3, 3)` RGS with the last `lost_on_c3` photons of `C3` lost.
pub fn logical_loss_scenario(lost_on_c3: usize) -> Result<NetworkScenario> {
    check_count(lost_on_c3, 3)?;
    let name = "logical-loss";
    let s = NetworkScenario {
        name: name.into(),
        channels: Vec::new(),
        rgs: RgsPhotons {
            spec: RgsSpec::encoded(3, 3),
            photons: labels(&["1'", "2'", "3'", "4'", "5'", "6'", "7'", "8'", "9'"]),
            logical_names: labels(&["C1", "C3", "C2"]),
        },
        terminals: ["1'".into(), "9'".into()],
        loss: labels(&C4[3 - lost_on_c3..]),
        plan: vec![
            measure("2'", Basis::X),
            measure("3'", Basis::X),
            measure("7'", Basis::X),
            measure("8'", Basis::X),
            PlanStep::MeasureBlock {
                photons: labels(&C4),
                basis: Basis::Z,
            },
        ],
        visibility: None,
        corrections: frozen_corrections(name),
    };
    Ok(s)
}

/// Entanglement between `1'` and `9'` of the encoded RGS after losing
/// `lost_on_c3` photons of `C3`. Losing all three breaks loss tolerance.
pub fn logical_loss_test<T: Scalar>(
    lost_on_c3: usize,
    visibility: Option<f64>,
    mode: ConnectionMode<'_>,
) -> Result<Vec<ConnectionBranch<T>>> {
    let mut s = logical_loss_scenario(lost_on_c3)?;
    s.visibility = visibility;
    run_connection(&s, mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rgs::derive_corrections;

    /// Rewrites the bundled table: `APQR_REGEN_TABLES=1 cargo test regenerate`.
    #[test]
    fn regenerate_tables() {
        if std::env::var_os("APQR_REGEN_TABLES").is_none() {
            return;
        }
        let mut tables = BTreeMap::new();
        for s in [partial_connection(0).unwrap(), bare_connection(false), logical_loss_scenario(0).unwrap()] {
            tables.insert(s.name.clone(), derive_corrections(&s).unwrap());
        }
        let f = CorrectionsFile {
            version: CORRECTIONS_VERSION,
            tables,
        };
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tables/corrections.v1.json");
        std::fs::write(path, serde_json::to_string_pretty(&f).unwrap() + "\n").unwrap();
    }
}
