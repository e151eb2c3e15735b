use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::witness::{witness, WitnessResult};
use super::{RgsKind, RgsSpec};
use crate::error::{Error, Result};
use crate::qsim::{
    measure_out, phi_plus, Basis, Bell, DensityMatrix, Gate, Outcome, Pauli, PauliString,
    PureState, QState, QuantumState, MAX_QUBITS,
};
use crate::rng::SimRng;
use crate::scalar::Scalar;
use crate::shor::decode::block_value;

/// An EPR pair `|Φ⁺⟩` shared between a distant terminal photon and an
/// interface photon at the repeater node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Channel {
    pub terminal: String,
    pub interface: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RgsPhotons {
    #[serde(flatten)]
    pub spec: RgsSpec,
    /// Labels in register order.
    pub photons: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub logical_names: Vec<String>,
}

impl RgsPhotons {
    pub fn logical_name(&self, group: usize) -> String {
        self.logical_names
            .get(group)
            .cloned()
            .unwrap_or_else(|| format!("C{}", group + 1))
    }

    fn groups(&self) -> Vec<Vec<&str>> {
        self.spec
            .logical_groups()
            .into_iter()
            .map(|g| g.into_iter().map(|i| self.photons[i].as_str()).collect())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanStep {
    /// Single-photon measurement; one key bit.
    Measure { photon: String, basis: Basis },
    /// Every surviving photon of a block in one basis; lost photons are
    /// skipped. One key bit: the majority value for `Z`, the parity otherwise.
    MeasureBlock { photons: Vec<String>, basis: Basis },
    /// Bell-state measurement; two key bits, the Bell index.
    Bsm { a: String, b: String },
}

/// Pauli applied to the second terminal, keyed by the branch bit string.
pub type CorrectionTable = BTreeMap<String, Pauli>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkScenario {
    pub name: String,
    #[serde(default)]
    pub channels: Vec<Channel>,
    pub rgs: RgsPhotons,
    pub terminals: [String; 2],
    #[serde(default)]
    pub loss: Vec<String>,
    pub plan: Vec<PlanStep>,
    /// Interference visibility applied to the leading photon of every RGS
    /// logical qubit before loss.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub visibility: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub corrections: Option<CorrectionTable>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidScenario(msg.into())
}

impl NetworkScenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: NetworkScenario = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Register labels: each channel's terminal and interface, then the RGS.
    pub fn register(&self) -> Vec<String> {
        self.channels
            .iter()
            .flat_map(|c| [c.terminal.clone(), c.interface.clone()])
            .chain(self.rgs.photons.iter().cloned())
            .collect()
    }

    pub fn is_lost(&self, label: &str) -> bool {
        self.loss.iter().any(|l| l == label)
    }

    /// Same scenario with no loss, noise or stored corrections.
    pub fn ideal(&self) -> Self {
        NetworkScenario {
            loss: Vec::new(),
            visibility: None,
            corrections: None,
            ..self.clone()
        }
    }

    /// Structural checks followed by the loss-tolerance condition that every
    /// logical qubit of an encoded RGS keeps at least one photon.
    pub fn validate(&self) -> Result<()> {
        self.rgs.spec.validate()?;
        if self.rgs.photons.len() != self.rgs.spec.num_photons() {
            return Err(bad(format!(
                "RGS lists {} photons, spec needs {}",
                self.rgs.photons.len(),
                self.rgs.spec.num_photons()
            )));
        }
        let groups = self.rgs.spec.logical_groups();
        if !self.rgs.logical_names.is_empty() && self.rgs.logical_names.len() != groups.len() {
            return Err(bad("logical_names must name every logical qubit"));
        }
        let register = self.register();
        if register.len() > MAX_QUBITS {
            return Err(bad(format!("{} photons exceed the register", register.len())));
        }
        let mut seen = BTreeSet::new();
        for l in &register {
            if !seen.insert(l.as_str()) {
                return Err(bad(format!("duplicate photon label {l}")));
            }
        }
        let known = |l: &str| seen.contains(l);
        let rgs_photon = |l: &str| self.rgs.photons.iter().any(|p| p == l);
        let interface = |l: &str| self.channels.iter().any(|c| c.interface == l);

        let mut lost = BTreeSet::new();
        for l in &self.loss {
            if !known(l) {
                return Err(bad(format!("unknown lost photon {l}")));
            }
            if !lost.insert(l.as_str()) {
                return Err(bad(format!("photon {l} listed as lost twice")));
            }
        }
        let [t0, t1] = &self.terminals;
        if t0 == t1 || !known(t0) || !known(t1) {
            return Err(bad("terminals must be two distinct known photons"));
        }
        if lost.contains(t0.as_str()) || lost.contains(t1.as_str()) {
            return Err(bad("terminal photon lost"));
        }

        let mut used: BTreeSet<String> = [t0.clone(), t1.clone()].into();
        let mut claim = |l: &str| -> Result<()> {
            if !known(l) {
                return Err(bad(format!("plan references unknown photon {l}")));
            }
            if !used.insert(l.to_string()) {
                return Err(bad(format!("photon {l} used twice by the plan")));
            }
            Ok(())
        };
        for step in &self.plan {
            match step {
                PlanStep::Measure { photon, .. } => {
                    claim(photon)?;
                    if lost.contains(photon.as_str()) {
                        return Err(bad(format!("measurement on lost photon {photon}")));
                    }
                }
                PlanStep::MeasureBlock { photons, .. } => {
                    if photons.is_empty() {
                        return Err(bad("empty block measurement"));
                    }
                    for p in photons {
                        claim(p)?;
                    }
                }
                PlanStep::Bsm { a, b } => {
                    claim(a)?;
                    claim(b)?;
                    let pairs = (interface(a) && rgs_photon(b)) || (interface(b) && rgs_photon(a));
                    if !pairs {
                        return Err(bad(format!(
                            "BSM ({a}, {b}) must pair a channel interface with an RGS photon"
                        )));
                    }
                    if lost.contains(a.as_str()) || lost.contains(b.as_str()) {
                        return Err(bad(format!("BSM ({a}, {b}) on lost photon")));
                    }
                }
            }
        }
        if let Some(l) = register.iter().find(|l| !used.contains(l.as_str()) && !lost.contains(l.as_str())) {
            return Err(bad(format!("photon {l} is neither measured nor a terminal")));
        }

        if let Some(v) = self.visibility {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidProbability(v));
            }
        }

        if self.rgs.spec.kind != RgsKind::Bare {
            for (g, photons) in self.rgs.groups().iter().enumerate() {
                if photons.iter().all(|p| lost.contains(p)) {
                    return Err(Error::LogicalQubitDestroyed(self.rgs.logical_name(g)));
                }
            }
        }
        Ok(())
    }
}

/// Outcome of one measurement in a branch transcript.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchStep {
    Measure { photon: String, basis: Basis, outcome: Outcome },
    Bsm { a: String, b: String, outcome: Bell },
}

#[derive(Debug, Clone)]
pub struct ConnectionBranch<T> {
    /// Bit string indexing the correction table.
    pub key: String,
    pub transcript: Vec<BranchStep>,
    pub probability: T,
    pub correction: Pauli,
    /// Corrected terminal state, first terminal as qubit 0.
    pub state: DensityMatrix<T>,
    pub witness: WitnessResult<T>,
}

impl<T: Scalar> ConnectionBranch<T> {
    pub fn fidelity(&self) -> T {
        self.witness.fidelity
    }
}

pub enum ConnectionMode<'a> {
    Enumerate,
    /// One branch; one uniform variate per single-photon measurement and per
    /// BSM, in plan order.
    Sample(&'a mut SimRng),
}

enum Op {
    Single(String, Basis),
    Bell(String, String),
}

fn atomic_ops(s: &NetworkScenario) -> Vec<Op> {
    let mut ops = Vec::new();
    for step in &s.plan {
        match step {
            PlanStep::Measure { photon, basis } => ops.push(Op::Single(photon.clone(), *basis)),
            PlanStep::MeasureBlock { photons, basis } => ops.extend(
                photons
                    .iter()
                    .filter(|p| !s.is_lost(p))
                    .map(|p| Op::Single(p.clone(), *basis)),
            ),
            PlanStep::Bsm { a, b } => ops.push(Op::Bell(a.clone(), b.clone())),
        }
    }
    ops
}

fn branch_key(plan: &[PlanStep], transcript: &[BranchStep]) -> String {
    let outcome_of = |photon: &str| {
        transcript.iter().find_map(|t| match t {
            BranchStep::Measure { photon: p, outcome, .. } if p == photon => Some(*outcome),
            _ => None,
        })
    };
    let mut key = String::new();
    for step in plan {
        match step {
            PlanStep::Measure { photon, .. } => {
                let o = outcome_of(photon).expect("measured");
                key.push(if o.bit() == 1 { '1' } else { '0' });
            }
            PlanStep::MeasureBlock { photons, basis } => {
                let os: Vec<Outcome> = photons.iter().filter_map(|p| outcome_of(p)).collect();
                let bit = match basis {
                    Basis::Z => block_value(&os),
                    _ => os.iter().fold(0, |acc, o| acc ^ o.bit()),
                };
                key.push(if bit == 1 { '1' } else { '0' });
            }
            PlanStep::Bsm { a, .. } => {
                let bell = transcript
                    .iter()
                    .find_map(|t| match t {
                        BranchStep::Bsm { a: x, outcome, .. } if x == a => Some(*outcome),
                        _ => None,
                    })
                    .expect("performed");
                key.push_str(&format!("{:02b}", bell.index()));
            }
        }
    }
    key
}

fn initial_state<T: Scalar>(s: &NetworkScenario) -> Result<QState<T>> {
    let mut state: Option<PureState<T>> = None;
    for _ in &s.channels {
        let pair = phi_plus::<T>();
        state = Some(match state {
            None => pair,
            Some(acc) => acc.tensor(&pair)?,
        });
    }
    let rgs = s.rgs.spec.build::<T>()?;
    let pure = match state {
        None => rgs,
        Some(acc) => acc.tensor(&rgs)?,
    };
    let mut state = QState::Pure(pure);
    if let Some(v) = s.visibility {
        let offset = 2 * s.channels.len();
        for group in s.rgs.spec.logical_groups() {
            state.as_mixed_mut().dephase(offset + group[0], T::lit(v))?;
        }
    }
    Ok(state)
}

struct Leaf<T> {
    state: QState<T>,
    labels: Vec<String>,
    transcript: Vec<BranchStep>,
    probability: T,
}

fn walk<T: Scalar>(
    ops: &[Op],
    state: QState<T>,
    labels: Vec<String>,
    transcript: Vec<BranchStep>,
    probability: T,
    rng: &mut Option<&mut SimRng>,
    leaves: &mut Vec<Leaf<T>>,
) -> Result<()> {
    let Some(op) = ops.first() else {
        leaves.push(Leaf {
            state,
            labels,
            transcript,
            probability,
        });
        return Ok(());
    };
    let pos = |l: &str| labels.iter().position(|x| x == l).expect("photon in register");
    let (removed, branches): (Vec<usize>, Vec<(BranchStep, T, Option<QState<T>>)>) = match op {
        Op::Single(photon, basis) => {
            let q = pos(photon);
            let b = Outcome::BOTH
                .iter()
                .map(|&o| {
                    let (p, post) = measure_out(&state, q, *basis, o)?;
                    let step = BranchStep::Measure {
                        photon: photon.clone(),
                        basis: *basis,
                        outcome: o,
                    };
                    Ok((step, p, post))
                })
                .collect::<Result<_>>()?;
            (vec![q], b)
        }
        Op::Bell(a, b) => {
            let (qa, qb) = (pos(a), pos(b));
            let br = Bell::ALL
                .iter()
                .map(|&bell| {
                    let (p, post) = state.contract(&[qa, qb], &bell.ket::<T>())?;
                    let step = BranchStep::Bsm {
                        a: a.clone(),
                        b: b.clone(),
                        outcome: bell,
                    };
                    Ok((step, p, post))
                })
                .collect::<Result<_>>()?;
            (vec![qa, qb], br)
        }
    };
    let rest: Vec<String> = labels
        .iter()
        .enumerate()
        .filter(|(i, _)| !removed.contains(i))
        .map(|(_, l)| l.clone())
        .collect();

    let chosen = match rng {
        None => branches,
        Some(rng) => {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let mut pick = None;
            let live = branches.iter().filter(|b| b.2.is_some()).count();
            let mut seen = 0;
            for (i, b) in branches.iter().enumerate() {
                if b.2.is_none() {
                    continue;
                }
                seen += 1;
                acc += b.1.as_f64();
                if u < acc || seen == live {
                    pick = Some(i);
                    break;
                }
            }
            let pick = pick.ok_or(Error::ImpossibleOutcome(0.0))?;
            vec![branches.into_iter().nth(pick).expect("in range")]
        }
    };

    for (step, p, post) in chosen {
        let Some(post) = post else { continue };
        let mut t = transcript.clone();
        t.push(step);
        walk(&ops[1..], post, rest.clone(), t, probability * p, rng, leaves)?;
    }
    Ok(())
}

fn swap<T: Scalar>() -> Gate<T> {
    let (o, z) = (Complex::new(T::one(), T::zero()), Complex::new(T::zero(), T::zero()));
    Gate::new(vec![o, z, z, z, z, z, o, z, z, o, z, z, z, z, z, o]).expect("permutation")
}

/// Terminal state ordered as `scenario.terminals`, before correction.
fn terminal_state<T: Scalar>(s: &NetworkScenario, leaf: &Leaf<T>) -> Result<QState<T>> {
    let mut state = leaf.state.clone();
    if leaf.labels.len() != 2 {
        return Err(bad("plan leaves more than the two terminals"));
    }
    if leaf.labels[0] != s.terminals[0] {
        state.apply_unitary(&swap(), &[0, 1])?;
    }
    Ok(state)
}

fn leaves<T: Scalar>(s: &NetworkScenario, rng: Option<&mut SimRng>) -> Result<Vec<Leaf<T>>> {
    s.validate()?;
    let mut state = initial_state::<T>(s)?;
    let mut labels = s.register();
    if !s.loss.is_empty() {
        let idx: Vec<usize> = s
            .loss
            .iter()
            .map(|l| labels.iter().position(|x| x == l).expect("validated"))
            .collect();
        state = state.lose(&idx)?;
        labels.retain(|l| !s.is_lost(l));
    }
    let ops = atomic_ops(s);
    let mut rng = rng;
    let mut out = Vec::new();
    walk(&ops, state, labels, Vec::new(), T::one(), &mut rng, &mut out)?;
    Ok(out)
}

/// For every branch of the lossless, noiseless scenario, the Pauli on the
/// second terminal that maps the terminal pair exactly onto `|Φ⁺⟩`.
pub fn derive_corrections(scenario: &NetworkScenario) -> Result<CorrectionTable> {
    let ideal = scenario.ideal();
    let target = phi_plus::<f64>();
    let mut table = CorrectionTable::new();
    for leaf in leaves::<f64>(&ideal, None)? {
        let key = branch_key(&ideal.plan, &leaf.transcript);
        let state = terminal_state(&ideal, &leaf)?;
        let fix = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z]
            .into_iter()
            .find(|&p| {
                let mut s = state.clone();
                s.apply_pauli(&PauliString::single(1, p)).expect("two qubits");
                (s.fidelity(&target).expect("two qubits") - 1.0).abs() < 1e-9
            })
            .ok_or_else(|| bad(format!("branch {key} admits no Pauli correction")))?;
        if let Some(prev) = table.insert(key.clone(), fix) {
            if prev != fix {
                return Err(bad(format!("branch {key} needs both {prev:?} and {fix:?}")));
            }
        }
    }
    Ok(table)
}

/// Runs loss, single-photon measurements, BSMs and the keyed Pauli
/// correction. Corrections come from the scenario when present and are
/// derived otherwise.
pub fn run_connection<T: Scalar>(
    scenario: &NetworkScenario,
    mode: ConnectionMode<'_>,
) -> Result<Vec<ConnectionBranch<T>>> {
    scenario.validate()?;
    let table = match &scenario.corrections {
        Some(t) => t.clone(),
        None => derive_corrections(scenario)?,
    };
    let rng = match mode {
        ConnectionMode::Enumerate => None,
        ConnectionMode::Sample(r) => Some(r),
    };
    leaves::<T>(scenario, rng)?
        .into_iter()
        .map(|leaf| {
            let key = branch_key(&scenario.plan, &leaf.transcript);
            let correction = *table
                .get(&key)
                .ok_or_else(|| bad(format!("no correction for branch {key}")))?;
            let mut state = terminal_state(scenario, &leaf)?;
            state.apply_pauli(&PauliString::single(1, correction))?;
            let state = state.into_density();
            let witness = witness(&state)?;
            Ok(ConnectionBranch {
                key,
                transcript: leaf.transcript,
                probability: leaf.probability,
                correction,
                state,
                witness,
            })
        })
        .collect()
}
