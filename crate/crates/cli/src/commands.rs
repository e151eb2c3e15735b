use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use apqr_core::photonics::{self, NoiseParams, SourceParams};
use apqr_core::qsim::{PauliString, QState, QuantumState};
use apqr_core::rate::{self, Metric, RateModel};
use apqr_core::rgs::{
    bare_connection, logical_loss_scenario, partial_connection, run_connection, ConnectionBranch, ConnectionMode,
    NetworkScenario,
};
use apqr_core::rng::run_rng;
use apqr_core::shor::{
    apply_flip_channel, decode_readout, encode_shor, stabilizers, syndrome_of_error, CodeLayout,
    DecodeResult, FlipKind, LogicalInput, LossPattern, ReadoutMode,
};
use serde_json::{json, Value};

use crate::config::{Channel, CommandKind, MetricArg, RunConfig};
use crate::error::CliError;
use crate::output::{num, to_value, Report, Table};

const QUBITS: usize = 9;
const MAX_GRID: usize = 10_000;

pub const STABILIZER_NAMES: [&str; 8] = ["S_Z^1", "S_Z^2", "S_Z^3", "S_Z^4", "S_Z^5", "S_Z^6", "S_X^1", "S_X^2"];
const STABILIZER_OPS: [&str; 8] = [
    "Z1Z2",
    "Z2Z3",
    "Z4Z5",
    "Z5Z6",
    "Z7Z8",
    "Z8Z9",
    "X1X2X3X4X5X6",
    "X4X5X6X7X8X9",
];

pub fn run(kind: CommandKind, cfg: &RunConfig) -> Result<Report, CliError> {
    let (json, table, sidecar) = match kind {
        CommandKind::Encode => encode(cfg)?,
        CommandKind::SyndromeScan => syndrome_scan(cfg)?,
        CommandKind::LossReadout => loss_readout(cfg)?,
        CommandKind::Connect => connect(cfg)?,
        CommandKind::RgsLoss => rgs_loss(cfg)?,
        CommandKind::Rate => rate_sweep(cfg)?,
        CommandKind::PhotonicsRate => photonics_rate(cfg)?,
    };
    Ok(Report {
        command: kind.name(),
        json,
        table,
        sidecar,
    })
}

type Output = (Value, Table, Option<(&'static str, Value)>);

fn input_state(cfg: &RunConfig) -> Result<(LogicalInput<f64>, Value), CliError> {
    let (theta, phi) = cfg.angles((FRAC_PI_2, 0.0))?;
    let input = LogicalInput::from_bloch(theta, phi)?;
    let desc = json!({
        "theta": theta,
        "phi": phi,
        "alpha": [input.alpha.re, input.alpha.im],
        "beta": [input.beta.re, input.beta.im],
    });
    Ok((input, desc))
}

/// Codeword of `input`, dephased at the encoders when `noise` is set.
fn codeword(input: &LogicalInput<f64>, noise: Option<f64>) -> Result<QState<f64>, CliError> {
    Ok(match noise {
        None => QState::Pure(encode_shor(input)?),
        Some(v) => QState::Mixed(photonics::noisy_encoding(input, &CodeLayout::shor(), &NoiseParams::new(v)?)?),
    })
}

fn stabilizer_values<S: QuantumState<f64>>(state: &S) -> Result<Vec<f64>, CliError> {
    stabilizers().iter().map(|s| Ok(state.expectation(s)?)).collect()
}

fn bits(index: usize) -> String {
    format!("{index:0QUBITS$b}")
}

fn encode(cfg: &RunConfig) -> Result<Output, CliError> {
    let (input, desc) = input_state(cfg)?;
    let noise = cfg.noise()?;
    let state = codeword(&input, noise)?;
    let expectations = stabilizer_values(&state)?;

    let mut table = Table::new(&["record", "label", "re", "im"]);
    let mut body = json!({ "input": desc, "noise": noise });
    match &state {
        QState::Pure(psi) => {
            let nonzeros: Vec<Value> = psi
                .support(1e-12)
                .into_iter()
                .map(|i| {
                    let a = psi.amplitude(i);
                    table.push(vec!["amplitude".into(), bits(i), num(a.re), num(a.im)]);
                    json!({ "index": i, "bits": bits(i), "re": a.re, "im": a.im })
                })
                .collect();
            body["nonzeros"] = Value::Array(nonzeros);
        }
        QState::Mixed(rho) => {
            let populations: Vec<Value> = rho
                .probabilities()
                .into_iter()
                .enumerate()
                .filter(|(_, p)| *p > 1e-12)
                .map(|(i, p)| {
                    table.push(vec!["population".into(), bits(i), num(p), "0".into()]);
                    json!({ "index": i, "bits": bits(i), "probability": p })
                })
                .collect();
            body["populations"] = Value::Array(populations);
        }
    }
    let stab: Vec<Value> = STABILIZER_NAMES
        .iter()
        .zip(STABILIZER_OPS)
        .zip(&expectations)
        .map(|((name, op), e)| {
            table.push(vec!["stabilizer".into(), name.to_string(), num(*e), "0".into()]);
            json!({ "name": name, "operator": op, "expectation": e })
        })
        .collect();
    body["stabilizers"] = Value::Array(stab);
    Ok((body, table, None))
}

fn one_based(label: usize) -> Result<usize, CliError> {
    if !(1..=QUBITS).contains(&label) {
        return Err(CliError::Config(format!("qubit label {label} outside 1..={QUBITS}")));
    }
    Ok(label - 1)
}

fn syndrome_scan(cfg: &RunConfig) -> Result<Output, CliError> {
    let channel = cfg.channel.unwrap_or(Channel::BitFlip);
    let (kind, default_qubit) = match channel {
        Channel::BitFlip => (FlipKind::BitFlip, 4),
        Channel::PhaseFlip => (FlipKind::PhaseFlip, 2),
    };
    let label = cfg.qubit.unwrap_or(default_qubit);
    let qubit = one_based(label)?;
    let ps = cfg.p.clone().unwrap_or_else(|| vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    if ps.is_empty() {
        return Err(CliError::Config("empty p list".into()));
    }
    for &p in &ps {
        RunConfig::check_unit("p", p)?;
    }
    let (input, desc) = input_state(cfg)?;
    let noise = cfg.noise()?;
    let rho = codeword(&input, noise)?.to_density();

    let flipped = syndrome_of_error(&PauliString::single(qubit, kind.pauli())).values();
    let probes: Vec<&str> = STABILIZER_NAMES
        .iter()
        .zip(flipped)
        .filter(|(_, v)| *v < 0)
        .map(|(n, _)| *n)
        .collect();

    let mut columns = vec!["p"];
    columns.extend(STABILIZER_NAMES);
    let mut table = Table::new(&columns);
    let mut rows = Vec::with_capacity(ps.len());
    for &p in &ps {
        let values = stabilizer_values(&apply_flip_channel(&rho, qubit, kind, p)?)?;
        let mut row = vec![num(p)];
        row.extend(values.iter().map(|v| num(*v)));
        table.push(row);
        rows.push(json!({ "p": p, "expectations": values }));
    }
    let body = json!({
        "channel": match channel { Channel::BitFlip => "bit-flip", Channel::PhaseFlip => "phase-flip" },
        "qubit": label,
        "input": desc,
        "noise": noise,
        "stabilizers": STABILIZER_NAMES,
        "probes": probes,
        "rows": rows,
    });
    Ok((body, table, None))
}

fn readout_key(r: &DecodeResult<f64>) -> String {
    r.transcript.iter().map(|m| char::from(b'0' + m.outcome.bit())).collect()
}

fn readout_transcript(r: &DecodeResult<f64>) -> Value {
    Value::Array(
        r.transcript
            .iter()
            .map(|m| json!({ "qubit": m.qubit + 1, "basis": m.basis, "outcome": m.outcome }))
            .collect(),
    )
}

fn loss_readout(cfg: &RunConfig) -> Result<Output, CliError> {
    let labels = cfg.loss.clone().unwrap_or_default();
    let mut lost = Vec::with_capacity(labels.len());
    for &l in &labels {
        let q = one_based(l)?;
        if lost.contains(&q) {
            return Err(CliError::Config(format!("qubit {l} listed twice in loss")));
        }
        lost.push(q);
    }
    let pattern = LossPattern::new(lost);
    let (input, desc) = input_state(cfg)?;
    let noise = cfg.noise()?;
    let state = codeword(&input, noise)?;

    let mut body = json!({ "input": desc, "loss": labels, "noise": noise });
    let table = match cfg.shots {
        None => {
            let branches = decode_readout(&state, &pattern, ReadoutMode::Enumerate)?;
            let mut table = Table::new(&["branch", "probability", "correction", "fidelity"]);
            let mut mean = 0.0;
            let rows: Vec<Value> = branches
                .iter()
                .map(|b| {
                    let f = b.fidelity(&input);
                    mean += b.probability * f;
                    table.push(vec![readout_key(b), num(b.probability), format!("{:?}", b.correction), num(f)]);
                    json!({
                        "branch": readout_key(b),
                        "probability": b.probability,
                        "correction": b.correction,
                        "fidelity": f,
                        "transcript": readout_transcript(b),
                    })
                })
                .collect();
            body["mode"] = "enumerate".into();
            body["degraded"] = branches.first().is_some_and(|b| b.degraded).into();
            body["branches"] = Value::Array(rows);
            body["mean_fidelity"] = mean.into();
            table
        }
        Some(shots) => {
            let seed = cfg.require_seed("loss-readout with --shots")?;
            check_shots(shots)?;
            let mut rng = run_rng(seed);
            let mut seen: BTreeMap<String, (u64, DecodeResult<f64>)> = BTreeMap::new();
            let mut total_f = 0.0;
            let mut degraded = false;
            for _ in 0..shots {
                let b = decode_readout(&state, &pattern, ReadoutMode::Sample(&mut rng))?
                    .pop()
                    .expect("one sampled branch");
                total_f += b.fidelity(&input);
                degraded = b.degraded;
                seen.entry(readout_key(&b)).or_insert((0, b)).0 += 1;
            }
            let mut table = Table::new(&["branch", "count", "frequency", "probability", "correction", "fidelity"]);
            let rows: Vec<Value> = seen
                .iter()
                .map(|(key, (count, b))| {
                    let freq = *count as f64 / shots as f64;
                    let f = b.fidelity(&input);
                    table.push(vec![
                        key.clone(),
                        count.to_string(),
                        num(freq),
                        num(b.probability),
                        format!("{:?}", b.correction),
                        num(f),
                    ]);
                    json!({
                        "branch": key,
                        "count": count,
                        "frequency": freq,
                        "probability": b.probability,
                        "correction": b.correction,
                        "fidelity": f,
                        "transcript": readout_transcript(b),
                    })
                })
                .collect();
            body["mode"] = "sample".into();
            body["seed"] = seed.into();
            body["shots"] = shots.into();
            body["degraded"] = degraded.into();
            body["branches"] = Value::Array(rows);
            body["mean_fidelity"] = (total_f / shots as f64).into();
            table
        }
    };
    Ok((body, table, None))
}

fn check_shots(shots: u64) -> Result<(), CliError> {
    if shots == 0 {
        return Err(CliError::Config("shots must be at least 1".into()));
    }
    Ok(())
}

fn branch_row(b: &ConnectionBranch<f64>, probability: f64) -> Vec<String> {
    let w = &b.witness;
    vec![
        b.key.clone(),
        num(probability),
        num(w.xx),
        num(w.yy),
        num(w.zz),
        num(w.fidelity),
        num(w.witness),
    ]
}

fn branch_json(b: &ConnectionBranch<f64>) -> Value {
    let w = &b.witness;
    json!({
        "branch": b.key,
        "probability": b.probability,
        "correction": b.correction,
        "xx": w.xx,
        "yy": w.yy,
        "zz": w.zz,
        "F": w.fidelity,
        "W": w.witness,
        "transcript": b.transcript,
    })
}

const BRANCH_COLUMNS: [&str; 7] = ["branch", "probability", "xx", "yy", "zz", "F", "W"];

fn run_scenario(cfg: &RunConfig, mut scenario: NetworkScenario, lost: usize) -> Result<Output, CliError> {
    let noise = cfg.noise()?;
    scenario.visibility = noise;
    let mut body = json!({
        "scenario": scenario.name,
        "lost": lost,
        "lost_photons": scenario.loss,
        "noise": noise,
    });
    let table = match cfg.shots {
        None => {
            let branches = run_connection::<f64>(&scenario, ConnectionMode::Enumerate)?;
            let mut table = Table::new(&BRANCH_COLUMNS);
            let (mut f, mut w) = (0.0, 0.0);
            for b in &branches {
                f += b.probability * b.witness.fidelity;
                w += b.probability * b.witness.witness;
                table.push(branch_row(b, b.probability));
            }
            body["mode"] = "enumerate".into();
            body["branches"] = branches.iter().map(branch_json).collect();
            body["mean"] = json!({ "F": f, "W": w });
            table
        }
        Some(shots) => {
            let seed = cfg.require_seed("a sampled connection run")?;
            check_shots(shots)?;
            let mut rng = run_rng(seed);
            let mut seen: BTreeMap<String, (u64, ConnectionBranch<f64>)> = BTreeMap::new();
            let (mut f, mut w) = (0.0, 0.0);
            for _ in 0..shots {
                let b = run_connection::<f64>(&scenario, ConnectionMode::Sample(&mut rng))?
                    .pop()
                    .expect("one sampled branch");
                f += b.witness.fidelity;
                w += b.witness.witness;
                seen.entry(b.key.clone()).or_insert((0, b)).0 += 1;
            }
            let mut columns = BRANCH_COLUMNS.to_vec();
            columns.push("count");
            let mut table = Table::new(&columns);
            let mut rows = Vec::with_capacity(seen.len());
            for (count, b) in seen.values() {
                let freq = *count as f64 / shots as f64;
                let mut row = branch_row(b, freq);
                row.push(count.to_string());
                table.push(row);
                let mut j = branch_json(b);
                j["count"] = (*count).into();
                j["frequency"] = freq.into();
                rows.push(j);
            }
            let n = shots as f64;
            body["mode"] = "sample".into();
            body["seed"] = seed.into();
            body["shots"] = shots.into();
            body["branches"] = Value::Array(rows);
            body["mean"] = json!({ "F": f / n, "W": w / n });
            table
        }
    };
    Ok((body, table, None))
}

fn connect(cfg: &RunConfig) -> Result<Output, CliError> {
    let lost = cfg.lost.unwrap_or(0);
    let scenario = if cfg.bare.unwrap_or(false) {
        if lost > 1 {
            return Err(CliError::Config(format!("the bare control can lose photon 4' only, got lost = {lost}")));
        }
        bare_connection(lost == 1)
    } else {
        partial_connection(lost)?
    };
    run_scenario(cfg, scenario, lost)
}

fn rgs_loss(cfg: &RunConfig) -> Result<Output, CliError> {
    let lost = cfg.lost.unwrap_or(0);
    run_scenario(cfg, logical_loss_scenario(lost)?, lost)
}

fn rate_sweep(cfg: &RunConfig) -> Result<Output, CliError> {
    if cfg.noise.is_some() {
        return Err(CliError::Config("--noise does not apply to rate".into()));
    }
    let eta = RunConfig::check_unit("eta", cfg.eta.unwrap_or(0.9))?;
    let q = RunConfig::check_unit("q", cfg.q.unwrap_or(0.5))?;
    let n_max = cfg.n_max.unwrap_or(8);
    let m_max = cfg.m_max.unwrap_or(4);
    if n_max.saturating_mul(m_max) > MAX_GRID {
        return Err(CliError::Config(format!("grid {n_max}x{m_max} exceeds {MAX_GRID} points")));
    }
    let (metric, metric_name) = match cfg.metric.unwrap_or(MetricArg::Efficiency) {
        MetricArg::PConnect => (Metric::PConnect, "p_connect"),
        MetricArg::Efficiency => (Metric::Efficiency, "efficiency"),
    };
    let grid = rate::sweep(eta, q, n_max, m_max)?;
    let best = rate::optimize(eta, q, n_max, m_max, metric)?;

    let mut table = Table::new(&["eta", "q", "n", "m", "p_side", "p_connect", "efficiency"]);
    for r in &grid {
        table.push(vec![
            num(eta),
            num(q),
            r.n.to_string(),
            r.m.to_string(),
            num(r.p_side),
            num(r.p_connect),
            num(r.efficiency),
        ]);
    }
    let bare_arms = best.n * best.m;
    let mut optimum = json!({
        "eta": eta,
        "q": q,
        "n_max": n_max,
        "m_max": m_max,
        "metric": metric_name,
        "optimum": to_value(&best)?,
        "bare_same_budget": { "n": bare_arms, "p_connect": rate::p_connect_bare(bare_arms, eta, q) },
    });
    if let Some(shots) = cfg.shots {
        let seed = cfg.require_seed("rate with --shots")?;
        check_shots(shots)?;
        let model = RateModel::new(eta, q, best.n, best.m)?;
        optimum["monte_carlo"] = to_value(&rate::monte_carlo_rate(&model, shots, seed)?)?;
        optimum["seed"] = seed.into();
    }
    let mut body = optimum.clone();
    body["sweep"] = to_value(&grid)?;
    Ok((body, table, Some(("optimum", optimum))))
}

fn photonics_rate(cfg: &RunConfig) -> Result<Output, CliError> {
    let exp = SourceParams::<f64>::experiment();
    let source = SourceParams::new(
        cfg.pair_prob.unwrap_or(exp.pair_prob),
        cfg.eta_pair.unwrap_or(exp.eta_pair),
        cfg.rep_rate.unwrap_or(exp.rep_rate),
    )?;
    let visibility = cfg.noise()?.unwrap_or(NoiseParams::<f64>::experiment().visibility);
    let pulses = cfg.shots.unwrap_or(10_000_000);
    check_shots(pulses)?;
    let seed = cfg.require_seed("photonics-rate")?;
    let report = photonics::report(&source, &NoiseParams::new(visibility)?, pulses, seed)?;

    let mut table = Table::new(&["quantity", "value"]);
    let snr = match report.snr_hv.ratio() {
        Some(r) => num(r),
        None => "clean".into(),
    };
    let mc = &report.monte_carlo;
    for (k, v) in [
        ("pair_prob", num(source.pair_prob)),
        ("eta_pair", num(source.eta_pair)),
        ("rep_rate", num(source.rep_rate)),
        ("visibility", num(visibility)),
        ("n_sources", report.n_sources.to_string()),
        ("postselect_factor", num(report.postselect_factor)),
        ("coincidence_rate", num(report.coincidence_rate)),
        ("mc_rate", num(mc.rate)),
        ("mc_sigma", num(mc.sigma)),
        ("mc_events", mc.events.to_string()),
        ("pulses", mc.pulses.to_string()),
        ("snr_hv", snr),
        ("block_fidelity", num(report.block_fidelity)),
    ] {
        table.push(vec![k.into(), v]);
    }
    let mut body = to_value(&report)?;
    body["seed"] = seed.into();
    body["experimental_reference"] = json!({ "snr_hv": 3.71, "block_fidelity": 0.92 });
    Ok((body, table, None))
}
