//! Linear-optics layer: post-selected PBS gates, SPDC coincidence rates and
//! a visibility-based dephasing model.
//!
//! Gates are simulated on qubits; a post-selected gate acts ideally on its
//! success branch and contributes a factor `1/2` to the heralding rate.
//! Sources emit at most one pair per pulse.

use rand::Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qsim::{DensityMatrix, Gate, PureState, QuantumState};
use crate::rng::{count_successes, SimRng};
use crate::scalar::Scalar;
use crate::shor::{apply_step, d_state, encoding_circuit, CircuitStep, CodeLayout, LogicalInput};

/// Success probability of one PBS-based gate.
pub const PBS_SUCCESS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceParams<T> {
    /// Pair emission probability per pulse.
    pub pair_prob: T,
    /// Collection efficiency of both photons of a pair.
    pub eta_pair: T,
    /// Pulses per second.
    pub rep_rate: T,
}

impl<T: Scalar> SourceParams<T> {
    pub fn new(pair_prob: T, eta_pair: T, rep_rate: T) -> Result<Self> {
        let s = SourceParams {
            pair_prob,
            eta_pair,
            rep_rate,
        };
        s.validate()?;
        Ok(s)
    }

    /// 80 MHz pump, `P = 0.06`, `η = 0.38`.
    pub fn experiment() -> Self {
        SourceParams {
            pair_prob: T::lit(0.06),
            eta_pair: T::lit(0.38),
            rep_rate: T::lit(80e6),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_unit("pair_prob", self.pair_prob)?;
        check_unit("eta_pair", self.eta_pair)?;
        if !(self.rep_rate > T::zero()) || !self.rep_rate.is_finite() {
            return Err(Error::InvalidParameter(format!("rep_rate = {} must be positive", self.rep_rate)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams<T> {
    /// Interference visibility at each PBS.
    pub visibility: T,
}

impl<T: Scalar> NoiseParams<T> {
    pub fn new(visibility: T) -> Result<Self> {
        check_unit("visibility", visibility)?;
        Ok(NoiseParams { visibility })
    }

    /// Average visibility `V = 0.70`.
    pub fn experiment() -> Self {
        NoiseParams {
            visibility: T::lit(0.70),
        }
    }
}

fn check_unit<T: Scalar>(name: &str, p: T) -> Result<()> {
    if !(T::zero()..=T::one()).contains(&p) {
        return Err(Error::InvalidParameter(format!("{name} = {p} outside [0, 1]")));
    }
    Ok(())
}

/// Success branch of a PBS CNOT and its probability.
pub fn postselected_cnot<T: Scalar, S: QuantumState<T>>(
    state: &S,
    control: usize,
    target: usize,
) -> Result<(S, T)> {
    let mut out = state.clone();
    out.apply_unitary(&Gate::cnot(), &[control, target])?;
    Ok((out, T::lit(PBS_SUCCESS)))
}

/// Heralded CNOT: `None` on the failure branch. Draws one uniform variate.
pub fn sample_postselected_cnot<T: Scalar, S: QuantumState<T>, R: Rng + ?Sized>(
    state: &S,
    control: usize,
    target: usize,
    rng: &mut R,
) -> Result<Option<S>> {
    let (out, p) = postselected_cnot(state, control, target)?;
    Ok((rng.random::<f64>() < p.as_f64()).then_some(out))
}

/// Success branch of a quantum encoder copying `control` onto `targets`
/// (all in `|0⟩`); one PBS, probability `1/2`.
pub fn postselected_encoder<T: Scalar, S: QuantumState<T>>(
    state: &S,
    control: usize,
    targets: &[usize],
) -> Result<(S, T)> {
    let mut out = state.clone();
    apply_step(
        &mut out,
        &CircuitStep::Encoder {
            control,
            targets: targets.to_vec(),
        },
    )?;
    Ok((out, T::lit(PBS_SUCCESS)))
}

/// Post-selection factor of each encoder in the encoding circuit of `layout`.
pub fn encoder_factors(layout: &CodeLayout) -> Vec<f64> {
    encoding_circuit(layout)
        .iter()
        .filter(|s| matches!(s, CircuitStep::Encoder { .. }))
        .map(|_| PBS_SUCCESS)
        .collect()
}

/// Encodes `input` through post-selected encoders, returning the success
/// branch and the product of the post-selection factors.
pub fn postselected_encoding<T: Scalar>(input: &LogicalInput<T>, layout: &CodeLayout) -> Result<(PureState<T>, T)> {
    let mut state = input.ket();
    if layout.num_qubits() > 1 {
        state = state.tensor(&PureState::basis(layout.num_qubits() - 1)?)?;
    }
    let mut factor = T::one();
    for step in encoding_circuit(layout) {
        match &step {
            CircuitStep::Encoder { control, targets } => {
                let (next, p) = postselected_encoder(&state, *control, targets)?;
                state = next;
                factor *= p;
            }
            CircuitStep::Hadamard(_) => apply_step(&mut state, &step)?,
        }
    }
    Ok((state, factor))
}

/// `rep_rate · (P · η_pair)^n_sources · postselect_factor`, events per second.
pub fn coincidence_rate<T: Scalar>(params: &SourceParams<T>, n_sources: usize, postselect_factor: T) -> Result<T> {
    params.validate()?;
    check_unit("postselect_factor", postselect_factor)?;
    Ok(params.rep_rate * (params.pair_prob * params.eta_pair).powi(n_sources as i32) * postselect_factor)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    /// Events per second.
    pub rate: f64,
    /// One standard error of `rate`, from the closed-form event probability.
    pub sigma: f64,
    pub pulses: u64,
    pub events: u64,
}

/// Pulse-by-pulse sampling. Per pulse and source: one emission draw, one
/// collection draw; then one post-selection draw. A pulse stops drawing at
/// its first failure.
pub fn monte_carlo_coincidence<T: Scalar>(
    params: &SourceParams<T>,
    n_sources: usize,
    postselect_factor: T,
    pulses: u64,
    seed: u64,
) -> Result<RateEstimate> {
    let expected = coincidence_rate(params, n_sources, postselect_factor)?;
    if pulses == 0 {
        return Err(Error::InvalidParameter("pulses must be at least 1".into()));
    }
    let (p, eta, f) = (
        params.pair_prob.as_f64(),
        params.eta_pair.as_f64(),
        postselect_factor.as_f64(),
    );
    let pulse = |rng: &mut SimRng| {
        (0..n_sources).all(|_| rng.random::<f64>() < p && rng.random::<f64>() < eta) && rng.random::<f64>() < f
    };
    let events = count_successes(seed, pulses, pulse);
    let rep = params.rep_rate.as_f64();
    let p_event = expected.as_f64() / rep;
    Ok(RateEstimate {
        rate: rep * events as f64 / pulses as f64,
        sigma: rep * (p_event * (1.0 - p_event) / pulses as f64).sqrt(),
        pulses,
        events,
    })
}

/// Dephases each site in turn: `ρ → V ρ + (1 − V)(ρ + ZρZ)/2`.
pub fn apply_visibility_noise<T: Scalar, S: QuantumState<T>>(
    state: &S,
    sites: &[usize],
    visibility: T,
) -> Result<DensityMatrix<T>> {
    check_unit("visibility", visibility)?;
    let mut rho = state.to_density();
    for &q in sites {
        rho.dephase(q, visibility)?;
    }
    Ok(rho)
}

/// Codeword of `input` with each encoder's control photon dephased right
/// after its PBS.
pub fn noisy_encoding<T: Scalar>(
    input: &LogicalInput<T>,
    layout: &CodeLayout,
    noise: &NoiseParams<T>,
) -> Result<DensityMatrix<T>> {
    check_unit("visibility", noise.visibility)?;
    let mut rho = input.ket().to_density();
    if layout.num_qubits() > 1 {
        rho = rho.tensor(&PureState::basis(layout.num_qubits() - 1)?.to_density())?;
    }
    for step in encoding_circuit(layout) {
        apply_step(&mut rho, &step)?;
        if let CircuitStep::Encoder { control, .. } = step {
            rho.dephase(control, noise.visibility)?;
        }
    }
    Ok(rho)
}

/// Noisy nine-qubit `|D⟩_l`.
pub fn noisy_d_state<T: Scalar>(noise: &NoiseParams<T>) -> Result<DensityMatrix<T>> {
    noisy_encoding(&LogicalInput::d(), &CodeLayout::shor(), noise)
}

/// Fidelity of one three-photon code block `(|000⟩ + |111⟩)/√2` made by a
/// noisy encoder.
pub fn block_fidelity<T: Scalar>(noise: &NoiseParams<T>) -> Result<T> {
    let layout = CodeLayout::new(1, 3)?;
    let input = LogicalInput::h();
    let rho = noisy_encoding(&input, &layout, noise)?;
    let ideal = crate::shor::encode_qpc(&input, 1, 3)?;
    rho.fidelity(&ideal)
}

/// Signal-to-noise ratio of an H/V-basis readout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Snr {
    /// No weight outside the ideal support.
    Clean,
    Ratio(f64),
}

impl Snr {
    pub fn ratio(&self) -> Option<f64> {
        match self {
            Snr::Clean => None,
            Snr::Ratio(r) => Some(*r),
        }
    }
}

impl Serialize for Snr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Snr::Clean => s.serialize_str("clean"),
            Snr::Ratio(r) => s.serialize_f64(*r),
        }
    }
}

/// Computational strings carrying weight in the ideal `|D⟩_l`.
pub fn d_state_support() -> Vec<usize> {
    d_state::<f64>().support(1e-12)
}

/// Probability on the ideal `|D⟩_l` strings over the probability elsewhere.
pub fn snr_hv<T: Scalar>(rho: &DensityMatrix<T>) -> Result<Snr> {
    if rho.num_qubits() != 9 {
        return Err(Error::DimensionMismatch(rho.num_qubits(), 9));
    }
    let support = d_state_support();
    let probs = rho.probabilities();
    let signal: f64 = support.iter().map(|&i| probs[i].as_f64()).sum();
    let total: f64 = probs.iter().map(|p| p.as_f64()).sum();
    let noise = total - signal;
    if noise <= T::psd_tol().as_f64() {
        return Ok(Snr::Clean);
    }
    Ok(Snr::Ratio(signal / noise))
}

#[derive(Debug, Clone, Serialize)]
pub struct PhotonicsReport {
    pub source: SourceParams<f64>,
    pub visibility: f64,
    pub n_sources: usize,
    /// Post-selection factor of each encoder, in circuit order.
    pub stage_factors: Vec<f64>,
    pub postselect_factor: f64,
    /// Predicted rate of all-photon coincidences, per second.
    pub coincidence_rate: f64,
    pub monte_carlo: RateEstimate,
    pub snr_hv: Snr,
    pub block_fidelity: f64,
}

/// Rate, post-selection and noise figures of the nine-photon encoding with
/// five pair sources.
pub fn report(source: &SourceParams<f64>, noise: &NoiseParams<f64>, pulses: u64, seed: u64) -> Result<PhotonicsReport> {
    const SOURCES: usize = 5;
    let stage_factors = encoder_factors(&CodeLayout::shor());
    let factor: f64 = stage_factors.iter().product();
    Ok(PhotonicsReport {
        source: *source,
        visibility: noise.visibility,
        n_sources: SOURCES,
        postselect_factor: factor,
        coincidence_rate: coincidence_rate(source, SOURCES, factor)?,
        monte_carlo: monte_carlo_coincidence(source, SOURCES, factor, pulses, seed)?,
        snr_hv: snr_hv(&noisy_d_state(noise)?)?,
        block_fidelity: block_fidelity(noise)?,
        stage_factors,
    })
}
