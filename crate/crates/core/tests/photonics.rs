use apqr_core::photonics::{
    apply_visibility_noise, block_fidelity, coincidence_rate, d_state_support, encoder_factors,
    monte_carlo_coincidence, noisy_d_state, postselected_cnot, postselected_encoding, report, snr_hv,
    NoiseParams, Snr, SourceParams,
};
use apqr_core::qsim::{phi_plus, DensityMatrix, PureState, QuantumState};
use apqr_core::rng::run_rng;
use apqr_core::shor::{encode_shor, CodeLayout, LogicalInput};
use num_complex::Complex;
use rand::Rng;

const TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> Complex<f64> {
    Complex::new(re, im)
}

fn random_state(rng: &mut impl Rng, qubits: usize) -> PureState<f64> {
    let amps = (0..1 << qubits).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    PureState::from_unnormalized(amps).unwrap()
}

/// CNOT by permuting amplitudes: `|c t⟩ → |c, t ⊕ c⟩`.
fn cnot_oracle(state: &PureState<f64>, control: usize, target: usize) -> PureState<f64> {
    let n = state.num_qubits();
    let (cm, tm) = (1 << (n - 1 - control), 1 << (n - 1 - target));
    let amps = (0..1usize << n)
        .map(|i| {
            let src = if i & cm != 0 { i ^ tm } else { i };
            state.amplitude(src)
        })
        .collect();
    PureState::from_amplitudes(amps).unwrap()
}

fn assert_same(a: &PureState<f64>, b: &PureState<f64>) {
    for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
        assert!((x - y).norm() < TOL, "{x} vs {y}");
    }
}

#[test]
fn cnot_success_branch_is_ideal() {
    for i in 0..4 {
        let s = PureState::<f64>::computational(2, i).unwrap();
        let (out, p) = postselected_cnot(&s, 0, 1).unwrap();
        assert_eq!(p, 0.5);
        assert_same(&out, &cnot_oracle(&s, 0, 1));
    }
    let mut rng = run_rng(5);
    for _ in 0..10 {
        let s = random_state(&mut rng, 3);
        let (out, p) = postselected_cnot(&s, 2, 0).unwrap();
        assert_eq!(p, 0.5);
        assert_same(&out, &cnot_oracle(&s, 2, 0));
        let (rho, _) = postselected_cnot(&s.to_density(), 2, 0).unwrap();
        assert!((rho.fidelity(&cnot_oracle(&s, 2, 0)).unwrap() - 1.0).abs() < TOL);
    }
}

#[test]
fn parity_check_oracle_on_plus_zero() {
    // dual-rail PBS: rotate the target to |+⟩, keep the even-parity part
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let plus = [c(h, 0.0), c(h, 0.0)];
    let rotated_target = [c(h, 0.0), c(h, 0.0)];
    let mut branch = vec![c(0.0, 0.0); 4];
    for a in 0..2 {
        for b in 0..2 {
            if a == b {
                branch[2 * a + b] = plus[a] * rotated_target[b];
            }
        }
    }
    let weight: f64 = branch.iter().map(|x| x.norm_sqr()).sum();
    assert!((weight - 0.5).abs() < TOL);
    let oracle = PureState::from_unnormalized(branch).unwrap();

    let input = PureState::from_amplitudes(vec![c(h, 0.0), c(0.0, 0.0), c(h, 0.0), c(0.0, 0.0)]).unwrap();
    let (out, p) = postselected_cnot(&input, 0, 1).unwrap();
    assert!((p - weight).abs() < TOL);
    assert_same(&out, &oracle);
    assert_same(&out, &phi_plus());
}

#[test]
fn encoder_chain_factor() {
    let layout = CodeLayout::shor();
    assert_eq!(encoder_factors(&layout), vec![0.5; 4]);
    let input = LogicalInput::<f64>::from_bloch(1.1, 0.4).unwrap();
    let (state, factor) = postselected_encoding(&input, &layout).unwrap();
    assert!((factor - 0.0625).abs() < 1e-15);
    assert!((state.fidelity(&encode_shor(&input).unwrap()).unwrap() - 1.0).abs() < TOL);
}

#[test]
fn coincidence_closed_form() {
    let unit = SourceParams::new(1.0, 1.0, 80e6).unwrap();
    assert_eq!(coincidence_rate(&unit, 5, 1.0).unwrap(), 80e6);
    let dark = SourceParams::new(0.0, 0.38, 80e6).unwrap();
    assert_eq!(coincidence_rate(&dark, 5, 0.0625).unwrap(), 0.0);
    let exp = SourceParams::<f64>::experiment();
    let r = coincidence_rate(&exp, 5, 0.0625).unwrap();
    assert!((r - 80e6 * (0.06f64 * 0.38).powi(5) * 0.0625).abs() < 1e-12);
    assert!(SourceParams::new(0.5, 0.5, 0.0).is_err());
    assert!(SourceParams::new(1.5, 0.5, 1.0).is_err());
}

#[test]
fn coincidence_monte_carlo_within_three_sigma() {
    let pulses = 10_000_000;
    for (params, seed) in [
        (SourceParams::<f64>::experiment(), 31),
        (SourceParams::new(0.5, 0.8, 80e6).unwrap(), 32),
    ] {
        let exact = coincidence_rate(&params, 5, 0.0625).unwrap();
        let est = monte_carlo_coincidence(&params, 5, 0.0625, pulses, seed).unwrap();
        assert!((est.rate - exact).abs() <= 3.0 * est.sigma + 1e-9, "{est:?} vs {exact}");
    }
    let params = SourceParams::new(0.5, 0.8, 80e6).unwrap();
    let a = monte_carlo_coincidence(&params, 5, 0.0625, 100_000, 3).unwrap();
    let b = monte_carlo_coincidence(&params, 5, 0.0625, 100_000, 3).unwrap();
    assert_eq!(a, b);
}

#[test]
fn visibility_noise_properties() {
    let mut rng = run_rng(8);
    for _ in 0..5 {
        let s = random_state(&mut rng, 3);
        let same = apply_visibility_noise(&s, &[0, 2], 1.0).unwrap();
        assert!((same.fidelity(&s).unwrap() - 1.0).abs() < TOL);
        for v in [0.0, 0.3, 0.7] {
            let rho = apply_visibility_noise(&s, &[0, 1, 2], v).unwrap();
            assert!((rho.trace().re - 1.0).abs() < TOL);
            assert!(rho.min_eigenvalue() > -1e-9);
            assert!(rho.hermiticity_deviation() < TOL);
        }
    }
    let bell = apply_visibility_noise(&phi_plus::<f64>(), &[0], 0.0).unwrap();
    assert!((bell.fidelity(&phi_plus()).unwrap() - 0.5).abs() < TOL);
    for r in 0..4 {
        for col in 0..4 {
            if r != col {
                assert!(bell.entry(r, col).norm() < TOL);
            }
        }
    }
    assert!(apply_visibility_noise(&phi_plus::<f64>(), &[0], 1.2).is_err());
}

#[test]
fn snr_reference_points() {
    let support = d_state_support();
    assert_eq!(support.len(), 4);
    assert_eq!(snr_hv(&noisy_d_state(&NoiseParams::new(1.0).unwrap()).unwrap()).unwrap(), Snr::Clean);
    let uniform = DensityMatrix::<f64>::maximally_mixed(9).unwrap();
    let r = snr_hv(&uniform).unwrap().ratio().unwrap();
    assert!((r - 4.0 / 508.0).abs() < 1e-12);
    let noisy = snr_hv(&noisy_d_state(&NoiseParams::<f64>::experiment()).unwrap()).unwrap();
    let r = noisy.ratio().unwrap();
    assert!(r.is_finite() && r > 0.0);
    assert!(snr_hv(&DensityMatrix::<f64>::maximally_mixed(3).unwrap()).is_err());
    assert_eq!(serde_json::to_string(&Snr::Clean).unwrap(), "\"clean\"");
}

#[test]
fn block_fidelity_falls_with_visibility() {
    let mut last = f64::INFINITY;
    for v in [1.0, 0.9, 0.7, 0.5, 0.2, 0.0] {
        let f = block_fidelity(&NoiseParams::new(v).unwrap()).unwrap();
        assert!(f <= last + TOL);
        // one dephased control: F = (1 + V)/2
        assert!((f - (1.0 + v) / 2.0).abs() < TOL, "V = {v}: {f}");
        if v < 1.0 {
            assert!(f < 1.0);
        }
        last = f;
    }
}

#[test]
fn report_is_reproducible() {
    let src = SourceParams::<f64>::experiment();
    let noise = NoiseParams::<f64>::experiment();
    let a = serde_json::to_string(&report(&src, &noise, 100_000, 4).unwrap()).unwrap();
    let b = serde_json::to_string(&report(&src, &noise, 100_000, 4).unwrap()).unwrap();
    assert_eq!(a, b);
    assert!(a.contains("\"stage_factors\":[0.5,0.5,0.5,0.5]"));
}
