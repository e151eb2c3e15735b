//! Connection probability of a repeater node with `n` arms per side, each
//! arm a logical qubit of `m` photons.
//!
//! Model: an arm is alive while at least one of its photons survives and
//! intact when all `m` do. A side succeeds when no arm is fully lost and at
//! least one intact arm's BSM (success probability `q`) succeeds; BSMs are
//! attempted only on intact arms, independently. Both sides must succeed.
//! The bare GHZ node needs every one of its `2n` photons.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{count_successes, SimRng};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateModel<T> {
    /// Per-photon transmission.
    pub eta: T,
    /// BSM success probability on an intact arm.
    pub q: T,
    /// Arms per side.
    pub n: usize,
    /// Photons per arm.
    pub m: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateResult<T> {
    pub n: usize,
    pub m: usize,
    pub p_side: T,
    pub p_connect: T,
    /// RGS photons, `2·n·m`.
    pub photons_used: usize,
    pub efficiency: T,
}

fn check_prob<T: Scalar>(name: &str, p: T) -> Result<()> {
    if !(T::zero()..=T::one()).contains(&p) {
        return Err(Error::InvalidParameter(format!("{name} = {p} outside [0, 1]")));
    }
    Ok(())
}

impl<T: Scalar> RateModel<T> {
    pub fn new(eta: T, q: T, n: usize, m: usize) -> Result<Self> {
        check_prob("eta", eta)?;
        check_prob("q", q)?;
        if n == 0 || m == 0 {
            return Err(Error::InvalidParameter(format!("n = {n}, m = {m} must be at least 1")));
        }
        Ok(RateModel { eta, q, n, m })
    }

    pub fn photons_used(&self) -> usize {
        2 * self.n * self.m
    }

    pub fn p_side(&self) -> T {
        let alive = p_logical_alive(self.eta, self.m);
        let good = self.q * powi(self.eta, self.m);
        powi(alive, self.n) - powi(alive - good, self.n)
    }

    pub fn p_connect(&self) -> T {
        let s = self.p_side();
        s * s
    }

    pub fn evaluate(&self) -> RateResult<T> {
        let p_side = self.p_side();
        let p_connect = p_side * p_side;
        let photons_used = self.photons_used();
        RateResult {
            n: self.n,
            m: self.m,
            p_side,
            p_connect,
            photons_used,
            efficiency: p_connect / T::from_usize(photons_used).expect("small"),
        }
    }
}

fn powi<T: Scalar>(x: T, k: usize) -> T {
    x.powi(k as i32)
}

/// `1 − (1 − η)^m`.
pub fn p_logical_alive<T: Scalar>(eta: T, m: usize) -> T {
    T::one() - powi(T::one() - eta, m)
}

pub fn p_side<T: Scalar>(model: &RateModel<T>) -> T {
    model.p_side()
}

/// `η^{2n} (1 − (1 − q)^n)²`.
pub fn p_connect_bare<T: Scalar>(n: usize, eta: T, q: T) -> T {
    let side = T::one() - powi(T::one() - q, n);
    powi(eta, 2 * n) * side * side
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    PConnect,
    Efficiency,
}

impl<T: Scalar> RateResult<T> {
    pub fn score(&self, metric: Metric) -> T {
        match metric {
            Metric::PConnect => self.p_connect,
            Metric::Efficiency => self.efficiency,
        }
    }
}

/// Every `(n, m)` with `1 ≤ n ≤ n_max`, `1 ≤ m ≤ m_max`, `n` outer.
pub fn sweep<T: Scalar>(eta: T, q: T, n_max: usize, m_max: usize) -> Result<Vec<RateResult<T>>> {
    let mut out = Vec::with_capacity(n_max * m_max);
    for n in 1..=n_max {
        for m in 1..=m_max {
            out.push(RateModel::new(eta, q, n, m)?.evaluate());
        }
    }
    Ok(out)
}

/// Grid argmax of `metric`; ties go to fewer photons, then smaller `n`.
pub fn optimize<T: Scalar>(
    eta: T,
    q: T,
    n_max: usize,
    m_max: usize,
    metric: Metric,
) -> Result<RateResult<T>> {
    check_prob("eta", eta)?;
    check_prob("q", q)?;
    let grid = sweep(eta, q, n_max, m_max)?;
    grid.into_iter()
        .reduce(|best, r| {
            let (a, b) = (r.score(metric), best.score(metric));
            let better = a > b || (a == b && (r.photons_used, r.n) < (best.photons_used, best.n));
            if better {
                r
            } else {
                best
            }
        })
        .ok_or_else(|| Error::InvalidParameter("empty (n, m) grid".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub shots: u64,
}

impl McEstimate {
    fn from_hits(hits: u64, shots: u64) -> Self {
        let p = hits as f64 / shots as f64;
        McEstimate {
            estimate: p,
            std_error: (p * (1.0 - p) / shots as f64).sqrt(),
            shots,
        }
    }
}

/// One side of the encoded node. Per arm: `m` survival draws, then one BSM
/// draw if the arm is intact.
fn sample_side(rng: &mut SimRng, eta: f64, q: f64, n: usize, m: usize) -> bool {
    let mut all_alive = true;
    let mut heralded = false;
    for _ in 0..n {
        let mut survivors = 0;
        for _ in 0..m {
            survivors += (rng.random::<f64>() < eta) as usize;
        }
        if survivors == 0 {
            all_alive = false;
        }
        if survivors == m && rng.random::<f64>() < q {
            heralded = true;
        }
    }
    all_alive && heralded
}

/// One side of the bare node. Per arm: one survival draw and one BSM draw.
fn sample_bare_side(rng: &mut SimRng, eta: f64, q: f64, n: usize) -> bool {
    let mut arrived = true;
    let mut heralded = false;
    for _ in 0..n {
        arrived &= rng.random::<f64>() < eta;
        heralded |= rng.random::<f64>() < q;
    }
    arrived && heralded
}

fn check_shots(shots: u64) -> Result<()> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be at least 1".into()));
    }
    Ok(())
}

/// Monte-Carlo estimate of `p_side`.
pub fn monte_carlo_side<T: Scalar>(model: &RateModel<T>, shots: u64, seed: u64) -> Result<McEstimate> {
    check_shots(shots)?;
    let (eta, q) = (model.eta.as_f64(), model.q.as_f64());
    let hits = count_successes(seed, shots, |rng| sample_side(rng, eta, q, model.n, model.m));
    Ok(McEstimate::from_hits(hits, shots))
}

/// Monte-Carlo estimate of `p_connect`; each shot samples the left side,
/// then the right.
pub fn monte_carlo_rate<T: Scalar>(model: &RateModel<T>, shots: u64, seed: u64) -> Result<McEstimate> {
    check_shots(shots)?;
    let (eta, q) = (model.eta.as_f64(), model.q.as_f64());
    let hits = count_successes(seed, shots, |rng| {
        let left = sample_side(rng, eta, q, model.n, model.m);
        let right = sample_side(rng, eta, q, model.n, model.m);
        left && right
    });
    Ok(McEstimate::from_hits(hits, shots))
}

/// Monte-Carlo estimate of `p_connect_bare`.
pub fn monte_carlo_bare(n: usize, eta: f64, q: f64, shots: u64, seed: u64) -> Result<McEstimate> {
    check_shots(shots)?;
    check_prob("eta", eta)?;
    check_prob("q", q)?;
    let hits = count_successes(seed, shots, |rng| {
        let left = sample_bare_side(rng, eta, q, n);
        let right = sample_bare_side(rng, eta, q, n);
        left && right
    });
    Ok(McEstimate::from_hits(hits, shots))
}
