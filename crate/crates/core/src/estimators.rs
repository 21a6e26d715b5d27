//! Hoeffding-calibrated Monte-Carlo estimation of spectral quantities, and
//! the distributional verification experiments.
//!
//! Every estimator here has an exact counterpart in [`crate::fourier`] that
//! tests use as ground truth. Estimators accept a *value function* mapping a
//! labeled sample to a real in `[-1, 1]`; the plain spectral quantities use
//! the label itself, the boosting learners substitute reweighted residuals.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{Point, TargetFunction};
use crate::error::{Error, Result};
use crate::fourier::rho_pow;
use crate::oracles::{default_rejection_budget, descending_cycle, Mode, OracleSession};

/// Sample sizing for empirical means of bounded variables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    lambda: f64,
    delta: f64,
    range: (f64, f64),
}

impl EstimatorConfig {
    pub fn new(lambda: f64, delta: f64, range: (f64, f64)) -> Result<Self> {
        if lambda <= 0.0 {
            return Err(Error::parameter("tolerance lambda must be positive"));
        }
        if !(0.0..1.0).contains(&delta) || delta == 0.0 {
            return Err(Error::parameter("confidence delta must lie in (0, 1)"));
        }
        if range.1 <= range.0 {
            return Err(Error::parameter("value range must satisfy d > c"));
        }
        Ok(EstimatorConfig { lambda, delta, range })
    }

    /// Config for statistics bounded in `[-1, 1]`.
    pub fn unit(lambda: f64, delta: f64) -> Result<Self> {
        Self::new(lambda, delta, (-1.0, 1.0))
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Smallest m with `2 exp(-2 lambda^2 m / (d-c)^2) <= delta`:
    /// `m = ceil((d-c)^2 ln(2/delta) / (2 lambda^2))`, at least 1.
    pub fn samples(&self) -> u64 {
        let width = self.range.1 - self.range.0;
        let m = (width * width * (2.0 / self.delta).ln() / (2.0 * self.lambda * self.lambda))
            .ceil();
        (m as u64).max(1)
    }

    /// Same tolerance split evenly over `parts` additive sub-estimates.
    pub fn split(&self, parts: u64) -> Result<Self> {
        Self::new(
            self.lambda / parts as f64,
            self.delta / parts as f64,
            self.range,
        )
    }
}

/// `hoeffding_samples(cfg)` as a free function.
pub fn hoeffding_samples(cfg: &EstimatorConfig) -> u64 {
    cfg.samples()
}

fn label_value(_: &Point, label: i8) -> f64 {
    label as f64
}

/// One labeled sample that is (near-)uniform: a UQ draw, an RW sample after
/// a mixing gap of `ceil(5 n ln n)` steps, or a CRW sample after a full
/// cycle of n steps.
pub(crate) fn uniform_labeled(session: &mut OracleSession) -> Result<(Point, i8)> {
    match session.mode() {
        Mode::Uq => session.uq_draw(),
        Mode::Rw => {
            let n = session.alphabet().dim() as f64;
            let gap = (5.0 * n * n.ln()).ceil().max(1.0) as usize;
            let mut last = session.rw_step()?;
            for _ in 1..gap {
                last = session.rw_step()?;
            }
            Ok(last)
        }
        Mode::Crw => {
            let mut last = session.crw_step()?;
            for _ in 1..session.alphabet().dim() {
                last = session.crw_step()?;
            }
            Ok(last)
        }
        _ => Err(Error::contract(
            "coefficient estimation needs a UQ, RW or CRW session",
        )),
    }
}

/// Estimates the Fourier coefficient `f^(a) = E[f(x) chi_a(x)]`.
pub fn estimate_coefficient(
    session: &mut OracleSession,
    a: &crate::domain::FreqIndex,
    cfg: &EstimatorConfig,
) -> Result<Complex64> {
    estimate_coefficient_weighted(session, a, cfg, &label_value)
}

/// Weighted variant: estimates `E[phi(x) chi_a(x)]` where `phi` is computed
/// from the labeled sample.
pub fn estimate_coefficient_weighted(
    session: &mut OracleSession,
    a: &crate::domain::FreqIndex,
    cfg: &EstimatorConfig,
    value: &dyn Fn(&Point, i8) -> f64,
) -> Result<Complex64> {
    let alphabet = session.alphabet();
    if a.digits().len() != alphabet.dim() {
        return Err(Error::contract("frequency vector dimension mismatch"));
    }
    let b = alphabet.base() as u32;
    let roots: Vec<Complex64> = (0..b)
        .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / b as f64))
        .collect();
    let m = cfg.samples();
    let mut acc = Complex64::ZERO;
    for _ in 0..m {
        let (x, label) = uniform_labeled(session)?;
        let mut e: u32 = 0;
        for (&ai, &xi) in a.digits().iter().zip(x.digits()) {
            e = (e + ai as u32 * xi as u32) % b;
        }
        acc += value(&x, label) * roots[e as usize];
    }
    Ok(acc / m as f64)
}

/// Estimates the prefix energy `L^2_2(C_{a,k})` in the CRW model.
///
/// Requires the session cycle to update coordinates in descending order
/// `(n, n-1, ..., 1)` and to stand at the start of its cycle. Each sample
/// consumes exactly `2n` walk steps: n to reach a fresh uniform point (whose
/// first k digits are `y`), n-k to refresh the suffix into `x`, and k to
/// refresh the prefix into `z`; the statistic is
/// `Re(f*(yx) f(zx) chi_a(y - z))`.
pub fn estimate_prefix_energy_crw(
    session: &mut OracleSession,
    prefix: &[u8],
    cfg: &EstimatorConfig,
) -> Result<f64> {
    estimate_prefix_energy_crw_weighted(session, prefix, cfg, &label_value)
}

pub fn estimate_prefix_energy_crw_weighted(
    session: &mut OracleSession,
    prefix: &[u8],
    cfg: &EstimatorConfig,
    value: &dyn Fn(&Point, i8) -> f64,
) -> Result<f64> {
    let alphabet = session.alphabet();
    let n = alphabet.dim();
    let k = prefix.len();
    if k < 1 || k > n {
        return Err(Error::parameter("prefix length must be in 1..=n"));
    }
    if session.mode() != Mode::Crw || session.cycle() != descending_cycle(n).as_slice() {
        return Err(Error::contract(
            "prefix-energy estimation needs a CRW session with cycle (n, n-1, ..., 1)",
        ));
    }
    if session.query_count() == 0 {
        // Initial uniform example; does not advance the cycle.
        session.crw_step()?;
    } else if session.cycle_position() != 0 {
        return Err(Error::contract(
            "CRW session is not aligned to the start of its cycle",
        ));
    }
    let b = alphabet.base() as u32;
    let roots: Vec<f64> = (0..b)
        .map(|j| (2.0 * std::f64::consts::PI * j as f64 / b as f64).cos())
        .collect();
    let m = cfg.samples();
    let mut acc = 0.0;
    for _ in 0..m {
        // n steps: every coordinate redrawn once, point uniform, cycle back
        // at position 0.
        let mut fresh = session.crw_step()?;
        for _ in 1..n {
            fresh = session.crw_step()?;
        }
        let y: Vec<u8> = fresh.0.digits()[..k].to_vec();
        // n-k steps update coordinates n-1 .. k: the suffix block x.
        let mut yx = fresh;
        for _ in 0..(n - k) {
            yx = session.crw_step()?;
        }
        let v1 = value(&yx.0, yx.1);
        // k steps update coordinates k-1 .. 0: the prefix block z.
        let mut zx = yx;
        for _ in 0..k {
            zx = session.crw_step()?;
        }
        let z = &zx.0.digits()[..k];
        let v2 = value(&zx.0, zx.1);
        let mut e: u32 = 0;
        for ((&ai, &yi), &zi) in prefix.iter().zip(&y).zip(z) {
            e = (e + ai as u32 * ((yi as u32 + b - zi as u32) % b)) % b;
        }
        acc += v1 * v2 * roots[e as usize];
    }
    Ok(acc / m as f64)
}

/// Estimates `T'(I) = E_{D_rho^(I)}[f(x) f(y)]` by conditioned NS sampling.
pub fn estimate_t_prime_ns(
    session: &mut OracleSession,
    coords: &[usize],
    cfg: &EstimatorConfig,
    budget: u64,
) -> Result<f64> {
    estimate_t_prime_ns_weighted(session, coords, cfg, budget, &label_value)
}

pub fn estimate_t_prime_ns_weighted(
    session: &mut OracleSession,
    coords: &[usize],
    cfg: &EstimatorConfig,
    budget: u64,
    value: &dyn Fn(&Point, i8) -> f64,
) -> Result<f64> {
    if !matches!(session.mode(), Mode::Ns(_)) {
        return Err(Error::contract("T' estimation needs an NS session"));
    }
    let m = cfg.samples();
    let mut acc = 0.0;
    for _ in 0..m {
        let (s, _) = session.ns_draw_conditioned(coords, budget)?;
        acc += value(&s.x, s.fx) * value(&s.y, s.fy);
    }
    Ok(acc / m as f64)
}

/// Estimates `T(I)` by inclusion-exclusion over the `2^|I|` subsets `J`:
/// `T(I) = sum_J (-1)^|J| T'(J)`. The tolerance budget of `cfg` is split
/// evenly across the sub-calls, so the combined error stays within
/// `cfg.lambda()`.
pub fn estimate_t_ns(
    session: &mut OracleSession,
    coords: &[usize],
    cfg: &EstimatorConfig,
) -> Result<f64> {
    estimate_t_ns_weighted(session, coords, cfg, &label_value)
}

pub fn estimate_t_ns_weighted(
    session: &mut OracleSession,
    coords: &[usize],
    cfg: &EstimatorConfig,
    value: &dyn Fn(&Point, i8) -> f64,
) -> Result<f64> {
    let rho = match session.mode() {
        Mode::Ns(rho) => rho,
        _ => return Err(Error::contract("T estimation needs an NS session")),
    };
    let k = coords.len();
    if k >= 63 {
        return Err(Error::parameter("|I| too large for inclusion-exclusion"));
    }
    let parts = 1u64 << k;
    let sub_cfg = cfg.split(parts)?;
    let mut acc = 0.0;
    for mask in 0..parts {
        let subset: Vec<usize> = coords
            .iter()
            .enumerate()
            .filter(|(j, _)| mask >> j & 1 == 1)
            .map(|(_, &c)| c)
            .collect();
        let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        let budget = default_rejection_budget(rho, subset.len());
        acc += sign * estimate_t_prime_ns_weighted(session, &subset, &sub_cfg, budget, value)?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Verification experiments
// ---------------------------------------------------------------------------

/// Result of the collision-decay experiment.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CollisionDecay {
    pub rho: f64,
    pub n: usize,
    pub samples: u64,
    pub empirical: f64,
    pub analytic: f64,
}

/// Draws independent NS pairs `(x,y)` and `(u,v)` over `[2]^n`, forms
/// `gamma_1 = x xor u` and `gamma_2 = y xor v`, and measures
/// `P[gamma_1 = gamma_2]` against the closed form
/// `(1 - (1-rho) + (1-rho)^2/2)^n`.
pub fn collision_decay_experiment(rho: f64, n: usize, samples: u64, seed: u64) -> CollisionDecay {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let q = 1.0 - rho;
    let mut hits = 0u64;
    let noisy = |x: u64, rng: &mut ChaCha8Rng| {
        let mut y = x;
        for i in 0..n {
            if rng.gen::<f64>() < q {
                // a redrawn bit is uniform: flip with probability 1/2
                if rng.gen::<bool>() {
                    y ^= 1 << i;
                }
            }
        }
        y
    };
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    for _ in 0..samples {
        let x = rng.gen::<u64>() & mask;
        let u = rng.gen::<u64>() & mask;
        let y = noisy(x, &mut rng);
        let v = noisy(u, &mut rng);
        if x ^ u == y ^ v {
            hits += 1;
        }
    }
    let analytic = (1.0 - q + 0.5 * q * q).powi(n as i32);
    CollisionDecay {
        rho,
        n,
        samples,
        empirical: hits as f64 / samples as f64,
        analytic,
    }
}

/// Checks the decomposition of a second-order statistical query into simple
/// expectations and 1st/2nd-order correlation queries, by exhaustive
/// enumeration of the correlated pair distribution. Returns the absolute
/// discrepancy between the two sides.
pub fn sq_decomposition_check(
    gamma: &dyn Fn(&Point, &Point, i8, i8) -> f64,
    f: &TargetFunction,
    rho: f64,
) -> Result<f64> {
    if f.alphabet().base() != 2 {
        return Err(Error::parameter("decomposition check requires b = 2"));
    }
    let expect = |g: &dyn Fn(&Point, &Point, i8, i8) -> f64| {
        crate::oracles::exact_pair_expectation(f, rho, g)
    };
    let lhs = expect(&|x, y, fx, fy| gamma(x, y, fx, fy))?;
    let mut rhs = 0.0;
    for &i in &[1.0f64, -1.0] {
        for &j in &[1.0f64, -1.0] {
            let gij = |x: &Point, y: &Point| gamma(x, y, i as i8, j as i8);
            let plain = expect(&|x, y, _, _| gij(x, y))?;
            let first_x = expect(&|x, y, fx, _| fx as f64 * gij(x, y))?;
            let first_y = expect(&|x, y, _, fy| fy as f64 * gij(x, y))?;
            let second = expect(&|x, y, fx, fy| fx as f64 * fy as f64 * gij(x, y))?;
            rhs += 0.25 * (plain + i * first_x + j * first_y + i * j * second);
        }
    }
    Ok((lhs - rhs).abs())
}

// ---------------------------------------------------------------------------
// Estimation run log
// ---------------------------------------------------------------------------

/// One machine-parseable estimation record, appended to a run log as a
/// single JSON line.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimationRecord {
    pub quantity: String,
    pub params: serde_json::Value,
    pub estimate: f64,
    pub tolerance: f64,
    pub samples: u64,
    pub wall_ms: f64,
}

impl EstimationRecord {
    pub fn to_line(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_line(line: &str) -> Result<Self> {
        Ok(serde_json::from_str(line)?)
    }

    pub fn append_to(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)?;
        writeln!(file, "{}", self.to_line()?)?;
        Ok(())
    }
}

/// Checks the rho-weighted level mass bound used by the BFS sieve:
/// `sum_{|I|=j} T(I) <= rho^j (1-rho)^{-j-1}`.
pub fn level_mass_bound(rho: f64, level: usize) -> f64 {
    rho_pow(rho, level) * (1.0 - rho).powi(-(level as i32) - 1)
}
