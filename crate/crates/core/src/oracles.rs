//! Example-access models as stateful sampling sessions over a hidden target,
//! plus the statistical-query oracle in honest and adversarial-zero modes.
//!
//! All randomness comes from ChaCha8, a counter-based stream generator with a
//! fixed published specification, seeded from a 64-bit value; trajectories
//! are therefore reproducible across platforms from `(seed, query sequence)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{Alphabet, Point, TargetFunction};
use crate::error::{Error, Result};
use crate::estimators::EstimatorConfig;

/// Example-access mode of a session.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    /// Membership queries: the value of the target at any chosen point.
    Mq,
    /// Independent uniform labeled examples.
    Uq,
    /// Random walk updating one uniformly chosen coordinate per step.
    Rw,
    /// Cyclic random walk updating coordinates in a fixed cycle order.
    Crw,
    /// Noise-sensitivity pairs with per-coordinate update probability
    /// `1 - rho`.
    Ns(f64),
}

/// One noise-sensitivity draw `<x, y, f(x), f(y), S>`.
#[derive(Debug, Clone)]
pub struct NsSample {
    pub x: Point,
    pub y: Point,
    pub fx: i8,
    pub fy: i8,
    /// Indices of the updated coordinates. An updated digit may equal the
    /// old one.
    pub updated: Vec<usize>,
}

/// A stateful sampling session. The target is hidden: nothing but labeled
/// samples crosses this interface.
pub struct OracleSession {
    target: TargetFunction,
    alphabet: Alphabet,
    mode: Mode,
    rng: ChaCha8Rng,
    cycle: Vec<usize>,
    cycle_pos: usize,
    walk: Option<Point>,
    query_count: u64,
    transcript: Option<Vec<String>>,
}

/// The cycle `(n, n-1, ..., 1)` required by the prefix-energy simulation.
pub fn descending_cycle(n: usize) -> Vec<usize> {
    (0..n).rev().collect()
}

impl OracleSession {
    pub fn new(target: TargetFunction, mode: Mode, seed: u64) -> Result<Self> {
        let alphabet = target.alphabet();
        if let Mode::Ns(rho) = mode {
            if !(0.0..=1.0).contains(&rho) {
                return Err(Error::parameter(format!("rho must lie in [0,1], got {rho}")));
            }
        }
        Ok(OracleSession {
            target,
            alphabet,
            mode,
            rng: ChaCha8Rng::seed_from_u64(seed),
            cycle: (0..alphabet.dim()).collect(),
            cycle_pos: 0,
            walk: None,
            query_count: 0,
            transcript: None,
        })
    }

    /// A CRW session with an arbitrary fixed cycle permutation.
    pub fn new_crw(target: TargetFunction, cycle: Vec<usize>, seed: u64) -> Result<Self> {
        let n = target.alphabet().dim();
        let mut seen = vec![false; n];
        if cycle.len() != n || cycle.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
            return Err(Error::parameter("cycle must be a permutation of 0..n"));
        }
        let mut s = Self::new(target, Mode::Crw, seed)?;
        s.cycle = cycle;
        Ok(s)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn cycle(&self) -> &[usize] {
        &self.cycle
    }

    /// Index into the cycle of the next coordinate a CRW step will update.
    pub fn cycle_position(&self) -> usize {
        self.cycle_pos
    }

    pub fn query_count(&self) -> u64 {
        self.query_count
    }

    pub fn enable_transcript(&mut self) {
        self.transcript = Some(Vec::new());
    }

    pub fn transcript(&self) -> &[String] {
        self.transcript.as_deref().unwrap_or(&[])
    }

    /// Appends a transcript line; the strings are built only when the
    /// transcript is enabled, keeping the sampling hot path allocation-free.
    fn log(&mut self, kind: &str, make: impl FnOnce() -> (String, String)) {
        if let Some(t) = &mut self.transcript {
            let (input, output) = make();
            let count = self.query_count;
            t.push(format!("{kind}\t{input}\t{output}\t{count}"));
        }
    }

    fn require_mode(&self, wanted: &str, ok: bool) -> Result<()> {
        if ok {
            Ok(())
        } else {
            Err(Error::contract(format!(
                "session mode {:?} does not support {wanted}",
                self.mode
            )))
        }
    }

    /// Membership query.
    pub fn mq_query(&mut self, x: &Point) -> Result<i8> {
        self.require_mode("mq_query", self.mode == Mode::Mq)?;
        let v = self.target.evaluate(x)?;
        self.query_count += 1;
        self.log("mq", || (digits_str(x.digits()), v.to_string()));
        Ok(v)
    }

    /// Independent uniform labeled example.
    pub fn uq_draw(&mut self) -> Result<(Point, i8)> {
        self.require_mode("uq_draw", self.mode == Mode::Uq)?;
        let x = self.alphabet.random_point(&mut self.rng);
        let v = self.target.eval_digits(x.digits());
        self.query_count += 1;
        self.log("uq", || (String::new(), format!("{} {v}", digits_str(x.digits()))));
        Ok((x, v))
    }

    /// One random-walk step. The first example is uniform; afterwards one
    /// uniformly chosen coordinate is redrawn uniformly (it may keep its old
    /// value).
    pub fn rw_step(&mut self) -> Result<(Point, i8)> {
        self.require_mode("rw_step", self.mode == Mode::Rw)?;
        let point = match self.walk.take() {
            None => self.alphabet.random_point(&mut self.rng),
            Some(mut p) => {
                let i = self.rng.gen_range(0..self.alphabet.dim());
                p.digits_mut()[i] = self.rng.gen_range(0..self.alphabet.base());
                p
            }
        };
        let v = self.target.eval_digits(point.digits());
        self.walk = Some(point.clone());
        self.query_count += 1;
        self.log("rw", || (String::new(), format!("{} {v}", digits_str(point.digits()))));
        Ok((point, v))
    }

    /// One cyclic-random-walk step: the updated coordinate is the cycle's
    /// next, and the cycle position advances mod n.
    pub fn crw_step(&mut self) -> Result<(Point, i8)> {
        self.require_mode("crw_step", self.mode == Mode::Crw)?;
        let point = match self.walk.take() {
            None => self.alphabet.random_point(&mut self.rng),
            Some(mut p) => {
                let i = self.cycle[self.cycle_pos];
                self.cycle_pos = (self.cycle_pos + 1) % self.cycle.len();
                p.digits_mut()[i] = self.rng.gen_range(0..self.alphabet.base());
                p
            }
        };
        let v = self.target.eval_digits(point.digits());
        self.walk = Some(point.clone());
        self.query_count += 1;
        self.log("crw", || (String::new(), format!("{} {v}", digits_str(point.digits()))));
        Ok((point, v))
    }

    /// One noise-sensitivity draw.
    pub fn ns_draw(&mut self) -> Result<NsSample> {
        let rho = match self.mode {
            Mode::Ns(rho) => rho,
            _ => return Err(Error::contract("session mode does not support ns_draw")),
        };
        let x = self.alphabet.random_point(&mut self.rng);
        let mut y = x.clone();
        let mut updated = Vec::new();
        for i in 0..self.alphabet.dim() {
            if self.rng.gen::<f64>() < 1.0 - rho {
                y.digits_mut()[i] = self.rng.gen_range(0..self.alphabet.base());
                updated.push(i);
            }
        }
        let fx = self.target.eval_digits(x.digits());
        let fy = self.target.eval_digits(y.digits());
        self.query_count += 1;
        self.log("ns", || {
            (
                String::new(),
                format!(
                    "{} {} {fx} {fy}",
                    digits_str(x.digits()),
                    digits_str(y.digits())
                ),
            )
        });
        Ok(NsSample { x, y, fx, fy, updated })
    }

    /// A draw from `D_rho^(I)`: rejection sampling until all coordinates in
    /// `coords` are updated. Returns the accepted sample and the number of
    /// rejected draws.
    pub fn ns_draw_conditioned(
        &mut self,
        coords: &[usize],
        budget: u64,
    ) -> Result<(NsSample, u64)> {
        let mut rejections = 0u64;
        loop {
            let sample = self.ns_draw()?;
            if coords.iter().all(|i| sample.updated.contains(i)) {
                return Ok((sample, rejections));
            }
            rejections += 1;
            if rejections >= budget {
                return Err(Error::resource(format!(
                    "rejection budget {budget} exhausted waiting for I within S \
                     (0 acceptances in {rejections} draws)"
                )));
            }
        }
    }
}

/// Default rejection budget per accepted sample: `ceil(50 * (1-rho)^-|I|)`
/// attempts. Acceptance is geometric with rate `(1-rho)^|I|`, so at the
/// nominal rate the failure probability is below `e^-50` per sample.
pub fn default_rejection_budget(rho: f64, i_len: usize) -> u64 {
    if i_len == 0 {
        return 1;
    }
    let rate = (1.0 - rho).powi(i_len as i32);
    if rate <= 0.0 {
        return u64::MAX;
    }
    (50.0 / rate).ceil().min(u64::MAX as f64) as u64
}

fn digits_str(digits: &[u8]) -> String {
    digits.iter().map(|&d| (b'0' + d.min(9)) as char).collect()
}

// ---------------------------------------------------------------------------
// Statistical queries
// ---------------------------------------------------------------------------

enum SqMode {
    /// Empirical averaging over a fresh sample of Hoeffding size.
    Honest { session: OracleSession, delta: f64 },
    /// Answers 0 whenever 0 is within tolerance of the true expectation
    /// (computed exactly), otherwise the true value.
    AdversarialZero { target: TargetFunction },
}

/// Statistical-query oracle over the UQ or NS example distribution.
pub struct SqOracle {
    mode: SqMode,
}

impl SqOracle {
    /// Honest oracle backed by the given UQ or NS session; `delta` is the
    /// confidence used to size the empirical average.
    pub fn honest(session: OracleSession, delta: f64) -> Result<Self> {
        match session.mode() {
            Mode::Uq | Mode::Ns(_) => Ok(SqOracle {
                mode: SqMode::Honest { session, delta },
            }),
            _ => Err(Error::contract("honest SQ oracle requires a UQ or NS session")),
        }
    }

    /// Zero-preferring adversarial oracle. Requires an exact-mode target,
    /// since "any value within tau" needs the true expectation.
    pub fn adversarial_zero(target: TargetFunction) -> Result<Self> {
        target.alphabet().exact_size()?;
        Ok(SqOracle {
            mode: SqMode::AdversarialZero { target },
        })
    }

    /// First-order query: `gamma` maps `(x, f(x))` into `[-1, 1]`.
    pub fn query(&mut self, gamma: &dyn Fn(&Point, i8) -> f64, tau: f64) -> Result<f64> {
        if tau <= 0.0 || tau > 1.0 {
            return Err(Error::parameter("tolerance tau must lie in (0, 1]"));
        }
        match &mut self.mode {
            SqMode::Honest { session, delta } => {
                let m = EstimatorConfig::new(tau, *delta, (-1.0, 1.0))?.samples();
                let mut acc = 0.0;
                for _ in 0..m {
                    let (x, v) = session.uq_draw()?;
                    acc += gamma(&x, v);
                }
                Ok(acc / m as f64)
            }
            SqMode::AdversarialZero { target } => {
                let alphabet = target.alphabet();
                let size = alphabet.exact_size()?;
                let mut acc = 0.0;
                for idx in 0..size {
                    let x = alphabet.point_at(idx);
                    acc += gamma(&x, target.eval_digits(x.digits()));
                }
                let truth = acc / size as f64;
                Ok(if truth.abs() <= tau { 0.0 } else { truth })
            }
        }
    }

    /// Second-order query over NS pairs: `gamma` maps `(x, y, f(x), f(y))`
    /// into `[-1, 1]`. The adversarial mode needs `rho` to enumerate the
    /// pair distribution exactly.
    pub fn query_second_order(
        &mut self,
        gamma: &dyn Fn(&Point, &Point, i8, i8) -> f64,
        tau: f64,
        rho: f64,
    ) -> Result<f64> {
        if tau <= 0.0 || tau > 1.0 {
            return Err(Error::parameter("tolerance tau must lie in (0, 1]"));
        }
        match &mut self.mode {
            SqMode::Honest { session, delta } => {
                if !matches!(session.mode(), Mode::Ns(_)) {
                    return Err(Error::contract(
                        "second-order honest SQ requires an NS session",
                    ));
                }
                let m = EstimatorConfig::new(tau, *delta, (-1.0, 1.0))?.samples();
                let mut acc = 0.0;
                for _ in 0..m {
                    let s = session.ns_draw()?;
                    acc += gamma(&s.x, &s.y, s.fx, s.fy);
                }
                Ok(acc / m as f64)
            }
            SqMode::AdversarialZero { target } => {
                let truth = exact_pair_expectation(target, rho, &|x, y, fx, fy| {
                    gamma(x, y, fx, fy)
                })?;
                Ok(if truth.abs() <= tau { 0.0 } else { truth })
            }
        }
    }
}

/// Exact `E[g(x, y, f(x), f(y))]` under the NS pair distribution, by
/// enumeration over all pairs weighted by the per-coordinate transition
/// probabilities.
pub fn exact_pair_expectation(
    target: &TargetFunction,
    rho: f64,
    g: &dyn Fn(&Point, &Point, i8, i8) -> f64,
) -> Result<f64> {
    let alphabet = target.alphabet();
    let size = alphabet.exact_size()?;
    if size.checked_mul(size).is_none() || size * size > (1 << 26) {
        return Err(Error::resource(
            "pair enumeration needs b^{2n} <= 2^26",
        ));
    }
    let b = alphabet.base() as f64;
    // P[y_i = x_i] = rho + (1-rho)/b; P[y_i = v != x_i] = (1-rho)/b.
    let p_same = rho + (1.0 - rho) / b;
    let p_diff = (1.0 - rho) / b;
    let mut acc = 0.0;
    for xi in 0..size {
        let x = alphabet.point_at(xi);
        let fx = target.eval_digits(x.digits());
        for yi in 0..size {
            let y = alphabet.point_at(yi);
            let mut w = 1.0 / size as f64;
            for (&xd, &yd) in x.digits().iter().zip(y.digits()) {
                w *= if xd == yd { p_same } else { p_diff };
            }
            let fy = target.eval_digits(y.digits());
            acc += w * g(&x, &y, fx, fy);
        }
    }
    Ok(acc)
}
