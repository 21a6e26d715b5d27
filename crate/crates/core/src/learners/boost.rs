//! Weak-to-strong boosting by residual fitting.
//!
//! The running hypothesis is a real-valued character sum `s`; each round
//! searches the spectrum of the clipped residual `phi = clamp(f - s, -1, 1)`
//! and adds `phi^(a)` to the term on `a`, driving `s^(a)` toward `f^(a)`.
//! Clipping keeps the value range at [-1, 1] so the searcher's estimators
//! run at their nominal sample sizes; in the first round `s = 0` and `phi`
//! is exactly `f`. The reported hypothesis is the best seen by estimated
//! sign error.

use crate::domain::Point;
use crate::error::{Error, Result};
use crate::estimators::EstimatorConfig;
use crate::oracles::OracleSession;

use super::{uniform_sample, Hypothesis, SearchOutcome};

/// A heavy-coefficient searcher for an externally supplied value function.
/// Closures `FnMut(&dyn Fn(&Point, i8) -> f64) -> Result<SearchOutcome>`
/// implement this directly.
pub trait WeakFinder {
    fn find(&mut self, value: &dyn Fn(&Point, i8) -> f64) -> Result<SearchOutcome>;
}

impl<F> WeakFinder for F
where
    F: FnMut(&dyn Fn(&Point, i8) -> f64) -> Result<SearchOutcome>,
{
    fn find(&mut self, value: &dyn Fn(&Point, i8) -> f64) -> Result<SearchOutcome> {
        self(value)
    }
}

/// Boosting parameters.
#[derive(Debug, Clone, Copy)]
pub struct BoostConfig {
    /// Target sign error.
    pub epsilon: f64,
    /// Failure probability budget for the error estimates.
    pub delta: f64,
    /// Maximum number of residual-fitting rounds.
    pub max_rounds: usize,
    /// Weak-advantage floor: a round whose best residual coefficient has
    /// magnitude below `2 * advantage_floor` counts as finder failure.
    pub advantage_floor: f64,
}

impl BoostConfig {
    pub fn new(epsilon: f64, delta: f64, max_rounds: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::parameter("epsilon must lie in (0, 1)"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::parameter("delta must lie in (0, 1)"));
        }
        if max_rounds == 0 {
            return Err(Error::parameter("at least one round is required"));
        }
        Ok(BoostConfig {
            epsilon,
            delta,
            max_rounds,
            advantage_floor: 0.0,
        })
    }

    pub fn with_advantage_floor(mut self, gamma: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&gamma) {
            return Err(Error::parameter("advantage floor must lie in [0, 1/2)"));
        }
        self.advantage_floor = gamma;
        Ok(self)
    }
}

/// Outcome of a boosting run.
#[derive(Debug, Clone)]
pub struct BoostReport {
    /// Best hypothesis seen, by estimated error.
    pub hypothesis: Hypothesis,
    /// Rounds actually executed.
    pub rounds: usize,
    /// Estimated sign error of the reported hypothesis.
    pub estimated_error: f64,
    /// True when the estimated error reached `3 epsilon / 4`, which puts the
    /// true error below `epsilon` at the estimator's confidence.
    pub succeeded: bool,
    /// Any finder round hit a frontier cap.
    pub truncated: bool,
    /// Present when the run stopped without success.
    pub failure: Option<String>,
}

/// Runs residual-fitting boosting. The finder owns its own sampling session;
/// `error_session` supplies the fresh samples used to estimate sign error
/// between rounds.
pub fn boost(
    error_session: &mut OracleSession,
    finder: &mut dyn WeakFinder,
    cfg: &BoostConfig,
) -> Result<BoostReport> {
    let alphabet = error_session.alphabet();
    let err_cfg = EstimatorConfig::new(cfg.epsilon / 4.0, cfg.delta, (0.0, 1.0))?;
    let target = 0.75 * cfg.epsilon;

    let mut h = Hypothesis::new(alphabet);
    let mut best = h.clone();
    let mut best_err = estimate_error(error_session, &h, &err_cfg)?;
    let mut rounds = 0;
    let mut truncated = false;
    let mut failure: Option<String> = None;

    while best_err > target && rounds < cfg.max_rounds {
        rounds += 1;
        let snapshot = h.clone();
        let residual = move |x: &Point, label: i8| {
            (label as f64 - snapshot.score(x.digits())).clamp(-1.0, 1.0)
        };
        let outcome = finder.find(&residual)?;
        truncated |= outcome.truncated;
        let best_norm = outcome
            .coefficients
            .iter()
            .map(|(_, c)| c.norm())
            .fold(0.0f64, f64::max);
        if outcome.coefficients.is_empty() || best_norm < 2.0 * cfg.advantage_floor {
            failure = Some("no coefficient cleared the weak-advantage floor".to_string());
            break;
        }
        for (a, c) in outcome.coefficients {
            h.add(a, c);
        }
        let err = estimate_error(error_session, &h, &err_cfg)?;
        if err < best_err {
            best_err = err;
            best = h.clone();
        }
    }

    let succeeded = best_err <= target;
    if !succeeded && failure.is_none() {
        failure = Some(format!(
            "round budget exhausted at estimated error {best_err:.4}"
        ));
    }
    Ok(BoostReport {
        hypothesis: best,
        rounds,
        estimated_error: best_err,
        succeeded,
        truncated,
        failure: if succeeded { None } else { failure },
    })
}

fn estimate_error(
    session: &mut OracleSession,
    h: &Hypothesis,
    cfg: &EstimatorConfig,
) -> Result<f64> {
    let m = cfg.samples();
    let mut wrong = 0u64;
    for _ in 0..m {
        let (x, label) = uniform_sample(session)?;
        if h.eval_digits(x.digits()) != label {
            wrong += 1;
        }
    }
    Ok(wrong as f64 / m as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Alphabet, FreqIndex, TargetFunction};
    use crate::oracles::Mode;
    use num_complex::Complex64;

    fn ab(b: u8, n: usize) -> Alphabet {
        Alphabet::new(b, n).unwrap()
    }

    /// Exact residual coefficients by enumeration, reported only above the
    /// threshold; a stand-in for a heavy-coefficient search.
    fn exact_finder(
        f: TargetFunction,
        theta: f64,
        top_only: bool,
    ) -> impl FnMut(&dyn Fn(&Point, i8) -> f64) -> Result<SearchOutcome> {
        move |value: &dyn Fn(&Point, i8) -> f64| {
            let alphabet = f.alphabet();
            let size = alphabet.exact_size()?;
            let b = alphabet.base() as u32;
            let mut best: Vec<(FreqIndex, Complex64)> = Vec::new();
            for ai in 0..size {
                let a = FreqIndex::new(alphabet, alphabet.point_at(ai).digits().to_vec())?;
                let mut acc = Complex64::new(0.0, 0.0);
                for xi in 0..size {
                    let x = alphabet.point_at(xi);
                    let mut e: u32 = 0;
                    for (&ad, &xd) in a.digits().iter().zip(x.digits()) {
                        e = (e + ad as u32 * xd as u32) % b;
                    }
                    let chi = Complex64::from_polar(
                        1.0,
                        2.0 * std::f64::consts::PI * e as f64 / b as f64,
                    );
                    acc += value(&x, f.eval_digits(x.digits())) * chi;
                }
                let c = acc / size as f64;
                if c.norm() >= 0.75 * theta {
                    best.push((a, c));
                }
            }
            if top_only {
                best.sort_by(|x, y| y.1.norm().partial_cmp(&x.1.norm()).unwrap());
                best.truncate(1);
            }
            Ok(SearchOutcome {
                coefficients: best,
                truncated: false,
            })
        }
    }

    #[test]
    fn one_round_suffices_for_a_parity() {
        let alphabet = ab(2, 6);
        let f = TargetFunction::random_parity(alphabet, 3).unwrap();
        let mut err_session = OracleSession::new(f.clone(), Mode::Uq, 1).unwrap();
        let mut finder = exact_finder(f.clone(), 0.5, false);
        let cfg = BoostConfig::new(0.1, 0.05, 4).unwrap();
        let report = boost(&mut err_session, &mut finder, &cfg).unwrap();
        assert!(report.succeeded);
        assert!(report.rounds <= 1);
        assert_eq!(report.hypothesis.error_exact(&f).unwrap(), 0.0);
    }

    #[test]
    fn matching_pursuit_converges_over_rounds() {
        // One coefficient per round: several rounds are needed, and the
        // residual updates must drive the sign error to zero.
        let alphabet = ab(2, 8);
        let f = TargetFunction::random_dnf(alphabet, 2, 2, 9).unwrap();
        let mut err_session = OracleSession::new(f.clone(), Mode::Uq, 2).unwrap();
        let mut finder = exact_finder(f.clone(), 0.1, true);
        let cfg = BoostConfig::new(0.05, 0.05, 30).unwrap();
        let report = boost(&mut err_session, &mut finder, &cfg).unwrap();
        assert!(report.succeeded, "failure: {:?}", report.failure);
        assert!(report.rounds >= 2);
        assert!(report.hypothesis.error_exact(&f).unwrap() <= 0.05);
    }

    #[test]
    fn reports_failure_without_weak_advantage() {
        let alphabet = ab(2, 6);
        let support = FreqIndex::unit(alphabet, 2, 1).unwrap();
        let f = TargetFunction::parity(alphabet, support).unwrap();
        let mut err_session = OracleSession::new(f, Mode::Uq, 3).unwrap();
        // a finder that never finds anything
        let mut finder = |_: &dyn Fn(&Point, i8) -> f64| {
            Ok(SearchOutcome {
                coefficients: vec![],
                truncated: false,
            })
        };
        let cfg = BoostConfig::new(0.05, 0.05, 4).unwrap();
        let report = boost(&mut err_session, &mut finder, &cfg).unwrap();
        assert!(!report.succeeded);
        assert!(report.failure.is_some());
        assert_eq!(report.rounds, 1);
    }

    #[test]
    fn invalid_config_rejected() {
        assert!(BoostConfig::new(0.0, 0.1, 4).is_err());
        assert!(BoostConfig::new(0.1, 1.0, 4).is_err());
        assert!(BoostConfig::new(0.1, 0.1, 0).is_err());
    }
}
