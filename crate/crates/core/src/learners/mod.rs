//! The learning algorithms end to end: heavy-coefficient search in the CRW
//! model, the bounded BFS sieve in the NS model, the low-noise parity
//! learner, and weak-to-strong boosting.

mod boost;
mod end_to_end;
mod hypothesis;
mod km;
mod parity;
mod sieve;

pub use boost::{boost, BoostConfig, BoostReport, WeakFinder};
pub use end_to_end::{learn_top_crw, learn_ubox_ns, LearnParams};
pub use hypothesis::{weak_hypothesis, Hypothesis};
pub use km::km_search_crw;
pub use parity::{low_noise_parity_learner, single_flip_probability, ParityOutcome};
pub use sieve::{bounded_sieve_ns, SieveConfig};

use crate::domain::{FreqIndex, Point};
use crate::error::Result;
use crate::estimators::EstimatorConfig;
use crate::oracles::{Mode, OracleSession};
use num_complex::Complex64;

/// Result of a heavy-coefficient search.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub coefficients: Vec<(FreqIndex, Complex64)>,
    /// Set when a frontier cap forced discarding a candidate that had passed
    /// its threshold test.
    pub truncated: bool,
}

/// A labeled (near-)uniform sample from any supported session mode. NS
/// sessions contribute the x-marginal of a pair draw.
pub(crate) fn uniform_sample(session: &mut OracleSession) -> Result<(Point, i8)> {
    match session.mode() {
        Mode::Ns(_) => {
            let s = session.ns_draw()?;
            Ok((s.x, s.fx))
        }
        _ => crate::estimators::uniform_labeled(session),
    }
}

/// Coefficient estimate `E[phi(x) chi_a(x)]` from any supported session
/// mode, via [`uniform_sample`].
pub(crate) fn estimate_coefficient_any(
    session: &mut OracleSession,
    a: &FreqIndex,
    cfg: &EstimatorConfig,
    value: &dyn Fn(&Point, i8) -> f64,
) -> Result<Complex64> {
    let b = session.alphabet().base() as u32;
    let roots: Vec<Complex64> = (0..b)
        .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / b as f64))
        .collect();
    let m = cfg.samples();
    let mut acc = Complex64::new(0.0, 0.0);
    for _ in 0..m {
        let (x, label) = uniform_sample(session)?;
        let mut e: u32 = 0;
        for (&ai, &xi) in a.digits().iter().zip(x.digits()) {
            e = (e + ai as u32 * xi as u32) % b;
        }
        acc += value(&x, label) * roots[e as usize];
    }
    Ok(acc / m as f64)
}
