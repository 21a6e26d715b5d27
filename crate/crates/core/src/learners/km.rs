//! Heavy-coefficient search in the CRW model via a prefix tree over
//! frequency vectors.
//!
//! A prefix of length k survives when its estimated prefix energy clears
//! `theta^2 / 2`; at most `ceil(2 / theta^2)` prefixes are kept per level
//! (Parseval bounds the number of truly heavy ones by that count). Surviving
//! full-length vectors get their coefficients estimated and are reported when
//! the estimate clears `0.75 theta`.

use num_complex::Complex64;

use crate::domain::{FreqIndex, Point};
use crate::error::{Error, Result};
use crate::estimators::{
    estimate_coefficient_weighted, estimate_prefix_energy_crw_weighted, EstimatorConfig,
};
use crate::oracles::OracleSession;

use super::SearchOutcome;

/// Finds the frequency vectors whose coefficients have magnitude at least
/// `theta`, up to estimation error, using only cyclic-random-walk samples.
///
/// The session must be a CRW session with cycle `(n, n-1, ..., 1)`.
pub fn km_search_crw(
    session: &mut OracleSession,
    theta: f64,
    energy_cfg: &EstimatorConfig,
    coeff_cfg: &EstimatorConfig,
) -> Result<SearchOutcome> {
    km_search_crw_weighted(session, theta, energy_cfg, coeff_cfg, &|_, label| label as f64)
}

/// Weighted variant: searches the spectrum of `phi` where `phi(x)` is
/// computed from the labeled sample (boosting substitutes residuals).
pub(crate) fn km_search_crw_weighted(
    session: &mut OracleSession,
    theta: f64,
    energy_cfg: &EstimatorConfig,
    coeff_cfg: &EstimatorConfig,
    value: &dyn Fn(&Point, i8) -> f64,
) -> Result<SearchOutcome> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::parameter("search threshold theta must lie in (0, 1]"));
    }
    let alphabet = session.alphabet();
    let n = alphabet.dim();
    let b = alphabet.base();
    let keep = theta * theta / 2.0;
    let cap = (2.0 / (theta * theta)).ceil() as usize;
    let mut truncated = false;

    let mut frontier: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 1..=n {
        let mut scored: Vec<(Vec<u8>, f64)> = Vec::new();
        for prefix in &frontier {
            for digit in 0..b {
                let mut child = prefix.clone();
                child.push(digit);
                let est =
                    estimate_prefix_energy_crw_weighted(session, &child, energy_cfg, value)?;
                if est >= keep {
                    scored.push((child, est));
                }
            }
        }
        scored.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap());
        if scored.len() > cap {
            truncated = true;
            scored.truncate(cap);
        }
        frontier = scored.into_iter().map(|(p, _)| p).collect();
        if frontier.is_empty() {
            break;
        }
    }

    let mut coefficients: Vec<(FreqIndex, Complex64)> = Vec::new();
    for digits in frontier {
        if digits.len() != n {
            continue;
        }
        let a = FreqIndex::new(alphabet, digits)?;
        let c = estimate_coefficient_weighted(session, &a, coeff_cfg, value)?;
        if c.norm() >= 0.75 * theta {
            coefficients.push((a, c));
        }
    }
    Ok(SearchOutcome {
        coefficients,
        truncated,
    })
}
