//! Heavy-coefficient search in the NS model: a breadth-first sieve over
//! coordinate sets.
//!
//! A coordinate set `I` can carry a coefficient of magnitude `theta` and
//! degree at most `d` only if the rho-weighted mass `T(I)` is at least
//! `rho^d theta^2`; the sieve expands `I` when its estimated `T(I)` clears
//! half that. The frontier at level `j` is capped by the level mass bound
//! `rho^j (1-rho)^{-j-1}` divided by the expansion threshold. For each
//! surviving set the `(b-1)^|I|` frequency vectors supported exactly on it
//! get their coefficients estimated; those clearing `0.75 theta` are
//! reported.

use num_complex::Complex64;

use crate::domain::{FreqIndex, Point};
use crate::error::{Error, Result};
use crate::estimators::{estimate_t_ns_weighted, level_mass_bound, EstimatorConfig};
use crate::fourier::rho_pow;
use crate::oracles::{Mode, OracleSession};

use super::{estimate_coefficient_any, SearchOutcome};

/// Parameters of the bounded sieve.
#[derive(Debug, Clone)]
pub struct SieveConfig {
    /// Magnitude threshold for reported coefficients.
    pub theta: f64,
    /// Maximum degree searched; `0` reports only the constant coefficient.
    pub degree_cap: usize,
    /// Expansion threshold for `T(I)` estimates. Defaults to
    /// `rho^degree_cap * theta^2 / 2`.
    pub expansion_threshold: Option<f64>,
    /// Sizing of the `T(I)` screening estimates.
    pub t_cfg: EstimatorConfig,
    /// Sizing of the final coefficient estimates.
    pub coeff_cfg: EstimatorConfig,
}

/// Finds the frequency vectors of degree at most `degree_cap` whose
/// coefficients have magnitude at least `theta`, up to estimation error,
/// using only noise-sensitivity samples.
pub fn bounded_sieve_ns(session: &mut OracleSession, cfg: &SieveConfig) -> Result<SearchOutcome> {
    bounded_sieve_ns_weighted(session, cfg, &|_, label| label as f64)
}

/// Weighted variant: searches the spectrum of `phi` computed from labeled
/// samples (boosting substitutes residuals).
pub(crate) fn bounded_sieve_ns_weighted(
    session: &mut OracleSession,
    cfg: &SieveConfig,
    value: &dyn Fn(&Point, i8) -> f64,
) -> Result<SearchOutcome> {
    let rho = match session.mode() {
        Mode::Ns(rho) => rho,
        _ => return Err(Error::contract("the sieve needs an NS session")),
    };
    if !(cfg.theta > 0.0 && cfg.theta <= 1.0) {
        return Err(Error::parameter("search threshold theta must lie in (0, 1]"));
    }
    let alphabet = session.alphabet();
    let n = alphabet.dim();
    let b = alphabet.base();
    if cfg.degree_cap > n {
        return Err(Error::parameter("degree cap exceeds the dimension"));
    }
    let tau = cfg
        .expansion_threshold
        .unwrap_or_else(|| rho_pow(rho, cfg.degree_cap) * cfg.theta * cfg.theta / 2.0);
    if tau < 0.0 {
        return Err(Error::parameter("expansion threshold must be nonnegative"));
    }

    let mut truncated = false;
    let mut surviving: Vec<Vec<usize>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for level in 1..=cfg.degree_cap {
        let mut scored: Vec<(Vec<usize>, f64)> = Vec::new();
        for set in &frontier {
            let start = set.last().map_or(0, |&last| last + 1);
            for next in start..n {
                let mut child = set.clone();
                child.push(next);
                let est = estimate_t_ns_weighted(session, &child, &cfg.t_cfg, value)?;
                if est >= tau {
                    scored.push((child, est));
                }
            }
        }
        scored.sort_by(|x, y| y.1.partial_cmp(&x.1).unwrap());
        let cap = if tau > 0.0 {
            let raw = (level_mass_bound(rho, level) / tau).ceil();
            if raw.is_finite() && raw < 1e15 {
                (raw as usize).max(1)
            } else {
                usize::MAX
            }
        } else {
            usize::MAX
        };
        if scored.len() > cap {
            truncated = true;
            scored.truncate(cap);
        }
        frontier = scored.into_iter().map(|(s, _)| s).collect();
        surviving.extend(frontier.iter().cloned());
        if frontier.is_empty() {
            break;
        }
    }

    let mut coefficients: Vec<(FreqIndex, Complex64)> = Vec::new();
    for set in &surviving {
        for a in support_vectors(alphabet.dim(), b, set) {
            let a = FreqIndex::new(alphabet, a)?;
            let c = estimate_coefficient_any(session, &a, &cfg.coeff_cfg, value)?;
            if c.norm() >= 0.75 * cfg.theta {
                coefficients.push((a, c));
            }
        }
    }
    Ok(SearchOutcome {
        coefficients,
        truncated,
    })
}

/// All digit vectors in `[b]^n` whose support is exactly `set`, i.e. with a
/// nonzero digit on each listed coordinate and zeros elsewhere.
fn support_vectors(n: usize, b: u8, set: &[usize]) -> Vec<Vec<u8>> {
    let mut out = vec![vec![0u8; n]];
    for &coord in set {
        let mut next = Vec::with_capacity(out.len() * (b as usize - 1));
        for v in &out {
            for digit in 1..b {
                let mut w = v.clone();
                w[coord] = digit;
                next.push(w);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Alphabet, TargetFunction};
    use crate::fourier::transform;

    fn ab(b: u8, n: usize) -> Alphabet {
        Alphabet::new(b, n).unwrap()
    }

    fn cfg(theta: f64) -> SieveConfig {
        SieveConfig {
            theta,
            degree_cap: 3,
            expansion_threshold: None,
            t_cfg: EstimatorConfig::unit(0.2, 0.2).unwrap(),
            coeff_cfg: EstimatorConfig::unit(0.03, 0.02).unwrap(),
        }
    }

    #[test]
    fn support_vector_enumeration() {
        let vs = support_vectors(4, 3, &[1, 3]);
        assert_eq!(vs.len(), 4);
        for v in &vs {
            assert_eq!(v[0], 0);
            assert_eq!(v[2], 0);
            assert!(v[1] >= 1 && v[3] >= 1);
        }
        assert_eq!(support_vectors(4, 3, &[]), vec![vec![0u8; 4]]);
    }

    #[test]
    fn finds_heavy_ubox_coefficients_and_nothing_light() {
        let alphabet = ab(3, 5);
        let theta = 0.2;
        let f = TargetFunction::random_ubox(alphabet, 2, 21).unwrap();
        let spectrum = transform(&f).unwrap();
        let mut session = OracleSession::new(f, Mode::Ns(0.5), 13).unwrap();
        let out = bounded_sieve_ns(&mut session, &cfg(theta)).unwrap();

        let found: Vec<&FreqIndex> = out.coefficients.iter().map(|(a, _)| a).collect();
        for (a, c) in spectrum.iter() {
            if c.norm() >= theta && a.degree() <= 3 {
                assert!(found.contains(&a), "missed heavy coefficient {a:?} ({c})");
            }
        }
        for (a, est) in &out.coefficients {
            let truth = spectrum.get(a);
            assert!(
                truth.norm() >= theta / 2.0,
                "reported light coefficient {a:?}: truth {truth}, estimate {est}"
            );
            assert!((est - truth).norm() <= 0.1);
        }
    }

    #[test]
    fn degree_cap_zero_reports_only_the_constant() {
        let alphabet = ab(2, 6);
        // a DNF biased away from fair coin: constant coefficient is heavy
        let f = TargetFunction::random_dnf(alphabet, 1, 3, 4).unwrap();
        let spectrum = transform(&f).unwrap();
        let constant = spectrum.get(&FreqIndex::zero(alphabet));
        let mut session = OracleSession::new(f, Mode::Ns(0.5), 7).unwrap();
        let mut c = cfg(0.3);
        c.degree_cap = 0;
        let out = bounded_sieve_ns(&mut session, &c).unwrap();
        assert_eq!(out.coefficients.len(), 1);
        let (a, est) = &out.coefficients[0];
        assert!(a.is_zero());
        assert!((est.re - constant.re).abs() <= 0.05);
    }

    #[test]
    fn wrong_session_mode_rejected() {
        let f = TargetFunction::random_dnf(ab(2, 6), 2, 2, 1).unwrap();
        let mut session = OracleSession::new(f, Mode::Uq, 1).unwrap();
        assert!(bounded_sieve_ns(&mut session, &cfg(0.3)).is_err());
    }

    #[test]
    fn invalid_parameters_rejected() {
        let f = TargetFunction::random_dnf(ab(2, 6), 2, 2, 1).unwrap();
        let mut session = OracleSession::new(f, Mode::Ns(0.5), 1).unwrap();
        let mut c = cfg(0.0);
        assert!(bounded_sieve_ns(&mut session, &c).is_err());
        c.theta = 0.3;
        c.degree_cap = 7;
        assert!(bounded_sieve_ns(&mut session, &c).is_err());
    }
}
