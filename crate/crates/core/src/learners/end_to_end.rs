//! End-to-end learners: coefficient search composed with boosting.

use crate::domain::TargetFunction;
use crate::error::{Error, Result};
use crate::estimators::EstimatorConfig;
use crate::oracles::{descending_cycle, Mode, OracleSession};

use super::boost::{boost, BoostConfig, BoostReport};
use super::km::km_search_crw_weighted;
use super::sieve::{bounded_sieve_ns_weighted, SieveConfig};

/// Parameters of an end-to-end learning run. `theta` and `degree_cap`
/// default from the target's description size when unset.
#[derive(Debug, Clone)]
pub struct LearnParams {
    /// Target uniform error.
    pub epsilon: f64,
    /// Overall failure probability budget.
    pub delta: f64,
    /// Heaviness threshold override.
    pub theta: Option<f64>,
    /// Sieve degree-cap override.
    pub degree_cap: Option<usize>,
    /// Boosting round cap.
    pub max_rounds: usize,
    /// Master seed; search and error-estimation sessions derive from it.
    pub seed: u64,
}

impl LearnParams {
    pub fn new(epsilon: f64, delta: f64, seed: u64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::parameter("epsilon must lie in (0, 1)"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::parameter("delta must lie in (0, 1)"));
        }
        Ok(LearnParams {
            epsilon,
            delta,
            theta: None,
            degree_cap: None,
            max_rounds: 8,
            seed,
        })
    }

    /// Conservative default threshold `epsilon / (4 * description_size)`.
    pub fn resolved_theta(&self, description_size: u64) -> f64 {
        self.theta
            .unwrap_or(self.epsilon / (4.0 * description_size as f64))
    }

    /// Default degree cap `ceil(log2(description_size / epsilon)) + 2`,
    /// clipped to the dimension.
    pub fn resolved_degree_cap(&self, description_size: u64, n: usize) -> usize {
        self.degree_cap.unwrap_or_else(|| {
            let raw = (description_size as f64 / self.epsilon).log2().ceil();
            (raw.max(0.0) as usize + 2).min(n)
        })
    }
}

fn attribute(stage: &'static str, e: Error) -> Error {
    match e {
        Error::Contract(m) => Error::Contract(format!("{stage}: {m}")),
        Error::Parameter(m) => Error::Parameter(format!("{stage}: {m}")),
        Error::Resource(m) => Error::Resource(format!("{stage}: {m}")),
        other => other,
    }
}

const SESSION_SPLIT: u64 = 0x9E37_79B9_7F4A_7C15;

/// Learns a CRW-accessible target (DNF, TOP, parity) by prefix-tree
/// coefficient search plus boosting.
pub fn learn_top_crw(target: &TargetFunction, params: &LearnParams) -> Result<BoostReport> {
    let alphabet = target.alphabet();
    let n = alphabet.dim();
    let desc = target.description_size();
    let theta = params.resolved_theta(desc);
    // Per-test confidences: a heavy coefficient must survive every level of
    // the prefix tree, so the failure budget is shared across all the energy
    // tests of a search.
    let cap = (2.0 / (theta * theta)).ceil();
    let tests = (n * alphabet.base() as usize) as f64 * cap;
    let energy_cfg = EstimatorConfig::unit(theta * theta / 2.0, params.delta / (4.0 * tests))
        .map_err(|e| attribute("search setup", e))?;
    let coeff_cfg = EstimatorConfig::unit(theta / 4.0, params.delta / (4.0 * cap))
        .map_err(|e| attribute("search setup", e))?;
    let mut search_session =
        OracleSession::new_crw(target.clone(), descending_cycle(n), params.seed)
            .map_err(|e| attribute("session setup", e))?;
    let mut error_session = OracleSession::new_crw(
        target.clone(),
        descending_cycle(n),
        params.seed.wrapping_add(SESSION_SPLIT),
    )
    .map_err(|e| attribute("session setup", e))?;
    let cfg = BoostConfig::new(params.epsilon, params.delta / 2.0, params.max_rounds)
        .map_err(|e| attribute("boost setup", e))?;
    let mut finder = |value: &dyn Fn(&crate::domain::Point, i8) -> f64| {
        km_search_crw_weighted(&mut search_session, theta, &energy_cfg, &coeff_cfg, value)
            .map_err(|e| attribute("coefficient search", e))
    };
    boost(&mut error_session, &mut finder, &cfg).map_err(|e| attribute("boosting", e))
}

/// Learns an NS-accessible target (UBOX, DNF) by the bounded BFS sieve plus
/// boosting.
pub fn learn_ubox_ns(
    target: &TargetFunction,
    rho: f64,
    params: &LearnParams,
) -> Result<BoostReport> {
    let alphabet = target.alphabet();
    let n = alphabet.dim();
    let desc = target.description_size();
    let theta = params.resolved_theta(desc);
    let degree_cap = params.resolved_degree_cap(desc, n);
    let sieve_cfg = SieveConfig {
        theta,
        degree_cap,
        expansion_threshold: None,
        // coarse screening: pruning precision scaled to theta, not to the
        // (much smaller) expansion threshold
        t_cfg: EstimatorConfig::unit(theta, params.delta / 4.0)
            .map_err(|e| attribute("search setup", e))?,
        coeff_cfg: EstimatorConfig::unit(theta / 4.0, params.delta / 4.0)
            .map_err(|e| attribute("search setup", e))?,
    };
    let mut search_session = OracleSession::new(target.clone(), Mode::Ns(rho), params.seed)
        .map_err(|e| attribute("session setup", e))?;
    let mut error_session = OracleSession::new(
        target.clone(),
        Mode::Ns(rho),
        params.seed.wrapping_add(SESSION_SPLIT),
    )
    .map_err(|e| attribute("session setup", e))?;
    let cfg = BoostConfig::new(params.epsilon, params.delta / 2.0, params.max_rounds)
        .map_err(|e| attribute("boost setup", e))?;
    let mut finder = |value: &dyn Fn(&crate::domain::Point, i8) -> f64| {
        bounded_sieve_ns_weighted(&mut search_session, &sieve_cfg, value)
            .map_err(|e| attribute("coefficient search", e))
    };
    boost(&mut error_session, &mut finder, &cfg).map_err(|e| attribute("boosting", e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Alphabet, Rectangle};

    fn ab(b: u8, n: usize) -> Alphabet {
        Alphabet::new(b, n).unwrap()
    }

    #[test]
    fn defaults_follow_the_description_size() {
        let p = LearnParams::new(0.1, 0.1, 1).unwrap();
        assert!((p.resolved_theta(10) - 0.1 / 40.0).abs() < 1e-15);
        // log2(10 / 0.1) = log2(100) -> ceil 7, plus 2, clipped to n
        assert_eq!(p.resolved_degree_cap(10, 20), 9);
        assert_eq!(p.resolved_degree_cap(10, 4), 4);
        let mut q = p.clone();
        q.theta = Some(0.25);
        q.degree_cap = Some(3);
        assert_eq!(q.resolved_theta(10), 0.25);
        assert_eq!(q.resolved_degree_cap(10, 20), 3);
    }

    #[test]
    fn parity_is_learned_exactly() {
        let alphabet = ab(2, 8);
        let f = TargetFunction::random_parity(alphabet, 3).unwrap();
        let mut params = LearnParams::new(0.1, 0.1, 7).unwrap();
        params.theta = Some(0.5);
        let report = learn_top_crw(&f, &params).unwrap();
        assert!(report.succeeded, "failure: {:?}", report.failure);
        assert_eq!(report.hypothesis.error_exact(&f).unwrap(), 0.0);
    }

    #[test]
    fn small_dnf_is_learned() {
        let alphabet = ab(2, 8);
        let f = TargetFunction::random_dnf(alphabet, 3, 3, 5).unwrap();
        let mut params = LearnParams::new(0.15, 0.1, 11).unwrap();
        params.theta = Some(0.2);
        let report = learn_top_crw(&f, &params).unwrap();
        let err = report.hypothesis.error_exact(&f).unwrap();
        assert!(err <= 0.15, "exhaustive error {err}");
    }

    #[test]
    fn constant_ubox_is_learned_immediately() {
        let alphabet = ab(3, 4);
        let full = Rectangle::new(alphabet, vec![0; 4], vec![2; 4]).unwrap();
        let f = TargetFunction::ubox(alphabet, vec![full]).unwrap();
        let mut params = LearnParams::new(0.1, 0.1, 3).unwrap();
        params.theta = Some(0.3);
        params.degree_cap = Some(2);
        let report = learn_ubox_ns(&f, 0.5, &params).unwrap();
        assert!(report.succeeded);
        assert_eq!(report.hypothesis.error_exact(&f).unwrap(), 0.0);
    }

    #[test]
    fn single_rectangle_is_learned() {
        let alphabet = ab(3, 4);
        let f = TargetFunction::random_ubox(alphabet, 1, 9).unwrap();
        let mut params = LearnParams::new(0.15, 0.1, 5).unwrap();
        params.theta = Some(0.2);
        params.degree_cap = Some(3);
        let report = learn_ubox_ns(&f, 0.5, &params).unwrap();
        let err = report.hypothesis.error_exact(&f).unwrap();
        assert!(err <= 0.15, "exhaustive error {err}");
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(LearnParams::new(0.0, 0.1, 1).is_err());
        assert!(LearnParams::new(0.1, 1.0, 1).is_err());
    }
}
