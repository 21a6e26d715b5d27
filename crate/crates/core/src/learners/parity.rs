//! Exact parity learning from low-noise NS pairs.
//!
//! When `1 - rho` is small, a pair `(x, y)` occasionally differs in exactly
//! one coordinate `i`; whether the labels flip then reveals the parity's
//! digit on `i` with certainty. Collecting one single-flip witness per
//! coordinate recovers the support exactly; the learner never guesses, so a
//! returned support is always correct.

use crate::domain::FreqIndex;
use crate::error::{Error, Result};
use crate::oracles::{Mode, OracleSession};

/// Result of a parity-recovery run.
#[derive(Debug, Clone, PartialEq)]
pub enum ParityOutcome {
    /// Every coordinate was witnessed by a single-flip pair.
    Recovered { support: FreqIndex, samples: u64 },
    /// The draw budget ran out with some coordinates never witnessed.
    BudgetExhausted {
        unwitnessed: Vec<usize>,
        samples: u64,
    },
}

/// Recovers the support of a parity target over `[2]^n` from at most
/// `budget` NS draws.
pub fn low_noise_parity_learner(
    session: &mut OracleSession,
    budget: u64,
) -> Result<ParityOutcome> {
    let alphabet = session.alphabet();
    if alphabet.base() != 2 {
        return Err(Error::parameter("parity recovery requires b = 2"));
    }
    if !matches!(session.mode(), Mode::Ns(_)) {
        return Err(Error::contract("parity recovery needs an NS session"));
    }
    let n = alphabet.dim();
    let mut witness: Vec<Option<u8>> = vec![None; n];
    let mut remaining = n;
    let mut samples = 0u64;
    while samples < budget {
        let s = session.ns_draw()?;
        samples += 1;
        let mut flipped = None;
        let mut single = true;
        for i in 0..n {
            if s.x.digits()[i] != s.y.digits()[i] {
                if flipped.is_some() {
                    single = false;
                    break;
                }
                flipped = Some(i);
            }
        }
        let (Some(i), true) = (flipped, single) else {
            continue;
        };
        // f(y) = f(x) * (-1)^{a_i} for a single flip at i, so the label
        // comparison determines a_i outright.
        let digit = (s.fx != s.fy) as u8;
        match witness[i] {
            None => {
                witness[i] = Some(digit);
                remaining -= 1;
                if remaining == 0 {
                    let digits = witness.iter().map(|w| w.unwrap()).collect();
                    return Ok(ParityOutcome::Recovered {
                        support: FreqIndex::new(alphabet, digits)?,
                        samples,
                    });
                }
            }
            Some(prev) => debug_assert_eq!(prev, digit, "inconsistent single-flip witness"),
        }
    }
    let unwitnessed = witness
        .iter()
        .enumerate()
        .filter(|(_, w)| w.is_none())
        .map(|(i, _)| i)
        .collect();
    Ok(ParityOutcome::BudgetExhausted {
        unwitnessed,
        samples,
    })
}

/// Probability that an NS pair over `[2]^n` differs in exactly one
/// coordinate: each coordinate differs independently with probability
/// `(1-rho)/2`.
pub fn single_flip_probability(n: usize, rho: f64) -> f64 {
    let q = (1.0 - rho) / 2.0;
    n as f64 * q * (1.0 - q).powi(n as i32 - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Alphabet, Point, TargetFunction};
    use crate::oracles::exact_pair_expectation;

    fn ab(n: usize) -> Alphabet {
        Alphabet::new(2, n).unwrap()
    }

    #[test]
    fn single_flip_probability_matches_exact_enumeration() {
        // The pair distribution depends only on (n, rho), so any target works.
        for (n, rho) in [(4usize, 0.5), (6, 0.8), (5, 0.95)] {
            let f = TargetFunction::random_parity(ab(n), 1).unwrap();
            let dist_one = |x: &Point, y: &Point, _: i8, _: i8| {
                let d = x
                    .digits()
                    .iter()
                    .zip(y.digits())
                    .filter(|(a, b)| a != b)
                    .count();
                (d == 1) as u8 as f64
            };
            let exact = exact_pair_expectation(&f, rho, &dist_one).unwrap();
            let formula = single_flip_probability(n, rho);
            assert!(
                (exact - formula).abs() < 1e-12,
                "n={n} rho={rho}: {exact} vs {formula}"
            );
        }
    }

    #[test]
    fn recovers_the_exact_support() {
        let n = 12;
        let rho = 0.8;
        for seed in 0..5 {
            let f = TargetFunction::random_parity(ab(n), 100 + seed).unwrap();
            let truth = f.parity_support().unwrap().clone();
            let mut session = OracleSession::new(f, Mode::Ns(rho), seed).unwrap();
            match low_noise_parity_learner(&mut session, 1_000_000).unwrap() {
                ParityOutcome::Recovered { support, samples } => {
                    assert_eq!(support, truth);
                    assert!(samples <= 1_000_000);
                }
                other => panic!("seed {seed}: {other:?}"),
            }
        }
    }

    #[test]
    fn exhausts_a_tiny_budget() {
        let f = TargetFunction::random_parity(ab(16), 1).unwrap();
        let mut session = OracleSession::new(f, Mode::Ns(0.999), 1).unwrap();
        match low_noise_parity_learner(&mut session, 5).unwrap() {
            ParityOutcome::BudgetExhausted {
                unwitnessed,
                samples,
            } => {
                assert_eq!(samples, 5);
                assert!(!unwitnessed.is_empty());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_wrong_mode_and_base() {
        let f = TargetFunction::random_parity(ab(6), 1).unwrap();
        let mut uq = OracleSession::new(f, Mode::Uq, 1).unwrap();
        assert!(low_noise_parity_learner(&mut uq, 10).is_err());
        let g = TargetFunction::random_ubox(Alphabet::new(3, 4).unwrap(), 1, 1).unwrap();
        let mut ns = OracleSession::new(g, Mode::Ns(0.9), 1).unwrap();
        assert!(low_noise_parity_learner(&mut ns, 10).is_err());
    }
}
