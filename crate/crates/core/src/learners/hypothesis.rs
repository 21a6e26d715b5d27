//! Hypotheses as signed real parts of weighted character sums.

use num_complex::Complex64;
use std::path::Path;

use crate::domain::{Alphabet, FreqIndex, Point, TargetFunction};
use crate::error::{Error, Result};

/// `h(x) = sign(Re sum_a w_a chi_a^*(x))`, ties broken to +1.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    alphabet: Alphabet,
    terms: Vec<(FreqIndex, Complex64)>,
    roots: Vec<Complex64>,
}

impl Hypothesis {
    pub fn new(alphabet: Alphabet) -> Self {
        let b = alphabet.base();
        let roots = (0..b)
            .map(|j| {
                Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / b as f64)
            })
            .collect();
        Hypothesis {
            alphabet,
            terms: Vec::new(),
            roots,
        }
    }

    /// The constant hypothesis of the given sign.
    pub fn constant(alphabet: Alphabet, sign: i8) -> Self {
        let mut h = Self::new(alphabet);
        h.add(FreqIndex::zero(alphabet), Complex64::new(sign as f64, 0.0));
        h
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn terms(&self) -> &[(FreqIndex, Complex64)] {
        &self.terms
    }

    /// Adds `delta * chi_a^*` to the character sum, merging with an existing
    /// term on the same frequency.
    pub fn add(&mut self, a: FreqIndex, delta: Complex64) {
        if let Some(slot) = self.terms.iter_mut().find(|(t, _)| *t == a) {
            slot.1 += delta;
        } else {
            self.terms.push((a, delta));
        }
    }

    /// `Re sum_a w_a chi_a^*(x)`.
    pub fn score(&self, digits: &[u8]) -> f64 {
        let b = self.alphabet.base() as u32;
        let mut acc = 0.0;
        for (a, w) in &self.terms {
            let mut e: u32 = 0;
            for (&ai, &xi) in a.digits().iter().zip(digits) {
                e = (e + ai as u32 * xi as u32) % b;
            }
            // chi_a^*(x) = conj(omega^e)
            let chi = self.roots[e as usize].conj();
            acc += w.re * chi.re - w.im * chi.im;
        }
        acc
    }

    pub fn eval_digits(&self, digits: &[u8]) -> i8 {
        if self.score(digits) >= 0.0 {
            1
        } else {
            -1
        }
    }

    pub fn evaluate(&self, x: &Point) -> Result<i8> {
        if x.digits().len() != self.alphabet.dim() {
            return Err(Error::contract("point dimension mismatch"));
        }
        Ok(self.eval_digits(x.digits()))
    }

    /// Exact uniform error `P[h(x) != f(x)]` by enumeration (exact mode).
    pub fn error_exact(&self, f: &TargetFunction) -> Result<f64> {
        if f.alphabet() != self.alphabet {
            return Err(Error::contract("alphabet mismatch"));
        }
        let size = self.alphabet.exact_size()?;
        let mut digits = vec![0u8; self.alphabet.dim()];
        let mut wrong = 0u64;
        for idx in 0..size {
            self.alphabet.digits_of(idx, &mut digits);
            if self.eval_digits(&digits) != f.eval_digits(&digits) {
                wrong += 1;
            }
        }
        Ok(wrong as f64 / size as f64)
    }

    // ---- hypothesis file format -----------------------------------------

    /// Writes the alphabet header and one `digits,re,im` line per term.
    pub fn to_text(&self) -> String {
        let mut out = format!("b={} n={}\n", self.alphabet.base(), self.alphabet.dim());
        let mut sorted = self.terms.clone();
        sorted.sort_by(|(a, _), (c, _)| a.cmp(c));
        for (a, w) in &sorted {
            let key: String = a
                .digits()
                .iter()
                .map(|&d| std::char::from_digit(d as u32, 36).unwrap())
                .collect();
            out.push_str(&format!("{key},{:.16e},{:.16e}\n", w.re, w.im));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::parameter("empty hypothesis file"))?;
        let mut b = None;
        let mut n = None;
        for field in header.split_whitespace() {
            if let Some(v) = field.strip_prefix("b=") {
                b = v.parse::<u8>().ok();
            } else if let Some(v) = field.strip_prefix("n=") {
                n = v.parse::<usize>().ok();
            }
        }
        let (b, n) = match (b, n) {
            (Some(b), Some(n)) => (b, n),
            _ => return Err(Error::parameter("bad hypothesis header")),
        };
        let alphabet = Alphabet::new(b, n)?;
        let mut h = Hypothesis::new(alphabet);
        for line in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 3 {
                return Err(Error::parameter(format!("bad hypothesis row: {line}")));
            }
            let digits = parts[0]
                .chars()
                .map(|c| {
                    c.to_digit(36)
                        .map(|d| d as u8)
                        .ok_or_else(|| Error::parameter("bad digit in hypothesis row"))
                })
                .collect::<Result<Vec<u8>>>()?;
            let a = FreqIndex::new(alphabet, digits)?;
            let re: f64 = parts[1]
                .parse()
                .map_err(|_| Error::parameter("bad weight in hypothesis row"))?;
            let im: f64 = parts[2]
                .parse()
                .map_err(|_| Error::parameter("bad weight in hypothesis row"))?;
            h.add(a, Complex64::new(re, im));
        }
        Ok(h)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

/// A single-character weak hypothesis `sign(Re(c chi_a^*(x)))`.
pub fn weak_hypothesis(
    alphabet: Alphabet,
    a: FreqIndex,
    coeff: Complex64,
) -> Result<Hypothesis> {
    if coeff.norm() == 0.0 {
        return Err(Error::parameter("weak hypothesis needs a nonzero coefficient"));
    }
    let mut h = Hypothesis::new(alphabet);
    h.add(a, coeff);
    Ok(h)
}
