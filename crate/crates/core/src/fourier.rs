//! Exact spectral computations over `[b]^n`: characters, transforms,
//! Parseval, the noise operator and the partial spectral sums that the
//! Monte-Carlo estimators approximate.
//!
//! Everything here is ground truth for tests; all operations respect the
//! exact-mode cap on `b^n`.

use num_complex::Complex64;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::domain::{Alphabet, FreqIndex, Point, TargetFunction};
use crate::error::{Error, Result};

/// Coefficients smaller than this are dropped from sparse storage. The total
/// squared mass lost is below 2^24 * 1e-28, far under every tolerance used.
const SPARSITY_EPS: f64 = 1e-14;

/// `omega_b^j` for `j in [b]`.
fn root_table(base: u8) -> Vec<Complex64> {
    (0..base)
        .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / base as f64))
        .collect()
}

/// The character `chi_a(x) = omega_b^{sum_i a_i x_i}`.
pub fn char_eval(alphabet: Alphabet, a: &FreqIndex, x: &Point) -> Complex64 {
    let b = alphabet.base() as u32;
    let mut e: u32 = 0;
    for (&ai, &xi) in a.digits().iter().zip(x.digits()) {
        e = (e + ai as u32 * xi as u32) % b;
    }
    root_table(alphabet.base())[e as usize]
}

/// `rho^k` with the `0^0 = 1` convention.
pub fn rho_pow(rho: f64, k: usize) -> f64 {
    if k == 0 {
        1.0
    } else {
        rho.powi(k as i32)
    }
}

/// A finite map from frequency vectors to Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    alphabet: Alphabet,
    coeffs: BTreeMap<FreqIndex, Complex64>,
}

impl Spectrum {
    pub fn new(alphabet: Alphabet) -> Self {
        Spectrum {
            alphabet,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_coeffs(alphabet: Alphabet, coeffs: BTreeMap<FreqIndex, Complex64>) -> Self {
        Spectrum { alphabet, coeffs }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn get(&self, a: &FreqIndex) -> Complex64 {
        self.coeffs.get(a).copied().unwrap_or(Complex64::ZERO)
    }

    pub fn insert(&mut self, a: FreqIndex, c: Complex64) {
        if c.norm() >= SPARSITY_EPS {
            self.coeffs.insert(a, c);
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficients in lexicographic order of `a`.
    pub fn iter(&self) -> impl Iterator<Item = (&FreqIndex, &Complex64)> {
        self.coeffs.iter()
    }

    /// Total squared spectral mass (equals `E[|f|^2]` by Parseval).
    pub fn parseval_mass(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    /// Applies the noise operator: every coefficient is scaled by
    /// `rho^{|a|}`.
    pub fn noise_operator(&self, rho: f64) -> Result<Spectrum> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(Error::parameter(format!("rho must lie in [0,1], got {rho}")));
        }
        let mut out = Spectrum::new(self.alphabet);
        for (a, c) in &self.coeffs {
            out.insert(a.clone(), c * rho_pow(rho, a.degree()));
        }
        Ok(out)
    }

    /// `L^2_2(C_{a,k})`: summed squared coefficient magnitudes over all
    /// completions of a length-`k` frequency prefix.
    pub fn prefix_energy(&self, prefix: &[u8]) -> Result<f64> {
        let k = prefix.len();
        if k < 1 || k > self.alphabet.dim() {
            return Err(Error::parameter("prefix length must be in 1..=n"));
        }
        Ok(self
            .coeffs
            .iter()
            .filter(|(a, _)| &a.digits()[..k] == prefix)
            .map(|(_, c)| c.norm_sqr())
            .sum())
    }

    /// `T(I) = sum over a with all digits nonzero on I of rho^{|a|} |f^(a)|^2`.
    pub fn t_exact(&self, rho: f64, coords: &[usize]) -> f64 {
        self.coeffs
            .iter()
            .filter(|(a, _)| coords.iter().all(|&i| a.digits()[i] != 0))
            .map(|(a, c)| rho_pow(rho, a.degree()) * c.norm_sqr())
            .sum()
    }

    /// `T'(I) = sum over c with all digits zero on I of rho^{|c|} |f^(c)|^2`.
    pub fn t_prime_exact(&self, rho: f64, coords: &[usize]) -> f64 {
        self.coeffs
            .iter()
            .filter(|(a, _)| coords.iter().all(|&i| a.digits()[i] == 0))
            .map(|(a, c)| rho_pow(rho, a.degree()) * c.norm_sqr())
            .sum()
    }

    // ---- CSV export -----------------------------------------------------

    /// Writes rows `a_digits,re,im` sorted lexicographically by `a`, with
    /// 17 significant digits.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        for (a, c) in &self.coeffs {
            let key = digit_string(a.digits())?;
            writeln!(w, "{key},{:.16e},{:.16e}", c.re, c.im)?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        std::fs::write(path, buf)?;
        Ok(())
    }

    pub fn read_csv(alphabet: Alphabet, text: &str) -> Result<Spectrum> {
        let mut coeffs = BTreeMap::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 3 {
                return Err(Error::parameter(format!("bad spectrum CSV row: {line}")));
            }
            let digits = parse_digit_string(parts[0])?;
            let a = FreqIndex::new(alphabet, digits)?;
            let re: f64 = parts[1]
                .parse()
                .map_err(|_| Error::parameter("bad real part in spectrum CSV"))?;
            let im: f64 = parts[2]
                .parse()
                .map_err(|_| Error::parameter("bad imaginary part in spectrum CSV"))?;
            coeffs.insert(a, Complex64::new(re, im));
        }
        Ok(Spectrum { alphabet, coeffs })
    }
}

fn digit_string(digits: &[u8]) -> Result<String> {
    digits
        .iter()
        .map(|&d| {
            std::char::from_digit(d as u32, 36)
                .ok_or_else(|| Error::parameter("digit too large for CSV encoding"))
        })
        .collect()
}

fn parse_digit_string(s: &str) -> Result<Vec<u8>> {
    s.chars()
        .map(|c| {
            c.to_digit(36)
                .map(|d| d as u8)
                .ok_or_else(|| Error::parameter("bad digit in spectrum CSV key"))
        })
        .collect()
}

/// Fourier transform of a target function (exact mode only).
pub fn transform(f: &TargetFunction) -> Result<Spectrum> {
    let table: Vec<f64> = f.truth_table()?.iter().map(|&v| v as f64).collect();
    transform_table(f.alphabet(), &table)
}

/// Fourier transform of a real-valued table in little-endian index order.
///
/// Uses the fast Walsh-Hadamard recursion for b = 2 and a brute-force DFT
/// otherwise.
pub fn transform_table(alphabet: Alphabet, values: &[f64]) -> Result<Spectrum> {
    let size = alphabet.exact_size()? as usize;
    if values.len() != size {
        return Err(Error::contract(format!(
            "table length {} does not match b^n = {size}",
            values.len()
        )));
    }
    let mut spectrum = Spectrum::new(alphabet);
    if alphabet.base() == 2 {
        let mut work = values.to_vec();
        fwht(&mut work);
        let scale = 1.0 / size as f64;
        let mut digits = vec![0u8; alphabet.dim()];
        for (idx, v) in work.iter().enumerate() {
            let c = v * scale;
            if c.abs() >= SPARSITY_EPS {
                alphabet.digits_of(idx as u64, &mut digits);
                spectrum.insert(
                    FreqIndex::from_digits_unchecked(digits.clone()),
                    Complex64::new(c, 0.0),
                );
            }
        }
    } else {
        let roots = root_table(alphabet.base());
        let b = alphabet.base() as usize;
        let scale = 1.0 / size as f64;
        let mut adigits = vec![0u8; alphabet.dim()];
        for aidx in 0..size {
            alphabet.digits_of(aidx as u64, &mut adigits);
            // Incremental exponent: advancing the point odometer at digit i
            // changes sum a_i x_i by a_i (mod b), including on carry resets.
            let mut x = vec![0u8; alphabet.dim()];
            let mut e: usize = 0;
            let mut acc = Complex64::ZERO;
            for (xidx, &v) in values.iter().enumerate() {
                acc += v * roots[e];
                if xidx + 1 < size {
                    let mut i = 0;
                    loop {
                        e = (e + adigits[i] as usize) % b;
                        if x[i] as usize == b - 1 {
                            x[i] = 0;
                            i += 1;
                        } else {
                            x[i] += 1;
                            break;
                        }
                    }
                }
            }
            let c = acc * scale;
            if c.norm() >= SPARSITY_EPS {
                spectrum.insert(FreqIndex::from_digits_unchecked(adigits.clone()), c);
            }
        }
    }
    Ok(spectrum)
}

/// In-place fast Walsh-Hadamard transform.
fn fwht(data: &mut [f64]) {
    let n = data.len();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let u = data[i];
                let v = data[i + h];
                data[i] = u + v;
                data[i + h] = u - v;
            }
        }
        h *= 2;
    }
}

/// Evaluates `f(x) = sum_a f^(a) chi_a^*(x)` on every point of the cube.
pub fn inverse_transform(spectrum: &Spectrum) -> Result<Vec<Complex64>> {
    let alphabet = spectrum.alphabet();
    let size = alphabet.exact_size()? as usize;
    let b = alphabet.base() as usize;
    let roots = root_table(alphabet.base());
    let mut table = vec![Complex64::ZERO; size];
    for (a, c) in spectrum.iter() {
        let adigits = a.digits();
        let mut x = vec![0u8; alphabet.dim()];
        let mut e: usize = 0;
        for (xidx, slot) in table.iter_mut().enumerate() {
            // chi_a^*(x) = conj(omega^e)
            *slot += c * roots[e].conj();
            if xidx + 1 < size {
                let mut i = 0;
                loop {
                    e = (e + adigits[i] as usize) % b;
                    if x[i] as usize == b - 1 {
                        x[i] = 0;
                        i += 1;
                    } else {
                        x[i] += 1;
                        break;
                    }
                }
            }
        }
    }
    Ok(table)
}
