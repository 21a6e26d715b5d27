//! Target-function classes over `[b]^n` and the underlying point types.
//!
//! Functions are ±1-valued. The sign convention is fixed once for the whole
//! crate: points *inside* a rectangle (or satisfying a DNF) evaluate to −1,
//! points outside to +1.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};

/// Largest `b^n` for which exact-mode (truth-table) operations are allowed.
pub const EXACT_MODE_CAP: u64 = 1 << 24;

/// The alphabet `[b] = {0, ..., b-1}` together with the dimension `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    base: u8,
    dim: usize,
}

impl Alphabet {
    pub fn new(base: u8, dim: usize) -> Result<Self> {
        if base < 2 {
            return Err(Error::parameter(format!("base must be >= 2, got {base}")));
        }
        if dim < 1 {
            return Err(Error::parameter("dimension must be >= 1"));
        }
        Ok(Alphabet { base, dim })
    }

    pub fn base(&self) -> u8 {
        self.base
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `b^n`, if it fits in a u64.
    pub fn size(&self) -> Option<u64> {
        let mut acc: u64 = 1;
        for _ in 0..self.dim {
            acc = acc.checked_mul(self.base as u64)?;
        }
        Some(acc)
    }

    /// `b^n` under the exact-mode cap, or a resource error.
    pub fn exact_size(&self) -> Result<u64> {
        match self.size() {
            Some(s) if s <= EXACT_MODE_CAP => Ok(s),
            _ => Err(Error::resource(format!(
                "b^n exceeds the exact-mode cap of {EXACT_MODE_CAP} (b={}, n={})",
                self.base, self.dim
            ))),
        }
    }

    pub fn is_exact_mode(&self) -> bool {
        matches!(self.size(), Some(s) if s <= EXACT_MODE_CAP)
    }

    /// Index of a digit vector in little-endian digit order.
    pub fn index_of(&self, digits: &[u8]) -> u64 {
        debug_assert_eq!(digits.len(), self.dim);
        let mut idx: u64 = 0;
        for &d in digits.iter().rev() {
            idx = idx * self.base as u64 + d as u64;
        }
        idx
    }

    /// Writes the little-endian digit expansion of `index` into `out`.
    pub fn digits_of(&self, mut index: u64, out: &mut [u8]) {
        debug_assert_eq!(out.len(), self.dim);
        for d in out.iter_mut() {
            *d = (index % self.base as u64) as u8;
            index /= self.base as u64;
        }
    }

    pub fn point_at(&self, index: u64) -> Point {
        let mut digits = vec![0u8; self.dim];
        self.digits_of(index, &mut digits);
        Point { digits }
    }

    fn check_digits(&self, digits: &[u8]) -> Result<()> {
        if digits.len() != self.dim {
            return Err(Error::contract(format!(
                "expected {} digits, got {}",
                self.dim,
                digits.len()
            )));
        }
        if let Some(&d) = digits.iter().find(|&&d| d >= self.base) {
            return Err(Error::contract(format!(
                "digit {d} out of range for base {}",
                self.base
            )));
        }
        Ok(())
    }

    /// A uniform point.
    pub fn random_point(&self, rng: &mut impl Rng) -> Point {
        let digits = (0..self.dim).map(|_| rng.gen_range(0..self.base)).collect();
        Point { digits }
    }
}

/// An element of `[b]^n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point {
    digits: Vec<u8>,
}

impl Point {
    pub fn new(alphabet: Alphabet, digits: Vec<u8>) -> Result<Self> {
        alphabet.check_digits(&digits)?;
        Ok(Point { digits })
    }

    pub fn zero(alphabet: Alphabet) -> Self {
        Point {
            digits: vec![0; alphabet.dim()],
        }
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub(crate) fn digits_mut(&mut self) -> &mut [u8] {
        &mut self.digits
    }
}

/// A frequency vector `a ∈ [b]^n` indexing a Fourier coefficient.
///
/// The degree `|a|` (count of nonzero digits) is cached at construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FreqIndex {
    digits: Vec<u8>,
    degree: usize,
}

impl FreqIndex {
    pub fn new(alphabet: Alphabet, digits: Vec<u8>) -> Result<Self> {
        alphabet.check_digits(&digits)?;
        Ok(Self::from_digits_unchecked(digits))
    }

    pub(crate) fn from_digits_unchecked(digits: Vec<u8>) -> Self {
        let degree = digits.iter().filter(|&&d| d != 0).count();
        FreqIndex { digits, degree }
    }

    pub fn zero(alphabet: Alphabet) -> Self {
        FreqIndex {
            digits: vec![0; alphabet.dim()],
            degree: 0,
        }
    }

    /// Unit vector `v * e_i`.
    pub fn unit(alphabet: Alphabet, coord: usize, value: u8) -> Result<Self> {
        let mut digits = vec![0; alphabet.dim()];
        if coord >= alphabet.dim() {
            return Err(Error::parameter(format!("coordinate {coord} out of range")));
        }
        digits[coord] = value;
        FreqIndex::new(alphabet, digits)
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    /// Number of nonzero digits.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.degree == 0
    }

    /// Indices of the nonzero digits.
    pub fn support(&self) -> Vec<usize> {
        self.digits
            .iter()
            .enumerate()
            .filter(|(_, &d)| d != 0)
            .map(|(i, _)| i)
            .collect()
    }

    /// The conjugate partner `-a mod b`.
    pub fn negate(&self, alphabet: Alphabet) -> FreqIndex {
        let b = alphabet.base();
        let digits = self
            .digits
            .iter()
            .map(|&d| if d == 0 { 0 } else { b - d })
            .collect();
        Self::from_digits_unchecked(digits)
    }
}

// Lexicographic order on the digit sequence; this is the order used for
// spectrum CSV export.
impl Ord for FreqIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.digits.cmp(&other.digits)
    }
}

impl PartialOrd for FreqIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// An axis-aligned rectangle `[l, u]` in `[b]^n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rectangle {
    lower: Vec<u8>,
    upper: Vec<u8>,
}

impl Rectangle {
    pub fn new(alphabet: Alphabet, lower: Vec<u8>, upper: Vec<u8>) -> Result<Self> {
        alphabet.check_digits(&lower)?;
        alphabet.check_digits(&upper)?;
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(Error::parameter("rectangle requires l_i <= u_i for all i"));
        }
        Ok(Rectangle { lower, upper })
    }

    pub fn lower(&self) -> &[u8] {
        &self.lower
    }

    pub fn upper(&self) -> &[u8] {
        &self.upper
    }

    pub fn contains(&self, digits: &[u8]) -> bool {
        digits
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&x, (&l, &u))| l <= x && x <= u)
    }
}

/// One DNF term: a conjunction of literals `(variable, required value)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DnfTerm {
    pub literals: Vec<(usize, bool)>,
}

impl DnfTerm {
    pub fn satisfied(&self, digits: &[u8]) -> bool {
        self.literals
            .iter()
            .all(|&(v, val)| (digits[v] == 1) == val)
    }

    /// The subcube of `[2]^n` on which this term is satisfied.
    pub fn as_rectangle(&self, alphabet: Alphabet) -> Result<Rectangle> {
        let mut lower = vec![0u8; alphabet.dim()];
        let mut upper = vec![1u8; alphabet.dim()];
        for &(v, val) in &self.literals {
            let d = val as u8;
            lower[v] = d;
            upper[v] = d;
        }
        Rectangle::new(alphabet, lower, upper)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TargetRepr {
    Parity { support: FreqIndex },
    Dnf { terms: Vec<DnfTerm> },
    Top { weights: Vec<i64>, vectors: Vec<FreqIndex> },
    Ubox { rectangles: Vec<Rectangle> },
    Table { values: Vec<i8> },
}

/// A ±1-valued target function on `[b]^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetFunction {
    alphabet: Alphabet,
    repr: TargetRepr,
    seed: Option<u64>,
}

impl TargetFunction {
    /// The parity `(-1)^{a·x}` (b = 2 only).
    pub fn parity(alphabet: Alphabet, support: FreqIndex) -> Result<Self> {
        if alphabet.base() != 2 {
            return Err(Error::parameter("parity targets require b = 2"));
        }
        alphabet.check_digits(support.digits())?;
        Ok(TargetFunction {
            alphabet,
            repr: TargetRepr::Parity { support },
            seed: None,
        })
    }

    pub fn dnf(alphabet: Alphabet, terms: Vec<DnfTerm>) -> Result<Self> {
        if alphabet.base() != 2 {
            return Err(Error::parameter("DNF targets require b = 2"));
        }
        for term in &terms {
            let mut vars: Vec<usize> = term.literals.iter().map(|&(v, _)| v).collect();
            vars.sort_unstable();
            if vars.iter().any(|&v| v >= alphabet.dim()) {
                return Err(Error::parameter("DNF literal variable out of range"));
            }
            if vars.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::parameter("DNF term repeats a variable"));
            }
        }
        Ok(TargetFunction {
            alphabet,
            repr: TargetRepr::Dnf { terms },
            seed: None,
        })
    }

    /// Threshold of parities `sgn(Σ w_m (-1)^{a^(m)·x})` (b = 2 only).
    ///
    /// Sign ties must be unreachable. An odd weight sum guarantees this by
    /// parity; otherwise an exact-mode enumeration must prove no zero is hit.
    pub fn top(alphabet: Alphabet, weights: Vec<i64>, vectors: Vec<FreqIndex>) -> Result<Self> {
        if alphabet.base() != 2 {
            return Err(Error::parameter("TOP targets require b = 2"));
        }
        if weights.is_empty() || weights.len() != vectors.len() {
            return Err(Error::parameter(
                "TOP requires equally many (and at least one) weights and vectors",
            ));
        }
        for v in &vectors {
            alphabet.check_digits(v.digits())?;
        }
        let f = TargetFunction {
            alphabet,
            repr: TargetRepr::Top { weights: weights.clone(), vectors },
            seed: None,
        };
        let weight_sum: i64 = weights.iter().map(|w| w.abs()).sum();
        if weight_sum % 2 == 0 {
            // Even weight sum: a zero may be reachable; only an exhaustive
            // check can rule it out.
            let size = alphabet.exact_size().map_err(|_| {
                Error::parameter(
                    "TOP with even weight sum cannot be validated outside exact mode",
                )
            })?;
            let mut digits = vec![0u8; alphabet.dim()];
            for idx in 0..size {
                alphabet.digits_of(idx, &mut digits);
                if f.top_sum(&digits) == 0 {
                    return Err(Error::parameter("TOP weighted sum reaches 0"));
                }
            }
        }
        Ok(f)
    }

    pub fn ubox(alphabet: Alphabet, rectangles: Vec<Rectangle>) -> Result<Self> {
        for r in &rectangles {
            alphabet.check_digits(r.lower())?;
            alphabet.check_digits(r.upper())?;
        }
        Ok(TargetFunction {
            alphabet,
            repr: TargetRepr::Ubox { rectangles },
            seed: None,
        })
    }

    /// An explicit truth table in little-endian point-index order.
    pub fn table(alphabet: Alphabet, values: Vec<i8>) -> Result<Self> {
        let size = alphabet.exact_size()?;
        if values.len() as u64 != size {
            return Err(Error::parameter(format!(
                "truth table needs {size} entries, got {}",
                values.len()
            )));
        }
        if values.iter().any(|&v| v != 1 && v != -1) {
            return Err(Error::parameter("truth table entries must be +1 or -1"));
        }
        Ok(TargetFunction {
            alphabet,
            repr: TargetRepr::Table { values },
            seed: None,
        })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn class_name(&self) -> &'static str {
        match &self.repr {
            TargetRepr::Parity { .. } => "parity",
            TargetRepr::Dnf { .. } => "dnf",
            TargetRepr::Top { .. } => "top",
            TargetRepr::Ubox { .. } => "ubox",
            TargetRepr::Table { .. } => "table",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    fn top_sum(&self, digits: &[u8]) -> i64 {
        match &self.repr {
            TargetRepr::Top { weights, vectors } => weights
                .iter()
                .zip(vectors)
                .map(|(&w, a)| {
                    let dot: u32 = a
                        .digits()
                        .iter()
                        .zip(digits)
                        .map(|(&ai, &xi)| (ai & xi) as u32)
                        .sum();
                    if dot % 2 == 0 {
                        w
                    } else {
                        -w
                    }
                })
                .sum(),
            _ => unreachable!(),
        }
    }

    /// Evaluates at a point after checking it conforms to the alphabet.
    pub fn evaluate(&self, x: &Point) -> Result<i8> {
        self.alphabet.check_digits(x.digits())?;
        Ok(self.eval_digits(x.digits()))
    }

    /// Evaluates on raw digits without validation (hot path).
    pub fn eval_digits(&self, digits: &[u8]) -> i8 {
        match &self.repr {
            TargetRepr::Parity { support } => {
                let dot: u32 = support
                    .digits()
                    .iter()
                    .zip(digits)
                    .map(|(&ai, &xi)| (ai & xi) as u32)
                    .sum();
                if dot % 2 == 0 {
                    1
                } else {
                    -1
                }
            }
            TargetRepr::Dnf { terms } => {
                if terms.iter().any(|t| t.satisfied(digits)) {
                    -1
                } else {
                    1
                }
            }
            TargetRepr::Top { .. } => {
                let s = self.top_sum(digits);
                debug_assert!(s != 0, "TOP sign tie; validation should forbid this");
                if s > 0 {
                    1
                } else {
                    -1
                }
            }
            TargetRepr::Ubox { rectangles } => {
                if rectangles.iter().any(|r| r.contains(digits)) {
                    -1
                } else {
                    1
                }
            }
            TargetRepr::Table { values } => values[self.alphabet.index_of(digits) as usize],
        }
    }

    /// The full truth table in little-endian index order (exact mode only).
    pub fn truth_table(&self) -> Result<Vec<i8>> {
        let size = self.alphabet.exact_size()?;
        if let TargetRepr::Table { values } = &self.repr {
            return Ok(values.clone());
        }
        let mut digits = vec![0u8; self.alphabet.dim()];
        let mut out = Vec::with_capacity(size as usize);
        for idx in 0..size {
            self.alphabet.digits_of(idx, &mut digits);
            out.push(self.eval_digits(&digits));
        }
        Ok(out)
    }

    /// Encoding length used in experiment reports.
    ///
    /// UBOX sizes follow a literal-encoding convention (two bounds per
    /// coordinate per rectangle); the choice is a reporting convention only.
    pub fn description_size(&self) -> u64 {
        let n = self.alphabet.dim() as u64;
        match &self.repr {
            TargetRepr::Parity { .. } => n,
            TargetRepr::Dnf { terms } => terms
                .iter()
                .map(|t| t.literals.len() as u64)
                .sum::<u64>()
                .max(1),
            TargetRepr::Top { weights, vectors } => {
                let weight_digits: u64 = weights
                    .iter()
                    .map(|w| w.abs().to_string().len() as u64)
                    .sum();
                vectors.len() as u64 * n + weight_digits
            }
            TargetRepr::Ubox { rectangles } => (2 * n * rectangles.len() as u64).max(1),
            TargetRepr::Table { values } => values.len() as u64,
        }
    }

    pub fn rectangles(&self) -> Option<&[Rectangle]> {
        match &self.repr {
            TargetRepr::Ubox { rectangles } => Some(rectangles),
            _ => None,
        }
    }

    pub fn parity_support(&self) -> Option<&FreqIndex> {
        match &self.repr {
            TargetRepr::Parity { support } => Some(support),
            _ => None,
        }
    }

    // ---- random instance generation -------------------------------------

    pub fn random_parity(alphabet: Alphabet, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let digits = (0..alphabet.dim()).map(|_| rng.gen_range(0..2u8)).collect();
        let mut f = Self::parity(alphabet, FreqIndex::from_digits_unchecked(digits))?;
        f.seed = Some(seed);
        Ok(f)
    }

    /// A DNF with exactly `terms` distinct terms of the given width.
    pub fn random_dnf(alphabet: Alphabet, terms: usize, width: usize, seed: u64) -> Result<Self> {
        if width == 0 || width > alphabet.dim() {
            return Err(Error::parameter("DNF term width out of range"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vars: Vec<usize> = (0..alphabet.dim()).collect();
        let mut chosen: Vec<DnfTerm> = Vec::with_capacity(terms);
        let mut attempts = 0u32;
        while chosen.len() < terms {
            attempts += 1;
            if attempts > 100_000 {
                return Err(Error::parameter(
                    "cannot generate the requested number of distinct DNF terms",
                ));
            }
            let mut picked: Vec<usize> = vars
                .choose_multiple(&mut rng, width)
                .copied()
                .collect();
            picked.sort_unstable();
            let literals: Vec<(usize, bool)> =
                picked.into_iter().map(|v| (v, rng.gen::<bool>())).collect();
            let term = DnfTerm { literals };
            if !chosen.contains(&term) {
                chosen.push(term);
            }
        }
        let mut f = Self::dnf(alphabet, chosen)?;
        f.seed = Some(seed);
        Ok(f)
    }

    /// A TOP with `m` distinct parity vectors and odd total weight, so the
    /// sign is never zero.
    pub fn random_top(alphabet: Alphabet, m: usize, seed: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::parameter("TOP needs at least one vector"));
        }
        let size = alphabet
            .size()
            .unwrap_or(u64::MAX);
        if (m as u64) > size {
            return Err(Error::parameter("more distinct vectors requested than exist"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut vectors: Vec<FreqIndex> = Vec::with_capacity(m);
        let mut attempts = 0u32;
        while vectors.len() < m {
            attempts += 1;
            if attempts > 100_000 {
                return Err(Error::parameter("cannot generate distinct TOP vectors"));
            }
            let digits: Vec<u8> = (0..alphabet.dim()).map(|_| rng.gen_range(0..2u8)).collect();
            let v = FreqIndex::from_digits_unchecked(digits);
            if !vectors.contains(&v) {
                vectors.push(v);
            }
        }
        let mut weights: Vec<i64> = (0..m)
            .map(|_| {
                let mag = rng.gen_range(1..=4i64);
                if rng.gen::<bool>() {
                    mag
                } else {
                    -mag
                }
            })
            .collect();
        let total: i64 = weights.iter().map(|w| w.abs()).sum();
        if total % 2 == 0 {
            weights[0] += weights[0].signum();
        }
        let mut f = Self::top(alphabet, weights, vectors)?;
        f.seed = Some(seed);
        Ok(f)
    }

    /// A union of `count` distinct rectangles.
    pub fn random_ubox(alphabet: Alphabet, count: usize, seed: u64) -> Result<Self> {
        if count == 0 {
            return Err(Error::parameter("UBOX needs at least one rectangle"));
        }
        let b = alphabet.base() as u64;
        let per_coord = b * (b + 1) / 2;
        let mut distinct: u64 = 1;
        for _ in 0..alphabet.dim() {
            distinct = distinct.saturating_mul(per_coord);
        }
        if count as u64 > distinct {
            return Err(Error::parameter(
                "more distinct rectangles requested than exist",
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rects: Vec<Rectangle> = Vec::with_capacity(count);
        let mut attempts = 0u32;
        while rects.len() < count {
            attempts += 1;
            if attempts > 100_000 {
                return Err(Error::parameter("cannot generate distinct rectangles"));
            }
            let mut lower = vec![0u8; alphabet.dim()];
            let mut upper = vec![0u8; alphabet.dim()];
            for i in 0..alphabet.dim() {
                let a = rng.gen_range(0..alphabet.base());
                let c = rng.gen_range(0..alphabet.base());
                lower[i] = a.min(c);
                upper[i] = a.max(c);
            }
            let r = Rectangle { lower, upper };
            if !rects.contains(&r) {
                rects.push(r);
            }
        }
        let mut f = Self::ubox(alphabet, rects)?;
        f.seed = Some(seed);
        Ok(f)
    }

    // ---- file format ----------------------------------------------------

    pub fn to_json(&self) -> Result<String> {
        let doc = FunctionFile::from_target(self);
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: FunctionFile = serde_json::from_str(text)?;
        doc.into_target()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

/// On-disk function-instance document: `{class, b, n, payload, seed}`.
#[derive(Serialize, Deserialize)]
struct FunctionFile {
    class: String,
    b: u8,
    n: usize,
    payload: Payload,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Payload {
    Parity {
        support: Vec<u8>,
    },
    Top {
        weights: Vec<i64>,
        vectors: Vec<Vec<u8>>,
    },
    Dnf {
        terms: Vec<Vec<(usize, bool)>>,
    },
    Ubox {
        rectangles: Vec<Rectangle>,
    },
    Table {
        values: Vec<i8>,
    },
}

impl FunctionFile {
    fn from_target(f: &TargetFunction) -> Self {
        let payload = match &f.repr {
            TargetRepr::Parity { support } => Payload::Parity {
                support: support.digits().to_vec(),
            },
            TargetRepr::Dnf { terms } => Payload::Dnf {
                terms: terms.iter().map(|t| t.literals.clone()).collect(),
            },
            TargetRepr::Top { weights, vectors } => Payload::Top {
                weights: weights.clone(),
                vectors: vectors.iter().map(|v| v.digits().to_vec()).collect(),
            },
            TargetRepr::Ubox { rectangles } => Payload::Ubox {
                rectangles: rectangles.clone(),
            },
            TargetRepr::Table { values } => Payload::Table {
                values: values.clone(),
            },
        };
        FunctionFile {
            class: f.class_name().to_string(),
            b: f.alphabet.base(),
            n: f.alphabet.dim(),
            payload,
            seed: f.seed,
        }
    }

    fn into_target(self) -> Result<TargetFunction> {
        let alphabet = Alphabet::new(self.b, self.n)?;
        let mut f = match (self.class.as_str(), self.payload) {
            ("parity", Payload::Parity { support }) => {
                TargetFunction::parity(alphabet, FreqIndex::new(alphabet, support)?)
            }
            ("dnf", Payload::Dnf { terms }) => TargetFunction::dnf(
                alphabet,
                terms.into_iter().map(|literals| DnfTerm { literals }).collect(),
            ),
            ("top", Payload::Top { weights, vectors }) => {
                let vectors = vectors
                    .into_iter()
                    .map(|v| FreqIndex::new(alphabet, v))
                    .collect::<Result<Vec<_>>>()?;
                TargetFunction::top(alphabet, weights, vectors)
            }
            ("ubox", Payload::Ubox { rectangles }) => {
                let rects = rectangles
                    .into_iter()
                    .map(|r| Rectangle::new(alphabet, r.lower, r.upper))
                    .collect::<Result<Vec<_>>>()?;
                TargetFunction::ubox(alphabet, rects)
            }
            ("table", Payload::Table { values }) => TargetFunction::table(alphabet, values),
            (class, _) => Err(Error::parameter(format!(
                "class tag '{class}' does not match payload shape"
            ))),
        }?;
        f.seed = self.seed;
        Ok(f)
    }
}
