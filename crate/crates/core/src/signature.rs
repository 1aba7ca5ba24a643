//! Truncated tensor algebra and path signatures.
//!
//! A [`TensorSeries`] holds one dense coefficient block per level `0..=depth`
//! over the alphabet `{0, .., dim - 1}`. Level `k` has `dim^k` entries laid out
//! in lexicographic word order, so the flattened layout is
//!
//! ```text
//! (S^(), S^0, .., S^(d-1), S^00, S^01, .., S^(d-1)(d-1), S^000, ..)
//! ```
//!
//! Signatures of piecewise-linear paths are computed exactly: each segment
//! contributes the truncated tensor exponential of its displacement and the
//! segments are glued with Chen's identity `S(a * b) = S(a) ⊗ S(b)`.
//! Letters are 0-based throughout the API.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

/// Tolerance on the level-0 coefficient of a group-like series.
const GROUP_LIKE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SignatureError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("depth mismatch: {0} vs {1}")]
    DepthMismatch(usize, usize),

    #[error("alphabet dimension must be positive")]
    ZeroDimension,

    #[error("level {level} has {found} coefficients, expected {expected}")]
    LevelLength {
        level: usize,
        expected: usize,
        found: usize,
    },

    #[error("letter {letter} outside alphabet of size {dim}")]
    LetterOutOfRange { letter: usize, dim: usize },

    #[error("level-0 coefficient must be 1 for a signature, got {0}")]
    NotGroupLike(f64),

    #[error("level-0 coefficient must be positive to take a logarithm, got {0}")]
    NonPositiveLeadingTerm(f64),

    #[error("a path needs at least 2 samples, got {0}")]
    TooFewSamples(usize),

    #[error("sample times must be strictly increasing (index {0})")]
    NonIncreasingTimes(usize),

    #[error("sample {index} has dimension {found}, expected {expected}")]
    InconsistentDimension {
        index: usize,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in sample {0}")]
    NonFinite(usize),
}

pub type Result<T> = std::result::Result<T, SignatureError>;

/// A word over the alphabet `{0, .., dim - 1}`.
///
/// Words are ordered by length first and lexicographically within a length,
/// which is the order coefficients appear in a flattened signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>, dim: usize) -> Result<Self> {
        if let Some(&letter) = letters.iter().find(|&&l| l >= dim) {
            return Err(SignatureError::LetterOutOfRange { letter, dim });
        }
        Ok(Self(letters))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Position of this word inside its level block.
    pub fn index(&self, dim: usize) -> usize {
        self.0.iter().fold(0, |acc, &l| acc * dim + l)
    }

    /// Inverse of [`Word::index`].
    pub fn from_index(length: usize, mut index: usize, dim: usize) -> Self {
        let mut letters = vec![0; length];
        for slot in letters.iter_mut().rev() {
            *slot = index % dim;
            index /= dim;
        }
        Self(letters)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("()");
        }
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All words of length `0..=depth` in flattened order.
pub fn words(dim: usize, depth: usize) -> impl Iterator<Item = Word> {
    (0..=depth).flat_map(move |k| (0..dim.pow(k as u32)).map(move |i| Word::from_index(k, i, dim)))
}

/// Element of the tensor algebra truncated at `depth`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSeries {
    dim: usize,
    depth: usize,
    levels: Vec<Vec<f64>>,
}

impl TensorSeries {
    pub fn zero(dim: usize, depth: usize) -> Self {
        assert!(dim > 0, "alphabet dimension must be positive");
        let levels = (0..=depth).map(|k| vec![0.0; dim.pow(k as u32)]).collect();
        Self { dim, depth, levels }
    }

    /// The unit `1 + 0 + 0 + ..`, i.e. the signature of a constant path.
    pub fn identity(dim: usize, depth: usize) -> Self {
        let mut s = Self::zero(dim, depth);
        s.levels[0][0] = 1.0;
        s
    }

    /// Builds a series from explicit level blocks, checking their sizes.
    pub fn from_levels(dim: usize, levels: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(SignatureError::ZeroDimension);
        }
        assert!(!levels.is_empty(), "a series has at least the level-0 block");
        for (k, block) in levels.iter().enumerate() {
            let expected = dim.pow(k as u32);
            if block.len() != expected {
                return Err(SignatureError::LevelLength {
                    level: k,
                    expected,
                    found: block.len(),
                });
            }
        }
        Ok(Self {
            dim,
            depth: levels.len() - 1,
            levels,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn level(&self, k: usize) -> &[f64] {
        &self.levels[k]
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    pub fn leading(&self) -> f64 {
        self.levels[0][0]
    }

    /// Coefficient of the word with the given 0-based letters.
    ///
    /// Panics if the word is longer than the truncation depth or uses a letter
    /// outside the alphabet.
    pub fn coefficient(&self, letters: &[usize]) -> f64 {
        assert!(letters.len() <= self.depth, "word longer than depth");
        assert!(letters.iter().all(|&l| l < self.dim), "letter out of range");
        let idx = letters.iter().fold(0, |acc, &l| acc * self.dim + l);
        self.levels[letters.len()][idx]
    }

    pub fn get(&self, word: &Word) -> f64 {
        self.coefficient(word.letters())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(SignatureError::DimensionMismatch(self.dim, other.dim));
        }
        if self.depth != other.depth {
            return Err(SignatureError::DepthMismatch(self.depth, other.depth));
        }
        Ok(())
    }

    /// Truncated tensor product. No assumption on the level-0 terms.
    pub fn tensor_product(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.dim, self.depth);
        for k in 0..=self.depth {
            let target = &mut out.levels[k];
            for i in 0..=k {
                let j = k - i;
                let left = &self.levels[i];
                let right = &other.levels[j];
                let stride = right.len();
                for (u, &a) in left.iter().enumerate() {
                    if a == 0.0 {
                        continue;
                    }
                    let block = &mut target[u * stride..(u + 1) * stride];
                    for (t, &b) in block.iter_mut().zip(right) {
                        *t += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    fn map_levels(&self, mut f: impl FnMut(usize, f64) -> f64) -> Self {
        let levels = self
            .levels
            .iter()
            .enumerate()
            .map(|(k, block)| block.iter().map(|&x| f(k, x)).collect())
            .collect();
        Self {
            dim: self.dim,
            depth: self.depth,
            levels,
        }
    }

    fn scaled(&self, c: f64) -> Self {
        self.map_levels(|_, x| c * x)
    }

    fn add_assign_scaled(&mut self, other: &Self, c: f64) {
        for (a, b) in self.levels.iter_mut().zip(&other.levels) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += c * y;
            }
        }
    }

    /// Flattened coefficients of levels `1..=depth`; level 0 is dropped.
    pub fn flatten(&self) -> Vec<f64> {
        self.levels[1..].iter().flatten().copied().collect()
    }
}

/// Truncated tensor exponential of a straight segment with the given displacement.
///
/// Level `k` is `Δ^{⊗k} / k!`.
pub fn segment_signature(displacement: &[f64], depth: usize) -> TensorSeries {
    let dim = displacement.len();
    let mut s = TensorSeries::identity(dim, depth);
    for k in 1..=depth {
        let (lower, upper) = s.levels.split_at_mut(k);
        let prev = &lower[k - 1];
        let cur = &mut upper[0];
        let inv_k = 1.0 / k as f64;
        for (u, &a) in prev.iter().enumerate() {
            for (v, &dx) in displacement.iter().enumerate() {
                cur[u * dim + v] = a * dx * inv_k;
            }
        }
    }
    s
}

fn check_group_like(s: &TensorSeries) -> Result<()> {
    if (s.leading() - 1.0).abs() > GROUP_LIKE_TOL {
        return Err(SignatureError::NotGroupLike(s.leading()));
    }
    Ok(())
}

/// Signature of the concatenation of two paths from their signatures.
pub fn chen_concat(a: &TensorSeries, b: &TensorSeries) -> Result<TensorSeries> {
    a.check_compatible(b)?;
    check_group_like(a)?;
    check_group_like(b)?;
    a.tensor_product(b)
}

/// Ordered samples `(t, x)` read as a piecewise-linear curve in `R^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePath {
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl PiecewisePath {
    pub fn new(samples: Vec<(f64, Vec<f64>)>) -> Result<Self> {
        let (times, values): (Vec<f64>, Vec<Vec<f64>>) = samples.into_iter().unzip();
        Self::from_parts(times, values)
    }

    /// Samples indexed by position, `t_i = i`.
    pub fn from_points(values: Vec<Vec<f64>>) -> Result<Self> {
        let times = (0..values.len()).map(|i| i as f64).collect();
        Self::from_parts(times, values)
    }

    pub fn from_parts(times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        assert_eq!(times.len(), values.len(), "one time per sample");
        if values.len() < 2 {
            return Err(SignatureError::TooFewSamples(values.len()));
        }
        let dim = values[0].len();
        if dim == 0 {
            return Err(SignatureError::ZeroDimension);
        }
        for (i, (t, x)) in times.iter().zip(&values).enumerate() {
            if x.len() != dim {
                return Err(SignatureError::InconsistentDimension {
                    index: i,
                    expected: dim,
                    found: x.len(),
                });
            }
            if !t.is_finite() || x.iter().any(|v| !v.is_finite()) {
                return Err(SignatureError::NonFinite(i));
            }
            if i > 0 && *t <= times[i - 1] {
                return Err(SignatureError::NonIncreasingTimes(i));
            }
        }
        Ok(Self { times, values })
    }

    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn displacements(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        self.values
            .windows(2)
            .map(|w| w[1].iter().zip(&w[0]).map(|(b, a)| b - a).collect())
    }

    /// Value of the interpolant at `t`, or `None` outside `[t_1, t_n]`.
    ///
    /// Affine on each `[t_i, t_{i+1})` and equal to `x_n` at `t_n`.
    pub fn evaluate(&self, t: f64) -> Option<Vec<f64>> {
        let n = self.times.len();
        if t < self.times[0] || t > self.times[n - 1] {
            return None;
        }
        if t == self.times[n - 1] {
            return Some(self.values[n - 1].clone());
        }
        // index of the last knot <= t
        let i = self.times.partition_point(|&s| s <= t) - 1;
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let w = (t - t0) / (t1 - t0);
        let x = self.values[i]
            .iter()
            .zip(&self.values[i + 1])
            .map(|(a, b)| a + (b - a) * w)
            .collect();
        Some(x)
    }

    /// The same path shifted by a constant vector.
    pub fn translate(&self, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.dim() {
            return Err(SignatureError::DimensionMismatch(self.dim(), shift.len()));
        }
        let values = self
            .values
            .iter()
            .map(|x| x.iter().zip(shift).map(|(a, c)| a + c).collect())
            .collect();
        Ok(Self {
            times: self.times.clone(),
            values,
        })
    }
}

/// Truncated signature of the piecewise-linear interpolant of `path`.
pub fn path_signature(path: &PiecewisePath, depth: usize) -> TensorSeries {
    let mut sig = TensorSeries::identity(path.dim(), depth);
    for delta in path.displacements() {
        let seg = segment_signature(&delta, depth);
        sig = sig
            .tensor_product(&seg)
            .expect("segments share the path dimension and depth");
    }
    sig
}

/// Truncated logarithm `log λ0 + Σ_{n≥1} (-1)^{n+1}/n (s/λ0 - 1)^{⊗n}`.
///
/// `(s/λ0 - 1)` has no level-0 term, so its `n`-th power vanishes below level
/// `n` and the sum stops exactly at `n = depth`.
pub fn log_signature(s: &TensorSeries) -> Result<TensorSeries> {
    let lead = s.leading();
    if lead <= 0.0 || !lead.is_finite() {
        return Err(SignatureError::NonPositiveLeadingTerm(lead));
    }
    let mut x = s.scaled(1.0 / lead);
    x.levels[0][0] = 0.0;

    let mut out = TensorSeries::zero(s.dim, s.depth);
    let mut power = x.clone();
    for n in 1..=s.depth {
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        out.add_assign_scaled(&power, sign / n as f64);
        if n < s.depth {
            power = power.tensor_product(&x)?;
        }
    }
    out.levels[0][0] = lead.ln();
    Ok(out)
}

/// Truncated tensor exponential `e^{c} Σ_{n=0..depth} y^{⊗n} / n!` where `c`
/// is the level-0 term of `s` and `y = s - c`.
pub fn tensor_exp(s: &TensorSeries) -> TensorSeries {
    let c = s.leading();
    let mut y = s.clone();
    y.levels[0][0] = 0.0;

    let mut out = TensorSeries::identity(s.dim, s.depth);
    let mut term = TensorSeries::identity(s.dim, s.depth);
    for n in 1..=s.depth {
        term = term.tensor_product(&y).expect("same shape").scaled(1.0 / n as f64);
        out.add_assign_scaled(&term, 1.0);
    }
    if c != 0.0 {
        out = out.scaled(c.exp());
    }
    out
}

/// Multiplies each level-`k` block by `k!`.
pub fn factorial_scale(s: &TensorSeries) -> TensorSeries {
    let factorials: Vec<f64> = (0..=s.depth)
        .scan(1.0, |acc, k| {
            if k > 0 {
                *acc *= k as f64;
            }
            Some(*acc)
        })
        .collect();
    s.map_levels(|k, x| x * factorials[k])
}

/// Flattened levels `1..=depth`, see [`TensorSeries::flatten`].
pub fn flatten(s: &TensorSeries) -> Vec<f64> {
    s.flatten()
}

/// Number of coordinates in a truncated signature and log-signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TermCounts {
    pub signature: usize,
    pub logsignature: usize,
}

fn mobius(mut n: u64) -> i128 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Dimension of the degree-`k` component of the free Lie algebra on `d` letters.
pub fn witt_number(d: usize, k: usize) -> usize {
    assert!(k >= 1);
    let d = d as i128;
    let total: i128 = (1..=k as u64)
        .filter(|e| (k as u64).is_multiple_of(*e))
        .map(|e| {
            let exp = (k as u64 / e) as u32;
            mobius(e) * d.checked_pow(exp).expect("term count overflow")
        })
        .sum();
    (total / k as i128) as usize
}

/// Signature and log-signature sizes for a `d`-dimensional path truncated at
/// level `depth`, excluding the constant level-0 term.
pub fn term_counts(d: usize, depth: usize) -> TermCounts {
    let signature = (1..=depth).map(|k| d.pow(k as u32)).sum();
    let logsignature = (1..=depth).map(|k| witt_number(d, k)).sum();
    TermCounts {
        signature,
        logsignature,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn word_order_is_graded_lexicographic() {
        let all: Vec<Word> = words(2, 2).collect();
        let shown: Vec<String> = all.iter().map(|w| w.to_string()).collect();
        assert_eq!(shown, ["()", "(0)", "(1)", "(0,0)", "(0,1)", "(1,0)", "(1,1)"]);
        let mut sorted = all.clone();
        sorted.reverse();
        sorted.sort();
        assert_eq!(sorted, all);
        assert!(Word::new(vec![1], 2).unwrap() < Word::new(vec![0, 0], 2).unwrap());
        assert!(Word::new(vec![2], 2).is_err());
    }

    #[test]
    fn word_index_round_trip() {
        for k in 0..4 {
            for i in 0..3usize.pow(k as u32) {
                let w = Word::from_index(k, i, 3);
                assert_eq!(w.index(3), i);
            }
        }
    }

    #[test]
    fn segment_one_dimensional() {
        let s = segment_signature(&[3.0], 3);
        assert_eq!(s.levels(), &[vec![1.0], vec![3.0], vec![4.5], vec![4.5]]);
    }

    #[test]
    fn segment_zero_is_identity() {
        let s = segment_signature(&[0.0, 0.0], 2);
        assert_eq!(s, TensorSeries::identity(2, 2));
    }

    #[test]
    fn segment_two_dimensional() {
        let s = segment_signature(&[2.0, 3.0], 2);
        assert_eq!(s.coefficient(&[0]), 2.0);
        assert_eq!(s.coefficient(&[1]), 3.0);
        assert_eq!(s.coefficient(&[0, 0]), 2.0);
        assert_eq!(s.coefficient(&[0, 1]), 3.0);
        assert_eq!(s.coefficient(&[1, 0]), 3.0);
        assert_eq!(s.coefficient(&[1, 1]), 4.5);
    }

    #[test]
    fn chen_identity_element() {
        let s = segment_signature(&[1.5, -0.5, 2.0], 3);
        let id = TensorSeries::identity(3, 3);
        assert_eq!(chen_concat(&s, &id).unwrap(), s);
        assert_eq!(chen_concat(&id, &s).unwrap(), s);
    }

    #[test]
    fn chen_l_shaped_path() {
        let a = segment_signature(&[1.0, 0.0], 2);
        let b = segment_signature(&[0.0, 1.0], 2);
        let s = chen_concat(&a, &b).unwrap();
        assert_eq!(s.coefficient(&[0]), 1.0);
        assert_eq!(s.coefficient(&[1]), 1.0);
        assert_eq!(s.coefficient(&[0, 1]), 1.0);
        assert_eq!(s.coefficient(&[1, 0]), 0.0);
        assert_eq!(s.coefficient(&[0, 0]), 0.5);
        assert_eq!(s.coefficient(&[1, 1]), 0.5);
    }

    #[test]
    fn chen_level_one_is_additive() {
        let a = segment_signature(&[2.0, -1.0], 3);
        let b = segment_signature(&[3.0, 5.0], 3);
        let s = chen_concat(&a, &b).unwrap();
        assert_eq!(s.level(1), &[5.0, 4.0]);
    }

    #[test]
    fn chen_rejects_mismatches() {
        let a = segment_signature(&[1.0, 0.0], 2);
        assert_eq!(
            chen_concat(&a, &segment_signature(&[1.0], 2)),
            Err(SignatureError::DimensionMismatch(2, 1))
        );
        assert_eq!(
            chen_concat(&a, &segment_signature(&[1.0, 1.0], 3)),
            Err(SignatureError::DepthMismatch(2, 3))
        );
        let not_sig = TensorSeries::zero(2, 2);
        assert!(matches!(
            chen_concat(&a, &not_sig),
            Err(SignatureError::NotGroupLike(_))
        ));
    }

    #[test]
    fn two_sample_path_is_one_segment() {
        let p = PiecewisePath::from_points(vec![vec![1.0, 2.0], vec![4.0, 0.5]]).unwrap();
        assert_eq!(path_signature(&p, 4), segment_signature(&[3.0, -1.5], 4));
    }

    #[test]
    fn one_letter_words_depend_on_displacement_only() {
        let p =
            PiecewisePath::from_points(vec![vec![0.0, 1.0], vec![2.0, -1.0], vec![-1.0, 0.5], vec![0.5, 3.0]]).unwrap();
        let s = path_signature(&p, 4);
        let mut fact = 1.0;
        for k in 1..=4 {
            fact *= k as f64;
            assert_close(s.coefficient(&vec![0; k]), 0.5f64.powi(k as i32) / fact, 1e-12);
            assert_close(s.coefficient(&vec![1; k]), 2.0f64.powi(k as i32) / fact, 1e-12);
        }
    }

    #[test]
    fn translation_leaves_signature_unchanged() {
        let p = PiecewisePath::from_points(vec![vec![0.0, 1.0], vec![2.0, -1.0], vec![-1.0, 0.5]]).unwrap();
        let q = p.translate(&[10.0, -3.0]).unwrap();
        let (a, b) = (path_signature(&p, 3), path_signature(&q, 3));
        for (x, y) in a.flatten().iter().zip(b.flatten()) {
            assert_close(*x, y, 1e-12);
        }
    }

    #[test]
    fn path_validation() {
        assert_eq!(
            PiecewisePath::from_points(vec![vec![1.0]]),
            Err(SignatureError::TooFewSamples(1))
        );
        assert_eq!(
            PiecewisePath::new(vec![(0.0, vec![1.0]), (0.0, vec![2.0])]),
            Err(SignatureError::NonIncreasingTimes(1))
        );
        assert!(matches!(
            PiecewisePath::new(vec![(0.0, vec![1.0]), (1.0, vec![2.0, 3.0])]),
            Err(SignatureError::InconsistentDimension { index: 1, .. })
        ));
    }

    #[test]
    fn log_of_identity_is_zero() {
        let l = log_signature(&TensorSeries::identity(3, 4)).unwrap();
        assert!(l.levels().iter().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn log_of_segment_is_displacement() {
        let l = log_signature(&segment_signature(&[0.7, -1.2, 2.5], 4)).unwrap();
        assert_eq!(l.leading(), 0.0);
        for (x, y) in l.level(1).iter().zip([0.7, -1.2, 2.5]) {
            assert_close(*x, y, 1e-14);
        }
        for k in 2..=4 {
            assert!(l.level(k).iter().all(|x| x.abs() < 1e-13));
        }
    }

    #[test]
    fn log_rejects_non_positive_leading_term() {
        assert_eq!(
            log_signature(&TensorSeries::zero(2, 2)),
            Err(SignatureError::NonPositiveLeadingTerm(0.0))
        );
    }

    #[test]
    fn log_handles_general_leading_term() {
        let s = segment_signature(&[1.0, 2.0], 3).scaled(2.5);
        let l = log_signature(&s).unwrap();
        assert_close(l.leading(), 2.5f64.ln(), 1e-15);
        let back = tensor_exp(&l);
        for (x, y) in back.levels().iter().flatten().zip(s.levels().iter().flatten()) {
            assert_close(*x, *y, 1e-12);
        }
    }

    #[test]
    fn factorial_scaling() {
        let s = TensorSeries::from_levels(1, vec![vec![1.0], vec![2.0], vec![3.0], vec![4.0]]).unwrap();
        assert_eq!(factorial_scale(&s).flatten(), [2.0, 6.0, 24.0]);
        let seg = factorial_scale(&segment_signature(&[3.0], 3));
        assert_eq!(seg.levels(), &[vec![1.0], vec![3.0], vec![9.0], vec![27.0]]);
        let twice = factorial_scale(&factorial_scale(&s));
        assert_eq!(twice.flatten(), [2.0, 12.0, 144.0]);
    }

    #[test]
    fn term_count_values() {
        assert_eq!(
            term_counts(5, 3),
            TermCounts {
                signature: 155,
                logsignature: 55
            }
        );
        assert_eq!(
            term_counts(1, 3),
            TermCounts {
                signature: 3,
                logsignature: 1
            }
        );
        assert_eq!(
            term_counts(2, 3),
            TermCounts {
                signature: 14,
                logsignature: 5
            }
        );
        assert_eq!(
            term_counts(3, 0),
            TermCounts {
                signature: 0,
                logsignature: 0
            }
        );
        // necklace counts for d = 2
        let witt: Vec<usize> = (1..=6).map(|k| witt_number(2, k)).collect();
        assert_eq!(witt, [2, 1, 2, 3, 6, 9]);
    }

    #[test]
    fn flatten_layout() {
        assert_eq!(segment_signature(&[3.0], 2).flatten(), [3.0, 4.5]);
        let s = TensorSeries::from_levels(2, vec![vec![1.0], vec![0.25, -4.0]]).unwrap();
        assert_eq!(flatten(&s), [0.25, -4.0]);
        let big = segment_signature(&[1.0; 5], 3);
        assert_eq!(big.flatten().len(), term_counts(5, 3).signature);
    }

    #[test]
    fn from_levels_checks_sizes() {
        assert_eq!(
            TensorSeries::from_levels(2, vec![vec![1.0], vec![1.0]]),
            Err(SignatureError::LevelLength {
                level: 1,
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn evaluate_interpolates() {
        let p = PiecewisePath::new(vec![(0.0, vec![0.0]), (1.0, vec![2.0])]).unwrap();
        assert_eq!(p.evaluate(0.25), Some(vec![0.5]));
        assert_eq!(p.evaluate(1.0), Some(vec![2.0]));
        assert_eq!(p.evaluate(1.5), None);
    }
}
