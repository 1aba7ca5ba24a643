//! Multiscale random-walk clustering (Azran-Ghahramani).
//!
//! Pipeline: distances → similarity matrix `W` → random-walk matrix
//! `P = D⁻¹W` → spectrum of `P` → eigengap profile `Δ_k(t) = λ_k^t − λ_{k+1}^t`
//! → for every local maximum `t` of `Δ(t) = max_k Δ_k(t)`, a `k`-clustering of
//! the rows of `Pᵗ` by KL-divergence k-prototypes.
//!
//! The spectrum is computed on the symmetric conjugate `D^{-1/2} W D^{-1/2}`,
//! which is similar to `P`. With `u_k` its orthonormal eigenvectors,
//! `v_k = D^{-1/2} u_k` are right eigenvectors of `P` with `v_kᵀ D v_k = 1`, so
//! `A_k = v_k v_kᵀ D` and `Pᵗ = Σ_k λ_kᵗ A_k = D^{-1/2} U Λᵗ Uᵀ D^{1/2}`.
//!
//! Cluster labels are 0-based. Ties in every argmax/argmin go to the smallest
//! index.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::gaussian_similarity;
use crate::seeding;

/// Relative tolerance for the symmetry check on input matrices.
const SYMMETRY_TOL: f64 = 1e-12;

/// Tolerance on row sums when validating probability distributions.
const DISTRIBUTION_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("matrix is not square: {0} x {1}")]
    NotSquare(usize, usize),

    #[error("need at least {required} points, got {found}")]
    TooFewPoints { required: usize, found: usize },

    #[error("matrix is not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),

    #[error("negative or non-finite distance at ({0}, {1})")]
    InvalidDistance(usize, usize),

    #[error("distance matrix has non-zero diagonal at {0}")]
    NonZeroDiagonal(usize),

    #[error("similarity at ({0}, {1}) is negative or non-finite")]
    InvalidSimilarity(usize, usize),

    #[error("row {0} of the similarity matrix sums to zero")]
    ZeroDegree(usize),

    #[error("eigensolver did not converge")]
    Eigensolver,

    #[error("invalid cluster count {k} for {n} points")]
    InvalidClusterCount { k: usize, n: usize },

    #[error("not a probability distribution: {0}")]
    NotADistribution(String),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("the number of steps must be at least 1")]
    NoSteps,
}

pub type Result<T> = std::result::Result<T, SpectralError>;

/// Monotone-decreasing maps from distance to similarity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SimilarityFunction {
    /// `exp(-x / ξ²)`
    Gaussian { xi: f64 },
    /// `exp(-x² / ξ²)`
    GaussianSquared { xi: f64 },
    /// `1 / x`
    Inverse,
    /// `1 / x²`
    InverseSquare,
}

impl SimilarityFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            SimilarityFunction::Gaussian { xi } => gaussian_similarity(x, xi),
            SimilarityFunction::GaussianSquared { xi } => gaussian_similarity(x * x, xi),
            SimilarityFunction::Inverse => 1.0 / x,
            SimilarityFunction::InverseSquare => 1.0 / (x * x),
        }
    }
}

fn check_square(m: &DMatrix<f64>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(SpectralError::NotSquare(m.nrows(), m.ncols()));
    }
    Ok(m.nrows())
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (m[(i, j)], m[(j, i)]);
            if (a - b).abs() > SYMMETRY_TOL * a.abs().max(b.abs()).max(1.0) {
                return Err(SpectralError::Asymmetric(i, j));
            }
        }
    }
    Ok(())
}

/// Symmetric non-negative matrix of pairwise similarities.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix(DMatrix<f64>);

impl SimilarityMatrix {
    pub fn from_matrix(w: DMatrix<f64>) -> Result<Self> {
        check_square(&w)?;
        check_symmetric(&w)?;
        for i in 0..w.nrows() {
            for j in 0..w.ncols() {
                let x = w[(i, j)];
                if !(x >= 0.0 && x.is_finite()) {
                    return Err(SpectralError::InvalidSimilarity(i, j));
                }
            }
        }
        Ok(Self(w))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.0.nrows() == 0
    }
}

/// `W_ij = similarity(d_ij)`.
///
/// The diagonal is `similarity(0)` when that is finite and `0` otherwise, so
/// the inverse families (`1/x`, `1/x²`) produce a walk without self-loops.
/// Coincident distinct points under those families are rejected.
pub fn build_similarity<F>(distances: &DMatrix<f64>, similarity: F) -> Result<SimilarityMatrix>
where
    F: Fn(f64) -> f64,
{
    let n = check_square(distances)?;
    check_symmetric(distances)?;
    for i in 0..n {
        if distances[(i, i)] != 0.0 {
            return Err(SpectralError::NonZeroDiagonal(i));
        }
    }
    let self_similarity = similarity(0.0);
    let diag = if self_similarity.is_finite() {
        self_similarity
    } else {
        0.0
    };
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        w[(i, i)] = diag;
        for j in (i + 1)..n {
            let d = distances[(i, j)];
            if !(d >= 0.0 && d.is_finite()) {
                return Err(SpectralError::InvalidDistance(i, j));
            }
            let s = similarity(d);
            if !(s >= 0.0 && s.is_finite()) {
                return Err(SpectralError::InvalidSimilarity(i, j));
            }
            w[(i, j)] = s;
            w[(j, i)] = s;
        }
    }
    Ok(SimilarityMatrix(w))
}

fn degrees(w: &SimilarityMatrix) -> Result<DVector<f64>> {
    let d = DVector::from_iterator(w.len(), w.0.row_iter().map(|r| r.sum()));
    if let Some(i) = d.iter().position(|&x| x <= 0.0) {
        return Err(SpectralError::ZeroDegree(i));
    }
    Ok(d)
}

/// Random-walk matrix `P = D⁻¹W` and the degree vector `D_ii = Σ_j W_ij`.
pub fn transition_matrix(w: &SimilarityMatrix) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let d = degrees(w)?;
    let mut p = w.0.clone();
    for (i, mut row) in p.row_iter_mut().enumerate() {
        row /= d[i];
    }
    Ok((p, d))
}

/// Spectrum of `P` with eigenvalues sorted in descending order.
#[derive(Debug, Clone)]
pub struct TransitionSpectrum {
    eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors of `D^{-1/2} W D^{-1/2}`, one per column.
    basis: DMatrix<f64>,
    degrees: DVector<f64>,
}

pub fn spectrum(w: &SimilarityMatrix) -> Result<TransitionSpectrum> {
    let n = w.len();
    if n == 0 {
        return Err(SpectralError::TooFewPoints { required: 1, found: 0 });
    }
    let d = degrees(w)?;
    let inv_sqrt = d.map(|x| 1.0 / x.sqrt());
    let mut s = w.0.clone();
    for i in 0..n {
        for j in 0..n {
            s[(i, j)] *= inv_sqrt[i] * inv_sqrt[j];
        }
    }
    let s = (&s + s.transpose()) * 0.5;
    let eig = SymmetricEigen::try_new(s, f64::EPSILON, 0).ok_or(SpectralError::Eigensolver)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i].clamp(-1.0, 1.0)).collect();
    let basis = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(TransitionSpectrum {
        eigenvalues,
        basis,
        degrees: d,
    })
}

impl TransitionSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn degrees(&self) -> &DVector<f64> {
        &self.degrees
    }

    /// Right eigenvector `v_k` of `P` (0-based `k`), normalised so `v_kᵀ D v_k = 1`.
    pub fn eigenvector(&self, k: usize) -> DVector<f64> {
        DVector::from_fn(self.len(), |i, _| self.basis[(i, k)] / self.degrees[i].sqrt())
    }

    /// `A_k = v_k v_kᵀ D / (v_kᵀ D v_k)`.
    pub fn projector(&self, k: usize) -> DMatrix<f64> {
        let v = self.eigenvector(k);
        let dv = v.component_mul(&self.degrees);
        let norm = v.dot(&dv);
        (&v * dv.transpose()) / norm
    }

    /// `Pᵗ` from the spectral expansion, cleaned into row distributions.
    ///
    /// Entries below the round-off floor of the expansion (negative values and
    /// positive values smaller than `16 n ε`) are set to zero and each row is
    /// renormalised, so every row is a probability vector usable by
    /// [`kl_divergence`].
    pub fn power_rows(&self, t: u32) -> DMatrix<f64> {
        let n = self.len();
        let sqrt_d = self.degrees.map(f64::sqrt);
        let powers = DVector::from_iterator(n, self.eigenvalues.iter().map(|l| l.powi(t as i32)));
        let mut left = self.basis.clone();
        for (c, mut col) in left.column_iter_mut().enumerate() {
            col *= powers[c];
        }
        let mut pt = left * self.basis.transpose();
        for i in 0..n {
            for j in 0..n {
                pt[(i, j)] *= sqrt_d[j] / sqrt_d[i];
            }
        }
        let floor = 16.0 * n as f64 * f64::EPSILON;
        for mut row in pt.row_iter_mut() {
            row.apply(|x| {
                if *x < floor {
                    *x = 0.0
                }
            });
            let total = row.sum();
            if total > 0.0 {
                row /= total;
            }
        }
        pt
    }

    pub fn eigengap_profile(&self, max_steps: usize, k_max: Option<usize>) -> Result<EigengapProfile> {
        eigengap_profile(&self.eigenvalues, max_steps, k_max)
    }
}

/// `Δ_k(t)` for `t = 1..=max_steps` and `k = 1..=k_max`, the revealed cluster count `𝒦_t`, the maximal separation `Δ(t)`
/// and the local maxima of `Δ(·)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigengapProfile {
    max_steps: usize,
    gap_count: usize,
    gaps: Vec<f64>,
    revealed: Vec<usize>,
    maximal: Vec<f64>,
    local_maxima: Vec<usize>,
}

/// Builds the eigengap profile from eigenvalues sorted in descending order.
///
/// Cluster counts `k = 1..=k_max` are considered (default `k_max = n`), with
/// `λ_{n+1} := 0` so that `Δ_n(t) = λ_nᵗ`. A local maximum is a maximal run of
/// equal values of `Δ(·)` whose neighbours on both sides (where they exist) are
/// strictly smaller; it is reported at the first step of the run. A run
/// spanning the whole range is not a maximum, and neither is a run at `Δ = 0`.
pub fn eigengap_profile(eigenvalues: &[f64], max_steps: usize, k_max: Option<usize>) -> Result<EigengapProfile> {
    if max_steps == 0 {
        return Err(SpectralError::NoSteps);
    }
    let n = eigenvalues.len();
    let gap_count = k_max.unwrap_or(n).min(n);
    if gap_count == 0 {
        return Err(SpectralError::TooFewPoints { required: 1, found: 0 });
    }
    let base: Vec<f64> = (0..=gap_count)
        .map(|i| eigenvalues.get(i).copied().unwrap_or(0.0))
        .collect();
    let mut powered = base.clone();
    let mut gaps = Vec::with_capacity(max_steps * gap_count);
    let mut revealed = Vec::with_capacity(max_steps);
    let mut maximal = Vec::with_capacity(max_steps);
    for _t in 1..=max_steps {
        let mut best_k = 1;
        let mut best = f64::NEG_INFINITY;
        for k in 1..=gap_count {
            let g = powered[k - 1] - powered[k];
            if g > best {
                best = g;
                best_k = k;
            }
            gaps.push(g);
        }
        revealed.push(best_k);
        maximal.push(best);
        for (p, &l) in powered.iter_mut().zip(&base) {
            *p *= l;
        }
    }
    let local_maxima = plateau_maxima(&maximal)
        .into_iter()
        .filter(|&i| maximal[i] > 0.0)
        .map(|i| i + 1)
        .collect();
    Ok(EigengapProfile {
        max_steps,
        gap_count,
        gaps,
        revealed,
        maximal,
        local_maxima,
    })
}

/// 0-based starts of runs that are strict local maxima after collapsing plateaus.
fn plateau_maxima(values: &[f64]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut start = 0;
    while start < values.len() {
        let mut end = start;
        while end + 1 < values.len() && values[end + 1] == values[start] {
            end += 1;
        }
        let v = values[start];
        let left_ok = start == 0 || values[start - 1] < v;
        let right_ok = end + 1 == values.len() || values[end + 1] < v;
        let whole = start == 0 && end + 1 == values.len();
        if left_ok && right_ok && !whole {
            out.push(start);
        }
        start = end + 1;
    }
    out
}

impl EigengapProfile {
    pub fn max_steps(&self) -> usize {
        self.max_steps
    }

    /// Number of gaps per step (`k` ranges over `1..=gap_count`).
    pub fn gap_count(&self) -> usize {
        self.gap_count
    }

    /// `Δ_k(t)`, both 1-based.
    pub fn gap(&self, k: usize, t: usize) -> f64 {
        assert!((1..=self.gap_count).contains(&k) && (1..=self.max_steps).contains(&t));
        self.gaps[(t - 1) * self.gap_count + (k - 1)]
    }

    /// `𝒦_t`: the cluster count with the largest gap after `t` steps.
    pub fn revealed(&self, t: usize) -> usize {
        self.revealed[t - 1]
    }

    /// `Δ(t)`.
    pub fn maximal(&self, t: usize) -> f64 {
        self.maximal[t - 1]
    }

    pub fn maximal_curve(&self) -> &[f64] {
        &self.maximal
    }

    /// Steps (1-based) at which `Δ(·)` has a local maximum.
    pub fn local_maxima(&self) -> &[usize] {
        &self.local_maxima
    }

    /// The `k`-cluster revealer: the step in `{t : 𝒦_t = k}` maximising
    /// `Δ_k(t)`, with that gap.
    pub fn revealer(&self, k: usize) -> Option<(usize, f64)> {
        (1..=self.max_steps)
            .filter(|&t| self.revealed(t) == k)
            .map(|t| (t, self.gap(k, t)))
            .fold(None, |best, (t, g)| match best {
                Some((_, bg)) if bg >= g => best,
                _ => Some((t, g)),
            })
    }
}

fn check_distribution(p: &[f64]) -> Result<()> {
    if let Some(x) = p.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
        return Err(SpectralError::NotADistribution(format!("entry {x}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > DISTRIBUTION_TOL {
        return Err(SpectralError::NotADistribution(format!("sums to {total}")));
    }
    Ok(())
}

fn kl_unchecked(p: &[f64], q: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            total += a * (a / b).ln();
        }
    }
    total
}

/// `KL(p ‖ q) = Σ p(x) log(p(x)/q(x))`, with `0 log 0 = 0` and `+∞` when `p`
/// puts mass where `q` has none.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(SpectralError::LengthMismatch(p.len(), q.len()));
    }
    check_distribution(p)?;
    check_distribution(q)?;
    Ok(kl_unchecked(p, q))
}

/// `k` prototype distributions over the `n` states, one per row.
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeSet {
    rows: Vec<Vec<f64>>,
}

impl PrototypeSet {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(SpectralError::InvalidClusterCount { k: 0, n: 0 });
        }
        let n = rows[0].len();
        for row in &rows {
            if row.len() != n {
                return Err(SpectralError::LengthMismatch(n, row.len()));
            }
            check_distribution(row)?;
        }
        Ok(Self { rows })
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        let n = self.rows[0].len();
        DMatrix::from_fn(self.k(), n, |r, c| self.rows[r][c])
    }
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn check_rows(rows: &[Vec<f64>]) -> Result<()> {
    for row in rows {
        check_distribution(row)?;
    }
    Ok(())
}

/// Rows of `Pᵗ` with their `Σ p log p`, so that `KL(p ‖ q)` reduces to a dot
/// product against `log q`.
struct KlRows {
    rows: Vec<Vec<f64>>,
    neg_entropy: Vec<f64>,
}

impl KlRows {
    fn new(pt: &DMatrix<f64>) -> Result<Self> {
        let rows = rows_of(pt);
        check_rows(&rows)?;
        let neg_entropy = rows
            .iter()
            .map(|r| r.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum())
            .collect();
        Ok(Self { rows, neg_entropy })
    }

    fn len(&self) -> usize {
        self.rows.len()
    }

    /// `KL(row_m ‖ q)` given `log q`; `+∞` when `q` misses the support of the row.
    fn kl(&self, m: usize, log_q: &[f64]) -> f64 {
        let mut cross = 0.0;
        for (&p, &lq) in self.rows[m].iter().zip(log_q) {
            if p > 0.0 {
                cross += p * lq;
            }
        }
        self.neg_entropy[m] - cross
    }
}

fn logs(q: &[f64]) -> Vec<f64> {
    q.iter().map(|x| x.ln()).collect()
}

/// First index of the largest score among eligible rows.
fn argmax_eligible(scores: &[f64], eligible: impl Fn(usize) -> bool) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (m, &score) in scores.iter().enumerate() {
        if !eligible(m) {
            continue;
        }
        match best {
            Some((_, s)) if s >= score => {}
            _ => best = Some((m, score)),
        }
    }
    best.map(|(m, _)| m)
}

/// Minimum KL divergence from every row to the given log-prototypes.
fn min_divergence(table: &KlRows, log_prototypes: &[Vec<f64>]) -> Vec<f64> {
    (0..table.len())
        .into_par_iter()
        .map(|m| {
            log_prototypes
                .iter()
                .map(|lq| table.kl(m, lq))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

/// Farthest-first seeding: a uniformly random first row, then repeatedly the
/// row with the largest minimum KL divergence to the prototypes chosen so far.
pub fn init_prototypes<R: Rng + ?Sized>(pt: &DMatrix<f64>, k: usize, rng: &mut R) -> Result<PrototypeSet> {
    let n = check_square(pt)?;
    if k == 0 || k > n {
        return Err(SpectralError::InvalidClusterCount { k, n });
    }
    let table = KlRows::new(pt)?;
    let mut chosen = vec![rng.random_range(0..n)];
    let mut nearest = vec![f64::INFINITY; n];
    while chosen.len() < k {
        let log_q = logs(&table.rows[*chosen.last().expect("non-empty")]);
        let update: Vec<f64> = (0..n).into_par_iter().map(|m| table.kl(m, &log_q)).collect();
        for (d, u) in nearest.iter_mut().zip(update) {
            *d = d.min(u);
        }
        let next = argmax_eligible(&nearest, |m| !chosen.contains(&m)).expect("k <= n leaves an unchosen row");
        chosen.push(next);
    }
    PrototypeSet::new(chosen.into_iter().map(|i| table.rows[i].clone()).collect())
}

/// Result of one k-prototypes run.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub k: usize,
    /// Cluster label in `0..k` for every row.
    pub assignment: Vec<usize>,
    /// Cluster means matching `assignment`.
    pub prototypes: PrototypeSet,
    /// `Σ_j Σ_{m∈I_j} KL(P_m ‖ Q_j)` for the returned assignment and prototypes.
    pub objective: f64,
    /// Objective after each assignment step.
    pub objective_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl Partition {
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &a in &self.assignment {
            sizes[a] += 1;
        }
        sizes
    }
}

/// Relabels clusters in order of first appearance.
pub fn canonical_labels(assignment: &[usize]) -> Vec<usize> {
    let mut map: Vec<(usize, usize)> = Vec::new();
    assignment
        .iter()
        .map(|&a| match map.iter().find(|(from, _)| *from == a) {
            Some(&(_, to)) => to,
            None => {
                let to = map.len();
                map.push((a, to));
                to
            }
        })
        .collect()
}

fn assign(table: &KlRows, prototypes: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let log_prototypes: Vec<Vec<f64>> = prototypes.iter().map(|q| logs(q)).collect();
    let best: Vec<(usize, f64)> = (0..table.len())
        .into_par_iter()
        .map(|m| {
            let mut best = (0, f64::INFINITY);
            for (j, lq) in log_prototypes.iter().enumerate() {
                let d = table.kl(m, lq);
                if d < best.1 {
                    best = (j, d);
                }
            }
            best
        })
        .collect();
    let objective = best.iter().map(|b| b.1).sum();
    (best.into_iter().map(|b| b.0).collect(), objective)
}

/// Cluster means; `None` for empty clusters.
fn means(rows: &[Vec<f64>], assignment: &[usize], k: usize) -> Vec<Option<Vec<f64>>> {
    let n = rows[0].len();
    let mut sums = vec![vec![0.0; n]; k];
    let mut counts = vec![0usize; k];
    for (row, &a) in rows.iter().zip(assignment) {
        counts[a] += 1;
        for (s, x) in sums[a].iter_mut().zip(row) {
            *s += x;
        }
    }
    sums.into_iter()
        .zip(counts)
        .map(|(s, c)| (c > 0).then(|| s.into_iter().map(|x| x / c as f64).collect()))
        .collect()
}

/// Fills empty prototypes one at a time with the row farthest (in minimum KL)
/// from the prototypes defined so far.
fn repair(table: &KlRows, partial: Vec<Option<Vec<f64>>>) -> Vec<Vec<f64>> {
    let mut defined: Vec<Vec<f64>> = partial.iter().flatten().map(|q| logs(q)).collect();
    let mut out = Vec::with_capacity(partial.len());
    for slot in partial {
        match slot {
            Some(q) => out.push(q),
            None => {
                let m = argmax_eligible(&min_divergence(table, &defined), |_| true).expect("rows are non-empty");
                defined.push(logs(&table.rows[m]));
                out.push(table.rows[m].clone());
            }
        }
    }
    out
}

fn objective_of(table: &KlRows, assignment: &[usize], prototypes: &[Vec<f64>]) -> f64 {
    let log_prototypes: Vec<Vec<f64>> = prototypes.iter().map(|q| logs(q)).collect();
    assignment
        .iter()
        .enumerate()
        .map(|(m, &a)| table.kl(m, &log_prototypes[a]))
        .sum()
}

/// Lloyd-style alternation of KL assignment and mean update on the rows of `pt`.
///
/// Stops at an assignment fixed point or after `max_iters` assignment steps.
/// Empty clusters are reseeded with the row maximising the minimum KL
/// divergence to the prototypes already defined. If a cluster is still empty at
/// the end (only possible with duplicated rows), the farthest row taken from a
/// cluster with at least two members is moved into it.
pub fn k_prototypes(pt: &DMatrix<f64>, k: usize, initial: &PrototypeSet, max_iters: usize) -> Result<Partition> {
    let n = check_square(pt)?;
    if k == 0 || k > n {
        return Err(SpectralError::InvalidClusterCount { k, n });
    }
    if initial.k() != k {
        return Err(SpectralError::LengthMismatch(k, initial.k()));
    }
    if initial.rows[0].len() != n {
        return Err(SpectralError::LengthMismatch(n, initial.rows[0].len()));
    }
    let table = KlRows::new(pt)?;
    let rows = &table.rows;

    let mut prototypes = initial.rows.clone();
    let mut assignment: Vec<usize> = Vec::new();
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iters.max(1) {
        iterations += 1;
        let (next, objective) = assign(&table, &prototypes);
        history.push(objective);
        if next == assignment {
            converged = true;
            break;
        }
        assignment = next;
        prototypes = repair(&table, means(rows, &assignment, k));
    }

    let mut sizes = vec![0usize; k];
    for &a in &assignment {
        sizes[a] += 1;
    }
    for j in 0..k {
        if sizes[j] > 0 {
            continue;
        }
        let defined: Vec<Vec<f64>> = (0..k).filter(|&c| sizes[c] > 0).map(|c| logs(&prototypes[c])).collect();
        let m = argmax_eligible(&min_divergence(&table, &defined), |m| sizes[assignment[m]] >= 2)
            .expect("k <= n leaves a cluster with two members");
        sizes[assignment[m]] -= 1;
        assignment[m] = j;
        sizes[j] = 1;
    }
    let final_prototypes: Vec<Vec<f64>> = means(rows, &assignment, k)
        .into_iter()
        .map(|q| q.expect("every cluster is non-empty"))
        .collect();
    let objective = objective_of(&table, &assignment, &final_prototypes);
    Ok(Partition {
        k,
        assignment,
        prototypes: PrototypeSet { rows: final_prototypes },
        objective,
        objective_history: history,
        iterations,
        converged,
    })
}

/// Knobs for [`multiscale_cluster`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiscaleOptions {
    /// Largest number of random-walk steps scanned.
    pub max_steps: usize,
    /// Random initialisations per suggested `k`; the lowest objective wins.
    pub restarts: usize,
    /// Cap on k-prototypes assignment steps.
    pub max_iters: usize,
    /// Number of leading eigenvalues considered; `None` uses all of them.
    pub k_max: Option<usize>,
}

impl Default for MultiscaleOptions {
    fn default() -> Self {
        Self {
            max_steps: 2000,
            restarts: 10,
            max_iters: 300,
            k_max: None,
        }
    }
}

/// One suggested partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suggestion {
    pub k: usize,
    /// Step at which this `k` was revealed.
    pub t: usize,
    /// `Δ_k(t) = Δ(t)` at that step.
    pub separation: f64,
    /// Canonical labels (order of first appearance) in `0..k`.
    pub assignment: Vec<usize>,
    pub objective: f64,
    /// `k = 1` suggestions carry no clustering information.
    pub trivial: bool,
}

#[derive(Debug, Clone)]
pub struct MultiscaleResult {
    pub eigenvalues: Vec<f64>,
    pub profile: EigengapProfile,
    pub suggestions: Vec<Suggestion>,
}

/// Best of `restarts` k-prototypes runs on `pt`, each seeded from `(seed, k, r)`.
pub fn best_of_restarts(
    pt: &DMatrix<f64>,
    k: usize,
    restarts: usize,
    max_iters: usize,
    seed: u64,
) -> Result<Partition> {
    let runs: Vec<Partition> = (0..restarts.max(1) as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = seeding::stream(seed, &[k as u64, r]);
            let q0 = init_prototypes(pt, k, &mut rng)?;
            k_prototypes(pt, k, &q0, max_iters)
        })
        .collect::<Result<_>>()?;
    Ok(runs
        .into_iter()
        .reduce(|best, p| if p.objective < best.objective { p } else { best })
        .expect("at least one restart"))
}

/// The full multiscale algorithm.
///
/// Each local maximum `t` of `Δ(·)` proposes `k = 𝒦_t`; when several maxima
/// propose the same `k`, the one with the largest separation is kept. Each
/// proposal is clustered on the rows of `Pᵗ`. Suggestions come back sorted by
/// separation (descending, ties by smaller `k`).
pub fn multiscale_cluster<F>(
    distances: &DMatrix<f64>,
    similarity: F,
    options: &MultiscaleOptions,
    seed: u64,
) -> Result<MultiscaleResult>
where
    F: Fn(f64) -> f64,
{
    let n = check_square(distances)?;
    if n < 2 {
        return Err(SpectralError::TooFewPoints { required: 2, found: n });
    }
    let w = build_similarity(distances, similarity)?;
    let spec = spectrum(&w)?;
    let profile = spec.eigengap_profile(options.max_steps, options.k_max)?;

    let mut proposals: Vec<(usize, usize, f64)> = Vec::new();
    for &t in profile.local_maxima() {
        let k = profile.revealed(t);
        let sep = profile.maximal(t);
        match proposals.iter_mut().find(|(pk, _, _)| *pk == k) {
            Some(entry) if sep > entry.2 => *entry = (k, t, sep),
            Some(_) => {}
            None => proposals.push((k, t, sep)),
        }
    }

    let mut suggestions = Vec::with_capacity(proposals.len());
    for (k, t, separation) in proposals {
        let pt = spec.power_rows(t as u32);
        let partition = if k == 1 {
            let q0 = PrototypeSet::new(vec![means(&rows_of(&pt), &vec![0; n], 1)[0]
                .clone()
                .expect("one cluster holds every row")])?;
            k_prototypes(&pt, 1, &q0, options.max_iters)?
        } else {
            best_of_restarts(&pt, k, options.restarts, options.max_iters, seed)?
        };
        suggestions.push(Suggestion {
            k,
            t,
            separation,
            assignment: canonical_labels(&partition.assignment),
            objective: partition.objective,
            trivial: k == 1,
        });
    }
    suggestions.sort_by(|a, b| b.separation.total_cmp(&a.separation).then(a.k.cmp(&b.k)));

    Ok(MultiscaleResult {
        eigenvalues: spec.eigenvalues().to_vec(),
        profile,
        suggestions,
    })
}
