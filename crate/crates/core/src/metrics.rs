//! Distances between collections of signatures and the similarity heuristics
//! that feed the clusterer.
//!
//! The distance between two regime points is the biased (V-statistic) maximum
//! mean discrepancy under a Gaussian kernel:
//!
//! ```text
//! MMD(X, Y) = [ 1/m² Σ k(x, x') − 2/(mn) Σ k(x, y) + 1/n² Σ k(y, y') ]^{1/2}
//! ```
//!
//! All sums run in row-major order, so results are bit-for-bit reproducible
//! regardless of how many threads fill a distance matrix.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Negative values of the bracketed MMD term beyond this are reported as errors.
pub const MMD_NEGATIVE_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("kernel bandwidth must be positive and finite, got {0}")]
    InvalidBandwidth(f64),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("empty collection")]
    Empty,

    #[error("need at least {required} items, got {found}")]
    TooFew { required: usize, found: usize },

    #[error("squared MMD is negative ({0}); the kernel is not positive definite")]
    NegativeDiscrepancy(f64),

    #[error("no strictly positive distance to take a quantile of")]
    NoPositiveDistance,

    #[error("all vectors are identical; the median distance is zero")]
    DegenerateBandwidth,

    #[error("distance matrix is not square: {0} x {1}")]
    NotSquare(usize, usize),
}

pub type Result<T> = std::result::Result<T, MetricsError>;

/// Gaussian kernel bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConfig {
    bandwidth: f64,
}

impl KernelConfig {
    pub fn new(bandwidth: f64) -> Result<Self> {
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(MetricsError::InvalidBandwidth(bandwidth));
        }
        Ok(Self { bandwidth })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }
}

fn squared_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// `exp(−‖x−y‖² / (2σ²))`
pub fn gaussian_kernel(x: &[f64], y: &[f64], cfg: &KernelConfig) -> Result<f64> {
    if x.len() != y.len() {
        return Err(MetricsError::LengthMismatch(x.len(), y.len()));
    }
    Ok(kernel(x, y, cfg.bandwidth))
}

fn kernel(x: &[f64], y: &[f64], sigma: f64) -> f64 {
    (-squared_distance(x, y) / (2.0 * sigma * sigma)).exp()
}

/// A non-empty collection of equal-length feature vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimePoint {
    signatures: Vec<Vec<f64>>,
}

impl RegimePoint {
    pub fn new(signatures: Vec<Vec<f64>>) -> Result<Self> {
        let first = signatures.first().ok_or(MetricsError::Empty)?;
        let len = first.len();
        if let Some(bad) = signatures.iter().find(|s| s.len() != len) {
            return Err(MetricsError::LengthMismatch(len, bad.len()));
        }
        Ok(Self { signatures })
    }

    pub fn signatures(&self) -> &[Vec<f64>] {
        &self.signatures
    }

    pub fn len(&self) -> usize {
        self.signatures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signatures.is_empty()
    }

    /// Length of each feature vector.
    pub fn feature_len(&self) -> usize {
        self.signatures[0].len()
    }
}

fn mean_kernel(xs: &[Vec<f64>], ys: &[Vec<f64>], sigma: f64) -> f64 {
    let mut total = 0.0;
    for x in xs {
        for y in ys {
            total += kernel(x, y, sigma);
        }
    }
    total / (xs.len() as f64 * ys.len() as f64)
}

/// Cross term averaged in a fixed orientation so that swapping the arguments
/// gives the same bits.
fn cross_term(x: &[Vec<f64>], y: &[Vec<f64>], sigma: f64) -> f64 {
    if x <= y {
        mean_kernel(x, y, sigma)
    } else {
        mean_kernel(y, x, sigma)
    }
}

fn mmd_from_terms(xx: f64, xy: f64, yy: f64) -> Result<f64> {
    let sq = (xx + yy) - 2.0 * xy;
    if sq < -MMD_NEGATIVE_TOL {
        return Err(MetricsError::NegativeDiscrepancy(sq));
    }
    Ok(sq.max(0.0).sqrt())
}

/// Biased MMD estimate between two collections.
pub fn mmd(x: &RegimePoint, y: &RegimePoint, cfg: &KernelConfig) -> Result<f64> {
    if x.feature_len() != y.feature_len() {
        return Err(MetricsError::LengthMismatch(x.feature_len(), y.feature_len()));
    }
    let s = cfg.bandwidth;
    let xx = mean_kernel(&x.signatures, &x.signatures, s);
    let yy = mean_kernel(&y.signatures, &y.signatures, s);
    let xy = cross_term(&x.signatures, &y.signatures, s);
    mmd_from_terms(xx, xy, yy)
}

/// `exp(−x / ξ²)`.
pub fn gaussian_similarity(x: f64, xi: f64) -> f64 {
    (-x / (xi * xi)).exp()
}

/// Nearest-rank quantile of a non-empty sample, `rank = ceil(q · n)` clamped to `[1, n]`.
pub fn nearest_rank_quantile(values: &mut [f64], q: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
    Some(values[rank - 1])
}

/// The 1% nearest-rank quantile of the strictly positive upper-triangle
/// distances, used as the Gaussian similarity scale `ξ`.
pub fn xi_heuristic(distances: &DMatrix<f64>) -> Result<f64> {
    xi_quantile(distances, 0.01)
}

pub fn xi_quantile(distances: &DMatrix<f64>, q: f64) -> Result<f64> {
    if distances.nrows() != distances.ncols() {
        return Err(MetricsError::NotSquare(distances.nrows(), distances.ncols()));
    }
    let n = distances.nrows();
    let mut positive: Vec<f64> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .map(|(i, j)| distances[(i, j)])
        .filter(|&d| d > 0.0)
        .collect();
    nearest_rank_quantile(&mut positive, q).ok_or(MetricsError::NoPositiveDistance)
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Median heuristic: `σ` is the median pairwise Euclidean distance between
/// the pooled vectors.
pub fn median_bandwidth(vectors: &[&[f64]]) -> Result<KernelConfig> {
    if vectors.len() < 2 {
        return Err(MetricsError::TooFew {
            required: 2,
            found: vectors.len(),
        });
    }
    let len = vectors[0].len();
    if let Some(v) = vectors.iter().find(|v| v.len() != len) {
        return Err(MetricsError::LengthMismatch(len, v.len()));
    }
    let mut dists: Vec<f64> = (0..vectors.len())
        .into_par_iter()
        .flat_map_iter(|i| ((i + 1)..vectors.len()).map(move |j| squared_distance(vectors[i], vectors[j]).sqrt()))
        .collect();
    let m = median(&mut dists);
    if m <= 0.0 {
        return Err(MetricsError::DegenerateBandwidth);
    }
    KernelConfig::new(m)
}

/// Median heuristic over every signature of every point.
pub fn pooled_median_bandwidth(points: &[RegimePoint]) -> Result<KernelConfig> {
    let pooled: Vec<&[f64]> = points
        .iter()
        .flat_map(|p| p.signatures.iter().map(Vec::as_slice))
        .collect();
    median_bandwidth(&pooled)
}

/// Symmetric matrix of pairwise MMDs with a zero diagonal.
pub fn distance_matrix(points: &[RegimePoint], cfg: &KernelConfig) -> Result<DMatrix<f64>> {
    let n = points.len();
    if n < 2 {
        return Err(MetricsError::TooFew { required: 2, found: n });
    }
    let len = points[0].feature_len();
    if let Some(p) = points.iter().find(|p| p.feature_len() != len) {
        return Err(MetricsError::LengthMismatch(len, p.feature_len()));
    }
    let s = cfg.bandwidth;
    let self_terms: Vec<f64> = points
        .par_iter()
        .map(|p| mean_kernel(&p.signatures, &p.signatures, s))
        .collect();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let values: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let xy = cross_term(&points[i].signatures, &points[j].signatures, s);
            mmd_from_terms(self_terms[i], xy, self_terms[j])
        })
        .collect::<Result<_>>()?;
    let mut d = DMatrix::zeros(n, n);
    for (&(i, j), &v) in pairs.iter().zip(&values) {
        d[(i, j)] = v;
        d[(j, i)] = v;
    }
    Ok(d)
}

/// Euclidean distance matrix between coordinate rows.
pub fn euclidean_distances(points: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = points.len();
    if let Some(first) = points.first() {
        if let Some(p) = points.iter().find(|p| p.len() != first.len()) {
            return Err(MetricsError::LengthMismatch(first.len(), p.len()));
        }
    }
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = squared_distance(&points[i], &points[j]).sqrt();
            d[(i, j)] = v;
            d[(j, i)] = v;
        }
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point(v: &[&[f64]]) -> RegimePoint {
        RegimePoint::new(v.iter().map(|x| x.to_vec()).collect()).unwrap()
    }

    #[test]
    fn kernel_values() {
        let cfg = KernelConfig::new(0.7).unwrap();
        let x = [1.0, -2.0, 0.5];
        assert_eq!(gaussian_kernel(&x, &x, &cfg).unwrap(), 1.0);
        let y = [1.0 + 0.7 * 2f64.sqrt(), -2.0, 0.5];
        assert!((gaussian_kernel(&x, &y, &cfg).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(
            gaussian_kernel(&x, &y, &cfg).unwrap(),
            gaussian_kernel(&y, &x, &cfg).unwrap()
        );
        assert_eq!(
            gaussian_kernel(&x, &[1.0], &cfg),
            Err(MetricsError::LengthMismatch(3, 1))
        );
    }

    #[test]
    fn bandwidth_must_be_positive() {
        assert!(KernelConfig::new(0.0).is_err());
        assert!(KernelConfig::new(-1.0).is_err());
        assert!(KernelConfig::new(f64::NAN).is_err());
    }

    #[test]
    fn mmd_of_identical_collections_is_zero() {
        let cfg = KernelConfig::new(1.3).unwrap();
        let x = point(&[&[0.0, 1.0], &[2.0, -1.0], &[0.5, 0.5]]);
        assert!(mmd(&x, &x, &cfg).unwrap() < 1e-12);
    }

    #[test]
    fn mmd_of_singletons() {
        let cfg = KernelConfig::new(0.9).unwrap();
        let (a, b) = ([0.3, 1.0], [1.1, -0.4]);
        let k = gaussian_kernel(&a, &b, &cfg).unwrap();
        let got = mmd(&point(&[&a]), &point(&[&b]), &cfg).unwrap();
        assert!((got - (2.0 - 2.0 * k).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn mmd_rejects_bad_input() {
        assert_eq!(RegimePoint::new(vec![]), Err(MetricsError::Empty));
        assert_eq!(
            RegimePoint::new(vec![vec![1.0], vec![1.0, 2.0]]),
            Err(MetricsError::LengthMismatch(1, 2))
        );
        let cfg = KernelConfig::new(1.0).unwrap();
        assert!(mmd(&point(&[&[1.0]]), &point(&[&[1.0, 2.0]]), &cfg).is_err());
    }

    #[test]
    fn similarity_values() {
        assert_eq!(gaussian_similarity(0.0, 0.3), 1.0);
        assert!((gaussian_similarity(0.09, 0.3) - (-1.0f64).exp()).abs() < 1e-15);
        let xs = [0.0, 0.1, 0.5, 1.0, 3.0];
        assert!(xs
            .windows(2)
            .all(|w| gaussian_similarity(w[0], 0.5) > gaussian_similarity(w[1], 0.5)));
    }

    fn matrix_from_upper(n: usize, upper: &[f64]) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(n, n);
        let mut it = upper.iter();
        for i in 0..n {
            for j in (i + 1)..n {
                let v = *it.next().unwrap();
                d[(i, j)] = v;
                d[(j, i)] = v;
            }
        }
        d
    }

    #[test]
    fn xi_examples() {
        let d = matrix_from_upper(4, &[2.5; 6]);
        assert_eq!(xi_heuristic(&d).unwrap(), 2.5);

        // 15 points give 105 pairs; keep the values 1..=100 and zero the rest
        let upper: Vec<f64> = (1..=105)
            .map(|v| if v <= 100 { (101 - v) as f64 } else { 0.0 })
            .collect();
        assert_eq!(xi_heuristic(&matrix_from_upper(15, &upper)).unwrap(), 1.0);

        let d = matrix_from_upper(3, &[5.0, 7.0, 0.0]);
        assert_eq!(xi_heuristic(&d).unwrap(), 5.0);

        assert_eq!(
            xi_heuristic(&DMatrix::zeros(3, 3)),
            Err(MetricsError::NoPositiveDistance)
        );
    }

    #[test]
    fn median_bandwidth_examples() {
        let (a, b) = ([0.0, 0.0], [2.0, 0.0]);
        assert_eq!(median_bandwidth(&[&a, &b]).unwrap().bandwidth(), 2.0);
        let (x, y, z) = ([0.0], [1.0], [2.0]);
        assert_eq!(median_bandwidth(&[&x, &y, &z]).unwrap().bandwidth(), 1.0);
        assert_eq!(median_bandwidth(&[&z, &x, &y]).unwrap().bandwidth(), 1.0);
        assert_eq!(median_bandwidth(&[&x, &x]), Err(MetricsError::DegenerateBandwidth));
        assert!(median_bandwidth(&[&x]).is_err());
    }

    #[test]
    fn distance_matrix_properties() {
        let cfg = KernelConfig::new(1.0).unwrap();
        let p = point(&[&[0.0, 1.0], &[0.5, 0.2]]);
        let q = point(&[&[3.0, 1.0], &[2.5, 0.0], &[1.0, 1.0]]);
        let d = distance_matrix(&[p.clone(), q.clone(), p.clone()], &cfg).unwrap();
        assert_eq!(d[(0, 2)], 0.0);
        assert_eq!(d, d.transpose());
        assert!((0..3).all(|i| d[(i, i)] == 0.0));
        assert_eq!(d[(0, 1)], mmd(&p, &q, &cfg).unwrap());
        assert!(distance_matrix(&[p], &cfg).is_err());
    }

    #[test]
    fn euclidean() {
        let d = euclidean_distances(&[vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(d[(0, 1)], 5.0);
        assert_eq!(d[(1, 0)], 5.0);
    }
}
