#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sigregime::signature::{PiecewisePath, TensorSeries};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Knots with uniform increments in `[-1, 1]` per coordinate, starting anywhere in `[-5, 5]`.
pub fn random_points<R: Rng>(rng: &mut R, dim: usize, segments: usize) -> Vec<Vec<f64>> {
    let mut x: Vec<f64> = (0..dim).map(|_| rng.random_range(-5.0..5.0)).collect();
    let mut points = vec![x.clone()];
    for _ in 0..segments {
        for xi in x.iter_mut() {
            *xi += rng.random_range(-1.0..1.0);
        }
        points.push(x.clone());
    }
    points
}

pub fn path(points: Vec<Vec<f64>>) -> PiecewisePath {
    PiecewisePath::from_points(points).unwrap()
}

/// `b` translated to start where `a` ends, appended to `a`.
pub fn concatenate(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let end = a.last().unwrap();
    let shift: Vec<f64> = end.iter().zip(&b[0]).map(|(e, s)| e - s).collect();
    let mut out = a.to_vec();
    out.extend(
        b[1..]
            .iter()
            .map(|p| p.iter().zip(&shift).map(|(x, s)| x + s).collect()),
    );
    out
}

pub fn max_abs_diff(a: &TensorSeries, b: &TensorSeries) -> f64 {
    a.flatten()
        .iter()
        .zip(b.flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Iterated integrals of the piecewise-linear path through `points`, computed
/// by cumulative Simpson quadrature of `S^{w i}(u) = ∫_0^u S^w dX^i`.
///
/// Segment `j` is parametrised over `[j, j + 1]` and split into `2 * pairs`
/// subintervals. Returns one vector per level in graded-lexicographic order.
pub fn quadrature_signature(points: &[Vec<f64>], depth: usize, pairs: usize) -> Vec<Vec<f64>> {
    let dim = points[0].len();
    let segments = points.len() - 1;
    let per_segment = 2 * pairs;
    let grid = segments * per_segment + 1;
    let h = 1.0 / per_segment as f64;
    let slope = |seg: usize, i: usize| points[seg + 1][i] - points[seg][i];

    let mut previous: Vec<Vec<f64>> = vec![vec![1.0; grid]];
    let mut levels = vec![vec![1.0]];
    for _ in 1..=depth {
        let mut current = Vec::with_capacity(previous.len() * dim);
        for prefix in &previous {
            for i in 0..dim {
                let mut cum = vec![0.0; grid];
                for seg in 0..segments {
                    let d = slope(seg, i);
                    for p in 0..pairs {
                        let a = seg * per_segment + 2 * p;
                        let (fa, fm, fb) = (prefix[a] * d, prefix[a + 1] * d, prefix[a + 2] * d);
                        cum[a + 1] = cum[a] + h / 12.0 * (5.0 * fa + 8.0 * fm - fb);
                        cum[a + 2] = cum[a] + h / 3.0 * (fa + 4.0 * fm + fb);
                    }
                }
                current.push(cum);
            }
        }
        levels.push(current.iter().map(|c| c[grid - 1]).collect());
        previous = current;
    }
    levels
}

/// Literal three-sum MMD with its own kernel evaluation.
pub fn brute_force_mmd(x: &[Vec<f64>], y: &[Vec<f64>], sigma: f64) -> f64 {
    let k = |a: &[f64], b: &[f64]| {
        let mut sq = 0.0;
        for i in 0..a.len() {
            sq += (a[i] - b[i]) * (a[i] - b[i]);
        }
        (-sq / (2.0 * sigma * sigma)).exp()
    };
    let (m, n) = (x.len() as f64, y.len() as f64);
    let mut xx = 0.0;
    for a in x {
        for b in x {
            xx += k(a, b);
        }
    }
    let mut yy = 0.0;
    for a in y {
        for b in y {
            yy += k(a, b);
        }
    }
    let mut xy = 0.0;
    for a in x {
        for b in y {
            xy += k(a, b);
        }
    }
    (xx / (m * m) - 2.0 * xy / (m * n) + yy / (n * n)).max(0.0).sqrt()
}

/// Random symmetric positive similarity matrix with unit diagonal.
pub fn random_similarity<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let mut w = DMatrix::from_element(n, n, 1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rng.random_range(0.01..1.0);
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    w
}

pub fn matrix_max_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}
