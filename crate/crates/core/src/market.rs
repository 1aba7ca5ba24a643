//! Synthetic market data: geometric Brownian motion return paths, time
//! augmentation, interpolation and regime-point generation.

use std::io::Write;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{MetricsError, RegimePoint};
use crate::seeding;
use crate::signature::{factorial_scale, path_signature, PiecewisePath, SignatureError};

#[derive(Debug, Error)]
pub enum MarketError {
    #[error("volatility must be positive and finite, got {0}")]
    InvalidVolatility(f64),

    #[error("drift must be finite, got {0}")]
    InvalidDrift(f64),

    #[error("{what} must be at least {min}, got {found}")]
    TooSmall {
        what: &'static str,
        min: usize,
        found: usize,
    },

    #[error("knot times must be strictly increasing (index {0})")]
    NonIncreasingTimes(usize),

    #[error(transparent)]
    Signature(#[from] SignatureError),

    #[error(transparent)]
    Metrics(#[from] MetricsError),

    #[error("csv export failed: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, MarketError>;

/// Drift and volatility per unit time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GbmParams {
    pub mu: f64,
    pub sigma: f64,
}

impl GbmParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        let p = Self { mu, sigma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mu.is_finite() {
            return Err(MarketError::InvalidDrift(self.mu));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(MarketError::InvalidVolatility(self.sigma));
        }
        Ok(())
    }
}

/// The four regimes used in the synthetic experiment: μ ∈ {5%, 2%}, σ ∈ {10%, 20%}.
pub fn reference_regimes() -> Vec<GbmParams> {
    vec![
        GbmParams { mu: 0.05, sigma: 0.10 },
        GbmParams { mu: 0.05, sigma: 0.20 },
        GbmParams { mu: 0.02, sigma: 0.10 },
        GbmParams { mu: 0.02, sigma: 0.20 },
    ]
}

/// `S_1..S_m` on the grid `t_i = i/m` over `[0, 1]`; `S_0 = 1` is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSeries {
    values: Vec<f64>,
}

impl SampledSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(MarketError::TooSmall {
                what: "steps",
                min: 2,
                found: values.len(),
            });
        }
        Ok(Self { values })
    }

    pub fn initial(&self) -> f64 {
        1.0
    }

    pub fn steps(&self) -> usize {
        self.values.len()
    }

    /// `S_1, .., S_m`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `t_i = i/m` for `i = 1..=m`.
    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        let m = self.values.len() as f64;
        (1..=self.values.len()).map(move |i| i as f64 / m)
    }
}

/// Exact lognormal stepping:
/// `S_{i+1} = S_i exp((μ − σ²/2)/m + σ √(1/m) Z_i)` with `S_0 = 1`.
pub fn gbm_path<R: Rng + ?Sized>(params: &GbmParams, steps: usize, rng: &mut R) -> Result<SampledSeries> {
    params.validate()?;
    if steps < 2 {
        return Err(MarketError::TooSmall {
            what: "steps",
            min: 2,
            found: steps,
        });
    }
    let dt = 1.0 / steps as f64;
    let drift = (params.mu - 0.5 * params.sigma * params.sigma) * dt;
    let vol = params.sigma * dt.sqrt();
    let mut log_s = 0.0;
    let values = (0..steps)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            log_s += drift + vol * z;
            log_s.exp()
        })
        .collect();
    SampledSeries::new(values)
}

/// Two-dimensional path `{(i/m, S_i)}` for `i = 1..=m`, optionally preceded by `(0, 1)`.
pub fn time_augment(series: &SampledSeries, include_t0: bool) -> PiecewisePath {
    let mut samples: Vec<(f64, Vec<f64>)> = Vec::with_capacity(series.steps() + 1);
    if include_t0 {
        samples.push((0.0, vec![0.0, series.initial()]));
    }
    samples.extend(series.times().zip(series.values()).map(|(t, &s)| (t, vec![t, s])));
    PiecewisePath::new(samples).expect("grid times are increasing and finite")
}

/// Piecewise-linear interpolant of `(t, x)` knots.
pub fn linear_interpolate(points: &[(f64, Vec<f64>)]) -> Result<PiecewisePath> {
    Ok(PiecewisePath::new(points.to_vec())?)
}

/// Right-continuous step interpolant: `x_i` on `[t_i, t_{i+1})` and `x_n` at `t_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepPath {
    times: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl StepPath {
    pub fn evaluate(&self, t: f64) -> Option<Vec<f64>> {
        let n = self.times.len();
        if t < self.times[0] || t > self.times[n - 1] {
            return None;
        }
        let i = self.times.partition_point(|&s| s <= t) - 1;
        Some(self.values[i].clone())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
}

pub fn rectilinear_interpolate(points: &[(f64, Vec<f64>)]) -> Result<StepPath> {
    if points.len() < 2 {
        return Err(MarketError::TooSmall {
            what: "knots",
            min: 2,
            found: points.len(),
        });
    }
    for i in 1..points.len() {
        if points[i].0.partial_cmp(&points[i - 1].0) != Some(std::cmp::Ordering::Greater) {
            return Err(MarketError::NonIncreasingTimes(i));
        }
    }
    let (times, values) = points.iter().cloned().unzip();
    Ok(StepPath { times, values })
}

/// Shape of a generated regime point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimePointSpec {
    pub n_paths: usize,
    pub depth: usize,
    pub steps: usize,
    /// Multiply level-`k` signature terms by `k!`.
    pub factorial_scaling: bool,
    /// Prepend the knot `(0, 1)` before taking signatures.
    pub include_t0: bool,
}

impl RegimePointSpec {
    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("n_paths", self.n_paths, 1),
            ("depth", self.depth, 1),
            ("steps", self.steps, 2),
        ];
        for (what, found, min) in checks {
            if found < min {
                return Err(MarketError::TooSmall { what, min, found });
            }
        }
        Ok(())
    }
}

fn path_features(series: &SampledSeries, spec: &RegimePointSpec) -> Vec<f64> {
    let path = time_augment(series, spec.include_t0);
    let sig = path_signature(&path, spec.depth);
    if spec.factorial_scaling {
        factorial_scale(&sig).flatten()
    } else {
        sig.flatten()
    }
}

/// Simulated series for one regime point; path `i` uses the stream `(seed, i)`.
pub fn simulate_paths(params: &GbmParams, spec: &RegimePointSpec, seed: u64) -> Result<Vec<SampledSeries>> {
    spec.validate()?;
    (0..spec.n_paths as u64)
        .into_par_iter()
        .map(|i| gbm_path(params, spec.steps, &mut seeding::stream(seed, &[i])))
        .collect()
}

/// Simulates `n_paths` series, time-augments and linearly interpolates each,
/// and collects their (optionally `k!`-scaled) truncated signatures.
pub fn regime_point(params: &GbmParams, spec: &RegimePointSpec, seed: u64) -> Result<RegimePoint> {
    let series = simulate_paths(params, spec, seed)?;
    regime_point_from_series(&series, spec)
}

pub fn regime_point_from_series(series: &[SampledSeries], spec: &RegimePointSpec) -> Result<RegimePoint> {
    let features = series.par_iter().map(|s| path_features(s, spec)).collect();
    Ok(RegimePoint::new(features)?)
}

/// Writes `path_id,t,value` rows, one per knot, numbering paths from `first_id`.
pub fn write_paths_csv<W: Write>(writer: W, series: &[SampledSeries], first_id: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["path_id", "t", "value"])?;
    append_paths_csv(&mut w, series, first_id)?;
    w.flush()?;
    Ok(())
}

pub(crate) fn append_paths_csv<W: Write>(
    w: &mut csv::Writer<W>,
    series: &[SampledSeries],
    first_id: usize,
) -> Result<()> {
    for (offset, s) in series.iter().enumerate() {
        let id = (first_id + offset).to_string();
        for (t, v) in s.times().zip(s.values()) {
            w.write_record([id.as_str(), &t.to_string(), &v.to_string()])?;
        }
    }
    Ok(())
}
