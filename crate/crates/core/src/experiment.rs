//! Config-driven experiment runners and report emission.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::market::{self, GbmParams, MarketError, RegimePointSpec, SampledSeries};
use crate::metrics::{self, KernelConfig, MetricsError, RegimePoint};
use crate::seeding;
use crate::spectral::{self, EigengapProfile, MultiscaleOptions, SimilarityFunction, SpectralError};

const TAG_CLOUDS: u64 = 1;
const TAG_REGIMES: u64 = 2;
const TAG_CLUSTER: u64 = 3;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed input: {0}")]
    Input(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv failure: {0}")]
    Csv(#[from] csv::Error),

    #[error("json failure: {0}")]
    Json(#[from] serde_json::Error),
}

impl ExperimentError {
    /// Process exit status: 2 for configuration and input problems, 3 for
    /// numerical failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) | ExperimentError::Input(_) => 2,
            ExperimentError::Numerical(_) => 3,
            _ => 1,
        }
    }
}

impl From<SpectralError> for ExperimentError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::NotSquare(..)
            | SpectralError::Asymmetric(..)
            | SpectralError::InvalidDistance(..)
            | SpectralError::NonZeroDiagonal(..) => ExperimentError::Input(e.to_string()),
            _ => ExperimentError::Numerical(e.to_string()),
        }
    }
}

impl From<MetricsError> for ExperimentError {
    fn from(e: MetricsError) -> Self {
        ExperimentError::Numerical(e.to_string())
    }
}

impl From<MarketError> for ExperimentError {
    fn from(e: MarketError) -> Self {
        match e {
            MarketError::InvalidVolatility(_) | MarketError::InvalidDrift(_) | MarketError::TooSmall { .. } => {
                ExperimentError::Config(e.to_string())
            }
            _ => ExperimentError::Numerical(e.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    Clouds,
    Regimes,
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityKind {
    /// `exp(-x/ξ²)` with ξ from the 1% quantile rule unless `xi` is set.
    GaussianEq,
    /// `exp(-x²/ξ²)`, with ξ chosen the same way.
    GaussianSquared,
    Inverse,
    InverseSquare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthRule {
    Median,
}

/// MMD kernel bandwidth: `"median"` or an explicit positive number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KernelBandwidth {
    Rule(BandwidthRule),
    Value(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputFormat {
    /// A square, zero-diagonal table is read as distances; anything else as coordinates.
    Auto,
    Distances,
    Coordinates,
}

fn default_max_steps() -> usize {
    2000
}
fn default_restarts() -> usize {
    10
}
fn default_max_iters() -> usize {
    300
}
fn default_depth() -> usize {
    3
}
fn default_n_paths() -> usize {
    40
}
fn default_steps() -> usize {
    100
}
fn default_points_per_regime() -> usize {
    10
}
fn default_regimes() -> Vec<GbmParams> {
    market::reference_regimes()
}
fn default_cloud_centres() -> Vec<Vec<f64>> {
    vec![vec![2.0, 1.0], vec![3.0, 8.0], vec![8.0, 2.0], vec![8.0, 8.0]]
}
fn default_cloud_sigma() -> f64 {
    1.0
}
fn default_cloud_size() -> usize {
    100
}
fn default_similarity() -> SimilarityKind {
    SimilarityKind::GaussianEq
}
fn default_bandwidth() -> KernelBandwidth {
    KernelBandwidth::Rule(BandwidthRule::Median)
}
fn default_true() -> bool {
    true
}
fn default_input_format() -> InputFormat {
    InputFormat::Auto
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub seed: u64,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default)]
    pub k_max: Option<usize>,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default = "default_n_paths")]
    pub n_paths: usize,
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_points_per_regime")]
    pub points_per_regime: usize,
    #[serde(default = "default_regimes")]
    pub regimes: Vec<GbmParams>,
    #[serde(default = "default_true")]
    pub factorial_scaling: bool,
    #[serde(default)]
    pub include_t0: bool,
    #[serde(default = "default_cloud_centres")]
    pub cloud_centres: Vec<Vec<f64>>,
    #[serde(default = "default_cloud_sigma")]
    pub cloud_sigma: f64,
    #[serde(default = "default_cloud_size")]
    pub cloud_size: usize,
    #[serde(default = "default_similarity")]
    pub similarity: SimilarityKind,
    /// Overrides the quantile rule for the Gaussian families.
    #[serde(default)]
    pub xi: Option<f64>,
    #[serde(default = "default_bandwidth")]
    pub kernel_bandwidth: KernelBandwidth,
    #[serde(default)]
    pub input: Option<PathBuf>,
    #[serde(default = "default_input_format")]
    pub input_format: InputFormat,
    #[serde(default)]
    pub export_paths: bool,
}

impl ExperimentConfig {
    /// Defaults for `experiment` with the given seed.
    pub fn new(experiment: ExperimentKind, seed: u64) -> Self {
        serde_json::from_value(serde_json::json!({ "experiment": experiment, "seed": seed }))
            .expect("defaults deserialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| ExperimentError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("max_steps", self.max_steps),
            ("restarts", self.restarts),
            ("max_iters", self.max_iters),
            ("depth", self.depth),
            ("n_paths", self.n_paths),
            ("points_per_regime", self.points_per_regime),
            ("cloud_size", self.cloud_size),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(ExperimentError::Config(format!("{name} must be positive")));
            }
        }
        if self.k_max == Some(0) {
            return Err(ExperimentError::Config("k_max must be positive".into()));
        }
        if self.steps < 2 {
            return Err(ExperimentError::Config("steps must be at least 2".into()));
        }
        if self.max_steps > u32::MAX as usize {
            return Err(ExperimentError::Config("max_steps is too large".into()));
        }
        if let Some(xi) = self.xi {
            if !(xi > 0.0 && xi.is_finite()) {
                return Err(ExperimentError::Config(format!("xi must be positive, got {xi}")));
            }
        }
        if let KernelBandwidth::Value(b) = self.kernel_bandwidth {
            KernelConfig::new(b).map_err(|e| ExperimentError::Config(e.to_string()))?;
        }
        match self.experiment {
            ExperimentKind::Clouds => {
                if self.cloud_centres.is_empty() {
                    return Err(ExperimentError::Config("cloud_centres is empty".into()));
                }
                let dim = self.cloud_centres[0].len();
                if dim == 0 || self.cloud_centres.iter().any(|c| c.len() != dim) {
                    return Err(ExperimentError::Config(
                        "cloud centres must share a positive dimension".into(),
                    ));
                }
                if self.cloud_centres.iter().flatten().any(|x| !x.is_finite()) {
                    return Err(ExperimentError::Config("cloud centres must be finite".into()));
                }
                if !(self.cloud_sigma > 0.0 && self.cloud_sigma.is_finite()) {
                    return Err(ExperimentError::Config("cloud_sigma must be positive".into()));
                }
            }
            ExperimentKind::Regimes => {
                if self.regimes.is_empty() {
                    return Err(ExperimentError::Config("regimes is empty".into()));
                }
                for r in &self.regimes {
                    r.validate()?;
                }
            }
            ExperimentKind::Generic => {
                if self.input.is_none() {
                    return Err(ExperimentError::Config("generic runs need an input file".into()));
                }
            }
        }
        Ok(())
    }

    fn options(&self) -> MultiscaleOptions {
        MultiscaleOptions {
            max_steps: self.max_steps,
            restarts: self.restarts,
            max_iters: self.max_iters,
            k_max: self.k_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMetadata {
    /// Everything needed to reproduce the run.
    pub config: ExperimentConfig,
    pub n_points: usize,
    /// Gaussian similarity scale, when that family is used.
    pub xi: Option<f64>,
    /// MMD kernel bandwidth, for regime runs.
    pub kernel_bandwidth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSuggestion {
    pub k: usize,
    /// Step at which the partition is best revealed.
    pub t: usize,
    pub separation: f64,
    pub trivial: bool,
    pub objective: f64,
    pub assignment: Vec<usize>,
    /// Agreement with the generating labels, when known.
    pub ari: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringReport {
    pub metadata: ReportMetadata,
    /// Eigenvalues of the transition matrix, descending.
    pub eigenvalues: Vec<f64>,
    /// Steps at which the maximal separation curve peaks.
    pub local_maxima: Vec<usize>,
    /// Sorted by separation, descending.
    pub suggestions: Vec<ReportSuggestion>,
    pub ground_truth: Option<Vec<usize>>,
}

impl ClusteringReport {
    /// The `Δ_k(t)` grid, recomputed from the stored eigenvalues.
    pub fn eigengap_profile(&self) -> Result<EigengapProfile> {
        let cfg = &self.metadata.config;
        Ok(spectral::eigengap_profile(&self.eigenvalues, cfg.max_steps, cfg.k_max)?)
    }

    pub fn suggestion(&self, k: usize) -> Option<&ReportSuggestion> {
        self.suggestions.iter().find(|s| s.k == k)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Chance-corrected agreement between two labelings of the same points.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len(), "labelings must cover the same points");
    let n = a.len() as f64;
    let choose2 = |x: f64| x * (x - 1.0) / 2.0;
    let mut table: HashMap<(usize, usize), usize> = HashMap::new();
    let mut rows: HashMap<usize, usize> = HashMap::new();
    let mut cols: HashMap<usize, usize> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *table.entry((x, y)).or_default() += 1;
        *rows.entry(x).or_default() += 1;
        *cols.entry(y).or_default() += 1;
    }
    let sum = |m: &mut dyn Iterator<Item = usize>| m.map(|c| choose2(c as f64)).sum::<f64>();
    let index = sum(&mut table.values().copied());
    let ra = sum(&mut rows.values().copied());
    let cb = sum(&mut cols.values().copied());
    let expected = ra * cb / choose2(n);
    let max = 0.5 * (ra + cb);
    if max == expected {
        return 1.0;
    }
    (index - expected) / (max - expected)
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn cluster(
    cfg: &ExperimentConfig,
    distances: &DMatrix<f64>,
    truth: Option<Vec<usize>>,
    kernel_bandwidth: Option<f64>,
) -> Result<ClusteringReport> {
    let scale = || -> Result<f64> {
        match cfg.xi {
            Some(xi) => Ok(xi),
            None => Ok(metrics::xi_heuristic(distances)?),
        }
    };
    let similarity = match cfg.similarity {
        SimilarityKind::GaussianEq => SimilarityFunction::Gaussian { xi: scale()? },
        SimilarityKind::GaussianSquared => SimilarityFunction::GaussianSquared { xi: scale()? },
        SimilarityKind::Inverse => SimilarityFunction::Inverse,
        SimilarityKind::InverseSquare => SimilarityFunction::InverseSquare,
    };
    let xi = match similarity {
        SimilarityFunction::Gaussian { xi } | SimilarityFunction::GaussianSquared { xi } => Some(xi),
        _ => None,
    };
    let seed = seeding::derive_seed(cfg.seed, &[TAG_CLUSTER]);
    let result = spectral::multiscale_cluster(distances, |x| similarity.eval(x), &cfg.options(), seed)?;
    let suggestions = result
        .suggestions
        .into_iter()
        .map(|s| ReportSuggestion {
            ari: truth.as_ref().map(|t| adjusted_rand_index(t, &s.assignment)),
            k: s.k,
            t: s.t,
            separation: s.separation,
            trivial: s.trivial,
            objective: s.objective,
            assignment: s.assignment,
        })
        .collect();
    Ok(ClusteringReport {
        metadata: ReportMetadata {
            config: cfg.clone(),
            n_points: distances.nrows(),
            xi,
            kernel_bandwidth,
        },
        eigenvalues: result.eigenvalues,
        local_maxima: result.profile.local_maxima().to_vec(),
        suggestions,
        ground_truth: truth,
    })
}

fn expect_kind(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<()> {
    if cfg.experiment != kind {
        return Err(ExperimentError::Config(format!(
            "expected a {kind:?} config, got {:?}",
            cfg.experiment
        )));
    }
    cfg.validate()
}

/// Points drawn around each centre with i.i.d. `N(0, σ²)` coordinates, with their centre index.
pub fn sample_clouds(cfg: &ExperimentConfig) -> Result<(Vec<Vec<f64>>, Vec<usize>)> {
    let noise = Normal::new(0.0, cfg.cloud_sigma).map_err(|e| ExperimentError::Config(e.to_string()))?;
    let mut points = Vec::with_capacity(cfg.cloud_centres.len() * cfg.cloud_size);
    let mut labels = Vec::with_capacity(points.capacity());
    for (c, centre) in cfg.cloud_centres.iter().enumerate() {
        let mut rng = seeding::stream(cfg.seed, &[TAG_CLOUDS, c as u64]);
        for _ in 0..cfg.cloud_size {
            points.push(centre.iter().map(|&m| m + noise.sample(&mut rng)).collect());
            labels.push(c);
        }
    }
    Ok((points, labels))
}

pub fn run_gaussian_clouds(cfg: &ExperimentConfig) -> Result<ClusteringReport> {
    expect_kind(cfg, ExperimentKind::Clouds)?;
    let (points, labels) = sample_clouds(cfg)?;
    let distances = metrics::euclidean_distances(&points)?;
    cluster(cfg, &distances, Some(labels), None)
}

/// Simulated series for every regime point, in regime-major order.
pub fn simulate_regimes(cfg: &ExperimentConfig) -> Result<Vec<Vec<SampledSeries>>> {
    let spec = regime_spec(cfg);
    let jobs: Vec<(usize, usize)> = (0..cfg.regimes.len())
        .flat_map(|r| (0..cfg.points_per_regime).map(move |p| (r, p)))
        .collect();
    jobs.par_iter()
        .map(|&(r, p)| {
            let seed = seeding::derive_seed(cfg.seed, &[TAG_REGIMES, r as u64, p as u64]);
            Ok(market::simulate_paths(&cfg.regimes[r], &spec, seed)?)
        })
        .collect()
}

fn regime_spec(cfg: &ExperimentConfig) -> RegimePointSpec {
    RegimePointSpec {
        n_paths: cfg.n_paths,
        depth: cfg.depth,
        steps: cfg.steps,
        factorial_scaling: cfg.factorial_scaling,
        include_t0: cfg.include_t0,
    }
}

/// Regime points and their generating regime indices.
pub fn regime_points(cfg: &ExperimentConfig) -> Result<(Vec<RegimePoint>, Vec<usize>)> {
    let spec = regime_spec(cfg);
    let series = simulate_regimes(cfg)?;
    let points = series
        .par_iter()
        .map(|s| Ok(market::regime_point_from_series(s, &spec)?))
        .collect::<Result<Vec<_>>>()?;
    let labels = (0..cfg.regimes.len())
        .flat_map(|r| std::iter::repeat_n(r, cfg.points_per_regime))
        .collect();
    Ok((points, labels))
}

pub fn run_synthetic_regimes(cfg: &ExperimentConfig) -> Result<ClusteringReport> {
    expect_kind(cfg, ExperimentKind::Regimes)?;
    let (points, labels) = regime_points(cfg)?;
    let kernel = match cfg.kernel_bandwidth {
        KernelBandwidth::Rule(BandwidthRule::Median) => metrics::pooled_median_bandwidth(&points)?,
        KernelBandwidth::Value(b) => KernelConfig::new(b)?,
    };
    let distances = metrics::distance_matrix(&points, &kernel)?;
    cluster(cfg, &distances, Some(labels), Some(kernel.bandwidth()))
}

/// Reads a numeric CSV table, skipping a header row if its first field is not a number.
pub fn read_table(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if i == 0 => continue,
            Err(e) => return Err(ExperimentError::Input(format!("row {}: {e}", i + 1))),
        }
    }
    if rows.is_empty() {
        return Err(ExperimentError::Input("no numeric rows".into()));
    }
    let width = rows[0].len();
    if let Some(i) = rows.iter().position(|r| r.len() != width) {
        return Err(ExperimentError::Input(format!(
            "row {} has {} fields, expected {width}",
            i + 1,
            rows[i].len()
        )));
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(ExperimentError::Input("non-finite value".into()));
    }
    Ok(rows)
}

fn looks_like_distances(rows: &[Vec<f64>]) -> bool {
    rows.len() == rows[0].len() && rows.iter().enumerate().all(|(i, r)| r[i] == 0.0)
}

/// Distances from a table of either pairwise distances or point coordinates.
pub fn table_distances(rows: Vec<Vec<f64>>, format: InputFormat) -> Result<DMatrix<f64>> {
    let as_distances = match format {
        InputFormat::Distances => true,
        InputFormat::Coordinates => false,
        InputFormat::Auto => looks_like_distances(&rows),
    };
    if as_distances {
        let n = rows.len();
        if rows[0].len() != n {
            return Err(ExperimentError::Input(format!(
                "distance table is {n}×{}",
                rows[0].len()
            )));
        }
        let d = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        for i in 0..n {
            for j in 0..n {
                if d[(i, j)] != d[(j, i)] {
                    return Err(ExperimentError::Input(format!(
                        "distance table is asymmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(d)
    } else {
        Ok(metrics::euclidean_distances(&rows)?)
    }
}

pub fn run_generic(cfg: &ExperimentConfig, input_csv: &str) -> Result<ClusteringReport> {
    let mut check = cfg.clone();
    check.input.get_or_insert_with(|| PathBuf::from("-"));
    expect_kind(&check, ExperimentKind::Generic)?;
    let distances = table_distances(read_table(input_csv)?, cfg.input_format)?;
    cluster(cfg, &distances, None, None)
}

/// Runs whichever experiment `cfg` names, reading generic input from `cfg.input`.
pub fn run(cfg: &ExperimentConfig) -> Result<ClusteringReport> {
    match cfg.experiment {
        ExperimentKind::Clouds => run_gaussian_clouds(cfg),
        ExperimentKind::Regimes => run_synthetic_regimes(cfg),
        ExperimentKind::Generic => {
            let path = cfg
                .input
                .as_ref()
                .ok_or_else(|| ExperimentError::Config("generic runs need an input file".into()))?;
            run_generic(cfg, &read_to_string(path)?)
        }
    }
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `report.json`, `eigengaps.csv` and `assignments.csv` into `out_dir`.
pub fn emit_report(report: &ClusteringReport, out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|source| ExperimentError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;

    let json_path = out_dir.join("report.json");
    fs::write(&json_path, report.to_json()?).map_err(|source| ExperimentError::Io {
        path: json_path,
        source,
    })?;

    let profile = report.eigengap_profile()?;
    let mut gaps = csv::Writer::from_writer(std::io::BufWriter::new(create(&out_dir.join("eigengaps.csv"))?));
    gaps.write_record(["t", "k", "delta"])?;
    for t in 1..=profile.max_steps() {
        for k in 1..=profile.gap_count() {
            gaps.write_record([t.to_string(), k.to_string(), profile.gap(k, t).to_string()])?;
        }
    }
    gaps.flush().map_err(|source| ExperimentError::Io {
        path: out_dir.join("eigengaps.csv"),
        source,
    })?;

    let mut assignments = csv::Writer::from_writer(create(&out_dir.join("assignments.csv"))?);
    assignments.write_record(["point_id", "k", "label"])?;
    for s in &report.suggestions {
        for (i, label) in s.assignment.iter().enumerate() {
            assignments.write_record([i.to_string(), s.k.to_string(), label.to_string()])?;
        }
    }
    assignments.flush().map_err(|source| ExperimentError::Io {
        path: out_dir.join("assignments.csv"),
        source,
    })?;
    Ok(())
}

/// Writes the simulated regime paths as `paths.csv` (`path_id,t,value`),
/// numbering paths consecutively in regime-major order.
pub fn emit_paths(cfg: &ExperimentConfig, out_dir: &Path) -> Result<()> {
    let series = simulate_regimes(cfg)?;
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(create(&out_dir.join("paths.csv"))?));
    w.write_record(["path_id", "t", "value"])?;
    let mut next = 0;
    for point in &series {
        market::append_paths_csv(&mut w, point, next)?;
        next += point.len();
    }
    w.flush().map_err(|source| ExperimentError::Io {
        path: out_dir.join("paths.csv"),
        source,
    })?;
    Ok(())
}
