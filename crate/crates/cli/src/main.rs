use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sigregime::experiment::{self, ClusteringReport, ExperimentConfig, ExperimentError, ExperimentKind};

#[derive(Parser)]
#[command(version, about = "Multiscale clustering of point clouds and market regimes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gaussian point clouds in the plane.
    Clouds(Common),
    /// Synthetic GBM regimes compared through signature MMD.
    Regimes(Common),
    /// A user-supplied distance matrix or coordinate table.
    Generic {
        #[command(flatten)]
        common: Common,
        /// CSV of pairwise distances or point coordinates.
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Common {
    /// JSON config; keys mirror the report's config echo.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for report.json, eigengaps.csv and assignments.csv.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

fn load_config(kind: ExperimentKind, common: &Common) -> Result<ExperimentConfig, ExperimentError> {
    let mut value = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| ExperimentError::Io {
                path: path.clone(),
                source,
            })?;
            serde_json::from_str(&text).map_err(|e| ExperimentError::Config(format!("{}: {e}", path.display())))?
        }
        None => serde_json::json!({}),
    };
    let obj = value
        .as_object_mut()
        .ok_or_else(|| ExperimentError::Config("config must be a JSON object".into()))?;
    match obj.get("experiment") {
        Some(found) if *found != serde_json::json!(kind) => {
            return Err(ExperimentError::Config(format!("config is for {found}, not {kind:?}")));
        }
        _ => {
            obj.insert("experiment".into(), serde_json::json!(kind));
        }
    }
    if let Some(seed) = common.seed {
        obj.insert("seed".into(), seed.into());
    }
    if !obj.contains_key("seed") {
        return Err(ExperimentError::Config(
            "a seed is required (config `seed` or --seed)".into(),
        ));
    }
    ExperimentConfig::from_json(&value.to_string())
}

fn summarize(report: &ClusteringReport) {
    println!(
        "{} points, {} suggestion(s)",
        report.metadata.n_points,
        report.suggestions.len()
    );
    for s in &report.suggestions {
        let ari = s.ari.map(|a| format!("  ari {a:.4}")).unwrap_or_default();
        let note = if s.trivial { "  (trivial)" } else { "" };
        println!(
            "  k = {:<3} t = {:<5} separation {:.4}{ari}{note}",
            s.k, s.t, s.separation
        );
    }
}

fn execute(cli: Cli) -> Result<(), ExperimentError> {
    let (kind, common, input) = match cli.command {
        Command::Clouds(c) => (ExperimentKind::Clouds, c, None),
        Command::Regimes(c) => (ExperimentKind::Regimes, c, None),
        Command::Generic { common, input } => (ExperimentKind::Generic, common, input),
    };
    let mut cfg = load_config(kind, &common)?;
    if input.is_some() {
        cfg.input = input;
    }
    cfg.validate()?;
    let report = experiment::run(&cfg)?;
    experiment::emit_report(&report, &common.out)?;
    if cfg.export_paths && kind == ExperimentKind::Regimes {
        experiment::emit_paths(&cfg, &common.out)?;
    }
    summarize(&report);
    println!("wrote {}", common.out.display());
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
