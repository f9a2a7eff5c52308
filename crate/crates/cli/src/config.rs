use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use qtwist::qnum::QScalar;
use serde::Deserialize;

pub const DEFAULT_Q: &str = "1/2";
pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_PRECISION: u32 = 128;
pub const DEFAULT_MAX_SPIN: u32 = 4;
pub const DEFAULT_MAX_TRIPLE: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Options shared by every subcommand. Each falls back to the config file,
/// then to the built-in default.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Deformation parameter, a positive rational such as 1/2 [default: 1/2]
    #[arg(long, global = true)]
    pub q: Option<String>,
    /// Pass threshold for approximate residuals [default: 1e-8]
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for randomized instances [default: 0]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// File receiving the full result (representation, blocks or lift)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report format [default: csv]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// TOML file providing defaults for q, tol, seed, format, precision,
    /// max_spin and max_triple
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Working precision in bits of approximate arithmetic [default: 128]
    #[arg(long, global = true)]
    pub precision: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    q: Option<String>,
    tol: Option<f64>,
    seed: Option<u64>,
    format: Option<Format>,
    precision: Option<u32>,
    max_spin: Option<u32>,
    max_triple: Option<u32>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub q: QScalar,
    pub tol: f64,
    pub seed: u64,
    pub format: Format,
    pub precision: u32,
    pub max_spin: u32,
    pub max_triple: u32,
    pub out: Option<PathBuf>,
}

fn read_file_config(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
}

impl RunConfig {
    /// Flags override the config file, which overrides the defaults.
    pub fn resolve(args: &GlobalArgs, max_spin: Option<u32>, max_triple: Option<u32>) -> Result<Self, String> {
        let file = match &args.config {
            Some(p) => read_file_config(p)?,
            None => FileConfig::default(),
        };
        let q_text = args.q.clone().or(file.q).unwrap_or_else(|| DEFAULT_Q.to_string());
        let q: QScalar = q_text.parse().map_err(|e| format!("invalid q `{q_text}`: {e}"))?;
        if !q.is_positive() {
            return Err(format!("q must be positive, got {q_text}"));
        }
        let tol = args.tol.or(file.tol).unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0) {
            return Err(format!("tol must be positive, got {tol}"));
        }
        Ok(RunConfig {
            q,
            tol,
            seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            format: args.format.or(file.format).unwrap_or(Format::Csv),
            precision: args.precision.or(file.precision).unwrap_or(DEFAULT_PRECISION),
            max_spin: max_spin.or(file.max_spin).unwrap_or(DEFAULT_MAX_SPIN),
            max_triple: max_triple.or(file.max_triple).unwrap_or(DEFAULT_MAX_TRIPLE),
            out: args.out.clone(),
        })
    }
}
