use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};

use logpot::quadrature::build_disk_rule;
use logpot::SpectralParams64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Options shared by every command. Unset options fall back to the config
/// file and then to the built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Magnetic strength, 2nu > 1.
    #[arg(long, global = true)]
    pub nu: Option<f64>,
    /// Landau level, m <= floor(nu - 1/2).
    #[arg(long, global = true)]
    pub m: Option<usize>,
    /// Largest basis index.
    #[arg(long, global = true)]
    pub kmax: Option<usize>,
    /// Gauss-Legendre nodes in t = r^2.
    #[arg(long = "n-radial", global = true)]
    pub n_radial: Option<usize>,
    /// Equispaced angular nodes (even, at least 8).
    #[arg(long = "n-angular", global = true)]
    pub n_angular: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, env = "LOGPOT_OUT")]
    pub out: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// File of key=value lines supplying defaults for the options above.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub params: SpectralParams64,
    pub k_max: usize,
    pub n_radial: usize,
    pub n_angular: usize,
    pub out_dir: PathBuf,
    pub format: Format,
}

#[derive(Debug, Default)]
struct FileValues {
    nu: Option<f64>,
    m: Option<usize>,
    kmax: Option<usize>,
    n_radial: Option<usize>,
    n_angular: Option<usize>,
    out: Option<PathBuf>,
    format: Option<Format>,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value.parse().map_err(|_| anyhow!("config line {line}: invalid value {value:?} for {key}"))
}

fn read_config(path: &Path) -> Result<FileValues> {
    let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let mut values = FileValues::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {}: expected key=value", i + 1))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "nu" => values.nu = Some(parse_value(key, value, i + 1)?),
            "m" => values.m = Some(parse_value(key, value, i + 1)?),
            "kmax" => values.kmax = Some(parse_value(key, value, i + 1)?),
            "n_radial" | "n-radial" => values.n_radial = Some(parse_value(key, value, i + 1)?),
            "n_angular" | "n-angular" => values.n_angular = Some(parse_value(key, value, i + 1)?),
            "out" => values.out = Some(PathBuf::from(value)),
            "format" => {
                values.format = Some(
                    Format::from_str(value, true)
                        .map_err(|_| anyhow!("config line {}: invalid format {value:?}", i + 1))?,
                )
            }
            other => bail!("config line {}: unknown key {other:?}", i + 1),
        }
    }
    Ok(values)
}

impl RunConfig {
    pub fn resolve(args: &CommonArgs, default_kmax: usize) -> Result<Self> {
        let file = match &args.config {
            Some(path) => read_config(path)?,
            None => FileValues::default(),
        };
        let nu = args.nu.or(file.nu).unwrap_or(1.0);
        let m = args.m.or(file.m).unwrap_or(0);
        let params = SpectralParams64::new(nu, m)?;
        let n_radial = args.n_radial.or(file.n_radial).unwrap_or(64);
        let n_angular = args.n_angular.or(file.n_angular).unwrap_or(256);
        build_disk_rule::<f64>(n_radial, n_angular)?;
        Ok(Self {
            params,
            k_max: args.kmax.or(file.kmax).unwrap_or(default_kmax),
            n_radial,
            n_angular,
            out_dir: args.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from(".")),
            format: args.format.or(file.format).unwrap_or(Format::Csv),
        })
    }
}
