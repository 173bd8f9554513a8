//! Run configuration: defaults, optional JSON config file, command-line
//! overrides, and the documented tolerance table.

use std::collections::BTreeMap;
use std::path::PathBuf;

use frobenius_forge::{Error, Result};
use serde::Deserialize;

/// Default RNG seed used everywhere unless overridden.
pub const DEFAULT_SEED: u64 = 0xF40B;
/// Default number of sample points for bulk checks.
pub const DEFAULT_SAMPLES: usize = 20;

/// Documented default tolerance for every named check.
pub fn default_tolerances() -> BTreeMap<String, f64> {
    let entries: [(&str, f64); 16] = [
        // Exact-arithmetic checks admit no error at all.
        ("wdvv-exact", 0.0),
        ("euler-scaling", 0.0),
        // Chain model suite.
        ("gen-wdvv", 1e-9),
        ("euler-metric-constancy", 1e-10),
        ("third-derivative-fd", 1e-5),
        ("scaling-covariance", 1e-10),
        // Generic prepotential-geometry engine.
        ("unit-law", 1e-10),
        ("associativity", 1e-9),
        ("defmul-consistency", 1e-10),
        ("fmanifold-identity", 1e-6),
        ("metric-flatness", 1e-6),
        ("rescaling-law", 1e-10),
        // Spectral-curve residue tensor and the duality bridge.
        ("residue-symmetry", 1e-10),
        ("residue-gen-wdvv", 1e-8),
        ("duality-constancy", 1e-4),
        // Metric pencil flatness on the polynomial side.
        ("flat-pencil", 1e-6),
    ];
    entries.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Text,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(OutputFormat::Json),
            "text" => Ok(OutputFormat::Text),
            other => Err(Error::Config(format!(
                "unknown output format `{other}` (expected json or text)"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Text => "text",
        }
    }
}

/// Fully resolved configuration for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: String,
    pub lie_type: Option<String>,
    pub rank: Option<usize>,
    pub provider: Option<String>,
    pub rescaling_vector: Option<String>,
    pub seed: u64,
    pub samples: usize,
    pub tolerances: BTreeMap<String, f64>,
    pub format: OutputFormat,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    /// Tolerance by check name; unknown names are a configuration bug
    /// because every consulted name must appear in the documented table.
    pub fn tol(&self, name: &str) -> Result<f64> {
        self.tolerances
            .get(name)
            .copied()
            .ok_or_else(|| Error::Config(format!("no tolerance registered for `{name}`")))
    }
}

/// The subset of settings a JSON config file may provide; command-line
/// flags override any of them.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub format: Option<String>,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

pub fn load_file_config(path: &PathBuf) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read config file {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("malformed config file {}: {e}", path.display())))
}

/// A `--tol` argument: either `name=value` for one check, or a bare value
/// applied to every check the command consults.
#[derive(Debug, Clone)]
pub enum TolArg {
    Named(String, f64),
    All(f64),
}

pub fn parse_tol_arg(raw: &str) -> Result<TolArg> {
    if let Some((name, value)) = raw.split_once('=') {
        let v: f64 = value
            .parse()
            .map_err(|_| Error::Config(format!("bad tolerance value `{value}`")))?;
        if v < 0.0 || !v.is_finite() {
            return Err(Error::Config(format!(
                "tolerance must be a finite nonnegative number, got `{value}`"
            )));
        }
        Ok(TolArg::Named(name.trim().to_string(), v))
    } else {
        let v: f64 = raw
            .parse()
            .map_err(|_| Error::Config(format!("bad --tol argument `{raw}`")))?;
        if v < 0.0 || !v.is_finite() {
            return Err(Error::Config(format!(
                "tolerance must be a finite nonnegative number, got `{raw}`"
            )));
        }
        Ok(TolArg::All(v))
    }
}

/// Merge defaults <- config file <- flags into the final configuration.
#[allow(clippy::too_many_arguments)]
pub fn resolve(
    command: String,
    lie_type: Option<String>,
    rank: Option<usize>,
    provider: Option<String>,
    rescaling_vector: Option<String>,
    file: Option<FileConfig>,
    seed_flag: Option<u64>,
    samples_flag: Option<usize>,
    tol_flags: &[String],
    format_flag: Option<String>,
    output_flag: Option<PathBuf>,
) -> Result<RunConfig> {
    let file = file.unwrap_or_default();
    let mut tolerances = default_tolerances();
    for (name, value) in &file.tolerances {
        if !tolerances.contains_key(name) {
            return Err(Error::Config(format!(
                "unknown tolerance name `{name}` in config file"
            )));
        }
        tolerances.insert(name.clone(), *value);
    }
    let mut all_override: Option<f64> = None;
    for raw in tol_flags {
        match parse_tol_arg(raw)? {
            TolArg::Named(name, value) => {
                if !tolerances.contains_key(&name) {
                    return Err(Error::Config(format!("unknown tolerance name `{name}`")));
                }
                tolerances.insert(name, value);
            }
            TolArg::All(value) => all_override = Some(value),
        }
    }
    if let Some(v) = all_override {
        for value in tolerances.values_mut() {
            *value = v;
        }
    }
    let format = match format_flag.or(file.format) {
        Some(s) => OutputFormat::parse(&s)?,
        None => OutputFormat::Json,
    };
    let samples = samples_flag.or(file.samples).unwrap_or(DEFAULT_SAMPLES);
    if samples == 0 {
        return Err(Error::Config("samples must be positive".into()));
    }
    Ok(RunConfig {
        command,
        lie_type,
        rank,
        provider,
        rescaling_vector,
        seed: seed_flag.or(file.seed).unwrap_or(DEFAULT_SEED),
        samples,
        tolerances,
        format,
        output: output_flag.or(file.output),
    })
}
