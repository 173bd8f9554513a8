//! Deterministic command-line front end: orchestrates the construction and
//! check pipelines and emits versioned JSON (or text) reports.
//!
//! Exit codes: 0 when every hard check passes, 1 when any check fails or
//! cannot be decided, 2 on usage or configuration errors.

mod commands;
mod config;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use frobenius_forge::report::{fmt_f64, CheckReport, Verdict};
use frobenius_forge::{Error, Result};
use serde::Serialize;

use config::OutputFormat;

#[derive(Parser)]
#[command(
    name = "frobenius-forge",
    version,
    about = "Exact Frobenius structures of simple singularities, the open Toda chain prepotential, and tolerance-controlled geometry checks",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON config file; command-line flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// RNG seed (default 0xF40B = 62475).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Number of sample points for bulk checks (default 20).
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// Tolerance override: either `name=value` for one check or a bare
    /// value applied to all checks. Repeatable.
    #[arg(long = "tol", global = true, value_name = "NAME=VALUE")]
    tol: Vec<String>,

    /// Write the report to this path instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Output format: json (default) or text.
    #[arg(long, global = true, value_name = "FORMAT")]
    format: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Print the unfolding catalog with gradings and degrees.
    Catalog,
    /// Build the polynomial Frobenius structure of a simple singularity.
    Build {
        /// Singularity family: A (D and E are catalogued but not built).
        #[arg(long = "type", value_name = "FAMILY")]
        lie_type: String,
        /// Rank n of the family.
        #[arg(long)]
        rank: usize,
    },
    /// Run the chain model suite at a given rank.
    Toda {
        /// Number of chain particles n.
        #[arg(long)]
        rank: usize,
    },
    /// Almost-duality and spectral residue tensor study.
    Duality {
        /// Singularity family (default A).
        #[arg(long = "type", value_name = "FAMILY", default_value = "A")]
        lie_type: String,
        /// Rank n of the family.
        #[arg(long)]
        rank: usize,
    },
    /// Generic prepotential-geometry checks over a provider.
    EskCheck {
        /// Prepotential provider: toda or saito.
        #[arg(long, value_name = "PROVIDER")]
        provider: String,
        /// Rank / number of coordinates of the provider.
        #[arg(long)]
        rank: usize,
        /// Rescaling vector: euler, unit, or custom:re,im;re,im;..
        #[arg(long = "V", value_name = "CHOICE", default_value = "euler")]
        v: String,
    },
}

/// The versioned report envelope; identical configuration produces
/// byte-identical output.
#[derive(Serialize)]
struct RunDocument {
    schema: u32,
    tool: &'static str,
    version: &'static str,
    command: String,
    config: ConfigEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    payload: Option<serde_json::Value>,
    reports: Vec<CheckReport>,
}

#[derive(Serialize)]
struct ConfigEcho {
    seed: u64,
    samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    lie_type: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rank: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    provider: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rescaling_vector: Option<String>,
    format: &'static str,
    tolerances: BTreeMap<String, String>,
}

fn main() {
    init_thread_cap();
    let cli = Cli::parse();
    let code = match execute(cli) {
        Ok(all_pass) => {
            if all_pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::UnsupportedFamily(_) => 2,
                _ => 1,
            }
        }
    };
    std::process::exit(code);
}

/// Cap the worker pool from FROBENIUS_FORGE_THREADS when set.
fn init_thread_cap() {
    if let Ok(raw) = std::env::var("FROBENIUS_FORGE_THREADS") {
        if let Ok(n) = raw.trim().parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

fn execute(cli: Cli) -> Result<bool> {
    let file_cfg = match &cli.config {
        Some(path) => Some(config::load_file_config(path)?),
        None => None,
    };
    let (command, lie_type, rank, provider, v_choice) = match &cli.command {
        Command::Catalog => ("catalog", None, None, None, None),
        Command::Build { lie_type, rank } => {
            ("build", Some(lie_type.clone()), Some(*rank), None, None)
        }
        Command::Toda { rank } => ("toda", None, Some(*rank), None, None),
        Command::Duality { lie_type, rank } => {
            ("duality", Some(lie_type.clone()), Some(*rank), None, None)
        }
        Command::EskCheck { provider, rank, v } => (
            "esk-check",
            None,
            Some(*rank),
            Some(provider.clone()),
            Some(v.clone()),
        ),
    };
    let cfg = config::resolve(
        command.to_string(),
        lie_type,
        rank,
        provider,
        v_choice,
        file_cfg,
        cli.seed,
        cli.samples,
        &cli.tol,
        cli.format,
        cli.output,
    )?;

    let out = match &cli.command {
        Command::Catalog => commands::run_catalog(&cfg)?,
        Command::Build { lie_type, rank } => commands::run_build(&cfg, lie_type, *rank)?,
        Command::Toda { rank } => commands::run_toda(&cfg, *rank)?,
        Command::Duality { lie_type, rank } => commands::run_duality(&cfg, lie_type, *rank)?,
        Command::EskCheck { provider, rank, v } => {
            commands::run_esk_check(&cfg, provider, *rank, v)?
        }
    };
    let all_pass = out.all_pass();

    let doc = RunDocument {
        schema: 1,
        tool: "frobenius-forge",
        version: env!("CARGO_PKG_VERSION"),
        command: cfg.command.clone(),
        config: ConfigEcho {
            seed: cfg.seed,
            samples: cfg.samples,
            lie_type: cfg.lie_type.clone(),
            rank: cfg.rank,
            provider: cfg.provider.clone(),
            rescaling_vector: cfg.rescaling_vector.clone(),
            format: cfg.format.as_str(),
            tolerances: cfg
                .tolerances
                .iter()
                .map(|(k, v)| (k.clone(), fmt_f64(*v)))
                .collect(),
        },
        payload: out.payload,
        reports: out.reports,
    };

    let rendered = match cfg.format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&doc)
                .map_err(|e| Error::PipelineBug(format!("report serialization: {e}")))?;
            s.push('\n');
            s
        }
        OutputFormat::Text => render_text(&doc),
    };
    match &cfg.output {
        Some(path) => std::fs::write(path, rendered.as_bytes())
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(rendered.as_bytes())
                .map_err(|e| Error::PipelineBug(format!("stdout: {e}")))?;
        }
    }
    Ok(all_pass)
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "FAIL",
        Verdict::Degenerate => "degenerate",
        Verdict::Info => "info",
    }
}

fn render_text(doc: &RunDocument) -> String {
    let mut s = format!(
        "{} {} — {} (schema {})\n",
        doc.tool, doc.version, doc.command, doc.schema
    );
    s.push_str(&format!(
        "seed {}  samples {}\n",
        doc.config.seed, doc.config.samples
    ));
    for r in &doc.reports {
        s.push_str(&format!("[{}] {}", verdict_str(r.verdict), r.name));
        if let Some(res) = r.max_residual {
            s.push_str(&format!("  residual {}", fmt_f64(res)));
        }
        if let Some(tol) = r.tolerance {
            s.push_str(&format!("  tolerance {}", fmt_f64(tol)));
        }
        if r.samples > 0 {
            s.push_str(&format!("  samples {}", r.samples));
        }
        for key in [
            "route",
            "reason",
            "constant-re",
            "constant-im",
            "positive-fraction",
        ] {
            if let Some(v) = r.metadata.get(key) {
                s.push_str(&format!("  {key}={v}"));
            }
        }
        s.push('\n');
    }
    if let Some(payload) = &doc.payload {
        s.push_str(&serde_json::to_string_pretty(payload).unwrap_or_default());
        s.push('\n');
    }
    s
}
