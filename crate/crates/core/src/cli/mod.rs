//! Command-line front end.
//!
//! ```text
//! kfib-verify [--k-min K] [--k-max K] [--precision D] [--jobs J]
//!             [--cache-dir DIR] [--out FILE] [--format json|csv|both] [--fresh]
//!             <bounds | reduce | search | properties | all | run --campaign NAME>
//! ```
//!
//! Exit codes: 0 verified, 1 an assertion failed, 2 configuration or
//! resource error.

pub mod cache;
pub mod checkpoint;
pub mod config;
pub mod report;
pub mod run;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::algebraic::{CAP_DIGITS, START_DIGITS};
use crate::error::{Error, Result};
use cache::write_atomic;
use config::{parse_campaigns, CampaignConfig, Format};
pub use run::{run, RunOutput};

pub const EXIT_VERIFIED: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "kfib-verify", version, about = "Certified verification of F_n^(k) + F_m^(k) = 2^a")]
struct Cli {
    #[arg(long, global = true, default_value_t = 2)]
    k_min: u32,
    #[arg(long, global = true, default_value_t = config::EQ_K.1)]
    k_max: u32,
    /// Starting precision in decimal digits.
    #[arg(long, global = true, default_value_t = START_DIGITS)]
    precision: u32,
    /// Largest precision escalation may reach.
    #[arg(long, global = true, default_value_t = CAP_DIGITS)]
    precision_cap: u32,
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Digit cache and checkpoints live here; no resume without it.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Report path; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value = "json")]
    format: Format,
    /// Ignore existing checkpoints.
    #[arg(long, global = true)]
    fresh: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Constant chain and the bound on n for every k.
    Bounds,
    /// All three reduction campaigns.
    Reduce,
    /// Both exhaustive searches.
    Search,
    /// Identity and property suites.
    Properties,
    /// Everything, in dependency order.
    All,
    /// One campaign or group by name.
    Run {
        #[arg(long)]
        campaign: String,
    },
}

impl Cli {
    fn into_config(self) -> Result<CampaignConfig> {
        let name = match &self.command {
            Command::Bounds => "bounds",
            Command::Reduce => "reduce",
            Command::Search => "search",
            Command::Properties => "properties",
            Command::All => "all",
            Command::Run { campaign } => campaign.as_str(),
        };
        let mut c = CampaignConfig {
            k_min: self.k_min,
            k_max: self.k_max,
            start_digits: self.precision,
            cap_digits: self.precision_cap,
            jobs: self.jobs,
            campaigns: parse_campaigns(name)?,
            cache_dir: self.cache_dir,
            out: self.out,
            format: self.format,
            fresh: self.fresh,
        };
        c.validate()?;
        Ok(c)
    }
}

/// Exit code for an error that stopped a run.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Certification(_) | Error::NoPositiveEpsilon { .. } => EXIT_ASSERTION,
        _ => EXIT_CONFIG,
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes the report and, next to a file report, the runtime sidecar.
pub fn write_outputs(config: &CampaignConfig, out: &RunOutput) -> Result<()> {
    let json = out.report.to_json();
    let csv = out.report.to_csv();
    match &config.out {
        Some(path) => {
            match config.format {
                Format::Json => write_atomic(path, json.as_bytes())?,
                Format::Csv => write_atomic(path, csv.as_bytes())?,
                Format::Both => {
                    write_atomic(path, json.as_bytes())?;
                    write_atomic(&with_suffix(path, ".csv"), csv.as_bytes())?;
                }
            }
            let timings: serde_json::Map<String, serde_json::Value> =
                out.timings.iter().map(|(k, v)| (k.clone(), serde_json::json!(v))).collect();
            let t = serde_json::to_string_pretty(&timings)? + "\n";
            write_atomic(&with_suffix(path, ".timing.json"), t.as_bytes())?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            if config.format != Format::Csv {
                stdout.write_all(json.as_bytes())?;
            }
            if config.format != Format::Json {
                stdout.write_all(csv.as_bytes())?;
            }
            stdout.flush()?;
        }
    }
    Ok(())
}

/// Parses `args` (program name first), runs, writes outputs and returns the
/// process exit code.
pub fn main_with<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_VERIFIED };
        }
    };
    let config = match cli.into_config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let out = match run(&config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    if let Err(e) = write_outputs(&config, &out) {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }
    for a in &out.report.assertions {
        eprintln!("{} {}: {}", if a.passed { "ok  " } else { "FAIL" }, a.name, a.detail);
    }
    if out.report.verified {
        EXIT_VERIFIED
    } else {
        EXIT_ASSERTION
    }
}
