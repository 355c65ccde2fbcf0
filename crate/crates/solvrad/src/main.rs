//! Thin command-line front-end over the library: `analyze`, `local`,
//! `verify`. Exit codes: 0 ok, 2 parse error, 3 numeric failure, 4 cap
//! exceeded, 5 verification failure.

use clap::{Args, Parser, Subcommand};
use solvrad::config::Precision;
use solvrad::error::{Error, Result};
use solvrad::monodromy::SliceLine;
use solvrad::num::Cx64;
use solvrad::report::{self, AnalyzeOptions};
use solvrad::Settings;
use std::io::Read;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "solvrad",
    about = "Monodromy groups of algebraic functions: solvability by radicals, explicit radical towers, unsolvability certificates",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full analysis: branch points, monodromy group, solvability, and a
    /// verified radical tower or an unsolvability certificate.
    Analyze {
        /// Equation text, e.g. "y^2 - x"; read from stdin when absent or "-".
        equation: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Local monodromy in a small ball around a point: group, solvability,
    /// and the ramified germs (orbits).
    Local {
        /// Equation text; stdin when absent or "-".
        equation: Option<String>,
        /// The point, comma-separated complex components: "0,0" or "1+2i,0".
        #[arg(long)]
        point: String,
        /// Ball radius.
        #[arg(long, default_value_t = 0.5)]
        radius: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Re-evaluate a serialized radical expression (an analyze report or a
    /// bare expression block) against freshly tracked roots on a new grid.
    Verify {
        /// Equation text; stdin when absent or "-".
        equation: Option<String>,
        /// Path to the expression file.
        #[arg(long)]
        expr: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, env = "SOLVRAD_SEED", default_value_t = 0)]
    seed: u64,
    /// Working precision in mantissa bits: 53 runs IEEE doubles, anything
    /// higher runs double-double (~106 bits).
    #[arg(long = "precision-bits", env = "SOLVRAD_PRECISION_BITS", default_value_t = 53)]
    precision_bits: u32,
    /// Cap on numerator+denominator degree in rational reconstruction.
    #[arg(long = "degree-cap", env = "SOLVRAD_DEGREE_CAP", default_value_t = 24)]
    degree_cap: usize,
    /// Cap on group enumeration.
    #[arg(long = "group-cap", env = "SOLVRAD_GROUP_CAP", default_value_t = 1_000_000)]
    group_cap: usize,
    /// Grid sample count (0 = automatic from the degree cap).
    #[arg(long, env = "SOLVRAD_SAMPLES", default_value_t = 0)]
    samples: usize,
    /// Slice line "o1,o2;d1,d2" with exact rational components.
    #[arg(long, env = "SOLVRAD_SLICE")]
    slice: Option<String>,
    /// Emit the JSON report on stdout.
    #[arg(long)]
    json: bool,
    /// Cache directory for branch points and generator permutations.
    #[arg(long = "cache-dir", env = "SOLVRAD_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Omit timings so reports are byte-identical across runs.
    #[arg(long = "no-timings")]
    no_timings: bool,
}

impl Common {
    fn to_options(&self) -> Result<AnalyzeOptions> {
        let mut settings = Settings::default();
        settings.seed = self.seed;
        settings.precision = Precision::from_bits(self.precision_bits);
        settings.degree_cap = self.degree_cap;
        settings.group_cap = self.group_cap;
        settings.samples = self.samples;
        let slice = match &self.slice {
            Some(s) => Some(SliceLine::parse_flag(s)?),
            None => None,
        };
        Ok(AnalyzeOptions {
            settings,
            slice,
            cache_dir: self.cache_dir.clone(),
            no_timings: self.no_timings,
        })
    }
}

fn read_equation(arg: Option<String>) -> Result<String> {
    match arg {
        Some(s) if s != "-" => Ok(s),
        _ => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            let trimmed = buf.trim().to_string();
            if trimmed.is_empty() {
                return Err(Error::BadInput("empty equation on stdin".into()));
            }
            Ok(trimmed)
        }
    }
}

/// Comma-separated complex components: "0,0", "1+2i,-0.5".
fn parse_point(s: &str) -> Result<Vec<Cx64>> {
    s.split(',')
        .map(|part| parse_complex_f64(part.trim()))
        .collect()
}

fn parse_complex_f64(s: &str) -> Result<Cx64> {
    let bad = || Error::BadInput(format!("bad complex literal `{s}`"));
    if s.is_empty() {
        return Err(bad());
    }
    // split into one or two signed terms
    let bytes = s.as_bytes();
    let mut split = None;
    for (k, &b) in bytes.iter().enumerate().skip(1) {
        if (b == b'+' || b == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = Some(k);
        }
    }
    let (first, second) = match split {
        Some(k) => (&s[..k], Some(&s[k..])),
        None => (s, None),
    };
    let mut re = 0.0;
    let mut im = 0.0;
    for part in std::iter::once(first).chain(second) {
        if let Some(body) = part.strip_suffix(['i', 'I']) {
            let body = body.strip_suffix('*').unwrap_or(body);
            let v = match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                b => b.parse::<f64>().map_err(|_| bad())?,
            };
            im += v;
        } else {
            re += part.parse::<f64>().map_err(|_| bad())?;
        }
    }
    Ok(Cx64::new(re, im))
}

fn run() -> Result<(String, String)> {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Analyze { equation, common } => {
            let opts = common.to_options()?;
            let eq = read_equation(equation)?;
            let rpt = report::analyze(&eq, &opts)?;
            Ok(if common.json {
                (rpt.to_json_string(), String::new())
            } else {
                (rpt.render_human(), String::new())
            })
        }
        Cmd::Local {
            equation,
            point,
            radius,
            common,
        } => {
            let opts = common.to_options()?;
            let eq = read_equation(equation)?;
            let pt = parse_point(&point)?;
            let rpt = report::local(&eq, &pt, radius, &opts)?;
            Ok(if common.json {
                (rpt.to_json_string(), String::new())
            } else {
                (rpt.render_human(), String::new())
            })
        }
        Cmd::Verify {
            equation,
            expr,
            common,
        } => {
            let opts = common.to_options()?;
            let eq = read_equation(equation)?;
            let text = std::fs::read_to_string(&expr)?;
            let rpt = report::verify(&text, &eq, &opts)?;
            Ok(if common.json {
                (rpt.to_json_string(), String::new())
            } else {
                (
                    format!(
                        "verified: max residual {:.3e} over {} points (tolerance {:.1e})\n",
                        rpt.max_residual, rpt.samples_checked, rpt.tolerance
                    ),
                    String::new(),
                )
            })
        }
    }
}

fn main() {
    // a second parse just to know whether --json was requested, so errors
    // can come out machine-readable too
    let wants_json = std::env::args().any(|a| a == "--json");
    match run() {
        Ok((out, _)) => {
            print!("{out}");
        }
        Err(e) => {
            if wants_json {
                println!("{}", report::error_json(&e));
            }
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
