//! Argument and config-file handling for the `diamond-min` binary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::{
    sweep, threshold_boundary, Axis, AxisRange, Observable, Plane, SweepSpec, DEFAULT_EPSILON,
};
use crate::error::Error;
use crate::min::min_xstate;
use crate::model::{block_spectrum, IsingPair, ModelParams};
use crate::output::{params_record, Format, Table};
use crate::presets::run_figure;
use crate::selftest::{render_report, run_selftest, SelftestOptions, DEFAULT_SEED};
use crate::transfer::thermal_state;

pub const DEFAULT_SWEEP_STEPS: usize = 101;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Usage(#[from] clap::Error),
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Debug, Parser)]
#[command(
    name = "diamond-min",
    version,
    about = "Thermal MIN of the Ising-XXZ diamond chain with DM interaction"
)]
#[command(allow_negative_numbers = true)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: CommandArgs,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    #[arg(long = "J", global = true, allow_negative_numbers = true)]
    j: Option<f64>,
    #[arg(long = "J1", global = true, allow_negative_numbers = true)]
    j1: Option<f64>,
    #[arg(long = "delta", global = true, allow_negative_numbers = true)]
    delta: Option<f64>,
    #[arg(long = "D", global = true, allow_negative_numbers = true)]
    d: Option<f64>,
    #[arg(long = "h", global = true, allow_negative_numbers = true)]
    h: Option<f64>,
    #[arg(long = "T", global = true, allow_negative_numbers = true)]
    t: Option<f64>,
    /// Flat `key = value` file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (standard output when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// csv or jsonl.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Grid resolution for sweeps and presets.
    #[arg(long, global = true)]
    steps: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum CommandArgs {
    /// Block eigenvalues for every Ising pair.
    Spectrum,
    /// Reduced density matrix of one diamond.
    State,
    /// N1 and N2 of the thermal state.
    Min,
    /// Evaluate an observable on a 1D or 2D grid.
    Sweep {
        /// NAME:MIN:MAX[:STEPS], given once or twice.
        #[arg(long = "axis", allow_hyphen_values = true)]
        axes: Vec<String>,
        /// N1, N2, dN1_dDelta or rhoIJ.
        #[arg(long)]
        observable: Option<String>,
    },
    /// Trace where N1 crosses epsilon.
    Boundary {
        /// Scan axis, NAME:MIN:MAX[:STEPS].
        #[arg(long, allow_hyphen_values = true)]
        scan: Option<String>,
        /// Search axis, NAME:MIN:MAX[:STEPS].
        #[arg(long, allow_hyphen_values = true)]
        along: Option<String>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Run a named preset.
    Figure { preset: String },
    /// Cross-check closed forms against their oracles.
    Selftest,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Spectrum,
    State,
    Min,
    Sweep {
        axes: Vec<AxisRange>,
        observable: Observable,
    },
    Boundary {
        plane: Plane,
        epsilon: f64,
    },
    Figure {
        preset: String,
    },
    Selftest,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: ModelParams,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub steps: Option<usize>,
    pub seed: u64,
}

const CONFIG_KEYS: [&str; 14] = [
    "J",
    "J1",
    "delta",
    "D",
    "h",
    "T",
    "out",
    "format",
    "steps",
    "seed",
    "observable",
    "epsilon",
    "scan",
    "along",
];

/// Reads a flat `key = value` file. `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("config line {}: expected key = value", lineno + 1))
        })?;
        let key = key.trim();
        if !CONFIG_KEYS.contains(&key) {
            return Err(CliError::Config(format!("unknown config key '{key}'")));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn number<T: std::str::FromStr>(
    file: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, CliError> {
    file.get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|_| CliError::Config(format!("malformed number for '{key}': '{v}'")))
        })
        .transpose()
}

/// `NAME:MIN:MAX[:STEPS]`.
pub fn parse_axis(spec: &str, default_steps: usize) -> Result<AxisRange, CliError> {
    let parts: Vec<&str> = spec.split(':').collect();
    if !(3..=4).contains(&parts.len()) {
        return Err(CliError::Config(format!(
            "axis '{spec}' must look like NAME:MIN:MAX[:STEPS]"
        )));
    }
    let axis: Axis = parts[0].parse().map_err(CliError::Config)?;
    let bound = |s: &str, what: &str| {
        s.parse::<f64>().map_err(|_| {
            CliError::Config(format!("malformed number for axis {axis} {what}: '{s}'"))
        })
    };
    let min = bound(parts[1], "min")?;
    let max = bound(parts[2], "max")?;
    let steps = match parts.get(3) {
        Some(s) => s.parse::<usize>().map_err(|_| {
            CliError::Config(format!("malformed number for axis {axis} steps: '{s}'"))
        })?,
        None => default_steps,
    };
    let range = AxisRange::new(axis, min, max, steps);
    range.validate()?;
    Ok(range)
}

fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_text(&text)
}

/// Builds a [`RunConfig`] from `argv` (program name first). Precedence is
/// flags, then config file, then defaults.
pub fn parse_config<I, S>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let g = &cli.global;
    let file = match &g.config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };

    let defaults = ModelParams::default();
    let pick = |flag: Option<f64>, key: &str, default: f64| -> Result<f64, CliError> {
        Ok(flag.or(number::<f64>(&file, key)?).unwrap_or(default))
    };
    let params = ModelParams::new(
        pick(g.j, "J", defaults.j)?,
        pick(g.j1, "J1", defaults.j1)?,
        pick(g.delta, "delta", defaults.delta)?,
        pick(g.d, "D", defaults.d)?,
        pick(g.h, "h", defaults.h)?,
        pick(g.t, "T", defaults.t)?,
    );
    params.validate_thermal()?;

    let format = match g.format.clone().or_else(|| file.get("format").cloned()) {
        Some(f) => f.parse::<Format>().map_err(CliError::Config)?,
        None => Format::Csv,
    };
    let output = g.out.clone().or_else(|| file.get("out").map(PathBuf::from));
    let steps = g.steps.or(number::<usize>(&file, "steps")?);
    let seed = g
        .seed
        .or(number::<u64>(&file, "seed")?)
        .unwrap_or(DEFAULT_SEED);
    let default_steps = steps.unwrap_or(DEFAULT_SWEEP_STEPS);

    let command = match cli.command {
        CommandArgs::Spectrum => Command::Spectrum,
        CommandArgs::State => Command::State,
        CommandArgs::Min => Command::Min,
        CommandArgs::Selftest => Command::Selftest,
        CommandArgs::Figure { preset } => Command::Figure { preset },
        CommandArgs::Sweep { axes, observable } => {
            if axes.is_empty() {
                return Err(CliError::Config(
                    "missing required axis: --axis NAME:MIN:MAX[:STEPS]".into(),
                ));
            }
            if axes.len() > 2 {
                return Err(CliError::Config(format!(
                    "--axis given {} times, at most 2 allowed",
                    axes.len()
                )));
            }
            let axes = axes
                .iter()
                .map(|a| parse_axis(a, default_steps))
                .collect::<Result<Vec<_>, _>>()?;
            let observable = match observable.or_else(|| file.get("observable").cloned()) {
                Some(o) => o.parse().map_err(CliError::Config)?,
                None => Observable::N1,
            };
            Command::Sweep { axes, observable }
        }
        CommandArgs::Boundary {
            scan,
            along,
            epsilon,
        } => {
            let axis = |flag: Option<String>, key: &str| -> Result<AxisRange, CliError> {
                let spec = flag.or_else(|| file.get(key).cloned()).ok_or_else(|| {
                    CliError::Config(format!(
                        "missing required axis: --{key} NAME:MIN:MAX[:STEPS]"
                    ))
                })?;
                parse_axis(&spec, default_steps)
            };
            let plane = Plane {
                scan: axis(scan, "scan")?,
                along: axis(along, "along")?,
            };
            let epsilon = epsilon
                .or(number::<f64>(&file, "epsilon")?)
                .unwrap_or(DEFAULT_EPSILON);
            Command::Boundary { plane, epsilon }
        }
    };

    Ok(RunConfig {
        command,
        params,
        output,
        format,
        steps,
        seed,
    })
}

/// Text to emit and whether the run counts as a success.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub success: bool,
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let table = match &cfg.command {
        Command::Selftest => {
            let reports = run_selftest(&SelftestOptions::from_env(cfg.seed));
            let success = reports.iter().all(|r| r.passed());
            let mut text = format!("seed: {}\n", cfg.seed);
            let _ = write!(text, "{}", render_report(&reports));
            return Ok(Outcome { text, success });
        }
        Command::Spectrum => spectrum_table(&cfg.params),
        Command::State => state_table(&cfg.params)?,
        Command::Min => {
            let state = thermal_state(&cfg.params)?;
            let m = min_xstate(&state);
            let mut t = Table::new(&["N1", "N2", "marginal_degenerate"])
                .with_meta("params", params_record(&cfg.params));
            t.push(vec![
                m.n1,
                m.n2,
                f64::from(u8::from(m.maximizer_degenerate)),
            ]);
            t
        }
        Command::Sweep { axes, observable } => {
            let spec = SweepSpec {
                axes: axes.clone(),
                fixed: cfg.params,
                observable: *observable,
            };
            let mut t = Table::from(&sweep(&spec)?);
            if axes.len() == 2 {
                t.meta
                    .push(("layout".into(), "row-major, last axis fastest".into()));
            }
            t
        }
        Command::Boundary { plane, epsilon } => {
            Table::from(&threshold_boundary(*plane, &cfg.params, *epsilon)?)
        }
        Command::Figure { preset } => run_figure(preset, cfg.steps)?,
    };
    Ok(Outcome {
        text: table.render(cfg.format),
        success: true,
    })
}

fn spectrum_table(p: &ModelParams) -> Table {
    let mut t = Table::new(&["mu_i", "mu_ip1", "lambda1", "lambda2", "lambda3", "lambda4"])
        .with_meta("params", params_record(p));
    for pair in IsingPair::ALL {
        let s = block_spectrum(p, pair);
        let mut row = vec![pair.mu_i.value(), pair.mu_ip1.value()];
        row.extend(s.lambdas);
        t.push(row);
    }
    t
}

fn state_table(p: &ModelParams) -> Result<Table, CliError> {
    let state = thermal_state(p)?;
    let mut t = Table::new(&["row", "col", "re", "im"]).with_meta("params", params_record(p));
    for i in 0..4 {
        for j in 0..4 {
            let z = state.matrix()[(i, j)];
            t.push(vec![(i + 1) as f64, (j + 1) as f64, z.re, z.im]);
        }
    }
    Ok(t)
}
