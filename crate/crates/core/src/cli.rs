//! The `lckw` command line: `verify`, `integrate`, `list-checks`, `selftest`.
//!
//! Settings merge as defaults, then the `--config` file, then flags. Exit codes:
//! 0 when everything passes, 1 when a check fails, 2 on configuration or
//! structural errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::anchors::{closed_form_anchors, convention_anchors, Anchor};
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::models::{ModelDescriptor, ModelKind};
use crate::quadrature::{integrate_many, judge, QuadratureGrid, Quantity};
use crate::report::{render_integrals, render_suite, Format, IntegralRecord, IntegralReport};
use crate::suite::{run_suite, SuiteOptions, REGISTRY};

#[derive(Debug, Parser)]
#[command(name = "lckw", version, about = "Numerical checks of locally conformally Kähler identities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the pointwise identity suite on sampled points.
    Verify(RunArgs),
    /// Integrate scalar quantities over the fundamental domain.
    Integrate(IntegrateArgs),
    /// List every registered check with its formula.
    ListChecks,
    /// Check the sign and normalization conventions against hand values.
    Selftest,
}

/// Flags shared by `verify` and `integrate`. Unset flags fall back to the
/// config file, then to the defaults.
#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// key = value file with any of the settings below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// flat, hopf or hopf-deformed.
    #[arg(long)]
    pub model: Option<String>,
    /// Complex dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Dilation factor of the Hopf quotient.
    #[arg(long)]
    pub a: Option<f64>,
    /// Amplitude of the radial profile of the deformation.
    #[arg(long)]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// ad or fd.
    #[arg(long)]
    pub engine: Option<String>,
    /// json, csv or text.
    #[arg(long)]
    pub format: Option<String>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key = value file mapping check ids to absolute tolerances.
    #[arg(long)]
    pub tol_overrides: Option<PathBuf>,
}

#[derive(Debug, Default, Args)]
pub struct IntegrateArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Radial nodes.
    #[arg(long)]
    pub grid_r: Option<usize>,
    /// Nodes per angle.
    #[arg(long)]
    pub grid_ang: Option<usize>,
    /// Quantity to integrate; repeatable, all quantities when absent.
    #[arg(long)]
    pub quantity: Vec<String>,
}

/// Fully resolved settings of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub model: ModelDescriptor,
    pub samples: usize,
    pub seed: u64,
    pub engine: Engine,
    pub tolerance_overrides: BTreeMap<String, f64>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub grid_r: usize,
    pub grid_ang: usize,
    pub quantities: Vec<Quantity>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let suite = SuiteOptions::default();
        Self {
            model: ModelDescriptor::default(),
            samples: suite.samples,
            seed: suite.seed,
            engine: Engine::AutoDiff,
            tolerance_overrides: BTreeMap::new(),
            out: None,
            format: Format::Text,
            grid_r: 64,
            grid_ang: 16,
            quantities: Quantity::ALL.to_vec(),
        }
    }
}

fn parse_engine(s: &str) -> Result<Engine> {
    match s {
        "ad" => Ok(Engine::AutoDiff),
        "fd" => Ok(Engine::finite_difference()),
        _ => Err(Error::Config(format!("unknown engine `{s}` (expected ad or fd)"))),
    }
}

fn parse_number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("`{key}`: cannot parse `{value}`")))
}

/// Lines of `key = value`; `#` starts a comment.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value, found `{line}`", k + 1)))?;
        out.push((key.trim().replace('_', "-"), value.trim().to_string()));
    }
    Ok(out)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// Check id to absolute tolerance.
pub fn parse_tolerance_overrides(text: &str) -> Result<BTreeMap<String, f64>> {
    parse_key_values(text)?
        .into_iter()
        .map(|(id, v)| {
            let tol: f64 = parse_number(&id, &v)?;
            if !(tol >= 0.0) {
                return Err(Error::Config(format!("`{id}`: tolerance must be non-negative")));
            }
            // ids keep their underscores
            Ok((id.replace('-', "_"), tol))
        })
        .collect()
}

impl RunConfig {
    /// Applies one setting by name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "model" => self.model.name = value.parse::<ModelKind>()?,
            "n" => self.model.n = parse_number(key, value)?,
            "a" => self.model.a = parse_number(key, value)?,
            "amplitude" => self.model.amplitude = parse_number(key, value)?,
            "samples" => self.samples = parse_number(key, value)?,
            "seed" => self.seed = parse_number(key, value)?,
            "engine" => self.engine = parse_engine(value)?,
            "format" => self.format = value.parse()?,
            "out" => self.out = Some(PathBuf::from(value)),
            "tol-overrides" => self.tolerance_overrides = parse_tolerance_overrides(&read(Path::new(value))?)?,
            "grid-r" => self.grid_r = parse_number(key, value)?,
            "grid-ang" => self.grid_ang = parse_number(key, value)?,
            "quantity" => {
                self.quantities = value
                    .split(',')
                    .map(|q| q.trim().parse())
                    .collect::<Result<_>>()?
            }
            _ => return Err(Error::Config(format!("unknown setting `{key}`"))),
        }
        Ok(())
    }

    /// Settings from a config file's text.
    pub fn from_config_text(text: &str) -> Result<Self> {
        let mut config = Self::default();
        for (key, value) in parse_key_values(text)? {
            config.set(&key, &value)?;
        }
        Ok(config)
    }

    /// Defaults, then the file named by `--config`, then the flags.
    pub fn resolve(args: &RunArgs) -> Result<Self> {
        let mut config = match &args.config {
            Some(path) => Self::from_config_text(&read(path)?)?,
            None => Self::default(),
        };
        let flags: [(&str, Option<String>); 10] = [
            ("model", args.model.clone()),
            ("n", args.n.map(|v| v.to_string())),
            ("a", args.a.map(|v| v.to_string())),
            ("amplitude", args.amplitude.map(|v| v.to_string())),
            ("samples", args.samples.map(|v| v.to_string())),
            ("seed", args.seed.map(|v| v.to_string())),
            ("engine", args.engine.clone()),
            ("format", args.format.clone()),
            ("out", args.out.as_ref().map(|p| p.display().to_string())),
            ("tol-overrides", args.tol_overrides.as_ref().map(|p| p.display().to_string())),
        ];
        for (key, value) in flags {
            if let Some(value) = value {
                config.set(key, &value)?;
            }
        }
        if config.samples == 0 {
            return Err(Error::Config("samples must be positive".into()));
        }
        Ok(config)
    }

    fn resolve_integrate(args: &IntegrateArgs) -> Result<Self> {
        let mut config = Self::resolve(&args.run)?;
        if let Some(v) = args.grid_r {
            config.grid_r = v;
        }
        if let Some(v) = args.grid_ang {
            config.grid_ang = v;
        }
        if !args.quantity.is_empty() {
            config.set("quantity", &args.quantity.join(","))?;
        }
        Ok(config)
    }

    pub fn suite_options(&self) -> SuiteOptions {
        SuiteOptions {
            engine: self.engine,
            samples: self.samples,
            seed: self.seed,
            tolerance_overrides: self.tolerance_overrides.clone(),
            only: Vec::new(),
        }
    }
}

/// What a command produced: a report and whether everything passed.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub output: String,
    pub pass: bool,
}

pub fn cmd_verify(config: &RunConfig) -> Result<Outcome> {
    let model = config.model.build(&config.engine)?;
    let report = run_suite(&model, &config.suite_options())?;
    Ok(Outcome {
        output: render_suite(&report, config.format)?,
        pass: report.overall_pass,
    })
}

pub fn cmd_integrate(config: &RunConfig) -> Result<Outcome> {
    let model = config.model.build(&config.engine)?;
    let grid = QuadratureGrid::periodic(config.model.a, config.grid_r, config.grid_ang)?;
    let values = integrate_many(&model, &config.quantities, &grid, &config.engine)?;
    let records = config
        .quantities
        .iter()
        .zip(values)
        .map(|(&q, v)| IntegralRecord::new(q, v, judge(&model, q, v).as_ref()))
        .collect();
    let report = IntegralReport::new(config.model, config.grid_r, config.grid_ang, records);
    Ok(Outcome {
        output: render_integrals(&report, config.format)?,
        pass: report.overall_pass,
    })
}

pub fn cmd_list_checks() -> String {
    let mut out = String::new();
    for c in REGISTRY {
        let order = format!("{:?}", c.order).to_lowercase();
        let _ = writeln!(out, "{:<15} {:<10} {:<40} {}", c.id, order, c.anchor, c.description);
    }
    out
}

fn anchor_line(out: &mut String, a: &Anchor) {
    let _ = writeln!(
        out,
        "  {:<26} {:>22.15e}  expected {:>5}  err {:.1e}  {}",
        a.name,
        a.value,
        a.expected,
        a.error(),
        if a.pass() { "pass" } else { "FAIL" }
    );
}

pub fn cmd_selftest() -> Result<Outcome> {
    let mut out = String::from("conventions\n");
    let conventions = convention_anchors()?;
    conventions.iter().for_each(|a| anchor_line(&mut out, a));
    out.push_str("hopf closed forms at (1, 0, 0, 0)\n");
    let closed = closed_form_anchors(&Engine::AutoDiff)?;
    closed.iter().for_each(|a| anchor_line(&mut out, a));
    let pass = conventions.iter().chain(&closed).all(Anchor::pass);
    let _ = writeln!(out, "overall: {}", if pass { "pass" } else { "FAIL" });
    Ok(Outcome { output: out, pass })
}

fn emit(outcome: &Outcome, path: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    let io = |e: std::io::Error| Error::Config(e.to_string());
    match path {
        Some(path) => std::fs::write(path, &outcome.output).map_err(|e| Error::Config(format!("{}: {e}", path.display()))),
        None => stdout.write_all(outcome.output.as_bytes()).map_err(io),
    }
}

fn execute(command: &Command, stdout: &mut dyn Write) -> Result<bool> {
    let (outcome, path) = match command {
        Command::Verify(args) => {
            let config = RunConfig::resolve(args)?;
            (cmd_verify(&config)?, config.out)
        }
        Command::Integrate(args) => {
            let config = RunConfig::resolve_integrate(args)?;
            (cmd_integrate(&config)?, config.out)
        }
        Command::ListChecks => (
            Outcome {
                output: cmd_list_checks(),
                pass: true,
            },
            None,
        ),
        Command::Selftest => (cmd_selftest()?, None),
    };
    emit(&outcome, path.as_deref(), stdout)?;
    Ok(outcome.pass)
}

/// Parses `args` (program name first), runs the command and returns the exit
/// code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(&cli.command, stdout) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            2
        }
    }
}

pub fn main() -> ExitCode {
    let code = run(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock());
    ExitCode::from(code)
}
