//! Job descriptions, from flags or from a JSON config.

use clap::{Args, Parser, Subcommand, ValueEnum};
use oscres_core::StatisticsKind;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Stat {
    Bose,
    Fermi,
}

impl From<Stat> for StatisticsKind {
    fn from(s: Stat) -> Self {
        match s {
            Stat::Bose => StatisticsKind::Bose,
            Stat::Fermi => StatisticsKind::Fermi,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSpec {
    /// `None` writes to stdout.
    pub path: Option<String>,
    pub format: Format,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumParams {
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 10)]
    pub qmax: usize,
    /// Half-width of the band around `ω_eff = 0` reported as boundary.
    #[arg(long, default_value_t = 0.0)]
    pub epsilon: f64,
}

impl Default for SpectrumParams {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            omega: 1.0,
            mu: 0.0,
            qmax: 10,
            epsilon: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GasParamsArgs {
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Box length `L`; conflicts with `--translational-unit`.
    #[arg(long)]
    pub box_length: Option<f64>,
    /// `4π²ℏ²/(2mL²)`; defaults to 1 when no box length is given.
    #[arg(long)]
    pub translational_unit: Option<f64>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 3)]
    pub kmax: i64,
    #[arg(long, default_value_t = 5)]
    pub qmax: usize,
}

impl Default for GasParamsArgs {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            omega: 1.0,
            box_length: None,
            translational_unit: None,
            mu: 0.0,
            kmax: 3,
            qmax: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChainParamsArgs {
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 4)]
    pub count: usize,
    #[arg(long, default_value_t = 0.25)]
    pub coupling: f64,
    /// Level of each oscillator, comma separated; empty puts all at 0.
    #[arg(long, value_delimiter = ',')]
    pub levels: Vec<usize>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub mu: f64,
}

impl Default for ChainParamsArgs {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            omega: 1.0,
            count: 4,
            coupling: 0.25,
            levels: Vec::new(),
            mu: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StatsParams {
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub mu: f64,
    #[arg(long, value_enum, default_value_t = Stat::Fermi)]
    pub stat: Stat,
    #[arg(long, default_value_t = 10)]
    pub qmax: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 1e-14)]
    pub abs_tol: f64,
    #[arg(long, default_value_t = 10_000_000)]
    pub max_terms: usize,
}

impl Default for StatsParams {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            omega: 1.0,
            beta: 1.0,
            mu: 0.0,
            stat: Stat::Fermi,
            qmax: 10,
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_terms: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsParams {
    #[arg(long, value_enum, default_value_t = Stat::Fermi)]
    pub stat: Stat,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub rel_tol: f64,
    #[arg(long, default_value_t = 1e-14)]
    pub abs_tol: f64,
    #[arg(long, default_value_t = 10_000_000)]
    pub max_terms: usize,
}

impl Default for BoundsParams {
    fn default() -> Self {
        Self {
            stat: Stat::Fermi,
            mu: 0.0,
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_terms: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleParams {
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Number of oscillator modes `ℏω(q + ½)`, `q = 0..modes`.
    #[arg(long, default_value_t = 5)]
    pub modes: usize,
    /// Explicit mode energies, comma separated; overrides `--modes`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub energies: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub mu: f64,
    #[arg(long, value_enum, default_value_t = Stat::Fermi)]
    pub stat: Stat,
    /// Largest boson occupation per mode.
    #[arg(long, default_value_t = 60)]
    pub cutoff: u32,
}

impl Default for OracleParams {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            omega: 1.0,
            modes: 5,
            energies: Vec::new(),
            beta: 1.0,
            mu: 0.0,
            stat: Stat::Fermi,
            cutoff: 60,
        }
    }
}

/// A single, non-sweep computation.
#[derive(Debug, Clone, PartialEq, Subcommand)]
pub enum Inner {
    /// Level energies, effective frequencies and accessibility.
    Spectrum(SpectrumParams),
    /// Joint translational and vibrational levels of the gas.
    Gas(GasParamsArgs),
    /// Coupled-chain frequencies and energies.
    Chain(ChainParamsArgs),
    /// Equilibrium occupations and mean particle number.
    Stats(StatsParams),
    /// Numeric series against its analytic bound.
    Bounds(BoundsParams),
    /// Exhaustive enumeration against closed-form statistics.
    Oracle(OracleParams),
}

impl Inner {
    pub fn kind(&self) -> &'static str {
        match self {
            Inner::Spectrum(_) => "spectrum",
            Inner::Gas(_) => "gas",
            Inner::Chain(_) => "chain",
            Inner::Stats(_) => "stats",
            Inner::Bounds(_) => "bounds",
            Inner::Oracle(_) => "oracle",
        }
    }

    pub fn params_value(&self) -> Value {
        let v = match self {
            Inner::Spectrum(p) => serde_json::to_value(p),
            Inner::Gas(p) => serde_json::to_value(p),
            Inner::Chain(p) => serde_json::to_value(p),
            Inner::Stats(p) => serde_json::to_value(p),
            Inner::Bounds(p) => serde_json::to_value(p),
            Inner::Oracle(p) => serde_json::to_value(p),
        };
        v.expect("parameter structs serialize to JSON")
    }

    pub fn from_value(kind: &str, params: Value) -> Result<Self, CliError> {
        let ctx = format!("{kind} params");
        let err = |e| CliError::from_serde(&ctx, e);
        Ok(match kind {
            "spectrum" => Inner::Spectrum(serde_json::from_value(params).map_err(err)?),
            "gas" => Inner::Gas(serde_json::from_value(params).map_err(err)?),
            "chain" => Inner::Chain(serde_json::from_value(params).map_err(err)?),
            "stats" => Inner::Stats(serde_json::from_value(params).map_err(err)?),
            "bounds" => Inner::Bounds(serde_json::from_value(params).map_err(err)?),
            "oracle" => Inner::Oracle(serde_json::from_value(params).map_err(err)?),
            other => {
                return Err(CliError::Usage {
                    key: Some("kind".into()),
                    message: format!("unknown job kind `{other}`"),
                })
            }
        })
    }

    /// Copy with one numeric parameter replaced.
    pub fn with_param(&self, name: &str, value: f64) -> Result<Self, CliError> {
        let mut params = self.params_value();
        let slot = params
            .as_object_mut()
            .and_then(|m| m.get_mut(name))
            .ok_or_else(|| CliError::Usage {
                key: Some(name.to_string()),
                message: format!("`{name}` is not a parameter of {} jobs", self.kind()),
            })?;
        *slot = match slot {
            Value::Number(n) if n.is_f64() => Value::from(value),
            Value::Null => Value::from(value),
            Value::Number(_) => {
                if value.fract() != 0.0 {
                    return Err(CliError::Usage {
                        key: Some(name.to_string()),
                        message: format!("`{name}` takes integers, grid point {value} is not one"),
                    });
                }
                Value::from(value as i64)
            }
            _ => {
                return Err(CliError::Usage {
                    key: Some(name.to_string()),
                    message: format!("`{name}` is not numeric and cannot be swept"),
                })
            }
        };
        Self::from_value(self.kind(), params)
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepArgs {
    /// Name of the numeric parameter to vary.
    #[arg(long)]
    pub param: String,
    #[arg(long, allow_hyphen_values = true)]
    pub from: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub to: f64,
    /// Number of grid points, end points included.
    #[arg(long)]
    pub steps: usize,
}

impl SweepArgs {
    pub fn grid(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.from];
        }
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| self.from + (self.to - self.from) * i as f64 / last)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    Single(Inner),
    Sweep { sweep: SweepArgs, inner: Inner },
}

impl Task {
    pub fn kind(&self) -> &'static str {
        match self {
            Task::Single(inner) => inner.kind(),
            Task::Sweep { .. } => "sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Job {
    pub task: Task,
    pub output: OutputSpec,
}

#[derive(Debug, Parser)]
#[command(
    name = "oscres",
    version,
    about = "Open-system oscillator spectra and statistics"
)]
pub struct Cli {
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    #[command(flatten)]
    Single(Inner),
    /// Repeat a job over a grid of one parameter.
    Sweep {
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(subcommand)]
        inner: Inner,
    },
    /// Run a job described by a JSON config file.
    Run { config: String },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawJob {
    kind: String,
    #[serde(default)]
    params: Value,
    #[serde(default)]
    output: OutputSpec,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    param: String,
    from: f64,
    to: f64,
    steps: usize,
    job: RawInner,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInner {
    kind: String,
    #[serde(default)]
    params: Value,
}

fn empty_object(v: Value) -> Value {
    if v.is_null() {
        Value::Object(Default::default())
    } else {
        v
    }
}

/// Parses a JSON job config.
///
/// ```json
/// {"kind": "spectrum", "params": {"mu": 2.5}, "output": {"format": "csv"}}
/// {"kind": "sweep", "params": {"param": "mu", "from": 0, "to": 3, "steps": 7,
///                              "job": {"kind": "spectrum", "params": {}}}}
/// ```
pub fn parse_config(text: &str) -> Result<Job, CliError> {
    let raw: RawJob = serde_json::from_str(text).map_err(|e| CliError::from_serde("config", e))?;
    let params = empty_object(raw.params);
    let task = if raw.kind == "sweep" {
        let s: RawSweep =
            serde_json::from_value(params).map_err(|e| CliError::from_serde("sweep params", e))?;
        if s.job.kind == "sweep" {
            return Err(CliError::Usage {
                key: Some("kind".into()),
                message: "sweeps cannot be nested".into(),
            });
        }
        let inner = Inner::from_value(&s.job.kind, empty_object(s.job.params))?;
        Task::Sweep {
            sweep: SweepArgs {
                param: s.param,
                from: s.from,
                to: s.to,
                steps: s.steps,
            },
            inner,
        }
    } else {
        Task::Single(Inner::from_value(&raw.kind, params)?)
    };
    let job = Job {
        task,
        output: raw.output,
    };
    check_sweep(&job)?;
    Ok(job)
}

/// Turns parsed flags into a job; `run` reads and parses its config.
pub fn job_from_cli(cli: Cli) -> Result<Job, CliError> {
    let mut job = match cli.command {
        Command::Single(inner) => Job {
            task: Task::Single(inner),
            output: OutputSpec::default(),
        },
        Command::Sweep { sweep, inner } => Job {
            task: Task::Sweep { sweep, inner },
            output: OutputSpec::default(),
        },
        Command::Run { config } => {
            let text = std::fs::read_to_string(&config).map_err(|source| CliError::Io {
                path: config.clone(),
                source,
            })?;
            parse_config(&text)?
        }
    };
    if let Some(out) = cli.out {
        job.output.path = Some(out);
    }
    if let Some(format) = cli.format {
        job.output.format = format;
    }
    check_sweep(&job)?;
    Ok(job)
}

fn check_sweep(job: &Job) -> Result<(), CliError> {
    if let Task::Sweep { sweep, inner } = &job.task {
        if sweep.steps == 0 {
            return Err(CliError::Usage {
                key: Some("steps".into()),
                message: "sweep needs at least one grid point".into(),
            });
        }
        if !sweep.from.is_finite() || !sweep.to.is_finite() {
            return Err(CliError::usage("sweep end points must be finite"));
        }
        // surfaces an unknown or non-numeric parameter before any work
        inner.with_param(&sweep.param, sweep.from)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Job {
        let mut full = vec!["oscres"];
        full.extend_from_slice(args);
        job_from_cli(Cli::try_parse_from(full).unwrap()).unwrap()
    }

    fn single(args: &[&str]) -> Inner {
        match parse(args).task {
            Task::Single(inner) => inner,
            other => panic!("expected single job, got {other:?}"),
        }
    }

    #[test]
    fn flag_defaults_equal_config_defaults() {
        assert_eq!(single(&["spectrum"]), Inner::Spectrum(Default::default()));
        assert_eq!(single(&["gas"]), Inner::Gas(Default::default()));
        assert_eq!(single(&["chain"]), Inner::Chain(Default::default()));
        assert_eq!(single(&["stats"]), Inner::Stats(Default::default()));
        assert_eq!(single(&["bounds"]), Inner::Bounds(Default::default()));
        assert_eq!(single(&["oracle"]), Inner::Oracle(Default::default()));
        for kind in ["spectrum", "gas", "chain", "stats", "bounds", "oracle"] {
            let job = parse_config(&format!(r#"{{"kind":"{kind}"}}"#)).unwrap();
            assert_eq!(job.task, Task::Single(single(&[kind])));
        }
    }

    #[test]
    fn spectrum_flags() {
        let Inner::Spectrum(p) =
            single(&["spectrum", "--omega", "1", "--mu", "2.5", "--qmax", "10"])
        else {
            panic!()
        };
        assert_eq!(p.mu, 2.5);
        assert_eq!(p.qmax, 10);
        assert_eq!(p.hbar, 1.0);
    }

    #[test]
    fn negative_mu_flag() {
        let Inner::Stats(p) = single(&["stats", "--mu", "-1.5", "--stat", "bose"]) else {
            panic!()
        };
        assert_eq!(p.mu, -1.5);
        assert_eq!(p.stat, Stat::Bose);
    }

    #[test]
    fn unknown_config_key_is_named() {
        let err = parse_config(r#"{"kind":"spectrum","params":{"omeg":1.0}}"#).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        match err {
            CliError::Usage { key, .. } => assert_eq!(key.as_deref(), Some("omeg")),
            other => panic!("{other:?}"),
        }
        let err = parse_config(r#"{"kind":"spectrum","extra":1}"#).unwrap_err();
        assert!(matches!(err, CliError::Usage { key: Some(ref k), .. } if k == "extra"));
    }

    #[test]
    fn unknown_kind_rejected() {
        let err = parse_config(r#"{"kind":"spectra"}"#).unwrap_err();
        assert!(err.to_string().contains("spectra"));
    }

    #[test]
    fn sweep_from_flags_and_config_agree() {
        let flags = parse(&[
            "sweep", "--param", "mu", "--from", "0", "--to", "3", "--steps", "7", "spectrum",
            "--qmax", "5",
        ]);
        let config = parse_config(
            r#"{"kind":"sweep","params":{"param":"mu","from":0,"to":3,"steps":7,
                "job":{"kind":"spectrum","params":{"qmax":5}}}}"#,
        )
        .unwrap();
        assert_eq!(flags, config);
        let Task::Sweep { sweep, .. } = flags.task else {
            panic!()
        };
        assert_eq!(sweep.grid(), vec![0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0]);
    }

    #[test]
    fn sweep_rejects_unknown_and_non_numeric_params() {
        let bad = |param: &str| {
            parse_config(&format!(
                r#"{{"kind":"sweep","params":{{"param":"{param}","from":0,"to":1,"steps":2,
                    "job":{{"kind":"stats"}}}}}}"#
            ))
            .unwrap_err()
        };
        assert_eq!(bad("nu").exit_code(), 2);
        assert_eq!(bad("stat").exit_code(), 2);
    }

    #[test]
    fn integer_params_need_integral_grid_points() {
        let inner = Inner::Spectrum(Default::default());
        let Inner::Spectrum(p) = inner.with_param("qmax", 4.0).unwrap() else {
            panic!()
        };
        assert_eq!(p.qmax, 4);
        assert!(inner.with_param("qmax", 4.5).is_err());
        assert!(inner.with_param("qmax", -1.0).is_err());
    }

    #[test]
    fn optional_float_params_can_be_swept() {
        let inner = Inner::Gas(Default::default());
        let Inner::Gas(p) = inner.with_param("box_length", 2.0).unwrap() else {
            panic!()
        };
        assert_eq!(p.box_length, Some(2.0));
    }

    #[test]
    fn global_flags_override_config_output() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("job.json");
        std::fs::write(
            &path,
            r#"{"kind":"bounds","output":{"format":"csv","path":"a.csv"}}"#,
        )
        .unwrap();
        let cli =
            Cli::try_parse_from(["oscres", "run", path.to_str().unwrap(), "--format", "json"])
                .unwrap();
        let job = job_from_cli(cli).unwrap();
        assert_eq!(job.output.format, Format::Json);
        assert_eq!(job.output.path.as_deref(), Some("a.csv"));
    }
}
