use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use pulsecell::ScenarioConfig;

use crate::failure::{Failure, Outcome};

#[derive(Debug, Parser)]
#[command(
    name = "pulsecell",
    version,
    about = "Pulse-driven two-level system and donor-acceptor photocell"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario and write its records as CSV.
    Simulate(SimulateArgs),
    /// Run one scenario per value of a numeric parameter.
    Sweep(SweepArgs),
    /// Run the acceptance criteria and print a pass/fail table.
    Check(CheckArgs),
    /// List the built-in presets.
    Presets,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Built-in scenario (see `pulsecell presets`).
    #[arg(long)]
    pub preset: Option<String>,
    /// TOML scenario file.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
}

impl Source {
    pub fn load(&self) -> Outcome<ScenarioConfig> {
        let cfg = match (&self.preset, &self.config) {
            (Some(name), _) => ScenarioConfig::preset(name)?,
            (None, Some(path)) => {
                let mut cfg = ScenarioConfig::load(path)?;
                if cfg.name.is_empty() {
                    cfg.name = path
                        .file_stem()
                        .map(|s| s.to_string_lossy().into_owned())
                        .unwrap_or_default();
                }
                cfg
            }
            (None, None) => return Err(Failure::Config("need --preset or --config".into())),
        };
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct Overrides {
    /// RK4 step in units of 1/ω0.
    #[arg(long)]
    pub dt: Option<f64>,
    /// End time in units of 1/ω0.
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Write a record every N steps.
    #[arg(long, value_name = "N")]
    pub record_every: Option<u64>,
    /// Seed for irregular pulse timing.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut ScenarioConfig) {
        if let Some(dt) = self.dt {
            cfg.integration.dt = dt;
        }
        if let Some(t) = self.t_end {
            cfg.integration.t_end = t;
        }
        if let Some(n) = self.record_every {
            cfg.integration.record_every = n;
        }
        if let Some(seed) = self.seed {
            cfg.pulses.seed = seed;
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub overrides: Overrides,
    /// CSV destination; defaults to `<name>.csv` in the output directory.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub source: Source,
    #[command(flatten)]
    pub overrides: Overrides,
    /// Parameter path and values, e.g. `photocell.big-gamma=0.01,0.05,0.1`.
    #[arg(long, value_name = "PARAM=V1,V2,...")]
    pub sweep: SweepSpec,
    /// Directory for per-run CSVs and `aggregate.csv`.
    #[arg(long, value_name = "DIR")]
    pub output: Option<PathBuf>,
    /// Maximum concurrent runs; defaults to the number of cores.
    #[arg(long, value_name = "N")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Integration step for the scenario runs.
    #[arg(long, default_value_t = 0.02)]
    pub dt: f64,
    /// Seeds for the regular-versus-irregular work comparison.
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
    /// Run only these criteria (repeatable).
    #[arg(long = "criterion", value_name = "ID")]
    pub criteria: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub param: String,
    pub values: Vec<f64>,
}

impl SweepSpec {
    /// Last path segment, used in file names.
    pub fn key(&self) -> &str {
        self.param.rsplit('.').next().unwrap_or(&self.param)
    }
}

impl FromStr for SweepSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (param, list) = s.split_once('=').ok_or("expected PARAM=V1,V2,...")?;
        let param = param.trim();
        if param.is_empty() {
            return Err("empty parameter name".into());
        }
        let values = list
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|e| format!("bad value '{v}': {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        for (i, v) in values.iter().enumerate() {
            if values[..i].contains(v) {
                return Err(format!("value {v} listed twice"));
            }
        }
        Ok(Self {
            param: param.to_string(),
            values,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn sweep_spec_parsing() {
        let s: SweepSpec = "photocell.big-gamma=0.01, 0.05,0.1".parse().unwrap();
        assert_eq!(s.param, "photocell.big-gamma");
        assert_eq!(s.values, vec![0.01, 0.05, 0.1]);
        assert_eq!(s.key(), "big-gamma");
        assert!("gamma".parse::<SweepSpec>().is_err());
        assert!("=1,2".parse::<SweepSpec>().is_err());
        assert!("x=1,abc".parse::<SweepSpec>().is_err());
        assert!("x=1,1".parse::<SweepSpec>().is_err());
    }

    #[test]
    fn preset_and_config_are_exclusive() {
        assert!(Cli::try_parse_from(["pulsecell", "simulate"]).is_err());
        assert!(Cli::try_parse_from(["pulsecell", "simulate", "--preset", "fig2", "--config", "a.toml"]).is_err());
        let cli = Cli::try_parse_from(["pulsecell", "simulate", "--preset", "fig2", "--t-end", "5"]).unwrap();
        let Command::Simulate(args) = cli.command else { panic!() };
        let mut cfg = args.source.load().unwrap();
        args.overrides.apply(&mut cfg);
        assert_eq!(cfg.integration.t_end, 5.0);
    }
}
