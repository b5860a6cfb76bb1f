//! Scenario configuration, named presets and the simulation driver that turns
//! a configuration into a stream of records.

use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{evolve, IntegrationConfig};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::model::SystemModel;
use crate::photocell::{
    build_photocell, donor_acceptor_split, electrical, instantaneous_efficiency, inter_block_coherence,
    EfficiencyFilter, ElectricalRecord, PhotocellParams, Split,
};
use crate::pulse::{build_continuum, build_irregular, build_regular, coherent_amplitude, PulseMode, PulseSequence};
use crate::state::DensityOperator;
use crate::thermo::{accumulate, ThermoRecord, ThermoRecorder};
use crate::two_level::{build_two_level, superposition, TwoLevelParams};

pub const PRESET_NAMES: [&str; 7] = ["fig2", "fig3", "fig4", "fig5", "fig7", "fig8a", "fig8b"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    TwoLevel,
    Photocell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialState {
    Ground,
    Excited,
    /// `(|0⟩ + |1⟩)/√2`.
    Superposition,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct PulseSpec {
    pub mode: PulseMode,
    /// Pulse count for regular and irregular trains; 0 disables the drive.
    pub count: usize,
    pub first_peak: f64,
    pub spacing: f64,
    /// Irregular mode: offsets uniform in `±jitter·spacing`.
    pub jitter: f64,
    pub seed: u64,
    /// `⟨n⟩ = |α|²` per pulse.
    pub mean_photons: f64,
    /// Phase of `α` in radians.
    pub phase: f64,
    pub bandwidth: f64,
    /// Continuum mode: length of the tiled interval after the first peak.
    pub duration: f64,
}

impl Default for PulseSpec {
    fn default() -> Self {
        let period = std::f64::consts::TAU;
        Self {
            mode: PulseMode::Regular,
            count: 5,
            first_peak: 50.0 * period,
            spacing: 50.0 * period,
            jitter: 0.3,
            seed: 1,
            mean_photons: 1.0,
            phase: 0.0,
            bandwidth: 1.0 / (4.0 * std::f64::consts::PI),
            duration: 0.0,
        }
    }
}

impl PulseSpec {
    pub fn build(&self) -> Result<PulseSequence> {
        let alpha = coherent_amplitude(self.mean_photons, self.phase)?;
        match self.mode {
            PulseMode::Continuum => {
                build_continuum(self.first_peak, self.duration, self.spacing, self.bandwidth, alpha)
            }
            _ if self.count == 0 => Ok(PulseSequence::empty()),
            PulseMode::Regular => build_regular(self.count, self.first_peak, self.spacing, self.bandwidth, alpha),
            PulseMode::Irregular => build_irregular(
                self.count,
                self.first_peak,
                self.spacing,
                self.jitter,
                self.seed,
                self.bandwidth,
                alpha,
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    pub system: SystemKind,
    /// Defaults to the superposition for the two-level system and to `|0⟩`
    /// for the photocell.
    #[serde(default)]
    pub initial_state: Option<InitialState>,
    /// CSV destination used when no path is given on the command line.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub two_level: TwoLevelParams,
    #[serde(default)]
    pub photocell: PhotocellParams,
    #[serde(default)]
    pub pulses: PulseSpec,
    #[serde(default)]
    pub integration: IntegrationConfig,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn preset(name: &str) -> Result<Self> {
        let text = match name {
            "fig2" => include_str!("../presets/fig2.toml"),
            "fig3" => include_str!("../presets/fig3.toml"),
            "fig4" => include_str!("../presets/fig4.toml"),
            "fig5" => include_str!("../presets/fig5.toml"),
            "fig7" => include_str!("../presets/fig7.toml"),
            "fig8a" => include_str!("../presets/fig8a.toml"),
            "fig8b" => include_str!("../presets/fig8b.toml"),
            other => {
                return Err(Error::Config(format!(
                    "unknown preset '{other}' (known: {})",
                    PRESET_NAMES.join(", ")
                )))
            }
        };
        Self::from_toml(text)
    }

    /// Current numeric value at a dotted kebab-case path such as
    /// `photocell.big-gamma` or `pulses.mean-photons`.
    pub fn value_at(&self, path: &str) -> Result<f64> {
        let mut tree = toml::Value::try_from(self).map_err(|e| Error::Config(e.to_string()))?;
        match lookup(&mut tree, path)? {
            toml::Value::Float(x) => Ok(*x),
            toml::Value::Integer(n) => Ok(*n as f64),
            _ => Err(Error::Config(format!("'{path}' is not numeric"))),
        }
    }

    /// Sets the numeric value at a dotted path. The key must already exist
    /// (defaults are materialized first) and hold a number.
    pub fn with_override(&self, path: &str, value: f64) -> Result<Self> {
        let mut tree = toml::Value::try_from(self).map_err(|e| Error::Config(e.to_string()))?;
        let node = lookup(&mut tree, path)?;
        *node = match node {
            toml::Value::Float(_) => toml::Value::Float(value),
            toml::Value::Integer(_) => {
                if value.fract() != 0.0 || value < 0.0 || value > i64::MAX as f64 {
                    return Err(Error::Config(format!(
                        "'{path}' needs a non-negative integer, got {value}"
                    )));
                }
                toml::Value::Integer(value as i64)
            }
            _ => return Err(Error::Config(format!("'{path}' is not numeric"))),
        };
        tree.try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.to_string()))
    }

    pub fn initial_state(&self) -> InitialState {
        self.initial_state.unwrap_or(match self.system {
            SystemKind::TwoLevel => InitialState::Superposition,
            SystemKind::Photocell => InitialState::Ground,
        })
    }

    /// Validates every section and assembles the model, drive and initial state.
    pub fn build(&self) -> Result<Scenario> {
        self.integration.validate()?;
        let (model, beta, dim) = match self.system {
            SystemKind::TwoLevel => (build_two_level(&self.two_level)?, Some(self.two_level.beta()), 2),
            SystemKind::Photocell => (build_photocell(&self.photocell)?, None, 4),
        };
        let pulses = self.pulses.build()?;
        let rho0 = match self.initial_state() {
            InitialState::Ground => DensityOperator::basis(dim, 0),
            InitialState::Excited => DensityOperator::basis(dim, 1),
            InitialState::Superposition if dim == 2 => superposition(),
            InitialState::Superposition => {
                let a = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                let z = C64::new(0.0, 0.0);
                DensityOperator::pure(&[a, a, z, z])?
            }
        };
        Ok(Scenario {
            config: self.clone(),
            model,
            pulses,
            rho0,
            beta,
        })
    }
}

fn lookup<'a>(tree: &'a mut toml::Value, path: &str) -> Result<&'a mut toml::Value> {
    let mut node = tree;
    let parts: Vec<&str> = path.split('.').collect();
    for (k, part) in parts.iter().enumerate() {
        let table = node
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("'{}' is not a table", parts[..k].join("."))))?;
        node = table
            .get_mut(*part)
            .ok_or_else(|| Error::Config(format!("unknown parameter '{path}'")))?;
    }
    Ok(node)
}

/// A validated, ready-to-run scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub model: SystemModel,
    pub pulses: PulseSequence,
    pub rho0: DensityOperator,
    /// Bath inverse temperature for single-bath models.
    pub beta: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotocellRecord {
    pub split: Split,
    pub electrical: ElectricalRecord,
    /// Ratio of the trailing averages of `P_out` and `P_D`.
    pub efficiency: Option<f64>,
    pub efficiency_instant: Option<f64>,
    pub inter_block_coherence: f64,
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub thermo: ThermoRecord,
    pub rho: ComplexMatrix,
    pub g: C64,
    pub min_eigenvalue: f64,
    pub photocell: Option<PhotocellRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub final_work: f64,
    pub final_heat: f64,
    pub final_entropy: f64,
    pub energy_change: f64,
    pub min_entropy_production: Option<f64>,
    pub max_first_law_residual: f64,
    pub max_heat_current: f64,
    pub final_efficiency: Option<f64>,
    pub max_trace_drift: f64,
    pub max_hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<RunRecord>,
    pub final_state: DensityOperator,
    pub summary: Summary,
}

impl Scenario {
    pub fn run(&self) -> Result<RunOutput> {
        let cfg = &self.config.integration;
        let recorder = ThermoRecorder::new(&self.model, self.beta, cfg.dt)?;
        let photocell = (self.config.system == SystemKind::Photocell).then_some(self.config.photocell);
        let mut filter = EfficiencyFilter::for_spacing(cfg.dt * cfg.record_every as f64);
        let mut records = Vec::with_capacity((cfg.validate()? / cfg.record_every + 1) as usize);
        let mut max_hermiticity: f64 = 0.0;

        let evolution = evolve(&self.model, &self.pulses, &self.rho0, cfg, |sample| {
            let snap = recorder.observe(sample)?;
            max_hermiticity = max_hermiticity.max(sample.rho.hermiticity_error());
            let pc = match &photocell {
                Some(params) => {
                    let split = donor_acceptor_split(sample.rho, &self.model, sample.g, sample.dg_dt, &snap.rho_dot)?;
                    let elec = electrical(sample.rho, params, split.p_d);
                    Some(PhotocellRecord {
                        split,
                        electrical: elec,
                        efficiency: filter.push(elec.output_power, elec.donor_power),
                        efficiency_instant: instantaneous_efficiency(&elec),
                        inter_block_coherence: inter_block_coherence(sample.rho),
                    })
                }
                None => None,
            };
            records.push(RunRecord {
                thermo: snap.record,
                rho: sample.rho.clone(),
                g: sample.g,
                min_eigenvalue: snap.min_eigenvalue,
                photocell: pc,
            });
            Ok(())
        })?;

        let mut thermo: Vec<ThermoRecord> = records.iter().map(|r| r.thermo).collect();
        accumulate(&mut thermo)?;
        for (r, t) in records.iter_mut().zip(thermo) {
            r.thermo = t;
        }

        let first = &records[0];
        let last = records.last().expect("at least two records");
        let summary = Summary {
            final_work: last.thermo.work,
            final_heat: last.thermo.heat,
            final_entropy: last.thermo.entropy,
            energy_change: last.thermo.energy - first.thermo.energy,
            min_entropy_production: records
                .iter()
                .filter_map(|r| r.thermo.entropy_production)
                .reduce(f64::min),
            max_first_law_residual: records.iter().map(|r| r.thermo.first_law_residual).fold(0.0, f64::max),
            max_heat_current: records
                .iter()
                .map(|r| r.thermo.heat_current)
                .fold(f64::NEG_INFINITY, f64::max),
            final_efficiency: last.photocell.and_then(|p| p.efficiency),
            max_trace_drift: evolution.max_trace_drift,
            max_hermiticity_error: max_hermiticity,
            min_eigenvalue: records.iter().map(|r| r.min_eigenvalue).fold(f64::INFINITY, f64::min),
        };
        Ok(RunOutput {
            records,
            final_state: evolution.state,
            summary,
        })
    }
}

/// Builds and runs a configuration.
pub fn run(config: &ScenarioConfig) -> Result<RunOutput> {
    config.build()?.run()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse_and_validate() {
        for name in PRESET_NAMES {
            let cfg = ScenarioConfig::preset(name).unwrap();
            assert_eq!(cfg.name, name);
            cfg.build().unwrap();
        }
        assert!(matches!(ScenarioConfig::preset("fig6"), Err(Error::Config(_))));
    }

    #[test]
    fn toml_round_trip() {
        for name in PRESET_NAMES {
            let cfg = ScenarioConfig::preset(name).unwrap();
            let text = cfg.to_toml().unwrap();
            let back = ScenarioConfig::from_toml(&text).unwrap();
            assert_eq!(back, cfg);
            assert_eq!(back.to_toml().unwrap(), text);
        }
    }

    #[test]
    fn minimal_config_uses_defaults() {
        let cfg = ScenarioConfig::from_toml("system = \"two-level\"").unwrap();
        assert_eq!(cfg.two_level, TwoLevelParams::default());
        assert_eq!(cfg.initial_state(), InitialState::Superposition);
        let cfg = ScenarioConfig::from_toml("system = \"photocell\"").unwrap();
        assert_eq!(cfg.initial_state(), InitialState::Ground);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ScenarioConfig::from_toml("system = \"two-level\"\nbogus = 1").is_err());
        assert!(ScenarioConfig::from_toml("system = \"two-level\"\n[pulses]\nwidth = 1.0").is_err());
    }

    #[test]
    fn overrides() {
        let cfg = ScenarioConfig::preset("fig7").unwrap();
        let c = cfg.with_override("photocell.big-gamma", 0.5).unwrap();
        assert_eq!(c.photocell.big_gamma, 0.5);
        let c = cfg.with_override("pulses.seed", 7.0).unwrap();
        assert_eq!(c.pulses.seed, 7);
        assert!(cfg.with_override("pulses.seed", 1.5).is_err());
        assert!(cfg.with_override("photocell.nope", 1.0).is_err());
        assert!(cfg.with_override("system", 1.0).is_err());
        assert!(cfg.with_override("pulses.mode", 1.0).is_err());
        // Optional keys left unset have no value to override.
        assert!(cfg.with_override("photocell.nbar-override", 0.0).is_err());

        assert_eq!(cfg.value_at("photocell.big-gamma").unwrap(), 0.1);
        assert_eq!(cfg.value_at("pulses.seed").unwrap(), cfg.pulses.seed as f64);
        assert!(cfg.value_at("photocell").is_err());
        assert!(cfg.value_at("photocell.nope").is_err());
        assert!(cfg.value_at("pulses.mode.x").is_err());
    }

    #[test]
    fn invalid_sections_fail_build() {
        let mut cfg = ScenarioConfig::preset("fig2").unwrap();
        cfg.integration.dt = 0.2;
        assert!(cfg.build().is_err());
        let mut cfg = ScenarioConfig::preset("fig7").unwrap();
        cfg.photocell.big_gamma = -1.0;
        assert!(cfg.build().is_err());
        let mut cfg = ScenarioConfig::preset("fig5").unwrap();
        cfg.pulses.jitter = 0.7;
        assert!(cfg.build().is_err());
    }

    #[test]
    fn short_run_records_every_step_block() {
        let mut cfg = ScenarioConfig::preset("fig2").unwrap();
        cfg.integration.t_end = 10.0;
        let out = run(&cfg).unwrap();
        assert_eq!(out.records.len(), 51);
        assert_eq!(out.records.last().unwrap().thermo.t, 10.0);
        assert!(out.records.iter().all(|r| r.photocell.is_none()));
        assert!(out.summary.min_entropy_production.is_some());
    }
}
