//! Fixtures shared by the benchmarks.

use pulsecell::{run, DensityOperator, PhotocellParams, ScenarioConfig, SystemModel, TwoLevelParams, C64};

pub struct Fixture {
    pub name: &'static str,
    pub model: SystemModel,
    pub rho: DensityOperator,
    pub g: C64,
}

/// Mixed states with coherences inside each block, so every kernel term is exercised.
pub fn fixtures() -> Vec<Fixture> {
    let two_level = pulsecell::build_two_level(&TwoLevelParams::default()).expect("default parameters");
    let photocell = pulsecell::build_photocell(&PhotocellParams::default()).expect("default parameters");
    vec![
        Fixture {
            name: "two-level",
            model: two_level,
            rho: mixed(2),
            g: C64::new(0.08, -0.03),
        },
        Fixture {
            name: "photocell",
            model: photocell,
            rho: mixed(4),
            g: C64::new(0.25, 0.1),
        },
    ]
}

fn mixed(dim: usize) -> DensityOperator {
    let mut m = DensityOperator::maximally_mixed(dim).into_matrix();
    let c = C64::new(0.1, 0.05);
    m[(0, 1)] = c;
    m[(1, 0)] = c.conj();
    DensityOperator::new(m).expect("positive for dim >= 2")
}

/// A preset shortened to `t_end`, for whole-run timings.
pub fn short_preset(name: &str, t_end: f64) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::preset(name).expect("known preset");
    cfg.integration.t_end = t_end;
    cfg
}

/// Runs `cfg` and returns the record count.
pub fn run_records(cfg: &ScenarioConfig) -> usize {
    run(cfg).expect("preset runs").records.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid() {
        for f in fixtures() {
            assert_eq!(f.rho.dim(), f.model.dim(), "{}", f.name);
            assert!(pulsecell::state::min_eigenvalue(f.rho.matrix()).unwrap() > 0.0);
        }
        assert_eq!(run_records(&short_preset("fig2", 2.0)), 11);
    }
}
