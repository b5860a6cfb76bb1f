//! Acceptance criteria, runnable from tests and from the command line.

use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

use num_complex::Complex64 as C64;

use crate::dynamics::{evolve, IntegrationConfig};
use crate::error::Result;
use crate::pulse::{GaussianPulse, Undriven};
use crate::scenario::{run, RunOutput, ScenarioConfig, PRESET_NAMES};
use crate::two_level::{analytic_decay, bose_occupation, build_two_level, superposition, TwoLevelParams};

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "Bose occupations"),
    (2, "analytic decay oracle"),
    (3, "RK4 convergence order"),
    (4, "first-law closure"),
    (5, "second law"),
    (6, "heat-current sign"),
    (7, "entropy additivity"),
    (8, "continuum-mode efficiency"),
    (9, "discrete-mode efficiency oscillation"),
    (10, "regular vs irregular work"),
    (11, "invariant suite"),
    (12, "open circuit"),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckOptions {
    /// Integration step used by every simulated criterion.
    pub dt: f64,
    /// Number of irregular seeds compared against the regular train.
    pub seeds: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { dt: 0.02, seeds: 20 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub id: u8,
    pub name: &'static str,
    pub expected: String,
    pub got: String,
    pub tolerance: String,
    pub passed: bool,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} [{}] {}: expected {}; got {}; tolerance {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.expected,
            self.got,
            self.tolerance
        )
    }
}

struct Verdict {
    expected: String,
    got: String,
    tolerance: String,
    passed: bool,
}

/// Runs criteria, caching preset simulations between them.
pub struct Checker {
    opts: CheckOptions,
    runs: HashMap<String, Rc<RunOutput>>,
}

impl Checker {
    pub fn new(opts: CheckOptions) -> Self {
        Self {
            opts,
            runs: HashMap::new(),
        }
    }

    pub fn run_all(&mut self) -> Vec<CheckOutcome> {
        CRITERIA.iter().map(|&(id, _)| self.check(id)).collect()
    }

    pub fn check(&mut self, id: u8) -> CheckOutcome {
        let name = CRITERIA
            .iter()
            .find(|c| c.0 == id)
            .map(|c| c.1)
            .unwrap_or("unknown criterion");
        let verdict = match id {
            1 => Ok(bose_values()),
            2 => self.analytic_decay(),
            3 => self.convergence_order(),
            4 => self.first_law(),
            5 => self.second_law(),
            6 => self.heat_current_sign(),
            7 => self.entropy_additivity(),
            8 => self.continuum_efficiency(),
            9 => self.discrete_oscillation(),
            10 => self.work_ordering(),
            11 => self.invariants(),
            12 => self.open_circuit(),
            _ => Err(crate::error::Error::Unsupported(format!("no criterion {id}"))),
        };
        let v = verdict.unwrap_or_else(|e| Verdict {
            expected: "a completed run".into(),
            got: format!("error: {e}"),
            tolerance: "-".into(),
            passed: false,
        });
        CheckOutcome {
            id,
            name,
            expected: v.expected,
            got: v.got,
            tolerance: v.tolerance,
            passed: v.passed,
        }
    }

    fn config(&self, preset: &str) -> Result<ScenarioConfig> {
        let mut cfg = ScenarioConfig::preset(preset)?;
        cfg.integration.dt = self.opts.dt;
        Ok(cfg)
    }

    fn preset(&mut self, name: &str) -> Result<Rc<RunOutput>> {
        if let Some(r) = self.runs.get(name) {
            return Ok(Rc::clone(r));
        }
        let out = Rc::new(run(&self.config(name)?)?);
        self.runs.insert(name.to_string(), Rc::clone(&out));
        Ok(out)
    }

    fn analytic_decay(&self) -> Result<Verdict> {
        let err = decay_error(self.opts.dt)?;
        Ok(Verdict {
            expected: "max |ρ - ρ_exact| at γt = 0.5, 1, 2".into(),
            got: format!("{err:.3e}"),
            tolerance: "<= 1e-6".into(),
            passed: err <= 1e-6,
        })
    }

    fn convergence_order(&self) -> Result<Verdict> {
        let dts = [2.0 * self.opts.dt, self.opts.dt, 0.5 * self.opts.dt];
        let errs = dts.iter().map(|&dt| decay_error(dt)).collect::<Result<Vec<_>>>()?;
        let slope = log_log_slope(&dts, &errs);
        Ok(Verdict {
            expected: "slope 4".into(),
            got: format!("{slope:.3} (errors {:.2e}, {:.2e}, {:.2e})", errs[0], errs[1], errs[2]),
            tolerance: "± 0.3".into(),
            passed: (slope - 4.0).abs() <= 0.3,
        })
    }

    fn first_law(&mut self) -> Result<Verdict> {
        let a = self.preset("fig2")?.summary.max_first_law_residual;
        let b = self.preset("fig7")?.summary.max_first_law_residual;
        Ok(Verdict {
            expected: "max |dE/dt - J - P| on fig2, fig7".into(),
            got: format!("{a:.3e}, {b:.3e}"),
            tolerance: "<= 1e-8".into(),
            passed: a <= 1e-8 && b <= 1e-8,
        })
    }

    fn second_law(&mut self) -> Result<Verdict> {
        let min = self.preset("fig2")?.summary.min_entropy_production.unwrap_or(f64::NAN);
        Ok(Verdict {
            expected: "min σ(t) on fig2 >= 0".into(),
            got: format!("{min:.3e}"),
            tolerance: ">= -1e-6".into(),
            passed: min >= -1e-6,
        })
    }

    fn heat_current_sign(&mut self) -> Result<Verdict> {
        let max = self.preset("fig2")?.summary.max_heat_current;
        Ok(Verdict {
            expected: "max J(t) on fig2 <= 0".into(),
            got: format!("{max:.3e}"),
            tolerance: "<= 1e-12".into(),
            passed: max <= 1e-12,
        })
    }

    fn entropy_additivity(&mut self) -> Result<Verdict> {
        let out = self.preset("fig7")?;
        let worst = out
            .records
            .iter()
            .map(|r| {
                let pc = r.photocell.expect("photocell record");
                (r.thermo.entropy - pc.split.s_d - pc.split.s_a).abs()
            })
            .fold(0.0, f64::max);
        Ok(Verdict {
            expected: "max |S - S_D - S_A| on fig7".into(),
            got: format!("{worst:.3e}"),
            tolerance: "<= 1e-9".into(),
            passed: worst <= 1e-9,
        })
    }

    fn continuum_efficiency(&mut self) -> Result<Verdict> {
        let (eta_b, ptp_b) = tail_efficiency(&*self.preset("fig8b")?);
        let (eta_7, ptp_7) = tail_efficiency(&*self.preset("fig7")?);
        let passed = (eta_b - 0.36).abs() <= 0.05 && (eta_7 - eta_b).abs() <= 0.05 && ptp_b < 0.05 && ptp_7 < 0.05;
        Ok(Verdict {
            expected: "fig8b η = 0.36; |fig7 - fig8b| = 0; last-quarter peak-to-peak < 0.05".into(),
            got: format!("fig8b η = {eta_b:.4} (p2p {ptp_b:.2e}), fig7 η = {eta_7:.4} (p2p {ptp_7:.2e})"),
            tolerance: "± 0.05".into(),
            passed,
        })
    }

    fn discrete_oscillation(&mut self) -> Result<Verdict> {
        let out = self.preset("fig8a")?;
        // Second half only: the start-up transient, before any current flows,
        // is not part of the periodic operation being described.
        let half = out.records.len() / 2;
        let etas: Vec<f64> = out.records[half..]
            .iter()
            .filter_map(|r| r.photocell.and_then(|p| p.efficiency))
            .collect();
        let min = etas.iter().copied().fold(f64::INFINITY, f64::min);
        let max = etas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(Verdict {
            expected: "fig8a η (second half) swinging between 0.2 and 0.6".into(),
            got: format!("range [{min:.4}, {max:.4}]"),
            tolerance: "± 0.05 (min <= 0.25, max >= 0.55)".into(),
            passed: min <= 0.25 && max >= 0.55,
        })
    }

    fn work_ordering(&mut self) -> Result<Verdict> {
        let regular = self.preset("fig4")?.summary.final_work;
        let base = self.config("fig5")?;
        let mut wins = 0;
        let mut worst_margin = f64::INFINITY;
        for seed in 1..=self.opts.seeds {
            let mut cfg = base.clone();
            cfg.pulses.seed = seed;
            let w = run(&cfg)?.summary.final_work;
            if regular > w {
                wins += 1;
            }
            worst_margin = worst_margin.min(regular - w);
        }
        let needed = (self.opts.seeds * 3).div_ceil(4);
        Ok(Verdict {
            expected: format!("regular W > irregular W in >= {needed}/{} seeds", self.opts.seeds),
            got: format!(
                "{wins}/{} (W_regular = {regular:.6}, min margin {worst_margin:.3e})",
                self.opts.seeds
            ),
            tolerance: "strict inequality".into(),
            passed: wins >= needed,
        })
    }

    fn invariants(&mut self) -> Result<Verdict> {
        let mut drift: f64 = 0.0;
        let mut herm: f64 = 0.0;
        let mut min_eig = f64::INFINITY;
        for name in PRESET_NAMES {
            let s = self.preset(name)?.summary;
            drift = drift.max(s.max_trace_drift);
            herm = herm.max(s.max_hermiticity_error);
            min_eig = min_eig.min(s.min_eigenvalue);
        }
        let norm_err = (pulse_norm(1.0 / (4.0 * std::f64::consts::PI)) - 1.0).abs();
        let mut deriv_err: f64 = 0.0;
        for name in PRESET_NAMES {
            deriv_err = deriv_err.max(derivative_error(&self.config(name)?)?);
        }
        let passed = drift <= 1e-9 && herm <= 1e-12 && min_eig >= -1e-6 && norm_err <= 1e-6 && deriv_err <= 1e-5;
        Ok(Verdict {
            expected: "trace drift, Hermiticity, min eigenvalue, pulse norm, dg/dt".into(),
            got: format!(
                "drift {drift:.2e}, herm {herm:.2e}, min eig {min_eig:.2e}, |norm-1| {norm_err:.2e}, dg/dt rel {deriv_err:.2e}"
            ),
            tolerance: "1e-9, 1e-12, >= -1e-6, 1e-6, 1e-5".into(),
            passed,
        })
    }

    fn open_circuit(&mut self) -> Result<Verdict> {
        let cfg = self.config("fig7")?.with_override("photocell.big-gamma", 0.0)?;
        let out = run(&cfg)?;
        let max_i = out
            .records
            .iter()
            .map(|r| r.photocell.map_or(0.0, |p| p.electrical.current.abs()))
            .fold(0.0, f64::max);
        let max_p3 = out.records.iter().map(|r| r.rho[(3, 3)].re.abs()).fold(0.0, f64::max);
        Ok(Verdict {
            expected: "Γ = 0: I ≡ 0 and ρ33 = 0".into(),
            got: format!("max |I| = {max_i:.3e}, max ρ33 = {max_p3:.3e}"),
            tolerance: "I = 0, ρ33 <= 1e-12".into(),
            passed: max_i == 0.0 && max_p3 <= 1e-12,
        })
    }
}

fn bose_values() -> Verdict {
    let a = bose_occupation(1.0, 300.0);
    let b = bose_occupation(1.8, 5800.0);
    let ratio = a / 6.5e-31;
    Verdict {
        expected: "n(1 eV, 300 K) = 6.5e-31, n(1.8 eV, 5800 K) = 0.0317".into(),
        got: format!("{a:.3e}, {b:.4}"),
        tolerance: "factor 1.1, ± 0.0005".into(),
        passed: (1.0 / 1.1..=1.1).contains(&ratio) && (b - 0.0317).abs() <= 0.0005,
    }
}

/// Largest deviation from the closed-form decay at `γt ∈ {0.5, 1, 2}`.
pub fn decay_error(dt: f64) -> Result<f64> {
    let gamma = 1e-2;
    let params = TwoLevelParams {
        gamma,
        nbar_override: Some(0.0),
        ..Default::default()
    };
    let model = build_two_level(&params)?;
    let rho0 = superposition();
    let cfg = IntegrationConfig {
        dt,
        t_start: 0.0,
        t_end: 2.0 / gamma,
        record_every: 1,
    };
    let targets = [0.5 / gamma, 1.0 / gamma, 2.0 / gamma];
    let mut worst: f64 = 0.0;
    evolve(&model, &Undriven, &rho0, &cfg, |s| {
        if targets.iter().any(|&t| (s.t - t).abs() < 0.5 * dt) {
            let exact = analytic_decay(&rho0, gamma, s.t)?;
            worst = worst.max((s.rho - exact.matrix()).max_abs());
        }
        Ok(())
    })?;
    Ok(worst)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    cov / var
}

/// Final smoothed efficiency and its peak-to-peak spread over the last
/// quarter of the run.
pub fn tail_efficiency(out: &RunOutput) -> (f64, f64) {
    let n = out.records.len();
    let tail: Vec<f64> = out.records[3 * n / 4..]
        .iter()
        .map(|r| r.photocell.and_then(|p| p.efficiency).unwrap_or(f64::NAN))
        .collect();
    let max = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let last = *tail.last().unwrap_or(&f64::NAN);
    if tail.iter().any(|x| x.is_nan()) {
        return (last, f64::NAN);
    }
    (last, max - min)
}

/// Trapezoidal `∫|ξ|² dt` over `±8/Ω` with step `0.01/Ω`.
pub fn pulse_norm(bandwidth: f64) -> f64 {
    let p = GaussianPulse::new(0.0, bandwidth).expect("positive bandwidth");
    let h = 0.01 / bandwidth;
    let n = 1600;
    let mut acc = 0.0;
    for k in 0..=n {
        let t = -8.0 / bandwidth + k as f64 * h;
        let w = if k == 0 || k == n { 0.5 } else { 1.0 };
        acc += w * p.value(t).norm_sqr();
    }
    acc * h
}

/// Largest `|dg/dt − central difference|` relative to `max|g|`, sampled on the
/// support of every pulse in the configured train.
pub fn derivative_error(cfg: &ScenarioConfig) -> Result<f64> {
    let seq = cfg.pulses.build()?;
    if seq.is_empty() {
        return Ok(0.0);
    }
    let h = 1e-4;
    let mut worst: f64 = 0.0;
    let mut gmax: f64 = 0.0;
    for p in seq.pulses() {
        let r = 3.0 / p.bandwidth;
        for k in 0..=600 {
            let t = p.peak_time - r + k as f64 * (2.0 * r / 600.0);
            let fd: C64 = (seq.value(t + h) - seq.value(t - h)) / (2.0 * h);
            worst = worst.max((seq.derivative(t) - fd).norm());
            gmax = gmax.max(seq.value(t).norm());
        }
    }
    Ok(worst / gmax)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let x = [0.04, 0.02, 0.01];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powi(4)).collect();
        assert!((log_log_slope(&x, &y) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn pulse_norm_is_unity() {
        assert!((pulse_norm(1.0) - 1.0).abs() < 1e-6);
        assert!((pulse_norm(0.3) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn coarse_step_fails_loudly() {
        let mut c = Checker::new(CheckOptions { dt: 0.2, seeds: 1 });
        let out = c.check(3);
        assert!(!out.passed);
        assert!(out.got.starts_with("error"), "{}", out.got);
    }

    #[test]
    fn criterion_one_reports_values() {
        let out = Checker::new(CheckOptions::default()).check(1);
        assert_eq!(out.got, "1.588e-17, 0.0281");
        assert!(!out.passed);
    }
}
