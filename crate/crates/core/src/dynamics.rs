//! Fixed-step RK4 integration of the master equation.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::model::{Liouvillian, SystemModel, Workspace};
use crate::pulse::Drive;
use crate::state::{min_eigenvalue, DensityOperator};

/// Largest step allowed, in units of `1/ω0`.
pub const MAX_STEP: f64 = 0.05;
/// Trace deviation beyond which the state is renormalized after a step.
pub const RENORMALIZE_THRESHOLD: f64 = 1e-12;
/// Most negative eigenvalue tolerated at a record point.
pub const POSITIVITY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case", deny_unknown_fields)]
pub struct IntegrationConfig {
    pub dt: f64,
    pub t_start: f64,
    pub t_end: f64,
    pub record_every: u64,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        Self {
            dt: 0.02,
            t_start: 0.0,
            t_end: 100.0,
            record_every: 10,
        }
    }
}

impl IntegrationConfig {
    /// Checks the step constraints and returns the number of steps.
    pub fn validate(&self) -> Result<u64> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::param("dt", format!("must be positive, got {}", self.dt)));
        }
        if self.dt > MAX_STEP + 1e-15 {
            return Err(Error::param("dt", format!("ω0·dt = {} exceeds {MAX_STEP}", self.dt)));
        }
        if !(self.t_end > self.t_start) || !self.t_end.is_finite() || !self.t_start.is_finite() {
            return Err(Error::param(
                "t-end",
                format!("must exceed t-start ({} <= {})", self.t_end, self.t_start),
            ));
        }
        if self.record_every == 0 {
            return Err(Error::param("record-every", "must be at least 1"));
        }
        let exact = (self.t_end - self.t_start) / self.dt;
        if exact > u64::MAX as f64 / 2.0 {
            return Err(Error::param("t-end", "step count overflows"));
        }
        let steps = exact.round();
        if (exact - steps).abs() > 1e-6 || steps < 1.0 {
            return Err(Error::param(
                "t-end",
                format!("(t-end - t-start)/dt = {exact} is not a whole number of steps"),
            ));
        }
        let steps = steps as u64;
        if !steps.is_multiple_of(self.record_every) {
            return Err(Error::param(
                "record-every",
                format!(
                    "{} steps is not a multiple of record-every = {}",
                    steps, self.record_every
                ),
            ));
        }
        Ok(steps)
    }

    pub fn time_at(&self, step: u64) -> f64 {
        self.t_start + step as f64 * self.dt
    }
}

/// What the observer sees at a record point.
#[derive(Debug, Clone, Copy)]
pub struct Sample<'a> {
    pub step: u64,
    pub t: f64,
    pub rho: &'a ComplexMatrix,
    pub g: C64,
    pub dg_dt: C64,
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub state: DensityOperator,
    /// Largest `|tr ρ - 1|` seen after any step, before renormalization.
    pub max_trace_drift: f64,
    pub renormalizations: u64,
    pub steps: u64,
}

/// RK4 state with preallocated stage buffers.
struct Stepper<'a, D: ?Sized> {
    generator: Liouvillian,
    drive: &'a D,
    n: usize,
    k: [Vec<C64>; 4],
    tmp: Vec<C64>,
    ws: Workspace,
}

impl<'a, D: Drive + ?Sized> Stepper<'a, D> {
    fn new(model: &SystemModel, drive: &'a D) -> Self {
        let n = model.dim();
        let z = vec![C64::new(0.0, 0.0); n * n];
        Self {
            generator: Liouvillian::new(model),
            drive,
            n,
            k: [z.clone(), z.clone(), z.clone(), z.clone()],
            tmp: z,
            ws: Workspace::new(n),
        }
    }

    fn step(&mut self, rho: &mut [C64], t: f64, dt: f64) {
        let g0 = self.drive.value(t);
        let gm = self.drive.value(t + 0.5 * dt);
        let g1 = self.drive.value(t + dt);
        let Self {
            generator, k, tmp, ws, ..
        } = self;
        let [k1, k2, k3, k4] = k;

        generator.apply_into(g0, rho, k1, ws);
        axpy_into(tmp, rho, 0.5 * dt, k1);
        generator.apply_into(gm, tmp, k2, ws);
        axpy_into(tmp, rho, 0.5 * dt, k2);
        generator.apply_into(gm, tmp, k3, ws);
        axpy_into(tmp, rho, dt, k3);
        generator.apply_into(g1, tmp, k4, ws);

        let w = dt / 6.0;
        for i in 0..rho.len() {
            rho[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }

    /// Hermitizes in place; returns the trace drift and whether it renormalized.
    fn clean(&self, rho: &mut [C64]) -> (f64, bool) {
        let n = self.n;
        for i in 0..n {
            rho[i * n + i].im = 0.0;
            for j in (i + 1)..n {
                let avg = (rho[i * n + j] + rho[j * n + i].conj()) * 0.5;
                rho[i * n + j] = avg;
                rho[j * n + i] = avg.conj();
            }
        }
        let tr: f64 = (0..n).map(|i| rho[i * n + i].re).sum();
        let drift = (tr - 1.0).abs();
        if drift > RENORMALIZE_THRESHOLD {
            for z in rho.iter_mut() {
                *z /= tr;
            }
            (drift, true)
        } else {
            (drift, false)
        }
    }
}

fn axpy_into(out: &mut [C64], x: &[C64], a: f64, y: &[C64]) {
    for ((o, &xi), &yi) in out.iter_mut().zip(x).zip(y) {
        *o = xi + a * yi;
    }
}

/// A single classic RK4 step of `dρ/dt = L_{g(t)}[ρ]`, without Hermitization.
pub fn step_rk4<D: Drive + ?Sized>(
    model: &SystemModel,
    drive: &D,
    rho: &ComplexMatrix,
    t: f64,
    dt: f64,
) -> Result<ComplexMatrix> {
    if rho.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            left: model.dim(),
            right: rho.dim(),
        });
    }
    let mut stepper = Stepper::new(model, drive);
    let mut out = rho.clone();
    stepper.step(out.as_mut_slice(), t, dt);
    if out.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Unstable {
            t: t + dt,
            reason: "non-finite density matrix".into(),
        });
    }
    Ok(out)
}

/// Integrates from `cfg.t_start` to `cfg.t_end`, calling `observer` at step 0
/// and every `record_every` steps (the last call is at `t_end`).
///
/// After every step the state is Hermitized and, if the trace has drifted by
/// more than [`RENORMALIZE_THRESHOLD`], renormalized.
pub fn evolve<D, F>(
    model: &SystemModel,
    drive: &D,
    rho0: &DensityOperator,
    cfg: &IntegrationConfig,
    mut observer: F,
) -> Result<Evolution>
where
    D: Drive + ?Sized,
    F: FnMut(&Sample<'_>) -> Result<()>,
{
    if rho0.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            left: model.dim(),
            right: rho0.dim(),
        });
    }
    let steps = cfg.validate()?;
    let mut stepper = Stepper::new(model, drive);
    let mut rho = rho0.matrix().clone();
    let mut max_trace_drift = 0.0_f64;
    let mut renormalizations = 0;

    let record = |step: u64, rho: &ComplexMatrix, observer: &mut F| -> Result<()> {
        let t = if step == steps { cfg.t_end } else { cfg.time_at(step) };
        let min = min_eigenvalue(rho)?;
        if min < -POSITIVITY_TOLERANCE {
            return Err(Error::Unstable {
                t,
                reason: format!("smallest eigenvalue {min:e}"),
            });
        }
        observer(&Sample {
            step,
            t,
            rho,
            g: drive.value(t),
            dg_dt: drive.derivative(t),
        })
    };

    record(0, &rho, &mut observer)?;
    for step in 1..=steps {
        let t = cfg.time_at(step - 1);
        stepper.step(rho.as_mut_slice(), t, cfg.dt);
        if rho.as_slice().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Unstable {
                t: cfg.time_at(step),
                reason: "non-finite density matrix".into(),
            });
        }
        let (drift, renormalized) = stepper.clean(rho.as_mut_slice());
        max_trace_drift = max_trace_drift.max(drift);
        renormalizations += u64::from(renormalized);
        if step % cfg.record_every == 0 {
            record(step, &rho, &mut observer)?;
        }
    }

    let state = DensityOperator::new(rho).map_err(|e| Error::Unstable {
        t: cfg.t_end,
        reason: e.to_string(),
    })?;
    Ok(Evolution {
        state,
        max_trace_drift,
        renormalizations,
        steps,
    })
}
