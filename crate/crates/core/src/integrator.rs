//! Adaptive implicit-midpoint time stepping.
//!
//! One step solves the implicit stage equation
//!
//! ```text
//! θⁿ⁺¹ = θⁿ + Δt·f((θⁿ + θⁿ⁺¹)/2)
//! ```
//!
//! by relaxed fixed-point (Picard) iteration
//!
//! ```text
//! θ⁽ᵏ⁺¹⁾ = (1 − ω)·θ⁽ᵏ⁾ + ω·[θⁿ + Δt·f((θⁿ + θ⁽ᵏ⁾)/2)],   θ⁽⁰⁾ = θⁿ,
//! ```
//!
//! until the max-norm update falls below `picard_tol`. A companion explicit
//! Euler step from the same state provides the local error estimate
//! `err = maxᵢ |θ_mid,i − θ_euler,i|`, and the next step size is
//!
//! ```text
//! Δt ← clamp(safety·Δt·(err_target/err)^{1/2})
//! ```
//!
//! capped to a ×`growth_cap` change per step and to `[dt_min, dt_max]`.
//! Steps are never rejected; stability is guarded by the clamps and, when
//! the fixed point fails to converge (stiffness), by halving `Δt` and
//! retrying down to the `dt_min` floor.

use crate::dynamics::OdeSystem;
use crate::error::{Error, Result};
use crate::lattice::Field;
use crate::math;
use alloc::vec::Vec;
use core::f64::consts::PI;

/// Knobs of the Picard solver and the step controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepperParams {
    /// Relaxation factor ω ∈ (0, 1].
    pub omega: f64,
    /// Max-norm stopping tolerance of the fixed-point iteration.
    pub picard_tol: f64,
    pub picard_max_iter: usize,
    /// Local-error target driving the step controller.
    pub err_target: f64,
    pub safety: f64,
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    /// Largest allowed per-step growth/shrink factor of dt.
    pub growth_cap: f64,
}

impl Default for StepperParams {
    fn default() -> Self {
        Self {
            omega: 0.7,
            picard_tol: 1e-10,
            picard_max_iter: 200,
            err_target: 1e-4,
            safety: 0.9,
            dt_init: 1e-3,
            dt_min: 1e-10,
            dt_max: 0.1,
            growth_cap: 5.0,
        }
    }
}

impl StepperParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega <= 1.0) {
            return Err(Error::Domain("omega must lie in (0, 1]"));
        }
        if !(self.picard_tol > 0.0) {
            return Err(Error::Domain("picard_tol must be positive"));
        }
        if self.picard_max_iter == 0 {
            return Err(Error::Domain("picard_max_iter must be at least 1"));
        }
        if !(self.err_target > 0.0) {
            return Err(Error::Domain("err_target must be positive"));
        }
        if !(self.safety > 0.0) {
            return Err(Error::Domain("safety must be positive"));
        }
        if !(self.dt_min > 0.0 && self.dt_min <= self.dt_init && self.dt_init <= self.dt_max) {
            return Err(Error::Domain("need 0 < dt_min <= dt_init <= dt_max"));
        }
        if !(self.growth_cap > 1.0) {
            return Err(Error::Domain("growth_cap must exceed 1"));
        }
        Ok(())
    }
}

/// One record per accepted step (plus one for the initial state, carrying
/// `dt = 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub t: f64,
    pub dt: f64,
    pub diameter: f64,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub picard_iters: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TraceFlags {
    /// The phase spread reached π at some record, where the raw max − min
    /// diameter stops being the wrapped-phase diameter.
    pub diameter_ge_pi: bool,
    /// At least one step had to halve dt after a fixed-point failure.
    pub picard_fallback: bool,
}

/// What to keep while stepping.
#[derive(Debug, Clone, Copy, Default)]
pub struct OutputSpec {
    /// `Some(k)`: store a full state snapshot at t = 0, after every k-th
    /// accepted step, and at the final time. `None`: keep only the final
    /// state.
    pub snapshot_every: Option<usize>,
}

/// Time series of one simulation run.
#[derive(Debug, Clone)]
pub struct Trace {
    records: Vec<TraceRecord>,
    snapshots: Vec<(f64, Field)>,
    final_state: Field,
    flags: TraceFlags,
}

impl Trace {
    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn snapshots(&self) -> &[(f64, Field)] {
        &self.snapshots
    }

    pub fn final_state(&self) -> &Field {
        &self.final_state
    }

    pub fn final_time(&self) -> f64 {
        self.records.last().map(|r| r.t).unwrap_or(0.0)
    }

    pub fn flags(&self) -> TraceFlags {
        self.flags
    }

    /// Diameter at an arbitrary time, linear in `t` between records;
    /// clamped to the first/last record outside the covered range.
    pub fn diameter_at(&self, t: f64) -> f64 {
        interp_records(&self.records, t, |r| r.diameter)
    }

    pub fn mean_at(&self, t: f64) -> f64 {
        interp_records(&self.records, t, |r| r.mean)
    }

    /// State at an arbitrary time, linear in `t` between stored snapshots.
    /// `None` unless snapshots bracket `t` (store with
    /// `snapshot_every = Some(1)` for study-grade interpolation).
    pub fn state_at(&self, t: f64) -> Option<Field> {
        if self.snapshots.is_empty() {
            return None;
        }
        if t <= self.snapshots[0].0 {
            return Some(self.snapshots[0].1.clone());
        }
        let last = self.snapshots.last().unwrap();
        if t >= last.0 {
            // only valid if the snapshots actually reach t
            return if last.0 >= t - 1e-12 {
                Some(last.1.clone())
            } else {
                None
            };
        }
        let k = self.snapshots.partition_point(|(st, _)| *st <= t);
        let (t0, f0) = &self.snapshots[k - 1];
        let (t1, f1) = &self.snapshots[k];
        let w = if t1 > t0 { (t - t0) / (t1 - t0) } else { 0.0 };
        let values: Vec<f64> = f0
            .values()
            .iter()
            .zip(f1.values())
            .map(|(a, b)| a + w * (b - a))
            .collect();
        Some(Field::new(f0.grid(), values).expect("interpolated state is finite"))
    }
}

fn interp_records(records: &[TraceRecord], t: f64, get: impl Fn(&TraceRecord) -> f64) -> f64 {
    assert!(!records.is_empty(), "empty trace");
    if t <= records[0].t {
        return get(&records[0]);
    }
    if t >= records[records.len() - 1].t {
        return get(&records[records.len() - 1]);
    }
    let k = records.partition_point(|r| r.t <= t);
    let (r0, r1) = (&records[k - 1], &records[k]);
    let w = if r1.t > r0.t {
        (t - r0.t) / (r1.t - r0.t)
    } else {
        0.0
    };
    get(r0) + w * (get(r1) - get(r0))
}

/// One explicit Euler step `θ + dt·f(θ)`.
pub fn euler_step(theta: &Field, dt: f64, sys: &impl OdeSystem) -> Field {
    assert!(dt > 0.0, "euler_step: dt must be positive");
    let f = sys.rhs(theta);
    let values: Vec<f64> = theta
        .values()
        .iter()
        .zip(f.values())
        .map(|(y, d)| y + dt * d)
        .collect();
    Field::new(theta.grid(), values).expect("euler step produced non-finite values")
}

/// One implicit-midpoint step solved by relaxed fixed-point iteration.
///
/// Returns the accepted state and the iteration count. Fails with
/// [`Error::PicardNotConverged`] when the budget runs out, or earlier when
/// the update norm grows for several consecutive iterations (a diverging
/// iteration never recovers here because the stage map has real spectrum).
pub fn midpoint_step_picard(
    theta: &Field,
    dt: f64,
    sys: &impl OdeSystem,
    p: &StepperParams,
) -> Result<(Field, usize)> {
    assert!(dt > 0.0, "midpoint_step_picard: dt must be positive");
    let n = theta.len();
    let base = theta.values();
    let mut cur: Vec<f64> = base.to_vec();
    let mut mid = cur.clone();
    let mut prev_change = f64::INFINITY;
    let mut growth_streak = 0usize;
    for iter in 1..=p.picard_max_iter {
        for i in 0..n {
            mid[i] = 0.5 * (base[i] + cur[i]);
        }
        let mid_field = Field::new(theta.grid(), mid.clone())
            .map_err(|_| Error::PicardNotConverged { iters: iter, dt })?;
        let f = sys.rhs(&mid_field);
        let fv = f.values();
        let mut change = 0.0f64;
        for i in 0..n {
            let next = (1.0 - p.omega) * cur[i] + p.omega * (base[i] + dt * fv[i]);
            let d = math::abs(next - cur[i]);
            if d > change {
                change = d;
            }
            cur[i] = next;
        }
        if change <= p.picard_tol {
            let out = Field::new(theta.grid(), cur)
                .map_err(|_| Error::PicardNotConverged { iters: iter, dt })?;
            return Ok((out, iter));
        }
        if !change.is_finite() {
            return Err(Error::PicardNotConverged { iters: iter, dt });
        }
        if change > prev_change {
            growth_streak += 1;
            if growth_streak >= 3 && iter >= 8 && change > 100.0 * p.picard_tol {
                return Err(Error::PicardNotConverged { iters: iter, dt });
            }
        } else {
            growth_streak = 0;
        }
        prev_change = change;
    }
    Err(Error::PicardNotConverged {
        iters: p.picard_max_iter,
        dt,
    })
}

/// Next step size from the local error estimate:
/// `safety·dt·(err_target/err)^{1/2}`, change capped to a factor
/// `growth_cap` either way, then clamped to `[dt_min, dt_max]`.
/// `err = 0` proposes the maximal growth.
pub fn propose_dt(err: f64, dt: f64, p: &StepperParams) -> f64 {
    assert!(
        dt > 0.0 && err >= 0.0,
        "propose_dt: need dt > 0 and err >= 0"
    );
    let raw = if err == 0.0 {
        dt * p.growth_cap
    } else {
        p.safety * dt * math::sqrt(p.err_target / err)
    };
    raw.clamp(dt / p.growth_cap, dt * p.growth_cap)
        .clamp(p.dt_min, p.dt_max)
}

/// Runs the adaptive loop from `θ₀` to exactly `t_end` (the last step is
/// truncated). Every accepted step appends a record; the first record holds
/// the initial state with `dt = 0`.
pub fn run_simulation(
    theta0: &Field,
    sys: &impl OdeSystem,
    p: &StepperParams,
    t_end: f64,
    out: &OutputSpec,
) -> Result<Trace> {
    p.validate()?;
    if !(t_end > 0.0) {
        return Err(Error::Domain("t_end must be positive"));
    }
    if let Some(k) = out.snapshot_every {
        if k == 0 {
            return Err(Error::Domain("snapshot_every must be at least 1"));
        }
    }

    let mut records = Vec::new();
    let mut snapshots = Vec::new();
    let mut flags = TraceFlags::default();
    let mut state = theta0.clone();
    let mut t = 0.0f64;
    let mut dt = p.dt_init;
    let mut steps = 0usize;

    let record_of = |t: f64, dt: f64, field: &Field, iters: usize| {
        let (mn, mx) = (field.min(), field.max());
        TraceRecord {
            t,
            dt,
            diameter: mx - mn,
            mean: field.mean(),
            min: mn,
            max: mx,
            picard_iters: iters,
        }
    };

    let initial = record_of(0.0, 0.0, &state, 0);
    if initial.diameter >= PI {
        flags.diameter_ge_pi = true;
    }
    records.push(initial);
    if out.snapshot_every.is_some() {
        snapshots.push((0.0, state.clone()));
    }

    while t < t_end {
        let truncated = t + dt >= t_end;
        let dt_step = if truncated { t_end - t } else { dt };

        // solve the implicit stage, halving dt on fixed-point failure
        let mut dt_try = dt_step;
        let (next, iters) = loop {
            match midpoint_step_picard(&state, dt_try, sys, p) {
                Ok(pair) => break pair,
                Err(Error::PicardNotConverged { .. }) => {
                    flags.picard_fallback = true;
                    dt_try *= 0.5;
                    if dt_try < p.dt_min {
                        return Err(Error::UnrecoverableStiffness { t, dt: dt_try });
                    }
                }
                Err(e) => return Err(e),
            }
        };

        let explicit = euler_step(&state, dt_try, sys);
        let mut err = 0.0f64;
        for (a, b) in next.values().iter().zip(explicit.values()) {
            let d = math::abs(a - b);
            if d > err {
                err = d;
            }
        }

        let t_new = if truncated && dt_try == dt_step {
            t_end
        } else {
            t + dt_try
        };
        let rec = record_of(t_new, dt_try, &next, iters);
        if rec.diameter >= PI {
            flags.diameter_ge_pi = true;
        }
        records.push(rec);
        steps += 1;
        if let Some(k) = out.snapshot_every {
            if steps.is_multiple_of(k) {
                snapshots.push((t_new, next.clone()));
            }
        }

        state = next;
        t = t_new;
        dt = propose_dt(err, dt_try, p);
    }

    if let Some((st, _)) = snapshots.last() {
        if *st < t_end {
            snapshots.push((t_end, state.clone()));
        }
    }

    Ok(Trace {
        records,
        snapshots,
        final_state: state,
        flags,
    })
}
