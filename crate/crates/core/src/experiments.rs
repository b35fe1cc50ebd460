//! Experiment orchestration: parameter sweeps over (α, β, κ), the
//! mesh-refinement (graph-limit) convergence study, and the concentration
//! (mollifier) limit.
//!
//! All experiments are deterministic: runs are assembled in axis order and
//! each simulation is internally sequential, so repeated executions yield
//! bitwise-identical tables (also under the `parallel` feature, which only
//! distributes independent runs).

use crate::bounds::ScenarioDiameters;
use crate::dynamics::{mean_drift_residual, RhsContext};
use crate::error::{Error, Result};
use crate::integrator::{run_simulation, OutputSpec, StepperParams, Trace};
use crate::lattice::{Field, Grid, KernelMatrix, KernelMode, NormKind, Profile};
use alloc::vec::Vec;

/// Full description of one simulation setup.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
    pub t_end: f64,
    pub theta_init: Profile,
    pub nu: Profile,
    pub kernel_mode: KernelMode,
    pub phase_delta: f64,
    pub stepper: StepperParams,
}

impl Scenario {
    /// Samples the fields and assembles the kernel matrix and context.
    pub fn build(&self) -> Result<(Field, RhsContext)> {
        let grid = Grid::new(self.n)?;
        let theta0 = Field::sample(&self.theta_init, grid)?;
        let nu = Field::sample(&self.nu, grid)?;
        let kernel = KernelMatrix::build(grid, self.beta, self.kernel_mode)?;
        let ctx = RhsContext::new(nu, kernel, self.kappa, self.alpha, self.phase_delta)?;
        Ok((theta0, ctx))
    }

    pub fn run(&self, out: &OutputSpec) -> Result<Trace> {
        let (theta0, ctx) = self.build()?;
        run_simulation(&theta0, &ctx, &self.stepper, self.t_end, out)
    }

    /// Grid-sampled diameters of the initial data, as used by every bound.
    pub fn diameters(&self) -> Result<ScenarioDiameters> {
        let grid = Grid::new(self.n)?;
        let theta0 = Field::sample(&self.theta_init, grid)?;
        let nu = Field::sample(&self.nu, grid)?;
        Ok(ScenarioDiameters::from_fields(&theta0, &nu))
    }
}

/// Map a closure over items, in parallel when the `parallel` feature is on.
/// Output order always matches input order.
fn map_runs<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Parameter axis of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Alpha,
    Beta,
    Kappa,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Alpha => "alpha",
            SweepAxis::Beta => "beta",
            SweepAxis::Kappa => "kappa",
        }
    }
}

/// One-axis sweep: the base scenario with `axis` replaced by each value,
/// reported at shared sample times.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub base: Scenario,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub sample_times: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub axis_value: f64,
    pub t: f64,
    pub diameter: f64,
}

/// Sweep rows plus one final-time mean-drift residual per axis value.
#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    pub drifts: Vec<f64>,
}

fn apply_axis(base: &Scenario, axis: SweepAxis, value: f64) -> Scenario {
    let mut s = base.clone();
    match axis {
        SweepAxis::Alpha => s.alpha = value,
        SweepAxis::Beta => s.beta = value,
        SweepAxis::Kappa => s.kappa = value,
    }
    s
}

pub fn run_sweep_full(spec: &SweepSpec) -> Result<SweepOutput> {
    if spec.values.is_empty() {
        return Err(Error::Domain("sweep needs at least one axis value"));
    }
    if !spec.values.windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::Domain("sweep values must be strictly increasing"));
    }
    if spec
        .sample_times
        .iter()
        .any(|&t| !(t >= 0.0) || t > spec.base.t_end)
    {
        return Err(Error::Domain("sample times must lie in [0, t_end]"));
    }
    let results = map_runs(&spec.values, |&v| -> Result<(Vec<SweepRow>, f64)> {
        let sc = apply_axis(&spec.base, spec.axis, v);
        let (theta0, ctx) = sc.build()?;
        let trace = run_simulation(&theta0, &ctx, &sc.stepper, sc.t_end, &OutputSpec::default())?;
        let rows = spec
            .sample_times
            .iter()
            .map(|&t| SweepRow {
                axis_value: v,
                t,
                diameter: trace.diameter_at(t),
            })
            .collect();
        let drift = mean_drift_residual(trace.final_time(), trace.final_state(), &theta0, ctx.nu());
        Ok((rows, drift))
    });
    let mut rows = Vec::new();
    let mut drifts = Vec::new();
    for r in results {
        let (mut rr, d) = r?;
        rows.append(&mut rr);
        drifts.push(d);
    }
    Ok(SweepOutput { rows, drifts })
}

/// Table of `(axis value, time, diameter)`; one simulation per value.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    run_sweep_full(spec).map(|o| o.rows)
}

/// One row of the refinement study at lattice size `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    /// sup over shared output times of ‖θⁿ − θ_ref‖₂ (step interpolants on
    /// the reference grid).
    pub sup_l2_error: f64,
    /// ‖θ⁰ⁿ − θ⁰_ref‖₂²
    pub init_err_sq: f64,
    /// ‖νⁿ − ν_ref‖₁
    pub nu_err: f64,
    /// ‖ψⁿ − ψ_ref‖₁ over the square (exact for step kernels)
    pub psi_err: f64,
    /// sup_l2_error² divided by the sum of the three data errors; a single
    /// stability constant should bound this across rows.
    pub bound_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceOutput {
    pub rows: Vec<ConvergenceRow>,
    /// Final-time mean-drift residual per coarse run, in `n_list` order.
    pub drifts: Vec<f64>,
    pub ref_drift: f64,
}

/// Exact L¹ distance between two cell-average step kernels whose grids nest.
fn kernel_l1_distance(coarse: &KernelMatrix, fine: &KernelMatrix) -> Result<f64> {
    let nc = coarse.grid().n();
    let nf = fine.grid().n();
    if !nf.is_multiple_of(nc) {
        return Err(Error::Domain(
            "coarse kernel grid must divide the fine grid",
        ));
    }
    let r = nf / nc;
    let mut acc = 0.0f64;
    for i in 0..nf {
        let ci = i / r;
        let frow = fine.row(i);
        let crow = coarse.row(ci);
        for (k, fv) in frow.iter().enumerate() {
            let d = crow[k / r] - fv;
            acc += if d < 0.0 { -d } else { d };
        }
    }
    Ok(acc / (nf * nf) as f64)
}

/// Self-convergence study against a high-resolution reference run.
///
/// Each `n` must divide `n_ref`; kernels must be cell averages so the
/// kernel error is a genuine L¹ distance of nested step functions. States
/// are compared at `output_times` via linear-in-t interpolation of the
/// traces, prolonged to the reference grid.
pub fn convergence_study_full(
    base: &Scenario,
    n_list: &[usize],
    n_ref: usize,
    t_end: f64,
    output_times: &[f64],
) -> Result<ConvergenceOutput> {
    if base.kernel_mode != KernelMode::ExactCellAverage {
        return Err(Error::Domain(
            "convergence study requires cell-average kernels",
        ));
    }
    if matches!(base.theta_init, Profile::Table(_)) || matches!(base.nu, Profile::Table(_)) {
        return Err(Error::Domain(
            "convergence study needs analytic profiles to resample across grids",
        ));
    }
    if n_list.is_empty() {
        return Err(Error::Domain("need at least one lattice size"));
    }
    for &n in n_list {
        if n < 2 || !n_ref.is_multiple_of(n) {
            return Err(Error::Domain("every n must be >= 2 and divide n_ref"));
        }
    }
    if !(t_end > 0.0) {
        return Err(Error::Domain("t_end must be positive"));
    }
    if output_times.iter().any(|&t| !(0.0..=t_end).contains(&t)) {
        return Err(Error::Domain("output times must lie in [0, t_end]"));
    }

    let snap = OutputSpec {
        snapshot_every: Some(1),
    };

    let mut sizes: Vec<usize> = Vec::with_capacity(n_list.len() + 1);
    sizes.extend_from_slice(n_list);
    sizes.push(n_ref);
    let runs = map_runs(&sizes, |&n| -> Result<(Field, RhsContext, Trace)> {
        let mut sc = base.clone();
        sc.n = n;
        sc.t_end = t_end;
        let (theta0, ctx) = sc.build()?;
        let trace = run_simulation(&theta0, &ctx, &sc.stepper, t_end, &snap)?;
        Ok((theta0, ctx, trace))
    });
    let mut runs: Vec<(Field, RhsContext, Trace)> = runs.into_iter().collect::<Result<_>>()?;
    let (ref_theta0, ref_ctx, ref_trace) = runs.pop().expect("reference run present");
    let ref_grid = ref_theta0.grid();
    let ref_drift = mean_drift_residual(
        ref_trace.final_time(),
        ref_trace.final_state(),
        &ref_theta0,
        ref_ctx.nu(),
    );

    let mut rows = Vec::with_capacity(n_list.len());
    let mut drifts = Vec::with_capacity(n_list.len());
    for (theta0, ctx, trace) in &runs {
        let mut sup = 0.0f64;
        for &t in output_times {
            let coarse = trace.state_at(t).expect("trace covers output times");
            let fine = ref_trace.state_at(t).expect("trace covers output times");
            let coarse_on_ref = coarse.prolong(ref_grid)?;
            let diff = Field::new(
                ref_grid,
                coarse_on_ref
                    .values()
                    .iter()
                    .zip(fine.values())
                    .map(|(a, b)| a - b)
                    .collect(),
            )?;
            let e = diff.norm(NormKind::L2);
            if e > sup {
                sup = e;
            }
        }
        let init_diff = Field::new(
            ref_grid,
            theta0
                .prolong(ref_grid)?
                .values()
                .iter()
                .zip(ref_theta0.values())
                .map(|(a, b)| a - b)
                .collect(),
        )?;
        let init_l2 = init_diff.norm(NormKind::L2);
        let init_err_sq = init_l2 * init_l2;
        let nu_diff = Field::new(
            ref_grid,
            ctx.nu()
                .prolong(ref_grid)?
                .values()
                .iter()
                .zip(ref_ctx.nu().values())
                .map(|(a, b)| a - b)
                .collect(),
        )?;
        let nu_err = nu_diff.norm(NormKind::L1);
        let psi_err = kernel_l1_distance(ctx.kernel(), ref_ctx.kernel())?;
        let denom = init_err_sq + nu_err + psi_err;
        rows.push(ConvergenceRow {
            n: theta0.grid().n(),
            sup_l2_error: sup,
            init_err_sq,
            nu_err,
            psi_err,
            bound_ratio: if denom > 0.0 { sup * sup / denom } else { 0.0 },
        });
        drifts.push(mean_drift_residual(
            trace.final_time(),
            trace.final_state(),
            theta0,
            ctx.nu(),
        ));
    }
    Ok(ConvergenceOutput {
        rows,
        drifts,
        ref_drift,
    })
}

pub fn convergence_study(
    base: &Scenario,
    n_list: &[usize],
    n_ref: usize,
    t_end: f64,
    output_times: &[f64],
) -> Result<Vec<ConvergenceRow>> {
    convergence_study_full(base, n_list, n_ref, t_end, output_times).map(|o| o.rows)
}

/// `count` uniform output times on `[0, t_end]` (endpoints included).
pub fn uniform_times(count: usize, t_end: f64) -> Vec<f64> {
    assert!(count >= 2, "need at least two output times");
    (0..count)
        .map(|i| t_end * i as f64 / (count - 1) as f64)
        .collect()
}

/// Concentration limit: for each width ε the interaction weight is the
/// unit-mass bump `η_ε`, and the run is compared at `t_end` against the
/// decoupled linear flow `θ⁰ + ν·t_end`. The L² error is restricted to the
/// interior window `[2·ε_max, 1 − 2·ε_max]`, where the truncated bump
/// carries full mass. Returns `(ε, interior L² error)` pairs in list order.
pub fn mollifier_experiment(eps_list: &[f64], base: &Scenario) -> Result<Vec<(f64, f64)>> {
    if eps_list.is_empty() {
        return Err(Error::Domain("need at least one mollifier width"));
    }
    if eps_list.iter().any(|&e| !(e > 0.0 && e <= 0.25)) {
        return Err(Error::Domain("mollifier widths must lie in (0, 0.25]"));
    }
    if !eps_list.windows(2).all(|w| w[1] < w[0]) {
        return Err(Error::Domain(
            "mollifier widths must be strictly decreasing",
        ));
    }
    let eps_max = eps_list[0];
    let (lo, hi) = (2.0 * eps_max, 1.0 - 2.0 * eps_max);

    let grid = Grid::new(base.n)?;
    let theta0 = Field::sample(&base.theta_init, grid)?;
    let nu = Field::sample(&base.nu, grid)?;
    let limit: Vec<f64> = theta0
        .values()
        .iter()
        .zip(nu.values())
        .map(|(a, b)| a + b * base.t_end)
        .collect();

    let errors = map_runs(eps_list, |&eps| -> Result<f64> {
        let mut sc = base.clone();
        sc.kernel_mode = KernelMode::Mollifier { eps };
        let trace = sc.run(&OutputSpec::default())?;
        let end = trace.final_state().values();
        let w = grid.cell_width();
        let mut acc = 0.0f64;
        for i in 0..grid.n() {
            let x = grid.point(i);
            if x >= lo && x <= hi {
                let d = end[i] - limit[i];
                acc += d * d * w;
            }
        }
        Ok(crate::math::sqrt(acc))
    });
    let mut out = Vec::with_capacity(eps_list.len());
    for (e, r) in eps_list.iter().zip(errors) {
        out.push((*e, r?));
    }
    Ok(out)
}
