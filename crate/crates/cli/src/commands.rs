//! Command dispatch: each command reads the validated config, runs the
//! corresponding experiment, and writes its artifact to the output path.

use crate::config::Config;
use crate::output;
use crate::scenario::{build_scenario, build_verdict};
use crate::CliError;
use skm_core::experiments::{
    convergence_study, mollifier_experiment, run_sweep, uniform_times, SweepSpec,
};
use skm_core::integrator::OutputSpec;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Sweep,
    Converge,
    Mollify,
    Bounds,
    Verify,
}

fn snapshot_spec(cfg: &Config) -> OutputSpec {
    OutputSpec {
        snapshot_every: if cfg.snapshot_every == 0 {
            None
        } else {
            Some(cfg.snapshot_every)
        },
    }
}

fn write(out: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(out, content)?;
    Ok(())
}

pub fn dispatch(cmd: Command, cfg: &Config, out: &Path) -> Result<(), CliError> {
    match cmd {
        Command::Simulate => {
            let sc = build_scenario(cfg)?;
            let verdict_sc = build_verdict(cfg, &sc)?;
            let trace = sc.run(&snapshot_spec(cfg))?;
            eprintln!(
                "simulate: n={} t_end={} steps={} final diameter={}",
                sc.n,
                sc.t_end,
                trace.records().len() - 1,
                trace.records().last().map(|r| r.diameter).unwrap_or(0.0)
            );
            write(out, &output::trace_csv(&trace, &verdict_sc))
        }
        Command::Sweep => {
            let base = build_scenario(cfg)?;
            let sample_times = if cfg.output_times.is_empty() {
                vec![1.0, 2.0, 4.0]
                    .into_iter()
                    .filter(|&t| t <= base.t_end)
                    .collect()
            } else {
                cfg.output_times.clone()
            };
            let spec = SweepSpec {
                base,
                axis: cfg.sweep_axis,
                values: cfg.sweep_values.clone(),
                sample_times,
            };
            let rows = run_sweep(&spec)?;
            eprintln!(
                "sweep: axis={} values={:?} rows={}",
                spec.axis.name(),
                spec.values,
                rows.len()
            );
            write(out, &output::sweep_csv(spec.axis.name(), &rows))
        }
        Command::Converge => {
            let mut base = build_scenario(cfg)?;
            base.kernel_mode = skm_core::lattice::KernelMode::ExactCellAverage;
            let times = if cfg.output_times.is_empty() {
                uniform_times(64, cfg.t_end)
            } else {
                cfg.output_times.clone()
            };
            let rows = convergence_study(&base, &cfg.n_list, cfg.n_ref, cfg.t_end, &times)?;
            for r in &rows {
                eprintln!(
                    "converge: n={} sup_l2={} ratio={}",
                    r.n, r.sup_l2_error, r.bound_ratio
                );
            }
            write(out, &output::convergence_csv(&rows))
        }
        Command::Mollify => {
            let base = build_scenario(cfg)?;
            let rows = mollifier_experiment(&cfg.mollify_eps, &base)?;
            for (eps, err) in &rows {
                eprintln!("mollify: eps={eps} interior_l2_error={err}");
            }
            write(out, &output::mollifier_csv(&rows))
        }
        Command::Bounds => {
            let sc = build_scenario(cfg)?;
            let verdict_sc = build_verdict(cfg, &sc)?;
            let report = skm_core::bounds::analytic_report(&verdict_sc);
            let text = output::bounds_text(&report, &verdict_sc);
            print!("{text}");
            write(out, &text)
        }
        Command::Verify => {
            let outcomes = skm_checks::suite::run_all();
            let mut text = String::new();
            let mut failed = 0usize;
            for c in &outcomes {
                let status = if c.pass { "PASS" } else { "FAIL" };
                let line = format!("[{status}] {} — {}", c.name, c.detail);
                println!("{line}");
                text.push_str(&line);
                text.push('\n');
                if !c.pass {
                    failed += 1;
                }
            }
            write(out, &text)?;
            if failed > 0 {
                return Err(CliError::Verification { failed });
            }
            Ok(())
        }
    }
}
