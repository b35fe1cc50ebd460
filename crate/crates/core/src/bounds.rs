//! Closed-form synchronization bounds and verdict checks against traces.
//!
//! For phase diameter `D₀ = D(θ⁰) ∈ (0, π)`, frequency diameter `D(ν)`, and
//! the kernel factor `c_β = (2 − 2^β)/(1 − β)`:
//!
//! * homogeneous (`ν ≡ const`) dynamics obey the finite-time envelope
//!   `D(θ(t)) ≤ (D₀^α − ακ·(sin D₀/D₀)·c_β·t)^{1/α}`, hitting zero at
//!   `t_env = D₀^{1+α}/(ακ·sin(D₀)·c_β)·(1−β)/(2−2^β)`-form below;
//! * heterogeneous dynamics stay below `ε` eventually once
//!   `κ > κ*(ε) = max{D(ν)·D₀^{α+1}(1−β)/(ε·sin(D₀)(2−2^β)),
//!   D(ν)·D₀^α(1−β)/(sin(D₀)(2−2^β))}`, with the explicit decay
//!   `D(θ(t)) ≤ (D₀ − A)e^{−Bt} + A` and entry time `t*`.
//!
//! All diameters entering the formulas are grid-sampled (max − min of the
//! sampled fields), which is what the discrete dynamics can be held to.

use crate::error::{Error, Result};
use crate::integrator::Trace;
use crate::lattice::Field;
use crate::math;
use alloc::format;
use alloc::string::String;
use core::f64::consts::PI;

/// Grid-sampled initial phase diameter and frequency diameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioDiameters {
    pub d0: f64,
    pub d_nu: f64,
}

impl ScenarioDiameters {
    pub fn new(d0: f64, d_nu: f64) -> Result<Self> {
        if !(d0 >= 0.0 && d_nu >= 0.0) {
            return Err(Error::Domain("diameters must be nonnegative"));
        }
        Ok(Self { d0, d_nu })
    }

    /// Diameters of the sampled initial phase and frequency fields.
    pub fn from_fields(theta0: &Field, nu: &Field) -> Self {
        Self {
            d0: theta0.diameter(),
            d_nu: nu.diameter(),
        }
    }
}

fn check_params(d: &ScenarioDiameters, alpha: f64, beta: f64) -> Result<()> {
    if !(d.d0 > 0.0 && d.d0 < PI) {
        return Err(Error::Domain("initial diameter must lie in (0, \u{3c0})"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain("alpha must lie in (0, 1)"));
    }
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::Domain("beta must lie in [0, 1)"));
    }
    Ok(())
}

/// `(2 − 2^β)/(1 − β)` — the net contraction weight of the kernel rows.
#[inline]
fn kernel_gap(beta: f64) -> f64 {
    (2.0 - math::powf(2.0, beta)) / (1.0 - beta)
}

/// Finite-time synchronization envelope
/// `(D₀^α − ακ·(sin D₀/D₀)·(2−2^β)/(1−β)·t)^{1/α}`, truncated at zero.
pub fn sync_envelope(
    t: f64,
    d: &ScenarioDiameters,
    alpha: f64,
    beta: f64,
    kappa: f64,
) -> Result<f64> {
    check_params(d, alpha, beta)?;
    if !(kappa > 0.0) {
        return Err(Error::Domain("kappa must be positive"));
    }
    let radicand =
        math::powf(d.d0, alpha) - alpha * kappa * (math::sin(d.d0) / d.d0) * kernel_gap(beta) * t;
    if radicand <= 0.0 {
        Ok(0.0)
    } else {
        Ok(math::powf(radicand, 1.0 / alpha))
    }
}

/// Zero time of the envelope:
/// `(1−β)·D₀^{1+α} / (α·κ·sin(D₀)·(2−2^β))`.
pub fn t_envelope(d: &ScenarioDiameters, alpha: f64, beta: f64, kappa: f64) -> Result<f64> {
    check_params(d, alpha, beta)?;
    if !(kappa > 0.0) {
        return Err(Error::Domain("kappa must be positive"));
    }
    Ok((1.0 - beta) * math::powf(d.d0, 1.0 + alpha)
        / (alpha * kappa * math::sin(d.d0) * (2.0 - math::powf(2.0, beta))))
}

/// Critical coupling for practical synchronization to level `ε ∈ (0, 1)`:
///
/// `κ*(ε) = max{ D(ν)·D₀^{α+1}(1−β)/(ε·sin(D₀)(2−2^β)),
///               D(ν)·D₀^α(1−β)/(sin(D₀)(2−2^β)) }`.
///
/// Nonincreasing in `ε`, linear in `D(ν)`; zero when `D(ν) = 0`.
pub fn kappa_star(eps: f64, d: &ScenarioDiameters, alpha: f64, beta: f64) -> Result<f64> {
    check_params(d, alpha, beta)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain("eps must lie in (0, 1)"));
    }
    let denom = math::sin(d.d0) * (2.0 - math::powf(2.0, beta));
    let first = d.d_nu * math::powf(d.d0, alpha + 1.0) * (1.0 - beta) / (eps * denom);
    let second = d.d_nu * math::powf(d.d0, alpha) * (1.0 - beta) / denom;
    Ok(first.max(second))
}

/// The coupling level above which the diameter stays bounded by `D₀`
/// (hypothesis of the practical bound).
pub fn bounded_diameter_threshold(d: &ScenarioDiameters, alpha: f64, beta: f64) -> Result<f64> {
    check_params(d, alpha, beta)?;
    Ok(d.d_nu * math::powf(d.d0, alpha) * (1.0 - beta)
        / (math::sin(d.d0) * (2.0 - math::powf(2.0, beta))))
}

/// Exponential practical-synchronization bound `(D₀ − A)e^{−Bt} + A` with
/// asymptote `A = D(ν)·D₀^{α+1}(1−β)/(κ·sin(D₀)(2−2^β))` and rate
/// `B = κ·(sin D₀/D₀^{α+1})·(2−2^β)/(1−β)`.
///
/// Requires `κ` above [`bounded_diameter_threshold`]; returns
/// `(value_at_t, A)`.
pub fn practical_bound(
    t: f64,
    kappa: f64,
    d: &ScenarioDiameters,
    alpha: f64,
    beta: f64,
) -> Result<(f64, f64)> {
    check_params(d, alpha, beta)?;
    if !(kappa > bounded_diameter_threshold(d, alpha, beta)?) {
        return Err(Error::HypothesisNotMet(
            "kappa must exceed D(nu)*D0^alpha*(1-beta)/(sin(D0)*(2-2^beta))",
        ));
    }
    let a = d.d_nu * math::powf(d.d0, alpha + 1.0) * (1.0 - beta)
        / (kappa * math::sin(d.d0) * (2.0 - math::powf(2.0, beta)));
    let b = kappa * (math::sin(d.d0) / math::powf(d.d0, alpha + 1.0)) * kernel_gap(beta);
    Ok(((d.d0 - a) * math::exp(-b * t) + a, a))
}

/// Time by which the practical bound sinks below `ε`:
///
/// `t* = D₀^{α+1}(1−β)/(κ·sin(D₀)(2−2^β)) · ln((D₀ − A)/(ε − A))`,
///
/// or `0` outright when `D₀ < ε`. Requires `κ > κ*(ε)`.
pub fn t_star(eps: f64, kappa: f64, d: &ScenarioDiameters, alpha: f64, beta: f64) -> Result<f64> {
    let ks = kappa_star(eps, d, alpha, beta)?;
    if !(kappa > ks) {
        return Err(Error::HypothesisNotMet("kappa must exceed kappa_star(eps)"));
    }
    if d.d0 < eps {
        return Ok(0.0);
    }
    let (_, a) = practical_bound(0.0, kappa, d, alpha, beta)?;
    let prefactor = math::powf(d.d0, alpha + 1.0) * (1.0 - beta)
        / (kappa * math::sin(d.d0) * (2.0 - math::powf(2.0, beta)));
    Ok(prefactor * math::ln((d.d0 - a) / (eps - a)))
}

/// Which bound family a run is held to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    /// `ν ≡ const`: finite-time envelope and diameter contraction.
    Homogeneous,
    /// `ν` non-constant: practical synchronization thresholds.
    Heterogeneous,
}

/// Scenario summary needed to judge a trace.
#[derive(Debug, Clone, Copy)]
pub struct VerdictScenario {
    pub kind: ScenarioKind,
    pub diameters: ScenarioDiameters,
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
    /// Practical-synchronization level ε for κ*/t* (heterogeneous runs).
    pub practical_eps: f64,
    /// Both θ⁰ and ν are strictly increasing, so snapshots must stay so.
    pub check_ordering: bool,
}

/// Outcome of holding one trace to the analytic bounds. Envelope fields are
/// filled for homogeneous scenarios, the κ*-side fields for heterogeneous
/// ones; `None` marks "not applicable / not checked".
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub t_env: Option<f64>,
    /// `(count, worst margin)` of records with
    /// `diameter > envelope(t) + 0.02·D₀`; the margin is
    /// `max(diameter − envelope)` and may be negative.
    pub envelope_violations: Option<(usize, f64)>,
    pub kappa_star: Option<f64>,
    pub practical_a: Option<f64>,
    pub t_star: Option<f64>,
    pub contraction_ok: Option<bool>,
    pub ordering_ok: Option<bool>,
}

impl BoundReport {
    pub const CSV_HEADER: &'static str = "t_envelope,envelope_violations,envelope_worst_margin,kappa_star,practical_a,t_star,contraction_ok,ordering_ok";

    fn empty() -> Self {
        Self {
            t_env: None,
            envelope_violations: None,
            kappa_star: None,
            practical_a: None,
            t_star: None,
            contraction_ok: None,
            ordering_ok: None,
        }
    }

    /// Flat `key = value` block; absent fields are omitted.
    pub fn to_kv_block(&self) -> String {
        let mut s = String::new();
        if let Some(v) = self.t_env {
            s += &format!("t_envelope = {v}\n");
        }
        if let Some((c, m)) = self.envelope_violations {
            s += &format!("envelope_violations = {c}\nenvelope_worst_margin = {m}\n");
        }
        if let Some(v) = self.kappa_star {
            s += &format!("kappa_star = {v}\n");
        }
        if let Some(v) = self.practical_a {
            s += &format!("practical_a = {v}\n");
        }
        if let Some(v) = self.t_star {
            s += &format!("t_star = {v}\n");
        }
        if let Some(v) = self.contraction_ok {
            s += &format!("contraction_ok = {v}\n");
        }
        if let Some(v) = self.ordering_ok {
            s += &format!("ordering_ok = {v}\n");
        }
        s
    }

    /// One CSV row matching [`Self::CSV_HEADER`]; absent fields are empty.
    pub fn to_csv_row(&self) -> String {
        fn opt(v: Option<f64>) -> String {
            v.map(|x| format!("{x}")).unwrap_or_default()
        }
        fn optb(v: Option<bool>) -> String {
            v.map(|x| format!("{x}")).unwrap_or_default()
        }
        let (viol, margin) = match self.envelope_violations {
            Some((c, m)) => (format!("{c}"), format!("{m}")),
            None => (String::new(), String::new()),
        };
        format!(
            "{},{},{},{},{},{},{},{}",
            opt(self.t_env),
            viol,
            margin,
            opt(self.kappa_star),
            opt(self.practical_a),
            opt(self.t_star),
            optb(self.contraction_ok),
            optb(self.ordering_ok),
        )
    }
}

/// Envelope slack: `0.02·D₀` absorbs the δ-cutoff bias of the solver, which
/// weakens the singular force near collision.
pub const ENVELOPE_SLACK_FRACTION: f64 = 0.02;

/// Tolerance for the nonincreasing-diameter check.
pub const CONTRACTION_TOL: f64 = 1e-9;

/// The analytic side of a report: every closed-form quantity the scenario
/// family admits, nothing judged from a trace.
pub fn analytic_report(sc: &VerdictScenario) -> BoundReport {
    let mut report = BoundReport::empty();
    let d = &sc.diameters;
    match sc.kind {
        ScenarioKind::Homogeneous => {
            report.t_env = t_envelope(d, sc.alpha, sc.beta, sc.kappa).ok();
        }
        ScenarioKind::Heterogeneous => {
            report.kappa_star = kappa_star(sc.practical_eps, d, sc.alpha, sc.beta).ok();
            report.practical_a = practical_bound(0.0, sc.kappa, d, sc.alpha, sc.beta)
                .ok()
                .map(|(_, a)| a);
            report.t_star = t_star(sc.practical_eps, sc.kappa, d, sc.alpha, sc.beta).ok();
        }
    }
    report
}

/// Holds a finished trace to the bounds of its scenario family.
pub fn evaluate_verdicts(trace: &Trace, sc: &VerdictScenario) -> BoundReport {
    let mut report = analytic_report(sc);
    let d = &sc.diameters;
    if sc.kind == ScenarioKind::Homogeneous {
        let mut ok = true;
        for w in trace.records().windows(2) {
            if w[1].diameter > w[0].diameter + CONTRACTION_TOL {
                ok = false;
                break;
            }
        }
        report.contraction_ok = Some(ok);

        // constant initial data has a zero envelope and nothing to violate;
        // otherwise compare record by record
        let env = |t: f64| -> Option<f64> {
            if d.d0 == 0.0 {
                Some(0.0)
            } else {
                sync_envelope(t, d, sc.alpha, sc.beta, sc.kappa).ok()
            }
        };
        if env(0.0).is_some() {
            let slack = ENVELOPE_SLACK_FRACTION * d.d0;
            let mut count = 0usize;
            let mut worst = f64::NEG_INFINITY;
            for r in trace.records() {
                let e = env(r.t).unwrap();
                let margin = r.diameter - e;
                if margin > worst {
                    worst = margin;
                }
                if margin > slack {
                    count += 1;
                }
            }
            report.envelope_violations = Some((count, worst));
        }
    }
    if sc.check_ordering && !trace.snapshots().is_empty() {
        let mut ok = true;
        'outer: for (_, f) in trace.snapshots() {
            for w in f.values().windows(2) {
                if !(w[1] > w[0]) {
                    ok = false;
                    break 'outer;
                }
            }
        }
        report.ordering_ok = Some(ok);
    }
    report
}
