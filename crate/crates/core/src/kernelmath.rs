//! Scalar mathematics of the singular coupling function `h`, the power-law
//! weight `ψ`, their regularizations, and closed-form analytic constants.
//!
//! The coupling function is
//!
//! ```text
//! h(θ) = sin(θ) / |θ|ₒ^α   for |θ|ₒ ≠ 0,    h(θ) = 0 otherwise,
//! ```
//!
//! where `|θ|ₒ` is the absolute value of the principal representative of θ
//! modulo 2π (in `(−π, π]`) and `α ∈ [0, 1)`. `h` is odd, 2π-periodic,
//! bounded by 1, and (1−α)-Hölder continuous but not Lipschitz near the
//! origin — the mechanism behind finite-time phase sticking. Two
//! regularizations are used by the solver and the well-posedness machinery:
//!
//! * `h_ε(θ) = sin(θ)/(|θ|ₒ^α + ε)` (additive), and
//! * `h_δ(θ) = sin(θ)/max{|θ|ₒ, δ}^α` (small-angle cutoff, used in the
//!   discrete right-hand side).
//!
//! The interaction weight is `ψ(x, y) = 1/(|x − y|^β + ε)` with exact row
//! integrals on `[0, 1]`: `∫₀¹ |x − y|^{−β} dy = (x^{1−β} + (1−x)^{1−β})/(1−β)`,
//! maximal at `x = 1/2` (value `C_ψ = 2^β/(1−β)`) and minimal at the
//! boundary (value `1/(1−β)`).
//!
//! All functions are pure; none hold state.

use crate::error::{Error, Result};
use crate::math;
use core::f64::consts::{FRAC_PI_2, PI};

const TWO_PI: f64 = 2.0 * PI;

/// Wraps an angle to its principal representative in `(−π, π]`.
///
/// `wrap_principal(θ + 2πk) = wrap_principal(θ)` for every integer `k`;
/// in particular `wrap_principal(−π) = π` (half-open interval).
///
/// Panics on non-finite input.
pub fn wrap_principal(theta: f64) -> f64 {
    assert!(theta.is_finite(), "wrap_principal: angle must be finite");
    if -PI < theta && theta <= PI {
        return theta;
    }
    let mut r = theta - TWO_PI * math::floor(theta / TWO_PI); // r ∈ [0, 2π)
    if r > PI {
        r -= TWO_PI;
    }
    r
}

/// `|θ|ₒ`: absolute value of the principal representative of θ.
#[inline]
pub fn wrapped_abs(theta: f64) -> f64 {
    math::abs(wrap_principal(theta))
}

#[inline]
fn check_alpha(alpha: f64) {
    assert!((0.0..1.0).contains(&alpha), "alpha must lie in [0, 1)");
}

/// Singular coupling `h(θ) = sin(θ̄)/|θ̄|^α` with the removable value
/// `h = 0` at `|θ|ₒ = 0`. Odd, 2π-periodic, `|h| ≤ 1`.
pub fn coupling_h(theta: f64, alpha: f64) -> f64 {
    check_alpha(alpha);
    let w = wrap_principal(theta);
    if w == 0.0 {
        return 0.0;
    }
    math::sin(w) / math::powf(math::abs(w), alpha)
}

/// Additive regularization `h_ε(θ) = sin(θ̄)/(|θ̄|^α + ε)`.
///
/// Dominated by the singular kernel: `|h_ε| ≤ |h|` pointwise.
pub fn coupling_h_eps(theta: f64, alpha: f64, eps: f64) -> f64 {
    check_alpha(alpha);
    assert!(eps > 0.0, "coupling_h_eps: eps must be positive");
    let w = wrap_principal(theta);
    math::sin(w) / (math::powf(math::abs(w), alpha) + eps)
}

/// Small-angle cutoff `h_δ(θ) = sin(θ̄)/max{|θ̄|, δ}^α`.
///
/// Coincides with [`coupling_h`] when `|θ|ₒ ≥ δ`; the solver uses this form
/// in the discrete right-hand side.
pub fn coupling_h_delta(theta: f64, alpha: f64, delta: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&alpha), "alpha must lie in [0, 1)");
    assert!(delta > 0.0, "coupling_h_delta: delta must be positive");
    let w = wrap_principal(theta);
    let m = math::abs(w);
    math::sin(w) / math::powf(if m > delta { m } else { delta }, alpha)
}

/// Regularized interaction weight `ψ_ε(x, y) = 1/(|x − y|^β + ε)`.
///
/// Symmetric in `(x, y)` and nonincreasing in `|x − y|`. With `ε = 0` the
/// diagonal `x = y` is a genuine singularity; callers must use a cutoff
/// mode there (panics).
pub fn weight_psi(x: f64, y: f64, beta: f64, eps: f64) -> f64 {
    assert!((0.0..1.0).contains(&beta), "beta must lie in [0, 1)");
    assert!(eps >= 0.0, "weight_psi: eps must be nonnegative");
    let d = math::abs(x - y);
    assert!(
        d > 0.0 || eps > 0.0,
        "weight_psi: singular at x = y with eps = 0"
    );
    1.0 / (math::powf(d, beta) + eps)
}

/// Exact row integral `∫₀¹ |x − y|^{−β} dy = (x^{1−β} + (1−x)^{1−β})/(1−β)`
/// for `x ∈ [0, 1]`.
pub fn row_integral(x: f64, beta: f64) -> f64 {
    assert!((0.0..1.0).contains(&beta), "beta must lie in [0, 1)");
    assert!(
        (0.0..=1.0).contains(&x),
        "row_integral: x must lie in [0, 1]"
    );
    let q = 1.0 - beta;
    (math::powf(x, q) + math::powf(1.0 - x, q)) / q
}

/// Closed-form extremes of the weight's row integral and the one-sided
/// asymmetry integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConstants {
    /// `C_ψ = 2^β/(1−β)`, the maximal row integral (attained at `x = 1/2`).
    pub c_psi: f64,
    /// `1/(1−β)`, the minimal row integral (attained at the boundary).
    pub min_row: f64,
    /// `(2^β − 1)/(1−β)`, the one-sided difference integral `I_{a,b}` at
    /// the fully separated pair `(a, b) = (1, 0)`; the synchronization
    /// bounds are built from this constant.
    pub max_asym: f64,
}

/// Evaluates [`KernelConstants`] for `β ∈ [0, 1)`.
///
/// The identity `max_asym + min_row = c_psi` holds exactly in the closed
/// forms (up to rounding).
pub fn kernel_constants(beta: f64) -> Result<KernelConstants> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::Domain("beta must lie in [0, 1)"));
    }
    let q = 1.0 - beta;
    let p = math::powf(2.0, beta);
    Ok(KernelConstants {
        c_psi: p / q,
        min_row: 1.0 / q,
        max_asym: (p - 1.0) / q,
    })
}

/// Golden-section maximization of a unimodal function on `[a, b]`.
fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9; // (√5 − 1)/2
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let xm = 0.5 * (a + b);
    (xm, f(xm))
}

/// Bisection root of `f` on `[a, b]` to absolute tolerance `tol`.
/// Returns `None` unless the endpoints carry a strict sign change.
fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if !(fa * fb < 0.0) {
        return None;
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    Some(0.5 * (a + b))
}

/// Maximum of `h(·, α)` over `(0, π)`.
///
/// Found by golden-section search to tolerance 1e−12; the maximizer is the
/// unique root of `tan θ = θ/α` in `(0, π/2)` (and `θ = π/2` for `α = 0`,
/// where the maximum is 1).
pub fn h_bar(alpha: f64) -> f64 {
    h_bar_argmax(alpha).1
}

/// Location and value of the maximum of `h(·, α)` on `(0, π)`.
pub fn h_bar_argmax(alpha: f64) -> (f64, f64) {
    check_alpha(alpha);
    if alpha == 0.0 {
        return (FRAC_PI_2, 1.0);
    }
    golden_max(|t| coupling_h(t, alpha), 1e-9, PI - 1e-9, 1e-12)
}

/// Root `θ̃` of `2α sin θ = θ cos θ` in the open interval `(0, π/2)`,
/// located by bisection to absolute tolerance 1e−12.
///
/// Returns `None` when the equation has no interior sign change, which is
/// the case for `α ≥ 1/2` (there `2α sin θ − θ cos θ > 0` on all of
/// `(0, π/2)`).
pub fn tilde_theta(alpha: f64) -> Option<f64> {
    assert!(
        alpha > 0.0 && alpha < 1.0,
        "tilde_theta: alpha must lie in (0, 1)"
    );
    // divide the defining equation by θ: same roots on the open interval,
    // but the left bracket evaluates to the exact limit 2α − 1 instead of
    // drowning in cancellation
    let g = |t: f64| 2.0 * alpha * math::sin(t) / t - math::cos(t);
    bisect(g, 1e-9, FRAC_PI_2 - 1e-9, 1e-12)
}

/// Splitting `−h = Δ + Λ` on `[−2π, 2π]` with `Δ` monotonically
/// nonincreasing and `Λ` Lipschitz — the structure that makes `−h`
/// one-sided Lipschitz.
///
/// With `h̄ = max_{0<θ<π} h(θ)` and `θ̃` from [`tilde_theta`]:
///
/// ```text
///          θ ∈ [−2π, −2π+θ̃)   [−2π+θ̃, −θ̃)   [−θ̃, θ̃]   (θ̃, 2π−θ̃]   (2π−θ̃, 2π]
/// Δ(θ) =   2h̄ − h(θ)          h̄             −h(θ)      −h̄           −h(θ) − 2h̄
/// Λ(θ) =   −2h̄                −h̄ − h(θ)     0          h̄ − h(θ)     2h̄
/// ```
#[derive(Debug, Clone, Copy)]
pub struct HDecomposition {
    alpha: f64,
    theta_tilde: f64,
    h_bar: f64,
}

impl HDecomposition {
    /// Builds the table for `α ∈ (0, 1)`; fails with [`Error::NoRoot`] when
    /// the defining equation for `θ̃` has no interior root (observed for
    /// `α ≥ 1/2`).
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0 < alpha && alpha < 1.0) {
            return Err(Error::Domain("alpha must lie in (0, 1)"));
        }
        let theta_tilde = tilde_theta(alpha).ok_or(Error::NoRoot)?;
        Ok(Self {
            alpha,
            theta_tilde,
            h_bar: h_bar(alpha),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn theta_tilde(&self) -> f64 {
        self.theta_tilde
    }

    pub fn h_bar(&self) -> f64 {
        self.h_bar
    }

    /// `(Δ(θ), Λ(θ))` for `θ ∈ [−2π, 2π]`. `Λ` is derived as `−h − Δ`, so
    /// the splitting identity holds exactly at every evaluation point.
    pub fn split(&self, theta: f64) -> Result<(f64, f64)> {
        if !(-TWO_PI..=TWO_PI).contains(&theta) {
            return Err(Error::Domain("theta must lie in [-2\u{3c0}, 2\u{3c0}]"));
        }
        let h = coupling_h(theta, self.alpha);
        let (tt, hb) = (self.theta_tilde, self.h_bar);
        let delta = if theta < -TWO_PI + tt {
            2.0 * hb - h
        } else if theta < -tt {
            hb
        } else if theta <= tt {
            -h
        } else if theta <= TWO_PI - tt {
            -hb
        } else {
            -h - 2.0 * hb
        };
        Ok((delta, -h - delta))
    }
}

/// `(Δ(θ), Λ(θ))` for a one-off evaluation; see [`HDecomposition`].
pub fn delta_lambda(theta: f64, alpha: f64) -> Result<(f64, f64)> {
    HDecomposition::new(alpha)?.split(theta)
}

/// Dense deterministic pair family over `[−2π, 2π]`: roughly one million
/// (base, base ± offset) pairs with log-spaced offsets down to 1e−7.
fn dense_pairs(mut visit: impl FnMut(f64, f64)) {
    const BASES: usize = 2000;
    const OFFSETS: usize = 250;
    let lo = math::ln(1e-7);
    let hi = math::ln(2.0 * TWO_PI);
    for bi in 0..BASES {
        let t1 = -TWO_PI + TWO_PI * 2.0 * (bi as f64 + 0.5) / BASES as f64;
        for oi in 0..OFFSETS {
            let off = math::exp(lo + (hi - lo) * oi as f64 / (OFFSETS - 1) as f64);
            let up = t1 + off;
            if up <= TWO_PI {
                visit(t1, up);
            }
            let dn = t1 - off;
            if dn >= -TWO_PI {
                visit(t1, dn);
            }
        }
    }
}

/// Empirical (1−α)-Hölder constant of `h(·, α)` on `[−2π, 2π]`: 1.05 times
/// the largest difference quotient `|h(θ₁) − h(θ₂)|/|θ₁ − θ₂|^{1−α}` over a
/// dense million-pair sample. No closed form is available; the safety
/// factor makes the frozen estimate robust against unsampled pairs.
pub fn estimate_holder_constant(alpha: f64) -> f64 {
    check_alpha(alpha);
    let mut sup = 0.0f64;
    dense_pairs(|t1, t2| {
        let q = math::abs(coupling_h(t1, alpha) - coupling_h(t2, alpha))
            / math::powf(math::abs(t1 - t2), 1.0 - alpha);
        if q > sup {
            sup = q;
        }
    });
    1.05 * sup
}

/// Empirical one-sided Lipschitz constant of `−h(·, α)` on `[−2π, 2π]`:
/// 1.05 times the largest positive slope of `−h` over the same dense pair
/// family as [`estimate_holder_constant`].
pub fn estimate_one_sided_lipschitz(alpha: f64) -> f64 {
    check_alpha(alpha);
    let mut sup = 0.0f64;
    dense_pairs(|t1, t2| {
        let s = ((-coupling_h(t1, alpha)) - (-coupling_h(t2, alpha))) / (t1 - t2);
        if s > sup {
            sup = s;
        }
    });
    1.05 * sup.max(1.0)
}
