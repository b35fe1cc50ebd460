//! Uniform grid on `[0, 1]`, step-function fields, kernel matrices in three
//! construction modes, and the discrete norms/functionals.
//!
//! The grid holds `n` cells with left-endpoint sample points `x_i = i/n`,
//! `i = 0..n−1`; the right endpoint `x = 1` is excluded. A [`Field`] is a
//! step function: one value per cell, interpreted as constant there.
//!
//! Kernel matrices discretize the interaction weight `|x − y|^{−β}`:
//!
//! * [`KernelMode::PointwiseCutoff`] — `K[i][k] = max{|x_i − x_k|, ε}^{−β}`,
//! * [`KernelMode::ExactCellAverage`] — exact mean of `|x − y|^{−β}` over
//!   the cell pair `I_i × I_k` (closed form, see [`cell_average_entry`]),
//! * [`KernelMode::Mollifier`] — `K[i][k] = η_ε(x_i − x_k)` for the
//!   unit-mass bump `η(x) = Z·exp(−1/(1−x²))` on `|x| < 1`.
//!
//! Entries depend only on `|i − k|`, so matrices are built from one profile
//! per offset and are exactly symmetric.

use crate::error::{Error, Result};
use crate::math;
use crate::quad::adaptive_simpson;
use alloc::vec;
use alloc::vec::Vec;

/// Uniform partition of `[0, 1]` into `n` cells, sampled at left endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grid {
    n: usize,
}

impl Grid {
    /// A grid needs at least two cells.
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain("grid needs at least 2 cells"));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Sample point `x_i = i/n`.
    pub fn point(&self, i: usize) -> f64 {
        debug_assert!(i < self.n);
        i as f64 / self.n as f64
    }

    pub fn cell_width(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.point(i))
    }
}

/// Initial-data / frequency profiles that can be sampled onto a grid.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Sin,
    Cos,
    Constant(f64),
    Zero,
    /// Verbatim per-cell values; length must equal the grid size.
    Table(Vec<f64>),
}

/// Real-valued step function on a [`Grid`] (phases in radians, or natural
/// frequencies in radians per unit time).
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

/// Discrete functionals of a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    /// `(1/n) Σ |v_i|`
    L1,
    /// `((1/n) Σ v_i²)^{1/2}`
    L2,
    /// `(1/n) Σ v_i`
    Mean,
    /// `max v − min v`
    Diameter,
}

impl Field {
    /// Wraps per-cell values; every value must be finite and the length must
    /// match the grid.
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::Domain("field length must equal the grid size"));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::Domain("field values must be finite"));
        }
        Ok(Self { grid, values })
    }

    /// Samples an analytic profile at the grid points (tables are copied
    /// verbatim).
    pub fn sample(profile: &Profile, grid: Grid) -> Result<Self> {
        let values = match profile {
            Profile::Sin => grid.points().map(math::sin).collect(),
            Profile::Cos => grid.points().map(math::cos).collect(),
            Profile::Constant(c) => vec![*c; grid.n()],
            Profile::Zero => vec![0.0; grid.n()],
            Profile::Table(t) => t.clone(),
        };
        Self::new(grid, values)
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.n()],
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Fixed left-to-right summation keeps every norm bitwise reproducible.
    pub fn norm(&self, kind: NormKind) -> f64 {
        let n = self.values.len() as f64;
        match kind {
            NormKind::L1 => self.values.iter().map(|v| math::abs(*v)).sum::<f64>() / n,
            NormKind::L2 => math::sqrt(self.values.iter().map(|v| v * v).sum::<f64>() / n),
            NormKind::Mean => self.values.iter().sum::<f64>() / n,
            NormKind::Diameter => self.max() - self.min(),
        }
    }

    pub fn mean(&self) -> f64 {
        self.norm(NormKind::Mean)
    }

    pub fn diameter(&self) -> f64 {
        self.norm(NormKind::Diameter)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |a, &b| a.min(b))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
    }

    /// Step-function refinement onto a finer grid whose size is a multiple
    /// of this field's; every fine cell inherits the value of the coarse
    /// cell containing it, so all `(1/n)`-weighted norms are preserved
    /// exactly.
    pub fn prolong(&self, fine: Grid) -> Result<Field> {
        let nc = self.grid.n();
        let nf = fine.n();
        if !nf.is_multiple_of(nc) {
            return Err(Error::Domain(
                "coarse grid size must divide the fine grid size",
            ));
        }
        let r = nf / nc;
        let mut values = Vec::with_capacity(nf);
        for i in 0..nf {
            values.push(self.values[i / r]);
        }
        Ok(Field { grid: fine, values })
    }
}

/// Construction modes for the interaction-weight matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelMode {
    /// `K[i][k] = max{|x_i − x_k|, ε}^{−β}`; the diagonal value `ε^{−β}` is
    /// inert because the coupling sum skips `j = i`.
    PointwiseCutoff { eps: f64 },
    /// `K[i][k] = n² ∬_{I_i×I_k} |x−y|^{−β} dx dy`, evaluated in closed form.
    ExactCellAverage,
    /// `K[i][k] = η_ε(x_i − x_k)` with the unit-mass bump profile.
    Mollifier { eps: f64 },
}

/// Antiderivative-of-antiderivative of `s^{−β}`: `G(s) = s^{2−β}/((1−β)(2−β))`,
/// so `G'' = s^{−β}` and cell-pair integrals are second differences of `G`.
#[inline]
fn g2(s: f64, beta: f64) -> f64 {
    math::powf(s, 2.0 - beta) / ((1.0 - beta) * (2.0 - beta))
}

/// Exact average of `|x − y|^{−β}` over the cell pair `I_i × I_k` of an
/// `n`-cell grid. With `w = 1/n` and gap `g = (|i−k|−1)·w`:
///
/// * `i = k`: `n² · 2G(w)`
/// * `i ≠ k`: `n² · (G(g+2w) − 2G(g+w) + G(g))`
pub fn cell_average_entry(i: usize, k: usize, n: usize, beta: f64) -> f64 {
    assert!(i < n && k < n, "cell index out of range");
    assert!((0.0..1.0).contains(&beta), "beta must lie in [0, 1)");
    let n2 = (n * n) as f64;
    let w = 1.0 / n as f64;
    if i == k {
        return n2 * 2.0 * g2(w, beta);
    }
    let m = i.abs_diff(k);
    let g = (m - 1) as f64 * w;
    n2 * (g2(g + 2.0 * w, beta) - 2.0 * g2(g + w, beta) + g2(g, beta))
}

/// Unit-mass bump `η(x) = Z·exp(−1/(1−x²))` on `|x| < 1`, zero outside.
fn bump(x: f64, z: f64) -> f64 {
    if math::abs(x) >= 1.0 {
        0.0
    } else {
        z * math::exp(-1.0 / (1.0 - x * x))
    }
}

/// Normalizer `Z` with `∫ η = 1`, computed by adaptive quadrature.
fn bump_normalizer() -> f64 {
    let mass = adaptive_simpson(&|x: f64| math::exp(-1.0 / (1.0 - x * x)), -1.0, 1.0, 1e-13);
    1.0 / mass
}

/// Dense symmetric `n × n` interaction-weight matrix plus the quadrature
/// weight `1/n` carried by the coupling sum.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    grid: Grid,
    mode: KernelMode,
    entries: Vec<f64>,
    quad_weight: f64,
}

impl KernelMatrix {
    pub fn build(grid: Grid, beta: f64, mode: KernelMode) -> Result<Self> {
        if !(0.0..1.0).contains(&beta) {
            return Err(Error::Domain("beta must lie in [0, 1)"));
        }
        let n = grid.n();
        let w = grid.cell_width();
        // entries depend only on |i − k|; build the offset profile first
        let by_offset: Vec<f64> = match mode {
            KernelMode::PointwiseCutoff { eps } => {
                if eps <= 0.0 {
                    return Err(Error::Domain("cutoff eps must be positive"));
                }
                (0..n)
                    .map(|m| {
                        let d = m as f64 * w;
                        math::powf(if d > eps { d } else { eps }, -beta)
                    })
                    .collect()
            }
            KernelMode::ExactCellAverage => {
                (0..n).map(|m| cell_average_entry(0, m, n, beta)).collect()
            }
            KernelMode::Mollifier { eps } => {
                if eps <= 0.0 {
                    return Err(Error::Domain("mollifier eps must be positive"));
                }
                let z = bump_normalizer();
                (0..n).map(|m| bump(m as f64 * w / eps, z) / eps).collect()
            }
        };
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                entries[i * n + k] = by_offset[i.abs_diff(k)];
            }
        }
        Ok(Self {
            grid,
            mode,
            entries,
            quad_weight: w,
        })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn mode(&self) -> KernelMode {
        self.mode
    }

    pub fn quad_weight(&self) -> f64 {
        self.quad_weight
    }

    pub fn entry(&self, i: usize, k: usize) -> f64 {
        let n = self.grid.n();
        assert!(i < n && k < n, "kernel index out of range");
        self.entries[i * n + k]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.grid.n();
        &self.entries[i * n..(i + 1) * n]
    }

    /// `quad_weight · Σ_k K[i][k]`, optionally skipping the diagonal — the
    /// discrete stand-in for the row integral `∫ ψ(x_i, y) dy`.
    pub fn row_quasi_integral(&self, i: usize, skip_diagonal: bool) -> f64 {
        let mut s = 0.0;
        for (k, v) in self.row(i).iter().enumerate() {
            if skip_diagonal && k == i {
                continue;
            }
            s += v;
        }
        self.quad_weight * s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernelmath::row_integral;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn grid_examples() {
        let g = Grid::new(2).unwrap();
        assert_eq!(g.points().collect::<Vec<_>>(), vec![0.0, 0.5]);
        let g = Grid::new(512).unwrap();
        assert_eq!(g.n(), 512);
        close(g.point(511), 511.0 / 512.0, 0.0);
        close(Grid::new(4).unwrap().cell_width(), 0.25, 0.0);
        assert!(Grid::new(1).is_err());
    }

    #[test]
    fn grid_points_strictly_increasing_with_exact_spacing() {
        let g = Grid::new(97).unwrap();
        let pts: Vec<f64> = g.points().collect();
        assert_eq!(pts[0], 0.0);
        for w in pts.windows(2) {
            assert!(w[1] > w[0]);
            close(w[1] - w[0], g.cell_width(), 1e-16);
        }
        close(pts[96], 96.0 / 97.0, 0.0);
    }

    #[test]
    fn sampling_examples() {
        let g = Grid::new(2).unwrap();
        let z = Field::sample(&Profile::Zero, g).unwrap();
        assert_eq!(z.values(), &[0.0, 0.0]);
        let s = Field::sample(&Profile::Sin, g).unwrap();
        close(s.values()[0], 0.0, 0.0);
        close(s.values()[1], 0.479425538604203, 1e-14);
        let g4 = Grid::new(4).unwrap();
        let c = Field::sample(&Profile::Constant(0.3), g4).unwrap();
        assert_eq!(c.values(), &[0.3, 0.3, 0.3, 0.3]);
        assert!(Field::sample(&Profile::Table(vec![1.0]), g4).is_err());
    }

    #[test]
    fn field_rejects_non_finite() {
        let g = Grid::new(2).unwrap();
        assert!(Field::new(g, vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn cell_average_examples() {
        for n in [2usize, 5, 16] {
            for i in 0..n {
                for k in 0..n {
                    close(cell_average_entry(i, k, n, 0.0), 1.0, 1e-12);
                }
            }
        }
        close(cell_average_entry(0, 0, 2, 0.5), 3.771236166328253, 1e-12);
        close(cell_average_entry(0, 1, 2, 0.5), 1.56209716700508, 1e-12);
    }

    #[test]
    fn pointwise_cutoff_small_example() {
        let g = Grid::new(2).unwrap();
        let k = KernelMatrix::build(g, 0.5, KernelMode::PointwiseCutoff { eps: 1e-9 }).unwrap();
        close(k.entry(0, 1), core::f64::consts::SQRT_2, 1e-12);
        close(k.entry(1, 0), core::f64::consts::SQRT_2, 1e-12);
        close(k.entry(0, 0), 1e-9f64.powf(-0.5), 1e-4);
    }

    #[test]
    fn cell_average_beta_zero_is_all_ones() {
        let g = Grid::new(7).unwrap();
        let k = KernelMatrix::build(g, 0.0, KernelMode::ExactCellAverage).unwrap();
        for i in 0..7 {
            for j in 0..7 {
                close(k.entry(i, j), 1.0, 1e-12);
            }
        }
    }

    #[test]
    fn matrices_are_symmetric_finite_nonnegative() {
        let g = Grid::new(33).unwrap();
        for mode in [
            KernelMode::PointwiseCutoff { eps: 1e-6 },
            KernelMode::ExactCellAverage,
            KernelMode::Mollifier { eps: 0.2 },
        ] {
            let k = KernelMatrix::build(g, 0.4, mode).unwrap();
            for i in 0..33 {
                for j in 0..33 {
                    let e = k.entry(i, j);
                    assert!(e.is_finite() && e >= 0.0);
                    assert_eq!(e, k.entry(j, i));
                }
            }
        }
    }

    #[test]
    fn mollifier_rows_have_unit_mass_in_the_interior() {
        // (1/n) Σ_k η_ε(x_i − x_k) is a Riemann sum of ∫η_ε = 1 away from
        // the boundary
        let g = Grid::new(256).unwrap();
        let k = KernelMatrix::build(g, 0.0, KernelMode::Mollifier { eps: 0.1 }).unwrap();
        let mid = k.row_quasi_integral(128, false);
        close(mid, 1.0, 1e-3);
    }

    #[test]
    fn cell_average_rows_match_integrated_row_integral() {
        // quad_weight·Σ_k K[i][k] equals n·∫_{I_i} (∫ ψ dy) dx exactly;
        // compare against the closed-form antiderivative of the row integral
        let n = 64;
        let g = Grid::new(n).unwrap();
        let beta = 0.5;
        let k = KernelMatrix::build(g, beta, KernelMode::ExactCellAverage).unwrap();
        // ∫ row_integral(x) dx over [a, b], exact:
        // ∫ (x^{1−β} + (1−x)^{1−β})/(1−β) dx
        //   = (x^{2−β} − (1−x)^{2−β}) / ((1−β)(2−β))
        let anti = |x: f64| {
            (x.powf(2.0 - beta) - (1.0 - x).powf(2.0 - beta)) / ((1.0 - beta) * (2.0 - beta))
        };
        for &i in &[0usize, 1, 17, 31, 63] {
            let a = i as f64 / n as f64;
            let b = (i + 1) as f64 / n as f64;
            let expect = n as f64 * (anti(b) - anti(a));
            close(k.row_quasi_integral(i, false), expect, 1e-10);
        }
    }

    #[test]
    fn norm_examples() {
        let g = Grid::new(3).unwrap();
        let c = Field::constant(g, -0.7);
        close(c.norm(NormKind::L2), 0.7, 1e-15);
        let f = Field::new(g, vec![0.1, 0.5, 0.3]).unwrap();
        close(f.norm(NormKind::Diameter), 0.4, 1e-15);
        close(f.norm(NormKind::Mean), 0.3, 1e-15);
        close(f.norm(NormKind::L1), 0.3, 1e-15);

        let g = Grid::new(4096).unwrap();
        let s = Field::sample(&Profile::Sin, g).unwrap();
        // ∫₀¹ sin²x dx = 1/2 − sin(2)/4
        let exact = (0.5 - (2.0f64).sin() / 4.0).sqrt();
        close(s.norm(NormKind::L2), exact, 1e-4);
    }

    #[test]
    fn prolong_examples() {
        let g2 = Grid::new(2).unwrap();
        let g4 = Grid::new(4).unwrap();
        let f = Field::new(g2, vec![1.5, -0.25]).unwrap();
        let p = f.prolong(g4).unwrap();
        assert_eq!(p.values(), &[1.5, 1.5, -0.25, -0.25]);
        close(p.norm(NormKind::L2), f.norm(NormKind::L2), 1e-16);
        let same = f.prolong(g2).unwrap();
        assert_eq!(same.values(), f.values());
        let g3 = Grid::new(3).unwrap();
        assert!(f.prolong(g3).is_err());
    }

    #[test]
    fn pointwise_and_cell_average_rows_converge_to_row_integral() {
        let beta = 0.4;
        for &x in &[0.25f64, 0.5] {
            let exact = row_integral(x, beta);
            let mut prev_err = f64::INFINITY;
            for &n in &[64usize, 1024] {
                let g = Grid::new(n).unwrap();
                let i = (x * n as f64) as usize;
                let pc = KernelMatrix::build(g, beta, KernelMode::PointwiseCutoff { eps: 1e-9 })
                    .unwrap();
                let err = (pc.row_quasi_integral(i, true) - exact).abs();
                assert!(err < prev_err, "cutoff row error did not shrink at n={n}");
                prev_err = err;
            }
            let mut prev_err = f64::INFINITY;
            for &n in &[64usize, 1024] {
                let g = Grid::new(n).unwrap();
                let i = (x * n as f64) as usize;
                let ca = KernelMatrix::build(g, beta, KernelMode::ExactCellAverage).unwrap();
                let err = (ca.row_quasi_integral(i, false) - exact).abs();
                assert!(
                    err < prev_err,
                    "cell-average row error did not shrink at n={n}"
                );
                prev_err = err;
            }
        }
    }

    #[test]
    fn shifted_row_l1_differences_shrink_with_the_shift() {
        // discrete analogue of kernel translation continuity: the largest
        // (1/n)Σ_k |K[i+s][k] − K[i][k]| decreases as s·cell_width → 0
        let n = 256;
        let g = Grid::new(n).unwrap();
        for &eps in &[1e-2f64, 1e-4] {
            let k = KernelMatrix::build(g, 0.5, KernelMode::PointwiseCutoff { eps }).unwrap();
            let t = |s: usize| -> f64 {
                let mut worst = 0.0f64;
                for i in 0..n - s {
                    let mut acc = 0.0;
                    for kk in 0..n {
                        acc += (k.entry(i + s, kk) - k.entry(i, kk)).abs();
                    }
                    worst = worst.max(acc / n as f64);
                }
                worst
            };
            let shifts = [64usize, 32, 16, 8, 4, 2, 1];
            let vals: Vec<f64> = shifts.iter().map(|&s| t(s)).collect();
            for w in vals.windows(2) {
                assert!(w[1] < w[0], "shift differences not decreasing: {vals:?}");
            }
        }
    }
}
