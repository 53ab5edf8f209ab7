//! Piecewise-linear function spaces and the Gauss–Kuzmin transfer operator.
//!
//! Functions on `[0, 1]` are stored by their values on `N + 1` uniform nodes
//! and evaluated by linear interpolation. On that class the operator
//!
//! ```text
//! (U f)(x) = sum_{i >= 1} P_i(x) f(1/(x + i)),   P_i(x) = (x + 1)/((x + i)(x + i + 1))
//! ```
//!
//! and the distribution recursion
//!
//! ```text
//! F_{n+1}(x) = sum_{i >= 1} F(1/i) - F(1/(x + i))
//! ```
//!
//! are evaluated with interpolation at every preimage. For `i >= N` all
//! preimages `1/(x + i)` lie in the first cell, where `f` is affine, so those
//! terms are summed in closed form; this is exact for the grid representation
//! and turns an `O(N * i_max)` application into `O(N * min(N, i_max))`.

use std::f64::consts::LN_2;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rscc::{p_kernel, p_kernel_tail};

/// Default number of grid subintervals.
pub const DEFAULT_GRID: usize = 4096;
/// Default digit truncation.
pub const DEFAULT_I_MAX: u64 = 10_000;
/// `iterate_u` stops once the error falls below this.
pub const STOP_ERROR: f64 = 1e-13;
/// Successive ratios are only formed above this previous error.
pub const RATIO_FLOOR: f64 = 1e-14;
/// Largest monotonicity repair `gk_step` will apply silently.
pub const MAX_CLAMP: f64 = 1e-6;
/// Error window harvested by [`spectral_gap_estimate`].
pub const RATE_WINDOW: (f64, f64) = (1e-10, 1e-2);
/// The window's lower edge is raised to this multiple of the smallest error
/// reached, keeping the approach to the discretization floor out of the median.
pub const FLOOR_MARGIN: f64 = 100.0;

/// A function on `[0, 1]` given by its values at `N + 1` uniform nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::domain("a grid function needs at least two nodes"));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(format!("non-finite grid value {v}")));
        }
        Ok(GridFunction { values })
    }

    /// Samples `f` at the nodes of a grid with `n` subintervals.
    pub fn from_fn<F: Fn(f64) -> f64>(n: usize, f: F) -> Self {
        assert!(n >= 1, "grid needs at least one subinterval");
        let values = (0..=n).map(|k| f(node(k, n))).collect();
        GridFunction { values }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        Self::from_fn(n, |_| c)
    }

    /// Number of subintervals.
    #[inline]
    pub fn n(&self) -> usize {
        self.values.len() - 1
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Abscissa of node `k`.
    #[inline]
    pub fn node(&self, k: usize) -> f64 {
        node(k, self.n())
    }

    /// Linear interpolation; `x` is clamped to `[0, 1]`.
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.n();
        let pos = x.clamp(0.0, 1.0) * n as f64;
        let k = (pos as usize).min(n - 1);
        let t = pos - k as f64;
        let (a, b) = (self.values[k], self.values[k + 1]);
        a + t * (b - a)
    }

    /// Slope of the cell `[x_k, x_{k+1}]`.
    #[inline]
    pub fn cell_slope(&self, k: usize) -> f64 {
        (self.values[k + 1] - self.values[k]) * self.n() as f64
    }

    pub fn map_nodes<F: Fn(f64, f64) -> f64>(&self, f: F) -> Self {
        let n = self.n();
        GridFunction {
            values: self
                .values
                .iter()
                .enumerate()
                .map(|(k, &v)| f(node(k, n), v))
                .collect(),
        }
    }

    /// `alpha * self + beta * other` on a common grid.
    pub fn linear_combination(&self, alpha: f64, other: &GridFunction, beta: f64) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(GridFunction {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        })
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest nodal deviation from a constant.
    pub fn sup_distance_to(&self, c: f64) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max((v - c).abs()))
    }

    pub fn sup_distance(&self, other: &GridFunction) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Lebesgue integral over `[0, 1]` (trapezoid rule, exact for this class).
    pub fn integral(&self) -> f64 {
        let h = 1.0 / self.n() as f64;
        let inner: f64 = self.values[1..self.n()].iter().sum();
        h * (inner + 0.5 * (self.values[0] + self.values[self.n()]))
    }

    /// `∫_0^x f(t)/(t + 1) dt`, exact for the piecewise-linear interpolant.
    pub fn integral_against_gauss_weight(&self, x: f64) -> f64 {
        let n = self.n();
        let x = x.clamp(0.0, 1.0);
        let h = 1.0 / n as f64;
        let mut total = 0.0;
        for k in 0..n {
            let left = node(k, n);
            if left >= x {
                break;
            }
            let right = node(k + 1, n).min(x);
            let slope = self.cell_slope(k);
            // f(t) = alpha + slope * (t + 1) on the cell
            let alpha = self.values[k] - slope * (1.0 + left);
            total += alpha * ((right - left) / (1.0 + left)).ln_1p() + slope * (right - left);
            debug_assert!(right - left <= h * (1.0 + 1e-12));
        }
        total
    }

    fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.n() != other.n() {
            return Err(Error::domain(format!(
                "grid mismatch: {} vs {} subintervals",
                self.n(),
                other.n()
            )));
        }
        Ok(())
    }
}

#[inline]
fn node(k: usize, n: usize) -> f64 {
    k as f64 / n as f64
}

/// A nondecreasing grid function with `F(0) = 0` and `F(1) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionFunction(GridFunction);

impl DistributionFunction {
    /// Validates monotonicity and endpoint values (within `1e-12`, then
    /// pinned exactly).
    pub fn new(f: GridFunction) -> Result<Self> {
        let n = f.n();
        let mut values = f.into_values();
        if values[0].abs() > 1e-12 || (values[n] - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "distribution endpoints are {} and {}, expected 0 and 1",
                values[0], values[n]
            )));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::domain("distribution function is not nondecreasing"));
        }
        values[0] = 0.0;
        values[n] = 1.0;
        Ok(DistributionFunction(GridFunction { values }))
    }

    pub fn from_fn<F: Fn(f64) -> f64>(n: usize, f: F) -> Result<Self> {
        Self::new(GridFunction::from_fn(n, f))
    }

    /// The Gauss distribution `log2(1 + x)` sampled on the grid.
    pub fn gauss(n: usize) -> Self {
        DistributionFunction(GridFunction::from_fn(n, gauss_cdf))
    }

    #[inline]
    pub fn grid(&self) -> &GridFunction {
        &self.0
    }

    pub fn into_grid(self) -> GridFunction {
        self.0
    }

    /// Largest nodal distance to the Gauss distribution.
    pub fn sup_error(&self) -> f64 {
        let n = self.0.n();
        self.0
            .values
            .iter()
            .enumerate()
            .fold(0.0, |m, (k, &v)| m.max((v - gauss_cdf(node(k, n))).abs()))
    }
}

/// `log(1 + x) / log 2`.
#[inline]
pub fn gauss_cdf(x: f64) -> f64 {
    x.ln_1p() / LN_2
}

/// One row of a convergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub sup_error: f64,
    /// `sup_error(n) / sup_error(n - 1)` when the previous error exceeds [`RATIO_FLOOR`].
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn push(&mut self, n: usize, sup_error: f64) {
        let ratio = self
            .rows
            .last()
            .filter(|prev| prev.sup_error > RATIO_FLOOR)
            .map(|prev| sup_error / prev.sup_error);
        self.rows.push(ConvergenceRow {
            n,
            sup_error,
            ratio,
        });
    }

    pub fn last_error(&self) -> Option<f64> {
        self.rows.last().map(|r| r.sup_error)
    }

    /// Smallest error in the table.
    pub fn floor(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.sup_error)
            .fold(f64::INFINITY, f64::min)
    }

    /// Ratios of rows whose previous error lies in `[lo, hi]`, stopping at the
    /// first row that fails to decrease.
    pub fn ratios_in_window(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for pair in self.rows.windows(2) {
            let (prev, cur) = (pair[0], pair[1]);
            if cur.sup_error >= prev.sup_error {
                if prev.sup_error <= hi {
                    break;
                }
                continue;
            }
            if prev.sup_error >= lo && prev.sup_error <= hi && cur.sup_error >= lo {
                if let Some(r) = cur.ratio {
                    out.push(r);
                }
            }
        }
        out
    }
}

/// `psi(k + x) - psi(k)` for `k >= 1`, `x >= 0`, where `psi` is the digamma
/// function. Equals `sum_{i >= k} 1/i - 1/(x + i)`.
pub fn digamma_difference(k: u64, x: f64) -> f64 {
    let mut k = k as f64;
    let mut acc = 0.0;
    while k < 32.0 {
        acc += 1.0 / k - 1.0 / (k + x);
        k += 1.0;
    }
    let z = k + x;
    let inv2 = |t: f64| 1.0 / (t * t);
    let series = |t: f64| {
        let s = inv2(t);
        -0.5 / t - s * (1.0 / 12.0 - s * (1.0 / 120.0 - s * (1.0 / 252.0 - s / 240.0)))
    };
    acc + (x / k).ln_1p() + series(z) - series(k)
}

/// The operator `U` on a fixed grid with digit truncation `i_max`.
///
/// Digits beyond `i_max` contribute `f(0) * (x + 1)/(x + i_max + 1)`, their
/// exact telescoped mass placed at the limit point `0`, so constants are
/// preserved exactly.
#[derive(Debug, Clone)]
pub struct TransferOperator {
    n: usize,
    i_max: u64,
    /// Digits `1..=direct` are interpolated one by one.
    direct: u64,
    /// `sum_{direct < i <= i_max} P_i(x)` per node.
    first_cell_mass: Vec<f64>,
    /// `sum_{direct < i <= i_max} P_i(x) / (x + i)` per node.
    first_cell_moment: Vec<f64>,
    /// `(x + 1)/(x + i_max + 1)` per node.
    tail_mass: Vec<f64>,
}

impl TransferOperator {
    pub fn new(n: usize, i_max: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain("grid needs at least two subintervals"));
        }
        if i_max < 10 {
            return Err(Error::domain(format!("i_max = {i_max} < 10")));
        }
        let direct = i_max.min(n as u64 - 1);
        let per_node: Vec<(f64, f64, f64)> = (0..=n)
            .into_par_iter()
            .map(|k| {
                let x = node(k, n);
                let mass = if i_max > direct {
                    p_kernel_tail(x, direct + 1) - p_kernel_tail(x, i_max + 1)
                } else {
                    0.0
                };
                // smallest terms first
                let moment: f64 = (direct + 1..=i_max)
                    .rev()
                    .map(|i| p_kernel(x, i) / (x + i as f64))
                    .sum();
                (mass, moment, p_kernel_tail(x, i_max + 1))
            })
            .collect();
        let mut first_cell_mass = Vec::with_capacity(n + 1);
        let mut first_cell_moment = Vec::with_capacity(n + 1);
        let mut tail_mass = Vec::with_capacity(n + 1);
        for (m, s, t) in per_node {
            first_cell_mass.push(m);
            first_cell_moment.push(s);
            tail_mass.push(t);
        }
        Ok(TransferOperator {
            n,
            i_max,
            direct,
            first_cell_mass,
            first_cell_moment,
            tail_mass,
        })
    }

    pub fn grid(&self) -> usize {
        self.n
    }

    pub fn i_max(&self) -> u64 {
        self.i_max
    }

    /// `(U f)` at every node.
    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        if f.n() != self.n {
            return Err(Error::domain(format!(
                "function has {} subintervals, operator {}",
                f.n(),
                self.n
            )));
        }
        let n = self.n;
        let f0 = f.values[0];
        let first_slope = f.cell_slope(0);
        let values = (0..=n)
            .into_par_iter()
            .map(|k| {
                let x = node(k, n);
                let mut acc = 0.0;
                for i in (1..=self.direct).rev() {
                    let xi = x + i as f64;
                    acc += (x + 1.0) / (xi * (xi + 1.0)) * f.eval(1.0 / xi);
                }
                acc + f0 * (self.first_cell_mass[k] + self.tail_mass[k])
                    + first_slope * self.first_cell_moment[k]
            })
            .collect();
        Ok(GridFunction { values })
    }
}

/// One application of `U` with truncation `i_max`.
pub fn apply_u(f: &GridFunction, i_max: u64) -> Result<GridFunction> {
    TransferOperator::new(f.n(), i_max)?.apply(f)
}

/// `∫ f dγ = (1/log 2) ∫_0^1 f(x)/(x + 1) dx`, exact for the interpolant.
pub fn u_infinity(f: &GridFunction) -> f64 {
    f.integral_against_gauss_weight(1.0) / LN_2
}

/// `f(x) = (x + 1) F'(x)`.
pub fn density_to_f(density: &GridFunction) -> GridFunction {
    density.map_nodes(|x, v| (x + 1.0) * v)
}

/// `F'(x) = f(x) / (x + 1)`.
pub fn f_to_density(f: &GridFunction) -> GridFunction {
    f.map_nodes(|x, v| v / (x + 1.0))
}

/// One density step `F'_{n+1}(x) = sum_i F'_n(1/(x + i)) / (x + i)^2`, realized
/// as `f_to_density ∘ U ∘ density_to_f`.
pub fn density_step(op: &TransferOperator, density: &GridFunction) -> Result<GridFunction> {
    Ok(f_to_density(&op.apply(&density_to_f(density))?))
}

/// Applies `op` to `f0` up to `n_iters` times and tabulates
/// `sup |U^n f0 - U^∞ f0|`; row 0 is the starting error. Stops early below
/// [`STOP_ERROR`]. Returns the table and the last iterate.
pub fn iterate_with(
    op: &TransferOperator,
    f0: &GridFunction,
    n_iters: usize,
) -> Result<(ConvergenceTable, GridFunction)> {
    if n_iters == 0 {
        return Err(Error::domain("n_iters must be at least 1"));
    }
    let limit = u_infinity(f0);
    let mut table = ConvergenceTable::default();
    table.push(0, f0.sup_distance_to(limit));
    let mut f = f0.clone();
    for n in 1..=n_iters {
        f = op.apply(&f)?;
        let err = f.sup_distance_to(limit);
        table.push(n, err);
        if err < STOP_ERROR {
            break;
        }
    }
    Ok((table, f))
}

/// Convergence table of `U^n f0` towards `U^∞ f0`.
pub fn iterate_u(f0: &GridFunction, n_iters: usize, i_max: u64) -> Result<ConvergenceTable> {
    let op = TransferOperator::new(f0.n(), i_max)?;
    Ok(iterate_with(&op, f0, n_iters)?.0)
}

/// Result of one Gauss–Kuzmin step.
#[derive(Debug, Clone, PartialEq)]
pub struct GkStep {
    pub next: DistributionFunction,
    /// Largest change made to restore monotonicity and the endpoint values.
    pub clamp: f64,
}

/// `F_{n+1}(x) = sum_i F(1/i) - F(1/(x + i))`.
///
/// Digits up to `min(i_max, N - 1)` are interpolated individually; the rest
/// is closed with the slope `s` of the first cell as
/// `s * (psi(x + m) - psi(m))`, which is exact for the interpolant once
/// `i_max >= N - 1`.
pub fn gk_step(f: &DistributionFunction, i_max: u64) -> Result<GkStep> {
    if i_max < 10 {
        return Err(Error::domain(format!("i_max = {i_max} < 10")));
    }
    let g = f.grid();
    let n = g.n();
    let direct = i_max.min(n as u64 - 1).max(1);
    let at_reciprocals: Vec<f64> = (1..=direct).map(|i| g.eval(1.0 / i as f64)).collect();
    let slope = g.cell_slope(0);
    let raw: Vec<f64> = (0..=n)
        .into_par_iter()
        .map(|k| {
            let x = node(k, n);
            let mut acc = 0.0;
            for i in (1..=direct).rev() {
                acc += at_reciprocals[i as usize - 1] - g.eval(1.0 / (x + i as f64));
            }
            acc + slope * digamma_difference(direct + 1, x)
        })
        .collect();

    let mut values = Vec::with_capacity(n + 1);
    let mut clamp = raw[0].abs().max((raw[n] - 1.0).abs());
    let mut running = 0.0f64;
    for (k, &v) in raw.iter().enumerate() {
        let pinned = if k == 0 {
            0.0
        } else if k == n {
            1.0
        } else {
            v.max(running).min(1.0)
        };
        if k != 0 && k != n {
            clamp = clamp.max((pinned - v).abs());
        }
        running = pinned;
        values.push(pinned);
    }
    if clamp > MAX_CLAMP {
        return Err(Error::Resolution(format!(
            "Gauss-Kuzmin step needed a monotonicity repair of {clamp:.3e}; refine the grid or raise i_max"
        )));
    }
    Ok(GkStep {
        next: DistributionFunction(GridFunction { values }),
        clamp,
    })
}

/// Iterates [`gk_step`] and tabulates the distance to `log2(1 + x)`; row 0
/// is the starting distance.
pub fn gk_iterate(
    f0: &DistributionFunction,
    n_iters: usize,
    i_max: u64,
) -> Result<ConvergenceTable> {
    Ok(gk_iterate_full(f0, n_iters, i_max)?.0)
}

/// As [`gk_iterate`], also returning the final iterate and the largest clamp.
pub fn gk_iterate_full(
    f0: &DistributionFunction,
    n_iters: usize,
    i_max: u64,
) -> Result<(ConvergenceTable, DistributionFunction, f64)> {
    if n_iters == 0 {
        return Err(Error::domain("n_iters must be at least 1"));
    }
    let mut table = ConvergenceTable::default();
    table.push(0, f0.sup_error());
    let mut f = f0.clone();
    let mut max_clamp = 0.0f64;
    for n in 1..=n_iters {
        let step = gk_step(&f, i_max)?;
        max_clamp = max_clamp.max(step.clamp);
        f = step.next;
        table.push(n, f.sup_error());
    }
    Ok((table, f, max_clamp))
}

/// Median of a nonempty list.
pub(crate) fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_unstable_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Empirical geometric rate `q` of `U`.
///
/// Iterates `U` on the zero-mean function `x + 1 - 1/log 2` and returns the
/// median successive ratio of the sup-error over [`RATE_WINDOW`], with the
/// lower edge lifted to [`FLOOR_MARGIN`] times the discretization floor.
pub fn spectral_gap_estimate(grid_n: usize, i_max: u64, n_iters: usize) -> Result<f64> {
    if grid_n < 1024 {
        return Err(Error::domain(format!("grid_n = {grid_n} < 1024")));
    }
    let (table, ratios) = spectral_gap_table(grid_n, i_max, n_iters)?;
    if ratios.len() < 3 {
        return Err(Error::Resolution(format!(
            "only {} usable ratios (last error {:.3e}); use a larger grid or more iterations",
            ratios.len(),
            table.last_error().unwrap_or(f64::NAN)
        )));
    }
    Ok(median(&ratios))
}

/// The convergence table behind [`spectral_gap_estimate`] and the harvested ratios.
pub fn spectral_gap_table(
    grid_n: usize,
    i_max: u64,
    n_iters: usize,
) -> Result<(ConvergenceTable, Vec<f64>)> {
    let op = TransferOperator::new(grid_n, i_max)?;
    let f0 = GridFunction::from_fn(grid_n, |x| x + 1.0 - 1.0 / LN_2);
    let (table, _) = iterate_with(&op, &f0, n_iters)?;
    let lo = RATE_WINDOW.0.max(FLOOR_MARGIN * table.floor());
    let ratios = table.ratios_in_window(lo, RATE_WINDOW.1);
    Ok((table, ratios))
}
