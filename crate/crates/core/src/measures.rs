//! The Gauss measure `dγ = dx / ((1 + x) log 2)`, the Lebesgue digit law and
//! numerical checks of the two invariance identities: `γ` is preserved by the
//! Gauss map and by the one-step state kernel `Q`.

use std::f64::consts::LN_2;

use rand::Rng;

use crate::cf::gauss_map;
use crate::error::{Error, Result};
use crate::ks::{self, Alpha};
use crate::quadrature::integrate_pieces;
use crate::rng;
use crate::rscc::q_kernel_interval;
use crate::transfer::{density_to_f, gauss_cdf, GridFunction, TransferOperator};

/// `γ([a, b))`.
pub fn gauss_measure_interval(a: f64, b: f64) -> Result<f64> {
    if !(0.0 <= a && a <= b && b <= 1.0) {
        return Err(Error::domain(format!(
            "need 0 <= a <= b <= 1, got [{a}, {b})"
        )));
    }
    Ok((b.ln_1p() - a.ln_1p()) / LN_2)
}

/// Inverse of the Gauss distribution: `2^v - 1`.
#[inline]
pub fn gauss_quantile(v: f64) -> f64 {
    (v * LN_2).exp_m1()
}

/// One draw from `γ` by inversion of a uniform on `[0, 1)`.
pub fn sample_gauss<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    gauss_quantile(rng.gen::<f64>())
}

/// `λ(a_1 = i) = 1/(i(i + 1))`.
#[inline]
pub fn lebesgue_digit_prob(i: u64) -> f64 {
    let i = i as f64;
    1.0 / (i * (i + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    /// Absolute deviation from the closed-form reference.
    pub est_error: f64,
    /// Number of smooth pieces integrated.
    pub pieces: usize,
}

impl QuadratureResult {
    pub fn within(&self, tol: f64) -> bool {
        self.est_error < tol
    }
}

/// `∫ Q(x, [0, u)) γ(dx)` against `γ([0, u))`.
///
/// The integrand jumps wherever `floor(1/u - x)` does, at `x = 1/u - j`; each
/// piece between jumps is integrated with 16-point Gauss–Legendre.
pub fn check_gamma_invariance(ubound: f64) -> Result<QuadratureResult> {
    if !(ubound > 0.0 && ubound <= 1.0) {
        return Err(Error::domain(format!("ubound {ubound} not in (0, 1]")));
    }
    let inv = 1.0 / ubound;
    let mut breaks = vec![0.0, 1.0];
    let frac = inv - inv.floor();
    if frac > 0.0 && frac < 1.0 {
        breaks.insert(1, frac);
    }
    let integrand =
        |x: f64| q_kernel_interval(x, ubound).expect("ubound checked above") / ((1.0 + x) * LN_2);
    let (value, pieces) = integrate_pieces(integrand, &breaks);
    let reference = gauss_measure_interval(0.0, ubound)?;
    Ok(QuadratureResult {
        value,
        est_error: (value - reference).abs(),
        pieces,
    })
}

/// Outcome of a Kolmogorov–Smirnov comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsOutcome {
    pub statistic: f64,
    pub critical: f64,
    pub samples: usize,
}

impl KsOutcome {
    pub fn passes(&self) -> bool {
        self.statistic < self.critical
    }
}

const TAU_STREAM: &str = "tau-invariance";

/// Samples `x ~ γ`, pushes them through the Gauss map and compares the result
/// with the Gauss distribution at `alpha = 0.01`.
pub fn check_tau_invariance(nsamples: usize, seed: u64) -> Result<KsOutcome> {
    if nsamples < 10_000 {
        return Err(Error::domain(format!(
            "need at least 10^4 samples, got {nsamples}"
        )));
    }
    let chunks = rng::map_chunks(
        seed,
        rng::experiment_key(TAU_STREAM),
        nsamples,
        |rng, count| {
            (0..count)
                .map(|_| gauss_map(sample_gauss(rng)))
                .collect::<Vec<_>>()
        },
    );
    let mut sample: Vec<f64> = chunks.into_iter().flatten().collect();
    Ok(KsOutcome {
        statistic: ks::ks_statistic(&mut sample, gauss_cdf),
        critical: ks::critical_value(Alpha::OnePercent, nsamples),
        samples: nsamples,
    })
}

/// `γ(τ^{-1}[0, y)) = sum_i γ([1/(y + i), 1/i))`, summed over `i <= i_max`
/// with the telescoped remainder `log2(1 + y/(i_max + 1))`.
pub fn pushforward_gauss_cdf(y: f64, i_max: u64) -> f64 {
    let branches: f64 = (1..=i_max)
        .rev()
        .map(|i| {
            let i = i as f64;
            ((1.0 / i).ln_1p() - (1.0 / (y + i)).ln_1p()) / LN_2
        })
        .sum();
    branches + (y / (i_max as f64 + 1.0)).ln_1p() / LN_2
}

/// Inverse-CDF sampler for a nonnegative piecewise-linear density.
#[derive(Debug, Clone)]
pub struct DensitySampler {
    density: GridFunction,
    /// Cumulative mass at each node.
    cumulative: Vec<f64>,
}

impl DensitySampler {
    pub fn new(density: &GridFunction) -> Result<Self> {
        if density.values().iter().any(|&v| v < 0.0) {
            return Err(Error::domain("density must be nonnegative"));
        }
        let total = density.integral();
        if (total - 1.0).abs() > 1e-8 {
            return Err(Error::domain(format!(
                "density integrates to {total}, not 1"
            )));
        }
        let h = 1.0 / density.n() as f64;
        let mut cumulative = Vec::with_capacity(density.n() + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in density.values().windows(2) {
            acc += 0.5 * h * (w[0] + w[1]);
            cumulative.push(acc);
        }
        Ok(DensitySampler {
            density: density.clone(),
            cumulative,
        })
    }

    /// Quantile of `v` in `[0, 1)`.
    pub fn quantile(&self, v: f64) -> f64 {
        let n = self.density.n();
        let h = 1.0 / n as f64;
        let target = v * self.cumulative[n];
        // last node with cumulative <= target
        let k = self
            .cumulative
            .partition_point(|&c| c <= target)
            .clamp(1, n)
            - 1;
        let r = target - self.cumulative[k];
        let (d0, d1) = (self.density.values()[k], self.density.values()[k + 1]);
        // mass over [x_k, x_k + t] is d0 t + (d1 - d0) t^2 / (2h)
        let a = (d1 - d0) / (2.0 * h);
        let disc = (d0 * d0 + 4.0 * a * r).max(0.0);
        let denom = d0 + disc.sqrt();
        let t = if denom > 0.0 { 2.0 * r / denom } else { 0.0 };
        (self.density.node(k) + t.clamp(0.0, h)).min(1.0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.gen::<f64>())
    }
}

/// The two sides of `μ(τ^{-n}[0, x)) = ∫_0^x U^n f_0(t)/(t + 1) dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PushforwardCheck {
    pub monte_carlo: f64,
    pub quadrature: f64,
}

impl PushforwardCheck {
    pub fn gap(&self) -> f64 {
        (self.monte_carlo - self.quadrature).abs()
    }
}

const PUSHFORWARD_STREAM: &str = "pushforward";

/// Compares a Monte-Carlo estimate of `μ(τ^n < x)`, with `μ` given by a grid
/// density, against exact integration of `U^n f_0 / (t + 1)` over `[0, x)`
/// with `f_0 = (t + 1) density`. The operator uses the density's own grid.
pub fn check_pushforward_identity(
    density: &GridFunction,
    n: usize,
    x: f64,
    nsamples: usize,
    seed: u64,
    i_max: u64,
) -> Result<PushforwardCheck> {
    if n > 5 {
        return Err(Error::domain(format!("n = {n} > 5")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("x = {x} not in [0, 1]")));
    }
    if nsamples == 0 {
        return Err(Error::domain("need at least one sample"));
    }
    let sampler = DensitySampler::new(density)?;
    let hits: u64 = rng::map_chunks(
        seed,
        rng::experiment_key(PUSHFORWARD_STREAM),
        nsamples,
        |rng, count| {
            (0..count)
                .filter(|_| {
                    let y = (0..n).fold(sampler.sample(rng), |y, _| gauss_map(y));
                    y < x
                })
                .count() as u64
        },
    )
    .into_iter()
    .sum();

    let op = TransferOperator::new(density.n(), i_max)?;
    let mut f = density_to_f(density);
    for _ in 0..n {
        f = op.apply(&f)?;
    }
    Ok(PushforwardCheck {
        monte_carlo: hits as f64 / nsamples as f64,
        quadrature: f.integral_against_gauss_weight(x),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rscc::p_kernel;

    #[test]
    fn interval_examples() {
        assert!((gauss_measure_interval(0.0, 1.0).unwrap() - 1.0).abs() < 1e-16);
        assert!((gauss_measure_interval(0.0, 0.5).unwrap() - 1.5f64.ln() / LN_2).abs() < 1e-16);
        assert_eq!(gauss_measure_interval(0.3, 0.3).unwrap(), 0.0);
        assert!(gauss_measure_interval(0.6, 0.3).is_err());
        assert!(gauss_measure_interval(-0.1, 0.3).is_err());
    }

    #[test]
    fn interval_additivity() {
        for &(a, b, c) in &[(0.0, 0.3, 1.0), (0.1, 0.15, 0.9), (0.5, 0.75, 0.8)] {
            let whole = gauss_measure_interval(a, c).unwrap();
            let parts =
                gauss_measure_interval(a, b).unwrap() + gauss_measure_interval(b, c).unwrap();
            assert!((whole - parts).abs() < 1e-15);
        }
    }

    #[test]
    fn quantile_endpoints() {
        assert_eq!(gauss_quantile(0.0), 0.0);
        let near_one = gauss_quantile(1.0 - f64::EPSILON);
        assert!(near_one < 1.0 && near_one > 1.0 - 1e-15);
    }

    #[test]
    fn digit_law_matches_kernel_at_zero() {
        assert_eq!(lebesgue_digit_prob(1), 0.5);
        assert_eq!(lebesgue_digit_prob(2), 1.0 / 6.0);
        for i in 1..=1_000_000u64 {
            assert_eq!(lebesgue_digit_prob(i), p_kernel(0.0, i));
        }
        let partial: f64 = (1..=10_000u64).map(lebesgue_digit_prob).sum();
        assert!((partial + 1.0 / 10_001.0 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn gamma_invariance_examples() {
        let half = check_gamma_invariance(0.5).unwrap();
        assert!((half.value - 0.584_962_500_721_156_2).abs() < 1e-8);
        let one = check_gamma_invariance(1.0).unwrap();
        assert!((one.value - 1.0).abs() < 1e-8);
        assert_eq!(one.pieces, 1);
        let quarter = check_gamma_invariance(0.25).unwrap();
        assert!((quarter.value - 1.25f64.ln() / LN_2).abs() < 1e-8);
        assert!(check_gamma_invariance(0.0).is_err());
    }

    #[test]
    fn branch_sum_pushforward() {
        for y in [0.25, 0.5, 0.75] {
            let got = pushforward_gauss_cdf(y, 1_000_000);
            assert!((got - gauss_cdf(y)).abs() < 1e-10, "{y}");
        }
    }

    #[test]
    fn tau_invariance_rejects_small_samples() {
        assert!(check_tau_invariance(0, 1).is_err());
        assert!(check_tau_invariance(9_999, 1).is_err());
    }

    #[test]
    fn density_sampler_quantiles() {
        let uniform = DensitySampler::new(&GridFunction::constant(8, 1.0)).unwrap();
        for v in [0.0, 0.1, 0.5, 0.93] {
            assert!((uniform.quantile(v) - v).abs() < 1e-14);
        }
        // density 2x has CDF x^2
        let linear = DensitySampler::new(&GridFunction::from_fn(8, |x| 2.0 * x)).unwrap();
        for v in [0.0, 0.01, 0.25, 0.5, 0.99] {
            assert!((linear.quantile(v) - v.sqrt()).abs() < 1e-12, "{v}");
        }
        assert!(DensitySampler::new(&GridFunction::constant(8, 2.0)).is_err());
        assert!(
            DensitySampler::new(&GridFunction::from_fn(8, |x| 2.0 - 2.0 * x - 0.5 + 0.5 * x))
                .is_err()
        );
    }

    #[test]
    fn pushforward_at_zero_steps() {
        let density = GridFunction::constant(64, 1.0);
        let check = check_pushforward_identity(&density, 0, 0.5, 20_000, 3, 100).unwrap();
        assert!((check.quadrature - 0.5).abs() < 1e-15);
        assert!((check.monte_carlo - 0.5).abs() < 0.02);
        assert!(check_pushforward_identity(&density, 6, 0.5, 10, 3, 100).is_err());
    }
}
