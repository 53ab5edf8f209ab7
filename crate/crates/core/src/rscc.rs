//! Random systems with complete connections on the unit interval.
//!
//! A system is a point map `u: [0,1] x N+ -> [0,1]` together with a
//! state-dependent digit kernel `P(w, i)`. The digit process `xi_n` is drawn
//! from `P(zeta_{n-1}, .)` and the state moves by `zeta_n = u(zeta_{n-1}, xi_n)`.
//! [`Rcf`] is the regular-continued-fraction instance with
//! `u(w, i) = 1/(w + i)` and `P(w, i) = (w + 1)/((w + i)(w + i + 1))`.

use rand::Rng;
use rayon::prelude::*;

use crate::cf::UnitReal;
use crate::error::{Error, Result};
use crate::rng;

/// A homogeneous RSCC with state space `[0, 1]` (distance `|x - y|`) and
/// alphabet `{1, 2, ...}`.
pub trait RsccSystem: Sync {
    /// Point map `u(w, i)`.
    fn step(&self, w: f64, i: u64) -> f64;

    /// Digit kernel `P(w, i)`.
    fn kernel(&self, w: f64, i: u64) -> f64;

    /// Tail mass `sum_{i >= m} P(w, i)`.
    fn tail(&self, w: f64, m: u64) -> f64;

    /// Draws a digit from `P(w, .)` given `uniform` in `(0, 1]`.
    ///
    /// Returns the smallest `i` with `tail(w, i + 1) <= uniform`. The default
    /// gallops on the tail; implementations with a closed-form inverse should
    /// override it.
    fn sample_digit(&self, w: f64, uniform: f64) -> u64 {
        let mut hi = 1u64;
        while self.tail(w, hi + 1) > uniform {
            if hi > u64::MAX / 4 {
                return hi;
            }
            hi *= 2;
        }
        let mut lo = hi / 2;
        // invariant: tail(lo + 1) > uniform (or lo == 0), tail(hi + 1) <= uniform
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.tail(w, mid + 1) > uniform {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// The regular-continued-fraction system.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rcf;

impl RsccSystem for Rcf {
    #[inline]
    fn step(&self, w: f64, i: u64) -> f64 {
        u_map(w, i)
    }

    #[inline]
    fn kernel(&self, w: f64, i: u64) -> f64 {
        p_kernel(w, i)
    }

    #[inline]
    fn tail(&self, w: f64, m: u64) -> f64 {
        p_kernel_tail(w, m)
    }

    fn sample_digit(&self, w: f64, uniform: f64) -> u64 {
        // tail(w, i + 1) = (w + 1)/(w + i + 1) <= U  <=>  i >= (w + 1)/U - w - 1
        let guess = ((w + 1.0) / uniform - w - 1.0).ceil();
        let mut i = if guess < 1.0 {
            1
        } else if guess >= (1u64 << 62) as f64 {
            1 << 62
        } else {
            guess as u64
        };
        while p_kernel_tail(w, i + 1) > uniform {
            i += 1;
        }
        while i > 1 && p_kernel_tail(w, i) <= uniform {
            i -= 1;
        }
        i
    }
}

/// `u(w, i) = 1/(w + i)`.
#[inline]
pub fn u_map(w: f64, i: u64) -> f64 {
    1.0 / (w + i as f64)
}

/// `P_i(w) = (w + 1)/((w + i)(w + i + 1))`.
#[inline]
pub fn p_kernel(w: f64, i: u64) -> f64 {
    let wi = w + i as f64;
    (w + 1.0) / (wi * (wi + 1.0))
}

/// Telescoped tail `sum_{i >= m} P_i(w) = (w + 1)/(w + m)`.
#[inline]
pub fn p_kernel_tail(w: f64, m: u64) -> f64 {
    debug_assert!(m >= 1);
    (w + 1.0) / (w + m as f64)
}

/// Left fold of the point map over a word: `w x^(n)` in the usual notation.
pub fn iterate_u<S: RsccSystem + ?Sized>(sys: &S, w: f64, word: &[u64]) -> f64 {
    word.iter().fold(w, |state, &i| sys.step(state, i))
}

/// Probability of the cylinder `{word}` started at `w`: the product of
/// kernels along the visited states. The empty word has probability 1.
pub fn word_probability<S: RsccSystem + ?Sized>(sys: &S, w: f64, word: &[u64]) -> f64 {
    let mut state = w;
    let mut prob = 1.0;
    for &i in word {
        prob *= sys.kernel(state, i);
        state = sys.step(state, i);
    }
    prob
}

/// Smallest digit `m` with `1/(w + m) < ubound`, i.e. `floor(1/ubound - w) + 1`.
pub fn q_threshold_digit(w: f64, ubound: f64) -> u64 {
    let t = 1.0 / ubound - w;
    let mut m = if t < 0.0 { 1 } else { t.floor() as u64 + 1 };
    // integer boundaries: enforce the strict inequality on the computed values
    while m > 1 && u_map(w, m - 1) < ubound {
        m -= 1;
    }
    while u_map(w, m) >= ubound {
        m += 1;
    }
    m
}

/// One-step state kernel `Q(w, [0, ubound))`: the mass of digits sending `w`
/// strictly below `ubound`.
pub fn q_kernel_interval(w: f64, ubound: f64) -> Result<f64> {
    if !(ubound > 0.0 && ubound <= 1.0) {
        return Err(Error::domain(format!("ubound {ubound} not in (0, 1]")));
    }
    Ok(p_kernel_tail(w, q_threshold_digit(w, ubound)))
}

/// A realized sample path `(xi_n, zeta_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainTrajectory {
    pub seed: u64,
    pub w0: f64,
    /// Digits `xi_1, ..., xi_n`.
    pub xi: Vec<u64>,
    /// States `zeta_0 = w0, ..., zeta_n`.
    pub zeta: Vec<f64>,
}

const CHAIN_STREAM: &str = "rscc-chain";

/// Simulates `n` steps of the chain from `w0` driven by `rng`.
pub fn simulate_chain_with<S, R>(
    sys: &S,
    w0: UnitReal,
    n: usize,
    rng: &mut R,
) -> (Vec<u64>, Vec<f64>)
where
    S: RsccSystem + ?Sized,
    R: Rng + ?Sized,
{
    let mut xi = Vec::with_capacity(n);
    let mut zeta = Vec::with_capacity(n + 1);
    let mut state = w0.get();
    zeta.push(state);
    for _ in 0..n {
        let digit = sys.sample_digit(state, rng::open_closed(rng));
        state = sys.step(state, digit);
        xi.push(digit);
        zeta.push(state);
    }
    (xi, zeta)
}

/// Trajectory `index` of the family keyed by `seed`.
pub fn simulate_chain_indexed<S: RsccSystem + ?Sized>(
    sys: &S,
    w0: UnitReal,
    n: usize,
    seed: u64,
    index: u64,
) -> ChainTrajectory {
    let mut rng = rng::stream(seed, rng::experiment_key(CHAIN_STREAM), index);
    let (xi, zeta) = simulate_chain_with(sys, w0, n, &mut rng);
    ChainTrajectory {
        seed,
        w0: w0.get(),
        xi,
        zeta,
    }
}

/// A single reproducible trajectory of `n >= 1` steps.
pub fn simulate_chain<S: RsccSystem + ?Sized>(
    sys: &S,
    w0: UnitReal,
    n: usize,
    seed: u64,
) -> Result<ChainTrajectory> {
    if n == 0 {
        return Err(Error::domain("chain length must be at least 1"));
    }
    Ok(simulate_chain_indexed(sys, w0, n, seed, 0))
}

/// Simulates `runs` independent trajectories in parallel and maps each with
/// `f`. Trajectory `j` always uses stream `j`, so the output is independent of
/// the thread count.
pub fn simulate_chains<S, T, F>(
    sys: &S,
    w0: UnitReal,
    n: usize,
    runs: usize,
    seed: u64,
    f: F,
) -> Vec<T>
where
    S: RsccSystem + ?Sized,
    T: Send,
    F: Fn(&ChainTrajectory) -> T + Sync,
{
    (0..runs as u64)
        .into_par_iter()
        .map(|j| f(&simulate_chain_indexed(sys, w0, n, seed, j)))
        .collect()
}

/// Numerical contraction coefficients of the RCF system.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport {
    pub grid_n: usize,
    pub i_max: u64,
    /// `r_hat[k - 1]` estimates `r_k`.
    pub r_hat: Vec<f64>,
    pub big_r1_hat: f64,
}

fn pair_grid(grid_n: usize) -> Vec<f64> {
    (0..=grid_n).map(|k| k as f64 / grid_n as f64).collect()
}

/// `sum_i P(w', i) |u(w', i) - u(w'', i)| / |w' - w''|` truncated at `i_max`.
/// The distance ratio `1/((w' + i)(w'' + i))` is used in closed form, which
/// also covers the diagonal `w' = w''`.
fn r1_pair_sum(w1: f64, w2: f64, i_max: u64) -> f64 {
    (1..=i_max)
        .map(|i| {
            let (a, b) = (w1 + i as f64, w2 + i as f64);
            p_kernel(w1, i) / (a * b)
        })
        .sum()
}

fn r2_pair_sum(w1: f64, w2: f64, i_max: u64) -> f64 {
    let mut total = 0.0;
    for i in 1..=i_max {
        let (a, b) = (w1 + i as f64, w2 + i as f64);
        let p1 = p_kernel(w1, i);
        let first = 1.0 / (a * b);
        let (s1, s2) = (1.0 / a, 1.0 / b);
        let inner: f64 = (1..=i_max)
            .map(|j| {
                let (c, d) = (s1 + j as f64, s2 + j as f64);
                p_kernel(s1, j) / (c * d)
            })
            .sum();
        total += p1 * first * inner;
    }
    total
}

/// Estimate of `r_k` for `k` in `{1, 2}`.
///
/// Takes the supremum over all ordered pairs of a uniform grid with `grid_n`
/// subintervals and over the diagonal limit at every node, then adds the
/// truncation bound `k / i_max^3` for digits beyond `i_max`.
pub fn contraction_r(k: usize, grid_n: usize, i_max: u64) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("k must be positive"));
    }
    if k > 2 {
        return Err(Error::Unsupported(format!(
            "r_k for k = {k}: word sums grow as i_max^k, only k <= 2 is supported"
        )));
    }
    if grid_n < 100 {
        return Err(Error::domain(format!("grid_n = {grid_n} < 100")));
    }
    if i_max < 1 {
        return Err(Error::domain("i_max must be positive"));
    }
    let nodes = pair_grid(grid_n);
    let pair_sum = |w1: f64, w2: f64| match k {
        1 => r1_pair_sum(w1, w2, i_max),
        _ => r2_pair_sum(w1, w2, i_max),
    };
    // the diagonal (a == b) is the derivative form
    let sup = (0..nodes.len())
        .into_par_iter()
        .map(|a| {
            nodes
                .iter()
                .map(|&w2| pair_sum(nodes[a], w2))
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    let tail_bound = k as f64 / (i_max as f64).powi(3);
    Ok(sup + tail_bound)
}

/// Grid supremum of `|P(w', {i >= m}) - P(w'', {i >= m})| / |w' - w''|` for a
/// single threshold `m`, including the diagonal derivative `(m - 1)/(w + m)^2`.
pub fn threshold_lipschitz(m: u64, grid_n: usize) -> f64 {
    // (w + 1)/(w + m) = 1 - (m - 1)/(w + m), so the difference quotient is
    // (m - 1)/((w' + m)(w'' + m)); it is largest at the smallest states.
    let nodes = pair_grid(grid_n);
    let mf = m as f64;
    nodes
        .iter()
        .flat_map(|&a| {
            nodes
                .iter()
                .map(move |&b| (mf - 1.0) / ((a + mf) * (b + mf)))
        })
        .fold(0.0, f64::max)
}

/// Estimate of `R_1` over threshold sets `{i >= m}`, `2 <= m <= i_max`.
pub fn contraction_big_r1(grid_n: usize, i_max: u64) -> Result<f64> {
    if grid_n < 100 {
        return Err(Error::domain(format!("grid_n = {grid_n} < 100")));
    }
    if i_max < 2 {
        return Err(Error::domain("i_max must be at least 2"));
    }
    Ok((2..=i_max)
        .into_par_iter()
        .map(|m| threshold_lipschitz(m, grid_n))
        .reduce(|| 0.0, f64::max))
}

/// Runs [`contraction_r`] for `k = 1..=k_max` and [`contraction_big_r1`].
pub fn contraction_report(k_max: usize, grid_n: usize, i_max: u64) -> Result<ContractionReport> {
    let r_hat = (1..=k_max)
        .map(|k| contraction_r(k, grid_n, i_max))
        .collect::<Result<Vec<_>>>()?;
    Ok(ContractionReport {
        grid_n,
        i_max,
        r_hat,
        big_r1_hat: contraction_big_r1(grid_n, i_max)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SILVER: f64 = std::f64::consts::SQRT_2 - 1.0;

    #[test]
    fn point_map_examples() {
        assert_eq!(u_map(0.0, 1), 1.0);
        assert_eq!(u_map(1.0, 1), 0.5);
        assert!((u_map(SILVER, 2) - SILVER).abs() < 1e-16);
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(p_kernel(0.0, 1), 0.5);
        assert!((p_kernel(0.0, 2) - 1.0 / 6.0).abs() < 1e-17);
        assert!((p_kernel(1.0, 1) - 1.0 / 3.0).abs() < 1e-17);
        let w = 0.37;
        let alt = (w + 1.0) * (1.0 / (w + 5.0) - 1.0 / (w + 6.0));
        assert!((p_kernel(w, 5) - alt).abs() < 1e-15);
    }

    #[test]
    fn tail_examples() {
        for w in [0.0, 0.3, 1.0] {
            assert_eq!(p_kernel_tail(w, 1), 1.0);
        }
        assert_eq!(p_kernel_tail(0.0, 2), 0.5);
        // term-by-term oracle with a truncated remainder
        let direct: f64 = (3..=1_000_000u64).map(|i| p_kernel(0.5, i)).sum::<f64>()
            + p_kernel_tail(0.5, 1_000_001);
        assert!((direct - 3.0 / 7.0).abs() < 1e-12);
        assert!((p_kernel_tail(0.5, 3) - 3.0 / 7.0).abs() < 1e-16);
    }

    #[test]
    fn iterate_and_word_probability() {
        assert!((iterate_u(&Rcf, 0.0, &[1, 2]) - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(iterate_u(&Rcf, 0.0, &[1]), 1.0);
        for w in [0.0, 0.5, 1.0] {
            let x = iterate_u(&Rcf, w, &[2; 60]);
            assert!((x - SILVER).abs() < 1e-12);
        }
        assert_eq!(word_probability(&Rcf, 0.0, &[1]), 0.5);
        assert!((word_probability(&Rcf, 0.0, &[1, 1]) - 1.0 / 6.0).abs() < 1e-16);
        assert_eq!(word_probability(&Rcf, 0.3, &[]), 1.0);
    }

    #[test]
    fn q_kernel_examples() {
        assert_eq!(q_kernel_interval(0.0, 1.0).unwrap(), 0.5);
        assert!((q_kernel_interval(0.5, 0.4).unwrap() - 3.0 / 7.0).abs() < 1e-16);
        assert_eq!(q_threshold_digit(0.5, 0.4), 3);
        let tiny = q_kernel_interval(0.0, 1e-9).unwrap();
        assert!((tiny - 1.0 / (1e9 + 1.0)).abs() < 1e-20);
        assert!(q_kernel_interval(0.2, 1.0 + 1e-12).is_err());
        assert!(q_kernel_interval(0.2, 0.0).is_err());
    }

    #[test]
    fn q_kernel_term_sum_oracle() {
        // Q(w, [0, u)) as an explicit sum over admissible digits plus tail
        for &(w, ub) in &[(0.0, 1.0), (0.5, 0.4), (0.25, 0.3), (0.9, 0.11)] {
            let cutoff = 200_000u64;
            let direct: f64 = (1..=cutoff)
                .filter(|&i| u_map(w, i) < ub)
                .map(|i| p_kernel(w, i))
                .sum::<f64>()
                + p_kernel_tail(w, cutoff + 1);
            assert!(
                (direct - q_kernel_interval(w, ub).unwrap()).abs() < 1e-12,
                "{w} {ub}"
            );
        }
    }

    #[test]
    fn atom_only_at_zero() {
        // u(w, i) = 1 only for w = 0, i = 1
        assert_eq!(q_kernel_interval(0.0, 1.0).unwrap() + p_kernel(0.0, 1), 1.0);
        for w in [0.1, 0.5, 1.0] {
            assert_eq!(q_kernel_interval(w, 1.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn default_sampler_agrees_with_closed_form() {
        struct Generic;
        impl RsccSystem for Generic {
            fn step(&self, w: f64, i: u64) -> f64 {
                u_map(w, i)
            }
            fn kernel(&self, w: f64, i: u64) -> f64 {
                p_kernel(w, i)
            }
            fn tail(&self, w: f64, m: u64) -> f64 {
                p_kernel_tail(w, m)
            }
        }
        for &w in &[0.0, 0.3, 1.0] {
            for &u in &[1.0, 0.9, 0.5, 0.333, 0.01, 1e-7] {
                assert_eq!(
                    Generic.sample_digit(w, u),
                    Rcf.sample_digit(w, u),
                    "{w} {u}"
                );
            }
        }
    }

    #[test]
    fn sampled_digit_brackets_uniform() {
        for &w in &[0.0, 0.25, 1.0] {
            for k in 1..1000 {
                let u = k as f64 / 1000.0;
                let i = Rcf.sample_digit(w, u);
                assert!(p_kernel_tail(w, i + 1) <= u);
                assert!(i == 1 || p_kernel_tail(w, i) > u);
            }
        }
    }

    #[test]
    fn chain_zero_start_is_backward_chain() {
        use crate::cf::backward_chain;
        use num_traits::ToPrimitive;
        let traj = simulate_chain(&Rcf, UnitReal::new(0.0).unwrap(), 12, 99).unwrap();
        assert_eq!(traj.zeta[0], 0.0);
        let exact = backward_chain(&traj.xi).unwrap();
        for (k, s) in exact.iter().enumerate() {
            assert!((traj.zeta[k + 1] - s.to_f64().unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn chain_requires_a_step() {
        assert!(simulate_chain(&Rcf, UnitReal::new(0.0).unwrap(), 0, 1).is_err());
    }

    #[test]
    fn contraction_r_rejects_large_k() {
        assert!(matches!(
            contraction_r(3, 100, 10),
            Err(Error::Unsupported(_))
        ));
        assert!(contraction_r(1, 50, 10).is_err());
    }

    #[test]
    fn threshold_two_lipschitz() {
        let v = threshold_lipschitz(2, 200);
        assert!((v - 0.25).abs() < 1e-12);
    }
}
