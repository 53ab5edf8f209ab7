//! One-sample Kolmogorov–Smirnov statistic with asymptotic critical values.

/// Significance levels with hard-coded asymptotic coefficients `c(alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alpha {
    FivePercent,
    OnePercent,
}

impl Alpha {
    pub fn coefficient(self) -> f64 {
        match self {
            Alpha::FivePercent => 1.358,
            Alpha::OnePercent => 1.628,
        }
    }
}

/// Critical value `c(alpha) / sqrt(n)`.
pub fn critical_value(alpha: Alpha, n: usize) -> f64 {
    alpha.coefficient() / (n as f64).sqrt()
}

/// Two-sided statistic `sup |F_n(x) - F(x)|` of a sample against a continuous CDF.
///
/// The sample is sorted in place.
pub fn ks_statistic<F: Fn(f64) -> f64>(sample: &mut [f64], cdf: F) -> f64 {
    assert!(!sample.is_empty(), "KS statistic of an empty sample");
    sample.sort_unstable_by(f64::total_cmp);
    let n = sample.len() as f64;
    sample
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let below = f - i as f64 / n;
            let above = (i + 1) as f64 / n - f;
            below.max(above)
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_grid_has_half_step_statistic() {
        let n = 1000;
        let mut xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&mut xs, |x| x);
        assert!((d - 0.5 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn shifted_sample_is_detected() {
        let n = 1000;
        let mut xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64 * 0.5).collect();
        let d = ks_statistic(&mut xs, |x| x);
        assert!(d > critical_value(Alpha::OnePercent, n));
    }
}
