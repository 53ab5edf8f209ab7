//! Fixed 16-point Gauss–Legendre quadrature on smooth pieces.

/// Positive nodes of the 16-point rule on `[-1, 1]`.
const NODES: [f64; 8] = [
    0.095_012_509_837_637_44,
    0.281_603_550_779_258_9,
    0.458_016_777_657_227_4,
    0.617_876_244_402_643_7,
    0.755_404_408_355_003,
    0.865_631_202_387_831_8,
    0.944_575_023_073_232_6,
    0.989_400_934_991_649_9,
];

const WEIGHTS: [f64; 8] = [
    0.189_450_610_455_068_5,
    0.182_603_415_044_923_6,
    0.169_156_519_395_002_5,
    0.149_595_988_816_576_7,
    0.124_628_971_255_533_9,
    0.095_158_511_682_492_78,
    0.062_253_523_938_647_89,
    0.027_152_459_411_754_09,
];

/// `∫_a^b f` by one 16-point Gauss–Legendre panel.
pub fn gauss_legendre_16<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let sum: f64 = NODES
        .iter()
        .zip(WEIGHTS.iter())
        .map(|(&t, &w)| w * (f(mid - half * t) + f(mid + half * t)))
        .sum();
    sum * half
}

/// Sum of 16-point panels over consecutive breakpoints (sorted, deduplicated
/// by the caller). Returns the integral and the number of nonempty pieces.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, breakpoints: &[f64]) -> (f64, usize) {
    breakpoints
        .windows(2)
        .filter(|w| w[1] > w[0])
        .fold((0.0, 0), |(acc, n), w| {
            (acc + gauss_legendre_16(&f, w[0], w[1]), n + 1)
        })
}
