//! Quadrature rules on uniform and Gauss nodes.

/// Gregory coefficients `G₁…G₈`.
const GREGORY: [f64; 8] = [
    1.0 / 12.0,
    1.0 / 24.0,
    19.0 / 720.0,
    3.0 / 160.0,
    863.0 / 60480.0,
    275.0 / 24192.0,
    33953.0 / 3628800.0,
    8183.0 / 1036800.0,
];

/// Number of end-correction terms used by [`corrected_trapezoid_weights`].
pub const DEFAULT_CORRECTIONS: usize = 6;

/// Weights (including the node spacing `h`) of the Gregory end-corrected
/// trapezoid rule with `corrections` difference terms at each end. The rule
/// is exact for polynomials of degree `corrections` and needs
/// `n ≥ 2·(corrections + 1)`.
pub fn gregory_weights(n: usize, h: f64, corrections: usize) -> Vec<f64> {
    assert!(
        corrections <= GREGORY.len(),
        "at most {} corrections",
        GREGORY.len()
    );
    assert!(
        n >= 2 * (corrections + 1),
        "{n} nodes are too few for {corrections} corrections"
    );
    let mut w = trapezoid_weights(n, 1.0);
    for (k, g) in GREGORY.iter().take(corrections).enumerate() {
        let k = k + 1;
        let mut binom = 1.0;
        for j in 0..=k {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            w[j] -= g * sign * binom;
            w[n - 1 - j] -= g * sign * binom;
            binom = binom * (k - j) as f64 / (j + 1) as f64;
        }
    }
    w.iter().map(|c| c * h).collect()
}

/// Gregory weights with [`DEFAULT_CORRECTIONS`] end terms; needs `n ≥ 14`.
pub fn corrected_trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    gregory_weights(n, h, DEFAULT_CORRECTIONS)
}

/// Plain trapezoid weights on `n` uniform nodes.
pub fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    assert!(n >= 2);
    let mut w = vec![h; n];
    w[0] = 0.5 * h;
    w[n - 1] = 0.5 * h;
    w
}

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Composite 5-point Gauss–Legendre integral of `f` over `[a, b]`.
pub fn gauss_legendre<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * width;
        let half = 0.5 * width;
        let mut s = 0.0;
        for (x, w) in GL5_NODES.iter().zip(GL5_WEIGHTS.iter()) {
            s += w * f(mid + half * x);
        }
        total += s * half;
    }
    total
}
