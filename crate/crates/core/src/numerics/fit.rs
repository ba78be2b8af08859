//! Convergence-order estimation.

/// Least-squares slope of `ln y` against `ln x`.
///
/// Returns `None` with fewer than two usable points (non-positive values are
/// skipped) or when all `x` coincide.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0 && a.is_finite() && b.is_finite())
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Order observed between two refinements: `ln(e_coarse/e_fine) / ln(ratio)`.
pub fn pairwise_order(e_coarse: f64, e_fine: f64, ratio: f64) -> f64 {
    (e_coarse / e_fine).ln() / ratio.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_power_law() {
        let x = [0.1, 0.05, 0.025];
        let y: Vec<f64> = x.iter().map(|h: &f64| 3.0 * h.powi(4)).collect();
        let p = log_log_slope(&x, &y).unwrap();
        assert!((p - 4.0).abs() < 1e-12);
    }

    #[test]
    fn single_point_has_no_fit() {
        assert!(log_log_slope(&[1.0], &[2.0]).is_none());
    }

    #[test]
    fn pairwise() {
        assert!((pairwise_order(16.0, 1.0, 2.0) - 4.0).abs() < 1e-12);
    }
}
