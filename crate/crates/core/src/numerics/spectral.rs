//! Fourier differentiation of periodic samples.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::Vec3;

/// Derivative with respect to the parameter of uniformly spaced samples of a
/// smooth periodic vector function with the given `period`. The Nyquist mode
/// is dropped for even sample counts.
pub fn periodic_derivative(samples: &[Vec3], period: f64) -> Vec<Vec3> {
    let n = samples.len();
    let mut out = vec![Vec3::zeros(); n];
    if n == 0 {
        return out;
    }
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let base = std::f64::consts::TAU / period;
    for c in 0..3 {
        let mut buf: Vec<Complex<f64>> = samples.iter().map(|v| Complex::new(v[c], 0.0)).collect();
        fwd.process(&mut buf);
        for (k, z) in buf.iter_mut().enumerate() {
            let wave = if 2 * k < n {
                k as f64
            } else if 2 * k == n {
                0.0
            } else {
                k as f64 - n as f64
            };
            *z *= Complex::new(0.0, wave * base);
        }
        inv.process(&mut buf);
        for (o, z) in out.iter_mut().zip(&buf) {
            o[c] = z.re / n as f64;
        }
    }
    out
}

/// Fraction of the non-mean spectral amplitude (2-norm over the three
/// components) carried by wavenumbers `|k| > n/4`. Small values mean the
/// samples resolve the curve.
pub fn spectral_tail(samples: &[Vec3]) -> f64 {
    let n = samples.len();
    if n < 4 {
        return 0.0;
    }
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let (mut high, mut total) = (0.0, 0.0);
    for c in 0..3 {
        let mut buf: Vec<Complex<f64>> = samples.iter().map(|v| Complex::new(v[c], 0.0)).collect();
        fwd.process(&mut buf);
        for (k, z) in buf.iter().enumerate().skip(1) {
            let wave = k.min(n - k);
            let e = z.norm_sqr();
            total += e;
            if 4 * wave > n {
                high += e;
            }
        }
    }
    if total == 0.0 {
        0.0
    } else {
        (high / total).sqrt()
    }
}
