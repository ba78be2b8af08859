//! Finite-difference stencils.

use std::ops::{Add, Mul, Sub};

use crate::{Mat3, Vec3};

/// Default spatial step for the 4th-order stencils (domain units).
pub const DEFAULT_STEP: f64 = 1e-3;

/// 4th-order central difference `f'(x)`.
pub fn central4<T, F>(f: F, x: f64, h: f64) -> T
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    F: Fn(f64) -> T,
{
    let d1 = f(x + h) - f(x - h);
    let d2 = f(x + 2.0 * h) - f(x - 2.0 * h);
    (d1 * 8.0 - d2) * (1.0 / (12.0 * h))
}

/// 4th-order central gradient of a scalar field.
pub fn gradient4<F: Fn(&Vec3) -> f64>(f: F, x: &Vec3, h: f64) -> Vec3 {
    let mut g = Vec3::zeros();
    for j in 0..3 {
        let e = Vec3::ith(j, 1.0);
        g[j] = central4(|s| f(&(x + e * s)), 0.0, h);
    }
    g
}

/// 4th-order central Jacobian of a vector field: `out[(i, j)] = ∂f_i/∂x_j`.
pub fn jacobian4<F: Fn(&Vec3) -> Vec3>(f: F, x: &Vec3, h: f64) -> Mat3 {
    let mut m = Mat3::zeros();
    for j in 0..3 {
        let e = Vec3::ith(j, 1.0);
        let col = central4(|s| f(&(x + e * s)), 0.0, h);
        m.set_column(j, &col);
    }
    m
}

/// Curl from a velocity gradient `G[(i, j)] = ∂u_i/∂x_j`.
pub fn curl_from_gradient(g: &Mat3) -> Vec3 {
    Vec3::new(
        g[(2, 1)] - g[(1, 2)],
        g[(0, 2)] - g[(2, 0)],
        g[(1, 0)] - g[(0, 1)],
    )
}

/// 4th-order derivative of uniformly spaced samples on an open interval,
/// using one-sided stencils at the two first and two last nodes.
///
/// Needs at least 5 samples.
pub fn open_derivative4<T>(v: &[T], h: f64) -> Vec<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = v.len();
    assert!(n >= 5, "open_derivative4 needs at least 5 samples");
    let s = 1.0 / (12.0 * h);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let d = match i {
            0 => v[0] * -25.0 + v[1] * 48.0 + v[2] * -36.0 + v[3] * 16.0 + v[4] * -3.0,
            1 => v[0] * -3.0 + v[1] * -10.0 + v[2] * 18.0 + v[3] * -6.0 + v[4],
            i if i == n - 2 => {
                v[n - 1] * 3.0 + v[n - 2] * 10.0 + v[n - 3] * -18.0 + v[n - 4] * 6.0 - v[n - 5]
            }
            i if i == n - 1 => {
                v[n - 1] * 25.0
                    + v[n - 2] * -48.0
                    + v[n - 3] * 36.0
                    + v[n - 4] * -16.0
                    + v[n - 5] * 3.0
            }
            i => (v[i + 1] - v[i - 1]) * 8.0 - (v[i + 2] - v[i - 2]),
        };
        out.push(d * s);
    }
    out
}

/// 4th-order central derivative of samples of a periodic function
/// (`v[n]` is identified with `v[0]`).
pub fn periodic_derivative4<T>(v: &[T], h: f64) -> Vec<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = v.len();
    assert!(n >= 5, "periodic_derivative4 needs at least 5 samples");
    let at = |i: isize| v[i.rem_euclid(n as isize) as usize];
    (0..n as isize)
        .map(|i| ((at(i + 1) - at(i - 1)) * 8.0 - (at(i + 2) - at(i - 2))) * (1.0 / (12.0 * h)))
        .collect()
}

/// 2nd-order derivative of uniformly spaced samples on an open interval
/// (central inside, 2nd-order one-sided at the ends). Exact for linear data.
pub fn open_derivative2<T>(v: &[T], h: f64) -> Vec<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
{
    let n = v.len();
    assert!(n >= 3, "open_derivative2 needs at least 3 samples");
    let s = 1.0 / (2.0 * h);
    (0..n)
        .map(|i| {
            let d = if i == 0 {
                v[0] * -3.0 + v[1] * 4.0 - v[2]
            } else if i == n - 1 {
                v[n - 1] * 3.0 - v[n - 2] * 4.0 + v[n - 3]
            } else {
                v[i + 1] - v[i - 1]
            };
            d * s
        })
        .collect()
}
