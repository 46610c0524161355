//! Special-function kernels shared by the analytic modules.
//!
//! Hermite polynomials are evaluated by exact three-term recurrence, never by
//! asymptotic expansion. Degrees stay below `2 * MAX_FOCK_N + 1`, which keeps
//! every value representable in `f64` for the arguments that occur here.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex number used for characteristic-function arguments and
/// intermediate values that are only real after cancellation.
pub type ComplexScalar = Complex64;

/// Imaginary parts up to `REALITY_TOL * (1 + |re|)` are treated as rounding.
pub const REALITY_TOL: f64 = 1e-9;

/// Physicists' Hermite polynomial `H_n(x)`.
pub fn hermite(n: u32, x: ComplexScalar) -> ComplexScalar {
    let mut prev = Complex64::new(1.0, 0.0);
    if n == 0 {
        return prev;
    }
    let mut cur = x * 2.0;
    for k in 1..n {
        let next = x * cur * 2.0 - prev * (2.0 * k as f64);
        prev = cur;
        cur = next;
    }
    cur
}

/// Real-argument convenience wrapper around [`hermite`].
pub fn hermite_real(n: u32, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for k in 1..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// The homogenised Hermite polynomial
/// `G_n(s, y) = n! Σ_k (-1)^k s^k (2y)^(n-2k) / (k! (n-2k)!)`.
///
/// For `s > 0` this is `s^(n/2) H_n(y / √s)`, but the polynomial form has no
/// branch cut and no division, so `s = 0` and complex `s` are fine. Evaluated
/// with the recurrence `G_{k+1} = 2y G_k - 2k s G_{k-1}`.
pub fn scaled_hermite(n: u32, s: ComplexScalar, y: ComplexScalar) -> ComplexScalar {
    let mut prev = Complex64::new(1.0, 0.0);
    if n == 0 {
        return prev;
    }
    let mut cur = y * 2.0;
    for k in 1..n {
        let next = y * cur * 2.0 - s * prev * (2.0 * k as f64);
        prev = cur;
        cur = next;
    }
    cur
}

/// Terminating Gauss series `2F1(-2 m1, -2 m2; c; z)`.
///
/// The series stops after `min(2 m1, 2 m2) + 1` terms. `c` must not be a
/// non-positive integer; in this crate it is always `1/2 - m1 - m2`.
pub fn hyp2f1_terminating(m1: u32, m2: u32, c: f64, z: f64) -> Result<f64> {
    if c <= 0.0 && c.fract() == 0.0 {
        return Err(Error::PoleParameter(c));
    }
    let a = -2.0 * m1 as f64;
    let b = -2.0 * m2 as f64;
    let kmax = 2 * m1.min(m2);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..kmax {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
    }
    Ok(sum)
}

/// `Γ(k + 1/2)` by upward recurrence from `Γ(1/2) = √π`.
pub fn gamma_half(k: u32) -> f64 {
    let mut g = std::f64::consts::PI.sqrt();
    for j in 1..=k {
        g *= j as f64 - 0.5;
    }
    g
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Converts a provably real quantity computed in complex arithmetic.
pub fn into_real(z: ComplexScalar, quantity: &'static str) -> Result<f64> {
    if !z.re.is_finite() || !z.im.is_finite() || z.im.abs() > REALITY_TOL * (1.0 + z.re.abs()) {
        return Err(Error::ImaginaryResidue {
            quantity,
            real: z.re,
            imag: z.im,
        });
    }
    Ok(z.re)
}

/// Converts a quantity that should be purely imaginary to its imaginary part.
pub fn into_imag(z: ComplexScalar, quantity: &'static str) -> Result<f64> {
    into_real(Complex64::new(z.im, -z.re), quantity)
}
