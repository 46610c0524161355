//! Classical damped oscillator under the Fokker-Planck equation, started from
//! a point (q̄, p̄) in phase space.
//!
//! Units M = k_B = 1. The damping enters through `α = √(1 - 4ω²/Γ²)`, real
//! when overdamped and imaginary when underdamped. Every coefficient is
//! written with the entire functions `ch(z) = (cosh z - 1)/z²` and
//! `sh(z) = sinh z / z`, which stay finite through critical damping α = 0.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::OscillatorParams;
use crate::roots::{self, count_extrema, open_grid};
use crate::special::{into_real, ComplexScalar};

/// λ search bracket for [`classical_lambda_critical`].
pub const LAMBDA_BRACKET: (f64, f64) = (0.01, 50.0);
/// Γt horizon and size of the grid on which energy-variance extrema are counted.
pub const LAMBDA_GRID: (f64, usize) = (15.0, 4000);
const LAMBDA_TOL: f64 = 1e-3;
const VARIANCE_NOISE: f64 = 1e-12;

/// Characteristic-function coefficients of the classical phase-space density,
/// `v(x, y; t) = Ãx + B̃y + ãx² + b̃y² + c̃xy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalGcf {
    pub lin_x: ComplexScalar,
    pub lin_y: ComplexScalar,
    pub quad_xx: f64,
    pub quad_yy: f64,
    pub quad_xy: f64,
    pub alpha: ComplexScalar,
}

impl ClassicalGcf {
    pub fn mean_q(&self) -> f64 {
        self.lin_y.im
    }

    pub fn mean_p(&self) -> f64 {
        self.lin_x.im
    }

    pub fn var_q(&self) -> f64 {
        -2.0 * self.quad_yy
    }

    pub fn var_p(&self) -> f64 {
        -2.0 * self.quad_xx
    }

    pub fn cov_qp(&self) -> f64 {
        -self.quad_xy
    }
}

/// Gaussian smearing cell for the coarse-grained density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoarseGrainSpec {
    sigma_q2: f64,
    sigma_p2: f64,
}

impl CoarseGrainSpec {
    pub fn new(sigma_q2: f64, sigma_p2: f64) -> Result<Self> {
        for (name, v) in [("sigma_q2", sigma_q2), ("sigma_p2", sigma_p2)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(name, format!("must be finite and > 0, got {v}")));
            }
        }
        Ok(Self { sigma_q2, sigma_p2 })
    }

    /// `σ_q² = T/Γ²`, `σ_p² = T`.
    pub fn canonical(params: &OscillatorParams, temperature: f64) -> Result<Self> {
        let g = params.gamma_damp();
        Self::new(temperature / (g * g), temperature)
    }

    pub fn sigma_q2(&self) -> f64 {
        self.sigma_q2
    }

    pub fn sigma_p2(&self) -> f64 {
        self.sigma_p2
    }
}

/// `α = √(1 - 4ω²/Γ²)`; purely imaginary when underdamped.
pub fn damping_alpha(params: &OscillatorParams) -> ComplexScalar {
    let s = 1.0 - 4.0 * (params.omega() / params.gamma_damp()).powi(2);
    if s >= 0.0 {
        Complex64::new(s.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-s).sqrt())
    }
}

/// Parameters with the given Γ and α, where α is real in [0, 1) or purely
/// imaginary.
pub fn params_from_alpha(gamma_damp: f64, alpha: ComplexScalar) -> Result<OscillatorParams> {
    if alpha.re != 0.0 && alpha.im != 0.0 {
        return Err(invalid(
            "alpha",
            format!("must be real or purely imaginary, got {alpha}"),
        ));
    }
    let a2 = alpha.re * alpha.re - alpha.im * alpha.im;
    if !(a2 < 1.0) {
        return Err(invalid("alpha", format!("needs α² < 1, got α = {alpha}")));
    }
    OscillatorParams::new(0.5 * gamma_damp * (1.0 - a2).sqrt(), gamma_damp)
}

fn small(z: Complex64) -> bool {
    z.norm() < 1.0
}

/// `(cosh z - 1)/z²`.
fn ch(z: Complex64) -> Complex64 {
    if small(z) {
        let z2 = z * z;
        let mut term = Complex64::new(0.5, 0.0);
        let mut sum = term;
        for k in 1..20 {
            term *= z2 / ((2 * k + 1) as f64 * (2 * k + 2) as f64);
            sum += term;
        }
        sum
    } else {
        (z.cosh() - 1.0) / (z * z)
    }
}

/// `sinh z / z`.
fn sh(z: Complex64) -> Complex64 {
    if small(z) {
        let z2 = z * z;
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 1..20 {
            term *= z2 / ((2 * k) as f64 * (2 * k + 1) as f64);
            sum += term;
        }
        sum
    } else {
        z.sinh() / z
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid("t", format!("must be finite and >= 0, got {t}")));
    }
    Ok(())
}

fn check_temperature(temperature: f64) -> Result<()> {
    if !(temperature.is_finite() && temperature > 0.0) {
        return Err(invalid(
            "temperature",
            format!("must be finite and > 0, got {temperature}"),
        ));
    }
    Ok(())
}

/// Coefficients at time t of the density that starts at the point (q̄, p̄).
pub fn classical_coefficients(
    params: &OscillatorParams,
    temperature: f64,
    q_bar: f64,
    p_bar: f64,
    t: f64,
) -> Result<ClassicalGcf> {
    check_time(t)?;
    check_temperature(temperature)?;
    let g = params.gamma_damp();
    let w2 = params.omega().powi(2);
    let alpha = damping_alpha(params);
    let tau = g * t;
    let decay = (-tau).exp();
    let grow = tau.exp_m1();

    let z = alpha * tau;
    let (c2, s1) = (ch(z) * tau * tau, sh(z) * tau);
    let a = -0.5 * temperature * decay * (grow - c2 + s1);
    let b = -0.5 * temperature * decay / w2 * (grow - c2 - s1);
    let c = -2.0 * temperature * decay / g * c2;

    let half = alpha * (0.5 * tau);
    let cosh_half = half.cosh();
    let sinh_half = sh(half) * (0.5 * tau);
    let half_decay = (-0.5 * tau).exp();
    let i = Complex64::i();
    let lin_x =
        i * half_decay * (p_bar * (cosh_half - sinh_half) - 2.0 * w2 / g * q_bar * sinh_half);
    let lin_y = i * half_decay * (2.0 * p_bar / g * sinh_half + q_bar * (cosh_half + sinh_half));

    Ok(ClassicalGcf {
        lin_x: Complex64::new(0.0, into_real(-i * lin_x, "classical coefficient A")?),
        lin_y: Complex64::new(0.0, into_real(-i * lin_y, "classical coefficient B")?),
        quad_xx: into_real(a, "classical coefficient a")?,
        quad_yy: into_real(b, "classical coefficient b")?,
        quad_xy: into_real(c, "classical coefficient c")?,
        alpha,
    })
}

/// Position variance `-2b̃(t)`; grows from 0 to `T/ω²`.
pub fn classical_q_variance(params: &OscillatorParams, temperature: f64, t: f64) -> Result<f64> {
    Ok(classical_coefficients(params, temperature, 0.0, 0.0, t)?.var_q())
}

/// `(⟨E⟩, ⟨(ΔE)²⟩)` for `E = p²/2 + ω²q²/2` under the Gaussian density.
pub fn classical_energy_moments(
    params: &OscillatorParams,
    temperature: f64,
    q_bar: f64,
    p_bar: f64,
    t: f64,
) -> Result<(f64, f64)> {
    let gcf = classical_coefficients(params, temperature, q_bar, p_bar, t)?;
    Ok(gaussian_energy_moments(
        params.omega(),
        (gcf.mean_q(), gcf.mean_p()),
        (gcf.var_q(), gcf.cov_qp(), gcf.var_p()),
    ))
}

/// Mean and variance of `½(ω²q² + p²)` for a Gaussian with the given mean
/// and covariance `(σ_qq, σ_qp, σ_pp)`.
pub fn gaussian_energy_moments(omega: f64, mean: (f64, f64), cov: (f64, f64, f64)) -> (f64, f64) {
    let w2 = omega * omega;
    let (mq, mp) = mean;
    let (sqq, sqp, spp) = cov;
    let e = 0.5 * (w2 * (mq * mq + sqq) + mp * mp + spp);
    // ½ tr(WΣWΣ) + μᵀWΣWμ with W = diag(ω², 1)
    let trace = 0.5 * (w2 * w2 * sqq * sqq + 2.0 * w2 * sqp * sqp + spp * spp);
    let wq = w2 * mq;
    let quad = wq * wq * sqq + 2.0 * wq * mp * sqp + mp * mp * spp;
    (e, trace + quad)
}

/// `V(Γt) = ⟨(ΔE)²⟩/T²` for q̄ = 0, p̄ = √(2λT).
pub fn normalized_energy_variance(alpha: ComplexScalar, lambda: f64, gt: f64) -> Result<f64> {
    let params = params_from_alpha(1.0, alpha)?;
    let (_, var) = classical_energy_moments(&params, 1.0, 0.0, (2.0 * lambda).sqrt(), gt)?;
    Ok(var)
}

fn variance_has_extremum(alpha: ComplexScalar, lambda: f64, grid: &[f64]) -> Result<bool> {
    let vals = grid
        .iter()
        .map(|&gt| normalized_energy_variance(alpha, lambda, gt))
        .collect::<Result<Vec<_>>>()?;
    Ok(count_extrema(&vals, VARIANCE_NOISE) > 0)
}

/// Smallest `λ = E₀/T` at which the energy variance acquires an interior
/// extremum, by bisection on λ over [`LAMBDA_BRACKET`] to 1e-3.
pub fn classical_lambda_critical(alpha: ComplexScalar) -> Result<f64> {
    params_from_alpha(1.0, alpha)?;
    let grid = open_grid(LAMBDA_GRID.0, LAMBDA_GRID.1);
    let (lo, hi) = LAMBDA_BRACKET;
    // the predicate is true above λ_c, so bisect its negation
    roots::bisect_predicate(
        |lambda| !variance_has_extremum(alpha, lambda, &grid).unwrap_or(true),
        lo,
        hi,
        LAMBDA_TOL,
    )
}

/// Fine-grained entropy with the reference cell `h = 4πT/Γ`, which makes it
/// independent of T. Diverges to -∞ at t = 0.
pub fn classical_entropy(params: &OscillatorParams, t: f64) -> Result<f64> {
    check_time(t)?;
    if t == 0.0 {
        return Err(Error::NonPositiveLogArgument {
            quantity: "classical entropy at t = 0",
            value: 0.0,
        });
    }
    let alpha = damping_alpha(params);
    let tau = params.gamma_damp() * t;
    let x = (-tau).exp();
    let one_minus_a2 = 1.0 - (alpha * alpha).re;
    let num = into_real(
        (-tau).exp_m1().powi(2) - 2.0 * x * tau * tau * ch(alpha * tau),
        "classical entropy argument",
    )?;
    let arg = 4.0 * num / one_minus_a2;
    if !(arg > 0.0) {
        return Err(Error::NonPositiveLogArgument {
            quantity: "classical entropy",
            value: arg,
        });
    }
    Ok(0.5 * arg.ln())
}

/// Equilibrium value `½ ln[4/(1 - α²)]` of [`classical_entropy`].
pub fn classical_entropy_limit(params: &OscillatorParams) -> f64 {
    let alpha = damping_alpha(params);
    0.5 * (4.0 / (1.0 - (alpha * alpha).re)).ln()
}

fn coarse_argument(gcf: &ClassicalGcf, spec: &CoarseGrainSpec) -> f64 {
    let a = 0.5 * spec.sigma_p2 - gcf.quad_xx;
    let b = 0.5 * spec.sigma_q2 - gcf.quad_yy;
    4.0 * a * b - gcf.quad_xy * gcf.quad_xy
}

/// Entropy of the density smeared by the Gaussian cell `spec`, shifted so
/// that it vanishes at t = 0.
pub fn coarse_grained_entropy(
    params: &OscillatorParams,
    temperature: f64,
    t: f64,
    spec: &CoarseGrainSpec,
) -> Result<f64> {
    let gcf = classical_coefficients(params, temperature, 0.0, 0.0, t)?;
    let arg = coarse_argument(&gcf, spec);
    if !(arg > 0.0) {
        return Err(Error::NonPositiveLogArgument {
            quantity: "coarse-grained entropy",
            value: arg,
        });
    }
    let arg0 = spec.sigma_p2 * spec.sigma_q2;
    Ok(0.5 * (arg / arg0).ln())
}

/// Equilibrium value `½ ln[2(5 - α²)/(1 - α²)]` for the canonical cell.
pub fn coarse_grained_entropy_limit(params: &OscillatorParams) -> f64 {
    let alpha = damping_alpha(params);
    let a2 = (alpha * alpha).re;
    0.5 * (2.0 * (5.0 - a2) / (1.0 - a2)).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn by_alpha(alpha: Complex64) -> OscillatorParams {
        params_from_alpha(1.0, alpha).unwrap()
    }

    #[test]
    fn entire_functions_match_direct_forms() {
        for &z in &[
            Complex64::new(0.3, 0.0),
            Complex64::new(0.0, 0.9),
            Complex64::new(0.99, 0.0),
            Complex64::new(1.5, -0.2),
        ] {
            let direct_ch = (z.cosh() - 1.0) / (z * z);
            let direct_sh = z.sinh() / z;
            assert!((ch(z) - direct_ch).norm() < 1e-9, "{z}");
            assert!((sh(z) - direct_sh).norm() < 1e-12, "{z}");
        }
        let z = Complex64::new(0.0, 1.0);
        assert!((ch(z) - (1.0 - 1f64.cos())).norm() < 1e-15);
        let tiny = Complex64::new(1e-5, 0.0);
        assert!((ch(tiny) - 0.5).norm() < 1e-11 && (sh(tiny) - 1.0).norm() < 1e-10);
    }

    #[test]
    fn initial_coefficients() {
        let p = OscillatorParams::new(1.0, 0.5).unwrap();
        let g = classical_coefficients(&p, 1.0, 0.3, -1.2, 0.0).unwrap();
        assert_eq!(g.lin_x, Complex64::new(0.0, -1.2));
        assert_eq!(g.lin_y, Complex64::new(0.0, 0.3));
        assert_eq!((g.quad_xx, g.quad_yy, g.quad_xy), (0.0, 0.0, 0.0));
    }

    #[test]
    fn equilibrium_coefficients() {
        for &(w, gam) in &[(1.0, 0.5), (1.0, 3.0), (2.0, 0.1)] {
            let p = OscillatorParams::new(w, gam).unwrap();
            let g = classical_coefficients(&p, 1.5, 1.0, 1.0, 400.0 / gam).unwrap();
            assert!((g.quad_xx + 0.75).abs() < 1e-10);
            assert!((g.quad_yy + 0.75 / (w * w)).abs() < 1e-10);
            assert!(g.quad_xy.abs() < 1e-10);
            assert!(g.mean_q().abs() < 1e-10 && g.mean_p().abs() < 1e-10);
        }
    }

    #[test]
    fn printed_variance_form_agrees() {
        // ⟨(Δq)²⟩ = 4T/(Γ²α²(1-α²)) [α² + e^{-Γt}(1 - α² - cosh αΓt - α sinh αΓt)]
        for &alpha in &[
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 10.0),
            Complex64::new(0.0, 2.0),
        ] {
            let p = by_alpha(alpha);
            let a2 = alpha * alpha;
            for k in 1..40 {
                let t = 0.25 * k as f64;
                let z = alpha * t;
                let printed = 4.0 / (a2 * (1.0 - a2))
                    * (a2 + (-t).exp() * (1.0 - a2 - z.cosh() - alpha * z.sinh()));
                let got = classical_q_variance(&p, 1.0, t).unwrap();
                assert!(
                    (got - printed.re).abs() < 1e-9 * got.max(1.0),
                    "alpha={alpha} t={t}"
                );
            }
        }
    }

    #[test]
    fn q_variance_non_decreasing() {
        for &alpha in &[
            Complex64::new(0.5, 0.0),
            Complex64::new(0.0, 10.0),
            Complex64::new(0.0, 0.0),
        ] {
            let p = by_alpha(alpha);
            let mut last = classical_q_variance(&p, 1.0, 0.0).unwrap();
            assert_eq!(last, 0.0);
            for k in 1..=2000 {
                let v = classical_q_variance(&p, 1.0, 0.01 * k as f64).unwrap();
                assert!(v - last >= -1e-10, "alpha={alpha} k={k}");
                last = v;
            }
            let w2 = p.omega().powi(2);
            assert!((classical_q_variance(&p, 1.0, 200.0).unwrap() - 1.0 / w2).abs() < 1e-9);
        }
    }

    #[test]
    fn critical_damping_is_continuous() {
        let crit = by_alpha(Complex64::new(0.0, 0.0));
        let over = by_alpha(Complex64::new(1e-4, 0.0));
        let under = by_alpha(Complex64::new(0.0, 1e-4));
        for k in 0..30 {
            let t = 0.3 * k as f64;
            let c = classical_coefficients(&crit, 1.0, 0.4, 0.7, t).unwrap();
            for p in [&over, &under] {
                let g = classical_coefficients(p, 1.0, 0.4, 0.7, t).unwrap();
                for (x, y) in [
                    (g.quad_xx, c.quad_xx),
                    (g.quad_yy, c.quad_yy),
                    (g.quad_xy, c.quad_xy),
                    (g.mean_q(), c.mean_q()),
                    (g.mean_p(), c.mean_p()),
                ] {
                    assert!((x - y).abs() < 1e-6, "t={t}");
                }
            }
        }
    }

    #[test]
    fn energy_moment_examples() {
        let p = OscillatorParams::new(1.0, 0.3).unwrap();
        let (e, v) = classical_energy_moments(&p, 1.0, 0.0, (2.0 * 2.5f64).sqrt(), 0.0).unwrap();
        assert!((e - 2.5).abs() < 1e-14 && v == 0.0);
        let (e, v) = classical_energy_moments(&p, 1.7, 0.0, 3.0, 300.0).unwrap();
        assert!((e - 1.7).abs() < 1e-9 && (v - 1.7 * 1.7).abs() < 1e-9);
    }

    #[test]
    fn energy_variance_shapes() {
        let grid = open_grid(15.0, 4000);
        let curve = |alpha, lambda| -> Vec<f64> {
            grid.iter()
                .map(|&g| normalized_energy_variance(alpha, lambda, g).unwrap())
                .collect()
        };
        assert!(count_extrema(&curve(Complex64::new(0.0, 2.0), 5.0), VARIANCE_NOISE) > 0);
        assert_eq!(
            count_extrema(&curve(Complex64::new(0.0, 2.0), 0.25), VARIANCE_NOISE),
            0
        );
        assert_eq!(
            count_extrema(&curve(Complex64::new(0.2, 0.0), 0.3), VARIANCE_NOISE),
            0
        );
    }

    #[test]
    fn fine_entropy_matches_coefficients() {
        for &alpha in &[Complex64::new(0.5, 0.0), Complex64::new(0.0, 3.0)] {
            let p = by_alpha(alpha);
            for &temp in &[0.5, 1.0, 2.0] {
                let g = classical_coefficients(&p, temp, 0.0, 0.0, 1.0).unwrap();
                let det = 4.0 * g.quad_xx * g.quad_yy - g.quad_xy * g.quad_xy;
                let from_coeffs = (p.gamma_damp() / temp).ln() + 0.5 * det.ln();
                assert!((classical_entropy(&p, 1.0).unwrap() - from_coeffs).abs() < 1e-10);
            }
            assert!(
                (classical_entropy(&p, 80.0).unwrap() - classical_entropy_limit(&p)).abs() < 1e-12
            );
        }
        assert!(classical_entropy(&by_alpha(Complex64::new(0.5, 0.0)), 0.0).is_err());
    }

    /// The printed closed form of the canonical coarse-grained entropy.
    fn coarse_closed(alpha: Complex64, tau: f64) -> f64 {
        let a2 = alpha * alpha;
        let x = (-tau).exp();
        let z = alpha * tau;
        let arg = 2.0 * (5.0 - a2) / (1.0 - a2)
            + (13.0 - a2) / a2 * x
            + 4.0 / (1.0 - a2) * x * x
            + x * ((a2 - 13.0) * z.cosh() - alpha * (3.0 + a2) * z.sinh()) / (a2 * (1.0 - a2));
        0.5 * arg.re.ln()
    }

    #[test]
    fn coarse_entropy_matches_closed_form() {
        for &alpha in &[
            Complex64::new(0.9, 0.0),
            Complex64::new(0.0, 10.0),
            Complex64::new(0.3, 0.0),
        ] {
            let p = by_alpha(alpha);
            for &temp in &[0.7, 1.0] {
                let spec = CoarseGrainSpec::canonical(&p, temp).unwrap();
                assert_eq!(coarse_grained_entropy(&p, temp, 0.0, &spec).unwrap(), 0.0);
                for k in 1..50 {
                    let t = 0.2 * k as f64;
                    let got = coarse_grained_entropy(&p, temp, t, &spec).unwrap();
                    assert!(
                        (got - coarse_closed(alpha, t)).abs() < 1e-10,
                        "alpha={alpha} t={t}"
                    );
                }
                // the slowest mode decays as e^{-(1-α)Γt}
                let late = coarse_grained_entropy(&p, temp, 400.0, &spec).unwrap();
                assert!((late - coarse_grained_entropy_limit(&p)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn alpha_mapping() {
        let p = OscillatorParams::new(1.0, 0.5).unwrap();
        let a = damping_alpha(&p);
        assert!(a.re == 0.0 && (a.im - 15f64.sqrt()).abs() < 1e-12);
        let back = params_from_alpha(0.5, a).unwrap();
        assert!((back.omega() - 1.0).abs() < 1e-12);
        assert!(params_from_alpha(1.0, Complex64::new(1.0, 0.0)).is_err());
        assert!(params_from_alpha(1.0, Complex64::new(0.1, 0.1)).is_err());
    }
}
