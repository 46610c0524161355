//! Closed-form relaxation of an initial squeezed coherent state.
//!
//! The characteristic-function exponent stays quadratic for all times,
//! `v(x, y, t) = A x + B y + a x² + b y² + c x y`, so means, variances and the
//! purity entropy `S = -ln Tr ρ²` all follow from five coefficients.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classical::gaussian_energy_moments;
use crate::error::{invalid, Result};
use crate::model::{GaussianInitialState, OscillatorParams, ThermalBath};
use crate::roots;
use crate::special::{into_imag, ComplexScalar};

/// Default Γt horizon for enumerating extrema of the oscillating variance term.
pub const DEFAULT_V2_HORIZON: f64 = 10.0;

/// Coefficients of a quadratic characteristic-function exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticGcf {
    /// Coefficient of x (conjugate to p).
    pub lin_x: ComplexScalar,
    /// Coefficient of y (conjugate to q).
    pub lin_y: ComplexScalar,
    pub quad_xx: f64,
    pub quad_yy: f64,
    pub quad_xy: f64,
}

impl QuadraticGcf {
    pub fn evaluate(&self, x: f64, y: f64) -> ComplexScalar {
        self.lin_x * x
            + self.lin_y * y
            + self.quad_xx * x * x
            + self.quad_yy * y * y
            + self.quad_xy * x * y
    }

    /// `4ab - c²`, positive whenever the state has spread in both quadratures.
    pub fn dispersion_determinant(&self) -> f64 {
        4.0 * self.quad_xx * self.quad_yy - self.quad_xy * self.quad_xy
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

    /// Purity entropy `ln(2 √(4ab - c²))` of a quantum Gaussian state (ħ = 1).
    pub fn quantum_entropy(&self) -> f64 {
        (2.0 * self.dispersion_determinant().sqrt()).ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhaseTag {
    /// S(t) rises monotonically to its equilibrium value.
    MonotoneFromBelow,
    /// S(t) overshoots once and decays back from above.
    SingleHump,
    /// S(t) has a maximum followed by a minimum below equilibrium.
    DoubleExtremum,
}

impl PhaseTag {
    pub fn extremum_count(self) -> usize {
        match self {
            PhaseTag::MonotoneFromBelow => 0,
            PhaseTag::SingleHump => 1,
            PhaseTag::DoubleExtremum => 2,
        }
    }
}

/// Qualitative shape of an entropy curve, with the Γt of its extrema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxationPhase {
    tag: PhaseTag,
    extremum_times: Vec<f64>,
}

impl RelaxationPhase {
    pub fn new(tag: PhaseTag, extremum_times: Vec<f64>) -> Result<Self> {
        if extremum_times.len() != tag.extremum_count() {
            return Err(invalid(
                "extremum_times",
                format!(
                    "{:?} needs {} times, got {}",
                    tag,
                    tag.extremum_count(),
                    extremum_times.len()
                ),
            ));
        }
        if extremum_times.iter().any(|t| !(t.is_finite() && *t > 0.0))
            || extremum_times.windows(2).any(|w| w[1] <= w[0])
        {
            return Err(invalid(
                "extremum_times",
                "times must be positive and increasing",
            ));
        }
        Ok(Self {
            tag,
            extremum_times,
        })
    }

    pub fn monotone() -> Self {
        Self {
            tag: PhaseTag::MonotoneFromBelow,
            extremum_times: Vec::new(),
        }
    }

    pub fn tag(&self) -> PhaseTag {
        self.tag
    }

    pub fn extremum_times(&self) -> &[f64] {
        &self.extremum_times
    }
}

/// Dimensionless q-variance `V = (Δq)²/σ_c² = V1 + V2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QVariance {
    pub v: f64,
    /// Part shared by every Gaussian state, `(1 - e^{-2Γt})(1 + 2N_β)`.
    pub v1: f64,
    /// Squeezing-dependent remainder, decaying as `e^{-2Γt}`.
    pub v2: f64,
}

/// Coefficients of the quadratic exponent at physical time `t`.
pub fn gcf_coefficients(
    params: &OscillatorParams,
    state: &GaussianInitialState,
    bath: &ThermalBath,
    t: f64,
) -> QuadraticGcf {
    let w = params.omega();
    let g = params.gamma_damp();
    let s2 = state.sigma2(params);
    let k = bath.thermal_factor();
    let (sin, cos) = (w * t).sin_cos();
    let decay = (-g * t).exp();
    let decay2 = (-2.0 * g * t).exp();
    let grow = -(-2.0 * g * t).exp_m1();

    let lin_x = Complex64::new(0.0, decay * (state.p_bar * cos - state.q_bar * w * sin));
    let lin_y = Complex64::new(0.0, decay * (state.q_bar * cos + state.p_bar / w * sin));
    let quad_xx =
        -0.25 * w * k * grow - 0.5 * decay2 * (cos * cos / (4.0 * s2) + s2 * w * w * sin * sin);
    let quad_yy =
        -0.25 / w * k * grow - 0.5 * decay2 * (s2 * cos * cos + sin * sin / (4.0 * s2 * w * w));
    let quad_xy = decay2 / (8.0 * s2 * w) * (4.0 * s2 * s2 * w * w - 1.0) * (2.0 * w * t).sin();
    QuadraticGcf {
        lin_x,
        lin_y,
        quad_xx,
        quad_yy,
        quad_xy,
    }
}

/// `⟨q⟩ = -i ∂v/∂y` at the origin.
pub fn mean_q(gcf: &QuadraticGcf) -> Result<f64> {
    into_imag(gcf.lin_y, "<q>")
}

/// `⟨p⟩ = -i ∂v/∂x` at the origin.
pub fn mean_p(gcf: &QuadraticGcf) -> Result<f64> {
    into_imag(gcf.lin_x, "<p>")
}

/// `e^{2S}` as a function of `x = e^{-2Γt}`, and its x-derivative.
fn entropy_kernel(bath: &ThermalBath, squeeze_r: f64, gt: f64) -> (f64, f64, f64) {
    let k = bath.thermal_factor();
    let ch = (2.0 * squeeze_r).cosh();
    let x = (-2.0 * gt).exp();
    let y = -(-2.0 * gt).exp_m1();
    let f = x * x + y * y * k * k + 2.0 * y * x * k * ch;
    let df = 2.0 * x - 2.0 * y * k * k + 2.0 * k * ch * (y - x);
    (x, f, df)
}

/// Purity entropy of the relaxing Gaussian state at dimensionless time Γt.
pub fn entropy_gaussian(bath: &ThermalBath, squeeze_r: f64, gt: f64) -> f64 {
    let (_, f, _) = entropy_kernel(bath, squeeze_r, gt);
    0.5 * f.ln()
}

/// Entropy production rate `dS/d(Γt)`.
pub fn entropy_rate_gaussian(bath: &ThermalBath, squeeze_r: f64, gt: f64) -> f64 {
    let (x, f, df) = entropy_kernel(bath, squeeze_r, gt);
    -x * df / f
}

/// `R(0)/Γ = 2[(2N_β + 1) cosh 2r - 1]`.
pub fn initial_entropy_rate(bath: &ThermalBath, squeeze_r: f64) -> f64 {
    2.0 * (bath.thermal_factor() * (2.0 * squeeze_r).cosh() - 1.0)
}

/// Critical bath occupation `N_c = sinh² r` separating the two entropy phases.
pub fn critical_n_beta(squeeze_r: f64) -> f64 {
    squeeze_r.sinh().powi(2)
}

/// Critical damping ratio `γ_c = sinh 2|r|` below which V2 oscillates.
pub fn critical_damping_ratio(squeeze_r: f64) -> f64 {
    (2.0 * squeeze_r.abs()).sinh()
}

/// Γt of the entropy maximum, present only for `N_β < sinh² r`.
pub fn hump_time(bath: &ThermalBath, squeeze_r: f64) -> Option<f64> {
    let nb = bath.n_beta();
    if nb >= critical_n_beta(squeeze_r) {
        return None;
    }
    let k = bath.thermal_factor();
    let ch = (2.0 * squeeze_r).cosh();
    let num = 2.0 + 4.0 * nb + 4.0 * nb * nb - 2.0 * k * ch;
    let den = k * (k - ch);
    Some(0.5 * (num / den).ln())
}

/// Maximum entropy reached on the hump, present only for `N_β < sinh² r`.
pub fn entropy_max(bath: &ThermalBath, squeeze_r: f64) -> Option<f64> {
    let nb = bath.n_beta();
    if nb >= critical_n_beta(squeeze_r) {
        return None;
    }
    let k = bath.thermal_factor();
    let ch = (2.0 * squeeze_r).cosh();
    let num = k * k * (ch * ch - 1.0);
    let den = 2.0 * (k * (ch - 1.0) - 2.0 * nb * nb);
    Some(0.5 * (num / den).ln())
}

/// Two-phase classification; the tie `N_β = sinh² r` is monotone.
pub fn classify_gaussian_phase(bath: &ThermalBath, squeeze_r: f64) -> RelaxationPhase {
    match hump_time(bath, squeeze_r) {
        Some(t) if t.is_finite() && t > 0.0 => RelaxationPhase {
            tag: PhaseTag::SingleHump,
            extremum_times: vec![t],
        },
        _ => RelaxationPhase::monotone(),
    }
}

/// Dimensionless q-variance at physical time `t`.
pub fn q_variance(
    params: &OscillatorParams,
    state: &GaussianInitialState,
    bath: &ThermalBath,
    t: f64,
) -> QVariance {
    let gt = params.gamma_damp() * t;
    let (sin, cos) = (params.omega() * t).sin_cos();
    let r = state.squeeze_r;
    let v1 = -(-2.0 * gt).exp_m1() * bath.thermal_factor();
    let v2 = (-2.0 * gt).exp() * ((-2.0 * r).exp() * cos * cos + (2.0 * r).exp() * sin * sin);
    QVariance { v: v1 + v2, v1, v2 }
}

/// `(⟨a†a⟩, ⟨(ΔE)²⟩/ω²)` at physical time `t`.
pub fn energy_moments(
    params: &OscillatorParams,
    state: &GaussianInitialState,
    bath: &ThermalBath,
    t: f64,
) -> Result<(f64, f64)> {
    let gcf = gcf_coefficients(params, state, bath, t);
    let w = params.omega();
    let (e, var) = gaussian_energy_moments(
        w,
        (mean_q(&gcf)?, mean_p(&gcf)?),
        (gcf.var_q(), gcf.cov_qp(), gcf.var_p()),
    );
    // the symmetrized covariance overstates ⟨H²⟩ by ω²/4
    Ok((e / w - 0.5, var / (w * w) - 0.25))
}

/// V2 as a function of Γt for damping ratio γ.
pub fn v2_curve(squeeze_r: f64, gamma_ratio: f64, gt: f64) -> f64 {
    let theta = gt / gamma_ratio;
    let (sin, cos) = theta.sin_cos();
    (-2.0 * gt).exp() * ((-2.0 * squeeze_r).exp() * cos * cos + (2.0 * squeeze_r).exp() * sin * sin)
}

/// All Γt in `(0, horizon]` where dV2/dt vanishes.
///
/// With `ϑ = Γt/γ` the stationarity condition is
/// `h(ϑ) = γ cos²ϑ - (e^{4r} - 1) sinϑ cosϑ + γ e^{4r} sin²ϑ = 0`. In each
/// half-period `h` is positive at both ends and dips to its minimum at
/// `tan ϑ* = (e^{4r} - 1)/(2γ e^{4r})`, which is negative iff `γ < sinh 2|r|`;
/// the two roots are bracketed on either side of `ϑ*` and bisected.
pub fn v2_extrema(squeeze_r: f64, gamma_ratio: f64, horizon: f64) -> Result<Vec<f64>> {
    if !(gamma_ratio.is_finite() && gamma_ratio > 0.0) {
        return Err(invalid("gamma_ratio", "must be finite and > 0"));
    }
    if gamma_ratio >= critical_damping_ratio(squeeze_r) {
        return Ok(Vec::new());
    }
    let e4 = (4.0 * squeeze_r).exp();
    let h = |th: f64| {
        let (s, c) = th.sin_cos();
        gamma_ratio * c * c - (e4 - 1.0) * s * c + gamma_ratio * e4 * s * s
    };
    let tau_star = (e4 - 1.0) / (2.0 * gamma_ratio * e4);
    let offset = tau_star.atan();
    let half = std::f64::consts::FRAC_PI_2;
    let base = if offset > 0.0 { 0.0 } else { -half };
    let mut out = Vec::new();
    let mut k = 0u32;
    loop {
        let lo = k as f64 * std::f64::consts::PI + base;
        let mid = k as f64 * std::f64::consts::PI + offset;
        let hi = lo + half;
        k += 1;
        if hi < 0.0 {
            continue;
        }
        if gamma_ratio * lo.max(0.0) > horizon {
            break;
        }
        for (a, b) in [(lo, mid), (mid, hi)] {
            let root = roots::bisect(h, a, b, 1e-12)?;
            let gt = gamma_ratio * root;
            if gt > 0.0 && gt <= horizon {
                out.push(gt);
            }
        }
    }
    Ok(out)
}
