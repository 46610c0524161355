//! Parameter and state types.
//!
//! Natural units throughout: ħ = M = k_B = 1, so the coherent-state width is
//! `σ_c² = 1/(2ω)`. Times passed to the entropy and phase functions are the
//! dimensionless product Γt.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Highest Fock number supported by the closed-form Fock and photon formulas.
pub const MAX_FOCK_N: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    omega: f64,
    gamma_damp: f64,
}

impl OscillatorParams {
    pub fn new(omega: f64, gamma_damp: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(invalid(
                "omega",
                format!("must be finite and > 0, got {omega}"),
            ));
        }
        if !(gamma_damp.is_finite() && gamma_damp > 0.0) {
            return Err(invalid(
                "gamma_damp",
                format!("must be finite and > 0, got {gamma_damp}"),
            ));
        }
        Ok(Self { omega, gamma_damp })
    }

    /// Builds parameters from Γ and the dimensionless ratio γ = Γ/ω.
    pub fn from_damping_ratio(gamma_damp: f64, ratio: f64) -> Result<Self> {
        if !(ratio.is_finite() && ratio > 0.0) {
            return Err(invalid("gamma_ratio", format!("must be > 0, got {ratio}")));
        }
        Self::new(gamma_damp / ratio, gamma_damp)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn gamma_damp(&self) -> f64 {
        self.gamma_damp
    }

    /// γ = Γ/ω.
    pub fn damping_ratio(&self) -> f64 {
        self.gamma_damp / self.omega
    }

    /// Squared coherent-state width σ_c² = ħ/(2Mω).
    pub fn sigma_c2(&self) -> f64 {
        0.5 / self.omega
    }
}

/// Thermal environment, characterised by its mean quantum number N_β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalBath {
    n_beta: f64,
}

impl ThermalBath {
    pub fn new(n_beta: f64) -> Result<Self> {
        if !(n_beta.is_finite() && n_beta >= 0.0) {
            return Err(invalid(
                "n_beta",
                format!("must be finite and >= 0, got {n_beta}"),
            ));
        }
        Ok(Self { n_beta })
    }

    pub fn zero_temperature() -> Self {
        Self { n_beta: 0.0 }
    }

    pub fn n_beta(&self) -> f64 {
        self.n_beta
    }

    /// `2 N_β + 1`, the factor that sets every equilibrium width.
    pub fn thermal_factor(&self) -> f64 {
        2.0 * self.n_beta + 1.0
    }

    /// Equilibrium entropy `ln(1 + 2 N_β)`.
    pub fn equilibrium_entropy(&self) -> f64 {
        (2.0 * self.n_beta).ln_1p()
    }
}

/// Squeezed coherent state centred at (q̄, p̄) with squeeze factor r,
/// `σ = σ_c e^{-r}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianInitialState {
    pub q_bar: f64,
    pub p_bar: f64,
    pub squeeze_r: f64,
}

impl GaussianInitialState {
    pub fn new(q_bar: f64, p_bar: f64, squeeze_r: f64) -> Result<Self> {
        for (name, v) in [("q_bar", q_bar), ("p_bar", p_bar), ("squeeze_r", squeeze_r)] {
            if !v.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        Ok(Self {
            q_bar,
            p_bar,
            squeeze_r,
        })
    }

    pub fn squeezed_vacuum(squeeze_r: f64) -> Result<Self> {
        Self::new(0.0, 0.0, squeeze_r)
    }

    /// Builds the state from the complex amplitude `α = α₁ + iα₂`, where
    /// `q̄ = 2σ_c α₁` and `p̄ = α₂/σ_c`.
    pub fn from_amplitude(
        params: &OscillatorParams,
        alpha1: f64,
        alpha2: f64,
        squeeze_r: f64,
    ) -> Result<Self> {
        let sc = params.sigma_c2().sqrt();
        Self::new(2.0 * sc * alpha1, alpha2 / sc, squeeze_r)
    }

    /// Returns `(α₁, α₂)`.
    pub fn amplitude(&self, params: &OscillatorParams) -> (f64, f64) {
        let sc = params.sigma_c2().sqrt();
        (self.q_bar / (2.0 * sc), self.p_bar * sc)
    }

    /// Position variance σ² of the initial wave packet.
    pub fn sigma2(&self, params: &OscillatorParams) -> f64 {
        params.sigma_c2() * (-2.0 * self.squeeze_r).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockInitialState {
    n: u32,
}

impl FockInitialState {
    pub fn new(n: u32) -> Result<Self> {
        if n > MAX_FOCK_N {
            return Err(invalid(
                "n",
                format!("supported range is 0..={MAX_FOCK_N}, got {n}"),
            ));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> u32 {
        self.n
    }
}

/// Strictly increasing, non-negative sample times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    times: Vec<f64>,
}

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(invalid("times", "grid is empty"));
        }
        if times.iter().any(|t| !t.is_finite()) || times[0] < 0.0 {
            return Err(invalid("times", "times must be finite and >= 0"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("times", "times must be strictly increasing"));
        }
        Ok(Self { times })
    }

    /// `points` evenly spaced samples on `[start, end]`, both ends included.
    pub fn linspace(start: f64, end: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(invalid("points", "need at least two grid points"));
        }
        let step = (end - start) / (points - 1) as f64;
        Self::new((0..points).map(|k| start + step * k as f64).collect())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// `N_β = 1/(e^{ω/T} - 1)`; zero temperature maps to `N_β = 0`.
pub fn n_beta_from_temperature(omega: f64, temperature: f64) -> Result<ThermalBath> {
    if !(omega > 0.0) {
        return Err(invalid("omega", "must be > 0"));
    }
    if !(temperature >= 0.0) {
        return Err(invalid("temperature", "must be >= 0"));
    }
    if temperature == 0.0 {
        return Ok(ThermalBath::zero_temperature());
    }
    ThermalBath::new(1.0 / (omega / temperature).exp_m1())
}

/// Inverse of [`n_beta_from_temperature`].
pub fn temperature_from_n_beta(omega: f64, bath: ThermalBath) -> f64 {
    if bath.n_beta() == 0.0 {
        return 0.0;
    }
    omega / (1.0 / bath.n_beta()).ln_1p()
}

/// Bath temperature `T_c = ω / ln(1 + 1/sinh² r)` at which N_β = sinh² r.
pub fn critical_temperature_gaussian(omega: f64, squeeze_r: f64) -> Result<f64> {
    if squeeze_r == 0.0 || !squeeze_r.is_finite() {
        return Err(invalid(
            "squeeze_r",
            "a coherent state (r = 0) has no finite critical temperature",
        ));
    }
    let s2 = squeeze_r.sinh().powi(2);
    Ok(omega / (1.0 / s2).ln_1p())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn n_beta_examples() {
        assert_eq!(n_beta_from_temperature(1.0, 0.0).unwrap().n_beta(), 0.0);
        assert!((n_beta_from_temperature(1.0, 1.0 / LN_2).unwrap().n_beta() - 1.0).abs() < 1e-12);
        assert!((n_beta_from_temperature(2.0, 2.0 / LN_2).unwrap().n_beta() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn n_beta_monotone_in_temperature() {
        let mut last = -1.0;
        for k in 0..200 {
            let n = n_beta_from_temperature(1.3, 0.05 * k as f64)
                .unwrap()
                .n_beta();
            assert!(n > last || (k == 0 && n == 0.0));
            last = n;
        }
    }

    #[test]
    fn critical_temperature_round_trip() {
        for &r in &[1.0f64, 2.0, -0.5, 0.01] {
            for &w in &[0.5, 1.0, 3.0] {
                let tc = critical_temperature_gaussian(w, r).unwrap();
                let nb = n_beta_from_temperature(w, tc).unwrap().n_beta();
                let want = r.sinh().powi(2);
                assert!((nb - want).abs() <= 1e-12 * want.max(1.0), "r={r} w={w}");
                assert!(
                    (temperature_from_n_beta(w, ThermalBath::new(nb).unwrap()) - tc).abs()
                        < 1e-12 * tc
                );
            }
        }
        let n1 =
            n_beta_from_temperature(1.0, critical_temperature_gaussian(1.0, 1.0).unwrap()).unwrap();
        assert!((n1.n_beta() - 1.381).abs() < 1e-3);
        let n2 =
            n_beta_from_temperature(1.0, critical_temperature_gaussian(1.0, 2.0).unwrap()).unwrap();
        assert!((n2.n_beta() - 13.15).abs() < 1e-2);
        assert!(critical_temperature_gaussian(1.0, 0.0).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(OscillatorParams::new(0.0, 1.0).is_err());
        assert!(OscillatorParams::new(1.0, -1.0).is_err());
        assert!(ThermalBath::new(-0.1).is_err());
        assert!(FockInitialState::new(MAX_FOCK_N + 1).is_err());
        assert!(TimeGrid::new(vec![0.0, 1.0, 1.0]).is_err());
        assert!(TimeGrid::new(vec![-1.0, 1.0]).is_err());
    }

    #[test]
    fn amplitude_round_trip() {
        let p = OscillatorParams::new(2.0, 0.1).unwrap();
        let s = GaussianInitialState::from_amplitude(&p, 0.7, -0.3, 1.0).unwrap();
        let (a1, a2) = s.amplitude(&p);
        assert!((a1 - 0.7).abs() < 1e-15 && (a2 + 0.3).abs() < 1e-15);
        assert!((p.damping_ratio() - 0.05).abs() < 1e-15);
    }
}
