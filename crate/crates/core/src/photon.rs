//! Photon-number distribution `P(n, t) = ⟨n|ρ(t)|n⟩` for an initial squeezed
//! coherent state.
//!
//! The diagonal elements are insensitive to the free rotation, so they follow
//! from an ancillary state whose characteristic function has no cross term
//! (`c1 = 0`). Each `(d² - 1)^m H_{2m}(b / (2d√(d² - 1)))` product is
//! evaluated as the polynomial `G_{2m}(d² - 1, b/(2d))`, which is finite at
//! `d² = 1`.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::model::{GaussianInitialState, OscillatorParams, ThermalBath};
use crate::special::{factorial, into_real, scaled_hermite, ComplexScalar};

/// Highest photon number accepted by [`photon_probability`].
pub const MAX_PHOTON_N: u32 = 60;
/// Tolerance on the sign and normalization of returned probabilities.
pub const PROBABILITY_TOL: f64 = 1e-9;

/// Coefficients of the ancillary quadratic characteristic function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AncillaryGcfCoefficients {
    pub a1_lin: ComplexScalar,
    pub b1_lin: ComplexScalar,
    pub a1: f64,
    pub b1: f64,
    pub c1: f64,
}

impl AncillaryGcfCoefficients {
    /// `(d₁², d₂²) = (½ - a1, ½ - b1)`.
    pub fn widths(&self) -> (f64, f64) {
        (0.5 - self.a1, 0.5 - self.b1)
    }
}

fn check_gt(gt: f64) -> Result<()> {
    if !(gt.is_finite() && gt >= 0.0) {
        return Err(invalid("gt", format!("must be finite and >= 0, got {gt}")));
    }
    Ok(())
}

pub fn ancillary_coefficients(
    params: &OscillatorParams,
    state: &GaussianInitialState,
    bath: &ThermalBath,
    gt: f64,
) -> Result<AncillaryGcfCoefficients> {
    check_gt(gt)?;
    let (alpha1, alpha2) = state.amplitude(params);
    let decay = (-gt).exp();
    let x = (-2.0 * gt).exp();
    let grow = (2.0 * gt).exp_m1();
    let k = bath.thermal_factor();
    let r = state.squeeze_r;
    Ok(AncillaryGcfCoefficients {
        a1_lin: Complex64::new(0.0, -2.0 * decay * alpha2),
        b1_lin: Complex64::new(0.0, 2.0 * decay * alpha1),
        a1: -0.5 * x * (grow * k + (2.0 * r).exp()),
        b1: -0.5 * x * (grow * k + (-2.0 * r).exp()),
        c1: 0.0,
    })
}

/// `P(n, Γt)` for the Gaussian initial state.
pub fn photon_probability(
    params: &OscillatorParams,
    state: &GaussianInitialState,
    bath: &ThermalBath,
    n: u32,
    gt: f64,
) -> Result<f64> {
    if n > MAX_PHOTON_N {
        return Err(invalid(
            "n",
            format!("supported range is 0..={MAX_PHOTON_N}, got {n}"),
        ));
    }
    let co = ancillary_coefficients(params, state, bath, gt)?;
    let (d1s, d2s) = co.widths();
    let (d1, d2) = (d1s.sqrt(), d2s.sqrt());
    let ya = co.a1_lin / (2.0 * d1);
    let yb = co.b1_lin / (2.0 * d2);
    let sa = Complex64::new(d1s - 1.0, 0.0);
    let sb = Complex64::new(d2s - 1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for m in 0..=n {
        let k = n - m;
        let term = scaled_hermite(2 * k, sa, ya) * scaled_hermite(2 * m, sb, yb)
            / (factorial(m) * factorial(k) * d1.powi(2 * k as i32 + 1) * d2.powi(2 * m as i32 + 1));
        sum += term;
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let envelope =
        (co.a1_lin * co.a1_lin / (4.0 * d1s) + co.b1_lin * co.b1_lin / (4.0 * d2s)).exp();
    let p = into_real(
        sign * envelope * sum / 4f64.powi(n as i32),
        "photon probability",
    )?;
    if !(-PROBABILITY_TOL..=1.0 + PROBABILITY_TOL).contains(&p) {
        return Err(Error::NegativeProbability { n, value: p });
    }
    Ok(p)
}

/// `P(0, Γt)` for a squeezed vacuum, `1/(d₁ d₂)`.
pub fn p0_squeezed_vacuum(bath: &ThermalBath, squeeze_r: f64, gt: f64) -> f64 {
    let k = bath.thermal_factor();
    let x = (-2.0 * gt).exp();
    let grow = -(-2.0 * gt).exp_m1();
    let d1s = 0.5 + 0.5 * (grow * k + x * (2.0 * squeeze_r).exp());
    let d2s = 0.5 + 0.5 * (grow * k + x * (-2.0 * squeeze_r).exp());
    1.0 / (d1s * d2s).sqrt()
}

/// Γt of the single interior minimum of `P(0, t)` for a squeezed vacuum,
/// present iff `N_β < sinh² r`.
pub fn p0_extremum_time(bath: &ThermalBath, squeeze_r: f64) -> Option<f64> {
    let nb = bath.n_beta();
    let s2 = squeeze_r.sinh().powi(2);
    if nb >= s2 {
        return None;
    }
    let k = bath.thermal_factor();
    let c = (2.0 * squeeze_r).cosh();
    let num = 1.0 + 2.0 * nb + 2.0 * nb * nb - k * c;
    let den = 2.0 * (1.0 + nb) * (nb - s2);
    Some(0.5 * (num / den).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::entropy_gaussian;
    use crate::roots;

    fn unit() -> OscillatorParams {
        OscillatorParams::new(1.0, 0.1).unwrap()
    }

    fn bath(n: f64) -> ThermalBath {
        ThermalBath::new(n).unwrap()
    }

    fn state(a1: f64, a2: f64, r: f64) -> GaussianInitialState {
        GaussianInitialState::from_amplitude(&unit(), a1, a2, r).unwrap()
    }

    #[test]
    fn coefficient_endpoints() {
        let s = state(0.7, -0.4, 0.8);
        let c = ancillary_coefficients(&unit(), &s, &bath(1.5), 0.0).unwrap();
        assert!((c.a1_lin.im - 0.8).abs() < 1e-14 && (c.b1_lin.im - 1.4).abs() < 1e-14);
        assert!((c.a1 + 0.5 * 1.6f64.exp()).abs() < 1e-14);
        assert!((c.b1 + 0.5 * (-1.6f64).exp()).abs() < 1e-14);
        let late = ancillary_coefficients(&unit(), &s, &bath(1.5), 40.0).unwrap();
        assert!(
            late.a1_lin.norm() < 1e-15
                && (late.a1 + 2.0).abs() < 1e-12
                && (late.b1 + 2.0).abs() < 1e-12
        );
        assert_eq!(late.c1, 0.0);
    }

    #[test]
    fn coherent_state_is_poissonian() {
        let (a1, a2) = (1.1, -0.6);
        let nbar: f64 = a1 * a1 + a2 * a2;
        for n in 0..25 {
            let p = photon_probability(&unit(), &state(a1, a2, 0.0), &bath(2.0), n, 0.0).unwrap();
            let want = (-nbar).exp() * nbar.powi(n as i32) / factorial(n);
            assert!((p - want).abs() < 1e-13, "n={n}: {p} vs {want}");
        }
    }

    #[test]
    fn squeezed_vacuum_at_zero_time() {
        // ⟨2k|S|0⟩² = (tanh r)^{2k} (2k)! / (4^k (k!)² cosh r), odd numbers empty
        let r: f64 = 0.9;
        for n in 0..20 {
            let p = photon_probability(&unit(), &state(0.0, 0.0, r), &bath(0.3), n, 0.0).unwrap();
            let want = if !n.is_multiple_of(2) {
                0.0
            } else {
                let k = n / 2;
                r.tanh().powi(n as i32) * factorial(n)
                    / (4f64.powi(k as i32) * factorial(k).powi(2) * r.cosh())
            };
            assert!((p - want).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn vacuum_stays_thermal() {
        // a relaxing vacuum is thermal with occupation N(1 - e^{-2Γt}), and
        // its purity 1/(1 + 2N(1 - e^{-2Γt})) is e^{-S}
        for &gt in &[0.0f64, 0.2, 1.0, 3.0] {
            let occ = -(-2.0 * gt).exp_m1();
            let p0 = photon_probability(&unit(), &state(0.0, 0.0, 0.0), &bath(1.0), 0, gt).unwrap();
            assert!((p0 - 1.0 / (1.0 + occ)).abs() < 1e-14);
            let p1 = photon_probability(&unit(), &state(0.0, 0.0, 0.0), &bath(1.0), 1, gt).unwrap();
            assert!((p1 - occ / (1.0 + occ).powi(2)).abs() < 1e-14);
            let purity: f64 = (0..40)
                .map(|n| {
                    photon_probability(&unit(), &state(0.0, 0.0, 0.0), &bath(1.0), n, gt)
                        .unwrap()
                        .powi(2)
                })
                .sum();
            assert!((purity - (-entropy_gaussian(&bath(1.0), 0.0, gt)).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn equilibrium_is_thermal() {
        let nb: f64 = 0.8;
        for n in 0..30 {
            let p = photon_probability(&unit(), &state(1.0, 0.5, 1.0), &bath(nb), n, 40.0).unwrap();
            let want = nb.powi(n as i32) / (1.0 + nb).powi(n as i32 + 1);
            assert!((p - want).abs() < 1e-12);
        }
    }

    #[test]
    fn p0_examples() {
        let r: f64 = 1.3;
        assert!((p0_squeezed_vacuum(&bath(0.4), r, 0.0) - 1.0 / r.cosh()).abs() < 1e-14);
        assert!((p0_squeezed_vacuum(&bath(0.4), r, 40.0) - 1.0 / 1.4).abs() < 1e-14);
        for &gt in &[0.0, 0.3, 2.0] {
            let full = photon_probability(&unit(), &state(0.0, 0.0, r), &bath(0.4), 0, gt).unwrap();
            assert!((full - p0_squeezed_vacuum(&bath(0.4), r, gt)).abs() < 1e-12);
        }
    }

    #[test]
    fn p0_extremum_matches_grid() {
        assert!(p0_extremum_time(&bath(1.5), 1.0).is_none());
        let tm = p0_extremum_time(&bath(1.0), 2.0).unwrap();
        let golden = roots::golden_extremum(
            |g| p0_squeezed_vacuum(&bath(1.0), 2.0, g),
            0.0,
            5.0,
            1e-12,
            false,
        );
        assert!((tm - golden).abs() < 1e-6, "{tm} vs {golden}");
        let small = p0_extremum_time(&bath(1e-6), 1.0).unwrap();
        assert!(small < 1e-3);
        let a = p0_extremum_time(&bath(0.1), 1.0).unwrap();
        let b = p0_extremum_time(&bath(1.0), 1.0).unwrap();
        let c = p0_extremum_time(&bath(1.38), 1.0).unwrap();
        assert!(a < b && b < c);
    }

    #[test]
    fn rejects_large_n() {
        assert!(photon_probability(
            &unit(),
            &state(0.0, 0.0, 0.0),
            &bath(0.0),
            MAX_PHOTON_N + 1,
            0.0
        )
        .is_err());
    }
}
