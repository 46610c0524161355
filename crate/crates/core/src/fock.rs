//! Closed-form relaxation of an initial Fock state |n⟩.
//!
//! The characteristic function in the complex coordinate `u = u₁ + iu₂` is
//! `v(u, t) = v_n(e^{-Γt} u) + ½(1 + 2N_β)(e^{-2Γt} - 1)|u|²`, with `v_n` a
//! finite Hermite sum. The purity integral separates into products of
//! Hermite–Gaussian overlaps `IP(m₁, m₂) = ∫ H_{2m₁} H_{2m₂} e^{-a² x²} dx`,
//! each a terminating 2F1.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::gaussian::{PhaseTag, RelaxationPhase};
use crate::model::{ThermalBath, MAX_FOCK_N};
use crate::roots::{self, count_extrema, open_grid};
use crate::special::{
    binomial, factorial, gamma_half, hermite_real, hyp2f1_terminating, ComplexScalar,
};

/// Γt horizon of the grid used to detect entropy extrema.
pub const EXTREMUM_GRID_HORIZON: f64 = 30.0;
/// Number of points of the extremum-detection grid.
pub const EXTREMUM_GRID_POINTS: usize = 20_000;
/// Relative size below which an entropy difference is treated as rounding.
pub const ENTROPY_NOISE: f64 = 1e-12;
/// Below this Γt the state is still pure to double precision.
const PURE_STATE_GT: f64 = 1e-12;
/// `|a² - 1|` below which the overlap prefactor is distributed into the series.
const DISTRIBUTE_BELOW: f64 = 0.5;

fn check_n(n: u32) -> Result<()> {
    if n > MAX_FOCK_N {
        return Err(invalid(
            "n",
            format!("supported range is 0..={MAX_FOCK_N}, got {n}"),
        ));
    }
    Ok(())
}

fn check_gt(gt: f64) -> Result<()> {
    if !(gt.is_finite() && gt >= 0.0) {
        return Err(invalid("gt", format!("must be finite and >= 0, got {gt}")));
    }
    Ok(())
}

/// `⟨n| e^{-ū a} e^{u a†} |n⟩` without the Gaussian envelope:
/// `(-1)^n / (n! 4^n) Σ_m C(n,m) H_{2m}(u₂) H_{2(n-m)}(u₁)`.
fn hermite_sum(n: u32, u1: f64, u2: f64) -> f64 {
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let sum: f64 = (0..=n)
        .map(|m| binomial(n, m) * hermite_real(2 * m, u2) * hermite_real(2 * (n - m), u1))
        .sum();
    sign * sum / (factorial(n) * 4f64.powi(n as i32))
}

/// `e^{v(u, t)}` for an initial Fock state; finite everywhere, including
/// where the characteristic function changes sign.
pub fn fock_characteristic(n: u32, bath: &ThermalBath, u: ComplexScalar, gt: f64) -> Result<f64> {
    check_n(n)?;
    check_gt(gt)?;
    let decay = (-gt).exp();
    let w = u * decay;
    let envelope =
        -0.5 * w.norm_sqr() + 0.5 * bath.thermal_factor() * (-2.0 * gt).exp_m1() * u.norm_sqr();
    Ok(envelope.exp() * hermite_sum(n, w.re, w.im))
}

/// The exponent `v(u, t)` itself. Fails where the Hermite sum is not
/// positive, since the logarithm is then undefined on the real branch.
pub fn fock_gcf(n: u32, bath: &ThermalBath, u: ComplexScalar, gt: f64) -> Result<ComplexScalar> {
    check_n(n)?;
    check_gt(gt)?;
    let w = u * (-gt).exp();
    let s = hermite_sum(n, w.re, w.im);
    if !(s > 0.0) {
        return Err(Error::NonPositiveLogArgument {
            quantity: "Fock characteristic function",
            value: s,
        });
    }
    let v = s.ln() - 0.5 * w.norm_sqr()
        + 0.5 * bath.thermal_factor() * (-2.0 * gt).exp_m1() * u.norm_sqr();
    Ok(Complex64::new(v, 0.0))
}

/// `(sign, ln|x|)` pair for signed log-space accumulation.
#[derive(Debug, Clone, Copy)]
struct SignedLog {
    sign: f64,
    ln_abs: f64,
}

impl SignedLog {
    fn from_value(x: f64) -> Self {
        Self {
            sign: x.signum(),
            ln_abs: x.abs().ln(),
        }
    }

    fn mul(self, other: Self) -> Self {
        Self {
            sign: self.sign * other.sign,
            ln_abs: self.ln_abs + other.ln_abs,
        }
    }
}

/// `(1 - a²)^M 2F1(-2m₁, -2m₂; ½ - M; a²/(2(a² - 1)))` with `M = m₁ + m₂`.
///
/// Near `a² = 1` the series argument diverges while the prefactor vanishes;
/// there the prefactor is multiplied into each term, giving the polynomial
/// `(-1)^M Σ_k c_k (a²/2)^k (a² - 1)^{M-k}`.
fn overlap_series(m1: u32, m2: u32, a2: f64) -> Result<SignedLog> {
    let big_m = m1 + m2;
    let c = 0.5 - big_m as f64;
    let d = a2 - 1.0;
    if d.abs() < DISTRIBUTE_BELOW {
        let (a, b) = (-2.0 * m1 as f64, -2.0 * m2 as f64);
        let mut coeff = 1.0;
        let mut sum = d.powi(big_m as i32);
        for k in 0..2 * m1.min(m2) {
            let kf = k as f64;
            coeff *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0));
            sum += coeff * (0.5 * a2).powi(k as i32 + 1) * d.powi((big_m - k - 1) as i32);
        }
        let sign = if big_m.is_multiple_of(2) { 1.0 } else { -1.0 };
        Ok(SignedLog::from_value(sign * sum))
    } else {
        let f = hyp2f1_terminating(m1, m2, c, a2 / (2.0 * d))?;
        let pre = SignedLog {
            sign: if big_m.is_multiple_of(2) || d < 0.0 {
                1.0
            } else {
                -1.0
            },
            ln_abs: big_m as f64 * d.abs().ln(),
        };
        Ok(pre.mul(SignedLog::from_value(f)))
    }
}

/// `IP(m₁, m₂) = ∫ H_{2m₁}(x) H_{2m₂}(x) e^{-a² x²} dx`, in signed-log form.
fn hermite_overlap_log(m1: u32, m2: u32, a2: f64) -> Result<SignedLog> {
    let big_m = m1 + m2;
    let pre = SignedLog {
        sign: 1.0,
        ln_abs: 2.0 * big_m as f64 * std::f64::consts::LN_2 + gamma_half(big_m).ln()
            - (big_m as f64 + 0.5) * a2.ln(),
    };
    Ok(pre.mul(overlap_series(m1, m2, a2)?))
}

/// Hermite–Gaussian overlap `∫ H_{2m₁}(x) H_{2m₂}(x) e^{-a² x²} dx` for `a² > 0`.
pub fn hermite_overlap(m1: u32, m2: u32, a2: f64) -> Result<f64> {
    if !(a2 > 0.0) {
        return Err(invalid("a2", "Gaussian weight must have a² > 0"));
    }
    let v = hermite_overlap_log(m1, m2, a2)?;
    Ok(v.sign * v.ln_abs.exp())
}

/// Purity entropy `S_n(Γt)` of an initial Fock state.
pub fn entropy_fock(n: u32, bath: &ThermalBath, gt: f64) -> Result<f64> {
    check_n(n)?;
    check_gt(gt)?;
    if gt < PURE_STATE_GT {
        return Ok(0.0);
    }
    let a2 = 1.0 + bath.thermal_factor() * (2.0 * gt).exp_m1();
    let size = (n + 1) as usize;
    let mut table = Vec::with_capacity(size * size);
    for m1 in 0..=n {
        for m2 in 0..=n {
            table.push(hermite_overlap_log(m1, m2, a2)?);
        }
    }
    let ip = |m1: u32, m2: u32| table[m1 as usize * size + m2 as usize];
    let mut terms = Vec::with_capacity(size * size);
    for m1 in 0..=n {
        for m2 in 0..=n {
            let binom = SignedLog::from_value(binomial(n, m1) * binomial(n, m2));
            terms.push(binom.mul(ip(m1, m2)).mul(ip(n - m1, n - m2)));
        }
    }
    let shift = terms
        .iter()
        .filter(|t| t.sign != 0.0)
        .map(|t| t.ln_abs)
        .fold(f64::NEG_INFINITY, f64::max);
    let scaled: f64 = terms
        .iter()
        .map(|t| t.sign * (t.ln_abs - shift).exp())
        .sum();
    if !(scaled > 0.0) {
        return Err(Error::NonPositiveLogArgument {
            quantity: "Fock-state purity",
            value: scaled,
        });
    }
    let norm = 2.0 * (factorial(n).ln() + 2.0 * n as f64 * std::f64::consts::LN_2)
        + std::f64::consts::PI.ln();
    let ln_purity = 2.0 * gt - norm + shift + scaled.ln();
    Ok(-ln_purity)
}

/// Closed-form entropy for the one-photon state.
pub fn entropy_fock1_closed(bath: &ThermalBath, gt: f64) -> f64 {
    let k = bath.thermal_factor();
    let x = (-2.0 * gt).exp();
    let y = -(-2.0 * gt).exp_m1();
    let f = x + y * k;
    let g = x * x + y * y * k * k;
    (f.powi(3) / g).ln()
}

/// `dS_1/d(Γt)` from the closed form.
pub fn entropy_rate_fock1(bath: &ThermalBath, gt: f64) -> f64 {
    let k = bath.thermal_factor();
    let x = (-2.0 * gt).exp();
    let y = -(-2.0 * gt).exp_m1();
    let f = x + y * k;
    let g = x * x + y * y * k * k;
    let df = 1.0 - k;
    let dg = 2.0 * x - 2.0 * y * k * k;
    -2.0 * x * (3.0 * df / f - dg / g)
}

/// `dS_n/d(Γt)`: closed form for n ≤ 1, central differences otherwise.
pub fn entropy_rate_fock(n: u32, bath: &ThermalBath, gt: f64) -> Result<f64> {
    match n {
        0 => Ok(crate::gaussian::entropy_rate_gaussian(bath, 0.0, gt)),
        1 => Ok(entropy_rate_fock1(bath, gt)),
        _ => {
            let h = 1e-5;
            if gt < h {
                let s0 = entropy_fock(n, bath, gt)?;
                let s1 = entropy_fock(n, bath, gt + h)?;
                let s2 = entropy_fock(n, bath, gt + 2.0 * h)?;
                Ok((-3.0 * s0 + 4.0 * s1 - s2) / (2.0 * h))
            } else {
                Ok((entropy_fock(n, bath, gt + h)? - entropy_fock(n, bath, gt - h)?) / (2.0 * h))
            }
        }
    }
}

/// `dS_n/dt / Γ` at t = 0: `4[(2n + 1) N_β + n]`.
pub fn initial_entropy_rate_fock(n: u32, bath: &ThermalBath) -> f64 {
    4.0 * ((2.0 * n as f64 + 1.0) * bath.n_beta() + n as f64)
}

/// Upper critical occupation for n = 1, `N_c(1) = (1 + √3)/2`.
pub fn fock1_critical_exact() -> f64 {
    0.5 * (1.0 + 3f64.sqrt())
}

/// Γt of the interior extrema of `S_1`, in increasing order.
///
/// With `x = e^{-2Γt}` the stationarity condition is a quadratic in x with
/// roots `x_± = K(2N² - 1 ± √(1 + 2N - 2N²)) / (2N(2N² + 2N + 1))`,
/// `K = 1 + 2N`; only roots inside (0, 1) are physical. The discriminant
/// vanishes at `N_c(1)`, where the two roots merge into an inflection.
pub fn fock1_extrema(bath: &ThermalBath) -> Vec<f64> {
    let nb = bath.n_beta();
    let disc = 1.0 + 2.0 * nb - 2.0 * nb * nb;
    if disc <= 0.0 {
        return Vec::new();
    }
    let sq = disc.sqrt();
    let k = 1.0 + 2.0 * nb;
    let q = 2.0 * nb * nb + 2.0 * nb + 1.0;
    // x₊ is rationalised for small N_β, where its numerator cancels.
    let x_plus = if nb < 0.5 {
        k * (1.0 + nb - 2.0 * nb.powi(3)) / (q * (sq + 1.0 - 2.0 * nb * nb))
    } else {
        k * (2.0 * nb * nb - 1.0 + sq) / (2.0 * nb * q)
    };
    let mut out = Vec::new();
    if x_plus > 0.0 && x_plus < 1.0 {
        out.push(-0.5 * x_plus.ln());
    }
    if nb > 0.0 {
        let x_minus = k * (2.0 * nb * nb - 1.0 - sq) / (2.0 * nb * q);
        if x_minus > 0.0 && x_minus < 1.0 {
            out.push(-0.5 * x_minus.ln());
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

fn entropy_on_grid(n: u32, nb: f64, grid: &[f64]) -> Result<Vec<f64>> {
    let bath = ThermalBath::new(nb)?;
    grid.iter().map(|&gt| entropy_fock(n, &bath, gt)).collect()
}

/// Number of interior extrema of `S_n` detected on the standard Γt grid.
pub fn entropy_extremum_count(n: u32, bath: &ThermalBath) -> Result<usize> {
    let grid = open_grid(EXTREMUM_GRID_HORIZON, EXTREMUM_GRID_POINTS);
    Ok(count_extrema(
        &entropy_on_grid(n, bath.n_beta(), &grid)?,
        ENTROPY_NOISE,
    ))
}

/// Numerical upper critical occupation `N_c(n) = n + d_n`: the largest N_β
/// for which `S_n(t)` still has an interior extremum. Bisection on N_β to
/// 1e-4, extrema detected as sign changes of ΔS on a 20000-point Γt grid up
/// to 30. Just below N_c the two extrema are closer than a grid cell, so
/// the estimate can sit low by a few times 1e-5.
pub fn fock_critical_nc(n: u32) -> Result<f64> {
    if !(1..=10).contains(&n) {
        return Err(invalid(
            "n",
            format!("critical search supports 1..=10, got {n}"),
        ));
    }
    let grid = open_grid(EXTREMUM_GRID_HORIZON, EXTREMUM_GRID_POINTS);
    let has_extremum = |nb: f64| {
        entropy_on_grid(n, nb, &grid)
            .map(|s| count_extrema(&s, ENTROPY_NOISE) > 0)
            .unwrap_or(false)
    };
    let lo = n as f64;
    let mut hi = lo + 1.0;
    while has_extremum(hi) {
        hi += 1.0;
        if hi > lo + 10.0 {
            return Err(Error::Unresolved(format!(
                "no monotone phase found below N_beta = {hi}"
            )));
        }
    }
    roots::bisect_predicate(has_extremum, lo, hi, 1e-4)
}

/// Upper critical occupation used by the classifier: exact for n = 1,
/// computed once per n otherwise.
fn upper_critical(n: u32) -> Result<f64> {
    static CACHE: [OnceLock<f64>; 11] = [const { OnceLock::new() }; 11];
    if n == 1 {
        return Ok(fock1_critical_exact());
    }
    if let Some(&nc) = CACHE[n as usize].get() {
        return Ok(nc);
    }
    let nc = fock_critical_nc(n)?;
    Ok(*CACHE[n as usize].get_or_init(|| nc))
}

/// Three-phase classification of `S_n(t)` for n ≥ 1.
///
/// `N_β ≤ n` gives a single hump (at `N_β = n` the minimum has escaped to
/// t = ∞), `n < N_β < N_c(n)` a maximum followed by a minimum, and
/// `N_β ≥ N_c(n)` monotone growth. Extremum times are exact for n = 1 and
/// refined from the detection grid otherwise.
pub fn classify_fock_phase(n: u32, bath: &ThermalBath) -> Result<RelaxationPhase> {
    if n == 0 {
        return Err(invalid(
            "n",
            "the vacuum is Gaussian; use the Gaussian classifier",
        ));
    }
    check_n(n)?;
    let nb = bath.n_beta();
    let tag = if nb <= n as f64 {
        PhaseTag::SingleHump
    } else if nb < upper_critical(n)? {
        PhaseTag::DoubleExtremum
    } else {
        return Ok(RelaxationPhase::monotone());
    };
    let times = if n == 1 {
        fock1_extrema(bath)
    } else {
        let grid = open_grid(EXTREMUM_GRID_HORIZON, EXTREMUM_GRID_POINTS);
        let mut f = |gt: f64| entropy_fock(n, bath, gt).unwrap_or(f64::NAN);
        roots::refine_extrema(&mut f, &grid, ENTROPY_NOISE, 1e-9)
    };
    if times.len() != tag.extremum_count() {
        return Err(Error::Unresolved(format!(
            "found {} entropy extrema for {tag:?} at n = {n}, N_beta = {nb}; too close to a phase boundary",
            times.len()
        )));
    }
    RelaxationPhase::new(tag, times)
}

/// `⟨a†a⟩_t = N_β + (n - N_β) e^{-2Γt}`.
pub fn mean_number(n: u32, bath: &ThermalBath, gt: f64) -> f64 {
    let nb = bath.n_beta();
    nb + (n as f64 - nb) * (-2.0 * gt).exp()
}

/// `⟨(a†a)²⟩_t`.
pub fn number_second_moment(n: u32, bath: &ThermalBath, gt: f64) -> f64 {
    let nb = bath.n_beta();
    let nf = n as f64;
    let x = (-2.0 * gt).exp();
    nb * (2.0 * nb + 1.0)
        + (4.0 * nb + 1.0) * (nf - nb) * x
        + (nf * nf - nf - 4.0 * nf * nb + 2.0 * nb * nb) * x * x
}

/// Variance of `E = a†a + ½` (in units of ħω).
pub fn energy_variance_fock(n: u32, bath: &ThermalBath, gt: f64) -> f64 {
    let nb = bath.n_beta();
    let nf = n as f64;
    let x = (-2.0 * gt).exp();
    -(-2.0 * gt).exp_m1() * (nb * (1.0 + nb) - x * (nb * nb - 2.0 * nf * nb - nf))
}

/// `(Γt_m, max variance)` of the energy-variance hump, present iff N_β < n.
pub fn energy_variance_peak(n: u32, bath: &ThermalBath) -> Option<(f64, f64)> {
    let nb = bath.n_beta();
    let nf = n as f64;
    if nb >= nf {
        return None;
    }
    let k = bath.thermal_factor();
    let gt = 0.5 * (1.0 + (nf * k + nb) / ((nf - nb) * k)).ln();
    let peak = (nf * k + nb).powi(2) / (4.0 * (nf * k - nb * nb));
    Some((gt, peak))
}
