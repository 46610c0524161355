//! Dense truncated-Fock integration of
//! `dρ/dt = -iω[a†a, ρ] + Γ(N+1)(2aρa† - {a†a, ρ}) + ΓN(2a†ρa - {aa†, ρ})`.
//!
//! The dissipator commutes with the free rotation, so RK4 runs in the
//! rotating frame and `ρ_mn` picks up its exact phase `e^{-iω(m-n)t}` at each
//! output time. Stepping the rotation with RK4 instead slowly damps the
//! high-lying coherences and spoils positivity of nearly pure states.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::model::{GaussianInitialState, OscillatorParams, ThermalBath, TimeGrid};

/// Truncation used when the caller has no reason to pick another.
pub const DEFAULT_TRUNCATION: usize = 60;
/// Largest population tolerated in the top Fock level.
pub const LEAKAGE_TOL: f64 = 1e-8;
/// Largest tolerated drift of Tr ρ over a run.
pub const TRACE_DRIFT_TOL: f64 = 1e-9;
/// Most negative eigenvalue tolerated at output times.
pub const POSITIVITY_TOL: f64 = 1e-8;

/// Largest norm a prepared state may lose to the cutoff before renormalization.
pub const PREPARATION_LOSS_TOL: f64 = 1e-6;

const TAYLOR_CUTOFF: f64 = 1e-16;
const TAYLOR_MAX_TERMS: usize = 200;

type CMatrix = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Truncated `a`, `a†` and `a†a`.
#[derive(Debug, Clone)]
pub struct LadderOperators {
    pub lower: CMatrix,
    pub raise: CMatrix,
    pub number: CMatrix,
}

pub fn build_operators(n_tr: usize) -> Result<LadderOperators> {
    if n_tr < 2 {
        return Err(invalid(
            "n_tr",
            format!("need at least 2 levels, got {n_tr}"),
        ));
    }
    let lower = CMatrix::from_fn(n_tr, n_tr, |m, n| {
        if n == m + 1 {
            c((n as f64).sqrt())
        } else {
            c(0.0)
        }
    });
    let raise = lower.adjoint();
    let number = CMatrix::from_fn(n_tr, n_tr, |m, n| if m == n { c(m as f64) } else { c(0.0) });
    Ok(LadderOperators {
        lower,
        raise,
        number,
    })
}

/// Hermitian, unit-trace state on a truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    /// Wraps a matrix after checking Hermiticity (1e-12) and trace (1e-10).
    pub fn from_matrix(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() || entries.nrows() < 2 {
            return Err(invalid("rho", "must be square with at least 2 levels"));
        }
        let herm = (&entries - entries.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if herm > 1e-12 {
            return Err(invalid(
                "rho",
                format!("not Hermitian (deviation {herm:e})"),
            ));
        }
        let tr = entries.trace();
        if (tr - 1.0).norm() > 1e-10 {
            return Err(invalid("rho", format!("trace is {tr}, expected 1")));
        }
        Ok(Self { entries })
    }

    /// Thermal state `p_n ∝ (N/(N+1))^n`, renormalized on the truncated basis.
    pub fn thermal(n_tr: usize, bath: &ThermalBath) -> Result<Self> {
        if n_tr < 2 {
            return Err(invalid("n_tr", "need at least 2 levels"));
        }
        let nb = bath.n_beta();
        let ratio = nb / (1.0 + nb);
        let pops: Vec<f64> = (0..n_tr).map(|k| ratio.powi(k as i32)).collect();
        let total: f64 = pops.iter().sum();
        let entries =
            CMatrix::from_fn(
                n_tr,
                n_tr,
                |m, n| if m == n { c(pops[m] / total) } else { c(0.0) },
            );
        Ok(Self { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// Populations `⟨n|ρ|n⟩`.
    pub fn diagonals(&self) -> Vec<f64> {
        (0..self.dim()).map(|k| self.entries[(k, k)].re).collect()
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// Population of the top level, the proxy for truncation error.
    pub fn leakage(&self) -> f64 {
        let d = self.dim() - 1;
        self.entries[(d, d)].re
    }
}

pub fn prepare_fock(n_tr: usize, n: usize) -> Result<DensityMatrix> {
    if n + 1 >= n_tr {
        return Err(Error::Truncation {
            n_tr,
            reason: format!("Fock state |{n}⟩ needs headroom above it"),
        });
    }
    let entries = CMatrix::from_fn(
        n_tr,
        n_tr,
        |i, j| if i == n && j == n { c(1.0) } else { c(0.0) },
    );
    Ok(DensityMatrix { entries })
}

/// `v ← exp(G) v` for a sparse generator given as a matvec, with the
/// exponent split into `steps` equal slices so each Taylor series converges
/// without cancellation.
fn apply_exp<F>(v: &mut DVector<Complex64>, steps: usize, generator: F) -> Result<()>
where
    F: Fn(&DVector<Complex64>) -> DVector<Complex64>,
{
    let scale = 1.0 / steps as f64;
    for _ in 0..steps {
        let mut term = v.clone();
        let mut sum = v.clone();
        let mut converged = false;
        for k in 1..=TAYLOR_MAX_TERMS {
            term = generator(&term) * c(scale / k as f64);
            sum += &term;
            if term.norm() < TAYLOR_CUTOFF * sum.norm() {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Drift(
                "state-preparation Taylor series did not converge".into(),
            ));
        }
        *v = sum;
    }
    Ok(())
}

/// `|α|² + sinh² r + 6·std(n)` for a displaced squeezed vacuum.
fn gaussian_headroom(alpha_sq: f64, r: f64) -> f64 {
    let s2 = r.sinh().powi(2);
    let var = alpha_sq * (2.0 * r.abs()).exp() + 2.0 * s2 * r.cosh().powi(2);
    alpha_sq + s2 + 6.0 * var.sqrt()
}

/// `D(α) S(r) |0⟩` with `S(r) = exp((r/2)(a² - a†²))`, so that r > 0
/// narrows the position distribution.
pub fn prepare_gaussian(
    n_tr: usize,
    params: &OscillatorParams,
    state: &GaussianInitialState,
) -> Result<DensityMatrix> {
    let (a1, a2) = state.amplitude(params);
    let alpha = Complex64::new(a1, a2);
    let need = gaussian_headroom(alpha.norm_sqr(), state.squeeze_r);
    if need >= n_tr as f64 {
        return Err(Error::Truncation {
            n_tr,
            reason: format!("mean number plus six deviations is {need:.1}"),
        });
    }
    // build in a doubled space so truncation of the generators cannot reach
    // the kept levels, then project
    let dim = 2 * n_tr;
    let sq: Vec<f64> = (0..=dim).map(|k| (k as f64).sqrt()).collect();
    let mut v = DVector::from_element(dim, c(0.0));
    v[0] = c(1.0);

    let r = state.squeeze_r;
    let squeeze = |x: &DVector<Complex64>| {
        // (r/2)(a² - a†²)
        DVector::from_fn(dim, |m, _| {
            let down = if m + 2 < dim {
                x[m + 2] * (sq[m + 1] * sq[m + 2])
            } else {
                c(0.0)
            };
            let up = if m >= 2 {
                x[m - 2] * (sq[m] * sq[m - 1])
            } else {
                c(0.0)
            };
            (down - up) * (0.5 * r)
        })
    };
    let squeeze_norm = r.abs() * dim as f64;
    apply_exp(
        &mut v,
        (2.0 * squeeze_norm).ceil().max(1.0) as usize,
        squeeze,
    )?;

    let displace = |x: &DVector<Complex64>| {
        // α a† - ᾱ a
        DVector::from_fn(dim, |m, _| {
            let up = if m >= 1 {
                x[m - 1] * sq[m] * alpha
            } else {
                c(0.0)
            };
            let down = if m + 1 < dim {
                x[m + 1] * sq[m + 1] * alpha.conj()
            } else {
                c(0.0)
            };
            up - down
        })
    };
    let displace_norm = 2.0 * alpha.norm() * (dim as f64).sqrt();
    apply_exp(
        &mut v,
        (2.0 * displace_norm).ceil().max(1.0) as usize,
        displace,
    )?;

    let kept = v.rows(0, n_tr).into_owned();
    let dropped = 1.0 - kept.norm_squared();
    if dropped > PREPARATION_LOSS_TOL {
        return Err(Error::Truncation {
            n_tr,
            reason: format!("prepared state loses weight {dropped:e} above the cutoff"),
        });
    }
    let kept = &kept / c(kept.norm());
    let entries = &kept * kept.adjoint();
    let entries = (&entries + entries.adjoint()) * c(0.5);
    Ok(DensityMatrix { entries })
}

/// One matrix element of the elementwise Lindbladian: `out[idx] =
/// diag·ρ[idx] + down·ρ[idx + d + 1] + up·ρ[idx - d - 1]`.
#[derive(Debug, Clone, Copy)]
struct Cell {
    idx: usize,
    diag: Complex64,
    down: f64,
    up: f64,
}

/// Precomputed Lindbladian restricted to the off-diagonal bands `m - n` that
/// are listed; the dissipator never couples different bands.
struct Generator {
    dim: usize,
    cells: Vec<Cell>,
}

impl Generator {
    /// `omega = 0` gives the rotating-frame dissipator.
    fn new(
        dim: usize,
        omega: f64,
        params: &OscillatorParams,
        bath: &ThermalBath,
        bands: &[bool],
    ) -> Self {
        let g = params.gamma_damp();
        let nb = bath.n_beta();
        let (down, up) = (g * (nb + 1.0), g * nb);
        let sqrt: Vec<f64> = (0..=dim).map(|k| (k as f64).sqrt()).collect();
        // diagonal of the truncated a a†
        let raise_lower: Vec<f64> = (0..dim)
            .map(|k| if k + 1 < dim { (k + 1) as f64 } else { 0.0 })
            .collect();
        let mut cells = Vec::new();
        for n in 0..dim {
            for m in 0..dim {
                if !bands[m.abs_diff(n)] {
                    continue;
                }
                let loss = down * (m + n) as f64 + up * (raise_lower[m] + raise_lower[n]);
                cells.push(Cell {
                    idx: n * dim + m,
                    diag: Complex64::new(-loss, -omega * (m as f64 - n as f64)),
                    down: if m + 1 < dim && n + 1 < dim {
                        2.0 * down * sqrt[m + 1] * sqrt[n + 1]
                    } else {
                        0.0
                    },
                    up: if m >= 1 && n >= 1 {
                        2.0 * up * sqrt[m] * sqrt[n]
                    } else {
                        0.0
                    },
                });
            }
        }
        Self { dim, cells }
    }

    fn all_bands(dim: usize) -> Vec<bool> {
        vec![true; dim]
    }

    /// Bands holding any non-zero entry of `rho`.
    fn occupied_bands(rho: &CMatrix) -> Vec<bool> {
        let d = rho.nrows();
        let mut bands = vec![false; d];
        for n in 0..d {
            for m in 0..d {
                if rho[(m, n)] != c(0.0) {
                    bands[m.abs_diff(n)] = true;
                }
            }
        }
        bands
    }

    /// Column-major `out = L(rho)` on the listed cells; other entries of
    /// `out` are left untouched.
    fn apply(&self, rho: &[Complex64], out: &mut [Complex64]) {
        let d1 = self.dim + 1;
        for cell in &self.cells {
            let mut acc = rho[cell.idx] * cell.diag;
            if cell.down != 0.0 {
                acc += rho[cell.idx + d1] * cell.down;
            }
            if cell.up != 0.0 {
                acc += rho[cell.idx - d1] * cell.up;
            }
            out[cell.idx] = acc;
        }
    }
}

/// `dρ/dt` for the given state.
pub fn lindblad_rhs(rho: &DensityMatrix, params: &OscillatorParams, bath: &ThermalBath) -> CMatrix {
    let d = rho.dim();
    let gen = Generator::new(d, params.omega(), params, bath, &Generator::all_bands(d));
    let mut out = vec![c(0.0); d * d];
    gen.apply(rho.entries.as_slice(), &mut out);
    CMatrix::from_vec(d, d, out)
}

/// Step bound `min(0.01/ω, 0.01/(Γ(2N+1) n_tr))`.
pub fn max_step(params: &OscillatorParams, bath: &ThermalBath, n_tr: usize) -> f64 {
    let damp = params.gamma_damp() * bath.thermal_factor() * n_tr as f64;
    (0.01 / params.omega()).min(0.01 / damp)
}

fn rk4_step(gen: &Generator, rho: &mut [Complex64], h: f64, work: &mut [Vec<Complex64>; 5]) {
    let [k1, k2, k3, k4, tmp] = work;
    gen.apply(rho, k1);
    for cell in &gen.cells {
        tmp[cell.idx] = rho[cell.idx] + k1[cell.idx] * (0.5 * h);
    }
    gen.apply(tmp, k2);
    for cell in &gen.cells {
        tmp[cell.idx] = rho[cell.idx] + k2[cell.idx] * (0.5 * h);
    }
    gen.apply(tmp, k3);
    for cell in &gen.cells {
        tmp[cell.idx] = rho[cell.idx] + k3[cell.idx] * h;
    }
    gen.apply(tmp, k4);
    for cell in &gen.cells {
        let i = cell.idx;
        rho[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
    }
}

fn symmetrize(rho: &mut [Complex64], d: usize) {
    for n in 0..d {
        for m in n..d {
            let avg = 0.5 * (rho[n * d + m] + rho[m * d + n].conj());
            rho[n * d + m] = avg;
            rho[m * d + n] = avg.conj();
        }
    }
}

/// Integrates from t = 0 and returns the state at every grid time (physical
/// time, not Γt). Trace, top-level leakage and the smallest eigenvalue are
/// checked along the way. Steps never exceed [`max_step`]; `step_divisor` further
/// divides them for convergence studies.
pub fn evolve_with_steps(
    rho0: &DensityMatrix,
    params: &OscillatorParams,
    bath: &ThermalBath,
    grid: &TimeGrid,
    step_divisor: usize,
) -> Result<Vec<DensityMatrix>> {
    let d = rho0.dim();
    let gen = Generator::new(
        d,
        0.0,
        params,
        bath,
        &Generator::occupied_bands(&rho0.entries),
    );
    let h_max = max_step(params, bath, d) / step_divisor.max(1) as f64;
    let mut rho: Vec<Complex64> = rho0.entries.as_slice().to_vec();
    let mut work: [Vec<Complex64>; 5] = std::array::from_fn(|_| vec![c(0.0); d * d]);
    let trace0 = rho0.trace();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(grid.len());
    for &target in grid.times() {
        let span = target - t;
        if span > 0.0 {
            let steps = (span / h_max).ceil() as usize;
            let h = span / steps as f64;
            for _ in 0..steps {
                rk4_step(&gen, &mut rho, h, &mut work);
                symmetrize(&mut rho, d);
                let leak = rho[d * d - 1].re;
                if leak > LEAKAGE_TOL {
                    return Err(Error::Truncation {
                        n_tr: d,
                        reason: format!("top-level population {leak:e} exceeds {LEAKAGE_TOL:e}"),
                    });
                }
            }
            t = target;
        }
        let state = DensityMatrix {
            entries: CMatrix::from_fn(d, d, |m, n| {
                rho[n * d + m]
                    * Complex64::from_polar(1.0, -params.omega() * (m as f64 - n as f64) * target)
            }),
        };
        let drift = (state.trace() - trace0).abs();
        if drift > TRACE_DRIFT_TOL {
            return Err(Error::Drift(format!(
                "trace drifted by {drift:e} at t = {target}"
            )));
        }
        let lowest = min_eigenvalue(&state);
        if lowest < -POSITIVITY_TOL {
            return Err(Error::Drift(format!(
                "eigenvalue {lowest:e} at t = {target}"
            )));
        }
        out.push(state);
    }
    Ok(out)
}

/// [`evolve_with_steps`] at the default step bound.
pub fn evolve(
    rho0: &DensityMatrix,
    params: &OscillatorParams,
    bath: &ThermalBath,
    grid: &TimeGrid,
) -> Result<Vec<DensityMatrix>> {
    evolve_with_steps(rho0, params, bath, grid, 1)
}

pub fn min_eigenvalue(rho: &DensityMatrix) -> f64 {
    SymmetricEigen::new(rho.entries.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observables {
    pub purity: f64,
    pub entropy: f64,
    pub mean_q: f64,
    pub mean_p: f64,
    pub var_q: f64,
    pub var_p: f64,
    pub mean_n: f64,
    pub mean_n2: f64,
    pub diagonals: Vec<f64>,
}

impl Observables {
    /// Variance of `E = a†a + ½` in units of ω.
    pub fn var_energy(&self) -> f64 {
        self.mean_n2 - self.mean_n * self.mean_n
    }
}

/// Moments with `q = σ_c(a + a†)`, `p = (a - a†)/(2iσ_c)`.
pub fn observables(rho: &DensityMatrix, params: &OscillatorParams) -> Observables {
    let e = &rho.entries;
    let d = rho.dim();
    let sc = params.sigma_c2().sqrt();
    let purity: f64 = e.iter().map(|z| z.norm_sqr()).sum();
    let mut a = c(0.0);
    let mut a2 = c(0.0);
    for m in 1..d {
        a += e[(m, m - 1)] * (m as f64).sqrt();
        if m >= 2 {
            a2 += e[(m, m - 2)] * ((m * (m - 1)) as f64).sqrt();
        }
    }
    let diagonals = rho.diagonals();
    let mean_n: f64 = diagonals
        .iter()
        .enumerate()
        .map(|(k, p)| k as f64 * p)
        .sum();
    let mean_n2: f64 = diagonals
        .iter()
        .enumerate()
        .map(|(k, p)| (k * k) as f64 * p)
        .sum();
    let mean_q = 2.0 * sc * a.re;
    let mean_p = a.im / sc;
    let q2 = sc * sc * (2.0 * a2.re + 2.0 * mean_n + 1.0);
    let p2 = (2.0 * mean_n + 1.0 - 2.0 * a2.re) / (4.0 * sc * sc);
    Observables {
        purity,
        entropy: -purity.ln(),
        mean_q,
        mean_p,
        var_q: q2 - mean_q * mean_q,
        var_p: p2 - mean_p * mean_p,
        mean_n,
        mean_n2,
        diagonals,
    }
}
