//! RK4 integration of the classical moment equations
//! `dμ/dt = Fμ`, `dΣ/dt = FΣ + ΣFᵀ + D` with `F = [[0, 1], [-ω², -Γ]]`,
//! `D = diag(0, 2ΓT)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::{OscillatorParams, TimeGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalMomentState {
    /// `(⟨q⟩, ⟨p⟩)`.
    pub mean: (f64, f64),
    /// `(σ_qq, σ_qp, σ_pp)`.
    pub cov: (f64, f64, f64),
}

impl ClassicalMomentState {
    /// Sharp initial point.
    pub fn point(q: f64, p: f64) -> Self {
        Self {
            mean: (q, p),
            cov: (0.0, 0.0, 0.0),
        }
    }

    fn to_array(self) -> [f64; 5] {
        [self.mean.0, self.mean.1, self.cov.0, self.cov.1, self.cov.2]
    }

    fn from_array(y: [f64; 5]) -> Self {
        Self {
            mean: (y[0], y[1]),
            cov: (y[2], y[3], y[4]),
        }
    }
}

fn rhs(w2: f64, g: f64, diff: f64, y: &[f64; 5]) -> [f64; 5] {
    let [q, p, sqq, sqp, spp] = *y;
    [
        p,
        -w2 * q - g * p,
        2.0 * sqp,
        spp - w2 * sqq - g * sqp,
        -2.0 * w2 * sqp - 2.0 * g * spp + diff,
    ]
}

fn axpy(y: &[f64; 5], k: &[f64; 5], h: f64) -> [f64; 5] {
    std::array::from_fn(|i| y[i] + h * k[i])
}

/// Moments at every grid time (physical time), integrated from t = 0 with
/// steps no longer than `10⁻³ / max(ω, Γ)`.
pub fn classical_moment_evolve(
    params: &OscillatorParams,
    temperature: f64,
    init: &ClassicalMomentState,
    grid: &TimeGrid,
) -> Result<Vec<ClassicalMomentState>> {
    if !(temperature.is_finite() && temperature >= 0.0) {
        return Err(invalid("temperature", "must be finite and >= 0"));
    }
    let w2 = params.omega().powi(2);
    let g = params.gamma_damp();
    let diff = 2.0 * g * temperature;
    let h_max = 1e-3 / params.omega().max(g);
    let mut y = init.to_array();
    let mut t = 0.0;
    let mut out = Vec::with_capacity(grid.len());
    for &target in grid.times() {
        let span = target - t;
        if span > 0.0 {
            let steps = (span / h_max).ceil() as usize;
            let h = span / steps as f64;
            for _ in 0..steps {
                let k1 = rhs(w2, g, diff, &y);
                let k2 = rhs(w2, g, diff, &axpy(&y, &k1, 0.5 * h));
                let k3 = rhs(w2, g, diff, &axpy(&y, &k2, 0.5 * h));
                let k4 = rhs(w2, g, diff, &axpy(&y, &k3, h));
                y = std::array::from_fn(|i| {
                    y[i] + h / 6.0 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])
                });
            }
            t = target;
        }
        out.push(ClassicalMomentState::from_array(y));
    }
    Ok(out)
}
