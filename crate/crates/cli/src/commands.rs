//! One function per subcommand, each turning a validated [`RunConfig`] into
//! an [`Output`].

use anyhow::{bail, ensure, Context, Result};
use qho_relax::classical::{
    classical_coefficients, classical_q_variance, coarse_grained_entropy,
    normalized_energy_variance, params_from_alpha, CoarseGrainSpec,
};
use qho_relax::fock::{
    classify_fock_phase, energy_variance_fock, entropy_fock, entropy_rate_fock,
    fock1_critical_exact, fock_critical_nc, mean_number,
};
use qho_relax::gaussian::{
    classify_gaussian_phase, critical_damping_ratio, critical_n_beta, energy_moments,
    entropy_gaussian, entropy_rate_gaussian, gcf_coefficients, mean_q, q_variance,
};
use qho_relax::oracle::{
    classical_moment_evolve, evolve, observables, prepare_fock, prepare_gaussian,
    ClassicalMomentState, DensityMatrix,
};
use qho_relax::photon::photon_probability;
use qho_relax::{GaussianInitialState, OscillatorParams, RelaxationPhase, ThermalBath, TimeGrid};
use serde_json::{json, Value};

use crate::config::{CommandKind, RunConfig, StateSpec, VarianceKind, VerifySet};
use crate::output::{series_headers, Cell, Output, Table, SCHEMA_VERSION};

/// Photon numbers summed for the normalization residual.
pub const PHOTON_SUM_MAX: u32 = 40;
/// Step in Γt for finite-difference entropy rates.
const RATE_STEP: f64 = 1e-5;
/// Oracle deviation tolerance for the quantum sets.
pub const QUANTUM_TOL: f64 = 1e-4;
/// Deviation tolerance for the classical coefficients.
pub const CLASSICAL_TOL: f64 = 1e-8;

/// Result of a command: its output and whether every check passed.
pub struct Report {
    pub output: Output,
    pub pass: bool,
}

pub fn run(config: &RunConfig) -> Result<Report> {
    config.validate()?;
    let output = match config.command {
        CommandKind::Entropy => entropy(config)?,
        CommandKind::Variance => variance(config)?,
        CommandKind::Phase => phase(config)?,
        CommandKind::Photon => photon(config)?,
        CommandKind::ClassicalEntropy => classical_entropy(config)?,
        CommandKind::Verify => return verify(config),
    };
    Ok(Report { output, pass: true })
}

fn nb_label(bath: &ThermalBath) -> String {
    format!("nb={}", bath.n_beta())
}

/// Central difference in Γt, one-sided near the origin.
fn rate<F: Fn(f64) -> Result<f64>>(f: F, gt: f64) -> Result<f64> {
    let h = RATE_STEP;
    if gt < h {
        Ok((-3.0 * f(gt)? + 4.0 * f(gt + h)? - f(gt + 2.0 * h)?) / (2.0 * h))
    } else {
        Ok((f(gt + h)? - f(gt - h)?) / (2.0 * h))
    }
}

fn physical(params: &OscillatorParams, grid: &TimeGrid) -> Result<TimeGrid> {
    Ok(TimeGrid::new(
        grid.times()
            .iter()
            .map(|gt| gt / params.gamma_damp())
            .collect(),
    )?)
}

fn prepare(
    config: &RunConfig,
    params: &OscillatorParams,
    state: &StateSpec,
) -> Result<DensityMatrix> {
    let n_tr = config.truncation();
    Ok(match *state {
        StateSpec::Fock { n } => prepare_fock(n_tr, n as usize)?,
        StateSpec::Gaussian { .. } => {
            prepare_gaussian(n_tr, params, &state.gaussian(params)?.unwrap())?
        }
    })
}

fn entropy(config: &RunConfig) -> Result<Output> {
    let params = config.params()?;
    let grid = config.gt_grid(10.0, 201)?;
    let states = config.states_or(StateSpec::Gaussian {
        r: 1.0,
        alpha1: 0.0,
        alpha2: 0.0,
    });
    let baths = config.baths()?;
    let names: &[&str] = if config.oracle {
        &["S", "R", "S_oracle"]
    } else {
        &["S", "R"]
    };

    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut labels = Vec::new();
    for state in &states {
        for bath in &baths {
            labels.push(format!("{};{}", state.label(), nb_label(bath)));
            let (s, r): (Vec<f64>, Vec<f64>) = match *state {
                StateSpec::Gaussian { r, .. } => grid
                    .times()
                    .iter()
                    .map(|&gt| {
                        (
                            entropy_gaussian(bath, r, gt),
                            entropy_rate_gaussian(bath, r, gt),
                        )
                    })
                    .unzip(),
                StateSpec::Fock { n } => {
                    let mut s = Vec::new();
                    let mut rate = Vec::new();
                    for &gt in grid.times() {
                        s.push(entropy_fock(n, bath, gt)?);
                        rate.push(entropy_rate_fock(n, bath, gt)?);
                    }
                    (s, rate)
                }
            };
            columns.push(s);
            columns.push(r);
            if config.oracle {
                let rho0 = prepare(config, &params, state)?;
                let states = evolve(&rho0, &params, bath, &physical(&params, &grid)?)
                    .with_context(|| format!("oracle run for {}", state.label()))?;
                columns.push(
                    states
                        .iter()
                        .map(|rho| observables(rho, &params).entropy)
                        .collect(),
                );
            }
        }
    }
    Ok(Output::Csv(series_table(&grid, names, &labels, &columns)))
}

fn series_table(grid: &TimeGrid, names: &[&str], labels: &[String], columns: &[Vec<f64>]) -> Table {
    let mut table = Table::new(series_headers(names, labels));
    for (k, &gt) in grid.times().iter().enumerate() {
        let mut row = vec![Cell::Float(gt)];
        row.extend(columns.iter().map(|c| Cell::Float(c[k])));
        table.push(row);
    }
    table
}

fn variance(config: &RunConfig) -> Result<Output> {
    let grid = config.gt_grid(10.0, 201)?;
    let kind = config
        .variance
        .unwrap_or(if config.classical && !config.lambda.is_empty() {
            VarianceKind::Energy
        } else {
            VarianceKind::Q
        });
    let mut labels = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let names: &[&str] = match (config.classical, kind) {
        (true, VarianceKind::Q) => {
            let temperature = config.temperature.unwrap_or(1.0);
            for (name, alpha) in config.alphas_or(&["0.5", "10i"])? {
                let params = params_from_alpha(config.gamma, alpha)?;
                let eq = temperature / (params.omega() * params.omega());
                labels.push(format!("alpha={name}"));
                columns.push(
                    grid.times()
                        .iter()
                        .map(|gt| {
                            Ok(classical_q_variance(&params, temperature, gt / config.gamma)? / eq)
                        })
                        .collect::<Result<_>>()?,
                );
            }
            &["Vq"]
        }
        (true, VarianceKind::Energy) => {
            let lambdas = if config.lambda.is_empty() {
                vec![1.0]
            } else {
                config.lambda.clone()
            };
            for (name, alpha) in config.alphas_or(&["2i"])? {
                for &lambda in &lambdas {
                    labels.push(format!("alpha={name};lambda={lambda}"));
                    columns.push(
                        grid.times()
                            .iter()
                            .map(|&gt| Ok(normalized_energy_variance(alpha, lambda, gt)?))
                            .collect::<Result<_>>()?,
                    );
                }
            }
            &["V"]
        }
        (false, VarianceKind::Q) => {
            let params = config.params()?;
            for state in config.states_or(StateSpec::Gaussian {
                r: 1.0,
                alpha1: 0.0,
                alpha2: 0.0,
            }) {
                let Some(initial) = state.gaussian(&params)? else {
                    bail!("q-variance decomposition is available for gaussian states only");
                };
                for bath in config.baths()? {
                    labels.push(format!("{};{}", state.label(), nb_label(&bath)));
                    let parts: Vec<_> = grid
                        .times()
                        .iter()
                        .map(|gt| q_variance(&params, &initial, &bath, gt / params.gamma_damp()))
                        .collect();
                    columns.push(parts.iter().map(|p| p.v).collect());
                    columns.push(parts.iter().map(|p| p.v1).collect());
                    columns.push(parts.iter().map(|p| p.v2).collect());
                }
            }
            &["V", "V1", "V2"]
        }
        (false, VarianceKind::Energy) => {
            let params = config.params()?;
            for state in config.states_or(StateSpec::Fock { n: 5 }) {
                for bath in config.baths()? {
                    labels.push(format!("{};{}", state.label(), nb_label(&bath)));
                    let column = match state.gaussian(&params)? {
                        Some(initial) => grid
                            .times()
                            .iter()
                            .map(|gt| {
                                Ok(energy_moments(
                                    &params,
                                    &initial,
                                    &bath,
                                    gt / params.gamma_damp(),
                                )?
                                .1)
                            })
                            .collect::<Result<_>>()?,
                        None => {
                            let StateSpec::Fock { n } = state else {
                                unreachable!()
                            };
                            grid.times()
                                .iter()
                                .map(|&gt| energy_variance_fock(n, &bath, gt))
                                .collect()
                        }
                    };
                    columns.push(column);
                }
            }
            &["varE"]
        }
    };
    Ok(Output::Csv(series_table(&grid, names, &labels, &columns)))
}

fn phase_rows(
    sweep: &[f64],
    classify: impl Fn(&ThermalBath) -> Result<RelaxationPhase>,
) -> Result<Vec<Value>> {
    sweep
        .iter()
        .map(|&nb| {
            let phase = classify(&ThermalBath::new(nb)?)?;
            Ok(json!({
                "n_beta": nb,
                "phase": phase.tag(),
                "extremum_times": phase.extremum_times(),
            }))
        })
        .collect()
}

fn sweep(config: &RunConfig, upper: f64) -> Vec<f64> {
    if !config.n_beta.is_empty() {
        return config.n_beta.clone();
    }
    let end = (1.5 * upper).max(1.0);
    (0..=40).map(|k| end * k as f64 / 40.0).collect()
}

fn phase(config: &RunConfig) -> Result<Output> {
    let states = config.states_or(StateSpec::Gaussian {
        r: 1.0,
        alpha1: 0.0,
        alpha2: 0.0,
    });
    let mut entries = Vec::new();
    for state in states {
        let entry = match state {
            StateSpec::Gaussian { r, .. } => {
                let nc = critical_n_beta(r);
                json!({
                    "state": state,
                    "critical": { "n_beta": nc, "damping_ratio": critical_damping_ratio(r) },
                    "rows": phase_rows(&sweep(config, nc), |b| Ok(classify_gaussian_phase(b, r)))?,
                })
            }
            StateSpec::Fock { n } => {
                ensure!(n >= 1, "the fock vacuum is the gaussian state r=0");
                let upper = if n == 1 {
                    fock1_critical_exact()
                } else {
                    fock_critical_nc(n)?
                };
                json!({
                    "state": state,
                    "critical": { "lower": n as f64, "upper": upper },
                    "rows": phase_rows(&sweep(config, upper), |b| Ok(classify_fock_phase(n, b)?))?,
                })
            }
        };
        entries.push(entry);
    }
    Ok(Output::Json(json!({
        "schema_version": SCHEMA_VERSION,
        "command": "phase",
        "entries": entries,
    })))
}

fn photon(config: &RunConfig) -> Result<Output> {
    let params = config.params()?;
    let states = config.states_or(StateSpec::Gaussian {
        r: 1.0,
        alpha1: 0.0,
        alpha2: 0.0,
    });
    let baths = config.baths()?;
    ensure!(
        states.len() == 1 && baths.len() == 1,
        "photon takes one initial state and one bath, got {} and {}",
        states.len(),
        baths.len()
    );
    let Some(initial) = states[0].gaussian(&params)? else {
        bail!("photon distributions are available for gaussian states only");
    };
    let bath = baths[0];
    let numbers: Vec<u32> = if config.photon_numbers.is_empty() {
        (0..=PHOTON_SUM_MAX).collect()
    } else {
        config.photon_numbers.clone()
    };
    let grid = config.gt_grid(5.0, 101)?;
    let mut table = Table::new(["gt", "n", "P", "residual"].map(String::from).to_vec());
    for &gt in grid.times() {
        let all: Vec<f64> = (0..=PHOTON_SUM_MAX)
            .map(|n| photon_probability(&params, &initial, &bath, n, gt))
            .collect::<Result<_, _>>()?;
        let residual = all.iter().sum::<f64>() - 1.0;
        for &n in &numbers {
            let p = match all.get(n as usize) {
                Some(&p) => p,
                None => photon_probability(&params, &initial, &bath, n, gt)?,
            };
            table.push(vec![
                Cell::Float(gt),
                Cell::Int(n),
                Cell::Float(p),
                Cell::Float(residual),
            ]);
        }
    }
    Ok(Output::Csv(table))
}

fn classical_entropy(config: &RunConfig) -> Result<Output> {
    let grid = config.gt_grid(10.0, 201)?;
    let temperature = config.temperature.unwrap_or(1.0);
    let mut labels = Vec::new();
    let mut columns = Vec::new();
    for (name, alpha) in config.alphas_or(&["10i", "0", "0.9"])? {
        let params = params_from_alpha(config.gamma, alpha)?;
        let spec = CoarseGrainSpec::canonical(&params, temperature)?;
        let s = |gt: f64| {
            Ok(coarse_grained_entropy(
                &params,
                temperature,
                gt / config.gamma,
                &spec,
            )?)
        };
        labels.push(format!("alpha={name}"));
        columns.push(
            grid.times()
                .iter()
                .map(|&gt| s(gt))
                .collect::<Result<_>>()?,
        );
        columns.push(
            grid.times()
                .iter()
                .map(|&gt| rate(s, gt))
                .collect::<Result<_>>()?,
        );
    }
    Ok(Output::Csv(series_table(
        &grid,
        &["S", "R"],
        &labels,
        &columns,
    )))
}

#[derive(Default)]
struct Deviations(Vec<(&'static str, f64)>);

impl Deviations {
    fn track(&mut self, name: &'static str, got: f64, want: f64) {
        let d = (got - want).abs();
        match self.0.iter_mut().find(|(n, _)| *n == name) {
            Some(entry) => entry.1 = entry.1.max(d),
            None => self.0.push((name, d)),
        }
    }

    fn report(&self, name: &str, tol: f64) -> (Value, bool) {
        let pass = self.0.iter().all(|(_, d)| *d <= tol);
        let deviations: serde_json::Map<String, Value> = self
            .0
            .iter()
            .map(|(n, d)| (n.to_string(), json!(d)))
            .collect();
        (
            json!({ "name": name, "tolerance": tol, "max_deviation": deviations, "pass": pass }),
            pass,
        )
    }
}

fn verify_gaussian(config: &RunConfig, grid: &TimeGrid) -> Result<(Value, bool)> {
    let params = config.params()?;
    let phys = physical(&params, grid)?;
    let mut dev = Deviations::default();
    let states: Vec<GaussianInitialState> = if config.states.is_empty() {
        vec![GaussianInitialState::new(1.0, 0.0, 1.0)?]
    } else {
        config
            .states
            .iter()
            .filter_map(|s| s.gaussian(&params).transpose())
            .collect::<Result<_>>()?
    };
    for state in &states {
        for bath in config.baths()? {
            let rho0 = prepare_gaussian(config.truncation(), &params, state)?;
            for (t, rho) in phys
                .times()
                .iter()
                .zip(evolve(&rho0, &params, &bath, &phys)?)
            {
                let o = observables(&rho, &params);
                let gt = params.gamma_damp() * t;
                let gcf = gcf_coefficients(&params, state, &bath, *t);
                let (n, var_e) = energy_moments(&params, state, &bath, *t)?;
                dev.track(
                    "entropy",
                    o.entropy,
                    entropy_gaussian(&bath, state.squeeze_r, gt),
                );
                dev.track("mean_q", o.mean_q, mean_q(&gcf)?);
                dev.track("var_q", o.var_q, gcf.var_q());
                dev.track("mean_n", o.mean_n, n);
                dev.track("var_energy", o.var_energy(), var_e);
                for (k, p) in o
                    .diagonals
                    .iter()
                    .enumerate()
                    .take(PHOTON_SUM_MAX as usize + 1)
                {
                    dev.track(
                        "photon_probability",
                        *p,
                        photon_probability(&params, state, &bath, k as u32, gt)?,
                    );
                }
            }
        }
    }
    Ok(dev.report("gaussian", QUANTUM_TOL))
}

fn verify_fock(config: &RunConfig, grid: &TimeGrid) -> Result<(Value, bool)> {
    let params = config.params()?;
    let phys = physical(&params, grid)?;
    let mut dev = Deviations::default();
    let numbers: Vec<u32> = if config.states.is_empty() {
        vec![1, 2, 3]
    } else {
        config
            .states
            .iter()
            .filter_map(|s| match s {
                StateSpec::Fock { n } => Some(*n),
                StateSpec::Gaussian { .. } => None,
            })
            .collect()
    };
    let baths = if config.n_beta.is_empty() && config.temperature.is_none() {
        vec![ThermalBath::new(0.5)?, ThermalBath::new(1.2)?]
    } else {
        config.baths()?
    };
    for n in numbers {
        for bath in &baths {
            let rho0 = prepare_fock(config.truncation(), n as usize)?;
            for (t, rho) in phys
                .times()
                .iter()
                .zip(evolve(&rho0, &params, bath, &phys)?)
            {
                let o = observables(&rho, &params);
                let gt = params.gamma_damp() * t;
                let mean_n = mean_number(n, bath, gt);
                dev.track("entropy", o.entropy, entropy_fock(n, bath, gt)?);
                dev.track("mean_q", o.mean_q, 0.0);
                dev.track("var_q", o.var_q, (2.0 * mean_n + 1.0) * params.sigma_c2());
                dev.track("mean_n", o.mean_n, mean_n);
                dev.track(
                    "var_energy",
                    o.var_energy(),
                    energy_variance_fock(n, bath, gt),
                );
            }
        }
    }
    Ok(dev.report("fock", QUANTUM_TOL))
}

fn verify_classical(config: &RunConfig, grid: &TimeGrid) -> Result<(Value, bool)> {
    let temperature = config.temperature.unwrap_or(1.0);
    let (q0, p0) = (0.7, -0.4);
    let mut dev = Deviations::default();
    for (_, alpha) in config.alphas_or(&["10i", "2i", "0", "0.5", "0.9"])? {
        let params = params_from_alpha(config.gamma, alpha)?;
        let phys = physical(&params, grid)?;
        let ode = classical_moment_evolve(
            &params,
            temperature,
            &ClassicalMomentState::point(q0, p0),
            &phys,
        )?;
        for (t, m) in phys.times().iter().zip(ode) {
            let g = classical_coefficients(&params, temperature, q0, p0, *t)?;
            dev.track("mean_q", g.mean_q(), m.mean.0);
            dev.track("mean_p", g.mean_p(), m.mean.1);
            dev.track("var_q", g.var_q(), m.cov.0);
            dev.track("cov_qp", g.cov_qp(), m.cov.1);
            dev.track("var_p", g.var_p(), m.cov.2);
        }
    }
    Ok(dev.report("classical", CLASSICAL_TOL))
}

type VerifyRun = fn(&RunConfig, &TimeGrid) -> Result<(Value, bool)>;

fn verify(config: &RunConfig) -> Result<Report> {
    let grid = config.gt_grid(5.0, 51)?;
    let set = config.verify_set.unwrap_or(VerifySet::All);
    let mut sets = Vec::new();
    let mut pass = true;
    let runs: [(VerifySet, VerifyRun); 3] = [
        (VerifySet::Gaussian, verify_gaussian),
        (VerifySet::Fock, verify_fock),
        (VerifySet::Classical, verify_classical),
    ];
    for (kind, run) in runs {
        if set == VerifySet::All || set == kind {
            let (value, ok) = run(config, &grid)?;
            sets.push(value);
            pass &= ok;
        }
    }
    let output = Output::Json(json!({
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "truncation": config.truncation(),
        "t_max": grid.times().last(),
        "points": grid.len(),
        "sets": sets,
        "pass": pass,
    }));
    Ok(Report { output, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_matches_derivative() {
        let f = |x: f64| Ok(x.sin());
        assert!((rate(f, 0.0).unwrap() - 1.0).abs() < 1e-9);
        assert!((rate(f, 1.0).unwrap() - 1f64.cos()).abs() < 1e-9);
    }

    #[test]
    fn unknown_alpha_is_rejected() {
        let mut cfg = RunConfig::new(CommandKind::ClassicalEntropy);
        cfg.alpha = vec!["nope".into()];
        assert!(run(&cfg).is_err());
    }

    #[test]
    fn gaussian_q_variance_rejects_fock() {
        let mut cfg = RunConfig::new(CommandKind::Variance);
        cfg.states = vec![StateSpec::Fock { n: 1 }];
        assert!(run(&cfg).is_err());
    }
}
