use qho_relax::fock::{entropy_fock1_closed, mean_number};
use qho_relax::gaussian::{entropy_gaussian, gcf_coefficients, mean_p, q_variance};
use qho_relax::oracle::{
    evolve, evolve_with_steps, observables, prepare_fock, prepare_gaussian, DensityMatrix,
};
use qho_relax::photon::photon_probability;
use qho_relax::{GaussianInitialState, OscillatorParams, ThermalBath, TimeGrid};

fn bath(n: f64) -> ThermalBath {
    ThermalBath::new(n).unwrap()
}

fn grid(params: &OscillatorParams, gt_end: f64, points: usize) -> TimeGrid {
    TimeGrid::linspace(0.0, gt_end / params.gamma_damp(), points).unwrap()
}

#[test]
fn first_excited_state_follows_closed_form() {
    let params = OscillatorParams::new(2.0, 0.3).unwrap();
    let b = bath(0.7);
    let g = grid(&params, 3.0, 31);
    let rho0 = prepare_fock(40, 1).unwrap();
    for (t, rho) in g
        .times()
        .iter()
        .zip(evolve(&rho0, &params, &b, &g).unwrap())
    {
        let o = observables(&rho, &params);
        let gt = params.gamma_damp() * t;
        assert!(
            (o.entropy - entropy_fock1_closed(&b, gt)).abs() < 1e-7,
            "Γt = {gt}"
        );
        assert!((o.mean_n - mean_number(1, &b, gt)).abs() < 1e-7);
    }
}

#[test]
fn thermal_state_is_stationary() {
    let params = OscillatorParams::new(1.0, 0.5).unwrap();
    let b = bath(1.0);
    let rho0 = DensityMatrix::thermal(60, &b).unwrap();
    let g = grid(&params, 2.0, 5);
    for rho in evolve(&rho0, &params, &b, &g).unwrap() {
        let diff = (rho.entries() - rho0.entries())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-10, "{diff}");
    }
}

#[test]
fn displaced_squeezed_state_moments() {
    let params = OscillatorParams::new(1.5, 0.2).unwrap();
    let state = GaussianInitialState::new(0.4, -0.6, 0.5).unwrap();
    let b = bath(0.4);
    let g = grid(&params, 2.0, 21);
    let rho0 = prepare_gaussian(50, &params, &state).unwrap();
    for (t, rho) in g
        .times()
        .iter()
        .zip(evolve(&rho0, &params, &b, &g).unwrap())
    {
        let o = observables(&rho, &params);
        let gt = params.gamma_damp() * t;
        let gcf = gcf_coefficients(&params, &state, &b, *t);
        assert!((o.entropy - entropy_gaussian(&b, 0.5, gt)).abs() < 1e-7);
        assert!((o.mean_p - mean_p(&gcf).unwrap()).abs() < 1e-7);
        assert!((o.var_p - gcf.var_p()).abs() < 1e-7);
        assert!((o.var_q - q_variance(&params, &state, &b, *t).v * params.sigma_c2()).abs() < 1e-7);
        for (n, p) in o.diagonals.iter().enumerate().take(30) {
            let want = photon_probability(&params, &state, &b, n as u32, gt).unwrap();
            assert!((p - want).abs() < 1e-7, "n = {n}, Γt = {gt}");
        }
    }
}

#[test]
fn halving_the_step_changes_little() {
    let params = OscillatorParams::new(1.0, 0.5).unwrap();
    let state = GaussianInitialState::new(0.5, 0.0, 0.5).unwrap();
    let b = bath(0.5);
    let g = grid(&params, 1.0, 5);
    let rho0 = prepare_gaussian(40, &params, &state).unwrap();
    let coarse = evolve_with_steps(&rho0, &params, &b, &g, 1).unwrap();
    let fine = evolve_with_steps(&rho0, &params, &b, &g, 2).unwrap();
    for (a, f) in coarse.iter().zip(&fine) {
        let (sa, sf) = (
            observables(a, &params).entropy,
            observables(f, &params).entropy,
        );
        assert!((sa - sf).abs() < 1e-9, "{sa} vs {sf}");
    }
}

#[test]
fn truncation_is_converged() {
    let params = OscillatorParams::new(1.0, 1.0).unwrap();
    let state = GaussianInitialState::new(0.5, 0.3, 0.5).unwrap();
    let b = bath(1.0);
    let g = grid(&params, 1.0, 3);
    let small = evolve(
        &prepare_gaussian(40, &params, &state).unwrap(),
        &params,
        &b,
        &g,
    )
    .unwrap();
    let large = evolve(
        &prepare_gaussian(80, &params, &state).unwrap(),
        &params,
        &b,
        &g,
    )
    .unwrap();
    for (s, l) in small.iter().zip(&large) {
        let (ss, sl) = (
            observables(s, &params).entropy,
            observables(l, &params).entropy,
        );
        assert!((ss - sl).abs() < 1e-6, "{ss} vs {sl}");
    }
}

#[test]
fn hot_bath_overflows_small_truncation() {
    let params = OscillatorParams::new(1.0, 1.0).unwrap();
    let g = grid(&params, 3.0, 2);
    let rho0 = prepare_fock(10, 2).unwrap();
    assert!(evolve(&rho0, &params, &bath(5.0), &g).is_err());
}
