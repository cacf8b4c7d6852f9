use proptest::prelude::*;
use tvgain_core::estimator::{
    compute_psi, lyapunov, step, theorem_bounds, verify_decay, EstimatorState, StepConvention, StepOptions,
};
use tvgain_core::excitation::{ExcitationMode, OmegaState};
use tvgain_core::gain::{GainParams, Hyperparameters};
use tvgain_core::linalg::SymMatrix;
use tvgain_core::plant::RegressorSample;

fn worked_hp() -> Hyperparameters {
    let params = GainParams { lambda_omega: 0.75, lambda_gamma: 0.4, kappa: 2.0 };
    Hyperparameters::from_bounds(params, 1.0, ExcitationMode::Persistent, 0.5, 4.0 / 3.0).unwrap()
}

fn sample(k: usize, phi: Vec<f64>, y: f64) -> RegressorSample {
    RegressorSample { k, phi, y, u: 0.0 }
}

type M2 = [[f64; 2]; 2];

fn mm(a: M2, b: M2) -> M2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn single_step_matches_hand_evaluation() {
    let (lo, lg, kappa) = (0.6, 0.3, 1.5);
    let g0: M2 = [[0.8, 0.1], [0.1, 0.5]];
    let w0: M2 = [[0.7, -0.2], [-0.2, 0.4]];
    let theta0 = [0.3, -0.2];
    let phi = [1.0, 2.0];
    let y = 0.9;

    // straight-line evaluation
    let nrm = 1.0 + phi[0] * phi[0] + phi[1] * phi[1];
    let e = phi[0] * theta0[0] + phi[1] * theta0[1] - y;
    let pp: M2 = [[phi[0] * phi[0] / nrm, phi[0] * phi[1] / nrm], [phi[1] * phi[0] / nrm, phi[1] * phi[1] / nrm]];
    let mut w1 = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            w1[i][j] = (1.0 - lo) * w0[i][j] + pp[i][j];
        }
    }
    let gwg = mm(mm(g0, w1), g0);
    let gppg = mm(mm(g0, pp), g0);
    let gw0g = mm(mm(g0, w0), g0);
    let mut g1 = [[0.0; 2]; 2];
    let mut gbar = [[0.0; 2]; 2];
    let mut ups = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            g1[i][j] = g0[i][j] + lg * (g0[i][j] - kappa * gwg[i][j]);
            gbar[i][j] = g0[i][j] - lg * kappa * gppg[i][j];
            ups[i][j] = lg * g0[i][j] - lg * kappa * (1.0 - lo) * gw0g[i][j];
        }
    }
    let gphi = [g0[0][0] * phi[0] + g0[0][1] * phi[1], g0[1][0] * phi[0] + g0[1][1] * phi[1]];
    let theta1 = [theta0[0] - lg * kappa * gphi[0] * e / nrm, theta0[1] - lg * kappa * gphi[1] * e / nrm];

    let hp = Hyperparameters::from_bounds(
        GainParams { lambda_omega: lo, lambda_gamma: lg, kappa },
        1.0,
        ExcitationMode::Persistent,
        0.1,
        1.0 / lo,
    )
    .unwrap();
    let omega = OmegaState::new(SymMatrix::from_rows(&[&w0[0], &w0[1]]).unwrap(), lo).unwrap();
    let state = EstimatorState::new(theta0.to_vec(), SymMatrix::from_rows(&[&g0[0], &g0[1]]).unwrap(), omega).unwrap();
    let out = step(&state, &sample(0, phi.to_vec(), y), &hp, &StepOptions::default()).unwrap();
    let s = out.state;

    assert!(close(out.e, e, 1e-15));
    assert_eq!(s.k, 1);
    for i in 0..2 {
        assert!(close(s.theta[i], theta1[i], 1e-14));
        for j in 0..2 {
            assert!(close(s.omega().get(i, j), w1[i][j], 1e-14));
            assert!(close(s.gamma.get(i, j), g1[i][j], 1e-14));
            assert!(close(s.gamma_bar.get(i, j), gbar[i][j], 1e-14));
            assert!(close(s.upsilon.get(i, j), ups[i][j], 1e-14));
            assert!(close(gbar[i][j] + ups[i][j], g1[i][j], 1e-14));
        }
    }
}

#[test]
fn worked_theorem_constants() {
    // Γ_l = min{3/8, 1/3} = 1/3, Γ̄_min = min{1 − 4/5, 1/3 − 4/45} = 1/5,
    // Υ_min = min{(2/5)(1/3), (2/15)(1/3)(7/3)} = 14/135,
    // Ψ_min = (14/135)/(1 + 2) = 14/405, μ₁ = 14/2025
    let b = theorem_bounds(&worked_hp(), 0.0, 0.0, 0.5).unwrap();
    assert!(close(b.gamma_bar_min, 1.0 / 5.0, 1e-15));
    assert!(close(b.gamma_bar_max, 1.0, 0.0));
    assert!(close(b.upsilon_min, 14.0 / 135.0, 1e-15));
    assert!(close(b.psi_min, 14.0 / 405.0, 1e-15));
    assert!(close(b.mu1, 14.0 / 2025.0, 1e-16));
    assert!(close(b.mu2, 7.0 / 2025.0, 1e-16));
    assert!(close(b.c1, 5.0, 1e-14) && close(b.c2, 5.0, 1e-14));
    assert_eq!(b.v_bound, 0.0);
}

#[test]
fn theorem_bounds_name_the_violated_kappa_term() {
    let params = GainParams { lambda_omega: 0.75, lambda_gamma: 0.4, kappa: 2.6 };
    let hp = Hyperparameters::from_bounds(params, 1.0, ExcitationMode::Persistent, 0.5, 4.0 / 3.0).unwrap();
    let err = theorem_bounds(&hp, 0.0, 0.0, 0.5).unwrap_err();
    assert!(format!("{err}").contains("kappa <"), "{err}");
}

proptest! {
    #[test]
    fn v_bound_scales_with_delta(delta in 1e-4..1.0f64, theta_max in 0.1..10.0f64) {
        let hp = worked_hp();
        let a = theorem_bounds(&hp, delta, theta_max, 0.5).unwrap();
        let b = theorem_bounds(&hp, 2.0 * delta, theta_max, 0.5).unwrap();
        prop_assert!((b.v_bound - 4.0 * a.v_bound).abs() <= 1e-12 * b.v_bound);
        prop_assert!((b.v_bound_alt - 2.0 * a.v_bound_alt).abs() <= 1e-12 * b.v_bound_alt);
    }

    #[test]
    fn decomposition_holds_along_random_runs(
        phis in prop::collection::vec(prop::collection::vec(-3.0..3.0f64, 2), 60),
        ys in prop::collection::vec(-3.0..3.0f64, 60),
    ) {
        let params = GainParams { lambda_omega: 0.5, lambda_gamma: 0.05, kappa: 1.2 };
        let hp = Hyperparameters::from_bounds(params, 1.0, ExcitationMode::Persistent, 0.1, 2.0).unwrap();
        let mut state = EstimatorState::initial(2, &hp).unwrap();
        for (k, (phi, y)) in phis.into_iter().zip(ys).enumerate() {
            state = step(&state, &sample(k, phi, y), &hp, &StepOptions::default()).unwrap().state;
            let residual = state.gamma.sub(&state.gamma_bar).unwrap().sub(&state.upsilon).unwrap();
            prop_assert!(residual.frobenius_norm() <= 1e-10 * (1.0 + state.gamma.frobenius_norm()));
            if state.upsilon.eigen_range().unwrap().0 >= 0.0 && state.gamma_bar.eigen_range().unwrap().0 > 0.0 {
                let psi = compute_psi(&state.gamma_bar, &state.upsilon).unwrap();
                let lhs = state.gamma.inverse("gamma").unwrap();
                let rhs = state.gamma_bar.inverse("gamma_bar").unwrap().sub(&psi).unwrap();
                prop_assert!(lhs.sub(&rhs).unwrap().frobenius_norm() <= 1e-9 * lhs.frobenius_norm());
            }
        }
    }
}

#[test]
fn literal_convention_breaks_the_decomposition() {
    let hp = worked_hp();
    let mut state = EstimatorState::initial(1, &hp).unwrap();
    let opts = StepOptions { convention: StepConvention::Literal, clamp_until: None };
    let mut worst = 0.0f64;
    for (k, phi) in [1.0, 3.0, -2.0, 0.5].into_iter().enumerate() {
        state = step(&state, &sample(k, vec![phi], 0.0), &hp, &opts).unwrap().state;
        let r = state.gamma.sub(&state.gamma_bar).unwrap().sub(&state.upsilon).unwrap();
        worst = worst.max(r.frobenius_norm());
    }
    assert!(worst > 1e-3);
}

#[test]
fn perfect_initial_estimate_stays_put() {
    let hp = worked_hp();
    let omega = OmegaState::identity(1, hp.lambda_omega).unwrap();
    let mut state = EstimatorState::new(vec![2.0], SymMatrix::identity(1), omega).unwrap();
    for k in 0..50 {
        state = step(&state, &sample(k, vec![1.0], 2.0), &hp, &StepOptions::default()).unwrap().state;
        assert_eq!(state.theta, vec![2.0]);
        assert_eq!(lyapunov(&[0.0], &state.gamma_bar).unwrap(), 0.0);
    }
}

#[test]
fn zero_regressor_grows_gain() {
    let hp = worked_hp();
    let omega = OmegaState::new(SymMatrix::zeros(2), hp.lambda_omega).unwrap();
    let mut state = EstimatorState::new(vec![1.0, -1.0], SymMatrix::scaled_identity(2, 0.1), omega).unwrap();
    for k in 0..5 {
        let prev = state.gamma.get(0, 0);
        state = step(&state, &sample(k, vec![0.0, 0.0], 7.0), &hp, &StepOptions::default()).unwrap().state;
        assert_eq!(state.theta, vec![1.0, -1.0]);
        assert!(close(state.gamma.get(0, 0), prev * 1.4, 1e-15));
    }
}

#[test]
fn lyapunov_examples() {
    assert_eq!(lyapunov(&[3.0, 4.0], &SymMatrix::identity(2)).unwrap(), 25.0);
    assert!(close(lyapunov(&[1.0, 1.0], &SymMatrix::diagonal(&[0.5, 2.0])).unwrap(), 2.5, 1e-15));
}

#[test]
fn decay_check_on_synthetic_traces() {
    let b = theorem_bounds(&worked_hp(), 0.0, 0.0, 0.5).unwrap();
    let rate = 1.0 - b.mu2;
    let good: Vec<f64> = (0..100).map(|k| rate.powi(k)).collect();
    let r = verify_decay(&good, &b, (0, None));
    assert!(r.ok && r.violations.is_empty() && r.steps_checked == 99);

    let mut bad = good.clone();
    bad[50] = bad[49];
    let r = verify_decay(&bad, &b, (0, None));
    assert!(!r.ok);
    assert_eq!(r.violations[0].k, 50);

    // a bounded window ignores everything after its end
    let r = verify_decay(&bad, &b, (10, Some(40)));
    assert!(r.ok);
    assert_eq!(r.steps_checked, 30);
    assert_eq!(r.steps_uncertified, 99 - 30);
}
