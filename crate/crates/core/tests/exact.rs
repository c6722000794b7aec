mod common;

use approx::assert_relative_eq;
use onebit_train::exact::{
    c_bound_exact, mi_direct, reff_exact, ChannelIntegration, ExactModel, SmallSystem,
};
use onebit_train::{Error, Method};

fn tensor(order: usize) -> ChannelIntegration {
    ChannelIntegration::TensorQuadrature { order }
}

#[test]
fn conditional_laws_match_polar_integration() {
    let rho = 10.0;
    let sys = SmallSystem::new(1, 1, 3, rho, tensor(200)).unwrap();
    let model = ExactModel::new(&sys, 2).unwrap();
    let cases: [([usize; 2], [usize; 2]); 3] = [([0, 3], [0, 3]), ([1, 1], [2, 1]), ([0, 2], [0, 0])];
    for (x_t, y_t) in cases {
        let p_t = common::single_link_prob(&x_t, &y_t, rho);
        assert_relative_eq!(model.d2(2, &x_t, &y_t).unwrap(), p_t, max_relative = 1e-9);
        for xd in 0..4 {
            for yd in 0..4 {
                let cols = [x_t[0], x_t[1], xd];
                let outs = [y_t[0], y_t[1], yd];
                let p_l = common::single_link_prob(&cols, &outs, rho);
                let d1 = model.d1(2, &[xd], &[yd], &x_t, &y_t).unwrap();
                let d3 = model.d3(2, &[xd], &[yd], &x_t, &y_t).unwrap();
                assert_relative_eq!(d1, p_l, max_relative = 1e-9);
                assert!((d3 - p_l / p_t).abs() < 1e-8, "{x_t:?} {y_t:?} {xd} {yd}: {d3} vs {}", p_l / p_t);
            }
        }
    }
}

#[test]
fn laws_are_normalized() {
    for (m, n, order) in [(1usize, 1usize, 24usize), (1, 2, 24), (2, 1, 6), (2, 2, 6)] {
        let sys = SmallSystem::new(m, n, 3, 3.0, tensor(order)).unwrap();
        let model = ExactModel::new(&sys, 1).unwrap();
        let x_t: Vec<usize> = (0..m).map(|k| (k * 3 + 1) % 4).collect();
        let outcomes = model.training_outcomes(1, &x_t).unwrap();
        let total: f64 = outcomes.iter().map(|o| o.weight).sum();
        assert_relative_eq!(total, 1.0, max_relative = 1e-12);
        let x_d: Vec<usize> = (0..m).map(|k| (k + 2) % 4).collect();
        for o in outcomes.iter().step_by(3) {
            let mut s = 0.0;
            for code in 0..4usize.pow(n as u32) {
                let y_d: Vec<usize> = (0..n).map(|k| (code >> (2 * k)) & 3).collect();
                s += model.d3(1, &x_d, &y_d, &o.x_t, &o.y_t).unwrap();
            }
            assert_relative_eq!(s, 1.0, max_relative = 1e-12);
            assert!(model.d4(1, &o.x_t, &o.y_t).unwrap() >= -1e-15);
        }
    }
}

#[test]
fn rotating_one_transmitter_leaves_laws_unchanged() {
    let sys = SmallSystem::new(2, 1, 3, 5.0, tensor(8)).unwrap();
    let model = ExactModel::new(&sys, 2).unwrap();
    // x_t[p*M + m]: rotate transmitter 1 by j in every training slot
    let x_t = [0, 2, 1, 3];
    let rotated = [0, 3, 1, 0];
    for y in 0..16usize {
        let y_t = [y & 3, y >> 2];
        let a = model.d2(2, &x_t, &y_t).unwrap();
        let b = model.d2(2, &rotated, &y_t).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-12);
    }
}

#[test]
fn pipeline_matches_direct_mutual_information() {
    for (t, rho) in [(2, 1.0), (3, 10.0), (4, 3.0)] {
        let sys = SmallSystem::new(1, 1, t, rho, tensor(24)).unwrap();
        for tt in 1..t {
            let a = reff_exact(tt, &sys).unwrap();
            let b = mi_direct(tt, &sys).unwrap();
            assert!((a.value - b.value).abs() < 1e-10, "T {t} T_t {tt}: {a:?} {b:?}");
            assert_eq!(a.std_error, 0.0);
        }
    }
    let sys = SmallSystem::new(1, 2, 3, 2.0, tensor(16)).unwrap();
    let a = reff_exact(2, &sys).unwrap();
    let b = mi_direct(2, &sys).unwrap();
    assert!((a.value - b.value).abs() < 1e-10);
}

#[test]
fn frozen_single_link_rates() {
    let sys = SmallSystem::new(1, 1, 2, 1.0, tensor(24)).unwrap();
    assert!((reff_exact(1, &sys).unwrap().value - 0.163_408_331_891).abs() < 1e-11);
    let sys = SmallSystem::new(1, 1, 3, 1.0, tensor(24)).unwrap();
    assert!((reff_exact(2, &sys).unwrap().value - 0.251_629_167_388).abs() < 1e-11);
}

#[test]
fn rate_is_bounded_and_grows_with_snr() {
    let mut last = -1.0;
    for rho in [0.0, 0.3, 1.0, 10.0, 100.0] {
        let sys = SmallSystem::new(1, 1, 3, rho, tensor(24)).unwrap();
        let r = reff_exact(1, &sys).unwrap().value;
        assert!((0.0..=2.0).contains(&r));
        assert!(r >= last - 1e-12, "rho {rho}: {r} < {last}");
        if rho == 0.0 {
            assert_eq!(r, 0.0);
        }
        last = r;
    }
}

#[test]
fn more_training_helps() {
    let sys = SmallSystem::new(1, 1, 4, 10.0, tensor(24)).unwrap();
    let r: Vec<f64> = (1..4).map(|tt| reff_exact(tt, &sys).unwrap().value).collect();
    assert!(r.windows(2).all(|w| w[1] > w[0]), "{r:?}");
}

#[test]
fn bound_picks_best_training_length() {
    let sys = SmallSystem::new(1, 1, 4, 10.0, tensor(24)).unwrap();
    let (b, rates) = c_bound_exact(&sys).unwrap();
    assert_eq!(rates.len(), 3);
    let obj: Vec<f64> = rates
        .iter()
        .enumerate()
        .map(|(i, r)| (3 - i) as f64 / 4.0 * r.value)
        .collect();
    let best = obj.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(b.c_bound, best);
    let tt = obj.iter().position(|&v| v == best).unwrap() + 1;
    assert_eq!(b.beta_t_opt, tt as f64);
    assert_eq!(b.method, Method::Exact);
    assert_eq!(b.params.alpha, 1.0);
    assert_eq!(b.params.beta, 4.0);
}

#[test]
fn monte_carlo_is_reproducible() {
    let mc = |seed| ChannelIntegration::MonteCarlo { samples: 20_000, seed };
    let sys = SmallSystem::new(1, 1, 3, 4.0, mc(5)).unwrap();
    let a = reff_exact(1, &sys).unwrap();
    let b = reff_exact(1, &sys).unwrap();
    assert_eq!(a, b);
    assert!(a.std_error > 0.0);
    let c = reff_exact(1, &SmallSystem::new(1, 1, 3, 4.0, mc(6)).unwrap()).unwrap();
    assert_ne!(a.value, c.value);
    let exact = reff_exact(1, &SmallSystem::new(1, 1, 3, 4.0, tensor(64)).unwrap()).unwrap();
    assert!(a.agrees_with(&exact, 5.0, 0.0), "{a:?} vs {exact:?}");
    let d = mi_direct(1, &sys).unwrap();
    assert!(a.agrees_with(&d, 5.0, 0.0), "{a:?} vs {d:?}");
}

#[test]
fn oversized_or_invalid_systems_are_rejected() {
    assert!(matches!(
        SmallSystem::new(3, 1, 3, 1.0, tensor(8)),
        Err(Error::SystemTooLarge { .. })
    ));
    assert!(matches!(
        SmallSystem::new(1, 1, 6, 1.0, tensor(8)),
        Err(Error::SystemTooLarge { .. })
    ));
    assert!(SmallSystem::new(1, 1, 1, 1.0, tensor(8)).is_err());
    assert!(SmallSystem::new(1, 1, 3, -1.0, tensor(8)).is_err());
    assert!(SmallSystem::new(1, 1, 3, 1.0, tensor(0)).is_err());
    let sys = SmallSystem::new(1, 1, 3, 1.0, tensor(8)).unwrap();
    assert!(reff_exact(0, &sys).is_err());
    assert!(reff_exact(3, &sys).is_err());
    let big = SmallSystem::new(2, 2, 5, 1.0, tensor(4)).unwrap();
    assert!(matches!(reff_exact(4, &big), Err(Error::BudgetExceeded { .. })));
    assert!(matches!(mi_direct(4, &big), Err(Error::BudgetExceeded { .. })));
    let model = ExactModel::new(&sys, 2).unwrap();
    assert!(model.d2(1, &[4], &[0]).is_err());
    assert!(model.d2(1, &[0, 1], &[0]).is_err());
}
