mod common;

use approx::assert_relative_eq;
use onebit_train::numerics::QuadratureRule;
use onebit_train::replica::{
    csir_rate, f1_value, f2_linear, f2_onebit, onebit_overlap_map, qh_candidates, receiver_rhs,
    reff, reff_onebit, single_pair_capacity, solve_qh, solve_qx_linear, solve_qx_onebit,
    ChannelOverlap, SystemParams, TxType,
};
use onebit_train::bound::small_alpha_rate;
use proptest::prelude::*;

fn rule() -> QuadratureRule<f64> {
    QuadratureRule::gauss_hermite(128).unwrap()
}

fn ln_cosh(x: f64) -> f64 {
    x.abs() + (-2.0 * x.abs()).exp().ln_1p() - std::f64::consts::LN_2
}

/// Minimum-free-energy root of `q = (1−q)·rhs(q)` by direct integration.
fn oracle_receiver_root(gain: f64, load: f64) -> (f64, f64) {
    let g = |q: f64| q - (1.0 - q) * common::rhs(q, gain, load);
    let mut roots = common::all_roots(g, 0.0, 1.0 - 1e-9, 60);
    roots.retain(|&q| q > 0.0);
    roots
        .into_iter()
        .map(|q| {
            let qh = common::rhs(q, gain, load);
            (q, common::free_energy(q, qh, gain, load))
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
}

fn oracle_psi(q_hat: f64) -> f64 {
    let s = q_hat.sqrt();
    common::normal_expect(
        |u| {
            let t = (q_hat + s * u).tanh();
            2.0 * t - t * t
        },
        1e-15,
    )
}

fn oracle_f2_onebit(r: f64, r_hat: f64, alpha: f64, snr: f64) -> f64 {
    let c = (snr * r / (snr * (1.0 - r) + 1.0)).sqrt();
    let s = r_hat.sqrt();
    -4.0 * alpha * common::scaled_expect(c, common::q_log_q) + r_hat
        - 2.0 * common::normal_expect(|u| ln_cosh(r_hat + s * u), 1e-15)
        + r * r_hat
}

fn oracle_rate(f2: f64, alpha: f64, snr: f64) -> f64 {
    (f2 + 4.0 * alpha * common::scaled_expect(snr.sqrt(), common::q_log_q)) / std::f64::consts::LN_2
}

#[test]
fn training_overlap_matches_direct_integration() {
    let r = rule();
    for (rho, bt) in [(0.1, 2.0), (1.0, 1.0), (10.0, 1.0), (10.0, 5.0), (100.0, 0.3)] {
        let (want, _) = oracle_receiver_root(rho, bt);
        let got = solve_qh(rho, bt, &r, 1e-12).unwrap();
        assert!((got.q_h - want).abs() < 1e-8, "rho {rho} beta_t {bt}: {} vs {want}", got.q_h);
        assert_relative_eq!(got.q_h_hat, got.q_h / (1.0 - got.q_h), max_relative = 1e-12);
    }
}

#[test]
fn linear_data_overlap_matches_direct_integration() {
    let r = rule();
    for (snr, alpha) in [(0.5, 1.0), (3.0, 4.0), (10.0, 0.5)] {
        let (want, _) = oracle_receiver_root(snr, alpha);
        let got = solve_qx_linear(snr, alpha, &r, 1e-12).unwrap();
        assert!((got.q_x - want).abs() < 1e-8, "snr {snr} alpha {alpha}");
    }
}

#[test]
fn onebit_data_overlap_matches_direct_integration() {
    let (snr, alpha) = (10.0, 4.0);
    let g = |q: f64| q - oracle_psi(common::rhs(q, snr, alpha));
    let roots = common::all_roots(g, 1e-6, 1.0 - 1e-9, 40);
    let (want, _) = roots
        .into_iter()
        .map(|q| {
            let qh = common::rhs(q, snr, alpha);
            (q, oracle_f2_onebit(q, qh, alpha, snr))
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    let got = solve_qx_onebit(snr, alpha, &rule(), 1e-12).unwrap();
    assert!((got.q_x - want).abs() < 1e-7, "{} vs {want}", got.q_x);
}

#[test]
fn onebit_rate_matches_direct_integration() {
    let r = rule();
    let (alpha, rho, bt) = (4.0, 10.0, 2.0);
    let p = SystemParams::new(alpha, 8.0, rho, TxType::OneBit).unwrap();
    let o = solve_qh(rho, bt, &r, 1e-12).unwrap();
    let d = solve_qx_onebit(o.snr_eff, alpha, &r, 1e-12).unwrap();
    let f2 = oracle_f2_onebit(d.q_x, d.q_x_hat, alpha, o.snr_eff);
    let want = oracle_rate(f2, alpha, o.snr_eff);
    let got = reff_onebit(&p, &o, &r, 1e-12).unwrap();
    assert_relative_eq!(got, want, max_relative = 1e-7);
}

#[test]
fn linear_rate_matches_direct_integration() {
    let r = rule();
    let (alpha, rho, bt) = (2.0, 3.0, 1.5);
    let p = SystemParams::new(alpha, 8.0, rho, TxType::Linear).unwrap();
    let o = solve_qh(rho, bt, &r, 1e-12).unwrap();
    let (q, f2) = oracle_receiver_root(o.snr_eff, alpha);
    let d = solve_qx_linear(o.snr_eff, alpha, &r, 1e-12).unwrap();
    assert!((d.q_x - q).abs() < 1e-8);
    let want = oracle_rate(f2, alpha, o.snr_eff);
    let got = reff(&p, &o, &r, 1e-12).unwrap();
    assert_relative_eq!(got, want, max_relative = 1e-7);
}

#[test]
fn csir_rate_matches_direct_integration() {
    let (alpha, rho) = (1.0, 10.0);
    let (q, f2) = oracle_receiver_root(rho, alpha);
    assert!(q > 0.0);
    let want = oracle_rate(f2, alpha, rho);
    assert_relative_eq!(csir_rate(alpha, rho, &rule(), 1e-12).unwrap(), want, max_relative = 1e-7);
}

#[test]
fn single_pair_capacity_matches_direct_integration() {
    let want = 2.0
        * (1.0
            - common::normal_expect(
                |u| {
                    let p = onebit_train::numerics::q_function(u);
                    if p <= 0.0 || p >= 1.0 {
                        0.0
                    } else {
                        -(p * p.log2() + (1.0 - p) * (1.0 - p).log2())
                    }
                },
                1e-15,
            ));
    assert_relative_eq!(want, 0.557_304_959_111_036_6, max_relative = 1e-12);
    assert_relative_eq!(single_pair_capacity(1.0, &rule()).unwrap(), want, max_relative = 1e-9);
}

#[test]
fn small_alpha_rate_tracks_one_bit_rate() {
    let r = rule();
    for snr in [0.3, 1.0, 10.0] {
        let o = ChannelOverlap::perfect(snr);
        for alpha in [0.01, 0.02] {
            let p = SystemParams::new(alpha, 8.0, snr, TxType::OneBit).unwrap();
            let exact = reff_onebit(&p, &o, &r, 1e-12).unwrap();
            let approx = small_alpha_rate(alpha, snr, &r).unwrap();
            assert!((approx / exact - 1.0).abs() < 0.1, "snr {snr} alpha {alpha}: {approx} vs {exact}");
        }
    }
}

#[test]
fn several_training_roots_are_reported_in_order() {
    let r = rule();
    let c = qh_candidates(10.0, 1.0, &r, 1e-10).unwrap();
    assert!(!c.is_empty());
    assert!(c.windows(2).all(|w| w[0].0.q_h < w[1].0.q_h));
    let best = solve_qh(10.0, 1.0, &r, 1e-10).unwrap();
    let min = c.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
    assert_eq!(best.q_h, min.0.q_h);
}

#[test]
fn perfect_training_has_unit_overlap() {
    let o = ChannelOverlap::perfect(7.0);
    assert_eq!(o.q_h, 1.0);
    assert_eq!(o.snr_eff, 7.0);
}

#[test]
fn invalid_inputs_are_rejected() {
    let r = rule();
    assert!(solve_qh(-1.0, 1.0, &r, 1e-10).is_err());
    assert!(solve_qh(1.0, f64::NAN, &r, 1e-10).is_err());
    assert!(solve_qh(1.0, 1.0, &r, 0.0).is_err());
    assert!(solve_qx_onebit(1.0, -2.0, &r, 1e-10).is_err());
    assert!(f1_value(1.0, 1.0, 1.0, 1.0, &r).is_err());
    assert!(f2_onebit(1.5, 1.0, 1.0, 1.0, &r).is_err());
    assert!(onebit_overlap_map(-1.0_f64).is_err());
    assert!(SystemParams::new(0.0, 8.0, 1.0, TxType::Linear).is_err());
    assert!(SystemParams::new(1.0, -8.0, 1.0, TxType::Linear).is_err());
}

#[test]
fn transmitter_type_round_trips_through_text() {
    for tx in [TxType::Linear, TxType::OneBit] {
        assert_eq!(tx.to_string().parse::<TxType>().unwrap(), tx);
        let json = serde_json_like(tx);
        assert!(json == "linear" || json == "onebit");
    }
    assert_eq!("one-bit".parse::<TxType>().unwrap(), TxType::OneBit);
    assert!("qam".parse::<TxType>().is_err());
}

fn serde_json_like(tx: TxType) -> String {
    tx.to_string()
}

fn grad<F: Fn(f64, f64) -> f64>(f: F, q: f64, qh: f64) -> (f64, f64) {
    let h = 1e-5;
    (
        (f(q + h, qh) - f(q - h, qh)) / (2.0 * h),
        (f(q, qh + h) - f(q, qh - h)) / (2.0 * h),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn training_solution_is_stationary(rho in 0.05f64..100.0, bt in 0.1f64..10.0) {
        let r = rule();
        let o = solve_qh(rho, bt, &r, 1e-10).unwrap();
        let res = o.q_h - (1.0 - o.q_h) * receiver_rhs(o.q_h, rho, bt, &r).unwrap();
        prop_assert!(res.abs() <= 1e-10);
        if o.q_h < 1.0 - 1e-4 {
            let (gq, gh) = grad(|q, qh| f1_value(q, qh, rho, bt, &r).unwrap(), o.q_h, o.q_h_hat);
            prop_assert!(gq.abs() <= 1e-6 && gh.abs() <= 1e-6, "gradient {gq} {gh}");
        }
    }

    #[test]
    fn training_overlap_is_monotone(rho in 0.05f64..50.0, bt in 0.1f64..8.0) {
        let r = rule();
        let base = solve_qh(rho, bt, &r, 1e-12).unwrap().q_h;
        prop_assert!(solve_qh(rho * 1.5, bt, &r, 1e-12).unwrap().q_h >= base - 1e-10);
        prop_assert!(solve_qh(rho, bt * 1.5, &r, 1e-12).unwrap().q_h >= base - 1e-10);
        prop_assert!((0.0..1.0).contains(&base));
    }

    #[test]
    fn low_snr_training_law(rho in 1e-4f64..1e-3, bt in 0.1f64..5.0) {
        let q = solve_qh(rho, bt, &rule(), 1e-14).unwrap().q_h;
        let law = 2.0 * bt * rho / std::f64::consts::PI;
        prop_assert!((q / law - 1.0).abs() < 0.01);
    }

    #[test]
    fn data_solutions_are_stationary(snr in 0.1f64..30.0, alpha in 0.25f64..32.0) {
        let r = rule();
        let d = solve_qx_linear(snr, alpha, &r, 1e-10).unwrap();
        if d.q_x < 1.0 - 1e-4 {
            let (gq, gh) = grad(|q, qh| f2_linear(q, qh, alpha, snr, &r).unwrap(), d.q_x, d.q_x_hat);
            prop_assert!(gq.abs() <= 1e-6 && gh.abs() <= 1e-6, "linear gradient {gq} {gh}");
        }
        let d = solve_qx_onebit(snr, alpha, &r, 1e-10).unwrap();
        prop_assert!((d.q_x_hat - receiver_rhs(d.q_x, snr, alpha, &r).unwrap()).abs() <= 1e-9 * d.q_x_hat.max(1.0));
        prop_assert!((d.q_x - onebit_overlap_map(d.q_x_hat).unwrap()).abs() <= 1e-9);
        if d.q_x < 1.0 - 1e-4 {
            let (gq, gh) = grad(|q, qh| f2_onebit(q, qh, alpha, snr, &r).unwrap(), d.q_x, d.q_x_hat);
            prop_assert!(gq.abs() <= 1e-6 && gh.abs() <= 1e-6, "one-bit gradient {gq} {gh}");
        }
    }

    #[test]
    fn rates_are_bounded(rho in 0.01f64..1000.0, alpha in 0.1f64..300.0, bt in 0.05f64..8.0) {
        let r = rule();
        let o = solve_qh(rho, bt, &r, 1e-10).unwrap();
        for tx in [TxType::Linear, TxType::OneBit] {
            let p = SystemParams::new(alpha, 8.0, rho, tx).unwrap();
            let v = reff(&p, &o, &r, 1e-10).unwrap();
            let cap = if tx == TxType::OneBit { 2.0 } else { 2.0 * alpha };
            prop_assert!(v >= 0.0 && v <= cap, "{tx}: {v}");
        }
    }

    #[test]
    fn onebit_rate_grows_with_channel_overlap(rho in 0.1f64..50.0, alpha in 0.5f64..64.0) {
        let r = rule();
        let p = SystemParams::new(alpha, 8.0, rho, TxType::OneBit).unwrap();
        let mut last = 0.0;
        for k in 0..=10 {
            let o = ChannelOverlap::from_qh(rho, 1.0, f64::from(k) / 10.0);
            let v = reff(&p, &o, &r, 1e-10).unwrap();
            prop_assert!(v >= last - 1e-9, "q_h {}: {v} < {last}", o.q_h);
            last = v;
        }
    }

    #[test]
    fn perfect_knowledge_reduces_to_csir(rho in 0.01f64..100.0, alpha in 0.1f64..16.0) {
        let r = rule();
        let p = SystemParams::new(alpha, 8.0, rho, TxType::Linear).unwrap();
        let a = reff(&p, &ChannelOverlap::perfect(rho), &r, 1e-12).unwrap();
        let b = csir_rate(alpha, rho, &r, 1e-12).unwrap();
        prop_assert!((a - b).abs() <= 1e-8 * b.abs().max(1e-300));
    }

    #[test]
    fn overlap_map_is_a_probability_like_curve(q_hat in 0.0f64..1e3) {
        let v = onebit_overlap_map(q_hat).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v));
    }
}
