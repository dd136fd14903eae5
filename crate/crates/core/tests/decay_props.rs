use proptest::prelude::*;
use sawcount::decay::{
    choose_exponents_hc, choose_exponents_md, decay_factor_hc, decay_factor_md, delta_c,
    gap_bound, lambda_c, message_bounds, nu_hc, nu_md, ptilde, symmetrize_check, xtilde,
};
use sawcount::recurrence::regular::RegularTree;
use sawcount::ModelParams;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lambda_c_and_delta_c_invert(lambda in 0.01..50.0f64) {
        let dc = delta_c(lambda).unwrap();
        prop_assert!((lambda_c(dc).unwrap() / lambda - 1.0).abs() < 1e-10);
    }

    #[test]
    fn hard_core_nu_peaks_at_delta_c(lambda in 0.05..20.0f64, d in 1.01..60.0f64) {
        let ex = choose_exponents_hc(lambda).unwrap();
        prop_assert!(ex.q > 1.0 && ex.q <= 2.0);
        prop_assert!((1.0 / ex.q + 1.0 / ex.a - 1.0).abs() < 1e-12);
        prop_assert!(nu_hc(ex.q, d, lambda).unwrap() <= 1.0 / ex.delta_c + 1e-9);
        let x = xtilde(d, lambda).unwrap();
        prop_assert!((d * x - 1.0 - lambda * (1.0 + x).powf(-d)).abs() < 1e-10);
    }

    #[test]
    fn monomer_dimer_nu_peaks_at_big_d(gamma in 0.05..5.0f64, delta in 1.0..40.0f64, d in 0.01..400.0f64) {
        let r = decay_factor_md(gamma, delta).unwrap();
        let q = choose_exponents_md(gamma, delta).unwrap().q;
        prop_assert!(nu_md(q, d, gamma).unwrap() <= r.alpha * (1.0 + 1e-9));
        prop_assert!(r.alpha * r.big_d.unwrap() < 1.0);
        let p = ptilde(d, gamma).unwrap();
        prop_assert!((1.0 - p - gamma * d * p * p).abs() < 1e-12);
    }

    #[test]
    fn supercritical_flag_tracks_threshold(lambda in 0.05..20.0f64, delta in 1.05..30.0f64) {
        let r = decay_factor_hc(lambda, delta).unwrap();
        prop_assert_eq!(r.supercritical, lambda >= lambda_c(delta).unwrap());
        prop_assert!((r.alpha * r.delta_c.unwrap() - 1.0).abs() < 1e-9);
    }

    /// The root gap on a `d`-ary tree never exceeds the cutset bound.
    #[test]
    fn gap_bound_holds_on_regular_trees(d in 1usize..5, act in 0.1..3.0f64, hard_core: bool) {
        let (params, alpha, q) = if hard_core {
            let r = decay_factor_hc(act, d as f64 + 0.5).unwrap();
            (ModelParams::HardCore { lambda: act }, r.alpha, r.q)
        } else {
            let r = decay_factor_md(act, d as f64).unwrap();
            (ModelParams::MonomerDimer { gamma: act }, r.alpha, r.q)
        };
        prop_assume!(alpha < 1.0);
        let (m, l) = message_bounds(&params, d + 1);
        let tree = RegularTree::new(d, None).unwrap();
        let gaps = tree.gaps(&params, 8);
        for k in 1..8usize {
            // cutset at depth k; the initial conditions differ one level below
            let depths = vec![k; d.pow(k as u32)];
            let bound = gap_bound(q, alpha, m, l, &depths).unwrap();
            prop_assert!(gaps[k + 1] <= bound * (1.0 + 1e-12),
                "depth {}: gap {} bound {}", k, gaps[k + 1], bound);
        }
    }
}

#[test]
fn gap_bound_arithmetic() {
    assert_eq!(gap_bound(2.0, 0.5, 1.0, 1.0, &[]).unwrap(), 0.0);
    let b = gap_bound(3.0, 1.0 / 16.0, 1.0, 1.0, &[3; 8]).unwrap();
    assert!((b - 0.125).abs() < 1e-15);
    let b = gap_bound(1.5, 0.3, 1.0, 1.0, &[7]).unwrap();
    assert!((b - 0.3f64.powf(7.0 / 1.5)).abs() < 1e-15);
    assert!(gap_bound(1.0, 0.5, 1.0, 1.0, &[1]).is_err());
    assert!(gap_bound(2.0, 1.0, 1.0, 1.0, &[1]).is_err());
}

#[test]
fn symmetrize_check_is_seeded() {
    let p = ModelParams::HardCore { lambda: 2.0 };
    let a = choose_exponents_hc(2.0).unwrap().a;
    let x = symmetrize_check(&p, 5, 0.5, a, 2000, 7).unwrap();
    let y = symmetrize_check(&p, 5, 0.5, a, 2000, 7).unwrap();
    assert_eq!(x, y);
    assert!(x.pass);
    assert!(symmetrize_check(&p, 5, 3.0, a, 10, 7).is_err());
    let md = ModelParams::MonomerDimer { gamma: 1.0 };
    assert!(symmetrize_check(&md, 3, 0.1, 1.5, 10, 7).is_err());
}
