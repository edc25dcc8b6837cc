//! Transform properties shared by every fading model.

use proptest::prelude::*;

use hetnet_core::fading::{FadingModel, SeriesControl};
use hetnet_core::quadrature::{ghq_nodes, QuadratureRule};
use hetnet_core::Error;

fn ghq5() -> QuadratureRule {
    ghq_nodes(5).unwrap()
}

fn model() -> impl Strategy<Value = FadingModel> {
    prop_oneof![
        (0.2f64..5.0).prop_map(|omega| FadingModel::Rayleigh { omega }),
        (0.5f64..8.0).prop_map(FadingModel::nakagami),
        (0.5f64..10.0).prop_map(FadingModel::lognormal_unit_mean),
        (0.5f64..6.0, 0.5f64..10.0)
            .prop_map(|(m, s)| FadingModel::nakagami_lognormal_unit_mean(m, s)),
        (0.0f64..20.0, 0.5f64..10.0).prop_map(|(k, s)| FadingModel::rice_lognormal_unit_mean(k, s)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mgf_is_a_decreasing_probability(m in model(), s in 0.0f64..50.0, ds in 0.01f64..10.0) {
        let ghq = ghq5();
        let a = m.mgf(s, &ghq);
        let b = m.mgf(s + ds, &ghq);
        prop_assert!(a > 0.0 && a <= 1.0, "{m:?}: mgf({s}) = {a}");
        prop_assert!(b < a, "{m:?}: mgf({s}) = {a}, mgf({}) = {b}", s + ds);
    }

    #[test]
    fn t_i_is_nonnegative_and_vanishes_at_zero(m in model(), alpha in 2.1f64..6.0, y in 0.0f64..20.0) {
        let ghq = ghq5();
        let ctl = SeriesControl { max_terms: 2000, ..SeriesControl::default() };
        prop_assert_eq!(m.t_i(alpha, 0.0, &ghq, &ctl).unwrap(), 0.0);
        let t = m.t_i(alpha, y, &ghq, &ctl).unwrap();
        prop_assert!(t >= 0.0 && t.is_finite(), "{m:?}: t_i({alpha}, {y}) = {t}");
    }

    #[test]
    fn unit_mean_models_have_unit_first_moment(m in model()) {
        // Five Hermite nodes leave a bias of several 1e-4 at σ = 6 dB.
        let ghq = ghq_nodes(20).unwrap();
        let unit = match m {
            FadingModel::Rayleigh { .. } => FadingModel::rayleigh(),
            other => other,
        };
        let v = unit.moment_mgf(0, 0.0, &ghq);
        prop_assert!((v - 1.0).abs() <= 1e-6, "{unit:?}: E{{g}} = {v}");
    }

    #[test]
    fn rayleigh_is_nakagami_one(s in 0.0f64..30.0, k in 0u32..6, alpha in 2.1f64..6.0, y in 0.0f64..15.0) {
        let ghq = ghq5();
        let ctl = SeriesControl::default();
        let r = FadingModel::rayleigh();
        let n = FadingModel::nakagami(1.0);
        prop_assert_eq!(r.mgf(s, &ghq), n.mgf(s, &ghq));
        prop_assert_eq!(r.moment_mgf(k, s, &ghq), n.moment_mgf(k, s, &ghq));
        prop_assert_eq!(r.t_i(alpha, y, &ghq, &ctl).unwrap(), n.t_i(alpha, y, &ghq, &ctl).unwrap());
    }
}

fn families() -> Vec<FadingModel> {
    vec![
        FadingModel::nakagami(1.0),
        FadingModel::nakagami(2.5),
        FadingModel::nakagami(0.7),
        FadingModel::nakagami_lognormal_unit_mean(2.5, 6.0),
        FadingModel::nakagami_lognormal_unit_mean(1.3, 3.0),
    ]
}

fn y_grid() -> impl Iterator<Item = f64> {
    (0..=12).map(|i| 10f64.powf(-2.0 + 3.0 * i as f64 / 12.0))
}

#[test]
fn generic_series_matches_closed_forms() {
    let ghq = ghq5();
    let ctl = SeriesControl {
        max_terms: 5000,
        rel_stop: 1e-14,
    };
    for m in families() {
        for &alpha in &[3.0, 4.0, 5.0] {
            for y in y_grid() {
                let closed = m.t_i(alpha, y, &ghq, &ctl).unwrap();
                let generic = m.t_i_generic(alpha, y, &ghq, &ctl).unwrap();
                assert!(
                    ((generic - closed) / closed).abs() <= 1e-6,
                    "{m:?} alpha {alpha} y {y}: generic {generic}, closed {closed}"
                );
            }
        }
    }
}

#[test]
fn two_hundred_terms_either_match_or_report() {
    let ghq = ghq5();
    let ctl = SeriesControl {
        max_terms: 200,
        rel_stop: 1e-12,
    };
    for m in families() {
        for y in y_grid() {
            let closed = m.t_i(4.0, y, &ghq, &ctl).unwrap();
            match m.t_i_generic(4.0, y, &ghq, &ctl) {
                Ok(g) => assert!(
                    ((g - closed) / closed).abs() <= 1e-6,
                    "{m:?} y {y}: {g} vs {closed}"
                ),
                Err(Error::NonConvergence { .. }) => {}
                Err(e) => panic!("{m:?} y {y}: unexpected error {e}"),
            }
        }
    }
}
