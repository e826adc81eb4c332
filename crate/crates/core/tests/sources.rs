mod common;

use common::{arb_pmf, h2, TOL};
use proptest::prelude::*;
use sideinfo::budget::Budget;
use sideinfo::dist::{JointPmf, MixtureSpec};
use sideinfo::entropy::{hhe, ohs_eps, Spectrum};
use sideinfo::sources::{
    block_conditional_entropy, block_hhe, block_ohs, block_spectrum, boundedness_check, entropy_bracket,
    mixture_prediction, ohs_monte_carlo, rcom_bound_check, rcom_sweep, MixtureRegime,
};

fn bsc(px1: f64, flip: f64) -> JointPmf {
    JointPmf::from_marginal_channel(&[1.0 - px1, px1], &[vec![1.0 - flip, flip], vec![flip, 1.0 - flip]]).unwrap()
}

fn arb_mixture() -> impl Strategy<Value = MixtureSpec> {
    (arb_pmf(2, 2), 0.05f64..0.95).prop_flat_map(|(a, w)| {
        let (nx, ny) = (a.nx(), a.ny());
        prop::collection::vec(0.05f64..1.0, nx * ny).prop_map(move |cells| {
            let b = common::pmf_from_weights(nx, ny, &cells);
            MixtureSpec::new(vec![(w, a.clone()), (1.0 - w, b)]).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// The type-class engine agrees with the explicit blocklength-n pmf.
    #[test]
    fn types_match_explicit_extension(spec in arb_mixture(), n in 1usize..=4, eps in 0.0f64..1.0) {
        let b = Budget::default();
        let ext = spec.extension(n, &b).unwrap();
        prop_assert!((block_conditional_entropy(&spec, n, &b).unwrap() - ext.conditional_entropy()).abs() < 1e-8);
        prop_assert!((block_ohs(&spec, n, eps, &b).unwrap() - ohs_eps(&ext, eps)).abs() < 1e-8);
        let direct = hhe(&ext, eps).0;
        let typed = block_hhe(&spec, n, eps, &b).unwrap();
        prop_assert!((typed - direct).abs() < 1e-8, "{typed} vs {direct}");
        let s = block_spectrum(&spec, n, &b).unwrap();
        let e = Spectrum::of(&ext);
        prop_assert!((s.mean() - e.mean()).abs() < 1e-8);
    }

    #[test]
    fn iid_entropy_is_additive(pmf in arb_pmf(3, 3), n in 1usize..=6) {
        let spec = MixtureSpec::single(pmf.clone());
        let h = block_conditional_entropy(&spec, n, &Budget::default()).unwrap();
        prop_assert!((h - n as f64 * pmf.conditional_entropy()).abs() < 1e-8);
    }

    #[test]
    fn lossless_rate_is_conditional_entropy(pmf in arb_pmf(2, 3), n in 1usize..=5) {
        let spec = MixtureSpec::single(pmf.clone());
        let v = block_hhe(&spec, n, 0.0, &Budget::default()).unwrap() / n as f64;
        prop_assert!((v - pmf.conditional_entropy()).abs() < 1e-8);
    }

    #[test]
    fn rcom_bracket_holds(pmf in arb_pmf(2, 2), n in 1usize..=8, eps in 0.0f64..0.5) {
        rcom_bound_check(&MixtureSpec::single(pmf), eps, n, &Budget::default()).unwrap();
    }

    #[test]
    fn entropy_bracket_holds(spec in arb_mixture(), n in 1usize..=6, eps in 0.01f64..0.5, gamma in 0.0f64..1.0) {
        prop_assert!(entropy_bracket(&spec, n, eps, gamma, &Budget::default()).unwrap().holds());
    }
}

#[test]
fn rcom_sweep_reference() {
    let rows = rcom_sweep(&JointPmf::dsbs(0.25).unwrap(), 0.1, 10, &Budget::default()).unwrap();
    assert!((rows[9].value - 0.9 * h2(0.25)).abs() <= 0.08);
    let rows = rcom_sweep(&JointPmf::dsbs(0.25).unwrap(), 0.0, 6, &Budget::default()).unwrap();
    for r in rows {
        assert!(r.gap.abs() < TOL);
    }
}

#[test]
fn near_one_eps_is_near_zero() {
    let spec = MixtureSpec::single(JointPmf::dsbs(0.25).unwrap());
    let b = Budget::default();
    let r = rcom_bound_check(&spec, 0.99, 10, &b).unwrap();
    assert!(r.value < 0.05);
    assert!((1.0 - r.epsilon) * r.q_lo < 0.05);
    // the upper quantile stays at the smallest spectrum atoms
    assert!(r.q_hi > 0.4);
}

#[test]
fn mc_estimate_tracks_exact_value() {
    let b = Budget::default();
    let spec = MixtureSpec::new(vec![(0.5, bsc(0.2, 0.1)), (0.5, bsc(0.8, 0.4))]).unwrap();
    for n in [4, 8] {
        let exact = block_ohs(&spec, n, 0.1, &b).unwrap();
        let (mean, se) = ohs_monte_carlo(&spec, n, 0.1, 20_000, 99, &b).unwrap();
        assert!((mean - exact).abs() <= 4.0 * se, "n={n}: {mean} ± {se} vs {exact}");
    }
}

#[test]
fn regimes() {
    let distinct = MixtureSpec::new(vec![(0.5, bsc(0.2, 0.1)), (0.5, bsc(0.8, 0.4))]).unwrap();
    let (regime, pred) = mixture_prediction(&distinct).unwrap();
    assert_eq!(regime, MixtureRegime::Average);
    let expected = 0.5 * bsc(0.2, 0.1).conditional_entropy() + 0.5 * bsc(0.8, 0.4).conditional_entropy();
    assert!((pred - expected).abs() < 1e-12);
    let shared = MixtureSpec::new(vec![(0.5, bsc(0.5, 0.1)), (0.5, bsc(0.5, 0.4))]).unwrap();
    let (regime, pred) = mixture_prediction(&shared).unwrap();
    assert_eq!(regime, MixtureRegime::Max);
    assert!((pred - 0.970951).abs() < 1e-6);
}

#[test]
fn mixture_entropy_rate_is_bounded() {
    let spec = MixtureSpec::new(vec![(0.3, JointPmf::dsbs(0.1).unwrap()), (0.7, JointPmf::dsbs(0.4).unwrap())]).unwrap();
    let rep = boundedness_check(&spec, 8, &Budget::default()).unwrap();
    assert!(rep.holds(), "{rep:?}");
}
