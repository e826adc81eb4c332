//! Mixed sources: whether the rate averages or maximises the component
//! conditional entropies depends on whether the X-marginals can be told
//! apart.

use sideinfo::budget::Budget;
use sideinfo::dist::{JointPmf, MixtureSpec};
use sideinfo::sources::{mixture_prediction, mixture_sweep, spectrum_quantiles, McConfig};

fn component(px1: f64, flip: f64) -> JointPmf {
    JointPmf::from_marginal_channel(&[1.0 - px1, px1], &[vec![1.0 - flip, flip], vec![flip, 1.0 - flip]]).unwrap()
}

fn main() {
    let budget = Budget::default();
    let mixtures = [
        ("distinct marginals", MixtureSpec::new(vec![(0.5, component(0.2, 0.1)), (0.5, component(0.8, 0.4))])),
        ("shared marginal", MixtureSpec::new(vec![(0.5, component(0.5, 0.1)), (0.5, component(0.5, 0.4))])),
    ];
    for (name, spec) in mixtures {
        let spec = spec.unwrap();
        let (regime, limit) = mixture_prediction(&spec).unwrap();
        println!("{name}: {regime:?} regime, limit {limit:.4}");
        for row in mixture_sweep(&spec, 0.1, 12, &budget, &McConfig::default()).unwrap().iter().step_by(3) {
            println!("  n = {:>2}: H̄_S/n = {:.4}", row.n, row.value);
        }
        let s = spectrum_quantiles(&spec, 200, 0.05, 20_000, 7).unwrap();
        println!("  n = 200 spectrum: 5% {:.4}, 95% {:.4}", s.quantile_lo, s.quantile_hi);
    }
}
