//! Flag + Shannon codes against the exhaustive optimum when both encoder
//! and decoder see the side-information.

use sideinfo::budget::Budget;
use sideinfo::codes::{build_flag_code, evaluate_common_code};
use sideinfo::dist::JointPmf;
use sideinfo::entropy::hhe;
use sideinfo::oracle::{optimal_common_code, theorem1_report};

fn main() {
    let pmf = JointPmf::new(
        vec!["a".into(), "b".into(), "c".into()],
        vec!["u".into(), "v".into()],
        vec![vec![0.30, 0.05], vec![0.10, 0.25], vec![0.05, 0.25]],
    )
    .unwrap();
    let budget = Budget::default();

    println!("{:>5} {:>9} {:>9} {:>9} {:>9} {:>9}", "ε", "H^ε", "OPT", "flag", "sorted", "error");
    for eps in [0.0, 0.05, 0.1, 0.2, 0.4] {
        let r = theorem1_report(&pmf, eps, &budget).unwrap();
        r.check().unwrap();
        // the cheaper flag code built on the sorted prefix instead of the minimiser
        let (_, ranking) = hhe(&pmf, eps);
        let sorted = evaluate_common_code(&pmf, &build_flag_code(&pmf, &ranking.prefix_set(&pmf)).unwrap());
        println!(
            "{eps:>5} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>9.4}",
            r.he, r.optimum, r.flag_eval.avg_len, sorted.avg_len, r.flag_eval.error
        );
    }

    let best = optimal_common_code(&pmf, 0.1, &budget).unwrap();
    let code = best.realize(&pmf).unwrap();
    for y in 0..pmf.ny() {
        let words: Vec<String> = code.codebook(y).iter().map(|w| w.to_string()).collect();
        println!("y = {}: codebook {:?}", pmf.y_labels()[y], words);
    }
}
