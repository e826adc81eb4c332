//! Does giving the encoder the side-information help? `d_n` close to zero
//! says no, a persistently negative `d_n` says yes.

use sideinfo::budget::Budget;
use sideinfo::dist::{JointPmf, MixtureSpec};
use sideinfo::sources::{encoder_sideinfo_diagnostic, DEFAULT_GAMMA};

fn main() {
    let bsc = |flip: f64| {
        JointPmf::from_marginal_channel(&[0.5, 0.5], &[vec![1.0 - flip, flip], vec![flip, 1.0 - flip]]).unwrap()
    };
    let sources = [
        ("i.i.d. DSBS(0.25)", MixtureSpec::single(JointPmf::dsbs(0.25).unwrap())),
        ("BSC(0.1)/BSC(0.4) mixture", MixtureSpec::new(vec![(0.5, bsc(0.1)), (0.5, bsc(0.4))]).unwrap()),
    ];
    for (name, spec) in sources {
        let report = encoder_sideinfo_diagnostic(&spec, None, 12, DEFAULT_GAMMA, &Budget::default()).unwrap();
        println!("{name}");
        for row in &report.rows {
            println!(
                "  n = {:>2}  ε_n = {:.3}  d_n = {:+.4}  bracket {}",
                row.n,
                row.eps_n,
                row.d_n,
                if row.bracket.holds() { "ok" } else { "violated" }
            );
        }
    }
}
