//! Finite-blocklength rates of an i.i.d. source, computed exactly over
//! joint type classes.

use sideinfo::budget::Budget;
use sideinfo::dist::{JointPmf, MixtureSpec};
use sideinfo::sources::{ohs_sweep, rcom_report, rcom_sweep, McConfig};

fn main() {
    let base = JointPmf::dsbs(0.25).unwrap();
    let budget = Budget::default();
    let eps = 0.1;
    let rcom = rcom_sweep(&base, eps, 30, &budget).unwrap();
    let ohs = ohs_sweep(&base, eps, 30, &budget, &McConfig::default()).unwrap();

    println!("(1-ε)H = {:.4}, H = {:.4}", rcom[0].prediction, ohs[0].prediction);
    println!("{:>3} {:>10} {:>10}", "n", "Ĥ/n", "H̄_S/n");
    for (r, o) in rcom.iter().zip(&ohs).filter(|(r, _)| r.n == 1 || r.n % 5 == 0) {
        println!("{:>3} {:>10.5} {:>10.5}", r.n, r.value, o.value);
    }

    let spec = MixtureSpec::single(base);
    for n in [10, 30] {
        let r = rcom_report(&spec, eps, n, &budget).unwrap();
        println!("n = {n}: {:.4} ≤ Ĥ/n = {:.4} ≤ {:.4}", r.lower(), r.value, r.q_hi + r.slack);
    }
}
