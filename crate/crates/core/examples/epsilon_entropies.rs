//! Every one-shot ε-quantity of a doubly symmetric binary source.
//!
//! ```text
//! cargo run --example epsilon_entropies -- 0.25 0.2
//! ```

use sideinfo::budget::Budget;
use sideinfo::dist::JointPmf;
use sideinfo::entropy::{he_bruteforce, hhe, ohe, ohs_eps, the_bruteforce, the_fractional};

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<f64>().expect("numeric argument"));
    let flip = args.next().unwrap_or(0.25);
    let eps = args.next().unwrap_or(0.2);
    let pmf = JointPmf::dsbs(flip).unwrap();
    let budget = Budget::default();

    let (he, set) = he_bruteforce(&pmf, eps, &budget).unwrap();
    let (the, _) = the_bruteforce(&pmf, eps, &budget).unwrap();
    let (hhe_value, ranking) = hhe(&pmf, eps);

    println!("DSBS({flip}), ε = {eps}");
    println!("H(X|Y)         = {:.6}", pmf.conditional_entropy());
    println!("H^ε            = {he:.6}  on {}", set.describe(&pmf));
    println!("H̃^ε            = {the:.6}");
    println!("H̃^ε (LP)       = {:.6}", the_fractional(&pmf, eps));
    println!("Ĥ^ε            = {hhe_value:.6}  (i* = {})", ranking.i_star);
    for x in 0..pmf.nx() {
        println!("h̄^ε(x={})      = {:.6}", pmf.x_labels()[x], ohe(&pmf, x, eps).unwrap().value);
    }
    println!("H̄_S^ε          = {:.6}", ohs_eps(&pmf, eps));
}
