//! Lower-bound certificate for an arbitrary prefix code: the per-symbol
//! error budget it implicitly spends and the length it must pay.

use sideinfo::codes::{certify, lemma5_check, map_decoder_error};
use sideinfo::dist::JointPmf;
use sideinfo::entropy::ohe;

fn main() {
    let pmf = JointPmf::new(
        vec!["a".into(), "b".into(), "c".into(), "d".into()],
        vec!["u".into(), "v".into()],
        vec![vec![0.35, 0.05], vec![0.05, 0.25], vec![0.10, 0.05], vec![0.05, 0.10]],
    )
    .unwrap();
    // codewords 0, 10, 11 with c and d sharing the last one
    let lengths = [1.0, 2.0, 2.0, 2.0];
    let assignment = [0, 1, 2, 2];
    let error = map_decoder_error(&pmf, &assignment);

    for delta in [0.5, 1.0, 2.0] {
        let cert = certify(&pmf, &lengths, delta, error).unwrap();
        cert.check().unwrap();
        lemma5_check(&pmf, &lengths, delta, error).unwrap();
        println!("δ = {delta}: error {error:.4}, Σ P_X ε_x = {:.4} ≤ {:.4}", cert.tail, error + 2f64.powf(-delta));
        for x in 0..pmf.nx() {
            let eps_x = cert.profile.get(x) + 0.0;
            let h = ohe(&pmf, x, eps_x).unwrap().value;
            println!("  x = {}: ε_x = {eps_x:.4}, ℓ = {} ≥ h̄ - δ = {:.4}", pmf.x_labels()[x], lengths[x], h - delta);
        }
    }
}
