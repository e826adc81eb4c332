//! Random-binning Slepian-Wolf coding of a sampled stream, decoded with
//! side-information the encoder never sees.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sideinfo::codes::{
    build_sw_code, decode_stream, encode_stream, seed_averaged_error, sw_exact_error, DecodeOutcome, EpsilonProfile,
};
use sideinfo::dist::JointPmf;
use sideinfo::DEFAULT_SEED;

fn main() {
    let pmf = JointPmf::dsbs(0.1).unwrap();
    let profile = EpsilonProfile::uniform(&pmf, 0.05).unwrap();
    let code = build_sw_code(&pmf, &profile, 4.0, DEFAULT_SEED).unwrap();
    for x in 0..pmf.nx() {
        println!(
            "x = {}: h̄ = {:.3}, codeword {} ({} bits, bound {:.2})",
            pmf.x_labels()[x],
            code.ohe(x),
            code.codeword(x),
            code.codeword_len(x),
            code.length_bound(x)
        );
    }

    let cells = WeightedIndex::new(pmf.probs()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (xs, ys): (Vec<usize>, Vec<usize>) =
        (0..5000).map(|_| cells.sample(&mut rng)).map(|c| (c / pmf.ny(), c % pmf.ny())).unzip();
    let bits = encode_stream(&code, &xs);
    let decoded = decode_stream(&code, &pmf, &bits, &ys).unwrap();
    let wrong = decoded.iter().zip(&xs).filter(|((o, _), &x)| *o != DecodeOutcome::Decoded(x)).count();

    println!("{} symbols -> {} bits ({:.3} bits/symbol)", xs.len(), bits.len(), bits.len() as f64 / xs.len() as f64);
    println!("empirical error {:.4}", wrong as f64 / xs.len() as f64);
    println!("exact error     {:.4}", sw_exact_error(&pmf, &code));
    let avg = seed_averaged_error(&code, &pmf, 200, 0);
    let bound = profile.aggregate() + 2f64.powf(-code.delta() / 2.0);
    println!("seed average    {:.4} ± {:.4} (bound {bound:.4})", avg.mean, avg.stderr);
}
