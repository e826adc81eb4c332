//! Reading, inspecting and extending joint distributions.

use sideinfo::budget::Budget;
use sideinfo::dist::io::{from_json, from_tsv, to_tsv};
use sideinfo::dist::{mix, MixtureSpec};

fn main() {
    let pmf = from_json(
        r#"{"x_alphabet":["sun","rain"],"y_alphabet":["dry","wet"],"pmf":[[0.6,0.1],[0.05,0.25]]}"#,
    )
    .unwrap();
    print!("{}", to_tsv(&pmf));
    assert_eq!(from_tsv(&to_tsv(&pmf)).unwrap(), pmf);

    println!("P(rain | wet) = {:.4}", pmf.conditional_x_given_y("rain", "wet").unwrap());
    println!("H(X) = {:.4}, H(X|Y) = {:.4}", pmf.x_entropy(), pmf.conditional_entropy());

    let budget = Budget::default();
    let pair = pmf.product_extension(2, &budget).unwrap();
    println!("blocklength 2: {} x {} cells, H = {:.4}", pair.nx(), pair.ny(), pair.conditional_entropy());

    let other = from_json(r#"{"x_alphabet":["sun","rain"],"y_alphabet":["dry","wet"],"pmf":[[0.2,0.3],[0.3,0.2]]}"#)
        .unwrap();
    let spec = MixtureSpec::new(vec![(0.7, pmf), (0.3, other)]).unwrap();
    println!("single-letter mixture H(X|Y) = {:.4}", mix(&spec).unwrap().conditional_entropy());
    println!("blocklength-2 mixture H = {:.4}", spec.extension(2, &budget).unwrap().conditional_entropy());
}
