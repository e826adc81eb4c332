//! Enumeration budgets.
//!
//! Every exhaustive routine refuses inputs larger than its budget instead of
//! running for hours. Defaults can be overridden with the `SIDEINFO_BUDGET`
//! environment variable, a comma separated list of `key=value` pairs:
//!
//! ```text
//! SIDEINFO_BUDGET=cells=8388608,subset_cells=22
//! ```
//!
//! Recognised keys are the field names of [`Budget`].

use std::env;

pub const BUDGET_ENV: &str = "SIDEINFO_BUDGET";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    /// Maximum `|X^n|·|Y^n|` for product extensions and enumerated mixtures.
    pub cells: usize,
    /// Maximum `|X×Y|` for exhaustive subset searches (`2^cells` subsets).
    pub subset_cells: usize,
    /// Maximum `|X×Y|` for the optimal-code oracle.
    pub oracle_cells: usize,
    /// Maximum `|X|` for a single per-`y` Huffman instance in the oracle.
    pub oracle_x: usize,
    /// Maximum number of joint type classes visited by the type-class engine.
    pub type_classes: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            cells: 1 << 22,
            subset_cells: 24,
            oracle_cells: 20,
            oracle_x: 12,
            type_classes: 1 << 24,
        }
    }
}

impl Budget {
    /// Defaults, overridden by `SIDEINFO_BUDGET` when set. Unknown keys and
    /// unparsable values are ignored.
    pub fn from_env() -> Self {
        let mut budget = Budget::default();
        if let Ok(spec) = env::var(BUDGET_ENV) {
            budget.apply_overrides(&spec);
        }
        budget
    }

    pub fn apply_overrides(&mut self, spec: &str) {
        for pair in spec.split(',') {
            let Some((key, value)) = pair.split_once('=') else {
                continue;
            };
            let Ok(value) = value.trim().parse::<usize>() else {
                continue;
            };
            match key.trim() {
                "cells" => self.cells = value,
                "subset_cells" => self.subset_cells = value,
                "oracle_cells" => self.oracle_cells = value,
                "oracle_x" => self.oracle_x = value,
                "type_classes" => self.type_classes = value,
                _ => {}
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse() {
        let mut b = Budget::default();
        b.apply_overrides("cells=16, subset_cells=10,bogus=3,oracle_x=zz");
        assert_eq!(b.cells, 16);
        assert_eq!(b.subset_cells, 10);
        assert_eq!(b.oracle_x, Budget::default().oracle_x);
    }
}
