//! Exhaustive optimal ε-codes with common side-information, and the
//! verifiers that compare them against the one-shot quantities.
//!
//! # Why per-`y` Huffman codes over `A(y)` plus one error leaf are optimal
//!
//! Fix any ε-code and let `A` be the set of cells it decodes correctly, so
//! `P_XY(A) ≥ 1 - ε`. Under a fixed `y` the members of `A(y)` need pairwise
//! distinct codewords, while every `x ∉ A(y)` may be sent with any codeword.
//! Re-sending every such `x` with the shortest codeword of `C(y)` keeps the
//! code an ε-code with correct set at least `A` and does not increase the
//! average length. After this move `C(y)` consists of one codeword per
//! member of `A(y)`, possibly one extra codeword carrying only error mass,
//! and the whole error mass `e(y) = Σ_{x ∉ A(y)} P_XY(x,y)` rides on a
//! single codeword. That is a prefix code over the weights of `A(y)` with
//! `e(y)` either added to one member `x*` or placed on its own leaf, so its
//! cost is at least
//!
//! ```text
//! min( Huffman(A(y) ∪ {e(y)}), min_{x* ∈ A(y)} Huffman(A(y) with e(y) on x*) ).
//! ```
//!
//! Conversely, each of those Huffman codes is realised by an ε-code whose
//! correct set contains `A(y)` (the error leaf decodes to the most likely
//! non-member). Minimising the per-`y` sum over all `A` with enough mass is
//! therefore exactly the optimal average length. Note that merging `e(y)`
//! into a member matters: for `|Y| = 1`, `P_X = (0.9, 0.1)` and `ε = 0.1`
//! the optimum is `0`, reached by a single empty codeword shared by both
//! symbols, while a separate error leaf would cost `1` bit.
//!
//! A codebook with a single codeword uses the empty string. The
//! [`CodewordConvention::NonEmpty`] option forbids that and charges one bit
//! instead.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::budget::Budget;
use crate::codes::{
    build_flag_code, canonical_codewords, evaluate_common_code, Bitstring, CodeError, CodeEvaluation,
    CommonSICode,
};
use crate::dist::JointPmf;
use crate::entropy::{
    check_eps, he_bruteforce, hhe, mask_cells, the_bruteforce, the_fractional, EntropyError,
    RestrictedSet, SectionTables,
};
use crate::TOL;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("oracle input with {cells} cells (|X| = {nx}) exceeds the budget ({budget_cells} cells, |X| ≤ {budget_x})")]
    BudgetExceeded {
        cells: usize,
        nx: usize,
        budget_cells: usize,
        budget_x: usize,
    },
    #[error("bound violated: {0}")]
    BoundViolated(String),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// Whether a singleton codebook may use the empty codeword.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CodewordConvention {
    #[default]
    AllowEmpty,
    NonEmpty,
}

/// Huffman code lengths. Ties are broken by weight, then by the smallest
/// original symbol index in each subtree.
pub fn huffman_lengths(weights: &[f64], convention: CodewordConvention) -> Vec<u32> {
    let n = weights.len();
    if n <= 1 {
        let single = u32::from(convention == CodewordConvention::NonEmpty);
        return vec![single; n];
    }
    // (weight, smallest leaf index, leaves)
    let mut nodes: Vec<(f64, usize, Vec<usize>)> =
        weights.iter().enumerate().map(|(i, &w)| (w, i, vec![i])).collect();
    let mut lengths = vec![0u32; n];
    while nodes.len() > 1 {
        nodes.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let (wa, ia, la) = nodes.remove(0);
        let (wb, ib, lb) = nodes.remove(0);
        for &leaf in la.iter().chain(&lb) {
            lengths[leaf] += 1;
        }
        let mut leaves = la;
        leaves.extend(lb);
        nodes.push((wa + wb, ia.min(ib), leaves));
    }
    lengths
}

fn weighted_len(weights: &[f64], lengths: &[u32]) -> f64 {
    weights.iter().zip(lengths).map(|(w, &l)| w * l as f64).sum()
}

/// Where the error mass of one column is sent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ErrorRoute {
    /// No error mass under this `y`.
    None,
    /// A dedicated leaf, decoding to the most likely non-member.
    Leaf,
    /// Shared with the codeword of this member of `A(y)`.
    Shared(usize),
}

/// The optimal code for one column given `A(y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnCode {
    pub members: Vec<usize>,
    /// Codeword lengths for `members`, followed by the error leaf's length
    /// when the route is [`ErrorRoute::Leaf`].
    pub lengths: Vec<u32>,
    pub route: ErrorRoute,
    pub cost: f64,
}

fn column_code(pmf: &JointPmf, y: usize, s: u64, convention: CodewordConvention) -> ColumnCode {
    let members: Vec<usize> = (0..pmf.nx()).filter(|&x| s >> x & 1 == 1).collect();
    let weights: Vec<f64> = members.iter().map(|&x| pmf.p(x, y)).collect();
    let error: f64 = (0..pmf.nx()).filter(|&x| s >> x & 1 == 0).map(|x| pmf.p(x, y)).sum();
    if error <= 0.0 {
        let lengths = huffman_lengths(&weights, convention);
        let cost = weighted_len(&weights, &lengths);
        return ColumnCode {
            members,
            lengths,
            route: ErrorRoute::None,
            cost,
        };
    }
    let mut with_leaf = weights.clone();
    with_leaf.push(error);
    let lengths = huffman_lengths(&with_leaf, convention);
    let mut best = ColumnCode {
        cost: weighted_len(&with_leaf, &lengths),
        members: members.clone(),
        lengths,
        route: ErrorRoute::Leaf,
    };
    for k in 0..members.len() {
        let mut w = weights.clone();
        w[k] += error;
        let lengths = huffman_lengths(&w, convention);
        let cost = weighted_len(&w, &lengths);
        if cost < best.cost {
            best = ColumnCode {
                members: members.clone(),
                lengths,
                route: ErrorRoute::Shared(members[k]),
                cost,
            };
        }
    }
    best
}

/// Output of [`optimal_common_code`].
#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    /// Minimal average length over all ε-codes.
    pub optimum: f64,
    /// A correct set achieving it.
    pub witness_set: RestrictedSet,
    /// The optimal code for each column.
    pub per_y_codebooks: Vec<ColumnCode>,
    pub epsilon: f64,
}

impl OracleResult {
    /// Builds an explicit code achieving the optimum.
    pub fn realize(&self, pmf: &JointPmf) -> Result<CommonSICode, CodeError> {
        let (nx, ny) = (pmf.nx(), pmf.ny());
        let mut encode = vec![Bitstring::new(); nx * ny];
        let mut decode = Vec::with_capacity(ny);
        for (y, col) in self.per_y_codebooks.iter().enumerate() {
            let words = canonical_codewords(&col.lengths)?;
            let mut table = BTreeMap::new();
            for (&x, w) in col.members.iter().zip(&words) {
                encode[x * ny + y] = w.clone();
                table.insert(w.clone(), x);
            }
            let outsiders: Vec<usize> = (0..nx).filter(|x| !col.members.contains(x)).collect();
            let error_word = match col.route {
                ErrorRoute::None => None,
                ErrorRoute::Leaf => {
                    let w = words[col.members.len()].clone();
                    let target = outsiders
                        .iter()
                        .copied()
                        .fold(None, |b: Option<usize>, x| match b {
                            Some(b) if pmf.p(b, y) >= pmf.p(x, y) => Some(b),
                            _ => Some(x),
                        })
                        .expect("error mass implies an outsider");
                    table.insert(w.clone(), target);
                    Some(w)
                }
                ErrorRoute::Shared(x) => Some(encode[x * ny + y].clone()),
            };
            // zero-mass outsiders may exist even without error mass
            let fallback = error_word.or_else(|| words.first().cloned()).unwrap_or_default();
            if table.is_empty() {
                table.insert(fallback.clone(), outsiders.first().copied().unwrap_or(0));
            }
            for &x in &outsiders {
                encode[x * ny + y] = fallback.clone();
            }
            decode.push(table);
        }
        CommonSICode::from_tables(pmf, encode, decode)
    }
}

fn check_oracle_budget(pmf: &JointPmf, budget: &Budget) -> Result<(), OracleError> {
    if pmf.n_cells() > budget.oracle_cells || pmf.nx() > budget.oracle_x || pmf.n_cells() > 62 {
        return Err(OracleError::BudgetExceeded {
            cells: pmf.n_cells(),
            nx: pmf.nx(),
            budget_cells: budget.oracle_cells,
            budget_x: budget.oracle_x,
        });
    }
    Ok(())
}

/// The minimal average codeword length over all ε-codes with common
/// side-information, by exhaustive search over correct sets.
pub fn optimal_common_code(pmf: &JointPmf, eps: f64, budget: &Budget) -> Result<OracleResult, OracleError> {
    optimal_common_code_with(pmf, eps, budget, CodewordConvention::AllowEmpty)
}

pub fn optimal_common_code_with(
    pmf: &JointPmf,
    eps: f64,
    budget: &Budget,
    convention: CodewordConvention,
) -> Result<OracleResult, OracleError> {
    check_eps(eps)?;
    check_oracle_budget(pmf, budget)?;
    let tables = SectionTables::build(pmf, |y, s| column_code(pmf, y, s, convention).cost);
    let (optimum, mask) = tables.minimise(eps).expect("the full set is always feasible");
    let sel = (1u64 << pmf.nx()) - 1;
    let per_y_codebooks = (0..pmf.ny())
        .map(|y| column_code(pmf, y, mask >> (y * pmf.nx()) & sel, convention))
        .collect();
    Ok(OracleResult {
        optimum,
        witness_set: RestrictedSet::new(pmf, mask_cells(pmf, mask)),
        per_y_codebooks,
        epsilon: eps,
    })
}

/// The quantities of the common side-information sandwich at one ε.
#[derive(Clone, Debug, PartialEq)]
pub struct Theorem1Report {
    pub epsilon: f64,
    /// `H^ε(X|Y)`.
    pub he: f64,
    /// Oracle optimum.
    pub optimum: f64,
    /// Re-evaluated optimum of the realised oracle code.
    pub oracle_eval: CodeEvaluation,
    /// Flag code built from the `H^ε` minimiser.
    pub flag_eval: CodeEvaluation,
}

impl Theorem1Report {
    /// `H^ε ≤ OPT ≤ E[ℓ_flag] ≤ H^ε + 2`, both codes have error at most ε,
    /// and the realised oracle code re-evaluates to the optimum.
    pub fn check(&self) -> Result<(), OracleError> {
        let eps = self.epsilon;
        let fail = |what: &str| Err(OracleError::BoundViolated(format!("{what} at ε={eps}: {self:?}")));
        if self.he > self.optimum + TOL {
            return fail("H^ε > OPT");
        }
        if self.optimum > self.flag_eval.avg_len + TOL {
            return fail("OPT > flag-code length");
        }
        if self.flag_eval.avg_len > self.he + 2.0 + TOL {
            return fail("flag-code length > H^ε + 2");
        }
        if self.flag_eval.error > eps + TOL || self.oracle_eval.error > eps + TOL {
            return fail("code error exceeds ε");
        }
        if (self.oracle_eval.avg_len - self.optimum).abs() > TOL {
            return fail("realised oracle code does not re-evaluate to the optimum");
        }
        Ok(())
    }
}

/// Computes every quantity of the common side-information sandwich. At
/// `ε = 1` the flag code is replaced by the silent code.
pub fn theorem1_report(pmf: &JointPmf, eps: f64, budget: &Budget) -> Result<Theorem1Report, OracleError> {
    let (he, set) = he_bruteforce(pmf, eps, budget)?;
    let oracle = optimal_common_code(pmf, eps, budget)?;
    let oracle_eval = evaluate_common_code(pmf, &oracle.realize(pmf)?);
    let flag = if set.mass() > 0.0 {
        build_flag_code(pmf, &set)?
    } else {
        CommonSICode::silent(pmf)
    };
    Ok(Theorem1Report {
        epsilon: eps,
        he,
        optimum: oracle.optimum,
        oracle_eval,
        flag_eval: evaluate_common_code(pmf, &flag),
    })
}

pub fn verify_theorem1(pmf: &JointPmf, eps: f64, budget: &Budget) -> Result<Theorem1Report, OracleError> {
    let report = theorem1_report(pmf, eps, budget)?;
    report.check()?;
    Ok(report)
}

/// The four surrogates of `H^ε` at one ε.
#[derive(Clone, Debug, PartialEq)]
pub struct Theorem2Report {
    pub epsilon: f64,
    pub he: f64,
    pub hhe: f64,
    pub the: f64,
    pub the_fractional: f64,
    /// `i*` of the sorting construction.
    pub i_star: usize,
}

impl Theorem2Report {
    /// `Ĥ - 2 ≤ H ≤ Ĥ`.
    pub fn hhe_holds(&self) -> bool {
        self.hhe - 2.0 <= self.he + TOL && self.he <= self.hhe + TOL
    }

    /// `H̃ - 1 ≤ H ≤ H̃`.
    pub fn the_holds(&self) -> bool {
        self.the - 1.0 <= self.he + TOL && self.he <= self.the + TOL
    }

    /// `H̃_frac ≤ H̃ ≤ Ĥ` and `H̃_frac ≥ Ĥ - 1`.
    pub fn lp_chain_holds(&self) -> bool {
        self.the_fractional <= self.the + TOL
            && self.the <= self.hhe + TOL
            && self.the_fractional >= self.hhe - 1.0 - TOL
    }

    pub fn check(&self) -> Result<(), OracleError> {
        for (ok, what) in [
            (self.hhe_holds(), "Ĥ^ε - 2 ≤ H^ε ≤ Ĥ^ε"),
            (self.the_holds(), "H̃^ε - 1 ≤ H^ε ≤ H̃^ε"),
            (self.lp_chain_holds(), "H̃_frac ≤ H̃ ≤ Ĥ ≤ H̃_frac + 1"),
        ] {
            if !ok {
                return Err(OracleError::BoundViolated(format!("{what} fails: {self:?}")));
            }
        }
        Ok(())
    }
}

pub fn theorem2_report(pmf: &JointPmf, eps: f64, budget: &Budget) -> Result<Theorem2Report, OracleError> {
    let (he, _) = he_bruteforce(pmf, eps, budget)?;
    let (the, _) = the_bruteforce(pmf, eps, budget)?;
    let (hhe_value, ranking) = hhe(pmf, eps);
    Ok(Theorem2Report {
        epsilon: eps,
        he,
        hhe: hhe_value,
        the,
        the_fractional: the_fractional(pmf, eps),
        i_star: ranking.i_star,
    })
}

/// Checks `Ĥ^ε - 2 ≤ H^ε ≤ Ĥ^ε`.
pub fn verify_theorem2(pmf: &JointPmf, eps: f64, budget: &Budget) -> Result<Theorem2Report, OracleError> {
    let report = theorem2_report(pmf, eps, budget)?;
    if !report.hhe_holds() {
        return Err(OracleError::BoundViolated(format!("Ĥ^ε - 2 ≤ H^ε ≤ Ĥ^ε fails: {report:?}")));
    }
    Ok(report)
}

/// Checks `H̃^ε - 1 ≤ H^ε ≤ H̃^ε` together with the relaxation chain.
pub fn verify_the_sandwich(pmf: &JointPmf, eps: f64, budget: &Budget) -> Result<Theorem2Report, OracleError> {
    let report = theorem2_report(pmf, eps, budget)?;
    report.check()?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(rows: Vec<Vec<f64>>) -> JointPmf {
        let nx = rows.len();
        let ny = rows[0].len();
        JointPmf::new(
            (0..nx).map(|i| format!("x{i}")).collect(),
            (0..ny).map(|i| format!("y{i}")).collect(),
            rows,
        )
        .unwrap()
    }

    #[test]
    fn huffman_basics() {
        assert_eq!(huffman_lengths(&[0.5, 0.25, 0.25], Default::default()), vec![1, 2, 2]);
        assert_eq!(huffman_lengths(&[0.7], Default::default()), vec![0]);
        assert_eq!(huffman_lengths(&[0.7], CodewordConvention::NonEmpty), vec![1]);
        assert!(huffman_lengths(&[], Default::default()).is_empty());
        // equal weights: ties resolved by index, deterministic
        let l = huffman_lengths(&[0.25; 3], Default::default());
        assert_eq!(l, vec![2, 2, 1]);
    }

    #[test]
    fn deterministic_source() {
        let pmf = JointPmf::identity(2).unwrap();
        let r = optimal_common_code(&pmf, 0.0, &Budget::default()).unwrap();
        assert_eq!(r.optimum, 0.0);
        let r = optimal_common_code_with(&pmf, 0.0, &Budget::default(), CodewordConvention::NonEmpty).unwrap();
        assert_eq!(r.optimum, 1.0);
        for eps in [0.0, 0.3, 1.0] {
            let rep = verify_theorem1(&pmf, eps, &Budget::default()).unwrap();
            assert_eq!(rep.he, 0.0);
            assert_eq!(rep.optimum, 0.0);
            assert!(rep.flag_eval.avg_len <= 1.0);
        }
    }

    #[test]
    fn dsbs_zero_eps() {
        let pmf = JointPmf::dsbs(0.25).unwrap();
        let r = optimal_common_code(&pmf, 0.0, &Budget::default()).unwrap();
        assert!(r.optimum >= 0.811278 && r.optimum <= 2.811279);
        assert_eq!(r.optimum, 1.0);
        verify_theorem1(&pmf, 0.0, &Budget::default()).unwrap();
    }

    #[test]
    fn unit_eps_is_zero() {
        let pmf = dist(vec![vec![0.2, 0.1, 0.05], vec![0.05, 0.3, 0.3]]);
        let r = optimal_common_code(&pmf, 1.0, &Budget::default()).unwrap();
        assert_eq!(r.optimum, 0.0);
        let rep = verify_theorem1(&pmf, 1.0, &Budget::default()).unwrap();
        assert_eq!((rep.he, rep.optimum, rep.flag_eval.avg_len), (0.0, 0.0, 0.0));
    }

    #[test]
    fn shared_error_codeword_beats_error_leaf() {
        let pmf = dist(vec![vec![0.9], vec![0.1]]);
        let r = optimal_common_code(&pmf, 0.1, &Budget::default()).unwrap();
        assert_eq!(r.optimum, 0.0);
        assert_eq!(r.per_y_codebooks[0].route, ErrorRoute::Shared(0));
        let ev = evaluate_common_code(&pmf, &r.realize(&pmf).unwrap());
        assert_eq!(ev.avg_len, 0.0);
        assert!((ev.error - 0.1).abs() < 1e-12);
    }

    #[test]
    fn single_column_matches_huffman() {
        let px = [0.4, 0.3, 0.2, 0.1];
        let pmf = dist(px.iter().map(|&p| vec![p]).collect());
        let r = optimal_common_code(&pmf, 0.0, &Budget::default()).unwrap();
        let huff = weighted_len(&px, &huffman_lengths(&px, Default::default()));
        assert!((r.optimum - huff).abs() < 1e-12);
        let hx = pmf.x_entropy();
        assert!(hx <= r.optimum + 1e-12 && r.optimum <= hx + 1.0);
    }

    #[test]
    fn theorem2_dsbs() {
        let pmf = JointPmf::dsbs(0.25).unwrap();
        let r = verify_the_sandwich(&pmf, 0.2, &Budget::default()).unwrap();
        assert!((r.hhe - 0.561278).abs() < 1e-6);
        assert!(r.he <= r.hhe + 1e-12 && r.he >= r.hhe - 2.0);
        let r = verify_the_sandwich(&pmf, 0.0, &Budget::default()).unwrap();
        let h = pmf.conditional_entropy();
        for v in [r.he, r.hhe, r.the, r.the_fractional] {
            assert!((v - h).abs() < 1e-9);
        }
    }

    #[test]
    fn budget_enforced() {
        let pmf = JointPmf::identity(5).unwrap();
        assert!(matches!(
            optimal_common_code(&pmf, 0.0, &Budget::default()),
            Err(OracleError::BudgetExceeded { .. })
        ));
    }
}
