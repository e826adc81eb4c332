//! One-shot conditional information quantities.
//!
//! | function | quantity |
//! |---|---|
//! | [`restricted_entropy`] | `H_A(X|Y)`, the conditional entropy of `P_XY` restricted to `A` |
//! | [`he_bruteforce`] | `H^ε(X|Y) = min_{P(A) ≥ 1-ε} P(A)·H_A(X|Y)` |
//! | [`the_bruteforce`] | `H̃^ε(X|Y) = min_{P(A) ≥ 1-ε} Σ_A P log 1/P_{X|Y}` |
//! | [`the_fractional`] | the linear relaxation of `H̃^ε` |
//! | [`hhe`] | `Ĥ^ε(X|Y)`, the sorting surrogate |
//! | [`ohe`] | `h̄^ε(x)`, the ε-tail quantile of `-log P_{X|Y}(x|Y)` under `Y|X=x` |
//! | [`ohs_eps`] | `H̄_S^ε(X|Y) = Σ_x P_X(x)·h̄^ε(x)` |
//! | [`spectrum_tail`] | `Pr{-log P_{X|Y}(X|Y) ≥ R}` |
//!
//! At `ε = 1` every quantity is `0`.

mod subset;

pub(crate) use subset::{mask_cells, section_mass, SectionTables};

use thiserror::Error;

use crate::budget::Budget;
use crate::dist::JointPmf;
use crate::{meets_mass, MASS_TOL, TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EntropyError {
    #[error("restriction has zero mass")]
    EmptyRestriction,
    #[error("exhaustive search over {cells} cells exceeds the budget of {budget}")]
    BudgetExceeded { cells: usize, budget: usize },
    #[error("unknown x index {0}")]
    UnknownSymbol(usize),
    #[error("epsilon {0} is outside [0, 1]")]
    InvalidEpsilon(f64),
    #[error("bound violated: {0}")]
    BoundViolated(String),
}

pub fn check_eps(eps: f64) -> Result<(), EntropyError> {
    if (0.0..=1.0).contains(&eps) {
        Ok(())
    } else {
        Err(EntropyError::InvalidEpsilon(eps))
    }
}

/// A subset `A ⊆ X×Y` together with its mass `P_XY(A)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictedSet {
    cells: Vec<(usize, usize)>,
    mass: f64,
}

impl RestrictedSet {
    pub fn new(pmf: &JointPmf, cells: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut cells: Vec<_> = cells.into_iter().collect();
        cells.sort_unstable();
        cells.dedup();
        let mass = cells.iter().map(|&(x, y)| pmf.p(x, y)).sum();
        RestrictedSet { cells, mass }
    }

    pub fn full(pmf: &JointPmf) -> Self {
        Self::new(pmf, (0..pmf.nx()).flat_map(|x| (0..pmf.ny()).map(move |y| (x, y))))
    }

    /// The empty set, used as the witness at `ε = 1`.
    pub fn empty() -> Self {
        RestrictedSet {
            cells: Vec::new(),
            mass: 0.0,
        }
    }

    pub fn cells(&self) -> &[(usize, usize)] {
        &self.cells
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.cells.binary_search(&(x, y)).is_ok()
    }

    /// The section `A(y) = {x : (x, y) ∈ A}`.
    pub fn section(&self, y: usize) -> Vec<usize> {
        self.cells.iter().filter(|c| c.1 == y).map(|c| c.0).collect()
    }

    /// `x:y` label pairs joined by `;`.
    pub fn describe(&self, pmf: &JointPmf) -> String {
        self.cells
            .iter()
            .map(|&(x, y)| format!("{}:{}", pmf.x_labels()[x], pmf.y_labels()[y]))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// `H_A(X|Y)`, the conditional entropy of `Q^A = 1[A]·P_XY / P_XY(A)`.
pub fn restricted_entropy(pmf: &JointPmf, set: &RestrictedSet) -> Result<f64, EntropyError> {
    if set.mass <= 0.0 {
        return Err(EntropyError::EmptyRestriction);
    }
    let mut qy = vec![0.0; pmf.ny()];
    for &(x, y) in &set.cells {
        qy[y] += pmf.p(x, y) / set.mass;
    }
    Ok(set
        .cells
        .iter()
        .map(|&(x, y)| {
            let q = pmf.p(x, y) / set.mass;
            if q > 0.0 {
                q * (qy[y] / q).log2()
            } else {
                0.0
            }
        })
        .sum())
}

fn check_subset_budget(pmf: &JointPmf, limit: usize) -> Result<(), EntropyError> {
    if pmf.n_cells() > limit || pmf.n_cells() > 62 {
        return Err(EntropyError::BudgetExceeded {
            cells: pmf.n_cells(),
            budget: limit,
        });
    }
    Ok(())
}

fn search(
    pmf: &JointPmf,
    eps: f64,
    budget: &Budget,
    section_cost: impl FnMut(usize, u64) -> f64,
) -> Result<(f64, RestrictedSet), EntropyError> {
    check_eps(eps)?;
    check_subset_budget(pmf, budget.subset_cells)?;
    if eps >= 1.0 {
        return Ok((0.0, RestrictedSet::empty()));
    }
    let tables = SectionTables::build(pmf, section_cost);
    let (value, mask) = tables
        .minimise(eps)
        .expect("the full set is always feasible");
    Ok((value, RestrictedSet::new(pmf, mask_cells(pmf, mask))))
}

/// `P_XY(A)·H_A(X|Y)` restricted to a single column `y`, i.e.
/// `Σ_{x ∈ A(y)} P(x,y) log2(P(A(y), y) / P(x,y))`.
fn he_section_cost(pmf: &JointPmf, y: usize, s: u64) -> f64 {
    let m = section_mass(pmf, y, s);
    (0..pmf.nx())
        .filter(|&x| s >> x & 1 == 1)
        .map(|x| {
            let p = pmf.p(x, y);
            if p > 0.0 {
                p * (m / p).log2()
            } else {
                0.0
            }
        })
        .sum()
}

fn the_section_cost(pmf: &JointPmf, y: usize, s: u64) -> f64 {
    (0..pmf.nx())
        .filter(|&x| s >> x & 1 == 1)
        .map(|x| cell_cost(pmf, x, y))
        .sum()
}

/// `P_XY(x,y) · log2(1/P_{X|Y}(x|y))`, zero on zero-mass cells.
#[inline]
fn cell_cost(pmf: &JointPmf, x: usize, y: usize) -> f64 {
    let p = pmf.p(x, y);
    if p > 0.0 {
        p * (pmf.py(y) / p).log2()
    } else {
        0.0
    }
}

/// `H^ε(X|Y)` by exhaustive search, with one minimising restriction.
///
/// Returns `(0, ∅)` at `ε = 1`. Ties between restrictions are broken by the
/// canonical column-major subset encoding.
pub fn he_bruteforce(
    pmf: &JointPmf,
    eps: f64,
    budget: &Budget,
) -> Result<(f64, RestrictedSet), EntropyError> {
    search(pmf, eps, budget, |y, s| he_section_cost(pmf, y, s))
}

/// `H̃^ε(X|Y)` by exhaustive search, with one minimising restriction.
pub fn the_bruteforce(
    pmf: &JointPmf,
    eps: f64,
    budget: &Budget,
) -> Result<(f64, RestrictedSet), EntropyError> {
    search(pmf, eps, budget, |y, s| the_section_cost(pmf, y, s))
}

/// Cells ranked by `P_{X|Y}` (descending) and the cut index `i*` for one ε.
#[derive(Clone, Debug, PartialEq)]
pub struct SortedPairRanking {
    /// All cells. Ties in `P_{X|Y}` are broken by larger `P_XY`, then by
    /// smaller `(x, y)`.
    pub order: Vec<(usize, usize)>,
    /// `cumulative[k]` is the mass of the first `k + 1` cells.
    pub cumulative: Vec<f64>,
    /// Number of leading cells taken (1-based cut). Zero at `ε = 1`.
    pub i_star: usize,
    pub epsilon: f64,
}

impl SortedPairRanking {
    pub fn new(pmf: &JointPmf, eps: f64) -> Self {
        let mut order: Vec<(usize, usize)> =
            (0..pmf.nx()).flat_map(|x| (0..pmf.ny()).map(move |y| (x, y))).collect();
        order.sort_by(|&(xa, ya), &(xb, yb)| {
            pmf.cond_x_given_y(xb, yb)
                .total_cmp(&pmf.cond_x_given_y(xa, ya))
                .then_with(|| pmf.p(xb, yb).total_cmp(&pmf.p(xa, ya)))
                .then_with(|| (xa, ya).cmp(&(xb, yb)))
        });
        let mut acc = 0.0;
        let cumulative: Vec<f64> = order
            .iter()
            .map(|&(x, y)| {
                acc += pmf.p(x, y);
                acc
            })
            .collect();
        let i_star = if eps >= 1.0 {
            0
        } else {
            cumulative
                .iter()
                .position(|&c| meets_mass(c, eps))
                .map_or(order.len(), |i| i + 1)
        };
        SortedPairRanking {
            order,
            cumulative,
            i_star,
            epsilon: eps,
        }
    }

    /// The restriction `{(x_i, y_i) : i ≤ i*}`.
    pub fn prefix_set(&self, pmf: &JointPmf) -> RestrictedSet {
        RestrictedSet::new(pmf, self.order[..self.i_star].iter().copied())
    }
}

/// `Ĥ^ε(X|Y) = Σ_{i ≤ i*} P_XY(x_i,y_i) log2(1/P_{X|Y}(x_i|y_i))`.
pub fn hhe(pmf: &JointPmf, eps: f64) -> (f64, SortedPairRanking) {
    let ranking = SortedPairRanking::new(pmf, eps);
    let value = ranking.order[..ranking.i_star]
        .iter()
        .map(|&(x, y)| cell_cost(pmf, x, y))
        .sum();
    (value, ranking)
}

/// The linear relaxation of `H̃^ε`: weights `0 ≤ g ≤ P_XY` with total at
/// least `1 - ε`. Its optimum fills cells in ranking order and takes a
/// fractional share `1 - ε - Σ_{i<i*} P_i` of the boundary cell `i*`.
pub fn the_fractional(pmf: &JointPmf, eps: f64) -> f64 {
    let ranking = SortedPairRanking::new(pmf, eps);
    if ranking.i_star == 0 {
        return 0.0;
    }
    let k = ranking.i_star - 1;
    let full: f64 = ranking.order[..k].iter().map(|&(x, y)| cell_cost(pmf, x, y)).sum();
    let before = if k == 0 { 0.0 } else { ranking.cumulative[k - 1] };
    let (bx, by) = ranking.order[k];
    let share = (1.0 - eps - before).clamp(0.0, pmf.p(bx, by));
    if share > 0.0 {
        full + share * pmf.info(bx, by)
    } else {
        full
    }
}

/// Result of a tail-quantile computation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailQuantileResult {
    /// `inf{α : Pr{f > α} ≤ ε}` in bits.
    pub value: f64,
    /// `Pr{f > value}`.
    pub tail_mass_at_value: f64,
}

/// `inf{α : Σ_{f_i > α} w_i ≤ ε}` for a finite law given as `(f, w)` pairs.
///
/// The step function `α ↦ Pr{f > α}` only changes at the atoms, so the
/// infimum is one of the atom values. `ε ≥ 1` yields `0` by convention.
pub fn tail_quantile(atoms: &mut [(f64, f64)], eps: f64) -> TailQuantileResult {
    if eps >= 1.0 {
        let tail = atoms.iter().filter(|a| a.0 > 0.0).map(|a| a.1).sum();
        return TailQuantileResult {
            value: 0.0,
            tail_mass_at_value: tail,
        };
    }
    atoms.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = TailQuantileResult {
        value: 0.0,
        tail_mass_at_value: 0.0,
    };
    let mut above = 0.0;
    let mut i = 0;
    while i < atoms.len() {
        let v = atoms[i].0;
        if above > eps + MASS_TOL {
            break;
        }
        best = TailQuantileResult {
            value: v,
            tail_mass_at_value: above,
        };
        while i < atoms.len() && atoms[i].0 == v {
            above += atoms[i].1;
            i += 1;
        }
    }
    // every atom fits in the tail, so α = 0 is admissible too
    if i == atoms.len() && above <= eps + MASS_TOL {
        let at_zero = atoms.iter().filter(|a| a.0 <= 0.0).map(|a| a.1).sum::<f64>();
        best = TailQuantileResult {
            value: 0.0,
            tail_mass_at_value: above - at_zero,
        };
    }
    best
}

/// `h̄^ε(x)`, the ε-tail quantile of `f_x(Y_x) = -log2 P_{X|Y}(x|Y_x)` where
/// `Y_x ~ P_{Y|X}(·|x)`.
pub fn ohe(pmf: &JointPmf, x: usize, eps: f64) -> Result<TailQuantileResult, EntropyError> {
    if x >= pmf.nx() {
        return Err(EntropyError::UnknownSymbol(x));
    }
    check_eps(eps)?;
    let mut atoms: Vec<(f64, f64)> = (0..pmf.ny())
        .filter(|&y| pmf.p(x, y) > 0.0)
        .map(|y| (pmf.info(x, y), pmf.cond_y_given_x(y, x)))
        .collect();
    Ok(tail_quantile(&mut atoms, eps))
}

/// Checks `0 ≤ h̄^ε(x) ≤ log2(1/P_X(x)) + log2(1/ε)` for `ε ∈ (0, 1]`.
pub fn ohe_bounds_check(pmf: &JointPmf, x: usize, eps: f64) -> Result<(), EntropyError> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(EntropyError::InvalidEpsilon(eps));
    }
    let value = ohe(pmf, x, eps)?.value;
    let upper = -pmf.px(x).log2() - eps.log2();
    if value < -TOL || value > upper + TOL {
        return Err(EntropyError::BoundViolated(format!(
            "h̄^{eps}(x={x}) = {value} outside [0, {upper}]"
        )));
    }
    Ok(())
}

/// `H̄_S^ε(X|Y) = Σ_x P_X(x)·h̄^ε(x)`.
pub fn ohs_eps(pmf: &JointPmf, eps: f64) -> f64 {
    (0..pmf.nx())
        .map(|x| pmf.px(x) * ohe(pmf, x, eps.clamp(0.0, 1.0)).expect("index in range").value)
        .sum()
}

/// `Pr{-log2 P_{X|Y}(X|Y) ≥ R}` under `P_XY`.
pub fn spectrum_tail(pmf: &JointPmf, r: f64) -> f64 {
    let ny = pmf.ny();
    pmf.probs()
        .iter()
        .enumerate()
        .filter(|&(i, &p)| p > 0.0 && pmf.info(i / ny, i % ny) >= r)
        .map(|(_, &p)| p)
        .sum()
}

/// The law of the information density `-log2 P_{X|Y}(X|Y)`, as sorted
/// distinct atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    /// `(value, mass)` with strictly increasing values.
    pub atoms: Vec<(f64, f64)>,
}

impl Spectrum {
    pub fn of(pmf: &JointPmf) -> Self {
        let ny = pmf.ny();
        let atoms = pmf
            .probs()
            .iter()
            .enumerate()
            .filter(|&(_, &p)| p > 0.0)
            .map(|(i, &p)| (pmf.info(i / ny, i % ny), p))
            .collect();
        Self::from_atoms(atoms)
    }

    /// Sorts and merges bitwise-equal values.
    pub fn from_atoms(mut atoms: Vec<(f64, f64)>) -> Self {
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (v, m) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += m,
                _ => merged.push((v, m)),
            }
        }
        Spectrum { atoms: merged }
    }

    /// Divides every value by `n`.
    pub fn normalised(&self, n: usize) -> Self {
        Spectrum {
            atoms: self.atoms.iter().map(|&(v, m)| (v / n as f64, m)).collect(),
        }
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|&(v, m)| v * m).sum()
    }

    /// `Pr{V ≥ r}`.
    pub fn tail_ge(&self, r: f64) -> f64 {
        self.atoms.iter().filter(|a| a.0 >= r).map(|a| a.1).sum()
    }

    /// `inf{R : Pr{V ≥ R} ≤ ε}`: the smallest atom whose strict upper tail
    /// is at most ε.
    pub fn upper_quantile(&self, eps: f64) -> f64 {
        let mut atoms = self.atoms.clone();
        tail_quantile(&mut atoms, eps).value
    }

    /// `sup{R : Pr{V < R} ≤ ε}`: the largest atom whose strict lower tail is
    /// at most ε.
    pub fn lower_quantile(&self, eps: f64) -> f64 {
        let mut below = 0.0;
        let mut best = self.atoms.first().map_or(0.0, |a| a.0);
        for &(v, m) in &self.atoms {
            if below > eps + MASS_TOL {
                break;
            }
            best = v;
            below += m;
        }
        best
    }
}
