//! Exact blocklength-`n` computation by joint type classes.
//!
//! For a mixture of i.i.d. sources `Σ_i α_i P_i^{⊗n}`, the probabilities
//! `P(xⁿ,yⁿ)`, `P(xⁿ)` and `P(yⁿ)` depend on `(xⁿ,yⁿ)` only through the joint
//! type, i.e. the count `n(x,y)` of each letter pair. Every block quantity in
//! this module is a sum or a quantile over sequences, so it can be evaluated
//! one type class at a time, weighted by the class size.

use crate::budget::Budget;
use crate::dist::MixtureSpec;

use super::SourceError;

const LN2: f64 = std::f64::consts::LN_2;

struct Component {
    ln_w: f64,
    ln_p: Vec<f64>,
    ln_px: Vec<f64>,
    ln_py: Vec<f64>,
}

fn ln_or_neg_inf(p: f64) -> f64 {
    if p > 0.0 {
        p.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// `Σ_c counts[c]·ln p[c]`, with `0·ln 0 = 0`.
fn dot(counts: &[u32], ln_p: &[f64]) -> f64 {
    counts
        .iter()
        .zip(ln_p)
        .filter(|(&c, _)| c > 0)
        .map(|(&c, &l)| c as f64 * l)
        .sum()
}

/// `C(n + k - 1, k - 1)`, the number of compositions of `n` into `k` parts,
/// saturating at `u128::MAX`.
pub fn composition_count(n: usize, k: usize) -> u128 {
    if k == 0 {
        return u128::from(n == 0);
    }
    let mut acc: u128 = 1;
    for i in 1..k as u128 {
        acc = match acc.checked_mul(n as u128 + i) {
            Some(v) => v / i,
            None => return u128::MAX,
        };
    }
    acc
}

/// Calls `f` on every composition of `n` into `parts.len()` non-negative
/// parts, in lexicographic order.
fn compositions(n: u32, parts: &mut [u32], f: &mut impl FnMut(&[u32])) {
    fn rec(rest: u32, i: usize, parts: &mut [u32], f: &mut impl FnMut(&[u32])) {
        if i + 1 == parts.len() {
            parts[i] = rest;
            f(parts);
            return;
        }
        for v in (0..=rest).rev() {
            parts[i] = v;
            rec(rest - v, i + 1, parts, f);
        }
    }
    if parts.is_empty() {
        if n == 0 {
            f(parts);
        }
        return;
    }
    rec(n, 0, parts, f);
}

/// Type-class calculator for one source at one blocklength.
pub struct TypeEngine {
    n: usize,
    nx: usize,
    ny: usize,
    comps: Vec<Component>,
    ln_fact: Vec<f64>,
}

impl TypeEngine {
    pub fn new(spec: &MixtureSpec, n: usize) -> Self {
        let comps = spec
            .components()
            .iter()
            .map(|(w, pmf)| Component {
                ln_w: w.ln(),
                ln_p: pmf.probs().iter().map(|&p| ln_or_neg_inf(p)).collect(),
                ln_px: pmf.x_marginal().iter().map(|&p| ln_or_neg_inf(p)).collect(),
                ln_py: pmf.y_marginal().iter().map(|&p| ln_or_neg_inf(p)).collect(),
            })
            .collect();
        let mut ln_fact = vec![0.0; n + 1];
        for k in 1..=n {
            ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
        }
        TypeEngine {
            n,
            nx: spec.nx(),
            ny: spec.ny(),
            comps,
            ln_fact,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Number of joint types.
    pub fn joint_type_count(&self) -> u128 {
        composition_count(self.n, self.nx * self.ny)
    }

    pub fn check_budget(&self, budget: &Budget) -> Result<(), SourceError> {
        let needed = self.joint_type_count();
        if needed > budget.type_classes as u128 {
            return Err(SourceError::BudgetExceeded {
                needed,
                budget: budget.type_classes as u128,
            });
        }
        Ok(())
    }

    fn ln_mix(&self, f: impl Fn(&Component) -> f64) -> f64 {
        let terms: Vec<f64> = self.comps.iter().map(|c| c.ln_w + f(c)).collect();
        let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return max;
        }
        max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
    }

    /// Column sums `n(y)` of a row-major joint type.
    pub fn y_counts(&self, counts: &[u32]) -> Vec<u32> {
        (0..self.ny)
            .map(|y| (0..self.nx).map(|x| counts[x * self.ny + y]).sum())
            .collect()
    }

    /// Row sums `n(x)` of a row-major joint type.
    pub fn x_counts(&self, counts: &[u32]) -> Vec<u32> {
        counts.chunks(self.ny).map(|r| r.iter().sum()).collect()
    }

    /// `ln P(xⁿ,yⁿ)` for one sequence pair of the given joint type.
    pub fn ln_joint(&self, counts: &[u32]) -> f64 {
        self.ln_mix(|c| dot(counts, &c.ln_p))
    }

    /// `ln P(yⁿ)` for a sequence with letter counts `ycounts`.
    pub fn ln_y(&self, ycounts: &[u32]) -> f64 {
        self.ln_mix(|c| dot(ycounts, &c.ln_py))
    }

    /// `ln P(xⁿ)` for a sequence with letter counts `xcounts`.
    pub fn ln_x(&self, xcounts: &[u32]) -> f64 {
        self.ln_mix(|c| dot(xcounts, &c.ln_px))
    }

    /// `-log2 P(xⁿ|yⁿ)` in bits.
    pub fn info_bits(&self, counts: &[u32]) -> f64 {
        (self.ln_y(&self.y_counts(counts)) - self.ln_joint(counts)) / LN2
    }

    fn ln_multinomial(&self, total: u32, parts: &[u32]) -> f64 {
        self.ln_fact[total as usize] - parts.iter().map(|&c| self.ln_fact[c as usize]).sum::<f64>()
    }

    /// `ln` of the number of sequence pairs with this joint type.
    pub fn ln_class_size(&self, counts: &[u32]) -> f64 {
        self.ln_multinomial(self.n as u32, counts)
    }

    /// `ln` of the number of `xⁿ` with these letter counts.
    pub fn ln_x_class_size(&self, xcounts: &[u32]) -> f64 {
        self.ln_multinomial(self.n as u32, xcounts)
    }

    /// `ln` of the number of `yⁿ` that form this joint type with one fixed
    /// `xⁿ`.
    pub fn ln_conditional_class_size(&self, counts: &[u32]) -> f64 {
        counts
            .chunks(self.ny)
            .map(|row| self.ln_multinomial(row.iter().sum(), row))
            .sum()
    }

    /// Visits every joint type (row-major counts).
    pub fn for_each_joint_type(&self, mut f: impl FnMut(&[u32])) {
        let mut parts = vec![0u32; self.nx * self.ny];
        compositions(self.n as u32, &mut parts, &mut f);
    }

    /// Visits every type of `xⁿ`.
    pub fn for_each_x_type(&self, mut f: impl FnMut(&[u32])) {
        let mut parts = vec![0u32; self.nx];
        compositions(self.n as u32, &mut parts, &mut f);
    }

    /// Visits every joint type whose row sums equal `xcounts`.
    pub fn for_each_conditional_type(&self, xcounts: &[u32], mut f: impl FnMut(&[u32])) {
        let mut counts = vec![0u32; self.nx * self.ny];
        self.conditional_rec(xcounts, 0, &mut counts, &mut f);
    }

    fn conditional_rec(&self, xcounts: &[u32], x: usize, counts: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
        if x == self.nx {
            f(counts);
            return;
        }
        let ny = self.ny;
        let mut row = vec![0u32; ny];
        compositions(xcounts[x], &mut row, &mut |r: &[u32]| {
            counts[x * ny..(x + 1) * ny].copy_from_slice(r);
            self.conditional_rec(xcounts, x + 1, counts, f);
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::JointPmf;

    #[test]
    fn counts() {
        assert_eq!(composition_count(10, 4), 286);
        assert_eq!(composition_count(0, 3), 1);
        assert_eq!(composition_count(5, 1), 1);
        let spec = MixtureSpec::single(JointPmf::dsbs(0.25).unwrap());
        let engine = TypeEngine::new(&spec, 6);
        let mut seen = 0;
        let mut mass = 0.0;
        engine.for_each_joint_type(|c| {
            seen += 1;
            mass += (engine.ln_class_size(c) + engine.ln_joint(c)).exp();
        });
        assert_eq!(seen as u128, engine.joint_type_count());
        assert!((mass - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conditional_types_partition_joint_types() {
        let spec = MixtureSpec::single(JointPmf::dsbs(0.1).unwrap());
        let engine = TypeEngine::new(&spec, 5);
        let mut total = 0;
        engine.for_each_x_type(|m| {
            let mut cond_mass = 0.0;
            engine.for_each_conditional_type(m, |c| {
                total += 1;
                assert_eq!(engine.x_counts(c), m);
                cond_mass += (engine.ln_conditional_class_size(c) + engine.ln_joint(c) - engine.ln_x(m)).exp();
            });
            assert!((cond_mass - 1.0).abs() < 1e-12);
        });
        assert_eq!(total as u128, engine.joint_type_count());
    }
}
