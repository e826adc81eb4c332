//! Exhaustive search over restrictions `A ⊆ X×Y`.
//!
//! Every objective minimised here is a sum of per-`y` terms: the cost of `A`
//! depends on `A` only through its sections `A(y) = {x : (x,y) ∈ A}`. The
//! search still visits every one of the `2^{|X||Y|}` subsets, but evaluates
//! each in `O(|Y|)` from per-`y` tables indexed by the section bitmask.
//!
//! Mask layout is column-major: bit `y·|X| + x` is set when `(x, y) ∈ A`.

use rayon::prelude::*;

use crate::dist::JointPmf;
use crate::meets_mass;

/// Per-`y` lookup tables: `cost[y][s]` and `mass[y][s]` for every section
/// bitmask `s` of `X`.
pub(crate) struct SectionTables {
    nx: usize,
    ny: usize,
    cost: Vec<Vec<f64>>,
    mass: Vec<Vec<f64>>,
}

impl SectionTables {
    pub(crate) fn build(pmf: &JointPmf, mut section_cost: impl FnMut(usize, u64) -> f64) -> Self {
        let (nx, ny) = (pmf.nx(), pmf.ny());
        let size = 1usize << nx;
        let mut cost = Vec::with_capacity(ny);
        let mut mass = Vec::with_capacity(ny);
        for y in 0..ny {
            let mut c = Vec::with_capacity(size);
            let mut m = Vec::with_capacity(size);
            for s in 0..size as u64 {
                c.push(section_cost(y, s));
                m.push(section_mass(pmf, y, s));
            }
            cost.push(c);
            mass.push(m);
        }
        SectionTables { nx, ny, cost, mass }
    }

    #[inline]
    fn eval(&self, mask: u64) -> (f64, f64) {
        let sel = (1u64 << self.nx) - 1;
        let mut cost = 0.0;
        let mut mass = 0.0;
        for y in 0..self.ny {
            let s = ((mask >> (y * self.nx)) & sel) as usize;
            cost += self.cost[y][s];
            mass += self.mass[y][s];
        }
        (cost, mass)
    }

    /// Minimum cost over all masks whose mass meets `1 - eps`. Ties go to the
    /// numerically smallest mask, so the result does not depend on how the
    /// range is split across threads.
    pub(crate) fn minimise(&self, eps: f64) -> Option<(f64, u64)> {
        let total = 1u64 << (self.nx * self.ny);
        let pick = |a: Option<(f64, u64)>, b: Option<(f64, u64)>| match (a, b) {
            (None, r) | (r, None) => r,
            (Some(a), Some(b)) => Some(if a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).is_le() { a } else { b }),
        };
        let scan = |range: std::ops::Range<u64>| {
            let mut best: Option<(f64, u64)> = None;
            for mask in range {
                let (cost, mass) = self.eval(mask);
                let cost = cost + 0.0;
                if meets_mass(mass, eps) && best.map_or(true, |(c, _)| cost < c) {
                    best = Some((cost, mask));
                }
            }
            best
        };
        const CHUNK: u64 = 1 << 14;
        if total <= CHUNK {
            return scan(0..total);
        }
        (0..total.div_ceil(CHUNK))
            .into_par_iter()
            .map(|c| scan(c * CHUNK..((c + 1) * CHUNK).min(total)))
            .reduce(|| None, pick)
    }
}

pub(crate) fn section_mass(pmf: &JointPmf, y: usize, s: u64) -> f64 {
    (0..pmf.nx()).filter(|&x| s >> x & 1 == 1).map(|x| pmf.p(x, y)).sum()
}

/// Members `(x, y)` of a column-major mask.
pub(crate) fn mask_cells(pmf: &JointPmf, mask: u64) -> Vec<(usize, usize)> {
    let nx = pmf.nx();
    let mut cells: Vec<(usize, usize)> = (0..pmf.n_cells())
        .filter(|&b| mask >> b & 1 == 1)
        .map(|b| (b % nx, b / nx))
        .collect();
    cells.sort_unstable();
    cells
}
