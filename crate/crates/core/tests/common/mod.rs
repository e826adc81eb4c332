//! Random instances and brute-force oracles written directly from the
//! definitions, sharing no code with the library's search routines.

#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sideinfo::dist::JointPmf;

pub const TOL: f64 = 1e-9;

fn labels(prefix: &str, k: usize) -> Vec<String> {
    (0..k).map(|i| format!("{prefix}{i}")).collect()
}

/// Builds a pmf from nonnegative weights. Empty rows and columns get a
/// positive cell so that both marginals have full support.
pub fn pmf_from_weights(nx: usize, ny: usize, w: &[f64]) -> JointPmf {
    let mut w = w.to_vec();
    for x in 0..nx {
        if (0..ny).all(|y| w[x * ny + y] == 0.0) {
            w[x * ny + x % ny] = 0.5;
        }
    }
    for y in 0..ny {
        if (0..nx).all(|x| w[x * ny + y] == 0.0) {
            w[(y % nx) * ny + y] = 0.5;
        }
    }
    let total: f64 = w.iter().sum();
    let rows = (0..nx)
        .map(|x| (0..ny).map(|y| w[x * ny + y] / total).collect())
        .collect();
    JointPmf::new(labels("x", nx), labels("y", ny), rows).expect("normalised weights")
}

/// A random pmf where roughly a fifth of the cells are zero.
pub fn random_pmf(rng: &mut impl Rng, nx: usize, ny: usize) -> JointPmf {
    let w: Vec<f64> = (0..nx * ny)
        .map(|_| if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.01..1.0) })
        .collect();
    pmf_from_weights(nx, ny, &w)
}

/// `count` random pmfs with `|X|, |Y| ≤ max`, reproducible from `seed`.
pub fn random_pmfs(seed: u64, count: usize, max: usize) -> Vec<JointPmf> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let nx = rng.gen_range(1..=max);
            let ny = rng.gen_range(1..=max);
            random_pmf(&mut rng, nx, ny)
        })
        .collect()
}

pub fn arb_pmf(max_x: usize, max_y: usize) -> impl Strategy<Value = JointPmf> {
    (1..=max_x, 1..=max_y)
        .prop_flat_map(|(nx, ny)| {
            let cell = prop_oneof![1 => Just(0.0), 4 => 0.01f64..1.0];
            (Just(nx), Just(ny), prop::collection::vec(cell, nx * ny))
        })
        .prop_map(|(nx, ny, w)| pmf_from_weights(nx, ny, &w))
}

pub fn arb_eps() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.0), Just(1.0), 0.0f64..1.0]
}

fn cells(pmf: &JointPmf) -> Vec<(usize, usize, f64)> {
    (0..pmf.nx())
        .flat_map(|x| (0..pmf.ny()).map(move |y| (x, y)))
        .map(|(x, y)| (x, y, pmf.p(x, y)))
        .collect()
}

fn admissible(mass: f64, eps: f64) -> bool {
    mass >= 1.0 - eps - TOL
}

/// `min_A P(A)·H_A(X|Y)` over every subset of cells with `P(A) ≥ 1 - ε`,
/// where `P(A)·H_A = Σ_A P(x,y)·log2(P(A_y)/P(x,y))`.
pub fn he_oracle(pmf: &JointPmf, eps: f64) -> f64 {
    if eps >= 1.0 {
        return 0.0;
    }
    let c = cells(pmf);
    let mut best = f64::INFINITY;
    for mask in 0u64..(1 << c.len()) {
        let inside = |i: usize| mask >> i & 1 == 1;
        let mass: f64 = (0..c.len()).filter(|&i| inside(i)).map(|i| c[i].2).sum();
        if !admissible(mass, eps) {
            continue;
        }
        let mut v = 0.0;
        for y in 0..pmf.ny() {
            let col: f64 = (0..c.len()).filter(|&i| inside(i) && c[i].1 == y).map(|i| c[i].2).sum();
            for i in (0..c.len()).filter(|&i| inside(i) && c[i].1 == y && c[i].2 > 0.0) {
                v += c[i].2 * (col / c[i].2).log2();
            }
        }
        best = best.min(v);
    }
    best
}

fn cost(pmf: &JointPmf, x: usize, y: usize) -> f64 {
    let p = pmf.p(x, y);
    if p == 0.0 {
        0.0
    } else {
        let py: f64 = (0..pmf.nx()).map(|k| pmf.p(k, y)).sum();
        p * (py / p).log2()
    }
}

/// `min_A Σ_A P(x,y)·log2(1/P(x|y))` over subsets with `P(A) ≥ 1 - ε`.
pub fn the_oracle(pmf: &JointPmf, eps: f64) -> f64 {
    if eps >= 1.0 {
        return 0.0;
    }
    let c = cells(pmf);
    let mut best = f64::INFINITY;
    for mask in 0u64..(1 << c.len()) {
        let idx: Vec<usize> = (0..c.len()).filter(|&i| mask >> i & 1 == 1).collect();
        let mass: f64 = idx.iter().map(|&i| c[i].2).sum();
        if admissible(mass, eps) {
            best = best.min(idx.iter().map(|&i| cost(pmf, c[i].0, c[i].1)).sum());
        }
    }
    best
}

/// The linear program `min Σ g·log2(1/P(x|y))` over `0 ≤ g ≤ P`,
/// `Σ g ≥ 1 - ε`, solved by enumerating its vertices: every cell sits at a
/// bound except at most one.
pub fn lp_vertex_oracle(pmf: &JointPmf, eps: f64) -> f64 {
    if eps >= 1.0 {
        return 0.0;
    }
    let c = cells(pmf);
    let unit = |i: usize| if c[i].2 > 0.0 { cost(pmf, c[i].0, c[i].1) / c[i].2 } else { 0.0 };
    let mut best = f64::INFINITY;
    for mask in 0u64..(1 << c.len()) {
        let full: Vec<usize> = (0..c.len()).filter(|&i| mask >> i & 1 == 1).collect();
        let mass: f64 = full.iter().map(|&i| c[i].2).sum();
        let base: f64 = full.iter().map(|&i| unit(i) * c[i].2).sum();
        if admissible(mass, eps) {
            best = best.min(base);
            continue;
        }
        let need = 1.0 - eps - mass;
        for j in (0..c.len()).filter(|&j| mask >> j & 1 == 0 && c[j].2 >= need) {
            best = best.min(base + need * unit(j));
        }
    }
    best
}

/// `Ĥ^ε` from its definition: sort cells by `P(x|y)` descending (ties by
/// larger `P(x,y)`, then cell order) and take the shortest prefix of mass
/// at least `1 - ε`.
pub fn hhe_oracle(pmf: &JointPmf, eps: f64) -> f64 {
    if eps >= 1.0 {
        return 0.0;
    }
    let mut c: Vec<(f64, f64, f64)> = cells(pmf)
        .into_iter()
        .map(|(x, y, p)| {
            let py: f64 = (0..pmf.nx()).map(|k| pmf.p(k, y)).sum();
            let q = if py > 0.0 { p / py } else { 0.0 };
            (q, p, cost(pmf, x, y))
        })
        .collect();
    c.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.total_cmp(&a.1)));
    let mut acc = 0.0;
    let mut value = 0.0;
    for &(_, p, k) in &c {
        if admissible(acc, eps) {
            break;
        }
        acc += p;
        value += k;
    }
    value
}

/// `h̄^ε(x)` straight from `inf{α : Pr{f_x(Y) > α} ≤ ε}`, scanning the
/// candidate values `{0} ∪ {f_x(y)}` in increasing order.
pub fn ohe_oracle(pmf: &JointPmf, x: usize, eps: f64) -> f64 {
    let px: f64 = (0..pmf.ny()).map(|y| pmf.p(x, y)).sum();
    let law: Vec<(f64, f64)> = (0..pmf.ny())
        .filter(|&y| pmf.p(x, y) > 0.0)
        .map(|y| {
            let py: f64 = (0..pmf.nx()).map(|k| pmf.p(k, y)).sum();
            ((py / pmf.p(x, y)).log2(), pmf.p(x, y) / px)
        })
        .collect();
    let mut candidates: Vec<f64> = law.iter().map(|a| a.0).chain([0.0]).collect();
    candidates.sort_by(f64::total_cmp);
    for &a in &candidates {
        let tail: f64 = law.iter().filter(|l| l.0 > a).map(|l| l.1).sum();
        if tail <= eps + TOL {
            return a;
        }
    }
    unreachable!("the largest candidate has an empty tail")
}

/// Expected Huffman length from the sum of merged weights. A single symbol
/// costs nothing.
pub fn huffman_cost(weights: &[f64]) -> f64 {
    let mut heap: BinaryHeap<Reverse<u64>> = weights.iter().map(|w| Reverse(w.to_bits())).collect();
    let mut total = 0.0;
    while heap.len() > 1 {
        let a = f64::from_bits(heap.pop().unwrap().0);
        let b = f64::from_bits(heap.pop().unwrap().0);
        total += a + b;
        heap.push(Reverse((a + b).to_bits()));
    }
    total
}

/// Optimal average length at ε = 0: every positive cell must decode, so each
/// column is an independent Huffman problem.
pub fn zero_error_optimum(pmf: &JointPmf) -> f64 {
    (0..pmf.ny())
        .map(|y| {
            let w: Vec<f64> = (0..pmf.nx()).map(|x| pmf.p(x, y)).filter(|&p| p > 0.0).collect();
            huffman_cost(&w)
        })
        .sum()
}

pub fn h2(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}
