//! Blocklength-`n` behaviour of i.i.d. and mixed sources.
//!
//! A source is a [`MixtureSpec`]: at blocklength `n` it is the sequence-level
//! mixture `Σ_i α_i P_i^{⊗n}` (an i.i.d. source is a single component). All
//! block quantities are computed exactly by joint type classes (see
//! [`types`]); `H̄_S^ε` falls back to Monte Carlo over `xⁿ` with exact
//! per-`xⁿ` quantiles when the number of types exceeds the budget. Rates are
//! reported in bits per symbol.

mod mc;
pub mod types;

use rayon::prelude::*;
use thiserror::Error;

use crate::budget::Budget;
use crate::dist::{kl_divergence_x_marginals, DistError, JointPmf, MixtureSpec};
use crate::entropy::{check_eps, tail_quantile, EntropyError, Spectrum};
use crate::{meets_mass, DEFAULT_SEED, MASS_TOL, TOL};

pub use mc::{ohs_monte_carlo, spectrum_quantiles, SpectrumEstimate};
pub use types::TypeEngine;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SourceError {
    #[error("computation needs {needed} type classes, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("mixture regime undetermined: {0}")]
    RegimeUndetermined(String),
    #[error("bound violated: {0}")]
    BoundViolated(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Entropy(#[from] EntropyError),
}

/// How a sweep value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exact,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::MonteCarlo => "mc",
        }
    }
}

/// One row of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub quantity: String,
    pub n: usize,
    /// Bits per symbol.
    pub value: f64,
    pub prediction: f64,
    /// `value - prediction`.
    pub gap: f64,
    /// Zero for exact values.
    pub stderr: f64,
    pub method: Method,
}

impl SweepResult {
    fn new(quantity: &str, n: usize, value: f64, prediction: f64, stderr: f64, method: Method) -> Self {
        SweepResult {
            quantity: quantity.to_string(),
            n,
            value,
            prediction,
            gap: value - prediction,
            stderr,
            method,
        }
    }
}

/// Monte Carlo settings for the `H̄_S^ε` fallback.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            samples: 4000,
            seed: DEFAULT_SEED,
        }
    }
}

fn check_n(n: usize) -> Result<(), SourceError> {
    if n == 0 {
        return Err(SourceError::InvalidParameter("blocklength must be at least 1".into()));
    }
    Ok(())
}

/// `H(Xⁿ|Yⁿ)` in bits.
pub fn block_conditional_entropy(spec: &MixtureSpec, n: usize, budget: &Budget) -> Result<f64, SourceError> {
    check_n(n)?;
    let engine = TypeEngine::new(spec, n);
    engine.check_budget(budget)?;
    let mut h = 0.0;
    engine.for_each_joint_type(|c| {
        let mass = (engine.ln_class_size(c) + engine.ln_joint(c)).exp();
        if mass > 0.0 {
            h += mass * engine.info_bits(c);
        }
    });
    Ok(h)
}

/// `Ĥ^ε(Xⁿ|Yⁿ)` in bits: sequences ranked by `P(xⁿ|yⁿ)` (ties by larger
/// `P(xⁿ,yⁿ)`, then by type enumeration order), cut at the first prefix with
/// mass `1 - ε`.
pub fn block_hhe(spec: &MixtureSpec, n: usize, eps: f64, budget: &Budget) -> Result<f64, SourceError> {
    check_n(n)?;
    check_eps(eps)?;
    if eps >= 1.0 {
        return Ok(0.0);
    }
    let engine = TypeEngine::new(spec, n);
    engine.check_budget(budget)?;
    // (info, ln P per sequence, class size)
    let mut classes: Vec<(f64, f64, f64)> = Vec::new();
    engine.for_each_joint_type(|c| {
        let ln_p = engine.ln_joint(c);
        if ln_p > f64::NEG_INFINITY {
            classes.push((engine.info_bits(c), ln_p, engine.ln_class_size(c).exp().round()));
        }
    });
    classes.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    let (mut cum, mut value) = (0.0, 0.0);
    for &(info, ln_p, size) in &classes {
        let p = ln_p.exp();
        let mass = size * p;
        if meets_mass(cum + mass, eps) {
            // smallest k ≤ size with cum + k·p reaching the target; class
            // sizes can exceed 2^53, so correct the closed form by one step
            // at most instead of searching
            let mut k = ((1.0 - eps - MASS_TOL - cum) / p).ceil().clamp(1.0, size.max(1.0));
            if k > 1.0 && meets_mass(cum + (k - 1.0) * p, eps) {
                k -= 1.0;
            } else if !meets_mass(cum + k * p, eps) {
                k = (k + 1.0).min(size.max(1.0));
            }
            return Ok(value + k * p * info);
        }
        cum += mass;
        value += mass * info;
    }
    Ok(value)
}

/// `h̄^ε(xⁿ)` for any `xⁿ` with letter counts `xcounts`, and the tail term
/// `Σ_{yⁿ : f > h̄ + γ} P(yⁿ|xⁿ)·f` with `f = -log2 P(xⁿ|yⁿ)`.
fn block_ohe(engine: &TypeEngine, xcounts: &[u32], eps: f64, gamma: f64) -> (f64, f64) {
    let ln_px = engine.ln_x(xcounts);
    let mut atoms: Vec<(f64, f64)> = Vec::new();
    engine.for_each_conditional_type(xcounts, |c| {
        let ln_p = engine.ln_joint(c);
        if ln_p > f64::NEG_INFINITY {
            let w = (engine.ln_conditional_class_size(c) + ln_p - ln_px).exp();
            atoms.push((engine.info_bits(c), w));
        }
    });
    let value = tail_quantile(&mut atoms, eps).value;
    let tail = atoms
        .iter()
        .filter(|a| a.0 > value + gamma)
        .map(|a| a.0 * a.1)
        .sum();
    (value, tail)
}

/// `H̄_S^ε(Xⁿ|Yⁿ)` and the averaged tail term for slack `γ`, both in bits.
fn block_ohs_with_tail(
    spec: &MixtureSpec,
    n: usize,
    eps: f64,
    gamma: f64,
    budget: &Budget,
) -> Result<(f64, f64), SourceError> {
    check_n(n)?;
    check_eps(eps)?;
    let engine = TypeEngine::new(spec, n);
    engine.check_budget(budget)?;
    let (mut ohs, mut tail) = (0.0, 0.0);
    engine.for_each_x_type(|m| {
        let w = (engine.ln_x_class_size(m) + engine.ln_x(m)).exp();
        if w > 0.0 {
            let (h, t) = block_ohe(&engine, m, eps, gamma);
            ohs += w * h;
            tail += w * t;
        }
    });
    Ok((ohs, tail))
}

/// `H̄_S^ε(Xⁿ|Yⁿ) = Σ_{xⁿ} P(xⁿ)·h̄^ε(xⁿ)` in bits, computed exactly.
pub fn block_ohs(spec: &MixtureSpec, n: usize, eps: f64, budget: &Budget) -> Result<f64, SourceError> {
    Ok(block_ohs_with_tail(spec, n, eps, 0.0, budget)?.0)
}

/// The law of `-log2 P(Xⁿ|Yⁿ)` (not normalised).
pub fn block_spectrum(spec: &MixtureSpec, n: usize, budget: &Budget) -> Result<Spectrum, SourceError> {
    check_n(n)?;
    let engine = TypeEngine::new(spec, n);
    engine.check_budget(budget)?;
    let mut atoms = Vec::new();
    engine.for_each_joint_type(|c| {
        let mass = (engine.ln_class_size(c) + engine.ln_joint(c)).exp();
        if mass > 0.0 {
            atoms.push((engine.info_bits(c), mass));
        }
    });
    Ok(Spectrum::from_atoms(atoms))
}

/// `(1/n)·H̄_S^ε`, exact when the type count fits the budget, otherwise
/// Monte Carlo over `xⁿ`.
fn ohs_rate(
    spec: &MixtureSpec,
    n: usize,
    eps: f64,
    budget: &Budget,
    mc: &McConfig,
) -> Result<(f64, f64, Method), SourceError> {
    if TypeEngine::new(spec, n).check_budget(budget).is_ok() {
        let v = block_ohs(spec, n, eps, budget)?;
        Ok((v / n as f64, 0.0, Method::Exact))
    } else {
        let (mean, stderr) = ohs_monte_carlo(spec, n, eps, mc.samples, mc.seed, budget)?;
        Ok((mean / n as f64, stderr / n as f64, Method::MonteCarlo))
    }
}

fn over_n<T: Send>(
    n_max: usize,
    f: impl Fn(usize) -> Result<T, SourceError> + Sync + Send,
) -> Result<Vec<T>, SourceError> {
    check_n(n_max)?;
    (1..=n_max).into_par_iter().map(f).collect()
}

/// `(1/n)·Ĥ^ε(Xⁿ|Yⁿ)` for `n = 1..=n_max` against `(1 - ε)·H(X|Y)`.
pub fn rcom_sweep(base: &JointPmf, eps: f64, n_max: usize, budget: &Budget) -> Result<Vec<SweepResult>, SourceError> {
    let spec = MixtureSpec::single(base.clone());
    let prediction = (1.0 - eps) * base.conditional_entropy();
    over_n(n_max, |n| {
        let v = block_hhe(&spec, n, eps, budget)? / n as f64;
        Ok(SweepResult::new("rcom", n, v, prediction, 0.0, Method::Exact))
    })
}

/// `(1/n)·H̄_S^ε(Xⁿ|Yⁿ)` for `n = 1..=n_max` against `H(X|Y)`.
pub fn ohs_sweep(
    base: &JointPmf,
    eps: f64,
    n_max: usize,
    budget: &Budget,
    mc: &McConfig,
) -> Result<Vec<SweepResult>, SourceError> {
    let spec = MixtureSpec::single(base.clone());
    let prediction = if eps >= 1.0 { 0.0 } else { base.conditional_entropy() };
    over_n(n_max, |n| {
        let (v, se, method) = ohs_rate(&spec, n, eps, budget, mc)?;
        Ok(SweepResult::new("ohs", n, v, prediction, se, method))
    })
}

/// Which limit theorem predicts the mixed source's rate.
#[derive(Clone, Debug, PartialEq)]
pub enum MixtureRegime {
    /// All X-marginals coincide: `max_i H_i(X|Y)`.
    Max,
    /// All X-marginals pairwise distinguishable: `Σ_i α_i H_i(X|Y)`.
    Average,
    /// Components grouped by X-marginal, groups distinguishable:
    /// `Σ_g α_g max_{i ∈ g} H_i(X|Y)`.
    Grouped,
}

/// Marginals closer than this (sup norm) are treated as identical.
pub const MARGINAL_TOL: f64 = 1e-9;
/// Divergence above which two marginals count as distinguishable.
pub const DIVERGENCE_FLOOR: f64 = 1e-12;

/// The regime and predicted limit of `(1/n)·H̄_S^ε` for a mixture.
pub fn mixture_prediction(spec: &MixtureSpec) -> Result<(MixtureRegime, f64), SourceError> {
    let comps = spec.components();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, (_, pmf)) in comps.iter().enumerate() {
        let same = |g: &Vec<usize>| {
            let rep = comps[g[0]].1.x_marginal();
            rep.iter().zip(pmf.x_marginal()).all(|(a, b)| (a - b).abs() <= MARGINAL_TOL)
        };
        match groups.iter_mut().find(|g| same(g)) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    for a in 0..groups.len() {
        for b in a + 1..groups.len() {
            let (pa, pb) = (&comps[groups[a][0]].1, &comps[groups[b][0]].1);
            let (dab, dba) = (kl_divergence_x_marginals(pa, pb), kl_divergence_x_marginals(pb, pa));
            if !(dab > DIVERGENCE_FLOOR && dba > DIVERGENCE_FLOOR) {
                return Err(SourceError::RegimeUndetermined(format!(
                    "components {} and {} have X-marginals that are neither equal nor distinguishable \
                     (D = {dab:e}, {dba:e})",
                    groups[a][0], groups[b][0]
                )));
            }
        }
    }
    let value = groups
        .iter()
        .map(|g| {
            let weight: f64 = g.iter().map(|&i| comps[i].0).sum();
            let worst = g.iter().map(|&i| comps[i].1.conditional_entropy()).fold(0.0, f64::max);
            weight * worst
        })
        .sum();
    let regime = if groups.len() == 1 {
        MixtureRegime::Max
    } else if groups.iter().all(|g| g.len() == 1) {
        MixtureRegime::Average
    } else {
        MixtureRegime::Grouped
    };
    Ok((regime, value))
}

/// `(1/n)·H̄_S^ε` of a mixed source for `n = 1..=n_max` against the regime
/// prediction of [`mixture_prediction`].
pub fn mixture_sweep(
    spec: &MixtureSpec,
    eps: f64,
    n_max: usize,
    budget: &Budget,
    mc: &McConfig,
) -> Result<Vec<SweepResult>, SourceError> {
    let (_, prediction) = mixture_prediction(spec)?;
    over_n(n_max, |n| {
        let (v, se, method) = ohs_rate(spec, n, eps, budget, mc)?;
        Ok(SweepResult::new("mixture", n, v, prediction, se, method))
    })
}

/// Exact `(ε_tail, 1 - ε_tail)` quantiles of the normalised spectrum for
/// `n = 1..=n_max`, as `spectrum_lo` and `spectrum_hi` rows predicted by the
/// smallest and largest component conditional entropy.
pub fn spectrum_sweep(
    spec: &MixtureSpec,
    eps_tail: f64,
    n_max: usize,
    budget: &Budget,
) -> Result<Vec<SweepResult>, SourceError> {
    check_eps(eps_tail)?;
    let hs: Vec<f64> = spec.components().iter().map(|(_, p)| p.conditional_entropy()).collect();
    let lo_pred = hs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi_pred = hs.iter().copied().fold(0.0, f64::max);
    let rows = over_n(n_max, |n| {
        let s = block_spectrum(spec, n, budget)?.normalised(n);
        Ok([
            SweepResult::new("spectrum_lo", n, s.lower_quantile(eps_tail), lo_pred, 0.0, Method::Exact),
            SweepResult::new("spectrum_hi", n, s.upper_quantile(eps_tail), hi_pred, 0.0, Method::Exact),
        ])
    })?;
    Ok(rows.into_iter().flatten().collect())
}

/// The finite-`n` bracket of `(1/n)·Ĥ^ε` by spectrum quantiles.
#[derive(Clone, Debug, PartialEq)]
pub struct RcomReport {
    pub n: usize,
    pub epsilon: f64,
    /// `(1/n)·Ĥ^ε(Xⁿ|Yⁿ)`.
    pub value: f64,
    /// `sup{R : Pr{f/n < R} ≤ ε}`.
    pub q_lo: f64,
    /// `inf{R : Pr{f/n ≥ R} ≤ ε}`.
    pub q_hi: f64,
    /// `2/n + (q_hi - q_lo)`.
    pub slack: f64,
}

impl RcomReport {
    /// `(1 - 2ε)·q_lo`.
    pub fn lower(&self) -> f64 {
        (1.0 - 2.0 * self.epsilon) * self.q_lo
    }

    /// `(1 - 2ε)·q_lo ≤ value ≤ q_hi`. Both sides hold at every `n`: the
    /// cut prefix has mass at least `1 - ε`, of which at most ε lies below
    /// `q_lo`, and it is reached before any cell with `f/n ≥ q_hi`.
    pub fn holds(&self) -> bool {
        self.lower() <= self.value + TOL && self.value <= self.q_hi + TOL
    }

    /// The slack form `(1 - ε)·q_lo - slack ≤ value ≤ q_hi + slack`.
    pub fn slack_form_holds(&self) -> bool {
        (1.0 - self.epsilon) * self.q_lo - self.slack <= self.value + TOL
            && self.value <= self.q_hi + self.slack + TOL
    }

    pub fn check(&self) -> Result<(), SourceError> {
        if self.holds() {
            Ok(())
        } else {
            Err(SourceError::BoundViolated(format!(
                "(1-2ε)·q_lo ≤ Ĥ^ε/n ≤ q_hi fails: {self:?}"
            )))
        }
    }
}

/// Computes the bracket without asserting it.
pub fn rcom_report(spec: &MixtureSpec, eps: f64, n: usize, budget: &Budget) -> Result<RcomReport, SourceError> {
    let value = block_hhe(spec, n, eps, budget)? / n as f64;
    let s = block_spectrum(spec, n, budget)?.normalised(n);
    let (q_lo, q_hi) = if eps >= 1.0 {
        (0.0, 0.0)
    } else {
        (s.lower_quantile(eps), s.upper_quantile(eps))
    };
    let report = RcomReport {
        n,
        epsilon: eps,
        value,
        q_lo,
        q_hi,
        slack: 2.0 / n as f64 + (q_hi - q_lo).max(0.0),
    };
    Ok(report)
}

/// Computes and asserts the bracket, failing with `BoundViolated`.
pub fn rcom_bound_check(spec: &MixtureSpec, eps: f64, n: usize, budget: &Budget) -> Result<RcomReport, SourceError> {
    let report = rcom_report(spec, eps, n, budget)?;
    report.check()?;
    Ok(report)
}

/// The finite-`n` chain `H(Xⁿ|Yⁿ) ≤ H̄_S^ε(Xⁿ|Yⁿ) + γ + T`, where `T` is the
/// expected information density over the pairs with
/// `-log2 P(xⁿ|yⁿ) > h̄^ε(xⁿ) + γ`. All terms per symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketReport {
    pub n: usize,
    pub epsilon: f64,
    pub gamma: f64,
    pub entropy_rate: f64,
    pub ohs_rate: f64,
    pub tail_rate: f64,
}

impl BracketReport {
    pub fn holds(&self) -> bool {
        self.entropy_rate <= self.ohs_rate + self.gamma / self.n as f64 + self.tail_rate + TOL
    }
}

pub fn entropy_bracket(
    spec: &MixtureSpec,
    n: usize,
    eps: f64,
    gamma: f64,
    budget: &Budget,
) -> Result<BracketReport, SourceError> {
    let h = block_conditional_entropy(spec, n, budget)?;
    let (ohs, tail) = block_ohs_with_tail(spec, n, eps, gamma, budget)?;
    let nf = n as f64;
    Ok(BracketReport {
        n,
        epsilon: eps,
        gamma,
        entropy_rate: h / nf,
        ohs_rate: ohs / nf,
        tail_rate: tail / nf,
    })
}

/// One row of the encoder side-information diagnostic.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticRow {
    pub n: usize,
    pub eps_n: f64,
    /// `d_n = (1/n)·H(Xⁿ|Yⁿ) - (1/n)·H̄_S^{ε_n}(Xⁿ|Yⁿ)`.
    pub d_n: f64,
    pub bracket: BracketReport,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticReport {
    pub rows: Vec<DiagnosticRow>,
    pub gamma: f64,
}

impl DiagnosticReport {
    /// `d_n ≥ -γ` at the largest `n`: the finite-`n` indication that encoder
    /// side-information does not help.
    pub fn indicates_condition(&self) -> bool {
        self.rows.last().is_some_and(|r| r.d_n >= -self.gamma)
    }
}

/// Default vanishing sequence `ε_n = n^{-1/2}`.
pub fn default_eps_n(n: usize) -> f64 {
    1.0 / (n as f64).sqrt()
}

pub const DEFAULT_GAMMA: f64 = 0.02;

/// `d_n` for `n = 1..=n_max`. `eps_seq[n - 1]` is `ε_n`; when `None`,
/// [`default_eps_n`] is used.
pub fn encoder_sideinfo_diagnostic(
    spec: &MixtureSpec,
    eps_seq: Option<&[f64]>,
    n_max: usize,
    gamma: f64,
    budget: &Budget,
) -> Result<DiagnosticReport, SourceError> {
    if let Some(seq) = eps_seq {
        if seq.len() < n_max {
            return Err(SourceError::InvalidParameter(format!(
                "ε sequence has {} entries, need {n_max}",
                seq.len()
            )));
        }
    }
    let rows = over_n(n_max, |n| {
        let eps_n = eps_seq.map_or_else(|| default_eps_n(n), |s| s[n - 1]);
        let bracket = entropy_bracket(spec, n, eps_n, gamma, budget)?;
        Ok(DiagnosticRow {
            n,
            eps_n,
            d_n: bracket.entropy_rate - bracket.ohs_rate,
            bracket,
        })
    })?;
    Ok(DiagnosticReport { rows, gamma })
}

/// `(1/n)·H(Xⁿ|Yⁿ)` against its bound for each `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundednessReport {
    /// `(n, rate, bound)`.
    pub rows: Vec<(usize, f64, f64)>,
    pub max_rate: f64,
}

impl BoundednessReport {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|&(_, r, b)| r <= b + TOL)
    }
}

/// Bound on `(1/n)·H(Xⁿ|Yⁿ)`: `H(X|Y)` for an i.i.d. source, and
/// `Σ α_i H_i(X|Y) + (H(α) + (m - 1)·log2 e)/n` for an `m`-component
/// mixture.
pub fn entropy_rate_bound(spec: &MixtureSpec, n: usize) -> f64 {
    let comps = spec.components();
    let avg: f64 = comps.iter().map(|(w, p)| w * p.conditional_entropy()).sum();
    if comps.len() == 1 {
        return avg;
    }
    let extra = spec.weight_entropy() + (comps.len() - 1) as f64 * std::f64::consts::LOG2_E;
    avg + extra / n as f64
}

pub fn boundedness_check(spec: &MixtureSpec, n_max: usize, budget: &Budget) -> Result<BoundednessReport, SourceError> {
    let rows = over_n(n_max, |n| {
        let rate = block_conditional_entropy(spec, n, budget)? / n as f64;
        Ok((n, rate, entropy_rate_bound(spec, n)))
    })?;
    let max_rate = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(BoundednessReport { rows, max_rate })
}
