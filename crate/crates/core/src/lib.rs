//! One-shot and finite-blocklength source coding with side-information.
//!
//! The crate is organised bottom-up:
//!
//! - [`dist`]: finite joint distributions `P_XY`, their i.i.d. extensions and
//!   sequence-level mixtures, plus JSON/TSV ingestion.
//! - [`entropy`]: the one-shot quantities used by the coding theorems: the
//!   ε-conditional entropy `H^ε(X|Y)` (exhaustive), its additive relaxation
//!   `H̃^ε` (exhaustive and fractional), the sorting surrogate `Ĥ^ε`, the
//!   per-symbol tail quantile `h̄^ε(x)` and its average `H̄_S^ε`.
//! - [`codes`]: bit-exact codes. Flag + Shannon codes for common
//!   side-information, Elias gamma headers, random-binning Slepian-Wolf
//!   codes, and converse certificates for arbitrary prefix codes.
//! - [`oracle`]: exhaustive optimal ε-codes with common side-information and
//!   the verifiers that tie everything together.
//! - [`sources`]: blocklength-`n` sweeps for i.i.d. and mixed sources, both
//!   by full enumeration and by exact type-class computation.
//! - [`cli`]: the batch front end used by the `sideinfo` binary.
//!
//! All logarithms are base 2 and all lengths are in bits.
//!
//! ```
//! use sideinfo::dist::JointPmf;
//! use sideinfo::entropy;
//!
//! let pmf = JointPmf::dsbs(0.25).unwrap();
//! let (value, ranking) = entropy::hhe(&pmf, 0.2);
//! assert!((value - 0.561278).abs() < 1e-6);
//! assert_eq!(ranking.i_star, 3);
//! ```

pub mod budget;
pub mod cli;
pub mod codes;
pub mod dist;
pub mod entropy;
pub mod oracle;
pub mod sources;

pub use budget::Budget;
pub use dist::{JointPmf, MixtureSpec};

/// Absolute tolerance for probability equality checks (normalisation,
/// marginal comparisons) and for the bound verifiers.
pub const TOL: f64 = 1e-9;

/// Slack used when comparing an accumulated mass against a target `1 - ε`
/// or a tail mass against ε.
///
/// Validated pmfs may sum to `1 ± TOL`, so the slack matches [`TOL`]. Every
/// routine that decides ε-feasibility uses this same predicate.
pub const MASS_TOL: f64 = TOL;

/// Seed used by every randomised routine when none is given.
pub const DEFAULT_SEED: u64 = 0x5E1F00D;

/// Returns true when `mass` meets the requirement `mass ≥ 1 - eps`.
#[inline]
pub fn meets_mass(mass: f64, eps: f64) -> bool {
    mass >= 1.0 - eps - MASS_TOL
}

/// Binary entropy `h2(p)` in bits.
pub fn h2(p: f64) -> f64 {
    xlog2_inv(p) + xlog2_inv(1.0 - p)
}

/// `p · log2(1/p)` with the convention `0 · log(1/0) = 0`.
#[inline]
pub fn xlog2_inv(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}
