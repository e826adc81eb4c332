//! Converse certificates for arbitrary Slepian-Wolf codes.
//!
//! Given any length function `ℓ(x)` and `δ > 0`, set
//! `ε_x = Pr{-log2 P_{X|Y}(x|Y) > ℓ(x) + δ | X = x}`. Then
//! `ℓ(x) ≥ h̄^{ε_x}(x) - δ` for every `x`, and whenever the lengths come from
//! a prefix code with error probability `e`, `Σ_x P_X(x)·ε_x ≤ e + 2^{-δ}`.

use super::sw::EpsilonProfile;
use super::CodeError;
use crate::dist::JointPmf;
use crate::entropy::ohe;
use crate::TOL;

/// `ε_x = Σ_{y : -log2 P_{X|Y}(x|y) > ℓ(x) + δ} P_{Y|X}(y|x)`.
pub fn converse_extract(pmf: &JointPmf, lengths: &[f64], delta: f64) -> Result<EpsilonProfile, CodeError> {
    if !(delta > 0.0) {
        return Err(CodeError::InvalidDelta(delta));
    }
    if lengths.len() != pmf.nx() {
        return Err(CodeError::ProfileShape {
            got: lengths.len(),
            expected: pmf.nx(),
        });
    }
    let per_symbol = (0..pmf.nx())
        .map(|x| {
            let tail: f64 = (0..pmf.ny())
                .filter(|&y| pmf.p(x, y) > 0.0 && pmf.info(x, y) > lengths[x] + delta)
                .map(|y| pmf.cond_y_given_x(y, x))
                .sum();
            tail.clamp(0.0, 1.0)
        })
        .collect();
    EpsilonProfile::new(pmf, per_symbol)
}

/// Both converse inequalities evaluated for one code.
#[derive(Clone, Debug, PartialEq)]
pub struct ConverseCertificate {
    pub profile: EpsilonProfile,
    pub delta: f64,
    /// `ℓ(x)`.
    pub lengths: Vec<f64>,
    /// `h̄^{ε_x}(x)`.
    pub ohe: Vec<f64>,
    /// Exact error probability of the code.
    pub error: f64,
    /// `Pr{-log2 P_{X|Y}(X|Y) > ℓ(X) + δ}`, which equals the profile
    /// aggregate.
    pub tail: f64,
}

impl ConverseCertificate {
    /// `ℓ(x) ≥ h̄^{ε_x}(x) - δ` for every `x`.
    pub fn lengths_hold(&self) -> bool {
        self.lengths.iter().zip(&self.ohe).all(|(l, h)| *l >= h - self.delta - TOL)
    }

    /// `Σ_x P_X(x)·ε_x ≤ error + 2^{-δ}`, equivalently
    /// `error ≥ tail - 2^{-δ}`.
    pub fn aggregate_holds(&self) -> bool {
        self.profile.aggregate() <= self.error + 2f64.powf(-self.delta) + TOL
    }

    pub fn check(&self) -> Result<(), String> {
        if let Some(x) = (0..self.lengths.len()).find(|&x| self.lengths[x] < self.ohe[x] - self.delta - TOL) {
            return Err(format!(
                "ℓ({x}) = {} < h̄^ε_x(x) - δ = {}",
                self.lengths[x],
                self.ohe[x] - self.delta
            ));
        }
        if !self.aggregate_holds() {
            return Err(format!(
                "Σ P_X ε_x = {} > error + 2^-δ = {}",
                self.profile.aggregate(),
                self.error + 2f64.powf(-self.delta)
            ));
        }
        Ok(())
    }
}

/// Extracts the profile for a code with lengths `ℓ(x)` and exact error
/// `error`, and evaluates both inequalities.
pub fn certify(pmf: &JointPmf, lengths: &[f64], delta: f64, error: f64) -> Result<ConverseCertificate, CodeError> {
    let profile = converse_extract(pmf, lengths, delta)?;
    let ohe_values = (0..pmf.nx())
        .map(|x| ohe(pmf, x, profile.get(x)).expect("validated profile").value)
        .collect();
    let tail = (0..pmf.nx())
        .flat_map(|x| (0..pmf.ny()).map(move |y| (x, y)))
        .filter(|&(x, y)| pmf.p(x, y) > 0.0 && pmf.info(x, y) > lengths[x] + delta)
        .map(|(x, y)| pmf.p(x, y))
        .sum();
    Ok(ConverseCertificate {
        profile,
        delta,
        lengths: lengths.to_vec(),
        ohe: ohe_values,
        error,
        tail,
    })
}

/// Checks `error ≥ Pr{-log2 P_{X|Y}(X|Y) > ℓ(X) + δ} - 2^{-δ}` directly.
pub fn lemma5_check(pmf: &JointPmf, lengths: &[f64], delta: f64, error: f64) -> Result<(), CodeError> {
    let cert = certify(pmf, lengths, delta, error)?;
    if error + TOL < cert.tail - 2f64.powf(-delta) {
        return Err(CodeError::InvalidCode(format!(
            "error {error} below tail {} - 2^-{delta}",
            cert.tail
        )));
    }
    Ok(())
}

/// Exact error of the best decoder for an encoder that sends `x` as
/// codeword number `assignment[x]`: symbols sharing a codeword are
/// indistinguishable, and the decoder picks the most likely one given `y`.
pub fn map_decoder_error(pmf: &JointPmf, assignment: &[usize]) -> f64 {
    let groups = assignment.iter().copied().max().map_or(0, |m| m + 1);
    let mut correct = 0.0;
    for y in 0..pmf.ny() {
        let mut best = vec![0.0f64; groups];
        for (x, &g) in assignment.iter().enumerate() {
            best[g] = best[g].max(pmf.p(x, y));
        }
        correct += best.iter().sum::<f64>();
    }
    (1.0 - correct).max(0.0)
}
