//! The random-binning Slepian-Wolf codec.
//!
//! Each `x` is sent as `γ(ℓ̃(x)) ∥ bin(x)`, where `γ` is the Elias gamma code,
//! `ℓ̃(x) = ⌈h̄^{ε_x}(x) + δ⌉` and `bin(x)` is an `ℓ̃(x)`-bit index drawn
//! uniformly at random. Knowing `y`, the decoder reads `l` and the bin index
//! `m`, then looks for the unique `x` with `ℓ̃(x) = l`, `bin(x) = m` and
//! `-log2 P_{X|Y}(x|y) ≤ l - δ/2`. Zero or several candidates are failures.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bits::{elias_gamma_decode, elias_gamma_encode};
use super::{Bitstring, CodeError};
use crate::dist::JointPmf;
use crate::entropy::ohe;

/// Slack on the typical-set threshold, absorbing rounding in `log2`.
const THRESHOLD_TOL: f64 = 1e-12;

pub const CODEC_SCHEMA_VERSION: u32 = 1;

/// Per-symbol error budgets `ε_x` and their aggregate `Σ_x P_X(x)·ε_x`.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonProfile {
    per_symbol: Vec<f64>,
    aggregate: f64,
}

impl EpsilonProfile {
    pub fn new(pmf: &JointPmf, per_symbol: Vec<f64>) -> Result<Self, CodeError> {
        if per_symbol.len() != pmf.nx() {
            return Err(CodeError::ProfileShape {
                got: per_symbol.len(),
                expected: pmf.nx(),
            });
        }
        if let Some(&bad) = per_symbol.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return Err(CodeError::InvalidEpsilon(bad));
        }
        let aggregate = per_symbol.iter().zip(pmf.x_marginal()).map(|(e, p)| e * p).sum();
        Ok(EpsilonProfile {
            per_symbol,
            aggregate,
        })
    }

    pub fn uniform(pmf: &JointPmf, eps: f64) -> Result<Self, CodeError> {
        Self::new(pmf, vec![eps; pmf.nx()])
    }

    pub fn per_symbol(&self) -> &[f64] {
        &self.per_symbol
    }

    pub fn get(&self, x: usize) -> f64 {
        self.per_symbol[x]
    }

    /// `Σ_x P_X(x)·ε_x`.
    pub fn aggregate(&self) -> f64 {
        self.aggregate
    }
}

/// Outcome of decoding one codeword.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodeOutcome {
    Decoded(usize),
    NoCandidate,
    Ambiguous(usize),
}

impl DecodeOutcome {
    pub fn symbol(self) -> Option<usize> {
        match self {
            DecodeOutcome::Decoded(x) => Some(x),
            _ => None,
        }
    }
}

/// A built random-binning code.
#[derive(Clone, Debug, PartialEq)]
pub struct SWBinCode {
    lengths: Vec<u64>,
    bins: Vec<Bitstring>,
    codewords: Vec<Bitstring>,
    ohe: Vec<f64>,
    delta: f64,
    seed: u64,
    profile: EpsilonProfile,
}

/// `ℓ̃(x) = ⌈h̄^{ε_x}(x) + δ⌉` for every `x`, together with `h̄^{ε_x}(x)`.
fn length_function(pmf: &JointPmf, profile: &EpsilonProfile, delta: f64) -> (Vec<u64>, Vec<f64>) {
    let ohe_values: Vec<f64> = (0..pmf.nx())
        .map(|x| ohe(pmf, x, profile.get(x)).expect("validated profile").value)
        .collect();
    let lengths = ohe_values.iter().map(|h| ((h + delta).ceil() as u64).max(1)).collect();
    (lengths, ohe_values)
}

/// Largest accepted slack. Bin streams are keyed by the low 16 bits of the
/// bin length, so lengths must stay well below 2^16.
pub const MAX_DELTA: f64 = 4096.0;

/// `l` uniform bits from the generator keyed by `(seed, x, l)`.
fn draw_bin(seed: u64, x: usize, l: u64) -> Bitstring {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(((x as u64) << 16) | (l & 0xFFFF));
    let mut bits = Vec::with_capacity(l as usize);
    while bits.len() < l as usize {
        let word = rng.next_u64();
        let take = (l as usize - bits.len()).min(64);
        bits.extend((0..take).map(|i| word >> (63 - i) & 1 == 1));
    }
    Bitstring::from_bits(bits)
}

/// Builds the code for a per-symbol budget, slack `δ > 0` and seed.
pub fn build_sw_code(
    pmf: &JointPmf,
    profile: &EpsilonProfile,
    delta: f64,
    seed: u64,
) -> Result<SWBinCode, CodeError> {
    if !(delta > 0.0 && delta <= MAX_DELTA) {
        return Err(CodeError::InvalidDelta(delta));
    }
    if profile.per_symbol.len() != pmf.nx() {
        return Err(CodeError::ProfileShape {
            got: profile.per_symbol.len(),
            expected: pmf.nx(),
        });
    }
    let (lengths, ohe) = length_function(pmf, profile, delta);
    Ok(SWBinCode::assemble(lengths, ohe, delta, seed, profile.clone()))
}

impl SWBinCode {
    fn assemble(lengths: Vec<u64>, ohe: Vec<f64>, delta: f64, seed: u64, profile: EpsilonProfile) -> Self {
        let bins: Vec<Bitstring> =
            lengths.iter().enumerate().map(|(x, &l)| draw_bin(seed, x, l)).collect();
        let codewords = lengths
            .iter()
            .zip(&bins)
            .map(|(&l, b)| elias_gamma_encode(l).concat(b))
            .collect();
        SWBinCode {
            lengths,
            bins,
            codewords,
            ohe,
            delta,
            seed,
            profile,
        }
    }

    /// The same length function with bins redrawn from another seed.
    pub fn reseeded(&self, seed: u64) -> Self {
        Self::assemble(self.lengths.clone(), self.ohe.clone(), self.delta, seed, self.profile.clone())
    }

    pub fn nx(&self) -> usize {
        self.lengths.len()
    }

    /// `ℓ̃(x)`, the bin-index length.
    pub fn bin_length(&self, x: usize) -> u64 {
        self.lengths[x]
    }

    pub fn bin(&self, x: usize) -> &Bitstring {
        &self.bins[x]
    }

    /// The full codeword `γ(ℓ̃(x)) ∥ bin(x)`.
    pub fn codeword(&self, x: usize) -> &Bitstring {
        &self.codewords[x]
    }

    /// Total codeword length `ℓ(x)` in bits.
    pub fn codeword_len(&self, x: usize) -> usize {
        self.codewords[x].len()
    }

    /// `h̄^{ε_x}(x)` used to size `x`.
    pub fn ohe(&self, x: usize) -> f64 {
        self.ohe[x]
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn profile(&self) -> &EpsilonProfile {
        &self.profile
    }

    /// `h̄ + δ + 2·log2(h̄ + δ + 1) + 3`, the guaranteed ceiling on `ℓ(x)`.
    pub fn length_bound(&self, x: usize) -> f64 {
        let h = self.ohe[x] + self.delta;
        h + 2.0 * (h + 1.0).log2() + 3.0
    }

    /// Checks `ℓ(x) ≤ length_bound(x)` for every `x`.
    pub fn check_length_bound(&self) -> Result<(), CodeError> {
        for x in 0..self.nx() {
            let (len, bound) = (self.codeword_len(x) as f64, self.length_bound(x));
            if len > bound {
                return Err(CodeError::InvalidCode(format!(
                    "codeword of x={x} has {len} bits, above the bound {bound}"
                )));
            }
        }
        Ok(())
    }

    /// `(x, y) ∈ T(l)`, i.e. `-log2 P_{X|Y}(x|y) ≤ l - δ/2`.
    pub fn in_typical_set(&self, pmf: &JointPmf, x: usize, y: usize, l: u64) -> bool {
        pmf.p(x, y) > 0.0 && pmf.info(x, y) <= l as f64 - self.delta / 2.0 + THRESHOLD_TOL
    }

    /// Checks `|{x : (x,y) ∈ T(l)}| ≤ 2^{l - δ/2}` for every `y` and every
    /// length in use.
    pub fn check_typical_set_sizes(&self, pmf: &JointPmf) -> Result<(), CodeError> {
        let mut used: Vec<u64> = self.lengths.clone();
        used.sort_unstable();
        used.dedup();
        for y in 0..pmf.ny() {
            for &l in &used {
                let count = (0..pmf.nx()).filter(|&x| self.in_typical_set(pmf, x, y, l)).count();
                let cap = 2f64.powf(l as f64 - self.delta / 2.0 + THRESHOLD_TOL);
                if count as f64 > cap {
                    return Err(CodeError::InvalidCode(format!(
                        "|T({l})| under y={y} is {count}, above {cap}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Distinct codewords, for Kraft and prefix checks.
    pub fn codebook(&self) -> Vec<&Bitstring> {
        let mut words: Vec<&Bitstring> = self.codewords.iter().collect();
        words.sort();
        words.dedup();
        words
    }

    fn candidates(&self, pmf: &JointPmf, l: u64, m: &Bitstring, y: usize) -> DecodeOutcome {
        let mut found = None;
        let mut count = 0;
        for x in 0..self.nx() {
            if self.lengths[x] == l && &self.bins[x] == m && self.in_typical_set(pmf, x, y, l) {
                found.get_or_insert(x);
                count += 1;
            }
        }
        match (count, found) {
            (1, Some(x)) => DecodeOutcome::Decoded(x),
            (0, _) => DecodeOutcome::NoCandidate,
            _ => DecodeOutcome::Ambiguous(count),
        }
    }

    /// Serialisable description from which the code is rebuilt bit-exactly.
    pub fn description(&self, pmf: &JointPmf) -> CodecDescription {
        CodecDescription {
            schema_version: CODEC_SCHEMA_VERSION,
            seed: self.seed,
            delta: self.delta,
            budget: self.profile.per_symbol.clone(),
            length_fn: pmf.x_labels().iter().cloned().zip(self.lengths.iter().copied()).collect(),
        }
    }

    /// Rebuilds a code from its description, checking that the recorded
    /// length function matches the one implied by the budget.
    pub fn from_description(pmf: &JointPmf, desc: &CodecDescription) -> Result<Self, CodeError> {
        if desc.schema_version != CODEC_SCHEMA_VERSION {
            return Err(CodeError::InvalidCode(format!(
                "unsupported codec schema version {}",
                desc.schema_version
            )));
        }
        let profile = EpsilonProfile::new(pmf, desc.budget.clone())?;
        let code = build_sw_code(pmf, &profile, desc.delta, desc.seed)?;
        let expected: Vec<(String, u64)> =
            pmf.x_labels().iter().cloned().zip(code.lengths.iter().copied()).collect();
        if expected != desc.length_fn {
            return Err(CodeError::InvalidCode(
                "recorded length function does not match the pmf and budget".into(),
            ));
        }
        Ok(code)
    }
}

/// JSON form of a codec.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodecDescription {
    pub schema_version: u32,
    pub seed: u64,
    pub delta: f64,
    /// `ε_x` in x-alphabet order.
    pub budget: Vec<f64>,
    /// `(x label, ℓ̃(x))` pairs.
    pub length_fn: Vec<(String, u64)>,
}

pub fn sw_encode(code: &SWBinCode, x: usize) -> Bitstring {
    code.codeword(x).clone()
}

/// Decodes one codeword from the front of `stream` under side-information
/// `y`, returning the outcome and the number of bits consumed.
pub fn sw_decode(
    code: &SWBinCode,
    pmf: &JointPmf,
    stream: &[bool],
    y: usize,
) -> Result<(DecodeOutcome, usize), CodeError> {
    let (l, head) = elias_gamma_decode(stream)?;
    let end = head
        .checked_add(l as usize)
        .filter(|&e| e <= stream.len())
        .ok_or(CodeError::MalformedHeader("truncated bin index"))?;
    let m = Bitstring::from_bits(stream[head..end].to_vec());
    Ok((code.candidates(pmf, l, &m, y), end))
}

/// Exact error probability: the mass of all `(x, y)` that the decoder fails
/// on.
pub fn sw_exact_error(pmf: &JointPmf, code: &SWBinCode) -> f64 {
    let mut error = 0.0;
    for x in 0..pmf.nx() {
        for y in 0..pmf.ny() {
            let p = pmf.p(x, y);
            if p > 0.0 && code.candidates(pmf, code.lengths[x], &code.bins[x], y) != DecodeOutcome::Decoded(x) {
                error += p;
            }
        }
    }
    error
}

/// Concatenates the codewords of `symbols`. The stream needs no framing:
/// every codeword is self-delimiting.
pub fn encode_stream(code: &SWBinCode, symbols: &[usize]) -> Bitstring {
    let mut out = Bitstring::new();
    for &x in symbols {
        out.extend_from(code.codeword(x));
    }
    out
}

/// Decodes one codeword per side-information symbol. The stream must hold
/// exactly `side_info.len()` codewords.
pub fn decode_stream(
    code: &SWBinCode,
    pmf: &JointPmf,
    stream: &Bitstring,
    side_info: &[usize],
) -> Result<Vec<(DecodeOutcome, usize)>, CodeError> {
    let bits = stream.bits();
    let mut pos = 0;
    let mut out = Vec::with_capacity(side_info.len());
    for (i, &y) in side_info.iter().enumerate() {
        if pos == bits.len() {
            return Err(CodeError::StreamLengthMismatch { x: i, y: side_info.len() });
        }
        let (outcome, used) = sw_decode(code, pmf, &bits[pos..], y)?;
        out.push((outcome, used));
        pos += used;
    }
    if pos != bits.len() {
        return Err(CodeError::MalformedStream(format!(
            "{} bits left after {} codewords",
            bits.len() - pos,
            side_info.len()
        )));
    }
    Ok(out)
}

/// Mean and standard error of the exact error over a range of seeds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeedAverage {
    pub seeds: usize,
    pub mean: f64,
    pub stderr: f64,
}

/// Exact error averaged over the seeds `base_seed, base_seed + 1, …`.
/// Per-seed errors are summed in seed order, so the result does not depend
/// on the thread count.
pub fn seed_averaged_error(code: &SWBinCode, pmf: &JointPmf, seeds: usize, base_seed: u64) -> SeedAverage {
    let errors: Vec<f64> = (0..seeds as u64)
        .into_par_iter()
        .map(|i| sw_exact_error(pmf, &code.reseeded(base_seed.wrapping_add(i))))
        .collect();
    let n = errors.len().max(1) as f64;
    let mean = errors.iter().sum::<f64>() / n;
    let var = if errors.len() > 1 {
        errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    SeedAverage {
        seeds,
        mean,
        stderr: (var / n).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::prefix::{check_prefix_free, kraft_check};

    #[test]
    fn deterministic_source_code() {
        let pmf = JointPmf::identity(4).unwrap();
        let profile = EpsilonProfile::uniform(&pmf, 0.1).unwrap();
        let code = build_sw_code(&pmf, &profile, 2.0, 7).unwrap();
        for x in 0..4 {
            assert_eq!(code.bin_length(x), 2);
            assert_eq!(code.codeword_len(x), 5);
            assert!(code.length_bound(x) > 8.16 && code.length_bound(x) < 8.17);
            for y in 0..4 {
                let (out, used) = sw_decode(&code, &pmf, code.codeword(x).bits(), y).unwrap();
                assert_eq!(used, 5);
                if x == y {
                    assert_eq!(out, DecodeOutcome::Decoded(x));
                }
            }
        }
        assert_eq!(sw_exact_error(&pmf, &code), 0.0);
        code.check_length_bound().unwrap();
        code.check_typical_set_sizes(&pmf).unwrap();
    }

    #[test]
    fn dsbs_lengths() {
        let pmf = JointPmf::dsbs(0.25).unwrap();
        let profile = EpsilonProfile::uniform(&pmf, 0.1).unwrap();
        let code = build_sw_code(&pmf, &profile, 4.0, 1).unwrap();
        for x in 0..2 {
            assert_eq!(code.ohe(x), 2.0);
            assert_eq!(code.bin_length(x), 6);
            assert_eq!(code.codeword_len(x), 11);
            assert!((code.length_bound(x) - (9.0 + 2.0 * 7f64.log2())).abs() < 1e-12);
        }
        code.check_length_bound().unwrap();
    }

    #[test]
    fn unit_budget_gives_delta_bins() {
        let pmf = JointPmf::dsbs(0.25).unwrap();
        let profile = EpsilonProfile::uniform(&pmf, 1.0).unwrap();
        let code = build_sw_code(&pmf, &profile, 3.5, 1).unwrap();
        assert_eq!(code.bin_length(0), 4);
        assert_eq!(code.bin_length(1), 4);
    }

    #[test]
    fn failures_outside_typical_set_and_on_collisions() {
        let pmf = JointPmf::dsbs(0.25).unwrap();
        let profile = EpsilonProfile::uniform(&pmf, 0.0).unwrap();
        let code = build_sw_code(&pmf, &profile, 1.0, 3).unwrap();
        // h̄^0 = 2, ℓ̃ = 3; threshold 2.5 admits both x under either y, so the
        // outcome hinges on the two bins.
        let collide = code.bin(0) == code.bin(1);
        for x in 0..2 {
            let (out, _) = sw_decode(&code, &pmf, code.codeword(x).bits(), 0).unwrap();
            if collide {
                assert_eq!(out, DecodeOutcome::Ambiguous(2));
            } else {
                assert_eq!(out, DecodeOutcome::Decoded(x));
            }
        }
        // δ small: 0.415 ≤ ⌈0.415 + 0.1⌉ - 0.05 holds but 2 ≤ 0.95 does not
        let profile = EpsilonProfile::uniform(&pmf, 0.3).unwrap();
        let code = build_sw_code(&pmf, &profile, 0.1, 3).unwrap();
        assert_eq!(code.bin_length(0), 1);
        let (out, _) = sw_decode(&code, &pmf, code.codeword(0).bits(), 1).unwrap();
        assert_ne!(out, DecodeOutcome::Decoded(0));
    }

    #[test]
    fn codebook_is_prefix_free_and_kraft() {
        let pmf = JointPmf::dsbs(0.1).unwrap();
        for seed in 0..20 {
            let profile = EpsilonProfile::new(&pmf, vec![0.05, 0.2]).unwrap();
            let code = build_sw_code(&pmf, &profile, 2.0, seed).unwrap();
            check_prefix_free(code.codebook()).unwrap();
            let lengths: Vec<u32> = code.codebook().iter().map(|w| w.len() as u32).collect();
            kraft_check(&lengths).unwrap();
        }
    }

    #[test]
    fn description_round_trip() {
        let pmf = JointPmf::dsbs(0.1).unwrap();
        let profile = EpsilonProfile::uniform(&pmf, 0.2).unwrap();
        let code = build_sw_code(&pmf, &profile, 2.5, 0x5E1F00D).unwrap();
        let json = serde_json::to_string(&code.description(&pmf)).unwrap();
        let back: CodecDescription = serde_json::from_str(&json).unwrap();
        assert_eq!(SWBinCode::from_description(&pmf, &back).unwrap(), code);
        let mut bad = back.clone();
        bad.length_fn[0].1 += 1;
        assert!(SWBinCode::from_description(&pmf, &bad).is_err());
    }

    #[test]
    fn determinism_and_reseeding() {
        let pmf = JointPmf::dsbs(0.25).unwrap();
        let profile = EpsilonProfile::uniform(&pmf, 0.1).unwrap();
        let a = build_sw_code(&pmf, &profile, 2.0, 11).unwrap();
        let b = build_sw_code(&pmf, &profile, 2.0, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.reseeded(12), build_sw_code(&pmf, &profile, 2.0, 12).unwrap());
        let avg1 = seed_averaged_error(&a, &pmf, 50, 0);
        let avg2 = seed_averaged_error(&a, &pmf, 50, 0);
        assert_eq!(avg1, avg2);
    }

    #[test]
    fn truncated_stream() {
        let pmf = JointPmf::dsbs(0.25).unwrap();
        let profile = EpsilonProfile::uniform(&pmf, 0.1).unwrap();
        let code = build_sw_code(&pmf, &profile, 2.0, 11).unwrap();
        let w = code.codeword(0).bits();
        assert!(matches!(
            sw_decode(&code, &pmf, &w[..w.len() - 1], 0),
            Err(CodeError::MalformedHeader(_))
        ));
    }

    #[test]
    fn stream_round_trip() {
        let pmf = JointPmf::identity(3).unwrap();
        let profile = EpsilonProfile::uniform(&pmf, 0.0).unwrap();
        let code = build_sw_code(&pmf, &profile, 2.0, 5).unwrap();
        let xs: Vec<usize> = (0..30).map(|i| i % 3).collect();
        let bits = encode_stream(&code, &xs);
        assert_eq!(bits.len(), 30 * 5);
        let out = decode_stream(&code, &pmf, &bits, &xs).unwrap();
        assert!(out.iter().zip(&xs).all(|(o, &x)| o.0 == DecodeOutcome::Decoded(x) && o.1 == 5));
        assert!(matches!(
            decode_stream(&code, &pmf, &bits, &[0; 31]),
            Err(CodeError::StreamLengthMismatch { .. })
        ));
        assert!(decode_stream(&code, &pmf, &bits, &[0; 29]).is_err());
        assert!(decode_stream(&code, &pmf, &Bitstring::new(), &[]).unwrap().is_empty());
    }

    #[test]
    fn profile_validation() {
        let pmf = JointPmf::dsbs(0.25).unwrap();
        assert!(EpsilonProfile::new(&pmf, vec![0.1]).is_err());
        assert!(EpsilonProfile::new(&pmf, vec![0.1, 1.5]).is_err());
        let p = EpsilonProfile::new(&pmf, vec![0.1, 0.3]).unwrap();
        assert!((p.aggregate() - 0.2).abs() < 1e-12);
        assert!(build_sw_code(&pmf, &p, 0.0, 1).is_err());
    }
}
