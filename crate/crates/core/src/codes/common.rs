//! Codes with side-information available at both encoder and decoder.

use std::collections::BTreeMap;

use super::prefix::{canonical_codewords, check_prefix_free, kraft_check, shannon_lengths};
use super::{Bitstring, CodeError};
use crate::dist::JointPmf;
use crate::entropy::RestrictedSet;

/// An encoder `φ(x|y)` with per-`y` decoding tables.
///
/// The encoder need not be one-to-one: several `x` may share a codeword
/// under the same `y`, in which case the decoder reproduces at most one of
/// them.
#[derive(Clone, Debug, PartialEq)]
pub struct CommonSICode {
    nx: usize,
    ny: usize,
    /// Row-major `(x, y)` codewords.
    encode: Vec<Bitstring>,
    decode: Vec<BTreeMap<Bitstring, usize>>,
    correct: RestrictedSet,
}

impl CommonSICode {
    /// Builds a code from explicit tables and validates it.
    ///
    /// `encode` is row-major over `(x, y)`; `decode[y]` must map every
    /// codeword used under `y` to an `x`. Each `C(y)` must be prefix-free,
    /// satisfy Kraft, and use the empty codeword only as its sole member.
    pub fn from_tables(
        pmf: &JointPmf,
        encode: Vec<Bitstring>,
        decode: Vec<BTreeMap<Bitstring, usize>>,
    ) -> Result<Self, CodeError> {
        let (nx, ny) = (pmf.nx(), pmf.ny());
        if encode.len() != nx * ny || decode.len() != ny {
            return Err(CodeError::InvalidCode(format!(
                "expected {} codewords and {ny} decoders, got {} and {}",
                nx * ny,
                encode.len(),
                decode.len()
            )));
        }
        let mut correct = Vec::new();
        for (y, table) in decode.iter().enumerate() {
            let words: Vec<&Bitstring> = (0..nx).map(|x| &encode[x * ny + y]).collect();
            let mut distinct = words.clone();
            distinct.sort();
            distinct.dedup();
            if distinct.len() > 1 && distinct[0].is_empty() {
                return Err(CodeError::EmptyCodeword);
            }
            check_prefix_free(distinct.iter().copied())?;
            let lengths: Vec<u32> = distinct.iter().map(|w| w.len() as u32).collect();
            kraft_check(&lengths)?;
            for (x, w) in words.iter().enumerate() {
                match table.get(*w) {
                    Some(&d) if d >= nx => {
                        return Err(CodeError::InvalidCode(format!("decoder for y={y} emits x={d}")))
                    }
                    Some(&d) if d == x => correct.push((x, y)),
                    Some(_) => {}
                    None => {
                        return Err(CodeError::InvalidCode(format!(
                            "codeword {w} under y={y} has no decoding"
                        )))
                    }
                }
            }
        }
        Ok(CommonSICode {
            nx,
            ny,
            encode,
            decode,
            correct: RestrictedSet::new(pmf, correct),
        })
    }

    /// The zero-rate code: every `(x, y)` maps to the empty codeword and the
    /// decoder guesses the most likely `x` under `y` (lowest index on ties).
    pub fn silent(pmf: &JointPmf) -> Self {
        let (nx, ny) = (pmf.nx(), pmf.ny());
        let decode = (0..ny)
            .map(|y| BTreeMap::from([(Bitstring::new(), argmax_x(pmf, y, |_| true))]))
            .collect();
        Self::from_tables(pmf, vec![Bitstring::new(); nx * ny], decode)
            .expect("the silent code is valid")
    }

    pub fn codeword(&self, x: usize, y: usize) -> &Bitstring {
        &self.encode[x * self.ny + y]
    }

    /// The cells the decoder reproduces.
    pub fn correct_set(&self) -> &RestrictedSet {
        &self.correct
    }

    /// Distinct codewords `C(y)`.
    pub fn codebook(&self, y: usize) -> Vec<&Bitstring> {
        let mut words: Vec<&Bitstring> = (0..self.nx).map(|x| self.codeword(x, y)).collect();
        words.sort();
        words.dedup();
        words
    }

    /// `Σ_{c ∈ C(y)} 2^{-|c|}`.
    pub fn kraft_sum(&self, y: usize) -> f64 {
        let lengths: Vec<u32> = self.codebook(y).iter().map(|w| w.len() as u32).collect();
        super::prefix::kraft_sum(&lengths)
    }

    /// Decodes one codeword from the front of `stream` under side-information
    /// `y`, returning the reproduced `x` and the number of bits consumed.
    pub fn decode_one(&self, stream: &[bool], y: usize) -> Result<(usize, usize), CodeError> {
        let table = &self.decode[y];
        let mut probe = Bitstring::new();
        for len in 0..=stream.len() {
            if let Some(&x) = table.get(&probe) {
                return Ok((x, len));
            }
            if len < stream.len() {
                probe.push(stream[len]);
            }
        }
        Err(CodeError::MalformedStream(format!("no codeword of C(y={y}) prefixes the stream")))
    }
}

fn argmax_x(pmf: &JointPmf, y: usize, admissible: impl Fn(usize) -> bool) -> usize {
    let mut best: Option<usize> = None;
    for x in (0..pmf.nx()).filter(|&x| admissible(x)) {
        if best.map_or(true, |b| pmf.p(x, y) > pmf.p(b, y)) {
            best = Some(x);
        }
    }
    best.unwrap_or(0)
}

/// What the decoder outputs on the flag `1`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FlagFallback {
    /// The most likely member of `A` under `y`, so every cell outside `A`
    /// is a decoding error and the error is exactly `1 - P_XY(A)`. When the
    /// section is empty the most likely `x` overall is used.
    #[default]
    Miss,
    /// The most likely `x` outside `A` under `y`, which can only lower the
    /// error.
    Recover,
}

/// The flag + Shannon code for a restriction `A`, with [`FlagFallback::Miss`].
///
/// For `(x, y) ∈ A` with `P_XY(x,y) > 0` the codeword is `0` followed by the
/// canonical Shannon codeword for `Q^A(x|y)`. Every other `x` under `y`
/// shares the codeword `1`. Zero-mass members of `A` are sent with the flag
/// `1`; this changes neither the error probability nor the average length.
pub fn build_flag_code(pmf: &JointPmf, set: &RestrictedSet) -> Result<CommonSICode, CodeError> {
    build_flag_code_with(pmf, set, FlagFallback::Miss)
}

pub fn build_flag_code_with(
    pmf: &JointPmf,
    set: &RestrictedSet,
    fallback: FlagFallback,
) -> Result<CommonSICode, CodeError> {
    if set.mass() <= 0.0 {
        return Err(CodeError::EmptyRestriction);
    }
    let (nx, ny) = (pmf.nx(), pmf.ny());
    let flag_on: Bitstring = "1".parse().expect("literal");
    let mut encode = vec![flag_on.clone(); nx * ny];
    let mut decode = Vec::with_capacity(ny);
    for y in 0..ny {
        let members: Vec<usize> = set
            .section(y)
            .into_iter()
            .filter(|&x| pmf.p(x, y) > 0.0)
            .collect();
        let mut table = BTreeMap::new();
        if !members.is_empty() {
            let col: f64 = members.iter().map(|&x| pmf.p(x, y)).sum();
            let q: Vec<f64> = members.iter().map(|&x| pmf.p(x, y) / col).collect();
            let words = canonical_codewords(&shannon_lengths(&q)?)?;
            for (&x, w) in members.iter().zip(&words) {
                let cw = Bitstring::from_bits(vec![false]).concat(w);
                table.insert(cw.clone(), x);
                encode[x * ny + y] = cw;
            }
        }
        if members.len() < nx {
            let target = match fallback {
                FlagFallback::Recover => argmax_x(pmf, y, |x| !members.contains(&x)),
                FlagFallback::Miss if members.is_empty() => argmax_x(pmf, y, |_| true),
                FlagFallback::Miss => argmax_x(pmf, y, |x| members.contains(&x)),
            };
            table.insert(flag_on.clone(), target);
        }
        decode.push(table);
    }
    CommonSICode::from_tables(pmf, encode, decode)
}

/// Exact error probability and average codeword length of a code.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CodeEvaluation {
    pub error: f64,
    pub avg_len: f64,
}

/// Runs the decoder on every cell and accumulates the exact error mass and
/// expected length.
pub fn evaluate_common_code(pmf: &JointPmf, code: &CommonSICode) -> CodeEvaluation {
    let mut error = 0.0;
    let mut avg_len = 0.0;
    for x in 0..pmf.nx() {
        for y in 0..pmf.ny() {
            let p = pmf.p(x, y);
            if p == 0.0 {
                continue;
            }
            let word = code.codeword(x, y);
            avg_len += p * word.len() as f64;
            match code.decode_one(word.bits(), y) {
                Ok((d, used)) if d == x && used == word.len() => {}
                _ => error += p,
            }
        }
    }
    CodeEvaluation { error, avg_len }
}
