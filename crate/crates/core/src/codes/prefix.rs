//! Prefix-code plumbing: Shannon lengths, canonical codeword assignment,
//! Kraft sums and prefix-freeness checks.

use super::{Bitstring, CodeError};

/// Smallest `l ≥ 0` with `2^{-l} ≤ q`, i.e. `⌈log2(1/q)⌉`, computed without
/// rounding error by comparing against exact powers of two.
pub fn shannon_length(q: f64) -> u32 {
    debug_assert!(q > 0.0 && q <= 1.0 + 1e-9);
    let mut l = (-q.log2()).ceil().max(0.0) as i32;
    while l > 0 && 2f64.powi(-(l - 1)) <= q {
        l -= 1;
    }
    while 2f64.powi(-l) > q {
        l += 1;
    }
    l as u32
}

/// Shannon code lengths `⌈log2 1/Q(x)⌉` for a (sub-)distribution.
pub fn shannon_lengths(cond: &[f64]) -> Result<Vec<u32>, CodeError> {
    cond.iter()
        .enumerate()
        .map(|(index, &q)| {
            if q > 0.0 && q.is_finite() {
                Ok(shannon_length(q.min(1.0)))
            } else {
                Err(CodeError::ZeroProbabilitySymbol { index })
            }
        })
        .collect()
}

/// `Σ 2^{-l}`.
pub fn kraft_sum(lengths: &[u32]) -> f64 {
    lengths.iter().map(|&l| 2f64.powi(-(l.min(2000) as i32))).sum()
}

/// Asserts the Kraft inequality `Σ 2^{-l} ≤ 1` (with `1e-12` slack) and
/// returns the sum.
pub fn kraft_check(lengths: &[u32]) -> Result<f64, CodeError> {
    let sum = kraft_sum(lengths);
    if sum > 1.0 + 1e-12 {
        return Err(CodeError::KraftViolated { sum });
    }
    Ok(sum)
}

/// Canonical prefix code for the given lengths: codewords are assigned in
/// order of non-decreasing length (ties by index), each the lexicographic
/// successor of the previous one padded with zeros.
///
/// The empty codeword is only allowed for a single-symbol code.
pub fn canonical_codewords(lengths: &[u32]) -> Result<Vec<Bitstring>, CodeError> {
    if lengths.len() > 1 && lengths.contains(&0) {
        return Err(CodeError::EmptyCodeword);
    }
    kraft_check(lengths)?;
    let mut order: Vec<usize> = (0..lengths.len()).collect();
    order.sort_by_key(|&i| (lengths[i], i));
    let mut out = vec![Bitstring::new(); lengths.len()];
    let mut cur: Vec<bool> = Vec::new();
    for (k, &i) in order.iter().enumerate() {
        if k > 0 {
            // binary increment; Kraft guarantees no overflow
            match cur.iter().rposition(|&b| !b) {
                Some(pos) => {
                    cur[pos] = true;
                    cur[pos + 1..].iter_mut().for_each(|b| *b = false);
                }
                None => return Err(CodeError::KraftViolated { sum: kraft_sum(lengths) }),
            }
        }
        cur.resize(lengths[i] as usize, false);
        out[i] = Bitstring::from_bits(cur.clone());
    }
    Ok(out)
}

/// Checks that no codeword is a proper prefix of a different codeword.
/// Repeated identical codewords are allowed (encoders need not be
/// one-to-one).
pub fn check_prefix_free<'a>(codewords: impl IntoIterator<Item = &'a Bitstring>) -> Result<(), CodeError> {
    let mut words: Vec<&Bitstring> = codewords.into_iter().collect();
    words.sort();
    words.dedup();
    for w in words.windows(2) {
        if w[0].is_prefix_of(w[1]) {
            return Err(CodeError::PrefixViolation {
                prefix: w[0].to_string(),
                word: w[1].to_string(),
            });
        }
    }
    Ok(())
}
