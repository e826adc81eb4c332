use std::fmt;
use std::str::FromStr;

use super::CodeError;

/// A finite string over `{0, 1}`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitstring {
    bits: Vec<bool>,
}

impl Bitstring {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Bitstring { bits }
    }

    /// The low `width` bits of `value`, most significant first.
    pub fn from_uint(value: u64, width: u32) -> Self {
        let bits = (0..width).rev().map(|i| i < 64 && value >> i & 1 == 1).collect();
        Bitstring { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn extend_from(&mut self, other: &Bitstring) {
        self.bits.extend_from_slice(&other.bits);
    }

    pub fn concat(mut self, other: &Bitstring) -> Self {
        self.extend_from(other);
        self
    }

    /// True when `self` is a prefix of `other` (including equality).
    pub fn is_prefix_of(&self, other: &Bitstring) -> bool {
        other.bits.starts_with(&self.bits)
    }

    /// Packs MSB-first into bytes, zero-padding the last byte.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.bits
            .chunks(8)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .fold(0u8, |acc, (i, &b)| acc | (u8::from(b) << (7 - i)))
            })
            .collect()
    }

    /// Inverse of [`to_bytes`](Self::to_bytes) given the exact bit length.
    pub fn from_bytes(bytes: &[u8], bit_len: usize) -> Result<Self, CodeError> {
        if bit_len > bytes.len() * 8 || bytes.len() > bit_len.div_ceil(8) {
            return Err(CodeError::MalformedStream(format!(
                "{} bytes cannot hold exactly {bit_len} bits",
                bytes.len()
            )));
        }
        let bits = (0..bit_len).map(|i| bytes[i / 8] >> (7 - i % 8) & 1 == 1).collect();
        Ok(Bitstring { bits })
    }

    /// Framed byte form: 8-byte big-endian bit count followed by the packed
    /// bits.
    pub fn to_framed_bytes(&self) -> Vec<u8> {
        let mut out = (self.bits.len() as u64).to_be_bytes().to_vec();
        out.extend(self.to_bytes());
        out
    }

    pub fn from_framed_bytes(bytes: &[u8]) -> Result<Self, CodeError> {
        if bytes.len() < 8 {
            return Err(CodeError::MalformedStream("missing bit-length field".into()));
        }
        let (head, body) = bytes.split_at(8);
        let bit_len = u64::from_be_bytes(head.try_into().expect("8 bytes")) as usize;
        Self::from_bytes(body, bit_len)
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for Bitstring {
    type Err = CodeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(CodeError::MalformedStream(format!("invalid bit {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Bitstring::from_bits)
    }
}

/// Length of the Elias gamma codeword for `m ≥ 1`: `2⌊log2 m⌋ + 1`.
pub fn elias_gamma_len(m: u64) -> usize {
    assert!(m >= 1, "Elias gamma does not encode 0");
    2 * (63 - m.leading_zeros() as usize) + 1
}

/// Elias gamma code: `⌊log2 m⌋` zeros followed by `m` in binary.
///
/// # Panics
///
/// If `m == 0`.
pub fn elias_gamma_encode(m: u64) -> Bitstring {
    assert!(m >= 1, "Elias gamma does not encode 0");
    let width = 64 - m.leading_zeros();
    let mut out = Bitstring::from_bits(vec![false; width as usize - 1]);
    out.extend_from(&Bitstring::from_uint(m, width));
    out
}

/// Decodes one gamma codeword from the front of `stream`, returning the value
/// and the number of bits consumed.
pub fn elias_gamma_decode(stream: &[bool]) -> Result<(u64, usize), CodeError> {
    let zeros = stream
        .iter()
        .position(|&b| b)
        .ok_or(CodeError::MalformedHeader("no terminating one bit"))?;
    if zeros > 63 {
        return Err(CodeError::MalformedHeader("value exceeds 64 bits"));
    }
    let end = 2 * zeros + 1;
    if stream.len() < end {
        return Err(CodeError::MalformedHeader("truncated binary part"));
    }
    let value = stream[zeros..end].iter().fold(0u64, |acc, &b| acc << 1 | u64::from(b));
    Ok((value, end))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_examples() {
        assert_eq!(elias_gamma_encode(1).to_string(), "1");
        assert_eq!(elias_gamma_encode(2).to_string(), "010");
        assert_eq!(elias_gamma_encode(5).to_string(), "00101");
        assert_eq!(elias_gamma_encode(6).to_string(), "00110");
    }

    #[test]
    fn gamma_exhaustive_round_trip() {
        for m in 1..=(1u64 << 16) {
            let code = elias_gamma_encode(m);
            assert_eq!(code.len(), elias_gamma_len(m));
            let floor_log = 63 - m.leading_zeros() as usize;
            assert!(code.len() <= 2 * (floor_log + 1));
            let mut stream = code.bits().to_vec();
            stream.extend([true, false, true]);
            assert_eq!(elias_gamma_decode(&stream).unwrap(), (m, code.len()));
        }
    }

    #[test]
    fn gamma_truncation_is_malformed() {
        assert!(elias_gamma_decode(&[]).is_err());
        assert!(elias_gamma_decode(&[false, false]).is_err());
        assert!(elias_gamma_decode(&[false, false, true, false]).is_err());
    }

    #[test]
    fn byte_packing() {
        let b: Bitstring = "1011000011".parse().unwrap();
        assert_eq!(b.to_bytes(), vec![0b1011_0000, 0b1100_0000]);
        assert_eq!(Bitstring::from_bytes(&b.to_bytes(), 10).unwrap(), b);
        assert_eq!(Bitstring::from_framed_bytes(&b.to_framed_bytes()).unwrap(), b);
        assert!(Bitstring::from_bytes(&[0, 0], 3).is_err());
        assert_eq!(Bitstring::from_uint(5, 4).to_string(), "0101");
    }
}
