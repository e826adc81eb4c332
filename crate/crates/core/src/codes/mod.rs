//! Bit-exact codes.
//!
//! - [`bits`]: bitstrings, byte framing and the Elias gamma integer code.
//! - [`prefix`]: Shannon lengths, canonical codeword assignment, Kraft and
//!   prefix checks.
//! - [`common`]: codes with side-information at both ends, including the
//!   flag + Shannon construction.
//! - [`sw`]: the random-binning Slepian-Wolf codec (side-information at the
//!   decoder only).
//! - [`converse`]: per-symbol error profiles extracted from arbitrary length
//!   functions, and the certificates they satisfy.

pub mod bits;
pub mod common;
pub mod converse;
pub mod prefix;
pub mod sw;

use thiserror::Error;

pub use bits::{elias_gamma_decode, elias_gamma_encode, elias_gamma_len, Bitstring};
pub use common::{build_flag_code, build_flag_code_with, evaluate_common_code, CodeEvaluation, CommonSICode, FlagFallback};
pub use converse::{certify, converse_extract, lemma5_check, map_decoder_error, ConverseCertificate};
pub use prefix::{canonical_codewords, check_prefix_free, kraft_check, kraft_sum, shannon_lengths};
pub use sw::{
    build_sw_code, decode_stream, encode_stream, seed_averaged_error, sw_decode, sw_encode, sw_exact_error, DecodeOutcome,
    CodecDescription, EpsilonProfile, SWBinCode, SeedAverage,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodeError {
    #[error("malformed header: {0}")]
    MalformedHeader(&'static str),
    #[error("malformed stream: {0}")]
    MalformedStream(String),
    #[error("symbol {index} has zero probability")]
    ZeroProbabilitySymbol { index: usize },
    #[error("restriction is empty")]
    EmptyRestriction,
    #[error("Kraft sum {sum} exceeds 1")]
    KraftViolated { sum: f64 },
    #[error("codeword {prefix} is a proper prefix of {word}")]
    PrefixViolation { prefix: String, word: String },
    #[error("the empty codeword is only allowed in a singleton codebook")]
    EmptyCodeword,
    #[error("delta must lie in (0, 4096], got {0}")]
    InvalidDelta(f64),
    #[error("epsilon {0} is outside [0, 1]")]
    InvalidEpsilon(f64),
    #[error("profile has {got} entries, expected {expected}")]
    ProfileShape { got: usize, expected: usize },
    #[error("symbol stream has {x} entries but side-information stream has {y}")]
    StreamLengthMismatch { x: usize, y: usize },
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("code table is inconsistent: {0}")]
    InvalidCode(String),
}
