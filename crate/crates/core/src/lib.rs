//! Instanton search for min-sum decoding of LDPC codes.
//!
//! * [`code`]: Tanner graphs, the built-in toy and [155, 64, 20] codes, alist I/O.
//! * [`channel`]: AWGN noise vectors, effective weight, decoder input.
//! * [`decoder`]: min-sum decoding with per-iteration codeword checks.
//! * [`search`]: the instanton-array search and its progress logs.
//! * [`render`]: noise-space cuts and decoding-trace images.
//! * [`cli`]: the `instanton` command-line tool.

pub mod channel;
pub mod cli;
pub mod code;
pub mod decoder;
pub mod render;
pub mod search;

pub use channel::NoiseVector;
pub use code::TannerGraph;
pub use decoder::{decode, withstand_count, DecodeOutcome, Message, MinSumDecoder, OutcomeKind, Withstand};
