use thiserror::Error;

use crate::Label;

/// Errors raised by the engine and its building blocks.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("image width {width} is not a positive multiple of 4")]
    Dimension { width: usize },

    #[error("image is {got_width}x{got_height}, engine configured for {want_width}x{want_height}")]
    SizeMismatch {
        got_width: usize,
        got_height: usize,
        want_width: usize,
        want_height: usize,
    },

    #[error("pixel buffer holds {got} values, expected {expected}")]
    BufferLength { expected: usize, got: usize },

    #[error("pixel value {value} at index {index} is not binary")]
    NotBinary { index: usize, value: u8 },

    #[error("stream framing: {0}")]
    Framing(String),

    #[error("label bit width {0} is outside 1..=24")]
    LabelBits(u32),

    #[error("label counter exhausted: more than {max} labels needed")]
    LabelExhausted { max: Label },

    #[error("group {group} of row {row} raised {count} mergers")]
    ConflictArity {
        row: usize,
        group: usize,
        count: usize,
    },

    #[error("chain stack overflow at capacity {capacity}")]
    StackOverflow { capacity: usize },

    #[error("standby bank needs {needed} cycles to become ready, frame period is {available}")]
    InterframeBudget { needed: u64, available: u64 },

    #[error("final table is not idempotent at label {label}")]
    UnresolvedChain { label: Label },

    #[error("label images differ in size")]
    DimensionMismatch,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
