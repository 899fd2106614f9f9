use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid verse id {0:?}")]
    InvalidVerseId(String),
    #[error("invalid version id {0:?}: expected <language>-<edition>")]
    InvalidVersionId(String),
    #[error("invalid token {token:?}: {reason}")]
    InvalidToken { token: String, reason: &'static str },

    #[error("a parallel corpus needs at least two versions, got {0}")]
    TooFewVersions(usize),
    #[error("version {0} given more than once")]
    DuplicateVersion(String),
    #[error("no shared verses across the loaded versions")]
    NoSharedVerses,
    #[error("unknown version {0}")]
    UnknownVersion(String),

    #[error(
        "verse {verse}: link {source_index}-{target_index} out of bounds \
         (source has {source_len} tokens, target has {target_len})"
    )]
    LinkOutOfBounds {
        verse: String,
        source_index: usize,
        target_index: usize,
        source_len: usize,
        target_len: usize,
    },
    #[error("verse {verse}: empty span {start}:{end}")]
    EmptySpan { verse: String, start: usize, end: usize },
    #[error("verse {verse}: span {start}:{end} exceeds verse length {len}")]
    SpanOutOfBounds { verse: String, start: usize, end: usize, len: usize },
    #[error("verse {verse}: spans {first:?} and {second:?} overlap")]
    OverlappingSpans { verse: String, first: (usize, usize), second: (usize, usize) },

    #[error("no alignment from {from} to {to}")]
    MissingAlignment { from: String, to: String },
    #[error("more than one alignment from {from} to {to}")]
    DuplicateAlignment { from: String, to: String },
    #[error("more than one NP annotation for {0}")]
    DuplicateAnnotation(String),
    #[error("language {0} has more than one target version")]
    DuplicateTargetLanguage(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("ln C({n}, {k}) undefined: k > n")]
    ChooseDomain { n: u64, k: u64 },
    #[error("exact test undefined on an all-zero table")]
    EmptyTable,
    #[error("odds ratio undefined (0/0)")]
    UndefinedOddsRatio,
    #[error("cannot average an empty list of scores")]
    EmptyAverage,
}
