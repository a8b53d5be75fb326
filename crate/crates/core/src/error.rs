use std::path::PathBuf;

use crate::normalize::GroupKey;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("malformed PACS code {text:?}: {reason}")]
    MalformedPacs { text: String, reason: &'static str },

    #[error("paper {paper_id} has no PACS code")]
    NoPacs { paper_id: String },

    #[error("invalid eligibility policy: {0}")]
    InvalidPolicy(String),

    #[error("cannot read {path}")]
    UnreadableFile {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {path}")]
    UnwritableFile {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("duplicate paper_id {0:?}")]
    DuplicateId(String),

    #[error("unsupported store schema version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("malformed store file: {0}")]
    MalformedStore(String),

    #[error("malformed norm table: {0}")]
    MalformedTable(String),

    #[error("norm table is empty")]
    EmptyTable,

    #[error("no eligible papers")]
    NoEligiblePapers,

    #[error("group (category {}, year {}) missing from norm table", .0.category, .0.year)]
    MissingGroup(GroupKey),

    #[error("paper {0:?} has no group assignment")]
    MissingGroupAssignment(String),

    #[error("no groups to compare")]
    EmptyGroups,

    #[error("z must lie in {range}, got {z}")]
    InvalidZ { z: f64, range: &'static str },

    #[error("top set is empty: z = {z}% of {n} papers rounds to zero")]
    EmptyTopSet { z: f64, n: usize },

    #[error("paper {0:?} has no authors")]
    AuthorlessPaper(String),

    #[error("sample is empty")]
    EmptySample,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("degenerate variance: a coordinate is constant")]
    DegenerateVariance,

    #[error("x values must be positive, got {0}")]
    NonPositiveX(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
