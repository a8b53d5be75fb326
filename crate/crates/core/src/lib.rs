//! Field- and year-normalized citation indicators.
//!
//! Papers are grouped by the category of their principal PACS code and their
//! publication year. Each group's mean citation count `c0` rescales raw
//! counts into `c_f = c / c0`, which makes distributions from very
//! different fields comparable. On top of that the crate provides a
//! ranking-fairness audit, per-author aggregates and a seeded synthetic
//! corpus generator.

pub mod audit;
pub mod authors;
pub mod error;
pub mod format;
pub mod model;
pub mod normalize;
pub mod stats;
pub mod store;
pub mod synth;

pub use audit::{run_audit, AuditConfig, AuditReport, GroupBy, Indicator, TieBreak};
pub use authors::{aggregate_authors, correlation_report, AuthorAggregate, CorrelationPair};
pub use error::{Error, Result};
pub use model::{Category, DocType, EligibilityPolicy, Granularity, PacsCode, PaperRecord};
pub use normalize::{compute_norm_table, rescale_corpus, GroupKey, NormTable, Statistic};
pub use store::{Corpus, CorpusFormat, IngestReport};
pub use synth::{generate_corpus, GenSpec};
