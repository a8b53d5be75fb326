//! Per-author totals: raw citations `C`, summed relative indicator `C_f`,
//! and `B_f`, where each paper's `c_f` is split equally among its authors.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::sig6;
use crate::model::{is_eligible, EligibilityPolicy};
use crate::normalize::{rescale_record, NormTable};
use crate::stats::{log_bin, pearson_r, BandSpec, BinSummary};
use crate::store::Corpus;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuthorAggregate {
    pub author_key: String,
    pub n_papers: u64,
    /// Total raw citations.
    #[serde(rename = "C")]
    pub c: u64,
    /// Total relative indicator.
    #[serde(rename = "C_f")]
    pub c_f: f64,
    /// Total relative indicator, each paper divided by its author count.
    #[serde(rename = "B_f")]
    pub b_f: f64,
}

impl AuthorAggregate {
    fn new(author_key: &str) -> Self {
        Self {
            author_key: author_key.to_string(),
            n_papers: 0,
            c: 0,
            c_f: 0.0,
            b_f: 0.0,
        }
    }

    fn add(&mut self, c: u64, c_f: f64, n_authors: usize) {
        self.n_papers += 1;
        self.c += c;
        self.c_f += c_f;
        self.b_f += c_f / n_authors as f64;
    }
}

/// Aggregates every eligible paper into its authors' totals, sorted by
/// author key. Authors are matched by exact key; a key repeated on one paper
/// is counted once, and `N(i)` is the number of distinct keys.
pub fn aggregate_authors(
    corpus: &Corpus,
    policy: &EligibilityPolicy,
    table: &NormTable,
) -> Result<Vec<AuthorAggregate>> {
    policy.validate()?;
    let mut totals: BTreeMap<&str, AuthorAggregate> = BTreeMap::new();
    for record in corpus.records.iter().filter(|r| is_eligible(r, policy)) {
        if record.authors.is_empty() {
            return Err(Error::AuthorlessPaper(record.paper_id.clone()));
        }
        let rescaled = rescale_record(record, table)?;
        let mut keys: Vec<&str> = record.authors.iter().map(String::as_str).collect();
        keys.sort_unstable();
        keys.dedup();
        for &key in &keys {
            totals
                .entry(key)
                .or_insert_with(|| AuthorAggregate::new(key))
                .add(rescaled.c, rescaled.c_f, keys.len());
        }
    }
    Ok(totals.into_values().collect())
}

pub fn write_author_table<W: Write>(aggregates: &[AuthorAggregate], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["author_key", "n_papers", "C", "C_f", "B_f"])?;
    for a in aggregates {
        w.write_record([
            a.author_key.clone(),
            a.n_papers.to_string(),
            a.c.to_string(),
            sig6(a.c_f),
            sig6(a.b_f),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CorrelationPair {
    #[serde(rename = "C_vs_Cf")]
    CvsCf,
    #[serde(rename = "C_vs_Bf")]
    CvsBf,
}

/// Whether Pearson r is computed on raw values or on their logarithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationSpace {
    #[default]
    Linear,
    Log10,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationConfig {
    pub space: CorrelationSpace,
    pub bins_per_decade: u32,
    pub bands: BandSpec,
}

impl Default for CorrelationConfig {
    fn default() -> Self {
        Self {
            space: CorrelationSpace::Linear,
            bins_per_decade: 5,
            bands: BandSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub pair: CorrelationPair,
    pub space: CorrelationSpace,
    pub n_authors: usize,
    pub r: f64,
    /// Summaries of the y coordinate in logarithmic bins of `C`.
    pub binned: Vec<BinSummary>,
}

pub fn correlation_report(
    aggregates: &[AuthorAggregate],
    pair: CorrelationPair,
    config: &CorrelationConfig,
) -> Result<CorrelationReport> {
    if aggregates.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: aggregates.len(),
        });
    }
    let x: Vec<f64> = aggregates.iter().map(|a| a.c as f64).collect();
    let y: Vec<f64> = aggregates
        .iter()
        .map(|a| match pair {
            CorrelationPair::CvsCf => a.c_f,
            CorrelationPair::CvsBf => a.b_f,
        })
        .collect();
    let r = match config.space {
        CorrelationSpace::Linear => pearson_r(&x, &y)?,
        CorrelationSpace::Log10 => {
            if let Some(&bad) = x.iter().chain(&y).find(|&&v| v.is_nan() || v <= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "log-space correlation needs positive values, got {bad}"
                )));
            }
            let lx: Vec<f64> = x.iter().map(|v| v.log10()).collect();
            let ly: Vec<f64> = y.iter().map(|v| v.log10()).collect();
            pearson_r(&lx, &ly)?
        }
    };
    let points: Vec<(f64, f64)> = x.into_iter().zip(y).collect();
    let binned = log_bin(&points, config.bins_per_decade, config.bands)?;
    Ok(CorrelationReport {
        pair,
        space: config.space,
        n_authors: aggregates.len(),
        r,
        binned,
    })
}
