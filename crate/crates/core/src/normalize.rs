//! Per-(category, year) normalization factors `c0` and the relative
//! indicator `c_f = c / c0`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    is_eligible, principal_category, Category, EligibilityPolicy, Granularity, PaperRecord,
};
use crate::store::Corpus;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupKey {
    pub category: Category,
    pub year: i32,
}

impl GroupKey {
    pub fn new(category: Category, year: i32) -> Self {
        Self { category, year }
    }

    pub fn of(record: &PaperRecord, granularity: Granularity) -> Result<Self> {
        Ok(Self::new(
            principal_category(record, granularity)?,
            record.year,
        ))
    }
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.category, self.year)
    }
}

/// Which group statistic divides raw citation counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    #[default]
    Mean,
    Median,
}

impl FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mean" => Ok(Self::Mean),
            "median" => Ok(Self::Median),
            _ => Err(Error::InvalidArgument(format!("unknown statistic {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupStats {
    pub n_papers: u64,
    pub mean: f64,
    /// Lower median: an attained citation count.
    pub median: f64,
}

impl GroupStats {
    /// `citations` must be non-empty.
    fn from_citations(citations: &mut [u64]) -> Self {
        citations.sort_unstable();
        let n = citations.len();
        // Integer sum: exact and independent of summation order.
        let total: u128 = citations.iter().map(|&c| u128::from(c)).sum();
        Self {
            n_papers: n as u64,
            mean: total as f64 / n as f64,
            median: citations[(n - 1) / 2] as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormTable {
    pub granularity: Granularity,
    pub statistic: Statistic,
    pub groups: BTreeMap<GroupKey, GroupStats>,
}

impl NormTable {
    pub fn new(granularity: Granularity, statistic: Statistic) -> Self {
        Self {
            granularity,
            statistic,
            groups: BTreeMap::new(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn get(&self, key: &GroupKey) -> Option<&GroupStats> {
        self.groups.get(key)
    }

    /// The divisor for `key` under the table's statistic.
    pub fn c0(&self, key: &GroupKey) -> Result<f64> {
        let stats = self.groups.get(key).ok_or(Error::MissingGroup(*key))?;
        Ok(match self.statistic {
            Statistic::Mean => stats.mean,
            Statistic::Median => stats.median,
        })
    }

    /// Same groups, different divisor.
    pub fn with_statistic(mut self, statistic: Statistic) -> Self {
        self.statistic = statistic;
        self
    }
}

/// Citation counts of eligible papers, bucketed by group.
fn eligible_groups(
    corpus: &Corpus,
    policy: &EligibilityPolicy,
    granularity: Granularity,
) -> Result<BTreeMap<GroupKey, Vec<u64>>> {
    policy.validate()?;
    let mut groups: BTreeMap<GroupKey, Vec<u64>> = BTreeMap::new();
    for record in corpus.records.iter().filter(|r| is_eligible(r, policy)) {
        // Eligible records without PACS only exist when require_pacs is off;
        // they have no category and cannot be normalized.
        let Some(code) = record.principal_pacs() else {
            continue;
        };
        let key = GroupKey::new(code.category(granularity), record.year);
        groups.entry(key).or_default().push(record.citations);
    }
    if groups.is_empty() {
        return Err(Error::NoEligiblePapers);
    }
    Ok(groups)
}

pub fn compute_norm_table(
    corpus: &Corpus,
    policy: &EligibilityPolicy,
    granularity: Granularity,
    statistic: Statistic,
) -> Result<NormTable> {
    let groups = eligible_groups(corpus, policy, granularity)?
        .into_iter()
        .map(|(key, mut cites)| (key, GroupStats::from_citations(&mut cites)))
        .collect();
    // Zero-citation papers can only enter with min_citations = 0; a group made
    // entirely of them has c0 = 0 and cannot serve as a divisor.
    let table = NormTable {
        granularity,
        statistic,
        groups,
    };
    if let Some((key, _)) = table
        .groups
        .iter()
        .find(|(k, _)| table.c0(k).map_or(true, |c0| c0 <= 0.0))
    {
        return Err(Error::InvalidArgument(format!(
            "group {key} has a non-positive normalization factor; exclude uncited papers"
        )));
    }
    Ok(table)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RescaledPaper {
    pub paper_id: String,
    pub group: GroupKey,
    pub c: u64,
    pub c_f: f64,
}

/// Relative indicator for every eligible record, in corpus order.
pub fn rescale_corpus(
    corpus: &Corpus,
    policy: &EligibilityPolicy,
    table: &NormTable,
) -> Result<Vec<RescaledPaper>> {
    corpus
        .records
        .iter()
        .filter(|r| is_eligible(r, policy))
        .map(|r| rescale_record(r, table))
        .collect()
}

pub fn rescale_record(record: &PaperRecord, table: &NormTable) -> Result<RescaledPaper> {
    let group = GroupKey::of(record, table.granularity)?;
    let c0 = table.c0(&group)?;
    Ok(RescaledPaper {
        paper_id: record.paper_id.clone(),
        group,
        c: record.citations,
        c_f: record.citations as f64 / c0,
    })
}

/// One row of the per-group overview (mean, median and maximum per year).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub key: GroupKey,
    pub n_papers: u64,
    pub mean: f64,
    pub median: f64,
    pub max: u64,
}

pub fn group_summary(
    corpus: &Corpus,
    policy: &EligibilityPolicy,
    granularity: Granularity,
) -> Result<Vec<GroupSummary>> {
    Ok(eligible_groups(corpus, policy, granularity)?
        .into_iter()
        .map(|(key, mut cites)| {
            let stats = GroupStats::from_citations(&mut cites);
            GroupSummary {
                key,
                n_papers: stats.n_papers,
                mean: stats.mean,
                median: stats.median,
                max: *cites.last().expect("non-empty group"),
            }
        })
        .collect())
}
