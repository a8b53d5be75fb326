//! Seeded synthetic corpora with a shared citation-distribution shape and
//! controllable per-group means.
//!
//! Every (category, year) group draws `papers_per_group` values from the
//! configured shape, scaled so that the population mean equals the group's
//! target, then rounds to integers (zero rounds up to one so every paper is
//! cited). Groups are generated independently from sub-seeds derived from
//! the spec seed, so output is identical regardless of thread count.

use std::collections::{BTreeMap, BTreeSet};

use rand::distr::weighted::WeightedIndex;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Category, DocType, EligibilityPolicy, Granularity, PacsCode, PaperRecord};
use crate::normalize::{GroupKey, GroupStats, NormTable, Statistic};
use crate::store::{Corpus, CorpusMetadata};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Shape {
    LogNormal {
        mu: f64,
        sigma: f64,
    },
    /// Continuous power law `p(x) ~ x^-alpha` above `c_min - 1/2`, i.e. the
    /// usual continuous approximation of a discrete power law starting at
    /// `c_min`. Needs `alpha > 2` for a finite mean.
    DiscretePowerLaw {
        alpha: f64,
        c_min: u64,
    },
}

impl Default for Shape {
    fn default() -> Self {
        Shape::LogNormal {
            mu: 0.0,
            sigma: 1.1,
        }
    }
}

impl Shape {
    fn validate(&self) -> Result<()> {
        match *self {
            Shape::LogNormal { mu, sigma }
                if mu.is_finite() && sigma.is_finite() && sigma > 0.0 =>
            {
                Ok(())
            }
            Shape::DiscretePowerLaw { alpha, c_min }
                if alpha.is_finite() && alpha > 2.0 && c_min >= 1 =>
            {
                Ok(())
            }
            _ => Err(Error::InvalidSpec(format!("invalid shape {self:?}"))),
        }
    }

    fn population_mean(&self) -> f64 {
        match *self {
            Shape::LogNormal { mu, sigma } => (mu + sigma * sigma / 2.0).exp(),
            Shape::DiscretePowerLaw { alpha, c_min } => {
                (c_min as f64 - 0.5) * (alpha - 1.0) / (alpha - 2.0)
            }
        }
    }

    fn population_median(&self) -> f64 {
        match *self {
            Shape::LogNormal { mu, .. } => mu.exp(),
            Shape::DiscretePowerLaw { alpha, c_min } => {
                (c_min as f64 - 0.5) * 2f64.powf(1.0 / (alpha - 1.0))
            }
        }
    }

    fn sampler(&self) -> Sampler {
        match *self {
            Shape::LogNormal { mu, sigma } => {
                Sampler::LogNormal(LogNormal::new(mu, sigma).expect("validated parameters"))
            }
            Shape::DiscretePowerLaw { alpha, c_min } => Sampler::Pareto {
                x_min: c_min as f64 - 0.5,
                exponent: -1.0 / (alpha - 1.0),
            },
        }
    }
}

enum Sampler {
    LogNormal(LogNormal<f64>),
    Pareto { x_min: f64, exponent: f64 },
}

impl Sampler {
    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::LogNormal(d) => d.sample(rng),
            Sampler::Pareto { x_min, exponent } => {
                // Inverse transform; 1 - u lies in (0, 1].
                let u: f64 = rng.random();
                x_min * (1.0 - u).powf(*exponent)
            }
        }
    }
}

/// Distribution of the number of authors per paper.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TeamSizeLaw {
    Fixed {
        size: usize,
    },
    /// Uniform on `min..=max`.
    Uniform {
        min: usize,
        max: usize,
    },
    /// `weights[k]` is the relative frequency of teams of size `k + 1`.
    Weighted {
        weights: Vec<f64>,
    },
}

impl Default for TeamSizeLaw {
    fn default() -> Self {
        TeamSizeLaw::Uniform { min: 1, max: 5 }
    }
}

impl TeamSizeLaw {
    fn max_size(&self) -> usize {
        match self {
            TeamSizeLaw::Fixed { size } => *size,
            TeamSizeLaw::Uniform { max, .. } => *max,
            TeamSizeLaw::Weighted { weights } => weights.len(),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            TeamSizeLaw::Fixed { size } => *size >= 1,
            TeamSizeLaw::Uniform { min, max } => *min >= 1 && min <= max,
            TeamSizeLaw::Weighted { weights } => {
                weights.iter().all(|w| w.is_finite() && *w >= 0.0)
                    && weights.iter().any(|w| *w > 0.0)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!(
                "invalid team size law {self:?}"
            )))
        }
    }
}

enum TeamSampler {
    Fixed(usize),
    Uniform(usize, usize),
    Weighted(WeightedIndex<f64>),
}

impl TeamSampler {
    fn new(law: &TeamSizeLaw) -> Self {
        match law {
            TeamSizeLaw::Fixed { size } => TeamSampler::Fixed(*size),
            TeamSizeLaw::Uniform { min, max } => TeamSampler::Uniform(*min, *max),
            TeamSizeLaw::Weighted { weights } => {
                TeamSampler::Weighted(WeightedIndex::new(weights).expect("validated weights"))
            }
        }
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> usize {
        match self {
            TeamSampler::Fixed(k) => *k,
            TeamSampler::Uniform(lo, hi) => rng.random_range(*lo..=*hi),
            TeamSampler::Weighted(d) => d.sample(rng) + 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct YearRange {
    pub start: i32,
    /// Inclusive.
    pub end: i32,
}

impl YearRange {
    pub fn years(&self) -> impl Iterator<Item = i32> {
        self.start..=self.end
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupMean {
    pub category: Category,
    pub year: i32,
    pub mean: f64,
}

/// Generator configuration, readable from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSpec {
    /// Category codes; each becomes the `XX` field of a synthetic PACS code.
    pub categories: Vec<Category>,
    pub years: YearRange,
    pub papers_per_group: usize,
    #[serde(default)]
    pub shape: Shape,
    /// Target mean citations per group; groups not listed use `default_mean`.
    #[serde(default)]
    pub group_means: Vec<GroupMean>,
    #[serde(default)]
    pub default_mean: Option<f64>,
    #[serde(default)]
    pub team_size: TeamSizeLaw,
    pub author_pool: usize,
    pub seed: u64,
}

impl GenSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: GenSpec =
            serde_json::from_str(text).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Every (category, year) group in generation order.
    pub fn groups(&self) -> Vec<GroupKey> {
        self.categories
            .iter()
            .flat_map(|&c| self.years.years().map(move |y| GroupKey::new(c, y)))
            .collect()
    }

    /// Resolved mean target of every group.
    pub fn mean_targets(&self) -> Result<BTreeMap<GroupKey, f64>> {
        let explicit: BTreeMap<GroupKey, f64> = self
            .group_means
            .iter()
            .map(|g| (GroupKey::new(g.category, g.year), g.mean))
            .collect();
        self.groups()
            .into_iter()
            .map(|key| {
                explicit
                    .get(&key)
                    .copied()
                    .or(self.default_mean)
                    .map(|m| (key, m))
                    .ok_or_else(|| Error::InvalidSpec(format!("no mean target for group {key}")))
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidSpec(msg));
        if self.categories.is_empty() {
            return invalid("no categories".into());
        }
        let distinct: BTreeSet<_> = self.categories.iter().collect();
        if distinct.len() != self.categories.len() {
            return invalid("duplicate categories".into());
        }
        if self.years.start > self.years.end {
            return invalid(format!("empty year range {:?}", self.years));
        }
        if self.papers_per_group == 0 {
            return invalid("papers_per_group must be >= 1".into());
        }
        if self.author_pool == 0 {
            return invalid("author_pool must be >= 1".into());
        }
        self.shape.validate()?;
        self.team_size.validate()?;
        if self.team_size.max_size() > self.author_pool {
            return invalid(format!(
                "teams of up to {} authors need a larger pool than {}",
                self.team_size.max_size(),
                self.author_pool
            ));
        }
        let groups: BTreeSet<GroupKey> = self.groups().into_iter().collect();
        for g in &self.group_means {
            if !groups.contains(&GroupKey::new(g.category, g.year)) {
                return invalid(format!(
                    "mean target for unknown group {}/{}",
                    g.category, g.year
                ));
            }
        }
        if let Some(m) = self.default_mean {
            if !(m.is_finite() && m > 0.0) {
                return invalid(format!("default_mean must be positive, got {m}"));
            }
        }
        for (key, m) in self.mean_targets()? {
            if !(m.is_finite() && m > 0.0) {
                return invalid(format!("mean target for {key} must be positive, got {m}"));
            }
        }
        Ok(())
    }

    /// Normalization table holding the population mean and median each group
    /// was drawn with, before rounding. Keyed at fine granularity when any
    /// category is not a broad one.
    pub fn ground_truth_table(&self, statistic: Statistic) -> Result<NormTable> {
        self.validate()?;
        let granularity = if self.categories.iter().all(|c| c.is_broad()) {
            Granularity::Broad10
        } else {
            Granularity::Fine100
        };
        let mut table = NormTable::new(granularity, statistic);
        let median_ratio = self.shape.population_median() / self.shape.population_mean();
        for (key, mean) in self.mean_targets()? {
            table.groups.insert(
                key,
                GroupStats {
                    n_papers: self.papers_per_group as u64,
                    mean,
                    median: mean * median_ratio,
                },
            );
        }
        Ok(table)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn group_seed(seed: u64, key: GroupKey) -> u64 {
    let tag = (u64::from(key.category.code()) << 32) | u64::from(key.year as u32);
    splitmix64(splitmix64(seed) ^ tag)
}

pub fn author_key(index: usize) -> String {
    format!("A{index:06}")
}

fn generate_group(spec: &GenSpec, key: GroupKey, target: f64) -> Vec<PaperRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(group_seed(spec.seed, key));
    let sampler = spec.shape.sampler();
    let scale = target / spec.shape.population_mean();
    let teams = TeamSampler::new(&spec.team_size);
    let pacs = PacsCode::new(key.category.code(), 0, "Xx").expect("valid synthetic code");
    (0..spec.papers_per_group)
        .map(|i| {
            let raw = sampler.draw(&mut rng) * scale;
            let citations = (raw.round() as u64).max(1);
            let team = teams.draw(&mut rng);
            let mut members: Vec<usize> = sample(&mut rng, spec.author_pool, team).into_vec();
            members.sort_unstable();
            let doc_type = DocType::RESEARCH[rng.random_range(0..DocType::RESEARCH.len())];
            PaperRecord {
                paper_id: format!("S{}-{}-{i:06}", key.category, key.year),
                year: key.year,
                doc_type,
                pacs: vec![pacs.clone()],
                citations,
                authors: members.into_iter().map(author_key).collect(),
            }
        })
        .collect()
}

pub fn generate_corpus(spec: &GenSpec) -> Result<Corpus> {
    spec.validate()?;
    let targets = spec.mean_targets()?;
    let records: Vec<PaperRecord> = spec
        .groups()
        .into_par_iter()
        .map(|key| generate_group(spec, key, targets[&key]))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    Ok(Corpus {
        records,
        metadata: CorpusMetadata {
            source: format!("synthetic (seed {})", spec.seed),
            snapshot: None,
            ingested_at: None,
            policy: EligibilityPolicy::default(),
        },
    })
}
