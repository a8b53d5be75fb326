mod manifest;

use std::collections::BTreeMap;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use citenorm::audit::Slice;
use citenorm::authors::{write_author_table, CorrelationConfig, CorrelationSpace};
use citenorm::stats::{collapse_distance, survival_curve, write_bins_csv, BandSpec};
use citenorm::store::{
    export_norm_table, import_norm_table, load_corpus, load_saved, save_corpus, write_corpus_file,
};
use citenorm::{
    aggregate_authors, compute_norm_table, correlation_report, generate_corpus, rescale_corpus,
    run_audit, AuditConfig, Category, Corpus, CorpusFormat, CorrelationPair, DocType,
    EligibilityPolicy, GenSpec, Granularity, GroupBy, GroupKey, Indicator, NormTable, Statistic,
    TieBreak,
};

use manifest::write_manifest;

#[derive(Debug, Parser)]
#[command(
    name = "citenorm",
    version,
    about = "Field- and year-normalized citation indicators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a raw JSONL/CSV export and persist it as a corpus store.
    Ingest(IngestArgs),
    /// Compute c0 per (category, year) group and write the table as CSV.
    Normalize(NormalizeArgs),
    /// Check whether the top z% of the global rank over-represents any group.
    Audit(AuditArgs),
    /// Per-author C, C_f and B_f plus correlation reports.
    Authors(AuthorsArgs),
    /// Survival curve of an indicator and pairwise distances between groups.
    Survival(SurvivalArgs),
    /// Generate a synthetic corpus from a JSON spec.
    Generate(GenerateArgs),
}

#[derive(Debug, clap::Args)]
struct IngestArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "jsonl")]
    format: CorpusFormat,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1985)]
    year_min: i32,
    #[arg(long, default_value_t = 2009)]
    year_max: i32,
    #[arg(long, default_value_t = 1)]
    min_citations: u64,
    /// Comma-separated document types counted as eligible.
    #[arg(long, value_delimiter = ',')]
    doc_types: Option<Vec<DocType>>,
    /// Keep papers without any PACS code eligible.
    #[arg(long)]
    allow_missing_pacs: bool,
    /// Free-form label of the source snapshot.
    #[arg(long)]
    snapshot: Option<String>,
    /// Timestamp recorded in the store; left empty when omitted.
    #[arg(long)]
    ingested_at: Option<String>,
}

#[derive(Debug, Clone, clap::Args)]
struct TableArgs {
    #[arg(long, default_value = "broad")]
    granularity: Granularity,
    #[arg(long, default_value = "mean")]
    statistic: Statistic,
}

impl TableArgs {
    fn json(&self) -> serde_json::Value {
        json!({ "granularity": self.granularity, "statistic": self.statistic })
    }

    /// Imports `norm` when given, otherwise computes the table from the store.
    fn resolve(
        &self,
        norm: Option<&Path>,
        corpus: &Corpus,
        policy: &EligibilityPolicy,
    ) -> Result<NormTable> {
        Ok(match norm {
            Some(path) => import_norm_table(path, self.granularity, self.statistic)?,
            None => compute_norm_table(corpus, policy, self.granularity, self.statistic)?,
        })
    }
}

#[derive(Debug, clap::Args)]
struct NormalizeArgs {
    #[arg(long)]
    store: PathBuf,
    #[command(flatten)]
    table: TableArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum TieBreakArg {
    Seeded,
    PaperId,
}

#[derive(Debug, clap::Args)]
struct AuditArgs {
    #[arg(long)]
    store: PathBuf,
    /// Norm table CSV; computed from the store when omitted.
    #[arg(long)]
    norm: Option<PathBuf>,
    #[command(flatten)]
    table: TableArgs,
    #[arg(long, default_value = "cf")]
    indicator: Indicator,
    #[arg(long, default_value_t = 5.0)]
    z: f64,
    #[arg(long, default_value = "category")]
    group_by: GroupBy,
    #[arg(long, default_value_t = 3.0)]
    sigma_threshold: f64,
    #[arg(long, value_enum, default_value = "seeded")]
    tie_break: TieBreakArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Audit only papers from this year.
    #[arg(long, conflicts_with = "slice_category")]
    slice_year: Option<i32>,
    /// Audit only papers from this category.
    #[arg(long)]
    slice_category: Option<Category>,
    /// Exit with status 3 when any group is flagged.
    #[arg(long)]
    fail_on_bias: bool,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum SpaceArg {
    Linear,
    Log10,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BandArg {
    #[value(name = "25")]
    Central25,
    #[value(name = "50")]
    Central50,
}

#[derive(Debug, clap::Args)]
struct AuthorsArgs {
    #[arg(long)]
    store: PathBuf,
    #[arg(long)]
    norm: PathBuf,
    #[command(flatten)]
    table: TableArgs,
    #[arg(long, default_value_t = 1985)]
    year_min: i32,
    #[arg(long, default_value_t = 2006)]
    year_max: i32,
    /// Scale on which Pearson r is computed.
    #[arg(long, value_enum, default_value = "linear")]
    space: SpaceArg,
    #[arg(long, default_value_t = 5)]
    bins_per_decade: u32,
    /// Mass of the inner percentile band.
    #[arg(long, value_enum, default_value = "25")]
    central_band: BandArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, clap::Args)]
struct SurvivalArgs {
    #[arg(long)]
    store: PathBuf,
    #[arg(long)]
    norm: Option<PathBuf>,
    #[command(flatten)]
    table: TableArgs,
    #[arg(long, default_value = "cf")]
    indicator: Indicator,
    /// Restrict the curve to one category.
    #[arg(long)]
    category: Option<Category>,
    /// Restrict the curve to one year.
    #[arg(long)]
    year: Option<i32>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, clap::Args)]
struct GenerateArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value = "jsonl")]
    format: CorpusFormat,
    #[arg(long)]
    out: PathBuf,
    /// Also write the table of population c0 values the corpus was drawn with.
    #[arg(long)]
    truth_table: Option<PathBuf>,
    #[arg(long, default_value = "mean")]
    statistic: Statistic,
}

enum Outcome {
    Done,
    Biased,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Biased) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Ingest(a) => ingest(a),
        Command::Normalize(a) => normalize(a),
        Command::Audit(a) => audit(a),
        Command::Authors(a) => authors(a),
        Command::Survival(a) => survival(a),
        Command::Generate(a) => generate(a),
    }
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    let file =
        fs::File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(file))
}

/// `dir/stem.<suffix>` for an output path `dir/stem.ext`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    path.with_extension(suffix)
}

fn ingest(a: IngestArgs) -> Result<Outcome> {
    let mut policy = EligibilityPolicy::default().with_years(a.year_min, a.year_max);
    policy.min_citations = a.min_citations;
    policy.require_pacs = !a.allow_missing_pacs;
    if let Some(types) = &a.doc_types {
        policy.allowed_doc_types = types.iter().copied().collect();
    }
    let (mut corpus, report) = load_corpus(&a.input, a.format, &policy)?;
    corpus.metadata.snapshot = a.snapshot.clone();
    corpus.metadata.ingested_at = a.ingested_at.clone();
    save_corpus(&corpus, &a.out)?;

    eprintln!(
        "ingested {}: {} rows, {} accepted, {} rejected",
        a.input.display(),
        report.total_rows,
        report.accepted,
        report.rejected()
    );
    for (reason, count) in &report.rejected_by_reason {
        eprintln!("  {reason}: {count}");
    }
    let config = json!({
        "format": a.format,
        "policy": policy,
        "snapshot": a.snapshot,
        "ingested_at": a.ingested_at,
    });
    write_manifest("ingest", config, None, &[&a.input], &[a.out])?;
    Ok(Outcome::Done)
}

fn normalize(a: NormalizeArgs) -> Result<Outcome> {
    let corpus = load_saved(&a.store)?;
    let table = compute_norm_table(
        &corpus,
        &corpus.metadata.policy,
        a.table.granularity,
        a.table.statistic,
    )?;
    export_norm_table(&table, &a.out)?;
    eprintln!("wrote {} groups to {}", table.len(), a.out.display());
    write_manifest("normalize", a.table.json(), None, &[&a.store], &[a.out])?;
    Ok(Outcome::Done)
}

fn audit(a: AuditArgs) -> Result<Outcome> {
    let corpus = load_saved(&a.store)?;
    let policy = &corpus.metadata.policy;
    let table = match a.indicator {
        Indicator::Cf => Some(a.table.resolve(a.norm.as_deref(), &corpus, policy)?),
        Indicator::RawC => None,
    };
    let config = AuditConfig {
        z: a.z,
        indicator: a.indicator,
        group_by: a.group_by,
        granularity: a.table.granularity,
        sigma_threshold: a.sigma_threshold,
        tie_break: match a.tie_break {
            TieBreakArg::Seeded => TieBreak::RandomSeeded { seed: a.seed },
            TieBreakArg::PaperId => TieBreak::ByPaperId,
        },
        slice: match (a.slice_year, a.slice_category) {
            (Some(y), _) => Some(Slice::Year(y)),
            (None, Some(c)) => Some(Slice::Category(c)),
            (None, None) => None,
        },
    };
    let report = run_audit(&corpus, policy, table.as_ref(), &config)?;
    write_json(&report, &a.out)?;

    eprintln!(
        "top {}% = {} of {} papers, sigma_z = {:.4}, max |deviation| = {:.2} sigma",
        report.config.z,
        report.top_set_size,
        report.n_papers,
        report.sigma_z,
        report.max_abs_deviation()
    );
    if report.is_biased() {
        eprintln!(
            "groups beyond {} sigma: {:?}",
            a.sigma_threshold, report.biased_groups
        );
    }

    let mut inputs: Vec<&Path> = vec![&a.store];
    if let (Indicator::Cf, Some(norm)) = (a.indicator, a.norm.as_deref()) {
        inputs.push(norm);
    }
    let flags = json!({ "audit": config, "table": a.table.json(), "fail_on_bias": a.fail_on_bias });
    write_manifest("audit", flags, Some(a.seed), &inputs, &[a.out])?;

    Ok(if a.fail_on_bias && report.is_biased() {
        Outcome::Biased
    } else {
        Outcome::Done
    })
}

fn authors(a: AuthorsArgs) -> Result<Outcome> {
    let corpus = load_saved(&a.store)?;
    let table = import_norm_table(&a.norm, a.table.granularity, a.table.statistic)?;
    let policy = corpus
        .metadata
        .policy
        .clone()
        .with_years(a.year_min, a.year_max);
    let aggregates = aggregate_authors(&corpus, &policy, &table)?;

    let config = CorrelationConfig {
        space: match a.space {
            SpaceArg::Linear => CorrelationSpace::Linear,
            SpaceArg::Log10 => CorrelationSpace::Log10,
        },
        bins_per_decade: a.bins_per_decade,
        bands: match a.central_band {
            BandArg::Central25 => BandSpec::CENTRAL_25,
            BandArg::Central50 => BandSpec::CENTRAL_50,
        },
    };
    let mut outputs = vec![a.out.clone()];
    write_author_table(&aggregates, create(&a.out)?)?;

    let mut reports = Vec::new();
    for (pair, name) in [
        (CorrelationPair::CvsCf, "C_vs_Cf"),
        (CorrelationPair::CvsBf, "C_vs_Bf"),
    ] {
        let report = correlation_report(&aggregates, pair, &config)?;
        let bins = sibling(&a.out, &format!("{name}.bins.csv"));
        write_bins_csv(&report.binned, create(&bins)?)?;
        eprintln!(
            "r({name}) = {:.4} over {} authors",
            report.r, report.n_authors
        );
        outputs.push(bins);
        reports.push(report);
    }
    let corr = sibling(&a.out, "correlation.json");
    write_json(&reports, &corr)?;
    outputs.push(corr);

    let flags = json!({
        "table": a.table.json(),
        "year_min": a.year_min,
        "year_max": a.year_max,
        "correlation": config,
    });
    write_manifest("authors", flags, None, &[&a.store, &a.norm], &outputs)?;
    Ok(Outcome::Done)
}

#[derive(Serialize)]
struct PairDistance {
    a: String,
    b: String,
    distance: f64,
}

#[derive(Serialize)]
struct CollapseReport {
    indicator: Indicator,
    groups: usize,
    max_distance: f64,
    pairs: Vec<PairDistance>,
}

fn survival(a: SurvivalArgs) -> Result<Outcome> {
    let corpus = load_saved(&a.store)?;
    let policy = &corpus.metadata.policy;
    let table = a.table.resolve(a.norm.as_deref(), &corpus, policy)?;
    let rescaled = rescale_corpus(&corpus, policy, &table)?;

    let value = |c: u64, c_f: f64| match a.indicator {
        Indicator::RawC => c as f64,
        Indicator::Cf => c_f,
    };
    let mut groups: BTreeMap<GroupKey, Vec<f64>> = BTreeMap::new();
    for p in &rescaled {
        groups.entry(p.group).or_default().push(value(p.c, p.c_f));
    }
    let selected: Vec<f64> = rescaled
        .iter()
        .filter(|p| a.category.is_none_or(|c| p.group.category == c))
        .filter(|p| a.year.is_none_or(|y| p.group.year == y))
        .map(|p| value(p.c, p.c_f))
        .collect();
    if selected.is_empty() {
        bail!("no eligible papers match the requested category/year");
    }
    survival_curve(&selected)?.write_csv(create(&a.out)?)?;

    let keys: Vec<&GroupKey> = groups.keys().collect();
    let mut pairs = Vec::new();
    for (i, ka) in keys.iter().enumerate() {
        for kb in &keys[i + 1..] {
            pairs.push(PairDistance {
                a: ka.to_string(),
                b: kb.to_string(),
                distance: collapse_distance(&groups[*ka], &groups[*kb])?,
            });
        }
    }
    let report = CollapseReport {
        indicator: a.indicator,
        groups: groups.len(),
        max_distance: pairs.iter().map(|p| p.distance).fold(0.0, f64::max),
        pairs,
    };
    let collapse = sibling(&a.out, "collapse.json");
    write_json(&report, &collapse)?;
    eprintln!(
        "{} groups, max pairwise distance {:.4}",
        report.groups, report.max_distance
    );

    let mut inputs: Vec<&Path> = vec![&a.store];
    if let Some(norm) = a.norm.as_deref() {
        inputs.push(norm);
    }
    let flags = json!({
        "table": a.table.json(),
        "indicator": a.indicator,
        "category": a.category,
        "year": a.year,
    });
    write_manifest("survival", flags, None, &inputs, &[a.out, collapse])?;
    Ok(Outcome::Done)
}

fn generate(a: GenerateArgs) -> Result<Outcome> {
    let text =
        fs::read_to_string(&a.spec).with_context(|| format!("cannot read {}", a.spec.display()))?;
    let spec = GenSpec::from_json(&text)?;
    let corpus = generate_corpus(&spec)?;
    write_corpus_file(&corpus.records, a.format, &a.out)?;
    eprintln!("generated {} papers into {}", corpus.len(), a.out.display());

    let mut outputs = vec![a.out.clone()];
    if let Some(path) = &a.truth_table {
        export_norm_table(&spec.ground_truth_table(a.statistic)?, path)?;
        outputs.push(path.clone());
    }
    let flags = json!({
        "format": a.format,
        "statistic": a.statistic,
        "truth_table": a.truth_table.is_some(),
    });
    write_manifest("generate", flags, Some(spec.seed), &[&a.spec], &outputs)?;
    Ok(Outcome::Done)
}
