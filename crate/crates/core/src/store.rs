//! Corpus ingestion from JSONL/CSV, the versioned corpus store, and the
//! norm-table CSV format.
//!
//! Raw corpus rows carry the fields
//! `paper_id, year, doc_type, pacs, citations, authors`. In CSV, `pacs` and
//! `authors` are `;`-joined lists. Malformed rows are counted per reason and
//! skipped; only duplicate ids and a fully unusable file abort a load.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::format::sig6;
use crate::model::{
    is_eligible, parse_pacs, Category, DocType, EligibilityPolicy, Granularity, PaperRecord,
};
use crate::normalize::{GroupKey, GroupStats, NormTable, Statistic};

pub const STORE_SCHEMA_VERSION: u32 = 1;
pub const NORM_TABLE_HEADER: [&str; 5] = ["category", "year", "n_papers", "mean_c0", "median_c0"];

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusMetadata {
    pub source: String,
    /// Free-form snapshot label (e.g. the citation harvest date).
    pub snapshot: Option<String>,
    /// Caller-supplied; left empty unless given so that stores stay reproducible.
    pub ingested_at: Option<String>,
    pub policy: EligibilityPolicy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub records: Vec<PaperRecord>,
    pub metadata: CorpusMetadata,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn eligible<'a>(
        &'a self,
        policy: &'a EligibilityPolicy,
    ) -> impl Iterator<Item = &'a PaperRecord> + 'a {
        self.records.iter().filter(move |r| is_eligible(r, policy))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Jsonl,
    Csv,
}

impl FromStr for CorpusFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "jsonl" => Ok(Self::Jsonl),
            "csv" => Ok(Self::Csv),
            _ => Err(Error::InvalidArgument(format!(
                "unknown corpus format {s:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub total_rows: usize,
    pub accepted: usize,
    pub rejected_by_reason: BTreeMap<String, usize>,
}

impl IngestReport {
    pub fn rejected(&self) -> usize {
        self.rejected_by_reason.values().sum()
    }

    fn reject(&mut self, reason: Reject) {
        *self
            .rejected_by_reason
            .entry(reason.as_str().to_string())
            .or_default() += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Reject {
    MalformedRow,
    MissingField,
    InvalidPaperId,
    InvalidYear,
    InvalidCitations,
    NegativeCitations,
    UnknownDocType,
    MalformedPacs,
    InvalidAuthors,
    MissingAuthors,
}

impl Reject {
    fn as_str(self) -> &'static str {
        match self {
            Reject::MalformedRow => "malformed_row",
            Reject::MissingField => "missing_field",
            Reject::InvalidPaperId => "invalid_paper_id",
            Reject::InvalidYear => "invalid_year",
            Reject::InvalidCitations => "invalid_citations",
            Reject::NegativeCitations => "negative_citations",
            Reject::UnknownDocType => "unknown_doc_type",
            Reject::MalformedPacs => "malformed_pacs",
            Reject::InvalidAuthors => "invalid_authors",
            Reject::MissingAuthors => "missing_authors",
        }
    }
}

/// Field values of one row before validation.
struct RawRow<'a> {
    paper_id: Option<&'a str>,
    year: Option<Num<'a>>,
    doc_type: Option<&'a str>,
    pacs: Option<Vec<&'a str>>,
    citations: Option<Num<'a>>,
    authors: Option<Vec<&'a str>>,
}

/// A numeric field as given: JSON number or text.
#[derive(Clone, Copy)]
enum Num<'a> {
    Json(&'a serde_json::Number),
    Text(&'a str),
}

impl Num<'_> {
    fn as_i64(self) -> Option<i64> {
        match self {
            Num::Json(n) => n.as_i64().or_else(|| {
                n.as_f64()
                    .filter(|f| f.fract() == 0.0 && f.abs() < 9.0e15)
                    .map(|f| f as i64)
            }),
            Num::Text(s) => s.trim().parse().ok(),
        }
    }
}

fn validate_row(
    raw: RawRow<'_>,
    policy: &EligibilityPolicy,
) -> std::result::Result<PaperRecord, Reject> {
    let paper_id = raw.paper_id.ok_or(Reject::MissingField)?.trim();
    if paper_id.is_empty() {
        return Err(Reject::InvalidPaperId);
    }
    let year = raw.year.ok_or(Reject::MissingField)?;
    let year = year
        .as_i64()
        .and_then(|y| i32::try_from(y).ok())
        .ok_or(Reject::InvalidYear)?;
    let doc_type: DocType = raw
        .doc_type
        .ok_or(Reject::MissingField)?
        .parse()
        .map_err(|_| Reject::UnknownDocType)?;
    let citations = raw
        .citations
        .ok_or(Reject::MissingField)?
        .as_i64()
        .ok_or(Reject::InvalidCitations)?;
    if citations < 0 {
        return Err(Reject::NegativeCitations);
    }
    let pacs = raw
        .pacs
        .ok_or(Reject::MissingField)?
        .into_iter()
        .map(parse_pacs)
        .collect::<Result<Vec<_>>>()
        .map_err(|_| Reject::MalformedPacs)?;
    let authors: Vec<String> = raw
        .authors
        .ok_or(Reject::MissingField)?
        .into_iter()
        .map(|a| a.trim().to_string())
        .collect();
    if authors.iter().any(String::is_empty) {
        return Err(Reject::InvalidAuthors);
    }
    let record = PaperRecord {
        paper_id: paper_id.to_string(),
        year,
        doc_type,
        pacs,
        citations: citations as u64,
        authors,
    };
    // Authorless records are kept only when they never enter statistics.
    if record.authors.is_empty() && is_eligible(&record, policy) {
        return Err(Reject::MissingAuthors);
    }
    Ok(record)
}

fn str_list(value: Option<&Value>) -> Option<std::result::Result<Vec<&str>, ()>> {
    let arr = value?.as_array();
    Some(
        arr.ok_or(())
            .and_then(|a| a.iter().map(|v| v.as_str().ok_or(())).collect()),
    )
}

fn json_row(line: &str, policy: &EligibilityPolicy) -> std::result::Result<PaperRecord, Reject> {
    let value: Value = serde_json::from_str(line).map_err(|_| Reject::MalformedRow)?;
    let obj = value.as_object().ok_or(Reject::MalformedRow)?;
    let num = |key: &str, bad: Reject| -> std::result::Result<Option<Num<'_>>, Reject> {
        match obj.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::Number(n)) => Ok(Some(Num::Json(n))),
            Some(Value::String(s)) => Ok(Some(Num::Text(s))),
            Some(_) => Err(bad),
        }
    };
    let text = |key: &str, bad: Reject| -> std::result::Result<Option<&str>, Reject> {
        match obj.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(_) => Err(bad),
        }
    };
    let raw = RawRow {
        paper_id: text("paper_id", Reject::InvalidPaperId)?,
        year: num("year", Reject::InvalidYear)?,
        doc_type: text("doc_type", Reject::UnknownDocType)?,
        pacs: str_list(obj.get("pacs"))
            .transpose()
            .map_err(|_| Reject::MalformedPacs)?,
        citations: num("citations", Reject::InvalidCitations)?,
        authors: str_list(obj.get("authors"))
            .transpose()
            .map_err(|_| Reject::InvalidAuthors)?,
    };
    validate_row(raw, policy)
}

fn split_list(field: &str) -> Vec<&str> {
    field
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

/// Accumulates validated rows, enforcing id uniqueness.
struct Loader {
    records: Vec<PaperRecord>,
    seen: HashSet<String>,
    report: IngestReport,
}

impl Loader {
    fn new() -> Self {
        Self {
            records: Vec::new(),
            seen: HashSet::new(),
            report: IngestReport::default(),
        }
    }

    fn push(&mut self, row: std::result::Result<PaperRecord, Reject>) -> Result<()> {
        self.report.total_rows += 1;
        match row {
            Ok(record) => {
                if !self.seen.insert(record.paper_id.clone()) {
                    return Err(Error::DuplicateId(record.paper_id));
                }
                self.report.accepted += 1;
                self.records.push(record);
            }
            Err(reason) => self.report.reject(reason),
        }
        Ok(())
    }
}

pub fn read_jsonl<R: BufRead>(
    reader: R,
    policy: &EligibilityPolicy,
) -> Result<(Vec<PaperRecord>, IngestReport)> {
    let mut loader = Loader::new();
    for line in reader.lines() {
        let line = line.map_err(|e| Error::MalformedStore(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        loader.push(json_row(&line, policy))?;
    }
    Ok((loader.records, loader.report))
}

pub fn read_csv<R: Read>(
    reader: R,
    policy: &EligibilityPolicy,
) -> Result<(Vec<PaperRecord>, IngestReport)> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h.trim() == name);
    let cols = [
        col("paper_id"),
        col("year"),
        col("doc_type"),
        col("pacs"),
        col("citations"),
        col("authors"),
    ];
    let mut loader = Loader::new();
    for row in rdr.records() {
        let row = match row {
            Ok(row) => row,
            Err(e) if e.is_io_error() => return Err(e.into()),
            Err(_) => {
                loader.push(Err(Reject::MalformedRow))?;
                continue;
            }
        };
        if row.len() != headers.len() {
            loader.push(Err(Reject::MalformedRow))?;
            continue;
        }
        let get = |i: usize| cols[i].and_then(|c| row.get(c));
        let raw = RawRow {
            paper_id: get(0),
            year: get(1).map(Num::Text),
            doc_type: get(2),
            pacs: get(3).map(split_list),
            citations: get(4).map(Num::Text),
            authors: get(5).map(split_list),
        };
        loader.push(validate_row(raw, policy))?;
    }
    Ok((loader.records, loader.report))
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::UnreadableFile {
        path: path.to_path_buf(),
        source,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::UnwritableFile {
            path: path.to_path_buf(),
            source,
        })
}

fn unwritable(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |source| Error::UnwritableFile {
        path: path.to_path_buf(),
        source,
    }
}

/// Loads a raw corpus file. `policy` is recorded in the corpus metadata and
/// decides whether an authorless row may be kept (only if ineligible).
pub fn load_corpus(
    path: &Path,
    format: CorpusFormat,
    policy: &EligibilityPolicy,
) -> Result<(Corpus, IngestReport)> {
    policy.validate()?;
    let file = open(path)?;
    let (records, report) = match format {
        CorpusFormat::Jsonl => read_jsonl(BufReader::new(file), policy)?,
        CorpusFormat::Csv => read_csv(BufReader::new(file), policy)?,
    };
    if records.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let metadata = CorpusMetadata {
        source: path.display().to_string(),
        snapshot: None,
        ingested_at: None,
        policy: policy.clone(),
    };
    Ok((Corpus { records, metadata }, report))
}

#[derive(Serialize)]
struct JsonlRow<'a> {
    paper_id: &'a str,
    year: i32,
    doc_type: &'static str,
    pacs: Vec<String>,
    citations: u64,
    authors: &'a [String],
}

/// Writes records in the raw JSONL or CSV layout accepted by [`load_corpus`].
pub fn write_records<W: Write>(
    records: &[PaperRecord],
    format: CorpusFormat,
    out: W,
) -> Result<()> {
    match format {
        CorpusFormat::Jsonl => {
            let mut out = out;
            for r in records {
                let row = JsonlRow {
                    paper_id: &r.paper_id,
                    year: r.year,
                    doc_type: r.doc_type.name(),
                    pacs: r.pacs.iter().map(ToString::to_string).collect(),
                    citations: r.citations,
                    authors: &r.authors,
                };
                serde_json::to_writer(&mut out, &row)?;
                out.write_all(b"\n").map_err(csv::Error::from)?;
            }
            out.flush().map_err(csv::Error::from)?;
        }
        CorpusFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record([
                "paper_id",
                "year",
                "doc_type",
                "pacs",
                "citations",
                "authors",
            ])?;
            for r in records {
                let pacs: Vec<String> = r.pacs.iter().map(ToString::to_string).collect();
                w.write_record([
                    r.paper_id.as_str(),
                    &r.year.to_string(),
                    r.doc_type.name(),
                    &pacs.join(";"),
                    &r.citations.to_string(),
                    &r.authors.join(";"),
                ])?;
            }
            w.flush().map_err(csv::Error::from)?;
        }
    }
    Ok(())
}

pub fn write_corpus_file(records: &[PaperRecord], format: CorpusFormat, path: &Path) -> Result<()> {
    let mut out = create(path)?;
    write_records(records, format, &mut out)?;
    out.flush().map_err(unwritable(path))
}

#[derive(Serialize)]
struct StoreRef<'a> {
    schema_version: u32,
    metadata: &'a CorpusMetadata,
    records: &'a [PaperRecord],
}

#[derive(Deserialize)]
struct StoreHeader {
    schema_version: u32,
}

#[derive(Deserialize)]
struct StoreOwned {
    metadata: CorpusMetadata,
    records: Vec<PaperRecord>,
}

pub fn save_corpus_to<W: Write>(corpus: &Corpus, mut out: W) -> Result<()> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    serde_json::to_writer(
        &mut out,
        &StoreRef {
            schema_version: STORE_SCHEMA_VERSION,
            metadata: &corpus.metadata,
            records: &corpus.records,
        },
    )?;
    out.write_all(b"\n").map_err(csv::Error::from)?;
    Ok(())
}

/// Persists a corpus as a versioned JSON document.
pub fn save_corpus(corpus: &Corpus, path: &Path) -> Result<()> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut out = create(path)?;
    save_corpus_to(corpus, &mut out)?;
    out.flush().map_err(unwritable(path))
}

pub fn load_saved_from<R: Read>(mut reader: R) -> Result<Corpus> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| Error::MalformedStore(e.to_string()))?;
    let header: StoreHeader =
        serde_json::from_str(&text).map_err(|e| Error::MalformedStore(e.to_string()))?;
    if header.schema_version != STORE_SCHEMA_VERSION {
        return Err(Error::VersionMismatch {
            found: header.schema_version,
            expected: STORE_SCHEMA_VERSION,
        });
    }
    let store: StoreOwned =
        serde_json::from_str(&text).map_err(|e| Error::MalformedStore(e.to_string()))?;
    let mut seen = HashSet::new();
    for r in &store.records {
        if !seen.insert(r.paper_id.as_str()) {
            return Err(Error::DuplicateId(r.paper_id.clone()));
        }
    }
    if store.records.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(Corpus {
        records: store.records,
        metadata: store.metadata,
    })
}

pub fn load_saved(path: &Path) -> Result<Corpus> {
    load_saved_from(BufReader::new(open(path)?))
}

/// One row per group, sorted by (category, year).
pub fn write_norm_table<W: Write>(table: &NormTable, out: W) -> Result<()> {
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(NORM_TABLE_HEADER)?;
    for (key, stats) in &table.groups {
        w.write_record([
            key.category.to_string(),
            key.year.to_string(),
            stats.n_papers.to_string(),
            sig6(stats.mean),
            sig6(stats.median),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn export_norm_table(table: &NormTable, path: &Path) -> Result<()> {
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut out = create(path)?;
    write_norm_table(table, &mut out)?;
    out.flush().map_err(unwritable(path))
}

/// Reads a norm-table CSV. The file does not record granularity or the
/// statistic, so the caller supplies both.
pub fn read_norm_table<R: Read>(
    reader: R,
    granularity: Granularity,
    statistic: Statistic,
) -> Result<NormTable> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.iter().map(str::trim).ne(NORM_TABLE_HEADER) {
        return Err(Error::MalformedTable(format!(
            "expected header {:?}, found {:?}",
            NORM_TABLE_HEADER.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut table = NormTable::new(granularity, statistic);
    for (line, row) in rdr.records().enumerate() {
        let row = row?;
        let bad = |what: &str| Error::MalformedTable(format!("data row {}: {what}", line + 1));
        let field = |i: usize| {
            row.get(i)
                .map(str::trim)
                .ok_or_else(|| bad("missing field"))
        };
        let category: Category = field(0)?.parse().map_err(|_| bad("category"))?;
        if granularity == Granularity::Broad10 && !category.is_broad() {
            return Err(bad("category is not a broad category"));
        }
        let key = GroupKey::new(category, field(1)?.parse().map_err(|_| bad("year"))?);
        let n_papers: u64 = field(2)?.parse().map_err(|_| bad("n_papers"))?;
        let mean: f64 = field(3)?.parse().map_err(|_| bad("mean_c0"))?;
        let median: f64 = field(4)?.parse().map_err(|_| bad("median_c0"))?;
        if n_papers == 0 || mean.is_nan() || mean <= 0.0 || median.is_nan() || median <= 0.0 {
            return Err(bad("n_papers and normalization factors must be positive"));
        }
        if table
            .groups
            .insert(
                key,
                GroupStats {
                    n_papers,
                    mean,
                    median,
                },
            )
            .is_some()
        {
            return Err(bad("duplicate group"));
        }
    }
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    Ok(table)
}

pub fn import_norm_table(
    path: &Path,
    granularity: Granularity,
    statistic: Statistic,
) -> Result<NormTable> {
    read_norm_table(BufReader::new(open(path)?), granularity, statistic)
}
