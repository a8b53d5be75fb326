//! Publication records, PACS codes and the eligibility rules that decide
//! which records enter the statistics.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A PACS classification code of the form `XX.YY.ZZ`.
///
/// `XX` and `YY` are two-digit numeric fields. `ZZ` is a short alphanumeric
/// token that may carry `+`, `-` or `.` (e.g. `01.78.+p`, `01.40.G-`,
/// `02.50.2r`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PacsCode {
    xx: u8,
    yy: u8,
    zz: String,
}

impl PacsCode {
    pub fn new(xx: u8, yy: u8, zz: impl Into<String>) -> Result<Self> {
        let zz = zz.into();
        let code = Self { xx, yy, zz };
        // Route through the parser so both constructors share one rule set.
        code.to_string().parse()
    }

    pub fn xx(&self) -> u8 {
        self.xx
    }

    pub fn yy(&self) -> u8 {
        self.yy
    }

    pub fn zz(&self) -> &str {
        &self.zz
    }

    pub fn category(&self, granularity: Granularity) -> Category {
        category_of(self, granularity)
    }
}

/// Parses a PACS code. Surrounding whitespace is ignored.
pub fn parse_pacs(text: &str) -> Result<PacsCode> {
    let malformed = |reason| Error::MalformedPacs {
        text: text.to_string(),
        reason,
    };
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(malformed("empty"));
    }
    let mut fields = trimmed.splitn(3, '.');
    let (Some(xx), Some(yy), Some(zz)) = (fields.next(), fields.next(), fields.next()) else {
        return Err(malformed("expected three fields XX.YY.ZZ"));
    };
    let xx = two_digits(xx).ok_or_else(|| malformed("XX must be exactly two digits"))?;
    let yy = two_digits(yy).ok_or_else(|| malformed("YY must be exactly two digits"))?;
    let zz_len = zz.chars().count();
    if !(1..=3).contains(&zz_len) {
        return Err(malformed("ZZ must have 1 to 3 characters"));
    }
    if !zz.chars().all(|c| c.is_ascii_graphic()) {
        return Err(malformed("ZZ must be printable and contain no spaces"));
    }
    Ok(PacsCode {
        xx,
        yy,
        zz: zz.to_string(),
    })
}

fn two_digits(field: &str) -> Option<u8> {
    let bytes = field.as_bytes();
    if bytes.len() != 2 || !bytes.iter().all(u8::is_ascii_digit) {
        return None;
    }
    Some((bytes[0] - b'0') * 10 + (bytes[1] - b'0'))
}

impl FromStr for PacsCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_pacs(s)
    }
}

impl fmt::Display for PacsCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}.{:02}.{}", self.xx, self.yy, self.zz)
    }
}

impl Serialize for PacsCode {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PacsCode {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_pacs(&text).map_err(serde::de::Error::custom)
    }
}

/// How finely the `XX` field is split into categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Granularity {
    /// Ten categories from the first digit of `XX`.
    Broad10,
    /// One hundred categories, the whole `XX` field.
    Fine100,
}

impl FromStr for Granularity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "broad" | "broad10" => Ok(Self::Broad10),
            "fine" | "fine100" => Ok(Self::Fine100),
            _ => Err(Error::InvalidArgument(format!("unknown granularity {s:?}"))),
        }
    }
}

/// A subject category derived from a PACS code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Category(u8);

/// The ten broad PACS sections.
pub const BROAD_CATEGORIES: [(u8, &str); 10] = [
    (0, "General"),
    (10, "The Physics of Elementary Particles and Fields"),
    (20, "Nuclear Physics"),
    (30, "Atomic and Molecular Physics"),
    (
        40,
        "Electromagnetism, Optics, Acoustics, Heat Transfer, Classical Mechanics, and Fluid Dynamics",
    ),
    (50, "Physics of Gases, Plasmas, and Electric Discharges"),
    (
        60,
        "Condensed Matter: Structural, Mechanical and Thermal Properties",
    ),
    (
        70,
        "Condensed Matter: Electronic Structure, Electrical, Magnetic, and Optical Properties",
    ),
    (
        80,
        "Interdisciplinary Physics and Related Areas of Science and Technology",
    ),
    (90, "Geophysics, Astronomy, and Astrophysics"),
];

impl Category {
    /// Any code in 0..=99 is a valid fine category.
    pub fn new(code: u8) -> Result<Self> {
        if code > 99 {
            return Err(Error::InvalidArgument(format!(
                "category code {code} outside 0..=99"
            )));
        }
        Ok(Self(code))
    }

    pub fn code(self) -> u8 {
        self.0
    }

    pub fn is_broad(self) -> bool {
        self.0.is_multiple_of(10)
    }

    /// The broad category containing this one.
    pub fn broad(self) -> Category {
        Category(self.0 / 10 * 10)
    }

    /// Section title of the enclosing broad category.
    pub fn description(self) -> &'static str {
        BROAD_CATEGORIES[usize::from(self.0 / 10)].1
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}", self.0)
    }
}

impl FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let code: u8 = s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("invalid category {s:?}")))?;
        Category::new(code)
    }
}

pub fn category_of(code: &PacsCode, granularity: Granularity) -> Category {
    match granularity {
        Granularity::Broad10 => Category(code.xx / 10 * 10),
        Granularity::Fine100 => Category(code.xx),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DocType {
    Letter,
    RapidCommunication,
    BriefReport,
    RegularArticle,
    Editorial,
    Review,
    Comment,
    Reply,
    Erratum,
    Other,
}

impl DocType {
    pub const ALL: [DocType; 10] = [
        DocType::Letter,
        DocType::RapidCommunication,
        DocType::BriefReport,
        DocType::RegularArticle,
        DocType::Editorial,
        DocType::Review,
        DocType::Comment,
        DocType::Reply,
        DocType::Erratum,
        DocType::Other,
    ];

    /// Standard research publications.
    pub const RESEARCH: [DocType; 4] = [
        DocType::Letter,
        DocType::RapidCommunication,
        DocType::BriefReport,
        DocType::RegularArticle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DocType::Letter => "Letter",
            DocType::RapidCommunication => "RapidCommunication",
            DocType::BriefReport => "BriefReport",
            DocType::RegularArticle => "RegularArticle",
            DocType::Editorial => "Editorial",
            DocType::Review => "Review",
            DocType::Comment => "Comment",
            DocType::Reply => "Reply",
            DocType::Erratum => "Erratum",
            DocType::Other => "Other",
        }
    }
}

impl fmt::Display for DocType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DocType {
    type Err = Error;

    /// Case-insensitive match on the variant name.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        DocType::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown doc_type {s:?}")))
    }
}

/// One publication.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperRecord {
    pub paper_id: String,
    pub year: i32,
    pub doc_type: DocType,
    /// In author order; the first code is the principal one.
    pub pacs: Vec<PacsCode>,
    pub citations: u64,
    pub authors: Vec<String>,
}

impl PaperRecord {
    pub fn principal_pacs(&self) -> Option<&PacsCode> {
        self.pacs.first()
    }
}

/// Category of the first listed PACS code.
pub fn principal_category(record: &PaperRecord, granularity: Granularity) -> Result<Category> {
    record
        .principal_pacs()
        .map(|code| category_of(code, granularity))
        .ok_or_else(|| Error::NoPacs {
            paper_id: record.paper_id.clone(),
        })
}

/// Which records take part in the statistics.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EligibilityPolicy {
    pub year_min: i32,
    pub year_max: i32,
    pub require_pacs: bool,
    pub min_citations: u64,
    pub allowed_doc_types: BTreeSet<DocType>,
}

impl Default for EligibilityPolicy {
    fn default() -> Self {
        Self {
            year_min: 1985,
            year_max: 2009,
            require_pacs: true,
            min_citations: 1,
            allowed_doc_types: DocType::RESEARCH.into_iter().collect(),
        }
    }
}

impl EligibilityPolicy {
    /// Default policy restricted to the 1985-2006 window used for author studies.
    pub fn author_study() -> Self {
        Self {
            year_max: 2006,
            ..Self::default()
        }
    }

    pub fn with_years(mut self, year_min: i32, year_max: i32) -> Self {
        self.year_min = year_min;
        self.year_max = year_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.year_min > self.year_max {
            return Err(Error::InvalidPolicy(format!(
                "year_min {} > year_max {}",
                self.year_min, self.year_max
            )));
        }
        Ok(())
    }

    pub fn contains_year(&self, year: i32) -> bool {
        (self.year_min..=self.year_max).contains(&year)
    }
}

pub fn is_eligible(record: &PaperRecord, policy: &EligibilityPolicy) -> bool {
    policy.contains_year(record.year)
        && policy.allowed_doc_types.contains(&record.doc_type)
        && record.citations >= policy.min_citations
        && (!policy.require_pacs || !record.pacs.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn record(doc_type: DocType, year: i32, citations: u64, pacs: &[&str]) -> PaperRecord {
        PaperRecord {
            paper_id: "p".into(),
            year,
            doc_type,
            pacs: pacs.iter().map(|p| p.parse().unwrap()).collect(),
            citations,
            authors: vec!["a".into()],
        }
    }

    #[test]
    fn parses_examples() {
        let code = parse_pacs("05.70.Ln").unwrap();
        assert_eq!((code.xx(), code.yy(), code.zz()), (5, 70, "Ln"));
        let code = parse_pacs("64.60.Ht").unwrap();
        assert_eq!((code.xx(), code.yy(), code.zz()), (64, 60, "Ht"));
        for odd in ["02.50.2r", "01.78.+p", "01.40.G-", "01.30.-y"] {
            assert_eq!(parse_pacs(odd).unwrap().to_string(), odd);
        }
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "5.70Ln",
            "",
            "   ",
            "05.70",
            "5.70.Ln",
            "05.7.Ln",
            "ab.70.Ln",
            "05.70.",
            "05.70.Lnxx",
            "05.70.L n",
            "+5.70.Ln",
        ] {
            assert!(
                matches!(parse_pacs(bad), Err(Error::MalformedPacs { .. })),
                "{bad:?} should be rejected"
            );
        }
    }

    #[test]
    fn zz_may_contain_a_dot() {
        let code = parse_pacs("98.80.k.").unwrap();
        assert_eq!(code.zz(), "k.");
    }

    #[test]
    fn categories() {
        let c = |s: &str, g| category_of(&parse_pacs(s).unwrap(), g).code();
        assert_eq!(c("05.70.Ln", Granularity::Broad10), 0);
        assert_eq!(c("02.50.2r", Granularity::Broad10), 0);
        assert_eq!(c("64.60.Ht", Granularity::Broad10), 60);
        assert_eq!(c("64.60.Ht", Granularity::Fine100), 64);
    }

    #[test]
    fn broad_categories_have_descriptions() {
        for (code, title) in BROAD_CATEGORIES {
            let cat = Category::new(code).unwrap();
            assert!(cat.is_broad());
            assert_eq!(cat.description(), title);
        }
        assert_eq!(
            Category::new(64).unwrap().description(),
            BROAD_CATEGORIES[6].1
        );
        assert!(Category::new(100).is_err());
    }

    #[test]
    fn principal_is_first_listed() {
        let r = record(DocType::Letter, 1990, 3, &["64.60.Ht", "05.70.Ln"]);
        assert_eq!(
            principal_category(&r, Granularity::Broad10).unwrap().code(),
            60
        );
        let r = record(DocType::Letter, 1990, 3, &["05.70.Ln"]);
        assert_eq!(
            principal_category(&r, Granularity::Broad10).unwrap().code(),
            0
        );
        let r = record(DocType::Letter, 1990, 3, &[]);
        assert!(matches!(
            principal_category(&r, Granularity::Broad10),
            Err(Error::NoPacs { .. })
        ));
    }

    #[test]
    fn eligibility_examples() {
        let policy = EligibilityPolicy::default();
        assert!(is_eligible(
            &record(DocType::Letter, 1990, 3, &["05.70.Ln"]),
            &policy
        ));
        assert!(!is_eligible(
            &record(DocType::Letter, 1990, 0, &["05.70.Ln"]),
            &policy
        ));
        assert!(!is_eligible(
            &record(DocType::Erratum, 1990, 10, &["05.70.Ln"]),
            &policy
        ));
        assert!(!is_eligible(
            &record(DocType::Letter, 1984, 10, &["05.70.Ln"]),
            &policy
        ));
        assert!(!is_eligible(
            &record(DocType::Letter, 2010, 10, &["05.70.Ln"]),
            &policy
        ));
        assert!(!is_eligible(
            &record(DocType::Letter, 1990, 10, &[]),
            &policy
        ));
    }

    #[test]
    fn doc_type_is_case_insensitive() {
        assert_eq!("letter".parse::<DocType>().unwrap(), DocType::Letter);
        assert_eq!(
            "RAPIDCOMMUNICATION".parse::<DocType>().unwrap(),
            DocType::RapidCommunication
        );
        assert!("Letters".parse::<DocType>().is_err());
    }

    #[test]
    fn policy_validation() {
        assert!(EligibilityPolicy::default().validate().is_ok());
        assert!(EligibilityPolicy::default()
            .with_years(2000, 1999)
            .validate()
            .is_err());
    }

    fn arb_code() -> impl Strategy<Value = PacsCode> {
        (0u8..100, 0u8..100, "[A-Za-z0-9+.-]{1,3}").prop_map(|(xx, yy, zz)| PacsCode { xx, yy, zz })
    }

    fn arb_record() -> impl Strategy<Value = PaperRecord> {
        (
            1980i32..2015,
            prop::sample::select(DocType::ALL.to_vec()),
            0u64..5,
            prop::collection::vec(arb_code(), 0..3),
        )
            .prop_map(|(year, doc_type, citations, pacs)| PaperRecord {
                paper_id: "p".into(),
                year,
                doc_type,
                pacs,
                citations,
                authors: vec![],
            })
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(code in arb_code()) {
            let text = code.to_string();
            prop_assert_eq!(parse_pacs(&text).unwrap(), code.clone());
            prop_assert_eq!(parse_pacs(&format!("  {text}\t")).unwrap().to_string(), text);
        }

        #[test]
        fn category_ranges(code in arb_code()) {
            let broad = category_of(&code, Granularity::Broad10).code();
            prop_assert!(broad.is_multiple_of(10) && broad <= 90);
            prop_assert_eq!(category_of(&code, Granularity::Fine100).code(), code.xx());
        }

        #[test]
        fn relaxing_policy_is_monotone(rec in arb_record(), which in 0usize..5) {
            let strict = EligibilityPolicy::default();
            let mut loose = strict.clone();
            match which {
                0 => loose.year_min -= 3,
                1 => loose.year_max += 3,
                2 => loose.require_pacs = false,
                3 => loose.min_citations = 0,
                _ => { loose.allowed_doc_types.insert(DocType::Erratum); }
            }
            if is_eligible(&rec, &strict) {
                prop_assert!(is_eligible(&rec, &loose));
            }
        }
    }
}
