//! The seven-field access log record: schema, validation, canonical binary
//! encoding, CSV parsing and writing, and seeded synthetic generation.
//!
//! ## File format
//!
//! UTF-8 CSV with the exact header
//! `timestamp,node,id,ref_id,user,activity,resource`, one record per line.
//! The five leading fields are positive integers (timestamp in milliseconds
//! since epoch); `activity` and `resource` are non-empty strings that may not
//! contain commas or newlines, so no quoting is needed.
//!
//! ## Binary encoding
//!
//! Canonical and byte-stable: the five integer fields as fixed-width
//! big-endian u64, then `activity` and `resource` as u32-length-prefixed
//! UTF-8. Two equal records always encode to identical bytes.

use std::fmt;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::codec::{self, CodecError, Reader};

/// Exact header line required at the top of every log CSV file.
pub const CSV_HEADER: &str = "timestamp,node,id,ref_id,user,activity,resource";

/// One of the seven record fields. `ALL` is also the fixed tie-break order
/// used whenever two fields compare equal (query planning, sorting).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Timestamp,
    Node,
    Id,
    RefId,
    User,
    Activity,
    Resource,
}

impl Field {
    pub const ALL: [Field; 7] = [
        Field::Timestamp,
        Field::Node,
        Field::Id,
        Field::RefId,
        Field::User,
        Field::Activity,
        Field::Resource,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Field::Timestamp => "timestamp",
            Field::Node => "node",
            Field::Id => "id",
            Field::RefId => "ref_id",
            Field::User => "user",
            Field::Activity => "activity",
            Field::Resource => "resource",
        }
    }

    pub fn parse(s: &str) -> Option<Field> {
        Field::ALL.iter().copied().find(|f| f.name() == s)
    }

    /// True for the five integer fields; they sort numerically and their
    /// query values must parse as positive integers.
    pub fn is_numeric(self) -> bool {
        !matches!(self, Field::Activity | Field::Resource)
    }

    /// Position in the fixed tie-break order.
    pub fn rank(self) -> usize {
        Field::ALL.iter().position(|f| *f == self).unwrap()
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RecordError {
    #[error("{0} must be a positive integer")]
    NonPositive(&'static str),
    #[error("{0} must be non-empty")]
    EmptyText(&'static str),
    #[error("{0} must not contain commas or newlines")]
    UnsafeText(&'static str),
}

/// One access-log entry. Integer fields are all >= 1; text fields are
/// non-empty and comma/newline free.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LogRecord {
    pub timestamp: u64,
    pub node: u64,
    pub id: u64,
    pub ref_id: u64,
    pub user: u64,
    pub activity: String,
    pub resource: String,
}

impl LogRecord {
    pub fn new(
        timestamp: u64,
        node: u64,
        id: u64,
        ref_id: u64,
        user: u64,
        activity: impl Into<String>,
        resource: impl Into<String>,
    ) -> Result<Self, RecordError> {
        let r = LogRecord {
            timestamp,
            node,
            id,
            ref_id,
            user,
            activity: activity.into(),
            resource: resource.into(),
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<(), RecordError> {
        for (name, v) in [
            ("timestamp", self.timestamp),
            ("node", self.node),
            ("id", self.id),
            ("ref_id", self.ref_id),
            ("user", self.user),
        ] {
            if v == 0 {
                return Err(RecordError::NonPositive(name));
            }
        }
        for (name, s) in [("activity", &self.activity), ("resource", &self.resource)] {
            if s.is_empty() {
                return Err(RecordError::EmptyText(name));
            }
            if s.contains(',') || s.contains('\n') || s.contains('\r') {
                return Err(RecordError::UnsafeText(name));
            }
        }
        Ok(())
    }

    /// Canonical dictionary key for a field: decimal with no leading zeros
    /// for the integer fields, the raw string otherwise.
    pub fn key(&self, field: Field) -> String {
        match field {
            Field::Timestamp => self.timestamp.to_string(),
            Field::Node => self.node.to_string(),
            Field::Id => self.id.to_string(),
            Field::RefId => self.ref_id.to_string(),
            Field::User => self.user.to_string(),
            Field::Activity => self.activity.clone(),
            Field::Resource => self.resource.clone(),
        }
    }

    /// Numeric value of an integer field; None for the text fields.
    pub fn numeric(&self, field: Field) -> Option<u64> {
        match field {
            Field::Timestamp => Some(self.timestamp),
            Field::Node => Some(self.node),
            Field::Id => Some(self.id),
            Field::RefId => Some(self.ref_id),
            Field::User => Some(self.user),
            Field::Activity | Field::Resource => None,
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(48 + self.activity.len() + self.resource.len());
        codec::put_u64(&mut out, self.timestamp);
        codec::put_u64(&mut out, self.node);
        codec::put_u64(&mut out, self.id);
        codec::put_u64(&mut out, self.ref_id);
        codec::put_u64(&mut out, self.user);
        codec::put_str(&mut out, &self.activity);
        codec::put_str(&mut out, &self.resource);
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, DecodeError> {
        let mut r = Reader::new(bytes);
        let record = LogRecord {
            timestamp: r.read_u64()?,
            node: r.read_u64()?,
            id: r.read_u64()?,
            ref_id: r.read_u64()?,
            user: r.read_u64()?,
            activity: r.read_string()?,
            resource: r.read_string()?,
        };
        r.finish()?;
        record.validate()?;
        Ok(record)
    }

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.timestamp, self.node, self.id, self.ref_id, self.user, self.activity, self.resource
        )
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecodeError {
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error("decoded record is invalid: {0}")]
    Invalid(#[from] RecordError),
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("missing or wrong header, expected `{CSV_HEADER}`")]
    MissingHeader,
    #[error("line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn parse_int(name: &'static str, s: &str) -> Result<u64, String> {
    let v: u64 = s
        .trim()
        .parse()
        .map_err(|_| format!("{name} is not an integer: `{s}`"))?;
    if v == 0 {
        return Err(format!("{name} must be a positive integer"));
    }
    Ok(v)
}

/// Parse one CSV row (no header). The error string carries the reason only;
/// callers attach the line number.
pub fn parse_row(line: &str) -> Result<LogRecord, String> {
    let parts: Vec<&str> = line.split(',').collect();
    if parts.len() != 7 {
        return Err(format!("expected 7 fields, found {}", parts.len()));
    }
    let record = LogRecord::new(
        parse_int("timestamp", parts[0])?,
        parse_int("node", parts[1])?,
        parse_int("id", parts[2])?,
        parse_int("ref_id", parts[3])?,
        parse_int("user", parts[4])?,
        parts[5],
        parts[6],
    )
    .map_err(|e| e.to_string())?;
    Ok(record)
}

/// Parse a full CSV document. Line numbers in errors are 1-based and include
/// the header line.
pub fn parse_csv(text: &str) -> Result<Vec<LogRecord>, ParseError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end() == CSV_HEADER => {}
        _ => return Err(ParseError::MissingHeader),
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let record = parse_row(line).map_err(|reason| ParseError::MalformedRow {
            line: i + 2,
            reason,
        })?;
        records.push(record);
    }
    Ok(records)
}

pub fn parse_log_file(path: &Path) -> Result<Vec<LogRecord>, ParseError> {
    let text = fs::read_to_string(path)?;
    parse_csv(&text)
}

pub fn to_csv_string(records: &[LogRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 48 + CSV_HEADER.len() + 1);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&r.to_csv_row());
        out.push('\n');
    }
    out
}

pub fn write_log_file(path: &Path, records: &[LogRecord]) -> std::io::Result<()> {
    fs::write(path, to_csv_string(records))
}

// ---------------------------------------------------------------------------
// Synthetic data generation
// ---------------------------------------------------------------------------

/// Distinct-value counts per categorical field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cardinalities {
    pub node: u64,
    pub id: u64,
    pub ref_id: u64,
    pub user: u64,
    pub activity: usize,
    pub resource: usize,
}

impl Default for Cardinalities {
    fn default() -> Self {
        Cardinalities {
            node: 4,
            id: 20_000,
            ref_id: 500,
            user: 10,
            activity: 4,
            resource: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub record_count: usize,
    /// Inclusive (lo, hi) bounds for timestamps, in milliseconds.
    pub timestamp_range: (u64, u64),
    pub cardinalities: Cardinalities,
    pub seed: u64,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec {
            record_count: 10_000,
            // roughly a week around late March 2018, matching the magnitude
            // of real access-log timestamps
            timestamp_range: (1_522_152_000_000, 1_522_560_000_000),
            cardinalities: Cardinalities::default(),
            seed: 42,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid generator spec: {0}")]
pub struct SpecError(pub String);

impl GeneratorSpec {
    pub fn validate(&self) -> Result<(), SpecError> {
        let (lo, hi) = self.timestamp_range;
        if lo == 0 {
            return Err(SpecError("timestamp range must start at >= 1".into()));
        }
        if lo > hi {
            return Err(SpecError(format!("timestamp range {lo}..{hi} is inverted")));
        }
        let c = &self.cardinalities;
        if c.node == 0 || c.id == 0 || c.ref_id == 0 || c.user == 0 {
            return Err(SpecError("integer cardinalities must be >= 1".into()));
        }
        if c.activity == 0 || c.resource == 0 {
            return Err(SpecError("string cardinalities must be >= 1".into()));
        }
        Ok(())
    }
}

const BASE_ACTIVITIES: [&str; 6] = ["read", "write", "update", "delete", "query", "export"];
const BASE_RESOURCES: [&str; 8] = [
    "TOPMed",
    "MOD_WormBase",
    "GTEx",
    "ClinVar",
    "dbGaP",
    "gnomAD",
    "ENCODE",
    "HapMap",
];

/// Pool of `n` activity names; the first few are realistic verbs, the rest
/// are numbered fillers.
pub fn activity_pool(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| match BASE_ACTIVITIES.get(i) {
            Some(s) => s.to_string(),
            None => format!("activity-{}", i + 1),
        })
        .collect()
}

/// Pool of `n` resource names; the first few are public genomic datasets.
pub fn resource_pool(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| match BASE_RESOURCES.get(i) {
            Some(s) => s.to_string(),
            None => format!("resource-{}", i + 1),
        })
        .collect()
}

/// Deterministic synthetic workload: timestamps uniform over the configured
/// range, categorical fields uniform over cardinality-sized pools.
pub fn generate(spec: &GeneratorSpec) -> Result<Vec<LogRecord>, SpecError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (lo, hi) = spec.timestamp_range;
    let c = &spec.cardinalities;
    let activities = activity_pool(c.activity);
    let resources = resource_pool(c.resource);

    let mut records = Vec::with_capacity(spec.record_count);
    for _ in 0..spec.record_count {
        records.push(LogRecord {
            timestamp: rng.gen_range(lo..=hi),
            node: rng.gen_range(1..=c.node),
            id: rng.gen_range(1..=c.id),
            ref_id: rng.gen_range(1..=c.ref_id),
            user: rng.gen_range(1..=c.user),
            activity: activities[rng.gen_range(0..activities.len())].clone(),
            resource: resources[rng.gen_range(0..resources.len())].clone(),
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_record() -> LogRecord {
        LogRecord::new(1522257730000, 3, 12, 40345, 7, "read", "TOPMed").unwrap()
    }

    #[test]
    fn parse_row_assembles_all_fields() {
        let r = parse_row("1522257730000,3,12,40345,7,read,TOPMed").unwrap();
        assert_eq!(r, sample_record());
    }

    #[test]
    fn zero_timestamp_is_malformed() {
        let err = parse_row("0,3,12,40345,7,read,TOPMed").unwrap_err();
        assert!(err.contains("timestamp"));
    }

    #[test]
    fn header_only_file_parses_to_empty() {
        let records = parse_csv("timestamp,node,id,ref_id,user,activity,resource\n").unwrap();
        assert!(records.is_empty());
    }

    #[test]
    fn missing_header_is_rejected() {
        assert!(matches!(
            parse_csv("1,1,1,1,1,read,TOPMed\n"),
            Err(ParseError::MissingHeader)
        ));
    }

    #[test]
    fn malformed_row_reports_line_number() {
        let text = format!("{CSV_HEADER}\n1,1,1,1,1,read,TOPMed\n1,1,1,1,,read,TOPMed\n");
        match parse_csv(&text) {
            Err(ParseError::MalformedRow { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected MalformedRow, got {other:?}"),
        }
    }

    #[test]
    fn encode_decode_round_trip() {
        let r = sample_record();
        assert_eq!(LogRecord::decode(&r.encode()).unwrap(), r);
    }

    #[test]
    fn equal_records_encode_identically() {
        let a = sample_record();
        let b = sample_record();
        assert_eq!(a.encode(), b.encode());
    }

    #[test]
    fn decode_rejects_corrupt_bytes() {
        let mut bytes = sample_record().encode();
        bytes.truncate(10);
        assert!(LogRecord::decode(&bytes).is_err());
        // zeroing the timestamp violates positivity
        let mut bytes = sample_record().encode();
        bytes[..8].fill(0);
        assert!(matches!(
            LogRecord::decode(&bytes),
            Err(DecodeError::Invalid(RecordError::NonPositive("timestamp")))
        ));
    }

    #[test]
    fn csv_write_parse_round_trip() {
        let records = generate(&GeneratorSpec {
            record_count: 200,
            ..GeneratorSpec::default()
        })
        .unwrap();
        let parsed = parse_csv(&to_csv_string(&records)).unwrap();
        assert_eq!(parsed, records);
    }

    #[test]
    fn generator_is_deterministic() {
        let spec = GeneratorSpec {
            record_count: 500,
            ..GeneratorSpec::default()
        };
        assert_eq!(generate(&spec).unwrap(), generate(&spec).unwrap());
    }

    #[test]
    fn generator_honors_count_and_range() {
        let spec = GeneratorSpec {
            record_count: 2_000,
            timestamp_range: (1_000, 9_999),
            ..GeneratorSpec::default()
        };
        let records = generate(&spec).unwrap();
        assert_eq!(records.len(), 2_000);
        for r in &records {
            assert!((1_000..=9_999).contains(&r.timestamp));
            r.validate().unwrap();
        }
    }

    #[test]
    fn generator_rejects_bad_specs() {
        let mut spec = GeneratorSpec::default();
        spec.timestamp_range = (10, 5);
        assert!(generate(&spec).is_err());
        let mut spec = GeneratorSpec::default();
        spec.cardinalities.user = 0;
        assert!(generate(&spec).is_err());
    }

    #[test]
    fn field_parse_and_order() {
        for f in Field::ALL {
            assert_eq!(Field::parse(f.name()), Some(f));
        }
        assert_eq!(Field::parse("bogus"), None);
        assert_eq!(Field::ALL[0], Field::Timestamp);
        assert_eq!(Field::ALL[6], Field::Resource);
    }

    #[test]
    fn bulk_round_trip_10k_seeded() {
        let records = generate(&GeneratorSpec {
            record_count: 10_000,
            seed: 9,
            ..GeneratorSpec::default()
        })
        .unwrap();
        for r in &records {
            assert_eq!(&LogRecord::decode(&r.encode()).unwrap(), r);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn encode_is_a_bijection_on_valid_records(
            ts in 1u64..u64::MAX / 2,
            node in 1u64..1000,
            id in 1u64..1_000_000,
            ref_id in 1u64..1_000_000,
            user in 1u64..1000,
            activity in "[a-zA-Z0-9_ .-]{1,20}",
            resource in "[a-zA-Z0-9_ .-]{1,20}",
        ) {
            let r = LogRecord::new(ts, node, id, ref_id, user, activity, resource).unwrap();
            let bytes = r.encode();
            prop_assert_eq!(LogRecord::decode(&bytes).unwrap(), r.clone());
            prop_assert_eq!(r.encode(), bytes);
        }
    }
}
