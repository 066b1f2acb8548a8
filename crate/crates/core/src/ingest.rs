//! Loading interaction logs from delimited text and checking log invariants.

use std::collections::HashSet;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use chrono::{DateTime, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Interaction, InteractionLog, Interner, Record, SubsetRole, Timestamp};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimestampFormat {
    EpochSeconds,
    EpochMillis,
    Iso8601,
}

impl FromStr for TimestampFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "epoch_seconds" | "seconds" | "s" => Ok(TimestampFormat::EpochSeconds),
            "epoch_millis" | "millis" | "ms" => Ok(TimestampFormat::EpochMillis),
            "iso8601" | "iso" => Ok(TimestampFormat::Iso8601),
            other => Err(format!("unknown timestamp format `{other}`")),
        }
    }
}

impl fmt::Display for TimestampFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TimestampFormat::EpochSeconds => "epoch_seconds",
            TimestampFormat::EpochMillis => "epoch_millis",
            TimestampFormat::Iso8601 => "iso8601",
        })
    }
}

/// Which header columns hold the interaction triple.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColumnMapping {
    pub user_column: String,
    pub item_column: String,
    pub timestamp_column: String,
    pub timestamp_format: TimestampFormat,
}

impl ColumnMapping {
    pub fn new(
        user_column: impl Into<String>,
        item_column: impl Into<String>,
        timestamp_column: impl Into<String>,
        timestamp_format: TimestampFormat,
    ) -> Result<Self> {
        let m = ColumnMapping {
            user_column: user_column.into(),
            item_column: item_column.into(),
            timestamp_column: timestamp_column.into(),
            timestamp_format,
        };
        m.validate()?;
        Ok(m)
    }

    /// The mapping of files written by [`write_csv`].
    pub fn canonical() -> Self {
        ColumnMapping {
            user_column: "user_id".into(),
            item_column: "item_id".into(),
            timestamp_column: "timestamp".into(),
            timestamp_format: TimestampFormat::EpochMillis,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cols = [&self.user_column, &self.item_column, &self.timestamp_column];
        if cols.iter().any(|c| c.is_empty()) {
            return Err(Error::InvalidMapping("column names must be non-empty".into()));
        }
        if cols[0] == cols[1] || cols[0] == cols[2] || cols[1] == cols[2] {
            return Err(Error::InvalidMapping(format!(
                "user/item/timestamp columns must be distinct, got `{}`, `{}`, `{}`",
                cols[0], cols[1], cols[2]
            )));
        }
        Ok(())
    }
}

/// Name of the ordinal column in canonical CSV files.
pub const ORDINAL_COLUMN: &str = "ordinal";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Skip rows with a wrong field count or bad timestamp instead of failing.
    pub skip_malformed: bool,
    /// Read ordinals from this column instead of using the row index.
    pub ordinal_column: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedLog {
    pub log: InteractionLog,
    pub skipped_rows: usize,
}

/// Parse a delimited file with default options.
pub fn parse_log(path: &Path, mapping: &ColumnMapping, role: SubsetRole) -> Result<InteractionLog> {
    parse_log_with(path, mapping, role, &ParseOptions::default()).map(|p| p.log)
}

pub fn parse_log_with(
    path: &Path,
    mapping: &ColumnMapping,
    role: SubsetRole,
    options: &ParseOptions,
) -> Result<ParsedLog> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_bytes(&bytes, path, mapping, role, options)
}

/// Parse in-memory delimited text. `source` only labels errors.
pub fn parse_bytes(
    bytes: &[u8],
    source: &Path,
    mapping: &ColumnMapping,
    role: SubsetRole,
    options: &ParseOptions,
) -> Result<ParsedLog> {
    mapping.validate()?;
    let delimiter = detect_delimiter(bytes);
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(true)
        .from_reader(bytes);
    let csv_err = |e: csv::Error| Error::Csv {
        path: source.to_path_buf(),
        source: e,
    };

    let header = reader.byte_headers().map_err(csv_err)?.clone();
    let column = |name: &str| -> Result<usize> {
        header
            .iter()
            .position(|h| trim_bom(h) == name.as_bytes())
            .ok_or_else(|| Error::MissingColumn {
                path: source.to_path_buf(),
                column: name.to_owned(),
            })
    };
    let user_col = column(&mapping.user_column)?;
    let item_col = column(&mapping.item_column)?;
    let time_col = column(&mapping.timestamp_column)?;
    let ordinal_col = options.ordinal_column.as_deref().map(column).transpose()?;
    let width = header.len();

    let mut users = Interner::default();
    let mut items = Interner::default();
    let mut records = Vec::new();
    let mut skipped = 0usize;
    let mut seen_ordinals = HashSet::new();
    let mut row = csv::ByteRecord::new();
    let mut row_index: u64 = 0;

    loop {
        match reader.read_byte_record(&mut row) {
            Ok(true) => {}
            Ok(false) => break,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                if options.skip_malformed && line > 0 {
                    skipped += 1;
                    row_index += 1;
                    continue;
                }
                return Err(malformed(source, line, e.to_string()));
            }
        }
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let ordinal_here = row_index;
        row_index += 1;

        let parsed = (|| -> std::result::Result<(u32, u32, Timestamp, u64), String> {
            if row.len() != width {
                return Err(format!("expected {width} fields, found {}", row.len()));
            }
            let field = |i: usize| -> std::result::Result<&str, String> {
                std::str::from_utf8(&row[i]).map_err(|_| format!("field {} is not valid UTF-8", i + 1))
            };
            let ts = parse_timestamp(field(time_col)?, mapping.timestamp_format)?;
            let ordinal = match ordinal_col {
                Some(c) => field(c)?
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| format!("unparseable ordinal `{}`", field(c).unwrap_or("")))?,
                None => ordinal_here,
            };
            let user = field(user_col)?;
            let item = field(item_col)?;
            Ok((users.intern(user), items.intern(item), ts, ordinal))
        })();

        match parsed {
            Ok((user, item, timestamp, ordinal)) => {
                if !seen_ordinals.insert(ordinal) {
                    return Err(malformed(source, line, format!("duplicate ordinal {ordinal}")));
                }
                records.push(Record {
                    user,
                    item,
                    timestamp,
                    ordinal,
                });
            }
            Err(_) if options.skip_malformed => skipped += 1,
            Err(reason) => return Err(malformed(source, line, reason)),
        }
    }

    if records.is_empty() {
        return Err(Error::EmptyLog);
    }
    let (users, umap) = users.finish();
    let (items, imap) = items.finish();
    for r in &mut records {
        r.user = umap[r.user as usize];
        r.item = imap[r.item as usize];
    }
    let log = InteractionLog::from_records(Arc::new(users), Arc::new(items), records, role);
    Ok(ParsedLog {
        log,
        skipped_rows: skipped,
    })
}

/// Parse a file written by [`write_csv`]; ordinals come from the file.
pub fn read_canonical_csv(path: &Path, role: SubsetRole) -> Result<InteractionLog> {
    let options = ParseOptions {
        skip_malformed: false,
        ordinal_column: Some(ORDINAL_COLUMN.into()),
    };
    parse_log_with(path, &ColumnMapping::canonical(), role, &options).map(|p| p.log)
}

/// Header names of a delimited file.
pub fn read_header(path: &Path) -> Result<Vec<String>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(detect_delimiter(&bytes))
        .from_reader(bytes.as_slice());
    let header = reader.headers().map_err(|e| Error::Csv {
        path: path.to_path_buf(),
        source: e,
    })?;
    Ok(header
        .iter()
        .map(|h| h.trim_start_matches('\u{feff}').to_owned())
        .collect())
}

/// Write `user_id,item_id,timestamp,ordinal` rows in canonical order with
/// epoch-millisecond timestamps.
pub fn write_csv<W: Write>(log: &InteractionLog, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let wrap = |e: csv::Error| Error::Csv {
        path: PathBuf::from("<output>"),
        source: e,
    };
    w.write_record(["user_id", "item_id", "timestamp", ORDINAL_COLUMN])
        .map_err(wrap)?;
    for i in log.iter() {
        let ts = i.timestamp.to_string();
        let ord = i.ordinal.to_string();
        w.write_record([i.user_id, i.item_id, &ts, &ord]).map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io("<output>", e))?;
    Ok(())
}

pub fn write_csv_file(log: &InteractionLog, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_csv(log, std::io::BufWriter::new(file))
}

fn detect_delimiter(bytes: &[u8]) -> u8 {
    let first_line = bytes.split(|&b| b == b'\n').next().unwrap_or_default();
    if first_line.contains(&b'\t') {
        b'\t'
    } else {
        b','
    }
}

fn trim_bom(field: &[u8]) -> &[u8] {
    field.strip_prefix("\u{feff}".as_bytes()).unwrap_or(field)
}

fn malformed(path: &Path, line: u64, reason: String) -> Error {
    Error::MalformedRow {
        path: path.to_path_buf(),
        line,
        reason,
    }
}

/// Normalize one timestamp field to epoch milliseconds.
pub fn parse_timestamp(raw: &str, format: TimestampFormat) -> std::result::Result<Timestamp, String> {
    let s = raw.trim();
    let bad = || format!("unparseable {format} timestamp `{s}`");
    let ms = match format {
        TimestampFormat::EpochSeconds => match s.parse::<i64>() {
            Ok(v) => v.checked_mul(1000).ok_or_else(bad)?,
            Err(_) => scaled_float(s, 1000.0).ok_or_else(bad)?,
        },
        TimestampFormat::EpochMillis => match s.parse::<i64>() {
            Ok(v) => v,
            Err(_) => scaled_float(s, 1.0).ok_or_else(bad)?,
        },
        TimestampFormat::Iso8601 => parse_iso8601(s).ok_or_else(bad)?,
    };
    if ms < 0 {
        return Err(format!("timestamp `{s}` is before 1970-01-01"));
    }
    Ok(ms)
}

fn scaled_float(s: &str, scale: f64) -> Option<i64> {
    let v = s.parse::<f64>().ok()? * scale;
    (v.is_finite() && v.abs() < 9.0e15).then(|| v.round() as i64)
}

fn parse_iso8601(s: &str) -> Option<i64> {
    if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
        return Some(dt.timestamp_millis());
    }
    for fmt in [
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%dT%H:%M",
        "%Y-%m-%d %H:%M",
    ] {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return Some(dt.and_utc().timestamp_millis());
        }
    }
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .ok()
        .map(|d| d.and_hms_opt(0, 0, 0).expect("midnight").and_utc().timestamp_millis())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    NegativeTimestamp,
    DuplicateOrdinal,
    NonCanonicalOrder,
    FragmentedUserIndex,
    EmptyUserSlice,
    UnindexedInteraction,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Ordinal of the first offending interaction, in stored order.
    pub ordinal: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Check every `InteractionLog` invariant. At most one violation per kind.
pub fn validate_log(log: &InteractionLog) -> ValidationReport {
    let records = log.records();
    let mut violations = Vec::new();
    let mut push = |kind, ordinal| violations.push(Violation { kind, ordinal });

    if let Some(r) = records.iter().find(|r| r.timestamp < 0) {
        push(ViolationKind::NegativeTimestamp, Some(r.ordinal));
    }

    let mut seen = HashSet::with_capacity(records.len());
    if let Some(r) = records.iter().find(|r| !seen.insert(r.ordinal)) {
        push(ViolationKind::DuplicateOrdinal, Some(r.ordinal));
    }

    // user handles sort like their strings, so comparing keys is enough
    if let Some(w) = records.windows(2).find(|w| w[0].key() >= w[1].key()) {
        push(ViolationKind::NonCanonicalOrder, Some(w[1].ordinal));
    }

    let slices = log.user_slices();
    let mut users_seen = HashSet::new();
    if let Some(s) = slices.iter().find(|s| !users_seen.insert(s.user)) {
        push(
            ViolationKind::FragmentedUserIndex,
            records.get(s.start).map(|r| r.ordinal),
        );
    }
    if let Some(s) = slices.iter().find(|s| s.start >= s.end) {
        push(ViolationKind::EmptyUserSlice, records.get(s.start).map(|r| r.ordinal));
    }

    let mut cover = vec![0u32; records.len()];
    for s in slices {
        for i in s.range() {
            if let Some(c) = cover.get_mut(i) {
                if records[i].user == s.user {
                    *c += 1;
                }
            }
        }
    }
    if let Some(i) = cover.iter().position(|&c| c != 1) {
        push(ViolationKind::UnindexedInteraction, Some(records[i].ordinal));
    }

    ValidationReport { violations }
}

/// Convenience for building logs in code: rows get ordinals 0.. in order.
pub fn log_from_rows<U, I>(
    rows: impl IntoIterator<Item = (U, I, Timestamp)>,
    role: SubsetRole,
) -> Result<InteractionLog>
where
    U: Into<String>,
    I: Into<String>,
{
    InteractionLog::from_interactions(
        rows.into_iter()
            .enumerate()
            .map(|(o, (u, i, t))| Interaction::new(u, i, t, o as u64)),
        role,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, format: TimestampFormat) -> Result<InteractionLog> {
        let mapping = ColumnMapping::new("user", "item", "ts", format).unwrap();
        parse_bytes(
            text.as_bytes(),
            Path::new("mem.csv"),
            &mapping,
            SubsetRole::Raw,
            &ParseOptions::default(),
        )
        .map(|p| p.log)
    }

    #[test]
    fn three_row_example_in_canonical_order() {
        let log = parse(
            "user,item,ts\nu1,i1,10\nu1,i2,5\nu2,i1,7\n",
            TimestampFormat::EpochSeconds,
        )
        .unwrap();
        let rows: Vec<_> = log
            .iter()
            .map(|i| (i.user_id, i.item_id, i.timestamp, i.ordinal))
            .collect();
        assert_eq!(
            rows,
            [("u1", "i2", 5000, 1), ("u1", "i1", 10000, 0), ("u2", "i1", 7000, 2)]
        );
    }

    #[test]
    fn header_only_is_empty_log() {
        assert!(matches!(
            parse("user,item,ts\n", TimestampFormat::EpochMillis),
            Err(Error::EmptyLog)
        ));
    }

    #[test]
    fn tab_delimiter_detected() {
        let log = parse("ts\tuser\titem\n1\ta\tx\n", TimestampFormat::EpochMillis).unwrap();
        assert_eq!(log.iter().next().unwrap().user_id, "a");
    }

    #[test]
    fn missing_column_is_named() {
        match parse("user,item,time\nu,i,1\n", TimestampFormat::EpochMillis) {
            Err(Error::MissingColumn { column, .. }) => assert_eq!(column, "ts"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_rows_report_line() {
        match parse("user,item,ts\nu,i,1\nu,i\n", TimestampFormat::EpochMillis) {
            Err(Error::MalformedRow { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match parse(
            "user,item,ts\nu,i,1\nu,i,1\nu,i,yesterday\n",
            TimestampFormat::EpochMillis,
        ) {
            Err(Error::MalformedRow { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn skip_malformed_counts_rows_and_keeps_source_ordinals() {
        let mapping = ColumnMapping::new("user", "item", "ts", TimestampFormat::EpochMillis).unwrap();
        let opts = ParseOptions {
            skip_malformed: true,
            ..Default::default()
        };
        let parsed = parse_bytes(
            b"user,item,ts\nu,a,1\nbroken\nu,b,x\nu,c,3\n",
            Path::new("m"),
            &mapping,
            SubsetRole::Raw,
            &opts,
        )
        .unwrap();
        assert_eq!(parsed.skipped_rows, 2);
        let ords: Vec<_> = parsed.log.iter().map(|i| i.ordinal).collect();
        assert_eq!(ords, [0, 3]);
    }

    #[test]
    fn timestamp_formats() {
        use TimestampFormat::*;
        assert_eq!(parse_timestamp("978300760", EpochSeconds), Ok(978_300_760_000));
        assert_eq!(parse_timestamp("1.5", EpochSeconds), Ok(1500));
        assert_eq!(parse_timestamp("42", EpochMillis), Ok(42));
        assert_eq!(parse_timestamp("1970-01-01T00:00:01Z", Iso8601), Ok(1000));
        assert_eq!(parse_timestamp("1970-01-01T01:00:00+01:00", Iso8601), Ok(0));
        assert_eq!(parse_timestamp("1970-01-02", Iso8601), Ok(86_400_000));
        assert_eq!(parse_timestamp("1970-01-01 00:00:00.250", Iso8601), Ok(250));
        assert!(parse_timestamp("-5", EpochMillis).is_err());
        assert!(parse_timestamp("soon", Iso8601).is_err());
    }

    #[test]
    fn mapping_columns_must_differ() {
        assert!(ColumnMapping::new("a", "a", "t", TimestampFormat::EpochMillis).is_err());
    }

    #[test]
    fn canonical_csv_round_trip() {
        let log = parse(
            "user,item,ts\nb,\"x,y\",3\na,z,3\nb,x,1\n",
            TimestampFormat::EpochMillis,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.csv");
        write_csv_file(&log, &path).unwrap();
        let back = read_canonical_csv(&path, SubsetRole::Raw).unwrap();
        assert_eq!(back, log);
    }

    #[test]
    fn validate_flags_duplicate_ordinal_once() {
        let log = InteractionLog::from_interactions_unchecked(
            [Interaction::new("a", "x", 1, 0), Interaction::new("b", "x", 1, 0)],
            SubsetRole::Raw,
        );
        let report = validate_log(&log);
        assert_eq!(
            report.violations,
            [Violation {
                kind: ViolationKind::DuplicateOrdinal,
                ordinal: Some(0)
            }]
        );
    }

    #[test]
    fn canonical_log_validates() {
        let log = log_from_rows([("b", "x", 2), ("a", "y", 1), ("b", "z", 2)], SubsetRole::Raw).unwrap();
        assert!(validate_log(&log).is_valid());
    }
}
