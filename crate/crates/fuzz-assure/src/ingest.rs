//! Campaign ingestion: canonical JSONL, paired CSV, and coverage-map
//! directories into incidence record streams.
//!
//! Three formats cover the places incidence data actually lives:
//!
//! - **Canonical JSONL** (one object per line):
//!   `{"id": "t1", "species": ["edge:001234"], "order": 7}` with `order`
//!   optional. Blank lines are skipped. This is the round-trip format:
//!   [`emit_jsonl`] followed by [`parse_jsonl`] reproduces the record
//!   stream exactly.
//! - **Paired CSV**: header `input_id,species_id`, one pair per row, rows
//!   of the same input contiguous. The species field is everything after
//!   the first delimiter, so species ids may themselves contain the
//!   delimiter. Non-contiguous groups are an error, not a merge: silently
//!   re-opening a group would double-count `n`. Note CSV cannot express
//!   an input with an empty species set; use JSONL for campaigns where
//!   that matters.
//! - **Coverage-map directory**: one file per input (file name = input
//!   id), lines `EDGEID:COUNT` as written by coverage tracers. The count
//!   is ignored (incidence, not magnitude) and the species id becomes
//!   `edge:EDGEID`. Files are processed in lexicographic name order so
//!   ingestion order is reproducible.
//!
//! Species ids conventionally carry a namespace prefix (`edge:`,
//! `mutant:`, `crash:`) so mixed-objective campaigns coexist in one
//! snapshot. [`IngestOptions::species_prefix`] prepends a further
//! namespace verbatim, and [`IngestOptions::species_filter`] keeps only
//! species whose final id starts with a prefix. Filtering never drops the
//! input itself: an input whose species are all filtered away still
//! counts toward `n`, exactly like an input that found nothing.
//!
//! Malformed lines fail fast with file and line context by default;
//! [`IngestOptions::skip_bad_records`] tolerates and counts them instead.
//! Structural problems (missing header, non-contiguous CSV groups,
//! unreadable files) are never skippable.
//!
//! JSONL and coverage-directory ingestion are single-pass and use memory
//! proportional to the species count only. CSV contiguity checking also
//! remembers closed group ids (memory proportional to the input count);
//! that is the price of refusing to double-count `n`.

use std::collections::{BTreeSet, HashSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use thiserror::Error;

use crate::incidence::{CampaignSnapshot, IncidenceRecord};

/// Campaign data layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// Canonical JSONL, one record object per line.
    Jsonl,
    /// Paired CSV, `input_id,species_id` per row.
    Csv,
    /// Directory of per-input coverage map files.
    ShowmapDir,
}

/// Guesses the format from the path: directories are coverage
/// directories, `.csv` files are CSV, everything else is JSONL.
pub fn detect_format(path: &Path) -> Format {
    if path.is_dir() {
        Format::ShowmapDir
    } else if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
    {
        Format::Csv
    } else {
        Format::Jsonl
    }
}

/// Parsing knobs shared by all formats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestOptions {
    /// Prefix prepended verbatim to every species id (after any built-in
    /// prefix such as the coverage directory's `edge:`).
    pub species_prefix: Option<String>,
    /// Keep only species whose final id starts with this prefix. Inputs
    /// left without species still count toward `n`.
    pub species_filter: Option<String>,
    /// Tolerate malformed lines/rows, counting them in
    /// [`IngestStats::skipped`], instead of failing fast.
    pub skip_bad_records: bool,
    /// CSV field delimiter.
    pub delimiter: char,
    /// CSV input-id column name.
    pub input_column: String,
    /// CSV species-id column name.
    pub species_column: String,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self {
            species_prefix: None,
            species_filter: None,
            skip_bad_records: false,
            delimiter: ',',
            input_column: "input_id".to_string(),
            species_column: "species_id".to_string(),
        }
    }
}

/// Ingestion tallies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IngestStats {
    /// Records emitted (inputs ingested).
    pub records: u64,
    /// Malformed lines/rows tolerated under
    /// [`IngestOptions::skip_bad_records`].
    pub skipped: u64,
    /// Duplicate `(input, species)` pairs collapsed by set semantics
    /// (CSV only).
    pub duplicate_pairs: u64,
}

/// Parse failures, with enough context to find the offending byte.
#[derive(Debug, Error)]
pub enum ParseError {
    /// A single bad line or row; skippable under `skip_bad_records`.
    #[error("{path}: line {line}: malformed record: {message}")]
    MalformedLine {
        path: String,
        line: u64,
        message: String,
    },
    /// Rows of one input interleaved with another's; never skippable.
    #[error("{path}: line {line}: non-contiguous group {input_id:?}: rows for one input must be adjacent")]
    NonContiguousGroup {
        path: String,
        line: u64,
        input_id: String,
    },
    /// Header row missing or with unexpected column names.
    #[error("{path}: bad header: expected {expected:?}, found {found:?}")]
    BadHeader {
        path: String,
        expected: String,
        found: String,
    },
    /// Filesystem failure.
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
}

/// Applies built-in prefix, namespace prefix, and filter to one raw
/// species token. `None` means filtered out.
fn finalize_species(raw: &str, builtin: Option<&str>, opts: &IngestOptions) -> Option<String> {
    let mut id = match builtin {
        Some(p) => format!("{p}{raw}"),
        None => raw.to_string(),
    };
    if let Some(ns) = &opts.species_prefix {
        id = format!("{ns}{id}");
    }
    match &opts.species_filter {
        Some(f) if !id.starts_with(f.as_str()) => None,
        _ => Some(id),
    }
}

fn visit_jsonl<R: BufRead>(
    reader: R,
    path: &str,
    opts: &IngestOptions,
    mut sink: impl FnMut(IncidenceRecord),
) -> Result<IngestStats, ParseError> {
    let mut stats = IngestStats::default();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i as u64 + 1;
        let line = line.map_err(|source| ParseError::Io {
            path: path.to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<IncidenceRecord>(&line) {
            Ok(mut record) => {
                record.species = record
                    .species
                    .iter()
                    .filter_map(|s| finalize_species(s, None, opts))
                    .collect();
                stats.records += 1;
                sink(record);
            }
            Err(_) if opts.skip_bad_records => {
                stats.skipped += 1;
            }
            Err(e) => {
                return Err(ParseError::MalformedLine {
                    path: path.to_string(),
                    line: line_no,
                    message: e.to_string(),
                });
            }
        }
    }
    Ok(stats)
}

fn visit_csv<R: BufRead>(
    reader: R,
    path: &str,
    opts: &IngestOptions,
    mut sink: impl FnMut(IncidenceRecord),
) -> Result<IngestStats, ParseError> {
    let mut stats = IngestStats::default();
    let expected = format!(
        "{}{}{}",
        opts.input_column, opts.delimiter, opts.species_column
    );
    let mut lines = reader.lines().enumerate();
    let header = match lines.next() {
        Some((_, Ok(h))) => h,
        Some((_, Err(source))) => {
            return Err(ParseError::Io {
                path: path.to_string(),
                source,
            })
        }
        None => String::new(),
    };
    if header.trim_end() != expected {
        return Err(ParseError::BadHeader {
            path: path.to_string(),
            expected,
            found: header,
        });
    }
    let mut closed: HashSet<String> = HashSet::new();
    let mut current: Option<(String, BTreeSet<String>)> = None;
    let mut flush = |current: &mut Option<(String, BTreeSet<String>)>,
                     stats: &mut IngestStats,
                     closed: &mut HashSet<String>| {
        if let Some((id, species)) = current.take() {
            stats.records += 1;
            closed.insert(id.clone());
            sink(IncidenceRecord {
                id,
                species,
                order: None,
            });
        }
    };
    for (i, line) in lines {
        let line_no = i as u64 + 1;
        let line = line.map_err(|source| ParseError::Io {
            path: path.to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.splitn(2, opts.delimiter);
        let input_id = parts.next().unwrap_or("");
        let species_raw = parts.next();
        let (input_id, species_raw) = match (input_id, species_raw) {
            ("", _) | (_, None) | (_, Some("")) => {
                if opts.skip_bad_records {
                    stats.skipped += 1;
                    continue;
                }
                return Err(ParseError::MalformedLine {
                    path: path.to_string(),
                    line: line_no,
                    message: format!(
                        "expected two non-empty fields separated by {:?}",
                        opts.delimiter
                    ),
                });
            }
            (id, Some(sp)) => (id, sp),
        };
        let same_group = current.as_ref().is_some_and(|(id, _)| id == input_id);
        if !same_group {
            flush(&mut current, &mut stats, &mut closed);
            if closed.contains(input_id) {
                return Err(ParseError::NonContiguousGroup {
                    path: path.to_string(),
                    line: line_no,
                    input_id: input_id.to_string(),
                });
            }
            current = Some((input_id.to_string(), BTreeSet::new()));
        }
        let species = &mut current.as_mut().expect("group just opened").1;
        if let Some(id) = finalize_species(species_raw, None, opts) {
            if !species.insert(id) {
                stats.duplicate_pairs += 1;
            }
        }
    }
    flush(&mut current, &mut stats, &mut closed);
    Ok(stats)
}

fn visit_showmap_dir(
    dir: &Path,
    opts: &IngestOptions,
    mut sink: impl FnMut(IncidenceRecord),
) -> Result<IngestStats, ParseError> {
    let mut stats = IngestStats::default();
    let read_dir = std::fs::read_dir(dir).map_err(|source| ParseError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut files = Vec::new();
    for entry in read_dir {
        let entry = entry.map_err(|source| ParseError::Io {
            path: dir.display().to_string(),
            source,
        })?;
        if entry.path().is_file() {
            files.push(entry.path());
        }
    }
    files.sort_by_key(|p| p.file_name().map(|n| n.to_os_string()));
    for file in files {
        let label = file.display().to_string();
        let id = file
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let content = std::fs::read_to_string(&file).map_err(|source| ParseError::Io {
            path: label.clone(),
            source,
        })?;
        let mut species = BTreeSet::new();
        for (i, line) in content.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            // EDGEID:COUNT, splitting at the last colon so edge ids may
            // themselves contain colons.
            let edge = line
                .rsplit_once(':')
                .map(|(id, _count)| id)
                .filter(|e| !e.is_empty());
            match edge {
                Some(e) => {
                    if let Some(s) = finalize_species(e, Some("edge:"), opts) {
                        species.insert(s);
                    }
                }
                None if opts.skip_bad_records => stats.skipped += 1,
                None => {
                    return Err(ParseError::MalformedLine {
                        path: label,
                        line: i as u64 + 1,
                        message: "expected EDGEID:COUNT".to_string(),
                    });
                }
            }
        }
        stats.records += 1;
        sink(IncidenceRecord {
            id,
            species,
            order: None,
        });
    }
    Ok(stats)
}

/// Parses canonical JSONL into records, preserving line order.
///
/// `path` is a label for error messages only.
///
/// # Errors
/// [`ParseError::MalformedLine`] with the 1-based line number (unless
/// skipping is enabled), [`ParseError::Io`] on read failure.
pub fn parse_jsonl<R: BufRead>(
    reader: R,
    path: &str,
    opts: &IngestOptions,
) -> Result<(Vec<IncidenceRecord>, IngestStats), ParseError> {
    let mut records = Vec::new();
    let stats = visit_jsonl(reader, path, opts, |r| records.push(r))?;
    Ok((records, stats))
}

/// Parses paired CSV into records, one per contiguous input group.
///
/// # Errors
/// [`ParseError::BadHeader`], [`ParseError::NonContiguousGroup`],
/// [`ParseError::MalformedLine`], [`ParseError::Io`].
pub fn parse_csv<R: BufRead>(
    reader: R,
    path: &str,
    opts: &IngestOptions,
) -> Result<(Vec<IncidenceRecord>, IngestStats), ParseError> {
    let mut records = Vec::new();
    let stats = visit_csv(reader, path, opts, |r| records.push(r))?;
    Ok((records, stats))
}

/// Parses a directory of per-input coverage map files, one record per
/// file, in lexicographic file-name order.
///
/// # Errors
/// [`ParseError::Io`] naming the unreadable file,
/// [`ParseError::MalformedLine`] naming file and line.
pub fn parse_showmap_dir(
    dir: &Path,
    opts: &IngestOptions,
) -> Result<(Vec<IncidenceRecord>, IngestStats), ParseError> {
    let mut records = Vec::new();
    let stats = visit_showmap_dir(dir, opts, |r| records.push(r))?;
    Ok((records, stats))
}

fn open_buffered(path: &Path) -> Result<BufReader<File>, ParseError> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| ParseError::Io {
            path: path.display().to_string(),
            source,
        })
}

/// Streams a campaign file or directory directly into a snapshot without
/// materializing records (memory grows with species count only; CSV adds
/// the closed-group id set).
///
/// `format = None` auto-detects via [`detect_format`].
///
/// # Errors
/// As the underlying parser.
pub fn snapshot_from_path(
    path: &Path,
    format: Option<Format>,
    opts: &IngestOptions,
) -> Result<(CampaignSnapshot, IngestStats), ParseError> {
    let format = format.unwrap_or_else(|| detect_format(path));
    let mut snapshot = CampaignSnapshot::new();
    let label = path.display().to_string();
    let stats = match format {
        Format::Jsonl => visit_jsonl(open_buffered(path)?, &label, opts, |r| {
            snapshot.observe(&r);
        })?,
        Format::Csv => visit_csv(open_buffered(path)?, &label, opts, |r| {
            snapshot.observe(&r);
        })?,
        Format::ShowmapDir => visit_showmap_dir(path, opts, |r| {
            snapshot.observe(&r);
        })?,
    };
    Ok((snapshot, stats))
}

/// Reads a campaign file or directory into materialized records (needed
/// by input-resampling operations such as the bootstrap).
///
/// # Errors
/// As the underlying parser.
pub fn records_from_path(
    path: &Path,
    format: Option<Format>,
    opts: &IngestOptions,
) -> Result<(Vec<IncidenceRecord>, IngestStats), ParseError> {
    let format = format.unwrap_or_else(|| detect_format(path));
    let label = path.display().to_string();
    match format {
        Format::Jsonl => parse_jsonl(open_buffered(path)?, &label, opts),
        Format::Csv => parse_csv(open_buffered(path)?, &label, opts),
        Format::ShowmapDir => parse_showmap_dir(path, opts),
    }
}

/// Writes records as canonical JSONL: one compact object per line,
/// species sorted, `order` omitted when absent.
///
/// Parsing the output with default options reproduces the records
/// exactly.
///
/// # Errors
/// Propagates writer failures.
pub fn emit_jsonl<'a, W: Write>(
    records: impl IntoIterator<Item = &'a IncidenceRecord>,
    writer: &mut W,
) -> io::Result<()> {
    for record in records {
        let line = serde_json::to_string(record).expect("records serialize infallibly");
        writeln!(writer, "{line}")?;
    }
    Ok(())
}
