//! Candidate CSV ingestion.
//!
//! Every file starts with `id,group` followed by schema-specific columns.
//! Errors carry the 1-based file line and the offending column, and a file
//! with any bad row yields no pool at all.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use poset_screen::{Candidate, Interval, Region, ScoreInterval};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schema {
    /// `id,group,score`
    Scores,
    /// `id,group,low,high`
    Intervals,
    /// `id,group,low_1,high_1,...,low_d,high_d`
    Regions,
    /// `id,group,eval_1,...,eval_m`; short rows and trailing blanks allowed.
    Evaluations,
}

impl Schema {
    pub const ALL: [Schema; 4] = [Schema::Scores, Schema::Intervals, Schema::Regions, Schema::Evaluations];

    pub fn name(self) -> &'static str {
        match self {
            Schema::Scores => "scores",
            Schema::Intervals => "intervals",
            Schema::Regions => "regions",
            Schema::Evaluations => "evaluations",
        }
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Schema {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Schema::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| format!("unknown schema {s:?} (expected scores, intervals, regions or evaluations)"))
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Header { line: u64, message: String },
    #[error("line {line}, column {column} ({name}): {message}")]
    Cell {
        line: u64,
        column: usize,
        name: String,
        message: String,
    },
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("line {line}: duplicate id {id:?}, first seen on line {first}")]
    DuplicateId { line: u64, id: String, first: u64 },
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("no candidate rows")]
    Empty,
}

/// Ranges read straight from the file.
#[derive(Debug, Clone, PartialEq)]
pub enum Supplied {
    Interval(Interval),
    Region(Region),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pool {
    pub schema: Schema,
    /// In file order.
    pub candidates: Vec<Candidate<f64>>,
    /// Intervals or boxes, for the `intervals` and `regions` schemas.
    pub supplied: BTreeMap<String, Supplied>,
    /// File line of each candidate.
    pub lines: BTreeMap<String, u64>,
}

impl Pool {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// Id to group label; candidates without a group are left out.
    pub fn groups(&self) -> BTreeMap<String, String> {
        self.candidates
            .iter()
            .filter_map(|c| c.group.clone().map(|g| (c.id.clone(), g)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestOptions {
    /// Header name of the group column.
    pub group_column: String,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self { group_column: "group".to_owned() }
    }
}

pub fn ingest_candidates(path: &Path, schema: Schema) -> Result<Pool, IngestError> {
    ingest_with(path, schema, &IngestOptions::default())
}

pub fn ingest_with(path: &Path, schema: Schema, options: &IngestOptions) -> Result<Pool, IngestError> {
    let file = std::fs::File::open(path).map_err(|source| IngestError::Io {
        path: path.display().to_string(),
        source,
    })?;
    ingest_reader(file, schema, options)
}

pub fn ingest_reader<R: std::io::Read>(
    reader: R,
    schema: Schema,
    options: &IngestOptions,
) -> Result<Pool, IngestError> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    let header_line = header.position().map_or(1, |p| p.line());
    let names: Vec<String> = header.iter().map(str::to_owned).collect();
    let width = check_header(&names, schema, &options.group_column)
        .map_err(|message| IngestError::Header { line: header_line, message })?;

    let mut pool = Pool {
        schema,
        candidates: Vec::new(),
        supplied: BTreeMap::new(),
        lines: BTreeMap::new(),
    };
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row = Row { record: &record, names: &names, line };
        let (candidate, supplied) = row.parse(schema, width)?;
        if let Some(&first) = pool.lines.get(&candidate.id) {
            return Err(IngestError::DuplicateId { line, id: candidate.id, first });
        }
        pool.lines.insert(candidate.id.clone(), line);
        if let Some(s) = supplied {
            pool.supplied.insert(candidate.id.clone(), s);
        }
        pool.candidates.push(candidate);
    }
    if pool.candidates.is_empty() {
        return Err(IngestError::Empty);
    }
    Ok(pool)
}

/// Checks the header and returns the expected number of value columns.
fn check_header(names: &[String], schema: Schema, group_column: &str) -> Result<usize, String> {
    if names.len() < 3 || names[0] != "id" || names[1] != group_column {
        return Err(format!(
            "header must start with id,{group_column} followed by {schema} columns, found {:?}",
            names.join(",")
        ));
    }
    let rest: Vec<&str> = names[2..].iter().map(String::as_str).collect();
    let expected: Vec<String> = match schema {
        Schema::Scores => vec!["score".into()],
        Schema::Intervals => vec!["low".into(), "high".into()],
        Schema::Regions => {
            if rest.len() % 2 != 0 {
                return Err(format!("regions header needs low/high pairs, found {} bound columns", rest.len()));
            }
            (1..=rest.len() / 2)
                .flat_map(|d| [format!("low_{d}"), format!("high_{d}")])
                .collect()
        }
        Schema::Evaluations => (1..=rest.len()).map(|m| format!("eval_{m}")).collect(),
    };
    if rest != expected.iter().map(String::as_str).collect::<Vec<_>>() {
        return Err(format!(
            "{schema} header expects columns {:?} after id,{group_column}, found {:?}",
            expected.join(","),
            rest.join(",")
        ));
    }
    Ok(expected.len())
}

struct Row<'a> {
    record: &'a csv::StringRecord,
    names: &'a [String],
    line: u64,
}

impl Row<'_> {
    fn cell_error(&self, index: usize, message: impl Into<String>) -> IngestError {
        IngestError::Cell {
            line: self.line,
            column: index + 1,
            name: self.names.get(index).cloned().unwrap_or_default(),
            message: message.into(),
        }
    }

    fn number(&self, index: usize) -> Result<f64, IngestError> {
        let raw = self.record.get(index).unwrap_or("");
        if raw.is_empty() {
            return Err(self.cell_error(index, "missing value"));
        }
        let x: f64 = raw
            .parse()
            .map_err(|_| self.cell_error(index, format!("not a number: {raw:?}")))?;
        if !x.is_finite() {
            return Err(self.cell_error(index, format!("not finite: {raw:?}")));
        }
        Ok(x)
    }

    fn interval(&self, low: usize) -> Result<Interval, IngestError> {
        let lo = self.number(low)?;
        let hi = self.number(low + 1)?;
        ScoreInterval::new(lo, hi)
            .map_err(|_| self.cell_error(low + 1, format!("high {hi} is below low {lo}")))
    }

    fn parse(&self, schema: Schema, width: usize) -> Result<(Candidate<f64>, Option<Supplied>), IngestError> {
        let fields = self.record.len();
        let expected = width + 2;
        let ragged_ok = schema == Schema::Evaluations && fields >= 3 && fields <= expected;
        if fields != expected && !ragged_ok {
            return Err(IngestError::Row {
                line: self.line,
                message: format!("expected {expected} fields, found {fields}"),
            });
        }
        let id = self.record.get(0).unwrap_or("");
        if id.is_empty() {
            return Err(self.cell_error(0, "empty id"));
        }
        let mut cand = Candidate::new(id);
        let group = self.record.get(1).unwrap_or("");
        if !group.is_empty() {
            cand.group = Some(group.to_owned());
        }
        let supplied = match schema {
            Schema::Scores => {
                cand.raw_score = Some(self.number(2)?);
                None
            }
            Schema::Intervals => Some(Supplied::Interval(self.interval(2)?)),
            Schema::Regions => {
                let intervals = (0..width / 2)
                    .map(|d| self.interval(2 + 2 * d))
                    .collect::<Result<Vec<_>, _>>()?;
                Some(Supplied::Region(Region::new(intervals).expect("at least one dimension")))
            }
            Schema::Evaluations => {
                let filled = (2..fields)
                    .rev()
                    .find(|&i| !self.record[i].is_empty())
                    .map_or(2, |i| i + 1);
                if filled == 2 {
                    return Err(self.cell_error(2, "no evaluations"));
                }
                cand.evaluations = (2..filled).map(|i| self.number(i)).collect::<Result<_, _>>()?;
                None
            }
        };
        Ok((cand, supplied))
    }
}
