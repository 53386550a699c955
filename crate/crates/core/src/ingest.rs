//! Results-table ingestion.
//!
//! Three delimited-text schemas are accepted, each with a fixed header row:
//!
//! | schema   | header                                                |
//! |----------|-------------------------------------------------------|
//! | `direct` | `method,encode_s,decode_s,ratio`                      |
//! | `bpsp`   | `method,encode_s,decode_s,bpsp[,depth_bits]`          |
//! | `speeds` | `method,comp_speed_mbps,decomp_speed_mbps,ratio`      |
//!
//! The `speeds` schema also needs a `# corpus_bytes=N` pragma line. Lines
//! of the form `# note: ...` carry caveats through to reports. Other lines
//! starting with `#` are comments. Numbers use a dot as decimal
//! separator regardless of locale.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::score::{MethodMetrics, MetricsTable};
use crate::units::{
    decode_time_from_speed, encode_time_from_speed, ratio_from_bpsp, CorpusSize,
    DEFAULT_DEPTH_BITS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schema {
    #[default]
    Direct,
    Bpsp,
    Speeds,
}

impl Schema {
    fn columns(self) -> &'static [&'static str] {
        match self {
            Schema::Direct => &["method", "encode_s", "decode_s", "ratio"],
            Schema::Bpsp => &["method", "encode_s", "decode_s", "bpsp", "depth_bits"],
            Schema::Speeds => &["method", "comp_speed_mbps", "decomp_speed_mbps", "ratio"],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Schema::Direct => "direct",
            Schema::Bpsp => "bpsp",
            Schema::Speeds => "speeds",
        }
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Schema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Schema::Direct),
            "bpsp" => Ok(Schema::Bpsp),
            "speeds" => Ok(Schema::Speeds),
            _ => Err(Error::Usage(format!(
                "unknown schema `{s}` (expected direct, bpsp or speeds)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RowValues {
    Direct {
        encode_s: f64,
        decode_s: f64,
        ratio: f64,
    },
    Bpsp {
        encode_s: f64,
        decode_s: f64,
        bpsp: f64,
        depth_bits: f64,
    },
    Speeds {
        comp_mbps: f64,
        decomp_mbps: f64,
        ratio: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultsRow {
    pub method: String,
    /// 1-based line in the source text.
    pub line: u64,
    pub values: RowValues,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultsDocument {
    pub schema: Schema,
    pub rows: Vec<ResultsRow>,
    pub corpus_bytes: Option<u64>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Suffix repeated method labels with ` #2`, ` #3`, ... instead of failing.
    pub allow_duplicates: bool,
}

pub fn parse_results(path: &Path, schema: Schema, options: ParseOptions) -> Result<ResultsDocument> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
    parse_results_str(&text, schema, options)
}

type Pragmas = HashMap<String, (u64, String)>;

fn parse_pragmas(text: &str) -> (Pragmas, Vec<String>) {
    let mut pragmas = HashMap::new();
    let mut notes = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let Some(body) = line.trim_start().strip_prefix('#') else {
            continue;
        };
        if let Some(note) = body.trim_start().strip_prefix("note:") {
            notes.push(note.trim().to_owned());
        } else if let Some((key, value)) = body.split_once('=') {
            let key = key.trim();
            if key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') && !key.is_empty() {
                pragmas.insert(key.to_owned(), (i as u64 + 1, value.trim().to_owned()));
            }
        }
    }
    (pragmas, notes)
}

pub fn parse_results_str(text: &str, schema: Schema, options: ParseOptions) -> Result<ResultsDocument> {
    let (pragmas, notes) = parse_pragmas(text);
    let corpus_bytes = match pragmas.get("corpus_bytes") {
        Some((line, v)) => {
            let n: u64 = v.parse().map_err(|_| Error::Parse {
                line: *line,
                message: format!("corpus_bytes `{v}` is not a byte count"),
            })?;
            if n == 0 {
                return Err(Error::invalid(format!("line {line}, corpus_bytes"), 0.0));
            }
            Some(n)
        }
        None => None,
    };
    if schema == Schema::Speeds && corpus_bytes.is_none() {
        return Err(Error::Parse {
            line: 1,
            message: "speeds schema requires a `# corpus_bytes=N` line".into(),
        });
    }

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    // The reader's own line counter skips blank lines; count from the byte offset.
    let line_at = |pos: Option<&csv::Position>| {
        pos.map(|p| {
            let bytes = text.as_bytes();
            let mut end = (p.byte() as usize).min(bytes.len());
            while end < bytes.len() {
                match bytes[end] {
                    b'\n' | b'\r' => end += 1,
                    b'#' => {
                        end += bytes[end..].iter().position(|b| *b == b'\n').unwrap_or(0) + 1;
                    }
                    _ => break,
                }
            }
            let end = end.min(bytes.len());
            bytes[..end].iter().filter(|b| **b == b'\n').count() as u64 + 1
        })
        .unwrap_or(0)
    };
    let csv_err = |e: csv::Error| Error::Parse {
        line: line_at(e.position()),
        message: e.to_string(),
    };

    let mut records = reader.records();
    let header = records.next().transpose().map_err(csv_err)?.ok_or(Error::Parse {
        line: 1,
        message: format!("missing header row for {schema} schema"),
    })?;
    let header_line = line_at(header.position());
    let expected = schema.columns();
    let names: Vec<&str> = header.iter().collect();
    let has_depth = schema == Schema::Bpsp && names.len() == 5;
    let required = if schema == Schema::Bpsp { 4 } else { expected.len() };
    let matches = names.len() == required || has_depth;
    if !matches || names.iter().zip(expected).any(|(a, b)| a != b) {
        return Err(Error::Parse {
            line: header_line,
            message: format!(
                "header `{}` does not match the {schema} schema (`{}`)",
                names.join(","),
                expected[..required].join(",")
            ),
        });
    }

    let mut rows = Vec::new();
    let mut seen: HashMap<String, u32> = HashMap::new();
    for record in records {
        let record = record.map_err(csv_err)?;
        let line = line_at(record.position());
        if record.len() != names.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", names.len(), record.len()),
            });
        }
        let method = record[0].to_owned();
        if method.is_empty() {
            return Err(Error::Parse {
                line,
                message: "empty method name".into(),
            });
        }
        let number = |col: usize| -> Result<f64> {
            let raw = &record[col];
            let v: f64 = raw.parse().map_err(|_| Error::Parse {
                line,
                message: format!("`{raw}` in column {} is not a number", names[col]),
            })?;
            if v.is_finite() && v > 0.0 {
                Ok(v)
            } else {
                Err(Error::invalid(
                    format!("line {line} (`{method}`), column {}", names[col]),
                    v,
                ))
            }
        };
        let values = match schema {
            Schema::Direct => RowValues::Direct {
                encode_s: number(1)?,
                decode_s: number(2)?,
                ratio: number(3)?,
            },
            Schema::Bpsp => RowValues::Bpsp {
                encode_s: number(1)?,
                decode_s: number(2)?,
                bpsp: number(3)?,
                depth_bits: if has_depth && !record[4].is_empty() {
                    number(4)?
                } else {
                    DEFAULT_DEPTH_BITS
                },
            },
            Schema::Speeds => RowValues::Speeds {
                comp_mbps: number(1)?,
                decomp_mbps: number(2)?,
                ratio: number(3)?,
            },
        };

        let count = seen.entry(method.clone()).or_insert(0);
        *count += 1;
        let method = match (*count, options.allow_duplicates) {
            (1, _) => method,
            (n, true) => format!("{method} #{n}"),
            (_, false) => {
                return Err(Error::Parse {
                    line,
                    message: format!(
                        "duplicate method `{method}` (pass --allow-duplicates to suffix repeats)"
                    ),
                })
            }
        };
        rows.push(ResultsRow {
            method,
            line,
            values,
        });
    }
    if rows.is_empty() {
        return Err(Error::EmptyInput(format!(
            "{schema} results contain no data rows"
        )));
    }
    Ok(ResultsDocument {
        schema,
        rows,
        corpus_bytes,
        notes,
    })
}

/// Maps every row to seconds and ratios.
pub fn normalize(doc: &ResultsDocument) -> Result<MetricsTable> {
    let rows = doc
        .rows
        .iter()
        .map(|row| {
            let (e, d, r) = match row.values {
                RowValues::Direct {
                    encode_s,
                    decode_s,
                    ratio,
                } => (encode_s, decode_s, ratio),
                RowValues::Bpsp {
                    encode_s,
                    decode_s,
                    bpsp,
                    depth_bits,
                } => (encode_s, decode_s, ratio_from_bpsp(bpsp, depth_bits)?),
                RowValues::Speeds {
                    comp_mbps,
                    decomp_mbps,
                    ratio,
                } => {
                    let size = CorpusSize::new(doc.corpus_bytes.ok_or_else(|| {
                        Error::Usage("speeds schema without corpus size".into())
                    })?);
                    (
                        encode_time_from_speed(size, comp_mbps)?,
                        decode_time_from_speed(size, decomp_mbps, ratio)?,
                        ratio,
                    )
                }
            };
            MethodMetrics::new(row.method.clone(), e, d, r)
        })
        .collect::<Result<Vec<_>>>()?;
    MetricsTable::new(rows, format!("ingested ({} schema)", doc.schema))
}
