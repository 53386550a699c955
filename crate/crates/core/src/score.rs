//! The balanced scoring model.
//!
//! Each method is described by its mean encoding time `a_e`, mean decoding
//! time `a_d` and mean compression ratio `a_r`. Component scores are
//!
//! ```text
//! c_e,j = (Σ_t a_e,t) / a_e,j
//! c_d,j = (Σ_t a_d,t) / a_d,j
//! c_r,j = k_r · a_r,j / (Σ_t a_r,t),   k_r = (y + z) / (2x)
//! ```
//!
//! where `x`, `y`, `z` are the means over all methods of the raw ratio share,
//! of `c_e` and of `c_d`. The balancing constant lifts the ratio share (which
//! sums to one) to the magnitude of the two time scores. A method's grand
//! total for a criteria combination is its share, in percent, of the summed
//! component scores over that combination.
//!
//! All sums accumulate left to right in table order, so results are
//! bit-reproducible for a fixed row order.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{positive, Error, Result};

/// One compressor's averaged performance triple.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodMetrics {
    method_id: String,
    /// Mean encoding time in seconds.
    a_e: f64,
    /// Mean decoding time in seconds.
    a_d: f64,
    /// Mean compression ratio (original / compressed).
    a_r: f64,
}

impl MethodMetrics {
    pub fn new(method_id: impl Into<String>, a_e: f64, a_d: f64, a_r: f64) -> Result<Self> {
        let method_id = method_id.into();
        if method_id.trim().is_empty() {
            return Err(Error::EmptyInput("method id".into()));
        }
        let at = |field: &str| format!("method `{method_id}`, field {field}");
        positive(a_e, || at("a_e"))?;
        positive(a_d, || at("a_d"))?;
        positive(a_r, || at("a_r"))?;
        Ok(Self {
            method_id,
            a_e,
            a_d,
            a_r,
        })
    }

    pub fn method_id(&self) -> &str {
        &self.method_id
    }

    pub fn encode_time(&self) -> f64 {
        self.a_e
    }

    pub fn decode_time(&self) -> f64 {
        self.a_d
    }

    pub fn ratio(&self) -> f64 {
        self.a_r
    }
}

/// An ordered, non-empty set of methods with unique ids.
///
/// Row order is part of the contract: it decides ties.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsTable {
    rows: Vec<MethodMetrics>,
    source: String,
}

impl MetricsTable {
    pub fn new(rows: Vec<MethodMetrics>, source: impl Into<String>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyInput("metrics table has no rows".into()));
        }
        let mut seen = HashSet::with_capacity(rows.len());
        for row in &rows {
            if !seen.insert(row.method_id.as_str()) {
                return Err(Error::DuplicateMethod(row.method_id.clone()));
            }
        }
        Ok(Self {
            rows,
            source: source.into(),
        })
    }

    /// Builds a table from `(id, a_e, a_d, a_r)` tuples.
    pub fn from_triples<'a, I>(triples: I, source: impl Into<String>) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, f64, f64, f64)>,
    {
        let rows = triples
            .into_iter()
            .map(|(id, e, d, r)| MethodMetrics::new(id, e, d, r))
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows, source)
    }

    pub fn rows(&self) -> &[MethodMetrics] {
        &self.rows
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Criterion {
    /// Encoding time.
    Encode,
    /// Decoding time.
    Decode,
    /// Compression ratio.
    Ratio,
}

impl Criterion {
    pub const ALL: [Criterion; 3] = [Criterion::Encode, Criterion::Decode, Criterion::Ratio];

    pub fn letter(self) -> char {
        match self {
            Criterion::Encode => 'E',
            Criterion::Decode => 'D',
            Criterion::Ratio => 'R',
        }
    }
}

/// A non-empty subset of {E, D, R}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CriteriaSet {
    encode: bool,
    decode: bool,
    ratio: bool,
}

impl CriteriaSet {
    pub const ED: CriteriaSet = CriteriaSet::from_flags(true, true, false);
    pub const ER: CriteriaSet = CriteriaSet::from_flags(true, false, true);
    pub const DR: CriteriaSet = CriteriaSet::from_flags(false, true, true);
    pub const EDR: CriteriaSet = CriteriaSet::from_flags(true, true, true);

    /// The four combinations evaluated by default, in report order.
    pub const STANDARD: [CriteriaSet; 4] = [Self::ED, Self::ER, Self::DR, Self::EDR];

    const fn from_flags(encode: bool, decode: bool, ratio: bool) -> Self {
        Self {
            encode,
            decode,
            ratio,
        }
    }

    pub fn new(members: &[Criterion]) -> Result<Self> {
        let mut set = Self::from_flags(false, false, false);
        for c in members {
            let slot = match c {
                Criterion::Encode => &mut set.encode,
                Criterion::Decode => &mut set.decode,
                Criterion::Ratio => &mut set.ratio,
            };
            if *slot {
                return Err(Error::InvalidCriteria(format!(
                    "criterion {} listed twice",
                    c.letter()
                )));
            }
            *slot = true;
        }
        if set.is_empty() {
            return Err(Error::InvalidCriteria("no criteria selected".into()));
        }
        Ok(set)
    }

    pub fn contains(&self, c: Criterion) -> bool {
        match c {
            Criterion::Encode => self.encode,
            Criterion::Decode => self.decode,
            Criterion::Ratio => self.ratio,
        }
    }

    /// Members in canonical E, D, R order.
    pub fn members(&self) -> impl Iterator<Item = Criterion> + '_ {
        Criterion::ALL.into_iter().filter(|c| self.contains(*c))
    }

    pub fn len(&self) -> usize {
        self.members().count()
    }

    pub fn is_empty(&self) -> bool {
        !(self.encode || self.decode || self.ratio)
    }

    /// Single-criterion sets are an extension beyond the pairs and the triple.
    pub fn is_extension(&self) -> bool {
        self.len() == 1
    }

    /// Compact lowercase token, e.g. `edr`.
    pub fn token(&self) -> String {
        self.members()
            .map(|c| c.letter().to_ascii_lowercase())
            .collect()
    }

    /// Display label, e.g. `E+D+R`.
    pub fn label(&self) -> String {
        self.members()
            .map(|c| c.letter().to_string())
            .collect::<Vec<_>>()
            .join("+")
    }
}

impl fmt::Display for CriteriaSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for CriteriaSet {
    type Err = Error;

    /// Accepts tokens such as `ed`, `edr`, `r` or labels such as `E+D`.
    fn from_str(s: &str) -> Result<Self> {
        let mut members = Vec::new();
        for ch in s.chars().filter(|c| *c != '+') {
            members.push(match ch.to_ascii_lowercase() {
                'e' => Criterion::Encode,
                'd' => Criterion::Decode,
                'r' => Criterion::Ratio,
                _ => {
                    return Err(Error::InvalidCriteria(format!(
                        "unknown criterion `{ch}` in `{s}` (expected letters from e, d, r)"
                    )))
                }
            });
        }
        CriteriaSet::new(&members)
    }
}

/// Balanced component scores of one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentScore {
    pub method_id: String,
    pub c_e: f64,
    pub c_d: f64,
    pub c_r: f64,
}

impl ComponentScore {
    pub fn get(&self, c: Criterion) -> f64 {
        match c {
            Criterion::Encode => self.c_e,
            Criterion::Decode => self.c_d,
            Criterion::Ratio => self.c_r,
        }
    }
}

/// Component scores of every method plus the model's intermediates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub per_method: Vec<ComponentScore>,
    /// Mean of the raw ratio shares `a_r,j / Σ a_r`; always `1/m` up to rounding.
    pub x: f64,
    /// Mean encoding score.
    pub y: f64,
    /// Mean decoding score.
    pub z: f64,
    /// Ratio balancing constant `(y + z) / (2x)`.
    pub k_r: f64,
}

impl ScoreBreakdown {
    pub fn method_count(&self) -> usize {
        self.per_method.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub method_id: String,
    /// Grand-total share in percent.
    pub g: f64,
}

/// Grand-total percentages for one criteria combination.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinationReport {
    pub criteria: CriteriaSet,
    pub entries: Vec<ReportEntry>,
    pub winner: String,
    pub winner_score: f64,
}

fn sum_in_order(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, |acc, v| acc + v)
}

/// Arithmetic means of per-file `(encode_s, decode_s, ratio)` triples.
pub fn average_metrics(method_id: &str, triples: &[(f64, f64, f64)]) -> Result<MethodMetrics> {
    if triples.is_empty() {
        return Err(Error::EmptyInput(format!(
            "no measurements to average for `{method_id}`"
        )));
    }
    for (i, &(e, d, r)) in triples.iter().enumerate() {
        positive(e, || format!("index {i}, field e"))?;
        positive(d, || format!("index {i}, field d"))?;
        positive(r, || format!("index {i}, field r"))?;
    }
    let n = triples.len() as f64;
    MethodMetrics::new(
        method_id,
        sum_in_order(triples.iter().map(|t| t.0)) / n,
        sum_in_order(triples.iter().map(|t| t.1)) / n,
        sum_in_order(triples.iter().map(|t| t.2)) / n,
    )
}

pub fn component_scores(table: &MetricsTable) -> ScoreBreakdown {
    let rows = table.rows();
    let m = rows.len() as f64;
    let sum_e = sum_in_order(rows.iter().map(|r| r.a_e));
    let sum_d = sum_in_order(rows.iter().map(|r| r.a_d));
    let sum_r = sum_in_order(rows.iter().map(|r| r.a_r));

    let c_e: Vec<f64> = rows.iter().map(|r| sum_e / r.a_e).collect();
    let c_d: Vec<f64> = rows.iter().map(|r| sum_d / r.a_d).collect();
    let share_r: Vec<f64> = rows.iter().map(|r| r.a_r / sum_r).collect();

    let x = sum_in_order(share_r.iter().copied()) / m;
    let y = sum_in_order(c_e.iter().copied()) / m;
    let z = sum_in_order(c_d.iter().copied()) / m;
    let k_r = (y + z) / (2.0 * x);

    let per_method = rows
        .iter()
        .enumerate()
        .map(|(j, row)| ComponentScore {
            method_id: row.method_id.clone(),
            c_e: c_e[j],
            c_d: c_d[j],
            c_r: k_r * share_r[j],
        })
        .collect();

    ScoreBreakdown {
        per_method,
        x,
        y,
        z,
        k_r,
    }
}

/// Percent shares of the summed component scores over `criteria`, in row order.
pub fn grand_totals(scores: &ScoreBreakdown, criteria: CriteriaSet) -> Result<CombinationReport> {
    if criteria.is_empty() {
        return Err(Error::InvalidCriteria("no criteria selected".into()));
    }
    if scores.per_method.is_empty() {
        return Err(Error::EmptyInput("score breakdown has no methods".into()));
    }
    let totals: Vec<f64> = scores
        .per_method
        .iter()
        .map(|s| sum_in_order(criteria.members().map(|c| s.get(c))))
        .collect();
    let grand = sum_in_order(totals.iter().copied());
    let entries: Vec<ReportEntry> = scores
        .per_method
        .iter()
        .zip(&totals)
        .map(|(s, t)| ReportEntry {
            method_id: s.method_id.clone(),
            g: t / grand * 100.0,
        })
        .collect();
    let (winner, winner_score) = select_optimal(&entries)?;
    let winner = winner.to_owned();
    Ok(CombinationReport {
        criteria,
        entries,
        winner,
        winner_score,
    })
}

/// The entry with the highest share; an equal later entry never replaces
/// the incumbent, so the earliest maximum wins.
pub fn select_optimal(entries: &[ReportEntry]) -> Result<(&str, f64)> {
    let mut best: Option<&ReportEntry> = None;
    let mut best_g = f64::NEG_INFINITY;
    for entry in entries {
        if entry.g > best_g {
            best_g = entry.g;
            best = Some(entry);
        }
    }
    best.map(|e| (e.method_id.as_str(), e.g))
        .ok_or_else(|| Error::EmptyInput("report has no entries".into()))
}

/// Reports for the four standard combinations, in the order E+D, E+R, D+R, E+D+R.
pub fn evaluate_all(table: &MetricsTable) -> Result<Vec<CombinationReport>> {
    evaluate(table, &CriteriaSet::STANDARD)
}

pub fn evaluate(table: &MetricsTable, criteria: &[CriteriaSet]) -> Result<Vec<CombinationReport>> {
    let scores = component_scores(table);
    criteria
        .iter()
        .map(|c| grand_totals(&scores, *c))
        .collect()
}
