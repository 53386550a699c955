//! Corpus benchmarking and per-method averaging.
//!
//! Built-in codecs are timed on in-memory buffers, so file I/O is excluded.
//! External codecs are timed spawn-to-exit, which includes process start-up.
//! Per file, the reported encode/decode time is the configured statistic
//! (median by default) over the timed repetitions; across files the plain
//! arithmetic mean is used, for the ratio as well as the times.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codec::{Codec, CodecKind};
use crate::error::{Error, Result};
use crate::external::{
    run_external_repeated, Direction, ExternalCodecSpec, ExternalInput, Scratch,
};
use crate::score::{average_metrics, MethodMetrics, MetricsTable};
use crate::units::ratio_from_sizes;

/// A runnable compressor.
#[derive(Debug, Clone, PartialEq)]
pub enum CodecSpec {
    Builtin(Codec),
    External(ExternalCodecSpec),
}

impl CodecSpec {
    pub fn name(&self) -> &str {
        match self {
            CodecSpec::Builtin(c) => &c.name,
            CodecSpec::External(e) => &e.name,
        }
    }

    pub fn is_external(&self) -> bool {
        matches!(self, CodecSpec::External(_))
    }

    /// The default suite: Huffman, LZW and arithmetic coding.
    pub fn default_builtins() -> Vec<CodecSpec> {
        CodecKind::ENTROPY_CODERS
            .into_iter()
            .map(|k| CodecSpec::Builtin(Codec::new(k)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    #[default]
    Median,
    Mean,
}

impl Statistic {
    pub fn apply(self, samples: &[f64]) -> f64 {
        assert!(!samples.is_empty(), "statistic of no samples");
        match self {
            Statistic::Mean => samples.iter().sum::<f64>() / samples.len() as f64,
            Statistic::Median => {
                let mut s = samples.to_vec();
                s.sort_by(f64::total_cmp);
                let mid = s.len() / 2;
                if s.len() % 2 == 1 {
                    s[mid]
                } else {
                    (s[mid - 1] + s[mid]) / 2.0
                }
            }
        }
    }
}

impl std::str::FromStr for Statistic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "median" => Ok(Statistic::Median),
            "mean" => Ok(Statistic::Mean),
            _ => Err(Error::Usage(format!(
                "unknown statistic `{s}` (expected median or mean)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub warmup_runs: u32,
    pub timed_runs: u32,
    pub statistic: Statistic,
    pub corpus: Vec<PathBuf>,
    /// Run different (codec, file) pairs concurrently.
    pub parallel: bool,
    /// Cumulative-runtime floor for repeated external runs.
    pub min_runtime: Option<f64>,
    /// Byte-compare decoded output with the input.
    pub verify: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            warmup_runs: 1,
            timed_runs: 5,
            statistic: Statistic::Median,
            corpus: Vec::new(),
            parallel: false,
            min_runtime: None,
            verify: true,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.timed_runs == 0 {
            return Err(Error::Usage("timed_runs must be at least 1".into()));
        }
        if self.corpus.is_empty() {
            return Err(Error::EmptyInput("corpus has no files".into()));
        }
        if let Some(t) = self.min_runtime {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::Usage(format!("min runtime must be > 0, got {t}")));
            }
        }
        Ok(())
    }
}

/// Regular files directly inside `dir`, sorted by name.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::file(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::file(dir, e))?;
        let path = entry.path();
        if path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// One (codec, file) outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub codec_name: String,
    pub file_id: String,
    pub original_bytes: u64,
    pub compressed_bytes: u64,
    /// Seconds, the configured statistic over `runs` repetitions.
    pub encode_s: f64,
    pub decode_s: f64,
    pub runs: u32,
    /// Set only once the decoded output matched the input byte for byte.
    pub lossless: bool,
    pub encode_raw: Vec<f64>,
    pub decode_raw: Vec<f64>,
    /// Timed while other measurements ran concurrently.
    #[serde(default)]
    pub parallel: bool,
    /// Timed through an external process, spawn overhead included.
    #[serde(default)]
    pub external: bool,
}

impl MeasurementRecord {
    pub fn ratio(&self) -> Result<f64> {
        ratio_from_sizes(self.original_bytes, self.compressed_bytes)
    }
}

/// One line of the run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "lowercase")]
pub enum RunEvent {
    Measured(MeasurementRecord),
    /// The file could not be read; no codec saw it.
    Skipped { file_id: String, reason: String },
    /// The codec errored, timed out or produced a different output.
    Failed {
        codec_name: String,
        file_id: String,
        reason: String,
        #[serde(default)]
        external: bool,
    },
}

#[derive(Debug, Clone, Default)]
pub struct BenchRun {
    pub events: Vec<RunEvent>,
    /// Retained scratch directory, if any external run failed.
    pub scratch_retained: Option<PathBuf>,
}

impl BenchRun {
    pub fn records(&self) -> impl Iterator<Item = &MeasurementRecord> {
        self.events.iter().filter_map(|e| match e {
            RunEvent::Measured(r) => Some(r),
            _ => None,
        })
    }

    pub fn into_records(self) -> Vec<MeasurementRecord> {
        self.events
            .into_iter()
            .filter_map(|e| match e {
                RunEvent::Measured(r) => Some(r),
                _ => None,
            })
            .collect()
    }

    /// Writes one JSON object per line.
    pub fn write_log<W: Write>(&self, mut out: W) -> Result<()> {
        for event in &self.events {
            serde_json::to_writer(&mut out, event).map_err(std::io::Error::from)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_log(text: &str) -> Result<Vec<RunEvent>> {
        text.lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                serde_json::from_str(l).map_err(|e| Error::Parse {
                    line: i as u64 + 1,
                    message: e.to_string(),
                })
            })
            .collect()
    }
}

fn file_id(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Times `f`, repeating it in doubling batches if the clock reads zero.
fn time_nonzero<T>(mut f: impl FnMut() -> T) -> (f64, T) {
    let start = Instant::now();
    let mut out = f();
    let mut elapsed = start.elapsed().as_secs_f64();
    let mut batch = 1u32;
    while elapsed <= 0.0 {
        batch = batch.saturating_mul(2);
        let start = Instant::now();
        for _ in 0..batch {
            out = f();
        }
        elapsed = start.elapsed().as_secs_f64() / f64::from(batch);
    }
    (elapsed, out)
}

struct Timings {
    compressed_bytes: u64,
    encode_raw: Vec<f64>,
    decode_raw: Vec<f64>,
    lossless: bool,
}

fn measure_builtin(codec: &Codec, data: &[u8], config: &BenchConfig) -> Result<Timings> {
    for _ in 0..config.warmup_runs {
        let bytes = codec.compress(data);
        codec.decompress(&bytes)?;
    }
    let mut t = Timings {
        compressed_bytes: 0,
        encode_raw: Vec::with_capacity(config.timed_runs as usize),
        decode_raw: Vec::with_capacity(config.timed_runs as usize),
        lossless: config.verify,
    };
    for _ in 0..config.timed_runs {
        let (enc_s, bytes) = time_nonzero(|| codec.compress(data));
        let (dec_s, decoded) = time_nonzero(|| codec.decompress(&bytes));
        let decoded = decoded?;
        if config.verify && decoded != data {
            return Err(Error::Decode("round trip differs from the input".into()));
        }
        t.compressed_bytes = bytes.len() as u64;
        t.encode_raw.push(enc_s);
        t.decode_raw.push(dec_s);
    }
    Ok(t)
}

fn measure_external(
    spec: &ExternalCodecSpec,
    data: &[u8],
    config: &BenchConfig,
    scratch: &Scratch,
) -> Result<Timings> {
    let run = |dir, input: &[u8]| {
        run_external_repeated(
            spec,
            dir,
            ExternalInput::Bytes(input),
            scratch,
            config.min_runtime,
        )
    };
    for _ in 0..config.warmup_runs {
        let enc = run(Direction::Encode, data)?;
        run(Direction::Decode, &enc.bytes)?;
    }
    let mut t = Timings {
        compressed_bytes: 0,
        encode_raw: Vec::new(),
        decode_raw: Vec::new(),
        lossless: config.verify,
    };
    for _ in 0..config.timed_runs {
        let enc = run(Direction::Encode, data)?;
        let dec = run(Direction::Decode, &enc.bytes)?;
        if config.verify && dec.bytes != data {
            return Err(Error::Decode("round trip differs from the input".into()));
        }
        if enc.bytes.is_empty() {
            return Err(Error::Decode("encoder produced no output".into()));
        }
        t.compressed_bytes = enc.bytes.len() as u64;
        t.encode_raw.push(enc.wall_time);
        t.decode_raw.push(dec.wall_time);
    }
    Ok(t)
}

fn measure(
    codec: &CodecSpec,
    path: &Path,
    data: &[u8],
    config: &BenchConfig,
    scratch: &Scratch,
) -> RunEvent {
    let id = file_id(path);
    let result = match codec {
        CodecSpec::Builtin(c) => measure_builtin(c, data, config),
        CodecSpec::External(e) => measure_external(e, data, config, scratch),
    };
    match result {
        Ok(t) => RunEvent::Measured(MeasurementRecord {
            codec_name: codec.name().to_owned(),
            file_id: id,
            original_bytes: data.len() as u64,
            compressed_bytes: t.compressed_bytes,
            encode_s: config.statistic.apply(&t.encode_raw),
            decode_s: config.statistic.apply(&t.decode_raw),
            runs: config.timed_runs,
            lossless: t.lossless,
            encode_raw: t.encode_raw,
            decode_raw: t.decode_raw,
            parallel: config.parallel,
            external: codec.is_external(),
        }),
        Err(e) => RunEvent::Failed {
            codec_name: codec.name().to_owned(),
            file_id: id,
            external: e.is_external(),
            reason: e.to_string(),
        },
    }
}

/// Benchmarks one codec over the corpus.
pub fn bench_codec(codec: &CodecSpec, config: &BenchConfig) -> Result<BenchRun> {
    bench_suite(std::slice::from_ref(codec), config)
}

/// Benchmarks every codec over the corpus. Events are ordered by codec,
/// then by corpus order, whatever the execution order.
pub fn bench_suite(codecs: &[CodecSpec], config: &BenchConfig) -> Result<BenchRun> {
    config.validate()?;
    let mut scratch = Scratch::new()?;
    let mut run = BenchRun::default();

    let mut files: Vec<(&PathBuf, Vec<u8>)> = Vec::with_capacity(config.corpus.len());
    for path in &config.corpus {
        match fs::read(path) {
            Ok(data) if data.is_empty() => run.events.push(RunEvent::Skipped {
                file_id: file_id(path),
                reason: "empty file".into(),
            }),
            Ok(data) => files.push((path, data)),
            Err(e) => run.events.push(RunEvent::Skipped {
                file_id: file_id(path),
                reason: e.to_string(),
            }),
        }
    }

    let pairs: Vec<(usize, usize)> = (0..codecs.len())
        .flat_map(|c| (0..files.len()).map(move |f| (c, f)))
        .collect();
    let job = |&(c, f): &(usize, usize)| {
        let (path, data) = &files[f];
        measure(&codecs[c], path, data, config, &scratch)
    };
    let measured: Vec<RunEvent> = if config.parallel {
        pairs.par_iter().map(job).collect()
    } else {
        pairs.iter().map(job).collect()
    };

    let external_failed = measured
        .iter()
        .any(|e| matches!(e, RunEvent::Failed { external: true, .. }));
    run.events.extend(measured);
    if external_failed {
        run.scratch_retained = Some(scratch.retain());
    }
    Ok(run)
}

/// Averages one codec's lossless records, in `file_id` order.
pub fn aggregate(records: &[MeasurementRecord], codec_name: &str) -> Result<MethodMetrics> {
    let mut usable: Vec<&MeasurementRecord> = records
        .iter()
        .filter(|r| r.codec_name == codec_name && r.lossless)
        .collect();
    usable.sort_by(|a, b| a.file_id.cmp(&b.file_id));
    let triples = usable
        .iter()
        .map(|r| Ok((r.encode_s, r.decode_s, r.ratio()?)))
        .collect::<Result<Vec<_>>>()?;
    average_metrics(codec_name, &triples)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct AggregateOptions {
    /// Admit records whose round trip was not verified.
    pub allow_unverified: bool,
}

#[derive(Debug, Clone)]
pub struct Aggregated {
    pub table: MetricsTable,
    pub warnings: Vec<String>,
    /// Caveats that belong in any report built from the table.
    pub notes: Vec<String>,
}

pub const PARALLEL_NOTE: &str =
    "timings were measured in parallel; contention may bias them";
pub const EXTERNAL_NOTE: &str =
    "external codec timings include process spawn overhead";

/// Builds a metrics table over the files every remaining codec handled.
///
/// Codecs with no usable record are dropped. A file missing for any
/// remaining codec is dropped for all of them, so methods are compared on
/// an identical corpus. Unverified records are refused unless allowed.
pub fn aggregate_table(
    records: &[MeasurementRecord],
    codec_order: &[&str],
    options: AggregateOptions,
) -> Result<Aggregated> {
    let mut warnings = Vec::new();
    let unverified: Vec<&MeasurementRecord> = records.iter().filter(|r| !r.lossless).collect();
    if !unverified.is_empty() && !options.allow_unverified {
        let names: BTreeSet<&str> = unverified.iter().map(|r| r.codec_name.as_str()).collect();
        return Err(Error::Unverified(format!(
            "{} record(s) from {} were not verified lossless",
            unverified.len(),
            names.into_iter().collect::<Vec<_>>().join(", ")
        )));
    }
    let usable: Vec<MeasurementRecord> = records
        .iter()
        .cloned()
        .map(|mut r| {
            if !r.lossless {
                warnings.push(format!(
                    "{} on {}: admitted without round-trip verification",
                    r.codec_name, r.file_id
                ));
                r.lossless = true;
            }
            r
        })
        .collect();

    let mut files_by_codec: HashMap<&str, BTreeSet<&str>> = HashMap::new();
    for r in &usable {
        files_by_codec
            .entry(r.codec_name.as_str())
            .or_default()
            .insert(r.file_id.as_str());
    }
    let mut codecs: Vec<&str> = Vec::new();
    for &name in codec_order {
        if files_by_codec.contains_key(name) {
            codecs.push(name);
        } else {
            warnings.push(format!("{name}: no successful measurements, left out of the table"));
        }
    }
    if codecs.is_empty() {
        return Err(Error::EmptyInput("no codec produced a usable measurement".into()));
    }

    let all_files: BTreeSet<&str> = codecs
        .iter()
        .flat_map(|c| files_by_codec[c].iter().copied())
        .collect();
    let common: BTreeSet<&str> = all_files
        .iter()
        .copied()
        .filter(|f| codecs.iter().all(|c| files_by_codec[c].contains(f)))
        .collect();
    for f in all_files.difference(&common) {
        warnings.push(format!(
            "{f}: not handled by every codec, dropped from all averages"
        ));
    }
    if common.is_empty() {
        return Err(Error::EmptyInput(
            "no corpus file was handled by every codec".into(),
        ));
    }

    let kept: Vec<MeasurementRecord> = usable
        .iter()
        .filter(|r| common.contains(r.file_id.as_str()))
        .cloned()
        .collect();
    let rows = codecs
        .iter()
        .map(|c| aggregate(&kept, c))
        .collect::<Result<Vec<_>>>()?;
    let mut notes = Vec::new();
    if kept.iter().any(|r| r.parallel) {
        notes.push(PARALLEL_NOTE.to_owned());
    }
    if kept.iter().any(|r| r.external) {
        notes.push(EXTERNAL_NOTE.to_owned());
    }
    Ok(Aggregated {
        table: MetricsTable::new(rows, "measured")?,
        warnings,
        notes,
    })
}

/// Writes a table in the direct results schema at full precision.
/// Writes a direct-schema results file. Each note becomes a leading
/// `# note: ...` comment line.
pub fn write_results<W: Write>(table: &MetricsTable, notes: &[String], mut out: W) -> Result<()> {
    for n in notes {
        writeln!(out, "# note: {}", n.replace('\n', " "))?;
    }
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(["method", "encode_s", "decode_s", "ratio"])
        .map_err(csv_err)?;
    for row in table.rows() {
        w.write_record([
            row.method_id().to_owned(),
            row.encode_time().to_string(),
            row.decode_time().to_string(),
            row.ratio().to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// The run log path for a results file: `results.csv` → `results.runlog.jsonl`.
pub fn run_log_path(results: &Path) -> PathBuf {
    results.with_extension("runlog.jsonl")
}
