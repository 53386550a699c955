//! The `compsel` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 external codec failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use compsel_core::external::load_registry;
use compsel_core::fixtures::{validation_cases, ValidationCase};
use compsel_core::harness::{
    aggregate_table, bench_suite, corpus_files, run_log_path, write_results, AggregateOptions,
    RunEvent,
};
use compsel_core::ingest::{normalize, parse_results, ParseOptions};
use compsel_core::report::{parse_report_csv, render_report_with_notes, winner_line};
use compsel_core::score::{component_scores, evaluate};
use compsel_core::units::{
    bpsp_from_ratio, decode_time_from_speed, encode_time_from_speed, ratio_from_bpsp,
    DEFAULT_DEPTH_BITS,
};
use compsel_core::{
    BenchConfig, CodecSpec, CorpusSize, CriteriaSet, Error, ReportFormat, Schema, Statistic,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_EXTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "compsel", version, about = "Pick the best lossless compressor for a mix of speed and ratio")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score a results table and report the best method per criteria combination.
    Score(ScoreArgs),
    /// Measure codecs over a corpus and write a direct-schema results file.
    Bench(BenchArgs),
    /// Convert between publication units and seconds/ratios.
    #[command(subcommand)]
    Convert(ConvertCommand),
    /// Score the embedded synthetic datasets and check their expected winners.
    Validate(ValidateArgs),
    /// Re-render a CSV report in another format.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// text, csv, json or svg.
    #[arg(long, default_value = "text")]
    pub format: ReportFormat,
    /// Write to this file instead of standard output.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    pub input: PathBuf,
    /// direct, bpsp or speeds.
    #[arg(long, default_value = "direct")]
    pub schema: Schema,
    /// Criteria token: ed, er, dr, edr, or e, d, r. Repeatable; defaults to ed, er, dr, edr.
    #[arg(long = "criteria", short = 'c')]
    pub criteria: Vec<CriteriaSet>,
    /// Suffix repeated method names with ` #2`, ` #3`, ...
    #[arg(long)]
    pub allow_duplicates: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// TOML codec registry; the built-in coders are used when absent.
    #[arg(long)]
    pub registry: Option<PathBuf>,
    /// Directory of corpus files (not recursed).
    #[arg(long)]
    pub corpus: PathBuf,
    /// Results file (direct schema). The run log goes beside it.
    #[arg(long, short)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub warmup: u32,
    #[arg(long, default_value_t = 5)]
    pub runs: u32,
    /// median or mean of the timed runs.
    #[arg(long, default_value = "median")]
    pub statistic: Statistic,
    /// Measure different (codec, file) pairs concurrently.
    #[arg(long)]
    pub parallel: bool,
    /// Repeat external commands until this many seconds accumulate.
    #[arg(long, num_args = 0..=1, default_missing_value = "0.1", value_name = "SECONDS")]
    pub min_runtime: Option<f64>,
    /// Skip the round-trip comparison.
    #[arg(long)]
    pub no_verify: bool,
    /// Admit unverified measurements into the results.
    #[arg(long)]
    pub allow_unverified: bool,
}

#[derive(Debug, Subcommand)]
pub enum ConvertCommand {
    /// Bits per sub-pixel to compression ratio.
    Bpsp {
        value: f64,
        #[arg(long, default_value_t = DEFAULT_DEPTH_BITS)]
        depth: f64,
    },
    /// Compression ratio to bits per sub-pixel.
    Ratio {
        value: f64,
        #[arg(long, default_value_t = DEFAULT_DEPTH_BITS)]
        depth: f64,
    },
    /// Compression speed (MB/s) to encoding time in seconds.
    EncodeTime {
        #[arg(long)]
        speed: f64,
        #[arg(long)]
        corpus_bytes: u64,
    },
    /// Decompression speed (MB/s) to decoding time in seconds.
    DecodeTime {
        #[arg(long)]
        speed: f64,
        #[arg(long)]
        ratio: f64,
        #[arg(long)]
        corpus_bytes: u64,
    },
    /// Normalize a whole results file to the direct schema.
    Table {
        input: PathBuf,
        #[arg(long, default_value = "direct")]
        schema: Schema,
        #[arg(long)]
        allow_duplicates: bool,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// text, csv, json or svg for the per-dataset tables.
    #[arg(long, default_value = "text")]
    pub format: ReportFormat,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// A CSV report written by `score --format csv`.
    pub input: PathBuf,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Usage(_) | Error::InvalidCriteria(_) => EXIT_USAGE,
        e if e.is_external() => EXIT_EXTERNAL,
        _ => EXIT_DATA,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
            } else {
                let _ = write!(stdout, "{rendered}");
            }
            return code;
        }
    };
    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Error> {
    match cmd {
        Command::Score(a) => score(a, stdout, stderr),
        Command::Bench(a) => bench(a, stdout, stderr),
        Command::Convert(c) => convert(c, stdout),
        Command::Validate(a) => Ok(run_validation(&validation_cases(), a.format, stdout, stderr)),
        Command::Report(a) => report(a, stdout),
    }
}

fn emit(out: &OutputArgs, bytes: &[u8], stdout: &mut dyn Write) -> Result<(), Error> {
    match &out.output {
        Some(path) => fs::write(path, bytes).map_err(|e| Error::File {
            path: path.clone(),
            source: e,
        }),
        None => stdout.write_all(bytes).map_err(Error::from),
    }
}

fn score(a: ScoreArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Error> {
    let doc = parse_results(
        &a.input,
        a.schema,
        ParseOptions {
            allow_duplicates: a.allow_duplicates,
        },
    )?;
    let table = normalize(&doc)?;
    let criteria = if a.criteria.is_empty() {
        CriteriaSet::STANDARD.to_vec()
    } else {
        a.criteria
    };
    let reports = evaluate(&table, &criteria)?;
    let scores = component_scores(&table);
    for n in &doc.notes {
        let _ = writeln!(stderr, "note: {n}");
    }
    let bytes = render_report_with_notes(&reports, &scores, a.out.format, &doc.notes)?;
    emit(&a.out, &bytes, stdout)?;
    Ok(EXIT_OK)
}

fn load_codecs(registry: Option<&Path>) -> Result<Vec<CodecSpec>, Error> {
    match registry {
        Some(path) => load_registry(path),
        None => Ok(CodecSpec::default_builtins()),
    }
}

fn bench(a: BenchArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Error> {
    let codecs = load_codecs(a.registry.as_deref())?;
    let corpus = corpus_files(&a.corpus)?;
    if corpus.is_empty() {
        return Err(Error::EmptyInput(format!(
            "corpus directory {} has no files",
            a.corpus.display()
        )));
    }
    let config = BenchConfig {
        warmup_runs: a.warmup,
        timed_runs: a.runs,
        statistic: a.statistic,
        corpus,
        parallel: a.parallel,
        min_runtime: a.min_runtime,
        verify: !a.no_verify,
    };
    let run = bench_suite(&codecs, &config)?;

    let log_path = run_log_path(&a.output);
    let log = fs::File::create(&log_path).map_err(|e| Error::File {
        path: log_path.clone(),
        source: e,
    })?;
    run.write_log(std::io::BufWriter::new(log))?;

    let mut any_external_failure = false;
    for event in &run.events {
        match event {
            RunEvent::Skipped { file_id, reason } => {
                let _ = writeln!(stderr, "skipped {file_id}: {reason}");
            }
            RunEvent::Failed {
                codec_name,
                file_id,
                reason,
                external,
            } => {
                any_external_failure |= *external;
                let _ = writeln!(stderr, "failed {codec_name} on {file_id}: {reason}");
            }
            RunEvent::Measured(_) => {}
        }
    }
    if let Some(dir) = &run.scratch_retained {
        let _ = writeln!(stderr, "scratch kept at {}", dir.display());
    }

    let records: Vec<_> = run.records().cloned().collect();
    if records.is_empty() {
        let msg = "every codec failed on every file";
        let _ = writeln!(stderr, "error: {msg}");
        return Ok(if any_external_failure || codecs.iter().any(CodecSpec::is_external) {
            EXIT_EXTERNAL
        } else {
            EXIT_DATA
        });
    }
    let order: Vec<&str> = codecs.iter().map(CodecSpec::name).collect();
    let agg = aggregate_table(
        &records,
        &order,
        AggregateOptions {
            allow_unverified: a.allow_unverified,
        },
    )?;
    for w in &agg.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let file = fs::File::create(&a.output).map_err(|e| Error::File {
        path: a.output.clone(),
        source: e,
    })?;
    write_results(&agg.table, &agg.notes, std::io::BufWriter::new(file))?;
    let _ = writeln!(
        stdout,
        "wrote {} ({} methods) and {}",
        a.output.display(),
        agg.table.len(),
        log_path.display()
    );
    Ok(EXIT_OK)
}

fn convert(c: ConvertCommand, stdout: &mut dyn Write) -> Result<i32, Error> {
    let value = match c {
        ConvertCommand::Bpsp { value, depth } => ratio_from_bpsp(value, depth)?,
        ConvertCommand::Ratio { value, depth } => bpsp_from_ratio(value, depth)?,
        ConvertCommand::EncodeTime {
            speed,
            corpus_bytes,
        } => encode_time_from_speed(CorpusSize::new(corpus_bytes), speed)?,
        ConvertCommand::DecodeTime {
            speed,
            ratio,
            corpus_bytes,
        } => decode_time_from_speed(CorpusSize::new(corpus_bytes), speed, ratio)?,
        ConvertCommand::Table {
            input,
            schema,
            allow_duplicates,
            output,
        } => {
            let doc = parse_results(&input, schema, ParseOptions { allow_duplicates })?;
            let table = normalize(&doc)?;
            let mut buf = Vec::new();
            write_results(&table, &doc.notes, &mut buf)?;
            emit(
                &OutputArgs {
                    format: ReportFormat::Csv,
                    output,
                },
                &buf,
                stdout,
            )?;
            return Ok(EXIT_OK);
        }
    };
    writeln!(stdout, "{value}")?;
    Ok(EXIT_OK)
}

fn report(a: ReportArgs, stdout: &mut dyn Write) -> Result<i32, Error> {
    let text = fs::read_to_string(&a.input).map_err(|e| Error::File {
        path: a.input.clone(),
        source: e,
    })?;
    let parsed = parse_report_csv(&text)?;
    compsel_core::report::check_winners(&parsed)?;
    let bytes = render_report_with_notes(&parsed.reports, &parsed.scores, a.out.format, &parsed.notes)?;
    emit(&a.out, &bytes, stdout)?;
    Ok(EXIT_OK)
}

/// Scores every case and checks its expected winner. Prints the full
/// grand-total tables and returns the exit code: 0 iff all cases pass.
pub fn run_validation(
    cases: &[ValidationCase],
    format: ReportFormat,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let mut failures = 0;
    for case in cases {
        let outcome = case.table().and_then(|t| {
            let reports = evaluate(&t, &CriteriaSet::STANDARD)?;
            let scores = component_scores(&t);
            Ok((reports, scores))
        });
        let (reports, scores) = match outcome {
            Ok(v) => v,
            Err(e) => {
                let _ = writeln!(stderr, "{}: {e}", case.name);
                failures += 1;
                continue;
            }
        };
        let target = reports
            .iter()
            .find(|r| r.criteria == case.criteria)
            .expect("standard combinations cover every case");
        let pass = target.winner == case.expected_winner;
        if format == ReportFormat::Text {
            let _ = writeln!(stdout, "== {} ==", case.name);
        }
        if let Ok(bytes) = render_report_with_notes(&reports, &scores, format, &[]) {
            let _ = stdout.write_all(&bytes);
        }
        let verdict = format!(
            "{} {}: expected {}, got {} ({})",
            if pass { "PASS" } else { "FAIL" },
            case.name,
            case.expected_winner,
            target.winner,
            winner_line(target)
        );
        if format == ReportFormat::Text {
            let _ = writeln!(stdout, "{verdict}\n");
        }
        if !pass {
            let _ = writeln!(stderr, "{verdict}");
            failures += 1;
        }
    }
    if failures == 0 {
        EXIT_OK
    } else {
        EXIT_DATA
    }
}
