//! Balanced multi-criteria selection of lossless compressors.
//!
//! The crate measures or ingests the three performance figures of a lossless
//! compressor (mean encoding time, mean decoding time, mean compression
//! ratio), folds them into balanced per-metric scores, and reports each
//! method's share of the grand total for any combination of the three
//! criteria. The best method for a combination is the first one, in table
//! order, that attains the highest share.
//!
//! Module map:
//!
//! - [`score`]: the scoring model and optimal-method selection.
//! - [`units`]: conversions from publication units (bpsp, MB/s) to seconds and ratios.
//! - [`codec`]: built-in Huffman, LZW, arithmetic and identity coders with a versioned container.
//! - [`external`]: external compressor commands behind the same contract.
//! - [`harness`]: corpus benchmarking, lossless verification and per-method averaging.
//! - [`ingest`]: results-table parsing and normalization.
//! - [`report`]: text, CSV, JSON and SVG reports.
//! - [`fixtures`]: published result tables compiled into the crate.

pub mod codec;
pub mod error;
pub mod external;
pub mod fixtures;
pub mod harness;
pub mod ingest;
pub mod report;
pub mod score;
pub mod units;

pub use codec::{Codec, CodecKind, EncodedBlob};
pub use error::{Error, Result};
pub use external::{ExternalCodecSpec, IoMode};
pub use harness::{BenchConfig, CodecSpec, MeasurementRecord, Statistic};
pub use ingest::{ResultsDocument, Schema};
pub use report::ReportFormat;
pub use score::{
    CombinationReport, ComponentScore, CriteriaSet, Criterion, MethodMetrics, MetricsTable,
    ScoreBreakdown,
};
pub use units::CorpusSize;
