//! Published result tables compiled into the crate.
//!
//! Times are seconds, ratios are original/compressed. The entropy coder,
//! transform coder, image coder and text compressor tables are reproduced
//! as printed; the five synthetic datasets each favour one compressor on
//! one criteria combination.

use crate::score::{CriteriaSet, MetricsTable};

type Row = (&'static str, f64, f64, f64);

pub const ENTROPY_CODERS: &[Row] = &[
    ("Huffman", 0.2488, 0.0062, 1.4282),
    ("LZW", 0.1054, 0.0266, 1.5455),
    ("Arithmetic", 4.0178, 4.7208, 1.4380),
];

pub const TRANSFORM_CODERS: &[Row] = &[
    ("JPEG-LS", 0.2467, 0.279, 3.9616),
    ("JPEG 2000", 0.597, 0.563, 3.4189),
    ("Lossless JPEG", 0.3257, 0.1331, 2.6661),
    ("PNG", 1.1259, 0.0719, 3.2847),
    ("JPEG-XR", 0.1668, 0.1614, 2.5307),
    ("WebP", 1.33, 1.1156, 3.8517),
    ("FLIF", 5.1033, 1.1354, 4.4508),
];

pub const IMAGE_CODERS: &[Row] = &[
    ("PNG", 0.0013, 0.00008, 1.3937),
    ("WebP", 0.021, 0.00021, 1.7241),
    ("FLIF", 0.022, 0.01, 1.7621),
    ("L3C", 0.031, 0.023, 1.81),
    ("IDF", 1.33, 1.02, 2.0513),
    ("SReC", 0.044, 0.071, 1.8648),
];

/// `(method, encode_s, decode_s, bpsp)` for the five DIV2K compressors.
pub const DIV2K_BPSP: &[Row] = &[
    ("JPEG 2000", 1.48e-2, 2.26e-4, 3.471),
    ("PNG", 0.213, 6.09e-5, 4.733),
    ("WebP", 0.157, 7.12e-2, 3.447),
    ("FLIF", 1.72, 0.133, 3.291),
    ("L3C", 0.242, 0.374, 3.386),
];

/// Bytes in the Silesia corpus.
pub const SILESIA_BYTES: u64 = 211_938_580;

/// Text compressors on the Silesia corpus. Several labels repeat; the
/// second occurrence carries a ` #2` suffix.
pub const TEXT_COMPRESSORS: &[Row] = &[
    ("zstd 1.5.1 -1", 0.0215, 0.0023, 2.887),
    ("zlib 1.2.11 -1", 0.1198, 0.0104, 2.743),
    ("brotli 1.0.9 -0", 0.0288, 0.0094, 2.702),
    ("zstd 1.5.1 --fast=1", 0.019, 0.0022, 2.437),
    ("zstd 1.5.1 --fast=3", 0.017, 0.0023, 2.239),
    ("quicklz 1.5.0 -1", 0.0211, 0.0067, 2.238),
    ("zstd 1.5.1 --fast=4", 0.016, 0.0023, 2.148),
    ("lzo1x 2.10 -1", 0.0173, 0.0064, 2.106),
    ("lz4 1.9.3", 0.0154, 0.0012, 2.101),
    ("lzf 3.6 -1", 0.0278, 0.0066, 2.077),
    ("snappy 1.1.9", 0.0207, 0.0031, 2.073),
    ("zstd 1.4.5 -1", 0.0228, 0.0024, 2.884),
    ("zlib 1.2.11 -1 #2", 0.1265, 0.0104, 2.743),
    ("brotli 1.0.7 -0", 0.0285, 0.0094, 2.703),
    ("zstd 1.4.5 --fast=1", 0.02, 0.0021, 2.434),
    ("zstd 1.4.5 --fast=3", 0.0178, 0.0021, 2.312),
    ("quicklz 1.5.0 -1 #2", 0.0203, 0.0072, 2.238),
    ("zstd 1.4.5 --fast=5", 0.0163, 0.0022, 2.178),
    ("lzo1x 2.10 -1 #2", 0.0165, 0.0066, 2.106),
    ("lz4 1.9.2", 0.0154, 0.0012, 2.101),
    ("lzf 3.6 -1 #2", 0.0278, 0.0064, 2.077),
    ("snappy 1.1.8", 0.0203, 0.0031, 2.073),
];

pub const X1: &[Row] = &[
    ("C1", 0.0727, 0.0233, 1.885),
    ("C2", 0.0722, 0.0227, 4.739),
    ("C3", 0.0751, 0.0252, 7.992),
    ("C4", 0.1985, 0.0603, 9.334),
    ("C5", 0.0823, 0.0294, 3.414),
];

pub const X2: &[Row] = &[
    ("C1", 0.0727, 0.0233, 1.885),
    ("C2", 0.0722, 0.0227, 4.739),
    ("C3", 0.0711, 0.0252, 4.792),
    ("C4", 0.1985, 0.0603, 4.334),
    ("C5", 0.0823, 0.0294, 3.414),
];

pub const X3: &[Row] = &[
    ("C1", 0.0727, 0.0233, 1.885),
    ("C2", 0.0722, 0.0227, 4.739),
    ("C3", 0.0711, 0.0252, 4.792),
    ("C4", 0.1985, 0.0603, 4.334),
    ("C5", 0.0823, 0.0214, 4.814),
];

pub const X4: &[Row] = &[
    ("C1", 0.0727, 0.0233, 1.885),
    ("C2", 0.0722, 0.0227, 4.739),
    ("C3", 0.0711, 0.0252, 4.792),
    ("C4", 0.0708, 0.0203, 4.834),
    ("C5", 0.0823, 0.0214, 4.814),
];

/// A synthetic dataset and the method it was built to favour.
#[derive(Debug, Clone)]
pub struct ValidationCase {
    pub name: String,
    pub rows: Vec<Row>,
    pub criteria: CriteriaSet,
    pub expected_winner: String,
}

impl ValidationCase {
    pub fn table(&self) -> crate::Result<MetricsTable> {
        MetricsTable::from_triples(self.rows.iter().copied(), format!("fixture {}", self.name))
    }
}

pub fn validation_cases() -> Vec<ValidationCase> {
    let case = |name: &str, rows: &[Row], criteria, winner: &str| ValidationCase {
        name: name.into(),
        rows: rows.to_vec(),
        criteria,
        expected_winner: winner.into(),
    };
    vec![
        case("X1", X1, CriteriaSet::ED, "C2"),
        case("X2", X2, CriteriaSet::ER, "C3"),
        case("X3", X3, CriteriaSet::DR, "C5"),
        case("X4", X4, CriteriaSet::EDR, "C4"),
    ]
}

pub fn table(rows: &[Row], source: &str) -> MetricsTable {
    MetricsTable::from_triples(rows.iter().copied(), source).expect("fixture rows are valid")
}
