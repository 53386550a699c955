//! Input generators shared by the benchmarks.

use compsel_core::MetricsTable;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A table of `m` methods with log-uniform metrics in `[1e-4, 1e4]`.
pub fn random_table(m: usize, seed: u64) -> MetricsTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || 10f64.powf(rng.gen_range(-4.0..=4.0));
    let rows: Vec<(String, f64, f64, f64)> = (0..m)
        .map(|i| (format!("m{i}"), draw(), draw(), draw()))
        .collect();
    MetricsTable::from_triples(
        rows.iter().map(|(n, e, d, r)| (n.as_str(), *e, *d, *r)),
        "random",
    )
    .expect("generated metrics are positive")
}

/// Bytes drawn from a skewed distribution, roughly English-text entropy.
pub fn skewed_bytes(len: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const ALPHABET: &[u8] = b"eeeeeeeetttttaaaaooooiiiinnnnsssshhhrrrdddllcumwfgypbvk        \n";
    (0..len)
        .map(|_| ALPHABET[rng.gen_range(0..ALPHABET.len())])
        .collect()
}

pub fn uniform_bytes(len: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = vec![0u8; len];
    rng.fill(&mut v[..]);
    v
}
