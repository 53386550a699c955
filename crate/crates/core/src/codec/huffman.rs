//! Static order-0 canonical Huffman coding.
//!
//! Model header: a table of code lengths, either sparse
//! (`0x00, count: u16 LE, (symbol, length) * count`) or dense
//! (`0x01, length * 256`), whichever is shorter. Payload: canonical codes,
//! MSB first, zero-padded to a byte boundary.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::bitio::{BitReader, BitWriter};
use super::table::{read_table, write_table, TableWidth};
use crate::error::{Error, Result};

/// Longest code length produced by the encoder.
pub(crate) const MAX_CODE_LEN: u8 = 24;

pub(crate) fn encode(input: &[u8]) -> (Vec<u8>, Vec<u8>) {
    let mut counts = [0u64; 256];
    for &b in input {
        counts[b as usize] += 1;
    }
    let lengths = code_lengths(&counts, MAX_CODE_LEN);
    let mut model = Vec::new();
    write_table(
        &mut model,
        lengths.iter().map(|&l| u32::from(l)),
        TableWidth::U8,
    );

    let codes = canonical_codes(&lengths);
    let total_bits: u64 = counts
        .iter()
        .zip(&lengths)
        .map(|(&c, &l)| c * u64::from(l))
        .sum();
    let mut w = BitWriter::with_capacity((total_bits / 8 + 1) as usize);
    for &b in input {
        w.write(codes[b as usize], u32::from(lengths[b as usize]));
    }
    (model, w.finish())
}

pub(crate) fn model_len(bytes: &[u8]) -> Result<usize> {
    read_table(bytes, TableWidth::U8).map(|(_, used)| used)
}

pub(crate) fn decode(model: &[u8], payload: &[u8], original_len: usize) -> Result<Vec<u8>> {
    let (table, _) = read_table(model, TableWidth::U8)?;
    let mut lengths = [0u8; 256];
    for (sym, &l) in table.iter().enumerate() {
        if l > u32::from(MAX_CODE_LEN) {
            return Err(Error::Decode(format!("code length {l} exceeds limit")));
        }
        lengths[sym] = l as u8;
    }
    if original_len == 0 {
        return Ok(Vec::new());
    }
    let decoder = CanonicalDecoder::new(&lengths)?;
    let mut reader = BitReader::new(payload);
    let mut out = Vec::with_capacity(original_len.min(1 << 24));
    for _ in 0..original_len {
        out.push(decoder.next_symbol(&mut reader)?);
    }
    Ok(out)
}

/// Code lengths for each byte value; zero for absent symbols. A lone
/// symbol gets a one-bit code. Frequencies are halved until the longest
/// code fits `max_len`.
pub(crate) fn code_lengths(counts: &[u64; 256], max_len: u8) -> [u8; 256] {
    let mut scaled = *counts;
    loop {
        let lengths = unbounded_lengths(&scaled);
        if lengths.iter().all(|&l| l <= max_len) {
            return lengths;
        }
        for c in scaled.iter_mut().filter(|c| **c > 0) {
            *c = c.div_ceil(2);
        }
    }
}

fn unbounded_lengths(counts: &[u64; 256]) -> [u8; 256] {
    let mut lengths = [0u8; 256];
    let present: Vec<usize> = (0..256).filter(|&s| counts[s] > 0).collect();
    match present.len() {
        0 => return lengths,
        1 => {
            lengths[present[0]] = 1;
            return lengths;
        }
        _ => {}
    }

    // Nodes 0..256 are leaves; internal nodes are appended. Ties break on
    // node index so the tree is deterministic.
    let mut parent: Vec<usize> = vec![usize::MAX; 256];
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> =
        present.iter().map(|&s| Reverse((counts[s], s))).collect();
    while heap.len() > 1 {
        let Reverse((w1, n1)) = heap.pop().unwrap();
        let Reverse((w2, n2)) = heap.pop().unwrap();
        let id = parent.len();
        parent.push(usize::MAX);
        parent[n1] = id;
        parent[n2] = id;
        heap.push(Reverse((w1 + w2, id)));
    }
    for &s in &present {
        let mut depth = 0u32;
        let mut node = s;
        while parent[node] != usize::MAX {
            node = parent[node];
            depth += 1;
        }
        lengths[s] = depth.min(u32::from(u8::MAX)) as u8;
    }
    lengths
}

/// Canonical code values: shorter codes first, ties by symbol value.
pub(crate) fn canonical_codes(lengths: &[u8; 256]) -> [u32; 256] {
    let max = lengths.iter().copied().max().unwrap_or(0) as usize;
    let mut bl_count = vec![0u32; max + 1];
    for &l in lengths.iter().filter(|&&l| l > 0) {
        bl_count[l as usize] += 1;
    }
    let mut next = vec![0u32; max + 2];
    let mut code = 0u32;
    for bits in 1..=max {
        code = (code + bl_count[bits - 1]) << 1;
        next[bits] = code;
    }
    let mut codes = [0u32; 256];
    for s in 0..256 {
        let l = lengths[s] as usize;
        if l > 0 {
            codes[s] = next[l];
            next[l] += 1;
        }
    }
    codes
}

struct CanonicalDecoder {
    /// Number of codes of each length.
    counts: [u32; MAX_CODE_LEN as usize + 1],
    /// Symbols ordered by (length, value).
    symbols: Vec<u8>,
}

impl CanonicalDecoder {
    fn new(lengths: &[u8; 256]) -> Result<Self> {
        let mut counts = [0u32; MAX_CODE_LEN as usize + 1];
        for &l in lengths.iter().filter(|&&l| l > 0) {
            counts[l as usize] += 1;
        }
        // Kraft inequality: an over-subscribed table cannot come from the encoder.
        let mut left: i64 = 1;
        for &c in &counts[1..] {
            left = left * 2 - i64::from(c);
            if left < 0 {
                return Err(Error::Decode("over-subscribed Huffman code lengths".into()));
            }
        }
        let mut symbols: Vec<u8> = (0..=255u8).filter(|&s| lengths[s as usize] > 0).collect();
        if symbols.is_empty() {
            return Err(Error::Decode("empty Huffman table for non-empty output".into()));
        }
        symbols.sort_by_key(|&s| (lengths[s as usize], s));
        Ok(Self { counts, symbols })
    }

    #[inline]
    fn next_symbol(&self, reader: &mut BitReader<'_>) -> Result<u8> {
        let mut code: u32 = 0;
        let mut first: u32 = 0;
        let mut index: u32 = 0;
        for len in 1..=MAX_CODE_LEN as usize {
            let bit = reader
                .read_bit()
                .ok_or_else(|| Error::Decode("Huffman payload truncated".into()))?;
            code |= bit;
            let count = self.counts[len];
            if code.wrapping_sub(first) < count {
                return Ok(self.symbols[(index + code - first) as usize]);
            }
            index += count;
            first = (first + count) << 1;
            code <<= 1;
        }
        Err(Error::Decode("invalid Huffman code".into()))
    }
}
