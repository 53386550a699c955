//! Static order-0 arithmetic coding with a 32-bit integer range coder.
//!
//! Model header: the scaled symbol frequencies as a 16-bit symbol table
//! (see `table`). Their total never exceeds 2^16, which keeps
//! `range * total` inside 64 bits and every symbol's interval non-empty
//! while the range stays above a quarter of the code space.
//!
//! An input made of a single distinct byte value has an empty payload.

use super::bitio::{BitReader, BitWriter};
use super::table::{read_table, write_table, TableWidth};
use crate::error::{Error, Result};

const CODE_BITS: u32 = 32;
const TOP: u64 = (1 << CODE_BITS) - 1;
const HALF: u64 = 1 << (CODE_BITS - 1);
const QUARTER: u64 = 1 << (CODE_BITS - 2);
const MAX_TOTAL: u64 = 1 << 16;

/// Cumulative frequency table; `cum[s]..cum[s + 1]` is the interval of `s`.
struct Model {
    cum: [u64; 257],
}

impl Model {
    fn from_freqs(freqs: &[u32; 256]) -> Self {
        let mut cum = [0u64; 257];
        for s in 0..256 {
            cum[s + 1] = cum[s] + u64::from(freqs[s]);
        }
        Self { cum }
    }

    fn total(&self) -> u64 {
        self.cum[256]
    }

    fn distinct(&self) -> usize {
        (0..256).filter(|&s| self.cum[s + 1] > self.cum[s]).count()
    }

    /// Symbol whose interval contains `target`.
    fn symbol_for(&self, target: u64) -> usize {
        self.cum[1..].partition_point(|&c| c <= target)
    }
}

pub(crate) fn scale_frequencies(counts: &[u64; 256]) -> [u32; 256] {
    let total: u64 = counts.iter().sum();
    let mut freqs = [0u32; 256];
    if total <= MAX_TOTAL {
        for (f, &c) in freqs.iter_mut().zip(counts) {
            *f = c as u32;
        }
    } else {
        // Leave room for the floor of one on every present symbol.
        let budget = MAX_TOTAL - 256;
        for (f, &c) in freqs.iter_mut().zip(counts) {
            if c > 0 {
                *f = ((u128::from(c) * u128::from(budget) / u128::from(total)) as u32).max(1);
            }
        }
    }
    freqs
}

pub(crate) fn encode(input: &[u8]) -> (Vec<u8>, Vec<u8>) {
    let mut counts = [0u64; 256];
    for &b in input {
        counts[b as usize] += 1;
    }
    let freqs = scale_frequencies(&counts);
    let mut model_bytes = Vec::new();
    write_table(&mut model_bytes, freqs.into_iter(), TableWidth::U16);

    let model = Model::from_freqs(&freqs);
    if model.distinct() <= 1 {
        return (model_bytes, Vec::new());
    }

    let total = model.total();
    let mut w = BitWriter::with_capacity(input.len() + 8);
    let mut low: u64 = 0;
    let mut high: u64 = TOP;
    let mut pending: u64 = 0;

    let emit = |w: &mut BitWriter, bit: bool, pending: &mut u64| {
        w.write_bit(bit);
        while *pending > 0 {
            w.write_bit(!bit);
            *pending -= 1;
        }
    };

    for &b in input {
        let s = b as usize;
        let range = high - low + 1;
        high = low + range * model.cum[s + 1] / total - 1;
        low += range * model.cum[s] / total;
        loop {
            if high < HALF {
                emit(&mut w, false, &mut pending);
            } else if low >= HALF {
                emit(&mut w, true, &mut pending);
                low -= HALF;
                high -= HALF;
            } else if low >= QUARTER && high < HALF + QUARTER {
                pending += 1;
                low -= QUARTER;
                high -= QUARTER;
            } else {
                break;
            }
            low <<= 1;
            high = (high << 1) | 1;
        }
    }
    pending += 1;
    emit(&mut w, low >= QUARTER, &mut pending);
    (model_bytes, w.finish())
}

pub(crate) fn model_len(bytes: &[u8]) -> Result<usize> {
    read_table(bytes, TableWidth::U16).map(|(_, used)| used)
}

pub(crate) fn decode(model_bytes: &[u8], payload: &[u8], original_len: usize) -> Result<Vec<u8>> {
    let (table, _) = read_table(model_bytes, TableWidth::U16)?;
    let mut freqs = [0u32; 256];
    for (f, &v) in freqs.iter_mut().zip(&table) {
        *f = v;
    }
    let model = Model::from_freqs(&freqs);
    if original_len == 0 {
        return Ok(Vec::new());
    }
    let total = model.total();
    if total == 0 || total > MAX_TOTAL {
        return Err(Error::Decode(format!("invalid frequency total {total}")));
    }
    if model.distinct() == 1 {
        if !payload.is_empty() {
            return Err(Error::Decode("unexpected payload for single-symbol model".into()));
        }
        let sym = model.symbol_for(0) as u8;
        return Ok(vec![sym; original_len]);
    }

    let mut reader = BitReader::new(payload);
    let mut value: u64 = 0;
    for _ in 0..CODE_BITS {
        value = (value << 1) | u64::from(reader.read_bit_or_zero());
    }
    let mut low: u64 = 0;
    let mut high: u64 = TOP;
    let mut out = Vec::with_capacity(original_len.min(1 << 24));

    for _ in 0..original_len {
        let range = high - low + 1;
        let target = ((value - low + 1) * total - 1) / range;
        let s = model.symbol_for(target);
        if s >= 256 {
            return Err(Error::Decode("arithmetic code value out of range".into()));
        }
        out.push(s as u8);
        high = low + range * model.cum[s + 1] / total - 1;
        low += range * model.cum[s] / total;
        loop {
            if high < HALF {
            } else if low >= HALF {
                low -= HALF;
                high -= HALF;
                value -= HALF;
            } else if low >= QUARTER && high < HALF + QUARTER {
                low -= QUARTER;
                high -= QUARTER;
                value -= QUARTER;
            } else {
                break;
            }
            low <<= 1;
            high = (high << 1) | 1;
            value = (value << 1) | u64::from(reader.read_bit_or_zero());
        }
    }
    Ok(out)
}
