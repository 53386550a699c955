//! Per-symbol tables stored in coder headers.
//!
//! Sparse form: `0x00, count: u16 LE, (symbol: u8, value) * count`.
//! Dense form: `0x01, value * 256`. The encoder picks the shorter one.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub(crate) enum TableWidth {
    U8,
    U16,
}

impl TableWidth {
    fn bytes(self) -> usize {
        match self {
            TableWidth::U8 => 1,
            TableWidth::U16 => 2,
        }
    }

    fn push(self, out: &mut Vec<u8>, v: u32) {
        match self {
            TableWidth::U8 => out.push(v as u8),
            TableWidth::U16 => out.extend_from_slice(&(v as u16).to_le_bytes()),
        }
    }

    fn get(self, bytes: &[u8]) -> u32 {
        match self {
            TableWidth::U8 => u32::from(bytes[0]),
            TableWidth::U16 => u32::from(u16::from_le_bytes([bytes[0], bytes[1]])),
        }
    }
}

const SPARSE: u8 = 0;
const DENSE: u8 = 1;

pub(crate) fn write_table(out: &mut Vec<u8>, values: impl Iterator<Item = u32>, width: TableWidth) {
    let values: Vec<u32> = values.collect();
    debug_assert_eq!(values.len(), 256);
    let present: Vec<usize> = (0..256).filter(|&s| values[s] > 0).collect();
    let sparse_len = 2 + present.len() * (1 + width.bytes());
    let dense_len = 256 * width.bytes();
    if sparse_len < dense_len {
        out.push(SPARSE);
        out.extend_from_slice(&(present.len() as u16).to_le_bytes());
        for s in present {
            out.push(s as u8);
            width.push(out, values[s]);
        }
    } else {
        out.push(DENSE);
        for v in values {
            width.push(out, v);
        }
    }
}

/// Parses a table at the start of `bytes`; returns it and the bytes consumed.
pub(crate) fn read_table(bytes: &[u8], width: TableWidth) -> Result<([u32; 256], usize)> {
    let truncated = || Error::Decode("symbol table truncated".into());
    let mut table = [0u32; 256];
    let (&mode, rest) = bytes.split_first().ok_or_else(truncated)?;
    match mode {
        SPARSE => {
            let count_bytes = rest.get(..2).ok_or_else(truncated)?;
            let count = u16::from_le_bytes([count_bytes[0], count_bytes[1]]) as usize;
            if count > 256 {
                return Err(Error::Decode(format!("symbol table lists {count} entries")));
            }
            let stride = 1 + width.bytes();
            let body = rest.get(2..2 + count * stride).ok_or_else(truncated)?;
            let mut last: Option<u8> = None;
            for entry in body.chunks_exact(stride) {
                let sym = entry[0];
                if last.is_some_and(|l| l >= sym) {
                    return Err(Error::Decode("symbol table not strictly ascending".into()));
                }
                last = Some(sym);
                let v = width.get(&entry[1..]);
                if v == 0 {
                    return Err(Error::Decode("zero entry in sparse symbol table".into()));
                }
                table[sym as usize] = v;
            }
            Ok((table, 1 + 2 + count * stride))
        }
        DENSE => {
            let body = rest.get(..256 * width.bytes()).ok_or_else(truncated)?;
            for (slot, chunk) in table.iter_mut().zip(body.chunks_exact(width.bytes())) {
                *slot = width.get(chunk);
            }
            Ok((table, 1 + 256 * width.bytes()))
        }
        other => Err(Error::Decode(format!("unknown symbol table mode {other}"))),
    }
}
