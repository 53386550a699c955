//! Variable-width LZW.
//!
//! Codes 0..=255 are literals and 256 clears the dictionary; new entries
//! start at 257. The k-th code after a reset is written with
//! `max(9, bit_length(256 + k))` bits, which always covers the largest code
//! the encoder could emit at that point. When entry 65535 has been
//! assigned the encoder emits a clear code and starts over.
//!
//! Model header: `min_width: u8 = 9, max_width: u8 = 16`.

use std::collections::HashMap;

use super::bitio::{BitReader, BitWriter};
use crate::error::{Error, Result};

const CLEAR: u32 = 256;
const FIRST_FREE: u32 = 257;
const MIN_WIDTH: u8 = 9;
const MAX_WIDTH: u8 = 16;
const MAX_CODE: u32 = (1 << MAX_WIDTH) - 1;

#[inline]
fn width_for(k: u32) -> u32 {
    let needed = 32 - (256 + k).leading_zeros();
    needed.max(u32::from(MIN_WIDTH))
}

pub(crate) fn encode(input: &[u8]) -> (Vec<u8>, Vec<u8>) {
    let model = vec![MIN_WIDTH, MAX_WIDTH];
    let Some((&first, rest)) = input.split_first() else {
        return (model, Vec::new());
    };
    let mut w = BitWriter::with_capacity(input.len() / 2 + 16);
    let mut dict: HashMap<u32, u32> = HashMap::with_capacity(1 << 16);
    let mut next = FIRST_FREE;
    let mut emitted: u32 = 0;
    let mut current = u32::from(first);

    for &byte in rest {
        let key = (current << 8) | u32::from(byte);
        if let Some(&code) = dict.get(&key) {
            current = code;
            continue;
        }
        w.write(current, width_for(emitted));
        emitted += 1;
        dict.insert(key, next);
        next += 1;
        if next > MAX_CODE {
            w.write(CLEAR, width_for(emitted));
            dict.clear();
            next = FIRST_FREE;
            emitted = 0;
        }
        current = u32::from(byte);
    }
    w.write(current, width_for(emitted));
    (model, w.finish())
}

pub(crate) fn model_len(bytes: &[u8]) -> Result<usize> {
    if bytes.len() < 2 {
        return Err(Error::Decode("LZW header truncated".into()));
    }
    Ok(2)
}

struct Entry {
    prefix: u32,
    last: u8,
    first: u8,
    len: u32,
}

pub(crate) fn decode(model: &[u8], payload: &[u8], original_len: usize) -> Result<Vec<u8>> {
    if model.len() != 2 || model[0] != MIN_WIDTH || model[1] != MAX_WIDTH {
        return Err(Error::Decode(format!(
            "unsupported LZW code widths {model:?}"
        )));
    }
    let mut dict: Vec<Entry> = (0..=255u8)
        .map(|b| Entry {
            prefix: u32::MAX,
            last: b,
            first: b,
            len: 1,
        })
        .collect();
    // Placeholder for the clear code keeps indices aligned with codes.
    dict.push(Entry {
        prefix: u32::MAX,
        last: 0,
        first: 0,
        len: 0,
    });

    let mut reader = BitReader::new(payload);
    let mut out = Vec::with_capacity(original_len.min(1 << 24));
    let mut prev: Option<u32> = None;
    let mut read: u32 = 0;

    while out.len() < original_len {
        let code = reader
            .read(width_for(read))
            .ok_or_else(|| Error::Decode("LZW payload truncated".into()))?;
        read += 1;
        if code == CLEAR {
            dict.truncate(FIRST_FREE as usize);
            prev = None;
            read = 0;
            continue;
        }
        let next = dict.len() as u32;
        match prev {
            None => {
                if code > 255 {
                    return Err(Error::Decode(format!("LZW code {code} before any entry")));
                }
                out.push(code as u8);
            }
            Some(p) => {
                let first = if code < next {
                    dict[code as usize].first
                } else if code == next {
                    dict[p as usize].first
                } else {
                    return Err(Error::Decode(format!("LZW code {code} out of range")));
                };
                if next <= MAX_CODE {
                    let prev_entry = &dict[p as usize];
                    let entry = Entry {
                        prefix: p,
                        last: first,
                        first: prev_entry.first,
                        len: prev_entry.len + 1,
                    };
                    dict.push(entry);
                } else if code == next {
                    return Err(Error::Decode("LZW dictionary overflow".into()));
                }
                emit(&dict, code, &mut out);
            }
        }
        prev = Some(code);
    }
    if out.len() != original_len {
        return Err(Error::Decode("LZW output overruns the declared length".into()));
    }
    Ok(out)
}

fn emit(dict: &[Entry], code: u32, out: &mut Vec<u8>) {
    let len = dict[code as usize].len as usize;
    let start = out.len();
    out.resize(start + len, 0);
    let mut c = code;
    for slot in out[start..].iter_mut().rev() {
        let e = &dict[c as usize];
        *slot = e.last;
        c = e.prefix;
    }
}
