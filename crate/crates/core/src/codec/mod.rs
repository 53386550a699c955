//! Built-in lossless coders and their container format.
//!
//! Every encoded blob serializes as
//!
//! ```text
//! magic "CSEL" | codec id: u8 | version: u8 | original length: u64 LE | header | payload
//! ```
//!
//! The header of every built-in coder starts with the CRC-32 of the
//! original bytes, followed by the coder's model (code lengths, code widths
//! or symbol frequencies). The payload runs to the end of the blob.

mod arithmetic;
mod bitio;
mod huffman;
mod lzw;
mod table;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"CSEL";
pub const FORMAT_VERSION: u8 = 1;
const PREFIX_LEN: usize = 4 + 1 + 1 + 8;
const CRC_LEN: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodecKind {
    Identity,
    Huffman,
    Lzw,
    Arithmetic,
}

impl CodecKind {
    pub const ALL: [CodecKind; 4] = [
        CodecKind::Identity,
        CodecKind::Huffman,
        CodecKind::Lzw,
        CodecKind::Arithmetic,
    ];

    /// The three entropy coders benchmarked by default.
    pub const ENTROPY_CODERS: [CodecKind; 3] =
        [CodecKind::Huffman, CodecKind::Lzw, CodecKind::Arithmetic];

    pub fn id(self) -> u8 {
        match self {
            CodecKind::Identity => 0,
            CodecKind::Huffman => 1,
            CodecKind::Lzw => 2,
            CodecKind::Arithmetic => 3,
        }
    }

    pub fn from_id(id: u8) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.id() == id)
            .ok_or_else(|| Error::Decode(format!("unknown codec id {id}")))
    }

    pub fn name(self) -> &'static str {
        match self {
            CodecKind::Identity => "identity",
            CodecKind::Huffman => "huffman",
            CodecKind::Lzw => "lzw",
            CodecKind::Arithmetic => "arithmetic",
        }
    }

    fn model_len(self, bytes: &[u8]) -> Result<usize> {
        match self {
            CodecKind::Identity => Ok(0),
            CodecKind::Huffman => huffman::model_len(bytes),
            CodecKind::Lzw => lzw::model_len(bytes),
            CodecKind::Arithmetic => arithmetic::model_len(bytes),
        }
    }
}

impl fmt::Display for CodecKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CodecKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                Error::Usage(format!(
                    "unknown built-in codec `{s}` (expected identity, huffman, lzw or arithmetic)"
                ))
            })
    }
}

/// An encoded input: self-describing header plus bit-packed payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedBlob {
    pub kind: CodecKind,
    pub header: Vec<u8>,
    pub payload: Vec<u8>,
    pub original_len: u64,
}

impl EncodedBlob {
    /// Size of the serialized container in bytes.
    pub fn encoded_len(&self) -> usize {
        PREFIX_LEN + self.header.len() + self.payload.len()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        out.extend_from_slice(&MAGIC);
        out.push(self.kind.id());
        out.push(FORMAT_VERSION);
        out.extend_from_slice(&self.original_len.to_le_bytes());
        out.extend_from_slice(&self.header);
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < PREFIX_LEN {
            return Err(Error::Decode("container shorter than its fixed prefix".into()));
        }
        if bytes[..4] != MAGIC {
            return Err(Error::Decode("bad magic bytes".into()));
        }
        let kind = CodecKind::from_id(bytes[4])?;
        if bytes[5] != FORMAT_VERSION {
            return Err(Error::Decode(format!(
                "unsupported container version {}",
                bytes[5]
            )));
        }
        let original_len = u64::from_le_bytes(bytes[6..14].try_into().expect("8 bytes"));
        let rest = &bytes[PREFIX_LEN..];
        if rest.len() < CRC_LEN {
            return Err(Error::Decode("header truncated".into()));
        }
        let header_len = CRC_LEN + kind.model_len(&rest[CRC_LEN..])?;
        Ok(Self {
            kind,
            header: rest[..header_len].to_vec(),
            payload: rest[header_len..].to_vec(),
            original_len,
        })
    }
}

/// A named built-in coder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codec {
    pub name: String,
    pub kind: CodecKind,
}

impl Codec {
    pub fn new(kind: CodecKind) -> Self {
        Self {
            name: kind.name().to_owned(),
            kind,
        }
    }

    pub fn named(name: impl Into<String>, kind: CodecKind) -> Self {
        Self {
            name: name.into(),
            kind,
        }
    }

    pub fn encode(&self, input: &[u8]) -> EncodedBlob {
        let (model, payload) = match self.kind {
            CodecKind::Identity => (Vec::new(), input.to_vec()),
            CodecKind::Huffman => huffman::encode(input),
            CodecKind::Lzw => lzw::encode(input),
            CodecKind::Arithmetic => arithmetic::encode(input),
        };
        let mut header = Vec::with_capacity(CRC_LEN + model.len());
        header.extend_from_slice(&crc32fast::hash(input).to_le_bytes());
        header.extend_from_slice(&model);
        EncodedBlob {
            kind: self.kind,
            header,
            payload,
            original_len: input.len() as u64,
        }
    }

    pub fn decode(&self, blob: &EncodedBlob) -> Result<Vec<u8>> {
        if blob.kind != self.kind {
            return Err(Error::Decode(format!(
                "blob was produced by {}, not {}",
                blob.kind, self.kind
            )));
        }
        if blob.header.len() < CRC_LEN {
            return Err(Error::Decode("header truncated".into()));
        }
        let original_len = usize::try_from(blob.original_len)
            .map_err(|_| Error::Decode("original length does not fit in memory".into()))?;
        let (crc, model) = blob.header.split_at(CRC_LEN);
        let out = match self.kind {
            CodecKind::Identity => {
                if !model.is_empty() {
                    return Err(Error::Decode("identity blob carries a model".into()));
                }
                blob.payload.clone()
            }
            CodecKind::Huffman => huffman::decode(model, &blob.payload, original_len)?,
            CodecKind::Lzw => lzw::decode(model, &blob.payload, original_len)?,
            CodecKind::Arithmetic => arithmetic::decode(model, &blob.payload, original_len)?,
        };
        if out.len() != original_len {
            return Err(Error::Decode(format!(
                "decoded {} bytes, header declares {original_len}",
                out.len()
            )));
        }
        let expected = u32::from_le_bytes(crc.try_into().expect("4 bytes"));
        if crc32fast::hash(&out) != expected {
            return Err(Error::Decode("checksum mismatch".into()));
        }
        Ok(out)
    }

    /// Encodes straight to container bytes.
    pub fn compress(&self, input: &[u8]) -> Vec<u8> {
        self.encode(input).to_bytes()
    }

    pub fn decompress(&self, bytes: &[u8]) -> Result<Vec<u8>> {
        self.decode(&EncodedBlob::from_bytes(bytes)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn all_codecs() -> Vec<Codec> {
        CodecKind::ALL.into_iter().map(Codec::new).collect()
    }

    #[test]
    fn empty_round_trip() {
        for c in all_codecs() {
            let bytes = c.compress(&[]);
            assert_eq!(c.decompress(&bytes).unwrap(), Vec::<u8>::new(), "{}", c.name);
        }
    }

    #[test]
    fn identity_payload_is_input() {
        let input = b"hello, container".to_vec();
        let blob = Codec::new(CodecKind::Identity).encode(&input);
        assert_eq!(blob.payload, input);
        let ratio = input.len() as f64 / blob.encoded_len() as f64;
        assert!(ratio <= 1.0);
    }

    #[test]
    fn container_layout() {
        let bytes = Codec::new(CodecKind::Lzw).compress(b"ab");
        assert_eq!(&bytes[..4], b"CSEL");
        assert_eq!(bytes[4], 2);
        assert_eq!(bytes[5], FORMAT_VERSION);
        assert_eq!(u64::from_le_bytes(bytes[6..14].try_into().unwrap()), 2);
        assert_eq!(&bytes[14..18], &crc32fast::hash(b"ab").to_le_bytes());
        assert_eq!(&bytes[18..20], &[9, 16]);
    }

    #[test]
    fn constant_input_compresses_well() {
        let input = vec![b'z'; 10_000];
        for kind in [CodecKind::Huffman, CodecKind::Arithmetic, CodecKind::Lzw] {
            let c = Codec::new(kind);
            let bytes = c.compress(&input);
            assert!(input.len() as f64 / bytes.len() as f64 > 5.0, "{kind}");
            assert_eq!(c.decompress(&bytes).unwrap(), input);
        }
    }

    #[test]
    fn truncation_is_detected() {
        let input: Vec<u8> = (0..5000u32).map(|i| (i * i % 251) as u8).collect();
        for c in all_codecs() {
            let bytes = c.compress(&input);
            for cut in [1, 2, 7, bytes.len() / 2] {
                let r = c.decompress(&bytes[..bytes.len() - cut]);
                assert!(matches!(r, Err(Error::Decode(_))), "{} cut {cut}", c.name);
            }
        }
    }

    #[test]
    fn corruption_is_detected() {
        let input: Vec<u8> = (0..5000u32).map(|i| (i * 31 % 17) as u8).collect();
        for c in all_codecs() {
            let mut bytes = c.compress(&input);
            let last = bytes.len() - 3;
            bytes[last] ^= 0x10;
            assert!(c.decompress(&bytes).is_err(), "{}", c.name);
        }
    }

    #[test]
    fn bad_prefix_is_rejected() {
        let c = Codec::new(CodecKind::Huffman);
        let mut bytes = c.compress(b"abc");
        bytes[0] = b'X';
        assert!(c.decompress(&bytes).is_err());
        let mut bytes = c.compress(b"abc");
        bytes[5] = 99;
        assert!(c.decompress(&bytes).is_err());
        assert!(Codec::new(CodecKind::Lzw)
            .decompress(&c.compress(b"abc"))
            .is_err());
        assert!(c.decompress(&[]).is_err());
    }

    #[test]
    fn encoding_is_deterministic() {
        let input: Vec<u8> = (0..3000u32).map(|i| (i % 13 + i % 7) as u8).collect();
        for c in all_codecs() {
            assert_eq!(c.compress(&input), c.compress(&input));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn lossless_on_arbitrary_bytes(input in proptest::collection::vec(any::<u8>(), 0..4096)) {
            for c in all_codecs() {
                let bytes = c.compress(&input);
                prop_assert_eq!(c.decompress(&bytes).unwrap(), input.clone());
            }
        }

        #[test]
        fn lossless_on_small_alphabets(input in proptest::collection::vec(0u8..3, 0..20_000)) {
            for c in all_codecs() {
                let bytes = c.compress(&input);
                prop_assert_eq!(c.decompress(&bytes).unwrap(), input.clone());
            }
        }
    }
}
