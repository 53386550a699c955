//! Conversions from publication units to the model's seconds and ratios.
//!
//! A megabyte is 2^20 bytes throughout.

use crate::error::{positive, Error, Result};

pub const MIB: f64 = 1024.0 * 1024.0;

/// Default bits per subpixel of an uncompressed 8-bit channel.
pub const DEFAULT_DEPTH_BITS: f64 = 8.0;

/// Size in bytes of an uncompressed corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct CorpusSize {
    pub bytes: u64,
}

impl CorpusSize {
    pub const fn new(bytes: u64) -> Self {
        Self { bytes }
    }

    fn checked(self) -> Result<f64> {
        if self.bytes == 0 {
            return Err(Error::invalid("corpus size", 0.0));
        }
        Ok(self.bytes as f64)
    }
}

/// `depth_bits / bpsp`.
pub fn ratio_from_bpsp(bpsp: f64, depth_bits: f64) -> Result<f64> {
    positive(bpsp, || "bpsp".into())?;
    positive(depth_bits, || "depth_bits".into())?;
    Ok(depth_bits / bpsp)
}

pub fn bpsp_from_ratio(ratio: f64, depth_bits: f64) -> Result<f64> {
    positive(ratio, || "ratio".into())?;
    positive(depth_bits, || "depth_bits".into())?;
    Ok(depth_bits / ratio)
}

/// Seconds to compress `size` at `speed_mbps` MB/s.
pub fn encode_time_from_speed(size: CorpusSize, speed_mbps: f64) -> Result<f64> {
    let bytes = size.checked()?;
    positive(speed_mbps, || "compression speed".into())?;
    Ok(bytes / (speed_mbps * MIB))
}

pub fn speed_from_encode_time(size: CorpusSize, seconds: f64) -> Result<f64> {
    let bytes = size.checked()?;
    positive(seconds, || "encoding time".into())?;
    Ok(bytes / (seconds * MIB))
}

/// Seconds to decompress `size` at `speed_mbps` MB/s, where the speed is
/// quoted against compressed bytes (hence the division by `ratio`).
pub fn decode_time_from_speed(size: CorpusSize, speed_mbps: f64, ratio: f64) -> Result<f64> {
    let bytes = size.checked()?;
    positive(speed_mbps, || "decompression speed".into())?;
    positive(ratio, || "ratio".into())?;
    Ok(bytes / (speed_mbps * ratio * MIB))
}

pub fn speed_from_decode_time(size: CorpusSize, seconds: f64, ratio: f64) -> Result<f64> {
    let bytes = size.checked()?;
    positive(seconds, || "decoding time".into())?;
    positive(ratio, || "ratio".into())?;
    Ok(bytes / (seconds * ratio * MIB))
}

pub fn ratio_from_sizes(original_bytes: u64, compressed_bytes: u64) -> Result<f64> {
    if original_bytes == 0 {
        return Err(Error::invalid("original size", 0.0));
    }
    if compressed_bytes == 0 {
        return Err(Error::invalid("compressed size", 0.0));
    }
    Ok(original_bytes as f64 / compressed_bytes as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SILESIA: CorpusSize = CorpusSize::new(211_938_580);

    #[test]
    fn bpsp_examples() {
        assert_eq!(ratio_from_bpsp(8.0, 8.0).unwrap(), 1.0);
        assert!((ratio_from_bpsp(4.733, 8.0).unwrap() - 1.6903).abs() < 5e-5);
        assert!((ratio_from_bpsp(3.291, 8.0).unwrap() - 2.4309).abs() < 5e-5);
        assert!(ratio_from_bpsp(0.0, 8.0).is_err());
        assert!(ratio_from_bpsp(4.0, -8.0).is_err());
    }

    #[test]
    fn speed_examples() {
        assert_eq!(
            encode_time_from_speed(CorpusSize::new(1_048_576), 1.0).unwrap(),
            1.0
        );
        assert!((encode_time_from_speed(SILESIA, 13125.6).unwrap() - 0.0154).abs() < 5e-5);
        assert!((encode_time_from_speed(SILESIA, 1687.6).unwrap() - 0.1198).abs() < 5e-5);
        assert_eq!(
            decode_time_from_speed(CorpusSize::new(1_048_576), 1.0, 1.0).unwrap(),
            1.0
        );
        assert!((decode_time_from_speed(SILESIA, 80166.0, 2.101).unwrap() - 0.0012).abs() < 5e-5);
        let d1 = decode_time_from_speed(SILESIA, 500.0, 2.0).unwrap();
        let d2 = decode_time_from_speed(SILESIA, 500.0, 4.0).unwrap();
        assert!((d1 / d2 - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_positive() {
        assert!(encode_time_from_speed(SILESIA, 0.0).is_err());
        assert!(encode_time_from_speed(CorpusSize::new(0), 1.0).is_err());
        assert!(decode_time_from_speed(SILESIA, 1.0, -2.0).is_err());
        assert!(ratio_from_sizes(1000, 0).is_err());
        assert!(ratio_from_sizes(0, 10).is_err());
    }

    #[test]
    fn size_ratios() {
        assert_eq!(ratio_from_sizes(1000, 1000).unwrap(), 1.0);
        assert_eq!(ratio_from_sizes(1000, 500).unwrap(), 2.0);
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    proptest! {
        #[test]
        fn encode_speed_round_trip(bytes in 1u64..1u64 << 40, cs in 1e-3f64..1e6) {
            let size = CorpusSize::new(bytes);
            let e = encode_time_from_speed(size, cs).unwrap();
            prop_assert!(e > 0.0);
            prop_assert!(rel(speed_from_encode_time(size, e).unwrap(), cs) <= 1e-9);
        }

        #[test]
        fn decode_speed_round_trip(bytes in 1u64..1u64 << 40, ds in 1e-3f64..1e6, r in 0.1f64..100.0) {
            let size = CorpusSize::new(bytes);
            let d = decode_time_from_speed(size, ds, r).unwrap();
            prop_assert!(d > 0.0);
            prop_assert!(rel(speed_from_decode_time(size, d, r).unwrap(), ds) <= 1e-9);
        }

        #[test]
        fn bpsp_homogeneity(bpsp in 0.01f64..64.0, lambda in 0.01f64..100.0) {
            let a = ratio_from_bpsp(lambda * bpsp, 8.0).unwrap();
            let b = ratio_from_bpsp(bpsp, 8.0).unwrap() / lambda;
            prop_assert!(rel(a, b) <= 1e-12);
            let back = bpsp_from_ratio(ratio_from_bpsp(bpsp, 8.0).unwrap(), 8.0).unwrap();
            prop_assert!(rel(back, bpsp) <= 1e-9);
        }
    }
}
