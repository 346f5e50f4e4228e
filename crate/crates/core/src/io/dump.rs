//! Bit-exact binary dumps of coefficient fields.
//!
//! Layout, little-endian throughout:
//!
//! | bytes | content            |
//! |-------|--------------------|
//! | 4     | magic `HGL1`       |
//! | 4     | version (u32)      |
//! | 4     | d (u32)            |
//! | 4     | L (u32)            |
//! | 8     | lambda (f64)       |
//! | 8·d·L^d | edge values (f64), canonical edge order |

use std::fs;
use std::path::Path;

use crate::ensemble::CoefficientField;
use crate::error::{Error, Result};
use crate::io::report::write_atomic;
use crate::lattice::TorusLattice;

pub const MAGIC: &[u8; 4] = b"HGL1";
pub const VERSION: u32 = 1;
pub const HEADER_BYTES: usize = 24;

pub fn encode_field(a: &CoefficientField) -> Vec<u8> {
    let lat = a.lattice();
    let mut out = Vec::with_capacity(HEADER_BYTES + 8 * lat.num_edges());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(lat.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(lat.side() as u32).to_le_bytes());
    out.extend_from_slice(&a.lambda().to_le_bytes());
    for v in a.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn u32_at(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4-byte slice"))
}

fn f64_at(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().expect("8-byte slice"))
}

pub fn decode_field(bytes: &[u8]) -> Result<CoefficientField> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        let found = &bytes[..bytes.len().min(4)];
        return Err(Error::BadMagic {
            expected: String::from_utf8_lossy(MAGIC).into_owned(),
            found: String::from_utf8_lossy(found).into_owned(),
        });
    }
    if bytes.len() < HEADER_BYTES {
        return Err(Error::Truncated {
            expected: HEADER_BYTES as u64,
            actual: bytes.len() as u64,
        });
    }
    let version = u32_at(bytes, 4);
    if version != VERSION {
        return Err(Error::UnsupportedVersion {
            found: version,
            supported: VERSION,
        });
    }
    let lattice = TorusLattice::new(u32_at(bytes, 8) as usize, u32_at(bytes, 12) as usize)?;
    let lambda = f64_at(bytes, 16);
    let expected = (HEADER_BYTES + 8 * lattice.num_edges()) as u64;
    if bytes.len() as u64 != expected {
        return Err(Error::Truncated {
            expected,
            actual: bytes.len() as u64,
        });
    }
    let values = bytes[HEADER_BYTES..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    CoefficientField::new(lattice, lambda, values)
}

pub fn dump_field(a: &CoefficientField, path: &Path) -> Result<()> {
    write_atomic(path, &encode_field(a))
}

pub fn load_field(path: &Path) -> Result<CoefficientField> {
    decode_field(&fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{sample, EnsembleSpec, SeedContext};

    fn field() -> CoefficientField {
        let lat = TorusLattice::new(2, 4).unwrap();
        sample(&EnsembleSpec::iid_uniform(0.3), &lat, SeedContext::new(9, 1)).unwrap()
    }

    #[test]
    fn header_layout() {
        let bytes = encode_field(&field());
        assert_eq!(&bytes[..4], b"HGL1");
        assert_eq!(bytes[4..8], [1, 0, 0, 0]);
        assert_eq!(bytes[8..12], [2, 0, 0, 0]);
        assert_eq!(bytes[12..16], [4, 0, 0, 0]);
        assert_eq!(bytes[16..24], 0.3_f64.to_le_bytes());
        assert_eq!(bytes.len(), 24 + 8 * 32);
    }

    #[test]
    fn round_trip_in_memory() {
        let a = field();
        let b = decode_field(&encode_field(&a)).unwrap();
        assert_eq!(a.lambda().to_bits(), b.lambda().to_bits());
        assert!(a.values().iter().zip(b.values()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn corruption_is_reported() {
        let mut bytes = encode_field(&field());
        let len = bytes.len() as u64;
        assert!(matches!(
            decode_field(&bytes[..bytes.len() - 3]),
            Err(Error::Truncated { expected, actual }) if expected == len && actual == len - 3
        ));
        bytes[4] = 7;
        assert!(matches!(decode_field(&bytes), Err(Error::UnsupportedVersion { found: 7, .. })));
        bytes[0] = b'X';
        let err = decode_field(&bytes).unwrap_err();
        assert!(err.to_string().contains("HGL1"));
        assert!(matches!(decode_field(b"HG"), Err(Error::BadMagic { .. })));
    }
}
