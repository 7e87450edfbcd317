//! ASPF v1: a lossless container for real-valued maps.
//!
//! Layout, all little-endian:
//!
//! | bytes | field                                   |
//! |-------|-----------------------------------------|
//! | 4     | magic `ASPF`                            |
//! | 4     | version, `u32` = 1                      |
//! | 4     | width, `u32`                            |
//! | 4     | height, `u32`                           |
//! | 4     | origin x, `i32`                         |
//! | 4     | origin y, `i32`                         |
//! | 1     | method tag, 0 = direct, 1 = gradient    |
//! | 3     | reserved, zero                          |
//! | 8·w·h | values, `f64`, row-major                |

use super::{DistanceMap, MapMethod};
use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"ASPF";
const VERSION: u32 = 1;
const HEADER_LEN: usize = 28;

pub fn write_map(map: &DistanceMap) -> Result<Vec<u8>> {
    let dim = |v: usize, name: &str| {
        u32::try_from(v).map_err(|_| Error::Encode(format!("map {name} {v} does not fit in u32")))
    };
    if map.values.len() != map.width * map.height {
        return Err(Error::Encode(format!(
            "map of {}x{} holds {} values",
            map.width,
            map.height,
            map.values.len()
        )));
    }
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * map.values.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&dim(map.width, "width")?.to_le_bytes());
    out.extend_from_slice(&dim(map.height, "height")?.to_le_bytes());
    out.extend_from_slice(&map.origin.0.to_le_bytes());
    out.extend_from_slice(&map.origin.1.to_le_bytes());
    out.push(map.method.tag());
    out.extend_from_slice(&[0; 3]);
    for v in &map.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

fn le_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap())
}

pub fn read_map(bytes: &[u8]) -> Result<DistanceMap> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::parse(
            bytes.len(),
            format!("truncated header: expected {HEADER_LEN} bytes, got {}", bytes.len()),
        ));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::parse(0, "bad magic, expected \"ASPF\""));
    }
    let version = le_u32(bytes, 4);
    if version != VERSION {
        return Err(Error::parse(4, format!("unsupported version {version}")));
    }
    let width = le_u32(bytes, 8) as usize;
    let height = le_u32(bytes, 12) as usize;
    let origin = (le_u32(bytes, 16) as i32, le_u32(bytes, 20) as i32);
    let method =
        MapMethod::from_tag(bytes[24]).ok_or_else(|| Error::parse(24, format!("unknown method tag {}", bytes[24])))?;
    if bytes[25..28] != [0; 3] {
        return Err(Error::parse(25, "reserved bytes must be zero"));
    }

    let expected = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(8))
        .and_then(|n| n.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::parse(8, "map dimensions overflow"))?;
    if bytes.len() != expected {
        return Err(Error::parse(
            bytes.len().min(expected),
            format!("expected {expected} bytes in total, got {}", bytes.len()),
        ));
    }
    let values = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(DistanceMap {
        width,
        height,
        origin,
        values,
        method,
    })
}
