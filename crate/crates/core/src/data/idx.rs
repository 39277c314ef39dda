//! Big-endian IDX files as distributed for MNIST.

use std::io::Read;
use std::path::Path;

use byteorder::{BigEndian, ByteOrder};
use flate2::read::GzDecoder;

use crate::error::{Error, Result};

pub const IMAGES_MAGIC: u32 = 0x0000_0803;
pub const LABELS_MAGIC: u32 = 0x0000_0801;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdxImages {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    /// Row-major pixels, `count · rows · cols` bytes.
    pub pixels: Vec<u8>,
}

fn header(bytes: &[u8], magic: u32, dims: usize) -> Result<Vec<usize>> {
    let need = 4 + 4 * dims;
    if bytes.len() < 4 {
        return Err(Error::format(bytes.len(), "truncated magic number"));
    }
    let found = BigEndian::read_u32(bytes);
    if found != magic {
        return Err(Error::format(0, format!("expected magic {magic:#010x}, found {found:#010x}")));
    }
    if bytes.len() < need {
        return Err(Error::format(bytes.len(), "truncated dimension header"));
    }
    Ok((0..dims).map(|d| BigEndian::read_u32(&bytes[4 + 4 * d..]) as usize).collect())
}

fn payload(bytes: &[u8], start: usize, len: Option<usize>) -> Result<&[u8]> {
    let len = len.ok_or_else(|| Error::format(start, "dimension product overflows"))?;
    let have = bytes.len() - start;
    if have < len {
        return Err(Error::format(bytes.len(), format!("truncated payload: expected {len} bytes, found {have}")));
    }
    if have > len {
        return Err(Error::format(start + len, "trailing bytes after payload"));
    }
    Ok(&bytes[start..])
}

pub fn decode_idx_images(bytes: &[u8]) -> Result<IdxImages> {
    let d = header(bytes, IMAGES_MAGIC, 3)?;
    let (count, rows, cols) = (d[0], d[1], d[2]);
    let len = count.checked_mul(rows).and_then(|n| n.checked_mul(cols));
    let pixels = payload(bytes, 16, len)?.to_vec();
    Ok(IdxImages { count, rows, cols, pixels })
}

pub fn decode_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    let d = header(bytes, LABELS_MAGIC, 1)?;
    Ok(payload(bytes, 8, Some(d[0]))?.to_vec())
}

pub fn encode_idx_images(images: &IdxImages) -> Result<Vec<u8>> {
    let dims = [images.count, images.rows, images.cols];
    if images.pixels.len() != dims.iter().product::<usize>() {
        return Err(Error::argument("pixel buffer does not match dimensions"));
    }
    let mut out = Vec::with_capacity(16 + images.pixels.len());
    out.extend_from_slice(&IMAGES_MAGIC.to_be_bytes());
    for d in dims {
        out.extend_from_slice(&dim_u32(d)?.to_be_bytes());
    }
    out.extend_from_slice(&images.pixels);
    Ok(out)
}

pub fn encode_idx_labels(labels: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&LABELS_MAGIC.to_be_bytes());
    out.extend_from_slice(&dim_u32(labels.len())?.to_be_bytes());
    out.extend_from_slice(labels);
    Ok(out)
}

fn dim_u32(d: usize) -> Result<u32> {
    u32::try_from(d).map_err(|_| Error::argument(format!("dimension {d} does not fit in 32 bits")))
}

/// Reads a file, transparently gunzipping it when it starts with the gzip magic.
pub fn read_maybe_gz(path: impl AsRef<Path>) -> Result<Vec<u8>> {
    let raw = std::fs::read(path)?;
    if raw.starts_with(&[0x1f, 0x8b]) {
        let mut out = Vec::new();
        GzDecoder::new(raw.as_slice())
            .read_to_end(&mut out)
            .map_err(|e| Error::format(0, format!("bad gzip stream: {e}")))?;
        Ok(out)
    } else {
        Ok(raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn images_round_trip() {
        let img = IdxImages { count: 2, rows: 2, cols: 3, pixels: (0..12).collect() };
        let bytes = encode_idx_images(&img).unwrap();
        assert_eq!(&bytes[..4], &[0, 0, 8, 3]);
        assert_eq!(decode_idx_images(&bytes).unwrap(), img);
    }

    #[test]
    fn labels_with_image_magic_are_rejected() {
        let mut bytes = encode_idx_labels(&[1, 2, 3]).unwrap();
        bytes[3] = 3;
        assert!(matches!(decode_idx_labels(&bytes), Err(Error::Format { offset: 0, .. })));
    }

    #[test]
    fn truncation_and_trailing_bytes() {
        let bytes = encode_idx_labels(&[1, 2, 3]).unwrap();
        for cut in 0..bytes.len() {
            assert!(matches!(decode_idx_labels(&bytes[..cut]), Err(Error::Format { .. })));
        }
        let mut long = bytes;
        long.push(7);
        assert!(matches!(decode_idx_labels(&long), Err(Error::Format { offset: 11, .. })));
    }

    #[test]
    fn huge_dimensions_do_not_allocate() {
        let mut bytes = IMAGES_MAGIC.to_be_bytes().to_vec();
        for _ in 0..3 {
            bytes.extend_from_slice(&u32::MAX.to_be_bytes());
        }
        assert!(matches!(decode_idx_images(&bytes), Err(Error::Format { .. })));
    }
}
