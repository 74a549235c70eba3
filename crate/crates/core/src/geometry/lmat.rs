//! LMAT binary loss-matrix files and CSV ingestion.
//!
//! Layout (all integers little-endian):
//!
//! | offset | size  | field                                   |
//! |--------|-------|-----------------------------------------|
//! | 0      | 4     | magic `LMAT`                            |
//! | 4      | 4     | format version, u32 = 1                 |
//! | 8      | 8     | N, u64                                  |
//! | 16     | 8     | J, u64                                  |
//! | 24     | 1     | loss kind (0 zero-one, 1 CE, 2 custom)  |
//! | 25     | 8·N·J | f64 values, row-major                   |

use std::io::{Read, Write};

use ndarray::Array2;

use super::{LossKind, LossMatrix};
use crate::error::{Error, Result};

pub const LMAT_MAGIC: &[u8; 4] = b"LMAT";
pub const LMAT_VERSION: u32 = 1;
const HEADER_LEN: u64 = 25;

pub fn write_lmat<W: Write>(mut out: W, losses: &LossMatrix) -> Result<()> {
    out.write_all(LMAT_MAGIC)?;
    out.write_all(&LMAT_VERSION.to_le_bytes())?;
    out.write_all(&(losses.n_data() as u64).to_le_bytes())?;
    out.write_all(&(losses.n_samples() as u64).to_le_bytes())?;
    out.write_all(&[losses.kind().code()])?;
    let mut buf = Vec::with_capacity(losses.n_samples() * 8);
    for n in 0..losses.n_data() {
        buf.clear();
        for v in losses.row(n) {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        out.write_all(&buf)?;
    }
    out.flush()?;
    Ok(())
}

fn read_exact_at<R: Read>(input: &mut R, buf: &mut [u8], offset: u64, what: &str) -> Result<()> {
    input.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => Error::Format {
            offset,
            message: format!("unexpected end of file while reading {what}"),
        },
        _ => Error::Io(e),
    })
}

pub fn read_lmat<R: Read>(mut input: R) -> Result<LossMatrix> {
    let mut magic = [0u8; 4];
    read_exact_at(&mut input, &mut magic, 0, "magic")?;
    if &magic != LMAT_MAGIC {
        return Err(Error::Format { offset: 0, message: format!("bad magic {magic:?}") });
    }
    let mut b4 = [0u8; 4];
    read_exact_at(&mut input, &mut b4, 4, "version")?;
    let version = u32::from_le_bytes(b4);
    if version != LMAT_VERSION {
        return Err(Error::Format { offset: 4, message: format!("unsupported version {version}") });
    }
    let mut b8 = [0u8; 8];
    read_exact_at(&mut input, &mut b8, 8, "N")?;
    let n = u64::from_le_bytes(b8);
    read_exact_at(&mut input, &mut b8, 16, "J")?;
    let j = u64::from_le_bytes(b8);
    if n == 0 || j == 0 {
        let offset = if n == 0 { 8 } else { 16 };
        return Err(Error::Format { offset, message: format!("empty shape {n}x{j}") });
    }
    let mut b1 = [0u8; 1];
    read_exact_at(&mut input, &mut b1, 24, "loss kind")?;
    let kind = LossKind::from_code(b1[0])
        .ok_or_else(|| Error::Format { offset: 24, message: format!("unknown loss kind {}", b1[0]) })?;

    let count = n
        .checked_mul(j)
        .filter(|c| c.checked_mul(8).is_some() && *c <= usize::MAX as u64)
        .ok_or_else(|| Error::Format { offset: 8, message: format!("shape {n}x{j} too large") })?;
    let mut values = Vec::with_capacity(count.min(1 << 24) as usize);
    for idx in 0..count {
        let offset = HEADER_LEN + idx * 8;
        read_exact_at(&mut input, &mut b8, offset, "values")?;
        let v = f64::from_le_bytes(b8);
        if !v.is_finite() {
            return Err(Error::Format { offset, message: format!("non-finite value {v}") });
        }
        values.push(v);
    }
    let mut extra = [0u8; 1];
    if input.read(&mut extra)? != 0 {
        return Err(Error::Format { offset: HEADER_LEN + count * 8, message: "trailing bytes".into() });
    }
    let values = Array2::from_shape_vec((n as usize, j as usize), values).expect("count = n * j");
    LossMatrix::new(values, kind)
}

/// One row per datum, one column per posterior sample, no header.
pub fn read_csv<R: Read>(input: R, kind: LossKind) -> Result<LossMatrix> {
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(input);
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|e| Error::Format {
                    offset: record.position().map_or(0, |p| p.byte()),
                    message: format!("line {}: {e}", line + 1),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    LossMatrix::from_rows(&rows, kind)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> LossMatrix {
        LossMatrix::from_rows(&[vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0]], LossKind::ZeroOne).unwrap()
    }

    #[test]
    fn header_layout() {
        let mut buf = Vec::new();
        write_lmat(&mut buf, &sample()).unwrap();
        assert_eq!(&buf[..4], b"LMAT");
        assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 1);
        assert_eq!(u64::from_le_bytes(buf[8..16].try_into().unwrap()), 2);
        assert_eq!(u64::from_le_bytes(buf[16..24].try_into().unwrap()), 3);
        assert_eq!(buf[24], 0);
        assert_eq!(buf.len(), 25 + 6 * 8);
        assert_eq!(f64::from_le_bytes(buf[33..41].try_into().unwrap()), 1.0);
        assert_eq!(read_lmat(&buf[..]).unwrap(), sample());
    }

    #[test]
    fn truncated_file_reports_offset() {
        let mut buf = Vec::new();
        write_lmat(&mut buf, &sample()).unwrap();
        buf.truncate(40);
        match read_lmat(&buf[..]) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, 33),
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn bad_magic_and_kind() {
        let mut buf = Vec::new();
        write_lmat(&mut buf, &sample()).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_lmat(&bad[..]), Err(Error::Format { offset: 0, .. })));
        let mut bad = buf.clone();
        bad[24] = 9;
        assert!(matches!(read_lmat(&bad[..]), Err(Error::Format { offset: 24, .. })));
        let mut bad = buf;
        bad.push(0);
        assert!(matches!(read_lmat(&bad[..]), Err(Error::Format { offset: 73, .. })));
    }

    #[test]
    fn csv_rows() {
        let m = read_csv("0.5, 1.5\n2,3\n".as_bytes(), LossKind::Custom).unwrap();
        assert_eq!(m.n_data(), 2);
        assert_eq!(m.row(1), &[2.0, 3.0]);
        assert!(read_csv("1,2\n3\n".as_bytes(), LossKind::Custom).is_err());
        assert!(read_csv("1,x\n".as_bytes(), LossKind::Custom).is_err());
    }
}
