//! Binary model container.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic      8 bytes  "POPSIMDL"
//! version    u32      1
//! flags      u8       bit 0 use_si, bit 1 use_pop, bit 2 item space debiased
//! rank       u64      requested slice rank r
//! fraction   f64      popular fraction p
//! labels     u64 count, then per label u64 byte length + UTF-8 bytes
//! W          u64 rows, u64 cols, rows·cols f64 in column-major order
//! H          same layout
//! cores      u64 count, then each matrix in the same layout
//! ```

use std::io::{Read, Write};

use nalgebra::DMatrix;

use super::{FeatureSpaces, PreferenceModel};
use crate::linalg::DenseBasis;
use crate::{Error, Result};

pub const MAGIC: &[u8; 8] = b"POPSIMDL";
const VERSION: u32 = 1;

fn put_u64<W: Write>(w: &mut W, x: u64) -> Result<()> {
    w.write_all(&x.to_le_bytes())?;
    Ok(())
}

fn put_matrix<W: Write>(w: &mut W, m: &DMatrix<f64>) -> Result<()> {
    put_u64(w, m.nrows() as u64)?;
    put_u64(w, m.ncols() as u64)?;
    for x in m.iter() {
        w.write_all(&x.to_le_bytes())?;
    }
    Ok(())
}

fn take<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)
        .map_err(|e| Error::Format(format!("truncated container: {e}")))?;
    Ok(buf)
}

fn take_u64<R: Read>(r: &mut R) -> Result<u64> {
    Ok(u64::from_le_bytes(take::<8, _>(r)?))
}

fn take_len<R: Read>(r: &mut R, limit: u64) -> Result<usize> {
    let n = take_u64(r)?;
    if n > limit {
        return Err(Error::Format(format!("length {n} exceeds limit {limit}")));
    }
    Ok(n as usize)
}

fn take_matrix<R: Read>(r: &mut R) -> Result<DMatrix<f64>> {
    let rows = take_len(r, 1 << 32)?;
    let cols = take_len(r, 1 << 32)?;
    let len = rows
        .checked_mul(cols)
        .filter(|&n| n <= 1 << 34)
        .ok_or_else(|| Error::Format("matrix too large".into()))?;
    let mut data = Vec::with_capacity(len);
    for _ in 0..len {
        data.push(f64::from_le_bytes(take::<8, _>(r)?));
    }
    Ok(DMatrix::from_vec(rows, cols, data))
}

impl PreferenceModel {
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        let flags = u8::from(self.use_si) | u8::from(self.use_pop) << 1 | u8::from(self.spaces.debiased) << 2;
        w.write_all(&[flags])?;
        put_u64(&mut w, self.spaces.rank as u64)?;
        w.write_all(&self.popular_fraction.to_le_bytes())?;
        put_u64(&mut w, self.labels.len() as u64)?;
        for label in &self.labels {
            put_u64(&mut w, label.len() as u64)?;
            w.write_all(label.as_bytes())?;
        }
        put_matrix(&mut w, self.spaces.user.matrix())?;
        put_matrix(&mut w, self.spaces.item.matrix())?;
        put_u64(&mut w, self.cores.len() as u64)?;
        for core in &self.cores {
            put_matrix(&mut w, core)?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        if &take::<8, _>(&mut r)? != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = u32::from_le_bytes(take::<4, _>(&mut r)?);
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let [flags] = take::<1, _>(&mut r)?;
        if flags & !0b111 != 0 {
            return Err(Error::Format(format!("unknown flag bits {flags:#b}")));
        }
        let rank = take_len(&mut r, 1 << 32)?;
        let popular_fraction = f64::from_le_bytes(take::<8, _>(&mut r)?);
        let n_labels = take_len(&mut r, 1 << 16)?;
        let mut labels = Vec::with_capacity(n_labels);
        for _ in 0..n_labels {
            let len = take_len(&mut r, 1 << 20)?;
            let mut bytes = vec![0u8; len];
            r.read_exact(&mut bytes)
                .map_err(|e| Error::Format(format!("truncated container: {e}")))?;
            labels.push(String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))?);
        }
        let user = take_matrix(&mut r)?;
        let item = take_matrix(&mut r)?;
        let n_cores = take_len(&mut r, 1 << 16)?;
        let mut cores = Vec::with_capacity(n_cores);
        for _ in 0..n_cores {
            let core = take_matrix(&mut r)?;
            if core.nrows() != user.ncols() || core.ncols() != item.ncols() {
                return Err(Error::Format("core shape does not match the bases".into()));
            }
            cores.push(core);
        }
        if cores.len() != labels.len() || cores.is_empty() {
            return Err(Error::Format(format!("{} cores for {} labels", cores.len(), labels.len())));
        }
        let mut trailing = [0u8; 1];
        if r.read(&mut trailing)? != 0 {
            return Err(Error::Format("trailing bytes after container".into()));
        }
        Ok(Self {
            spaces: FeatureSpaces {
                user: DenseBasis::new(user),
                item: DenseBasis::new(item),
                rank,
                debiased: flags & 0b100 != 0,
            },
            cores,
            labels,
            popular_fraction,
            use_si: flags & 1 != 0,
            use_pop: flags & 0b10 != 0,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::InteractionTensor;
    use crate::model::{fit, FitConfig};

    fn model() -> PreferenceModel {
        let coords = [(0, 0, 0), (1, 1, 0), (2, 2, 0), (3, 1, 0), (0, 1, 1), (1, 2, 1), (2, 0, 1), (3, 3, 1)];
        let t = InteractionTensor::from_coords(4, 4, vec!["buy".into(), "view".into()], coords).unwrap();
        fit(&t, &FitConfig { rank: 3, popular_fraction: 0.25, ..Default::default() }).unwrap()
    }

    #[test]
    fn bit_exact_round_trip() {
        let m = model();
        let bytes = m.to_bytes();
        assert_eq!(&bytes[..8], MAGIC);
        let back = PreferenceModel::read_from(bytes.as_slice()).unwrap();
        assert_eq!(back.to_bytes(), bytes);
        assert_eq!(back.cores, m.cores);
        assert_eq!(back.spaces.item.matrix(), m.spaces.item.matrix());
        assert_eq!((back.use_si, back.use_pop, back.rank()), (true, true, 3));
    }

    #[test]
    fn corrupt_containers_rejected() {
        let bytes = model().to_bytes();
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(PreferenceModel::read_from(bad.as_slice()).is_err());
        assert!(PreferenceModel::read_from(&bytes[..bytes.len() - 3]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(PreferenceModel::read_from(extra.as_slice()).is_err());
        let mut version = bytes;
        version[8] = 9;
        assert!(PreferenceModel::read_from(version.as_slice()).is_err());
    }
}
