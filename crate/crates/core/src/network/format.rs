//! Binary model container.
//!
//! ```text
//! "DMP1"                      4 bytes
//! depth                       u32 LE
//! signal_dim                  u32 LE
//! num_atoms                   u32 LE
//! projection                  u8 (0 identity, 1 positive orthant)
//! depth selection matrices    row-major f64 LE
//! dictionary                  row-major f64 LE
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;

use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::solvers::ProjectionMode;

use super::UnfoldedModel;

pub const MODEL_MAGIC: &[u8; 4] = b"DMP1";

impl UnfoldedModel {
    pub fn write_to<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        w.write_all(MODEL_MAGIC)?;
        for v in [self.depth(), self.signal_dim(), self.num_atoms()] {
            let v = u32::try_from(v).map_err(|_| std::io::Error::other("dimension exceeds u32"))?;
            w.write_all(&v.to_le_bytes())?;
        }
        let flag: u8 = match self.projection() {
            ProjectionMode::Identity => 0,
            ProjectionMode::PositiveOrthant => 1,
        };
        w.write_all(&[flag])?;
        for m in self.selection_weights().iter().chain(std::iter::once(self.update_dict().matrix())) {
            write_row_major(m, w)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let mut magic = [0u8; 4];
        read_exact(r, &mut magic)?;
        if &magic != MODEL_MAGIC {
            return Err(Error::InvalidModel(format!("bad magic {magic:?}")));
        }
        let depth = read_u32(r)? as usize;
        let signal_dim = read_u32(r)? as usize;
        let num_atoms = read_u32(r)? as usize;
        let mut flag = [0u8; 1];
        read_exact(r, &mut flag)?;
        let proj = match flag[0] {
            0 => ProjectionMode::Identity,
            1 => ProjectionMode::PositiveOrthant,
            other => return Err(Error::InvalidModel(format!("unknown projection flag {other}"))),
        };
        if depth == 0 || signal_dim == 0 || num_atoms == 0 {
            return Err(Error::InvalidModel("zero dimension in header".into()));
        }
        let weights = (0..depth)
            .map(|_| read_row_major(r, signal_dim, num_atoms))
            .collect::<Result<Vec<_>>>()?;
        let dict = Dictionary::new(read_row_major(r, signal_dim, num_atoms)?)?;
        let mut rest = [0u8; 1];
        if r.read(&mut rest).map_err(|e| Error::InvalidModel(e.to_string()))? != 0 {
            return Err(Error::InvalidModel("trailing bytes".into()));
        }
        UnfoldedModel::from_parts(weights, dict, proj)
    }
}

pub fn write_model(model: &UnfoldedModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    model.write_to(&mut w).and_then(|_| w.flush()).map_err(|e| Error::io(path, e))
}

pub fn read_model(path: impl AsRef<Path>) -> Result<UnfoldedModel> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    UnfoldedModel::read_from(&mut BufReader::new(file))
}

fn write_row_major<W: Write>(m: &DMatrix<f64>, w: &mut W) -> std::io::Result<()> {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            w.write_all(&m[(i, j)].to_le_bytes())?;
        }
    }
    Ok(())
}

fn read_row_major<R: Read>(r: &mut R, rows: usize, cols: usize) -> Result<DMatrix<f64>> {
    let mut buf = vec![0u8; rows * cols * 8];
    read_exact(r, &mut buf)?;
    let mut values = buf.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap()));
    Ok(DMatrix::from_row_iterator(rows, cols, &mut values))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    read_exact(r, &mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf).map_err(|e| Error::InvalidModel(format!("truncated file: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::generate_synthetic_dictionary;

    #[test]
    fn header_layout() {
        let d = generate_synthetic_dictionary(3, 5, 1).unwrap();
        let m = UnfoldedModel::from_dictionary(&d, 2, ProjectionMode::PositiveOrthant).unwrap();
        let mut buf = Vec::new();
        m.write_to(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"DMP1");
        assert_eq!(&buf[4..8], &2u32.to_le_bytes());
        assert_eq!(&buf[8..12], &3u32.to_le_bytes());
        assert_eq!(&buf[12..16], &5u32.to_le_bytes());
        assert_eq!(buf[16], 1);
        assert_eq!(buf.len(), 17 + 3 * 3 * 5 * 8);
        // first stored value is W⁽⁰⁾[0, 0], the second W⁽⁰⁾[0, 1]
        assert_eq!(&buf[17..25], &d.matrix()[(0, 0)].to_le_bytes());
        assert_eq!(&buf[25..33], &d.matrix()[(0, 1)].to_le_bytes());
    }

    #[test]
    fn rejects_corrupt_files() {
        let d = generate_synthetic_dictionary(3, 5, 1).unwrap();
        let m = UnfoldedModel::from_dictionary(&d, 1, ProjectionMode::Identity).unwrap();
        let mut buf = Vec::new();
        m.write_to(&mut buf).unwrap();

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(UnfoldedModel::read_from(&mut bad.as_slice()), Err(Error::InvalidModel(_))));
        let truncated = &buf[..buf.len() - 1];
        assert!(matches!(UnfoldedModel::read_from(&mut &truncated[..]), Err(Error::InvalidModel(_))));
        let mut long = buf.clone();
        long.push(0);
        assert!(matches!(UnfoldedModel::read_from(&mut long.as_slice()), Err(Error::InvalidModel(_))));
        let back = UnfoldedModel::read_from(&mut buf.as_slice()).unwrap();
        assert_eq!(back, m);
    }
}
