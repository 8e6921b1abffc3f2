//! `EFLD` field files.
//!
//! Layout, all little-endian: magic `b"EFLD"`, version `u32`, dimension `u32`,
//! points per axis `u32`, box length `f64`, rank code `u32`, component count
//! `u32`, then `f64` values component by component, each in lattice order.
//! A JSON sidecar at `<path>.json` carries the same header plus free-form
//! provenance.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor_grid::{
    FourTensorField, Grid, OneFormField, R13Field, RankTag, ScalarField, SymTensorField, TensorField,
};

pub const MAGIC: &[u8; 4] = b"EFLD";
pub const VERSION: u32 = 1;

/// Sidecar contents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub format: String,
    pub version: u32,
    pub dim: usize,
    pub points: usize,
    pub length: f64,
    pub rank_code: u32,
    pub components: usize,
    pub provenance: serde_json::Value,
}

/// A field read back from disk, before its rank is checked.
#[derive(Clone, Debug, PartialEq)]
pub struct EfldField {
    pub grid: Grid,
    pub rank: RankTag,
    pub components: Vec<Vec<f64>>,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

pub fn encode<F: TensorField>(field: &F) -> Vec<u8> {
    let grid = field.grid();
    let comps = field.components();
    let mut out = Vec::with_capacity(32 + 8 * comps.len() * grid.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
    out.extend_from_slice(&(grid.points() as u32).to_le_bytes());
    out.extend_from_slice(&grid.length().to_le_bytes());
    out.extend_from_slice(&F::RANK.code().to_le_bytes());
    out.extend_from_slice(&(comps.len() as u32).to_le_bytes());
    for comp in comps {
        for v in comp {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

fn take<'a>(bytes: &mut &'a [u8], n: usize) -> Result<&'a [u8]> {
    if bytes.len() < n {
        return Err(Error::Format("truncated EFLD data".into()));
    }
    let (head, rest) = bytes.split_at(n);
    *bytes = rest;
    Ok(head)
}

fn take_u32(bytes: &mut &[u8]) -> Result<u32> {
    Ok(u32::from_le_bytes(take(bytes, 4)?.try_into().expect("4 bytes")))
}

fn take_f64(bytes: &mut &[u8]) -> Result<f64> {
    Ok(f64::from_le_bytes(take(bytes, 8)?.try_into().expect("8 bytes")))
}

pub fn decode(mut bytes: &[u8]) -> Result<EfldField> {
    let data = &mut bytes;
    if take(data, 4)? != MAGIC {
        return Err(Error::Format("missing EFLD magic".into()));
    }
    let version = take_u32(data)?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported EFLD version {version}")));
    }
    let dim = take_u32(data)? as usize;
    let points = take_u32(data)? as usize;
    let length = take_f64(data)?;
    let grid = Grid::new(dim, points, length)?;
    let rank = RankTag::from_code(take_u32(data)?)?;
    let count = take_u32(data)? as usize;
    if count != rank.component_count(dim) {
        return Err(Error::Format(format!(
            "{rank:?} in dimension {dim} has {} components, header says {count}",
            rank.component_count(dim)
        )));
    }
    let mut components = Vec::with_capacity(count);
    for _ in 0..count {
        let raw = take(data, 8 * grid.len())?;
        components.push(
            raw.chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
                .collect(),
        );
    }
    if !data.is_empty() {
        return Err(Error::Format(format!("{} trailing bytes", data.len())));
    }
    Ok(EfldField { grid, rank, components })
}

/// Writes `field` to `path` and its sidecar to `<path>.json`.
pub fn write<F: TensorField>(path: &Path, field: &F, provenance: serde_json::Value) -> Result<()> {
    let grid = field.grid();
    let mut file = fs::File::create(path)?;
    file.write_all(&encode(field))?;
    let sidecar = Sidecar {
        format: "EFLD".into(),
        version: VERSION,
        dim: grid.dim(),
        points: grid.points(),
        length: grid.length(),
        rank_code: F::RANK.code(),
        components: field.components().len(),
        provenance,
    };
    fs::write(sidecar_path(path), serde_json::to_string_pretty(&sidecar)? + "\n")?;
    Ok(())
}

pub fn read(path: &Path) -> Result<EfldField> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode(&bytes)
}

pub fn read_sidecar(path: &Path) -> Result<Sidecar> {
    Ok(serde_json::from_str(&fs::read_to_string(sidecar_path(path))?)?)
}

macro_rules! into_typed {
    ($method:ident, $ty:ty, $rank:expr) => {
        pub fn $method(self) -> Result<$ty> {
            if self.rank != $rank {
                return Err(Error::Format(format!(
                    "expected a {:?} field, file holds {:?}",
                    $rank, self.rank
                )));
            }
            <$ty>::from_components(&self.grid, self.components)
        }
    };
}

impl EfldField {
    into_typed!(into_scalar, ScalarField, RankTag::Scalar);
    into_typed!(into_one_form, OneFormField, RankTag::OneForm);
    into_typed!(into_sym, SymTensorField, RankTag::SymTensor);
    into_typed!(into_four, FourTensorField, RankTag::FourTensor);
    into_typed!(into_r13, R13Field, RankTag::R13);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let grid = Grid::new(2, 8, 3.0).unwrap();
        let h = SymTensorField::from_fn(&grid, |p, i, j| (p as f64).sin() * 1e-3 + (i * j) as f64 / 7.0);
        let back = decode(&encode(&h)).unwrap().into_sym().unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn rejects_wrong_rank_and_bad_magic() {
        let grid = Grid::new(2, 8, 3.0).unwrap();
        let bytes = encode(&ScalarField::constant(&grid, 1.0));
        assert!(decode(&bytes).unwrap().into_sym().is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(decode(&bad).is_err());
        assert!(decode(&bytes[..bytes.len() - 3]).is_err());
    }

    #[test]
    fn header_layout() {
        let grid = Grid::new(3, 8, 2.5).unwrap();
        let bytes = encode(&OneFormField::zeros(&grid));
        assert_eq!(&bytes[..4], b"EFLD");
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 3);
        assert_eq!(f64::from_le_bytes(bytes[16..24].try_into().unwrap()), 2.5);
        assert_eq!(bytes.len(), 32 + 8 * 3 * 512);
    }
}
