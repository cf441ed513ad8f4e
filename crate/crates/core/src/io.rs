//! JSON interchange formats.
//!
//! Matrices are `{"dim": n, "re": [[..]], "im": [[..]]}` with row-major nested arrays.
//! Channels are `{"dim_in", "dim_out", "superoperator": {"re", "im"}}` where the
//! superoperator acts on column-stacked operators. Groups are arrays of matrices.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::linalg::{CMatrix, CVector, C64};
use crate::qcore::{DensityMatrix, HermitianObservable, PureState, QuantumChannel};
use crate::twirl::FiniteUnitaryGroup;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// A rectangular complex matrix without the `dim` field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorJson {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub dim_in: usize,
    pub dim_out: usize,
    pub superoperator: BlockJson,
}

fn rows_of(m: &CMatrix, part: impl Fn(&C64) -> f64) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| part(&m[(i, j)])).collect())
        .collect()
}

fn block_to_matrix(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<CMatrix> {
    let rows = re.len();
    let cols = re.first().map_or(0, Vec::len);
    if im.len() != rows {
        return Err(Error::Parse(format!("re has {rows} rows but im has {}", im.len())));
    }
    for (r, i) in re.iter().zip(im) {
        if r.len() != cols || i.len() != cols {
            return Err(Error::Parse("ragged matrix rows".into()));
        }
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| C64::new(re[i][j], im[i][j])))
}

impl From<&CMatrix> for BlockJson {
    fn from(m: &CMatrix) -> Self {
        BlockJson {
            re: rows_of(m, |z| z.re),
            im: rows_of(m, |z| z.im),
        }
    }
}

impl BlockJson {
    pub fn to_matrix(&self) -> Result<CMatrix> {
        block_to_matrix(&self.re, &self.im)
    }
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        MatrixJson {
            dim: m.nrows(),
            re: rows_of(m, |z| z.re),
            im: rows_of(m, |z| z.im),
        }
    }
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<CMatrix> {
        let m = block_to_matrix(&self.re, &self.im)?;
        if m.shape() != (self.dim, self.dim) {
            return Err(Error::Parse(format!(
                "declared dim {} but arrays are {}x{}",
                self.dim,
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(m)
    }
}

impl From<&CVector> for VectorJson {
    fn from(v: &CVector) -> Self {
        VectorJson {
            dim: v.len(),
            re: v.iter().map(|z| z.re).collect(),
            im: v.iter().map(|z| z.im).collect(),
        }
    }
}

impl VectorJson {
    pub fn to_vector(&self) -> Result<CVector> {
        if self.re.len() != self.dim || self.im.len() != self.dim {
            return Err(Error::Parse(format!("declared dim {} disagrees with arrays", self.dim)));
        }
        Ok(CVector::from_iterator(
            self.dim,
            self.re.iter().zip(&self.im).map(|(&a, &b)| C64::new(a, b)),
        ))
    }
}

impl From<&QuantumChannel> for ChannelJson {
    fn from(ch: &QuantumChannel) -> Self {
        ChannelJson {
            dim_in: ch.dim_in(),
            dim_out: ch.dim_out(),
            superoperator: ch.superoperator().into(),
        }
    }
}

impl ChannelJson {
    pub fn to_channel(&self) -> Result<QuantumChannel> {
        let s = self.superoperator.to_matrix()?;
        if s.shape() != (self.dim_out * self.dim_out, self.dim_in * self.dim_in) {
            return Err(Error::Parse(format!(
                "superoperator is {}x{}, expected {}x{}",
                s.nrows(),
                s.ncols(),
                self.dim_out * self.dim_out,
                self.dim_in * self.dim_in
            )));
        }
        QuantumChannel::from_superoperator(self.dim_in, self.dim_out, s)
    }
}

fn read(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn matrix_from_json(text: &str) -> Result<CMatrix> {
    parse::<MatrixJson>(text)?.to_matrix()
}

pub fn matrix_to_json(m: &CMatrix) -> Result<String> {
    Ok(serde_json::to_string_pretty(&MatrixJson::from(m))?)
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<CMatrix> {
    matrix_from_json(&read(path.as_ref())?)
}

/// Loads and validates a density matrix.
pub fn load_state(path: impl AsRef<Path>) -> Result<DensityMatrix> {
    DensityMatrix::new(load_matrix(path)?)
}

pub fn save_state(path: impl AsRef<Path>, rho: &DensityMatrix) -> Result<()> {
    Ok(fs::write(path, matrix_to_json(rho.matrix())?)?)
}

pub fn load_observable(path: impl AsRef<Path>) -> Result<HermitianObservable> {
    HermitianObservable::new(load_matrix(path)?)
}

pub fn load_pure_state(path: impl AsRef<Path>) -> Result<PureState> {
    PureState::new(parse::<VectorJson>(&read(path.as_ref())?)?.to_vector()?)
}

pub fn channel_from_json(text: &str) -> Result<QuantumChannel> {
    parse::<ChannelJson>(text)?.to_channel()
}

pub fn channel_to_json(ch: &QuantumChannel) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ChannelJson::from(ch))?)
}

pub fn load_channel(path: impl AsRef<Path>) -> Result<QuantumChannel> {
    channel_from_json(&read(path.as_ref())?)
}

pub fn save_channel(path: impl AsRef<Path>, ch: &QuantumChannel) -> Result<()> {
    Ok(fs::write(path, channel_to_json(ch)?)?)
}

pub fn group_from_json(text: &str) -> Result<FiniteUnitaryGroup> {
    let elements = parse::<Vec<MatrixJson>>(text)?
        .iter()
        .map(MatrixJson::to_matrix)
        .collect::<Result<Vec<_>>>()?;
    FiniteUnitaryGroup::new(elements)
}

pub fn group_to_json(g: &FiniteUnitaryGroup) -> Result<String> {
    let list: Vec<MatrixJson> = g.elements().iter().map(MatrixJson::from).collect();
    Ok(serde_json::to_string_pretty(&list)?)
}

pub fn load_group(path: impl AsRef<Path>) -> Result<FiniteUnitaryGroup> {
    group_from_json(&read(path.as_ref())?)
}

pub fn save_group(path: impl AsRef<Path>, g: &FiniteUnitaryGroup) -> Result<()> {
    Ok(fs::write(path, group_to_json(g)?)?)
}
