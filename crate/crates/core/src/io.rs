//! JSON file formats.
//!
//! * state: `{"n_modes": N, "V": [[..2N..], ..], "disp": [..2N..]}` with `V`
//!   row-major in `qqpp` order and `disp` optional (zero when absent);
//! * graph: `{"G": [[..N..], ..], "r": r}`;
//! * pattern: `{"pattern": [n_1, ..], "modes": [i_1, ..]}` with 1-based modes.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{GaussianPureState, GraphSpec};
use crate::gbs::PhotonPattern;
use crate::linalg::{RMatrix, RVector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub n_modes: usize,
    #[serde(rename = "V")]
    pub v: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub disp: Option<Vec<f64>>,
}

impl StateFile {
    pub fn from_state(state: &GaussianPureState) -> Self {
        let v = state.covariance();
        Self {
            n_modes: state.n_modes(),
            v: (0..v.nrows()).map(|i| v.row(i).iter().cloned().collect()).collect(),
            disp: Some(state.displacement().iter().cloned().collect()),
        }
    }

    pub fn into_state(self) -> Result<GaussianPureState> {
        let dim = 2 * self.n_modes;
        if self.v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: self.v.len(),
            });
        }
        if let Some(row) = self.v.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: row.len(),
            });
        }
        let v = RMatrix::from_fn(dim, dim, |i, j| self.v[i][j]);
        let disp = match self.disp {
            Some(d) => RVector::from_vec(d),
            None => RVector::zeros(dim),
        };
        GaussianPureState::new(v, disp)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternFile {
    pub pattern: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<usize>>,
}

impl PatternFile {
    /// Converts to 0-based mode indices; absent `modes` means `1..=len`.
    pub fn into_pattern(self) -> Result<PhotonPattern> {
        match self.modes {
            None => Ok(PhotonPattern::full(self.pattern)),
            Some(modes) => {
                if modes.contains(&0) {
                    return Err(Error::InvalidPattern("modes are numbered from 1".into()));
                }
                PhotonPattern::new(self.pattern, modes.iter().map(|m| m - 1).collect())
            }
        }
    }

    pub fn from_pattern(p: &PhotonPattern) -> Self {
        Self {
            pattern: p.counts.clone(),
            modes: Some(p.modes.iter().map(|m| m + 1).collect()),
        }
    }
}

pub fn parse_state(json: &str) -> Result<GaussianPureState> {
    serde_json::from_str::<StateFile>(json)?.into_state()
}

pub fn parse_graph(json: &str) -> Result<GraphSpec> {
    let g: GraphSpec = serde_json::from_str(json)?;
    GraphSpec::new(g.g, g.r)
}

pub fn parse_pattern(json: &str) -> Result<PhotonPattern> {
    serde_json::from_str::<PatternFile>(json)?.into_pattern()
}

pub fn read_state(path: impl AsRef<Path>) -> Result<GaussianPureState> {
    parse_state(&std::fs::read_to_string(path)?)
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<GraphSpec> {
    parse_graph(&std::fs::read_to_string(path)?)
}

pub fn read_pattern(path: impl AsRef<Path>) -> Result<PhotonPattern> {
    parse_pattern(&std::fs::read_to_string(path)?)
}
