//! JSON file formats: matrices as nested arrays of [re, im] pairs, tuples
//! as named matrix maps, symbol families likewise. Floats round-trip
//! losslessly (shortest representation that parses back to the same bits).

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fundamental::{CommutingTuple5, CommutingTuple7};
use crate::kernel::ComplexMatrix;

/// A dense complex matrix on disk.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    /// Row-major entries as [re, im] pairs.
    pub data: Vec<Vec<[f64; 2]>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: (0..m.rows())
                .map(|r| (0..m.cols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
                .collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.data.len() != self.rows || self.data.iter().any(|row| row.len() != self.cols) {
            return Err(Error::ShapeMismatch {
                expected: format!("{}x{}", self.rows, self.cols),
                found: "ragged or mis-sized data array".into(),
            });
        }
        let pairs: Vec<[f64; 2]> = self.data.iter().flatten().copied().collect();
        ComplexMatrix::from_pairs(self.rows, self.cols, &pairs)
    }
}

/// A commuting tuple on disk: "gamma7" carries T1..T7, "gamma5" carries
/// S1, S2, S3, St1, St2.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TupleFile {
    pub variant: String,
    pub matrices: BTreeMap<String, MatrixFile>,
}

/// Either tuple family, decoded.
#[derive(Debug, Clone)]
pub enum AnyTuple {
    Seven(CommutingTuple7),
    Five(CommutingTuple5),
}

impl TupleFile {
    pub fn from_tuple7(t: &CommutingTuple7) -> Self {
        let mut matrices = BTreeMap::new();
        for (i, m) in t.t.iter().enumerate() {
            matrices.insert(format!("T{}", i + 1), MatrixFile::from_matrix(m));
        }
        Self {
            variant: "gamma7".into(),
            matrices,
        }
    }

    pub fn from_tuple5(s: &CommutingTuple5) -> Self {
        let mut matrices = BTreeMap::new();
        for (i, m) in s.s.iter().enumerate() {
            matrices.insert(format!("S{}", i + 1), MatrixFile::from_matrix(m));
        }
        for (i, m) in s.stilde.iter().enumerate() {
            matrices.insert(format!("St{}", i + 1), MatrixFile::from_matrix(m));
        }
        Self {
            variant: "gamma5".into(),
            matrices,
        }
    }

    pub fn decode(&self) -> Result<AnyTuple> {
        match self.variant.as_str() {
            "gamma7" => {
                let mats: Result<Vec<ComplexMatrix>> = (1..=7)
                    .map(|i| self.named(&format!("T{i}"))?.to_matrix())
                    .collect();
                Ok(AnyTuple::Seven(CommutingTuple7::new(mats?)?))
            }
            "gamma5" => {
                let s: Result<Vec<ComplexMatrix>> = (1..=3)
                    .map(|i| self.named(&format!("S{i}"))?.to_matrix())
                    .collect();
                let st: Result<Vec<ComplexMatrix>> = (1..=2)
                    .map(|i| self.named(&format!("St{i}"))?.to_matrix())
                    .collect();
                Ok(AnyTuple::Five(CommutingTuple5::new(s?, st?)?))
            }
            other => Err(Error::InvalidArgument(format!(
                "unknown tuple variant {other:?} (expected \"gamma7\" or \"gamma5\")"
            ))),
        }
    }

    fn named(&self, key: &str) -> Result<&MatrixFile> {
        self.matrices
            .get(key)
            .ok_or_else(|| Error::InvalidArgument(format!("tuple file is missing matrix {key:?}")))
    }
}

/// A symbol family on disk: "f7" carries F1..F6, "g5" carries G1, G2, Gt1,
/// Gt2.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymbolsFile {
    pub variant: String,
    pub matrices: BTreeMap<String, MatrixFile>,
}

impl SymbolsFile {
    pub fn from_family7(f: &[ComplexMatrix]) -> Self {
        let mut matrices = BTreeMap::new();
        for (i, m) in f.iter().enumerate() {
            matrices.insert(format!("F{}", i + 1), MatrixFile::from_matrix(m));
        }
        Self {
            variant: "f7".into(),
            matrices,
        }
    }

    pub fn from_family5(
        g1: &ComplexMatrix,
        g2: &ComplexMatrix,
        gt1: &ComplexMatrix,
        gt2: &ComplexMatrix,
    ) -> Self {
        let mut matrices = BTreeMap::new();
        matrices.insert("G1".into(), MatrixFile::from_matrix(g1));
        matrices.insert("G2".into(), MatrixFile::from_matrix(g2));
        matrices.insert("Gt1".into(), MatrixFile::from_matrix(gt1));
        matrices.insert("Gt2".into(), MatrixFile::from_matrix(gt2));
        Self {
            variant: "g5".into(),
            matrices,
        }
    }

    pub fn family7(&self) -> Result<Vec<ComplexMatrix>> {
        if self.variant != "f7" {
            return Err(Error::InvalidArgument(format!(
                "expected an f7 symbols file, found {:?}",
                self.variant
            )));
        }
        (1..=6)
            .map(|i| {
                self.matrices
                    .get(&format!("F{i}"))
                    .ok_or_else(|| Error::InvalidArgument(format!("missing F{i}")))?
                    .to_matrix()
            })
            .collect()
    }

    #[allow(clippy::type_complexity)]
    pub fn family5(
        &self,
    ) -> Result<(ComplexMatrix, ComplexMatrix, ComplexMatrix, ComplexMatrix)> {
        if self.variant != "g5" {
            return Err(Error::InvalidArgument(format!(
                "expected a g5 symbols file, found {:?}",
                self.variant
            )));
        }
        let get = |k: &str| -> Result<ComplexMatrix> {
            self.matrices
                .get(k)
                .ok_or_else(|| Error::InvalidArgument(format!("missing {k}")))?
                .to_matrix()
        };
        Ok((get("G1")?, get("G2")?, get("Gt1")?, get("Gt2")?))
    }
}

/// Parse a tuple file from a JSON string.
pub fn parse_tuple_json(text: &str) -> Result<TupleFile> {
    serde_json::from_str(text)
        .map_err(|e| Error::InvalidArgument(format!("tuple JSON parse failure: {e}")))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> std::io::Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| {
        std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!("{}: {e}", path.display()),
        )
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    std::fs::write(path, text + "\n")
}
