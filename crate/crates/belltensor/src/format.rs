//! JSON file formats for matrices, tuples, games and joint POVM certificates.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use belltensor_core::compat::{parse_sign_key, sign_key, sign_vector, JointPovm};
use belltensor_core::games::GameMatrix;
use belltensor_core::measurements::MeasurementTuple;
use belltensor_core::{HermitianMatrix, RealMatrix};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `{"dim": d, "re": [[...]], "im": [[...]]}`. A missing `im` means a real
/// matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HermitianJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl From<&HermitianMatrix> for HermitianJson {
    fn from(h: &HermitianMatrix) -> Self {
        HermitianJson {
            dim: h.dim(),
            re: h.re_rows(),
            im: Some(h.im_rows()),
        }
    }
}

impl TryFrom<&HermitianJson> for HermitianMatrix {
    type Error = Error;

    fn try_from(j: &HermitianJson) -> Result<Self> {
        if j.re.len() != j.dim {
            return Err(Error::Format {
                what: "matrix",
                reason: format!("dim is {} but there are {} rows", j.dim, j.re.len()),
            });
        }
        let h = match &j.im {
            Some(im) => HermitianMatrix::from_parts(&j.re, im)?,
            None => HermitianMatrix::from_real(&j.re)?,
        };
        Ok(h)
    }
}

/// `{"rows": N, "cols": N, "entries": [[...]]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RealMatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<f64>>,
}

impl From<&RealMatrix> for RealMatrixJson {
    fn from(m: &RealMatrix) -> Self {
        RealMatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.to_rows(),
        }
    }
}

impl TryFrom<&RealMatrixJson> for RealMatrix {
    type Error = Error;

    fn try_from(j: &RealMatrixJson) -> Result<Self> {
        if j.entries.len() != j.rows || j.entries.iter().any(|r| r.len() != j.cols) {
            return Err(Error::Format {
                what: "real matrix",
                reason: format!("declared {}x{} does not match the entries", j.rows, j.cols),
            });
        }
        Ok(RealMatrix::from_rows(&j.entries)?)
    }
}

/// `{"dim": d, "observables": [<matrix>, ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TupleJson {
    pub dim: usize,
    pub observables: Vec<HermitianJson>,
}

impl From<&MeasurementTuple> for TupleJson {
    fn from(a: &MeasurementTuple) -> Self {
        TupleJson {
            dim: a.dim(),
            observables: a.matrices().map(HermitianJson::from).collect(),
        }
    }
}

impl TryFrom<&TupleJson> for MeasurementTuple {
    type Error = Error;

    fn try_from(j: &TupleJson) -> Result<Self> {
        let matrices = j
            .observables
            .iter()
            .map(HermitianMatrix::try_from)
            .collect::<Result<Vec<_>>>()?;
        if let Some(m) = matrices.iter().find(|m| m.dim() != j.dim) {
            return Err(Error::Format {
                what: "tuple",
                reason: format!("dim is {} but an observable is {}x{}", j.dim, m.dim(), m.dim()),
            });
        }
        Ok(MeasurementTuple::new(matrices)?)
    }
}

/// Joint POVM elements keyed by sign strings such as `"+-+"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub n: usize,
    pub dim: usize,
    pub elements: BTreeMap<String, HermitianJson>,
}

impl From<&JointPovm> for CertificateJson {
    fn from(p: &JointPovm) -> Self {
        CertificateJson {
            n: p.n(),
            dim: p.dim(),
            elements: p.iter().map(|(s, e)| (sign_key(&s), HermitianJson::from(e))).collect(),
        }
    }
}

impl CertificateJson {
    /// Elements in the index order of [`sign_vector`], ready for
    /// [`belltensor_core::compat::joint_povm_from_decomposition`].
    pub fn blocks(&self) -> Result<Vec<HermitianMatrix>> {
        if self.elements.len() != 1 << self.n {
            return Err(Error::Format {
                what: "certificate",
                reason: format!("expected {} elements, found {}", 1usize << self.n, self.elements.len()),
            });
        }
        (0..1usize << self.n)
            .map(|i| {
                let key = sign_key(&sign_vector(self.n, i));
                let e = self.elements.get(&key).ok_or_else(|| Error::Format {
                    what: "certificate",
                    reason: format!("missing element '{key}'"),
                })?;
                HermitianMatrix::try_from(e)
            })
            .collect()
    }

    pub fn validate_keys(&self) -> Result<()> {
        for k in self.elements.keys() {
            match parse_sign_key(k) {
                Some(s) if s.len() == self.n => {}
                _ => {
                    return Err(Error::Format {
                        what: "certificate",
                        reason: format!("bad sign key '{k}'"),
                    })
                }
            }
        }
        Ok(())
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })?;
    fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

pub fn read_tuple(path: &Path) -> Result<MeasurementTuple> {
    MeasurementTuple::try_from(&read_json::<TupleJson>(path)?)
}

pub fn read_game(path: &Path) -> Result<GameMatrix> {
    let m = RealMatrix::try_from(&read_json::<RealMatrixJson>(path)?)?;
    Ok(GameMatrix::new(m)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use belltensor_core::measurements::pauli_tuple;

    #[test]
    fn tuple_roundtrip() {
        let a = pauli_tuple(0.3, -0.5, 0.9);
        let j = TupleJson::from(&a);
        let text = serde_json::to_string(&j).unwrap();
        let back: TupleJson = serde_json::from_str(&text).unwrap();
        assert_eq!(MeasurementTuple::try_from(&back).unwrap(), a);
    }

    #[test]
    fn real_matrix_without_im() {
        let j: HermitianJson = serde_json::from_str(r#"{"dim":2,"re":[[1,0],[0,-1]]}"#).unwrap();
        let h = HermitianMatrix::try_from(&j).unwrap();
        assert_eq!(h, HermitianMatrix::diagonal(&[1.0, -1.0]));
    }

    #[test]
    fn shape_errors() {
        let j: HermitianJson = serde_json::from_str(r#"{"dim":3,"re":[[1,0],[0,-1]]}"#).unwrap();
        assert!(HermitianMatrix::try_from(&j).is_err());
        let g = RealMatrixJson {
            rows: 2,
            cols: 2,
            entries: vec![vec![1.0, 2.0]],
        };
        assert!(RealMatrix::try_from(&g).is_err());
    }
}
