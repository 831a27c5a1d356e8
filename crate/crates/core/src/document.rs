//! JSON document holding a model point and named rank-4 tensors.
//!
//! ```json
//! { "dim": 4, "index": 2, "metric": [[...]], "J": [[...]],
//!   "tensors": { "R": [ ... dim^4 numbers, row-major over (i,j,k,l) ... ] },
//!   "meta": { "generator": "const-curv" } }
//! ```
//!
//! `metric` and `J` are optional. Floats are written in shortest round-trip
//! form, so reading a written document reproduces every component exactly.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{signature_metric, ModelPoint};
use crate::tensor::QuadTensor;
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorDocument {
    pub dim: usize,
    pub index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<f64>>>,
    #[serde(rename = "J", default, skip_serializing_if = "Option::is_none")]
    pub j: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub tensors: BTreeMap<String, Vec<f64>>,
    #[serde(default)]
    pub meta: BTreeMap<String, String>,
}

fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn from_rows(name: &str, dim: usize, rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::Document(format!(
            "{name} must be a {dim}x{dim} table"
        )));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| rows[i][j]))
}

impl TensorDocument {
    /// Empty document describing `model`; the metric is stored only when it
    /// differs from the signature diagonal.
    pub fn new(model: &ModelPoint) -> Self {
        let default = signature_metric(model.dim(), model.index());
        Self {
            dim: model.dim(),
            index: model.index(),
            metric: (model.metric() != &default).then(|| to_rows(model.metric())),
            j: model.complex_structure().map(to_rows),
            tensors: BTreeMap::new(),
            meta: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, name: &str, t: &QuadTensor) -> Result<()> {
        if t.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: t.dim(),
            });
        }
        self.tensors
            .insert(name.to_string(), t.components().to_vec());
        Ok(())
    }

    pub fn tensor(&self, name: &str) -> Result<QuadTensor> {
        let comps = self
            .tensors
            .get(name)
            .ok_or_else(|| Error::Document(format!("no tensor named '{name}'")))?;
        QuadTensor::from_components(self.dim, comps.clone())
    }

    /// The single stored tensor, or the one called `name` when given.
    pub fn pick(&self, name: Option<&str>) -> Result<(String, QuadTensor)> {
        match name {
            Some(n) => Ok((n.to_string(), self.tensor(n)?)),
            None => match self.tensors.len() {
                1 => {
                    let n = self.tensors.keys().next().expect("one entry").clone();
                    let t = self.tensor(&n)?;
                    Ok((n, t))
                }
                0 => Err(Error::Document("document holds no tensors".into())),
                _ => Err(Error::Document(
                    "document holds several tensors; name one".into(),
                )),
            },
        }
    }

    pub fn model(&self) -> Result<ModelPoint> {
        let base = match &self.metric {
            Some(rows) => {
                ModelPoint::with_metric(self.dim, self.index, from_rows("metric", self.dim, rows)?)?
            }
            None => ModelPoint::new(self.dim, self.index)?,
        };
        match &self.j {
            Some(rows) => {
                base.with_complex_structure(from_rows("J", self.dim, rows)?, Tolerance::default())
            }
            None => Ok(base),
        }
    }

    /// Structural checks: shapes, finiteness and a valid model.
    pub fn validate(&self) -> Result<()> {
        if self.index > self.dim {
            return Err(Error::Document(format!(
                "index {} exceeds dimension {}",
                self.index, self.dim
            )));
        }
        let len = self.dim.pow(4);
        for (name, comps) in &self.tensors {
            if comps.len() != len {
                return Err(Error::Document(format!(
                    "tensor '{name}' has {} components, expected {len}",
                    comps.len()
                )));
            }
            if comps.iter().any(|c| !c.is_finite()) {
                return Err(Error::Document(format!(
                    "tensor '{name}' has non-finite components"
                )));
            }
        }
        self.model()?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(text)?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn to_json(&self) -> Result<String> {
        self.validate()?;
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let text = self.to_json()?;
        fs::write(path, text)?;
        Ok(())
    }
}
