//! The tangent-space model: dimension, indefinite metric and an optional
//! almost complex structure.
//!
//! Components are taken against the model's default basis. For the default
//! metric this basis is orthonormal with the `index` negative directions
//! first, i.e. `<x,y> = -sum_{i<s} x^i y^i + sum_{j>=s} x^j y^j`.
//!
//! The almost complex structure is stored as the matrix of `J` acting on
//! column vectors: `(Jx)^i = sum_j J[i][j] x^j`, so column `j` is `J e_j`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tolerance::Tolerance;

/// Tangent vector, `m` real components.
pub type Vector = DVector<f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelPoint {
    dim: usize,
    index: usize,
    metric: DMatrix<f64>,
    metric_inv: DMatrix<f64>,
    cplx: Option<DMatrix<f64>>,
}

impl ModelPoint {
    /// Model with the signature metric `diag(-1 x index, +1 x (dim-index))`.
    pub fn new(dim: usize, index: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidModel("dimension must be positive".into()));
        }
        if index > dim {
            return Err(Error::InvalidModel(format!(
                "index {index} exceeds dimension {dim}"
            )));
        }
        let metric = signature_metric(dim, index);
        Ok(Self {
            dim,
            index,
            metric_inv: metric.clone(),
            metric,
            cplx: None,
        })
    }

    /// Model with an explicit symmetric nondegenerate metric of the given index.
    pub fn with_metric(dim: usize, index: usize, metric: DMatrix<f64>) -> Result<Self> {
        if metric.nrows() != dim || metric.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: metric.nrows(),
            });
        }
        if index > dim {
            return Err(Error::InvalidModel(format!(
                "index {index} exceeds dimension {dim}"
            )));
        }
        let scale = Tolerance::scale(metric.amax());
        let asym = (&metric - metric.transpose()).amax() / scale;
        if asym > Tolerance::DEFAULT_REL {
            return Err(Error::InvalidModel(format!(
                "metric is not symmetric (residual {asym:e})"
            )));
        }
        let eig = metric.clone().symmetric_eigen();
        let tiny = Tolerance::DEFAULT_REL * scale;
        if eig.eigenvalues.iter().any(|l| l.abs() <= tiny) {
            return Err(Error::InvalidModel("metric is degenerate".into()));
        }
        let negatives = eig.eigenvalues.iter().filter(|l| **l < 0.0).count();
        if negatives != index {
            return Err(Error::InvalidModel(format!(
                "metric has {negatives} negative directions, declared index {index}"
            )));
        }
        let metric_inv = metric
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidModel("metric is not invertible".into()))?;
        Ok(Self {
            dim,
            index,
            metric,
            metric_inv,
            cplx: None,
        })
    }

    /// Signature model carrying the standard almost complex structure.
    ///
    /// Requires even dimension and even index.
    pub fn hermitian(dim: usize, index: usize) -> Result<Self> {
        if !dim.is_multiple_of(2) || !index.is_multiple_of(2) {
            return Err(Error::InvalidModel(format!(
                "almost Hermitian model needs even dimension and index, got ({index}, {})",
                dim.saturating_sub(index)
            )));
        }
        let model = Self::new(dim, index)?;
        let j = standard_complex_structure(dim);
        model.with_complex_structure(j, Tolerance::default())
    }

    /// Attach an almost complex structure after validating it.
    pub fn with_complex_structure(mut self, j: DMatrix<f64>, tol: Tolerance) -> Result<Self> {
        if !self.dim.is_multiple_of(2) || !self.index.is_multiple_of(2) {
            return Err(Error::InvalidComplexStructure(format!(
                "dimension {} and index {} must both be even",
                self.dim, self.index
            )));
        }
        let report = validate_complex_structure(&self, &j, tol)?;
        if !report.verdict {
            return Err(Error::InvalidComplexStructure(format!(
                "J^2+id residual {:e}, g-compatibility residual {:e}",
                report.square_residual, report.compatibility_residual
            )));
        }
        self.cplx = Some(j);
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of negative directions `s`.
    pub fn index(&self) -> usize {
        self.index
    }

    /// Number of positive directions `m - s`.
    pub fn coindex(&self) -> usize {
        self.dim - self.index
    }

    pub fn metric(&self) -> &DMatrix<f64> {
        &self.metric
    }

    pub fn metric_inv(&self) -> &DMatrix<f64> {
        &self.metric_inv
    }

    pub fn complex_structure(&self) -> Option<&DMatrix<f64>> {
        self.cplx.as_ref()
    }

    pub fn has_complex_structure(&self) -> bool {
        self.cplx.is_some()
    }

    pub fn require_j(&self) -> Result<&DMatrix<f64>> {
        self.cplx.as_ref().ok_or(Error::MissingComplexStructure)
    }

    /// Complex dimension `m/2`, the `n` of the almost Hermitian formulas.
    pub fn complex_dim(&self) -> usize {
        self.dim / 2
    }

    pub fn is_indefinite(&self) -> bool {
        self.index > 0 && self.index < self.dim
    }

    pub fn check_vector(&self, x: &Vector) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }

    /// `<x,y> = x^T g y`.
    pub fn inner(&self, x: &Vector, y: &Vector) -> Result<f64> {
        self.check_vector(x)?;
        self.check_vector(y)?;
        Ok(self.g(x, y))
    }

    /// Unchecked inner product for internal hot loops.
    pub(crate) fn g(&self, x: &Vector, y: &Vector) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            let mut row = 0.0;
            for j in 0..self.dim {
                row += self.metric[(i, j)] * y[j];
            }
            acc += x[i] * row;
        }
        acc
    }

    pub fn apply_j(&self, x: &Vector) -> Result<Vector> {
        self.check_vector(x)?;
        Ok(self.require_j()? * x)
    }

    /// Matrix of the fundamental form `Omega(x,y) = g(x,Jy)`.
    pub fn kaehler_form(&self) -> Result<DMatrix<f64>> {
        Ok(&self.metric * self.require_j()?)
    }
}

pub(crate) fn signature_metric(dim: usize, index: usize) -> DMatrix<f64> {
    DMatrix::from_fn(dim, dim, |i, j| match (i == j, i < index) {
        (true, true) => -1.0,
        (true, false) => 1.0,
        _ => 0.0,
    })
}

/// Standard structure pairing coordinates `(2k, 2k+1)`:
/// `J e_{2k} = e_{2k+1}`, `J e_{2k+1} = -e_{2k}`.
///
/// With even index every pair stays inside one sign block, so `J` is a
/// `g`-isometry of the signature metric.
pub fn standard_complex_structure(dim: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(dim, dim);
    for k in (0..dim.saturating_sub(1)).step_by(2) {
        j[(k + 1, k)] = 1.0;
        j[(k, k + 1)] = -1.0;
    }
    j
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexStructureReport {
    /// max |J^2 + id|
    pub square_residual: f64,
    /// max |J^T g J - g|, relative to the metric scale
    pub compatibility_residual: f64,
    pub verdict: bool,
}

/// Check `J^2 = -id` and `g(Jx,Jy) = g(x,y)` on basis pairs.
pub fn validate_complex_structure(
    model: &ModelPoint,
    j: &DMatrix<f64>,
    tol: Tolerance,
) -> Result<ComplexStructureReport> {
    let m = model.dim();
    if j.nrows() != m || j.ncols() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: j.nrows(),
        });
    }
    let id = DMatrix::<f64>::identity(m, m);
    let square_residual = (j * j + &id).amax() / Tolerance::scale(j.amax().powi(2));
    let g = model.metric();
    let compatibility_residual =
        (j.transpose() * g * j - g).amax() / Tolerance::scale(g.amax() * j.amax().powi(2));
    Ok(ComplexStructureReport {
        square_residual,
        compatibility_residual,
        verdict: tol.accepts(square_residual) && tol.accepts(compatibility_residual),
    })
}
