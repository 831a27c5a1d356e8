use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::frames::sectional_unchecked;
use crate::model::{ModelPoint, Vector};
use crate::sampling::PlaneKind;
use crate::tensor::{Bilinear, QuadTensor};
use crate::tolerance::Tolerance;

/// Sample that attained the maximal residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub sample_index: u64,
    pub vectors: Vec<Vec<f64>>,
}

impl Witness {
    pub fn to_vectors(&self) -> Vec<Vector> {
        self.vectors
            .iter()
            .map(|v| Vector::from_column_slice(v))
            .collect()
    }
}

/// Residual evaluated on one sample; every report carries its probe so a
/// witness can be re-evaluated without re-sampling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "probe", rename_all = "snake_case")]
pub enum Probe {
    /// `|T(v[a], v[b], v[c], v[d])|` over the product of the Euclidean norms.
    Slots { slots: [usize; 4] },
    /// `|K(x,y) + K(a,b) - K(x,a) - K(y,b)|` on a frame `(x, y, a, b)`.
    Balance,
    /// `|rho(x+a, x+a)|` over `|x+a|^2` on a pair `(x, a)`, relative to `rho`.
    IsotropicRicci,
    /// `|K(v[0], v[1]) - reference|`.
    SpreadFrom { reference: f64 },
}

pub(crate) struct ProbeContext<'a> {
    pub model: &'a ModelPoint,
    pub tensor: &'a QuadTensor,
    pub scale: f64,
    pub rho: Option<Bilinear>,
}

impl<'a> ProbeContext<'a> {
    pub fn new(model: &'a ModelPoint, tensor: &'a QuadTensor) -> Self {
        Self {
            model,
            tensor,
            scale: tensor.scale(),
            rho: None,
        }
    }

    pub fn with_ricci(mut self) -> Result<Self> {
        self.rho = Some(crate::contract::ricci(self.model, self.tensor)?);
        Ok(self)
    }
}

impl Probe {
    pub(crate) fn evaluate(&self, ctx: &ProbeContext<'_>, v: &[Vector]) -> f64 {
        let t = ctx.tensor;
        let raw = match *self {
            Probe::Slots {
                slots: [a, b, c, d],
            } => {
                let norms = v[a].norm() * v[b].norm() * v[c].norm() * v[d].norm();
                t.eval(&v[a], &v[b], &v[c], &v[d]).abs() / (ctx.scale * norms)
            }
            Probe::Balance => {
                let k = |p: usize, q: usize| sectional_unchecked(ctx.model, t, &v[p], &v[q]);
                (k(0, 1) + k(2, 3) - k(0, 2) - k(1, 3)).abs() / ctx.scale
            }
            Probe::IsotropicRicci => {
                let rho = ctx.rho.as_ref().expect("ricci context");
                let xi = &v[0] + &v[1];
                rho.eval(&xi, &xi).abs() / (Tolerance::scale(rho.max_abs()) * xi.norm_squared())
            }
            Probe::SpreadFrom { reference } => {
                (sectional_unchecked(ctx.model, t, &v[0], &v[1]) - reference).abs() / ctx.scale
            }
        };
        if raw.is_nan() {
            f64::INFINITY
        } else {
            raw
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagReport {
    pub label: String,
    pub kind: Option<PlaneKind>,
    pub probe: Probe,
    pub max_residual: f64,
    /// Present exactly when the verdict is false.
    pub witness: Option<Witness>,
    pub samples_used: usize,
    pub tolerance: f64,
    pub verdict: bool,
    pub side_notes: Vec<String>,
}

impl DiagReport {
    /// Re-evaluate the probe on the stored witness.
    pub fn replay(&self, model: &ModelPoint, tensor: &QuadTensor) -> Result<Option<f64>> {
        let Some(w) = &self.witness else {
            return Ok(None);
        };
        let mut ctx = ProbeContext::new(model, tensor);
        if matches!(self.probe, Probe::IsotropicRicci) {
            ctx = ctx.with_ricci()?;
        }
        Ok(Some(self.probe.evaluate(&ctx, &w.to_vectors())))
    }
}

/// Evaluate `draw(i)` for `i < count` in parallel and keep the maximum; ties
/// go to the smallest index so the result does not depend on scheduling.
pub(crate) fn run_sampled<F>(
    label: &str,
    kind: Option<PlaneKind>,
    probe: Probe,
    count: usize,
    tol: Tolerance,
    draw: F,
) -> Result<DiagReport>
where
    F: Fn(u64) -> Result<(f64, Vec<Vector>)> + Sync + Send,
{
    let residuals: Vec<f64> = (0..count as u64)
        .into_par_iter()
        .map(|i| draw(i).map(|(r, _)| r))
        .collect::<Result<_>>()?;
    let mut best: Option<(usize, f64)> = None;
    for (i, r) in residuals.iter().enumerate() {
        if best.is_none_or(|(_, b)| *r > b) {
            best = Some((i, *r));
        }
    }
    let max_residual = best.map_or(0.0, |(_, r)| r);
    let verdict = tol.accepts(max_residual);
    let witness = match (verdict, best) {
        (false, Some((i, _))) => {
            let (_, vectors) = draw(i as u64)?;
            Some(Witness {
                sample_index: i as u64,
                vectors: vectors
                    .iter()
                    .map(|v| v.iter().copied().collect())
                    .collect(),
            })
        }
        _ => None,
    };
    Ok(DiagReport {
        label: label.to_string(),
        kind,
        probe,
        max_residual,
        witness,
        samples_used: count,
        tolerance: tol.rel,
        verdict,
        side_notes: Vec::new(),
    })
}
