//! Contractions: Ricci and scalar curvature, their `*`-variants, `J`-conjugation
//! and the curvature-like predicate.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::Result;
use crate::model::ModelPoint;
use crate::tensor::{Bilinear, QuadTensor};
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureLikeReport {
    /// max |T(x,y,z,u) + T(y,x,z,u)|
    pub skew_first: f64,
    /// max |T(x,y,z,u) + T(x,y,u,z)|
    pub skew_last: f64,
    /// max |cyclic sum over (x,y,z)|
    pub bianchi: f64,
    /// max |T(x,y,z,u) - T(z,u,x,y)|
    pub pair_symmetry: f64,
    /// Scale the residuals above were divided by.
    pub scale: f64,
    pub verdict: bool,
}

impl CurvatureLikeReport {
    pub fn max_violation(&self) -> f64 {
        self.skew_first
            .max(self.skew_last)
            .max(self.bianchi)
            .max(self.pair_symmetry)
    }
}

/// Check the skew symmetries, the first Bianchi identity and pair symmetry.
pub fn validate_curvature_like(t: &QuadTensor, tol: Tolerance) -> CurvatureLikeReport {
    let m = t.dim();
    let scale = t.scale();
    let (mut a, mut b, mut c, mut d) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    let v = t.get(i, j, k, l);
                    a = a.max((v + t.get(j, i, k, l)).abs());
                    b = b.max((v + t.get(i, j, l, k)).abs());
                    c = c.max((v + t.get(j, k, i, l) + t.get(k, i, j, l)).abs());
                    d = d.max((v - t.get(k, l, i, j)).abs());
                }
            }
        }
    }
    let (a, b, c, d) = (a / scale, b / scale, c / scale, d / scale);
    CurvatureLikeReport {
        skew_first: a,
        skew_last: b,
        bianchi: c,
        pair_symmetry: d,
        scale,
        verdict: [a, b, c, d].iter().all(|r| tol.accepts(*r)),
    }
}

/// Contract slots 1 and 4: `S(y,z) = g^{il} T(e_i, y, z, e_l)`.
fn contract_outer(model: &ModelPoint, t: &QuadTensor) -> DMatrix<f64> {
    let m = model.dim();
    let ginv = model.metric_inv();
    let mut out = DMatrix::zeros(m, m);
    for i in 0..m {
        for l in 0..m {
            let w = ginv[(i, l)];
            if w == 0.0 {
                continue;
            }
            for j in 0..m {
                for k in 0..m {
                    out[(j, k)] += w * t.get(i, j, k, l);
                }
            }
        }
    }
    out
}

/// Ricci form `rho(y,z) = sum_i eps_i T(e_i, y, z, e_i)`; with this
/// convention `rho(c pi1) = c (m-1) g`.
pub fn ricci(model: &ModelPoint, t: &QuadTensor) -> Result<Bilinear> {
    t.check_model(model)?;
    Ok(Bilinear::detect(contract_outer(model, t)))
}

/// `tau = sum_j eps_j rho(e_j, e_j)`.
pub fn scalar_curv(model: &ModelPoint, t: &QuadTensor) -> Result<f64> {
    Ok(ricci(model, t)?.trace(model))
}

/// Ricci `*`-form `rho*(y,z) = sum_i eps_i T(e_i, y, Jz, Je_i)`.
///
/// Not symmetric in general, so the result is tagged unconstrained.
pub fn ricci_star(model: &ModelPoint, t: &QuadTensor) -> Result<Bilinear> {
    t.check_model(model)?;
    let j = model.require_j()?;
    let twisted = t.pullback(j, [false, false, true, true]);
    Ok(Bilinear::unconstrained(contract_outer(model, &twisted)))
}

/// `tau* = sum_i eps_i rho*(e_i, e_i)`.
pub fn scalar_star(model: &ModelPoint, t: &QuadTensor) -> Result<f64> {
    Ok(ricci_star(model, t)?.trace(model))
}

/// `Tbar(x,y,z,u) = T(Jx, Jy, Jz, Ju)`.
pub fn conjugate(model: &ModelPoint, t: &QuadTensor) -> Result<QuadTensor> {
    t.check_model(model)?;
    let j = model.require_j()?;
    Ok(t.pullback(j, [true; 4]))
}

/// Relative residual of the Kaehler identity `T(x,y,Jz,Ju) = T(x,y,z,u)`.
pub fn kaehler_residual(model: &ModelPoint, t: &QuadTensor) -> Result<f64> {
    t.check_model(model)?;
    let j = model.require_j()?;
    let twisted = t.pullback(j, [false, false, true, true]);
    Ok((&twisted - t).max_abs() / t.scale())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::{pi1, pi2};

    #[test]
    fn single_component_is_not_curvature_like() {
        let mut t = QuadTensor::zeros(4);
        t.set(0, 1, 2, 3, 1.0);
        let r = validate_curvature_like(&t, Tolerance::default());
        assert!(!r.verdict);
        assert_eq!(r.skew_first, 1.0);
    }

    #[test]
    fn zero_is_curvature_like() {
        let r = validate_curvature_like(&QuadTensor::zeros(3), Tolerance::default());
        assert!(r.verdict);
        assert_eq!(r.max_violation(), 0.0);
    }

    #[test]
    fn ricci_of_zero_is_zero() {
        let model = ModelPoint::hermitian(4, 2).unwrap();
        let z = QuadTensor::zeros(4);
        assert_eq!(ricci(&model, &z).unwrap().max_abs(), 0.0);
        assert_eq!(scalar_curv(&model, &z).unwrap(), 0.0);
        assert_eq!(ricci_star(&model, &z).unwrap().max_abs(), 0.0);
        assert_eq!(scalar_star(&model, &z).unwrap(), 0.0);
        assert_eq!(conjugate(&model, &z).unwrap(), z);
    }

    #[test]
    fn star_operations_need_j() {
        let model = ModelPoint::new(4, 2).unwrap();
        let p = pi1(&model);
        assert!(ricci_star(&model, &p).is_err());
        assert!(conjugate(&model, &p).is_err());
    }

    #[test]
    fn model_tensors_contract_as_expected() {
        let model = ModelPoint::hermitian(6, 2).unwrap();
        let g = model.metric();
        let p1 = pi1(&model);
        let p2 = pi2(&model).unwrap();
        assert!((ricci(&model, &p1).unwrap().comps() - g * 5.0).amax() < 1e-13);
        assert!((ricci(&model, &p2).unwrap().comps() - g * 3.0).amax() < 1e-13);
        assert!((ricci_star(&model, &p1).unwrap().comps() - g).amax() < 1e-13);
        assert!((ricci_star(&model, &p2).unwrap().comps() - g * 7.0).amax() < 1e-13);
        assert!((scalar_star(&model, &p1).unwrap() - 6.0).abs() < 1e-12);
        assert_eq!(conjugate(&model, &p1).unwrap(), p1);
        assert!((&conjugate(&model, &p2).unwrap() - &p2).max_abs() < 1e-14);
    }
}
