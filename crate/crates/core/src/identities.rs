//! Pointwise identities satisfied by Bochner-flat curvature tensors.
//!
//! With `n = m/2`, `rho`, `rho*`, `tau`, `tau*` the contractions of `R`:
//!
//! * basis sum: `sum_i K(e_i, Je_i) = (tau + 3 tau*) / (2(n+1))`
//! * holomorphic curvature of a spacelike unit `x`:
//!   `K(x,Jx) = (rho(x,x) + rho(Jx,Jx) + 6 rho*(x,x)) / (2(n+2)) - (tau + 3 tau*) / (4(n+1)(n+2))`
//! * mixed term on an antiholomorphic `(+,-)` pair `{y, b}`:
//!   `R(y,Jy,Jy,b) = ((2n+1) rho(y,b) - 3 rho(Jy,Jb)) / (4(n-1)(n+2))
//!                  + (3(2n+3) rho*(b,y) - 3 rho*(y,b)) / (4(n+1)(n+2))`
//!
//! The second identity does not hold for timelike `x`; its residual there is
//! reported for information only. An optional sectional-curvature formula on
//! antiholomorphic `(+,-)` pairs holds on space forms but not in general and is
//! only evaluated on request.

use serde::Serialize;

use crate::contract::{ricci, ricci_star};
use crate::error::{Error, Result};
use crate::frames::{complete_to_basis, sectional_unchecked, Frame, Sign};
use crate::model::ModelPoint;
use crate::sampling::{random_unit, sample_one, stream_rng, PlaneKind};
use crate::tensor::QuadTensor;
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub basis_sum: f64,
    pub holomorphic_spacelike: f64,
    pub holomorphic_timelike: f64,
    pub mixed_pair: f64,
    pub pair_sectional: Option<f64>,
    pub samples: usize,
    pub tolerance: f64,
    /// Basis sum, spacelike holomorphic and mixed-pair residuals all within tolerance.
    pub verdict: bool,
}

pub fn theorem6_identities(
    model: &ModelPoint,
    r: &QuadTensor,
    samples: usize,
    seed: u64,
    tol: Tolerance,
    with_pair_sectional: bool,
) -> Result<IdentityReport> {
    r.check_model(model)?;
    let j = model.require_j()?;
    PlaneKind::AntiholomorphicPairPlusMinus.check_supported(model)?;
    let n = model.complex_dim() as f64;
    if n < 2.0 {
        return Err(Error::UnsupportedDimension(
            "identities need complex dimension at least 2".into(),
        ));
    }
    let rho = ricci(model, r)?;
    let star = ricci_star(model, r)?;
    let tau = rho.trace(model);
    let tau_star = star.trace(model);
    let scale = r.scale();
    let k = |x: &_, y: &_| sectional_unchecked(model, r, x, y);

    let basis = complete_to_basis(model, &Frame::empty(), seed, tol)?;
    let sum: f64 = basis.vectors().iter().map(|e| k(e, &(j * e))).sum();
    let basis_sum = (sum - (tau + 3.0 * tau_star) / (2.0 * (n + 1.0))).abs() / scale;

    let holo = |sign: Sign, stream: u64| -> Result<f64> {
        let mut worst = 0.0f64;
        for i in 0..samples as u64 {
            let mut rng = stream_rng(seed ^ stream, i);
            let x = random_unit(model, sign, &mut rng)?;
            let jx = j * &x;
            let rhs = (rho.eval(&x, &x) + rho.eval(&jx, &jx) + 6.0 * star.eval(&x, &x))
                / (2.0 * (n + 2.0))
                - (tau + 3.0 * tau_star) / (4.0 * (n + 1.0) * (n + 2.0));
            worst = worst.max((k(&x, &jx) - rhs).abs() / scale);
        }
        Ok(worst)
    };
    let holomorphic_spacelike = holo(Sign::Plus, 0x5a5a)?;
    let holomorphic_timelike = if model.index() > 0 {
        holo(Sign::Minus, 0xa5a5)?
    } else {
        0.0
    };

    let c = 4.0 * (n - 1.0) * (n + 2.0);
    let d = 4.0 * (n + 1.0) * (n + 2.0);
    let mut mixed_pair = 0.0f64;
    let mut pair_sectional = with_pair_sectional.then_some(0.0f64);
    let nn = n * n;
    for i in 0..samples as u64 {
        let smp = sample_one(model, PlaneKind::AntiholomorphicPairPlusMinus, seed, i)?;
        let f = smp.frame().expect("pair kinds yield frames");
        let (y, b) = (&f.vectors()[0], &f.vectors()[1]);
        let (jy, jb) = (j * y, j * b);
        let lhs = r.eval(y, &jy, &jy, b);
        let rhs = ((2.0 * n + 1.0) * rho.eval(y, b) - 3.0 * rho.eval(&jy, &jb)) / c
            + (3.0 * (2.0 * n + 3.0) * star.eval(b, y) - 3.0 * star.eval(y, b)) / d;
        mixed_pair = mixed_pair.max((lhs - rhs).abs() / scale);

        if let Some(w) = pair_sectional.as_mut() {
            if n >= 3.0 {
                let diff = rho.eval(y, y) - rho.eval(b, b);
                let rhs = (2.0 * nn - 5.0) / (4.0 * (n - 1.0) * (nn - 4.0)) * diff
                    + 3.0 / (4.0 * (n - 1.0) * (nn - 4.0))
                        * (rho.eval(&jy, &jy) - rho.eval(&jb, &jb))
                    - 3.0 / (2.0 * (nn - 4.0)) * diff
                    - (2.0 * nn + 3.0 * n + 4.0) / (8.0 * (nn - 1.0) * (nn - 4.0)) * tau
                    + 9.0 * n / (8.0 * (nn - 1.0) * (nn - 4.0)) * tau_star;
                *w = w.max((k(y, b) - rhs).abs() / scale);
            }
        }
    }
    if n < 3.0 {
        pair_sectional = None;
    }

    let verdict = [basis_sum, holomorphic_spacelike, mixed_pair]
        .iter()
        .all(|v| tol.accepts(*v));
    Ok(IdentityReport {
        basis_sum,
        holomorphic_spacelike,
        holomorphic_timelike,
        mixed_pair,
        pair_sectional,
        samples,
        tolerance: tol.rel,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::kaehler_space_form;
    use crate::generate::{random_bochner_flat, random_curvature_like};

    #[test]
    fn zero_tensor_has_zero_residuals() {
        let model = ModelPoint::hermitian(8, 4).unwrap();
        let rep = theorem6_identities(
            &model,
            &QuadTensor::zeros(8),
            10,
            0,
            Tolerance::default(),
            true,
        )
        .unwrap();
        assert_eq!(rep.basis_sum, 0.0);
        assert_eq!(rep.holomorphic_spacelike, 0.0);
        assert_eq!(rep.mixed_pair, 0.0);
        assert_eq!(rep.pair_sectional, Some(0.0));
        assert!(rep.verdict);
    }

    #[test]
    fn kaehler_space_form_satisfies_everything() {
        let model = ModelPoint::hermitian(8, 4).unwrap();
        let r = kaehler_space_form(&model, 2.0).unwrap();
        let rep = theorem6_identities(&model, &r, 20, 1, Tolerance::default(), true).unwrap();
        assert!(rep.verdict, "{rep:?}");
        assert!(rep.pair_sectional.unwrap() < 1e-12);
    }

    #[test]
    fn bochner_flat_tensors_satisfy_the_identities() {
        let model = ModelPoint::hermitian(8, 4).unwrap();
        let mut rng = stream_rng(8, 0);
        let f = random_bochner_flat(&model, &mut rng).unwrap();
        let rep = theorem6_identities(&model, &f, 30, 2, Tolerance::default(), true).unwrap();
        assert!(rep.verdict, "{rep:?}");
        assert!(rep.holomorphic_timelike > 1e-6);
    }

    #[test]
    fn generic_tensor_violates_the_identities() {
        let model = ModelPoint::hermitian(8, 4).unwrap();
        let mut rng = stream_rng(9, 0);
        let r = random_curvature_like(8, &mut rng);
        let rep = theorem6_identities(&model, &r, 30, 2, Tolerance::default(), false).unwrap();
        assert!(!rep.verdict);
        assert!(rep.pair_sectional.is_none());
    }

    #[test]
    fn needs_j_and_mixed_signature() {
        let r = QuadTensor::zeros(6);
        let plain = ModelPoint::new(6, 2).unwrap();
        assert!(theorem6_identities(&plain, &r, 1, 0, Tolerance::default(), false).is_err());
        let definite = ModelPoint::hermitian(6, 0).unwrap();
        assert!(matches!(
            theorem6_identities(&definite, &r, 1, 0, Tolerance::default(), false),
            Err(Error::UnsupportedSignature(_))
        ));
    }
}
