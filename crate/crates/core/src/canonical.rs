//! Model curvature tensors and the tensors derived from a curvature tensor:
//! `pi1`, `pi2`, `phi(S)`, `psi(S)`, the conformal tensor and the Bochner tensor.
//!
//! In the almost Hermitian formulas `n` is the complex dimension `m/2`; in the
//! conformal tensor the real dimension `m` is used.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::contract::{conjugate, ricci, ricci_star, scalar_curv, scalar_star};
use crate::error::{Error, Result};
use crate::model::ModelPoint;
use crate::tensor::{Bilinear, QuadTensor};
use crate::tolerance::Tolerance;

/// `pi1(x,y,z,u) = g(y,z) g(x,u) - g(x,z) g(y,u)`.
pub fn pi1(model: &ModelPoint) -> QuadTensor {
    let g = model.metric();
    QuadTensor::from_fn(model.dim(), |i, j, k, l| {
        g[(j, k)] * g[(i, l)] - g[(i, k)] * g[(j, l)]
    })
}

/// `pi2(x,y,z,u) = g(y,Jz) g(x,Ju) - g(x,Jz) g(y,Ju) - 2 g(x,Jy) g(z,Ju)`.
pub fn pi2(model: &ModelPoint) -> Result<QuadTensor> {
    let om = model.kaehler_form()?;
    Ok(QuadTensor::from_fn(model.dim(), |i, j, k, l| {
        om[(j, k)] * om[(i, l)] - om[(i, k)] * om[(j, l)] - 2.0 * om[(i, j)] * om[(k, l)]
    }))
}

fn check_form(model: &ModelPoint, s: &Bilinear) -> Result<()> {
    if s.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: s.dim(),
        });
    }
    Ok(())
}

fn phi_raw(model: &ModelPoint, s: &DMatrix<f64>) -> QuadTensor {
    let g = model.metric();
    QuadTensor::from_fn(model.dim(), |i, j, k, l| {
        g[(j, k)] * s[(i, l)] - g[(i, k)] * s[(j, l)] + g[(i, l)] * s[(j, k)]
            - g[(j, l)] * s[(i, k)]
    })
}

/// `phi(S)(x,y,z,u) = g(y,z)S(x,u) - g(x,z)S(y,u) + g(x,u)S(y,z) - g(y,u)S(x,z)`.
///
/// Curvature-like for symmetric `S`; non-symmetric input is rejected.
pub fn phi(model: &ModelPoint, s: &Bilinear) -> Result<QuadTensor> {
    check_form(model, s)?;
    let r = s.symmetry_residual();
    if !Tolerance::default().accepts(r) {
        return Err(Error::NotSymmetric(r));
    }
    Ok(phi_raw(model, s.comps()))
}

/// Relative residual of the hybrid condition `S(x,Jy) + S(y,Jx) = 0`.
pub fn hybrid_residual(model: &ModelPoint, s: &Bilinear) -> Result<f64> {
    check_form(model, s)?;
    let a = s.comps() * model.require_j()?;
    Ok((&a + a.transpose()).amax() / Tolerance::scale(s.max_abs()))
}

fn psi_raw(model: &ModelPoint, s: &DMatrix<f64>) -> Result<QuadTensor> {
    let om = model.kaehler_form()?;
    let a = s * model.require_j()?;
    Ok(QuadTensor::from_fn(model.dim(), |i, j, k, l| {
        om[(j, k)] * a[(i, l)] - om[(i, k)] * a[(j, l)] - 2.0 * om[(i, j)] * a[(k, l)]
            + om[(i, l)] * a[(j, k)]
            - om[(j, l)] * a[(i, k)]
            - 2.0 * om[(k, l)] * a[(i, j)]
    }))
}

/// `psi(S)`, curvature-like whenever `S` satisfies the hybrid condition.
/// Violations are an error; see [`psi_unchecked`] to evaluate anyway.
pub fn psi(model: &ModelPoint, s: &Bilinear) -> Result<QuadTensor> {
    let r = hybrid_residual(model, s)?;
    if !Tolerance::default().accepts(r) {
        return Err(Error::HybridConditionViolated(r));
    }
    psi_raw(model, s.comps())
}

/// `psi(S)` evaluated regardless of the hybrid condition, together with the
/// condition's residual (the result is not curvature-like when it fails).
pub fn psi_unchecked(model: &ModelPoint, s: &Bilinear) -> Result<(QuadTensor, f64)> {
    let r = hybrid_residual(model, s)?;
    Ok((psi_raw(model, s.comps())?, r))
}

/// Conformal curvature tensor
/// `C = R - phi(rho)/(m-2) + tau pi1 / ((m-1)(m-2))`.
pub fn conformal(model: &ModelPoint, r: &QuadTensor) -> Result<QuadTensor> {
    r.check_model(model)?;
    let m = model.dim();
    if m <= 3 {
        return Err(Error::UnsupportedDimension(format!(
            "conformal tensor needs dimension > 3, got {m}"
        )));
    }
    let rho = ricci(model, r)?;
    let tau = rho.trace(model);
    let mf = m as f64;
    let mut c = r.clone();
    c.axpy(-1.0 / (mf - 2.0), &phi_raw(model, rho.comps()));
    c.axpy(tau / ((mf - 1.0) * (mf - 2.0)), &pi1(model));
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HybridCheck {
    pub argument: &'static str,
    pub residual: f64,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BochnerTensor {
    pub tensor: QuadTensor,
    /// Hybrid-condition status of every form fed into `psi`.
    pub psi_arguments: Vec<HybridCheck>,
}

fn check_bochner_model(model: &ModelPoint) -> Result<()> {
    model.require_j()?;
    if model.dim() < 6 || !model.dim().is_multiple_of(2) {
        return Err(Error::UnsupportedDimension(format!(
            "Bochner tensor needs even dimension >= 6, got {}",
            model.dim()
        )));
    }
    Ok(())
}

/// Bochner curvature tensor of an almost Hermitian curvature tensor.
///
/// With `P = R + Rbar`, `Q = R - Rbar` and `n = m/2`:
///
/// ```text
/// B = R - (phi+psi)(rho(P) + 3 rho*(P)) / (16(n+2))
///       - (3 phi - psi)(rho(P) - rho*(P)) / (16(n-2))
///       - psi(rho*(Q)) / (4(n+1)) - phi(rho(Q)) / (4(n-1))
///       + (tau + 3 tau*)(R) (pi1 + pi2) / (16(n+1)(n+2))
///       + (tau - tau*)(R) (3 pi1 - pi2) / (16(n-1)(n-2))
/// ```
///
/// The `phi(rho(Q))` term enters with a minus sign: that is the sign for
/// which `B` is idempotent and its kernel is exactly the set of tensors
/// vanishing on strongly isotropic antiholomorphic planes.
pub fn bochner(model: &ModelPoint, r: &QuadTensor) -> Result<BochnerTensor> {
    r.check_model(model)?;
    check_bochner_model(model)?;
    let n = model.complex_dim() as f64;
    let rbar = conjugate(model, r)?;
    let p = r + &rbar;
    let q = r - &rbar;
    let rho_p = ricci(model, &p)?;
    let star_p = ricci_star(model, &p)?;
    let rho_q = ricci(model, &q)?;
    let star_q = ricci_star(model, &q)?;
    let tau = scalar_curv(model, r)?;
    let tau_star = scalar_star(model, r)?;

    let plus = rho_p.combine(1.0, &star_p, 3.0);
    let minus = rho_p.combine(1.0, &star_p, -1.0);

    let mut psi_arguments = Vec::with_capacity(3);
    let mut psi_logged = |label: &'static str, s: &Bilinear| -> Result<QuadTensor> {
        let (t, res) = psi_unchecked(model, s)?;
        psi_arguments.push(HybridCheck {
            argument: label,
            residual: res,
            satisfied: Tolerance::default().accepts(res),
        });
        Ok(t)
    };
    let psi_plus = psi_logged("rho(R+Rbar) + 3 rho*(R+Rbar)", &plus)?;
    let psi_minus = psi_logged("rho(R+Rbar) - rho*(R+Rbar)", &minus)?;
    let psi_q = psi_logged("rho*(R-Rbar)", &star_q)?;

    let p1 = pi1(model);
    let p2 = pi2(model)?;

    let mut b = r.clone();
    let c1 = 1.0 / (16.0 * (n + 2.0));
    b.axpy(-c1, &phi_raw(model, plus.comps()));
    b.axpy(-c1, &psi_plus);
    let c2 = 1.0 / (16.0 * (n - 2.0));
    b.axpy(-3.0 * c2, &phi_raw(model, minus.comps()));
    b.axpy(c2, &psi_minus);
    b.axpy(-1.0 / (4.0 * (n + 1.0)), &psi_q);
    b.axpy(-1.0 / (4.0 * (n - 1.0)), &phi_raw(model, rho_q.comps()));
    let c5 = (tau + 3.0 * tau_star) / (16.0 * (n + 1.0) * (n + 2.0));
    b.axpy(c5, &p1);
    b.axpy(c5, &p2);
    let c6 = (tau - tau_star) / (16.0 * (n - 1.0) * (n - 2.0));
    b.axpy(3.0 * c6, &p1);
    b.axpy(-c6, &p2);

    Ok(BochnerTensor {
        tensor: b,
        psi_arguments,
    })
}

/// Constant sectional curvature `c`: `R = c pi1`.
pub fn build_constant_curvature(model: &ModelPoint, c: f64) -> QuadTensor {
    pi1(model).scaled(c)
}

/// The conformally flat tensor with Ricci form `S`:
/// `R = phi(S)/(m-2) - tr(S) pi1 / ((m-1)(m-2))`.
pub fn build_conformally_flat(model: &ModelPoint, s: &Bilinear) -> Result<QuadTensor> {
    let m = model.dim();
    if m <= 3 {
        return Err(Error::UnsupportedDimension(format!(
            "conformally flat builder needs dimension > 3, got {m}"
        )));
    }
    let mf = m as f64;
    let mut r = phi(model, s)?.scaled(1.0 / (mf - 2.0));
    r.axpy(-s.trace(model) / ((mf - 1.0) * (mf - 2.0)), &pi1(model));
    Ok(r)
}

/// Constant holomorphic curvature `mu` and antiholomorphic curvature `nu`:
/// `R = nu pi1 + (mu - nu)/3 pi2`.
pub fn build_space_form(model: &ModelPoint, nu: f64, mu: f64) -> Result<QuadTensor> {
    let mut r = pi1(model).scaled(nu);
    r.axpy((mu - nu) / 3.0, &pi2(model)?);
    Ok(r)
}

/// Kaehler space form of holomorphic curvature `mu`, `(mu/4)(pi1 + pi2)`.
pub fn kaehler_space_form(model: &ModelPoint, mu: f64) -> Result<QuadTensor> {
    build_space_form(model, mu / 4.0, mu)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AntiholomorphicForm {
    /// max-norm of the residual tensor, relative to the scale of `R`
    pub residual: f64,
    pub nu: f64,
    /// hybrid residual of `rho*(R)`; `psi(rho*)` is only curvature-like when it passes
    pub hybrid_residual: f64,
    pub hybrid_ok: bool,
}

/// `Z = R - psi(rho*)/(2(n+1)) + tau* pi2/((2n+1)(2n+2))` and
/// `D = pi1 - pi2/(2n+1)`; constant antiholomorphic curvature `nu` means `Z = nu D`.
fn antiholomorphic_parts(
    model: &ModelPoint,
    r: &QuadTensor,
) -> Result<(QuadTensor, QuadTensor, f64)> {
    r.check_model(model)?;
    let n = model.complex_dim() as f64;
    let star = ricci_star(model, r)?;
    let tau_star = star.trace(model);
    let (psi_star, hybrid) = psi_unchecked(model, &star)?;
    let p2 = pi2(model)?;
    let mut z = r.clone();
    z.axpy(-1.0 / (2.0 * (n + 1.0)), &psi_star);
    z.axpy(tau_star / ((2.0 * n + 1.0) * (2.0 * n + 2.0)), &p2);
    let mut d = pi1(model);
    d.axpy(-1.0 / (2.0 * n + 1.0), &p2);
    Ok((z, d, hybrid))
}

/// Residual of the constant-antiholomorphic-curvature normal form for a given `nu`.
pub fn antiholomorphic_form_residual(
    model: &ModelPoint,
    r: &QuadTensor,
    nu: f64,
) -> Result<AntiholomorphicForm> {
    let (z, d, hybrid) = antiholomorphic_parts(model, r)?;
    let mut res = z;
    res.axpy(-nu, &d);
    Ok(AntiholomorphicForm {
        residual: res.max_abs() / r.scale(),
        nu,
        hybrid_residual: hybrid,
        hybrid_ok: Tolerance::default().accepts(hybrid),
    })
}

/// Same residual with `nu` fitted by least squares.
pub fn fit_antiholomorphic_form(model: &ModelPoint, r: &QuadTensor) -> Result<AntiholomorphicForm> {
    let (z, d, hybrid) = antiholomorphic_parts(model, r)?;
    let nu = z.dot(&d) / d.dot(&d);
    let mut res = z;
    res.axpy(-nu, &d);
    Ok(AntiholomorphicForm {
        residual: res.max_abs() / r.scale(),
        nu,
        hybrid_residual: hybrid,
        hybrid_ok: Tolerance::default().accepts(hybrid),
    })
}
