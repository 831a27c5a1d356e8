use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::report::{run_sampled, DiagReport, Probe, ProbeContext, Witness};
use crate::canonical::{bochner, conformal, fit_antiholomorphic_form, pi1, pi2};
use crate::contract::{kaehler_residual, ricci};
use crate::error::{Error, Result};
use crate::frames::{sectional_unchecked, Sign};
use crate::model::{ModelPoint, Vector};
use crate::sampling::{random_unit, random_unit_orthogonal, sample_one, stream_rng, PlaneKind};
use crate::tensor::QuadTensor;
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "ThmA_weakIso_constK")]
    ThmA,
    #[serde(rename = "Thm1_strongIso_confFlat")]
    Thm1,
    #[serde(rename = "Thm2_quadruples")]
    Thm2,
    #[serde(rename = "Thm5_weakIsoAntihol_constAntihol")]
    Thm5,
    #[serde(rename = "Thm6_strongIsoAntihol_Bochner")]
    Thm6,
    #[serde(rename = "Thm7_isoHol_Bochner_Kaehler")]
    Thm7,
    #[serde(rename = "Lemma2_equiv")]
    Lemma2,
    #[serde(rename = "EinsteinFromIsotropicRicci")]
    Einstein,
}

impl TheoremId {
    pub const ALL: [TheoremId; 8] = [
        TheoremId::ThmA,
        TheoremId::Thm1,
        TheoremId::Thm2,
        TheoremId::Thm5,
        TheoremId::Thm6,
        TheoremId::Thm7,
        TheoremId::Lemma2,
        TheoremId::Einstein,
    ];

    pub fn id(self) -> &'static str {
        match self {
            TheoremId::ThmA => "ThmA_weakIso_constK",
            TheoremId::Thm1 => "Thm1_strongIso_confFlat",
            TheoremId::Thm2 => "Thm2_quadruples",
            TheoremId::Thm5 => "Thm5_weakIsoAntihol_constAntihol",
            TheoremId::Thm6 => "Thm6_strongIsoAntihol_Bochner",
            TheoremId::Thm7 => "Thm7_isoHol_Bochner_Kaehler",
            TheoremId::Lemma2 => "Lemma2_equiv",
            TheoremId::Einstein => "EinsteinFromIsotropicRicci",
        }
    }

    pub fn short(self) -> &'static str {
        match self {
            TheoremId::ThmA => "ThmA",
            TheoremId::Thm1 => "Thm1",
            TheoremId::Thm2 => "Thm2",
            TheoremId::Thm5 => "Thm5",
            TheoremId::Thm6 => "Thm6",
            TheoremId::Thm7 => "Thm7",
            TheoremId::Lemma2 => "Lemma2",
            TheoremId::Einstein => "Einstein",
        }
    }

    /// Signature and structure requirements, without looking at the tensor.
    pub fn check_preconditions(self, model: &ModelPoint) -> Result<()> {
        match self {
            TheoremId::ThmA => PlaneKind::WeaklyIsotropic.check_supported(model),
            TheoremId::Thm1 => PlaneKind::StronglyIsotropic.check_supported(model),
            TheoremId::Thm2 => PlaneKind::QuadruplePPMM.check_supported(model),
            TheoremId::Thm5 => PlaneKind::WeaklyIsotropicAntiholomorphic.check_supported(model),
            TheoremId::Thm6 | TheoremId::Thm7 | TheoremId::Lemma2 => {
                PlaneKind::StronglyIsotropicAntiholomorphic.check_supported(model)
            }
            TheoremId::Einstein => {
                if model.is_indefinite() {
                    Ok(())
                } else {
                    Err(Error::DefiniteMetric)
                }
            }
        }
    }

    pub fn needs_kaehler(self) -> bool {
        matches!(self, TheoremId::Thm7 | TheoremId::Lemma2)
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for TheoremId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        TheoremId::ALL
            .into_iter()
            .find(|t| {
                t.short().to_ascii_lowercase() == lower || t.id().to_ascii_lowercase() == lower
            })
            .ok_or_else(|| Error::InvalidArgument(format!("unknown theorem id '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UniquenessKind {
    ThmB,
    ThmC,
    Lemma1,
}

impl FromStr for UniquenessKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "thmb" => Ok(UniquenessKind::ThmB),
            "thmc" => Ok(UniquenessKind::ThmC),
            "lemma1" => Ok(UniquenessKind::Lemma1),
            _ => Err(Error::InvalidArgument(format!(
                "unknown uniqueness check '{s}'"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Hypothesis,
    Conclusion,
}

/// One side of a two-sided check: either a sampled report or a closed-form norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Side {
    pub name: String,
    pub role: Role,
    pub residual: f64,
    pub pass: bool,
    pub sampled: Option<DiagReport>,
}

impl Side {
    fn sampled(role: Role, report: DiagReport) -> Self {
        Self {
            name: report.label.clone(),
            role,
            residual: report.max_residual,
            pass: report.verdict,
            sampled: Some(report),
        }
    }

    fn closed(name: &str, role: Role, residual: f64, tol: Tolerance) -> Self {
        Self {
            name: name.to_string(),
            role,
            residual,
            pass: tol.accepts(residual),
            sampled: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Outcome {
    BothPass,
    BothFail,
    OneSided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub check: String,
    pub sides: Vec<Side>,
    pub hypothesis_pass: bool,
    pub conclusion_pass: bool,
    pub consistent: bool,
    pub outcome: Outcome,
    /// Witness of a failing sampled side when the sides disagree.
    pub witness: Option<Witness>,
    pub tolerance: f64,
    pub side_notes: Vec<String>,
}

impl EquivalenceReport {
    /// `conjunctive`: hypothesis sides are combined with AND (uniqueness
    /// statements); otherwise every side must agree with every other.
    fn assemble(check: &str, sides: Vec<Side>, conjunctive: bool, tol: Tolerance) -> Self {
        let all = |role: Role| sides.iter().filter(|s| s.role == role).all(|s| s.pass);
        let hypothesis_pass = all(Role::Hypothesis);
        let conclusion_pass = all(Role::Conclusion);
        let consistent = if conjunctive {
            hypothesis_pass == conclusion_pass
        } else {
            sides.iter().all(|s| s.pass == sides[0].pass)
        };
        let outcome = match (consistent, hypothesis_pass && conclusion_pass) {
            (false, _) => Outcome::OneSided,
            (true, true) => Outcome::BothPass,
            (true, false) => Outcome::BothFail,
        };
        let witness = if consistent {
            None
        } else {
            sides
                .iter()
                .filter_map(|s| s.sampled.as_ref())
                .find_map(|r| r.witness.clone())
        };
        Self {
            check: check.to_string(),
            sides,
            hypothesis_pass,
            conclusion_pass,
            consistent,
            outcome,
            witness,
            tolerance: tol.rel,
            side_notes: Vec::new(),
        }
    }
}

const SLOT_PLANE: Probe = Probe::Slots {
    slots: [0, 1, 1, 0],
};
const SLOT_MIXED: Probe = Probe::Slots {
    slots: [0, 1, 2, 3],
};
const SLOT_XYZX: Probe = Probe::Slots {
    slots: [0, 1, 2, 0],
};

fn owned(sample: &crate::sampling::Sample) -> Vec<Vector> {
    sample.vectors().into_iter().cloned().collect()
}

/// Max over sampled planes of `|R(u,v,v,u)|`, relative to the scale of `R`
/// and the Euclidean size of the basis.
pub fn vanishing_report(
    model: &ModelPoint,
    r: &QuadTensor,
    kind: PlaneKind,
    count: usize,
    seed: u64,
    tol: Tolerance,
) -> Result<DiagReport> {
    r.check_model(model)?;
    if kind.is_frame() {
        return Err(Error::InvalidArgument(format!(
            "{kind:?} yields frames, not planes"
        )));
    }
    kind.check_supported(model)?;
    let ctx = ProbeContext::new(model, r);
    let label = format!("R(u,v,v,u) on {kind:?}");
    run_sampled(&label, Some(kind), SLOT_PLANE, count, tol, |i| {
        let v = owned(&sample_one(model, kind, seed, i)?);
        Ok((SLOT_PLANE.evaluate(&ctx, &v), v))
    })
}

#[allow(clippy::too_many_arguments)]
fn frame_report(
    model: &ModelPoint,
    r: &QuadTensor,
    kind: PlaneKind,
    probe: Probe,
    label: &str,
    count: usize,
    seed: u64,
    tol: Tolerance,
) -> Result<DiagReport> {
    kind.check_supported(model)?;
    let ctx = ProbeContext::new(model, r);
    run_sampled(label, Some(kind), probe, count, tol, |i| {
        let v = owned(&sample_one(model, kind, seed, i)?);
        Ok((probe.evaluate(&ctx, &v), v))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatnessNorms {
    /// `|C(R)|`, when `m > 3`.
    pub conf_norm: Option<f64>,
    /// `|B(R)|`, when `J` is present and `m >= 6`.
    pub boch_norm: Option<f64>,
    /// `|R - kappa pi1|` with `kappa` the projection onto `pi1`.
    pub const_curv_residual: f64,
    pub kappa_hat: f64,
    /// Least-squares fit `R ~ nu pi1 + ((mu - nu)/3) pi2` (`nu = kappa` without `J`).
    pub nu_hat: f64,
    pub mu_hat: Option<f64>,
    /// Residual of the constant-antiholomorphic normal form with its own fitted `nu`.
    pub antihol_residual: Option<f64>,
    pub antihol_nu: Option<f64>,
    pub kaehler_residual: Option<f64>,
    /// `|rho - (tau/m) g|`, relative to `rho`.
    pub einstein_residual: f64,
}

fn conformal_norm(model: &ModelPoint, r: &QuadTensor) -> Result<f64> {
    Ok(conformal(model, r)?.max_abs() / r.scale())
}

fn bochner_norm(model: &ModelPoint, r: &QuadTensor) -> Result<f64> {
    Ok(bochner(model, r)?.tensor.max_abs() / r.scale())
}

fn constant_curvature_fit(model: &ModelPoint, r: &QuadTensor) -> (f64, f64) {
    let p1 = pi1(model);
    let kappa = r.dot(&p1) / p1.dot(&p1);
    let mut res = r.clone();
    res.axpy(-kappa, &p1);
    (kappa, res.max_abs() / r.scale())
}

fn einstein_residual(model: &ModelPoint, r: &QuadTensor) -> Result<f64> {
    let rho = ricci(model, r)?;
    let tau = rho.trace(model);
    let dev = rho.comps() - model.metric() * (tau / model.dim() as f64);
    Ok(dev.amax() / Tolerance::scale(rho.max_abs()))
}

pub fn flatness_norms(model: &ModelPoint, r: &QuadTensor) -> Result<FlatnessNorms> {
    r.check_model(model)?;
    let m = model.dim();
    let conf_norm = if m > 3 {
        Some(conformal_norm(model, r)?)
    } else {
        None
    };
    let has_j = model.has_complex_structure();
    let boch_norm = if has_j && m >= 6 {
        Some(bochner_norm(model, r)?)
    } else {
        None
    };
    let (kappa_hat, const_curv_residual) = constant_curvature_fit(model, r);
    let (mut nu_hat, mut mu_hat) = (kappa_hat, None);
    let (mut antihol_residual, mut antihol_nu, mut kaehler) = (None, None, None);
    if has_j {
        let p1 = pi1(model);
        let p2 = pi2(model)?;
        let (a11, a12, a22) = (p1.dot(&p1), p1.dot(&p2), p2.dot(&p2));
        let det = a11 * a22 - a12 * a12;
        if det.abs() > 1e-12 * a11 * a22 {
            let (b1, b2) = (r.dot(&p1), r.dot(&p2));
            let nu = (b1 * a22 - b2 * a12) / det;
            let c2 = (a11 * b2 - a12 * b1) / det;
            nu_hat = nu;
            mu_hat = Some(nu + 3.0 * c2);
        }
        let fit = fit_antiholomorphic_form(model, r)?;
        antihol_residual = Some(fit.residual);
        antihol_nu = Some(fit.nu);
        kaehler = Some(kaehler_residual(model, r)?);
    }
    Ok(FlatnessNorms {
        conf_norm,
        boch_norm,
        const_curv_residual,
        kappa_hat,
        nu_hat,
        mu_hat,
        antihol_residual,
        antihol_nu,
        kaehler_residual: kaehler,
        einstein_residual: einstein_residual(model, r)?,
    })
}

fn require_kaehler(model: &ModelPoint, r: &QuadTensor, tol: Tolerance) -> Result<()> {
    let k = kaehler_residual(model, r)?;
    if tol.accepts(k) {
        Ok(())
    } else {
        Err(Error::NotKaehler(k))
    }
}

/// Spread of `K` over nondegenerate antiholomorphic planes, measured against
/// the first sample.
fn antiholomorphic_spread(
    model: &ModelPoint,
    r: &QuadTensor,
    count: usize,
    seed: u64,
    tol: Tolerance,
) -> Result<DiagReport> {
    let kind = PlaneKind::NondegenerateAntiholomorphic;
    let first = owned(&sample_one(model, kind, seed, 0)?);
    let reference = sectional_unchecked(model, r, &first[0], &first[1]);
    let probe = Probe::SpreadFrom { reference };
    frame_report(
        model,
        r,
        kind,
        probe,
        "antiholomorphic K spread",
        count,
        seed,
        tol,
    )
}

/// Evaluate both sides of a theorem independently and compare them.
pub fn equivalence_check(
    model: &ModelPoint,
    r: &QuadTensor,
    id: TheoremId,
    count: usize,
    seed: u64,
    tol: Tolerance,
) -> Result<EquivalenceReport> {
    r.check_model(model)?;
    id.check_preconditions(model)?;
    if id.needs_kaehler() {
        require_kaehler(model, r, tol)?;
    }
    let hyp = |kind: PlaneKind| -> Result<Side> {
        Ok(Side::sampled(
            Role::Hypothesis,
            vanishing_report(model, r, kind, count, seed, tol)?,
        ))
    };
    let sides = match id {
        TheoremId::ThmA => {
            let (_, res) = constant_curvature_fit(model, r);
            vec![
                hyp(PlaneKind::WeaklyIsotropic)?,
                Side::closed("|R - kappa pi1|", Role::Conclusion, res, tol),
            ]
        }
        TheoremId::Thm1 => vec![
            hyp(PlaneKind::StronglyIsotropic)?,
            Side::closed("|C(R)|", Role::Conclusion, conformal_norm(model, r)?, tol),
        ],
        TheoremId::Thm2 => {
            let kind = PlaneKind::QuadruplePPMM;
            let cond2 = frame_report(model, r, kind, SLOT_MIXED, "R(x,y,a,b)", count, seed, tol)?;
            let cond3 = frame_report(
                model,
                r,
                kind,
                Probe::Balance,
                "K(x,y)+K(a,b)-K(x,a)-K(y,b)",
                count,
                seed,
                tol,
            )?;
            vec![
                Side::sampled(Role::Hypothesis, cond2),
                Side::sampled(Role::Hypothesis, cond3),
                Side::closed("|C(R)|", Role::Conclusion, conformal_norm(model, r)?, tol),
            ]
        }
        TheoremId::Thm5 => {
            let fit = fit_antiholomorphic_form(model, r)?;
            let mut spread = antiholomorphic_spread(model, r, count, seed, tol)?;
            spread.side_notes.push(format!("fitted nu = {}", fit.nu));
            vec![
                hyp(PlaneKind::WeaklyIsotropicAntiholomorphic)?,
                Side::closed(
                    "constant antiholomorphic normal form",
                    Role::Conclusion,
                    fit.residual,
                    tol,
                ),
                Side::sampled(Role::Conclusion, spread),
            ]
        }
        TheoremId::Thm6 => vec![
            hyp(PlaneKind::StronglyIsotropicAntiholomorphic)?,
            Side::closed("|B(R)|", Role::Conclusion, bochner_norm(model, r)?, tol),
        ],
        TheoremId::Thm7 => vec![
            hyp(PlaneKind::IsotropicHolomorphic)?,
            Side::closed("|B(R)|", Role::Conclusion, bochner_norm(model, r)?, tol),
        ],
        TheoremId::Lemma2 => vec![
            hyp(PlaneKind::IsotropicHolomorphic)?,
            Side::sampled(
                Role::Conclusion,
                vanishing_report(
                    model,
                    r,
                    PlaneKind::StronglyIsotropicAntiholomorphic,
                    count,
                    seed,
                    tol,
                )?,
            ),
        ],
        TheoremId::Einstein => return einstein_check(model, r, count, seed, tol),
    };
    Ok(EquivalenceReport::assemble(id.id(), sides, false, tol))
}

/// Sampled `|rho(xi,xi)|` over isotropic `xi = x + a` against `|rho - (tau/m) g|`.
pub fn einstein_check(
    model: &ModelPoint,
    r: &QuadTensor,
    count: usize,
    seed: u64,
    tol: Tolerance,
) -> Result<EquivalenceReport> {
    r.check_model(model)?;
    TheoremId::Einstein.check_preconditions(model)?;
    let kind = PlaneKind::PairPlusMinus;
    let ctx = ProbeContext::new(model, r).with_ricci()?;
    let probe = Probe::IsotropicRicci;
    let sampled = run_sampled(
        "rho(xi,xi) on isotropic xi",
        Some(kind),
        probe,
        count,
        tol,
        |i| {
            let v = owned(&sample_one(model, kind, seed, i)?);
            Ok((probe.evaluate(&ctx, &v), v))
        },
    )?;
    let sides = vec![
        Side::sampled(Role::Hypothesis, sampled),
        Side::closed(
            "|rho - (tau/m) g|",
            Role::Conclusion,
            einstein_residual(model, r)?,
            tol,
        ),
    ];
    Ok(EquivalenceReport::assemble(
        TheoremId::Einstein.id(),
        sides,
        false,
        tol,
    ))
}

const SALT_Z: u64 = 0x7a7a_7a7a;
const SALT_X: u64 = 0x1f1f_1f1f;

/// Sampled vanishing conditions that force `T` to have constant curvature
/// (ThmB) or to vanish (ThmC, Lemma1), against the closed-form conclusion.
pub fn uniqueness_check(
    model: &ModelPoint,
    kind: UniquenessKind,
    t: &QuadTensor,
    count: usize,
    seed: u64,
    tol: Tolerance,
) -> Result<EquivalenceReport> {
    t.check_model(model)?;
    let ctx = ProbeContext::new(model, t);
    let (label, sides) = match kind {
        UniquenessKind::ThmB => {
            PlaneKind::PairPlusMinus.check_supported(model)?;
            if model.dim() < 3 {
                return Err(Error::UnsupportedDimension("ThmB needs m >= 3".into()));
            }
            let rep = run_sampled(
                "T(x,y,z,x), {x,y} of signature (+,-), z orthogonal",
                None,
                SLOT_XYZX,
                count,
                tol,
                |i| {
                    let smp = sample_one(model, PlaneKind::PairPlusMinus, seed, i)?;
                    let frame = smp.frame().expect("pair kinds yield frames");
                    let mut rng = stream_rng(seed ^ SALT_Z, i);
                    let (z, _) = random_unit_orthogonal(model, frame, None, &mut rng)?;
                    let mut v = owned(&smp);
                    v.push(z);
                    Ok((SLOT_XYZX.evaluate(&ctx, &v), v))
                },
            )?;
            let (_, res) = constant_curvature_fit(model, t);
            (
                "ThmB",
                vec![
                    Side::sampled(Role::Hypothesis, rep),
                    Side::closed("|T - kappa pi1|", Role::Conclusion, res, tol),
                ],
            )
        }
        UniquenessKind::ThmC | UniquenessKind::Lemma1 => {
            let j = model.require_j()?;
            let lemma = kind == UniquenessKind::Lemma1;
            let pairs = if lemma {
                PlaneKind::AntiholomorphicPairPlusMinus
            } else {
                PlaneKind::NondegenerateAntiholomorphic
            };
            pairs.check_supported(model)?;
            let cond1 = run_sampled(
                if lemma {
                    "T(x,Jx,Jx,x), g(x,x) = 1"
                } else {
                    "T(x,Jx,Jx,x)"
                },
                None,
                SLOT_PLANE,
                count,
                tol,
                |i| {
                    let mut rng = stream_rng(seed ^ SALT_X, i);
                    let x = if lemma {
                        random_unit(model, Sign::Plus, &mut rng)?
                    } else {
                        Vector::from_fn(model.dim(), |_, _| rng.random_range(-1.0..=1.0))
                    };
                    let v = vec![x.clone(), j * &x];
                    Ok((SLOT_PLANE.evaluate(&ctx, &v), v))
                },
            )?;
            let cond2 = run_sampled(
                "T(x,y,y,x) on antiholomorphic planes",
                Some(pairs),
                SLOT_PLANE,
                count,
                tol,
                |i| {
                    let v = owned(&sample_one(model, pairs, seed, i)?);
                    Ok((SLOT_PLANE.evaluate(&ctx, &v), v))
                },
            )?;
            let cond3 = run_sampled(
                "T(x,Jx,y,x) on antiholomorphic planes",
                Some(pairs),
                SLOT_XYZX,
                count,
                tol,
                |i| {
                    let p = owned(&sample_one(model, pairs, seed, i)?);
                    let v = vec![p[0].clone(), j * &p[0], p[1].clone()];
                    Ok((SLOT_XYZX.evaluate(&ctx, &v), v))
                },
            )?;
            (
                if lemma { "Lemma1" } else { "ThmC" },
                vec![
                    Side::sampled(Role::Hypothesis, cond1),
                    Side::sampled(Role::Hypothesis, cond2),
                    Side::sampled(Role::Hypothesis, cond3),
                    Side::closed("|T|", Role::Conclusion, t.max_abs(), tol),
                ],
            )
        }
    };
    Ok(EquivalenceReport::assemble(label, sides, true, tol))
}
