//! Seeded samplers for the plane and frame families the theorems quantify over.
//!
//! Every sample is built exactly: unit vectors of a prescribed sign are drawn
//! inside the orthogonal complement of the vectors chosen so far, and isotropic
//! vectors are formed as `x + a` from a `(+,-)` orthonormal pair. There is no
//! rejection step, so samples near the light cone are as likely as any other.
//!
//! Randomness: sample `i` of a stream with seed `k` uses ChaCha8 seeded with
//! `splitmix64(k ^ splitmix64(i))`; vector coefficients are uniform on `[-1, 1]`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{Frame, Plane, Sign};
use crate::model::{ModelPoint, Vector};
use crate::tolerance::Tolerance;

/// Upper bound of the mixing weight `t` in `(main + t sec)/sqrt(1 - t^2)`.
const MAX_MIX: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlaneKind {
    WeaklyIsotropic,
    StronglyIsotropic,
    StronglyIsotropicAntiholomorphic,
    WeaklyIsotropicAntiholomorphic,
    IsotropicHolomorphic,
    NondegenerateAntiholomorphic,
    /// Orthonormal frame `(x, y, a, b)` of signature `(+,+,-,-)`.
    QuadruplePPMM,
    AntiholomorphicQuadruplePPMM,
    Nondegenerate,
    NondegenerateHolomorphic,
    /// Orthonormal frame `(x, a)` of signature `(+,-)`.
    PairPlusMinus,
    AntiholomorphicPairPlusMinus,
}

impl PlaneKind {
    pub const ALL: [PlaneKind; 12] = [
        PlaneKind::WeaklyIsotropic,
        PlaneKind::StronglyIsotropic,
        PlaneKind::StronglyIsotropicAntiholomorphic,
        PlaneKind::WeaklyIsotropicAntiholomorphic,
        PlaneKind::IsotropicHolomorphic,
        PlaneKind::NondegenerateAntiholomorphic,
        PlaneKind::QuadruplePPMM,
        PlaneKind::AntiholomorphicQuadruplePPMM,
        PlaneKind::Nondegenerate,
        PlaneKind::NondegenerateHolomorphic,
        PlaneKind::PairPlusMinus,
        PlaneKind::AntiholomorphicPairPlusMinus,
    ];

    pub fn needs_j(self) -> bool {
        matches!(
            self,
            PlaneKind::StronglyIsotropicAntiholomorphic
                | PlaneKind::WeaklyIsotropicAntiholomorphic
                | PlaneKind::IsotropicHolomorphic
                | PlaneKind::NondegenerateAntiholomorphic
                | PlaneKind::AntiholomorphicQuadruplePPMM
                | PlaneKind::NondegenerateHolomorphic
                | PlaneKind::AntiholomorphicPairPlusMinus
        )
    }

    /// Frame kinds return orthonormal frames rather than planes.
    pub fn is_frame(self) -> bool {
        matches!(
            self,
            PlaneKind::QuadruplePPMM
                | PlaneKind::AntiholomorphicQuadruplePPMM
                | PlaneKind::PairPlusMinus
                | PlaneKind::AntiholomorphicPairPlusMinus
        )
    }

    /// Signature requirements. For the `J` kinds the counts are complex:
    /// `p = s/2` negative and `q = (m-s)/2` positive complex directions.
    pub fn check_supported(self, model: &ModelPoint) -> Result<()> {
        if self.needs_j() {
            model.require_j()?;
        }
        let (m, s, r) = (model.dim(), model.index(), model.coindex());
        let (n, p, q) = (m / 2, s / 2, r / 2);
        let ok = match self {
            PlaneKind::Nondegenerate => m >= 2,
            PlaneKind::WeaklyIsotropic => s >= 1 && r >= 1 && m >= 3,
            PlaneKind::PairPlusMinus => s >= 1 && r >= 1,
            PlaneKind::StronglyIsotropic | PlaneKind::QuadruplePPMM => s >= 2 && r >= 2,
            PlaneKind::NondegenerateHolomorphic => m >= 2,
            PlaneKind::NondegenerateAntiholomorphic => n >= 2,
            PlaneKind::IsotropicHolomorphic | PlaneKind::AntiholomorphicPairPlusMinus => {
                p >= 1 && q >= 1
            }
            PlaneKind::WeaklyIsotropicAntiholomorphic => p >= 1 && q >= 1 && n >= 3,
            PlaneKind::StronglyIsotropicAntiholomorphic
            | PlaneKind::AntiholomorphicQuadruplePPMM => p >= 2 && q >= 2,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::UnsupportedSignature(format!(
                "{self:?} needs more room than signature ({s}, {r})"
            )))
        }
    }
}

/// One sampled object: a plane basis or an orthonormal frame.
#[derive(Debug, Clone, PartialEq)]
pub enum Sample {
    Plane(Plane),
    Frame(Frame),
}

impl Sample {
    pub fn vectors(&self) -> Vec<&Vector> {
        match self {
            Sample::Plane(p) => p.basis().iter().collect(),
            Sample::Frame(f) => f.vectors().iter().collect(),
        }
    }

    pub fn plane(&self) -> Option<&Plane> {
        match self {
            Sample::Plane(p) => Some(p),
            Sample::Frame(_) => None,
        }
    }

    pub fn frame(&self) -> Option<&Frame> {
        match self {
            Sample::Frame(f) => Some(f),
            Sample::Plane(_) => None,
        }
    }
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of sample `index` in the stream `seed`.
pub fn stream_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(seed, index))
}

/// Orthonormal basis of the complement of `used`, split by sign.
///
/// The complement is taken as the Euclidean complement of `G U` and the
/// restricted metric is then diagonalized, so the basis vectors are mutually
/// Euclidean-orthogonal; repeated draws therefore do not compound skew.
fn complement(model: &ModelPoint, used: &Frame) -> (Vec<Vector>, Vec<Vector>) {
    let m = model.dim();
    let g = model.metric();
    let basis = if used.is_empty() {
        DMatrix::identity(m, m)
    } else {
        let gu = g * DMatrix::from_columns(used.vectors());
        let q = gu.svd(true, false).u.expect("left singular vectors");
        let proj = DMatrix::identity(m, m) - &q * q.transpose();
        let eig = proj.symmetric_eigen();
        let cols: Vec<Vector> = (0..m)
            .filter(|&i| eig.eigenvalues[i] > 0.5)
            .map(|i| eig.eigenvectors.column(i).into_owned())
            .collect();
        if cols.is_empty() {
            return (Vec::new(), Vec::new());
        }
        DMatrix::from_columns(&cols)
    };
    let restricted = basis.transpose() * g * &basis;
    let restricted = (&restricted + restricted.transpose()) * 0.5;
    let eig = restricted.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for i in order {
        let lam = eig.eigenvalues[i];
        if lam.abs() <= 1e-12 {
            continue;
        }
        let v: Vector = &basis * eig.eigenvectors.column(i) / lam.abs().sqrt();
        if lam < 0.0 {
            minus.push(v);
        } else {
            plus.push(v);
        }
    }
    (plus, minus)
}

fn random_combination(rng: &mut ChaCha8Rng, basis: &[Vector]) -> Vector {
    loop {
        let coeff: Vec<f64> = (0..basis.len())
            .map(|_| rng.random_range(-1.0..=1.0))
            .collect();
        let norm = coeff.iter().map(|c| c * c).sum::<f64>().sqrt();
        if norm < 1e-3 {
            continue;
        }
        let mut v = Vector::zeros(basis[0].len());
        for (c, b) in coeff.iter().zip(basis) {
            v.axpy(c / norm, b, 1.0);
        }
        return v;
    }
}

/// Random unit vector with `g(v,v) = sign` orthogonal to the orthonormal set
/// `used`. With `sign = None` the sign is drawn among the feasible ones.
pub(crate) fn random_unit_orthogonal(
    model: &ModelPoint,
    used: &Frame,
    sign: Option<Sign>,
    rng: &mut ChaCha8Rng,
) -> Result<(Vector, Sign)> {
    let (plus, minus) = complement(model, used);
    let sign = match sign {
        Some(s) => s,
        None => match (plus.is_empty(), minus.is_empty()) {
            (false, false) => {
                if rng.random_bool(0.5) {
                    Sign::Plus
                } else {
                    Sign::Minus
                }
            }
            (false, true) => Sign::Plus,
            (true, false) => Sign::Minus,
            (true, true) => {
                return Err(Error::UnsupportedSignature(
                    "no room left for another orthonormal vector".into(),
                ))
            }
        },
    };
    let (main, sec) = match sign {
        Sign::Plus => (plus, minus),
        Sign::Minus => (minus, plus),
    };
    if main.is_empty() {
        return Err(Error::UnsupportedSignature(format!(
            "no {sign:?} direction left in the complement"
        )));
    }
    let mut v = random_combination(rng, &main);
    if !sec.is_empty() {
        let t = rng.random_range(0.0..=MAX_MIX);
        let w = random_combination(rng, &sec);
        v.axpy(t, &w, 1.0);
        v /= (1.0 - t * t).sqrt();
    }
    Ok((v, sign))
}

struct Builder<'a> {
    model: &'a ModelPoint,
    used: Frame,
    rng: ChaCha8Rng,
    antiholomorphic: bool,
}

impl<'a> Builder<'a> {
    fn new(model: &'a ModelPoint, rng: ChaCha8Rng, antiholomorphic: bool) -> Self {
        Self {
            model,
            used: Frame::empty(),
            rng,
            antiholomorphic,
        }
    }

    /// Next orthonormal vector; in antiholomorphic mode it is also orthogonal
    /// to the `J`-images of everything drawn before.
    fn next(&mut self, sign: Option<Sign>) -> Result<Vector> {
        let (v, s) = random_unit_orthogonal(self.model, &self.used, sign, &mut self.rng)?;
        self.used.push(v.clone(), s);
        if self.antiholomorphic {
            let jv = self.model.apply_j(&v)?;
            self.used.push(jv, s);
        }
        Ok(v)
    }
}

/// Draw sample `index` of the stream `seed`.
pub fn sample_one(model: &ModelPoint, kind: PlaneKind, seed: u64, index: u64) -> Result<Sample> {
    kind.check_supported(model)?;
    let rng = stream_rng(seed, index);
    let anti = matches!(
        kind,
        PlaneKind::StronglyIsotropicAntiholomorphic
            | PlaneKind::WeaklyIsotropicAntiholomorphic
            | PlaneKind::IsotropicHolomorphic
            | PlaneKind::NondegenerateAntiholomorphic
            | PlaneKind::AntiholomorphicQuadruplePPMM
            | PlaneKind::AntiholomorphicPairPlusMinus
    );
    let mut b = Builder::new(model, rng, anti);
    let plane = |x: Vector, y: Vector| Plane::new(model, x, y).map(Sample::Plane);
    match kind {
        PlaneKind::Nondegenerate | PlaneKind::NondegenerateAntiholomorphic => {
            let x = b.next(None)?;
            let y = b.next(None)?;
            plane(x, y)
        }
        PlaneKind::NondegenerateHolomorphic => {
            let x = b.next(None)?;
            let jx = model.apply_j(&x)?;
            plane(x, jx)
        }
        PlaneKind::WeaklyIsotropic | PlaneKind::WeaklyIsotropicAntiholomorphic => {
            let x = b.next(Some(Sign::Plus))?;
            let a = b.next(Some(Sign::Minus))?;
            let y = b.next(None)?;
            plane(x + a, y)
        }
        PlaneKind::StronglyIsotropic | PlaneKind::StronglyIsotropicAntiholomorphic => {
            let x = b.next(Some(Sign::Plus))?;
            let a = b.next(Some(Sign::Minus))?;
            let y = b.next(Some(Sign::Plus))?;
            let bb = b.next(Some(Sign::Minus))?;
            plane(x + a, y + bb)
        }
        PlaneKind::IsotropicHolomorphic => {
            let x = b.next(Some(Sign::Plus))?;
            let a = b.next(Some(Sign::Minus))?;
            let xi = x + a;
            let jxi = model.apply_j(&xi)?;
            plane(xi, jxi)
        }
        PlaneKind::QuadruplePPMM | PlaneKind::AntiholomorphicQuadruplePPMM => {
            let x = b.next(Some(Sign::Plus))?;
            let y = b.next(Some(Sign::Plus))?;
            let a = b.next(Some(Sign::Minus))?;
            let bb = b.next(Some(Sign::Minus))?;
            let signs = vec![Sign::Plus, Sign::Plus, Sign::Minus, Sign::Minus];
            Ok(Sample::Frame(Frame::from_parts(vec![x, y, a, bb], signs)))
        }
        PlaneKind::PairPlusMinus | PlaneKind::AntiholomorphicPairPlusMinus => {
            let x = b.next(Some(Sign::Plus))?;
            let a = b.next(Some(Sign::Minus))?;
            Ok(Sample::Frame(Frame::from_parts(
                vec![x, a],
                vec![Sign::Plus, Sign::Minus],
            )))
        }
    }
}

/// `count` samples of `kind`, deterministic in `(model, kind, count, seed)`.
pub fn sample_planes(
    model: &ModelPoint,
    kind: PlaneKind,
    count: usize,
    seed: u64,
) -> Result<Vec<Sample>> {
    kind.check_supported(model)?;
    (0..count as u64)
        .map(|i| sample_one(model, kind, seed, i))
        .collect()
}

/// Random unit vector of the given sign, orthogonal to nothing in particular.
pub fn random_unit(model: &ModelPoint, sign: Sign, rng: &mut ChaCha8Rng) -> Result<Vector> {
    random_unit_orthogonal(model, &Frame::empty(), Some(sign), rng).map(|(v, _)| v)
}

/// Tolerance-free check that a sample belongs to its kind, used by tests and
/// by the CLI when replaying stored witnesses.
pub fn sample_matches(
    model: &ModelPoint,
    kind: PlaneKind,
    sample: &Sample,
    tol: Tolerance,
) -> Result<bool> {
    use crate::frames::{classify_holomorphy, classify_plane, Degeneracy, Holomorphy};
    match sample {
        Sample::Frame(f) => {
            let want: &[Sign] = match kind {
                PlaneKind::QuadruplePPMM | PlaneKind::AntiholomorphicQuadruplePPMM => {
                    &[Sign::Plus, Sign::Plus, Sign::Minus, Sign::Minus]
                }
                PlaneKind::PairPlusMinus | PlaneKind::AntiholomorphicPairPlusMinus => {
                    &[Sign::Plus, Sign::Minus]
                }
                _ => return Ok(false),
            };
            let mut ok = f.signs() == want && f.orthonormality_residual(model) <= tol.rel;
            if ok
                && matches!(
                    kind,
                    PlaneKind::AntiholomorphicQuadruplePPMM
                        | PlaneKind::AntiholomorphicPairPlusMinus
                )
            {
                for u in f.vectors() {
                    let ju = model.apply_j(u)?;
                    for v in f.vectors() {
                        ok &= model.g(&ju, v).abs() <= tol.rel * (1.0 + u.norm() * v.norm());
                    }
                }
            }
            Ok(ok)
        }
        Sample::Plane(p) => {
            let deg = classify_plane(model, p, tol);
            let want_deg = match kind {
                PlaneKind::WeaklyIsotropic | PlaneKind::WeaklyIsotropicAntiholomorphic => {
                    Degeneracy::WeaklyIsotropic
                }
                PlaneKind::StronglyIsotropic
                | PlaneKind::StronglyIsotropicAntiholomorphic
                | PlaneKind::IsotropicHolomorphic => Degeneracy::StronglyIsotropic,
                PlaneKind::Nondegenerate
                | PlaneKind::NondegenerateAntiholomorphic
                | PlaneKind::NondegenerateHolomorphic => Degeneracy::Nondegenerate,
                _ => return Ok(false),
            };
            if deg != want_deg {
                return Ok(false);
            }
            let want_hol = match kind {
                PlaneKind::WeaklyIsotropicAntiholomorphic
                | PlaneKind::StronglyIsotropicAntiholomorphic
                | PlaneKind::NondegenerateAntiholomorphic => Some(Holomorphy::Antiholomorphic),
                PlaneKind::IsotropicHolomorphic | PlaneKind::NondegenerateHolomorphic => {
                    Some(Holomorphy::Holomorphic)
                }
                _ => None,
            };
            match want_hol {
                Some(h) => Ok(classify_holomorphy(model, p, tol)? == h),
                None => Ok(true),
            }
        }
    }
}
