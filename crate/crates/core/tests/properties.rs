mod common;

use common::*;
use isocurv::canonical::{build_conformally_flat, build_space_form, kaehler_space_form};
use isocurv::contract::kaehler_residual;
use isocurv::generate::{random_curvature_like, random_hybrid_symmetric, random_kaehler};
use isocurv::{
    bochner, conformal, conjugate, gram_schmidt_indefinite, phi, pi1, pi2, psi, sample_one,
    sample_planes, sectional_curvature, validate_curvature_like, vanishing_report, Bilinear,
    ModelPoint, Plane, PlaneKind, Sample, Tolerance, Vector,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn tol() -> Tolerance {
    Tolerance::default()
}

/// Metric rank of the plane, from a Euclidean-orthonormal basis of it.
fn oracle_rank(model: &ModelPoint, u: &Vector, v: &Vector) -> usize {
    let qr = DMatrix::from_columns(&[u.clone(), v.clone()]).qr();
    let q = qr.q();
    let gram = q.transpose() * model.metric() * &q;
    let eig = gram.symmetric_eigen();
    eig.eigenvalues.iter().filter(|l| l.abs() > 1e-9).count()
}

fn oracle_holomorphy(model: &ModelPoint, u: &Vector, v: &Vector) -> &'static str {
    let j = model.complex_structure().unwrap();
    let q = DMatrix::from_columns(&[u.clone(), v.clone()]).qr().q();
    let ju = j * q.column(0);
    let jv = j * q.column(1);
    let proj = &q * q.transpose();
    let off = (&ju - &proj * &ju).norm() + (&jv - &proj * &jv).norm();
    if off < 1e-9 {
        "holomorphic"
    } else if (u.transpose() * model.metric() * j * v)[0].abs() < 1e-9 * u.norm() * v.norm() {
        "antiholomorphic"
    } else {
        "generic"
    }
}

fn expected(kind: PlaneKind) -> (usize, Option<&'static str>) {
    match kind {
        PlaneKind::WeaklyIsotropic => (1, None),
        PlaneKind::StronglyIsotropic => (0, None),
        PlaneKind::StronglyIsotropicAntiholomorphic => (0, Some("antiholomorphic")),
        PlaneKind::WeaklyIsotropicAntiholomorphic => (1, Some("antiholomorphic")),
        PlaneKind::IsotropicHolomorphic => (0, Some("holomorphic")),
        PlaneKind::NondegenerateAntiholomorphic => (2, Some("antiholomorphic")),
        PlaneKind::Nondegenerate => (2, None),
        PlaneKind::NondegenerateHolomorphic => (2, Some("holomorphic")),
        _ => unreachable!("frame kind"),
    }
}

#[test]
fn sampled_planes_have_the_requested_type() {
    for (m, s) in [(6, 2), (8, 4), (8, 2)] {
        let model = ModelPoint::hermitian(m, s).unwrap();
        for kind in PlaneKind::ALL {
            if kind.check_supported(&model).is_err() {
                continue;
            }
            for smp in sample_planes(&model, kind, 1000, 17).unwrap() {
                match smp {
                    Sample::Plane(p) => {
                        let [u, v] = p.basis();
                        let (rank, hol) = expected(kind);
                        assert_eq!(oracle_rank(&model, u, v), rank, "{kind:?} on ({m},{s})");
                        if let Some(h) = hol {
                            assert_eq!(oracle_holomorphy(&model, u, v), h, "{kind:?} on ({m},{s})");
                        }
                        assert_eq!(
                            isocurv::classify_plane(&model, &p, tol()).label(),
                            match rank {
                                0 => "strongly isotropic",
                                1 => "weakly isotropic",
                                _ => "nondegenerate",
                            }
                        );
                    }
                    Sample::Frame(f) => {
                        assert!(f.orthonormality_residual(&model) < 1e-12, "{kind:?}");
                        let minus = f.negatives();
                        assert_eq!(minus * 2, f.len(), "{kind:?}");
                    }
                }
            }
        }
    }
}

#[test]
fn real_kinds_on_odd_dimensions() {
    let model = ModelPoint::new(5, 2).unwrap();
    for kind in [
        PlaneKind::WeaklyIsotropic,
        PlaneKind::StronglyIsotropic,
        PlaneKind::Nondegenerate,
    ] {
        for smp in sample_planes(&model, kind, 1000, 3).unwrap() {
            let [u, v] = smp.plane().unwrap().basis();
            assert_eq!(oracle_rank(&model, u, v), expected(kind).0);
        }
    }
}

#[test]
fn space_forms_are_fixed_by_conjugation() {
    for (m, s) in [(4, 2), (6, 2), (8, 4)] {
        let model = ModelPoint::hermitian(m, s).unwrap();
        for (nu, mu) in [(0.3, -1.0), (2.0, 2.0), (-0.7, 4.0)] {
            let t = build_space_form(&model, nu, mu).unwrap();
            assert!(rel_err_tensor(&conjugate(&model, &t).unwrap(), &t) < 1e-14);
        }
    }
}

#[test]
fn kaehler_space_forms_are_kaehler_and_bochner_flat() {
    for (m, s) in [(6, 2), (8, 4)] {
        let model = ModelPoint::hermitian(m, s).unwrap();
        for mu in [-2.0, 1.0, 5.0] {
            let t = kaehler_space_form(&model, mu).unwrap();
            assert!(kaehler_residual(&model, &t).unwrap() < 1e-14);
            assert!(bochner(&model, &t).unwrap().tensor.max_abs() / t.scale() <= 1e-9);
            let ricci = oracle_ricci(&model, &t);
            let lambda = (m as f64 / 2.0 + 1.0) * mu / 2.0;
            assert!(rel_err(&ricci, &(model.metric() * lambda)) < 1e-13);
        }
    }
}

fn signature() -> impl Strategy<Value = (usize, usize)> {
    (4usize..=7).prop_flat_map(|m| (Just(m), 1..m))
}

fn hermitian_signature() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![
        Just((4, 2)),
        Just((6, 2)),
        Just((6, 4)),
        Just((8, 4)),
        Just((8, 2))
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn ricci_of_phi((m, s) in signature(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let model = random_model(m, s, false, &mut r);
        let sym = random_sym(m, &mut r);
        let t = phi(&model, &Bilinear::symmetric(sym.clone(), tol()).unwrap()).unwrap();
        let trace = model.metric_inv().component_mul(&sym).sum();
        let want = &sym * (m as f64 - 2.0) + model.metric() * trace;
        prop_assert!(rel_err(&oracle_ricci(&model, &t), &want) < 1e-11);
        prop_assert!(validate_curvature_like(&t, tol()).verdict);
    }

    #[test]
    fn conformal_tensor_is_trace_free_and_idempotent((m, s) in signature(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let model = random_model(m, s, false, &mut r);
        let t = random_curvature_like(m, &mut r);
        let c = conformal(&model, &t).unwrap();
        prop_assert!(oracle_ricci(&model, &c).amax() / t.scale() < 1e-12);
        prop_assert!(rel_err_tensor(&conformal(&model, &c).unwrap(), &c) < 1e-12);
        prop_assert!(validate_curvature_like(&c, tol()).verdict);
    }

    #[test]
    fn model_tensors_are_curvature_like((m, s) in hermitian_signature(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let model = random_model(m, s, true, &mut r);
        for t in [pi1(&model), pi2(&model).unwrap()] {
            prop_assert!(validate_curvature_like(&t, tol()).verdict);
        }
        let h = random_hybrid_symmetric(&model, &mut r).unwrap();
        prop_assert!(validate_curvature_like(&psi(&model, &h).unwrap(), tol()).verdict);
        if m >= 6 {
            let k = random_kaehler(&model, &mut r).unwrap();
            let b = bochner(&model, &k).unwrap().tensor;
            prop_assert!(validate_curvature_like(&b, tol()).verdict);
            prop_assert!(kaehler_residual(&model, &b).unwrap() < 1e-9);
            let rho_b = oracle_ricci(&model, &b);
            prop_assert!(rho_b.amax() / k.scale() < 1e-10);
        }
    }

    #[test]
    fn sectional_curvature_ignores_the_basis(
        (m, s) in signature(),
        seed in any::<u64>(),
        a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0, d in -2.0f64..2.0,
    ) {
        prop_assume!((a * d - b * c).abs() > 0.1);
        let mut r = rng(seed);
        let model = ModelPoint::new(m, s).unwrap();
        let t = random_curvature_like(m, &mut r);
        let smp = sample_one(&model, PlaneKind::Nondegenerate, seed, 0).unwrap();
        let [x, y] = smp.plane().unwrap().basis().clone();
        let k0 = sectional_curvature(&model, &t, &Plane::new(&model, x.clone(), y.clone()).unwrap(), tol()).unwrap();
        let p1 = Plane::new(&model, &x * a + &y * b, &x * c + &y * d).unwrap();
        let k1 = sectional_curvature(&model, &t, &p1, tol()).unwrap();
        prop_assert!((k0 - k1).abs() <= 1e-9 * k0.abs().max(1.0));
    }

    #[test]
    fn gram_schmidt_respects_sylvester((m, s) in signature(), seed in any::<u64>()) {
        let mut r = rng(seed);
        let model = random_model(m, s, false, &mut r);
        let vectors: Vec<Vector> = (0..m).map(|_| random_matrix(m, &mut r).column(0).into_owned()).collect();
        let frame = gram_schmidt_indefinite(&model, &vectors, tol()).unwrap();
        prop_assert_eq!(frame.len(), m);
        prop_assert_eq!(frame.negatives(), s);
        prop_assert!(frame.orthonormality_residual(&model) < 1e-9);
    }

    #[test]
    fn witnesses_replay_and_maxima_grow(seed in any::<u64>(), count in 1usize..200) {
        let model = ModelPoint::new(4, 2).unwrap();
        let mut r = rng(seed);
        let t = build_conformally_flat(&model, &Bilinear::symmetric(random_sym(4, &mut r), tol()).unwrap()).unwrap();
        let small = vanishing_report(&model, &t, PlaneKind::WeaklyIsotropic, count, seed, tol()).unwrap();
        let large = vanishing_report(&model, &t, PlaneKind::WeaklyIsotropic, 2 * count, seed, tol()).unwrap();
        prop_assert!(large.max_residual >= small.max_residual);
        if let Some(v) = small.replay(&model, &t).unwrap() {
            prop_assert_eq!(v, small.max_residual);
        }
        prop_assert_eq!(small.witness.is_some(), !small.verdict);
    }
}
