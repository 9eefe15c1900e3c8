//! Documented examples for the verifier: μ, λ, SU(3) frames, the structure
//! equations, the Einstein check, single identities and classification.

use std::f64::consts::SQRT_2;

use nk6::connection::Connection;
use nk6::exterior6::KForm;
use nk6::geometry::{adapted_frame, backend_flat_kahler, backend_perturbed, backend_s6, AlmostHermitianBackend};
use nk6::verify::sampling::{sample_points, stream_rng};
use nk6::verify::{
    build_su3_frame, check_einstein, check_pde_pair, classify_gray_hervella_w1, estimate_lambda,
    estimate_mu, mu_bracket, run_identity, ClassLabel, IdentityId, Verifier,
};

const SEED: u64 = 7;

fn id(n: u8) -> IdentityId {
    IdentityId::new(n).expect("registered")
}

#[test]
fn mu_examples() {
    let flat = backend_flat_kahler();
    let m = estimate_mu(&Connection::new(&flat), &sample_points(&flat, 10, SEED), SEED).unwrap();
    assert_eq!((m.value, m.spread), (0.0, 0.0));

    let s6 = backend_s6();
    let conn = Connection::new(&s6);
    let m = estimate_mu(&conn, &sample_points(&s6, 20, SEED), SEED).unwrap();
    assert!((m.value - 1.0).abs() < 1e-5 && m.spread < 1e-5, "{m:?}");

    let p = &sample_points(&s6, 1, SEED)[0];
    let q = p.ambient();
    let x = s6.random_unit_tangent(q, &mut stream_rng(SEED, 0, 0));
    let jx = s6.j(q, &x);
    assert!(mu_bracket(&conn, q, &x, &jx).abs() < 1e-10);
    assert!(conn.nabla_j(q, &x, &jx).norm() < 1e-10);
    // σ(X, JX) = g(JX, JX) saturates the bracket
    assert!((s6.sigma(q, &x, &jx) - 1.0).abs() < 1e-12);
}

#[test]
fn su3_frame_examples() {
    let b = backend_s6();
    let conn = Connection::new(&b);
    let model = nk6::exterior6::model_su3_forms();
    for (i, p) in sample_points(&b, 10, SEED).iter().enumerate() {
        let su3 = build_su3_frame(&conn, &adapted_frame(&b, p, i as u64).unwrap()).unwrap();
        let psi = KForm::<f64>::from(&model.psi_plus);
        assert!((&su3.psi_plus - &psi).max_abs() < 1e-12);
        assert!(su3.sigma.wedge(&su3.psi_plus).unwrap().max_abs() < 1e-12);
        let s3 = su3.sigma.wedge(&su3.sigma).unwrap().wedge(&su3.sigma).unwrap();
        let lhs = su3.psi_plus.wedge(&su3.psi_minus).unwrap();
        assert!((&lhs - &s3.scale(2.0 / 3.0)).max_abs() < 1e-12);
        assert!((su3.psi_plus.inner(&su3.psi_plus) - 4.0).abs() < 1e-12);
        assert!((&su3.psi_plus.j_action().unwrap() - &su3.psi_plus.scale(-3.0)).max_abs() < 1e-12);
        assert!((&su3.psi_plus.j_last_slot() + &su3.psi_minus).max_abs() < 1e-12);
    }
}

#[test]
fn lambda_examples() {
    let flat = backend_flat_kahler();
    let cf = Connection::new(&flat);
    let p = &sample_points(&flat, 1, SEED)[0];
    let su3 = build_su3_frame(&cf, &adapted_frame(&flat, p, 0).unwrap()).unwrap();
    assert_eq!(estimate_lambda(&cf, &su3).value().norm(), 0.0);

    let s6 = backend_s6();
    let points = sample_points(&s6, 20, SEED);
    let v = Verifier::new(Connection::new(&s6), SEED);
    let l = v.lambda_summary(&points).unwrap();
    assert!(l.re.abs() < 1e-4 && (l.im + SQRT_2).abs() < 1e-4, "{l:?}");
    assert!(l.spread < 1e-4);
    // |λ| is frame independent
    let conn = Connection::new(&s6);
    let norms: Vec<f64> = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let su3 = build_su3_frame(&conn, &adapted_frame(&s6, p, i as u64).unwrap()).unwrap();
            estimate_lambda(&conn, &su3).value().norm()
        })
        .collect();
    let spread = norms.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - norms.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread < 1e-4);
}

#[test]
fn pde_examples() {
    let s6 = backend_s6();
    let (ds, dp) = check_pde_pair(&s6, &sample_points(&s6, 20, SEED)).unwrap();
    assert!(ds.max_residual < 1e-4 && dp.max_residual < 1e-4);
    assert_eq!((ds.id.as_str(), dp.id.as_str()), ("pde.dsigma", "pde.dpsi_minus"));

    let flat = backend_flat_kahler();
    let (ds, dp) = check_pde_pair(&flat, &sample_points(&flat, 5, SEED)).unwrap();
    assert!(ds.max_residual < 1e-12 && dp.max_residual < 1e-12);
}

#[test]
fn einstein_examples() {
    let s6 = backend_s6();
    let e = check_einstein(&s6, &sample_points(&s6, 20, SEED)).unwrap();
    assert!(e.report.pass);
    assert!((e.scalar_curvature - 30.0).abs() < 1e-3);
    assert!(e.ric_metric < 1e-4);

    let flat = backend_flat_kahler();
    let e = check_einstein(&flat, &sample_points(&flat, 5, SEED)).unwrap();
    assert_eq!((e.ric_difference, e.ric_ratio, e.ric_metric), (0.0, 0.0, 0.0));
    assert_eq!(e.scalar_curvature, 0.0);
}

#[test]
fn run_identity_examples() {
    let flat = backend_flat_kahler();
    let r = run_identity(id(8), &flat, &sample_points(&flat, 10, SEED), SEED).unwrap();
    assert_eq!(r.max_residual, 0.0);
    assert!(r.pass);

    let s6 = backend_s6();
    let r = run_identity(id(15), &s6, &sample_points(&s6, 20, SEED), SEED).unwrap();
    assert!(r.pass && r.max_residual < 1e-4);

    assert!(matches!(IdentityId::new(33), Err(nk6::Error::UnknownIdentity(k)) if k == "I33"));
    assert!(IdentityId::new(0).is_err());
    assert!("I33".parse::<IdentityId>().is_err());
    assert_eq!("i7".parse::<IdentityId>().unwrap(), id(7));
}

#[test]
fn every_identity_passes_on_sphere_and_flat_space() {
    let s6 = backend_s6();
    let flat = backend_flat_kahler();
    let backends: [&dyn AlmostHermitianBackend; 2] = [&s6, &flat];
    for b in backends {
        let points = sample_points(b, 8, SEED);
        let v = Verifier::new(Connection::new(b), SEED);
        for i in IdentityId::all() {
            let r = v.run_identity(i, &points).unwrap();
            assert!(r.pass, "{r:?}");
            assert_eq!(r.tol, v.tolerances().get(i.tier()));
        }
    }
}

#[test]
fn classification_examples() {
    let flat = backend_flat_kahler();
    let s6 = backend_s6();
    let ell = backend_perturbed(0.1).unwrap();
    let label = |b: &dyn AlmostHermitianBackend| classify_gray_hervella_w1(b, &sample_points(b, 8, SEED)).unwrap().label;
    assert_eq!(label(&flat), ClassLabel::Kahler);
    assert_eq!(label(&s6), ClassLabel::NearlyKahler);
    assert_eq!(label(&ell), ClassLabel::Other);
}

/// Largest residuals on the ellipsoid with `δ = 0.1`, 10 points, seed 7,
/// recorded from the first run of this suite.
mod negative_control {
    use super::*;

    fn close(actual: f64, golden: f64) -> bool {
        (actual - golden).abs() <= 1e-6 * golden.abs()
    }

    fn perturbed_points() -> (nk6::geometry::Ellipsoid, Vec<nk6::geometry::ManifoldPoint>) {
        let b = backend_perturbed(0.1).unwrap();
        let p = sample_points(&b, 10, SEED);
        (b, p)
    }

    #[test]
    fn identity_residuals() {
        let (b, points) = perturbed_points();
        let v = Verifier::new(Connection::new(&b), SEED);
        for (n, golden) in GOLDEN_IDENTITIES {
            let r = v.run_identity(id(n), &points).unwrap();
            assert!(!r.pass, "{r:?}");
            assert!(close(r.max_residual, golden), "I{n}: {} vs {golden}", r.max_residual);
        }
    }

    #[test]
    fn pde_and_einstein_residuals() {
        let (b, points) = perturbed_points();
        let (ds, dp) = check_pde_pair(&b, &points).unwrap();
        let e = check_einstein(&b, &points).unwrap();
        assert!(ds.max_residual.max(dp.max_residual) > 1e-2);
        assert!(e.ric_difference > e.report.tol);
        assert!(close(ds.max_residual, GOLDEN_PDE.0));
        assert!(close(dp.max_residual, GOLDEN_PDE.1));
        assert!(close(e.ric_difference, GOLDEN_RIC_DIFFERENCE));
    }

    #[test]
    fn nearly_kahler_defect() {
        let (b, points) = perturbed_points();
        let conn = Connection::new(&b);
        let worst = points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let q = p.ambient();
                let x = b.random_unit_tangent(q, &mut stream_rng(SEED, 0, i as u64));
                conn.nabla_j(q, &x, &x).norm()
            })
            .fold(0.0, f64::max);
        assert!(worst > 1e-3);
        assert!(close(worst, GOLDEN_DEFECT));
    }

    const GOLDEN_IDENTITIES: [(u8, f64); 6] = [
        (3, 0.0908521882230043),
        (5, 0.13624896386423824),
        (15, 0.22465001809944773),
        (16, 0.07745615150804619),
        (24, 0.28862249454376454),
        (28, 0.19718842102179268),
    ];
    const GOLDEN_PDE: (f64, f64) = (0.13848060888608613, 0.2078777709924955);
    const GOLDEN_RIC_DIFFERENCE: f64 = 0.23603124072466447;
    const GOLDEN_DEFECT: f64 = 0.07554251916186305;
}
