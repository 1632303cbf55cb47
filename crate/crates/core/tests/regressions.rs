//! Frozen results of the flagship scenario.

use num_complex::Complex64;

use duts_core::certificate::{verify, ConstructionCertificate};
use duts_core::construct::{construct, Caps, Problem};
use duts_core::runge::{joint_approximate, Tolerances};
use duts_core::sequence::SequenceSpec;
use duts_core::sets::{sample, SetSpec};
use duts_core::solver::SolverOptions;
use duts_core::target::TargetFunction;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn flagship(zeta0: Complex64) -> Problem {
    Problem {
        g: TargetFunction::zero(),
        l: sample(&SetSpec::disk(c(0.0, 0.0), 0.5), 20.0).unwrap(),
        f1: TargetFunction::constant(c(1.0, 0.0)),
        k1: sample(&SetSpec::disk(c(3.0, 0.0), 0.5), 20.0).unwrap(),
        f2: TargetFunction::identity(),
        k2: sample(&SetSpec::segment(c(0.0, 2.0), c(0.0, 3.0)), 40.0).unwrap(),
        zeta0,
        sequence: SequenceSpec::formula("n^2").unwrap(),
        tol: Tolerances::new(1e-2, 100).unwrap(),
        omega: Some(SetSpec::disk(c(0.0, 0.0), 1.0)),
    }
}

#[test]
fn flagship_runge_step() {
    let prob = flagship(c(0.0, 0.0));
    let r = joint_approximate(
        &prob.g,
        &prob.l,
        &prob.f1,
        &prob.k1,
        &prob.tol,
        prob.zeta0,
        2048,
        &SolverOptions::default(),
    )
    .unwrap();
    assert_eq!((r.schedule_degree, r.polynomial.degree()), (16, 15));
    assert!(r.error_l < 5e-3 && r.error_k1 < 5e-3);
}

#[test]
fn flagship_certificate() {
    let cert = construct(&flagship(c(0.0, 0.0)), &Caps::default()).unwrap();
    assert_eq!((cert.n0, cert.mu, cert.lambda_mu, cert.window_high), (4, 16, 256, 27));
    assert!(cert.residual_l < 1e-2 && cert.residual_k1 < 1e-2 && cert.residual_k2 < 1e-2);
    assert!(cert.identity_failure().is_none());

    let text = cert.to_text();
    let back = ConstructionCertificate::from_text(&text).unwrap();
    assert_eq!(back.to_text(), text);
    let report = verify(&back, 4.0);
    assert!(report.passed(), "{:?}", report.failures);
}

#[test]
fn residual_on_l_obeys_the_triangle_bound() {
    for zeta0 in [c(0.0, 0.0), c(0.2, 0.1)] {
        let prob = flagship(zeta0);
        let runge = joint_approximate(
            &prob.g,
            &prob.l,
            &prob.f1,
            &prob.k1,
            &prob.tol,
            zeta0,
            2048,
            &SolverOptions::default(),
        )
        .unwrap();
        let cert = construct(&prob, &Caps::default()).unwrap();
        assert!(cert.residual_l <= cert.window_error + runge.error_l + 1e-9);
    }
}

#[test]
fn shifted_center_certificate() {
    let cert = construct(&flagship(c(0.2, 0.1)), &Caps::default()).unwrap();
    assert_eq!((cert.n0, cert.mu, cert.window_high), (4, 16, 31));
    assert_eq!(cert.f.center(), c(0.2, 0.1));
    assert!(verify(&cert, 4.0).passed());
}

#[test]
fn construction_is_reproducible() {
    let a = construct(&flagship(c(0.0, 0.0)), &Caps::default()).unwrap().to_text();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let b = pool.install(|| construct(&flagship(c(0.0, 0.0)), &Caps::default()).unwrap().to_text());
    assert_eq!(a, b);
}
