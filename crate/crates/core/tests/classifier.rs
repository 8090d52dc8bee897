mod common;

use kantorovich::classify::{Certificate, NECESSARY_KAPPA, THREE_DIM_KAPPA};
use kantorovich::{classify, falsify, Falsifier, MatrixSpec, SamplePlan, Status};
use rand::Rng;

#[test]
fn convex_verdicts_survive_ten_times_the_budget() {
    let plan = SamplePlan::default();
    for (n, kappa_max) in [(2, 8.0), (3, 5.0), (4, 4.5)] {
        let big = Falsifier::new(n, &plan.scaled(n, 10));
        let mut r = common::rng(100 + n as u64);
        let mut convex = 0;
        for _ in 0..200 {
            let kappa = r.gen_range(1.0..kappa_max);
            let spec = common::random_spd(&mut r, n, kappa);
            let v = classify(&spec, &plan).unwrap();
            match v.status {
                Status::Convex => {
                    convex += 1;
                    assert!(big.find_witness(&spec).unwrap().is_none(), "n={n} κ={}", spec.kappa);
                }
                Status::NotConvex => {
                    let w = v.certificate.witness().expect("NotConvex carries a witness here");
                    assert!(w.revalidate(&spec, plan.eps_psd).unwrap());
                }
                Status::Undetermined => assert!(n >= 3),
            }
        }
        assert!(convex > 20, "n={n}: only {convex} convex cases");
    }
}

#[test]
fn two_dim_verdict_matches_pure_falsification() {
    let plan = SamplePlan::default();
    let falsifier = Falsifier::new(2, &plan);
    let mut r = common::rng(200);
    let mut checked = 0;
    while checked < 500 {
        let kappa = r.gen_range(1.0..12.0);
        if (kappa - NECESSARY_KAPPA).abs() < 1e-6 {
            continue;
        }
        let spec = common::random_spd(&mut r, 2, kappa);
        let status = classify(&spec, &plan).unwrap().status;
        let witness = falsifier.find_witness(&spec).unwrap();
        assert_eq!(status == Status::NotConvex, witness.is_some(), "κ = {}", spec.kappa);
        assert_ne!(status, Status::Undetermined);
        checked += 1;
    }
}

#[test]
fn diagonal_family_flips_once() {
    let plan = SamplePlan::default();
    let mut flips = 0;
    let mut prev = Status::Convex;
    let mut flip_at = 0.0;
    for k in 0..=2000 {
        let t = 1.0 + 11.0 * k as f64 / 2000.0;
        let s = classify(&MatrixSpec::from_eigenvalues(&[1.0, t]).unwrap(), &plan).unwrap().status;
        if s != prev {
            flips += 1;
            flip_at = t;
            prev = s;
        }
    }
    assert_eq!(flips, 1);
    assert!(flip_at > NECESSARY_KAPPA && flip_at - NECESSARY_KAPPA < 11.0 / 2000.0 + 1e-12);
}

#[test]
fn gap_matrix_is_never_convex() {
    let spec = MatrixSpec::from_eigenvalues(&[1.0, 2.0, 4.5]).unwrap();
    let v = classify(&spec, &SamplePlan::default()).unwrap();
    assert_ne!(v.status, Status::Convex);
    if let Certificate::SamplingExhausted(report) = &v.certificate {
        assert!(report.passed);
        assert_eq!(report.samples, 100_006);
    }
}

#[test]
fn certificates_cite_the_right_threshold() {
    let plan = SamplePlan::default();
    let c = |l: &[f64]| classify(&MatrixSpec::from_eigenvalues(l).unwrap(), &plan).unwrap();

    assert_eq!(c(&[1.0, 1.0]).certificate, Certificate::TwoDimExact);
    assert_eq!(c(&[1.0, 1.0, 1.0]).certificate, Certificate::ThreeDimSufficient);
    assert_eq!(c(&[1.0, 1.0, 1.0, 1.0]).certificate, Certificate::GeneralSufficient);
    assert_eq!(c(&[1.0, 2.0, THREE_DIM_KAPPA]).status, Status::Convex);
    // Above √(5+2√6) in four dimensions no threshold applies.
    assert!(matches!(
        c(&[1.0, 1.5, 2.0, 3.3]).certificate,
        Certificate::WitnessFound(_) | Certificate::SamplingExhausted(_)
    ));

    let v = c(&[1.0, 1.0, 7.0]);
    match v.certificate {
        Certificate::NecessaryViolated { pair, quad_value, witness } => {
            assert_eq!(pair, (0, 2));
            assert!(quad_value < 0.0);
            assert!(witness.is_some());
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn witnesses_map_back_through_the_rotation() {
    let mut r = common::rng(300);
    let plan = SamplePlan::with_samples(5000);
    for n in 2..=5 {
        let spec = common::random_spd(&mut r, n, 9.0);
        let w = falsify(&spec, &plan).unwrap().expect("κ = 9 is not convex");
        assert!(w.revalidate(&spec, plan.eps_psd).unwrap());
        assert!((w.point.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let spec = MatrixSpec::from_eigenvalues(&[1.0, 1.7, 2.4, 5.5]).unwrap();
    let plan = SamplePlan::default();
    let a = classify(&spec, &plan).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let b = pool.install(|| classify(&spec, &plan).unwrap());
    assert_eq!(a, b);
}
