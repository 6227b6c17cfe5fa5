use exdual::harness::{
    battery, random_instance, verify, DualityInstance, HarnessSettings, KindFamily, Methods, VerificationReport,
};
use exdual::mc::SeededStream;
use exdual::{Method, ProcessKind};

fn inst(kind: ProcessKind, s: &[f64], t: &[f64]) -> DualityInstance {
    DualityInstance::from_vecs(kind, s.to_vec(), t.to_vec(), "test").unwrap()
}

#[test]
fn documented_examples_pass() {
    let hs = HarnessSettings::default();
    let cases = [
        inst(ProcessKind::Excursion, &[1.0], &[0.5]),
        inst(ProcessKind::Excursion, &[3.7], &[1.0]),
        inst(ProcessKind::bessel(1.0).unwrap(), &[0.5, 1.5], &[0.3, 0.8]),
    ];
    for c in &cases {
        let r = verify(c, Methods::QUAD, &hs, 0, SeededStream::new(0, 0)).unwrap();
        assert!(r.passed(), "{:?}: {:?}", c, r.verdict);
    }
    let endpoint = verify(&cases[1], Methods::QUAD, &hs, 0, SeededStream::new(0, 0)).unwrap();
    assert!((endpoint.lhs_quad.unwrap().value - 1.0).abs() < 1e-12);
    assert!((endpoint.rhs_quad.unwrap().value - 1.0).abs() < 1e-8);
}

#[test]
fn random_quadrature_battery_every_kind() {
    let hs = HarnessSettings::default();
    for (f, fam) in KindFamily::ALL.iter().enumerate() {
        let instances: Vec<DualityInstance> =
            (0..50).map(|i| random_instance(SeededStream::new(100 + f as u64, i), 3, &[*fam]).unwrap()).collect();
        for r in battery(&instances, Methods::QUAD, &hs, 0, SeededStream::new(0, 0)) {
            let r = r.unwrap();
            assert!(r.passed(), "{:?}: {:?}", r.instance, r.verdict);
        }
    }
}

#[test]
fn failing_threshold_gives_fail_verdict() {
    let hs = HarnessSettings { quad_threshold: 1e-30, ..Default::default() };
    let r = verify(&inst(ProcessKind::Excursion, &[0.7, 1.3], &[0.25, 0.75]), Methods::QUAD, &hs, 0, SeededStream::new(0, 0))
        .unwrap();
    assert!(!r.passed());
    assert_eq!(r.verdict.reasons.len(), 1);
}

#[test]
fn reports_round_trip_through_json() {
    let r = verify(&inst(ProcessKind::beta(2.0, 0.5).unwrap(), &[1.0], &[0.5]), Methods::BOTH, &HarnessSettings::default(), 2_000, SeededStream::new(8, 1))
        .unwrap();
    let json = serde_json::to_string(&r).unwrap();
    let back: VerificationReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, r);
    assert_eq!(r.lhs_quad.unwrap().method, Method::Quadrature);
}

#[test]
fn battery_is_order_independent() {
    let a = inst(ProcessKind::Excursion, &[1.0], &[0.5]);
    let b = inst(ProcessKind::bessel(2.0).unwrap(), &[0.5, 1.0], &[0.2, 0.7]);
    let hs = HarnessSettings::default();
    let base = SeededStream::new(12, 0);
    let both = battery(&[a.clone(), b.clone()], Methods::MC, &hs, 5_000, base);
    let first = verify(&a, Methods::MC, &hs, 5_000, exdual::harness::battery_stream(base, 0)).unwrap();
    let second = verify(&b, Methods::MC, &hs, 5_000, exdual::harness::battery_stream(base, 1)).unwrap();
    assert_eq!(both[0].as_ref().unwrap(), &first);
    assert_eq!(both[1].as_ref().unwrap(), &second);
}

#[test]
fn evaluator_errors_name_the_side() {
    let corner = inst(ProcessKind::beta(0.5, 0.4).unwrap(), &[1.0, 2.0], &[0.0, 0.5]);
    let e = verify(&corner, Methods::MC, &HarnessSettings::default(), 1000, SeededStream::new(0, 0)).unwrap_err();
    assert!(e.to_string().contains("rhs_mc"), "{e}");
}
