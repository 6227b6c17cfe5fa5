use exdual::harness::{reduce_boundary, DualityInstance, Reduced};
use exdual::mc::{draw_x_step, SeededStream};
use exdual::quad::{lhs_laplace, rhs_dual, x_chain_expectation, CoefficientChain, QuadSettings};
use exdual::{ArgGrid, ProcessKind, TimeGrid};

fn grids(s: &[f64], t: &[f64]) -> (ArgGrid, TimeGrid) {
    (ArgGrid::new(s.to_vec()).unwrap(), TimeGrid::new(t.to_vec()).unwrap())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn meander_two_times() {
    let (s, t) = grids(&[0.5, 1.5], &[0.3, 0.8]);
    let k = ProcessKind::bessel(1.0).unwrap();
    let st = QuadSettings::default();
    let l = lhs_laplace(&k, &s, &t, &st).unwrap();
    let r = rhs_dual(&k, &s, &t, &st).unwrap();
    assert!(rel(l.value, r.value) < 1e-6, "{} vs {}", l.value, r.value);
    assert!(l.error < 1e-6 && r.error < 1e-6);
}

#[test]
fn reduced_instance_has_the_same_value() {
    let st = QuadSettings::default();
    let cases = [
        (ProcessKind::Excursion, vec![1.0, 2.0], vec![0.0, 0.6]),
        (ProcessKind::Excursion, vec![0.4, 1.0, 2.0], vec![0.0, 0.5, 1.0]),
        (ProcessKind::bessel(1.0).unwrap(), vec![1.0, 2.0], vec![0.4, 1.0]),
        (ProcessKind::beta(2.0, 0.5).unwrap(), vec![0.5, 1.0, 2.0], vec![0.0, 0.3, 1.0]),
    ];
    for (kind, s, t) in cases {
        let inst = DualityInstance::from_vecs(kind.clone(), s, t, "").unwrap();
        let direct = rhs_dual(&kind, &inst.s, &inst.t, &st).unwrap().value;
        let direct_l = lhs_laplace(&kind, &inst.s, &inst.t, &st).unwrap().value;
        match reduce_boundary(&inst).unwrap() {
            Reduced::Instance(r) => {
                let v = rhs_dual(&kind, &r.s, &r.t, &st).unwrap().value;
                let vl = lhs_laplace(&kind, &r.s, &r.t, &st).unwrap().value;
                assert!(rel(v, direct) < 1e-6, "{kind}: {v} vs {direct}");
                assert!(rel(vl, direct_l) < 1e-6, "{kind}: {vl} vs {direct_l}");
            }
            Reduced::Exact { value } => assert!(rel(value, direct) < 1e-6),
        }
    }
}

#[test]
fn excursion_time_reversal_is_coherent() {
    let st = QuadSettings { rel_tol: 1e-11, ..Default::default() };
    for (s, t) in [(vec![0.7, 1.3], vec![0.25, 0.75]), (vec![0.5, 1.0, 2.0], vec![0.2, 0.5, 0.9])] {
        let inst = DualityInstance::from_vecs(ProcessKind::Excursion, s, t, "").unwrap();
        let rev = inst.time_reversed().unwrap();
        let a = lhs_laplace(&inst.kind, &inst.s, &inst.t, &st).unwrap().value;
        let b = lhs_laplace(&rev.kind, &rev.s, &rev.t, &st).unwrap().value;
        assert!(rel(a, b) < 1e-9, "{a} vs {b}");
        let ra = rhs_dual(&inst.kind, &inst.s, &inst.t, &st).unwrap().value;
        let rb = rhs_dual(&rev.kind, &rev.s, &rev.t, &st).unwrap().value;
        assert!(rel(ra, rb) < 1e-9, "{ra} vs {rb}");
    }
}

#[test]
fn chain_expectation_matches_simulation() {
    // E_1[exp(−0.1 X_0 − 0.25 X_{0.5} − 0.15 X_{1.2})] by backward recursion and by stepping X.
    let chain = CoefficientChain::new(vec![0.1, 0.25, 0.15], vec![0.5, 0.7]).unwrap();
    let q = x_chain_expectation(1.0, &chain, &QuadSettings::default()).unwrap();
    let mut rng = SeededStream::new(21, 0).rng();
    let n = 400_000;
    let (mut m, mut m2) = (0.0, 0.0);
    for _ in 0..n {
        let x1 = draw_x_step(&mut rng, 1.0, 0.5).unwrap();
        let x2 = draw_x_step(&mut rng, x1, 0.7).unwrap();
        let f = (-0.1 - 0.25 * x1 - 0.15 * x2).exp();
        m += f;
        m2 += f * f;
    }
    let mean = m / n as f64;
    let se = ((m2 / n as f64 - mean * mean) / n as f64).sqrt();
    assert!((mean - q).abs() < 4.0 * se, "{mean} ± {se} vs {q}");
}

#[test]
fn near_three_bessel_approaches_excursion() {
    let (s, t) = grids(&[0.7, 1.3], &[0.25, 0.75]);
    let st = QuadSettings::default();
    let e = rhs_dual(&ProcessKind::Excursion, &s, &t, &st).unwrap().value;
    let b = rhs_dual(&ProcessKind::bessel(2.999).unwrap(), &s, &t, &st).unwrap().value;
    assert!((e - b).abs() < 1e-2);
}

#[test]
fn meander_alias_is_bessel_one() {
    let (s, t) = grids(&[0.7, 1.3], &[0.25, 0.75]);
    let st = QuadSettings::default();
    let a: ProcessKind = "meander".parse().unwrap();
    let b = ProcessKind::bessel(1.0).unwrap();
    assert_eq!(rhs_dual(&a, &s, &t, &st).unwrap(), rhs_dual(&b, &s, &t, &st).unwrap());
}
