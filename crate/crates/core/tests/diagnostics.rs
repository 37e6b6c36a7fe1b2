use std::time::Instant;

use num_complex::Complex64;
use o2cocycle::base::{BasePoint, BaseSystem};
use o2cocycle::diagnostics::*;
use o2cocycle::o2::{CocycleGenerator, O2Element, TablePiece};
use o2cocycle::scalar::{Scalar, TorusValue};
use o2cocycle::skew::{FibreKind, FibrePoint, SkewPoint, SkewSystem};

fn eta() -> f64 {
    2f64.sqrt() - 1.0
}

fn circle_system(g: CocycleGenerator, fibre: FibreKind) -> SkewSystem {
    SkewSystem::new(BaseSystem::rotation(eta()), g, fibre).unwrap()
}

fn start(x: f64, y: f64) -> SkewPoint {
    SkewPoint::new(
        BasePoint::Circle(TorusValue::new(x)),
        FibrePoint::Torus(TorusValue::new(y)),
    )
}

#[test]
fn constant_observable_averages_to_one() {
    let s = circle_system(CocycleGenerator::Example1, FibreKind::Torus);
    let avg = birkhoff_average(&s, &Observable::Constant, &start(0.2, 0.3), 1000).unwrap();
    assert_eq!(avg, Complex64::new(1.0, 0.0));
    assert!(birkhoff_average(&s, &Observable::Constant, &start(0.2, 0.3), 0).is_err());
}

#[test]
fn cex1_third_character_is_invariant() {
    let s = circle_system(CocycleGenerator::Cex1, FibreKind::Torus);
    let obs = Observable::TorusCharacter { j: 0, k: 3 };
    for (x, y) in [(0.1, 0.2), (0.5, 0.77), (0.9, 0.01)] {
        let avg = birkhoff_average(&s, &obs, &start(x, y), 10_000).unwrap();
        assert!((avg.norm() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn example1_fibre_character_decays() {
    let s = circle_system(CocycleGenerator::Example1, FibreKind::Torus);
    let obs = Observable::TorusCharacter { j: 0, k: 1 };
    let avg = birkhoff_average(&s, &obs, &start(0.31, 0.47), 1_000_000).unwrap();
    assert!(avg.norm() <= 0.05, "{avg}");
}

#[test]
fn default_bank_is_centred() {
    for fibre in [
        FibreKind::Torus,
        FibreKind::Z2,
        FibreKind::Z3,
        FibreKind::Sphere,
    ] {
        let s = circle_system(CocycleGenerator::Cex1, fibre);
        let bank = default_bank(&s);
        assert!(!bank.is_empty());
        assert!(bank
            .iter()
            .all(|o| o.space_average() == Complex64::new(0.0, 0.0)));
    }
    let s = circle_system(CocycleGenerator::Example1, FibreKind::Torus);
    let bank = default_bank(&s);
    assert_eq!(bank.len(), 120 + 6);
}

#[test]
fn cex1_scan_finds_the_third_character() {
    let s = circle_system(CocycleGenerator::Cex1, FibreKind::Torus);
    let r = default_scan(&s, 8, 100_000, 7).unwrap();
    assert_eq!(r.verdict, Verdict::NonErgodicDetected);
    assert_eq!(r.witness.as_deref(), Some("torus(j=0,k=3)"));
    assert_eq!(r.status, "heuristic");
}

#[test]
fn cex1_rotation_fibre_conserves_the_sign() {
    let r = default_scan(
        &circle_system(CocycleGenerator::Cex1, FibreKind::Z2),
        8,
        100_000,
        7,
    )
    .unwrap();
    assert_eq!(r.verdict, Verdict::NonErgodicDetected);
    assert_eq!(r.witness.as_deref(), Some("z2(j=0,s=-)"));
}

#[test]
fn cex1_thirds_factor_looks_ergodic() {
    let r = default_scan(
        &circle_system(CocycleGenerator::Cex1, FibreKind::Z3),
        16,
        1_000_000,
        7,
    )
    .unwrap();
    assert_eq!(
        r.verdict,
        Verdict::ErgodicConsistent,
        "{}",
        r.max_deviation()
    );
}

#[test]
fn cex2_scan_finds_the_reflection_invariant_cosine() {
    let s = SkewSystem::new(
        BaseSystem::Bernoulli,
        CocycleGenerator::Cex2,
        FibreKind::Torus,
    )
    .unwrap();
    let r = default_scan(&s, 8, 50_000, 3).unwrap();
    assert_eq!(r.verdict, Verdict::NonErgodicDetected);
    assert_eq!(r.witness.as_deref(), Some("fibre_cos(k=3)"));
}

#[test]
fn example1_scan_is_ergodic_consistent() {
    let t = Instant::now();
    let s = circle_system(CocycleGenerator::Example1, FibreKind::Torus);
    let r = default_scan(&s, 16, 1_000_000, 11).unwrap();
    assert!(t.elapsed().as_secs() < 180);
    assert_eq!(r.verdict, Verdict::ErgodicConsistent);
}

#[test]
fn scans_are_deterministic() {
    let s = circle_system(CocycleGenerator::Example1, FibreKind::Torus);
    let a = default_scan(&s, 8, 2000, 5).unwrap();
    let b = default_scan(&s, 8, 2000, 5).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    let c = default_scan(&s, 8, 2000, 6).unwrap();
    assert_ne!(a, c);
}

#[test]
fn too_few_starts_is_rejected() {
    let s = circle_system(CocycleGenerator::Example1, FibreKind::Torus);
    assert!(default_scan(&s, 0, 100, 1).is_err());
    assert!(default_scan(&s, 7, 100, 1).is_err());
}

#[test]
fn exact_witnesses_keep_their_start_value() {
    let s = circle_system(CocycleGenerator::Cex1, FibreKind::Torus);
    let r = default_scan(&s, 8, 20_000, 9).unwrap();
    let starts = sample_starts(&s, 8, 9);
    for o in r
        .observables
        .iter()
        .filter(|o| o.invariance_residual <= 1e-12)
    {
        for (avg, p) in o.averages.iter().zip(&starts) {
            let v = o.observable.eval(p).unwrap();
            assert!(
                (Complex64::new(avg[0], avg[1]) - v).norm() <= 1e-10,
                "{}",
                o.label
            );
        }
    }
}

#[test]
fn classification_is_a_function_of_the_numbers() {
    let s = circle_system(CocycleGenerator::Cex1, FibreKind::Torus);
    let r = default_scan(&s, 8, 5000, 2).unwrap();
    let (v, w) = classify(&r.observables, &r.thresholds);
    assert_eq!(v, r.verdict);
    assert_eq!(w.map(|i| r.observables[i].label.clone()), r.witness);
}

fn identity_system() -> SkewSystem {
    let g = CocycleGenerator::table(vec![TablePiece {
        start: Scalar::ZERO,
        element: O2Element::IDENTITY,
    }])
    .unwrap();
    SkewSystem::new(BaseSystem::rotation(Scalar::ZERO), g, FibreKind::Torus).unwrap()
}

#[test]
fn ulam_of_identity_is_identity() {
    let m = ulam_discretize(&identity_system(), 7, 5, 16).unwrap();
    for (i, row) in m.rows.iter().enumerate() {
        assert_eq!(row, &vec![(i, 1.0)]);
    }
    let support = invariant_vector_support(&m, 1e-12);
    assert!(support.degenerate);
    assert_eq!(support.cells.len(), 1);
}

fn in_b1(iy: usize) -> bool {
    iy % 20 < 10
}

#[test]
fn ulam_detects_the_cex1_set() {
    let t = Instant::now();
    let m = ulam_discretize(
        &circle_system(CocycleGenerator::Cex1, FibreKind::Torus),
        60,
        60,
        64,
    )
    .unwrap();
    assert!(m.row_sums().iter().all(|s| (s - 1.0).abs() <= 1e-12));
    let uniform = vec![1.0; m.cells()];
    assert!(m
        .pushforward(&uniform)
        .iter()
        .all(|s| (s - 1.0).abs() <= 1e-12));
    let b: Vec<f64> = (0..m.cells())
        .map(|c| if in_b1(c % 60) { 1.0 } else { 0.0 })
        .collect();
    let pb = m.apply(&b);
    assert!(pb.iter().zip(&b).all(|(a, c)| (a - c).abs() <= 1e-12));
    let support = invariant_vector_support(&m, 1e-12);
    let expected: Vec<usize> = (0..m.cells()).filter(|c| in_b1(c % 60)).collect();
    assert_eq!(support.cells, expected);
    assert!(!support.degenerate);
    assert!(t.elapsed().as_secs() < 60);
}

#[test]
fn ulam_finds_nothing_for_example1() {
    let m = ulam_discretize(
        &circle_system(CocycleGenerator::Example1, FibreKind::Torus),
        60,
        60,
        64,
    )
    .unwrap();
    assert!(m.row_sums().iter().all(|s| (s - 1.0).abs() <= 1e-12));
    assert!(m.column_sums().iter().all(|s| (s - 1.0).abs() <= 0.05));
    let support = invariant_vector_support(&m, 1e-6);
    assert!(support.cells.is_empty());
    assert_eq!(support.note, "no grid-scale invariant set found");
}

#[test]
fn ulam_rejects_bad_inputs() {
    let s = circle_system(CocycleGenerator::Cex1, FibreKind::Torus);
    assert!(ulam_discretize(&s, 1, 60, 64).is_err());
    let b = SkewSystem::new(
        BaseSystem::Bernoulli,
        CocycleGenerator::Cex2,
        FibreKind::Torus,
    )
    .unwrap();
    assert!(ulam_discretize(&b, 10, 10, 4).is_err());
}
