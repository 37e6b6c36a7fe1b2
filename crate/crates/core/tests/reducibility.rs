use o2cocycle::base::BaseSystem;
use o2cocycle::diagnostics::{default_scan, Verdict};
use o2cocycle::grassmannian::{GrassCoordC, GrassCoordR};
use o2cocycle::o2::CocycleGenerator;
use o2cocycle::reducibility::*;
use o2cocycle::scalar::{Scalar, TorusValue};
use o2cocycle::skew::{FibreKind, SkewSystem};
use o2cocycle::Error;

fn rot() -> BaseSystem {
    BaseSystem::rotation(2f64.sqrt() - 1.0)
}

fn alpha() -> Scalar {
    Scalar::Approx(3f64.sqrt() - 1.0)
}

#[test]
fn rotation_sections_of_example1_and_cex1() {
    for g in [CocycleGenerator::Example1, CocycleGenerator::Cex1] {
        let (zero, pole) = extract_rotation_sections(&g, &rot(), 1).unwrap();
        assert_eq!(zero.residual, 0.0);
        assert_eq!(pole.residual, 0.0);
        assert_eq!(zero.perp().representation, pole.representation);
        assert_eq!(
            zero.representation,
            SectionRepr::Constant {
                coordinate: SectionCoord::Complex(GrassCoordC::ZERO)
            }
        );
        assert_eq!(
            pole.representation,
            SectionRepr::Constant {
                coordinate: SectionCoord::Complex(GrassCoordC::Infinity)
            }
        );
    }
}

#[test]
fn reflections_block_rotation_sections() {
    let g = CocycleGenerator::Example2 {
        alpha: alpha(),
        eta: TorusValue::new(2f64.sqrt() - 1.0),
    };
    assert!(matches!(
        extract_rotation_sections(&g, &rot(), 1),
        Err(Error::Precondition(_))
    ));
    assert!(matches!(
        diagonalize_rotation_cocycle(&g, &rot(), 10, 1),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn perturbed_and_real_sections_are_rejected() {
    let g = CocycleGenerator::Example1;
    let good = InvariantSection::constant(SectionCoord::Complex(GrassCoordC::ZERO));
    assert!(
        verify_section(&g, &rot(), &good, 10_000, 2)
            .unwrap()
            .residual
            <= 1e-12
    );
    let nudged = InvariantSection::constant(SectionCoord::Complex(GrassCoordC::new(0.01, 0.0)));
    let check = verify_section(&g, &rot(), &nudged, 10_000, 2).unwrap();
    assert!(check.residual > 1e-3 && !check.witnessed);
    let real = InvariantSection::constant(SectionCoord::Real(GrassCoordR::new(TorusValue::ZERO)));
    assert!(
        verify_section(&g, &rot(), &real, 10_000, 2)
            .unwrap()
            .residual
            > 0.4
    );
}

#[test]
fn sampled_sections_follow_the_orbit() {
    let g = CocycleGenerator::Example1;
    let base = rot();
    let mut x = base.sample_point(4);
    let mut samples = Vec::new();
    for _ in 0..100 {
        samples.push((x, SectionCoord::Complex(GrassCoordC::Infinity)));
        x = base.step(&x);
    }
    let sec = InvariantSection::sampled(samples.clone()).unwrap();
    let sanity = section_sanity(&g, &base, &sec, 0, 0).unwrap();
    assert_eq!(sanity.residual, 0.0);
    assert_eq!(sanity.perp_residual, 0.0);
    assert_eq!(sanity.k_dispersion, Some(0.0));
    samples.swap(3, 4);
    let broken = InvariantSection::sampled(samples).unwrap();
    assert!(section_residual(&g, &base, &broken, 0, 0).is_err());
}

#[test]
fn example1_diagonalizes() {
    let d = diagonalize_rotation_cocycle(&CocycleGenerator::Example1, &rot(), 10_000, 3).unwrap();
    assert!(d.diagonal);
    assert!(d.max_off_diagonal <= 1e-12);
    assert!(d.max_closed_form_error <= 1e-12);
    assert!(d.max_modulus_error <= 1e-12);
    let c = diagonalize_rotation_cocycle(&CocycleGenerator::Cex1, &rot(), 100, 3).unwrap();
    assert!(c.max_closed_form_error <= 1e-12);
}

#[test]
fn section_sanity_for_example1() {
    let (zero, pole) = extract_rotation_sections(&CocycleGenerator::Example1, &rot(), 5).unwrap();
    for sec in [zero, pole] {
        let s = section_sanity(&CocycleGenerator::Example1, &rot(), &sec, 10_000, 6).unwrap();
        assert!(s.residual <= 1e-9 && s.perp_residual <= 1e-9);
        assert!(s.k_dispersion.unwrap() <= 1e-9);
    }
}

fn scans(
    g: &CocycleGenerator,
    base: &BaseSystem,
    n: u64,
) -> (
    o2cocycle::diagnostics::ErgodicityReport,
    o2cocycle::diagnostics::ErgodicityReport,
) {
    let r = SkewSystem::new(*base, g.clone(), FibreKind::Z2).unwrap();
    let s = SkewSystem::new(*base, g.clone(), FibreKind::Torus).unwrap();
    (
        default_scan(&r, 8, n, 1).unwrap(),
        default_scan(&s, 8, n, 2).unwrap(),
    )
}

#[test]
fn example1_verdict_with_witness() {
    let g = CocycleGenerator::Example1;
    let (r, s) = scans(&g, &rot(), 200_000);
    assert_eq!(r.verdict, Verdict::NonErgodicDetected);
    assert_eq!(s.verdict, Verdict::ErgodicConsistent);
    let mut v = apply_criteria(&r, &s).unwrap();
    assert_eq!(v.real_bundle, BundleVerdict::IrreducibleConsistent);
    assert_eq!(v.complex_bundle, BundleVerdict::Unknown);
    assert_eq!(v.scalar_cohomology, ScalarVerdict::ExcludedConsistent);
    let (zero, _) = extract_rotation_sections(&g, &rot(), 1).unwrap();
    v.attach_witness(Bundle::Complex, zero.clone()).unwrap();
    assert_eq!(v.complex_bundle, BundleVerdict::ReducibleWitnessed);
    // a real witness would contradict the real verdict
    let mut fake =
        InvariantSection::constant(SectionCoord::Real(GrassCoordR::new(TorusValue::ZERO)));
    fake.residual = 0.0;
    assert!(matches!(
        v.attach_witness(Bundle::Real, fake),
        Err(Error::Invariant(_))
    ));
    assert!(v.attach_witness(Bundle::Real, zero).is_err());
}

#[test]
fn example3_complex_bundle_is_irreducible_consistent() {
    let g = CocycleGenerator::Example3 { alpha: alpha() };
    let (r, s) = scans(&g, &BaseSystem::Bernoulli, 200_000);
    let v = apply_criteria(&r, &s).unwrap();
    assert_eq!(
        v.complex_bundle,
        BundleVerdict::IrreducibleConsistent,
        "{} {}",
        r.max_deviation(),
        s.max_deviation()
    );
    assert_eq!(v.real_bundle, BundleVerdict::IrreducibleConsistent);
}

#[test]
fn inconclusive_inputs_give_unknowns() {
    let (mut r, mut s) = scans(&CocycleGenerator::Example1, &rot(), 1000);
    r.verdict = Verdict::Inconclusive;
    s.verdict = Verdict::Inconclusive;
    let v = apply_criteria(&r, &s).unwrap();
    assert_eq!(v.real_bundle, BundleVerdict::Unknown);
    assert_eq!(v.complex_bundle, BundleVerdict::Unknown);
    assert_eq!(v.scalar_cohomology, ScalarVerdict::Unknown);
}

#[test]
fn mismatched_reports_are_rejected() {
    let (r, _) = scans(&CocycleGenerator::Example1, &rot(), 1000);
    let (_, s) = scans(&CocycleGenerator::Cex1, &rot(), 1000);
    assert!(matches!(apply_criteria(&r, &s), Err(Error::Domain(_))));
    assert!(matches!(apply_criteria(&r, &r), Err(Error::Domain(_))));
}

#[test]
fn counterexample_suite_passes() {
    let params = SuiteParams {
        n: 100_000,
        starts: 8,
        ..SuiteParams::default()
    };
    let report = run_counterexample_suite(&params).unwrap();
    for c in &report.claims {
        assert!(
            c.pass,
            "{}: expected {}, observed {}",
            c.name, c.expected, c.observed
        );
    }
    assert!(report.all_pass);
}

#[test]
fn search_reports_sections_or_preconditions() {
    let r = search_reducibility(&CocycleGenerator::Cex1, &rot(), 1000, 1).unwrap();
    assert!(r.rotation_valued);
    assert_eq!(r.sections.len(), 2);
    assert!((r.best_constant_real_section.1 - 1.0 / 3.0).abs() < 1e-9);
    let g = CocycleGenerator::Example3 { alpha: alpha() };
    let r = search_reducibility(&g, &BaseSystem::Bernoulli, 1000, 1).unwrap();
    assert!(!r.rotation_valued);
    assert!(r.precondition.is_some());
}
