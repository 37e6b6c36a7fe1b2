//! Irreducibility verdicts from ergodicity scans, invariant sections of
//! rotation-valued cocycles, their explicit diagonalization, and exact
//! verification of invariant sets for rational fibre maps.

use std::fmt;

use nalgebra::Matrix2;
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::base::{BasePoint, BaseSystem};
use crate::diagnostics::{
    default_scan, invariant_vector_support, ulam_discretize, ErgodicityReport, Thresholds, Verdict,
};
use crate::error::{domain, Error, Result};
use crate::grassmannian::{
    complexify, k_of, matrix_action_coord_r, perp_coord, perp_coord_real, v1, v2, GrassCoordC,
    GrassCoordR,
};
use crate::o2::{CocycleGenerator, O2Element};
use crate::scalar::TorusValue;
use crate::skew::{n_step, FibreKind, SkewSystem};

/// Residual below which a section counts as a reducibility witness.
pub const WITNESS_TOLERANCE: f64 = 1e-9;

/// Base samples used to confirm that a generator only takes rotation values.
pub const ROTATION_CHECK_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Chart {
    ComplexGrass,
    RealGrass,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SectionCoord {
    Complex(GrassCoordC),
    Real(GrassCoordR),
}

impl SectionCoord {
    pub fn chart(&self) -> Chart {
        match self {
            SectionCoord::Complex(_) => Chart::ComplexGrass,
            SectionCoord::Real(_) => Chart::RealGrass,
        }
    }

    /// Image of the line under the generator value.
    pub fn act(&self, e: &O2Element) -> SectionCoord {
        match self {
            SectionCoord::Complex(z) => SectionCoord::Complex(n_step(e, z)),
            SectionCoord::Real(y) => SectionCoord::Real(matrix_action_coord_r(e, y)),
        }
    }

    /// Chordal distance in the complex chart, circle distance in the real
    /// one. Coordinates from different charts are infinitely far apart.
    pub fn distance(&self, other: &SectionCoord) -> f64 {
        match (self, other) {
            (SectionCoord::Complex(a), SectionCoord::Complex(b)) => a.chordal_distance(b),
            (SectionCoord::Real(a), SectionCoord::Real(b)) => a.distance(b),
            _ => f64::INFINITY,
        }
    }

    pub fn perp(&self) -> SectionCoord {
        match self {
            SectionCoord::Complex(z) => SectionCoord::Complex(perp_coord(z)),
            SectionCoord::Real(y) => SectionCoord::Real(perp_coord_real(y)),
        }
    }

    /// `min(|z|, 1/|z|)`, defined for the complex chart only.
    pub fn k(&self) -> Option<f64> {
        match self {
            SectionCoord::Complex(z) => Some(k_of(z)),
            SectionCoord::Real(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SectionRepr {
    Constant {
        coordinate: SectionCoord,
    },
    /// Values along consecutive orbit points `x, Tx, T^2 x, ...`.
    Sampled {
        samples: Vec<(BasePoint, SectionCoord)>,
    },
}

/// A field of lines `w(x)` with its equivariance residual
/// `max d(A(1,x) w(x), w(Tx))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantSection {
    pub chart: Chart,
    pub representation: SectionRepr,
    pub residual: f64,
}

impl InvariantSection {
    pub fn constant(coordinate: SectionCoord) -> Self {
        InvariantSection {
            chart: coordinate.chart(),
            representation: SectionRepr::Constant { coordinate },
            residual: f64::NAN,
        }
    }

    pub fn sampled(samples: Vec<(BasePoint, SectionCoord)>) -> Result<Self> {
        let chart = samples
            .first()
            .map(|s| s.1.chart())
            .ok_or_else(|| domain("a sampled section needs at least one sample"))?;
        if samples.iter().any(|s| s.1.chart() != chart) {
            return Err(domain("sampled section mixes charts"));
        }
        Ok(InvariantSection {
            chart,
            representation: SectionRepr::Sampled { samples },
            residual: f64::NAN,
        })
    }

    pub fn is_witness(&self) -> bool {
        self.residual <= WITNESS_TOLERANCE
    }

    pub fn perp(&self) -> InvariantSection {
        let representation = match &self.representation {
            SectionRepr::Constant { coordinate } => SectionRepr::Constant {
                coordinate: coordinate.perp(),
            },
            SectionRepr::Sampled { samples } => SectionRepr::Sampled {
                samples: samples.iter().map(|(x, w)| (*x, w.perp())).collect(),
            },
        };
        InvariantSection {
            chart: self.chart,
            representation,
            residual: f64::NAN,
        }
    }

    pub fn label(&self) -> String {
        match &self.representation {
            SectionRepr::Constant {
                coordinate: SectionCoord::Complex(z),
            } => format!("z = {z}"),
            SectionRepr::Constant {
                coordinate: SectionCoord::Real(y),
            } => format!("y = {}", y.y),
            SectionRepr::Sampled { samples } => format!("sampled({} points)", samples.len()),
        }
    }
}

fn sample_base(base: &BaseSystem, samples: usize, seed: u64) -> Vec<BasePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples).map(|_| base.sample_with(&mut rng)).collect()
}

/// Equivariance residual of `sec`. Constant sections are tested on
/// `samples` fresh base points; sampled sections along their stored orbit.
pub fn section_residual(
    g: &CocycleGenerator,
    base: &BaseSystem,
    sec: &InvariantSection,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    match &sec.representation {
        SectionRepr::Constant { coordinate } => {
            let points = sample_base(base, samples, seed);
            let worst = points
                .par_iter()
                .map(|x| Ok(coordinate.act(&g.generator_at(x)?).distance(coordinate)))
                .collect::<Result<Vec<f64>>>()?;
            Ok(worst.into_iter().fold(0.0, f64::max))
        }
        SectionRepr::Sampled { samples } => {
            let mut worst = 0.0f64;
            for pair in samples.windows(2) {
                let (x, w) = &pair[0];
                let (tx, w_next) = &pair[1];
                if base.step(x) != *tx {
                    return Err(domain(
                        "sampled section points are not consecutive orbit points",
                    ));
                }
                worst = worst.max(w.act(&g.generator_at(x)?).distance(w_next));
            }
            Ok(worst)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionCheck {
    pub section: String,
    pub residual: f64,
    pub samples: usize,
    pub witnessed: bool,
}

pub fn verify_section(
    g: &CocycleGenerator,
    base: &BaseSystem,
    sec: &InvariantSection,
    samples: usize,
    seed: u64,
) -> Result<SectionCheck> {
    let residual = section_residual(g, base, sec, samples, seed)?;
    Ok(SectionCheck {
        section: sec.label(),
        residual,
        samples,
        witnessed: residual <= WITNESS_TOLERANCE,
    })
}

fn require_rotations(g: &CocycleGenerator, base: &BaseSystem, seed: u64) -> Result<Vec<BasePoint>> {
    let points = sample_base(base, ROTATION_CHECK_SAMPLES, seed);
    if let Some(values) = g.value_set() {
        if values.iter().any(O2Element::is_reflection) {
            return Err(Error::Precondition(format!(
                "{} takes reflection values",
                g.label()
            )));
        }
    }
    for x in &points {
        if g.generator_at(x)?.is_reflection() {
            return Err(Error::Precondition(format!(
                "{} takes a reflection value at {x}",
                g.label()
            )));
        }
    }
    Ok(points)
}

/// The constant sections `z = 0` (span v1) and `z = infinity` (span v2) of
/// a rotation-valued cocycle, with residuals on the checked samples.
pub fn extract_rotation_sections(
    g: &CocycleGenerator,
    base: &BaseSystem,
    seed: u64,
) -> Result<(InvariantSection, InvariantSection)> {
    require_rotations(g, base, seed)?;
    let mut zero = InvariantSection::constant(SectionCoord::Complex(GrassCoordC::ZERO));
    let mut pole = zero.perp();
    zero.residual = section_residual(g, base, &zero, ROTATION_CHECK_SAMPLES, seed)?;
    pole.residual = section_residual(g, base, &pole, ROTATION_CHECK_SAMPLES, seed)?;
    Ok((zero, pole))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagonalization {
    /// Columns `v1 = (1, i)` and `v2 = (1, -i)`, rows as `[[re, im], [re, im]]`.
    pub basis: [[[f64; 2]; 2]; 2],
    pub samples: usize,
    pub max_off_diagonal: f64,
    pub max_modulus_error: f64,
    /// Distance of the diagonal from `diag(e^{-2 pi i t}, e^{2 pi i t})` for
    /// a rotation by `t` turns.
    pub max_closed_form_error: f64,
    pub diagonal: bool,
}

pub fn basis_matrix() -> Matrix2<Complex64> {
    let (a, b) = (v1(), v2());
    Matrix2::new(a[0], b[0], a[1], b[1])
}

/// `C^{-1} A C` for the constant basis `C = [v1 v2]`.
pub fn conjugate_by_basis(e: &O2Element) -> Matrix2<Complex64> {
    let c = basis_matrix();
    let c_inv = c.try_inverse().expect("v1 and v2 are independent");
    c_inv * complexify(&e.to_matrix()) * c
}

pub fn diagonalize_rotation_cocycle(
    g: &CocycleGenerator,
    base: &BaseSystem,
    samples: usize,
    seed: u64,
) -> Result<Diagonalization> {
    require_rotations(g, base, seed)?;
    let points = sample_base(base, samples, seed.wrapping_add(1));
    let c = basis_matrix();
    let (mut off, mut modulus, mut closed) = (0.0f64, 0.0f64, 0.0f64);
    for x in &points {
        let e = g.generator_at(x)?;
        let t = match e {
            O2Element::Rotation { t } => t.to_f64(),
            O2Element::Reflection { .. } => {
                return Err(Error::Precondition(format!("reflection value at {x}")))
            }
        };
        let d = conjugate_by_basis(&e);
        off = off.max(d[(0, 1)].norm()).max(d[(1, 0)].norm());
        modulus = modulus
            .max((d[(0, 0)].norm() - 1.0).abs())
            .max((d[(1, 1)].norm() - 1.0).abs());
        let theta = std::f64::consts::TAU * t;
        closed = closed
            .max((d[(0, 0)] - Complex64::from_polar(1.0, -theta)).norm())
            .max((d[(1, 1)] - Complex64::from_polar(1.0, theta)).norm());
    }
    let entry = |z: Complex64| [z.re, z.im];
    Ok(Diagonalization {
        basis: [
            [entry(c[(0, 0)]), entry(c[(0, 1)])],
            [entry(c[(1, 0)]), entry(c[(1, 1)])],
        ],
        samples,
        max_off_diagonal: off,
        max_modulus_error: modulus,
        max_closed_form_error: closed,
        diagonal: off <= 1e-12,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionSanity {
    pub section: String,
    pub residual: f64,
    pub perp_residual: f64,
    /// Standard deviation of `k(w(x))` over the samples; `None` in the
    /// real chart.
    pub k_dispersion: Option<f64>,
}

/// Equivariance of a section and of its orthogonal complement, and
/// constancy of `k` along it.
pub fn section_sanity(
    g: &CocycleGenerator,
    base: &BaseSystem,
    sec: &InvariantSection,
    samples: usize,
    seed: u64,
) -> Result<SectionSanity> {
    let residual = section_residual(g, base, sec, samples, seed)?;
    let perp_residual = section_residual(g, base, &sec.perp(), samples, seed)?;
    let ks: Vec<f64> = match &sec.representation {
        SectionRepr::Constant { coordinate } => coordinate.k().into_iter().collect(),
        SectionRepr::Sampled { samples } => samples.iter().filter_map(|(_, w)| w.k()).collect(),
    };
    let k_dispersion = (!ks.is_empty()).then(|| {
        let mean = ks.iter().sum::<f64>() / ks.len() as f64;
        (ks.iter().map(|k| (k - mean).powi(2)).sum::<f64>() / ks.len() as f64).sqrt()
    });
    Ok(SectionSanity {
        section: sec.label(),
        residual,
        perp_residual,
        k_dispersion,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BundleVerdict {
    IrreducibleConsistent,
    ReducibleWitnessed,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalarVerdict {
    ExcludedConsistent,
    Unknown,
}

impl fmt::Display for BundleVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BundleVerdict::IrreducibleConsistent => "irreducible-consistent",
            BundleVerdict::ReducibleWitnessed => "reducible-witnessed",
            BundleVerdict::Unknown => "unknown",
        })
    }
}

impl fmt::Display for ScalarVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScalarVerdict::ExcludedConsistent => "excluded-consistent",
            ScalarVerdict::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bundle {
    Real,
    Complex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrreducibilityVerdict {
    pub real_bundle: BundleVerdict,
    pub complex_bundle: BundleVerdict,
    pub scalar_cohomology: ScalarVerdict,
    pub inputs: [ErgodicityReport; 2],
    pub thresholds: Thresholds,
    pub witness_tolerance: f64,
    pub witnesses: Vec<(Bundle, InvariantSection)>,
    /// "heuristic": the consistent verdicts rest on finite-sample scans.
    pub status: String,
}

/// Applies the criteria in their stated direction only: ergodicity of S
/// makes the real bundle irreducible, ergodicity of R and S makes the
/// complex bundle irreducible, and either one rules out scalar cohomology.
pub fn apply_criteria(
    report_r: &ErgodicityReport,
    report_s: &ErgodicityReport,
) -> Result<IrreducibilityVerdict> {
    if report_r.system != FibreKind::Z2.symbol() || report_s.system != FibreKind::Torus.symbol() {
        return Err(domain(format!(
            "expected an R and an S report, got {} and {}",
            report_r.system, report_s.system
        )));
    }
    if report_r.cocycle != report_s.cocycle || report_r.base != report_s.base {
        return Err(domain(format!(
            "reports come from different systems: {} over {} vs {} over {}",
            report_r.cocycle, report_r.base, report_s.cocycle, report_s.base
        )));
    }
    let r_ok = report_r.verdict == Verdict::ErgodicConsistent;
    let s_ok = report_s.verdict == Verdict::ErgodicConsistent;
    let pick = |ok: bool| {
        if ok {
            BundleVerdict::IrreducibleConsistent
        } else {
            BundleVerdict::Unknown
        }
    };
    Ok(IrreducibilityVerdict {
        real_bundle: pick(s_ok),
        complex_bundle: pick(r_ok && s_ok),
        scalar_cohomology: if r_ok || s_ok {
            ScalarVerdict::ExcludedConsistent
        } else {
            ScalarVerdict::Unknown
        },
        inputs: [report_r.clone(), report_s.clone()],
        thresholds: report_s.thresholds,
        witness_tolerance: WITNESS_TOLERANCE,
        witnesses: Vec::new(),
        status: "heuristic".into(),
    })
}

impl IrreducibilityVerdict {
    /// Records an invariant section as a reducibility witness. A witness
    /// for a bundle already judged irreducible-consistent is an invariant
    /// breach.
    pub fn attach_witness(&mut self, bundle: Bundle, section: InvariantSection) -> Result<()> {
        let expected = match bundle {
            Bundle::Real => Chart::RealGrass,
            Bundle::Complex => Chart::ComplexGrass,
        };
        if section.chart != expected {
            return Err(domain(format!(
                "a {bundle:?} witness needs a {expected:?} section"
            )));
        }
        if !section.is_witness() {
            return Err(Error::Precondition(format!(
                "section residual {} exceeds {WITNESS_TOLERANCE}",
                section.residual
            )));
        }
        let field = match bundle {
            Bundle::Real => &mut self.real_bundle,
            Bundle::Complex => &mut self.complex_bundle,
        };
        if *field == BundleVerdict::IrreducibleConsistent {
            return Err(Error::Invariant(format!(
                "{bundle:?} bundle is irreducible-consistent but has a witnessed invariant section"
            )));
        }
        *field = BundleVerdict::ReducibleWitnessed;
        self.witnesses.push((bundle, section));
        Ok(())
    }
}

mod ratio_string {
    use num_rational::Rational64;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Exact circle maps `y -> y + p` and `y -> c - y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExactFibreMap {
    Translate {
        #[serde(with = "ratio_string")]
        shift: Rational64,
    },
    Reflect {
        #[serde(with = "ratio_string")]
        centre: Rational64,
    },
}

impl ExactFibreMap {
    /// The circle fibre map of an exact generator value.
    pub fn of_element(e: &O2Element) -> Result<Self> {
        let irrational = || domain(format!("{e} has an inexact parameter"));
        Ok(match *e {
            O2Element::Rotation { t } => ExactFibreMap::Translate {
                shift: t.value().scale(2).as_exact().ok_or_else(irrational)?,
            },
            O2Element::Reflection { b } => ExactFibreMap::Reflect {
                centre: b.scale(4).as_exact().ok_or_else(irrational)?,
            },
        })
    }
}

impl fmt::Display for ExactFibreMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactFibreMap::Translate { shift } => write!(f, "y -> y + {shift}"),
            ExactFibreMap::Reflect { centre } => write!(f, "y -> {centre} - y"),
        }
    }
}

/// A finite union of half-open arcs of `[0, 1)` with rational endpoints,
/// kept sorted, disjoint, and merged. Endpoints are ignored as measure-zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalIntervalSet {
    intervals: Vec<(Rational64, Rational64)>,
}

fn frac(r: Rational64) -> Rational64 {
    r - r.floor()
}

impl RationalIntervalSet {
    pub fn new(intervals: Vec<(Rational64, Rational64)>) -> Result<Self> {
        for &(a, b) in &intervals {
            if a < Rational64::zero() || b > Rational64::one() || a >= b {
                return Err(domain(format!(
                    "[{a}, {b}) is not a nonempty arc of [0, 1)"
                )));
            }
        }
        Ok(Self::normalized(intervals))
    }

    /// Builds from `(p, q, r, s)` meaning `[p/q, r/s)`.
    pub fn from_ratios(parts: &[(i64, i64, i64, i64)]) -> Result<Self> {
        Self::new(
            parts
                .iter()
                .map(|&(p, q, r, s)| (Rational64::new(p, q), Rational64::new(r, s)))
                .collect(),
        )
    }

    fn normalized(mut intervals: Vec<(Rational64, Rational64)>) -> Self {
        intervals.sort();
        let mut merged: Vec<(Rational64, Rational64)> = Vec::new();
        for (a, b) in intervals {
            match merged.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        RationalIntervalSet { intervals: merged }
    }

    pub fn intervals(&self) -> &[(Rational64, Rational64)] {
        &self.intervals
    }

    pub fn measure(&self) -> Rational64 {
        self.intervals.iter().map(|&(a, b)| b - a).sum()
    }

    /// Lifts `[a, b)` with `a` in `[0, 1)` back to arcs of `[0, 1)`.
    fn wrap(a: Rational64, b: Rational64, out: &mut Vec<(Rational64, Rational64)>) {
        let one = Rational64::one();
        let start = frac(a);
        let end = start + (b - a);
        if end <= one {
            out.push((start, end));
        } else {
            out.push((start, one));
            out.push((Rational64::zero(), end - one));
        }
    }

    pub fn image(&self, map: &ExactFibreMap) -> Self {
        let mut out = Vec::new();
        for &(a, b) in &self.intervals {
            match *map {
                ExactFibreMap::Translate { shift } => Self::wrap(a + shift, b + shift, &mut out),
                ExactFibreMap::Reflect { centre } => Self::wrap(centre - b, centre - a, &mut out),
            }
        }
        Self::normalized(out)
    }

    pub fn contains(&self, y: Rational64) -> bool {
        self.intervals.iter().any(|&(a, b)| a <= y && y < b)
    }
}

impl fmt::Display for RationalIntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return f.write_str("{}");
        }
        let parts: Vec<String> = self
            .intervals
            .iter()
            .map(|(a, b)| format!("({a},{b})"))
            .collect();
        f.write_str(&parts.join(" u "))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantSetCheck {
    pub set: String,
    pub maps: Vec<ExactFibreMap>,
    pub invariant_under: Vec<bool>,
    pub invariant: bool,
    #[serde(with = "ratio_string")]
    pub measure: Rational64,
}

/// Checks `image(B) = B` for every map. Since fibre maps leave the base
/// coordinate alone, this is skew invariance of `X x B`.
pub fn verify_invariant_set(
    maps: &[ExactFibreMap],
    set: &RationalIntervalSet,
) -> InvariantSetCheck {
    let invariant_under: Vec<bool> = maps.iter().map(|m| set.image(m) == *set).collect();
    InvariantSetCheck {
        set: set.to_string(),
        maps: maps.to_vec(),
        invariant: invariant_under.iter().all(|&b| b),
        invariant_under,
        measure: set.measure(),
    }
}

/// Exact fibre maps of a generator with finitely many exact values.
pub fn exact_fibre_maps(g: &CocycleGenerator) -> Result<Vec<ExactFibreMap>> {
    g.value_set()
        .ok_or_else(|| domain(format!("{} takes infinitely many values", g.label())))?
        .iter()
        .map(ExactFibreMap::of_element)
        .collect()
}

/// `(0,1/6) u (1/3,1/2) u (2/3,5/6)`
pub fn b1() -> RationalIntervalSet {
    RationalIntervalSet::from_ratios(&[(0, 1, 1, 6), (1, 3, 1, 2), (2, 3, 5, 6)]).expect("valid")
}

/// `(1/9,2/9) u (4/9,5/9) u (7/9,8/9)`
pub fn b2() -> RationalIntervalSet {
    RationalIntervalSet::from_ratios(&[(1, 9, 2, 9), (4, 9, 5, 9), (7, 9, 8, 9)]).expect("valid")
}

/// Smallest residual of a constant real-chart section over a grid of
/// `resolution` line angles.
pub fn best_constant_real_section(
    g: &CocycleGenerator,
    base: &BaseSystem,
    resolution: usize,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let candidates: Vec<f64> = (0..resolution)
        .map(|i| i as f64 / resolution as f64)
        .collect();
    let scored = candidates
        .par_iter()
        .map(|&y| {
            let sec = InvariantSection::constant(SectionCoord::Real(GrassCoordR::new(
                TorusValue::new(y),
            )));
            Ok((y, section_residual(g, base, &sec, samples, seed)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(scored.into_iter().fold(
        (0.0, f64::INFINITY),
        |best, c| if c.1 < best.1 { c } else { best },
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducibilityReport {
    pub cocycle: String,
    pub base: String,
    pub rotation_valued: bool,
    pub precondition: Option<String>,
    pub sections: Vec<InvariantSection>,
    pub sanity: Vec<SectionSanity>,
    pub diagonalization: Option<Diagonalization>,
    pub best_constant_real_section: (f64, f64),
}

fn base_label(base: &BaseSystem) -> String {
    match base.eta() {
        Some(eta) => format!("rotation(eta={eta})"),
        None => "bernoulli".into(),
    }
}

/// Looks for exact invariant sections: the pole sections and the constant
/// diagonalization for rotation-valued cocycles, and the best constant real
/// section for any cocycle.
pub fn search_reducibility(
    g: &CocycleGenerator,
    base: &BaseSystem,
    samples: usize,
    seed: u64,
) -> Result<ReducibilityReport> {
    let best_real = best_constant_real_section(g, base, 360, samples.min(10_000), seed)?;
    let mut report = ReducibilityReport {
        cocycle: g.label(),
        base: base_label(base),
        rotation_valued: false,
        precondition: None,
        sections: Vec::new(),
        sanity: Vec::new(),
        diagonalization: None,
        best_constant_real_section: best_real,
    };
    match extract_rotation_sections(g, base, seed) {
        Ok((zero, pole)) => {
            report.rotation_valued = true;
            for sec in [&zero, &pole] {
                report
                    .sanity
                    .push(section_sanity(g, base, sec, samples, seed)?);
            }
            report.sections = vec![zero, pole];
            report.diagonalization = Some(diagonalize_rotation_cocycle(g, base, samples, seed)?);
        }
        Err(Error::Precondition(msg)) => report.precondition = Some(msg),
        Err(e) => return Err(e),
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub pass: bool,
}

impl Claim {
    fn new(
        name: &str,
        expected: impl fmt::Display,
        observed: impl fmt::Display,
        pass: bool,
    ) -> Self {
        Claim {
            name: name.into(),
            expected: expected.to_string(),
            observed: observed.to_string(),
            pass,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteParams {
    pub eta: f64,
    pub n: u64,
    pub starts: usize,
    pub seed: u64,
    pub ulam_grid: usize,
    pub ulam_samples_per_cell: usize,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            eta: 2f64.sqrt() - 1.0,
            n: 1_000_000,
            starts: 16,
            seed: 0,
            ulam_grid: 60,
            ulam_samples_per_cell: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub params: SuiteParams,
    pub invariant_sets: Vec<InvariantSetCheck>,
    pub scans: Vec<ErgodicityReport>,
    pub claims: Vec<Claim>,
    pub all_pass: bool,
    pub status: String,
}

fn scan_claim(
    name: &str,
    report: &ErgodicityReport,
    expected: Verdict,
    witness: Option<&str>,
) -> Claim {
    let observed = match &report.witness {
        Some(w) => format!("{} (witness {w})", report.verdict),
        None => report.verdict.to_string(),
    };
    let expected_text = match witness {
        Some(w) => format!("{expected} (witness {w})"),
        None => expected.to_string(),
    };
    let pass =
        report.verdict == expected && (witness.is_none() || report.witness.as_deref() == witness);
    Claim::new(name, expected_text, observed, pass)
}

/// Exact and numerical checks of the two counterexamples: cex1 (constant
/// rotation by pi/3 over an irrational rotation) and cex2 (rotation by pi/3
/// or reflection over the Bernoulli shift).
pub fn run_counterexample_suite(params: &SuiteParams) -> Result<CounterexampleReport> {
    let rot = BaseSystem::rotation(params.eta);
    let cex1 = CocycleGenerator::Cex1;
    let cex2 = CocycleGenerator::Cex2;
    let mut claims = Vec::new();
    let mut scans = Vec::new();

    let maps1 = exact_fibre_maps(&cex1)?;
    let maps2 = exact_fibre_maps(&cex2)?;
    let set1 = verify_invariant_set(&maps1, &b1());
    let set2 = verify_invariant_set(&maps2, &b2());
    let control = verify_invariant_set(&maps1, &RationalIntervalSet::from_ratios(&[(0, 1, 1, 6)])?);
    claims.push(Claim::new(
        "cex1 S: T x B1 invariant",
        true,
        set1.invariant,
        set1.invariant,
    ));
    claims.push(Claim::new(
        "cex1 S: measure of B1",
        "1/2",
        set1.measure,
        set1.measure == Rational64::new(1, 2),
    ));
    claims.push(Claim::new(
        "cex2 S: T x B2 invariant",
        true,
        set2.invariant,
        set2.invariant,
    ));
    claims.push(Claim::new(
        "cex2 S: measure of B2",
        "1/3",
        set2.measure,
        set2.measure == Rational64::new(1, 3),
    ));
    claims.push(Claim::new(
        "control: (0,1/6) not invariant under y + 1/3",
        false,
        control.invariant,
        !control.invariant,
    ));
    let conserved = cex1
        .value_set()
        .is_some_and(|vs| vs.iter().all(O2Element::is_rotation));
    claims.push(Claim::new(
        "cex1 R: Z2 coordinate conserved (all values rotations)",
        true,
        conserved,
        conserved,
    ));

    let system = |base: &BaseSystem, g: &CocycleGenerator, f: FibreKind| {
        SkewSystem::new(*base, g.clone(), f)
    };
    let cases = [
        (
            "cex1 S",
            system(&rot, &cex1, FibreKind::Torus)?,
            Verdict::NonErgodicDetected,
            Some("torus(j=0,k=3)"),
        ),
        (
            "cex1 R",
            system(&rot, &cex1, FibreKind::Z2)?,
            Verdict::NonErgodicDetected,
            Some("z2(j=0,s=-)"),
        ),
        (
            "cex1 Z3 factor",
            system(&rot, &cex1, FibreKind::Z3)?,
            Verdict::ErgodicConsistent,
            None,
        ),
        (
            "cex2 S",
            system(&BaseSystem::Bernoulli, &cex2, FibreKind::Torus)?,
            Verdict::NonErgodicDetected,
            Some("fibre_cos(k=3)"),
        ),
        (
            "cex2 R",
            system(&BaseSystem::Bernoulli, &cex2, FibreKind::Z2)?,
            Verdict::ErgodicConsistent,
            None,
        ),
        (
            "cex2 Z3 factor",
            system(&BaseSystem::Bernoulli, &cex2, FibreKind::Z3)?,
            Verdict::ErgodicConsistent,
            None,
        ),
    ];
    let mut z3_cex1 = Verdict::Inconclusive;
    for (i, (name, sys, expected, witness)) in cases.iter().enumerate() {
        let report = default_scan(
            sys,
            params.starts,
            params.n,
            params.seed.wrapping_add(i as u64),
        )?;
        claims.push(scan_claim(name, &report, *expected, *witness));
        if *name == "cex1 Z3 factor" {
            z3_cex1 = report.verdict;
        }
        scans.push(report);
    }

    let (y, best) = best_constant_real_section(&cex1, &rot, 360, 1000, params.seed)?;
    claims.push(Claim::new(
        "cex1: no constant real section",
        "min residual 1/3",
        format!("{best} at y = {y}"),
        (best - 1.0 / 3.0).abs() < 1e-9,
    ));
    claims.push(Claim::new(
        "cex1: real sections excluded by ergodicity of the Z3 factor",
        Verdict::ErgodicConsistent,
        z3_cex1,
        z3_cex1 == Verdict::ErgodicConsistent,
    ));

    let ulam_sys = system(&rot, &cex1, FibreKind::Torus)?;
    let matrix = ulam_discretize(
        &ulam_sys,
        params.ulam_grid,
        params.ulam_grid,
        params.ulam_samples_per_cell,
    )?;
    let support = invariant_vector_support(&matrix, 1e-12);
    let b = b1();
    let ny = params.ulam_grid;
    let expected: Vec<usize> = (0..matrix.cells())
        .filter(|c| {
            let centre = Rational64::new(2 * (c % ny) as i64 + 1, 2 * ny as i64);
            b.contains(centre)
        })
        .collect();
    claims.push(Claim::new(
        "cex1: Ulam support equals the cells of T x B1",
        format!("{} cells", expected.len()),
        format!("{} cells", support.cells.len()),
        support.cells == expected,
    ));

    Ok(CounterexampleReport {
        params: *params,
        invariant_sets: vec![set1, set2, control],
        all_pass: claims.iter().all(|c| c.pass),
        claims,
        scans,
        status: "heuristic where numerical".into(),
    })
}
