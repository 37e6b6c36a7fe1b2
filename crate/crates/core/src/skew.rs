//! Skew products over the base driven by the cocycle generator: the circle
//! extension S, the Z2 extension R, the projective action N on the Riemann
//! sphere, and the Z3 factor of S.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::base::{BasePoint, BaseSystem};
use crate::error::{domain, Error, Result};
use crate::grassmannian::{GrassCoordC, POLE_THRESHOLD};
use crate::o2::{CocycleGenerator, O2Element};
use crate::scalar::{Scalar, TorusValue};

/// Half-width of the annulus around the unit circle on which `iota` refuses
/// to answer.
pub const IOTA_EXCLUSION: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FibreKind {
    /// Circle fibre, map S.
    #[serde(rename = "S")]
    Torus,
    /// Two-point fibre, map R.
    #[serde(rename = "R")]
    Z2,
    /// Riemann sphere fibre, map N.
    #[serde(rename = "N")]
    Sphere,
    /// Three-point factor of S.
    #[serde(rename = "Z3")]
    Z3,
}

impl FibreKind {
    pub fn symbol(&self) -> &'static str {
        match self {
            FibreKind::Torus => "S",
            FibreKind::Z2 => "R",
            FibreKind::Sphere => "N",
            FibreKind::Z3 => "Z3",
        }
    }

    /// A fixed reference point of the fibre.
    pub fn origin(&self) -> FibrePoint {
        match self {
            FibreKind::Torus => FibrePoint::Torus(TorusValue::ZERO),
            FibreKind::Z2 => FibrePoint::Z2(0),
            FibreKind::Z3 => FibrePoint::Z3(0),
            FibreKind::Sphere => FibrePoint::Sphere(GrassCoordC::ZERO),
        }
    }

    /// Draws from the fibre's reference measure: Lebesgue on the circle,
    /// counting measure on the finite fibres, and the unit circle of the
    /// sphere chart.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> FibrePoint {
        match self {
            FibreKind::Torus => FibrePoint::Torus(TorusValue::new(rng.random::<f64>())),
            FibreKind::Z2 => FibrePoint::Z2(rng.random_range(0..2)),
            FibreKind::Z3 => FibrePoint::Z3(rng.random_range(0..3)),
            FibreKind::Sphere => FibrePoint::Sphere(GrassCoordC::on_circle(rng.random::<f64>())),
        }
    }
}

impl FromStr for FibreKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S" | "s" | "torus" => Ok(FibreKind::Torus),
            "R" | "r" | "z2" => Ok(FibreKind::Z2),
            "N" | "n" | "sphere" => Ok(FibreKind::Sphere),
            "Z3" | "z3" => Ok(FibreKind::Z3),
            other => Err(domain(format!("unknown skew kind {other:?}"))),
        }
    }
}

impl fmt::Display for FibreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FibrePoint {
    Torus(TorusValue),
    Z2(u8),
    Z3(u8),
    Sphere(GrassCoordC),
}

impl FibrePoint {
    pub fn kind(&self) -> FibreKind {
        match self {
            FibrePoint::Torus(_) => FibreKind::Torus,
            FibrePoint::Z2(_) => FibreKind::Z2,
            FibrePoint::Z3(_) => FibreKind::Z3,
            FibrePoint::Sphere(_) => FibreKind::Sphere,
        }
    }

    pub fn torus(&self) -> Option<TorusValue> {
        match self {
            FibrePoint::Torus(y) => Some(*y),
            _ => None,
        }
    }
}

impl fmt::Display for FibrePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FibrePoint::Torus(y) => write!(f, "{y}"),
            FibrePoint::Z2(a) | FibrePoint::Z3(a) => write!(f, "{a}"),
            FibrePoint::Sphere(z) => write!(f, "{z}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkewPoint {
    pub base: BasePoint,
    pub fibre: FibrePoint,
}

impl SkewPoint {
    pub fn new(base: BasePoint, fibre: FibrePoint) -> Self {
        SkewPoint { base, fibre }
    }
}

/// Circle fibre map: `y + 2t` for rotations, `4b - y` for reflections.
pub fn f_step(e: &O2Element, y: TorusValue) -> TorusValue {
    match *e {
        O2Element::Rotation { t } => y + t.scale(2),
        O2Element::Reflection { b } => TorusValue::new(b.scale(4)) - y,
    }
}

/// Z2 fibre map: identity for rotations, swap for reflections.
pub fn g_step(e: &O2Element, a: u8) -> u8 {
    if e.is_rotation() {
        a % 2
    } else {
        (a + 1) % 2
    }
}

/// Riemann sphere fibre map: `e^{4 pi i t} z` for rotations,
/// `e^{8 pi i b} / z` for reflections. Rotations fix both poles; reflections
/// swap them.
pub fn n_step(e: &O2Element, z: &GrassCoordC) -> GrassCoordC {
    match (*e, *z) {
        (O2Element::Rotation { .. }, GrassCoordC::Infinity) => GrassCoordC::Infinity,
        (O2Element::Rotation { t }, GrassCoordC::Finite(w)) => {
            GrassCoordC::Finite(Complex64::from_polar(1.0, 2.0 * TAU * t.to_f64()) * w)
        }
        (O2Element::Reflection { .. }, GrassCoordC::Infinity) => GrassCoordC::ZERO,
        (O2Element::Reflection { .. }, GrassCoordC::Finite(w)) if w.norm() < POLE_THRESHOLD => {
            GrassCoordC::Infinity
        }
        (O2Element::Reflection { b }, GrassCoordC::Finite(w)) => {
            GrassCoordC::Finite(Complex64::from_polar(1.0, 4.0 * TAU * b.to_f64()) / w)
        }
    }
}

pub fn iota(z: &GrassCoordC) -> Result<u8> {
    iota_with(z, IOTA_EXCLUSION)
}

/// 0 inside the unit disc, 1 outside; undefined within `half_width` of the
/// unit circle.
pub fn iota_with(z: &GrassCoordC, half_width: f64) -> Result<u8> {
    let r = z.modulus();
    if (r - 1.0).abs() <= half_width {
        return Err(domain(format!(
            "|z| = {r} is on the unit circle, outside iota's domain"
        )));
    }
    Ok(if r < 1.0 { 0 } else { 1 })
}

/// `arg(z) / 2pi` in `[0, 1)`, undefined at the poles.
pub fn tau(z: &GrassCoordC) -> Result<TorusValue> {
    match z {
        GrassCoordC::Finite(w) if w.norm() > 0.0 => Ok(TorusValue::new(w.arg() / TAU)),
        _ => Err(domain("tau is undefined at the poles 0 and infinity")),
    }
}

/// `floor(3y)`.
pub fn project_thirds(y: TorusValue) -> u8 {
    let third = match y.value() {
        Scalar::Exact(r) => (r * 3).floor().to_integer(),
        Scalar::Approx(v) => (3.0 * v).floor() as i64,
    };
    third.clamp(0, 2) as u8
}

/// True for the three points where `project_thirds` is not a factor map.
pub fn is_thirds_boundary(y: TorusValue) -> bool {
    match y.value() {
        Scalar::Exact(r) => (r * 3).is_integer(),
        Scalar::Approx(v) => {
            let s = 3.0 * v;
            (s - s.round()).abs() < 1e-12
        }
    }
}

/// Reads `v` as `m/3` for an integer `m` in `0..3`.
fn thirds_numerator(v: Scalar) -> Option<i64> {
    let v = v.rem(num_rational::Rational64::from_integer(1));
    match v {
        Scalar::Exact(r) => {
            let m = r * 3;
            m.is_integer().then(|| m.to_integer())
        }
        Scalar::Approx(f) => {
            let m = 3.0 * f;
            let rounded = m.round();
            ((m - rounded).abs() <= 1e-12).then(|| rounded.to_i64().unwrap_or(0).rem_euclid(3))
        }
    }
}

/// Z3 factor map through `project_thirds`: a rotation translating the circle
/// by `m/3` sends `a -> a + m`; a reflection `y -> j/3 - y` sends
/// `a -> j - 1 - a`. Other elements do not descend to Z3.
pub fn z3_step(e: &O2Element, a: u8) -> Result<u8> {
    let a = a as i64;
    match *e {
        O2Element::Rotation { t } => {
            let m = thirds_numerator(t.value().scale(2))
                .ok_or_else(|| domain(format!("{e} does not descend to the Z3 factor")))?;
            Ok((a + m).rem_euclid(3) as u8)
        }
        O2Element::Reflection { b } => {
            let j = thirds_numerator(b.scale(4))
                .ok_or_else(|| domain(format!("{e} does not descend to the Z3 factor")))?;
            Ok((j - 1 - a).rem_euclid(3) as u8)
        }
    }
}

/// Fibre map for one generator value.
pub fn fibre_step(e: &O2Element, v: &FibrePoint) -> Result<FibrePoint> {
    Ok(match v {
        FibrePoint::Torus(y) => FibrePoint::Torus(f_step(e, *y)),
        FibrePoint::Z2(a) => FibrePoint::Z2(g_step(e, *a)),
        FibrePoint::Z3(a) => FibrePoint::Z3(z3_step(e, *a)?),
        FibrePoint::Sphere(z) => FibrePoint::Sphere(n_step(e, z)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkewSystem {
    pub base: BaseSystem,
    pub generator: CocycleGenerator,
    pub fibre: FibreKind,
}

impl SkewSystem {
    pub fn new(base: BaseSystem, generator: CocycleGenerator, fibre: FibreKind) -> Result<Self> {
        if generator.wants_circle_base() != base.is_rotation() {
            return Err(domain(format!(
                "generator {} does not live over base {:?}",
                generator.label(),
                base
            )));
        }
        Ok(SkewSystem {
            base,
            generator,
            fibre,
        })
    }

    /// Same base and cocycle with a different fibre.
    pub fn with_fibre(&self, fibre: FibreKind) -> SkewSystem {
        SkewSystem {
            fibre,
            ..self.clone()
        }
    }

    pub fn step(&self, p: &SkewPoint) -> Result<SkewPoint> {
        if p.fibre.kind() != self.fibre {
            return Err(domain(format!(
                "fibre point of kind {} fed to a {} system",
                p.fibre.kind(),
                self.fibre
            )));
        }
        let e = self.generator.generator_at(&p.base)?;
        Ok(SkewPoint {
            base: self.base.step(&p.base),
            fibre: fibre_step(&e, &p.fibre)?,
        })
    }

    pub fn orbit(&self, start: SkewPoint, n: usize) -> Result<Vec<SkewPoint>> {
        let mut out = Vec::with_capacity(n + 1);
        let mut p = start;
        out.push(p);
        for _ in 0..n {
            p = self.step(&p)?;
            out.push(p);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmannian::{complexify, k_of, matrix_action_coord_c};
    use crate::stats::ks_uniform;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn eta() -> f64 {
        2f64.sqrt() - 1.0
    }

    fn circle(x: f64) -> BasePoint {
        BasePoint::Circle(TorusValue::new(x))
    }

    #[test]
    fn f_step_examples() {
        // Example 1 at x: rotation by pi x, so f adds x
        let x = 0.37;
        let e = CocycleGenerator::Example1.generator_at(&circle(x)).unwrap();
        let y = TorusValue::new(0.5);
        assert!(f_step(&e, y).distance(TorusValue::new(0.87)) < 1e-15);

        let flip = O2Element::reflection(Scalar::ZERO);
        assert!((f_step(&flip, TorusValue::new(0.3)).to_f64() - 0.7).abs() < 1e-15);

        let sixth = O2Element::rotation(Scalar::ratio(1, 6));
        assert_eq!(
            f_step(&sixth, TorusValue::ratio(1, 10)),
            TorusValue::ratio(1, 10) + TorusValue::ratio(1, 3)
        );
    }

    #[test]
    fn g_step_examples() {
        let r = O2Element::rotation(0.2);
        let f = O2Element::reflection(0.1);
        assert_eq!(g_step(&r, 0), 0);
        assert_eq!(g_step(&f, 0), 1);
        assert_eq!(g_step(&f, g_step(&f, 1)), 1);
    }

    #[test]
    fn n_step_examples() {
        let quarter = O2Element::rotation(Scalar::ratio(1, 4));
        match n_step(&quarter, &GrassCoordC::new(1.0, 0.0)) {
            GrassCoordC::Finite(w) => assert!((w - Complex64::new(-1.0, 0.0)).norm() < 1e-15),
            _ => panic!(),
        }
        let flip = O2Element::reflection(Scalar::ZERO);
        match n_step(&flip, &GrassCoordC::new(2.0, 0.0)) {
            GrassCoordC::Finite(w) => assert!((w - Complex64::new(0.5, 0.0)).norm() < 1e-15),
            _ => panic!(),
        }
        assert_eq!(n_step(&flip, &GrassCoordC::ZERO), GrassCoordC::Infinity);
        // the printed case list repeats "X_r" for the pole at infinity; the
        // matrix action decides: reflections send infinity to 0
        assert_eq!(n_step(&flip, &GrassCoordC::Infinity), GrassCoordC::ZERO);
        assert_eq!(
            n_step(&quarter, &GrassCoordC::Infinity),
            GrassCoordC::Infinity
        );
    }

    #[test]
    fn iota_and_tau_examples() {
        assert_eq!(iota(&GrassCoordC::new(0.5, 0.0)).unwrap(), 0);
        assert_eq!(iota(&GrassCoordC::ZERO).unwrap(), 0);
        assert_eq!(iota(&GrassCoordC::Infinity).unwrap(), 1);
        assert!(iota(&GrassCoordC::on_circle(0.2)).is_err());
        assert!(iota_with(&GrassCoordC::new(1.001, 0.0), 0.01).is_err());

        assert!((tau(&GrassCoordC::new(0.0, 1.0)).unwrap().to_f64() - 0.25).abs() < 1e-15);
        assert!((tau(&GrassCoordC::new(-1.0, 0.0)).unwrap().to_f64() - 0.5).abs() < 1e-15);
        assert!(tau(&GrassCoordC::ZERO).is_err());
        assert!(tau(&GrassCoordC::Infinity).is_err());
    }

    #[test]
    fn thirds_examples() {
        assert_eq!(project_thirds(TorusValue::new(0.1)), 0);
        assert_eq!(project_thirds(TorusValue::new(0.5)), 1);
        assert_eq!(project_thirds(TorusValue::new(0.9)), 2);
        assert!(is_thirds_boundary(TorusValue::ratio(1, 3)));
        assert!(!is_thirds_boundary(TorusValue::ratio(1, 4)));
    }

    #[test]
    fn skew_step_examples() {
        let sys = SkewSystem::new(
            BaseSystem::rotation(eta()),
            CocycleGenerator::Cex1,
            FibreKind::Z3,
        )
        .unwrap();
        let p = SkewPoint::new(circle(0.2), FibrePoint::Z3(2));
        let q = sys.step(&p).unwrap();
        assert_eq!(q.fibre, FibrePoint::Z3(0));
        assert!((q.base.circle().unwrap().to_f64() - (0.2 + eta())).abs() < 1e-15);

        let alpha = Scalar::Approx(3f64.sqrt() - 1.0);
        let g2 = CocycleGenerator::Example2 {
            alpha,
            eta: TorusValue::new(eta()),
        };
        let s = SkewSystem::new(BaseSystem::rotation(eta()), g2, FibreKind::Torus).unwrap();
        let q = s
            .step(&SkewPoint::new(
                circle(0.95),
                FibrePoint::Torus(TorusValue::new(0.3)),
            ))
            .unwrap();
        assert!((q.fibre.torus().unwrap().to_f64() - 0.7).abs() < 1e-15);

        let g3 = CocycleGenerator::Example3 { alpha };
        let r = SkewSystem::new(BaseSystem::Bernoulli, g3, FibreKind::Z2).unwrap();
        let x = (0..)
            .map(|s| BaseSystem::Bernoulli.sample_point(s))
            .find(|x| x.sequence().unwrap().symbol(0) == 0)
            .unwrap();
        let q = r.step(&SkewPoint::new(x, FibrePoint::Z2(0))).unwrap();
        assert_eq!(q.fibre, FibrePoint::Z2(0));
        assert_eq!(q.base, BaseSystem::Bernoulli.step(&x));
    }

    #[test]
    fn mismatched_systems_are_rejected() {
        assert!(SkewSystem::new(
            BaseSystem::Bernoulli,
            CocycleGenerator::Example1,
            FibreKind::Torus
        )
        .is_err());
        let sys = SkewSystem::new(
            BaseSystem::rotation(eta()),
            CocycleGenerator::Example1,
            FibreKind::Z3,
        )
        .unwrap();
        // Example 1 rotations do not descend to Z3
        let p = SkewPoint::new(circle(0.3), FibrePoint::Z3(0));
        assert!(sys.step(&p).is_err());
    }

    #[test]
    fn z3_branch_is_the_factor_of_the_circle_map() {
        // exact check over rationals away from the thirds boundaries
        let elements = [
            O2Element::rotation(Scalar::ratio(1, 6)),
            O2Element::reflection(Scalar::ZERO),
            O2Element::reflection(Scalar::ratio(1, 12)),
            O2Element::rotation(Scalar::ratio(1, 3)),
        ];
        for e in &elements {
            for p in 0..997 {
                let y = TorusValue::ratio(p, 997);
                if is_thirds_boundary(y) {
                    continue;
                }
                let image = f_step(e, y);
                assert!(image.is_exact());
                assert_eq!(
                    project_thirds(image),
                    z3_step(e, project_thirds(y)).unwrap(),
                    "{e} at {y}"
                );
            }
        }
    }

    #[test]
    fn example1_preserves_lebesgue_on_the_fibre() {
        let sys = SkewSystem::new(
            BaseSystem::rotation(eta()),
            CocycleGenerator::Example1,
            FibreKind::Torus,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut ys: Vec<f64> = (0..1_000_000)
            .map(|_| {
                let p = SkewPoint::new(
                    circle(rng.random()),
                    FibrePoint::Torus(TorusValue::new(rng.random::<f64>())),
                );
                sys.step(&p).unwrap().fibre.torus().unwrap().to_f64()
            })
            .collect();
        assert!(ks_uniform(&mut ys) <= 0.01);
    }

    fn any_element() -> impl Strategy<Value = O2Element> {
        prop_oneof![
            (0.0f64..1.0).prop_map(O2Element::rotation),
            (0.0f64..0.5).prop_map(O2Element::reflection),
        ]
    }

    fn any_coord() -> impl Strategy<Value = GrassCoordC> {
        prop_oneof![
            8 => (0.01f64..10.0, 0.0f64..1.0)
                .prop_map(|(r, th)| GrassCoordC::Finite(Complex64::from_polar(r, TAU * th))),
            1 => Just(GrassCoordC::ZERO),
            1 => Just(GrassCoordC::Infinity),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]

        #[test]
        fn closed_form_matches_matrix_action(e in any_element(), z in any_coord()) {
            let closed = n_step(&e, &z);
            let action = matrix_action_coord_c(&complexify(&e.to_matrix()), &z).unwrap();
            match (closed, action) {
                (GrassCoordC::Infinity, GrassCoordC::Infinity) => {}
                (GrassCoordC::Finite(a), GrassCoordC::Finite(b)) => {
                    prop_assert!((a - b).norm() <= 1e-10 * (1.0 + a.norm()));
                }
                other => prop_assert!(false, "pole mismatch {:?}", other),
            }
        }

        #[test]
        fn tau_semiconjugates_n_to_s(e in any_element(), theta in 0.0f64..1.0) {
            let z = GrassCoordC::on_circle(theta);
            let lhs = tau(&n_step(&e, &z)).unwrap();
            let rhs = f_step(&e, tau(&z).unwrap());
            prop_assert!(lhs.distance(rhs) <= 1e-12);
        }

        #[test]
        fn iota_semiconjugates_n_to_r(e in any_element(), r in 0.0f64..10.0, theta in 0.0f64..1.0) {
            prop_assume!((r - 1.0).abs() > 1e-6);
            let z = GrassCoordC::Finite(Complex64::from_polar(r, TAU * theta));
            prop_assert_eq!(iota(&n_step(&e, &z)).unwrap(), g_step(&e, iota(&z).unwrap()));
        }

        #[test]
        fn circle_pairs_are_invariant(e in any_element(), z in any_coord()) {
            prop_assert!((k_of(&n_step(&e, &z)) - k_of(&z)).abs() <= 1e-12);
        }
    }
}
