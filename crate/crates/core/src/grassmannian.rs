//! Coordinates on the complex and real projective lines.
//!
//! A complex line is written `span{v1 + z v2}` with `v1 = (1, i)` and
//! `v2 = (1, -i)`; `span{v2}` is the point at infinity. A real line is
//! written by its angle `pi * y`, `y` in `[0, 1)`.

use std::f64::consts::{PI, TAU};
use std::fmt;

use nalgebra::{Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::o2::O2Element;
use crate::scalar::TorusValue;

/// Denominators below this magnitude send a Möbius image to infinity.
pub const POLE_THRESHOLD: f64 = 1e-14;

pub fn v1() -> Vector2<Complex64> {
    Vector2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0))
}

pub fn v2() -> Vector2<Complex64> {
    Vector2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0))
}

/// A point of the Riemann sphere, i.e. a complex line in C^2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "CoordRepr", try_from = "CoordRepr")]
pub enum GrassCoordC {
    Finite(Complex64),
    Infinity,
}

/// Wire form: `{"re": .., "im": ..}` or the string `"inf"`.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoordRepr {
    Finite { re: f64, im: f64 },
    Named(String),
}

impl From<GrassCoordC> for CoordRepr {
    fn from(z: GrassCoordC) -> Self {
        match z {
            GrassCoordC::Finite(c) => CoordRepr::Finite { re: c.re, im: c.im },
            GrassCoordC::Infinity => CoordRepr::Named("inf".into()),
        }
    }
}

impl TryFrom<CoordRepr> for GrassCoordC {
    type Error = String;

    fn try_from(r: CoordRepr) -> std::result::Result<Self, String> {
        match r {
            CoordRepr::Finite { re, im } => Ok(GrassCoordC::Finite(Complex64::new(re, im))),
            CoordRepr::Named(s) if s == "inf" => Ok(GrassCoordC::Infinity),
            CoordRepr::Named(s) => Err(format!("unknown coordinate literal {s:?}")),
        }
    }
}

impl GrassCoordC {
    pub const ZERO: GrassCoordC = GrassCoordC::Finite(Complex64::new(0.0, 0.0));

    pub fn new(re: f64, im: f64) -> Self {
        GrassCoordC::Finite(Complex64::new(re, im))
    }

    /// The point `e^{2 pi i theta}` of the unit circle.
    pub fn on_circle(theta: f64) -> Self {
        GrassCoordC::Finite(Complex64::from_polar(1.0, TAU * theta))
    }

    pub fn modulus(&self) -> f64 {
        match self {
            GrassCoordC::Finite(z) => z.norm(),
            GrassCoordC::Infinity => f64::INFINITY,
        }
    }

    pub fn is_pole(&self) -> bool {
        match self {
            GrassCoordC::Finite(z) => *z == Complex64::new(0.0, 0.0),
            GrassCoordC::Infinity => true,
        }
    }

    /// A spanning vector for the line.
    pub fn spanning_vector(&self) -> Vector2<Complex64> {
        match self {
            GrassCoordC::Finite(z) => v1() + v2() * *z,
            GrassCoordC::Infinity => v2(),
        }
    }

    /// Chordal distance on the Riemann sphere (diameter 2).
    pub fn chordal_distance(&self, other: &GrassCoordC) -> f64 {
        match (self, other) {
            (GrassCoordC::Infinity, GrassCoordC::Infinity) => 0.0,
            (GrassCoordC::Finite(z), GrassCoordC::Infinity)
            | (GrassCoordC::Infinity, GrassCoordC::Finite(z)) => 2.0 / (1.0 + z.norm_sqr()).sqrt(),
            (GrassCoordC::Finite(z), GrassCoordC::Finite(w)) => {
                2.0 * (z - w).norm() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr())).sqrt()
            }
        }
    }
}

impl fmt::Display for GrassCoordC {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrassCoordC::Finite(z) => write!(f, "{}{:+}i", z.re, z.im),
            GrassCoordC::Infinity => write!(f, "inf"),
        }
    }
}

/// A real line through the origin with direction `(cos pi y, sin pi y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrassCoordR {
    pub y: TorusValue,
}

impl GrassCoordR {
    pub fn new(y: TorusValue) -> Self {
        GrassCoordR { y }
    }

    pub fn direction(&self) -> Vector2<f64> {
        let (s, c) = (PI * self.y.to_f64()).sin_cos();
        Vector2::new(c, s)
    }

    pub fn distance(&self, other: &GrassCoordR) -> f64 {
        self.y.distance(other.y)
    }
}

/// `{|z| = C} ∪ {|z| = 1/C}` for `C` in `[0, 1]`; `C = 0` is the pair of poles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CirclePair {
    c: f64,
}

impl CirclePair {
    pub fn new(c: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c) {
            return Err(domain(format!("circle pair radius {c} outside [0, 1]")));
        }
        Ok(CirclePair { c })
    }

    pub fn radius(&self) -> f64 {
        self.c
    }
}

pub fn coord_c_of_span(v: Vector2<Complex64>) -> Result<GrassCoordC> {
    let scale = v.norm();
    if !(scale > 0.0) {
        return Err(domain("zero vector spans no line"));
    }
    let i = Complex64::i();
    let a = (v[0] - i * v[1]) / 2.0;
    let b = (v[0] + i * v[1]) / 2.0;
    if a.norm() < POLE_THRESHOLD * scale {
        Ok(GrassCoordC::Infinity)
    } else {
        Ok(GrassCoordC::Finite(b / a))
    }
}

/// Coefficients `(a, b)` with `w = a v1 + b v2`.
fn split(w: Vector2<Complex64>) -> (Complex64, Complex64) {
    let i = Complex64::i();
    ((w[0] - i * w[1]) / 2.0, (w[0] + i * w[1]) / 2.0)
}

/// Action of an invertible complex matrix on the coordinate, as the Möbius map
/// `z -> (q + s z) / (p + r z)` where `M v1 = p v1 + q v2`, `M v2 = r v1 + s v2`.
pub fn matrix_action_coord_c(m: &Matrix2<Complex64>, z: &GrassCoordC) -> Result<GrassCoordC> {
    if m.determinant().norm() < POLE_THRESHOLD {
        return Err(domain("singular matrix has no action on lines"));
    }
    let (p, q) = split(m * v1());
    let (r, s) = split(m * v2());
    let (num, den) = match z {
        GrassCoordC::Finite(z) => (q + s * z, p + r * z),
        GrassCoordC::Infinity => (s, r),
    };
    if den.norm() < POLE_THRESHOLD {
        Ok(GrassCoordC::Infinity)
    } else {
        Ok(GrassCoordC::Finite(num / den))
    }
}

pub fn complexify(m: &Matrix2<f64>) -> Matrix2<Complex64> {
    m.map(|v| Complex64::new(v, 0.0))
}

/// Action of an O2 element on real lines, read directly from its angles.
pub fn matrix_action_coord_r(e: &O2Element, y: &GrassCoordR) -> GrassCoordR {
    let image = match *e {
        O2Element::Rotation { t } => y.y + t.scale(2),
        O2Element::Reflection { b } => TorusValue::new(b.scale(4)) - y.y,
    };
    GrassCoordR::new(image)
}

pub fn coord_r_of_span(v: Vector2<f64>) -> Result<GrassCoordR> {
    if !(v.norm() > 0.0) {
        return Err(domain("zero vector spans no line"));
    }
    Ok(GrassCoordR::new(TorusValue::new(v[1].atan2(v[0]) / PI)))
}

/// `min(|z|, 1/|z|)`, zero at both poles.
pub fn k_of(z: &GrassCoordC) -> f64 {
    match z {
        GrassCoordC::Infinity => 0.0,
        GrassCoordC::Finite(w) => {
            let r = w.norm();
            if r <= 1.0 {
                r
            } else {
                1.0 / r
            }
        }
    }
}

pub fn in_circle_pair(z: &GrassCoordC, pair: &CirclePair, tol: f64) -> bool {
    (k_of(z) - pair.radius()).abs() <= tol
}

/// Hermitian complement: `z -> -1/conj(z)`, swapping the poles.
pub fn perp_coord(z: &GrassCoordC) -> GrassCoordC {
    match z {
        GrassCoordC::Infinity => GrassCoordC::ZERO,
        GrassCoordC::Finite(w) if w.norm() < POLE_THRESHOLD => GrassCoordC::Infinity,
        GrassCoordC::Finite(w) => GrassCoordC::Finite(-1.0 / w.conj()),
    }
}

/// Orthogonal complement of a real line.
pub fn perp_coord_real(y: &GrassCoordR) -> GrassCoordR {
    GrassCoordR::new(y.y + TorusValue::ratio(1, 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: &GrassCoordC, b: &GrassCoordC, tol: f64) -> bool {
        match (a, b) {
            (GrassCoordC::Infinity, GrassCoordC::Infinity) => true,
            (GrassCoordC::Finite(x), GrassCoordC::Finite(y)) => (x - y).norm() <= tol,
            _ => false,
        }
    }

    #[test]
    fn span_examples() {
        let z = coord_c_of_span(Vector2::new(c(1.0, 0.0), c(0.0, 1.0))).unwrap();
        assert!(close(&z, &GrassCoordC::ZERO, 0.0));
        let z = coord_c_of_span(Vector2::new(c(1.0, 0.0), c(0.0, -1.0))).unwrap();
        assert_eq!(z, GrassCoordC::Infinity);
        // (1, 0) = (v1 + v2) / 2: solving a v1 + b v2 = (1, 0) gives a = b = 1/2
        let z = coord_c_of_span(Vector2::new(c(1.0, 0.0), c(0.0, 0.0))).unwrap();
        assert!(close(&z, &GrassCoordC::new(1.0, 0.0), 1e-15));
        assert!(coord_c_of_span(Vector2::zeros()).is_err());
    }

    #[test]
    fn action_examples() {
        let id = Matrix2::<Complex64>::identity();
        let z = GrassCoordC::new(0.3, -0.7);
        assert!(close(&matrix_action_coord_c(&id, &z).unwrap(), &z, 1e-15));

        // rot(pi/2): eigenvalues e^{-i pi/2}, e^{i pi/2} on v1, v2, so z -> e^{i pi} z
        let quarter = complexify(&Matrix2::new(0.0, -1.0, 1.0, 0.0));
        let image = matrix_action_coord_c(&quarter, &GrassCoordC::new(1.0, 0.0)).unwrap();
        assert!(close(&image, &GrassCoordC::new(-1.0, 0.0), 1e-15));

        let flip = complexify(&Matrix2::new(1.0, 0.0, 0.0, -1.0));
        let image = matrix_action_coord_c(&flip, &GrassCoordC::new(2.0, 0.0)).unwrap();
        assert!(close(&image, &GrassCoordC::new(0.5, 0.0), 1e-15));

        let singular = complexify(&Matrix2::new(1.0, 1.0, 1.0, 1.0));
        assert!(matrix_action_coord_c(&singular, &z).is_err());
    }

    #[test]
    fn poles_under_matrix_action() {
        let flip = complexify(&O2Element::reflection(0.1).to_matrix());
        assert_eq!(
            matrix_action_coord_c(&flip, &GrassCoordC::ZERO).unwrap(),
            GrassCoordC::Infinity
        );
        assert!(close(
            &matrix_action_coord_c(&flip, &GrassCoordC::Infinity).unwrap(),
            &GrassCoordC::ZERO,
            1e-15
        ));
        let r = complexify(&O2Element::rotation(0.37).to_matrix());
        assert_eq!(
            matrix_action_coord_c(&r, &GrassCoordC::Infinity).unwrap(),
            GrassCoordC::Infinity
        );
    }

    #[test]
    fn real_action_examples() {
        let y = GrassCoordR::new(TorusValue::new(0.3));
        let quarter = O2Element::rotation(Scalar::ratio(1, 4));
        assert!((matrix_action_coord_r(&quarter, &y).y.to_f64() - 0.8).abs() < 1e-15);

        let y = GrassCoordR::new(TorusValue::ratio(1, 4));
        let flip = O2Element::reflection(Scalar::ZERO);
        assert_eq!(matrix_action_coord_r(&flip, &y).y, TorusValue::ratio(3, 4));

        // reflection in the diagonal sends the horizontal line to the vertical
        let diag = O2Element::reflection(Scalar::ratio(1, 8));
        let y0 = GrassCoordR::new(TorusValue::ZERO);
        let via_matrix = coord_r_of_span(diag.to_matrix() * y0.direction()).unwrap();
        assert!((via_matrix.y.to_f64() - 0.5).abs() < 1e-15);
        assert_eq!(matrix_action_coord_r(&diag, &y0).y, TorusValue::ratio(1, 2));
    }

    #[test]
    fn k_and_circle_pairs() {
        assert_eq!(k_of(&GrassCoordC::ZERO), 0.0);
        assert_eq!(k_of(&GrassCoordC::Infinity), 0.0);
        assert!((k_of(&GrassCoordC::on_circle(0.3)) - 1.0).abs() < 1e-15);
        assert_eq!(k_of(&GrassCoordC::new(2.0, 0.0)), 0.5);

        let p0 = CirclePair::new(0.0).unwrap();
        assert!(in_circle_pair(&GrassCoordC::Infinity, &p0, 0.0));
        let third = CirclePair::new(1.0 / 3.0).unwrap();
        assert!(in_circle_pair(
            &GrassCoordC::new(1.0 / 3.0, 0.0),
            &third,
            0.0
        ));
        let unit = CirclePair::new(1.0).unwrap();
        assert!(!in_circle_pair(
            &GrassCoordC::new(1.0 / 3.0, 0.0),
            &unit,
            0.1
        ));
        assert!(CirclePair::new(1.5).is_err());
    }

    #[test]
    fn perp_examples() {
        assert_eq!(perp_coord(&GrassCoordC::ZERO), GrassCoordC::Infinity);
        assert_eq!(perp_coord(&GrassCoordC::Infinity), GrassCoordC::ZERO);
        let z = GrassCoordC::new(2.0, 0.0);
        let w = perp_coord(&z);
        assert!(close(&w, &GrassCoordC::new(-0.5, 0.0), 1e-15));
        // Hermitian inner product of the spanning vectors vanishes
        let inner = z.spanning_vector().dotc(&w.spanning_vector());
        assert!(inner.norm() < 1e-15);

        let y = GrassCoordR::new(TorusValue::ratio(1, 4));
        assert_eq!(perp_coord_real(&y).y, TorusValue::ratio(3, 4));
    }

    #[test]
    fn coordinates_serialize_as_pairs_or_inf() {
        let s = serde_json::to_string(&GrassCoordC::new(1.5, -2.0)).unwrap();
        assert_eq!(s, r#"{"re":1.5,"im":-2.0}"#);
        assert_eq!(
            serde_json::to_string(&GrassCoordC::Infinity).unwrap(),
            r#""inf""#
        );
        let back: GrassCoordC = serde_json::from_str(r#""inf""#).unwrap();
        assert_eq!(back, GrassCoordC::Infinity);
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
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn span_roundtrip(z in any_coord()) {
            let back = coord_c_of_span(z.spanning_vector()).unwrap();
            match z {
                GrassCoordC::Infinity => prop_assert_eq!(back, GrassCoordC::Infinity),
                _ => prop_assert!(close(&back, &z, 1e-12 * (1.0 + z.modulus()))),
            }
        }

        #[test]
        fn real_chart_matches_matrix(e in any_element(), y in 0.0f64..1.0) {
            let y = GrassCoordR::new(TorusValue::new(y));
            let closed = matrix_action_coord_r(&e, &y);
            let via_matrix = coord_r_of_span(e.to_matrix() * y.direction()).unwrap();
            prop_assert!(closed.distance(&via_matrix) <= 1e-12);
        }

        #[test]
        fn k_is_invariant(e in any_element(), z in any_coord()) {
            let image = matrix_action_coord_c(&complexify(&e.to_matrix()), &z).unwrap();
            prop_assert!((k_of(&image) - k_of(&z)).abs() <= 1e-12);
        }

        #[test]
        fn perp_intertwines_action(e in any_element(), z in any_coord(), y in 0.0f64..1.0) {
            let m = complexify(&e.to_matrix());
            let lhs = matrix_action_coord_c(&m, &perp_coord(&z)).unwrap();
            let rhs = perp_coord(&matrix_action_coord_c(&m, &z).unwrap());
            prop_assert!(lhs.chordal_distance(&rhs) <= 1e-10);

            let y = GrassCoordR::new(TorusValue::new(y));
            let lhs = matrix_action_coord_r(&e, &perp_coord_real(&y));
            let rhs = perp_coord_real(&matrix_action_coord_r(&e, &y));
            prop_assert!(lhs.distance(&rhs) <= 1e-12);
        }

        #[test]
        fn perp_is_involution(z in any_coord(), y in 0.0f64..1.0) {
            let back = perp_coord(&perp_coord(&z));
            prop_assert!(back.chordal_distance(&z) <= 1e-12);
            let y = GrassCoordR::new(TorusValue::new(y));
            prop_assert!(perp_coord_real(&perp_coord_real(&y)).distance(&y) <= 1e-12);
        }
    }
}
