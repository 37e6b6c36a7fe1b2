//! O2(R) in angle coordinates, cocycle generators and cocycle products.
//!
//! Angles are measured in turns. A rotation by `t` turns is the matrix of
//! angle `2*pi*t`; a reflection with parameter `b` reflects in the line at
//! angle `2*pi*b`, so `b` lives in `[0, 1/2)`.

use std::f64::consts::TAU;
use std::fmt;

use nalgebra::{Matrix2, Vector2};
use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::base::{BasePoint, BaseSystem};
use crate::error::{domain, Error, Result};
use crate::scalar::{Scalar, TorusValue};

pub const DEFAULT_PRODUCT_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum O2Element {
    Rotation { t: TorusValue },
    Reflection { b: Scalar },
}

fn half_turn() -> Rational64 {
    Rational64::new(1, 2)
}

impl O2Element {
    pub const IDENTITY: O2Element = O2Element::Rotation {
        t: TorusValue::ZERO,
    };

    pub fn rotation(t: impl Into<Scalar>) -> Self {
        O2Element::Rotation {
            t: TorusValue::new(t),
        }
    }

    pub fn reflection(b: impl Into<Scalar>) -> Self {
        O2Element::Reflection {
            b: b.into().rem(half_turn()),
        }
    }

    pub fn is_rotation(&self) -> bool {
        matches!(self, O2Element::Rotation { .. })
    }

    pub fn is_reflection(&self) -> bool {
        !self.is_rotation()
    }

    pub fn is_exact(&self) -> bool {
        match self {
            O2Element::Rotation { t } => t.is_exact(),
            O2Element::Reflection { b } => b.is_exact(),
        }
    }

    /// Returns `second ∘ first`: apply `first`, then `second`.
    pub fn compose(first: &O2Element, second: &O2Element) -> O2Element {
        use O2Element::*;
        match (*first, *second) {
            (Rotation { t: t1 }, Rotation { t: t2 }) => Rotation { t: t1 + t2 },
            (Reflection { b: b1 }, Reflection { b: b2 }) => O2Element::rotation((b2 - b1).scale(2)),
            (Reflection { b }, Rotation { t }) => O2Element::reflection(b + t.value().half()),
            (Rotation { t }, Reflection { b }) => O2Element::reflection(b - t.value().half()),
        }
    }

    /// Convenience form of [`O2Element::compose`]: `self` first, then `next`.
    pub fn then(&self, next: &O2Element) -> O2Element {
        O2Element::compose(self, next)
    }

    pub fn inverse(&self) -> O2Element {
        match *self {
            O2Element::Rotation { t } => O2Element::Rotation { t: -t },
            r @ O2Element::Reflection { .. } => r,
        }
    }

    pub fn to_matrix(&self) -> Matrix2<f64> {
        match *self {
            O2Element::Rotation { t } => {
                let (s, c) = (TAU * t.to_f64()).sin_cos();
                Matrix2::new(c, -s, s, c)
            }
            O2Element::Reflection { b } => {
                let (s, c) = (2.0 * TAU * b.to_f64()).sin_cos();
                Matrix2::new(c, s, s, -c)
            }
        }
    }

    /// +1 for rotations, -1 for reflections.
    pub fn det_sign(&self) -> i32 {
        if self.is_rotation() {
            1
        } else {
            -1
        }
    }
}

impl fmt::Display for O2Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            O2Element::Rotation { t } => write!(f, "rot({t})"),
            O2Element::Reflection { b } => write!(f, "ref({b})"),
        }
    }
}

/// One piece of a table-driven generator on a circle base: from `start`
/// (inclusive) to the next piece's start (exclusive) the generator is
/// `element`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TablePiece {
    pub start: Scalar,
    pub element: O2Element,
}

/// The generator A(1, ·) of a cocycle.
///
/// `alpha` is the rotation parameter of the rotation/flip examples: the
/// rotation matrix turns by `pi * alpha`, i.e. `alpha / 2` turns, and the
/// induced circle map translates by `alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CocycleGenerator {
    /// Rotation by `pi * x` over a circle rotation.
    Example1,
    /// Rotation by `pi * alpha` on `[0, 1 - eta)`, reflection in the
    /// horizontal axis on `[1 - eta, 1)`.
    Example2 { alpha: Scalar, eta: TorusValue },
    /// Rotation by `pi * alpha` when `x_0 = 0`, horizontal reflection when
    /// `x_0 = 1`, over the Bernoulli shift.
    Example3 { alpha: Scalar },
    /// Constant rotation by `pi / 3` over a circle rotation.
    Cex1,
    /// Rotation by `pi / 3` when `x_0 = 0`, horizontal reflection when
    /// `x_0 = 1`, over the Bernoulli shift.
    Cex2,
    /// Piecewise-constant generator on half-open arcs of a circle base.
    Table { pieces: Vec<TablePiece> },
}

impl CocycleGenerator {
    pub fn table(mut pieces: Vec<TablePiece>) -> Result<Self> {
        pieces.sort_by(|a, b| {
            a.start
                .partial_cmp(&b.start)
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        if pieces.first().map(|p| p.start) != Some(Scalar::ZERO)
            && pieces.first().map(|p| p.start.to_f64()) != Some(0.0)
        {
            return Err(domain("table generator must start at 0"));
        }
        for w in pieces.windows(2) {
            if !(w[0].start < w[1].start) {
                return Err(domain("table breakpoints must be strictly increasing"));
            }
        }
        if pieces
            .iter()
            .any(|p| p.start.to_f64() >= 1.0 || p.start.to_f64() < 0.0)
        {
            return Err(domain("table breakpoints must lie in [0, 1)"));
        }
        Ok(CocycleGenerator::Table { pieces })
    }

    pub fn label(&self) -> String {
        match self {
            CocycleGenerator::Example1 => "example1".into(),
            CocycleGenerator::Example2 { alpha, eta } => {
                format!("example2(alpha={alpha},eta={eta})")
            }
            CocycleGenerator::Example3 { alpha } => format!("example3(alpha={alpha})"),
            CocycleGenerator::Cex1 => "cex1".into(),
            CocycleGenerator::Cex2 => "cex2".into(),
            CocycleGenerator::Table { pieces } => {
                let parts: Vec<String> = pieces
                    .iter()
                    .map(|p| format!("{}:{}", p.start, p.element))
                    .collect();
                format!("table({})", parts.join(","))
            }
        }
    }

    /// True when the generator is defined on circle base points.
    pub fn wants_circle_base(&self) -> bool {
        !matches!(
            self,
            CocycleGenerator::Example3 { .. } | CocycleGenerator::Cex2
        )
    }

    pub fn generator_at(&self, x: &BasePoint) -> Result<O2Element> {
        match (self, x) {
            (CocycleGenerator::Example1, BasePoint::Circle(v)) => {
                Ok(O2Element::rotation(v.value().half()))
            }
            (CocycleGenerator::Example2 { alpha, eta }, BasePoint::Circle(v)) => {
                let split = Scalar::ratio(1, 1) - eta.value();
                if v.value() < split {
                    Ok(O2Element::rotation(alpha.half()))
                } else {
                    Ok(O2Element::reflection(Scalar::ZERO))
                }
            }
            (CocycleGenerator::Cex1, BasePoint::Circle(_)) => {
                Ok(O2Element::rotation(Scalar::ratio(1, 6)))
            }
            (CocycleGenerator::Table { pieces }, BasePoint::Circle(v)) => {
                let idx = pieces.partition_point(|p| p.start <= v.value());
                Ok(pieces[idx.saturating_sub(1)].element)
            }
            (CocycleGenerator::Example3 { alpha }, BasePoint::Sequence(s)) => {
                if s.symbol(0) == 0 {
                    Ok(O2Element::rotation(alpha.half()))
                } else {
                    Ok(O2Element::reflection(Scalar::ZERO))
                }
            }
            (CocycleGenerator::Cex2, BasePoint::Sequence(s)) => {
                if s.symbol(0) == 0 {
                    Ok(O2Element::rotation(Scalar::ratio(1, 6)))
                } else {
                    Ok(O2Element::reflection(Scalar::ZERO))
                }
            }
            _ => Err(domain(format!(
                "generator {} is not defined on base point {x}",
                self.label()
            ))),
        }
    }

    /// The finite set of values the generator takes, when it is finite.
    pub fn value_set(&self) -> Option<Vec<O2Element>> {
        match self {
            CocycleGenerator::Example1 => None,
            CocycleGenerator::Example2 { alpha, .. } | CocycleGenerator::Example3 { alpha } => {
                Some(vec![
                    O2Element::rotation(alpha.half()),
                    O2Element::reflection(Scalar::ZERO),
                ])
            }
            CocycleGenerator::Cex1 => Some(vec![O2Element::rotation(Scalar::ratio(1, 6))]),
            CocycleGenerator::Cex2 => Some(vec![
                O2Element::rotation(Scalar::ratio(1, 6)),
                O2Element::reflection(Scalar::ZERO),
            ]),
            CocycleGenerator::Table { pieces } => {
                let mut out: Vec<O2Element> = Vec::new();
                for p in pieces {
                    if !out.contains(&p.element) {
                        out.push(p.element);
                    }
                }
                Some(out)
            }
        }
    }
}

/// A(n, x): the product of generators along the orbit, identity for n = 0,
/// inverses along the backward orbit for n < 0.
pub fn cocycle_product(
    g: &CocycleGenerator,
    sys: &BaseSystem,
    x: &BasePoint,
    n: i64,
) -> Result<O2Element> {
    cocycle_product_capped(g, sys, x, n, DEFAULT_PRODUCT_CAP)
}

pub fn cocycle_product_capped(
    g: &CocycleGenerator,
    sys: &BaseSystem,
    x: &BasePoint,
    n: i64,
    cap: u64,
) -> Result<O2Element> {
    if n.unsigned_abs() > cap {
        return Err(Error::Resource(format!(
            "|n| = {} exceeds cap {cap}",
            n.unsigned_abs()
        )));
    }
    let mut acc = O2Element::IDENTITY;
    let mut p = *x;
    if n >= 0 {
        for _ in 0..n {
            acc = acc.then(&g.generator_at(&p)?);
            p = sys.step(&p);
        }
    } else {
        for _ in 0..n.unsigned_abs() {
            p = sys.step_inverse(&p);
            acc = acc.then(&g.generator_at(&p)?.inverse());
        }
    }
    Ok(acc)
}

/// `(1/n) log(|A(n,x) v| / |v|)`, computed by pushing `v` through the
/// generator matrices one step at a time.
pub fn growth_check(
    g: &CocycleGenerator,
    sys: &BaseSystem,
    x: &BasePoint,
    v: Vector2<f64>,
    n: u64,
) -> Result<f64> {
    let norm0 = v.norm();
    if !(norm0 > 0.0) {
        return Err(domain("growth check needs a nonzero vector"));
    }
    if n == 0 {
        return Err(domain("growth check needs n >= 1"));
    }
    if n > DEFAULT_PRODUCT_CAP {
        return Err(Error::Resource(format!(
            "n = {n} exceeds cap {DEFAULT_PRODUCT_CAP}"
        )));
    }
    let mut w = v;
    let mut p = *x;
    for _ in 0..n {
        w = g.generator_at(&p)?.to_matrix() * w;
        p = sys.step(&p);
    }
    Ok((w.norm() / norm0).ln() / n as f64)
}
