//! First-return maps of skew systems on base arcs `[a, b) x fibre`, the
//! rescaling of the arc to the unit circle, and numerical checks of the
//! inducing chain S -> S_B -> P = S_B^2 -> Q for the rotation/flip cocycle.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::base::{BasePoint, BaseSystem};
use crate::error::{domain, Error, Result};
use crate::o2::CocycleGenerator;
use crate::scalar::{Scalar, TorusValue};
use crate::skew::{FibreKind, FibrePoint, SkewPoint, SkewSystem};
use crate::stats::circular_mean;

pub const DEFAULT_RETURN_CAP: u64 = 1_000_000;

/// A map on skew points whose base is parametrized by a position in
/// `[0, 1)`. Points are always carried in the coordinates of the underlying
/// skew system; `position` reads them in the map's own chart.
pub trait SectionDynamics: Sync {
    fn advance(&self, p: &SkewPoint) -> Result<SkewPoint>;
    fn position(&self, p: &SkewPoint) -> Result<f64>;
    fn point_at(&self, position: f64, fibre: FibrePoint) -> Option<SkewPoint>;
    fn fibre_kind(&self) -> FibreKind;
    fn is_rotation_base(&self) -> bool;
}

impl SectionDynamics for SkewSystem {
    fn advance(&self, p: &SkewPoint) -> Result<SkewPoint> {
        self.step(p)
    }

    fn position(&self, p: &SkewPoint) -> Result<f64> {
        p.base
            .circle()
            .map(TorusValue::to_f64)
            .ok_or_else(|| domain("inducing needs a circle base"))
    }

    fn point_at(&self, position: f64, fibre: FibrePoint) -> Option<SkewPoint> {
        self.base
            .is_rotation()
            .then(|| SkewPoint::new(BasePoint::Circle(TorusValue::new(position)), fibre))
    }

    fn fibre_kind(&self) -> FibreKind {
        self.fibre
    }

    fn is_rotation_base(&self) -> bool {
        self.base.is_rotation()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `x -> (x - a) / (b - a)`
    #[default]
    Preserving,
    /// `x -> (b - x) / (b - a)`
    Reversing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Section {
    pub start: f64,
    pub end: f64,
}

impl Section {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !(0.0 <= start && start < end && end <= 1.0) {
            return Err(domain(format!(
                "section [{start}, {end}) is not a nonempty arc of [0, 1)"
            )));
        }
        Ok(Section { start, end })
    }

    pub fn full() -> Self {
        Section {
            start: 0.0,
            end: 1.0,
        }
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    pub fn contains(&self, x: f64) -> bool {
        self.start <= x && x < self.end
    }

    pub fn rescale(&self, x: f64, orientation: Orientation) -> f64 {
        let s = match orientation {
            Orientation::Preserving => (x - self.start) / self.length(),
            Orientation::Reversing => (self.end - x) / self.length(),
        };
        s.rem_euclid(1.0)
    }

    pub fn unrescale(&self, s: f64, orientation: Orientation) -> f64 {
        let x = match orientation {
            Orientation::Preserving => self.start + s * self.length(),
            Orientation::Reversing if s == 0.0 => self.start,
            Orientation::Reversing => self.end - s * self.length(),
        };
        if self.contains(x) {
            x
        } else {
            self.start
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReturnEvent {
    pub entry: SkewPoint,
    pub return_time: u64,
    pub exit: SkewPoint,
}

#[derive(Debug, Clone)]
pub struct InducedSystem<D> {
    pub parent: D,
    pub section: Section,
    pub orientation: Orientation,
    pub cap: u64,
}

impl<D: SectionDynamics> InducedSystem<D> {
    pub fn new(parent: D, section: Section) -> Self {
        InducedSystem {
            parent,
            section,
            orientation: Orientation::Preserving,
            cap: DEFAULT_RETURN_CAP,
        }
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn with_cap(mut self, cap: u64) -> Self {
        self.cap = cap;
        self
    }

    pub fn in_section(&self, p: &SkewPoint) -> Result<bool> {
        Ok(self.section.contains(self.parent.position(p)?))
    }

    pub fn first_return(&self, p: &SkewPoint) -> Result<ReturnEvent> {
        if !self.in_section(p)? {
            return Err(Error::Precondition(format!(
                "entry point {} is outside the section",
                p.base
            )));
        }
        let mut q = *p;
        for k in 1..=self.cap {
            q = self.parent.advance(&q)?;
            if self.in_section(&q)? {
                return Ok(ReturnEvent {
                    entry: *p,
                    return_time: k,
                    exit: q,
                });
            }
        }
        Err(Error::Resource(format!(
            "no return to the section within {} steps",
            self.cap
        )))
    }

    /// Independent entry points, uniform in the section and in the fibre.
    pub fn sample_entries(&self, count: usize, seed: u64) -> Result<Vec<SkewPoint>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kind = self.parent.fibre_kind();
        (0..count)
            .map(|_| {
                let s = rng.random::<f64>();
                let fibre = kind.sample_with(&mut rng);
                self.point_at(s, fibre)
                    .ok_or_else(|| domain("inducing needs a circle base"))
            })
            .collect()
    }

    pub fn sample_events(&self, count: usize, seed: u64) -> Result<Vec<ReturnEvent>> {
        let entries = self.sample_entries(count, seed)?;
        entries.par_iter().map(|p| self.first_return(p)).collect()
    }
}

impl<D: SectionDynamics> SectionDynamics for InducedSystem<D> {
    fn advance(&self, p: &SkewPoint) -> Result<SkewPoint> {
        Ok(self.first_return(p)?.exit)
    }

    fn position(&self, p: &SkewPoint) -> Result<f64> {
        Ok(self
            .section
            .rescale(self.parent.position(p)?, self.orientation))
    }

    fn point_at(&self, position: f64, fibre: FibrePoint) -> Option<SkewPoint> {
        self.parent
            .point_at(self.section.unrescale(position, self.orientation), fibre)
    }

    fn fibre_kind(&self) -> FibreKind {
        self.parent.fibre_kind()
    }

    fn is_rotation_base(&self) -> bool {
        self.parent.is_rotation_base()
    }
}

/// The map applied twice.
#[derive(Debug, Clone)]
pub struct Squared<D>(pub D);

impl<D: SectionDynamics> SectionDynamics for Squared<D> {
    fn advance(&self, p: &SkewPoint) -> Result<SkewPoint> {
        self.0.advance(&self.0.advance(p)?)
    }

    fn position(&self, p: &SkewPoint) -> Result<f64> {
        self.0.position(p)
    }

    fn point_at(&self, position: f64, fibre: FibrePoint) -> Option<SkewPoint> {
        self.0.point_at(position, fibre)
    }

    fn fibre_kind(&self) -> FibreKind {
        self.0.fibre_kind()
    }

    fn is_rotation_base(&self) -> bool {
        self.0.is_rotation_base()
    }
}

pub fn return_time_histogram(events: &[ReturnEvent]) -> BTreeMap<u64, u64> {
    let mut h = BTreeMap::new();
    for e in events {
        *h.entry(e.return_time).or_insert(0) += 1;
    }
    h
}

/// Mean return time times the section length; 1 for an ergodic parent.
pub fn kac_product(events: &[ReturnEvent], section_length: f64) -> f64 {
    if events.is_empty() {
        return f64::NAN;
    }
    let total: u64 = events.iter().map(|e| e.return_time).sum();
    total as f64 / events.len() as f64 * section_length
}

/// Rotation number of the induced base map, read off `samples` steps of one
/// orbit in the induced chart.
pub fn induced_rotation_number<D: SectionDynamics>(
    ind: &InducedSystem<D>,
    samples: usize,
) -> Result<TorusValue> {
    if !ind.is_rotation_base() {
        return Err(domain(
            "induced rotation number needs a circle rotation base",
        ));
    }
    let mut p = ind
        .point_at(0.5, ind.fibre_kind().origin())
        .ok_or_else(|| domain("inducing needs a circle base"))?;
    let mut increments = Vec::with_capacity(samples);
    for _ in 0..samples {
        let s0 = ind.position(&p)?;
        p = ind.advance(&p)?;
        increments.push(ind.position(&p)? - s0);
    }
    Ok(TorusValue::new(circular_mean(increments)))
}

/// `frac(1 / eta)`
pub fn beta_of(eta: f64) -> f64 {
    (1.0 / eta).fract()
}

/// `frac(1 / (2 beta))`
pub fn zeta_of(beta: f64) -> f64 {
    (1.0 / (2.0 * beta)).fract()
}

/// Example 2's circle extension over rotation by `eta`.
pub fn example2_system(eta: f64, alpha: Scalar) -> Result<SkewSystem> {
    if !(0.0 < eta && eta < 1.0) {
        return Err(domain(format!("eta = {eta} must lie in (0, 1)")));
    }
    SkewSystem::new(
        BaseSystem::rotation(eta),
        CocycleGenerator::Example2 {
            alpha,
            eta: TorusValue::new(eta),
        },
        FibreKind::Torus,
    )
}

/// S induced on `[1 - eta, 1) x T`, rescaled so the induced base map is
/// rotation by `frac(1 / eta)`.
pub fn sb_system(eta: f64, alpha: Scalar) -> Result<InducedSystem<SkewSystem>> {
    let parent = example2_system(eta, alpha)?;
    Ok(InducedSystem::new(parent, Section::new(1.0 - eta, 1.0)?)
        .with_orientation(Orientation::Reversing))
}

pub fn p_system(eta: f64, alpha: Scalar) -> Result<Squared<InducedSystem<SkewSystem>>> {
    Ok(Squared(sb_system(eta, alpha)?))
}

/// P induced on `[1 - 2 beta, 1) x T` in the given chart orientation.
pub fn q_system(
    eta: f64,
    alpha: Scalar,
    orientation: Orientation,
) -> Result<InducedSystem<Squared<InducedSystem<SkewSystem>>>> {
    let beta = beta_of(eta);
    if 2.0 * beta >= 1.0 {
        return Err(domain(format!(
            "2 beta = {} >= 1 leaves no second section",
            2.0 * beta
        )));
    }
    Ok(
        InducedSystem::new(p_system(eta, alpha)?, Section::new(1.0 - 2.0 * beta, 1.0)?)
            .with_orientation(orientation),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InducingReport {
    pub stage: String,
    pub section: [f64; 2],
    pub orientation: Orientation,
    pub beta: f64,
    pub zeta: Option<f64>,
    pub fitted_k: Option<i64>,
    pub max_discrepancy: f64,
    pub event_count: usize,
    pub return_time_histogram: BTreeMap<u64, u64>,
    pub kac_product: f64,
    pub all_fibre_maps_reversing: Option<bool>,
    pub fibre_sign: Option<i8>,
    pub fibre_offset: Option<f64>,
    pub branch_fractions: Option<[f64; 2]>,
    pub increments_plus_minus_alpha: Option<bool>,
}

fn torus_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

fn fibre_y(p: &SkewPoint) -> Result<f64> {
    p.fibre
        .torus()
        .map(TorusValue::to_f64)
        .ok_or_else(|| domain("inducing checks need the circle fibre"))
}

/// Sign and constant of the fibre map `y -> c + sign * y` over an event's
/// base path, probed with a second fibre point a quarter turn away.
fn fibre_action<D: SectionDynamics>(map: &D, event: &ReturnEvent) -> Result<(i8, f64)> {
    let y = fibre_y(&event.entry)?;
    let y1 = fibre_y(&event.exit)?;
    let probe = SkewPoint::new(
        event.entry.base,
        FibrePoint::Torus(TorusValue::new(y + 0.25)),
    );
    let y2 = fibre_y(&map.advance(&probe)?)?;
    let d = (y2 - y1).rem_euclid(1.0);
    if (d - 0.25).abs() < 1e-9 {
        Ok((1, (y1 - y).rem_euclid(1.0)))
    } else if (d - 0.75).abs() < 1e-9 {
        Ok((-1, (y1 + y).rem_euclid(1.0)))
    } else {
        Err(Error::Invariant(format!(
            "induced fibre map is not an isometry (probe gap {d})"
        )))
    }
}

struct SbEvent {
    upper_branch: bool,
    s: f64,
    s_next: f64,
    y: f64,
    y_next: f64,
    sign: i8,
    return_time: u64,
}

/// Compares the induced map on `[1 - eta, 1) x T` with
/// `S_B(x, y) = (x + beta, k alpha - y)` on `[1 - beta, 1)` and
/// `(x + beta, (k - 1) alpha - y)` on `[0, 1 - beta)`, fitting the integer `k`.
pub fn verify_sb_formula(
    eta: f64,
    alpha: Scalar,
    samples: usize,
    seed: u64,
) -> Result<InducingReport> {
    let sb = sb_system(eta, alpha)?;
    let beta = beta_of(eta);
    let a = alpha.to_f64();
    let events = sb.sample_events(samples, seed)?;
    let rows: Vec<SbEvent> = events
        .par_iter()
        .map(|e| {
            let (sign, _) = fibre_action(&sb, e)?;
            let s = sb.position(&e.entry)?;
            Ok(SbEvent {
                upper_branch: s >= 1.0 - beta,
                s,
                s_next: sb.position(&e.exit)?,
                y: fibre_y(&e.entry)?,
                y_next: fibre_y(&e.exit)?,
                sign,
                return_time: e.return_time,
            })
        })
        .collect::<Result<_>>()?;

    let discrepancy = |k: i64| {
        rows.iter()
            .map(|r| {
                let m = if r.upper_branch { k } else { k - 1 };
                let predicted = m as f64 * a - r.y;
                torus_dist(r.y_next, predicted).max(torus_dist(r.s_next, r.s + beta))
            })
            .fold(0.0, f64::max)
    };

    let fitted_k = if torus_dist(a, 0.0) < 1e-12 {
        None
    } else {
        let upper_time = rows
            .iter()
            .filter(|r| r.upper_branch)
            .map(|r| r.return_time)
            .max()
            .unwrap_or(0) as i64;
        let scored: Vec<(i64, f64)> = (-32..=32).map(|k| (k, discrepancy(k))).collect();
        let best = scored.iter().map(|&(_, d)| d).fold(f64::INFINITY, f64::min);
        scored
            .iter()
            .filter(|&&(_, d)| d <= best + 1e-12)
            .min_by_key(|&&(k, _)| ((k - upper_time).abs(), k))
            .map(|&(k, _)| k)
    };
    let max_discrepancy = discrepancy(fitted_k.unwrap_or(0));

    Ok(InducingReport {
        stage: "S_B".into(),
        section: [sb.section.start, sb.section.end],
        orientation: sb.orientation,
        beta,
        zeta: None,
        fitted_k,
        max_discrepancy,
        event_count: events.len(),
        return_time_histogram: return_time_histogram(&events),
        kac_product: kac_product(&events, sb.section.length()),
        all_fibre_maps_reversing: Some(rows.iter().all(|r| r.sign == -1)),
        fibre_sign: None,
        fibre_offset: None,
        branch_fractions: Some(branch_fractions(rows.iter().map(|r| !r.upper_branch))),
        increments_plus_minus_alpha: None,
    })
}

fn branch_fractions(lower: impl Iterator<Item = bool>) -> [f64; 2] {
    let (mut lo, mut n) = (0usize, 0usize);
    for is_lower in lower {
        n += 1;
        lo += is_lower as usize;
    }
    let f = lo as f64 / n.max(1) as f64;
    [f, 1.0 - f]
}

/// Induces `P = S_B^2` on `[1 - 2 beta, 1) x T` and compares it with
/// `Q(x, y) = (x + zeta, y - alpha)` on `[0, 1/2)` and `(x + zeta, y + alpha)`
/// on `[1/2, 1)`. The chart is fitted: base orientation, a fibre flip, and
/// a fibre offset.
pub fn verify_q_formula(
    eta: f64,
    alpha: Scalar,
    samples: usize,
    seed: u64,
) -> Result<InducingReport> {
    let beta = beta_of(eta);
    let zeta = zeta_of(beta);
    let a = alpha.to_f64();
    let mut best: Option<InducingReport> = None;
    for orientation in [Orientation::Preserving, Orientation::Reversing] {
        let q = q_system(eta, alpha, orientation)?;
        let events = q.sample_events(samples, seed)?;
        let rows: Vec<(f64, f64, f64, f64)> = events
            .iter()
            .map(|e| {
                Ok((
                    q.position(&e.entry)?,
                    q.position(&e.exit)?,
                    fibre_y(&e.entry)?,
                    fibre_y(&e.exit)?,
                ))
            })
            .collect::<Result<_>>()?;
        let increments_ok = rows
            .iter()
            .all(|&(_, _, y, y1)| torus_dist(y1 - y, a) <= 1e-8 || torus_dist(y1 - y, -a) <= 1e-8);
        for sign in [1i8, -1] {
            let residuals: Vec<f64> = rows
                .iter()
                .map(|&(s, _, y, y1)| {
                    let inc = if s < 0.5 { -a } else { a };
                    (y1 - y - sign as f64 * inc).rem_euclid(1.0)
                })
                .collect();
            let offset = circular_mean(residuals.iter().copied());
            let max_discrepancy = rows
                .iter()
                .zip(&residuals)
                .map(|(&(s, s1, _, _), &r)| torus_dist(s1, s + zeta).max(torus_dist(r, offset)))
                .fold(0.0, f64::max);
            if best
                .as_ref()
                .is_some_and(|b| b.max_discrepancy <= max_discrepancy)
            {
                continue;
            }
            best = Some(InducingReport {
                stage: "Q".into(),
                section: [q.section.start, q.section.end],
                orientation,
                beta,
                zeta: Some(zeta),
                fitted_k: None,
                max_discrepancy,
                event_count: events.len(),
                return_time_histogram: return_time_histogram(&events),
                kac_product: kac_product(&events, q.section.length()),
                all_fibre_maps_reversing: None,
                fibre_sign: Some(sign),
                fibre_offset: Some(if offset > 0.5 { offset - 1.0 } else { offset }),
                branch_fractions: Some(branch_fractions(rows.iter().map(|r| r.0 < 0.5))),
                increments_plus_minus_alpha: Some(increments_ok),
            });
        }
    }
    best.ok_or_else(|| Error::Invariant("no Q chart was evaluated".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn root2() -> f64 {
        2f64.sqrt() - 1.0
    }

    fn alpha() -> Scalar {
        Scalar::Approx(3f64.sqrt() - 1.0)
    }

    #[test]
    fn section_return_times_are_two_and_three() {
        let s = example2_system(root2(), alpha()).unwrap();
        let ind = InducedSystem::new(s, Section::new(1.0 - root2(), 1.0).unwrap());
        let events = ind.sample_events(10_000, 1).unwrap();
        let h = return_time_histogram(&events);
        assert_eq!(h.keys().copied().collect::<Vec<_>>(), vec![2, 3]);
        assert!((kac_product(&events, root2()) - 1.0).abs() < 0.01);
        for e in events.iter().take(200) {
            let mut p = e.entry;
            for k in 1..=e.return_time {
                p = ind.parent.step(&p).unwrap();
                assert_eq!(ind.in_section(&p).unwrap(), k == e.return_time);
            }
            assert_eq!(p, e.exit);
        }
    }

    #[test]
    fn full_section_returns_immediately() {
        let s = example2_system(root2(), alpha()).unwrap();
        let ind = InducedSystem::new(s, Section::full());
        let events = ind.sample_events(1000, 2).unwrap();
        assert!(events.iter().all(|e| e.return_time == 1));
        let rho = induced_rotation_number(&ind, 1000).unwrap();
        assert!(rho.distance(TorusValue::new(root2())) < 1e-12);
    }

    #[test]
    fn rotation_numbers() {
        let s = example2_system(root2(), alpha()).unwrap();
        let ind = InducedSystem::new(s, Section::new(1.0 - root2(), 1.0).unwrap())
            .with_orientation(Orientation::Reversing);
        let rho = induced_rotation_number(&ind, 10_000).unwrap();
        assert!(rho.distance(TorusValue::new(root2())) < 1e-9);

        let s = example2_system(0.7, alpha()).unwrap();
        let rev = InducedSystem::new(s.clone(), Section::new(0.3, 1.0).unwrap())
            .with_orientation(Orientation::Reversing);
        let rho = induced_rotation_number(&rev, 10_000).unwrap();
        assert!(rho.distance(TorusValue::new(3.0 / 7.0)) < 1e-9);
        let fwd = InducedSystem::new(s, Section::new(0.3, 1.0).unwrap());
        let rho = induced_rotation_number(&fwd, 10_000).unwrap();
        assert!(rho.distance(TorusValue::new(4.0 / 7.0)) < 1e-9);
    }

    #[test]
    fn bernoulli_base_is_rejected() {
        let s = SkewSystem::new(
            BaseSystem::Bernoulli,
            CocycleGenerator::Example3 { alpha: alpha() },
            FibreKind::Torus,
        )
        .unwrap();
        let ind = InducedSystem::new(s, Section::new(0.5, 1.0).unwrap());
        assert!(matches!(
            induced_rotation_number(&ind, 10),
            Err(Error::Domain(_))
        ));
        assert!(ind.sample_events(1, 0).is_err());
    }

    #[test]
    fn outside_entry_and_cap() {
        let s = example2_system(root2(), alpha()).unwrap();
        let ind =
            InducedSystem::new(s.clone(), Section::new(0.5, 0.5 + 1e-9).unwrap()).with_cap(1000);
        let p = SkewPoint::new(
            BasePoint::Circle(TorusValue::new(0.5)),
            FibreKind::Torus.origin(),
        );
        assert!(matches!(ind.first_return(&p), Err(Error::Resource(_))));
        let q = SkewPoint::new(
            BasePoint::Circle(TorusValue::new(0.1)),
            FibreKind::Torus.origin(),
        );
        assert!(matches!(ind.first_return(&q), Err(Error::Precondition(_))));
        assert!(Section::new(0.5, 0.5).is_err());
    }

    #[test]
    fn sb_formula_with_irrational_alpha() {
        let r = verify_sb_formula(root2(), alpha(), 10_000, 3).unwrap();
        assert_eq!(r.fitted_k, Some(2));
        assert!(r.max_discrepancy <= 1e-9, "{}", r.max_discrepancy);
        assert_eq!(r.all_fibre_maps_reversing, Some(true));
        assert!((r.beta - root2()).abs() < 1e-12);
    }

    #[test]
    fn sb_formula_with_rational_alpha() {
        let r = verify_sb_formula(root2(), Scalar::ratio(1, 3), 10_000, 4).unwrap();
        assert!(matches!(r.fitted_k, Some(2) | Some(3)));
        assert!(r.max_discrepancy <= 1e-9);
    }

    #[test]
    fn sb_formula_with_zero_alpha() {
        let r = verify_sb_formula(root2(), Scalar::ZERO, 2000, 5).unwrap();
        assert_eq!(r.fitted_k, None);
        assert!(r.max_discrepancy <= 1e-9);
        assert_eq!(r.all_fibre_maps_reversing, Some(true));
    }

    #[test]
    fn q_formula() {
        let r = verify_q_formula(root2(), alpha(), 10_000, 6).unwrap();
        assert!(r.max_discrepancy <= 1e-8, "{r:?}");
        let [lo, hi] = r.branch_fractions.unwrap();
        assert!((lo - 0.5).abs() < 0.02 && (hi - 0.5).abs() < 0.02);
        assert_eq!(r.increments_plus_minus_alpha, Some(true));
        assert!((r.kac_product - 1.0).abs() < 0.01);
        assert!((r.zeta.unwrap() - zeta_of(root2())).abs() < 1e-12);
    }

    #[test]
    fn q_needs_a_short_second_section() {
        assert!(matches!(
            verify_q_formula(0.6, alpha(), 10, 0),
            Err(Error::Domain(_))
        ));
    }
}
