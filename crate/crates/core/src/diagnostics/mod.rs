//! Numerical ergodicity evidence: Birkhoff averages of character
//! observables across many starts, and an Ulam transfer-matrix detector for
//! grid-aligned invariant sets.
//!
//! Every verdict here is heuristic. "Ergodic-consistent" means the finite
//! data did not contradict ergodicity, nothing more.

mod ulam;

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::base::BasePoint;
use crate::error::{domain, Error, Result};
use crate::skew::{tau, FibreKind, FibrePoint, SkewPoint, SkewSystem};
use crate::stats::dispersion;

pub use ulam::{invariant_vector_support, ulam_discretize, UlamMatrix, UlamSupport};

/// Number of leading steps over which invariance residuals are measured.
pub const RESIDUAL_WINDOW: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

/// Test functions on skew spaces, all bounded by 1 in modulus.
///
/// Base frequency `j` means `e^{2 pi i j x}` over a circle base and the Walsh
/// function of `|j|` (product of `(-1)^{x_i}` over the set bits `i` of
/// `|j|`) over the Bernoulli shift. Over the sphere fibre, fibre frequencies
/// are read through `tau`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Observable {
    Constant,
    TorusCharacter { j: i32, k: i32 },
    FibreCosine { k: i32 },
    Z2Character { j: i32, s: Sign },
    Z3Character { j: i32, chi: u8 },
}

impl Observable {
    /// Integral against the product of the base measure and the fibre
    /// reference measure.
    pub fn space_average(&self) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        match *self {
            Observable::Constant => one,
            Observable::TorusCharacter { j: 0, k: 0 } => one,
            Observable::FibreCosine { k: 0 } => one,
            Observable::Z2Character {
                j: 0,
                s: Sign::Plus,
            } => one,
            Observable::Z3Character { j: 0, chi } if chi % 3 == 0 => one,
            _ => Complex64::new(0.0, 0.0),
        }
    }

    pub fn is_constant(&self) -> bool {
        self.space_average() != Complex64::new(0.0, 0.0)
    }

    fn base_frequency(&self) -> i32 {
        match *self {
            Observable::TorusCharacter { j, .. }
            | Observable::Z2Character { j, .. }
            | Observable::Z3Character { j, .. } => j,
            _ => 0,
        }
    }

    fn fibre_frequency(&self) -> i32 {
        match *self {
            Observable::TorusCharacter { k, .. } | Observable::FibreCosine { k } => k,
            _ => 0,
        }
    }

    pub fn eval(&self, p: &SkewPoint) -> Result<Complex64> {
        let mut f = Features::new(
            self.base_frequency().unsigned_abs(),
            self.fibre_frequency().unsigned_abs(),
        );
        f.fill(p)?;
        self.eval_with(&f)
    }

    fn eval_with(&self, f: &Features) -> Result<Complex64> {
        let unsupported = || domain(format!("observable {self} does not apply to this fibre"));
        Ok(match *self {
            Observable::Constant => Complex64::new(1.0, 0.0),
            Observable::TorusCharacter { j, k } => {
                f.base(j) * f.fibre.as_ref().ok_or_else(unsupported)?.power(k)
            }
            Observable::FibreCosine { k } => {
                Complex64::new(f.fibre.as_ref().ok_or_else(unsupported)?.power(k).re, 0.0)
            }
            Observable::Z2Character { j, s } => {
                let a = f.z2.ok_or_else(unsupported)?;
                let sign = if s == Sign::Minus && a == 1 {
                    -1.0
                } else {
                    1.0
                };
                f.base(j) * sign
            }
            Observable::Z3Character { j, chi } => {
                let a = f.z3.ok_or_else(unsupported)?;
                let m = (chi as u32 * a as u32) % 3;
                f.base(j) * Complex64::from_polar(1.0, TAU * m as f64 / 3.0)
            }
        })
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::Constant => write!(f, "const"),
            Observable::TorusCharacter { j, k } => write!(f, "torus(j={j},k={k})"),
            Observable::FibreCosine { k } => write!(f, "fibre_cos(k={k})"),
            Observable::Z2Character { j, s } => {
                let s = if *s == Sign::Plus { '+' } else { '-' };
                write!(f, "z2(j={j},s={s})")
            }
            Observable::Z3Character { j, chi } => write!(f, "z3(j={j},chi={chi})"),
        }
    }
}

/// Powers `w^{-n..=n}` of a unit complex number.
struct Powers {
    n: i32,
    values: Vec<Complex64>,
}

impl Powers {
    fn new(n: u32) -> Self {
        Powers {
            n: n as i32,
            values: vec![Complex64::new(1.0, 0.0); 2 * n as usize + 1],
        }
    }

    fn fill(&mut self, w: Complex64) {
        let n = self.n as usize;
        let inv = w.conj();
        for m in 1..=n {
            self.values[n + m] = self.values[n + m - 1] * w;
            self.values[n - m] = self.values[n - m + 1] * inv;
        }
    }

    fn power(&self, k: i32) -> Complex64 {
        self.values[(self.n + k) as usize]
    }
}

/// Per-point quantities shared by every observable of a bank.
struct Features {
    circle: Option<Powers>,
    walsh: Vec<f64>,
    fibre: Option<Powers>,
    fibre_order: u32,
    z2: Option<u8>,
    z3: Option<u8>,
}

impl Features {
    fn new(base_order: u32, fibre_order: u32) -> Self {
        Features {
            circle: Some(Powers::new(base_order)),
            walsh: vec![1.0; base_order as usize + 1],
            fibre: None,
            fibre_order,
            z2: None,
            z3: None,
        }
    }

    fn base(&self, j: i32) -> Complex64 {
        match &self.circle {
            Some(p) => p.power(j),
            None => Complex64::new(self.walsh[j.unsigned_abs() as usize], 0.0),
        }
    }

    fn fill(&mut self, p: &SkewPoint) -> Result<()> {
        match &p.base {
            BasePoint::Circle(x) => {
                let order = (self.walsh.len() - 1) as u32;
                let powers = self.circle.get_or_insert_with(|| Powers::new(order));
                powers.fill(Complex64::from_polar(1.0, TAU * x.to_f64()));
            }
            BasePoint::Sequence(s) => {
                self.circle = None;
                let order = self.walsh.len() - 1;
                let bits = (usize::BITS - order.leading_zeros()) as usize;
                let symbols = s.window(0, bits);
                for (j, w) in self.walsh.iter_mut().enumerate() {
                    *w = symbols
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| j >> i & 1 == 1)
                        .map(|(_, &x)| if x == 1 { -1.0 } else { 1.0 })
                        .product();
                }
            }
        }
        let angle = match &p.fibre {
            FibrePoint::Torus(y) => Some(y.to_f64()),
            FibrePoint::Sphere(z) => Some(tau(z)?.to_f64()),
            _ => None,
        };
        self.fibre = angle.map(|t| {
            let mut powers = self
                .fibre
                .take()
                .unwrap_or_else(|| Powers::new(self.fibre_order));
            powers.fill(Complex64::from_polar(1.0, TAU * t));
            powers
        });
        self.z2 = match p.fibre {
            FibrePoint::Z2(a) => Some(a),
            _ => None,
        };
        self.z3 = match p.fibre {
            FibrePoint::Z3(a) => Some(a),
            _ => None,
        };
        Ok(())
    }
}

/// `0, 1, -1, 2, -2, ..., n, -n`
fn signed_range(n: i32) -> impl Iterator<Item = i32> {
    std::iter::once(0).chain((1..=n).flat_map(|m| [m, -m]))
}

/// The default observable bank for a system's fibre and base.
pub fn default_bank(sys: &SkewSystem) -> Vec<Observable> {
    let js: Vec<i32> = if sys.base.is_rotation() {
        signed_range(5).collect()
    } else {
        (0..=5).collect()
    };
    let mut bank = Vec::new();
    match sys.fibre {
        FibreKind::Torus | FibreKind::Sphere => {
            for &j in &js {
                for k in signed_range(5) {
                    if j != 0 || k != 0 {
                        bank.push(Observable::TorusCharacter { j, k });
                    }
                }
            }
            bank.extend((1..=6).map(|k| Observable::FibreCosine { k }));
        }
        FibreKind::Z2 => {
            bank.extend(
                js.iter()
                    .map(|&j| Observable::Z2Character { j, s: Sign::Minus }),
            );
            bank.extend(
                js.iter()
                    .filter(|&&j| j != 0)
                    .map(|&j| Observable::Z2Character { j, s: Sign::Plus }),
            );
        }
        FibreKind::Z3 => {
            for &j in &js {
                for chi in [1u8, 2, 0] {
                    if j != 0 || chi != 0 {
                        bank.push(Observable::Z3Character { j, chi });
                    }
                }
            }
        }
    }
    bank
}

/// `(1/N) sum_{n<N} obs(orbit_n)`.
pub fn birkhoff_average(
    sys: &SkewSystem,
    obs: &Observable,
    start: &SkewPoint,
    n: u64,
) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::Precondition("Birkhoff averages need N >= 1".into()));
    }
    Ok(run_start(sys, std::slice::from_ref(obs), start, n)?.0[0])
}

/// Averages and invariance residuals of a bank along one orbit.
fn run_start(
    sys: &SkewSystem,
    bank: &[Observable],
    start: &SkewPoint,
    n: u64,
) -> Result<(Vec<Complex64>, Vec<f64>)> {
    let base_order = bank
        .iter()
        .map(|o| o.base_frequency().unsigned_abs())
        .max()
        .unwrap_or(0);
    let fibre_order = bank
        .iter()
        .map(|o| o.fibre_frequency().unsigned_abs())
        .max()
        .unwrap_or(0);
    let mut features = Features::new(base_order, fibre_order);
    let mut sums = vec![Complex64::new(0.0, 0.0); bank.len()];
    let mut prev = sums.clone();
    let mut residuals = vec![0.0f64; bank.len()];
    let window = n.min(RESIDUAL_WINDOW);
    let mut p = *start;
    for step in 0..n {
        features.fill(&p)?;
        for (i, obs) in bank.iter().enumerate() {
            let v = obs.eval_with(&features)?;
            sums[i] += v;
            if step > 0 && step <= window {
                residuals[i] = residuals[i].max((v - prev[i]).norm());
            }
            prev[i] = v;
        }
        p = sys.step(&p)?;
    }
    let scale = 1.0 / n as f64;
    Ok((sums.into_iter().map(|s| s * scale).collect(), residuals))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub a_lo: f64,
    pub d_lo: f64,
    pub a_hi: f64,
    pub d_hi: f64,
    pub rho: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            a_lo: 0.05,
            d_lo: 0.05,
            a_hi: 0.5,
            d_hi: 0.3,
            rho: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ErgodicConsistent,
    NonErgodicDetected,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::ErgodicConsistent => "ergodic-consistent",
            Verdict::NonErgodicDetected => "non-ergodic-detected",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableSummary {
    pub observable: Observable,
    pub label: String,
    /// Per-start Birkhoff averages as `[re, im]`.
    pub averages: Vec<[f64; 2]>,
    pub space_average: [f64; 2],
    pub dispersion: f64,
    pub max_deviation: f64,
    pub invariance_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErgodicityReport {
    pub system: String,
    pub cocycle: String,
    pub base: String,
    pub n: u64,
    pub starts: usize,
    pub seed: u64,
    pub thresholds: Thresholds,
    pub observables: Vec<ObservableSummary>,
    pub verdict: Verdict,
    pub witness: Option<String>,
    /// Always "heuristic": verdicts summarize finite samples.
    pub status: String,
}

impl ErgodicityReport {
    pub fn max_deviation(&self) -> f64 {
        self.observables
            .iter()
            .filter(|o| !o.observable.is_constant())
            .map(|o| o.max_deviation)
            .fold(0.0, f64::max)
    }

    pub fn max_dispersion(&self) -> f64 {
        self.observables
            .iter()
            .filter(|o| !o.observable.is_constant())
            .map(|o| o.dispersion)
            .fold(0.0, f64::max)
    }
}

/// The verdict and witness index implied by the numeric fields.
pub fn classify(observables: &[ObservableSummary], t: &Thresholds) -> (Verdict, Option<usize>) {
    let witness = observables.iter().position(|o| {
        !o.observable.is_constant()
            && (o.dispersion > t.d_hi || o.max_deviation > t.a_hi)
            && o.invariance_residual < t.rho
    });
    if witness.is_some() {
        return (Verdict::NonErgodicDetected, witness);
    }
    let quiet = observables
        .iter()
        .filter(|o| !o.observable.is_constant())
        .all(|o| o.max_deviation <= t.a_lo && o.dispersion <= t.d_lo);
    if quiet {
        (Verdict::ErgodicConsistent, None)
    } else {
        (Verdict::Inconclusive, None)
    }
}

/// Start points drawn from the product of the base measure and the fibre
/// reference measure. Sphere starts lie on the unit circle.
pub fn sample_starts(sys: &SkewSystem, starts: usize, seed: u64) -> Vec<SkewPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..starts)
        .map(|_| {
            let base = sys.base.sample_with(&mut rng);
            let fibre = sys.fibre.sample_with(&mut rng);
            SkewPoint::new(base, fibre)
        })
        .collect()
}

pub fn ergodicity_scan(
    sys: &SkewSystem,
    bank: &[Observable],
    starts: usize,
    n: u64,
    seed: u64,
    thresholds: Thresholds,
) -> Result<ErgodicityReport> {
    if starts < 8 {
        return Err(Error::Precondition(format!(
            "ergodicity scans need at least 8 starts, got {starts}"
        )));
    }
    if n == 0 {
        return Err(Error::Precondition("ergodicity scans need N >= 1".into()));
    }
    let points = sample_starts(sys, starts, seed);
    let runs: Vec<(Vec<Complex64>, Vec<f64>)> = points
        .par_iter()
        .map(|p| run_start(sys, bank, p, n))
        .collect::<Result<_>>()?;

    let observables: Vec<ObservableSummary> = bank
        .iter()
        .enumerate()
        .map(|(i, obs)| {
            let averages: Vec<Complex64> = runs.iter().map(|r| r.0[i]).collect();
            let space = obs.space_average();
            ObservableSummary {
                observable: *obs,
                label: obs.to_string(),
                averages: averages.iter().map(|a| [a.re, a.im]).collect(),
                space_average: [space.re, space.im],
                dispersion: dispersion(&averages),
                max_deviation: averages
                    .iter()
                    .map(|a| (a - space).norm())
                    .fold(0.0, f64::max),
                invariance_residual: runs.iter().map(|r| r.1[i]).fold(0.0, f64::max),
            }
        })
        .collect();
    let (verdict, witness) = classify(&observables, &thresholds);
    Ok(ErgodicityReport {
        system: sys.fibre.to_string(),
        cocycle: sys.generator.label(),
        base: match sys.base.eta() {
            Some(eta) => format!("rotation(eta={eta})"),
            None => "bernoulli".into(),
        },
        n,
        starts,
        seed,
        thresholds,
        witness: witness.map(|i| observables[i].label.clone()),
        observables,
        verdict,
        status: "heuristic".into(),
    })
}

/// Scan with the default bank and thresholds.
pub fn default_scan(
    sys: &SkewSystem,
    starts: usize,
    n: u64,
    seed: u64,
) -> Result<ErgodicityReport> {
    ergodicity_scan(
        sys,
        &default_bank(sys),
        starts,
        n,
        seed,
        Thresholds::default(),
    )
}
