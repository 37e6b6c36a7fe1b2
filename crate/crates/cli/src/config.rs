//! Experiment configuration: TOML file, `O2WB_<SECTION>_<KEY>` environment
//! overrides, then command-line flags, validated before anything runs.

use std::fmt;
use std::path::Path;

use num_rational::Rational64;
use o2cocycle::base::BaseSystem;
use o2cocycle::diagnostics::Thresholds;
use o2cocycle::o2::CocycleGenerator;
use o2cocycle::scalar::{Scalar, TorusValue};
use o2cocycle::skew::FibreKind;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use toml::{Table, Value};

use crate::CliError;

pub const ENV_PREFIX: &str = "O2WB_";

/// A numeric literal: a decimal (`0.25`), a ratio (`1/3`), or one of the
/// constants `sqrt2-1` and `sqrt3-1`. Decimals and ratios are exact.
#[derive(Debug, Clone, PartialEq)]
pub struct Literal {
    text: String,
    value: Scalar,
}

impl Literal {
    pub fn parse(text: &str) -> Result<Self, String> {
        let t = text.trim();
        let value = match t {
            "sqrt2-1" => Scalar::Approx(2f64.sqrt() - 1.0),
            "sqrt3-1" => Scalar::Approx(3f64.sqrt() - 1.0),
            _ if t.contains('/') => {
                let (p, q) = t.split_once('/').expect("checked");
                let p: i64 = p
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad numerator in {t:?}"))?;
                let q: i64 = q
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad denominator in {t:?}"))?;
                if q == 0 {
                    return Err(format!("zero denominator in {t:?}"));
                }
                Scalar::Exact(Rational64::new(p, q))
            }
            _ => Scalar::Exact(parse_decimal(t)?),
        };
        Ok(Literal {
            text: t.to_string(),
            value,
        })
    }

    pub fn value(&self) -> Scalar {
        self.value
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }
}

fn parse_decimal(t: &str) -> Result<Rational64, String> {
    let bad = || format!("{t:?} is not a decimal, a ratio p/q, sqrt2-1 or sqrt3-1");
    let (negative, digits) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (whole, fraction) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && fraction.is_empty()
        || !whole
            .chars()
            .chain(fraction.chars())
            .all(|c| c.is_ascii_digit())
        || fraction.len() > 15
    {
        return Err(bad());
    }
    let joined = format!("{whole}{fraction}");
    let numer: i64 = joined.parse().map_err(|_| bad())?;
    let denom = 10i64.pow(fraction.len() as u32);
    let r = Rational64::new(numer, denom);
    Ok(if negative { -r } else { r })
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

impl Serialize for Literal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.text)
    }
}

impl<'de> Deserialize<'de> for Literal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Text(String),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Int(i) => i.to_string(),
            Raw::Float(f) => f.to_string(),
            Raw::Text(s) => s,
        };
        Literal::parse(&text).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseKind {
    /// Rotation for circle cocycles, the shift for sequence cocycles.
    Auto,
    Rotation,
    Bernoulli,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BaseSpec {
    pub kind: BaseKind,
    pub eta: Literal,
}

impl Default for BaseSpec {
    fn default() -> Self {
        BaseSpec {
            kind: BaseKind::Auto,
            eta: Literal::parse("sqrt2-1").expect("valid"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CocycleKind {
    Example1,
    Example2,
    Example3,
    Cex1,
    Cex2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CocycleSpec {
    pub kind: CocycleKind,
    /// Rotation parameter: the matrix turns by `pi * alpha`.
    pub alpha: Literal,
}

impl Default for CocycleSpec {
    fn default() -> Self {
        CocycleSpec {
            kind: CocycleKind::Example1,
            alpha: Literal::parse("sqrt3-1").expect("valid"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSpec {
    pub system: FibreKind,
    pub n: u64,
    pub starts: usize,
    pub seed: u64,
    pub steps: usize,
    pub events: usize,
    pub samples: usize,
    pub grid: usize,
    pub samples_per_cell: usize,
    pub a_lo: f64,
    pub d_lo: f64,
    pub a_hi: f64,
    pub d_hi: f64,
    pub rho: f64,
}

impl Default for RunSpec {
    fn default() -> Self {
        let t = Thresholds::default();
        RunSpec {
            system: FibreKind::Torus,
            n: 1_000_000,
            starts: 16,
            seed: 0,
            steps: 1000,
            events: 10_000,
            samples: 10_000,
            grid: 60,
            samples_per_cell: 64,
            a_lo: t.a_lo,
            d_lo: t.d_lo,
            a_hi: t.a_hi,
            d_hi: t.d_hi,
            rho: t.rho,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub base: BaseSpec,
    pub cocycle: CocycleSpec,
    pub run: RunSpec,
}

impl ExperimentConfig {
    pub fn thresholds(&self) -> Thresholds {
        Thresholds {
            a_lo: self.run.a_lo,
            d_lo: self.run.d_lo,
            a_hi: self.run.a_hi,
            d_hi: self.run.d_hi,
            rho: self.run.rho,
        }
    }

    pub fn eta(&self) -> f64 {
        self.base.eta.to_f64()
    }

    pub fn generator(&self) -> CocycleGenerator {
        let alpha = self.cocycle.alpha.value();
        match self.cocycle.kind {
            CocycleKind::Example1 => CocycleGenerator::Example1,
            CocycleKind::Example2 => CocycleGenerator::Example2 {
                alpha,
                eta: TorusValue::new(self.base.eta.value()),
            },
            CocycleKind::Example3 => CocycleGenerator::Example3 { alpha },
            CocycleKind::Cex1 => CocycleGenerator::Cex1,
            CocycleKind::Cex2 => CocycleGenerator::Cex2,
        }
    }

    pub fn base_system(&self) -> BaseSystem {
        let circle = self.generator().wants_circle_base();
        match self.base.kind {
            BaseKind::Rotation => BaseSystem::rotation(self.base.eta.value()),
            BaseKind::Bernoulli => BaseSystem::Bernoulli,
            BaseKind::Auto if circle => BaseSystem::rotation(self.base.eta.value()),
            BaseKind::Auto => BaseSystem::Bernoulli,
        }
    }

    /// Checks that apply to every experiment.
    pub fn validate(&self) -> Result<(), CliError> {
        let usage = |m: String| Err(CliError::Usage(m));
        let eta = self.base.eta.to_f64();
        if !(0.0 < eta && eta < 1.0) {
            return usage(format!("base.eta = {} must lie in (0, 1)", self.base.eta));
        }
        if self.generator().wants_circle_base() != self.base_system().is_rotation() {
            return usage(format!(
                "cocycle {:?} does not live over base {:?}",
                self.cocycle.kind, self.base.kind
            ));
        }
        if self.run.n == 0 {
            return usage("run.n must be at least 1".into());
        }
        if self.run.grid < 2 {
            return usage("run.grid must be at least 2".into());
        }
        if self.run.samples_per_cell == 0 || self.run.events == 0 || self.run.samples == 0 {
            return usage("sample counts must be positive".into());
        }
        let t = self.thresholds();
        if [t.a_lo, t.d_lo, t.a_hi, t.d_hi, t.rho]
            .iter()
            .any(|v| !(v.is_finite() && *v >= 0.0))
        {
            return usage("thresholds must be finite and nonnegative".into());
        }
        Ok(())
    }

    /// Scans need at least 8 starts.
    pub fn require_scan_starts(&self) -> Result<(), CliError> {
        if self.run.starts < 8 {
            return Err(CliError::Usage(format!(
                "run.starts = {} but scans need at least 8",
                self.run.starts
            )));
        }
        Ok(())
    }
}

/// Parses an environment value as a TOML scalar, falling back to a string.
fn env_value(raw: &str) -> Value {
    if let Ok(i) = raw.parse::<i64>() {
        return Value::Integer(i);
    }
    if let Ok(f) = raw.parse::<f64>() {
        if raw.contains('.') || raw.contains('e') {
            return Value::Float(f);
        }
    }
    Value::String(raw.to_string())
}

pub fn set(table: &mut Table, section: &str, key: &str, value: Value) {
    let entry = table
        .entry(section.to_string())
        .or_insert_with(|| Value::Table(Table::new()));
    if let Value::Table(t) = entry {
        t.insert(key.to_string(), value);
    }
}

/// Layers file, environment and flag values, then deserializes.
pub fn load(
    path: Option<&Path>,
    env: impl IntoIterator<Item = (String, String)>,
    flags: Vec<(&str, &str, Value)>,
) -> Result<ExperimentConfig, CliError> {
    let mut table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
            text.parse::<Table>()
                .map_err(|e| CliError::Usage(format!("config {}: {e}", p.display())))?
        }
        None => Table::new(),
    };
    let mut overrides: Vec<(String, String)> = env
        .into_iter()
        .filter(|(k, _)| k.starts_with(ENV_PREFIX))
        .collect();
    overrides.sort();
    for (k, v) in overrides {
        let rest = k[ENV_PREFIX.len()..].to_ascii_lowercase();
        let (section, key) = rest
            .split_once('_')
            .ok_or_else(|| CliError::Usage(format!("environment override {k} has no key")))?;
        set(&mut table, section, key, env_value(&v));
    }
    for (section, key, value) in flags {
        set(&mut table, section, key, value);
    }
    let config: ExperimentConfig =
        Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| {
                CliError::Usage(format!("invalid configuration: {}", e.message()))
            })?;
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        assert_eq!(Literal::parse("0.25").unwrap().value(), Scalar::ratio(1, 4));
        assert_eq!(Literal::parse("1/3").unwrap().value(), Scalar::ratio(1, 3));
        assert_eq!(
            Literal::parse("-0.5").unwrap().value(),
            Scalar::ratio(-1, 2)
        );
        assert_eq!(Literal::parse("7").unwrap().value(), Scalar::ratio(7, 1));
        assert!((Literal::parse("sqrt2-1").unwrap().to_f64() - 0.41421356237309503).abs() < 1e-15);
        assert!(!Literal::parse("sqrt3-1").unwrap().value().is_exact());
        for bad in ["pi", "1e-3", "1/0", "", ".", "0.1.2", "sqrt(2)"] {
            assert!(Literal::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn layering_and_unknown_keys() {
        let flags = vec![("run", "starts", Value::Integer(32))];
        let env = vec![
            ("O2WB_RUN_STARTS".to_string(), "12".to_string()),
            ("O2WB_COCYCLE_KIND".to_string(), "cex1".to_string()),
            ("PATH".to_string(), "/bin".to_string()),
        ];
        let c = load(None, env, flags).unwrap();
        assert_eq!(c.run.starts, 32);
        assert_eq!(c.cocycle.kind, CocycleKind::Cex1);
        let env = vec![("O2WB_RUN_STATRS".to_string(), "12".to_string())];
        assert!(matches!(load(None, env, vec![]), Err(CliError::Usage(_))));
    }

    #[test]
    fn toml_floats_become_exact() {
        let mut t = Table::new();
        set(&mut t, "base", "eta", Value::Float(0.7));
        let c: ExperimentConfig = Value::Table(t).try_into().unwrap();
        assert_eq!(c.base.eta.value(), Scalar::ratio(7, 10));
    }

    #[test]
    fn incompatible_base_is_rejected() {
        let flags = vec![
            ("cocycle", "kind", Value::String("cex2".into())),
            ("base", "kind", Value::String("rotation".into())),
        ];
        assert!(load(None, Vec::new(), flags).is_err());
        let flags = vec![("cocycle", "kind", Value::String("cex2".into()))];
        assert!(!load(None, Vec::new(), flags)
            .unwrap()
            .base_system()
            .is_rotation());
    }
}
