use nalgebra::Vector2;
use o2cocycle::base::BaseSystem;
use o2cocycle::diagnostics::{
    default_bank, ergodicity_scan, invariant_vector_support, sample_starts, ulam_discretize,
    ErgodicityReport,
};
use o2cocycle::inducing::{
    beta_of, induced_rotation_number, sb_system, verify_q_formula, verify_sb_formula,
};
use o2cocycle::o2::{growth_check, CocycleGenerator};
use o2cocycle::reducibility::{
    apply_criteria, run_counterexample_suite, search_reducibility, section_sanity, Bundle,
    BundleVerdict, Chart, IrreducibilityVerdict, ReducibilityReport, SuiteParams,
};
use o2cocycle::scalar::{Scalar, TorusValue};
use o2cocycle::skew::{FibreKind, SkewSystem};
use o2cocycle::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{CocycleKind, ExperimentConfig};
use crate::CliError;

/// What a command produced: the report body and any CSV series.
pub struct Output {
    pub result: Value,
    pub csv: Vec<(String, String)>,
    /// Text for humans, printed to stderr.
    pub summary: Option<String>,
}

impl Output {
    fn json(result: impl Serialize) -> Result<Self, CliError> {
        Ok(Output {
            result: serde_json::to_value(result).map_err(|e| CliError::Io(e.to_string()))?,
            csv: Vec::new(),
            summary: None,
        })
    }
}

fn csv_text(
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

fn skew(cfg: &ExperimentConfig, fibre: FibreKind) -> Result<SkewSystem, CliError> {
    Ok(SkewSystem::new(cfg.base_system(), cfg.generator(), fibre)?)
}

pub fn orbit(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let sys = skew(cfg, cfg.run.system)?;
    let start = sample_starts(&sys, 1, cfg.run.seed)[0];
    let points = sys.orbit(start, cfg.run.steps)?;
    let rows = points
        .iter()
        .enumerate()
        .map(|(n, p)| vec![n.to_string(), p.base.to_string(), p.fibre.to_string()]);
    let csv = csv_text(&["n", "base_repr", "fibre_repr"], rows)?;
    let mut out = Output::json(json!({
        "system": sys.fibre,
        "cocycle": sys.generator.label(),
        "steps": cfg.run.steps,
        "start": start,
        "end": points.last(),
    }))?;
    out.csv.push(("orbit.csv".into(), csv));
    Ok(out)
}

#[derive(Serialize)]
struct LyapunovStart {
    base: String,
    vector: [f64; 2],
    exponent: f64,
}

pub fn lyapunov(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let g = cfg.generator();
    let base = cfg.base_system();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.run.seed);
    let starts: Vec<_> = (0..cfg.run.starts)
        .map(|_| {
            let x = base.sample_with(&mut rng);
            let theta = std::f64::consts::TAU * rng.random::<f64>();
            (x, Vector2::new(theta.cos(), theta.sin()))
        })
        .collect();
    let rows = starts
        .par_iter()
        .map(|(x, v)| {
            Ok(LyapunovStart {
                base: x.to_string(),
                vector: [v[0], v[1]],
                exponent: growth_check(&g, &base, x, *v, cfg.run.n)?,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let max_abs = rows.iter().map(|r| r.exponent.abs()).fold(0.0, f64::max);
    Output::json(json!({
        "cocycle": g.label(),
        "n": cfg.run.n,
        "starts": rows,
        "max_abs_exponent": max_abs,
    }))
}

fn scan(cfg: &ExperimentConfig, fibre: FibreKind, seed: u64) -> Result<ErgodicityReport, CliError> {
    cfg.require_scan_starts()?;
    let sys = skew(cfg, fibre)?;
    Ok(ergodicity_scan(
        &sys,
        &default_bank(&sys),
        cfg.run.starts,
        cfg.run.n,
        seed,
        cfg.thresholds(),
    )?)
}

fn averages_csv(report: &ErgodicityReport) -> Result<String, CliError> {
    let rows = report.observables.iter().flat_map(|o| {
        o.averages.iter().enumerate().map(move |(s, a)| {
            vec![
                o.label.clone(),
                s.to_string(),
                a[0].to_string(),
                a[1].to_string(),
            ]
        })
    });
    csv_text(&["observable", "start", "re", "im"], rows)
}

pub fn diagnose(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let report = scan(cfg, cfg.run.system, cfg.run.seed)?;
    let csv = averages_csv(&report)?;
    let summary = format!(
        "{} {}: {} (heuristic), max deviation {:.3e}, max dispersion {:.3e}{}",
        report.system,
        report.cocycle,
        report.verdict,
        report.max_deviation(),
        report.max_dispersion(),
        report
            .witness
            .as_ref()
            .map(|w| format!(", witness {w}"))
            .unwrap_or_default()
    );
    let mut out = Output::json(&report)?;
    out.csv.push(("diagnose_averages.csv".into(), csv));
    out.summary = Some(summary);
    Ok(out)
}

fn inducing_result(eta: f64, alpha: Scalar, events: usize, seed: u64) -> Result<Value, CliError> {
    let sb = verify_sb_formula(eta, alpha, events, seed)?;
    let q = match verify_q_formula(eta, alpha, events, seed) {
        Ok(r) => serde_json::to_value(r).map_err(|e| CliError::Io(e.to_string()))?,
        Err(Error::Domain(msg)) => json!({ "error": msg }),
        Err(e) => return Err(e.into()),
    };
    let rho = induced_rotation_number(&sb_system(eta, alpha)?, events)?;
    let beta = beta_of(eta);
    Ok(json!({
        "eta": eta,
        "alpha": alpha,
        "rotation_number": rho.to_f64(),
        "expected_beta": beta,
        "rotation_number_error": rho.distance(TorusValue::new(beta)),
        "sb": sb,
        "q": q,
    }))
}

pub fn induce(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    if cfg.cocycle.kind != CocycleKind::Example2 {
        return Err(CliError::Usage(
            "induce runs on the example2 cocycle".into(),
        ));
    }
    Output::json(inducing_result(
        cfg.eta(),
        cfg.cocycle.alpha.value(),
        cfg.run.events,
        cfg.run.seed,
    )?)
}

/// Criteria verdict with every witnessed pole section attached.
fn verdict_with_witnesses(
    r: &ErgodicityReport,
    s: &ErgodicityReport,
    search: &ReducibilityReport,
) -> Result<IrreducibilityVerdict, CliError> {
    let mut verdict = apply_criteria(r, s)?;
    for sec in &search.sections {
        if sec.is_witness() {
            let bundle = match sec.chart {
                Chart::ComplexGrass => Bundle::Complex,
                Chart::RealGrass => Bundle::Real,
            };
            verdict.attach_witness(bundle, sec.clone())?;
        }
    }
    Ok(verdict)
}

pub fn search(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let g = cfg.generator();
    let base = cfg.base_system();
    let report = search_reducibility(&g, &base, cfg.run.samples, cfg.run.seed)?;
    let r = scan(cfg, FibreKind::Z2, cfg.run.seed)?;
    let s = scan(cfg, FibreKind::Torus, cfg.run.seed.wrapping_add(1))?;
    let verdict = verdict_with_witnesses(&r, &s, &report)?;
    let summary = format!(
        "{}: real {}, complex {}, scalar {} (heuristic)",
        g.label(),
        verdict.real_bundle,
        verdict.complex_bundle,
        verdict.scalar_cohomology
    );
    let mut out = Output::json(json!({ "search": report, "verdict": verdict }))?;
    out.summary = Some(summary);
    Ok(out)
}

fn suite_params(cfg: &ExperimentConfig) -> SuiteParams {
    SuiteParams {
        eta: cfg.eta(),
        n: cfg.run.n,
        starts: cfg.run.starts,
        seed: cfg.run.seed,
        ulam_grid: cfg.run.grid,
        ulam_samples_per_cell: cfg.run.samples_per_cell,
    }
}

fn ulam_field(cfg: &ExperimentConfig) -> Result<String, CliError> {
    let sys = SkewSystem::new(
        BaseSystem::rotation(cfg.eta()),
        CocycleGenerator::Cex1,
        FibreKind::Torus,
    )?;
    let matrix = ulam_discretize(&sys, cfg.run.grid, cfg.run.grid, cfg.run.samples_per_cell)?;
    let support = invariant_vector_support(&matrix, 1e-12);
    let rows = (0..matrix.cells()).map(|c| {
        let inside = support.cells.binary_search(&c).is_ok();
        vec![
            (c / matrix.ny).to_string(),
            (c % matrix.ny).to_string(),
            (inside as u8).to_string(),
        ]
    });
    csv_text(&["ix", "iy", "in_support"], rows)
}

pub fn verify_counterexamples(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    cfg.require_scan_starts()?;
    let report = run_counterexample_suite(&suite_params(cfg))?;
    let summary = report
        .claims
        .iter()
        .map(|c| {
            format!(
                "{} {}: {}",
                if c.pass { "ok  " } else { "FAIL" },
                c.name,
                c.observed
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    let mut out = Output::json(&report)?;
    out.csv.push(("ulam_support.csv".into(), ulam_field(cfg)?));
    out.summary = Some(summary);
    Ok(out)
}

#[derive(Serialize)]
struct Row {
    item: String,
    expected: String,
    observed: String,
    pass: bool,
}

fn row(item: &str, expected: impl ToString, observed: impl ToString, pass: bool) -> Row {
    Row {
        item: item.into(),
        expected: expected.to_string(),
        observed: observed.to_string(),
        pass,
    }
}

fn verdict_rows(
    name: &str,
    v: &IrreducibilityVerdict,
    real: BundleVerdict,
    complex: BundleVerdict,
) -> Vec<Row> {
    vec![
        row(
            &format!("{name}: real bundle"),
            real.to_string(),
            v.real_bundle.to_string(),
            v.real_bundle == real,
        ),
        row(
            &format!("{name}: complex bundle"),
            complex.to_string(),
            v.complex_bundle.to_string(),
            v.complex_bundle == complex,
        ),
    ]
}

/// Runs every example and counterexample at the configured parameters and
/// tabulates expected against observed outcomes.
pub fn reproduce(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    cfg.require_scan_starts()?;
    let alpha = cfg.cocycle.alpha.value();
    let rot = BaseSystem::rotation(cfg.base.eta.value());
    let examples = [
        (
            "example1",
            CocycleGenerator::Example1,
            rot,
            BundleVerdict::IrreducibleConsistent,
            BundleVerdict::ReducibleWitnessed,
        ),
        (
            "example2",
            CocycleGenerator::Example2 {
                alpha,
                eta: TorusValue::new(cfg.base.eta.value()),
            },
            rot,
            BundleVerdict::IrreducibleConsistent,
            BundleVerdict::IrreducibleConsistent,
        ),
        (
            "example3",
            CocycleGenerator::Example3 { alpha },
            BaseSystem::Bernoulli,
            BundleVerdict::IrreducibleConsistent,
            BundleVerdict::IrreducibleConsistent,
        ),
    ];
    let mut rows = Vec::new();
    let mut details = serde_json::Map::new();
    for (i, (name, g, base, real, complex)) in examples.into_iter().enumerate() {
        let seed = cfg.run.seed.wrapping_add(10 * i as u64);
        let sys = |f| SkewSystem::new(base, g.clone(), f);
        let r = ergodicity_scan(
            &sys(FibreKind::Z2)?,
            &default_bank(&sys(FibreKind::Z2)?),
            cfg.run.starts,
            cfg.run.n,
            seed,
            cfg.thresholds(),
        )?;
        let s = ergodicity_scan(
            &sys(FibreKind::Torus)?,
            &default_bank(&sys(FibreKind::Torus)?),
            cfg.run.starts,
            cfg.run.n,
            seed + 1,
            cfg.thresholds(),
        )?;
        rows.push(row(
            &format!("{name}: R scan"),
            "recorded",
            format!("{} (max dev {:.2e})", r.verdict, r.max_deviation()),
            true,
        ));
        rows.push(row(
            &format!("{name}: S scan"),
            "recorded",
            format!("{} (max dev {:.2e})", s.verdict, s.max_deviation()),
            true,
        ));
        let search = search_reducibility(&g, &base, cfg.run.samples, seed)?;
        let verdict = verdict_with_witnesses(&r, &s, &search)?;
        rows.extend(verdict_rows(name, &verdict, real, complex));
        if let Some(d) = &search.diagonalization {
            rows.push(row(
                &format!("{name}: diagonalization off-diagonal"),
                "<= 1e-12",
                format!("{:.2e}", d.max_off_diagonal),
                d.max_off_diagonal <= 1e-12,
            ));
        }
        for sec in &search.sections {
            let sanity = section_sanity(&g, &base, sec, cfg.run.samples, seed)?;
            rows.push(row(
                &format!("{name}: section {} and its perp", sanity.section),
                "residuals <= 1e-9",
                format!("{:.2e}, {:.2e}", sanity.residual, sanity.perp_residual),
                sanity.residual <= 1e-9 && sanity.perp_residual <= 1e-9,
            ));
        }
        details.insert(name.into(), json!({ "verdict": verdict, "search": search }));
    }

    let suite = run_counterexample_suite(&suite_params(cfg))?;
    for c in &suite.claims {
        rows.push(row(&c.name, &c.expected, &c.observed, c.pass));
    }

    let inducing = inducing_result(cfg.eta(), alpha, cfg.run.events, cfg.run.seed)?;
    let sb = &inducing["sb"];
    let times: Vec<String> = sb["return_time_histogram"]
        .as_object()
        .map(|h| h.keys().cloned().collect())
        .unwrap_or_default();
    rows.push(row(
        "inducing: return times",
        "{2, 3}",
        format!("{{{}}}", times.join(", ")),
        times == ["2", "3"],
    ));
    let rho_err = inducing["rotation_number_error"]
        .as_f64()
        .unwrap_or(f64::NAN);
    rows.push(row(
        "inducing: rotation number vs frac(1/eta)",
        "<= 1e-9",
        format!("{rho_err:.2e}"),
        rho_err <= 1e-9,
    ));
    let sb_disc = sb["max_discrepancy"].as_f64().unwrap_or(f64::NAN);
    rows.push(row(
        "inducing: S_B discrepancy",
        "<= 1e-9",
        format!("{sb_disc:.2e} (k = {})", sb["fitted_k"]),
        sb_disc <= 1e-9,
    ));
    let q_disc = inducing["q"]["max_discrepancy"]
        .as_f64()
        .unwrap_or(f64::NAN);
    rows.push(row(
        "inducing: Q discrepancy",
        "<= 1e-8",
        format!("{q_disc:.2e}"),
        q_disc <= 1e-8,
    ));
    let kac = sb["kac_product"].as_f64().unwrap_or(f64::NAN);
    rows.push(row(
        "inducing: Kac product",
        "1 within 1%",
        format!("{kac:.4}"),
        (kac - 1.0).abs() < 0.01,
    ));

    let table = rows
        .iter()
        .map(|r| {
            format!(
                "{} {} | expected {} | observed {}",
                if r.pass { "ok  " } else { "FAIL" },
                r.item,
                r.expected,
                r.observed
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    let csv = csv_text(
        &["item", "expected", "observed", "pass"],
        rows.iter().map(|r| {
            vec![
                r.item.clone(),
                r.expected.clone(),
                r.observed.clone(),
                r.pass.to_string(),
            ]
        }),
    )?;
    let mut out = Output::json(json!({
        "summary": rows,
        "all_pass": rows.iter().all(|r| r.pass),
        "examples": details,
        "counterexamples": suite,
        "inducing": inducing,
    }))?;
    out.csv.push(("summary.csv".into(), csv));
    out.summary = Some(table);
    Ok(out)
}
