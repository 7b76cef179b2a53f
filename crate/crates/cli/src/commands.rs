use std::fs;
use std::path::Path;

use flagcurve_core::limit_curve::{
    anosov_rates, certify_anosov, check_incidence_strided, fit_delta, probe_explicit, regularity_diagnostics,
    sample_limit_curve_with, CurveModel, DeltaModel, Verdict, DELTA_GRID,
};
use flagcurve_core::omega::recurrence_experiment;
use flagcurve_core::representation::RepVariant;
use flagcurve_core::surface::ball_size;
use serde_json::json;

use crate::config::{Chart, Loaded};
use crate::render::{svg, Panel};
use crate::report::{to_value, write_csv, Report, Work};
use crate::{CliError, Outcome};

/// Lines checked by the limit-curve incidence summary; larger models are
/// strided down to about this many.
const INCIDENCE_LINES: usize = 2048;

pub fn run(command: &str, loaded: &Loaded, out: &Path) -> Result<Outcome, CliError> {
    match command {
        "limit-curve" => limit_curve(loaded, out),
        "certify" => certify(loaded, out),
        "delta" => delta(loaded, out),
        "orbit" => orbit(loaded, out),
        "regularity" => regularity(loaded, out),
        other => unreachable!("unknown command {other}"),
    }
}

fn sample(loaded: &Loaded, work: &mut Work) -> Result<CurveModel, CliError> {
    let c = &loaded.config;
    work.ball_words = ball_size(loaded.spec.seed().genus(), c.ball_radius);
    let model = sample_limit_curve_with(&loaded.spec, c.ball_radius, c.min_translation_length, c.tolerances.dedup)?;
    work.samples = model.len();
    Ok(model)
}

fn limit_curve(loaded: &Loaded, out: &Path) -> Result<Outcome, CliError> {
    let mut work = Work::default();
    let model = sample(loaded, &mut work)?;
    let mut outputs = vec!["limit_curve.csv".to_string()];
    model.write_csv(fs::File::create(out.join("limit_curve.csv"))?)?;

    let n = model.len();
    let stride = n.div_ceil(INCIDENCE_LINES).max(1);
    let incidence = check_incidence_strided(&model, stride);
    work.pairings = (incidence.lines_checked * n) as u64;
    let (point_margin, line_margin) = model.injectivity_margins();

    let exact = {
        let pts = model.exact_points.map(|l| {
            model.samples().iter().map(|s| s.flag.point.rep().dot(l.rep()).abs()).fold(0.0, f64::max)
        });
        let lines = model.exact_lines.map(|p| {
            model.samples().iter().map(|s| s.flag.line.rep().dot(p.rep()).abs()).fold(0.0, f64::max)
        });
        json!({ "max_point_offset": pts, "max_line_offset": lines })
    };

    let render = &loaded.config.render;
    let mut panels = Vec::new();
    if matches!(render.chart, Chart::Affine | Chart::Both) {
        panels.push(Panel {
            title: "L (points)".into(),
            curve: model.samples().iter().map(|s| *s.flag.point.rep()).collect(),
        });
    }
    if matches!(render.chart, Chart::Dual | Chart::Both) {
        panels.push(Panel {
            title: "L* (lines)".into(),
            curve: model.samples().iter().map(|s| *s.flag.line.rep()).collect(),
        });
    }
    if !panels.is_empty() {
        fs::write(out.join("limit_curve.svg"), svg(&panels, render))?;
        outputs.push("limit_curve.svg".into());
    }

    let result = json!({
        "variant": loaded.spec.variant_name(),
        "sample_count": n,
        "injectivity": { "min_point_gap": point_margin, "min_line_gap": line_margin },
        "incidence": {
            "stride": stride,
            "pass": incidence.pass,
            "lines_checked": incidence.lines_checked,
            "histogram": incidence.histogram,
            "worst_line": incidence.worst_line,
            "worst_count": incidence.worst_count,
            "min_cross_pairing": incidence.min_cross_pairing,
            "near_misses": incidence.near_misses,
            "max_same_pairing": incidence.max_same_pairing,
        },
        "exact_model": exact,
    });
    Report { command: "limit-curve", work, result, outputs }.write(loaded, out, "limit_curve.json")?;
    Ok(Outcome::Ok)
}

fn certify(loaded: &Loaded, out: &Path) -> Result<Outcome, CliError> {
    let c = &loaded.config;
    let spec = &loaded.spec;
    let mut work = Work { ball_words: ball_size(spec.seed().genus(), c.ball_radius), ..Work::default() };
    if matches!(spec.variant(), RepVariant::Explicit) {
        let probe = probe_explicit(spec, c.ball_radius, c.min_translation_length)?;
        work.elements_scored = probe.elements;
        let result = json!({ "mode": "probe", "probe": to_value(&probe) });
        Report { command: "certify", work, result, outputs: vec![] }.write(loaded, out, "certify.json")?;
        return Ok(Outcome::Ok);
    }
    let cert = certify_anosov(spec, c.ball_radius, c.tolerances.epsilon)?;
    let rates = anosov_rates(spec, c.ball_radius, c.min_translation_length)?;
    work.elements_scored = cert.elements_checked;
    write_csv(
        &out.join("certify_rates.csv"),
        "word,translation_length,upper,lower",
        rates.rows.iter().map(|r| format!("{},{},{},{}", r.word, r.translation_length, r.upper, r.lower)),
    )?;
    let result = json!({
        "mode": "verdict",
        "verdict": to_value(&cert.verdict),
        "margin": cert.margin,
        "epsilon": cert.epsilon,
        "stable_norm": to_value(&cert.estimate),
        "witness": cert.witness,
        "elements_checked": cert.elements_checked,
        "disagreements": cert.disagreements,
        "rates": {
            "inf_upper": rates.inf_upper,
            "inf_lower": rates.inf_lower,
            "upper_witness": rates.upper_witness,
            "lower_witness": rates.lower_witness,
            "bound": 0.5 - cert.estimate.value,
            "rows": rates.rows.len(),
        },
    });
    let outputs = vec!["certify_rates.csv".to_string()];
    Report { command: "certify", work, result, outputs }.write(loaded, out, "certify.json")?;
    Ok(match cert.verdict {
        Verdict::CertifiedAtScale => Outcome::Ok,
        Verdict::Refuted => Outcome::Refuted,
        Verdict::Inconclusive => Outcome::Inconclusive,
    })
}

/// Least-squares fit of `a cos + b sin` to the grid values, and the largest
/// deviation from it.
fn linear_part(delta: &DeltaModel) -> (f64, f64, f64) {
    let g = delta.grid();
    let (mut scc, mut sss, mut scs, mut sfc, mut sfs) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (k, f) in g.iter().enumerate() {
        let (s, c) = DeltaModel::grid_angle(k).sin_cos();
        scc += c * c;
        sss += s * s;
        scs += c * s;
        sfc += f * c;
        sfs += f * s;
    }
    let det = scc * sss - scs * scs;
    let a = (sfc * sss - sfs * scs) / det;
    let b = (sfs * scc - sfc * scs) / det;
    let resid = g
        .iter()
        .enumerate()
        .map(|(k, f)| {
            let (s, c) = DeltaModel::grid_angle(k).sin_cos();
            (f - a * c - b * s).abs()
        })
        .fold(0.0, f64::max);
    (a, b, resid)
}

fn delta(loaded: &Loaded, out: &Path) -> Result<Outcome, CliError> {
    let mut work = Work::default();
    let model = sample(loaded, &mut work)?;
    let fit = fit_delta(&model, &loaded.spec)?;
    let letters = 2 * loaded.spec.seed().presentation().generator_count();
    work.pairings = (fit.samples_used * letters) as u64;
    write_csv(
        &out.join("delta.csv"),
        "k,theta,delta",
        fit.delta.grid().iter().enumerate().map(|(k, v)| format!("{k},{},{v}", DeltaModel::grid_angle(k))),
    )?;
    let (a, b, resid) = linear_part(&fit.delta);
    let result = json!({
        "samples_used": fit.samples_used,
        "grid_size": DELTA_GRID,
        "cocycle_residual": fit.cocycle_residual,
        "conjugacy_residual": fit.conjugacy_residual,
        "max_abs_delta": fit.delta.grid().iter().map(|v| v.abs()).fold(0.0, f64::max),
        "linear_fit": { "x": a, "y": b, "max_deviation": resid },
    });
    let outputs = vec!["delta.csv".to_string()];
    Report { command: "delta", work, result, outputs }.write(loaded, out, "delta.json")?;
    Ok(Outcome::Ok)
}

fn orbit(loaded: &Loaded, out: &Path) -> Result<Outcome, CliError> {
    let base = loaded.base_flag()?;
    let mut work = Work::default();
    let model = sample(loaded, &mut work)?;
    let c = &loaded.config;
    let rep = recurrence_experiment(&loaded.spec, &base, c.orbit.nbhd, c.ball_radius, &model)?;
    work.elements_scored = work.ball_words - rep.trivial_words;
    write_csv(
        &out.join("orbit_returns.csv"),
        "word,displacement",
        rep.returning_words.iter().map(|r| format!("{},{}", r.word, r.displacement)),
    )?;
    let result = json!({
        "base": to_value(&base),
        "report": to_value(&rep),
    });
    let outputs = vec!["orbit_returns.csv".to_string()];
    Report { command: "orbit", work, result, outputs }.write(loaded, out, "orbit.json")?;
    Ok(Outcome::Ok)
}

fn regularity(loaded: &Loaded, out: &Path) -> Result<Outcome, CliError> {
    let mut work = Work::default();
    let model = sample(loaded, &mut work)?;
    let rep = regularity_diagnostics(&model)?;
    write_csv(
        &out.join("regularity_bins.csv"),
        "log_gap,log_max_slope",
        rep.bins.iter().map(|(h, s)| format!("{h},{s}")),
    )?;
    let outputs = vec!["regularity_bins.csv".to_string()];
    Report { command: "regularity", work, result: to_value(&rep), outputs }.write(loaded, out, "regularity.json")?;
    Ok(Outcome::Ok)
}
