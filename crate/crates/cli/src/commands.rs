use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use hypext::approx::lemmas::{run_all, LemmaReport};
use hypext::approx::BuildOptions;
use hypext::error::{IoError, MetricError};
use hypext::export::{extension_json, graph_dot, graph_json};
use hypext::extension::{
    boundary_trace_check, branch_distance_check, claim1_maximality_check, degenerate_ray_check,
    level_fit, monotone_level_check, stability_check, BoundCheck,
};
use hypext::hyperbolicity::{fit_visual_constants, visuality_constant, DeltaOptions};
use hypext::io::{read_map, read_space};
use hypext::pq::{
    check_metrically_proper, diam_to_pq, fit_diam_ratio, pq_to_diam, POWER_SET_LIMIT,
};
use hypext::{
    build_extension, check_diam_ratio, check_pq as check_pq_params, delta_four_point,
    derived_constants, estimate_qi, fit_pq, ApproximationGraph, DiamRatioParams, FiniteMetricSpace,
    HyperbolicityReport, MapSpec, PQParams, SetFamily, ViolationReport,
};

use crate::{Config, Format};

/// Graphs up to this many vertices get an exhaustive four-point sweep.
const EXHAUSTIVE_VERTICES: usize = 400;
const DELTA_SAMPLES: usize = 2_000_000;
/// `δ` bound the approximation graphs must meet.
const DELTA_BOUND_TWICE: i64 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Computation(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Input(_) => "input",
            CliError::Computation(_) => "computation",
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError::Input(e.to_string())
}

pub struct Output {
    pub rendered: String,
    pub passed: bool,
}

fn finish(config: &Config, report: &Value, text: String, passed: bool) -> Result<Output, CliError> {
    let rendered = match config.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
            s.push('\n');
            s
        }
        Format::Text => text,
        Format::Dot => {
            return Err(CliError::Input(
                "dot output is only available for build".into(),
            ));
        }
    };
    Ok(Output { rendered, passed })
}

fn mark(passed: bool) -> &'static str {
    if passed {
        "PASS"
    } else {
        "FAIL"
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn load_source(config: &Config) -> Result<FiniteMetricSpace, CliError> {
    read_space(&config.input).map_err(input_err)
}

/// Source, target and map, filling in the defaults for missing flags.
fn load_triple(config: &Config) -> Result<MapSpec, CliError> {
    let source = load_source(config)?;
    let target = match &config.target {
        Some(path) => read_space(path).map_err(input_err)?,
        None => source.clone(),
    };
    match &config.map {
        Some(path) => read_map(path, &source, &target).map_err(input_err),
        None => {
            let pairs: Vec<(String, String)> = source
                .labels()
                .iter()
                .map(|l| (l.clone(), l.clone()))
                .collect();
            MapSpec::from_label_pairs(source, target, &pairs).map_err(|e| {
                CliError::Input(format!("no --map given and labels do not match: {e}"))
            })
        }
    }
}

fn build_graph(config: &Config, space: &FiniteMetricSpace) -> Result<ApproximationGraph, CliError> {
    let opts = BuildOptions {
        edge_rule: config.edge_rule.into(),
        k_max: config.k_max,
    };
    ApproximationGraph::build(space, config.r, opts).map_err(input_err)
}

pub fn validate(config: &Config) -> Result<Output, CliError> {
    match read_space(&config.input) {
        Ok(s) => {
            let min_pos = if s.len() > 1 {
                Some(s.min_pos_dist())
            } else {
                None
            };
            let report = json!({
                "command": "validate",
                "passed": true,
                "points": s.len(),
                "labels": s.labels(),
                "diam": s.diam(),
                "min_pos_dist": min_pos,
            });
            let text = format!(
                "validate: PASS\npoints: {}\ndiam: {}\nmin positive distance: {}\n",
                s.len(),
                s.diam(),
                min_pos.map_or("none".to_owned(), |d| d.to_string()),
            );
            finish(config, &report, text, true)
        }
        Err(IoError::Metric(e)) => {
            let report = json!({
                "command": "validate",
                "passed": false,
                "violation": metric_violation(&e),
                "message": e.to_string(),
            });
            finish(config, &report, format!("validate: FAIL\n{e}\n"), false)
        }
        Err(e) => Err(input_err(e)),
    }
}

fn metric_violation(e: &MetricError) -> Value {
    match e {
        MetricError::TriangleViolation(i, j, k) => json!({"kind": "triangle", "points": [i, j, k]}),
        MetricError::NotSymmetric(i, j) => json!({"kind": "symmetry", "points": [i, j]}),
        MetricError::NonzeroDiagonal(i) => json!({"kind": "diagonal", "points": [i]}),
        MetricError::NegativeEntry(i, j) => json!({"kind": "negative", "points": [i, j]}),
        MetricError::DuplicatePoint(i, j) => json!({"kind": "duplicate-point", "points": [i, j]}),
        MetricError::NonFinite(i, j) => json!({"kind": "non-finite", "points": [i, j]}),
        _ => json!({"kind": "shape", "points": []}),
    }
}

fn graph_summary(g: &ApproximationGraph) -> Value {
    json!({
        "r": g.r(),
        "k_min": g.k_min(),
        "k_max": g.k_max(),
        "vertices": g.len(),
        "edges": g.edges().len(),
        "splitting": g.splitting_vertices().len(),
        "edge_rule": g.edge_rule(),
    })
}

pub fn build(config: &Config) -> Result<Output, CliError> {
    let space = load_source(config)?;
    let g = build_graph(config, &space)?;
    let rendered = match config.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&graph_json(&g)).expect("graphs serialize");
            s.push('\n');
            s
        }
        Format::Dot => graph_dot(&g),
        Format::Text => {
            let mut t = format!(
                "levels {}..={}, {} vertices, {} edges\n",
                g.k_min(),
                g.k_max(),
                g.len(),
                g.edges().len()
            );
            for k in g.k_min()..=g.k_max() {
                let _ = write!(t, "level {k}:");
                for &v in g.level_vertices(k) {
                    let _ = write!(t, " {v}{}", g.ball(v));
                }
                t.push('\n');
            }
            t
        }
    };
    Ok(Output {
        rendered,
        passed: true,
    })
}

struct Analysis {
    report: Value,
    text: String,
    passed: bool,
}

fn delta_report(config: &Config, g: &ApproximationGraph) -> Result<HyperbolicityReport, CliError> {
    let opts = DeltaOptions {
        base: None,
        exhaustive_limit: EXHAUSTIVE_VERTICES,
        samples: Some(DELTA_SAMPLES),
        seed: config.seed,
    };
    delta_four_point(g, &opts).map_err(|e| CliError::Computation(e.to_string()))
}

fn analyze_graph(config: &Config, space: &FiniteMetricSpace) -> Result<Analysis, CliError> {
    let g = build_graph(config, space)?;
    let delta = delta_report(config, &g)?;
    let lemmas: Vec<LemmaReport> = run_all(&g);
    let visual = fit_visual_constants(&g, space, None).ok();
    let delta_ok = delta.delta.twice() <= DELTA_BOUND_TWICE;
    let lemmas_ok = lemmas.iter().all(LemmaReport::passed);
    let passed = delta_ok && lemmas_ok;
    let report = json!({
        "graph": graph_summary(&g),
        "hyperbolicity": delta,
        "delta_bound": 1.5,
        "delta_passed": delta_ok,
        "lemmas": lemmas,
        "visual": visual,
        "visuality_constant": visuality_constant(&g),
        "passed": passed,
    });
    let mut text = format!(
        "graph: {} vertices, levels {}..={}\ndelta: {} ({}) <= 1.5: {}\n",
        g.len(),
        g.k_min(),
        g.k_max(),
        delta.delta,
        if delta.exhaustive {
            "exhaustive"
        } else {
            "sampled"
        },
        mark(delta_ok)
    );
    for l in &lemmas {
        let _ = writeln!(
            text,
            "{}: {} ({} checked)",
            l.name,
            mark(l.passed()),
            l.checked
        );
    }
    if let Some(v) = &visual {
        let _ = writeln!(
            text,
            "visual constants at a = {}: [{}, {}]",
            v.a, v.c1, v.c2
        );
    }
    Ok(Analysis {
        report,
        text,
        passed,
    })
}

pub fn analyze(config: &Config) -> Result<Output, CliError> {
    let space = load_source(config)?;
    let mut a = analyze_graph(config, &space)?;
    a.report["command"] = json!("analyze");
    finish(config, &a.report, a.text, a.passed)
}

fn families(n: usize) -> Vec<SetFamily> {
    let mut f = vec![SetFamily::Default, SetFamily::SmallNested];
    if n <= POWER_SET_LIMIT {
        f.push(SetFamily::PowerSet);
    }
    f
}

fn family_name(f: &SetFamily) -> &'static str {
    match f {
        SetFamily::Default => "balls",
        SetFamily::Balls(_) => "given",
        SetFamily::SmallNested => "small-nested",
        SetFamily::PowerSet => "power-set",
    }
}

fn pq_err(e: impl std::fmt::Display) -> CliError {
    CliError::Computation(e.to_string())
}

/// PQ constants for the map: fitted over the grid, or the first grid
/// exponent that passes with the given `q`.
fn pq_stage(config: &Config, f: &MapSpec) -> Result<(Option<PQParams>, Value), CliError> {
    match config.q {
        None => {
            let (params, report) = fit_pq(f, &config.p_grid).map_err(pq_err)?;
            Ok((
                Some(params),
                json!({"mode": "fit", "params": params, "report": report}),
            ))
        }
        Some(q) => {
            let mut checks = Vec::new();
            let mut chosen = None;
            for &p in &config.p_grid {
                let params = PQParams::new(p, q).map_err(input_err)?;
                let report = check_pq_params(f, params).map_err(pq_err)?;
                if report.passed && chosen.is_none() {
                    chosen = Some(params);
                }
                checks.push(json!({"params": params, "report": report}));
            }
            Ok((
                chosen,
                json!({"mode": "check", "params": chosen, "checks": checks}),
            ))
        }
    }
}

struct PqAnalysis {
    report: Value,
    text: String,
    passed: bool,
    params: Option<DiamRatioParams>,
}

fn analyze_pq(config: &Config, f: &MapSpec) -> Result<PqAnalysis, CliError> {
    let (pq, pq_report) = pq_stage(config, f)?;
    let mut text = String::new();
    let Some(pq) = pq else {
        let q = config.q.unwrap_or(1.0);
        let _ = writeln!(
            text,
            "pq: FAIL (no exponent in the grid passes with q = {q})"
        );
        let report = json!({"pq": pq_report, "passed": false});
        return Ok(PqAnalysis {
            report,
            text,
            passed: false,
            params: None,
        });
    };
    let _ = writeln!(text, "pq: p = {}, q = {}", pq.p, pq.q);

    let forward_params = pq_to_diam(pq);
    let mut forward = Vec::new();
    let mut passed = true;
    for fam in families(f.len()) {
        let rep = check_diam_ratio(f, forward_params, &fam).map_err(pq_err)?;
        passed &= rep.passed;
        let _ = writeln!(
            text,
            "forward diameter ratios on {}: {} (worst {:.6})",
            family_name(&fam),
            mark(rep.passed),
            rep.worst_ratio
        );
        forward.push(json!({"family": family_name(&fam), "report": rep}));
    }

    let lambda = config.lambda.unwrap_or(pq.p);
    let fitted = fit_diam_params(f, lambda)?;
    let implied = diam_to_pq(fitted);
    let reverse_rep = check_pq_params(f, implied).map_err(pq_err)?;
    passed &= reverse_rep.passed;
    let _ = writeln!(
        text,
        "reverse: lambda = {}, A = {} implies p = {}, q = {}: {}",
        fitted.lambda,
        fitted.a,
        implied.p,
        implied.q,
        mark(reverse_rep.passed)
    );

    let proper = check_metrically_proper(f, None, forward_params);
    passed &= proper.bound.passed;
    let _ = writeln!(text, "preimage diameters: {}", mark(proper.bound.passed));

    let report = json!({
        "pq": pq_report,
        "conversions": {"diam_from_pq": forward_params, "pq_from_diam": implied},
        "forward": forward,
        "reverse": {"params": fitted, "implied": implied, "report": reverse_rep},
        "metrically_proper": proper,
        "passed": passed,
    });
    let params = match config.lambda {
        Some(_) => fitted,
        None => forward_params,
    };
    Ok(PqAnalysis {
        report,
        text,
        passed,
        params: Some(params),
    })
}

/// The largest `A` valid on every checked family for exponent `lambda`.
fn fit_diam_params(f: &MapSpec, lambda: f64) -> Result<DiamRatioParams, CliError> {
    let mut a = 1.0f64;
    for fam in families(f.len()) {
        let (params, _) = fit_diam_ratio(f, lambda, &fam).map_err(input_err)?;
        a = a.min(params.a);
    }
    DiamRatioParams::new(lambda, a).map_err(input_err)
}

pub fn check_pq(config: &Config) -> Result<Output, CliError> {
    let f = load_triple(config)?;
    let mut a = analyze_pq(config, &f)?;
    a.report["command"] = json!("check-pq");
    finish(config, &a.report, a.text, a.passed)
}

struct ExtensionAnalysis {
    report: Value,
    text: String,
    passed: bool,
}

fn bound_line(text: &mut String, c: &BoundCheck) {
    let _ = writeln!(
        text,
        "{}: {} (worst {} <= {:.3}, {} checked)",
        c.name,
        mark(c.passed),
        c.worst,
        c.bound,
        c.checked
    );
}

fn analyze_extension(
    config: &Config,
    f: &MapSpec,
    params: DiamRatioParams,
) -> Result<ExtensionAnalysis, CliError> {
    let gs = build_graph(config, f.source())?;
    let gt = build_graph(config, f.target())?;
    let consts = derived_constants(config.r, params.lambda, params.a).map_err(input_err)?;
    let em = build_extension(&gs, &gt, f).map_err(|e| CliError::Computation(e.to_string()))?;

    let trace: ViolationReport = boundary_trace_check(&em);
    let stability =
        stability_check(&em, &consts).map_err(|e| CliError::Computation(e.to_string()))?;
    let checks = vec![
        claim1_maximality_check(&em),
        branch_distance_check(&em, &consts),
        stability,
        monotone_level_check(&em, &consts),
        degenerate_ray_check(&em),
    ];
    let qi = estimate_qi(&em, consts.lambda);
    let qi_ok = qi.c_emp <= consts.c_prime && qi.net_const <= consts.c7;
    let passed = trace.passed && qi_ok && checks.iter().all(|c| c.passed);

    let mut text = format!(
        "extension: {} source vertices onto {} target vertices, {} clamped\n",
        gs.len(),
        gt.len(),
        em.clamped_vertices().len()
    );
    let _ = writeln!(
        text,
        "constants: lambda = {}, A = {}, C4 = {:.3}, C' = {:.3}, C7 = {:.3}",
        consts.lambda, consts.a, consts.c4, consts.c_prime, consts.c7
    );
    let _ = writeln!(
        text,
        "boundary-trace: {} ({} checked)",
        mark(trace.passed),
        trace.checked
    );
    for c in &checks {
        bound_line(&mut text, c);
    }
    let _ = writeln!(
        text,
        "quasi-isometry: {} (C_emp {} <= {:.3}, net {} <= {:.3})",
        mark(qi_ok),
        qi.c_emp,
        consts.c_prime,
        qi.net_const,
        consts.c7
    );

    let report = json!({
        "extension": extension_json(&em, Some(consts), Some(qi)),
        "boundary_trace": trace,
        "checks": checks,
        "qi_passed": qi_ok,
        "level_fit": level_fit(&em),
        "passed": passed,
    });
    Ok(ExtensionAnalysis {
        report,
        text,
        passed,
    })
}

pub fn extend(config: &Config) -> Result<Output, CliError> {
    let f = load_triple(config)?;
    let pq = analyze_pq(config, &f)?;
    let Some(params) = pq.params else {
        let mut report = pq.report;
        report["command"] = json!("extend");
        return finish(config, &report, pq.text, false);
    };
    let ext = analyze_extension(config, &f, params)?;
    let mut report = ext.report;
    report["command"] = json!("extend");
    report["diam_ratio_params"] = to_value(params);
    finish(config, &report, ext.text, ext.passed)
}

pub fn pipeline(config: &Config) -> Result<Output, CliError> {
    let f = load_triple(config)?;
    let source = analyze_graph(config, f.source())?;
    let target = analyze_graph(config, f.target())?;
    let pq = analyze_pq(config, &f)?;
    let ext = match pq.params {
        Some(params) => Some(analyze_extension(config, &f, params)?),
        None => None,
    };
    let passed =
        source.passed && target.passed && pq.passed && ext.as_ref().is_some_and(|e| e.passed);
    let report = json!({
        "command": "pipeline",
        "passed": passed,
        "source": source.report,
        "target": target.report,
        "check_pq": pq.report,
        "extend": ext.as_ref().map(|e| e.report.clone()),
    });
    let mut text = format!(
        "pipeline: {}\n\n[source]\n{}\n[target]\n{}\n[check-pq]\n{}",
        mark(passed),
        source.text,
        target.text,
        pq.text
    );
    if let Some(e) = &ext {
        let _ = write!(text, "\n[extend]\n{}", e.text);
    }
    finish(config, &report, text, passed)
}
