//! Report assembly and deterministic serialization (text, CSV, JSON).
//!
//! Text and CSV output depend only on the computed numbers, so repeated
//! runs are byte-identical; wall-clock timing appears only in JSON.

use std::time::Instant;

use serde_json::{json, Value};

use foursurf::born::{overlap_consistency, FourTables, MarginalTable, OverlapReport};
use foursurf::feasibility::{
    assemble_problem, battery_max_value, ch_battery, solve_feasibility, verify_witness,
    FeasibilityStatus, Verdict,
};
use foursurf::scenarios::{ancilla_block_spectra, BlockSpectrum};
use foursurf::surfaces::{check_no_signaling, FourSurfaceScenario, NoSignalingReport};
use foursurf::sweep::SweepRow;

/// Floats are printed at 17 significant digits so they round-trip exactly.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// Everything one scenario run produces.
pub struct RunReport {
    pub scenario: String,
    pub tol: f64,
    pub tables: FourTables,
    pub no_signaling: NoSignalingReport,
    pub overlap: OverlapReport,
    pub verdict: Verdict,
    pub ch_max: Option<f64>,
    pub spectra: Option<Vec<BlockSpectrum>>,
    pub witness_residual: Option<f64>,
    pub timing_ms: f64,
}

/// Full pipeline: tables, consistency checks, battery, feasibility verdict.
pub fn run_scenario(
    name: &str,
    scenario: &FourSurfaceScenario,
    tol: f64,
    with_spectra: bool,
) -> Result<RunReport, foursurf::Error> {
    let start = Instant::now();
    let tables = FourTables::compute(scenario)?;
    let no_signaling = check_no_signaling(scenario, 1e-10)?;
    let overlap = overlap_consistency(&tables, 1e-10);

    let binary = tables
        .iter()
        .all(|t| t.labels1.len() == 2 && t.labels2.len() == 2);
    let ch_max = if binary {
        battery_max_value(&ch_battery(&tables, tol)?)
    } else {
        None
    };

    let problem = assemble_problem(&tables, 1e-8)?;
    let verdict = solve_feasibility(&problem, tol)?;
    let witness_residual = match &verdict.witness {
        Some(w) => Some(verify_witness(&problem, w, tol)?.max_residual),
        None => None,
    };

    let spectra = if with_spectra {
        Some(ancilla_block_spectra(scenario)?)
    } else {
        None
    };

    Ok(RunReport {
        scenario: name.to_string(),
        tol,
        tables,
        no_signaling,
        overlap,
        verdict,
        ch_max,
        spectra,
        witness_residual,
        timing_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Zero-cell implications: if some outcome of one observable leaves only a
/// single possible partner outcome on a mixed surface, the partner value is
/// forced, and chains of forced values can collide with a zero cell on the
/// final surface.
pub fn forced_value_lines(tables: &FourTables) -> Vec<String> {
    const ZERO: f64 = 1e-12;
    let mut lines = Vec::new();

    // gamma pairs (B1, A2): a column with a single nonzero row forces B1.
    let gamma_forced = |a2_label: &str| -> Option<String> {
        let nonzero: Vec<&String> = tables
            .gamma
            .labels1
            .iter()
            .filter(|b1| tables.gamma.prob(b1, a2_label).unwrap_or(0.0) > ZERO)
            .collect();
        match nonzero.as_slice() {
            [only] => Some((*only).clone()),
            _ => None,
        }
    };
    // delta pairs (A1, B2): a row with a single nonzero column forces B2.
    let delta_forced = |a1_label: &str| -> Option<String> {
        let nonzero: Vec<&String> = tables
            .delta
            .labels2
            .iter()
            .filter(|b2| tables.delta.prob(a1_label, b2).unwrap_or(0.0) > ZERO)
            .collect();
        match nonzero.as_slice() {
            [only] => Some((*only).clone()),
            _ => None,
        }
    };

    for a2 in &tables.gamma.labels2 {
        if let Some(b1) = gamma_forced(a2) {
            lines.push(format!("gamma: A2={a2} forces B1={b1}"));
        }
    }
    for a1 in &tables.delta.labels1 {
        if let Some(b2) = delta_forced(a1) {
            lines.push(format!("delta: A1={a1} forces B2={b2}"));
        }
    }
    for a1 in &tables.alpha.labels1 {
        for a2 in &tables.alpha.labels2 {
            let mass = tables.alpha.prob(a1, a2).unwrap_or(0.0);
            if mass <= ZERO {
                continue;
            }
            if let (Some(b1), Some(b2)) = (gamma_forced(a2), delta_forced(a1)) {
                let beta = tables.beta.prob(&b1, &b2).unwrap_or(0.0);
                if beta <= ZERO {
                    lines.push(format!(
                        "alpha({a1},{a2}) carries mass {} but its forced beta cell ({b1},{b2}) has probability 0",
                        fmt17(mass)
                    ));
                }
            }
        }
    }
    lines
}

fn table_text(table: &MarginalTable, out: &mut String) {
    out.push_str(&format!(
        "table {} ({}, {})\n",
        table.surface, table.obs1_name, table.obs2_name
    ));
    for ((l1, l2), p) in table.entries() {
        out.push_str(&format!("  ({l1},{l2}) = {}\n", fmt17(p)));
    }
}

pub fn report_text(report: &RunReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("scenario: {}\n", report.scenario));
    out.push_str(&format!("tol: {}\n\n", fmt17(report.tol)));

    for table in report.tables.iter() {
        table_text(table, &mut out);
    }
    out.push('\n');

    out.push_str(&format!(
        "no-signaling: {} (max deviation {})\n",
        pass_str(report.no_signaling.pass),
        fmt17(report.no_signaling.max_deviation)
    ));
    for c in &report.no_signaling.comparisons {
        out.push_str(&format!("  {}: {}\n", c.description, fmt17(c.deviation)));
    }
    out.push_str(&format!(
        "overlap-consistency: {} (max deviation {})\n",
        pass_str(report.overlap.pass),
        fmt17(report.overlap.max_deviation)
    ));
    for c in &report.overlap.comparisons {
        out.push_str(&format!(
            "  {} {}/{}: {}\n",
            c.observable, c.surfaces.0, c.surfaces.1,
            fmt17(c.deviation)
        ));
    }

    let forced = forced_value_lines(&report.tables);
    if !forced.is_empty() {
        out.push_str("forced values:\n");
        for line in &forced {
            out.push_str(&format!("  {line}\n"));
        }
    }

    if let Some(spectra) = &report.spectra {
        out.push_str("reduced block spectra:\n");
        for s in spectra {
            let eigs: Vec<String> = s.eigenvalues.iter().map(|&v| fmt17(v)).collect();
            out.push_str(&format!(
                "  {} block {}: eigenvalues [{}] min nonzero gap {} subspace residual {}\n",
                s.surface,
                s.block + 1,
                eigs.join(", "),
                s.min_nonzero_gap.map_or("n/a".to_string(), fmt17),
                fmt17(s.correlated_subspace_residual)
            ));
        }
    }

    out.push('\n');
    match report.verdict.status {
        FeasibilityStatus::Feasible => {
            out.push_str("verdict: FEASIBLE\n");
            out.push_str(&format!(
                "  phase-1 objective: {}\n",
                fmt17(report.verdict.phase1_objective)
            ));
            if let Some(residual) = report.witness_residual {
                out.push_str(&format!("  witness max residual: {}\n", fmt17(residual)));
            }
            if let Some(w) = &report.verdict.witness {
                let cells: Vec<String> = w.iter().map(|&v| fmt17(v)).collect();
                out.push_str(&format!("  witness: [{}]\n", cells.join(", ")));
            }
        }
        FeasibilityStatus::Infeasible => {
            out.push_str("verdict: INFEASIBLE\n");
            out.push_str(&format!(
                "  phase-1 objective: {}\n",
                fmt17(report.verdict.phase1_objective)
            ));
            if report.verdict.marginal {
                out.push_str("  marginal: objective within (tol, 1e-6)\n");
            }
            if let Some(cert) = &report.verdict.certificate {
                out.push_str(&format!(
                    "  certificate: {} = {} (violation {})\n",
                    cert.inequality.id(),
                    fmt17(cert.value),
                    fmt17(cert.violation())
                ));
            }
        }
    }
    if let Some(ch_max) = report.ch_max {
        out.push_str(&format!("ch-battery max: {}\n", fmt17(ch_max)));
    }
    out
}

fn pass_str(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

/// One line per table entry: surface,obs1,label1,obs2,label2,probability.
pub fn report_csv(report: &RunReport) -> String {
    let mut out = String::from("surface,obs1,label1,obs2,label2,probability\n");
    for table in report.tables.iter() {
        for ((l1, l2), p) in table.entries() {
            out.push_str(&format!(
                "{},{},{l1},{},{l2},{}\n",
                table.surface,
                table.obs1_name,
                table.obs2_name,
                fmt17(p)
            ));
        }
    }
    out
}

fn table_json(table: &MarginalTable) -> Value {
    let mut probs = serde_json::Map::new();
    for ((l1, l2), p) in table.entries() {
        probs.insert(format!("{l1},{l2}"), json!(p));
    }
    json!({
        "surface": table.surface.name(),
        "obs": [table.obs1_name, table.obs2_name],
        "probs": Value::Object(probs),
    })
}

pub fn report_json(report: &RunReport) -> String {
    let verdict = match report.verdict.status {
        FeasibilityStatus::Feasible => json!({
            "status": "feasible",
            "phase1_objective": report.verdict.phase1_objective,
            "witness": report.verdict.witness,
            "witness_max_residual": report.witness_residual,
        }),
        FeasibilityStatus::Infeasible => json!({
            "status": "infeasible",
            "phase1_objective": report.verdict.phase1_objective,
            "marginal": report.verdict.marginal,
            "certificate": report.verdict.certificate.as_ref().map(|c| json!({
                "inequality": c.inequality.id(),
                "value": c.value,
                "violation": c.violation(),
            })),
        }),
    };
    let mut doc = json!({
        "scenario": report.scenario,
        "tables": {
            "alpha": table_json(&report.tables.alpha),
            "beta": table_json(&report.tables.beta),
            "gamma": table_json(&report.tables.gamma),
            "delta": table_json(&report.tables.delta),
        },
        "consistency": {
            "no_signaling": {
                "pass": report.no_signaling.pass,
                "max_deviation": report.no_signaling.max_deviation,
            },
            "overlap": {
                "pass": report.overlap.pass,
                "max_deviation": report.overlap.max_deviation,
            },
        },
        "verdict": verdict,
        "ch_max": report.ch_max,
        "timing": report.timing_ms,
    });
    if let Some(spectra) = &report.spectra {
        let entries: Vec<Value> = spectra
            .iter()
            .map(|s| {
                json!({
                    "surface": s.surface.name(),
                    "block": s.block + 1,
                    "eigenvalues": s.eigenvalues,
                    "min_nonzero_gap": s.min_nonzero_gap,
                    "subspace_residual": s.correlated_subspace_residual,
                })
            })
            .collect();
        doc.as_object_mut()
            .expect("document is an object")
            .insert("spectra".to_string(), Value::Array(entries));
    }
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    text
}

pub fn render_report(report: &RunReport, format: Format) -> String {
    match format {
        Format::Text => report_text(report),
        Format::Csv => report_csv(report),
        Format::Json => report_json(report),
    }
}

/// Sweep CSV: header `phi,S,max_ch,lp_feasible`, one row per grid point.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("phi,S,max_ch,lp_feasible\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt17(r.phi),
            fmt17(r.s_value),
            fmt17(r.ch_max),
            r.lp_feasible
        ));
    }
    out
}

pub fn sweep_text(rows: &[SweepRow], tol: f64) -> String {
    let mut out = String::new();
    out.push_str("scenario: sweep\n");
    out.push_str(&format!("tol: {}\n", fmt17(tol)));
    out.push_str(&format!("points: {}\n\n", rows.len()));
    for r in rows {
        out.push_str(&format!(
            "phi={} S={} max_ch={} lp_feasible={}{}\n",
            fmt17(r.phi),
            fmt17(r.s_value),
            fmt17(r.ch_max),
            r.lp_feasible,
            if r.marginal { " (marginal)" } else { "" }
        ));
    }
    let infeasible: Vec<&SweepRow> = rows.iter().filter(|r| !r.lp_feasible).collect();
    out.push('\n');
    match (infeasible.first(), infeasible.last()) {
        (Some(first), Some(last)) => out.push_str(&format!(
            "infeasible at {} of {} grid points, first {} last {}\n",
            infeasible.len(),
            rows.len(),
            fmt17(first.phi),
            fmt17(last.phi)
        )),
        _ => out.push_str("feasible at every grid point\n"),
    }
    out
}

pub fn sweep_json(rows: &[SweepRow], tol: f64, timing_ms: f64) -> String {
    let entries: Vec<Value> = rows
        .iter()
        .map(|r| {
            json!({
                "phi": r.phi,
                "S": r.s_value,
                "max_ch": r.ch_max,
                "lp_feasible": r.lp_feasible,
                "marginal": r.marginal,
            })
        })
        .collect();
    let doc = json!({
        "scenario": "sweep",
        "tol": tol,
        "rows": entries,
        "timing": timing_ms,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("sweep serializes");
    text.push('\n');
    text
}
