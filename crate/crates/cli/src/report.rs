//! JSON reports and CSV plot data.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use rieszkit::verify::report::Conventions;
use rieszkit::verify::suite::CheckFailure;
use rieszkit::verify::{GateReport, RatioReport, SuiteReport, Verdict};
use rieszkit::ExponentParams;
use serde::Serialize;

use crate::config::RunConfig;

#[derive(Debug, Clone, Serialize)]
pub struct VerdictEntry {
    pub name: String,
    pub family: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdicts {
    pub overall: Verdict,
    pub pass: usize,
    pub warn: usize,
    pub violation: usize,
    pub errors: usize,
    pub per_report: Vec<VerdictEntry>,
}

/// The top-level JSON document. Everything except `timestamp` is a pure
/// function of the configuration.
#[derive(Debug, Clone, Serialize)]
pub struct JsonReport<'a> {
    pub timestamp: u64,
    pub tool: String,
    pub config: &'a RunConfig,
    pub params: ExponentParams,
    pub conventions: Conventions,
    pub gate: Option<&'a GateReport>,
    pub reports: &'a [RatioReport],
    pub errors: &'a [CheckFailure],
    pub verdicts: Verdicts,
}

impl<'a> JsonReport<'a> {
    pub fn new(config: &'a RunConfig, params: ExponentParams, suite: &'a SuiteReport) -> Self {
        let per_report = suite
            .reports
            .iter()
            .map(|r| VerdictEntry { name: r.name.clone(), family: r.family.clone(), verdict: r.verdict })
            .collect();
        let verdicts = Verdicts {
            overall: suite.verdict,
            pass: suite.count(Verdict::Pass),
            warn: suite.count(Verdict::Warn),
            violation: suite.count(Verdict::Violation),
            errors: suite.errors.len(),
            per_report,
        };
        let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        JsonReport {
            timestamp,
            tool: format!("rieszkit {}", env!("CARGO_PKG_VERSION")),
            config,
            params,
            conventions: Conventions::new(config.conventions.morrey),
            gate: suite.gate.as_ref(),
            reports: &suite.reports,
            errors: &suite.errors,
            verdicts,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRow {
    pub check: String,
    pub case: String,
    pub x_name: String,
    pub x: f64,
    pub ratio: f64,
}

/// Ratio-versus-parameter curves of every report, then the sup ratio of
/// each report against the grid spacing.
pub fn curve_rows(reports: &[RatioReport]) -> Vec<CurveRow> {
    let swept = reports.iter().flat_map(|r| {
        r.curves.iter().map(move |c| CurveRow {
            check: r.name.clone(),
            case: c.case.clone(),
            x_name: c.x_name.clone(),
            x: c.x,
            ratio: c.ratio,
        })
    });
    let refined = reports.iter().flat_map(|r| {
        r.refinement.iter().map(move |p| CurveRow {
            check: r.name.clone(),
            case: r.family.clone(),
            x_name: "h".into(),
            x: p.h,
            ratio: p.sup_ratio,
        })
    });
    swept.chain(refined).collect()
}

pub fn curves_csv(reports: &[RatioReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in curve_rows(reports) {
        w.serialize(row).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8")
}

pub fn write_text(path: &Path, text: &str) -> std::io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)
}

/// One line per report for the terminal.
pub fn summary(suite: &SuiteReport) -> String {
    let mut out = String::new();
    if let Some(g) = &suite.gate {
        for e in &g.entries {
            let mark = if e.passed { "PASS" } else { "FAIL" };
            out += &format!("gate  {mark:<9} {:.2e} <= {:.0e}  {}\n", e.deviation, e.tolerance, e.name);
        }
    }
    for r in &suite.reports {
        let levels: Vec<String> = r.refinement.iter().map(|p| format!("{:.4}", p.sup_ratio)).collect();
        out += &format!(
            "{:<16} {:<9} {:<9} sup {:<12.5e} levels [{}]\n",
            r.name,
            r.family,
            r.verdict.as_str(),
            r.sup_ratio,
            levels.join(", ")
        );
    }
    for e in &suite.errors {
        out += &format!("{:<16} ERROR     {}\n", e.check, e.message);
    }
    out += &format!(
        "overall {} ({} pass, {} warn, {} violation, {} error)\n",
        suite.verdict.as_str(),
        suite.count(Verdict::Pass),
        suite.count(Verdict::Warn),
        suite.count(Verdict::Violation),
        suite.errors.len()
    );
    out
}
