//! Parallel suite execution. Levels and checks run on the rayon pool; the
//! results are collected in configuration order, so the report does not
//! depend on the thread count.

use rayon::prelude::*;
use rieszkit::verify::{oracle_gate, run_check, GateReport, Level, SuiteReport};
use rieszkit::{Error, Result};

use crate::config::Prepared;

pub fn run_gate(prep: &Prepared) -> Result<Option<GateReport>> {
    prep.suite.gate.as_ref().map(oracle_gate).transpose()
}

pub fn build_levels(prep: &Prepared) -> Result<Vec<Level>> {
    let cfg = &prep.suite;
    let specs = cfg.level_specs()?;
    specs
        .into_par_iter()
        .enumerate()
        .map(|(i, spec)| {
            let mut weights = cfg.families.weights(&cfg.params, &spec)?;
            weights.extend(prep.file_weights.get(i).into_iter().flatten().cloned());
            Level::new(cfg.params, cfg.convention, spec, weights, cfg.families.sources(&spec))
        })
        .collect()
}

/// The gate, then every check. A failing gate stops the run.
pub fn run(prep: &Prepared) -> Result<SuiteReport> {
    let gate = run_gate(prep)?;
    if let Some(g) = gate.as_ref().filter(|g| !g.passed) {
        let failed: Vec<&str> = g.entries.iter().filter(|e| !e.passed).map(|e| e.name.as_str()).collect();
        return Err(Error::OracleGate(format!("{failed:?}")));
    }
    let checks = &prep.suite.checks;
    if checks.is_empty() {
        return Ok(SuiteReport::assemble(gate, Vec::new()));
    }
    let levels = build_levels(prep)?;
    let sweep = prep.suite.rho_sweep;
    let results = checks.par_iter().map(|c| (*c, run_check(*c, &levels, &sweep))).collect();
    Ok(SuiteReport::assemble(gate, results))
}
