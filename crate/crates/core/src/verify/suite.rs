//! Campaign configuration and the sequential suite runner.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::checks::{run_check, CheckName, Level, RhoSweep};
use super::families::FamilyConfig;
use super::gate::{oracle_gate, GateConfig, GateReport};
use super::report::{RatioReport, Verdict};
use crate::grid::GridSpec;
use crate::morrey::MorreyConvention;
use crate::params::{validate_params, ExponentParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    /// Points per axis at the coarsest level.
    pub n: usize,
    /// The box is `[-half_extent, half_extent)^d`.
    pub half_extent: f64,
    /// Number of grid doublings after the coarsest level.
    pub refinements: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub params: ExponentParams,
    pub grid: GridConfig,
    pub families: FamilyConfig,
    pub checks: Vec<CheckName>,
    pub convention: MorreyConvention,
    pub rho_sweep: RhoSweep,
    pub gate: Option<GateConfig>,
}

impl SuiteConfig {
    /// One-dimensional campaign on `[-4, 4)` refined from 256 to 512 points.
    pub fn default_1d() -> Self {
        let params = validate_params(1, 0.25, 2.0, 3.0).and_then(|p| p.with_q(1.5)).expect("valid defaults");
        SuiteConfig {
            params,
            grid: GridConfig { n: 256, half_extent: 4.0, refinements: 1 },
            families: FamilyConfig::default(),
            checks: CheckName::ALL.to_vec(),
            convention: MorreyConvention::Avg,
            rho_sweep: RhoSweep::default(),
            gate: Some(GateConfig::default()),
        }
    }

    /// Two-dimensional campaign on `[-4, 4)^2` refined from 48 to 96 points.
    pub fn default_2d() -> Self {
        let params = validate_params(2, 1.0, 1.25, 1.75).and_then(|p| p.with_q(1.5)).expect("valid defaults");
        SuiteConfig { params, grid: GridConfig { n: 48, half_extent: 4.0, refinements: 1 }, ..Self::default_1d() }
    }

    pub fn level_specs(&self) -> Result<Vec<GridSpec>> {
        if self.grid.refinements == 0 {
            return Err(Error::param("refinements", "at least one refinement is required"));
        }
        let mut specs = alloc::vec![GridSpec::centered_box(self.params.d, self.grid.n, self.grid.half_extent)?];
        for _ in 0..self.grid.refinements {
            let last = specs[specs.len() - 1];
            specs.push(GridSpec::centered_box(self.params.d, 2 * last.n, self.grid.half_extent)?);
        }
        Ok(specs)
    }

    pub fn prepare_level(&self, spec: GridSpec) -> Result<Level> {
        Level::from_families(self.params, self.convention, spec, &self.families)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckFailure {
    pub check: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub gate: Option<GateReport>,
    pub reports: Vec<RatioReport>,
    pub errors: Vec<CheckFailure>,
    pub verdict: Verdict,
}

impl SuiteReport {
    /// Assembles per-check results, kept in the given order.
    pub fn assemble(gate: Option<GateReport>, results: Vec<(CheckName, Result<Vec<RatioReport>>)>) -> Self {
        let mut reports = Vec::new();
        let mut errors = Vec::new();
        for (check, res) in results {
            match res {
                Ok(r) => reports.extend(r),
                Err(e) => errors.push(CheckFailure { check: check.as_str().into(), message: e.to_string() }),
            }
        }
        let verdict = reports.iter().map(|r| r.verdict).max().unwrap_or(Verdict::Pass);
        SuiteReport { gate, reports, errors, verdict }
    }

    /// Neither a violation nor an error occurred.
    pub fn is_clean(&self) -> bool {
        self.verdict != Verdict::Violation && self.errors.is_empty() && self.gate.as_ref().is_none_or(|g| g.passed)
    }

    pub fn count(&self, verdict: Verdict) -> usize {
        self.reports.iter().filter(|r| r.verdict == verdict).count()
    }
}

/// Runs the gate, then every configured check at every level, in order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteReport> {
    let gate = cfg.gate.as_ref().map(oracle_gate).transpose()?;
    if let Some(g) = &gate {
        if !g.passed {
            let failed: Vec<&str> = g.entries.iter().filter(|e| !e.passed).map(|e| e.name.as_str()).collect();
            return Err(Error::OracleGate(format!("{failed:?}")));
        }
    }
    if cfg.checks.is_empty() {
        return Ok(SuiteReport::assemble(gate, Vec::new()));
    }
    let levels = cfg.level_specs()?.into_iter().map(|s| cfg.prepare_level(s)).collect::<Result<Vec<_>>>()?;
    let results = cfg.checks.iter().map(|c| (*c, run_check(*c, &levels, &cfg.rho_sweep))).collect();
    Ok(SuiteReport::assemble(gate, results))
}
