//! TOML run configuration.

use std::path::{Path, PathBuf};

use rieszkit::verify::{CheckName, FamilyConfig, GateConfig, GridConfig, NamedWeight, RhoSweep, SuiteConfig, WeightClass};
use rieszkit::{validate_params, Error, ExponentParams, GridSpec, MorreyConvention};
use serde::{Deserialize, Serialize};

use crate::io::read_field;

/// A configuration problem, reported with the dotted path of the offending
/// entry.
#[derive(Debug, thiserror::Error)]
#[error("{field}: {reason}")]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

impl ConfigError {
    fn new(field: impl Into<String>, reason: impl ToString) -> Self {
        ConfigError { field: field.into(), reason: reason.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsBlock {
    pub d: usize,
    pub alpha: f64,
    pub r: f64,
    pub p: f64,
    pub q: Option<f64>,
}

/// Give either `h` or `half_extent`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    pub n: usize,
    pub h: Option<f64>,
    pub half_extent: Option<f64>,
    pub refinements: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksBlock {
    /// Check names, or `["all"]`.
    pub names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConventionsBlock {
    pub morrey: MorreyConvention,
    pub maximal: String,
}

impl Default for ConventionsBlock {
    fn default() -> Self {
        ConventionsBlock { morrey: MorreyConvention::Avg, maximal: "centered".into() }
    }
}

/// Unknown keys are rejected by the flattened [`GateConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GateBlock {
    pub enabled: bool,
    #[serde(flatten)]
    pub settings: GateConfig,
}

impl Default for GateBlock {
    fn default() -> Self {
        GateBlock { enabled: true, settings: GateConfig::default() }
    }
}

/// A weight given as one field file per refinement level, coarse to fine.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightFile {
    pub name: String,
    pub paths: Vec<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputBlock {
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsBlock,
    pub grid: GridBlock,
    #[serde(default)]
    pub families: FamilyConfig,
    #[serde(default)]
    pub weight_files: Vec<WeightFile>,
    pub checks: ChecksBlock,
    #[serde(default)]
    pub conventions: ConventionsBlock,
    #[serde(default)]
    pub rho_sweep: RhoSweep,
    #[serde(default)]
    pub gate: GateBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

/// A validated configuration ready to run.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub suite: SuiteConfig,
    /// Weights read from files, indexed by level.
    pub file_weights: Vec<Vec<NamedWeight>>,
}

fn param_error(e: Error) -> ConfigError {
    match e {
        Error::InvalidParam { name, reason } => ConfigError::new(format!("params.{name}"), reason),
        Error::UnsupportedDimension(_) => ConfigError::new("params.d", e),
        other => ConfigError::new("params", other),
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| {
            let reason = e.message().to_string();
            ConfigError::new(e.span().map_or("config".into(), |s| format!("config (bytes {s:?})")), reason)
        })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::new(path.display().to_string(), e))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        for w in &mut cfg.weight_files {
            for p in &mut w.paths {
                if p.is_relative() {
                    *p = base.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn exponent_params(&self) -> Result<ExponentParams, ConfigError> {
        let b = &self.params;
        let p = validate_params(b.d, b.alpha, b.r, b.p).map_err(param_error)?;
        match b.q {
            Some(q) => p.with_q(q).map_err(param_error),
            None => Ok(p),
        }
    }

    pub fn grid_config(&self) -> Result<GridConfig, ConfigError> {
        let g = &self.grid;
        let half_extent = match (g.h, g.half_extent) {
            (Some(h), None) => h * g.n as f64 / 2.0,
            (None, Some(l)) => l,
            _ => return Err(ConfigError::new("grid", "give exactly one of `h` and `half_extent`")),
        };
        if !(half_extent > 0.0 && half_extent.is_finite()) {
            return Err(ConfigError::new("grid.h", "spacing must be positive and finite"));
        }
        if g.refinements < 1 {
            return Err(ConfigError::new("grid.refinements", "at least one refinement is required"));
        }
        GridSpec::centered_box(self.params.d, g.n, half_extent).map_err(|e| ConfigError::new("grid.n", e))?;
        Ok(GridConfig { n: g.n, half_extent, refinements: g.refinements })
    }

    pub fn check_names(&self) -> Result<Vec<CheckName>, ConfigError> {
        if self.checks.names.iter().any(|n| n == "all") {
            return Ok(CheckName::ALL.to_vec());
        }
        self.checks
            .names
            .iter()
            .enumerate()
            .map(|(i, n)| CheckName::parse(n).map_err(|e| ConfigError::new(format!("checks.names[{i}]"), e)))
            .collect()
    }

    fn validate_families(&self) -> Result<(), ConfigError> {
        let f = &self.families;
        let positive = |name: &str, xs: &[f64]| {
            xs.iter()
                .position(|x| !(*x > 0.0 && x.is_finite()))
                .map_or(Ok(()), |i| Err(ConfigError::new(format!("families.{name}[{i}]"), "must be positive")))
        };
        positive("power_fractions", &f.power_fractions)?;
        positive("indicator_radii", &f.indicator_radii)?;
        positive("gaussian_sigmas", &f.gaussian_sigmas)?;
        if let Some(i) = f.power_fractions.iter().position(|t| *t >= 1.0) {
            return Err(ConfigError::new(format!("families.power_fractions[{i}]"), "must be below 1"));
        }
        if !(f.random_smoothness > 0.0) {
            return Err(ConfigError::new("families.random_smoothness", "must be positive"));
        }
        if self.conventions.maximal != "centered" {
            return Err(ConfigError::new("conventions.maximal", "only `centered` is implemented"));
        }
        Ok(())
    }

    /// Full validation, including reading and checking every weight file.
    pub fn prepare(&self) -> Result<Prepared, ConfigError> {
        let params = self.exponent_params()?;
        let grid = self.grid_config()?;
        let checks = self.check_names()?;
        self.validate_families()?;
        let suite = SuiteConfig {
            params,
            grid,
            families: self.families.clone(),
            checks,
            convention: self.conventions.morrey,
            rho_sweep: self.rho_sweep,
            gate: self.gate.enabled.then(|| self.gate.settings.clone()),
        };
        let specs = suite.level_specs().map_err(|e| ConfigError::new("grid", e))?;
        let mut file_weights = vec![Vec::new(); specs.len()];
        for (i, w) in self.weight_files.iter().enumerate() {
            let key = format!("weight_files[{i}]");
            if w.paths.len() != specs.len() {
                return Err(ConfigError::new(
                    format!("{key}.paths"),
                    format!("expected {} files, one per level, found {}", specs.len(), w.paths.len()),
                ));
            }
            for (lvl, (path, spec)) in w.paths.iter().zip(&specs).enumerate() {
                let at = format!("{key}.paths[{lvl}] ({})", path.display());
                let b = read_field(path).map_err(|e| ConfigError::new(&at, e))?;
                if !b.spec.same_grid(spec) {
                    return Err(ConfigError::new(&at, format!("grid {:?} does not match level grid {spec:?}", b.spec)));
                }
                b.check_nonnegative(&w.name).map_err(|e| ConfigError::new(&at, e))?;
                file_weights[lvl].push(NamedWeight { class: WeightClass::File, name: w.name.clone(), b });
            }
        }
        Ok(Prepared { suite, file_weights })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[params]
d = 1
alpha = 0.25
r = 2.0
p = 3.0

[grid]
n = 64
h = 0.125
refinements = 1

[checks]
names = ["theorem1", "lemma-4"]
"#;

    #[test]
    fn minimal_config_fills_defaults() {
        let cfg = RunConfig::from_toml(MINIMAL).unwrap();
        let prep = cfg.prepare().unwrap();
        assert_eq!(prep.suite.checks, vec![CheckName::Theorem1, CheckName::Lemma4]);
        assert_eq!(prep.suite.grid.half_extent, 4.0);
        assert_eq!(prep.suite.params.q, 2.0);
        assert_eq!(prep.suite.families, FamilyConfig::default());
        assert!(prep.suite.gate.is_some());
        assert_eq!(RunConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }

    #[test]
    fn errors_name_the_field() {
        let bad = |from: &str, to: &str| RunConfig::from_toml(&MINIMAL.replace(from, to)).and_then(|c| c.prepare());
        assert_eq!(bad("p = 3.0", "p = 1.5").unwrap_err().field, "params.p");
        assert_eq!(bad("refinements = 1", "refinements = 0").unwrap_err().field, "grid.refinements");
        assert_eq!(bad("\"lemma-4\"", "\"lemma9\"").unwrap_err().field, "checks.names[1]");
        assert_eq!(bad("h = 0.125", "half_extent = 4.0\nh = 0.125").unwrap_err().field, "grid");
        let typo = bad("[checks]", "[checkz]").unwrap_err();
        assert!(typo.reason.contains("checkz"), "{typo}");
    }
}
