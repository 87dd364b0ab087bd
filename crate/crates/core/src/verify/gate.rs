//! Fast paths against their brute-force oracles at small sizes.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::grid::{Field, GridSpec};
use crate::maximal::{maximal_at, RadiusLadder};
use crate::oracle::{maximal_bruteforce, riesz_bruteforce_with};
use crate::riesz::RieszOperator;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GateConfig {
    pub seeds: Vec<u64>,
    pub alpha_1d: f64,
    pub alpha_2d: f64,
    pub n_1d: usize,
    pub n_2d: usize,
    /// Grid size of the two-dimensional maximal comparison.
    pub maximal_n_2d: usize,
    pub maximal_points: usize,
    pub riesz_tolerance: f64,
    pub maximal_tolerance: f64,
}

impl Default for GateConfig {
    fn default() -> Self {
        GateConfig {
            seeds: (0..10).collect(),
            alpha_1d: 0.5,
            alpha_2d: 1.0,
            n_1d: 256,
            n_2d: 48,
            maximal_n_2d: 32,
            maximal_points: 20,
            riesz_tolerance: 1e-10,
            maximal_tolerance: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateEntry {
    pub name: String,
    pub deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateReport {
    pub entries: Vec<GateEntry>,
    pub passed: bool,
}

fn random_field(spec: GridSpec, seed: u64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Field::from_fn(spec, |_| rng.gen_range(-1.0..1.0))
}

/// `max |fast - oracle| / max |oracle|` over every grid point.
pub fn riesz_gate_deviation(spec: GridSpec, alpha: f64, seed: u64) -> Result<f64> {
    let f = random_field(spec, seed);
    let op = RieszOperator::new(spec, alpha)?;
    let fast = op.apply(&f)?;
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for k in 0..spec.len() {
        let slow = riesz_bruteforce_with(op.table(), &f, &spec.point_flat(k))?;
        diff = diff.max((fast.values[k] - slow).abs());
        scale = scale.max(slow.abs());
    }
    Ok(if scale == 0.0 { diff } else { diff / scale })
}

/// Largest relative gap between the full-ladder maximal function and the
/// exhaustive oracle at `points` seeded grid points.
pub fn maximal_gate_deviation(spec: GridSpec, points: usize, seed: u64) -> Result<f64> {
    let f = random_field(spec, seed);
    let ladder = RadiusLadder::full(&spec);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    let mut worst = 0.0f64;
    for _ in 0..points {
        let k = rng.gen_range(0..spec.len());
        let idx = spec.unflat(k);
        let fast = maximal_at(&f, &idx, &ladder);
        let slow = maximal_bruteforce(&f, &spec.point(&idx))?;
        worst = worst.max((fast - slow).abs() / slow.abs().max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

pub fn oracle_gate(cfg: &GateConfig) -> Result<GateReport> {
    let mut entries = Vec::new();
    for (d, n, alpha) in [(1, cfg.n_1d, cfg.alpha_1d), (2, cfg.n_2d, cfg.alpha_2d)] {
        let spec = GridSpec::centered_box(d, n, 4.0)?;
        let mut worst = 0.0f64;
        for seed in &cfg.seeds {
            worst = worst.max(riesz_gate_deviation(spec, alpha, *seed)?);
        }
        entries.push(GateEntry {
            name: format!("riesz_fft vs riesz_bruteforce (d={d}, n={n}, alpha={alpha}, {} seeds)", cfg.seeds.len()),
            deviation: worst,
            tolerance: cfg.riesz_tolerance,
            passed: worst <= cfg.riesz_tolerance,
        });
    }
    let seed = cfg.seeds.first().copied().unwrap_or(0);
    for (d, n) in [(1, cfg.n_1d), (2, cfg.maximal_n_2d)] {
        let spec = GridSpec::centered_box(d, n, 4.0)?;
        let worst = maximal_gate_deviation(spec, cfg.maximal_points, seed)?;
        entries.push(GateEntry {
            name: format!("maximal (full ladder) vs maximal_bruteforce (d={d}, n={n}, {} points)", cfg.maximal_points),
            deviation: worst,
            tolerance: cfg.maximal_tolerance,
            passed: worst <= cfg.maximal_tolerance,
        });
    }
    let passed = entries.iter().all(|e| e.passed);
    Ok(GateReport { entries, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_gate_passes() {
        let cfg = GateConfig {
            seeds: alloc::vec![1, 2],
            n_1d: 64,
            n_2d: 12,
            maximal_n_2d: 10,
            maximal_points: 5,
            ..GateConfig::default()
        };
        let rep = oracle_gate(&cfg).unwrap();
        assert_eq!(rep.entries.len(), 4);
        assert!(rep.passed, "{rep:?}");
    }
}
