//! Probe families: the weights `b` and the sources `f` (or `u`) fed to the
//! checks. Every member is a fixed function of the continuum variable, so
//! refining the grid samples the same function more finely.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::grid::{Field, GridSpec, Point, MAX_DIM};
use crate::morrey::{indicator_weight, power_weight, random_weight};
use crate::params::ExponentParams;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightClass {
    Power,
    Indicator,
    Random,
    /// Weights read from field files.
    File,
}

impl WeightClass {
    pub const ALL: [WeightClass; 4] =
        [WeightClass::Power, WeightClass::Indicator, WeightClass::Random, WeightClass::File];

    pub fn as_str(&self) -> &'static str {
        match self {
            WeightClass::Power => "power",
            WeightClass::Indicator => "indicator",
            WeightClass::Random => "random",
            WeightClass::File => "file",
        }
    }

    /// Classes whose members may vanish inside their support hull.
    pub fn may_vanish(&self) -> bool {
        matches!(self, WeightClass::Random | WeightClass::File)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FamilyConfig {
    /// Power-weight exponents as fractions of [`ExponentParams::power_weight_cap`].
    pub power_fractions: Vec<f64>,
    pub power_cutoff: f64,
    pub indicator_radii: Vec<f64>,
    pub random_weight_seeds: Vec<u64>,
    /// Bump width of the random weights relative to the box half-extent.
    pub random_smoothness: f64,
    pub gaussian_sigmas: Vec<f64>,
    pub bump_seeds: Vec<u64>,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        FamilyConfig {
            power_fractions: alloc::vec![0.3, 0.5, 0.7],
            power_cutoff: 1.0,
            indicator_radii: alloc::vec![1.0],
            random_weight_seeds: (1..=20).collect(),
            random_smoothness: 0.15,
            gaussian_sigmas: alloc::vec![0.2, 0.3, 0.4],
            bump_seeds: (101..=120).collect(),
        }
    }
}

/// A named weight sample.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedWeight {
    pub class: WeightClass,
    pub name: String,
    pub b: Field,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedSource {
    pub name: String,
    pub f: Field,
}

impl FamilyConfig {
    pub fn weights(&self, params: &ExponentParams, spec: &GridSpec) -> Result<Vec<NamedWeight>> {
        let mut out = Vec::new();
        let cap = params.power_weight_cap();
        for t in &self.power_fractions {
            let beta = t * cap;
            out.push(NamedWeight {
                class: WeightClass::Power,
                name: format!("power(beta={beta:.4})"),
                b: power_weight(beta, 1.0, self.power_cutoff, spec)?,
            });
        }
        for r in &self.indicator_radii {
            out.push(NamedWeight {
                class: WeightClass::Indicator,
                name: format!("indicator(R={r})"),
                b: indicator_weight(*r, 1.0, spec),
            });
        }
        for seed in &self.random_weight_seeds {
            out.push(NamedWeight {
                class: WeightClass::Random,
                name: format!("random(seed={seed})"),
                b: random_weight(*seed, spec, self.random_smoothness),
            });
        }
        Ok(out)
    }

    pub fn sources(&self, spec: &GridSpec) -> Vec<NamedSource> {
        let mut out: Vec<NamedSource> = self
            .gaussian_sigmas
            .iter()
            .map(|s| NamedSource { name: format!("gauss(sigma={s})"), f: gaussian(*s, spec) })
            .collect();
        out.extend(
            self.bump_seeds.iter().map(|s| NamedSource { name: format!("bump(seed={s})"), f: random_bump(*s, spec) }),
        );
        out
    }
}

/// `exp(-|x|^2 / (2 sigma^2))`.
pub fn gaussian(sigma: f64, spec: &GridSpec) -> Field {
    let inv = 1.0 / (2.0 * sigma * sigma);
    Field::from_fn(*spec, |x| {
        let r2: f64 = x[..spec.d].iter().map(|v| v * v).sum();
        (-r2 * inv).exp()
    })
}

/// `exp(1 - 1 / (1 - t^2))` for `t < 1`, zero otherwise.
fn smooth_cap(t2: f64) -> f64 {
    if t2 >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t2)).exp()
    }
}

/// Sum of three smooth compactly supported caps with seeded centers, radii
/// and positive heights, supported in `max |x_i| < 0.7 L`.
pub fn random_bump(seed: u64, spec: &GridSpec) -> Field {
    let d = spec.d;
    let l = spec.half_extent();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let caps: Vec<(Point, f64, f64)> = (0..3)
        .map(|_| {
            let mut c = [0.0; MAX_DIM];
            for v in c.iter_mut().take(d) {
                *v = rng.gen_range(-0.4 * l..0.4 * l);
            }
            let radius = rng.gen_range(0.15 * l..0.3 * l);
            let height = rng.gen_range(0.2..1.0);
            (c, radius, height)
        })
        .collect();
    Field::from_fn(*spec, |x| {
        caps.iter()
            .map(|(c, radius, height)| {
                let t2: f64 = (0..d).map(|a| (x[a] - c[a]) * (x[a] - c[a])).sum::<f64>() / (radius * radius);
                height * smooth_cap(t2)
            })
            .sum()
    })
}
