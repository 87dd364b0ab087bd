//! Morrey constants of weights, and the canonical weight families.
//!
//! The Morrey condition bounds `rho^alpha (avg over B of b^p)^(1/p)` by `A`
//! for every ball `B` of radius `rho`. On the grid a ball is a set of cells,
//! and `rho` is taken as its volume radius (the radius of the continuum ball
//! with the same volume), which keeps the one-cell balls from inflating the
//! scan.

use alloc::vec::Vec;
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::grid::{
    index_r2, lattice_count, norm, volume_radius, Ball, Field, GridSpec, Index, Point, RowPrefix, MAX_DIM,
};
use crate::maximal::RadiusLadder;
use crate::quad::unit_cube_power_integral;
use crate::{Error, Result};

/// Which reading of the Morrey condition to scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MorreyConvention {
    /// `rho^alpha (avg_B b^p)^(1/p)`.
    #[default]
    Avg,
    /// `rho^alpha (int_B b^p)^(1/p)`.
    Raw,
}

impl MorreyConvention {
    pub fn as_str(&self) -> &'static str {
        match self {
            MorreyConvention::Avg => "avg",
            MorreyConvention::Raw => "raw",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub center: Point,
    pub radius: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MorreyReport {
    #[serde(rename = "A")]
    pub a: f64,
    pub argmax_ball: Ball,
    /// Volume radius of the maximizing ball.
    pub argmax_volume_radius: f64,
    pub scan: Vec<ScanEntry>,
    pub convention: MorreyConvention,
}

/// Center stride of the coarsened scan, in cells.
pub const SCAN_STRIDE: usize = 4;

/// Value of the scan function for a lattice ball with `count` cells whose
/// `b^p` cell sum is `sum`.
#[inline]
pub(crate) fn scan_value(sum: f64, count: u64, spec: &GridSpec, p: f64, alpha: f64, conv: MorreyConvention) -> f64 {
    let rho = volume_radius(count, spec.h, spec.d);
    let inner = match conv {
        MorreyConvention::Avg => sum / count as f64,
        MorreyConvention::Raw => sum * spec.cell_volume(),
    };
    rho.powf(alpha) * inner.max(0.0).powf(1.0 / p)
}

/// Estimates the Morrey constant of `b` over a coarsened scan.
///
/// Centers lie on a lattice of stride [`SCAN_STRIDE`] anchored at the first
/// maximizer of `b`, restricted to the support's bounding box dilated by the
/// current radius; radii run over the default ladder. Ties go to the smaller
/// radius, then the lexicographically first center.
pub fn morrey_constant(b: &Field, p: f64, alpha: f64, convention: MorreyConvention) -> Result<MorreyReport> {
    morrey_constant_with(b, p, alpha, convention, &RadiusLadder::default_for(&b.spec))
}

pub fn morrey_constant_with(
    b: &Field,
    p: f64,
    alpha: f64,
    convention: MorreyConvention,
    ladder: &RadiusLadder,
) -> Result<MorreyReport> {
    let spec = b.spec;
    check_exponents(&spec, p, alpha)?;
    b.check_nonnegative("b")?;
    let origin_ball = Ball { center: spec.point(&[0; MAX_DIM]), radius: ladder.radii[0] };
    let Some((lo, hi)) = b.support_bbox() else {
        return Ok(MorreyReport {
            a: 0.0,
            argmax_ball: origin_ball,
            argmax_volume_radius: volume_radius(1, spec.h, spec.d),
            scan: Vec::new(),
            convention,
        });
    };
    let anchor = argmax(b);
    let bp = b.abs_pow(p);
    let pre = RowPrefix::new(&bp);

    let mut scan = Vec::new();
    let mut best = (f64::NEG_INFINITY, origin_ball, 0.0);
    for &radius in &ladder.radii {
        let r2 = index_r2(radius, spec.h);
        let count = lattice_count(r2, spec.d);
        let reach = (radius / spec.h).ceil() as i64;
        let axes: Vec<Vec<usize>> = (0..spec.d)
            .map(|a| {
                let from = lo[a] as i64 - reach;
                let to = hi[a] as i64 + reach;
                strided(anchor[a] as i64, from, to, spec.n)
            })
            .collect();
        for_each_index(&axes, spec.d, |idx| {
            let value = scan_value(pre.ball_sum(idx, r2), count, &spec, p, alpha, convention);
            let center = spec.point(idx);
            scan.push(ScanEntry { center, radius, value });
            if value > best.0 {
                best = (value, Ball { center, radius }, volume_radius(count, spec.h, spec.d));
            }
        });
    }
    Ok(MorreyReport { a: best.0.max(0.0), argmax_ball: best.1, argmax_volume_radius: best.2, scan, convention })
}

pub(crate) fn check_exponents(spec: &GridSpec, p: f64, alpha: f64) -> Result<()> {
    if !(p > 1.0) {
        return Err(Error::param("p", alloc::format!("Morrey exponent p = {p} must exceed 1")));
    }
    crate::riesz::check_alpha(alpha, spec.d)
}

/// First index attaining the maximum value.
pub(crate) fn argmax(f: &Field) -> Index {
    let mut best = 0;
    for (k, v) in f.values.iter().enumerate() {
        if *v > f.values[best] {
            best = k;
        }
    }
    f.spec.unflat(best)
}

/// Grid indices in `[from, to]` congruent to `anchor` modulo the stride.
fn strided(anchor: i64, from: i64, to: i64, n: usize) -> Vec<usize> {
    let s = SCAN_STRIDE as i64;
    let from = from.max(0);
    let to = to.min(n as i64 - 1);
    let first = from + (anchor - from).rem_euclid(s);
    (first..=to).step_by(SCAN_STRIDE).map(|i| i as usize).collect()
}

fn for_each_index(axes: &[Vec<usize>], d: usize, mut f: impl FnMut(&Index)) {
    let mut idx = [0usize; MAX_DIM];
    match d {
        1 => {
            for &i in &axes[0] {
                idx[0] = i;
                f(&idx);
            }
        }
        2 => {
            for &i in &axes[0] {
                for &j in &axes[1] {
                    idx[0] = i;
                    idx[1] = j;
                    f(&idx);
                }
            }
        }
        _ => {
            for &i in &axes[0] {
                for &j in &axes[1] {
                    for &k in &axes[2] {
                        idx = [i, j, k];
                        f(&idx);
                    }
                }
            }
        }
    }
}

/// `scale |x|^-beta` on `|x| <= cutoff`, zero outside.
///
/// A grid point at the origin gets the cell average of `|x|^-beta` instead
/// of the singular point value.
pub fn power_weight(beta: f64, scale: f64, cutoff: f64, spec: &GridSpec) -> Result<Field> {
    let d = spec.d;
    if !(beta >= 0.0 && beta < d as f64) {
        return Err(Error::param("beta", alloc::format!("exponent {beta} must lie in [0, {d})")));
    }
    if cutoff > spec.half_extent() * (1.0 + 1e-12) {
        return Err(Error::param(
            "cutoff",
            alloc::format!("cutoff {cutoff} exceeds the grid half-extent {}", spec.half_extent()),
        ));
    }
    let origin_cell = spec.exact_index(&[0.0; MAX_DIM]);
    if origin_cell.is_none() && d > 1 && spec.contains(&[0.0; MAX_DIM]) {
        return Err(Error::InvalidGrid("the origin must be a grid point in d > 1".into()));
    }
    // cell average of |x|^-beta over [-h/2, h/2]^d
    let center_value = scale * spec.h.powf(-beta) * unit_cube_power_integral(d as f64 - beta, d);
    let mut f = Field::from_fn(*spec, |x| {
        let r = norm(x, d);
        if r > cutoff {
            0.0
        } else {
            scale * r.powf(-beta)
        }
    });
    match origin_cell {
        Some(idx) => {
            let k = spec.flat(&idx);
            f.values[k] = if scale == 0.0 { 0.0 } else { center_value };
        }
        None => {
            // d = 1 with the origin off the lattice: exact average over the
            // cell containing it
            if let Some(idx) = spec.nearest(&[0.0; MAX_DIM]) {
                let c = spec.point(&idx)[0];
                let (a, b) = (c - 0.5 * spec.h, c + 0.5 * spec.h);
                let e = 1.0 - beta;
                let prim = |t: f64| t.abs().powf(e) * t.signum() / e;
                f.values[spec.flat(&idx)] = scale * (prim(b) - prim(a)) / spec.h;
            }
        }
    }
    Ok(f)
}

/// `scale` on `|x| < radius`, zero outside.
pub fn indicator_weight(radius: f64, scale: f64, spec: &GridSpec) -> Field {
    Field::from_fn(*spec, |x| if norm(x, spec.d) < radius { scale } else { 0.0 })
}

/// Smooth window equal to one near the origin and vanishing for
/// `max |x_i| >= edge`.
pub(crate) fn window(x: &Point, d: usize, edge: f64) -> f64 {
    let mut w = 1.0;
    for &xi in &x[..d] {
        let t = xi / edge;
        if t.abs() >= 1.0 {
            return 0.0;
        }
        w *= (1.0 - 1.0 / (1.0 - t * t)).exp();
    }
    w
}

/// Squared smoothed noise times a compact window.
///
/// The noise is a sum of Gaussian bumps of width `smoothness * L` (with `L`
/// the grid half-extent) and seeded amplitudes in `[-1, 1]`, so the weight
/// is a fixed continuum function of `x` for a fixed seed and box. The window
/// vanishes in the outer `n/8`-cell band.
pub fn random_weight(seed: u64, spec: &GridSpec, smoothness: f64) -> Field {
    let d = spec.d;
    let l = spec.half_extent();
    let edge = 0.7 * l;
    let width = smoothness * l;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = 8 * d;
    let bumps: Vec<(Point, f64)> = (0..count)
        .map(|_| {
            let mut c = [0.0; MAX_DIM];
            for v in c.iter_mut().take(d) {
                *v = rng.gen_range(-edge..edge);
            }
            (c, rng.gen_range(-1.0..1.0))
        })
        .collect();
    let inv = 1.0 / (2.0 * width * width);
    Field::from_fn(*spec, |x| {
        let w = window(x, d, edge);
        if w == 0.0 {
            return 0.0;
        }
        let g: f64 = bumps
            .iter()
            .map(|(c, a)| {
                let r2: f64 = (0..d).map(|i| (x[i] - c[i]) * (x[i] - c[i])).sum();
                a * (-r2 * inv).exp()
            })
            .sum();
        g * g * w
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zero_weight_has_zero_constant() {
        let s = GridSpec::centered(1, 64, 0.1).unwrap();
        let rep = morrey_constant(&Field::zeros(s), 2.0, 0.5, MorreyConvention::Avg).unwrap();
        assert_eq!(rep.a, 0.0);
        assert!(rep.scan.is_empty());
    }

    #[test]
    fn rejects_bad_inputs() {
        let s = GridSpec::centered(1, 64, 0.1).unwrap();
        let mut b = Field::constant(s, 1.0);
        assert!(morrey_constant(&b, 1.0, 0.5, MorreyConvention::Avg).is_err());
        assert!(morrey_constant(&b, 2.0, 1.0, MorreyConvention::Avg).is_err());
        b.values[3] = -1.0;
        assert!(matches!(
            morrey_constant(&b, 2.0, 0.5, MorreyConvention::Avg),
            Err(Error::NegativeValue { index: 3, .. })
        ));
    }

    #[test]
    fn indicator_constant_is_one() {
        // rho^0.25 min(1, 1/rho)^(1/2) peaks at rho = 1
        let s = GridSpec::centered_box(1, 512, 4.0).unwrap();
        let b = indicator_weight(1.0 + 0.25 * s.h, 1.0, &s);
        let rep = morrey_constant(&b, 2.0, 0.25, MorreyConvention::Avg).unwrap();
        assert_relative_eq!(rep.a, 1.0, max_relative = 0.03);
        assert!(rep.argmax_ball.center[0].abs() <= 4.0 * s.h);
        assert!((rep.argmax_volume_radius - 1.0).abs() < 0.15);
        // the report is internally consistent
        let top = rep.scan.iter().map(|e| e.value).fold(0.0f64, f64::max);
        assert_eq!(top, rep.a);
    }

    #[test]
    fn power_weight_constant_matches_closed_form() {
        // (d / (d - p beta))^(1/p) with beta = alpha
        let (p, alpha) = (1.5, 0.5);
        let s = GridSpec::centered_box(1, 512, 1.0).unwrap();
        let b = power_weight(alpha, 1.0, 1.0, &s).unwrap();
        let rep = morrey_constant(&b, p, alpha, MorreyConvention::Avg).unwrap();
        let exact = 4f64.powf(2.0 / 3.0);
        assert_relative_eq!(rep.a, exact, max_relative = 0.05);
    }

    #[test]
    fn power_weight_values() {
        let s = GridSpec::centered(1, 256, 1.0 / 64.0).unwrap();
        assert!(power_weight(0.5, 0.0, 1.0, &s).unwrap().is_zero());
        let b = power_weight(0.5, 1.0, 1.0, &s).unwrap();
        let at = |x: f64| b.at(&s.exact_index(&[x, 0.0, 0.0]).unwrap());
        assert_relative_eq!(at(0.25), 2.0, max_relative = 1e-14);
        let h = s.h;
        assert_relative_eq!(at(0.0), 2.0 * (h / 2.0).powf(0.5) / 0.5 / h, max_relative = 1e-13);
        assert_eq!(at(1.5), 0.0);
        assert!(power_weight(0.5, 1.0, 3.0, &s).is_err());
        assert!(power_weight(1.0, 1.0, 1.0, &s).is_err());
    }

    #[test]
    fn power_weight_origin_cell_2d() {
        let s = GridSpec::centered(2, 32, 0.1).unwrap();
        let b = power_weight(0.8, 1.0, 1.0, &s).unwrap();
        // brute midpoint average of |x|^-0.8 over the central cell
        let m = 1000;
        let mut acc = 0.0;
        for i in 0..m {
            for j in 0..m {
                let x = -0.05 + (i as f64 + 0.5) * 0.1 / m as f64;
                let y = -0.05 + (j as f64 + 0.5) * 0.1 / m as f64;
                acc += (x * x + y * y).powf(-0.4);
            }
        }
        acc /= (m * m) as f64;
        assert_relative_eq!(b.at(&[16, 16, 0]), acc, max_relative = 2e-3);
    }

    #[test]
    fn random_weight_is_deterministic_nonnegative_and_compact() {
        let s = GridSpec::centered(2, 48, 8.0 / 48.0).unwrap();
        let a = random_weight(5, &s, 0.15);
        let b = random_weight(5, &s, 0.15);
        assert_eq!(a, b);
        assert!(a.min() >= 0.0);
        assert!(a.max() > 0.0);
        let band = s.n / 8;
        for k in 0..s.len() {
            let idx = s.unflat(k);
            if (0..2).any(|ax| idx[ax] < band || idx[ax] >= s.n - band) {
                assert_eq!(a.values[k], 0.0);
            }
        }
        let rep = morrey_constant(&a, 2.0, 0.5, MorreyConvention::Avg).unwrap();
        assert!(rep.a.is_finite() && rep.a > 0.0);
    }

    #[test]
    fn raw_convention_differs_by_volume() {
        let s = GridSpec::centered_box(1, 256, 4.0).unwrap();
        let b = indicator_weight(1.0, 1.0, &s);
        let avg = morrey_constant(&b, 2.0, 0.25, MorreyConvention::Avg).unwrap();
        let raw = morrey_constant(&b, 2.0, 0.25, MorreyConvention::Raw).unwrap();
        assert_eq!(raw.convention, MorreyConvention::Raw);
        assert!(raw.a > avg.a);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(16))]
        #[test]
        fn scaling_is_linear_and_keeps_argmax(seed in 0u64..1000, c in 0.01f64..50.0) {
            let s = GridSpec::centered(1, 128, 1.0 / 16.0).unwrap();
            let b = random_weight(seed, &s, 0.2);
            let r1 = morrey_constant(&b, 2.5, 0.3, MorreyConvention::Avg).unwrap();
            let r2 = morrey_constant(&b.scaled(c), 2.5, 0.3, MorreyConvention::Avg).unwrap();
            proptest::prop_assert!((r2.a - c * r1.a).abs() <= 1e-12 * c * r1.a);
            proptest::prop_assert_eq!(r1.argmax_ball, r2.argmax_ball);
        }
    }
}
