//! Centered Hardy–Littlewood maximal operator on the grid.
//!
//! `M f(x)` is the largest average of `|f|` over the balls of a
//! [`RadiusLadder`] centered at the grid point `x`. Each ball is the set of
//! lattice cells with centers strictly inside it, cells off the grid counting
//! as zeros, and its volume is the cell count times `h^d`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::grid::{index_r2, lattice_count, norm, Field, GridSpec, Index, Point, RowPrefix};
use crate::{Error, Result};

/// Increasing ball radii for the sup in the maximal operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusLadder {
    pub radii: Vec<f64>,
}

impl RadiusLadder {
    /// Integer multiples `h, 2h, ..., 8h` merged with the geometric sequence
    /// `h 1.25^k`, up to and including the grid diameter.
    pub fn default_for(spec: &GridSpec) -> Self {
        let h = spec.h;
        let top = spec.diameter();
        let mut radii: Vec<f64> = (1..=8).map(|k| k as f64 * h).filter(|r| *r <= top).collect();
        let mut r = h;
        while r < top {
            radii.push(r);
            r *= 1.25;
        }
        radii.push(top);
        radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
        radii.dedup_by(|a, b| (*a - *b).abs() <= 1e-3 * h);
        RadiusLadder { radii }
    }

    /// One radius per distinct lattice distance up to the grid diameter, so
    /// that every realizable discrete ball is visited.
    pub fn full(spec: &GridSpec) -> Self {
        let h = spec.h;
        let radii = distinct_squared_distances(spec)
            .into_iter()
            .map(|m| if m == 0 { h } else { h * (m as f64 + 0.5).sqrt() })
            .collect();
        RadiusLadder { radii }
    }

    /// The coarsest subset of [`RadiusLadder::full`] whose averages are never
    /// below `1 - loss` times the exhaustive maximal function of a
    /// nonnegative field: every skipped ball sits inside a kept ball at most
    /// `1 / (1 - loss)` times its cell count.
    pub fn bounded(spec: &GridSpec, loss: f64) -> Result<Self> {
        if !(loss > 0.0 && loss < 1.0) {
            return Err(Error::param("loss", format!("{loss} is not in (0, 1)")));
        }
        let full = Self::full(spec);
        let counts = full.counts(spec);
        let mut radii = Vec::new();
        let mut i = 0;
        while i < counts.len() {
            let cap = counts[i] as f64 / (1.0 - loss);
            let mut j = i;
            while j + 1 < counts.len() && counts[j + 1] as f64 <= cap {
                j += 1;
            }
            radii.push(full.radii[j]);
            i = j + 1;
        }
        Ok(RadiusLadder { radii })
    }

    /// Cell counts of the lattice balls of each radius.
    pub fn counts(&self, spec: &GridSpec) -> Vec<u64> {
        self.radii.iter().map(|r| lattice_count(index_r2(*r, spec.h), spec.d)).collect()
    }

    /// Largest relative shortfall of this ladder's maximal function against
    /// the exhaustive one that the volume argument allows, over balls up to
    /// the largest rung.
    pub fn guaranteed_loss(&self, spec: &GridSpec) -> f64 {
        let mine = self.counts(spec);
        let mut worst = 0.0f64;
        let mut k = 0;
        for c in Self::full(spec).counts(spec) {
            while k < mine.len() && mine[k] < c {
                k += 1;
            }
            if k == mine.len() {
                break;
            }
            worst = worst.max(1.0 - c as f64 / mine[k] as f64);
        }
        worst
    }

    pub fn validate(&self, spec: &GridSpec) -> Result<()> {
        if self.radii.is_empty() {
            return Err(Error::param("ladder", "empty radius ladder"));
        }
        if self.radii[0] < spec.h * (1.0 - 1e-12) {
            return Err(Error::param("ladder", format!("first radius {} below h", self.radii[0])));
        }
        if self.radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("ladder", "radii must be strictly increasing"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}

impl From<Vec<f64>> for RadiusLadder {
    fn from(radii: Vec<f64>) -> Self {
        RadiusLadder { radii }
    }
}

/// Distinct values of `|k|^2` over `k in Z^d` up to `(n-1)^2 d`.
pub(crate) fn distinct_squared_distances(spec: &GridSpec) -> Vec<u64> {
    let top = ((spec.n - 1) * (spec.n - 1) * spec.d) as u64;
    let kmax = (top as f64).sqrt().ceil() as u64;
    let mut set = BTreeSet::new();
    match spec.d {
        1 => (0..=kmax).for_each(|i| {
            set.insert(i * i);
        }),
        2 => {
            for i in 0..=kmax {
                for j in i..=kmax {
                    set.insert(i * i + j * j);
                }
            }
        }
        _ => {
            for i in 0..=kmax {
                for j in i..=kmax {
                    for k in j..=kmax {
                        set.insert(i * i + j * j + k * k);
                    }
                }
            }
        }
    }
    set.into_iter().filter(|m| *m <= top).collect()
}

/// Precomputed index-space thresholds and cell counts for a ladder.
pub(crate) struct LadderBalls {
    pub r2: Vec<f64>,
    pub counts: Vec<u64>,
}

impl LadderBalls {
    pub fn new(spec: &GridSpec, ladder: &RadiusLadder) -> Self {
        let r2: Vec<f64> = ladder.radii.iter().map(|r| index_r2(*r, spec.h)).collect();
        let counts = r2.iter().map(|t| lattice_count(*t, spec.d)).collect();
        LadderBalls { r2, counts }
    }
}

/// `M f` at one grid point.
pub fn maximal_at(f: &Field, idx: &Index, ladder: &RadiusLadder) -> f64 {
    let g = f.abs();
    let pre = RowPrefix::new(&g);
    let balls = LadderBalls::new(&f.spec, ladder);
    max_average(&g, &pre, &balls, g.max(), idx)
}

/// Averages are capped at `top = max |f|`, which only removes prefix-sum
/// rounding and makes `M c = c` exact.
fn max_average(g: &Field, pre: &RowPrefix<'_>, balls: &LadderBalls, top: f64, idx: &Index) -> f64 {
    // own cell first so that M f >= |f| holds exactly
    let mut best = g.at(idx);
    for (t, c) in balls.r2.iter().zip(&balls.counts) {
        let avg = (pre.ball_sum(idx, *t) / *c as f64).min(top);
        if avg > best {
            best = avg;
        }
    }
    best
}

/// `M f` at every grid point over the given ladder.
pub fn maximal_with(f: &Field, ladder: &RadiusLadder) -> Field {
    let spec = f.spec;
    let g = f.abs();
    let pre = RowPrefix::new(&g);
    let balls = LadderBalls::new(&spec, ladder);
    let top = g.max();
    let values = (0..spec.len()).map(|k| max_average(&g, &pre, &balls, top, &spec.unflat(k))).collect();
    Field { spec, values }
}

/// `M f` over the default ladder.
pub fn maximal(f: &Field) -> Field {
    maximal_with(f, &RadiusLadder::default_for(&f.spec))
}

/// `1` on `B_rho`, `(rho / |x|)^d` outside.
pub fn maximal_indicator_majorant(rho: f64, x: &Point, d: usize) -> f64 {
    let r = norm(x, d);
    if r <= rho {
        1.0
    } else {
        (rho / r).powi(d as i32)
    }
}

/// Denominator floor for the A1 ratio.
pub const A1_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct A1Report {
    /// `max M w / w` over points with `w > A1_FLOOR`.
    pub constant: f64,
    pub argmax: Index,
    /// Points at or below the floor, left out of the max.
    pub excluded: usize,
    /// Set when some excluded point is an interior zero: it has positive
    /// neighbours on both sides along an axis.
    pub degenerate: bool,
}

/// Empirical A1 constant of a nonnegative weight.
pub fn a1_constant(w: &Field) -> Result<A1Report> {
    a1_constant_with(w, &RadiusLadder::default_for(&w.spec))
}

pub fn a1_constant_with(w: &Field, ladder: &RadiusLadder) -> Result<A1Report> {
    w.check_nonnegative("w")?;
    let mw = maximal_with(w, ladder);
    a1_from_maximal(w, &mw)
}

pub(crate) fn a1_from_maximal(w: &Field, mw: &Field) -> Result<A1Report> {
    let spec = w.spec;
    let mut best = f64::NEG_INFINITY;
    let mut argmax = [0; 3];
    let mut excluded = 0;
    let mut degenerate = false;
    for k in 0..spec.len() {
        let v = w.values[k];
        if v > A1_FLOOR {
            let ratio = mw.values[k] / v;
            if ratio > best {
                best = ratio;
                argmax = spec.unflat(k);
            }
        } else {
            excluded += 1;
            if !degenerate {
                degenerate = interior_zero(w, &spec.unflat(k));
            }
        }
    }
    if excluded == spec.len() {
        return Err(Error::DegenerateWeight);
    }
    Ok(A1Report { constant: best, argmax, excluded, degenerate })
}

fn interior_zero(w: &Field, idx: &Index) -> bool {
    let spec = &w.spec;
    (0..spec.d).any(|a| {
        let positive_along = |step: i64| {
            let mut j = *idx;
            let mut pos = idx[a] as i64;
            loop {
                pos += step;
                if pos < 0 || pos >= spec.n as i64 {
                    return false;
                }
                j[a] = pos as usize;
                if w.at(&j) > A1_FLOOR {
                    return true;
                }
            }
        };
        positive_along(-1) && positive_along(1)
    })
}

/// `(M (b^p0))^(1/p0)`, floored at `b` so that the lift dominates `b`
/// pointwise despite rounding in the root.
pub fn a1_lift(b: &Field, p0: f64, p1: f64) -> Result<Field> {
    a1_lift_with(b, p0, p1, &RadiusLadder::default_for(&b.spec))
}

pub fn a1_lift_with(b: &Field, p0: f64, p1: f64, ladder: &RadiusLadder) -> Result<Field> {
    if !(p1 > 0.0 && p1 < p0) {
        return Err(Error::param("p1", format!("need 0 < p1 < p0, got p1 = {p1}, p0 = {p0}")));
    }
    b.check_nonnegative("b")?;
    let m = maximal_with(&b.abs_pow(p0), ladder);
    let inv = 1.0 / p0;
    m.zip_with(b, |mv, bv| mv.powf(inv).max(bv))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(spec: GridSpec, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Field::from_fn(spec, |_| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn ladder_shape() {
        let s = GridSpec::centered(2, 32, 0.1).unwrap();
        let l = RadiusLadder::default_for(&s);
        l.validate(&s).unwrap();
        assert_relative_eq!(l.radii[0], 0.1);
        for k in 1..=8 {
            assert!(l.radii.iter().any(|r| (r - k as f64 * 0.1).abs() < 1e-12));
        }
        assert_relative_eq!(*l.radii.last().unwrap(), s.diameter());
        RadiusLadder::full(&s).validate(&s).unwrap();
        assert!(RadiusLadder::from(Vec::new()).validate(&s).is_err());
    }

    #[test]
    fn constant_is_reproduced_exactly() {
        for (d, n) in [(1, 64), (2, 24), (3, 10)] {
            let s = GridSpec::centered(d, n, 0.25).unwrap();
            for c in [1.0, 2.5, 0.75, 3.0, 0.7, 0.1, 1e-3] {
                let m = maximal(&Field::constant(s, c));
                assert!(m.values.iter().all(|v| *v == c), "d={d} c={c}");
            }
        }
    }

    #[test]
    fn indicator_far_field_matches_continuum() {
        // averages over (x - t, x + t) peak at t = |x| + rho
        let s = GridSpec::centered_box(1, 1024, 8.0).unwrap();
        let rho = 0.5;
        let ind = Field::from_fn(s, |x| if x[0].abs() < rho { 1.0 } else { 0.0 });
        let full = RadiusLadder::full(&s);
        for x in [1.0, 1.5, 2.0] {
            let idx = s.exact_index(&[x, 0.0, 0.0]).unwrap();
            let got = maximal_at(&ind, &idx, &full);
            let want = rho / (x + rho);
            assert!((got - want).abs() <= 4.0 * s.h / (x + rho), "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn majorant_values() {
        assert_eq!(maximal_indicator_majorant(1.0, &[0.0; 3], 2), 1.0);
        assert_eq!(maximal_indicator_majorant(1.0, &[2.0, 0.0, 0.0], 1), 0.5);
        assert_relative_eq!(maximal_indicator_majorant(1.0, &[2.0, 0.0, 0.0], 3), 0.125);
    }

    #[test]
    fn majorant_dominates_maximal_of_indicator() {
        let s = GridSpec::centered_box(1, 512, 8.0).unwrap();
        let rho = 0.5;
        let ind = Field::from_fn(s, |x| if x[0].abs() < rho { 1.0 } else { 0.0 });
        let m = maximal(&ind);
        let idx = s.exact_index(&[1.0, 0.0, 0.0]).unwrap();
        // continuum value 1/3 against majorant 1/2
        assert!((m.at(&idx) - 1.0 / 3.0).abs() < 0.02);
        let sup = (0..s.len())
            .map(|k| m.values[k] / maximal_indicator_majorant(rho, &s.point_flat(k), 1))
            .fold(0.0f64, f64::max);
        assert!(sup <= 1.0 + 1e-12, "{sup}");
    }

    #[test]
    fn a1_of_constant_and_degenerate_weights() {
        let s = GridSpec::centered(1, 64, 0.1).unwrap();
        let rep = a1_constant(&Field::constant(s, 2.0)).unwrap();
        assert_eq!(rep.constant, 1.0);
        assert!(!rep.degenerate);
        assert_eq!(a1_constant(&Field::zeros(s)), Err(Error::DegenerateWeight));
        let mut holed = Field::constant(s, 1.0);
        holed.values[32] = 0.0;
        let rep = a1_constant(&holed).unwrap();
        assert!(rep.degenerate);
        assert_eq!(rep.excluded, 1);
    }

    #[test]
    fn lift_dominates_and_keeps_constants() {
        let s = GridSpec::centered(2, 24, 0.1).unwrap();
        let c = Field::constant(s, 4.0);
        assert_eq!(a1_lift(&c, 2.0, 1.5).unwrap(), c);
        let lifted = a1_lift(&Field::constant(s, 1.5), 2.5, 2.25).unwrap();
        assert!(lifted.values.iter().all(|v| (v - 1.5).abs() < 1e-14));
        let b = random_field(s, 9).abs();
        let lifted = a1_lift(&b, 2.5, 2.25).unwrap();
        assert!(lifted.values.iter().zip(&b.values).all(|(l, v)| l >= v));
        assert!(a1_lift(&b, 2.0, 2.0).is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]
        #[test]
        fn sublinear_homogeneous_and_dominating(seed in 0u64..10_000, c in 0.0f64..5.0) {
            let s = GridSpec::centered(2, 16, 0.1).unwrap();
            let f = random_field(s, seed);
            let g = random_field(s, seed + 7);
            let mf = maximal(&f);
            let mg = maximal(&g);
            let sum = maximal(&f.zip_with(&g, |a, b| a + b).unwrap());
            for k in 0..s.len() {
                proptest::prop_assert!(sum.values[k] <= mf.values[k] + mg.values[k] + 1e-12);
                proptest::prop_assert!(mf.values[k] >= f.values[k].abs());
            }
            // powers of two scale exactly
            let two = maximal(&f.scaled(2.0));
            proptest::prop_assert!(two.values.iter().zip(&mf.values).all(|(a, b)| *a == 2.0 * b));
            let mc = maximal(&f.scaled(c));
            for k in 0..s.len() {
                proptest::prop_assert!((mc.values[k] - c * mf.values[k]).abs() <= 1e-14 * c * mf.values[k].max(1e-300) + 1e-300);
            }
        }
    }
}
