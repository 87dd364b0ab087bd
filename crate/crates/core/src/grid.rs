//! Uniform grids, sampled fields and balls.
//!
//! A grid point is the center of a cubic cell of side `h`. Fields vanish
//! outside the grid box, and a ball contains exactly the cells whose centers
//! lie strictly inside it.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const MAX_DIM: usize = 3;

/// Default cap on the number of grid points.
pub const DEFAULT_MAX_POINTS: usize = 1 << 22;

/// A point of `R^d`; coordinates past `d` are ignored and kept at zero.
pub type Point = [f64; MAX_DIM];

/// Multi-index of a grid point; entries past `d` are zero.
pub type Index = [usize; MAX_DIM];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub d: usize,
    pub n: usize,
    pub h: f64,
    pub origin: Point,
}

impl GridSpec {
    pub fn new(d: usize, n: usize, h: f64, origin: Point) -> Result<Self> {
        Self::with_cap(d, n, h, origin, DEFAULT_MAX_POINTS)
    }

    pub fn with_cap(d: usize, n: usize, h: f64, origin: Point, max_points: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&d) {
            return Err(Error::UnsupportedDimension(d));
        }
        if n < 4 {
            return Err(Error::InvalidGrid(format!("n = {n} must be at least 4")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidGrid(format!("spacing h = {h} must be positive")));
        }
        if origin[..d].iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        let total = n.checked_pow(d as u32).unwrap_or(usize::MAX);
        if total > max_points {
            return Err(Error::InvalidGrid(format!("{total} points exceed the cap {max_points}")));
        }
        let mut o = [0.0; MAX_DIM];
        o[..d].copy_from_slice(&origin[..d]);
        Ok(GridSpec { d, n, h, origin: o })
    }

    /// Grid on `[-n h / 2, n h / 2)^d` whose point `n / 2` sits at the origin.
    pub fn centered(d: usize, n: usize, h: f64) -> Result<Self> {
        let o = -((n / 2) as f64) * h;
        Self::new(d, n, h, [o; MAX_DIM])
    }

    /// Centered grid with `n` points covering `[-half_extent, half_extent)^d`.
    pub fn centered_box(d: usize, n: usize, half_extent: f64) -> Result<Self> {
        Self::centered(d, n, 2.0 * half_extent / n as f64)
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.d as i32)
    }

    /// `n h / 2`, half the side of the grid box.
    pub fn half_extent(&self) -> f64 {
        0.5 * self.n as f64 * self.h
    }

    pub fn diameter(&self) -> f64 {
        self.n as f64 * self.h * (self.d as f64).sqrt()
    }

    /// Row-major flat index; axis 0 varies slowest.
    #[inline]
    pub fn flat(&self, idx: &Index) -> usize {
        let mut k = 0;
        for &i in &idx[..self.d] {
            k = k * self.n + i;
        }
        k
    }

    #[inline]
    pub fn unflat(&self, mut k: usize) -> Index {
        let mut idx = [0; MAX_DIM];
        for a in (0..self.d).rev() {
            idx[a] = k % self.n;
            k /= self.n;
        }
        idx
    }

    #[inline]
    pub fn point(&self, idx: &Index) -> Point {
        let mut x = [0.0; MAX_DIM];
        for a in 0..self.d {
            x[a] = self.origin[a] + idx[a] as f64 * self.h;
        }
        x
    }

    pub fn point_flat(&self, k: usize) -> Point {
        self.point(&self.unflat(k))
    }

    /// Whether `x` lies in the closed grid box (union of all cells).
    pub fn contains(&self, x: &Point) -> bool {
        (0..self.d).all(|a| {
            let t = (x[a] - self.origin[a]) / self.h;
            t >= -0.5 && t <= self.n as f64 - 0.5
        })
    }

    /// Index of the grid point nearest to `x`, if `x` is in the box.
    pub fn nearest(&self, x: &Point) -> Option<Index> {
        if !self.contains(x) {
            return None;
        }
        let mut idx = [0; MAX_DIM];
        for a in 0..self.d {
            let t = ((x[a] - self.origin[a]) / self.h).round();
            idx[a] = (t.max(0.0) as usize).min(self.n - 1);
        }
        Some(idx)
    }

    /// Index of `x` when it coincides with a grid point up to `1e-9 h`.
    pub fn exact_index(&self, x: &Point) -> Option<Index> {
        let idx = self.nearest(x)?;
        let y = self.point(&idx);
        let close = (0..self.d).all(|a| (y[a] - x[a]).abs() <= 1e-9 * self.h);
        close.then_some(idx)
    }

    /// The same box sampled with twice as many points per axis.
    pub fn refined(&self) -> Result<Self> {
        let h = 0.5 * self.h;
        let mut o = self.origin;
        for v in o.iter_mut().take(self.d) {
            *v -= 0.5 * h;
        }
        let centered = (0..self.d).all(|a| (self.origin[a] + (self.n / 2) as f64 * self.h).abs() <= 1e-12 * self.h);
        if centered {
            GridSpec::centered(self.d, 2 * self.n, h)
        } else {
            GridSpec::new(self.d, 2 * self.n, h, o)
        }
    }

    pub fn same_grid(&self, other: &GridSpec) -> bool {
        self.d == other.d && self.n == other.n && self.h == other.h && self.origin[..self.d] == other.origin[..other.d]
    }
}

#[inline]
pub fn norm(x: &Point, d: usize) -> f64 {
    x[..d].iter().map(|v| v * v).sum::<f64>().sqrt()
}

#[inline]
pub fn dist(x: &Point, y: &Point, d: usize) -> f64 {
    (0..d).map(|a| (x[a] - y[a]) * (x[a] - y[a])).sum::<f64>().sqrt()
}

/// Real samples on a grid, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

impl Field {
    pub fn new(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::InvalidGrid(format!("expected {} values, got {}", spec.len(), values.len())));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        Ok(Field { spec, values })
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Field { spec, values: vec![0.0; spec.len()] }
    }

    pub fn constant(spec: GridSpec, c: f64) -> Self {
        Field { spec, values: vec![c; spec.len()] }
    }

    pub fn from_fn(spec: GridSpec, mut f: impl FnMut(&Point) -> f64) -> Self {
        let values = (0..spec.len()).map(|k| f(&spec.point_flat(k))).collect();
        Field { spec, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn at(&self, idx: &Index) -> f64 {
        self.values[self.spec.flat(idx)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field { spec: self.spec, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Result<Field> {
        if !self.spec.same_grid(&other.spec) {
            return Err(Error::GridMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(Field { spec: self.spec, values })
    }

    pub fn abs(&self) -> Field {
        self.map(f64::abs)
    }

    /// `|v|^s` elementwise.
    pub fn abs_pow(&self, s: f64) -> Field {
        self.map(|v| v.abs().powf(s))
    }

    pub fn scaled(&self, c: f64) -> Field {
        self.map(|v| c * v)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `sum(values) * h^d`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spec.cell_volume()
    }

    /// Sum of `self * other * h^d`.
    pub fn dot(&self, other: &Field) -> Result<f64> {
        if !self.spec.same_grid(&other.spec) {
            return Err(Error::GridMismatch);
        }
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum();
        Ok(s * self.spec.cell_volume())
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Fails with the given name when any value is negative.
    pub fn check_nonnegative(&self, name: &str) -> Result<()> {
        match self.values.iter().position(|&v| v < 0.0) {
            Some(index) => Err(Error::NegativeValue { name: name.into(), index, value: self.values[index] }),
            None => Ok(()),
        }
    }

    /// Zero-extended multilinear interpolation at an arbitrary point.
    pub fn interpolate(&self, x: &Point) -> f64 {
        let s = &self.spec;
        let d = s.d;
        let mut base = [0i64; MAX_DIM];
        let mut frac = [0.0; MAX_DIM];
        for a in 0..d {
            let t = (x[a] - s.origin[a]) / s.h;
            let fl = t.floor();
            base[a] = fl as i64;
            frac[a] = t - fl;
        }
        let n = s.n as i64;
        let mut acc = 0.0;
        for corner in 0..(1usize << d) {
            let mut w = 1.0;
            let mut k = 0usize;
            let mut inside = true;
            for a in 0..d {
                let bit = (corner >> a) & 1;
                let i = base[a] + bit as i64;
                if i < 0 || i >= n {
                    inside = false;
                    break;
                }
                w *= if bit == 1 { frac[a] } else { 1.0 - frac[a] };
                k = k * s.n + i as usize;
            }
            if inside && w != 0.0 {
                acc += w * self.values[k];
            }
        }
        acc
    }

    /// Index bounding box of the cells where the field is nonzero.
    pub fn support_bbox(&self) -> Option<(Index, Index)> {
        let s = &self.spec;
        let mut lo = [usize::MAX; MAX_DIM];
        let mut hi = [0; MAX_DIM];
        let mut any = false;
        for (k, &v) in self.values.iter().enumerate() {
            if v != 0.0 {
                any = true;
                let idx = s.unflat(k);
                for a in 0..s.d {
                    lo[a] = lo[a].min(idx[a]);
                    hi[a] = hi[a].max(idx[a]);
                }
            }
        }
        for a in s.d..MAX_DIM {
            lo[a] = 0;
        }
        any.then_some((lo, hi))
    }
}

/// Open ball `B_radius(center)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    /// Balls below one cell width are rejected.
    pub fn new(center: Point, radius: f64, spec: &GridSpec) -> Result<Self> {
        if !(radius.is_finite() && radius >= spec.h * (1.0 - 1e-12)) {
            return Err(Error::param("radius", format!("radius {radius} is below the spacing {}", spec.h)));
        }
        Ok(Ball { center, radius })
    }
}

/// `(sum |f|^s h^d)^(1/s)`.
pub fn lp_norm(f: &Field, s: f64) -> Result<f64> {
    if !(s >= 1.0) || !s.is_finite() {
        return Err(Error::param("s", format!("exponent {s} must be at least 1")));
    }
    let sum: f64 = if s == 1.0 {
        f.values.iter().map(|v| v.abs()).sum()
    } else if s == 2.0 {
        f.values.iter().map(|v| v * v).sum()
    } else {
        f.values.iter().map(|v| v.abs().powf(s)).sum()
    };
    Ok((sum * f.spec.cell_volume()).powf(1.0 / s))
}

/// `sum of f over cells with centers in the ball, times h^d`.
pub fn ball_integral(f: &Field, ball: &Ball) -> f64 {
    let s = &f.spec;
    let d = s.d;
    let mut lo = [0usize; MAX_DIM];
    let mut hi = [0usize; MAX_DIM];
    for a in 0..d {
        let c = (ball.center[a] - s.origin[a]) / s.h;
        let r = ball.radius / s.h;
        let l = (c - r).floor().max(0.0);
        let u = (c + r).ceil().min((s.n - 1) as f64);
        if u < l {
            return 0.0;
        }
        lo[a] = l as usize;
        hi[a] = u as usize;
    }
    let r2 = ball.radius * ball.radius;
    let mut idx = lo;
    let mut acc = 0.0;
    loop {
        let x = s.point(&idx);
        let dd: f64 = (0..d).map(|a| (x[a] - ball.center[a]) * (x[a] - ball.center[a])).sum();
        if dd < r2 {
            acc += f.values[s.flat(&idx)];
        }
        // odometer over the index box, last axis fastest
        let mut a = d;
        loop {
            if a == 0 {
                return acc * s.cell_volume();
            }
            a -= 1;
            if idx[a] < hi[a] {
                idx[a] += 1;
                break;
            }
            idx[a] = lo[a];
        }
    }
}

/// Largest `k >= 0` with `k^2 < rem`, or `None` when `rem <= 0`.
#[inline]
pub(crate) fn half_width(rem: f64) -> Option<i64> {
    if rem <= 0.0 {
        return None;
    }
    let mut k = rem.sqrt().ceil() as i64 - 1;
    while (((k + 1) * (k + 1)) as f64) < rem {
        k += 1;
    }
    while k > 0 && (k * k) as f64 >= rem {
        k -= 1;
    }
    Some(k.max(0))
}

/// Squared radius in index units, snapped to an integer when within `1e-9`
/// so that radii on lattice distances give a reproducible open ball.
#[inline]
pub(crate) fn index_r2(radius: f64, h: f64) -> f64 {
    let r2 = (radius / h) * (radius / h);
    let rounded = r2.round();
    if (r2 - rounded).abs() <= 1e-9 * rounded.max(1.0) {
        rounded
    } else {
        r2
    }
}

/// Number of lattice points `k in Z^d` with `|k|^2 < r2`.
pub(crate) fn lattice_count(r2: f64, d: usize) -> u64 {
    match d {
        1 => half_width(r2).map_or(0, |k| (2 * k + 1) as u64),
        _ => {
            let Some(k0) = half_width(r2) else { return 0 };
            (-k0..=k0).map(|j| lattice_count(r2 - (j * j) as f64, d - 1)).sum()
        }
    }
}

/// Radius of the continuum ball with the same volume as `count` cells.
pub fn volume_radius(count: u64, h: f64, d: usize) -> f64 {
    let unit = match d {
        1 => 2.0,
        2 => core::f64::consts::PI,
        _ => 4.0 * core::f64::consts::PI / 3.0,
    };
    h * (count as f64 / unit).powf(1.0 / d as f64)
}

/// Row prefix sums along the last axis, for sums over lattice balls centered
/// at grid points.
pub(crate) struct RowPrefix<'a> {
    spec: &'a GridSpec,
    prefix: Vec<f64>,
}

impl<'a> RowPrefix<'a> {
    pub fn new(f: &'a Field) -> Self {
        let s = &f.spec;
        let rows = s.len() / s.n;
        let mut prefix = vec![0.0; rows * (s.n + 1)];
        for row in 0..rows {
            let src = &f.values[row * s.n..(row + 1) * s.n];
            let dst = &mut prefix[row * (s.n + 1)..(row + 1) * (s.n + 1)];
            let mut acc = 0.0;
            for (j, v) in src.iter().enumerate() {
                acc += v;
                dst[j + 1] = acc;
            }
        }
        RowPrefix { spec: s, prefix }
    }

    #[inline]
    fn segment(&self, row: usize, center: i64, k: i64) -> f64 {
        let n = self.spec.n as i64;
        let lo = (center - k).max(0);
        let hi = (center + k).min(n - 1);
        if hi < lo {
            return 0.0;
        }
        let base = row * (self.spec.n + 1);
        self.prefix[base + hi as usize + 1] - self.prefix[base + lo as usize]
    }

    /// Sum of values over cells `idx + k` with `|k|^2 < r2`, cells outside the
    /// grid contributing zero.
    pub fn ball_sum(&self, idx: &Index, r2: f64) -> f64 {
        let s = self.spec;
        let n = s.n as i64;
        let last = idx[s.d - 1] as i64;
        match s.d {
            1 => half_width(r2).map_or(0.0, |k| self.segment(0, last, k)),
            2 => {
                let Some(k0) = half_width(r2) else { return 0.0 };
                let c0 = idx[0] as i64;
                let mut acc = 0.0;
                for i in (c0 - k0).max(0)..=(c0 + k0).min(n - 1) {
                    let dy = i - c0;
                    if let Some(k) = half_width(r2 - (dy * dy) as f64) {
                        acc += self.segment(i as usize, last, k);
                    }
                }
                acc
            }
            _ => {
                let Some(k0) = half_width(r2) else { return 0.0 };
                let (c0, c1) = (idx[0] as i64, idx[1] as i64);
                let mut acc = 0.0;
                for i in (c0 - k0).max(0)..=(c0 + k0).min(n - 1) {
                    let di = i - c0;
                    let rem = r2 - (di * di) as f64;
                    let Some(k1) = half_width(rem) else { continue };
                    for j in (c1 - k1).max(0)..=(c1 + k1).min(n - 1) {
                        let dj = j - c1;
                        if let Some(k) = half_width(rem - (dj * dj) as f64) {
                            acc += self.segment(i as usize * s.n + j as usize, last, k);
                        }
                    }
                }
                acc
            }
        }
    }
}
