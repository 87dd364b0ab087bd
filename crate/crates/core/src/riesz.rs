//! The Riesz potential `R_alpha f(x) = int f(x + y) |y|^(alpha - d) dy`.
//!
//! Sources are piecewise constant on grid cells and vanish off the grid box,
//! so the potential at a grid point is `sum_j w(i - j) f_j` with `w(k)` the
//! exact integral of `|y|^(alpha - d)` over the cell at offset `k`. The same
//! weight table drives the direct sum, the FFT convolution and the oracle.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
use num_traits::Float;

use crate::fft::{fft_nd, Fft};
use crate::grid::{Field, GridSpec, Index, Point, MAX_DIM};
use crate::quad::{unit_cube_power_integral, GaussLegendre};
use crate::{Error, Result};

pub(crate) fn check_alpha(alpha: f64, d: usize) -> Result<()> {
    if !(alpha > 0.0 && alpha < d as f64) {
        return Err(Error::param("alpha", alloc::format!("alpha = {alpha} must lie in (0, {d})")));
    }
    Ok(())
}

/// Kernel weights for offsets `k` with `|k_i| < n`, stored for the
/// nonnegative octant (the kernel is even in every coordinate).
#[derive(Debug, Clone)]
pub struct RieszKernelTable {
    pub spec: GridSpec,
    pub alpha: f64,
    weights: Vec<f64>,
}

impl RieszKernelTable {
    pub fn new(spec: GridSpec, alpha: f64) -> Result<Self> {
        check_alpha(alpha, spec.d)?;
        let scale = spec.h.powf(alpha);
        let d = spec.d;
        let weights = (0..spec.len()).map(|k| scale * cell_integral(&spec.unflat(k), alpha, d)).collect();
        Ok(RieszKernelTable { spec, alpha, weights })
    }

    /// Weight of the cell at signed offset `k`.
    #[inline]
    pub fn weight(&self, k: &[i64; MAX_DIM]) -> f64 {
        let mut idx = [0usize; MAX_DIM];
        for a in 0..self.spec.d {
            idx[a] = k[a].unsigned_abs() as usize;
        }
        self.weights[self.spec.flat(&idx)]
    }

    pub fn central_weight(&self) -> f64 {
        self.weights[0]
    }
}

/// Integral of `|y|^(alpha - d)` over the unit cell centered at `k` (index
/// units, nonnegative entries).
fn cell_integral(k: &Index, alpha: f64, d: usize) -> f64 {
    let m = k[..d].iter().copied().max().unwrap_or(0);
    if m == 0 {
        return unit_cube_power_integral(alpha, d);
    }
    if d == 1 {
        // ((k + 1/2)^a - (k - 1/2)^a) / a without cancellation
        let kf = m as f64;
        let up = (alpha * (0.5 / kf).ln_1p()).exp_m1();
        let dn = (alpha * (-0.5 / kf).ln_1p()).exp_m1();
        return kf.powf(alpha) * (up - dn) / alpha;
    }
    let (order, pieces) = match m {
        1..=2 => (8, 4),
        3..=8 => (6, 1),
        9..=24 => (4, 1),
        _ => (3, 1),
    };
    let gl = GaussLegendre::new(order);
    let e = 0.5 * (alpha - d as f64);
    let w = 1.0 / pieces as f64;
    // tensor rule over sub-cells
    let mut nodes = Vec::with_capacity(order * pieces);
    for p in 0..pieces {
        let a = -0.5 + p as f64 * w;
        for (x, wt) in gl.nodes.iter().zip(&gl.weights) {
            nodes.push((a + 0.5 * w * (x + 1.0), 0.5 * w * wt));
        }
    }
    let c = [k[0] as f64, k[1] as f64, k[2] as f64];
    let mut acc = 0.0;
    if d == 2 {
        for &(x, wx) in &nodes {
            let u = c[0] + x;
            for &(y, wy) in &nodes {
                let v = c[1] + y;
                acc += wx * wy * (u * u + v * v).powf(e);
            }
        }
    } else {
        for &(x, wx) in &nodes {
            let u = c[0] + x;
            for &(y, wy) in &nodes {
                let v = c[1] + y;
                for &(z, wz) in &nodes {
                    let s = c[2] + z;
                    acc += wx * wy * wz * (u * u + v * v + s * s).powf(e);
                }
            }
        }
    }
    acc
}

/// Reusable potential on a fixed grid: the kernel table plus its transform
/// on the zero-padded box.
#[derive(Debug, Clone)]
pub struct RieszOperator {
    table: RieszKernelTable,
    plan: Fft,
    kernel_hat: Vec<Complex64>,
}

impl RieszOperator {
    pub fn new(spec: GridSpec, alpha: f64) -> Result<Self> {
        let table = RieszKernelTable::new(spec, alpha)?;
        let n = spec.n;
        let d = spec.d;
        // linear convolution of two length-n signals needs 2n - 1 points
        let m = (2 * n - 1).next_power_of_two();
        let plan = Fft::new(m);
        let mut kernel_hat = vec![Complex64::new(0.0, 0.0); m.pow(d as u32)];
        for (k, w) in table.weights.iter().enumerate() {
            let idx = spec.unflat(k);
            // place w at every sign combination of the octant offset
            for signs in 0..(1usize << d) {
                let mut flat = 0;
                let mut dup = false;
                for a in 0..d {
                    let neg = (signs >> a) & 1 == 1;
                    if neg && idx[a] == 0 {
                        dup = true;
                        break;
                    }
                    let pos = if neg { m - idx[a] } else { idx[a] };
                    flat = flat * m + pos;
                }
                if !dup {
                    kernel_hat[flat] = Complex64::new(*w, 0.0);
                }
            }
        }
        fft_nd(&plan, &mut kernel_hat, d, false);
        Ok(RieszOperator { table, plan, kernel_hat })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.table.spec
    }

    pub fn alpha(&self) -> f64 {
        self.table.alpha
    }

    pub fn table(&self) -> &RieszKernelTable {
        &self.table
    }

    /// Zero-padded FFT convolution.
    pub fn apply(&self, f: &Field) -> Result<Field> {
        let spec = self.table.spec;
        if !spec.same_grid(&f.spec) {
            return Err(Error::GridMismatch);
        }
        if f.is_zero() {
            return Ok(Field::zeros(spec));
        }
        let (d, m) = (spec.d, self.plan.len());
        let mut buf = vec![Complex64::new(0.0, 0.0); m.pow(d as u32)];
        for (k, v) in f.values.iter().enumerate() {
            buf[padded_flat(&spec.unflat(k), d, m)] = Complex64::new(*v, 0.0);
        }
        fft_nd(&self.plan, &mut buf, d, false);
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= k;
        }
        fft_nd(&self.plan, &mut buf, d, true);
        let values = (0..spec.len()).map(|k| buf[padded_flat(&spec.unflat(k), d, m)].re).collect();
        Ok(Field { spec, values })
    }

    /// Direct summation over all source cells, in ascending source order.
    pub fn apply_direct(&self, f: &Field) -> Result<Field> {
        let spec = self.table.spec;
        if !spec.same_grid(&f.spec) {
            return Err(Error::GridMismatch);
        }
        let src: Vec<(Index, f64)> =
            f.values.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(k, v)| (spec.unflat(k), *v)).collect();
        let values = (0..spec.len())
            .map(|i| {
                let x = spec.unflat(i);
                src.iter().map(|(y, v)| self.table.weight(&offset(&x, y, spec.d)) * v).sum()
            })
            .collect();
        Ok(Field { spec, values })
    }
}

#[inline]
fn padded_flat(idx: &Index, d: usize, m: usize) -> usize {
    idx[..d].iter().fold(0, |acc, &i| acc * m + i)
}

#[inline]
pub(crate) fn offset(x: &Index, y: &Index, d: usize) -> [i64; MAX_DIM] {
    let mut k = [0i64; MAX_DIM];
    for a in 0..d {
        k[a] = y[a] as i64 - x[a] as i64;
    }
    k
}

/// `R_alpha f` by direct summation.
pub fn riesz_direct(f: &Field, alpha: f64) -> Result<Field> {
    RieszOperator::new(f.spec, alpha)?.apply_direct(f)
}

/// `R_alpha f` by zero-padded FFT convolution with the same weight table.
pub fn riesz_fft(f: &Field, alpha: f64) -> Result<Field> {
    RieszOperator::new(f.spec, alpha)?.apply(f)
}

/// Angular nodes on the unit sphere `S^(d-1)` with weights summing to its area.
fn sphere_rule(d: usize) -> Vec<(Point, f64)> {
    match d {
        1 => vec![([1.0, 0.0, 0.0], 1.0), ([-1.0, 0.0, 0.0], 1.0)],
        2 => {
            let m = 128;
            (0..m)
                .map(|j| {
                    let t = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                    ([t.cos(), t.sin(), 0.0], 2.0 * PI / m as f64)
                })
                .collect()
        }
        _ => {
            let gl = GaussLegendre::new(24);
            let m = 48;
            let mut out = Vec::with_capacity(gl.nodes.len() * m);
            for (z, wz) in gl.nodes.iter().zip(&gl.weights) {
                let s = (1.0 - z * z).sqrt();
                for j in 0..m {
                    let t = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                    out.push(([s * t.cos(), s * t.sin(), *z], wz * 2.0 * PI / m as f64));
                }
            }
            out
        }
    }
}

/// `R_alpha g(x)` in polar form, `int_0^inf r^(alpha-1) int_S g(x + r theta) dsigma dr`.
///
/// Radial panels `[(k - 1/2) h, (k + 1/2) h]` carry the exact integral of
/// `r^(alpha - 1)` times the spherical integral at `r = k h`; the innermost
/// panel `[0, h/2]` uses `g(x)`. Off-grid samples are multilinear.
pub fn riesz_at_point_radial(g: &Field, alpha: f64, x: &Point) -> Result<f64> {
    let s = &g.spec;
    check_alpha(alpha, s.d)?;
    if !s.contains(x) {
        return Err(Error::OutsideGrid);
    }
    let rule = sphere_rule(s.d);
    let area: f64 = rule.iter().map(|(_, w)| w).sum();
    let mut acc = 0.5f64.powf(alpha) / alpha * area * g.interpolate(x);
    let reach = s.diameter() + s.h;
    let shells = (reach / s.h).ceil() as usize;
    for k in 1..=shells {
        let kf = k as f64;
        let radial = ((kf + 0.5).powf(alpha) - (kf - 0.5).powf(alpha)) / alpha;
        let r = kf * s.h;
        let mut sphere = 0.0;
        for (theta, w) in &rule {
            let mut y = *x;
            for a in 0..s.d {
                y[a] += r * theta[a];
            }
            sphere += w * g.interpolate(&y);
        }
        acc += radial * sphere;
    }
    Ok(acc * s.h.powf(alpha))
}

/// `|<g, R f> - <R g, f>| / max(|<g, R f>|, tiny)`.
pub fn adjoint_defect(f: &Field, g: &Field, alpha: f64) -> Result<f64> {
    if !f.spec.same_grid(&g.spec) {
        return Err(Error::GridMismatch);
    }
    let op = RieszOperator::new(f.spec, alpha)?;
    let left = g.dot(&op.apply(f)?)?;
    let right = op.apply(g)?.dot(f)?;
    Ok((left - right).abs() / left.abs().max(f64::MIN_POSITIVE))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_compact(spec: GridSpec, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let band = spec.n / 8;
        Field::from_fn(spec, |_| rng.gen_range(0.0..1.0)).values.iter().enumerate().fold(
            Field::zeros(spec),
            |mut acc, (k, v)| {
                let idx = spec.unflat(k);
                if (0..spec.d).all(|a| idx[a] >= band && idx[a] < spec.n - band) {
                    acc.values[k] = *v;
                }
                acc
            },
        )
    }

    #[test]
    fn zero_in_zero_out() {
        let s = GridSpec::centered(1, 64, 0.1).unwrap();
        let z = Field::zeros(s);
        assert!(riesz_direct(&z, 0.5).unwrap().is_zero());
        assert!(riesz_fft(&z, 0.5).unwrap().is_zero());
    }

    #[test]
    fn rejects_alpha_out_of_range() {
        let s = GridSpec::centered(2, 16, 0.1).unwrap();
        assert!(riesz_fft(&Field::zeros(s), 2.0).is_err());
        assert!(riesz_direct(&Field::zeros(s), 0.0).is_err());
    }

    #[test]
    fn table_weights_positive_and_central_closed_form() {
        let s = GridSpec::centered(1, 32, 0.05).unwrap();
        let t = RieszKernelTable::new(s, 0.4).unwrap();
        assert_relative_eq!(t.central_weight(), 2.0 * (0.025f64).powf(0.4) / 0.4, max_relative = 1e-14);
        for d in 1..=3 {
            let s = GridSpec::centered(d, [32, 12, 6][d - 1], 0.1).unwrap();
            let t = RieszKernelTable::new(s, 0.6).unwrap();
            assert!(t.weights.iter().all(|w| *w > 0.0));
        }
    }

    #[test]
    fn off_center_weights_are_cell_integrals_2d() {
        // compare against a fine midpoint rule on a few cells
        let s = GridSpec::centered(2, 8, 1.0).unwrap();
        let alpha = 0.5;
        let t = RieszKernelTable::new(s, alpha).unwrap();
        for k in [[1i64, 0, 0], [1, 1, 0], [3, 2, 0]] {
            let m = 400;
            let mut acc = 0.0;
            for i in 0..m {
                for j in 0..m {
                    let x = k[0] as f64 - 0.5 + (i as f64 + 0.5) / m as f64;
                    let y = k[1] as f64 - 0.5 + (j as f64 + 0.5) / m as f64;
                    acc += (x * x + y * y).powf(0.5 * (alpha - 2.0));
                }
            }
            acc /= (m * m) as f64;
            assert_relative_eq!(t.weight(&k), acc, max_relative = 1e-5);
        }
    }

    #[test]
    fn indicator_potential_at_origin_1d() {
        // R_alpha I_[-R,R] (0) = 2 R^alpha / alpha; exact when R sits on cell faces
        let alpha = 0.5;
        let rr = 1.0;
        let mut errs = Vec::new();
        for n in [256, 512] {
            let s = GridSpec::centered_box(1, n, 4.0).unwrap();
            let f = Field::from_fn(s, |x| if x[0].abs() < rr - 0.25 * s.h { 1.0 } else { 0.0 });
            let v = riesz_fft(&f, alpha).unwrap();
            let got = v.at(&[n / 2, 0, 0]);
            let face = (rr / s.h - 0.5).floor() * s.h + 0.5 * s.h;
            let exact_face = 2.0 * face.powf(alpha) / alpha;
            assert_relative_eq!(got, exact_face, max_relative = 1e-12);
            errs.push((got - 2.0 * rr.powf(alpha) / alpha).abs() / (2.0 * rr.powf(alpha) / alpha));
        }
        assert!(errs[0] <= 0.02);
        assert!(errs[1] < errs[0]);
    }

    #[test]
    fn fft_matches_direct() {
        for (d, n) in [(1, 256), (2, 24), (3, 8)] {
            let s = GridSpec::centered(d, n, 0.1).unwrap();
            let f = random_compact(s, 11 + d as u64);
            let op = RieszOperator::new(s, 0.5 * d as f64).unwrap();
            let a = op.apply(&f).unwrap();
            let b = op.apply_direct(&f).unwrap();
            let scale = b.max_abs();
            let dev = a.values.iter().zip(&b.values).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
            assert!(dev <= 1e-10 * scale, "d={d}: {dev}");
        }
    }

    #[test]
    fn translation_equivariance() {
        let s = GridSpec::centered(1, 128, 0.05).unwrap();
        let f = random_compact(s, 5);
        let mut shifted = Field::zeros(s);
        for k in 1..s.n {
            shifted.values[k] = f.values[k - 1];
        }
        let a = riesz_fft(&f, 0.3).unwrap();
        let b = riesz_fft(&shifted, 0.3).unwrap();
        let scale = a.max_abs();
        for k in 30..98 {
            assert!((b.values[k + 1] - a.values[k]).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn radial_route_matches_disk_closed_form() {
        // g = c on B_R, d = 2: R_alpha g(0) = c 2 pi R^alpha / alpha
        let (alpha, rr, c) = (1.0, 1.0, 2.0);
        let mut errs = Vec::new();
        for n in [64, 128] {
            let s = GridSpec::centered_box(2, n, 2.0).unwrap();
            let g = Field::from_fn(s, |x| if x[0] * x[0] + x[1] * x[1] < rr * rr { c } else { 0.0 });
            let v = riesz_at_point_radial(&g, alpha, &[0.0; 3]).unwrap();
            let exact = c * 2.0 * PI * rr.powf(alpha) / alpha;
            errs.push((v - exact).abs() / exact);
        }
        assert!(errs[0] < 0.03, "{errs:?}");
        assert!(errs[1] < errs[0]);
    }

    #[test]
    fn radial_route_agrees_with_direct_on_smooth_data() {
        let s = GridSpec::centered_box(2, 64, 3.0).unwrap();
        let g = Field::from_fn(s, |x| (-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp());
        let x = [0.1875, -0.375, 0.0];
        let idx = s.exact_index(&x).unwrap();
        let radial = riesz_at_point_radial(&g, 0.8, &x).unwrap();
        let direct = riesz_direct(&g, 0.8).unwrap().at(&idx);
        assert_relative_eq!(radial, direct, max_relative = 0.03);
        assert!(riesz_at_point_radial(&g, 0.8, &[10.0, 0.0, 0.0]).is_err());
        assert_eq!(riesz_at_point_radial(&Field::zeros(s), 0.8, &x).unwrap(), 0.0);
    }

    #[test]
    fn adjoint_defect_small() {
        let s = GridSpec::centered(1, 256, 0.05).unwrap();
        let f = random_compact(s, 1);
        let g = random_compact(s, 2);
        assert_eq!(adjoint_defect(&f, &f, 0.5).unwrap(), 0.0);
        assert!(adjoint_defect(&f, &g, 0.5).unwrap() <= 1e-12);
        let s2 = GridSpec::centered(2, 64, 0.05).unwrap();
        let f2 = random_compact(s2, 3);
        let g2 = random_compact(s2, 4);
        assert!(adjoint_defect(&f2, &g2, 1.2).unwrap() <= 1e-10);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
        #[test]
        fn positive_and_linear(seed in 0u64..10_000, a in -3.0f64..3.0, b in -3.0f64..3.0) {
            let s = GridSpec::centered(1, 64, 0.1).unwrap();
            let op = RieszOperator::new(s, 0.35).unwrap();
            let f = random_compact(s, seed);
            let g = random_compact(s, seed + 1);
            let rf = op.apply_direct(&f).unwrap();
            let rg = op.apply_direct(&g).unwrap();
            proptest::prop_assert!(rf.values.iter().all(|v| *v >= 0.0));
            let comb = f.zip_with(&g, |x, y| a * x + b * y).unwrap();
            let rc = op.apply_direct(&comb).unwrap();
            let scale = a.abs() * rf.max_abs() + b.abs() * rg.max_abs();
            for k in 0..s.len() {
                let want = a * rf.values[k] + b * rg.values[k];
                proptest::prop_assert!((rc.values[k] - want).abs() <= 1e-12 * scale.max(1e-300));
            }
        }
    }
}
