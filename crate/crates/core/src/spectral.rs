//! Fourier multipliers on a zero-padded periodic box: `(-Delta)^(alpha/2)`,
//! the gradient, and the constant linking the bare Riesz kernel to them.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
use num_traits::Float;

use crate::fft::{fft_nd, freq_index, Fft};
use crate::grid::{Field, GridSpec, Index, MAX_DIM};
use crate::{Error, Result};

/// Relative size allowed in the boundary band of a padded input.
pub const BAND_TOLERANCE: f64 = 1e-12;

/// Transform plan for fields on `spec`, embedded in a periodic box of
/// `padded` points per axis.
#[derive(Debug, Clone)]
pub struct SpectralBox {
    pub spec: GridSpec,
    pub pad_factor: usize,
    pub padded: usize,
    plan: Fft,
}

impl SpectralBox {
    /// `pad_factor = 1` treats the grid itself as the period and needs `n` to
    /// be a power of two; larger factors pad with zeros to the next power of
    /// two at least `pad_factor * n`.
    pub fn new(spec: GridSpec, pad_factor: usize) -> Result<Self> {
        if pad_factor == 0 {
            return Err(Error::param("pad_factor", "must be at least 1"));
        }
        if pad_factor == 1 && !spec.n.is_power_of_two() {
            return Err(Error::InvalidGrid(alloc::format!("periodic mode needs a power-of-two n, got {}", spec.n)));
        }
        let padded = (pad_factor * spec.n).next_power_of_two();
        Ok(SpectralBox { spec, pad_factor, padded, plan: Fft::new(padded) })
    }

    pub fn is_periodic(&self) -> bool {
        self.pad_factor == 1
    }

    /// Angular frequency of bin `k`.
    #[inline]
    fn xi(&self, k: usize) -> f64 {
        2.0 * PI * freq_index(k, self.padded) as f64 / (self.padded as f64 * self.spec.h)
    }

    fn check(&self, u: &Field) -> Result<()> {
        if !self.spec.same_grid(&u.spec) {
            return Err(Error::GridMismatch);
        }
        if self.is_periodic() {
            return Ok(());
        }
        let s = &self.spec;
        let band = s.n / 8;
        let field_max = u.max_abs();
        let mut band_max = 0.0f64;
        for (k, v) in u.values.iter().enumerate() {
            let idx = s.unflat(k);
            if (0..s.d).any(|a| idx[a] < band || idx[a] >= s.n - band) {
                band_max = band_max.max(v.abs());
            }
        }
        if band_max > BAND_TOLERANCE * field_max {
            return Err(Error::InsufficientPadding { band_max, field_max });
        }
        Ok(())
    }

    fn forward(&self, u: &Field) -> Vec<Complex64> {
        let (d, m) = (self.spec.d, self.padded);
        let mut buf = vec![Complex64::new(0.0, 0.0); m.pow(d as u32)];
        for (k, v) in u.values.iter().enumerate() {
            buf[flat(&self.spec.unflat(k), d, m)] = Complex64::new(*v, 0.0);
        }
        fft_nd(&self.plan, &mut buf, d, false);
        buf
    }

    fn crop(&self, mut buf: Vec<Complex64>) -> Field {
        let (d, m) = (self.spec.d, self.padded);
        fft_nd(&self.plan, &mut buf, d, true);
        let values = (0..self.spec.len()).map(|k| buf[flat(&self.spec.unflat(k), d, m)].re).collect();
        Field { spec: self.spec, values }
    }

    /// Applies the real even multiplier `symbol(xi)` to every bin.
    fn multiply(&self, buf: &mut [Complex64], mut symbol: impl FnMut(&[f64; MAX_DIM]) -> Complex64) {
        let (d, m) = (self.spec.d, self.padded);
        let mut xi = [0.0; MAX_DIM];
        for (k, b) in buf.iter_mut().enumerate() {
            let mut rest = k;
            for a in (0..d).rev() {
                xi[a] = self.xi(rest % m);
                rest /= m;
            }
            *b *= symbol(&xi);
        }
    }

    /// `(-Delta)^(alpha/2) u`, symbol `|xi|^alpha`.
    pub fn frac_laplacian(&self, u: &Field, alpha: f64) -> Result<Field> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::param("alpha", alloc::format!("order {alpha} must be positive")));
        }
        self.check(u)?;
        if u.is_zero() {
            return Ok(Field::zeros(self.spec));
        }
        let d = self.spec.d;
        let mut buf = self.forward(u);
        self.multiply(&mut buf, |xi| {
            let r2: f64 = xi[..d].iter().map(|v| v * v).sum();
            Complex64::new(r2.powf(0.5 * alpha), 0.0)
        });
        Ok(self.crop(buf))
    }

    /// Spectral partial derivatives; the Nyquist bin of each axis is dropped
    /// so that real input gives real output.
    pub fn gradient(&self, u: &Field) -> Result<Vec<Field>> {
        self.check(u)?;
        let (d, m) = (self.spec.d, self.padded);
        let hat = self.forward(u);
        let mut out = Vec::with_capacity(d);
        for axis in 0..d {
            let mut buf = hat.clone();
            let stride = m.pow((d - 1 - axis) as u32);
            for (k, b) in buf.iter_mut().enumerate() {
                let bin = (k / stride) % m;
                *b *= if bin == m / 2 { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, self.xi(bin)) };
            }
            out.push(self.crop(buf));
        }
        Ok(out)
    }

    /// `(h^d / M sum |xi|^(2 alpha) |u_hat|^2)^(1/2)` over the `M` padded bins,
    /// the `L_2` norm of `(-Delta)^(alpha/2) u` on the whole periodic box.
    pub fn multiplier_norm(&self, u: &Field, alpha: f64) -> Result<f64> {
        self.check(u)?;
        let d = self.spec.d;
        let mut buf = self.forward(u);
        self.multiply(&mut buf, |xi| {
            let r2: f64 = xi[..d].iter().map(|v| v * v).sum();
            Complex64::new(r2.powf(0.5 * alpha), 0.0)
        });
        let total = buf.len() as f64;
        let energy: f64 = buf.iter().map(|c| c.norm_sqr()).sum();
        Ok((self.spec.cell_volume() * energy / total).sqrt())
    }
}

#[inline]
fn flat(idx: &Index, d: usize, m: usize) -> usize {
    idx[..d].iter().fold(0, |acc, &i| acc * m + i)
}

/// `(-Delta)^(alpha/2) u` with the default padding factor 2.
pub fn frac_laplacian(u: &Field, alpha: f64) -> Result<Field> {
    SpectralBox::new(u.spec, 2)?.frac_laplacian(u, alpha)
}

/// Spectral gradient with the default padding factor 2.
pub fn gradient(u: &Field) -> Result<Vec<Field>> {
    SpectralBox::new(u.spec, 2)?.gradient(u)
}

/// Pointwise Euclidean norm of a gradient.
pub fn gradient_norm(components: &[Field]) -> Result<Field> {
    let first = components.first().ok_or(Error::param("gradient", "no components"))?;
    let mut acc = first.map(|v| v * v);
    for c in &components[1..] {
        acc = acc.zip_with(c, |a, b| a + b * b)?;
    }
    Ok(acc.map(f64::sqrt))
}

/// `Gamma((d - alpha)/2) / (2^alpha pi^(d/2) Gamma(alpha/2))`, the constant
/// with `c R_alpha (-Delta)^(alpha/2) u = u` for the bare kernel.
pub fn riesz_inversion_constant(d: usize, alpha: f64) -> Result<f64> {
    if !(1..=MAX_DIM).contains(&d) {
        return Err(Error::UnsupportedDimension(d));
    }
    crate::riesz::check_alpha(alpha, d)?;
    let df = d as f64;
    Ok(libm::tgamma(0.5 * (df - alpha)) / (2f64.powf(alpha) * PI.powf(0.5 * df) * libm::tgamma(0.5 * alpha)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::lp_norm;
    use crate::riesz::riesz_fft;
    use approx::assert_relative_eq;

    fn gaussian(spec: GridSpec, sigma: f64) -> Field {
        Field::from_fn(spec, |x| {
            let r2: f64 = x[..spec.d].iter().map(|v| v * v).sum();
            (-r2 / (2.0 * sigma * sigma)).exp()
        })
    }

    fn max_diff(a: &Field, b: &Field) -> f64 {
        a.values.iter().zip(&b.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn zero_and_constants() {
        let s = GridSpec::centered_box(1, 64, 4.0).unwrap();
        assert!(frac_laplacian(&Field::zeros(s), 0.7).unwrap().is_zero());
        let periodic = SpectralBox::new(s, 1).unwrap();
        for g in periodic.gradient(&Field::constant(s, 3.0)).unwrap() {
            assert!(g.max_abs() < 1e-12);
        }
        assert!(SpectralBox::new(GridSpec::centered(1, 48, 0.1).unwrap(), 1).is_err());
        assert_relative_eq!(riesz_inversion_constant(1, 0.5).unwrap(), 1.0 / (2.0 * PI).sqrt(), max_relative = 1e-14);
        assert_relative_eq!(riesz_inversion_constant(2, 1.0).unwrap(), 1.0 / (2.0 * PI), max_relative = 1e-14);
        // the d = 3, alpha = 2 Newtonian constant 1 / (4 pi)
        assert_relative_eq!(riesz_inversion_constant(3, 2.0).unwrap(), 0.25 / PI, max_relative = 1e-14);
    }

    #[test]
    fn sine_is_an_eigenfunction() {
        let n = 128;
        let s = GridSpec::new(1, n, 2.0 * PI / n as f64, [0.0; MAX_DIM]).unwrap();
        let periodic = SpectralBox::new(s, 1).unwrap();
        for k in [1.0, 3.0, 10.0] {
            let u = Field::from_fn(s, |x| (k * x[0]).sin());
            for alpha in [0.5, 1.0, 1.7] {
                let got = periodic.frac_laplacian(&u, alpha).unwrap();
                let want = u.scaled(k.powf(alpha));
                assert!(max_diff(&got, &want) < 1e-10);
            }
            let du = periodic.gradient(&u).unwrap();
            let want = Field::from_fn(s, |x| k * (k * x[0]).cos());
            assert!(max_diff(&du[0], &want) < 1e-10);
        }
    }

    #[test]
    fn sine_eigenfunction_2d() {
        let n = 32;
        let s = GridSpec::new(2, n, 2.0 * PI / n as f64, [0.0; MAX_DIM]).unwrap();
        let periodic = SpectralBox::new(s, 1).unwrap();
        let u = Field::from_fn(s, |x| (2.0 * x[0]).sin() * (3.0 * x[1]).cos());
        let got = periodic.frac_laplacian(&u, 1.0).unwrap();
        assert!(max_diff(&got, &u.scaled(13f64.sqrt())) < 1e-10);
        let g = periodic.gradient(&u).unwrap();
        let dy = Field::from_fn(s, |x| -3.0 * (2.0 * x[0]).sin() * (3.0 * x[1]).sin());
        assert!(max_diff(&g[1], &dy) < 1e-10);
    }

    #[test]
    fn rejects_support_in_the_band() {
        let s = GridSpec::centered_box(1, 64, 4.0).unwrap();
        let u = Field::from_fn(s, |x| (-(x[0] - 3.5).powi(2)).exp());
        assert!(matches!(frac_laplacian(&u, 1.0), Err(Error::InsufficientPadding { .. })));
        assert!(gradient(&u).is_err());
    }

    #[test]
    fn alpha_two_matches_second_differences() {
        // max |(-Delta)u + D2_h u| = O(h^2)
        let err = |n: usize| {
            let s = GridSpec::centered_box(1, n, 8.0).unwrap();
            let u = gaussian(s, 0.7);
            let lap = frac_laplacian(&u, 2.0).unwrap();
            let h = s.h;
            (1..n - 1)
                .map(|i| {
                    let d2 = (u.values[i + 1] - 2.0 * u.values[i] + u.values[i - 1]) / (h * h);
                    (lap.values[i] + d2).abs()
                })
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(128), err(256));
        let order = (e1 / e2).log2();
        assert!(order >= 1.9, "observed order {order}");
    }

    #[test]
    fn gradient_matches_central_differences() {
        let err = |n: usize| {
            let s = GridSpec::centered_box(2, n, 6.0).unwrap();
            let u = gaussian(s, 0.6);
            let g = gradient(&u).unwrap();
            let h = s.h;
            let mut e = 0.0f64;
            for i in 1..n - 1 {
                for j in 1..n - 1 {
                    let at = |a: usize, b: usize| u.values[a * n + b];
                    let dx = (at(i + 1, j) - at(i - 1, j)) / (2.0 * h);
                    let dy = (at(i, j + 1) - at(i, j - 1)) / (2.0 * h);
                    e = e.max((g[0].values[i * n + j] - dx).abs()).max((g[1].values[i * n + j] - dy).abs());
                }
            }
            e
        };
        let (e1, e2) = (err(48), err(96));
        assert!(e2 < 0.02 && (e1 / e2).log2() >= 1.8, "{e1} {e2}");
    }

    #[test]
    fn round_trip_recovers_gaussian() {
        let s = GridSpec::centered_box(1, 256, 4.0).unwrap();
        let u = gaussian(s, 0.25);
        let alpha = 0.5;
        let f = frac_laplacian(&u, alpha).unwrap();
        let back = riesz_fft(&f, alpha).unwrap().scaled(riesz_inversion_constant(1, alpha).unwrap());
        let rel = max_diff(&back, &u) / u.max_abs();
        assert!(rel <= 0.01, "round trip error {rel}");
    }

    #[test]
    fn parseval_in_periodic_mode() {
        let n = 64;
        let s = GridSpec::new(1, n, 2.0 * PI / n as f64, [0.0; MAX_DIM]).unwrap();
        let periodic = SpectralBox::new(s, 1).unwrap();
        let u = Field::from_fn(s, |x| (x[0].sin() + 0.3 * (4.0 * x[0]).cos()).exp());
        for alpha in [0.3, 1.0, 1.5] {
            let f = periodic.frac_laplacian(&u, alpha).unwrap();
            let direct = lp_norm(&f, 2.0).unwrap();
            assert_relative_eq!(direct, periodic.multiplier_norm(&u, alpha).unwrap(), max_relative = 1e-10);
        }
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(12))]
        #[test]
        fn linear_and_translation_equivariant(a in -3.0f64..3.0, shift in 1usize..8, alpha in 0.2f64..1.8) {
            let s = GridSpec::centered_box(1, 128, 8.0).unwrap();
            let u = gaussian(s, 0.5);
            let v = Field::from_fn(s, |x| x[0] * (-x[0] * x[0]).exp());
            let lhs = frac_laplacian(&u.zip_with(&v, |p, q| p + a * q).unwrap(), alpha).unwrap();
            let rhs = frac_laplacian(&u, alpha).unwrap().zip_with(&frac_laplacian(&v, alpha).unwrap(), |p, q| p + a * q).unwrap();
            proptest::prop_assert!(max_diff(&lhs, &rhs) < 1e-10);
            let shifted = Field::from_fn(s, |x| (-(x[0] - shift as f64 * s.h).powi(2) / 0.5).exp());
            let fs = frac_laplacian(&shifted, alpha).unwrap();
            let f0 = frac_laplacian(&gaussian(s, 0.5), alpha).unwrap();
            for i in 40..88 {
                proptest::prop_assert!((fs.values[i + shift] - f0.values[i]).abs() < 1e-10);
            }
        }
    }
}
