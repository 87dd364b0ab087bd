//! Radix-2 complex FFT and separable multi-dimensional transforms.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
use num_traits::Float;

/// Precomputed twiddles and bit reversal for one power-of-two length.
#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    twiddles: Vec<Complex64>,
    rev: Vec<usize>,
}

impl Fft {
    pub fn new(n: usize) -> Self {
        assert!(n.is_power_of_two(), "FFT length {n} is not a power of two");
        let bits = n.trailing_zeros();
        let rev = (0..n).map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) }).collect();
        let twiddles = (0..n / 2)
            .map(|k| {
                let t = -2.0 * PI * k as f64 / n as f64;
                Complex64::new(t.cos(), t.sin())
            })
            .collect();
        Fft { n, twiddles, rev }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Unnormalized forward transform, `X_k = sum x_j e^{-2 pi i jk/n}`.
    pub fn forward(&self, buf: &mut [Complex64]) {
        self.run(buf, false);
    }

    /// Inverse transform including the `1/n` factor.
    pub fn inverse(&self, buf: &mut [Complex64]) {
        self.run(buf, true);
        let s = 1.0 / self.n as f64;
        for v in buf.iter_mut() {
            *v *= s;
        }
    }

    fn run(&self, buf: &mut [Complex64], inverse: bool) {
        let n = self.n;
        debug_assert_eq!(buf.len(), n);
        for i in 0..n {
            let j = self.rev[i];
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let step = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let mut w = self.twiddles[k * step];
                    if inverse {
                        w = w.conj();
                    }
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            len <<= 1;
        }
    }
}

/// In-place transform of a row-major array with `d` axes of length `m`.
pub fn fft_nd(plan: &Fft, data: &mut [Complex64], d: usize, inverse: bool) {
    let m = plan.len();
    debug_assert_eq!(data.len(), m.pow(d as u32));
    let mut line = vec![Complex64::new(0.0, 0.0); m];
    for axis in 0..d {
        let stride = m.pow((d - 1 - axis) as u32);
        let outer = data.len() / (m * stride);
        for o in 0..outer {
            for inner in 0..stride {
                let base = o * m * stride + inner;
                for (j, v) in line.iter_mut().enumerate() {
                    *v = data[base + j * stride];
                }
                if inverse {
                    plan.inverse(&mut line);
                } else {
                    plan.forward(&mut line);
                }
                for (j, v) in line.iter().enumerate() {
                    data[base + j * stride] = *v;
                }
            }
        }
    }
}

/// Signed integer frequency of bin `k` for length `m` (Nyquist bin negative).
#[inline]
pub fn freq_index(k: usize, m: usize) -> i64 {
    if k < m / 2 {
        k as i64
    } else {
        k as i64 - m as i64
    }
}
