//! Gauss–Legendre rules and the singular cube integral used for central cells.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(m: usize) -> Self {
        assert!(m >= 1);
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        for i in 0..(m + 1) / 2 {
            // Chebyshev-like initial guess, then Newton on P_m
            let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(m, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(m, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[m - 1 - i] = x;
            weights[i] = w;
            weights[m - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integral of `f` over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let c = 0.5 * (a + b);
        let r = 0.5 * (b - a);
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(c + r * x)).sum::<f64>() * r
    }
}

/// `(P_m(x), P_m'(x))` by the three-term recurrence.
fn legendre(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    let dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// `int over [-1/2, 1/2]^d of |y|^(a - d) dy` for `a > 0`.
///
/// Splitting the cube into `2d` pyramids with apex at the origin, the radial
/// factor integrates in closed form and leaves a smooth integral over one
/// face: `(d / a) int over [-1/2, 1/2]^(d-1) of (1/4 + |z|^2)^((a - d) / 2) dz`.
pub fn unit_cube_power_integral(a: f64, d: usize) -> f64 {
    let e = 0.5 * (a - d as f64);
    let face = match d {
        1 => 0.25f64.powf(e),
        2 => {
            let gl = GaussLegendre::new(24);
            panels(&gl, 4, |z| (0.25 + z * z).powf(e))
        }
        _ => {
            let gl = GaussLegendre::new(24);
            panels(&gl, 4, |z1| panels(&gl, 4, |z2| (0.25 + z1 * z1 + z2 * z2).powf(e)))
        }
    };
    d as f64 / a * face
}

/// Composite rule on `[-1/2, 1/2]` with `k` equal panels.
fn panels(gl: &GaussLegendre, k: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
    let w = 1.0 / k as f64;
    (0..k)
        .map(|i| {
            let a = -0.5 + i as f64 * w;
            gl.integrate(a, a + w, &mut f)
        })
        .sum()
}
