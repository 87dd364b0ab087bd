//! Exponent bookkeeping for the weighted Riesz-potential estimate.
//!
//! [`ExponentParams`] carries the dimension, the order `alpha` of the
//! potential, the integrability exponent `r` of the source, the Morrey
//! exponent `p` of the weight and the exponents derived from them.

use alloc::format;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Non-fatal conditions surfaced alongside a valid parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ParamWarnings {
    /// `p > d`; the hypothesis `p <= d` cannot hold, e.g. in dimension one.
    pub p_exceeds_d: bool,
    /// `p * alpha >= d`; on the whole space the Morrey condition then forces
    /// `b = 0`, so on a bounded box the largest balls dominate the constant.
    pub p_alpha_at_least_d: bool,
}

impl ParamWarnings {
    pub fn any(&self) -> bool {
        self.p_exceeds_d || self.p_alpha_at_least_d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentParams {
    pub d: usize,
    pub alpha: f64,
    pub r: f64,
    pub p: f64,
    /// Exponent of the pointwise potential bound, `1 < q <= p`.
    pub q: f64,
    pub gamma: f64,
    /// Hölder conjugate `r / (r - 1)`.
    pub r_conj: f64,
    pub p0: f64,
    pub p1: f64,
    pub warnings: ParamWarnings,
}

/// Validates `(d, alpha, r, p)` and fills in the derived exponents.
///
/// `q` defaults to `r`; use [`ExponentParams::with_q`] to change it.
pub fn validate_params(d: usize, alpha: f64, r: f64, p: f64) -> Result<ExponentParams> {
    if !(1..=3).contains(&d) {
        return Err(Error::UnsupportedDimension(d));
    }
    for (name, v) in [("alpha", alpha), ("r", r), ("p", p)] {
        if !v.is_finite() {
            return Err(Error::param(name, "must be finite"));
        }
    }
    let df = d as f64;
    if alpha <= 0.0 {
        return Err(Error::param("alpha", format!("alpha = {alpha} must be positive")));
    }
    if alpha >= df {
        return Err(Error::param("alpha", format!("alpha = {alpha} must be below d = {d}")));
    }
    if r <= 1.0 {
        return Err(Error::param("r", format!("r = {r} must exceed 1")));
    }
    if p <= r {
        return Err(Error::param("p", format!("p = {p} must exceed r = {r}")));
    }
    if alpha > r {
        return Err(Error::param("alpha", format!("alpha = {alpha} must not exceed r = {r}")));
    }

    let r_conj = r / (r - 1.0);
    let p0 = 0.5 * (r + p);
    let p1 = 0.5 * (r + p0);
    Ok(ExponentParams {
        d,
        alpha,
        r,
        p,
        q: r,
        gamma: choose_gamma(r, p),
        r_conj,
        p0,
        p1,
        warnings: ParamWarnings { p_exceeds_d: p > df, p_alpha_at_least_d: p * alpha >= df },
    })
}

impl ExponentParams {
    pub fn with_q(mut self, q: f64) -> Result<Self> {
        if !q.is_finite() || q <= 1.0 || q > self.p {
            return Err(Error::param("q", format!("q = {q} must satisfy 1 < q <= p = {}", self.p)));
        }
        self.q = q;
        Ok(self)
    }

    /// Largest weight exponent `beta` for which the truncated power weight
    /// `|x|^-beta` has a finite, grid-stable Morrey constant: `beta < alpha`
    /// keeps small balls bounded and `p * beta < d` keeps `b^p` integrable.
    pub fn power_weight_cap(&self) -> f64 {
        self.alpha.min(self.d as f64 / self.p)
    }
}

/// Largest `gamma` with `(1 + gamma) r <= p`, `1 + gamma r' <= p` and
/// `r >= 1 + gamma`. Positive whenever `1 < r < p`.
pub fn choose_gamma(r: f64, p: f64) -> f64 {
    let r_conj = r / (r - 1.0);
    let a = (p - r) / r;
    let b = (p - 1.0) / r_conj;
    let c = r - 1.0;
    a.min(b).min(c)
}
