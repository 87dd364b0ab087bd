//! Ratio reports and the verdict rules applied to them.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::morrey::MorreyConvention;
use crate::params::ExponentParams;

/// Largest tolerated relative change of the sup ratio between two levels.
pub const DRIFT_TOLERANCE: f64 = 0.15;
/// A refinement that multiplies the sup ratio by more than this is growth.
pub const GROWTH_LIMIT: f64 = 2.0;
/// Largest tolerated max/min spread of a swept ratio curve.
pub const FLATNESS_TOLERANCE: f64 = 3.0;
/// Tolerance of the ratio invariance under scalar rescaling.
pub const HOMOGENEITY_TOLERANCE: f64 = 1e-10;
/// Tolerance of exact discrete identities such as the adjoint pairing.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;
/// Pointwise denominators at or below this are excluded from the sup.
pub const DENOMINATOR_FLOOR: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Warn,
    Violation,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Warn => "WARN",
            Verdict::Violation => "VIOLATION",
        }
    }
}

/// One evaluation of both sides of an inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub descriptor: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl Case {
    /// `lhs / rhs`, with `0 / 0 = 0` and `x / 0 = inf` for `x > 0`.
    pub fn new(descriptor: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        Case { descriptor: descriptor.into(), lhs, rhs, ratio }
    }

    pub fn is_violation(&self) -> bool {
        !(self.lhs.is_finite() && self.rhs.is_finite() && self.ratio.is_finite())
            || self.lhs < 0.0
            || self.rhs < 0.0
            || (self.lhs > 0.0 && self.rhs == 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinementPoint {
    pub h: f64,
    pub n: usize,
    pub sup_ratio: f64,
}

/// A sample of a ratio curve against a swept parameter, for plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub case: String,
    pub x_name: String,
    pub x: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conventions {
    pub morrey: MorreyConvention,
    pub maximal: String,
    pub balls: String,
    pub ladder: String,
}

impl Conventions {
    pub fn new(morrey: MorreyConvention) -> Self {
        Conventions {
            morrey,
            maximal: "centered".into(),
            balls: "open, cell centers strictly inside".into(),
            ladder: "h..8h merged with h*1.25^k up to the grid diameter".into(),
        }
    }
}

/// Both sides of one inequality over a probe family at every refinement
/// level. `cases` holds the finest level; `refinement` the sup per level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub name: String,
    pub family: String,
    pub params: ExponentParams,
    pub cases: Vec<Case>,
    pub sup_ratio: f64,
    pub refinement: Vec<RefinementPoint>,
    pub conventions: Conventions,
    /// Points left out of pointwise sups by the denominator floor.
    pub excluded: usize,
    /// Largest relative ratio change under the scalar rescalings probed.
    pub homogeneity_defect: f64,
    /// Max/min of the swept curve where flatness is asserted.
    pub spread: Option<f64>,
    /// Hard upper bound on every ratio, for inequalities with constant one.
    pub ratio_bound: Option<f64>,
    /// Relative defect of an exact identity the check relies on.
    pub identity_defect: Option<f64>,
    pub drift_tolerance: f64,
    pub diagnostics: BTreeMap<String, f64>,
    pub curves: Vec<CurvePoint>,
    pub commentary: Vec<String>,
    pub verdict: Verdict,
}

impl RatioReport {
    pub fn new(name: &str, family: &str, params: ExponentParams, conventions: Conventions) -> Self {
        RatioReport {
            name: name.into(),
            family: family.into(),
            params,
            cases: Vec::new(),
            sup_ratio: 0.0,
            refinement: Vec::new(),
            conventions,
            excluded: 0,
            homogeneity_defect: 0.0,
            spread: None,
            ratio_bound: None,
            identity_defect: None,
            drift_tolerance: DRIFT_TOLERANCE,
            diagnostics: BTreeMap::new(),
            curves: Vec::new(),
            commentary: Vec::new(),
            verdict: Verdict::Pass,
        }
    }

    /// Sup of the case ratios, NaN propagating as infinity.
    pub fn case_sup(cases: &[Case]) -> f64 {
        cases.iter().fold(0.0, |m, c| if c.ratio.is_nan() { f64::INFINITY } else { m.max(c.ratio) })
    }

    /// Relative change of the sup ratio between consecutive levels.
    pub fn drifts(&self) -> Vec<f64> {
        self.refinement
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0].sup_ratio, w[1].sup_ratio);
                if a == 0.0 && b == 0.0 {
                    0.0
                } else if a == 0.0 {
                    f64::INFINITY
                } else {
                    (b / a - 1.0).abs()
                }
            })
            .collect()
    }

    /// Verdict from the stored data alone.
    pub fn assess(&self) -> Verdict {
        let grows = self.refinement.windows(2).any(|w| w[1].sup_ratio > GROWTH_LIMIT * w[0].sup_ratio);
        let bad_level = self.refinement.iter().any(|r| !r.sup_ratio.is_finite());
        let above_bound = self.ratio_bound.is_some_and(|b| self.sup_ratio > b);
        let broken_identity = self.identity_defect.is_some_and(|d| !(d <= IDENTITY_TOLERANCE));
        if self.cases.iter().any(Case::is_violation)
            || !self.sup_ratio.is_finite()
            || bad_level
            || grows
            || above_bound
            || broken_identity
        {
            return Verdict::Violation;
        }
        let drifting = self.drifts().iter().any(|d| *d > self.drift_tolerance);
        let bumpy = self.spread.is_some_and(|s| !(s <= FLATNESS_TOLERANCE));
        if drifting || bumpy || !(self.homogeneity_defect <= HOMOGENEITY_TOLERANCE) {
            return Verdict::Warn;
        }
        Verdict::Pass
    }

    pub fn finalize(mut self) -> Self {
        self.verdict = self.assess();
        self
    }
}

/// Relative change `|after - before| / |before|`, zero when both vanish.
pub fn relative_change(before: f64, after: f64) -> f64 {
    if before == after {
        0.0
    } else {
        (after - before).abs() / before.abs().max(f64::MIN_POSITIVE)
    }
}
