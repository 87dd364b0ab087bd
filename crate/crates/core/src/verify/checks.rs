//! The individual inequality checks.
//!
//! A [`Level`] holds everything shared by the checks at one resolution: the
//! potential operator, the radius ladder, and the probe weights and sources
//! with their Morrey constants and potentials precomputed. Each check turns
//! a slice of levels (coarse to fine) into one [`RatioReport`] per weight
//! class.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::families::{FamilyConfig, NamedSource, NamedWeight, WeightClass};
use super::report::{relative_change, Case, Conventions, CurvePoint, RatioReport, RefinementPoint, DENOMINATOR_FLOOR};
use crate::grid::{Field, GridSpec};
use crate::maximal::{a1_constant_with, a1_lift_with, maximal_with, RadiusLadder};
use crate::morrey::{indicator_weight, morrey_constant_with, MorreyConvention};
use crate::params::{choose_gamma, ExponentParams};
use crate::riesz::RieszOperator;
use crate::spectral::{gradient_norm, riesz_inversion_constant, SpectralBox};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckName {
    Theorem1,
    Lemma4,
    Lemma5,
    InnerBound,
    Duality,
    A1Lift,
    FeffermanStein,
    Corollary2,
    HolderSplit,
}

impl CheckName {
    pub const ALL: [CheckName; 9] = [
        CheckName::Theorem1,
        CheckName::Lemma4,
        CheckName::Lemma5,
        CheckName::InnerBound,
        CheckName::Duality,
        CheckName::A1Lift,
        CheckName::FeffermanStein,
        CheckName::Corollary2,
        CheckName::HolderSplit,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckName::Theorem1 => "theorem1",
            CheckName::Lemma4 => "lemma4",
            CheckName::Lemma5 => "lemma5",
            CheckName::InnerBound => "inner_bound",
            CheckName::Duality => "duality",
            CheckName::A1Lift => "a1_lift",
            CheckName::FeffermanStein => "fefferman_stein",
            CheckName::Corollary2 => "corollary2",
            CheckName::HolderSplit => "holder_split",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        // separators are optional: `inner-bound`, `inner_bound` and `innerbound` all match
        let squash = |s: &str| s.chars().filter(|c| *c != '-' && *c != '_').collect::<String>();
        let key = squash(&name.trim().to_ascii_lowercase());
        CheckName::ALL.into_iter().find(|c| squash(c.as_str()) == key).ok_or_else(|| Error::UnknownCheck(name.into()))
    }
}

impl core::fmt::Display for CheckName {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone)]
pub struct WeightProbe {
    pub class: WeightClass,
    pub name: String,
    pub b: Field,
    /// Morrey constant of `b` for `(p, alpha)`.
    pub a: f64,
}

#[derive(Debug, Clone)]
pub struct SourceProbe {
    pub name: String,
    pub f: Field,
    /// `R_alpha f`.
    pub v: Field,
}

/// Shared state of all checks at one resolution.
#[derive(Debug, Clone)]
pub struct Level {
    pub params: ExponentParams,
    pub convention: MorreyConvention,
    pub spec: GridSpec,
    pub op: RieszOperator,
    pub ladder: RadiusLadder,
    pub weights: Vec<WeightProbe>,
    pub sources: Vec<SourceProbe>,
}

impl Level {
    pub fn new(
        params: ExponentParams,
        convention: MorreyConvention,
        spec: GridSpec,
        weights: Vec<NamedWeight>,
        sources: Vec<NamedSource>,
    ) -> Result<Self> {
        if spec.d != params.d {
            return Err(Error::UnsupportedDimension(spec.d));
        }
        let op = RieszOperator::new(spec, params.alpha)?;
        let ladder = RadiusLadder::default_for(&spec);
        let weights = weights
            .into_iter()
            .map(|w| {
                if !w.b.spec.same_grid(&spec) {
                    return Err(Error::GridMismatch);
                }
                let a = morrey_constant_with(&w.b, params.p, params.alpha, convention, &ladder)?.a;
                Ok(WeightProbe { class: w.class, name: w.name, b: w.b, a })
            })
            .collect::<Result<Vec<_>>>()?;
        let sources = sources
            .into_iter()
            .map(|s| {
                let v = op.apply(&s.f)?;
                Ok(SourceProbe { name: s.name, f: s.f, v })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Level { params, convention, spec, op, ladder, weights, sources })
    }

    /// The canonical families sampled on `spec`.
    pub fn from_families(
        params: ExponentParams,
        convention: MorreyConvention,
        spec: GridSpec,
        families: &FamilyConfig,
    ) -> Result<Self> {
        let weights = families.weights(&params, &spec)?;
        Self::new(params, convention, spec, weights, families.sources(&spec))
    }

    pub fn class(&self, class: WeightClass) -> impl Iterator<Item = &WeightProbe> {
        self.weights.iter().filter(move |w| w.class == class)
    }

    pub fn classes(&self) -> Vec<WeightClass> {
        WeightClass::ALL.into_iter().filter(|c| self.class(*c).next().is_some()).collect()
    }

    /// Weight/source pairs for the pair checks: each weight meets every
    /// Gaussian and one seeded bump, cycling through the bumps.
    fn pairs(&self, class: WeightClass) -> Vec<(&WeightProbe, &SourceProbe)> {
        let (gauss, bumps): (Vec<&SourceProbe>, Vec<&SourceProbe>) =
            self.sources.iter().partition(|s| s.name.starts_with("gauss"));
        let mut out = Vec::new();
        for (j, w) in self.class(class).enumerate() {
            for s in &gauss {
                out.push((w, *s));
            }
            if !bumps.is_empty() {
                out.push((w, bumps[j % bumps.len()]));
            }
        }
        out
    }

    fn integral(&self, values: impl Iterator<Item = f64>) -> f64 {
        values.sum::<f64>() * self.spec.cell_volume()
    }

    fn morrey(&self, b: &Field) -> Result<f64> {
        Ok(morrey_constant_with(b, self.params.p, self.params.alpha, self.convention, &self.ladder)?.a)
    }
}

/// Sweep of ball radii for the indicator check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RhoSweep {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    /// Radii below this many coarse cells are dropped from the sweep.
    pub min_cells: f64,
}

impl Default for RhoSweep {
    fn default() -> Self {
        RhoSweep { min: 0.125, max: 2.0, count: 9, min_cells: 4.0 }
    }
}

impl RhoSweep {
    /// Geometric radii in `[max(min, min_cells h), max]`.
    pub fn radii(&self, coarse_h: f64) -> Vec<f64> {
        let lo = self.min.max(self.min_cells * coarse_h);
        if !(lo < self.max) || self.count < 2 {
            return alloc::vec![self.max.max(lo)];
        }
        let ratio = (self.max / lo).powf(1.0 / (self.count - 1) as f64);
        (0..self.count).map(|k| lo * ratio.powi(k as i32)).collect()
    }
}

/// Per-level results of one check on one weight class.
#[derive(Debug, Clone, Default)]
struct Outcome {
    cases: Vec<Case>,
    excluded: usize,
    curves: Vec<CurvePoint>,
    spread: Option<f64>,
    homogeneity: f64,
    diagnostics: BTreeMap<String, f64>,
}

impl Outcome {
    fn diag_max(&mut self, key: &str, value: f64) {
        let e = self.diagnostics.entry(key.to_string()).or_insert(f64::NEG_INFINITY);
        *e = e.max(value);
    }

    fn diag_min(&mut self, key: &str, value: f64) {
        let e = self.diagnostics.entry(key.to_string()).or_insert(f64::INFINITY);
        *e = e.min(value);
    }
}

fn commentary(check: CheckName, class: WeightClass) -> Vec<String> {
    let mut out = Vec::new();
    match check {
        CheckName::Lemma4 => out.push(
            "conclusion only; the balancing radius satisfies rho^(-q alpha) = M(b^q) A^(-q), \
             not the quotient M(b^q) / A^(-q)"
                .into(),
        ),
        CheckName::InnerBound if class.may_vanish() => out.push(
            "evaluated on the A1 lift (M b^p0)^(1/p0) with its own Morrey constant at p1 and gamma \
             chosen for (r, p1); the bound is pointwise in b and fails where a smooth b vanishes"
                .into(),
        ),
        CheckName::InnerBound => out.push("sup over the support of b".into()),
        CheckName::Lemma5 => out.push("rho sweep clipped below at four coarse cells".into()),
        CheckName::Corollary2 => out.push(
            "rhs uses (-Delta)^(alpha/2) u on the padded periodic box; the round-trip residual of \
             c(d, alpha) R_alpha f against u is recorded as a diagnostic"
                .into(),
        ),
        CheckName::HolderSplit => out.push("direct summation, coarsest level only".into()),
        _ => {}
    }
    out
}

/// Runs `check` on every weight class over `levels`, ordered coarse to fine.
pub fn run_check(check: CheckName, levels: &[Level], sweep: &RhoSweep) -> Result<Vec<RatioReport>> {
    let finest = levels.last().ok_or_else(|| Error::param("levels", "no refinement levels"))?;
    let levels = if check == CheckName::HolderSplit { &levels[..1] } else { levels };
    let rhos = sweep.radii(levels[0].spec.h);
    let mut reports = Vec::new();
    for class in finest.classes() {
        let mut report =
            RatioReport::new(check.as_str(), class.as_str(), finest.params, Conventions::new(finest.convention));
        report.commentary = commentary(check, class);
        let mut last = Outcome::default();
        for level in levels {
            let out = match check {
                CheckName::Theorem1 => theorem1(level, class)?,
                CheckName::Lemma4 => lemma4(level, class)?,
                CheckName::Lemma5 => lemma5(level, class, &rhos)?,
                CheckName::InnerBound => inner_bound(level, class)?,
                CheckName::Duality => duality(level, class)?,
                CheckName::A1Lift => a1_lift(level, class)?,
                CheckName::FeffermanStein => fefferman_stein(level, class)?,
                CheckName::Corollary2 => corollary2(level, class)?,
                CheckName::HolderSplit => holder_split(level, class)?,
            };
            report.refinement.push(RefinementPoint {
                h: level.spec.h,
                n: level.spec.n,
                sup_ratio: RatioReport::case_sup(&out.cases),
            });
            report.homogeneity_defect = report.homogeneity_defect.max(out.homogeneity);
            last = out;
        }
        if check == CheckName::HolderSplit {
            report.ratio_bound = Some(1.0 + 1e-12);
        }
        if check == CheckName::Duality {
            report.ratio_bound = Some(1.0 + 1e-12);
            report.identity_defect = last.diagnostics.get("pairing_defect").copied();
        }
        report.sup_ratio = RatioReport::case_sup(&last.cases);
        report.cases = last.cases;
        report.excluded = last.excluded;
        report.curves = last.curves;
        report.spread = last.spread;
        report.diagnostics = last.diagnostics;
        reports.push(report.finalize());
    }
    Ok(reports)
}

fn sum_pow(f: &Field, s: f64) -> f64 {
    f.values.iter().map(|v| v.abs().powf(s)).sum()
}

// ---------------------------------------------------------------- theorem1

fn theorem1_sides(level: &Level, b: &Field, a: f64, f: &Field, v: &Field) -> (f64, f64) {
    let r = level.params.r;
    let lhs = level.integral(b.values.iter().zip(&v.values).map(|(bv, vv)| (bv * vv.abs()).powf(r)));
    let rhs = a.powf(r) * level.integral(f.values.iter().map(|x| x.abs().powf(r)));
    (lhs, rhs)
}

fn theorem1(level: &Level, class: WeightClass) -> Result<Outcome> {
    let mut out = Outcome::default();
    for (i, (w, s)) in level.pairs(class).into_iter().enumerate() {
        let (lhs, rhs) = theorem1_sides(level, &w.b, w.a, &s.f, &s.v);
        let case = Case::new(format!("{} | {}", w.name, s.name), lhs, rhs);
        if i == 0 {
            let b3 = w.b.scaled(3.0);
            let f2 = s.f.scaled(2.0);
            let (l2, r2) = theorem1_sides(level, &b3, level.morrey(&b3)?, &f2, &level.op.apply(&f2)?);
            out.homogeneity = relative_change(case.ratio, Case::new("", l2, r2).ratio);
        }
        out.cases.push(case);
    }
    Ok(out)
}

// ------------------------------------------------------------------ lemma4

/// Sup of `lhs / den` over points with `den > floor`, as a case at the
/// maximizing point, plus the number of floored points.
fn pointwise(descriptor: String, lhs: &Field, den: &Field, mask: impl Fn(usize) -> bool) -> (Case, usize) {
    let mut best: Option<(f64, usize)> = None;
    let mut excluded = 0;
    for k in 0..lhs.len() {
        if !mask(k) {
            continue;
        }
        let d = den.values[k];
        if !(d > DENOMINATOR_FLOOR) {
            excluded += 1;
            if lhs.values[k] > DENOMINATOR_FLOOR {
                // lhs positive over a vanishing majorant
                return (Case::new(descriptor, lhs.values[k], 0.0), excluded);
            }
            continue;
        }
        let ratio = lhs.values[k] / d;
        if best.is_none_or(|(r, _)| ratio > r || ratio.is_nan()) {
            best = Some((ratio, k));
        }
    }
    match best {
        Some((_, k)) => (Case::new(descriptor, lhs.values[k], den.values[k]), excluded),
        None => (Case::new(descriptor, 0.0, 0.0), excluded),
    }
}

fn lemma4_case(level: &Level, name: &str, b: &Field, a: f64) -> Result<(Case, usize)> {
    let q = level.params.q;
    let bq = b.abs_pow(q);
    let lhs = level.op.apply(&bq)?;
    let m = maximal_with(&bq, &level.ladder);
    let den = m.map(|x| a * x.powf(1.0 - 1.0 / q));
    Ok(pointwise(name.into(), &lhs, &den, |_| true))
}

fn lemma4(level: &Level, class: WeightClass) -> Result<Outcome> {
    let mut out = Outcome::default();
    for (i, w) in level.class(class).enumerate() {
        let (case, excluded) = lemma4_case(level, &w.name, &w.b, w.a)?;
        if i == 0 {
            let b3 = w.b.scaled(3.0);
            let (scaled, _) = lemma4_case(level, &w.name, &b3, level.morrey(&b3)?)?;
            out.homogeneity = relative_change(case.ratio, scaled.ratio);
        }
        out.excluded += excluded;
        out.cases.push(case);
    }
    Ok(out)
}

// ------------------------------------------------------------------ lemma5

fn lemma5(level: &Level, class: WeightClass, rhos: &[f64]) -> Result<Outcome> {
    let prm = &level.params;
    let d = level.spec.d as f64;
    let mut out = Outcome::default();
    let mut curve = Vec::with_capacity(rhos.len());
    let first = match level.class(class).next() {
        Some(w) => {
            let b3 = w.b.scaled(3.0);
            let a3 = level.morrey(&b3)?;
            Some((w, b3, a3))
        }
        None => None,
    };
    for &rho in rhos {
        let mi = maximal_with(&indicator_weight(rho, 1.0, &level.spec), &level.ladder);
        let sides = |b: &Field, a: f64| {
            let lhs = level.integral(b.values.iter().zip(&mi.values).map(|(bv, m)| bv.powf(prm.p) * m));
            (lhs, a.powf(prm.p) * rho.powf(d - prm.p * prm.alpha))
        };
        let mut top = 0.0f64;
        for w in level.class(class) {
            let (lhs, rhs) = sides(&w.b, w.a);
            let case = Case::new(format!("{} | rho={rho:.4}", w.name), lhs, rhs);
            top = top.max(case.ratio);
            out.curves.push(CurvePoint { case: w.name.clone(), x_name: "rho".into(), x: rho, ratio: case.ratio });
            out.cases.push(case);
        }
        if let Some((w, b3, a3)) = &first {
            let (l0, r0) = sides(&w.b, w.a);
            let (l1, r1) = sides(b3, *a3);
            out.homogeneity =
                out.homogeneity.max(relative_change(Case::new("", l0, r0).ratio, Case::new("", l1, r1).ratio));
        }
        curve.push(top);
    }
    let lo = curve.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = curve.iter().copied().fold(0.0, f64::max);
    out.spread = Some(if hi == 0.0 { 1.0 } else { hi / lo });
    Ok(out)
}

// -------------------------------------------------------------- inner bound

struct InnerInputs {
    b: Field,
    a: f64,
    gamma: f64,
    /// Restrict the sup to the support of `b`.
    on_support: bool,
}

fn inner_inputs(level: &Level, w: &WeightProbe, scale: f64) -> Result<InnerInputs> {
    let prm = &level.params;
    let b = w.b.scaled(scale);
    if w.class.may_vanish() {
        let lifted = a1_lift_with(&b, prm.p0, prm.p1, &level.ladder)?;
        let a = morrey_constant_with(&lifted, prm.p1, prm.alpha, level.convention, &level.ladder)?.a;
        Ok(InnerInputs { b: lifted, a, gamma: choose_gamma(prm.r, prm.p1), on_support: false })
    } else {
        let a = if scale == 1.0 { w.a } else { level.morrey(&b)? };
        Ok(InnerInputs { b, a, gamma: prm.gamma, on_support: true })
    }
}

fn inner_case(level: &Level, name: &str, inp: &InnerInputs) -> Result<(Case, usize)> {
    let r = level.params.r;
    let rc = level.params.r_conj;
    let g = inp.gamma;
    let inner = level.op.apply(&inp.b.abs_pow((1.0 + g) * r))?;
    let lhs = level.op.apply(&inner.map(|x| x.max(0.0).powf(1.0 / (r - 1.0))))?;
    let den = inp.b.map(|x| x.powf(g * rc) * inp.a.powf(rc));
    let b = &inp.b;
    Ok(pointwise(name.into(), &lhs, &den, |k| !inp.on_support || b.values[k] > 0.0))
}

fn inner_bound(level: &Level, class: WeightClass) -> Result<Outcome> {
    let mut out = Outcome::default();
    for (i, w) in level.class(class).enumerate() {
        let (case, excluded) = inner_case(level, &w.name, &inner_inputs(level, w, 1.0)?)?;
        if i == 0 {
            let (scaled, _) = inner_case(level, &w.name, &inner_inputs(level, w, 3.0)?)?;
            out.homogeneity = relative_change(case.ratio, scaled.ratio);
        }
        out.excluded += excluded;
        out.cases.push(case);
    }
    Ok(out)
}

// ----------------------------------------------------------------- duality

fn duality(level: &Level, class: WeightClass) -> Result<Outcome> {
    let r = level.params.r;
    let rc = level.params.r_conj;
    let mut out = Outcome::default();
    let sides = |b: &Field, f: &Field, v: &Field| -> Result<(f64, f64, f64)> {
        let g = b.zip_with(v, |bv, vv| bv.powf(r) * vv.abs().powf(r - 1.0) * vv.signum())?;
        let first = g.dot(v)?;
        let rg = level.op.apply(&g)?;
        let second = rg.dot(f)?;
        let defect = if first == second { 0.0 } else { (first - second).abs() / first.abs().max(f64::MIN_POSITIVE) };
        let h = level.spec.cell_volume();
        let rhs = (sum_pow(f, r) * h).powf(1.0 / r) * (sum_pow(&rg, rc) * h).powf(1.0 / rc);
        Ok((first, rhs, defect))
    };
    out.diagnostics.insert("pairing_defect".into(), 0.0);
    for (i, (w, s)) in level.pairs(class).into_iter().enumerate() {
        let (lhs, rhs, defect) = sides(&w.b, &s.f, &s.v)?;
        let case = Case::new(format!("{} | {}", w.name, s.name), lhs, rhs);
        out.diag_max("pairing_defect", defect);
        out.diag_min("holder_slack", if rhs > 0.0 { (rhs - lhs) / rhs } else { 0.0 });
        if i == 0 {
            let f2 = s.f.scaled(2.0);
            let (l2, r2, _) = sides(&w.b.scaled(3.0), &f2, &level.op.apply(&f2)?)?;
            out.homogeneity = relative_change(case.ratio, Case::new("", l2, r2).ratio);
        }
        out.cases.push(case);
    }
    Ok(out)
}

// ----------------------------------------------------------------- a1 lift

fn unit_ball_volume(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => PI,
        _ => 4.0 * PI / 3.0,
    }
}

fn a1_case(level: &Level, name: &str, b: &Field, a: f64) -> Result<(Case, f64, f64)> {
    let prm = &level.params;
    let lifted = a1_lift_with(b, prm.p0, prm.p1, &level.ladder)?;
    let scan = morrey_constant_with(&lifted, prm.p1, prm.alpha, MorreyConvention::Avg, &level.ladder)?;
    let d = level.spec.d as f64;
    let rho = scan.argmax_volume_radius;
    let avg = (scan.a / rho.powf(prm.alpha)).powf(prm.p1);
    let lhs = unit_ball_volume(level.spec.d) * rho.powf(d) * avg;
    let rhs = rho.powf(d - prm.p1 * prm.alpha) * a.powf(prm.p1);
    let dominance = lifted.values.iter().zip(&b.values).map(|(l, v)| l - v).fold(f64::INFINITY, f64::min);
    let a1 = a1_constant_with(&lifted.abs_pow(prm.p1), &level.ladder)?.constant;
    Ok((Case::new(name, lhs, rhs), dominance, a1))
}

fn a1_lift(level: &Level, class: WeightClass) -> Result<Outcome> {
    let mut out = Outcome::default();
    for (i, w) in level.class(class).enumerate() {
        let (case, dominance, a1) = a1_case(level, &w.name, &w.b, w.a)?;
        out.diag_min("lift_minus_b_min", dominance);
        out.diag_max("a1_constant_of_lift_max", a1);
        if i == 0 {
            let b3 = w.b.scaled(3.0);
            let (scaled, _, _) = a1_case(level, &w.name, &b3, level.morrey(&b3)?)?;
            out.homogeneity = relative_change(case.ratio, scaled.ratio);
        }
        out.cases.push(case);
    }
    Ok(out)
}

// --------------------------------------------------------- fefferman-stein

fn fefferman_stein(level: &Level, class: WeightClass) -> Result<Outcome> {
    let prm = &level.params;
    let s = prm.p / prm.p0;
    let mut out = Outcome::default();
    let sides = |g: &Field, w: &Field| {
        let mg = maximal_with(g, &level.ladder);
        let mw = maximal_with(w, &level.ladder);
        let lhs = level.integral(mg.values.iter().zip(&w.values).map(|(m, wv)| m.powf(s) * wv));
        let rhs = level.integral(g.values.iter().zip(&mw.values).map(|(gv, m)| gv.abs().powf(s) * m));
        (lhs, rhs)
    };
    let mut mg_cache: BTreeMap<&str, Field> = BTreeMap::new();
    let mut mw_cache: BTreeMap<&str, Field> = BTreeMap::new();
    for (i, (w, src)) in level.pairs(class).into_iter().enumerate() {
        let mg = mg_cache.entry(src.name.as_str()).or_insert_with(|| maximal_with(&src.f, &level.ladder));
        let lhs = level.integral(mg.values.iter().zip(&w.b.values).map(|(m, wv)| m.powf(s) * wv));
        let mw = mw_cache.entry(w.name.as_str()).or_insert_with(|| maximal_with(&w.b, &level.ladder));
        let rhs = level.integral(src.f.values.iter().zip(&mw.values).map(|(gv, m)| gv.abs().powf(s) * m));
        let case = Case::new(format!("{} | {}", w.name, src.name), lhs, rhs);
        if i == 0 {
            let (l2, r2) = sides(&src.f.scaled(2.0), &w.b.scaled(3.0));
            out.homogeneity = relative_change(case.ratio, Case::new("", l2, r2).ratio);
        }
        out.cases.push(case);
    }
    Ok(out)
}

// -------------------------------------------------------------- corollary2

fn corollary2(level: &Level, class: WeightClass) -> Result<Outcome> {
    let prm = &level.params;
    let r = prm.r;
    let spectral = SpectralBox::new(level.spec, 2)?;
    let with_gradient = prm.d >= 2 && prm.alpha == 1.0;
    let c = riesz_inversion_constant(prm.d, prm.alpha)?;
    let mut out = Outcome::default();
    // (rhs fractional, rhs gradient) integrals without A, per source
    let mut rhs_cache: BTreeMap<&str, (f64, Option<f64>)> = BTreeMap::new();
    let lhs_of =
        |b: &Field, u: &Field| level.integral(b.values.iter().zip(&u.values).map(|(bv, uv)| (bv * uv.abs()).powf(r)));
    for (i, (w, src)) in level.pairs(class).into_iter().enumerate() {
        if !rhs_cache.contains_key(src.name.as_str()) {
            let f = spectral.frac_laplacian(&src.f, prm.alpha)?;
            let back = level.op.apply(&f)?.scaled(c);
            let residual = back.zip_with(&src.f, |x, y| x - y)?.max_abs() / src.f.max_abs();
            out.diag_max("round_trip_residual_max", residual);
            let frac = level.integral(f.values.iter().map(|x| x.abs().powf(r)));
            let grad = if with_gradient {
                let g = gradient_norm(&spectral.gradient(&src.f)?)?;
                let gi = level.integral(g.values.iter().map(|x| x.powf(r)));
                let q = (gi / frac).powf(1.0 / r);
                out.diag_max("grad_over_frac_norm_max", q);
                out.diag_min("grad_over_frac_norm_min", q);
                Some(gi)
            } else {
                None
            };
            rhs_cache.insert(src.name.as_str(), (frac, grad));
        }
        let (frac, grad) = rhs_cache[src.name.as_str()];
        let lhs = lhs_of(&w.b, &src.f);
        let ar = w.a.powf(r);
        let case = Case::new(format!("{} | {} | fractional", w.name, src.name), lhs, ar * frac);
        if i == 0 {
            let b3 = w.b.scaled(3.0);
            let u2 = src.f.scaled(2.0);
            let f2 = spectral.frac_laplacian(&u2, prm.alpha)?;
            let rhs2 = level.morrey(&b3)?.powf(r) * level.integral(f2.values.iter().map(|x| x.abs().powf(r)));
            out.homogeneity = relative_change(case.ratio, Case::new("", lhs_of(&b3, &u2), rhs2).ratio);
        }
        out.cases.push(case);
        if let Some(gi) = grad {
            out.cases.push(Case::new(format!("{} | {} | gradient", w.name, src.name), lhs, ar * gi));
        }
    }
    Ok(out)
}

// ------------------------------------------------------------ hölder split

/// `R(b^r v^(r-1)) <= R(b^((1+g) r))^(1/r) R(b^(r - g r') v^r)^((r-1)/r)`
/// pointwise, by direct summation.
fn holder_split(level: &Level, class: WeightClass) -> Result<Outcome> {
    let prm = &level.params;
    let (r, g, rc) = (prm.r, prm.gamma, prm.r_conj);
    let mut out = Outcome::default();
    let nonnegative: Vec<&SourceProbe> = level.sources.iter().filter(|s| s.f.min() >= 0.0).collect();
    if nonnegative.is_empty() {
        return Ok(out);
    }
    for (j, w) in level.class(class).take(10).enumerate() {
        let s = nonnegative[j % nonnegative.len()];
        let v = level.op.apply_direct(&s.f)?.map(|x| x.max(0.0));
        let b = &w.b;
        let left = level.op.apply_direct(&b.zip_with(&v, |bv, vv| bv.powf(r) * vv.powf(r - 1.0))?)?;
        let first = level.op.apply_direct(&b.abs_pow((1.0 + g) * r))?;
        let second = level.op.apply_direct(&b.zip_with(&v, |bv, vv| bv.powf(r - g * rc) * vv.powf(r))?)?;
        let right = first.zip_with(&second, |x, y| x.powf(1.0 / r) * y.powf((r - 1.0) / r))?;
        let slack = right
            .values
            .iter()
            .zip(&left.values)
            .map(|(rv, lv)| {
                if *rv > 0.0 {
                    (rv - lv) / rv
                } else if *lv > 0.0 {
                    -1.0
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min);
        out.diag_min("min_slack", slack);
        let (case, excluded) = pointwise(format!("{} | {}", w.name, s.name), &left, &right, |_| true);
        out.excluded += excluded;
        out.cases.push(case);
    }
    Ok(out)
}
