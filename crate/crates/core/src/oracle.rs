//! Slow reference implementations for small grids.
//!
//! Each oracle is either the same sum written as a plain loop, or a search
//! over a superset of the candidates its fast counterpart visits.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use num_traits::Float;

use crate::grid::{Field, GridSpec, Index, Point, MAX_DIM};
use crate::morrey::{check_exponents, scan_value, MorreyConvention};
use crate::riesz::RieszKernelTable;
use crate::{Error, Result};

/// Largest grid the oracles accept.
pub const ORACLE_MAX_POINTS: usize = 1 << 16;

fn guard(spec: &GridSpec) -> Result<()> {
    if spec.len() > ORACLE_MAX_POINTS {
        return Err(Error::SizeGuard { points: spec.len(), limit: ORACLE_MAX_POINTS });
    }
    Ok(())
}

fn grid_index(spec: &GridSpec, x: &Point) -> Result<Index> {
    spec.exact_index(x).ok_or(Error::OutsideGrid)
}

/// `R_alpha f(x)` at a grid point by a literal loop over all cells.
pub fn riesz_bruteforce(f: &Field, alpha: f64, x: &Point) -> Result<f64> {
    riesz_bruteforce_with(&RieszKernelTable::new(f.spec, alpha)?, f, x)
}

/// As [`riesz_bruteforce`] with a prebuilt table.
pub fn riesz_bruteforce_with(table: &RieszKernelTable, f: &Field, x: &Point) -> Result<f64> {
    let s = f.spec;
    guard(&s)?;
    if !s.same_grid(&table.spec) {
        return Err(Error::GridMismatch);
    }
    let xi = grid_index(&s, x)?;
    let mut acc = 0.0;
    for j in 0..s.len() {
        let yj = s.unflat(j);
        let mut k = [0i64; MAX_DIM];
        for a in 0..s.d {
            k[a] = yj[a] as i64 - xi[a] as i64;
        }
        acc += table.weight(&k) * f.values[j];
    }
    Ok(acc)
}

/// Midpoint-rule potential that drops the central cell, `sum_{y != x}
/// |y - x|^(alpha - d) f(y) h^d`, for measuring what the exact cell weights
/// change.
pub fn riesz_midpoint(f: &Field, alpha: f64, x: &Point) -> Result<f64> {
    let s = f.spec;
    guard(&s)?;
    crate::riesz::check_alpha(alpha, s.d)?;
    let xi = grid_index(&s, x)?;
    let mut acc = 0.0;
    for j in 0..s.len() {
        let yj = s.unflat(j);
        let r2: f64 = (0..s.d).map(|a| ((yj[a] as f64 - xi[a] as f64) * s.h).powi(2)).sum();
        if r2 > 0.0 {
            acc += r2.powf(0.5 * (alpha - s.d as f64)) * f.values[j];
        }
    }
    Ok(acc * s.cell_volume())
}

/// Every cell offset from `center` grouped by squared index distance, in
/// increasing order of distance, including offsets that leave the grid.
fn shells(spec: &GridSpec, center: &Index) -> BTreeMap<u64, Vec<Option<usize>>> {
    let n = spec.n as i64;
    let d = spec.d;
    let mut out: BTreeMap<u64, Vec<Option<usize>>> = BTreeMap::new();
    let span = |a: usize| if a < d { -(n - 1)..=(n - 1) } else { 0..=0 };
    for i in span(0) {
        for j in span(1) {
            for k in span(2) {
                let off = [i, j, k];
                let m = (off[0] * off[0] + off[1] * off[1] + off[2] * off[2]) as u64;
                let mut idx = [0usize; MAX_DIM];
                let mut inside = true;
                for a in 0..d {
                    let c = center[a] as i64 + off[a];
                    inside &= (0..n).contains(&c);
                    idx[a] = c.max(0) as usize;
                }
                out.entry(m).or_default().push(inside.then(|| spec.flat(&idx)));
            }
        }
    }
    out
}

/// `M f(x)` over every ball realizable on the grid: one per distinct
/// squared lattice distance, grown shell by shell.
pub fn maximal_bruteforce(f: &Field, x: &Point) -> Result<f64> {
    let s = f.spec;
    guard(&s)?;
    let center = grid_index(&s, x)?;
    let mut sum = 0.0;
    let mut count = 0u64;
    let mut best = 0.0f64;
    for cells in shells(&s, &center).values() {
        for c in cells {
            if let Some(k) = c {
                sum += f.values[*k].abs();
            }
            count += 1;
        }
        best = best.max(sum / count as f64);
    }
    Ok(best)
}

/// Morrey scan over every cell center and every realizable ball.
pub fn morrey_bruteforce(b: &Field, p: f64, alpha: f64, convention: MorreyConvention) -> Result<f64> {
    let s = b.spec;
    guard(&s)?;
    check_exponents(&s, p, alpha)?;
    b.check_nonnegative("b")?;
    let bp = b.abs_pow(p);
    let mut best = 0.0f64;
    for c in 0..s.len() {
        let mut sum = 0.0;
        let mut count = 0u64;
        for cells in shells(&s, &s.unflat(c)).values() {
            for k in cells.iter().flatten() {
                sum += bp.values[*k];
            }
            count += cells.len() as u64;
            best = best.max(scan_value(sum, count, &s, p, alpha, convention));
        }
    }
    Ok(best)
}
