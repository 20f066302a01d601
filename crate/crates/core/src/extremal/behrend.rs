//! Sphere-in-a-box sets.
//!
//! Points of `[0, m]^{d−1} × [0, top]` are encoded as integers in base
//! `2m + 1`, least significant coordinate first, shifted by one into `[N]`.
//! Adding two encodings never carries out of the lower digits, so an integer
//! progression `a + c = 2b` among encodings forces the same relation
//! coordinatewise. The top digit has no carry constraint: once the lower
//! digits agree its equation is exact. Points on a common sphere (any
//! centre) are in strictly convex position, so no point is the midpoint of
//! two others.
//!
//! For each admissible `m` the construction picks the sphere (centre on the
//! half-integer grid, radius) holding the most lattice points, and keeps
//! the best `m`. When the centre search would be too expensive only the
//! centre of the box is tried. Smaller `m` are searched first and draw on a
//! shared work budget, so the result is deterministic.

use crate::field::IntervalSet;
use crate::{Error, Result};

use super::is_3ap_free;

/// Radius evaluations allowed for a full centre search on one grid.
const CENTRE_SEARCH_BUDGET: usize = 4_000_000;
/// Radius evaluations allowed across all grids of one construction.
const TOTAL_SEARCH_BUDGET: usize = 24_000_000;

/// `round(sqrt(ln N))`, at least 1.
pub fn default_behrend_dimension(n: usize) -> usize {
    ((n as f64).ln().max(0.0).sqrt().round() as usize).max(1)
}

/// [`behrend_set`] with the default dimension.
pub fn behrend_set_auto(n: usize) -> Result<IntervalSet> {
    behrend_set(n, default_behrend_dimension(n))
}

/// A progression-free subset of `[N]` from lattice points on a sphere in a
/// `dimension`-dimensional box.
///
/// ```
/// use ap3::extremal::{behrend_set, is_3ap_free};
/// let s = behrend_set(100, 2).unwrap();
/// assert!(s.len() >= 10);
/// assert!(is_3ap_free(&s));
/// ```
pub fn behrend_set(n: usize, dimension: usize) -> Result<IntervalSet> {
    if n < 8 {
        return Err(Error::InvalidArgument(format!("Behrend construction needs N >= 8, got {n}")));
    }
    if dimension == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let mut best: Vec<usize> = Vec::new();
    let mut budget = TOTAL_SEARCH_BUDGET;
    for m in 1.. {
        let Some(grid) = Grid::new(n, dimension, m) else { break };
        let candidate = grid.best_sphere(&mut budget);
        if candidate.len() > best.len() {
            best = candidate;
        }
    }
    if best.is_empty() {
        return Err(Error::Degenerate(format!("no lattice points for N = {n}, dimension = {dimension}")));
    }
    let set = IntervalSet::from_members(n, best)?;
    assert!(is_3ap_free(&set), "sphere construction produced a progression");
    Ok(set)
}

struct Grid {
    base: usize,
    /// Per-coordinate upper bounds: `m` for the lower digits, `top` last.
    bounds: Vec<usize>,
}

impl Grid {
    fn new(n: usize, dimension: usize, m: usize) -> Option<Self> {
        if dimension == 1 && m > 1 {
            // a single coordinate has no lower digits, so m is irrelevant
            return None;
        }
        let base = 2 * m + 1;
        let mut low = 1usize;
        for _ in 1..dimension {
            low = low.checked_mul(base)?;
        }
        // largest value the lower digits can contribute
        let low_max = if dimension > 1 { (low - 1) / 2 } else { 0 };
        if low_max >= n {
            return None;
        }
        let top = (n - 1 - low_max) / low;
        let mut bounds = vec![m; dimension - 1];
        bounds.push(top);
        Some(Self { base, bounds })
    }

    fn points(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for &b in &self.bounds {
            out = out
                .into_iter()
                .flat_map(|v| {
                    (0..=b).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out
    }

    fn encode(&self, v: &[usize]) -> usize {
        v.iter().rev().fold(0, |acc, &x| acc * self.base + x) + 1
    }

    /// Doubled centres to try: every half-integer point of the box with all
    /// coordinates at most the midpoint when the budget allows (reflecting
    /// a coordinate maps spheres to spheres of the same size), otherwise only
    /// the midpoint.
    fn centres(&self, points: usize, budget: &mut usize) -> Vec<Vec<usize>> {
        let count: usize = self.bounds.iter().map(|&b| b + 1).product();
        let work = count.saturating_mul(points);
        if work <= CENTRE_SEARCH_BUDGET.min(*budget) {
            *budget -= work;
            Grid { base: 0, bounds: self.bounds.clone() }.points()
        } else {
            vec![self.bounds.clone()]
        }
    }

    fn best_sphere(&self, budget: &mut usize) -> Vec<usize> {
        let points = self.points();
        let sq = |v: &[usize], c: &[usize]| -> usize { v.iter().zip(c).map(|(&x, &c)| (2 * x).abs_diff(c).pow(2)).sum() };
        let mut radii = Vec::with_capacity(points.len());
        // (points on sphere, doubled radius squared, doubled centre)
        let mut best: Option<(usize, usize, Vec<usize>)> = None;
        for centre in self.centres(points.len(), budget) {
            radii.clear();
            radii.extend(points.iter().map(|v| sq(v, &centre)));
            radii.sort_unstable();
            // longest run; ties go to the smaller radius since runs are visited in order
            let (mut size, mut r) = (0, 0);
            for run in radii.chunk_by(|a, b| a == b) {
                if run.len() > size {
                    (size, r) = (run.len(), run[0]);
                }
            }
            if best.as_ref().is_none_or(|(s, _, _)| size > *s) {
                best = Some((size, r, centre));
            }
        }
        let Some((_, r, centre)) = best else { return Vec::new() };
        let mut out: Vec<usize> = points.iter().filter(|v| sq(v, &centre) == r).map(|v| self.encode(v)).collect();
        out.sort_unstable();
        out
    }
}
