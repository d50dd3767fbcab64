//! Piecewise evaluation from local support windows.
//!
//! A query point selects, per axis, a contiguous window of `w_i` nodes; the
//! Hermite interpolant of that sub-grid (a *patch*) is built on first use and
//! cached by its index ranges. Patches that meet at a node share its data,
//! which makes the pieces agree on the common hyperplane.

use std::collections::HashMap;
use std::ops::Range;
use std::sync::{Arc, RwLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Axis, DataSource, GridSpec, HermiteData};
use crate::interpolant::{interpolate, HermiteInterpolant};
use crate::multiindex::{IndexBox, MultiIndex};
use crate::scalar::Scalar;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How odd-sized windows are centred.
///
/// `Round` centres on the nearest node, so pieces switch at cell midpoints.
/// `Floor` centres on the nearest node at or below the query, so pieces
/// switch at nodes, as even windows do. Even windows ignore this setting.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum WindowAnchor {
    #[default]
    Round,
    Floor,
}

impl std::str::FromStr for WindowAnchor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "round" => Ok(WindowAnchor::Round),
            "floor" => Ok(WindowAnchor::Floor),
            other => Err(Error::Parse(format!("unknown window anchor {other:?} (expected round or floor)"))),
        }
    }
}

/// What happens when a window would reach past the end of an axis.
///
/// `Clamp` shifts it inward so every patch keeps `w` nodes. `Truncate` drops
/// the missing nodes, so edge patches are smaller and the first and last
/// interior nodes become break points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum WindowBoundary {
    #[default]
    Clamp,
    Truncate,
}

impl std::str::FromStr for WindowBoundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "clamp" => Ok(WindowBoundary::Clamp),
            "truncate" => Ok(WindowBoundary::Truncate),
            other => Err(Error::Parse(format!("unknown window boundary {other:?} (expected clamp or truncate)"))),
        }
    }
}

/// Anchor and boundary rule together.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct WindowRule {
    pub anchor: WindowAnchor,
    pub boundary: WindowBoundary,
}

fn is_integer_unit(coords: &[f64]) -> bool {
    coords[0].fract() == 0.0 && coords.iter().enumerate().all(|(i, &c)| c == coords[0] + i as f64)
}

fn check_window(axis_no: usize, len: usize, w: usize) -> Result<()> {
    if w == 0 || w > len || (w == 1 && len > 1) {
        return Err(Error::InvalidWindow { axis: axis_no, size: w, len });
    }
    Ok(())
}

fn window_on(axis_no: usize, coords: &[f64], q: f64, w: usize, rule: WindowRule) -> Result<Range<usize>> {
    let len = coords.len();
    check_window(axis_no, len, w)?;
    let (lo, hi) = (coords[0], coords[len - 1]);
    if !(q >= lo && q <= hi) {
        return Err(Error::Extrapolation { axis: axis_no, value: q, lo, hi });
    }
    // last node at or below q; the end node belongs to the last cell
    let below = (coords.partition_point(|&c| c <= q) - 1).min(len.saturating_sub(2));
    let start: i64 = if w.is_multiple_of(2) {
        below as i64 - (w / 2) as i64 + 1
    } else {
        let half = ((w - 1) / 2) as i64;
        let centre = match rule.anchor {
            WindowAnchor::Floor => below as i64,
            WindowAnchor::Round if is_integer_unit(coords) => (q.round() - coords[0]) as i64,
            WindowAnchor::Round => {
                // nearest node, ties toward the lower one
                if below + 1 < len && coords[below + 1] - q < q - coords[below] {
                    below as i64 + 1
                } else {
                    below as i64
                }
            }
        };
        centre - half
    };
    match rule.boundary {
        WindowBoundary::Clamp => {
            let start = start.clamp(0, (len - w) as i64) as usize;
            Ok(start..start + w)
        }
        WindowBoundary::Truncate => Ok(start.max(0) as usize..(start + w as i64).min(len as i64) as usize),
    }
}

/// Index range of the `w` support nodes used around `q`.
pub fn select_window<S: Scalar>(axis: &Axis<S>, q: f64, w: usize, rule: WindowRule) -> Result<Range<usize>> {
    window_on(0, &axis.coords_f64(), q, w, rule)
}

/// Piecewise Hermite interpolant over a (possibly lazily evaluated) data source.
pub struct SplineInterpolant<S: Scalar, D: DataSource<S>> {
    source: D,
    window: Vec<usize>,
    rule: WindowRule,
    coords: Vec<Vec<f64>>,
    cache: RwLock<HashMap<Vec<(usize, usize)>, Arc<HermiteInterpolant<S>>>>,
}

impl<S: Scalar, D: DataSource<S>> SplineInterpolant<S, D> {
    pub fn new(source: D, window: Vec<usize>) -> Result<Self> {
        let grid = source.grid();
        if window.len() != grid.n() {
            return Err(Error::DimensionMismatch { expected: grid.n(), found: window.len() });
        }
        for (i, (&w, ax)) in window.iter().zip(grid.axes()).enumerate() {
            check_window(i, ax.len(), w)?;
        }
        let coords = grid.axes().iter().map(Axis::coords_f64).collect();
        Ok(SplineInterpolant { source, window, rule: WindowRule::default(), coords, cache: RwLock::new(HashMap::new()) })
    }

    pub fn with_anchor(mut self, anchor: WindowAnchor) -> Self {
        self.rule.anchor = anchor;
        self
    }

    pub fn with_boundary(mut self, boundary: WindowBoundary) -> Self {
        self.rule.boundary = boundary;
        self
    }

    pub fn rule(&self) -> WindowRule {
        self.rule
    }

    pub fn window(&self) -> &[usize] {
        &self.window
    }

    pub fn grid(&self) -> &GridSpec<S> {
        self.source.grid()
    }

    pub fn source(&self) -> &D {
        &self.source
    }

    pub fn cached_patches(&self) -> usize {
        self.cache.read().expect("cache lock").len()
    }

    /// Per-axis window ranges for a query point.
    pub fn window_ranges(&self, x: &[f64]) -> Result<Vec<Range<usize>>> {
        if x.len() != self.coords.len() {
            return Err(Error::DimensionMismatch { expected: self.coords.len(), found: x.len() });
        }
        x.iter()
            .enumerate()
            .map(|(i, &q)| window_on(i, &self.coords[i], q, self.window[i], self.rule))
            .collect()
    }

    /// The patch built on the sub-grid `ranges`.
    pub fn patch(&self, ranges: &[Range<usize>]) -> Result<Arc<HermiteInterpolant<S>>> {
        let key: Vec<(usize, usize)> = ranges.iter().map(|r| (r.start, r.end)).collect();
        if let Some(p) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(p.clone());
        }
        let sub = self.source.grid().subgrid(ranges);
        let values = sub
            .points()
            .map(|idx| {
                let full: Vec<usize> = idx.iter().zip(ranges).map(|(i, r)| i + r.start).collect();
                self.source.values(&full)
            })
            .collect::<Result<Vec<_>>>()?;
        let data = HermiteData::from_point_values(sub, values)?;
        let built = Arc::new(interpolate(&data));
        // concurrent builders may race; the first stored patch wins and all are identical
        let mut w = self.cache.write().expect("cache lock");
        Ok(w.entry(key).or_insert(built).clone())
    }

    fn patch_for(&self, xf: &[f64]) -> Result<Arc<HermiteInterpolant<S>>> {
        self.patch(&self.window_ranges(xf)?)
    }

    /// `∂^k s(x)` from the patch selected by `x`.
    pub fn eval(&self, x: &[S], k: &MultiIndex) -> Result<S> {
        let xf: Vec<f64> = x.iter().map(Scalar::to_f64).collect();
        self.patch_for(&xf)?.eval(x, k)
    }

    pub fn value(&self, x: &[S]) -> Result<S> {
        self.eval(x, &MultiIndex::zeros(x.len()))
    }

    pub fn eval_batch(&self, points: &[Vec<S>], k: &MultiIndex) -> Result<Vec<S>> {
        #[cfg(feature = "parallel")]
        {
            points.par_iter().map(|x| self.eval(x, k)).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            self.eval_batch_sequential(points, k)
        }
    }

    pub fn eval_batch_sequential(&self, points: &[Vec<S>], k: &MultiIndex) -> Result<Vec<S>> {
        points.iter().map(|x| self.eval(x, k)).collect()
    }
}

/// Largest disagreement between the two patches meeting at a node.
#[derive(Clone, Debug, Serialize)]
pub struct ContinuityReport {
    pub axis: usize,
    pub node: usize,
    /// `max_mismatch[d]`: largest `|∂ p⁻ − ∂ p⁺|` over probes and tangential
    /// orders, for derivative order `d` across the axis.
    pub max_mismatch: Vec<f64>,
}

impl ContinuityReport {
    /// Highest `d` such that orders `0..=d` all stay below `tol`; `None` if
    /// even the values disagree.
    pub fn smoothness(&self, tol: f64) -> Option<usize> {
        self.max_mismatch.iter().take_while(|&&m| m < tol).count().checked_sub(1)
    }
}

/// Probes the hyperplane `x_axis = a_node` at `probes` seeded random points.
/// Cross-axis orders run `0..=max_order` (default `ν_axis(a) − 1`); tangential
/// orders run up to `min ν − 1` of the other axes.
pub fn continuity_report<S: Scalar, D: DataSource<S>>(
    s: &SplineInterpolant<S, D>,
    axis: usize,
    node: usize,
    probes: usize,
    max_order: Option<u32>,
    seed: u64,
) -> Result<ContinuityReport> {
    let grid = s.grid();
    let n = grid.n();
    if axis >= n {
        return Err(Error::DimensionMismatch { expected: n, found: axis + 1 });
    }
    let coords = &s.coords[axis];
    if node == 0 || node + 1 >= coords.len() {
        return Err(Error::NotSharedNode { axis, node });
    }
    let a = grid.axis(axis).coord(node).clone();
    let af = coords[node];
    let left = af - (af - coords[node - 1]) * 1e-6;
    let right = af + (coords[node + 1] - af) * 1e-6;
    let wl = window_on(axis, coords, left, s.window[axis], s.rule)?;
    let wr = window_on(axis, coords, right, s.window[axis], s.rule)?;
    if wl == wr {
        return Err(Error::NotSharedNode { axis, node });
    }
    let max_order = max_order.unwrap_or(grid.axis(axis).mult()[node] - 1);
    let tangential: Vec<u32> =
        (0..n).map(|i| if i == axis { 0 } else { grid.axis(i).mult().iter().copied().min().unwrap_or(1) - 1 }).collect();
    let tangential = IndexBox::from_origin(MultiIndex(tangential)).enumerate();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = vec![0.0f64; max_order as usize + 1];
    for _ in 0..probes.max(1) {
        let mut x: Vec<S> = Vec::with_capacity(n);
        let mut win_l = Vec::with_capacity(n);
        let mut win_r = Vec::with_capacity(n);
        for i in 0..n {
            if i == axis {
                x.push(a.clone());
                win_l.push(wl.clone());
                win_r.push(wr.clone());
                continue;
            }
            let c = &s.coords[i];
            let (lo, hi) = (c[0], c[c.len() - 1]);
            // dyadic-free rational probe so exact mode stays exact
            let u: f64 = rng.gen();
            let steps = 1_000_000i64;
            let t = (u * steps as f64).round() as i64;
            let lo_s = grid.axis(i).coord(0).clone();
            let hi_s = grid.axis(i).coord(c.len() - 1).clone();
            let xi = lo_s.clone() + (hi_s - lo_s) * S::from_ratio(t, steps);
            let xf = xi.to_f64().clamp(lo, hi);
            let r = window_on(i, c, xf, s.window[i], s.rule)?;
            win_l.push(r.clone());
            win_r.push(r);
            x.push(xi);
        }
        let pl = s.patch(&win_l)?;
        let pr = s.patch(&win_r)?;
        for d in 0..=max_order {
            for t in &tangential {
                let mut k = t.clone();
                k.0[axis] = d;
                let diff = (pl.eval(&x, &k)? - pr.eval(&x, &k)?).magnitude();
                let slot = &mut worst[d as usize];
                *slot = slot.max(diff);
            }
        }
    }
    Ok(ContinuityReport { axis, node, max_mismatch: worst })
}

/// Interior nodes of `axis` where two different patches meet.
pub fn shared_nodes<S: Scalar, D: DataSource<S>>(s: &SplineInterpolant<S, D>, axis: usize) -> Vec<usize> {
    let c = &s.coords[axis];
    (1..c.len().saturating_sub(1))
        .filter(|&j| {
            let l = window_on(axis, c, c[j] - (c[j] - c[j - 1]) * 1e-6, s.window[axis], s.rule);
            let r = window_on(axis, c, c[j] + (c[j + 1] - c[j]) * 1e-6, s.window[axis], s.rule);
            matches!((l, r), (Ok(l), Ok(r)) if l != r)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Rational};

    fn round() -> WindowRule {
        WindowRule::default()
    }

    fn floor() -> WindowRule {
        WindowRule { anchor: WindowAnchor::Floor, ..WindowRule::default() }
    }

    fn unit(len: usize) -> Axis<f64> {
        Axis::unit(len, 1).unwrap()
    }

    #[test]
    fn window_rule_on_unit_grid() {
        let a = unit(7);
        assert_eq!(select_window(&a, 2.3, 4, round()).unwrap(), 1..5);
        assert_eq!(select_window(&a, 2.3, 3, round()).unwrap(), 1..4);
        assert_eq!(select_window(&a, 2.7, 3, round()).unwrap(), 2..5);
        assert_eq!(select_window(&a, 2.7, 3, floor()).unwrap(), 1..4);
        assert_eq!(select_window(&a, 0.2, 4, round()).unwrap(), 0..4);
        assert_eq!(select_window(&a, 6.0, 4, round()).unwrap(), 3..7);
        // half-integer ties round away from zero
        assert_eq!(select_window(&a, 2.5, 3, round()).unwrap(), 2..5);
        assert!(matches!(select_window(&a, 6.5, 3, round()), Err(Error::Extrapolation { .. })));
        assert!(matches!(select_window(&a, 1.0, 8, round()), Err(Error::InvalidWindow { .. })));
    }

    #[test]
    fn window_rule_on_general_grid() {
        let a = Axis::uniform(vec![0.0, 0.5, 2.0, 2.5, 4.0, 7.0], 1).unwrap();
        assert_eq!(select_window(&a, 2.1, 4, round()).unwrap(), 1..5);
        assert_eq!(select_window(&a, 1.9, 3, round()).unwrap(), 1..4);
        // tie between 0.5 and 2.0 goes to the lower node
        assert_eq!(select_window(&a, 1.25, 3, round()).unwrap(), 0..3);
        assert_eq!(select_window(&a, 6.9, 2, round()).unwrap(), 4..6);
    }

    #[test]
    fn linear_spline_matches_direct_blend() {
        let g = GridSpec::new(vec![unit(4), Axis::uniform(vec![0.0, 1.0, 3.0], 1).unwrap()]).unwrap();
        let d = HermiteData::from_fn(g, |idx, _| (idx[0] * idx[0]) as f64 - 2.0 * idx[1] as f64 + 0.5);
        let s = SplineInterpolant::new(d, vec![2, 2]).unwrap();
        let v = s.value(&[1.5, 2.0]).unwrap();
        // blend of (1,1),(2,1),(1,2),(2,2) with weights 1/2 and 1/2
        let f = |i: f64, j: f64| i * i - 2.0 * j + 0.5;
        let expect = 0.25 * (f(1.0, 1.0) + f(2.0, 1.0) + f(1.0, 2.0) + f(2.0, 2.0));
        assert!((v - expect).abs() < 1e-12);
        assert_eq!(s.cached_patches(), 1);
    }

    #[test]
    fn exact_hyperplane_agreement() {
        let g = GridSpec::new(vec![
            Axis::<Rational>::uniform((0..5).map(|i| q(i * i, 2)).collect(), 2).unwrap(),
            Axis::uniform(vec![q(0, 1), q(1, 3), q(1, 1), q(2, 1)], 2).unwrap(),
        ])
        .unwrap();
        let d = HermiteData::from_fn(g, |idx, k| q((idx[0] * 5 + idx[1] * 3 + k.total() as usize) as i64 % 7, 3));
        let s = SplineInterpolant::new(d, vec![3, 2]).unwrap().with_anchor(WindowAnchor::Floor);
        for axis in 0..2 {
            for node in shared_nodes(&s, axis) {
                let r = continuity_report(&s, axis, node, 5, None, 7).unwrap();
                assert!(r.max_mismatch.iter().all(|&m| m == 0.0), "{r:?}");
            }
        }
    }

    #[test]
    fn unshared_nodes_are_rejected() {
        let g = GridSpec::new(vec![unit(7)]).unwrap();
        let d = HermiteData::from_fn(g, |idx, _| idx[0] as f64);
        let s = SplineInterpolant::new(d, vec![4]).unwrap();
        assert_eq!(shared_nodes(&s, 0), vec![2, 3, 4]);
        assert!(matches!(continuity_report(&s, 0, 1, 1, None, 0), Err(Error::NotSharedNode { .. })));
        assert!(matches!(continuity_report(&s, 0, 0, 1, None, 0), Err(Error::NotSharedNode { .. })));
        let t = SplineInterpolant::new(HermiteData::from_fn(GridSpec::new(vec![unit(7)]).unwrap(), |idx, _| idx[0] as f64), vec![4])
            .unwrap()
            .with_boundary(WindowBoundary::Truncate);
        assert_eq!(shared_nodes(&t, 0), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn truncated_windows_shrink_at_the_edges() {
        let a = unit(7);
        let t = WindowRule { boundary: WindowBoundary::Truncate, ..round() };
        assert_eq!(select_window(&a, 0.2, 4, t).unwrap(), 0..3);
        assert_eq!(select_window(&a, 2.3, 4, t).unwrap(), 1..5);
        assert_eq!(select_window(&a, 5.5, 4, t).unwrap(), 4..7);
        assert_eq!(select_window(&a, 6.0, 4, t).unwrap(), 4..7);
        assert_eq!(select_window(&a, 0.0, 3, t).unwrap(), 0..2);
        assert_eq!(select_window(&a, 6.0, 4, round()).unwrap(), 3..7);
    }
}
