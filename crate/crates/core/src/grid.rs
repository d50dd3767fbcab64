//! Rectilinear grids with per-node multiplicities and the prescribed
//! derivative data attached to them.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::ops::Range;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::multiindex::{BoxEnumeration, IndexBox, MultiIndex};
use crate::polyring::UniPoly;
use crate::scalar::Scalar;

/// One problem found while validating a grid or its data. Axis numbers in
/// messages are 1-based; point labels are index vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    EmptyGrid,
    EmptyAxis { axis: usize },
    DuplicateCoordinate { axis: usize },
    Unsorted { axis: usize },
    MultLength { axis: usize, coords: usize, mult: usize },
    ZeroMultiplicity { axis: usize, node: usize },
    IndexLength { point: Vec<usize> },
    PointOutOfRange { point: Vec<usize> },
    DuplicatePoint { point: Vec<usize> },
    MissingPoint { point: Vec<usize> },
    Missing { point: Vec<usize>, k: MultiIndex },
    Unexpected { point: Vec<usize>, k: MultiIndex },
    DuplicateEntry { point: Vec<usize>, k: MultiIndex },
}

pub(crate) fn fmt_point(p: &[usize]) -> String {
    let parts: Vec<String> = p.iter().map(|i| i.to_string()).collect();
    format!("({})", parts.join(","))
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            EmptyGrid => write!(f, "grid has no axes"),
            EmptyAxis { axis } => write!(f, "axis {}: no coordinates", axis + 1),
            DuplicateCoordinate { axis } => write!(f, "axis {}: duplicate coordinate", axis + 1),
            Unsorted { axis } => write!(f, "axis {}: coordinates not increasing", axis + 1),
            MultLength { axis, coords, mult } => {
                write!(f, "axis {}: {coords} coordinates but {mult} multiplicities", axis + 1)
            }
            ZeroMultiplicity { axis, node } => write!(f, "axis {}: multiplicity of node {node} is 0", axis + 1),
            IndexLength { point } => write!(f, "point {}: index has wrong length", fmt_point(point)),
            PointOutOfRange { point } => write!(f, "point {}: index outside the grid", fmt_point(point)),
            DuplicatePoint { point } => write!(f, "point {}: listed more than once", fmt_point(point)),
            MissingPoint { point } => write!(f, "point {}: not listed", fmt_point(point)),
            Missing { point, k } => write!(f, "point {}: missing {k}", fmt_point(point)),
            Unexpected { point, k } => write!(f, "point {}: unexpected {k}", fmt_point(point)),
            DuplicateEntry { point, k } => write!(f, "point {}: duplicate {k}", fmt_point(point)),
        }
    }
}

/// Strictly increasing coordinates with a multiplicity per node.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis<S: Scalar> {
    coords: Vec<S>,
    mult: Vec<u32>,
}

impl<S: Scalar> Axis<S> {
    pub fn new(coords: Vec<S>, mult: Vec<u32>) -> Result<Self> {
        let v = Self::check(0, &coords, &mult);
        if !v.is_empty() {
            return Err(Error::Validation(v));
        }
        Ok(Axis { coords, mult })
    }

    /// Every node gets multiplicity `nu`.
    pub fn uniform(coords: Vec<S>, nu: u32) -> Result<Self> {
        let mult = vec![nu; coords.len()];
        Self::new(coords, mult)
    }

    /// Nodes `0, 1, ..., len−1`.
    pub fn unit(len: usize, nu: u32) -> Result<Self> {
        Self::uniform((0..len as i64).map(S::from_i64).collect(), nu)
    }

    pub(crate) fn check(axis: usize, coords: &[S], mult: &[u32]) -> Vec<Violation> {
        let mut v = Vec::new();
        if coords.is_empty() {
            v.push(Violation::EmptyAxis { axis });
        }
        if coords.len() != mult.len() {
            v.push(Violation::MultLength { axis, coords: coords.len(), mult: mult.len() });
        }
        let mut dup = false;
        let mut unsorted = false;
        for w in coords.windows(2) {
            let (a, b) = (w[0].to_f64(), w[1].to_f64());
            if w[0] == w[1] {
                dup = true;
            } else if a >= b {
                unsorted = true;
            }
        }
        if !dup {
            // non-adjacent duplicates in unsorted input
            let seen: HashSet<String> = coords.iter().map(|c| c.to_string()).collect();
            dup = seen.len() != coords.len();
        }
        if dup {
            v.push(Violation::DuplicateCoordinate { axis });
        }
        if unsorted {
            v.push(Violation::Unsorted { axis });
        }
        for (node, &m) in mult.iter().enumerate() {
            if m == 0 {
                v.push(Violation::ZeroMultiplicity { axis, node });
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn mult(&self) -> &[u32] {
        &self.mult
    }

    pub fn coord(&self, node: usize) -> &S {
        &self.coords[node]
    }

    pub fn coords_f64(&self) -> Vec<f64> {
        self.coords.iter().map(Scalar::to_f64).collect()
    }

    /// `Σ ν(a)`, the number of conditions along this axis.
    pub fn total_mult(&self) -> usize {
        self.mult.iter().map(|&m| m as usize).sum()
    }

    pub fn max_mult(&self) -> u32 {
        self.mult.iter().copied().max().unwrap_or(0)
    }

    pub fn position(&self, a: &S) -> Option<usize> {
        self.coords.iter().position(|c| c == a)
    }

    pub fn hull(&self) -> (f64, f64) {
        (self.coords[0].to_f64(), self.coords[self.len() - 1].to_f64())
    }

    /// `H_i(x) = ∏ (x − a)^{ν(a)}`.
    pub fn annihilator(&self) -> UniPoly<S> {
        let roots: Vec<(S, u32)> = self.coords.iter().cloned().zip(self.mult.iter().copied()).collect();
        UniPoly::from_roots(&roots)
    }

    /// `H_a(x) = ∏_{c≠a} ((x − c)/(a − c))^{ν(c)}` for the node at index `node`.
    pub fn nodal_basis(&self, node: usize) -> UniPoly<S> {
        let a = &self.coords[node];
        let mut p = UniPoly::one();
        for (j, c) in self.coords.iter().enumerate() {
            if j == node {
                continue;
            }
            let inv = S::one() / (a.clone() - c.clone());
            let lin = UniPoly::linear_root(c.clone()).scale(&inv);
            p = p.mul(&lin.pow(self.mult[j]));
        }
        p
    }

    /// [`Axis::nodal_basis`] addressed by coordinate value.
    pub fn nodal_basis_at(&self, axis: usize, a: &S) -> Result<UniPoly<S>> {
        let node = self.position(a).ok_or(Error::NotAGridNode { axis })?;
        Ok(self.nodal_basis(node))
    }

    pub fn slice(&self, r: Range<usize>) -> Self {
        Axis { coords: self.coords[r.clone()].to_vec(), mult: self.mult[r].to_vec() }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Axis<T> {
        Axis { coords: self.coords.iter().map(f).collect(), mult: self.mult.clone() }
    }
}

/// The product grid `A_1 × … × A_n`. Points are addressed by index vectors;
/// linear order is row-major with the last axis fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec<S: Scalar> {
    axes: Vec<Axis<S>>,
}

impl<S: Scalar> GridSpec<S> {
    pub fn new(axes: Vec<Axis<S>>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::Validation(vec![Violation::EmptyGrid]));
        }
        Ok(GridSpec { axes })
    }

    pub fn n(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis<S>] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> &Axis<S> {
        &self.axes[i]
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Axis::len).collect()
    }

    pub fn num_points(&self) -> usize {
        self.axes.iter().map(Axis::len).product()
    }

    /// `∏ Σ ν_i(a)`, the dimension of the interpolation space.
    pub fn condition_count(&self) -> usize {
        self.axes.iter().map(Axis::total_mult).product()
    }

    pub fn linear_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.axes).fold(0, |acc, (&i, ax)| acc * ax.len() + i)
    }

    pub fn index_of(&self, mut lin: usize) -> Vec<usize> {
        let mut idx = vec![0; self.n()];
        for i in (0..self.n()).rev() {
            let len = self.axes[i].len();
            idx[i] = lin % len;
            lin /= len;
        }
        idx
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.num_points()).map(|l| self.index_of(l))
    }

    pub fn coordinate(&self, idx: &[usize]) -> Vec<S> {
        idx.iter().zip(&self.axes).map(|(&i, ax)| ax.coord(i).clone()).collect()
    }

    /// `ν(a)` for the point at `idx`.
    pub fn nu(&self, idx: &[usize]) -> Vec<u32> {
        idx.iter().zip(&self.axes).map(|(&i, ax)| ax.mult()[i]).collect()
    }

    pub fn derivative_box(&self, idx: &[usize]) -> IndexBox {
        IndexBox::from_multiplicity(&self.nu(idx))
    }

    pub fn hull(&self) -> Vec<(f64, f64)> {
        self.axes.iter().map(Axis::hull).collect()
    }

    /// Fails with an extrapolation error naming the first offending axis.
    pub fn check_inside(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: x.len() });
        }
        for (axis, (&v, (lo, hi))) in x.iter().zip(self.hull()).enumerate() {
            if !(v >= lo && v <= hi) {
                return Err(Error::Extrapolation { axis, value: v, lo, hi });
            }
        }
        Ok(())
    }

    pub fn subgrid(&self, ranges: &[Range<usize>]) -> Self {
        GridSpec { axes: self.axes.iter().zip(ranges).map(|(a, r)| a.slice(r.clone())).collect() }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> GridSpec<T> {
        GridSpec { axes: self.axes.iter().map(|a| a.map(f)).collect() }
    }

    /// The same grid with every multiplicity replaced per axis.
    /// Reads `{"dims", "axes", "mult"}`; other fields are ignored.
    pub fn from_json(v: &Value) -> Result<Self> {
        let dims = v
            .get("dims")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("missing integer field \"dims\"".into()))? as usize;
        let axes_v = v
            .get("axes")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing array field \"axes\"".into()))?;
        let mult_v = v
            .get("mult")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing array field \"mult\"".into()))?;
        if axes_v.len() != dims || mult_v.len() != dims {
            return Err(Error::Parse(format!(
                "\"dims\" is {dims} but {} axes and {} multiplicity lists were given",
                axes_v.len(),
                mult_v.len()
            )));
        }
        let mut violations = Vec::new();
        let mut axes = Vec::with_capacity(dims);
        for (i, (a, m)) in axes_v.iter().zip(mult_v).enumerate() {
            let coords = a
                .as_array()
                .ok_or_else(|| Error::Parse(format!("axis {}: expected an array", i + 1)))?
                .iter()
                .map(S::from_json)
                .collect::<Result<Vec<S>>>()?;
            let mult = m
                .as_array()
                .ok_or_else(|| Error::Parse(format!("mult {}: expected an array", i + 1)))?
                .iter()
                .map(|x| {
                    x.as_u64()
                        .map(|u| u as u32)
                        .ok_or_else(|| Error::Parse(format!("mult {}: expected non-negative integers", i + 1)))
                })
                .collect::<Result<Vec<u32>>>()?;
            let v = Axis::check(i, &coords, &mult);
            if v.is_empty() {
                axes.push(Axis { coords, mult });
            }
            violations.extend(v);
        }
        if !violations.is_empty() {
            return Err(Error::Validation(violations));
        }
        GridSpec::new(axes)
    }

    pub fn with_uniform_mult(&self, nu: &[u32]) -> Result<Self> {
        let axes = self
            .axes
            .iter()
            .zip(nu)
            .map(|(a, &m)| Axis::uniform(a.coords.clone(), m))
            .collect::<Result<Vec<_>>>()?;
        Self::new(axes)
    }
}

/// Anything that can produce the prescribed values of one grid point, in
/// grevlex order over the point's derivative box.
pub trait DataSource<S: Scalar>: Sync {
    fn grid(&self) -> &GridSpec<S>;
    fn values(&self, idx: &[usize]) -> Result<Vec<S>>;
}

impl<S: Scalar, D: DataSource<S> + ?Sized> DataSource<S> for Box<D> {
    fn grid(&self) -> &GridSpec<S> {
        (**self).grid()
    }

    fn values(&self, idx: &[usize]) -> Result<Vec<S>> {
        (**self).values(idx)
    }
}

/// Cache of box enumerations keyed by multiplicity vector.
#[derive(Default)]
pub(crate) struct EnumCache {
    map: HashMap<Vec<u32>, std::sync::Arc<BoxEnumeration>>,
}

impl EnumCache {
    pub(crate) fn get(&mut self, nu: &[u32]) -> std::sync::Arc<BoxEnumeration> {
        self.map
            .entry(nu.to_vec())
            .or_insert_with(|| std::sync::Arc::new(BoxEnumeration::new(&IndexBox::from_multiplicity(nu))))
            .clone()
    }
}

/// Values `t_a^k` for every grid point `a` and every `k ∈ [0, ν(a) − 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteData<S: Scalar> {
    grid: GridSpec<S>,
    values: Vec<Vec<S>>,
}

impl<S: Scalar> HermiteData<S> {
    /// Fills every condition from `f(point index, k)`.
    pub fn from_fn(grid: GridSpec<S>, mut f: impl FnMut(&[usize], &MultiIndex) -> S) -> Self {
        let mut cache = EnumCache::default();
        let values = grid
            .points()
            .map(|idx| {
                let en = cache.get(&grid.nu(&idx));
                en.elements().iter().map(|k| f(&idx, k)).collect()
            })
            .collect();
        HermiteData { grid, values }
    }

    /// Fallible variant of [`HermiteData::from_fn`].
    pub fn try_from_fn(grid: GridSpec<S>, mut f: impl FnMut(&[usize], &MultiIndex) -> Result<S>) -> Result<Self> {
        let mut cache = EnumCache::default();
        let mut values = Vec::with_capacity(grid.num_points());
        for idx in grid.points() {
            let en = cache.get(&grid.nu(&idx));
            values.push(en.elements().iter().map(|k| f(&idx, k)).collect::<Result<Vec<S>>>()?);
        }
        Ok(HermiteData { grid, values })
    }

    /// Wraps per-point value rows (grevlex order, row-major point order).
    pub fn from_point_values(grid: GridSpec<S>, values: Vec<Vec<S>>) -> Result<Self> {
        if values.len() != grid.num_points() {
            return Err(Error::DimensionMismatch { expected: grid.num_points(), found: values.len() });
        }
        for (lin, row) in values.iter().enumerate() {
            let expected = grid.derivative_box(&grid.index_of(lin)).cardinality();
            if row.len() != expected {
                return Err(Error::DimensionMismatch { expected, found: row.len() });
            }
        }
        Ok(HermiteData { grid, values })
    }

    /// Builds from a sparse listing, reporting every missing, extra or
    /// duplicated entry.
    pub fn from_entries(grid: GridSpec<S>, entries: Vec<(Vec<usize>, Vec<(MultiIndex, S)>)>) -> Result<Self> {
        let n = grid.n();
        let mut violations = Vec::new();
        let mut slots: Vec<Option<HashMap<MultiIndex, S>>> = vec![None; grid.num_points()];
        for (idx, ts) in entries {
            if idx.len() != n {
                violations.push(Violation::IndexLength { point: idx });
                continue;
            }
            if idx.iter().zip(grid.axes()).any(|(&i, a)| i >= a.len()) {
                violations.push(Violation::PointOutOfRange { point: idx });
                continue;
            }
            let lin = grid.linear_index(&idx);
            if slots[lin].is_some() {
                violations.push(Violation::DuplicatePoint { point: idx });
                continue;
            }
            let bx = grid.derivative_box(&idx);
            let mut map = HashMap::new();
            for (k, v) in ts {
                if !bx.contains(&k) {
                    violations.push(Violation::Unexpected { point: idx.clone(), k });
                } else if map.contains_key(&k) {
                    violations.push(Violation::DuplicateEntry { point: idx.clone(), k });
                } else {
                    map.insert(k, v);
                }
            }
            slots[lin] = Some(map);
        }
        let mut cache = EnumCache::default();
        let mut values = Vec::with_capacity(grid.num_points());
        for (lin, slot) in slots.into_iter().enumerate() {
            let idx = grid.index_of(lin);
            let Some(mut map) = slot else {
                violations.push(Violation::MissingPoint { point: idx });
                continue;
            };
            let en = cache.get(&grid.nu(&idx));
            let mut row = Vec::with_capacity(en.len());
            for k in en.elements() {
                match map.remove(k) {
                    Some(v) => row.push(v),
                    None => violations.push(Violation::Missing { point: idx.clone(), k: k.clone() }),
                }
            }
            values.push(row);
        }
        if violations.is_empty() {
            Ok(HermiteData { grid, values })
        } else {
            Err(Error::Validation(violations))
        }
    }

    pub fn grid(&self) -> &GridSpec<S> {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.grid.n()
    }

    /// Values of one point in grevlex order.
    pub fn point_values(&self, idx: &[usize]) -> &[S] {
        &self.values[self.grid.linear_index(idx)]
    }

    pub fn get(&self, idx: &[usize], k: &MultiIndex) -> Option<S> {
        let en = BoxEnumeration::new(&self.grid.derivative_box(idx));
        en.position(k).map(|p| self.point_values(idx)[p].clone())
    }

    /// Re-checks the invariants (useful after deserialization by other means).
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Vec::new();
        for (i, a) in self.grid.axes().iter().enumerate() {
            v.extend(Axis::check(i, a.coords(), a.mult()));
        }
        for (lin, row) in self.values.iter().enumerate() {
            let idx = self.grid.index_of(lin);
            let en = BoxEnumeration::new(&self.grid.derivative_box(&idx));
            for k in en.elements().iter().skip(row.len()) {
                v.push(Violation::Missing { point: idx.clone(), k: k.clone() });
            }
        }
        v
    }

    /// Data restricted to a window of the grid.
    pub fn restrict(&self, ranges: &[Range<usize>]) -> Self {
        let sub = self.grid.subgrid(ranges);
        let values = sub
            .points()
            .map(|idx| {
                let full: Vec<usize> = idx.iter().zip(ranges).map(|(i, r)| i + r.start).collect();
                self.point_values(&full).to_vec()
            })
            .collect();
        HermiteData { grid: sub, values }
    }

    /// Same grid and multiplicities, coefficients converted with `f`.
    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> HermiteData<T> {
        HermiteData {
            grid: self.grid.map(f),
            values: self.values.iter().map(|r| r.iter().map(f).collect()).collect(),
        }
    }

    /// Parses the HGRID JSON record.
    pub fn from_hgrid_json(v: &Value) -> Result<Self> {
        let grid = GridSpec::from_json(v)?;
        let points = v
            .get("points")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("missing array field \"points\"".into()))?;
        let mut entries = Vec::with_capacity(points.len());
        for (pi, p) in points.iter().enumerate() {
            let idx: Vec<usize> = p
                .get("index")
                .cloned()
                .ok_or_else(|| Error::Parse(format!("points[{pi}]: missing \"index\"")))
                .and_then(|x| serde_json::from_value(x).map_err(|e| Error::Parse(format!("points[{pi}].index: {e}"))))?;
            let ts = p
                .get("t")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Parse(format!("points[{pi}]: missing array \"t\"")))?;
            let mut list = Vec::with_capacity(ts.len());
            for (ti, t) in ts.iter().enumerate() {
                let k: MultiIndex = t
                    .get("k")
                    .cloned()
                    .ok_or_else(|| Error::Parse(format!("points[{pi}].t[{ti}]: missing \"k\"")))
                    .and_then(|x| {
                        serde_json::from_value(x).map_err(|e| Error::Parse(format!("points[{pi}].t[{ti}].k: {e}")))
                    })?;
                let val = t
                    .get("value")
                    .ok_or_else(|| Error::Parse(format!("points[{pi}].t[{ti}]: missing \"value\"")))?;
                list.push((k, S::from_json(val)?));
            }
            entries.push((idx, list));
        }
        Self::from_entries(grid, entries)
    }

    pub fn to_hgrid_json(&self) -> Value {
        let axes: Vec<Value> =
            self.grid.axes().iter().map(|a| Value::Array(a.coords().iter().map(Scalar::to_json).collect())).collect();
        let mult: Vec<Value> = self.grid.axes().iter().map(|a| json!(a.mult())).collect();
        let mut cache = EnumCache::default();
        let points: Vec<Value> = self
            .grid
            .points()
            .map(|idx| {
                let en = cache.get(&self.grid.nu(&idx));
                let t: Vec<Value> = en
                    .elements()
                    .iter()
                    .zip(self.point_values(&idx))
                    .map(|(k, v)| json!({"k": k, "value": v.to_json()}))
                    .collect();
                json!({"index": idx, "t": t})
            })
            .collect();
        json!({"dims": self.n(), "axes": axes, "mult": mult, "points": points})
    }
}

impl<S: Scalar> DataSource<S> for HermiteData<S> {
    fn grid(&self) -> &GridSpec<S> {
        &self.grid
    }

    fn values(&self, idx: &[usize]) -> Result<Vec<S>> {
        Ok(self.point_values(idx).to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Rational};

    fn rat_axis(c: &[(i64, i64)], nu: u32) -> Axis<Rational> {
        Axis::uniform(c.iter().map(|&(a, b)| q(a, b)).collect(), nu).unwrap()
    }

    fn square(nu: u32) -> GridSpec<Rational> {
        GridSpec::new(vec![rat_axis(&[(0, 1), (1, 1)], nu), rat_axis(&[(0, 1), (1, 1)], nu)]).unwrap()
    }

    fn full_entries(grid: &GridSpec<Rational>) -> Vec<(Vec<usize>, Vec<(MultiIndex, Rational)>)> {
        grid.points()
            .map(|idx| {
                let ks = grid.derivative_box(&idx).enumerate();
                (idx, ks.into_iter().map(|k| (k, q(1, 1))).collect())
            })
            .collect()
    }

    #[test]
    fn complete_square_validates() {
        let g = square(2);
        let d = HermiteData::from_entries(g.clone(), full_entries(&g)).unwrap();
        assert!(d.validate().is_empty());
        assert_eq!(d.point_values(&[1, 0]).len(), 4);
    }

    #[test]
    fn missing_entry_is_named() {
        let g = square(2);
        let mut e = full_entries(&g);
        let last = e.iter_mut().find(|(i, _)| i == &vec![1, 1]).unwrap();
        last.1.retain(|(k, _)| k != &MultiIndex(vec![1, 1]));
        match HermiteData::from_entries(g, e) {
            Err(Error::Validation(v)) => {
                assert_eq!(v.len(), 1);
                assert_eq!(v[0].to_string(), "point (1,1): missing (1,1)");
            }
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_coordinate_is_reported() {
        let err = Axis::uniform(vec![q(0, 1), q(0, 1), q(1, 1)], 1).unwrap_err();
        assert_eq!(err.to_string(), "invalid Hermite data: axis 1: duplicate coordinate");
        assert!(Axis::<f64>::uniform(vec![1.0, 0.0], 1).is_err());
        assert!(Axis::<f64>::new(vec![0.0, 1.0], vec![1, 0]).is_err());
    }

    #[test]
    fn annihilators() {
        let a = rat_axis(&[(7, 10), (12, 10), (17, 10), (22, 10)], 2);
        let h = a.annihilator();
        assert_eq!(h.degree(), Some(8));
        let expect = UniPoly::from_roots(&[(q(7, 10), 2), (q(6, 5), 2), (q(17, 10), 2), (q(11, 5), 2)]);
        assert_eq!(h, expect);
        let b = rat_axis(&[(-1, 1), (0, 1), (1, 1)], 2);
        let p = b.annihilator();
        // (x+1)^2 x^2 (x-1)^2 = x^6 - 2x^4 + x^2
        assert_eq!(p, UniPoly::from_coeffs([0, 0, 1, 0, -2, 0, 1].iter().map(|&c| q(c, 1)).collect()));
        let c = rat_axis(&[(0, 1)], 1);
        assert_eq!(c.annihilator(), UniPoly::from_coeffs(vec![q(0, 1), q(1, 1)]));
        for node in 0..a.len() {
            for k in 0..2 {
                assert_eq!(h.nth_derivative(k).eval(a.coord(node)), q(0, 1));
            }
        }
    }

    #[test]
    fn nodal_bases() {
        let a = rat_axis(&[(0, 1), (1, 1)], 2);
        assert_eq!(a.nodal_basis(0), UniPoly::from_coeffs(vec![q(1, 1), q(-2, 1), q(1, 1)]));
        let b = rat_axis(&[(0, 1), (1, 1)], 1);
        assert_eq!(b.nodal_basis_at(0, &q(1, 1)).unwrap(), UniPoly::from_coeffs(vec![q(0, 1), q(1, 1)]));
        assert!(matches!(b.nodal_basis_at(0, &q(1, 2)), Err(Error::NotAGridNode { axis: 0 })));
        assert_eq!(rat_axis(&[(3, 1)], 3).nodal_basis(0), UniPoly::one());
    }

    #[test]
    fn nodal_basis_vanishes_with_running_multiplicity() {
        let ax = Axis::new(vec![q(0, 1), q(1, 2), q(2, 1), q(3, 1)], vec![1, 3, 2, 1]).unwrap();
        for node in 0..ax.len() {
            let h = ax.nodal_basis(node);
            assert_eq!(h.eval(ax.coord(node)), q(1, 1));
            for c in 0..ax.len() {
                if c == node {
                    continue;
                }
                for k in 0..ax.mult()[c] {
                    assert_eq!(h.nth_derivative(k).eval(ax.coord(c)), q(0, 1), "node {node} at {c} order {k}");
                }
            }
        }
    }

    #[test]
    fn hgrid_roundtrip() {
        let g = square(2);
        let d = HermiteData::from_fn(g, |idx, k| q((idx[0] * 10 + idx[1]) as i64 + k.total() as i64, 3));
        let v = d.to_hgrid_json();
        let back = HermiteData::<Rational>::from_hgrid_json(&v).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn restrict_and_index_arithmetic() {
        let g = GridSpec::new(vec![Axis::<f64>::unit(4, 1).unwrap(), Axis::unit(3, 2).unwrap()]).unwrap();
        assert_eq!(g.condition_count(), 4 * 6);
        for l in 0..g.num_points() {
            assert_eq!(g.linear_index(&g.index_of(l)), l);
        }
        let d = HermiteData::from_fn(g, |idx, k| (idx[0] * 100 + idx[1] * 10) as f64 + k.get(1) as f64);
        let r = d.restrict(&[1..3, 1..3]);
        assert_eq!(r.grid().shape(), vec![2, 2]);
        assert_eq!(r.point_values(&[0, 0]), &[110.0, 111.0]);
        assert!(d.grid().check_inside(&[3.5, 0.0]).is_err());
    }
}
