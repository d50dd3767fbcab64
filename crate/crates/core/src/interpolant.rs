//! Construction and evaluation of the Hermite interpolant.
//!
//! Every basis polynomial is separable,
//!
//! ```text
//! H_{(a,k)}(x) = ∏_i φ_{a_i,k_i}(x_i),   φ_{a,k}(x) = (x − a)^k H_a(x) / k!,
//! ```
//!
//! so the interpolant `f = Σ_a ξ_aᵀ H_a` is stored as a dense coefficient
//! tensor over per-axis *slots* (one slot per pair `(node, k)`, so axis `i`
//! has `Σ ν_i(a)` slots). Evaluation contracts that tensor against the
//! per-axis basis values, which are computed from the root-product form of
//! `H_a` with truncated Taylor arithmetic. Nothing on the evaluation path
//! touches expanded monomials, so high degrees stay accurate in `f64`.
//!
//! The coefficients `ξ_a` solve `Λ_a ξ_a = T_a`, where `Λ_a` is lower
//! unitriangular in grevlex order.

use std::sync::{Arc, OnceLock};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::grid::{Axis, EnumCache, GridSpec, HermiteData};
use crate::multiindex::{leq_partial, BoxEnumeration, MultiIndex};
use crate::polyring::{FactoredTerm, MultiPoly, UniPoly};
use crate::scalar::Scalar;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Size limit of the monomial-basis oracle system.
pub const VANDERMONDE_LIMIT: usize = 512;

/// Per-axis basis: slot layout and root-product data for every `φ_{a,k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AxisBasis<S: Scalar> {
    axis: Axis<S>,
    offsets: Vec<usize>,
    // ∏_{c≠a} (a − c)^{−ν(c)} per node
    weights: Vec<S>,
}

impl<S: Scalar> AxisBasis<S> {
    pub fn new(axis: &Axis<S>) -> Self {
        let mut offsets = Vec::with_capacity(axis.len());
        let mut acc = 0;
        for &m in axis.mult() {
            offsets.push(acc);
            acc += m as usize;
        }
        let weights = (0..axis.len())
            .map(|j| {
                let a = axis.coord(j);
                let mut w = S::one();
                for (c, (x, &m)) in axis.coords().iter().zip(axis.mult()).enumerate() {
                    if c != j {
                        w = w * (a.clone() - x.clone()).powi(m);
                    }
                }
                S::one() / w
            })
            .collect();
        AxisBasis { axis: axis.clone(), offsets, weights }
    }

    pub fn axis(&self) -> &Axis<S> {
        &self.axis
    }

    pub fn slots(&self) -> usize {
        self.axis.total_mult()
    }

    pub fn slot(&self, node: usize, k: u32) -> usize {
        self.offsets[node] + k as usize
    }

    /// Expanded `φ_{node,k}`.
    pub fn phi(&self, node: usize, k: u32) -> UniPoly<S> {
        let a = self.axis.coord(node).clone();
        self.axis
            .nodal_basis(node)
            .mul(&UniPoly::linear_root(a).pow(k))
            .scale(&(S::one() / S::factorial(k)))
    }

    /// Taylor coefficients (up to `t^order`) of `φ_{node,k}` about `x` for
    /// `k = 0..ν(node)`, written to `out[k][t]`.
    fn taylor_node(&self, node: usize, x: &S, order: usize, out: &mut [Vec<S>]) {
        let mut s = vec![S::zero(); order + 1];
        s[0] = self.weights[node].clone();
        for (c, (cx, &m)) in self.axis.coords().iter().zip(self.axis.mult()).enumerate() {
            if c == node {
                continue;
            }
            let u = x.clone() - cx.clone();
            for _ in 0..m {
                mul_linear(&mut s, &u);
            }
        }
        let u = x.clone() - self.axis.coord(node).clone();
        let nu = self.axis.mult()[node] as usize;
        for (k, slot) in out.iter_mut().enumerate().take(nu) {
            if k > 0 {
                mul_linear(&mut s, &u);
                let inv = S::one() / S::from_i64(k as i64);
                for v in s.iter_mut() {
                    *v = v.clone() * inv.clone();
                }
            }
            slot.clear();
            slot.extend(s.iter().cloned());
        }
    }

    /// `φ_s^{(d)}(x)` for every slot `s`.
    pub fn derivative_values(&self, x: &S, d: u32) -> Vec<S> {
        let order = d as usize;
        let mut buf = vec![Vec::new(); self.axis.max_mult() as usize];
        let mut out = Vec::with_capacity(self.slots());
        let fact = S::factorial(d);
        for node in 0..self.axis.len() {
            self.taylor_node(node, x, order, &mut buf);
            for row in buf.iter().take(self.axis.mult()[node] as usize) {
                out.push(row[order].clone() * fact.clone());
            }
        }
        out
    }

    /// One-dimensional coupling block at a node: `L[j][i] = φ_{node,i}^{(j)}(a)`.
    pub fn local_block(&self, node: usize) -> Vec<Vec<S>> {
        let nu = self.axis.mult()[node] as usize;
        let mut buf = vec![Vec::new(); nu];
        self.taylor_node(node, self.axis.coord(node), nu - 1, &mut buf);
        (0..nu).map(|j| (0..nu).map(|i| buf[i][j].clone() * S::factorial(j as u32)).collect()).collect()
    }
}

// s ← s·(u + t), truncated to s.len() terms
fn mul_linear<S: Scalar>(s: &mut [S], u: &S) {
    for d in (0..s.len()).rev() {
        let lower = if d > 0 { s[d - 1].clone() } else { S::zero() };
        s[d] = s[d].clone() * u.clone() + lower;
    }
}

/// The basis `H_{(a,k)}` of a grid, in factored form.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisSet<S: Scalar> {
    grid: GridSpec<S>,
    axes: Vec<AxisBasis<S>>,
}

impl<S: Scalar> BasisSet<S> {
    pub fn grid(&self) -> &GridSpec<S> {
        &self.grid
    }

    pub fn axis(&self, i: usize) -> &AxisBasis<S> {
        &self.axes[i]
    }

    pub fn dims(&self) -> Vec<usize> {
        self.axes.iter().map(AxisBasis::slots).collect()
    }

    /// `H_{(a,k)}` for the point at `idx`.
    pub fn term(&self, idx: &[usize], k: &MultiIndex) -> FactoredTerm<S> {
        let factors = self.axes.iter().enumerate().map(|(i, ab)| Some(ab.phi(idx[i], k.get(i)))).collect();
        FactoredTerm::new(S::one(), factors)
    }

    /// All `H_{(a,k)}` of one point, grevlex order.
    pub fn point_terms(&self, idx: &[usize]) -> Vec<FactoredTerm<S>> {
        self.grid.derivative_box(idx).enumerate().iter().map(|k| self.term(idx, k)).collect()
    }

    fn slot_index(&self, idx: &[usize], k: &MultiIndex) -> usize {
        self.axes.iter().enumerate().fold(0, |acc, (i, ab)| acc * ab.slots() + ab.slot(idx[i], k.get(i)))
    }
}

pub fn build_basis<S: Scalar>(grid: &GridSpec<S>) -> BasisSet<S> {
    BasisSet { grid: grid.clone(), axes: grid.axes().iter().map(AxisBasis::new).collect() }
}

/// `Λ_a` with rows and columns in grevlex order of `[0, ν(a) − 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaMatrix<S: Scalar> {
    order: Arc<BoxEnumeration>,
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> LambdaMatrix<S> {
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn order(&self) -> &[MultiIndex] {
        self.order.elements()
    }

    pub fn rows(&self) -> &[Vec<S>] {
        &self.rows
    }

    pub fn get(&self, row: usize, col: usize) -> &S {
        &self.rows[row][col]
    }

    pub fn is_lower_unitriangular(&self) -> bool {
        self.rows.iter().enumerate().all(|(r, row)| {
            row.iter().enumerate().all(|(c, v)| match c.cmp(&r) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Equal => *v == S::one(),
                std::cmp::Ordering::Greater => v.is_zero(),
            })
        })
    }

    /// Forward substitution; the diagonal is one.
    pub fn solve(&self, t: &[S]) -> Vec<S> {
        let m = self.size();
        let mut xi: Vec<S> = Vec::with_capacity(m);
        for r in 0..m {
            let mut acc = t[r].clone();
            for (c, x) in xi.iter().enumerate() {
                let l = &self.rows[r][c];
                if !l.is_zero() {
                    acc = acc - l.clone() * x.clone();
                }
            }
            xi.push(acc);
        }
        xi
    }

    /// `Σ_{i<m} (I − Λ)^i T`, which terminates because `I − Λ` is nilpotent.
    pub fn neumann_solve(&self, t: &[S]) -> Vec<S> {
        let m = self.size();
        let mut term = t.to_vec();
        let mut sum = t.to_vec();
        for _ in 1..m {
            let next: Vec<S> = (0..m)
                .map(|r| {
                    let mut acc = S::zero();
                    for c in 0..r {
                        let l = &self.rows[r][c];
                        if !l.is_zero() {
                            acc = acc - l.clone() * term[c].clone();
                        }
                    }
                    acc
                })
                .collect();
            term = next;
            for (s, v) in sum.iter_mut().zip(&term) {
                *s = s.clone() + v.clone();
            }
        }
        sum
    }

    pub fn inverse(&self) -> Vec<Vec<S>> {
        let m = self.size();
        let cols: Vec<Vec<S>> = (0..m)
            .map(|c| {
                let mut e = vec![S::zero(); m];
                e[c] = S::one();
                self.solve(&e)
            })
            .collect();
        (0..m).map(|r| (0..m).map(|c| cols[c][r].clone()).collect()).collect()
    }
}

/// `Λ_a` for the point at `idx`: entry `(j, i)` is `∂^j H_{(a,i)}(a)` when
/// `i ≤ j` componentwise and zero otherwise.
pub fn build_lambda<S: Scalar>(basis: &BasisSet<S>, idx: &[usize]) -> LambdaMatrix<S> {
    let nu = basis.grid.nu(idx);
    let order = Arc::new(BoxEnumeration::new(&crate::multiindex::IndexBox::from_multiplicity(&nu)));
    lambda_with_order(basis, idx, order)
}

fn lambda_with_order<S: Scalar>(basis: &BasisSet<S>, idx: &[usize], order: Arc<BoxEnumeration>) -> LambdaMatrix<S> {
    let blocks: Vec<Vec<Vec<S>>> = basis.axes.iter().enumerate().map(|(i, ab)| ab.local_block(idx[i])).collect();
    let ks = order.elements();
    let rows = ks
        .iter()
        .map(|j| {
            ks.iter()
                .map(|i| {
                    if !leq_partial(i, j).expect("same box") {
                        return S::zero();
                    }
                    blocks
                        .iter()
                        .enumerate()
                        .fold(S::one(), |acc, (ax, b)| acc * b[j.get(ax) as usize][i.get(ax) as usize].clone())
                })
                .collect()
        })
        .collect();
    LambdaMatrix { order, rows }
}

pub fn solve_coefficients<S: Scalar>(lambda: &LambdaMatrix<S>, t: &[S]) -> Result<Vec<S>> {
    if t.len() != lambda.size() {
        return Err(Error::DimensionMismatch { expected: lambda.size(), found: t.len() });
    }
    Ok(lambda.solve(t))
}

/// A built interpolant: coefficient tensor over per-axis slots plus the basis.
#[derive(Clone, Debug)]
pub struct HermiteInterpolant<S: Scalar> {
    basis: BasisSet<S>,
    coef: Vec<S>,
    expanded: OnceLock<MultiPoly<S>>,
}

impl<S: Scalar> PartialEq for HermiteInterpolant<S> {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis && self.coef == other.coef
    }
}

pub fn interpolate<S: Scalar>(data: &HermiteData<S>) -> HermiteInterpolant<S> {
    let basis = build_basis(data.grid());
    let dims = basis.dims();
    let mut coef = vec![S::zero(); dims.iter().product()];
    let mut cache = EnumCache::default();
    for idx in data.grid().points() {
        let order = cache.get(&data.grid().nu(&idx));
        let lambda = lambda_with_order(&basis, &idx, order.clone());
        let xi = lambda.solve(data.point_values(&idx));
        for (k, v) in order.elements().iter().zip(xi) {
            coef[basis.slot_index(&idx, k)] = v;
        }
    }
    HermiteInterpolant { basis, coef, expanded: OnceLock::new() }
}

impl<S: Scalar> HermiteInterpolant<S> {
    pub fn n(&self) -> usize {
        self.basis.grid.n()
    }

    pub fn grid(&self) -> &GridSpec<S> {
        &self.basis.grid
    }

    pub fn basis(&self) -> &BasisSet<S> {
        &self.basis
    }

    /// `ξ_a` in grevlex order of the point's derivative box.
    pub fn xi(&self, idx: &[usize]) -> Vec<S> {
        let ks = self.grid().derivative_box(idx).enumerate();
        ks.iter().map(|k| self.coef[self.basis.slot_index(idx, k)].clone()).collect()
    }

    /// `∂^k f(x)`.
    pub fn eval(&self, x: &[S], k: &MultiIndex) -> Result<S> {
        let mut scratch = Vec::new();
        self.eval_with(x, k, &mut scratch)
    }

    pub fn value(&self, x: &[S]) -> Result<S> {
        self.eval(x, &MultiIndex::zeros(self.n()))
    }

    fn eval_with(&self, x: &[S], k: &MultiIndex, scratch: &mut Vec<S>) -> Result<S> {
        let n = self.n();
        if x.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: x.len() });
        }
        if k.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: k.len() });
        }
        let vals: Vec<Vec<S>> =
            self.basis.axes.iter().enumerate().map(|(i, ab)| ab.derivative_values(&x[i], k.get(i))).collect();
        Ok(contract(&self.coef, &self.basis.dims(), &vals, scratch))
    }

    /// `∂^k f` at every point. Runs in parallel with the `parallel` feature;
    /// results do not depend on the thread count.
    pub fn eval_batch(&self, points: &[Vec<S>], k: &MultiIndex) -> Result<Vec<S>> {
        #[cfg(feature = "parallel")]
        {
            points.par_iter().map_init(Vec::new, |scratch, x| self.eval_with(x, k, scratch)).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            self.eval_batch_sequential(points, k)
        }
    }

    pub fn eval_batch_sequential(&self, points: &[Vec<S>], k: &MultiIndex) -> Result<Vec<S>> {
        let mut scratch = Vec::new();
        points.iter().map(|x| self.eval_with(x, k, &mut scratch)).collect()
    }

    pub(crate) fn with_expanded(mut self, expanded: OnceLock<MultiPoly<S>>) -> Self {
        self.expanded = expanded;
        self
    }

    /// Monomial expansion, computed once.
    pub fn expanded(&self) -> &MultiPoly<S> {
        self.expanded.get_or_init(|| {
            let polys: Vec<Vec<UniPoly<S>>> = self
                .basis
                .axes
                .iter()
                .map(|ab| {
                    (0..ab.axis.len()).flat_map(|node| (0..ab.axis.mult()[node]).map(move |k| ab.phi(node, k))).collect()
                })
                .collect();
            expand_tensor(&self.coef, &self.basis.dims(), &polys)
        })
    }

    /// `Σ_a ξ_aᵀ H_a` as a list of factored terms (zero coefficients skipped).
    pub fn factored_terms(&self) -> Vec<FactoredTerm<S>> {
        let mut out = Vec::new();
        for idx in self.grid().points() {
            let ks = self.grid().derivative_box(&idx).enumerate();
            for (k, xi) in ks.iter().zip(self.xi(&idx)) {
                if !xi.is_zero() {
                    let mut t = self.basis.term(&idx, k);
                    t.scalar = xi;
                    out.push(t);
                }
            }
        }
        out
    }

    /// Checks every interpolation condition; returns the largest absolute
    /// residual `|∂^k f(a) − t_a^k|`.
    pub fn max_residual(&self, data: &HermiteData<S>) -> Result<f64> {
        let mut worst = 0.0f64;
        for idx in data.grid().points() {
            let a = data.grid().coordinate(&idx);
            let ks = data.grid().derivative_box(&idx).enumerate();
            for (k, t) in ks.iter().zip(data.point_values(&idx)) {
                let v = self.eval(&a, k)?;
                worst = worst.max((v - t.clone()).magnitude());
            }
        }
        Ok(worst)
    }

    /// `{"dims", "axes", "mult", "points": [{"index", "basis", "xi"}]}`; `basis`
    /// lists the multi-indices `k` of `H_{(a,k)}` in the order of `xi`.
    pub fn to_factored_json(&self) -> Value {
        let g = self.grid();
        let axes: Vec<Value> = g.axes().iter().map(|a| Value::Array(a.coords().iter().map(Scalar::to_json).collect())).collect();
        let mult: Vec<Value> = g.axes().iter().map(|a| json!(a.mult())).collect();
        let points: Vec<Value> = g
            .points()
            .map(|idx| {
                let ks = g.derivative_box(&idx).enumerate();
                let xi: Vec<Value> = self.xi(&idx).iter().map(Scalar::to_json).collect();
                json!({"index": idx, "basis": ks, "xi": xi})
            })
            .collect();
        json!({"dims": g.n(), "axes": axes, "mult": mult, "points": points})
    }

    pub fn from_factored_json(v: &Value) -> Result<Self> {
        // the layout matches HGRID with "xi" in place of "t"
        let mut as_grid = v.clone();
        if let Some(points) = as_grid.get_mut("points").and_then(Value::as_array_mut) {
            for p in points {
                let ks = p.get("basis").cloned().unwrap_or(Value::Null);
                let xi = p.get("xi").cloned().unwrap_or(Value::Null);
                let (Value::Array(ks), Value::Array(xi)) = (ks, xi) else {
                    return Err(Error::Parse("each point needs \"basis\" and \"xi\" arrays".into()));
                };
                if ks.len() != xi.len() {
                    return Err(Error::Parse("\"basis\" and \"xi\" lengths differ".into()));
                }
                let t: Vec<Value> = ks.into_iter().zip(xi).map(|(k, x)| json!({"k": k, "value": x})).collect();
                p["t"] = Value::Array(t);
            }
        }
        let coeffs = HermiteData::<S>::from_hgrid_json(&as_grid)?;
        let basis = build_basis(coeffs.grid());
        let dims = basis.dims();
        let mut coef = vec![S::zero(); dims.iter().product()];
        for idx in coeffs.grid().points() {
            let ks = coeffs.grid().derivative_box(&idx).enumerate();
            for (k, x) in ks.iter().zip(coeffs.point_values(&idx)) {
                coef[basis.slot_index(&idx, k)] = x.clone();
            }
        }
        Ok(HermiteInterpolant { basis, coef, expanded: OnceLock::new() })
    }
}

/// `Σ_s coef[s] ∏_i vals[i][s_i]`, contracting the last axis first.
fn contract<S: Scalar>(coef: &[S], dims: &[usize], vals: &[Vec<S>], scratch: &mut Vec<S>) -> S {
    let n = dims.len();
    let last = dims[n - 1];
    let outer = coef.len() / last;
    scratch.clear();
    let v = &vals[n - 1];
    for o in 0..outer {
        let row = &coef[o * last..(o + 1) * last];
        let mut acc = S::zero();
        for (c, w) in row.iter().zip(v) {
            acc = acc + c.clone() * w.clone();
        }
        scratch.push(acc);
    }
    let mut len = outer;
    for ax in (0..n - 1).rev() {
        let d = dims[ax];
        let v = &vals[ax];
        let new_len = len / d;
        for o in 0..new_len {
            let mut acc = S::zero();
            for j in 0..d {
                acc = acc + scratch[o * d + j].clone() * v[j].clone();
            }
            scratch[o] = acc;
        }
        len = new_len;
    }
    scratch[0].clone()
}

/// Expands `Σ_s coef[s] ∏_i polys[i][s_i](x_i)` into monomials by one mode
/// product per axis.
pub(crate) fn expand_tensor<S: Scalar>(coef: &[S], dims: &[usize], polys: &[Vec<UniPoly<S>>]) -> MultiPoly<S> {
    let n = dims.len();
    let mut shape = dims.to_vec();
    let mut t = coef.to_vec();
    for ax in 0..n {
        let e = polys[ax].iter().map(|p| p.coeffs().len()).max().unwrap_or(0).max(1);
        let d = shape[ax];
        let inner: usize = shape[ax + 1..].iter().product();
        let outer: usize = shape[..ax].iter().product();
        let mut next = vec![S::zero(); outer * e * inner];
        for o in 0..outer {
            for s in 0..d {
                let p = &polys[ax][s];
                for i in 0..inner {
                    let c = &t[(o * d + s) * inner + i];
                    if c.is_zero() {
                        continue;
                    }
                    for (deg, pc) in p.coeffs().iter().enumerate() {
                        let slot = &mut next[(o * e + deg) * inner + i];
                        *slot = slot.clone() + c.clone() * pc.clone();
                    }
                }
            }
        }
        t = next;
        shape[ax] = e;
    }
    let mut out = MultiPoly::zero(n);
    for (lin, c) in t.into_iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut e = vec![0u32; n];
        let mut rem = lin;
        for ax in (0..n).rev() {
            e[ax] = (rem % shape[ax]) as u32;
            rem /= shape[ax];
        }
        out.add_term(MultiIndex(e), c);
    }
    let mut out = out;
    out.prune(0.0);
    out
}

/// Data tensor in slot layout: `t_a^k` at slot `(a_i, k_i)` per axis.
fn data_tensor<S: Scalar>(data: &HermiteData<S>, basis: &BasisSet<S>) -> Vec<S> {
    let mut t = vec![S::zero(); basis.dims().iter().product()];
    for idx in data.grid().points() {
        let ks = data.grid().derivative_box(&idx).enumerate();
        for (k, v) in ks.iter().zip(data.point_values(&idx)) {
            t[basis.slot_index(&idx, k)] = v.clone();
        }
    }
    t
}

/// Oracle from the tensor-product fundamental polynomials
/// `H_a^k(x) = H_a(x) (x − a)^k / k! Σ_{t<ν−k} c_t (x − a)^t`, where `c_t` are the
/// Taylor coefficients of `1/H_a` about `a`.
pub fn spitzbart_interpolate<S: Scalar>(data: &HermiteData<S>) -> Result<MultiPoly<S>> {
    let basis = build_basis(data.grid());
    let mut polys = Vec::with_capacity(data.n());
    for ax in data.grid().axes() {
        let mut list = Vec::with_capacity(ax.total_mult());
        for node in 0..ax.len() {
            let a = ax.coord(node).clone();
            let h = ax.nodal_basis(node);
            let nu = ax.mult()[node];
            let c = h.series_inverse_at(&a, nu as usize - 1)?;
            for k in 0..nu {
                let tail = UniPoly::from_coeffs(c[..(nu - k) as usize].to_vec());
                // Σ c_t (x−a)^t as a polynomial in x
                let mut shifted = UniPoly::zero();
                let mut pw = UniPoly::one();
                for ct in tail.coeffs() {
                    shifted = shifted.add(&pw.scale(ct));
                    pw = pw.mul(&UniPoly::linear_root(a.clone()));
                }
                let f = h
                    .mul(&UniPoly::linear_root(a.clone()).pow(k))
                    .mul(&shifted)
                    .scale(&(S::one() / S::factorial(k)));
                list.push(f);
            }
        }
        polys.push(list);
    }
    Ok(expand_tensor(&data_tensor(data, &basis), &basis.dims(), &polys))
}

/// Oracle by direct solution of the confluent Vandermonde system in the
/// monomial basis `x^e`, `e_i < Σ ν_i(a)`.
pub fn vandermonde_interpolate<S: Scalar>(data: &HermiteData<S>) -> Result<MultiPoly<S>> {
    let grid = data.grid();
    let size = grid.condition_count();
    if size > VANDERMONDE_LIMIT {
        return Err(Error::SystemTooLarge { size, limit: VANDERMONDE_LIMIT });
    }
    let dims: Vec<usize> = grid.axes().iter().map(Axis::total_mult).collect();
    let n = grid.n();
    let exps: Vec<Vec<u32>> = (0..size)
        .map(|mut lin| {
            let mut e = vec![0u32; n];
            for ax in (0..n).rev() {
                e[ax] = (lin % dims[ax]) as u32;
                lin /= dims[ax];
            }
            e
        })
        .collect();
    let mut rows: Vec<Vec<S>> = Vec::with_capacity(size);
    let mut rhs: Vec<S> = Vec::with_capacity(size);
    for idx in grid.points() {
        let a = grid.coordinate(&idx);
        // per-axis tables ∂^k x^e at a_i
        let tables: Vec<Vec<Vec<S>>> = (0..n)
            .map(|ax| {
                let kmax = grid.axis(ax).mult()[idx[ax]];
                (0..kmax).map(|k| (0..dims[ax] as u32).map(|e| monomial_derivative(&a[ax], e, k)).collect()).collect()
            })
            .collect();
        let ks = grid.derivative_box(&idx).enumerate();
        for (k, t) in ks.iter().zip(data.point_values(&idx)) {
            rows.push(
                exps.iter()
                    .map(|e| (0..n).fold(S::one(), |acc, ax| acc * tables[ax][k.get(ax) as usize][e[ax] as usize].clone()))
                    .collect(),
            );
            rhs.push(t.clone());
        }
    }
    let sol = gauss_solve(rows, rhs)?;
    MultiPoly::from_terms(n, exps.into_iter().zip(sol).map(|(e, c)| (MultiIndex(e), c)))
}

fn monomial_derivative<S: Scalar>(x: &S, e: u32, k: u32) -> S {
    if k > e {
        return S::zero();
    }
    let falling = (0..k).fold(S::one(), |acc, j| acc * S::from_i64((e - j) as i64));
    falling * x.powi(e - k)
}

fn gauss_solve<S: Scalar>(mut a: Vec<Vec<S>>, mut b: Vec<S>) -> Result<Vec<S>> {
    let m = b.len();
    for col in 0..m {
        let pivot = if S::EXACT {
            (col..m).find(|&r| !a[r][col].is_zero())
        } else {
            (col..m).filter(|&r| !a[r][col].is_zero()).max_by(|&r, &s| {
                a[r][col].magnitude().partial_cmp(&a[s][col].magnitude()).unwrap_or(std::cmp::Ordering::Equal)
            })
        }
        .ok_or(Error::SingularSystem)?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = S::one() / a[col][col].clone();
        let (top, bottom) = a.split_at_mut(col + 1);
        let prow = &top[col];
        for (off, row) in bottom.iter_mut().enumerate() {
            let r = col + 1 + off;
            if row[col].is_zero() {
                continue;
            }
            let f = row[col].clone() * inv.clone();
            for c in col..m {
                if !prow[c].is_zero() {
                    row[c] = row[c].clone() - f.clone() * prow[c].clone();
                }
            }
            b[r] = b[r].clone() - f * b[col].clone();
        }
    }
    let mut x = vec![S::zero(); m];
    for r in (0..m).rev() {
        let mut acc = b[r].clone();
        for c in r + 1..m {
            if !a[r][c].is_zero() {
                acc = acc - a[r][c].clone() * x[c].clone();
            }
        }
        x[r] = acc / a[r][r].clone();
    }
    Ok(x)
}
