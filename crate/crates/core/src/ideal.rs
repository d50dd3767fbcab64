//! Cascaded division by the axis annihilators `H_1, …, H_n`.
//!
//! The annihilators generate the ideal of polynomials whose prescribed
//! derivatives all vanish on the grid, and they already form a reduced
//! Gröbner basis of it (their leading terms are pure powers `x_i^{deg H_i}`,
//! whatever the monomial order). Dividing a polynomial `g` by them in turn
//! leaves the Hermite interpolant of `g` as the remainder.

use std::sync::OnceLock;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, HermiteData};
use crate::interpolant::{interpolate, HermiteInterpolant};
use crate::polyring::{MultiPoly, UniPoly};
use crate::scalar::Scalar;

/// Relative threshold for float membership: remainder coefficients below
/// `MEMBERSHIP_REL · max|g|` count as zero.
pub const MEMBERSHIP_REL: f64 = 1e-10;

/// `g = r_n + Σ H_i q_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct DivisionResult<S: Scalar> {
    pub remainder: MultiPoly<S>,
    /// `quotients[i]` multiplies `H_i` (indexed by axis, not by division step).
    pub quotients: Vec<MultiPoly<S>>,
    pub order: Vec<usize>,
}

impl<S: Scalar> DivisionResult<S> {
    pub fn to_json(&self) -> Value {
        json!({
            "remainder": self.remainder.to_json(),
            "quotients": self.quotients.iter().map(MultiPoly::to_json).collect::<Vec<_>>(),
            "order": self.order.iter().map(|i| i + 1).collect::<Vec<_>>(),
        })
    }

    /// `Σ H_i q_i` over the grid's annihilators.
    pub fn ideal_part(&self, grid: &GridSpec<S>) -> Result<MultiPoly<S>> {
        let n = grid.n();
        let mut acc = MultiPoly::zero(n);
        for (i, q) in self.quotients.iter().enumerate() {
            let h = MultiPoly::from_uni(n, i, &grid.axis(i).annihilator());
            acc = acc.add(&h.mul(q)?)?;
        }
        Ok(acc)
    }
}

fn check_order(n: usize, order: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    for &i in order {
        if i >= n || seen[i] {
            return Err(Error::Parse(format!("division order must be a permutation of 1..={n}")));
        }
        seen[i] = true;
    }
    if order.len() != n {
        return Err(Error::Parse(format!("division order must be a permutation of 1..={n}")));
    }
    Ok(())
}

/// Divides by `H_i` for each axis in `order` (identity when `None`).
pub fn cascaded_divide<S: Scalar>(
    g: &MultiPoly<S>,
    grid: &GridSpec<S>,
    order: Option<&[usize]>,
) -> Result<DivisionResult<S>> {
    let n = grid.n();
    if g.n() != n {
        return Err(Error::DimensionMismatch { expected: n, found: g.n() });
    }
    let order: Vec<usize> = order.map(<[usize]>::to_vec).unwrap_or_else(|| (0..n).collect());
    check_order(n, &order)?;
    let mut quotients = vec![MultiPoly::zero(n); n];
    let mut r = g.clone();
    for &i in &order {
        let (q, rem) = r.divide_by_axis(&grid.axis(i).annihilator(), i)?;
        quotients[i] = q;
        r = rem;
    }
    Ok(DivisionResult { remainder: r, quotients, order })
}

/// `t_a^k = ∂^k g(a)` for every condition of the grid.
pub fn sample_polynomial<S: Scalar>(g: &MultiPoly<S>, grid: &GridSpec<S>) -> Result<HermiteData<S>> {
    if g.n() != grid.n() {
        return Err(Error::DimensionMismatch { expected: grid.n(), found: g.n() });
    }
    HermiteData::try_from_fn(grid.clone(), |idx, k| g.differentiate(k)?.eval(&grid.coordinate(idx)))
}

/// The interpolant of `g`'s derivative data, obtained as the cascaded
/// remainder. Its expanded form is the remainder itself.
pub fn interpolate_polynomial<S: Scalar>(g: &MultiPoly<S>, grid: &GridSpec<S>) -> Result<HermiteInterpolant<S>> {
    let div = cascaded_divide(g, grid, None)?;
    let data = sample_polynomial(&div.remainder, grid)?;
    let f = interpolate(&data);
    let cell = OnceLock::new();
    let _ = cell.set(div.remainder);
    Ok(f.with_expanded(cell))
}

/// Membership verdict with the size of the remainder.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Membership {
    pub member: bool,
    /// Largest remainder coefficient magnitude.
    pub residual: f64,
}

/// `g ∈ (H_1, …, H_n)` iff the cascaded remainder vanishes. Exact scalars
/// compare with zero; floats use [`MEMBERSHIP_REL`].
pub fn ideal_member<S: Scalar>(g: &MultiPoly<S>, grid: &GridSpec<S>) -> Result<Membership> {
    let div = cascaded_divide(g, grid, None)?;
    let residual = div.remainder.max_abs_coeff();
    let member = if S::EXACT { div.remainder.is_zero() } else { residual < MEMBERSHIP_REL * g.max_abs_coeff() };
    Ok(Membership { member, residual })
}

/// Cross-check: every prescribed derivative of `g` vanishes on the grid.
pub fn vanishes_on_grid<S: Scalar>(g: &MultiPoly<S>, grid: &GridSpec<S>) -> Result<bool> {
    let data = sample_polynomial(g, grid)?;
    Ok(grid.points().all(|idx| data.point_values(&idx).iter().all(Scalar::is_zero)))
}

/// `{H_1(x_1), …, H_n(x_n)}`.
pub fn groebner_basis<S: Scalar>(grid: &GridSpec<S>) -> Vec<UniPoly<S>> {
    grid.axes().iter().map(|a| a.annihilator()).collect()
}

/// The basis as polynomial records, with a note on the monomial order.
pub fn groebner_basis_json<S: Scalar>(grid: &GridSpec<S>) -> Value {
    let n = grid.n();
    let polys: Vec<Value> = groebner_basis(grid)
        .iter()
        .enumerate()
        .map(|(i, h)| MultiPoly::from_uni(n, i, h).to_json())
        .collect();
    json!({
        "basis": polys,
        "note": "leading terms are pure powers of distinct variables, so the set is a reduced Groebner basis for every monomial order",
    })
}
