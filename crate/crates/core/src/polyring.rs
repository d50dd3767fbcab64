//! Univariate and multivariate polynomials over a [`Scalar`] ring.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::multiindex::MultiIndex;
use crate::scalar::Scalar;

/// Relative threshold below which float coefficients are dropped after division.
pub const FLOAT_PRUNE_REL: f64 = 1e-12;

/// Dense univariate polynomial, lowest degree first. Trailing zeros are trimmed.
#[derive(Clone, Debug, PartialEq)]
pub struct UniPoly<S: Scalar> {
    coeffs: Vec<S>,
}

impl<S: Scalar> UniPoly<S> {
    pub fn from_coeffs(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: S) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(S::one())
    }

    /// `x − a`.
    pub fn linear_root(a: S) -> Self {
        UniPoly { coeffs: vec![-a, S::one()] }
    }

    /// `∏ (x − r)^m` over `(r, m)` pairs.
    pub fn from_roots(roots: &[(S, u32)]) -> Self {
        let mut p = Self::one();
        for (r, m) in roots {
            for _ in 0..*m {
                p = p.mul(&Self::linear_root(r.clone()));
            }
        }
        p
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> S {
        self.coeffs.get(i).cloned().unwrap_or_else(S::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&S> {
        self.coeffs.last()
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs((0..len).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs((0..len).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![S::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Self::from_coeffs(out)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs.iter().enumerate().skip(1).map(|(i, c)| c.clone() * S::from_i64(i as i64)).collect(),
        )
    }

    pub fn nth_derivative(&self, k: u32) -> Self {
        (0..k).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn eval(&self, x: &S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x.clone() + c.clone();
        }
        acc
    }

    /// Coefficients of `p(a + t)` in powers of `t`.
    pub fn taylor_shift(&self, a: &S) -> Vec<S> {
        let mut b = self.coeffs.clone();
        let d = b.len();
        for i in 0..d {
            for j in (i..d.saturating_sub(1)).rev() {
                b[j] = b[j].clone() + a.clone() * b[j + 1].clone();
            }
        }
        b
    }

    /// Taylor coefficients `c_0..=c_order` of `1/h` about `a`.
    pub fn series_inverse_at(&self, a: &S, order: usize) -> Result<Vec<S>> {
        let b = self.taylor_shift(a);
        let b0 = match b.first() {
            Some(v) if !v.is_zero() => v.clone(),
            _ => return Err(Error::SingularInversion),
        };
        let mut c: Vec<S> = Vec::with_capacity(order + 1);
        c.push(S::one() / b0.clone());
        for t in 1..=order {
            let mut acc = S::zero();
            for j in 1..=t.min(b.len().saturating_sub(1)) {
                acc = acc + b[j].clone() * c[t - j].clone();
            }
            c.push(-acc / b0.clone());
        }
        Ok(c)
    }

    /// Euclidean division: `self = d·q + r` with `deg r < deg d`.
    pub fn div_rem(&self, d: &Self) -> Result<(Self, Self)> {
        let dd = d.degree().ok_or(Error::ZeroDivisor)?;
        let lc = d.coeffs[dd].clone();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut q = vec![S::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = r[i + dd].clone() / lc.clone();
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[i + j] = r[i + j].clone() - c.clone() * dc.clone();
                }
            }
            r[i + dd] = S::zero();
            q[i] = c;
        }
        r.truncate(dd);
        Ok((Self::from_coeffs(q), Self::from_coeffs(r)))
    }
}

impl<S: Scalar> fmt::Display for UniPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("{c}*x"),
                _ => format!("{c}*x^{i}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Sparse multivariate polynomial: exponent → nonzero coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiPoly<S: Scalar> {
    n: usize,
    terms: BTreeMap<MultiIndex, S>,
}

impl<S: Scalar> MultiPoly<S> {
    pub fn zero(n: usize) -> Self {
        MultiPoly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: S) -> Self {
        let mut p = Self::zero(n);
        p.add_term(MultiIndex::zeros(n), c);
        p
    }

    /// The coordinate function `x_axis`.
    pub fn var(n: usize, axis: usize) -> Self {
        let mut p = Self::zero(n);
        p.add_term(MultiIndex::unit(n, axis), S::one());
        p
    }

    pub fn monomial(e: MultiIndex, c: S) -> Self {
        let mut p = Self::zero(e.len());
        p.add_term(e, c);
        p
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (MultiIndex, S)>) -> Result<Self> {
        let mut p = Self::zero(n);
        for (e, c) in terms {
            if e.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: e.len() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Embeds a univariate polynomial in variable `axis`.
    pub fn from_uni(n: usize, axis: usize, u: &UniPoly<S>) -> Self {
        let mut p = Self::zero(n);
        for (i, c) in u.coeffs().iter().enumerate() {
            let mut e = vec![0; n];
            e[axis] = i as u32;
            p.add_term(MultiIndex(e), c.clone());
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, S> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &MultiIndex) -> S {
        self.terms.get(e).cloned().unwrap_or_else(S::zero)
    }

    /// Accumulates `c·x^e`, removing the entry if it cancels.
    pub fn add_term(&mut self, e: MultiIndex, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: other.n });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &S) -> Self {
        let mut out = Self::zero(self.n);
        if c.is_zero() {
            return out;
        }
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v.clone() * c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        MultiPoly { n: self.n, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect() }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = Self::zero(self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = MultiIndex(e1.0.iter().zip(&e2.0).map(|(a, b)| a + b).collect());
                out.add_term(e, c1.clone() * c2.clone());
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<Self> {
        let mut out = Self::constant(self.n, S::one());
        for _ in 0..e {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// `∂^k p`.
    pub fn differentiate(&self, k: &MultiIndex) -> Result<Self> {
        if k.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: k.len() });
        }
        let mut out = Self::zero(self.n);
        'terms: for (e, c) in &self.terms {
            let mut coef = c.clone();
            let mut ne = e.0.clone();
            for i in 0..self.n {
                let (ei, ki) = (e.0[i], k.0[i]);
                if ki > ei {
                    continue 'terms;
                }
                for j in 0..ki {
                    coef = coef * S::from_i64((ei - j) as i64);
                }
                ne[i] = ei - ki;
            }
            out.add_term(MultiIndex(ne), coef);
        }
        Ok(out)
    }

    /// Maximum exponent of variable `i`; `None` for the zero polynomial.
    pub fn deg(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|e| e.0[i]).max()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.total()).max()
    }

    pub fn eval(&self, x: &[S]) -> Result<S> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.len() });
        }
        // power tables per axis
        let powers: Vec<Vec<S>> = (0..self.n)
            .map(|i| {
                let d = self.deg(i).unwrap_or(0) as usize;
                let mut v = Vec::with_capacity(d + 1);
                v.push(S::one());
                for j in 1..=d {
                    let next = v[j - 1].clone() * x[i].clone();
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = S::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &ei) in e.0.iter().enumerate() {
                if ei > 0 {
                    t = t * powers[i][ei as usize].clone();
                }
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Largest coefficient magnitude.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    /// Drops coefficients below `rel · max|c|`; a no-op for exact scalars.
    pub fn prune(&mut self, rel: f64) {
        if S::EXACT {
            return;
        }
        let cut = rel * self.max_abs_coeff();
        self.terms.retain(|_, c| c.magnitude() >= cut);
    }

    /// Euclidean division by `h(x_axis)`: `self = h·q + r` with `deg_axis r < deg h`.
    pub fn divide_by_axis(&self, h: &UniPoly<S>, axis: usize) -> Result<(Self, Self)> {
        if axis >= self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: axis + 1 });
        }
        let dh = match h.degree() {
            Some(d) if d >= 1 => d as u32,
            _ => return Err(Error::ZeroDivisor),
        };
        let lc = h.leading().cloned().ok_or(Error::ZeroDivisor)?;
        let mut r = self.clone();
        let mut q = Self::zero(self.n);
        while let Some(top) = r.deg(axis).filter(|&d| d >= dh) {
            let leading: Vec<(MultiIndex, S)> =
                r.terms.iter().filter(|(e, _)| e.0[axis] == top).map(|(e, c)| (e.clone(), c.clone())).collect();
            for (e, c) in leading {
                let qc = c / lc.clone();
                let mut qe = e.0.clone();
                qe[axis] -= dh;
                for (j, hc) in h.coeffs().iter().enumerate() {
                    if hc.is_zero() {
                        continue;
                    }
                    let mut te = qe.clone();
                    te[axis] += j as u32;
                    r.add_term(MultiIndex(te), -(qc.clone() * hc.clone()));
                }
                // the leading term cancels exactly in exact mode; force it in float mode
                let mut lead = qe.clone();
                lead[axis] += dh;
                r.terms.remove(&MultiIndex(lead));
                q.add_term(MultiIndex(qe), qc);
            }
        }
        q.prune(FLOAT_PRUNE_REL);
        r.prune(FLOAT_PRUNE_REL);
        Ok((q, r))
    }

    /// `{"n": n, "terms": [{"e": [...], "c": ...}, ...]}`
    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self.terms.iter().map(|(e, c)| json!({"e": e, "c": c.to_json()})).collect();
        json!({"n": self.n, "terms": terms})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let n = v
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("polynomial needs an integer field \"n\"".into()))? as usize;
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("polynomial needs an array field \"terms\"".into()))?;
        let mut p = Self::zero(n);
        for (i, t) in terms.iter().enumerate() {
            let e: MultiIndex = t
                .get("e")
                .cloned()
                .ok_or_else(|| Error::Parse(format!("term {i}: missing \"e\"")))
                .and_then(|e| serde_json::from_value(e).map_err(|err| Error::Parse(format!("term {i}: {err}"))))?;
            if e.len() != n {
                return Err(Error::Parse(format!("term {i}: exponent has length {}, expected {n}", e.len())));
            }
            let c = t.get("c").ok_or_else(|| Error::Parse(format!("term {i}: missing \"c\"")))?;
            p.add_term(e, S::from_json(c)?);
        }
        Ok(p)
    }

    /// Converts the coefficients with `f`.
    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> MultiPoly<T> {
        let mut out = MultiPoly::zero(self.n);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }
}

impl<S: Scalar> fmt::Display for MultiPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, &p) in e.0.iter().enumerate() {
                match p {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{p}", i + 1)?,
                }
            }
        }
        Ok(())
    }
}

/// A scalar times a product of univariate factors, at most one per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct FactoredTerm<S: Scalar> {
    pub scalar: S,
    pub factors: Vec<Option<UniPoly<S>>>,
}

impl<S: Scalar> FactoredTerm<S> {
    pub fn new(scalar: S, factors: Vec<Option<UniPoly<S>>>) -> Self {
        FactoredTerm { scalar, factors }
    }

    pub fn n(&self) -> usize {
        self.factors.len()
    }

    pub fn expand(&self) -> MultiPoly<S> {
        let n = self.n();
        let mut p = MultiPoly::constant(n, self.scalar.clone());
        for (i, f) in self.factors.iter().enumerate() {
            if let Some(u) = f {
                p = p.mul(&MultiPoly::from_uni(n, i, u)).expect("same dimension");
            }
        }
        p
    }

    pub fn eval(&self, x: &[S]) -> Result<S> {
        if x.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: x.len() });
        }
        let mut acc = self.scalar.clone();
        for (f, xi) in self.factors.iter().zip(x) {
            if let Some(u) = f {
                acc = acc * u.eval(xi);
            }
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Rational};
    use proptest::prelude::*;

    fn up(c: &[i64]) -> UniPoly<Rational> {
        UniPoly::from_coeffs(c.iter().map(|&v| q(v, 1)).collect())
    }

    fn mp(n: usize, terms: &[(&[u32], i64)]) -> MultiPoly<Rational> {
        MultiPoly::from_terms(n, terms.iter().map(|(e, c)| (MultiIndex(e.to_vec()), q(*c, 1)))).unwrap()
    }

    #[test]
    fn ring_operations() {
        let x1 = MultiPoly::<Rational>::var(2, 0);
        let x2 = MultiPoly::<Rational>::var(2, 1);
        assert_eq!(x1.mul(&x2).unwrap(), mp(2, &[(&[1, 1], 1)]));
        let s = up(&[-1, 1]).pow(2);
        assert_eq!(s.mul(&s), up(&[1, -4, 6, -4, 1]));
        let p = mp(2, &[(&[2, 1], 3), (&[0, 0], -2)]);
        assert!(p.add(&p.scale(&q(-1, 1))).unwrap().is_zero());
        assert!(x1.add(&MultiPoly::var(3, 0)).is_err());
    }

    #[test]
    fn differentiation() {
        let p = mp(2, &[(&[1, 1], 1)]);
        assert_eq!(p.differentiate(&MultiIndex(vec![1, 1])).unwrap(), MultiPoly::constant(2, q(1, 1)));
        assert_eq!(p.differentiate(&MultiIndex(vec![0, 0])).unwrap(), p);
        let p = mp(2, &[(&[3, 1], 1)]);
        assert_eq!(p.differentiate(&MultiIndex(vec![2, 0])).unwrap(), mp(2, &[(&[1, 1], 6)]));
        assert!(p.differentiate(&MultiIndex(vec![4, 0])).unwrap().is_zero());
    }

    #[test]
    fn evaluation() {
        let p = up(&[1, -2, 1]);
        assert_eq!(p.eval(&q(1, 1)), q(0, 1));
        let c = MultiPoly::constant(3, q(5, 1));
        assert_eq!(c.eval(&[q(3, 7), q(-1, 1), q(2, 1)]).unwrap(), q(5, 1));
        // factored vs expanded, degree 3 x degree 3 product
        let f1 = UniPoly::from_coeffs(vec![0.0, 1.0, -2.0, 1.0]);
        let ft = FactoredTerm::new(1.0, vec![Some(f1.clone()), Some(f1)]);
        let a = ft.eval(&[0.5, 0.5]).unwrap();
        let b = ft.expand().eval(&[0.5, 0.5]).unwrap();
        assert!((a - b).abs() <= 1e-14 * a.abs());
    }

    #[test]
    fn series_inverse() {
        assert_eq!(up(&[1]).series_inverse_at(&q(3, 1), 3).unwrap(), vec![q(1, 1), q(0, 1), q(0, 1), q(0, 1)]);
        assert_eq!(up(&[1, -1]).series_inverse_at(&q(0, 1), 3).unwrap(), vec![q(1, 1); 4]);
        assert_eq!(up(&[1, -2, 1]).series_inverse_at(&q(0, 1), 2).unwrap(), vec![q(1, 1), q(2, 1), q(3, 1)]);
        assert!(matches!(up(&[1, -2, 1]).series_inverse_at(&q(1, 1), 2), Err(Error::SingularInversion)));
    }

    #[test]
    fn taylor_shift_matches_binomial_expansion() {
        // (x)^3 about 2: 8 + 12t + 6t^2 + t^3
        assert_eq!(up(&[0, 0, 0, 1]).taylor_shift(&q(2, 1)), vec![q(8, 1), q(12, 1), q(6, 1), q(1, 1)]);
    }

    #[test]
    fn small_quotients() {
        // (x+1)^2 x^2 (x-1)^2 divides the x-part of (x-2y)^7+(x+z^2)^4
        let h = UniPoly::from_roots(&[(q(-1, 1), 2), (q(0, 1), 2), (q(1, 1), 2)]);
        let x = MultiPoly::<Rational>::var(3, 0);
        let y = MultiPoly::var(3, 1);
        let z = MultiPoly::var(3, 2);
        let g = x
            .sub(&y.scale(&q(2, 1)))
            .unwrap()
            .pow(7)
            .unwrap()
            .add(&x.add(&z.mul(&z).unwrap()).unwrap().pow(4).unwrap())
            .unwrap();
        let (q1, r1) = g.divide_by_axis(&h, 0).unwrap();
        assert_eq!(q1, x.sub(&y.scale(&q(14, 1))).unwrap());
        assert!(r1.deg(0).unwrap() < 6);
        let back = MultiPoly::from_uni(3, 0, &h).mul(&q1).unwrap().add(&r1).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn division_by_higher_degree_is_trivial() {
        let g = mp(2, &[(&[1, 3], 2), (&[0, 0], 1)]);
        let (qq, r) = g.divide_by_axis(&up(&[0, 0, 1]), 0).unwrap();
        assert!(qq.is_zero());
        assert_eq!(r, g);
        assert!(matches!(g.divide_by_axis(&up(&[3]), 0), Err(Error::ZeroDivisor)));
    }

    #[test]
    fn univariate_div_rem() {
        let (qq, r) = up(&[-1, 0, 0, 1]).div_rem(&up(&[-1, 1])).unwrap();
        assert_eq!(qq, up(&[1, 1, 1]));
        assert!(r.is_zero());
    }

    #[test]
    fn json_roundtrip() {
        let p = MultiPoly::from_terms(2, vec![(MultiIndex(vec![1, 0]), q(-3, 2)), (MultiIndex(vec![0, 2]), q(4, 1))])
            .unwrap();
        let v = p.to_json();
        assert_eq!(v["terms"][0]["c"], json!("4"));
        assert_eq!(MultiPoly::<Rational>::from_json(&v).unwrap(), p);
        let f = MultiPoly::<f64>::from_json(&json!({"n":1,"terms":[{"e":[2],"c":"1/4"}]})).unwrap();
        assert_eq!(f.coeff(&MultiIndex(vec![2])), 0.25);
        assert!(MultiPoly::<f64>::from_json(&json!({"n":2,"terms":[{"e":[2],"c":1}]})).is_err());
    }

    fn small_rat() -> impl Strategy<Value = Rational> {
        (-9i64..10, 1i64..5).prop_map(|(a, b)| q(a, b))
    }

    fn rand_poly(n: usize, deg: u32) -> impl Strategy<Value = MultiPoly<Rational>> {
        prop::collection::vec((prop::collection::vec(0..=deg, n), small_rat()), 0..10).prop_map(move |ts| {
            MultiPoly::from_terms(n, ts.into_iter().map(|(e, c)| (MultiIndex(e), c))).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn division_identity_exact(
            (n, g) in (1usize..=3).prop_flat_map(|n| (Just(n), rand_poly(n, 8))),
            h in prop::collection::vec(small_rat(), 2..=7),
            axis_seed in 0usize..3,
        ) {
            let h = UniPoly::from_coeffs(h);
            prop_assume!(h.degree().unwrap_or(0) >= 1);
            let axis = axis_seed % n;
            let (qq, r) = g.divide_by_axis(&h, axis).unwrap();
            let back = MultiPoly::from_uni(n, axis, &h).mul(&qq).unwrap().add(&r).unwrap();
            prop_assert_eq!(back, g.clone());
            prop_assert!(r.deg(axis).is_none_or(|d| (d as usize) < h.degree().unwrap()));
            for j in 0..n {
                if j != axis {
                    prop_assert!(r.deg(j).unwrap_or(0) <= g.deg(j).unwrap_or(0));
                }
            }
        }

        #[test]
        fn derivatives_commute(p in rand_poly(2, 6), k1 in 0u32..4, k2 in 0u32..4) {
            let a = p.differentiate(&MultiIndex(vec![k1, 0])).unwrap()
                .differentiate(&MultiIndex(vec![0, k2])).unwrap();
            prop_assert_eq!(a, p.differentiate(&MultiIndex(vec![k1, k2])).unwrap());
        }

        #[test]
        fn evaluation_is_multiplicative(p in rand_poly(2, 5), r in rand_poly(2, 5), x in small_rat(), y in small_rat()) {
            let pt = [x, y];
            let lhs = p.mul(&r).unwrap().eval(&pt).unwrap();
            prop_assert_eq!(lhs, p.eval(&pt).unwrap() * r.eval(&pt).unwrap());
        }

        #[test]
        fn series_inverse_truncated_product(h in prop::collection::vec(small_rat(), 1..6), a in small_rat(), order in 0usize..6) {
            let h = UniPoly::from_coeffs(h);
            prop_assume!(!h.eval(&a).is_zero());
            let c = h.series_inverse_at(&a, order).unwrap();
            let b = UniPoly::from_coeffs(h.taylor_shift(&a));
            let prod = b.mul(&UniPoly::from_coeffs(c));
            prop_assert_eq!(prod.coeff(0), q(1, 1));
            for t in 1..=order {
                prop_assert_eq!(prod.coeff(t), q(0, 1));
            }
        }
    }
}
