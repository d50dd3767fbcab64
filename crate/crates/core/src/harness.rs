//! Analytic test functions with exact mixed partials, sampling lattices,
//! RMSE, a multilinear baseline and oblique-plane geometry.

use std::collections::HashMap;
use std::fmt;
use std::sync::RwLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{DataSource, GridSpec, HermiteData};
use crate::multiindex::MultiIndex;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Expression tree over `+ − × ÷ ^`, `exp`, `sin`, `cos`, `ln`, `sqrt`.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Ln(Box<Expr>),
    Sqrt(Box<Expr>),
}

impl Expr {
    fn max_var(&self) -> Option<usize> {
        use Expr::*;
        match self {
            Const(_) => None,
            Var(i) => Some(*i),
            Neg(a) | Exp(a) | Sin(a) | Cos(a) | Ln(a) | Sqrt(a) => a.max_var(),
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) | Pow(a, b) => a.max_var().max(b.max_var()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent part, only when followed by a digit or sign+digit
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text.parse().map_err(|_| Error::Parse(format!("bad number {text:?}")))?;
            out.push(Tok::Num(v));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^(),".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} at offset {i}")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(Error::Parse(format!("expected {c:?} at token {}", self.pos)))
        }
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.product()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.product()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    // unary minus binds looser than ^, so -x^2 = -(x^2)
    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Const(v))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let func = |p: &mut Parser, f: fn(Box<Expr>) -> Expr| -> Result<Expr> {
                    p.expect('(')?;
                    let e = p.sum()?;
                    p.expect(')')?;
                    Ok(f(Box::new(e)))
                };
                match name.as_str() {
                    "exp" => func(self, Expr::Exp),
                    "sin" => func(self, Expr::Sin),
                    "cos" => func(self, Expr::Cos),
                    "ln" | "log" => func(self, Expr::Ln),
                    "sqrt" => func(self, Expr::Sqrt),
                    "pi" => Ok(Expr::Const(std::f64::consts::PI)),
                    "e" => Ok(Expr::Const(std::f64::consts::E)),
                    "x" => Ok(Expr::Var(0)),
                    "y" => Ok(Expr::Var(1)),
                    "z" => Ok(Expr::Var(2)),
                    v if v.starts_with('x') && v.len() > 1 => {
                        let i: usize = v[1..].parse().map_err(|_| Error::Parse(format!("unknown name {v:?}")))?;
                        if i == 0 {
                            return Err(Error::Parse("variables are numbered from x1".into()));
                        }
                        Ok(Expr::Var(i - 1))
                    }
                    other => Err(Error::Parse(format!("unknown name {other:?}"))),
                }
            }
            Some(t) => Err(Error::Parse(format!("unexpected token {t:?}"))),
            None => Err(Error::Parse("unexpected end of expression".into())),
        }
    }
}

pub fn parse_expr(s: &str) -> Result<Expr> {
    let mut p = Parser { toks: tokenize(s)?, pos: 0 };
    let e = p.sum()?;
    if p.pos != p.toks.len() {
        return Err(Error::Parse(format!("trailing input at token {}", p.pos)));
    }
    Ok(e)
}

/// Truncated multivariate Taylor series: coefficients of `h^k` for every
/// `k` in the box `[0, K]`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    bound: Vec<u32>,
    coeffs: Vec<f64>,
}

impl Jet {
    fn size(bound: &[u32]) -> usize {
        bound.iter().map(|&b| b as usize + 1).product()
    }

    pub fn constant(bound: &[u32], v: f64) -> Self {
        let mut coeffs = vec![0.0; Self::size(bound)];
        coeffs[0] = v;
        Jet { bound: bound.to_vec(), coeffs }
    }

    pub fn variable(bound: &[u32], axis: usize, v: f64) -> Self {
        let mut j = Self::constant(bound, v);
        if bound[axis] > 0 {
            let stride: usize = bound[axis + 1..].iter().map(|&b| b as usize + 1).product();
            j.coeffs[stride] = 1.0;
        }
        j
    }

    fn multi(&self, mut lin: usize) -> Vec<u32> {
        let mut k = vec![0u32; self.bound.len()];
        for i in (0..self.bound.len()).rev() {
            let d = self.bound[i] as usize + 1;
            k[i] = (lin % d) as u32;
            lin /= d;
        }
        k
    }

    fn linear(&self, k: &[u32]) -> usize {
        k.iter().zip(&self.bound).fold(0, |acc, (&ki, &b)| acc * (b as usize + 1) + ki as usize)
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// Taylor coefficient of `h^k`.
    pub fn coeff(&self, k: &[u32]) -> f64 {
        self.coeffs[self.linear(k)]
    }

    /// `∂^k` at the expansion point: `k! · coeff(k)`.
    pub fn derivative(&self, k: &[u32]) -> f64 {
        let fact: f64 = k.iter().map(|&ki| (1..=ki).map(f64::from).product::<f64>()).product();
        fact * self.coeff(k)
    }

    fn total_bound(&self) -> u32 {
        self.bound.iter().sum()
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Jet { bound: self.bound.clone(), coeffs: self.coeffs.iter().map(|&c| f(c)).collect() }
    }

    fn zip(&self, o: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        Jet { bound: self.bound.clone(), coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(&a, &b)| f(a, b)).collect() }
    }

    pub fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|a| a * c)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let m = self.coeffs.len();
        let mut out = vec![0.0; m];
        let ks: Vec<Vec<u32>> = (0..m).map(|l| self.multi(l)).collect();
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if *b == 0.0 {
                    continue;
                }
                let ok = ks[i].iter().zip(&ks[j]).zip(&self.bound).all(|((x, y), bd)| x + y <= *bd);
                if ok {
                    let sum: Vec<u32> = ks[i].iter().zip(&ks[j]).map(|(x, y)| x + y).collect();
                    out[self.linear(&sum)] += a * b;
                }
            }
        }
        Jet { bound: self.bound.clone(), coeffs: out }
    }

    /// `Σ_j c_j h^j` where `h` is the non-constant part; `h` is nilpotent
    /// within the box, so the sum is finite.
    fn compose(&self, c: impl Fn(usize) -> f64) -> Self {
        let mut h = self.clone();
        h.coeffs[0] = 0.0;
        let mut out = Jet::constant(&self.bound, c(0));
        let mut pw = Jet::constant(&self.bound, 1.0);
        for j in 1..=self.total_bound() as usize {
            pw = pw.mul(&h);
            out = out.add(&pw.scale(c(j)));
        }
        out
    }

    pub fn exp(&self) -> Self {
        let e0 = self.value().exp();
        let mut fact = vec![1.0];
        for j in 1..=self.total_bound() as usize {
            fact.push(fact[j - 1] * j as f64);
        }
        self.compose(|j| e0 / fact[j])
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        self.compose(|j| trig_coeff(s, c, j))
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        // cos(u0 + h) = sin(u0 + π/2 + h)
        self.compose(|j| trig_coeff(c, -s, j))
    }

    pub fn recip(&self) -> Result<Self> {
        let u0 = self.value();
        if u0 == 0.0 {
            return Err(Error::Undefined(Vec::new()));
        }
        Ok(self.compose(|j| (-1.0f64).powi(j as i32) / u0.powi(j as i32 + 1)))
    }

    pub fn ln(&self) -> Result<Self> {
        let u0 = self.value();
        if u0 <= 0.0 {
            return Err(Error::Undefined(Vec::new()));
        }
        Ok(self.compose(|j| if j == 0 { u0.ln() } else { (-1.0f64).powi(j as i32 + 1) / (j as f64 * u0.powi(j as i32)) }))
    }

    /// `u^p` for a real constant `p`.
    pub fn powf(&self, p: f64) -> Result<Self> {
        if p.fract() == 0.0 && p.abs() <= 64.0 {
            let mut base = if p < 0.0 { self.recip()? } else { self.clone() };
            let mut e = p.abs() as u32;
            let mut acc = Jet::constant(&self.bound, 1.0);
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc.mul(&base);
                }
                base = base.mul(&base);
                e >>= 1;
            }
            return Ok(acc);
        }
        let u0 = self.value();
        if u0 <= 0.0 {
            return Err(Error::Undefined(Vec::new()));
        }
        // binomial series in h/u0
        Ok(self.compose(|j| {
            let mut b = 1.0;
            for i in 0..j {
                b *= (p - i as f64) / (i + 1) as f64;
            }
            u0.powf(p - j as f64) * b
        }))
    }
}

// j-th Taylor coefficient of sin(u0 + h) given s = sin u0, c = cos u0
fn trig_coeff(s: f64, c: f64, j: usize) -> f64 {
    let fact: f64 = (1..=j).map(|i| i as f64).product();
    let v = match j % 4 {
        0 => s,
        1 => c,
        2 => -s,
        _ => -c,
    };
    v / fact
}

/// A named or user-supplied analytic function of `n` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    name: String,
    n: usize,
    expr: Expr,
}

/// Built-in function names.
pub const BUILTINS: [&str; 4] = ["exp2d", "gauss2d", "gauss3d", "sinmix3d"];

impl TestFunction {
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let expr = parse_expr(text)?;
        if let Some(v) = expr.max_var() {
            if v >= n {
                return Err(Error::Parse(format!("expression uses x{} but has only {n} variables", v + 1)));
            }
        }
        Ok(TestFunction { name: text.to_string(), n, expr })
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let (text, n) = match name {
            "exp2d" => ("exp(x1 + x2)", 2),
            "gauss2d" => ("exp(-(x1 - 3)^2 - (x2 - 3)^2) + exp((-(x1 - 4)^2 - (x2 - 4)^2) / 5)", 2),
            "gauss3d" => (
                "exp((-(x1 - 3)^2 - (x2 - 1)^2 - (x3 - 1.5)^2) / 3) - exp((-(x1 - 0.5)^2 - (x2 - 2)^2 - (x3 - 1)^2) / 5)",
                3,
            ),
            "sinmix3d" => ("x1*sin(x2) + x2*sin(x1)/10 - x1*sin(x2*x3/4)", 3),
            other => return Err(Error::Parse(format!("unknown built-in function {other:?}; known: {}", BUILTINS.join(", ")))),
        };
        let mut f = Self::parse(text, n)?;
        f.name = name.to_string();
        Ok(f)
    }

    /// A built-in name, or an expression in `n` variables otherwise.
    pub fn from_spec(spec: &str, n: Option<usize>) -> Result<Self> {
        if BUILTINS.contains(&spec) {
            return Self::builtin(spec);
        }
        let expr = parse_expr(spec)?;
        let n = n.unwrap_or_else(|| expr.max_var().map_or(1, |v| v + 1));
        Self::parse(spec, n)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Jet of all partials `∂^k`, `k ≤ bound`, at `x`.
    pub fn jet(&self, x: &[f64], bound: &[u32]) -> Result<Jet> {
        if x.len() != self.n || bound.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.len().min(bound.len()) });
        }
        let j = eval_jet(&self.expr, x, bound).map_err(|e| match e {
            Error::Undefined(_) => Error::Undefined(x.to_vec()),
            other => other,
        })?;
        if j.coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::Undefined(x.to_vec()));
        }
        Ok(j)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok(self.jet(x, &vec![0; self.n])?.value())
    }

    pub fn derivative(&self, x: &[f64], k: &MultiIndex) -> Result<f64> {
        Ok(self.jet(x, k.as_slice())?.derivative(k.as_slice()))
    }

    /// Central difference of the order `k − e_i` partial along the first axis
    /// `i` with `k_i > 0`; compares one automatic order against its neighbour.
    pub fn finite_difference(&self, x: &[f64], k: &MultiIndex, h: f64) -> Result<f64> {
        let Some(i) = (0..self.n).find(|&i| k.get(i) > 0) else {
            return self.eval(x);
        };
        let mut lower = k.clone();
        lower.0[i] -= 1;
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += h;
        xm[i] -= h;
        Ok((self.derivative(&xp, &lower)? - self.derivative(&xm, &lower)?) / (2.0 * h))
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

fn eval_jet(e: &Expr, x: &[f64], bound: &[u32]) -> Result<Jet> {
    use Expr::*;
    Ok(match e {
        Const(v) => Jet::constant(bound, *v),
        Var(i) => Jet::variable(bound, *i, x[*i]),
        Neg(a) => eval_jet(a, x, bound)?.scale(-1.0),
        Add(a, b) => eval_jet(a, x, bound)?.add(&eval_jet(b, x, bound)?),
        Sub(a, b) => eval_jet(a, x, bound)?.sub(&eval_jet(b, x, bound)?),
        Mul(a, b) => {
            let (a, b) = (eval_jet(a, x, bound)?, eval_jet(b, x, bound)?);
            a.mul(&b)
        }
        Div(a, b) => {
            let (a, b) = (eval_jet(a, x, bound)?, eval_jet(b, x, bound)?);
            a.mul(&b.recip()?)
        }
        Pow(a, b) => {
            let base = eval_jet(a, x, bound)?;
            match b.as_ref() {
                Const(p) => base.powf(*p)?,
                Neg(inner) if matches!(inner.as_ref(), Const(_)) => {
                    let Const(p) = inner.as_ref() else { unreachable!() };
                    base.powf(-p)?
                }
                _ => base.ln()?.mul(&eval_jet(b, x, bound)?).exp(),
            }
        }
        Exp(a) => eval_jet(a, x, bound)?.exp(),
        Sin(a) => eval_jet(a, x, bound)?.sin(),
        Cos(a) => eval_jet(a, x, bound)?.cos(),
        Ln(a) => eval_jet(a, x, bound)?.ln()?,
        Sqrt(a) => eval_jet(a, x, bound)?.powf(0.5)?,
    })
}

/// Exact partials of `f` at every condition of the grid.
pub fn derive_data(f: &TestFunction, grid: &GridSpec<f64>) -> Result<HermiteData<f64>> {
    check_dims(f, grid)?;
    let rows = grid
        .points()
        .map(|idx| point_row(f, grid, &idx))
        .collect::<Result<Vec<_>>>()?;
    HermiteData::from_point_values(grid.clone(), rows)
}

/// [`derive_data`] plus a finite-difference check of every entry.
pub fn derive_data_checked(f: &TestFunction, grid: &GridSpec<f64>, h: f64, rel_tol: f64) -> Result<HermiteData<f64>> {
    let data = derive_data(f, grid)?;
    for idx in grid.points() {
        let x = grid.coordinate(&idx);
        for (k, &ad) in grid.derivative_box(&idx).enumerate().iter().zip(data.point_values(&idx)) {
            if k.is_zero() {
                continue;
            }
            let fd = f.finite_difference(&x, k, h)?;
            if (ad - fd).abs() > rel_tol * ad.abs().max(1.0) {
                return Err(Error::Parse(format!(
                    "derivative {k} at {:?} disagrees with finite differences: {ad} vs {fd}",
                    x
                )));
            }
        }
    }
    Ok(data)
}

fn check_dims(f: &TestFunction, grid: &GridSpec<f64>) -> Result<()> {
    if f.n() != grid.n() {
        return Err(Error::DimensionMismatch { expected: grid.n(), found: f.n() });
    }
    Ok(())
}

fn point_row(f: &TestFunction, grid: &GridSpec<f64>, idx: &[usize]) -> Result<Vec<f64>> {
    let x = grid.coordinate(idx);
    let bound: Vec<u32> = grid.nu(idx).iter().map(|v| v - 1).collect();
    let jet = f.jet(&x, &bound)?;
    Ok(grid.derivative_box(idx).enumerate().iter().map(|k| jet.derivative(k.as_slice())).collect())
}

/// Data computed on demand and memoized, for grids too large to sample
/// up front.
pub struct FunctionSource {
    f: TestFunction,
    grid: GridSpec<f64>,
    memo: RwLock<HashMap<usize, Vec<f64>>>,
}

impl FunctionSource {
    pub fn new(f: TestFunction, grid: GridSpec<f64>) -> Result<Self> {
        check_dims(&f, &grid)?;
        Ok(FunctionSource { f, grid, memo: RwLock::new(HashMap::new()) })
    }

    /// Number of grid points evaluated so far.
    pub fn evaluated(&self) -> usize {
        self.memo.read().expect("memo lock").len()
    }
}

impl DataSource<f64> for FunctionSource {
    fn grid(&self) -> &GridSpec<f64> {
        &self.grid
    }

    fn values(&self, idx: &[usize]) -> Result<Vec<f64>> {
        let lin = self.grid.linear_index(idx);
        if let Some(v) = self.memo.read().expect("memo lock").get(&lin) {
            return Ok(v.clone());
        }
        let row = point_row(&self.f, &self.grid, idx)?;
        self.memo.write().expect("memo lock").insert(lin, row.clone());
        Ok(row)
    }
}

/// Inclusive lattice: `counts[i]` equally spaced values on `[lo_i, hi_i]`,
/// row-major with the last axis fastest.
pub fn lattice(ranges: &[(f64, f64, usize)]) -> Vec<Vec<f64>> {
    let axes: Vec<Vec<f64>> = ranges
        .iter()
        .map(|&(lo, hi, c)| match c {
            0 => Vec::new(),
            1 => vec![lo],
            _ => (0..c).map(|i| if i == c - 1 { hi } else { lo + (hi - lo) * i as f64 / (c - 1) as f64 }).collect(),
        })
        .collect();
    let total: usize = axes.iter().map(Vec::len).product();
    (0..total)
        .map(|mut lin| {
            let mut p = vec![0.0; axes.len()];
            for i in (0..axes.len()).rev() {
                let len = axes[i].len();
                p[i] = axes[i][lin % len];
                lin /= len;
            }
            p
        })
        .collect()
}

/// Pairwise summation with a fixed split, so the result does not depend on
/// how the terms were produced.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// `√(mean(d²))` of a difference field.
pub fn rmse_of(diffs: &[f64]) -> f64 {
    if diffs.is_empty() {
        return 0.0;
    }
    let sq: Vec<f64> = diffs.iter().map(|d| d * d).collect();
    (pairwise_sum(&sq) / diffs.len() as f64).sqrt()
}

/// RMSE between `reference` and `interp` over `points`. Evaluation runs in
/// parallel with the `parallel` feature; the reduction is deterministic.
pub fn rmse<F>(reference: &TestFunction, interp: F, points: &[Vec<f64>]) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let diff = |x: &Vec<f64>| -> Result<f64> { Ok(interp(x)? - reference.eval(x)?) };
    #[cfg(feature = "parallel")]
    let diffs: Vec<f64> = points.par_iter().map(diff).collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let diffs: Vec<f64> = points.iter().map(diff).collect::<Result<_>>()?;
    Ok(rmse_of(&diffs))
}

/// Direct n-linear blend of the `2^n` nodes around `x`, using values only.
pub fn multilinear_baseline(data: &HermiteData<f64>, x: &[f64]) -> Result<f64> {
    let grid = data.grid();
    grid.check_inside(x)?;
    let n = grid.n();
    let mut cells = Vec::with_capacity(n);
    for (i, &q) in x.iter().enumerate() {
        let c = grid.axis(i).coords();
        if c.len() == 1 {
            cells.push((0usize, 0usize, 1.0f64));
            continue;
        }
        let lo = (c.partition_point(|&v| v <= q).max(1) - 1).min(c.len() - 2);
        let t = (q - c[lo]) / (c[lo + 1] - c[lo]);
        cells.push((lo, lo + 1, t));
    }
    let mut acc = 0.0;
    for corner in 0..(1usize << n) {
        let mut w = 1.0;
        let mut idx = Vec::with_capacity(n);
        for (i, &(lo, hi, t)) in cells.iter().enumerate() {
            if corner >> (n - 1 - i) & 1 == 1 {
                w *= t;
                idx.push(hi);
            } else {
                w *= 1.0 - t;
                idx.push(lo);
            }
        }
        if w != 0.0 {
            acc += w * data.point_values(&idx)[0];
        }
    }
    Ok(acc)
}

/// A plane through `point` with unit `normal`, sampled over a rectangle of
/// `(x1, x2)` values; `x3` follows from the plane equation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlaneSpec {
    pub point: [f64; 3],
    pub normal: [f64; 3],
    pub x1: (f64, f64),
    pub x2: (f64, f64),
    pub counts: (usize, usize),
}

impl PlaneSpec {
    pub fn new(point: [f64; 3], normal: [f64; 3], x1: (f64, f64), x2: (f64, f64), counts: (usize, usize)) -> Result<Self> {
        let norm = normal.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Parse(format!("plane normal must have unit length, got {norm}")));
        }
        if normal[2].abs() < 1e-12 {
            return Err(Error::Parse("plane normal has no x3 component; it cannot be written as x3 = f(x1, x2)".into()));
        }
        Ok(PlaneSpec { point, normal, x1, x2, counts })
    }

    /// Lattice step `step` in both parameters.
    pub fn with_step(point: [f64; 3], normal: [f64; 3], x1: (f64, f64), x2: (f64, f64), step: f64) -> Result<Self> {
        let count = |r: (f64, f64)| ((r.1 - r.0) / step).round() as usize + 1;
        Self::new(point, normal, x1, x2, (count(x1), count(x2)))
    }

    /// `x3` on the plane above `(x1, x2)`.
    pub fn height(&self, x1: f64, x2: f64) -> f64 {
        let [p1, p2, p3] = self.point;
        let [n1, n2, n3] = self.normal;
        p3 - (n1 * (x1 - p1) + n2 * (x2 - p2)) / n3
    }
}

/// Plane samples inside the grid hull, and how many were dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneSample {
    pub points: Vec<Vec<f64>>,
    pub excluded: usize,
}

pub fn sample_plane(p: &PlaneSpec, hull: &[(f64, f64)]) -> PlaneSample {
    let mut points = Vec::new();
    let mut excluded = 0;
    for uv in lattice(&[(p.x1.0, p.x1.1, p.counts.0), (p.x2.0, p.x2.1, p.counts.1)]) {
        let x = vec![uv[0], uv[1], p.height(uv[0], uv[1])];
        let inside = x.iter().zip(hull).all(|(&v, &(lo, hi))| v >= lo && v <= hi);
        if inside {
            points.push(x);
        } else {
            excluded += 1;
        }
    }
    PlaneSample { points, excluded }
}
