//! Polynomials over O/t^M in n variables: the finite-precision image of the
//! Tate algebra, with Gauss norm, evaluation, coordinate changes and
//! order of vanishing at the origin.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::ring::{OElem, RingCtx, Valuation};

/// Exponent vector, ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// x_i -> x_i + x_n^{d_i} for i < n, x_n fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShearMap {
    exponents: Vec<u32>,
}

impl ShearMap {
    pub fn new(exponents: Vec<u32>) -> Result<Self> {
        if exponents.contains(&0) {
            return Err(Error::PreconditionViolated("shear exponents must be at least 1".into()));
        }
        Ok(ShearMap { exponents })
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }
}

/// x_i -> x_i + c_i x_n for i < n with unit c_i, x_n fixed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearShear {
    units: Vec<OElem>,
}

impl LinearShear {
    pub fn new(ctx: &RingCtx, units: Vec<OElem>) -> Result<Self> {
        if units.iter().any(|c| !ctx.is_unit(c)) {
            return Err(Error::NotAUnit);
        }
        Ok(LinearShear { units })
    }

    pub fn units(&self) -> &[OElem] {
        &self.units
    }
}

/// x_i -> t^{a_i} x_i followed by division of the whole polynomial by t^b.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaleMap {
    pub a: Vec<u32>,
    pub b: u32,
}

impl ScaleMap {
    pub fn divide_by(n: usize, b: u32) -> Self {
        ScaleMap { a: vec![0; n], b }
    }

    pub fn is_identity(&self) -> bool {
        self.b == 0 && self.a.iter().all(|&a| a == 0)
    }
}

/// Polynomial in `n` variables with coefficients in O/t^M, faithful up to
/// `precision` (the certified precision M' <= M).
#[derive(Clone, Debug)]
pub struct MPoly {
    ctx: RingCtx,
    n: usize,
    terms: BTreeMap<Monomial, OElem>,
    precision: u32,
}

impl PartialEq for MPoly {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.precision == other.precision
            && self.ctx == other.ctx
            && self.terms == other.terms
    }
}

impl Eq for MPoly {}

impl MPoly {
    pub fn zero(ctx: &RingCtx, n: usize) -> Self {
        MPoly { ctx: ctx.clone(), n, terms: BTreeMap::new(), precision: ctx.precision() }
    }

    pub fn constant(ctx: &RingCtx, n: usize, c: OElem) -> Self {
        Self::monomial(ctx, n, vec![0; n], c)
    }

    pub fn one(ctx: &RingCtx, n: usize) -> Self {
        Self::constant(ctx, n, ctx.one())
    }

    /// The coordinate x_{i+1} (0-based `i`).
    pub fn var(ctx: &RingCtx, n: usize, i: usize) -> Self {
        assert!(i < n, "variable index {i} out of range for {n} variables");
        let mut e = vec![0; n];
        e[i] = 1;
        Self::monomial(ctx, n, e, ctx.one())
    }

    pub fn monomial(ctx: &RingCtx, n: usize, exps: Vec<u32>, c: OElem) -> Self {
        assert_eq!(exps.len(), n);
        let mut p = Self::zero(ctx, n);
        p.terms.insert(Monomial(exps), c);
        p.normalize();
        p
    }

    pub fn from_terms<I>(ctx: &RingCtx, n: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, OElem)>,
    {
        let mut p = Self::zero(ctx, n);
        for (e, c) in terms {
            assert_eq!(e.len(), n);
            p.add_term(Monomial(e), &c);
        }
        p.normalize();
        p
    }

    /// Lower the certified precision (never raises it).
    pub fn with_precision(mut self, precision: u32) -> Self {
        self.precision = self.precision.min(precision).max(1);
        self.normalize();
        self
    }

    fn add_term(&mut self, m: Monomial, c: &OElem) {
        let ctx = &self.ctx;
        match self.terms.get_mut(&m) {
            Some(old) => *old = ctx.add(old, c),
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    fn normalize(&mut self) {
        let (ctx, prec) = (&self.ctx, self.precision);
        self.terms.retain(|_, c| {
            *c = ctx.truncate(c, prec);
            !c.is_zero()
        });
    }

    pub fn ctx(&self) -> &RingCtx {
        &self.ctx
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Certified precision M'.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Terms in increasing graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&[u32], &OElem)> {
        self.terms.iter().map(|(m, c)| (m.exps(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, exps: &[u32]) -> OElem {
        self.terms.get(&Monomial(exps.to_vec())).cloned().unwrap_or_else(|| self.ctx.zero())
    }

    pub fn constant_term(&self) -> OElem {
        self.coeff(&vec![0; self.n])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[var]).max()
    }

    /// Degree in x_n, the last variable.
    pub fn degree_in_last(&self) -> Option<u32> {
        if self.n == 0 {
            return self.total_degree();
        }
        self.degree_in(self.n - 1)
    }

    fn check_compatible(&self, other: &MPoly) {
        assert_eq!(self.n, other.n, "variable count mismatch");
        assert_eq!(self.ctx, other.ctx, "ring context mismatch");
    }

    pub fn scale(&self, c: &OElem) -> MPoly {
        let ctx = &self.ctx;
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = ctx.mul(v, c);
        }
        out.normalize();
        out
    }

    pub fn pow(&self, mut exp: u32) -> MPoly {
        let mut base = self.clone();
        let mut acc = MPoly::one(&self.ctx, self.n).with_precision(self.precision);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = &acc * &base;
            }
            exp >>= 1;
            if exp > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Gauss norm as a valuation: |f| = q^{-v}.
    pub fn gauss_val(&self) -> Valuation {
        self.terms
            .values()
            .filter_map(|c| c.lowest_nonzero())
            .min()
            .map(Valuation::Finite)
            .unwrap_or(Valuation::AtLeast(self.precision))
    }

    /// Lowest total degree of a term with nonzero coefficient at the certified precision.
    pub fn order_at_zero(&self) -> Result<u32> {
        self.terms
            .keys()
            .next()
            .map(|m| m.degree())
            .ok_or_else(|| Error::IndeterminateInput("polynomial vanishes at this precision".into()))
    }

    /// Coefficients a_0, ..., a_S in the first n-1 variables with f = sum a_s x_n^s.
    pub fn coeffs_in_last_var(&self) -> Vec<MPoly> {
        assert!(self.n >= 1, "need at least one variable");
        let top = self.degree_in_last().unwrap_or(0) as usize;
        let mut out = vec![MPoly::zero(&self.ctx, self.n - 1).with_precision(self.precision); top + 1];
        for (m, c) in &self.terms {
            let s = m.0[self.n - 1] as usize;
            out[s].terms.insert(Monomial(m.0[..self.n - 1].to_vec()), c.clone());
        }
        out
    }

    /// Inverse of [`MPoly::coeffs_in_last_var`].
    pub fn from_last_var_coeffs(ctx: &RingCtx, coeffs: &[MPoly]) -> MPoly {
        let inner = coeffs.first().map(|c| c.n).unwrap_or(0);
        let mut out = MPoly::zero(ctx, inner + 1);
        let mut prec = ctx.precision();
        for (s, a) in coeffs.iter().enumerate() {
            assert_eq!(a.n, inner);
            prec = prec.min(a.precision);
            for (m, c) in &a.terms {
                let mut e = m.0.clone();
                e.push(s as u32);
                out.terms.insert(Monomial(e), c.clone());
            }
        }
        out.with_precision(prec)
    }

    /// Add a trailing variable that does not occur.
    pub fn embed_with_last_var(&self) -> MPoly {
        let mut out = MPoly::zero(&self.ctx, self.n + 1).with_precision(self.precision);
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            e.push(0);
            out.terms.insert(Monomial(e), c.clone());
        }
        out
    }

    /// Value at `point` modulo t^{M'}, by nested Horner in x_1, ..., x_n.
    pub fn evaluate(&self, point: &[OElem]) -> Result<OElem> {
        if point.len() != self.n {
            return Err(Error::PreconditionViolated(format!(
                "point has {} coordinates, polynomial has {} variables",
                point.len(),
                self.n
            )));
        }
        let mut terms: Vec<(&[u32], &OElem)> = self.terms().collect();
        terms.sort_by(|a, b| b.0.cmp(a.0));
        let v = horner(&self.ctx, &terms, 0, point);
        Ok(self.ctx.truncate(&v, self.precision))
    }

    /// Substitute x_i -> images[i]. All images share one variable count.
    pub fn compose(&self, images: &[MPoly]) -> Result<MPoly> {
        if images.len() != self.n {
            return Err(Error::PreconditionViolated(format!(
                "{} images for {} variables",
                images.len(),
                self.n
            )));
        }
        let m = images.first().map(|p| p.n).unwrap_or(0);
        let mut prec = self.precision;
        for img in images {
            if img.n != m || img.ctx != self.ctx {
                return Err(Error::PreconditionViolated("incompatible substitution images".into()));
            }
            prec = prec.min(img.precision);
        }
        let one = MPoly::one(&self.ctx, m).with_precision(prec);
        let mut powers: Vec<Vec<MPoly>> = vec![vec![one.clone()]; self.n];
        let mut out = MPoly::zero(&self.ctx, m).with_precision(prec);
        for (mono, c) in &self.terms {
            let mut term = one.scale(c);
            for (i, &e) in mono.0.iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap() * &images[i];
                    powers[i].push(next);
                }
                if e > 0 {
                    term = &term * &powers[i][e as usize];
                }
            }
            out = &out + &term;
        }
        Ok(out)
    }

    fn shear_images(&self, exps: &[u32], sign: i64) -> Result<Vec<MPoly>> {
        if self.n < 2 || exps.len() != self.n - 1 {
            return Err(Error::PreconditionViolated(format!(
                "shear with {} exponents on {} variables",
                exps.len(),
                self.n
            )));
        }
        let xn = MPoly::var(&self.ctx, self.n, self.n - 1);
        let c = self.ctx.from_int(sign);
        let mut images: Vec<MPoly> = exps
            .iter()
            .enumerate()
            .map(|(i, &d)| &MPoly::var(&self.ctx, self.n, i) + &xn.pow(d).scale(&c))
            .collect();
        images.push(xn);
        Ok(images)
    }

    /// f(x_1 + x_n^{d_1}, ..., x_{n-1} + x_n^{d_{n-1}}, x_n).
    pub fn substitute_shear(&self, shear: &ShearMap) -> Result<MPoly> {
        self.compose(&self.shear_images(&shear.exponents, 1)?)
    }

    /// f(x_1 - x_n^{d_1}, ..., x_n): undoes [`MPoly::substitute_shear`].
    pub fn unshear(&self, shear: &ShearMap) -> Result<MPoly> {
        self.compose(&self.shear_images(&shear.exponents, -1)?)
    }

    /// f(x_1 + c_1 x_n, ..., x_{n-1} + c_{n-1} x_n, x_n).
    pub fn substitute_linear_shear(&self, shear: &LinearShear) -> Result<MPoly> {
        if self.n < 2 || shear.units.len() != self.n - 1 {
            return Err(Error::PreconditionViolated(format!(
                "linear shear with {} units on {} variables",
                shear.units.len(),
                self.n
            )));
        }
        let xn = MPoly::var(&self.ctx, self.n, self.n - 1);
        let mut images: Vec<MPoly> = shear
            .units
            .iter()
            .enumerate()
            .map(|(i, c)| &MPoly::var(&self.ctx, self.n, i) + &xn.scale(c))
            .collect();
        images.push(xn);
        self.compose(&images)
    }

    /// t^{-b} f(t^{a_1} x_1, ..., t^{a_n} x_n). Certified precision drops by b.
    pub fn rescale(&self, s: &ScaleMap) -> Result<MPoly> {
        if s.a.len() != self.n {
            return Err(Error::PreconditionViolated(format!(
                "scale map for {} variables applied to {}",
                s.a.len(),
                self.n
            )));
        }
        if s.b >= self.precision {
            return Err(Error::PrecisionExhausted(format!(
                "dividing by t^{} leaves no certified digits of precision {}",
                s.b, self.precision
            )));
        }
        let ctx = &self.ctx;
        let mut out = MPoly::zero(ctx, self.n).with_precision(self.precision - s.b);
        for (m, c) in &self.terms {
            let shift: u64 = m.0.iter().zip(&s.a).map(|(&e, &a)| e as u64 * a as u64).sum();
            let scaled = ctx.shift_up(c, shift.min(u32::MAX as u64) as u32);
            let scaled = ctx.truncate(&scaled, self.precision);
            if scaled.is_zero() {
                continue;
            }
            let divided = ctx.shift_down(&scaled, s.b).map_err(|_| {
                Error::NotIntegral(format!(
                    "coefficient of {} has valuation below {}",
                    fmt_monomial(&m.0),
                    s.b
                ))
            })?;
            out.terms.insert(m.clone(), divided);
        }
        out.normalize();
        Ok(out)
    }

    /// `self - other` truncated to their common precision is zero.
    pub fn congruent(&self, other: &MPoly) -> bool {
        (self - other).is_zero()
    }
}

fn horner(ctx: &RingCtx, terms: &[(&[u32], &OElem)], var: usize, point: &[OElem]) -> OElem {
    if terms.is_empty() {
        return ctx.zero();
    }
    if var == point.len() {
        return terms.iter().fold(ctx.zero(), |acc, (_, c)| ctx.add(&acc, c));
    }
    let x = &point[var];
    let mut acc = ctx.zero();
    let mut prev: Option<u32> = None;
    let mut start = 0;
    while start < terms.len() {
        let d = terms[start].0[var];
        let end = start + terms[start..].iter().take_while(|t| t.0[var] == d).count();
        if let Some(pd) = prev {
            acc = ctx.mul(&acc, &ctx.pow(x, (pd - d) as u64));
        }
        acc = ctx.add(&acc, &horner(ctx, &terms[start..end], var + 1, point));
        prev = Some(d);
        start = end;
    }
    if let Some(pd) = prev {
        acc = ctx.mul(&acc, &ctx.pow(x, pd as u64));
    }
    acc
}

fn fmt_monomial(exps: &[u32]) -> String {
    let parts: Vec<String> = exps
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{e}", i + 1) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

impl fmt::Display for MPoly {
    /// Canonical serialization: terms in decreasing graded-lex order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mono = fmt_monomial(&m.0);
            let cs = self.ctx.format(c);
            if mono == "1" {
                write!(f, "{cs}")?;
            } else if c.is_one() {
                write!(f, "{mono}")?;
            } else if cs.contains('+') {
                write!(f, "({cs})*{mono}")?;
            } else {
                write!(f, "{cs}*{mono}")?;
            }
        }
        Ok(())
    }
}

impl Add for &MPoly {
    type Output = MPoly;

    fn add(self, rhs: &MPoly) -> MPoly {
        self.check_compatible(rhs);
        let mut out = self.clone();
        out.precision = self.precision.min(rhs.precision);
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c);
        }
        out.normalize();
        out
    }
}

impl Neg for &MPoly {
    type Output = MPoly;

    fn neg(self) -> MPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = self.ctx.neg(c);
        }
        out
    }
}

impl Sub for &MPoly {
    type Output = MPoly;

    fn sub(self, rhs: &MPoly) -> MPoly {
        self + &(-rhs)
    }
}

impl Mul for &MPoly {
    type Output = MPoly;

    fn mul(self, rhs: &MPoly) -> MPoly {
        self.check_compatible(rhs);
        let ctx = &self.ctx;
        let mut out = MPoly::zero(ctx, self.n);
        out.precision = self.precision.min(rhs.precision);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let c = ctx.mul(ca, cb);
                if !c.is_zero() {
                    out.add_term(ma.mul(mb), &c);
                }
            }
        }
        out.normalize();
        out
    }
}
