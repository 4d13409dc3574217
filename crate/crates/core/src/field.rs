//! Residue field GF(q), q = p^e.
//!
//! Elements are stored as the base-p integer `c_0 + c_1 p + ... + c_{e-1} p^{e-1}`
//! of their reduced coefficient vector, where `c_j` is the coefficient of
//! `g^j` and `g` is the class of `x` modulo the configured modulus. The
//! integer doubles as the enumeration index, so `elements()` starts with
//! `0, 1` and follows with `g, g + 1, ...`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest supported residue field size.
pub const MAX_FIELD_SIZE: u32 = 1 << 16;

/// Fields up to this size get full addition and multiplication tables.
const TABLE_LIMIT: u32 = 256;

/// A reduced residue-field element.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem(pub(crate) u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    /// Position of this element in [`FieldSpec::elements`].
    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Parameters and lookup tables of a finite field. Cheap to clone.
#[derive(Clone)]
pub struct FieldSpec {
    inner: Arc<Inner>,
}

struct Inner {
    p: u32,
    e: u32,
    q: u32,
    /// Monic modulus, low degree first, length e + 1. Empty when e = 1.
    modulus: Vec<u32>,
    generator_symbol: String,
    neg: Vec<u32>,
    /// exp[i] = w^i for a primitive element w, doubled to avoid a reduction.
    exp: Vec<u32>,
    log: Vec<u32>,
    add_table: Option<Vec<u16>>,
    mul_table: Option<Vec<u16>>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p
                && self.inner.e == other.inner.e
                && self.inner.modulus == other.inner.modulus
                && self.inner.generator_symbol == other.inner.generator_symbol)
    }
}

impl Eq for FieldSpec {}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.inner.p)
            .field("e", &self.inner.e)
            .field("modulus", &self.inner.modulus)
            .finish()
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Remainder of `a` modulo the monic polynomial `m` over GF(p). Both low degree first.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (j, &mj) in m.iter().enumerate() {
                let sub = (lead as u64 * mj as u64 % p as u64) as u32;
                r[shift + j] = (r[shift + j] + p - sub) % p;
            }
        }
        r.pop();
    }
    r
}

fn is_irreducible(m: &[u32], p: u32) -> bool {
    let e = m.len() - 1;
    if e <= 1 {
        return true;
    }
    // Trial division by every monic polynomial of degree 1..=e/2; the degree-1
    // pass is the root test.
    for deg in 1..=e / 2 {
        let count = (p as u64).pow(deg as u32);
        for idx in 0..count {
            let mut div = Vec::with_capacity(deg + 1);
            let mut rest = idx;
            for _ in 0..deg {
                div.push((rest % p as u64) as u32);
                rest /= p as u64;
            }
            div.push(1);
            if poly_rem(m, &div, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl FieldSpec {
    /// The prime field GF(p).
    pub fn prime(p: u32) -> Result<Self> {
        Self::new(p, 1, None)
    }

    /// GF(p^e) presented as GF(p)[g]/(modulus). `modulus` lists GF(p)
    /// coefficients low degree first, with or without the leading 1.
    pub fn new(p: u32, e: u32, modulus: Option<&[u32]>) -> Result<Self> {
        Self::with_symbol(p, e, modulus, "g")
    }

    pub fn with_symbol(p: u32, e: u32, modulus: Option<&[u32]>, symbol: &str) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if e == 0 {
            return Err(Error::InvalidField("extension degree must be at least 1".into()));
        }
        let q = (p as u64)
            .checked_pow(e)
            .filter(|&q| q <= MAX_FIELD_SIZE as u64)
            .ok_or_else(|| Error::InvalidField(format!("{p}^{e} exceeds the cap {MAX_FIELD_SIZE}")))?
            as u32;
        if symbol.is_empty()
            || symbol == "t"
            || symbol.starts_with('x')
            || !symbol.chars().all(|c| c.is_ascii_alphabetic())
        {
            return Err(Error::InvalidField(format!("unusable generator symbol `{symbol}`")));
        }

        let modulus = if e == 1 {
            Vec::new()
        } else {
            let raw = modulus.ok_or_else(|| {
                Error::InvalidField(format!("GF({p}^{e}) needs an explicit modulus"))
            })?;
            let mut m: Vec<u32> = raw.iter().map(|&c| c % p).collect();
            match m.len() as u32 {
                l if l == e => m.push(1),
                l if l == e + 1 => {
                    if m[e as usize] != 1 {
                        return Err(Error::InvalidField("modulus must be monic".into()));
                    }
                }
                l => {
                    return Err(Error::InvalidField(format!(
                        "modulus has {l} coefficients, expected {} (or {e} without the leading 1)",
                        e + 1
                    )))
                }
            }
            if !is_irreducible(&m, p) {
                return Err(Error::InvalidField(format!("modulus {m:?} is reducible over GF({p})")));
            }
            m
        };

        let mut inner = Inner {
            p,
            e,
            q,
            modulus,
            generator_symbol: symbol.to_string(),
            neg: Vec::new(),
            exp: Vec::new(),
            log: Vec::new(),
            add_table: None,
            mul_table: None,
        };
        inner.neg = (0..q).map(|a| inner.slow_neg(a)).collect();
        inner.build_log_tables();
        if q <= TABLE_LIMIT {
            let mut add = vec![0u16; (q * q) as usize];
            let mut mul = vec![0u16; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    add[(a * q + b) as usize] = inner.slow_add(a, b) as u16;
                    mul[(a * q + b) as usize] = inner.slow_mul(a, b) as u16;
                }
            }
            inner.add_table = Some(add);
            inner.mul_table = Some(mul);
        }
        Ok(FieldSpec { inner: Arc::new(inner) })
    }

    pub fn p(&self) -> u32 {
        self.inner.p
    }

    pub fn e(&self) -> u32 {
        self.inner.e
    }

    pub fn q(&self) -> u32 {
        self.inner.q
    }

    /// Monic modulus (low degree first); empty for prime fields.
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    pub fn generator_symbol(&self) -> &str {
        &self.inner.generator_symbol
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem::ZERO
    }

    pub fn one(&self) -> FieldElem {
        FieldElem::ONE
    }

    /// The class of `g`; `None` for prime fields.
    pub fn generator(&self) -> Option<FieldElem> {
        (self.inner.e > 1).then_some(FieldElem(self.inner.p))
    }

    /// Reduce an integer into the prime subfield.
    pub fn from_int(&self, v: i64) -> FieldElem {
        FieldElem(v.rem_euclid(self.inner.p as i64) as u32)
    }

    /// Element with the given `g`-coefficients (low degree first), each reduced mod p.
    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElem> {
        if coeffs.len() > self.inner.e as usize {
            return Err(Error::InvalidField(format!(
                "{} coefficients given for an extension of degree {}",
                coeffs.len(),
                self.inner.e
            )));
        }
        let p = self.inner.p;
        let mut v = 0u32;
        for &c in coeffs.iter().rev() {
            v = v * p + c % p;
        }
        Ok(FieldElem(v))
    }

    /// Element at position `index` of [`FieldSpec::elements`].
    pub fn element(&self, index: u32) -> Option<FieldElem> {
        (index < self.inner.q).then_some(FieldElem(index))
    }

    /// Coefficient vector of length e (low degree first).
    pub fn coeffs(&self, a: FieldElem) -> Vec<u32> {
        let p = self.inner.p;
        let mut v = a.0;
        (0..self.inner.e)
            .map(|_| {
                let c = v % p;
                v /= p;
                c
            })
            .collect()
    }

    /// All q elements: 0, 1, then increasing base-p index.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.inner.q).map(FieldElem)
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let inner = &*self.inner;
        if let Some(t) = &inner.add_table {
            return FieldElem(t[(a.0 * inner.q + b.0) as usize] as u32);
        }
        FieldElem(inner.slow_add(a.0, b.0))
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        FieldElem(self.inner.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let inner = &*self.inner;
        if let Some(t) = &inner.mul_table {
            return FieldElem(t[(a.0 * inner.q + b.0) as usize] as u32);
        }
        if a.0 == 0 || b.0 == 0 {
            return FieldElem::ZERO;
        }
        if inner.e == 1 {
            return FieldElem((a.0 as u64 * b.0 as u64 % inner.p as u64) as u32);
        }
        let i = inner.log[a.0 as usize] + inner.log[b.0 as usize];
        FieldElem(inner.exp[i as usize])
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let inner = &*self.inner;
        let order = inner.q - 1;
        let l = inner.log[a.0 as usize];
        Ok(FieldElem(inner.exp[((order - l) % order) as usize]))
    }

    pub fn pow(&self, a: FieldElem, mut exp: u64) -> FieldElem {
        let mut base = a;
        let mut acc = FieldElem::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Canonical text: an integer for prime fields, otherwise a polynomial in
    /// the generator symbol, highest degree first (`g^2 + 2*g + 1`).
    pub fn format(&self, a: FieldElem) -> String {
        if self.inner.e == 1 {
            return a.0.to_string();
        }
        let sym = &self.inner.generator_symbol;
        let parts: Vec<String> = self
            .coeffs(a)
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, &c)| c != 0)
            .map(|(j, &c)| match (j, c) {
                (0, c) => c.to_string(),
                (1, 1) => sym.clone(),
                (1, c) => format!("{c}*{sym}"),
                (j, 1) => format!("{sym}^{j}"),
                (j, c) => format!("{c}*{sym}^{j}"),
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

impl Inner {
    fn slow_add(&self, mut a: u32, mut b: u32) -> u32 {
        let p = self.p;
        if self.e == 1 {
            return (a + b) % p;
        }
        if p == 2 {
            return a ^ b;
        }
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.e {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place *= p;
        }
        out
    }

    fn slow_neg(&self, mut a: u32) -> u32 {
        let p = self.p;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.e {
            out += ((p - a % p) % p) * place;
            a /= p;
            place *= p;
        }
        out
    }

    fn digits(&self, mut a: u32) -> Vec<u32> {
        (0..self.e)
            .map(|_| {
                let c = a % self.p;
                a /= self.p;
                c
            })
            .collect()
    }

    fn undigits(&self, d: &[u32]) -> u32 {
        d.iter().rev().fold(0, |v, &c| v * self.p + c)
    }

    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        if self.e == 1 {
            return (a as u64 * b as u64 % p) as u32;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u32; da.len() + db.len() - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p) as u32;
            }
        }
        let mut r = poly_rem(&prod, &self.modulus, self.p);
        r.resize(self.e as usize, 0);
        self.undigits(&r)
    }

    fn build_log_tables(&mut self) {
        let q = self.q;
        let order = q - 1;
        let mut exp = vec![0u32; 2 * order as usize];
        let mut log = vec![0u32; q as usize];
        for w in 1..q {
            let mut x = 1u32;
            let mut ok = true;
            for i in 0..order {
                exp[i as usize] = x;
                log[x as usize] = i;
                x = self.slow_mul(x, w);
                if x == 1 && i + 1 < order {
                    ok = false;
                    break;
                }
            }
            if ok {
                let (lo, hi) = exp.split_at_mut(order as usize);
                hi.copy_from_slice(lo);
                self.exp = exp;
                self.log = log;
                return;
            }
        }
        unreachable!("the multiplicative group of a finite field is cyclic");
    }
}
