//! Truncated valuation ring O/t^M = GF(q)[t]/t^M.

use std::cmp::Ordering;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{FieldElem, FieldSpec};

/// Largest supported working precision.
pub const MAX_PRECISION: u32 = 256;

/// t-adic valuation known at a finite precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    /// The lowest nonzero coefficient sits at this index.
    Finite(u32),
    /// All coefficients below this precision vanish.
    AtLeast(u32),
}

impl Valuation {
    pub fn is_finite(self) -> bool {
        matches!(self, Valuation::Finite(_))
    }

    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }

    /// Lower bound that is always certified.
    pub fn lower_bound(self) -> u32 {
        match self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => v,
        }
    }

    /// Whether `self >= k` is certified; `None` when undecidable at this precision.
    pub fn is_at_least(self, k: u32) -> Option<bool> {
        match self {
            Valuation::Finite(v) => Some(v >= k),
            Valuation::AtLeast(m) if m >= k => Some(true),
            Valuation::AtLeast(_) => None,
        }
    }

    /// Certified strict comparison `self < other`.
    pub fn certified_lt(self, other: Valuation) -> Result<bool> {
        use Valuation::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Ok(a < b),
            (Finite(a), AtLeast(m)) if a < m => Ok(true),
            (AtLeast(m), Finite(b)) if b <= m => Ok(false),
            _ => Err(Error::PrecisionExhausted(format!(
                "cannot decide {self:?} < {other:?}"
            ))),
        }
    }

    /// Minimum of two valuations, as an ultrametric bound for a sum.
    pub fn min(self, other: Valuation) -> Valuation {
        use Valuation::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Finite(a.min(b)),
            (Finite(a), AtLeast(m)) | (AtLeast(m), Finite(a)) => {
                if a < m {
                    Finite(a)
                } else {
                    AtLeast(m)
                }
            }
            (AtLeast(a), AtLeast(b)) => AtLeast(a.min(b)),
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(m) => write!(f, ">={m}"),
        }
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Element of O/t^M: coefficient of t^i at index i, always length M.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OElem {
    coeffs: Vec<FieldElem>,
}

impl OElem {
    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> FieldElem {
        self.coeffs.get(i).copied().unwrap_or(FieldElem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// True when this is exactly the constant 1.
    pub fn is_one(&self) -> bool {
        self.coeffs.first() == Some(&FieldElem::ONE) && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// Index of the first nonzero coefficient, if any.
    pub fn lowest_nonzero(&self) -> Option<u32> {
        self.coeffs.iter().position(|c| !c.is_zero()).map(|i| i as u32)
    }
}

/// Field plus session-wide precision M.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingCtx {
    field: FieldSpec,
    precision: u32,
}

impl RingCtx {
    pub fn new(field: FieldSpec, precision: u32) -> Result<Self> {
        if precision == 0 || precision > MAX_PRECISION {
            return Err(Error::PreconditionViolated(format!(
                "precision must lie in 1..={MAX_PRECISION}, got {precision}"
            )));
        }
        Ok(RingCtx { field, precision })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    fn len(&self) -> usize {
        self.precision as usize
    }

    pub fn zero(&self) -> OElem {
        OElem { coeffs: vec![FieldElem::ZERO; self.len()] }
    }

    pub fn one(&self) -> OElem {
        self.from_field(FieldElem::ONE)
    }

    pub fn from_field(&self, c: FieldElem) -> OElem {
        let mut z = self.zero();
        z.coeffs[0] = c;
        z
    }

    pub fn from_int(&self, v: i64) -> OElem {
        self.from_field(self.field.from_int(v))
    }

    /// t^i, or zero when i >= M.
    pub fn t_pow(&self, i: u32) -> OElem {
        let mut z = self.zero();
        if i < self.precision {
            z.coeffs[i as usize] = FieldElem::ONE;
        }
        z
    }

    /// Element from t-coefficients; entries beyond M are dropped.
    pub fn from_coeffs(&self, coeffs: &[FieldElem]) -> OElem {
        let mut z = self.zero();
        for (dst, src) in z.coeffs.iter_mut().zip(coeffs) {
            *dst = *src;
        }
        z
    }

    pub fn add(&self, a: &OElem, b: &OElem) -> OElem {
        let f = &self.field;
        OElem { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| f.add(x, y)).collect() }
    }

    pub fn sub(&self, a: &OElem, b: &OElem) -> OElem {
        let f = &self.field;
        OElem { coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| f.sub(x, y)).collect() }
    }

    pub fn neg(&self, a: &OElem) -> OElem {
        OElem { coeffs: a.coeffs.iter().map(|&x| self.field.neg(x)).collect() }
    }

    pub fn mul(&self, a: &OElem, b: &OElem) -> OElem {
        let mut out = self.zero();
        mul_truncated(&self.field, &a.coeffs, &b.coeffs, &mut out.coeffs);
        out
    }

    pub fn scale(&self, c: FieldElem, a: &OElem) -> OElem {
        OElem { coeffs: a.coeffs.iter().map(|&x| self.field.mul(c, x)).collect() }
    }

    /// Multiply by t^s.
    pub fn shift_up(&self, a: &OElem, s: u32) -> OElem {
        let mut z = self.zero();
        let s = s as usize;
        if s < self.len() {
            z.coeffs[s..].copy_from_slice(&a.coeffs[..self.len() - s]);
        }
        z
    }

    /// Exact division by t^s; the top s coefficients of the result are zero.
    pub fn shift_down(&self, a: &OElem, s: u32) -> Result<OElem> {
        let s = s as usize;
        if a.coeffs[..s.min(self.len())].iter().any(|c| !c.is_zero()) {
            return Err(Error::NotIntegral(format!("element has valuation below {s}")));
        }
        let mut z = self.zero();
        if s < self.len() {
            let n = self.len() - s;
            z.coeffs[..n].copy_from_slice(&a.coeffs[s..]);
        }
        Ok(z)
    }

    /// Zero every coefficient of index >= k.
    pub fn truncate(&self, a: &OElem, k: u32) -> OElem {
        let mut z = a.clone();
        for c in z.coeffs.iter_mut().skip(k as usize) {
            *c = FieldElem::ZERO;
        }
        z
    }

    pub fn val(&self, a: &OElem) -> Valuation {
        self.val_at(a, self.precision)
    }

    /// Valuation when only the first `prec` coefficients are meaningful.
    pub fn val_at(&self, a: &OElem, prec: u32) -> Valuation {
        match a.coeffs.iter().take(prec as usize).position(|c| !c.is_zero()) {
            Some(i) => Valuation::Finite(i as u32),
            None => Valuation::AtLeast(prec.min(self.precision)),
        }
    }

    pub fn is_unit(&self, a: &OElem) -> bool {
        !a.coeffs[0].is_zero()
    }

    /// Inverse of a unit: write a = c(1 + eps) and sum the finite geometric
    /// series c^{-1} * sum_{j<M} (-eps)^j.
    pub fn inv(&self, a: &OElem) -> Result<OElem> {
        let c = a.coeffs[0];
        if c.is_zero() {
            return Err(Error::NotAUnit);
        }
        let c_inv = self.field.inv(c)?;
        let mut neg_eps = self.neg(&self.scale(c_inv, a));
        neg_eps.coeffs[0] = FieldElem::ZERO;
        let mut sum = self.one();
        let mut power = self.one();
        for _ in 1..self.precision {
            power = self.mul(&power, &neg_eps);
            if power.is_zero() {
                break;
            }
            sum = self.add(&sum, &power);
        }
        Ok(self.scale(c_inv, &sum))
    }

    pub fn pow(&self, a: &OElem, mut exp: u64) -> OElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            exp >>= 1;
            if exp > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// All q^k residues mod t^k, ordered by the base-q integer sum c_i q^i.
    pub fn enumerate(&self, k: u32) -> Result<Vec<OElem>> {
        if k > self.precision {
            return Err(Error::PrecisionExceeded { requested: k, available: self.precision });
        }
        let q = self.field.q() as u64;
        let total = q.checked_pow(k).filter(|&t| t <= 1 << 24).ok_or_else(|| {
            Error::CapExceeded(format!("q^k = {q}^{k} residues is too many to materialise"))
        })?;
        Ok((0..total)
            .map(|mut idx| {
                let mut z = self.zero();
                for c in z.coeffs.iter_mut().take(k as usize) {
                    *c = FieldElem((idx % q) as u32);
                    idx /= q;
                }
                z
            })
            .collect())
    }

    /// Canonical text, lowest t-power first: `1 + g*t + (g + 1)*t^2`.
    pub fn format(&self, a: &OElem) -> String {
        let f = &self.field;
        let parts: Vec<String> = a
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, &c)| {
                let tpow = match i {
                    0 => String::new(),
                    1 => "t".into(),
                    i => format!("t^{i}"),
                };
                let cs = f.format(c);
                match (i, c == FieldElem::ONE) {
                    (0, _) => cs,
                    (_, true) => tpow,
                    _ if cs.contains('+') => format!("({cs})*{tpow}"),
                    _ => format!("{cs}*{tpow}"),
                }
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Truncated convolution `out = a * b mod t^{out.len()}`.
#[inline]
pub(crate) fn mul_truncated(f: &FieldSpec, a: &[FieldElem], b: &[FieldElem], out: &mut [FieldElem]) {
    let k = out.len();
    out.fill(FieldElem::ZERO);
    let a_lo = match a.iter().take(k).position(|c| !c.is_zero()) {
        Some(i) => i,
        None => return,
    };
    let b_lo = match b.iter().take(k).position(|c| !c.is_zero()) {
        Some(i) => i,
        None => return,
    };
    for i in a_lo..k.min(a.len()) {
        let ai = a[i];
        if ai.is_zero() {
            continue;
        }
        if i + b_lo >= k {
            break;
        }
        for j in b_lo..(k - i).min(b.len()) {
            let bj = b[j];
            if !bj.is_zero() {
                out[i + j] = f.add(out[i + j], f.mul(ai, bj));
            }
        }
    }
}

impl PartialOrd for Valuation {
    /// Only certified orderings; incomparable pairs yield `None`.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.certified_lt(*other), other.certified_lt(*self)) {
            (Ok(true), _) => Some(Ordering::Less),
            (_, Ok(true)) => Some(Ordering::Greater),
            (Ok(false), Ok(false)) => Some(Ordering::Equal),
            _ => None,
        }
    }
}
