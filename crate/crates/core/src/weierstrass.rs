//! Distinguished forms, Weierstrass division and preparation.
//!
//! A polynomial f = sum a_s(x') x_n^s of Gauss norm 1 is distinguished of
//! order s0 when a_{s0} is a unit of the Tate algebra in x', attains the norm,
//! and every a_s with s > s0 has strictly smaller norm. For such f every g
//! divides as g = Q f + R with deg_{x_n} R < s0, and f = u^{-1} omega with
//! omega monic of degree s0.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::field::FieldElem;
use crate::mpoly::{LinearShear, MPoly, ScaleMap, ShearMap};
use crate::ring::{RingCtx, Valuation};

/// Attempt budget for [`make_distinguished`].
pub const SEARCH_BUDGET: u32 = 64;

/// Largest x_n-degree a power-shear candidate may produce.
const MAX_SHEAR_DEGREE: u64 = 1 << 16;

/// Evidence that f is distinguished in x_n of order `s0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistinguishedInfo {
    pub s0: u32,
    /// Valuation of the constant term of a_{s0}.
    pub leading_unit_val: Valuation,
    /// (s, gauss_val(a_s)) for every nonzero a_s with s > s0.
    pub higher_coeff_vals: Vec<(u32, Valuation)>,
    /// Gauss norm of f (equal to that of a_{s0}).
    pub norm_val: Valuation,
}

/// One step of the reduction pipeline, each preserving the local threshold at 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Transform {
    Identity,
    Scale(ScaleMap),
    Shear(ShearMap),
    Linear(LinearShear),
    UnitMultiply,
}

impl Transform {
    pub fn kind(&self) -> &'static str {
        match self {
            Transform::Identity => "identity",
            Transform::Scale(_) => "scale",
            Transform::Shear(_) => "shear",
            Transform::Linear(_) => "linear_shear",
            Transform::UnitMultiply => "unit_multiply",
        }
    }

    /// Why the step leaves the threshold unchanged.
    pub fn justification(&self) -> &'static str {
        match self {
            Transform::Identity => "already distinguished",
            Transform::Scale(s) if s.a.iter().all(|&a| a == 0) => "constant rescale",
            Transform::Scale(_) => "coordinate scaling",
            Transform::Shear(_) => "polynomial automorphism",
            Transform::Linear(_) => "linear automorphism with unit coefficients",
            Transform::UnitMultiply => "multiplication by a unit",
        }
    }

    pub fn to_json(&self, ctx: &RingCtx) -> Value {
        let params = match self {
            Transform::Identity | Transform::UnitMultiply => json!({}),
            Transform::Scale(s) => json!({ "a": s.a, "b": s.b }),
            Transform::Shear(s) => json!({ "d": s.exponents() }),
            Transform::Linear(l) => {
                json!({ "c": l.units().iter().map(|c| ctx.format(c)).collect::<Vec<_>>() })
            }
        };
        json!({ "kind": self.kind(), "justification": self.justification(), "params": params })
    }
}

/// Tate unit test at Gauss norm q^{-v}: the constant term has valuation v and
/// every other coefficient valuation > v.
fn is_tate_unit_at(a: &MPoly, v: u32) -> bool {
    let c0 = a.constant_term();
    if c0.lowest_nonzero() != Some(v) {
        return false;
    }
    let zero = vec![0; a.n()];
    a.terms()
        .filter(|(e, _)| *e != zero.as_slice())
        .all(|(_, c)| c.lowest_nonzero().is_some_and(|w| w > v))
}

/// Detect the distinguished order of `f` in its last variable.
pub fn find_distinguished_order(f: &MPoly) -> Result<DistinguishedInfo> {
    if f.n() == 0 {
        return Err(Error::PreconditionViolated("need at least one variable".into()));
    }
    let v = match f.gauss_val() {
        Valuation::Finite(v) => v,
        Valuation::AtLeast(_) => {
            return Err(Error::IndeterminateInput("polynomial vanishes at this precision".into()))
        }
    };
    if f.constant_term().lowest_nonzero() == Some(v) {
        return Err(Error::UnitInput);
    }
    let coeffs = f.coeffs_in_last_var();
    let mut higher = Vec::new();
    for s in (1..coeffs.len()).rev() {
        let a = &coeffs[s];
        if a.is_zero() {
            continue;
        }
        let gv = a.gauss_val();
        if gv != Valuation::Finite(v) {
            higher.push((s as u32, gv));
            continue;
        }
        if !is_tate_unit_at(a, v) {
            return Err(Error::NotDistinguished);
        }
        higher.reverse();
        return Ok(DistinguishedInfo {
            s0: s as u32,
            leading_unit_val: Valuation::Finite(v),
            higher_coeff_vals: higher,
            norm_val: Valuation::Finite(v),
        });
    }
    Err(Error::NotDistinguished)
}

/// Exponents d_i = (delta+1)^{n-i}, i = 1..n-1, of the degree-injective shear.
pub fn power_shear_exponents(n: usize, delta: u32) -> Vec<u32> {
    (1..n).map(|i| (delta + 1).saturating_pow((n - i) as u32)).collect()
}

/// x_n-degree of the monomial x^e after the shear with exponents `d`.
pub fn sheared_degree(e: &[u32], d: &[u32]) -> u64 {
    let n = e.len();
    e[..n - 1].iter().zip(d).map(|(&a, &b)| a as u64 * b as u64).sum::<u64>() + e[n - 1] as u64
}

fn require_norm_one(f: &MPoly) -> Result<()> {
    match f.gauss_val() {
        Valuation::Finite(0) => Ok(()),
        Valuation::AtLeast(_) => {
            Err(Error::IndeterminateInput("polynomial vanishes at this precision".into()))
        }
        v => Err(Error::PreconditionViolated(format!(
            "Gauss norm valuation must be 0, found {v}; normalize first"
        ))),
    }
}

fn random_unit(ctx: &RingCtx, rng: &mut ChaCha8Rng) -> crate::ring::OElem {
    let q = ctx.q();
    let mut coeffs: Vec<FieldElem> = (0..ctx.precision())
        .map(|_| ctx.field().element(rng.gen_range(0..q)).unwrap())
        .collect();
    coeffs[0] = ctx.field().element(rng.gen_range(1..q)).unwrap();
    ctx.from_coeffs(&coeffs)
}

/// Smallest a >= 0 with w_i + a * (deg_i - base) > target for every listed
/// (valuation, degree) with degree > base. None when no such a exists.
fn smallest_dominating_shift(items: &[(u32, u32)], base: u32, target: u32) -> u32 {
    items
        .iter()
        .filter(|&&(_, d)| d > base)
        .map(|&(w, d)| if w > target { 0 } else { (target - w) / (d - base) + 1 })
        .max()
        .unwrap_or(0)
}

/// One generic linear-shear attempt: normalize the homogeneous part of lowest
/// degree K, apply x_i -> x_i + c_i x_n, then rescale so that the pure x_n^K
/// coefficient dominates.
fn linear_attempt(f: &MPoly, rng: &mut ChaCha8Rng) -> Result<Option<(Vec<Transform>, MPoly)>> {
    let ctx = f.ctx();
    let n = f.n();
    let k = f.order_at_zero()?;
    let items: Vec<(u32, u32)> =
        f.terms().map(|(e, c)| (c.lowest_nonzero().unwrap(), e.iter().sum())).collect();
    let v_k = items.iter().filter(|&&(_, d)| d == k).map(|&(w, _)| w).min().unwrap();
    let a = smallest_dominating_shift(&items, k, v_k);
    let first = ScaleMap { a: vec![a; n], b: v_k + a * k };
    let g = if first.is_identity() { f.clone() } else { f.rescale(&first)? };

    let units: Vec<_> = (0..n - 1).map(|_| random_unit(ctx, rng)).collect();
    let shear = LinearShear::new(ctx, units)?;
    let h = g.substitute_linear_shear(&shear)?;

    let pure: Vec<(u32, u32)> = h
        .terms()
        .filter(|(e, _)| e[..n - 1].iter().all(|&x| x == 0))
        .map(|(e, c)| (c.lowest_nonzero().unwrap(), e[n - 1]))
        .collect();
    let Some(&(k0, _)) = pure.iter().find(|&&(_, s)| s == k) else {
        return Ok(None);
    };
    let a2 = smallest_dominating_shift(&pure, k, k0);
    let k1 = k0 + a2 * k;
    let mut sa = vec![a2 + k1 + 1; n - 1];
    sa.push(a2);
    let second = ScaleMap { a: sa, b: k1 };
    let out = if second.is_identity() { h } else { h.rescale(&second)? };

    let mut trail = Vec::new();
    if !first.is_identity() {
        trail.push(Transform::Scale(first));
    }
    trail.push(Transform::Linear(shear));
    if !second.is_identity() {
        trail.push(Transform::Scale(second));
    }
    Ok(Some((trail, out)))
}

/// Find coordinates in which `f` is distinguished in x_n.
///
/// Tries the identity, then degree-graded power shears ending with the
/// degree-injective one, then seeded generic linear shears, within
/// [`SEARCH_BUDGET`] attempts.
pub fn make_distinguished(f: &MPoly, seed: u64) -> Result<(Vec<Transform>, MPoly, DistinguishedInfo)> {
    require_norm_one(f)?;
    let mut hit_precision = false;
    let mut attempts = 0u32;

    match find_distinguished_order(f) {
        Ok(info) => return Ok((Vec::new(), f.clone(), info)),
        Err(Error::NotDistinguished) => {}
        Err(e) => return Err(e),
    }
    attempts += 1;

    let n = f.n();
    if n >= 2 {
        let delta = f.total_degree().unwrap_or(0);
        let mut deltas: Vec<u32> = (0..delta).take((SEARCH_BUDGET / 2) as usize).collect();
        deltas.push(delta);
        for dl in deltas {
            if attempts >= SEARCH_BUDGET {
                break;
            }
            let d = power_shear_exponents(n, dl);
            let top = f.terms().map(|(e, _)| sheared_degree(e, &d)).max().unwrap_or(0);
            if top > MAX_SHEAR_DEGREE {
                continue;
            }
            attempts += 1;
            let shear = ShearMap::new(d)?;
            let g = f.substitute_shear(&shear)?;
            match find_distinguished_order(&g) {
                Ok(info) => return Ok((vec![Transform::Shear(shear)], g, info)),
                Err(Error::NotDistinguished) | Err(Error::UnitInput) => {}
                Err(Error::PrecisionExhausted(_)) => hit_precision = true,
                Err(e) => return Err(e),
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        while attempts < SEARCH_BUDGET {
            attempts += 1;
            match linear_attempt(f, &mut rng) {
                Ok(Some((trail, g))) => match find_distinguished_order(&g) {
                    Ok(info) => return Ok((trail, g, info)),
                    Err(Error::PrecisionExhausted(_)) => hit_precision = true,
                    Err(_) => {}
                },
                Ok(None) => {}
                Err(Error::PrecisionExhausted(_)) | Err(Error::NotIntegral(_)) => hit_precision = true,
                Err(e) => return Err(e),
            }
        }
    }
    if hit_precision {
        Err(Error::PrecisionExhausted(format!(
            "no distinguished form certified within {SEARCH_BUDGET} attempts at precision {}",
            f.precision()
        )))
    } else {
        Err(Error::SearchExhausted(SEARCH_BUDGET))
    }
}

/// Inverse of a Tate unit a = c(1 + eps) as c^{-1} sum_j (-eps)^j.
fn tate_inverse(a: &MPoly) -> Result<MPoly> {
    let ctx = a.ctx();
    let c_inv = ctx.inv(&a.constant_term())?;
    let normalized = a.scale(&c_inv);
    let one = MPoly::one(ctx, a.n()).with_precision(a.precision());
    let neg_eps = &one - &normalized;
    let mut sum = one.clone();
    let mut power = one;
    for _ in 1..a.precision() {
        power = &power * &neg_eps;
        if power.is_zero() {
            break;
        }
        sum = &sum + &power;
    }
    if !power.is_zero() && !(&power * &neg_eps).is_zero() {
        return Err(Error::CertificationFailed("unit inverse series did not terminate".into()));
    }
    Ok(sum.scale(&c_inv))
}

/// Long division of `r` by a polynomial `head` monic of degree s0 in x_n.
fn divide_by_monic(r: &MPoly, head: &[MPoly], s0: usize) -> (MPoly, MPoly) {
    let ctx = r.ctx();
    let mut rc = r.coeffs_in_last_var();
    let inner = MPoly::zero(ctx, r.n() - 1).with_precision(r.precision());
    if rc.len() <= s0 {
        return (MPoly::zero(ctx, r.n()).with_precision(r.precision()), r.clone());
    }
    let mut qc = vec![inner.clone(); rc.len() - s0];
    for deg in (s0..rc.len()).rev() {
        let lc = std::mem::replace(&mut rc[deg], inner.clone());
        if lc.is_zero() {
            continue;
        }
        for (j, h) in head.iter().enumerate().take(s0) {
            let idx = deg - s0 + j;
            rc[idx] = &rc[idx] - &(&lc * h);
        }
        qc[deg - s0] = lc;
    }
    rc.truncate(s0);
    (MPoly::from_last_var_coeffs(ctx, &qc), MPoly::from_last_var_coeffs(ctx, &rc))
}

/// Weierstrass division g = quot * f + rem with deg_{x_n} rem < s0.
///
/// Iterates polynomial division by the head of f (degrees <= s0); the part of
/// f above s0 has positive valuation, so each round the residual gains a
/// factor of t.
pub fn weierstrass_divide(g: &MPoly, f: &MPoly, info: &DistinguishedInfo) -> Result<(MPoly, MPoly)> {
    if g.n() != f.n() || g.ctx() != f.ctx() || f.n() == 0 {
        return Err(Error::PreconditionViolated("dividend and divisor are incompatible".into()));
    }
    if info.norm_val != Valuation::Finite(0) {
        return Err(Error::PreconditionViolated("divisor must have Gauss norm 1".into()));
    }
    let ctx = f.ctx();
    let n = f.n();
    let s0 = info.s0 as usize;
    let prec = g.precision().min(f.precision());
    let f = f.clone().with_precision(prec);
    let fc = f.coeffs_in_last_var();
    if fc.len() <= s0 {
        return Err(Error::NotDistinguished);
    }
    let lead_inv = tate_inverse(&fc[s0])?;
    let fc: Vec<MPoly> = fc.iter().map(|a| &lead_inv * a).collect();
    let head = &fc[..=s0];
    let mut tail_coeffs: Vec<MPoly> = fc.clone();
    for c in tail_coeffs.iter_mut().take(s0 + 1) {
        *c = MPoly::zero(ctx, n - 1).with_precision(prec);
    }
    let tail = MPoly::from_last_var_coeffs(ctx, &tail_coeffs);
    if !tail.is_zero() && tail.gauss_val().lower_bound() == 0 {
        return Err(Error::NotDistinguished);
    }

    let zero = MPoly::zero(ctx, n).with_precision(prec);
    let (mut quot, mut rem) = (zero.clone(), zero);
    let mut residual = g.clone().with_precision(prec);
    let mut rounds = 0;
    while !residual.is_zero() {
        rounds += 1;
        if rounds > prec + 1 {
            return Err(Error::CertificationFailed("division did not contract".into()));
        }
        let (qi, ri) = divide_by_monic(&residual, head, s0);
        quot = &quot + &qi;
        rem = &rem + &ri;
        let next = -&(&qi * &tail);
        if !next.is_zero() && next.gauss_val().lower_bound() <= residual.gauss_val().lower_bound() {
            return Err(Error::CertificationFailed("residual valuation did not increase".into()));
        }
        residual = next;
    }
    Ok((&quot * &lead_inv.embed_with_last_var(), rem))
}

/// Output of [`weierstrass_prepare`] and [`reduce_to_weierstrass`].
#[derive(Clone, Debug)]
pub struct PreparationResult {
    pub omega: MPoly,
    pub unit_u: MPoly,
    pub s0: u32,
    pub certified_precision: u32,
    pub transforms: Vec<Transform>,
    /// The polynomial after every coordinate change, before unit multiplication.
    pub transformed: MPoly,
}

impl PreparationResult {
    pub fn to_json(&self) -> Value {
        let ctx = self.omega.ctx();
        json!({
            "s0": self.s0,
            "omega": self.omega.to_string(),
            "unit_u": self.unit_u.to_string(),
            "certified_precision": self.certified_precision,
            "transformed": self.transformed.to_string(),
            "transforms": self.transforms.iter().map(|t| t.to_json(ctx)).collect::<Vec<_>>(),
        })
    }
}

/// Write f = u^{-1} omega with omega a Weierstrass polynomial of degree s0,
/// checked by explicit multiplication.
pub fn weierstrass_prepare(f: &MPoly, info: &DistinguishedInfo) -> Result<PreparationResult> {
    let ctx = f.ctx();
    let n = f.n();
    let mut e = vec![0; n];
    e[n - 1] = info.s0;
    let xs = MPoly::monomial(ctx, n, e.clone(), ctx.one()).with_precision(f.precision());
    let (u, r) = weierstrass_divide(&xs, f, info)?;
    let omega = &xs - &r;
    let prec = u.precision().min(omega.precision());

    if !(&(&u * f) - &omega).is_zero() {
        return Err(Error::CertificationFailed("u * f differs from omega".into()));
    }
    let monic = omega.degree_in_last() == Some(info.s0)
        && omega.coeff(&e).is_one()
        && omega.terms().filter(|(m, _)| m[n - 1] == info.s0).count() == 1;
    if !monic || omega.gauss_val() != Valuation::Finite(0) {
        return Err(Error::CertificationFailed("omega is not a Weierstrass polynomial".into()));
    }
    if !is_tate_unit_at(&u, 0) {
        return Err(Error::CertificationFailed("u is not a unit".into()));
    }
    Ok(PreparationResult {
        omega,
        unit_u: u,
        s0: info.s0,
        certified_precision: prec,
        transforms: Vec::new(),
        transformed: f.clone(),
    })
}

/// Settings for [`reduce_to_weierstrass`].
#[derive(Clone, Copy, Debug, Default)]
pub struct PrepareConfig {
    pub seed: u64,
}

/// Normalize the norm, move to distinguished coordinates and prepare.
pub fn reduce_to_weierstrass(f: &MPoly, config: PrepareConfig) -> Result<PreparationResult> {
    let mut trail = Vec::new();
    let mut g = f.clone();
    match f.gauss_val() {
        Valuation::AtLeast(_) => {
            return Err(Error::IndeterminateInput("polynomial vanishes at this precision".into()))
        }
        Valuation::Finite(0) => {}
        Valuation::Finite(v) => {
            let s = ScaleMap::divide_by(f.n(), v);
            g = g.rescale(&s)?;
            trail.push(Transform::Scale(s));
        }
    }
    if g.constant_term().lowest_nonzero() == Some(0) {
        return Err(Error::UnitInput);
    }
    let (steps, g, info) = make_distinguished(&g, config.seed)?;
    if steps.is_empty() {
        trail.push(Transform::Identity);
    }
    trail.extend(steps);
    let mut prep = weierstrass_prepare(&g, &info)?;
    if !prep.unit_u.congruent(&MPoly::one(g.ctx(), g.n())) {
        trail.push(Transform::UnitMultiply);
    }
    prep.transforms = trail;
    Ok(prep)
}
