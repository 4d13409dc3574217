//! Exact arithmetic in Q(phi), phi = p^{1/r} the positive real root.
//!
//! X^r - p is Eisenstein at p, so 1, phi, ..., phi^{r-1} is a Q-basis and an
//! element is zero exactly when all its coordinates are. Signs of nonzero
//! elements are decided by interval evaluation with bounds floor(phi^i 2^B)
//! from integer r-th roots, doubling B until the interval excludes 0.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Q(p^{1/r}).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadicalField {
    p: u32,
    r: u32,
}

/// sum_i c_i phi^i with 0 <= i < r.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadicalElem {
    field: RadicalField,
    coeffs: Vec<BigRational>,
}

impl RadicalField {
    pub fn new(p: u32, r: u32) -> Self {
        assert!(p >= 2 && r >= 1, "need a prime p and r >= 1");
        RadicalField { p, r }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn zero(&self) -> RadicalElem {
        RadicalElem { field: self.clone(), coeffs: vec![BigRational::zero(); self.r as usize] }
    }

    pub fn rational(&self, c: BigRational) -> RadicalElem {
        let mut z = self.zero();
        z.coeffs[0] = c;
        z
    }

    /// phi^m for any integer m: phi^{qr + i} = p^q phi^i.
    pub fn phi_pow(&self, m: i64) -> RadicalElem {
        let r = self.r as i64;
        let (quot, rem) = m.div_mod_floor(&r);
        let p = BigInt::from(self.p);
        let scale = if quot >= 0 {
            BigRational::from_integer(num_traits::pow(p, quot as usize))
        } else {
            BigRational::new(BigInt::one(), num_traits::pow(p, (-quot) as usize))
        };
        let mut z = self.zero();
        z.coeffs[rem as usize] = scale;
        z
    }
}

impl RadicalElem {
    pub fn field(&self) -> &RadicalField {
        &self.field
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &RadicalElem) -> RadicalElem {
        assert_eq!(self.field, o.field);
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect();
        RadicalElem { field: self.field.clone(), coeffs }
    }

    pub fn neg(&self) -> RadicalElem {
        RadicalElem { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, o: &RadicalElem) -> RadicalElem {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &BigRational) -> RadicalElem {
        RadicalElem { field: self.field.clone(), coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn mul(&self, o: &RadicalElem) -> RadicalElem {
        assert_eq!(self.field, o.field);
        let r = self.field.r as usize;
        let p = BigRational::from_integer(BigInt::from(self.field.p));
        let mut out = self.field.zero();
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let prod = a * b;
                if i + j >= r {
                    out.coeffs[i + j - r] += prod * &p;
                } else {
                    out.coeffs[i + j] += prod;
                }
            }
        }
        out
    }

    /// Exact sign of the real number this element denotes.
    pub fn sign(&self) -> Ordering {
        if self.is_zero() {
            return Ordering::Equal;
        }
        let denom = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * &denom).to_integer()).collect();
        let r = self.field.r;
        let p = BigUint::from(self.field.p);
        let mut bits = 64u32;
        loop {
            // floor(phi^i 2^bits) <= phi^i 2^bits < floor(...) + 1.
            let (mut lo, mut hi) = (BigInt::zero(), BigInt::zero());
            for (i, c) in ints.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let radicand = p.pow(i as u32) << (bits as usize * r as usize);
                let f = BigInt::from_biguint(Sign::Plus, radicand.nth_root(r));
                let exact = i == 0;
                let g = if exact { f.clone() } else { &f + 1 };
                if c.is_positive() {
                    lo += c * &f;
                    hi += c * &g;
                } else {
                    lo += c * &g;
                    hi += c * &f;
                }
            }
            if lo.is_positive() {
                return Ordering::Greater;
            }
            if hi.is_negative() {
                return Ordering::Less;
            }
            bits *= 2;
        }
    }

    pub fn to_f64(&self) -> f64 {
        let phi = (self.field.p as f64).powf(1.0 / self.field.r as f64);
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.to_f64().unwrap_or(f64::NAN) * phi.powi(i as i32))
            .sum()
    }

    /// The rational value when every irrational coordinate vanishes.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.coeffs[1..].iter().all(|c| c.is_zero()).then(|| &self.coeffs[0])
    }
}

impl fmt::Display for RadicalElem {
    /// `a + b*p^(1/r) + ...`, lowest power first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.field.r;
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| {
                if i == 0 {
                    c.to_string()
                } else {
                    let g = (i as u32).gcd(&r);
                    format!("{c}*{}^({}/{})", self.field.p, i as u32 / g, r / g)
                }
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn powers_reduce() {
        let k = RadicalField::new(2, 4);
        assert_eq!(k.phi_pow(4), k.rational(rat(2, 1)));
        assert_eq!(k.phi_pow(-4), k.rational(rat(1, 2)));
        assert_eq!(k.phi_pow(3).mul(&k.phi_pow(5)), k.rational(rat(4, 1)));
        assert_eq!(k.phi_pow(-1).mul(&k.phi_pow(1)), k.rational(rat(1, 1)));
    }

    #[test]
    fn signs() {
        let k = RadicalField::new(2, 2);
        // sqrt2 - 1.41421356 > 0 and sqrt2 - 1.41421357 < 0.
        let s = k.phi_pow(1);
        assert_eq!(s.sub(&k.rational(rat(141421356, 100000000))).sign(), Ordering::Greater);
        assert_eq!(s.sub(&k.rational(rat(141421357, 100000000))).sign(), Ordering::Less);
        assert_eq!(k.zero().sign(), Ordering::Equal);
        let k = RadicalField::new(3, 3);
        // 3^(2/3) = 2.0800838...
        let c = k.phi_pow(2);
        assert_eq!(c.sub(&k.rational(rat(208008, 100000))).sign(), Ordering::Greater);
        assert_eq!(c.sub(&k.rational(rat(208009, 100000))).sign(), Ordering::Less);
    }

    #[test]
    fn sign_agrees_with_floats_on_random_combinations() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..300 {
            let k = RadicalField::new([2, 3, 5][rng.gen_range(0..3)], rng.gen_range(1..6));
            let mut x = k.zero();
            for i in 0..k.r() as i64 {
                x = x.add(&k.phi_pow(i).scale(&rat(rng.gen_range(-50..50), rng.gen_range(1..9))));
            }
            let f = x.to_f64();
            if f.abs() > 1e-6 {
                assert_eq!(x.sign(), if f > 0.0 { Ordering::Greater } else { Ordering::Less });
            }
        }
    }

    #[test]
    fn display() {
        let k = RadicalField::new(2, 4);
        let x = k.rational(rat(3, 2)).add(&k.phi_pow(2));
        assert_eq!(x.to_string(), "3/2 + 1*2^(1/2)");
        assert_eq!(k.zero().to_string(), "0");
    }
}
