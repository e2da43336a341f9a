//! Coefficient fields: the rationals, prime fields F_p and extension fields F_{p^k}.
//!
//! Fields are runtime values (a prime field carries its modulus), so elements are
//! plain data and every operation goes through the field object.

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{is_prime, mul_mod, pow_mod, prime_divisors};
use crate::error::{Error, Result};
use crate::poly::PolyRing;

pub trait Field: Clone + Debug + Send + Sync {
    type Elem: Clone + PartialEq + Eq + Hash + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_i64(&self, n: i64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Multiplicative inverse; `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// 0 for the rationals.
    fn characteristic(&self) -> u64;

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Option<Self::Elem> {
        self.inv(b).map(|bi| self.mul(a, &bi))
    }

    fn pow(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

/// Finite fields additionally support enumeration, square tests and square roots.
pub trait FiniteField: Field {
    fn order(&self) -> u64;
    /// The `i`-th element in a fixed enumeration, `0 <= i < order()`. Index 0 is zero.
    fn element(&self, i: u64) -> Self::Elem;
    fn index_of(&self, a: &Self::Elem) -> u64;

    fn is_square(&self, a: &Self::Elem) -> bool {
        self.is_zero(a) || self.is_one(&self.pow(a, (self.order() - 1) / 2))
    }

    /// Quadratic character: 0, 1 or -1.
    fn chi(&self, a: &Self::Elem) -> i32 {
        if self.is_zero(a) {
            0
        } else if self.is_one(&self.pow(a, (self.order() - 1) / 2)) {
            1
        } else {
            -1
        }
    }

    /// Tonelli-Shanks in odd characteristic.
    fn sqrt(&self, a: &Self::Elem) -> Option<Self::Elem> {
        if self.is_zero(a) {
            return Some(self.zero());
        }
        if !self.is_square(a) {
            return None;
        }
        let q = self.order();
        let mut t_exp = q - 1;
        let mut s = 0;
        while t_exp % 2 == 0 {
            t_exp /= 2;
            s += 1;
        }
        let z = (1..q)
            .map(|i| self.element(i))
            .find(|z| !self.is_square(z))
            .expect("odd finite field has a non-residue");
        let mut m = s;
        let mut c = self.pow(&z, t_exp);
        let mut t = self.pow(a, t_exp);
        let mut r = self.pow(a, (t_exp + 1) / 2);
        while !self.is_one(&t) {
            let mut i = 0;
            let mut tt = t.clone();
            while !self.is_one(&tt) {
                tt = self.mul(&tt, &tt);
                i += 1;
            }
            let mut b = c.clone();
            for _ in 0..(m - i - 1) {
                b = self.mul(&b, &b);
            }
            m = i;
            c = self.mul(&b, &b);
            t = self.mul(&t, &c);
            r = self.mul(&r, &b);
        }
        Some(r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_i64(&self, n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn inv(&self, a: &BigRational) -> Option<BigRational> {
        (!a.is_zero()).then(|| a.recip())
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn characteristic(&self) -> u64 {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidParameter(format!("{p} is not prime")));
        }
        Ok(PrimeField { p })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Reduces a rational into F_p; `None` when p divides the denominator.
    pub fn from_rational(&self, q: &BigRational) -> Option<u64> {
        let bp = BigInt::from(self.p);
        let num = q.numer().mod_floor_u64(&bp);
        let den = q.denom().mod_floor_u64(&bp);
        self.inv(&den).map(|d| mul_mod(num, d, self.p))
    }

    /// Symmetric lift into (-p/2, p/2].
    pub fn lift(&self, a: u64) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }
}

trait ModFloorU64 {
    fn mod_floor_u64(&self, m: &BigInt) -> u64;
}

impl ModFloorU64 for BigInt {
    fn mod_floor_u64(&self, m: &BigInt) -> u64 {
        num_integer::Integer::mod_floor(self, m).to_u64().unwrap()
    }
}

impl Field for PrimeField {
    type Elem = u64;

    fn zero(&self) -> u64 {
        0
    }
    fn one(&self) -> u64 {
        1 % self.p
    }
    fn from_i64(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        mul_mod(*a, *b, self.p)
    }
    fn inv(&self, a: &u64) -> Option<u64> {
        (*a % self.p != 0).then(|| pow_mod(*a, self.p - 2, self.p))
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn pow(&self, a: &u64, e: u64) -> u64 {
        pow_mod(*a, e, self.p)
    }
}

impl FiniteField for PrimeField {
    fn order(&self) -> u64 {
        self.p
    }
    fn element(&self, i: u64) -> u64 {
        i
    }
    fn index_of(&self, a: &u64) -> u64 {
        *a
    }
}

/// F_{p^k} = F_p[z]/(modulus), elements stored as coefficient vectors of length k
/// (constant term first).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExtensionField {
    base: PrimeField,
    k: usize,
    modulus: Vec<u64>,
    order: u64,
}

impl ExtensionField {
    /// Builds F_{p^k} with the least monic irreducible modulus, where monic
    /// polynomials of degree k are ordered by comparing coefficients from
    /// z^(k-1) down to the constant term.
    pub fn new(p: u64, k: usize) -> Result<Self> {
        let base = PrimeField::new(p)?;
        if k == 0 {
            return Err(Error::InvalidParameter("extension degree must be positive".into()));
        }
        let order = p
            .checked_pow(k as u32)
            .ok_or_else(|| Error::Budget(format!("{p}^{k} overflows")))?;
        let modulus = least_irreducible(base, k);
        Ok(ExtensionField { base, k, modulus, order })
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn base(&self) -> PrimeField {
        self.base
    }

    /// Monic modulus, constant term first (length k + 1).
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn embed(&self, a: u64) -> Vec<u64> {
        let mut v = vec![0; self.k];
        v[0] = a % self.base.p;
        v
    }
}

fn least_irreducible(base: PrimeField, k: usize) -> Vec<u64> {
    let p = base.p();
    let count = p.pow(k as u32);
    (0..count)
        .map(|i| {
            let mut coeffs = Vec::with_capacity(k + 1);
            let mut r = i;
            for _ in 0..k {
                coeffs.push(r % p);
                r /= p;
            }
            coeffs.push(1);
            coeffs
        })
        .find(|f| is_irreducible_fp(base, f))
        .expect("irreducible polynomials exist in every degree")
}

/// Rabin's irreducibility test over F_p.
pub fn is_irreducible_fp(base: PrimeField, f: &[u64]) -> bool {
    let ring = PolyRing::new(base);
    let f = ring.normalize(f.to_vec());
    let n = match ring.degree(&f) {
        Some(n) if n >= 1 => n,
        _ => return false,
    };
    if n == 1 {
        return true;
    }
    let x = ring.x();
    let p = base.p();
    let frob_pow = |e: usize| {
        let mut acc = x.clone();
        for _ in 0..e {
            acc = ring.pow_mod(&acc, p, &f);
        }
        acc
    };
    if ring.rem(&ring.sub(&frob_pow(n), &x), &f) != ring.zero_poly() {
        return false;
    }
    prime_divisors(n as u64).into_iter().all(|q| {
        let h = ring.sub(&frob_pow(n / q as usize), &x);
        let g = ring.gcd(&h, &f);
        ring.degree(&g) == Some(0)
    })
}

impl Field for ExtensionField {
    type Elem = Vec<u64>;

    fn zero(&self) -> Vec<u64> {
        vec![0; self.k]
    }
    fn one(&self) -> Vec<u64> {
        self.embed(1)
    }
    fn from_i64(&self, n: i64) -> Vec<u64> {
        self.embed(self.base.from_i64(n))
    }
    fn add(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }
    fn sub(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| self.base.sub(x, y)).collect()
    }
    fn neg(&self, a: &Vec<u64>) -> Vec<u64> {
        a.iter().map(|x| self.base.neg(x)).collect()
    }
    fn mul(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        let p = self.base.p() as u128;
        let k = self.k;
        let mut prod = vec![0u128; 2 * k - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u128 * y as u128) % p;
            }
        }
        // Reduce using the monic modulus: z^k = -(m_0 + ... + m_{k-1} z^{k-1}).
        for d in (k..2 * k - 1).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for (j, &mj) in self.modulus[..k].iter().enumerate() {
                let idx = d - k + j;
                prod[idx] = (prod[idx] + (p - c) * mj as u128) % p;
            }
        }
        prod[..k].iter().map(|&c| c as u64).collect()
    }
    fn inv(&self, a: &Vec<u64>) -> Option<Vec<u64>> {
        (!self.is_zero(a)).then(|| self.pow(a, self.order - 2))
    }
    fn is_zero(&self, a: &Vec<u64>) -> bool {
        a.iter().all(|&c| c == 0)
    }
    fn characteristic(&self) -> u64 {
        self.base.p()
    }
}

impl FiniteField for ExtensionField {
    fn order(&self) -> u64 {
        self.order
    }
    fn element(&self, i: u64) -> Vec<u64> {
        let p = self.base.p();
        let mut r = i;
        (0..self.k)
            .map(|_| {
                let c = r % p;
                r /= p;
                c
            })
            .collect()
    }
    fn index_of(&self, a: &Vec<u64>) -> u64 {
        let p = self.base.p();
        a.iter().rev().fold(0, |acc, &c| acc * p + c)
    }
}

/// Parses "a", "-a" or "a/b" into a rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let parse_int = |t: &str| {
        t.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("not a rational: {s:?}")))
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let d = parse_int(d)?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(parse_int(n)?, d))
        }
        None => Ok(BigRational::from_integer(parse_int(s)?)),
    }
}

pub fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_integer(q: &BigRational) -> bool {
    q.denom().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_irreducible_small_cases() {
        // Over F_2 the least quadratic is z^2 + z + 1, the least cubic z^3 + z + 1.
        assert_eq!(ExtensionField::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(ExtensionField::new(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
        // Over F_3: z^2 + 1 (since -1 is a non-residue mod 3).
        assert_eq!(ExtensionField::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
        // Over F_5: z^2 + 2, the first z^2 + c with -c a non-residue.
        let f = ExtensionField::new(5, 2).unwrap();
        assert_eq!(f.modulus(), &[2, 0, 1]);
    }

    #[test]
    fn extension_field_axioms() {
        let f = ExtensionField::new(3, 3).unwrap();
        let q = f.order();
        assert_eq!(q, 27);
        let mut nonzero = 0;
        for i in 0..q {
            let a = f.element(i);
            assert_eq!(f.index_of(&a), i);
            if !f.is_zero(&a) {
                nonzero += 1;
                let ai = f.inv(&a).unwrap();
                assert!(f.is_one(&f.mul(&a, &ai)));
                assert!(f.is_one(&f.pow(&a, q - 1)));
            }
        }
        assert_eq!(nonzero, 26);
    }

    #[test]
    fn extension_square_roots() {
        let f = ExtensionField::new(7, 2).unwrap();
        let mut squares = 0;
        for i in 1..f.order() {
            let a = f.element(i);
            if let Some(r) = f.sqrt(&a) {
                assert_eq!(f.mul(&r, &r), a);
                squares += 1;
            }
        }
        assert_eq!(squares, (49 - 1) / 2);
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("-3/6").unwrap(), rat_frac(-1, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), rat(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&rat_frac(4, -6)), "-2/3");
    }

    #[test]
    fn reduction_mod_p() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.from_rational(&rat_frac(1, 2)), Some(4));
        assert_eq!(f.from_rational(&rat_frac(-3, 1)), Some(4));
        assert_eq!(f.from_rational(&rat_frac(1, 7)), None);
    }
}
