//! Dense univariate polynomials over any [`Field`].
//!
//! A polynomial is a `Vec` of coefficients, constant term first, with no
//! trailing zeros; the zero polynomial is the empty vector.

use crate::field::Field;

pub type Poly<F> = Vec<<F as Field>::Elem>;

#[derive(Debug, Clone)]
pub struct PolyRing<F: Field> {
    field: F,
}

impl<F: Field> PolyRing<F> {
    pub fn new(field: F) -> Self {
        PolyRing { field }
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn normalize(&self, mut a: Poly<F>) -> Poly<F> {
        while a.last().is_some_and(|c| self.field.is_zero(c)) {
            a.pop();
        }
        a
    }

    pub fn from_coeffs(&self, coeffs: Vec<F::Elem>) -> Poly<F> {
        self.normalize(coeffs)
    }

    pub fn from_i64s(&self, coeffs: &[i64]) -> Poly<F> {
        self.normalize(coeffs.iter().map(|&c| self.field.from_i64(c)).collect())
    }

    pub fn zero_poly(&self) -> Poly<F> {
        Vec::new()
    }

    pub fn one_poly(&self) -> Poly<F> {
        self.constant(self.field.one())
    }

    pub fn constant(&self, c: F::Elem) -> Poly<F> {
        self.normalize(vec![c])
    }

    pub fn x(&self) -> Poly<F> {
        self.monomial(self.field.one(), 1)
    }

    pub fn monomial(&self, c: F::Elem, k: usize) -> Poly<F> {
        if self.field.is_zero(&c) {
            return Vec::new();
        }
        let mut v = vec![self.field.zero(); k + 1];
        v[k] = c;
        v
    }

    pub fn degree(&self, a: &Poly<F>) -> Option<usize> {
        a.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to -1.
    pub fn deg(&self, a: &Poly<F>) -> i64 {
        a.len() as i64 - 1
    }

    pub fn is_zero(&self, a: &Poly<F>) -> bool {
        a.is_empty()
    }

    pub fn lead(&self, a: &Poly<F>) -> F::Elem {
        a.last().cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn coeff(&self, a: &Poly<F>, i: usize) -> F::Elem {
        a.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn add(&self, a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| match (a.get(i), b.get(i)) {
                (Some(x), Some(y)) => self.field.add(x, y),
                (Some(x), None) => x.clone(),
                (None, Some(y)) => y.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        self.normalize(out)
    }

    pub fn neg(&self, a: &Poly<F>) -> Poly<F> {
        a.iter().map(|c| self.field.neg(c)).collect()
    }

    pub fn sub(&self, a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        self.add(a, &self.neg(b))
    }

    pub fn scale(&self, a: &Poly<F>, c: &F::Elem) -> Poly<F> {
        self.normalize(a.iter().map(|x| self.field.mul(x, c)).collect())
    }

    pub fn shift(&self, a: &Poly<F>, k: usize) -> Poly<F> {
        if a.is_empty() {
            return Vec::new();
        }
        let mut v = vec![self.field.zero(); k];
        v.extend(a.iter().cloned());
        v
    }

    pub fn mul(&self, a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![self.field.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if self.field.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] = self.field.add(&out[i + j], &self.field.mul(x, y));
            }
        }
        self.normalize(out)
    }

    pub fn pow(&self, a: &Poly<F>, mut e: u64) -> Poly<F> {
        let mut base = a.clone();
        let mut acc = self.one_poly();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Euclidean division. Panics on division by the zero polynomial.
    pub fn divrem(&self, a: &Poly<F>, b: &Poly<F>) -> (Poly<F>, Poly<F>) {
        assert!(!b.is_empty(), "polynomial division by zero");
        if a.len() < b.len() {
            return (Vec::new(), a.clone());
        }
        let lead_inv = self.field.inv(&self.lead(b)).expect("nonzero leading coefficient");
        let mut r = a.clone();
        let mut q = vec![self.field.zero(); a.len() - b.len() + 1];
        let db = b.len() - 1;
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let c = self.field.mul(r.last().unwrap(), &lead_inv);
            for (i, bc) in b.iter().enumerate() {
                r[shift + i] = self.field.sub(&r[shift + i], &self.field.mul(&c, bc));
            }
            q[shift] = c;
            // Leading term cancels by construction.
            r.pop();
            r = self.normalize(r);
            if r.len() <= db {
                break;
            }
        }
        (self.normalize(q), r)
    }

    pub fn rem(&self, a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        self.divrem(a, b).1
    }

    pub fn quo(&self, a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        self.divrem(a, b).0
    }

    /// Exact quotient, `None` if `b` does not divide `a`.
    pub fn div_exact(&self, a: &Poly<F>, b: &Poly<F>) -> Option<Poly<F>> {
        let (q, r) = self.divrem(a, b);
        r.is_empty().then_some(q)
    }

    pub fn monic(&self, a: &Poly<F>) -> Poly<F> {
        match a.last() {
            None => Vec::new(),
            Some(l) => {
                let inv = self.field.inv(l).unwrap();
                self.scale(a, &inv)
            }
        }
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        let (mut x, mut y) = (a.clone(), b.clone());
        while !y.is_empty() {
            let r = self.rem(&x, &y);
            x = y;
            y = r;
        }
        self.monic(&x)
    }

    /// Returns `(g, s, t)` with `s*a + t*b = g`, `g` the monic gcd.
    pub fn xgcd(&self, a: &Poly<F>, b: &Poly<F>) -> (Poly<F>, Poly<F>, Poly<F>) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (self.one_poly(), Vec::new());
        let (mut t0, mut t1) = (Vec::new(), self.one_poly());
        while !r1.is_empty() {
            let (q, r) = self.divrem(&r0, &r1);
            let s2 = self.sub(&s0, &self.mul(&q, &s1));
            let t2 = self.sub(&t0, &self.mul(&q, &t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        match r0.last() {
            None => (Vec::new(), Vec::new(), Vec::new()),
            Some(l) => {
                let inv = self.field.inv(l).unwrap();
                (self.scale(&r0, &inv), self.scale(&s0, &inv), self.scale(&t0, &inv))
            }
        }
    }

    pub fn eval(&self, a: &Poly<F>, x: &F::Elem) -> F::Elem {
        a.iter()
            .rev()
            .fold(self.field.zero(), |acc, c| self.field.add(&self.field.mul(&acc, x), c))
    }

    pub fn derivative(&self, a: &Poly<F>) -> Poly<F> {
        self.normalize(
            a.iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| self.field.mul(c, &self.field.from_i64(i as i64)))
                .collect(),
        )
    }

    /// `a(b(x))`.
    pub fn compose(&self, a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
        a.iter()
            .rev()
            .fold(Vec::new(), |acc, c| self.add(&self.mul(&acc, b), &self.constant(c.clone())))
    }

    pub fn pow_mod(&self, a: &Poly<F>, mut e: u64, m: &Poly<F>) -> Poly<F> {
        let mut base = self.rem(a, m);
        let mut acc = self.rem(&self.one_poly(), m);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.rem(&self.mul(&acc, &base), m);
            }
            e >>= 1;
            if e > 0 {
                base = self.rem(&self.mul(&base, &base), m);
            }
        }
        acc
    }

    /// True when `gcd(a, a') = 1`. Valid in characteristic 0 and for degrees below the characteristic.
    pub fn is_squarefree(&self, a: &Poly<F>) -> bool {
        if a.is_empty() {
            return false;
        }
        let g = self.gcd(a, &self.derivative(a));
        self.degree(&g) == Some(0)
    }

    /// Truncates to terms of degree `< n`.
    pub fn truncate(&self, a: &Poly<F>, n: usize) -> Poly<F> {
        self.normalize(a.iter().take(n).cloned().collect())
    }

    pub fn mul_trunc(&self, a: &Poly<F>, b: &Poly<F>, n: usize) -> Poly<F> {
        if a.is_empty() || b.is_empty() || n == 0 {
            return Vec::new();
        }
        let mut out = vec![self.field.zero(); n.min(a.len() + b.len() - 1)];
        for (i, x) in a.iter().enumerate().take(n) {
            if self.field.is_zero(x) {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(n - i) {
                out[i + j] = self.field.add(&out[i + j], &self.field.mul(x, y));
            }
        }
        self.normalize(out)
    }

    /// Power-series inverse modulo `x^n` by Newton iteration; requires `a(0) != 0`.
    pub fn inv_series(&self, a: &Poly<F>, n: usize) -> Option<Poly<F>> {
        let a0 = a.first()?;
        let mut g = self.constant(self.field.inv(a0)?);
        let mut prec = 1;
        let two = self.constant(self.field.from_i64(2));
        while prec < n {
            prec = (2 * prec).min(n);
            // g <- g (2 - a g)
            let ag = self.mul_trunc(&self.truncate(a, prec), &g, prec);
            g = self.mul_trunc(&g, &self.sub(&two, &ag), prec);
        }
        Some(self.truncate(&g, n))
    }

    /// Order of vanishing at x = 0 (`None` for the zero polynomial).
    pub fn ord0(&self, a: &Poly<F>) -> Option<usize> {
        a.iter().position(|c| !self.field.is_zero(c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, PrimeField, Rationals};
    use proptest::prelude::*;

    fn qring() -> PolyRing<Rationals> {
        PolyRing::new(Rationals)
    }

    #[test]
    fn divrem_and_gcd() {
        let r = qring();
        let a = r.from_i64s(&[-1, 0, 0, 1]); // x^3 - 1
        let b = r.from_i64s(&[-1, 1]); // x - 1
        let (q, rem) = r.divrem(&a, &b);
        assert!(rem.is_empty());
        assert_eq!(q, r.from_i64s(&[1, 1, 1]));
        let c = r.from_i64s(&[-1, 0, 1]);
        assert_eq!(r.gcd(&a, &c), b);
        let (g, s, t) = r.xgcd(&a, &c);
        assert_eq!(r.add(&r.mul(&s, &a), &r.mul(&t, &c)), g);
    }

    #[test]
    fn series_inverse() {
        let r = qring();
        let a = r.from_i64s(&[1, -1]); // 1 - x
        let inv = r.inv_series(&a, 6).unwrap();
        assert_eq!(inv, vec![rat(1); 6]);
    }

    #[test]
    fn squarefree_check() {
        let r = qring();
        assert!(r.is_squarefree(&r.from_i64s(&[1, 0, 0, -1])));
        assert!(!r.is_squarefree(&r.from_i64s(&[1, -2, 1])));
    }

    proptest! {
        #[test]
        fn divrem_identity_mod_p(a in prop::collection::vec(0u64..13, 0..9), b in prop::collection::vec(0u64..13, 1..6)) {
            let r = PolyRing::new(PrimeField::new(13).unwrap());
            let a = r.normalize(a);
            let b = r.normalize(b);
            prop_assume!(!b.is_empty());
            let (q, rem) = r.divrem(&a, &b);
            prop_assert!(r.deg(&rem) < r.deg(&b));
            prop_assert_eq!(r.add(&r.mul(&q, &b), &rem), a);
        }
    }
}
