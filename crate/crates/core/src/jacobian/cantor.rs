use std::collections::HashSet;

use rand::Rng;

use super::curve::HyperCurve;
use crate::error::{Error, Result};
use crate::field::{Field, FiniteField};
use crate::poly::Poly;

/// Mumford pair (u, v): u monic, deg v < deg u, u | v^2 - h.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MumfordDiv<E> {
    pub u: Vec<E>,
    pub v: Vec<E>,
}

impl<F: Field> HyperCurve<F> {
    /// The class of zero, (1, 0).
    pub fn identity(&self) -> MumfordDiv<F::Elem> {
        MumfordDiv { u: self.ring().one_poly(), v: Vec::new() }
    }

    pub fn is_identity(&self, d: &MumfordDiv<F::Elem>) -> bool {
        d.u.len() == 1 && d.v.is_empty()
    }

    /// Checks the Mumford conditions; `reduced` additionally requires deg u <= g.
    pub fn is_valid(&self, d: &MumfordDiv<F::Elem>, reduced: bool) -> bool {
        let r = self.ring();
        let f = self.field();
        let monic = d.u.last().is_some_and(|l| f.is_one(l));
        let vdeg = r.deg(&d.v) < r.deg(&d.u);
        let divides = r.rem(&r.sub(&r.mul(&d.v, &d.v), self.h()), &d.u).is_empty();
        monic && vdeg && divides && (!reduced || d.u.len() - 1 <= self.genus())
    }

    /// The divisor (x0, y0) - infinity.
    pub fn point_divisor(&self, x0: &F::Elem, y0: &F::Elem) -> Result<MumfordDiv<F::Elem>> {
        let f = self.field();
        let r = self.ring();
        if f.mul(y0, y0) != r.eval(self.h(), x0) {
            return Err(Error::Precondition("point is not on the curve".into()));
        }
        Ok(MumfordDiv { u: r.from_coeffs(vec![f.neg(x0), f.one()]), v: r.constant(y0.clone()) })
    }

    pub fn negate(&self, d: &MumfordDiv<F::Elem>) -> MumfordDiv<F::Elem> {
        let r = self.ring();
        MumfordDiv { u: d.u.clone(), v: r.rem(&r.neg(&d.v), &d.u) }
    }

    fn require_odd(&self) -> Result<()> {
        if self.is_odd_model() {
            Ok(())
        } else {
            Err(Error::UnsupportedModel("Cantor arithmetic needs an odd-degree model; use to_odd_model".into()))
        }
    }

    /// Cantor composition, giving a semi-reduced representative of the sum.
    fn compose(&self, a: &MumfordDiv<F::Elem>, b: &MumfordDiv<F::Elem>) -> MumfordDiv<F::Elem> {
        let r = self.ring();
        let (d1, e1, e2) = r.xgcd(&a.u, &b.u);
        let vsum = r.add(&a.v, &b.v);
        let (d, c1, s3) = r.xgcd(&d1, &vsum);
        let s1 = r.mul(&c1, &e1);
        let s2 = r.mul(&c1, &e2);
        let u = r.div_exact(&r.mul(&a.u, &b.u), &r.mul(&d, &d)).expect("d^2 divides u1 u2");
        let num = r.add(
            &r.add(&r.mul(&s1, &r.mul(&a.u, &b.v)), &r.mul(&s2, &r.mul(&b.u, &a.v))),
            &r.mul(&s3, &r.add(&r.mul(&a.v, &b.v), self.h())),
        );
        let v = r.div_exact(&num, &d).expect("d divides the composed v");
        let u = r.monic(&u);
        let v = r.rem(&v, &u);
        MumfordDiv { u, v }
    }

    /// Brings a semi-reduced pair to the unique reduced representative.
    pub fn reduce(&self, d: &MumfordDiv<F::Elem>) -> Result<MumfordDiv<F::Elem>> {
        self.require_odd()?;
        let r = self.ring();
        let g = self.genus();
        let (mut u, mut v) = (r.monic(&d.u), d.v.clone());
        v = r.rem(&v, &u);
        while u.len() - 1 > g {
            let num = r.sub(self.h(), &r.mul(&v, &v));
            let u2 = r.div_exact(&num, &u).ok_or_else(|| Error::Precondition("u does not divide h - v^2".into()))?;
            u = r.monic(&u2);
            v = r.rem(&r.neg(&v), &u);
        }
        Ok(MumfordDiv { u, v })
    }

    pub fn add(&self, a: &MumfordDiv<F::Elem>, b: &MumfordDiv<F::Elem>) -> Result<MumfordDiv<F::Elem>> {
        self.require_odd()?;
        self.reduce(&self.compose(a, b))
    }

    /// n * D by double-and-add; negative n uses the negation.
    pub fn scalar_mul(&self, n: i64, d: &MumfordDiv<F::Elem>) -> Result<MumfordDiv<F::Elem>> {
        self.require_odd()?;
        let base = if n < 0 { self.negate(d) } else { d.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = self.identity();
        let mut b = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &b)?;
            }
            k >>= 1;
            if k > 0 {
                b = self.add(&b, &b)?;
            }
        }
        Ok(acc)
    }

    /// Exact order of D when it divides `n` (found by checking the divisors of n).
    pub fn order_dividing(&self, d: &MumfordDiv<F::Elem>, n: u64) -> Result<Option<u64>> {
        if !self.is_identity(&self.scalar_mul(n as i64, d)?) {
            return Ok(None);
        }
        let mut ord = n;
        for (p, _) in crate::arith::factor_u64(n, u64::MAX)? {
            while ord % p == 0 && self.is_identity(&self.scalar_mul((ord / p) as i64, d)?) {
                ord /= p;
            }
        }
        Ok(Some(ord))
    }

    /// True iff the sums a_1 D_1 + ... + a_s D_s with 0 <= a_i < m are pairwise
    /// distinct, i.e. the D_i span a subgroup of order m^s. Each D_i must be
    /// m-torsion and the characteristic must not divide 2m.
    pub fn independence_check(&self, divs: &[MumfordDiv<F::Elem>], m: u64) -> Result<bool> {
        self.require_odd()?;
        if m < 2 {
            return Err(Error::InvalidParameter("m must exceed 1".into()));
        }
        let ch = self.field().characteristic();
        if ch != 0 && (2 * m) % ch == 0 {
            return Err(Error::Precondition(format!("characteristic {ch} divides 2m")));
        }
        for d in divs {
            if !self.is_identity(&self.scalar_mul(m as i64, d)?) {
                return Err(Error::Precondition("divisor is not m-torsion".into()));
            }
        }
        let total = (m as u128).checked_pow(divs.len() as u32).unwrap_or(u128::MAX);
        if total > 10_000_000 {
            return Err(Error::Budget(format!("{total} combinations")));
        }
        // Build the subgroup layer by layer; a collision means dependence.
        let mut seen: HashSet<MumfordDiv<F::Elem>> = HashSet::from([self.identity()]);
        for d in divs {
            let mut next = HashSet::with_capacity(seen.len() * m as usize);
            for base in &seen {
                let mut acc = base.clone();
                for _ in 0..m {
                    if !next.insert(acc.clone()) {
                        return Ok(false);
                    }
                    acc = self.add(&acc, d)?;
                }
            }
            seen = next;
        }
        Ok(true)
    }
}

impl<F: FiniteField> HyperCurve<F> {
    /// A random divisor class: a sum of up to g random affine points.
    pub fn random_divisor<R: Rng>(&self, rng: &mut R) -> Result<MumfordDiv<F::Elem>> {
        self.require_odd()?;
        let f = self.field();
        let q = f.order();
        let mut acc = self.identity();
        for _ in 0..self.genus() {
            for _ in 0..64 {
                let x = f.element(rng.gen_range(0..q));
                let hx = self.ring().eval(self.h(), &x);
                if let Some(y) = f.sqrt(&hx) {
                    let y = if rng.gen_bool(0.5) { f.neg(&y) } else { y };
                    acc = self.add(&acc, &self.point_divisor(&x, &y)?)?;
                    break;
                }
            }
        }
        Ok(acc)
    }

    /// Every reduced divisor class, by enumerating all monic u of degree <= g
    /// and all v of smaller degree with u | v^2 - h.
    pub fn enumerate_jacobian(&self, budget: u64) -> Result<Vec<MumfordDiv<F::Elem>>> {
        self.require_odd()?;
        let f = self.field();
        let r = self.ring();
        let q = f.order();
        let g = self.genus() as u32;
        let cost = q.checked_pow(2 * g).unwrap_or(u64::MAX);
        if cost > budget {
            return Err(Error::Budget(format!("enumeration of J over F_{q} needs ~{cost} steps")));
        }
        let poly_from_index = |mut i: u64, len: usize| -> Poly<F> {
            let mut c = Vec::with_capacity(len);
            for _ in 0..len {
                c.push(f.element(i % q));
                i /= q;
            }
            c
        };
        let mut out = vec![self.identity()];
        for deg in 1..=g as usize {
            let count = q.pow(deg as u32);
            for ui in 0..count {
                let mut u = poly_from_index(ui, deg);
                u.push(f.one());
                let hu = r.rem(self.h(), &u);
                for vi in 0..count {
                    let v = r.normalize(poly_from_index(vi, deg));
                    if r.rem(&r.mul(&v, &v), &u) == hu {
                        out.push(MumfordDiv { u: u.clone(), v });
                    }
                }
            }
        }
        Ok(out)
    }

    /// #J(F_q)[m] by exhaustive enumeration.
    pub fn torsion_profile(&self, m: u64, budget: u64) -> Result<u64> {
        let all = self.enumerate_jacobian(budget)?;
        let mut n = 0;
        for d in &all {
            if self.is_identity(&self.scalar_mul(m as i64, d)?) {
                n += 1;
            }
        }
        Ok(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ExtensionField, PrimeField};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn curve(p: u64, h: &[i64]) -> HyperCurve<PrimeField> {
        let f = PrimeField::new(p).unwrap();
        HyperCurve::new(f, crate::poly::PolyRing::new(f).from_i64s(h)).unwrap()
    }

    #[test]
    fn toy_divisor_has_order_three() {
        let c = curve(5, &[1, 0, 0, -1]);
        let d = MumfordDiv { u: vec![0, 1], v: vec![1] };
        assert!(c.is_valid(&d, true));
        let e = c.identity();
        assert_eq!(c.add(&d, &e).unwrap(), d);
        assert!(c.is_identity(&c.add(&d, &c.negate(&d)).unwrap()));
        let d2 = c.add(&d, &d).unwrap();
        assert!(!c.is_identity(&d2));
        assert!(c.is_identity(&c.add(&d2, &d).unwrap()));
        assert_eq!(c.scalar_mul(0, &d).unwrap(), e);
        assert_eq!(c.scalar_mul(1, &d).unwrap(), d);
        assert_eq!(c.order_dividing(&d, 3).unwrap(), Some(3));
    }

    #[test]
    fn independence_examples() {
        let c = curve(5, &[1, 0, 0, -1]);
        let d = MumfordDiv { u: vec![0, 1], v: vec![1] };
        assert!(c.independence_check(&[d.clone()], 3).unwrap());
        let d2 = c.scalar_mul(2, &d).unwrap();
        assert!(!c.independence_check(&[d.clone(), d2], 3).unwrap());
        assert!(!c.independence_check(&[d.clone(), c.negate(&d)], 3).unwrap());
        let c3 = curve(3, &[1, 0, 0, 0, 0, 1]);
        assert!(c3.independence_check(&[c3.identity()], 3).is_err());
    }

    #[test]
    fn even_model_rejected() {
        let c = curve(7, &[4, 0, 0, -5, 0, 0, 1]);
        assert!(matches!(c.add(&c.identity(), &c.identity()), Err(Error::UnsupportedModel(_))));
    }

    /// Brute-force group order over F_p for an elliptic curve, then the
    /// enumerated Jacobian must match it.
    #[test]
    fn enumeration_matches_elliptic_point_count() {
        let c = curve(7, &[1, 0, 0, -1]);
        let affine = (0..7u64)
            .flat_map(|x| (0..7u64).map(move |y| (x, y)))
            .filter(|&(x, y)| (y * y) % 7 == (1 + 7 * 7 * 7 - x * x * x % 7) % 7)
            .count();
        assert_eq!(affine + 1, 12);
        assert_eq!(c.enumerate_jacobian(1 << 20).unwrap().len(), 12);
    }

    #[test]
    fn group_laws_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let curves = [curve(7, &[1, 0, 0, 0, 0, 1]), curve(11, &[1, 0, 0, 0, 0, -1]), curve(13, &[3, 1, 0, 2, 0, 0, 0, 1])];
        for c in &curves {
            for _ in 0..200 {
                let a = c.random_divisor(&mut rng).unwrap();
                let b = c.random_divisor(&mut rng).unwrap();
                let d = c.random_divisor(&mut rng).unwrap();
                assert!(c.is_valid(&a, true));
                let ab = c.add(&a, &b).unwrap();
                assert!(c.is_valid(&ab, true));
                assert_eq!(ab, c.add(&b, &a).unwrap());
                assert_eq!(c.add(&ab, &d).unwrap(), c.add(&a, &c.add(&b, &d).unwrap()).unwrap());
                assert!(c.is_identity(&c.add(&a, &c.negate(&a)).unwrap()));
            }
        }
    }

    #[test]
    fn extension_field_arithmetic() {
        let f = ExtensionField::new(3, 2).unwrap();
        let r = crate::poly::PolyRing::new(f.clone());
        let h = vec![f.one(), f.zero(), f.zero(), f.zero(), f.zero(), f.one()];
        let c = HyperCurve::new(f, r.normalize(h)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let a = c.random_divisor(&mut rng).unwrap();
            let b = c.random_divisor(&mut rng).unwrap();
            assert_eq!(c.add(&a, &b).unwrap(), c.add(&b, &a).unwrap());
            assert!(c.is_identity(&c.add(&a, &c.negate(&a)).unwrap()));
        }
    }
}
