use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::arith::{factor_bigint, primes_up_to};
use crate::error::{Error, Result};
use crate::field::{ExtensionField, Field, PrimeField, Rationals};
use crate::poly::{Poly, PolyRing};
use crate::qpoly::{self, QPoly};

/// The curve y^2 = h(x) over a field of characteristic not 2.
#[derive(Debug, Clone)]
pub struct HyperCurve<F: Field> {
    ring: PolyRing<F>,
    h: Poly<F>,
    genus: usize,
}

pub type QCurve = HyperCurve<Rationals>;

impl<F: Field> HyperCurve<F> {
    /// Requires deg h >= 3 and h squarefree (gcd(h, h') = 1).
    pub fn new(field: F, h: Poly<F>) -> Result<Self> {
        if field.characteristic() == 2 {
            return Err(Error::InvalidCurve("characteristic 2".into()));
        }
        let ring = PolyRing::new(field);
        let h = ring.normalize(h);
        let deg = ring.deg(&h);
        if deg < 3 {
            return Err(Error::InvalidCurve(format!("degree {deg} gives genus 0")));
        }
        if !ring.is_squarefree(&h) {
            return Err(Error::InvalidCurve("h is not squarefree".into()));
        }
        let genus = (deg as usize - 1) / 2;
        Ok(HyperCurve { ring, h, genus })
    }

    pub fn field(&self) -> &F {
        self.ring.field()
    }

    pub fn ring(&self) -> &PolyRing<F> {
        &self.ring
    }

    pub fn h(&self) -> &Poly<F> {
        &self.h
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn degree(&self) -> usize {
        self.h.len() - 1
    }

    /// Degree 2g + 1: a single rational point at infinity.
    pub fn is_odd_model(&self) -> bool {
        self.degree() % 2 == 1
    }
}

impl QCurve {
    pub fn from_qpoly(h: QPoly) -> Result<Self> {
        HyperCurve::new(Rationals, h)
    }

    /// Reduction modulo a good prime.
    pub fn reduce_mod(&self, p: u64) -> Result<HyperCurve<PrimeField>> {
        if !is_good_prime(&self.h, p)? {
            return Err(Error::BadPrime(p, "curve has bad reduction".into()));
        }
        let fp = PrimeField::new(p)?;
        let hp = qpoly::reduce_mod_p(&self.h, fp).expect("good prime divides no denominator");
        HyperCurve::new(fp, hp)
    }

    /// Base change of the reduction to F_{p^k}.
    pub fn over_extension(&self, p: u64, k: usize) -> Result<HyperCurve<ExtensionField>> {
        self.reduce_mod(p)?.extend(k)
    }
}

impl HyperCurve<PrimeField> {
    pub fn extend(&self, k: usize) -> Result<HyperCurve<ExtensionField>> {
        let f = ExtensionField::new(self.field().p(), k)?;
        let h = self.h.iter().map(|&c| f.embed(c)).collect();
        HyperCurve::new(f, h)
    }
}

/// Primes dividing 2 * lead * disc of the primitive integral model, together
/// with the content and denominators of h.
pub fn bad_primes(h: &QPoly) -> Result<Vec<u64>> {
    if h.is_empty() {
        return Err(Error::InvalidCurve("zero polynomial".into()));
    }
    let (content, g) = qpoly::primitive_part(h);
    let gq = qpoly::from_bigints(&g);
    let disc = qpoly::discriminant(&gq);
    let mut n: BigInt = BigInt::from(2) * g.last().unwrap().abs() * content.numer().abs() * content.denom();
    if !disc.is_zero() {
        n *= disc.numer().abs();
    }
    let mut ps: Vec<u64> = factor_bigint(&n, u64::MAX)?.into_iter().map(|(p, _)| p).collect();
    ps.sort_unstable();
    Ok(ps)
}

pub fn is_good_prime(h: &QPoly, p: u64) -> Result<bool> {
    if p == 2 {
        return Ok(false);
    }
    let (content, g) = qpoly::primitive_part(h);
    let bp = BigInt::from(p);
    let divides = |n: &BigInt| (n % &bp).is_zero();
    if divides(g.last().unwrap()) || divides(content.numer()) || divides(content.denom()) {
        return Ok(false);
    }
    let disc = qpoly::discriminant(&qpoly::from_bigints(&g));
    Ok(disc.is_zero() || !divides(disc.numer()))
}

/// Primes p <= bound of good reduction.
pub fn good_primes(h: &QPoly, bound: u64) -> Result<Vec<u64>> {
    let bad = bad_primes(h)?;
    Ok(primes_up_to(bound).into_iter().filter(|p| !bad.contains(p)).collect())
}
