//! Exact arithmetic in quadratic fields Q(sqrt(d0)): elements, prime-ideal
//! factorization of principal ideals, Selmer membership, p-th power tests,
//! Kummer degrees, cyclotomic disjointness and fundamental units.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, exact_root, factor_bigint, kronecker, prime_divisors, sqrt_mod_prime};
use crate::error::{Error, Result};
use crate::field::{format_rational, rat};

/// Largest coordinate range scanned by the imaginary p-th root search.
const ROOT_SEARCH_LIMIT: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signature {
    Real,
    Imaginary,
}

/// A quadratic field, identified by its square-free radicand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadField {
    d0: i64,
    disc: i64,
}

impl QuadField {
    /// Builds Q(sqrt(d0)) for a square-free `d0` outside {0, 1}.
    pub fn new(d0: i64) -> Result<Self> {
        if d0 == 0 || d0 == 1 {
            return Err(Error::InvalidField(format!("degenerate radicand {d0}")));
        }
        if d0.unsigned_abs() > (1u64 << 60) {
            return Err(Error::InvalidField(format!("radicand {d0} out of range")));
        }
        if !arith::is_squarefree(d0, u64::MAX)? {
            return Err(Error::InvalidField(format!("{d0} is not square-free")));
        }
        let disc = if d0.rem_euclid(4) == 1 { d0 } else { 4 * d0 };
        Ok(QuadField { d0, disc })
    }

    /// The field with fundamental discriminant `disc`; non-fundamental values are rejected.
    pub fn from_discriminant(disc: i64) -> Result<Self> {
        let bad = |why: &str| Error::InvalidDiscriminant(disc.to_string(), why.to_string());
        match disc.rem_euclid(4) {
            1 => {
                if disc == 1 {
                    return Err(bad("trivial discriminant"));
                }
                QuadField::new(disc).map_err(|_| bad("not fundamental"))
            }
            0 => {
                let d0 = disc / 4;
                if d0.rem_euclid(4) == 1 || d0 == 0 {
                    return Err(bad("not fundamental"));
                }
                QuadField::new(d0).map_err(|_| bad("not fundamental"))
            }
            _ => Err(bad("not congruent to 0 or 1 mod 4")),
        }
    }

    pub fn d0(&self) -> i64 {
        self.d0
    }

    pub fn discriminant(&self) -> i64 {
        self.disc
    }

    pub fn signature(&self) -> Signature {
        if self.disc > 0 {
            Signature::Real
        } else {
            Signature::Imaginary
        }
    }

    pub fn is_real(&self) -> bool {
        self.disc > 0
    }

    pub fn unit_rank(&self) -> u32 {
        u32::from(self.is_real())
    }

    /// Number of roots of unity.
    pub fn roots_of_unity(&self) -> u32 {
        match self.d0 {
            -1 => 4,
            -3 => 6,
            _ => 2,
        }
    }

    /// Parity bit `D mod 2`, the middle coefficient of the principal form.
    pub fn b0(&self) -> i64 {
        self.disc.rem_euclid(2)
    }

    pub fn elt(&self, a: BigRational, b: BigRational) -> QuadElt {
        QuadElt { field: *self, a, b }
    }

    pub fn from_ints(&self, a: i64, b: i64) -> QuadElt {
        self.elt(rat(a), rat(b))
    }

    pub fn one(&self) -> QuadElt {
        self.from_ints(1, 0)
    }

    /// The algebraic integer omega = (-b0 + sqrt(D)) / 2; {1, omega} is an integral basis.
    pub fn omega(&self) -> QuadElt {
        if self.b0() == 1 {
            self.elt(BigRational::new((-1).into(), 2.into()), BigRational::new(1.into(), 2.into()))
        } else {
            self.from_ints(0, 1)
        }
    }
}

impl fmt::Display for QuadField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(sqrt({}))", self.d0)
    }
}

/// `a + b*sqrt(d0)` with rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadElt {
    field: QuadField,
    a: BigRational,
    b: BigRational,
}

impl QuadElt {
    pub fn field(&self) -> QuadField {
        self.field
    }
    pub fn a(&self) -> &BigRational {
        &self.a
    }
    pub fn b(&self) -> &BigRational {
        &self.b
    }

    fn same_field(&self, other: &QuadElt) {
        assert_eq!(self.field, other.field, "elements from different quadratic fields");
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn add(&self, o: &QuadElt) -> QuadElt {
        self.same_field(o);
        self.field.elt(&self.a + &o.a, &self.b + &o.b)
    }

    pub fn sub(&self, o: &QuadElt) -> QuadElt {
        self.same_field(o);
        self.field.elt(&self.a - &o.a, &self.b - &o.b)
    }

    pub fn neg(&self) -> QuadElt {
        self.field.elt(-&self.a, -&self.b)
    }

    pub fn mul(&self, o: &QuadElt) -> QuadElt {
        self.same_field(o);
        let d = rat(self.field.d0);
        self.field.elt(&self.a * &o.a + &d * &self.b * &o.b, &self.a * &o.b + &self.b * &o.a)
    }

    pub fn scale(&self, q: &BigRational) -> QuadElt {
        self.field.elt(&self.a * q, &self.b * q)
    }

    pub fn conj(&self) -> QuadElt {
        self.field.elt(self.a.clone(), -&self.b)
    }

    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - rat(self.field.d0) * &self.b * &self.b
    }

    pub fn trace(&self) -> BigRational {
        &self.a * rat(2)
    }

    pub fn inverse(&self) -> Option<QuadElt> {
        let n = self.norm();
        (!n.is_zero()).then(|| self.conj().scale(&n.recip()))
    }

    pub fn pow(&self, e: i64) -> QuadElt {
        let base = if e < 0 { self.inverse().expect("inverse of zero") } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.field.one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        acc
    }

    /// Coordinates (X, Y) in the integral basis {1, omega}, when integral.
    pub fn integral_coords(&self) -> Option<(BigInt, BigInt)> {
        let (x, y) = if self.field.b0() == 1 {
            (&self.a + &self.b, &self.b * rat(2))
        } else {
            (self.a.clone(), self.b.clone())
        };
        (x.is_integer() && y.is_integer()).then(|| (x.to_integer(), y.to_integer()))
    }

    pub fn is_integral(&self) -> bool {
        self.integral_coords().is_some()
    }

    /// Least positive integer n with n * self integral.
    pub fn denominator(&self) -> BigInt {
        let (x, y) = if self.field.b0() == 1 {
            (&self.a + &self.b, &self.b * rat(2))
        } else {
            (self.a.clone(), self.b.clone())
        };
        x.denom().lcm(y.denom())
    }

    pub fn is_unit(&self) -> bool {
        self.is_integral() && self.norm().abs().is_one()
    }

    /// Real embedding sending sqrt(d0) to the positive root (real fields only).
    pub fn to_f64(&self) -> f64 {
        let d = (self.field.d0 as f64).sqrt();
        self.a.to_f64().unwrap_or(f64::NAN) + self.b.to_f64().unwrap_or(f64::NAN) * d
    }
}

impl fmt::Display for QuadElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = format_rational(&self.a);
        if self.b.is_zero() {
            return write!(f, "{a}");
        }
        let sign = if self.b.is_negative() { "-" } else { "+" };
        let b = format_rational(&self.b.abs());
        let b = if b == "1" { String::new() } else { format!("{b}*") };
        if self.a.is_zero() {
            let lead = if self.b.is_negative() { "-" } else { "" };
            write!(f, "{lead}{b}sqrt({})", self.field.d0)
        } else {
            write!(f, "{a} {sign} {b}sqrt({})", self.field.d0)
        }
    }
}

/// Serialized form of a field element: coordinates over {1, sqrt(d0)} as exact rational strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadEltRepr {
    pub d0: i64,
    pub a: String,
    pub b: String,
}

impl From<&QuadElt> for QuadEltRepr {
    fn from(e: &QuadElt) -> Self {
        QuadEltRepr { d0: e.field.d0, a: format_rational(&e.a), b: format_rational(&e.b) }
    }
}

impl QuadEltRepr {
    pub fn to_elt(&self) -> Result<QuadElt> {
        let field = QuadField::new(self.d0)?;
        Ok(field.elt(crate::field::parse_rational(&self.a)?, crate::field::parse_rational(&self.b)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Splitting {
    Split,
    Inert,
    Ramified,
}

/// A prime ideal of the maximal order, named by its residue prime and, for
/// split and ramified primes, the middle coefficient `b` of the form
/// `(p, b, (b^2 - D)/4p)`, i.e. the ideal `[p, (-b + sqrt(D))/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimeIdeal {
    pub p: u64,
    pub kind: Splitting,
    pub b: i128,
}

impl PrimeIdeal {
    pub fn residue_degree(&self) -> u32 {
        match self.kind {
            Splitting::Inert => 2,
            _ => 1,
        }
    }

    pub fn ramification_index(&self) -> u32 {
        match self.kind {
            Splitting::Ramified => 2,
            _ => 1,
        }
    }

    /// The Galois conjugate prime ideal.
    pub fn conjugate(&self) -> PrimeIdeal {
        match self.kind {
            Splitting::Split => PrimeIdeal { b: normalize_b(-self.b, self.p), ..*self },
            _ => *self,
        }
    }

    /// Membership test for an integral element given in the basis {1, omega}.
    fn contains(&self, field: &QuadField, x: &BigInt, y: &BigInt) -> bool {
        let p = BigInt::from(self.p);
        match self.kind {
            Splitting::Inert => x.is_multiple_of(&p) && y.is_multiple_of(&p),
            _ => {
                // [p, (-b + sqrt D)/2] = pZ + (omega + k)Z with k = (b0 - b)/2.
                let k = BigInt::from((field.b0() as i128 - self.b) / 2);
                (x - y * k).is_multiple_of(&p)
            }
        }
    }
}

fn normalize_b(b: i128, p: u64) -> i128 {
    let two_p = 2 * p as i128;
    let mut r = b.rem_euclid(two_p);
    if r > p as i128 {
        r -= two_p;
    }
    r
}

/// A prime ideal with its exponent in a factorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrimeIdealFactor {
    pub prime: PrimeIdeal,
    pub exponent: i64,
}

/// The prime ideals above the rational prime `p`.
pub fn primes_above(field: &QuadField, p: u64) -> Vec<PrimeIdeal> {
    let d = BigInt::from(field.discriminant());
    if d.is_multiple_of(&BigInt::from(p)) {
        return vec![PrimeIdeal { p, kind: Splitting::Ramified, b: ramified_b(field, p) }];
    }
    match kronecker(&d, p) {
        1 => {
            let b = split_b(field, p);
            let first = PrimeIdeal { p, kind: Splitting::Split, b };
            let mut v = vec![first, first.conjugate()];
            v.sort();
            v
        }
        _ => vec![PrimeIdeal { p, kind: Splitting::Inert, b: 0 }],
    }
}

/// Solves b^2 = D (mod 4p) with b = D (mod 2) for a split prime.
fn split_b(field: &QuadField, p: u64) -> i128 {
    let disc = field.discriminant() as i128;
    if p == 2 {
        // D = 1 (mod 8): b odd with b^2 = D (mod 8) always holds.
        return 1;
    }
    let r = sqrt_mod_prime(disc.rem_euclid(p as i128) as u64, p).expect("split prime has a root") as i128;
    // Adjust parity to match D mod 2 (p odd, so r or r + p works).
    let b = if (r - disc).rem_euclid(2) == 0 { r } else { r + p as i128 };
    normalize_b(b, p)
}

fn ramified_b(field: &QuadField, p: u64) -> i128 {
    let disc = field.discriminant() as i128;
    let four_p = 4 * p as i128;
    (0..2 * p as i128)
        .find(|b| (b * b - disc).rem_euclid(four_p) == 0)
        .map(|b| normalize_b(b, p))
        .expect("ramified prime has a form")
}

/// Factorization of the principal ideal (gamma) into prime ideals of the
/// maximal order, sorted by prime. Units give the empty list.
pub fn ideal_factorization(gamma: &QuadElt, budget: u64) -> Result<Vec<PrimeIdealFactor>> {
    if gamma.is_zero() {
        return Err(Error::Zero);
    }
    let field = gamma.field();
    let n = gamma.denominator();
    let alpha = gamma.scale(&BigRational::from_integer(n.clone()));
    let (x, y) = alpha.integral_coords().expect("scaled element is integral");
    let norm = alpha.norm().to_integer();

    let mut primes: Vec<u64> = factor_bigint(&norm, budget)?.into_iter().map(|(p, _)| p).collect();
    if !n.is_one() {
        primes.extend(factor_bigint(&n, budget)?.into_iter().map(|(p, _)| p));
    }
    primes.sort_unstable();
    primes.dedup();

    let mut out = Vec::new();
    for p in primes {
        let vn = if n.is_one() { 0 } else { arith::valuation(&n, p) as i64 };
        for (prime, va) in valuations_above(&field, p, &x, &y) {
            let e = va - vn * prime.ramification_index() as i64;
            if e != 0 {
                out.push(PrimeIdealFactor { prime, exponent: e });
            }
        }
    }
    Ok(out)
}

/// Valuations of the integral element X + Y*omega at each prime above p.
fn valuations_above(field: &QuadField, p: u64, x: &BigInt, y: &BigInt) -> Vec<(PrimeIdeal, i64)> {
    let bp = BigInt::from(p);
    // Strip the largest power of p dividing the element.
    let (mut x, mut y) = (x.clone(), y.clone());
    let mut k = 0i64;
    while x.is_multiple_of(&bp) && y.is_multiple_of(&bp) && !(x.is_zero() && y.is_zero()) {
        x /= &bp;
        y /= &bp;
        k += 1;
    }
    let elt = field.omega().scale(&BigRational::from_integer(y.clone())).add(&field.elt(
        BigRational::from_integer(x.clone()),
        BigRational::zero(),
    ));
    let rest = arith::valuation(&elt.norm().to_integer(), p) as i64;
    let ideals = primes_above(field, p);
    match ideals[0].kind {
        Splitting::Inert => vec![(ideals[0], k + rest / 2)],
        Splitting::Ramified => vec![(ideals[0], 2 * k + rest)],
        Splitting::Split => {
            let (first, second) = (ideals[0], ideals[1]);
            if rest == 0 {
                vec![(first, k), (second, k)]
            } else if first.contains(field, &x, &y) {
                vec![(first, k + rest), (second, k)]
            } else {
                vec![(first, k), (second, k + rest)]
            }
        }
    }
}

/// True iff every finite valuation of gamma is divisible by m.
pub fn selmer_member(gamma: &QuadElt, m: u64, budget: u64) -> Result<bool> {
    Ok(ideal_factorization(gamma, budget)?.iter().all(|f| f.exponent.rem_euclid(m as i64) == 0))
}

/// All delta in the field with delta^p = gamma.
pub fn pth_roots(gamma: &QuadElt, p: u64) -> Result<Vec<QuadElt>> {
    if gamma.is_zero() {
        return Err(Error::Zero);
    }
    let field = gamma.field();
    let c = pth_power_scaling(gamma, p);
    // gamma is a p-th power iff gamma * c^p is, and gamma * c^p is integral.
    let target = gamma.scale(&c.pow(p as i32));
    let roots = if field.is_real() {
        real_integral_pth_roots(&target, p)
    } else {
        imaginary_integral_pth_roots(&target, p)?
    };
    Ok(roots.into_iter().map(|d| d.scale(&c.recip())).collect())
}

/// A rational c with gamma * c^p integral and as small as cheaply possible:
/// prime by prime, c clears the denominator with the least power and removes
/// p-th powers from the content. Falls back to the plain denominator when
/// factoring is too costly.
fn pth_power_scaling(gamma: &QuadElt, p: u64) -> BigRational {
    const BUDGET: u64 = 20_000;
    let n = gamma.denominator();
    let up = match factor_bigint(&n, BUDGET) {
        Ok(fs) => fs.into_iter().map(|(q, v)| BigInt::from(q).pow(v.div_ceil(p as u32))).product(),
        Err(_) => n,
    };
    let upq = BigRational::from_integer(up);
    let alpha = gamma.scale(&upq.pow(p as i32));
    let down = match alpha.integral_coords() {
        Some((x, y)) => {
            let g = x.gcd(&y);
            if g.is_zero() {
                BigInt::one()
            } else {
                match factor_bigint(&g, BUDGET) {
                    Ok(fs) => fs.into_iter().map(|(q, v)| BigInt::from(q).pow(v / p as u32)).product(),
                    Err(_) => BigInt::one(),
                }
            }
        }
        None => BigInt::one(),
    };
    upq / BigRational::from_integer(down)
}

pub fn is_pth_power(gamma: &QuadElt, p: u64) -> Result<bool> {
    Ok(!pth_roots(gamma, p)?.is_empty())
}

/// True iff gamma = delta^m for some delta in the field.
pub fn is_mth_power(gamma: &QuadElt, m: u64) -> Result<bool> {
    if m == 1 {
        return Ok(true);
    }
    let p = prime_divisors(m)[0];
    for delta in pth_roots(gamma, p)? {
        if is_mth_power(&delta, m / p)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Integral p-th roots in an imaginary field: delta = (u + v sqrt(D))/2 with
/// u^2 - D v^2 = 4 N(delta), scanned over v.
fn imaginary_integral_pth_roots(alpha: &QuadElt, p: u64) -> Result<Vec<QuadElt>> {
    let field = alpha.field();
    let norm = alpha.norm().to_integer();
    let nd = match exact_root(&norm, p as u32) {
        Some(r) => r,
        None => return Ok(Vec::new()),
    };
    let disc = BigInt::from(field.discriminant());
    let four_n: BigInt = &nd * 4;
    let quot: BigInt = &four_n / Signed::abs(&disc);
    let vmax = quot.sqrt();
    if vmax > BigInt::from(ROOT_SEARCH_LIMIT) {
        return Err(Error::Budget(format!("p-th root search range {vmax}")));
    }
    let vmax = vmax.to_i64().unwrap();
    let sqrt_d0_scale = if field.b0() == 1 { rat(1) } else { rat(2) };
    let mut out = Vec::new();
    for v in -vmax..=vmax {
        let u2 = &four_n + &disc * BigInt::from(v) * BigInt::from(v);
        if u2.is_negative() {
            continue;
        }
        let u = u2.sqrt();
        if &u * &u != u2 {
            continue;
        }
        for u in [u.clone(), -u] {
            // (u + v sqrt D)/2 with sqrt D = s * sqrt(d0).
            let cand = field.elt(
                BigRational::new(u.clone(), 2.into()),
                BigRational::new(BigInt::from(v), 2.into()) * &sqrt_d0_scale,
            );
            if cand.is_integral() && cand.pow(p as i64) == *alpha && !out.contains(&cand) {
                out.push(cand);
            }
        }
    }
    Ok(out)
}

/// Integral p-th roots in a real field, recovered from high-precision real
/// p-th roots of the two embeddings and verified exactly.
fn real_integral_pth_roots(alpha: &QuadElt, p: u64) -> Vec<QuadElt> {
    let field = alpha.field();
    // 2*alpha = A2 + B2 sqrt(d0) with integers A2, B2.
    let a2 = (alpha.a() * rat(2)).to_integer();
    let b2 = (alpha.b() * rat(2)).to_integer();
    let d0 = BigInt::from(field.d0());
    let mag_bits = a2.bits() + b2.bits() + d0.bits() + 8;
    let prec = 2 * mag_bits + 64;
    let one = BigInt::one() << prec;
    let sqrt_d0 = (&d0 << (2 * prec)).sqrt();
    // Embeddings scaled by 2^prec.
    let s1 = (&a2 * &one + &b2 * &sqrt_d0) / 2;
    let s2 = (&a2 * &one - &b2 * &sqrt_d0) / 2;
    let root = |s: &BigInt| -> Option<Vec<BigInt>> {
        if s.is_negative() && p % 2 == 0 {
            return None;
        }
        let r = (s.abs() << (prec * (p - 1))).nth_root(p as u32);
        let r = if s.is_negative() { -r } else { r };
        Some(if p % 2 == 0 { vec![r.clone(), -r] } else { vec![r] })
    };
    let (r1s, r2s) = match (root(&s1), root(&s2)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Vec::new(),
    };
    let round = |num: BigInt, den: &BigInt| -> BigInt {
        let (q, r) = num.div_mod_floor(den);
        if r * 2 >= *den {
            q + 1
        } else {
            q
        }
    };
    let mut out = Vec::new();
    for r1 in &r1s {
        for r2 in &r2s {
            // delta = A + B sqrt(d0): 2A = r1 + r2, 2B = (r1 - r2)/sqrt(d0).
            let two_a = round(r1 + r2, &one);
            let two_b = round(r1 - r2, &sqrt_d0);
            for da in -1i64..=1 {
                for db in -1i64..=1 {
                    let cand = field.elt(
                        BigRational::new(&two_a + da, 2.into()),
                        BigRational::new(&two_b + db, 2.into()),
                    );
                    if cand.is_integral() && cand.pow(p as i64) == *alpha && !out.contains(&cand) {
                        out.push(cand);
                    }
                }
            }
        }
    }
    out
}

/// [k(gamma^(1/m)) : k], taken for the root of smallest degree, i.e. the
/// degree of the smallest irreducible factor of x^m - gamma over k.
///
/// When 4 | m and gamma lies in -4 k^4 with m > 4 the returned value is the
/// upper bound m/2; in every other case it is exact.
pub fn kummer_degree(gamma: &QuadElt, m: u64) -> Result<u64> {
    if gamma.is_zero() {
        return Err(Error::Zero);
    }
    if m == 1 {
        return Ok(1);
    }
    let mut best: Option<u64> = None;
    for p in prime_divisors(m) {
        for delta in pth_roots(gamma, p)? {
            let d = kummer_degree(&delta, m / p)?;
            best = Some(best.map_or(d, |b| b.min(d)));
        }
    }
    if let Some(b) = best {
        return Ok(b);
    }
    if m % 4 == 0 {
        // x^4 + 4 delta^4 = (x^2 + 2 delta x + 2 delta^2)(x^2 - 2 delta x + 2 delta^2).
        let quarter = gamma.scale(&BigRational::new((-1).into(), 4.into()));
        let fourth_roots: Vec<QuadElt> = pth_roots(&quarter, 2)?
            .iter()
            .map(|s| pth_roots(s, 2))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        if !fourth_roots.is_empty() {
            return Ok(m / 2);
        }
    }
    Ok(m)
}

/// True iff K is not contained in Q(zeta_m), i.e. the conductor |D| does not divide m.
pub fn linearly_disjoint_from_cyclotomic(field: &QuadField, m: u64) -> bool {
    m % field.discriminant().unsigned_abs() != 0
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FundamentalUnit {
    pub element: QuadElt,
    pub norm_sign: i32,
}

/// Fundamental unit of a real quadratic field from the continued fraction of a
/// reduced generator omega = (b + sqrt(D))/2 of the maximal order.
pub fn fundamental_unit(field: &QuadField) -> Result<FundamentalUnit> {
    if !field.is_real() {
        return Err(Error::InvalidField(format!("{field} is imaginary; no fundamental unit")));
    }
    let disc = BigInt::from(field.discriminant());
    let s = disc.sqrt();
    // Largest b with b = D (mod 2) and b < sqrt(D).
    let mut b = s.clone();
    if (&b - &disc).is_odd() {
        b -= 1;
    }
    let (p0, q0) = (b.clone(), BigInt::from(2));
    let (mut pp, mut qq) = (p0.clone(), q0.clone());
    // q_{n-2}, q_{n-1} for the convergent denominators.
    let (mut q_prev2, mut q_prev1) = (BigInt::one(), BigInt::zero());
    let mut length = 0u64;
    loop {
        let a = (&pp + &s).div_floor(&qq);
        let q_new = &a * &q_prev1 + &q_prev2;
        q_prev2 = q_prev1;
        q_prev1 = q_new;
        let p_next = &a * &qq - &pp;
        let q_next = (&disc - &p_next * &p_next) / &qq;
        pp = p_next;
        qq = q_next;
        length += 1;
        if pp == p0 && qq == q0 {
            break;
        }
    }
    // epsilon = q_{l-1} omega + q_{l-2}
    let omega = field.elt(BigRational::new(b, 2.into()), BigRational::zero()).add(&half_sqrt_disc(field));
    let eps = omega
        .scale(&BigRational::from_integer(q_prev1))
        .add(&field.elt(BigRational::from_integer(q_prev2), BigRational::zero()));
    let norm_sign = if length % 2 == 0 { 1 } else { -1 };
    debug_assert_eq!(eps.norm(), rat(norm_sign as i64));
    Ok(FundamentalUnit { element: eps, norm_sign })
}

/// sqrt(D)/2 in coordinates over sqrt(d0).
fn half_sqrt_disc(field: &QuadField) -> QuadElt {
    if field.b0() == 1 {
        field.elt(BigRational::zero(), BigRational::new(1.into(), 2.into()))
    } else {
        field.from_ints(0, 1)
    }
}
