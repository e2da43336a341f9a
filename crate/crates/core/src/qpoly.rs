//! Helpers specific to polynomials over the rationals: resultants,
//! discriminants, integral normalization, reduction mod p and real-root counts.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Result;
use crate::field::{format_rational, parse_rational, PrimeField, Rationals};
use crate::poly::PolyRing;

pub type QPoly = Vec<BigRational>;

pub fn qring() -> PolyRing<Rationals> {
    PolyRing::new(Rationals)
}

pub fn from_ints(coeffs: &[i64]) -> QPoly {
    qring().from_i64s(coeffs)
}

pub fn from_bigints(coeffs: &[BigInt]) -> QPoly {
    qring().normalize(coeffs.iter().map(|c| BigRational::from_integer(c.clone())).collect())
}

/// Parses little-endian coefficient strings ("3", "-1/2", ...).
pub fn parse_poly<S: AsRef<str>>(coeffs: &[S]) -> Result<QPoly> {
    let parsed = coeffs.iter().map(|s| parse_rational(s.as_ref())).collect::<Result<Vec<_>>>()?;
    Ok(qring().normalize(parsed))
}

/// Little-endian coefficient strings; the zero polynomial is `[]`.
pub fn format_poly(f: &QPoly) -> Vec<String> {
    f.iter().map(format_rational).collect()
}

/// Human-readable rendering, highest degree first.
pub fn display_poly(f: &QPoly, var: &str) -> String {
    if f.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, c) in f.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let a = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let coeff = format_rational(&a);
        match (i, a.is_one()) {
            (0, _) => out.push_str(&coeff),
            (_, true) => {}
            (_, false) => {
                out.push_str(&coeff);
                out.push('*');
            }
        }
        match i {
            0 => {}
            1 => out.push_str(var),
            _ => out.push_str(&format!("{var}^{i}")),
        }
    }
    out
}

/// Resultant over a field by the Euclidean recursion.
pub fn resultant(a: &QPoly, b: &QPoly) -> BigRational {
    let r = qring();
    if a.is_empty() || b.is_empty() {
        return BigRational::zero();
    }
    let mut a = a.clone();
    let mut b = b.clone();
    let mut acc = BigRational::one();
    loop {
        let da = a.len() - 1;
        let db = b.len() - 1;
        if db == 0 {
            return acc * b[0].pow(da as i32);
        }
        if da < db {
            if (da * db) % 2 == 1 {
                acc = -acc;
            }
            std::mem::swap(&mut a, &mut b);
            continue;
        }
        let rem = r.rem(&a, &b);
        if rem.is_empty() {
            return BigRational::zero();
        }
        let dr = rem.len() - 1;
        // res(a, b) = (-1)^(da db) lc(b)^(da - dr) res(b, rem)
        if (da * db) % 2 == 1 {
            acc = -acc;
        }
        acc *= r.lead(&b).pow((da - dr) as i32);
        a = b;
        b = rem;
    }
}

/// disc(f) = (-1)^(n(n-1)/2) res(f, f') / lc(f).
pub fn discriminant(f: &QPoly) -> BigRational {
    let r = qring();
    let n = f.len().saturating_sub(1);
    if n == 0 {
        return BigRational::zero();
    }
    if n == 1 {
        return BigRational::one();
    }
    let res = resultant(f, &r.derivative(f));
    let sign = if (n * (n - 1) / 2) % 2 == 1 { -BigRational::one() } else { BigRational::one() };
    sign * res / r.lead(f)
}

pub fn common_denominator(f: &QPoly) -> BigInt {
    f.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
}

/// Writes `f = content * g` with `g` integral, primitive and positive leading coefficient.
pub fn primitive_part(f: &QPoly) -> (BigRational, Vec<BigInt>) {
    if f.is_empty() {
        return (BigRational::zero(), Vec::new());
    }
    let den = common_denominator(f);
    let ints: Vec<BigInt> = f.iter().map(|c| (c * BigRational::from_integer(den.clone())).to_integer()).collect();
    let mut g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if ints.last().unwrap().is_negative() {
        g = -g;
    }
    let prim = ints.iter().map(|c| c / &g).collect();
    (BigRational::new(g, den), prim)
}

/// Reduces into F_p; `None` if p divides a denominator.
pub fn reduce_mod_p(f: &QPoly, field: PrimeField) -> Option<Vec<u64>> {
    let coeffs = f.iter().map(|c| field.from_rational(c)).collect::<Option<Vec<_>>>()?;
    Some(PolyRing::new(field).normalize(coeffs))
}

pub fn eval(f: &QPoly, x: &BigRational) -> BigRational {
    qring().eval(f, x)
}

/// `prod (x - r)`.
pub fn from_roots(roots: &[BigRational]) -> QPoly {
    let r = qring();
    roots.iter().fold(r.one_poly(), |acc, root| {
        r.mul(&acc, &r.normalize(vec![-root.clone(), BigRational::one()]))
    })
}

/// Number of distinct real roots, by a Sturm sequence.
pub fn count_real_roots(f: &QPoly) -> usize {
    let r = qring();
    if f.len() <= 1 {
        return 0;
    }
    let mut seq = vec![f.clone(), r.derivative(f)];
    loop {
        let n = seq.len();
        let rem = r.rem(&seq[n - 2], &seq[n - 1]);
        if rem.is_empty() {
            break;
        }
        seq.push(r.neg(&rem));
    }
    let sign_changes = |signs: Vec<i32>| {
        let nz: Vec<i32> = signs.into_iter().filter(|&s| s != 0).collect();
        nz.windows(2).filter(|w| w[0] != w[1]).count()
    };
    let sign = |c: &BigRational| if c.is_positive() { 1 } else if c.is_negative() { -1 } else { 0 };
    // Sign at +inf is the leading sign; at -inf it flips with odd degree.
    let at_pos: Vec<i32> = seq.iter().map(|p| sign(&r.lead(p))).collect();
    let at_neg: Vec<i32> = seq
        .iter()
        .map(|p| {
            let s = sign(&r.lead(p));
            if (p.len() - 1) % 2 == 1 {
                -s
            } else {
                s
            }
        })
        .collect();
    sign_changes(at_neg) - sign_changes(at_pos)
}

/// Determinant of a square matrix over Q[x] by fraction-free (Bareiss) elimination.
pub fn det_poly_matrix(mut m: Vec<Vec<QPoly>>) -> QPoly {
    let r = qring();
    let n = m.len();
    if n == 0 {
        return r.one_poly();
    }
    let mut sign = BigRational::one();
    let mut prev = r.one_poly();
    for k in 0..n - 1 {
        if m[k][k].is_empty() {
            match (k + 1..n).find(|&i| !m[i][k].is_empty()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return Vec::new(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = r.sub(&r.mul(&m[i][j], &m[k][k]), &r.mul(&m[i][k], &m[k][j]));
                m[i][j] = r.div_exact(&num, &prev).expect("Bareiss division is exact");
            }
            m[i][k] = Vec::new();
        }
        prev = m[k][k].clone();
    }
    r.scale(&m[n - 1][n - 1], &sign)
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

/// Natural log of |n| for a nonzero big integer, robust beyond f64 range.
pub fn ln_abs(n: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    let bits = n.bits();
    if bits < 1000 {
        return n.abs().to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Serde adapter storing a rational as an exact string such as "-3/7".
pub mod serde_rat {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::field::{format_rational, parse_rational};

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter storing a polynomial as its little-endian list of rational strings.
pub mod serde_poly {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{format_poly, parse_poly, QPoly};

    pub fn serialize<S: Serializer>(f: &QPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(format_poly(f))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<QPoly, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        parse_poly(&v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rat, rat_frac};

    #[test]
    fn resultant_of_linear_factors() {
        // res(prod(x - a_i), prod(x - b_j)) = prod(a_i - b_j)
        let a = from_roots(&[rat(1), rat(2)]);
        let b = from_roots(&[rat(5), rat(-3)]);
        let expected = rat((1 - 5) * (1 + 3) * (2 - 5) * (2 + 3));
        assert_eq!(resultant(&a, &b), expected);
        assert_eq!(resultant(&b, &a), expected);
    }

    #[test]
    fn discriminant_small_cases() {
        // x^2 + b x + c -> b^2 - 4c
        assert_eq!(discriminant(&from_ints(&[3, 5, 1])), rat(25 - 12));
        // 1 - x^3: -27
        assert_eq!(discriminant(&from_ints(&[1, 0, 0, -1])), rat(-27));
        // x^3 + a x + b -> -4a^3 - 27 b^2
        assert_eq!(discriminant(&from_ints(&[2, -3, 0, 1])), rat(-4 * -27 - 27 * 4));
    }

    #[test]
    fn primitive_normalization() {
        let f = vec![rat_frac(1, 2), rat_frac(-3, 4)];
        let (c, g) = primitive_part(&f);
        assert_eq!(c, rat_frac(-1, 4));
        assert_eq!(g, vec![BigInt::from(-2), BigInt::from(3)]);
    }

    #[test]
    fn sturm_counts() {
        assert_eq!(count_real_roots(&from_roots(&[rat(1), rat(2), rat(-7)])), 3);
        assert_eq!(count_real_roots(&from_ints(&[1, 0, 1])), 0);
        assert_eq!(count_real_roots(&from_ints(&[1, 0, 0, -1])), 1);
    }

    #[test]
    fn bareiss_matches_cofactor() {
        let x = from_ints(&[0, 1]);
        let one = from_ints(&[1]);
        // [[x, 1], [1, x]] -> x^2 - 1
        let m = vec![vec![x.clone(), one.clone()], vec![one.clone(), x.clone()]];
        assert_eq!(det_poly_matrix(m), from_ints(&[-1, 0, 1]));
    }

    #[test]
    fn display() {
        assert_eq!(display_poly(&from_ints(&[4, 0, 0, -5, 0, 0, 1]), "x"), "x^6 - 5*x^3 + 4");
        assert_eq!(display_poly(&from_ints(&[1, -1]), "x"), "-x + 1");
    }
}
