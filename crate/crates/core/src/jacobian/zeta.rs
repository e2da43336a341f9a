use serde::{Deserialize, Serialize};

use super::curve::HyperCurve;
use crate::error::{Error, Result};
use crate::field::{FiniteField, PrimeField};

/// Point counts and L-polynomial of a curve over F_p.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaData {
    pub p: u64,
    pub genus: usize,
    /// N_k = #C(F_{p^k}) for k = 1..=g, counted on the smooth projective model.
    pub point_counts: Vec<u64>,
    /// a_0 = 1, ..., a_{2g} = p^g.
    pub l_poly: Vec<i64>,
    pub jacobian_order: u64,
}

impl<F: FiniteField> HyperCurve<F> {
    /// #C(F_q) for the field the curve is defined over: affine points plus
    /// one point at infinity (odd degree) or 1 + chi(lead h) (even degree).
    pub fn count_points_here(&self) -> u64 {
        let f = self.field();
        let q = f.order();
        // Square table indexed by field element index.
        let mut is_square = vec![false; q as usize];
        for i in 0..q {
            let x = f.element(i);
            is_square[f.index_of(&f.mul(&x, &x)) as usize] = true;
        }
        let r = self.ring();
        let mut affine = 0u64;
        for i in 0..q {
            let hx = r.eval(self.h(), &f.element(i));
            if f.is_zero(&hx) {
                affine += 1;
            } else if is_square[f.index_of(&hx) as usize] {
                affine += 2;
            }
        }
        let infinity = if self.is_odd_model() {
            1
        } else if is_square[f.index_of(&r.lead(self.h())) as usize] {
            2
        } else {
            0
        };
        affine + infinity
    }
}

impl HyperCurve<PrimeField> {
    /// N_k = #C(F_{p^k}).
    pub fn count_points(&self, k: usize, budget: u64) -> Result<u64> {
        let p = self.field().p();
        let q = p.checked_pow(k as u32).filter(|&q| q <= budget);
        if q.is_none() {
            return Err(Error::Budget(format!("point count over F_{p}^{k} exceeds budget {budget}")));
        }
        if k == 1 {
            Ok(self.count_points_here())
        } else {
            Ok(self.extend(k)?.count_points_here())
        }
    }

    /// L-polynomial from N_1..N_g via Newton's identities and the functional equation.
    pub fn zeta(&self, budget: u64) -> Result<ZetaData> {
        let p = self.field().p();
        let g = self.genus();
        let counts = (1..=g).map(|k| self.count_points(k, budget)).collect::<Result<Vec<_>>>()?;
        let q = p as i128;
        // S_k = sum of k-th powers of Frobenius eigenvalues.
        let s: Vec<i128> = counts.iter().enumerate().map(|(i, &n)| q.pow(i as u32 + 1) + 1 - n as i128).collect();
        // Elementary symmetric e_j: j e_j = sum_{i=1}^{j} (-1)^{i-1} e_{j-i} S_i.
        let mut e = vec![1i128];
        for j in 1..=g {
            let mut acc = 0i128;
            for i in 1..=j {
                let term = e[j - i] * s[i - 1];
                acc += if i % 2 == 1 { term } else { -term };
            }
            debug_assert_eq!(acc % j as i128, 0);
            e.push(acc / j as i128);
        }
        let mut a = vec![0i128; 2 * g + 1];
        for j in 0..=g {
            a[j] = if j % 2 == 0 { e[j] } else { -e[j] };
        }
        for j in 0..g {
            a[2 * g - j] = q.pow((g - j) as u32) * a[j];
        }
        let order: i128 = a.iter().sum();
        Ok(ZetaData {
            p,
            genus: g,
            point_counts: counts,
            l_poly: a.iter().map(|&c| c as i64).collect(),
            jacobian_order: order as u64,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::PolyRing;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn curve(p: u64, h: &[i64]) -> HyperCurve<PrimeField> {
        let f = PrimeField::new(p).unwrap();
        HyperCurve::new(f, PolyRing::new(f).from_i64s(h)).unwrap()
    }

    #[test]
    fn elliptic_example() {
        let c = curve(7, &[1, 0, 0, -1]);
        let z = c.zeta(1 << 20).unwrap();
        assert_eq!(z.point_counts, vec![12]);
        assert_eq!(z.jacobian_order, 12);
        assert_eq!(z.l_poly, vec![1, 4, 7]);
    }

    #[test]
    fn genus_two_annihilation() {
        let c = curve(3, &[1, 0, 0, 0, 0, 1]);
        let z = c.zeta(1 << 20).unwrap();
        // direct count over F_3: h(x) = x^5 + 1 takes values 1, 2, 0 -> 2 + 0 + 1 affine points
        assert_eq!(z.point_counts[0], 2 + 0 + 1 + 1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let d = c.random_divisor(&mut rng).unwrap();
            assert!(c.is_identity(&c.scalar_mul(z.jacobian_order as i64, &d).unwrap()));
        }
        assert_eq!(c.enumerate_jacobian(1 << 20).unwrap().len() as u64, z.jacobian_order);
    }

    #[test]
    fn functional_equation_and_enumeration() {
        for (p, h) in [(5u64, vec![1i64, 2, 0, 3, 0, 1]), (7, vec![2, 0, 1, 0, 0, 1]), (11, vec![1, 1, 1, 1, 1, 1]), (13, vec![0, 1, 0, 0, 0, 3])] {
            let c = curve(p, &h);
            let z = c.zeta(1 << 24).unwrap();
            let g = z.genus;
            for j in 0..=g {
                assert_eq!(z.l_poly[2 * g - j], (p as i64).pow((g - j) as u32) * z.l_poly[j]);
            }
            assert_eq!(c.enumerate_jacobian(1 << 24).unwrap().len() as u64, z.jacobian_order, "p={p}");
        }
    }

    #[test]
    fn even_model_points_at_infinity() {
        // y^2 = x^4 + 1 over F_5: leading coefficient 1 is a square, two points at infinity.
        let f = PrimeField::new(5).unwrap();
        let c = HyperCurve::new(f, PolyRing::new(f).from_i64s(&[1, 0, 0, 0, 1])).unwrap();
        // x^4 + 1 = 2 for x != 0 (non-residue), 1 at x = 0 -> 2 affine points
        assert_eq!(c.count_points_here(), 4);
    }

    #[test]
    fn budget_and_genus_zero() {
        let c = curve(13, &[1, 0, 0, 0, 0, 1]);
        assert!(c.count_points(2, 100).is_err());
        let f = PrimeField::new(5).unwrap();
        assert!(HyperCurve::new(f, PolyRing::new(f).from_i64s(&[1, 0, 1])).is_err());
    }
}
