use num_rational::BigRational;
use num_traits::{One, Zero};

use super::certificate::TorsionCertificate;
use crate::error::{Error, Result};
use crate::qpoly::{self, qring, QPoly};

/// An odd-degree model Y^2 = H(X) of y^2 = h(x), obtained from the rational
/// Weierstrass point x = a via x = a + 1/X, y = Y / X^(g+1). With `a = None`
/// the input is already odd and the transform is the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddModel {
    pub original: QPoly,
    pub a: Option<BigRational>,
    pub h: QPoly,
    pub genus: usize,
}

pub fn to_odd_model(h: &QPoly, a: Option<&BigRational>) -> Result<OddModel> {
    let r = qring();
    let h = r.normalize(h.clone());
    let deg = r.deg(&h);
    if deg < 3 {
        return Err(Error::InvalidCurve(format!("degree {deg} gives genus 0")));
    }
    let genus = (deg as usize - 1) / 2;
    let a = match a {
        None => {
            if deg % 2 == 0 {
                return Err(Error::UnsupportedModel("even model needs a rational Weierstrass point".into()));
            }
            return Ok(OddModel { original: h.clone(), a: None, h, genus });
        }
        Some(a) => a.clone(),
    };
    if !r.eval(&h, &a).is_zero() {
        return Err(Error::Precondition(format!("h({a}) != 0")));
    }
    if r.eval(&r.derivative(&h), &a).is_zero() {
        return Err(Error::Precondition(format!("{a} is a multiple root")));
    }
    // H(X) = X^(2g+2) h(a + 1/X) = sum h_i (aX + 1)^i X^(2g+2-i)
    let n = 2 * genus + 2;
    let shifted = r.compose(&h, &r.from_coeffs(vec![a.clone(), BigRational::one()]));
    // shifted(t) = h(a + t); H(X) = X^n shifted(1/X) = reversal of shifted padded to n.
    let mut coeffs = vec![BigRational::zero(); n + 1];
    for (i, c) in shifted.iter().enumerate() {
        coeffs[n - i] = c.clone();
    }
    let big_h = r.normalize(coeffs);
    debug_assert_eq!(r.deg(&big_h), n as i64 - 1);
    if !r.is_squarefree(&big_h) {
        return Err(Error::InvalidCurve("transformed model is not squarefree".into()));
    }
    Ok(OddModel { original: h, a: Some(a), h: big_h, genus })
}

impl OddModel {
    /// (x, y) -> (X, Y) = (1/(x - a), y / (x - a)^(g+1)).
    pub fn map_point(&self, x: &BigRational, y: &BigRational) -> Option<(BigRational, BigRational)> {
        match &self.a {
            None => Some((x.clone(), y.clone())),
            Some(a) => {
                let t = x - a;
                if t.is_zero() {
                    return None;
                }
                let big_x = t.recip();
                Some((big_x.clone(), y * big_x.pow(self.genus as i32 + 1)))
            }
        }
    }

    /// Rewrites h - c^2 = e w^m on the odd model:
    /// C(X) = X^(g+1) c(a + 1/X) and H - C^2 = e X^(2g+2 - m deg w) W~(X)^m,
    /// which needs deg c <= g + 1 and m | 2g + 2 - m deg w.
    pub fn transport_certificate(&self, cert: &TorsionCertificate) -> Result<TorsionCertificate> {
        let r = qring();
        if r.normalize(cert.h.clone()) != self.original {
            return Err(Error::InvalidParameter("certificate is for a different curve".into()));
        }
        let a = match &self.a {
            None => return Ok(cert.clone()),
            Some(a) => a.clone(),
        };
        let g1 = self.genus + 1;
        let n = 2 * g1;
        let dc = r.deg(&cert.c).max(0) as usize;
        if dc > g1 {
            return Err(Error::UnsupportedModel(format!("deg c = {dc} exceeds g + 1 = {g1}")));
        }
        let dw = r.deg(&cert.w).max(0) as usize;
        let m = cert.m as usize;
        if m * dw > n || (n - m * dw) % m != 0 {
            return Err(Error::UnsupportedModel(format!("m = {m} does not divide 2g + 2 - m deg w")));
        }
        let k = (n - m * dw) / m;
        let lin = r.from_coeffs(vec![a, BigRational::one()]);
        // X^d f(a + 1/X) for a polynomial f of degree <= d
        let homog = |f: &QPoly, d: usize| -> QPoly {
            let s = r.compose(f, &lin);
            let mut coeffs = vec![BigRational::zero(); d + 1];
            for (i, c) in s.iter().enumerate() {
                coeffs[d - i] = c.clone();
            }
            r.normalize(coeffs)
        };
        let big_c = homog(&cert.c, g1);
        let big_w = r.shift(&homog(&cert.w, dw), k);
        let out = TorsionCertificate::new(self.h.clone(), big_c, big_w, cert.e.clone(), cert.m);
        debug_assert!(out.identity_holds());
        Ok(out)
    }
}

pub fn display_model(m: &OddModel) -> String {
    qpoly::display_poly(&m.h, "X")
}
