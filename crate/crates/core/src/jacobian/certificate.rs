use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::cantor::MumfordDiv;
use super::curve::{is_good_prime, HyperCurve, QCurve};
use crate::error::{Error, Result};
use crate::field::{format_rational, parse_rational, ExtensionField, Field, PrimeField};
use crate::poly::Poly;
use crate::qpoly::{self, format_poly, parse_poly, qring, QPoly};

/// The identity h - c^2 = e * w^m. On y^2 = h it gives
/// div(y - c) = m * D_w - (m deg w) * infinity with D_w supported on the points
/// (a, c(a)) for the roots a of w, so D_w - (deg w) * infinity is m-torsion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TorsionCertificate {
    pub h: QPoly,
    pub c: QPoly,
    pub w: QPoly,
    pub e: BigRational,
    pub m: u64,
}

/// JSON form: little-endian coefficient lists of exact rational strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateJson {
    pub h: Vec<String>,
    pub c: Vec<String>,
    pub w: Vec<String>,
    pub e: String,
    pub m: u64,
}

impl TorsionCertificate {
    pub fn new(h: QPoly, c: QPoly, w: QPoly, e: BigRational, m: u64) -> Self {
        let r = qring();
        TorsionCertificate { h: r.normalize(h), c: r.normalize(c), w: r.normalize(w), e, m }
    }

    pub fn from_json(j: &CertificateJson) -> Result<Self> {
        Ok(TorsionCertificate::new(parse_poly(&j.h)?, parse_poly(&j.c)?, parse_poly(&j.w)?, parse_rational(&j.e)?, j.m))
    }

    pub fn to_json(&self) -> CertificateJson {
        CertificateJson {
            h: format_poly(&self.h),
            c: format_poly(&self.c),
            w: format_poly(&self.w),
            e: format_rational(&self.e),
            m: self.m,
        }
    }

    /// h - c^2 == e * w^m exactly.
    pub fn identity_holds(&self) -> bool {
        let r = qring();
        let lhs = r.sub(&self.h, &r.mul(&self.c, &self.c));
        let rhs = r.scale(&r.pow(&self.w, self.m), &self.e);
        lhs == rhs
    }
}

/// Full check: m > 1, e != 0, the identity, h squarefree of degree >= 3 and
/// gcd(w, c) = 1 (so y + c does not vanish where y - c does).
pub fn verify_certificate(cert: &TorsionCertificate) -> bool {
    if cert.m < 2 || cert.e.is_zero() || cert.w.is_empty() || !cert.identity_holds() {
        return false;
    }
    if QCurve::from_qpoly(cert.h.clone()).is_err() {
        return false;
    }
    let r = qring();
    r.deg(&r.gcd(&cert.w, &cert.c)) == 0
}

fn build<F: Field>(
    curve: &HyperCurve<F>,
    cert: &TorsionCertificate,
    map: impl Fn(&BigRational) -> Option<F::Elem>,
) -> Result<MumfordDiv<F::Elem>> {
    let r = curve.ring();
    let red = |f: &QPoly| -> Result<Poly<F>> {
        let c = f.iter().map(&map).collect::<Option<Vec<_>>>().ok_or(Error::BadPrime(
            curve.field().characteristic(),
            "prime divides a certificate denominator".into(),
        ))?;
        Ok(r.normalize(c))
    };
    let w = red(&cert.w)?;
    if w.len() != cert.w.len() {
        return Err(Error::BadPrime(curve.field().characteristic(), "leading coefficient of w vanishes".into()));
    }
    let u = r.monic(&w);
    let v = r.rem(&red(&cert.c)?, &u);
    let d = MumfordDiv { u, v };
    if !curve.is_valid(&d, false) {
        return Err(Error::InvalidCertificate("v^2 is not h modulo u after reduction".into()));
    }
    curve.reduce(&d)
}

fn check_inputs(cert: &TorsionCertificate, p: u64) -> Result<QCurve> {
    if !verify_certificate(cert) {
        return Err(Error::InvalidCertificate("certificate does not verify".into()));
    }
    if !is_good_prime(&cert.h, p)? {
        return Err(Error::BadPrime(p, "bad reduction".into()));
    }
    let curve = QCurve::from_qpoly(cert.h.clone())?;
    if !curve.is_odd_model() {
        return Err(Error::UnsupportedModel("certificate lives on an even model; transport it with to_odd_model".into()));
    }
    Ok(curve)
}

/// The reduced Mumford class of D_w modulo p.
pub fn divisor_mod_p(cert: &TorsionCertificate, p: u64) -> Result<(HyperCurve<PrimeField>, MumfordDiv<u64>)> {
    let curve = check_inputs(cert, p)?.reduce_mod(p)?;
    let f = *curve.field();
    let d = build(&curve, cert, |q| f.from_rational(q))?;
    Ok((curve, d))
}

/// The class of D_w over F_{p^k}.
pub fn divisor_over_extension(
    cert: &TorsionCertificate,
    p: u64,
    k: usize,
) -> Result<(HyperCurve<ExtensionField>, MumfordDiv<Vec<u64>>)> {
    let curve = check_inputs(cert, p)?.over_extension(p, k)?;
    let f = curve.field().clone();
    let base = f.base();
    let d = build(&curve, cert, |q| base.from_rational(q).map(|c| f.embed(c)))?;
    Ok((curve, d))
}

/// Curve and divisor over F_p, or over F_{p^k} when k > 1, in a common
/// enum so callers can stay generic.
pub enum ReducedDivisor {
    Prime(HyperCurve<PrimeField>, MumfordDiv<u64>),
    Extension(HyperCurve<ExtensionField>, MumfordDiv<Vec<u64>>),
}

pub fn divisor_from_certificate(cert: &TorsionCertificate, p: u64, k: usize) -> Result<ReducedDivisor> {
    if k <= 1 {
        let (c, d) = divisor_mod_p(cert, p)?;
        Ok(ReducedDivisor::Prime(c, d))
    } else {
        let (c, d) = divisor_over_extension(cert, p, k)?;
        Ok(ReducedDivisor::Extension(c, d))
    }
}

impl ReducedDivisor {
    /// Exact order when it divides m.
    pub fn order_dividing(&self, m: u64) -> Result<Option<u64>> {
        match self {
            ReducedDivisor::Prime(c, d) => c.order_dividing(d, m),
            ReducedDivisor::Extension(c, d) => c.order_dividing(d, m),
        }
    }
}

/// Reduces every certificate modulo p (all must share h) and checks that
/// their classes are independent m-torsion.
pub fn certificates_independent(certs: &[TorsionCertificate], p: u64) -> Result<bool> {
    let first = certs.first().ok_or_else(|| Error::InvalidParameter("no certificates".into()))?;
    let m = first.m;
    if certs.iter().any(|c| c.h != first.h || c.m != m) {
        return Err(Error::InvalidParameter("certificates must share h and m".into()));
    }
    let mut divs = Vec::new();
    let mut curve = None;
    for c in certs {
        let (cv, d) = divisor_mod_p(c, p)?;
        curve = Some(cv);
        divs.push(d);
    }
    curve.unwrap().independence_check(&divs, m)
}

pub fn display(cert: &TorsionCertificate) -> String {
    format!(
        "{} - ({})^2 = {} * ({})^{}",
        qpoly::display_poly(&cert.h, "x"),
        qpoly::display_poly(&cert.c, "x"),
        format_rational(&cert.e),
        qpoly::display_poly(&cert.w, "x"),
        cert.m
    )
}
