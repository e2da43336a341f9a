//! The fiber pipeline: P_t = phi^(-1)(t), the quadratic field Q(P_t), the
//! witnesses gamma(P_t), conditions (i)-(iii), the certified lower bound
//! from the Selmer sequence, the measured m-rank, and tallies by
//! discriminant. Higher-degree families produce degree-d fibers, handled by
//! [`higher_degree_fibers`].

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::ops::RangeInclusive;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{squarefree_part, Budgets};
use crate::classgroup::{class_group, class_of_ideal, is_principal, power, QuadForm};
use crate::error::{Error, Result};
use crate::families::{fiber_polynomial, CurveFamily, FamilyKind, SpecMap};
use crate::field::{format_rational, rat};
use crate::quadfield::{
    ideal_factorization, is_mth_power, kummer_degree, linearly_disjoint_from_cyclotomic, selmer_member, QuadElt,
    QuadEltRepr, QuadField, Signature,
};
use crate::qpoly::{self, qring};

pub const SCHEMA_VERSION: u32 = 1;

/// Most witness combinations examined by the independence test.
const INDEPENDENCE_LIMIT: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FiberStatus {
    /// Conditions checked and bound computed.
    Ok,
    /// Fiber at infinity, on a branch point, or with square defining value.
    Degenerate,
    /// Field inside Q(zeta_m): condition (iii) fails.
    Excluded,
    /// A budget or arithmetic error; the message is in `note`.
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessCheck {
    pub selmer: bool,
    pub kummer_degree: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecRecord {
    pub schema: u32,
    pub t: i64,
    pub status: FiberStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// x(P_t) as an exact rational.
    pub x: Option<String>,
    /// h(x(P_t)).
    pub defining_value: Option<String>,
    pub discriminant: Option<i64>,
    pub signature: Option<Signature>,
    pub gammas: Vec<QuadEltRepr>,
    pub witness_checks: Vec<WitnessCheck>,
    pub cond_i: bool,
    pub cond_ii: bool,
    pub cond_iii: bool,
    /// Number of witnesses passing (i) and (ii) that are independent modulo m-th powers.
    pub selmer_rank_witness: u32,
    pub certified_bound: u32,
    pub measured_rank: Option<u32>,
    pub class_number: Option<u64>,
    pub invariant_factors: Option<Vec<u64>>,
    /// The measured group is the narrow class group (real fields).
    pub narrow: bool,
}

impl SpecRecord {
    fn empty(t: i64) -> Self {
        SpecRecord {
            schema: SCHEMA_VERSION,
            t,
            status: FiberStatus::Ok,
            note: None,
            x: None,
            defining_value: None,
            discriminant: None,
            signature: None,
            gammas: Vec::new(),
            witness_checks: Vec::new(),
            cond_i: false,
            cond_ii: false,
            cond_iii: false,
            selmer_rank_witness: 0,
            certified_bound: 0,
            measured_rank: None,
            class_number: None,
            invariant_factors: None,
            narrow: false,
        }
    }

    fn degenerate(mut self, why: &str) -> Self {
        self.status = FiberStatus::Degenerate;
        self.note = Some(why.into());
        self
    }

    pub fn field(&self) -> Result<Option<QuadField>> {
        self.discriminant.map(QuadField::from_discriminant).transpose()
    }

    pub fn gamma_elements(&self) -> Result<Vec<QuadElt>> {
        self.gammas.iter().map(QuadEltRepr::to_elt).collect()
    }
}

fn quadratic_fibers(fam: &CurveFamily) -> Result<()> {
    if !fam.is_hyperelliptic() || !matches!(fam.map, SpecMap::Mobius { .. }) {
        return Err(Error::UnsupportedModel(format!(
            "{:?} family has fibers of degree {}; use higher_degree_fibers",
            fam.kind, fam.map_degree
        )));
    }
    Ok(())
}

/// P_t, its field Q(sqrt(h(x))) and the witness values, with no condition checked.
pub fn specialize_fiber(fam: &CurveFamily, t: i64, budgets: &Budgets) -> Result<SpecRecord> {
    quadratic_fibers(fam)?;
    let rec = SpecRecord::empty(t);
    let x = match fam.map.x_at(&rat(t)) {
        Some(x) => x,
        None => return Ok(rec.degenerate("fiber at infinity")),
    };
    let mut rec = SpecRecord { x: Some(format_rational(&x)), ..rec };
    let v = qpoly::eval(&fam.h, &x);
    rec.defining_value = Some(format_rational(&v));
    if v.is_zero() {
        return Ok(rec.degenerate("defining value is zero"));
    }
    // sqrt(n/d) = sqrt(n d) / d and n d = s f^2.
    let (s, f) = squarefree_part(&(v.numer() * v.denom()), budgets.factor_iterations)?;
    if s.is_one() {
        return Ok(rec.degenerate("defining value is a square"));
    }
    let d0 = s.to_i64().ok_or_else(|| Error::Budget(format!("radicand {s} out of range")))?;
    let field = QuadField::new(d0)?;
    rec.discriminant = Some(field.discriminant());
    rec.signature = Some(field.signature());
    let y_coeff = BigRational::new(f, v.denom().clone());
    for w in &fam.witnesses {
        let c = qpoly::eval(&w.c, &x);
        let b = if w.uses_y { -y_coeff.clone() } else { BigRational::zero() };
        let g = field.elt(&w.kappa * c, &w.kappa * b);
        if g.is_zero() {
            return Ok(rec.degenerate("a witness vanishes"));
        }
        rec.gammas.push(QuadEltRepr::from(&g));
    }
    Ok(rec)
}

/// Number of elements of `gammas`, taken greedily, that are independent in
/// K^x / K^(x m): no nontrivial combination prod gamma_i^(a_i) with
/// 0 <= a_i < m is an m-th power.
pub fn independent_count(gammas: &[QuadElt], m: u64) -> Result<u32> {
    let mut chosen: Vec<QuadElt> = Vec::new();
    for g in gammas {
        let n = chosen.len() as u32 + 1;
        let combos = m.checked_pow(n).filter(|&c| c <= INDEPENDENCE_LIMIT);
        if combos.is_none() {
            return Err(Error::Budget(format!("{m}^{n} witness combinations")));
        }
        // All vectors with a nonzero coefficient on g.
        let mut ok = true;
        let others = m.pow(n - 1);
        'outer: for a in 1..m {
            let base = g.pow(a as i64);
            for code in 0..others {
                let mut acc = base.clone();
                let mut c = code;
                for h in &chosen {
                    let e = c % m;
                    c /= m;
                    if e > 0 {
                        acc = acc.mul(&h.pow(e as i64));
                    }
                }
                if is_mth_power(&acc, m)? {
                    ok = false;
                    break 'outer;
                }
            }
        }
        if ok {
            chosen.push(g.clone());
        }
    }
    Ok(chosen.len() as u32)
}

/// Fills cond_i, cond_ii, cond_iii and selmer_rank_witness.
/// cond_i and cond_ii hold when every witness passes; the witness count uses
/// the witnesses that pass both.
pub fn check_conditions(rec: &mut SpecRecord, m: u64, budgets: &Budgets) -> Result<()> {
    if rec.status == FiberStatus::Degenerate {
        return Err(Error::Precondition("degenerate fiber".into()));
    }
    let field = rec.field()?.ok_or_else(|| Error::Precondition("record has no field".into()))?;
    let gammas = rec.gamma_elements()?;
    let mut passing = Vec::new();
    rec.witness_checks.clear();
    for g in &gammas {
        let selmer = selmer_member(g, m, budgets.factor_iterations)?;
        let kd = kummer_degree(g, m)?;
        if selmer && kd == m {
            passing.push(g.clone());
        }
        rec.witness_checks.push(WitnessCheck { selmer, kummer_degree: kd });
    }
    rec.cond_i = !gammas.is_empty() && rec.witness_checks.iter().all(|c| c.selmer);
    rec.cond_ii = !gammas.is_empty() && rec.witness_checks.iter().all(|c| c.kummer_degree == m);
    rec.cond_iii = linearly_disjoint_from_cyclotomic(&field, m);
    rec.selmer_rank_witness = independent_count(&passing, m)?;
    if !rec.cond_iii {
        rec.status = FiberStatus::Excluded;
        rec.note = Some(format!("field of discriminant {} lies in Q(zeta_{m})", field.discriminant()));
    }
    Ok(())
}

/// s - r, floored at 0, where s is the independent witness count and r the
/// m-rank of O^x / (O^x)^m: the unit rank plus one when gcd(m, #roots of
/// unity) > 1. Zero unless condition (iii) holds.
pub fn certified_bound(rec: &SpecRecord, m: u64) -> u32 {
    if !rec.cond_iii || rec.status == FiberStatus::Degenerate {
        return 0;
    }
    let field = match rec.field() {
        Ok(Some(f)) => f,
        _ => return 0,
    };
    let torsion = u32::from((field.roots_of_unity() as u64).gcd(&m) > 1);
    rec.selmer_rank_witness.saturating_sub(field.unit_rank() + torsion)
}

/// Writes gamma = a^m and returns the class of a with its exact order.
pub fn selmer_to_class(gamma: &QuadElt, m: u64, budgets: &Budgets) -> Result<(QuadForm, u64)> {
    let field = gamma.field();
    let mut factors = ideal_factorization(gamma, budgets.factor_iterations)?;
    if factors.iter().any(|f| f.exponent % m as i64 != 0) {
        return Err(Error::Precondition("element is not in the m-Selmer group".into()));
    }
    for f in &mut factors {
        f.exponent /= m as i64;
    }
    let form = class_of_ideal(&factors, &field)?;
    // a^m is principal; in the narrow group the order may double.
    for k in 1..=2 * m {
        if is_principal(&power(&form, k as i64)?)? {
            return Ok((form, k));
        }
    }
    Err(Error::Precondition("class order exceeds 2m".into()))
}

/// Fills measured_rank, class_number and the invariants when |D| is within budget.
pub fn measure(rec: &mut SpecRecord, m: u64, budgets: &Budgets) -> Result<()> {
    if let Some(d) = rec.discriminant {
        if d.unsigned_abs() <= budgets.class_group_disc {
            let s = class_group(d, budgets.class_group_disc)?;
            rec.measured_rank = Some(s.m_rank(m));
            rec.class_number = Some(s.class_number);
            rec.narrow = s.narrow;
            rec.invariant_factors = Some(s.invariant_factors);
        }
    }
    Ok(())
}

/// The whole pipeline for one t; errors end up in the record.
pub fn process_fiber(fam: &CurveFamily, t: i64, budgets: &Budgets) -> SpecRecord {
    let run = || -> std::result::Result<SpecRecord, (SpecRecord, Error)> {
        let mut rec = specialize_fiber(fam, t, budgets).map_err(|e| (SpecRecord::empty(t), e))?;
        if rec.status == FiberStatus::Degenerate {
            return Ok(rec);
        }
        if let Err(e) = check_conditions(&mut rec, fam.m, budgets) {
            return Err((rec, e));
        }
        rec.certified_bound = certified_bound(&rec, fam.m);
        if let Err(e) = measure(&mut rec, fam.m, budgets) {
            return Err((rec, e));
        }
        Ok(rec)
    };
    match run() {
        Ok(r) => r,
        Err((mut r, e)) => {
            r.status = FiberStatus::Error;
            r.note = Some(e.to_string());
            r
        }
    }
}

/// Records for every t in the range, in ascending t regardless of thread count.
pub fn run_search(fam: &CurveFamily, range: RangeInclusive<i64>, budgets: &Budgets) -> Result<Vec<SpecRecord>> {
    quadratic_fibers(fam)?;
    let ts: Vec<i64> = range.collect();
    Ok(ts.par_iter().map(|&t| process_fiber(fam, t, budgets)).collect())
}

/// Exponent of the reference curve X^(num/den) / log X.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceExponent {
    pub num: u64,
    pub den: u64,
}

impl ReferenceExponent {
    pub fn value(&self, x: f64) -> f64 {
        if x <= 1.0 {
            return 0.0;
        }
        x.powf(self.num as f64 / self.den as f64) / x.ln()
    }
}

/// 1/(2g+1) for hyperelliptic families with a rational Weierstrass point,
/// 1/((m+1)d - 1) for the higher-degree construction and 1/(2n(d-1)) otherwise, with
/// n the degree of x and d that of phi.
pub fn reference_exponent(fam: &CurveFamily) -> ReferenceExponent {
    match (&fam.higher_degree, fam.kind) {
        (Some(l), _) => ReferenceExponent { num: 1, den: l.growth_exponent },
        (None, FamilyKind::Superelliptic) => {
            let n = fam.coordinate_degrees[0].max(1);
            ReferenceExponent { num: 1, den: 2 * n * fam.map_degree.saturating_sub(1).max(1) }
        }
        _ => ReferenceExponent { num: 1, den: 2 * fam.genus() + 1 },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecadeBin {
    /// |D| in [lower, upper).
    pub lower: u64,
    pub upper: u64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TallyReport {
    pub schema: u32,
    pub x_bound: u64,
    pub target_rank: u32,
    /// Distinct fundamental discriminants with |D| <= X and a record certifying the target.
    pub count: usize,
    /// Of those, how many have a measured rank at least the target.
    pub measured_confirmed: usize,
    pub discriminants: Vec<i64>,
    pub reference_exponent: ReferenceExponent,
    pub reference_value: f64,
    pub histogram: Vec<DecadeBin>,
    pub records_considered: usize,
}

pub fn tally(records: &[SpecRecord], x_bound: u64, target_rank: u32, reference: ReferenceExponent) -> TallyReport {
    let mut best: BTreeMap<i64, (u32, Option<u32>)> = BTreeMap::new();
    for r in records {
        if let Some(d) = r.discriminant {
            if d.unsigned_abs() <= x_bound && r.certified_bound >= target_rank && r.status == FiberStatus::Ok {
                let e = best.entry(d).or_insert((0, None));
                e.0 = e.0.max(r.certified_bound);
                e.1 = e.1.max(r.measured_rank);
            }
        }
    }
    let discriminants: Vec<i64> = best.keys().copied().collect();
    let measured_confirmed = best.values().filter(|(_, m)| m.is_some_and(|m| m >= target_rank)).count();
    let mut histogram = Vec::new();
    let mut lower = 1u64;
    while lower <= x_bound {
        let upper = lower.saturating_mul(10);
        let count = discriminants.iter().filter(|d| (lower..upper).contains(&d.unsigned_abs())).count();
        histogram.push(DecadeBin { lower, upper, count });
        if upper == u64::MAX {
            break;
        }
        lower = upper;
    }
    TallyReport {
        schema: SCHEMA_VERSION,
        x_bound,
        target_rank,
        count: discriminants.len(),
        measured_confirmed,
        discriminants,
        reference_exponent: reference,
        reference_value: reference.value(x_bound as f64),
        histogram,
        records_considered: records.len(),
    }
}

pub fn write_jsonl<W: Write>(records: &[SpecRecord], mut w: W) -> Result<()> {
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| Error::Parse(e.to_string()))?;
        writeln!(w, "{line}").map_err(|e| Error::Parse(e.to_string()))?;
    }
    Ok(())
}

pub fn read_jsonl<R: BufRead>(r: R) -> Result<Vec<SpecRecord>> {
    let mut out = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: SpecRecord = serde_json::from_str(&line).map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
        if rec.schema != SCHEMA_VERSION {
            return Err(Error::Parse(format!("line {}: schema {} unsupported", i + 1, rec.schema)));
        }
        out.push(rec);
    }
    Ok(out)
}

/// One degree-d fiber of a family whose map is not a Mobius map in x.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HigherDegreeFiber {
    pub t: i64,
    /// Primitive integral polynomial satisfied by x(P_t), little-endian.
    pub polynomial: Vec<String>,
    pub degree: usize,
    pub discriminant: String,
    pub log_abs_discriminant: f64,
    pub real_roots: usize,
    /// (r1, r2).
    pub signature: (usize, usize),
}

/// Defining polynomials of Q(P_t) and their discriminants. The polynomial
/// discriminant is a multiple of the field discriminant, so its growth bounds
/// the field's from above.
pub fn higher_degree_fibers(fam: &CurveFamily, ts: &[i64]) -> Result<Vec<HigherDegreeFiber>> {
    ts.par_iter()
        .map(|&t| {
            let p = fiber_polynomial(fam, &rat(t))?;
            let disc = qpoly::discriminant(&p);
            if disc.is_zero() {
                return Err(Error::Degenerate(format!("fiber polynomial at t = {t} is not squarefree")));
            }
            let n = qring().deg(&p) as usize;
            let real = qpoly::count_real_roots(&p);
            Ok(HigherDegreeFiber {
                t,
                polynomial: qpoly::format_poly(&p),
                degree: n,
                discriminant: format_rational(&disc),
                log_abs_discriminant: qpoly::ln_abs(&disc.to_integer()),
                real_roots: real,
                signature: (real, (n - real) / 2),
            })
        })
        .collect()
}

/// Least-squares slope of log|disc| against log t over fibers with t >= 1.
pub fn growth_slope(fibers: &[HigherDegreeFiber]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        fibers.iter().filter(|f| f.t >= 1).map(|f| ((f.t as f64).ln(), f.log_abs_discriminant)).collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}
