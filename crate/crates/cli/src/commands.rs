use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use classrank::arith::primes_up_to;
use classrank::classgroup::class_group;
use classrank::families::{
    higher_degree_claim, higher_degree_family_with, parse_certificates, toy_family, yamamoto_family_with, CurveFamily, Provenance,
    RationalMap,
};
use classrank::field::{format_rational, parse_rational, rat, PrimeField};
use classrank::jacobian::{
    certificates_independent, display, divisor_from_certificate, is_good_prime, to_odd_model, verify_certificate,
    HyperCurve, TorsionCertificate,
};
use classrank::poly::PolyRing;
use classrank::qpoly::{self, qring};
use classrank::quadfield::QuadField;
use classrank::specialize::{
    growth_slope, higher_degree_fibers, read_jsonl, reference_exponent, run_search, tally, write_jsonl, FiberStatus,
    HigherDegreeFiber, SpecRecord, TallyReport,
};
use classrank::Budgets;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> Result<()> {
    let mut w = open_output(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

// ---- classgroup ----

#[derive(Debug, Serialize)]
pub struct ClassGroupReport {
    pub discriminant: i64,
    pub narrow: bool,
    pub class_number: u64,
    pub invariant_factors: Vec<u64>,
    pub generators: Vec<[i128; 3]>,
    pub ranks: Vec<(u64, u32)>,
}

pub fn classgroup(disc: i64, ms: &[u64], budgets: &Budgets) -> Result<ClassGroupReport> {
    QuadField::from_discriminant(disc).map_err(|e| anyhow!("D = {disc} is not a fundamental discriminant ({e})"))?;
    let s = class_group(disc, budgets.class_group_disc)?;
    Ok(ClassGroupReport {
        discriminant: disc,
        narrow: s.narrow,
        class_number: s.class_number,
        invariant_factors: s.invariant_factors.clone(),
        generators: s.generators.iter().map(|g| g.as_array()).collect(),
        ranks: ms.iter().map(|&m| (m, s.m_rank(m))).collect(),
    })
}

pub fn print_classgroup(r: &ClassGroupReport, w: &mut dyn Write) -> Result<()> {
    let structure = if r.invariant_factors.is_empty() {
        "trivial".to_string()
    } else {
        r.invariant_factors.iter().map(|d| format!("Z/{d}")).collect::<Vec<_>>().join(" x ")
    };
    writeln!(w, "D = {}", r.discriminant)?;
    writeln!(w, "h{} = {}", if r.narrow { "+" } else { "" }, r.class_number)?;
    writeln!(w, "structure: {structure}")?;
    for (m, k) in &r.ranks {
        writeln!(w, "rank_{m} = {k}")?;
    }
    Ok(())
}

// ---- verify-certificate ----

#[derive(Debug, Serialize)]
pub struct PrimeVerdict {
    pub p: u64,
    pub good: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notice: Option<String>,
    pub order: Option<u64>,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct CertificateVerdict {
    pub index: usize,
    pub identity: String,
    pub verified: bool,
    /// "given" or the x-coordinate of the Weierstrass point used for the odd model.
    pub model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub primes: Vec<PrimeVerdict>,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct IndependenceVerdict {
    pub p: u64,
    pub certificates: usize,
    pub combinations: u64,
    pub independent: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub m: u64,
    pub certificates: Vec<CertificateVerdict>,
    pub independence: Vec<IndependenceVerdict>,
    pub pass: bool,
}

/// Small integer root of h, used as the Weierstrass point of an even model.
fn integer_root(h: &qpoly::QPoly) -> Option<num_rational::BigRational> {
    (0..=100i64).flat_map(|a| [a, -a]).map(rat).find(|a| qpoly::eval(h, a) == rat(0))
}

pub fn verify_certificates(
    text: &str,
    primes: Option<&[u64]>,
    weierstrass: Option<&str>,
) -> Result<VerifyReport> {
    let certs = parse_certificates(text)?;
    let first = certs.first().ok_or_else(|| anyhow!("no certificates in input"))?;
    let m = first.m;
    let r = qring();
    let even = r.deg(&first.h) % 2 == 0;
    let point = match (even, weierstrass) {
        (false, _) => None,
        (true, Some(s)) => Some(parse_rational(s)?),
        (true, None) => Some(
            integer_root(&first.h)
                .ok_or_else(|| anyhow!("even-degree h without an integer root; pass --weierstrass-point"))?,
        ),
    };
    let model_name = point.as_ref().map_or("given".to_string(), |a| format!("odd model at x = {}", format_rational(a)));
    let primes: Vec<u64> = match primes {
        Some(ps) => ps.to_vec(),
        None => primes_up_to(200)
            .into_iter()
            .filter(|&p| is_good_prime(&first.h, p).unwrap_or(false))
            .take(2)
            .collect(),
    };

    let mut verdicts = Vec::new();
    let mut odd_certs: Vec<Option<TorsionCertificate>> = Vec::new();
    for (index, cert) in certs.iter().enumerate() {
        let verified = verify_certificate(cert);
        let mut v = CertificateVerdict {
            index,
            identity: display(cert),
            verified,
            model: model_name.clone(),
            error: None,
            primes: Vec::new(),
            pass: false,
        };
        if cert.m != m || r.normalize(cert.h.clone()) != r.normalize(first.h.clone()) {
            v.error = Some("certificate does not share h and m with the first one".into());
        }
        let odd = if !verified || v.error.is_some() {
            None
        } else {
            let t = match &point {
                None => Ok(cert.clone()),
                Some(a) => to_odd_model(&cert.h, Some(a)).and_then(|model| model.transport_certificate(cert)),
            };
            match t {
                Ok(c) => Some(c),
                Err(e) => {
                    v.error = Some(e.to_string());
                    None
                }
            }
        };
        if let Some(c) = &odd {
            for &p in &primes {
                // Both the given and the odd model must reduce well.
                let good = is_good_prime(&cert.h, p)? && is_good_prime(&c.h, p)?;
                if !good {
                    v.primes.push(PrimeVerdict {
                        p,
                        good,
                        notice: Some("bad reduction".into()),
                        order: None,
                        pass: true,
                    });
                    continue;
                }
                let res = divisor_from_certificate(c, p, 1).and_then(|d| d.order_dividing(m));
                v.primes.push(match res {
                    Ok(order) => PrimeVerdict { p, good, notice: None, order, pass: order == Some(m) },
                    Err(e) => PrimeVerdict { p, good, notice: Some(e.to_string()), order: None, pass: false },
                });
            }
        }
        v.pass = v.verified && v.error.is_none() && v.primes.iter().all(|p| p.pass) && v.primes.iter().any(|p| p.good);
        verdicts.push(v);
        odd_certs.push(odd);
    }

    let mut independence = Vec::new();
    let usable: Vec<TorsionCertificate> = odd_certs.iter().flatten().cloned().collect();
    if certs.len() > 1 && usable.len() == certs.len() {
        for &p in &primes {
            if !usable.iter().all(|c| is_good_prime(&c.h, p).unwrap_or(false))
                || !certs.iter().all(|c| is_good_prime(&c.h, p).unwrap_or(false))
            {
                continue;
            }
            let combinations = m.saturating_pow(usable.len() as u32);
            independence.push(match certificates_independent(&usable, p) {
                Ok(b) => IndependenceVerdict { p, certificates: usable.len(), combinations, independent: Some(b), error: None },
                Err(e) => IndependenceVerdict {
                    p,
                    certificates: usable.len(),
                    combinations,
                    independent: None,
                    error: Some(e.to_string()),
                },
            });
        }
    }
    let indep_ok = certs.len() < 2 || (!independence.is_empty() && independence.iter().any(|v| v.independent == Some(true)));
    let pass = verdicts.iter().all(|v| v.pass) && indep_ok;
    Ok(VerifyReport { m, certificates: verdicts, independence, pass })
}

pub fn print_verify(r: &VerifyReport, w: &mut dyn Write) -> Result<()> {
    let mark = |b: bool| if b { "pass" } else { "FAIL" };
    for c in &r.certificates {
        writeln!(w, "certificate {}: {}", c.index, c.identity)?;
        writeln!(w, "  identity and squarefreeness: {}", mark(c.verified))?;
        writeln!(w, "  model: {}", c.model)?;
        if let Some(e) = &c.error {
            writeln!(w, "  error: {e}")?;
        }
        for p in &c.primes {
            match (&p.notice, p.good) {
                (Some(n), false) => writeln!(w, "  p = {}: skipped ({n})", p.p)?,
                (Some(n), true) => writeln!(w, "  p = {}: FAIL ({n})", p.p)?,
                (None, _) => {
                    let order = p.order.map_or("not dividing m".to_string(), |o| o.to_string());
                    writeln!(w, "  p = {}: order {order}, {}", p.p, mark(p.pass))?
                }
            }
        }
    }
    for v in &r.independence {
        match v.independent {
            Some(b) => writeln!(
                w,
                "independence mod {} over {} combinations: {}",
                v.p,
                v.combinations,
                if b { "independent" } else { "dependent" }
            )?,
            None => writeln!(w, "independence mod {}: error ({})", v.p, v.error.as_deref().unwrap_or(""))?,
        }
    }
    writeln!(w, "verdict: {}", mark(r.pass))?;
    Ok(())
}

// ---- families, search and tally ----

pub fn load_family(name: &str, m: u64, lambda: &str, delta_power: u32) -> Result<CurveFamily> {
    Ok(match name {
        "toy" => toy_family(m)?,
        "yamamoto" => yamamoto_family_with(m, &parse_rational(lambda)?, delta_power)?,
        path => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading family file {path}"))?;
            CurveFamily::from_json(&text)?
        }
    })
}

#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    t: i64,
    status: FiberStatus,
    x: &'a str,
    discriminant: Option<i64>,
    selmer_rank_witness: u32,
    certified_bound: u32,
    measured_rank: Option<u32>,
    class_number: Option<u64>,
    invariant_factors: String,
    cond_i: bool,
    cond_ii: bool,
    cond_iii: bool,
    narrow: bool,
    note: &'a str,
}

pub fn write_csv(records: &[SpecRecord], w: &mut dyn Write) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in records {
        out.serialize(CsvRow {
            t: r.t,
            status: r.status,
            x: r.x.as_deref().unwrap_or(""),
            discriminant: r.discriminant,
            selmer_rank_witness: r.selmer_rank_witness,
            certified_bound: r.certified_bound,
            measured_rank: r.measured_rank,
            class_number: r.class_number,
            invariant_factors: r
                .invariant_factors
                .as_ref()
                .map(|v| v.iter().map(u64::to_string).collect::<Vec<_>>().join(";"))
                .unwrap_or_default(),
            cond_i: r.cond_i,
            cond_ii: r.cond_ii,
            cond_iii: r.cond_iii,
            narrow: r.narrow,
            note: r.note.as_deref().unwrap_or(""),
        })?;
    }
    out.flush()?;
    Ok(())
}

pub fn search(fam: &CurveFamily, t_min: i64, t_max: i64, budgets: &Budgets) -> Result<Vec<SpecRecord>> {
    if t_min > t_max {
        return Ok(Vec::new());
    }
    Ok(run_search(fam, t_min..=t_max, budgets)?)
}

pub fn write_records(records: &[SpecRecord], csv: bool, path: Option<&Path>) -> Result<()> {
    let mut w = open_output(path)?;
    if csv {
        write_csv(records, &mut w)?;
    } else {
        write_jsonl(records, &mut w)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records(path: &PathBuf) -> Result<Vec<SpecRecord>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(read_jsonl(BufReader::new(f))?)
}

pub fn tally_report(fam: &CurveFamily, records: &[SpecRecord], x_bound: u64, target: u32) -> TallyReport {
    tally(records, x_bound, target, reference_exponent(fam))
}

pub fn error_records(records: &[SpecRecord]) -> usize {
    records.iter().filter(|r| r.status == FiberStatus::Error).count()
}

// ---- higher-degree ----

#[derive(Debug, Serialize)]
pub struct HigherDegreeReport {
    pub m: u64,
    pub d: u64,
    pub r: u64,
    pub a: Vec<i64>,
    pub c0: String,
    pub h: Vec<String>,
    pub f: Vec<String>,
    pub ord: u64,
    pub ord_required: u64,
    pub b: String,
    pub psi: RationalMap,
    pub psi_degree: u64,
    pub delta0: String,
    pub phi_degree: u64,
    pub degree_checks_pass: bool,
    pub rank_claim: u32,
    pub rank_claim_provenance: Provenance,
    pub growth_exponent: u64,
    pub fitted_slope: Option<f64>,
    pub slope_within_tolerance: Option<bool>,
    pub fibers: Vec<HigherDegreeFiber>,
}

pub fn higher_degree(m: u64, d: u64, a: Option<&[i64]>, c0: &str, t_min: i64, t_max: i64) -> Result<HigherDegreeReport> {
    let fam = higher_degree_family_with(m, d, a, &parse_rational(c0)?)?;
    let l = fam.higher_degree.clone().ok_or_else(|| anyhow!("family carries no construction data"))?;
    let ts: Vec<i64> = (t_min..=t_max).filter(|&t| t != 0).collect();
    let fibers = higher_degree_fibers(&fam, &ts)?;
    let slope = growth_slope(&fibers);
    let claim = fam.claims.first().map(|c| c.provenance).unwrap_or(Provenance::PaperSourced);
    Ok(HigherDegreeReport {
        m,
        d,
        r: l.r,
        a: l.a.clone(),
        c0: format_rational(&l.c0),
        h: qpoly::format_poly(&fam.h),
        f: qpoly::format_poly(&l.f),
        ord: l.ord,
        ord_required: l.r / m,
        b: l.b.clone(),
        psi: l.psi.clone(),
        psi_degree: l.psi_degree,
        delta0: l.delta0.clone(),
        phi_degree: l.phi_degree,
        degree_checks_pass: l.psi_degree == d && l.phi_degree == d && l.ord >= l.r / m,
        rank_claim: higher_degree_claim(m, d),
        rank_claim_provenance: claim,
        growth_exponent: l.growth_exponent,
        fitted_slope: slope,
        slope_within_tolerance: slope.map(|s| s <= l.growth_exponent as f64 + 0.5),
        fibers,
    })
}

// ---- check-jacobian ----

#[derive(Debug, Serialize)]
pub struct JacobianCase {
    pub p: u64,
    pub h: Vec<u64>,
    pub genus: usize,
    pub point_counts: Vec<u64>,
    pub l_poly: Vec<i64>,
    pub jacobian_order: u64,
    pub divisors: usize,
    pub annihilated: usize,
    pub pass: bool,
}

#[derive(Debug, Serialize)]
pub struct JacobianReport {
    pub seed: u64,
    pub cases: Vec<JacobianCase>,
    pub pass: bool,
}

/// Random odd-degree squarefree curves y^2 = h over F_p with p <= max_p and
/// genus <= max_genus; checks that #J(F_p) = L(1) kills random divisors.
pub fn check_jacobian(
    seed: u64,
    curves: usize,
    divisors: usize,
    max_p: u64,
    max_genus: usize,
    budgets: &Budgets,
) -> Result<JacobianReport> {
    let primes: Vec<u64> = primes_up_to(max_p).into_iter().filter(|&p| p > 2).collect();
    if primes.is_empty() || max_genus == 0 {
        bail!("need an odd prime <= max-p and max-genus >= 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::new();
    for _ in 0..curves {
        let p = primes[rng.gen_range(0..primes.len())];
        let g = rng.gen_range(1..=max_genus);
        let f = PrimeField::new(p)?;
        let curve = loop {
            let mut h: Vec<i64> = (0..2 * g + 1).map(|_| rng.gen_range(0..p as i64)).collect();
            h.push(1);
            if let Ok(c) = HyperCurve::new(f, PolyRing::new(f).from_i64s(&h)) {
                break c;
            }
        };
        let z = curve.zeta(budgets.point_count)?;
        let mut annihilated = 0;
        for _ in 0..divisors {
            let d = curve.random_divisor(&mut rng)?;
            if curve.is_identity(&curve.scalar_mul(z.jacobian_order as i64, &d)?) {
                annihilated += 1;
            }
        }
        cases.push(JacobianCase {
            p,
            h: curve.h().clone(),
            genus: curve.genus(),
            point_counts: z.point_counts,
            l_poly: z.l_poly,
            jacobian_order: z.jacobian_order,
            divisors,
            annihilated,
            pass: annihilated == divisors,
        });
    }
    let pass = cases.iter().all(|c| c.pass);
    Ok(JacobianReport { seed, cases, pass })
}
