//! End-to-end acceptance checks. Runs without the libtest harness so that the
//! one-line verdict per criterion is always printed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use classrank::arith::{is_squarefree, kronecker};
use classrank::classgroup::class_group;
use classrank::families::{higher_degree_family, toy_family, yamamoto_family, Provenance};
use classrank::field::{rat, FiniteField, PrimeField};
use classrank::jacobian::{divisor_mod_p, good_primes, to_odd_model, HyperCurve, MumfordDiv, QCurve};
use classrank::poly::PolyRing;
use classrank::qpoly::{self, qring, QPoly};
use classrank::quadfield::{kummer_degree, selmer_member, QuadField};
use classrank::specialize::{
    growth_slope, higher_degree_fibers, reference_exponent, run_search, selmer_to_class, tally, FiberStatus,
};
use classrank::Budgets;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn budgets() -> Budgets {
    Budgets::default()
}

// ---- 1: class numbers against an independent oracle ----

fn is_fundamental(d: i64) -> bool {
    let r = d.rem_euclid(4);
    if r == 1 {
        return is_squarefree(d, 1 << 20).unwrap();
    }
    if r != 0 {
        return false;
    }
    let q = d / 4;
    matches!(q.rem_euclid(4), 2 | 3) && is_squarefree(q, 1 << 20).unwrap()
}

/// Primitive ideals [a, (b + sqrt D)/2] of norm a below the Minkowski bound
/// (2/pi) sqrt|D|. Every class contains exactly one whose form (a, b, c) is
/// reduced, so counting those gives h.
fn oracle_ideal_count(d: i64) -> u64 {
    let n = d.unsigned_abs() as i64;
    let bound = (2.0 / std::f64::consts::PI * (n as f64).sqrt()) as i64;
    let mut h = 0;
    for a in 1..=bound {
        for b in -a + 1..=a {
            if (b * b - d) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b - d) / (4 * a);
            if a > c || (b < 0 && (a == c)) {
                continue;
            }
            if num_integer::gcd(num_integer::gcd(a, b.abs()), c) != 1 {
                continue;
            }
            h += 1;
        }
    }
    h
}

/// h(D) = -(w / 2|D|) sum_{a=1}^{|D|-1} (D/a) a.
fn oracle_analytic(d: i64) -> u64 {
    let n = d.unsigned_abs();
    let w: i64 = match d {
        -3 => 6,
        -4 => 4,
        _ => 2,
    };
    let s: i64 = (1..n).map(|a| kronecker(&BigInt::from(d), a) as i64 * a as i64).sum();
    (-w * s / (2 * n as i64)) as u64
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for d in -9_999i64..0 {
        if !is_fundamental(d) {
            continue;
        }
        count += 1;
        let h = class_group(d, budgets().class_group_disc).map_err(|e| format!("D = {d}: {e}"))?.class_number;
        let o = oracle_ideal_count(d);
        ensure!(h == o, "D = {d}: library h = {h}, ideal oracle {o}");
        ensure!(h == oracle_analytic(d), "D = {d}: analytic formula disagrees");
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(60), "took {t:?}");
    Ok(format!("{count} fundamental discriminants agree with ideal enumeration and the analytic formula"))
}

// ---- 2, 3: toy family sweeps ----

fn toy_sweep(m: u64, ts: std::ops::RangeInclusive<i64>) -> Outcome {
    let fam = toy_family(m).map_err(|e| e.to_string())?;
    let recs = run_search(&fam, ts, &budgets()).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for r in &recs {
        let x = r.x.clone().unwrap_or_default();
        match r.status {
            FiberStatus::Degenerate => continue,
            FiberStatus::Ok => {}
            s => return Err(format!("x = {x}: status {s:?} {:?}", r.note)),
        }
        ensure!(r.certified_bound >= 1, "x = {x}: certified bound {}", r.certified_bound);
        ensure!(r.measured_rank.is_some_and(|k| k >= 1), "x = {x}: measured {:?}", r.measured_rank);
        checked += 1;
    }
    Ok(format!("{checked} fibers with certified and measured {m}-rank >= 1"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    // x = 2t + 1 runs over the odd numbers 5..=99
    let summary = toy_sweep(3, 2..=49)?;
    let fam = toy_family(3).map_err(|e| e.to_string())?;
    let r = &run_search(&fam, 2..=2, &budgets()).map_err(|e| e.to_string())?[0];
    ensure!(r.x.as_deref() == Some("5") && r.discriminant == Some(-31), "x = 5 gives {:?}", r.discriminant);
    ensure!(r.class_number == Some(3), "h(-31) = {:?}", r.class_number);
    ensure!(start.elapsed() < Duration::from_secs(120), "took {:?}", start.elapsed());
    Ok(format!("{summary}; x = 5 -> D = -31, h = 3"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let s = toy_sweep(5, 2..=7)?;
    ensure!(start.elapsed() < Duration::from_secs(300), "took {:?}", start.elapsed());
    Ok(s)
}

// ---- 4: exact-sequence witness ----

fn criterion_4() -> Outcome {
    let k = QuadField::new(-31).map_err(|e| e.to_string())?;
    let g = k.from_ints(1, -2);
    let b = budgets();
    ensure!(selmer_member(&g, 3, b.factor_iterations).map_err(|e| e.to_string())?, "not in Sel^3");
    let kd = kummer_degree(&g, 3).map_err(|e| e.to_string())?;
    ensure!(kd == 3, "kummer degree {kd}");
    let (form, order) = selmer_to_class(&g, 3, &b).map_err(|e| e.to_string())?;
    ensure!(order == 3, "class order {order}");
    Ok(format!("gamma in Sel^3, Kummer degree 3, class {:?} of order 3", form.as_array()))
}

// ---- 5: toy torsion has exact order m ----

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut parts = Vec::new();
    for m in [3u64, 5, 7] {
        let fam = toy_family(m).map_err(|e| e.to_string())?;
        let cert = &fam.certificates[0];
        let primes: Vec<u64> = good_primes(&cert.h, 100).map_err(|e| e.to_string())?.into_iter().take(2).collect();
        for &p in &primes {
            let (curve, d) = divisor_mod_p(cert, p).map_err(|e| e.to_string())?;
            let ord = curve.order_dividing(&d, m).map_err(|e| e.to_string())?;
            ensure!(ord == Some(m), "m = {m}, p = {p}: order {ord:?}");
            // independent confirmation: m D = 0 and D != 0
            ensure!(curve.is_identity(&curve.scalar_mul(m as i64, &d).unwrap()) && !curve.is_identity(&d), "m = {m}, p = {p}");
        }
        parts.push(format!("m={m} at p={primes:?}"));
    }
    ensure!(start.elapsed() < Duration::from_secs(10), "took {:?}", start.elapsed());
    Ok(format!("exact order m for {}", parts.join(", ")))
}

// ---- 6: Yamamoto torsion evidence ----

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let fam = yamamoto_family(3, &rat(2)).map_err(|e| e.to_string())?;
    let model = to_odd_model(&fam.h, Some(&rat(1))).map_err(|e| e.to_string())?;
    let odd = QCurve::from_qpoly(model.h.clone()).map_err(|e| e.to_string())?;
    let mut hits = Vec::new();
    let mut profile = Vec::new();
    for p in [5u64, 7, 11] {
        let Ok(c) = odd.reduce_mod(p) else { continue };
        let n = c.torsion_profile(3, budgets().enumeration).map_err(|e| e.to_string())?;
        profile.push(format!("#J(F_{p})[3] = {n}"));
        if n >= 9 {
            hits.push(p);
        }
    }
    ensure!(hits.len() >= 2, "only {hits:?} show #J[3] >= 9 ({})", profile.join(", "));
    ensure!(start.elapsed() < Duration::from_secs(120), "took {:?}", start.elapsed());
    let tors = fam.claims.iter().find(|c| c.statement.contains("torsion")).map(|c| c.provenance);
    ensure!(tors.is_none() || tors == Some(Provenance::PaperSourced), "torsion claim provenance {tors:?}");
    Ok(format!(
        "{}; 3-rank >= 2 of J(Q)_tors is a published claim (provenance: paper-sourced), not proved by this tool",
        profile.join(", ")
    ))
}

// ---- 7: independence checks and the group law ----

fn group_law_samples<F: FiniteField>(c: &HyperCurve<F>, rng: &mut ChaCha8Rng, n: usize) -> Result<(), String>
where
    F::Elem: std::fmt::Debug,
{
    let e = |x: classrank::Error| x.to_string();
    for i in 0..n {
        let a = c.random_divisor(rng).map_err(e)?;
        let b = c.random_divisor(rng).map_err(e)?;
        let d = c.random_divisor(rng).map_err(e)?;
        ensure!(c.is_valid(&a, true), "sample {i}: invalid reduced divisor");
        let ab = c.add(&a, &b).map_err(e)?;
        ensure!(ab == c.add(&b, &a).map_err(e)?, "sample {i}: not commutative");
        let l = c.add(&ab, &d).map_err(e)?;
        let r = c.add(&a, &c.add(&b, &d).map_err(e)?).map_err(e)?;
        ensure!(l == r, "sample {i}: not associative");
        ensure!(c.add(&a, &c.identity()).map_err(e)? == a, "sample {i}: identity");
        ensure!(c.is_identity(&c.add(&a, &c.negate(&a)).map_err(e)?), "sample {i}: inverse");
        let (j, k) = (rng.gen_range(-20i64..20), rng.gen_range(-20i64..20));
        let lhs = c.scalar_mul(j + k, &a).map_err(e)?;
        let rhs = c.add(&c.scalar_mul(j, &a).map_err(e)?, &c.scalar_mul(k, &a).map_err(e)?).map_err(e)?;
        ensure!(lhs == rhs, "sample {i}: scalar multiplication");
    }
    Ok(())
}

/// y^2 = prod (x - e_i) over F_p: the Weierstrass divisors (x - e_i, 0) for
/// i < 2g generate J[2] = (Z/2)^(2g).
fn weierstrass_vector(p: u64, roots: &[u64]) -> (HyperCurve<PrimeField>, Vec<MumfordDiv<u64>>) {
    let f = PrimeField::new(p).unwrap();
    let r = PolyRing::new(f);
    let mut h = r.one_poly();
    for &e in roots {
        h = r.mul(&h, &r.from_coeffs(vec![(p - e) % p, 1]));
    }
    let c = HyperCurve::new(f, h).unwrap();
    let divs = roots.iter().map(|&e| c.point_divisor(&e, &0).unwrap()).collect();
    (c, divs)
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut vectors = 0;
    let err = |e: classrank::Error| e.to_string();

    // toy curves of genus 1, 2, 3 (m = 3, 5, 7): a single class spans Z/m, {D, 2D} does not span (Z/m)^2
    for m in [3u64, 5, 7] {
        let fam = toy_family(m).map_err(err)?;
        let p = good_primes(&fam.h, 100).map_err(err)?[0];
        let (c, d) = divisor_mod_p(&fam.certificates[0], p).map_err(err)?;
        let d2 = c.scalar_mul(2, &d).map_err(err)?;
        ensure!(c.independence_check(std::slice::from_ref(&d), m).map_err(err)?, "m = {m}: single class reported dependent");
        ensure!(!c.independence_check(&[d, d2], m).map_err(err)?, "m = {m}: {{D, 2D}} reported independent");
        group_law_samples(&c, &mut rng, 1000)?;
        vectors += 1;
    }

    // Yamamoto odd model, genus 2: the two certificate classes are independent
    let fam = yamamoto_family(3, &rat(2)).map_err(err)?;
    let model = to_odd_model(&fam.h, Some(&rat(1))).map_err(err)?;
    for p in [5u64, 7] {
        let divs: Vec<_> = fam
            .certificates
            .iter()
            .map(|cert| divisor_mod_p(&model.transport_certificate(cert)?, p))
            .collect::<classrank::Result<_>>()
            .map_err(err)?;
        let c = &divs[0].0;
        let (d1, d2) = (divs[0].1.clone(), divs[1].1.clone());
        ensure!(c.independence_check(&[d1.clone(), d2], 3).map_err(err)?, "Yamamoto pair dependent mod {p}");
        let twice = c.scalar_mul(2, &d1).map_err(err)?;
        ensure!(!c.independence_check(&[d1, twice], 3).map_err(err)?, "{{D, 2D}} independent mod {p}");
        group_law_samples(c, &mut rng, 1000)?;
        vectors += 1;
    }

    // genus 3 with full rational 2-torsion: e_1..e_6 independent, adding e_1 + e_2 creates a relation
    let (c, w) = weierstrass_vector(13, &[0, 1, 2, 3, 4, 5, 6]);
    ensure!(c.genus() == 3, "genus {}", c.genus());
    ensure!(c.independence_check(&w[..6], 2).map_err(err)?, "six Weierstrass classes dependent");
    ensure!(!c.independence_check(&w, 2).map_err(err)?, "all seven Weierstrass classes independent");
    let sum = c.add(&w[0], &w[1]).map_err(err)?;
    ensure!(!c.independence_check(&[w[0].clone(), w[1].clone(), sum], 2).map_err(err)?, "D1, D2, D1+D2 independent");
    group_law_samples(&c, &mut rng, 1000)?;
    vectors += 1;

    ensure!(start.elapsed() < Duration::from_secs(60), "took {:?}", start.elapsed());
    Ok(format!("{vectors} test vectors, 1000 group-law samples each"))
}

// ---- 8: the higher-degree construction ----

/// Degree of psi = b (y - f) / x^k on y^m = h, as the number of x-roots of
/// (b f + s x^k)^m - b^m h that move with s (the resultant in y of
/// y^m - h and b y - (b f + s x^k), up to the factor b^m).
fn oracle_psi_degree(h: &QPoly, f: &QPoly, b: &BigRational, k: usize, m: u64) -> u64 {
    let r = qring();
    let bf = r.scale(f, b);
    let bm = r.scale(h, &num_traits::pow(b.clone(), m as usize));
    let sample = |s: i64| {
        let t = r.add(&bf, &r.shift(&qpoly::from_ints(&[s]), k));
        r.sub(&r.pow(&t, m), &bm)
    };
    let polys: Vec<QPoly> = (1..=4).map(sample).collect();
    let mut g = polys[0].clone();
    for p in &polys[1..] {
        g = r.gcd(&g, p);
    }
    let top = polys.iter().map(|p| r.deg(p)).max().unwrap();
    (top - r.deg(&g)) as u64
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let fam = higher_degree_family(3, 5).map_err(|e| e.to_string())?;
    let l = fam.higher_degree.clone().ok_or("no construction data")?;
    ensure!(l.r == 7, "r = {}", l.r);
    let r = qring();
    // ord_x(f^3 - h) recomputed from scratch
    let diff = r.sub(&r.pow(&l.f, 3), &fam.h);
    let ord = diff.iter().position(|c| !c.is_zero()).unwrap_or(usize::MAX) as u64;
    ensure!(ord >= 2 && ord == l.ord, "ord_x(f^3 - h) = {ord}, recorded {}", l.ord);
    let b: BigRational = classrank::field::parse_rational(&l.b).map_err(|e| e.to_string())?;
    let deg = oracle_psi_degree(&fam.h, &l.f, &b, (l.r - l.d) as usize, 3);
    ensure!(deg == 5 && l.psi_degree == 5, "deg psi: oracle {deg}, library {}", l.psi_degree);
    let fibers = higher_degree_fibers(&fam, &(1..=30).collect::<Vec<_>>()).map_err(|e| e.to_string())?;
    let slope = growth_slope(&fibers).ok_or("no slope")?;
    ensure!(slope <= 19.5, "slope {slope:.3}");
    ensure!(start.elapsed() < Duration::from_secs(10), "took {:?}", start.elapsed());
    Ok(format!("r = 7, ord = {ord}, deg psi = 5, log-discriminant slope {slope:.3} <= 19.5"))
}

// ---- 9: tally shape ----

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let fam = toy_family(3).map_err(|e| e.to_string())?;
    // |D| <= |1 - x^3| <= 10^6 needs x <= 100, i.e. t <= 49
    let recs = run_search(&fam, 1..=60, &budgets()).map_err(|e| e.to_string())?;
    let counts: Vec<usize> = [10_000u64, 100_000, 1_000_000]
        .iter()
        .map(|&x| tally(&recs, x, 1, reference_exponent(&fam)).count)
        .collect();
    ensure!(counts[2] >= 10, "count at 10^6 is {}", counts[2]);
    ensure!(counts.windows(2).all(|w| w[0] <= w[1]), "counts {counts:?} decrease");
    ensure!(start.elapsed() < Duration::from_secs(300), "took {:?}", start.elapsed());
    Ok(format!("distinct fields with certified 3-rank >= 1 at X = 10^4, 10^5, 10^6: {counts:?}"))
}

// ---- 10: point counts and annihilation ----

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let primes = [3u64, 5, 7, 11, 13];
    let b = budgets();
    for i in 0..20 {
        let p = primes[rng.gen_range(0..primes.len())];
        let g = 1 + i % 2;
        let c = loop {
            let mut h: Vec<i64> = (0..2 * g + 1).map(|_| rng.gen_range(0..p as i64)).collect();
            h.push(rng.gen_range(1..p as i64));
            let f = PrimeField::new(p).unwrap();
            if let Ok(c) = HyperCurve::new(f, PolyRing::new(f).from_i64s(&h)) {
                break c;
            }
        };
        let z = c.zeta(b.point_count).map_err(|e| e.to_string())?;
        let n = z.jacobian_order;
        let enumerated = c.enumerate_jacobian(b.enumeration).map_err(|e| e.to_string())?.len() as u64;
        ensure!(enumerated == n, "curve {i} over F_{p}: L(1) = {n}, enumeration {enumerated}");
        for j in 0..50 {
            let d = c.random_divisor(&mut rng).map_err(|e| e.to_string())?;
            ensure!(c.is_identity(&c.scalar_mul(n as i64, &d).unwrap()), "curve {i}, divisor {j} not killed by {n}");
        }
    }
    ensure!(start.elapsed() < Duration::from_secs(120), "took {:?}", start.elapsed());
    Ok("20 curves of genus 1 and 2: L(1) matches enumeration and kills 50 random divisors each".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("class numbers match an independent oracle for -10^4 < D < 0", criterion_1),
        ("toy m = 3, odd x in [5, 99]", criterion_2),
        ("toy m = 5, odd x in [5, 15]", criterion_3),
        ("witness 1 - 2 sqrt(-31)", criterion_4),
        ("toy torsion has exact order m", criterion_5),
        ("Yamamoto 3-torsion over F_p", criterion_6),
        ("independence checks and group law", criterion_7),
        ("higher-degree construction (3, 5)", criterion_8),
        ("tally growth for the toy family", criterion_9),
        ("zeta functions annihilate random divisors", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let secs = start.elapsed().as_secs_f64();
        match out {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{secs:.2}s]", i + 1)
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
