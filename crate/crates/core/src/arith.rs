//! Integer plumbing: primality, factorization with an explicit work budget,
//! square-free parts, Kronecker symbols and modular square roots.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Primes below this bound are removed by trial division before Pollard rho runs.
const TRIAL_BOUND: u64 = 1 << 12;

/// Work limits shared by the pipeline. Every budget is a hard cap; exceeding
/// one produces an error rather than a silent truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Budgets {
    /// Pollard rho iterations allowed per composite cofactor.
    pub factor_iterations: u64,
    /// Largest |D| for which class groups are computed.
    pub class_group_disc: u64,
    /// Largest field size q = p^k (and p^g) for point counting.
    pub point_count: u64,
    /// Largest number of Mumford pairs visited by exhaustive Jacobian enumeration.
    pub enumeration: u64,
}

impl Default for Budgets {
    fn default() -> Self {
        Budgets {
            factor_iterations: 2_000_000,
            class_group_disc: 100_000_000,
            point_count: 10_000_000,
            enumeration: 20_000_000,
        }
    }
}

impl Budgets {
    /// Applies the `CLASSRANK_BUDGET` environment override to the factorization budget.
    pub fn with_env_override(mut self) -> Self {
        if let Some(v) = std::env::var("CLASSRANK_BUDGET")
            .ok()
            .and_then(|s| s.trim().parse::<u64>().ok())
            .filter(|&v| v > 0)
        {
            self.factor_iterations = v;
        }
        self
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i as u64)
        .collect()
}

/// Brent's variant of Pollard rho. Returns a nontrivial factor of the odd
/// composite `n`, or `None` when `budget` iterations are exhausted.
fn pollard_brent(n: u64, budget: &mut u64) -> Option<u64> {
    let mut c = 1u64;
    while *budget > 0 {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut ys) = (2u64, 2u64, 2u64);
        let mut q = 1u64;
        let mut g = 1u64;
        let mut r = 1u64;
        let m = 128u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                let steps = m.min(r - k);
                for _ in 0..steps {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += steps;
                *budget = budget.saturating_sub(steps);
                if *budget == 0 && g == 1 {
                    return None;
                }
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return Some(g);
        }
        c += 1;
    }
    None
}

fn push_factor(out: &mut Vec<(u64, u32)>, p: u64, e: u32) {
    if let Some(slot) = out.iter_mut().find(|(q, _)| *q == p) {
        slot.1 += e;
    } else {
        out.push((p, e));
    }
}

/// Factors `n > 0` into sorted `(prime, exponent)` pairs.
pub fn factor_u64(n: u64, budget: u64) -> Result<Vec<(u64, u32)>> {
    if n == 0 {
        return Err(Error::Zero);
    }
    let mut out = Vec::new();
    let mut n = n;
    for p in [2u64, 3, 5] {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    let mut p = 7u64;
    let mut step = [4u64, 2, 4, 2, 4, 6, 2, 6].iter().cycle();
    while p <= TRIAL_BOUND && p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += step.next().unwrap();
    }
    let mut remaining = budget;
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            push_factor(&mut out, m, 1);
            continue;
        }
        if let Some(r) = exact_root_u64(m, 2) {
            stack.push(r);
            stack.push(r);
            continue;
        }
        match pollard_brent(m, &mut remaining) {
            Some(d) => {
                stack.push(d);
                stack.push(m / d);
            }
            None => return Err(Error::FactorBudget(m.to_string())),
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn exact_root_u64(n: u64, k: u32) -> Option<u64> {
    let r = (n as f64).powf(1.0 / k as f64).round() as u64;
    (r.saturating_sub(1)..=r + 1).find(|c| c.checked_pow(k) == Some(n))
}

/// Factors `|n|` (n nonzero) into sorted `(prime, exponent)` pairs. Cofactors
/// beyond 64 bits that survive trial division are reported as a budget failure.
pub fn factor_bigint(n: &BigInt, budget: u64) -> Result<Vec<(u64, u32)>> {
    if n.is_zero() {
        return Err(Error::Zero);
    }
    let mut m = n.abs();
    if let Some(small) = m.to_u64() {
        return factor_u64(small, budget);
    }
    let mut out = Vec::new();
    let limit = TRIAL_BOUND.max(budget.min(1 << 20));
    for p in primes_up_to(limit) {
        let bp = BigInt::from(p);
        let mut e = 0;
        loop {
            let (q, r) = m.div_rem(&bp);
            if !r.is_zero() {
                break;
            }
            m = q;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        if let Some(small) = m.to_u64() {
            for (q, e) in factor_u64(small, budget)? {
                push_factor(&mut out, q, e);
            }
            out.sort_unstable();
            return Ok(out);
        }
    }
    Err(Error::FactorBudget(n.to_string()))
}

/// Writes `n = s * f^2` with `s` square-free and `sign(s) = sign(n)`.
pub fn squarefree_part(n: &BigInt, budget: u64) -> Result<(BigInt, BigInt)> {
    if n.is_zero() {
        return Err(Error::Zero);
    }
    let mut s = BigInt::one();
    let mut f = BigInt::one();
    for (p, e) in factor_bigint(n, budget)? {
        if e % 2 == 1 {
            s *= p;
        }
        f *= BigInt::from(p).pow(e / 2);
    }
    if n.sign() == Sign::Minus {
        s = -s;
    }
    Ok((s, f))
}

pub fn is_squarefree(n: i64, budget: u64) -> Result<bool> {
    if n == 0 {
        return Err(Error::Zero);
    }
    Ok(factor_u64(n.unsigned_abs(), budget)?.iter().all(|&(_, e)| e == 1))
}

/// Valuation of a nonzero integer at the prime `p`.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    debug_assert!(!n.is_zero());
    let bp = BigInt::from(p);
    let mut m = n.clone();
    let mut e = 0;
    loop {
        let (q, r) = m.div_rem(&bp);
        if !r.is_zero() {
            return e;
        }
        m = q;
        e += 1;
    }
}

/// Kronecker symbol (a | n) for n > 0.
pub fn kronecker(a: &BigInt, n: u64) -> i32 {
    if n == 0 {
        return if a.abs().is_one() { 1 } else { 0 };
    }
    let mut n = n;
    let mut result = 1i32;
    let a_mod8 = a.mod_floor(&BigInt::from(8)).to_u64().unwrap();
    while n % 2 == 0 {
        n /= 2;
        if a_mod8 % 2 == 0 {
            return 0;
        }
        if a_mod8 == 3 || a_mod8 == 5 {
            result = -result;
        }
    }
    if n == 1 {
        return result;
    }
    let mut a = a.mod_floor(&BigInt::from(n)).to_u64().unwrap();
    // Jacobi symbol (a | n) for odd n.
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if n % 8 == 3 || n % 8 == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Square root of `a` modulo an odd prime `p` (Tonelli-Shanks).
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if p == 2 || a == 0 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

pub fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// The integer `k`-th root of `n` when `n` is an exact `k`-th power.
pub fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if k == 0 {
        return None;
    }
    if n.is_negative() {
        if k % 2 == 0 {
            return None;
        }
        return exact_root(&-n, k).map(|r| -r);
    }
    let r = n.nth_root(k);
    (r.pow(k) == *n).then_some(r)
}

/// Prime divisors of `m`, ascending.
pub fn prime_divisors(m: u64) -> Vec<u64> {
    factor_u64(m, u64::MAX).map(|f| f.into_iter().map(|(p, _)| p).collect()).unwrap_or_default()
}
