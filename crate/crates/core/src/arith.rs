//! Integer utilities: primality, factorization, divisors, valuations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
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

/// Primes `<= bound` by the sieve of Eratosthenes.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn pollard_rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn factor_u64_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    factor_u64_into(d, out);
    factor_u64_into(n / d, out);
}

/// Prime factorization of `n > 0` as sorted `(prime, exponent)` pairs.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0);
    let mut primes = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n % p == 0 {
            primes.push(p);
            n /= p;
        }
    }
    factor_u64_into(n, &mut primes);
    collect_powers(primes)
}

fn collect_powers(mut primes: Vec<u64>) -> Vec<(u64, u32)> {
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Factorization of `|n|`, `n != 0`. Values beyond 64 bits fall back to
/// trial division for the part that does not fit.
pub fn factor_bigint(n: &BigInt) -> Vec<(BigInt, u32)> {
    assert!(!n.is_zero());
    let mut m = n.abs();
    if let Some(small) = m.to_u64() {
        return factor_u64(small).into_iter().map(|(p, e)| (BigInt::from(p), e)).collect();
    }
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    let mut d = BigInt::from(2u32);
    while &d * &d <= m {
        if let Some(small) = m.to_u64() {
            for (p, e) in factor_u64(small) {
                out.push((BigInt::from(p), e));
            }
            return out;
        }
        let mut e = 0;
        while m.is_multiple_of(&d) {
            m /= &d;
            e += 1;
        }
        if e > 0 {
            out.push((d.clone(), e));
        }
        d += 1;
    }
    if !m.is_one() {
        out.push((m, 1));
    }
    out
}

/// All positive divisors of `|n|`, `n != 0`, in increasing order.
pub fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut divs = vec![BigInt::one()];
    for (p, e) in factor_bigint(n) {
        let mut next = Vec::with_capacity(divs.len() * (e as usize + 1));
        for d in &divs {
            let mut pk = BigInt::one();
            for _ in 0..=e {
                next.push(d * &pk);
                pk *= &p;
            }
        }
        divs = next;
    }
    divs.sort();
    divs
}

/// `p`-adic valuation; `None` for zero.
pub fn valuation(n: &BigInt, p: u64) -> Option<u32> {
    if n.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    while m.is_multiple_of(&p) {
        m /= &p;
        v += 1;
    }
    Some(v)
}

/// Floor of the square root of a nonnegative integer.
pub fn isqrt_u128(n: u128) -> u128 {
    num_integer::Roots::sqrt(&n)
}

/// Largest `k >= 0` with `k^3 < bound` (strict), `bound >= 1`.
pub fn icbrt_strict(bound: u128) -> u128 {
    let mut k = num_integer::Roots::cbrt(&bound);
    while k > 0 && k * k * k >= bound {
        k -= 1;
    }
    while (k + 1) * (k + 1) * (k + 1) < bound {
        k += 1;
    }
    k
}
