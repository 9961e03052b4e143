#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sfom::irreducible::{check, Irreducibility};
use sfom::poly::IntPoly;

pub fn b(x: i64) -> BigInt {
    BigInt::from(x)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn is_probable_prime(n: &BigInt) -> bool {
    if n < &b(2) {
        return false;
    }
    for p in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let p = BigInt::from(p);
        if n == &p {
            return true;
        }
        if (n % &p).is_zero() {
            return false;
        }
    }
    let one = BigInt::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap();
    let d = &nm1 >> s;
    'witness: for a in [2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41] {
        let mut x = BigInt::from(a).modpow(&d, n);
        if x == one || x == nm1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&b(2), n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn rho(n: &BigInt, seed: u64) -> Option<BigInt> {
    let mut r = rng(seed);
    let c = BigInt::from(r.gen_range(1u64..u64::MAX)) % n;
    let f = |x: &BigInt| (x * x + &c) % n;
    let mut y = BigInt::from(r.gen::<u64>()) % n;
    let (mut g, mut q, mut m) = (BigInt::one(), BigInt::one(), 1u64);
    let mut x = y.clone();
    let mut ys = y.clone();
    while g.is_one() {
        x = y.clone();
        for _ in 0..m {
            y = f(&y);
        }
        let mut k = 0;
        while k < m && g.is_one() {
            ys = y.clone();
            for _ in 0..(128.min(m - k)) {
                y = f(&y);
                q = (q * (&x - &y).abs()) % n;
            }
            g = q.gcd(n);
            k += 128;
        }
        m *= 2;
        if m > 1 << 26 {
            return None;
        }
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = (&x - &ys).abs().gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    (&g != n).then_some(g)
}

fn split(n: BigInt, out: &mut Vec<BigInt>) {
    if n.is_one() {
        return;
    }
    if is_probable_prime(&n) {
        out.push(n);
        return;
    }
    let s = n.sqrt();
    if &s * &s == n {
        split(s.clone(), out);
        split(s, out);
        return;
    }
    let mut seed = 1;
    let d = loop {
        if let Some(d) = rho(&n, seed) {
            break d;
        }
        seed += 1;
    };
    split(&n / &d, out);
    split(d, out);
}

/// Prime factorization of `|n|`.
pub fn factor(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.abs();
    assert!(!n.is_zero());
    let mut primes = Vec::new();
    for p in 2u32..20000 {
        let bp = BigInt::from(p);
        while (&n % &bp).is_zero() {
            n /= &bp;
            primes.push(bp.clone());
        }
    }
    split(n, &mut primes);
    primes.sort();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, k)) if *q == p => *k += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

pub fn random_monic(r: &mut ChaCha8Rng, degree: usize, height: i64) -> IntPoly {
    let mut c: Vec<BigInt> = (0..degree).map(|_| b(r.gen_range(-height..=height))).collect();
    c.push(BigInt::one());
    IntPoly::new(c)
}

/// Monic polynomials with degree in `2..=max_degree` and coefficients in `[-height, height]`,
/// kept only when irreducibility is certified.
pub fn random_irreducible(seed: u64, count: usize, max_degree: usize, height: i64) -> Vec<IntPoly> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    while out.len() < count {
        let deg = r.gen_range(2..=max_degree);
        let f = random_monic(&mut r, deg, height);
        if check(&f, 0) == Irreducibility::Irreducible {
            out.push(f);
        }
    }
    out
}

pub fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t = std::time::Instant::now();
    let v = f();
    (v, t.elapsed().as_secs_f64())
}
