//! Integer utilities: N-adic order, factor refinement, integer squarefree
//! decomposition, resultants and discriminants.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::poly::IntPoly;

/// Exact rational numbers, used for slopes and normalized valuations.
pub type Rational = num_rational::BigRational;

/// Returns `(k, b)` with `a = n^k b` and `n` not dividing `b`.
pub fn ord_n(a: &BigInt, n: &BigInt) -> (i64, BigInt) {
    assert!(!a.is_zero(), "ord_n of zero");
    assert!(*n > BigInt::one(), "ord_n needs n > 1");
    let mut k = 0;
    let mut b = a.clone();
    loop {
        let (q, r) = b.div_rem(n);
        if !r.is_zero() {
            return (k, b);
        }
        b = q;
        k += 1;
    }
}

/// `ord_p` of a nonzero integer; `i64::MAX` stands for the order of zero.
pub fn ord_p(a: &BigInt, p: &BigInt) -> i64 {
    if a.is_zero() {
        return i64::MAX;
    }
    ord_n(a, p).0
}

/// Splits `n` as `r^k` with `k` maximal.
pub fn perfect_power_root(n: &BigInt) -> (BigInt, u32) {
    assert!(n.is_positive());
    let mut base = n.clone();
    let mut exp = 1u32;
    'outer: loop {
        if base <= BigInt::one() {
            return (base, exp);
        }
        let bits = base.bits() as u32;
        for k in 2..=bits {
            if !is_small_prime(k) {
                continue;
            }
            let r = base.nth_root(k);
            if num_traits::pow(r.clone(), k as usize) == base {
                base = r;
                exp *= k;
                continue 'outer;
            }
        }
        return (base, exp);
    }
}

fn is_small_prime(k: u32) -> bool {
    k >= 2 && (2..k).take_while(|d| d * d <= k).all(|d| k % d != 0)
}

/// Refines a list of positive integers into a pairwise coprime list of integers > 1
/// such that every input is a product of powers of the outputs.
pub fn gcd_free_basis(inputs: &[BigInt]) -> Vec<BigInt> {
    let mut basis: Vec<BigInt> = inputs.iter().filter(|a| **a > BigInt::one()).cloned().collect();
    loop {
        let mut changed = false;
        'scan: for i in 0..basis.len() {
            for j in (i + 1)..basis.len() {
                let g = basis[i].gcd(&basis[j]);
                if g.is_one() {
                    continue;
                }
                let a = &basis[i] / &g;
                let b = &basis[j] / &g;
                let mut next: Vec<BigInt> = Vec::with_capacity(basis.len() + 1);
                for (k, x) in basis.iter().enumerate() {
                    if k != i && k != j {
                        next.push(x.clone());
                    }
                }
                for x in [a, b, g] {
                    if x > BigInt::one() {
                        next.push(x);
                    }
                }
                basis = next;
                changed = true;
                break 'scan;
            }
        }
        if !changed {
            break;
        }
    }
    basis.sort();
    basis.dedup();
    basis
}

/// Given a proper divisor `d` of `n`, returns pairwise coprime integers, none a perfect
/// power, whose prime supports partition the primes of `n`.
pub fn coprime_splitting(d: &BigInt, n: &BigInt) -> Vec<BigInt> {
    assert!(d > &BigInt::one() && d < n && (n % d).is_zero(), "coprime_splitting needs 1 < d < n, d | n");
    let parts = gcd_free_basis(&[d.clone(), n / d]);
    let mut out: Vec<BigInt> = parts.iter().map(|c| perfect_power_root(c).0).collect();
    out.sort();
    out.dedup();
    out
}

const TRIAL_BOUND: u32 = 1 << 10;

/// Squarefree decomposition `n = ∏ d_i^{l_i}` with `l_1 < l_2 < ...`.
///
/// Only cheap structure is exposed: trial division by primes below 1024, factor
/// refinement and perfect-power extraction. A square factor built from large primes
/// and not visible through these is not detected.
pub fn int_sfd(n: &BigInt) -> Vec<(BigInt, u32)> {
    assert!(*n > BigInt::one());
    let mut pieces: Vec<(BigInt, u32)> = Vec::new();
    let mut rest = n.clone();
    for p in 2..TRIAL_BOUND {
        if !is_small_prime(p) {
            continue;
        }
        let bp = BigInt::from(p);
        if (&rest % &bp).is_zero() {
            let (k, b) = ord_n(&rest, &bp);
            pieces.push((bp, k as u32));
            rest = b;
        }
    }
    if rest > BigInt::one() {
        let (root, e) = perfect_power_root(&rest);
        pieces.push((root, e));
    }
    let mut by_exp: Vec<(BigInt, u32)> = Vec::new();
    for (b, e) in pieces {
        match by_exp.iter_mut().find(|(_, l)| *l == e) {
            Some(entry) => entry.0 *= b,
            None => by_exp.push((b, e)),
        }
    }
    by_exp.sort_by_key(|(_, l)| *l);
    by_exp
}

/// Primes `p <= bound` by trial division.
pub fn small_primes(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&k| (2..k).take_while(|d| d * d <= k).all(|d| k % d != 0)).collect()
}

/// Resultant of two integer polynomials by the subresultant pseudo-remainder sequence.
pub fn resultant(f: &IntPoly, g: &IntPoly) -> BigInt {
    if f.is_zero() || g.is_zero() {
        return BigInt::zero();
    }
    let (mut a, mut b) = (f.clone(), g.clone());
    let mut s = BigInt::one();
    if a.deg() < b.deg() {
        if (a.deg() * b.deg()) % 2 == 1 {
            s = -s;
        }
        std::mem::swap(&mut a, &mut b);
    }
    if b.deg() == 0 {
        return s * num_traits::pow(b.lc(), a.deg());
    }
    let ca = a.content();
    let cb = b.content();
    a = a.div_exact_scalar(&ca);
    b = b.div_exact_scalar(&cb);
    let t = num_traits::pow(ca, b.deg()) * num_traits::pow(cb, a.deg());
    let mut g_ = BigInt::one();
    let mut h = BigInt::one();
    loop {
        let da = a.deg();
        let db = b.deg();
        let delta = da - db;
        if da % 2 == 1 && db % 2 == 1 {
            s = -s;
        }
        let r = a.pseudo_rem(&b);
        if r.is_zero() {
            return BigInt::zero();
        }
        a = b;
        let divisor = &g_ * num_traits::pow(h.clone(), delta);
        b = r.div_exact_scalar(&divisor);
        g_ = a.lc();
        // h <- g^delta / h^(delta - 1)
        h = if delta == 0 {
            h
        } else {
            let num = num_traits::pow(g_.clone(), delta);
            let den = num_traits::pow(h.clone(), delta - 1);
            num / den
        };
        if b.deg() == 0 {
            let da = a.deg();
            let lb = b.lc();
            let hf = if da == 0 {
                h.clone()
            } else {
                num_traits::pow(lb, da) / num_traits::pow(h, da - 1)
            };
            return s * t * hf;
        }
    }
}

/// Discriminant `(-1)^{n(n-1)/2} Res(f, f') / lc(f)`.
pub fn discriminant(f: &IntPoly) -> BigInt {
    let n = f.deg();
    assert!(n >= 1, "discriminant of a constant");
    let r = resultant(f, &f.derivative());
    let sign = if (n * (n - 1) / 2) % 2 == 1 { -BigInt::one() } else { BigInt::one() };
    let (q, rem) = (sign * r).div_rem(&f.lc());
    debug_assert!(rem.is_zero());
    q
}

/// Floor of a rational.
pub fn floor_rat(q: &Rational) -> BigInt {
    q.floor().to_integer()
}

/// Converts to `i64`, panicking on overflow (valuations are always small).
pub fn small(a: &BigInt) -> i64 {
    a.to_i64().expect("valuation does not fit in i64")
}
