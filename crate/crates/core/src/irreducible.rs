//! Cheap irreducibility screening over `Z`: repeated factors, integer roots found
//! modulo a large prime, and factor-degree patterns modulo small primes.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::artinalg::AlgebraTower;
use crate::ffactor::{distinct_degree, equal_degree, ppowmod};
use crate::intarith::{discriminant, small_primes};
use crate::poly::IntPoly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Irreducibility {
    /// Proved by incompatible factor-degree patterns.
    Irreducible,
    /// A nontrivial factorization was found.
    Reducible(String),
    /// Neither outcome could be established.
    Unknown,
}

const PATTERN_PRIMES: usize = 24;

/// Integer roots of `f`, found as lifts of roots modulo `2^61 - 1`.
pub fn integer_roots(f: &IntPoly, seed: u64) -> Vec<BigInt> {
    let p: BigInt = (BigInt::one() << 61u32) - 1;
    let tower = AlgebraTower::new(p.clone());
    let fp = tower.poly_from_int(f);
    if fp.deg() < 1 {
        return Vec::new();
    }
    let fp = tower.pmonic(&fp).expect("prime field");
    let y = tower.poly_from_i64(0, &[0, 1]);
    let h = tower.psub(&ppowmod(&tower, &y, &p, &fp), &y);
    let lin = if h.is_zero() { fp.clone() } else { tower.pgcd(&fp, &h).expect("prime field") };
    if lin.deg() < 1 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = &p >> 1;
    let mut roots: Vec<BigInt> = equal_degree(&tower, &lin, 1, &mut rng)
        .into_iter()
        .map(|g| {
            let r = (-tower.poly_to_int(&g).coeff(0)).mod_floor(&p);
            if r > half {
                r - &p
            } else {
                r
            }
        })
        .filter(|r| f.eval(r).is_zero())
        .collect();
    roots.sort();
    roots
}

fn possible_degrees(tower: &AlgebraTower, f: &IntPoly) -> BTreeSet<usize> {
    let fp = tower.poly_from_int(f);
    let mut sums = BTreeSet::from([0usize]);
    for (block, d) in distinct_degree(tower, &fp) {
        for _ in 0..block.deg() / d {
            let next: Vec<usize> = sums.iter().map(|s| s + d).collect();
            sums.extend(next);
        }
    }
    sums
}

/// Screens a monic `f` of positive degree.
pub fn check(f: &IntPoly, seed: u64) -> Irreducibility {
    let n = f.deg();
    assert!(n >= 1 && f.is_monic());
    if n == 1 {
        return Irreducibility::Irreducible;
    }
    let disc = discriminant(f);
    if disc.is_zero() {
        return Irreducibility::Reducible("repeated factor".into());
    }
    if let Some(r) = integer_roots(f, seed).first() {
        return Irreducibility::Reducible(format!("integer root {r}"));
    }
    let mut candidates: BTreeSet<usize> = (1..n).collect();
    let mut used = 0;
    for p in small_primes(1 << 12) {
        if used == PATTERN_PRIMES || candidates.is_empty() {
            break;
        }
        let p = BigInt::from(p);
        if (&disc % &p).is_zero() {
            continue;
        }
        used += 1;
        let degs = possible_degrees(&AlgebraTower::new(p), f);
        candidates.retain(|d| degs.contains(d));
    }
    if candidates.is_empty() {
        Irreducibility::Irreducible
    } else {
        Irreducibility::Unknown
    }
}
