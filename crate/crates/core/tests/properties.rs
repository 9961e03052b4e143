mod common;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use proptest::prelude::*;

use common::{b, factor, is_probable_prime};
use sfom::artinalg::AlgebraTower;
use sfom::intarith::{coprime_splitting, int_sfd, resultant};
use sfom::lattice::IntegerLattice;
use sfom::poly::IntPoly;
use sfom::sftypes::expand;

const N: usize = 3;

fn full_rank_rows() -> impl Strategy<Value = Vec<Vec<BigInt>>> {
    let diag = prop::collection::vec(1i64..12, N);
    let extra = prop::collection::vec(prop::collection::vec(-20i64..20, N), 0..4);
    (diag, extra).prop_map(|(d, extra)| {
        let mut rows: Vec<Vec<BigInt>> =
            (0..N).map(|i| (0..N).map(|j| if i == j { b(d[i]) } else { BigInt::zero() }).collect()).collect();
        rows.extend(extra.into_iter().map(|r| r.into_iter().map(b).collect()));
        rows
    })
}

fn int_poly(max_deg: usize, height: i64) -> impl Strategy<Value = IntPoly> {
    prop::collection::vec(-height..=height, 1..=max_deg + 1).prop_map(|c| IntPoly::from_i64(&c))
}

fn monic(deg: std::ops::RangeInclusive<usize>, height: i64) -> impl Strategy<Value = IntPoly> {
    deg.prop_flat_map(move |d| prop::collection::vec(-height..=height, d)).prop_map(|mut c| {
        c.push(1);
        IntPoly::from_i64(&c)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hnf_is_independent_of_row_order(rows in full_rank_rows(), den in 1i64..30, seed in any::<u64>()) {
        let a = IntegerLattice::from_rows(N, &b(den), &rows);
        let mut shuffled = rows.clone();
        let k = shuffled.len();
        for i in 0..k {
            shuffled.swap(i, (seed as usize).wrapping_add(i * 7) % k);
        }
        prop_assert_eq!(&a, &IntegerLattice::from_rows(N, &b(den), &shuffled));
        // a redundant combination changes nothing
        let combo: Vec<BigInt> = (0..N).map(|j| &rows[0][j] * 3 - &rows[k - 1][j]).collect();
        shuffled.push(combo);
        prop_assert_eq!(&a, &IntegerLattice::from_rows(N, &b(den), &shuffled));
    }

    #[test]
    fn hnf_shape(rows in full_rank_rows(), den in 1i64..30) {
        let l = IntegerLattice::from_rows(N, &b(den), &rows);
        let h = l.hnf();
        let g = h.iter().flatten().fold(l.den().clone(), |acc, x| acc.gcd(x));
        prop_assert!(g.is_one());
        for k in 0..N {
            prop_assert!(h[k][k] > BigInt::zero());
            for (i, row) in h.iter().enumerate() {
                if i > k {
                    prop_assert!(row[k].is_zero());
                } else if i < k {
                    prop_assert!(row[k] >= BigInt::zero() && row[k] < h[k][k]);
                }
            }
        }
        for r in &rows {
            prop_assert!(l.contains(&IntPoly::new(r.clone()), &b(den)));
        }
    }

    #[test]
    fn merge_is_the_lattice_sum(x in full_rank_rows(), y in full_rank_rows(), dx in 1i64..20, dy in 1i64..20) {
        let a = IntegerLattice::from_rows(N, &b(dx), &x);
        let c = IntegerLattice::from_rows(N, &b(dy), &y);
        let ac = IntegerLattice::merge(N, &[a.clone(), c.clone()], false);
        prop_assert_eq!(&ac, &IntegerLattice::merge(N, &[c.clone(), a.clone()], false));
        prop_assert!(ac.contains_lattice(&a) && ac.contains_lattice(&c));
        prop_assert_eq!(&ac, &IntegerLattice::merge(N, &[ac.clone(), a.clone()], false));
        let with_z = IntegerLattice::merge(N, std::slice::from_ref(&a), true);
        prop_assert!(with_z.contains_lattice(&IntegerLattice::power_basis(N)));
    }

    #[test]
    fn expansion_reconstructs(f in monic(2..=9, 50), g in monic(1..=3, 10)) {
        let exp = expand(&f, &g, None);
        let mut acc = IntPoly::zero();
        for a in exp.coeffs.iter().rev() {
            prop_assert!(a.is_zero() || a.deg() < g.deg());
            acc = acc.mul(&g).add(a);
        }
        prop_assert_eq!(&acc, &f);
        for (s, q) in exp.quotients.iter().enumerate() {
            let tail = expand(q, &g, None);
            prop_assert_eq!(&tail.coeffs[..], &exp.coeffs[s..]);
        }
    }

    #[test]
    fn resultant_is_multiplicative(f in monic(1..=4, 9), g in int_poly(3, 9), h in int_poly(3, 9)) {
        prop_assume!(!g.is_zero() && !h.is_zero());
        prop_assert_eq!(resultant(&f, &g.mul(&h)), resultant(&f, &g) * resultant(&f, &h));
    }

    #[test]
    fn integer_squarefree_decomposition(parts in prop::collection::vec((2i64..60, 1u32..4), 1..4)) {
        let n = parts.iter().fold(BigInt::one(), |acc, (p, k)| acc * num_traits::pow(b(*p), *k as usize));
        prop_assume!(n > BigInt::one());
        let sfd = int_sfd(&n);
        let back = sfd.iter().fold(BigInt::one(), |acc, (d, l)| acc * num_traits::pow(d.clone(), *l as usize));
        prop_assert_eq!(&back, &n);
        for (i, (d, l)) in sfd.iter().enumerate() {
            // every small prime factor is below the trial bound, so the pieces are squarefree
            prop_assert!(factor(d).iter().all(|(_, k)| *k == 1));
            for (e, m) in &sfd[i + 1..] {
                prop_assert!(l < m && d.gcd(e).is_one());
            }
        }
    }

    #[test]
    fn coprime_splitting_partitions_primes(a in 2i64..400, c in 2i64..400) {
        let n = b(a) * b(c);
        let parts = coprime_splitting(&b(a), &n);
        let primes_n: Vec<BigInt> = factor(&n).into_iter().map(|(p, _)| p).collect();
        let mut seen = Vec::new();
        for (i, x) in parts.iter().enumerate() {
            prop_assert!((&n % x).is_zero());
            for y in &parts[i + 1..] {
                prop_assert!(x.gcd(y).is_one());
            }
            seen.extend(factor(x).into_iter().map(|(p, _)| p));
        }
        seen.sort();
        prop_assert_eq!(seen, primes_n);
    }

    #[test]
    fn tower_is_a_commutative_ring(t in prop::collection::vec(0i64..1000, 1..4), xs in prop::collection::vec(prop::collection::vec(-500i64..500, 3), 3)) {
        let n = b(35 * 143);
        let base = AlgebraTower::new(n);
        let mut tc = t.clone();
        tc.push(1);
        let tower = base.extend_unchecked(&base.poly_from_i64(0, &tc));
        let d = tower.dim(1);
        let el = |v: &Vec<i64>| tower.from_coords(1, (0..d).map(|i| b(v.get(i).copied().unwrap_or(0))).collect());
        let (x, y, z) = (el(&xs[0]), el(&xs[1]), el(&xs[2]));
        prop_assert_eq!(tower.mul(&x, &y), tower.mul(&y, &x));
        prop_assert_eq!(tower.mul(&tower.mul(&x, &y), &z), tower.mul(&x, &tower.mul(&y, &z)));
        prop_assert_eq!(tower.mul(&x, &tower.add(&y, &z)), tower.add(&tower.mul(&x, &y), &tower.mul(&x, &z)));
        prop_assert_eq!(tower.mul(&x, &tower.one(1)), x.clone());
        prop_assert!(tower.add(&x, &tower.neg(&x)).is_zero());
        if let Ok(inv) = tower.invert(&x) {
            prop_assert!(tower.mul(&x, &inv).is_one());
        }
    }

    #[test]
    fn probable_prime_helper(k in 2u64..5000) {
        let naive = (2..k).take_while(|d| d * d <= k).all(|d| k % d != 0);
        prop_assert_eq!(is_probable_prime(&BigInt::from(k)), naive);
    }
}

#[test]
fn factor_helper_on_a_large_composite() {
    let n = b(2) * b(50080031) * b(998244353) * b(1000000007);
    let got: Vec<BigInt> = factor(&n).into_iter().map(|(p, k)| {
        assert_eq!(k, 1);
        p
    }).collect();
    assert_eq!(got, vec![b(2), b(50080031), b(998244353), b(1000000007)]);
}
