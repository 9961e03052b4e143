//! Factorization of polynomials over a level of a tower whose base modulus is a prime
//! and whose moduli are irreducible, so that every level is a finite field.

use num_bigint::BigInt;
use num_traits::One;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::artinalg::{AlgElem, AlgebraTower, PolyA};

const FIELD: &str = "finite-field tower arithmetic cannot meet a zero divisor";

/// `q = p^{dim}`, the size of the field at level `i`.
pub fn field_size(tower: &AlgebraTower, i: usize) -> BigInt {
    num_traits::pow(tower.n().clone(), tower.dim(i))
}

/// `a^e mod m` for monic `m`.
pub fn ppowmod(tower: &AlgebraTower, a: &PolyA, e: &BigInt, m: &PolyA) -> PolyA {
    let mut acc = tower.pone(a.level());
    let base = tower.prem_monic(a, m);
    for k in (0..e.bits()).rev() {
        acc = tower.prem_monic(&tower.pmul(&acc, &acc), m);
        if e.bit(k) {
            acc = tower.prem_monic(&tower.pmul(&acc, &base), m);
        }
    }
    acc
}

fn pth_root_poly(tower: &AlgebraTower, f: &PolyA) -> PolyA {
    let i = f.level();
    let p = tower.n().clone();
    let exp = field_size(tower, i) / &p;
    let coeffs = f
        .coeffs()
        .iter()
        .step_by(usize::try_from(&p).expect("characteristic divides a degree, so it is small"))
        .map(|c| tower.pow(c, &exp))
        .collect();
    tower.poly(i, coeffs)
}

fn gcd(tower: &AlgebraTower, a: &PolyA, b: &PolyA) -> PolyA {
    if b.is_zero() {
        return tower.pmonic(a).expect(FIELD);
    }
    tower.pgcd(a, b).expect(FIELD)
}

fn div(tower: &AlgebraTower, a: &PolyA, b: &PolyA) -> PolyA {
    tower.exact_divide(a, b).expect("divisor divides")
}

/// Squarefree factorization of a monic polynomial in any characteristic.
pub fn squarefree(tower: &AlgebraTower, f: &PolyA) -> Vec<(PolyA, usize)> {
    let mut out = Vec::new();
    let df = tower.pderiv(f);
    let mut c = gcd(tower, f, &df);
    let mut w = div(tower, f, &c);
    let mut i = 1;
    while !w.is_one() {
        let y = gcd(tower, &w, &c);
        let fac = div(tower, &w, &y);
        if !fac.is_one() {
            out.push((fac, i));
        }
        w = y.clone();
        c = div(tower, &c, &y);
        i += 1;
    }
    if !c.is_one() {
        let p: usize = usize::try_from(tower.n()).unwrap();
        let root = pth_root_poly(tower, &c);
        for (g, j) in squarefree(tower, &root) {
            out.push((g, j * p));
        }
    }
    out
}

/// Distinct-degree factorization of a monic squarefree polynomial.
pub fn distinct_degree(tower: &AlgebraTower, f: &PolyA) -> Vec<(PolyA, usize)> {
    let i = f.level();
    let q = field_size(tower, i);
    let y = tower.poly_from_i64(i, &[0, 1]);
    let mut g = f.clone();
    let mut h = tower.prem_monic(&y, &g);
    let mut out = Vec::new();
    let mut d = 1;
    while g.deg() >= 2 * d {
        h = ppowmod(tower, &h, &q, &g);
        let diff = tower.psub(&h, &y);
        let u = gcd(tower, &g, &diff);
        if !u.is_one() {
            g = div(tower, &g, &u);
            h = tower.prem_monic(&h, &g);
            out.push((u, d));
        }
        d += 1;
    }
    if g.deg() >= 1 {
        let dg = g.deg();
        out.push((g, dg));
    }
    out
}

fn random_poly(tower: &AlgebraTower, i: usize, deg: usize, rng: &mut ChaCha8Rng) -> PolyA {
    let p = u64::try_from(tower.n()).expect("random splitting needs a word-sized prime");
    let coeffs = (0..deg)
        .map(|_| {
            let coords = (0..tower.dim(i)).map(|_| BigInt::from(rng.gen_range(0..p))).collect();
            tower.from_coords(i, coords)
        })
        .collect();
    tower.poly(i, coeffs)
}

/// Equal-degree splitting of a monic product of distinct irreducibles of degree `d`.
pub fn equal_degree(tower: &AlgebraTower, f: &PolyA, d: usize, rng: &mut ChaCha8Rng) -> Vec<PolyA> {
    if f.deg() == d {
        return vec![f.clone()];
    }
    let i = f.level();
    let q = field_size(tower, i);
    let two = BigInt::from(2);
    loop {
        let a = random_poly(tower, i, f.deg(), rng);
        if a.deg() < 1 {
            continue;
        }
        let b = if tower.n() == &two {
            // trace map F_{q^d} -> F_2
            let k = tower.dim(i) * d;
            let mut t = tower.prem_monic(&a, f);
            let mut acc = t.clone();
            for _ in 1..k {
                t = tower.prem_monic(&tower.pmul(&t, &t), f);
                acc = tower.padd(&acc, &t);
            }
            acc
        } else {
            let e = (num_traits::pow(q.clone(), d) - BigInt::one()) / &two;
            let r = ppowmod(tower, &a, &e, f);
            tower.psub(&r, &tower.pone(i))
        };
        let u = gcd(tower, f, &b);
        if u.deg() >= 1 && u.deg() < f.deg() {
            let v = div(tower, f, &u);
            let mut out = equal_degree(tower, &u, d, rng);
            out.extend(equal_degree(tower, &v, d, rng));
            return out;
        }
    }
}

fn sort_key(p: &PolyA) -> (usize, Vec<BigInt>) {
    (p.deg(), p.coeffs().iter().flat_map(|c: &AlgElem| c.coords().iter().cloned()).collect())
}

/// Complete factorization into monic irreducibles with multiplicities, sorted by
/// multiplicity, then degree, then coefficients.
pub fn factor(tower: &AlgebraTower, f: &PolyA, rng: &mut ChaCha8Rng) -> Vec<(PolyA, usize)> {
    assert!(!f.is_zero(), "factoring zero");
    let f = tower.pmonic(f).expect(FIELD);
    let mut out = Vec::new();
    for (part, mult) in squarefree(tower, &f) {
        for (block, d) in distinct_degree(tower, &part) {
            for irr in equal_degree(tower, &block, d, rng) {
                out.push((irr, mult));
            }
        }
    }
    out.sort_by(|a, b| (a.1, sort_key(&a.0)).cmp(&(b.1, sort_key(&b.0))));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    #[test]
    fn factor_examples() {
        let f5 = AlgebraTower::new(BigInt::from(5));
        let got = factor(&f5, &f5.poly_from_i64(0, &[1, 0, 1]), &mut rng());
        assert_eq!(got, vec![(f5.poly_from_i64(0, &[2, 1]), 1), (f5.poly_from_i64(0, &[3, 1]), 1)]);
        let f3 = AlgebraTower::new(BigInt::from(3));
        let got = factor(&f3, &f3.poly_from_i64(0, &[1, 0, 1]), &mut rng());
        assert_eq!(got, vec![(f3.poly_from_i64(0, &[1, 0, 1]), 1)]);
        let f2 = AlgebraTower::new(BigInt::from(2));
        let got = factor(&f2, &f2.poly_from_i64(0, &[0, 0, 0, 0, 1]), &mut rng());
        assert_eq!(got, vec![(f2.poly_from_i64(0, &[0, 1]), 4)]);
    }

    #[test]
    fn factors_over_extension_fields() {
        // F_9 = F_3[z]/(z^2+1); y^2+1 splits as (y-z)(y+z)
        let f3 = AlgebraTower::new(BigInt::from(3));
        let f9 = f3.extend(&f3.poly_from_i64(0, &[1, 0, 1])).unwrap();
        let f = f9.poly_from_i64(1, &[1, 0, 1]);
        let got = factor(&f9, &f, &mut rng());
        assert_eq!(got.len(), 2);
        assert!(got.iter().all(|(g, m)| g.deg() == 1 && *m == 1));
        // characteristic 2: y^3+y+1 is irreducible over F_2 and splits over F_8
        let f2 = AlgebraTower::new(BigInt::from(2));
        let t = f2.poly_from_i64(0, &[1, 1, 0, 1]);
        assert_eq!(factor(&f2, &t, &mut rng()).len(), 1);
        let f8 = f2.extend(&t).unwrap();
        let got = factor(&f8, &f8.poly_from_i64(1, &[1, 1, 0, 1]), &mut rng());
        assert_eq!(got.len(), 3);
    }

    #[test]
    fn inseparable_powers() {
        // (y^3 + 2)^3 (y + 1)^2 over F_3
        let f3 = AlgebraTower::new(BigInt::from(3));
        let a = f3.poly_from_i64(0, &[2, 0, 0, 1]);
        let b = f3.poly_from_i64(0, &[1, 1]);
        let f = f3.pmul(&f3.ppow(&a, 3), &f3.ppow(&b, 2));
        let got = factor(&f3, &f, &mut rng());
        // y^3 + 2 = (y + 2)^3 in characteristic 3
        assert_eq!(got, vec![(b, 2), (f3.poly_from_i64(0, &[2, 1]), 9)]);
    }
}
