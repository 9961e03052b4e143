//! Parametric polynomial families with known type trees.

use num_bigint::BigInt;
use num_traits::One;

use crate::poly::IntPoly;

/// `x^4 + 2N x^2 + N^3 (N-1) x + N^2`.
pub fn quartic(n: &BigInt) -> IntPoly {
    let one = BigInt::one();
    IntPoly::new(vec![
        n * n,
        n * n * n * (n - &one),
        BigInt::from(2) * n,
        BigInt::from(0),
        one,
    ])
}

/// `(x^2 + p)(x^2 + 2p)⋯(x^2 + rp) + p^m`.
pub fn product_of_quadratics(p: &BigInt, r: u32, m: u32) -> IntPoly {
    let mut f = IntPoly::one();
    for k in 1..=r {
        let q = IntPoly::new(vec![p * BigInt::from(k), BigInt::from(0), BigInt::one()]);
        f = f.mul(&q);
    }
    f.add(&IntPoly::constant(num_traits::pow(p.clone(), m as usize)))
}

/// `φ = x^4 + N^2 (N-1)`.
pub fn phi_quartic(n: &BigInt) -> IntPoly {
    IntPoly::new(vec![n * n * (n - BigInt::one()), 0.into(), 0.into(), 0.into(), BigInt::one()])
}

/// `Σ_j a_{r-j} N^{E_j} x^{2[j odd]} φ^{3(r-j)}` where `∏_{k=1}^r (x - k) = Σ a_k x^k`,
/// `E_j = 7j` for even `j` and `7j - 1` for odd `j`; `r` odd.
pub fn phi_power_family(r: u32, n: &BigInt) -> IntPoly {
    assert!(r % 2 == 1, "r must be odd");
    let mut roots = IntPoly::one();
    for k in 1..=r {
        roots = roots.mul(&IntPoly::from_i64(&[-(k as i64), 1]));
    }
    let phi = phi_quartic(n);
    let x2 = IntPoly::monomial(BigInt::one(), 2);
    let mut f = IntPoly::zero();
    for j in 0..=r {
        let a = roots.coeff((r - j) as usize);
        let e = if j % 2 == 0 { 7 * j } else { 7 * j - 1 };
        let mut term = phi.pow(3 * (r - j)).scale(&(a * num_traits::pow(n.clone(), e as usize)));
        if j % 2 == 1 {
            term = term.mul(&x2);
        }
        f = f.add(&term);
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_have_expected_shape() {
        assert_eq!(quartic(&BigInt::from(35)), IntPoly::from_i64(&[1225, 1457750, 70, 0, 1]));
        let f = product_of_quadratics(&BigInt::from(11), 3, 5);
        assert_eq!(f, IntPoly::from_i64(&[6 * 1331 + 161051, 0, 11 * 11 * 11, 0, 66, 0, 1]));
        let g = phi_power_family(3, &BigInt::from(1517));
        assert_eq!(g.deg(), 36);
        assert!(g.is_monic());
    }
}
