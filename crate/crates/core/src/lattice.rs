//! Full-rank lattices `(1/den)·M` in power-basis coordinates, kept in Hermite normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::intarith::Rational;
use crate::poly::IntPoly;

/// Upper-triangular row echelon form built by unimodular row operations.
struct Echelon {
    n: usize,
    rows: Vec<Option<Vec<BigInt>>>,
    /// Some `m` with `m·Z^n` inside the lattice spanned so far.
    modulus: Option<BigInt>,
}

impl Echelon {
    fn new(n: usize) -> Self {
        Echelon { n, rows: vec![None; n], modulus: None }
    }

    fn add_modulus(&mut self, m: BigInt) {
        let m = m.abs();
        self.modulus = Some(match self.modulus.take() {
            Some(old) => old.gcd(&m),
            None => m,
        });
        let m = self.modulus.clone().unwrap();
        for (k, row) in self.rows.iter_mut().enumerate() {
            if let Some(row) = row {
                for x in row.iter_mut().skip(k + 1) {
                    *x = x.mod_floor(&m);
                }
            }
        }
    }

    fn refresh_modulus(&mut self) {
        if self.rows.iter().all(|r| r.is_some()) {
            let det = self.rows.iter().enumerate().fold(BigInt::one(), |acc, (k, r)| acc * &r.as_ref().unwrap()[k]);
            self.add_modulus(det);
        }
    }

    fn insert(&mut self, mut v: Vec<BigInt>) {
        assert_eq!(v.len(), self.n);
        for k in 0..self.n {
            if let Some(m) = &self.modulus {
                for x in v.iter_mut().skip(k) {
                    *x = x.mod_floor(m);
                }
            }
            if v[k].is_zero() {
                continue;
            }
            match self.rows[k].take() {
                None => {
                    if v[k].is_negative() {
                        v.iter_mut().for_each(|x| *x = -&*x);
                    }
                    self.rows[k] = Some(v);
                    self.refresh_modulus();
                    return;
                }
                Some(b) => {
                    let ext = b[k].extended_gcd(&v[k]);
                    let (x, y) = (ext.x, ext.y);
                    let a = &b[k] / &ext.gcd;
                    let c = &v[k] / &ext.gcd;
                    let changed = ext.gcd != b[k];
                    let mut nb: Vec<BigInt> = b.iter().zip(&v).map(|(bi, vi)| &x * bi + &y * vi).collect();
                    if nb[k].is_negative() {
                        nb.iter_mut().for_each(|t| *t = -&*t);
                    }
                    v = b.iter().zip(&v).map(|(bi, vi)| &a * vi - &c * bi).collect();
                    self.rows[k] = Some(nb);
                    if changed {
                        self.refresh_modulus();
                    }
                }
            }
        }
    }

    /// Reduced HNF; panics unless full rank.
    fn finish(self) -> Vec<Vec<BigInt>> {
        let mut rows: Vec<Vec<BigInt>> =
            self.rows.into_iter().map(|r| r.expect("lattice is not of full rank")).collect();
        for k in 0..self.n {
            let (upper, lower) = rows.split_at_mut(k);
            let pivot_row = &lower[0];
            let p = &pivot_row[k];
            for row in upper.iter_mut() {
                let q = row[k].div_floor(p);
                if !q.is_zero() {
                    for (x, y) in row.iter_mut().zip(pivot_row).skip(k) {
                        *x -= &q * y;
                    }
                }
            }
        }
        rows
    }
}

/// `(1/den)·(row span of hnf)`, with `hnf` upper triangular, positive diagonal,
/// entries above each pivot reduced into `[0, pivot)`, and `den` minimal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegerLattice {
    den: BigInt,
    hnf: Vec<Vec<BigInt>>,
}

impl IntegerLattice {
    /// The lattice spanned by `rows / den`.
    pub fn from_rows(n: usize, den: &BigInt, rows: &[Vec<BigInt>]) -> Self {
        Self::build(n, den.clone(), rows.iter().cloned(), false)
    }

    /// The lattice spanned by elements `num(θ) / den`.
    pub fn from_elements(n: usize, elements: &[(IntPoly, BigInt)]) -> Self {
        let den = elements.iter().fold(BigInt::one(), |acc, (_, d)| acc.lcm(d));
        let rows: Vec<Vec<BigInt>> = elements
            .iter()
            .map(|(p, d)| {
                let s = &den / d;
                (0..n).map(|i| p.coeff(i) * &s).collect()
            })
            .collect();
        Self::build(n, den, rows.into_iter(), false)
    }

    pub fn power_basis(n: usize) -> Self {
        let hnf = (0..n).map(|i| (0..n).map(|j| BigInt::from((i == j) as u8)).collect()).collect();
        IntegerLattice { den: BigInt::one(), hnf }
    }

    fn build(n: usize, den: BigInt, rows: impl Iterator<Item = Vec<BigInt>>, with_power_basis: bool) -> Self {
        assert!(den.is_positive());
        let mut ech = Echelon::new(n);
        if with_power_basis {
            for i in 0..n {
                let mut r = vec![BigInt::zero(); n];
                r[i] = den.clone();
                ech.insert(r);
            }
        }
        for r in rows {
            ech.insert(r);
        }
        let mut hnf = ech.finish();
        let g = hnf.iter().flatten().fold(den.clone(), |acc, x| acc.gcd(x));
        let den = if g.is_one() {
            den
        } else {
            hnf.iter_mut().flatten().for_each(|x| *x = &*x / &g);
            den / g
        };
        IntegerLattice { den, hnf }
    }

    /// HNF of the sum of the given lattices, optionally together with `Z[θ]`.
    pub fn merge(n: usize, lattices: &[IntegerLattice], include_power_basis: bool) -> Self {
        let den = lattices.iter().fold(BigInt::one(), |acc, l| acc.lcm(&l.den));
        let rows = lattices.iter().flat_map(|l| {
            let s = &den / &l.den;
            l.hnf.iter().map(move |r| r.iter().map(|x| x * &s).collect::<Vec<_>>())
        });
        Self::build(n, den.clone(), rows, include_power_basis)
    }

    pub fn n(&self) -> usize {
        self.hnf.len()
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn hnf(&self) -> &[Vec<BigInt>] {
        &self.hnf
    }

    /// Basis element `k` as `(numerator, denominator)`.
    pub fn element(&self, k: usize) -> (IntPoly, BigInt) {
        (IntPoly::new(self.hnf[k].clone()), self.den.clone())
    }

    pub fn elements(&self) -> Vec<(IntPoly, BigInt)> {
        (0..self.n()).map(|k| self.element(k)).collect()
    }

    /// `det(hnf) / den^n`, the covolume relative to `Z[θ]`.
    pub fn covolume(&self) -> Rational {
        let det = (0..self.n()).fold(BigInt::one(), |acc, k| acc * &self.hnf[k][k]);
        Rational::new(det, num_traits::pow(self.den.clone(), self.n()))
    }

    /// `[L : Z[θ]]` as a rational (an integer when `Z[θ] ⊆ L`).
    pub fn index(&self) -> Rational {
        self.covolume().recip()
    }

    /// Integer coordinates of `num(θ)/den` in the HNF basis, if it lies in the lattice.
    pub fn coordinates(&self, num: &IntPoly, den: &BigInt) -> Option<Vec<BigInt>> {
        let n = self.n();
        if num.degree().is_some_and(|d| d >= n) {
            return None;
        }
        let scaled = num.scale(&self.den);
        let mut w: Vec<BigInt> = Vec::with_capacity(n);
        for i in 0..n {
            let (q, r) = scaled.coeff(i).div_rem(den);
            if !r.is_zero() {
                return None;
            }
            w.push(q);
        }
        self.solve(w)
    }

    /// Coordinates of the integer row vector `w` (scaled by `den`) in the HNF basis.
    pub fn solve(&self, mut w: Vec<BigInt>) -> Option<Vec<BigInt>> {
        let n = self.n();
        let mut out = Vec::with_capacity(n);
        for k in 0..n {
            let (q, r) = w[k].div_rem(&self.hnf[k][k]);
            if !r.is_zero() {
                return None;
            }
            if !q.is_zero() {
                for j in k..n {
                    w[j] -= &q * &self.hnf[k][j];
                }
            }
            out.push(q);
        }
        Some(out)
    }

    /// Whether `num(θ)/den` lies in the lattice.
    pub fn contains(&self, num: &IntPoly, den: &BigInt) -> bool {
        self.coordinates(num, den).is_some()
    }

    /// Whether `other ⊆ self`.
    pub fn contains_lattice(&self, other: &IntegerLattice) -> bool {
        other.elements().iter().all(|(p, d)| self.contains(p, d))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "den": self.den.to_string(),
            "hnf": self.hnf.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}
