//! Towers of artinian `Z/NZ`-algebras `A_0 ⊂ A_1 ⊂ … ⊂ A_r`, with
//! `A_{i+1} = A_i[y]/(t_i)`, and polynomial arithmetic over them.
//!
//! Every operation that needs a unit either gets one or reports a
//! [`FactorEvent`]: a certified proper factor of `N` or of some modulus `t_i`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::Value;

use crate::poly::IntPoly;

/// Element of level `i` of a tower: `dim(i)` residues modulo `N`.
///
/// Coordinates are ordered so that an element of `A_{i+1}` is the concatenation
/// of its `f_i` coefficients (in `A_i`) with respect to `1, z_i, …, z_i^{f_i-1}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AlgElem {
    level: usize,
    coords: Vec<BigInt>,
}

impl AlgElem {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coords[0].is_one() && self.coords[1..].iter().all(|c| c.is_zero())
    }
}

/// Polynomial in `A_i[y]`, dense, trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PolyA {
    level: usize,
    coeffs: Vec<AlgElem>,
}

impl PolyA {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn coeffs(&self) -> &[AlgElem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lc(&self) -> Option<&AlgElem> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    fn trimmed(level: usize, mut coeffs: Vec<AlgElem>) -> PolyA {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        PolyA { level, coeffs }
    }

    /// Coefficient tree as JSON: nested arrays down to decimal strings.
    pub fn to_json(&self, tower: &AlgebraTower) -> Value {
        Value::Array(self.coeffs.iter().map(|c| tower.elem_to_json(c)).collect())
    }
}

/// A detected proper factor of one of the moduli `[N, t_0, …, t_{r-1}]`.
#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
pub enum FactorEvent {
    /// Proper factor `d` of `N` (`1 < d < N`).
    #[error("proper factor {0} of the base modulus")]
    Integer(BigInt),
    /// Monic proper divisor of the modulus `t_level`.
    #[error("proper factor of the modulus at level {level}")]
    Modulus { level: usize, factor: PolyA },
}

impl FactorEvent {
    /// Position in the moduli sequence, with `-1` standing for `N`.
    pub fn level(&self) -> i64 {
        match self {
            FactorEvent::Integer(_) => -1,
            FactorEvent::Modulus { level, .. } => *level as i64,
        }
    }
}

/// Exact division failed; never produced for valid inputs.
#[derive(Clone, Copy, PartialEq, Eq, Debug, thiserror::Error)]
#[error("polynomial division is not exact")]
pub struct NonExactDivision;

pub type AResult<T> = Result<T, FactorEvent>;

/// The chain `A_0 = Z/NZ ⊂ A_1 ⊂ … ⊂ A_r` given by its moduli.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraTower {
    n: BigInt,
    moduli: Vec<PolyA>,
    dims: Vec<usize>,
}

impl AlgebraTower {
    pub fn new(n: BigInt) -> Self {
        assert!(n > BigInt::one(), "tower modulus must exceed 1");
        AlgebraTower { n, moduli: Vec::new(), dims: vec![1] }
    }

    pub fn n(&self) -> &BigInt {
        &self.n
    }

    /// Number of moduli `t_i`; the top level is `A_len`.
    pub fn len(&self) -> usize {
        self.moduli.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moduli.is_empty()
    }

    pub fn top(&self) -> usize {
        self.moduli.len()
    }

    pub fn modulus(&self, i: usize) -> &PolyA {
        &self.moduli[i]
    }

    pub fn moduli(&self) -> &[PolyA] {
        &self.moduli
    }

    /// `f_i = deg t_i`.
    pub fn degree(&self, i: usize) -> usize {
        self.moduli[i].deg()
    }

    /// Rank of `A_i` over `Z/NZ`.
    pub fn dim(&self, i: usize) -> usize {
        self.dims[i]
    }

    /// Truncation keeping the moduli `t_0, …, t_{len-1}`.
    pub fn truncate(&self, len: usize) -> AlgebraTower {
        AlgebraTower {
            n: self.n.clone(),
            moduli: self.moduli[..len].to_vec(),
            dims: self.dims[..=len].to_vec(),
        }
    }

    /// Appends the monic modulus `t` over the top level, certifying strong unitarity.
    pub fn extend(&self, t: &PolyA) -> AResult<AlgebraTower> {
        assert_eq!(t.level, self.top(), "modulus must live over the top level");
        assert!(t.is_monic() && t.deg() >= 1, "modulus must be monic of positive degree");
        self.check_strongly_unitary(t)?;
        Ok(self.extend_unchecked(t))
    }

    /// Appends a modulus already known to be strongly unitary.
    pub fn extend_unchecked(&self, t: &PolyA) -> AlgebraTower {
        let mut out = self.clone();
        out.dims.push(self.dims[self.top()] * t.deg());
        out.moduli.push(t.clone());
        out
    }

    // ---------------------------------------------------------------- elements

    pub fn zero(&self, i: usize) -> AlgElem {
        AlgElem { level: i, coords: vec![BigInt::zero(); self.dims[i]] }
    }

    pub fn one(&self, i: usize) -> AlgElem {
        self.from_int(i, &BigInt::one())
    }

    pub fn from_int(&self, i: usize, c: &BigInt) -> AlgElem {
        let mut e = self.zero(i);
        e.coords[0] = c.mod_floor(&self.n);
        e
    }

    /// Element from raw residues (reduced modulo `N`).
    pub fn from_coords(&self, i: usize, coords: Vec<BigInt>) -> AlgElem {
        assert_eq!(coords.len(), self.dims[i]);
        AlgElem { level: i, coords: coords.into_iter().map(|c| c.mod_floor(&self.n)).collect() }
    }

    /// Image of `a` in `A_j` for `j >= level(a)`.
    pub fn embed(&self, a: &AlgElem, j: usize) -> AlgElem {
        assert!(j >= a.level);
        let mut coords = a.coords.clone();
        coords.resize(self.dims[j], BigInt::zero());
        AlgElem { level: j, coords }
    }

    /// `z_i`, the class of `y` in `A_{i+1}`.
    pub fn gen(&self, i: usize) -> AlgElem {
        let y = PolyA { level: i, coeffs: vec![self.zero(i), self.one(i)] };
        self.pack(&y)
    }

    /// Evaluation of `p ∈ A_i[y]` at `z_i`, an element of `A_{i+1}`.
    pub fn pack(&self, p: &PolyA) -> AlgElem {
        let i = p.level;
        let r = self.prem_monic(p, &self.moduli[i]);
        let f = self.degree(i);
        let mut coords = Vec::with_capacity(self.dims[i + 1]);
        for k in 0..f {
            match r.coeffs.get(k) {
                Some(c) => coords.extend(c.coords.iter().cloned()),
                None => coords.extend(std::iter::repeat(BigInt::zero()).take(self.dims[i])),
            }
        }
        AlgElem { level: i + 1, coords }
    }

    /// Inverse of [`pack`](Self::pack): the canonical representative in `A_i[y]`.
    pub fn unpack(&self, a: &AlgElem) -> PolyA {
        assert!(a.level >= 1);
        let i = a.level - 1;
        let d = self.dims[i];
        let coeffs = a
            .coords
            .chunks(d)
            .map(|ch| AlgElem { level: i, coords: ch.to_vec() })
            .collect();
        PolyA::trimmed(i, coeffs)
    }

    pub fn add(&self, a: &AlgElem, b: &AlgElem) -> AlgElem {
        debug_assert_eq!(a.level, b.level);
        let coords = a
            .coords
            .iter()
            .zip(&b.coords)
            .map(|(x, y)| {
                let s = x + y;
                if s >= self.n {
                    s - &self.n
                } else {
                    s
                }
            })
            .collect();
        AlgElem { level: a.level, coords }
    }

    pub fn sub(&self, a: &AlgElem, b: &AlgElem) -> AlgElem {
        debug_assert_eq!(a.level, b.level);
        let coords = a
            .coords
            .iter()
            .zip(&b.coords)
            .map(|(x, y)| {
                let s = x - y;
                if s.is_negative() {
                    s + &self.n
                } else {
                    s
                }
            })
            .collect();
        AlgElem { level: a.level, coords }
    }

    pub fn neg(&self, a: &AlgElem) -> AlgElem {
        let coords = a
            .coords
            .iter()
            .map(|x| if x.is_zero() { BigInt::zero() } else { &self.n - x })
            .collect();
        AlgElem { level: a.level, coords }
    }

    pub fn scale_int(&self, a: &AlgElem, c: &BigInt) -> AlgElem {
        let coords = a.coords.iter().map(|x| (x * c).mod_floor(&self.n)).collect();
        AlgElem { level: a.level, coords }
    }

    pub fn mul(&self, a: &AlgElem, b: &AlgElem) -> AlgElem {
        debug_assert_eq!(a.level, b.level);
        let i = a.level;
        if i == 0 {
            return AlgElem { level: 0, coords: vec![(&a.coords[0] * &b.coords[0]) % &self.n] };
        }
        if a.is_zero() || b.is_zero() {
            return self.zero(i);
        }
        if self.dims[i] == self.dims[i - 1] {
            // degree-one modulus: A_i is A_{i-1} as a ring
            let x = AlgElem { level: i - 1, coords: a.coords.clone() };
            let y = AlgElem { level: i - 1, coords: b.coords.clone() };
            let p = self.mul(&x, &y);
            return AlgElem { level: i, coords: p.coords };
        }
        let pa = self.unpack(a);
        let pb = self.unpack(b);
        self.pack(&self.pmul(&pa, &pb))
    }

    pub fn pow(&self, a: &AlgElem, e: &BigInt) -> AlgElem {
        assert!(!e.is_negative(), "negative exponent; use pow_signed");
        let mut acc = self.one(a.level);
        let bits = e.bits();
        for k in (0..bits).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(k) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    /// Inverse of `a`, or the factor of a modulus witnessing that `a` is not a unit.
    pub fn invert(&self, a: &AlgElem) -> AResult<AlgElem> {
        assert!(!a.is_zero(), "inverting zero");
        let i = a.level;
        if i == 0 {
            let c = &a.coords[0];
            let eg = c.extended_gcd(&self.n);
            if !eg.gcd.is_one() {
                return Err(self.integer_event(eg.gcd));
            }
            return Ok(AlgElem { level: 0, coords: vec![eg.x.mod_floor(&self.n)] });
        }
        if self.dims[i] == self.dims[i - 1] {
            let x = AlgElem { level: i - 1, coords: a.coords.clone() };
            let inv = self.invert(&x)?;
            return Ok(AlgElem { level: i, coords: inv.coords });
        }
        let p = self.unpack(a);
        let t = &self.moduli[i - 1];
        let (d, u, _) = self.pxgcd(&p, t)?;
        if !d.is_one() {
            return Err(self.modulus_event(i - 1, d));
        }
        Ok(self.pack(&u))
    }

    pub fn is_unit(&self, a: &AlgElem) -> AResult<bool> {
        if a.is_zero() {
            return Ok(false);
        }
        self.invert(a).map(|_| true)
    }

    /// Builds a verified event for a divisor of `N`.
    pub fn integer_event(&self, d: BigInt) -> FactorEvent {
        assert!(d > BigInt::one() && d < self.n && (&self.n % &d).is_zero(), "not a proper factor of N");
        FactorEvent::Integer(d)
    }

    /// Builds a verified event for a monic proper divisor of `t_level`.
    pub fn modulus_event(&self, level: usize, d: PolyA) -> FactorEvent {
        let t = &self.moduli[level];
        assert!(d.is_monic() && d.deg() >= 1 && d.deg() < t.deg(), "not a proper monic divisor");
        assert!(self.exact_divide(t, &d).is_ok(), "event factor does not divide its modulus");
        FactorEvent::Modulus { level, factor: d }
    }

    /// `z_{i-1}^k` in `A_i` for any integer `k`.
    pub fn zpow(&self, i: usize, k: i64) -> AResult<AlgElem> {
        assert!(i >= 1);
        let z = self.gen(i - 1);
        if k >= 0 {
            return Ok(self.pow(&z, &BigInt::from(k)));
        }
        let zi = self.zinv(i)?;
        Ok(self.pow(&zi, &BigInt::from(-k)))
    }

    /// `z_{i-1}^{-1} = -t(0)^{-1} (t(y) - t(0))/y` evaluated at `z_{i-1}`.
    pub fn zinv(&self, i: usize) -> AResult<AlgElem> {
        let t = &self.moduli[i - 1];
        let t0 = t.coeffs[0].clone();
        if t0.is_zero() {
            panic!("z is not a unit: modulus has zero constant term");
        }
        let inv0 = self.invert(&t0)?;
        let shifted = PolyA::trimmed(i - 1, t.coeffs[1..].to_vec());
        let q = self.pack(&shifted);
        let c = self.neg(&self.embed(&inv0, i));
        Ok(self.mul(&c, &q))
    }

    fn elem_to_json(&self, a: &AlgElem) -> Value {
        if a.level == 0 {
            return Value::String(a.coords[0].to_string());
        }
        let d = self.dims[a.level - 1];
        Value::Array(
            a.coords
                .chunks(d)
                .map(|ch| self.elem_to_json(&AlgElem { level: a.level - 1, coords: ch.to_vec() }))
                .collect(),
        )
    }

    // ------------------------------------------------------------- polynomials

    pub fn pzero(&self, i: usize) -> PolyA {
        PolyA { level: i, coeffs: Vec::new() }
    }

    pub fn pone(&self, i: usize) -> PolyA {
        PolyA { level: i, coeffs: vec![self.one(i)] }
    }

    pub fn pconst(&self, c: AlgElem) -> PolyA {
        let level = c.level;
        PolyA::trimmed(level, vec![c])
    }

    /// `y^k` over `A_i`.
    pub fn pmonomial(&self, i: usize, c: AlgElem, k: usize) -> PolyA {
        let mut coeffs = vec![self.zero(i); k + 1];
        coeffs[k] = c;
        PolyA::trimmed(i, coeffs)
    }

    pub fn poly(&self, i: usize, coeffs: Vec<AlgElem>) -> PolyA {
        assert!(coeffs.iter().all(|c| c.level == i));
        PolyA::trimmed(i, coeffs)
    }

    /// Reduction of an integer polynomial into `A_0[y]`.
    pub fn poly_from_int(&self, f: &IntPoly) -> PolyA {
        PolyA::trimmed(0, f.coeffs().iter().map(|c| self.from_int(0, c)).collect())
    }

    /// Least non-negative lift of a polynomial over `A_0`.
    pub fn poly_to_int(&self, p: &PolyA) -> IntPoly {
        assert_eq!(p.level, 0);
        IntPoly::new(p.coeffs.iter().map(|c| c.coords[0].clone()).collect())
    }

    /// Polynomial with integer coefficients over level `i`.
    pub fn poly_from_i64(&self, i: usize, coeffs: &[i64]) -> PolyA {
        PolyA::trimmed(i, coeffs.iter().map(|&c| self.from_int(i, &BigInt::from(c))).collect())
    }

    pub fn padd(&self, a: &PolyA, b: &PolyA) -> PolyA {
        let n = a.coeffs.len().max(b.coeffs.len());
        let mut v = Vec::with_capacity(n);
        for k in 0..n {
            v.push(match (a.coeffs.get(k), b.coeffs.get(k)) {
                (Some(x), Some(y)) => self.add(x, y),
                (Some(x), None) => x.clone(),
                (None, Some(y)) => y.clone(),
                (None, None) => unreachable!(),
            });
        }
        PolyA::trimmed(a.level, v)
    }

    pub fn psub(&self, a: &PolyA, b: &PolyA) -> PolyA {
        self.padd(a, &self.pneg(b))
    }

    pub fn pneg(&self, a: &PolyA) -> PolyA {
        PolyA { level: a.level, coeffs: a.coeffs.iter().map(|c| self.neg(c)).collect() }
    }

    pub fn pscale(&self, a: &PolyA, c: &AlgElem) -> PolyA {
        PolyA::trimmed(a.level, a.coeffs.iter().map(|x| self.mul(x, c)).collect())
    }

    pub fn pmul(&self, a: &PolyA, b: &PolyA) -> PolyA {
        debug_assert_eq!(a.level, b.level);
        if a.is_zero() || b.is_zero() {
            return self.pzero(a.level);
        }
        let mut v = vec![self.zero(a.level); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let prod = self.mul(x, y);
                v[i + j] = self.add(&v[i + j], &prod);
            }
        }
        PolyA::trimmed(a.level, v)
    }

    pub fn ppow(&self, a: &PolyA, e: usize) -> PolyA {
        let mut acc = self.pone(a.level);
        for _ in 0..e {
            acc = self.pmul(&acc, a);
        }
        acc
    }

    pub fn pderiv(&self, a: &PolyA) -> PolyA {
        PolyA::trimmed(
            a.level,
            a.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| self.scale_int(c, &BigInt::from(k)))
                .collect(),
        )
    }

    /// Value at `x ∈ A_i`.
    pub fn peval(&self, p: &PolyA, x: &AlgElem) -> AlgElem {
        let mut acc = self.zero(p.level);
        for c in p.coeffs.iter().rev() {
            acc = self.add(&self.mul(&acc, x), c);
        }
        acc
    }

    /// Division with remainder by a monic polynomial.
    pub fn pdivrem_monic(&self, s: &PolyA, t: &PolyA) -> (PolyA, PolyA) {
        assert!(t.is_monic(), "divisor must be monic");
        let dt = t.deg();
        let i = s.level;
        if s.coeffs.len() <= dt {
            return (self.pzero(i), s.clone());
        }
        let mut r = s.coeffs.clone();
        let mut q = vec![self.zero(i); r.len() - dt];
        for k in (dt..r.len()).rev() {
            let c = r[k].clone();
            if c.is_zero() {
                continue;
            }
            for (j, tj) in t.coeffs[..dt].iter().enumerate() {
                if !tj.is_zero() {
                    let prod = self.mul(&c, tj);
                    r[k - dt + j] = self.sub(&r[k - dt + j], &prod);
                }
            }
            r[k] = self.zero(i);
            q[k - dt] = c;
        }
        r.truncate(dt);
        (PolyA::trimmed(i, q), PolyA::trimmed(i, r))
    }

    pub fn prem_monic(&self, s: &PolyA, t: &PolyA) -> PolyA {
        if s.coeffs.len() <= t.deg() {
            return s.clone();
        }
        self.pdivrem_monic(s, t).1
    }

    /// `s = t q + r` with `deg r < deg t`; the leading coefficient of `t` must be a unit.
    pub fn quotrem(&self, s: &PolyA, t: &PolyA) -> AResult<(PolyA, PolyA)> {
        let lc = t.lc().expect("division by zero polynomial");
        if lc.is_one() {
            return Ok(self.pdivrem_monic(s, t));
        }
        let inv = self.invert(lc)?;
        let tm = self.pscale(t, &inv);
        let (q, r) = self.pdivrem_monic(s, &tm);
        Ok((self.pscale(&q, &inv), r))
    }

    /// `p / lc(p)`.
    pub fn pmonic(&self, p: &PolyA) -> AResult<PolyA> {
        let lc = p.lc().expect("zero polynomial has no monic form");
        if lc.is_one() {
            return Ok(p.clone());
        }
        let inv = self.invert(lc)?;
        Ok(self.pscale(p, &inv))
    }

    /// Monic generator of `sA[y] + tA[y]`, or a factor of a modulus.
    pub fn pgcd(&self, s: &PolyA, t: &PolyA) -> AResult<PolyA> {
        assert!(!t.is_zero(), "gcd needs t != 0");
        let mut s = s.clone();
        let mut t = t.clone();
        while !t.is_zero() {
            t = self.pmonic(&t)?;
            let (_, r) = self.pdivrem_monic(&s, &t);
            s = t;
            t = r;
        }
        Ok(s)
    }

    /// `(d, u, v)` with `su + tv = d` and `d` the monic gcd.
    pub fn pxgcd(&self, s: &PolyA, t: &PolyA) -> AResult<(PolyA, PolyA, PolyA)> {
        assert!(!t.is_zero(), "xgcd needs t != 0");
        let i = s.level;
        let (mut r0, mut u0, mut v0) = (s.clone(), self.pone(i), self.pzero(i));
        let (mut r1, mut u1, mut v1) = (t.clone(), self.pzero(i), self.pone(i));
        while !r1.is_zero() {
            let lc = r1.lc().unwrap().clone();
            if !lc.is_one() {
                let inv = self.invert(&lc)?;
                r1 = self.pscale(&r1, &inv);
                u1 = self.pscale(&u1, &inv);
                v1 = self.pscale(&v1, &inv);
            }
            let (q, r) = self.pdivrem_monic(&r0, &r1);
            let u2 = self.psub(&u0, &self.pmul(&q, &u1));
            let v2 = self.psub(&v0, &self.pmul(&q, &v1));
            r0 = std::mem::replace(&mut r1, r);
            u0 = std::mem::replace(&mut u1, u2);
            v0 = std::mem::replace(&mut v1, v2);
        }
        Ok((r0, u0, v0))
    }

    /// Quotient `t / d` for monic `d`, which must divide exactly.
    pub fn exact_divide(&self, t: &PolyA, d: &PolyA) -> Result<PolyA, NonExactDivision> {
        let (q, r) = self.pdivrem_monic(t, d);
        if r.is_zero() {
            Ok(q)
        } else {
            Err(NonExactDivision)
        }
    }

    /// Largest `k` with `t^k | s` for monic `t`; `None` for `s = 0`.
    pub fn ord_t(&self, s: &PolyA, t: &PolyA) -> Option<usize> {
        if s.is_zero() {
            return None;
        }
        let mut k = 0;
        let mut cur = s.clone();
        while let Ok(q) = self.exact_divide(&cur, t) {
            cur = q;
            k += 1;
        }
        Some(k)
    }

    /// Tests that every nonzero coefficient is a unit.
    pub fn check_strongly_unitary(&self, p: &PolyA) -> AResult<()> {
        for c in &p.coeffs {
            if !c.is_zero() {
                self.invert(c)?;
            }
        }
        Ok(())
    }

    /// Squarefree decomposition `f = lc(f) ∏ s_i^{l_i}`, `l_1 < l_2 < …`, each `s_i`
    /// monic and certified strongly unitary.
    ///
    /// Correct when `deg f < p` for every prime `p | N`.
    pub fn sfd(&self, f: &PolyA) -> AResult<Vec<(PolyA, usize)>> {
        let mut f = self.pmonic(f)?;
        let d = self.pgcd(&f, &self.pderiv(&f))?;
        let mut g = self.exact_divide(&f, &d).expect("gcd divides f");
        let mut out = Vec::new();
        let mut l = 1;
        while !f.is_one() {
            assert!(!g.is_one(), "squarefree decomposition stalled (characteristic too small)");
            f = self.exact_divide(&f, &g).expect("squarefree part divides f");
            let h = self.pgcd(&f, &g)?;
            let s = self.exact_divide(&g, &h).expect("gcd divides g");
            if !s.is_one() {
                self.check_strongly_unitary(&s)?;
                out.push((s, l));
            }
            g = h;
            l += 1;
        }
        Ok(out)
    }

    /// Human-readable form of a polynomial over `A_0`.
    pub fn show(&self, p: &PolyA) -> String {
        format!("{}", PolyDisplay { tower: self, p })
    }
}

struct PolyDisplay<'a> {
    tower: &'a AlgebraTower,
    p: &'a PolyA,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.level == 0 {
            write!(f, "{}", self.tower.poly_to_int(self.p).to_string().replace('x', "y"))
        } else {
            write!(f, "{}", self.p.to_json(self.tower))
        }
    }
}
