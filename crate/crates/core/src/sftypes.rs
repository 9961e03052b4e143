//! SF-types over `(Z, ord_N)`: level data, the pseudo-valuations `v_i`, residual
//! polynomial operators, robustness certification and representatives.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::artinalg::{AResult, AlgElem, AlgebraTower, PolyA};
use crate::intarith::ord_n;
use crate::polygon::NewtonPolygon;
use crate::poly::IntPoly;

/// Data attached to a level `i >= 1` of a type: `(g_i, λ_i = h_i/e_i)` plus caches.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    pub g: IntPoly,
    pub h: i64,
    pub e: i64,
    /// `V_i = v_{i-1}(g_i)`.
    pub vcap: i64,
    /// `ℓ_i h_i + ℓ'_i e_i = 1`, `0 <= ℓ_i < e_i`.
    pub l: i64,
    pub lp: i64,
}

/// An SF-type of order `r`: moduli `t_0, …, t_r` (held by the tower, whose top is
/// `A_{r+1}`) and levels `1..=r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SFType {
    tower: AlgebraTower,
    levels: Vec<Level>,
}

/// `(ℓ, ℓ')` with `ℓ h + ℓ' e = 1` and `0 <= ℓ < e`.
pub fn bezout(h: i64, e: i64) -> (i64, i64) {
    let eg = h.extended_gcd(&e);
    assert_eq!(eg.gcd, 1, "slope numerator and denominator must be coprime");
    let l = eg.x.rem_euclid(e);
    let lp = (1 - l * h) / e;
    debug_assert_eq!(l * h + lp * e, 1);
    (l, lp)
}

impl SFType {
    /// Order-zero type `(t_0)`; `t_0` must already be certified.
    pub fn order_zero(n: &BigInt, t0: &PolyA) -> SFType {
        let tower = AlgebraTower::new(n.clone()).extend_unchecked(t0);
        SFType { tower, levels: Vec::new() }
    }

    pub fn order(&self) -> usize {
        self.levels.len()
    }

    pub fn tower(&self) -> &AlgebraTower {
        &self.tower
    }

    pub fn n(&self) -> &BigInt {
        self.tower.n()
    }

    pub fn t(&self, i: usize) -> &PolyA {
        self.tower.modulus(i)
    }

    pub fn f(&self, i: usize) -> i64 {
        self.tower.degree(i) as i64
    }

    pub fn level(&self, i: usize) -> &Level {
        &self.levels[i - 1]
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn g(&self, i: usize) -> &IntPoly {
        &self.levels[i - 1].g
    }

    pub fn e(&self, i: usize) -> i64 {
        if i == 0 {
            1
        } else {
            self.levels[i - 1].e
        }
    }

    pub fn h(&self, i: usize) -> i64 {
        if i == 0 {
            0
        } else {
            self.levels[i - 1].h
        }
    }

    /// `V_i`, including `V_0 = 0`.
    pub fn vcap(&self, i: usize) -> i64 {
        if i == 0 {
            0
        } else {
            self.levels[i - 1].vcap
        }
    }

    /// `m_i = deg g_i`, with `m_0 = 1`.
    pub fn m(&self, i: usize) -> usize {
        (0..i).map(|k| (self.e(k) * self.f(k)) as usize).product()
    }

    /// `e_1 ⋯ e_i`.
    pub fn e_prod(&self, i: usize) -> i64 {
        (1..=i).map(|k| self.e(k)).product()
    }

    /// `f_0 ⋯ f_i`.
    pub fn f_prod(&self, i: usize) -> i64 {
        (0..=i).map(|k| self.f(k)).product()
    }

    /// `V_{r+1} = e_r f_r (e_r V_r + h_r)`, the value of any representative.
    pub fn next_vcap(&self) -> i64 {
        let r = self.order();
        self.e(r) * self.f(r) * (self.e(r) * self.vcap(r) + self.h(r))
    }

    /// Whether some level has `e_i > 1`.
    pub fn is_ramified(&self) -> bool {
        self.levels.iter().any(|l| l.e > 1)
    }

    /// Extends by `(g, h/e, t)`; `t` over `A_{r+1}` must be certified squarefree and
    /// strongly unitary by the caller.
    pub fn push(&self, g: IntPoly, h: i64, e: i64, t: &PolyA) -> SFType {
        let (l, lp) = bezout(h, e);
        let vcap = self.next_vcap();
        let mut levels = self.levels.clone();
        levels.push(Level { g, h, e, vcap, l, lp });
        SFType { tower: self.tower.extend_unchecked(t), levels }
    }

    /// Truncation to order `i`.
    pub fn truncate(&self, i: usize) -> SFType {
        SFType { tower: self.tower.truncate(i + 1), levels: self.levels[..i].to_vec() }
    }

    /// Same type with `t_r` replaced, certifying strong unitarity and, for `r > 0`,
    /// that `t(0)` is a unit.
    pub fn with_top_modulus(&self, t: &PolyA) -> AResult<SFType> {
        let r = self.order();
        let base = self.tower.truncate(r);
        let tower = base.extend(t)?;
        if r > 0 {
            base.invert(&t.coeffs()[0])?;
        }
        Ok(SFType { tower, levels: self.levels.clone() })
    }

    /// Same type with `t_r` replaced by a polynomial known to be certified.
    pub fn with_top_modulus_unchecked(&self, t: &PolyA) -> SFType {
        let r = self.order();
        SFType { tower: self.tower.truncate(r).extend_unchecked(t), levels: self.levels.clone() }
    }

    /// Serialized levels for the tree format.
    pub fn to_json(&self) -> Value {
        let mut levels = vec![json!({
            "level": 0,
            "t": self.t(0).to_json(&self.tower),
        })];
        for i in 1..=self.order() {
            let lv = self.level(i);
            levels.push(json!({
                "level": i,
                "g": lv.g.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "lambda": [lv.h, lv.e],
                "V": lv.vcap,
                "t": self.t(i).to_json(&self.tower),
            }));
        }
        Value::Array(levels)
    }
}

/// Canonical `g`-expansion with its quotients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    /// `a_0, a_1, …` with `deg a_s < deg g`.
    pub coeffs: Vec<IntPoly>,
    /// `q_0 = f, q_1, …` with `q_s = a_s + a_{s+1} g + …`.
    pub quotients: Vec<IntPoly>,
}

/// Expands `f` in powers of the monic `g`, computing `a_0..=a_bound` (all if `None`).
pub fn expand(f: &IntPoly, g: &IntPoly, bound: Option<usize>) -> Expansion {
    assert!(g.is_monic() && g.deg() >= 1);
    let mut coeffs = Vec::new();
    let mut quotients = vec![f.clone()];
    let mut cur = f.clone();
    while !cur.is_zero() && bound.is_none_or(|b| coeffs.len() <= b) {
        let (q, r) = cur.divrem_monic(g);
        coeffs.push(r);
        quotients.push(q.clone());
        cur = q;
    }
    quotients.pop_if(|q| q.is_zero());
    Expansion { coeffs, quotients }
}

/// The monic lift of `t ∈ A_0[y]` with least non-negative coefficients.
pub fn lift_order_zero(tower: &AlgebraTower, t: &PolyA) -> IntPoly {
    tower.poly_to_int(t)
}

/// `(ord_N(a), R_0(a))` without robustness checks.
pub fn r0(tower: &AlgebraTower, a: &IntPoly) -> (i64, PolyA) {
    assert!(!a.is_zero());
    let n = tower.n();
    let v = a
        .coeffs()
        .iter()
        .filter(|c| !c.is_zero())
        .map(|c| ord_n(c, n).0)
        .min()
        .unwrap();
    let np = num_traits::pow(n.clone(), v as usize);
    (v, tower.poly_from_int(&a.div_exact_scalar(&np)))
}

/// Analysis of a polynomial at level `j`: value, `λ_j`-component and residual.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelInfo {
    /// `v_j(a)` in the `e_1⋯e_j`-scaled normalization.
    pub v: i64,
    /// Left endpoint `(s_j(a), u_j(a))` of the component (`(0, v)` at level 0).
    pub s0: usize,
    pub u0: i64,
    /// Right endpoint abscissa.
    pub s1: usize,
    /// `R_j(a)` over `A_j`.
    pub residual: PolyA,
}

/// Point `(s, u)` of a cloud with its residual coefficient `c_s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CloudPoint {
    pub s: usize,
    pub u: i64,
    pub c: AlgElem,
}

/// `v_j(a)` by the recursive expansion formula; `None` for `a = 0`.
pub fn value(ty: &SFType, j: usize, a: &IntPoly) -> Option<i64> {
    if a.is_zero() {
        return None;
    }
    if j == 0 {
        let n = ty.n();
        return a.coeffs().iter().filter(|c| !c.is_zero()).map(|c| ord_n(c, n).0).min();
    }
    let lv = ty.level(j);
    expand(a, &lv.g, None)
        .coeffs
        .iter()
        .enumerate()
        .filter_map(|(s, b)| {
            let u = value(ty, j - 1, b)? + s as i64 * lv.vcap;
            Some(lv.e * u + s as i64 * lv.h)
        })
        .min()
}

/// Full analysis at level `j <= order`, certifying robustness of `a` along the way.
pub fn analyze(ty: &SFType, j: usize, a: &IntPoly) -> AResult<LevelInfo> {
    analyze_upto(ty, j, a, None)
}

/// As [`analyze`], reading only the expansion coefficients `a_0..=a_bound` at level `j`.
/// Exact whenever the `λ_j`-component ends at or before `bound`.
pub fn analyze_upto(ty: &SFType, j: usize, a: &IntPoly, bound: Option<usize>) -> AResult<LevelInfo> {
    assert!(!a.is_zero());
    let tower = ty.tower();
    if j == 0 {
        let n = tower.n();
        let mut v = i64::MAX;
        for c in a.coeffs().iter().filter(|c| !c.is_zero()) {
            let (k, b) = ord_n(c, n);
            let g = b.gcd(n);
            if !g.is_one() {
                return Err(tower.integer_event(g));
            }
            v = v.min(k);
        }
        let (_, residual) = r0(tower, a);
        return Ok(LevelInfo { v, s0: 0, u0: v, s1: 0, residual });
    }
    let lv = ty.level(j);
    let pts = cloud(ty, j, &lv.g, lv.vcap, a, bound)?;
    Ok(component(tower, j, &pts, lv.h, lv.e))
}

/// `ν_j(a) = ℓ'_j s_j(a) - ℓ_j u_j(a)`.
pub fn nu_of(ty: &SFType, j: usize, info: &LevelInfo) -> i64 {
    let lv = ty.level(j);
    lv.lp * info.s0 as i64 - lv.l * info.u0
}

pub fn nu(ty: &SFType, j: usize, a: &IntPoly) -> AResult<i64> {
    if j == 0 {
        return Ok(0);
    }
    Ok(nu_of(ty, j, &analyze(ty, j, a)?))
}

/// `z_j^{ν_j(a)} R_j(a)(z_j) ∈ A_{j+1}`, certified to be a unit.
pub fn residual_coefficient(ty: &SFType, j: usize, info: &LevelInfo) -> AResult<AlgElem> {
    let tower = ty.tower();
    let mut c = tower.pack(&info.residual);
    if j > 0 {
        let z = tower.zpow(j + 1, nu_of(ty, j, info))?;
        c = tower.mul(&z, &c);
    }
    if c.is_zero() {
        panic!("residual coefficient vanished for a reduced coefficient");
    }
    tower.invert(&c)?;
    Ok(c)
}

/// Point cloud of the `g`-expansion of `a` at level `j >= 1`, using level `j-1` analyses
/// of the coefficients; `g` has value `vcap` under `v_{j-1}`.
pub fn cloud(
    ty: &SFType,
    j: usize,
    g: &IntPoly,
    vcap: i64,
    a: &IntPoly,
    bound: Option<usize>,
) -> AResult<Vec<CloudPoint>> {
    let exp = expand(a, g, bound);
    let mut pts = Vec::new();
    for (s, b) in exp.coeffs.iter().enumerate() {
        if b.is_zero() {
            continue;
        }
        let info = analyze(ty, j - 1, b)?;
        let c = residual_coefficient(ty, j - 1, &info)?;
        pts.push(CloudPoint { s, u: info.v + s as i64 * vcap, c });
    }
    Ok(pts)
}

/// The `h/e`-component of a cloud at level `j`: value, endpoints and residual over `A_j`.
pub fn component(tower: &AlgebraTower, j: usize, pts: &[CloudPoint], h: i64, e: i64) -> LevelInfo {
    let key = |p: &CloudPoint| e * p.u + h * p.s as i64;
    let v = pts.iter().map(key).min().expect("empty cloud");
    let on: Vec<&CloudPoint> = pts.iter().filter(|p| key(p) == v).collect();
    let s0 = on[0].s;
    let u0 = on[0].u;
    let s1 = on[on.len() - 1].s;
    let d = (s1 - s0) / e as usize;
    let mut coeffs = vec![tower.zero(j); d + 1];
    for p in on {
        coeffs[(p.s - s0) / e as usize] = p.c.clone();
    }
    LevelInfo { v, s0, u0, s1, residual: tower.poly(j, coeffs) }
}

/// Newton polygon of the first `bound + 1` coefficients of `f` in the representative `g`
/// of `ty`, with the certified cloud.
pub fn newton(
    ty: &SFType,
    g: &IntPoly,
    bound: usize,
    f: &IntPoly,
) -> AResult<(NewtonPolygon, Vec<CloudPoint>)> {
    let pts = cloud(ty, ty.order() + 1, g, ty.next_vcap(), f, Some(bound))?;
    let poly = NewtonPolygon::from_points(&pts.iter().map(|p| (p.s, p.u)).collect::<Vec<_>>());
    Ok((poly, pts))
}

/// Residual polynomial of `f` over `A_{r+1}` for the slope `-h/e` of the polygon in `g`.
pub fn residual(ty: &SFType, g: &IntPoly, h: i64, e: i64, f: &IntPoly) -> AResult<PolyA> {
    let pts = cloud(ty, ty.order() + 1, g, ty.next_vcap(), f, None)?;
    Ok(component(ty.tower(), ty.order() + 1, &pts, h, e).residual)
}

/// `R_r(f)` for the type's own level `r` (`f mod N` at order zero).
pub fn type_residual(ty: &SFType, f: &IntPoly) -> AResult<PolyA> {
    let r = ty.order();
    if r == 0 {
        return Ok(ty.tower().poly_from_int(f));
    }
    Ok(analyze(ty, r, f)?.residual)
}

/// Largest `k` with `t_r^k | R_r(f)`.
pub fn ord_ty(ty: &SFType, f: &IntPoly) -> AResult<usize> {
    let res = type_residual(ty, f)?;
    Ok(ty.tower().ord_t(&res, ty.t(ty.order())).unwrap_or(usize::MAX))
}

/// Builds `a` with `deg a < m_{j+1}`, `v_j(a) = v` and residual coefficient `α ∈ A_{j+1}`.
/// Returns `None` when the value target is unreachable (negative at the bottom).
pub fn construct_with_residue(ty: &SFType, j: usize, v: i64, alpha: &AlgElem) -> AResult<Option<IntPoly>> {
    assert_eq!(alpha.level(), j + 1);
    assert!(!alpha.is_zero(), "target residual coefficient must be nonzero");
    let tower = ty.tower();
    if j == 0 {
        if v < 0 {
            return Ok(None);
        }
        let p = tower.unpack(alpha);
        tower.check_strongly_unitary(&p)?;
        let np = num_traits::pow(tower.n().clone(), v as usize);
        return Ok(Some(tower.poly_to_int(&p).scale(&np)));
    }
    let lv = ty.level(j);
    let s0 = (v * lv.l).rem_euclid(lv.e);
    let u0 = (v - s0 * lv.h) / lv.e;
    let nu = lv.lp * s0 - lv.l * u0;
    let beta = tower.mul(&tower.zpow(j + 1, -nu)?, alpha);
    let p = tower.unpack(&beta);
    let mut out = IntPoly::zero();
    for (k, bk) in p.coeffs().iter().enumerate() {
        if bk.is_zero() {
            continue;
        }
        tower.invert(bk)?;
        let sk = s0 + k as i64 * lv.e;
        let target = u0 - k as i64 * lv.h - sk * lv.vcap;
        let Some(b) = construct_with_residue(ty, j - 1, target, bk)? else {
            return Ok(None);
        };
        out = out.add(&b.mul(&lv.g.pow(sk as u32)));
    }
    Ok(Some(out))
}

/// A representative `g_{r+1}` of `ty`: monic of degree `m_{r+1}`, robust, with `R_r(g) = t_r`.
pub fn representative(ty: &SFType) -> AResult<IntPoly> {
    let r = ty.order();
    let tower = ty.tower();
    if r == 0 {
        return Ok(lift_order_zero(tower, ty.t(0)));
    }
    let lv = ty.level(r);
    let fr = ty.f(r);
    let t = ty.t(r);
    let mut g = lv.g.pow((lv.e * fr) as u32);
    for (k, tau) in t.coeffs().iter().enumerate().take(fr as usize) {
        if tau.is_zero() {
            continue;
        }
        let v = (fr - k as i64) * (lv.e * lv.vcap + lv.h);
        let a = construct_with_residue(ty, r - 1, v, tau)?
            .expect("representative coefficient target is always reachable");
        g = g.add(&a.mul(&lv.g.pow((k as i64 * lv.e) as u32)));
    }
    let info = analyze(ty, r, &g)?;
    assert_eq!(info.v, ty.next_vcap(), "representative has the wrong value");
    assert_eq!(&info.residual, t, "representative has the wrong residual polynomial");
    assert_eq!(g.deg(), ty.m(r + 1));
    Ok(g)
}
