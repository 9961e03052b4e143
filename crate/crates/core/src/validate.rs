//! Independent oracles: ring closure, discriminant identity, p-maximality by the
//! Round 2 criterion, resultant identities for quotients, and prime-by-prime
//! comparison of squarefree trees against classical ones.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::basis::{global_basis, level_quotients, Options};
use crate::intarith::{discriminant, ord_p, resultant, Rational};
use crate::lattice::IntegerLattice;
use crate::poly::IntPoly;
use crate::sfom::{om_prime, sfom, SFOMRep, SplitOutcome};
use crate::sftypes::{analyze_upto, expand, ord_ty, r0, value, SFType};

/// One line of a verification report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub check: String,
    pub ok: bool,
    pub details: String,
}

impl Check {
    fn new(check: impl Into<String>, ok: bool, details: impl Into<String>) -> Self {
        Check { check: check.into(), ok, details: details.into() }
    }

    pub fn to_json(&self) -> Value {
        json!({ "check": self.check, "status": if self.ok { "pass" } else { "fail" }, "details": self.details })
    }
}

pub fn report_json(checks: &[Check]) -> Value {
    Value::Array(checks.iter().map(Check::to_json).collect())
}

/// `w_i w_j` in coordinates of the lattice basis, or `None` if some product leaves it.
pub fn structure_constants(l: &IntegerLattice, f: &IntPoly) -> Option<Vec<Vec<Vec<BigInt>>>> {
    let n = l.n();
    let den2 = l.den() * l.den();
    let mut table = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for j in i..n {
            let prod = l.element(i).0.mul(&l.element(j).0).rem_monic(f);
            let c = l.coordinates(&prod, &den2)?;
            table[j][i] = c.clone();
            table[i][j] = c;
        }
    }
    Some(table)
}

pub fn ring_closed(l: &IntegerLattice, f: &IntPoly) -> bool {
    l.contains(&IntPoly::one(), &BigInt::one()) && structure_constants(l, f).is_some()
}

/// `Tr(θ^k)` for `k < count`.
pub fn power_traces(f: &IntPoly, count: usize) -> Vec<BigInt> {
    let n = f.deg();
    let a = |i: usize| f.coeff(i);
    let mut s = vec![BigInt::from(n)];
    for k in 1..count {
        let mut acc = BigInt::zero();
        for i in 1..=k.min(n) {
            if i == k {
                acc += BigInt::from(k) * a(n - k);
            } else {
                acc += a(n - i) * &s[k - i];
            }
        }
        s.push(-acc);
    }
    s
}

fn bareiss_det(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// `det(Tr(w_i w_j))` of the lattice basis.
pub fn trace_discriminant(l: &IntegerLattice, f: &IntPoly) -> Rational {
    let n = l.n();
    let s = power_traces(f, 2 * n);
    let trace = |p: &IntPoly| (0..n).fold(BigInt::zero(), |acc, k| acc + p.coeff(k) * &s[k]);
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let t = trace(&l.element(i).0.mul(&l.element(j).0).rem_monic(f));
            m[j][i] = t.clone();
            m[i][j] = t;
        }
    }
    Rational::new(bareiss_det(m), num_traits::pow(l.den().clone(), 2 * n))
}

/// `disc(f) = [L : Z[θ]]^2 · disc(L)` with `disc(L)` an integer.
pub fn disc_identity(l: &IntegerLattice, f: &IntPoly) -> bool {
    let dl = trace_discriminant(l, f);
    let idx = l.index();
    dl.is_integer() && Rational::from_integer(discriminant(f)) == &idx * &idx * dl
}

fn mul_mod(a: &[BigInt], b: &[BigInt], table: &[Vec<Vec<BigInt>>], p: &BigInt) -> Vec<BigInt> {
    let n = a.len();
    let mut c = vec![BigInt::zero(); n];
    for (i, ai) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, bj) in b.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            let w = ai * bj;
            for (ck, t) in c.iter_mut().zip(&table[i][j]) {
                *ck += &w * t;
            }
        }
    }
    c.iter().map(|x| x.mod_floor(p)).collect()
}

fn pow_mod(a: &[BigInt], e: &BigInt, one: &[BigInt], table: &[Vec<Vec<BigInt>>], p: &BigInt) -> Vec<BigInt> {
    let mut acc = one.to_vec();
    for k in (0..e.bits()).rev() {
        acc = mul_mod(&acc, &acc, table, p);
        if e.bit(k) {
            acc = mul_mod(&acc, a, table, p);
        }
    }
    acc
}

/// Basis of `{x : x·A = 0}` over `F_p`, for the rows of `A`.
pub fn left_kernel_mod(rows: &[Vec<BigInt>], p: &BigInt) -> Vec<Vec<BigInt>> {
    let m = rows.len();
    let k = rows.first().map_or(0, |r| r.len());
    let mut aug: Vec<Vec<BigInt>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v: Vec<BigInt> = r.iter().map(|x| x.mod_floor(p)).collect();
            v.extend((0..m).map(|j| BigInt::from((i == j) as u8)));
            v
        })
        .collect();
    let mut used = 0;
    for col in 0..k {
        let Some(piv) = (used..m).find(|&i| !aug[i][col].is_zero()) else { continue };
        aug.swap(used, piv);
        let inv = aug[used][col].modpow(&(p - 2u32), p);
        for x in aug[used].iter_mut() {
            *x = (&*x * &inv).mod_floor(p);
        }
        let pivot_row = aug[used].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i != used && !row[col].is_zero() {
                let c = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x = (&*x - &c * y).mod_floor(p);
                }
            }
        }
        used += 1;
    }
    aug[used..].iter().map(|r| r[k..].to_vec()).collect()
}

/// Lattice of integers `x` (in coordinates of the order) with `x^{p^j} ∈ pO`, `p^j ≥ n`.
fn radical(table: &[Vec<Vec<BigInt>>], one: &[BigInt], p: &BigInt) -> IntegerLattice {
    let n = one.len();
    let mut q = p.clone();
    while q < BigInt::from(n) {
        q *= p;
    }
    let frob: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let e: Vec<BigInt> = (0..n).map(|j| BigInt::from((i == j) as u8)).collect();
            pow_mod(&e, &q, one, table, p)
        })
        .collect();
    let mut rows = left_kernel_mod(&frob, p);
    rows.extend((0..n).map(|i| (0..n).map(|j| if i == j { p.clone() } else { BigInt::zero() }).collect()));
    IntegerLattice::from_rows(n, &BigInt::one(), &rows)
}

fn mul_exact(a: &[BigInt], b: &[BigInt], table: &[Vec<Vec<BigInt>>]) -> Vec<BigInt> {
    let n = a.len();
    let mut c = vec![BigInt::zero(); n];
    for (i, ai) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, bj) in b.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            let w = ai * bj;
            for (ck, t) in c.iter_mut().zip(&table[i][j]) {
                *ck += &w * t;
            }
        }
    }
    c
}

/// Ring of multipliers of the `p`-radical of the order `l`; equals `l` iff `l` is `p`-maximal.
pub fn multiplier_ring(l: &IntegerLattice, f: &IntPoly, p: &BigInt) -> IntegerLattice {
    let n = l.n();
    let table = structure_constants(l, f).expect("lattice is not a ring");
    let one = l.coordinates(&IntPoly::one(), &BigInt::one()).expect("order contains 1");
    let rad = radical(&table, &one, p);
    // y ↦ (y·β_k mod p·I)_k; its kernel mod p is (O' ∩ p^{-1}O)·p / pO
    let map: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            let e: Vec<BigInt> = (0..n).map(|j| BigInt::from((i == j) as u8)).collect();
            rad.hnf()
                .iter()
                .flat_map(|beta| {
                    let prod = mul_exact(&e, beta, &table);
                    rad.solve(prod).expect("radical is an ideal").into_iter().map(|x| x.mod_floor(p))
                })
                .collect()
        })
        .collect();
    let extra = left_kernel_mod(&map, p);
    let mut rows: Vec<Vec<BigInt>> = l.hnf().iter().map(|r| r.iter().map(|x| x * p).collect()).collect();
    for u in extra {
        let mut v = vec![BigInt::zero(); n];
        for (ui, row) in u.iter().zip(l.hnf()) {
            for (vk, x) in v.iter_mut().zip(row) {
                *vk += ui * x;
            }
        }
        rows.push(v);
    }
    IntegerLattice::from_rows(n, &(l.den() * p), &rows)
}

/// Round 2 criterion: `l` is `p`-maximal iff the multiplier ring of its `p`-radical is `l`.
pub fn p_maximal(l: &IntegerLattice, f: &IntPoly, p: &BigInt) -> bool {
    &multiplier_ring(l, f, p) == l
}

fn residual_ord(ty: &SFType, g: &IntPoly) -> usize {
    if ty.order() == 0 {
        let (_, res) = r0(ty.tower(), g);
        return ty.tower().ord_t(&res, ty.t(0)).unwrap_or(usize::MAX);
    }
    ord_ty(ty, g).expect("prime towers have no zero divisors")
}

/// `Σ_P e_P f_P w_P(g(θ)) = ord_p Res(f, g)` over the leaves of the classical tree at `p`;
/// `None` when some leaf's residual of `g` is divisible by its `t`, so the value is only a bound.
pub fn resultant_valuation_check(f: &IntPoly, g: &IntPoly, p: &BigInt, seed: u64) -> Option<bool> {
    let rep = om_prime(f, p, seed);
    let mut total = 0i64;
    for leaf in rep.leaves() {
        let ty = &rep.nodes[leaf].ty;
        if residual_ord(ty, g) > 0 {
            return None;
        }
        let r = ty.order();
        total += ty.f_prod(r) * value(ty, r, g).expect("g is nonzero");
    }
    Some(ord_p(&resultant(f, g), p) == total)
}

/// `R_r(q_s)` is the suffix of `R_r(f)` starting at the first nonzero coefficient at
/// abscissa `≥ s`, for every `s` in the last component, at every level.
pub fn rquot_check(ty: &SFType, f: &IntPoly, bounds: &[usize]) -> Result<(), String> {
    let tower = ty.tower();
    for i in 1..=ty.order() {
        let info = analyze_upto(ty, i, f, Some(bounds[i - 1])).map_err(|e| format!("level {i}: {e:?}"))?;
        let e = ty.e(i) as usize;
        let exp = expand(f, ty.g(i), None);
        let coeffs = info.residual.coeffs();
        for s in info.s0 + 1..=info.s1 {
            let l = (0..coeffs.len()).find(|&j| info.s0 + j * e >= s && !coeffs[j].is_zero()).expect("last coefficient is a unit");
            let suffix = tower.poly(i, coeffs[l..].to_vec());
            let got = analyze_upto(ty, i, &exp.quotients[s], Some(bounds[i - 1] - s)).map_err(|e| format!("level {i}, s = {s}: {e:?}"))?;
            if got.residual != suffix {
                return Err(format!("level {i}, s = {s}: residual of the quotient is not the suffix"));
            }
        }
    }
    Ok(())
}

/// `N^{⌊n H_s⌋} | Res(f, q_s)` and, for each listed prime `p | N`,
/// `e_1⋯e_i · ord_p Res(f, q_s) ≥ n ρ v_i(q_s)` on the last component at every level.
pub fn denquot_check(ty: &SFType, f: &IntPoly, bounds: &[usize], primes: &[BigInt]) -> Result<(), String> {
    let n = ty.n();
    let deg = f.deg() as i64;
    for i in 1..=ty.order() {
        let info = analyze_upto(ty, i, f, Some(bounds[i - 1])).map_err(|e| format!("level {i}: {e:?}"))?;
        let exp = expand(f, ty.g(i), None);
        let ep = ty.e_prod(i);
        for s in info.s0 + 1..=info.s1 {
            let q = &exp.quotients[s];
            let v = value(ty, i, q).expect("quotients are nonzero");
            let res = resultant(f, q);
            let k = Integer::div_floor(&(deg * v), &ep);
            if !(&res % num_traits::pow(n.clone(), k as usize)).is_zero() {
                return Err(format!("level {i}, s = {s}: N^{k} does not divide the resultant"));
            }
            for p in primes.iter().filter(|p| (n % *p).is_zero()) {
                let rho = ord_p(n, p);
                if ep * ord_p(&res, p) < deg * rho * v {
                    return Err(format!("level {i}, s = {s}, p = {p}: resultant valuation too small"));
                }
            }
        }
    }
    Ok(())
}

/// Summary of the comparison between the tree modulo `N` and the classical tree at `p | N`.
#[derive(Clone, Debug)]
pub struct ProjectReport {
    pub p_leaves: usize,
    /// `(e_P, f_P)` per classical leaf.
    pub profiles: Vec<(i64, i64)>,
    /// For each classical leaf, the index of the squarefree leaf group it lies under.
    pub assignment: Vec<usize>,
    pub problems: Vec<String>,
}

impl ProjectReport {
    pub fn ok(&self) -> bool {
        self.problems.is_empty()
    }
}

fn slopes_scale(s: &SFType, p: &SFType, rho: i64) -> bool {
    (1..=s.order()).all(|i| p.h(i) * s.e(i) == rho * s.h(i) * p.e(i))
}

fn t0_divides(s: &SFType, p: &SFType) -> bool {
    let fp = p.tower().truncate(1);
    let ts = fp.poly_from_int(&s.tower().poly_to_int(s.t(0)));
    fp.prem_monic(&ts, p.t(0)).is_zero()
}

fn block_size(ty: &SFType) -> i64 {
    ty.f(0) * (1..=ty.order()).map(|i| ty.e(i) * ty.f(i)).product::<i64>()
}

fn exact_cover(cands: &[Vec<usize>], sizes: &[i64], targets: &mut [i64], k: usize, out: &mut Vec<usize>) -> bool {
    if k == cands.len() {
        return targets.iter().all(|t| *t == 0);
    }
    for &s in &cands[k] {
        if targets[s] >= sizes[k] {
            targets[s] -= sizes[k];
            out.push(s);
            if exact_cover(cands, sizes, targets, k + 1, out) {
                return true;
            }
            out.pop();
            targets[s] += sizes[k];
        }
    }
    false
}

/// Compares the squarefree tree modulo `n` with the classical tree at a prime `p | n`:
/// slope scaling by `ρ = ord_p(n)`, `Σ e_P f_P = n`, and a partition of the classical
/// leaves under the squarefree leaf groups with block sizes `f_0 ∏ e_i f_i`.
pub fn project_check(f: &IntPoly, n: &BigInt, p: &BigInt, seed: u64) -> ProjectReport {
    let prep = om_prime(f, p, seed);
    let leaves = prep.leaves();
    let profiles: Vec<(i64, i64)> = leaves
        .iter()
        .map(|&l| {
            let ty = &prep.nodes[l].ty;
            (ty.e_prod(ty.order()), ty.f_prod(ty.order()))
        })
        .collect();
    let mut report = ProjectReport { p_leaves: leaves.len(), profiles, assignment: Vec::new(), problems: Vec::new() };
    let total: i64 = report.profiles.iter().map(|(e, f)| e * f).sum();
    if total != f.deg() as i64 {
        report.problems.push(format!("sum of e_P f_P is {total}, expected {}", f.deg()));
    }
    let rep = match sfom(f, n) {
        SplitOutcome::Rep(rep) => rep,
        SplitOutcome::Factor(d) => {
            report.problems.push(format!("modulus splits as {d}"));
            return report;
        }
    };
    let rho = ord_p(n, p);
    let groups = rep.leaf_groups();
    let cands: Vec<Vec<usize>> = leaves
        .iter()
        .map(|&l| {
            let pt = &prep.nodes[l].ty;
            (0..groups.len())
                .filter(|&g| {
                    let st = &groups[g].ty;
                    pt.order() >= st.order() && slopes_scale(st, pt, rho) && t0_divides(st, pt)
                })
                .collect()
        })
        .collect();
    let sizes: Vec<i64> = report.profiles.iter().map(|(e, f)| e * f).collect();
    let mut targets: Vec<i64> = groups.iter().map(|g| block_size(&g.ty)).collect();
    let mut out = Vec::new();
    if exact_cover(&cands, &sizes, &mut targets, 0, &mut out) {
        report.assignment = out;
    } else {
        report.problems.push("classical leaves do not partition under the squarefree leaves".into());
    }
    report
}

/// All leaf-level checks for a tree.
pub fn tree_checks(rep: &SFOMRep, primes: &[BigInt]) -> Vec<Check> {
    let mut out = Vec::new();
    for (k, g) in rep.leaf_groups().iter().enumerate() {
        if g.ty.order() == 0 {
            continue;
        }
        let name = format!("N = {}, leaf {k}", rep.n);
        let r = rquot_check(&g.ty, &rep.f, &g.bounds);
        out.push(Check::new(format!("residual of quotients ({name})"), r.is_ok(), r.err().unwrap_or_default()));
        let d = denquot_check(&g.ty, &rep.f, &g.bounds, primes);
        out.push(Check::new(format!("quotient denominators ({name})"), d.is_ok(), d.err().unwrap_or_default()));
        let count: usize = level_quotients(&g.ty, &rep.f, &g.bounds).iter().map(Vec::len).product::<usize>() * g.ty.f(0) as usize;
        out.push(Check::new(
            format!("block size ({name})"),
            count as i64 == block_size(&g.ty),
            format!("{count} elements"),
        ));
    }
    out
}

fn small_prime_divisors(d: &BigInt) -> Vec<BigInt> {
    crate::intarith::small_primes(1 << 10)
        .into_iter()
        .map(BigInt::from)
        .filter(|p| (d % p).is_zero())
        .collect()
}

/// Full verification of the global basis of `f`, with p-maximality tested at the given
/// primes together with all small primes dividing the discriminant.
pub fn verify(f: &IntPoly, d: Option<&BigInt>, known_primes: &[BigInt], opts: Options) -> Vec<Check> {
    let disc = discriminant(f);
    let d = d.cloned().unwrap_or_else(|| disc.clone());
    let gb = global_basis(f, &d, opts);
    let l = &gb.merged;
    let mut out = Vec::new();
    let closed = ring_closed(l, f);
    out.push(Check::new("ring closure", closed, format!("den = {}", l.den())));
    if !closed {
        return out;
    }
    out.push(Check::new("index-discriminant identity", disc_identity(l, f), format!("index = {}", l.index())));
    let mut primes: Vec<BigInt> = known_primes.to_vec();
    primes.extend(small_prime_divisors(&disc));
    primes.sort();
    primes.dedup();
    for p in &primes {
        if !(&disc % p).is_zero() {
            continue;
        }
        out.push(Check::new(format!("{p}-maximal"), p_maximal(l, f, p), ""));
    }
    for m in &gb.moduli {
        let rep = if m.prime {
            om_prime(f, &m.n, opts.seed)
        } else {
            match sfom(f, &m.n).rep() {
                Some(rep) => rep,
                None => {
                    out.push(Check::new(format!("rerun at N = {}", m.n), false, "modulus split on rerun"));
                    continue;
                }
            }
        };
        out.extend(tree_checks(&rep, &primes));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    #[test]
    fn newton_sums() {
        // x^2 + 1: traces 2, 0, -2, 0
        assert_eq!(power_traces(&IntPoly::from_i64(&[1, 0, 1]), 4), vec![b(2), b(0), b(-2), b(0)]);
        // x^3 - 2: traces 3, 0, 0, 6, 0
        assert_eq!(power_traces(&IntPoly::from_i64(&[-2, 0, 0, 1]), 5), vec![b(3), b(0), b(0), b(6), b(0)]);
    }

    #[test]
    fn power_basis_of_gaussian_integers_is_maximal() {
        let f = IntPoly::from_i64(&[1, 0, 1]);
        let z = IntegerLattice::power_basis(2);
        assert!(ring_closed(&z, &f));
        assert!(disc_identity(&z, &f));
        assert!(p_maximal(&z, &f, &b(3)));
        assert!(p_maximal(&z, &f, &b(2)));
    }

    #[test]
    fn nonmaximal_quadratic_order() {
        // Z[√-27] has index 6 in Z[(1+√-3)/2]
        let f = IntPoly::from_i64(&[27, 0, 1]);
        let z = IntegerLattice::power_basis(2);
        assert!(!p_maximal(&z, &f, &b(3)));
        let bigger = multiplier_ring(&z, &f, &b(3));
        assert_eq!(bigger.index(), Rational::from_integer(b(3)));
        assert!(p_maximal(&bigger, &f, &b(3)));
        assert!(!p_maximal(&bigger, &f, &b(2)));
        let best = multiplier_ring(&bigger, &f, &b(2));
        assert!(p_maximal(&best, &f, &b(2)) && p_maximal(&best, &f, &b(3)));
        assert_eq!(best.index(), Rational::from_integer(b(6)));
    }

    #[test]
    fn example_one_resultant_valuation() {
        let f = families::quartic(&b(35));
        let g = IntPoly::from_i64(&[35, 0, 1]);
        assert_eq!(ord_p(&resultant(&f, &g), &b(5)), 7);
        assert_eq!(resultant_valuation_check(&f, &g, &b(5), 0), Some(true));
        assert_eq!(resultant_valuation_check(&f, &IntPoly::one(), &b(5), 0), Some(true));
        assert_eq!(resultant_valuation_check(&f, &IntPoly::constant(b(35)), &b(7), 0), Some(true));
    }

    #[test]
    fn example_one_projection() {
        let f = families::quartic(&b(35));
        for p in [5, 7] {
            let r = project_check(&f, &b(35), &b(p), 0);
            assert!(r.ok(), "{:?}", r.problems);
            assert_eq!(r.profiles, vec![(4, 1)]);
        }
    }

    #[test]
    fn example_one_tree_checks() {
        let f = families::quartic(&b(35));
        let rep = sfom(&f, &b(35)).rep().unwrap();
        let checks = tree_checks(&rep, &[b(5), b(7)]);
        assert!(!checks.is_empty());
        assert!(checks.iter().all(|c| c.ok), "{checks:?}");
    }

    #[test]
    fn left_kernel() {
        let rows = vec![vec![b(1), b(2)], vec![b(2), b(4)], vec![b(0), b(1)]];
        let k = left_kernel_mod(&rows, &b(5));
        assert_eq!(k, vec![vec![b(3), b(1), b(0)]]);
    }
}
