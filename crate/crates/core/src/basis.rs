//! Local integral bases from SF-OM trees, and the global driver that patches them.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::artinalg::PolyA;
use crate::intarith::{coprime_splitting, int_sfd, ord_p, small_primes};
use crate::lattice::IntegerLattice;
use crate::poly::IntPoly;
use crate::sfom::{om_prime, sfom, Mode, SFOMRep, SplitOutcome};
use crate::sftypes::{analyze_upto, expand, lift_order_zero, value, SFType};

/// Where a basis element came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// `θ^power · q` for the order-zero leaf.
    OrderZero { power: usize },
    /// Multi-index `(j_0, …, j_r)` of the leaf group `group`.
    Leaf { group: usize, index: Vec<usize> },
}

/// `num(θ) / N^den_exp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisElement {
    pub num: IntPoly,
    pub den_exp: u32,
    pub provenance: Provenance,
}

impl BasisElement {
    pub fn to_json(&self) -> Value {
        json!({
            "num": self.num.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "den_exp": self.den_exp,
        })
    }
}

#[derive(Clone, Copy, Debug, Error, PartialEq, Eq)]
#[error("the tree has ramified leaves and the modulus is not known to be squarefree")]
pub struct NeedsSquarefree;

/// Quotient `q_{i,j}` of `f` used at level `i`, with `v_i(q_{i,j})` rescaled to `e_1⋯e_r`.
#[derive(Clone, Debug)]
pub struct LevelQuotient {
    pub q: IntPoly,
    /// Index `s` with `q = s`-th `g_i`-quotient of `f`.
    pub s: usize,
    pub weight: i64,
}

/// Quotient data `q_{i,j}` for `0 ≤ j < e_i f_i`, one list per level `1..=r`; `bounds` as in
/// [`LeafGroup::bounds`].
pub fn level_quotients(ty: &SFType, f: &IntPoly, bounds: &[usize]) -> Vec<Vec<LevelQuotient>> {
    let r = ty.order();
    let e_top = ty.e_prod(r);
    (1..=r)
        .map(|i| {
            let exp = expand(f, ty.g(i), None);
            let sd = analyze_upto(ty, i, f, Some(bounds[i - 1])).expect("leaf data is certified").s1;
            let count = (ty.e(i) * ty.f(i)) as usize;
            assert!(count <= sd, "component shorter than e_i f_i");
            let scale = e_top / ty.e_prod(i);
            (0..count)
                .map(|j| {
                    let q = exp.quotients[sd - j].clone();
                    let v = value(ty, i, &q).expect("quotients of f are nonzero");
                    LevelQuotient { q, s: sd - j, weight: v * scale }
                })
                .collect()
        })
        .collect()
}

/// Basis elements `θ^{j_0} q_{1,j_1}(θ)⋯q_{r,j_r}(θ) / N^{⌊H_{1,j_1}+⋯+H_{r,j_r}⌋}` of a terminal leaf.
pub fn terminal_basis(ty: &SFType, f: &IntPoly, bounds: &[usize], group: usize) -> Vec<BasisElement> {
    let r = ty.order();
    assert!(r >= 1, "terminal leaves have positive order");
    let e_top = ty.e_prod(r);
    let levels = level_quotients(ty, f, bounds);
    // partial products over levels 1..=i, as (numerator mod f, weight, indices)
    let mut partial: Vec<(IntPoly, i64, Vec<usize>)> = vec![(IntPoly::one(), 0, Vec::new())];
    for qs in &levels {
        let mut next = Vec::with_capacity(partial.len() * qs.len());
        for (p, w, idx) in &partial {
            for (j, lq) in qs.iter().enumerate() {
                let mut idx = idx.clone();
                idx.push(j);
                next.push((p.mul(&lq.q).rem_monic(f), w + lq.weight, idx));
            }
        }
        partial = next;
    }
    let mut out = Vec::new();
    for j0 in 0..ty.f(0) as usize {
        for (p, w, idx) in &partial {
            let mut index = vec![j0];
            index.extend(idx);
            out.push(BasisElement {
                num: p.shift(j0).rem_monic(f),
                den_exp: w.div_floor(&e_top) as u32,
                provenance: Provenance::Leaf { group, index },
            });
        }
    }
    out
}

/// `{θ^k q(θ) : k < deg t}` where `f = q·g + a` and `g` lifts `t`.
pub fn order_zero_basis(tower_n: &BigInt, t: &PolyA, f: &IntPoly) -> Vec<BasisElement> {
    let tower = crate::artinalg::AlgebraTower::new(tower_n.clone());
    let g = lift_order_zero(&tower, t);
    let (q, _) = f.divrem_monic(&g);
    (0..g.deg())
        .map(|k| BasisElement { num: q.shift(k).rem_monic(f), den_exp: 0, provenance: Provenance::OrderZero { power: k } })
        .collect()
}

/// Whether `N` is squarefree as far as the integer routines can tell.
pub fn known_squarefree(rep: &SFOMRep) -> bool {
    matches!(rep.mode, Mode::Prime { .. }) || int_sfd(&rep.n).iter().all(|(_, l)| *l == 1)
}

/// The `N`-integral basis of a tree: order-zero block plus one block per terminal leaf group.
pub fn n_integral_basis(rep: &SFOMRep) -> Result<Vec<BasisElement>, NeedsSquarefree> {
    if rep.is_ramified() && !known_squarefree(rep) {
        return Err(NeedsSquarefree);
    }
    let mut out = Vec::new();
    for (k, group) in rep.leaf_groups().iter().enumerate() {
        if group.ty.order() == 0 {
            out.extend(order_zero_basis(&rep.n, group.ty.t(0), &rep.f));
        } else {
            out.extend(terminal_basis(&group.ty, &rep.f, &group.bounds, k));
        }
    }
    assert_eq!(out.len(), rep.f.deg(), "basis size differs from the degree");
    Ok(out)
}

/// Lattice spanned by a basis with denominators powers of `n`.
pub fn basis_lattice(degree: usize, n: &BigInt, basis: &[BasisElement]) -> IntegerLattice {
    let elems: Vec<(IntPoly, BigInt)> =
        basis.iter().map(|b| (b.num.clone(), num_traits::pow(n.clone(), b.den_exp as usize))).collect();
    IntegerLattice::from_elements(degree, &elems)
}

/// HNF of `Z[θ]` plus all given lattices.
pub fn hnf_merge(degree: usize, lattices: &[IntegerLattice], include_power_basis: bool) -> IntegerLattice {
    IntegerLattice::merge(degree, lattices, include_power_basis)
}

/// Integral basis local at the primes dividing `n`.
#[derive(Clone, Debug)]
pub struct LocalBasis {
    pub n: BigInt,
    /// Produced by the classical prime run rather than the squarefree one.
    pub prime: bool,
    pub basis: Vec<BasisElement>,
}

impl LocalBasis {
    pub fn lattice(&self, degree: usize) -> IntegerLattice {
        basis_lattice(degree, &self.n, &self.basis)
    }
}

#[derive(Clone, Debug)]
pub struct GlobalBasis {
    pub f: IntPoly,
    pub d: BigInt,
    pub moduli: Vec<LocalBasis>,
    pub merged: IntegerLattice,
}

impl GlobalBasis {
    pub fn to_json(&self, merged_only: bool) -> Value {
        let mut obj = serde_json::Map::new();
        obj.insert("f".into(), json!(self.f.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>()));
        obj.insert("D".into(), json!(self.d.to_string()));
        if !merged_only {
            let moduli: Vec<Value> = self
                .moduli
                .iter()
                .map(|m| {
                    json!({
                        "N": m.n.to_string(),
                        "basis": m.basis.iter().map(BasisElement::to_json).collect::<Vec<_>>(),
                    })
                })
                .collect();
            obj.insert("moduli".into(), Value::Array(moduli));
        }
        obj.insert("global".into(), self.merged.to_json());
        Value::Object(obj)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub seed: u64,
    pub threads: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { seed: 0, threads: 1 }
    }
}

enum Step {
    Split(Vec<BigInt>),
    Done(LocalBasis),
}

fn process(f: &IntPoly, n: &BigInt) -> Step {
    match sfom(f, n) {
        SplitOutcome::Factor(d) => Step::Split(coprime_splitting(&d, n)),
        SplitOutcome::Rep(rep) => match n_integral_basis(&rep) {
            Ok(basis) => Step::Done(LocalBasis { n: n.clone(), prime: false, basis }),
            Err(NeedsSquarefree) => {
                let parts = int_sfd(n);
                assert!(parts.iter().any(|(_, l)| *l > 1));
                Step::Split(parts.into_iter().map(|(d, _)| d).collect())
            }
        },
    }
}

fn process_all(f: &IntPoly, batch: &[BigInt], threads: usize) -> Vec<Step> {
    if threads <= 1 || batch.len() <= 1 {
        return batch.iter().map(|n| process(f, n)).collect();
    }
    let chunk = batch.len().div_ceil(threads);
    std::thread::scope(|s| {
        let handles: Vec<_> = batch
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(|n| process(f, n)).collect::<Vec<_>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

/// Global integral basis from `f` and a multiple `d` of the index-relevant discriminant part.
pub fn global_basis(f: &IntPoly, d: &BigInt, opts: Options) -> GlobalBasis {
    let degree = f.deg();
    assert!(degree > 1 && f.is_monic(), "global_basis needs a monic polynomial of degree > 1");
    assert!(!d.is_zero(), "D must be nonzero");
    let mut moduli = Vec::new();
    let mut rest = d.abs();
    for p in small_primes(degree as u64) {
        let p = BigInt::from(p);
        if ord_p(d, &p) > 1 {
            let rep = om_prime(f, &p, opts.seed);
            let basis = n_integral_basis(&rep).expect("prime moduli are squarefree");
            moduli.push(LocalBasis { n: p.clone(), prime: true, basis });
        }
        while (&rest % &p).is_zero() {
            rest /= &p;
        }
    }
    let mut pending: VecDeque<BigInt> = VecDeque::new();
    if rest > BigInt::one() {
        pending.push_back(rest);
    }
    let mut found = Vec::new();
    while !pending.is_empty() {
        let batch: Vec<BigInt> = pending.drain(..).collect();
        for step in process_all(f, &batch, opts.threads) {
            match step {
                Step::Split(parts) => pending.extend(parts.into_iter().filter(|x| x > &BigInt::one())),
                Step::Done(local) => found.push(local),
            }
        }
    }
    found.sort_by(|a, b| a.n.cmp(&b.n));
    moduli.extend(found);
    let lattices: Vec<IntegerLattice> = moduli.iter().map(|m| m.lattice(degree)).collect();
    let merged = hnf_merge(degree, &lattices, true);
    GlobalBasis { f: f.clone(), d: d.clone(), moduli, merged }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;
    use crate::intarith::discriminant;
    use crate::sfom::sfom;
    use crate::sftypes::analyze;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn elems(n: &BigInt, v: &[(&[i64], u32)]) -> Vec<(IntPoly, BigInt)> {
        v.iter().map(|(c, k)| (IntPoly::from_i64(c), num_traits::pow(n.clone(), *k as usize))).collect()
    }

    #[test]
    fn example_one_local_basis() {
        let n = b(35);
        let f = families::quartic(&n);
        let rep = sfom(&f, &n).rep().unwrap();
        let basis = n_integral_basis(&rep).unwrap();
        let got: Vec<(IntPoly, u32)> = basis.iter().map(|e| (e.num.clone(), e.den_exp)).collect();
        assert_eq!(
            got,
            vec![
                (IntPoly::from_i64(&[1]), 0),
                (IntPoly::from_i64(&[35, 0, 1]), 1),
                (IntPoly::from_i64(&[0, 1]), 0),
                (IntPoly::from_i64(&[0, 35, 0, 1]), 2),
            ]
        );
        let expected = IntegerLattice::from_elements(4, &elems(&n, &[(&[1], 0), (&[0, 1], 0), (&[0, 0, 1], 1), (&[0, 35, 0, 1], 2)]));
        assert_eq!(basis_lattice(4, &n, &basis), expected);
    }

    #[test]
    fn order_zero_examples() {
        let n = b(35);
        let f = IntPoly::from_i64(&[1, 0, 1]);
        let rep = sfom(&f, &n).rep().unwrap();
        let basis = n_integral_basis(&rep).unwrap();
        assert_eq!(basis_lattice(2, &n, &basis), IntegerLattice::power_basis(2));
        // t = y, g = x: q = (f - f(0)) / x
        let f = IntPoly::from_i64(&[35, 3, 0, 1]);
        let tw = crate::artinalg::AlgebraTower::new(n.clone());
        let got = order_zero_basis(&n, &tw.poly_from_i64(0, &[0, 1]), &f);
        assert_eq!(got.len(), 1);
        assert_eq!(got[0].num, IntPoly::from_i64(&[3, 0, 1]));
    }

    #[test]
    fn ramified_tree_at_square_modulus_needs_squarefree() {
        // x^2 - 150 at 75 = 3·5^2: one node of slope 1/2
        let f = IntPoly::from_i64(&[-150, 0, 1]);
        let rep = sfom(&f, &b(75)).rep().expect("no factor of 75 is exposed");
        assert!(rep.is_ramified());
        assert_eq!(n_integral_basis(&rep), Err(NeedsSquarefree));
    }

    #[test]
    fn leaves_ignore_coefficients_past_the_principal_part() {
        // a_s for s > ω is divisible by 43 only; the full level-1 cloud is not robust
        let f = IntPoly::from_i64(&[8, 9, -15, -9, 12, -8, 1]);
        let n = b(43) * b(2988914329);
        let rep = sfom(&f, &n).rep().expect("no split");
        let group = rep.leaf_groups().into_iter().find(|g| g.ty.order() == 1).expect("order-1 leaf");
        assert!(analyze(&group.ty, 1, &f).is_err());
        assert_eq!(group.bounds, vec![2]);
        assert_eq!(n_integral_basis(&rep).unwrap().len(), 6);
    }

    #[test]
    fn global_basis_of_gaussian_integers() {
        let f = IntPoly::from_i64(&[1, 0, 1]);
        let g = global_basis(&f, &discriminant(&f), Options::default());
        assert_eq!(g.merged, IntegerLattice::power_basis(2));
    }

    #[test]
    fn global_basis_of_example_one() {
        let n = b(35);
        let f = families::quartic(&n);
        let g = global_basis(&f, &discriminant(&f), Options::default());
        let local = IntegerLattice::from_elements(4, &elems(&n, &[(&[1], 0), (&[0, 1], 0), (&[0, 0, 1], 1), (&[0, 35, 0, 1], 2)]));
        assert!(g.merged.contains_lattice(&local));
        let threaded = global_basis(&f, &discriminant(&f), Options { seed: 0, threads: 4 });
        assert_eq!(threaded.merged, g.merged);
    }

    #[test]
    fn quadratic_with_nonmonogenic_order() {
        // x^2 - 45: Z[√45] has index 3·2 in the maximal order Z[(1+√5)/2]
        let f = IntPoly::from_i64(&[-45, 0, 1]);
        let g = global_basis(&f, &discriminant(&f), Options::default());
        assert_eq!(g.merged.index(), crate::intarith::Rational::from_integer(b(6)));
    }
}
