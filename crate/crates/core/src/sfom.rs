//! The tree of types of `f` modulo `N`: squarefree-driven over artinian towers, or
//! the classical irreducible-factor version when `N` is prime.
//!
//! A detected factor of `N` aborts the run; a detected factor of a modulus `t_i`
//! replaces the order-`i` node owning it by two nodes and rebuilds below them.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::artinalg::{AResult, AlgebraTower, FactorEvent, PolyA};
use crate::ffactor;
use crate::polygon::NewtonPolygon;
use crate::poly::IntPoly;
use crate::sftypes::{component, newton, representative, SFType};

/// How residual polynomials are decomposed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Squarefree decomposition over the tower (any `N`).
    SquareFree,
    /// Irreducible factorization (`N` prime); the seed drives equal-degree splitting.
    Prime { seed: u64 },
}

/// Identifies the side a node comes from: `(parent, side index)`, or the roots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Origin {
    Root,
    Side { parent: usize, index: usize },
}

#[derive(Clone, Debug)]
pub struct Node {
    pub parent: Option<usize>,
    /// Type of order `r`; the node's own modulus is `t_r`.
    pub ty: SFType,
    /// `ord_ty(f)`.
    pub omega: usize,
    /// `R_r(f)` over `A_r` (for roots, `f mod N`), the polynomial `t_r` was taken from.
    pub residual: PolyA,
    pub origin: Origin,
    pub children: Vec<usize>,
    pub alive: bool,
    pub leaf: bool,
    /// Polygon of `f` in the node's representative, once expanded.
    pub polygon: Option<NewtonPolygon>,
    pub representative: Option<IntPoly>,
}

/// Leaves coming from the same side (or all order-zero leaves), merged: the top
/// modulus of `ty` is the product of the members' top moduli.
#[derive(Clone, Debug)]
pub struct LeafGroup {
    pub ty: SFType,
    pub origin: Origin,
    pub members: Vec<usize>,
    /// `ω` of the ancestors of order `0..r`: level `i` of the leaf only involves the
    /// first `bounds[i-1] + 1` expansion coefficients of `f`.
    pub bounds: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct SFOMRep {
    pub f: IntPoly,
    pub n: BigInt,
    pub mode: Mode,
    pub nodes: Vec<Node>,
    pub roots: Vec<usize>,
}

#[derive(Clone, Debug)]
pub enum SplitOutcome {
    Rep(SFOMRep),
    Factor(BigInt),
}

impl SplitOutcome {
    pub fn rep(self) -> Option<SFOMRep> {
        match self {
            SplitOutcome::Rep(r) => Some(r),
            SplitOutcome::Factor(_) => None,
        }
    }
}

/// Upper bound on node expansions; reaching it means a bug.
const MAX_STEPS: usize = 1_000_000;

/// Runs the squarefree version modulo `N`.
pub fn sfom(f: &IntPoly, n: &BigInt) -> SplitOutcome {
    run(f, n, Mode::SquareFree)
}

pub fn run(f: &IntPoly, n: &BigInt, mode: Mode) -> SplitOutcome {
    run_ordered(f, n, mode, None)
}

/// `order_seed` replaces depth-first extraction by a seeded random choice from the worklist.
fn run_ordered(f: &IntPoly, n: &BigInt, mode: Mode, order_seed: Option<u64>) -> SplitOutcome {
    assert!(f.is_monic() && f.deg() >= 2, "input must be monic of degree at least 2");
    let mut engine = Engine {
        rep: SFOMRep { f: f.clone(), n: n.clone(), mode, nodes: Vec::new(), roots: Vec::new() },
        stack: Vec::new(),
        rng: ChaCha8Rng::seed_from_u64(match mode {
            Mode::Prime { seed } => seed,
            Mode::SquareFree => 0,
        }),
        order: order_seed.map(ChaCha8Rng::seed_from_u64),
    };
    match engine.execute() {
        Ok(()) => SplitOutcome::Rep(engine.rep),
        Err(d) => SplitOutcome::Factor(d),
    }
}

struct Engine {
    rep: SFOMRep,
    stack: Vec<usize>,
    rng: ChaCha8Rng,
    order: Option<ChaCha8Rng>,
}

struct Child {
    ty: SFType,
    omega: usize,
    residual: PolyA,
    origin: Origin,
}

impl Engine {
    fn decompose(&mut self, tower: &AlgebraTower, r: &PolyA) -> AResult<Vec<(PolyA, usize)>> {
        match self.rep.mode {
            Mode::SquareFree => tower.sfd(r),
            Mode::Prime { .. } => Ok(ffactor::factor(tower, r, &mut self.rng)),
        }
    }

    fn execute(&mut self) -> Result<(), BigInt> {
        let n = self.rep.n.clone();
        let base = AlgebraTower::new(n.clone());
        let r0 = base.poly_from_int(&self.rep.f);
        let factors = match self.decompose(&base, &r0) {
            Ok(v) => v,
            Err(FactorEvent::Integer(d)) => return Err(d),
            Err(ev) => unreachable!("no moduli at the base level: {ev:?}"),
        };
        let roots: Vec<Child> = factors
            .into_iter()
            .map(|(t, l)| Child {
                ty: SFType::order_zero(&n, &t),
                omega: l,
                residual: r0.clone(),
                origin: Origin::Root,
            })
            .collect();
        for c in roots {
            let id = self.add(None, c);
            self.rep.roots.push(id);
        }
        let mut steps = 0;
        while let Some(x) = self.next_node() {
            if !self.rep.nodes[x].alive {
                continue;
            }
            steps += 1;
            assert!(steps < MAX_STEPS, "type tree did not terminate");
            match self.expand(x) {
                Ok((g, poly, children)) => {
                    let node = &mut self.rep.nodes[x];
                    node.representative = Some(g);
                    node.polygon = Some(poly);
                    let ids: Vec<usize> = children.into_iter().map(|c| self.add(Some(x), c)).collect();
                    self.rep.nodes[x].children = ids;
                }
                Err(ev) => self.handle(x, ev)?,
            }
        }
        Ok(())
    }

    fn next_node(&mut self) -> Option<usize> {
        match &mut self.order {
            Some(r) if !self.stack.is_empty() => {
                let k = r.gen_range(0..self.stack.len());
                Some(self.stack.swap_remove(k))
            }
            _ => self.stack.pop(),
        }
    }

    fn add(&mut self, parent: Option<usize>, c: Child) -> usize {
        let id = self.rep.nodes.len();
        let leaf = c.omega == 1;
        self.rep.nodes.push(Node {
            parent,
            ty: c.ty,
            omega: c.omega,
            residual: c.residual,
            origin: c.origin,
            children: Vec::new(),
            alive: true,
            leaf,
            polygon: None,
            representative: None,
        });
        if !leaf {
            self.stack.push(id);
        }
        id
    }

    /// Representative, Newton polygon of `f`, and the children of node `x`.
    fn expand(&mut self, x: usize) -> AResult<(IntPoly, NewtonPolygon, Vec<Child>)> {
        let ty = self.rep.nodes[x].ty.clone();
        let omega = self.rep.nodes[x].omega;
        let f = self.rep.f.clone();
        let r = ty.order();
        let g = representative(&ty)?;
        let (poly, pts) = newton(&ty, &g, omega, &f)?;
        debug_assert_eq!(poly.principal_length(), omega, "principal polygon length must equal ord");
        let mut children = Vec::new();
        for (index, side) in poly.sides().iter().enumerate() {
            let info = component(ty.tower(), r + 1, &pts, side.h, side.e);
            debug_assert_eq!((info.s0, info.s1), (side.start.0, side.end.0));
            for (t, l) in self.decompose(ty.tower(), &info.residual)? {
                children.push(Child {
                    ty: ty.push(g.clone(), side.h, side.e, &t),
                    omega: l,
                    residual: info.residual.clone(),
                    origin: Origin::Side { parent: x, index },
                });
            }
        }
        Ok((g, poly, children))
    }

    fn handle(&mut self, mut x: usize, mut ev: FactorEvent) -> Result<(), BigInt> {
        loop {
            match ev {
                FactorEvent::Integer(d) => return Err(d),
                FactorEvent::Modulus { level, factor } => {
                    let y = self.ancestor(x, level);
                    match self.refine(y, &factor) {
                        Ok(()) => return Ok(()),
                        Err(next) => {
                            x = y;
                            ev = next;
                        }
                    }
                }
            }
        }
    }

    fn ancestor(&self, mut x: usize, order: usize) -> usize {
        while self.rep.nodes[x].ty.order() > order {
            x = self.rep.nodes[x].parent.expect("ancestor of the requested order exists");
        }
        assert_eq!(self.rep.nodes[x].ty.order(), order);
        x
    }

    /// Replaces node `y` (modulus `t`) by the nodes for `φ` and `t/φ`.
    fn refine(&mut self, y: usize, phi: &PolyA) -> AResult<()> {
        let node = self.rep.nodes[y].clone();
        let r = node.ty.order();
        let tower = node.ty.tower();
        let t = node.ty.t(r);
        let psi = tower.exact_divide(t, phi).expect("event factor divides its modulus");
        let ty_phi = node.ty.with_top_modulus(phi)?;
        let ty_psi = node.ty.with_top_modulus(&psi)?;
        self.kill(y);
        let mut ids = Vec::new();
        for ty in [ty_phi, ty_psi] {
            let top = ty.t(r).clone();
            let omega = ty.tower().ord_t(&node.residual, &top).expect("residual is nonzero");
            assert!(omega >= node.omega, "refined modulus lost multiplicity");
            let c = Child { ty, omega, residual: node.residual.clone(), origin: node.origin };
            ids.push(self.add(node.parent, c));
        }
        let list = match node.parent {
            Some(p) => &mut self.rep.nodes[p].children,
            None => &mut self.rep.roots,
        };
        let pos = list.iter().position(|&c| c == y).expect("node is listed under its parent");
        list.splice(pos..=pos, ids);
        Ok(())
    }

    fn kill(&mut self, y: usize) {
        let mut todo = vec![y];
        while let Some(z) = todo.pop() {
            self.rep.nodes[z].alive = false;
            todo.extend(self.rep.nodes[z].children.iter().copied());
        }
    }
}

impl SFOMRep {
    pub fn leaves(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].alive && self.nodes[i].leaf).collect()
    }

    /// Leaves grouped by originating side, in a deterministic order.
    pub fn leaf_groups(&self) -> Vec<LeafGroup> {
        let mut groups: Vec<LeafGroup> = Vec::new();
        for id in self.leaves() {
            let node = &self.nodes[id];
            match groups.iter_mut().find(|g| g.origin == node.origin) {
                Some(g) => g.members.push(id),
                None => groups.push(LeafGroup {
                    ty: node.ty.clone(),
                    origin: node.origin,
                    members: vec![id],
                    bounds: self.ancestor_omegas(id),
                }),
            }
        }
        for g in &mut groups {
            if g.members.len() > 1 {
                let r = g.ty.order();
                let tower = self.nodes[g.members[0]].ty.tower();
                let prod = g.members[1..].iter().fold(tower.modulus(r).clone(), |acc, &m| {
                    tower.pmul(&acc, self.nodes[m].ty.t(r))
                });
                g.ty = g.ty.with_top_modulus_unchecked(&prod);
            }
        }
        groups
    }

    /// `ω` of the ancestors of node `id`, ordered by increasing order.
    pub fn ancestor_omegas(&self, id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut x = self.nodes[id].parent;
        while let Some(p) = x {
            out.push(self.nodes[p].omega);
            x = self.nodes[p].parent;
        }
        out.reverse();
        out
    }

    /// The merged order-zero leaf, if any.
    pub fn order_zero_leaf(&self) -> Option<LeafGroup> {
        self.leaf_groups().into_iter().find(|g| g.ty.order() == 0)
    }

    /// Whether some leaf has a level with `e_i > 1`.
    pub fn is_ramified(&self) -> bool {
        self.leaves().iter().any(|&l| self.nodes[l].ty.is_ramified())
    }

    fn node_json(&self, id: usize) -> Value {
        let node = &self.nodes[id];
        let ty = &node.ty;
        let r = ty.order();
        let mut obj = serde_json::Map::new();
        obj.insert("level".into(), json!(r));
        obj.insert("t".into(), ty.t(r).to_json(ty.tower()));
        if r > 0 {
            let lv = ty.level(r);
            obj.insert("g".into(), json!(lv.g.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>()));
            obj.insert("lambda".into(), json!([lv.h, lv.e]));
            obj.insert("V".into(), json!(lv.vcap));
        }
        obj.insert("omega".into(), json!(node.omega));
        obj.insert("leaf".into(), json!(node.leaf));
        if !node.children.is_empty() {
            let kids: Vec<Value> = node.children.iter().map(|&c| self.node_json(c)).collect();
            obj.insert("children".into(), Value::Array(kids));
        }
        Value::Object(obj)
    }

    /// Serialized tree.
    pub fn to_json(&self) -> Value {
        let mut obj = serde_json::Map::new();
        obj.insert("f".into(), json!(self.f.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>()));
        obj.insert("N".into(), json!(self.n.to_string()));
        if let Mode::Prime { .. } = self.mode {
            obj.insert("prime".into(), json!(self.n.to_string()));
        }
        obj.insert("roots".into(), Value::Array(self.roots.iter().map(|&r| self.node_json(r)).collect()));
        Value::Object(obj)
    }

    /// Polygon of `f` at a node of the given order along the first branch reaching it.
    pub fn polygon_at_level(&self, level: usize) -> Option<&NewtonPolygon> {
        self.nodes
            .iter()
            .filter(|n| n.alive && n.ty.order() + 1 == level)
            .find_map(|n| n.polygon.as_ref())
    }
}

/// Classical run at a prime `p`.
pub fn om_prime(f: &IntPoly, p: &BigInt, seed: u64) -> SFOMRep {
    match run(f, p, Mode::Prime { seed }) {
        SplitOutcome::Rep(r) => r,
        SplitOutcome::Factor(d) => panic!("prime modulus {p} split as {d}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_one() -> IntPoly {
        IntPoly::from_i64(&[1225, 1457750, 70, 0, 1])
    }

    #[test]
    fn example_one_tree() {
        let rep = sfom(&example_one(), &BigInt::from(35)).rep().unwrap();
        let leaves = rep.leaves();
        assert_eq!(leaves.len(), 1);
        let ty = &rep.nodes[leaves[0]].ty;
        assert_eq!(ty.order(), 2);
        let tw = ty.tower();
        assert_eq!(ty.t(0), &tw.poly_from_i64(0, &[0, 1]));
        assert_eq!((ty.h(1), ty.e(1)), (1, 2));
        assert_eq!(ty.t(1), &tw.poly_from_i64(1, &[1, 1]));
        assert_eq!((ty.h(2), ty.e(2)), (3, 2));
        assert_eq!(ty.t(2), &tw.poly_from_i64(2, &[1, 1]));
        assert_eq!(ty.g(2), &IntPoly::from_i64(&[35, 0, 1]));
        assert_eq!(rep.polygon_at_level(1).unwrap().vertices(), &[(0, 2), (4, 0)]);
        assert_eq!(rep.polygon_at_level(2).unwrap().vertices(), &[(0, 7), (2, 4)]);
    }

    fn leaf_types(out: SplitOutcome) -> Vec<String> {
        let rep = out.rep().expect("no split");
        let mut v: Vec<String> = rep.leaves().iter().map(|&l| rep.nodes[l].ty.to_json().to_string()).collect();
        v.sort();
        v
    }

    #[test]
    fn worklist_order_does_not_change_leaves() {
        let cases = [
            (example_one(), BigInt::from(35)),
            (crate::families::phi_power_family(3, &BigInt::from(1517)), BigInt::from(1517)),
            (crate::families::product_of_quadratics(&BigInt::from(143), 2, 4), BigInt::from(143)),
            (IntPoly::from_i64(&[8, 9, -15, -9, 12, -8, 1]), BigInt::from(43u64 * 2988914329)),
        ];
        for (f, n) in cases {
            let base = leaf_types(run(&f, &n, Mode::SquareFree));
            for seed in 0..5 {
                assert_eq!(leaf_types(run_ordered(&f, &n, Mode::SquareFree, Some(seed))), base);
            }
        }
    }

    #[test]
    fn squarefree_reduction_gives_order_zero_leaf() {
        let rep = sfom(&IntPoly::from_i64(&[1, 0, 1]), &BigInt::from(35)).rep().unwrap();
        let leaves = rep.leaves();
        assert_eq!(leaves.len(), 1);
        assert_eq!(rep.nodes[leaves[0]].ty.order(), 0);
        assert_eq!(rep.nodes[leaves[0]].ty.f(0), 2);
    }

    #[test]
    fn prime_mode_on_x2_plus_1_at_2() {
        let rep = om_prime(&IntPoly::from_i64(&[1, 0, 1]), &BigInt::from(2), 1);
        let leaves = rep.leaves();
        assert_eq!(leaves.len(), 1);
        let ty = &rep.nodes[leaves[0]].ty;
        assert_eq!(ty.order(), 1);
        assert_eq!((ty.h(1), ty.e(1)), (1, 2));
        assert_eq!(ty.g(1), &IntPoly::from_i64(&[1, 1]));
    }

    #[test]
    fn mixed_exponents_split_the_modulus() {
        // f = (x-1)^2 mod 5 but (x-1)(x+1) mod 7
        let f = IntPoly::from_i64(&[6 + 35, -7, 1]);
        match sfom(&f, &BigInt::from(35)) {
            SplitOutcome::Factor(d) => assert!(d == BigInt::from(5) || d == BigInt::from(7)),
            SplitOutcome::Rep(_) => panic!("expected a factor of 35"),
        }
    }
}
