//! The group `G~ = {(A, C) : A ∈ M_2(F_2), tr A = 0, C ∈ GL_2(F_2)}` with
//! `(A, C)(B, D) = (A + C B C^-1, C D)`, and an explicit comparison with
//! `S_4 x C_2`.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};

/// 2x2 matrix over `F_2`, entries `[a, b, c, d]` for `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct M2([u8; 4]);

impl M2 {
    pub const ZERO: M2 = M2([0, 0, 0, 0]);
    pub const ONE: M2 = M2([1, 0, 0, 1]);

    pub fn all() -> impl Iterator<Item = M2> {
        (0u8..16).map(|bits| M2([bits & 1, (bits >> 1) & 1, (bits >> 2) & 1, (bits >> 3) & 1]))
    }

    pub fn add(self, o: M2) -> M2 {
        M2(std::array::from_fn(|k| self.0[k] ^ o.0[k]))
    }

    pub fn mul(self, o: M2) -> M2 {
        let [a, b, c, d] = self.0;
        let [e, f, g, h] = o.0;
        M2([(a & e) ^ (b & g), (a & f) ^ (b & h), (c & e) ^ (d & g), (c & f) ^ (d & h)])
    }

    pub fn trace(self) -> u8 {
        self.0[0] ^ self.0[3]
    }

    pub fn det(self) -> u8 {
        (self.0[0] & self.0[3]) ^ (self.0[1] & self.0[2])
    }

    pub fn inverse(self) -> Option<M2> {
        // over F_2 the adjugate is [[d, b], [c, a]]
        (self.det() == 1).then(|| M2([self.0[3], self.0[1], self.0[2], self.0[0]]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem {
    pub a: M2,
    pub c: M2,
}

impl Elem {
    pub const IDENTITY: Elem = Elem { a: M2::ZERO, c: M2::ONE };

    pub fn mul(self, o: Elem) -> Elem {
        let c_inv = self.c.inverse().expect("second component is invertible");
        Elem { a: self.a.add(self.c.mul(o.a).mul(c_inv)), c: self.c.mul(o.c) }
    }

    /// `tr(AC) mod 2`.
    pub fn tau(self) -> u8 {
        self.a.mul(self.c).trace()
    }
}

pub fn elements() -> Vec<Elem> {
    let traceless: Vec<M2> = M2::all().filter(|m| m.trace() == 0).collect();
    let invertible: Vec<M2> = M2::all().filter(|m| m.det() == 1).collect();
    let mut out: Vec<Elem> = traceless.iter().flat_map(|&a| invertible.iter().map(move |&c| Elem { a, c })).collect();
    out.sort();
    out
}

/// Finite group given by a multiplication table on indices `0..n`.
pub struct Table {
    pub n: usize,
    pub identity: usize,
    mul: Vec<usize>,
}

impl Table {
    pub fn new<T: Copy + Eq + std::hash::Hash>(elems: &[T], op: impl Fn(T, T) -> T) -> Result<Table> {
        let index: HashMap<T, usize> = elems.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let n = elems.len();
        let mut mul = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                let prod = op(elems[i], elems[j]);
                mul[i * n + j] = *index
                    .get(&prod)
                    .ok_or_else(|| Error::PropertyFailure(format!("product of elements {i} and {j} leaves the set")))?;
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| mul[e * n + x] == x && mul[x * n + e] == x))
            .ok_or_else(|| Error::PropertyFailure("no identity element".into()))?;
        Ok(Table { n, identity, mul })
    }

    #[inline]
    pub fn op(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n + b]
    }

    pub fn check_axioms(&self) -> Result<()> {
        for a in 0..self.n {
            if !(0..self.n).any(|b| self.op(a, b) == self.identity) {
                return Err(Error::PropertyFailure(format!("element {a} has no inverse")));
            }
            for b in 0..self.n {
                for c in 0..self.n {
                    if self.op(self.op(a, b), c) != self.op(a, self.op(b, c)) {
                        return Err(Error::PropertyFailure(format!("associativity fails at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.op(x, a);
            k += 1;
        }
        k
    }

    pub fn order_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for a in 0..self.n {
            *h.entry(self.order(a)).or_insert(0) += 1;
        }
        h
    }

    /// Closure of `gens` under multiplication, as a breadth-first spanning
    /// tree: `(element, parent, generator index)`.
    fn span(&self, gens: &[usize]) -> Vec<(usize, usize, usize)> {
        let mut seen = vec![false; self.n];
        let mut order = vec![(self.identity, self.identity, usize::MAX)];
        seen[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for (k, &g) in gens.iter().enumerate() {
                let y = self.op(x, g);
                if !seen[y] {
                    seen[y] = true;
                    order.push((y, x, k));
                    queue.push_back(y);
                }
            }
        }
        order
    }
}

/// Searches for an isomorphism `source -> target` by choosing a generating
/// pair of `source` and trying every order-compatible image pair.
pub fn find_isomorphism(source: &Table, target: &Table) -> Option<Vec<usize>> {
    if source.n != target.n || source.order_histogram() != target.order_histogram() {
        return None;
    }
    let n = source.n;
    let gens = (0..n)
        .flat_map(|a| (0..n).map(move |b| [a, b]))
        .find(|g| source.span(g).len() == n)?;
    let tree = source.span(&gens);
    let (oa, ob) = (source.order(gens[0]), source.order(gens[1]));
    for ia in (0..n).filter(|&x| target.order(x) == oa) {
        for ib in (0..n).filter(|&x| target.order(x) == ob) {
            let images = [ia, ib];
            let mut phi = vec![usize::MAX; n];
            phi[source.identity] = target.identity;
            for &(y, parent, k) in tree.iter().skip(1) {
                phi[y] = target.op(phi[parent], images[k]);
            }
            let mut hit = vec![false; n];
            if phi.iter().any(|&v| std::mem::replace(&mut hit[v], true)) {
                continue;
            }
            if (0..n).all(|a| (0..n).all(|b| phi[source.op(a, b)] == target.op(phi[a], phi[b]))) {
                return Some(phi);
            }
        }
    }
    None
}

/// `S_4 x C_2` as pairs (permutation of four points, bit).
pub fn s4_times_c2() -> Table {
    let mut perms = Vec::new();
    for a in 0..4u8 {
        for b in 0..4u8 {
            for c in 0..4u8 {
                for d in 0..4u8 {
                    let p = [a, b, c, d];
                    if (0..4).all(|i| (i + 1..4).all(|j| p[i] != p[j])) {
                        perms.push(p);
                    }
                }
            }
        }
    }
    let elems: Vec<([u8; 4], u8)> = perms.iter().flat_map(|&p| [(p, 0u8), (p, 1u8)]).collect();
    Table::new(&elems, |(p, s), (q, t)| (std::array::from_fn(|i| p[q[i] as usize]), s ^ t)).expect("direct product is closed")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupReport {
    pub order: usize,
    pub order_histogram: BTreeMap<usize, usize>,
    pub isomorphic_to_s4_x_c2: bool,
    /// Orders of the elements where `tr(AC) != 0`.
    pub tau_support_orders: Vec<usize>,
    pub tau_support_is_order_above_3: bool,
}

pub fn tilde_group_check() -> Result<GroupReport> {
    let elems = elements();
    let table = Table::new(&elems, Elem::mul)?;
    table.check_axioms()?;
    if elems[table.identity] != Elem::IDENTITY {
        return Err(Error::PropertyFailure("identity is not (0, I)".into()));
    }
    let iso = find_isomorphism(&table, &s4_times_c2()).is_some();
    let mut support = Vec::new();
    for (i, e) in elems.iter().enumerate() {
        let order = table.order(i);
        if (e.tau() == 1) != (order > 3) {
            return Err(Error::PropertyFailure(format!("tau = {} at {e:?} of order {order}", e.tau())));
        }
        if e.tau() == 1 {
            support.push(order);
        }
    }
    support.sort();
    support.dedup();
    Ok(GroupReport {
        order: table.n,
        order_histogram: table.order_histogram(),
        isomorphic_to_s4_x_c2: iso,
        tau_support_orders: support,
        tau_support_is_order_above_3: true,
    })
}
