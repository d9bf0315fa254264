//! The contact tree of a reduced germ relative to x: one segment per
//! branch, carrying the branch's marked points (read off its semigroup),
//! glued along shared initial parts as dictated by the pairwise logarithmic
//! distances. Nodes store the three exact functions of the theory: the
//! contact coordinate c, the segment index i, and the integral e of i dc
//! along the root path.
//!
//! Marked points of a branch with semigroup generators (g_0, ..., g_h) sit
//! at c_k = e_{k-1} g_k / g_0^2, and the index on the segment right after
//! the k-th marked point is g_0 / e_k, where e_k = gcd(g_0, ..., g_k).

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::branch::SemigroupData;
use crate::error::{Error, Result};
use crate::rat::{rat, rat_int, ExtRat, Rat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Root,
    /// Marked point of some branch, with a single child.
    Marked,
    /// Interior point with one child that is marked for no branch (arises
    /// from a gluing value that is not a marked point of the surviving
    /// segment).
    Bamboo,
    /// Two or more children.
    Ramification,
    Leaf,
}

#[derive(Debug, Clone)]
pub struct TreeNode {
    pub id: usize,
    /// Contact coordinate; infinite exactly at leaves.
    pub c: ExtRat,
    /// Index on the segment ending at this node (the function i is
    /// left-continuous, so this is also i at the node itself).
    pub i: u64,
    /// Integral of i dc from the root; infinite exactly at leaves.
    pub e: ExtRat,
    pub kind: NodeKind,
    /// Branch id for leaves.
    pub label: Option<usize>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// A point of the tree: a node, or an interior point of an edge addressed
/// by the child node and an exact contact value strictly between the edge
/// endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreePoint {
    Node(usize),
    Edge { child: usize, c: Rat },
}

/// Input per branch: its semigroup and the multiplicity it carries in f.
#[derive(Debug, Clone)]
pub struct TreeBranch {
    pub semigroup: SemigroupData,
    pub multiplicity: u64,
}

#[derive(Debug, Clone)]
pub struct EggersWallTree {
    pub nodes: Vec<TreeNode>,
    /// leaves[b] = node id of the leaf of branch b.
    pub leaves: Vec<usize>,
    pub multiplicities: Vec<u64>,
}

/// Marked contact values of one branch with the index on the segment that
/// starts right after each of them.
pub fn marked_contacts(s: &SemigroupData) -> Vec<(Rat, u64)> {
    let g = s.gens();
    let b0 = g[0] as i128;
    (1..g.len())
        .map(|k| {
            let c = rat(s.e(k - 1) as i128 * g[k] as i128, b0 * b0);
            (c, g[0] / s.e(k))
        })
        .collect()
}

fn index_at(marked: &[(Rat, u64)], c: Rat) -> u64 {
    let mut i = 1;
    for &(m, idx) in marked {
        if m < c {
            i = idx;
        } else {
            break;
        }
    }
    i
}

/// Build the tree from the branches' semigroups and the exact pairwise
/// logarithmic distances (dist[i][j] for i != j; the diagonal is ignored).
pub fn build_tree(branches: &[TreeBranch], dist: &[Vec<ExtRat>]) -> Result<EggersWallTree> {
    let n = branches.len();
    if n == 0 {
        return Err(Error::Degenerate(String::from("tree of an empty branch list")));
    }
    if dist.len() != n || dist.iter().any(|r| r.len() != n) {
        return Err(Error::Degenerate(String::from("distance matrix shape mismatch")));
    }
    let d = |i: usize, j: usize| -> ExtRat {
        if i == j {
            ExtRat::Infinity
        } else {
            dist[i][j]
        }
    };
    for i in 0..n {
        for j in (i + 1)..n {
            if dist[i][j] != dist[j][i] {
                return Err(Error::GluingInconsistency(String::from(
                    "distance matrix is not symmetric",
                )));
            }
            match dist[i][j] {
                ExtRat::Finite(v) if v > rat_int(0) => {}
                ExtRat::Finite(_) => {
                    return Err(Error::GluingInconsistency(String::from(
                        "nonpositive distance between branches",
                    )))
                }
                ExtRat::Infinity => {
                    return Err(Error::GluingInconsistency(String::from(
                        "two branches at infinite distance are the same branch",
                    )))
                }
            }
        }
    }
    // ultrametric check: the two smallest of every triple are equal
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let mut t = [dist[i][j], dist[i][k], dist[j][k]];
                t.sort();
                if t[0] != t[1] {
                    return Err(Error::GluingInconsistency(format!(
                        "distances of branches {i}, {j}, {k} violate the strong triangle inequality"
                    )));
                }
            }
        }
    }

    let marked: Vec<Vec<(Rat, u64)>> = branches
        .iter()
        .map(|b| marked_contacts(&b.semigroup))
        .collect();
    // glued initial parts must agree: equal marked prefixes strictly below
    // the distance, and equal index at the distance itself
    for i in 0..n {
        for j in (i + 1)..n {
            let dv = dist[i][j].expect_finite("finite tree coordinate");
            let pi: Vec<_> = marked[i].iter().filter(|(c, _)| *c < dv).collect();
            let pj: Vec<_> = marked[j].iter().filter(|(c, _)| *c < dv).collect();
            if pi != pj {
                return Err(Error::GluingInconsistency(format!(
                    "branches {i} and {j} disagree on marked points below their distance"
                )));
            }
            if index_at(&marked[i], dv) != index_at(&marked[j], dv) {
                return Err(Error::GluingInconsistency(format!(
                    "branches {i} and {j} disagree on the index at their gluing point"
                )));
            }
        }
    }

    let mut nodes: Vec<TreeNode> = vec![TreeNode {
        id: 0,
        c: ExtRat::Finite(rat_int(0)),
        i: 1,
        e: ExtRat::Finite(rat_int(0)),
        kind: NodeKind::Root,
        label: None,
        parent: None,
        children: vec![],
    }];
    let mut leaves = vec![0usize; n];
    // class key for a glued interior point: contact value plus the smallest
    // branch whose segment reaches at least that far
    let mut class: alloc::collections::BTreeMap<(usize, Rat), usize> =
        alloc::collections::BTreeMap::new();
    let mut marked_flag: Vec<bool> = vec![false];

    for i in 0..n {
        let mut crit: Vec<Rat> = marked[i].iter().map(|&(c, _)| c).collect();
        for j in 0..n {
            if j != i {
                crit.push(dist[i][j].expect_finite("finite tree coordinate"));
            }
        }
        crit.sort();
        crit.dedup();
        let mut prev = 0usize;
        for c in crit {
            let rep = (0..n)
                .find(|&j| d(i, j) >= ExtRat::Finite(c))
                .expect("the branch itself always qualifies");
            let idx = index_at(&marked[i], c);
            let is_marked = marked[i].iter().any(|&(m, _)| m == c);
            let id = match class.get(&(rep, c)) {
                Some(&id) => {
                    if nodes[id].parent != Some(prev) || nodes[id].i != idx {
                        return Err(Error::GluingInconsistency(format!(
                            "branch {i} joins an existing node with conflicting data at contact {c}"
                        )));
                    }
                    id
                }
                None => {
                    let id = nodes.len();
                    let (pc, pe) = (
                        nodes[prev].c.expect_finite("finite tree coordinate"),
                        nodes[prev].e.expect_finite("finite tree coordinate"),
                    );
                    nodes.push(TreeNode {
                        id,
                        c: ExtRat::Finite(c),
                        i: idx,
                        e: ExtRat::Finite(pe + rat_int(idx as i128) * (c - pc)),
                        kind: NodeKind::Bamboo, // classified below
                        label: None,
                        parent: Some(prev),
                        children: vec![],
                    });
                    marked_flag.push(false);
                    class.insert((rep, c), id);
                    id
                }
            };
            if is_marked {
                marked_flag[id] = true;
            }
            prev = id;
        }
        let id = nodes.len();
        nodes.push(TreeNode {
            id,
            c: ExtRat::Infinity,
            i: branches[i].semigroup.multiplicity(),
            e: ExtRat::Infinity,
            kind: NodeKind::Leaf,
            label: Some(i),
            parent: Some(prev),
            children: vec![],
        });
        marked_flag.push(false);
        leaves[i] = id;
    }

    for id in 1..nodes.len() {
        let p = nodes[id].parent.unwrap();
        nodes[p].children.push(id);
    }
    for id in 1..nodes.len() {
        if nodes[id].kind == NodeKind::Leaf {
            continue;
        }
        nodes[id].kind = if nodes[id].children.len() >= 2 {
            NodeKind::Ramification
        } else if marked_flag[id] {
            NodeKind::Marked
        } else {
            NodeKind::Bamboo
        };
    }

    Ok(EggersWallTree {
        nodes,
        leaves,
        multiplicities: branches.iter().map(|b| b.multiplicity).collect(),
    })
}

impl EggersWallTree {
    /// Node ids from the root down to (and including) v.
    fn root_path(&self, v: usize) -> Vec<usize> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.nodes[cur].parent {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    fn anchor(&self, p: &TreePoint) -> (Vec<usize>, Option<(usize, Rat)>) {
        match p {
            TreePoint::Node(v) => (self.root_path(*v), None),
            TreePoint::Edge { child, c } => {
                let parent = self.nodes[*child].parent.expect("edge child has a parent");
                (self.root_path(parent), Some((*child, *c)))
            }
        }
    }

    /// Canonical form: an edge point at the child's own contact is the node.
    pub fn mk_point(&self, child: usize, c: Rat) -> TreePoint {
        if self.nodes[child].c == ExtRat::Finite(c) {
            TreePoint::Node(child)
        } else {
            TreePoint::Edge { child, c }
        }
    }

    /// (c, i, e) at a tree point.
    pub fn functions_at(&self, p: &TreePoint) -> (ExtRat, u64, ExtRat) {
        match p {
            TreePoint::Node(v) => {
                let nd = &self.nodes[*v];
                (nd.c, nd.i, nd.e)
            }
            TreePoint::Edge { child, c } => {
                let nd = &self.nodes[*child];
                let par = &self.nodes[nd.parent.expect("edge child has a parent")];
                let e = par.e.expect_finite("finite tree coordinate")
                    + rat_int(nd.i as i128) * (*c - par.c.expect_finite("finite tree coordinate"));
                (ExtRat::Finite(*c), nd.i, ExtRat::Finite(e))
            }
        }
    }

    /// The point on the segment of `branch` at contact value `c`.
    pub fn point_on_branch_at_c(&self, branch: usize, c: ExtRat) -> Result<TreePoint> {
        if c == ExtRat::Infinity {
            return Ok(TreePoint::Node(self.leaves[branch]));
        }
        let cv = c.expect_finite("finite tree coordinate");
        if cv < rat_int(0) {
            return Err(Error::PointOffTree);
        }
        if cv == rat_int(0) {
            return Ok(TreePoint::Node(0));
        }
        for &v in &self.root_path(self.leaves[branch]) {
            if self.nodes[v].c >= c {
                return Ok(self.mk_point(v, cv));
            }
        }
        Err(Error::PointOffTree)
    }

    /// The point on the segment of `branch` where the integral e reaches
    /// the given value (inverse of the e function along one path).
    pub fn point_on_branch_at_e(&self, branch: usize, e: Rat) -> Result<TreePoint> {
        if e < rat_int(0) {
            return Err(Error::PointOffTree);
        }
        if e == rat_int(0) {
            return Ok(TreePoint::Node(0));
        }
        for &v in &self.root_path(self.leaves[branch]) {
            if self.nodes[v].e >= ExtRat::Finite(e) {
                let par = &self.nodes[self.nodes[v].parent.expect("non-root")];
                let c = par.c.expect_finite("finite tree coordinate")
                    + (e - par.e.expect_finite("finite tree coordinate")) / rat_int(self.nodes[v].i as i128);
                return Ok(self.mk_point(v, c));
            }
        }
        Err(Error::PointOffTree)
    }

    /// Closest common ancestor of two tree points.
    pub fn meet(&self, a: &TreePoint, b: &TreePoint) -> TreePoint {
        let (pa, ea) = self.anchor(a);
        let (pb, eb) = self.anchor(b);
        let mut k = 0;
        while k < pa.len() && k < pb.len() && pa[k] == pb[k] {
            k += 1;
        }
        if k < pa.len() && k < pb.len() {
            // paths diverge below the last common node
            return TreePoint::Node(pa[k - 1]);
        }
        if pa.len() == pb.len() {
            // same anchor node
            return match (ea, eb) {
                (Some((ca, va)), Some((cb, vb))) if ca == cb => {
                    self.mk_point(ca, va.min(vb))
                }
                _ => TreePoint::Node(pa[k - 1]),
            };
        }
        // one anchor path is a prefix of the other
        let (shorter, se, longer) = if pa.len() < pb.len() {
            (&pa, &ea, &pb)
        } else {
            (&pb, &eb, &pa)
        };
        let v = *shorter.last().unwrap();
        match se {
            None => TreePoint::Node(v),
            Some((child, c)) => {
                if longer[shorter.len()] == *child {
                    self.mk_point(*child, *c)
                } else {
                    TreePoint::Node(v)
                }
            }
        }
    }

    /// The tree partial order: a is on the root path of b.
    pub fn le(&self, a: &TreePoint, b: &TreePoint) -> bool {
        self.meet(a, b) == *a
    }

    /// Center of the tripod spanned by three points: the deepest of their
    /// pairwise meets (two of which always coincide); collinear triples
    /// yield the middle point.
    pub fn tripod_center(&self, a: &TreePoint, b: &TreePoint, c: &TreePoint) -> TreePoint {
        let mab = self.meet(a, b);
        let mac = self.meet(a, c);
        let mbc = self.meet(b, c);
        let mut best = mab.clone();
        for m in [&mac, &mbc] {
            if self.le(&best, m) {
                best = m.clone();
            }
        }
        best
    }

    /// Pairwise contact of two branches: c of the meet of their leaves.
    pub fn branch_contact(&self, i: usize, j: usize) -> ExtRat {
        let m = self.meet(
            &TreePoint::Node(self.leaves[i]),
            &TreePoint::Node(self.leaves[j]),
        );
        self.functions_at(&m).0
    }

    /// Attaching point of an outside branch g given d(g, f_i) for every
    /// branch of the tree: the deepest of the pairwise tripod centers
    /// <x, g, f_i>, which sit at contact d(g, f_i) on the segment of f_i.
    /// An infinite distance means g is that branch itself.
    pub fn attach_point(&self, dists: &[ExtRat]) -> Result<TreePoint> {
        if dists.len() != self.leaves.len() {
            return Err(Error::Degenerate(String::from(
                "one distance per tree branch is required",
            )));
        }
        if let Some(i) = dists.iter().position(|&d| d == ExtRat::Infinity) {
            return Ok(TreePoint::Node(self.leaves[i]));
        }
        // the attaching distances and tree-internal contacts must still
        // look ultrametric, otherwise the inputs are mutually inconsistent
        for i in 0..dists.len() {
            for j in (i + 1)..dists.len() {
                let mut t = [dists[i], dists[j], self.branch_contact(i, j)];
                t.sort();
                if t[0] != t[1] {
                    return Err(Error::InconsistentDistances(format!(
                        "attaching distances to branches {i} and {j} violate the strong triangle inequality"
                    )));
                }
            }
        }
        let best = (0..dists.len())
            .max_by_key(|&i| dists[i])
            .expect("at least one branch");
        self.point_on_branch_at_c(best, dists[best])
            .map_err(|_| {
                Error::InconsistentDistances(String::from(
                    "attaching distance exceeds its branch segment",
                ))
            })
    }

    /// Factors of a product lying above Q: indices of the attach points
    /// P_i with Q <= P_i, and the sum of the given x-intersections of the
    /// selected factors. An empty selection is the unit subproduct.
    pub fn subproduct_at(
        &self,
        attach: &[(TreePoint, u64)],
        q: &TreePoint,
    ) -> (Vec<usize>, u64) {
        let mut sel = Vec::new();
        let mut total = 0u64;
        for (i, (p, i0x)) in attach.iter().enumerate() {
            if self.le(q, p) {
                sel.push(i);
                total += i0x;
            }
        }
        (sel, total)
    }
}

/// Logarithmic distance between two tame branches from the characteristic
/// sequence of one of them and their order of coincidence, by the Noether
/// contact formula. Requires the multiplicity prime to the characteristic.
pub fn noether_distance(cs: &[u64], coincidence: Rat, characteristic: u64) -> Result<Rat> {
    if cs.is_empty() || cs[0] == 0 {
        return Err(Error::Degenerate(String::from("empty characteristic sequence")));
    }
    let b0 = cs[0];
    if b0 % characteristic == 0 {
        return Err(Error::WildRamification { denominator: b0 });
    }
    let e: Vec<u64> = (0..cs.len())
        .map(|k| {
            cs[..=k]
                .iter()
                .fold(0u64, |a, &b| num_integer::Integer::gcd(&a, &b))
        })
        .collect();
    // smallest k with coincidence <= b_k / b_0; beyond the last exponent
    // every term of the sum contributes
    let kk = (1..cs.len())
        .find(|&k| coincidence <= rat(cs[k] as i128, b0 as i128))
        .unwrap_or(cs.len());
    let mut dsum = rat_int(0);
    for i in 1..kk {
        dsum = dsum
            + rat((e[i - 1] - e[i]) as i128, b0 as i128) * rat(cs[i] as i128, b0 as i128);
    }
    Ok(dsum + rat(e[kk - 1] as i128, b0 as i128) * coincidence)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn semi(g: &[u64]) -> SemigroupData {
        SemigroupData::new(g.to_vec()).unwrap()
    }

    /// The degree-11 standard example: branches with semigroups (2,3),
    /// (3,4), (6,8,27) and pairwise contacts 4/3, 4/3, 3/2.
    fn standard_tree() -> EggersWallTree {
        let branches = vec![
            TreeBranch { semigroup: semi(&[2, 3]), multiplicity: 1 },
            TreeBranch { semigroup: semi(&[3, 4]), multiplicity: 1 },
            TreeBranch { semigroup: semi(&[6, 8, 27]), multiplicity: 1 },
        ];
        let f = |n, d| ExtRat::finite(n, d);
        let dist = vec![
            vec![ExtRat::Infinity, f(4, 3), f(4, 3)],
            vec![f(4, 3), ExtRat::Infinity, f(3, 2)],
            vec![f(4, 3), f(3, 2), ExtRat::Infinity],
        ];
        build_tree(&branches, &dist).unwrap()
    }

    #[test]
    fn standard_tree_shape_and_functions() {
        let t = standard_tree();
        // nodes: root, P (4/3), Q (3/2 toward branch 0), T (3/2), 3 leaves
        assert_eq!(t.nodes.len(), 7);
        let mut labels: Vec<u64> = t.nodes[1..].iter().map(|n| n.i).collect();
        labels.sort_unstable();
        assert_eq!(labels, vec![1, 1, 2, 3, 3, 6]);
        // P: ramification at c = 4/3 with e = 4/3
        let p = t
            .nodes
            .iter()
            .find(|n| n.c == ExtRat::finite(4, 3))
            .unwrap();
        assert_eq!(p.kind, NodeKind::Ramification);
        assert_eq!(p.e, ExtRat::finite(4, 3));
        assert_eq!(p.i, 1);
        // T: ramification of branches 1, 2 at c = 3/2, e = 11/6, index 3
        let tt = t.meet(
            &TreePoint::Node(t.leaves[1]),
            &TreePoint::Node(t.leaves[2]),
        );
        let (c, i, e) = t.functions_at(&tt);
        assert_eq!((c, i, e), (ExtRat::finite(3, 2), 3, ExtRat::finite(11, 6)));
        // Q: marked point of branch 0 at c = 3/2, e = 3/2, one child
        let q = t
            .point_on_branch_at_c(0, ExtRat::finite(3, 2))
            .unwrap();
        let (c, i, e) = t.functions_at(&q);
        assert_eq!((c, i, e), (ExtRat::finite(3, 2), 1, ExtRat::finite(3, 2)));
        match q {
            TreePoint::Node(v) => assert_eq!(t.nodes[v].kind, NodeKind::Marked),
            _ => panic!("Q is a node"),
        }
        // root functions
        let (c, i, e) = t.functions_at(&TreePoint::Node(0));
        assert_eq!((c, i, e), (ExtRat::finite(0, 1), 1, ExtRat::finite(0, 1)));
    }

    #[test]
    fn interior_point_and_inverse_query() {
        let t = standard_tree();
        // at c = 7/5 on the segment toward branch 2 the index is 3:
        // e = 4/3 + 3 (7/5 - 4/3) = 23/15
        let q = t.point_on_branch_at_c(2, ExtRat::finite(7, 5)).unwrap();
        let (c, i, e) = t.functions_at(&q);
        assert_eq!((c, i, e), (ExtRat::finite(7, 5), 3, ExtRat::finite(23, 15)));
        // and the e -> c inverse lands on the same point
        assert_eq!(t.point_on_branch_at_e(2, rat(23, 15)).unwrap(), q);
        // roundtrip at every finite node
        for v in 0..t.nodes.len() {
            if t.nodes[v].c == ExtRat::Infinity {
                continue;
            }
            let b = t.nodes[v].label.unwrap_or(2);
            if !t.le(&TreePoint::Node(v), &TreePoint::Node(t.leaves[b])) {
                continue;
            }
            let back = t
                .point_on_branch_at_e(b, t.nodes[v].e.expect_finite("finite tree coordinate"))
                .unwrap();
            assert_eq!(back, TreePoint::Node(v));
        }
    }

    #[test]
    fn tripods_and_order() {
        let t = standard_tree();
        let root = TreePoint::Node(0);
        let l = |i: usize| TreePoint::Node(t.leaves[i]);
        let p = t.point_on_branch_at_c(2, ExtRat::finite(4, 3)).unwrap();
        let tt = t.point_on_branch_at_c(2, ExtRat::finite(3, 2)).unwrap();
        assert_eq!(t.tripod_center(&root, &l(0), &l(1)), p);
        assert_eq!(t.tripod_center(&root, &l(1), &l(2)), tt);
        // collinear: T lies between P and leaf 2
        assert_eq!(t.tripod_center(&p, &l(2), &tt), tt);
        assert!(t.le(&p, &tt) && !t.le(&tt, &p));
    }

    #[test]
    fn attach_and_subproduct() {
        let t = standard_tree();
        // a germ at distance 4/3, 3/2, 3/2 attaches at T
        let g = t
            .attach_point(&[ExtRat::finite(4, 3), ExtRat::finite(3, 2), ExtRat::finite(3, 2)])
            .unwrap();
        let tt = t.point_on_branch_at_c(2, ExtRat::finite(3, 2)).unwrap();
        assert_eq!(g, tt);
        // g equal to branch 1 attaches at its leaf
        let g = t
            .attach_point(&[ExtRat::finite(4, 3), ExtRat::Infinity, ExtRat::finite(3, 2)])
            .unwrap();
        assert_eq!(g, TreePoint::Node(t.leaves[1]));
        // distances violating the ultrametric pattern are rejected
        assert!(matches!(
            t.attach_point(&[ExtRat::finite(1, 3), ExtRat::finite(3, 2), ExtRat::finite(3, 2)]),
            Err(Error::InconsistentDistances(_))
        ));
        // subproducts at P, Q, T of the full product (x-degrees 2, 3, 6)
        let attach: Vec<(TreePoint, u64)> = (0..3)
            .map(|i| (TreePoint::Node(t.leaves[i]), t.nodes[t.leaves[i]].i))
            .collect();
        let p = t.point_on_branch_at_c(2, ExtRat::finite(4, 3)).unwrap();
        let q = t.point_on_branch_at_c(0, ExtRat::finite(3, 2)).unwrap();
        assert_eq!(t.subproduct_at(&attach, &p), (vec![0, 1, 2], 11));
        assert_eq!(t.subproduct_at(&attach, &q), (vec![0], 2));
        assert_eq!(t.subproduct_at(&attach, &tt), (vec![1, 2], 9));
        // strictly above every attach point: the unit subproduct
        let above = TreePoint::Node(t.leaves[0]);
        let deep: Vec<(TreePoint, u64)> = vec![(q.clone(), 2)];
        assert_eq!(t.subproduct_at(&deep, &above), (vec![], 0));
    }

    #[test]
    fn smooth_branch_tree_is_one_segment() {
        let branches = vec![TreeBranch { semigroup: semi(&[1]), multiplicity: 1 }];
        let t = build_tree(&branches, &vec![vec![ExtRat::Infinity]]).unwrap();
        assert_eq!(t.nodes.len(), 2);
        assert_eq!(t.nodes[1].kind, NodeKind::Leaf);
        assert_eq!(t.nodes[1].i, 1);
    }

    #[test]
    fn two_branch_tree_with_marked_ramification() {
        // y and a branch with semigroup (2, 5) at distance 5/2: the
        // ramification point is also the marked point of the second branch
        let branches = vec![
            TreeBranch { semigroup: semi(&[1]), multiplicity: 1 },
            TreeBranch { semigroup: semi(&[2, 5]), multiplicity: 1 },
        ];
        let dist = vec![
            vec![ExtRat::Infinity, ExtRat::finite(5, 2)],
            vec![ExtRat::finite(5, 2), ExtRat::Infinity],
        ];
        let t = build_tree(&branches, &dist).unwrap();
        let p = t.point_on_branch_at_c(1, ExtRat::finite(5, 2)).unwrap();
        let (c, i, e) = t.functions_at(&p);
        assert_eq!((c, i, e), (ExtRat::finite(5, 2), 1, ExtRat::finite(5, 2)));
        match p {
            TreePoint::Node(v) => {
                assert_eq!(t.nodes[v].kind, NodeKind::Ramification);
                assert_eq!(t.nodes[v].children.len(), 2);
            }
            _ => panic!("gluing point is a node"),
        }
        assert_eq!(t.nodes[t.leaves[1]].i, 2);
    }

    #[test]
    fn gluing_rejects_bad_inputs() {
        // prefix mismatch: (2,3) and (2,5) share nothing below c = 2 but
        // their marked points 3/2 vs 5/4 < 2 differ
        let branches = vec![
            TreeBranch { semigroup: semi(&[2, 3]), multiplicity: 1 },
            TreeBranch { semigroup: semi(&[2, 5]), multiplicity: 1 },
        ];
        let dist = vec![
            vec![ExtRat::Infinity, ExtRat::finite(2, 1)],
            vec![ExtRat::finite(2, 1), ExtRat::Infinity],
        ];
        assert!(matches!(
            build_tree(&branches, &dist),
            Err(Error::GluingInconsistency(_))
        ));
        // STI violation on three smooth branches
        let b3 = vec![
            TreeBranch { semigroup: semi(&[1]), multiplicity: 1 },
            TreeBranch { semigroup: semi(&[1]), multiplicity: 1 },
            TreeBranch { semigroup: semi(&[1]), multiplicity: 1 },
        ];
        let f = |n, d| ExtRat::finite(n, d);
        let bad = vec![
            vec![ExtRat::Infinity, f(1, 1), f(2, 1)],
            vec![f(1, 1), ExtRat::Infinity, f(3, 1)],
            vec![f(2, 1), f(3, 1), ExtRat::Infinity],
        ];
        assert!(matches!(
            build_tree(&b3, &bad),
            Err(Error::GluingInconsistency(_))
        ));
    }

    #[test]
    fn noether_contact_formula() {
        assert_eq!(noether_distance(&[2, 3], rat(4, 3), 5).unwrap(), rat(4, 3));
        assert_eq!(noether_distance(&[2, 3], rat(3, 2), 5).unwrap(), rat(3, 2));
        // beyond the last exponent the slope drops to e_1/b_0 = 1/2:
        // d = (2-1)/2 * 3/2 + 1/2 * 2 = 7/4
        assert_eq!(noether_distance(&[2, 3], rat_int(2), 5).unwrap(), rat(7, 4));
        // below the first exponent the distance is the coincidence itself
        assert_eq!(noether_distance(&[2, 3], rat(1, 2), 5).unwrap(), rat(1, 2));
        // wild multiplicity is refused
        assert!(matches!(
            noether_distance(&[2, 3], rat(3, 2), 2),
            Err(Error::WildRamification { .. })
        ));
        // the degree-6 branch against contact 3/2 gives its gluing value:
        // (6-2)/6 * 4/3 ... in the two-exponent regime
        // cs = (6, 8, 11): K = 2 since 3/2 > 8/6 and 3/2 <= 11/6
        // d = (6-2)/6 * 8/6 + 2/6 * 3/2 = 8/9 + 1/2 = 25/18
        assert_eq!(
            noether_distance(&[6, 8, 11], rat(3, 2), 5).unwrap(),
            rat(25, 18)
        );
    }
}
