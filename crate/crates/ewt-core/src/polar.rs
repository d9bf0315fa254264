//! Decomposition of the polar curve along the Eggers-Wall tree.
//!
//! For a reduced germ f with 1 < ord f(0,y) < infinity, the tree of f
//! predicts how the y-derivative of f splits into packets: one packet per
//! interior point P, with x-intersection equal to the sum of the indices of
//! the direct successors of P minus the index at P.  The prediction is valid
//! exactly when a divisibility condition holds at every point of the tree,
//! and this module checks both sides by independent exact computation:
//!
//! * the congruence conditions at the points of the tree (the classical one
//!   on i_0(f_P, x) and the weaker one on the index),
//! * the predicted packet degrees and contact ratios, read off the tree,
//! * the observed packets: the actual factors of the derivative with their
//!   attaching points, located from exact resultant-based intersection
//!   numbers only (never from expansions of roots, so wild factors are fine),
//! * the pointwise balance i_0(G_Q, x) = i_0(f_Q, x) - i(Q), sampled at every
//!   node, every attaching point, and interior points of every edge,
//! * the sum identity and the order-gap identity that characterize the
//!   decomposition, and the Newton-polygon edge data behind them.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;

use crate::bivar::{
    exact_div_bivar, gcd_bivar_exact, i0_weierstrass_trunc, intersection_multiplicity,
    log_distance_from, resultant_y_exact, Bivar,
};
use crate::branch::{branch_decompose, semigroup_of_branch, Certificate, SemigroupData};
use crate::error::{Error, Result};
use crate::gf::{join_embeddings, roots_split, Embedding, FieldDescriptor, Fq};
use crate::newton::{edge_polynomial, newton_polygon};
use crate::rat::{rat, rat_int, ExtRat, Rat};
use crate::series::Series;
use crate::tree::{build_tree, marked_contacts, EggersWallTree, TreeBranch, TreePoint};

// ---------------------------------------------------------------------------
// Congruence conditions at the points of the tree
// ---------------------------------------------------------------------------

/// Verdicts at one non-root node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointConditions {
    pub node: usize,
    /// i_0(f_P, x): total x-intersection of the factors of f above the node.
    pub i0_fp_x: u64,
    /// Index at the node (value of the left-continuous index function).
    pub index: u64,
    /// i_0(f_P, x) not divisible by the characteristic.
    pub divisibility: bool,
    /// The index not divisible by the characteristic.
    pub index_condition: bool,
}

#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub points: Vec<PointConditions>,
    /// Divisibility condition at every non-root node.
    pub divisibility: bool,
    /// Index condition at every non-root node.
    pub index_condition: bool,
}

/// i_0(f_P, x) at a node: the factors of f above P are the branches whose
/// leaf sits above P, and each contributes its multiplicity times i_0(f_i, x).
fn i0_fp_at(t: &EggersWallTree, q: &TreePoint) -> u64 {
    let mut total = 0u64;
    for (b, &leaf) in t.leaves.iter().enumerate() {
        if t.le(q, &TreePoint::Node(leaf)) {
            total += t.multiplicities[b] * t.nodes[leaf].i;
        }
    }
    total
}

/// The congruence conditions at every non-root node of the tree.
pub fn check_conditions(t: &EggersWallTree, p: u64) -> ConditionReport {
    let mut points = Vec::new();
    for v in 1..t.nodes.len() {
        let i0 = i0_fp_at(t, &TreePoint::Node(v));
        let idx = t.nodes[v].i;
        points.push(PointConditions {
            node: v,
            i0_fp_x: i0,
            index: idx,
            divisibility: i0 % p != 0,
            index_condition: idx % p != 0,
        });
    }
    let divisibility = points.iter().all(|c| c.divisibility);
    let index_condition = points.iter().all(|c| c.index_condition);
    ConditionReport { points, divisibility, index_condition }
}

// ---------------------------------------------------------------------------
// Predicted packets
// ---------------------------------------------------------------------------

/// Predicted packet of the derivative at one non-root node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictedBlock {
    pub node: usize,
    /// Predicted i_0 of the packet with x: sum of the indices of the direct
    /// successors minus the index at the node (0 at a leaf of a reduced f).
    pub x_degree: u64,
    /// Predicted i_0(packet, f_i) / i_0(packet, x) for each branch i:
    /// the contact of the node with that branch times i_0(f_i, x).
    /// Empty when the packet is trivial.
    pub ratios: Vec<Rat>,
}

/// The packet degrees and contact ratios the tree predicts for the
/// y-derivative of f.
pub fn predicted_decomposition(t: &EggersWallTree) -> Vec<PredictedBlock> {
    let mut out = Vec::new();
    for v in 1..t.nodes.len() {
        let nd = &t.nodes[v];
        let x_degree = if nd.children.is_empty() {
            i0_fp_at(t, &TreePoint::Node(v)) - nd.i
        } else {
            let succ: u64 = nd.children.iter().map(|&u| t.nodes[u].i).sum();
            succ - nd.i
        };
        let mut ratios = Vec::new();
        if x_degree > 0 {
            for &leaf in &t.leaves {
                let m = t.meet(&TreePoint::Node(v), &TreePoint::Node(leaf));
                let c = t.functions_at(&m).0.expect_finite("contact below a leaf");
                ratios.push(c * rat_int(t.nodes[leaf].i as i128));
            }
        }
        out.push(PredictedBlock { node: v, x_degree, ratios });
    }
    out
}

// ---------------------------------------------------------------------------
// The analyzed instance: f, its tree, the derivative and its factors
// ---------------------------------------------------------------------------

/// One irreducible factor of the derivative, with its attaching point.
#[derive(Debug, Clone)]
pub struct GammaFactor {
    pub w: Bivar,
    pub multiplicity: u64,
    /// i_0(w, x) = deg_y w.
    pub degree: u64,
    pub certified: bool,
    /// d(w, f_i) for every branch of f (infinite when w is that branch).
    pub dists: Vec<ExtRat>,
    pub attach: TreePoint,
}

/// A germ together with everything needed to compare the predicted and the
/// observed decomposition of its y-derivative.
#[derive(Debug, Clone)]
pub struct PolarInstance {
    pub field: Arc<FieldDescriptor>,
    /// Base field -> `field`.
    pub embedding: Embedding,
    /// f over the common splitting field.
    pub f: Bivar,
    /// The y-derivative of f over the same field.
    pub gamma: Bivar,
    /// Certified irreducible factors of f (each with multiplicity one).
    pub branches: Vec<Bivar>,
    pub semigroups: Vec<SemigroupData>,
    pub tree: EggersWallTree,
    /// Power of x dividing the derivative (nonzero only in bad cases).
    pub gamma_x_exponent: u64,
    pub gamma_factors: Vec<GammaFactor>,
    /// Some factor of the derivative carries no irreducibility certificate;
    /// per-packet data is then unreliable and only totals are reported.
    pub degraded: bool,
}

fn deg_y_of(w: &Bivar) -> u64 {
    w.degree_y().expect("nonzero factor") as u64
}

/// Whether two monic factors agree on every certainly-known coefficient.
fn same_branch(a: &Bivar, b: &Bivar) -> bool {
    if a.degree_y() != b.degree_y() {
        return false;
    }
    a.sub(b).coeffs().iter().all(|s| s.iter().next().is_none())
}

fn ord_of_poly(r: &crate::gf::Poly) -> Option<usize> {
    let zero = r.field().zero();
    r.coeffs().iter().position(|c| *c != zero)
}

/// Decompose f and its y-derivative over a common field, build the tree of
/// f, and locate the attaching point of every factor of the derivative from
/// exact intersection numbers.
pub fn analyze(f: &Bivar) -> Result<PolarInstance> {
    if !f.is_exact() {
        return Err(Error::PrecisionExhausted(String::from(
            "polar analysis needs an exact polynomial germ",
        )));
    }
    let d0 = match f.ord_y_at_zero()? {
        Some(d) if d >= 2 => d as u64,
        Some(_) => {
            return Err(Error::NotRegular(String::from(
                "polar analysis needs ord f(0, y) > 1",
            )))
        }
        None => {
            return Err(Error::NotRegular(String::from(
                "polar analysis needs f(0, y) nonzero, so x must not divide f",
            )))
        }
    };
    let gamma = f.derivative_y();
    if gamma.is_zero() {
        return Err(Error::Degenerate(String::from(
            "the y-derivative vanishes identically",
        )));
    }
    // split off the factors the derivative shares with f (this happens in
    // small characteristic even for reduced f); repeated gcds catch factors
    // appearing in the derivative with higher multiplicity
    let mut rest = gamma.clone();
    let mut shared: Vec<Bivar> = Vec::new();
    loop {
        let g = gcd_bivar_exact(f, &rest)?;
        if g.degree_y().unwrap_or(0) == 0 {
            break;
        }
        rest = exact_div_bivar(&rest, &g)?;
        shared.push(g);
    }
    // precision that certifies every factor-pair intersection number between
    // the coprime part of the derivative and f: one more than the valuation
    // of their exact resultant, which bounds each summand
    let mut budget: u64 = 2 * d0 * d0 + 8;
    if rest.degree_y().unwrap_or(0) > 0 {
        let r = resultant_y_exact(&rest, f)?;
        let o = ord_of_poly(&r).ok_or_else(|| {
            Error::Degenerate(String::from("resultant of coprime germs vanished"))
        })?;
        budget = budget.max(o as u64 + 2);
    }
    let mut last = Error::PrecisionExhausted(String::from("polar analysis budget"));
    for _ in 0..6 {
        match analyze_once(f, &gamma, &rest, &shared, budget) {
            Err(Error::PrecisionExhausted(m)) => {
                last = Error::PrecisionExhausted(m);
                budget *= 2;
            }
            other => return other,
        }
    }
    Err(last)
}

fn analyze_once(
    f: &Bivar,
    gamma: &Bivar,
    rest: &Bivar,
    shared: &[Bivar],
    budget: u64,
) -> Result<PolarInstance> {
    let dec_f = branch_decompose(f, budget)?;
    let mut emb = dec_f.embedding.clone();
    let mut branches: Vec<Bivar> = Vec::new();
    for (br, m) in &dec_f.factors {
        if *m > 1 {
            return Err(Error::Degenerate(String::from(
                "polar analysis needs a reduced germ",
            )));
        }
        if br.certificate != Certificate::Certified {
            return Err(Error::Degenerate(String::from(
                "a factor of f carries no irreducibility certificate",
            )));
        }
        branches.push(br.w.clone());
    }
    if dec_f.x_exponent > 0 {
        return Err(Error::NotRegular(String::from("x divides f")));
    }

    // coprime part of the derivative
    let gamma_x_exponent;
    let mut raw: Vec<(Bivar, u64, bool)> = Vec::new();
    if rest.degree_y().unwrap_or(0) > 0 {
        let dec_g = branch_decompose(rest, budget)?;
        let (field, j1, j2) = join_embeddings(&emb, &dec_g.embedding)?;
        let _ = field;
        for w in &mut branches {
            *w = w.embed(&j1);
        }
        emb = emb.compose(&j1);
        gamma_x_exponent = dec_g.x_exponent;
        for (br, m) in &dec_g.factors {
            raw.push((
                br.w.embed(&j2),
                *m,
                br.certificate == Certificate::Certified,
            ));
        }
    } else {
        gamma_x_exponent = rest
            .x_content()?
            .expect_finite("nonzero derivative")
            .to_integer() as u64;
    }

    // factors shared with f, identified among the branches by comparing
    // certain coefficients (each gcd layer divides the reduced f, so it is
    // squarefree and every piece matches exactly one branch)
    let mut shared_mult: Vec<u64> = vec![0; branches.len()];
    for g in shared {
        let dec_c = branch_decompose(g, budget)?;
        let (_, j1, j2) = join_embeddings(&emb, &dec_c.embedding)?;
        for w in &mut branches {
            *w = w.embed(&j1);
        }
        emb = emb.compose(&j1);
        for (br, m) in &dec_c.factors {
            if *m > 1 {
                return Err(Error::Degenerate(String::from(
                    "a shared factor layer is not squarefree",
                )));
            }
            let cw = br.w.embed(&j2);
            let idx = branches
                .iter()
                .position(|w| same_branch(w, &cw))
                .ok_or_else(|| {
                    Error::Degenerate(String::from(
                        "a factor shared with f matches no branch of f",
                    ))
                })?;
            shared_mult[idx] += 1;
        }
        if dec_c.x_exponent > 0 {
            return Err(Error::Degenerate(String::from(
                "a shared factor is divisible by x",
            )));
        }
    }

    // tree of f
    let n = branches.len();
    let mut semigroups = Vec::with_capacity(n);
    for w in &branches {
        semigroups.push(semigroup_of_branch(w)?);
    }
    let mut dist = vec![vec![ExtRat::Infinity; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let i0 = i0_weierstrass_trunc(&branches[i], &branches[j])?;
            let d = log_distance_from(
                i0,
                ExtRat::Finite(rat_int(deg_y_of(&branches[i]) as i128)),
                ExtRat::Finite(rat_int(deg_y_of(&branches[j]) as i128)),
            )?;
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    let tb: Vec<TreeBranch> = semigroups
        .iter()
        .map(|s| TreeBranch { semigroup: s.clone(), multiplicity: 1 })
        .collect();
    let tree = build_tree(&tb, &dist)?;

    // attaching points of the derivative's factors, from intersection
    // numbers alone
    let mut gamma_factors = Vec::new();
    let mut degraded = false;
    for (w, mult, certified) in raw {
        if !certified {
            degraded = true;
        }
        let degree = deg_y_of(&w);
        let mut dists = Vec::with_capacity(n);
        for (i, b) in branches.iter().enumerate() {
            let i0 = i0_weierstrass_trunc(&w, b)?;
            if i0 == ExtRat::Infinity {
                return Err(Error::Degenerate(String::from(
                    "a coprime factor of the derivative meets a branch infinitely",
                )));
            }
            let d = log_distance_from(
                i0,
                ExtRat::Finite(rat_int(degree as i128)),
                ExtRat::Finite(rat_int(deg_y_of(&branches[i]) as i128)),
            )?;
            dists.push(d);
        }
        let attach = tree.attach_point(&dists)?;
        gamma_factors.push(GammaFactor { w, multiplicity: mult, degree, certified, dists, attach });
    }
    for (idx, &m) in shared_mult.iter().enumerate() {
        if m == 0 {
            continue;
        }
        let dists: Vec<ExtRat> = (0..n)
            .map(|i| if i == idx { ExtRat::Infinity } else { tree.branch_contact(idx, i) })
            .collect();
        gamma_factors.push(GammaFactor {
            w: branches[idx].clone(),
            multiplicity: m,
            degree: deg_y_of(&branches[idx]),
            certified: true,
            dists,
            attach: TreePoint::Node(tree.leaves[idx]),
        });
    }

    let f_cur = f.embed(&emb);
    let gamma_cur = gamma.embed(&emb);
    Ok(PolarInstance {
        field: emb.target().clone(),
        embedding: emb,
        f: f_cur,
        gamma: gamma_cur,
        branches,
        semigroups,
        tree,
        gamma_x_exponent,
        gamma_factors,
        degraded,
    })
}

// ---------------------------------------------------------------------------
// Verification of the decomposition
// ---------------------------------------------------------------------------

/// Observed packet at one non-root node: the factors of the derivative
/// attaching exactly there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservedBlock {
    pub node: usize,
    pub x_degree: u64,
    /// i_0(packet, f_i) / i_0(packet, x) per branch (infinite when the
    /// packet contains that very branch); empty for a trivial packet.
    pub ratios: Vec<ExtRat>,
}

/// One evaluation of the pointwise balance i_0(G_Q, x) = i_0(f_Q, x) - i(Q).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BalanceSample {
    pub point: TreePoint,
    pub contact: ExtRat,
    pub observed: ExtRat,
    pub expected: u64,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct DecompositionReport {
    pub tree: EggersWallTree,
    pub branch_degrees: Vec<u64>,
    pub conditions: ConditionReport,
    pub predicted: Vec<PredictedBlock>,
    pub observed: Vec<ObservedBlock>,
    pub gamma_x_exponent: u64,
    /// (degree, multiplicity, certified, attaching point) per factor.
    pub factors: Vec<(u64, u64, bool, TreePoint)>,
    /// Every factor attaches at a non-root node and the packet x-degrees
    /// match the prediction.
    pub packets_match: bool,
    /// The packet contact ratios match the prediction.
    pub ratios_match: bool,
    /// The pointwise balance holds at every sampled point.
    pub balanced: bool,
    pub samples: Vec<BalanceSample>,
    /// `packets_match` and `balanced` agree (they are equivalent; a
    /// disagreement would indicate a computation error).
    pub agreement: bool,
    pub degraded: bool,
    /// Prediction fully verified.
    pub verdict: bool,
}

/// i_0(G_Q, x) for the subproduct of the derivative's factors above Q.
fn gamma_i0_at(inst: &PolarInstance, q: &TreePoint) -> ExtRat {
    let mut total: i128 = 0;
    for g in &inst.gamma_factors {
        if inst.tree.le(q, &g.attach) {
            total += (g.degree * g.multiplicity) as i128;
        }
    }
    if inst.gamma_x_exponent > 0 && *q == TreePoint::Node(0) {
        return ExtRat::Infinity;
    }
    ExtRat::Finite(rat_int(total))
}

fn balance_at(inst: &PolarInstance, q: &TreePoint) -> BalanceSample {
    let (c, iq, _) = inst.tree.functions_at(q);
    let expected = i0_fp_at(&inst.tree, q) - iq;
    let observed = gamma_i0_at(inst, q);
    let ok = observed == ExtRat::Finite(rat_int(expected as i128));
    BalanceSample { point: q.clone(), contact: c, observed, expected, ok }
}

/// Balance checkpoints: every node, every attaching point, midpoints of
/// every edge between consecutive breakpoints, one point past the last
/// breakpoint on leaf edges, and on every edge one point whose value of the
/// exponent function is a reduced fraction with denominator prime to p
/// times the local index.
fn balance_points(inst: &PolarInstance, p: u64) -> Vec<TreePoint> {
    let t = &inst.tree;
    let mut pts: Vec<TreePoint> = (0..t.nodes.len()).map(TreePoint::Node).collect();
    for g in &inst.gamma_factors {
        if !pts.contains(&g.attach) {
            pts.push(g.attach.clone());
        }
    }
    for v in 1..t.nodes.len() {
        let u = t.nodes[v].parent.expect("non-root");
        let c_lo = t.nodes[u].c.expect_finite("interior contact");
        let mut breaks = vec![c_lo];
        for g in &inst.gamma_factors {
            if let TreePoint::Edge { child, c } = &g.attach {
                if *child == v {
                    breaks.push(*c);
                }
            }
        }
        breaks.sort();
        breaks.dedup();
        let c_hi = match t.nodes[v].c {
            ExtRat::Finite(c) => {
                breaks.push(c);
                Some(c)
            }
            ExtRat::Infinity => {
                let last = *breaks.last().expect("nonempty");
                breaks.push(last + rat_int(2));
                None
            }
        };
        for w in breaks.windows(2) {
            let mid = (w[0] + w[1]) / rat_int(2);
            let q = t.mk_point(v, mid);
            if !pts.contains(&q) {
                pts.push(q);
            }
        }
        // a point with exponent value m/n, n prime to p and to the index
        let i = t.nodes[v].i;
        let e_lo = t.nodes[u].e.expect_finite("interior exponent");
        for nden in 2i128..=64 {
            if nden.gcd(&((p * i) as i128)) != 1 {
                continue;
            }
            let m = (e_lo * rat_int(nden)).floor().to_integer() + 1;
            let e = rat(m, nden);
            let c = c_lo + (e - e_lo) / rat_int(i as i128);
            let inside = match c_hi {
                Some(hi) => c > c_lo && c < hi,
                None => c > c_lo,
            };
            if inside {
                let q = t.mk_point(v, c);
                if !pts.contains(&q) {
                    pts.push(q);
                }
                break;
            }
        }
    }
    pts
}

/// Compare the observed decomposition of the y-derivative of f against the
/// tree's prediction.
pub fn verify_decomposition(f: &Bivar) -> Result<DecompositionReport> {
    let inst = analyze(f)?;
    Ok(report(&inst))
}

/// The comparison for an already analyzed instance.
pub fn report(inst: &PolarInstance) -> DecompositionReport {
    let t = &inst.tree;
    let p = inst.field.characteristic();
    let conditions = check_conditions(t, p);
    let predicted = predicted_decomposition(t);
    let branch_degrees: Vec<u64> = inst.branches.iter().map(deg_y_of).collect();
    let factors: Vec<(u64, u64, bool, TreePoint)> = inst
        .gamma_factors
        .iter()
        .map(|g| (g.degree, g.multiplicity, g.certified, g.attach.clone()))
        .collect();

    if inst.degraded {
        return DecompositionReport {
            tree: t.clone(),
            branch_degrees,
            conditions,
            predicted,
            observed: Vec::new(),
            gamma_x_exponent: inst.gamma_x_exponent,
            factors,
            packets_match: false,
            ratios_match: false,
            balanced: false,
            samples: Vec::new(),
            agreement: true,
            degraded: true,
            verdict: false,
        };
    }

    // group the factors by attaching node
    let mut packets_match = inst.gamma_x_exponent == 0
        && inst
            .gamma_factors
            .iter()
            .all(|g| matches!(g.attach, TreePoint::Node(v) if v != 0));
    let mut observed = Vec::new();
    let mut ratios_match = true;
    for v in 1..t.nodes.len() {
        let members: Vec<&GammaFactor> = inst
            .gamma_factors
            .iter()
            .filter(|g| g.attach == TreePoint::Node(v))
            .collect();
        let x_degree: u64 = members.iter().map(|g| g.degree * g.multiplicity).sum();
        let mut ratios = Vec::new();
        if x_degree > 0 {
            for i in 0..inst.branches.len() {
                // i_0(packet, f_i) = sum of d(w, f_i) * i_0(w, x) * i_0(f_i, x)
                let mut acc = ExtRat::Finite(rat_int(0));
                for g in members.iter() {
                    let term = match g.dists[i] {
                        ExtRat::Infinity => ExtRat::Infinity,
                        ExtRat::Finite(d) => ExtRat::Finite(
                            d * rat_int((g.degree * g.multiplicity) as i128)
                                * rat_int(branch_degrees[i] as i128),
                        ),
                    };
                    acc = match (acc, term) {
                        (ExtRat::Finite(a), ExtRat::Finite(b)) => ExtRat::Finite(a + b),
                        _ => ExtRat::Infinity,
                    };
                }
                ratios.push(match acc {
                    ExtRat::Finite(a) => ExtRat::Finite(a / rat_int(x_degree as i128)),
                    ExtRat::Infinity => ExtRat::Infinity,
                });
            }
        }
        let pred = &predicted[v - 1];
        if x_degree != pred.x_degree {
            packets_match = false;
        }
        if x_degree > 0 {
            let pred_ok = !pred.ratios.is_empty()
                && ratios
                    .iter()
                    .zip(pred.ratios.iter())
                    .all(|(o, p)| *o == ExtRat::Finite(*p));
            if !pred_ok {
                ratios_match = false;
            }
        }
        observed.push(ObservedBlock { node: v, x_degree, ratios });
    }

    let samples: Vec<BalanceSample> = balance_points(inst, p)
        .iter()
        .map(|q| balance_at(inst, q))
        .collect();
    let balanced = samples.iter().all(|s| s.ok);
    let agreement = packets_match == balanced;
    let verdict = packets_match && balanced && ratios_match;
    DecompositionReport {
        tree: t.clone(),
        branch_degrees,
        conditions,
        predicted,
        observed,
        gamma_x_exponent: inst.gamma_x_exponent,
        factors,
        packets_match,
        ratios_match,
        balanced,
        samples,
        agreement,
        degraded: false,
        verdict,
    }
}

// ---------------------------------------------------------------------------
// The sum identity
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumIdentity {
    /// sum_i d(f_i, Q) i_0(f_i, x) - sum_j d(w_j, Q) i_0(w_j, x), where
    /// d(h, Q) is the contact of the meet of Q with the attaching point of h.
    pub lhs: Rat,
    /// Value of the exponent function at Q.
    pub e: Rat,
    pub ok: bool,
}

/// The weighted contact sums of f and of its derivative at a non-leaf point
/// differ exactly by the exponent function (valid when the decomposition
/// balance holds).
pub fn sum_identity_check(inst: &PolarInstance, q: &TreePoint) -> Result<SumIdentity> {
    let t = &inst.tree;
    if let TreePoint::Node(v) = q {
        if t.nodes[*v].children.is_empty() && *v != 0 {
            return Err(Error::Degenerate(String::from(
                "the sum identity is stated at non-leaf points",
            )));
        }
    }
    let mut lhs = rat_int(0);
    for (b, &leaf) in t.leaves.iter().enumerate() {
        let m = t.meet(&TreePoint::Node(leaf), q);
        let c = t.functions_at(&m).0.expect_finite("meet below a leaf");
        lhs += c * rat_int((t.multiplicities[b] * t.nodes[leaf].i) as i128);
    }
    for g in &inst.gamma_factors {
        let m = t.meet(&g.attach, q);
        let c = t.functions_at(&m).0.expect_finite("meet below a leaf");
        lhs -= c * rat_int((g.degree * g.multiplicity) as i128);
    }
    // a power of x in the derivative attaches at the root and contributes 0
    let e = t.functions_at(q).2.expect_finite("exponent at a non-leaf point");
    Ok(SumIdentity { lhs, e, ok: lhs == e })
}

// ---------------------------------------------------------------------------
// The order gap along an arc
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdGap {
    /// (i_0(f, g) - i_0(derivative, g)) / i_0(g, x)
    ///   = ord f(x, a(x)) - ord f_y(x, a(x)) for a root a of g.
    pub gap: Rat,
    /// Exponent function at the attaching point of g.
    pub e: Rat,
    pub attach: TreePoint,
    pub ok: bool,
}

/// Order gap between f and its derivative along an arc: `g` must be an
/// exact irreducible distinguished germ, not a component of f or of the
/// derivative, whose attaching point stays on the tree of f.
pub fn ord_gap_check(inst: &PolarInstance, g: &Bivar) -> Result<OrdGap> {
    let ng = match g.ord_y_at_zero()? {
        Some(v) if Some(v) == g.degree_y() && v >= 1 => v as u64,
        _ => {
            return Err(Error::NotRegular(String::from(
                "the arc must be a distinguished polynomial",
            )))
        }
    };
    let i0f = match intersection_multiplicity(&inst.f, g)? {
        ExtRat::Finite(v) => v,
        ExtRat::Infinity => return Err(Error::VanishesOnBranch),
    };
    let i0g = match intersection_multiplicity(&inst.gamma, g)? {
        ExtRat::Finite(v) => v,
        ExtRat::Infinity => return Err(Error::VanishesOnBranch),
    };
    let gap = (i0f - i0g) / rat_int(ng as i128);
    let mut dists = Vec::with_capacity(inst.branches.len());
    for b in &inst.branches {
        let i0 = i0_weierstrass_trunc(g, b)?;
        if i0 == ExtRat::Infinity {
            return Err(Error::VanishesOnBranch);
        }
        dists.push(log_distance_from(
            i0,
            ExtRat::Finite(rat_int(ng as i128)),
            ExtRat::Finite(rat_int(deg_y_of(b) as i128)),
        )?);
    }
    let attach = inst.tree.attach_point(&dists)?;
    // the arc must not contact a factor of the derivative beyond that
    // factor's own attaching point, otherwise its attaching point to the
    // combined tree leaves the tree of f
    for gf in &inst.gamma_factors {
        let c_a = inst.tree.functions_at(&gf.attach).0;
        let i0 = i0_weierstrass_trunc(g, &gf.w)?;
        let d = log_distance_from(
            i0,
            ExtRat::Finite(rat_int(ng as i128)),
            ExtRat::Finite(rat_int(gf.degree as i128)),
        )?;
        if d > c_a {
            return Err(Error::PointOffTree);
        }
    }
    let e = inst
        .tree
        .functions_at(&attach)
        .2
        .expect_finite("attaching point of a non-component arc");
    Ok(OrdGap { gap, e, attach, ok: gap == e })
}

// ---------------------------------------------------------------------------
// Edge data after shifting by a truncated root
// ---------------------------------------------------------------------------

/// Index and exponent of a single branch at a given contact value.
fn branch_index_e_at(semi: &SemigroupData, c: Rat) -> (u64, Rat) {
    let marked = marked_contacts(semi);
    let mut i = 1u64;
    let mut e = rat_int(0);
    let mut prev = rat_int(0);
    for &(m, idx) in &marked {
        if m < c {
            e += rat_int(i as i128) * (m - prev);
            prev = m;
            i = idx;
        } else {
            break;
        }
    }
    e += rat_int(i as i128) * (c - prev);
    (i, e)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeReport {
    /// Contact of the arc with the branch: ord f(x, a(x)) / deg_y f.
    pub contact: Rat,
    /// Inclination of the steepest compact edge of f(x, y + a(x)).
    pub inclination: Rat,
    /// Exponent function at the contact point: the predicted inclination.
    pub expected_inclination: Rat,
    /// Endpoint of the edge with the larger y-exponent, as (x, y) exponents.
    pub upper: (Rat, Rat),
    /// Predicted height of the edge: i_0(f, x) / index at the contact point.
    pub expected_height: Rat,
    /// Endpoint with y-exponent zero.
    pub lower: (Rat, Rat),
    /// Predicted lower endpoint: (ord f(x, a(x)), 0).
    pub expected_lower: (Rat, Rat),
    /// The edge restriction is a power of a single linear factor.
    pub linear_power: bool,
    pub ok: bool,
}

fn steepest_edge_data(w: &Bivar, alpha: &Series) -> Result<(Bivar, crate::newton::Edge, Rat)> {
    let s = w.eval_series(alpha);
    let o = match s.ord()? {
        ExtRat::Finite(v) => v,
        ExtRat::Infinity => return Err(Error::VanishesOnBranch),
    };
    let shifted = w.shift_y(alpha);
    let nd = newton_polygon(&shifted)?;
    let edge = nd
        .edges
        .last()
        .ok_or_else(|| Error::Degenerate(String::from("the shifted germ has no compact edge")))?
        .clone();
    Ok((shifted, edge, o))
}

/// The steepest compact edge of f(x, y + a(x)) against the tree prediction:
/// its inclination is the exponent function at the contact point of the arc
/// with the branch, its height is i_0(f, x) over the index there, and it
/// reaches the axis at ord f(x, a(x)).
pub fn edge_endpoint_check(w: &Bivar, alpha: &Series) -> Result<EdgeReport> {
    let d = deg_y_of(w);
    let (shifted, edge, o) = steepest_edge_data(w, alpha)?;
    let contact = o / rat_int(d as i128);
    let semi = semigroup_of_branch(w)?;
    let (idx, e) = branch_index_e_at(&semi, contact);
    let expected_height = rat(d as i128, idx as i128);
    let ep = edge_polynomial(&shifted, &edge)?;
    let sr = roots_split(&ep.phi)?;
    let linear_power = sr.roots.len() == 1;
    let inclination = edge.inclination();
    let upper = edge.from;
    let lower = edge.to;
    let expected_lower = (o, rat_int(0));
    let ok = inclination == e
        && upper.1 == expected_height
        && lower == expected_lower;
    Ok(EdgeReport {
        contact,
        inclination,
        expected_inclination: e,
        upper,
        expected_height,
        lower,
        expected_lower,
        linear_power,
        ok,
    })
}

#[derive(Debug, Clone)]
pub struct DeeperContact {
    /// Embedding of the input field into the field of the correction term.
    pub embedding: Embedding,
    /// Correction coefficient: ord f(x, a(x) + c x^nu) exceeds ord f(x, a(x)).
    pub c: Fq,
    /// Exponent of the correction term (the steepest edge's inclination).
    pub nu: Rat,
    /// ord f(x, a(x)).
    pub old_order: Rat,
    /// The strict increase was confirmed by substitution.
    pub deeper: bool,
}

/// Find a correction term c x^nu strictly increasing the contact of the arc
/// with the branch: c is a root of the steepest edge's restriction, living
/// in an extension when that restriction does not split.
pub fn deeper_contact_search(w: &Bivar, alpha: &Series) -> Result<DeeperContact> {
    let (shifted, edge, o) = steepest_edge_data(w, alpha)?;
    let nu = edge.inclination();
    let ep = edge_polynomial(&shifted, &edge)?;
    let sr = roots_split(&ep.phi)?;
    let (c, _) = sr
        .roots
        .first()
        .cloned()
        .ok_or_else(|| Error::Degenerate(String::from("edge restriction has no roots")))?;
    let w_e = w.embed(&sr.embedding);
    let alpha_e = alpha.embed(&sr.embedding);
    let corrected = alpha_e.add(&Series::monomial(c.clone(), nu));
    let s = w_e.eval_series(&corrected);
    let deeper = match s.iter().next() {
        Some((e, _)) => e > o,
        None => match s.precision() {
            Some(p) => p > o,
            None => true, // exactly zero: the corrected arc is a full root
        },
    };
    Ok(DeeperContact { embedding: sr.embedding, c, nu, old_order: o, deeper })
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldDescriptor;
    use crate::tree::NodeKind;

    fn gf(p: u64) -> Arc<FieldDescriptor> {
        FieldDescriptor::prime(p).unwrap()
    }

    // f1 = y^2 + x^3, f2 = y^3 + x^4, f3 = (y^3 + x^4)^2 + x^9: the tree has
    // a ramification point P at contact 4/3, the second marked point Q of f1
    // at 3/2, and a ramification point T of f2, f3 at 3/2 with exponent 11/6
    fn three_branch_germ(desc: &Arc<FieldDescriptor>) -> Bivar {
        let f1 = Bivar::from_terms(desc, &[(0, 2, 1), (3, 0, 1)]);
        let f2 = Bivar::from_terms(desc, &[(0, 3, 1), (4, 0, 1)]);
        let f3 = f2.mul(&f2).add(&Bivar::from_terms(desc, &[(9, 0, 1)]));
        f1.mul(&f2).mul(&f3)
    }

    fn node_at(t: &EggersWallTree, c: Rat, e: Rat) -> usize {
        t.nodes
            .iter()
            .position(|n| n.c == ExtRat::Finite(c) && n.e == ExtRat::Finite(e))
            .expect("node with the given coordinates")
    }

    #[test]
    fn three_branch_prediction_verified() {
        let desc = gf(5);
        let f = three_branch_germ(&desc);
        let inst = analyze(&f).unwrap();
        let rep = report(&inst);
        assert!(rep.conditions.divisibility);
        assert!(rep.conditions.index_condition);
        assert!(rep.packets_match && rep.balanced && rep.ratios_match);
        assert!(rep.agreement && rep.verdict && !rep.degraded);

        let t = &rep.tree;
        let p = node_at(t, rat(4, 3), rat(4, 3));
        let q = node_at(t, rat(3, 2), rat(3, 2));
        let tt = node_at(t, rat(3, 2), rat(11, 6));
        let xdeg = |v: usize| rep.observed.iter().find(|b| b.node == v).unwrap().x_degree;
        assert_eq!(xdeg(p), 3);
        assert_eq!(xdeg(q), 1);
        assert_eq!(xdeg(tt), 6);
        let total: u64 = rep.observed.iter().map(|b| b.x_degree).sum();
        assert_eq!(total, 10); // deg_y f - 1

        // sum identity at the interior nodes and at the root
        for (v, e) in [(p, rat(4, 3)), (tt, rat(11, 6)), (0, rat_int(0))] {
            let s = sum_identity_check(&inst, &TreePoint::Node(v)).unwrap();
            assert!(s.ok, "sum identity at node {v}: {:?}", s);
            assert_eq!(s.e, e);
        }
        // and at an interior edge point
        let mid = t.mk_point(p, rat(7, 6));
        let s = sum_identity_check(&inst, &mid).unwrap();
        assert!(s.ok);
        assert_eq!(s.e, rat(7, 6));
    }

    // f = y (y^2 + x^3): the behavior of the derivative switches with the
    // characteristic exactly as the divisibility conditions predict
    fn cusp_times_axis(desc: &Arc<FieldDescriptor>) -> Bivar {
        Bivar::from_terms(desc, &[(0, 3, 1), (3, 1, 1)])
    }

    #[test]
    fn tame_characteristic_single_packet() {
        let desc = gf(5);
        let rep = verify_decomposition(&cusp_times_axis(&desc)).unwrap();
        assert!(rep.verdict && rep.conditions.divisibility);
        let t = &rep.tree;
        let p = node_at(t, rat(3, 2), rat(3, 2));
        assert_eq!(t.nodes[p].kind, NodeKind::Ramification);
        for b in &rep.observed {
            assert_eq!(b.x_degree, if b.node == p { 2 } else { 0 });
        }
    }

    #[test]
    fn shared_branch_breaks_balance_at_its_leaf() {
        // char 2: the derivative of y^3 + x^3 y is y^2 + x^3, a branch of f
        let desc = gf(2);
        let rep = verify_decomposition(&cusp_times_axis(&desc)).unwrap();
        assert!(!rep.verdict && !rep.packets_match && !rep.balanced && rep.agreement);
        let t = &rep.tree;
        // the whole derivative attaches at the leaf of the shared branch
        assert_eq!(rep.factors.len(), 1);
        let (deg, mult, certified, attach) = rep.factors[0].clone();
        assert_eq!((deg, mult, certified), (2, 1, true));
        let leaf = match attach {
            TreePoint::Node(v) => v,
            _ => panic!("attach at a node"),
        };
        assert_eq!(t.nodes[leaf].kind, NodeKind::Leaf);
        assert_eq!(t.nodes[leaf].i, 2);
        // the balance fails exactly at that leaf
        for s in &rep.samples {
            assert_eq!(!s.ok, s.point == TreePoint::Node(leaf), "at {:?}", s);
        }
        // and the divisibility condition fails exactly there too
        for c in &rep.conditions.points {
            assert_eq!(!c.divisibility, c.node == leaf);
        }
    }

    #[test]
    fn derivative_collapses_to_a_power_of_x() {
        // char 3: the derivative of y^3 + x^3 y is x^3
        let desc = gf(3);
        let rep = verify_decomposition(&cusp_times_axis(&desc)).unwrap();
        assert!(!rep.verdict && !rep.packets_match && !rep.balanced && rep.agreement);
        assert_eq!(rep.gamma_x_exponent, 3);
        assert!(rep.factors.is_empty());
        let t = &rep.tree;
        let p = node_at(t, rat(3, 2), rat(3, 2));
        let bad: Vec<usize> = rep
            .conditions
            .points
            .iter()
            .filter(|c| !c.divisibility)
            .map(|c| c.node)
            .collect();
        assert_eq!(bad, vec![p]);
        // balance fails at P (0 against 3 - 1) and nowhere above it
        let at = |v: usize| rep.samples.iter().find(|s| s.point == TreePoint::Node(v)).unwrap();
        assert!(!at(p).ok);
        assert_eq!(at(p).expected, 2);
        for &leaf in &t.leaves {
            assert!(at(leaf).ok);
        }
    }

    #[test]
    fn attachment_in_the_middle_of_an_edge() {
        // char 3: f = y (y^2 + y^3 + x^5) has derivative y^3 + x^5, which
        // attaches at exponent 5/3 strictly between the root and the
        // ramification point at contact 5/2
        let desc = gf(3);
        let f = Bivar::from_terms(&desc, &[(0, 3, 1), (0, 4, 1), (5, 1, 1)]);
        let inst = analyze(&f).unwrap();
        let rep = report(&inst);
        assert!(!rep.verdict && !rep.packets_match && !rep.balanced && rep.agreement);
        let t = &rep.tree;
        let p = node_at(t, rat(5, 2), rat(5, 2));
        // the index condition holds at P even though divisibility fails
        let pc = rep.conditions.points.iter().find(|c| c.node == p).unwrap();
        assert!(!pc.divisibility && pc.index_condition);
        assert!(rep.conditions.index_condition);
        // single factor of degree 3 attaching mid-edge at c = e = 5/3
        assert_eq!(rep.factors.len(), 1);
        let attach = &rep.factors[0].3;
        assert!(matches!(attach, TreePoint::Edge { .. }));
        let (c, _, e) = t.functions_at(attach);
        assert_eq!(c, ExtRat::Finite(rat(5, 3)));
        assert_eq!(e, ExtRat::Finite(rat(5, 3)));
        // some sampled point strictly between the attaching point and P
        // sees 0 against i_0(f_Q, x) - i(Q) = 3 - 1 = 2
        assert!(rep.samples.iter().any(|s| {
            s.contact > ExtRat::Finite(rat(5, 3))
                && s.contact < ExtRat::Finite(rat(5, 2))
                && s.observed == ExtRat::Finite(rat_int(0))
                && s.expected == 2
                && !s.ok
        }));
    }

    #[test]
    fn order_gap_along_an_arc() {
        // f = y^2 + x^3 over GF(5); the arc y^2 + 3x^2 y + x^4 + x^3 is the
        // minimal polynomial of 2 x^(3/2) + x^2, with contact 7/4 and
        // exponent value 3/2 + 2 (7/4 - 3/2) = 2
        let desc = gf(5);
        let f = Bivar::from_terms(&desc, &[(0, 2, 1), (3, 0, 1)]);
        let inst = analyze(&f).unwrap();
        let g = Bivar::from_terms(&desc, &[(0, 2, 1), (2, 1, 3), (4, 0, 1), (3, 0, 1)]);
        let og = ord_gap_check(&inst, &g).unwrap();
        assert!(og.ok);
        assert_eq!(og.gap, rat_int(2));
        assert_eq!(og.e, rat_int(2));
        assert_eq!(
            inst.tree.functions_at(&og.attach).0,
            ExtRat::Finite(rat(7, 4))
        );

        // y - x^2 contacts the derivative's branch y beyond that branch's
        // attaching point, so its attaching point leaves the tree of f
        let bad = Bivar::from_terms(&desc, &[(0, 1, 1), (2, 0, -1)]);
        assert!(matches!(ord_gap_check(&inst, &bad), Err(Error::PointOffTree)));
    }

    #[test]
    fn steepest_edge_of_a_shifted_cusp() {
        let desc = gf(5);
        let w = Bivar::from_terms(&desc, &[(0, 2, 1), (3, 0, 1)]);
        let alpha = Series::monomial(desc.one(), rat_int(2));
        let er = edge_endpoint_check(&w, &alpha).unwrap();
        assert!(er.ok);
        assert_eq!(er.contact, rat(3, 2));
        assert_eq!(er.inclination, rat(3, 2));
        assert_eq!(er.upper, (rat_int(0), rat_int(2)));
        assert_eq!(er.lower, (rat_int(3), rat_int(0)));
        // z^2 + 1 has two distinct roots over GF(5)
        assert!(!er.linear_power);

        let dc = deeper_contact_search(&w, &alpha).unwrap();
        assert!(dc.deeper);
        assert!(dc.embedding.is_identity());
        assert_eq!(dc.nu, rat(3, 2));
        assert_eq!(dc.old_order, rat_int(3));
        let two = desc.from_u64(2);
        let three = desc.from_u64(3);
        assert!(dc.c == two || dc.c == three);
    }

    #[test]
    fn deeper_contact_needs_an_extension_in_char_three() {
        // z^2 + 1 is irreducible over GF(3), so the correction coefficient
        // lives in GF(9)
        let desc = gf(3);
        let w = Bivar::from_terms(&desc, &[(0, 2, 1), (3, 0, 1)]);
        let alpha = Series::monomial(desc.one(), rat_int(2));
        let dc = deeper_contact_search(&w, &alpha).unwrap();
        assert!(dc.deeper);
        assert_eq!(dc.embedding.target().degree(), 2);
    }

    #[test]
    fn edge_of_a_root_truncation_is_a_linear_power() {
        // w = (y^3 + x^4)^2 + x^9 over GF(5); shifting by the truncation
        // 4 x^(4/3) of a root exposes the steepest edge with inclination
        // 11/6 = e at contact 3/2, height 2 = 6/3, reaching the axis at 9
        let desc = gf(5);
        let f2 = Bivar::from_terms(&desc, &[(0, 3, 1), (4, 0, 1)]);
        let w = f2.mul(&f2).add(&Bivar::from_terms(&desc, &[(9, 0, 1)]));
        let alpha = Series::monomial(desc.from_u64(4), rat(4, 3));
        let er = edge_endpoint_check(&w, &alpha).unwrap();
        assert!(er.ok, "{er:?}");
        assert_eq!(er.contact, rat(3, 2));
        assert_eq!(er.inclination, rat(11, 6));
        assert_eq!(er.expected_height, rat_int(2));
        assert_eq!(er.lower, (rat_int(9), rat_int(0)));
        assert!(er.linear_power);
    }
}
