//! Local branch decomposition of a Weierstrass polynomial and everything a
//! single branch carries: Newton-Puiseux expansions on the tame path,
//! parametrizations (with a y^p-deflation route for the wild-but-reducible
//! case), semigroups of values, characteristic sequences, key polynomials,
//! and orders of coincidence.
//!
//! The decomposition is a recursive Newton-polygon splitting: factors with
//! distinct polygon slopes, or distinct roots of an edge polynomial, are
//! separated by Hensel lifting; perfect powers are peeled off before each
//! step so multiple factors cannot stall the recursion; a single-edge germ
//! whose edge polynomial is linear is certified irreducible. Every step that
//! extends the coefficient field carries an explicit `Embedding`, and
//! results computed over independently discovered extensions are only ever
//! combined through `join_embeddings`, so conjugates never get mixed up.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;
use num_traits::Signed;

use crate::bivar::{hensel_lift, weierstrass, Bivar};
use crate::error::{Error, Result};
use crate::gf::{
    join_embeddings, prime_factors, roots_split, with_root_of_unity, Embedding,
    FieldDescriptor, Fq, Poly,
};
use crate::newton::{edge_polynomial, newton_polygon};
use crate::rat::{rat, rat_int, ExtRat, Rat};
use crate::series::Series;

/// How much we can promise about a factor's irreducibility.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certificate {
    /// Reached through the recursion down to a linear edge polynomial; the
    /// factor is irreducible (to the stated precision of its coefficients).
    Certified,
    /// A wild step (edge denominator divisible by p with a single edge root)
    /// could not be resolved; the factor is returned whole.
    Uncertain,
}

/// One local irreducible (or possibly-irreducible) factor.
#[derive(Debug, Clone)]
pub struct Branch {
    /// Monic distinguished polynomial, exact or truncated to a certified
    /// precision.
    pub w: Bivar,
    pub certificate: Certificate,
    /// Filled in lazily by `parametrization`.
    pub parametrization: Option<Parametrization>,
    /// Filled in lazily by `semigroup_of_branch`.
    pub semigroup: Option<SemigroupData>,
}

impl Branch {
    pub fn new(w: Bivar, certificate: Certificate) -> Branch {
        Branch { w, certificate, parametrization: None, semigroup: None }
    }
}

/// A primitive parametrization t -> (x(t), y(t)) of a branch.
#[derive(Debug, Clone)]
pub struct Parametrization {
    /// x(t); always a monomial t^n here, with n the degree of the branch.
    pub x_t: Series,
    /// y(t), truncated to the certified precision.
    pub y_t: Series,
}

/// Full output of `branch_decompose`: f = x^a * unit * prod factors^mult,
/// all over `field`, certified modulo x^precision.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub field: Arc<FieldDescriptor>,
    /// Embedding of the input field into `field`.
    pub embedding: Embedding,
    /// Power of x dividing the input.
    pub x_exponent: u64,
    /// Unit factor (nonzero at the origin), truncated.
    pub unit: Bivar,
    pub factors: Vec<(Branch, u64)>,
    /// The product of the parts reproduces the input modulo x^precision.
    pub precision: Rat,
}

/// Factorization of a single monic germ, all factors over one field reached
/// by `embedding` from the input field.
#[derive(Debug, Clone)]
pub struct SplitFactors {
    pub embedding: Embedding,
    pub factors: Vec<(Bivar, u64, Certificate)>,
}

fn embed_factors(
    factors: Vec<(Bivar, u64, Certificate)>,
    emb: &Embedding,
) -> Vec<(Bivar, u64, Certificate)> {
    if emb.is_identity() {
        return factors;
    }
    factors
        .into_iter()
        .map(|(g, m, c)| (g.embed(emb), m, c))
        .collect()
}

/// Combine two factor lists computed over independently discovered
/// extensions of the same field, moving both into a common field through a
/// commuting square of embeddings.
fn merge_splits(a: SplitFactors, b: SplitFactors) -> Result<SplitFactors> {
    let (_, j1, j2) = join_embeddings(&a.embedding, &b.embedding)?;
    let mut factors = embed_factors(a.factors, &j1);
    factors.extend(embed_factors(b.factors, &j2));
    Ok(SplitFactors { embedding: a.embedding.compose(&j1), factors })
}

// ---------------------------------------------------------------------------
// Perfect-power extraction
// ---------------------------------------------------------------------------

/// If w = q^p (characteristic p), return q. In characteristic p this holds
/// iff every support point (i, j) of w has p | i and p | j; then q is read
/// off by dividing exponents and taking coefficient p-th roots.
fn try_pth_power_root(w: &Bivar) -> Option<Bivar> {
    let desc = w.field().clone();
    let p = desc.characteristic() as usize;
    let d = w.degree_y()?;
    if d == 0 || d % p != 0 {
        return None;
    }
    let mut coeffs = Vec::with_capacity(d / p + 1);
    for (j, s) in w.coeffs().iter().enumerate() {
        if j % p != 0 {
            if !s.is_empty() {
                return None;
            }
            continue;
        }
        for (e, _) in s.iter() {
            if !e.is_integer() || e.to_integer() % p as i128 != 0 {
                return None;
            }
        }
        coeffs.push(s.pth_root());
    }
    Some(Bivar::from_coeffs(&desc, coeffs))
}

/// If w = q^ell for a prime ell != p, return q, found by x-adic lifting of
/// q from its initial term y^(d/ell): at each x-order the correction is
/// e_m / (ell * y^(k(ell-1))) and a failed division proves w is not an
/// ell-th power (modulo the working precision).
fn try_tame_power_root(w: &Bivar, ell: u64, prec: Rat) -> Result<Option<Bivar>> {
    let desc = w.field().clone();
    let d = match w.degree_y() {
        Some(d) => d,
        None => return Ok(None),
    };
    if d == 0 || d as u64 % ell != 0 {
        return Ok(None);
    }
    let k = d / ell as usize;
    let mut stop = prec;
    for s in w.coeffs() {
        if let Some(pp) = s.precision() {
            stop = stop.min(pp);
        }
        for (e, _) in s.iter() {
            if !e.is_integer() {
                return Ok(None);
            }
        }
    }
    if stop <= rat_int(0) {
        return Ok(None);
    }
    let linv = match desc.from_u64(ell).inv() {
        Ok(v) => v,
        Err(_) => return Ok(None), // ell divisible by p, handled elsewhere
    };
    let shift = k * (ell as usize - 1);
    let mut q = {
        let mut c = vec![Series::zero(&desc); k + 1];
        c[k] = Series::one(&desc);
        Bivar::from_coeffs(&desc, c)
    };
    loop {
        let e = w.sub(&q.pow(ell));
        let mut o: Option<Rat> = None;
        for s in e.coeffs() {
            if let Some((ee, _)) = s.iter().next() {
                o = Some(match o {
                    Some(b) => b.min(ee),
                    None => ee,
                });
            }
        }
        let o = match o {
            Some(v) if v <= rat_int(0) => {
                // a nontrivial discrepancy already at x^0: not a power
                let _ = v;
                return Ok(None);
            }
            Some(v) if v < stop => v,
            _ => {
                // w = q^ell to the working precision
                let exact = e.coeffs().iter().all(Series::is_zero_exact);
                return Ok(Some(if exact { q } else { q.truncate(stop) }));
            }
        };
        let mut dq = vec![desc.zero(); k];
        for (j, s) in e.coeffs().iter().enumerate() {
            let c = s.coeff(o)?;
            if c.is_zero() {
                continue;
            }
            if j < shift || j - shift >= k {
                return Ok(None);
            }
            dq[j - shift] = c.mul(&linv);
        }
        let dqv: Vec<Series> = dq
            .into_iter()
            .map(|c| {
                if c.is_zero() {
                    Series::zero(&desc)
                } else {
                    Series::monomial(c, o)
                }
            })
            .collect();
        q = q.add(&Bivar::from_coeffs(&desc, dqv));
    }
}

fn conj_bivar(b: &Bivar, zeta: &Fq, order: u64) -> Bivar {
    Bivar::from_coeffs(
        b.field(),
        b.coeffs().iter().map(|s| s.conjugate_wrt(zeta, order, 1)).collect(),
    )
}

/// Equality of two germs up to the precision both carry.
fn bivar_matches(a: &Bivar, b: &Bivar) -> bool {
    a.degree_y() == b.degree_y()
        && a.sub(b).coeffs().iter().all(Series::is_empty)
}

/// Descend a mu_delta-invariant germ along the cover x -> x^delta.
fn unramify_bivar(b: &Bivar, delta: u64) -> Result<Bivar> {
    for s in b.coeffs() {
        for (e, _) in s.iter() {
            if !e.is_integer() || e.to_integer() % delta as i128 != 0 {
                return Err(Error::Degenerate(format!(
                    "orbit product exponent {} not divisible by the cover degree {}",
                    ExtRat::Finite(e),
                    delta
                )));
            }
        }
    }
    Ok(Bivar::from_coeffs(
        b.field(),
        b.coeffs().iter().map(|s| s.unramify(delta)).collect(),
    ))
}

// ---------------------------------------------------------------------------
// The splitting recursion
// ---------------------------------------------------------------------------

/// Factor a monic distinguished polynomial (w(0,y) = y^deg) into local
/// branches, each tagged CERTIFIED or UNCERTAIN, to the working precision
/// `prec`. The product of the factors with multiplicities reproduces w
/// modulo the precision its coefficients end up carrying.
pub fn newton_split(w: &Bivar, prec: Rat) -> Result<SplitFactors> {
    let cap = 4 * prec.ceil().to_integer().unsigned_abs().max(16) as usize + 64;
    split_inner(w, prec, cap)
}

fn split_inner(w: &Bivar, prec: Rat, fuel: usize) -> Result<SplitFactors> {
    if fuel == 0 {
        return Err(Error::PrecisionExhausted(String::from(
            "splitting recursion exceeded its depth budget",
        )));
    }
    let fuel = fuel - 1;
    let desc = w.field().clone();
    let ident = Embedding::identity(&desc);
    let d = match w.degree_y() {
        Some(d) => d,
        None => return Ok(SplitFactors { embedding: ident, factors: vec![] }),
    };
    debug_assert!(
        w.coeffs()
            .last()
            .and_then(|s| s.iter().next())
            .map_or(false, |(e, c)| e == rat_int(0) && *c == desc.one()),
        "newton_split wants a monic input"
    );
    if d == 0 {
        return Ok(SplitFactors { embedding: ident, factors: vec![] });
    }
    if d == 1 {
        return Ok(SplitFactors {
            embedding: ident,
            factors: vec![(w.clone(), 1, Certificate::Certified)],
        });
    }
    let p = desc.characteristic();

    // peel perfect powers first: a q^m chunk would otherwise never separate
    for (ell, _) in prime_factors(d as u64) {
        let root = if ell == p {
            try_pth_power_root(w)
        } else {
            try_tame_power_root(w, ell, prec)?
        };
        if let Some(q) = root {
            let mut sub = split_inner(&q, prec, fuel)?;
            for f in &mut sub.factors {
                f.1 *= ell;
            }
            return Ok(sub);
        }
    }

    let nd = newton_polygon(w)?;
    let e0 = match nd.edges.first() {
        Some(e) => e.clone(),
        None => {
            return Err(Error::Degenerate(String::from(
                "polygon of a non-power monic germ has no edge",
            )))
        }
    };
    let nu = e0.inclination();
    if nu <= rat_int(0) {
        return Err(Error::NotRegular(String::from(
            "zero-inclination edge: input is not a distinguished polynomial",
        )));
    }

    if nd.edges.len() > 1 {
        // split the lowest-inclination edge off the rest by Hensel lifting
        let j2 = e0.to.1.to_integer() as usize;
        let wt = w.downshift_edge(nu);
        let face = wt.at_x_zero()?;
        if face.coeffs()[..j2].iter().any(|a| !a.is_zero()) {
            return Err(Error::Degenerate(String::from(
                "edge face not divisible by its endpoint power",
            )));
        }
        let g0 = Poly::monomial(&desc, desc.one(), j2);
        let h0 = Poly::from_coeffs(&desc, face.coeffs()[j2..].to_vec());
        let (g, h) = hensel_lift(&wt, &g0, &h0, prec)?;
        let sub_g = split_inner(&g.upshift_edge(nu), prec, fuel)?;
        let sub_h = split_inner(&h.upshift_edge(nu), prec, fuel)?;
        return merge_splits(sub_g, sub_h);
    }

    // single edge
    let ep = edge_polynomial(w, &e0)?;
    let delta = ep.step;
    if ep.phi.degree() == Some(1) {
        // linear edge polynomial: irreducible (edge height and length are
        // coprime up to the lattice step, which a linear phi pins down)
        return Ok(SplitFactors {
            embedding: ident,
            factors: vec![(w.clone(), 1, Certificate::Certified)],
        });
    }
    let sr = roots_split(&ep.phi)?;
    let e_desc = sr.field.clone();
    let w_e = w.embed(&sr.embedding);

    if sr.roots.len() >= 2 {
        // separate the root clusters of the edge polynomial; in downshifted
        // coordinates the cluster of c is seeded by (z^delta - c)^mult
        let mut cur = w_e.downshift_edge(nu);
        let mut acc =
            SplitFactors { embedding: Embedding::identity(&e_desc), factors: vec![] };
        let last = sr.roots.len() - 1;
        for (idx, (c, m)) in sr.roots.iter().enumerate() {
            let part = if idx == last {
                cur.clone()
            } else {
                let mut base = vec![e_desc.zero(); delta as usize + 1];
                base[0] = c.neg();
                base[delta as usize] = e_desc.one();
                let g0 = Poly::from_coeffs(&e_desc, base).pow(*m as u64);
                let face = cur.at_x_zero()?;
                let (h0, r) = face.divrem(&g0)?;
                if !r.is_zero() {
                    return Err(Error::Degenerate(String::from(
                        "edge face does not split along the clusters",
                    )));
                }
                let (g, h) = hensel_lift(&cur, &g0, &h0, prec)?;
                cur = h;
                g
            };
            let sub = split_inner(&part.upshift_edge(nu), prec, fuel)?;
            acc = merge_splits(acc, sub)?;
        }
        return Ok(SplitFactors {
            embedding: sr.embedding.compose(&acc.embedding),
            factors: acc.factors,
        });
    }

    let (c, _) = sr.roots[0].clone();
    if delta == 1 {
        // one root on an integral edge: move it to the origin and continue
        let alpha = Series::monomial(c, nu);
        let w2 = w_e.shift_y(&alpha);
        let sub = split_inner(&w2, prec, fuel)?;
        let alpha2 = alpha.embed(&sub.embedding).neg();
        let factors = sub
            .factors
            .into_iter()
            .map(|(g, m, cert)| (g.shift_y(&alpha2), m, cert))
            .collect();
        return Ok(SplitFactors {
            embedding: sr.embedding.compose(&sub.embedding),
            factors,
        });
    }
    if delta % p == 0 {
        // wild single-root edge: certification is out of scope
        return Ok(SplitFactors {
            embedding: ident,
            factors: vec![(w.clone(), 1, Certificate::Uncertain)],
        });
    }

    // tame ramified edge: pass to the cover x -> x^delta, where the edge
    // becomes integral, factor there, and descend by multiplying mu_delta
    // orbits back together
    let v = w_e.ramify_x(delta);
    let sub = split_inner(&v, prec * rat_int(delta as i128), fuel)?;
    let emb_to_sub = sr.embedding.compose(&sub.embedding);
    let (_, emb3, zeta) = with_root_of_unity(sub.embedding.target(), delta)?;
    let full_emb = emb_to_sub.compose(&emb3);
    let mut rem = embed_factors(sub.factors, &emb3);
    let mut factors = Vec::new();
    while let Some((b0, m0, c0)) = rem.pop() {
        let mut orbit = vec![b0.clone()];
        let mut worst = c0;
        let mut cur = conj_bivar(&b0, &zeta, delta);
        while !bivar_matches(&cur, &orbit[0]) {
            let pos = rem
                .iter()
                .position(|(g, m, _)| *m == m0 && bivar_matches(g, &cur))
                .ok_or_else(|| {
                    Error::Degenerate(String::from(
                        "conjugate factor missing from the cover decomposition",
                    ))
                })?;
            let (g, _, cg) = rem.remove(pos);
            if cg == Certificate::Uncertain {
                worst = Certificate::Uncertain;
            }
            orbit.push(g);
            cur = conj_bivar(&cur, &zeta, delta);
            if orbit.len() > delta as usize {
                return Err(Error::Degenerate(String::from(
                    "orbit larger than the deck group",
                )));
            }
        }
        let mut prod = orbit[0].clone();
        for g in &orbit[1..] {
            prod = prod.mul(g);
        }
        factors.push((unramify_bivar(&prod, delta)?, m0, worst));
    }
    Ok(SplitFactors { embedding: full_emb, factors })
}

// ---------------------------------------------------------------------------
// Top-level decomposition
// ---------------------------------------------------------------------------

/// Decompose an exact germ f = x^a * y^j * unit * prod w_i^{m_i} into local
/// branches, certified modulo x^n (the budget doubles internally until the
/// multiplied-back product matches to at least that precision).
pub fn branch_decompose(f: &Bivar, n: u64) -> Result<Decomposition> {
    if f.is_zero() {
        return Err(Error::Degenerate(String::from("decomposition of the zero germ")));
    }
    if !f.is_exact() {
        return Err(Error::Degenerate(String::from(
            "branch decomposition wants an exact input",
        )));
    }
    let target = rat_int(n.max(1) as i128);
    let mut budget = target;
    let mut last = String::from("budget exhausted");
    for _ in 0..7 {
        match decompose_once(f, budget) {
            Ok(dec) if dec.precision >= target => return Ok(dec),
            Ok(_) => {}
            Err(Error::PrecisionExhausted(m)) => last = m,
            Err(e) => return Err(e),
        }
        budget = budget * rat_int(2);
    }
    Err(Error::PrecisionExhausted(last))
}

fn decompose_once(f: &Bivar, budget: Rat) -> Result<Decomposition> {
    let desc = f.field().clone();
    let a = match f.x_content()? {
        ExtRat::Finite(v) => v,
        ExtRat::Infinity => {
            return Err(Error::Degenerate(String::from("decomposition of the zero germ")))
        }
    };
    if !a.is_integer() || a.is_negative() {
        return Err(Error::Degenerate(String::from(
            "input must be supported on nonnegative integer x-exponents",
        )));
    }
    let f1 = f.shift_x(-a);
    let j = f1
        .y_valuation()
        .ok_or_else(|| Error::Degenerate(String::from("zero germ after content removal")))?;
    let f2 = Bivar::from_coeffs(&desc, f1.coeffs()[j..].to_vec());

    let wd = weierstrass(&f2, budget)?;
    debug_assert_eq!(wd.x_exponent, rat_int(0), "x-content was already removed");
    let split = if wd.w.degree_y().unwrap_or(0) > 0 {
        newton_split(&wd.w, budget)?
    } else {
        SplitFactors { embedding: Embedding::identity(&desc), factors: vec![] }
    };
    let emb = split.embedding;
    let fld = emb.target().clone();

    let dsum: usize = split
        .factors
        .iter()
        .map(|(g, m, _)| g.degree_y().unwrap_or(0) * *m as usize)
        .sum();
    if dsum != wd.w.degree_y().unwrap_or(0) {
        return Err(Error::Degenerate(String::from(
            "factor degrees do not add up to the distinguished degree",
        )));
    }

    // assemble x^a * y^j * unit * prod and compare with f
    let unit_e = wd.unit.embed(&emb);
    let mut assembled = unit_e.clone();
    for (g, m, _) in &split.factors {
        assembled = assembled.mul(&g.pow(*m));
    }
    if j > 0 {
        let mut c = vec![Series::zero(&fld); j];
        c.extend(assembled.coeffs().iter().cloned());
        assembled = Bivar::from_coeffs(&fld, c);
    }
    assembled = assembled.shift_x(a);
    let resid = f.embed(&emb).sub(&assembled);
    let mut achieved: Option<Rat> = None;
    for s in resid.coeffs() {
        if !s.is_empty() {
            return Err(Error::Degenerate(String::from(
                "factor product does not reproduce the input",
            )));
        }
        if let Some(pq) = s.precision() {
            achieved = Some(match achieved {
                Some(b) => b.min(pq),
                None => pq,
            });
        }
    }

    let mut factors: Vec<(Branch, u64)> = Vec::new();
    if j > 0 {
        factors.push((Branch::new(Bivar::y(&fld), Certificate::Certified), j as u64));
    }
    factors.extend(
        split
            .factors
            .into_iter()
            .map(|(g, m, c)| (Branch::new(g, c), m)),
    );
    Ok(Decomposition {
        field: fld,
        embedding: emb,
        x_exponent: a.to_integer() as u64,
        unit: unit_e,
        factors,
        precision: achieved.unwrap_or(budget),
    })
}

// ---------------------------------------------------------------------------
// Newton-Puiseux expansion (tame path) and the deflation route
// ---------------------------------------------------------------------------

struct NpSplit {
    emb: Embedding,
    roots: Vec<Series>,
}

fn np_merge(a: NpSplit, b: NpSplit) -> Result<NpSplit> {
    let (_, j1, j2) = join_embeddings(&a.emb, &b.emb)?;
    let mut roots: Vec<Series> = a.roots.iter().map(|s| s.embed(&j1)).collect();
    roots.extend(b.roots.iter().map(|s| s.embed(&j2)));
    Ok(NpSplit { emb: a.emb.compose(&j1), roots })
}

fn np_roots(w: &Bivar, want: Rat, fuel: usize) -> Result<NpSplit> {
    if fuel == 0 {
        return Err(Error::PrecisionExhausted(String::from(
            "expansion recursion exceeded its depth budget",
        )));
    }
    let fuel = fuel - 1;
    let desc = w.field().clone();
    let ident = Embedding::identity(&desc);
    let d = match w.degree_y() {
        Some(d) => d,
        None => return Ok(NpSplit { emb: ident, roots: vec![] }),
    };
    if d == 0 {
        return Ok(NpSplit { emb: ident, roots: vec![] });
    }
    // exact zero roots
    let j = w.y_valuation().unwrap_or(0);
    if j > 0 && w.coeffs()[..j].iter().all(Series::is_zero_exact) {
        let rest = Bivar::from_coeffs(&desc, w.coeffs()[j..].to_vec());
        let mut sub = np_roots(&rest, want, fuel)?;
        for _ in 0..j {
            sub.roots.push(Series::zero(sub.emb.target()));
        }
        return Ok(sub);
    }
    if d == 1 {
        let root = w.coeff(0).neg();
        return Ok(NpSplit { emb: ident, roots: vec![root] });
    }

    let nd = newton_polygon(w)?;
    let e0 = match nd.edges.first() {
        Some(e) => e.clone(),
        None => {
            return Err(Error::PrecisionExhausted(String::from(
                "no certified edge to expand along",
            )))
        }
    };
    let nu = e0.inclination();
    if nu <= rat_int(0) {
        return Err(Error::NotRegular(String::from(
            "expansion wants a distinguished polynomial",
        )));
    }

    if nd.edges.len() > 1 {
        let j2 = e0.to.1.to_integer() as usize;
        let wt = w.downshift_edge(nu);
        let face = wt.at_x_zero()?;
        let g0 = Poly::monomial(&desc, desc.one(), j2);
        let h0 = Poly::from_coeffs(&desc, face.coeffs()[j2..].to_vec());
        let hp = want * rat_int(d as i128) + rat_int(1);
        let (g, h) = hensel_lift(&wt, &g0, &h0, hp)?;
        let sub_g = np_roots(&g.upshift_edge(nu), want, fuel)?;
        let sub_h = np_roots(&h.upshift_edge(nu), want, fuel)?;
        return np_merge(sub_g, sub_h);
    }

    if nu >= want {
        // all further structure is beyond the requested precision
        let roots = vec![Series::zero(&desc).truncate(want); d];
        return Ok(NpSplit { emb: ident, roots });
    }

    let ep = edge_polynomial(w, &e0)?;
    let p = desc.characteristic();
    if ep.step % p == 0 {
        return Err(Error::WildRamification { denominator: ep.step });
    }

    // roots of the full face polynomial in z = y / x^nu
    let wt = w.downshift_edge(nu);
    let face = wt.at_x_zero()?;
    let sr = roots_split(&face)?;
    let e_desc = sr.field.clone();
    let mut cur = wt.embed(&sr.embedding);
    let mut acc = NpSplit { emb: Embedding::identity(&e_desc), roots: vec![] };
    let last = sr.roots.len() - 1;
    let hp = want * rat_int(d as i128) + rat_int(1);
    for (idx, (c, m)) in sr.roots.iter().enumerate() {
        debug_assert!(!c.is_zero(), "zero roots were stripped before the polygon");
        let part = if idx == last {
            cur.clone()
        } else {
            let g0 = Poly::from_coeffs(&e_desc, vec![c.neg(), e_desc.one()]).pow(*m as u64);
            let facep = cur.at_x_zero()?;
            let (h0, r) = facep.divrem(&g0)?;
            if !r.is_zero() {
                return Err(Error::Degenerate(String::from(
                    "face does not split along its roots",
                )));
            }
            let (g, h) = hensel_lift(&cur, &g0, &h0, hp)?;
            cur = h;
            g
        };
        let alpha = Series::monomial(c.clone(), nu);
        let w2 = part.upshift_edge(nu).shift_y(&alpha);
        let sub = np_roots(&w2, want, fuel)?;
        let alpha2 = alpha.embed(&sub.emb);
        let piece = NpSplit {
            emb: sub.emb,
            roots: sub.roots.iter().map(|b| b.add(&alpha2)).collect(),
        };
        acc = np_merge(acc, piece)?;
    }
    Ok(NpSplit { emb: sr.embedding.compose(&acc.emb), roots: acc.roots })
}

/// All Puiseux roots of f (a multiset of deg_y f series, conjugates
/// included), certified below the x-order `want`, over the minimal extension
/// reached by the returned embedding. Requires every ramification arising
/// during the run to be prime to p.
pub fn newton_puiseux_expand(f: &Bivar, want: Rat) -> Result<(Embedding, Vec<Series>)> {
    let desc = f.field().clone();
    let d0 = match f.degree_y() {
        Some(d) => d,
        None => return Err(Error::Degenerate(String::from("expansion of the zero germ"))),
    };
    // prepare a distinguished polynomial if needed
    let prepared;
    let w = if f.is_monic_y()
        && f
            .at_x_zero()
            .map(|p0| {
                p0.coeffs().iter().take(d0).all(Fq::is_zero)
            })
            .unwrap_or(false)
    {
        f
    } else {
        if let ExtRat::Finite(a) = f.x_content()? {
            if a > rat_int(0) {
                return Err(Error::NotRegular(String::from(
                    "germ divisible by x has no Puiseux root expansion",
                )));
            }
        }
        let prep = weierstrass(f, (want + rat_int(1)) * rat_int(d0.max(1) as i128))?;
        prepared = prep.w;
        &prepared
    };
    let _ = desc;
    let fuel = 4 * want.ceil().to_integer().unsigned_abs().max(16) as usize + 64;
    let sub = np_roots(w, want, fuel)?;
    let roots = sub.roots.iter().map(|r| r.truncate(want)).collect();
    Ok((sub.emb, roots))
}

/// Strip y^p-structure: if f lies in K[[x]][y^p], return g with
/// f(x, y) = g(x, y^p).
fn deflate_y(f: &Bivar) -> Option<Bivar> {
    let desc = f.field().clone();
    let p = desc.characteristic() as usize;
    let d = f.degree_y()?;
    if d == 0 || d % p != 0 {
        return None;
    }
    let mut coeffs = Vec::with_capacity(d / p + 1);
    for (j, s) in f.coeffs().iter().enumerate() {
        if j % p != 0 {
            if !s.is_empty() {
                return None;
            }
        } else {
            coeffs.push(s.clone());
        }
    }
    Some(Bivar::from_coeffs(&desc, coeffs))
}

/// Puiseux roots of f, using the tame expansion where possible and the
/// y^p-deflation route where the germ lies in K[[x]][y^p]; a genuinely wild
/// germ surfaces as WildRamification.
pub fn puiseux_roots(f: &Bivar, want: Rat) -> Result<(Embedding, Vec<Series>)> {
    match newton_puiseux_expand(f, want) {
        Ok(r) => Ok(r),
        Err(Error::WildRamification { denominator }) => {
            let p = f.field().characteristic();
            let g = deflate_y(f)
                .ok_or(Error::WildRamification { denominator })?;
            let (emb, groots) = puiseux_roots(&g, want * rat_int(p as i128))?;
            let mut roots = Vec::with_capacity(groots.len() * p as usize);
            for r in &groots {
                let root = r.pth_root();
                for _ in 0..p {
                    roots.push(root.clone());
                }
            }
            Ok((emb, roots))
        }
        Err(e) => Err(e),
    }
}

/// Does the germ have a Puiseux root? Decided structurally: yes when the
/// degree is prime to p or a chain of y^p-deflations reaches such a degree;
/// no when p divides the degree but the germ is not in K[[x]][y^p]; unknown
/// when that criterion only fails below the top level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootExistence {
    Yes,
    No,
    Unknown,
}

pub fn has_puiseux_roots(f: &Bivar) -> RootExistence {
    let p = f.field().characteristic();
    let mut cur = f.clone();
    let mut depth = 0usize;
    loop {
        let d = match cur.degree_y() {
            Some(d) if d > 0 => d,
            _ => return RootExistence::Unknown,
        };
        if d as u64 % p != 0 {
            return RootExistence::Yes;
        }
        match deflate_y(&cur) {
            Some(g) => {
                cur = g;
                depth += 1;
            }
            None => {
                return if depth == 0 { RootExistence::No } else { RootExistence::Unknown }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Parametrizations
// ---------------------------------------------------------------------------

/// A primitive parametrization of an irreducible germ: x = t^n with
/// n = deg_y w, y(t) certified below t-order n*want. The wild case is
/// handled through y^p-deflation when the germ lies in K[[x]][y^p];
/// otherwise NoParametrization.
pub fn parametrization(w: &Bivar, want: Rat) -> Result<(Embedding, Parametrization)> {
    let d = w
        .degree_y()
        .ok_or_else(|| Error::Degenerate(String::from("parametrization of the zero germ")))?;
    if d == 0 {
        return Err(Error::Degenerate(String::from("unit germ has no parametrization")));
    }
    let (emb, par) = parametrize_inner(w, want)?;
    // safety net: the pullback must vanish to the certified precision
    let we = w.embed(&emb);
    let n = match par.x_t.ord()? {
        ExtRat::Finite(o) => o,
        ExtRat::Infinity => {
            return Err(Error::Degenerate(String::from("x(t) must be nonzero")))
        }
    };
    if !n.is_integer() {
        return Err(Error::Degenerate(String::from("x(t) must be a monomial t^n")));
    }
    let mut acc = Series::zero(emb.target());
    for s in we.coeffs().iter().rev() {
        acc = acc.mul(&par.y_t).add(&s.ramify(n.to_integer() as u64));
    }
    if acc.iter().next().is_some() {
        return Err(Error::Degenerate(String::from(
            "parametrization does not annihilate the germ",
        )));
    }
    Ok((emb, par))
}

fn parametrize_inner(w: &Bivar, want: Rat) -> Result<(Embedding, Parametrization)> {
    let desc = w.field().clone();
    let d = w.degree_y().unwrap();
    let one = desc.one();
    if d == 1 {
        // y = -c0(x), already primitive with x = t
        let y_t = w.coeff(0).neg();
        return Ok((
            Embedding::identity(&desc),
            Parametrization { x_t: Series::monomial(one, rat_int(1)), y_t },
        ));
    }
    match newton_puiseux_expand(w, want) {
        Ok((emb, roots)) => {
            let alpha = roots
                .first()
                .ok_or_else(|| Error::Degenerate(String::from("no roots returned")))?;
            let n = alpha.index();
            if n as usize != d {
                return Err(Error::PrecisionExhausted(format!(
                    "root index {} below the degree {}; expand further",
                    n, d
                )));
            }
            let x_t = Series::monomial(emb.target().one(), rat_int(n as i128));
            Ok((emb, Parametrization { x_t, y_t: alpha.ramify(n) }))
        }
        Err(Error::WildRamification { denominator }) => {
            let p = desc.characteristic();
            let g = deflate_y(w).ok_or(Error::NoParametrization)?;
            let _ = denominator;
            let (emb, pg) = parametrize_inner(&g, want)?;
            // w(x, y) = g(x, y^p): substituting t = u^p turns the
            // parametrization (t^m, Y(t)) of g into (u^(pm), Y(u^p)^(1/p)),
            // which is Y with p-th-rooted coefficients
            let m = match pg.x_t.ord()? {
                ExtRat::Finite(o) => o.to_integer() as u64,
                ExtRat::Infinity => {
                    return Err(Error::Degenerate(String::from("x(t) must be nonzero")))
                }
            };
            let x_t = Series::monomial(emb.target().one(), rat_int((p * m) as i128));
            let y_t = pg.y_t.ramify(p).pth_root();
            Ok((emb, Parametrization { x_t, y_t }))
        }
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------------
// Semigroup of a branch
// ---------------------------------------------------------------------------

/// Minimal generators of the semigroup of values of an irreducible branch,
/// with the derived quantities of the standard theory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemigroupData {
    gens: Vec<u64>,
}

impl SemigroupData {
    pub fn new(gens: Vec<u64>) -> Result<SemigroupData> {
        if gens.is_empty() || gens[0] == 0 {
            return Err(Error::Degenerate(String::from("empty generator sequence")));
        }
        let s = SemigroupData { gens };
        // e strictly decreasing, each divisor of the previous, ending at 1
        let h = s.h();
        for i in 1..=h {
            if s.e(i) >= s.e(i - 1) || s.e(i - 1) % s.e(i) != 0 {
                return Err(Error::Degenerate(String::from(
                    "generator gcd sequence is not strictly decreasing",
                )));
            }
            if s.m(i).gcd(&s.n(i)) != 1 {
                return Err(Error::Degenerate(String::from(
                    "m_i and n_i are not coprime",
                )));
            }
        }
        if s.e(h) != 1 {
            return Err(Error::Degenerate(String::from(
                "generators do not reach gcd 1",
            )));
        }
        for i in 1..h {
            if s.n(i) * s.gens[i] >= s.gens[i + 1] {
                return Err(Error::Degenerate(String::from(
                    "generators violate n_i * g_i < g_{i+1}",
                )));
            }
        }
        Ok(s)
    }

    pub fn gens(&self) -> &[u64] {
        &self.gens
    }

    /// Multiplicity of the branch, i0(f, x).
    pub fn multiplicity(&self) -> u64 {
        self.gens[0]
    }

    pub fn h(&self) -> usize {
        self.gens.len() - 1
    }

    /// e_i = gcd of the first i+1 generators.
    pub fn e(&self, i: usize) -> u64 {
        self.gens[..=i].iter().fold(0u64, |a, &b| a.gcd(&b))
    }

    /// n_i = e_{i-1} / e_i for i >= 1.
    pub fn n(&self, i: usize) -> u64 {
        assert!(i >= 1);
        self.e(i - 1) / self.e(i)
    }

    /// m_i = gens[i] / e_i.
    pub fn m(&self, i: usize) -> u64 {
        self.gens[i] / self.e(i)
    }

    /// Conductor: every integer >= conductor lies in the semigroup.
    pub fn conductor(&self) -> u64 {
        let mut c: i128 = 1 - self.gens[0] as i128;
        for i in 1..=self.h() {
            c += (self.n(i) as i128 - 1) * self.gens[i] as i128;
        }
        c.max(0) as u64
    }

    pub fn contains(&self, v: u64) -> bool {
        represent(v, &self.gens).is_some()
    }
}

/// One representation of o as a nonnegative combination of gens, preferring
/// small usage of the later generators (so the classical relation
/// n_i*g_i in <g_0..g_{i-1}> is always realized with earlier generators).
fn represent(o: u64, gens: &[u64]) -> Option<Vec<u64>> {
    fn go(o: u64, gens: &[u64], idx: usize) -> Option<Vec<u64>> {
        if idx == 0 {
            return (o % gens[0] == 0).then(|| vec![o / gens[0]]);
        }
        for c in 0..=o / gens[idx] {
            if let Some(mut v) = go(o - c * gens[idx], gens, idx - 1) {
                v.push(c);
                return Some(v);
            }
        }
        None
    }
    go(o, gens, gens.len() - 1)
}

fn lead_term(s: &Series) -> Result<(Rat, Fq)> {
    match s.iter().next() {
        Some((e, c)) => Ok((e, c.clone())),
        None => {
            if s.is_exact() {
                Err(Error::Degenerate(String::from(
                    "series vanished exactly during semigroup reduction",
                )))
            } else {
                Err(Error::PrecisionExhausted(String::from(
                    "semigroup reduction ran past the certified precision",
                )))
            }
        }
    }
}

/// Semigroup generators from a primitive parametrization, by repeated
/// reduction of t-orders against monomials in the already-found
/// representatives (the Hamburger-Noether style chain, characteristic-free).
pub fn semigroup_from_parametrization(par: &Parametrization) -> Result<SemigroupData> {
    let n = match par.x_t.ord()? {
        ExtRat::Finite(o) if o.is_integer() && o.to_integer() >= 1 => o.to_integer() as u64,
        _ => {
            return Err(Error::Degenerate(String::from(
                "x(t) must have a positive integral order",
            )))
        }
    };
    if n == 1 {
        return SemigroupData::new(vec![1]);
    }
    let mut gens: Vec<u64> = vec![n];
    let mut reps: Vec<Series> = vec![par.x_t.clone()];
    let mut u = par.y_t.clone();
    let mut guard = 0usize;
    loop {
        // reduce u until its order leaves the current semigroup
        loop {
            guard += 1;
            if guard > 100_000 {
                return Err(Error::Degenerate(String::from(
                    "semigroup reduction does not terminate",
                )));
            }
            let (o, lc) = lead_term(&u)?;
            if !o.is_integer() || o.to_integer() < 0 {
                return Err(Error::Degenerate(String::from(
                    "parametrization is not primitive: fractional t-order",
                )));
            }
            let ov = o.to_integer() as u64;
            let combo = match represent(ov, &gens) {
                Some(c) => c,
                None => break,
            };
            let mut mono = Series::one(par.x_t.field());
            for (i, &c) in combo.iter().enumerate() {
                if c > 0 {
                    mono = mono.mul(&reps[i].pow(c));
                }
            }
            let (_, mc) = lead_term(&mono)?;
            let scale = lc.mul(&mc.inv()?);
            u = u.sub(&mono.mul_scalar(&scale));
        }
        let (o, _) = lead_term(&u)?;
        gens.push(o.to_integer() as u64);
        reps.push(u.clone());
        let g = gens.iter().fold(0u64, |a, &b| a.gcd(&b));
        if g == 1 {
            return SemigroupData::new(gens);
        }
        let e_prev = gens[..gens.len() - 1].iter().fold(0u64, |a, &b| a.gcd(&b));
        let ni = e_prev / g;
        u = reps.last().unwrap().pow(ni);
    }
}

/// Semigroup of a certified irreducible branch, expanding as far as the
/// chain needs (budget doubles on demand).
pub fn semigroup_of_branch(w: &Bivar) -> Result<SemigroupData> {
    let d = w
        .degree_y()
        .ok_or_else(|| Error::Degenerate(String::from("semigroup of the zero germ")))? as i128;
    // the conductor of a plane branch of multiplicity d is below d^2; a bit
    // of slack covers the reduction's intermediate orders
    let mut want = rat_int((2 * d * d).max(8));
    for _ in 0..8 {
        let attempt = parametrization(w, want).and_then(|(_, par)| {
            semigroup_from_parametrization(&par)
        });
        match attempt {
            Ok(s) => return Ok(s),
            Err(Error::PrecisionExhausted(_)) => want = want * rat_int(2),
            Err(e) => return Err(e),
        }
    }
    Err(Error::PrecisionExhausted(String::from(
        "semigroup chain did not close within the expansion budget",
    )))
}

// ---------------------------------------------------------------------------
// Characteristic sequences and key polynomials
// ---------------------------------------------------------------------------

/// Puiseux characteristic sequence from the semigroup generators:
/// b_0 = g_0, b_1 = g_1, b_i = g_i - n_{i-1} g_{i-1} + b_{i-1}.
pub fn char_sequence(s: &SemigroupData) -> Vec<u64> {
    let g = s.gens();
    let mut b: Vec<u64> = g.to_vec();
    for i in 2..g.len() {
        let v = g[i] as i128 - s.n(i - 1) as i128 * g[i - 1] as i128 + b[i - 1] as i128;
        b[i] = v as u64;
    }
    b
}

/// The i-th key polynomial of a certified branch: minimal polynomial of a
/// root truncated below the (i+1)-st characteristic exponent. key 0 is y,
/// key h is the branch itself.
pub fn key_polynomial(
    w: &Bivar,
    semi: &SemigroupData,
    level: usize,
) -> Result<(Embedding, Bivar)> {
    let desc = w.field().clone();
    let h = semi.h();
    if level > h {
        return Err(Error::Degenerate(String::from("key polynomial level out of range")));
    }
    if level == h {
        return Ok((Embedding::identity(&desc), w.clone()));
    }
    if level == 0 {
        return Ok((Embedding::identity(&desc), Bivar::y(&desc)));
    }
    let chars = char_sequence(semi);
    let b0 = chars[0];
    let eps = rat(chars[level + 1] as i128, b0 as i128);
    let (emb, roots) = newton_puiseux_expand(w, eps + rat_int(1))?;
    let alpha = roots
        .first()
        .ok_or_else(|| Error::Degenerate(String::from("no roots returned")))?;
    let tau = alpha.take_below(eps);
    let m = tau.index();
    if m != b0 / semi.e(level) {
        return Err(Error::Degenerate(format!(
            "truncation index {} does not match b0/e_i = {}",
            m,
            b0 / semi.e(level)
        )));
    }
    if m == 1 {
        let key = Bivar::from_coeffs(emb.target(), vec![tau.neg(), Series::one(emb.target())]);
        return Ok((emb, key));
    }
    let (_, emb2, zeta) = with_root_of_unity(emb.target(), m)?;
    let fld = emb2.target().clone();
    let tau2 = tau.embed(&emb2);
    let mut key = Bivar::one(&fld);
    for t in 0..m {
        let conj = tau2.conjugate_wrt(&zeta.pow(t), m, m as i128);
        key = key.mul(&Bivar::from_coeffs(&fld, vec![conj.neg(), Series::one(&fld)]));
    }
    Ok((emb.compose(&emb2), key))
}

/// Order of coincidence of two distinct irreducible germs over the same
/// field: the largest x-order at which some pair of their Puiseux roots
/// agrees.
pub fn order_of_coincidence(f: &Bivar, g: &Bivar) -> Result<Rat> {
    if f.field() != g.field() {
        return Err(Error::Degenerate(String::from(
            "coincidence wants both germs over one field",
        )));
    }
    let mut want = rat_int(4);
    for _ in 0..10 {
        let pair = puiseux_roots(f, want).and_then(|rf| {
            puiseux_roots(g, want).map(|rg| (rf, rg))
        });
        let ((e1, v1), (e2, v2)) = match pair {
            Ok(p) => p,
            Err(Error::PrecisionExhausted(_)) => {
                want = want * rat_int(2);
                continue;
            }
            Err(e) => return Err(e),
        };
        if v1.is_empty() || v2.is_empty() {
            return Err(Error::Degenerate(String::from("a germ has no roots to compare")));
        }
        let (_, j1, j2) = join_embeddings(&e1, &e2)?;
        let a = v1[0].embed(&j1);
        let mut best: Option<Rat> = None;
        let mut uncertified = false;
        for b in &v2 {
            let diff = a.sub(&b.embed(&j2));
            match diff.ord() {
                Ok(ExtRat::Finite(o)) => {
                    best = Some(match best {
                        Some(x) => x.max(o),
                        None => o,
                    })
                }
                Ok(ExtRat::Infinity) => return Err(Error::CommonComponent),
                Err(_) => uncertified = true,
            }
        }
        if !uncertified {
            return best.ok_or_else(|| {
                Error::Degenerate(String::from("no root pairs to compare"))
            });
        }
        want = want * rat_int(2);
    }
    Err(Error::PrecisionExhausted(String::from(
        "roots agree beyond every tried expansion budget",
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bivar::intersection_multiplicity;

    fn f5() -> Arc<FieldDescriptor> {
        FieldDescriptor::prime(5).unwrap()
    }

    fn is_factor(dec: &Decomposition, terms: &[(u32, u32, i64)], mult: u64) -> bool {
        let probe = Bivar::from_terms(&dec.field, terms);
        dec.factors.iter().any(|(b, m)| {
            *m == mult
                && b.w.degree_y() == probe.degree_y()
                && b.w.sub(&probe).coeffs().iter().all(Series::is_empty)
        })
    }

    #[test]
    fn slope_split_decomposition() {
        // y^3 + x^3 y = y (y^2 + x^3)
        let f = Bivar::from_terms(&f5(), &[(0, 3, 1), (3, 1, 1)]);
        let dec = branch_decompose(&f, 10).unwrap();
        assert_eq!(dec.x_exponent, 0);
        assert_eq!(dec.factors.len(), 2);
        assert!(is_factor(&dec, &[(0, 1, 1)], 1));
        assert!(is_factor(&dec, &[(0, 2, 1), (3, 0, 1)], 1));
        for (b, _) in &dec.factors {
            assert_eq!(b.certificate, Certificate::Certified);
        }
        assert!(dec.precision >= rat_int(10));
    }

    #[test]
    fn coprime_edge_clusters_split() {
        // (y^2 - x^3)(y^2 - 2x^3) = y^4 - 3x^3 y^2 + 2x^6
        let f = Bivar::from_terms(&f5(), &[(0, 4, 1), (3, 2, -3), (6, 0, 2)]);
        let dec = branch_decompose(&f, 12).unwrap();
        assert_eq!(dec.factors.len(), 2);
        assert!(is_factor(&dec, &[(0, 2, 1), (3, 0, -1)], 1));
        assert!(is_factor(&dec, &[(0, 2, 1), (3, 0, -2)], 1));
    }

    #[test]
    fn ramified_cover_orbit_reconstruction() {
        // f3 = (y^3 + x^4)^2 + x^9: irreducible of degree 6, resolved
        // through the 3-fold cover x -> x^3
        let f = Bivar::from_terms(&f5(), &[(0, 6, 1), (4, 3, 2), (8, 0, 1), (9, 0, 1)]);
        let dec = branch_decompose(&f, 14).unwrap();
        assert_eq!(dec.factors.len(), 1);
        let (b, m) = &dec.factors[0];
        assert_eq!(*m, 1);
        assert_eq!(b.w.degree_y(), Some(6));
        assert_eq!(b.certificate, Certificate::Certified);
    }

    #[test]
    fn perfect_square_is_peeled() {
        // (y^2 - x^3)^2 = y^4 - 2x^3 y^2 + x^6
        let f = Bivar::from_terms(&f5(), &[(0, 4, 1), (3, 2, -2), (6, 0, 1)]);
        let dec = branch_decompose(&f, 12).unwrap();
        assert_eq!(dec.factors.len(), 1);
        assert!(is_factor(&dec, &[(0, 2, 1), (3, 0, -1)], 2));
    }

    #[test]
    fn wild_square_in_char_two() {
        let f2 = FieldDescriptor::prime(2).unwrap();
        // y^2 + x^6 = (y + x^3)^2 in characteristic 2
        let f = Bivar::from_terms(&f2, &[(0, 2, 1), (6, 0, 1)]);
        let dec = branch_decompose(&f, 10).unwrap();
        assert_eq!(dec.factors.len(), 1);
        let (b, m) = &dec.factors[0];
        assert_eq!(*m, 2);
        assert_eq!(b.w.degree_y(), Some(1));
        // y^2 + x^3 itself is certified irreducible (linear edge polynomial)
        let g = Bivar::from_terms(&f2, &[(0, 2, 1), (3, 0, 1)]);
        let dec = branch_decompose(&g, 10).unwrap();
        assert_eq!(dec.factors.len(), 1);
        assert_eq!(dec.factors[0].0.certificate, Certificate::Certified);
        assert_eq!(dec.factors[0].0.w.degree_y(), Some(2));
    }

    #[test]
    fn expansion_of_a_cusp() {
        // y^2 + x^3 over GF(5): roots 2x^{3/2} and 3x^{3/2}
        let f = Bivar::from_terms(&f5(), &[(0, 2, 1), (3, 0, 1)]);
        let (emb, roots) = newton_puiseux_expand(&f, rat_int(4)).unwrap();
        assert_eq!(roots.len(), 2);
        assert!(emb.is_identity());
        let mut leads: Vec<u64> = roots
            .iter()
            .map(|r| {
                let (e, c) = r.iter().next().unwrap();
                assert_eq!(e, rat(3, 2));
                c.coeffs()[0]
            })
            .collect();
        leads.sort_unstable();
        assert_eq!(leads, vec![2, 3]);
    }

    #[test]
    fn expansion_extends_the_field() {
        // y^3 + x^4 over GF(5): roots 4 zeta^k x^{4/3} with zeta in GF(25)
        let f = Bivar::from_terms(&f5(), &[(0, 3, 1), (4, 0, 1)]);
        let (emb, roots) = newton_puiseux_expand(&f, rat_int(3)).unwrap();
        assert_eq!(roots.len(), 3);
        assert_eq!(emb.target().degree(), 2);
        for r in &roots {
            let (e, c) = r.iter().next().unwrap();
            assert_eq!(e, rat(4, 3));
            assert_eq!(c.pow(3), emb.target().from_u64(4));
        }
    }

    #[test]
    fn root_existence() {
        let f3 = FieldDescriptor::prime(3).unwrap();
        let f2 = FieldDescriptor::prime(2).unwrap();
        // y^3 - x^3 y + x^4 over GF(3): not in K[[x]][y^3]
        let a = Bivar::from_terms(&f3, &[(0, 3, 1), (3, 1, -1), (4, 0, 1)]);
        assert_eq!(has_puiseux_roots(&a), RootExistence::No);
        // y^2 + x^3 over GF(2): deflates to y + x^3
        let b = Bivar::from_terms(&f2, &[(0, 2, 1), (3, 0, 1)]);
        assert_eq!(has_puiseux_roots(&b), RootExistence::Yes);
        // tame degree
        let c = Bivar::from_terms(&f5(), &[(0, 2, 1), (3, 0, 1)]);
        assert_eq!(has_puiseux_roots(&c), RootExistence::Yes);
    }

    #[test]
    fn wild_parametrization_by_deflation() {
        let f2 = FieldDescriptor::prime(2).unwrap();
        let f = Bivar::from_terms(&f2, &[(0, 2, 1), (3, 0, 1)]);
        let (_, par) = parametrization(&f, rat_int(6)).unwrap();
        assert_eq!(par.x_t.ord().unwrap(), ExtRat::finite(2, 1));
        let (e, _) = par.y_t.iter().next().unwrap();
        assert_eq!(e, rat_int(3));
        assert_eq!(par.y_t.num_terms(), 1);
    }

    #[test]
    fn semigroups() {
        // cusp: (2, 3)
        let f = Bivar::from_terms(&f5(), &[(0, 2, 1), (3, 0, 1)]);
        assert_eq!(semigroup_of_branch(&f).unwrap().gens(), &[2, 3]);
        // f3: (6, 8, 27)
        let f3 = Bivar::from_terms(&f5(), &[(0, 6, 1), (4, 3, 2), (8, 0, 1), (9, 0, 1)]);
        let s = semigroup_of_branch(&f3).unwrap();
        assert_eq!(s.gens(), &[6, 8, 27]);
        assert_eq!(s.conductor(), 38);
        assert!(s.contains(14) && !s.contains(13));
        // smooth branch y
        let y = Bivar::from_terms(&f5(), &[(0, 1, 1)]);
        assert_eq!(semigroup_of_branch(&y).unwrap().gens(), &[1]);
    }

    #[test]
    fn characteristic_sequences() {
        let s = SemigroupData::new(vec![6, 8, 27]).unwrap();
        assert_eq!(char_sequence(&s), vec![6, 8, 11]);
        let s = SemigroupData::new(vec![4, 6, 13]).unwrap();
        assert_eq!(char_sequence(&s), vec![4, 6, 7]);
        let s = SemigroupData::new(vec![2, 3]).unwrap();
        assert_eq!(char_sequence(&s), vec![2, 3]);
    }

    #[test]
    fn key_polynomials_of_f3() {
        let f3 = Bivar::from_terms(&f5(), &[(0, 6, 1), (4, 3, 2), (8, 0, 1), (9, 0, 1)]);
        let s = semigroup_of_branch(&f3).unwrap();
        let (emb, k1) = key_polynomial(&f3, &s, 1).unwrap();
        assert_eq!(k1.degree_y(), Some(3));
        // i0(f3, key_1) = b-bar_2 = 27
        let f3e = f3.embed(&emb);
        assert_eq!(
            intersection_multiplicity(&f3e, &k1).unwrap(),
            ExtRat::finite(27, 1)
        );
        let (_, k0) = key_polynomial(&f3, &s, 0).unwrap();
        assert_eq!(k0.degree_y(), Some(1));
        let (_, kh) = key_polynomial(&f3, &s, 2).unwrap();
        assert_eq!(kh.degree_y(), Some(6));
    }

    #[test]
    fn coincidence_orders() {
        // y^2 + x^3 vs y^2 + 2x^3: leading coefficients differ, so the
        // roots separate right at 3/2
        let a = Bivar::from_terms(&f5(), &[(0, 2, 1), (3, 0, 1)]);
        let b = Bivar::from_terms(&f5(), &[(0, 2, 1), (3, 0, 2)]);
        assert_eq!(order_of_coincidence(&a, &b).unwrap(), rat(3, 2));
        // f3 vs its first key polynomial: coincidence at the second
        // characteristic exponent 11/6
        let f3 = Bivar::from_terms(&f5(), &[(0, 6, 1), (4, 3, 2), (8, 0, 1), (9, 0, 1)]);
        let k1 = Bivar::from_terms(&f5(), &[(0, 3, 1), (4, 0, 1)]);
        assert_eq!(order_of_coincidence(&f3, &k1).unwrap(), rat(11, 6));
    }
}
