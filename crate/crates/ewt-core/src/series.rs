//! Truncated power series and Puiseux series in x over GF(p^k).
//!
//! A series carries a ramification index n and stores terms c * x^(e/n) in a
//! sorted map keyed by the integer e. `prec = None` means the series is exact
//! (a polynomial in x^(1/n)); `prec = Some(N)` means coefficients of
//! exponents >= N are unknown and have been discarded. Orders read off a
//! truncated series are only reported when a nonzero term certifies them.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_integer::Integer;
use num_traits::Signed;

use crate::error::{Error, Result};
use crate::gf::{Embedding, FieldDescriptor, Fq};
use crate::rat::{ExtRat, Rat, rat};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    desc: Arc<FieldDescriptor>,
    /// Ramification: stored key e represents exponent e/ram.
    ram: i128,
    terms: BTreeMap<i128, Fq>,
    /// Exponent bound below which coefficients are certified; None = exact.
    prec: Option<Rat>,
}

impl Series {
    pub fn zero(desc: &Arc<FieldDescriptor>) -> Series {
        Series { desc: desc.clone(), ram: 1, terms: BTreeMap::new(), prec: None }
    }

    pub fn one(desc: &Arc<FieldDescriptor>) -> Series {
        Series::monomial(desc.one(), Rat::from_integer(0))
    }

    pub fn monomial(coeff: Fq, exp: Rat) -> Series {
        let desc = coeff.field().clone();
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(*exp.numer(), coeff);
        }
        let mut s = Series { desc, ram: *exp.denom(), terms, prec: None };
        s.normalize();
        s
    }

    /// Exact polynomial in x from constant-first coefficients.
    pub fn from_poly_coeffs(desc: &Arc<FieldDescriptor>, coeffs: &[Fq]) -> Series {
        let mut terms = BTreeMap::new();
        for (i, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                terms.insert(i as i128, c.clone());
            }
        }
        Series { desc: desc.clone(), ram: 1, terms, prec: None }
    }

    pub fn field(&self) -> &Arc<FieldDescriptor> {
        &self.desc
    }

    /// Current ramification of the representation (a multiple of the index).
    pub fn ram(&self) -> i128 {
        self.ram
    }

    pub fn precision(&self) -> Option<Rat> {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// True when no terms are stored. For an exact series this means zero;
    /// for a truncated one it only means order >= precision.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Certified zero test.
    pub fn is_zero_exact(&self) -> bool {
        self.is_exact() && self.terms.is_empty()
    }

    /// Iterate (exponent, coefficient) in increasing exponent order.
    pub fn iter(&self) -> impl Iterator<Item = (Rat, &Fq)> + '_ {
        let ram = self.ram;
        self.terms.iter().map(move |(&e, c)| (rat(e, ram), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Reduce the ramification to the minimal common denominator of the
    /// support (and the precision bound), and drop nothing else.
    fn normalize(&mut self) {
        debug_assert!(self.ram > 0);
        self.terms.retain(|_, c| !c.is_zero());
        if let Some(p) = self.prec {
            let bound = p * Rat::from_integer(self.ram);
            debug_assert!(bound.is_integer() || true);
            let keys: Vec<i128> = self
                .terms
                .range((bound.ceil().to_integer())..)
                .map(|(&k, _)| k)
                .collect();
            for k in keys {
                if rat(k, self.ram) >= p {
                    self.terms.remove(&k);
                }
            }
        }
        let mut g = self.ram;
        for &k in self.terms.keys() {
            g = g.gcd(&k);
            if g == 1 {
                break;
            }
        }
        if g > 1 {
            // only shrink when precision stays representable; precision is a
            // Rat so it always is
            let old: Vec<(i128, Fq)> = core::mem::take(&mut self.terms).into_iter().collect();
            self.ram /= g;
            for (k, c) in old {
                self.terms.insert(k / g, c);
            }
        }
    }

    /// Minimal common denominator of the support exponents.
    pub fn index(&self) -> u64 {
        let mut g = 0i128;
        for &k in self.terms.keys() {
            g = g.gcd(&k);
        }
        if g == 0 {
            return 1;
        }
        (self.ram / g.gcd(&self.ram)) as u64
    }

    /// Re-represent with ramification `m` (a multiple of the current one).
    fn with_ram(&self, m: i128) -> Series {
        debug_assert_eq!(m % self.ram, 0);
        let f = m / self.ram;
        if f == 1 {
            return self.clone();
        }
        let terms = self.terms.iter().map(|(&k, c)| (k * f, c.clone())).collect();
        Series { desc: self.desc.clone(), ram: m, terms, prec: self.prec }
    }

    fn join_ram(&self, other: &Series) -> i128 {
        self.ram.lcm(&other.ram)
    }

    /// Order of the series. `Infinity` for the exact zero series; an error if
    /// the series is empty but truncated, since no nonzero term certifies an
    /// order below the precision bound.
    pub fn ord(&self) -> Result<ExtRat> {
        match self.terms.keys().next() {
            Some(&k) => Ok(ExtRat::Finite(rat(k, self.ram))),
            None => {
                if self.is_exact() {
                    Ok(ExtRat::Infinity)
                } else {
                    Err(Error::PrecisionExhausted(format!(
                        "order not certified below precision {}",
                        ExtRat::Finite(self.prec.unwrap())
                    )))
                }
            }
        }
    }

    /// Order when the series is known nonzero; lower bound otherwise:
    /// returns max(ord, prec) semantics for internal precision bookkeeping.
    fn ord_lower_bound(&self) -> ExtRat {
        match self.terms.keys().next() {
            Some(&k) => ExtRat::Finite(rat(k, self.ram)),
            None => match self.prec {
                Some(p) => ExtRat::Finite(p),
                None => ExtRat::Infinity,
            },
        }
    }

    pub fn coeff(&self, exp: Rat) -> Result<Fq> {
        if let Some(p) = self.prec {
            if exp >= p {
                return Err(Error::PrecisionExhausted(format!(
                    "coefficient of x^{} beyond precision {}",
                    ExtRat::Finite(exp),
                    ExtRat::Finite(p)
                )));
            }
        }
        let scaled = exp * Rat::from_integer(self.ram);
        if !scaled.is_integer() {
            return Ok(self.desc.zero());
        }
        Ok(self
            .terms
            .get(&scaled.to_integer())
            .cloned()
            .unwrap_or_else(|| self.desc.zero()))
    }

    pub fn truncate(&self, prec: Rat) -> Series {
        let new_prec = match self.prec {
            Some(p) if p <= prec => Some(p),
            _ => Some(prec),
        };
        let mut s = self.clone();
        s.prec = new_prec;
        s.normalize();
        s
    }

    pub fn add(&self, other: &Series) -> Series {
        let m = self.join_ram(other);
        let a = self.with_ram(m);
        let b = other.with_ram(m);
        let prec = min_prec(a.prec, b.prec);
        let mut terms = a.terms;
        for (k, c) in b.terms {
            match terms.get_mut(&k) {
                Some(v) => *v = v.add(&c),
                None => {
                    terms.insert(k, c);
                }
            }
        }
        let mut s = Series { desc: self.desc.clone(), ram: m, terms, prec };
        s.normalize();
        s
    }

    pub fn neg(&self) -> Series {
        let terms = self.terms.iter().map(|(&k, c)| (k, c.neg())).collect();
        Series { desc: self.desc.clone(), ram: self.ram, terms, prec: self.prec }
    }

    pub fn sub(&self, other: &Series) -> Series {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Series) -> Series {
        let m = self.join_ram(other);
        let a = self.with_ram(m);
        let b = other.with_ram(m);
        // precision of the product: a term below p1 + ord2 (resp p2 + ord1)
        // is a certified sum of products
        let prec = mul_prec(a.prec, b.ord_lower_bound(), b.prec, a.ord_lower_bound());
        let mut terms: BTreeMap<i128, Fq> = BTreeMap::new();
        for (&ka, ca) in &a.terms {
            for (&kb, cb) in &b.terms {
                let k = ka + kb;
                if let Some(p) = prec {
                    if rat(k, m) >= p {
                        continue;
                    }
                }
                let prod = ca.mul(cb);
                match terms.get_mut(&k) {
                    Some(v) => *v = v.add(&prod),
                    None => {
                        terms.insert(k, prod);
                    }
                }
            }
        }
        let mut s = Series { desc: self.desc.clone(), ram: m, terms, prec };
        s.normalize();
        s
    }

    pub fn mul_scalar(&self, c: &Fq) -> Series {
        if c.is_zero() {
            let mut z = Series::zero(&self.desc);
            z.prec = self.prec;
            return z;
        }
        let terms = self.terms.iter().map(|(&k, v)| (k, v.mul(c))).collect();
        Series { desc: self.desc.clone(), ram: self.ram, terms, prec: self.prec }
    }

    /// Multiply by x^e.
    pub fn shift(&self, e: Rat) -> Series {
        let m = self.ram.lcm(e.denom());
        let a = self.with_ram(m);
        let ke = *(e * Rat::from_integer(m)).numer();
        let terms = a.terms.iter().map(|(&k, c)| (k + ke, c.clone())).collect();
        Series {
            desc: self.desc.clone(),
            ram: m,
            terms,
            prec: a.prec.map(|p| p + e),
        }
    }

    pub fn pow(&self, mut e: u64) -> Series {
        let mut base = self.clone();
        let mut acc = Series::one(&self.desc);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a series with certified order, to precision consistent
    /// with the input (or to `want` for exact inputs).
    pub fn inverse(&self, want: Rat) -> Result<Series> {
        let ord = match self.ord()? {
            ExtRat::Finite(o) => o,
            ExtRat::Infinity => {
                return Err(Error::Degenerate(String::from("inverse of zero series")))
            }
        };
        // u = x^ord * unit; invert the unit by Newton iteration
        let unit = self.shift(-ord);
        let c0 = unit.coeff(Rat::from_integer(0))?;
        let c0inv = c0.inv()?;
        // target precision for the unit inverse
        let target = match self.prec {
            Some(p) => core::cmp::min(p - ord, want + ord),
            None => want + ord,
        };
        if target <= Rat::from_integer(0) {
            return Err(Error::PrecisionExhausted(String::from(
                "no significant terms available for series inverse",
            )));
        }
        let mut inv = Series::monomial(c0inv, Rat::from_integer(0));
        let one = Series::one(&self.desc);
        let mut cur = rat(1, *target.denom());
        loop {
            // inv <- inv * (2 - unit*inv), doubling correct exponent count;
            // the iterate is kept as a plain polynomial (Newton corrects any
            // tail, so intermediate precision marks would only be in the way)
            cur = core::cmp::min(cur * Rat::from_integer(2), target);
            let u = unit.take_below(cur);
            let t = one.sub(&u.mul(&inv));
            inv = inv.add(&inv.mul(&t)).take_below(cur);
            if cur == target {
                break;
            }
        }
        inv.prec = Some(target);
        inv.normalize();
        Ok(inv.shift(-ord))
    }

    /// Exact division when the divisor's order is certified; the quotient is
    /// computed to the best precision supported by both operands, at least
    /// `want` for exact inputs.
    pub fn div(&self, other: &Series, want: Rat) -> Result<Series> {
        let inv = other.inverse(want)?;
        Ok(self.mul(&inv))
    }

    /// Substitute x -> x^m (exponents multiply by m).
    pub fn ramify(&self, m: u64) -> Series {
        let m = m as i128;
        let g = self.ram.gcd(&m);
        let mul = m / g;
        let div = self.ram / g;
        let terms = self
            .terms
            .iter()
            .map(|(&k, c)| (k * mul, c.clone()))
            .collect();
        let mut s = Series {
            desc: self.desc.clone(),
            ram: div,
            terms,
            prec: self.prec.map(|p| p * rat(m, 1)),
        };
        s.normalize();
        s
    }

    /// Substitute x^m -> x, i.e. divide all exponents by m (inverse of
    /// `ramify`; exponents need not be integral multiples of m, the result
    /// simply lives on a finer lattice).
    pub fn unramify(&self, m: u64) -> Series {
        let mut s = Series {
            desc: self.desc.clone(),
            ram: self.ram * m as i128,
            terms: self.terms.clone(),
            prec: self.prec.map(|p| p / rat(m as i128, 1)),
        };
        s.normalize();
        s
    }

    /// p-th root in characteristic p: exponents divide by p, coefficients
    /// take their unique p-th root.
    pub fn pth_root(&self) -> Series {
        let p = self.desc.characteristic() as i128;
        let terms = self
            .terms
            .iter()
            .map(|(&k, c)| (k, c.pth_root()))
            .collect();
        let mut s = Series {
            desc: self.desc.clone(),
            ram: self.ram * p,
            terms,
            prec: self.prec.map(|pr| pr / rat(p, 1)),
        };
        s.normalize();
        s
    }

    /// Galois conjugation x^(1/r) -> zeta * x^(1/r) where r = self.ram must
    /// be compatible: multiplies the x^(k/r) term by zeta^k. `order` is the
    /// multiplicative order of zeta.
    pub fn conjugate(&self, zeta: &Fq, order: u64) -> Series {
        let terms = self
            .terms
            .iter()
            .map(|(&k, c)| {
                let e = k.rem_euclid(order as i128) as u64;
                (k, c.mul(&zeta.pow(e)))
            })
            .collect();
        Series { desc: self.desc.clone(), ram: self.ram, terms, prec: self.prec }
    }

    /// Conjugation for a series whose representation ram may be smaller than
    /// the ramification r the Galois action refers to: x^(e) -> zeta^(e*r) x^e.
    pub fn conjugate_wrt(&self, zeta: &Fq, order: u64, r: i128) -> Series {
        let s = self.with_ram(self.ram.lcm(&r));
        let f = s.ram / r; // exponent e = k/s.ram = (k/f)/r; need zeta^(k/f)
        debug_assert_eq!(s.ram % r, 0);
        let terms = s
            .terms
            .iter()
            .map(|(&k, c)| {
                debug_assert_eq!(k % f, 0);
                let e = (k / f).rem_euclid(order as i128) as u64;
                (k, c.mul(&zeta.pow(e)))
            })
            .collect();
        let mut out = Series { desc: self.desc.clone(), ram: s.ram, terms, prec: s.prec };
        out.normalize();
        out
    }

    pub fn embed(&self, emb: &Embedding) -> Series {
        let terms = self
            .terms
            .iter()
            .map(|(&k, c)| (k, emb.apply(c)))
            .collect();
        Series { desc: emb.target().clone(), ram: self.ram, terms, prec: self.prec }
    }

    /// Keep only terms with exponent strictly below `bound`, marking the
    /// result exact (used for principal parts / truncated roots).
    pub fn take_below(&self, bound: Rat) -> Series {
        let mut s = self.clone();
        s.terms.retain(|&k, _| rat(k, s.ram) < bound);
        s.prec = None;
        s.normalize();
        s
    }
}

fn min_prec(a: Option<Rat>, b: Option<Rat>) -> Option<Rat> {
    match (a, b) {
        (None, x) => x,
        (x, None) => x,
        (Some(x), Some(y)) => Some(core::cmp::min(x, y)),
    }
}

fn mul_prec(pa: Option<Rat>, ob: ExtRat, pb: Option<Rat>, oa: ExtRat) -> Option<Rat> {
    let left = match (pa, ob) {
        (Some(p), ExtRat::Finite(o)) => Some(p + o),
        (Some(p), ExtRat::Infinity) => Some(p), // other side is empty anyway
        (None, _) => None,
    };
    let right = match (pb, oa) {
        (Some(p), ExtRat::Finite(o)) => Some(p + o),
        (Some(p), ExtRat::Infinity) => Some(p),
        (None, _) => None,
    };
    min_prec(left, right)
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.iter() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if e == Rat::from_integer(0) {
                write!(f, "{c}")?;
            } else if e.is_integer() {
                write!(f, "({c})*x^{}", e.numer())?;
            } else {
                write!(f, "({c})*x^({}/{})", e.numer(), e.denom())?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        if let Some(p) = self.prec {
            if p.is_integer() {
                write!(f, " + O(x^{})", p.numer())?;
            } else {
                write!(f, " + O(x^({}/{}))", p.numer(), p.denom())?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldDescriptor;
    use crate::rat::rat_int;

    fn f5() -> Arc<FieldDescriptor> {
        FieldDescriptor::prime(5).unwrap()
    }

    #[test]
    fn orders_and_zero() {
        let d = f5();
        let z = Series::zero(&d);
        assert_eq!(z.ord().unwrap(), ExtRat::Infinity);
        let zt = z.truncate(rat_int(3));
        assert!(zt.ord().is_err()); // zero up to precision is not certified zero
        let m = Series::monomial(d.from_u64(2), rat(3, 2));
        assert_eq!(m.ord().unwrap(), ExtRat::finite(3, 2));
        assert_eq!(m.index(), 2);
    }

    #[test]
    fn add_cancels_to_certified_support() {
        let d = f5();
        let a = Series::monomial(d.from_u64(2), rat_int(1))
            .add(&Series::monomial(d.from_u64(1), rat_int(4)));
        let b = Series::monomial(d.from_u64(3), rat_int(1));
        let s = a.add(&b); // 5x = 0 => only x^4 term
        assert_eq!(s.ord().unwrap(), ExtRat::finite(4, 1));
    }

    #[test]
    fn mul_precision_rule() {
        let d = f5();
        // a = x + O(x^5), b = x^2 exact: product certified below 7
        let a = Series::monomial(d.one(), rat_int(1)).truncate(rat_int(5));
        let b = Series::monomial(d.one(), rat_int(2));
        let p = a.mul(&b);
        assert_eq!(p.precision(), Some(rat_int(7)));
        assert_eq!(p.ord().unwrap(), ExtRat::finite(3, 1));
    }

    #[test]
    fn geometric_series_inverse() {
        let d = f5();
        // 1/(1 - x) = 1 + x + x^2 + ... ; check 8 terms
        let one = Series::one(&d);
        let g = one.sub(&Series::monomial(d.one(), rat_int(1)));
        let inv = g.inverse(rat_int(8)).unwrap();
        for e in 0..8 {
            assert_eq!(inv.coeff(rat_int(e)).unwrap(), d.one(), "coeff x^{e}");
        }
        assert!(g.mul(&inv).coeff(rat_int(0)).unwrap() == d.one());
        // certified equality to 1 below precision 8
        let diff = g.mul(&inv).sub(&one);
        assert!(diff.is_empty());
    }

    #[test]
    fn ramify_and_pth_root_roundtrip() {
        let d = FieldDescriptor::prime(2).unwrap();
        // s = x^3 -> ramify(2) = x^6; pth_root of x^3 = x^(3/2)
        let s = Series::monomial(d.one(), rat_int(3));
        assert_eq!(s.ramify(2).ord().unwrap(), ExtRat::finite(6, 1));
        let r = s.pth_root();
        assert_eq!(r.ord().unwrap(), ExtRat::finite(3, 2));
        assert_eq!(r.index(), 2);
        // square of the root in char 2 is the original
        assert_eq!(r.mul(&r), s);
    }

    #[test]
    fn conjugation_fixes_integral_exponents() {
        let d = f5();
        let (fld, emb, zeta) = crate::gf::with_root_of_unity(&d, 3).unwrap();
        // s = x + x^(4/3): conjugate multiplies x^(4/3) by zeta^4 = zeta
        let s = Series::monomial(fld.one(), rat_int(1))
            .add(&Series::monomial(fld.one(), rat(4, 3)));
        let _ = emb;
        let c = s.conjugate_wrt(&zeta, 3, 3);
        assert_eq!(c.coeff(rat_int(1)).unwrap(), fld.one());
        assert_eq!(c.coeff(rat(4, 3)).unwrap(), zeta.pow(4));
    }

    #[test]
    fn index_of_truncated_root() {
        let d = f5();
        // x^(3/2) + x^(5/3): index 6
        let s = Series::monomial(d.one(), rat(3, 2)).add(&Series::monomial(d.one(), rat(5, 3)));
        assert_eq!(s.index(), 6);
        assert_eq!(s.take_below(rat(8, 5)).index(), 2);
    }
}
