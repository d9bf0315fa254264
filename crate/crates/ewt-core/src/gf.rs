//! Arithmetic in GF(p^k) with an explicit irreducible modulus, univariate
//! polynomials over such fields, factorization, root finding with field
//! extension, and embeddings GF(p^a) -> GF(p^ab).

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Description of a concrete finite field GF(p^k).
///
/// `modulus` holds the k+1 coefficients (constant term first, leading
/// coefficient 1) of a monic irreducible polynomial over GF(p); for k = 1 it
/// is the formal polynomial t (so the quotient is GF(p) itself).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldDescriptor {
    p: u64,
    k: usize,
    modulus: Vec<u64>,
}

impl FieldDescriptor {
    /// The prime field GF(p). `p` must be prime; this is checked.
    pub fn prime(p: u64) -> Result<Arc<Self>> {
        if !is_prime_u64(p) {
            return Err(Error::Degenerate(format!("{p} is not prime")));
        }
        Ok(Arc::new(FieldDescriptor { p, k: 1, modulus: vec![0, 1] }))
    }

    /// GF(p^k) with the deterministic default modulus: the first monic
    /// irreducible of degree k when coefficient vectors (constant term first)
    /// are enumerated lexicographically.
    pub fn extension(p: u64, k: usize) -> Result<Arc<Self>> {
        if k == 0 {
            return Err(Error::Degenerate(String::from("extension degree 0")));
        }
        if !is_prime_u64(p) {
            return Err(Error::Degenerate(format!("{p} is not prime")));
        }
        if k == 1 {
            return Self::prime(p);
        }
        let modulus = default_modulus(p, k);
        Ok(Arc::new(FieldDescriptor { p, k, modulus }))
    }

    /// GF(p^k) with a caller-supplied monic modulus (constant term first,
    /// length k+1). Irreducibility is verified.
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Arc<Self>> {
        if !is_prime_u64(p) {
            return Err(Error::Degenerate(format!("{p} is not prime")));
        }
        if modulus.len() < 2 {
            return Err(Error::Degenerate(String::from("modulus must have positive degree")));
        }
        let k = modulus.len() - 1;
        let modulus: Vec<u64> = modulus.iter().map(|c| c % p).collect();
        if modulus[k] != 1 {
            return Err(Error::Degenerate(String::from("modulus must be monic")));
        }
        if k > 1 && !is_irreducible_mod_p(p, &modulus) {
            return Err(Error::ReducibleModulus);
        }
        Ok(Arc::new(FieldDescriptor { p, k, modulus }))
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    /// Field size p^k, or `None` if it overflows u64.
    pub fn size(&self) -> Option<u64> {
        let mut q: u64 = 1;
        for _ in 0..self.k {
            q = q.checked_mul(self.p)?;
        }
        Some(q)
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(self: &Arc<Self>) -> Fq {
        Fq { desc: self.clone(), c: vec![0; self.k] }
    }

    pub fn one(self: &Arc<Self>) -> Fq {
        self.from_u64(1)
    }

    /// The image of an integer in the prime subfield.
    pub fn from_u64(self: &Arc<Self>, n: u64) -> Fq {
        let mut c = vec![0; self.k];
        c[0] = n % self.p;
        Fq { desc: self.clone(), c }
    }

    pub fn from_i64(self: &Arc<Self>, n: i64) -> Fq {
        let p = self.p as i64;
        self.from_u64(n.rem_euclid(p) as u64)
    }

    /// The class of t, the generator of the extension over GF(p).
    pub fn gen(self: &Arc<Self>) -> Fq {
        if self.k == 1 {
            return self.zero();
        }
        let mut c = vec![0; self.k];
        c[1] = 1;
        Fq { desc: self.clone(), c }
    }

    /// Element with the given coefficient vector over GF(p), constant first.
    pub fn element(self: &Arc<Self>, coeffs: &[u64]) -> Fq {
        let mut c = vec![0; self.k];
        for (i, v) in coeffs.iter().enumerate().take(self.k) {
            c[i] = v % self.p;
        }
        Fq { desc: self.clone(), c }
    }

    /// Iterate over all field elements in coefficient-lex order.
    /// Only valid when `size()` fits in u64.
    pub fn elements(self: &Arc<Self>) -> impl Iterator<Item = Fq> + '_ {
        let q = self.size().expect("field too large to enumerate");
        let desc = self.clone();
        (0..q).map(move |n| {
            let mut c = vec![0; desc.k];
            let mut m = n;
            for slot in c.iter_mut() {
                *slot = m % desc.p;
                m /= desc.p;
            }
            Fq { desc: desc.clone(), c }
        })
    }
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 1 {
            write!(f, "GF({})", self.p)
        } else {
            write!(f, "GF({}^{})", self.p, self.k)
        }
    }
}

/// First monic irreducible of degree k over GF(p) in lex order of the lower
/// coefficient vector (constant term varying slowest is *not* what we want;
/// we enumerate (c_0, ..., c_{k-1}) as base-p digits of n with c_0 = n mod p).
fn default_modulus(p: u64, k: usize) -> Vec<u64> {
    let mut n: u64 = 0;
    loop {
        let mut m = vec![0u64; k + 1];
        m[k] = 1;
        let mut t = n;
        for slot in m.iter_mut().take(k) {
            *slot = t % p;
            t /= p;
        }
        if is_irreducible_mod_p(p, &m) {
            return m;
        }
        n += 1;
    }
}

// ---------------------------------------------------------------------------
// Field elements
// ---------------------------------------------------------------------------

/// An element of GF(p^k): residue of a polynomial over GF(p) modulo the
/// field's modulus, constant coefficient first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fq {
    desc: Arc<FieldDescriptor>,
    c: Vec<u64>,
}

impl Fq {
    pub fn field(&self) -> &Arc<FieldDescriptor> {
        &self.desc
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&v| v == 0)
    }

    fn same_field(&self, other: &Fq) {
        assert!(
            Arc::ptr_eq(&self.desc, &other.desc) || self.desc == other.desc,
            "mixed field elements: {} vs {}",
            self.desc,
            other.desc
        );
    }

    pub fn add(&self, other: &Fq) -> Fq {
        self.same_field(other);
        let p = self.desc.p;
        let c = self.c.iter().zip(&other.c).map(|(a, b)| (a + b) % p).collect();
        Fq { desc: self.desc.clone(), c }
    }

    pub fn neg(&self) -> Fq {
        let p = self.desc.p;
        let c = self.c.iter().map(|&a| (p - a) % p).collect();
        Fq { desc: self.desc.clone(), c }
    }

    pub fn sub(&self, other: &Fq) -> Fq {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Fq) -> Fq {
        self.same_field(other);
        let p = self.desc.p as u128;
        let k = self.desc.k;
        if k == 1 {
            let v = (self.c[0] as u128 * other.c[0] as u128) % p;
            return Fq { desc: self.desc.clone(), c: vec![v as u64] };
        }
        // schoolbook product then reduction by the monic modulus
        let mut prod = vec![0u128; 2 * k - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.c.iter().enumerate() {
                prod[i + j] = (prod[i + j] + a as u128 * b as u128) % p;
            }
        }
        let m = &self.desc.modulus;
        for i in (k..2 * k - 1).rev() {
            let lead = prod[i];
            if lead == 0 {
                continue;
            }
            prod[i] = 0;
            for j in 0..k {
                if m[j] != 0 {
                    let sub = lead * m[j] as u128 % p;
                    prod[i - k + j] = (prod[i - k + j] + p - sub) % p;
                }
            }
        }
        let c = prod[..k].iter().map(|&v| v as u64).collect();
        Fq { desc: self.desc.clone(), c }
    }

    pub fn pow(&self, mut e: u64) -> Fq {
        let mut base = self.clone();
        let mut acc = self.desc.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self) -> Result<Fq> {
        if self.is_zero() {
            return Err(Error::Degenerate(String::from("inverse of zero")));
        }
        let q = self.desc.size().ok_or(Error::Overflow)?;
        Ok(self.pow(q - 2))
    }

    pub fn div(&self, other: &Fq) -> Result<Fq> {
        Ok(self.mul(&other.inv()?))
    }

    /// Frobenius x -> x^p.
    pub fn frobenius(&self) -> Fq {
        self.pow(self.desc.p)
    }

    /// The unique p-th root: x^(p^(k-1)).
    pub fn pth_root(&self) -> Fq {
        let mut r = self.clone();
        for _ in 0..self.desc.k.saturating_sub(1) {
            r = r.frobenius();
        }
        debug_assert!(r.pow(self.desc.p) == *self);
        r
    }

    /// Deterministic total order: lexicographic on the coefficient vector.
    pub fn lex_cmp(&self, other: &Fq) -> core::cmp::Ordering {
        self.c.cmp(&other.c)
    }
}

impl fmt::Display for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.desc.k == 1 {
            return write!(f, "{}", self.c[0]);
        }
        let mut first = true;
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match i {
                0 => write!(f, "{a}")?,
                1 if a == 1 => write!(f, "t")?,
                1 => write!(f, "{a}*t")?,
                _ if a == 1 => write!(f, "t^{i}")?,
                _ => write!(f, "{a}*t^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Univariate polynomials over GF(p^k)
// ---------------------------------------------------------------------------

/// Dense univariate polynomial over a finite field, constant term first,
/// with no trailing zero coefficients (the zero polynomial is empty).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    desc: Arc<FieldDescriptor>,
    c: Vec<Fq>,
}

impl Poly {
    pub fn zero(desc: &Arc<FieldDescriptor>) -> Poly {
        Poly { desc: desc.clone(), c: Vec::new() }
    }

    pub fn one(desc: &Arc<FieldDescriptor>) -> Poly {
        Poly::from_coeffs(desc, vec![desc.one()])
    }

    pub fn x(desc: &Arc<FieldDescriptor>) -> Poly {
        Poly::from_coeffs(desc, vec![desc.zero(), desc.one()])
    }

    pub fn constant(a: Fq) -> Poly {
        let desc = a.desc.clone();
        Poly::from_coeffs(&desc, vec![a])
    }

    pub fn from_coeffs(desc: &Arc<FieldDescriptor>, mut c: Vec<Fq>) -> Poly {
        while c.last().map_or(false, Fq::is_zero) {
            c.pop();
        }
        Poly { desc: desc.clone(), c }
    }

    pub fn monomial(desc: &Arc<FieldDescriptor>, coeff: Fq, deg: usize) -> Poly {
        let mut c = vec![desc.zero(); deg + 1];
        c[deg] = coeff;
        Poly::from_coeffs(desc, c)
    }

    pub fn field(&self) -> &Arc<FieldDescriptor> {
        &self.desc
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> Fq {
        self.c.get(i).cloned().unwrap_or_else(|| self.desc.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// Degree; the zero polynomial has none.
    pub fn degree(&self) -> Option<usize> {
        if self.c.is_empty() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn lead(&self) -> Fq {
        self.c.last().cloned().unwrap_or_else(|| self.desc.zero())
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == self.desc.one()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.c.len().max(other.c.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            c.push(self.coeff(i).add(&other.coeff(i)));
        }
        Poly::from_coeffs(&self.desc, c)
    }

    pub fn neg(&self) -> Poly {
        Poly { desc: self.desc.clone(), c: self.c.iter().map(Fq::neg).collect() }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.desc);
        }
        let mut c = vec![self.desc.zero(); self.c.len() + other.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.c.iter().enumerate() {
                c[i + j] = c[i + j].add(&a.mul(b));
            }
        }
        Poly::from_coeffs(&self.desc, c)
    }

    pub fn mul_scalar(&self, s: &Fq) -> Poly {
        Poly::from_coeffs(&self.desc, self.c.iter().map(|a| a.mul(s)).collect())
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(&self.desc);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Euclidean division by a polynomial with invertible leading coefficient.
    pub fn divrem(&self, div: &Poly) -> Result<(Poly, Poly)> {
        if div.is_zero() {
            return Err(Error::Degenerate(String::from("division by zero polynomial")));
        }
        let dlead_inv = div.lead().inv()?;
        let ddeg = div.c.len() - 1;
        let mut rem = self.c.clone();
        if rem.len() <= ddeg {
            return Ok((Poly::zero(&self.desc), self.clone()));
        }
        let mut quot = vec![self.desc.zero(); rem.len() - ddeg];
        for i in (ddeg..rem.len()).rev() {
            let q = rem[i].mul(&dlead_inv);
            if q.is_zero() {
                continue;
            }
            quot[i - ddeg] = q.clone();
            for (j, dc) in div.c.iter().enumerate() {
                rem[i - ddeg + j] = rem[i - ddeg + j].sub(&q.mul(dc));
            }
        }
        Ok((
            Poly::from_coeffs(&self.desc, quot),
            Poly::from_coeffs(&self.desc, rem),
        ))
    }

    pub fn rem(&self, div: &Poly) -> Result<Poly> {
        Ok(self.divrem(div)?.1)
    }

    pub fn monic(&self) -> Result<Poly> {
        Ok(self.mul_scalar(&self.lead().inv()?))
    }

    pub fn gcd(&self, other: &Poly) -> Result<Poly> {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        if a.is_zero() {
            Ok(a)
        } else {
            a.monic()
        }
    }

    /// Extended gcd: returns (g, s, t) with s*self + t*other = g, g monic.
    pub fn xgcd(&self, other: &Poly) -> Result<(Poly, Poly, Poly)> {
        let mut r0 = self.clone();
        let mut r1 = other.clone();
        let mut s0 = Poly::one(&self.desc);
        let mut s1 = Poly::zero(&self.desc);
        let mut t0 = Poly::zero(&self.desc);
        let mut t1 = Poly::one(&self.desc);
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1)?;
            r0 = r1;
            r1 = r;
            let ns = s0.sub(&q.mul(&s1));
            s0 = s1;
            s1 = ns;
            let nt = t0.sub(&q.mul(&t1));
            t0 = t1;
            t1 = nt;
        }
        if r0.is_zero() {
            return Ok((r0, s0, t0));
        }
        let li = r0.lead().inv()?;
        Ok((
            r0.mul_scalar(&li),
            s0.mul_scalar(&li),
            t0.mul_scalar(&li),
        ))
    }

    pub fn eval(&self, at: &Fq) -> Fq {
        let mut acc = self.desc.zero();
        for a in self.c.iter().rev() {
            acc = acc.mul(at).add(a);
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.c.len() <= 1 {
            return Poly::zero(&self.desc);
        }
        let c = self.c[1..]
            .iter()
            .enumerate()
            .map(|(i, a)| a.mul(&self.desc.from_u64(i as u64 + 1)))
            .collect();
        Poly::from_coeffs(&self.desc, c)
    }

    /// self(x)^e mod m, with e given in binary.
    pub fn powmod(&self, e: &[u64], m: &Poly) -> Result<Poly> {
        // e is a base-2^64 little-endian integer
        let mut base = self.rem(m)?;
        let mut acc = Poly::one(&self.desc);
        for (li, limb) in e.iter().enumerate() {
            let bits = if li + 1 == e.len() {
                64 - limb.leading_zeros() as usize
            } else {
                64
            };
            let mut l = *limb;
            for _ in 0..bits {
                if l & 1 == 1 {
                    acc = acc.mul(&base).rem(m)?;
                }
                base = base.mul(&base).rem(m)?;
                l >>= 1;
            }
        }
        Ok(acc)
    }

    /// x^(q^e) mod m by repeated q-power maps, q = field size.
    fn x_qpow_mod(m: &Poly, e: usize) -> Result<Poly> {
        let desc = &m.desc;
        let q = desc.size().ok_or(Error::Overflow)?;
        let mut r = Poly::x(desc).rem(m)?;
        for _ in 0..e {
            r = r.powmod(&[q], m)?;
        }
        Ok(r)
    }

    /// Substitute x -> x^n.
    pub fn inflate(&self, n: usize) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![self.desc.zero(); (self.c.len() - 1) * n + 1];
        for (i, a) in self.c.iter().enumerate() {
            c[i * n] = a.clone();
        }
        Poly::from_coeffs(&self.desc, c)
    }

    /// When every exponent with nonzero coefficient is divisible by n,
    /// returns g with g(x^n) = self.
    pub fn deflate(&self, n: usize) -> Option<Poly> {
        for (i, a) in self.c.iter().enumerate() {
            if !a.is_zero() && i % n != 0 {
                return None;
            }
        }
        let c = self.c.iter().step_by(n).cloned().collect();
        Some(Poly::from_coeffs(&self.desc, c))
    }

    /// Map all coefficients through an embedding into a larger field.
    pub fn embed(&self, emb: &Embedding) -> Poly {
        Poly::from_coeffs(&emb.tgt, self.c.iter().map(|a| emb.apply(a)).collect())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, a) in self.c.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({a})")?,
                1 => write!(f, "({a})*x")?,
                _ => write!(f, "({a})*x^{i}")?,
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Irreducibility and primality
// ---------------------------------------------------------------------------

/// Deterministic Miller-Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = modpow_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn modpow_u64(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod_u64(r, a, m);
        }
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    r
}

/// Prime factorization of a u64 by trial division (desk-scale inputs).
pub fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Irreducibility of a monic polynomial over GF(p), Rabin's test.
fn is_irreducible_mod_p(p: u64, m: &[u64]) -> bool {
    let desc = match FieldDescriptor::prime(p) {
        Ok(d) => d,
        Err(_) => return false,
    };
    let poly = Poly::from_coeffs(&desc, m.iter().map(|&c| desc.from_u64(c)).collect());
    is_irreducible(&poly)
}

/// Rabin irreducibility test over any GF(q).
pub fn is_irreducible(f: &Poly) -> bool {
    let n = match f.degree() {
        Some(n) if n >= 1 => n,
        _ => return false,
    };
    if n == 1 {
        return true;
    }
    // x^(q^n) == x mod f, and gcd(x^(q^(n/r)) - x, f) = 1 for prime r | n
    let x = Poly::x(f.field());
    let xn = match Poly::x_qpow_mod(f, n) {
        Ok(v) => v,
        Err(_) => return false,
    };
    if xn != x.rem(f).unwrap() {
        return false;
    }
    for (r, _) in prime_factors(n as u64) {
        let e = n / r as usize;
        let xe = match Poly::x_qpow_mod(f, e) {
            Ok(v) => v,
            Err(_) => return false,
        };
        let g = match xe.sub(&x).gcd(f) {
            Ok(g) => g,
            Err(_) => return false,
        };
        if g.degree() != Some(0) {
            return false;
        }
    }
    true
}

// ---------------------------------------------------------------------------
// Factorization
// ---------------------------------------------------------------------------

/// Tiny deterministic PRNG for equal-degree splitting; fixed seeding keeps
/// the whole factorization pipeline reproducible.
struct SplitMix(u64);

impl SplitMix {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^ (z >> 31)
    }
}

fn random_poly(desc: &Arc<FieldDescriptor>, deg: usize, rng: &mut SplitMix) -> Poly {
    let q = desc.size().expect("field too large");
    let mut c = Vec::with_capacity(deg + 1);
    for _ in 0..=deg {
        let n = rng.next() % q;
        let mut digits = vec![0u64; desc.degree()];
        let mut m = n;
        for slot in digits.iter_mut() {
            *slot = m % desc.characteristic();
            m /= desc.characteristic();
        }
        c.push(desc.element(&digits));
    }
    Poly::from_coeffs(desc, c)
}

/// Full squarefree factorization valid in characteristic p over a perfect
/// field: returns pairwise coprime monic squarefree parts with multiplicities.
pub fn squarefree_decomposition(f: &Poly) -> Result<Vec<(Poly, usize)>> {
    let f = f.monic()?;
    let mut out: Vec<(Poly, usize)> = Vec::new();
    squarefree_rec(&f, 1, &mut out)?;
    out.sort_by_key(|(_, m)| *m);
    Ok(out)
}

fn squarefree_rec(f: &Poly, mult: usize, out: &mut Vec<(Poly, usize)>) -> Result<()> {
    if f.degree() == Some(0) {
        return Ok(());
    }
    let p = f.field().characteristic() as usize;
    let df = f.derivative();
    if df.is_zero() {
        // f = g(x^p); over a perfect field take p-th roots of coefficients
        let g = f.deflate(p).expect("zero derivative implies p-power support");
        let g = Poly::from_coeffs(
            g.field(),
            g.coeffs().iter().map(Fq::pth_root).collect(),
        );
        return squarefree_rec(&g, mult * p, out);
    }
    let mut c = f.gcd(&df)?;
    let mut w = f.divrem(&c)?.0; // product of factors with p ∤ multiplicity
    // peel multiplicities off w (Yun-style)
    let mut i = 1usize;
    while w.degree() != Some(0) {
        let y = w.gcd(&c)?;
        let piece = w.divrem(&y)?.0;
        if piece.degree().map_or(false, |d| d > 0) {
            out.push((piece, mult * i));
        }
        w = y.clone();
        c = c.divrem(&y)?.0;
        i += 1;
    }
    if c.degree().map_or(false, |d| d > 0) {
        // leftover factors all have multiplicity divisible by p; c has zero
        // derivative and the recursion deflates it
        squarefree_rec(&c, mult, out)?;
    }
    Ok(())
}

/// Distinct-degree factorization of a monic squarefree polynomial:
/// pairs (d, product of all irreducible factors of degree d).
pub fn distinct_degree(f: &Poly) -> Result<Vec<(usize, Poly)>> {
    let mut f = f.monic()?;
    let desc = f.field().clone();
    let q = desc.size().ok_or(Error::Overflow)?;
    let mut out = Vec::new();
    let mut h = Poly::x(&desc).rem(&f)?;
    let mut d = 0usize;
    while f.degree().map_or(false, |deg| deg > 0) {
        d += 1;
        if 2 * d > f.degree().unwrap() {
            // what is left is a single irreducible factor
            out.push((f.degree().unwrap(), f.clone()));
            break;
        }
        h = h.powmod(&[q], &f)?;
        let g = h.sub(&Poly::x(&desc)).gcd(&f)?;
        if g.degree().map_or(false, |deg| deg > 0) {
            out.push((d, g.clone()));
            f = f.divrem(&g)?.0;
            h = h.rem(&f)?;
        }
    }
    Ok(out)
}

/// Cantor-Zassenhaus equal-degree splitting: factor a monic squarefree
/// product of irreducibles all of degree d.
pub fn equal_degree(f: &Poly, d: usize) -> Result<Vec<Poly>> {
    let deg = f.degree().unwrap_or(0);
    if deg == d {
        return Ok(vec![f.monic()?]);
    }
    let desc = f.field().clone();
    let q = desc.size().ok_or(Error::Overflow)?;
    let mut rng = SplitMix(0x0DDB1A5E5BAD5EEDu64 ^ (deg as u64) << 32 ^ d as u64);
    loop {
        let r = random_poly(&desc, deg - 1, &mut rng);
        if r.degree().is_none() {
            continue;
        }
        let g = r.gcd(f)?;
        let split = if g.degree().map_or(false, |dg| dg > 0) {
            g
        } else if desc.characteristic() == 2 {
            // trace map over GF(2): sum of r^(2^i) for i < log2(q^d)
            let bits = desc.degree() * d;
            let mut t = r.clone().rem(f)?;
            let mut acc = t.clone();
            for _ in 1..bits {
                t = t.mul(&t).rem(f)?;
                acc = acc.add(&t).rem(f)?;
            }
            acc.gcd(f)?
        } else {
            // r^((q^d - 1)/2) - 1 catches about half the factors
            let e = qd_minus1_half(q, d);
            let mut s = r.powmod(&e, f)?;
            s = s.sub(&Poly::one(&desc));
            s.gcd(f)?
        };
        let sd = split.degree().unwrap_or(0);
        if sd > 0 && sd < deg {
            let rest = f.divrem(&split)?.0;
            let mut out = equal_degree(&split, d)?;
            out.extend(equal_degree(&rest, d)?);
            out.sort_by(|a, b| cmp_poly_lex(a, b));
            return Ok(out);
        }
    }
}

/// (q^d - 1)/2 as base-2^64 little-endian limbs.
fn qd_minus1_half(q: u64, d: usize) -> Vec<u64> {
    // compute q^d - 1 in limbs, then shift right by 1
    let mut limbs = vec![1u64];
    for _ in 0..d {
        let mut carry = 0u128;
        for l in limbs.iter_mut() {
            let v = *l as u128 * q as u128 + carry;
            *l = v as u64;
            carry = v >> 64;
        }
        if carry > 0 {
            limbs.push(carry as u64);
        }
    }
    // subtract 1
    for l in limbs.iter_mut() {
        if *l > 0 {
            *l -= 1;
            break;
        }
        *l = u64::MAX;
    }
    // halve
    let mut out = vec![0u64; limbs.len()];
    let mut carry = 0u64;
    for i in (0..limbs.len()).rev() {
        out[i] = (limbs[i] >> 1) | (carry << 63);
        carry = limbs[i] & 1;
    }
    while out.last() == Some(&0) && out.len() > 1 {
        out.pop();
    }
    out
}

fn cmp_poly_lex(a: &Poly, b: &Poly) -> core::cmp::Ordering {
    a.coeffs()
        .len()
        .cmp(&b.coeffs().len())
        .then_with(|| {
            for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
                let c = x.lex_cmp(y);
                if c != core::cmp::Ordering::Equal {
                    return c;
                }
            }
            core::cmp::Ordering::Equal
        })
}

/// Complete factorization into monic irreducibles with multiplicities,
/// in a deterministic order.
pub fn factor(f: &Poly) -> Result<Vec<(Poly, usize)>> {
    let mut out = Vec::new();
    for (sf, mult) in squarefree_decomposition(f)? {
        for (d, prod) in distinct_degree(&sf)? {
            for irr in equal_degree(&prod, d)? {
                out.push((irr, mult));
            }
        }
    }
    out.sort_by(|(a, ma), (b, mb)| cmp_poly_lex(a, b).then(ma.cmp(mb)));
    Ok(out)
}

// ---------------------------------------------------------------------------
// Roots
// ---------------------------------------------------------------------------

/// Roots of f in its own coefficient field, with multiplicities, sorted in
/// coefficient-lex order. Fields of size below 2^16 are also cross-checkable
/// by exhaustion; see `roots_exhaustive`.
pub fn roots_in_field(f: &Poly) -> Result<Vec<(Fq, usize)>> {
    if f.is_zero() {
        return Err(Error::Degenerate(String::from("roots of zero polynomial")));
    }
    let mut out = Vec::new();
    for (irr, mult) in factor(f)? {
        if irr.degree() == Some(1) {
            // monic x + c -> root -c
            let root = irr.coeff(0).neg();
            out.push((root, mult));
        }
    }
    out.sort_by(|(a, _), (b, _)| a.lex_cmp(b));
    Ok(out)
}

/// Brute-force root finder for small fields; independent path used by tests.
pub fn roots_exhaustive(f: &Poly) -> Result<Vec<(Fq, usize)>> {
    let desc = f.field().clone();
    let q = desc.size().ok_or(Error::Overflow)?;
    if q > 1 << 16 {
        return Err(Error::Overflow);
    }
    let mut out = Vec::new();
    for a in desc.elements() {
        if !f.eval(&a).is_zero() {
            continue;
        }
        // multiplicity by repeated division by (x - a)
        let lin = Poly::from_coeffs(&desc, vec![a.neg(), desc.one()]);
        let mut g = f.clone();
        let mut m = 0usize;
        loop {
            let (quo, rem) = g.divrem(&lin)?;
            if !rem.is_zero() {
                break;
            }
            m += 1;
            g = quo;
        }
        out.push((a, m));
    }
    out.sort_by(|(a, _), (b, _)| a.lex_cmp(b));
    Ok(out)
}

/// Result of root finding with optional extension of the coefficient field.
pub struct SplitRoots {
    /// Field all roots live in (may equal the input field).
    pub field: Arc<FieldDescriptor>,
    /// Embedding of the input field into `field` (identity when equal).
    pub embedding: Embedding,
    /// Roots with multiplicities, sorted coefficient-lexicographically.
    pub roots: Vec<(Fq, usize)>,
}

/// All roots of f over the smallest extension GF(q^m) where f splits,
/// m = lcm of the degrees of the irreducible factors.
pub fn roots_split(f: &Poly) -> Result<SplitRoots> {
    let desc = f.field().clone();
    let facs = factor(f)?;
    let mut m = 1usize;
    for (irr, _) in &facs {
        m = num_integer::lcm(m, irr.degree().unwrap_or(1));
    }
    if m == 1 {
        return Ok(SplitRoots {
            field: desc.clone(),
            embedding: Embedding::identity(&desc),
            roots: roots_in_field(f)?,
        });
    }
    let target = FieldDescriptor::extension(desc.characteristic(), desc.degree() * m)?;
    let emb = Embedding::new(&desc, &target)?;
    let lifted = f.embed(&emb);
    let roots = roots_in_field(&lifted)?;
    Ok(SplitRoots { field: target, embedding: emb, roots })
}

// ---------------------------------------------------------------------------
// Embeddings
// ---------------------------------------------------------------------------

/// A fixed ring embedding GF(p^a) -> GF(p^b), a | b, determined by the image
/// of the source generator: the lex-least root of the source modulus in the
/// target field.
#[derive(Debug, Clone)]
pub struct Embedding {
    src: Arc<FieldDescriptor>,
    tgt: Arc<FieldDescriptor>,
    gen_image: Fq,
}

impl Embedding {
    pub fn identity(desc: &Arc<FieldDescriptor>) -> Embedding {
        Embedding { src: desc.clone(), tgt: desc.clone(), gen_image: desc.gen() }
    }

    pub fn new(src: &Arc<FieldDescriptor>, tgt: &Arc<FieldDescriptor>) -> Result<Embedding> {
        if src.characteristic() != tgt.characteristic()
            || tgt.degree() % src.degree() != 0
        {
            return Err(Error::NoSuchEmbedding);
        }
        if src == tgt {
            return Ok(Embedding::identity(src));
        }
        if src.degree() == 1 {
            return Ok(Embedding { src: src.clone(), tgt: tgt.clone(), gen_image: tgt.zero() });
        }
        // lex-least root of the source modulus in the target field
        let modulus = Poly::from_coeffs(
            tgt,
            src.modulus().iter().map(|&c| tgt.from_u64(c)).collect(),
        );
        let roots = roots_in_field(&modulus)?;
        let (root, _) = roots
            .into_iter()
            .next()
            .ok_or(Error::NoSuchEmbedding)?;
        Ok(Embedding { src: src.clone(), tgt: tgt.clone(), gen_image: root })
    }

    pub fn source(&self) -> &Arc<FieldDescriptor> {
        &self.src
    }

    pub fn target(&self) -> &Arc<FieldDescriptor> {
        &self.tgt
    }

    pub fn is_identity(&self) -> bool {
        self.src == self.tgt
    }

    pub fn apply(&self, a: &Fq) -> Fq {
        assert!(a.field() == &self.src, "element not in embedding source field");
        if self.is_identity() {
            return a.clone();
        }
        let mut acc = self.tgt.zero();
        for c in a.coeffs().iter().rev() {
            acc = acc.mul(&self.gen_image).add(&self.tgt.from_u64(*c));
        }
        acc
    }

    pub fn gen_image(&self) -> &Fq {
        &self.gen_image
    }

    /// Build an embedding sending the generator of `src` to a prescribed
    /// root of the source modulus; fails if it is not a root.
    pub fn with_gen_image(
        src: &Arc<FieldDescriptor>,
        tgt: &Arc<FieldDescriptor>,
        gen_image: Fq,
    ) -> Result<Embedding> {
        if src.characteristic() != tgt.characteristic()
            || tgt.degree() % src.degree() != 0
            || gen_image.field() != tgt
        {
            return Err(Error::NoSuchEmbedding);
        }
        let modulus = Poly::from_coeffs(
            tgt,
            src.modulus().iter().map(|&c| tgt.from_u64(c)).collect(),
        );
        if !modulus.eval(&gen_image).is_zero() {
            return Err(Error::NoSuchEmbedding);
        }
        Ok(Embedding { src: src.clone(), tgt: tgt.clone(), gen_image })
    }

    /// Composition: `self` followed by `next`; the target of `self` must be
    /// the source of `next`.
    pub fn compose(&self, next: &Embedding) -> Embedding {
        assert!(
            &self.tgt == next.source(),
            "embedding composition: fields do not match"
        );
        Embedding {
            src: self.src.clone(),
            tgt: next.target().clone(),
            gen_image: next.apply(&self.gen_image),
        }
    }
}

/// Given two embeddings e1: E -> E1 and e2: E -> E2 with the same source,
/// find a field F and embeddings j1: E1 -> F, j2: E2 -> F making the square
/// commute (j1 . e1 = j2 . e2). This is what lets results computed over
/// independently discovered extensions be combined without mixing up
/// conjugates.
pub fn join_embeddings(
    e1: &Embedding,
    e2: &Embedding,
) -> Result<(Arc<FieldDescriptor>, Embedding, Embedding)> {
    assert!(e1.source() == e2.source(), "join_embeddings: sources differ");
    let t1 = e1.target();
    let t2 = e2.target();
    if t1 == t2 && e1.gen_image == e2.gen_image {
        return Ok((t1.clone(), Embedding::identity(t1), Embedding::identity(t2)));
    }
    let p = t1.characteristic();
    let deg = num_integer::lcm(t1.degree(), t2.degree());
    let target = if deg == t1.degree() {
        t1.clone()
    } else if deg == t2.degree() {
        t2.clone()
    } else {
        FieldDescriptor::extension(p, deg)?
    };
    let j1 = if &target == t1 {
        Embedding::identity(t1)
    } else {
        Embedding::new(t1, &target)?
    };
    let want = j1.apply(&e1.apply(&e2.src.gen()));
    // all embeddings E2 -> target send the generator to a root of E2's modulus
    let modulus = Poly::from_coeffs(
        &target,
        t2.modulus().iter().map(|&c| target.from_u64(c)).collect(),
    );
    for (root, _) in roots_in_field(&modulus)? {
        let cand = Embedding { src: t2.clone(), tgt: target.clone(), gen_image: root };
        if cand.apply(&e2.gen_image) == want {
            return Ok((target, j1, cand));
        }
    }
    Err(Error::Degenerate(String::from(
        "no compatible embedding closes the square",
    )))
}

/// Smallest extension of `desc` containing a primitive b-th root of unity
/// (requires gcd(b, p) = 1), together with one such root, chosen lex-least
/// among primitive b-th roots.
pub fn with_root_of_unity(desc: &Arc<FieldDescriptor>, b: u64) -> Result<(Arc<FieldDescriptor>, Embedding, Fq)> {
    let p = desc.characteristic();
    if b == 0 || b % p == 0 {
        return Err(Error::WildRamification { denominator: b });
    }
    let q0 = desc.size().ok_or(Error::Overflow)?;
    // multiplicative order of q0 modulo b
    let mut t = 1usize;
    let mut qt = q0 % b;
    while qt != 1 % b {
        qt = mulmod_u64(qt, q0 % b, b);
        t += 1;
        if t > 64 {
            return Err(Error::Overflow);
        }
    }
    let (target, emb) = if t == 1 {
        (desc.clone(), Embedding::identity(desc))
    } else {
        let target = FieldDescriptor::extension(p, desc.degree() * t)?;
        let emb = Embedding::new(desc, &target)?;
        (target, emb)
    };
    let q = target.size().ok_or(Error::Overflow)?;
    debug_assert_eq!((q - 1) % b, 0);
    let cof = (q - 1) / b;
    let fac_b = prime_factors(b);
    for a in target.elements() {
        if a.is_zero() {
            continue;
        }
        let z = a.pow(cof);
        if z.pow(b) != target.one() {
            continue;
        }
        let primitive = fac_b.iter().all(|(r, _)| z.pow(b / r) != target.one());
        if primitive {
            return Ok((target.clone(), emb, z));
        }
    }
    Err(Error::Degenerate(String::from("no primitive root of unity found")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let f5 = FieldDescriptor::prime(5).unwrap();
        let a = f5.from_u64(3);
        let b = f5.from_u64(4);
        assert_eq!(a.mul(&b), f5.from_u64(2));
        assert_eq!(a.add(&b), f5.from_u64(2));
        assert_eq!(a.inv().unwrap().mul(&a), f5.one());
        assert_eq!(f5.from_i64(-1), f5.from_u64(4));
    }

    #[test]
    fn default_modulus_gf4_is_t2_t_1() {
        // over GF(2): t^2, t^2+1=(t+1)^2, t^2+t=t(t+1) reducible; t^2+t+1 first
        let f4 = FieldDescriptor::extension(2, 2).unwrap();
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        let g = f4.gen();
        // g^2 = g + 1
        assert_eq!(g.mul(&g), g.add(&f4.one()));
        // multiplicative order 3
        assert_eq!(g.pow(3), f4.one());
    }

    #[test]
    fn reducible_modulus_rejected() {
        assert_eq!(
            FieldDescriptor::with_modulus(2, vec![1, 0, 1]).unwrap_err(),
            Error::ReducibleModulus
        );
    }

    #[test]
    fn frobenius_additive_and_pth_root() {
        let f27 = FieldDescriptor::extension(3, 3).unwrap();
        for a in f27.elements().take(27) {
            let b = a.add(&f27.gen());
            assert_eq!(a.add(&b).frobenius(), a.frobenius().add(&b.frobenius()));
            assert_eq!(a.pth_root().pow(3), a);
        }
    }

    #[test]
    fn factor_matches_exhaustive_roots() {
        // x^4 + x over GF(2^2): roots are the cube roots of unity and 0
        let f4 = FieldDescriptor::extension(2, 2).unwrap();
        let f = Poly::from_coeffs(
            &f4,
            vec![f4.zero(), f4.one(), f4.zero(), f4.zero(), f4.one()],
        );
        let fast = roots_in_field(&f).unwrap();
        let slow = roots_exhaustive(&f).unwrap();
        assert_eq!(fast, slow);
        assert_eq!(fast.len(), 4);
    }

    #[test]
    fn squarefree_decomposition_char_p_powers() {
        // (x+1)^3 * x over GF(3): derivative of (x+1)^3 vanishes
        let f3 = FieldDescriptor::prime(3).unwrap();
        let xp1 = Poly::from_coeffs(&f3, vec![f3.one(), f3.one()]);
        let f = xp1.pow(3).mul(&Poly::x(&f3));
        let dec = squarefree_decomposition(&f).unwrap();
        let mut total = Poly::one(&f3);
        for (g, m) in &dec {
            total = total.mul(&g.pow(*m as u64));
        }
        assert_eq!(total, f.monic().unwrap());
        assert!(dec.iter().any(|(_, m)| *m == 3));
    }

    #[test]
    fn splitting_field_roots() {
        // x^2 + x + 1 over GF(2) splits in GF(4)
        let f2 = FieldDescriptor::prime(2).unwrap();
        let f = Poly::from_coeffs(&f2, vec![f2.one(), f2.one(), f2.one()]);
        let split = roots_split(&f).unwrap();
        assert_eq!(split.field.degree(), 2);
        assert_eq!(split.roots.len(), 2);
        for (r, m) in &split.roots {
            assert_eq!(*m, 1);
            assert!(f.embed(&split.embedding).eval(r).is_zero());
        }
    }

    #[test]
    fn embedding_is_ring_map() {
        let f4 = FieldDescriptor::extension(2, 2).unwrap();
        let f16 = FieldDescriptor::extension(2, 4).unwrap();
        let emb = Embedding::new(&f4, &f16).unwrap();
        for a in f4.elements() {
            for b in f4.elements() {
                assert_eq!(emb.apply(&a.mul(&b)), emb.apply(&a).mul(&emb.apply(&b)));
                assert_eq!(emb.apply(&a.add(&b)), emb.apply(&a).add(&emb.apply(&b)));
            }
        }
        assert_eq!(emb.apply(&f4.one()), f16.one());
    }

    #[test]
    fn embedding_requires_divisibility() {
        let f8 = FieldDescriptor::extension(2, 3).unwrap();
        let f16 = FieldDescriptor::extension(2, 4).unwrap();
        assert_eq!(Embedding::new(&f8, &f16).unwrap_err(), Error::NoSuchEmbedding);
    }

    #[test]
    fn roots_of_unity() {
        let f5 = FieldDescriptor::prime(5).unwrap();
        let (fld, _, z) = with_root_of_unity(&f5, 3).unwrap();
        assert_eq!(fld.degree(), 2); // 3 | 25 - 1 but not 5 - 1
        assert_eq!(z.pow(3), fld.one());
        assert_ne!(z, fld.one());
        // wild request rejected
        assert!(matches!(
            with_root_of_unity(&f5, 10).unwrap_err(),
            Error::WildRamification { denominator: 10 }
        ));
    }

    #[test]
    fn xgcd_bezout() {
        let f7 = FieldDescriptor::prime(7).unwrap();
        let a = Poly::from_coeffs(&f7, vec![f7.from_u64(1), f7.from_u64(0), f7.one()]); // x^2+1
        let b = Poly::from_coeffs(&f7, vec![f7.from_u64(3), f7.one()]); // x+3
        let (g, s, t) = a.xgcd(&b).unwrap();
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }
}
