//! Brute-force cross-checks used by the test suites: intersection numbers
//! through parametrization pullbacks, and semigroups of values through
//! exhaustive order enumeration. Nothing here shares an algorithm with the
//! resultant or expansion-based paths it is checking; the code is
//! intentionally slow and plain.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;

use crate::bivar::Bivar;
use crate::branch::{Parametrization, SemigroupData};
use crate::error::{Error, Result};
use crate::rat::{rat_int, ExtRat, Rat};
use crate::series::Series;

/// g(x(t), y(t)) by plain substitution (Horner in y, ramification in x).
fn pullback(g: &Bivar, par: &Parametrization) -> Result<Series> {
    let n = match par.x_t.ord()? {
        ExtRat::Finite(o) if o.is_integer() && o.to_integer() >= 1 => o.to_integer() as u64,
        _ => {
            return Err(Error::Degenerate(String::from(
                "oracle wants x(t) = t^n with n >= 1",
            )))
        }
    };
    let mut acc = Series::zero(g.field());
    for s in g.coeffs().iter().rev() {
        acc = acc.mul(&par.y_t).add(&s.ramify(n));
    }
    Ok(acc)
}

/// Intersection number of g with the parametrized branch: the t-order of
/// the pullback g(x(t), y(t)).
pub fn i0_oracle(g: &Bivar, par: &Parametrization) -> Result<u64> {
    let pb = pullback(g, par)?;
    match pb.ord()? {
        ExtRat::Finite(o) if o.is_integer() && o.to_integer() >= 0 => Ok(o.to_integer() as u64),
        ExtRat::Finite(_) => Err(Error::Degenerate(String::from(
            "pullback order is not a nonnegative integer",
        ))),
        ExtRat::Infinity => Err(Error::VanishesOnBranch),
    }
}

/// Orders <= bound attained by the span of the monomial pullbacks
/// x^a y^b (x(t), y(t)), found by echelon reduction: one representative per
/// leading order, every new candidate reduced against the basis until its
/// order is new or it dies. Linear combinations beyond the monomials
/// themselves are exactly what the reduction produces, so the closure needs
/// no random sampling.
fn attained_orders(par: &Parametrization, bound: u64) -> Result<Vec<u64>> {
    let prec = rat_int(bound as i128 + 1);
    if let Some(pq) = par.y_t.precision() {
        if pq < prec {
            return Err(Error::PrecisionExhausted(String::from(
                "parametrization is not certified up to the enumeration bound",
            )));
        }
    }
    let n = match par.x_t.ord()? {
        ExtRat::Finite(o) => o.to_integer() as u64,
        ExtRat::Infinity => {
            return Err(Error::Degenerate(String::from("x(t) must be nonzero")))
        }
    };
    let oy: Option<u64> = match par.y_t.ord() {
        Ok(ExtRat::Finite(o)) => Some(o.to_integer() as u64),
        Ok(ExtRat::Infinity) => None,
        Err(e) => return Err(e),
    };
    let mut basis: Vec<Option<Series>> = vec![None; bound as usize + 1];
    let mut b = 0u64;
    loop {
        let base = oy.map(|o| o * b);
        match base {
            Some(v) if v > bound => break,
            None if b > 0 => break,
            _ => {}
        }
        let ypow = par.y_t.pow(b).truncate(prec);
        let mut a = 0u64;
        while base.unwrap_or(0) + a * n <= bound {
            let mut s = ypow.shift(rat_int((a * n) as i128)).truncate(prec);
            // reduce against the basis until the order is new
            loop {
                let (o, lc) = match s.iter().next() {
                    Some((e, c)) => (e, c.clone()),
                    None => break,
                };
                debug_assert!(o.is_integer());
                let ov = o.to_integer() as usize;
                if ov > bound as usize {
                    break;
                }
                match &basis[ov] {
                    None => {
                        basis[ov] = Some(s);
                        break;
                    }
                    Some(r) => {
                        let (_, rc) = r.iter().next().unwrap();
                        let scale = lc.mul(&rc.inv()?);
                        s = s.sub(&r.mul_scalar(&scale));
                    }
                }
            }
            a += 1;
        }
        b += 1;
    }
    Ok((0..=bound)
        .filter(|&o| basis[o as usize].is_some())
        .collect())
}

fn representable(o: u64, gens: &[u64]) -> bool {
    if o == 0 {
        return true;
    }
    if gens.is_empty() {
        return false;
    }
    let mut can = vec![false; o as usize + 1];
    can[0] = true;
    for v in 1..=o {
        for &g in gens {
            if g <= v && can[(v - g) as usize] {
                can[v as usize] = true;
                break;
            }
        }
    }
    can[o as usize]
}

/// Semigroup of values of a parametrized branch by exhaustive enumeration:
/// collect every attainable pullback order up to `bound`, extract the
/// greedy minimal generators, and refuse (BoundTooSmall) unless the bound
/// demonstrably reaches past the conductor.
pub fn semigroup_oracle(par: &Parametrization, bound: u64) -> Result<SemigroupData> {
    let orders = attained_orders(par, bound)?;
    let mut gens: Vec<u64> = Vec::new();
    for &o in &orders {
        if o > 0 && !representable(o, &gens) {
            gens.push(o);
        }
    }
    if gens.is_empty() || gens.iter().fold(0u64, |a, &b| a.gcd(&b)) != 1 {
        return Err(Error::BoundTooSmall);
    }
    // every order past the conductor is attained, so a full run of gens[0]
    // consecutive attained orders ending at the bound certifies that the
    // enumeration saw the entire complement
    let n0 = gens[0];
    if bound + 1 < n0 || !(bound + 1 - n0..=bound).all(|o| orders.binary_search(&o).is_ok()) {
        return Err(Error::BoundTooSmall);
    }
    // the attained set must be exactly the semigroup the generators span
    for o in 0..=bound {
        if representable(o, &gens) != orders.binary_search(&o).is_ok() {
            return Err(Error::Degenerate(String::from(
                "attained orders disagree with their own generators",
            )));
        }
    }
    SemigroupData::new(gens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branch::{parametrization, semigroup_of_branch};
    use crate::gf::FieldDescriptor;
    use crate::rat::rat_int;
    use alloc::sync::Arc;

    fn cusp_par(desc: &Arc<FieldDescriptor>) -> Parametrization {
        // (t^2, 2t^3)
        Parametrization {
            x_t: Series::monomial(desc.one(), rat_int(2)),
            y_t: Series::monomial(desc.from_u64(2), rat_int(3)),
        }
    }

    #[test]
    fn pullback_orders() {
        let f5 = FieldDescriptor::prime(5).unwrap();
        let par = cusp_par(&f5);
        // y^3 + x^4 pulls back to 8t^9 + t^8
        let g = Bivar::from_terms(&f5, &[(0, 3, 1), (4, 0, 1)]);
        assert_eq!(i0_oracle(&g, &par).unwrap(), 8);
        let x = Bivar::x(&f5);
        assert_eq!(i0_oracle(&x, &par).unwrap(), 2);
        // g = y on (t^3, -t^5) over GF(3)
        let f3 = FieldDescriptor::prime(3).unwrap();
        let par = Parametrization {
            x_t: Series::monomial(f3.one(), rat_int(3)),
            y_t: Series::monomial(f3.from_u64(2), rat_int(5)),
        };
        assert_eq!(i0_oracle(&Bivar::y(&f3), &par).unwrap(), 5);
        // y^2 - 4x^3 vanishes on the cusp branch
        let f5 = FieldDescriptor::prime(5).unwrap();
        let v = Bivar::from_terms(&f5, &[(0, 2, 1), (3, 0, -4)]);
        assert!(matches!(
            i0_oracle(&v, &cusp_par(&f5)),
            Err(Error::VanishesOnBranch)
        ));
    }

    #[test]
    fn semigroup_enumeration() {
        let f5 = FieldDescriptor::prime(5).unwrap();
        assert_eq!(semigroup_oracle(&cusp_par(&f5), 10).unwrap().gens(), &[2, 3]);
        // smooth branch (t, 0)
        let par = Parametrization {
            x_t: Series::monomial(f5.one(), rat_int(1)),
            y_t: Series::zero(&f5),
        };
        assert_eq!(semigroup_oracle(&par, 5).unwrap().gens(), &[1]);
        // too small a bound cannot certify the cusp
        assert!(matches!(
            semigroup_oracle(&cusp_par(&f5), 1),
            Err(Error::BoundTooSmall)
        ));
    }

    #[test]
    fn confirms_the_expansion_path() {
        // the degree-6 branch with semigroup (6, 8, 27) and conductor 38
        let f5 = FieldDescriptor::prime(5).unwrap();
        let f3 = Bivar::from_terms(&f5, &[(0, 6, 1), (4, 3, 2), (8, 0, 1), (9, 0, 1)]);
        let (emb, par) = parametrization(&f3, rat_int(12)).unwrap();
        let by_chain = semigroup_of_branch(&f3).unwrap();
        let by_enum = semigroup_oracle(&par, 46).unwrap();
        assert_eq!(by_chain, by_enum);
        assert_eq!(by_enum.gens(), &[6, 8, 27]);
        // and the pullback order of f3 itself is infinite
        let _ = emb;
    }
}
