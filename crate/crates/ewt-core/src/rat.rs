//! Exact rational exponents and values, plus the one-point extension by
//! infinity used for contact values and orders of coincidence.

use core::cmp::Ordering;
use core::fmt;

use num_rational::Ratio;
use num_traits::{Signed, Zero};

/// Exact rational number on i128 words. Desk-scale exponents stay far below
/// the overflow range; `Ratio` reduces on construction.
pub type Rat = Ratio<i128>;

/// Convenience constructor.
pub fn rat(num: i128, den: i128) -> Rat {
    Ratio::new(num, den)
}

pub fn rat_int(num: i128) -> Rat {
    Ratio::from_integer(num)
}

/// A rational extended by a single +infinity, ordered above every rational.
///
/// Contact values of leaves, orders of coincidence of equal series, and
/// intersection numbers of germs with a common component all take this value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtRat {
    Finite(Rat),
    Infinity,
}

impl ExtRat {
    pub fn finite(num: i128, den: i128) -> Self {
        ExtRat::Finite(rat(num, den))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRat::Infinity)
    }

    /// The finite value, or `None` at infinity.
    pub fn as_finite(&self) -> Option<Rat> {
        match self {
            ExtRat::Finite(r) => Some(*r),
            ExtRat::Infinity => None,
        }
    }

    /// Panics at infinity; for call sites that have already excluded it.
    pub fn expect_finite(&self, what: &str) -> Rat {
        match self {
            ExtRat::Finite(r) => *r,
            ExtRat::Infinity => panic!("unexpected infinite value: {what}"),
        }
    }
}

impl From<Rat> for ExtRat {
    fn from(r: Rat) -> Self {
        ExtRat::Finite(r)
    }
}

impl PartialOrd for ExtRat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtRat {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRat::Infinity, ExtRat::Infinity) => Ordering::Equal,
            (ExtRat::Infinity, _) => Ordering::Greater,
            (_, ExtRat::Infinity) => Ordering::Less,
            (ExtRat::Finite(a), ExtRat::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for ExtRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRat::Finite(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            ExtRat::Infinity => write!(f, "inf"),
        }
    }
}

/// Denominator of `r` in lowest terms, as u64. `Ratio` keeps denominators
/// positive so the cast is safe for all desk-scale values.
pub fn denom_u64(r: Rat) -> u64 {
    debug_assert!(r.denom().is_positive());
    *r.denom() as u64
}

/// Rational zero test without consuming the value.
pub fn is_zero(r: Rat) -> bool {
    r.is_zero()
}
