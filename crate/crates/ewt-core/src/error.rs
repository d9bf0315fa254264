use alloc::string::String;
use core::fmt;

/// Errors surfaced by the exact computations in this crate.
///
/// Anything that would silently produce a wrong exact value is an error here,
/// never a best-effort answer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A polynomial claimed to be an extension modulus is not irreducible.
    ReducibleModulus,
    /// Requested an embedding GF(p^a) -> GF(p^b) with a not dividing b,
    /// or between fields of different characteristic.
    NoSuchEmbedding,
    /// A truncated series does not carry enough terms to certify the
    /// requested quantity (an order, a resultant valuation, a coefficient).
    PrecisionExhausted(String),
    /// A Puiseux-type expansion would need an exponent denominator divisible
    /// by the characteristic.
    WildRamification { denominator: u64 },
    /// No parametrization of a branch is available (wild branch without a
    /// y^p-power reduction and no user-supplied parametrization).
    NoParametrization,
    /// The germs share a component, so a finite intersection number,
    /// distance, or order of coincidence does not exist.
    CommonComponent,
    /// An operation needed f(0,y) != 0 or x-regularity that does not hold.
    NotRegular(String),
    /// Pairwise distances fed to the tree builder violate the strong
    /// triangle inequality or the gluing constraints; the input invariants
    /// are mutually inconsistent.
    GluingInconsistency(String),
    /// Pairwise distances of an attaching germ are not realizable on the tree.
    InconsistentDistances(String),
    /// A queried contact or integral value lies outside the tree.
    PointOffTree,
    /// A germ pulled back along a parametrization vanishes identically, so
    /// it has no order along that branch.
    VanishesOnBranch,
    /// A brute-force semigroup enumeration bound was too small to certify
    /// the claimed conductor.
    BoundTooSmall,
    /// Division by zero, zero germ where a nonzero one is required, etc.
    Degenerate(String),
    /// An intermediate exponent or index overflowed the machine-word budget.
    Overflow,
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ReducibleModulus => write!(f, "extension modulus is reducible"),
            Error::NoSuchEmbedding => write!(f, "no field embedding exists"),
            Error::PrecisionExhausted(what) => {
                write!(f, "series precision exhausted: {what}")
            }
            Error::WildRamification { denominator } => write!(
                f,
                "expansion needs ramification of order {denominator}, divisible by the characteristic"
            ),
            Error::NoParametrization => write!(f, "no parametrization available for branch"),
            Error::CommonComponent => write!(f, "germs share a common component"),
            Error::NotRegular(what) => write!(f, "germ not regular: {what}"),
            Error::GluingInconsistency(what) => write!(f, "tree gluing inconsistency: {what}"),
            Error::InconsistentDistances(what) => write!(f, "inconsistent distances: {what}"),
            Error::PointOffTree => write!(f, "queried point lies outside the tree"),
            Error::VanishesOnBranch => {
                write!(f, "germ vanishes identically along the branch")
            }
            Error::BoundTooSmall => {
                write!(f, "enumeration bound too small to certify the semigroup")
            }
            Error::Degenerate(what) => write!(f, "degenerate input: {what}"),
            Error::Overflow => write!(f, "exponent arithmetic overflow"),
        }
    }
}
