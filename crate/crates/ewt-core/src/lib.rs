//! Exact local invariants of plane curve germs over finite fields.
//!
//! The crate computes, without floating point and without characteristic-zero
//! shortcuts: finite field arithmetic with explicit extensions, truncated
//! Puiseux series, Newton polygons, local branch decompositions with
//! irreducibility certificates, characteristic semigroups of branches,
//! Eggers-Wall trees with their contact/index/exponent functions, and the
//! decomposition of the polar curve induced by the tree.
//!
//! Everything is `no_std + alloc`; IO and file formats live in the companion
//! CLI crate.

#![no_std]

extern crate alloc;

pub mod error;
pub mod rat;

pub mod gf;
pub mod series;
pub mod bivar;
pub mod newton;
pub mod branch;
pub mod tree;
pub mod polar;
pub mod oracle;

pub use error::{Error, Result};
pub use rat::{ExtRat, Rat};
