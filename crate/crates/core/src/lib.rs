//! Exact computational group theory for products of conjugacy classes.
//!
//! The engine builds finite groups as permutation groups (symmetric,
//! alternating, classical groups over small finite fields, wreath products,
//! automorphism extensions, two Mathieu groups), enumerates their conjugacy
//! classes, computes class algebra structure constants by counting and exact
//! irreducible character tables by the Dixon–Burnside method, and runs a set
//! of theorem checkers on top: single-class products, centralizer
//! factorizations, fixed-point and Steinberg non-constancy, unipotent
//! products, and Baer–Suzuki style pair conditions.

pub mod algebra;
pub mod arith;
pub mod cache;
pub mod chartab;
pub mod classes;
pub mod cyclo;
pub mod error;
pub mod ffmat;
pub mod group;
pub mod perm;
pub mod verify;
pub mod zoo;

pub use error::{Error, Result};
pub use group::{Caps, PermGroup};
pub use perm::Perm;

/// Bumping this invalidates every cache entry.
pub const ENGINE_VERSION: &str = concat!("cforge-", env!("CARGO_PKG_VERSION"), "-1");
