//! Finite-scale patch presheaves, patch bundles and patch algebras.
//!
//! Every object lives over a finite commutative ring given by tables
//! ([`finring::FiniteRing`]). Subrings of it form a space
//! ([`topo::SubringSpace`]); indexing families of subrings by a finite
//! Boolean algebra ([`boolalg::BoolAlg`]) gives patch presheaves
//! ([`presheaf::PatchPresheaf`]) and, dually, patch bundles
//! ([`bundle::PatchBundle`]). The patch algebra of a presheaf
//! ([`patchalg::PatchAlgebra`]) is an idempotent-generated ring whose Pierce
//! stalks recover the subrings it was built from.
//!
//! ```
//! use patchalg::finring::{FiniteRing, DEFAULT_CAP};
//! use patchalg::topo::SubringSpace;
//!
//! let gf16 = FiniteRing::gf(2, 4, None)?;
//! let space = SubringSpace::enumerate(gf16, DEFAULT_CAP)?;
//! assert_eq!(space.len(), 3);
//! # Ok::<(), patchalg::Error>(())
//! ```

pub mod boolalg;
pub mod bundle;
pub mod error;
pub mod finring;
pub mod patchalg;
pub mod presheaf;
pub mod topo;

pub use error::{Error, Result};

// The guide's code blocks run as doc-tests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/boolean-algebras.md")]
    mod boolean_algebras {}
    #[doc = include_str!("../../../book/src/finite-rings.md")]
    mod finite_rings {}
    #[doc = include_str!("../../../book/src/subring-spaces.md")]
    mod subring_spaces {}
    #[doc = include_str!("../../../book/src/presheaves-and-bundles.md")]
    mod presheaves_and_bundles {}
    #[doc = include_str!("../../../book/src/patch-algebras.md")]
    mod patch_algebras {}
    #[doc = include_str!("../../../book/src/command-line.md")]
    mod command_line {}
}
