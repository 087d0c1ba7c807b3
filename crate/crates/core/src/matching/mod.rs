//! Substitutions, guard satisfaction and matches, homomorphisms and cores.

mod eval;
mod hom;
mod subst;

pub(crate) use eval::{fresh_avoiding, is_normal_match, normal_matches, Universe};
pub use eval::{matches, satisfies};
pub use hom::{core, find_homomorphism, find_homomorphism_bounded, hom_equiv, hom_leq, Homomorphism};
pub use subst::{apply, extend_with_fresh_nulls, extensions_with_constants, ConstantPool, NullSupply, Substitution};
pub(crate) use subst::{for_each_assignment, ground};
