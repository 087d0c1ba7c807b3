//! Database-manipulating systems over relational instances.
//!
//! A system is an initial database and a set of guarded actions
//! `(guard, Del, Add)`. This crate evaluates guards, steps systems
//! concretely and over six abstract domains, explores bounded transition
//! systems, and checks bisimulation and Galois-connection laws.
//!
//! ```
//! use dms_core::{matches, Atom, ConstantPool, Guard, Instance, Term};
//!
//! let f = |a: &str, b: &str| Atom::from_parts("F", vec![Term::constant(a), Term::constant(b)]);
//! let inst = Instance::new([f("A", "B"), f("B", "A"), f("B", "C")]).unwrap();
//! let g = Guard::and(
//!     Guard::Atom(Atom::from_parts("F", vec![Term::var("x"), Term::var("y")])),
//!     Guard::not(Guard::Atom(Atom::from_parts("F", vec![Term::var("y"), Term::var("x")]))),
//! );
//! assert_eq!(matches(&g, &inst, &ConstantPool::default()).len(), 1);
//! ```

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod domain;
pub mod engine;
pub mod equivalence;
mod error;
pub mod guard;
pub mod matching;
pub mod sample;
pub mod term;

pub use domain::{
    abstract_matches, alpha, gamma_contains, gamma_enumerate, gamma_enumerate_over, lattice_join, lattice_meet, state_leq,
    AbstractState, DomainId, Gate, UnknownDomain,
};
pub use engine::{
    abstract_step, abstract_successors, concrete_step, concrete_successors, explore, label_compatible, lifted_forall_step,
    reachable, validate, Action, Dedup, Diagnostic, DmsSystem, ExplorationConfig, Label, Lts, Reachability, Rule, State,
    Transition,
};
pub use equivalence::{
    check_forall_bisim, check_galois, check_galois_with, largest_bisimulation, simulates, simulation_preorder, CheckReport,
    Failure, FailureKind, GaloisSpec, Law, LawCount, Partition, Verdict,
};
pub use error::{Error, Result};
pub use guard::{classify, normalize, Fragment, Guard, NormalGuard, Polarity};
pub use matching::{
    apply, core, extend_with_fresh_nulls, extensions_with_constants, find_homomorphism, find_homomorphism_bounded, hom_equiv,
    hom_leq, matches, satisfies, ConstantPool, Homomorphism, NullSupply, Substitution,
};
pub use term::{canonicalize, vars_of, Atom, Database, Instance, Name, Null, Predicate, Term, Vocabulary};
