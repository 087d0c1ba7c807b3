//! Seeded random generators for databases, database sets and guarded actions.
//!
//! Used by the law checkers and by property tests; everything is driven by a
//! caller-supplied [`Rng`] so runs are reproducible.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::engine::Action;
use crate::guard::{Fragment, Guard};
use crate::term::{Atom, Database, Name, Predicate, Term};

/// `A`, `B`, … (then `K4`, `K5`, … past the alphabet).
pub fn constants(n: usize) -> Vec<Name> {
    (0..n)
        .map(|i| match u8::try_from(i).ok().filter(|&i| i < 26) {
            Some(i) => Name::from(format!("{}", (b'A' + i) as char)),
            None => Name::from(format!("K{i}")),
        })
        .collect()
}

/// Between one and `max_preds` predicates `P`, `Q`, … of arity 1 to `max_arity`.
pub fn vocabulary(rng: &mut impl Rng, max_preds: usize, max_arity: usize) -> Vec<Predicate> {
    const NAMES: [&str; 6] = ["P", "Q", "R", "S", "T", "U"];
    let n = rng.gen_range(1..=max_preds.clamp(1, NAMES.len()));
    NAMES[..n].iter().map(|p| Predicate::new(*p, rng.gen_range(1..=max_arity.max(1)))).collect()
}

fn random_atom(rng: &mut impl Rng, preds: &[Predicate], terms: &[Term]) -> Atom {
    let p = preds.choose(rng).expect("at least one predicate");
    Atom::from_parts(p.name().clone(), (0..p.arity()).map(|_| terms.choose(rng).expect("at least one term").clone()).collect())
}

/// A database of up to `max_atoms` atoms; may be empty.
pub fn database(rng: &mut impl Rng, preds: &[Predicate], consts: &[Name], max_atoms: usize) -> Database {
    let terms: Vec<Term> = consts.iter().cloned().map(Term::Const).collect();
    let n = rng.gen_range(0..=max_atoms);
    Database::new((0..n).map(|_| random_atom(rng, preds, &terms))).expect("constant atoms")
}

/// A nonempty list of up to `max_set` databases.
pub fn database_set(rng: &mut impl Rng, preds: &[Predicate], consts: &[Name], max_set: usize, max_atoms: usize) -> Vec<Database> {
    let n = rng.gen_range(1..=max_set.max(1));
    (0..n).map(|_| database(rng, preds, consts, max_atoms)).collect()
}

/// A random action whose guard lies in `fragment`.
///
/// The guard binds `x` (and `y` when some predicate is binary), `Del` only
/// mentions guard variables, and `Add` may use one add-only variable `z`.
/// `GeneralFol` is treated like `Ncg`.
pub fn random_action(rng: &mut impl Rng, name: &str, preds: &[Predicate], consts: &[Name], fragment: Fragment) -> Action {
    let free: Vec<Term> = if preds.iter().any(|p| p.arity() > 1) && rng.gen_bool(0.5) {
        alloc::vec![Term::var("x"), Term::var("y")]
    } else {
        alloc::vec![Term::var("x")]
    };
    let consts: Vec<Term> = consts.iter().cloned().map(Term::Const).collect();
    let mut with_consts = free.clone();
    if rng.gen_bool(0.3) {
        with_consts.extend(consts.choose(rng).cloned());
    }
    let quantified = Term::var("u");
    let mut with_quantified = with_consts.clone();
    with_quantified.push(quantified.clone());

    // Positive atoms must cover every free variable.
    let cover = |rng: &mut dyn rand::RngCore, pool: &[Term]| -> Vec<Atom> {
        let mut atoms: Vec<Atom> = Vec::new();
        for v in &free {
            let p = preds.choose(rng).expect("predicate");
            let mut terms: Vec<Term> = (0..p.arity()).map(|_| pool.choose(rng).expect("term").clone()).collect();
            let slot = rng.gen_range(0..terms.len());
            terms[slot] = v.clone();
            atoms.push(Atom::from_parts(p.name().clone(), terms));
        }
        atoms
    };
    let guard = match fragment {
        Fragment::PfCg => Guard::conj(cover(rng, &with_consts).into_iter().map(Guard::Atom)),
        Fragment::Cg => {
            let mut pos = cover(rng, &with_quantified);
            if rng.gen_bool(0.5) {
                pos.push(random_atom(rng, preds, &with_quantified));
            }
            Guard::exists_all([Name::from("u")], Guard::conj(pos.into_iter().map(Guard::Atom)))
        }
        Fragment::PfNcg => {
            let pos = cover(rng, &with_consts);
            let negs = (0..rng.gen_range(1..=2)).map(|_| Guard::not(Guard::Atom(random_atom(rng, preds, &with_consts))));
            Guard::conj(pos.into_iter().map(Guard::Atom).collect::<Vec<_>>().into_iter().chain(negs.collect::<Vec<_>>()))
        }
        Fragment::Ncg | Fragment::GeneralFol => {
            let mut pos = cover(rng, &with_quantified);
            if rng.gen_bool(0.5) {
                pos.push(random_atom(rng, preds, &with_quantified));
            }
            let negs: Vec<Guard> =
                (0..rng.gen_range(1..=2)).map(|_| Guard::not(Guard::Atom(random_atom(rng, preds, &with_quantified)))).collect();
            let body = Guard::conj(pos.into_iter().map(Guard::Atom).chain(negs));
            Guard::exists_all([Name::from("u")], body)
        }
        Fragment::Cna => {
            let mut atoms = Vec::new();
            for _ in 0..rng.gen_range(1..=2) {
                atoms.push(random_atom(rng, preds, &with_quantified));
            }
            // Every free variable has to occur somewhere to be bound.
            for v in &free {
                if !atoms.iter().any(|a| a.terms().contains(v)) {
                    let p = preds.choose(rng).expect("predicate");
                    let mut terms: Vec<Term> =
                        (0..p.arity()).map(|_| with_quantified.choose(rng).expect("term").clone()).collect();
                    terms[0] = v.clone();
                    atoms.push(Atom::from_parts(p.name().clone(), terms));
                }
            }
            let uses_u = atoms.iter().any(|a| a.terms().contains(&quantified));
            if uses_u {
                Guard::forall_not([Name::from("u")], atoms)
            } else {
                Guard::conj(atoms.into_iter().map(|a| Guard::not(Guard::Atom(a))))
            }
        }
    };

    let del: Vec<Atom> = if rng.gen_bool(0.5) { alloc::vec![random_atom(rng, preds, &with_consts)] } else { Vec::new() };
    let mut add_terms = with_consts.clone();
    if rng.gen_bool(0.4) {
        add_terms.push(Term::var("z"));
    }
    let add: Vec<Atom> = (0..rng.gen_range(0..=2)).map(|_| random_atom(rng, preds, &add_terms)).collect();
    Action::new(name, guard, del, add)
}
