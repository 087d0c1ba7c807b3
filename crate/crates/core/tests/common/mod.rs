//! Compact notation for test fixtures: `F(A,_n0)`, `P(x)`.
//!
//! Capitalized arguments are constants, `_nK` is the null `K`, anything else
//! is a variable.
#![allow(dead_code)]

use dms_core::{Atom, Database, Instance, Substitution, Term};

pub fn term(s: &str) -> Term {
    let s = s.trim();
    if let Some(k) = s.strip_prefix("_n") {
        Term::null(k.parse().expect("null index"))
    } else if s.starts_with(|c: char| c.is_ascii_uppercase()) {
        Term::constant(s)
    } else {
        Term::var(s)
    }
}

pub fn atom(s: &str) -> Atom {
    let s = s.trim();
    let (name, rest) = s.split_once('(').expect("predicate(args)");
    let args = rest.strip_suffix(')').expect("closing parenthesis");
    let terms = if args.trim().is_empty() { Vec::new() } else { args.split(',').map(term).collect() };
    Atom::from_parts(name.trim(), terms)
}

pub fn atoms(s: &str) -> Vec<Atom> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(atom(&s[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    if !s[start..].trim().is_empty() {
        out.push(atom(&s[start..]));
    }
    out
}

pub fn inst(s: &str) -> Instance {
    Instance::new(atoms(s)).expect("ground instance")
}

pub fn db(s: &str) -> Database {
    Database::new(atoms(s)).expect("database")
}

pub fn subst(pairs: &[(&str, &str)]) -> Substitution {
    pairs.iter().map(|(v, t)| ((*v).into(), term(t))).collect()
}

pub mod strategies {
    use dms_core::{Atom, Database, Instance, Term};
    use proptest::prelude::*;

    pub fn term(with_nulls: bool) -> BoxedStrategy<Term> {
        let consts = prop_oneof![Just(Term::constant("A")), Just(Term::constant("B")), Just(Term::constant("C"))];
        if with_nulls {
            prop_oneof![consts, (0u32..3).prop_map(Term::null)].boxed()
        } else {
            consts.boxed()
        }
    }

    pub fn atom(terms: BoxedStrategy<Term>) -> impl Strategy<Value = Atom> {
        prop_oneof![
            terms.clone().prop_map(|t| Atom::from_parts("P", vec![t])),
            (terms.clone(), terms).prop_map(|(a, b)| Atom::from_parts("F", vec![a, b])),
        ]
    }

    pub fn instance(with_nulls: bool, max: usize) -> impl Strategy<Value = Instance> {
        prop::collection::btree_set(atom(term(with_nulls)), 0..=max).prop_map(|s| Instance::new(s).unwrap())
    }

    pub fn database(max: usize) -> impl Strategy<Value = Database> {
        instance(false, max).prop_map(|i| Database::try_from(i).unwrap())
    }

    pub fn database_set(max_set: usize, max: usize) -> impl Strategy<Value = Vec<Database>> {
        prop::collection::vec(database(max), 1..=max_set)
    }
}
