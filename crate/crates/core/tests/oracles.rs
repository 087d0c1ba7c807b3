//! Brute-force reference implementations checked against the library.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::strategies::{atom as atom_strategy, instance};
use dms_core::{
    canonicalize, core, find_homomorphism, hom_equiv, hom_leq, matches, normalize, satisfies, Atom, ConstantPool, Guard,
    Instance, Name, Null, Substitution, Term,
};
use proptest::prelude::*;

// ---- naive guard semantics -------------------------------------------------

fn holds(g: &Guard, inst: &BTreeSet<Atom>, env: &mut BTreeMap<Name, Term>, witnesses: &[Term]) -> bool {
    let term = |t: &Term, env: &BTreeMap<Name, Term>| match t {
        Term::Var(v) => env[v].clone(),
        t => t.clone(),
    };
    match g {
        Guard::True => true,
        Guard::Atom(a) => {
            let ground = Atom::from_parts(a.predicate().name().clone(), a.terms().iter().map(|t| term(t, env)).collect());
            inst.contains(&ground)
        }
        Guard::Eq(a, b) => term(a, env) == term(b, env),
        Guard::Not(h) => !holds(h, inst, env, witnesses),
        Guard::And(a, b) => holds(a, inst, env, witnesses) && holds(b, inst, env, witnesses),
        Guard::Exists(v, body) => {
            let saved = env.get(v).cloned();
            let found = witnesses.iter().any(|w| {
                env.insert(v.clone(), w.clone());
                holds(body, inst, env, witnesses)
            });
            match saved {
                Some(t) => env.insert(v.clone(), t),
                None => env.remove(v),
            };
            found
        }
    }
}

fn binders(g: &Guard) -> usize {
    match g {
        Guard::Not(h) => binders(h),
        Guard::And(a, b) => binders(a) + binders(b),
        Guard::Exists(_, b) => 1 + binders(b),
        _ => 0,
    }
}

fn naive_matches(g: &Guard, inst: &Instance, pool: &[&str]) -> BTreeSet<Substitution> {
    naive_matches_over(g, g.free_vars().into_iter().collect(), inst, pool)
}

/// Free variables range over the pool, the guard's constants and the
/// instance's terms; witnesses add one unseen value per binder.
fn naive_matches_over(g: &Guard, free: Vec<Name>, inst: &Instance, pool: &[&str]) -> BTreeSet<Substitution> {
    let mut values: BTreeSet<Term> = pool.iter().map(|c| Term::constant(*c)).collect();
    values.extend(g.constants().into_iter().map(Term::Const));
    values.extend(inst.terms().cloned());
    let values: Vec<Term> = values.into_iter().collect();
    let mut witnesses = values.clone();
    witnesses.extend((0..binders(g)).map(|i| Term::constant(format!("#w{i}"))));
    let atoms = inst.atoms().clone();
    let mut out = BTreeSet::new();
    let mut idx = vec![0usize; free.len()];
    loop {
        if values.is_empty() && !free.is_empty() {
            return out;
        }
        let mut env: BTreeMap<Name, Term> = free.iter().cloned().zip(idx.iter().map(|&i| values[i].clone())).collect();
        if holds(g, &atoms, &mut env, &witnesses) {
            out.insert(env.into_iter().collect());
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return out;
            }
            idx[k] += 1;
            if idx[k] < values.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

// ---- naive homomorphisms ---------------------------------------------------

fn naive_hom(src: &Instance, dst: &Instance) -> bool {
    let nulls: Vec<Null> = src.nulls().into_iter().collect();
    let targets: Vec<Term> = dst.terms().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    if nulls.is_empty() {
        return src.is_subset(dst);
    }
    if targets.is_empty() {
        return false;
    }
    let mut idx = vec![0usize; nulls.len()];
    loop {
        let h: BTreeMap<Null, Term> = nulls.iter().copied().zip(idx.iter().map(|&i| targets[i].clone())).collect();
        if src.map_nulls(|n| h[&n].clone()).is_subset(dst) {
            return true;
        }
        let mut k = 0;
        loop {
            if k == idx.len() {
                return false;
            }
            idx[k] += 1;
            if idx[k] < targets.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

// ---- generators ------------------------------------------------------------

const VARS: [&str; 4] = ["x", "y", "u", "w"];

fn guard_term() -> BoxedStrategy<Term> {
    prop_oneof![
        4 => prop::sample::select(VARS.to_vec()).prop_map(Term::var),
        1 => prop_oneof![Just(Term::constant("A")), Just(Term::constant("B"))],
    ]
    .boxed()
}

fn guard_strategy() -> impl Strategy<Value = Guard> {
    let leaf = prop_oneof![
        6 => atom_strategy(guard_term()).prop_map(Guard::Atom),
        1 => (guard_term(), guard_term()).prop_map(|(a, b)| Guard::Eq(a, b)),
        1 => Just(Guard::True),
    ];
    leaf.prop_recursive(4, 12, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Guard::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Guard::and(a, b)),
            (prop::sample::select(VARS.to_vec()), inner).prop_map(|(v, b)| Guard::exists(v, b)),
        ]
    })
}

/// Guards already in the shape of the fragments: `∃ū. pos ∧ ¬neg` or `∀ū. ¬…`.
fn normal_shaped_guard() -> impl Strategy<Value = Guard> {
    let atoms = || prop::collection::vec(atom_strategy(guard_term()), 0..3);
    (
        atoms(),
        atoms(),
        prop::sample::subsequence(vec!["u", "w"], 0..=2),
        any::<bool>(),
        prop::option::of((guard_term(), guard_term())),
    )
        .prop_map(|(pos, neg, qs, universal, eq)| {
            if universal && pos.is_empty() && !neg.is_empty() {
                return Guard::forall_not(qs.into_iter().map(Name::from), neg);
            }
            let mut parts: Vec<Guard> = pos.into_iter().map(Guard::Atom).collect();
            parts.extend(neg.into_iter().map(|a| Guard::not(Guard::Atom(a))));
            parts.extend(eq.map(|(a, b)| Guard::Eq(a, b)));
            Guard::exists_all(qs.into_iter().map(Name::from), Guard::conj(parts))
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 400, ..ProptestConfig::default() })]

    #[test]
    fn matches_agree_with_naive_semantics(g in guard_strategy(), inst in instance(true, 6)) {
        prop_assert_eq!(matches(&g, &inst, &ConstantPool::new(["A"], 0)), naive_matches(&g, &inst, &["A"]));
    }

    #[test]
    fn normal_shaped_matches_agree(g in normal_shaped_guard(), inst in instance(true, 6)) {
        prop_assert!(normalize(&g).is_ok(), "{} should normalize", g);
        prop_assert_eq!(matches(&g, &inst, &ConstantPool::new(["A", "B"], 0)), naive_matches(&g, &inst, &["A", "B"]));
    }

    #[test]
    fn normal_form_is_equivalent(g in normal_shaped_guard(), inst in instance(false, 6)) {
        let ng = normalize(&g).unwrap();
        let free: Vec<Name> = ng.free_vars().iter().cloned().collect();
        let back = ng.to_guard();
        // Dropped equalities may leave constants only the original mentions.
        let pool = ["A", "B"];
        prop_assert_eq!(
            naive_matches_over(&back, free.clone(), &inst, &pool),
            naive_matches_over(&g, free, &inst, &pool),
            "normal form {}", back
        );
    }

    #[test]
    fn satisfies_agrees_with_matches(g in normal_shaped_guard(), inst in instance(false, 6)) {
        let pool = ConstantPool::new(["A"], 0);
        let found = matches(&g, &inst, &pool);
        for s in &found {
            prop_assert!(satisfies(&inst, s, &g, &pool).unwrap());
        }
    }

    #[test]
    fn hom_search_agrees_with_naive(i in instance(true, 6), j in instance(true, 6)) {
        prop_assert_eq!(hom_leq(&i, &j), naive_hom(&i, &j));
        if let Some(h) = find_homomorphism(&i, &j, &BTreeMap::new()) {
            prop_assert!(h.image(&i).is_subset(&j));
        }
    }

    #[test]
    fn core_is_a_minimal_retract(i in instance(true, 6)) {
        let c = core(&i);
        prop_assert!(c.is_subset(&i));
        prop_assert!(hom_equiv(&c, &i));
        for a in c.iter() {
            prop_assert!(!naive_hom(&c, &c.without(a)), "core {} still retracts away from {}", c, a);
        }
    }

    #[test]
    fn canonicalize_is_idempotent_and_equivalent(i in instance(true, 6)) {
        let c = canonicalize(&i);
        prop_assert_eq!(canonicalize(&c), c.clone());
        prop_assert!(hom_equiv(&c, &i));
        prop_assert_eq!(c.len(), i.len());
    }
}
