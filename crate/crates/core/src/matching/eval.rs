use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::guard::{normalize, Guard, NormalGuard, Polarity};
use crate::matching::hom::for_each_homomorphism;
use crate::matching::subst::{for_each_assignment, ConstantPool, Substitution};
use crate::term::{Atom, Instance, Name, Term};

/// Values free variables range over and values `∃` may pick as witnesses.
#[derive(Clone, Debug)]
pub(crate) struct Universe {
    pub values: Vec<Term>,
    pub witnesses: Vec<Term>,
}

impl Universe {
    /// Active domain, pool and nulls of `instances`; witnesses add fresh constants.
    pub fn of<'a>(instances: impl IntoIterator<Item = &'a Instance>, pool: &ConstantPool) -> Self {
        let mut values: BTreeSet<Term> = pool.constants().iter().cloned().map(Term::Const).collect();
        for inst in instances {
            values.extend(inst.terms().cloned());
        }
        let values: Vec<Term> = values.into_iter().collect();
        let mut witnesses = values.clone();
        witnesses.extend(fresh_avoiding(pool.fresh_budget(), &values).into_iter().map(Term::Const));
        Universe { values, witnesses }
    }

    /// Universe for evaluating `ng`: its constants join the values and
    /// every quantified variable can pick its own unseen witness.
    pub fn for_guard<'a>(instances: impl IntoIterator<Item = &'a Instance>, pool: &ConstantPool, ng: &NormalGuard) -> Self {
        let budget = pool.fresh_budget().max(ng.quantified().len());
        Self::of(instances, &pool.with_constants(ng.constants()).with_fresh_budget(budget))
    }
}

/// The first `budget` fresh constant names that do not occur in `taken`.
pub(crate) fn fresh_avoiding(budget: usize, taken: &[Term]) -> Vec<Name> {
    (0..)
        .map(|i| -> Name { alloc::format!("_c{i}").into() })
        .filter(|n| !taken.iter().any(|t| matches!(t, Term::Const(c) if c == n)))
        .take(budget)
        .collect()
}

/// The pool extended by the constants of `g`, with enough fresh witnesses
/// for every quantifier to pick a distinct unseen value.
fn adequate(pool: &ConstantPool, g: &Guard) -> ConstantPool {
    let bound = g.all_vars().len().saturating_sub(g.free_vars().len());
    pool.with_constants(g.constants()).with_fresh_budget(pool.fresh_budget().max(bound))
}

/// `inst, σ ⊨ g`, with `∃` witnesses drawn from the active domain, the pool,
/// the nulls of `inst` and fresh constants.
pub fn satisfies(inst: &Instance, sigma: &Substitution, g: &Guard, pool: &ConstantPool) -> Result<bool> {
    if let Some(v) = g.free_vars().into_iter().find(|v| !sigma.contains(v)) {
        return Err(Error::UnboundVariable(v));
    }
    let universe = Universe::of([inst], &adequate(pool, g));
    Ok(eval(inst, &mut sigma.clone(), g, &universe.witnesses))
}

fn eval(inst: &Instance, sigma: &mut Substitution, g: &Guard, witnesses: &[Term]) -> bool {
    match g {
        Guard::True => true,
        Guard::Atom(a) => inst.contains(&sigma.apply_atom(a)),
        Guard::Eq(t, u) => sigma.apply_term(t) == sigma.apply_term(u),
        Guard::Not(h) => !eval(inst, sigma, h, witnesses),
        Guard::And(a, b) => eval(inst, sigma, a, witnesses) && eval(inst, sigma, b, witnesses),
        Guard::Exists(v, body) => {
            let saved = sigma.get(v).cloned();
            let mut holds = false;
            for w in witnesses {
                sigma.insert(v.clone(), w.clone());
                if eval(inst, sigma, body, witnesses) {
                    holds = true;
                    break;
                }
            }
            match saved {
                Some(t) => {
                    sigma.insert(v.clone(), t);
                }
                None => {
                    sigma.remove(v);
                }
            }
            holds
        }
    }
}

/// All matches of `g` in `inst`: substitutions over exactly the free
/// variables, ranging over the active domain, the pool, the constants of
/// `g` and the nulls.
pub fn matches(g: &Guard, inst: &Instance, pool: &ConstantPool) -> BTreeSet<Substitution> {
    let universe = Universe::of([inst], &adequate(pool, g));
    match normalize(g) {
        Ok(ng) => {
            let mut out = BTreeSet::new();
            normal_matches(&ng, inst, inst, &universe, &Substitution::new(), &mut |s| {
                out.insert(s);
                true
            });
            out
        }
        Err(_) => brute_force_matches(g, inst, &universe),
    }
}

fn brute_force_matches(g: &Guard, inst: &Instance, universe: &Universe) -> BTreeSet<Substitution> {
    let free: Vec<Name> = g.free_vars().into_iter().collect();
    let mut out = BTreeSet::new();
    for_each_assignment(&free, &universe.values, &mut |vals| {
        let mut sigma: Substitution = free.iter().cloned().zip(vals.iter().cloned()).collect();
        if eval(inst, &mut sigma, g, &universe.witnesses) {
            out.insert(sigma);
        }
        true
    });
    out
}

/// Matches of a normal guard whose positive part is read on `pos` and
/// negative part on `neg`, with one witness choice shared by both parts.
///
/// Bindings in `fixed` are kept; `f` receives each match (restricted to the
/// free variables) and returns false to stop.
pub(crate) fn normal_matches(
    ng: &NormalGuard,
    pos: &Instance,
    neg: &Instance,
    universe: &Universe,
    fixed: &Substitution,
    f: &mut dyn FnMut(Substitution) -> bool,
) {
    if ng.is_unsatisfiable() {
        return;
    }
    let aliases = ng.aliases();
    let mut seed: BTreeMap<Term, Term> = BTreeMap::new();
    for (v, t) in fixed.iter() {
        if !ng.free_vars().contains(v) {
            continue;
        }
        let key = match aliases.get(v) {
            Some(Term::Var(target)) => Term::Var(target.clone()),
            Some(c) => {
                if c != t {
                    return;
                }
                continue;
            }
            None => Term::Var(v.clone()),
        };
        if seed.get(&key).is_some_and(|old| old != t) {
            return;
        }
        seed.insert(key, t.clone());
    }
    // Free variables represented in the atoms, i.e. not eliminated as aliases.
    let primary: Vec<Name> = ng.free_vars().iter().filter(|v| !aliases.contains_key(*v)).cloned().collect();
    let finish = |binding: &BTreeMap<Term, Term>| -> Substitution {
        let value = |v: &Name| binding.get(&Term::Var(v.clone())).cloned();
        ng.free_vars()
            .iter()
            .map(|v| {
                let t = match aliases.get(v) {
                    Some(Term::Var(target)) => value(target).expect("alias target bound"),
                    Some(c) => c.clone(),
                    None => value(v).expect("free variable bound"),
                };
                (v.clone(), t)
            })
            .collect()
    };

    match ng.polarity() {
        Polarity::Universal => {
            let quantified: BTreeSet<&Name> = ng.quantified().iter().collect();
            let open: Vec<Name> = primary.iter().filter(|v| !seed.contains_key(&Term::Var((*v).clone()))).cloned().collect();
            for_each_assignment(&open, &universe.values, &mut |vals| {
                let mut binding = seed.clone();
                binding.extend(open.iter().map(|v| Term::Var(v.clone())).zip(vals.iter().cloned()));
                let clear = ng.negative().iter().all(|a| !neg.iter().any(|b| unifies(a, b, &binding, &quantified)));
                if clear {
                    return f(finish(&binding));
                }
                true
            });
        }
        Polarity::Existential => {
            let positive: Vec<&Atom> = ng.positive().iter().collect();
            let quantified: Vec<Name> = ng.quantified().to_vec();
            let mut emitted: BTreeSet<Substitution> = BTreeSet::new();
            let mut go_on = true;
            for_each_homomorphism(&positive, pos, &seed, &mut |hom| {
                let open: Vec<Name> = primary.iter().filter(|v| !hom.contains_key(&Term::Var((*v).clone()))).cloned().collect();
                let hidden: Vec<Name> =
                    quantified.iter().filter(|v| !hom.contains_key(&Term::Var((*v).clone()))).cloned().collect();
                for_each_assignment(&open, &universe.values, &mut |vals| {
                    let mut binding = hom.clone();
                    binding.extend(open.iter().map(|v| Term::Var(v.clone())).zip(vals.iter().cloned()));
                    let sigma = finish(&binding);
                    if emitted.contains(&sigma) {
                        return true;
                    }
                    let witnessed = !for_each_assignment(&hidden, &universe.witnesses, &mut |ws| {
                        let mut full = binding.clone();
                        full.extend(hidden.iter().map(|v| Term::Var(v.clone())).zip(ws.iter().cloned()));
                        let blocked = ng.negative().iter().any(|a| neg.contains(&ground_atom(a, &full)));
                        blocked
                    });
                    if witnessed {
                        emitted.insert(sigma.clone());
                        go_on = f(sigma);
                    }
                    go_on
                });
                go_on
            });
        }
    }
}

fn ground_atom(a: &Atom, binding: &BTreeMap<Term, Term>) -> Atom {
    a.map_terms(|t| match t {
        Term::Var(_) => binding.get(t).cloned().expect("every variable bound"),
        t => t.clone(),
    })
}

/// Whether `pattern` (quantified variables as wildcards) can be instantiated to `target`.
fn unifies(pattern: &Atom, target: &Atom, binding: &BTreeMap<Term, Term>, quantified: &BTreeSet<&Name>) -> bool {
    if pattern.predicate() != target.predicate() {
        return false;
    }
    let mut local: BTreeMap<&Name, &Term> = BTreeMap::new();
    for (p, t) in pattern.terms().iter().zip(target.terms()) {
        let ok = match p {
            Term::Var(v) if quantified.contains(v) => *local.entry(v).or_insert(t) == t,
            Term::Var(_) => binding.get(p) == Some(t),
            _ => p == t,
        };
        if !ok {
            return false;
        }
    }
    true
}

/// Whether `sigma` (restricted to the free variables) is a match of `ng`.
pub(crate) fn is_normal_match(
    ng: &NormalGuard,
    pos: &Instance,
    neg: &Instance,
    universe: &Universe,
    sigma: &Substitution,
) -> bool {
    let mut hit = false;
    normal_matches(ng, pos, neg, universe, sigma, &mut |_| {
        hit = true;
        false
    });
    hit
}
