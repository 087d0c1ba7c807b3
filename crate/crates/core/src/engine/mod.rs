//! Actions and systems, concrete and abstract steps, bounded exploration and reachability.

mod explore;
mod lts;

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

pub use explore::{explore, reachable, Dedup, ExplorationConfig, Reachability, State};
pub use lts::{Lts, Transition};

use crate::domain::{abstract_matches, abstract_universe, gated, AbstractState, Gate};
use crate::error::{Error, Result};
use crate::guard::{normalize, Guard, NormalGuard};
use crate::matching::{
    extend_with_fresh_nulls, fresh_avoiding, ground, is_normal_match, normal_matches, ConstantPool, NullSupply, Substitution,
    Universe,
};
use crate::term::{vars_of, Atom, Database, Instance, Name, Term, Vocabulary};

/// A guarded action `(g, Del, Add)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Action {
    name: Name,
    guard: Guard,
    del: BTreeSet<Atom>,
    add: BTreeSet<Atom>,
    free: BTreeSet<Name>,
    normal: Option<NormalGuard>,
}

impl Action {
    pub fn new(
        name: impl Into<Name>,
        guard: Guard,
        del: impl IntoIterator<Item = Atom>,
        add: impl IntoIterator<Item = Atom>,
    ) -> Self {
        let free = guard.free_vars();
        let normal = normalize(&guard).ok();
        Action { name: name.into(), guard, del: del.into_iter().collect(), add: add.into_iter().collect(), free, normal }
    }

    pub fn name(&self) -> &Name {
        &self.name
    }

    pub fn guard(&self) -> &Guard {
        &self.guard
    }

    pub fn del(&self) -> &BTreeSet<Atom> {
        &self.del
    }

    pub fn add(&self) -> &BTreeSet<Atom> {
        &self.add
    }

    pub fn free_vars(&self) -> &BTreeSet<Name> {
        &self.free
    }

    /// The guard's normal form, if it lies in one of the fragments.
    pub fn normal(&self) -> Option<&NormalGuard> {
        self.normal.as_ref()
    }

    /// Variables of `Add` that the guard does not bind.
    pub fn add_only_vars(&self) -> BTreeSet<Name> {
        vars_of(&self.add).difference(&self.free).cloned().collect()
    }

    fn normal_or_err(&self) -> Result<&NormalGuard> {
        self.normal.as_ref().ok_or(Error::NotNormalizable)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} := guard {}", self.name, self.guard)?;
        let list = |atoms: &BTreeSet<Atom>| atoms.iter().map(|a| format!("{a}")).collect::<Vec<_>>().join(", ");
        if !self.del.is_empty() {
            write!(f, " del {}", list(&self.del))?;
        }
        if !self.add.is_empty() {
            write!(f, " add {}", list(&self.add))?;
        }
        Ok(())
    }
}

/// Initial instance, actions and vocabulary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DmsSystem {
    initial: Instance,
    actions: Vec<Action>,
    vocabulary: Vocabulary,
}

impl DmsSystem {
    pub fn new(initial: Instance, actions: Vec<Action>, vocabulary: Vocabulary) -> Self {
        DmsSystem { initial, actions, vocabulary }
    }

    pub fn initial(&self) -> &Instance {
        &self.initial
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn action(&self, name: &str) -> Option<&Action> {
        self.actions.iter().find(|a| a.name.as_ref() == name)
    }

    /// The same system with a single action kept.
    pub fn restricted_to(&self, name: &str) -> Option<DmsSystem> {
        let act = self.action(name)?.clone();
        Some(DmsSystem { initial: self.initial.clone(), actions: alloc::vec![act], vocabulary: self.vocabulary.clone() })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rule {
    DelNotGuardBound,
    UnknownPredicate,
    ArityMismatch,
    UnsupportedGuard,
    DuplicateAction,
    NullInAction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub action: Option<Name>,
    pub rule: Rule,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.action {
            Some(a) => write!(f, "action {a}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Well-formedness problems of `system`; empty when it is valid.
pub fn validate(system: &DmsSystem) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let voc = &system.vocabulary;
    let check_atom = |out: &mut Vec<Diagnostic>, action: Option<&Name>, a: &Atom| {
        let name = a.predicate().name();
        match voc.arity(name) {
            None => out.push(Diagnostic {
                action: action.cloned(),
                rule: Rule::UnknownPredicate,
                message: format!("predicate {name} is not declared"),
            }),
            Some(k) if k != a.predicate().arity() => out.push(Diagnostic {
                action: action.cloned(),
                rule: Rule::ArityMismatch,
                message: format!("{a} uses {name} with {} arguments, declared with {k}", a.predicate().arity()),
            }),
            _ => {}
        }
    };
    for a in system.initial.iter() {
        check_atom(&mut out, None, a);
    }
    let mut seen = BTreeSet::new();
    for act in &system.actions {
        let name = Some(&act.name);
        if !seen.insert(act.name.clone()) {
            out.push(Diagnostic { action: name.cloned(), rule: Rule::DuplicateAction, message: "declared twice".into() });
        }
        for a in act.guard.atoms().into_iter().chain(&act.del).chain(&act.add) {
            check_atom(&mut out, name, a);
            if a.terms().iter().any(Term::is_null) {
                out.push(Diagnostic {
                    action: name.cloned(),
                    rule: Rule::NullInAction,
                    message: format!("{a} mentions a labeled null"),
                });
            }
        }
        if act.normal.is_none() {
            out.push(Diagnostic {
                action: name.cloned(),
                rule: Rule::UnsupportedGuard,
                message: format!("guard `{}` is outside the supported fragments", act.guard),
            });
        }
        for v in vars_of(&act.del).difference(&act.free) {
            out.push(Diagnostic {
                action: name.cloned(),
                rule: Rule::DelNotGuardBound,
                message: format!("del variable {v} is not free in the guard"),
            });
        }
    }
    out
}

/// An action name with a substitution.
///
/// Concrete labels carry the full extension `σ*`; abstract labels of the
/// null domains carry only the guard match.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Label {
    pub action: Name,
    pub sigma: Substitution,
}

impl Label {
    pub fn new(action: impl Into<Name>, sigma: Substitution) -> Self {
        Label { action: action.into(), sigma }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}>", self.action, self.sigma)
    }
}

/// Whether an abstract label may stand for a concrete one: same action and
/// some instantiation of nulls by constants maps the abstract bindings into
/// the concrete ones.
pub fn label_compatible(abstract_label: &Label, concrete_label: &Label) -> bool {
    if abstract_label.action != concrete_label.action {
        return false;
    }
    let mut h = alloc::collections::BTreeMap::new();
    abstract_label.sigma.iter().all(|(v, t)| match (t, concrete_label.sigma.get(v)) {
        (_, None) => false,
        (Term::Null(n), Some(c @ Term::Const(_))) => h.entry(*n).or_insert_with(|| c.clone()) == c,
        (Term::Null(_), Some(_)) => false,
        (t, Some(u)) => t == u,
    })
}

fn concrete_universe(d: &Instance, pool: &ConstantPool, ng: &NormalGuard) -> Universe {
    Universe::for_guard([d], pool, ng)
}

fn effect(inst: &Instance, act: &Action, star: &Substitution) -> Instance {
    let del = ground(star, &act.del).expect("del variables are bound");
    let add = ground(star, &act.add).expect("add variables are bound");
    inst.difference(&del).union(&add)
}

/// `(D \ Delσ*) ∪ Addσ*`, provided `σ*` restricted to the guard's free
/// variables is a match on `d`.
pub fn concrete_step(d: &Database, act: &Action, sigma_star: &Substitution) -> Result<Database> {
    let ng = act.normal_or_err()?;
    let needed =
        act.free.iter().chain(vars_of(&act.add).iter()).chain(vars_of(&act.del).iter()).cloned().collect::<BTreeSet<_>>();
    for v in &needed {
        if !matches!(sigma_star.get(v), Some(Term::Const(_))) {
            return Err(Error::IncompleteExtension(v.clone()));
        }
    }
    let universe = concrete_universe(d, &ConstantPool::new(const_values(sigma_star), 0), ng);
    if !is_normal_match(ng, d, d, &universe, &sigma_star.restrict(&act.free)) {
        return Err(Error::NotEnabled(act.name.clone()));
    }
    Database::try_from(effect(d, act, sigma_star))
}

/// Extensions of `sigma` to `vars` over the pool plus fresh constants absent from `taken`.
pub(crate) fn extensions(sigma: &Substitution, vars: &BTreeSet<Name>, pool: &ConstantPool, taken: &[Term]) -> Vec<Substitution> {
    let mut values: Vec<Term> = pool.constants().iter().cloned().map(Term::Const).collect();
    let mut taken = taken.to_vec();
    taken.extend(values.iter().cloned());
    values.extend(fresh_avoiding(pool.fresh_budget(), &taken).into_iter().map(Term::Const));
    let vars: Vec<Name> = vars.iter().cloned().collect();
    let mut out = Vec::new();
    crate::matching::for_each_assignment(&vars, &values, &mut |vals| {
        let mut s = sigma.clone();
        for (v, t) in vars.iter().zip(vals) {
            s.insert(v.clone(), t.clone());
        }
        out.push(s);
        true
    });
    out
}

/// Every labeled successor of `d`: each guard match over the active domain
/// and pool, extended in every way over the pool and fresh constants.
pub fn concrete_successors(d: &Database, system: &DmsSystem, pool: &ConstantPool) -> Result<Vec<(Label, Database)>> {
    let mut out = Vec::new();
    let taken: Vec<Term> = d.terms().cloned().collect();
    for act in &system.actions {
        let ng = act.normal_or_err()?;
        let universe = concrete_universe(d, pool, ng);
        let mut sigmas = Vec::new();
        normal_matches(ng, d, d, &universe, &Substitution::new(), &mut |s| {
            sigmas.push(s);
            true
        });
        let add_only = act.add_only_vars();
        for sigma in sigmas {
            for star in extensions(&sigma, &add_only, pool, &taken) {
                let next = Database::try_from(effect(d, act, &star))?;
                out.push((Label::new(act.name.clone(), star), next));
            }
        }
    }
    Ok(out)
}

pub(crate) fn apply_effect(state: &AbstractState, act: &Action, star: &Substitution) -> AbstractState {
    state.map_components(|c| effect(c, act, star))
}

/// One abstract step along `⟨act, σ⟩`.
///
/// Null domains bind the add-only variables `σ` leaves open to fresh nulls;
/// set domains need `σ` to bind them to constants already.
pub fn abstract_step(
    state: &AbstractState,
    act: &Action,
    sigma: &Substitution,
    pool: &ConstantPool,
    gate: Gate,
    supply: &mut NullSupply,
) -> Result<AbstractState> {
    Ok(abstract_step_raw(state, act, sigma, pool, gate, supply)?.0.canonical())
}

/// The uncanonicalized successor together with the extension used.
pub(crate) fn abstract_step_raw(
    state: &AbstractState,
    act: &Action,
    sigma: &Substitution,
    pool: &ConstantPool,
    gate: Gate,
    supply: &mut NullSupply,
) -> Result<(AbstractState, Substitution)> {
    let domain = state.domain();
    let ng = gated(domain, &act.guard, gate)?;
    if act.free.iter().any(|v| !sigma.contains(v)) {
        return Err(Error::NotEnabled(act.name.clone()));
    }
    let universe = abstract_universe(state, pool, &ng);
    if !is_normal_match(&ng, state.positive_target(), state.negative_target(), &universe, &sigma.restrict(&act.free)) {
        return Err(Error::NotEnabled(act.name.clone()));
    }
    let add_only = act.add_only_vars();
    let star = if domain.uses_nulls() {
        let open: BTreeSet<Name> = add_only.iter().filter(|v| !sigma.contains(v)).cloned().collect();
        state.components().for_each(|c| supply.avoid(c));
        extend_with_fresh_nulls(sigma, &open, supply)
    } else {
        if let Some(v) = add_only.iter().find(|v| !matches!(sigma.get(v), Some(Term::Const(_)))) {
            return Err(Error::IncompleteExtension(v.clone()));
        }
        sigma.clone()
    };
    let star = star.restrict(&act.free.union(&add_only).cloned().collect());
    Ok((apply_effect(state, act, &star), star))
}

/// Every abstract successor of `state`.
///
/// Set-domain labels carry the pool extension of the add-only variables;
/// null-domain labels carry the match alone.
pub fn abstract_successors(
    state: &AbstractState,
    system: &DmsSystem,
    pool: &ConstantPool,
    gate: Gate,
    supply: &mut NullSupply,
) -> Result<Vec<(Label, AbstractState)>> {
    let mut out = Vec::new();
    let taken: Vec<Term> = state.components().flat_map(Instance::terms).cloned().collect();
    for act in &system.actions {
        let sigmas = abstract_matches(state, &act.guard, pool, gate)?;
        let add_only = act.add_only_vars();
        for sigma in sigmas {
            if state.domain().uses_nulls() {
                let next = abstract_step(state, act, &sigma, pool, gate, supply)?;
                out.push((Label::new(act.name.clone(), sigma), next));
            } else {
                for star in extensions(&sigma, &add_only, pool, &taken) {
                    let next = abstract_step(state, act, &star, pool, gate, supply)?;
                    out.push((Label::new(act.name.clone(), star), next));
                }
            }
        }
    }
    Ok(out)
}

/// The set step `C →⟨act,σ*⟩ C′` with one extension shared by all members;
/// `None` unless `sigma` is a match on every member.
pub fn lifted_forall_step(
    c: &[Database],
    act: &Action,
    sigma: &Substitution,
    sigma_star: &Substitution,
) -> Option<Vec<Database>> {
    debug_assert!(sigma.is_subset(sigma_star));
    let mut out = BTreeSet::new();
    let fixed = sigma.restrict(&act.free);
    for d in c {
        if fixed.len() != act.free.len() {
            return None;
        }
        let ng = act.normal()?;
        let universe = concrete_universe(d, &ConstantPool::new(const_values(sigma_star), 0), ng);
        if !is_normal_match(ng, d, d, &universe, &fixed) {
            return None;
        }
        out.insert(concrete_step(d, act, sigma_star).ok()?);
    }
    Some(out.into_iter().collect())
}

fn const_values(s: &Substitution) -> Vec<Name> {
    s.iter()
        .filter_map(|(_, t)| match t {
            Term::Const(c) => Some(c.clone()),
            _ => None,
        })
        .collect()
}
