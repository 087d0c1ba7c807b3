//! The six abstract domains: abstraction, concretization, orders, lattice
//! operations on instances with nulls, and guard evaluation on abstract states.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::guard::{normalize, Fragment, Guard, NormalGuard};
use crate::matching::{core, for_each_assignment, hom_leq, normal_matches, ConstantPool, Substitution, Universe};
use crate::term::{canonicalize, Atom, Database, Instance, Null, Predicate, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DomainId {
    #[serde(rename = "union")]
    Union,
    #[serde(rename = "inter")]
    Intersection,
    #[serde(rename = "pair")]
    Pair,
    #[serde(rename = "null-join")]
    NullJoin,
    #[serde(rename = "null-meet")]
    NullMeet,
    #[serde(rename = "null-pair")]
    NullPair,
}

impl DomainId {
    pub const ALL: [DomainId; 6] =
        [DomainId::Union, DomainId::Intersection, DomainId::Pair, DomainId::NullJoin, DomainId::NullMeet, DomainId::NullPair];

    /// The guard fragment whose actions this domain abstracts faithfully.
    pub fn licensed_fragment(self) -> Fragment {
        match self {
            DomainId::Union | DomainId::NullJoin => Fragment::Cna,
            DomainId::Intersection => Fragment::PfCg,
            DomainId::Pair => Fragment::PfNcg,
            DomainId::NullMeet => Fragment::Cg,
            DomainId::NullPair => Fragment::Ncg,
        }
    }

    pub fn uses_nulls(self) -> bool {
        matches!(self, DomainId::NullJoin | DomainId::NullMeet | DomainId::NullPair)
    }

    pub fn is_pair(self) -> bool {
        matches!(self, DomainId::Pair | DomainId::NullPair)
    }

    fn has_lower(self) -> bool {
        !matches!(self, DomainId::Union | DomainId::NullJoin)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DomainId::Union => "union",
            DomainId::Intersection => "inter",
            DomainId::Pair => "pair",
            DomainId::NullJoin => "null-join",
            DomainId::NullMeet => "null-meet",
            DomainId::NullPair => "null-pair",
        }
    }
}

impl fmt::Display for DomainId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("unknown domain `{0}` (expected union, inter, pair, null-join, null-meet or null-pair)")]
pub struct UnknownDomain(pub alloc::string::String);

impl FromStr for DomainId {
    type Err = UnknownDomain;

    fn from_str(s: &str) -> Result<Self, UnknownDomain> {
        DomainId::ALL.into_iter().find(|d| d.as_str() == s).ok_or_else(|| UnknownDomain(s.into()))
    }
}

/// Whether abstract evaluation enforces the domain's licensed fragment.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gate {
    #[default]
    Strict,
    /// Evaluate any normalizable guard, e.g. to reproduce unsound pairings.
    Override,
}

/// A domain-tagged abstract value.
///
/// `lower` is the meet/intersection component and `upper` the
/// join/union component; single-component domains carry only one of them.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AbstractState {
    domain: DomainId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lower: Option<Instance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    upper: Option<Instance>,
}

impl AbstractState {
    /// A state of a single-component domain.
    pub fn single(domain: DomainId, inst: Instance) -> Result<Self> {
        if domain.is_pair() {
            return Self::pair(domain, inst.clone(), inst);
        }
        let (lower, upper) = if domain.has_lower() { (Some(inst), None) } else { (None, Some(inst)) };
        Self::checked(AbstractState { domain, lower, upper })
    }

    pub fn pair(domain: DomainId, lower: Instance, upper: Instance) -> Result<Self> {
        if !domain.is_pair() {
            return Err(Error::DomainMismatch(domain, DomainId::Pair));
        }
        Self::checked(AbstractState { domain, lower: Some(lower), upper: Some(upper) })
    }

    fn checked(s: Self) -> Result<Self> {
        if !s.domain.uses_nulls() && s.components().any(|c| !c.is_database()) {
            return Err(Error::NullInDatabase);
        }
        Ok(s)
    }

    pub fn domain(&self) -> DomainId {
        self.domain
    }

    pub fn lower(&self) -> Option<&Instance> {
        self.lower.as_ref()
    }

    pub fn upper(&self) -> Option<&Instance> {
        self.upper.as_ref()
    }

    /// The component of a single-component domain; the lower one for pairs.
    pub fn instance(&self) -> &Instance {
        self.lower.as_ref().or(self.upper.as_ref()).expect("every state has a component")
    }

    pub fn components(&self) -> impl Iterator<Item = &Instance> + '_ {
        self.lower.iter().chain(self.upper.iter())
    }

    /// Instance positive guard parts are read on.
    pub fn positive_target(&self) -> &Instance {
        self.lower.as_ref().or(self.upper.as_ref()).expect("component")
    }

    /// Instance negative guard parts are read on.
    pub fn negative_target(&self) -> &Instance {
        self.upper.as_ref().or(self.lower.as_ref()).expect("component")
    }

    /// For pairs, whether the lower component sits below the upper one.
    pub fn is_well_ordered(&self) -> bool {
        match (&self.lower, &self.upper, self.domain) {
            (Some(l), Some(u), DomainId::Pair) => l.is_subset(u),
            (Some(l), Some(u), _) => hom_leq(l, u),
            _ => true,
        }
    }

    pub fn map_components(&self, mut f: impl FnMut(&Instance) -> Instance) -> AbstractState {
        AbstractState { domain: self.domain, lower: self.lower.as_ref().map(&mut f), upper: self.upper.as_ref().map(&mut f) }
    }

    pub fn canonical(&self) -> AbstractState {
        self.map_components(canonicalize)
    }

    /// Component-wise core, canonicalized.
    pub fn reduced(&self) -> AbstractState {
        self.map_components(|c| canonicalize(&core(c)))
    }

    /// Equality for set domains, component-wise hom-equivalence for null domains.
    pub fn equivalent(&self, other: &AbstractState) -> bool {
        if self.domain != other.domain {
            return false;
        }
        if !self.domain.uses_nulls() {
            return self == other;
        }
        let same = |a: Option<&Instance>, b: Option<&Instance>| match (a, b) {
            (Some(a), Some(b)) => hom_leq(a, b) && hom_leq(b, a),
            (None, None) => true,
            _ => false,
        };
        same(self.lower(), other.lower()) && same(self.upper(), other.upper())
    }
}

impl fmt::Display for AbstractState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.lower, &self.upper) {
            (Some(l), Some(u)) => write!(f, "({l}, {u})"),
            _ => self.instance().fmt(f),
        }
    }
}

/// `I ⊔ J`: union after moving the nulls of `j` apart from those of `i`.
pub fn lattice_join(i: &Instance, j: &Instance) -> Instance {
    let offset = i.max_null().map_or(0, |Null(n)| n + 1);
    canonicalize(&i.union(&j.shift_nulls(offset)))
}

/// `I ⊓ J`: per-predicate direct product, reduced to its core.
///
/// Positions where both atoms carry the same constant keep it; every other
/// pair of terms becomes the null assigned to that pair.
pub fn lattice_meet(i: &Instance, j: &Instance) -> Instance {
    let mut by_pred: BTreeMap<&Predicate, Vec<&Atom>> = BTreeMap::new();
    for b in j.iter() {
        by_pred.entry(b.predicate()).or_default().push(b);
    }
    let mut pair_null: BTreeMap<(&Term, &Term), u32> = BTreeMap::new();
    let mut atoms = BTreeSet::new();
    for a in i.iter() {
        for b in by_pred.get(a.predicate()).into_iter().flatten() {
            let terms = a
                .terms()
                .iter()
                .zip(b.terms())
                .map(|(u, v)| {
                    if u == v && u.is_const() {
                        u.clone()
                    } else {
                        let next = pair_null.len() as u32;
                        Term::Null(Null(*pair_null.entry((u, v)).or_insert(next)))
                    }
                })
                .collect();
            atoms.insert(Atom::from_parts(a.predicate().name().clone(), terms));
        }
    }
    canonicalize(&core(&Instance::from_ground(atoms)))
}

/// `α(C)` for a nonempty set of databases.
pub fn alpha(domain: DomainId, c: &[Database]) -> Result<AbstractState> {
    let (first, rest) = c.split_first().ok_or(Error::EmptyInput)?;
    let first = first.as_instance().clone();
    let union = || rest.iter().fold(first.clone(), |acc, d| acc.union(d));
    let inter = || rest.iter().fold(first.clone(), |acc, d| acc.intersection(d));
    let join = || rest.iter().fold(canonicalize(&first), |acc, d| lattice_join(&acc, d));
    let meet = || {
        let minimal = subset_minimal(c);
        let (head, tail) = minimal.split_first().expect("nonempty");
        tail.iter().fold(canonicalize(&core(head)), |acc, d| lattice_meet(&acc, d))
    };
    let state = match domain {
        DomainId::Union => AbstractState { domain, lower: None, upper: Some(union()) },
        DomainId::Intersection => AbstractState { domain, lower: Some(inter()), upper: None },
        DomainId::Pair => AbstractState { domain, lower: Some(inter()), upper: Some(union()) },
        DomainId::NullJoin => AbstractState { domain, lower: None, upper: Some(join()) },
        DomainId::NullMeet => AbstractState { domain, lower: Some(meet()), upper: None },
        DomainId::NullPair => AbstractState { domain, lower: Some(meet()), upper: Some(join()) },
    };
    Ok(state)
}

/// The ⊆-minimal members of `c`; a database above another one adds nothing to a meet.
fn subset_minimal(c: &[Database]) -> Vec<&Instance> {
    let mut by_size: Vec<&Instance> = c.iter().map(Database::as_instance).collect();
    by_size.sort_by_key(|d| d.len());
    let mut kept: Vec<&Instance> = Vec::new();
    for d in by_size {
        if !kept.iter().any(|k| k.is_subset(d)) {
            kept.push(d);
        }
    }
    kept
}

/// `D ∈ γ(state)`.
pub fn gamma_contains(state: &AbstractState, d: &Database) -> bool {
    let d = d.as_instance();
    let lower_ok = |l: &Instance| match state.domain {
        DomainId::Intersection | DomainId::Pair => l.is_subset(d),
        _ => hom_leq(l, d),
    };
    let upper_ok = |u: &Instance| match state.domain {
        DomainId::Union | DomainId::Pair => d.is_subset(u),
        _ => hom_leq(d, u),
    };
    state.lower.as_ref().map_or(true, lower_ok) && state.upper.as_ref().map_or(true, upper_ok)
}

/// The databases over the state's predicates and the pool's constants with at
/// most `max_atoms` atoms that the state concretizes to.
pub fn gamma_enumerate(state: &AbstractState, pool: &ConstantPool, max_atoms: usize) -> Vec<Database> {
    let preds: BTreeSet<Predicate> = state.components().flat_map(Instance::predicates).collect();
    gamma_enumerate_over(state, &preds, pool, max_atoms)
}

/// [`gamma_enumerate`] over an explicit set of predicates.
pub fn gamma_enumerate_over(
    state: &AbstractState,
    predicates: &BTreeSet<Predicate>,
    pool: &ConstantPool,
    max_atoms: usize,
) -> Vec<Database> {
    let constants: Vec<Term> = pool.all_constants().into_iter().map(Term::Const).collect();
    let mut candidates: Vec<Atom> = Vec::new();
    for p in predicates {
        let slots: Vec<_> = (0..p.arity()).map(|i| alloc::format!("{i}").into()).collect::<Vec<_>>();
        for_each_assignment(&slots, &constants, &mut |terms| {
            candidates.push(Atom::from_parts(p.name().clone(), terms.to_vec()));
            true
        });
    }
    match state.domain {
        DomainId::Union | DomainId::Pair => {
            let upper = state.upper.as_ref().expect("upper component");
            candidates.retain(|a| upper.contains(a));
        }
        DomainId::NullJoin | DomainId::NullPair => {
            let upper = state.upper.as_ref().expect("upper component");
            candidates.retain(|a| hom_leq(&Instance::from_ground([a.clone()].into()), upper));
        }
        _ => {}
    }
    // Every member contains one of these atom sets.
    let mut mandatory: BTreeSet<BTreeSet<Atom>> = BTreeSet::new();
    match (state.domain, &state.lower) {
        (DomainId::Intersection | DomainId::Pair, Some(l)) => {
            mandatory.insert(l.atoms().clone());
        }
        (DomainId::NullMeet | DomainId::NullPair, Some(l)) => {
            let nulls: Vec<Null> = l.nulls().into_iter().collect();
            let keys: Vec<_> = nulls.iter().map(|n| alloc::format!("{n}").into()).collect::<Vec<_>>();
            for_each_assignment(&keys, &constants, &mut |vals| {
                let h: BTreeMap<Null, Term> = nulls.iter().copied().zip(vals.iter().cloned()).collect();
                mandatory.insert(l.map_nulls(|n| h[&n].clone()).atoms().clone());
                true
            });
        }
        _ => {
            mandatory.insert(BTreeSet::new());
        }
    }
    let mut out = BTreeSet::new();
    for required in mandatory {
        if required.len() > max_atoms || required.iter().any(|a| !a.terms().iter().all(|t| constants.contains(t))) {
            continue;
        }
        let extra: Vec<Atom> = candidates.iter().filter(|a| !required.contains(*a)).cloned().collect();
        let mut chosen: Vec<&Atom> = Vec::new();
        subsets(&extra, 0, max_atoms - required.len(), &mut chosen, &mut |picked| {
            let atoms = required.iter().cloned().chain(picked.iter().map(|a| (*a).clone()));
            let d = Database::new(atoms).expect("pool atoms are ground and null-free");
            if !out.contains(&d) && gamma_contains(state, &d) {
                out.insert(d);
            }
        });
    }
    out.into_iter().collect()
}

fn subsets<'a>(items: &'a [Atom], from: usize, budget: usize, chosen: &mut Vec<&'a Atom>, f: &mut impl FnMut(&[&'a Atom])) {
    f(chosen);
    if budget == 0 {
        return;
    }
    for k in from..items.len() {
        chosen.push(&items[k]);
        subsets(items, k + 1, budget - 1, chosen, f);
        chosen.pop();
    }
}

/// The domain's order on abstract states.
pub fn state_leq(a: &AbstractState, b: &AbstractState) -> Result<bool> {
    if a.domain != b.domain {
        return Err(Error::DomainMismatch(a.domain, b.domain));
    }
    let (al, bl) = (a.lower.as_ref(), b.lower.as_ref());
    let (au, bu) = (a.upper.as_ref(), b.upper.as_ref());
    let lower = |f: fn(&Instance, &Instance) -> bool| al.zip(bl).map_or(true, |(x, y)| f(x, y));
    let upper = |f: fn(&Instance, &Instance) -> bool| au.zip(bu).map_or(true, |(x, y)| f(x, y));
    Ok(if a.domain.uses_nulls() {
        lower(|x, y| hom_leq(y, x)) && upper(hom_leq)
    } else {
        lower(|x, y| y.is_subset(x)) && upper(Instance::is_subset)
    })
}

/// Normal form of `g` after the domain's fragment gate.
pub(crate) fn gated(domain: DomainId, g: &Guard, gate: Gate) -> Result<NormalGuard> {
    let ng = normalize(g).map_err(|_| Error::FragmentViolation { domain, fragment: Fragment::GeneralFol })?;
    if gate == Gate::Strict && !domain.licensed_fragment().admits(&ng) {
        return Err(Error::FragmentViolation { domain, fragment: ng.fragment() });
    }
    Ok(ng)
}

/// Matches of `g` on an abstract state.
///
/// Pair domains read the positive part on the lower component and the
/// negative part on the upper one, with one choice of `∃` witnesses.
pub fn abstract_matches(state: &AbstractState, g: &Guard, pool: &ConstantPool, gate: Gate) -> Result<BTreeSet<Substitution>> {
    let ng = gated(state.domain, g, gate)?;
    let universe = abstract_universe(state, pool, &ng);
    let mut out = BTreeSet::new();
    normal_matches(&ng, state.positive_target(), state.negative_target(), &universe, &Substitution::new(), &mut |s| {
        out.insert(s);
        true
    });
    Ok(out)
}

pub(crate) fn abstract_universe(state: &AbstractState, pool: &ConstantPool, ng: &NormalGuard) -> Universe {
    Universe::for_guard(state.components(), pool, ng)
}
