//! Constants, variables, labeled nulls, atoms and the instances built from them.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Interned identifier shared by constants, variables and predicates.
pub type Name = Arc<str>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Predicate {
    name: Name,
    arity: usize,
}

impl Predicate {
    pub fn new(name: impl Into<Name>, arity: usize) -> Self {
        Predicate { name: name.into(), arity }
    }

    pub fn name(&self) -> &Name {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// Index of a labeled null.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Null(pub u32);

impl fmt::Display for Null {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_n{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    #[serde(rename = "c")]
    Const(Name),
    #[serde(rename = "v")]
    Var(Name),
    #[serde(rename = "n")]
    Null(Null),
}

impl Term {
    pub fn constant(name: impl Into<Name>) -> Self {
        Term::Const(name.into())
    }

    pub fn var(name: impl Into<Name>) -> Self {
        Term::Var(name.into())
    }

    pub fn null(index: u32) -> Self {
        Term::Null(Null(index))
    }

    pub fn is_const(&self) -> bool {
        matches!(self, Term::Const(_))
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Term::Null(_))
    }

    pub fn as_var(&self) -> Option<&Name> {
        match self {
            Term::Var(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => f.write_str(c),
            Term::Var(v) => f.write_str(v),
            Term::Null(n) => n.fmt(f),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct AtomRepr {
    pred: Name,
    args: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "AtomRepr", from = "AtomRepr")]
pub struct Atom {
    predicate: Predicate,
    terms: Vec<Term>,
}

impl From<AtomRepr> for Atom {
    fn from(r: AtomRepr) -> Self {
        Atom::from_parts(r.pred, r.args)
    }
}

impl From<Atom> for AtomRepr {
    fn from(a: Atom) -> Self {
        AtomRepr { pred: a.predicate.name, args: a.terms }
    }
}

impl Atom {
    /// Builds `pred(terms)`, rejecting a wrong number of terms.
    pub fn new(predicate: Predicate, terms: Vec<Term>) -> Result<Self> {
        if predicate.arity != terms.len() {
            return Err(Error::ArityMismatch { expected: predicate.arity, got: terms.len() });
        }
        Ok(Atom { predicate, terms })
    }

    /// Builds an atom whose predicate arity is taken from `terms`.
    pub fn from_parts(name: impl Into<Name>, terms: Vec<Term>) -> Self {
        Atom { predicate: Predicate::new(name, terms.len()), terms }
    }

    pub fn predicate(&self) -> &Predicate {
        &self.predicate
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn map_terms(&self, mut f: impl FnMut(&Term) -> Term) -> Atom {
        Atom { predicate: self.predicate.clone(), terms: self.terms.iter().map(&mut f).collect() }
    }

    pub fn vars(&self) -> impl Iterator<Item = &Name> + '_ {
        self.terms.iter().filter_map(Term::as_var)
    }

    pub fn is_ground(&self) -> bool {
        !self.terms.iter().any(Term::is_var)
    }

    /// The atom with every null replaced by the same placeholder.
    pub(crate) fn shape(&self) -> Atom {
        self.map_terms(|t| match t {
            Term::Null(_) => Term::Null(Null(0)),
            t => t.clone(),
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate.name)?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            t.fmt(f)?;
        }
        f.write_str(")")
    }
}

/// Variables occurring in a set of atoms.
pub fn vars_of<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> BTreeSet<Name> {
    atoms.into_iter().flat_map(|a| a.vars().cloned()).collect()
}

/// A finite set of ground atoms over constants and labeled nulls.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Atom>", into = "Vec<Atom>")]
pub struct Instance {
    atoms: BTreeSet<Atom>,
}

impl TryFrom<Vec<Atom>> for Instance {
    type Error = Error;

    fn try_from(atoms: Vec<Atom>) -> Result<Self> {
        Instance::new(atoms)
    }
}

impl From<Instance> for Vec<Atom> {
    fn from(i: Instance) -> Self {
        i.atoms.into_iter().collect()
    }
}

impl Instance {
    pub fn new(atoms: impl IntoIterator<Item = Atom>) -> Result<Self> {
        let atoms: BTreeSet<Atom> = atoms.into_iter().collect();
        if let Some(v) = atoms.iter().flat_map(Atom::vars).next() {
            return Err(Error::NonGround(v.clone()));
        }
        Ok(Instance { atoms })
    }

    pub fn empty() -> Self {
        Instance::default()
    }

    pub(crate) fn from_ground(atoms: BTreeSet<Atom>) -> Self {
        debug_assert!(atoms.iter().all(Atom::is_ground));
        Instance { atoms }
    }

    pub fn atoms(&self) -> &BTreeSet<Atom> {
        &self.atoms
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> + '_ {
        self.atoms.iter()
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn contains(&self, atom: &Atom) -> bool {
        self.atoms.contains(atom)
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> + '_ {
        self.atoms.iter().flat_map(|a| a.terms.iter())
    }

    /// Constants occurring in the instance.
    pub fn active_domain(&self) -> BTreeSet<Name> {
        self.terms()
            .filter_map(|t| match t {
                Term::Const(c) => Some(c.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn nulls(&self) -> BTreeSet<Null> {
        self.terms()
            .filter_map(|t| match t {
                Term::Null(n) => Some(*n),
                _ => None,
            })
            .collect()
    }

    pub fn max_null(&self) -> Option<Null> {
        self.nulls().into_iter().next_back()
    }

    pub fn is_database(&self) -> bool {
        !self.terms().any(Term::is_null)
    }

    pub fn union(&self, other: &Instance) -> Instance {
        Instance { atoms: self.atoms.union(&other.atoms).cloned().collect() }
    }

    pub fn intersection(&self, other: &Instance) -> Instance {
        Instance { atoms: self.atoms.intersection(&other.atoms).cloned().collect() }
    }

    pub fn difference(&self, other: &Instance) -> Instance {
        Instance { atoms: self.atoms.difference(&other.atoms).cloned().collect() }
    }

    pub fn is_subset(&self, other: &Instance) -> bool {
        self.atoms.is_subset(&other.atoms)
    }

    /// Applies `f` to every null; constants are left alone.
    pub fn map_nulls(&self, mut f: impl FnMut(Null) -> Term) -> Instance {
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                a.map_terms(|t| match t {
                    Term::Null(n) => f(*n),
                    t => t.clone(),
                })
            })
            .collect();
        Instance { atoms }
    }

    /// Shifts every null index up by `offset`.
    pub fn shift_nulls(&self, offset: u32) -> Instance {
        self.map_nulls(|n| Term::Null(Null(n.0 + offset)))
    }

    pub fn without(&self, atom: &Atom) -> Instance {
        let mut atoms = self.atoms.clone();
        atoms.remove(atom);
        Instance { atoms }
    }

    pub fn predicates(&self) -> BTreeSet<Predicate> {
        self.atoms.iter().map(|a| a.predicate.clone()).collect()
    }
}

impl<'a> IntoIterator for &'a Instance {
    type Item = &'a Atom;
    type IntoIter = alloc::collections::btree_set::Iter<'a, Atom>;

    fn into_iter(self) -> Self::IntoIter {
        self.atoms.iter()
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            a.fmt(f)?;
        }
        f.write_str("}")
    }
}

/// An instance without labeled nulls.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Instance", into = "Instance")]
pub struct Database(Instance);

impl TryFrom<Instance> for Database {
    type Error = Error;

    fn try_from(inst: Instance) -> Result<Self> {
        if inst.is_database() {
            Ok(Database(inst))
        } else {
            Err(Error::NullInDatabase)
        }
    }
}

impl From<Database> for Instance {
    fn from(d: Database) -> Self {
        d.0
    }
}

impl Database {
    pub fn new(atoms: impl IntoIterator<Item = Atom>) -> Result<Self> {
        Database::try_from(Instance::new(atoms)?)
    }

    pub fn empty() -> Self {
        Database::default()
    }

    pub fn as_instance(&self) -> &Instance {
        &self.0
    }

    pub fn into_instance(self) -> Instance {
        self.0
    }
}

impl Deref for Database {
    type Target = Instance;

    fn deref(&self) -> &Instance {
        &self.0
    }
}

impl AsRef<Instance> for Database {
    fn as_ref(&self) -> &Instance {
        &self.0
    }
}

impl fmt::Display for Database {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Renumbers nulls `0..k` following a total order on atoms.
///
/// The renumbering is iterated until it cycles and the least instance of the
/// cycle is returned, so the result is a fixed point of this function.
pub fn canonicalize(inst: &Instance) -> Instance {
    if inst.is_database() {
        return inst.clone();
    }
    let mut seen: Vec<Instance> = Vec::new();
    let mut cur = renumber(inst);
    loop {
        if let Some(pos) = seen.iter().position(|s| *s == cur) {
            return seen.drain(pos..).min().expect("cycle is nonempty");
        }
        let next = renumber(&cur);
        seen.push(cur);
        cur = next;
    }
}

fn renumber(inst: &Instance) -> Instance {
    let mut order: Vec<(Atom, &Atom)> = inst.atoms.iter().map(|a| (a.shape(), a)).collect();
    order.sort();
    let mut mapping: BTreeMap<Null, u32> = BTreeMap::new();
    for (_, a) in &order {
        for t in &a.terms {
            if let Term::Null(n) = t {
                let next = mapping.len() as u32;
                mapping.entry(*n).or_insert(next);
            }
        }
    }
    inst.map_nulls(|n| Term::Null(Null(mapping[&n])))
}

/// Predicate declarations with their arities.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vocabulary {
    predicates: BTreeMap<Name, usize>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Vocabulary::default()
    }

    /// Declares a predicate; redeclaring with a different arity fails.
    pub fn declare(&mut self, p: &Predicate) -> Result<()> {
        match self.predicates.get(&p.name) {
            Some(&a) if a != p.arity => Err(Error::ArityMismatch { expected: a, got: p.arity }),
            _ => {
                self.predicates.insert(p.name.clone(), p.arity);
                Ok(())
            }
        }
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.predicates.get(name).copied()
    }

    pub fn contains(&self, p: &Predicate) -> bool {
        self.arity(&p.name) == Some(p.arity)
    }

    pub fn iter(&self) -> impl Iterator<Item = Predicate> + '_ {
        self.predicates.iter().map(|(n, &a)| Predicate::new(n.clone(), a))
    }

    pub fn len(&self) -> usize {
        self.predicates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predicates.is_empty()
    }
}

impl FromIterator<Predicate> for Vocabulary {
    fn from_iter<T: IntoIterator<Item = Predicate>>(iter: T) -> Self {
        Vocabulary { predicates: iter.into_iter().map(|p| (p.name, p.arity)).collect() }
    }
}
