use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::term::{Atom, Instance, Name, Null, Term};

/// Finite map from variables to constants or nulls.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Substitution(BTreeMap<Name, Term>);

impl Substitution {
    pub fn new() -> Self {
        Substitution::default()
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.0.get(var)
    }

    pub fn insert(&mut self, var: impl Into<Name>, value: Term) -> Option<Term> {
        debug_assert!(!value.is_var(), "substitutions bind ground terms");
        self.0.insert(var.into(), value)
    }

    pub fn remove(&mut self, var: &str) -> Option<Term> {
        self.0.remove(var)
    }

    pub fn with(mut self, var: impl Into<Name>, value: Term) -> Self {
        self.insert(var, value);
        self
    }

    pub fn contains(&self, var: &str) -> bool {
        self.0.contains_key(var)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Term)> + '_ {
        self.0.iter()
    }

    pub fn domain(&self) -> BTreeSet<Name> {
        self.0.keys().cloned().collect()
    }

    pub fn restrict(&self, vars: &BTreeSet<Name>) -> Substitution {
        Substitution(self.0.iter().filter(|(v, _)| vars.contains(*v)).map(|(v, t)| (v.clone(), t.clone())).collect())
    }

    /// Whether every binding of `self` is also a binding of `other`.
    pub fn is_subset(&self, other: &Substitution) -> bool {
        self.0.iter().all(|(v, t)| other.0.get(v) == Some(t))
    }

    pub fn has_nulls(&self) -> bool {
        self.0.values().any(Term::is_null)
    }

    pub fn apply_term(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => self.0.get(v).cloned().unwrap_or_else(|| t.clone()),
            t => t.clone(),
        }
    }

    pub fn apply_atom(&self, a: &Atom) -> Atom {
        a.map_terms(|t| self.apply_term(t))
    }

    pub fn map_nulls(&self, mut f: impl FnMut(Null) -> Term) -> Substitution {
        Substitution(
            self.0
                .iter()
                .map(|(v, t)| {
                    let t = match t {
                        Term::Null(n) => f(*n),
                        t => t.clone(),
                    };
                    (v.clone(), t)
                })
                .collect(),
        )
    }
}

impl FromIterator<(Name, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Name, Term)>>(iter: I) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}->{t}")?;
        }
        f.write_str("}")
    }
}

/// `Aσ`: variables bound by `sigma` are replaced, others stay.
pub fn apply<'a>(sigma: &Substitution, atoms: impl IntoIterator<Item = &'a Atom>) -> BTreeSet<Atom> {
    atoms.into_iter().map(|a| sigma.apply_atom(a)).collect()
}

/// Ground atoms `Aσ` as an instance; `None` when some variable stays unbound.
pub(crate) fn ground<'a>(sigma: &Substitution, atoms: impl IntoIterator<Item = &'a Atom>) -> Option<Instance> {
    let out = apply(sigma, atoms);
    out.iter().all(Atom::is_ground).then(|| Instance::from_ground(out))
}

/// The finite slice of the constant universe that enumeration ranges over.
///
/// Fresh constants are named `_c0`, `_c1`, …; user constants cannot start
/// with an underscore, so these never clash with declared names.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantPool {
    constants: BTreeSet<Name>,
    fresh_budget: usize,
}

impl ConstantPool {
    pub fn new(constants: impl IntoIterator<Item = impl Into<Name>>, fresh_budget: usize) -> Self {
        ConstantPool { constants: constants.into_iter().map(Into::into).collect(), fresh_budget }
    }

    pub fn constants(&self) -> &BTreeSet<Name> {
        &self.constants
    }

    pub fn fresh_budget(&self) -> usize {
        self.fresh_budget
    }

    pub fn fresh_constants(&self) -> Vec<Name> {
        (0..self.fresh_budget).map(|i| format!("_c{i}").into()).collect()
    }

    pub fn with_constants(&self, extra: impl IntoIterator<Item = Name>) -> ConstantPool {
        let mut constants = self.constants.clone();
        constants.extend(extra);
        ConstantPool { constants, fresh_budget: self.fresh_budget }
    }

    pub fn with_fresh_budget(&self, fresh_budget: usize) -> ConstantPool {
        ConstantPool { constants: self.constants.clone(), fresh_budget }
    }

    /// Pool constants followed by the fresh ones.
    pub fn all_constants(&self) -> Vec<Name> {
        self.constants.iter().cloned().chain(self.fresh_constants()).collect()
    }
}

/// Session-scoped generator of labeled nulls.
#[derive(Clone, Debug, Default)]
pub struct NullSupply {
    next: u32,
}

impl NullSupply {
    pub fn new() -> Self {
        NullSupply::default()
    }

    pub fn fresh(&mut self) -> Null {
        let n = Null(self.next);
        self.next += 1;
        n
    }

    /// Makes sure future nulls do not occur in `inst`.
    pub fn avoid(&mut self, inst: &Instance) {
        if let Some(Null(m)) = inst.max_null() {
            self.next = self.next.max(m + 1);
        }
    }
}

/// Binds each of `vars` to a fresh null.
pub fn extend_with_fresh_nulls(sigma: &Substitution, vars: &BTreeSet<Name>, supply: &mut NullSupply) -> Substitution {
    let mut out = sigma.clone();
    for v in vars {
        debug_assert!(!sigma.contains(v));
        out.insert(v.clone(), Term::Null(supply.fresh()));
    }
    out
}

/// Every extension binding `vars` to pool constants or fresh constants.
pub fn extensions_with_constants(sigma: &Substitution, vars: &BTreeSet<Name>, pool: &ConstantPool) -> Vec<Substitution> {
    let values: Vec<Term> = pool.all_constants().into_iter().map(Term::Const).collect();
    let vars: Vec<Name> = vars.iter().cloned().collect();
    let mut out = Vec::new();
    for_each_assignment(&vars, &values, &mut |assignment| {
        let mut s = sigma.clone();
        for (v, t) in vars.iter().zip(assignment) {
            s.insert(v.clone(), t.clone());
        }
        out.push(s);
        true
    });
    out
}

/// Calls `f` with every tuple in `values^vars.len()`; stops when `f` returns false.
pub(crate) fn for_each_assignment(vars: &[Name], values: &[Term], f: &mut impl FnMut(&[Term]) -> bool) -> bool {
    let k = vars.len();
    if k > 0 && values.is_empty() {
        return true;
    }
    let mut idx = alloc::vec![0usize; k];
    let mut current: Vec<Term> = idx.iter().map(|&i| values[i].clone()).collect();
    loop {
        if !f(&current) {
            return false;
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return true;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < values.len() {
                current[pos] = values[idx[pos]].clone();
                break;
            }
            idx[pos] = 0;
            current[pos] = values[0].clone();
        }
    }
}
