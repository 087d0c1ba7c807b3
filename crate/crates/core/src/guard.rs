//! Guard formulas, their fragment classification and the normal form used for evaluation.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::term::{vars_of, Atom, Name, Term};

/// First-order guard built from atoms, equality, negation, conjunction and `∃`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Guard {
    True,
    Atom(Atom),
    Eq(Term, Term),
    Not(Box<Guard>),
    And(Box<Guard>, Box<Guard>),
    Exists(Name, Box<Guard>),
}

impl Guard {
    #[allow(clippy::should_implement_trait)]
    pub fn not(g: Guard) -> Guard {
        Guard::Not(Box::new(g))
    }

    pub fn and(a: Guard, b: Guard) -> Guard {
        Guard::And(Box::new(a), Box::new(b))
    }

    pub fn exists(var: impl Into<Name>, body: Guard) -> Guard {
        Guard::Exists(var.into(), Box::new(body))
    }

    /// Conjunction of `parts`; `True` when empty.
    pub fn conj(parts: impl IntoIterator<Item = Guard>) -> Guard {
        parts.into_iter().reduce(Guard::and).unwrap_or(Guard::True)
    }

    /// `∃v1 … vk. body`.
    pub fn exists_all(vars: impl IntoIterator<Item = Name>, body: Guard) -> Guard {
        let vars: Vec<Name> = vars.into_iter().collect();
        vars.into_iter().rev().fold(body, |g, v| Guard::exists(v, g))
    }

    /// `∀y⃗. ¬a1 ∧ … ∧ ¬am`, encoded as `¬∃y⃗. ¬(¬a1 ∧ … ∧ ¬am)`.
    pub fn forall_not(vars: impl IntoIterator<Item = Name>, atoms: impl IntoIterator<Item = Atom>) -> Guard {
        let vars: Vec<Name> = vars.into_iter().collect();
        let body = Guard::conj(atoms.into_iter().map(|a| Guard::not(Guard::Atom(a))));
        if vars.is_empty() {
            body
        } else {
            Guard::not(Guard::exists_all(vars, Guard::not(body)))
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        let mut add = |t: &Term, bound: &Vec<Name>| {
            if let Term::Var(v) = t {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        };
        match self {
            Guard::True => {}
            Guard::Atom(a) => a.terms().iter().for_each(|t| add(t, bound)),
            Guard::Eq(t, u) => {
                add(t, bound);
                add(u, bound);
            }
            Guard::Not(g) => g.collect_free(bound, out),
            Guard::And(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Guard::Exists(v, g) => {
                bound.push(v.clone());
                g.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.visit(&mut |g| match g {
            Guard::Atom(a) => out.extend(a.vars().cloned()),
            Guard::Eq(t, u) => out.extend([t, u].into_iter().filter_map(Term::as_var).cloned()),
            Guard::Exists(v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    /// Constants mentioned in atoms or equalities.
    pub fn constants(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        let mut add = |t: &Term| {
            if let Term::Const(c) = t {
                out.insert(c.clone());
            }
        };
        self.visit(&mut |g| match g {
            Guard::Atom(a) => a.terms().iter().for_each(&mut add),
            Guard::Eq(t, u) => {
                add(t);
                add(u);
            }
            _ => {}
        });
        out
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.visit_ref(&mut |g| {
            if let Guard::Atom(a) = g {
                out.push(a);
            }
        });
        out
    }

    fn visit(&self, f: &mut impl FnMut(&Guard)) {
        f(self);
        match self {
            Guard::Not(g) | Guard::Exists(_, g) => g.visit(f),
            Guard::And(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    fn visit_ref<'a>(&'a self, f: &mut impl FnMut(&'a Guard)) {
        f(self);
        match self {
            Guard::Not(g) | Guard::Exists(_, g) => g.visit_ref(f),
            Guard::And(a, b) => {
                a.visit_ref(f);
                b.visit_ref(f);
            }
            _ => {}
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            Guard::True => f.write_str("true"),
            Guard::Atom(a) => fmt::Display::fmt(a, f),
            Guard::Eq(t, u) if prec >= 2 => write!(f, "({t} = {u})"),
            Guard::Eq(t, u) => write!(f, "{t} = {u}"),
            Guard::Not(inner) => {
                if let Some((vars, body)) = forall_shape(inner) {
                    if prec >= 1 {
                        f.write_str("(")?;
                    }
                    f.write_str("forall")?;
                    for v in &vars {
                        write!(f, " {v}")?;
                    }
                    f.write_str(". ")?;
                    body.fmt_prec(f, 0)?;
                    if prec >= 1 {
                        f.write_str(")")?;
                    }
                    return Ok(());
                }
                f.write_str("!")?;
                inner.fmt_prec(f, 2)
            }
            Guard::And(a, b) => {
                if prec >= 2 {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, 1)?;
                f.write_str(" & ")?;
                b.fmt_prec(f, 1)?;
                if prec >= 2 {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Guard::Exists(..) => {
                let (vars, body) = peel_exists(self);
                if prec >= 1 {
                    f.write_str("(")?;
                }
                f.write_str("exists")?;
                for v in &vars {
                    write!(f, " {v}")?;
                }
                f.write_str(". ")?;
                body.fmt_prec(f, 0)?;
                if prec >= 1 {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

/// Recognises `∃y⃗. ¬body` under a negation, i.e. `∀y⃗. body`.
fn forall_shape(inner: &Guard) -> Option<(Vec<Name>, &Guard)> {
    if !matches!(inner, Guard::Exists(..)) {
        return None;
    }
    let (vars, body) = peel_exists(inner);
    match body {
        Guard::Not(b) => Some((vars, b)),
        _ => None,
    }
}

fn peel_exists(g: &Guard) -> (Vec<Name>, &Guard) {
    let mut vars = Vec::new();
    let mut cur = g;
    while let Guard::Exists(v, body) = cur {
        vars.push(v.clone());
        cur = body;
    }
    (vars, cur)
}

fn strip_double_negation(mut g: &Guard) -> &Guard {
    while let Guard::Not(inner) = g {
        match &**inner {
            Guard::Not(x) => g = x,
            _ => break,
        }
    }
    g
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

/// Guard fragments, from the most general to the most specific.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Fragment {
    GeneralFol,
    Ncg,
    PfNcg,
    Cg,
    PfCg,
    Cna,
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Fragment::GeneralFol => "FOL",
            Fragment::Ncg => "NCG",
            Fragment::PfNcg => "pf-NCG",
            Fragment::Cg => "CG",
            Fragment::PfCg => "pf-CG",
            Fragment::Cna => "CNA",
        })
    }
}

impl Fragment {
    /// Whether a guard with this normal form lies in the fragment.
    pub fn admits(self, ng: &NormalGuard) -> bool {
        let universal = ng.polarity == Polarity::Universal;
        let unquantified = ng.quantified.is_empty();
        match self {
            Fragment::GeneralFol => true,
            Fragment::Cna => ng.positive.is_empty() && (universal || unquantified),
            Fragment::Ncg | Fragment::PfNcg if universal => unquantified,
            Fragment::Ncg => true,
            Fragment::PfNcg => unquantified,
            Fragment::Cg => !universal && ng.negative.is_empty(),
            Fragment::PfCg => !universal && unquantified && ng.negative.is_empty(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarity {
    Existential,
    Universal,
}

/// `Q y⃗. a1 ∧ … ∧ am ∧ ¬b1 ∧ … ∧ ¬bn` with equalities already eliminated.
///
/// Free variables equated to another term during elimination are kept in
/// `aliases`; the atoms mention only the alias target.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NormalGuard {
    quantified: Vec<Name>,
    positive: BTreeSet<Atom>,
    negative: BTreeSet<Atom>,
    polarity: Polarity,
    aliases: BTreeMap<Name, Term>,
    free: BTreeSet<Name>,
    unsatisfiable: bool,
}

impl NormalGuard {
    pub fn quantified(&self) -> &[Name] {
        &self.quantified
    }

    pub fn positive(&self) -> &BTreeSet<Atom> {
        &self.positive
    }

    pub fn negative(&self) -> &BTreeSet<Atom> {
        &self.negative
    }

    pub fn polarity(&self) -> Polarity {
        self.polarity
    }

    pub fn aliases(&self) -> &BTreeMap<Name, Term> {
        &self.aliases
    }

    pub fn free_vars(&self) -> &BTreeSet<Name> {
        &self.free
    }

    /// Set when the equalities of the guard are contradictory.
    pub fn is_unsatisfiable(&self) -> bool {
        self.unsatisfiable
    }

    /// Constants of the atoms and of the constant-valued aliases.
    pub fn constants(&self) -> BTreeSet<Name> {
        self.positive
            .iter()
            .chain(&self.negative)
            .flat_map(|a| a.terms())
            .chain(self.aliases.values())
            .filter_map(|t| match t {
                Term::Const(c) => Some(c.clone()),
                _ => None,
            })
            .collect()
    }

    pub fn is_safe(&self) -> bool {
        vars_of(&self.negative).is_subset(&vars_of(&self.positive))
    }

    pub fn fragment(&self) -> Fragment {
        let order = [Fragment::PfCg, Fragment::Cna, Fragment::Cg, Fragment::PfNcg, Fragment::Ncg];
        order.into_iter().find(|f| f.admits(self)).unwrap_or(Fragment::GeneralFol)
    }

    /// The guard this normal form stands for.
    pub fn to_guard(&self) -> Guard {
        let negs = self.negative.iter().map(|a| Guard::not(Guard::Atom(a.clone())));
        if self.polarity == Polarity::Universal && !self.quantified.is_empty() {
            return Guard::not(Guard::exists_all(self.quantified.iter().cloned(), Guard::not(Guard::conj(negs))));
        }
        let body = Guard::conj(
            self.positive
                .iter()
                .map(|a| Guard::Atom(a.clone()))
                .chain(negs)
                .chain(self.aliases.iter().map(|(x, t)| Guard::Eq(Term::Var(x.clone()), t.clone())))
                .chain(self.unsatisfiable.then(|| Guard::not(Guard::True))),
        );
        Guard::exists_all(self.quantified.iter().cloned(), body)
    }
}

/// The most specific fragment containing `g`.
pub fn classify(g: &Guard) -> Fragment {
    normalize(g).map(|ng| ng.fragment()).unwrap_or(Fragment::GeneralFol)
}

/// Brings `g` into the prenex positive/negative shape shared by all fragments.
pub fn normalize(g: &Guard) -> Result<NormalGuard> {
    let free = g.free_vars();
    let mut c = Collector { used: g.all_vars(), ..Collector::default() };
    let top = strip_double_negation(g);
    let mut universal = false;
    match top {
        Guard::Not(inner) if matches!(**inner, Guard::Exists(..)) => {
            let (vars, body) = peel_exists(inner);
            let mut renaming = BTreeMap::new();
            for v in vars {
                let v2 = c.bind(&v, &free);
                renaming.insert(v, v2);
            }
            c.universal_body(strip_double_negation(body), &renaming)?;
            universal = true;
        }
        _ => c.collect(top, &BTreeMap::new(), &free)?,
    }
    if universal && !c.eqs.is_empty() {
        return Err(Error::NotNormalizable);
    }
    c.finish(free, universal)
}

#[derive(Default)]
struct Collector {
    quantified: Vec<Name>,
    pos: Vec<Atom>,
    neg: Vec<Atom>,
    eqs: Vec<(Term, Term)>,
    unsat: bool,
    used: BTreeSet<Name>,
}

impl Collector {
    fn bind(&mut self, v: &Name, free: &BTreeSet<Name>) -> Name {
        let name = if free.contains(v) || self.quantified.contains(v) {
            let mut i = 1;
            loop {
                let candidate: Name = format!("{v}_{i}").into();
                if !self.used.contains(&candidate) {
                    break candidate;
                }
                i += 1;
            }
        } else {
            v.clone()
        };
        self.used.insert(name.clone());
        self.quantified.push(name.clone());
        name
    }

    fn collect(&mut self, g: &Guard, ren: &BTreeMap<Name, Name>, free: &BTreeSet<Name>) -> Result<()> {
        match g {
            Guard::True => {}
            Guard::Atom(a) => self.pos.push(rename(a, ren)),
            Guard::Eq(t, u) => self.eqs.push((rename_term(t, ren), rename_term(u, ren))),
            Guard::And(a, b) => {
                self.collect(a, ren, free)?;
                self.collect(b, ren, free)?;
            }
            Guard::Exists(v, body) => {
                let v2 = self.bind(v, free);
                let mut ren = ren.clone();
                ren.insert(v.clone(), v2);
                self.collect(body, &ren, free)?;
            }
            Guard::Not(inner) => match &**inner {
                Guard::Not(x) => self.collect(x, ren, free)?,
                Guard::Atom(a) => self.neg.push(rename(a, ren)),
                Guard::True => self.unsat = true,
                _ => return Err(Error::NotNormalizable),
            },
        }
        Ok(())
    }

    /// Body of `¬∃y⃗. body`: a single atom or `¬(¬a1 ∧ … ∧ ¬am)`.
    fn universal_body(&mut self, body: &Guard, ren: &BTreeMap<Name, Name>) -> Result<()> {
        match body {
            Guard::Atom(a) => self.neg.push(rename(a, ren)),
            Guard::Not(conj) => self.negated_conjunction(conj, ren)?,
            _ => return Err(Error::NotNormalizable),
        }
        Ok(())
    }

    fn negated_conjunction(&mut self, g: &Guard, ren: &BTreeMap<Name, Name>) -> Result<()> {
        match g {
            Guard::True => {}
            Guard::And(a, b) => {
                self.negated_conjunction(a, ren)?;
                self.negated_conjunction(b, ren)?;
            }
            Guard::Not(inner) => match strip_double_negation(inner) {
                Guard::Atom(a) => self.neg.push(rename(a, ren)),
                _ => return Err(Error::NotNormalizable),
            },
            _ => return Err(Error::NotNormalizable),
        }
        Ok(())
    }

    fn finish(mut self, free: BTreeSet<Name>, universal: bool) -> Result<NormalGuard> {
        let mut subst: BTreeMap<Name, Term> = BTreeMap::new();
        let quantified: BTreeSet<Name> = self.quantified.iter().cloned().collect();
        let resolve = |t: &Term, subst: &BTreeMap<Name, Term>| {
            let mut t = t.clone();
            while let Term::Var(v) = &t {
                match subst.get(v) {
                    Some(next) => t = next.clone(),
                    None => break,
                }
            }
            t
        };
        for (t, u) in core::mem::take(&mut self.eqs) {
            let (t, u) = (resolve(&t, &subst), resolve(&u, &subst));
            if t == u {
                continue;
            }
            let rank = |t: &Term| match t {
                Term::Var(v) if quantified.contains(v) => 0,
                Term::Var(_) => 1,
                _ => 2,
            };
            let (gone, keep) = match (rank(&t), rank(&u)) {
                (2, 2) => {
                    self.unsat = true;
                    continue;
                }
                (a, b) if a < b => (t, u),
                (a, b) if b < a => (u, t),
                _ if t > u => (t, u),
                _ => (u, t),
            };
            let Term::Var(v) = gone else { unreachable!("only variables are eliminated") };
            subst.insert(v, keep);
        }
        let full: BTreeMap<Name, Term> = subst.keys().map(|v| (v.clone(), resolve(&Term::Var(v.clone()), &subst))).collect();
        let apply = |a: &Atom| {
            a.map_terms(|t| match t {
                Term::Var(v) => full.get(v).cloned().unwrap_or_else(|| t.clone()),
                t => t.clone(),
            })
        };
        let positive: BTreeSet<Atom> = self.pos.iter().map(apply).collect();
        let negative: BTreeSet<Atom> = self.neg.iter().map(apply).collect();
        let aliases: BTreeMap<Name, Term> =
            full.iter().filter(|(v, _)| free.contains(*v)).map(|(v, t)| (v.clone(), t.clone())).collect();
        let occurring = vars_of(positive.iter().chain(&negative));
        let quantified: Vec<Name> = self.quantified.into_iter().filter(|v| occurring.contains(v)).collect();
        let polarity = if universal || (positive.is_empty() && quantified.is_empty() && !negative.is_empty()) {
            Polarity::Universal
        } else {
            Polarity::Existential
        };
        Ok(NormalGuard { quantified, positive, negative, polarity, aliases, free, unsatisfiable: self.unsat })
    }
}

fn rename_term(t: &Term, ren: &BTreeMap<Name, Name>) -> Term {
    match t {
        Term::Var(v) => Term::Var(ren.get(v).cloned().unwrap_or_else(|| v.clone())),
        t => t.clone(),
    }
}

fn rename(a: &Atom, ren: &BTreeMap<Name, Name>) -> Atom {
    a.map_terms(|t| rename_term(t, ren))
}
