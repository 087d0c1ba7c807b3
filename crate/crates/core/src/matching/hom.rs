use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::term::{Atom, Instance, Predicate, Term};

/// Term mapping that fixes constants and sends every source atom into the target.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Homomorphism {
    mapping: BTreeMap<Term, Term>,
}

impl Homomorphism {
    pub fn mapping(&self) -> &BTreeMap<Term, Term> {
        &self.mapping
    }

    pub fn apply(&self, t: &Term) -> Term {
        self.mapping.get(t).cloned().unwrap_or_else(|| t.clone())
    }

    pub fn apply_atom(&self, a: &Atom) -> Atom {
        a.map_terms(|t| self.apply(t))
    }

    pub fn image(&self, inst: &Instance) -> Instance {
        Instance::from_ground(inst.iter().map(|a| self.apply_atom(a)).collect())
    }
}

impl fmt::Display for Homomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.mapping.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}->{v}")?;
        }
        f.write_str("}")
    }
}

/// Some homomorphism from `src` into `dst` extending `fixed`.
///
/// Variables and nulls of `src` may be mapped; constants map to themselves.
pub fn find_homomorphism<'a>(
    src: impl IntoIterator<Item = &'a Atom>,
    dst: &Instance,
    fixed: &BTreeMap<Term, Term>,
) -> Option<Homomorphism> {
    find_homomorphism_bounded(src, dst, fixed, None).expect("unbounded search cannot time out")
}

/// As [`find_homomorphism`], giving up with [`Error::Timeout`] after `budget` candidate tries.
pub fn find_homomorphism_bounded<'a>(
    src: impl IntoIterator<Item = &'a Atom>,
    dst: &Instance,
    fixed: &BTreeMap<Term, Term>,
    budget: Option<u64>,
) -> Result<Option<Homomorphism>> {
    let src: Vec<&Atom> = src.into_iter().collect();
    let mut found = None;
    let mut search = Search::new(&src, dst, budget);
    search.run(fixed, &mut |b| {
        found = Some(b.clone());
        false
    })?;
    Ok(found.map(|mut mapping| {
        for a in &src {
            for t in a.terms() {
                if let Term::Const(_) = t {
                    mapping.insert(t.clone(), t.clone());
                }
            }
        }
        Homomorphism { mapping }
    }))
}

/// Calls `f` with every homomorphism from `src` into `dst` extending `fixed`,
/// restricted to the mappable terms of `src`, until `f` returns false.
pub(crate) fn for_each_homomorphism(
    src: &[&Atom],
    dst: &Instance,
    fixed: &BTreeMap<Term, Term>,
    f: &mut dyn FnMut(&BTreeMap<Term, Term>) -> bool,
) {
    Search::new(src, dst, None).run(fixed, f).expect("unbounded search cannot time out");
}

pub fn hom_leq(i: &Instance, j: &Instance) -> bool {
    find_homomorphism(i, j, &BTreeMap::new()).is_some()
}

pub fn hom_equiv(i: &Instance, j: &Instance) -> bool {
    hom_leq(i, j) && hom_leq(j, i)
}

/// A core of `inst`: a sub-instance it retracts onto that admits no further retraction.
///
/// Repeatedly looks for an endomorphism avoiding one atom and replaces the
/// instance by its image; stops once every endomorphism is onto.
pub fn core(inst: &Instance) -> Instance {
    let mut cur = inst.clone();
    'shrink: loop {
        let image = cur.iter().filter(|a| a.terms().iter().any(Term::is_null)).find_map(|a| {
            let rest = cur.without(a);
            find_homomorphism(&cur, &rest, &BTreeMap::new()).map(|h| h.image(&cur))
        });
        match image {
            Some(next) => {
                cur = next;
                continue 'shrink;
            }
            None => return cur,
        }
    }
}

struct Search<'a> {
    src: &'a [&'a Atom],
    index: BTreeMap<&'a Predicate, Vec<&'a Atom>>,
    steps: u64,
    budget: Option<u64>,
}

enum Flow {
    Continue,
    Stop,
}

impl<'a> Search<'a> {
    fn new(src: &'a [&'a Atom], dst: &'a Instance, budget: Option<u64>) -> Self {
        let mut index: BTreeMap<&Predicate, Vec<&Atom>> = BTreeMap::new();
        for a in dst.iter() {
            index.entry(a.predicate()).or_default().push(a);
        }
        Search { src, index, steps: 0, budget }
    }

    fn run(&mut self, fixed: &BTreeMap<Term, Term>, f: &mut dyn FnMut(&BTreeMap<Term, Term>) -> bool) -> Result<bool> {
        let mut binding = fixed.clone();
        let mut remaining: Vec<usize> = (0..self.src.len()).collect();
        // Duplicate source atoms add nothing.
        let mut seen = BTreeSet::new();
        remaining.retain(|&i| seen.insert(self.src[i]));
        Ok(matches!(self.solve(&mut remaining, &mut binding, f)?, Flow::Continue))
    }

    fn solve(
        &mut self,
        remaining: &mut Vec<usize>,
        binding: &mut BTreeMap<Term, Term>,
        f: &mut dyn FnMut(&BTreeMap<Term, Term>) -> bool,
    ) -> Result<Flow> {
        if remaining.is_empty() {
            return Ok(if f(binding) { Flow::Continue } else { Flow::Stop });
        }
        let mut best: Option<(usize, Vec<&'a Atom>)> = None;
        for (pos, &i) in remaining.iter().enumerate() {
            let cands = self.candidates(self.src[i], binding);
            if cands.is_empty() {
                return Ok(Flow::Continue);
            }
            if best.as_ref().map_or(true, |(_, b)| cands.len() < b.len()) {
                let single = cands.len() == 1;
                best = Some((pos, cands));
                if single {
                    break;
                }
            }
        }
        let (pos, cands) = best.expect("remaining is nonempty");
        let i = remaining.swap_remove(pos);
        let atom = self.src[i];
        for target in cands {
            self.steps += 1;
            if self.budget.is_some_and(|b| self.steps > b) {
                return Err(Error::Timeout);
            }
            let mut added = Vec::new();
            for (s, t) in atom.terms().iter().zip(target.terms()) {
                if !s.is_const() && !binding.contains_key(s) {
                    binding.insert(s.clone(), t.clone());
                    added.push(s);
                }
            }
            let flow = self.solve(remaining, binding, f)?;
            for s in added {
                binding.remove(s);
            }
            if let Flow::Stop = flow {
                return Ok(Flow::Stop);
            }
        }
        remaining.push(i);
        let last = remaining.len() - 1;
        remaining.swap(pos, last);
        Ok(Flow::Continue)
    }

    fn candidates(&self, atom: &Atom, binding: &BTreeMap<Term, Term>) -> Vec<&'a Atom> {
        let Some(list) = self.index.get(atom.predicate()) else {
            return Vec::new();
        };
        list.iter().copied().filter(|target| compatible(atom, target, binding)).collect()
    }
}

fn compatible(atom: &Atom, target: &Atom, binding: &BTreeMap<Term, Term>) -> bool {
    let terms = atom.terms();
    for (k, (s, t)) in terms.iter().zip(target.terms()).enumerate() {
        let ok = match s {
            Term::Const(_) => s == t,
            _ => match binding.get(s) {
                Some(b) => b == t,
                None => terms[..k].iter().zip(target.terms()).all(|(s2, t2)| s2 != s || t2 == t),
            },
        };
        if !ok {
            return false;
        }
    }
    true
}
