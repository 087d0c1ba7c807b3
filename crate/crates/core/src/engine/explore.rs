use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::{abstract_successors, concrete_successors, concrete_universe, DmsSystem, Label, Lts};
use crate::domain::{abstract_matches, gated, AbstractState, DomainId, Gate};
use crate::error::{Error, Result};
use crate::matching::{normal_matches, ConstantPool, NullSupply, Substitution};
use crate::term::{Atom, Database};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dedup {
    /// States are merged when their canonical forms coincide.
    Exact,
    /// States are merged up to hom-equivalence and stored as cores.
    #[default]
    HomEquiv,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExplorationConfig {
    pub pool: ConstantPool,
    pub max_depth: usize,
    pub max_states: usize,
    pub dedup: Dedup,
    pub gate: Gate,
}

impl ExplorationConfig {
    pub fn new(pool: ConstantPool) -> Self {
        ExplorationConfig { pool, max_depth: 3, max_states: 10_000, dedup: Dedup::HomEquiv, gate: Gate::Strict }
    }

    pub fn with_depth(mut self, max_depth: usize) -> Self {
        self.max_depth = max_depth;
        self
    }

    pub fn with_max_states(mut self, max_states: usize) -> Self {
        self.max_states = max_states;
        self
    }

    pub fn with_dedup(mut self, dedup: Dedup) -> Self {
        self.dedup = dedup;
        self
    }

    pub fn with_gate(mut self, gate: Gate) -> Self {
        self.gate = gate;
        self
    }
}

/// A state of an explored system.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum State {
    Concrete(Database),
    Abstract(AbstractState),
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            State::Concrete(d) => d.fmt(f),
            State::Abstract(a) => a.fmt(f),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reachability {
    /// The target is enabled after `trace` from the initial state.
    ReachedAt {
        trace: Vec<Label>,
        state: State,
    },
    NotWithinBounds {
        truncated: bool,
    },
}

/// Domain and per-component atom shapes; hom-equivalent states share a key.
type BucketKey = (Option<DomainId>, Vec<Vec<Atom>>);

struct Registry {
    dedup: Dedup,
    exact: BTreeMap<State, usize>,
    buckets: BTreeMap<BucketKey, Vec<(State, usize)>>,
}

impl Registry {
    fn new(dedup: Dedup) -> Self {
        Registry { dedup, exact: BTreeMap::new(), buckets: BTreeMap::new() }
    }

    /// The representative stored for `s`.
    fn representative(&self, s: State) -> State {
        match (self.dedup, s) {
            (Dedup::HomEquiv, State::Abstract(a)) => State::Abstract(a.reduced()),
            (_, State::Abstract(a)) => State::Abstract(a.canonical()),
            (_, s) => s,
        }
    }

    fn bucket_key(s: &State) -> BucketKey {
        match s {
            State::Concrete(d) => (None, alloc::vec![d.iter().cloned().collect()]),
            State::Abstract(a) => {
                let shapes = a
                    .components()
                    .map(|c| {
                        let mut v: Vec<Atom> = c.iter().map(Atom::shape).collect();
                        v.sort();
                        v
                    })
                    .collect();
                (Some(a.domain()), shapes)
            }
        }
    }

    fn find(&self, rep: &State) -> Option<usize> {
        if let Some(&i) = self.exact.get(rep) {
            return Some(i);
        }
        if self.dedup == Dedup::Exact {
            return None;
        }
        let State::Abstract(a) = rep else { return None };
        self.buckets.get(&Self::bucket_key(rep))?.iter().find_map(|(s, i)| match s {
            State::Abstract(b) if a.equivalent(b) => Some(*i),
            _ => None,
        })
    }

    fn insert(&mut self, rep: State, index: usize) {
        if self.dedup == Dedup::HomEquiv {
            self.buckets.entry(Self::bucket_key(&rep)).or_default().push((rep.clone(), index));
        }
        self.exact.insert(rep, index);
    }
}

fn initial_state(system: &DmsSystem, domain: Option<DomainId>, config: &ExplorationConfig) -> Result<State> {
    match domain {
        None => Ok(State::Concrete(Database::try_from(system.initial().clone())?)),
        Some(d) => {
            for act in system.actions() {
                gated(d, act.guard(), config.gate)?;
            }
            Ok(State::Abstract(AbstractState::single(d, system.initial().clone())?))
        }
    }
}

fn successors(s: &State, system: &DmsSystem, config: &ExplorationConfig, supply: &mut NullSupply) -> Result<Vec<(Label, State)>> {
    Ok(match s {
        State::Concrete(d) => {
            concrete_successors(d, system, &config.pool)?.into_iter().map(|(l, d)| (l, State::Concrete(d))).collect()
        }
        State::Abstract(a) => abstract_successors(a, system, &config.pool, config.gate, supply)?
            .into_iter()
            .map(|(l, a)| (l, State::Abstract(a)))
            .collect(),
    })
}

/// Breadth-first exploration; `stop` is consulted on every newly registered
/// state and ends the search early when it returns true.
fn explore_until(
    system: &DmsSystem,
    domain: Option<DomainId>,
    config: &ExplorationConfig,
    stop: &mut dyn FnMut(&State) -> Result<bool>,
) -> Result<(Lts<State>, Option<usize>)> {
    let mut registry = Registry::new(config.dedup);
    let first = registry.representative(initial_state(system, domain, config)?);
    let mut lts = Lts::new(first.clone());
    registry.insert(first.clone(), 0);
    if stop(&first)? {
        return Ok((lts, Some(0)));
    }
    let mut supply = NullSupply::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let succ = successors(lts.state(i), system, config, &mut supply)?;
        if lts.depth(i) >= config.max_depth {
            if !succ.is_empty() {
                lts.set_truncated();
            }
            continue;
        }
        for (label, next) in succ {
            let rep = registry.representative(next);
            if let Some(j) = registry.find(&rep) {
                lts.add_transition(i, label, j);
                continue;
            }
            if lts.len() >= config.max_states {
                lts.set_truncated();
                continue;
            }
            let j = lts.add_successor(i, label, rep.clone());
            registry.insert(rep.clone(), j);
            if stop(&rep)? {
                return Ok((lts, Some(j)));
            }
            queue.push_back(j);
        }
    }
    Ok((lts, None))
}

/// Bounded LTS of `system`, concrete when `domain` is `None`.
pub fn explore(system: &DmsSystem, domain: Option<DomainId>, config: &ExplorationConfig) -> Result<Lts<State>> {
    Ok(explore_until(system, domain, config, &mut |_| Ok(false))?.0)
}

/// Breadth-first search for a state enabling the action named `target`.
pub fn reachable(system: &DmsSystem, target: &str, domain: Option<DomainId>, config: &ExplorationConfig) -> Result<Reachability> {
    let act = system.action(target).ok_or_else(|| Error::UnknownAction(target.into()))?.clone();
    let ng = act.normal_or_err()?.clone();
    if let Some(d) = domain {
        gated(d, act.guard(), config.gate)?;
    }
    let mut enabled = |s: &State| -> Result<bool> {
        Ok(match s {
            State::Concrete(d) => {
                let mut hit = false;
                normal_matches(&ng, d, d, &concrete_universe(d, &config.pool, &ng), &Substitution::new(), &mut |_| {
                    hit = true;
                    false
                });
                hit
            }
            State::Abstract(a) => !abstract_matches(a, act.guard(), &config.pool, config.gate)?.is_empty(),
        })
    };
    let (lts, hit) = explore_until(system, domain, config, &mut enabled)?;
    Ok(match hit {
        Some(i) => Reachability::ReachedAt { trace: lts.trace_to(i), state: lts.state(i).clone() },
        None => Reachability::NotWithinBounds { truncated: lts.is_truncated() },
    })
}
