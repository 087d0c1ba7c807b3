//! Bisimulation and simulation on finite systems, the bounded ∀-bisimulation
//! game between abstract states and sets of databases, and Galois-law checks.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{abstract_universe, alpha, gamma_contains, gamma_enumerate_over, gated, state_leq, AbstractState, DomainId};
use crate::engine::{abstract_step_raw, extensions, lifted_forall_step, DmsSystem, ExplorationConfig, Label, Lts};
use crate::error::{Error, Result};
use crate::matching::{is_normal_match, normal_matches, ConstantPool, NullSupply, Substitution, Universe};
use crate::sample;
use crate::term::{Database, Instance, Predicate, Term};

/// Blocks of states, numbered from 0 in order of first occurrence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    block_of: Vec<usize>,
    count: usize,
}

impl Partition {
    pub fn block_of(&self, state: usize) -> usize {
        self.block_of[state]
    }

    pub fn same_block(&self, p: usize, q: usize) -> bool {
        self.block_of[p] == self.block_of[q]
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.count];
        for (s, &b) in self.block_of.iter().enumerate() {
            out[b].push(s);
        }
        out
    }
}

/// Outgoing labels paired with the block of their target.
type Signature<'a, L> = BTreeSet<(&'a L, usize)>;

/// Coarsest bisimulation, by signature-based partition refinement.
pub fn largest_bisimulation<S, L: Clone + Ord>(lts: &Lts<S, L>) -> Partition {
    let n = lts.len();
    let adj = lts.adjacency();
    let mut block_of = vec![0usize; n];
    let mut count = usize::from(n > 0);
    loop {
        let mut ids: BTreeMap<(usize, Signature<'_, L>), usize> = BTreeMap::new();
        let mut next = vec![0usize; n];
        for s in 0..n {
            let sig = (block_of[s], adj[s].iter().map(|&(l, t)| (l, block_of[t])).collect());
            let fresh = ids.len();
            next[s] = *ids.entry(sig).or_insert(fresh);
        }
        // Renumber by first occurrence so the result is independent of map order.
        let mut order: BTreeMap<usize, usize> = BTreeMap::new();
        for b in next.iter_mut() {
            let fresh = order.len();
            *b = *order.entry(*b).or_insert(fresh);
        }
        let stable = ids.len() == count;
        block_of = next;
        count = ids.len();
        if stable {
            return Partition { block_of, count };
        }
    }
}

/// The simulation preorder: entry `[p][q]` holds when `q` simulates `p`.
pub fn simulation_preorder<S, L: Clone + Ord>(lts: &Lts<S, L>) -> Vec<Vec<bool>> {
    let n = lts.len();
    let adj = lts.adjacency();
    let mut sim = vec![vec![true; n]; n];
    let mut changed = true;
    while changed {
        changed = false;
        for p in 0..n {
            for q in 0..n {
                if !sim[p][q] {
                    continue;
                }
                let answered = adj[p].iter().all(|&(l, p2)| adj[q].iter().any(|&(m, q2)| l == m && sim[p2][q2]));
                if !answered {
                    sim[p][q] = false;
                    changed = true;
                }
            }
        }
    }
    sim
}

/// Whether `q` simulates `p`.
pub fn simulates<S, L: Clone + Ord>(lts: &Lts<S, L>, p: usize, q: usize) -> bool {
    simulation_preorder(lts)[p][q]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailureKind {
    /// The abstract state is not the abstraction of the set.
    AbstractionMismatch,
    /// An abstract step has no compatible lifted step.
    AbstractOnly,
    /// A lifted step has no compatible abstract step.
    ConcreteOnly,
    /// Both steps exist but the successors disagree.
    SuccessorMismatch,
    /// A Galois law is violated.
    Law(Law),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Law {
    /// `C ⊆ C′ ⇒ α(C) ⪯ α(C′)`.
    Monotone,
    /// `C ⊆ γ(α(C))`.
    Extensive,
    /// `α(γ(a)) ⪯ a`.
    Reductive,
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Law::Monotone => "monotone",
            Law::Extensive => "extensive",
            Law::Reductive => "reductive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub kind: FailureKind,
    pub state: Option<AbstractState>,
    pub set: Vec<Database>,
    pub label: Option<Label>,
    pub detail: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.kind)?;
        if let Some(l) = &self.label {
            write!(f, " at {l}")?;
        }
        if let Some(s) = &self.state {
            write!(f, "\n  abstract: {s}")?;
        }
        if !self.set.is_empty() {
            f.write_str("\n  set:")?;
            for d in &self.set {
                write!(f, "\n    {d}")?;
            }
        }
        if !self.detail.is_empty() {
            write!(f, "\n  {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Holds,
    FailsAt(Failure),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawCount {
    pub law: Law,
    pub checked: usize,
    pub passed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub verdict: Verdict,
    pub explored_depth: usize,
    pub samples: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub laws: Vec<LawCount>,
}

impl CheckReport {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::Holds
    }
}

/// Plays the ∀-bisimulation game between `state` and `c` for `depth` rounds.
///
/// Every abstract step must be answered by a lifted step with the same
/// match and a shared extension, and every lifted step by an abstract one;
/// successors must agree up to the domain's equivalence. Abstract matches
/// that bind free variables to nulls have no concrete label and are not
/// played.
pub fn check_forall_bisim(
    state: &AbstractState,
    c: &[Database],
    system: &DmsSystem,
    config: &ExplorationConfig,
    depth: usize,
) -> Result<CheckReport> {
    let domain = state.domain();
    for act in system.actions() {
        gated(domain, act.guard(), config.gate)?;
    }
    let set: Vec<Database> = c.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let start = alpha(domain, &set)?;
    let report = |verdict, samples| CheckReport { verdict, explored_depth: depth, samples, laws: Vec::new() };
    if !state.equivalent(&start) {
        let failure = Failure {
            kind: FailureKind::AbstractionMismatch,
            state: Some(state.clone()),
            set,
            label: None,
            detail: format!("abstraction of the set is {start}"),
        };
        return Ok(report(Verdict::FailsAt(failure), 0));
    }
    let mut game = Game { system, config, domain, memo: BTreeMap::new(), nodes: 0, supply: NullSupply::new() };
    let verdict = match game.play(state, &set, depth)? {
        None => Verdict::Holds,
        Some(f) => Verdict::FailsAt(f),
    };
    Ok(report(verdict, game.nodes))
}

struct Game<'a> {
    system: &'a DmsSystem,
    config: &'a ExplorationConfig,
    domain: DomainId,
    memo: BTreeMap<Vec<Database>, usize>,
    nodes: usize,
    supply: NullSupply,
}

impl Game<'_> {
    fn play(&mut self, a: &AbstractState, c: &[Database], rounds: usize) -> Result<Option<Failure>> {
        if rounds == 0 || self.memo.get(c).is_some_and(|&k| k >= rounds) {
            return Ok(None);
        }
        self.nodes += 1;
        let pool = &self.config.pool;
        let gate = self.config.gate;
        let taken: Vec<Term> = c.iter().flat_map(|d| d.terms().cloned()).collect();
        for act in self.system.actions() {
            let ng = gated(self.domain, act.guard(), gate)?;
            let concrete_universe = Universe::for_guard(c.iter().map(Database::as_instance), pool, &ng);
            let mut shared = BTreeSet::new();
            let (first, rest) = c.split_first().ok_or(Error::EmptyInput)?;
            normal_matches(&ng, first, first, &concrete_universe, &Substitution::new(), &mut |s| {
                if rest.iter().all(|d| is_normal_match(&ng, d, d, &concrete_universe, &s)) {
                    shared.insert(s);
                }
                true
            });
            let mut abstract_universe = abstract_universe(a, pool, &ng);
            let missing: Vec<Term> =
                concrete_universe.values.iter().filter(|t| !abstract_universe.values.contains(t)).cloned().collect();
            abstract_universe.values.extend(missing);
            let mut abstract_side = BTreeSet::new();
            normal_matches(&ng, a.positive_target(), a.negative_target(), &abstract_universe, &Substitution::new(), &mut |s| {
                if !s.has_nulls() {
                    abstract_side.insert(s);
                }
                true
            });
            let fail = |kind, sigma: &Substitution, detail: String| Failure {
                kind,
                state: Some(a.clone()),
                set: c.to_vec(),
                label: Some(Label::new(act.name().clone(), sigma.clone())),
                detail,
            };
            if let Some(s) = abstract_side.difference(&shared).next() {
                return Ok(Some(fail(
                    FailureKind::AbstractOnly,
                    s,
                    "enabled on the abstract state but not on every member".into(),
                )));
            }
            if let Some(s) = shared.difference(&abstract_side).next() {
                return Ok(Some(fail(
                    FailureKind::ConcreteOnly,
                    s,
                    "enabled on every member but not on the abstract state".into(),
                )));
            }
            let add_only = act.add_only_vars();
            for sigma in &shared {
                let exts = extensions(sigma, &add_only, pool, &taken);
                if exts.is_empty() {
                    return Ok(Some(fail(
                        FailureKind::AbstractOnly,
                        sigma,
                        "no extension of the add-only variables within the pool".into(),
                    )));
                }
                for star in exts {
                    let Some(next_set) = lifted_forall_step(c, act, sigma, &star) else {
                        return Ok(Some(fail(FailureKind::ConcreteOnly, &star, "lifted step undefined".into())));
                    };
                    let next_set: Vec<Database> = next_set.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
                    let label_sigma = if self.domain.uses_nulls() { sigma } else { &star };
                    let (raw, used) = abstract_step_raw(a, act, label_sigma, pool, gate, &mut self.supply)?;
                    let inst: BTreeMap<_, _> = add_only
                        .iter()
                        .filter_map(|v| match (used.get(v), star.get(v)) {
                            (Some(Term::Null(n)), Some(t)) => Some((*n, t.clone())),
                            _ => None,
                        })
                        .collect();
                    let successor =
                        raw.map_components(|i: &Instance| i.map_nulls(|n| inst.get(&n).cloned().unwrap_or(Term::Null(n))));
                    let target = alpha(self.domain, &next_set)?;
                    if !successor.equivalent(&target) {
                        return Ok(Some(fail(
                            FailureKind::SuccessorMismatch,
                            &star,
                            format!("abstract successor {successor} but abstraction of the lifted successor {target}"),
                        )));
                    }
                    if let Some(f) = self.play(&target, &next_set, rounds - 1)? {
                        return Ok(Some(f));
                    }
                }
            }
        }
        self.memo.insert(c.to_vec(), rounds);
        Ok(None)
    }
}

/// Sampling parameters for [`check_galois`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisSpec {
    pub seed: u64,
    pub samples: usize,
    pub max_constants: usize,
    pub max_predicates: usize,
    pub max_arity: usize,
    pub max_set: usize,
    pub max_atoms: usize,
    /// Atoms allowed beyond the mandatory ones when enumerating `γ(a)`.
    pub gamma_slack: usize,
}

impl Default for GaloisSpec {
    fn default() -> Self {
        GaloisSpec {
            seed: 0,
            samples: 200,
            max_constants: 4,
            max_predicates: 2,
            max_arity: 2,
            max_set: 5,
            max_atoms: 6,
            gamma_slack: 1,
        }
    }
}

/// Randomized check of the Galois laws for `domain`.
pub fn check_galois(domain: DomainId, spec: &GaloisSpec) -> CheckReport {
    check_galois_with(domain, spec, &alpha)
}

/// [`check_galois`] against a caller-supplied abstraction function.
pub fn check_galois_with(
    domain: DomainId,
    spec: &GaloisSpec,
    alpha_fn: &dyn Fn(DomainId, &[Database]) -> Result<AbstractState>,
) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut counts = [Law::Monotone, Law::Extensive, Law::Reductive].map(|law| LawCount { law, checked: 0, passed: 0 });
    let mut first_failure: Option<Failure> = None;
    let mut record =
        |counts: &mut [LawCount; 3], law: Law, ok: bool, state: &AbstractState, set: &[Database], detail: &dyn Fn() -> String| {
            let slot = &mut counts[law as usize];
            slot.checked += 1;
            if ok {
                slot.passed += 1;
            } else if first_failure.is_none() {
                first_failure = Some(Failure {
                    kind: FailureKind::Law(law),
                    state: Some(state.clone()),
                    set: set.to_vec(),
                    label: None,
                    detail: detail(),
                });
            }
        };
    let leq = |x: &AbstractState, y: &AbstractState| state_leq(x, y).unwrap_or(false);
    for _ in 0..spec.samples {
        let constants = sample::constants(rng.gen_range(1..=spec.max_constants));
        let preds = sample::vocabulary(&mut rng, spec.max_predicates, spec.max_arity);
        let set = sample::database_set(&mut rng, &preds, &constants, spec.max_set, spec.max_atoms);
        let Ok(a) = alpha_fn(domain, &set) else { continue };

        for d in &set {
            record(&mut counts, Law::Extensive, gamma_contains(&a, d), &a, &set, &|| format!("{d} is not in the concretization"));
        }

        let mut bigger = set.clone();
        for _ in 0..rng.gen_range(1..=2) {
            bigger.push(sample::database(&mut rng, &preds, &constants, spec.max_atoms));
        }
        if let Ok(b) = alpha_fn(domain, &bigger) {
            record(&mut counts, Law::Monotone, leq(&a, &b), &a, &bigger, &|| format!("abstraction of the superset is {b}"));
        }
        let subset: Vec<Database> = set.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        if let Ok(s) = alpha_fn(domain, &subset) {
            record(&mut counts, Law::Monotone, leq(&s, &a), &a, &subset, &|| format!("abstraction of the subset is {s}"));
        }

        let base = a.lower().map_or(1, Instance::len);
        let pool = ConstantPool::new(constants.iter().cloned(), 0);
        let pred_set: BTreeSet<Predicate> = preds.iter().cloned().collect();
        let concretization = gamma_enumerate_over(&a, &pred_set, &pool, base + spec.gamma_slack);
        if let Ok(back) = alpha_fn(domain, &concretization) {
            record(&mut counts, Law::Reductive, leq(&back, &a), &a, &[], &|| {
                format!("abstraction of {} concretized databases is {back}", concretization.len())
            });
        }
    }
    let verdict = match first_failure {
        None => Verdict::Holds,
        Some(f) => Verdict::FailsAt(f),
    };
    CheckReport { verdict, explored_depth: 0, samples: spec.samples, laws: counts.to_vec() }
}
