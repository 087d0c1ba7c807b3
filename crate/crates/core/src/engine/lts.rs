use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::Label;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition<L> {
    pub from: usize,
    pub label: L,
    pub to: usize,
}

/// Finite labeled transition system with indexed states.
///
/// States added through [`Lts::add_successor`] remember the transition
/// that discovered them, so traces from the initial state can be replayed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Lts<S, L = Label> {
    states: Vec<S>,
    transitions: Vec<Transition<L>>,
    initial: usize,
    truncated: bool,
    depth: Vec<usize>,
    discovered_by: Vec<Option<usize>>,
}

impl<S, L: Clone + Ord> Lts<S, L> {
    pub fn new(initial: S) -> Self {
        Lts {
            states: vec![initial],
            transitions: Vec::new(),
            initial: 0,
            truncated: false,
            depth: vec![0],
            discovered_by: vec![None],
        }
    }

    /// Adds an unconnected state.
    pub fn add_state(&mut self, s: S) -> usize {
        self.states.push(s);
        self.depth.push(0);
        self.discovered_by.push(None);
        self.states.len() - 1
    }

    /// Adds a state reached from `from` along `label`.
    pub fn add_successor(&mut self, from: usize, label: L, s: S) -> usize {
        let to = self.add_state(s);
        self.depth[to] = self.depth[from] + 1;
        self.discovered_by[to] = Some(self.transitions.len());
        self.transitions.push(Transition { from, label, to });
        to
    }

    pub fn add_transition(&mut self, from: usize, label: L, to: usize) {
        assert!(from < self.states.len() && to < self.states.len(), "transition between unknown states");
        self.transitions.push(Transition { from, label, to });
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &S {
        &self.states[i]
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn transitions(&self) -> &[Transition<L>] {
        &self.transitions
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub(crate) fn set_truncated(&mut self) {
        self.truncated = true;
    }

    /// BFS depth at which the state was first reached.
    pub fn depth(&self, i: usize) -> usize {
        self.depth[i]
    }

    pub fn labels(&self) -> BTreeSet<L> {
        self.transitions.iter().map(|t| t.label.clone()).collect()
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = (&L, usize)> + '_ {
        self.transitions.iter().filter(move |t| t.from == i).map(|t| (&t.label, t.to))
    }

    /// Labels along the discovery path from the initial state to `i`.
    pub fn trace_to(&self, mut i: usize) -> Vec<L> {
        let mut out = Vec::new();
        while let Some(t) = self.discovered_by[i] {
            out.push(self.transitions[t].label.clone());
            i = self.transitions[t].from;
        }
        out.reverse();
        out
    }

    /// Successor lists indexed by state.
    pub fn adjacency(&self) -> Vec<Vec<(&L, usize)>> {
        let mut out = vec![Vec::new(); self.states.len()];
        for t in &self.transitions {
            out[t.from].push((&t.label, t.to));
        }
        out
    }
}
