//! Text format and exporters for data-manipulating systems.
//!
//! A `.dms` file is line oriented:
//!
//! ```text
//! pred P/1, F/2
//! const A B C
//! init P(A), P(B), F(A,B)
//! guard g_df := F(x,y) & !F(y,x)
//! action a_rev := guard g_df del F(x,y) add F(y,x)
//! action a_add := guard true add P(x)
//! target a_rev
//! ```
//!
//! Capitalised or digit-led identifiers are constants, all others are
//! variables. Identifiers starting with `_` are reserved for fresh constants
//! and labeled nulls.
//!
//! ```
//! let spec = dms::parse_spec("pred F/2\ninit F(A,B)\naction flip := guard F(x,y) del F(x,y) add F(y,x)").unwrap();
//! assert_eq!(spec.system.actions().len(), 1);
//! assert_eq!(dms::parse_spec(&dms::render(&spec)).unwrap(), spec);
//! ```

mod lex;
mod parse;

use std::fmt::Write as _;

use dms_core::{ConstantPool, DmsSystem, Guard, Lts, Name, State};

pub use lex::Pos;
pub use parse::{parse_guard, parse_set, parse_spec, SpecError};

/// A parsed `.dms` file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spec {
    pub system: DmsSystem,
    /// The `const` declarations, in order of appearance.
    pub constants: Vec<Name>,
    /// Named guards; actions hold their own copy of the formula.
    pub guards: Vec<(Name, Guard)>,
    pub targets: Vec<Name>,
}

impl Spec {
    pub fn pool(&self, fresh: usize) -> ConstantPool {
        ConstantPool::new(self.constants.iter().cloned(), fresh)
    }
}

/// Prints `spec` in the `.dms` syntax; [`parse_spec`] reads it back unchanged.
pub fn render(spec: &Spec) -> String {
    let mut out = String::new();
    let sys = &spec.system;
    for p in sys.vocabulary().iter() {
        writeln!(out, "pred {p}").unwrap();
    }
    if !spec.constants.is_empty() {
        writeln!(out, "const {}", spec.constants.iter().map(|c| c.as_ref()).collect::<Vec<_>>().join(" ")).unwrap();
    }
    if !sys.initial().is_empty() {
        writeln!(out, "init {}", sys.initial().iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")).unwrap();
    }
    for (name, g) in &spec.guards {
        writeln!(out, "guard {name} := {g}").unwrap();
    }
    for act in sys.actions() {
        writeln!(out, "action {act}").unwrap();
    }
    for t in &spec.targets {
        writeln!(out, "target {t}").unwrap();
    }
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering of an explored system; the initial state is drawn bold.
pub fn to_dot(lts: &Lts<State>) -> String {
    let mut out = String::from("digraph lts {\n  node [shape=box, fontname=\"monospace\"];\n");
    for (i, s) in lts.states().iter().enumerate() {
        let style = if i == lts.initial() { ", style=bold" } else { "" };
        writeln!(out, "  s{i} [label=\"{}\"{style}];", dot_escape(&s.to_string())).unwrap();
    }
    for t in lts.transitions() {
        writeln!(out, "  s{} -> s{} [label=\"{}\"];", t.from, t.to, dot_escape(&t.label.to_string())).unwrap();
    }
    out.push_str("}\n");
    out
}

/// The full LTS as pretty-printed JSON.
pub fn to_json(lts: &Lts<State>) -> String {
    serde_json::to_string_pretty(lts).expect("LTS values serialize")
}
