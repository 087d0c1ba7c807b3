//! Readers for `.dms` system files and `.set` database lists.

use std::collections::BTreeSet;

use dms_core::{validate, Action, Atom, Database, Diagnostic, DmsSystem, Guard, Instance, Name, Predicate, Term, Vocabulary};
use thiserror::Error;

use crate::lex::{tokenize, Pos, Tok};
use crate::Spec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("{pos}: expected {expected}, found {found}")]
    Syntax { pos: Pos, expected: String, found: String },
    #[error("{pos}: {message}")]
    Invalid { pos: Pos, message: String },
    #[error("{}", list(.0))]
    Semantic(Vec<Diagnostic>),
}

fn list(diags: &[Diagnostic]) -> String {
    diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

impl SpecError {
    pub fn pos(&self) -> Option<Pos> {
        match self {
            SpecError::Syntax { pos, .. } | SpecError::Invalid { pos, .. } => Some(*pos),
            SpecError::Semantic(_) => None,
        }
    }
}

const KEYWORDS: [&str; 5] = ["true", "exists", "forall", "del", "add"];

/// Constants are capitalised or digit-led; everything else is a variable.
fn is_constant_name(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_uppercase() || c.is_ascii_digit())
}

struct Line {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Line {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn fail<T>(&self, expected: impl Into<String>) -> Result<T, SpecError> {
        Err(SpecError::Syntax { pos: self.pos(), expected: expected.into(), found: self.peek().to_string() })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), SpecError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.fail(tok.to_string())
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn end(&mut self) -> Result<(), SpecError> {
        self.expect(Tok::End)
    }

    /// A user identifier; names starting with `_` are reserved.
    fn ident(&mut self, what: &str) -> Result<(String, Pos), SpecError> {
        match self.peek().clone() {
            Tok::Ident(s) if s.starts_with('_') => Err(SpecError::Syntax {
                pos: self.pos(),
                expected: format!("{what} not starting with `_`"),
                found: format!("`{s}`"),
            }),
            Tok::Ident(s) => Ok((s, self.bump().1)),
            _ => self.fail(what),
        }
    }

    fn term(&mut self) -> Result<Term, SpecError> {
        if let Tok::Number(n) = self.peek() {
            let c = Term::constant(n.to_string());
            self.bump();
            return Ok(c);
        }
        if matches!(self.peek(), Tok::Ident(s) if KEYWORDS.contains(&s.as_str())) {
            return self.fail("a term");
        }
        let (s, _) = self.ident("a term")?;
        Ok(if is_constant_name(&s) { Term::constant(s) } else { Term::var(s) })
    }

    fn atom(&mut self) -> Result<Atom, SpecError> {
        if matches!(self.peek(), Tok::Ident(s) if KEYWORDS.contains(&s.as_str())) {
            return self.fail("an atom");
        }
        let (pred, _) = self.ident("an atom")?;
        self.expect(Tok::LParen)?;
        let mut terms = Vec::new();
        if *self.peek() != Tok::RParen {
            terms.push(self.term()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                terms.push(self.term()?);
            }
        }
        self.expect(Tok::RParen)?;
        Ok(Atom::from_parts(pred, terms))
    }

    fn atoms(&mut self) -> Result<Vec<Atom>, SpecError> {
        let mut out = vec![self.atom()?];
        while *self.peek() == Tok::Comma {
            self.bump();
            out.push(self.atom()?);
        }
        Ok(out)
    }

    /// Ground atoms, optionally wrapped in braces; `{}` is the empty database.
    fn database(&mut self) -> Result<Database, SpecError> {
        let braced = *self.peek() == Tok::LBrace;
        if braced {
            self.bump();
        }
        let mut atoms = Vec::new();
        if !matches!(self.peek(), Tok::RBrace | Tok::End) {
            let pos = self.pos();
            atoms = self.atoms()?;
            if let Some(v) = atoms.iter().flat_map(Atom::vars).next() {
                return Err(SpecError::Invalid { pos, message: format!("database atoms must be ground, `{v}` is a variable") });
            }
        }
        if braced {
            self.expect(Tok::RBrace)?;
        }
        Ok(Database::new(atoms).expect("atoms checked ground"))
    }

    fn guard(&mut self) -> Result<Guard, SpecError> {
        let mut g = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            g = Guard::and(g, rhs);
        }
        Ok(g)
    }

    fn unary(&mut self) -> Result<Guard, SpecError> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(Guard::not(self.unary()?))
            }
            Tok::LParen => {
                self.bump();
                let g = self.guard()?;
                self.expect(Tok::RParen)?;
                Ok(g)
            }
            Tok::Ident(s) if s == "true" => {
                self.bump();
                Ok(Guard::True)
            }
            Tok::Ident(s) if s == "exists" || s == "forall" => self.quantified(),
            Tok::Ident(_) if *self.peek2() == Tok::LParen => Ok(Guard::Atom(self.atom()?)),
            Tok::Ident(_) | Tok::Number(_) => {
                let lhs = self.term()?;
                let negated = match self.peek() {
                    Tok::Eq => false,
                    Tok::Neq => true,
                    _ => return self.fail("`=`, `!=` or `(`"),
                };
                self.bump();
                let eq = Guard::Eq(lhs, self.term()?);
                Ok(if negated { Guard::not(eq) } else { eq })
            }
            _ => self.fail("a guard"),
        }
    }

    /// `exists v… . body` or `forall v… . body`; the body extends as far right as possible.
    fn quantified(&mut self) -> Result<Guard, SpecError> {
        let (Tok::Ident(kw), _) = self.bump() else { unreachable!("called on a quantifier") };
        let mut vars = Vec::new();
        while let Tok::Ident(s) = self.peek() {
            if is_constant_name(s) || KEYWORDS.contains(&s.as_str()) {
                return self.fail("a variable");
            }
            let (v, _) = self.ident("a variable")?;
            vars.push(Name::from(v));
        }
        if vars.is_empty() {
            return self.fail("a variable");
        }
        self.expect(Tok::Dot)?;
        let body = self.guard()?;
        Ok(if kw == "exists" { Guard::exists_all(vars, body) } else { Guard::not(Guard::exists_all(vars, Guard::not(body))) })
    }
}

fn lines(text: &str) -> impl Iterator<Item = Result<Line, SpecError>> + '_ {
    text.lines().enumerate().filter_map(|(i, l)| match tokenize(i + 1, l) {
        Ok(toks) if toks.len() == 1 => None,
        Ok(toks) => Some(Ok(Line { toks, at: 0 })),
        Err((pos, message)) => Some(Err(SpecError::Invalid { pos, message })),
    })
}

fn end_of_input(text: &str) -> Pos {
    Pos { line: text.lines().count().max(1), col: text.lines().last().map_or(0, |l| l.chars().count()) + 1 }
}

/// Parses a `.dms` file and validates the resulting system.
pub fn parse_spec(text: &str) -> Result<Spec, SpecError> {
    let mut vocabulary = Vocabulary::new();
    let mut constants: Vec<Name> = Vec::new();
    let mut initial: Vec<Atom> = Vec::new();
    let mut guards: Vec<(Name, Guard)> = Vec::new();
    let mut actions: Vec<Action> = Vec::new();
    let mut targets: Vec<(Name, Pos)> = Vec::new();
    let mut declarations = 0;

    for line in lines(text) {
        let mut line = line?;
        declarations += 1;
        let kw = match line.peek() {
            Tok::Ident(s) => s.clone(),
            _ => return line.fail("a declaration (pred, const, init, guard, action or target)"),
        };
        match kw.as_str() {
            "pred" => {
                line.bump();
                loop {
                    let (name, pos) = line.ident("a predicate name")?;
                    line.expect(Tok::Slash)?;
                    let Tok::Number(arity) = *line.peek() else { return line.fail("an arity") };
                    line.bump();
                    vocabulary.declare(&Predicate::new(name.as_str(), arity)).map_err(|_| SpecError::Invalid {
                        pos,
                        message: format!("predicate {name} redeclared with arity {arity}"),
                    })?;
                    if *line.peek() != Tok::Comma {
                        break;
                    }
                    line.bump();
                }
            }
            "const" => {
                line.bump();
                loop {
                    match line.term()? {
                        Term::Const(c) => constants.push(c),
                        _ => {
                            return Err(SpecError::Syntax {
                                pos: line.toks[line.at - 1].1,
                                expected: "a constant".into(),
                                found: "a variable".into(),
                            })
                        }
                    }
                    if *line.peek() == Tok::Comma {
                        line.bump();
                    }
                    if *line.peek() == Tok::End {
                        break;
                    }
                }
            }
            "init" => {
                line.bump();
                initial.extend(line.database()?.iter().cloned());
            }
            "guard" => {
                line.bump();
                let (name, pos) = line.ident("a guard name")?;
                line.expect(Tok::Assign)?;
                let g = line.guard()?;
                if guards.iter().any(|(n, _)| n.as_ref() == name) {
                    return Err(SpecError::Invalid { pos, message: format!("guard {name} is defined twice") });
                }
                guards.push((name.into(), g));
            }
            "action" => {
                line.bump();
                let (name, _) = line.ident("an action name")?;
                line.expect(Tok::Assign)?;
                if !line.at_keyword("guard") {
                    return line.fail("`guard`");
                }
                line.bump();
                let named = matches!(line.peek(), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()))
                    && (matches!(line.peek2(), Tok::End) || matches!(line.peek2(), Tok::Ident(s) if s == "del" || s == "add"));
                let guard = if named {
                    let (g, pos) = line.ident("a guard name")?;
                    match guards.iter().find(|(n, _)| n.as_ref() == g) {
                        Some((_, body)) => body.clone(),
                        None => return Err(SpecError::Invalid { pos, message: format!("guard {g} is not defined") }),
                    }
                } else {
                    line.guard()?
                };
                let (mut del, mut add) = (None, None);
                while *line.peek() != Tok::End {
                    let slot = if line.at_keyword("del") && del.is_none() {
                        &mut del
                    } else if line.at_keyword("add") && add.is_none() {
                        &mut add
                    } else {
                        return line.fail(match (del.is_none(), add.is_none()) {
                            (true, true) => "`&`, `del`, `add` or end of line",
                            (true, false) => "`del` or end of line",
                            (false, true) => "`add` or end of line",
                            (false, false) => "end of line",
                        });
                    };
                    line.bump();
                    *slot = Some(line.atoms()?);
                }
                actions.push(Action::new(name, guard, del.unwrap_or_default(), add.unwrap_or_default()));
            }
            "target" => {
                line.bump();
                let (name, pos) = line.ident("an action name")?;
                targets.push((name.into(), pos));
            }
            _ => return line.fail("a declaration (pred, const, init, guard, action or target)"),
        }
        line.end()?;
    }

    if declarations == 0 {
        return Err(SpecError::Syntax {
            pos: end_of_input(text),
            expected: "a declaration".into(),
            found: "end of input".into(),
        });
    }
    for (t, pos) in &targets {
        if !actions.iter().any(|a| a.name() == t) {
            return Err(SpecError::Invalid { pos: *pos, message: format!("target {t} is not a declared action") });
        }
    }
    let mut seen = BTreeSet::new();
    constants.retain(|c| seen.insert(c.clone()));
    let initial = Instance::new(initial).expect("ground atoms");
    let system = DmsSystem::new(initial, actions, vocabulary);
    let diagnostics = validate(&system);
    if !diagnostics.is_empty() {
        return Err(SpecError::Semantic(diagnostics));
    }
    Ok(Spec { system, constants, guards, targets: targets.into_iter().map(|(t, _)| t).collect() })
}

/// Parses a `.set` file: one database per line, `{}` for the empty one.
///
/// With a vocabulary, atoms are checked against the declared arities.
pub fn parse_set(text: &str, vocabulary: Option<&Vocabulary>) -> Result<Vec<Database>, SpecError> {
    let mut out = Vec::new();
    for line in lines(text) {
        let mut line = line?;
        let pos = line.pos();
        let d = line.database()?;
        line.end()?;
        if let Some(voc) = vocabulary {
            for a in d.iter() {
                if !voc.contains(a.predicate()) {
                    return Err(SpecError::Invalid { pos, message: format!("{a} does not match the declared predicates") });
                }
            }
        }
        out.push(d);
    }
    if out.is_empty() {
        return Err(SpecError::Syntax { pos: end_of_input(text), expected: "a database".into(), found: "end of input".into() });
    }
    Ok(out)
}

/// Parses a single guard, e.g. for command-line arguments or tests.
pub fn parse_guard(text: &str) -> Result<Guard, SpecError> {
    let mut line = match lines(text).next() {
        Some(line) => line?,
        None => {
            return Err(SpecError::Syntax { pos: end_of_input(text), expected: "a guard".into(), found: "end of input".into() })
        }
    };
    let g = line.guard()?;
    line.end()?;
    Ok(g)
}
