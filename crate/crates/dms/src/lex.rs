//! Line-oriented tokenizer shared by the `.dms` and `.set` readers.

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Number(usize),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Slash,
    Amp,
    Bang,
    Eq,
    Neq,
    Assign,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Number(n) => write!(f, "`{n}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Slash => f.write_str("`/`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Neq => f.write_str("`!=`"),
            Tok::Assign => f.write_str("`:=`"),
            Tok::End => f.write_str("end of line"),
        }
    }
}

/// 1-based source position.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// Tokens of one line; the last one is always [`Tok::End`]. `#` starts a comment.
pub(crate) fn tokenize(line_no: usize, line: &str) -> Result<Vec<(Tok, Pos)>, (Pos, String)> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = line.char_indices().collect();
    let mut i = 0;
    let col = |i: usize| Pos { line: line_no, col: line[..chars.get(i).map_or(line.len(), |c| c.0)].chars().count() + 1 };
    while i < chars.len() {
        let (_, c) = chars[i];
        let pos = col(i);
        let single = match c {
            '#' => break,
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            '/' => Some(Tok::Slash),
            '&' => Some(Tok::Amp),
            '=' => Some(Tok::Eq),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, pos));
            i += 1;
            continue;
        }
        let next = chars.get(i + 1).map(|c| c.1);
        match c {
            '!' if next == Some('=') => {
                out.push((Tok::Neq, pos));
                i += 2;
            }
            '!' => {
                out.push((Tok::Bang, pos));
                i += 1;
            }
            ':' if next == Some('=') => {
                out.push((Tok::Assign, pos));
                i += 2;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].1.is_ascii_alphanumeric() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().map(|c| c.1).collect();
                // Digit-led words such as `1st` are constant names.
                match text.parse() {
                    Ok(n) => out.push((Tok::Number(n), pos)),
                    Err(_) => out.push((Tok::Ident(text), pos)),
                }
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].1.is_alphanumeric() || chars[i].1 == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().map(|c| c.1).collect()), pos));
            }
            other => return Err((pos, format!("unexpected character `{other}`"))),
        }
    }
    out.push((Tok::End, col(chars.len())));
    Ok(out)
}
