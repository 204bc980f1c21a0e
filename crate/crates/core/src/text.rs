//! Plain-text rule syntax.
//!
//! ```text
//! % comment
//! #universe 4.
//! #atoms a b c d.
//! a :- not b, c.
//! b.
//! ```
//!
//! `#universe N.` fixes the number of atoms (isolated atoms matter for the
//! semantics). `#atoms ...` pins the index of each name; without it atoms are
//! numbered in order of first appearance. A text whose atoms are all written
//! `_<index>` and that has no `#atoms` line is read positionally and yields
//! an unnamed program, which is how unnamed programs are written back.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::{Atom, Program, Rule};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    If,
    Comma,
    Dot,
    Directive(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn syntax<T>(line: usize, col: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Syntax {
        line,
        column: col,
        message: message.into(),
    })
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (lno, col) = (li + 1, i + 1);
            let tok = match c {
                '%' => break,
                c if c.is_whitespace() => {
                    i += 1;
                    continue;
                }
                ',' => {
                    i += 1;
                    Tok::Comma
                }
                '.' => {
                    i += 1;
                    Tok::Dot
                }
                ':' if chars.get(i + 1) == Some(&'-') => {
                    i += 2;
                    Tok::If
                }
                '#' => {
                    let start = i + 1;
                    i = start;
                    while i < chars.len() && chars[i].is_ascii_alphabetic() {
                        i += 1;
                    }
                    Tok::Directive(chars[start..i].iter().collect())
                }
                c if c.is_ascii_digit() => {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let s: String = chars[start..i].iter().collect();
                    match s.parse() {
                        Ok(v) => Tok::Int(v),
                        Err(_) => return syntax(lno, col, format!("integer {s} is too large")),
                    }
                }
                c if c.is_ascii_alphabetic() || c == '_' => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    Tok::Ident(chars[start..i].iter().collect())
                }
                other => return syntax(lno, col, format!("unexpected character {other:?}")),
            };
            out.push(Spanned { tok, line: lno, col });
        }
    }
    Ok(out)
}

struct RawRule {
    head: String,
    body: Vec<(bool, String, usize, usize)>,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Spanned> {
        self.toks.get(self.pos)
    }

    fn end_pos(&self) -> (usize, usize) {
        self.toks.last().map_or((1, 1), |t| (t.line, t.col + 1))
    }

    fn next(&mut self, what: &str) -> Result<Spanned> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => {
                let (l, c) = self.end_pos();
                syntax(l, c, format!("unexpected end of input, expected {what}"))
            }
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        let t = self.next(what)?;
        if t.tok != tok {
            return syntax(t.line, t.col, format!("expected {what}"));
        }
        Ok(())
    }

    fn atom(&mut self) -> Result<(String, usize, usize)> {
        let t = self.next("an atom")?;
        match t.tok {
            Tok::Ident(s) if s != "not" => Ok((s, t.line, t.col)),
            _ => syntax(t.line, t.col, "expected an atom"),
        }
    }
}

fn positional_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('_')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if digits.len() > 1 && digits.starts_with('0') {
        return None;
    }
    digits.parse().ok()
}

/// Parses rule text into a program.
pub fn parse_program(text: &str) -> Result<Program> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let mut universe: Option<usize> = None;
    let mut declared: Option<Vec<(String, usize, usize)>> = None;
    let mut raw = Vec::new();

    while let Some(t) = p.peek().cloned() {
        if let Tok::Directive(name) = &t.tok {
            p.pos += 1;
            match name.as_str() {
                "universe" => {
                    let v = p.next("an integer")?;
                    let Tok::Int(n) = v.tok else {
                        return syntax(v.line, v.col, "expected an integer");
                    };
                    if universe.is_some() {
                        return syntax(t.line, t.col, "duplicate #universe directive");
                    }
                    universe = Some(n as usize);
                    p.expect(Tok::Dot, "'.'")?;
                }
                "atoms" => {
                    if declared.is_some() {
                        return syntax(t.line, t.col, "duplicate #atoms directive");
                    }
                    let mut names = Vec::new();
                    while !matches!(p.peek().map(|s| &s.tok), Some(Tok::Dot) | None) {
                        names.push(p.atom()?);
                    }
                    p.expect(Tok::Dot, "'.'")?;
                    declared = Some(names);
                }
                other => return syntax(t.line, t.col, format!("unknown directive #{other}")),
            }
            continue;
        }
        let (head, _, _) = p.atom()?;
        let mut body = Vec::new();
        let sep = p.next("':-' or '.'")?;
        match sep.tok {
            Tok::Dot => {}
            Tok::If => loop {
                let lit = p.next("a body literal")?;
                match lit.tok {
                    Tok::Ident(ref s) if s == "not" => {
                        let (a, l, c) = p.atom()?;
                        body.push((false, a, l, c));
                    }
                    Tok::Ident(s) => body.push((true, s, lit.line, lit.col)),
                    _ => return syntax(lit.line, lit.col, "expected a body literal"),
                }
                let punct = p.next("',' or '.'")?;
                match punct.tok {
                    Tok::Comma => continue,
                    Tok::Dot => break,
                    _ => return syntax(punct.line, punct.col, "expected ',' or '.'"),
                }
            },
            _ => return syntax(sep.line, sep.col, "expected ':-' or '.'"),
        }
        raw.push(RawRule { head, body });
    }

    let all_names = || {
        raw.iter()
            .flat_map(|r| std::iter::once(&r.head).chain(r.body.iter().map(|b| &b.1)))
    };
    let positional = declared.is_none() && all_names().all(|s| positional_index(s).is_some());

    let mut index: HashMap<String, usize> = HashMap::new();
    let mut names: Vec<String> = Vec::new();
    if let Some(decl) = &declared {
        for (s, l, c) in decl {
            if index.insert(s.clone(), names.len()).is_some() {
                return syntax(*l, *c, format!("atom {s} declared twice"));
            }
            names.push(s.clone());
        }
    }
    let mut seen = 0usize;
    let mut resolve = |s: &str| -> usize {
        if positional {
            let i = positional_index(s).expect("checked positional");
            seen = seen.max(i + 1);
            i
        } else {
            *index.entry(s.to_string()).or_insert_with(|| {
                names.push(s.to_string());
                names.len() - 1
            })
        }
    };

    let mut rules = Vec::with_capacity(raw.len());
    for r in &raw {
        let head = resolve(&r.head);
        let mut pos_b = Vec::new();
        let mut neg_b = Vec::new();
        let mut used: Vec<usize> = Vec::new();
        for (positive, s, l, c) in &r.body {
            let a = resolve(s);
            if used.contains(&a) {
                return syntax(*l, *c, format!("atom {s} occurs twice in the body of this rule"));
            }
            used.push(a);
            if *positive {
                pos_b.push(Atom::from(a));
            } else {
                neg_b.push(Atom::from(a));
            }
        }
        rules.push(Rule::new(Atom::from(head), pos_b, neg_b)?);
    }

    let n = if positional {
        seen.max(universe.unwrap_or(0))
    } else {
        let n = names.len().max(universe.unwrap_or(0));
        while names.len() < n {
            names.push(format!("_{}", names.len()));
        }
        n
    };
    let program = Program::new(n, rules)?;
    if positional {
        Ok(program)
    } else {
        program.with_symbols(names)
    }
}

/// Canonical text: `#universe`, then `#atoms` for named programs, then one
/// rule per line in program order.
pub fn format_program(p: &Program) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "#universe {}.", p.universe());
    if let Some(names) = p.symbols() {
        if !names.is_empty() {
            let _ = writeln!(out, "#atoms {}.", names.join(" "));
        }
    }
    for r in p.rules() {
        out.push_str(&p.atom_name(r.head()));
        let body: Vec<String> = r
            .pos_body()
            .iter()
            .map(|&a| p.atom_name(a))
            .chain(r.neg_body().iter().map(|&a| format!("not {}", p.atom_name(a))))
            .collect();
        if !body.is_empty() {
            out.push_str(" :- ");
            out.push_str(&body.join(", "));
        }
        out.push_str(".\n");
    }
    out
}

/// Resolves a comma-separated list of atom names against `p`.
pub fn parse_atom_list(p: &Program, list: &str) -> Result<Vec<Atom>> {
    let mut atoms = Vec::new();
    for raw in list.split(',') {
        let name = raw.trim();
        if name.is_empty() {
            continue;
        }
        let idx = match p.symbols() {
            Some(names) => names.iter().position(|s| s == name),
            None => positional_index(name).filter(|&i| i < p.universe()),
        };
        match idx {
            Some(i) => atoms.push(Atom::from(i)),
            None => {
                return Err(Error::InvalidArgument(format!(
                    "unknown atom {name:?}"
                )))
            }
        }
    }
    Ok(atoms)
}
