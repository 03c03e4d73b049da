//! Line-oriented parsers for theory files and ground literals.
//!
//! Theory file grammar, one formula per line (`#` starts a comment):
//!
//! ```text
//! formula := prefix* matrix
//! prefix  := ("forall" | "exists") VAR ("," VAR)* ":"
//! matrix  := imp ("<->" imp)?
//! imp     := or ("->" imp)?
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "!" unary | "(" matrix ")" | atom
//! atom    := IDENT ("(" term ("," term)* ")")?
//! ```

use crate::error::{Error, Result};
use crate::logic::syntax::{
    is_variable_name, Atom, Formula, GroundAtom, GroundLiteral, Matrix, Quantifier, Term, Theory,
};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Colon,
    Dot,
    And,
    Or,
    Not,
    Arrow,
    DArrow,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Dot => "`.`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Not => "`!`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::DArrow => "`<->`".into(),
        }
    }
}

/// Strips a `#` comment.
pub(crate) fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Tokenises one line. Columns are 1-based character positions.
pub(crate) fn lex(text: &str, line: usize) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let tok = match c {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            ':' => Tok::Colon,
            '.' => Tok::Dot,
            '&' => Tok::And,
            '|' => Tok::Or,
            '!' => Tok::Not,
            '-' if chars.get(i + 1) == Some(&'>') => {
                i += 1;
                Tok::Arrow
            }
            '<' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                i += 2;
                Tok::DArrow
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i + 1 < chars.len()
                    && (chars[i + 1].is_ascii_alphanumeric() || chars[i + 1] == '_')
                {
                    i += 1;
                }
                Tok::Ident(chars[start..=i].iter().collect())
            }
            other => return Err(syntax(line, col, format!("unexpected character `{other}`"))),
        };
        out.push((tok, col));
        i += 1;
    }
    Ok(out)
}

/// Cursor over the tokens of a single line.
pub(crate) struct Cursor {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    line: usize,
    end_col: usize,
}

impl Cursor {
    pub(crate) fn new(text: &str, line: usize) -> Result<Self> {
        Ok(Cursor {
            toks: lex(text, line)?,
            pos: 0,
            line,
            end_col: text.chars().count() + 1,
        })
    }

    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(_, c)| *c)
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> Error {
        syntax(self.line, self.col(), message)
    }

    pub(crate) fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, tok: &Tok) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    pub(crate) fn unexpected(&self, wanted: &str) -> Error {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {}", t.describe())),
            None => self.error(format!("expected {wanted}, found end of line")),
        }
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub(crate) fn expect_end(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.unexpected("end of line"))
        }
    }

    pub(crate) fn ident(&mut self, wanted: &str) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    /// Parses `IDENT ("(" term ("," term)* ")")?` into a predicate name and terms.
    pub(crate) fn atom(&mut self) -> Result<Atom> {
        let name = self.ident("a predicate name")?;
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) {
            if !self.eat(&Tok::RParen) {
                loop {
                    let t = self.ident("a term")?;
                    if is_variable_name(&t) {
                        args.push(Term::Var(t));
                    } else {
                        args.push(Term::Const(t));
                    }
                    if self.eat(&Tok::RParen) {
                        break;
                    }
                    self.expect(&Tok::Comma)?;
                }
            }
        }
        Ok(Atom {
            predicate: name,
            args,
        })
    }

    /// Parses an optionally negated ground atom.
    pub(crate) fn ground_literal(&mut self) -> Result<GroundLiteral> {
        let positive = !self.eat(&Tok::Not);
        let col = self.col();
        let atom = self.atom()?;
        match atom.to_ground() {
            Some(g) => Ok(GroundLiteral::new(g, positive)),
            None => Err(syntax(
                self.line,
                col,
                format!("`{atom}` is not ground (variables start with an uppercase letter)"),
            )),
        }
    }
}

fn is_quantifier(tok: Option<&Tok>) -> Option<Quantifier> {
    match tok {
        Some(Tok::Ident(s)) if s == "forall" => Some(Quantifier::Forall),
        Some(Tok::Ident(s)) if s == "exists" => Some(Quantifier::Exists),
        _ => None,
    }
}

fn parse_matrix(c: &mut Cursor) -> Result<Matrix> {
    let left = parse_implication(c)?;
    if c.eat(&Tok::DArrow) {
        let right = parse_implication(c)?;
        return Ok(Matrix::iff(left, right));
    }
    Ok(left)
}

fn parse_implication(c: &mut Cursor) -> Result<Matrix> {
    let left = parse_disjunction(c)?;
    if c.eat(&Tok::Arrow) {
        let right = parse_implication(c)?;
        return Ok(Matrix::implies(left, right));
    }
    Ok(left)
}

fn parse_disjunction(c: &mut Cursor) -> Result<Matrix> {
    let mut items = vec![parse_conjunction(c)?];
    while c.eat(&Tok::Or) {
        items.push(parse_conjunction(c)?);
    }
    Ok(if items.len() == 1 {
        items.pop().unwrap()
    } else {
        Matrix::Or(items)
    })
}

fn parse_conjunction(c: &mut Cursor) -> Result<Matrix> {
    let mut items = vec![parse_unary(c)?];
    while c.eat(&Tok::And) {
        items.push(parse_unary(c)?);
    }
    Ok(if items.len() == 1 {
        items.pop().unwrap()
    } else {
        Matrix::And(items)
    })
}

fn parse_unary(c: &mut Cursor) -> Result<Matrix> {
    if c.eat(&Tok::Not) {
        return Ok(Matrix::not(parse_unary(c)?));
    }
    if c.eat(&Tok::LParen) {
        let m = parse_matrix(c)?;
        c.expect(&Tok::RParen)?;
        return Ok(m);
    }
    if is_quantifier(c.peek()).is_some() {
        return Err(c.error("quantifier inside the matrix; formulas must be in prenex form"));
    }
    Ok(Matrix::Atom(c.atom()?))
}

fn parse_formula_line(text: &str, line: usize) -> Result<Formula> {
    let mut c = Cursor::new(text, line)?;
    let mut prefix = Vec::new();
    while let Some(q) = is_quantifier(c.peek()) {
        c.next();
        loop {
            let v = c.ident("a variable")?;
            if !is_variable_name(&v) {
                return Err(syntax(
                    line,
                    c.col().saturating_sub(v.len()),
                    format!("`{v}` is not a variable (variables start with an uppercase letter)"),
                ));
            }
            prefix.push((q, v));
            if !c.eat(&Tok::Comma) {
                break;
            }
        }
        c.expect(&Tok::Colon)?;
    }
    let matrix = parse_matrix(&mut c)?;
    c.expect_end()?;
    Formula::new(prefix, matrix)
}

/// Options for [`parse_theory_with`].
#[derive(Debug, Clone, Copy, Default)]
pub struct TheoryOptions {
    /// Reject formulas mentioning constants.
    pub require_constant_free: bool,
}

/// Parses a theory file (one prenex formula per line).
pub fn parse_theory(text: &str) -> Result<Theory> {
    parse_theory_with(text, TheoryOptions::default())
}

pub fn parse_theory_with(text: &str, opts: TheoryOptions) -> Result<Theory> {
    let mut formulas = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = strip_comment(raw);
        if body.trim().is_empty() {
            continue;
        }
        let f = parse_formula_line(body, i + 1)?;
        if opts.require_constant_free {
            if let Some(c) = f.constants().into_iter().next() {
                return Err(Error::ConstantNotAllowed(c));
            }
        }
        formulas.push(f);
    }
    Theory::new(formulas)
}

/// Parses a single formula.
pub fn parse_formula(text: &str) -> Result<Formula> {
    parse_formula_line(strip_comment(text), 1)
}

/// Parses `p(a,b)` or `!p(a,b)`, with an optional trailing `.`.
pub fn parse_ground_literal(text: &str) -> Result<GroundLiteral> {
    let mut c = Cursor::new(text, 1)?;
    let l = c.ground_literal()?;
    c.eat(&Tok::Dot);
    c.expect_end()?;
    Ok(l)
}

/// Convenience for building ground atoms in code.
pub fn ground_atom(text: &str) -> Result<GroundAtom> {
    GroundAtom::parse(text)
}
