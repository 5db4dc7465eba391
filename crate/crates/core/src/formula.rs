//! Propositional formulas: AST, parser and printer.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! iff     := implies ( "<->" iff )?
//! implies := or ( "->" implies )?
//! or      := and ( "|" and )*
//! and     := unary ( "&" unary )*
//! unary   := "~" unary | atom | "true" | "false" | "(" iff ")"
//! ```

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction; `true` for an empty list.
    pub fn conjunction(parts: impl IntoIterator<Item = Formula>) -> Self {
        parts
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `false` for an empty list.
    pub fn disjunction(parts: impl IntoIterator<Item = Formula>) -> Self {
        parts
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    pub fn atoms(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(name) => {
                out.insert(name);
            }
            Formula::Not(f) => f.collect_atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Evaluates under a single assignment. Implication and biconditional
    /// are expanded into negation and disjunction.
    pub fn eval(&self, value: &impl Fn(&str) -> bool) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(name) => value(name),
            Formula::Not(f) => !f.eval(value),
            Formula::And(a, b) => a.eval(value) && b.eval(value),
            Formula::Or(a, b) => a.eval(value) || b.eval(value),
            Formula::Implies(a, b) => !a.eval(value) || b.eval(value),
            Formula::Iff(a, b) => a.eval(value) == b.eval(value),
        }
    }

    /// Nesting depth of connectives; atoms and constants have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 0,
            Formula::Not(f) => 1 + f.depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    /// All subformulas, including `self`, in pre-order.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out = vec![self];
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => {}
            Formula::Not(f) => out.extend(f.subformulas()),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                out.extend(a.subformulas());
                out.extend(b.subformulas());
            }
        }
        out
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Not(_) => 5,
            Formula::True | Formula::False | Formula::Atom(_) => 6,
        }
    }

    fn write_at(&self, out: &mut String, min_prec: u8) {
        let prec = self.precedence();
        let paren = prec < min_prec;
        if paren {
            out.push('(');
        }
        match self {
            Formula::True => out.push_str("true"),
            Formula::False => out.push_str("false"),
            Formula::Atom(name) => out.push_str(name),
            Formula::Not(f) => {
                out.push('~');
                f.write_at(out, 5);
            }
            Formula::And(a, b) => write_binary(out, a, " & ", b, prec, Assoc::Left),
            Formula::Or(a, b) => write_binary(out, a, " | ", b, prec, Assoc::Left),
            Formula::Implies(a, b) => write_binary(out, a, " -> ", b, prec, Assoc::Right),
            Formula::Iff(a, b) => write_binary(out, a, " <-> ", b, prec, Assoc::Right),
        }
        if paren {
            out.push(')');
        }
    }
}

enum Assoc {
    Left,
    Right,
}

fn write_binary(out: &mut String, a: &Formula, op: &str, b: &Formula, prec: u8, assoc: Assoc) {
    let (lp, rp) = match assoc {
        Assoc::Left => (prec, prec + 1),
        Assoc::Right => (prec + 1, prec),
    };
    a.write_at(out, lp);
    out.push_str(op);
    b.write_at(out, rp);
}

/// Prints with the minimal parentheses needed to parse back to the same tree.
pub fn render_formula(f: &Formula) -> String {
    let mut out = String::new();
    f.write_at(&mut out, 0);
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_formula(self))
    }
}

impl std::str::FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_formula(s)
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && s != "true" && s != "false"
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    True,
    False,
    Not,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
}

fn describe(tok: &Token) -> String {
    match tok {
        Token::Ident(name) => format!("atom `{name}`"),
        Token::True => "`true`".into(),
        Token::False => "`false`".into(),
        Token::Not => "`~`".into(),
        Token::And => "`&`".into(),
        Token::Or => "`|`".into(),
        Token::Implies => "`->`".into(),
        Token::Iff => "`<->`".into(),
        Token::LParen => "`(`".into(),
        Token::RParen => "`)`".into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'~' => {
                i += 1;
                Token::Not
            }
            b'&' => {
                i += 1;
                Token::And
            }
            b'|' => {
                i += 1;
                Token::Or
            }
            b'(' => {
                i += 1;
                Token::LParen
            }
            b')' => {
                i += 1;
                Token::RParen
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 2;
                Token::Implies
            }
            b'<' if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') => {
                i += 3;
                Token::Iff
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                match &text[start..i] {
                    "true" => Token::True,
                    "false" => Token::False,
                    name => Token::Ident(name.to_string()),
                }
            }
            _ => {
                let token = text[start..].chars().next().unwrap_or('?');
                return Err(Error::UnknownToken { offset: start, token });
            }
        };
        out.push((start, tok));
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            offset: self.offset(),
            message: message.into(),
        }
    }

    fn eat(&mut self, tok: &Token) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn iff(&mut self) -> Result<Formula> {
        let lhs = self.implies()?;
        if self.eat(&Token::Iff) {
            Ok(Formula::iff(lhs, self.iff()?))
        } else {
            Ok(lhs)
        }
    }

    fn implies(&mut self) -> Result<Formula> {
        let lhs = self.or()?;
        if self.eat(&Token::Implies) {
            Ok(Formula::implies(lhs, self.implies()?))
        } else {
            Ok(lhs)
        }
    }

    fn or(&mut self) -> Result<Formula> {
        let mut lhs = self.and()?;
        while self.eat(&Token::Or) {
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while self.eat(&Token::And) {
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.error("unexpected end of input"));
        };
        match tok {
            Token::Not => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Token::True => {
                self.pos += 1;
                Ok(Formula::True)
            }
            Token::False => {
                self.pos += 1;
                Ok(Formula::False)
            }
            Token::Ident(name) => {
                self.pos += 1;
                Ok(Formula::Atom(name))
            }
            Token::LParen => {
                self.pos += 1;
                let inner = self.iff()?;
                if !self.eat(&Token::RParen) {
                    return Err(self.error("expected `)`"));
                }
                Ok(inner)
            }
            other => Err(self.error(format!("unexpected {}", describe(&other)))),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<Formula> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let f = parser.iff()?;
    if let Some(tok) = parser.peek() {
        return Err(parser.error(format!("unexpected {}", describe(tok))));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(name: &str) -> Formula {
        Formula::atom(name)
    }

    #[test]
    fn parses_single_atom() {
        assert_eq!(parse_formula("p").unwrap(), a("p"));
    }

    #[test]
    fn precedence_of_negation_conjunction_implication() {
        let f = parse_formula("~p & q -> r").unwrap();
        assert_eq!(
            f,
            Formula::implies(Formula::and(Formula::not(a("p")), a("q")), a("r"))
        );
    }

    #[test]
    fn unbalanced_parenthesis_reports_offset() {
        match parse_formula("p & (q") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 6),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_token() {
        assert_eq!(
            parse_formula("p $ q"),
            Err(Error::UnknownToken { offset: 2, token: '$' })
        );
        assert!(matches!(parse_formula("p - q"), Err(Error::UnknownToken { offset: 2, .. })));
    }

    #[test]
    fn trailing_tokens_rejected() {
        assert!(matches!(parse_formula("p q"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse_formula(""), Err(Error::Syntax { offset: 0, .. })));
    }

    #[test]
    fn arrows_associate_right() {
        assert_eq!(
            parse_formula("p -> q -> r").unwrap(),
            Formula::implies(a("p"), Formula::implies(a("q"), a("r")))
        );
        assert_eq!(
            parse_formula("p <-> q <-> r").unwrap(),
            Formula::iff(a("p"), Formula::iff(a("q"), a("r")))
        );
        assert_eq!(
            parse_formula("p | q <-> r -> s").unwrap(),
            Formula::iff(Formula::or(a("p"), a("q")), Formula::implies(a("r"), a("s")))
        );
    }

    #[test]
    fn render_examples() {
        assert_eq!(render_formula(&a("p")), "p");
        assert_eq!(render_formula(&Formula::and(a("p"), Formula::not(a("q")))), "p & ~q");
        assert_eq!(
            render_formula(&Formula::implies(a("p"), Formula::implies(a("q"), a("r")))),
            "p -> q -> r"
        );
        assert_eq!(
            render_formula(&Formula::implies(Formula::implies(a("p"), a("q")), a("r"))),
            "(p -> q) -> r"
        );
        assert_eq!(
            render_formula(&Formula::and(a("p"), Formula::and(a("q"), a("r")))),
            "p & (q & r)"
        );
        assert_eq!(render_formula(&Formula::not(Formula::or(a("p"), a("q")))), "~(p | q)");
        assert_eq!(render_formula(&Formula::not(Formula::not(a("f")))), "~~f");
    }

    #[test]
    fn keywords_are_not_atoms() {
        assert_eq!(parse_formula("true & false").unwrap(), Formula::and(Formula::True, Formula::False));
        assert!(!is_identifier("true"));
        assert!(is_identifier("p_0"));
        assert!(!is_identifier("0p"));
    }
}
