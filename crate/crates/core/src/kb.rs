//! Conditional assertions and knowledge bases, plus the `.klm` text format.
//!
//! ```text
//! # penguins
//! vars: p b f
//! constraint: p -> b
//! assume: p |~ ~f
//! ```
//!
//! The first `|~` on an `assume:` line separates antecedent from consequent,
//! so a disjunct starting with a negation must be written `| ~q`.

use std::fmt;

use crate::error::{Error, Result};
use crate::formula::{parse_formula, Formula};
use crate::universe::{Universe, WorldSet};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assertion {
    pub antecedent: Formula,
    pub consequent: Formula,
}

impl Assertion {
    pub fn new(antecedent: Formula, consequent: Formula) -> Self {
        Assertion {
            antecedent,
            consequent,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let Some(split) = text.find("|~") else {
            return Err(Error::Syntax {
                offset: text.len(),
                message: "expected `|~`".into(),
            });
        };
        let shift = |e: Error| match e {
            Error::Syntax { offset, message } => Error::Syntax {
                offset: offset + split + 2,
                message,
            },
            Error::UnknownToken { offset, token } => Error::UnknownToken {
                offset: offset + split + 2,
                token,
            },
            other => other,
        };
        let antecedent = parse_formula(&text[..split])?;
        let consequent = parse_formula(&text[split + 2..]).map_err(shift)?;
        Ok(Assertion::new(antecedent, consequent))
    }

    pub fn is_horn(&self) -> bool {
        is_horn_assertion(self)
    }

    pub fn semantic_pair(&self, u: &Universe) -> Result<SemanticPair> {
        semantic_pair(self, u)
    }
}

impl fmt::Display for Assertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} |~ {}", self.antecedent, self.consequent)
    }
}

impl std::str::FromStr for Assertion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Assertion::parse(s)
    }
}

/// An assertion modulo classical equivalence on either side.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SemanticPair {
    pub antecedent: WorldSet,
    pub consequent: WorldSet,
}

pub fn semantic_pair(a: &Assertion, u: &Universe) -> Result<SemanticPair> {
    Ok(SemanticPair {
        antecedent: u.worlds_of(&a.antecedent)?,
        consequent: u.worlds_of(&a.consequent)?,
    })
}

fn is_atom_conjunction(f: &Formula) -> bool {
    match f {
        Formula::Atom(_) => true,
        Formula::And(a, b) => is_atom_conjunction(a) && is_atom_conjunction(b),
        _ => false,
    }
}

/// Antecedent: `true` or a conjunction of atoms. Consequent: an atom or `false`.
pub fn is_horn_assertion(a: &Assertion) -> bool {
    let antecedent_ok = a.antecedent == Formula::True || is_atom_conjunction(&a.antecedent);
    let consequent_ok = matches!(a.consequent, Formula::Atom(_) | Formula::False);
    antecedent_ok && consequent_ok
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeBase {
    pub universe: Universe,
    pub assertions: Vec<Assertion>,
}

impl KnowledgeBase {
    pub fn new(universe: Universe, assertions: Vec<Assertion>) -> Result<Self> {
        for a in &assertions {
            universe.check_atoms(&a.antecedent)?;
            universe.check_atoms(&a.consequent)?;
        }
        Ok(KnowledgeBase {
            universe,
            assertions,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_kb(text)
    }

    pub fn is_horn(&self) -> bool {
        self.assertions.iter().all(is_horn_assertion)
    }

    pub fn semantic_pairs(&self) -> Vec<SemanticPair> {
        self.assertions
            .iter()
            .map(|a| semantic_pair(a, &self.universe).expect("assertions validated on construction"))
            .collect()
    }

    /// Serializes to the `.klm` format; `parse_kb` reads it back unchanged.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&header_lines(&self.universe));
        for a in &self.assertions {
            out.push_str(&format!("assume: {a}\n"));
        }
        out
    }
}

/// `vars:` and `constraint:` lines shared by the `.klm` and model formats.
pub(crate) fn header_lines(u: &Universe) -> String {
    let mut out = String::new();
    out.push_str("vars:");
    for v in u.vars() {
        out.push(' ');
        out.push_str(v);
    }
    out.push('\n');
    for c in u.constraints() {
        out.push_str(&format!("constraint: {c}\n"));
    }
    out
}

/// Splits `key: rest` after stripping comments; `None` for blank lines.
pub(crate) fn directive(raw: &str) -> Option<(&str, &str)> {
    let line = raw.split('#').next().unwrap_or("").trim();
    if line.is_empty() {
        return None;
    }
    match line.split_once(':') {
        Some((key, rest)) => Some((key.trim(), rest.trim())),
        None => Some((line, "")),
    }
}

/// Accumulates `vars:` and `constraint:` lines.
#[derive(Default)]
pub(crate) struct HeaderBuilder {
    vars: Option<(usize, Vec<String>)>,
    constraints: Vec<(usize, Formula)>,
}

impl HeaderBuilder {
    /// Returns `Ok(true)` when the directive was a header line.
    pub(crate) fn accept(&mut self, line_no: usize, key: &str, rest: &str) -> Result<bool> {
        match key {
            "vars" => {
                if self.vars.is_some() {
                    return Err(Error::at_line(line_no, "duplicate `vars:` line"));
                }
                let vars = rest.split_whitespace().map(str::to_string).collect();
                self.vars = Some((line_no, vars));
                Ok(true)
            }
            "constraint" => {
                let f = parse_formula(rest).map_err(|e| Error::at_line(line_no, e))?;
                self.constraints.push((line_no, f));
                Ok(true)
            }
            _ => Ok(false),
        }
    }

    pub(crate) fn build(self) -> Result<Universe> {
        let Some((vars_line, vars)) = self.vars else {
            return Err(Error::at_line(0, "missing `vars:` line"));
        };
        for (line, c) in &self.constraints {
            if let Some(a) = c.atoms().into_iter().find(|a| !vars.iter().any(|v| v == a)) {
                return Err(Error::at_line(*line, Error::UnknownAtom(a.to_string())));
            }
        }
        let constraints = self.constraints.into_iter().map(|(_, c)| c).collect();
        Universe::new(&vars, constraints).map_err(|e| Error::at_line(vars_line, e))
    }
}

pub fn parse_kb(text: &str) -> Result<KnowledgeBase> {
    let mut header = HeaderBuilder::default();
    let mut pending = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let Some((key, rest)) = directive(raw) else {
            continue;
        };
        if header.accept(line_no, key, rest)? {
            continue;
        }
        match key {
            "assume" => {
                let a = Assertion::parse(rest).map_err(|e| Error::at_line(line_no, e))?;
                pending.push((line_no, a));
            }
            other => {
                return Err(Error::at_line(line_no, format!("unknown directive `{other}`")));
            }
        }
    }
    let universe = header.build()?;
    for (line, a) in &pending {
        universe
            .check_atoms(&a.antecedent)
            .and_then(|_| universe.check_atoms(&a.consequent))
            .map_err(|e| Error::at_line(*line, e))?;
    }
    Ok(KnowledgeBase {
        universe,
        assertions: pending.into_iter().map(|(_, a)| a).collect(),
    })
}
