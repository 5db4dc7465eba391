//! Worked example bundles: the penguin triangle, the Nixon diamond and the
//! loop counterexample, each as a table of expected and observed outcomes.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::closure::{close, entails, initial_map, System};
use crate::error::{Error, Result};
use crate::kb::{parse_kb, Assertion, KnowledgeBase};
use crate::model::{fixture, relation_of_model, validate, Flavor};

pub const PENGUIN: &str = "\
# penguin triangle
vars: p b f
assume: p |~ b
assume: p |~ ~f
assume: b |~ f
";

pub const NIXON: &str = "\
# Nixon diamond
vars: t p s e
assume: t |~ p
assume: t |~ s
assume: p |~ e
assume: s |~ ~e
";

/// The Nixon diamond with an extra variable `a` that no assertion mentions.
pub const NIXON_EXTRA: &str = "\
vars: t p s e a
assume: t |~ p
assume: t |~ s
assume: p |~ e
assume: s |~ ~e
";

pub const BUNDLES: [&str; 3] = ["penguin", "nixon", "loop"];

#[derive(Debug, Clone)]
pub struct Row {
    pub check: String,
    pub expected: String,
    pub observed: String,
    pub certificate: &'static str,
    pub elapsed: Duration,
}

impl Row {
    pub fn ok(&self) -> bool {
        self.expected == self.observed
    }
}

pub fn bundle(name: &str) -> Result<Vec<Row>> {
    match name {
        "penguin" => penguin(),
        "nixon" => nixon(),
        "loop" => loop_counterexample(),
        other => Err(Error::UnknownFixture(other.to_string())),
    }
}

fn query_row(kb: &KnowledgeBase, query: &str, sys: System, expect: bool) -> Result<Row> {
    let q = Assertion::parse(query)?;
    let start = Instant::now();
    let v = entails(kb, &q, sys)?;
    Ok(Row {
        check: format!("{sys}: {query}"),
        expected: if expect { "ENTAILED" } else { "NOT ENTAILED" }.to_string(),
        observed: v.label().to_string(),
        certificate: v.certificate_kind(),
        elapsed: start.elapsed(),
    })
}

pub fn penguin() -> Result<Vec<Row>> {
    let kb = parse_kb(PENGUIN)?;
    let mut rows = Vec::new();
    for q in ["p & b |~ ~f", "f |~ ~p", "b |~ ~p", "b | p |~ f", "b | p |~ ~p"] {
        rows.push(query_row(&kb, q, System::P, true)?);
    }
    rows.push(query_row(&kb, "p |~ f", System::P, false)?);
    Ok(rows)
}

pub fn nixon() -> Result<Vec<Row>> {
    let kb = parse_kb(NIXON)?;
    let mut rows = Vec::new();
    for q in ["true |~ ~t", "true |~ ~(p & s)"] {
        rows.push(query_row(&kb, q, System::P, true)?);
    }
    for q in ["t |~ e", "t |~ ~e", "s |~ ~p", "p |~ ~s"] {
        rows.push(query_row(&kb, q, System::P, false)?);
    }
    let extra = parse_kb(NIXON_EXTRA)?;
    rows.push(query_row(&extra, "a & p |~ e", System::P, false)?);
    Ok(rows)
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

pub fn loop_counterexample() -> Result<Vec<Row>> {
    let start = Instant::now();
    let m = fixture("loop_counterexample")?;
    let u = m.universe().clone();
    let mut rows = Vec::new();
    let mut push = |check: &str, expected: bool, observed: bool, certificate| {
        rows.push(Row {
            check: check.to_string(),
            expected: yes_no(expected),
            observed: yes_no(observed),
            certificate,
            elapsed: start.elapsed(),
        })
    };
    push("valid as Cumulative", true, validate(&m).is_valid(), "model");
    let ordered = m.clone().with_flavor(Flavor::CumulativeOrdered);
    push("valid as CumulativeOrdered", false, validate(&ordered).is_valid(), "model");

    let map = relation_of_model(&m)?;
    let pair = |a: &str, b: &str| Assertion::parse(&format!("{a} |~ {b}"))?.semantic_pair(&u);
    for (a, b) in [("p0", "p1"), ("p1", "p2"), ("p2", "p0")] {
        push(&format!("model: {a} |~ {b}"), true, map.contains(&pair(a, b)?), "model");
    }
    push("model: p0 |~ p2", false, map.contains(&pair("p0", "p2")?), "model");

    let kb = KnowledgeBase::new(
        u.clone(),
        ["p0 |~ p1", "p1 |~ p2", "p2 |~ p0"]
            .iter()
            .map(|s| Assertion::parse(s))
            .collect::<Result<_>>()?,
    )?;
    let closed = close(&initial_map(&kb)?, System::CL).0;
    push("CL closure: p0 |~ p2", true, closed.contains(&pair("p0", "p2")?), "trace");
    Ok(rows)
}

/// Deterministic table; timings are left out.
pub fn render_table(name: &str, rows: &[Row]) -> String {
    let width = rows.iter().map(|r| r.check.len()).max().unwrap_or(0).max(5);
    let mut out = String::new();
    let _ = writeln!(out, "bundle {name}");
    let _ = writeln!(out, "{:<width$}  {:<12}  {:<12}  {:<12}  result", "check", "expected", "observed", "certificate");
    for r in rows {
        let _ = writeln!(
            out,
            "{:<width$}  {:<12}  {:<12}  {:<12}  {}",
            r.check,
            r.expected,
            r.observed,
            r.certificate,
            if r.ok() { "PASS" } else { "FAIL" }
        );
    }
    let passed = rows.iter().filter(|r| r.ok()).count();
    let _ = writeln!(out, "{passed}/{} passed", rows.len());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn penguin_bundle_passes() {
        let rows = penguin().unwrap();
        assert_eq!(rows.len(), 6);
        assert!(rows.iter().all(Row::ok));
    }

    #[test]
    fn loop_bundle_passes() {
        assert!(loop_counterexample().unwrap().iter().all(Row::ok));
    }

    #[test]
    fn unknown_bundle() {
        assert!(bundle("tweety").is_err());
    }
}
