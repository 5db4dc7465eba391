use super::engine::{close_with, CloseOptions};
use super::{initial_map, System, TraceEvent};
use crate::error::Result;
use crate::formula::Formula;
use crate::kb::{Assertion, KnowledgeBase};
use crate::lattice::Mask;
use crate::model::{Flavor, Model};
use crate::search::{bounded_proof, find_countermodel, SearchBudget, PROOF_MAX_WORLDS};
use crate::universe::{WorldSet, MAX_LATTICE_WORLDS};

/// Above this many worlds a countermodel is tried before the closure.
const SEARCH_FIRST_WORLDS: usize = 8;

#[derive(Debug, Clone)]
pub enum Verdict {
    Entailed { trace: Vec<TraceEvent> },
    NotEntailed(Refutation),
    Unknown,
}

#[derive(Debug, Clone)]
pub enum Refutation {
    /// The query's consequent misses part of the antecedent's core in the
    /// complete fixpoint.
    Fixpoint { core: WorldSet },
    Countermodel(Box<Model>),
}

impl Verdict {
    pub fn is_entailed(&self) -> bool {
        matches!(self, Verdict::Entailed { .. })
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::NotEntailed(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Entailed { .. } => "ENTAILED",
            Verdict::NotEntailed(_) => "NOT ENTAILED",
            Verdict::Unknown => "UNKNOWN",
        }
    }

    pub fn certificate_kind(&self) -> &'static str {
        match self {
            Verdict::Entailed { .. } => "trace",
            Verdict::NotEntailed(Refutation::Fixpoint { .. }) => "fixpoint",
            Verdict::NotEntailed(Refutation::Countermodel(_)) => "countermodel",
            Verdict::Unknown => "none",
        }
    }

    pub fn countermodel(&self) -> Option<&Model> {
        match self {
            Verdict::NotEntailed(Refutation::Countermodel(m)) => Some(m),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EntailOptions {
    pub budget: SearchBudget,
    /// Nesting depth of the proof pool beyond the closure's scale.
    pub proof_depth: usize,
    /// Replace a fixpoint refutation by a countermodel when one is found.
    pub want_countermodel: bool,
}

impl Default for EntailOptions {
    fn default() -> Self {
        EntailOptions {
            budget: SearchBudget::default(),
            proof_depth: 2,
            want_countermodel: false,
        }
    }
}

pub fn entails(kb: &KnowledgeBase, q: &Assertion, sys: System) -> Result<Verdict> {
    entails_with(kb, q, sys, &EntailOptions::default())
}

/// Complete on universes of at most 16 worlds; beyond that, countermodel
/// search and bounded proof search, with `Unknown` when both give up.
pub fn entails_with(kb: &KnowledgeBase, q: &Assertion, sys: System, opts: &EntailOptions) -> Result<Verdict> {
    let u = &kb.universe;
    let pair = q.semantic_pair(u)?;
    let flavor = Flavor::for_system(sys);
    let search = || find_countermodel(kb, q, flavor, &opts.budget);

    if u.size() > MAX_LATTICE_WORLDS {
        if let Some(m) = search()? {
            return Ok(Verdict::NotEntailed(Refutation::Countermodel(Box::new(m))));
        }
        if u.size() <= PROOF_MAX_WORLDS {
            if let Some(trace) = bounded_proof(kb, q, sys, opts.proof_depth)? {
                return Ok(Verdict::Entailed { trace });
            }
        }
        return Ok(Verdict::Unknown);
    }

    let large = u.size() > SEARCH_FIRST_WORLDS;
    if large {
        if let Some(m) = search()? {
            return Ok(Verdict::NotEntailed(Refutation::Countermodel(Box::new(m))));
        }
    }
    let a = pair.antecedent.to_mask() as Mask;
    let b = pair.consequent.to_mask() as Mask;
    let seed = initial_map(kb)?;
    // On large lattices the trace is only recorded once the goal is known
    // to be reachable; the run is deterministic, so it stops at the same step.
    let mut opts_close = CloseOptions {
        trace: !large,
        goal: Some((a, b)),
        ..CloseOptions::default()
    };
    let mut run = close_with(&seed, sys, &opts_close);
    if run.map.holds(a, b) {
        if large {
            opts_close.trace = true;
            run = close_with(&seed, sys, &opts_close);
        }
        return Ok(Verdict::Entailed { trace: run.trace });
    }
    if opts.want_countermodel && !large {
        if let Some(m) = search()? {
            return Ok(Verdict::NotEntailed(Refutation::Countermodel(Box::new(m))));
        }
    }
    Ok(Verdict::NotEntailed(Refutation::Fixpoint {
        core: run.map.core_of(&pair.antecedent),
    }))
}

/// Does `q`'s material counterpart follow classically from the material
/// counterparts of the assertions of `kb`?
pub fn material_entails(kb: &KnowledgeBase, q: &Assertion) -> Result<bool> {
    let u = &kb.universe;
    let mut models = u.all();
    for a in &kb.assertions {
        models.intersect_with(&u.worlds_of(&material(a))?);
    }
    Ok(models.is_subset(&u.worlds_of(&material(q))?))
}

fn material(a: &Assertion) -> Formula {
    Formula::implies(a.antecedent.clone(), a.consequent.clone())
}
