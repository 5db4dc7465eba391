//! Proof traces and their independent checker.
//!
//! Each event tightens one antecedent's core by a single rule instance. The
//! checker keeps its own sparse relation state (antecedents not yet touched
//! map to themselves) and re-derives every conclusion from the event's
//! premises; it shares no code with the closure engine.

use std::collections::HashMap;
use std::fmt;

use super::{ConsequenceMap, Rule, System};
use crate::kb::SemanticPair;
use crate::lattice::Mask;
use crate::universe::WorldSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEvent {
    pub rule: Rule,
    /// Antecedent whose core is tightened.
    pub target: WorldSet,
    /// Pairs `(A, B)` that hold before the step.
    pub premises: Vec<(WorldSet, WorldSet)>,
    /// Core of `target` after the step.
    pub core: WorldSet,
}

impl TraceEvent {
    pub fn render(&self, u: &crate::universe::Universe) -> String {
        let f = |s: &WorldSet| u.dnf(s).to_string();
        let premises: Vec<String> = self
            .premises
            .iter()
            .map(|(a, b)| format!("{} |~ {}", f(a), f(b)))
            .collect();
        format!(
            "{}: {} |~ {}   from [{}]",
            self.rule,
            f(&self.target),
            f(&self.core),
            premises.join("; ")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceError {
    pub index: usize,
    pub message: String,
}

impl fmt::Display for TraceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "trace event {}: {}", self.index, self.message)
    }
}

impl std::error::Error for TraceError {}

/// Sparse relation state used by the checker.
#[derive(Debug, Clone)]
pub struct ProofState {
    len: usize,
    cores: HashMap<WorldSet, WorldSet>,
}

impl ProofState {
    pub fn from_seeds(len: usize, seeds: &[SemanticPair]) -> Self {
        let mut state = ProofState {
            len,
            cores: HashMap::new(),
        };
        for s in seeds {
            let c = state.core(&s.antecedent).intersection(&s.consequent);
            state.cores.insert(s.antecedent.clone(), c);
        }
        state
    }

    pub fn core(&self, a: &WorldSet) -> WorldSet {
        self.cores.get(a).cloned().unwrap_or_else(|| a.clone())
    }

    pub fn holds(&self, a: &WorldSet, b: &WorldSet) -> bool {
        self.core(a).is_subset(b)
    }

    /// Explicitly tightened antecedents.
    pub fn entries(&self) -> impl Iterator<Item = (&WorldSet, &WorldSet)> {
        self.cores.iter()
    }

    fn universe(&self) -> WorldSet {
        WorldSet::full(self.len)
    }

    /// Checks one event against the current state and applies it.
    fn apply(&mut self, sys: System, e: &TraceEvent) -> Result<(), String> {
        if !sys.admits(&e.rule) {
            return Err(format!("rule {} is not available in system {sys}", e.rule));
        }
        for (a, b) in &e.premises {
            if !self.holds(a, b) {
                return Err(format!("premise ({:?}, {:?}) is not established", a, b));
            }
        }
        let derived = self.conclusion(e)?;
        let expected = self.core(&e.target).intersection(&derived);
        if expected != e.core {
            return Err(format!(
                "claimed core {:?} differs from old core ∩ conclusion {:?}",
                e.core, expected
            ));
        }
        self.cores.insert(e.target.clone(), e.core.clone());
        Ok(())
    }

    /// Consequent derived for `e.target` by the rule instance.
    fn conclusion(&self, e: &TraceEvent) -> Result<WorldSet, String> {
        let p = &e.premises;
        let need = |k: usize| {
            if p.len() == k {
                Ok(())
            } else {
                Err(format!("{} expects {k} premises, got {}", e.rule, p.len()))
            }
        };
        match e.rule {
            // (A, B), (A ∩ B, X) ⊢ (A, X)
            Rule::Cut => {
                need(2)?;
                let (a, b) = &p[0];
                let (ab, x) = &p[1];
                if *ab != a.intersection(b) || e.target != *a {
                    return Err("Cut instance is malformed".into());
                }
                Ok(x.clone())
            }
            // (A, B), (A, X) ⊢ (A ∩ B, X)
            Rule::CautiousMonotonicity => {
                need(2)?;
                let (a, b) = &p[0];
                let (a2, x) = &p[1];
                if a != a2 || e.target != a.intersection(b) {
                    return Err("Cautious Monotonicity instance is malformed".into());
                }
                Ok(x.clone())
            }
            // (A0, A1), ..., (Ak, A0), then side pairs (Aj, Xj) ⊢ (Ai, ⋂ Xj)
            Rule::Loop { cycle_len } => {
                if cycle_len == 0 || cycle_len > p.len() {
                    return Err("Loop without a cycle".into());
                }
                let (cycle, side) = p.split_at(cycle_len);
                for w in cycle.windows(2) {
                    if w[0].1 != w[1].0 {
                        return Err("Loop premises do not form a chain".into());
                    }
                }
                if cycle[cycle_len - 1].1 != cycle[0].0 {
                    return Err("Loop premises do not close".into());
                }
                let on_cycle = |s: &WorldSet| cycle.iter().any(|(a, _)| a == s);
                if !on_cycle(&e.target) {
                    return Err("Loop target is not on the cycle".into());
                }
                let mut x = self.universe();
                for (a, xa) in side {
                    if !on_cycle(a) {
                        return Err("Loop side premise is not on the cycle".into());
                    }
                    x.intersect_with(xa);
                }
                Ok(x)
            }
            // (A, X), (B, Y) ⊢ (A ∪ B, X ∪ Y)
            Rule::Or => {
                need(2)?;
                let (a, x) = &p[0];
                let (b, y) = &p[1];
                if e.target != a.union(b) {
                    return Err("Or target is not the union of the antecedents".into());
                }
                Ok(x.union(y))
            }
            // (B, X), A ⊆ B ⊢ (A, X)
            Rule::Monotonicity => {
                need(1)?;
                let (b, x) = &p[0];
                if !e.target.is_subset(b) {
                    return Err("Monotonicity target is not stronger than the premise".into());
                }
                Ok(x.clone())
            }
            // (A, B) ⊢ (¬B, ¬A)
            Rule::Contraposition => {
                need(1)?;
                let (a, b) = &p[0];
                if e.target != b.complement() {
                    return Err("Contraposition target is not the negated consequent".into());
                }
                Ok(a.complement())
            }
        }
    }
}

/// Checks every event of `events` as a rule instance of `sys`, starting from
/// the seeds. Returns the final sparse state.
pub fn verify_trace(
    len: usize,
    seeds: &[SemanticPair],
    sys: System,
    events: &[TraceEvent],
) -> Result<ProofState, TraceError> {
    let mut state = ProofState::from_seeds(len, seeds);
    for (index, e) in events.iter().enumerate() {
        state
            .apply(sys, e)
            .map_err(|message| TraceError { index, message })?;
    }
    Ok(state)
}

/// Applies the recorded cores to `initial` without checking them.
pub fn replay(initial: &ConsequenceMap, events: &[TraceEvent]) -> ConsequenceMap {
    let mut map = initial.clone();
    for e in events {
        map.cores_mut()[e.target.to_mask() as usize] = e.core.to_mask() as Mask;
    }
    map
}
