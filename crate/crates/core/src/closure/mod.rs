//! Consequence relations as consequent-core maps, and their closure under
//! the five rule systems.
//!
//! A relation closed under reflexivity, right weakening and `And` is fully
//! described by one world set per antecedent: `(A, B)` belongs to it iff
//! `C(A) ⊆ B`. Every system below contains those rules, so each closure is a
//! pointwise-decreasing fixpoint computation over `2^|U|` cores.

mod checks;
mod engine;
mod entail;
mod oracle;
mod trace;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kb::{KnowledgeBase, SemanticPair};
use crate::lattice::{full_mask, hex, is_subset, Mask};
use crate::universe::{Universe, WorldSet};

pub use checks::{
    check_condition, derived_rule_check, derived_rule_check_with, rationality_check,
    rationality_check_with, satisfies_system, satisfies_system_with, CheckMode, Condition,
    DerivedRule, Rationality, Violation,
};
pub use engine::{close, close_with, CloseOptions, Closure, Schedule};
pub use entail::{entails, entails_with, material_entails, EntailOptions, Refutation, Verdict};
pub use oracle::{pairset_closure_oracle, PairSet};
pub use trace::{replay, verify_trace, ProofState, TraceError, TraceEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum System {
    C,
    CL,
    P,
    CM,
    M,
}

impl System {
    pub const ALL: [System; 5] = [System::C, System::CL, System::P, System::CM, System::M];

    pub fn has_loop(self) -> bool {
        self == System::CL
    }

    pub fn has_or(self) -> bool {
        matches!(self, System::P | System::M)
    }

    pub fn has_monotonicity(self) -> bool {
        matches!(self, System::CM | System::M)
    }

    pub fn has_contraposition(self) -> bool {
        self == System::M
    }

    /// Rules whose instances may appear in a proof for this system: the
    /// primitive ones plus `Or` and `Monotonicity` for `M`, where both are
    /// derived.
    pub fn admits(self, rule: &Rule) -> bool {
        match rule {
            Rule::Cut | Rule::CautiousMonotonicity => true,
            Rule::Loop { .. } => self.has_loop(),
            Rule::Or => self.has_or(),
            Rule::Monotonicity => self.has_monotonicity(),
            Rule::Contraposition => self.has_contraposition(),
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            System::C => "C",
            System::CL => "CL",
            System::P => "P",
            System::CM => "CM",
            System::M => "M",
        };
        f.write_str(s)
    }
}

impl FromStr for System {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "C" => Ok(System::C),
            "CL" => Ok(System::CL),
            "P" => Ok(System::P),
            "CM" => Ok(System::CM),
            "M" => Ok(System::M),
            other => Err(Error::Precondition(format!("unknown system `{other}`"))),
        }
    }
}

/// Rule applied by a single tightening step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Cut,
    CautiousMonotonicity,
    /// The first `cycle_len` premises form a closed walk.
    Loop {
        cycle_len: usize,
    },
    Or,
    Monotonicity,
    Contraposition,
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Cut => "Cut",
            Rule::CautiousMonotonicity => "CautiousMonotonicity",
            Rule::Loop { .. } => "Loop",
            Rule::Or => "Or",
            Rule::Monotonicity => "Monotonicity",
            Rule::Contraposition => "Contraposition",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Total map `A ↦ C(A)` over every world set of a universe with at most 16
/// worlds. `(A, B)` is in the relation iff `C(A) ⊆ B`.
#[derive(Clone, PartialEq, Eq)]
pub struct ConsequenceMap {
    universe: Universe,
    core: Vec<Mask>,
}

impl fmt::Debug for ConsequenceMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConsequenceMap")
            .field("worlds", &self.universe.size())
            .field("core", &self.core)
            .finish()
    }
}

impl ConsequenceMap {
    /// `C(A) = A` everywhere: the smallest reflexive relation.
    pub fn identity(universe: Universe) -> Result<Self> {
        universe.check_lattice("consequence map")?;
        let core = (0..1 << universe.size()).collect();
        Ok(ConsequenceMap { universe, core })
    }

    /// Builds a map from explicit cores; each `core[A]` is clipped to `A`.
    pub fn from_cores(universe: Universe, core: Vec<Mask>) -> Result<Self> {
        universe.check_lattice("consequence map")?;
        if core.len() != 1 << universe.size() {
            return Err(Error::Precondition(format!(
                "expected {} cores, got {}",
                1usize << universe.size(),
                core.len()
            )));
        }
        let core = core
            .into_iter()
            .enumerate()
            .map(|(a, c)| c & a as Mask)
            .collect();
        Ok(ConsequenceMap { universe, core })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    /// Number of worlds `|U|`.
    pub fn worlds(&self) -> usize {
        self.universe.size()
    }

    pub fn full(&self) -> Mask {
        full_mask(self.worlds())
    }

    pub fn cores(&self) -> &[Mask] {
        &self.core
    }

    pub fn core(&self, a: Mask) -> Mask {
        self.core[a as usize]
    }

    pub fn holds(&self, a: Mask, b: Mask) -> bool {
        is_subset(self.core[a as usize], b)
    }

    pub fn core_of(&self, a: &WorldSet) -> WorldSet {
        WorldSet::from_mask(self.worlds(), self.core(a.to_mask() as Mask) as u64)
    }

    pub fn contains(&self, pair: &SemanticPair) -> bool {
        self.holds(
            pair.antecedent.to_mask() as Mask,
            pair.consequent.to_mask() as Mask,
        )
    }

    /// Is the relation total on `a`'s consequents, i.e. `(A, ∅)` holds?
    pub fn is_inconsistent(&self, a: Mask) -> bool {
        self.core(a) == 0
    }

    pub(crate) fn cores_mut(&mut self) -> &mut Vec<Mask> {
        &mut self.core
    }

    /// One line per antecedent: `A=<hex> C=<hex>`, ascending in `A`.
    pub fn dump(&self) -> String {
        let n = self.worlds();
        let mut out = String::with_capacity(self.core.len() * (2 * n.div_ceil(4) + 6));
        for (a, c) in self.core.iter().enumerate() {
            out.push_str("A=");
            out.push_str(&hex(a as Mask, n));
            out.push_str(" C=");
            out.push_str(&hex(*c, n));
            out.push('\n');
        }
        out
    }

    /// Parses the output of [`ConsequenceMap::dump`].
    pub fn parse_dump(universe: Universe, text: &str) -> Result<Self> {
        let mut core = vec![None; 1 << universe.size()];
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parse = |field: Option<&str>, key: &str| -> Result<Mask> {
                field
                    .and_then(|f| f.strip_prefix(key))
                    .and_then(|h| Mask::from_str_radix(h, 16).ok())
                    .ok_or_else(|| Error::at_line(i + 1, "expected `A=<hex> C=<hex>`"))
            };
            let mut fields = line.split_whitespace();
            let a = parse(fields.next(), "A=")?;
            let c = parse(fields.next(), "C=")?;
            let slot = core
                .get_mut(a as usize)
                .ok_or_else(|| Error::at_line(i + 1, "antecedent out of range"))?;
            *slot = Some(c);
        }
        let core = core
            .into_iter()
            .enumerate()
            .map(|(a, c)| c.ok_or_else(|| Error::Precondition(format!("missing antecedent {a:x}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::from_cores(universe, core)
    }
}

/// Seeds `C(A) = A ∩ ⋂{ B : (A, B) ∈ K }`.
pub fn initial_map(kb: &KnowledgeBase) -> Result<ConsequenceMap> {
    let mut map = ConsequenceMap::identity(kb.universe.clone())?;
    for pair in kb.semantic_pairs() {
        let a = pair.antecedent.to_mask() as Mask;
        map.core[a as usize] &= pair.consequent.to_mask() as Mask;
    }
    Ok(map)
}
