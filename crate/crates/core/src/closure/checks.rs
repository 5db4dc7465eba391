//! Map-level conditions: the rules of each system, rules derived in them,
//! and the three rationality properties.
//!
//! Every condition is stated on cores. Since `(A, X)` is in the relation for
//! every `X ⊇ C(A)`, quantifying a rule over all consequents reduces to
//! instantiating each premise consequent at the core it refers to.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ConsequenceMap, System};
use crate::lattice::{antecedent_components, hex, is_subset, submasks, Mask};

/// Largest universe on which quadratic conditions are checked exhaustively.
pub const EXHAUSTIVE_WORLDS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

impl CheckMode {
    pub fn auto(worlds: usize) -> Self {
        if worlds <= EXHAUSTIVE_WORLDS {
            CheckMode::Exhaustive
        } else {
            CheckMode::Sampled {
                samples: 200_000,
                seed: 0,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub condition: &'static str,
    /// World sets instantiating the condition, in the order named by
    /// `condition`'s description.
    pub sets: Vec<Mask>,
    pub worlds: usize,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sets: Vec<String> = self.sets.iter().map(|&s| hex(s, self.worlds)).collect();
        write!(f, "{} fails at [{}]", self.condition, sets.join(", "))
    }
}

/// Conditions that make up the systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    Reflexivity,
    Cut,
    CautiousMonotonicity,
    Loop,
    Or,
    Monotonicity,
    Contraposition,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::Reflexivity => "Reflexivity",
            Condition::Cut => "Cut",
            Condition::CautiousMonotonicity => "CautiousMonotonicity",
            Condition::Loop => "Loop",
            Condition::Or => "Or",
            Condition::Monotonicity => "Monotonicity",
            Condition::Contraposition => "Contraposition",
        }
    }

    pub fn of_system(sys: System) -> Vec<Condition> {
        let mut out = vec![
            Condition::Reflexivity,
            Condition::Cut,
            Condition::CautiousMonotonicity,
        ];
        match sys {
            System::C => {}
            System::CL => out.push(Condition::Loop),
            System::P => out.push(Condition::Or),
            System::CM => out.push(Condition::Monotonicity),
            System::M => out.push(Condition::Contraposition),
        }
        out
    }
}

pub fn satisfies_system(map: &ConsequenceMap, sys: System) -> Result<(), Violation> {
    satisfies_system_with(map, sys, CheckMode::auto(map.worlds()))
}

pub fn satisfies_system_with(map: &ConsequenceMap, sys: System, mode: CheckMode) -> Result<(), Violation> {
    Condition::of_system(sys)
        .into_iter()
        .try_for_each(|c| check_condition(map, c, mode))
}

pub fn check_condition(map: &ConsequenceMap, cond: Condition, mode: CheckMode) -> Result<(), Violation> {
    let n = map.worlds();
    let full = map.full();
    let c = |a: Mask| map.core(a);
    let fail = |sets: Vec<Mask>| Violation {
        condition: cond.name(),
        sets,
        worlds: n,
    };
    match cond {
        Condition::Reflexivity => {
            for a in 0..=full {
                if !is_subset(c(a), a) {
                    return Err(fail(vec![a]));
                }
            }
            Ok(())
        }
        // Only B with C(A) ⊆ B matter, and A ∩ B ranges over [C(A), A].
        Condition::Cut | Condition::CautiousMonotonicity => {
            for a in 0..=full {
                let ca = c(a);
                for sub in submasks(a & !ca) {
                    let d = ca | sub;
                    let ok = if cond == Condition::Cut {
                        is_subset(ca, c(d))
                    } else {
                        is_subset(c(d), ca)
                    };
                    if !ok {
                        return Err(fail(vec![a, d]));
                    }
                }
            }
            Ok(())
        }
        Condition::Loop => {
            for members in antecedent_components(map.cores(), n) {
                let join = members.iter().fold(0, |acc, &m| acc | c(m));
                if let Some(&m) = members.iter().find(|&&m| !is_subset(join, m)) {
                    let from = *members.iter().find(|&&x| !is_subset(c(x), m)).unwrap();
                    return Err(fail(vec![from, m]));
                }
            }
            Ok(())
        }
        Condition::Monotonicity => {
            for a in 0..=full {
                for w in 0..n {
                    let sup = a | 1 << w;
                    if sup != a && !is_subset(c(a), c(sup)) {
                        return Err(fail(vec![a, sup]));
                    }
                }
            }
            Ok(())
        }
        Condition::Or => for_pairs(n, mode, |a, b| {
            if is_subset(c(a | b), c(a) | c(b)) {
                None
            } else {
                Some(fail(vec![a, b]))
            }
        }),
        Condition::Contraposition => for_pairs(n, mode, |a, x| {
            if x & c(a) == 0 && c(x) & a != 0 {
                Some(fail(vec![a, x]))
            } else {
                None
            }
        }),
    }
}

/// Rules derived in one or more systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DerivedRule {
    /// `α |~ β, α |~ γ ⊢ α |~ β ∧ γ`
    And,
    /// `α |~ β, β |~ α, α |~ γ ⊢ β |~ γ`
    Equivalence,
    /// `α |~ β → γ, α |~ β ⊢ α |~ γ`
    ModusPonensInConsequent,
    /// `α ∨ β |~ α, α |~ γ ⊢ α ∨ β |~ γ`
    DisjunctTransfer,
    /// `α ∧ β |~ γ ⊢ α |~ β → γ`
    HardHalfDeduction,
    /// `α ∧ β |~ γ, α ∧ ¬β |~ γ ⊢ α |~ γ`
    ProofByCases,
    /// `α |~ γ, β |~ δ ⊢ α ∨ β |~ γ ∨ δ`
    DisjunctiveConsequents,
    /// `α ∨ γ |~ γ, α |~ β ⊢ γ |~ α → β`
    DisjunctImplication,
    /// `α ∨ β |~ α, β ∨ γ |~ β ⊢ α ∨ γ |~ α`
    OrdinarityTransitivity,
    /// `α ∨ β |~ α, β ∨ γ |~ β ⊢ α |~ ¬γ ∨ β`
    OrdinarityChain,
    /// `α |~ β → γ ⊢ α ∧ β |~ γ`
    EasyHalfDeduction,
    /// `α |~ β, β |~ γ ⊢ α |~ γ`
    Transitivity,
    Or,
    Monotonicity,
    Loop,
}

impl DerivedRule {
    pub const ALL: [DerivedRule; 15] = [
        DerivedRule::And,
        DerivedRule::Equivalence,
        DerivedRule::ModusPonensInConsequent,
        DerivedRule::DisjunctTransfer,
        DerivedRule::HardHalfDeduction,
        DerivedRule::ProofByCases,
        DerivedRule::DisjunctiveConsequents,
        DerivedRule::DisjunctImplication,
        DerivedRule::OrdinarityTransitivity,
        DerivedRule::OrdinarityChain,
        DerivedRule::EasyHalfDeduction,
        DerivedRule::Transitivity,
        DerivedRule::Or,
        DerivedRule::Monotonicity,
        DerivedRule::Loop,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DerivedRule::And => "And",
            DerivedRule::Equivalence => "Equivalence",
            DerivedRule::ModusPonensInConsequent => "MPC",
            DerivedRule::DisjunctTransfer => "DisjunctTransfer",
            DerivedRule::HardHalfDeduction => "S",
            DerivedRule::ProofByCases => "D",
            DerivedRule::DisjunctiveConsequents => "DisjunctiveConsequents",
            DerivedRule::DisjunctImplication => "DisjunctImplication",
            DerivedRule::OrdinarityTransitivity => "OrdinarityTransitivity",
            DerivedRule::OrdinarityChain => "OrdinarityChain",
            DerivedRule::EasyHalfDeduction => "EHD",
            DerivedRule::Transitivity => "Transitivity",
            DerivedRule::Or => "Or",
            DerivedRule::Monotonicity => "Monotonicity",
            DerivedRule::Loop => "Loop",
        }
    }

    /// Derived rules that every map closed under `sys` must satisfy.
    pub fn of_system(sys: System) -> Vec<DerivedRule> {
        use DerivedRule::*;
        let mut out = vec![And, Equivalence, ModusPonensInConsequent, DisjunctTransfer];
        let preferential = [
            HardHalfDeduction,
            ProofByCases,
            DisjunctiveConsequents,
            DisjunctImplication,
            OrdinarityTransitivity,
            OrdinarityChain,
            Loop,
        ];
        match sys {
            System::C => {}
            System::CL => out.push(Loop),
            System::P => out.extend(preferential),
            System::CM => out.extend([EasyHalfDeduction, Transitivity, Monotonicity, Loop]),
            System::M => {
                out.extend(preferential);
                out.extend([EasyHalfDeduction, Transitivity, Or, Monotonicity]);
            }
        }
        out
    }
}

impl fmt::Display for DerivedRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn derived_rule_check(map: &ConsequenceMap, rule: DerivedRule) -> Result<(), Violation> {
    derived_rule_check_with(map, rule, CheckMode::auto(map.worlds()))
}

pub fn derived_rule_check_with(map: &ConsequenceMap, rule: DerivedRule, mode: CheckMode) -> Result<(), Violation> {
    use DerivedRule::*;
    let n = map.worlds();
    let full = map.full();
    let c = |a: Mask| map.core(a);
    let holds = |a: Mask, b: Mask| map.holds(a, b);
    let fail = |sets: Vec<Mask>| Violation {
        condition: rule.name(),
        sets,
        worlds: n,
    };
    let pairwise = |test: &dyn Fn(Mask, Mask) -> bool| {
        for_pairs(n, mode, |a, b| if test(a, b) { None } else { Some(fail(vec![a, b])) })
    };
    match rule {
        // premises (A, B) and (A, C(A))
        And => pairwise(&|a, b| !holds(a, b) || holds(a, b & c(a))),
        Equivalence => pairwise(&|a, b| !(holds(a, b) && holds(b, a)) || holds(b, c(a))),
        // premises (A, ¬B ∪ X) and (A, B), with X = C(A) ∩ B the strongest
        // consequent for which the first premise holds
        ModusPonensInConsequent => pairwise(&|a, b| {
            let x = c(a) & b;
            !(holds(a, (full & !b) | x) && holds(a, b)) || holds(a, x)
        }),
        DisjunctTransfer => pairwise(&|a, b| !holds(a | b, a) || holds(a | b, c(a))),
        HardHalfDeduction => pairwise(&|a, b| holds(a, (full & !b) | c(a & b))),
        ProofByCases => pairwise(&|a, b| holds(a, c(a & !b) | c(a & b))),
        DisjunctiveConsequents | Or => pairwise(&|a, b| holds(a | b, c(a) | c(b))),
        DisjunctImplication => pairwise(&|a, g| !holds(a | g, g) || holds(g, (full & !a) | c(a))),
        EasyHalfDeduction => pairwise(&|a, b| holds(a & b, c(a) & b)),
        Transitivity => pairwise(&|a, b| !holds(a, b) || holds(a, c(b))),
        Monotonicity => check_condition(map, Condition::Monotonicity, mode).map_err(|v| fail(v.sets)),
        Loop => check_condition(map, Condition::Loop, mode).map_err(|v| fail(v.sets)),
        OrdinarityTransitivity | OrdinarityChain => {
            // premises: A ⊑ B and B ⊑ G where X ⊑ Y iff C(X ∪ Y) ⊆ X
            let conclusion = |a: Mask, b: Mask, g: Mask| {
                if rule == OrdinarityTransitivity {
                    holds(a | g, a)
                } else {
                    holds(a, (full & !g) | b)
                }
            };
            match mode {
                CheckMode::Exhaustive => {
                    let below: Vec<Vec<Mask>> = (0..=full)
                        .map(|x| (0..=full).filter(|&y| holds(x | y, x)).collect())
                        .collect();
                    for a in 0..=full {
                        for &b in &below[a as usize] {
                            for &g in &below[b as usize] {
                                if !conclusion(a, b, g) {
                                    return Err(fail(vec![a, b, g]));
                                }
                            }
                        }
                    }
                    Ok(())
                }
                CheckMode::Sampled { samples, seed } => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    for _ in 0..samples {
                        let (a, b, g) = (rng.gen::<Mask>() & full, rng.gen::<Mask>() & full, rng.gen::<Mask>() & full);
                        if holds(a | b, a) && holds(b | g, b) && !conclusion(a, b, g) {
                            return Err(fail(vec![a, b, g]));
                        }
                    }
                    Ok(())
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rationality {
    NegationRationality,
    DisjunctiveRationality,
    RationalMonotonicity,
}

impl Rationality {
    pub const ALL: [Rationality; 3] = [
        Rationality::NegationRationality,
        Rationality::DisjunctiveRationality,
        Rationality::RationalMonotonicity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rationality::NegationRationality => "NegationRationality",
            Rationality::DisjunctiveRationality => "DisjunctiveRationality",
            Rationality::RationalMonotonicity => "RationalMonotonicity",
        }
    }
}

impl fmt::Display for Rationality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Checks a rationality property in contrapositive form: whenever
/// `(A, X)` holds, one of the alternatives in the conclusion must hold too.
/// Taking `X = C(A)` (resp. `C(A ∪ B)`) covers every `X`.
pub fn rationality_check(map: &ConsequenceMap, which: Rationality) -> Result<(), Violation> {
    rationality_check_with(map, which, CheckMode::auto(map.worlds()))
}

pub fn rationality_check_with(map: &ConsequenceMap, which: Rationality, mode: CheckMode) -> Result<(), Violation> {
    let n = map.worlds();
    let c = |a: Mask| map.core(a);
    let fail = |sets: Vec<Mask>| Violation {
        condition: which.name(),
        sets,
        worlds: n,
    };
    match which {
        // A |~ X ⇒ A ∧ G |~ X or A ∧ ¬G |~ X
        Rationality::NegationRationality => for_pairs(n, mode, |a, g| {
            let ca = c(a);
            if is_subset(c(a & g), ca) || is_subset(c(a & !g), ca) {
                None
            } else {
                Some(fail(vec![a, g]))
            }
        }),
        // A ∨ B |~ X ⇒ A |~ X or B |~ X
        Rationality::DisjunctiveRationality => for_pairs(n, mode, |a, b| {
            let cab = c(a | b);
            if is_subset(c(a), cab) || is_subset(c(b), cab) {
                None
            } else {
                Some(fail(vec![a, b]))
            }
        }),
        // A |~ X ⇒ A ∧ B |~ X or A |~ ¬B
        Rationality::RationalMonotonicity => for_pairs(n, mode, |a, b| {
            let ca = c(a);
            if ca & b == 0 || is_subset(c(a & b), ca) {
                None
            } else {
                Some(fail(vec![a, b]))
            }
        }),
    }
}

/// Runs `test` over all pairs of world sets, or over random pairs when
/// sampling, and returns the first violation.
fn for_pairs(
    n: usize,
    mode: CheckMode,
    mut test: impl FnMut(Mask, Mask) -> Option<Violation>,
) -> Result<(), Violation> {
    let full = crate::lattice::full_mask(n);
    match mode {
        CheckMode::Exhaustive => {
            for a in 0..=full {
                for b in 0..=full {
                    if let Some(v) = test(a, b) {
                        return Err(v);
                    }
                }
            }
        }
        CheckMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let (a, b) = (rng.gen::<Mask>() & full, rng.gen::<Mask>() & full);
                if let Some(v) = test(a, b) {
                    return Err(v);
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::universe::Universe;

    fn identity(vars: &[&str]) -> ConsequenceMap {
        ConsequenceMap::identity(Universe::unconstrained(vars).unwrap()).unwrap()
    }

    #[test]
    fn identity_satisfies_everything() {
        let map = identity(&["p", "q", "r"]);
        for sys in System::ALL {
            assert_eq!(satisfies_system(&map, sys), Ok(()), "{sys}");
        }
        for rule in DerivedRule::ALL {
            assert_eq!(derived_rule_check(&map, rule), Ok(()), "{rule}");
        }
        for r in Rationality::ALL {
            assert_eq!(rationality_check(&map, r), Ok(()), "{r}");
        }
    }

    #[test]
    fn cut_violation_is_reported() {
        // C({w0,w1}) = {w0} but C({w0}) = ∅ is not reached: Cut needs C(A) ⊆ C(A ∩ B)
        let u = Universe::unconstrained(&["p"]).unwrap();
        let map = ConsequenceMap::from_cores(u, vec![0, 0, 2, 1]).unwrap();
        let v = check_condition(&map, Condition::Cut, CheckMode::Exhaustive).unwrap_err();
        assert_eq!(v.sets, vec![3, 1]);
        assert!(check_condition(&map, Condition::CautiousMonotonicity, CheckMode::Exhaustive).is_ok());
    }

    #[test]
    fn monotonicity_violation() {
        // C(U) = {w0} while C({w1}) = {w1}
        let u = Universe::unconstrained(&["p"]).unwrap();
        let map = ConsequenceMap::from_cores(u, vec![0, 1, 2, 1]).unwrap();
        assert!(satisfies_system(&map, System::C).is_ok());
        let v = satisfies_system(&map, System::CM).unwrap_err();
        assert_eq!(v.condition, "Monotonicity");
        assert!(rationality_check(&map, Rationality::RationalMonotonicity).is_ok());
    }
}
