//! Canonical models built from a closed consequence map, one per system,
//! and a check that each reproduces the map it was built from.

use std::collections::BTreeMap;
use std::fmt;

use fixedbitset::FixedBitSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closure::{satisfies_system, ConsequenceMap, System};
use crate::error::{Error, Result};
use crate::lattice::{hex, is_subset, Mask};
use crate::model::{relation_of_model, validate_with, Flavor, LabelMode, Model, ValidationReport};
use crate::universe::WorldSet;

/// Explicit canonical models are refused above this many states.
pub const MAX_CANONICAL_STATES: usize = 4096;

/// The set of worlds satisfying every consequence of `a`, i.e. its core.
pub fn normal_worlds(map: &ConsequenceMap, a: &WorldSet) -> WorldSet {
    map.core_of(a)
}

/// A canonical model together with the antecedents each state stands for.
#[derive(Debug, Clone)]
pub struct Canonical {
    pub model: Model,
    pub members: Vec<Vec<Mask>>,
}

impl Canonical {
    /// Model text followed by a `# class members:` comment block.
    pub fn to_text(&self) -> String {
        let n = self.model.universe().size();
        let mut out = self.model.to_text();
        out.push_str("# class members:\n");
        for (s, members) in self.members.iter().enumerate() {
            let list: Vec<String> = members.iter().map(|&m| hex(m, n)).collect();
            out.push_str(&format!("# {}: {}\n", self.model.name(s), list.join(" ")));
        }
        out
    }
}

fn require(map: &ConsequenceMap, sys: System) -> Result<()> {
    satisfies_system(map, sys).map_err(|v| Error::Precondition(format!("map is not {sys}-closed: {v}")))
}

fn check_states(count: usize) -> Result<()> {
    if count > MAX_CANONICAL_STATES {
        return Err(Error::TooLarge {
            what: "canonical model",
            unit: "states",
            limit: MAX_CANONICAL_STATES,
            actual: count,
        });
    }
    Ok(())
}

/// Equivalence classes of antecedents, keyed by their common core. On a
/// C-closed map `A ~ B` iff `C(A) = C(B)`. Classes come in order of their
/// smallest member.
fn classes(map: &ConsequenceMap) -> Vec<(Mask, Vec<Mask>)> {
    let mut by_core: BTreeMap<Mask, Vec<Mask>> = BTreeMap::new();
    for a in 0..=map.full() {
        by_core.entry(map.core(a)).or_default().push(a);
    }
    let mut out: Vec<(Mask, Vec<Mask>)> = by_core.into_iter().collect();
    out.sort_by_key(|(_, members)| members[0]);
    out
}

/// `≺` between classes: `[A] ≤ [B]` and `[A] ≠ [B]`, where `[A] ≤ [B]` iff
/// some member of `[A]` contains `C(B)`. Returned as `below` bitsets.
fn class_order(classes: &[(Mask, Vec<Mask>)]) -> Vec<FixedBitSet> {
    let k = classes.len();
    let mut below = vec![FixedBitSet::with_capacity(k); k];
    for (x, (_, members)) in classes.iter().enumerate() {
        for (y, (core_y, _)) in classes.iter().enumerate() {
            if x != y && members.iter().any(|&a| is_subset(*core_y, a)) {
                below[y].insert(x);
            }
        }
    }
    below
}

fn class_model(map: &ConsequenceMap, flavor: Flavor, below: &[FixedBitSet], classes: &[(Mask, Vec<Mask>)]) -> Result<Canonical> {
    let n = map.worlds();
    let names = classes.iter().map(|(_, m)| hex(m[0], n)).collect();
    let labels = classes
        .iter()
        .map(|(c, _)| WorldSet::from_mask(n, *c as u64))
        .collect();
    let pref = below
        .iter()
        .enumerate()
        .flat_map(|(t, b)| b.ones().map(move |s| (s, t)));
    let model = Model::new(map.universe().clone(), flavor, names, labels, pref)?;
    Ok(Canonical {
        model,
        members: classes.iter().map(|(_, m)| m.clone()).collect(),
    })
}

pub fn canonical_cumulative(map: &ConsequenceMap) -> Result<Canonical> {
    require(map, System::C)?;
    let classes = classes(map);
    check_states(classes.len())?;
    let below = class_order(&classes);
    class_model(map, Flavor::Cumulative, &below, &classes)
}

/// The cumulative construction with its preference replaced by the
/// transitive closure. Fails with the offending cycle when the closure is
/// reflexive.
pub fn canonical_ordered(map: &ConsequenceMap) -> Result<Canonical> {
    require(map, System::C)?;
    let classes = classes(map);
    check_states(classes.len())?;
    let direct = class_order(&classes);
    let k = classes.len();
    let mut closure = direct.clone();
    for m in 0..k {
        for t in 0..k {
            if closure[t].contains(m) {
                let below_m = closure[m].clone();
                closure[t].union_with(&below_m);
            }
        }
    }
    if let Some(t) = (0..k).find(|&t| closure[t].contains(t)) {
        let n = map.worlds();
        let cycle = cycle_through(&direct, t);
        let names: Vec<String> = cycle.iter().map(|&c| hex(classes[c].1[0], n)).collect();
        return Err(Error::Precondition(format!(
            "map is not CL-closed: preference cycle {}",
            names.join(" < ")
        )));
    }
    class_model(map, Flavor::CumulativeOrdered, &closure, &classes)
}

/// A cycle `t ≻ ... ≻ t` in the direct order, listed from `t` down.
fn cycle_through(below: &[FixedBitSet], t: usize) -> Vec<usize> {
    let k = below.len();
    let mut parent = vec![usize::MAX; k];
    let mut queue = std::collections::VecDeque::from([t]);
    while let Some(x) = queue.pop_front() {
        for s in below[x].ones() {
            if s == t {
                let mut path = vec![t];
                let mut cur = x;
                while cur != t {
                    path.push(cur);
                    cur = parent[cur];
                }
                path.push(t);
                path.reverse();
                return path;
            }
            if parent[s] == usize::MAX {
                parent[s] = x;
                queue.push_back(s);
            }
        }
    }
    vec![t]
}

/// States `(w, A)` with `w ∈ C(A)`, labelled `w`;
/// `(w, A) ≺ (v, B)` iff `C(A ∪ B) ⊆ A` and `w ∉ B`.
pub fn canonical_preferential(map: &ConsequenceMap) -> Result<Canonical> {
    require(map, System::P)?;
    let n = map.worlds();
    let states: Vec<(usize, Mask)> = (0..=map.full())
        .flat_map(|a| (0..n).filter(move |&w| map.core(a) >> w & 1 == 1).map(move |w| (w, a)))
        .collect();
    check_states(states.len())?;
    let names = states.iter().map(|&(w, a)| format!("w{w:02}@{}", hex(a, n))).collect();
    let labels = states.iter().map(|&(w, _)| WorldSet::from_positions(n, [w])).collect();
    let mut pref = Vec::new();
    for (i, &(w, a)) in states.iter().enumerate() {
        for (j, &(_, b)) in states.iter().enumerate() {
            if map.holds(a | b, a) && b >> w & 1 == 0 {
                pref.push((i, j));
            }
        }
    }
    let model = Model::new(map.universe().clone(), Flavor::Preferential, names, labels, pref)?;
    Ok(Canonical {
        model,
        members: states.iter().map(|&(_, a)| vec![a]).collect(),
    })
}

/// One state per antecedent with a non-empty core, labelled by that core.
pub fn canonical_simple_cumulative(map: &ConsequenceMap) -> Result<Canonical> {
    require(map, System::CM)?;
    let n = map.worlds();
    let antecedents: Vec<Mask> = (0..=map.full()).filter(|&a| map.core(a) != 0).collect();
    check_states(antecedents.len())?;
    let model = Model::new(
        map.universe().clone(),
        Flavor::SimpleCumulative,
        antecedents.iter().map(|&a| hex(a, n)).collect(),
        antecedents
            .iter()
            .map(|&a| WorldSet::from_mask(n, map.core(a) as u64))
            .collect(),
        [],
    )?;
    Ok(Canonical {
        model,
        members: antecedents.iter().map(|&a| vec![a]).collect(),
    })
}

/// One state per world that is normal for every antecedent containing it.
pub fn canonical_simple_preferential(map: &ConsequenceMap) -> Result<Canonical> {
    require(map, System::M)?;
    let n = map.worlds();
    let worlds: Vec<usize> = (0..n)
        .filter(|&w| (0..=map.full()).all(|a| a >> w & 1 == 0 || map.core(a) >> w & 1 == 1))
        .collect();
    let model = Model::new(
        map.universe().clone(),
        Flavor::SimplePreferential,
        worlds.iter().map(|w| format!("w{w:02}")).collect(),
        worlds.iter().map(|&w| WorldSet::from_positions(n, [w])).collect(),
        [],
    )?;
    Ok(Canonical {
        model,
        members: vec![Vec::new(); worlds.len()],
    })
}

pub fn canonical_for(map: &ConsequenceMap, sys: System) -> Result<Canonical> {
    match sys {
        System::C => canonical_cumulative(map),
        System::CL => canonical_ordered(map),
        System::P => canonical_preferential(map),
        System::CM => canonical_simple_cumulative(map),
        System::M => canonical_simple_preferential(map),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerificationMode {
    /// Model built, validated, and its whole relation compared.
    Explicit,
    /// Relation compared on sampled antecedents without building the model.
    Sampled { antecedents: usize },
    /// Too large to build or sample.
    Skipped,
}

#[derive(Debug, Clone)]
pub struct RepresentationReport {
    pub system: System,
    pub flavor: Flavor,
    pub mode: VerificationMode,
    pub states: Option<usize>,
    pub validation: Option<ValidationReport>,
    pub discrepancies: Vec<String>,
}

impl RepresentationReport {
    pub fn passed(&self) -> bool {
        self.discrepancies.is_empty() && self.mode != VerificationMode::Skipped
    }
}

impl fmt::Display for RepresentationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "system: {}", self.system)?;
        writeln!(f, "flavor: {}", self.flavor)?;
        match self.mode {
            VerificationMode::Explicit => writeln!(f, "verification: explicit")?,
            VerificationMode::Sampled { antecedents } => {
                writeln!(f, "verification: sampled ({antecedents} antecedents)")?
            }
            VerificationMode::Skipped => writeln!(f, "verification: skipped (too large)")?,
        }
        if let Some(s) = self.states {
            writeln!(f, "states: {s}")?;
        }
        for d in &self.discrepancies {
            writeln!(f, "discrepancy: {d}")?;
        }
        writeln!(f, "result: {}", if self.passed() { "pass" } else { "fail" })
    }
}

/// Largest universe on which the canonical model is always built explicitly.
const EXPLICIT_WORLDS: usize = 8;
const SAMPLED_ANTECEDENTS: usize = 128;
const SPOT_CHECKED_STATES: usize = 8;

/// Builds the canonical model for `sys`, validates its flavor and compares
/// the relation it defines with `map`.
pub fn verify_representation(map: &ConsequenceMap, sys: System) -> RepresentationReport {
    let flavor = Flavor::for_system(sys);
    let mut report = RepresentationReport {
        system: sys,
        flavor,
        mode: VerificationMode::Explicit,
        states: None,
        validation: None,
        discrepancies: Vec::new(),
    };
    if let Err(v) = satisfies_system(map, sys) {
        report.discrepancies.push(format!("input is not {sys}-closed: {v}"));
        return report;
    }
    if map.worlds() > EXPLICIT_WORLDS {
        match sys {
            System::P => return sampled_preferential(map, report),
            System::CM => return sampled_simple_cumulative(map, report),
            _ => {}
        }
    }
    let canonical = match canonical_for(map, sys) {
        Ok(c) => c,
        Err(Error::TooLarge { .. }) => {
            report.mode = VerificationMode::Skipped;
            return report;
        }
        Err(e) => {
            report.discrepancies.push(e.to_string());
            return report;
        }
    };
    let m = &canonical.model;
    report.states = Some(m.state_count());
    let validation = validate_with(m, LabelMode::Lax);
    for issue in &validation.issues {
        report.discrepancies.push(format!("validation: {issue:?}"));
    }
    if matches!(sys, System::C | System::CL) && validation.strong_cumulative == Some(false) {
        report.discrepancies.push("canonical model is not strong cumulative".into());
    }
    report.validation = Some(validation);
    match relation_of_model(m) {
        Ok(defined) => {
            let n = map.worlds();
            if let Some(a) = (0..=map.full()).find(|&a| defined.core(a) != map.core(a)) {
                report.discrepancies.push(format!(
                    "relation differs at A={}: model core {} vs map core {}",
                    hex(a, n),
                    hex(defined.core(a), n),
                    hex(map.core(a), n)
                ));
            }
        }
        Err(e) => report.discrepancies.push(e.to_string()),
    }
    report
}

fn sample_antecedents(map: &ConsequenceMap) -> Vec<Mask> {
    let mut rng = ChaCha8Rng::seed_from_u64(map.worlds() as u64);
    let full = map.full();
    let mut out = vec![0, full];
    out.extend((0..SAMPLED_ANTECEDENTS - 2).map(|_| rng.gen::<Mask>() & full));
    out
}

/// Preferential construction checked without materializing its states.
/// For each sampled `X`, the minimal states of `hat(X)` are predicted as
/// `{(w, B) : w ∈ X ∩ C(B), C(X ∪ B) ⊆ B}`; a few predictions are then
/// re-derived from the definition of `≺`, and the union of their labels is
/// compared with `C(X)`. Transitivity and irreflexivity of `≺` are checked
/// on sampled triples.
fn sampled_preferential(map: &ConsequenceMap, mut report: RepresentationReport) -> RepresentationReport {
    let n = map.worlds();
    let full = map.full();
    let xs = sample_antecedents(map);
    report.mode = VerificationMode::Sampled { antecedents: xs.len() };
    let c = |a: Mask| map.core(a);
    let prefers = |(w, a): (usize, Mask), (_, b): (usize, Mask)| map.holds(a | b, a) && b >> w & 1 == 0;
    // (w, B) minimal in hat(X) by the definition: no (v, A) in hat(X) below it
    let minimal_by_definition = |x: Mask, state: (usize, Mask)| {
        (0..=full).all(|a| {
            let candidates = c(a) & x;
            candidates == 0 || !map.holds(a | state.1, a) || candidates & !state.1 == 0
        })
    };
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for &x in &xs {
        let mut core = 0;
        let mut predicted = Vec::new();
        for b in 0..=full {
            let hits = c(b) & x;
            if hits != 0 && map.holds(x | b, b) {
                core |= hits;
                predicted.push(b);
            }
        }
        if core != c(x) {
            report.discrepancies.push(format!(
                "relation differs at A={}: model core {} vs map core {}",
                hex(x, n),
                hex(core, n),
                hex(c(x), n)
            ));
            break;
        }
        for _ in 0..SPOT_CHECKED_STATES.min(predicted.len()) {
            let b = predicted[rng.gen_range(0..predicted.len())];
            let hits = c(b) & x;
            let w = (0..n).find(|&w| hits >> w & 1 == 1).expect("non-empty");
            if !minimal_by_definition(x, (w, b)) {
                report.discrepancies.push(format!(
                    "state w{w:02}@{} predicted minimal in hat({}) is not",
                    hex(b, n),
                    hex(x, n)
                ));
            }
        }
    }
    for _ in 0..10_000 {
        let pick = |rng: &mut ChaCha8Rng| loop {
            let a = rng.gen::<Mask>() & full;
            if c(a) != 0 {
                let w = (0..n).filter(|&w| c(a) >> w & 1 == 1).nth(rng.gen_range(0..c(a).count_ones() as usize));
                return (w.expect("in range"), a);
            }
        };
        if c(full) == 0 {
            break;
        }
        let (s, t, u) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        if prefers(s, s) {
            report.discrepancies.push(format!("preference is reflexive at w{:02}@{}", s.0, hex(s.1, n)));
            break;
        }
        if prefers(s, t) && prefers(t, u) && !prefers(s, u) {
            report.discrepancies.push("preference is not transitive".into());
            break;
        }
    }
    report
}

/// Simple cumulative construction checked on sampled antecedents: with an
/// empty preference every state of `hat(X)` is minimal.
fn sampled_simple_cumulative(map: &ConsequenceMap, mut report: RepresentationReport) -> RepresentationReport {
    let n = map.worlds();
    let xs = sample_antecedents(map);
    report.mode = VerificationMode::Sampled { antecedents: xs.len() };
    for &x in &xs {
        let core = (0..=map.full())
            .map(|a| map.core(a))
            .filter(|&ca| ca != 0 && is_subset(ca, x))
            .fold(0, |acc, ca| acc | ca);
        if core != map.core(x) {
            report.discrepancies.push(format!(
                "relation differs at A={}: model core {} vs map core {}",
                hex(x, n),
                hex(core, n),
                hex(map.core(x), n)
            ));
            break;
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::{close, initial_map};
    use crate::kb::parse_kb;
    use crate::model::fixture;

    fn closed(text: &str, sys: System) -> ConsequenceMap {
        close(&initial_map(&parse_kb(text).unwrap()).unwrap(), sys).0
    }

    #[test]
    fn one_variable_empty_kb() {
        let map = closed("vars: p", System::C);
        let c = canonical_cumulative(&map).unwrap();
        assert_eq!(c.model.state_count(), 4);
        assert!(verify_representation(&map, System::C).passed());
    }

    #[test]
    fn loop_kb_classes_merge() {
        let map = closed("vars: p0 p1 p2\nassume: p0 |~ p1\nassume: p1 |~ p2\nassume: p2 |~ p0", System::CL);
        let c = canonical_ordered(&map).unwrap();
        let u = map.universe();
        let mask = |f: &str| u.worlds_of(&f.parse().unwrap()).unwrap().to_mask() as Mask;
        let class_of = |a: Mask| c.members.iter().position(|m| m.contains(&a)).unwrap();
        assert_eq!(class_of(mask("p0")), class_of(mask("p1")));
        assert_eq!(class_of(mask("p1")), class_of(mask("p2")));
        assert!(verify_representation(&map, System::CL).passed());
    }

    #[test]
    fn false_consequent_uses_lax_label() {
        let map = closed("vars: p q\nassume: p |~ false", System::C);
        let r = verify_representation(&map, System::C);
        assert!(r.passed(), "{r}");
        assert!(!r.validation.unwrap().lax_empty_labels.is_empty());
    }

    #[test]
    fn simple_preferential_states() {
        let map = closed("vars: p q\nassume: p |~ q", System::M);
        let c = canonical_simple_preferential(&map).unwrap();
        let u = map.universe();
        let expected = u.worlds_of(&"p -> q".parse().unwrap()).unwrap();
        let got = WorldSet::from_positions(4, c.model.labels().iter().flat_map(|l| l.iter()));
        assert_eq!(got, expected);
        let map = closed("vars: p q\nassume: p |~ false", System::M);
        let c = canonical_simple_preferential(&map).unwrap();
        assert_eq!(c.model.state_count(), 2);
    }

    #[test]
    fn penguin_round_trips() {
        let text = "vars: p b f\nassume: p |~ b\nassume: p |~ ~f\nassume: b |~ f";
        for sys in System::ALL {
            let map = closed(text, sys);
            let r = verify_representation(&map, sys);
            assert!(r.passed(), "{sys}: {r}");
        }
    }

    #[test]
    fn loop_fixture_relation_is_cumulative() {
        let map = relation_of_model(&fixture("loop_counterexample").unwrap()).unwrap();
        assert!(verify_representation(&map, System::C).passed());
        assert!(canonical_ordered(&map).is_err());
    }

    #[test]
    fn text_has_member_block() {
        let map = closed("vars: p", System::C);
        let text = canonical_cumulative(&map).unwrap().to_text();
        assert!(text.contains("# class members:\n# 0: 0\n"), "{text}");
        assert!(crate::model::parse_model(&text).is_ok());
    }
}
