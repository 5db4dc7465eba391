//! Cumulative, ordered, preferential and simple models: satisfaction,
//! minimality, smoothness, validation and the relation a model defines.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closure::{ConsequenceMap, System};
use crate::error::{Error, Result};
use crate::formula::{parse_formula, Formula};
use crate::kb::{directive, header_lines, HeaderBuilder};
use crate::lattice::Mask;
use crate::universe::{Universe, WorldSet};

/// Set of state indices.
pub type StateSet = FixedBitSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Flavor {
    Cumulative,
    CumulativeOrdered,
    Preferential,
    SimpleCumulative,
    SimplePreferential,
}

impl Flavor {
    pub const ALL: [Flavor; 5] = [
        Flavor::Cumulative,
        Flavor::CumulativeOrdered,
        Flavor::Preferential,
        Flavor::SimpleCumulative,
        Flavor::SimplePreferential,
    ];

    /// The flavor characterizing `sys`.
    pub fn for_system(sys: System) -> Flavor {
        match sys {
            System::C => Flavor::Cumulative,
            System::CL => Flavor::CumulativeOrdered,
            System::P => Flavor::Preferential,
            System::CM => Flavor::SimpleCumulative,
            System::M => Flavor::SimplePreferential,
        }
    }

    pub fn system(self) -> System {
        match self {
            Flavor::Cumulative => System::C,
            Flavor::CumulativeOrdered => System::CL,
            Flavor::Preferential => System::P,
            Flavor::SimpleCumulative => System::CM,
            Flavor::SimplePreferential => System::M,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Flavor::Cumulative => "Cumulative",
            Flavor::CumulativeOrdered => "CumulativeOrdered",
            Flavor::Preferential => "Preferential",
            Flavor::SimpleCumulative => "SimpleCumulative",
            Flavor::SimplePreferential => "SimplePreferential",
        }
    }

    pub fn singleton_labels(self) -> bool {
        matches!(self, Flavor::Preferential | Flavor::SimplePreferential)
    }

    pub fn strict_order(self) -> bool {
        matches!(self, Flavor::CumulativeOrdered | Flavor::Preferential)
    }

    pub fn empty_pref(self) -> bool {
        matches!(self, Flavor::SimpleCumulative | Flavor::SimplePreferential)
    }
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Flavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Flavor::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown flavor `{s}`")))
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct Model {
    universe: Universe,
    flavor: Flavor,
    names: Vec<String>,
    labels: Vec<WorldSet>,
    /// `below[t]` holds every `s` with `s ≺ t`.
    below: Vec<FixedBitSet>,
}

impl fmt::Debug for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Model")
            .field("flavor", &self.flavor)
            .field("names", &self.names)
            .field("labels", &self.labels)
            .field("pref", &self.pref_pairs())
            .finish()
    }
}

impl Model {
    /// `pref` lists pairs `(s, t)` meaning `s ≺ t`, by state index.
    pub fn new(
        universe: Universe,
        flavor: Flavor,
        names: Vec<String>,
        labels: Vec<WorldSet>,
        pref: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let n = names.len();
        if labels.len() != n {
            return Err(Error::Precondition(format!("{n} states but {} labels", labels.len())));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !is_state_name(name) {
                return Err(Error::Precondition(format!("invalid state name `{name}`")));
            }
            if !seen.insert(name.as_str()) {
                return Err(Error::Precondition(format!("duplicate state `{name}`")));
            }
        }
        if let Some(l) = labels.iter().find(|l| l.capacity() != universe.size()) {
            return Err(Error::Precondition(format!(
                "label over {} worlds in a universe of {}",
                l.capacity(),
                universe.size()
            )));
        }
        let mut below = vec![FixedBitSet::with_capacity(n); n];
        for (s, t) in pref {
            if s >= n || t >= n {
                return Err(Error::Precondition(format!("preference ({s}, {t}) out of range")));
            }
            below[t].insert(s);
        }
        Ok(Model {
            universe,
            flavor,
            names,
            labels,
            below,
        })
    }

    pub fn with_flavor(mut self, flavor: Flavor) -> Self {
        self.flavor = flavor;
        self
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn state_count(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, s: usize) -> &str {
        &self.names[s]
    }

    pub fn state(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn labels(&self) -> &[WorldSet] {
        &self.labels
    }

    pub fn label(&self, s: usize) -> &WorldSet {
        &self.labels[s]
    }

    /// `s ≺ t`
    pub fn prefers(&self, s: usize, t: usize) -> bool {
        self.below[t].contains(s)
    }

    pub fn below(&self, t: usize) -> &FixedBitSet {
        &self.below[t]
    }

    pub fn pref_pairs(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = self
            .below
            .iter()
            .enumerate()
            .flat_map(|(t, b)| b.ones().map(move |s| (s, t)))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn pref_is_empty(&self) -> bool {
        self.below.iter().all(|b| b.is_clear())
    }

    pub fn all_states(&self) -> StateSet {
        let mut s = StateSet::with_capacity(self.state_count());
        s.insert_range(..);
        s
    }

    pub fn hat(&self, a: &WorldSet) -> StateSet {
        hat(self, a)
    }

    pub fn minimal_states(&self, ss: &StateSet) -> StateSet {
        minimal_states(self, ss)
    }

    fn label_masks(&self) -> Vec<Mask> {
        self.labels.iter().map(|l| l.to_mask() as Mask).collect()
    }

    /// Serializes to the model text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("flavor: {}\n", self.flavor);
        out.push_str(&header_lines(&self.universe));
        for (name, label) in self.names.iter().zip(&self.labels) {
            out.push_str(&format!("state {name} : {}\n", self.label_formula(label)));
        }
        for (s, t) in self.pref_pairs() {
            out.push_str(&format!("pref {} < {}\n", self.names[s], self.names[t]));
        }
        out
    }

    fn label_formula(&self, label: &WorldSet) -> Formula {
        self.universe.dnf(label)
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse_model(text)
    }
}

fn is_state_name(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || "_-@.".contains(c))
}

/// States all of whose labelled worlds lie in `a`. A state with an empty
/// label belongs to every hat.
pub fn hat(m: &Model, a: &WorldSet) -> StateSet {
    let mut out = StateSet::with_capacity(m.state_count());
    for (s, l) in m.labels.iter().enumerate() {
        if l.is_subset(a) {
            out.insert(s);
        }
    }
    out
}

/// Members of `ss` with no `≺`-predecessor in `ss`.
pub fn minimal_states(m: &Model, ss: &StateSet) -> StateSet {
    let mut out = StateSet::with_capacity(m.state_count());
    for t in ss.ones() {
        if m.below[t].is_disjoint(ss) {
            out.insert(t);
        }
    }
    out
}

/// Union of the labels of the minimal states of `hat(a)`.
pub fn consequence_core_of_model(m: &Model, a: &WorldSet) -> WorldSet {
    let min = minimal_states(m, &hat(m, a));
    let mut out = m.universe.none();
    for s in min.ones() {
        out.union_with(&m.labels[s]);
    }
    out
}

/// `A ↦ consequence_core_of_model(m, A)` over the whole lattice.
pub fn relation_of_model(m: &Model) -> Result<ConsequenceMap> {
    m.universe.check_lattice("relation of a model")?;
    let masks = m.label_masks();
    let n = m.state_count();
    let core = (0..1u32 << m.universe.size())
        .map(|a| {
            let mut h = StateSet::with_capacity(n);
            for (s, &l) in masks.iter().enumerate() {
                if l & !a == 0 {
                    h.insert(s);
                }
            }
            h.ones()
                .filter(|&t| m.below[t].is_disjoint(&h))
                .fold(0, |acc, t| acc | masks[t])
        })
        .collect();
    ConsequenceMap::from_cores(m.universe.clone(), core)
}

/// A hat-set that is not smooth: `state` is neither minimal in `hat(set)`
/// nor preceded by a minimal member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NotSmooth {
    pub set: WorldSet,
    pub state: usize,
}

/// Every distinct hat-set `hat(A)` for `A ⊆ U`, with one `A` producing it.
fn distinct_hats(m: &Model) -> Vec<(Mask, StateSet)> {
    let masks = m.label_masks();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for a in 0..1u32 << m.universe.size() {
        let mut h = StateSet::with_capacity(m.state_count());
        for (s, &l) in masks.iter().enumerate() {
            if l & !a == 0 {
                h.insert(s);
            }
        }
        if seen.insert(h.clone()) {
            out.push((a, h));
        }
    }
    out
}

fn smoothness_failure(m: &Model, hats: &[(Mask, StateSet)]) -> Option<NotSmooth> {
    for (a, h) in hats {
        let min = minimal_states(m, h);
        for t in h.ones() {
            if !min.contains(t) && m.below[t].is_disjoint(&min) {
                return Some(NotSmooth {
                    set: WorldSet::from_mask(m.universe.size(), *a as u64),
                    state: t,
                });
            }
        }
    }
    None
}

/// Smoothness of every definable hat-set, with a witness on failure.
pub fn smoothness_witness(m: &Model) -> Result<Option<NotSmooth>> {
    m.universe.check_lattice("smoothness check")?;
    Ok(smoothness_failure(m, &distinct_hats(m)))
}

pub fn is_smooth(m: &Model) -> Result<bool> {
    Ok(smoothness_witness(m)?.is_none())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LabelMode {
    #[default]
    Strict,
    /// Empty labels are accepted and listed in the report.
    Lax,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Issue {
    EmptyLabel { state: usize },
    LabelNotSingleton { state: usize, size: usize },
    PrefNotEmpty { pairs: usize },
    Reflexive { state: usize },
    /// `s ≺ t ≺ u` without `s ≺ u`.
    NotTransitive { s: usize, t: usize, u: usize },
    NotSmooth(NotSmooth),
    /// Smoothness of a non-order could not be enumerated.
    SmoothnessUnchecked,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub flavor: Flavor,
    pub issues: Vec<Issue>,
    /// States with an empty label accepted in lax mode.
    pub lax_empty_labels: Vec<usize>,
    /// Asymmetric preference and a minimum in every non-empty definable
    /// hat-set; `None` when the universe is too large to enumerate.
    pub strong_cumulative: Option<bool>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn render(&self, m: &Model) -> String {
        let name = |s: &usize| m.name(*s).to_string();
        let mut out = format!(
            "flavor: {}\nvalid: {}\n",
            self.flavor,
            if self.is_valid() { "yes" } else { "no" }
        );
        for issue in &self.issues {
            let line = match issue {
                Issue::EmptyLabel { state } => format!("state {} has an empty label", name(state)),
                Issue::LabelNotSingleton { state, size } => {
                    format!("state {} is labelled with {size} worlds, expected 1", name(state))
                }
                Issue::PrefNotEmpty { pairs } => format!("preference has {pairs} pairs, expected none"),
                Issue::Reflexive { state } => format!("preference is reflexive at {}", name(state)),
                Issue::NotTransitive { s, t, u } => format!(
                    "preference is not transitive: {} < {} < {} but not {} < {}",
                    name(s),
                    name(t),
                    name(u),
                    name(s),
                    name(u)
                ),
                Issue::NotSmooth(w) => format!(
                    "not smooth: state {} in the hat of {} has no minimal state below it",
                    name(&w.state),
                    m.universe().dnf(&w.set)
                ),
                Issue::SmoothnessUnchecked => "smoothness not checked: universe too large".to_string(),
            };
            out.push_str("issue: ");
            out.push_str(&line);
            out.push('\n');
        }
        for s in &self.lax_empty_labels {
            out.push_str(&format!("note: state {} has an empty label (lax mode)\n", name(s)));
        }
        match self.strong_cumulative {
            Some(b) => out.push_str(&format!("strong cumulative: {}\n", if b { "yes" } else { "no" })),
            None => out.push_str("strong cumulative: unchecked\n"),
        }
        out
    }
}

pub fn validate(m: &Model) -> ValidationReport {
    validate_with(m, LabelMode::Strict)
}

pub fn validate_with(m: &Model, mode: LabelMode) -> ValidationReport {
    let flavor = m.flavor;
    let mut issues = Vec::new();
    let mut lax_empty_labels = Vec::new();
    for (s, l) in m.labels.iter().enumerate() {
        let size = l.count();
        if size == 0 {
            match mode {
                LabelMode::Strict => issues.push(Issue::EmptyLabel { state: s }),
                LabelMode::Lax => lax_empty_labels.push(s),
            }
        } else if flavor.singleton_labels() && size != 1 {
            issues.push(Issue::LabelNotSingleton { state: s, size });
        }
    }
    if flavor.empty_pref() && !m.pref_is_empty() {
        issues.push(Issue::PrefNotEmpty {
            pairs: m.pref_pairs().len(),
        });
    }
    let order_issues = strict_order_issues(m);
    if flavor.strict_order() {
        issues.extend(order_issues.iter().cloned());
    }

    let lattice_ok = m.universe.check_lattice("validation").is_ok();
    let hats = lattice_ok.then(|| distinct_hats(m));
    // Finite strict orders are always smooth.
    if !order_issues.is_empty() {
        match &hats {
            Some(hats) => {
                if let Some(w) = smoothness_failure(m, hats) {
                    issues.push(Issue::NotSmooth(w));
                }
            }
            None => issues.push(Issue::SmoothnessUnchecked),
        }
    }

    let strong_cumulative = hats.map(|hats| is_asymmetric(m) && hats.iter().all(|(_, h)| has_minimum(m, h)));
    ValidationReport {
        flavor,
        issues,
        lax_empty_labels,
        strong_cumulative,
    }
}

fn strict_order_issues(m: &Model) -> Vec<Issue> {
    let mut out = Vec::new();
    for t in 0..m.state_count() {
        if m.prefers(t, t) {
            out.push(Issue::Reflexive { state: t });
        }
    }
    'outer: for t in 0..m.state_count() {
        for s in m.below[t].ones() {
            // everything below s must be below t
            if let Some(x) = m.below[s].ones().find(|&x| !m.below[t].contains(x)) {
                out.push(Issue::NotTransitive { s: x, t: s, u: t });
                break 'outer;
            }
        }
    }
    out
}

fn is_asymmetric(m: &Model) -> bool {
    (0..m.state_count()).all(|t| m.below[t].ones().all(|s| !m.prefers(t, s)))
}

/// Some `t ∈ h` with `t ≺ s` for every other `s ∈ h`; empty sets pass.
fn has_minimum(m: &Model, h: &StateSet) -> bool {
    let count = h.count_ones(..);
    count == 0 || h.ones().any(|t| h.ones().all(|s| s == t || m.prefers(t, s)))
}

/// Relabels every state with the single world that makes a variable true
/// iff it is true throughout the original label. Requires a valid
/// cumulative ordered model; the projected world must be admissible.
pub fn horn_projection(m: &Model) -> Result<Model> {
    if m.flavor != Flavor::CumulativeOrdered {
        return Err(Error::Precondition(format!(
            "horn projection needs a CumulativeOrdered model, got {}",
            m.flavor
        )));
    }
    let report = validate(m);
    if !report.is_valid() {
        return Err(Error::Precondition(format!("model is not valid: {} issue(s)", report.issues.len())));
    }
    let u = &m.universe;
    let all_true = (1u64 << u.vars().len()) - 1;
    let mut labels = Vec::with_capacity(m.state_count());
    for (s, l) in m.labels.iter().enumerate() {
        let id = l.iter().fold(all_true, |acc, p| acc & u.world_id(p) as u64) as u32;
        let pos = u.position_of(id).ok_or_else(|| {
            Error::Precondition(format!(
                "projected world for state {} is outside the universe",
                m.names[s]
            ))
        })?;
        labels.push(WorldSet::from_positions(u.size(), [pos]));
    }
    Model::new(
        u.clone(),
        Flavor::Preferential,
        m.names.clone(),
        labels,
        m.pref_pairs(),
    )
}

pub const FIXTURES: [&str; 3] = ["loop_counterexample", "shoham_counterexample", "single_chain"];

pub fn fixture(name: &str) -> Result<Model> {
    let text = match name {
        "loop_counterexample" => LOOP_COUNTEREXAMPLE,
        "shoham_counterexample" => SHOHAM_COUNTEREXAMPLE,
        "single_chain" => SINGLE_CHAIN,
        other => return Err(Error::UnknownFixture(other.to_string())),
    };
    parse_model(text)
}

const LOOP_COUNTEREXAMPLE: &str = "\
flavor: Cumulative
vars: p0 p1 p2
state s_1 : p0 & p1 | p1 & p2 | p2 & p0
state s0 : p0 & p1
state s1 : p1 & p2
state s2 : p2 & p0
pref s_1 < s0
pref s_1 < s1
pref s_1 < s2
pref s1 < s0
pref s2 < s1
pref s0 < s2
";

const SHOHAM_COUNTEREXAMPLE: &str = "\
flavor: Preferential
vars: p q
state s0 : p & ~q
state s1 : ~p & ~q
state s2 : p & q
state s3 : p & q
pref s0 < s2
pref s1 < s3
";

const SINGLE_CHAIN: &str = "\
flavor: Preferential
vars: p
state a : p
state b : p
pref a < b
";

pub fn parse_model(text: &str) -> Result<Model> {
    let mut header = HeaderBuilder::default();
    let mut flavor = None;
    let mut states: Vec<(usize, String, Formula)> = Vec::new();
    let mut prefs: Vec<(usize, String, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let Some((key, rest)) = directive(raw) else {
            continue;
        };
        if header.accept(line_no, key, rest)? {
            continue;
        }
        if key == "flavor" {
            if flavor.is_some() {
                return Err(Error::at_line(line_no, "duplicate `flavor:` line"));
            }
            flavor = Some(rest.parse::<Flavor>().map_err(|e| Error::at_line(line_no, e))?);
        } else if let Some(name) = key.strip_prefix("state ") {
            let f = parse_formula(rest).map_err(|e| Error::at_line(line_no, e))?;
            states.push((line_no, name.trim().to_string(), f));
        } else if let Some(body) = key.strip_prefix("pref ") {
            let (s, t) = body
                .split_once('<')
                .ok_or_else(|| Error::at_line(line_no, "expected `pref NAME < NAME`"))?;
            prefs.push((line_no, s.trim().to_string(), t.trim().to_string()));
        } else {
            return Err(Error::at_line(line_no, format!("unknown directive `{key}`")));
        }
    }
    let universe = header.build()?;
    let flavor = flavor.ok_or_else(|| Error::at_line(0, "missing `flavor:` line"))?;
    let mut names = Vec::new();
    let mut labels = Vec::new();
    for (line, name, f) in states {
        if !is_state_name(&name) {
            return Err(Error::at_line(line, format!("invalid state name `{name}`")));
        }
        if names.contains(&name) {
            return Err(Error::at_line(line, format!("duplicate state `{name}`")));
        }
        labels.push(universe.worlds_of(&f).map_err(|e| Error::at_line(line, e))?);
        names.push(name);
    }
    let index = |line: usize, n: &str| {
        names
            .iter()
            .position(|x| x == n)
            .ok_or_else(|| Error::at_line(line, format!("unknown state `{n}`")))
    };
    let pairs = prefs
        .iter()
        .map(|(line, s, t)| Ok((index(*line, s)?, index(*line, t)?)))
        .collect::<Result<Vec<_>>>()?;
    Model::new(universe, flavor, names, labels, pairs)
}

/// Deterministic random model of the given flavor.
///
/// Labels are non-empty (singletons for preferential flavors). Ordered
/// flavors get the transitive closure of a random DAG with edge
/// probability `density`; `Cumulative` gets a random asymmetric relation,
/// redrawn until smooth, after 64 failed draws falling back to a DAG.
pub fn random_model(
    flavor: Flavor,
    universe: &Universe,
    state_count: usize,
    density: f64,
    seed: u64,
) -> Result<Model> {
    if state_count > 0 && universe.is_empty() {
        return Err(Error::Precondition("cannot label states in an empty universe".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let size = universe.size();
    let labels: Vec<WorldSet> = (0..state_count)
        .map(|_| {
            if flavor.singleton_labels() {
                WorldSet::from_positions(size, [rng.gen_range(0..size)])
            } else {
                random_label(&mut rng, size)
            }
        })
        .collect();
    let names: Vec<String> = (0..state_count).map(|i| format!("s{i}")).collect();
    let density = density.clamp(0.0, 1.0);

    let pref = match flavor {
        Flavor::SimpleCumulative | Flavor::SimplePreferential => Vec::new(),
        Flavor::CumulativeOrdered | Flavor::Preferential => random_order(&mut rng, state_count, density),
        Flavor::Cumulative => {
            let mut found = None;
            if universe.check_lattice("random model").is_ok() {
                for _ in 0..64 {
                    let pref = random_asymmetric(&mut rng, state_count, density);
                    let m = Model::new(universe.clone(), flavor, names.clone(), labels.clone(), pref.clone())?;
                    if is_smooth(&m)? {
                        found = Some(pref);
                        break;
                    }
                }
            }
            match found {
                Some(p) => p,
                None => random_order(&mut rng, state_count, density),
            }
        }
    };
    Model::new(universe.clone(), flavor, names, labels, pref)
}

fn random_label(rng: &mut ChaCha8Rng, size: usize) -> WorldSet {
    let p: f64 = rng.gen_range(0.05..0.95);
    loop {
        let set = WorldSet::from_positions(size, (0..size).filter(|_| rng.gen_bool(p)));
        if !set.is_empty() {
            return set;
        }
    }
}

/// Transitive closure of a random DAG over a random topological order.
fn random_order(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Vec<(usize, usize)> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut reach = vec![FixedBitSet::with_capacity(n); n];
    for j in 0..n {
        for i in 0..j {
            if rng.gen_bool(density) {
                reach[perm[j]].insert(perm[i]);
            }
        }
    }
    // perm order is topological: close predecessors of predecessors
    for &t in &perm {
        let preds: Vec<usize> = reach[t].ones().collect();
        for s in preds {
            let below_s = reach[s].clone();
            reach[t].union_with(&below_s);
        }
    }
    let mut out: Vec<(usize, usize)> = reach
        .iter()
        .enumerate()
        .flat_map(|(t, b)| b.ones().map(move |s| (s, t)))
        .collect();
    out.sort_unstable();
    out
}

fn random_asymmetric(rng: &mut ChaCha8Rng, n: usize, density: f64) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for s in 0..n {
        for t in s + 1..n {
            if rng.gen_bool(density) {
                out.push(if rng.gen_bool(0.5) { (s, t) } else { (t, s) });
            }
        }
    }
    out
}
