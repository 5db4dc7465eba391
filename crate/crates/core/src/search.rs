//! Countermodel search and bounded forward proof search, for universes where
//! the full closure is out of reach or a model-level certificate is wanted.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closure::{verify_trace, Rule, System, TraceEvent};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::kb::{Assertion, KnowledgeBase, SemanticPair};
use crate::model::{consequence_core_of_model, relation_of_model, validate, Flavor, Model};
use crate::universe::{check_worlds, Universe, WorldSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_states: usize,
    pub max_candidates: usize,
    pub time_limit: Duration,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_states: 4,
            max_candidates: 200_000,
            time_limit: Duration::from_secs(20),
            seed: 0,
        }
    }
}

/// Largest number of states enumerated exhaustively before random restarts.
const EXHAUSTIVE_STATES: usize = 3;
/// Label pools beyond this size are truncated in the exhaustive phase.
const LABEL_POOL_CAP: usize = 64;

struct Candidate {
    labels: Vec<WorldSet>,
    /// `below[t]` as a bit mask over states.
    below: Vec<u64>,
}

impl Candidate {
    fn core_within(&self, a: &WorldSet, b: &WorldSet) -> bool {
        let mut hat = 0u64;
        for (s, l) in self.labels.iter().enumerate() {
            if l.is_subset(a) {
                hat |= 1 << s;
            }
        }
        (0..self.labels.len())
            .filter(|&t| hat >> t & 1 == 1 && self.below[t] & hat == 0)
            .all(|t| self.labels[t].is_subset(b))
    }

    fn refutes(&self, kb: &[SemanticPair], q: &SemanticPair) -> bool {
        !self.core_within(&q.antecedent, &q.consequent)
            && kb.iter().all(|p| self.core_within(&p.antecedent, &p.consequent))
    }

    fn into_model(self, universe: &Universe, flavor: Flavor) -> Result<Model> {
        let n = self.labels.len();
        let names = (0..n).map(|i| format!("s{i}")).collect();
        let pref: Vec<(usize, usize)> = (0..n)
            .flat_map(|t| {
                let b = self.below[t];
                (0..n).filter(move |&s| b >> s & 1 == 1).map(move |s| (s, t))
            })
            .collect();
        Model::new(universe.clone(), flavor, names, self.labels, pref)
    }
}

/// Searches for a valid model of `flavor` satisfying every assertion of `kb`
/// and violating `q`. Exhaustive over small state counts and a pool of
/// labels, then random restarts. `None` carries no claim.
pub fn find_countermodel(
    kb: &KnowledgeBase,
    q: &Assertion,
    flavor: Flavor,
    budget: &SearchBudget,
) -> Result<Option<Model>> {
    let u = &kb.universe;
    let qp = q.semantic_pair(u)?;
    let pairs = kb.semantic_pairs();
    if u.is_empty() || budget.max_states == 0 {
        return Ok(None);
    }
    let max_states = budget.max_states.min(64);
    let start = Instant::now();
    let mut tried = 0usize;
    let out_of_budget = |tried: usize| tried >= budget.max_candidates || start.elapsed() > budget.time_limit;

    let accept = |c: Candidate| -> Result<Option<Model>> {
        let m = c.into_model(u, flavor)?;
        if !validate(&m).is_valid() {
            return Ok(None);
        }
        let holds = |p: &SemanticPair| consequence_core_of_model(&m, &p.antecedent).is_subset(&p.consequent);
        Ok((pairs.iter().all(holds) && !holds(&qp)).then_some(m))
    };

    let pool = label_pool(u, flavor, &pairs, &qp);
    for k in 1..=max_states.min(EXHAUSTIVE_STATES) {
        let orders = relations(k, flavor);
        let mut idx = vec![0usize; k];
        'labels: loop {
            let labels: Vec<WorldSet> = idx.iter().map(|&i| pool[i].clone()).collect();
            for below in &orders {
                tried += 1;
                if tried.is_multiple_of(1024) && out_of_budget(tried) {
                    return Ok(None);
                }
                let c = Candidate {
                    labels: labels.clone(),
                    below: below.clone(),
                };
                if c.refutes(&pairs, &qp) {
                    if let Some(m) = accept(c)? {
                        return Ok(Some(m));
                    }
                }
            }
            // next label tuple in lexicographic order
            let mut pos = k;
            loop {
                if pos == 0 {
                    break 'labels;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < pool.len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let size = u.size();
    while !out_of_budget(tried) {
        tried += 1;
        let k = rng.gen_range(1..=max_states);
        let labels: Vec<WorldSet> = (0..k)
            .map(|_| {
                if flavor.singleton_labels() {
                    WorldSet::from_positions(size, [rng.gen_range(0..size)])
                } else if rng.gen_bool(0.5) {
                    pool.choose(&mut rng).expect("non-empty pool").clone()
                } else {
                    let p: f64 = rng.gen_range(0.1..0.9);
                    let s = WorldSet::from_positions(size, (0..size).filter(|_| rng.gen_bool(p)));
                    if s.is_empty() {
                        WorldSet::from_positions(size, [rng.gen_range(0..size)])
                    } else {
                        s
                    }
                }
            })
            .collect();
        let density: f64 = rng.gen_range(0.1..0.9);
        let below = random_relation(&mut rng, k, flavor, density);
        let c = Candidate { labels, below };
        if c.refutes(&pairs, &qp) {
            if let Some(m) = accept(c)? {
                return Ok(Some(m));
            }
        }
    }
    Ok(None)
}

/// Candidate labels for the exhaustive phase: all singletons, plus for
/// set-labelled flavors the Boolean combinations of the sets mentioned by
/// the knowledge base and the query.
fn label_pool(u: &Universe, flavor: Flavor, pairs: &[SemanticPair], q: &SemanticPair) -> Vec<WorldSet> {
    let size = u.size();
    let mut pool: Vec<WorldSet> = (0..size).map(|p| WorldSet::from_positions(size, [p])).collect();
    if flavor.singleton_labels() {
        return pool;
    }
    let mut extra: Vec<WorldSet> = Vec::new();
    for p in pairs.iter().chain(std::iter::once(q)) {
        let a = &p.antecedent;
        let b = &p.consequent;
        extra.extend([
            a.clone(),
            a.intersection(b),
            a.difference(b),
            b.clone(),
            b.complement(),
        ]);
    }
    extra.push(u.all());
    for s in extra {
        if !s.is_empty() && !pool.contains(&s) && pool.len() < LABEL_POOL_CAP.max(size) {
            pool.push(s);
        }
    }
    pool
}

/// Every preference relation on `k` states admissible for `flavor`, as
/// `below` masks: empty for simple flavors, strict partial orders for
/// ordered ones, irreflexive relations for plain cumulative models.
fn relations(k: usize, flavor: Flavor) -> Vec<Vec<u64>> {
    if flavor.empty_pref() {
        return vec![vec![0; k]];
    }
    let slots: Vec<(usize, usize)> = (0..k)
        .flat_map(|s| (0..k).filter(move |&t| t != s).map(move |t| (s, t)))
        .collect();
    let mut out = Vec::new();
    for bits in 0u64..1 << slots.len() {
        let mut below = vec![0u64; k];
        for (i, &(s, t)) in slots.iter().enumerate() {
            if bits >> i & 1 == 1 {
                below[t] |= 1 << s;
            }
        }
        let asym = (0..k).all(|t| (0..k).all(|s| below[t] >> s & 1 == 0 || below[s] >> t & 1 == 0));
        let transitive = (0..k).all(|t| {
            (0..k)
                .filter(|&s| below[t] >> s & 1 == 1)
                .all(|s| below[s] & !below[t] == 0)
        });
        if asym && (transitive || flavor == Flavor::Cumulative) {
            out.push(below);
        }
    }
    out
}

fn random_relation(rng: &mut ChaCha8Rng, k: usize, flavor: Flavor, density: f64) -> Vec<u64> {
    let mut below = vec![0u64; k];
    match flavor {
        Flavor::SimpleCumulative | Flavor::SimplePreferential => {}
        Flavor::Cumulative => {
            for s in 0..k {
                for t in s + 1..k {
                    if rng.gen_bool(density) {
                        if rng.gen_bool(0.5) {
                            below[t] |= 1 << s;
                        } else {
                            below[s] |= 1 << t;
                        }
                    }
                }
            }
        }
        Flavor::CumulativeOrdered | Flavor::Preferential => {
            let mut perm: Vec<usize> = (0..k).collect();
            perm.shuffle(rng);
            for j in 0..k {
                for i in 0..j {
                    if rng.gen_bool(density) {
                        below[perm[j]] |= 1 << perm[i];
                    }
                }
                let t = perm[j];
                let mut acc = below[t];
                for s in 0..k {
                    if below[t] >> s & 1 == 1 {
                        acc |= below[s];
                    }
                }
                below[t] = acc;
            }
        }
    }
    below
}

/// Largest universe handled by [`bounded_proof`].
pub const PROOF_MAX_WORLDS: usize = 64;
/// Cap on the number of world sets in the proof pool.
pub const PROOF_POOL_CAP: usize = 512;

/// Forward chaining restricted to a pool of antecedents: the world sets of
/// subformulas of the knowledge base and the query, closed under `¬`, `∧`,
/// `∨` up to `depth` rounds. A returned trace has been replayed through
/// [`verify_trace`]; `None` means unknown.
pub fn bounded_proof(
    kb: &KnowledgeBase,
    q: &Assertion,
    sys: System,
    depth: usize,
) -> Result<Option<Vec<TraceEvent>>> {
    let u = &kb.universe;
    check_worlds("bounded proof search", u.size(), PROOF_MAX_WORLDS)?;
    let n = u.size();
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let qp = q.semantic_pair(u)?;
    let seeds = kb.semantic_pairs();

    let mut pool: Vec<u64> = Vec::new();
    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut add = |m: u64, pool: &mut Vec<u64>| {
        if pool.len() < PROOF_POOL_CAP && !index.contains_key(&m) {
            index.insert(m, pool.len());
            pool.push(m);
        }
    };
    let mut formulas: Vec<&Formula> = Vec::new();
    for a in kb.assertions.iter().chain(std::iter::once(q)) {
        formulas.extend(a.antecedent.subformulas());
        formulas.extend(a.consequent.subformulas());
    }
    add(qp.antecedent.to_mask(), &mut pool);
    for s in &seeds {
        add(s.antecedent.to_mask(), &mut pool);
    }
    add(0, &mut pool);
    add(full, &mut pool);
    for f in formulas {
        add(u.worlds_of(f)?.to_mask(), &mut pool);
    }
    for _ in 0..depth {
        let current = pool.clone();
        for (i, &x) in current.iter().enumerate() {
            add(full & !x, &mut pool);
            for &y in &current[i + 1..] {
                add(x & y, &mut pool);
                add(x | y, &mut pool);
            }
        }
    }
    let index: HashMap<u64, usize> = pool.iter().enumerate().map(|(i, &m)| (m, i)).collect();

    let mut core: Vec<u64> = pool.clone();
    for s in &seeds {
        core[index[&s.antecedent.to_mask()]] &= s.consequent.to_mask();
    }
    let goal = (index[&qp.antecedent.to_mask()], qp.consequent.to_mask());
    let mut prover = PoolProver {
        sys,
        full,
        pool: &pool,
        index: &index,
        core,
        events: Vec::new(),
        goal,
        changed: false,
    };
    prover.run();
    if !prover.done() {
        return Ok(None);
    }
    let set = |m: u64| WorldSet::from_mask(n, m);
    let events: Vec<TraceEvent> = prover
        .events
        .into_iter()
        .map(|(rule, target, premises, c)| TraceEvent {
            rule,
            target: set(target),
            premises: premises.into_iter().map(|(a, b)| (set(a), set(b))).collect(),
            core: set(c),
        })
        .collect();
    let state = verify_trace(n, &seeds, sys, &events)
        .map_err(|e| Error::Precondition(format!("bounded proof produced an invalid trace: {e}")))?;
    if !state.holds(&qp.antecedent, &qp.consequent) {
        return Err(Error::Precondition("bounded proof trace does not reach the query".into()));
    }
    Ok(Some(events))
}

type PoolEvent = (Rule, u64, Vec<(u64, u64)>, u64);

struct PoolProver<'a> {
    sys: System,
    full: u64,
    pool: &'a [u64],
    index: &'a HashMap<u64, usize>,
    core: Vec<u64>,
    events: Vec<PoolEvent>,
    goal: (usize, u64),
    changed: bool,
}

impl PoolProver<'_> {
    fn done(&self) -> bool {
        self.core[self.goal.0] & !self.goal.1 == 0
    }

    fn tighten(&mut self, i: usize, x: u64, rule: Rule, premises: Vec<(u64, u64)>) {
        let old = self.core[i];
        let new = old & x;
        if new != old {
            self.core[i] = new;
            self.changed = true;
            self.events.push((rule, self.pool[i], premises, new));
        }
    }

    fn run(&mut self) {
        let len = self.pool.len();
        while !self.done() {
            self.changed = false;
            for a in 0..len {
                for d in 0..len {
                    let (am, dm) = (self.pool[a], self.pool[d]);
                    let ca = self.core[a];
                    if a == d || dm & !am != 0 || ca & !dm != 0 {
                        continue;
                    }
                    let cd = self.core[d];
                    self.tighten(a, cd, Rule::Cut, vec![(am, dm), (dm, cd)]);
                    let ca = self.core[a];
                    self.tighten(d, ca, Rule::CautiousMonotonicity, vec![(am, dm), (am, ca)]);
                }
            }
            if self.sys.has_or() {
                for a in 0..len {
                    for b in a + 1..len {
                        let (am, bm) = (self.pool[a], self.pool[b]);
                        if let Some(&t) = self.index.get(&(am | bm)) {
                            let (ca, cb) = (self.core[a], self.core[b]);
                            self.tighten(t, ca | cb, Rule::Or, vec![(am, ca), (bm, cb)]);
                        }
                    }
                }
            }
            if self.sys.has_monotonicity() {
                for a in 0..len {
                    for b in 0..len {
                        let (am, bm) = (self.pool[a], self.pool[b]);
                        if a != b && am & !bm == 0 {
                            let cb = self.core[b];
                            self.tighten(a, cb, Rule::Monotonicity, vec![(bm, cb)]);
                        }
                    }
                }
            }
            if self.sys.has_contraposition() {
                for a in 0..len {
                    let (am, ca) = (self.pool[a], self.core[a]);
                    if let Some(&t) = self.index.get(&(self.full & !ca)) {
                        self.tighten(t, self.full & !am, Rule::Contraposition, vec![(am, ca)]);
                    }
                }
            }
            if self.sys.has_loop() {
                self.loop_pass();
            }
            if !self.changed {
                break;
            }
        }
    }

    fn edge(&self, x: usize, y: usize) -> bool {
        self.core[x] & !self.pool[y] == 0
    }

    fn loop_pass(&mut self) {
        let len = self.pool.len();
        let mut reach: Vec<FixedBitSet> = (0..len)
            .map(|x| {
                let mut r = FixedBitSet::with_capacity(len);
                for y in 0..len {
                    if self.edge(x, y) {
                        r.insert(y);
                    }
                }
                r
            })
            .collect();
        for k in 0..len {
            for i in 0..len {
                if reach[i].contains(k) {
                    let rk = reach[k].clone();
                    reach[i].union_with(&rk);
                }
            }
        }
        let mut seen = FixedBitSet::with_capacity(len);
        for root in 0..len {
            if seen.contains(root) {
                continue;
            }
            let members: Vec<usize> = (0..len)
                .filter(|&y| y == root || (reach[root].contains(y) && reach[y].contains(root)))
                .collect();
            for &m in &members {
                seen.insert(m);
            }
            if members.len() < 2 {
                continue;
            }
            let meet = members.iter().fold(self.full, |acc, &m| acc & self.core[m]);
            if members.iter().all(|&m| self.core[m] == meet) {
                continue;
            }
            let walk = self.closed_walk(&members);
            let mut premises: Vec<(u64, u64)> = walk.windows(2).map(|w| (self.pool[w[0]], self.pool[w[1]])).collect();
            let cycle_len = premises.len();
            premises.extend(members.iter().map(|&m| (self.pool[m], self.core[m])));
            for &m in &members {
                self.tighten(m, meet, Rule::Loop { cycle_len }, premises.clone());
            }
        }
    }

    /// Closed walk from `members[0]` through every member and back.
    fn closed_walk(&self, members: &[usize]) -> Vec<usize> {
        let root = members[0];
        let path = |from: usize, to: usize| -> Vec<usize> {
            let mut parent: HashMap<usize, usize> = HashMap::from([(from, from)]);
            let mut queue = std::collections::VecDeque::from([from]);
            while let Some(x) = queue.pop_front() {
                if x == to {
                    break;
                }
                for &y in members {
                    if self.edge(x, y) && !parent.contains_key(&y) {
                        parent.insert(y, x);
                        queue.push_back(y);
                    }
                }
            }
            let mut p = vec![to];
            let mut cur = to;
            while cur != from {
                cur = parent[&cur];
                p.push(cur);
            }
            p.reverse();
            p
        };
        let mut walk = vec![root];
        for &m in &members[1..] {
            walk.extend(path(root, m).into_iter().skip(1));
            walk.extend(path(m, root).into_iter().skip(1));
        }
        walk
    }
}

/// Outcome of the bounded search for a preferential model with injective
/// labels defining the same relation.
#[derive(Debug, Clone, PartialEq)]
pub enum InjectiveSearch {
    Found(Model),
    NoneWithinBound { states: usize },
}

/// Enumerates preferential models whose states carry pairwise distinct
/// worlds (so at most `|U|` states) and returns one defining the same
/// relation as `m`, if any.
pub fn injective_equivalent(m: &Model) -> Result<InjectiveSearch> {
    let u = m.universe();
    check_worlds("injective-label search", u.size(), 5)?;
    let target = relation_of_model(m)?;
    let size = u.size();
    let mut orders_by_k: Vec<Vec<Vec<u64>>> = Vec::new();
    for k in 0..=size {
        orders_by_k.push(relations(k, Flavor::Preferential));
    }
    for subset in 0u64..1 << size {
        let worlds: Vec<usize> = (0..size).filter(|&p| subset >> p & 1 == 1).collect();
        let k = worlds.len();
        for below in &orders_by_k[k] {
            let c = Candidate {
                labels: worlds.iter().map(|&p| WorldSet::from_positions(size, [p])).collect(),
                below: below.clone(),
            };
            let candidate = c.into_model(u, Flavor::Preferential)?;
            if relation_of_model(&candidate)? == target {
                return Ok(InjectiveSearch::Found(candidate));
            }
        }
    }
    Ok(InjectiveSearch::NoneWithinBound { states: size })
}
