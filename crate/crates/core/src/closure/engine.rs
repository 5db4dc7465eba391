use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::trace::TraceEvent;
use super::{ConsequenceMap, Rule, System};
use crate::lattice::{antecedent_components, closed_walk, is_subset, submasks, Mask};
use crate::universe::WorldSet;

/// Order in which passes and antecedents are visited. The fixpoint does not
/// depend on it; shuffling exists to test exactly that.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    #[default]
    Canonical,
    Shuffled(u64),
}

#[derive(Debug, Clone, Default)]
pub struct CloseOptions {
    pub trace: bool,
    pub schedule: Schedule,
    /// Stop as soon as `C(A) ⊆ B` holds for this `(A, B)`.
    pub goal: Option<(Mask, Mask)>,
}

#[derive(Debug, Clone)]
pub struct Closure {
    pub map: ConsequenceMap,
    pub trace: Vec<TraceEvent>,
    pub sweeps: usize,
    pub tightenings: usize,
    /// False when the run stopped early on its goal.
    pub complete: bool,
}

/// Full fixpoint with trace.
pub fn close(map: &ConsequenceMap, sys: System) -> (ConsequenceMap, Vec<TraceEvent>) {
    let out = close_with(
        map,
        sys,
        &CloseOptions {
            trace: true,
            ..CloseOptions::default()
        },
    );
    (out.map, out.trace)
}

pub fn close_with(map: &ConsequenceMap, sys: System, opts: &CloseOptions) -> Closure {
    let n = map.worlds();
    let mut engine = Engine {
        sys,
        n,
        full: map.full(),
        core: map.cores().to_vec(),
        events: opts.trace.then(Vec::new),
        goal: opts.goal,
        done: false,
        changed: false,
        tightenings: 0,
        order: (0..1 << n).collect(),
    };
    if let Some((a, b)) = engine.goal {
        engine.done = is_subset(engine.core[a as usize], b);
    }

    let mut passes = vec![Pass::Interval];
    if sys.has_loop() {
        passes.push(Pass::Loop);
    }
    if sys.has_or() {
        passes.push(Pass::Or);
    }
    if sys.has_monotonicity() {
        passes.push(Pass::Monotonicity);
    }
    if sys.has_contraposition() {
        passes.push(Pass::Contraposition);
    }
    let mut rng = match opts.schedule {
        Schedule::Canonical => None,
        Schedule::Shuffled(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
    };

    let mut sweeps = 0;
    while !engine.done {
        engine.changed = false;
        if let Some(rng) = rng.as_mut() {
            passes.shuffle(rng);
            engine.order.shuffle(rng);
        }
        for pass in &passes {
            match pass {
                Pass::Interval => engine.interval(),
                Pass::Loop => engine.loop_pass(),
                Pass::Or => engine.or_pass(),
                Pass::Monotonicity => engine.monotonicity(),
                Pass::Contraposition => engine.contraposition(),
            }
            if engine.done {
                break;
            }
        }
        sweeps += 1;
        if !engine.changed {
            break;
        }
    }

    let mut out = map.clone();
    *out.cores_mut() = engine.core;
    let trace = engine
        .events
        .unwrap_or_default()
        .into_iter()
        .map(|e| e.into_event(n))
        .collect();
    Closure {
        map: out,
        trace,
        sweeps,
        tightenings: engine.tightenings,
        complete: !engine.done || opts.goal.is_none(),
    }
}

#[derive(Debug, Clone, Copy)]
enum Pass {
    Interval,
    Loop,
    Or,
    Monotonicity,
    Contraposition,
}

struct RawEvent {
    rule: Rule,
    target: Mask,
    premises: Vec<(Mask, Mask)>,
    core: Mask,
}

impl RawEvent {
    fn into_event(self, n: usize) -> TraceEvent {
        let set = |m: Mask| WorldSet::from_mask(n, m as u64);
        TraceEvent {
            rule: self.rule,
            target: set(self.target),
            premises: self.premises.into_iter().map(|(a, b)| (set(a), set(b))).collect(),
            core: set(self.core),
        }
    }
}

struct Engine {
    sys: System,
    n: usize,
    full: Mask,
    core: Vec<Mask>,
    events: Option<Vec<RawEvent>>,
    goal: Option<(Mask, Mask)>,
    done: bool,
    changed: bool,
    tightenings: usize,
    order: Vec<Mask>,
}

impl Engine {
    /// `C(target) ← C(target) ∩ x`, justified by `rule` from `premises`.
    #[inline]
    fn tighten(&mut self, target: Mask, x: Mask, rule: Rule, premises: impl FnOnce() -> Vec<(Mask, Mask)>) {
        let old = self.core[target as usize];
        let new = old & x;
        if new == old {
            return;
        }
        debug_assert!(self.sys.admits(&rule));
        self.core[target as usize] = new;
        self.changed = true;
        self.tightenings += 1;
        if let Some(events) = self.events.as_mut() {
            events.push(RawEvent {
                rule,
                target,
                premises: premises(),
                core: new,
            });
        }
        if let Some((a, b)) = self.goal {
            if a == target && is_subset(new, b) {
                self.done = true;
            }
        }
    }

    /// Cut and Cautious Monotonicity together: whenever `C(A) ⊆ D ⊆ A`, the
    /// antecedents `A` and `D` end up with the same core.
    fn interval(&mut self) {
        for i in 0..self.order.len() {
            let a = self.order[i];
            let c = self.core[a as usize];
            for sub in submasks(a & !c) {
                let d = c | sub;
                if d == a {
                    continue;
                }
                let cd = self.core[d as usize];
                self.tighten(a, cd, Rule::Cut, || vec![(a, d), (d, cd)]);
                let ca = self.core[a as usize];
                self.tighten(d, ca, Rule::CautiousMonotonicity, || vec![(a, d), (a, ca)]);
                if self.done {
                    return;
                }
            }
        }
    }

    /// Antecedents on a common cycle of `A -> B iff C(A) ⊆ B` share their
    /// consequences; every member receives the intersection of member cores.
    fn loop_pass(&mut self) {
        let components = antecedent_components(&self.core, self.n);
        for members in components {
            let snapshot: Vec<Mask> = members.iter().map(|&m| self.core[m as usize]).collect();
            let meet = snapshot.iter().fold(self.full, |acc, &c| acc & c);
            if snapshot.iter().all(|&c| c == meet) {
                continue;
            }
            let premises = if self.events.is_some() {
                let walk = closed_walk(&self.core, &members).expect("component is strongly connected");
                let mut p: Vec<(Mask, Mask)> = walk.windows(2).map(|w| (w[0], w[1])).collect();
                let cycle_len = p.len();
                p.extend(members.iter().zip(&snapshot).map(|(&m, &c)| (m, c)));
                Some((cycle_len, p))
            } else {
                None
            };
            let cycle_len = premises.as_ref().map_or(0, |(l, _)| *l);
            for &m in &members {
                self.tighten(m, meet, Rule::Loop { cycle_len }, || {
                    premises.as_ref().map(|(_, p)| p.clone()).unwrap_or_default()
                });
                if self.done {
                    return;
                }
            }
        }
    }

    /// Or over the two-block partitions of each antecedent. With reflexivity
    /// this implies Or for overlapping pairs: a world of `C(A ∪ B)` outside
    /// `C(A) ∪ C(B)` would have to lie in both `C(B ∖ A)` and `C(A ∖ B)`.
    fn or_pass(&mut self) {
        for i in 0..self.order.len() {
            let s = self.order[i];
            if s.count_ones() < 2 {
                continue;
            }
            let low = s & s.wrapping_neg();
            for sub in submasks(s ^ low) {
                let b = low | sub;
                if b == s {
                    continue;
                }
                let c = s ^ b;
                let (cb, cc) = (self.core[b as usize], self.core[c as usize]);
                self.tighten(s, cb | cc, Rule::Or, || vec![(b, cb), (c, cc)]);
                if self.done {
                    return;
                }
            }
        }
    }

    /// `C(A) ← ⋂{ C(B) : B ⊇ A }`, one world at a time.
    fn monotonicity(&mut self) {
        for w in 0..self.n {
            let bit = 1 << w;
            for i in 0..self.order.len() {
                let a = self.order[i];
                if a & bit != 0 {
                    continue;
                }
                let sup = a | bit;
                let cs = self.core[sup as usize];
                self.tighten(a, cs, Rule::Monotonicity, || vec![(sup, cs)]);
                if self.done {
                    return;
                }
            }
        }
    }

    /// From `A |~ C(A)` infer `¬C(A) |~ ¬A`; weaker antecedents follow by
    /// the monotonicity pass.
    fn contraposition(&mut self) {
        for i in 0..self.order.len() {
            let a = self.order[i];
            let ca = self.core[a as usize];
            let target = self.full & !ca;
            self.tighten(target, self.full & !a, Rule::Contraposition, || vec![(a, ca)]);
            if self.done {
                return;
            }
        }
    }
}
