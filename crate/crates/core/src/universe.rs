//! Universes of reference and sets of worlds.
//!
//! A world is identified by an `n`-bit pattern where bit `i` holds the truth
//! value of the `i`-th declared variable. A [`WorldSet`] is indexed by the
//! *position* of a world in [`Universe::worlds`], which coincides with the
//! world id when the universe is unconstrained.

use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use log::warn;

use crate::error::{Error, Result};
use crate::formula::{is_identifier, Formula};

/// Cap for operations that only evaluate formulas.
pub const MAX_FORMULA_VARS: usize = 24;
/// Cap on `|U|` for algorithms that enumerate every subset of the universe.
pub const MAX_LATTICE_WORLDS: usize = 16;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct WorldSet(FixedBitSet);

impl WorldSet {
    pub fn empty(len: usize) -> Self {
        WorldSet(FixedBitSet::with_capacity(len))
    }

    pub fn full(len: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(len);
        bits.insert_range(..);
        WorldSet(bits)
    }

    pub fn from_positions(len: usize, positions: impl IntoIterator<Item = usize>) -> Self {
        let mut set = Self::empty(len);
        for p in positions {
            set.insert(p);
        }
        set
    }

    /// Builds a set from a bit mask over positions (`len <= 64`).
    pub fn from_mask(len: usize, mask: u64) -> Self {
        debug_assert!(len <= 64);
        Self::from_positions(len, (0..len).filter(|i| mask >> i & 1 == 1))
    }

    /// Bit mask over positions. Only meaningful when `capacity() <= 64`.
    pub fn to_mask(&self) -> u64 {
        debug_assert!(self.capacity() <= 64);
        self.0.ones().fold(0u64, |m, i| m | 1 << i)
    }

    pub fn capacity(&self) -> usize {
        self.0.len()
    }

    pub fn count(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn contains(&self, pos: usize) -> bool {
        self.0.contains(pos)
    }

    pub fn insert(&mut self, pos: usize) {
        self.0.insert(pos);
    }

    pub fn remove(&mut self, pos: usize) {
        self.0.set(pos, false);
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn is_subset(&self, other: &WorldSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &WorldSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn union(&self, other: &WorldSet) -> WorldSet {
        let mut out = self.clone();
        out.0.union_with(&other.0);
        out
    }

    pub fn intersection(&self, other: &WorldSet) -> WorldSet {
        let mut out = self.clone();
        out.0.intersect_with(&other.0);
        out
    }

    pub fn difference(&self, other: &WorldSet) -> WorldSet {
        let mut out = self.clone();
        out.0.difference_with(&other.0);
        out
    }

    /// Complement relative to the full universe.
    pub fn complement(&self) -> WorldSet {
        let mut out = self.clone();
        out.0.toggle_range(..);
        out
    }

    pub fn union_with(&mut self, other: &WorldSet) {
        self.0.union_with(&other.0);
    }

    pub fn intersect_with(&mut self, other: &WorldSet) {
        self.0.intersect_with(&other.0);
    }
}

impl fmt::Debug for WorldSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

struct UniverseData {
    vars: Vec<String>,
    worlds: Vec<u32>,
    constraints: Vec<Formula>,
}

/// Ordered variables plus the admissible worlds. Cheap to clone.
#[derive(Clone)]
pub struct Universe(Arc<UniverseData>);

impl PartialEq for Universe {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.vars == other.0.vars
                && self.0.worlds == other.0.worlds
                && self.0.constraints == other.0.constraints)
    }
}

impl Eq for Universe {}

impl fmt::Debug for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Universe")
            .field("vars", &self.0.vars)
            .field("worlds", &self.0.worlds)
            .field("constraints", &self.0.constraints)
            .finish()
    }
}

impl Universe {
    pub fn new<S: AsRef<str>>(vars: &[S], constraints: Vec<Formula>) -> Result<Self> {
        let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        if vars.len() > MAX_FORMULA_VARS {
            return Err(Error::TooLarge {
                what: "universe",
                unit: "variables",
                limit: MAX_FORMULA_VARS,
                actual: vars.len(),
            });
        }
        for (i, v) in vars.iter().enumerate() {
            if !is_identifier(v) {
                return Err(Error::InvalidVars(format!("`{v}` is not a valid variable name")));
            }
            if vars[..i].contains(v) {
                return Err(Error::InvalidVars(format!("variable `{v}` declared twice")));
            }
        }
        for c in &constraints {
            for atom in c.atoms() {
                if !vars.iter().any(|v| v == atom) {
                    return Err(Error::UnknownAtom(atom.to_string()));
                }
            }
        }

        let n = vars.len();
        let total = 1usize << n;
        let mut admissible = WorldSet::full(total);
        if !constraints.is_empty() {
            let atom_sets: Vec<WorldSet> = (0..n)
                .map(|i| WorldSet::from_positions(total, (0..total).filter(|w| w >> i & 1 == 1)))
                .collect();
            for c in &constraints {
                let sat = eval_sets(c, total, &|name| {
                    let i = vars.iter().position(|v| v == name).expect("checked above");
                    atom_sets[i].clone()
                });
                admissible.intersect_with(&sat);
            }
        }
        let worlds: Vec<u32> = admissible.iter().map(|w| w as u32).collect();
        if worlds.is_empty() {
            warn!("universe over {vars:?} has no admissible world");
        }
        Ok(Universe(Arc::new(UniverseData {
            vars,
            worlds,
            constraints,
        })))
    }

    pub fn unconstrained<S: AsRef<str>>(vars: &[S]) -> Result<Self> {
        Self::new(vars, Vec::new())
    }

    pub fn vars(&self) -> &[String] {
        &self.0.vars
    }

    pub fn constraints(&self) -> &[Formula] {
        &self.0.constraints
    }

    /// Admissible world ids in ascending order.
    pub fn worlds(&self) -> &[u32] {
        &self.0.worlds
    }

    /// Number of admissible worlds, `|U|`.
    pub fn size(&self) -> usize {
        self.0.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.worlds.is_empty()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.0.vars.iter().position(|v| v == name)
    }

    pub fn world_id(&self, pos: usize) -> u32 {
        self.0.worlds[pos]
    }

    pub fn position_of(&self, id: u32) -> Option<usize> {
        self.0.worlds.binary_search(&id).ok()
    }

    pub fn all(&self) -> WorldSet {
        WorldSet::full(self.size())
    }

    pub fn none(&self) -> WorldSet {
        WorldSet::empty(self.size())
    }

    pub fn ids(&self, set: &WorldSet) -> Vec<u32> {
        set.iter().map(|p| self.world_id(p)).collect()
    }

    /// Fails unless `|U|` fits the lattice cap.
    pub fn check_lattice(&self, what: &'static str) -> Result<()> {
        check_worlds(what, self.size(), MAX_LATTICE_WORLDS)
    }

    pub fn check_atoms(&self, f: &Formula) -> Result<()> {
        match f.atoms().into_iter().find(|a| self.var_index(a).is_none()) {
            Some(a) => Err(Error::UnknownAtom(a.to_string())),
            None => Ok(()),
        }
    }

    pub fn worlds_of(&self, f: &Formula) -> Result<WorldSet> {
        self.check_atoms(f)?;
        let len = self.size();
        Ok(eval_sets(f, len, &|name| {
            let i = self.var_index(name).expect("atoms checked");
            WorldSet::from_positions(len, (0..len).filter(|&p| self.world_id(p) >> i & 1 == 1))
        }))
    }

    pub fn classical_entails(&self, a: &Formula, b: &Formula) -> Result<bool> {
        Ok(self.worlds_of(a)?.is_subset(&self.worlds_of(b)?))
    }

    /// The minterm describing the world at `pos`.
    pub fn world_formula(&self, pos: usize) -> Formula {
        let id = self.world_id(pos);
        Formula::conjunction(self.0.vars.iter().enumerate().map(|(i, v)| {
            if id >> i & 1 == 1 {
                Formula::atom(v.clone())
            } else {
                Formula::not(Formula::atom(v.clone()))
            }
        }))
    }

    /// A formula whose models within this universe are exactly `set`:
    /// `true`, `false`, or a disjunction of minterms.
    pub fn dnf(&self, set: &WorldSet) -> Formula {
        if set.count() == self.size() && !self.is_empty() {
            return Formula::True;
        }
        Formula::disjunction(set.iter().map(|p| self.world_formula(p)))
    }

    /// Human-readable assignment such as `p=1 q=0`.
    pub fn describe_world(&self, pos: usize) -> String {
        let id = self.world_id(pos);
        self.0
            .vars
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{v}={}", id >> i & 1))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub(crate) fn check_worlds(what: &'static str, actual: usize, limit: usize) -> Result<()> {
    if actual > limit {
        Err(Error::TooLarge {
            what,
            unit: "worlds",
            limit,
            actual,
        })
    } else {
        Ok(())
    }
}

fn eval_sets(f: &Formula, len: usize, atom: &dyn Fn(&str) -> WorldSet) -> WorldSet {
    match f {
        Formula::True => WorldSet::full(len),
        Formula::False => WorldSet::empty(len),
        Formula::Atom(name) => atom(name),
        Formula::Not(g) => eval_sets(g, len, atom).complement(),
        Formula::And(a, b) => eval_sets(a, len, atom).intersection(&eval_sets(b, len, atom)),
        Formula::Or(a, b) => eval_sets(a, len, atom).union(&eval_sets(b, len, atom)),
        Formula::Implies(a, b) => eval_sets(a, len, atom)
            .complement()
            .union(&eval_sets(b, len, atom)),
        Formula::Iff(a, b) => {
            let x = eval_sets(a, len, atom);
            let y = eval_sets(b, len, atom);
            x.intersection(&y).union(&x.union(&y).complement())
        }
    }
}

pub fn make_universe<S: AsRef<str>>(vars: &[S], constraints: Vec<Formula>) -> Result<Universe> {
    Universe::new(vars, constraints)
}

pub fn worlds_of(f: &Formula, u: &Universe) -> Result<WorldSet> {
    u.worlds_of(f)
}

pub fn classical_entails(a: &Formula, b: &Formula, u: &Universe) -> Result<bool> {
    u.classical_entails(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn unconstrained_two_vars() {
        let u = Universe::unconstrained(&["p", "q"]).unwrap();
        assert_eq!(u.worlds(), &[0, 1, 2, 3]);
    }

    #[test]
    fn constraint_removes_pattern() {
        let u = Universe::new(&["p", "b"], vec![f("p -> b")]).unwrap();
        // p is bit 0, b is bit 1: the pattern p=1,b=0 is id 1.
        assert_eq!(u.worlds(), &[0, 2, 3]);
    }

    #[test]
    fn contradictory_constraint_gives_empty_universe() {
        let u = Universe::new(&["p"], vec![f("p & ~p")]).unwrap();
        assert!(u.is_empty());
        assert_eq!(u.worlds_of(&f("p")).unwrap().count(), 0);
    }

    #[test]
    fn constraint_with_unknown_atom() {
        assert_eq!(
            Universe::new(&["p"], vec![f("q")]).unwrap_err(),
            Error::UnknownAtom("q".into())
        );
    }

    #[test]
    fn duplicate_or_bad_vars() {
        assert!(matches!(Universe::unconstrained(&["p", "p"]), Err(Error::InvalidVars(_))));
        assert!(matches!(Universe::unconstrained(&["true"]), Err(Error::InvalidVars(_))));
        let many: Vec<String> = (0..25).map(|i| format!("v{i}")).collect();
        assert!(matches!(Universe::unconstrained(&many), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn worlds_of_examples() {
        let u = Universe::unconstrained(&["p", "q"]).unwrap();
        assert_eq!(u.ids(&u.worlds_of(&f("p")).unwrap()), vec![1, 3]);
        assert_eq!(u.worlds_of(&f("true")).unwrap(), u.all());
        assert_eq!(u.ids(&u.worlds_of(&f("p | q")).unwrap()), vec![1, 2, 3]);
        assert_eq!(u.worlds_of(&f("r")).unwrap_err(), Error::UnknownAtom("r".into()));
    }

    #[test]
    fn classical_entailment_examples() {
        let u = Universe::unconstrained(&["p", "q"]).unwrap();
        assert!(u.classical_entails(&f("p & q"), &f("p")).unwrap());
        assert!(!u.classical_entails(&f("p"), &f("q")).unwrap());
        let c = Universe::new(&["p", "b"], vec![f("p -> b")]).unwrap();
        assert!(c.classical_entails(&f("p"), &f("b")).unwrap());
    }

    #[test]
    fn world_sets_under_constraints_use_positions() {
        let u = Universe::new(&["p", "b"], vec![f("p -> b")]).unwrap();
        let b = u.worlds_of(&f("b")).unwrap();
        assert_eq!(u.ids(&b), vec![2, 3]);
        assert_eq!(b.iter().collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(u.position_of(1), None);
    }

    #[test]
    fn dnf_edge_cases() {
        let u = Universe::unconstrained(&["p"]).unwrap();
        assert_eq!(u.dnf(&u.all()), Formula::True);
        assert_eq!(u.dnf(&u.none()), Formula::False);
        assert_eq!(u.dnf(&WorldSet::from_positions(2, [1])), f("p"));
        let zero = Universe::unconstrained::<&str>(&[]).unwrap();
        assert_eq!(zero.worlds(), &[0]);
        assert_eq!(zero.world_formula(0), Formula::True);
    }

    #[test]
    fn mask_round_trip() {
        let s = WorldSet::from_mask(8, 0b1010_0110);
        assert_eq!(s.to_mask(), 0b1010_0110);
        assert_eq!(s.count(), 4);
        assert_eq!(s.complement().to_mask(), 0b0101_1001);
    }
}
