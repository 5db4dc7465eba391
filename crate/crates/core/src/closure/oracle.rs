//! Naive pair-set saturation, kept deliberately independent of the core-map
//! engine: it stores the relation as an explicit set of pairs and applies
//! the primitive rules of each system literally until nothing new appears.

use super::{ConsequenceMap, System};
use crate::error::{Error, Result};
use crate::kb::KnowledgeBase;
use crate::universe::check_worlds;

/// Relation over the subsets of a universe with at most 4 worlds:
/// `rows[A]` has bit `B` set iff `(A, B)` is in the relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSet {
    worlds: usize,
    rows: Vec<u32>,
}

impl PairSet {
    pub fn worlds(&self) -> usize {
        self.worlds
    }

    pub fn contains(&self, a: u32, b: u32) -> bool {
        self.rows[a as usize] >> b & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pairs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let size = self.rows.len() as u32;
        (0..size).flat_map(move |a| (0..size).filter(move |&b| self.contains(a, b)).map(move |b| (a, b)))
    }

    /// `{ (A, B) : C(A) ⊆ B }` for a core map over at most 4 worlds.
    pub fn from_map(map: &ConsequenceMap) -> Result<Self> {
        check_worlds("pair set", map.worlds(), 4)?;
        let size = 1u32 << map.worlds();
        let rows = (0..size)
            .map(|a| (0..size).filter(|&b| map.holds(a, b)).fold(0u32, |r, b| r | 1 << b))
            .collect();
        Ok(PairSet {
            worlds: map.worlds(),
            rows,
        })
    }
}

#[allow(clippy::needless_range_loop)]
pub fn pairset_closure_oracle(kb: &KnowledgeBase, sys: System) -> Result<PairSet> {
    let n = kb.universe.size();
    check_worlds("pair-set oracle", n, 4)?;
    let size = 1usize << n;
    let full = (size - 1) as u32;
    let mut rel = vec![vec![false; size]; size];
    for (a, row) in rel.iter_mut().enumerate() {
        row[a] = true;
    }
    for pair in kb.semantic_pairs() {
        let a = pair.antecedent.to_mask() as usize;
        let b = pair.consequent.to_mask() as usize;
        rel[a][b] = true;
    }

    loop {
        let mut new: Vec<(usize, usize)> = Vec::new();
        let has = |rel: &Vec<Vec<bool>>, a: usize, b: usize| rel[a][b];

        for a in 0..size {
            for b in 0..size {
                if !has(&rel, a, b) {
                    continue;
                }
                // Right Weakening
                for b2 in 0..size {
                    if b & !b2 == 0 {
                        new.push((a, b2));
                    }
                }
                for x in 0..size {
                    if !has(&rel, a, x) {
                        continue;
                    }
                    // And
                    new.push((a, b & x));
                    // Cautious Monotonicity: (A,B), (A,X) ⊢ (A∧B, X)
                    new.push((a & b, x));
                }
                // Cut: (A∧B, X), (A, B) ⊢ (A, X)
                for x in 0..size {
                    if has(&rel, a & b, x) {
                        new.push((a, x));
                    }
                }
                if sys == System::P {
                    // Or: (A, X), (B', X) ⊢ (A ∨ B', X); here b is X
                    for a2 in 0..size {
                        if has(&rel, a2, b) {
                            new.push((a | a2, b));
                        }
                    }
                }
                if sys == System::CM {
                    for a2 in 0..size {
                        if a2 & !a == 0 {
                            new.push((a2, b));
                        }
                    }
                }
                if sys == System::M {
                    new.push((full as usize & !b, full as usize & !a));
                }
            }
        }

        if sys == System::CL {
            // Loop: a path A0 ->+ Ak plus an edge Ak -> A0 yields (A0, Ak).
            let mut reach = rel.clone();
            for k in 0..size {
                for i in 0..size {
                    if reach[i][k] {
                        for j in 0..size {
                            if reach[k][j] {
                                reach[i][j] = true;
                            }
                        }
                    }
                }
            }
            for a0 in 0..size {
                for ak in 0..size {
                    if reach[a0][ak] && rel[ak][a0] {
                        new.push((a0, ak));
                    }
                }
            }
        }

        let mut changed = false;
        for (a, b) in new {
            if !rel[a][b] {
                rel[a][b] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let rows = rel
        .iter()
        .map(|row| row.iter().enumerate().filter(|(_, &v)| v).fold(0u32, |r, (b, _)| r | 1 << b))
        .collect();
    if size > 32 {
        return Err(Error::Precondition("pair-set rows overflow".into()));
    }
    Ok(PairSet { worlds: n, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::parse_kb;

    #[test]
    fn empty_kb_under_c_is_classical_entailment() {
        let kb = parse_kb("vars: p q").unwrap();
        let set = pairset_closure_oracle(&kb, System::C).unwrap();
        for a in 0..4u32 {
            for b in 0..4u32 {
                assert_eq!(set.contains(a, b), a & !b == 0, "({a}, {b})");
            }
        }
    }

    #[test]
    fn single_assertion_saturation() {
        let kb = parse_kb("vars: p q\nassume: p |~ q").unwrap();
        let set = pairset_closure_oracle(&kb, System::C).unwrap();
        let w = |f: &str| kb.universe.worlds_of(&f.parse().unwrap()).unwrap().to_mask() as u32;
        assert!(set.contains(w("p"), w("q")));
        assert!(set.contains(w("p & q"), w("q")));
        assert!(!set.contains(w("true"), w("q")));
    }

    #[test]
    fn rejects_large_universe() {
        let kb = parse_kb("vars: p q r").unwrap();
        assert!(pairset_closure_oracle(&kb, System::C).is_err());
    }
}
