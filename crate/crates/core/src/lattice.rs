//! Bit-mask helpers over the subset lattice of a small universe, and the
//! strongly connected components of the graph `A -> B iff C(A) ⊆ B`.

/// A world set over at most 16 positions (32 for search-sized universes).
pub type Mask = u32;

#[inline]
pub fn full_mask(n: usize) -> Mask {
    if n >= 32 {
        Mask::MAX
    } else {
        (1 << n) - 1
    }
}

#[inline]
pub fn is_subset(a: Mask, b: Mask) -> bool {
    a & !b == 0
}

/// All submasks of `m`, largest first, ending with `0`.
pub fn submasks(m: Mask) -> impl Iterator<Item = Mask> {
    let mut next = Some(m);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & m) };
        Some(cur)
    })
}

/// Hex rendering padded to the width of `n` bits.
pub fn hex(mask: Mask, n: usize) -> String {
    let width = n.div_ceil(4).max(1);
    format!("{mask:0width$x}")
}

const UNVISITED: u32 = u32::MAX;

/// Strongly connected components of the antecedent graph whose edges are
/// `A -> B` whenever `core[A] ⊆ B`, restricted to components with at least
/// two members. Members are sorted ascending; components are ordered by
/// their smallest member.
///
/// The graph is never materialized: every antecedent points to an auxiliary
/// node standing for "any superset of `core[A]`", auxiliary nodes point to
/// their one-world extensions and to the antecedent with the same mask. This
/// keeps the edge count at `O(n 2^n)`.
pub fn antecedent_components(core: &[Mask], n: usize) -> Vec<Vec<Mask>> {
    let size = core.len();
    debug_assert_eq!(size, 1 << n);
    let total = 2 * size;
    let mut index = vec![UNVISITED; total];
    let mut low = vec![0u32; total];
    let mut on_stack = vec![false; total];
    let mut stack: Vec<u32> = Vec::new();
    // (node, cursor) where the cursor encodes the next successor to try.
    let mut frames: Vec<(u32, u32)> = Vec::new();
    let mut counter = 0u32;
    let mut out = Vec::new();

    let successor = |node: u32, cursor: &mut u32| -> Option<u32> {
        let node = node as usize;
        if node < size {
            if *cursor == 0 {
                *cursor = 1;
                return Some((size + core[node] as usize) as u32);
            }
            return None;
        }
        let x = (node - size) as Mask;
        if *cursor == 0 {
            *cursor = 1;
            return Some(x);
        }
        // cursor - 1 is the next bit position to examine
        while ((*cursor - 1) as usize) < n {
            let w = *cursor - 1;
            *cursor += 1;
            if x >> w & 1 == 0 {
                return Some((size + (x | 1 << w) as usize) as u32);
            }
        }
        None
    };

    for start in 0..size as u32 {
        if index[start as usize] != UNVISITED {
            continue;
        }
        index[start as usize] = counter;
        low[start as usize] = counter;
        counter += 1;
        stack.push(start);
        on_stack[start as usize] = true;
        frames.push((start, 0));

        while let Some(frame) = frames.last_mut() {
            let v = frame.0;
            if let Some(w) = successor(v, &mut frame.1) {
                let wi = w as usize;
                if index[wi] == UNVISITED {
                    index[wi] = counter;
                    low[wi] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[wi] = true;
                    frames.push((w, 0));
                } else if on_stack[wi] {
                    low[v as usize] = low[v as usize].min(index[wi]);
                }
                continue;
            }
            frames.pop();
            let vi = v as usize;
            if low[vi] == index[vi] {
                let mut members = Vec::new();
                loop {
                    let x = stack.pop().expect("tarjan stack");
                    on_stack[x as usize] = false;
                    if (x as usize) < size {
                        members.push(x as Mask);
                    }
                    if x == v {
                        break;
                    }
                }
                if members.len() > 1 {
                    members.sort_unstable();
                    out.push(members);
                }
            }
            if let Some(parent) = frames.last() {
                let p = parent.0 as usize;
                low[p] = low[p].min(low[vi]);
            }
        }
    }
    out.sort_unstable_by_key(|c| c[0]);
    out
}

/// BFS tree over `members` along `x -> y iff core[x] ⊆ y` (or the reverse
/// edges when `reverse`), rooted at `root`. Maps each reached member to its
/// parent.
fn bfs_tree(
    core: &[Mask],
    members: &[Mask],
    root: Mask,
    reverse: bool,
) -> std::collections::HashMap<Mask, Mask> {
    use std::collections::{HashMap, VecDeque};
    let mut parent: HashMap<Mask, Mask> = HashMap::from([(root, root)]);
    let mut queue = VecDeque::from([root]);
    while let Some(x) = queue.pop_front() {
        for &y in members {
            let edge = if reverse {
                is_subset(core[y as usize], x)
            } else {
                is_subset(core[x as usize], y)
            };
            if edge && !parent.contains_key(&y) {
                parent.insert(y, x);
                queue.push_back(y);
            }
        }
    }
    parent
}

/// A closed walk starting and ending at `members[0]` that visits every
/// member, following edges `x -> y iff core[x] ⊆ y`. `None` if the members
/// are not strongly connected. The returned sequence repeats the start at
/// the end.
pub fn closed_walk(core: &[Mask], members: &[Mask]) -> Option<Vec<Mask>> {
    let root = *members.first()?;
    let out_tree = bfs_tree(core, members, root, false);
    let in_tree = bfs_tree(core, members, root, true);
    let mut walk = vec![root];
    for &m in &members[1..] {
        // root -> m: follow parents back from m, then reverse
        let mut down = vec![m];
        let mut cur = m;
        while cur != root {
            cur = *out_tree.get(&cur)?;
            down.push(cur);
        }
        down.pop();
        down.reverse();
        walk.extend(down);
        // m -> root: reverse-tree parents point one step closer to root
        let mut cur = m;
        while cur != root {
            cur = *in_tree.get(&cur)?;
            walk.push(cur);
        }
    }
    if walk.len() == 1 {
        walk.push(root);
    }
    Some(walk)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force reachability oracle on the explicit graph.
    #[allow(clippy::needless_range_loop)]
    fn brute_components(core: &[Mask]) -> Vec<Vec<Mask>> {
        let size = core.len();
        let mut reach = vec![vec![false; size]; size];
        for a in 0..size {
            for b in 0..size {
                reach[a][b] = is_subset(core[a], b as Mask);
            }
        }
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
        let mut seen = vec![false; size];
        let mut out = Vec::new();
        for a in 0..size {
            if seen[a] {
                continue;
            }
            let comp: Vec<Mask> = (0..size)
                .filter(|&b| b == a || (reach[a][b] && reach[b][a]))
                .map(|b| b as Mask)
                .collect();
            for &b in &comp {
                seen[b as usize] = true;
            }
            if comp.len() > 1 {
                out.push(comp);
            }
        }
        out
    }

    #[test]
    fn submask_enumeration() {
        let subs: Vec<Mask> = submasks(0b101).collect();
        assert_eq!(subs, vec![0b101, 0b100, 0b001, 0]);
        assert_eq!(submasks(0).collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn hex_padding() {
        assert_eq!(hex(0x3, 8), "03");
        assert_eq!(hex(0x1, 1), "1");
        assert_eq!(hex(0xabc, 16), "0abc");
    }

    #[test]
    fn identity_map_has_no_nontrivial_components() {
        let core: Vec<Mask> = (0..16).collect();
        assert!(antecedent_components(&core, 4).is_empty());
    }

    #[test]
    fn components_match_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..=3);
            let core: Vec<Mask> = (0..1u32 << n).map(|a| a & rng.gen::<Mask>()).collect();
            assert_eq!(antecedent_components(&core, n), brute_components(&core), "{core:?}");
        }
    }

    #[test]
    fn closed_walk_visits_component() {
        // 1 -> 2 -> 4 -> 1 through cores {2}, {4}, {1} on three worlds
        let mut core: Vec<Mask> = (0..8).collect();
        core[1] = 2;
        core[2] = 4;
        core[4] = 1;
        let comps = antecedent_components(&core, 3);
        let members = comps.into_iter().find(|c| c.contains(&1)).unwrap();
        let walk = closed_walk(&core, &members).unwrap();
        assert_eq!(walk.first(), walk.last());
        for m in &members {
            assert!(walk.contains(m));
        }
        for w in walk.windows(2) {
            assert!(is_subset(core[w[0] as usize], w[1]));
        }
        assert!(closed_walk(&core, &[1, 3]).is_none());
    }
}
