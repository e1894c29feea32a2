use std::collections::VecDeque;

use super::{UndirectedGraph, VarId};

/// Outcome of a chordality test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Chordality {
    Chordal,
    /// A chordless cycle of length at least four, in traversal order.
    NotChordal {
        cycle: Vec<VarId>,
    },
}

impl Chordality {
    pub fn is_chordal(&self) -> bool {
        matches!(self, Chordality::Chordal)
    }
}

/// Maximum cardinality search; returns nodes in visit order. Ties go to the
/// lowest id.
fn maximum_cardinality_search(g: &UndirectedGraph) -> Vec<VarId> {
    let n = g.node_count();
    let mut weight = vec![0usize; n];
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !visited[v])
            .max_by(|&a, &b| weight[a].cmp(&weight[b]).then(b.cmp(&a)))
            .expect("unvisited node remains");
        visited[v] = true;
        order.push(v);
        for &w in g.neighbors(v) {
            if !visited[w] {
                weight[w] += 1;
            }
        }
    }
    order
}

/// A perfect elimination order when `g` is chordal (the reverse of a maximum
/// cardinality search), `None` otherwise.
pub fn perfect_elimination_order(g: &UndirectedGraph) -> Option<Vec<VarId>> {
    let mut order = maximum_cardinality_search(g);
    order.reverse();
    let n = order.len();
    let mut position = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        position[v] = i;
    }
    for &v in &order {
        let later: Vec<VarId> = g
            .neighbors(v)
            .iter()
            .copied()
            .filter(|&w| position[w] > position[v])
            .collect();
        for (i, &a) in later.iter().enumerate() {
            if later[i + 1..].iter().any(|&b| !g.has_edge(a, b)) {
                return None;
            }
        }
    }
    Some(order)
}

/// Tests whether every cycle of length greater than three has a chord.
pub fn is_chordal(g: &UndirectedGraph) -> Chordality {
    if perfect_elimination_order(g).is_some() {
        return Chordality::Chordal;
    }
    let cycle = find_chordless_cycle(g).expect("non-chordal graph has a chordless cycle");
    Chordality::NotChordal { cycle }
}

/// Every chordless cycle passes through some `v` whose two cycle neighbours
/// `u`, `w` are non-adjacent, with the rest of the cycle avoiding the other
/// neighbours of `v`. A shortest such `u`-`w` path closes a chordless cycle.
fn find_chordless_cycle(g: &UndirectedGraph) -> Option<Vec<VarId>> {
    let n = g.node_count();
    for v in 0..n {
        let nbrs: Vec<VarId> = g.neighbors(v).iter().copied().collect();
        for (i, &u) in nbrs.iter().enumerate() {
            for &w in &nbrs[i + 1..] {
                if g.has_edge(u, w) {
                    continue;
                }
                let blocked = |x: VarId| x == v || (x != u && x != w && g.has_edge(v, x));
                if let Some(path) = shortest_path(g, u, w, blocked) {
                    let mut cycle = vec![v];
                    cycle.extend(path);
                    return Some(cycle);
                }
            }
        }
    }
    None
}

fn shortest_path(
    g: &UndirectedGraph,
    from: VarId,
    to: VarId,
    blocked: impl Fn(VarId) -> bool,
) -> Option<Vec<VarId>> {
    let n = g.node_count();
    let mut prev = vec![usize::MAX; n];
    prev[from] = from;
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            let mut path = vec![to];
            let mut cur = to;
            while cur != from {
                cur = prev[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for &y in g.neighbors(x) {
            if prev[y] == usize::MAX && !blocked(y) {
                prev[y] = x;
                queue.push_back(y);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Universe;
    use std::sync::Arc;

    fn graph(n: usize, edges: &[(VarId, VarId)]) -> UndirectedGraph {
        UndirectedGraph::from_edges(Arc::new(Universe::binary(n)), edges.iter().copied()).unwrap()
    }

    /// A cycle of length >= 4 in `g` with no chord.
    fn is_chordless_cycle(g: &UndirectedGraph, cycle: &[VarId]) -> bool {
        let k = cycle.len();
        if k < 4 {
            return false;
        }
        for i in 0..k {
            for j in i + 1..k {
                let consecutive = j == i + 1 || (i == 0 && j == k - 1);
                if consecutive != g.has_edge(cycle[i], cycle[j]) {
                    return false;
                }
            }
        }
        true
    }

    #[test]
    fn triangle_is_chordal() {
        assert!(is_chordal(&graph(3, &[(0, 1), (1, 2), (0, 2)])).is_chordal());
    }

    #[test]
    fn four_cycle_witness() {
        // A-B-D-C-A with A=0, B=1, C=2, D=3
        let g = graph(4, &[(0, 1), (1, 3), (3, 2), (2, 0)]);
        assert_eq!(
            is_chordal(&g),
            Chordality::NotChordal {
                cycle: vec![0, 1, 3, 2]
            }
        );
    }

    #[test]
    fn chord_fixes_four_cycle() {
        let g = graph(4, &[(0, 1), (1, 3), (3, 2), (2, 0), (1, 2)]);
        assert!(is_chordal(&g).is_chordal());
    }

    #[test]
    fn witnesses_on_longer_cycles_are_chordless() {
        for n in 4..9 {
            let g = UndirectedGraph::cycle(n);
            match is_chordal(&g) {
                Chordality::NotChordal { cycle } => {
                    assert_eq!(cycle.len(), n);
                    assert!(is_chordless_cycle(&g, &cycle));
                }
                Chordality::Chordal => panic!("C{n} reported chordal"),
            }
        }
        // a 6-cycle with one chord still contains a chordless 4-cycle
        let g = graph(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)]);
        let Chordality::NotChordal { cycle } = is_chordal(&g) else {
            panic!("expected witness")
        };
        assert_eq!(cycle.len(), 4);
        assert!(is_chordless_cycle(&g, &cycle));
    }

    #[test]
    fn empty_and_trees_are_chordal() {
        assert!(is_chordal(&graph(0, &[])).is_chordal());
        assert!(is_chordal(&graph(5, &[(0, 1), (1, 2), (1, 3), (3, 4)])).is_chordal());
    }
}
