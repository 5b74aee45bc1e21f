//! Maximum cardinality bipartite matching (Hopcroft–Karp).

use std::collections::VecDeque;

const NIL: usize = usize::MAX;

/// Result of a matching: `pair_left[u]` is the right vertex matched to `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pub size: usize,
    pub pair_left: Vec<Option<usize>>,
}

impl Matching {
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pair_left
            .iter()
            .enumerate()
            .filter_map(|(u, v)| v.map(|v| (u, v)))
    }
}

/// `adj[u]` lists the right vertices adjacent to left vertex `u`; right
/// vertices are `0..right`. Runs in O(E·√V).
pub fn maximum_matching(adj: &[Vec<usize>], right: usize) -> Matching {
    let left = adj.len();
    let mut pair_u = vec![NIL; left];
    let mut pair_v = vec![NIL; right];
    let mut dist = vec![0usize; left];
    let mut size = 0;

    loop {
        // BFS from free left vertices builds the layered graph.
        let mut queue = VecDeque::new();
        for u in 0..left {
            if pair_u[u] == NIL {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = pair_v[v];
                if w == NIL {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            break;
        }
        for u in 0..left {
            if pair_u[u] == NIL && augment(u, adj, &mut pair_u, &mut pair_v, &mut dist) {
                size += 1;
            }
        }
    }

    Matching {
        size,
        pair_left: pair_u.into_iter().map(|v| (v != NIL).then_some(v)).collect(),
    }
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    pair_u: &mut [usize],
    pair_v: &mut [usize],
    dist: &mut [usize],
) -> bool {
    for &v in &adj[u] {
        let w = pair_v[v];
        let next = w == NIL || (dist[w] == dist[u].wrapping_add(1) && augment(w, adj, pair_u, pair_v, dist));
        if next {
            pair_u[u] = v;
            pair_v[v] = u;
            return true;
        }
    }
    dist[u] = usize::MAX;
    false
}
