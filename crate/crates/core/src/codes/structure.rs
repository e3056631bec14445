//! Structural diagnostics: girth and local tree-likeness.

use std::collections::VecDeque;

use rand::Rng;

use super::{sample_regular, RegularEnsemble, TannerGraph};
use crate::error::Result;

/// Length of the shortest cycle, or `None` for a forest.
pub fn girth(g: &TannerGraph) -> Option<usize> {
    let total = g.n() + g.m();
    let mut best = usize::MAX;
    let mut dist = vec![usize::MAX; total];
    let mut parent_edge = vec![usize::MAX; total];
    let mut queue = VecDeque::new();
    // Node ids: variables 0..n, checks n..n+m.
    let neighbors = |u: usize| -> Vec<(usize, usize)> {
        if u < g.n() {
            g.var_edges(u).iter().map(|&e| (e, g.n() + g.edge(e).1)).collect()
        } else {
            g.chk_edges(u - g.n()).iter().map(|&e| (e, g.edge(e).0)).collect()
        }
    };
    for root in 0..total {
        dist.iter_mut().for_each(|d| *d = usize::MAX);
        dist[root] = 0;
        parent_edge[root] = usize::MAX;
        queue.clear();
        queue.push_back(root);
        while let Some(u) = queue.pop_front() {
            if 2 * dist[u] + 1 >= best {
                break;
            }
            for (e, w) in neighbors(u) {
                if e == parent_edge[u] {
                    continue;
                }
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    parent_edge[w] = e;
                    queue.push_back(w);
                } else {
                    best = best.min(dist[u] + dist[w] + 1);
                }
            }
        }
    }
    (best != usize::MAX).then_some(best)
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Whether the directed neighborhood `B_{i→a}(r)` of edge `e = (i, a)` is a tree.
///
/// The neighborhood holds the variables reachable from `i` in at most `r`
/// variable-to-variable hops without first using `(i, a)`, together with the
/// checks whose neighbors all lie in that set.
pub fn is_tree_neighborhood(g: &TannerGraph, e: usize, r: usize) -> bool {
    let (root, root_chk) = g.edge(e);
    let mut var_depth = vec![usize::MAX; g.n()];
    var_depth[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(j) = queue.pop_front() {
        if var_depth[j] == r {
            continue;
        }
        for &f in g.var_edges(j) {
            if f == e {
                continue;
            }
            for w in g.chk_neighbors(g.edge(f).1) {
                if var_depth[w] == usize::MAX {
                    var_depth[w] = var_depth[j] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    let in_v = |j: usize| var_depth[j] != usize::MAX;
    let mut parent: Vec<usize> = (0..g.n() + g.m()).collect();
    let mut seen_chk = vec![false; g.m()];
    for j in (0..g.n()).filter(|&j| in_v(j)) {
        for a in g.var_neighbors(j) {
            if seen_chk[a] {
                continue;
            }
            seen_chk[a] = true;
            if !g.chk_neighbors(a).all(in_v) {
                continue;
            }
            for &f in g.chk_edges(a) {
                let (v, c) = g.edge(f);
                if v == root && c == root_chk {
                    continue;
                }
                let (x, y) = (find(&mut parent, v), find(&mut parent, g.n() + c));
                if x == y {
                    return false;
                }
                parent[x] = y;
            }
        }
    }
    true
}

/// Monte Carlo estimate of the probability that `B_{i→a}(r)` is cycle-free
/// for a uniformly chosen edge of a fresh ensemble draw.
pub fn tree_neighborhood_fraction<R: Rng + ?Sized>(
    ens: &RegularEnsemble,
    r: usize,
    trials: usize,
    rng: &mut R,
) -> Result<f64> {
    ens.validate()?;
    if r == 0 || trials == 0 {
        return Ok(1.0);
    }
    let mut hits = 0usize;
    for _ in 0..trials {
        let g = sample_regular(ens, rng)?;
        let e = rng.random_range(0..g.num_edges());
        hits += is_tree_neighborhood(&g, e, r) as usize;
    }
    Ok(hits as f64 / trials as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::hamming_7_4;
    use crate::rng::seeded;

    #[test]
    fn girth_examples() {
        let spc = TannerGraph::from_dense(&[vec![1, 1, 1]]).unwrap();
        assert_eq!(girth(&spc), None);
        let square = TannerGraph::from_dense(&[vec![1, 1, 0], vec![1, 1, 1]]).unwrap();
        assert_eq!(girth(&square), Some(4));
        // Rows 1 and 2 share columns 3 and 7.
        assert_eq!(girth(&hamming_7_4()), Some(4));
    }

    #[test]
    fn hexagon_has_girth_six() {
        let g = TannerGraph::from_check_rows(3, &[vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap();
        assert_eq!(girth(&g), Some(6));
    }

    #[test]
    fn neighborhood_on_tree_and_cycle() {
        let spc = TannerGraph::from_dense(&[vec![1, 1, 1]]).unwrap();
        for e in 0..3 {
            assert!(is_tree_neighborhood(&spc, e, 3));
        }
        let square = TannerGraph::from_dense(&[vec![1, 1, 0], vec![1, 1, 1]]).unwrap();
        // Excluding one edge of variable 0 breaks the 4-cycle through it.
        assert!(is_tree_neighborhood(&square, 0, 1));
        // A 4-cycle between variables 0 and 1, hanging two hops below variable 2.
        let g = TannerGraph::from_check_rows(3, &[vec![0, 1], vec![0, 1], vec![0, 2], vec![2]]).unwrap();
        let e = g.var_edges(2).iter().copied().find(|&f| g.edge(f).1 == 3).unwrap();
        assert!(is_tree_neighborhood(&g, e, 0));
        assert!(is_tree_neighborhood(&g, e, 1));
        assert!(!is_tree_neighborhood(&g, e, 2));
    }

    #[test]
    fn radius_zero_is_always_a_tree() {
        let ens = RegularEnsemble::new(3, 6, 12).unwrap();
        assert_eq!(tree_neighborhood_fraction(&ens, 0, 10, &mut seeded(1)).unwrap(), 1.0);
    }
}
