//! Exhaustive generation of non-isomorphic graphs on up to eight nodes.
//!
//! Graphs on `n` nodes are grown from every graph on `n - 1` nodes by adding
//! a vertex with every possible neighborhood, then deduplicated by a
//! canonical code: vertices are colored by iterated degree refinement, and
//! the code is the minimum adjacency bit-string over all relabelings that
//! respect the color order.

use std::collections::BTreeSet;

use gnne_core::Graph;

/// Adjacency as one neighbor bitmask per vertex.
type Masks = Vec<u8>;

fn code_of(masks: &Masks, perm: &[usize]) -> u64 {
    // perm[new] = old
    let n = perm.len();
    let mut code = 0u64;
    let mut bit = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            if masks[perm[i]] >> perm[j] & 1 == 1 {
                code |= 1 << bit;
            }
            bit += 1;
        }
    }
    code
}

fn refine_colors(masks: &Masks) -> Vec<usize> {
    let n = masks.len();
    let mut colors: Vec<usize> = masks.iter().map(|m| m.count_ones() as usize).collect();
    loop {
        let signatures: Vec<(usize, Vec<usize>)> = (0..n)
            .map(|v| {
                let mut nbr: Vec<usize> = (0..n)
                    .filter(|&u| masks[v] >> u & 1 == 1)
                    .map(|u| colors[u])
                    .collect();
                nbr.sort_unstable();
                (colors[v], nbr)
            })
            .collect();
        let distinct: Vec<&(usize, Vec<usize>)> = signatures
            .iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let next: Vec<usize> = signatures
            .iter()
            .map(|s| distinct.binary_search(&s).unwrap())
            .collect();
        let classes = |c: &[usize]| c.iter().collect::<BTreeSet<_>>().len();
        if classes(&next) == classes(&colors) {
            return next;
        }
        colors = next;
    }
}

fn canonical_code(masks: &Masks) -> u64 {
    let colors = refine_colors(masks);
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut by_color: Vec<usize> = (0..masks.len()).collect();
    by_color.sort_by_key(|&v| colors[v]);
    for v in by_color {
        match classes.last_mut() {
            Some(last) if colors[last[0]] == colors[v] => last.push(v),
            _ => classes.push(vec![v]),
        }
    }
    let mut best = u64::MAX;
    let mut perm = Vec::with_capacity(masks.len());
    search(masks, &classes, 0, &mut perm, &mut vec![false; masks.len()], &mut best);
    best
}

fn search(
    masks: &Masks,
    classes: &[Vec<usize>],
    class_idx: usize,
    perm: &mut Vec<usize>,
    used: &mut Vec<bool>,
    best: &mut u64,
) {
    if perm.len() == masks.len() {
        *best = (*best).min(code_of(masks, perm));
        return;
    }
    let class = &classes[class_idx];
    let placed_in_class = perm.len() - classes[..class_idx].iter().map(Vec::len).sum::<usize>();
    let next_class = if placed_in_class + 1 == class.len() {
        class_idx + 1
    } else {
        class_idx
    };
    for &v in class {
        if !used[v] {
            used[v] = true;
            perm.push(v);
            search(masks, classes, next_class, perm, used, best);
            perm.pop();
            used[v] = false;
        }
    }
}

fn decode(n: usize, code: u64) -> Masks {
    let mut masks = vec![0u8; n];
    let mut bit = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            if code >> bit & 1 == 1 {
                masks[i] |= 1 << j;
                masks[j] |= 1 << i;
            }
            bit += 1;
        }
    }
    masks
}

fn is_connected(masks: &Masks) -> bool {
    let n = masks.len();
    if n == 0 {
        return false;
    }
    let mut seen = 1u8;
    let mut frontier = 1u8;
    while frontier != 0 {
        let mut next = 0u8;
        for v in 0..n {
            if frontier >> v & 1 == 1 {
                next |= masks[v];
            }
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen.count_ones() as usize == n
}

/// Canonical codes of all graphs (connected or not) on `n` nodes.
fn all_graph_codes(n: usize) -> BTreeSet<u64> {
    assert!(n <= 8, "bitmask representation holds at most 8 nodes");
    let mut level: BTreeSet<u64> = BTreeSet::from([0]);
    for size in 2..=n {
        let mut next = BTreeSet::new();
        for &code in &level {
            let base = decode(size - 1, code);
            for nbrs in 0u16..(1 << (size - 1)) {
                let mut masks = base.clone();
                masks.push(nbrs as u8);
                for (v, m) in masks.iter_mut().enumerate().take(size - 1) {
                    if nbrs >> v & 1 == 1 {
                        *m |= 1 << (size - 1);
                    }
                }
                next.insert(canonical_code(&masks));
            }
        }
        level = next;
    }
    if n == 0 {
        BTreeSet::new()
    } else {
        level
    }
}

/// One representative of every isomorphism class of connected graphs on
/// `n` nodes.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    all_graph_codes(n)
        .into_iter()
        .map(|code| decode(n, code))
        .filter(is_connected)
        .map(|masks| to_graph(&masks))
        .collect()
}

fn to_graph(masks: &Masks) -> Graph {
    let n = masks.len();
    let edges = (0..n).flat_map(|i| {
        ((i + 1)..n)
            .filter(move |&j| masks[i] >> j & 1 == 1)
            .map(move |j| (i, j))
    });
    Graph::from_edges(n, edges).expect("valid small graph")
}

/// All connected graphs with `1 <= n <= max_n`, smallest first.
pub fn connected_graphs_up_to(max_n: usize) -> Vec<Graph> {
    (1..=max_n).flat_map(connected_graphs).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_known_sequence() {
        // OEIS A001349.
        let expected = [1, 1, 2, 6, 21, 112, 853];
        for (n, &count) in (1..=7).zip(&expected) {
            assert_eq!(connected_graphs(n).len(), count, "n={n}");
        }
    }
}
