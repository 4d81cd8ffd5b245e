use super::RankedList;
use crate::graph::Graph;

/// Shell index (core number) of every node, by bucket-sorted peeling:
/// nodes leave in non-decreasing order of current degree, and a node's
/// shell is the largest degree threshold seen when it leaves.
pub fn shell_indices(g: &Graph) -> Vec<usize> {
    let n = g.node_count();
    let mut degree = g.degrees();
    let max_degree = degree.iter().copied().max().unwrap_or(0);

    // bin[d] = start of the degree-d block in `vert`.
    let mut bin = vec![0usize; max_degree + 2];
    for &d in &degree {
        bin[d + 1] += 1;
    }
    for d in 1..bin.len() {
        bin[d] += bin[d - 1];
    }
    let mut pos = vec![0usize; n];
    let mut vert = vec![0usize; n];
    let mut next = bin.clone();
    for v in 0..n {
        pos[v] = next[degree[v]];
        vert[pos[v]] = v;
        next[degree[v]] += 1;
    }

    for i in 0..n {
        let v = vert[i];
        for &u in g.neighbors(v) {
            let u = u as usize;
            if degree[u] > degree[v] {
                // Swap u to the front of its block, then shrink its degree.
                let du = degree[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = vert[pw];
                if u != w {
                    vert.swap(pu, pw);
                    pos[u] = pw;
                    pos[w] = pu;
                }
                bin[du] += 1;
                degree[u] -= 1;
            }
        }
    }
    degree
}

/// K-shell decomposition; each node scores its shell index `K_s`.
pub fn k_shell(g: &Graph) -> RankedList {
    RankedList::from_scores(shell_indices(g).into_iter().map(|k| k as f64).collect())
}

/// Neighbor-degree entropy `e_i = -Σ_{j∈Γ(i)} I_j ln I_j` with
/// `I_j = k_j / Σ_v k_v`.
pub fn iks_entropy(g: &Graph) -> Vec<f64> {
    let total: f64 = (2 * g.edge_count()) as f64;
    (0..g.node_count())
        .map(|i| {
            g.neighbors(i)
                .iter()
                .map(|&j| {
                    let p = g.degree(j as usize) as f64 / total;
                    -p * p.ln()
                })
                .sum()
        })
        .collect()
}

/// Improved K-shell: shells descending, then entropy descending within a
/// shell. The composite key is packed as `2·K_s + e_i / max(e)`, so any
/// entropy difference stays below one shell step.
pub fn iks(g: &Graph) -> RankedList {
    let shells = shell_indices(g);
    let entropy = iks_entropy(g);
    let max_e = entropy.iter().copied().fold(0.0, f64::max);
    let scores = shells
        .iter()
        .zip(&entropy)
        .map(|(&k, &e)| {
            let norm = if max_e > 0.0 { e / max_e } else { 0.0 };
            2.0 * k as f64 + norm
        })
        .collect();
    RankedList::from_scores(scores)
}

#[cfg(test)]
mod tests {
    use super::super::fixtures::*;
    use super::*;

    #[test]
    fn trees_are_shell_one() {
        assert!(shell_indices(&path(6)).iter().all(|&k| k == 1));
        assert!(shell_indices(&star(5)).iter().all(|&k| k == 1));
    }

    #[test]
    fn triangle_with_pendant() {
        assert_eq!(shell_indices(&triangle_pendant()), vec![2, 2, 2, 1]);
        let order = iks(&triangle_pendant()).order().to_vec();
        assert_eq!(order[3], 3);
    }

    #[test]
    fn complete_graph_is_one_shell() {
        assert!(shell_indices(&complete(5)).iter().all(|&k| k == 4));
        // K4: identical keys, so id order.
        assert_eq!(iks(&complete(4)).order(), &[0, 1, 2, 3]);
    }

    #[test]
    fn isolated_nodes_have_shell_zero() {
        let g = Graph::from_edges(4, [(0, 1)]).unwrap();
        assert_eq!(shell_indices(&g), vec![1, 1, 0, 0]);
    }

    #[test]
    fn iks_entropy_is_nonnegative() {
        for g in [path(5), star(4), triangle_pendant(), complete(5)] {
            assert!(iks_entropy(&g).iter().all(|&e| e >= 0.0));
        }
    }
}
