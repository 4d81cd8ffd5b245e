//! Brute-force centralities and robustness metrics for small graphs.

use gnne_core::Graph;
use nalgebra::{DMatrix, SymmetricEigen};

pub const INF: usize = usize::MAX;

fn adjacency(g: &Graph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut a = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

fn degrees(a: &[Vec<bool>]) -> Vec<usize> {
    a.iter().map(|row| row.iter().filter(|&&x| x).count()).collect()
}

/// All-pairs hop distances by Floyd–Warshall.
pub fn floyd_warshall(g: &Graph) -> Vec<Vec<usize>> {
    floyd_warshall_among(g, &vec![false; g.node_count()])
}

/// Distances in the subgraph induced by nodes not flagged in `removed`.
pub fn floyd_warshall_among(g: &Graph, removed: &[bool]) -> Vec<Vec<usize>> {
    let mut a = adjacency(g);
    let n = a.len();
    for (v, &gone) in removed.iter().enumerate() {
        if gone {
            for u in 0..n {
                a[v][u] = false;
                a[u][v] = false;
            }
        }
    }
    let mut d = vec![vec![INF; n]; n];
    for i in 0..n {
        d[i][i] = 0;
        for j in 0..n {
            if a[i][j] {
                d[i][j] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] != INF && d[k][j] != INF && d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Every shortest path between every ordered pair, by depth-first
/// enumeration of simple paths.
pub struct ShortestPaths {
    /// `count[s][t]` = number of shortest `s`-`t` paths.
    pub count: Vec<Vec<u64>>,
    /// `through[s][t][v]` = how many of them have `v` as an interior node.
    pub through: Vec<Vec<Vec<u64>>>,
}

pub fn shortest_paths(g: &Graph) -> ShortestPaths {
    let a = adjacency(g);
    let d = floyd_warshall(g);
    let n = a.len();
    let mut count = vec![vec![0u64; n]; n];
    let mut through = vec![vec![vec![0u64; n]; n]; n];
    for s in 0..n {
        let mut path = vec![s];
        let mut on_path = vec![false; n];
        on_path[s] = true;
        dfs(&a, &d, s, &mut path, &mut on_path, &mut count, &mut through);
    }
    ShortestPaths { count, through }
}

fn dfs(
    a: &[Vec<bool>],
    d: &[Vec<usize>],
    s: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    count: &mut [Vec<u64>],
    through: &mut [Vec<Vec<u64>>],
) {
    let v = *path.last().unwrap();
    let len = path.len() - 1;
    if len > 0 {
        if len != d[s][v] {
            // A prefix that is not shortest never extends to a shortest path.
            return;
        }
        count[s][v] += 1;
        for &w in &path[1..len] {
            through[s][v][w] += 1;
        }
    }
    for u in 0..a.len() {
        if a[v][u] && !on_path[u] {
            on_path[u] = true;
            path.push(u);
            dfs(a, d, s, path, on_path, count, through);
            path.pop();
            on_path[u] = false;
        }
    }
}

/// Literal global-normalizer betweenness: Σ L_jk(i) / Σ L_jk over ordered pairs.
pub fn betweenness(g: &Graph) -> Vec<f64> {
    let sp = shortest_paths(g);
    let n = g.node_count();
    let mut total = 0u64;
    let mut num = vec![0u64; n];
    for j in 0..n {
        for k in 0..n {
            if j == k {
                continue;
            }
            total += sp.count[j][k];
            for i in 0..n {
                if i != j && i != k {
                    num[i] += sp.through[j][k][i];
                }
            }
        }
    }
    num.iter()
        .map(|&c| if total > 0 { c as f64 / total as f64 } else { 0.0 })
        .collect()
}

pub fn closeness(g: &Graph) -> Vec<f64> {
    floyd_warshall(g)
        .iter()
        .map(|row| {
            let reach: Vec<usize> = row.iter().copied().filter(|&x| x != INF).collect();
            let sum: usize = reach.iter().sum();
            if sum == 0 {
                0.0
            } else {
                (reach.len() - 1) as f64 / sum as f64
            }
        })
        .collect()
}

pub fn harmonic(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    floyd_warshall(g)
        .iter()
        .map(|row| {
            row.iter()
                .filter(|&&x| x != INF && x > 0)
                .map(|&x| 1.0 / x as f64)
                .sum::<f64>()
                / (n.max(2) - 1) as f64
        })
        .collect()
}

pub fn degree(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    degrees(&adjacency(g))
        .into_iter()
        .map(|k| k as f64 / (n - 1) as f64)
        .collect()
}

/// Perron vector of the adjacency matrix from a dense symmetric eigensolve,
/// unit norm and nonnegative. Meaningful for connected graphs.
pub fn eigenvector(g: &Graph) -> (Vec<f64>, f64) {
    let a = adjacency(g);
    let n = a.len();
    let m = DMatrix::from_fn(n, n, |i, j| if a[i][j] { 1.0 } else { 0.0 });
    let eig = SymmetricEigen::new(m);
    let (idx, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|x: &(usize, &f64), y: &(usize, &f64)| x.1.total_cmp(y.1))
        .unwrap();
    let mut v: Vec<f64> = eig.eigenvectors.column(idx).iter().copied().collect();
    let sign = if v.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x *= sign / norm);
    (v, lambda)
}

pub fn collective_influence(g: &Graph, radius: usize) -> Vec<f64> {
    let k = degrees(&adjacency(g));
    let d = floyd_warshall(g);
    (0..k.len())
        .map(|i| {
            let frontier: f64 = (0..k.len())
                .filter(|&j| d[i][j] == radius)
                .map(|j| k[j] as f64 - 1.0)
                .sum();
            (k[i] as f64 - 1.0) * frontier
        })
        .collect()
}

/// Core numbers from the k-core definition: `v` is in the k-core when it
/// survives repeatedly deleting every node with fewer than `k` remaining
/// neighbors.
pub fn core_numbers(g: &Graph) -> Vec<usize> {
    let a = adjacency(g);
    let n = a.len();
    let mut core = vec![0; n];
    for k in 1..n {
        let mut alive = vec![true; n];
        loop {
            let victim = (0..n).find(|&v| {
                alive[v] && (0..n).filter(|&u| alive[u] && a[v][u]).count() < k
            });
            match victim {
                Some(v) => alive[v] = false,
                None => break,
            }
        }
        for v in 0..n {
            if alive[v] {
                core[v] = k;
            }
        }
    }
    core
}

/// `(shell, entropy)` per node for the improved K-shell ordering.
pub fn iks_keys(g: &Graph) -> Vec<(usize, f64)> {
    let a = adjacency(g);
    let k = degrees(&a);
    let total: usize = k.iter().sum();
    let core = core_numbers(g);
    (0..a.len())
        .map(|i| {
            let e = (0..a.len())
                .filter(|&j| a[i][j])
                .map(|j| {
                    let p = k[j] as f64 / total as f64;
                    -p * p.ln()
                })
                .sum();
            (core[i], e)
        })
        .collect()
}

/// Largest component among nodes not in `removed`, by union–find.
pub fn largest_component(g: &Graph, removed: &[bool]) -> usize {
    let n = g.node_count();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut c = x;
        while p[c] != r {
            let next = p[c];
            p[c] = r;
            c = next;
        }
        r
    }
    for (u, v) in g.edges() {
        if !removed[u] && !removed[v] {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            parent[ru] = rv;
        }
    }
    let mut size = vec![0usize; n];
    for v in 0..n {
        if !removed[v] {
            let r = find(&mut parent, v);
            size[r] += 1;
        }
    }
    size.into_iter().max().unwrap_or(0)
}

/// Mean inverse distance over ordered pairs of surviving nodes.
pub fn efficiency(g: &Graph, removed: &[bool]) -> f64 {
    let d = floyd_warshall_among(g, removed);
    let alive: Vec<usize> = (0..g.node_count()).filter(|&v| !removed[v]).collect();
    let m = alive.len();
    if m < 2 {
        return 0.0;
    }
    let mut sum = 0.0;
    for &i in &alive {
        for &j in &alive {
            if i != j && d[i][j] != INF {
                sum += 1.0 / d[i][j] as f64;
            }
        }
    }
    sum / (m * (m - 1)) as f64
}
