//! Undirected simple graphs: ingestion, synthetic generation, and the
//! structural primitives shared by every other module.

use std::collections::{HashMap, VecDeque};
use std::io::{BufRead, Write};
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

/// Hop distance marker for nodes a BFS never reached.
pub const UNREACHABLE: u32 = u32::MAX;

/// Undirected, unweighted simple graph over dense ids `0..n`.
///
/// Neighbor lists are sorted and symmetric. Nodes taken out by
/// [`Graph::remove_nodes`] keep their id but lose all edges and are flagged
/// as removed, so removal bookkeeping stays aligned with the original ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
    edges: usize,
    removed: Vec<bool>,
}

impl Graph {
    /// Builds a graph on `n` nodes. Self-loops are dropped and duplicate
    /// edges collapsed.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n > u32::MAX as usize {
            return Err(Error::invalid(format!("{n} nodes exceed the u32 id space")));
        }
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) out of range for {n} nodes"
                )));
            }
            if u == v {
                continue;
            }
            adj[u].push(v as u32);
            adj[v].push(u as u32);
        }
        let mut total = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            total += list.len();
        }
        Ok(Self {
            adj,
            edges: total / 2,
            removed: vec![false; n],
        })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            adj: vec![Vec::new(); n],
            edges: 0,
            removed: vec![false; n],
        }
    }

    /// Size of the id space, including removed nodes.
    #[inline]
    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&(v as u32)).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .map(|&v| v as usize)
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    #[inline]
    pub fn is_removed(&self, v: usize) -> bool {
        self.removed[v]
    }

    /// Number of nodes that have not been removed.
    pub fn active_count(&self) -> usize {
        self.removed.iter().filter(|r| !**r).count()
    }

    pub fn average_degree(&self) -> f64 {
        if self.adj.is_empty() {
            return 0.0;
        }
        2.0 * self.edges as f64 / self.adj.len() as f64
    }

    /// Induced subgraph on the survivors. Survivors keep their ids; victims
    /// become edgeless and are flagged removed.
    pub fn remove_nodes(&self, victims: &[usize]) -> Graph {
        let mut removed = self.removed.clone();
        for &v in victims {
            removed[v] = true;
        }
        let mut edges = 0;
        let adj = self
            .adj
            .iter()
            .enumerate()
            .map(|(u, list)| {
                if removed[u] {
                    return Vec::new();
                }
                let kept: Vec<u32> = list
                    .iter()
                    .copied()
                    .filter(|&v| !removed[v as usize])
                    .collect();
                edges += kept.len();
                kept
            })
            .collect();
        Graph {
            adj,
            edges: edges / 2,
            removed,
        }
    }

    /// Component label per node (`usize::MAX` for removed nodes) and the
    /// size of each component.
    pub fn components(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.node_count();
        let mut label = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..n {
            if label[start] != usize::MAX || self.removed[start] {
                continue;
            }
            let id = sizes.len();
            label[start] = id;
            queue.push_back(start);
            let mut size = 0;
            while let Some(u) = queue.pop_front() {
                size += 1;
                for &v in &self.adj[u] {
                    let v = v as usize;
                    if label[v] == usize::MAX {
                        label[v] = id;
                        queue.push_back(v);
                    }
                }
            }
            sizes.push(size);
        }
        (label, sizes)
    }

    /// Node count of the largest connected component among active nodes.
    pub fn largest_component_size(&self) -> usize {
        self.components().1.into_iter().max().unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        let active = self.active_count();
        active > 0 && self.largest_component_size() == active
    }

    /// `L = D - A` as a dense matrix.
    pub fn laplacian(&self) -> DenseMatrix {
        let n = self.node_count();
        let mut l = DenseMatrix::zeros(n, n);
        for (i, list) in self.adj.iter().enumerate() {
            l[(i, i)] = list.len() as f64;
            for &j in list {
                l[(i, j as usize)] = -1.0;
            }
        }
        l
    }

    pub fn bfs_layers(&self, source: usize) -> Bfs {
        Bfs::run(self, source)
    }
}

/// Breadth-first search from one source, with shortest-path counts.
#[derive(Debug, Clone)]
pub struct Bfs {
    pub source: usize,
    /// Hop distance, [`UNREACHABLE`] when not reached.
    pub dist: Vec<u32>,
    /// Number of shortest paths from the source.
    pub sigma: Vec<f64>,
    /// Predecessors on shortest paths.
    pub preds: Vec<Vec<u32>>,
    /// Reached nodes in non-decreasing distance order.
    pub order: Vec<u32>,
}

impl Bfs {
    fn run(g: &Graph, source: usize) -> Self {
        let n = g.node_count();
        let mut dist = vec![UNREACHABLE; n];
        let mut sigma = vec![0.0; n];
        let mut preds = vec![Vec::new(); n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::new();
        dist[source] = 0;
        sigma[source] = 1.0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            order.push(u as u32);
            let du = dist[u];
            for &v in g.neighbors(u) {
                let v = v as usize;
                if dist[v] == UNREACHABLE {
                    dist[v] = du + 1;
                    queue.push_back(v);
                }
                if dist[v] == du + 1 {
                    sigma[v] += sigma[u];
                    preds[v].push(u as u32);
                }
            }
        }
        Self {
            source,
            dist,
            sigma,
            preds,
            order,
        }
    }
}

/// Hop distances only; cheaper than [`Bfs`] when path counts are not needed.
pub fn bfs_distances(g: &Graph, source: usize, dist: &mut Vec<u32>, queue: &mut VecDeque<u32>) {
    dist.clear();
    dist.resize(g.node_count(), UNREACHABLE);
    queue.clear();
    dist[source] = 0;
    queue.push_back(source as u32);
    while let Some(u) = queue.pop_front() {
        let du = dist[u as usize];
        for &v in g.neighbors(u as usize) {
            if dist[v as usize] == UNREACHABLE {
                dist[v as usize] = du + 1;
                queue.push_back(v);
            }
        }
    }
}

/// Bijection between external node labels and dense internal ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeMap {
    labels: Vec<String>,
    index: HashMap<String, u32>,
}

impl NodeMap {
    /// Identity map labelling node `i` as `"i"`.
    pub fn identity(n: usize) -> Self {
        let mut map = Self::default();
        for i in 0..n {
            map.intern(&i.to_string());
        }
        map
    }

    fn intern(&mut self, label: &str) -> u32 {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = self.labels.len() as u32;
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), id);
        id
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, id: usize) -> &str {
        &self.labels[id]
    }

    pub fn id(&self, label: &str) -> Option<usize> {
        self.index.get(label).map(|&i| i as usize)
    }
}

/// Parses a whitespace-separated edge list. Lines starting with `#` or `%`
/// are comments; tokens past the second are ignored (weights, timestamps).
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<(Graph, NodeMap)> {
    let mut map = NodeMap::default();
    let mut edges = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut tokens = trimmed.split_whitespace();
        let (Some(a), Some(b)) = (tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected two node labels, found {trimmed:?}"),
            });
        };
        let u = map.intern(a) as usize;
        let v = map.intern(b) as usize;
        edges.push((u, v));
    }
    let graph = Graph::from_edges(map.len(), edges)?;
    if graph.edge_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    Ok((graph, map))
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<(Graph, NodeMap)> {
    let file = std::fs::File::open(path)?;
    load_edge_list(std::io::BufReader::new(file))
}

/// Writes one `label label` line per undirected edge.
pub fn write_edge_list<W: Write>(g: &Graph, map: &NodeMap, mut out: W) -> Result<()> {
    for (u, v) in g.edges() {
        writeln!(out, "{} {}", map.label(u), map.label(v))?;
    }
    Ok(())
}

/// Barabási–Albert preferential attachment.
///
/// Starts from a complete graph on `m` nodes; every later node attaches to
/// `m` distinct existing nodes drawn proportionally to degree. The result
/// has exactly `C(m, 2) + m·(n − m)` edges.
pub fn generate_ba(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if m < 1 || n <= m {
        return Err(Error::invalid(format!(
            "preferential attachment needs n > m >= 1, got n={n}, m={m}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(m * (m - 1) / 2 + m * (n - m));
    // Every edge endpoint, so a uniform pick from here is degree-weighted.
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * edges.capacity());
    for u in 0..m {
        for v in (u + 1)..m {
            edges.push((u, v));
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    let mut targets: Vec<usize> = Vec::with_capacity(m);
    for new in m..n {
        targets.clear();
        if new == m {
            targets.extend(0..m);
        } else {
            while targets.len() < m {
                let pick = endpoints[rng.gen_range(0..endpoints.len())];
                if !targets.contains(&pick) {
                    targets.push(pick);
                }
            }
        }
        for &t in &targets {
            edges.push((new, t));
            endpoints.push(new);
            endpoints.push(t);
        }
    }
    Graph::from_edges(n, edges)
}

/// Power-law exponent estimate from the log-log slope of the degree CCDF.
///
/// Fits `log P(K >= k)` against `log k` by least squares over distinct
/// degrees `k >= k_min` whose tail still holds at least `min_tail` nodes;
/// returns `1 - slope`.
pub fn degree_exponent(g: &Graph, k_min: usize, min_tail: usize) -> Option<f64> {
    let n = g.node_count() as f64;
    let mut degrees = g.degrees();
    degrees.sort_unstable();
    let mut points = Vec::new();
    let mut i = 0;
    while i < degrees.len() {
        let k = degrees[i];
        let tail = degrees.len() - i;
        if k >= k_min.max(1) && tail >= min_tail {
            points.push(((k as f64).ln(), (tail as f64 / n).ln()));
        }
        while i < degrees.len() && degrees[i] == k {
            i += 1;
        }
    }
    if points.len() < 2 {
        return None;
    }
    let count = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / count;
    let my = points.iter().map(|p| p.1).sum::<f64>() / count;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(1.0 - sxy / sxx)
}
