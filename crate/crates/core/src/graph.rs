//! Undirected weighted graphs, exact shortest paths, canonical (consistently
//! tie-broken) paths, and hop-bounded distances.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::rng::edge_key;

pub const INF: f64 = f64::INFINITY;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: u32,
    pub v: u32,
    pub w: f64,
}

/// Undirected graph with positive edge weights, vertices `0..n`.
/// At most one edge per unordered pair, no self-loops.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<Vec<(u32, f64)>>,
}

impl Graph {
    pub fn new(n: usize, edges: Vec<(u32, u32, f64)>) -> Result<Graph> {
        let mut seen = std::collections::HashSet::new();
        let mut es = Vec::with_capacity(edges.len());
        let mut adj = vec![Vec::new(); n];
        for (u, v, w) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::invalid(format!(
                    "edge ({u},{v}) out of range for n={n}"
                )));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at vertex {u}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::invalid(format!(
                    "edge ({u},{v}) has non-positive or non-finite weight {w}"
                )));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::invalid(format!("duplicate edge ({u},{v})")));
            }
            adj[u as usize].push((v, w));
            adj[v as usize].push((u, w));
            es.push(Edge {
                u: key.0,
                v: key.1,
                w,
            });
        }
        es.sort_by_key(|e| (e.u, e.v));
        for nbrs in &mut adj {
            nbrs.sort_by_key(|nb| nb.0);
        }
        Ok(Graph { n, edges: es, adj })
    }

    pub fn unweighted(n: usize, pairs: Vec<(u32, u32)>) -> Result<Graph> {
        Graph::new(n, pairs.into_iter().map(|(u, v)| (u, v, 1.0)).collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, u: u32) -> &[(u32, f64)] {
        &self.adj[u as usize]
    }

    pub fn is_unit_weighted(&self) -> bool {
        self.edges.iter().all(|e| e.w == 1.0)
    }

    pub fn has_edge(&self, u: u32, v: u32) -> Option<f64> {
        self.adj[u as usize]
            .binary_search_by(|probe| probe.0.cmp(&v))
            .ok()
            .map(|i| self.adj[u as usize][i].1)
    }

    fn check_vertex(&self, u: u32) -> Result<()> {
        if (u as usize) < self.n {
            Ok(())
        } else {
            Err(Error::invalid(format!("vertex {u} out of range (n={})", self.n)))
        }
    }

    /// Single-source shortest paths. Predecessor ties go to the smallest
    /// predecessor id.
    pub fn dijkstra(&self, source: u32) -> Result<DistanceRow> {
        self.check_vertex(source)?;
        let (dist, parent) = dijkstra_adj(&self.adj, source);
        Ok(DistanceRow {
            source,
            dist,
            parent,
        })
    }

    /// Distances to the nearest of `sources`, plus which source is nearest.
    /// Ties in distance go to the smallest source id.
    pub fn multi_source_dijkstra(&self, sources: &[u32]) -> Result<(Vec<f64>, Vec<Option<u32>>)> {
        if sources.is_empty() {
            return Err(Error::invalid("multi-source dijkstra with empty source set"));
        }
        for &s in sources {
            self.check_vertex(s)?;
        }
        let mut dist = vec![INF; self.n];
        let mut nearest: Vec<Option<u32>> = vec![None; self.n];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            let su = s as usize;
            dist[su] = 0.0;
            nearest[su] = Some(match nearest[su] {
                Some(prev) => prev.min(s),
                None => s,
            });
        }
        for &s in sources {
            heap.push(MinItem {
                dist: 0.0,
                v: s,
            });
        }
        while let Some(MinItem { dist: d, v }) = heap.pop() {
            let vu = v as usize;
            if d > dist[vu] {
                continue;
            }
            for &(nb, w) in &self.adj[vu] {
                let nbu = nb as usize;
                let nd = d + w;
                if nd < dist[nbu] {
                    dist[nbu] = nd;
                    nearest[nbu] = nearest[vu];
                    heap.push(MinItem { dist: nd, v: nb });
                } else if nd == dist[nbu] {
                    let cand = nearest[vu];
                    if let (Some(c), Some(cur)) = (cand, nearest[nbu]) {
                        if c < cur {
                            nearest[nbu] = Some(c);
                        }
                    }
                }
            }
        }
        Ok((dist, nearest))
    }

    /// Canonical shortest-path tree from `source`. Paths are unique under a
    /// lexicographic (weight, edge-key-sum) comparison, which makes canonical
    /// paths symmetric in their endpoints and closed under taking subpaths.
    pub fn canonical_tree(&self, source: u32) -> Result<CanonicalTree> {
        self.canonical_tree_bounded(source, INF)
    }

    /// Canonical tree restricted to vertices at distance strictly below
    /// `bound`.
    pub fn canonical_tree_bounded(&self, source: u32, bound: f64) -> Result<CanonicalTree> {
        self.check_vertex(source)?;
        let mut dist = vec![INF; self.n];
        let mut key = vec![0u128; self.n];
        let mut parent: Vec<Option<u32>> = vec![None; self.n];
        let mut settled = vec![false; self.n];
        let mut heap = BinaryHeap::new();
        dist[source as usize] = 0.0;
        heap.push(CanonItem {
            dist: 0.0,
            key: 0,
            v: source,
        });
        while let Some(CanonItem { dist: d, key: k, v }) = heap.pop() {
            let vu = v as usize;
            if settled[vu] || d >= bound {
                if d >= bound {
                    break;
                }
                continue;
            }
            settled[vu] = true;
            dist[vu] = d;
            key[vu] = k;
            for &(nb, w) in &self.adj[vu] {
                let nbu = nb as usize;
                if settled[nbu] {
                    continue;
                }
                let nd = d + w;
                let nk = k + edge_key(v, nb) as u128;
                if nd < dist[nbu] || (nd == dist[nbu] && nk < key[nbu]) {
                    dist[nbu] = nd;
                    key[nbu] = nk;
                    parent[nbu] = Some(v);
                    heap.push(CanonItem {
                        dist: nd,
                        key: nk,
                        v: nb,
                    });
                }
            }
        }
        // unsettled vertices keep dist/key defaults unless reachable below
        // bound; clear stale tentative labels past the bound
        if bound < INF {
            for u in 0..self.n {
                if !settled[u] {
                    dist[u] = INF;
                    key[u] = 0;
                    parent[u] = None;
                }
            }
        }
        Ok(CanonicalTree {
            source,
            dist,
            parent,
        })
    }

    /// Edges of the canonical shortest path between `u` and `v`, in path
    /// order from `u`. `None` if disconnected; empty for `u == v`.
    pub fn shortest_path_edges(&self, u: u32, v: u32) -> Result<Option<Vec<(u32, u32)>>> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Ok(Some(Vec::new()));
        }
        let tree = self.canonical_tree(u)?;
        Ok(tree.path_vertices(v).map(|path| {
            path.windows(2).map(|w| (w[0], w[1])).collect()
        }))
    }

    /// Serialize in the edge-list text format: one `u v w` per line, with a
    /// `# n=` directive so isolated vertices survive a round trip. Unit
    /// weights are omitted.
    pub fn to_edge_list_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# n={}", self.n);
        let unit = self.is_unit_weighted();
        for e in &self.edges {
            if unit {
                let _ = writeln!(out, "{} {}", e.u, e.v);
            } else {
                let _ = writeln!(out, "{} {} {}", e.u, e.v, e.w);
            }
        }
        out
    }

    /// Parse the edge-list text format: `u v [w]` per line, `#` comments,
    /// optional `# n=<count>` directive; missing weights default to 1.
    pub fn from_edge_list_str(text: &str) -> Result<Graph> {
        let mut n_directive = 0usize;
        let mut edges = Vec::new();
        let mut max_id = 0u32;
        let mut any = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(val) = rest.strip_prefix("n=") {
                    n_directive = val.trim().parse().map_err(|_| Error::Parse {
                        line: idx + 1,
                        msg: format!("bad vertex count directive: {rest}"),
                    })?;
                }
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 && fields.len() != 3 {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected `u v [w]`, got `{line}`"),
                });
            }
            let u: u32 = fields[0].parse().map_err(|_| Error::Parse {
                line: idx + 1,
                msg: format!("bad vertex id `{}`", fields[0]),
            })?;
            let v: u32 = fields[1].parse().map_err(|_| Error::Parse {
                line: idx + 1,
                msg: format!("bad vertex id `{}`", fields[1]),
            })?;
            let w: f64 = if fields.len() == 3 {
                fields[2].parse().map_err(|_| Error::Parse {
                    line: idx + 1,
                    msg: format!("bad weight `{}`", fields[2]),
                })?
            } else {
                1.0
            };
            max_id = max_id.max(u).max(v);
            any = true;
            edges.push((u, v, w));
        }
        let n = n_directive.max(if any { max_id as usize + 1 } else { 0 });
        Graph::new(n, edges)
    }
}

/// Single-source result with exact distances and smallest-id predecessors.
#[derive(Debug, Clone)]
pub struct DistanceRow {
    pub source: u32,
    pub dist: Vec<f64>,
    pub parent: Vec<Option<u32>>,
}

/// Canonical shortest-path tree; see [`Graph::canonical_tree`].
#[derive(Debug, Clone)]
pub struct CanonicalTree {
    pub source: u32,
    pub dist: Vec<f64>,
    pub parent: Vec<Option<u32>>,
}

impl CanonicalTree {
    /// Vertices of the canonical path source..=v, or `None` if unreachable.
    pub fn path_vertices(&self, v: u32) -> Option<Vec<u32>> {
        if self.dist[v as usize] == INF {
            return None;
        }
        let mut path = vec![v];
        let mut cur = v;
        while cur != self.source {
            cur = self.parent[cur as usize]?;
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }
}

/// A base graph plus weighted auxiliary edges (a hopset laid over the graph).
/// Parallel pairs are fine; relaxation takes the minimum per hop.
pub struct AugmentedGraph<'a> {
    pub base: &'a Graph,
    pub extra: Vec<(u32, u32, f64)>,
    adj: Vec<Vec<(u32, f64)>>,
}

impl<'a> AugmentedGraph<'a> {
    pub fn new(base: &'a Graph, extra: Vec<(u32, u32, f64)>) -> Result<AugmentedGraph<'a>> {
        let mut adj = base.adj.clone();
        for &(u, v, w) in &extra {
            if u as usize >= base.n || v as usize >= base.n {
                return Err(Error::invalid(format!(
                    "extra edge ({u},{v}) out of range for n={}",
                    base.n
                )));
            }
            if u == v {
                continue;
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::invalid(format!(
                    "extra edge ({u},{v}) has bad weight {w}"
                )));
            }
            adj[u as usize].push((v, w));
            adj[v as usize].push((u, w));
        }
        Ok(AugmentedGraph { base, extra, adj })
    }

    pub fn n(&self) -> usize {
        self.base.n
    }

    /// Combined neighbor list (base and extra edges).
    pub fn adjacency(&self, u: u32) -> &[(u32, f64)] {
        &self.adj[u as usize]
    }

    pub fn dijkstra(&self, source: u32) -> Result<DistanceRow> {
        if source as usize >= self.base.n {
            return Err(Error::invalid(format!("vertex {source} out of range")));
        }
        let (dist, parent) = dijkstra_adj(&self.adj, source);
        Ok(DistanceRow {
            source,
            dist,
            parent,
        })
    }

    /// Exact minimum weight over paths with at most `beta` edges, by `beta`
    /// rounds of synchronous edge relaxation. For `beta >= n-1` this equals
    /// the unrestricted distance.
    pub fn hop_bounded_distance(&self, u: u32, v: u32, beta: u32) -> Result<f64> {
        Ok(self.hop_bounded_row(u, beta)?[v as usize])
    }

    /// Hop-bounded distances from `u` to every vertex.
    pub fn hop_bounded_row(&self, u: u32, beta: u32) -> Result<Vec<f64>> {
        if u as usize >= self.base.n {
            return Err(Error::invalid(format!("vertex {u} out of range")));
        }
        if beta as usize >= self.base.n.saturating_sub(1) {
            // a shortest path with nonnegative weights is simple
            return Ok(self.dijkstra(u)?.dist);
        }
        let mut relaxer = HopRelaxer::new(self, u);
        for _ in 0..beta {
            if !relaxer.step() {
                break;
            }
        }
        Ok(relaxer.into_dist())
    }
}

/// Incremental hop-bounded relaxation: after `k` calls to [`HopRelaxer::step`],
/// `dist()` holds the minimum path weight using at most `k` edges.
pub struct HopRelaxer<'a, 'g> {
    ag: &'a AugmentedGraph<'g>,
    dist: Vec<f64>,
    scratch: Vec<f64>,
}

impl<'a, 'g> HopRelaxer<'a, 'g> {
    pub fn new(ag: &'a AugmentedGraph<'g>, source: u32) -> Self {
        let mut dist = vec![INF; ag.base.n];
        dist[source as usize] = 0.0;
        HopRelaxer {
            ag,
            scratch: dist.clone(),
            dist,
        }
    }

    /// One synchronous relaxation round; returns false once a fixpoint is
    /// reached (further rounds cannot change anything).
    pub fn step(&mut self) -> bool {
        let mut changed = false;
        self.scratch.copy_from_slice(&self.dist);
        for (u, nbrs) in self.ag.adj.iter().enumerate() {
            let du = self.dist[u];
            if du == INF {
                continue;
            }
            for &(v, w) in nbrs {
                let nd = du + w;
                if nd < self.scratch[v as usize] {
                    self.scratch[v as usize] = nd;
                    changed = true;
                }
            }
        }
        std::mem::swap(&mut self.dist, &mut self.scratch);
        changed
    }

    pub fn dist(&self) -> &[f64] {
        &self.dist
    }

    pub fn into_dist(self) -> Vec<f64> {
        self.dist
    }
}

fn dijkstra_adj(adj: &[Vec<(u32, f64)>], source: u32) -> (Vec<f64>, Vec<Option<u32>>) {
    let n = adj.len();
    let mut dist = vec![INF; n];
    let mut parent: Vec<Option<u32>> = vec![None; n];
    let mut heap = BinaryHeap::new();
    dist[source as usize] = 0.0;
    heap.push(MinItem {
        dist: 0.0,
        v: source,
    });
    while let Some(MinItem { dist: d, v }) = heap.pop() {
        let vu = v as usize;
        if d > dist[vu] {
            continue;
        }
        for &(nb, w) in &adj[vu] {
            let nbu = nb as usize;
            let nd = d + w;
            if nd < dist[nbu] {
                dist[nbu] = nd;
                parent[nbu] = Some(v);
                heap.push(MinItem { dist: nd, v: nb });
            } else if nd == dist[nbu] {
                match parent[nbu] {
                    Some(p) if p <= v => {}
                    _ if nbu == source as usize => {}
                    _ => parent[nbu] = Some(v),
                }
            }
        }
    }
    (dist, parent)
}

struct MinItem {
    dist: f64,
    v: u32,
}

impl PartialEq for MinItem {
    fn eq(&self, other: &Self) -> bool {
        self.dist == other.dist && self.v == other.v
    }
}
impl Eq for MinItem {}
impl PartialOrd for MinItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for MinItem {
    // reversed so BinaryHeap pops the minimum
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap()
            .then_with(|| other.v.cmp(&self.v))
    }
}

struct CanonItem {
    dist: f64,
    key: u128,
    v: u32,
}

impl PartialEq for CanonItem {
    fn eq(&self, other: &Self) -> bool {
        self.dist == other.dist && self.key == other.key && self.v == other.v
    }
}
impl Eq for CanonItem {}
impl PartialOrd for CanonItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for CanonItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap()
            .then_with(|| other.key.cmp(&self.key))
            .then_with(|| other.v.cmp(&self.v))
    }
}

/// All-pairs distance rows, one Dijkstra per source.
pub fn all_pairs(g: &Graph) -> Vec<Vec<f64>> {
    use rayon::prelude::*;
    (0..g.n() as u32)
        .into_par_iter()
        .map(|s| g.dijkstra(s).expect("valid source").dist)
        .collect()
}

/// Distance rows keyed by the requested sources.
pub fn rows_for(g: &Graph, sources: &[u32]) -> HashMap<u32, Vec<f64>> {
    use rayon::prelude::*;
    sources
        .par_iter()
        .map(|&s| (s, g.dijkstra(s).expect("valid source").dist))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn path_graph(n: usize) -> Graph {
        Graph::unweighted(n, (0..n as u32 - 1).map(|i| (i, i + 1)).collect()).unwrap()
    }

    fn random_weighted(n: usize, m: usize, seed: u64) -> Graph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen = std::collections::HashSet::new();
        let mut edges = Vec::new();
        while edges.len() < m {
            let u = rng.gen_range(0..n as u32);
            let v = rng.gen_range(0..n as u32);
            if u == v {
                continue;
            }
            if seen.insert((u.min(v), u.max(v))) {
                edges.push((u, v, rng.gen_range(1..=10) as f64));
            }
        }
        Graph::new(n, edges).unwrap()
    }

    /// Independent oracle: textbook Bellman-Ford over the full edge list.
    fn bellman_ford(g: &Graph, source: u32) -> Vec<f64> {
        let mut dist = vec![INF; g.n()];
        dist[source as usize] = 0.0;
        for _ in 0..g.n() {
            let mut changed = false;
            for e in g.edges() {
                for (a, b) in [(e.u, e.v), (e.v, e.u)] {
                    if dist[a as usize] + e.w < dist[b as usize] {
                        dist[b as usize] = dist[a as usize] + e.w;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        dist
    }

    /// Independent oracle: enumerate all walks with at most `beta` edges.
    fn enumerate_hop_bounded(adj: &[Vec<(u32, f64)>], u: u32, v: u32, beta: u32) -> f64 {
        fn go(adj: &[Vec<(u32, f64)>], cur: u32, v: u32, left: u32, acc: f64, best: &mut f64) {
            if cur == v {
                *best = best.min(acc);
            }
            if left == 0 {
                return;
            }
            for &(nb, w) in &adj[cur as usize] {
                if acc + w < *best {
                    go(adj, nb, v, left - 1, acc + w, best);
                }
            }
        }
        let mut best = INF;
        go(adj, u, v, beta, 0.0, &mut best);
        best
    }

    #[test]
    fn dijkstra_on_path_graph() {
        let g = path_graph(3);
        let row = g.dijkstra(0).unwrap();
        assert_eq!(row.dist, vec![0.0, 1.0, 2.0]);
    }

    #[test]
    fn dijkstra_source_distance_zero() {
        let g = random_weighted(30, 70, 5);
        for s in [0u32, 7, 29] {
            assert_eq!(g.dijkstra(s).unwrap().dist[s as usize], 0.0);
        }
    }

    #[test]
    fn dijkstra_invalid_source_errors() {
        let g = path_graph(3);
        assert!(g.dijkstra(3).is_err());
    }

    #[test]
    fn dijkstra_matches_bellman_ford() {
        let g = random_weighted(50, 160, 42);
        for s in 0..50u32 {
            let row = g.dijkstra(s).unwrap();
            assert_eq!(row.dist, bellman_ford(&g, s), "source {s}");
        }
    }

    #[test]
    fn dijkstra_triangle_consistency_and_parent_ties() {
        let g = random_weighted(40, 120, 9);
        for s in 0..40u32 {
            let row = g.dijkstra(s).unwrap();
            for e in g.edges() {
                if row.dist[e.u as usize] < INF {
                    assert!(row.dist[e.v as usize] <= row.dist[e.u as usize] + e.w);
                }
            }
            // parent is the smallest-id predecessor among the eligible ones
            for v in 0..40u32 {
                if v == s || row.dist[v as usize] == INF {
                    continue;
                }
                let best = g
                    .neighbors(v)
                    .iter()
                    .filter(|&&(p, w)| row.dist[p as usize] + w == row.dist[v as usize])
                    .map(|&(p, _)| p)
                    .min();
                assert_eq!(row.parent[v as usize], best, "vertex {v} from {s}");
            }
        }
    }

    #[test]
    fn multi_source_single_source_case() {
        let g = random_weighted(30, 80, 3);
        let (dist, nearest) = g.multi_source_dijkstra(&[4]).unwrap();
        let row = g.dijkstra(4).unwrap();
        assert_eq!(dist, row.dist);
        for v in 0..30usize {
            if dist[v] < INF {
                assert_eq!(nearest[v], Some(4));
            }
        }
    }

    #[test]
    fn multi_source_all_vertices() {
        let g = random_weighted(20, 50, 11);
        let sources: Vec<u32> = (0..20).collect();
        let (dist, nearest) = g.multi_source_dijkstra(&sources).unwrap();
        for v in 0..20usize {
            assert_eq!(dist[v], 0.0);
            assert_eq!(nearest[v], Some(v as u32));
        }
    }

    #[test]
    fn multi_source_matches_min_of_singles() {
        let g = random_weighted(30, 80, 17);
        let sources = [3u32, 12, 25];
        let (dist, nearest) = g.multi_source_dijkstra(&sources).unwrap();
        let rows: Vec<_> = sources.iter().map(|&s| g.dijkstra(s).unwrap().dist).collect();
        for v in 0..30usize {
            let mut best = INF;
            for row in &rows {
                best = best.min(row[v]);
            }
            assert_eq!(dist[v], best);
            if best < INF {
                // nearest must be the smallest source achieving the min
                let min_src = sources
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| rows[*i][v] == best)
                    .map(|(_, &s)| s)
                    .min();
                assert_eq!(nearest[v], min_src);
            } else {
                assert_eq!(nearest[v], None);
            }
        }
    }

    #[test]
    fn multi_source_empty_errors() {
        let g = path_graph(3);
        assert!(g.multi_source_dijkstra(&[]).is_err());
    }

    #[test]
    fn hop_bounded_trivial_cases() {
        let g = path_graph(3);
        let ag = AugmentedGraph::new(&g, vec![]).unwrap();
        assert_eq!(ag.hop_bounded_distance(1, 1, 0).unwrap(), 0.0);
        assert_eq!(ag.hop_bounded_distance(0, 2, 1).unwrap(), INF);
        assert_eq!(ag.hop_bounded_distance(0, 2, 2).unwrap(), 2.0);
    }

    #[test]
    fn hop_bounded_matches_enumeration_with_extras() {
        let g = random_weighted(40, 90, 23);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let mut extra = Vec::new();
        let rows = all_pairs(&g);
        while extra.len() < 12 {
            let u = rng.gen_range(0..40u32);
            let v = rng.gen_range(0..40u32);
            if u != v && rows[u as usize][v as usize] < INF {
                extra.push((u, v, rows[u as usize][v as usize]));
            }
        }
        let ag = AugmentedGraph::new(&g, extra).unwrap();
        for u in (0..40u32).step_by(7) {
            for v in (0..40u32).step_by(5) {
                let got = ag.hop_bounded_distance(u, v, 3).unwrap();
                let want = enumerate_hop_bounded(&ag.adj, u, v, 3);
                assert_eq!(got, want, "pair ({u},{v})");
                // distance-weighted extras never shorten true distances
                assert!(got >= rows[u as usize][v as usize]);
            }
        }
    }

    #[test]
    fn hop_bounded_monotone_and_converges_to_dijkstra() {
        let g = random_weighted(25, 60, 31);
        let ag = AugmentedGraph::new(&g, vec![]).unwrap();
        for u in 0..25u32 {
            let exact = g.dijkstra(u).unwrap().dist;
            let mut prev = ag.hop_bounded_row(u, 1).unwrap();
            for beta in 2..=6u32 {
                let cur = ag.hop_bounded_row(u, beta).unwrap();
                for v in 0..25usize {
                    assert!(cur[v] <= prev[v]);
                    assert!(cur[v] >= exact[v]);
                }
                prev = cur;
            }
            assert_eq!(ag.hop_bounded_row(u, 24).unwrap(), exact);
        }
    }

    #[test]
    fn shortest_path_edges_basics() {
        let g = random_weighted(30, 80, 2);
        assert_eq!(g.shortest_path_edges(5, 5).unwrap(), Some(vec![]));
        // adjacent pair whose direct edge is a shortest path
        let e = g.edges()[0];
        let d = g.dijkstra(e.u).unwrap().dist[e.v as usize];
        if d == e.w {
            let path = g.shortest_path_edges(e.u, e.v).unwrap().unwrap();
            let len: f64 = path
                .iter()
                .map(|&(a, b)| g.has_edge(a, b).unwrap())
                .sum();
            assert_eq!(len, e.w);
        }
    }

    #[test]
    fn shortest_path_length_matches_bfs_oracle() {
        // unweighted: canonical path length must equal BFS level
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut pairs = std::collections::HashSet::new();
        while pairs.len() < 60 {
            let u = rng.gen_range(0..30u32);
            let v = rng.gen_range(0..30u32);
            if u != v {
                pairs.insert((u.min(v), u.max(v)));
            }
        }
        let g = Graph::unweighted(30, pairs.into_iter().collect()).unwrap();
        let bfs = |s: u32| -> Vec<f64> {
            let mut dist = vec![INF; 30];
            let mut q = std::collections::VecDeque::new();
            dist[s as usize] = 0.0;
            q.push_back(s);
            while let Some(x) = q.pop_front() {
                for &(nb, _) in g.neighbors(x) {
                    if dist[nb as usize] == INF {
                        dist[nb as usize] = dist[x as usize] + 1.0;
                        q.push_back(nb);
                    }
                }
            }
            dist
        };
        for u in 0..30u32 {
            let want = bfs(u);
            for v in 0..30u32 {
                match g.shortest_path_edges(u, v).unwrap() {
                    Some(path) => assert_eq!(path.len() as f64, want[v as usize]),
                    None => assert_eq!(want[v as usize], INF),
                }
            }
        }
    }

    #[test]
    fn canonical_paths_symmetric_and_subpath_consistent() {
        for seed in 0..6u64 {
            let g = random_weighted(35, 100, 1000 + seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..25 {
                let u = rng.gen_range(0..35u32);
                let v = rng.gen_range(0..35u32);
                let Some(p_uv) = g
                    .canonical_tree(u)
                    .unwrap()
                    .path_vertices(v)
                else {
                    continue;
                };
                // symmetry
                let p_vu = g.canonical_tree(v).unwrap().path_vertices(u).unwrap();
                let mut rev = p_vu.clone();
                rev.reverse();
                assert_eq!(p_uv, rev, "asymmetric canonical path {u}->{v}");
                // subpath consistency against two random path vertices
                if p_uv.len() >= 2 {
                    let i = rng.gen_range(0..p_uv.len());
                    let j = rng.gen_range(0..p_uv.len());
                    let (i, j) = (i.min(j), i.max(j));
                    let sub = g
                        .canonical_tree(p_uv[i])
                        .unwrap()
                        .path_vertices(p_uv[j])
                        .unwrap();
                    assert_eq!(sub.as_slice(), &p_uv[i..=j], "subpath {u}->{v} [{i},{j}]");
                }
            }
        }
    }

    #[test]
    fn bounded_canonical_tree_settles_exactly_below_bound() {
        let g = random_weighted(40, 110, 4);
        let full = g.canonical_tree(3).unwrap();
        let bound = 7.0;
        let trunc = g.canonical_tree_bounded(3, bound).unwrap();
        for v in 0..40usize {
            if full.dist[v] < bound {
                assert_eq!(trunc.dist[v], full.dist[v]);
            } else {
                assert_eq!(trunc.dist[v], INF);
            }
        }
    }

    #[test]
    fn edge_list_round_trip() {
        let g = random_weighted(20, 40, 8);
        let text = g.to_edge_list_string();
        let h = Graph::from_edge_list_str(&text).unwrap();
        assert_eq!(g.n(), h.n());
        assert_eq!(g.edges().len(), h.edges().len());
        for (a, b) in g.edges().iter().zip(h.edges()) {
            assert_eq!((a.u, a.v, a.w), (b.u, b.v, b.w));
        }
    }

    #[test]
    fn graph_rejects_bad_edges() {
        assert!(Graph::new(3, vec![(0, 0, 1.0)]).is_err());
        assert!(Graph::new(3, vec![(0, 1, 1.0), (1, 0, 2.0)]).is_err());
        assert!(Graph::new(3, vec![(0, 5, 1.0)]).is_err());
        assert!(Graph::new(3, vec![(0, 1, 0.0)]).is_err());
        assert!(Graph::new(3, vec![(0, 1, -2.0)]).is_err());
    }
}
