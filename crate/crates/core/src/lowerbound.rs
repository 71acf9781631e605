//! Lower-bound instances and their checkers: high-girth cage graphs with the
//! path-counting argument, and the layered tower graphs on which the
//! sampling-hierarchy construction needs many hops.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, INF};
use crate::hopset::{build_hopset_with_levels, HopsetBuild, HopsetEdgeSet};
use crate::levels::{forced_levels, sample_levels, LevelAssignment};
use crate::schedule::{
    lower_bound_radii_exact, ratio_to_f64, LevelFunction, ParamSchedule, Rational, Variant,
};
use crate::verify::{measure_min_hopbound, MinHopbound};

/// Exact girth via one BFS per vertex: every non-tree edge scanned during
/// the BFS from `s` closes a walk of length `dist[a] + dist[b] + 1` that
/// contains a cycle no longer than that, and for `s` on a shortest cycle the
/// antipodal edge attains the girth. `None` for acyclic graphs.
pub fn girth(g: &Graph) -> Result<Option<u32>> {
    if !g.is_unit_weighted() {
        return Err(Error::invalid("girth is defined here for unweighted graphs"));
    }
    let n = g.n();
    let mut best = u32::MAX;
    let mut dist = vec![u32::MAX; n];
    let mut parent = vec![u32::MAX; n];
    for s in 0..n as u32 {
        dist.iter_mut().for_each(|d| *d = u32::MAX);
        parent.iter_mut().for_each(|p| *p = u32::MAX);
        let mut q = VecDeque::new();
        dist[s as usize] = 0;
        q.push_back(s);
        while let Some(x) = q.pop_front() {
            for &(nb, _) in g.neighbors(x) {
                if dist[nb as usize] == u32::MAX {
                    dist[nb as usize] = dist[x as usize] + 1;
                    parent[nb as usize] = x;
                    q.push_back(nb);
                } else if parent[x as usize] != nb && parent[nb as usize] != x {
                    best = best.min(dist[x as usize] + dist[nb as usize] + 1);
                }
            }
        }
    }
    Ok(if best == u32::MAX { None } else { Some(best) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CageName {
    Petersen,
    Heawood,
    McGee,
    TutteCoxeter,
}

impl CageName {
    pub const ALL: [CageName; 4] = [
        CageName::Petersen,
        CageName::Heawood,
        CageName::McGee,
        CageName::TutteCoxeter,
    ];

    pub fn parse(s: &str) -> Result<CageName> {
        match s.to_ascii_lowercase().as_str() {
            "petersen" => Ok(CageName::Petersen),
            "heawood" => Ok(CageName::Heawood),
            "mcgee" => Ok(CageName::McGee),
            "tutte-coxeter" | "tuttecoxeter" | "levi" => Ok(CageName::TutteCoxeter),
            _ => Err(Error::invalid(format!("unknown cage `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CageSpec {
    pub name: CageName,
    pub degree: usize,
    pub girth: u32,
    pub n: usize,
    pub m: usize,
}

/// Declared degree/girth data; tests recompute both from the edge lists.
pub fn cage_spec(name: CageName) -> CageSpec {
    let (degree, girth, n) = match name {
        CageName::Petersen => (3, 5, 10),
        CageName::Heawood => (3, 6, 14),
        CageName::McGee => (3, 7, 24),
        CageName::TutteCoxeter => (3, 8, 30),
    };
    CageSpec {
        name,
        degree,
        girth,
        n,
        m: n * degree / 2,
    }
}

/// Hamiltonian-cycle-plus-chords expansion (LCF notation).
fn lcf(n: usize, pattern: &[i64]) -> Graph {
    let mut edges: HashSet<(u32, u32)> = HashSet::new();
    for i in 0..n {
        let j = (i + 1) % n;
        edges.insert((i.min(j) as u32, i.max(j) as u32));
        let off = pattern[i % pattern.len()];
        let k = ((i as i64 + off).rem_euclid(n as i64)) as usize;
        edges.insert((i.min(k) as u32, i.max(k) as u32));
    }
    let mut list: Vec<(u32, u32)> = edges.into_iter().collect();
    list.sort_unstable();
    Graph::unweighted(n, list).expect("embedded cage data is valid")
}

pub fn cage(name: CageName) -> Graph {
    match name {
        CageName::Petersen => {
            let mut edges = Vec::new();
            for i in 0..5u32 {
                edges.push((i, (i + 1) % 5));
                edges.push((i, i + 5));
                edges.push((5 + i, 5 + (i + 2) % 5));
            }
            let mut edges: Vec<(u32, u32)> =
                edges.into_iter().map(|(u, v)| (u.min(v), u.max(v))).collect();
            edges.sort_unstable();
            edges.dedup();
            Graph::unweighted(10, edges).expect("embedded cage data is valid")
        }
        CageName::Heawood => lcf(14, &[5, -5]),
        CageName::McGee => lcf(24, &[12, 7, -7]),
        CageName::TutteCoxeter => lcf(30, &[-13, -9, 7, -7, 9, 13]),
    }
}

/// Number of unordered pairs at distance exactly `delta` (one BFS per
/// source). On a regular graph whose girth exceeds `(alpha+1) delta` each
/// such pair has a unique shortest path, so this also counts those paths.
pub fn count_delta_paths(g: &Graph, delta: u32) -> Result<usize> {
    if !g.is_unit_weighted() {
        return Err(Error::invalid("path counting is defined for unweighted graphs"));
    }
    if delta < 1 {
        return Err(Error::invalid("delta must be >= 1"));
    }
    let mut count = 0usize;
    for u in 0..g.n() as u32 {
        let dist = bfs(g, u);
        count += ((u + 1)..g.n() as u32)
            .filter(|&v| dist[v as usize] == delta as u64)
            .count();
    }
    Ok(count)
}

fn bfs(g: &Graph, s: u32) -> Vec<u64> {
    let mut dist = vec![u64::MAX; g.n()];
    let mut q = VecDeque::new();
    dist[s as usize] = 0;
    q.push_back(s);
    while let Some(x) = q.pop_front() {
        for &(nb, _) in g.neighbors(x) {
            if dist[nb as usize] == u64::MAX {
                dist[nb as usize] = dist[x as usize] + 1;
                q.push_back(nb);
            }
        }
    }
    dist
}

/// The counting bound `n p / (2 alpha delta^2)`: any hopset with stretch
/// `alpha` and hopbound below `delta` on an `n`-vertex `(p+1)`-regular graph
/// of girth above `(alpha+1) delta` needs at least this many edges.
pub fn girth_bound_evaluate(n: usize, p: usize, delta: u32, alpha: f64) -> Result<f64> {
    if n == 0 || p == 0 || delta == 0 || alpha <= 0.0 {
        return Err(Error::invalid("all counting-bound parameters must be positive"));
    }
    Ok(n as f64 * p as f64 / (2.0 * alpha * (delta as f64) * (delta as f64)))
}

/// The hopbound floor `floor((k-2) / (alpha+1))` implied by the counting
/// bound for hopsets of size O(n^{1+1/k}).
pub fn hopbound_floor(k: u32, alpha: u32) -> u32 {
    k.saturating_sub(2) / (alpha + 1)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UsageReport {
    pub delta: u32,
    pub beta: u32,
    pub pairs_at_delta: usize,
    /// Pairs whose beta-hop path meets the stretch-alpha weight budget.
    pub pairs_with_beta_path: usize,
    /// Among those, pairs where no used hopset edge's detour shares an edge
    /// with the pair's shortest path (the theorem says this never happens).
    pub witness_failures: usize,
    /// Per hopset edge (weight within alpha*delta): how many distance-delta
    /// pairs' shortest paths share an edge with its detour.
    pub per_edge_usage: Vec<((u32, u32), usize)>,
    pub max_usage: usize,
    pub usage_bound: f64,
    pub ok: bool,
}

/// Check the two counting properties behind the girth lower bound on a
/// high-girth regular graph carrying an arbitrary hopset.
pub fn hopset_path_usage_check(
    g: &Graph,
    h: &HopsetEdgeSet,
    alpha: f64,
    beta: u32,
    delta: u32,
) -> Result<UsageReport> {
    if g.n() == 0 || !g.is_unit_weighted() {
        return Err(Error::invalid("usage check needs a nonempty unweighted graph"));
    }
    if beta >= delta {
        return Err(Error::invalid("usage check needs beta < delta"));
    }
    let girth = girth(g)?.unwrap_or(u32::MAX);
    if girth as f64 <= (alpha + 1.0) * delta as f64 {
        return Err(Error::invalid(format!(
            "girth {girth} must exceed (alpha+1) * delta = {}",
            (alpha + 1.0) * delta as f64
        )));
    }
    let degree = g.neighbors(0).len();
    if (0..g.n() as u32).any(|u| g.neighbors(u).len() != degree) {
        return Err(Error::invalid("usage check needs a regular graph"));
    }
    let p = degree.saturating_sub(1);

    // canonical shortest-path edge sets for pairs and detours
    let path_edges = |a: u32, b: u32| -> Result<HashSet<(u32, u32)>> {
        Ok(g.shortest_path_edges(a, b)?
            .map(|es| {
                es.into_iter()
                    .map(|(x, y)| (x.min(y), x.max(y)))
                    .collect::<HashSet<_>>()
            })
            .unwrap_or_default())
    };
    let budget = alpha * delta as f64;
    let mut detours: HashMap<(u32, u32), HashSet<(u32, u32)>> = HashMap::new();
    for e in &h.edges {
        if e.w <= budget + 1e-9 {
            detours.insert((e.x, e.y), path_edges(e.x, e.y)?);
        }
    }

    let ag = crate::graph::AugmentedGraph::new(g, h.weighted_edges())?;
    let hop_edges: HashMap<(u32, u32), f64> = h.edges.iter().map(|e| ((e.x, e.y), e.w)).collect();

    let mut pairs_at_delta = 0usize;
    let mut pairs_with_beta_path = 0usize;
    let mut witness_failures = 0usize;
    let mut usage: HashMap<(u32, u32), usize> = detours.keys().map(|&k| (k, 0)).collect();

    for u in 0..g.n() as u32 {
        let dist = bfs(g, u);
        for v in (u + 1)..g.n() as u32 {
            if dist[v as usize] != delta as u64 {
                continue;
            }
            pairs_at_delta += 1;
            let p_uv = path_edges(u, v)?;
            for (key, detour) in &detours {
                if !detour.is_disjoint(&p_uv) {
                    *usage.get_mut(key).unwrap() += 1;
                }
            }
            let Some(hop_path) = hop_bounded_path(&ag, u, v, beta) else {
                continue;
            };
            let weight: f64 = hop_path.iter().map(|&(_, _, w)| w).sum();
            if weight > budget + 1e-9 {
                continue;
            }
            pairs_with_beta_path += 1;
            let mut witnessed = false;
            for &(a, b, w) in &hop_path {
                if g.has_edge(a, b) == Some(w) {
                    continue;
                }
                let key = (a.min(b), a.max(b));
                debug_assert!(hop_edges.contains_key(&key));
                if let Some(detour) = detours.get(&key) {
                    if !detour.is_disjoint(&p_uv) {
                        witnessed = true;
                        break;
                    }
                }
            }
            if !witnessed {
                witness_failures += 1;
            }
        }
    }

    let usage_bound = alpha * (delta as f64) * (delta as f64) * (p as f64).powi(delta as i32 - 1);
    let mut per_edge_usage: Vec<((u32, u32), usize)> = usage.into_iter().collect();
    per_edge_usage.sort_unstable();
    let max_usage = per_edge_usage.iter().map(|&(_, c)| c).max().unwrap_or(0);
    Ok(UsageReport {
        delta,
        beta,
        pairs_at_delta,
        pairs_with_beta_path,
        witness_failures,
        per_edge_usage,
        max_usage,
        usage_bound,
        ok: witness_failures == 0 && (max_usage as f64) <= usage_bound,
    })
}

/// One minimum-weight walk with at most `beta` edges, as (from, to, weight)
/// hops, reconstructed from the hop-bounded relaxation table. `None` if `v`
/// is not reachable within the budget.
fn hop_bounded_path(
    ag: &crate::graph::AugmentedGraph,
    u: u32,
    v: u32,
    beta: u32,
) -> Option<Vec<(u32, u32, f64)>> {
    let n = ag.n();
    let rounds = beta as usize;
    let mut dist = vec![vec![INF; n]; rounds + 1];
    let mut pred: Vec<Vec<Option<(u32, f64)>>> = vec![vec![None; n]; rounds + 1];
    dist[0][u as usize] = 0.0;
    for r in 1..=rounds {
        for x in 0..n {
            dist[r][x] = dist[r - 1][x];
            pred[r][x] = None;
        }
        for x in 0..n as u32 {
            let dx = dist[r - 1][x as usize];
            if dx == INF {
                continue;
            }
            for &(nb, w) in ag.adjacency(x) {
                if dx + w < dist[r][nb as usize] {
                    dist[r][nb as usize] = dx + w;
                    pred[r][nb as usize] = Some((x, w));
                }
            }
        }
    }
    if dist[rounds][v as usize] == INF {
        return None;
    }
    let mut hops = Vec::new();
    let mut r = rounds;
    let mut cur = v;
    while cur != u || dist[r][cur as usize] != 0.0 {
        match pred[r][cur as usize] {
            Some((p, w)) => {
                hops.push((p, cur, w));
                cur = p;
                r -= 1;
            }
            None => {
                debug_assert!(r > 0 && dist[r][cur as usize] == dist[r - 1][cur as usize]);
                r -= 1;
            }
        }
        if r == 0 {
            break;
        }
    }
    debug_assert_eq!(cur, u);
    hops.reverse();
    Some(hops)
}

// ---- tower graphs ----

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TowerConfig {
    pub k: u32,
    pub f: LevelFunction,
    pub alpha: u32,
    /// n = 2^{2 k a}; `a >= 1`.
    pub a: u32,
    /// Replaces the log2(n) layer multiplier (desk-scale override).
    pub layer_mult: Option<u64>,
    /// Replaces the tower count n^{1/(2k)} (desk-scale override).
    pub towers: Option<usize>,
    /// Replaces the completing top-layer size (desk-scale override).
    pub top_layer: Option<usize>,
}

impl TowerConfig {
    pub fn n(&self) -> u128 {
        let bits = 2u64 * self.k as u64 * self.a as u64;
        assert!(bits < 128, "n = 2^{bits} overflows u128");
        1u128 << bits
    }

    pub fn is_non_asymptotic(&self) -> bool {
        self.layer_mult.is_some() || self.towers.is_some() || self.top_layer.is_some()
    }
}

#[derive(Debug, Clone)]
pub struct TowerGraph {
    pub graph: Graph,
    pub config: TowerConfig,
    /// Hopset schedule at t = 4 alpha (the radii recurrence the layers use).
    pub schedule: ParamSchedule,
    pub towers: usize,
    /// Layer count per tower (= F).
    pub layers: usize,
    pub layer_sizes: Vec<usize>,
    /// members[tower][layer] -> vertex ids, ascending.
    pub members: Vec<Vec<Vec<u32>>>,
    /// vertex -> (tower, layer).
    pub place: Vec<(u32, u32)>,
    /// All edge weights are scaled by this factor so they are exact integers.
    pub scale: i128,
    /// r_i * scale, exact.
    pub scaled_radii: Vec<i128>,
    pub non_asymptotic: bool,
}

/// JSON sidecar written next to generated tower graphs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TowerSidecar {
    pub config: TowerConfig,
    pub schedule: ParamSchedule,
    pub towers: usize,
    pub layers: usize,
    pub layer_sizes: Vec<usize>,
    pub scale: String,
    pub scaled_radii: Vec<String>,
    pub non_asymptotic: bool,
    pub layer_map: Vec<Vec<(u32, u32)>>,
}

impl TowerGraph {
    pub fn sidecar(&self) -> TowerSidecar {
        TowerSidecar {
            config: self.config.clone(),
            schedule: self.schedule.clone(),
            towers: self.towers,
            layers: self.layers,
            layer_sizes: self.layer_sizes.clone(),
            scale: self.scale.to_string(),
            scaled_radii: self.scaled_radii.iter().map(|r| r.to_string()).collect(),
            non_asymptotic: self.non_asymptotic,
            layer_map: self
                .members
                .iter()
                .map(|tower| {
                    tower
                        .iter()
                        .map(|layer| (layer[0], *layer.last().unwrap()))
                        .collect()
                })
                .collect(),
        }
    }

    /// The scaled cross-tower distance the construction promises:
    /// scale * (r_i + |d-c| + r_j - 2) for x in layer i of tower c and y in
    /// layer j of tower d != c.
    pub fn cross_tower_distance(&self, x: u32, y: u32) -> Option<i128> {
        let (c, i) = self.place[x as usize];
        let (d, j) = self.place[y as usize];
        if c == d {
            return None;
        }
        let gap = (c as i128 - d as i128).abs();
        Some(self.scaled_radii[i as usize] + self.scaled_radii[j as usize] - 2 * self.scale
            + gap * self.scale)
    }
}

pub fn build_tower_graph(config: TowerConfig) -> Result<TowerGraph> {
    if config.a < 1 {
        return Err(Error::invalid("tower exponent a must be >= 1"));
    }
    if config.alpha < 1 {
        return Err(Error::invalid("alpha must be >= 1"));
    }
    let sched = ParamSchedule::new(
        config.k,
        config.f.clone(),
        4.0 * config.alpha as f64,
        Variant::Hopset,
    )?;
    let levels = sched.levels;
    let radii = lower_bound_radii_exact(&config.f, config.alpha, levels)?;
    let scale = radii
        .iter()
        .fold(1i128, |acc, r| lcm_i128(acc, *r.denom()));
    let scaled_radii: Vec<i128> = radii
        .iter()
        .map(|r| (Rational::from_integer(scale) * r).to_integer())
        .collect();

    let log2n = (2 * config.k as u64) * config.a as u64;
    if log2n > 100 {
        return Err(Error::Infeasible(format!(
            "n = 2^{log2n} is far beyond desk scale"
        )));
    }
    let mult = config.layer_mult.unwrap_or(log2n);
    // middle layer i (0 < i < F-1) holds mult * n^{(1/k) sum_{l<i} lambda_l}
    // vertices; the exponent is an exact power of two for n = 2^{2ka}
    let mut layer_sizes: Vec<u128> = vec![1];
    let mut lambda_prefix: i128 = 0;
    for i in 1..levels {
        lambda_prefix += self_int(&sched.lambdas[i - 1])?;
        if i == levels - 1 {
            break;
        }
        let bits = 2 * config.a as i128 * lambda_prefix;
        if bits > 80 {
            return Err(Error::Infeasible(format!(
                "layer {i} would need 2^{bits} vertices; use desk-scale overrides"
            )));
        }
        let size = (mult as u128)
            .checked_mul(1u128 << bits)
            .ok_or_else(|| Error::Infeasible(format!("layer {i} size overflows")))?;
        layer_sizes.push(size);
    }
    let middle_total: u128 = layer_sizes.iter().sum();
    let per_tower_target = 1u128 << (log2n - config.a as u64); // n^{1 - 1/(2k)}
    let top = match config.top_layer {
        Some(t) => {
            if t == 0 {
                return Err(Error::invalid("top layer override must be >= 1"));
            }
            t as u128
        }
        None => {
            if levels >= 2 && middle_total >= per_tower_target {
                return Err(Error::Infeasible(format!(
                    "middle layers hold {middle_total} vertices but a tower holds only \
                     {per_tower_target}; the construction needs \
                     (F-1) * log2(n) * n^(1-1/k) < n^(1-1/(2k))"
                )));
            }
            per_tower_target - middle_total
        }
    };
    layer_sizes.push(top);
    let towers = config.towers.unwrap_or(1usize << config.a);
    if towers < 1 {
        return Err(Error::invalid("need at least one tower"));
    }
    let per_tower: u128 = layer_sizes.iter().sum();
    let total = per_tower * towers as u128;
    if total > 2_000_000 {
        return Err(Error::Infeasible(format!(
            "tower graph would have {total} vertices; use desk-scale overrides"
        )));
    }
    let layer_sizes: Vec<usize> = layer_sizes.iter().map(|&s| s as usize).collect();

    let n = total as usize;
    let mut members: Vec<Vec<Vec<u32>>> = Vec::with_capacity(towers);
    let mut place = vec![(0u32, 0u32); n];
    let mut next_id = 0u32;
    for c in 0..towers {
        let mut tower = Vec::with_capacity(levels);
        for (i, &size) in layer_sizes.iter().enumerate() {
            let ids: Vec<u32> = (next_id..next_id + size as u32).collect();
            for &id in &ids {
                place[id as usize] = (c as u32, i as u32);
            }
            next_id += size as u32;
            tower.push(ids);
        }
        members.push(tower);
    }

    let mut edges: Vec<(u32, u32, f64)> = Vec::new();
    for tower in &members {
        for i in 0..levels {
            let layer = &tower[i];
            // intra-layer cliques everywhere except the top layer
            if i + 1 < levels {
                for a in 0..layer.len() {
                    for b in (a + 1)..layer.len() {
                        edges.push((layer[a], layer[b], scale as f64));
                    }
                }
                // complete bipartite up to the next layer
                let w = (scaled_radii[i + 1] - scaled_radii[i]) as f64;
                for &x in layer {
                    for &y in &tower[i + 1] {
                        edges.push((x, y, w));
                    }
                }
            }
        }
    }
    for c in 1..towers {
        edges.push((members[c - 1][0][0], members[c][0][0], scale as f64));
    }

    Ok(TowerGraph {
        graph: Graph::new(n, edges)?,
        config: config.clone(),
        schedule: sched,
        towers,
        layers: levels,
        layer_sizes,
        members,
        place,
        scale,
        scaled_radii,
        non_asymptotic: config.is_non_asymptotic(),
    })
}

fn self_int(r: &Rational) -> Result<i128> {
    if !r.is_integer() {
        return Err(Error::Inconsistent("hopset lambdas must be integers".into()));
    }
    Ok(r.to_integer())
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    if b == 0 {
        a.abs()
    } else {
        gcd_i128(b, a % b)
    }
}

fn lcm_i128(a: i128, b: i128) -> i128 {
    a / gcd_i128(a, b) * b
}

/// The ideal level placement for the structural lemmas: the first vertex of
/// each layer `j` gets level exactly `j` (the top layer gets `F-1`),
/// everyone else gets level 0.
pub fn forced_assignment(tg: &TowerGraph) -> LevelAssignment {
    let mut table = vec![0u32; tg.graph.n()];
    for tower in &tg.members {
        for (j, layer) in tower.iter().enumerate() {
            table[layer[0] as usize] = (j as u32).min(tg.layers as u32 - 1);
        }
    }
    forced_levels(&tg.schedule, table).expect("forced levels within depth")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlacementReport {
    /// indicator per (tower, layer j < F-1): layer j holds a level-j vertex
    /// and nothing above level j.
    pub per_layer: Vec<Vec<bool>>,
    pub all_hold: bool,
}

pub fn check_level_placement(tg: &TowerGraph, la: &LevelAssignment) -> PlacementReport {
    let mut per_layer = Vec::with_capacity(tg.towers);
    let mut all_hold = true;
    for tower in &tg.members {
        let mut row = Vec::with_capacity(tg.layers.saturating_sub(1));
        for (j, layer) in tower.iter().enumerate() {
            if j + 1 >= tg.layers {
                break;
            }
            let has_j = layer
                .iter()
                .any(|&v| la.levels[v as usize] as usize >= j);
            let has_above = layer
                .iter()
                .any(|&v| la.levels[v as usize] as usize > j);
            let ok = has_j && !has_above;
            all_hold &= ok;
            row.push(ok);
        }
        per_layer.push(row);
    }
    PlacementReport {
        per_layer,
        all_hold,
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossTowerReport {
    /// Hopset edges between distinct towers with both layers below F-2,
    /// which the weight lemma constrains.
    pub checked: usize,
    pub same_tower: usize,
    pub high_layer: usize,
    /// Edges violating `w > (alpha+1)(|d-c|-2) * scale`.
    pub violations: Vec<(u32, u32, f64, f64)>,
}

pub fn check_cross_tower_edges(tg: &TowerGraph, h: &HopsetEdgeSet) -> Result<CrossTowerReport> {
    if h.n != tg.graph.n() {
        return Err(Error::Inconsistent("hopset/tower size mismatch".into()));
    }
    let mut rep = CrossTowerReport {
        checked: 0,
        same_tower: 0,
        high_layer: 0,
        violations: Vec::new(),
    };
    let alpha = tg.config.alpha as i128;
    for e in &h.edges {
        let (c, i) = tg.place[e.x as usize];
        let (d, j) = tg.place[e.y as usize];
        if c == d {
            rep.same_tower += 1;
            continue;
        }
        let top_layer = i.max(j) as usize;
        if top_layer + 2 >= tg.layers {
            rep.high_layer += 1;
            continue;
        }
        rep.checked += 1;
        let gap = (c as i128 - d as i128).abs();
        let bound = (alpha + 1) * (gap - 2) * tg.scale;
        if (e.w as i128) <= bound {
            rep.violations.push((e.x, e.y, e.w, bound as f64));
        }
    }
    Ok(rep)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TowerExperiment {
    pub alpha: u32,
    pub forced: bool,
    pub seed: Option<u64>,
    pub n: usize,
    pub hopset_size: usize,
    pub placement_all_hold: bool,
    pub cross_checked: usize,
    pub cross_violations: usize,
    pub beta_star: MinHopbound,
    /// (r_{F-2} - 1) / (5 alpha^2), the hopbound floor under ideal placement.
    pub hopbound_floor: f64,
    pub r_fm2: f64,
    /// (1/8) k^{1 + 1/(2 log2 alpha)}, the closed-form floor on r_{F-2}.
    pub closed_form_r_floor: f64,
    pub floor_met: bool,
}

/// Build a tower instance, place levels (ideally or by sampling), build the
/// hopset on it, and measure the minimal hopbound at stretch alpha.
pub fn tower_hopbound_experiment(
    config: &TowerConfig,
    forced: bool,
    seed: u64,
) -> Result<(TowerExperiment, TowerGraph, HopsetBuild)> {
    let tg = build_tower_graph(config.clone())?;
    let la = if forced {
        forced_assignment(&tg)
    } else {
        sample_levels(&tg.graph, &tg.schedule, seed)
    };
    let build = build_hopset_with_levels(&tg.graph, &tg.schedule, &la)?;
    let placement = check_level_placement(&tg, &la);
    let cross = check_cross_tower_edges(&tg, &build.hopset)?;
    let beta_star = measure_min_hopbound(&tg.graph, &build.hopset, config.alpha as f64)?;
    let levels = tg.layers;
    let r_fm2 = if levels >= 2 {
        ratio_to_f64(lower_bound_radii_exact(&config.f, config.alpha, levels)?[levels - 2])
    } else {
        1.0
    };
    let alpha = config.alpha as f64;
    let hopbound_floor = (r_fm2 - 1.0) / (5.0 * alpha * alpha);
    let closed_form_r_floor = closed_form_r_floor(config.k, config.alpha);
    let floor_met = match beta_star {
        MinHopbound::Bounded(b) => b as f64 >= hopbound_floor,
        MinHopbound::UnreachableAtAlpha => true,
    };
    Ok((
        TowerExperiment {
            alpha: config.alpha,
            forced,
            seed: if forced { None } else { Some(seed) },
            n: tg.graph.n(),
            hopset_size: build.hopset.len(),
            placement_all_hold: placement.all_hold,
            cross_checked: cross.checked,
            cross_violations: cross.violations.len(),
            beta_star,
            hopbound_floor,
            r_fm2,
            closed_form_r_floor,
            floor_met,
        },
        tg,
        build,
    ))
}

/// (1/8) k^{1 + 1/(2 log2 alpha)}; valid floor on r_{F-2} for alpha >= 2.
pub fn closed_form_r_floor(k: u32, alpha: u32) -> f64 {
    0.125 * (k as f64).powf(1.0 + 1.0 / (2.0 * (alpha as f64).log2()))
}
