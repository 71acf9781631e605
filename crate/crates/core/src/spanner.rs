//! Spanner construction for unweighted graphs. Two variants:
//!
//! * truncated: canonical paths to all pivots, plus canonical paths to bunch
//!   members at distance at most `r_F` (the radii depend on the target `t`);
//! * half-bunch: canonical paths to pivots and to half-bunch members only,
//!   with one build serving every `t` simultaneously.
//!
//! Pivot paths are emitted per (level, pivot) from that pivot's canonical
//! tree, so the union per level is a forest with at most `n` edges.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, INF};
use crate::levels::{compute_bunch, compute_pivots, sample_levels, LevelAssignment, PivotTable};
use crate::schedule::{ParamSchedule, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpanProvenance {
    PivotPath { level: u32 },
    BunchPath { level: u32 },
    HalfBunchPath { level: u32 },
}

impl fmt::Display for SpanProvenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpanProvenance::PivotPath { level } => write!(f, "pivot-path:{level}"),
            SpanProvenance::BunchPath { level } => write!(f, "bunch-path:{level}"),
            SpanProvenance::HalfBunchPath { level } => write!(f, "half-bunch-path:{level}"),
        }
    }
}

impl std::str::FromStr for SpanProvenance {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (kind, lvl) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("bad provenance tag `{s}`")))?;
        let level: u32 = lvl
            .parse()
            .map_err(|_| Error::invalid(format!("bad provenance level in `{s}`")))?;
        match kind {
            "pivot-path" => Ok(SpanProvenance::PivotPath { level }),
            "bunch-path" => Ok(SpanProvenance::BunchPath { level }),
            "half-bunch-path" => Ok(SpanProvenance::HalfBunchPath { level }),
            _ => Err(Error::invalid(format!("unknown provenance kind `{kind}`"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpannerEdge {
    pub u: u32,
    pub v: u32,
    pub provenance: Vec<SpanProvenance>,
}

#[derive(Debug, Clone)]
pub struct SpannerEdgeSet {
    pub n: usize,
    pub edges: Vec<SpannerEdge>,
    pub schedule: ParamSchedule,
    pub seed: Option<u64>,
}

impl SpannerEdgeSet {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// The spanner as its own unit-weight graph.
    pub fn as_graph(&self) -> Result<Graph> {
        Graph::unweighted(self.n, self.edges.iter().map(|e| (e.u, e.v)).collect())
    }
}

pub struct SpannerBuild {
    pub spanner: SpannerEdgeSet,
    pub assignment: LevelAssignment,
    pub pivots: PivotTable,
}

pub fn build_spanner_truncated(g: &Graph, sched: &ParamSchedule, seed: u64) -> Result<SpannerBuild> {
    let la = sample_levels(g, sched, seed);
    build_spanner_truncated_with_levels(g, sched, &la)
}

pub fn build_spanner_truncated_with_levels(
    g: &Graph,
    sched: &ParamSchedule,
    la: &LevelAssignment,
) -> Result<SpannerBuild> {
    if sched.variant != Variant::SpannerTruncated {
        return Err(Error::invalid("schedule variant must be spanner-truncated"));
    }
    build_spanner(g, sched, la, false)
}

pub fn build_spanner_half(g: &Graph, sched: &ParamSchedule, seed: u64) -> Result<SpannerBuild> {
    let la = sample_levels(g, sched, seed);
    build_spanner_half_with_levels(g, sched, &la)
}

pub fn build_spanner_half_with_levels(
    g: &Graph,
    sched: &ParamSchedule,
    la: &LevelAssignment,
) -> Result<SpannerBuild> {
    if sched.variant != Variant::SpannerHalf {
        return Err(Error::invalid("schedule variant must be spanner-half"));
    }
    build_spanner(g, sched, la, true)
}

fn build_spanner(
    g: &Graph,
    sched: &ParamSchedule,
    la: &LevelAssignment,
    half: bool,
) -> Result<SpannerBuild> {
    if !g.is_unit_weighted() {
        return Err(Error::invalid(
            "spanners are built on unweighted graphs (unit weights required)",
        ));
    }
    if la.levels.len() != g.n() || la.depth != sched.levels {
        return Err(Error::Inconsistent(
            "level assignment does not match graph and schedule".into(),
        ));
    }
    let pt = compute_pivots(g, la)?;
    let mut acc: BTreeMap<(u32, u32), Vec<SpanProvenance>> = BTreeMap::new();
    let mut add = |a: u32, b: u32, p: SpanProvenance| {
        let key = (a.min(b), a.max(b));
        let entry = acc.entry(key).or_default();
        if !entry.contains(&p) {
            entry.push(p);
        }
    };

    // pivot paths, one canonical tree per (level, pivot)
    for j in 1..sched.levels {
        let mut clusters: HashMap<u32, Vec<u32>> = HashMap::new();
        for u in 0..g.n() as u32 {
            if let Some(x) = pt.pivot[j][u as usize] {
                if x != u {
                    clusters.entry(x).or_default().push(u);
                }
            }
        }
        let mut pivots: Vec<u32> = clusters.keys().copied().collect();
        pivots.sort_unstable();
        for x in pivots {
            let tree = g.canonical_tree(x)?;
            let mut done: HashSet<u32> = HashSet::new();
            done.insert(x);
            for &u in &clusters[&x] {
                let mut cur = u;
                while !done.contains(&cur) {
                    done.insert(cur);
                    let p = tree.parent[cur as usize].expect("pivot is reachable");
                    add(cur, p, SpanProvenance::PivotPath { level: j as u32 });
                    cur = p;
                }
            }
        }
    }

    // bunch paths from each owner's truncated canonical tree
    let r_top = sched.r_top();
    for u in 0..g.n() as u32 {
        let lo = la.effective_level(u);
        let hi = sched.f_eval(lo).min(sched.levels);
        let mut max_thr = pt.threshold(u, hi + 1);
        if half && max_thr < INF {
            max_thr /= 2.0;
        }
        if !half {
            // distances are integers; members need d <= r_F
            max_thr = max_thr.min(r_top.floor() + 0.5);
        }
        if max_thr == 0.0 {
            continue;
        }
        let tree = g.canonical_tree_bounded(u, max_thr)?;
        let mut done: HashSet<u32> = HashSet::new();
        done.insert(u);
        for v in 0..g.n() as u32 {
            let d = tree.dist[v as usize];
            if v == u || d == INF {
                continue;
            }
            let mut tags = Vec::new();
            for j in lo..=hi {
                let mut thr = pt.threshold(u, j + 1);
                if half && thr < INF {
                    thr /= 2.0;
                }
                if la.in_set(v, j) && d < thr && (half || d <= r_top) {
                    tags.push(if half {
                        SpanProvenance::HalfBunchPath { level: j as u32 }
                    } else {
                        SpanProvenance::BunchPath { level: j as u32 }
                    });
                }
            }
            if tags.is_empty() {
                continue;
            }
            let mut cur = v;
            while !done.contains(&cur) {
                done.insert(cur);
                let p = tree.parent[cur as usize].expect("member is reachable");
                for &t in &tags {
                    add(cur, p, t);
                }
                cur = p;
            }
        }
    }

    let edges = acc
        .into_iter()
        .map(|((u, v), mut provenance)| {
            provenance.sort();
            SpannerEdge { u, v, provenance }
        })
        .collect();
    Ok(SpannerBuild {
        spanner: SpannerEdgeSet {
            n: g.n(),
            edges,
            schedule: sched.clone(),
            seed: la.seed,
        },
        assignment: la.clone(),
        pivots: pt,
    })
}

/// Both sides of the half-bunch edge-count lemma for one `(i, j)`:
/// the union of canonical paths from level-exactly-`i` owners to their
/// half-bunch members has at most `n + 4 sum_{u in A_i} |B_j(u)|^3` edges.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HalfBunchCheck {
    pub level_i: usize,
    pub level_j: usize,
    pub lhs_edges: usize,
    pub rhs_bound: f64,
    pub ok: bool,
}

pub fn half_bunch_edge_count_check(
    g: &Graph,
    la: &LevelAssignment,
    pt: &PivotTable,
    i: usize,
    j: usize,
) -> Result<HalfBunchCheck> {
    if !g.is_unit_weighted() {
        return Err(Error::invalid("half-bunch accounting applies to unweighted graphs"));
    }
    if i >= la.depth {
        return Err(Error::invalid(format!("level i={i} out of range (F={})", la.depth)));
    }
    if j < i || j > la.depth {
        return Err(Error::invalid(format!("need i <= j <= F, got i={i} j={j}")));
    }
    let mut edges: HashSet<(u32, u32)> = HashSet::new();
    for u in 0..g.n() as u32 {
        if la.effective_level(u) != i {
            continue;
        }
        let mut thr = pt.threshold(u, j + 1);
        if thr < INF {
            thr /= 2.0;
        }
        if thr == 0.0 {
            continue;
        }
        let tree = g.canonical_tree_bounded(u, thr)?;
        let mut done: HashSet<u32> = HashSet::new();
        done.insert(u);
        for v in 0..g.n() as u32 {
            let d = tree.dist[v as usize];
            if v == u || d == INF || !la.in_set(v, j) || d >= thr {
                continue;
            }
            let mut cur = v;
            while !done.contains(&cur) {
                done.insert(cur);
                let p = tree.parent[cur as usize].expect("member is reachable");
                edges.insert((cur.min(p), cur.max(p)));
                cur = p;
            }
        }
    }
    let mut cube_sum = 0.0f64;
    for u in 0..g.n() as u32 {
        if la.in_set(u, i) {
            let b = compute_bunch(g, la, pt, u, j, false)?;
            cube_sum += (b.members.len() as f64).powi(3);
        }
    }
    let rhs = g.n() as f64 + 4.0 * cube_sum;
    Ok(HalfBunchCheck {
        level_i: i,
        level_j: j,
        lhs_edges: edges.len(),
        rhs_bound: rhs,
        ok: (edges.len() as f64) <= rhs,
    })
}

/// Size accounting; edges count once under their first provenance entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpannerSizeStats {
    pub total: usize,
    pub pivot_path_edges: usize,
    pub bunch_path_edges: usize,
    pub half_bunch_path_edges: usize,
    /// Distinct edges carrying a pivot-path tag at each level (each is at
    /// most n: per-level pivot paths form a forest).
    pub per_level_pivot_path: Vec<usize>,
    /// F^2 n^{1+1/k}, the simultaneous-variant budget.
    pub f2_budget: f64,
    pub f2_ratio: f64,
}

pub fn spanner_size_stats(s: &SpannerEdgeSet) -> SpannerSizeStats {
    let mut pivot_path_edges = 0;
    let mut bunch_path_edges = 0;
    let mut half_bunch_path_edges = 0;
    let mut per_level_pivot_path = vec![0usize; s.schedule.levels + 1];
    for e in &s.edges {
        match e.provenance.first().expect("edges carry provenance") {
            SpanProvenance::PivotPath { .. } => pivot_path_edges += 1,
            SpanProvenance::BunchPath { .. } => bunch_path_edges += 1,
            SpanProvenance::HalfBunchPath { .. } => half_bunch_path_edges += 1,
        }
        for p in &e.provenance {
            if let SpanProvenance::PivotPath { level } = p {
                per_level_pivot_path[*level as usize] += 1;
            }
        }
    }
    let n = s.n as f64;
    let f2_budget =
        (s.schedule.levels * s.schedule.levels) as f64 * n.powf(1.0 + 1.0 / s.schedule.k as f64);
    SpannerSizeStats {
        total: s.edges.len(),
        pivot_path_edges,
        bunch_path_edges,
        half_bunch_path_edges,
        per_level_pivot_path,
        f2_budget,
        f2_ratio: s.edges.len() as f64 / f2_budget,
    }
}

#[derive(Serialize, Deserialize)]
struct ArtifactHeader {
    format: String,
    n: usize,
    seed: Option<u64>,
    schedule: ParamSchedule,
    stats: SpannerSizeStats,
}

impl SpannerEdgeSet {
    pub fn to_artifact_string(&self) -> String {
        let header = ArtifactHeader {
            format: "spanner-v1".into(),
            n: self.n,
            seed: self.seed,
            schedule: self.schedule.clone(),
            stats: spanner_size_stats(self),
        };
        let mut out = serde_json::to_string(&header).expect("header serializes");
        out.push('\n');
        for e in &self.edges {
            let tags: Vec<String> = e.provenance.iter().map(|p| p.to_string()).collect();
            out.push_str(&format!("{} {} {}\n", e.u, e.v, tags.join(",")));
        }
        out
    }

    pub fn from_artifact_str(text: &str) -> Result<SpannerEdgeSet> {
        let mut lines = text.lines().enumerate();
        let (_, header_line) = lines
            .next()
            .ok_or_else(|| Error::invalid("empty spanner artifact"))?;
        let header: ArtifactHeader = serde_json::from_str(header_line).map_err(|e| Error::Parse {
            line: 1,
            msg: format!("bad artifact header: {e}"),
        })?;
        if header.format != "spanner-v1" {
            return Err(Error::invalid(format!(
                "unexpected artifact format `{}`",
                header.format
            )));
        }
        let mut edges = Vec::new();
        for (idx, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected `u v tags`, got `{line}`"),
                });
            }
            let parse_err = |what: &str| Error::Parse {
                line: idx + 1,
                msg: format!("bad {what} in `{line}`"),
            };
            let u: u32 = fields[0].parse().map_err(|_| parse_err("vertex"))?;
            let v: u32 = fields[1].parse().map_err(|_| parse_err("vertex"))?;
            let provenance = fields[2]
                .split(',')
                .map(|t| t.parse::<SpanProvenance>())
                .collect::<Result<Vec<_>>>()?;
            edges.push(SpannerEdge { u, v, provenance });
        }
        Ok(SpannerEdgeSet {
            n: header.n,
            edges,
            schedule: header.schedule,
            seed: header.seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::schedule::LevelFunction;

    fn trunc_sched(k: u32, t: f64) -> ParamSchedule {
        ParamSchedule::new(k, LevelFunction::Identity, t, Variant::SpannerTruncated).unwrap()
    }

    fn half_sched(k: u32) -> ParamSchedule {
        ParamSchedule::new(k, LevelFunction::Identity, 1.0, Variant::SpannerHalf).unwrap()
    }

    #[test]
    fn spanner_is_subgraph() {
        let g = gen::random_unweighted(80, 220, 7).unwrap();
        for build in [
            build_spanner_truncated(&g, &trunc_sched(4, 1.0), 3).unwrap(),
            build_spanner_half(&g, &half_sched(4), 3).unwrap(),
        ] {
            for e in &build.spanner.edges {
                assert!(g.has_edge(e.u, e.v).is_some(), "edge ({},{}) not in G", e.u, e.v);
            }
        }
    }

    #[test]
    fn weighted_input_rejected() {
        let g = gen::random_weighted(20, 40, 5, 1).unwrap();
        assert!(build_spanner_truncated(&g, &trunc_sched(3, 1.0), 0).is_err());
        assert!(build_spanner_half(&g, &half_sched(3), 0).is_err());
    }

    #[test]
    fn wrong_variant_rejected() {
        let g = gen::random_unweighted(20, 40, 1).unwrap();
        let hop = ParamSchedule::new(3, LevelFunction::Identity, 1.0, Variant::Hopset).unwrap();
        assert!(build_spanner_truncated(&g, &hop, 0).is_err());
        assert!(build_spanner_half(&g, &hop, 0).is_err());
    }

    #[test]
    fn single_edge_graph_spanner_is_whole_graph() {
        let g = Graph::unweighted(2, vec![(0, 1)]).unwrap();
        for seed in 0..20u64 {
            let build = build_spanner_half(&g, &half_sched(3), seed).unwrap();
            assert_eq!(build.spanner.len(), 1, "seed {seed}");
            let build = build_spanner_truncated(&g, &trunc_sched(3, 1.0), seed).unwrap();
            assert_eq!(build.spanner.len(), 1, "seed {seed}");
        }
    }

    #[test]
    fn per_level_pivot_path_edges_within_n() {
        let g = gen::random_unweighted(100, 300, 17).unwrap();
        let build = build_spanner_truncated(&g, &trunc_sched(6, 2.0), 5).unwrap();
        let stats = spanner_size_stats(&build.spanner);
        for (j, count) in stats.per_level_pivot_path.iter().enumerate() {
            assert!(*count <= g.n(), "level {j} pivot-path edges {count} > n");
        }
    }

    #[test]
    fn truncated_bunch_paths_respect_radius_cap() {
        let g = gen::random_unweighted(100, 260, 23).unwrap();
        let sched = trunc_sched(4, 1.0);
        let build = build_spanner_truncated(&g, &sched, 9).unwrap();
        // every bunch member used lies within r_F of its owner, so every
        // bunch-path edge lies on a path of length <= r_F; spot-check the
        // aggregate bound: bunch-path edges <= (sum of capped bunch sizes) * r_F
        let la = &build.assignment;
        let pt = &build.pivots;
        let mut capped_members = 0usize;
        for u in 0..g.n() as u32 {
            let lo = la.effective_level(u);
            let hi = sched.f_eval(lo).min(sched.levels);
            for j in lo..=hi {
                let b = compute_bunch(&g, la, pt, u, j, false).unwrap();
                capped_members += b
                    .members
                    .iter()
                    .filter(|(v, d)| *v != u && *d <= sched.r_top())
                    .count();
            }
        }
        let stats = spanner_size_stats(&build.spanner);
        assert!(
            stats.bunch_path_edges as f64 <= capped_members as f64 * sched.r_top(),
            "{} > {} * {}",
            stats.bunch_path_edges,
            capped_members,
            sched.r_top()
        );
    }

    #[test]
    fn half_bunch_check_trivial_cases() {
        let g = gen::random_unweighted(60, 150, 31).unwrap();
        let sched = half_sched(4);
        let la = sample_levels(&g, &sched, 2);
        let pt = compute_pivots(&g, &la).unwrap();
        // a level with no owners gives lhs = 0
        let depth = la.depth;
        let empty_level = (0..depth).find(|&i| (0..g.n() as u32).all(|u| la.effective_level(u) != i));
        if let Some(i) = empty_level {
            let chk = half_bunch_edge_count_check(&g, &la, &pt, i, i).unwrap();
            assert_eq!(chk.lhs_edges, 0);
            assert!(chk.ok);
        }
        assert!(half_bunch_edge_count_check(&g, &la, &pt, 2, 1).is_err());
    }

    #[test]
    fn half_bunch_check_on_star_graph() {
        // star: all distances are 1 or 2, every half bunch is tiny, and the
        // loose bound n + 4*sum holds with room
        let n = 40usize;
        let g = Graph::unweighted(n, (1..n as u32).map(|v| (0, v)).collect()).unwrap();
        let sched = half_sched(4);
        for seed in 0..5u64 {
            let la = sample_levels(&g, &sched, seed);
            let pt = compute_pivots(&g, &la).unwrap();
            for i in 0..la.depth {
                let chk = half_bunch_edge_count_check(&g, &la, &pt, i, i).unwrap();
                assert!(chk.ok, "seed {seed} level {i}");
                assert!(chk.rhs_bound >= n as f64);
            }
        }
    }

    #[test]
    fn half_bunch_check_holds_on_random_graphs() {
        for seed in 0..10u64 {
            let g = gen::random_unweighted(100, 280, 400 + seed).unwrap();
            let sched = half_sched(6);
            let la = sample_levels(&g, &sched, seed);
            let pt = compute_pivots(&g, &la).unwrap();
            for i in 0..la.depth {
                let hi = sched.f_eval(i).min(la.depth);
                for j in i..=hi {
                    let chk = half_bunch_edge_count_check(&g, &la, &pt, i, j).unwrap();
                    assert!(
                        chk.ok,
                        "seed {seed} (i={i}, j={j}): {} > {}",
                        chk.lhs_edges, chk.rhs_bound
                    );
                }
            }
        }
    }

    #[test]
    fn artifact_round_trip() {
        let g = gen::random_unweighted(60, 170, 41).unwrap();
        let s = build_spanner_half(&g, &half_sched(5), 8).unwrap().spanner;
        let text = s.to_artifact_string();
        let back = SpannerEdgeSet::from_artifact_str(&text).unwrap();
        assert_eq!(s.n, back.n);
        assert_eq!(s.edges.len(), back.edges.len());
        for (a, b) in s.edges.iter().zip(&back.edges) {
            assert_eq!((a.u, a.v), (b.u, b.v));
            assert_eq!(a.provenance, b.provenance);
        }
    }
}
