//! Assembles the hopset edge set from pivots and bunches: every vertex gets
//! an edge to each of its pivots below the top level, and to every member of
//! its bunches at levels `i(u) ..= f(i(u))`. Edge weights are exact graph
//! distances.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, INF};
use crate::levels::{compute_pivots, sample_levels, LevelAssignment, PivotTable};
use crate::schedule::{ParamSchedule, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Pivot { level: u32 },
    Bunch { level: u32 },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Pivot { level } => write!(f, "pivot:{level}"),
            Provenance::Bunch { level } => write!(f, "bunch:{level}"),
        }
    }
}

impl std::str::FromStr for Provenance {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (kind, lvl) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("bad provenance tag `{s}`")))?;
        let level: u32 = lvl
            .parse()
            .map_err(|_| Error::invalid(format!("bad provenance level in `{s}`")))?;
        match kind {
            "pivot" => Ok(Provenance::Pivot { level }),
            "bunch" => Ok(Provenance::Bunch { level }),
            _ => Err(Error::invalid(format!("unknown provenance kind `{kind}`"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HopsetEdge {
    pub x: u32,
    pub y: u32,
    pub w: f64,
    /// All origins of this edge, sorted; duplicates are stored once.
    pub provenance: Vec<Provenance>,
}

#[derive(Debug, Clone)]
pub struct HopsetEdgeSet {
    pub n: usize,
    pub edges: Vec<HopsetEdge>,
    pub schedule: ParamSchedule,
    pub seed: Option<u64>,
}

impl HopsetEdgeSet {
    pub fn weighted_edges(&self) -> Vec<(u32, u32, f64)> {
        self.edges.iter().map(|e| (e.x, e.y, e.w)).collect()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Everything a verification or trace run needs from one build.
pub struct HopsetBuild {
    pub hopset: HopsetEdgeSet,
    pub assignment: LevelAssignment,
    pub pivots: PivotTable,
}

pub fn build_hopset(g: &Graph, sched: &ParamSchedule, seed: u64) -> Result<HopsetBuild> {
    let la = sample_levels(g, sched, seed);
    build_hopset_with_levels(g, sched, &la)
}

pub fn build_hopset_with_levels(
    g: &Graph,
    sched: &ParamSchedule,
    la: &LevelAssignment,
) -> Result<HopsetBuild> {
    if sched.variant != Variant::Hopset {
        return Err(Error::invalid("schedule variant must be hopset"));
    }
    if la.levels.len() != g.n() || la.depth != sched.levels {
        return Err(Error::Inconsistent(
            "level assignment does not match graph and schedule".into(),
        ));
    }
    let pt = compute_pivots(g, la)?;
    let mut acc: BTreeMap<(u32, u32), (f64, Vec<Provenance>)> = BTreeMap::new();
    let mut add = |a: u32, b: u32, w: f64, p: Provenance| {
        let key = (a.min(b), a.max(b));
        let entry = acc.entry(key).or_insert_with(|| (w, Vec::new()));
        entry.0 = entry.0.min(w);
        if !entry.1.contains(&p) {
            entry.1.push(p);
        }
    };

    for u in 0..g.n() as u32 {
        // pivot edges at every level below the top
        for j in 0..sched.levels {
            if let Some(x) = pt.pivot[j][u as usize] {
                if x != u {
                    add(u, x, pt.dist[j][u as usize], Provenance::Pivot { level: j as u32 });
                }
            }
        }
        // bunch edges at levels i(u) ..= f(i(u))
        let lo = la.effective_level(u);
        let hi = sched.f_eval(lo).min(sched.levels);
        let max_thr = pt.threshold(u, hi + 1);
        if max_thr == 0.0 {
            continue;
        }
        let tree = g.canonical_tree_bounded(u, max_thr)?;
        for v in 0..g.n() as u32 {
            let d = tree.dist[v as usize];
            if v == u || d == INF {
                continue;
            }
            for j in lo..=hi {
                if la.in_set(v, j) && d < pt.threshold(u, j + 1) {
                    add(u, v, d, Provenance::Bunch { level: j as u32 });
                }
            }
        }
    }

    let edges = acc
        .into_iter()
        .map(|((x, y), (w, mut provenance))| {
            provenance.sort();
            HopsetEdge { x, y, w, provenance }
        })
        .collect();
    Ok(HopsetBuild {
        hopset: HopsetEdgeSet {
            n: g.n(),
            edges,
            schedule: sched.clone(),
            seed: la.seed,
        },
        assignment: la.clone(),
        pivots: pt,
    })
}

/// Size accounting. Each edge is counted once, under its first provenance
/// entry (pivot before bunch, lower level first), so the per-class counts
/// sum to the total.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HopsetSizeStats {
    pub total: usize,
    pub pivot_edges: usize,
    pub bunch_edges: usize,
    pub per_level_pivot: Vec<usize>,
    pub per_level_bunch: Vec<usize>,
    /// F^2 n^{1+1/k}, the generic expected-size budget.
    pub f2_budget: f64,
    pub f2_ratio: f64,
    /// k n^{1+1/k}, the tighter budget for the linear level function.
    pub linear_budget: f64,
    pub linear_ratio: f64,
}

pub fn hopset_size_stats(h: &HopsetEdgeSet) -> HopsetSizeStats {
    let levels = h.schedule.levels;
    let mut per_level_pivot = vec![0usize; levels + 1];
    let mut per_level_bunch = vec![0usize; levels + 1];
    for e in &h.edges {
        match e.provenance.first().expect("edges carry provenance") {
            Provenance::Pivot { level } => per_level_pivot[*level as usize] += 1,
            Provenance::Bunch { level } => per_level_bunch[*level as usize] += 1,
        }
    }
    let pivot_edges: usize = per_level_pivot.iter().sum();
    let bunch_edges: usize = per_level_bunch.iter().sum();
    let total = h.edges.len();
    debug_assert_eq!(total, pivot_edges + bunch_edges);
    let n = h.n as f64;
    let size_term = n.powf(1.0 + 1.0 / h.schedule.k as f64);
    let f2_budget = (levels * levels) as f64 * size_term;
    let linear_budget = h.schedule.k as f64 * size_term;
    HopsetSizeStats {
        total,
        pivot_edges,
        bunch_edges,
        per_level_pivot,
        per_level_bunch,
        f2_budget,
        f2_ratio: total as f64 / f2_budget,
        linear_budget,
        linear_ratio: total as f64 / linear_budget,
    }
}

#[derive(Serialize, Deserialize)]
struct ArtifactHeader {
    format: String,
    n: usize,
    seed: Option<u64>,
    schedule: ParamSchedule,
    stats: HopsetSizeStats,
}

impl HopsetEdgeSet {
    /// JSON header line followed by one `x y w tag[,tag...]` line per edge.
    pub fn to_artifact_string(&self) -> String {
        let header = ArtifactHeader {
            format: "hopset-v1".into(),
            n: self.n,
            seed: self.seed,
            schedule: self.schedule.clone(),
            stats: hopset_size_stats(self),
        };
        let mut out = serde_json::to_string(&header).expect("header serializes");
        out.push('\n');
        for e in &self.edges {
            let tags: Vec<String> = e.provenance.iter().map(|p| p.to_string()).collect();
            out.push_str(&format!("{} {} {} {}\n", e.x, e.y, e.w, tags.join(",")));
        }
        out
    }

    pub fn from_artifact_str(text: &str) -> Result<HopsetEdgeSet> {
        let mut lines = text.lines().enumerate();
        let (_, header_line) = lines
            .next()
            .ok_or_else(|| Error::invalid("empty hopset artifact"))?;
        let header: ArtifactHeader = serde_json::from_str(header_line).map_err(|e| Error::Parse {
            line: 1,
            msg: format!("bad artifact header: {e}"),
        })?;
        if header.format != "hopset-v1" {
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
            if fields.len() != 4 {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected `x y w tags`, got `{line}`"),
                });
            }
            let parse_err = |what: &str| Error::Parse {
                line: idx + 1,
                msg: format!("bad {what} in `{line}`"),
            };
            let x: u32 = fields[0].parse().map_err(|_| parse_err("vertex"))?;
            let y: u32 = fields[1].parse().map_err(|_| parse_err("vertex"))?;
            let w: f64 = fields[2].parse().map_err(|_| parse_err("weight"))?;
            let provenance = fields[3]
                .split(',')
                .map(|t| t.parse::<Provenance>())
                .collect::<Result<Vec<_>>>()?;
            edges.push(HopsetEdge { x, y, w, provenance });
        }
        Ok(HopsetEdgeSet {
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
    use crate::graph::all_pairs;
    use crate::schedule::LevelFunction;

    fn sched(k: u32, f: LevelFunction) -> ParamSchedule {
        ParamSchedule::new(k, f, 1.0, Variant::Hopset).unwrap()
    }

    /// Direct evaluation of the defining unions, from all-pairs distances.
    #[allow(clippy::needless_range_loop)]
    fn brute_force_edges(
        g: &Graph,
        sched: &ParamSchedule,
        la: &LevelAssignment,
    ) -> BTreeMap<(u32, u32), Vec<Provenance>> {
        let rows = all_pairs(g);
        let n = g.n();
        let members: Vec<Vec<u32>> = (0..=sched.levels).map(|j| la.set_members(j)).collect();
        let pivot = |u: u32, j: usize| -> Option<(u32, f64)> {
            members[j]
                .iter()
                .map(|&v| (rows[u as usize][v as usize], v))
                .filter(|&(d, _)| d < INF)
                .min_by(|a, b| a.partial_cmp(b).unwrap())
                .map(|(d, v)| (v, d))
        };
        let mut out: BTreeMap<(u32, u32), Vec<Provenance>> = BTreeMap::new();
        let mut add = |a: u32, b: u32, p: Provenance| {
            let key = (a.min(b), a.max(b));
            let entry = out.entry(key).or_default();
            if !entry.contains(&p) {
                entry.push(p);
            }
        };
        for u in 0..n as u32 {
            for j in 0..sched.levels {
                if let Some((x, _)) = pivot(u, j) {
                    if x != u {
                        add(u, x, Provenance::Pivot { level: j as u32 });
                    }
                }
            }
            let lo = la.effective_level(u);
            let hi = sched.f_eval(lo).min(sched.levels);
            for j in lo..=hi {
                let thr = if j + 1 > sched.levels {
                    INF
                } else {
                    match pivot(u, j + 1) {
                        Some((_, d)) => d,
                        None => INF,
                    }
                };
                for &v in &members[j] {
                    if v != u && rows[u as usize][v as usize] < thr {
                        add(u, v, Provenance::Bunch { level: j as u32 });
                    }
                }
            }
        }
        out
    }

    #[test]
    fn builder_matches_direct_definition() {
        for (seed, f) in [
            (3u64, LevelFunction::Identity),
            (5, LevelFunction::Linear { k: 5 }),
            (7, LevelFunction::interleaved(2).unwrap()),
        ] {
            let g = gen::random_weighted(50, 130, 10, 100 + seed).unwrap();
            let s = sched(5, f);
            let build = build_hopset(&g, &s, seed).unwrap();
            let want = brute_force_edges(&g, &s, &build.assignment);
            let got: BTreeMap<(u32, u32), Vec<Provenance>> = build
                .hopset
                .edges
                .iter()
                .map(|e| ((e.x, e.y), e.provenance.clone()))
                .collect();
            assert_eq!(got.len(), want.len(), "edge count seed {seed}");
            let rows = all_pairs(&g);
            for (key, mut prov) in want {
                prov.sort();
                let built = got.get(&key).unwrap_or_else(|| panic!("missing edge {key:?}"));
                assert_eq!(*built, prov, "provenance of {key:?}");
                let e = build
                    .hopset
                    .edges
                    .iter()
                    .find(|e| (e.x, e.y) == key)
                    .unwrap();
                assert_eq!(e.w, rows[key.0 as usize][key.1 as usize], "weight of {key:?}");
            }
        }
    }

    #[test]
    fn single_vertex_graph_gives_empty_hopset() {
        let g = Graph::new(1, vec![]).unwrap();
        let s = sched(3, LevelFunction::Identity);
        let build = build_hopset(&g, &s, 0).unwrap();
        assert!(build.hopset.is_empty());
    }

    #[test]
    fn wrong_variant_is_rejected() {
        let g = gen::random_weighted(10, 20, 5, 1).unwrap();
        let s = ParamSchedule::new(4, LevelFunction::Identity, 1.0, Variant::SpannerHalf).unwrap();
        assert!(build_hopset(&g, &s, 0).is_err());
    }

    #[test]
    fn stats_accounting_identity() {
        let g = gen::random_weighted(60, 150, 10, 9).unwrap();
        let s = sched(6, LevelFunction::Identity);
        let build = build_hopset(&g, &s, 4).unwrap();
        let stats = hopset_size_stats(&build.hopset);
        assert_eq!(stats.total, build.hopset.len());
        assert_eq!(stats.total, stats.pivot_edges + stats.bunch_edges);
        assert_eq!(stats.per_level_pivot.iter().sum::<usize>(), stats.pivot_edges);
        assert_eq!(stats.per_level_bunch.iter().sum::<usize>(), stats.bunch_edges);
    }

    #[test]
    fn empty_hopset_stats_are_zero() {
        let g = Graph::new(1, vec![]).unwrap();
        let s = sched(3, LevelFunction::Identity);
        let h = build_hopset(&g, &s, 0).unwrap().hopset;
        let stats = hopset_size_stats(&h);
        assert_eq!(stats.total, 0);
        assert_eq!(stats.pivot_edges, 0);
        assert_eq!(stats.bunch_edges, 0);
    }

    #[test]
    fn artifact_round_trip() {
        let g = gen::random_weighted(40, 100, 10, 21).unwrap();
        let s = sched(4, LevelFunction::interleaved(2).unwrap());
        let h = build_hopset(&g, &s, 13).unwrap().hopset;
        let text = h.to_artifact_string();
        let back = HopsetEdgeSet::from_artifact_str(&text).unwrap();
        assert_eq!(h.n, back.n);
        assert_eq!(h.seed, back.seed);
        assert_eq!(h.schedule, back.schedule);
        assert_eq!(h.edges.len(), back.edges.len());
        for (a, b) in h.edges.iter().zip(&back.edges) {
            assert_eq!((a.x, a.y, a.w), (b.x, b.y, b.w));
            assert_eq!(a.provenance, b.provenance);
        }
    }

    #[test]
    fn builds_are_deterministic_per_seed() {
        let g = gen::random_weighted(50, 120, 10, 33).unwrap();
        let s = sched(8, LevelFunction::Identity);
        let a = build_hopset(&g, &s, 5).unwrap().hopset;
        let b = build_hopset(&g, &s, 5).unwrap().hopset;
        assert_eq!(a.to_artifact_string(), b.to_artifact_string());
    }
}
