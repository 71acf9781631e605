//! Measurement side: true stretch and hop counts of a hopset or spanner
//! against the exact shortest-path oracle, plus constructive tracers that
//! replay the low-hop paths the analysis promises and certify them edge by
//! edge.

use std::collections::HashMap;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{AugmentedGraph, Graph, HopRelaxer, INF};
use crate::hopset::HopsetEdgeSet;
use crate::levels::{score, LevelAssignment, PivotTable};
use crate::schedule::ParamSchedule;
use crate::spanner::SpannerEdgeSet;

const REL_EPS: f64 = 1e-9;
/// Above this size, pair verification samples instead of checking all pairs.
pub const EXHAUSTIVE_CAP: usize = 300;

#[derive(Debug, Clone, Copy)]
pub enum PairSpec {
    /// Exhaustive up to [`EXHAUSTIVE_CAP`] vertices, sampled beyond.
    Auto,
    Exhaustive,
    Sample { pairs: usize, seed: u64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorstPair {
    pub u: u32,
    pub v: u32,
    pub dist: f64,
    pub approx: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claimed_alpha: f64,
    pub claimed_beta: Option<u32>,
    pub claimed_additive: f64,
    /// Max over checked pairs of (approx - additive) / dist.
    pub observed_max_stretch: f64,
    pub worst: Option<WorstPair>,
    /// Ten buckets across [1, alpha], then one for finite violations and one
    /// for pairs left unreachable within the budget.
    pub histogram: Vec<usize>,
    pub checked_pairs: usize,
    pub skipped_pairs: usize,
    pub pass: bool,
}

struct PairScan {
    max_ratio: f64,
    worst: Option<WorstPair>,
    histogram: Vec<usize>,
    checked: usize,
    skipped: usize,
}

impl PairScan {
    fn new(buckets: usize) -> Self {
        PairScan {
            max_ratio: f64::NEG_INFINITY,
            worst: None,
            histogram: vec![0; buckets],
            checked: 0,
            skipped: 0,
        }
    }

    fn record(&mut self, alpha: f64, additive: f64, u: u32, v: u32, d: f64, approx: f64) {
        self.checked += 1;
        let ratio = if approx == INF {
            INF
        } else {
            (approx - additive) / d
        };
        let b = self.histogram.len();
        let idx = if approx == INF {
            b - 1
        } else if ratio > alpha + REL_EPS * alpha.max(1.0) {
            b - 2
        } else if alpha <= 1.0 || ratio <= 1.0 {
            0
        } else {
            (((ratio - 1.0) / (alpha - 1.0) * (b - 2) as f64) as usize).min(b - 3)
        };
        self.histogram[idx] += 1;
        if self.worst.is_none() || ratio > self.max_ratio {
            self.max_ratio = ratio;
            self.worst = Some(WorstPair {
                u,
                v,
                dist: d,
                approx,
            });
        }
    }

    fn merge(mut self, other: PairScan) -> PairScan {
        if other.worst.is_some() && (self.worst.is_none() || other.max_ratio > self.max_ratio) {
            self.max_ratio = other.max_ratio;
            self.worst = other.worst;
        }
        for (a, b) in self.histogram.iter_mut().zip(&other.histogram) {
            *a += b;
        }
        self.checked += other.checked;
        self.skipped += other.skipped;
        self
    }

    fn into_report(self, alpha: f64, beta: Option<u32>, additive: f64) -> VerificationReport {
        let observed = if self.worst.is_none() { 1.0 } else { self.max_ratio };
        let pass = observed <= alpha + REL_EPS * alpha.max(1.0);
        VerificationReport {
            claimed_alpha: alpha,
            claimed_beta: beta,
            claimed_additive: additive,
            observed_max_stretch: observed,
            worst: self.worst,
            histogram: self.histogram,
            checked_pairs: self.checked,
            skipped_pairs: self.skipped,
            pass,
        }
    }
}

const BUCKETS: usize = 12;

fn check_hopset_weights(g: &Graph, h: &HopsetEdgeSet) -> Result<()> {
    if h.n != g.n() {
        return Err(Error::Inconsistent(format!(
            "hopset is for n={} but graph has n={}",
            h.n,
            g.n()
        )));
    }
    let mut endpoints: Vec<u32> = h.edges.iter().map(|e| e.x).collect();
    endpoints.sort_unstable();
    endpoints.dedup();
    let rows = crate::graph::rows_for(g, &endpoints);
    for e in &h.edges {
        let d = rows[&e.x][e.y as usize];
        if (e.w - d).abs() > REL_EPS * d.abs().max(1.0) {
            return Err(Error::Inconsistent(format!(
                "hopset edge ({},{}) claims weight {} but the graph distance is {}",
                e.x, e.y, e.w, d
            )));
        }
    }
    Ok(())
}

/// Measure the hopset against the claimed `(alpha, beta)`: for each pair,
/// compare the beta-hop-bounded distance over the augmented graph with
/// `alpha` times the true distance. Disconnected pairs are skipped and
/// counted.
pub fn verify_hopset(
    g: &Graph,
    h: &HopsetEdgeSet,
    alpha: f64,
    beta: u32,
    pairs: PairSpec,
) -> Result<VerificationReport> {
    if beta < 1 {
        return Err(Error::invalid("hop budget beta must be >= 1"));
    }
    check_hopset_weights(g, h)?;
    let ag = AugmentedGraph::new(g, h.weighted_edges())?;
    let n = g.n();
    // collect per-source scans in index order and fold sequentially, so the
    // reported worst pair does not depend on the parallel merge order
    let scans: Vec<PairScan> = match resolve_pairs(pairs, n) {
        ResolvedPairs::Exhaustive => (0..n as u32)
            .into_par_iter()
            .map(|u| {
                let dg = g.dijkstra(u).expect("valid source").dist;
                let dh = hop_row(&ag, u, beta);
                let mut scan = PairScan::new(BUCKETS);
                for v in (u + 1)..n as u32 {
                    let d = dg[v as usize];
                    if d == INF {
                        scan.skipped += 1;
                        continue;
                    }
                    scan.record(alpha, 0.0, u, v, d, dh[v as usize]);
                }
                scan
            })
            .collect(),
        ResolvedPairs::Sample { per_source, sources } => sources
            .into_par_iter()
            .map(|(u, tseed)| {
                let dg = g.dijkstra(u).expect("valid source").dist;
                let dh = hop_row(&ag, u, beta);
                let mut scan = PairScan::new(BUCKETS);
                for v in sample_targets(&dg, u, per_source, tseed) {
                    scan.record(alpha, 0.0, u, v, dg[v as usize], dh[v as usize]);
                }
                scan
            })
            .collect(),
    };
    let scan = scans
        .into_iter()
        .fold(PairScan::new(BUCKETS), PairScan::merge);
    Ok(scan.into_report(alpha, Some(beta), 0.0))
}

fn hop_row(ag: &AugmentedGraph, u: u32, beta: u32) -> Vec<f64> {
    ag.hop_bounded_row(u, beta).expect("valid source")
}

enum ResolvedPairs {
    Exhaustive,
    Sample {
        per_source: usize,
        sources: Vec<(u32, u64)>,
    },
}

fn resolve_pairs(spec: PairSpec, n: usize) -> ResolvedPairs {
    let sample = |pairs: usize, seed: u64| {
        let per_source = 20usize;
        let count = pairs.div_ceil(per_source).min(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked = std::collections::HashSet::new();
        let mut sources = Vec::with_capacity(count);
        while sources.len() < count {
            let u = rng.gen_range(0..n as u32);
            if picked.insert(u) {
                sources.push((u, rng.gen::<u64>()));
            }
        }
        ResolvedPairs::Sample {
            per_source,
            sources,
        }
    };
    match spec {
        PairSpec::Exhaustive => ResolvedPairs::Exhaustive,
        PairSpec::Auto if n <= EXHAUSTIVE_CAP => ResolvedPairs::Exhaustive,
        PairSpec::Auto => sample(30 * n, 0x5EED_0001),
        PairSpec::Sample { pairs, seed } => sample(pairs, seed),
    }
}

/// Stratified target selection: distances from `u` are split into deciles
/// and targets are drawn across them, so sampled verification still sees
/// every distance scale.
fn sample_targets(dg: &[f64], u: u32, count: usize, seed: u64) -> Vec<u32> {
    let mut finite: Vec<u32> = (0..dg.len() as u32)
        .filter(|&v| v != u && dg[v as usize] < INF)
        .collect();
    if finite.is_empty() {
        return Vec::new();
    }
    finite.sort_by(|&a, &b| {
        dg[a as usize]
            .partial_cmp(&dg[b as usize])
            .unwrap()
            .then(a.cmp(&b))
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let deciles = 10usize.min(finite.len());
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let d = i % deciles;
        let lo = finite.len() * d / deciles;
        let hi = (finite.len() * (d + 1) / deciles).max(lo + 1);
        out.push(finite[rng.gen_range(lo..hi)]);
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Measure a spanner against `d_S <= mult * d_G + add` over all pairs.
pub fn verify_spanner(
    g: &Graph,
    s: &SpannerEdgeSet,
    mult: f64,
    add: f64,
) -> Result<VerificationReport> {
    if s.n != g.n() {
        return Err(Error::Inconsistent(format!(
            "spanner is for n={} but graph has n={}",
            s.n,
            g.n()
        )));
    }
    for e in &s.edges {
        if g.has_edge(e.u, e.v).is_none() {
            return Err(Error::invalid(format!(
                "spanner edge ({},{}) is not a graph edge",
                e.u, e.v
            )));
        }
    }
    let sg = s.as_graph()?;
    let n = g.n();
    let scans: Vec<PairScan> = (0..n as u32)
        .into_par_iter()
        .map(|u| {
            let dg = g.dijkstra(u).expect("valid source").dist;
            let ds = sg.dijkstra(u).expect("valid source").dist;
            let mut scan = PairScan::new(BUCKETS);
            for v in (u + 1)..n as u32 {
                let d = dg[v as usize];
                if d == INF {
                    scan.skipped += 1;
                    continue;
                }
                scan.record(mult, add, u, v, d, ds[v as usize]);
            }
            scan
        })
        .collect();
    let scan = scans
        .into_iter()
        .fold(PairScan::new(BUCKETS), PairScan::merge);
    Ok(scan.into_report(mult, None, add))
}

/// One verified pair, for CSV export.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairRow {
    pub u: u32,
    pub v: u32,
    pub dist: f64,
    pub approx: f64,
    pub ratio: f64,
}

/// Per-pair `(d, d^(beta), ratio)` rows over the same pair selection as
/// [`verify_hopset`].
pub fn hopset_pair_rows(
    g: &Graph,
    h: &HopsetEdgeSet,
    beta: u32,
    pairs: PairSpec,
) -> Result<Vec<PairRow>> {
    check_hopset_weights(g, h)?;
    let ag = AugmentedGraph::new(g, h.weighted_edges())?;
    let n = g.n();
    let collect = |u: u32, targets: Vec<u32>| {
        let dg = g.dijkstra(u).expect("valid source").dist;
        let dh = hop_row(&ag, u, beta);
        targets
            .into_iter()
            .filter(|&v| dg[v as usize] < INF)
            .map(|v| PairRow {
                u,
                v,
                dist: dg[v as usize],
                approx: dh[v as usize],
                ratio: dh[v as usize] / dg[v as usize],
            })
            .collect::<Vec<_>>()
    };
    let mut rows: Vec<PairRow> = match resolve_pairs(pairs, n) {
        ResolvedPairs::Exhaustive => (0..n as u32)
            .into_par_iter()
            .flat_map_iter(|u| collect(u, ((u + 1)..n as u32).collect()))
            .collect(),
        ResolvedPairs::Sample { per_source, sources } => sources
            .into_par_iter()
            .flat_map_iter(|(u, tseed)| {
                let dg = g.dijkstra(u).expect("valid source").dist;
                collect(u, sample_targets(&dg, u, per_source, tseed))
            })
            .collect(),
    };
    rows.sort_by_key(|r| (r.u, r.v));
    Ok(rows)
}

/// Per-pair `(d_G, d_S, ratio)` rows over all connected pairs.
pub fn spanner_pair_rows(g: &Graph, s: &SpannerEdgeSet) -> Result<Vec<PairRow>> {
    let sg = s.as_graph()?;
    let n = g.n();
    let mut rows: Vec<PairRow> = (0..n as u32)
        .into_par_iter()
        .flat_map_iter(|u| {
            let dg = g.dijkstra(u).expect("valid source").dist;
            let ds = sg.dijkstra(u).expect("valid source").dist;
            ((u + 1)..n as u32)
                .filter(|&v| dg[v as usize] < INF)
                .map(|v| PairRow {
                    u,
                    v,
                    dist: dg[v as usize],
                    approx: ds[v as usize],
                    ratio: ds[v as usize] / dg[v as usize],
                })
                .collect::<Vec<_>>()
        })
        .collect();
    rows.sort_by_key(|r| (r.u, r.v));
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MinHopbound {
    Bounded(u32),
    /// No hop budget up to n-1 reaches stretch alpha for every pair.
    UnreachableAtAlpha,
}

/// Minimal `beta` such that every connected pair has a beta-hop path of
/// weight at most `alpha` times its distance (and is actually reachable
/// within `beta` hops). Computed per source by stepping the hop-bounded
/// relaxation one round at a time; the per-pair requirement is monotone in
/// `beta`, so the max over sources of the first satisfying round is the
/// global minimum.
pub fn measure_min_hopbound(g: &Graph, h: &HopsetEdgeSet, alpha: f64) -> Result<MinHopbound> {
    if alpha < 1.0 {
        return Err(Error::invalid("alpha must be >= 1"));
    }
    if h.n != g.n() {
        return Err(Error::Inconsistent("hopset/graph size mismatch".into()));
    }
    let ag = AugmentedGraph::new(g, h.weighted_edges())?;
    let n = g.n();
    if n <= 1 {
        return Ok(MinHopbound::Bounded(1));
    }
    let per_source: Vec<Option<u32>> = (0..n as u32)
        .into_par_iter()
        .map(|u| {
            let dg = g.dijkstra(u).expect("valid source").dist;
            let targets: Vec<u32> = (0..n as u32)
                .filter(|&v| v != u && dg[v as usize] < INF)
                .collect();
            if targets.is_empty() {
                return Some(0);
            }
            let ok = |dist: &[f64]| {
                targets.iter().all(|&v| {
                    let d = dist[v as usize];
                    d < INF && d <= alpha * dg[v as usize] * (1.0 + REL_EPS)
                })
            };
            let mut relaxer = HopRelaxer::new(&ag, u);
            for beta in 1..n as u32 {
                let progressed = relaxer.step();
                if ok(relaxer.dist()) {
                    return Some(beta);
                }
                if !progressed {
                    return None;
                }
            }
            None
        })
        .collect();
    let mut best = 1u32;
    for b in per_source {
        match b {
            Some(bu) => best = best.max(bu.max(1)),
            None => return Ok(MinHopbound::UnreachableAtAlpha),
        }
    }
    Ok(MinHopbound::Bounded(best))
}

// ---- constructive tracers ----

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum HopKind {
    GraphEdge,
    PivotEdge { level: u32 },
    BunchEdge { level: u32 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertHop {
    pub x: u32,
    pub y: u32,
    pub w: f64,
    pub kind: HopKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentInfo {
    pub head: u32,
    pub score: usize,
    /// Distance advanced along the base shortest path by this segment.
    pub advance: f64,
    /// Lower bound the analysis promises for the advance of every non-final
    /// segment.
    pub required_advance: f64,
}

/// An explicit low-hop path in the augmented graph plus everything needed to
/// re-check it: the jump decomposition certifies stretch `2t+3` within
/// `ceil(4 r_F) + 3` hops.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JumpCertificate {
    pub u: u32,
    pub v: u32,
    pub t: f64,
    pub d_uv: f64,
    pub hops: Vec<CertHop>,
    pub segments: Vec<SegmentInfo>,
    pub total_weight: f64,
    pub weight_bound: f64,
    pub hop_bound: u32,
}

impl JumpCertificate {
    /// Re-check the certificate against raw structures only: every hop must
    /// be a graph edge or a hopset pair whose weight equals the recomputed
    /// graph distance, the weights must telescope within the stretch bound,
    /// and the hop count must fit the budget.
    pub fn validate(&self, g: &Graph, h: &HopsetEdgeSet) -> Result<()> {
        let hopset: HashMap<(u32, u32), f64> =
            h.edges.iter().map(|e| ((e.x, e.y), e.w)).collect();
        let mut rows: HashMap<u32, Vec<f64>> = HashMap::new();
        let mut total = 0.0;
        let mut at = self.u;
        for hop in &self.hops {
            if hop.x != at {
                return Err(Error::LemmaStep(format!(
                    "hop starts at {} but the walk is at {at}",
                    hop.x
                )));
            }
            let key = (hop.x.min(hop.y), hop.x.max(hop.y));
            match hop.kind {
                HopKind::GraphEdge => {
                    let w = g.has_edge(hop.x, hop.y).ok_or_else(|| {
                        Error::LemmaStep(format!("graph edge ({},{}) does not exist", hop.x, hop.y))
                    })?;
                    if w != hop.w {
                        return Err(Error::LemmaStep(format!(
                            "graph edge ({},{}) has weight {w}, certificate says {}",
                            hop.x, hop.y, hop.w
                        )));
                    }
                }
                HopKind::PivotEdge { .. } | HopKind::BunchEdge { .. } => {
                    if !hopset.contains_key(&key) {
                        return Err(Error::LemmaStep(format!(
                            "hopset edge ({},{}) is missing ({:?})",
                            hop.x, hop.y, hop.kind
                        )));
                    }
                    let row = rows
                        .entry(hop.x)
                        .or_insert_with(|| g.dijkstra(hop.x).expect("valid source").dist);
                    let d = row[hop.y as usize];
                    if (d - hop.w).abs() > REL_EPS * d.abs().max(1.0) {
                        return Err(Error::LemmaStep(format!(
                            "hopset edge ({},{}) weight {} differs from the graph distance {d}",
                            hop.x, hop.y, hop.w
                        )));
                    }
                }
            }
            total += hop.w;
            at = hop.y;
        }
        if at != self.v {
            return Err(Error::LemmaStep(format!(
                "walk ends at {at}, expected {}",
                self.v
            )));
        }
        if (total - self.total_weight).abs() > REL_EPS * total.abs().max(1.0) {
            return Err(Error::LemmaStep(format!(
                "certificate weight {} does not match recomputed {total}",
                self.total_weight
            )));
        }
        if total > self.weight_bound * (1.0 + REL_EPS) {
            return Err(Error::LemmaStep(format!(
                "weight {total} exceeds the bound {}",
                self.weight_bound
            )));
        }
        if self.hops.len() as u32 > self.hop_bound {
            return Err(Error::LemmaStep(format!(
                "{} hops exceed the budget {}",
                self.hops.len(),
                self.hop_bound
            )));
        }
        for seg in &self.segments[..self.segments.len().saturating_sub(1)] {
            if seg.advance < seg.required_advance * (1.0 - REL_EPS) {
                return Err(Error::LemmaStep(format!(
                    "segment at {} advanced {} < required {}",
                    seg.head, seg.advance, seg.required_advance
                )));
            }
        }
        Ok(())
    }
}

/// Replay the constructive stretch argument for the pair `(u, v)` at
/// parameter `t`: walk the canonical shortest path, at each segment head
/// compute the score against radii rescaled to the pair, and emit the
/// three-hop jump (plus one graph edge for non-final segments).
#[allow(clippy::too_many_arguments)]
pub fn trace_jump_path(
    g: &Graph,
    h: &HopsetEdgeSet,
    sched: &ParamSchedule,
    la: &LevelAssignment,
    pt: &PivotTable,
    u: u32,
    v: u32,
    t: f64,
) -> Result<JumpCertificate> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::invalid("t must be positive"));
    }
    if la.depth != sched.levels || la.levels.len() != g.n() {
        return Err(Error::Inconsistent(
            "level assignment does not match graph and schedule".into(),
        ));
    }
    let base_radii = sched.with_t(t)?.radii;
    let r_top = *base_radii.last().unwrap();
    let hop_bound = (4.0 * r_top).ceil() as u32 + 3;
    if u == v {
        return Ok(JumpCertificate {
            u,
            v,
            t,
            d_uv: 0.0,
            hops: Vec::new(),
            segments: Vec::new(),
            total_weight: 0.0,
            weight_bound: 0.0,
            hop_bound,
        });
    }
    let tree = g.canonical_tree(u)?;
    let path = tree
        .path_vertices(v)
        .ok_or_else(|| Error::invalid(format!("vertices {u} and {v} are disconnected")))?;
    let d_uv = tree.dist[v as usize];
    // the rescaled radii satisfy the same recurrence, and turn the additive
    // 4 r_F slack into t * d(u,v)
    let scale = t * d_uv / (4.0 * r_top);
    let radii: Vec<f64> = base_radii.iter().map(|r| r * scale).collect();
    let hopset: HashMap<(u32, u32), f64> = h.edges.iter().map(|e| ((e.x, e.y), e.w)).collect();

    let mut hops: Vec<CertHop> = Vec::new();
    let mut segments: Vec<SegmentInfo> = Vec::new();
    let mut total = 0.0;

    let push = |hops: &mut Vec<CertHop>, x: u32, y: u32, w: f64, kind: HopKind| {
        if x != y {
            hops.push(CertHop { x, y, w, kind });
        }
    };
    let emit_jump = |hops: &mut Vec<CertHop>,
                     from: u32,
                     to: u32,
                     i: usize,
                     total: &mut f64|
     -> Result<()> {
        let lo = sched.f_inverse(i - 1);
        let p1 = pt.pivot[lo][from as usize].ok_or_else(|| {
            Error::LemmaStep(format!("pivot p_{lo}({from}) undefined despite score {i}"))
        })?;
        let p2 = pt.pivot[i - 1][to as usize].ok_or_else(|| {
            Error::LemmaStep(format!("pivot p_{}({to}) undefined despite score {i}", i - 1))
        })?;
        push(hops, from, p1, pt.dist[lo][from as usize], HopKind::PivotEdge { level: lo as u32 });
        *total += pt.dist[lo][from as usize];
        if p1 != p2 {
            let key = (p1.min(p2), p1.max(p2));
            let w = *hopset.get(&key).ok_or_else(|| {
                Error::LemmaStep(format!(
                    "bunch edge ({p1},{p2}) at level {} missing from the hopset (jump from {from} with score {i})",
                    i - 1
                ))
            })?;
            push(hops, p1, p2, w, HopKind::BunchEdge { level: (i - 1) as u32 });
            *total += w;
        }
        push(hops, p2, to, pt.dist[i - 1][to as usize], HopKind::PivotEdge { level: (i - 1) as u32 });
        *total += pt.dist[i - 1][to as usize];
        Ok(())
    };

    let last = path.len() - 1;
    let mut j = 0usize;
    loop {
        let head = path[j];
        let i = score(sched, pt, &radii, head);
        let thr = (radii[i] - radii[i - 1]) / 2.0 - radii[sched.f_inverse(i - 1)];
        let head_d = tree.dist[head as usize];
        let mut l = j;
        while l < last && tree.dist[path[l + 1] as usize] - head_d <= thr {
            l += 1;
        }
        let required = (4.0 / t) * radii[sched.f_inverse(i - 1)];
        if l == last {
            emit_jump(&mut hops, head, v, i, &mut total)?;
            segments.push(SegmentInfo {
                head,
                score: i,
                advance: d_uv - head_d,
                required_advance: 0.0,
            });
            break;
        }
        let mid = path[l];
        let next = path[l + 1];
        emit_jump(&mut hops, head, mid, i, &mut total)?;
        let w = tree.dist[next as usize] - tree.dist[mid as usize];
        push(&mut hops, mid, next, w, HopKind::GraphEdge);
        total += w;
        segments.push(SegmentInfo {
            head,
            score: i,
            advance: tree.dist[next as usize] - head_d,
            required_advance: required,
        });
        j = l + 1;
    }

    let cert = JumpCertificate {
        u,
        v,
        t,
        d_uv,
        hops,
        segments,
        total_weight: total,
        weight_bound: (2.0 * t + 3.0) * d_uv,
        hop_bound,
    };
    if cert.total_weight > cert.weight_bound * (1.0 + REL_EPS) {
        return Err(Error::LemmaStep(format!(
            "traced weight {} exceeds (2t+3) d = {}",
            cert.total_weight, cert.weight_bound
        )));
    }
    if cert.hops.len() as u32 > cert.hop_bound {
        return Err(Error::LemmaStep(format!(
            "traced {} hops exceed the budget {}",
            cert.hops.len(),
            cert.hop_bound
        )));
    }
    Ok(cert)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ShortcutCertificate {
    pub x: u32,
    pub y: u32,
    pub via: u32,
    pub level: usize,
    pub hops: Vec<CertHop>,
    pub total_weight: f64,
    pub weight_bound: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum ShortcutOutcome {
    /// The pivot-distance precondition does not hold for this pair.
    NotApplicable { pivot_dist: f64, required: f64 },
    Applicable(ShortcutCertificate),
}

/// Two-hop shortcut for pairs whose level-`c` pivot is far: finds the
/// minimal level whose pivot of one endpoint lands in the other endpoint's
/// bunch and certifies the resulting two-hop path at stretch `2c+1`.
pub fn trace_low_level_shortcut(
    g: &Graph,
    h: &HopsetEdgeSet,
    la: &LevelAssignment,
    pt: &PivotTable,
    x: u32,
    y: u32,
    c: usize,
) -> Result<ShortcutOutcome> {
    if c < 1 {
        return Err(Error::invalid("c must be >= 1"));
    }
    if x == y {
        return Err(Error::invalid("need two distinct endpoints"));
    }
    let row_x = g.dijkstra(x)?.dist;
    let d_xy = row_x[y as usize];
    if d_xy == INF {
        return Err(Error::invalid(format!("vertices {x} and {y} are disconnected")));
    }
    let pivot_dist = pt.threshold(x, c);
    let required = c as f64 * d_xy;
    if pivot_dist <= required {
        return Ok(ShortcutOutcome::NotApplicable {
            pivot_dist,
            required,
        });
    }
    let row_y = g.dijkstra(y)?.dist;
    let hopset: HashMap<(u32, u32), f64> = h.edges.iter().map(|e| ((e.x, e.y), e.w)).collect();
    let in_bunch = |owner_row: &[f64], owner: u32, w: u32, j: usize| {
        la.in_set(w, j) && owner_row[w as usize] < pt.threshold(owner, j + 1)
    };
    for j in 0..c.min(la.depth) {
        for (via, owner, owner_row, other, other_row) in [
            (pt.pivot[j][x as usize], x, &row_x, y, &row_y),
            (pt.pivot[j][y as usize], y, &row_y, x, &row_x),
        ] {
            let Some(via) = via else { continue };
            if !in_bunch(other_row, other, via, j) {
                continue;
            }
            // path x -> via -> y; the pivot edge belongs to `owner`, the
            // bunch edge to `other`
            let mut hops = Vec::new();
            let mut total = 0.0;
            let mut push = |a: u32, b: u32, w: f64, kind: HopKind| -> Result<()> {
                if a == b {
                    return Ok(());
                }
                let key = (a.min(b), a.max(b));
                if !hopset.contains_key(&key) {
                    return Err(Error::LemmaStep(format!(
                        "expected hopset edge ({a},{b}) at level {j} is missing"
                    )));
                }
                hops.push(CertHop { x: a, y: b, w, kind });
                total += w;
                Ok(())
            };
            let (first, second) = if owner == x {
                (
                    (x, via, owner_row[via as usize], HopKind::PivotEdge { level: j as u32 }),
                    (via, y, other_row[via as usize], HopKind::BunchEdge { level: j as u32 }),
                )
            } else {
                (
                    (x, via, other_row[via as usize], HopKind::BunchEdge { level: j as u32 }),
                    (via, y, owner_row[via as usize], HopKind::PivotEdge { level: j as u32 }),
                )
            };
            push(first.0, first.1, first.2, first.3)?;
            push(second.0, second.1, second.2, second.3)?;
            let bound = (2.0 * c as f64 + 1.0) * d_xy;
            if total > bound * (1.0 + REL_EPS) {
                return Err(Error::LemmaStep(format!(
                    "two-hop weight {total} exceeds (2c+1) d = {bound}"
                )));
            }
            return Ok(ShortcutOutcome::Applicable(ShortcutCertificate {
                x,
                y,
                via,
                level: j,
                hops,
                total_weight: total,
                weight_bound: bound,
            }));
        }
    }
    Err(Error::LemmaStep(format!(
        "no bunch-pivot meeting below level {c} for pair ({x},{y}) despite the pivot-distance precondition"
    )))
}
