//! Randomized level sampling and the shared geometric machinery: pivots,
//! bunches, half bunches, and the score function.
//!
//! Levels are sampled per vertex as the number of consecutive promotion
//! successes, so `A_j = {u : level(u) >= j}` forms a nested chain. A vertex
//! that wins every round would land in `A_F`; construction treats the chain
//! as ending at `F-1` (the top threshold is infinite for everyone), which
//! keeps the bunch conventions uniform for every sample. The raw level and
//! whether the top set was hit are kept for reporting and statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, INF};
use crate::rng::keyed_unit;
use crate::schedule::ParamSchedule;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelAssignment {
    /// Raw sampled level per vertex, in `[0, F]`.
    pub levels: Vec<u32>,
    pub seed: Option<u64>,
    /// Hierarchy depth F.
    pub depth: usize,
    /// Whether any vertex reached the raw top level F.
    pub top_nonempty: bool,
}

impl LevelAssignment {
    /// Level used by the construction: raw level capped at `F-1`.
    pub fn effective_level(&self, u: u32) -> usize {
        (self.levels[u as usize] as usize).min(self.depth - 1)
    }

    /// Membership in the effective `A_j`; `A_F` is always empty.
    pub fn in_set(&self, u: u32, j: usize) -> bool {
        j < self.depth && self.effective_level(u) >= j
    }

    /// Vertices of the effective `A_j`, ascending.
    pub fn set_members(&self, j: usize) -> Vec<u32> {
        (0..self.levels.len() as u32)
            .filter(|&u| self.in_set(u, j))
            .collect()
    }

    /// Vertices of the raw `A_j` (no top cap), ascending.
    pub fn raw_set_members(&self, j: usize) -> Vec<u32> {
        (0..self.levels.len() as u32)
            .filter(|&u| self.levels[u as usize] as usize >= j)
            .collect()
    }
}

/// Sample a level per vertex: independent promotions with probability
/// `n^{-lambda_j/k}` at round `j = 0..F-1`. Each decision is a pure function
/// of `(seed, vertex, round)`.
pub fn sample_levels(g: &Graph, sched: &ParamSchedule, seed: u64) -> LevelAssignment {
    let n = g.n();
    let probs: Vec<f64> = (0..sched.levels).map(|j| sched.sampling_prob(n, j)).collect();
    let mut levels = vec![0u32; n];
    let mut top_nonempty = false;
    for u in 0..n as u32 {
        let mut lvl = 0u32;
        for (j, &p) in probs.iter().enumerate() {
            if keyed_unit(seed, u as u64, j as u64) < p {
                lvl = j as u32 + 1;
            } else {
                break;
            }
        }
        if lvl as usize == sched.levels {
            top_nonempty = true;
        }
        levels[u as usize] = lvl;
    }
    LevelAssignment {
        levels,
        seed: Some(seed),
        depth: sched.levels,
        top_nonempty,
    }
}

/// Explicit level table, used by the lower-bound experiments.
pub fn forced_levels(sched: &ParamSchedule, table: Vec<u32>) -> Result<LevelAssignment> {
    let depth = sched.levels;
    for (u, &lvl) in table.iter().enumerate() {
        if lvl as usize > depth {
            return Err(Error::invalid(format!(
                "forced level {lvl} at vertex {u} exceeds F={depth}"
            )));
        }
    }
    let top_nonempty = table.iter().any(|&l| l as usize == depth);
    Ok(LevelAssignment {
        levels: table,
        seed: None,
        depth,
        top_nonempty,
    })
}

/// Pivot ids and distances per level `j in [0, F]` and vertex. Row `F` is
/// all-undefined (the effective top set is empty).
#[derive(Debug, Clone)]
pub struct PivotTable {
    pub pivot: Vec<Vec<Option<u32>>>,
    pub dist: Vec<Vec<f64>>,
}

impl PivotTable {
    pub fn depth(&self) -> usize {
        self.pivot.len() - 1
    }

    /// `d(u, p_j(u))`, infinite when the pivot is undefined or `j > F`.
    pub fn threshold(&self, u: u32, j: usize) -> f64 {
        if j > self.depth() {
            INF
        } else {
            self.dist[j][u as usize]
        }
    }
}

/// One multi-source run per level; ties go to the smallest pivot id.
pub fn compute_pivots(g: &Graph, la: &LevelAssignment) -> Result<PivotTable> {
    let n = g.n();
    let depth = la.depth;
    let mut pivot: Vec<Vec<Option<u32>>> = Vec::with_capacity(depth + 1);
    let mut dist: Vec<Vec<f64>> = Vec::with_capacity(depth + 1);
    // level 0: every vertex is its own pivot
    pivot.push((0..n as u32).map(Some).collect());
    dist.push(vec![0.0; n]);
    for j in 1..=depth {
        let sources = la.set_members(j);
        if sources.is_empty() {
            pivot.push(vec![None; n]);
            dist.push(vec![INF; n]);
            continue;
        }
        let (d, nearest) = g.multi_source_dijkstra(&sources)?;
        pivot.push(nearest);
        dist.push(d);
    }
    Ok(PivotTable { pivot, dist })
}

/// Bunch of `u` at level `j`: vertices of the effective `A_j` strictly
/// closer to `u` than its level-`j+1` pivot (half that radius for half
/// bunches). Members are listed with their distances, ascending by id.
#[derive(Debug, Clone)]
pub struct Bunch {
    pub owner: u32,
    pub level: usize,
    pub half: bool,
    pub members: Vec<(u32, f64)>,
}

pub fn compute_bunch(
    g: &Graph,
    la: &LevelAssignment,
    pt: &PivotTable,
    u: u32,
    j: usize,
    half: bool,
) -> Result<Bunch> {
    if j > la.depth {
        return Err(Error::invalid(format!(
            "bunch level {j} out of range (F={})",
            la.depth
        )));
    }
    let mut thr = pt.threshold(u, j + 1);
    if half && thr < INF {
        thr /= 2.0;
    }
    let mut members = Vec::new();
    if thr > 0.0 {
        let tree = g.canonical_tree_bounded(u, thr)?;
        for v in 0..g.n() as u32 {
            if la.in_set(v, j) && tree.dist[v as usize] < thr {
                members.push((v, tree.dist[v as usize]));
            }
        }
    }
    Ok(Bunch {
        owner: u,
        level: j,
        half,
        members,
    })
}

/// The score of `u` for the given radii: the largest `i > 0` whose pivot
/// lies beyond `r_i` while every pivot in `[f^{-1}(i-1), i-1]` lies within
/// its radius. Undefined pivots count as infinitely far, which makes the
/// score well defined and positive for every vertex.
pub fn score(sched: &ParamSchedule, pt: &PivotTable, radii: &[f64], u: u32) -> usize {
    let depth = sched.levels;
    debug_assert_eq!(radii.len(), depth + 1);
    for i in (1..=depth).rev() {
        if pt.threshold(u, i) <= radii[i] {
            continue;
        }
        let lo = sched.f_inverse(i - 1);
        debug_assert!(lo < i, "f^{{-1}}(i-1) must not exceed i-1");
        if (lo..i).all(|j| pt.threshold(u, j) <= radii[j]) {
            return i;
        }
    }
    unreachable!("score is always defined: the top threshold is infinite");
}
