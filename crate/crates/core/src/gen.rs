//! Seeded random graph generators for experiments and tests.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Random simple graph with `m` distinct edges and integer weights in
/// `1..=max_w` (stored as f64, so all distance arithmetic is exact).
pub fn random_weighted(n: usize, m: usize, max_w: u32, seed: u64) -> Result<Graph> {
    if max_w < 1 {
        return Err(Error::invalid("max_w must be >= 1"));
    }
    let edges = random_pairs(n, m, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x57ED_6E55);
    Graph::new(
        n,
        edges
            .into_iter()
            .map(|(u, v)| (u, v, rng.gen_range(1..=max_w) as f64))
            .collect(),
    )
}

pub fn random_unweighted(n: usize, m: usize, seed: u64) -> Result<Graph> {
    Graph::unweighted(n, random_pairs(n, m, seed)?)
}

fn random_pairs(n: usize, m: usize, seed: u64) -> Result<Vec<(u32, u32)>> {
    let max_m = n.saturating_mul(n.saturating_sub(1)) / 2;
    if m > max_m {
        return Err(Error::invalid(format!(
            "cannot place {m} distinct edges on {n} vertices"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::HashSet::new();
    let mut edges = Vec::with_capacity(m);
    while edges.len() < m {
        let u = rng.gen_range(0..n as u32);
        let v = rng.gen_range(0..n as u32);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if seen.insert(key) {
            edges.push(key);
        }
    }
    Ok(edges)
}

/// Random `degree`-regular graph with girth at least `min_girth`, by the
/// pairing model with rejection. Errors after `max_tries` failed attempts.
pub fn random_regular_with_girth(
    n: usize,
    degree: usize,
    min_girth: u32,
    seed: u64,
    max_tries: usize,
) -> Result<Graph> {
    if !(n * degree).is_multiple_of(2) {
        return Err(Error::invalid("n * degree must be even"));
    }
    if degree >= n {
        return Err(Error::invalid("degree must be below n"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    'attempt: for _ in 0..max_tries {
        let mut stubs: Vec<u32> = (0..n as u32)
            .flat_map(|v| std::iter::repeat_n(v, degree))
            .collect();
        stubs.shuffle(&mut rng);
        let mut seen = std::collections::HashSet::new();
        let mut edges = Vec::with_capacity(n * degree / 2);
        for pair in stubs.chunks(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v {
                continue 'attempt;
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                continue 'attempt;
            }
            edges.push(key);
        }
        let g = Graph::unweighted(n, edges)?;
        match crate::lowerbound::girth(&g)? {
            Some(girth) if girth < min_girth => continue 'attempt,
            _ => return Ok(g),
        }
    }
    Err(Error::Infeasible(format!(
        "no {degree}-regular graph with girth >= {min_girth} on {n} vertices found in {max_tries} tries"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        let a = random_weighted(50, 120, 10, 7).unwrap();
        let b = random_weighted(50, 120, 10, 7).unwrap();
        assert_eq!(a.to_edge_list_string(), b.to_edge_list_string());
        let c = random_weighted(50, 120, 10, 8).unwrap();
        assert_ne!(a.to_edge_list_string(), c.to_edge_list_string());
    }

    #[test]
    fn too_many_edges_rejected() {
        assert!(random_unweighted(4, 7, 1).is_err());
        assert!(random_unweighted(4, 6, 1).is_ok());
    }

    #[test]
    fn regular_generator_meets_degree_and_girth() {
        let g = random_regular_with_girth(40, 3, 5, 11, 20_000).unwrap();
        for u in 0..40u32 {
            assert_eq!(g.neighbors(u).len(), 3);
        }
        let girth = crate::lowerbound::girth(&g).unwrap().unwrap();
        assert!(girth >= 5, "girth {girth}");
    }
}
