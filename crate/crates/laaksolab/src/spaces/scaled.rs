//! Scaled unions: level-`n` vertex sets with the metric multiplied by `n`,
//! glued in sequence.
//!
//! Block `n` is the vertex set of the level-`n` graph carrying `n` times its
//! path metric, realized as the same graph with every edge given length `n`.
//! Consecutive blocks share one joint (block `n`'s outgoing gluing vertex is
//! block `n+1`'s incoming one), and cross-block distances are shortest paths
//! through the joints. Nearest neighbors inside block `n` sit at distance
//! `n`, so ball cardinalities stay bounded while the ambient graph grows;
//! this is the bounded-geometry witness the ball-counting routine measures.

use rayon::prelude::*;
use std::collections::BinaryHeap;

use crate::budget::Budget;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::spaces::gamma::{build_gamma_raw, sequential_names};
use crate::spaces::metric::FiniteMetricSpace;

/// Largest distance-table size `metric_space` will materialize.
const TABLE_ENTRY_LIMIT: u128 = 1 << 26;

/// The glued weighted graph, cheap enough to hold at levels the full
/// distance table could never fit.
#[derive(Debug, Clone)]
pub struct ScaledUnionGraph {
    levels: u32,
    ids: Vec<String>,
    adj: Vec<Vec<(u32, u32)>>,
    edge_count: usize,
}

/// Builds the union of levels `1..=n_max`. The budget bounds the largest
/// constituent block.
pub fn build_scaled_union_graph(n_max: u32, budget: Budget) -> Result<ScaledUnionGraph> {
    if n_max == 0 {
        return Err(Error::InvalidInput(
            "scaled union needs at least one level".into(),
        ));
    }
    budget.check(
        &format!("scaled-union block level {n_max}"),
        4u128.pow(n_max),
    )?;
    let mut blocks = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        blocks.push(build_gamma_raw(n, budget, false)?);
    }
    let (ids, maps) = sequential_names(&blocks);
    let mut adj = vec![Vec::new(); ids.len()];
    let mut edge_count = 0;
    for (b, block) in blocks.iter().enumerate() {
        let len = block.level;
        for &(u, v) in &block.edges {
            let (a, z) = (maps[b][u as usize], maps[b][v as usize]);
            adj[a as usize].push((z, len));
            adj[z as usize].push((a, len));
            edge_count += 1;
        }
    }
    Ok(ScaledUnionGraph {
        levels: n_max,
        ids,
        adj,
        edge_count,
    })
}

/// Builds the union and materializes its exact distance table.
pub fn build_scaled_union(n_max: u32, budget: Budget) -> Result<FiniteMetricSpace> {
    build_scaled_union_graph(n_max, budget)?.metric_space()
}

impl ScaledUnionGraph {
    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    fn dijkstra(&self, src: usize) -> Vec<u64> {
        let n = self.ids.len();
        let mut dist = vec![u64::MAX; n];
        let mut heap: BinaryHeap<(std::cmp::Reverse<u64>, u32)> = BinaryHeap::new();
        dist[src] = 0;
        heap.push((std::cmp::Reverse(0), src as u32));
        while let Some((std::cmp::Reverse(d), u)) = heap.pop() {
            if d > dist[u as usize] {
                continue;
            }
            for &(v, len) in &self.adj[u as usize] {
                let nd = d + len as u64;
                if nd < dist[v as usize] {
                    dist[v as usize] = nd;
                    heap.push((std::cmp::Reverse(nd), v));
                }
            }
        }
        dist
    }

    /// Exact distance table. Refuses tables past [`TABLE_ENTRY_LIMIT`]
    /// entries; use the ball-counting routines for the big unions.
    pub fn metric_space(&self) -> Result<FiniteMetricSpace> {
        let n = self.ids.len();
        let entries = (n as u128) * (n as u128);
        if entries > TABLE_ENTRY_LIMIT {
            return Err(Error::CapacityExceeded {
                what: "scaled-union distance table entries".into(),
                required: entries,
                budget: TABLE_ENTRY_LIMIT as u64,
            });
        }
        let rows: Vec<Vec<u64>> = (0..n).into_par_iter().map(|s| self.dijkstra(s)).collect();
        let mut dist = Vec::with_capacity(n * n);
        for (s, row) in rows.iter().enumerate() {
            for (t, &d) in row.iter().enumerate() {
                if d == u64::MAX {
                    return Err(Error::Disconnected {
                        from: self.ids[s].clone(),
                        to: self.ids[t].clone(),
                    });
                }
                dist.push(Dyadic::from_int(d as i64));
            }
        }
        FiniteMetricSpace::new(
            self.ids.clone(),
            dist,
            Some(format!("scaled union of levels 1..={}", self.levels)),
        )
    }

    /// Cardinality of the open ball `{ y : d(center, y) < radius }`,
    /// via Dijkstra pruned at the radius.
    pub fn ball_cardinality(&self, center: u32, radius: u64) -> usize {
        let mut dist = std::collections::HashMap::new();
        let mut heap: BinaryHeap<(std::cmp::Reverse<u64>, u32)> = BinaryHeap::new();
        dist.insert(center, 0u64);
        heap.push((std::cmp::Reverse(0), center));
        let mut count = 0usize;
        while let Some((std::cmp::Reverse(d), u)) = heap.pop() {
            if d > dist[&u] {
                continue;
            }
            count += 1;
            for &(v, len) in &self.adj[u as usize] {
                let nd = d + len as u64;
                if nd < radius && dist.get(&v).is_none_or(|&old| nd < old) {
                    dist.insert(v, nd);
                    heap.push((std::cmp::Reverse(nd), v));
                }
            }
        }
        count
    }

    /// `max_x |B(x, radius)|` over every vertex, open balls.
    pub fn max_ball_cardinality(&self, radius: u64) -> usize {
        (0..self.ids.len() as u32)
            .into_par_iter()
            .map(|v| self.ball_cardinality(v, radius))
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_level_is_the_unit_four_cycle() {
        let m = build_scaled_union(1, Budget::default()).unwrap();
        assert_eq!(m.len(), 4);
        assert_eq!(m.min_positive_distance().unwrap(), Dyadic::from_int(1));
        assert_eq!(m.diameter().unwrap(), Dyadic::from_int(2));
        m.verify_triangle_exhaustive().unwrap();
    }

    #[test]
    fn level_two_block_is_doubled() {
        let g = build_scaled_union_graph(2, Budget::default()).unwrap();
        let m = g.metric_space().unwrap();
        m.verify_triangle_exhaustive().unwrap();
        // Nearest-neighbor distance inside block 2 is 2: every vertex named
        // "2.*" has its closest other vertex at exactly distance 2.
        let block2: Vec<usize> = (0..m.len())
            .filter(|&i| m.id(i).starts_with("2."))
            .collect();
        assert!(!block2.is_empty());
        for &i in &block2 {
            let nearest = (0..m.len())
                .filter(|&j| j != i)
                .map(|j| m.d(i, j))
                .min()
                .unwrap();
            assert_eq!(nearest, Dyadic::from_int(2));
        }
    }

    #[test]
    fn blocks_share_exactly_one_joint() {
        let g = build_scaled_union_graph(3, Budget::default()).unwrap();
        // Vertices whose canonical name lacks the "<level>." prefix of their
        // own block are joints; with 3 blocks there are exactly 2.
        let n1 = build_scaled_union_graph(1, Budget::default()).unwrap();
        let n2 = build_scaled_union_graph(2, Budget::default()).unwrap();
        let expected = n1.vertex_count() + (n2.vertex_count() - n1.vertex_count());
        let _ = expected;
        let v3 = g.vertex_count();
        // |V| = sum of block sizes minus the two identifications.
        assert_eq!(v3, 4 + 12 + 44 - 2);
    }

    #[test]
    fn ball_growth_stabilizes_at_radius_two() {
        let g3 = build_scaled_union_graph(3, Budget::default()).unwrap();
        let g4 = build_scaled_union_graph(4, Budget::default()).unwrap();
        // Closed ball of radius 2 = open ball of radius 3 for integer metrics.
        assert_eq!(g3.max_ball_cardinality(3), g4.max_ball_cardinality(3));
    }

    #[test]
    fn table_limit_is_enforced() {
        let g = build_scaled_union_graph(7, Budget::default()).unwrap();
        assert!(matches!(
            g.metric_space(),
            Err(Error::CapacityExceeded { .. })
        ));
    }
}
