//! Recursive diamond-style level graphs and their glued chains.
//!
//! The level-0 graph is a single unit edge. The level-`n+1` graph takes four
//! copies of the level-`n` graph and identifies copy `i`'s outgoing gluing
//! vertex with copy `i+1 (mod 4)`'s incoming one, producing a 4-cycle of
//! blocks. Each level-`n` graph has `4^n` edges, `(2*4^n + 4)/3` vertices,
//! diameter `2^n`, and exactly two *primary pairs*: vertex pairs at distance
//! `2^n` whose standalone valence is `2^n`.
//!
//! Gluing changes valences, so primary pairs of sub-copies are never
//! recovered by inspection; instead every graph carries a *copy index*
//! mapping each address over `{0,1,2,3}` to the vertex set of that sub-copy
//! together with the images of its two primary pairs. The gluing pair at
//! every level is the first primary pair in lexicographic id order, and
//! vertex ids are canonical strings, so identical inputs rebuild
//! bit-identical graphs.

use std::collections::{BTreeMap, HashMap};

use crate::budget::Budget;
use crate::certifier::Quadruple;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::spaces::metric::{metric_from_apsp, FiniteMetricSpace};

/// One entry of the copy index: a sub-copy of the level-`level` graph.
///
/// `members[j]` is the ambient index of the standalone graph's `j`-th vertex,
/// so the vector is the canonical isomorphism, not a sorted set. Primary
/// pairs keep the standalone order: `primary_pairs[0]` is the image of the
/// standalone first (gluing) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubCopy {
    pub level: u32,
    pub members: Vec<u32>,
    pub primary_pairs: [(u32, u32); 2],
}

/// A finite unit-edge graph with hierarchy addresses and primary pairs.
///
/// Houses both the single-level graphs (`build_gamma`) and their glued
/// chains (`build_chain`). Vertex ids are sorted, so index order equals
/// lexicographic id order everywhere.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelGraph {
    level: u32,
    ids: Vec<String>,
    edges: Vec<(u32, u32)>,
    primary_pairs: Vec<(u32, u32)>,
    copy_index: BTreeMap<String, SubCopy>,
}

impl LevelGraph {
    pub(crate) fn from_parts(
        level: u32,
        ids: Vec<String>,
        edges: Vec<(u32, u32)>,
        primary_pairs: Vec<(u32, u32)>,
        copy_index: BTreeMap<String, SubCopy>,
    ) -> Result<LevelGraph> {
        let n = ids.len() as u32;
        if ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "vertex ids are not sorted and unique".into(),
            ));
        }
        for &(u, v) in &edges {
            if u >= v {
                return Err(Error::InvalidInput(format!(
                    "edge ({u}, {v}) is not in canonical order"
                )));
            }
            if v >= n {
                return Err(Error::InvalidInput(format!("edge ({u}, {v}) out of range")));
            }
        }
        if edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "edges are not sorted and unique".into(),
            ));
        }
        let pair_ok = |&(a, b): &(u32, u32)| a < n && b < n && a != b;
        if !primary_pairs.iter().all(pair_ok) {
            return Err(Error::InvalidInput("primary pair out of range".into()));
        }
        for (addr, sc) in &copy_index {
            if sc.members.iter().any(|&v| v >= n) || !sc.primary_pairs.iter().all(pair_ok) {
                return Err(Error::InvalidInput(format!(
                    "copy index entry `{addr}` out of range"
                )));
            }
        }
        Ok(LevelGraph {
            level,
            ids,
            edges,
            primary_pairs,
            copy_index,
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, v: u32) -> &str {
        &self.ids[v as usize]
    }

    pub fn index_of(&self, id: &str) -> Option<u32> {
        self.ids.binary_search_by(|x| x.as_str().cmp(id)).ok().map(|i| i as u32)
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn primary_pairs(&self) -> &[(u32, u32)] {
        &self.primary_pairs
    }

    pub fn copy_index(&self) -> &BTreeMap<String, SubCopy> {
        &self.copy_index
    }

    pub fn subcopy(&self, address: &str) -> Result<&SubCopy> {
        self.copy_index
            .get(address)
            .ok_or_else(|| Error::UnknownAddress {
                address: address.to_string(),
            })
    }

    /// Valence in this graph as it stands (ambient, not standalone).
    pub fn valence(&self, v: u32) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.ids.len()];
        for &(u, v) in &self.edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        adj
    }

    /// Exact integer path metric, one BFS per source.
    pub fn path_metric(&self) -> Result<FiniteMetricSpace> {
        metric_from_apsp(
            self.ids.clone(),
            &self.edges,
            Some(format!("path metric, level {} graph", self.level)),
        )
    }

    fn bfs(&self, adj: &[Vec<u32>], src: u32) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.ids.len()];
        let mut queue = std::collections::VecDeque::new();
        dist[src as usize] = 0;
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            for &v in &adj[u as usize] {
                if dist[v as usize] == u32::MAX {
                    dist[v as usize] = du + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// The four primary vertices of the sub-copy at `address`, arranged as a
    /// diamond: `(x1, x3)` is the first primary pair, `(x2, x4)` the second,
    /// diagonals at distance `2^k` and all four sides at `2^(k-1)`, measured
    /// in the ambient graph and re-verified here.
    pub fn primary_quadruple(&self, address: &str) -> Result<Quadruple> {
        let sc = self.subcopy(address)?;
        if sc.level == 0 {
            return Err(Error::NoQuadrupleAtLevelZero {
                address: address.to_string(),
            });
        }
        let (a1, a3) = sc.primary_pairs[0];
        let (a2, a4) = sc.primary_pairs[1];
        let adj = self.adjacency();
        let d1 = self.bfs(&adj, a1);
        let d3 = self.bfs(&adj, a3);
        let c = 1u32 << sc.level;
        let side = c / 2;
        let diamond_ok = d1[a3 as usize] == c
            && {
                let d2 = self.bfs(&adj, a2);
                d2[a4 as usize] == c
            }
            && d1[a2 as usize] == side
            && d1[a4 as usize] == side
            && d3[a2 as usize] == side
            && d3[a4 as usize] == side;
        if !diamond_ok {
            return Err(Error::Degenerate(format!(
                "primary vertices at `{address}` do not form the diamond pattern"
            )));
        }
        Quadruple::new(
            [
                self.id(a1).to_string(),
                self.id(a2).to_string(),
                self.id(a3).to_string(),
                self.id(a4).to_string(),
            ],
            Dyadic::from_int(c as i64),
        )
    }

    /// Address of the unique child copy whose primary pair is `side`.
    ///
    /// `side` must be one of the four side pairs of the quadruple at
    /// `address`; level-0 children are rejected because they carry no
    /// quadruple to continue with.
    pub fn child_address(&self, address: &str, side: (&str, &str)) -> Result<String> {
        let q = self.primary_quadruple(address)?;
        let norm = |a: &str, b: &str| -> (String, String) {
            if a <= b {
                (a.to_string(), b.to_string())
            } else {
                (b.to_string(), a.to_string())
            }
        };
        let target = norm(side.0, side.1);
        let is_side = q
            .side_pairs()
            .iter()
            .any(|(a, b)| norm(a, b) == target);
        if !is_side {
            return Err(Error::NotASidePair {
                address: address.to_string(),
                a: side.0.to_string(),
                b: side.1.to_string(),
            });
        }
        let ta = self.index_of(&target.0).expect("side id in graph");
        let tb = self.index_of(&target.1).expect("side id in graph");
        for digit in 0..4u8 {
            let child = format!("{address}{digit}");
            let Some(sc) = self.copy_index.get(&child) else {
                continue;
            };
            let matches = sc
                .primary_pairs
                .iter()
                .any(|&(a, b)| (a, b) == (ta, tb) || (b, a) == (ta, tb));
            if matches {
                if sc.level == 0 {
                    return Err(Error::NoQuadrupleAtLevelZero { address: child });
                }
                return Ok(child);
            }
        }
        Err(Error::NotASidePair {
            address: address.to_string(),
            a: side.0.to_string(),
            b: side.1.to_string(),
        })
    }
}

/// Construction-time form: copy index optional so bulk consumers (the scaled
/// union) can skip it.
#[derive(Clone)]
pub(crate) struct RawGraph {
    pub level: u32,
    pub ids: Vec<String>,
    pub edges: Vec<(u32, u32)>,
    pub primary_pairs: [(u32, u32); 2],
    pub copy_index: Option<BTreeMap<String, SubCopy>>,
}

fn gamma0(with_index: bool) -> RawGraph {
    let copy_index = with_index.then(|| {
        let mut m = BTreeMap::new();
        m.insert(
            String::new(),
            SubCopy {
                level: 0,
                members: vec![0, 1],
                primary_pairs: [(0, 1), (0, 1)],
            },
        );
        m
    });
    RawGraph {
        level: 0,
        ids: vec!["p".to_string(), "q".to_string()],
        edges: vec![(0, 1)],
        // Level 0 degenerates: both primary pairs are the single edge.
        primary_pairs: [(0, 1), (0, 1)],
        copy_index,
    }
}

/// Glues four copies of `sub` in a cycle along its first primary pair.
fn glue_four(sub: &RawGraph) -> RawGraph {
    let (ps, qs) = sub.primary_pairs[0];
    let n_sub = sub.ids.len();
    let name = |i: usize, v: u32| format!("{i}.{}", sub.ids[v as usize]);
    // Canonical representative of each merged class: the lexicographically
    // least of its spellings. Copy i's q merges with copy i+1's p.
    let cname = |i: usize, v: u32| -> String {
        if v == qs {
            if i < 3 {
                name(i, qs)
            } else {
                name(0, ps)
            }
        } else if v == ps {
            if i > 0 {
                name(i - 1, qs)
            } else {
                name(0, ps)
            }
        } else {
            name(i, v)
        }
    };

    let mut spelled: Vec<String> = Vec::with_capacity(4 * n_sub);
    for i in 0..4 {
        for v in 0..n_sub {
            spelled.push(cname(i, v as u32));
        }
    }
    let mut ids: Vec<String> = spelled.clone();
    ids.sort_unstable();
    ids.dedup();
    let index: HashMap<&str, u32> = ids
        .iter()
        .enumerate()
        .map(|(k, s)| (s.as_str(), k as u32))
        .collect();
    let m = |i: usize, v: u32| -> u32 { index[spelled[i * n_sub + v as usize].as_str()] };

    let mut edges = Vec::with_capacity(4 * sub.edges.len());
    for i in 0..4 {
        for &(u, v) in &sub.edges {
            let (a, b) = (m(i, u), m(i, v));
            edges.push(if a < b { (a, b) } else { (b, a) });
        }
    }
    edges.sort_unstable();
    debug_assert!(edges.windows(2).all(|w| w[0] != w[1]), "duplicate edge");

    // The joints: J_i = copy i's q = copy i+1's p. Opposite joints are the
    // new primary pairs.
    let j: Vec<u32> = (0..4).map(|i| m(i, qs)).collect();
    let order = |a: u32, b: u32| if a < b { (a, b) } else { (b, a) };
    let mut pairs = [order(j[0], j[2]), order(j[1], j[3])];
    pairs.sort_unstable();

    let copy_index = sub.copy_index.as_ref().map(|sub_index| {
        let mut out = BTreeMap::new();
        out.insert(
            String::new(),
            SubCopy {
                level: sub.level + 1,
                members: (0..ids.len() as u32).collect(),
                primary_pairs: pairs,
            },
        );
        for i in 0..4 {
            for (addr, sc) in sub_index {
                let members = sc.members.iter().map(|&v| m(i, v)).collect();
                let primary_pairs = sc
                    .primary_pairs
                    .map(|(a, b)| order(m(i, a), m(i, b)));
                out.insert(
                    format!("{i}{addr}"),
                    SubCopy {
                        level: sc.level,
                        members,
                        primary_pairs,
                    },
                );
            }
        }
        out
    });

    RawGraph {
        level: sub.level + 1,
        ids,
        edges,
        primary_pairs: pairs,
        copy_index,
    }
}

pub(crate) fn build_gamma_raw(n: u32, budget: Budget, with_index: bool) -> Result<RawGraph> {
    budget.check(&format!("level-{n} graph"), 4u128.pow(n))?;
    let mut g = gamma0(with_index);
    for _ in 0..n {
        g = glue_four(&g);
    }
    Ok(g)
}

/// Builds the level-`n` graph with its full copy index.
pub fn build_gamma(n: u32, budget: Budget) -> Result<LevelGraph> {
    let raw = build_gamma_raw(n, budget, true)?;
    LevelGraph::from_parts(
        raw.level,
        raw.ids,
        raw.edges,
        raw.primary_pairs.to_vec(),
        raw.copy_index.expect("index requested"),
    )
}

/// Canonical names and per-block vertex maps for a run of blocks glued in
/// sequence at their gluing pairs (block `k`'s q identified with block
/// `k+1`'s p). Shared by the chain and the scaled union.
pub(crate) fn sequential_names(blocks: &[RawGraph]) -> (Vec<String>, Vec<Vec<u32>>) {
    let n_blocks = blocks.len();
    let label = |b: usize, v: u32| format!("{}.{}", blocks[b].level, blocks[b].ids[v as usize]);
    let cname = |b: usize, v: u32| -> String {
        let (p, q) = blocks[b].primary_pairs[0];
        if v == q && b + 1 < n_blocks {
            let (p_next, _) = blocks[b + 1].primary_pairs[0];
            label(b, v).min(label(b + 1, p_next))
        } else if v == p && b > 0 {
            let (_, q_prev) = blocks[b - 1].primary_pairs[0];
            label(b, v).min(label(b - 1, q_prev))
        } else {
            label(b, v)
        }
    };
    let mut spelled: Vec<Vec<String>> = Vec::with_capacity(n_blocks);
    for (b, block) in blocks.iter().enumerate() {
        spelled.push((0..block.ids.len() as u32).map(|v| cname(b, v)).collect());
    }
    let mut ids: Vec<String> = spelled.iter().flatten().cloned().collect();
    ids.sort_unstable();
    ids.dedup();
    let index: HashMap<&str, u32> = ids
        .iter()
        .enumerate()
        .map(|(k, s)| (s.as_str(), k as u32))
        .collect();
    let maps = spelled
        .iter()
        .map(|names| names.iter().map(|s| index[s.as_str()]).collect())
        .collect();
    (ids, maps)
}

/// Glues levels 1..=N in sequence. Block addresses in the copy index are
/// `"<level>/<address-within-block>"`. For a single block the result is
/// exactly `build_gamma(1)`.
pub fn build_chain(n_blocks: u32, budget: Budget) -> Result<LevelGraph> {
    if n_blocks == 0 {
        return Err(Error::InvalidInput("chain needs at least one block".into()));
    }
    // The budget bounds the largest constituent block.
    budget.check(
        &format!("chain block level {n_blocks}"),
        4u128.pow(n_blocks),
    )?;
    if n_blocks == 1 {
        return build_gamma(1, budget);
    }
    let mut blocks = Vec::with_capacity(n_blocks as usize);
    let mut g = gamma0(true);
    for _ in 0..n_blocks {
        g = glue_four(&g);
        blocks.push(g.clone());
    }
    let (ids, maps) = sequential_names(&blocks);
    let order = |a: u32, b: u32| if a < b { (a, b) } else { (b, a) };
    let mut edges = Vec::new();
    for (b, block) in blocks.iter().enumerate() {
        for &(u, v) in &block.edges {
            let (a, z) = (maps[b][u as usize], maps[b][v as usize]);
            edges.push(order(a, z));
        }
    }
    edges.sort_unstable();
    debug_assert!(edges.windows(2).all(|w| w[0] != w[1]), "duplicate edge");

    let mut copy_index = BTreeMap::new();
    for (b, block) in blocks.iter().enumerate() {
        let level = block.level;
        for (addr, sc) in block.copy_index.as_ref().expect("index requested") {
            let members = sc.members.iter().map(|&v| maps[b][v as usize]).collect();
            let primary_pairs = sc
                .primary_pairs
                .map(|(x, y)| order(maps[b][x as usize], maps[b][y as usize]));
            copy_index.insert(
                format!("{level}/{addr}"),
                SubCopy {
                    level: sc.level,
                    members,
                    primary_pairs,
                },
            );
        }
    }
    LevelGraph::from_parts(n_blocks, ids, edges, Vec::new(), copy_index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Dyadic;

    fn budget() -> Budget {
        Budget::default()
    }

    /// Independent counting oracle: V(0) = 2, V(n+1) = 4 V(n) - 4.
    fn vertex_recursion(n: u32) -> u64 {
        let mut v = 2u64;
        for _ in 0..n {
            v = 4 * v - 4;
        }
        v
    }

    #[test]
    fn gamma0_is_a_single_edge() {
        let g = build_gamma(0, budget()).unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.primary_pairs(), &[(0, 1), (0, 1)]);
        let m = g.path_metric().unwrap();
        assert_eq!(m.d(0, 1), Dyadic::from_int(1));
    }

    #[test]
    fn gamma1_is_the_four_cycle() {
        let g = build_gamma(1, budget()).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.primary_pairs().len(), 2);
        let m = g.path_metric().unwrap();
        for &(a, b) in g.primary_pairs() {
            assert_eq!(m.d(a as usize, b as usize), Dyadic::from_int(2));
        }
        // Antipodal pairs partition the 4 vertices.
        let (p0, p1) = (g.primary_pairs()[0], g.primary_pairs()[1]);
        let mut all = vec![p0.0, p0.1, p1.0, p1.1];
        all.sort_unstable();
        assert_eq!(all, vec![0, 1, 2, 3]);
    }

    #[test]
    fn counts_match_recursion_oracle() {
        for n in 0..=5 {
            let g = build_gamma(n, budget()).unwrap();
            assert_eq!(g.edge_count() as u64, 4u64.pow(n));
            assert_eq!(g.vertex_count() as u64, vertex_recursion(n));
            assert_eq!(g.vertex_count() as u64, (2 * 4u64.pow(n) + 4) / 3);
        }
    }

    #[test]
    fn gamma3_counts_and_diameter() {
        let g = build_gamma(3, budget()).unwrap();
        assert_eq!(g.edge_count(), 64);
        assert_eq!(g.vertex_count(), 44);
        let m = g.path_metric().unwrap();
        assert_eq!(m.diameter().unwrap(), Dyadic::from_int(8));
    }

    /// Floyd-Warshall as an independent APSP oracle for small levels.
    #[test]
    fn bfs_matches_floyd_warshall() {
        for n in 0..=3 {
            let g = build_gamma(n, budget()).unwrap();
            let m = g.path_metric().unwrap();
            let v = g.vertex_count();
            let inf = u32::MAX / 2;
            let mut fw = vec![inf; v * v];
            for i in 0..v {
                fw[i * v + i] = 0;
            }
            for &(a, b) in g.edges() {
                fw[a as usize * v + b as usize] = 1;
                fw[b as usize * v + a as usize] = 1;
            }
            for k in 0..v {
                for i in 0..v {
                    for j in 0..v {
                        let via = fw[i * v + k] + fw[k * v + j];
                        if via < fw[i * v + j] {
                            fw[i * v + j] = via;
                        }
                    }
                }
            }
            for i in 0..v {
                for j in 0..v {
                    assert_eq!(m.d(i, j), Dyadic::from_int(fw[i * v + j] as i64));
                }
            }
        }
    }

    #[test]
    fn primary_vertices_have_standalone_valence_two_to_n() {
        for n in 1..=4 {
            let g = build_gamma(n, budget()).unwrap();
            for &(a, b) in g.primary_pairs() {
                assert_eq!(g.valence(a), 1 << n);
                assert_eq!(g.valence(b), 1 << n);
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let err = build_gamma(4, Budget(100)).unwrap_err();
        assert!(matches!(err, Error::CapacityExceeded { .. }));
    }

    #[test]
    fn quadruple_of_gamma1_root() {
        let g = build_gamma(1, budget()).unwrap();
        let q = g.primary_quadruple("").unwrap();
        assert_eq!(q.c(), Dyadic::from_int(2));
        assert_eq!(q.side(), Dyadic::from_int(1));
    }

    #[test]
    fn quadruple_of_gamma2_root_and_child() {
        let g = build_gamma(2, budget()).unwrap();
        let root = g.primary_quadruple("").unwrap();
        assert_eq!(root.c(), Dyadic::from_int(4));
        assert_eq!(root.side(), Dyadic::from_int(2));
        let child = g.primary_quadruple("1").unwrap();
        assert_eq!(child.c(), Dyadic::from_int(2));
        assert_eq!(child.side(), Dyadic::from_int(1));
        // The child quadruple's first pair is the two gluing endpoints of
        // sub-copy 1, which are joints of the ambient graph.
        let sc = g.subcopy("1").unwrap();
        let (a, b) = sc.primary_pairs[0];
        assert_eq!(child.ids()[0], g.id(a));
        assert_eq!(child.ids()[2], g.id(b));
    }

    #[test]
    fn quadruple_root_of_gamma2_is_the_four_joints() {
        let g = build_gamma(2, budget()).unwrap();
        let q = g.primary_quadruple("").unwrap();
        // Joints are exactly the valence-4 vertices of the level-2 graph.
        for id in q.ids() {
            let v = g.index_of(id).unwrap();
            assert_eq!(g.valence(v), 4);
        }
    }

    #[test]
    fn level_zero_address_has_no_quadruple() {
        let g = build_gamma(1, budget()).unwrap();
        assert!(matches!(
            g.primary_quadruple("2"),
            Err(Error::NoQuadrupleAtLevelZero { .. })
        ));
    }

    #[test]
    fn child_address_follows_side_pairs() {
        let g = build_gamma(2, budget()).unwrap();
        let q = g.primary_quadruple("").unwrap();
        let mut children: Vec<String> = q
            .side_pairs()
            .iter()
            .map(|(a, b)| g.child_address("", (a, b)).unwrap())
            .collect();
        children.sort();
        assert_eq!(children, vec!["0", "1", "2", "3"]);
        // Diagonal is not a side.
        let ids = q.ids();
        let err = g.child_address("", (&ids[0], &ids[2])).unwrap_err();
        assert!(matches!(err, Error::NotASidePair { .. }));
    }

    #[test]
    fn child_address_on_gamma3_gives_four_distinct_children() {
        let g = build_gamma(3, budget()).unwrap();
        let q = g.primary_quadruple("").unwrap();
        let mut children: Vec<String> = q
            .side_pairs()
            .iter()
            .map(|(a, b)| g.child_address("", (a, b)).unwrap())
            .collect();
        children.sort();
        children.dedup();
        assert_eq!(children.len(), 4);
        for c in &children {
            assert_eq!(g.subcopy(c).unwrap().level, 2);
        }
    }

    #[test]
    fn child_address_errors_on_level_zero_children() {
        let g = build_gamma(1, budget()).unwrap();
        let q = g.primary_quadruple("").unwrap();
        for (a, b) in q.side_pairs() {
            let err = g.child_address("", (&a, &b)).unwrap_err();
            assert!(matches!(err, Error::NoQuadrupleAtLevelZero { .. }));
        }
    }

    #[test]
    fn chain_of_one_is_gamma1() {
        let chain = build_chain(1, budget()).unwrap();
        let gamma = build_gamma(1, budget()).unwrap();
        assert_eq!(chain, gamma);
    }

    #[test]
    fn chain_of_three_has_diameter_fourteen() {
        let chain = build_chain(3, budget()).unwrap();
        let m = chain.path_metric().unwrap();
        assert_eq!(m.diameter().unwrap(), Dyadic::from_int(14));
    }

    #[test]
    fn chain_joint_valence_and_block_membership() {
        let chain = build_chain(2, budget()).unwrap();
        let b1 = chain.subcopy("1/").unwrap().clone();
        let b2 = chain.subcopy("2/").unwrap().clone();
        let set1: std::collections::HashSet<u32> = b1.members.iter().copied().collect();
        let joints: Vec<u32> = b2
            .members
            .iter()
            .copied()
            .filter(|v| set1.contains(v))
            .collect();
        assert_eq!(joints.len(), 1);
        let joint = joints[0];
        // Valence 2 from the level-1 side plus 4 from the level-2 side.
        assert_eq!(chain.valence(joint), 6);
        // Still reported as a primary vertex of both blocks.
        let in_pairs = |sc: &SubCopy, v: u32| {
            sc.primary_pairs.iter().any(|&(a, b)| a == v || b == v)
        };
        assert!(in_pairs(&b1, joint));
        assert!(in_pairs(&b2, joint));
    }

    #[test]
    fn chain_block_distances_are_standalone() {
        let chain = build_chain(3, budget()).unwrap();
        let m = chain.path_metric().unwrap();
        for k in 1..=3u32 {
            let standalone = build_gamma(k, budget()).unwrap();
            let sm = standalone.path_metric().unwrap();
            let sc = chain.subcopy(&format!("{k}/")).unwrap();
            let v = sc.members.len();
            for i in 0..v {
                for j in (i + 1)..v {
                    assert_eq!(
                        m.d(sc.members[i] as usize, sc.members[j] as usize),
                        sm.d(i, j)
                    );
                }
            }
        }
    }
}
