//! Exact finite metric spaces and unit-edge shortest paths.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};

/// Threshold below which triangle verification enumerates all triples.
pub const EXHAUSTIVE_TRIANGLE_LIMIT: usize = 700;
/// Number of random triples checked above the exhaustive threshold.
pub const SAMPLED_TRIANGLE_COUNT: usize = 1_000_000;

/// A point set with an exact symmetric distance table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMetricSpace {
    ids: Vec<String>,
    dist: Vec<Dyadic>,
    scale_note: Option<String>,
}

impl FiniteMetricSpace {
    /// Builds a space from a row-major `n x n` table, checking shape, zero
    /// diagonal, symmetry and positivity. Triangle verification is a separate
    /// (cubic) step; see [`FiniteMetricSpace::verify_triangle`].
    pub fn new(
        ids: Vec<String>,
        dist: Vec<Dyadic>,
        scale_note: Option<String>,
    ) -> Result<FiniteMetricSpace> {
        let n = ids.len();
        if dist.len() != n * n {
            return Err(Error::InvalidMetric(format!(
                "table has {} entries, expected {}",
                dist.len(),
                n * n
            )));
        }
        {
            let mut seen = std::collections::HashSet::new();
            for id in &ids {
                if !seen.insert(id) {
                    return Err(Error::InvalidMetric(format!("duplicate id `{id}`")));
                }
            }
        }
        for i in 0..n {
            if !dist[i * n + i].is_zero() {
                return Err(Error::InvalidMetric(format!(
                    "d({0}, {0}) = {1} != 0",
                    ids[i],
                    dist[i * n + i]
                )));
            }
            for j in (i + 1)..n {
                if dist[i * n + j] != dist[j * n + i] {
                    return Err(Error::InvalidMetric(format!(
                        "asymmetric entry for ({}, {})",
                        ids[i], ids[j]
                    )));
                }
                if !dist[i * n + j].is_positive() {
                    return Err(Error::InvalidMetric(format!(
                        "d({}, {}) = {} is not positive",
                        ids[i],
                        ids[j],
                        dist[i * n + j]
                    )));
                }
            }
        }
        Ok(FiniteMetricSpace {
            ids,
            dist,
            scale_note,
        })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> &str {
        &self.ids[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    pub fn d(&self, i: usize, j: usize) -> Dyadic {
        self.dist[i * self.ids.len() + j]
    }

    pub fn scale_note(&self) -> Option<&str> {
        self.scale_note.as_deref()
    }

    pub fn min_positive_distance(&self) -> Option<Dyadic> {
        let n = self.len();
        let mut best: Option<Dyadic> = None;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = self.d(i, j);
                best = Some(match best {
                    Some(b) if b <= d => b,
                    _ => d,
                });
            }
        }
        best
    }

    pub fn diameter(&self) -> Option<Dyadic> {
        let n = self.len();
        let mut best: Option<Dyadic> = None;
        for i in 0..n {
            for j in (i + 1)..n {
                let d = self.d(i, j);
                best = Some(match best {
                    Some(b) if b >= d => b,
                    _ => d,
                });
            }
        }
        best
    }

    fn check_triple(&self, i: usize, j: usize, k: usize) -> Result<()> {
        // All three rotations of the inequality around one unordered triple.
        let dij = self.d(i, j);
        let djk = self.d(j, k);
        let dik = self.d(i, k);
        if dik > dij + djk || dij > dik + djk || djk > dij + dik {
            return Err(Error::TriangleViolation {
                a: self.ids[i].clone(),
                b: self.ids[j].clone(),
                c: self.ids[k].clone(),
            });
        }
        Ok(())
    }

    /// Exact triangle-inequality check over every unordered triple.
    pub fn verify_triangle_exhaustive(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    self.check_triple(i, j, k)?;
                }
            }
        }
        Ok(())
    }

    /// Exact check over `samples` seeded random triples.
    pub fn verify_triangle_sampled(&self, seed: u64, samples: usize) -> Result<()> {
        let n = self.len();
        if n < 3 {
            return Ok(());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            let k = rng.gen_range(0..n);
            if i != j && j != k && i != k {
                self.check_triple(i, j, k)?;
            }
        }
        Ok(())
    }

    /// Exhaustive verification up to [`EXHAUSTIVE_TRIANGLE_LIMIT`] points,
    /// seeded sampling above it.
    pub fn verify_triangle(&self, seed: u64) -> Result<()> {
        if self.len() <= EXHAUSTIVE_TRIANGLE_LIMIT {
            self.verify_triangle_exhaustive()
        } else {
            self.verify_triangle_sampled(seed, SAMPLED_TRIANGLE_COUNT)
        }
    }

    /// Row-major `f64` view of the table, used by the floating-point modules.
    pub fn to_f64_table(&self) -> Vec<f64> {
        self.dist.iter().map(|d| d.to_f64()).collect()
    }
}

/// All-pairs shortest paths over unit edges, one BFS per source.
///
/// Sources fan out in parallel; the result is independent of scheduling.
/// Returns the flat row-major table, or the index pair of an unreachable
/// vertex on disconnected input.
pub fn apsp_unit(n: usize, edges: &[(u32, u32)]) -> std::result::Result<Vec<u32>, (usize, usize)> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u as usize].push(v);
        adj[v as usize].push(u);
    }
    let rows: Vec<std::result::Result<Vec<u32>, (usize, usize)>> = (0..n)
        .into_par_iter()
        .map(|src| {
            let mut dist = vec![u32::MAX; n];
            let mut queue = std::collections::VecDeque::new();
            dist[src] = 0;
            queue.push_back(src as u32);
            while let Some(u) = queue.pop_front() {
                let du = dist[u as usize];
                for &v in &adj[u as usize] {
                    if dist[v as usize] == u32::MAX {
                        dist[v as usize] = du + 1;
                        queue.push_back(v);
                    }
                }
            }
            if let Some(unreached) = dist.iter().position(|&d| d == u32::MAX) {
                return Err((src, unreached));
            }
            Ok(dist)
        })
        .collect();
    let mut table = Vec::with_capacity(n * n);
    for row in rows {
        table.extend(row?);
    }
    Ok(table)
}

/// Wraps an APSP table into a metric space with the given ids.
pub fn metric_from_apsp(
    ids: Vec<String>,
    edges: &[(u32, u32)],
    scale_note: Option<String>,
) -> Result<FiniteMetricSpace> {
    let n = ids.len();
    let table = apsp_unit(n, edges).map_err(|(from, to)| Error::Disconnected {
        from: ids[from].clone(),
        to: ids[to].clone(),
    })?;
    let dist = table.iter().map(|&d| Dyadic::from_int(d as i64)).collect();
    FiniteMetricSpace::new(ids, dist, scale_note)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("v{i}")).collect()
    }

    #[test]
    fn single_edge_distance_one() {
        let m = metric_from_apsp(ids(2), &[(0, 1)], None).unwrap();
        assert_eq!(m.d(0, 1), Dyadic::from_int(1));
    }

    #[test]
    fn four_cycle_antipodal_distance_two() {
        let m = metric_from_apsp(ids(4), &[(0, 1), (1, 2), (2, 3), (0, 3)], None).unwrap();
        assert_eq!(m.d(0, 2), Dyadic::from_int(2));
        assert_eq!(m.d(1, 3), Dyadic::from_int(2));
        assert_eq!(m.d(0, 1), Dyadic::from_int(1));
        m.verify_triangle_exhaustive().unwrap();
    }

    #[test]
    fn disconnected_names_unreachable_pair() {
        let err = metric_from_apsp(ids(4), &[(0, 1), (2, 3)], None).unwrap_err();
        match err {
            Error::Disconnected { from, to } => {
                assert_eq!(from, "v0");
                assert_eq!(to, "v2");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_invalid_tables() {
        let d = Dyadic::from_int;
        // asymmetric
        let err = FiniteMetricSpace::new(ids(2), vec![d(0), d(1), d(2), d(0)], None).unwrap_err();
        assert!(matches!(err, Error::InvalidMetric(_)));
        // zero off-diagonal
        let err = FiniteMetricSpace::new(ids(2), vec![d(0), d(0), d(0), d(0)], None).unwrap_err();
        assert!(matches!(err, Error::InvalidMetric(_)));
        // nonzero diagonal
        let err = FiniteMetricSpace::new(ids(2), vec![d(1), d(1), d(1), d(0)], None).unwrap_err();
        assert!(matches!(err, Error::InvalidMetric(_)));
    }

    #[test]
    fn triangle_violation_is_reported() {
        let d = Dyadic::from_int;
        let table = vec![
            d(0),
            d(1),
            d(5),
            d(1),
            d(0),
            d(1),
            d(5),
            d(1),
            d(0),
        ];
        let m = FiniteMetricSpace::new(ids(3), table, None).unwrap();
        assert!(matches!(
            m.verify_triangle_exhaustive(),
            Err(Error::TriangleViolation { .. })
        ));
        assert!(matches!(
            m.verify_triangle_sampled(1, 10_000),
            Err(Error::TriangleViolation { .. })
        ));
    }
}
