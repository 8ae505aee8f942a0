//! Complete binary trees of bounded depth with their path metrics.

use crate::budget::Budget;
use crate::dyadic::Dyadic;
use crate::error::Result;
use crate::spaces::metric::{metric_from_apsp, FiniteMetricSpace};

/// The complete binary tree on all sign strings of length 0..=depth.
///
/// The empty string is the root (labelled `r`); each vertex has the two
/// one-letter extensions as children. The root is included so the
/// edge-augmented tree stays connected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    depth: u32,
    labels: Vec<String>,
    edges: Vec<(u32, u32)>,
}

/// Builds the depth-`n` tree: `2^(n+1) - 1` vertices, `2^(n+1) - 2` edges.
pub fn build_tree(depth: u32, budget: Budget) -> Result<Tree> {
    let edge_count = 2u128.pow(depth + 1) - 2;
    budget.check(&format!("depth-{depth} tree"), edge_count)?;
    let mut labels = vec!["r".to_string()];
    let mut frontier = vec!["r".to_string()];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for parent in &frontier {
            for sign in ['+', '-'] {
                let child = format!("{parent}{sign}");
                labels.push(child.clone());
                next.push(child);
            }
        }
        frontier = next;
    }
    labels.sort_unstable();
    let index = |label: &str| -> u32 {
        labels.binary_search_by(|x| x.as_str().cmp(label)).unwrap() as u32
    };
    let mut edges = Vec::with_capacity(labels.len() - 1);
    for label in &labels {
        if label.len() > 1 {
            let parent = &label[..label.len() - 1];
            let (a, b) = (index(parent), index(label));
            edges.push(if a < b { (a, b) } else { (b, a) });
        }
    }
    edges.sort_unstable();
    Ok(Tree {
        depth,
        labels,
        edges,
    })
}

impl Tree {
    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    /// Depth of a vertex, i.e. its distance from the root.
    pub fn depth_of(&self, v: u32) -> u32 {
        (self.labels[v as usize].len() - 1) as u32
    }

    /// Path metric from the prefix formula:
    /// `d(u, v) = depth(u) + depth(v) - 2 * depth(common ancestor)`.
    pub fn metric(&self) -> Result<FiniteMetricSpace> {
        let n = self.labels.len();
        let mut dist = vec![Dyadic::from_int(0); n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let a = &self.labels[i];
                let b = &self.labels[j];
                let lcp = a
                    .bytes()
                    .zip(b.bytes())
                    .take_while(|(x, y)| x == y)
                    .count();
                // Labels share the leading `r`, so the common ancestor has
                // depth lcp - 1.
                let d = (a.len() - lcp) + (b.len() - lcp);
                dist[i * n + j] = Dyadic::from_int(d as i64);
                dist[j * n + i] = dist[i * n + j];
            }
        }
        FiniteMetricSpace::new(
            self.labels.clone(),
            dist,
            Some(format!("prefix metric, depth-{} tree", self.depth)),
        )
    }

    /// Path metric recomputed by BFS over the edges; oracle route for the
    /// prefix formula.
    pub fn bfs_metric(&self) -> Result<FiniteMetricSpace> {
        metric_from_apsp(
            self.labels.clone(),
            &self.edges,
            Some(format!("BFS metric, depth-{} tree", self.depth)),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let t = build_tree(1, Budget::default()).unwrap();
        assert_eq!(t.vertex_count(), 3);
        assert_eq!(t.edges().len(), 2);
        for n in 0..=5u32 {
            let t = build_tree(n, Budget::default()).unwrap();
            assert_eq!(t.vertex_count() as u64, 2u64.pow(n + 1) - 1);
        }
    }

    #[test]
    fn depth3_leaf_distances() {
        let t = build_tree(3, Budget::default()).unwrap();
        assert_eq!(t.vertex_count(), 15);
        let m = t.metric().unwrap();
        let i = m.index_of("r+++").unwrap();
        // Any leaf under the opposite root branch is at distance 6.
        for leaf in ["r---", "r-++", "r-+-", "r--+"] {
            let j = m.index_of(leaf).unwrap();
            assert_eq!(m.d(i, j), Dyadic::from_int(6));
        }
    }

    #[test]
    fn depth2_diameter() {
        let t = build_tree(2, Budget::default()).unwrap();
        let m = t.metric().unwrap();
        assert_eq!(m.diameter().unwrap(), Dyadic::from_int(4));
    }

    #[test]
    fn prefix_formula_matches_bfs() {
        for n in 0..=6u32 {
            let t = build_tree(n, Budget::default()).unwrap();
            let formula = t.metric().unwrap();
            let bfs = t.bfs_metric().unwrap();
            let v = t.vertex_count();
            for i in 0..v {
                for j in 0..v {
                    assert_eq!(formula.d(i, j), bfs.d(i, j));
                }
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        assert!(build_tree(10, Budget(100)).is_err());
    }
}
