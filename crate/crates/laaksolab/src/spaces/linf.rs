//! Recursive sup-norm point sets built by midpoint splitting.
//!
//! Splitting a pair `(v, w)` zero-pads both vectors by one coordinate and
//! adds the two points `x, y = (v+w)/2 ⊕ ±|v-w|/2` (sup norm). The quadruple
//! `(v, w, x, y)` then has both diagonals equal to `|v-w|` and all four sides
//! equal to half of it, exactly, which is what the distortion certifier
//! consumes. Iterating the split over every side pair grows the recursive
//! point set one ambient dimension per generation.

use std::collections::HashMap;

use crate::budget::Budget;
use crate::certifier::Quadruple;
use crate::dyadic::{Dyadic, ZERO};
use crate::error::{Error, Result};
use crate::spaces::metric::FiniteMetricSpace;

/// Exact sup-norm distance of two equal-length dyadic vectors.
pub fn sup_distance(a: &[Dyadic], b: &[Dyadic]) -> Dyadic {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y).abs())
        .max()
        .unwrap_or(ZERO)
}

/// Output of one split: the zero-padded originals plus the two new points,
/// all in dimension `d + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinfSplit {
    pub v_padded: Vec<Dyadic>,
    pub w_padded: Vec<Dyadic>,
    pub x: Vec<Dyadic>,
    pub y: Vec<Dyadic>,
    pub c: Dyadic,
}

/// Splits the pair `(v, w)`, verifying the diamond pattern exactly before
/// returning.
pub fn linf_split(v: &[Dyadic], w: &[Dyadic]) -> Result<LinfSplit> {
    if v.len() != w.len() {
        return Err(Error::InvalidInput(format!(
            "dimension mismatch: {} vs {}",
            v.len(),
            w.len()
        )));
    }
    if v == w {
        return Err(Error::Degenerate(
            "cannot split a pair of equal points".into(),
        ));
    }
    let c = sup_distance(v, w);
    let h = c.half();
    let pad = |p: &[Dyadic]| {
        let mut out = p.to_vec();
        out.push(ZERO);
        out
    };
    let v_padded = pad(v);
    let w_padded = pad(w);
    let mut mid: Vec<Dyadic> = v.iter().zip(w).map(|(&a, &b)| (a + b).half()).collect();
    mid.push(ZERO);
    let mut x = mid.clone();
    *x.last_mut().unwrap() = h;
    let mut y = mid;
    *y.last_mut().unwrap() = -h;

    // The pattern is exact by construction; verify anyway before handing the
    // quadruple out.
    let ok = sup_distance(&v_padded, &w_padded) == c
        && sup_distance(&x, &y) == c
        && sup_distance(&v_padded, &x) == h
        && sup_distance(&v_padded, &y) == h
        && sup_distance(&w_padded, &x) == h
        && sup_distance(&w_padded, &y) == h;
    if !ok {
        return Err(Error::Degenerate(
            "split did not produce the diamond pattern".into(),
        ));
    }
    Ok(LinfSplit {
        v_padded,
        w_padded,
        x,
        y,
        c,
    })
}

/// A registered quadruple: indices of `(v, w, x, y)` and the diagonal length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LinfQuadruple {
    pub v: u32,
    pub w: u32,
    pub x: u32,
    pub y: u32,
    pub c: Dyadic,
}

/// The recursive point set with its generation map and quadruple registry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinfPointSet {
    dim: usize,
    ids: Vec<String>,
    points: Vec<Vec<Dyadic>>,
    generation: Vec<u32>,
    quadruples: Vec<LinfQuadruple>,
}

/// Builds the depth-`k` set: starting from `(0)` and `(1)` in dimension 1,
/// every side pair of the previous generation splits once per level. Final
/// ambient dimension is `k + 1`.
pub fn build_linf_set(depth: u32, budget: Budget) -> Result<LinfPointSet> {
    budget.check(&format!("depth-{depth} sup-norm set"), 4u128.pow(depth))?;
    let mut points: Vec<Vec<Dyadic>> = vec![vec![ZERO], vec![Dyadic::from_int(1)]];
    let mut generation = vec![0u32, 0u32];
    let mut quadruples: Vec<LinfQuadruple> = Vec::new();
    // Side pairs awaiting a split at the next level.
    let mut frontier: Vec<(u32, u32)> = vec![(0, 1)];

    for level in 1..=depth {
        for p in &mut points {
            p.push(ZERO);
        }
        let mut seen: HashMap<Vec<Dyadic>, u32> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i as u32))
            .collect();
        let mut next_frontier = Vec::with_capacity(frontier.len() * 4);
        for &(vi, wi) in &frontier {
            // Points are already padded; drop the fresh zero so linf_split
            // re-pads consistently.
            let dim = points[vi as usize].len() - 1;
            let v = points[vi as usize][..dim].to_vec();
            let w = points[wi as usize][..dim].to_vec();
            let split = linf_split(&v, &w)?;
            let mut register = |coords: Vec<Dyadic>| -> Result<u32> {
                if seen.contains_key(&coords) {
                    return Err(Error::Degenerate(
                        "split produced a point that already exists".into(),
                    ));
                }
                let idx = points.len() as u32;
                seen.insert(coords.clone(), idx);
                points.push(coords);
                generation.push(level);
                Ok(idx)
            };
            let xi = register(split.x)?;
            let yi = register(split.y)?;
            quadruples.push(LinfQuadruple {
                v: vi,
                w: wi,
                x: xi,
                y: yi,
                c: split.c,
            });
            next_frontier.extend([(vi, xi), (vi, yi), (wi, xi), (wi, yi)]);
        }
        frontier = next_frontier;
    }

    let width = points.len().to_string().len();
    let ids = (0..points.len())
        .map(|i| format!("p{i:0width$}"))
        .collect();
    Ok(LinfPointSet {
        dim: depth as usize + 1,
        ids,
        points,
        generation,
        quadruples,
    })
}

impl LinfPointSet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn point(&self, i: usize) -> &[Dyadic] {
        &self.points[i]
    }

    pub fn generation(&self) -> &[u32] {
        &self.generation
    }

    pub fn quadruples(&self) -> &[LinfQuadruple] {
        &self.quadruples
    }

    pub fn distance(&self, i: usize, j: usize) -> Dyadic {
        sup_distance(&self.points[i], &self.points[j])
    }

    /// The exact sup-norm metric of the whole set.
    pub fn metric(&self) -> Result<FiniteMetricSpace> {
        let n = self.points.len();
        let mut dist = vec![ZERO; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = self.distance(i, j);
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        FiniteMetricSpace::new(
            self.ids.clone(),
            dist,
            Some(format!("sup-norm set, depth {}", self.dim - 1)),
        )
    }

    /// A registered quadruple as the certifier's domain type.
    pub fn quadruple(&self, idx: usize) -> Result<Quadruple> {
        let q = self.quadruples[idx];
        // Re-verify the registered pattern in the final ambient dimension.
        let side = q.c.half();
        let ok = self.distance(q.v as usize, q.w as usize) == q.c
            && self.distance(q.x as usize, q.y as usize) == q.c
            && self.distance(q.v as usize, q.x as usize) == side
            && self.distance(q.v as usize, q.y as usize) == side
            && self.distance(q.w as usize, q.x as usize) == side
            && self.distance(q.w as usize, q.y as usize) == side;
        if !ok {
            return Err(Error::Degenerate(format!(
                "registered quadruple {idx} lost the diamond pattern"
            )));
        }
        Quadruple::new(
            [
                self.ids[q.v as usize].clone(),
                self.ids[q.x as usize].clone(),
                self.ids[q.w as usize].clone(),
                self.ids[q.y as usize].clone(),
            ],
            q.c,
        )
    }
}
