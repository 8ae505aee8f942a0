//! Numerical embeddings of finite metric spaces into `p`-norm targets and
//! their distortion statistics.
//!
//! The optimizer supplies empirical upper bounds; the certified floor lives
//! in the certifier module. Everything here claims only what a multi-start
//! search can: best-found values, never optimality.

pub mod optimize;

pub use optimize::{gradient, minimize_distortion, objective, OptimizerConfig};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spaces::FiniteMetricSpace;

/// Distance in the `d`-dimensional `p`-norm. `p = f64::INFINITY` gives the
/// sup norm (measurement only; the optimizer rejects it).
pub fn p_dist(a: &[f64], b: &[f64], p: f64) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if p.is_infinite() {
        return a
            .iter()
            .zip(b)
            .fold(0.0, |m, (&x, &y)| m.max((x - y).abs()));
    }
    if p == 2.0 {
        return a
            .iter()
            .zip(b)
            .map(|(&x, &y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
    }
    if p == 1.0 {
        return a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).sum();
    }
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y).abs().powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

/// Target space descriptor: exponent and dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub p: f64,
    pub dim: usize,
}

impl Target {
    pub fn new(p: f64, dim: usize) -> Result<Target> {
        if !(p >= 1.0) {
            return Err(Error::InvalidInput(format!(
                "norm exponent {p} not in [1, inf]"
            )));
        }
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        Ok(Target { p, dim })
    }
}

/// Exact max/min pair ratios of an embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionStats {
    pub expansion: f64,
    pub contraction: f64,
    pub distortion: f64,
    pub l_sym: f64,
    pub max_pair: (String, String),
    pub min_pair: (String, String),
}

/// Where an embedding came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub restarts: usize,
    pub iterations: u64,
}

/// Coordinates of each point in a `p`-norm target, with statistics that are
/// recomputable from the coordinates and the domain metric.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    ids: Vec<String>,
    coords: Vec<f64>,
    target: Target,
    stats: DistortionStats,
    provenance: Provenance,
}

impl Embedding {
    /// Wraps coordinates, computing the statistics against `space`.
    pub fn new(
        space: &FiniteMetricSpace,
        ids: Vec<String>,
        coords: Vec<f64>,
        target: Target,
        provenance: Provenance,
    ) -> Result<Embedding> {
        if ids.len() * target.dim != coords.len() {
            return Err(Error::InvalidInput(format!(
                "{} coordinates for {} points in dimension {}",
                coords.len(),
                ids.len(),
                target.dim
            )));
        }
        let mut e = Embedding {
            ids,
            coords,
            target,
            // Neutral statistics; spaces with fewer than two points have no
            // pairs and keep them.
            stats: DistortionStats {
                expansion: 1.0,
                contraction: 1.0,
                distortion: 1.0,
                l_sym: 1.0,
                max_pair: (String::new(), String::new()),
                min_pair: (String::new(), String::new()),
            },
            provenance,
        };
        if space.len() >= 2 {
            e.stats = distortion(space, &e)?;
        }
        Ok(e)
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.ids.iter().position(|x| x == id)
    }

    pub fn target(&self) -> Target {
        self.target
    }

    pub fn stats(&self) -> &DistortionStats {
        &self.stats
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.target.dim..(i + 1) * self.target.dim]
    }

    pub fn image_distance(&self, i: usize, j: usize) -> f64 {
        p_dist(self.point(i), self.point(j), self.target.p)
    }
}

/// Exact distortion statistics of `e` over `space`: max and min of
/// image-to-domain ratios over all pairs, `D = expansion / contraction`,
/// symmetric constant `sqrt(D)`.
pub fn distortion(space: &FiniteMetricSpace, e: &Embedding) -> Result<DistortionStats> {
    let n = space.len();
    if n < 2 {
        return Err(Error::InvalidInput(
            "distortion needs at least two points".into(),
        ));
    }
    // Map domain index -> embedding index by id.
    let mut map = Vec::with_capacity(n);
    for id in space.ids() {
        map.push(e.index_of(id).ok_or_else(|| Error::MissingVertex {
            id: id.clone(),
        })?);
    }
    let mut expansion = f64::NEG_INFINITY;
    let mut contraction = f64::INFINITY;
    let mut max_pair = (0, 0);
    let mut min_pair = (0, 0);
    for i in 0..n {
        for j in (i + 1)..n {
            let img = e.image_distance(map[i], map[j]);
            if img == 0.0 {
                return Err(Error::CoincidentImages {
                    a: space.id(i).to_string(),
                    b: space.id(j).to_string(),
                });
            }
            let ratio = img / space.d(i, j).to_f64();
            if ratio > expansion {
                expansion = ratio;
                max_pair = (i, j);
            }
            if ratio < contraction {
                contraction = ratio;
                min_pair = (i, j);
            }
        }
    }
    let distortion = expansion / contraction;
    Ok(DistortionStats {
        expansion,
        contraction,
        distortion,
        l_sym: distortion.sqrt(),
        max_pair: (
            space.id(max_pair.0).to_string(),
            space.id(max_pair.1).to_string(),
        ),
        min_pair: (
            space.id(min_pair.0).to_string(),
            space.id(min_pair.1).to_string(),
        ),
    })
}
