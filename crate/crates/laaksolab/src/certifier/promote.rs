//! Promotion of a quasi-isometry to a biLipschitz map.
//!
//! Concatenating each image with the point's own indicator vector (a
//! standard basis block under the 2-norm, summed into the base distance by
//! an l1 direct sum) separates every pair by sqrt(2), which kills the
//! additive slack of a quasi-isometry at the price of explicit constants:
//! the promoted map satisfies
//!
//! * upper: `d~ <= (L + (sqrt(2) + C)/m) d` with `m` the minimum positive
//!   domain distance, and
//! * lower: `d~ >= max(sqrt(2)/diam, [d >= S] / L_large) d` with the
//!   large-scale constants of the input map.
//!
//! These formulas are this crate's derivation; the routine asserts them
//! against exhaustively computed constants and reports both.

use crate::embedder::{p_dist, Embedding};
use crate::error::{Error, Result};
use crate::spaces::FiniteMetricSpace;

use super::{QuasiIsometryParams, CERT_SLACK};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// The promoted map: base coordinates plus an indicator block per point.
#[derive(Debug, Clone, PartialEq)]
pub struct PromotedEmbedding {
    ids: Vec<String>,
    base_coords: Vec<f64>,
    base_dim: usize,
    base_p: f64,
    /// `L + (sqrt(2) + C)/m`; `None` when there are no pairs to certify.
    pub upper_asserted: Option<f64>,
    /// `sqrt(2) / diam`.
    pub lower_slope_asserted: Option<f64>,
    /// Exhaustive `max d~/d` over all pairs.
    pub upper_exhaustive: Option<f64>,
    /// Exhaustive `min d~/d` over all pairs.
    pub lower_exhaustive: Option<f64>,
    /// All asserted inequalities verified over every pair.
    pub certified: bool,
}

impl PromotedEmbedding {
    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    /// Width of the indicator block: one coordinate per point.
    pub fn indicator_dim(&self) -> usize {
        self.ids.len()
    }

    /// Full coordinates of point `i`: base image then indicator block.
    pub fn coordinates(&self, i: usize) -> Vec<f64> {
        let mut out =
            self.base_coords[i * self.base_dim..(i + 1) * self.base_dim].to_vec();
        let mut indicator = vec![0.0; self.ids.len()];
        indicator[i] = 1.0;
        out.extend(indicator);
        out
    }

    /// Distance in the promoted space: base p-norm distance plus the 2-norm
    /// distance of the indicator parts, which is sqrt(2) for distinct points.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let a = &self.base_coords[i * self.base_dim..(i + 1) * self.base_dim];
        let b = &self.base_coords[j * self.base_dim..(j + 1) * self.base_dim];
        p_dist(a, b, self.base_p) + SQRT_2
    }
}

/// Verifies that `f` is an `(L, C)` quasi-isometry on `x` (exhaustively),
/// then promotes it and certifies the explicit biLipschitz constants.
pub fn promote_to_bilipschitz(
    x: &FiniteMetricSpace,
    f: &Embedding,
    qi: &QuasiIsometryParams,
) -> Result<PromotedEmbedding> {
    let n = x.len();
    let mut map = Vec::with_capacity(n);
    for id in x.ids() {
        map.push(f.index_of(id).ok_or_else(|| Error::MissingVertex {
            id: id.clone(),
        })?);
    }
    let (l, c) = (qi.l(), qi.c_add());
    for i in 0..n {
        for j in (i + 1)..n {
            let d = x.d(i, j).to_f64();
            let img = f.image_distance(map[i], map[j]);
            if img < d / l - c - CERT_SLACK || img > l * d + c + CERT_SLACK {
                return Err(Error::NotAQuasiIsometry {
                    a: x.id(i).to_string(),
                    b: x.id(j).to_string(),
                });
            }
        }
    }

    let dim = f.target().dim;
    let base_coords: Vec<f64> = map
        .iter()
        .flat_map(|&k| f.point(k).iter().copied())
        .collect();
    let mut out = PromotedEmbedding {
        ids: x.ids().to_vec(),
        base_coords,
        base_dim: dim,
        base_p: f.target().p,
        upper_asserted: None,
        lower_slope_asserted: None,
        upper_exhaustive: None,
        lower_exhaustive: None,
        certified: true,
    };
    if n < 2 {
        // Nothing to certify; identity behavior.
        return Ok(out);
    }

    let m = x.min_positive_distance().expect("n >= 2").to_f64();
    let diam = x.diameter().expect("n >= 2").to_f64();
    let upper_asserted = l + (SQRT_2 + c) / m;
    let lower_slope = SQRT_2 / diam;
    let ls = qi.large_scale();

    let mut sup = f64::NEG_INFINITY;
    let mut inf = f64::INFINITY;
    let mut certified = true;
    for i in 0..n {
        for j in (i + 1)..n {
            let d = x.d(i, j).to_f64();
            let promoted = out.distance(i, j);
            let ratio = promoted / d;
            sup = sup.max(ratio);
            inf = inf.min(ratio);
            // Per-pair combined lower bound: the indicator separation always
            // provides sqrt(2)/diam, and past the large-scale threshold the
            // base map provides 1/L_large on its own.
            let mut pair_floor = lower_slope;
            if d >= ls.s {
                pair_floor = pair_floor.max(1.0 / ls.l_large);
            }
            if ratio < pair_floor - CERT_SLACK {
                certified = false;
            }
        }
    }
    if sup > upper_asserted + CERT_SLACK * upper_asserted.max(1.0) {
        certified = false;
    }
    if inf < lower_slope - CERT_SLACK {
        certified = false;
    }
    out.upper_asserted = Some(upper_asserted);
    out.lower_slope_asserted = Some(lower_slope);
    out.upper_exhaustive = Some(sup);
    out.lower_exhaustive = Some(inf);
    out.certified = certified;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Dyadic;
    use crate::embedder::{Provenance, Target};

    fn space(dists: &[&[i64]], prefix: &str) -> FiniteMetricSpace {
        let n = dists.len();
        let ids = (0..n).map(|i| format!("{prefix}{i}")).collect();
        let mut table = vec![Dyadic::from_int(0); n * n];
        for (i, row) in dists.iter().enumerate() {
            for (j, &d) in row.iter().enumerate() {
                table[i * n + j] = Dyadic::from_int(d);
            }
        }
        FiniteMetricSpace::new(ids, table, None).unwrap()
    }

    fn embed(space: &FiniteMetricSpace, coords: Vec<f64>, dim: usize) -> Embedding {
        Embedding::new(
            space,
            space.ids().to_vec(),
            coords,
            Target { p: 2.0, dim },
            Provenance { seed: 0, restarts: 0, iterations: 0 },
        )
        .unwrap()
    }

    #[test]
    fn collapsing_two_points_promotes_to_sqrt2() {
        let x = space(&[&[0, 1], &[1, 0]], "t");
        // Both points land almost together: a (1, 1) quasi-isometry.
        let f = embed(&x, vec![0.0, 1e-12], 1);
        let qi = QuasiIsometryParams::new(1.0, 1.0).unwrap();
        let p = promote_to_bilipschitz(&x, &f, &qi).unwrap();
        assert!(p.certified);
        // Single pair at domain distance 1: promoted distance sqrt(2)+eps.
        assert!((p.upper_exhaustive.unwrap() - SQRT_2).abs() < 1e-9);
        assert!((p.lower_exhaustive.unwrap() - SQRT_2).abs() < 1e-9);
        assert!((p.lower_slope_asserted.unwrap() - SQRT_2).abs() < 1e-12);
        assert!((p.distance(0, 1) - SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn isometric_path_promotes_with_explicit_constants() {
        let x = space(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]], "t");
        let f = embed(&x, vec![0.0, 1.0, 2.0], 1);
        let qi = QuasiIsometryParams::new(1.0, 0.0).unwrap();
        let p = promote_to_bilipschitz(&x, &f, &qi).unwrap();
        assert!(p.certified);
        // d~ = d + sqrt(2): the worst expansion sits on the closest pair.
        assert!((p.upper_exhaustive.unwrap() - (1.0 + SQRT_2)).abs() < 1e-12);
        assert!((p.upper_asserted.unwrap() - (1.0 + SQRT_2)).abs() < 1e-12);
        // Distortion of the promoted map is at most 1 + sqrt(2)/m.
        let distortion = p.upper_exhaustive.unwrap() / p.lower_exhaustive.unwrap();
        assert!(distortion <= 1.0 + SQRT_2 + 1e-12);
    }

    #[test]
    fn singleton_promotes_trivially() {
        let x = FiniteMetricSpace::new(vec!["only".into()], vec![Dyadic::from_int(0)], None)
            .unwrap();
        let f = embed(&x, vec![0.5], 1);
        let qi = QuasiIsometryParams::new(1.0, 0.0).unwrap();
        let p = promote_to_bilipschitz(&x, &f, &qi).unwrap();
        assert!(p.certified);
        assert!(p.upper_exhaustive.is_none());
        assert_eq!(p.coordinates(0), vec![0.5, 1.0]);
    }

    #[test]
    fn violating_pair_is_reported() {
        let x = space(&[&[0, 1], &[1, 0]], "t");
        let f = embed(&x, vec![0.0, 10.0], 1);
        let qi = QuasiIsometryParams::new(1.0, 0.5).unwrap();
        let err = promote_to_bilipschitz(&x, &f, &qi).unwrap_err();
        assert!(matches!(err, Error::NotAQuasiIsometry { .. }));
    }
}
