//! Numeric round-ball modulus estimation.
//!
//! The probe is normalized to centers `x = 0` and `y = e1` at distance 1
//! (the defining condition is scale- and translation-invariant in a normed
//! space). The inner routine maximizes `|z - w|_p` over `z, w` in the
//! intersection of the two balls of radius `(1 + delta)/2` by multi-start
//! projected ascent; the outer bisection finds the largest `delta` whose
//! intersection diameter stays at or below `epsilon`.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Norm exponent of the target space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PNorm {
    Finite(f64),
    Inf,
}

impl PNorm {
    pub fn norm(&self, v: &[f64]) -> f64 {
        match *self {
            PNorm::Inf => v.iter().fold(0.0, |m, &x| m.max(x.abs())),
            PNorm::Finite(p) if p == 1.0 => v.iter().map(|x| x.abs()).sum(),
            PNorm::Finite(p) if p == 2.0 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            PNorm::Finite(p) => v
                .iter()
                .map(|x| x.abs().powf(p))
                .sum::<f64>()
                .powf(1.0 / p),
        }
    }

    /// A (sub)gradient of the norm at `v != 0`.
    fn grad(&self, v: &[f64]) -> Vec<f64> {
        match *self {
            PNorm::Inf => {
                let mut best = 0;
                for (i, x) in v.iter().enumerate() {
                    if x.abs() > v[best].abs() {
                        best = i;
                    }
                }
                let mut g = vec![0.0; v.len()];
                g[best] = v[best].signum();
                g
            }
            PNorm::Finite(p) if p == 2.0 => {
                let n = self.norm(v).max(1e-300);
                v.iter().map(|&x| x / n).collect()
            }
            PNorm::Finite(p) => {
                let n = self.norm(v).max(1e-300);
                v.iter()
                    .map(|&x| x.signum() * (x.abs() / n).powf(p - 1.0))
                    .collect()
            }
        }
    }

    pub fn descriptor(&self) -> String {
        match *self {
            PNorm::Inf => "inf".to_string(),
            PNorm::Finite(p) => format!("{p}"),
        }
    }
}

/// Search configuration for the lens maximizer and the outer bisection.
#[derive(Debug, Clone)]
pub struct LensSearchConfig {
    pub starts: usize,
    pub iters: usize,
    pub init_step: f64,
    pub bisect_tol: f64,
    pub seed: u64,
}

impl Default for LensSearchConfig {
    fn default() -> Self {
        LensSearchConfig {
            starts: 64,
            iters: 500,
            init_step: 0.25,
            bisect_tol: 1e-9,
            seed: 7,
        }
    }
}

/// Explicit two-point witness that the intersection of two balls stays wide:
/// `z, w` lie in both balls of radius `(1+delta)/2 * d(x,y)` around `x` and
/// `y` for every `delta >= 0`, yet `|z - w| >= ratio * d(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundBallWitness {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub w: Vec<f64>,
    pub ratio: f64,
}

/// Result of a single-`epsilon` estimate.
#[derive(Debug, Clone)]
pub struct ModulusEstimate {
    pub delta: f64,
    pub error_bar: f64,
    /// Set when the norm fails the round-ball condition at this `epsilon`.
    pub not_round_ball: Option<RoundBallWitness>,
}

fn basis(dim: usize, i: usize, scale: f64) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[i] = scale;
    v
}

/// Witness for the sup norm along the axis direction: `(1/2, ±1/2, 0, ...)`
/// lie in both balls around `0` and `e1` at any radius `>= 1/2` and are a
/// full unit apart.
fn inf_witness(dim: usize) -> RoundBallWitness {
    let mut z = vec![0.0; dim];
    let mut w = vec![0.0; dim];
    z[0] = 0.5;
    z[1] = 0.5;
    w[0] = 0.5;
    w[1] = -0.5;
    RoundBallWitness {
        x: vec![0.0; dim],
        y: basis(dim, 0, 1.0),
        z,
        w,
        ratio: 1.0,
    }
}

/// Witness for the 1-norm, which needs the corner direction `y = e1 + e2`:
/// `e1` and `e2` lie in both balls of radius `(1+delta)/2 * |y|_1 >= 1` and
/// are `|y|_1` apart.
fn l1_witness(dim: usize) -> RoundBallWitness {
    let mut y = vec![0.0; dim];
    y[0] = 1.0;
    y[1] = 1.0;
    RoundBallWitness {
        x: vec![0.0; dim],
        y,
        z: basis(dim, 0, 1.0),
        w: basis(dim, 1, 1.0),
        ratio: 1.0,
    }
}

struct Lens {
    p: PNorm,
    dim: usize,
    radius: f64,
}

impl Lens {
    fn project(&self, v: &mut [f64]) -> bool {
        // Alternating radial pulls into the two balls; the feasible set is
        // their intersection.
        let slack = self.radius * (1.0 + 1e-12);
        for _ in 0..200 {
            let n0 = self.p.norm(v);
            if n0 > slack {
                let f = self.radius / n0;
                for x in v.iter_mut() {
                    *x *= f;
                }
            }
            let mut shifted: Vec<f64> = v.to_vec();
            shifted[0] -= 1.0;
            let n1 = self.p.norm(&shifted);
            if n1 > slack {
                let f = self.radius / n1;
                for (i, x) in v.iter_mut().enumerate() {
                    *x = if i == 0 { 1.0 + shifted[0] * f } else { shifted[i] * f };
                }
            }
            if self.p.norm(v) <= slack {
                let mut s: Vec<f64> = v.to_vec();
                s[0] -= 1.0;
                if self.p.norm(&s) <= slack {
                    return true;
                }
            }
        }
        false
    }

    fn feasible(&self, v: &[f64]) -> bool {
        let slack = self.radius * (1.0 + 1e-9) + 1e-15;
        if self.p.norm(v) > slack {
            return false;
        }
        let mut s = v.to_vec();
        s[0] -= 1.0;
        self.p.norm(&s) <= slack
    }

    fn ascend(&self, rng: &mut ChaCha8Rng, iters: usize, init_step: f64) -> f64 {
        let mid = basis(self.dim, 0, 0.5);
        let sigma = 0.3 * self.radius;
        let mut z: Vec<f64> = (0..self.dim)
            .map(|i| mid[i] + sigma * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let mut w: Vec<f64> = (0..self.dim)
            .map(|i| mid[i] + sigma * rng.sample::<f64, _>(StandardNormal))
            .collect();
        if !self.project(&mut z) || !self.project(&mut w) {
            return 0.0;
        }
        let diff: Vec<f64> = z.iter().zip(&w).map(|(a, b)| a - b).collect();
        let mut best = self.p.norm(&diff);
        let mut step = init_step * self.radius;
        for _ in 0..iters {
            let diff: Vec<f64> = z.iter().zip(&w).map(|(a, b)| a - b).collect();
            let dir = if self.p.norm(&diff) < 1e-14 {
                // Coincident iterates: kick in a random direction.
                let mut d: Vec<f64> = (0..self.dim)
                    .map(|_| rng.sample::<f64, _>(StandardNormal))
                    .collect();
                let n = PNorm::Finite(2.0).norm(&d).max(1e-300);
                d.iter_mut().for_each(|x| *x /= n);
                d
            } else {
                self.p.grad(&diff)
            };
            let mut zt: Vec<f64> = z.iter().zip(&dir).map(|(a, g)| a + step * g).collect();
            let mut wt: Vec<f64> = w.iter().zip(&dir).map(|(a, g)| a - step * g).collect();
            if self.project(&mut zt) && self.project(&mut wt) {
                let dt: Vec<f64> = zt.iter().zip(&wt).map(|(a, b)| a - b).collect();
                let val = self.p.norm(&dt);
                if val > best + 1e-16 {
                    z = zt;
                    w = wt;
                    best = val;
                    step = (step * 1.3).min(init_step * self.radius);
                    continue;
                }
            }
            step *= 0.5;
            if step < 1e-14 {
                break;
            }
        }
        if self.feasible(&z) && self.feasible(&w) {
            best
        } else {
            0.0
        }
    }
}

/// `M(delta)`: the numeric diameter of the intersection of the two balls of
/// radius `(1 + delta)/2` around `0` and `e1`, by multi-start projected
/// ascent. Starts run independently with per-start seeds and reduce by max.
pub fn lens_diameter_numeric(p: PNorm, dim: usize, delta: f64, cfg: &LensSearchConfig) -> f64 {
    let lens = Lens {
        p,
        dim,
        radius: (1.0 + delta) / 2.0,
    };
    (0..cfg.starts)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(s as u64));
            lens.ascend(&mut rng, cfg.iters, cfg.init_step)
        })
        .fold(|| 0.0f64, f64::max)
        .reduce(|| 0.0f64, f64::max)
}

/// Estimates the round-ball modulus of the `p`-norm in dimension `dim` at
/// `epsilon`: the largest `delta` with `M(delta) <= epsilon`, to the
/// configured bisection tolerance. Norms that fail the round-ball condition
/// at this `epsilon` come back flagged with an explicit witness instead.
pub fn estimate_modulus(
    p: PNorm,
    dim: usize,
    epsilon: f64,
    cfg: &LensSearchConfig,
) -> Result<ModulusEstimate> {
    if let PNorm::Finite(v) = p {
        if !(v >= 1.0) || !v.is_finite() {
            return Err(Error::InvalidInput(format!("norm exponent {v} not in [1, inf]")));
        }
    }
    if dim < 2 {
        return Err(Error::InvalidInput("dimension must be at least 2".into()));
    }
    if !(epsilon > 0.0 && epsilon < 2.0) {
        return Err(Error::InvalidInput(format!(
            "epsilon {epsilon} not in (0, 2)"
        )));
    }
    // The 1- and sup-norms carry analytic witnesses; everything below 1 fails.
    if epsilon < 1.0 {
        match p {
            PNorm::Inf => {
                return Ok(ModulusEstimate {
                    delta: 0.0,
                    error_bar: 0.0,
                    not_round_ball: Some(inf_witness(dim)),
                })
            }
            PNorm::Finite(v) if v == 1.0 => {
                return Ok(ModulusEstimate {
                    delta: 0.0,
                    error_bar: 0.0,
                    not_round_ball: Some(l1_witness(dim)),
                })
            }
            _ => {}
        }
    }

    let m0 = lens_diameter_numeric(p, dim, 0.0, cfg);
    if m0 > epsilon {
        // Wide at zero inflation: not a round-ball norm at this epsilon.
        // Reconstruct the maximizing pair for the witness.
        let lens = Lens {
            p,
            dim,
            radius: 0.5,
        };
        let mut best = (0.0, vec![0.0; dim], vec![0.0; dim]);
        for s in 0..cfg.starts {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(s as u64));
            let mid = basis(dim, 0, 0.5);
            let sigma = 0.3 * lens.radius;
            let mut z: Vec<f64> = (0..dim)
                .map(|i| mid[i] + sigma * rng.sample::<f64, _>(StandardNormal))
                .collect();
            let mut w: Vec<f64> = (0..dim)
                .map(|i| mid[i] + sigma * rng.sample::<f64, _>(StandardNormal))
                .collect();
            if lens.project(&mut z) && lens.project(&mut w) {
                let d: Vec<f64> = z.iter().zip(&w).map(|(a, b)| a - b).collect();
                let v = p.norm(&d);
                if v > best.0 {
                    best = (v, z, w);
                }
            }
        }
        return Ok(ModulusEstimate {
            delta: 0.0,
            error_bar: 0.0,
            not_round_ball: Some(RoundBallWitness {
                x: vec![0.0; dim],
                y: basis(dim, 0, 1.0),
                z: best.1,
                w: best.2,
                ratio: m0,
            }),
        });
    }

    // Bracket the crossing M(lo) <= eps < M(hi), then bisect.
    let mut lo = 0.0;
    let mut hi = 0.25;
    loop {
        if lens_diameter_numeric(p, dim, hi, cfg) > epsilon {
            break;
        }
        lo = hi;
        hi *= 2.0;
        if hi > 8.0 {
            return Err(Error::NonConvergence { lo, hi });
        }
    }
    while hi - lo > cfg.bisect_tol {
        let mid = 0.5 * (lo + hi);
        if lens_diameter_numeric(p, dim, mid, cfg) <= epsilon {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ModulusEstimate {
        delta: lo,
        error_bar: hi - lo,
        not_round_ball: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convexity::hilbert_lens_diameter;

    #[test]
    fn euclidean_lens_matches_closed_form() {
        let cfg = LensSearchConfig {
            starts: 24,
            ..LensSearchConfig::default()
        };
        for &(delta, dim) in &[(0.05, 2), (0.2, 3), (0.5, 4), (1.0, 2)] {
            let numeric = lens_diameter_numeric(PNorm::Finite(2.0), dim, delta, &cfg);
            let exact = hilbert_lens_diameter(delta, 1.0);
            assert!(
                (numeric - exact).abs() < 1e-6 * exact.max(1.0),
                "delta={delta} dim={dim}: numeric {numeric} vs exact {exact}"
            );
        }
    }

    #[test]
    fn lens_diameter_is_monotone_and_linear_for_large_delta() {
        let cfg = LensSearchConfig {
            starts: 24,
            ..LensSearchConfig::default()
        };
        let mut prev = 0.0;
        for &delta in &[0.1, 0.5, 1.0, 2.0, 3.0] {
            let m = lens_diameter_numeric(PNorm::Finite(2.0), 2, delta, &cfg);
            assert!(m >= prev);
            prev = m;
        }
        // Once the balls nearly cover each other the diameter tracks 1 + delta.
        let m = lens_diameter_numeric(PNorm::Finite(2.0), 2, 3.0, &cfg);
        assert!((m - hilbert_lens_diameter(3.0, 1.0)).abs() < 1e-6);
        assert!((hilbert_lens_diameter(3.0, 1.0) - 4.0).abs() < 0.2);
    }

    #[test]
    fn sup_norm_plane_is_flagged_with_the_axis_witness() {
        let est = estimate_modulus(PNorm::Inf, 2, 0.5, &LensSearchConfig::default()).unwrap();
        assert_eq!(est.delta, 0.0);
        let w = est.not_round_ball.expect("flag expected");
        assert_eq!(w.z, vec![0.5, 0.5]);
        assert_eq!(w.w, vec![0.5, -0.5]);
        assert!((w.ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_norm_is_flagged_with_the_corner_witness() {
        let est =
            estimate_modulus(PNorm::Finite(1.0), 2, 0.5, &LensSearchConfig::default()).unwrap();
        assert_eq!(est.delta, 0.0);
        let w = est.not_round_ball.expect("flag expected");
        // z, w in both balls at any inflation, a full |y|_1 apart.
        assert_eq!(w.z, vec![1.0, 0.0]);
        assert_eq!(w.w, vec![0.0, 1.0]);
    }

    #[test]
    fn rejects_bad_parameters() {
        let cfg = LensSearchConfig::default();
        assert!(estimate_modulus(PNorm::Finite(0.5), 2, 0.5, &cfg).is_err());
        assert!(estimate_modulus(PNorm::Finite(2.0), 1, 0.5, &cfg).is_err());
        assert!(estimate_modulus(PNorm::Finite(2.0), 2, 0.0, &cfg).is_err());
        assert!(estimate_modulus(PNorm::Finite(2.0), 2, 2.0, &cfg).is_err());
    }
}
