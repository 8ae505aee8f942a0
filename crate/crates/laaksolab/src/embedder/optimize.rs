//! Multi-start minimization of the smoothed distortion objective.
//!
//! The objective is `F_beta = lse_beta(log ratios) + lse_beta(-log ratios)`
//! where `lse_beta` is the soft maximum `(1/beta) log sum exp(beta t)` over
//! all pairs. It sandwiches the exact log-distortion:
//! `log D <= F_beta <= log D + 2 log(#pairs) / beta`, and its global minimum
//! is attained exactly at the configurations whose pair ratios are all equal
//! whenever such a configuration exists. Annealing `beta` upward sharpens
//! the soft max toward the true max.
//!
//! Restarts are independent, seeded `seed + i`, and may run concurrently;
//! the reduction picks the smallest exact distortion with ties broken by
//! restart index, so the result is independent of scheduling.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spaces::FiniteMetricSpace;

use super::{p_dist, Embedding, Provenance, Target};

#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub iters_per_stage: usize,
    pub init_step: f64,
    pub beta0: f64,
    pub beta_max: f64,
    /// Coincidence floor as a fraction of the minimum domain distance.
    pub eta_scale: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            restarts: 20,
            iters_per_stage: 200,
            init_step: 0.5,
            beta0: 2.0,
            beta_max: 256.0,
            eta_scale: 1e-8,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts < 1 {
            return Err(Error::InvalidInput("restarts must be at least 1".into()));
        }
        if self.iters_per_stage < 1 {
            return Err(Error::InvalidInput("iterations must be at least 1".into()));
        }
        if !(self.beta0 > 0.0 && self.beta_max >= self.beta0) {
            return Err(Error::InvalidInput(
                "smoothing schedule must increase from a positive start".into(),
            ));
        }
        if !(self.eta_scale > 0.0) {
            return Err(Error::InvalidInput("coincidence floor must be positive".into()));
        }
        if !(self.init_step > 0.0) {
            return Err(Error::InvalidInput("initial step must be positive".into()));
        }
        Ok(())
    }

    fn betas(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut b = self.beta0;
        while b < self.beta_max {
            out.push(b);
            b *= 2.0;
        }
        out.push(self.beta_max);
        out
    }
}

/// The smoothed problem: pair list, domain log-distances, norm exponent and
/// coincidence floor.
pub struct SmoothedObjective {
    pairs: Vec<(u32, u32)>,
    log_dom: Vec<f64>,
    dim: usize,
    p: f64,
    eta: f64,
}

fn logsumexp(values: &[f64], beta: f64) -> f64 {
    let m = values.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let s: f64 = values.iter().map(|&v| (beta * (v - m)).exp()).sum();
    m + s.ln() / beta
}

impl SmoothedObjective {
    pub fn new(space: &FiniteMetricSpace, dim: usize, p: f64, eta: f64) -> SmoothedObjective {
        let n = space.len();
        let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
        let mut log_dom = Vec::with_capacity(pairs.capacity());
        for i in 0..n {
            for j in (i + 1)..n {
                pairs.push((i as u32, j as u32));
                log_dom.push(space.d(i, j).to_f64().ln());
            }
        }
        SmoothedObjective {
            pairs,
            log_dom,
            dim,
            p,
            eta,
        }
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    /// Log ratios `log(image/domain)` per pair, image distances floored at
    /// `eta`. The flag reports whether the floor engaged.
    fn log_ratios(&self, coords: &[f64]) -> (Vec<f64>, bool) {
        let mut floored = false;
        let t = self
            .pairs
            .iter()
            .zip(&self.log_dom)
            .map(|(&(u, v), &ld)| {
                let a = &coords[u as usize * self.dim..(u as usize + 1) * self.dim];
                let b = &coords[v as usize * self.dim..(v as usize + 1) * self.dim];
                let mut d = p_dist(a, b, self.p);
                if d < self.eta {
                    d = self.eta;
                    floored = true;
                }
                d.ln() - ld
            })
            .collect();
        (t, floored)
    }

    pub fn value(&self, coords: &[f64], beta: f64) -> f64 {
        let (t, _) = self.log_ratios(coords);
        let neg: Vec<f64> = t.iter().map(|&x| -x).collect();
        logsumexp(&t, beta) + logsumexp(&neg, beta)
    }

    /// Analytic gradient of the smoothed objective. Pairs at the coincidence
    /// floor contribute nothing (the floored distance is locally constant);
    /// the flag reports them.
    pub fn gradient(&self, coords: &[f64], beta: f64) -> (Vec<f64>, bool) {
        let (t, floored) = self.log_ratios(coords);
        let m_pos = t.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let m_neg = t.iter().fold(f64::INFINITY, |a, &b| a.min(b));
        let mut w_pos: Vec<f64> = t.iter().map(|&x| (beta * (x - m_pos)).exp()).collect();
        let mut w_neg: Vec<f64> = t.iter().map(|&x| (beta * (m_neg - x)).exp()).collect();
        let s_pos: f64 = w_pos.iter().sum();
        let s_neg: f64 = w_neg.iter().sum();
        w_pos.iter_mut().for_each(|w| *w /= s_pos);
        w_neg.iter_mut().for_each(|w| *w /= s_neg);

        let mut grad = vec![0.0; coords.len()];
        for (k, &(u, v)) in self.pairs.iter().enumerate() {
            let coeff = w_pos[k] - w_neg[k];
            if coeff == 0.0 {
                continue;
            }
            let (ui, vi) = (u as usize * self.dim, v as usize * self.dim);
            let a = &coords[ui..ui + self.dim];
            let b = &coords[vi..vi + self.dim];
            let d = p_dist(a, b, self.p);
            if d < self.eta {
                continue;
            }
            if self.p == 2.0 {
                let inv = 1.0 / (d * d);
                for c in 0..self.dim {
                    let g = coeff * (a[c] - b[c]) * inv;
                    grad[ui + c] += g;
                    grad[vi + c] -= g;
                }
            } else {
                // d/dx log |x|_p = sign(x) |x/d|^(p-1) / d componentwise.
                for c in 0..self.dim {
                    let diff = a[c] - b[c];
                    let g = coeff * diff.signum() * (diff.abs() / d).powf(self.p - 1.0) / d;
                    grad[ui + c] += g;
                    grad[vi + c] -= g;
                }
            }
        }
        (grad, floored)
    }
}

fn default_eta(space: &FiniteMetricSpace, scale: f64) -> f64 {
    scale
        * space
            .min_positive_distance()
            .map(|d| d.to_f64())
            .unwrap_or(1.0)
}

/// The smoothed objective value; exposed for the sandwich and stationarity
/// properties.
pub fn objective(space: &FiniteMetricSpace, coords: &[f64], dim: usize, beta: f64, p: f64) -> f64 {
    let obj = SmoothedObjective::new(space, dim, p, default_eta(space, 1e-8));
    obj.value(coords, beta)
}

/// The analytic gradient of the smoothed objective at `coords`, with a flag
/// reporting pairs floored at the coincidence threshold.
pub fn gradient(
    space: &FiniteMetricSpace,
    coords: &[f64],
    dim: usize,
    beta: f64,
    p: f64,
) -> (Vec<f64>, bool) {
    let obj = SmoothedObjective::new(space, dim, p, default_eta(space, 1e-8));
    obj.gradient(coords, beta)
}

enum RestartOutcome {
    Done {
        coords: Vec<f64>,
        iterations: u64,
    },
    Abandoned(String),
}

fn run_restart(
    obj: &SmoothedObjective,
    space: &FiniteMetricSpace,
    betas: &[f64],
    cfg: &OptimizerConfig,
    restart: usize,
) -> RestartOutcome {
    let n = space.len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(restart as u64));
    let mut coords: Vec<f64> = (0..n * obj.dim)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    // Scale to mean pair ratio 1.
    let mut sum = 0.0;
    for (k, &(u, v)) in obj.pairs.iter().enumerate() {
        let a = &coords[u as usize * obj.dim..(u as usize + 1) * obj.dim];
        let b = &coords[v as usize * obj.dim..(v as usize + 1) * obj.dim];
        sum += p_dist(a, b, obj.p) / obj.log_dom[k].exp();
    }
    let mean = sum / obj.pairs.len() as f64;
    if mean > 0.0 && mean.is_finite() {
        coords.iter_mut().for_each(|c| *c /= mean);
    }

    let mut iterations = 0u64;
    for &beta in betas {
        let mut f = obj.value(&coords, beta);
        if !f.is_finite() {
            return RestartOutcome::Abandoned(format!(
                "restart {restart}: non-finite objective at beta {beta}"
            ));
        }
        let mut step = cfg.init_step;
        for _ in 0..cfg.iters_per_stage {
            let (grad, _) = obj.gradient(&coords, beta);
            let mut accepted = false;
            for _ in 0..40 {
                let trial: Vec<f64> = coords
                    .iter()
                    .zip(&grad)
                    .map(|(c, g)| c - step * g)
                    .collect();
                let ft = obj.value(&trial, beta);
                if !ft.is_finite() {
                    return RestartOutcome::Abandoned(format!(
                        "restart {restart}: non-finite objective at beta {beta}"
                    ));
                }
                if ft < f {
                    coords = trial;
                    f = ft;
                    step *= 1.25;
                    accepted = true;
                    break;
                }
                step *= 0.5;
                if step < 1e-18 {
                    break;
                }
            }
            iterations += 1;
            if !accepted && step < 1e-18 {
                break; // stationary at this smoothing level
            }
        }
    }
    RestartOutcome::Done { coords, iterations }
}

/// Best-of-restarts minimization. Each restart anneals the smoothing from
/// `beta0` to `beta_max` with backtracking gradient steps; the returned
/// embedding carries exact statistics recomputed from its coordinates.
pub fn minimize_distortion(
    space: &FiniteMetricSpace,
    target: Target,
    cfg: &OptimizerConfig,
) -> Result<Embedding> {
    cfg.validate()?;
    if !(target.p >= 2.0) || target.p.is_infinite() {
        return Err(Error::InvalidInput(format!(
            "optimizer targets need p in [2, inf), got {}",
            target.p
        )));
    }
    if target.dim < 1 {
        return Err(Error::InvalidInput("dimension must be positive".into()));
    }
    if space.len() < 2 {
        return Err(Error::InvalidInput(
            "space must have at least two points".into(),
        ));
    }
    let eta = default_eta(space, cfg.eta_scale);
    let obj = SmoothedObjective::new(space, target.dim, target.p, eta);
    let betas = cfg.betas();

    let outcomes: Vec<(usize, RestartOutcome)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| (r, run_restart(&obj, space, &betas, cfg, r)))
        .collect();

    let mut best: Option<(f64, usize, Vec<f64>, u64)> = None;
    let mut failures = Vec::new();
    for (r, outcome) in outcomes {
        match outcome {
            RestartOutcome::Done { coords, iterations } => {
                let trial = Embedding::new(
                    space,
                    space.ids().to_vec(),
                    coords.clone(),
                    target,
                    Provenance {
                        seed: cfg.seed,
                        restarts: cfg.restarts,
                        iterations,
                    },
                );
                match trial {
                    Ok(e) => {
                        let d = e.stats().distortion;
                        let better = match &best {
                            Some((bd, br, _, _)) => d < *bd || (d == *bd && r < *br),
                            None => true,
                        };
                        if better {
                            best = Some((d, r, coords, iterations));
                        }
                    }
                    Err(err) => failures.push(format!("restart {r}: {err}")),
                }
            }
            RestartOutcome::Abandoned(reason) => failures.push(reason),
        }
    }
    match best {
        Some((_, _, coords, iterations)) => Embedding::new(
            space,
            space.ids().to_vec(),
            coords,
            target,
            Provenance {
                seed: cfg.seed,
                restarts: cfg.restarts,
                iterations,
            },
        ),
        None => Err(Error::OptimizationFailed {
            restarts: cfg.restarts,
            reason: failures.join("; "),
        }),
    }
}
