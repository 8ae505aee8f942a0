//! Round-ball moduli: the inflation tolerance `delta` under which two balls
//! of radius `(1 + delta)/2 * d(x, y)` intersect in a set of diameter at
//! most `epsilon * d(x, y)`.
//!
//! Hilbert targets get the closed form; finite-dimensional `p`-norm targets
//! get a tabulated modulus estimated numerically on an `epsilon` grid. The
//! 1- and sup-norms are not uniformly convex and are rejected at dispatch,
//! with explicit witnesses available from the estimator. All concrete
//! modulus values here are computed by this crate, not quoted from
//! anywhere; reports label them as such via the descriptor strings.

pub mod lens;

pub use lens::{
    estimate_modulus, lens_diameter_numeric, LensSearchConfig, ModulusEstimate, PNorm,
    RoundBallWitness,
};

use crate::error::{Error, Result};

/// The exact boundary inflation for Hilbert space: the intersection of two
/// balls of radius `(1 + delta)/2 * d` has diameter `epsilon * d` exactly at
/// `delta = sqrt(1 + epsilon^2) - 1`.
pub fn hilbert_modulus(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidInput(format!(
            "epsilon {epsilon} must be positive"
        )));
    }
    Ok((1.0 + epsilon * epsilon).sqrt() - 1.0)
}

/// Lens-diameter identity for Hilbert space: two balls of radius
/// `(1 + delta)/2 * dist` around points `dist` apart intersect in a set of
/// diameter `dist * sqrt(2 delta + delta^2)`.
pub fn hilbert_lens_diameter(delta: f64, dist: f64) -> f64 {
    dist * (2.0 * delta + delta * delta).sqrt()
}

/// One tabulated grid point.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ModulusEntry {
    pub epsilon: f64,
    pub delta: f64,
    pub error_bar: f64,
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    AnalyticHilbert,
    Tabulated(Vec<ModulusEntry>),
}

/// A modulus function `epsilon -> delta`, analytic or tabulated, guaranteed
/// nonnegative and nondecreasing on its validity range.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundBallModulus {
    kind: Kind,
    descriptor: String,
}

impl RoundBallModulus {
    pub fn hilbert() -> RoundBallModulus {
        RoundBallModulus {
            kind: Kind::AnalyticHilbert,
            descriptor: "hilbert".to_string(),
        }
    }

    /// Wraps a conservatively shrunk, monotone table. Entries must be sorted
    /// by `epsilon` with nonnegative, nondecreasing `delta`.
    pub fn from_table(descriptor: &str, entries: Vec<ModulusEntry>) -> Result<RoundBallModulus> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("empty modulus table".into()));
        }
        for w in entries.windows(2) {
            if w[0].epsilon >= w[1].epsilon {
                return Err(Error::InvalidInput(
                    "modulus table epsilons not increasing".into(),
                ));
            }
            if w[0].delta > w[1].delta {
                return Err(Error::InvalidInput(
                    "modulus table deltas decreasing".into(),
                ));
            }
        }
        if entries.iter().any(|e| e.delta < 0.0) {
            return Err(Error::InvalidInput("negative modulus entry".into()));
        }
        Ok(RoundBallModulus {
            kind: Kind::Tabulated(entries),
            descriptor: descriptor.to_string(),
        })
    }

    /// A zero modulus; the lower-bound solver reports bounds from it as
    /// vacuous.
    pub fn zero(descriptor: &str) -> RoundBallModulus {
        RoundBallModulus {
            kind: Kind::Tabulated(vec![ModulusEntry {
                epsilon: 1.0,
                delta: 0.0,
                error_bar: 0.0,
            }]),
            descriptor: descriptor.to_string(),
        }
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn entries(&self) -> Option<&[ModulusEntry]> {
        match &self.kind {
            Kind::AnalyticHilbert => None,
            Kind::Tabulated(t) => Some(t),
        }
    }

    pub fn epsilon_range(&self) -> Option<(f64, f64)> {
        self.entries()
            .map(|t| (t[0].epsilon, t[t.len() - 1].epsilon))
    }

    /// Evaluates the modulus. Tabulated moduli interpolate linearly inside
    /// the grid and clamp conservatively outside it: 0 below the first
    /// epsilon (the table under-estimates there), the last delta above the
    /// grid (valid since the modulus is nondecreasing).
    pub fn eval(&self, epsilon: f64) -> f64 {
        if !(epsilon > 0.0) {
            return 0.0;
        }
        match &self.kind {
            Kind::AnalyticHilbert => (1.0 + epsilon * epsilon).sqrt() - 1.0,
            Kind::Tabulated(t) => {
                if epsilon < t[0].epsilon {
                    return 0.0;
                }
                if epsilon >= t[t.len() - 1].epsilon {
                    return t[t.len() - 1].delta;
                }
                let i = t.partition_point(|e| e.epsilon <= epsilon) - 1;
                let (a, b) = (&t[i], &t[i + 1]);
                let frac = (epsilon - a.epsilon) / (b.epsilon - a.epsilon);
                a.delta + frac * (b.delta - a.delta)
            }
        }
    }
}

/// Parsed target descriptor: `"hilbert"` or `"lp:<p>:<dim>"` with `p` a
/// number in `[1, inf]` (`inf` accepted literally).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetDescriptor {
    Hilbert,
    Lp { p: PNorm, dim: usize },
}

pub fn parse_target(descriptor: &str) -> Result<TargetDescriptor> {
    if descriptor == "hilbert" {
        return Ok(TargetDescriptor::Hilbert);
    }
    let mut parts = descriptor.split(':');
    let bad = || Error::InvalidInput(format!("unrecognized target descriptor `{descriptor}`"));
    if parts.next() != Some("lp") {
        return Err(bad());
    }
    let p_str = parts.next().ok_or_else(bad)?;
    let d_str = parts.next().ok_or_else(bad)?;
    if parts.next().is_some() {
        return Err(bad());
    }
    let p = match p_str {
        "inf" | "infinity" => PNorm::Inf,
        s => {
            let v: f64 = s.parse().map_err(|_| bad())?;
            if !(v >= 1.0) || !v.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "norm exponent {v} not in [1, inf]"
                )));
            }
            PNorm::Finite(v)
        }
    };
    let dim: usize = d_str.parse().map_err(|_| bad())?;
    if dim < 2 {
        return Err(Error::InvalidInput("dimension must be at least 2".into()));
    }
    Ok(TargetDescriptor::Lp { p, dim })
}

/// The default `epsilon` grid for tabulated moduli: 0.1, 0.2, ..., 1.0.
pub fn default_epsilon_grid() -> Vec<f64> {
    (1..=10).map(|i| i as f64 / 10.0).collect()
}

/// Dispatch: the analytic modulus for Hilbert targets, a tabulated one for
/// uniformly convex `p`-norm targets. Each grid estimate is shrunk by its
/// error bar and regularized by running maximum so the table is a valid
/// under-estimate of the true modulus.
pub fn modulus_for_target(
    descriptor: &str,
    grid: &[f64],
    cfg: &LensSearchConfig,
) -> Result<RoundBallModulus> {
    match parse_target(descriptor)? {
        TargetDescriptor::Hilbert => Ok(RoundBallModulus::hilbert()),
        TargetDescriptor::Lp { p, dim } => {
            match p {
                PNorm::Inf => return Err(Error::NotUniformlyConvex(descriptor.to_string())),
                PNorm::Finite(v) if v == 1.0 => {
                    return Err(Error::NotUniformlyConvex(descriptor.to_string()))
                }
                _ => {}
            }
            if grid.is_empty() {
                return Err(Error::InvalidInput("empty epsilon grid".into()));
            }
            let mut grid = grid.to_vec();
            grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut entries = Vec::with_capacity(grid.len());
            let mut running = 0.0f64;
            for &eps in &grid {
                let est = estimate_modulus(p, dim, eps, cfg)?;
                if est.not_round_ball.is_some() {
                    return Err(Error::NotUniformlyConvex(descriptor.to_string()));
                }
                let shrunk = (est.delta - est.error_bar).max(0.0);
                running = running.max(shrunk);
                entries.push(ModulusEntry {
                    epsilon: eps,
                    delta: running,
                    error_bar: est.error_bar,
                });
            }
            RoundBallModulus::from_table(descriptor, entries)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hilbert_closed_form_values() {
        assert!((hilbert_modulus(1.0).unwrap() - (std::f64::consts::SQRT_2 - 1.0)).abs() < 1e-15);
        assert!((hilbert_modulus(0.1).unwrap() - 0.004_987_562_112_089_03).abs() < 1e-12);
        // Degenerate lens as epsilon -> 0.
        assert!(hilbert_modulus(1e-9).unwrap() < 1e-15);
        assert!(hilbert_modulus(0.0).is_err());
        assert!(hilbert_modulus(-1.0).is_err());
    }

    #[test]
    fn modulus_solves_the_lens_identity() {
        for &eps in &[0.05, 0.3, 1.0, 1.7] {
            let delta = hilbert_modulus(eps).unwrap();
            assert!((hilbert_lens_diameter(delta, 1.0) - eps).abs() < 1e-12);
        }
    }

    #[test]
    fn parse_targets() {
        assert_eq!(parse_target("hilbert").unwrap(), TargetDescriptor::Hilbert);
        assert!(matches!(
            parse_target("lp:4:8").unwrap(),
            TargetDescriptor::Lp {
                p: PNorm::Finite(_),
                dim: 8
            }
        ));
        assert!(matches!(
            parse_target("lp:inf:2").unwrap(),
            TargetDescriptor::Lp { p: PNorm::Inf, .. }
        ));
        assert!(parse_target("lq:2:2").is_err());
        assert!(parse_target("lp:0.5:2").is_err());
        assert!(parse_target("lp:2:1").is_err());
    }

    #[test]
    fn dispatch_rejects_non_uniformly_convex_targets() {
        let cfg = LensSearchConfig::default();
        let grid = default_epsilon_grid();
        assert!(matches!(
            modulus_for_target("lp:1:2", &grid, &cfg),
            Err(Error::NotUniformlyConvex(_))
        ));
        assert!(matches!(
            modulus_for_target("lp:inf:2", &grid, &cfg),
            Err(Error::NotUniformlyConvex(_))
        ));
    }

    #[test]
    fn hilbert_dispatch_is_analytic() {
        let m = modulus_for_target("hilbert", &[], &LensSearchConfig::default()).unwrap();
        assert_eq!(m.descriptor(), "hilbert");
        assert!(m.entries().is_none());
        assert!((m.eval(1.0) - (std::f64::consts::SQRT_2 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn table_interpolation_stays_between_neighbors() {
        let entries = vec![
            ModulusEntry { epsilon: 0.2, delta: 0.01, error_bar: 0.0 },
            ModulusEntry { epsilon: 0.5, delta: 0.1, error_bar: 0.0 },
            ModulusEntry { epsilon: 1.0, delta: 0.4, error_bar: 0.0 },
        ];
        let m = RoundBallModulus::from_table("lp:test", entries).unwrap();
        assert_eq!(m.eval(0.1), 0.0);
        assert_eq!(m.eval(1.5), 0.4);
        for i in 0..=10 {
            let eps = 0.2 + 0.08 * i as f64;
            let v = m.eval(eps);
            assert!((0.01..=0.4).contains(&v));
        }
        let mut prev = 0.0;
        for i in 0..=30 {
            let v = m.eval(0.05 + 0.04 * i as f64);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn table_validation() {
        let bad = vec![
            ModulusEntry { epsilon: 0.5, delta: 0.2, error_bar: 0.0 },
            ModulusEntry { epsilon: 1.0, delta: 0.1, error_bar: 0.0 },
        ];
        assert!(RoundBallModulus::from_table("x", bad).is_err());
        assert!(RoundBallModulus::from_table("x", vec![]).is_err());
    }

    /// Small tabulated build against the analytic oracle; the full-grid
    /// agreement suite lives in the acceptance tests.
    #[test]
    fn tabulated_euclidean_matches_hilbert() {
        let cfg = LensSearchConfig {
            starts: 24,
            ..LensSearchConfig::default()
        };
        let m = modulus_for_target("lp:2:2", &[0.2, 0.5], &cfg).unwrap();
        let t = m.entries().unwrap();
        assert_eq!(t.len(), 2);
        for e in t {
            let exact = hilbert_modulus(e.epsilon).unwrap();
            assert!(
                (e.delta - exact).abs() < 1e-3,
                "eps {}: {} vs {}",
                e.epsilon,
                e.delta,
                exact
            );
            // Conservative under-estimate.
            assert!(e.delta <= exact + 1e-9);
        }
    }
}
