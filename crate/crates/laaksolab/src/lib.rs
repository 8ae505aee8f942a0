//! A metric-geometry laboratory around recursively glued diamond graphs.
//!
//! The crate builds a family of finite unit-edge graphs whose copy hierarchy
//! survives gluing, plus the related obstruction spaces (glued chains,
//! scaled unions with bounded geometry, binary trees, recursive sup-norm
//! point sets), and certifies biLipschitz distortion lower bounds for maps
//! of those spaces into uniformly convex targets:
//!
//! * [`spaces`] constructs everything exactly, with dyadic-rational
//!   distance tables and hierarchy addressing.
//! * [`convexity`] supplies round-ball moduli: analytic for Hilbert
//!   targets, numerically tabulated for `p`-norm targets, with witnesses
//!   for the norms that fail.
//! * [`certifier`] turns the quadruple inequality into executable
//!   certificates: per-quadruple checks, amplification traces down the
//!   copy hierarchy, the lower-bound solver, large-scale reduction of
//!   quasi-isometries, and the biLipschitz promotion.
//! * [`embedder`] searches numerically for low-distortion embeddings, the
//!   empirical ceiling to pair with the certified floor.
//! * [`io`] pins the deterministic file formats the CLI speaks.

pub mod budget;
pub mod convexity;
pub mod dyadic;
pub mod embedder;
pub mod error;
pub mod io;
pub mod spaces;

// The certifier consumes spaces, convexity and embedder types; keep it last
// in reading order.
pub mod certifier;

pub use budget::Budget;
pub use dyadic::Dyadic;
pub use error::{Error, Result};
