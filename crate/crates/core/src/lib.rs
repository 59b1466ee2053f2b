//! Domain-aware Markov logic networks.
//!
//! A model is a list of weighted first-order formulas. When it is grounded
//! over concrete domains, every formula weight is divided by a scaling factor
//! computed from how many ground formulas each of its atoms takes part in, so
//! weights learned on small domains keep sensible marginals on large ones.
//!
//! - [`logic`]: formulas, typing, substitution and evaluation
//! - [`io`]: model/database formats and CSV output
//! - [`grounder`]: connection vectors, scaling factors and ground networks
//! - [`inference`]: Gibbs sampling and exact enumeration
//! - [`learning`]: pseudo-likelihood weight learning
//! - [`fs`]: the Friends & Smokers benchmark

pub mod fs;
pub mod grounder;
pub mod inference;
pub mod io;
pub mod learning;
pub mod logic;

pub use grounder::{Aggregator, GroundNetwork, Mode};
pub use inference::{MarginalTable, World};
pub use io::{Database, Model};
