//! Central measures on numberings of poset ideals.
//!
//! The crate covers finite posets and their ideal graphs, lattice words and
//! their de Finetti classes, the restricted Bernoulli measures `μ_Λ` with
//! certified survival brackets and two independent samplers, the one-dimensional
//! ideal structure of `ℤ₊^d`, and an RSK comparison harness.

pub mod central_measure;
pub mod error;
pub mod ideal_graph;
pub mod interval;
pub mod io;
pub mod lattice_words;
pub mod poset;
pub mod rsk_bridge;
pub mod zd_lattice;

pub use error::{Error, Result};
pub use interval::Bracket;
pub use poset::{validate_spectrum, FiniteIdeal, Poset, Relation, Spectrum};
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
