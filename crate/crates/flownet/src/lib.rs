//! Directed-network transport simulator and statistics toolkit.
//!
//! The crate covers the full pipeline for studying how a conserved scalar
//! (money, traffic, load) distributes over a directed network:
//!
//! - [`graph`]: edge-list ingestion, compressed adjacency storage, and
//!   strongly connected component extraction.
//! - [`synth`]: scale-free random digraphs with tunable degree-degree
//!   correlation.
//! - [`shuffle`]: degree-preserving randomization used as a null model.
//! - [`transport`]: the two linear spreading models, closed (conservative)
//!   and open (dissipation plus injection) dynamics, and their spectral
//!   convergence diagnostics.
//! - [`stats`]: heavy-tail fits, degree-correlation curves, log-binned
//!   conditional statistics, and weighted neighbor sums.
//!
//! Everything randomized takes an explicit seed and is reproducible
//! bit-for-bit at any worker count.

pub mod graph;
pub mod shuffle;
pub mod stats;
pub mod synth;
pub mod transport;
