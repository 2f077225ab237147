//! Toolkit for the two-experiment test of the exclusivity principle.
//!
//! A Bell-CHSH experiment with events forming the circulant graph C8(3,4)
//! and a non-contextuality experiment with events forming its complement
//! C8(1,2) are combined through sixteen merge maps. Each map gives an
//! exclusivity inequality `W_k ≤ 1`; together they imply `S · R ≤ 8`, which
//! the quantum maxima `2 + √2` and `8 - 4√2` saturate.
//!
//! Modules, bottom up:
//!
//! - [`numerics`]: complex vectors, Born probabilities, Hermitian eigen-extremes
//! - [`exgraph`]: exclusivity graphs and their combinatorics
//! - [`scenario`]: the two quantum scenarios
//! - [`eprinciple`]: merge maps, `W` sums, product and cross bounds
//! - [`montecarlo`]: seeded photon-counting simulation with white noise
//! - [`report`]: table regeneration and the verification suite

pub mod eprinciple;
pub mod exgraph;
pub mod measured;
pub mod montecarlo;
pub mod numerics;
pub mod report;
pub mod scenario;

pub use num_complex::Complex64;
