//! Bregman divergences, matrix means, and their canonical
//! symmetrizations on the cone of symmetric positive definite matrices,
//! together with a variational engine that verifies the canonical-mean
//! identities numerically.
//!
//! Module map:
//!
//! - [`spd_core`]: validated matrix types, eigendecomposition-based
//!   matrix functions, the invariant metric, geodesics, Löwner order.
//! - [`mirror_maps`]: the mirror-map interface and the squared
//!   Frobenius, negative von Neumann entropy, and Burg entropy maps.
//! - [`means`]: arithmetic, geometric, harmonic, log-Euclidean and
//!   logarithmic means, plus the canonical means of both
//!   symmetrization directions.
//! - [`divergences`]: Bregman divergence, Jeffreys / forward / reverse
//!   symmetrizations, closed forms, and published-table oracles.
//! - [`variational`]: minimization over the cone, gradient-identity
//!   checks, the mean-axiom auditor, and operator-monotonicity sampling.
//! - [`sampling`]: seed-driven random SPD/GL/orthogonal draws.
//!
//! Sample sweeps in [`variational`] run on rayon when the default
//! `parallel` feature is enabled and sequentially otherwise.

pub mod divergences;
pub mod error;
pub mod means;
pub mod mirror_maps;
pub mod sampling;
pub mod spd_core;
pub mod variational;

pub use error::{Result, SpdError};
pub use mirror_maps::{make_map, MapKind, MirrorMap};
pub use spd_core::{validate_spd, SpdMatrix, SymMatrix};
