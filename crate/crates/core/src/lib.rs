//! Explicit time integration of split Hamiltonian systems
//! `H(q, p) = ½ pᵀM⁻¹p + V(q)` with free flights and momentum jumps.
//!
//! Positions advance along straight free-flight segments; momenta change
//! only at the nodes, by twice the time-averaged force along the adjacent
//! segment. The scheme is explicit, second order, time-reversible for
//! symmetric quadratures, conserves total momentum and conserves the
//! pseudo-energy `V(q^n) + ½ (p^{n-1/2})ᵀ M⁻¹ p^{n+1/2}` whenever the force
//! integrals are exact, for any sequence of step sizes.
//!
//! The crate also provides an asynchronous variant where fast particles
//! take `K` substeps per step of the slow ones ([`asynchronous`]), the
//! benchmark systems ([`models`]), error analysis and a benchmark harness
//! ([`bench`]) driven by TOML configuration files.

pub mod analysis;
pub mod asynchronous;
pub mod bench;
pub mod error;
pub mod mass;
pub mod models;
pub mod potential;
pub mod quadrature;
pub mod reference;
pub mod stability;
pub mod state;
pub mod sync;

pub use error::{Error, Result};
pub use mass::MassMatrix;
pub use potential::Potential;
pub use quadrature::{builtin_rule, BuiltinRule, QuadratureRule};
pub use state::{make_state, PhaseState, TrajectoryRecord};
pub use sync::{discrete_energy, pseudo_energy, ForceMode, Scheme, StepControl, StepMode};
