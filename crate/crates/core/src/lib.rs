//! Exact dynamics of pairwise entanglement on a four-qubit triangular spin ladder.
//!
//! The ladder carries XX Heisenberg coupling on its four rungs (a closed 4-cycle)
//! and a z-axis Dzyaloshinskii–Moriya coupling on its two legs. Starting from a
//! Bell pair on the first rung, the crate evolves the state exactly through the
//! spectral decomposition of the 16×16 Hamiltonian, measures Wootters concurrence,
//! two-point correlations and total-spin expectations, and locates entanglement
//! transfer and W-state events.
//!
//! Every numeric route has a closed-form counterpart in [`analytic`], so results
//! can be cross-checked point by point (see [`verify`]).
//!
//! ```
//! use laddyn::{dynamics::Propagator, model, measures};
//!
//! let params = model::ModelParams::new(0.6).unwrap();
//! let h = model::build_hamiltonian(&params, &model::CouplingGraph::ladder()).unwrap();
//! let prop = Propagator::new(&h, &model::initial_state()).unwrap();
//! let psi = prop.evolve(0.0);
//! let c12 = measures::pair_concurrence(&psi, 1, 2).unwrap();
//! assert!((c12 - 1.0).abs() < 1e-12);
//! ```

pub mod analytic;
pub mod calibration;
pub mod cli;
pub mod detect;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod model;
pub mod output;
pub mod state;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, EigenSystem, C64};
pub use state::{QuantumState, Site};
