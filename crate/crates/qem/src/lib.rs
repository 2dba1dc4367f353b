//! Two-stage Hamiltonian belief dynamics for three-list source
//! recognition.
//!
//! The model represents a participant's memory state as a unit-norm
//! amplitude vector over `(V1, V2, V3, G, N)`: verbatim support for each
//! studied list, shared gist support, and non-related support. Seeing a
//! cue word and reading a probe question each drive a Schroedinger
//! evolution stage; projecting the final state yields acceptance
//! probabilities for the four probes, and their ratio gives the unpacking
//! factor that quantifies over-distributed source memory. Eight drivers
//! (`nu`, `nu_prime`, `gamma`, four per-class `gamma_prime` values, and
//! the probe-stage attenuation `kappa`) are fitted to observed choice
//! proportions by RMSE grid search plus simplex refinement.
//!
//! # Modules
//!
//! - [`linalg`]: 5x5 symmetric eigendecomposition, unitary propagators,
//!   and an independent power-series propagator used as a cross-check.
//! - [`model`]: states, Hamiltonians, projectors, two-stage evolution,
//!   acceptance probabilities, unpacking factors, traces, and sequential
//!   queries.
//! - [`dataset`]: observations CSV ingestion and validation.
//! - [`fit`]: RMSE objective, multi-resolution grid search, Nelder-Mead
//!   refinement.
//! - [`cli`]: the `qem` command-line front end.
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --example predict_table        # 64-cell prediction table
//! cargo run --example unpacking_factors    # UF values and their balance terms
//! cargo run --example trace_evolution      # probability time courses
//! cargo run --example order_dependence     # sequential-query order effects
//! cargo run --example fit_parameters       # grid search + refinement on the bundled data
//! cargo run --example propagator_cross_check  # spectral vs power-series propagators
//! ```
//!
//! The same functionality is scripted through the `qem` binary; see the
//! README for the subcommands.

// Index-based loops here mirror the matrix arithmetic they implement.
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod dataset;
pub mod fit;
pub mod linalg;
pub mod model;

pub use dataset::{load_observations, DataError, ObservedDataset};
pub use fit::{grid_search, refine, rmse, FitError, FitParam, FitResult, GridAxis, GridSpec};
pub use linalg::{
    eigendecompose, propagator, taylor_propagator, Eigen, LinalgError, SymMatrix5, Unitary5,
    Vector5, C64,
};
pub use model::{
    acceptance_probability, cue_hamiltonian, final_state, initial_state, predict_table,
    probe_hamiltonian, projector, sequential_acceptance, trace_evolution, uf_decomposition,
    unpacking_factor, Basis, Cue, Drivers, GammaPrime, ModelError, ModelParams, PredictionTable,
    Probe, SequentialOutcome, TracePoint, UfDecomposition, WordClass,
};
