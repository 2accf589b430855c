//! Finite-scale estimators for the pressure functionals of finitely generated
//! semigroup actions: amalgamated, condensed, exhaustive, trajectory and free
//! pressure of multi-potentials, local entropies of measures, the skew-product
//! lift and Bowen-equation dimension roots.
//!
//! Every estimate is an interval `[lower, upper]` at a fixed depth `n` and
//! radius `ε`. Upper bounds come from explicit covers (greedy weighted set
//! cover on a grid, or exact box counting where ball geometry is known in
//! closed form); lower bounds come from separated sets or volume arguments.

pub mod ball;
pub mod dimension;
pub mod error;
pub mod geometry;
pub mod lift;
pub mod localent;
pub mod par;
pub mod potential;
pub mod pressure;
pub mod system;
pub mod systems;
pub mod word;

pub use ball::{ball_contains, consecutive_sum, dn_distance, orbit, vitali_disjointify, BallKind, BallSpec};
pub use error::{Error, Result};
pub use par::Exec;
pub use potential::{Component, MultiPotential, Observable};
pub use pressure::{
    estimate_many, estimate_pressure, extrapolate, EstimateConfig, Extrapolation, Method, MethodChoice,
    PressureEstimate, PressureKind, Region,
};
pub use system::{Domain, Generator, Point, SemigroupSystem};
pub use word::{Word, WordPool, WordRule};

/// Upper limit on `m^n` for brute-force enumeration of all words of length `n`.
pub const ENUMERATION_CAP: usize = 4096;
