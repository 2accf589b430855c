//! The system zoo.

pub mod interval;
pub mod toral;
pub mod zoo;

pub use interval::{core_intervals, expanding_interval_system, AffineMap};
pub use toral::{
    analytic_ball_box, berend_check, closed_form_entropies, toral_apply, toral_eigen, BallBox, BerendConclusion,
    BerendVerdict, BoxKind, IntMatrix,
};
pub use zoo::{catalog, parse_system};
