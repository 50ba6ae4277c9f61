//! Exact Weil heights over Q, finitely generated multiplicative groups,
//! polytope constants, and lattice-point censuses.
//!
//! The pipeline: `heights` provides places, normalized absolute values, and
//! exact heights; `multgroup` analyzes finitely generated subgroups of
//! (Q*)^k into basis, torsion, and support; `logspace` carries the exact
//! log-linear forms, the polytope C(Γ), its volume, and the constant c(Γ);
//! `census` counts group elements and linear-combination values of bounded
//! height; `recurrence` evaluates and counts linear recurrence terms;
//! `represent` counts values of coefficient families; `cli` wires a config
//! file to reports.
//!
//! Everything that can be exact is exact (rationals, lattice data, counts).
//! Floating point appears only in volume computation, always with an error
//! estimate, and in enumeration bounding boxes, always enlarged by a margin.

pub mod census;
pub mod cli;
pub mod heights;
pub mod logspace;
pub mod multgroup;
pub mod recurrence;
pub mod represent;
pub mod selftest;

pub use heights::{Place, Rational};
pub use multgroup::GroupDescriptor;
