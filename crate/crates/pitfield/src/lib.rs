//! Phase-field pitting corrosion with a finite interaction horizon.
//!
//! This crate simulates a two-field model of pitting corrosion: a phase
//! field `φ` marking intact metal (1) versus electrolyte (0), coupled to a
//! normalized metal concentration `c` through a KKS-style bulk free energy.
//! `φ` relaxes by an Allen–Cahn (non-conserved) flow and `c` by a
//! Cahn–Hilliard-type (conserved) flow.
//!
//! The point of the library is the *nonlocal* spatial discretization: the
//! Laplacian is replaced by an integral operator with a finite interaction
//! radius δ (the horizon), evaluated as a peridynamic-style sum over
//! neighbor nodes. The classical five-point scheme ships alongside it as
//! the local twin, and the [`diagnostics`] module measures how the two
//! converge to each other as δ → 0.
//!
//! Modules, roughly inside-out:
//!
//! - [`kernel`] — the horizon kernel `J_δ` and its normalization.
//! - [`material`] — the KKS free energy `f(φ, c)` and its derivatives.
//! - [`grid`] — uniform grid, flat field storage, pit mask, neighbor table.
//! - [`operators`] — the discrete nonlocal operator and the five-point
//!   Laplacian.
//! - [`stepper`] — explicit Euler time stepping with CFL bounds and blow-up
//!   detection.
//! - [`diagnostics`] — energy, mass, error norms, consistency and
//!   convergence harnesses.
//! - [`fields`] — canned initial conditions (benchmark pit, seeded smooth
//!   random fields, analytic test fields).
//! - [`config`] / [`io`] — the flat dotted-key run configuration and CSV
//!   emission behind the `pitfield` binary.
//!
//! The rendered user guide lives in `book/`; its chapters are also
//! embedded under [`guide`] so that every example in the book is a
//! doc-test of this crate.

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod fields;
pub mod grid;
pub mod guide;
pub mod io;
pub mod kernel;
pub mod material;
pub mod operators;
pub mod stepper;

pub use error::{Error, Result};
