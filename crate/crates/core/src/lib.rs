//! Kirkwood-Dirac quasiprobability distributions for finite-dimensional
//! states, their nonpositivity witnesses, and convex-roof bounds.
//!
//! The main entry points are:
//!
//! * [`kd::kd_table`] and the witnesses [`kd::total_nonpositivity`] and
//!   [`kd::is_kd_positive`];
//! * [`incompatibility`], counting support uncertainty and testing complete
//!   incompatibility via the minors of the transition matrix;
//! * [`pure_positive`], enumerating the pure states of minimal support
//!   uncertainty;
//! * [`geometry`], LP membership certificates, facets and finite convex roofs;
//! * [`roof`], upper and lower bounds on the convex roofs of the support
//!   uncertainty and of the total nonpositivity;
//! * [`case_studies`], the spin-1 counterexample and DFT/Haar studies.

pub mod case_studies;
pub mod error;
pub mod geometry;
pub mod incompatibility;
pub mod io;
pub mod kd;
pub mod numerics;
pub mod pure_positive;
pub mod roof;
mod subsets;
pub mod tol;

pub use error::{Error, Result};
pub use kd::{DensityMatrix, KDTable, PureState, TransitionMatrix};
pub use numerics::{CMatrix, C64};
pub use tol::Tolerances;
