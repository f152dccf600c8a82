//! Cartoon + texture image decomposition under the TV / G-norm model.
//!
//! Two complete pipelines are provided and serve as cross-checks for each
//! other:
//!
//! * [`chambolle`]: Chambolle's dual projector onto the G-ball, used both for
//!   ROF denoising and for the projector-based decomposition.
//! * [`bregman`] + [`gprox`]: split Bregman ROF, and the G-norm subproblem
//!   solved through its dual ROF instance.
//!
//! [`decompose`] drives either pipeline; [`imageio`] handles PGM and raw
//! float I/O; [`synthetic`] builds test images with known parts.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod bregman;
pub mod chambolle;
pub mod cli;
pub mod decompose;
pub mod energy;
pub mod error;
pub mod gprox;
pub mod grid;
pub mod imageio;
pub mod spectral;
pub mod stats;
pub mod synthetic;

pub use bregman::{p_rof, shrink, BregmanParams, UUpdate};
pub use chambolle::{project_g, rof_chambolle, ProjectorParams};
pub use decompose::{decompose, DecompParams, DecompositionResult, Method};
pub use error::{Error, Result};
pub use gprox::gnorm_prox;
pub use grid::{ScalarField, VectorField};
pub use stats::RunStats;
