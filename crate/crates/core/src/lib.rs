//! Exact and certified tests for expansiveness of linear semigroup actions
//! on vector spaces, tori and solenoids.

pub mod action;
pub mod error;
pub mod matrix;
pub mod numeric;
pub mod orbits;
pub mod poly;
pub mod rational;
pub mod roots;
pub mod solenoid;
pub mod spectral;
pub mod subspace;
pub mod torus;
pub mod weights;

pub use action::{Mode, SemigroupAction};
pub use error::{Error, Result};
pub use matrix::QMatrix;
pub use poly::{char_poly, reciprocal_split, sturm_root_count, QPoly};
pub use rational::{QVector, Rational};
pub use subspace::{kernel, Subspace};
pub use spectral::{circle_root_count, single_expansive, unit_disk_profile, DiskProfile, SingleVerdict};
pub use orbits::{expansiveness_check, ExpansivenessVerdict, Status};
