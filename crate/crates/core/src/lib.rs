//! Extreme-value analysis of worst-class error for linear max-margin
//! classifiers trained on imbalanced data.
//!
//! The crate is organized bottom-up: noise families and their extreme-value
//! constants ([`distributions`]), linear solvers ([`svm`]), imbalanced data
//! generation and error metrics ([`datagen`]), the finite-`n` theorem
//! machinery ([`evt_limits`]) and the figure-level studies ([`experiments`]).

pub mod datagen;
pub mod distributions;
pub mod error;
pub mod evt_limits;
pub mod experiments;
pub mod quad;
pub mod rng;
pub mod special;
pub mod stats;
pub mod svm;

pub use datagen::{Dataset, GenRecipe};
pub use distributions::{DistributionSpec, EvtNormalization, Family, TailType};
pub use error::{Error, Result};
pub use rng::SeedTree;
pub use svm::LinearModel;
