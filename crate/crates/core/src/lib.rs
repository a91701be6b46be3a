//! Complex-valued neural network toolkit.
//!
//! * [`cplx`]: complex arithmetic and the finite-difference Wirtinger oracle.
//! * [`activations`]: the activation catalog with analytic partials and metadata.
//! * [`network`]: the layered complex perceptron and its forward pass.
//! * [`train`]: four backpropagation rules and the online training loop.
//! * [`verify`]: executable property checks with structured reports.
//! * [`render`]: domain coloring and surface export.
//! * [`tasks`]: seeded XOR, symmetry and QAM datasets.
//! * [`cli`]: the `cvnn` command-line front end.

pub mod activations;
pub mod cli;
pub mod cplx;
pub mod error;
pub mod render;
pub mod network;
pub mod rng;
pub mod tasks;
pub mod train;
pub mod verify;

pub use activations::{ActivationSpec, Category};
pub use cplx::Complex;
pub use error::{Error, Result};
