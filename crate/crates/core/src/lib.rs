//! Strategic classification with randomised classifiers on finite worlds:
//! exact best responses, gaming sets, strategic risks, strategic ERM over
//! hypotheses and mixtures, and numerical checks of the accompanying
//! theory.

pub mod cli;
pub mod error;
pub mod render;
pub mod response;
pub mod risk;
pub mod rng;
pub mod scenario;
pub mod serm;
pub mod theory;
pub mod world;

pub use error::{Error, Result};
