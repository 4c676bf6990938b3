//! Random POVMs and Fourier sampling on finite groups, with seeded Monte Carlo
//! checks of the concentration estimates behind them.

pub mod concentration;
pub mod error;
pub mod group;
pub mod hsp;
pub mod identify;
pub mod matrix;
pub mod measure;
pub mod random;

pub use error::{Error, Result};
