pub mod domain;
mod dst;
pub mod eigen;
pub mod error;
pub mod grid;
pub mod measuror;
pub mod propagator;
pub mod state;
pub mod zeno;

pub use num_complex::Complex64;
