//! Combinatorics of angle tripling and numerics for the cubic family
//! `f(z) = λz + bz² + z³`.

pub mod angle;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod finite_gaps;
mod modular;
pub mod multiplier;
pub mod param;
pub mod q_atlas;
pub mod quad_gaps;

pub use angle::{Angle, Arc, Chord, Degree};
pub use error::{Error, Result};
