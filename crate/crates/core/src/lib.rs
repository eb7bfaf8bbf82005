//! Computable functors and effective interpretations between countable
//! structures presented on ω.

pub mod biinterp;
pub mod error;
pub mod functional;
pub mod functor;
pub mod gallery;
pub mod interp;
pub mod model;
pub mod scheme_io;
pub mod serial;
pub mod transforms;

pub use error::{Error, Result};
pub use model::*;
