#![allow(clippy::needless_range_loop, clippy::type_complexity)]

pub mod algebroid;
pub mod error;
pub mod expr;
pub mod jet;
pub mod mechanics;
pub mod problem;
pub mod prolong;
pub mod solver;
pub mod verify;

pub use error::{Error, ParseError, Result};
pub use expr::{parse, Expr};
pub use jet::{Jet, JetPoint, Scalar};
