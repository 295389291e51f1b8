//! Exact weighted first-order model counting with lifted inference rules and
//! domain recursion.

pub mod canon;
pub mod engine;
pub mod error;
pub mod liftability;
pub mod logic;
pub mod oracle;
pub mod parser;
pub mod preprocess;
pub mod recursion;

pub use engine::{wfomc, Cache, EngineConfig, Mode, Stats, Value};
pub use error::{Error, Result};
pub use logic::{Clause, Literal, Rational, Size, Term, Theory, Weight};
