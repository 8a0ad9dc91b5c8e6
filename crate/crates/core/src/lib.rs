//! Exact-arithmetic toolkit for discrete subsets of the rationals.

pub mod error;
pub mod extraction;
pub mod formula;
pub mod func;
pub mod interval;
pub mod encode;
pub mod integers;
pub mod io;
pub mod ladder;
pub mod normalize;
pub mod rational;
pub mod set;
pub mod subgroups;
pub mod tupling;

pub use error::{Error, Result};
pub use func::TaggedFunction;
pub use interval::Interval;
pub use rational::Rational;
pub use set::DiscreteSet;
