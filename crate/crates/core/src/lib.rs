//! Web bases for tensor products of the vector representation of quantum gl(n) and
//! its dual: growth diagrams, state-sum evaluation and exhaustive verification.

pub mod basis;
pub mod cli;
pub mod eval;
pub mod exterior;
pub mod growth;
pub mod member;
pub mod qint;
pub mod svg;
pub mod wave;
pub mod words;
