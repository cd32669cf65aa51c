//! Library side of the `gma` command: solving from Matrix Market files, seeded
//! benchmark runs and the default verification suite.

pub mod app;
pub mod bench;
mod failure;
pub mod solve;
pub mod suite;

pub use failure::Failure;
