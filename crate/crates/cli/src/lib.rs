//! Command-line front end for `cobord-core`.

mod app;
pub mod selftest;

pub use app::{run, Run};
