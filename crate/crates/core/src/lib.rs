//! Random negative two-literal logic programs under the linear model
//! `L(c1, c2)`: generation, exact answer-set enumeration, closed-form
//! predictions and the experiment harness that compares them.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod generator;
pub mod model;
pub mod report;
pub mod solver;
pub mod text;
pub mod theory;
pub mod translate;

pub use error::{Error, Result};
pub use generator::{generate, LinearModelParams, Seed};
pub use model::{Atom, AtomSet, Program, Rule};
