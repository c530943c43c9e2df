//! Instance format, generator, branching-factor calculator and CLI.

pub mod cli;
pub mod generate;
pub mod instance;
pub mod tau;

pub use generate::{generate_instance, random_weights};
pub use instance::{
    parse_instance, parse_instance_with, serialize_instance, InstanceDocument, ParseOptions,
};
pub use tau::{branching_factor, tau, BranchingVector};
