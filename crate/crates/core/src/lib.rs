//! Tools for BDDL activity definitions: parsing and printing, a category
//! taxonomy, a symbolic world model, goal evaluation and flattening, scene
//! instantiation and trajectory metrics.

pub mod cli;
pub mod corpus;
pub mod episode;
pub mod logic;
pub mod sampler;
pub mod scoring;
pub mod syntax;
pub mod taxonomy;
pub mod world;
