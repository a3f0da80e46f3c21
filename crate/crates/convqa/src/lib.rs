//! File formats, batch pipeline, review service and command line for the
//! ConVQA toolkit. The algorithms live in [`convqa_core`].

pub mod cli;
pub mod formats;
pub mod manifest;
pub mod pipeline;
pub mod review;
pub mod server;

pub use convqa_core as core;
