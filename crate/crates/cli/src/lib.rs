//! Front end for the generator and the deck search: argument handling,
//! report lines, shard merging and run manifests.

pub mod app;
pub mod manifest;
pub mod report;

pub use recon_core::codec;
