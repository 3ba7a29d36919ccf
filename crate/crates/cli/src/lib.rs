//! Support library for the `prc` binary: key-file serialization, spec
//! string parsing (models, hashes, covertext channels), and the
//! acceptance suite.

pub mod keyfile;
pub mod specs;
pub mod suite;
