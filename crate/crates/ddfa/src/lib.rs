//! File formats and command line front end for `ddfa-core`.

pub mod bfile;
pub mod builtin;
pub mod cli;
pub mod document;
pub mod rational;
pub mod specfile;
