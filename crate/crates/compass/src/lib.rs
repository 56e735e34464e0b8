//! File formats, sample generators and the command-line front end for
//! `compass-core`.

pub mod cli;
pub mod formats;
pub mod sample;
