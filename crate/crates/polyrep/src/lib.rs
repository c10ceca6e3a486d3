//! File formats, parallel sweeps and the command-line front end for
//! `polyrep-core`.

pub mod cli;
pub mod config;
pub mod gallery;
pub mod gamefile;
pub mod output;
pub mod pool;
