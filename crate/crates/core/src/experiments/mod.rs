//! Named, seeded, reproducible scenarios tying the modules together.

mod config;
mod describe;
mod identities;
mod run;

pub use config::*;
pub use describe::describe;
pub use identities::{identity_checks, IdentityCheck};
pub use run::{config_hash, run, validate, OutputFile, RunManifest, StageTime};
