//! Config-driven front end for the giant-atom simulator: single runs,
//! parameter sweeps, path reports, oracle verification and figure presets.

pub mod config;
pub mod format;
pub mod presets;
pub mod run;
