//! Batch experiments over `paneitz-core`: configuration, CSV and manifest
//! output, and the acceptance suite.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod verify;
