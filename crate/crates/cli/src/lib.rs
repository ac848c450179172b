//! Command-line front end: scenario files in, CSV/JSON tables out.

pub mod app;
pub mod config;
pub mod output;
