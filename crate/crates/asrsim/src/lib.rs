//! Std companion to the core engine: configuration files, parallel sweep and
//! ensemble drivers, CSV/JSON/SVG output.

pub mod config;
pub mod output;
pub mod svg;
pub mod sweep;
