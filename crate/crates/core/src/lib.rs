pub mod chains;
pub mod config;
pub mod expr;
pub mod geometry;
pub mod harness;
pub mod involution;
pub mod maps;
pub mod presets;
pub mod report;
pub mod runner;
pub mod solver;
