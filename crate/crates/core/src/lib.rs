//! Equilibrium verification and structural auditing for the sum classic
//! network creation game.

pub mod game;
pub mod graph;
pub mod profile;
pub mod search;
pub mod audit;
pub mod cli;
pub mod coords;
pub mod dau;
pub mod deviations;
mod mask;
