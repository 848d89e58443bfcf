//! Exact computer algebra for Veronese webs and bihamiltonian pencils.

#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod exact;
pub mod exterior;
pub mod io;
pub mod pencil;
pub mod sample;
pub mod solver;
pub mod tensor;
pub mod veronese;
