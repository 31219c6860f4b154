//! Exact computation of the Bockstein spectral sequence from E(2)-cohomology
//! to ER(2)-cohomology for smash powers of CP^infinity and for MU(n).
//!
//! The engine works 2-locally with the hatted generators (v2h = 1, grading
//! mod 48), computes d1 from the formal-group conjugation, runs the auxiliary
//! filtration spectral sequence stage by stage to get E2, and then applies
//! the coefficient rules for d3 and d7. Closed-form enumerators for every
//! stated answer live in [`oracle`] and an integer Smith-normal-form homology
//! cross-check lives in [`bss::exact`].

pub mod bss;
pub mod coeff;
pub mod error;
pub mod fgl;
pub mod local2;
pub mod oracle;
pub mod par;
pub mod smash;
pub mod unitary;

pub use error::{Error, Result};

/// CLI entry point; returns the process exit code.
pub fn run() -> i32 {
    // wired up once the cli module lands
    eprintln!("erjw: command-line interface not yet built");
    2
}
