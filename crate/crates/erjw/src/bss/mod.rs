//! The Bockstein spectral sequence engine: a graded mode that mirrors the
//! stage-by-stage d1 computation, the symbolic d3/d7 steps, and an exact
//! Smith-normal-form mode that cross-checks the graded answer on a window.

pub mod exact;
pub mod graded;
pub mod report;
pub mod snf;

pub use exact::{graded_dimensions, DegreeHomology, WindowComplex};
pub use graded::{
    gr_d1_step, run_d3, run_d7, run_graded, run_pages, space_keys, GradedRun, GradedState, Pages,
    Space, Tag,
};
pub use report::{BlockTag, GenEntry, PageReport, TorsionEntry};
