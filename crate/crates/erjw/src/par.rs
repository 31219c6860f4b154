//! Data-parallel helpers. With the `parallel` feature (default) the maps run
//! on rayon; a process-wide override forces the sequential path so benchmarks
//! can compare both on one build. Without the feature everything is plain
//! sequential iteration.

#[cfg(feature = "parallel")]
use std::sync::atomic::{AtomicBool, Ordering};

#[cfg(feature = "parallel")]
static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Force the sequential code path even when built with `parallel`.
#[cfg(feature = "parallel")]
pub fn set_sequential(force: bool) {
    FORCE_SEQUENTIAL.store(force, Ordering::Relaxed);
}

#[cfg(not(feature = "parallel"))]
pub fn set_sequential(_force: bool) {}

#[cfg(feature = "parallel")]
pub fn is_sequential() -> bool {
    FORCE_SEQUENTIAL.load(Ordering::Relaxed)
}

#[cfg(not(feature = "parallel"))]
pub fn is_sequential() -> bool {
    true
}

/// Order-preserving parallel map.
#[cfg(feature = "parallel")]
pub fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    if is_sequential() {
        items.iter().map(f).collect()
    } else {
        items.par_iter().map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}
