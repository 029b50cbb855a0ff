//! Execution strategy for embarrassingly parallel loops.
//!
//! Work items are identified by index and results come back in index order,
//! so reductions done afterwards do not depend on how the items were
//! scheduled. The `spotcov` crate provides a thread-pool implementation.

use alloc::vec::Vec;

pub trait Executor: Sync {
    /// `[f(0), f(1), …, f(len − 1)]`.
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs every item on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..len).map(f).collect()
    }
}
