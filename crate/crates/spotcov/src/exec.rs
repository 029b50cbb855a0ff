//! Thread-pool executor.

use rayon::prelude::*;
use spotcov_core::exec::Executor;

use crate::error::{CliError, CliResult};

/// Runs work items on a dedicated rayon pool. Results are collected in index
/// order, so output does not depend on the number of threads.
pub struct Parallel {
    pool: rayon::ThreadPool,
}

impl Parallel {
    pub fn new(threads: usize) -> CliResult<Self> {
        if threads == 0 {
            return Err(CliError::invalid("threads must be at least 1"));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Io(format!("cannot start thread pool: {e}")))?;
        Ok(Self { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for Parallel {
    fn map<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..len).into_par_iter().map(f).collect())
    }
}
