//! Order-preserving execution of independent work items.
//!
//! `Parallel` runs on the rayon thread pool when the `parallel` feature is
//! enabled and degrades to sequential execution otherwise. Results come
//! back in input order in every mode.

use serde::{Deserialize, Serialize};

/// Execution strategy for a batch of independent items.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExecMode {
    /// One item at a time on the calling thread.
    Sequential,
    /// Thread-pool execution; sequential when the `parallel` feature is off.
    Parallel,
}

impl ExecMode {
    /// Preferred mode for this build of the crate.
    pub fn auto() -> Self {
        if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        }
    }
}

/// Applies `f` to every item, returning the results in input order.
pub fn map_ordered<T, R, F>(mode: ExecMode, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Send + Sync,
{
    match mode {
        ExecMode::Sequential => items.into_iter().map(f).collect(),
        ExecMode::Parallel => parallel_map(items, f),
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Send + Sync,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Send + Sync,
{
    items.into_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn results_keep_input_order() {
        let items: Vec<u64> = (0..64).collect();
        let tripled: Vec<u64> = items.iter().map(|n| n * 3).collect();
        assert_eq!(map_ordered(ExecMode::Parallel, items.clone(), |n| n * 3), tripled);
        assert_eq!(map_ordered(ExecMode::Sequential, items, |n| n * 3), tripled);
    }

    #[test]
    fn modes_agree_on_model_validation() {
        let seeds: Vec<u64> = (0..16).collect();
        let run = |mode| {
            map_ordered(mode, seeds.clone(), |s| {
                let m = corpus::random_model(s);
                (s, m.validate().is_valid(), m.curves().len())
            })
        };
        assert_eq!(run(ExecMode::Sequential), run(ExecMode::Parallel));
    }

    #[test]
    fn auto_matches_the_compiled_feature() {
        let expected = if cfg!(feature = "parallel") {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        };
        assert_eq!(ExecMode::auto(), expected);
    }
}
