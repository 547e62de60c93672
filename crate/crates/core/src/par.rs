//! Probe-grid parallelism helpers. The STABILIS_THREADS environment
//! variable caps the worker count (0 forces serial execution); reductions
//! stay deterministic because results are collected in input order.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::error::Result;

fn thread_cap() -> Option<usize> {
    static CAP: OnceLock<Option<usize>> = OnceLock::new();
    *CAP.get_or_init(|| {
        let cap = std::env::var("STABILIS_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok());
        if let Some(n) = cap {
            if n > 0 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
        cap
    })
}

/// Maps `f` over `items`, in parallel unless serial execution is forced or
/// the input is small. Output order matches input order; the first error
/// (by input position) wins.
pub(crate) fn try_map<T, U, F>(items: &[T], f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U> + Sync,
{
    let serial = matches!(thread_cap(), Some(0)) || items.len() < 64;
    let collected: Vec<Result<U>> = if serial {
        items.iter().map(&f).collect()
    } else {
        items.par_iter().map(&f).collect()
    };
    collected.into_iter().collect()
}
