//! Scoped worker pool with dynamic task assignment.
//!
//! Workers pull task indices from a shared counter and keep their own
//! scratch state across tasks. Results are returned in task order, so the
//! outcome never depends on scheduling.

use std::sync::atomic::{AtomicUsize, Ordering};

/// Worker count from `VPBGK_WORKERS`, else the available parallelism.
pub fn default_workers() -> usize {
    std::env::var("VPBGK_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs `task(i, scratch)` for every `i < n_tasks` on up to `workers`
/// threads and returns the results indexed by `i`.
pub fn run_indexed<T, W, M, F>(n_tasks: usize, workers: usize, make_scratch: M, task: F) -> Vec<T>
where
    T: Send,
    M: Fn() -> W + Sync,
    F: Fn(usize, &mut W) -> T + Sync,
{
    let workers = workers.clamp(1, n_tasks.max(1));
    if workers == 1 {
        let mut scratch = make_scratch();
        return (0..n_tasks).map(|i| task(i, &mut scratch)).collect();
    }

    let next = AtomicUsize::new(0);
    let mut slots: Vec<Option<T>> = (0..n_tasks).map(|_| None).collect();
    let batches: Vec<Vec<(usize, T)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| {
                    let mut scratch = make_scratch();
                    let mut done = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= n_tasks {
                            break;
                        }
                        done.push((i, task(i, &mut scratch)));
                    }
                    done
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|e| std::panic::resume_unwind(e)))
            .collect()
    });
    for (i, v) in batches.into_iter().flatten() {
        slots[i] = Some(v);
    }
    slots
        .into_iter()
        .map(|s| s.expect("every task index is claimed exactly once"))
        .collect()
}
