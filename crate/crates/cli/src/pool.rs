//! Bounded worker pool over a fixed job list. Results reach the caller's
//! collector on the calling thread in completion order.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

pub fn run_pool<J, R, F, C>(jobs: &[J], workers: usize, work: F, mut collect: C)
where
    J: Sync,
    R: Send,
    F: Fn(&J) -> R + Sync,
    C: FnMut(usize, R),
{
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel();
    std::thread::scope(|s| {
        for _ in 0..workers.clamp(1, jobs.len().max(1)) {
            let tx = tx.clone();
            let (next, work) = (&next, &work);
            s.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(job) = jobs.get(i) else { break };
                if tx.send((i, work(job))).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        for (i, r) in rx {
            collect(i, r);
        }
    });
}
