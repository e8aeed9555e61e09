//! Multi-threaded slot execution for the dovetailer.

use std::num::NonZeroUsize;
use std::sync::atomic::{AtomicU64, Ordering};
use std::thread;

use approachable_core::dovetail::{Slot, SlotExecutor};

/// Splits the slots into contiguous chunks, one per worker. Each slot is
/// touched by exactly one thread and slots do not interact, so the result
/// does not depend on the worker count.
#[derive(Clone, Copy, Debug)]
pub struct Threaded {
    workers: NonZeroUsize,
}

impl Threaded {
    pub fn new(workers: NonZeroUsize) -> Threaded {
        Threaded { workers }
    }

    pub fn workers(&self) -> usize {
        self.workers.get()
    }
}

impl SlotExecutor for Threaded {
    fn advance_slots(&self, slots: &mut [Slot], horizon: u64) -> u64 {
        if self.workers.get() == 1 || slots.len() < 2 {
            return slots.iter_mut().map(|s| s.advance_to(horizon)).sum();
        }
        let steps = AtomicU64::new(0);
        let chunk = slots.len().div_ceil(self.workers.get());
        thread::scope(|scope| {
            for part in slots.chunks_mut(chunk) {
                let steps = &steps;
                scope.spawn(move || {
                    let done: u64 = part.iter_mut().map(|s| s.advance_to(horizon)).sum();
                    steps.fetch_add(done, Ordering::Relaxed);
                });
            }
        });
        steps.into_inner()
    }
}
