//! Per-index publication cells for the asynchronous schedule.
//!
//! The concurrency contract is deliberately narrow: every index has exactly
//! one writer, all shared access is per-element atomic load/store — no
//! locks, no compare-and-swap — and each published value strictly exceeds
//! the previous one (flag publications repeat the value with the flag bit
//! set). Readers may sample recent history instead of the latest version,
//! which is how bounded-stale reads are simulated deterministically.
//!
//! Each cell keeps a ring of the last `staleness_bound + 1` published
//! (value, flag) pairs packed into one `u64` apiece, plus a version
//! counter. The writer stores the slot, then the counter with `Release`;
//! a reader loads the counter with `Acquire` and then any slot no older
//! than the bound. Packing value and flag into a single atomic means a
//! reader can never observe a fixed flag paired with a stale value — the
//! hazard the value-before-flag publication order exists to prevent — even
//! if the writer laps the ring mid-read (the reader then sees a *newer*
//! published pair, which the staleness contract allows).

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use rand::Rng;

use super::Value;

const FLAG_BIT: u64 = 1 << 63;

fn pack(value: Value, fixed: bool) -> u64 {
    debug_assert!(value >= 0, "published values are non-negative");
    value as u64 | if fixed { FLAG_BIT } else { 0 }
}

fn unpack(bits: u64) -> (Value, bool) {
    ((bits & !FLAG_BIT) as Value, bits & FLAG_BIT != 0)
}

struct Cell {
    slots: Box<[AtomicU64]>,
    versions: AtomicUsize,
}

/// A state vector whose elements are published through atomic cells with
/// bounded version history.
pub struct Published {
    cells: Vec<Cell>,
    capacity: usize,
}

impl Published {
    /// Build cells holding `bottoms` as version 1, keeping enough history
    /// to serve reads up to `staleness_bound` versions old.
    pub fn new(bottoms: &[Value], staleness_bound: usize) -> Published {
        let capacity = staleness_bound + 1;
        let cells = bottoms
            .iter()
            .map(|&b| {
                let slots: Box<[AtomicU64]> = (0..capacity).map(|_| AtomicU64::new(0)).collect();
                slots[0].store(pack(b, false), Ordering::Relaxed);
                Cell {
                    slots,
                    versions: AtomicUsize::new(1),
                }
            })
            .collect();
        Published { cells, capacity }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Number of versions published for `index` so far.
    pub fn version_count(&self, index: usize) -> usize {
        self.cells[index].versions.load(Ordering::Acquire)
    }

    /// Publish a new version of `index`. Must only ever be called by the
    /// single worker that owns the index.
    pub fn publish(&self, index: usize, value: Value, fixed: bool) {
        let cell = &self.cells[index];
        // Only the owner writes `versions`, so a relaxed read is exact.
        let n = cell.versions.load(Ordering::Relaxed);
        cell.slots[n % self.capacity].store(pack(value, fixed), Ordering::Relaxed);
        // The Release pairs with the Acquire in readers: once they see
        // version n + 1 they see the slot write above.
        cell.versions.store(n + 1, Ordering::Release);
    }

    /// Latest published (value, fixed) pair for `index`.
    pub fn fresh(&self, index: usize) -> (Value, bool) {
        let cell = &self.cells[index];
        let n = cell.versions.load(Ordering::Acquire);
        unpack(cell.slots[(n - 1) % self.capacity].load(Ordering::Relaxed))
    }

    /// A previously published pair for `index`, at most `bound` versions
    /// old (and never older than what the ring retains), with the lag
    /// drawn from `rng`. `bound` must be within the capacity this store
    /// was built with.
    pub fn sample_stale(&self, index: usize, bound: usize, rng: &mut impl Rng) -> (Value, bool) {
        debug_assert!(bound < self.capacity);
        let cell = &self.cells[index];
        let n = cell.versions.load(Ordering::Acquire);
        let avail = bound.min(n - 1);
        let lag = if avail == 0 {
            0
        } else {
            rng.random_range(0..=avail)
        };
        unpack(cell.slots[(n - 1 - lag) % self.capacity].load(Ordering::Relaxed))
    }

    /// Copy out the latest values (and flags, when any index has one).
    pub fn snapshot(&self) -> (Vec<Value>, Vec<bool>) {
        let mut values = Vec::with_capacity(self.len());
        let mut flags = Vec::with_capacity(self.len());
        for j in 0..self.len() {
            let (v, f) = self.fresh(j);
            values.push(v);
            flags.push(f);
        }
        (values, flags)
    }
}
