//! Priority queue with deterministic ordering and cheap snapshots.
//!
//! Entries pop by smallest `f`, then largest `g`, then lexicographically
//! smallest vertex, then insertion order. Every push and pop is stamped with
//! a logical clock, so a snapshot is just a clock value and restoring it
//! rebuilds exactly the set of entries that were queued at that instant.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::geometry::Vertex;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpenEntry {
    pub f: f64,
    pub g: f64,
    pub vertex: Vertex,
    /// Caller payload, typically a node id.
    pub item: usize,
}

#[derive(Debug, Clone, Copy)]
struct HeapKey {
    f: f64,
    g: f64,
    vertex: Vertex,
    slot: usize,
}

impl PartialEq for HeapKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapKey {}

impl PartialOrd for HeapKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapKey {
    // "greater" pops first
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| self.g.total_cmp(&other.g))
            .then_with(|| (other.vertex.x, other.vertex.y).cmp(&(self.vertex.x, self.vertex.y)))
            .then_with(|| other.slot.cmp(&self.slot))
    }
}

/// A point in the list's history that can be restored later.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OpenSnapshot {
    clock: u64,
}

#[derive(Debug, Clone, Default)]
pub struct OpenList {
    entries: Vec<OpenEntry>,
    pushed_at: Vec<u64>,
    popped_at: Vec<Option<u64>>,
    heap: BinaryHeap<HeapKey>,
    clock: u64,
}

impl OpenList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn push(&mut self, entry: OpenEntry) {
        let slot = self.entries.len();
        self.clock += 1;
        self.entries.push(entry);
        self.pushed_at.push(self.clock);
        self.popped_at.push(None);
        self.heap.push(Self::key(&entry, slot));
    }

    pub fn pop(&mut self) -> Option<OpenEntry> {
        let key = self.heap.pop()?;
        self.clock += 1;
        self.popped_at[key.slot] = Some(self.clock);
        Some(self.entries[key.slot])
    }

    pub fn peek(&self) -> Option<OpenEntry> {
        self.heap.peek().map(|k| self.entries[k.slot])
    }

    pub fn snapshot(&self) -> OpenSnapshot {
        OpenSnapshot { clock: self.clock }
    }

    /// Entries queued at `snap`, in pop order.
    pub fn entries_at(&self, snap: OpenSnapshot) -> Vec<OpenEntry> {
        let mut keys: Vec<HeapKey> = self
            .live_slots_at(snap.clock)
            .map(|s| Self::key(&self.entries[s], s))
            .collect();
        keys.sort_by(|a, b| b.cmp(a));
        keys.into_iter().map(|k| self.entries[k.slot]).collect()
    }

    /// Replaces the queue with its content at `snap`. Entries pushed after
    /// the snapshot are discarded.
    pub fn restore(&mut self, snap: OpenSnapshot) {
        self.restore_filtered(snap, |_| true);
    }

    /// Like [`restore`](Self::restore) but keeps only entries accepted by `keep`.
    pub fn restore_filtered(&mut self, snap: OpenSnapshot, mut keep: impl FnMut(&OpenEntry) -> bool) {
        let live: Vec<usize> = self.live_slots_at(snap.clock).collect();
        self.clock += 1;
        let now = self.clock;
        for p in self.popped_at.iter_mut() {
            if p.is_none() {
                *p = Some(now);
            }
        }
        self.heap.clear();
        for s in live {
            if keep(&self.entries[s]) {
                self.popped_at[s] = None;
                self.heap.push(Self::key(&self.entries[s], s));
            }
        }
    }

    fn live_slots_at(&self, clock: u64) -> impl Iterator<Item = usize> + '_ {
        (0..self.entries.len())
            .filter(move |&s| self.pushed_at[s] <= clock && self.popped_at[s].is_none_or(|p| p > clock))
    }

    fn key(e: &OpenEntry, slot: usize) -> HeapKey {
        HeapKey {
            f: e.f,
            g: e.g,
            vertex: e.vertex,
            slot,
        }
    }
}
