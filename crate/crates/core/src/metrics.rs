//! Per-query instrumentation and structural size accounting.

use std::mem::size_of;

/// Counters reset per query and flushed into a metrics row by the harness.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    /// Dequeue-and-finalize events of a door-graph traversal.
    pub doors_settled: u64,
    /// Precomputed matrix entries read.
    pub matrix_pairs_read: u64,
    /// Hops taken while unpacking a precomputed path.
    pub path_hops: u64,
    /// Largest transient query state held at once, in bytes.
    pub peak_transient_bytes: u64,
}

impl Counters {
    /// Visited-door count: every door settled, matrix pair read or path hop.
    pub fn nvd(&self) -> u64 {
        self.doors_settled + self.matrix_pairs_read + self.path_hops
    }

    pub fn note_transient(&mut self, bytes: usize) {
        self.peak_transient_bytes = self.peak_transient_bytes.max(bytes as u64);
    }
}

/// Bytes of a vector's buffer plus its header.
pub fn vec_bytes<T>(v: &[T]) -> usize {
    size_of::<Vec<T>>() + std::mem::size_of_val(v)
}

/// Bytes of a vector of vectors (outer header, inner headers and payloads).
pub fn nested_bytes<T>(v: &[Vec<T>]) -> usize {
    size_of::<Vec<Vec<T>>>() + v.iter().map(|x| vec_bytes(x)).sum::<usize>()
}
