//! Elementary-operation counter for the linear-time benchmarks.

/// Counts adjacency entries touched, comparisons made and items placed.
/// Only the relative growth across input sizes is meaningful.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct OpCounter(u64);

impl OpCounter {
    pub fn new() -> Self {
        Self(0)
    }

    #[inline]
    pub fn add(&mut self, ops: usize) {
        self.0 += ops as u64;
    }

    pub fn get(&self) -> u64 {
        self.0
    }
}
