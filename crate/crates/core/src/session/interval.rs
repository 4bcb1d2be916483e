use serde::{Deserialize, Serialize};

/// Half-open millisecond interval `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Interval {
    pub start: u64,
    pub end: u64,
}

impl Interval {
    pub fn new(start: u64, end: u64) -> Self {
        debug_assert!(start <= end);
        Self { start, end }
    }

    pub fn len(&self) -> u64 {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }
}

/// Sorted, pairwise disjoint and non-adjacent intervals.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl IntervalSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an interval, merging it with any it overlaps or touches.
    pub fn insert(&mut self, start: u64, end: u64) {
        if start >= end {
            return;
        }
        // First interval whose end reaches `start`.
        let lo = self.intervals.partition_point(|iv| iv.end < start);
        // First interval starting strictly after `end`.
        let hi = self.intervals.partition_point(|iv| iv.start <= end);
        if lo == hi {
            self.intervals.insert(lo, Interval::new(start, end));
            return;
        }
        let merged = Interval::new(
            start.min(self.intervals[lo].start),
            end.max(self.intervals[hi - 1].end),
        );
        self.intervals.splice(lo..hi, [merged]);
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Total covered length.
    pub fn total(&self) -> u64 {
        self.intervals.iter().map(Interval::len).sum()
    }

    /// Covered length strictly before `t`.
    pub fn total_before(&self, t: u64) -> u64 {
        self.intervals
            .iter()
            .take_while(|iv| iv.start < t)
            .map(|iv| iv.end.min(t) - iv.start)
            .sum()
    }

    /// Drops everything at or after `t`.
    pub fn truncate(&mut self, t: u64) {
        self.intervals.retain(|iv| iv.start < t);
        if let Some(last) = self.intervals.last_mut() {
            last.end = last.end.min(t);
        }
    }

    pub fn contains(&self, t: u64) -> bool {
        let i = self.intervals.partition_point(|iv| iv.end <= t);
        self.intervals.get(i).is_some_and(|iv| iv.start <= t)
    }
}
