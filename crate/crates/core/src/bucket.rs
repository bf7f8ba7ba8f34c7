//! Counters over a dense id space with O(log n) arg-max / arg-min queries.
//!
//! Values move by unit steps or jump to zero, which is exactly what bin sizes,
//! recent degrees and residual degrees do. Ties resolve to the lowest id.

use std::collections::BTreeSet;

#[derive(Debug, Clone)]
pub struct BucketCounter {
    value: Vec<usize>,
    buckets: Vec<BTreeSet<usize>>,
    max_val: usize,
    min_val: usize,
}

impl BucketCounter {
    pub fn new(len: usize) -> Self {
        let mut zero = BTreeSet::new();
        zero.extend(0..len);
        BucketCounter { value: vec![0; len], buckets: vec![zero], max_val: 0, min_val: 0 }
    }

    pub fn len(&self) -> usize {
        self.value.len()
    }

    pub fn is_empty(&self) -> bool {
        self.value.is_empty()
    }

    #[inline]
    pub fn get(&self, id: usize) -> usize {
        self.value[id]
    }

    pub fn values(&self) -> &[usize] {
        &self.value
    }

    fn relocate(&mut self, id: usize, to: usize) {
        let from = self.value[id];
        if from == to {
            return;
        }
        self.buckets[from].remove(&id);
        if to >= self.buckets.len() {
            self.buckets.resize_with(to + 1, BTreeSet::new);
        }
        self.buckets[to].insert(id);
        self.value[id] = to;
        if to > self.max_val {
            self.max_val = to;
        }
        while self.max_val > 0 && self.buckets[self.max_val].is_empty() {
            self.max_val -= 1;
        }
        if to < self.min_val {
            self.min_val = to;
        }
        while self.min_val < self.max_val && self.buckets[self.min_val].is_empty() {
            self.min_val += 1;
        }
    }

    pub fn inc(&mut self, id: usize) {
        self.relocate(id, self.value[id] + 1);
    }

    /// Decrements, saturating at zero.
    pub fn dec(&mut self, id: usize) {
        self.relocate(id, self.value[id].saturating_sub(1));
    }

    pub fn reset(&mut self, id: usize) {
        self.relocate(id, 0);
    }

    pub fn set(&mut self, id: usize, to: usize) {
        self.relocate(id, to);
    }

    pub fn reset_all(&mut self) {
        *self = BucketCounter::new(self.len());
    }

    /// `(value, lowest id holding it)` for the maximum value.
    pub fn max(&self) -> Option<(usize, usize)> {
        self.buckets[self.max_val].first().map(|&id| (self.max_val, id))
    }

    pub fn max_value(&self) -> usize {
        self.max_val
    }

    /// `(value, lowest id holding it)` for the minimum value.
    pub fn min(&self) -> Option<(usize, usize)> {
        self.buckets.get(self.min_val)?.first().map(|&id| (self.min_val, id))
    }

    /// Up to `k` ids with the smallest values, in (value, id) order.
    pub fn smallest(&self, k: usize) -> Vec<usize> {
        self.buckets[self.min_val..].iter().flat_map(|b| b.iter().copied()).take(k).collect()
    }

    /// Up to `k` ids with the largest values, by value descending then id.
    pub fn largest(&self, k: usize) -> Vec<usize> {
        self.buckets[..=self.max_val].iter().rev().flat_map(|b| b.iter().copied()).take(k).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ties_go_to_lowest_id() {
        let mut c = BucketCounter::new(4);
        assert_eq!(c.max(), Some((0, 0)));
        c.inc(2);
        c.inc(3);
        assert_eq!(c.max(), Some((1, 2)));
        assert_eq!(c.min(), Some((0, 0)));
        c.reset(2);
        assert_eq!(c.max(), Some((1, 3)));
        assert_eq!(c.smallest(3), vec![0, 1, 2]);
        assert_eq!(c.largest(2), vec![3, 0]);
    }

    proptest! {
        #[test]
        fn matches_linear_scan(ops in prop::collection::vec((0usize..8, 0u8..4), 1..200)) {
            let mut c = BucketCounter::new(8);
            let mut naive = [0usize; 8];
            for (id, kind) in ops {
                match kind {
                    0 | 1 => { c.inc(id); naive[id] += 1; }
                    2 => { c.dec(id); naive[id] = naive[id].saturating_sub(1); }
                    _ => { c.reset(id); naive[id] = 0; }
                }
                let mx = *naive.iter().max().unwrap();
                let mx_id = naive.iter().position(|&x| x == mx).unwrap();
                prop_assert_eq!(c.max(), Some((mx, mx_id)));
                let mn = *naive.iter().min().unwrap();
                let mn_id = naive.iter().position(|&x| x == mn).unwrap();
                prop_assert_eq!(c.min(), Some((mn, mn_id)));
            }
        }
    }
}
