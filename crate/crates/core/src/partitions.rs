//! Set partitions as restricted growth strings.
//!
//! A restricted growth string `a` of length `len` has `a[0] = 0` and
//! `a[i] <= 1 + max(a[..i])`; it names the partition whose blocks are the
//! level sets of `a`, with blocks numbered by first appearance. Each
//! unordered partition has exactly one such string.

/// Number of partitions of `len` items into at most `max_blocks` blocks,
/// saturating at `u128::MAX`.
pub fn partition_count(len: usize, max_blocks: usize) -> u128 {
    if len == 0 {
        return 1;
    }
    // stirling[k] = S(i, k) for the current row i
    let mut stirling = vec![0u128; max_blocks + 1];
    stirling[0] = 1;
    for _ in 0..len {
        for k in (1..=max_blocks).rev() {
            stirling[k] = (k as u128)
                .saturating_mul(stirling[k])
                .saturating_add(stirling[k - 1]);
        }
        stirling[0] = 0;
    }
    stirling[1..].iter().fold(0u128, |acc, &s| acc.saturating_add(s))
}

/// Iterator over restricted growth strings with at most `max_blocks` blocks,
/// in lexicographic order.
#[derive(Debug, Clone)]
pub struct RestrictedGrowth {
    current: Vec<u32>,
    /// `prefix_max[i] = max(current[..=i])`
    prefix_max: Vec<u32>,
    max_blocks: u32,
    started: bool,
    done: bool,
}

impl RestrictedGrowth {
    pub fn new(len: usize, max_blocks: usize) -> Self {
        Self {
            current: vec![0; len],
            prefix_max: vec![0; len],
            max_blocks: max_blocks as u32,
            started: false,
            done: len == 0 || max_blocks == 0,
        }
    }

    /// Advances in place; returns the next string or `None` when exhausted.
    pub fn advance(&mut self) -> Option<&[u32]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.current);
        }
        let len = self.current.len();
        let cap = self.max_blocks - 1;
        let pos = (1..len).rev().find(|&i| {
            let limit = (self.prefix_max[i - 1] + 1).min(cap);
            self.current[i] < limit
        });
        let Some(pos) = pos else {
            self.done = true;
            return None;
        };
        self.current[pos] += 1;
        self.prefix_max[pos] = self.prefix_max[pos - 1].max(self.current[pos]);
        for i in pos + 1..len {
            self.current[i] = 0;
            self.prefix_max[i] = self.prefix_max[pos];
        }
        Some(&self.current)
    }
}

impl Iterator for RestrictedGrowth {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        self.advance().map(<[u32]>::to_vec)
    }
}
