//! Exact cover with column capacities.
//!
//! A row is usable while every column it touches still has at least the row's
//! multiplicity left and it has not been banned at an ancestor node. Columns are
//! chosen by fewest usable rows, ties to the lowest index; rows are tried in index
//! order and banned once their subtree is exhausted, so every multiset of rows
//! meeting all capacities exactly is visited once.

use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Stop {
    /// Search tree exhausted.
    Exhausted,
    /// The visitor asked to stop.
    Requested,
    /// Deadline passed.
    Deadline,
    /// Node limit reached.
    NodeLimit,
}

pub(crate) struct Cover {
    need: Vec<u64>,
    rows: Vec<Vec<(usize, u64)>>,
    col_rows: Vec<Vec<(usize, u64)>>,
    blocked: Vec<u32>,
    live: Vec<u32>,
    chosen: Vec<usize>,
    pub(crate) nodes: u64,
    deadline: Option<Instant>,
    node_limit: Option<u64>,
}

impl Cover {
    pub(crate) fn new(capacity: Vec<u64>, rows: Vec<Vec<(usize, u64)>>) -> Self {
        let cols = capacity.len();
        let mut col_rows = vec![Vec::new(); cols];
        for (r, row) in rows.iter().enumerate() {
            for &(c, m) in row {
                col_rows[c].push((r, m));
            }
        }
        let mut cover = Cover {
            need: capacity,
            blocked: vec![0; rows.len()],
            live: col_rows.iter().map(|v| v.len() as u32).collect(),
            rows,
            col_rows,
            chosen: Vec::new(),
            nodes: 0,
            deadline: None,
            node_limit: None,
        };
        for r in 0..cover.rows.len() {
            for k in 0..cover.rows[r].len() {
                let (c, m) = cover.rows[r][k];
                if m > cover.need[c] {
                    cover.block(r);
                }
            }
        }
        cover
    }

    pub(crate) fn with_limits(mut self, deadline: Option<Instant>, node_limit: Option<u64>) -> Self {
        self.deadline = deadline;
        self.node_limit = node_limit;
        self
    }

    fn block(&mut self, r: usize) {
        self.blocked[r] += 1;
        if self.blocked[r] == 1 {
            for &(c, _) in &self.rows[r] {
                self.live[c] -= 1;
            }
        }
    }

    fn unblock(&mut self, r: usize) {
        self.blocked[r] -= 1;
        if self.blocked[r] == 0 {
            for &(c, _) in &self.rows[r] {
                self.live[c] += 1;
            }
        }
    }

    fn select(&mut self, r: usize) {
        for k in 0..self.rows[r].len() {
            let (c, m) = self.rows[r][k];
            let old = self.need[c];
            let new = old - m;
            self.need[c] = new;
            for j in 0..self.col_rows[c].len() {
                let (s, ms) = self.col_rows[c][j];
                if ms <= old && ms > new {
                    self.block(s);
                }
            }
        }
        self.chosen.push(r);
    }

    fn deselect(&mut self, r: usize) {
        self.chosen.pop();
        for k in (0..self.rows[r].len()).rev() {
            let (c, m) = self.rows[r][k];
            let new = self.need[c];
            let old = new + m;
            for j in (0..self.col_rows[c].len()).rev() {
                let (s, ms) = self.col_rows[c][j];
                if ms <= old && ms > new {
                    self.unblock(s);
                }
            }
            self.need[c] = old;
        }
    }

    fn choose_column(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for c in 0..self.need.len() {
            if self.need[c] > 0 && best.is_none_or(|b| self.live[c] < self.live[b]) {
                best = Some(c);
                if self.live[c] == 0 {
                    break;
                }
            }
        }
        best
    }

    /// Visits every solution; `visit` returns `true` to stop.
    pub(crate) fn run(&mut self, visit: &mut dyn FnMut(&[usize]) -> bool) -> Stop {
        self.search(visit).unwrap_or(Stop::Exhausted)
    }

    fn search(&mut self, visit: &mut dyn FnMut(&[usize]) -> bool) -> Option<Stop> {
        self.nodes += 1;
        if self.node_limit.is_some_and(|l| self.nodes > l) {
            return Some(Stop::NodeLimit);
        }
        if self.nodes.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Some(Stop::Deadline);
        }
        let Some(c) = self.choose_column() else {
            return visit(&self.chosen).then_some(Stop::Requested);
        };
        if self.live[c] == 0 {
            return None;
        }
        let mut banned = Vec::new();
        let mut out = None;
        for j in 0..self.col_rows[c].len() {
            let (r, _) = self.col_rows[c][j];
            if self.blocked[r] != 0 {
                continue;
            }
            self.select(r);
            out = self.search(visit);
            self.deselect(r);
            if out.is_some() {
                break;
            }
            self.block(r);
            banned.push(r);
            if self.live[c] == 0 {
                break;
            }
        }
        for r in banned {
            self.unblock(r);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(capacity: Vec<u64>, rows: Vec<Vec<(usize, u64)>>) -> u64 {
        let mut n = 0;
        let stop = Cover::new(capacity, rows).run(&mut |_| {
            n += 1;
            false
        });
        assert_eq!(stop, Stop::Exhausted);
        n
    }

    #[test]
    fn knuth_example() {
        // the classic 7-column instance; its only solution uses rows 0, 3 and 4
        let cols = [vec![2, 4, 5], vec![0, 3, 6], vec![1, 2, 5], vec![0, 3], vec![1, 6], vec![3, 4, 6]];
        let rows: Vec<_> = cols.iter().map(|r| r.iter().map(|&c| (c, 1)).collect()).collect();
        let mut found = Vec::new();
        Cover::new(vec![1; 7], rows.clone()).run(&mut |s| {
            found.push(s.to_vec());
            false
        });
        let mut s = found.pop().unwrap();
        s.sort();
        assert_eq!(s, vec![0, 3, 4]);
        assert!(found.is_empty());
    }

    #[test]
    fn capacities_count_multisets() {
        // one column of capacity 3, rows of weight 1 and 2: {1,1,1}, {1,2}
        assert_eq!(count(vec![3], vec![vec![(0, 1)], vec![(0, 2)]]), 2);
        // two identical unit rows on a capacity-2 column: {a,a}, {a,b}, {b,b}
        assert_eq!(count(vec![2], vec![vec![(0, 1)], vec![(0, 1)]]), 3);
        assert_eq!(count(vec![1, 1], vec![vec![(0, 1)]]), 0);
    }

    #[test]
    fn node_limit_stops() {
        let rows: Vec<_> = (0..6).map(|i| vec![(i % 3, 1)]).collect();
        let mut cover = Cover::new(vec![2, 2, 2], rows).with_limits(None, Some(3));
        assert_eq!(cover.run(&mut |_| false), Stop::NodeLimit);
    }
}
