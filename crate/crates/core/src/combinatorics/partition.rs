use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered partition of the vertex set `0..n` into parts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PartitionDoc", into = "PartitionDoc")]
pub struct Partition {
    parts: Vec<Vec<u32>>,
    assignment: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct PartitionDoc {
    parts: Vec<Vec<u32>>,
}

impl TryFrom<PartitionDoc> for Partition {
    type Error = Error;
    fn try_from(doc: PartitionDoc) -> Result<Self> {
        Partition::new(doc.parts)
    }
}

impl From<Partition> for PartitionDoc {
    fn from(p: Partition) -> Self {
        PartitionDoc { parts: p.parts }
    }
}

impl Partition {
    /// Builds a partition from its parts; together they must cover `0..n` exactly once.
    /// Empty parts are allowed.
    pub fn new(parts: Vec<Vec<u32>>) -> Result<Self> {
        let n: usize = parts.iter().map(|p| p.len()).sum();
        let mut assignment = vec![usize::MAX; n];
        let mut sorted_parts = Vec::with_capacity(parts.len());
        for (j, part) in parts.into_iter().enumerate() {
            let mut part = part;
            part.sort_unstable();
            for &v in &part {
                let slot = assignment
                    .get_mut(v as usize)
                    .ok_or_else(|| Error::InvalidPartition(format!("vertex {v} outside 0..{n}")))?;
                if *slot != usize::MAX {
                    return Err(Error::InvalidPartition(format!("vertex {v} in two parts")));
                }
                *slot = j;
            }
            sorted_parts.push(part);
        }
        Ok(Partition { parts: sorted_parts, assignment })
    }

    /// Consecutive interval parts of the given sizes.
    pub fn from_sizes(sizes: &[usize]) -> Self {
        let mut parts = Vec::with_capacity(sizes.len());
        let mut next = 0u32;
        for &s in sizes {
            parts.push((next..next + s as u32).collect());
            next += s as u32;
        }
        Partition::new(parts).expect("interval parts are valid")
    }

    /// The single-part partition of `0..n`.
    pub fn trivial(n: usize) -> Self {
        Partition::from_sizes(&[n])
    }

    /// Every vertex in its own part.
    pub fn singletons(n: usize) -> Self {
        Partition::from_sizes(&vec![1; n])
    }

    pub fn part_count(&self) -> usize {
        self.parts.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.assignment.len()
    }

    pub fn parts(&self) -> &[Vec<u32>] {
        &self.parts
    }

    pub fn part(&self, j: usize) -> &[u32] {
        &self.parts[j]
    }

    pub fn part_of(&self, v: u32) -> usize {
        self.assignment[v as usize]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.parts.iter().map(|p| p.len()).collect()
    }

    /// The index vector of `s`: component `j` counts the elements of `s` in part `j`.
    pub fn index_vector(&self, s: &[u32]) -> Result<Vec<usize>> {
        let mut idx = vec![0; self.parts.len()];
        for &v in s {
            let j = *self
                .assignment
                .get(v as usize)
                .ok_or(Error::VertexOutOfRange { vertex: v, n: self.assignment.len() })?;
            idx[j] += 1;
        }
        Ok(idx)
    }

    /// True if every part is an interval and parts appear in increasing order.
    pub fn is_order_respecting(&self) -> bool {
        let mut prev_max: Option<u32> = None;
        for part in &self.parts {
            if part.is_empty() {
                continue;
            }
            if let Some(m) = prev_max {
                if part[0] < m {
                    return false;
                }
            }
            if part.windows(2).any(|w| w[1] != w[0] + 1) {
                return false;
            }
            prev_max = part.last().copied();
        }
        true
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("partition serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
