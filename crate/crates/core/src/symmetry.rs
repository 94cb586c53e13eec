//! Canonical forms of vertex sets under the hypercube automorphisms that
//! preserve i.i.d. BSC noise: coordinate permutations and XOR translations.

use crate::error::{Error, Result};
use crate::hypercube::{permute_vertex, Dimension, Vertex};

/// Largest dimension for which permutation tables are built (`7! * 2^7`
/// entries).
pub const MAX_TABLE_DIMENSION: usize = 7;

/// All `n!` coordinate permutations, tabulated as vertex maps.
#[derive(Debug, Clone)]
pub struct SymmetryGroup {
    dimension: Dimension,
    tables: Vec<Vec<Vertex>>,
}

/// Every permutation of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

impl SymmetryGroup {
    pub fn new(dimension: Dimension) -> Result<Self> {
        let n = dimension.get();
        if n > MAX_TABLE_DIMENSION {
            return Err(Error::Precondition(format!(
                "symmetry tables support n <= {MAX_TABLE_DIMENSION}, got {n}"
            )));
        }
        let tables = permutations(n)
            .iter()
            .map(|perm| {
                (0..dimension.size() as Vertex)
                    .map(|v| permute_vertex(v, perm))
                    .collect()
            })
            .collect();
        Ok(Self { dimension, tables })
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    /// Number of coordinate permutations.
    pub fn permutation_count(&self) -> usize {
        self.tables.len()
    }

    /// Whether the sorted `set` (which must contain 0) is the lexicographically
    /// smallest image of itself under permutations and translations.
    ///
    /// Every image containing 0 starts with 0, and an image without 0 is
    /// larger than any with it, so only translations by members matter.
    pub fn is_canonical(&self, set: &[Vertex], scratch: &mut Vec<Vertex>) -> bool {
        debug_assert_eq!(set.first(), Some(&0));
        for &shift in set {
            for table in &self.tables {
                scratch.clear();
                scratch.extend(set.iter().map(|&x| table[(x ^ shift) as usize]));
                scratch.sort_unstable();
                if scratch.as_slice() < set {
                    return false;
                }
            }
        }
        true
    }

    /// Lexicographically smallest image under permutations and translations.
    pub fn canonical(&self, set: &[Vertex]) -> Vec<Vertex> {
        let mut best: Option<Vec<Vertex>> = None;
        let mut scratch = Vec::with_capacity(set.len());
        for &shift in set {
            for table in &self.tables {
                scratch.clear();
                scratch.extend(set.iter().map(|&x| table[(x ^ shift) as usize]));
                scratch.sort_unstable();
                if best.as_ref().is_none_or(|b| scratch < *b) {
                    best = Some(scratch.clone());
                }
            }
        }
        best.unwrap_or_default()
    }

    /// Lexicographically smallest image under coordinate permutations only.
    /// Keeps down-sets down-closed.
    pub fn canonical_under_permutations(&self, set: &[Vertex]) -> Vec<Vertex> {
        let mut best: Option<Vec<Vertex>> = None;
        let mut scratch = Vec::with_capacity(set.len());
        for table in &self.tables {
            scratch.clear();
            scratch.extend(set.iter().map(|&x| table[x as usize]));
            scratch.sort_unstable();
            if best.as_ref().is_none_or(|b| scratch < *b) {
                best = Some(scratch.clone());
            }
        }
        best.unwrap_or_default()
    }
}

/// Lexicographically smallest image under XOR translations only.
pub fn canonical_under_translation(set: &[Vertex]) -> Vec<Vertex> {
    let mut best: Option<Vec<Vertex>> = None;
    for &shift in set {
        let mut image: Vec<Vertex> = set.iter().map(|&x| x ^ shift).collect();
        image.sort_unstable();
        if best.as_ref().is_none_or(|b| image < *b) {
            best = Some(image);
        }
    }
    best.unwrap_or_default()
}
