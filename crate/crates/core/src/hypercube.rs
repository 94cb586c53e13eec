//! Vertices, vertex sets and distributions over `{0,1}^n`, together with the
//! entropy and noise kernels the rest of the crate is built on.
//!
//! Vertex `v` is an integer in `[0, 2^n)`; bit `i` of `v` is the coordinate
//! `x_{i+1}`. A word written `x_1 x_2 ... x_n` (as in [`VertexSet::from_words`])
//! therefore reads the index bits least-significant first.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported number of coordinates.
pub const MAX_DIMENSION: usize = 24;

/// Tolerance on the total mass of a [`Pmf`].
pub const PMF_TOLERANCE: f64 = 1e-12;

/// A hypercube vertex index.
pub type Vertex = u32;

/// Number of hypercube coordinates, `1 <= n <= MAX_DIMENSION`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(n: usize) -> Result<Self> {
        if (1..=MAX_DIMENSION).contains(&n) {
            Ok(Self(n))
        } else {
            Err(Error::Dimension(n))
        }
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    /// `2^n`, the number of vertices.
    #[inline]
    pub fn size(self) -> usize {
        1 << self.0
    }

    pub fn contains(self, v: Vertex) -> bool {
        (v as usize) < self.size()
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Checks `0 <= p <= 1`.
pub fn check_probability(what: &'static str, p: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(Error::Domain {
            what,
            value: p,
            domain: "[0, 1]",
        })
    }
}

/// Checks `0 <= alpha <= 1/2`.
pub fn check_crossover(alpha: f64) -> Result<f64> {
    if (0.0..=0.5).contains(&alpha) {
        Ok(alpha)
    } else {
        Err(Error::Domain {
            what: "crossover",
            value: alpha,
            domain: "[0, 1/2]",
        })
    }
}

/// `-p log2 p`, with `0 log 0 = 0`.
#[inline]
pub(crate) fn plogp(p: f64) -> f64 {
    if p > 0.0 {
        -p * p.log2()
    } else {
        0.0
    }
}

#[inline]
pub(crate) fn h(p: f64) -> f64 {
    plogp(p) + plogp(1.0 - p)
}

/// Binary entropy `h(p) = -p log2 p - (1-p) log2 (1-p)` in bits.
pub fn binary_entropy(p: f64) -> Result<f64> {
    check_probability("p", p).map(h)
}

#[inline]
pub(crate) fn conv(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + (1.0 - a) * b
}

/// Crossover of two cascaded BSCs: `a(1-b) + (1-a)b`.
pub fn star(a: f64, b: f64) -> Result<f64> {
    check_probability("a", a)?;
    check_probability("b", b)?;
    Ok(conv(a, b))
}

/// Pairwise summation of `f(0) + ... + f(len-1)`.
///
/// The reduction tree depends only on `len`, so the result is reproducible.
pub(crate) fn pairwise_sum<F: Fn(usize) -> f64 + Copy>(start: usize, len: usize, f: F) -> f64 {
    const BLOCK: usize = 32;
    if len <= BLOCK {
        (start..start + len).map(f).sum()
    } else {
        let half = len / 2;
        pairwise_sum(start, half, f) + pairwise_sum(start + half, len - half, f)
    }
}

/// A binary symmetric channel with crossover in `[0, 1/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BscChannel {
    alpha: f64,
}

impl BscChannel {
    pub fn new(alpha: f64) -> Result<Self> {
        check_crossover(alpha).map(|alpha| Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn capacity(&self) -> f64 {
        1.0 - h(self.alpha)
    }
}

/// A subset of `{0,1}^n`, stored as a strictly increasing list of indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexSet {
    dimension: Dimension,
    members: Vec<Vertex>,
}

impl VertexSet {
    /// Builds a set from arbitrary members; order and repeats are ignored.
    pub fn new(dimension: Dimension, members: impl IntoIterator<Item = Vertex>) -> Result<Self> {
        let mut members: Vec<Vertex> = members.into_iter().collect();
        if let Some(&v) = members.iter().find(|&&v| !dimension.contains(v)) {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                dimension: dimension.get(),
            });
        }
        members.sort_unstable();
        members.dedup();
        Ok(Self { dimension, members })
    }

    /// Caller guarantees sorted, distinct, in-range members.
    pub(crate) fn from_sorted(dimension: Dimension, members: Vec<Vertex>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(members.iter().all(|&v| dimension.contains(v)));
        Self { dimension, members }
    }

    /// The whole cube.
    pub fn full(dimension: Dimension) -> Self {
        Self::from_sorted(dimension, (0..dimension.size() as Vertex).collect())
    }

    /// Parses words written `x_1 x_2 ... x_n`, e.g. `"100"` is the vertex with
    /// only `x_1` set.
    pub fn from_words(dimension: Dimension, words: &[&str]) -> Result<Self> {
        let members = words
            .iter()
            .map(|w| parse_word(dimension, w))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dimension, members)
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn members(&self) -> &[Vertex] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    /// Down-closed under the coordinatewise order: with `x`, every `y <= x`
    /// is present. Checking the lower covers of each member suffices.
    pub fn is_monotone(&self) -> bool {
        self.members.iter().all(|&x| {
            (0..self.dimension.get())
                .filter(|&i| x >> i & 1 == 1)
                .all(|i| self.contains(x & !(1 << i)))
        })
    }

    /// Total Hamming weight of the members.
    pub fn weight(&self) -> u64 {
        self.members.iter().map(|v| u64::from(v.count_ones())).sum()
    }

    /// `{x xor shift : x in S}`.
    pub fn translate(&self, shift: Vertex) -> Result<Self> {
        Self::new(self.dimension, self.members.iter().map(|&x| x ^ shift))
    }

    /// Moves coordinate `i` to position `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(self.dimension, perm)?;
        Ok(Self::new(self.dimension, self.members.iter().map(|&x| permute_vertex(x, perm)))
            .expect("permutation keeps vertices in range"))
    }

    pub fn words(&self) -> Vec<String> {
        self.members
            .iter()
            .map(|&v| vertex_word(self.dimension, v))
            .collect()
    }
}

impl Serialize for VertexSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.members.serialize(serializer)
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.words().join(", "))
    }
}

/// Formats `v` as `x_1 x_2 ... x_n`.
pub fn vertex_word(dimension: Dimension, v: Vertex) -> String {
    (0..dimension.get())
        .map(|i| if v >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn parse_word(dimension: Dimension, word: &str) -> Result<Vertex> {
    if word.len() != dimension.get() {
        return Err(Error::DimensionMismatch {
            expected: dimension.get(),
            actual: word.len(),
        });
    }
    word.chars().enumerate().try_fold(0, |acc, (i, c)| match c {
        '0' => Ok(acc),
        '1' => Ok(acc | 1 << i),
        _ => Err(Error::Precondition(format!("invalid character {c:?} in word {word:?}"))),
    })
}

#[inline]
pub fn permute_vertex(v: Vertex, perm: &[usize]) -> Vertex {
    perm.iter()
        .enumerate()
        .fold(0, |acc, (i, &to)| acc | ((v >> i) & 1) << to)
}

fn check_permutation(dimension: Dimension, perm: &[usize]) -> Result<()> {
    let n = dimension.get();
    let mut seen = vec![false; n];
    if perm.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: perm.len(),
        });
    }
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::Precondition(format!("{perm:?} is not a permutation")));
        }
    }
    Ok(())
}

/// A probability mass function over the `2^n` vertices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pmf {
    dimension: Dimension,
    mass: Vec<f64>,
}

impl Pmf {
    pub fn new(dimension: Dimension, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != dimension.size() {
            return Err(Error::DimensionMismatch {
                expected: dimension.size(),
                actual: mass.len(),
            });
        }
        if let Some(p) = mass.iter().find(|p| p.is_nan() || **p < 0.0) {
            return Err(Error::InvalidPmf(format!("negative or NaN mass {p}")));
        }
        let total = pairwise_sum(0, mass.len(), |i| mass[i]);
        if (total - 1.0).abs() > PMF_TOLERANCE {
            return Err(Error::InvalidPmf(format!("total mass {total} differs from 1")));
        }
        Ok(Self { dimension, mass })
    }

    pub(crate) fn from_raw(dimension: Dimension, mass: Vec<f64>) -> Self {
        debug_assert_eq!(mass.len(), dimension.size());
        Self { dimension, mass }
    }

    pub fn uniform(dimension: Dimension) -> Self {
        let size = dimension.size();
        Self::from_raw(dimension, vec![1.0 / size as f64; size])
    }

    pub fn point(dimension: Dimension, v: Vertex) -> Result<Self> {
        uniform_pmf_on(&VertexSet::new(dimension, [v])?)
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn into_mass(self) -> Vec<f64> {
        self.mass
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Pmf) -> f64 {
        self.mass
            .iter()
            .zip(&other.mass)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// The uniform distribution on the members of `set`.
pub fn uniform_pmf_on(set: &VertexSet) -> Result<Pmf> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut mass = vec![0.0; set.dimension().size()];
    let p = 1.0 / set.len() as f64;
    for &v in set.members() {
        mass[v as usize] = p;
    }
    Ok(Pmf::from_raw(set.dimension(), mass))
}

/// Applies an independent BSC with crossover `noise[i]` along each bit `i`.
///
/// `mass.len()` must be `2^noise.len()`.
pub(crate) fn apply_noise(mass: &mut [f64], noise: &[f64]) {
    debug_assert_eq!(mass.len(), 1 << noise.len());
    for (i, &a) in noise.iter().enumerate() {
        if a == 0.0 {
            continue;
        }
        let bit = 1 << i;
        let keep = 1.0 - a;
        for base in (0..mass.len()).step_by(bit << 1) {
            for v in base..base + bit {
                let (p0, p1) = (mass[v], mass[v | bit]);
                mass[v] = keep * p0 + a * p1;
                mass[v | bit] = a * p0 + keep * p1;
            }
        }
    }
}

/// Distribution of `U xor Z` where `U ~ p` and `Z_i ~ Bernoulli(noise[i])`
/// independently. Runs in `O(n 2^n)`.
pub fn noise_transform(p: &Pmf, noise: &[f64]) -> Result<Pmf> {
    if noise.len() != p.dimension.get() {
        return Err(Error::DimensionMismatch {
            expected: p.dimension.get(),
            actual: noise.len(),
        });
    }
    for &a in noise {
        check_crossover(a)?;
    }
    let mut mass = p.mass.clone();
    apply_noise(&mut mass, noise);
    Ok(Pmf::from_raw(p.dimension, mass))
}

/// Shannon entropy in bits of an unnormalised mass vector.
pub(crate) fn entropy_of(mass: &[f64]) -> f64 {
    pairwise_sum(0, mass.len(), |i| plogp(mass[i]))
}

/// Shannon entropy of `p` in bits.
pub fn entropy(p: &Pmf) -> f64 {
    entropy_of(&p.mass)
}
