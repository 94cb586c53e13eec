//! Quantizers `f: {0,1}^n -> [M]` and the information `I(f(X^n); Y^n)` they
//! keep about the BSC output of a uniform input.
//!
//! Since `Y^n` is uniform, `I(f(X^n); Y^n) = n - H(Y^n | f(X^n))`, and the
//! conditional entropy is the cell-size weighted average of the noisy-subset
//! entropies of the cells.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::hypercube::{check_crossover, h, Dimension, Vertex, VertexSet};
use crate::noisy_subset::{hmn_closed_form, hmn_monotone, noisy_entropy_raw};
use crate::partitions::{partition_count, RestrictedGrowth};
use crate::report::{Check, CheckReport, CHECK_TOLERANCE};

/// A labeling of every vertex with a cell in `0..cells`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Quantizer {
    dimension: Dimension,
    labels: Vec<u32>,
    cells: usize,
}

impl Quantizer {
    pub fn new(dimension: Dimension, labels: Vec<u32>, cells: usize) -> Result<Self> {
        if labels.len() != dimension.size() {
            return Err(Error::DimensionMismatch {
                expected: dimension.size(),
                actual: labels.len(),
            });
        }
        if cells == 0 {
            return Err(Error::Precondition("a quantizer needs at least one cell".into()));
        }
        if let Some(&l) = labels.iter().find(|&&l| l as usize >= cells) {
            return Err(Error::Precondition(format!("label {l} is not below M = {cells}")));
        }
        Ok(Self {
            dimension,
            labels,
            cells,
        })
    }

    /// `M = 2^{n-1}` cells.
    pub fn with_default_cells(dimension: Dimension, labels: Vec<u32>) -> Result<Self> {
        Self::new(dimension, labels, default_cells(dimension))
    }

    /// Builds a quantizer from explicit blocks, labelled in the given order.
    pub fn from_blocks(dimension: Dimension, blocks: &[Vec<Vertex>], cells: usize) -> Result<Self> {
        let mut labels = vec![u32::MAX; dimension.size()];
        for (label, block) in blocks.iter().enumerate() {
            for &v in block {
                let slot = labels.get_mut(v as usize).ok_or(Error::VertexOutOfRange {
                    vertex: v,
                    dimension: dimension.get(),
                })?;
                if *slot != u32::MAX {
                    return Err(Error::Precondition(format!("vertex {v} appears in two blocks")));
                }
                *slot = label as u32;
            }
        }
        if labels.contains(&u32::MAX) {
            return Err(Error::Precondition("blocks do not cover the cube".into()));
        }
        Self::new(dimension, labels, cells)
    }

    pub fn dimension(&self) -> Dimension {
        self.dimension
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// The cell count `M`.
    pub fn cell_count(&self) -> usize {
        self.cells
    }

    /// Preimages `f^{-1}(j)` for `j = 0..M`; some may be empty.
    pub fn cells(&self) -> Vec<VertexSet> {
        self.cell_members()
            .into_iter()
            .map(|m| VertexSet::from_sorted(self.dimension, m))
            .collect()
    }

    fn cell_members(&self) -> Vec<Vec<Vertex>> {
        let mut cells = vec![Vec::new(); self.cells];
        for (v, &l) in self.labels.iter().enumerate() {
            cells[l as usize].push(v as Vertex);
        }
        cells
    }

    /// `m_j = |f^{-1}(j)|`.
    pub fn cell_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.cells];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }

    pub fn all_cells_nonempty(&self) -> bool {
        self.cell_sizes().iter().all(|&m| m > 0)
    }

    /// Nonempty cells ordered by smallest member; equal for quantizers that
    /// differ only by relabeling.
    pub fn blocks(&self) -> Vec<Vec<Vertex>> {
        let mut blocks: Vec<Vec<Vertex>> = self.cell_members().into_iter().filter(|c| !c.is_empty()).collect();
        blocks.sort();
        blocks
    }

    /// `sigma ∘ f` for a permutation `sigma` of the labels.
    pub fn relabel(&self, sigma: &[u32]) -> Result<Self> {
        if sigma.len() != self.cells {
            return Err(Error::DimensionMismatch {
                expected: self.cells,
                actual: sigma.len(),
            });
        }
        let labels = self.labels.iter().map(|&l| sigma[l as usize]).collect();
        Self::new(self.dimension, labels, self.cells)
    }

    /// `x -> f(g(x))` for a map `g` of the vertices given as a table.
    pub fn precompose(&self, map: impl Fn(Vertex) -> Vertex) -> Result<Self> {
        let labels = (0..self.dimension.size() as Vertex)
            .map(|x| self.labels[map(x) as usize])
            .collect();
        Self::new(self.dimension, labels, self.cells)
    }
}

/// `2^{n-1}`.
pub fn default_cells(dimension: Dimension) -> usize {
    dimension.size() / 2
}

/// `f(x) = (x_1, ..., x_{n-1})`: each cell pairs two words that differ only
/// in `x_n`.
pub fn projection_quantizer(dimension: Dimension) -> Quantizer {
    let mask = (default_cells(dimension) - 1) as u32;
    let labels = (0..dimension.size() as u32).map(|v| v & mask).collect();
    Quantizer::with_default_cells(dimension, labels).expect("projection labels are in range")
}

pub(crate) fn conditional_entropy_raw(f: &Quantizer, noise: &[f64], scratch: &mut Vec<f64>) -> f64 {
    let size = f.dimension.size();
    let total: f64 = f
        .cell_members()
        .iter()
        .filter(|c| !c.is_empty())
        .map(|c| c.len() as f64 * noisy_entropy_raw(size, c, noise, scratch))
        .sum();
    total / size as f64
}

/// `H(Y^n | f(X^n)) = 2^{-n} sum_j m_j H(U_{f^{-1}(j)} xor Z^n)`; empty cells
/// carry no weight.
pub fn conditional_output_entropy(f: &Quantizer, alpha: f64) -> Result<f64> {
    check_crossover(alpha)?;
    let noise = vec![alpha; f.dimension.get()];
    Ok(conditional_entropy_raw(f, &noise, &mut Vec::new()))
}

/// `I(f(X^n); Y^n) = n - H(Y^n | f(X^n))`.
pub fn mutual_information(f: &Quantizer, alpha: f64) -> Result<f64> {
    Ok(f.dimension.get() as f64 - conditional_output_entropy(f, alpha)?)
}

/// `(n-1)(1 - h(alpha))`.
pub fn theorem_bound(dimension: Dimension, alpha: f64) -> Result<f64> {
    check_crossover(alpha)?;
    Ok((dimension.get() as f64 - 1.0) * (1.0 - h(alpha)))
}

/// Number of cells of each size: `lambda[m] = #{j : m_j = m}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SizeProfile {
    /// Indexed by size, `0..=2^n`.
    pub lambda: Vec<u64>,
    pub cells: usize,
}

impl SizeProfile {
    pub fn count(&self, m: usize) -> u64 {
        self.lambda.get(m).copied().unwrap_or(0)
    }

    /// `sum_m lambda(m)`; equals `M`.
    pub fn total_cells(&self) -> u64 {
        self.lambda.iter().sum()
    }

    /// `sum_m m lambda(m)`; equals `2^n`.
    pub fn total_size(&self) -> u64 {
        self.lambda.iter().enumerate().map(|(m, &l)| m as u64 * l).sum()
    }

    /// `sum_{m >= 3} (m - 2) lambda(m)`.
    pub fn excess(&self) -> u64 {
        self.lambda.iter().enumerate().skip(3).map(|(m, &l)| (m as u64 - 2) * l).sum()
    }

    /// `lambda(1) = sum_{m>=3} (m-2) lambda(m)` when every cell is nonempty
    /// and the average cell size is 2; `None` when the identity does not
    /// apply.
    pub fn singleton_identity(&self) -> Option<bool> {
        let applies = self.count(0) == 0 && 2 * self.total_cells() == self.total_size();
        applies.then(|| self.count(1) == self.excess())
    }
}

pub fn size_profile(f: &Quantizer) -> SizeProfile {
    let mut lambda = vec![0u64; f.dimension.size() + 1];
    for m in f.cell_sizes() {
        lambda[m] += 1;
    }
    SizeProfile {
        lambda,
        cells: f.cells,
    }
}

/// The counting identities of a profile, and the singleton identity when
/// it applies.
pub fn check_size_profile(f: &Quantizer) -> CheckReport {
    let p = size_profile(f);
    let mut report = CheckReport::new();
    report.push(Check::eq("sum lambda(m) = M", p.total_cells() as f64, f.cells as f64, 0.0));
    report.push(Check::eq(
        "sum m lambda(m) = 2^n",
        p.total_size() as f64,
        f.dimension.size() as f64,
        0.0,
    ));
    if let Some(ok) = p.singleton_identity() {
        report.push(Check::eq(
            "lambda(1) = sum_{m>=3} (m-2) lambda(m)",
            p.count(1) as f64,
            p.excess() as f64,
            0.0,
        ));
        debug_assert_eq!(ok, report.passed());
    }
    report
}

/// Fills empty cells one at a time, each time moving the largest-index
/// vertex of the largest cell (smallest label on ties) into the
/// smallest-label empty cell. Returns every intermediate quantizer, the
/// input first.
pub fn repair_empty_cells_trace(f: &Quantizer) -> Result<Vec<Quantizer>> {
    if f.cells > f.dimension.size() {
        return Err(Error::Precondition(format!(
            "cannot fill M = {} cells with 2^n = {} vertices",
            f.cells,
            f.dimension.size()
        )));
    }
    let mut trace = vec![f.clone()];
    let mut current = f.clone();
    loop {
        let sizes = current.cell_sizes();
        let Some(empty) = sizes.iter().position(|&m| m == 0) else {
            break;
        };
        let (donor, _) = sizes
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .expect("at least one cell");
        let v = current
            .labels
            .iter()
            .rposition(|&l| l as usize == donor)
            .expect("donor cell is nonempty");
        current.labels[v] = empty as u32;
        trace.push(current.clone());
    }
    Ok(trace)
}

pub fn repair_empty_cells(f: &Quantizer) -> Result<Quantizer> {
    repair_empty_cells_trace(f).map(|mut t| t.pop().expect("trace starts with the input"))
}

/// Memoized `H_m^n(alpha)` values from the monotone search.
#[derive(Debug, Default, Clone)]
pub struct HmnCache {
    values: HashMap<(usize, usize, u64), f64>,
}

impl HmnCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, n: Dimension, m: usize, alpha: f64) -> Result<f64> {
        let key = (n.get(), m, alpha.to_bits());
        if let Some(&v) = self.values.get(&key) {
            return Ok(v);
        }
        let v = hmn_monotone(n, m, alpha)?.value;
        self.values.insert(key, v);
        Ok(v)
    }
}

/// The lower-bound chain on `H(Y^n | f)`, link by link.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MasterTrace {
    pub alpha: f64,
    pub profile: SizeProfile,
    /// `H(Y^n | f(X^n))`
    pub conditional_entropy: f64,
    /// `2^{-n} sum_m m lambda(m) H_m`
    pub profile_bound: f64,
    /// Same with `lambda(1) H_1` replaced by `sum_{m>=3} (m-2) lambda(m) H_1`.
    pub singleton_substituted: f64,
    /// `2^{-n} (2 lambda(2) + sum_{m>=3} (2m-2) lambda(m)) H_2`
    pub mixture_bound: f64,
    /// `H_2^n(alpha)`
    pub h2: f64,
    pub report: CheckReport,
}

pub fn master_inequality_trace(f: &Quantizer, alpha: f64) -> Result<MasterTrace> {
    master_inequality_trace_with(f, alpha, &mut HmnCache::new())
}

/// Evaluates every quantity in the chain
/// `H(Y|f) >= profile bound = substituted form >= mixture bound = H_2`
/// and checks each link. Requires `M = 2^{n-1}` and no empty cell.
pub fn master_inequality_trace_with(f: &Quantizer, alpha: f64, cache: &mut HmnCache) -> Result<MasterTrace> {
    check_crossover(alpha)?;
    let n = f.dimension;
    if f.cells != default_cells(n) || !f.all_cells_nonempty() {
        return Err(Error::Precondition(
            "master chain needs M = 2^{n-1} cells, all nonempty".into(),
        ));
    }
    let scale = 1.0 / n.size() as f64;
    let profile = size_profile(f);
    let conditional_entropy = conditional_output_entropy(f, alpha)?;

    let mut hm = vec![0.0; n.size() + 1];
    for (m, &l) in profile.lambda.iter().enumerate() {
        if l > 0 || m <= 2 {
            hm[m] = if m == 0 { 0.0 } else { cache.get(n, m, alpha)? };
        }
    }
    let (h1, h2) = (hm[1], hm[2]);
    let lambda = |m: usize| profile.count(m) as f64;

    let profile_bound = scale
        * profile
            .lambda
            .iter()
            .enumerate()
            .map(|(m, &l)| m as f64 * l as f64 * hm[m])
            .sum::<f64>();
    let tail: Vec<usize> = (3..=n.size()).filter(|&m| profile.count(m) > 0).collect();
    let singleton_substituted = scale
        * (2.0 * lambda(2) * h2
            + tail
                .iter()
                .map(|&m| {
                    let mf = m as f64;
                    (mf - 2.0) * lambda(m) * h1 + mf * lambda(m) * hm[m]
                })
                .sum::<f64>());
    let mixture_bound = scale
        * (2.0 * lambda(2) * h2 + tail.iter().map(|&m| (2.0 * m as f64 - 2.0) * lambda(m) * h2).sum::<f64>());

    let mut report = check_size_profile(f);
    report.push(Check::le(
        "profile bound <= H(Y|f)",
        profile_bound,
        conditional_entropy,
        CHECK_TOLERANCE,
    ));
    report.push(Check::eq(
        "profile bound = singleton-substituted form",
        profile_bound,
        singleton_substituted,
        CHECK_TOLERANCE,
    ));
    for &m in &tail {
        let mf = m as f64;
        let bracket = (mf - 2.0) / (2.0 * mf - 2.0) * h1 + mf / (2.0 * mf - 2.0) * hm[m];
        report.push(Check::ge(
            format!("mixture bracket >= H_2 at m = {m}"),
            bracket,
            h2,
            CHECK_TOLERANCE,
        ));
    }
    report.push(Check::le(
        "mixture bound <= singleton-substituted form",
        mixture_bound,
        singleton_substituted,
        CHECK_TOLERANCE,
    ));
    report.push(Check::eq("mixture bound = H_2", mixture_bound, h2, CHECK_TOLERANCE));
    report.push(Check::eq(
        "H_2 = 1 + (n-1) h(alpha)",
        h2,
        hmn_closed_form(n, 2, alpha)?,
        CHECK_TOLERANCE,
    ));
    report.push(Check::le("H_2 <= H(Y|f)", h2, conditional_entropy, CHECK_TOLERANCE));

    Ok(MasterTrace {
        alpha,
        profile,
        conditional_entropy,
        profile_bound,
        singleton_substituted,
        mixture_bound,
        h2,
        report,
    })
}

/// Result of a search over quantizers for one crossover.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchReport {
    pub n: Dimension,
    pub alpha: f64,
    #[serde(rename = "M")]
    pub cells: usize,
    pub bound: f64,
    pub max_mi: f64,
    /// `bound - max_mi`
    pub gap: f64,
    /// Maximizing partitions as lists of cells.
    pub argmax: Vec<Vec<Vec<Vertex>>>,
    pub partitions_examined: u64,
    pub projection_mi: f64,
    pub report: CheckReport,
}

const BATCH: usize = 4096;

/// Exhaustive search over unordered partitions of the cube into at most
/// `cells` blocks.
pub fn exhaustive_search(n: Dimension, alpha: f64, cells: usize) -> Result<SearchReport> {
    exhaustive_search_with(n, alpha, cells, &Budget::default(), |_, _| {})
}

/// Like [`exhaustive_search`], calling `inspect` on every partition with its
/// mutual information, in enumeration order.
pub fn exhaustive_search_with(
    n: Dimension,
    alpha: f64,
    cells: usize,
    budget: &Budget,
    mut inspect: impl FnMut(&Quantizer, f64),
) -> Result<SearchReport> {
    check_crossover(alpha)?;
    if cells == 0 {
        return Err(Error::Precondition("M must be positive".into()));
    }
    Budget::ensure("partitions", partition_count(n.size(), cells), budget.partitions)?;
    let noise = vec![alpha; n.get()];
    let nf = n.get() as f64;
    let mut rgs = RestrictedGrowth::new(n.size(), cells);
    let mut best = f64::NEG_INFINITY;
    let mut ties: Vec<(f64, Quantizer)> = Vec::new();
    let mut examined = 0u64;
    loop {
        let mut batch = Vec::with_capacity(BATCH);
        while batch.len() < BATCH {
            match rgs.advance() {
                Some(labels) => batch.push(Quantizer::new(n, labels.to_vec(), cells)?),
                None => break,
            }
        }
        if batch.is_empty() {
            break;
        }
        let mis: Vec<f64> = batch
            .par_iter()
            .map_init(Vec::new, |scratch, q| nf - conditional_entropy_raw(q, &noise, scratch))
            .collect();
        for (q, mi) in batch.into_iter().zip(mis) {
            examined += 1;
            inspect(&q, mi);
            if mi > best {
                best = mi;
                ties.retain(|(v, _)| *v >= best - CHECK_TOLERANCE);
            }
            if mi >= best - CHECK_TOLERANCE {
                ties.push((mi, q));
            }
        }
    }
    let argmax = ties
        .into_iter()
        .filter(|(v, _)| *v >= best - CHECK_TOLERANCE)
        .map(|(_, q)| q.blocks())
        .collect();
    finish_report(n, alpha, cells, best, argmax, examined)
}

fn finish_report(
    n: Dimension,
    alpha: f64,
    cells: usize,
    max_mi: f64,
    argmax: Vec<Vec<Vec<Vertex>>>,
    examined: u64,
) -> Result<SearchReport> {
    let bound = theorem_bound(n, alpha)?;
    let projection_mi = mutual_information(&projection_quantizer(n), alpha)?;
    let mut report = CheckReport::new();
    if cells <= default_cells(n) {
        report.push(Check::le("max MI <= (n-1)(1-h(alpha))", max_mi, bound, CHECK_TOLERANCE));
    }
    if cells == default_cells(n) {
        report.push(Check::eq(
            "projection MI = (n-1)(1-h(alpha))",
            projection_mi,
            bound,
            CHECK_TOLERANCE,
        ));
        report.push(Check::ge("projection attains the max", projection_mi, max_mi, CHECK_TOLERANCE));
    }
    Ok(SearchReport {
        n,
        alpha,
        cells,
        bound,
        max_mi,
        gap: bound - max_mi,
        argmax,
        partitions_examined: examined,
        projection_mi,
        report,
    })
}

/// Result of [`random_search`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RandomSearchReport {
    pub n: Dimension,
    pub alpha: f64,
    #[serde(rename = "M")]
    pub cells: usize,
    pub seed: u64,
    pub samples: u64,
    pub bound: f64,
    pub max_mi: f64,
    pub gap: f64,
    pub best: Quantizer,
    /// Sampled quantizers exceeding the bound by more than the tolerance.
    pub violations: u64,
    pub projection_mi: f64,
    pub report: CheckReport,
}

/// Draws `samples` label vectors uniformly from the seeded stream, repairs
/// empty cells, and evaluates each; the projection quantizer is evaluated
/// first so the reported best is never below it.
pub fn random_search(n: Dimension, alpha: f64, cells: usize, samples: u64, seed: u64) -> Result<RandomSearchReport> {
    random_search_with(n, alpha, cells, samples, seed, |_, _| {})
}

pub fn random_search_with(
    n: Dimension,
    alpha: f64,
    cells: usize,
    samples: u64,
    seed: u64,
    mut inspect: impl FnMut(&Quantizer, f64),
) -> Result<RandomSearchReport> {
    check_crossover(alpha)?;
    if cells == 0 || cells > n.size() {
        return Err(Error::Precondition(format!("M = {cells} must lie in 1..=2^n")));
    }
    let bound = theorem_bound(n, alpha)?;
    let check_bound = cells <= default_cells(n);
    let noise = vec![alpha; n.get()];
    let nf = n.get() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let projection = projection_quantizer(n);
    let projection = if cells == default_cells(n) {
        projection
    } else {
        // keep the projection's cells, refit to M labels
        let labels = projection.labels().iter().map(|&l| l % cells as u32).collect();
        repair_empty_cells(&Quantizer::new(n, labels, cells)?)?
    };
    let projection_mi = nf - conditional_entropy_raw(&projection, &noise, &mut Vec::new());
    inspect(&projection, projection_mi);
    let mut best = (projection_mi, projection);
    let mut violations = u64::from(check_bound && projection_mi > bound + CHECK_TOLERANCE);

    let mut remaining = samples;
    while remaining > 0 {
        let take = remaining.min(BATCH as u64) as usize;
        remaining -= take as u64;
        let batch = (0..take)
            .map(|_| {
                let labels = (0..n.size()).map(|_| rng.random_range(0..cells as u32)).collect();
                repair_empty_cells(&Quantizer::new(n, labels, cells)?)
            })
            .collect::<Result<Vec<_>>>()?;
        let mis: Vec<f64> = batch
            .par_iter()
            .map_init(Vec::new, |scratch, q| nf - conditional_entropy_raw(q, &noise, scratch))
            .collect();
        for (q, mi) in batch.into_iter().zip(mis) {
            inspect(&q, mi);
            if check_bound && mi > bound + CHECK_TOLERANCE {
                violations += 1;
            }
            if mi > best.0 {
                best = (mi, q);
            }
        }
    }

    let mut report = CheckReport::new();
    if check_bound {
        report.push(Check::le(
            "sampled bound violations = 0",
            violations as f64,
            0.0,
            0.0,
        ));
        report.push(Check::le("max MI <= (n-1)(1-h(alpha))", best.0, bound, CHECK_TOLERANCE));
    }
    if cells == default_cells(n) {
        report.push(Check::eq(
            "projection MI = (n-1)(1-h(alpha))",
            projection_mi,
            bound,
            CHECK_TOLERANCE,
        ));
    }
    Ok(RandomSearchReport {
        n,
        alpha,
        cells,
        seed,
        samples,
        bound,
        max_mi: best.0,
        gap: bound - best.0,
        best: best.1,
        violations,
        projection_mi,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercube::permute_vertex;

    fn dim(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn quantizer_validation() {
        let d = dim(2);
        assert!(Quantizer::new(d, vec![0, 1, 0], 2).is_err());
        assert!(Quantizer::new(d, vec![0, 1, 2, 0], 2).is_err());
        assert!(Quantizer::new(d, vec![0; 4], 0).is_err());
        let q = Quantizer::from_blocks(d, &[vec![0, 3], vec![1, 2]], 2).unwrap();
        assert_eq!(q.labels(), &[0, 1, 1, 0]);
        assert!(Quantizer::from_blocks(d, &[vec![0, 3], vec![1]], 2).is_err());
        assert!(Quantizer::from_blocks(d, &[vec![0, 3], vec![1, 3, 2]], 2).is_err());
    }

    #[test]
    fn projection_examples() {
        let p = projection_quantizer(dim(2));
        assert_eq!(p.blocks(), vec![vec![0, 2], vec![1, 3]]);
        let words: Vec<Vec<String>> = p.cells().iter().map(|c| c.words()).collect();
        assert_eq!(words, vec![vec!["00", "01"], vec!["10", "11"]]);
        for n in 1..=6 {
            let p = projection_quantizer(dim(n));
            assert!(p.cell_sizes().iter().all(|&m| m == 2));
            for c in p.cells() {
                assert_eq!(c.members()[0] ^ c.members()[1], 1 << (n - 1));
            }
            for alpha in [0.0, 0.11, 0.3, 0.5] {
                assert!(close(mutual_information(&p, alpha).unwrap(), theorem_bound(dim(n), alpha).unwrap()));
            }
        }
    }

    #[test]
    fn conditional_entropy_examples() {
        for n in 1..=4 {
            let d = dim(n);
            let constant = Quantizer::new(d, vec![0; d.size()], 1).unwrap();
            assert!(close(conditional_output_entropy(&constant, 0.2).unwrap(), n as f64));
            assert!(close(mutual_information(&constant, 0.2).unwrap(), 0.0));
            let injective = Quantizer::new(d, (0..d.size() as u32).collect(), d.size()).unwrap();
            assert!(close(conditional_output_entropy(&injective, 0.2).unwrap(), n as f64 * h(0.2)));
            if n >= 2 {
                let p = projection_quantizer(d);
                assert!(close(
                    conditional_output_entropy(&p, 0.2).unwrap(),
                    1.0 + (n as f64 - 1.0) * h(0.2)
                ));
            }
            let q = Quantizer::with_default_cells(d, (0..d.size() as u32).map(|v| v.count_ones() % (d.size() as u32 / 2).max(1)).collect()).unwrap();
            assert!(close(mutual_information(&q, 0.5).unwrap(), 0.0));
        }
    }

    #[test]
    fn theorem_bound_examples() {
        assert_eq!(theorem_bound(dim(3), 0.5).unwrap(), 0.0);
        assert_eq!(theorem_bound(dim(3), 0.0).unwrap(), 2.0);
        assert!(close(theorem_bound(dim(3), 0.25).unwrap(), 2.0 * (1.0 - h(0.25))));
    }

    #[test]
    fn size_profile_examples() {
        let d = dim(3);
        let p = size_profile(&projection_quantizer(d));
        assert_eq!(p.count(2), 4);
        assert_eq!(p.count(1), 0);
        assert_eq!(p.singleton_identity(), Some(true));

        let q = Quantizer::from_blocks(d, &[vec![0, 1, 2], vec![3], vec![4, 5], vec![6, 7]], 4).unwrap();
        let p = size_profile(&q);
        assert_eq!((p.count(1), p.count(3)), (1, 1));
        assert_eq!(p.singleton_identity(), Some(true));

        let q = Quantizer::from_blocks(d, &[vec![0, 1, 2, 3], vec![4], vec![5], vec![6, 7]], 4).unwrap();
        let p = size_profile(&q);
        assert_eq!(p.count(1), 2);
        assert_eq!(p.excess(), 2);
        assert!(check_size_profile(&q).passed());

        let sparse = Quantizer::new(d, vec![0; 8], 4).unwrap();
        assert_eq!(size_profile(&sparse).singleton_identity(), None);
    }

    #[test]
    fn repair_examples() {
        let p = projection_quantizer(dim(3));
        assert_eq!(repair_empty_cells(&p).unwrap(), p);

        let f = Quantizer::new(dim(2), vec![0; 4], 2).unwrap();
        let g = repair_empty_cells(&f).unwrap();
        assert_eq!(g.labels(), &[0, 0, 0, 1]);
        assert!(mutual_information(&g, 0.2).unwrap() >= mutual_information(&f, 0.2).unwrap() - 1e-9);

        let f = Quantizer::new(dim(3), vec![0; 8], 4).unwrap();
        let trace = repair_empty_cells_trace(&f).unwrap();
        assert_eq!(trace.len(), 4);
        assert_eq!(trace.last().unwrap().cell_sizes(), vec![5, 1, 1, 1]);
        for w in trace.windows(2) {
            assert!(mutual_information(&w[1], 0.2).unwrap() >= mutual_information(&w[0], 0.2).unwrap() - 1e-9);
        }
        assert!(repair_empty_cells(&Quantizer::new(dim(1), vec![0, 0], 3).unwrap()).is_err());
    }

    #[test]
    fn master_trace_examples() {
        let d = dim(3);
        let t = master_inequality_trace(&projection_quantizer(d), 0.2).unwrap();
        assert!(t.report.passed());
        assert!(close(t.conditional_entropy, t.h2));

        let q = Quantizer::from_blocks(d, &[vec![0, 1, 2], vec![3], vec![4, 5], vec![6, 7]], 4).unwrap();
        let t = master_inequality_trace(&q, 0.2).unwrap();
        assert!(t.report.passed(), "{:?}", t.report.first_failure());
        assert!(t.report.min_slack().unwrap() >= -1e-9);

        let t = master_inequality_trace(&q, 0.5).unwrap();
        for v in [t.conditional_entropy, t.profile_bound, t.singleton_substituted, t.mixture_bound, t.h2] {
            assert!(close(v, 3.0));
        }
        assert!(master_inequality_trace(&Quantizer::new(d, vec![0; 8], 4).unwrap(), 0.2).is_err());
    }

    #[test]
    fn relabeling_and_domain_symmetries_preserve_mi() {
        let d = dim(3);
        let q = Quantizer::with_default_cells(d, vec![0, 1, 1, 2, 3, 3, 0, 2]).unwrap();
        let base = mutual_information(&q, 0.17).unwrap();
        let relabeled = q.relabel(&[2, 0, 3, 1]).unwrap();
        assert!(close(mutual_information(&relabeled, 0.17).unwrap(), base));
        let moved = q.precompose(|x| permute_vertex(x ^ 0b101, &[2, 0, 1])).unwrap();
        assert!(close(mutual_information(&moved, 0.17).unwrap(), base));
        assert_eq!(relabeled.blocks(), q.blocks());
    }

    #[test]
    fn exhaustive_examples() {
        let r = exhaustive_search(dim(2), 0.2, 2).unwrap();
        assert!(close(r.max_mi, 1.0 - h(0.2)));
        assert_eq!(r.partitions_examined, 8);
        // the two single-coordinate splits
        assert_eq!(r.argmax, vec![vec![vec![0, 1], vec![2, 3]], vec![vec![0, 2], vec![1, 3]]]);
        assert!(r.report.passed());

        let r = exhaustive_search(dim(3), 0.3, 4).unwrap();
        assert!(close(r.max_mi, 2.0 * (1.0 - h(0.3))));
        assert!(r.argmax.contains(&projection_quantizer(dim(3)).blocks()));
        assert!(r.report.passed());

        let r = exhaustive_search(dim(2), 0.0, 2).unwrap();
        assert!(close(r.max_mi, 1.0));

        assert!(matches!(
            exhaustive_search_with(dim(4), 0.1, 8, &Budget::default(), |_, _| {}),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn exhaustive_label_invariance() {
        // a relabeled representative evaluates to the same MI as enumerated
        let mut seen = 0;
        exhaustive_search_with(dim(2), 0.1, 2, &Budget::default(), |q, mi| {
            let swapped = q.relabel(&[1, 0]).unwrap();
            assert!(close(mutual_information(&swapped, 0.1).unwrap(), mi));
            seen += 1;
        })
        .unwrap();
        assert_eq!(seen, 8);
    }

    #[test]
    fn random_search_is_deterministic() {
        let a = random_search(dim(4), 0.2, 8, 300, 7).unwrap();
        let b = random_search(dim(4), 0.2, 8, 300, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.violations, 0);
        assert!(a.max_mi >= 3.0 * (1.0 - h(0.2)) - 1e-9);
        assert!(a.report.passed());
        let c = random_search(dim(4), 0.2, 8, 300, 8).unwrap();
        assert_eq!(c.samples, 300);
    }
}
