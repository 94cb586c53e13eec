//! Output entropy of a uniform subset seen through a BSC, and its minimum
//! `H_m^n(alpha)` over subsets of a fixed size.
//!
//! Two independent searches compute the minimum: [`hmn_bruteforce`] visits
//! every subset (optionally one per symmetry orbit) and [`hmn_monotone`]
//! visits only down-closed sets. Closed forms for `m <= 4` and the
//! inequalities that tie the sizes together are checked against both.

use serde::Serialize;

use crate::budget::{binomial, Budget};
use crate::error::{Error, Result};
use crate::hypercube::{apply_noise, check_crossover, conv, entropy_of, h, Dimension, Vertex, VertexSet};
use crate::report::{Check, CheckReport, CHECK_TOLERANCE};
use crate::symmetry::{canonical_under_translation, SymmetryGroup, MAX_TABLE_DIMENSION};

/// `{0, 0.01, 0.05, 0.10, ..., 0.45, 0.49, 0.5}`.
pub fn default_alpha_grid() -> Vec<f64> {
    let mut grid = vec![0.0, 0.01];
    grid.extend((1..=9).map(|k| k as f64 * 0.05));
    grid.extend([0.49, 0.5]);
    grid
}

/// `{0, 0.05, ..., 0.5}`.
pub fn coarse_alpha_grid() -> Vec<f64> {
    (0..=10).map(|k| k as f64 * 0.05).collect()
}

/// Entropy of the uniform distribution on `members` after per-coordinate
/// noise. `scratch` is reused across calls.
pub(crate) fn noisy_entropy_raw(size: usize, members: &[Vertex], noise: &[f64], scratch: &mut Vec<f64>) -> f64 {
    scratch.clear();
    scratch.resize(size, 0.0);
    let p = 1.0 / members.len() as f64;
    for &v in members {
        scratch[v as usize] = p;
    }
    apply_noise(scratch, noise);
    entropy_of(scratch)
}

/// `H(U_S xor Z^n)` with `Z^n` i.i.d. Bernoulli(`alpha`).
pub fn noisy_subset_entropy(set: &VertexSet, alpha: f64) -> Result<f64> {
    check_crossover(alpha)?;
    noisy_subset_entropy_with_noise(set, &vec![alpha; set.dimension().get()])
}

/// `H(U_S xor Z^n)` with independent `Z_i ~ Bernoulli(noise[i])`.
pub fn noisy_subset_entropy_with_noise(set: &VertexSet, noise: &[f64]) -> Result<f64> {
    let n = set.dimension().get();
    if noise.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: noise.len(),
        });
    }
    for &a in noise {
        check_crossover(a)?;
    }
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut scratch = Vec::new();
    Ok(noisy_entropy_raw(set.dimension().size(), set.members(), noise, &mut scratch))
}

/// Symmetry reduction used by [`hmn_bruteforce_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    /// Every size-`m` subset.
    None,
    /// Only subsets containing vertex 0.
    Translation,
    /// One subset per orbit of permutations and translations.
    Full,
}

/// `H_m^n(alpha)` together with every set attaining it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HmnResult {
    pub n: Dimension,
    pub m: usize,
    pub alpha: f64,
    pub value: f64,
    /// Minimizers within [`CHECK_TOLERANCE`] of `value`, canonicalized and
    /// deduplicated.
    pub minimizers: Vec<VertexSet>,
    /// Candidate sets visited by the search.
    pub candidates: u64,
    /// Candidate sets whose entropy was evaluated.
    pub evaluated: u64,
}

/// Running argmin with tolerance-based ties.
struct ArgMin {
    best: f64,
    ties: Vec<(f64, Vec<Vertex>)>,
}

impl ArgMin {
    fn new() -> Self {
        Self {
            best: f64::INFINITY,
            ties: Vec::new(),
        }
    }

    fn offer(&mut self, value: f64, set: &[Vertex]) {
        if value < self.best {
            self.best = value;
            let cut = value + CHECK_TOLERANCE;
            self.ties.retain(|(v, _)| *v <= cut);
        }
        if value <= self.best + CHECK_TOLERANCE {
            self.ties.push((value, set.to_vec()));
        }
    }
}

/// Visits every size-`k` subset of `pool` in lexicographic order.
fn for_each_combination(pool: &[Vertex], k: usize, mut visit: impl FnMut(&[Vertex])) {
    let len = pool.len();
    if k > len {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut chosen: Vec<Vertex> = idx.iter().map(|&i| pool[i]).collect();
    loop {
        visit(&chosen);
        let Some(pos) = (0..k).rev().find(|&i| idx[i] != i + len - k) else {
            return;
        };
        idx[pos] += 1;
        for j in pos + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
        for j in pos..k {
            chosen[j] = pool[idx[j]];
        }
    }
}

fn check_size(n: Dimension, m: usize) -> Result<()> {
    if m == 0 || m > n.size() {
        return Err(Error::Precondition(format!(
            "set size m = {m} must lie in 1..={}",
            n.size()
        )));
    }
    Ok(())
}

/// Exact `H_m^n(alpha)` by exhaustive search over all size-`m` subsets,
/// using full symmetry pruning and the default budget.
pub fn hmn_bruteforce(n: Dimension, m: usize, alpha: f64) -> Result<HmnResult> {
    hmn_bruteforce_with(n, m, &[alpha], Symmetry::Full, &Budget::default()).map(|mut v| v.remove(0))
}

/// Exhaustive `H_m^n` search for several crossovers at once.
///
/// With [`Symmetry::Full`] and `n > 7` the search falls back to translation
/// pruning, as permutation tables would be too large.
pub fn hmn_bruteforce_with(
    n: Dimension,
    m: usize,
    alphas: &[f64],
    symmetry: Symmetry,
    budget: &Budget,
) -> Result<Vec<HmnResult>> {
    check_size(n, m)?;
    for &a in alphas {
        check_crossover(a)?;
    }
    let size = n.size();
    let symmetry = match symmetry {
        Symmetry::Full if n.get() > MAX_TABLE_DIMENSION => Symmetry::Translation,
        s => s,
    };
    let required = match symmetry {
        Symmetry::None => binomial(size as u64, m as u64),
        _ => binomial(size as u64 - 1, m as u64 - 1),
    };
    Budget::ensure("subsets", required, budget.subsets)?;

    let group = match n.get() <= MAX_TABLE_DIMENSION {
        true => Some(SymmetryGroup::new(n)?),
        false => None,
    };
    let noises: Vec<Vec<f64>> = alphas.iter().map(|&a| vec![a; n.get()]).collect();
    let mut best: Vec<ArgMin> = alphas.iter().map(|_| ArgMin::new()).collect();
    let mut scratch = Vec::with_capacity(size);
    let mut perm_scratch = Vec::with_capacity(m);
    let mut with_zero = Vec::with_capacity(m);
    let mut candidates = 0u64;
    let mut evaluated = 0u64;

    let mut evaluate = |set: &[Vertex], scratch: &mut Vec<f64>| {
        evaluated += 1;
        for (noise, arg) in noises.iter().zip(best.iter_mut()) {
            arg.offer(noisy_entropy_raw(size, set, noise, scratch), set);
        }
    };

    match symmetry {
        Symmetry::None => {
            let pool: Vec<Vertex> = (0..size as Vertex).collect();
            for_each_combination(&pool, m, |set| {
                candidates += 1;
                evaluate(set, &mut scratch);
            });
        }
        Symmetry::Translation | Symmetry::Full => {
            let pool: Vec<Vertex> = (1..size as Vertex).collect();
            let full = symmetry == Symmetry::Full;
            for_each_combination(&pool, m - 1, |rest| {
                candidates += 1;
                with_zero.clear();
                with_zero.push(0);
                with_zero.extend_from_slice(rest);
                let keep = !full
                    || group
                        .as_ref()
                        .is_some_and(|g| g.is_canonical(&with_zero, &mut perm_scratch));
                if keep {
                    evaluate(&with_zero, &mut scratch);
                }
            });
        }
    }

    let results = alphas
        .iter()
        .zip(best)
        .map(|(&alpha, arg)| {
            let cut = arg.best + CHECK_TOLERANCE;
            let mut minimizers: Vec<Vec<Vertex>> = arg
                .ties
                .into_iter()
                .filter(|(v, _)| *v <= cut)
                .map(|(_, s)| match &group {
                    Some(g) => g.canonical(&s),
                    None => canonical_under_translation(&s),
                })
                .collect();
            minimizers.sort();
            minimizers.dedup();
            HmnResult {
                n,
                m,
                alpha,
                value: arg.best,
                minimizers: minimizers
                    .into_iter()
                    .map(|s| VertexSet::from_sorted(n, s))
                    .collect(),
                candidates,
                evaluated,
            }
        })
        .collect();
    Ok(results)
}

/// All down-closed subsets of `{0,1}^n` with exactly `m` members.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneSetFamily {
    pub n: Dimension,
    pub m: usize,
    pub sets: Vec<VertexSet>,
    /// Partial down-sets visited during the enumeration.
    pub visited: u64,
}

impl MonotoneSetFamily {
    /// Number of classes up to coordinate permutation.
    pub fn classes_up_to_permutation(&self) -> Result<usize> {
        let group = SymmetryGroup::new(self.n)?;
        let mut canon: Vec<Vec<Vertex>> = self
            .sets
            .iter()
            .map(|s| group.canonical_under_permutations(s.members()))
            .collect();
        canon.sort();
        canon.dedup();
        Ok(canon.len())
    }
}

pub fn enumerate_monotone_sets(n: Dimension, m: usize) -> Result<MonotoneSetFamily> {
    enumerate_monotone_sets_with(n, m, &Budget::default())
}

/// Enumerates down-sets of size `m`.
///
/// Numeric order on indices is a linear extension of the coordinatewise
/// order, so every down-set is built exactly once by adding its members in
/// increasing order, each new member having all of its lower covers present.
pub fn enumerate_monotone_sets_with(n: Dimension, m: usize, budget: &Budget) -> Result<MonotoneSetFamily> {
    if m > n.size() {
        return Err(Error::Precondition(format!(
            "set size m = {m} exceeds 2^n = {}",
            n.size()
        )));
    }
    struct Walk<'a> {
        n: usize,
        size: usize,
        m: usize,
        present: Vec<bool>,
        current: Vec<Vertex>,
        out: Vec<Vec<Vertex>>,
        visited: u64,
        budget: &'a Budget,
    }

    impl Walk<'_> {
        fn addable(&self, x: usize) -> bool {
            (0..self.n)
                .filter(|&i| x >> i & 1 == 1)
                .all(|i| self.present[x & !(1 << i)])
        }

        fn run(&mut self, from: usize) -> Result<()> {
            self.visited += 1;
            Budget::ensure("monotone down-sets", u128::from(self.visited), self.budget.monotone)?;
            if self.current.len() == self.m {
                self.out.push(self.current.clone());
                return Ok(());
            }
            for x in from..self.size {
                if self.addable(x) {
                    self.present[x] = true;
                    self.current.push(x as Vertex);
                    self.run(x + 1)?;
                    self.current.pop();
                    self.present[x] = false;
                }
            }
            Ok(())
        }
    }

    let mut walk = Walk {
        n: n.get(),
        size: n.size(),
        m,
        present: vec![false; n.size()],
        current: Vec::with_capacity(m),
        out: Vec::new(),
        visited: 0,
        budget,
    };
    walk.run(0)?;
    Ok(MonotoneSetFamily {
        n,
        m,
        sets: walk
            .out
            .into_iter()
            .map(|s| VertexSet::from_sorted(n, s))
            .collect(),
        visited: walk.visited,
    })
}

/// `H_m^n(alpha)` as the minimum over down-closed sets only.
pub fn hmn_monotone(n: Dimension, m: usize, alpha: f64) -> Result<HmnResult> {
    check_size(n, m)?;
    check_crossover(alpha)?;
    let family = enumerate_monotone_sets(n, m)?;
    Ok(hmn_over_family(&family, &[alpha]).remove(0))
}

/// Minimizes the noisy entropy over a precomputed family, for each crossover.
///
/// Minimizers stay down-closed: they are deduplicated up to coordinate
/// permutation only (for `n <= 7`).
pub fn hmn_over_family(family: &MonotoneSetFamily, alphas: &[f64]) -> Vec<HmnResult> {
    let n = family.n;
    let size = n.size();
    let group = SymmetryGroup::new(n).ok();
    let mut scratch = Vec::with_capacity(size);
    alphas
        .iter()
        .map(|&alpha| {
            let noise = vec![alpha; n.get()];
            let mut arg = ArgMin::new();
            for set in &family.sets {
                let value = noisy_entropy_raw(size, set.members(), &noise, &mut scratch);
                arg.offer(value, set.members());
            }
            let cut = arg.best + CHECK_TOLERANCE;
            let mut minimizers: Vec<Vec<Vertex>> = arg
                .ties
                .into_iter()
                .filter(|(v, _)| *v <= cut)
                .map(|(_, s)| match &group {
                    Some(g) => g.canonical_under_permutations(&s),
                    None => s,
                })
                .collect();
            minimizers.sort();
            minimizers.dedup();
            HmnResult {
                n,
                m: family.m,
                alpha,
                value: arg.best,
                minimizers: minimizers
                    .into_iter()
                    .map(|s| VertexSet::from_sorted(n, s))
                    .collect(),
                candidates: family.visited,
                evaluated: family.sets.len() as u64,
            }
        })
        .collect()
}

/// Closed forms of `H_m^n(alpha)` for `m` in `1..=4`.
pub fn hmn_closed_form(n: Dimension, m: usize, alpha: f64) -> Result<f64> {
    check_crossover(alpha)?;
    if !(1..=4).contains(&m) {
        return Err(Error::Precondition(format!(
            "closed form known only for m in 1..=4, got {m}"
        )));
    }
    check_size(n, m)?;
    let nf = n.get() as f64;
    let ha = h(alpha);
    Ok(match m {
        1 => nf * ha,
        2 => 1.0 + (nf - 1.0) * ha,
        3 => {
            let third = conv(1.0 / 3.0, alpha);
            let two_thirds = conv(2.0 / 3.0, alpha);
            let a2 = alpha * alpha;
            h(third)
                + two_thirds * h((1.0 - a2) / (2.0 - alpha))
                + third * h((1.0 - alpha + a2) / (1.0 + alpha))
                + (nf - 2.0) * ha
        }
        _ => 2.0 + (nf - 2.0) * ha,
    })
}

/// Lower bound `h(1/3 * alpha) + h(alpha)/3 + 2/3 + (n-2) h(alpha)` on
/// `H_3^n(alpha)`.
pub fn h3_lower_bound(n: Dimension, alpha: f64) -> Result<f64> {
    check_crossover(alpha)?;
    if n.get() < 2 {
        return Err(Error::Precondition("H_3 needs n >= 2".into()));
    }
    let ha = h(alpha);
    Ok(h(conv(1.0 / 3.0, alpha)) + ha / 3.0 + 2.0 / 3.0 + (n.get() as f64 - 2.0) * ha)
}

/// Checks `H_m <= H_{m+1}` for consecutive entries of `values`, where
/// `values[k]` is `H_{k+1}^n`.
pub fn monotone_in_m_checks(n: Dimension, alpha: f64, values: &[f64]) -> CheckReport {
    values
        .windows(2)
        .enumerate()
        .map(|(k, w)| {
            Check::le(
                format!("H_{}^{n}({alpha}) <= H_{}^{n}({alpha})", k + 1, k + 2),
                w[0],
                w[1],
                CHECK_TOLERANCE,
            )
        })
        .collect()
}

/// Non-decrease of `H_m^n(alpha)` in `m` for `1 <= m < m_max`, with the
/// values taken from [`hmn_monotone`].
pub fn check_monotone_in_m(n: Dimension, alpha: f64, m_max: usize) -> Result<CheckReport> {
    check_crossover(alpha)?;
    check_size(n, m_max)?;
    let values = (1..=m_max)
        .map(|m| hmn_monotone(n, m, alpha).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;
    Ok(monotone_in_m_checks(n, alpha, &values))
}

/// `(m-2)/(2m-2) H_1 + m/(2m-2) H_m >= H_2` from given values.
pub fn h2_mixture_check(n: Dimension, alpha: f64, m: usize, h1: f64, h2: f64, hm: f64) -> Check {
    let mf = m as f64;
    let lhs = (mf - 2.0) / (2.0 * mf - 2.0) * h1 + mf / (2.0 * mf - 2.0) * hm;
    Check::ge(
        format!("(m-2)/(2m-2) H_1 + m/(2m-2) H_m >= H_2 (n={n}, m={m}, alpha={alpha})"),
        lhs,
        h2,
        CHECK_TOLERANCE,
    )
}

/// The mixture inequality for `2 < m < 2^n`, with `H_m` from
/// [`hmn_monotone`] and `H_1`, `H_2` from their closed forms.
pub fn check_h2_mixture_bound(n: Dimension, alpha: f64, m: usize) -> Result<Check> {
    check_crossover(alpha)?;
    if m <= 2 || m >= n.size() {
        return Err(Error::Precondition(format!(
            "mixture bound needs 2 < m < 2^n, got m = {m}, n = {n}"
        )));
    }
    let hm = hmn_monotone(n, m, alpha)?.value;
    Ok(h2_mixture_check(
        n,
        alpha,
        m,
        hmn_closed_form(n, 1, alpha)?,
        hmn_closed_form(n, 2, alpha)?,
        hm,
    ))
}

/// `g(alpha) = 3 h(1/3 * alpha) - 2 - h(alpha)`.
pub fn g_alpha(alpha: f64) -> Result<f64> {
    check_crossover(alpha)?;
    Ok(3.0 * h(conv(1.0 / 3.0, alpha)) - 2.0 - h(alpha))
}

/// `g'(alpha) = log2((2 alpha - alpha^2) / (1 - alpha^2))`; `-inf` at 0.
pub fn g_alpha_derivative(alpha: f64) -> Result<f64> {
    check_crossover(alpha)?;
    Ok(((2.0 * alpha - alpha * alpha) / (1.0 - alpha * alpha)).log2())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn alpha_grids() {
        let g = default_alpha_grid();
        assert_eq!(g.len(), 13);
        assert_eq!(g[0], 0.0);
        assert_eq!(*g.last().unwrap(), 0.5);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(coarse_alpha_grid().len(), 11);
    }

    #[test]
    fn noisy_entropy_examples() {
        for n in 1..=5 {
            let d = dim(n);
            let single = VertexSet::new(d, [3 % d.size() as u32]).unwrap();
            assert!(close(noisy_subset_entropy(&single, 0.2).unwrap(), n as f64 * h(0.2)));
            if n >= 2 {
                let pair = VertexSet::new(d, [0, 1]).unwrap();
                assert!(close(noisy_subset_entropy(&pair, 0.3).unwrap(), 1.0 + (n as f64 - 1.0) * h(0.3)));
            }
            let any = VertexSet::new(d, [0, d.size() as u32 - 1]).unwrap();
            assert!(close(noisy_subset_entropy(&any, 0.5).unwrap(), n as f64));
        }
        assert_eq!(
            noisy_subset_entropy(&VertexSet::new(dim(2), []).unwrap(), 0.1),
            Err(Error::EmptySet)
        );
        assert!(noisy_subset_entropy(&VertexSet::full(dim(2)), 0.7).is_err());
    }

    #[test]
    fn combinations_are_complete() {
        let pool: Vec<Vertex> = (0..6).collect();
        let mut seen = Vec::new();
        for_each_combination(&pool, 3, |c| seen.push(c.to_vec()));
        assert_eq!(seen.len(), 20);
        assert!(seen.windows(2).all(|w| w[0] < w[1]));
        let mut empty = 0;
        for_each_combination(&pool, 0, |_| empty += 1);
        assert_eq!(empty, 1);
        let mut none = 0;
        for_each_combination(&pool, 7, |_| none += 1);
        assert_eq!(none, 0);
    }

    #[test]
    fn bruteforce_examples() {
        for n in 1..=4 {
            let d = dim(n);
            let r = hmn_bruteforce(d, 1, 0.2).unwrap();
            assert!(close(r.value, n as f64 * h(0.2)));
            let r = hmn_bruteforce(d, d.size(), 0.13).unwrap();
            assert!(close(r.value, n as f64));
        }
        let r = hmn_bruteforce(dim(3), 3, 0.1).unwrap();
        assert!(close(r.value, hmn_closed_form(dim(3), 3, 0.1).unwrap()));
        assert_eq!(r.minimizers.len(), 1);
        assert!(r.minimizers.iter().all(|s| s.len() == 3));
    }

    #[test]
    fn pruning_preserves_the_minimum() {
        let budget = Budget::default();
        let alphas = default_alpha_grid();
        for n in 1..=3 {
            let d = dim(n);
            for m in 1..=d.size() {
                let full = hmn_bruteforce_with(d, m, &alphas, Symmetry::Full, &budget).unwrap();
                let trans = hmn_bruteforce_with(d, m, &alphas, Symmetry::Translation, &budget).unwrap();
                let none = hmn_bruteforce_with(d, m, &alphas, Symmetry::None, &budget).unwrap();
                for ((a, b), c) in full.iter().zip(&trans).zip(&none) {
                    assert!(close(a.value, c.value) && close(b.value, c.value));
                    assert_eq!(a.minimizers, c.minimizers);
                    assert_eq!(b.minimizers, c.minimizers);
                }
                assert!(full[0].evaluated <= trans[0].evaluated);
            }
        }
    }

    #[test]
    fn bruteforce_budget_is_an_error() {
        let tight = Budget::uniform(10);
        let err = hmn_bruteforce_with(dim(4), 8, &[0.1], Symmetry::None, &tight).unwrap_err();
        assert_eq!(
            err,
            Error::Budget {
                what: "subsets",
                required: 12870,
                limit: 10
            }
        );
        assert!(matches!(hmn_bruteforce(dim(5), 16, 0.1), Err(Error::Budget { .. })));
        assert!(hmn_bruteforce(dim(3), 0, 0.1).is_err());
        assert!(hmn_bruteforce(dim(3), 9, 0.1).is_err());
    }

    #[test]
    fn monotone_family_examples() {
        for n in 1..=5 {
            let d = dim(n);
            let one = enumerate_monotone_sets(d, 1).unwrap();
            assert_eq!(one.sets, vec![VertexSet::new(d, [0]).unwrap()]);
            let two = enumerate_monotone_sets(d, 2).unwrap();
            assert_eq!(two.sets.len(), n);
            assert!(two.sets.iter().all(|s| s.contains(0) && s.members()[1].count_ones() == 1));
            assert_eq!(enumerate_monotone_sets(d, 0).unwrap().sets.len(), 1);
        }
        let d = dim(3);
        let four = enumerate_monotone_sets(d, 4).unwrap();
        let cube = VertexSet::from_words(d, &["000", "100", "010", "110"]).unwrap();
        let ball = VertexSet::from_words(d, &["000", "100", "010", "001"]).unwrap();
        // three 2-cubes (one per pair of coordinates) and the radius-1 ball
        assert_eq!(four.sets.len(), 4);
        assert!(four.sets.contains(&cube) && four.sets.contains(&ball));
        assert_eq!(four.classes_up_to_permutation().unwrap(), 2);
        assert!(four.sets.iter().all(|s| s.is_monotone() && s.len() == 4));
    }

    #[test]
    fn monotone_family_totals_match_dedekind_numbers() {
        // Down-sets of the n-cube: 3, 6, 20, 168, 7581 for n = 1..=5.
        for (n, total) in [(1, 3), (2, 6), (3, 20), (4, 168), (5, 7581)] {
            let d = dim(n);
            let count: usize = (0..=d.size())
                .map(|m| enumerate_monotone_sets(d, m).unwrap().sets.len())
                .sum();
            assert_eq!(count, total, "n = {n}");
        }
    }

    #[test]
    fn monotone_budget() {
        let tight = Budget::uniform(5);
        assert!(matches!(
            enumerate_monotone_sets_with(dim(4), 6, &tight),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn hmn_monotone_examples() {
        let r = hmn_monotone(dim(4), 2, 0.3).unwrap();
        assert!(close(r.value, 1.0 + 3.0 * h(0.3)));
        let r = hmn_monotone(dim(4), 4, 0.3).unwrap();
        assert!(close(r.value, 2.0 + 2.0 * h(0.3)));
        assert_eq!(r.minimizers.len(), 1);
        let r = hmn_monotone(dim(3), 8, 0.21).unwrap();
        assert!(close(r.value, 3.0));
    }

    #[test]
    fn both_four_point_candidates_tie_when_noiseless() {
        let r = hmn_monotone(dim(3), 4, 0.0).unwrap();
        assert!(close(r.value, 2.0));
        assert_eq!(r.minimizers.len(), 2);
    }

    #[test]
    fn closed_form_examples() {
        for n in 2..=6 {
            let d = dim(n);
            assert!(close(hmn_closed_form(d, 1, 0.5).unwrap(), n as f64));
            assert!(close(hmn_closed_form(d, 2, 0.0).unwrap(), 1.0));
            assert!(close(hmn_closed_form(d, 3, 0.0).unwrap(), 3f64.log2()));
            assert!(close(hmn_closed_form(d, 3, 0.5).unwrap(), n as f64));
        }
        assert!(hmn_closed_form(dim(3), 5, 0.1).is_err());
        assert!(hmn_closed_form(dim(1), 3, 0.1).is_err());
    }

    #[test]
    fn h3_bound_examples() {
        let d = dim(3);
        assert!(close(h3_lower_bound(d, 0.0).unwrap(), h(1.0 / 3.0) + 2.0 / 3.0));
        assert!(close(h3_lower_bound(d, 0.5).unwrap(), 3.0));
        let brute = hmn_bruteforce(d, 3, 0.1).unwrap().value;
        assert!(h3_lower_bound(d, 0.1).unwrap() <= brute + 1e-12);
        for alpha in default_alpha_grid() {
            assert!(h3_lower_bound(d, alpha).unwrap() <= hmn_closed_form(d, 3, alpha).unwrap() + 1e-12);
        }
    }

    #[test]
    fn monotone_in_m_examples() {
        assert!(check_monotone_in_m(dim(3), 0.25, 8).unwrap().passed());
        assert!(check_monotone_in_m(dim(4), 0.4, 6).unwrap().passed());
        let r = check_monotone_in_m(dim(2), 0.0, 4).unwrap();
        assert!(r.passed());
        // noiseless: H_m = log2 m
        for (k, c) in r.checks.iter().enumerate() {
            assert!(close(c.lhs, ((k + 1) as f64).log2()));
        }
        let bad = monotone_in_m_checks(dim(2), 0.5, &[2.0, 2.001, 2.0]);
        assert!(!bad.passed());
        assert!(bad.first_failure().unwrap().name.starts_with("H_2^2"));
    }

    #[test]
    fn mixture_bound_examples() {
        let c = check_h2_mixture_bound(dim(3), 0.2, 3).unwrap();
        assert!(c.passed && c.slack >= 0.0);
        let c = check_h2_mixture_bound(dim(4), 0.05, 5).unwrap();
        assert!(c.passed);
        for (n, m) in [(3, 5), (4, 9)] {
            let c = check_h2_mixture_bound(dim(n), 0.5, m).unwrap();
            assert!(c.slack.abs() < 1e-9);
        }
        assert!(check_h2_mixture_bound(dim(3), 0.2, 2).is_err());
        assert!(check_h2_mixture_bound(dim(3), 0.2, 8).is_err());
    }

    #[test]
    fn g_alpha_examples() {
        assert!(g_alpha(0.5).unwrap().abs() < 1e-12);
        let g0 = g_alpha(0.0).unwrap();
        assert!(close(g0, 3.0 * h(1.0 / 3.0) - 2.0));
        assert!(g0 > 0.0);
        let step = 1e-6;
        let fd = (g_alpha(0.25 + step).unwrap() - g_alpha(0.25 - step).unwrap()) / (2.0 * step);
        let analytic = g_alpha_derivative(0.25).unwrap();
        assert!((fd - analytic).abs() < 1e-6);
        assert!(close(analytic, ((0.5 - 0.0625) / (1.0 - 0.0625f64)).log2()));
        assert!(g_alpha(0.6).is_err());
    }
}
