//! Down-shifting of vertex sets toward a monotone set, and per-step checks
//! that each shift makes the shifted coordinate more predictable from the
//! noisy remaining coordinates and never raises the output entropy.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypercube::{apply_noise, check_crossover, Dimension, Vertex, VertexSet};
use crate::noisy_subset::noisy_entropy_raw;
use crate::report::{Check, CheckReport, CHECK_TOLERANCE};

/// Tolerance of the exact identities checked per output word.
pub const BIAS_TOLERANCE: f64 = 1e-12;

/// One application of the shift on a single coordinate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShiftStep {
    /// Coordinate index, 1-based (`x_1` is bit 0).
    pub coordinate: usize,
    /// Members with `x_i = 1` whose `i`-cleared copy is absent.
    pub moved: VertexSet,
    pub before: VertexSet,
    pub after: VertexSet,
}

impl ShiftStep {
    pub fn is_trivial(&self) -> bool {
        self.moved.is_empty()
    }
}

fn coordinate_bit(dimension: Dimension, coordinate: usize) -> Result<Vertex> {
    if coordinate == 0 || coordinate > dimension.get() {
        return Err(Error::Coordinate {
            coordinate,
            dimension: dimension.get(),
        });
    }
    Ok(1 << (coordinate - 1))
}

/// Replaces `S` by `(S \ S_i) ∪ (S_i - i)`.
pub fn shift_coordinate(set: &VertexSet, coordinate: usize) -> Result<ShiftStep> {
    let dimension = set.dimension();
    let bit = coordinate_bit(dimension, coordinate)?;
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let moved: Vec<Vertex> = set
        .members()
        .iter()
        .copied()
        .filter(|&x| x & bit != 0 && !set.contains(x & !bit))
        .collect();
    let after = VertexSet::new(
        dimension,
        set.members()
            .iter()
            .map(|&x| if moved.binary_search(&x).is_ok() { x & !bit } else { x }),
    )?;
    Ok(ShiftStep {
        coordinate,
        moved: VertexSet::from_sorted(dimension, moved),
        before: set.clone(),
        after,
    })
}

/// Repeatedly shifts on the smallest coordinate with a nonempty moved set
/// until none remains. Only nontrivial steps are returned.
pub fn shift_to_monotone(set: &VertexSet) -> Result<(VertexSet, Vec<ShiftStep>)> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = set.dimension().get();
    let mut current = set.clone();
    let mut steps = Vec::new();
    'outer: loop {
        for coordinate in 1..=n {
            let step = shift_coordinate(&current, coordinate)?;
            if !step.is_trivial() {
                current = step.after.clone();
                steps.push(step);
                continue 'outer;
            }
        }
        break;
    }
    Ok((current, steps))
}

/// Conditional bias of the shifted coordinate given one tail output word.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasDecomposition {
    /// Tail word over the remaining coordinates, in their original order.
    pub omega: Vertex,
    pub tail_prob_before: f64,
    pub tail_prob_after: f64,
    /// Posterior mass of tails with both completions in `S`.
    pub a: f64,
    /// ... with only the `x_i = 1` completion.
    pub b: f64,
    /// ... with only the `x_i = 0` completion.
    pub c: f64,
    pub bias_before: f64,
    pub bias_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasCheck {
    pub coordinate: usize,
    pub decompositions: Vec<BiasDecomposition>,
    /// Tail words with zero probability, for which conditionals are undefined.
    pub skipped: usize,
    /// Worst case over `omega` of each identity and inequality.
    pub report: CheckReport,
}

#[inline]
fn drop_bit(x: Vertex, j: usize) -> usize {
    let low = x & ((1 << j) - 1);
    ((x >> (j + 1)) << j | low) as usize
}

pub fn bias_check(set: &VertexSet, coordinate: usize, alpha: f64) -> Result<BiasCheck> {
    check_crossover(alpha)?;
    bias_check_with_noise(set, coordinate, &vec![alpha; set.dimension().get()])
}

/// Compares the posterior of `x_i = 1` given the noisy tail before and after
/// one shift on coordinate `i`, under per-coordinate noise.
pub fn bias_check_with_noise(set: &VertexSet, coordinate: usize, noise: &[f64]) -> Result<BiasCheck> {
    let dimension = set.dimension();
    let n = dimension.get();
    if noise.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: noise.len(),
        });
    }
    for &a in noise {
        check_crossover(a)?;
    }
    let step = shift_coordinate(set, coordinate)?;
    let j = coordinate - 1;
    let bit: Vertex = 1 << j;
    let tail_noise: Vec<f64> = noise
        .iter()
        .enumerate()
        .filter(|&(k, _)| k != j)
        .map(|(_, &a)| a)
        .collect();
    let tail_size = 1usize << (n - 1);
    let weight = 1.0 / set.len() as f64;

    // direct route: joint law of (x_i = 1, noisy tail)
    let joint = |s: &VertexSet| {
        let mut ones = vec![0.0; tail_size];
        let mut all = vec![0.0; tail_size];
        for &x in s.members() {
            let t = drop_bit(x, j);
            all[t] += weight;
            if x & bit != 0 {
                ones[t] += weight;
            }
        }
        apply_noise(&mut ones, &tail_noise);
        apply_noise(&mut all, &tail_noise);
        (ones, all)
    };
    let (ones_before, tail_before) = joint(&step.before);
    let (ones_after, tail_after) = joint(&step.after);

    // cell route: split the tails of S by which completions are present
    let mut cells = [vec![0.0; tail_size], vec![0.0; tail_size], vec![0.0; tail_size]];
    for &x in set.members() {
        let t = drop_bit(x, j);
        let other = x ^ bit;
        let cell = match (x & bit != 0, set.contains(other)) {
            (_, true) => 0,
            (true, false) => 1,
            (false, false) => 2,
        };
        cells[cell][t] += weight;
    }
    for cell in &mut cells {
        apply_noise(cell, &tail_noise);
    }

    let mut decompositions = Vec::with_capacity(tail_size);
    let mut skipped = 0;
    let mut worst = [f64::NEG_INFINITY; 5];
    let mut worst_pair = [(0.0, 0.0); 5];
    let mut track = |k: usize, lhs: f64, rhs: f64, violation: f64| {
        if violation > worst[k] {
            worst[k] = violation;
            worst_pair[k] = (lhs, rhs);
        }
    };
    for omega in 0..tail_size {
        let p = tail_before[omega];
        if p <= 0.0 {
            skipped += 1;
            continue;
        }
        let q = tail_after[omega];
        let (a, b, c) = (cells[0][omega] / p, cells[1][omega] / p, cells[2][omega] / p);
        let bias_before = (ones_before[omega] / p - 0.5).abs();
        let bias_after = (ones_after[omega] / q - 0.5).abs();
        let identity = bias_after * bias_after - bias_before * bias_before;
        track(0, p, q, (p - q).abs());
        track(1, a + b + c, 1.0, (a + b + c - 1.0).abs());
        track(2, ones_before[omega] / p, a / 2.0 + b, (ones_before[omega] / p - a / 2.0 - b).abs());
        track(3, bias_before, bias_after, bias_before - bias_after);
        track(4, identity, b * c, (identity - b * c).abs());
        decompositions.push(BiasDecomposition {
            omega: omega as Vertex,
            tail_prob_before: p,
            tail_prob_after: q,
            a,
            b,
            c,
            bias_before,
            bias_after,
        });
    }

    let mut report = CheckReport::new();
    if !decompositions.is_empty() {
        let label = |what: &str| format!("{what} (coordinate {coordinate}, worst omega)");
        report.push(Check::eq(label("tail laws agree"), worst_pair[0].0, worst_pair[0].1, BIAS_TOLERANCE));
        report.push(Check::eq(label("a + b + c = 1"), worst_pair[1].0, 1.0, BIAS_TOLERANCE));
        report.push(Check::eq(
            label("posterior = a/2 + b"),
            worst_pair[2].0,
            worst_pair[2].1,
            BIAS_TOLERANCE,
        ));
        report.push(Check::le(
            label("bias before <= bias after"),
            worst_pair[3].0,
            worst_pair[3].1,
            BIAS_TOLERANCE,
        ));
        report.push(Check::eq(
            label("bias_after^2 - bias_before^2 = b c"),
            worst_pair[4].0,
            worst_pair[4].1,
            BIAS_TOLERANCE,
        ));
    }
    Ok(BiasCheck {
        coordinate,
        decompositions,
        skipped,
        report,
    })
}

/// Output entropies along a shifting run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyTrace {
    pub initial: VertexSet,
    pub result: VertexSet,
    pub steps: Vec<ShiftStep>,
    /// `entropies[0]` is the initial set; `entropies[k]` follows step `k`.
    pub entropies: Vec<f64>,
    pub report: CheckReport,
}

pub fn check_entropy_nonincrease(set: &VertexSet, alpha: f64) -> Result<EntropyTrace> {
    check_crossover(alpha)?;
    check_entropy_nonincrease_with_noise(set, &vec![alpha; set.dimension().get()])
}

/// Runs [`shift_to_monotone`] and checks entropy never increases, the size is
/// kept, the result is monotone and the run length is bounded by the weight.
pub fn check_entropy_nonincrease_with_noise(set: &VertexSet, noise: &[f64]) -> Result<EntropyTrace> {
    let dimension = set.dimension();
    if noise.len() != dimension.get() {
        return Err(Error::DimensionMismatch {
            expected: dimension.get(),
            actual: noise.len(),
        });
    }
    for &a in noise {
        check_crossover(a)?;
    }
    let (result, steps) = shift_to_monotone(set)?;
    let size = dimension.size();
    let mut scratch = Vec::with_capacity(size);
    let mut entropies = vec![noisy_entropy_raw(size, set.members(), noise, &mut scratch)];
    let mut report = CheckReport::new();
    for (k, step) in steps.iter().enumerate() {
        let after = noisy_entropy_raw(size, step.after.members(), noise, &mut scratch);
        report.push(Check::le(
            format!("step {} (coordinate {}): H(after) <= H(before)", k + 1, step.coordinate),
            after,
            entropies[k],
            CHECK_TOLERANCE,
        ));
        report.push(Check::holds(
            format!("step {}: |after| = |before|", k + 1),
            step.after.len() == step.before.len(),
        ));
        entropies.push(after);
    }
    let last = *entropies.last().expect("initial entropy present");
    report.push(Check::le("H(shifted) <= H(initial)", last, entropies[0], CHECK_TOLERANCE));
    report.push(Check::holds("shifted set is monotone", result.is_monotone()));
    report.push(Check::holds("shifted set keeps its size", result.len() == set.len()));
    report.push(Check::le(
        "steps <= total weight",
        steps.len() as f64,
        set.weight() as f64,
        0.0,
    ));
    Ok(EntropyTrace {
        initial: set.clone(),
        result,
        steps,
        entropies,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercube::h;
    use crate::noisy_subset::noisy_subset_entropy;
    use proptest::prelude::*;

    fn dim(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn words(n: usize, w: &[&str]) -> VertexSet {
        VertexSet::from_words(dim(n), w).unwrap()
    }

    #[test]
    fn shift_examples() {
        let step = shift_coordinate(&words(3, &["100", "110"]), 1).unwrap();
        assert_eq!(step.moved, words(3, &["100", "110"]));
        assert_eq!(step.after, words(3, &["000", "010"]));

        let s = words(3, &["100", "000"]);
        let step = shift_coordinate(&s, 1).unwrap();
        assert!(step.is_trivial());
        assert_eq!(step.after, s);

        let mono = words(3, &["000", "100", "010"]);
        for i in 1..=3 {
            assert!(shift_coordinate(&mono, i).unwrap().is_trivial());
        }
        assert!(matches!(shift_coordinate(&mono, 0), Err(Error::Coordinate { .. })));
        assert!(matches!(shift_coordinate(&mono, 4), Err(Error::Coordinate { .. })));
    }

    #[test]
    fn shift_to_monotone_examples() {
        let mono = words(3, &["000", "100", "010"]);
        let (out, steps) = shift_to_monotone(&mono).unwrap();
        assert_eq!(out, mono);
        assert!(steps.is_empty());

        let (out, steps) = shift_to_monotone(&words(3, &["111"])).unwrap();
        assert_eq!(out, words(3, &["000"]));
        assert_eq!(steps.iter().map(|s| s.coordinate).collect::<Vec<_>>(), vec![1, 2, 3]);
    }

    #[test]
    fn bias_check_examples() {
        // monotone set: nothing moves, biases unchanged
        let mono = words(3, &["000", "100", "010"]);
        let r = bias_check(&mono, 1, 0.1).unwrap();
        assert!(r.report.passed());
        assert!(r.decompositions.iter().all(|d| (d.bias_after - d.bias_before).abs() < 1e-15));

        let r = bias_check(&words(3, &["100", "110"]), 1, 0.1).unwrap();
        assert_eq!(r.decompositions.len(), 4);
        assert_eq!(r.skipped, 0);
        assert!(r.report.passed());
        // every tail has only the x_1 = 1 completion: cell B only
        for d in &r.decompositions {
            assert!((d.b - 1.0).abs() < 1e-12 && d.a.abs() < 1e-12 && d.c.abs() < 1e-12);
        }

        let r = bias_check(&words(3, &["100", "011", "111", "001"]), 2, 0.5).unwrap();
        assert!(r.report.passed());
        let r = bias_check(&words(3, &["100", "011"]), 2, 0.0).unwrap();
        assert!(r.skipped > 0);
        assert!(r.report.passed());
    }

    #[test]
    fn singleton_entropy_chain_is_flat() {
        let t = check_entropy_nonincrease(&words(3, &["111"]), 0.2).unwrap();
        assert!(t.report.passed());
        assert_eq!(t.entropies.len(), 4);
        for e in &t.entropies {
            assert!((e - 3.0 * h(0.2)).abs() < 1e-12);
        }
    }

    #[test]
    fn monotone_chain_is_trivial() {
        let t = check_entropy_nonincrease(&words(2, &["00", "10"]), 0.3).unwrap();
        assert!(t.steps.is_empty());
        assert_eq!(t.entropies.len(), 1);
        assert!(t.report.passed());
    }

    #[test]
    fn noise_vector_variant() {
        let s = words(3, &["110", "011", "101"]);
        let noise = [0.02, 0.3, 0.17];
        let t = check_entropy_nonincrease_with_noise(&s, &noise).unwrap();
        assert!(t.report.passed());
        for i in 1..=3 {
            assert!(bias_check_with_noise(&s, i, &noise).unwrap().report.passed());
        }
        assert!(bias_check_with_noise(&s, 1, &[0.1]).is_err());
    }

    fn set_strategy() -> impl Strategy<Value = VertexSet> {
        (1usize..=6).prop_flat_map(|n| {
            prop::collection::btree_set(0u32..(1 << n), 1..=(1usize << n).min(12))
                .prop_map(move |m| VertexSet::new(dim(n), m).unwrap())
        })
    }

    proptest! {
        #[test]
        fn shifting_invariants(s in set_strategy(), alpha in 0.0f64..=0.5, coord in 1usize..=6) {
            let (out, steps) = shift_to_monotone(&s).unwrap();
            prop_assert!(out.is_monotone());
            prop_assert_eq!(out.len(), s.len());
            prop_assert!(steps.len() as u64 <= s.weight());
            prop_assert_eq!(s.is_monotone(), out == s);
            for st in &steps {
                prop_assert_eq!(st.after.len(), st.before.len());
            }
            let t = check_entropy_nonincrease(&s, alpha).unwrap();
            prop_assert!(t.report.passed(), "{:?}", t.report.first_failure());
            let coord = (coord - 1) % s.dimension().get() + 1;
            let b = bias_check(&s, coord, alpha).unwrap();
            prop_assert!(b.report.passed(), "{:?}", b.report.first_failure());
            let direct = noisy_subset_entropy(&out, alpha).unwrap();
            prop_assert!((direct - t.entropies.last().unwrap()).abs() < 1e-12);
        }
    }
}
