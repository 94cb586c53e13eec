//! Browser demo for `hyperquant`.
//!
//! The `*_json` functions are plain Rust returning JSON strings so they can be
//! exercised natively; on `wasm32` they are exported through `wasm-bindgen`
//! as `hmn_curves`, `shift_trace` and `quantizer_curve`.

use hyperquant::noisy_subset::{enumerate_monotone_sets, hmn_closed_form, hmn_over_family, noisy_subset_entropy};
use hyperquant::quantizer::{default_cells, mutual_information, theorem_bound};
use hyperquant::shifting::shift_to_monotone;
use hyperquant::{projection_quantizer, Dimension, Quantizer, VertexSet};
use serde::Serialize;

pub const MAX_CURVE_DIMENSION: usize = 5;
pub const MAX_QUANTIZER_DIMENSION: usize = 10;
pub const MAX_POINTS: usize = 401;

fn dim(n: usize, max: usize) -> Result<Dimension, String> {
    if n == 0 || n > max {
        return Err(format!("n must lie in 1..={max}"));
    }
    Dimension::new(n).map_err(|e| e.to_string())
}

/// `points` evenly spaced crossovers covering `[0, 1/2]`.
pub fn alpha_points(points: usize) -> Result<Vec<f64>, String> {
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must lie in 2..={MAX_POINTS}"));
    }
    let last = (points - 1) as f64;
    Ok((0..points).map(|k| 0.5 * k as f64 / last).collect())
}

#[derive(Serialize)]
struct Curve {
    m: usize,
    values: Vec<f64>,
    closed_form: Option<Vec<f64>>,
    minimizers_at_half_noise: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct Curves {
    n: usize,
    alpha: Vec<f64>,
    curves: Vec<Curve>,
}

/// `H_m^n(alpha)` for `m = 1..=m_max` over an even alpha grid.
pub fn hmn_curves_json(n: usize, m_max: usize, points: usize) -> Result<String, String> {
    let d = dim(n, MAX_CURVE_DIMENSION)?;
    if m_max == 0 || m_max > d.size() {
        return Err(format!("m_max must lie in 1..={}", d.size()));
    }
    let alpha = alpha_points(points)?;
    let mut curves = Vec::with_capacity(m_max);
    for m in 1..=m_max {
        let family = enumerate_monotone_sets(d, m).map_err(|e| e.to_string())?;
        let results = hmn_over_family(&family, &alpha);
        let closed_form = if m <= 4 {
            Some(
                alpha
                    .iter()
                    .map(|&a| hmn_closed_form(d, m, a))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| e.to_string())?,
            )
        } else {
            None
        };
        let mid = results.len() / 2;
        curves.push(Curve {
            m,
            values: results.iter().map(|r| r.value).collect(),
            closed_form,
            minimizers_at_half_noise: results[mid].minimizers.iter().map(VertexSet::words).collect(),
        });
    }
    serde_json::to_string(&Curves { n, alpha, curves }).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct StepView {
    coordinate: usize,
    moved: Vec<String>,
    after: Vec<String>,
    entropy: f64,
}

#[derive(Serialize)]
struct ShiftView {
    n: usize,
    alpha: f64,
    initial: Vec<String>,
    initial_entropy: f64,
    steps: Vec<StepView>,
    result: Vec<String>,
    monotone: bool,
}

/// Shifts the set given as words `x1..xn` separated by commas or spaces.
pub fn shift_trace_json(n: usize, words: &str, alpha: f64) -> Result<String, String> {
    let d = dim(n, hyperquant::hypercube::MAX_DIMENSION)?;
    let words: Vec<&str> = words
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|w| !w.is_empty())
        .collect();
    let set = VertexSet::from_words(d, &words).map_err(|e| e.to_string())?;
    let initial_entropy = noisy_subset_entropy(&set, alpha).map_err(|e| e.to_string())?;
    let (result, steps) = shift_to_monotone(&set).map_err(|e| e.to_string())?;
    let steps = steps
        .iter()
        .map(|s| {
            Ok(StepView {
                coordinate: s.coordinate,
                moved: s.moved.words(),
                after: s.after.words(),
                entropy: noisy_subset_entropy(&s.after, alpha).map_err(|e| e.to_string())?,
            })
        })
        .collect::<Result<Vec<_>, String>>()?;
    let view = ShiftView {
        n,
        alpha,
        initial: set.words(),
        initial_entropy,
        steps,
        monotone: result.is_monotone(),
        result: result.words(),
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct QuantizerView {
    n: usize,
    cells: usize,
    labels: Vec<u32>,
    cell_sizes: Vec<usize>,
    alpha: Vec<f64>,
    mi: Vec<f64>,
    bound: Vec<f64>,
    projection: Vec<f64>,
}

/// Mutual information of a quantizer with `2^(n-1)` cells against the
/// bound. `labels` lists the cell of each vertex `0..2^n` in index order; an
/// empty string selects the projection.
pub fn quantizer_curve_json(n: usize, labels: &str, points: usize) -> Result<String, String> {
    let d = dim(n, MAX_QUANTIZER_DIMENSION)?;
    let alpha = alpha_points(points)?;
    let cells = default_cells(d);
    let projection = projection_quantizer(d);
    let f = if labels.trim().is_empty() {
        projection.clone()
    } else {
        let labels = labels
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<u32>().map_err(|_| format!("cannot parse label `{s}`")))
            .collect::<Result<Vec<_>, _>>()?;
        if labels.len() != d.size() {
            return Err(format!("expected {} labels, got {}", d.size(), labels.len()));
        }
        Quantizer::new(d, labels, cells).map_err(|e| e.to_string())?
    };
    let eval = |q: &Quantizer| -> Result<Vec<f64>, String> {
        alpha
            .iter()
            .map(|&a| mutual_information(q, a).map_err(|e| e.to_string()))
            .collect()
    };
    let view = QuantizerView {
        n,
        cells,
        labels: f.labels().to_vec(),
        cell_sizes: f.cell_sizes(),
        mi: eval(&f)?,
        bound: alpha
            .iter()
            .map(|&a| theorem_bound(d, a).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?,
        projection: eval(&projection)?,
        alpha,
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

#[cfg(target_arch = "wasm32")]
mod bindings {
    use wasm_bindgen::prelude::*;

    #[wasm_bindgen]
    pub fn hmn_curves(n: usize, m_max: usize, points: usize) -> Result<String, JsValue> {
        super::hmn_curves_json(n, m_max, points).map_err(|e| JsValue::from_str(&e))
    }

    #[wasm_bindgen]
    pub fn shift_trace(n: usize, words: &str, alpha: f64) -> Result<String, JsValue> {
        super::shift_trace_json(n, words, alpha).map_err(|e| JsValue::from_str(&e))
    }

    #[wasm_bindgen]
    pub fn quantizer_curve(n: usize, labels: &str, points: usize) -> Result<String, JsValue> {
        super::quantizer_curve_json(n, labels, points).map_err(|e| JsValue::from_str(&e))
    }
}
