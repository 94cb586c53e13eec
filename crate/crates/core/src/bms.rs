//! Binary-input memoryless output-symmetric channels with a finitely
//! supported reliability state: the output reveals `(x xor z, t)` where
//! `t = t_k` with probability `w_k` and `z ~ Bernoulli(t)`.

use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::hypercube::{check_probability, h, plogp, BscChannel, Dimension};
use crate::noisy_subset::noisy_entropy_raw;
use crate::quantizer::{conditional_entropy_raw, default_cells, mutual_information, Quantizer};
use crate::report::{Check, CheckReport, CHECK_TOLERANCE};

/// Tolerance on the total component weight.
pub const WEIGHT_TOLERANCE: f64 = 1e-12;

/// One BSC sub-channel, used with probability `w`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BmsComponent {
    pub w: f64,
    pub t: f64,
}

/// A finite mixture of BSCs, as read from `{"components": [{"w": .., "t": ..}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelRepr")]
pub struct BmsChannel {
    components: Vec<BmsComponent>,
}

#[derive(Deserialize)]
struct ChannelRepr {
    components: Vec<BmsComponent>,
}

impl TryFrom<ChannelRepr> for BmsChannel {
    type Error = Error;

    fn try_from(repr: ChannelRepr) -> Result<Self> {
        Self::new(repr.components)
    }
}

impl BmsChannel {
    /// Validates the mixture. Crossovers above 1/2 are replaced by `1 - t`
    /// (the receiver knows `t` and can flip).
    pub fn new(components: Vec<BmsComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Precondition("a BMS channel needs at least one component".into()));
        }
        let mut canonical = Vec::with_capacity(components.len());
        for c in components {
            check_probability("w", c.w)?;
            check_probability("t", c.t)?;
            let t = if c.t > 0.5 { 1.0 - c.t } else { c.t };
            canonical.push(BmsComponent { w: c.w, t });
        }
        let total: f64 = canonical.iter().map(|c| c.w).sum();
        if (total - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::Precondition(format!("component weights sum to {total}, not 1")));
        }
        Ok(Self { components: canonical })
    }

    pub fn bsc(alpha: f64) -> Result<Self> {
        let alpha = BscChannel::new(alpha)?.alpha();
        Self::new(vec![BmsComponent { w: 1.0, t: alpha }])
    }

    /// Binary erasure channel: an erasure is a state with `t = 1/2`.
    pub fn bec(erasure: f64) -> Result<Self> {
        check_probability("erasure", erasure)?;
        Self::new(vec![
            BmsComponent { w: 1.0 - erasure, t: 0.0 },
            BmsComponent { w: erasure, t: 0.5 },
        ])
    }

    pub fn components(&self) -> &[BmsComponent] {
        &self.components
    }
}

/// `C = 1 - sum_k w_k h(t_k)`.
pub fn capacity(channel: &BmsChannel) -> f64 {
    1.0 - channel.components.iter().map(|c| c.w * h(c.t)).sum::<f64>()
}

/// `I(X; Y)` for one uniform input bit, from the joint law of
/// `(x, x xor z, t)`.
pub fn capacity_first_principles(channel: &BmsChannel) -> f64 {
    let mut hy = 0.0;
    let mut hy_given_x = 0.0;
    for c in &channel.components {
        for y in 0..2 {
            // P(y, t) = sum_x 1/2 P(y | x, t) w
            let py: f64 = (0..2)
                .map(|x| 0.5 * c.w * if x == y { 1.0 - c.t } else { c.t })
                .sum();
            hy += plogp(py);
            for x in 0..2 {
                let p = c.w * if x == y { 1.0 - c.t } else { c.t };
                hy_given_x += 0.5 * plogp(p);
            }
        }
    }
    hy - hy_given_x
}

/// The BSC with the same capacity, by bisection on `alpha -> 1 - h(alpha)`.
pub fn matched_bsc(channel: &BmsChannel) -> BscChannel {
    let target = capacity(channel).clamp(0.0, 1.0);
    if target >= 1.0 {
        return BscChannel::new(0.0).expect("valid crossover");
    }
    if target <= 0.0 {
        return BscChannel::new(0.5).expect("valid crossover");
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        // capacity is decreasing in alpha
        if 1.0 - h(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let alpha = if (1.0 - h(lo) - target).abs() <= (1.0 - h(hi) - target).abs() {
        lo
    } else {
        hi
    };
    BscChannel::new(alpha).expect("bisection stays in [0, 1/2]")
}

/// Calls `visit(weight, noise)` for every joint state `t^n`.
fn for_each_state(
    channel: &BmsChannel,
    n: Dimension,
    budget: &Budget,
    mut visit: impl FnMut(f64, &[f64]),
) -> Result<()> {
    let k = channel.components.len();
    let states = (k as u128).checked_pow(n.get() as u32).unwrap_or(u128::MAX);
    Budget::ensure("channel states", states, budget.channel_states)?;
    let mut digits = vec![0usize; n.get()];
    let mut noise = vec![0.0; n.get()];
    loop {
        let mut weight = 1.0;
        for (slot, &d) in noise.iter_mut().zip(&digits) {
            *slot = channel.components[d].t;
            weight *= channel.components[d].w;
        }
        visit(weight, &noise);
        let Some(pos) = digits.iter().position(|&d| d + 1 < k) else {
            return Ok(());
        };
        digits[pos] += 1;
        digits[..pos].fill(0);
    }
}

/// `I(f(X^n); Y^n)` through the mixture:
/// `E_{t^n}[n - H(Y'^n | f, t^n)]`, since `t^n` is independent of `X^n` and
/// observed.
pub fn bms_mutual_information(f: &Quantizer, channel: &BmsChannel) -> Result<f64> {
    bms_mutual_information_with(f, channel, &Budget::default())
}

pub fn bms_mutual_information_with(f: &Quantizer, channel: &BmsChannel, budget: &Budget) -> Result<f64> {
    let n = f.dimension();
    let mut scratch = Vec::new();
    let mut expected = 0.0;
    for_each_state(channel, n, budget, |w, noise| {
        if w > 0.0 {
            expected += w * conditional_entropy_raw(f, noise, &mut scratch);
        }
    })?;
    Ok(n.get() as f64 - expected)
}

/// Per-cell comparison of `I(X^n; Y^n | f = j)` through the mixture and
/// through the matched BSC.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellComparison {
    pub label: usize,
    pub size: usize,
    pub info_bms: f64,
    pub info_bsc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeastCapableReport {
    pub capacity: f64,
    pub matched_alpha: f64,
    pub info_bms: f64,
    pub info_bsc: f64,
    /// `(n-1) C`, when `M = 2^{n-1}`.
    pub bound: Option<f64>,
    pub cells: Vec<CellComparison>,
    pub report: CheckReport,
}

/// Per-cell diagnostic: `I(X; Y | X in cell)` equals `E_t[H(U xor Z_t)] -
/// n (1 - C)` for the mixture and `H(U xor Z_alpha) - n h(alpha)` for the BSC.
pub fn cell_comparisons(f: &Quantizer, channel: &BmsChannel, budget: &Budget) -> Result<Vec<CellComparison>> {
    let n = f.dimension();
    let size = n.size();
    let nf = n.get() as f64;
    let alpha = matched_bsc(channel).alpha();
    let noise_bsc = vec![alpha; n.get()];
    let noise_entropy = nf * (1.0 - capacity(channel));
    let mut scratch = Vec::new();
    let mut out = Vec::new();
    for (label, cell) in f.cells().iter().enumerate().filter(|(_, c)| !c.is_empty()) {
        let mut expected = 0.0;
        for_each_state(channel, n, budget, |w, noise| {
            if w > 0.0 {
                expected += w * noisy_entropy_raw(size, cell.members(), noise, &mut scratch);
            }
        })?;
        let bsc = noisy_entropy_raw(size, cell.members(), &noise_bsc, &mut scratch);
        out.push(CellComparison {
            label,
            size: cell.len(),
            info_bms: expected - noise_entropy,
            info_bsc: bsc - nf * h(alpha),
        });
    }
    Ok(out)
}

/// `I(f; Y_W) <= I(f; Y_BSC)` for the capacity-matched BSC and, when
/// `M = 2^{n-1}`, `I(f; Y_W) <= (n-1) C`.
pub fn check_least_capable(f: &Quantizer, channel: &BmsChannel) -> Result<LeastCapableReport> {
    check_least_capable_with(f, channel, &Budget::default())
}

pub fn check_least_capable_with(f: &Quantizer, channel: &BmsChannel, budget: &Budget) -> Result<LeastCapableReport> {
    let n = f.dimension();
    let c = capacity(channel);
    let matched = matched_bsc(channel);
    let info_bms = bms_mutual_information_with(f, channel, budget)?;
    let info_bsc = mutual_information(f, matched.alpha())?;
    let mut report = CheckReport::new();
    report.push(Check::le("I(f; Y_W) <= I(f; Y_BSC)", info_bms, info_bsc, CHECK_TOLERANCE));
    let bound = (f.cell_count() == default_cells(n)).then(|| (n.get() as f64 - 1.0) * c);
    if let Some(b) = bound {
        report.push(Check::le("I(f; Y_W) <= (n-1) C", info_bms, b, CHECK_TOLERANCE));
    }
    Ok(LeastCapableReport {
        capacity: c,
        matched_alpha: matched.alpha(),
        info_bms,
        info_bsc,
        bound,
        cells: cell_comparisons(f, channel, budget)?,
        report,
    })
}
