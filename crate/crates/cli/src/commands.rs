use std::fs::File;
use std::io::BufReader;
use std::time::Instant;

use hyperquant::bms::{capacity, capacity_first_principles, check_least_capable_with, matched_bsc, BmsChannel};
use hyperquant::noisy_subset::{
    enumerate_monotone_sets_with, g_alpha, g_alpha_derivative, h2_mixture_check, h3_lower_bound, hmn_bruteforce_with,
    hmn_closed_form, hmn_over_family, monotone_in_m_checks, Symmetry,
};
use hyperquant::partitions::{partition_count, RestrictedGrowth};
use hyperquant::quantizer::{
    default_cells, exhaustive_search_with, master_inequality_trace_with, random_search_with, repair_empty_cells,
    size_profile, HmnCache,
};
use hyperquant::shifting::{bias_check, check_entropy_nonincrease};
use hyperquant::{
    projection_quantizer, Budget, Check, CheckReport, Dimension, Quantizer, Vertex, VertexSet, CHECK_TOLERANCE,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::{parse_m_range, BmsArgs, LemmaArgs, SearchArgs, ShiftArgs, TableArgs, VerifyArgs};
use crate::error::CliError;
use crate::output::{blocks_text, num, opt_num, Outcome, Table};

/// Added to the selected `H_m` by the hidden `--perturb-hm` hook.
pub const PERTURBATION: f64 = 1e-3;

/// Master-chain traces are run on at most this many maximizers per alpha.
const MAX_TRACED_MAXIMIZERS: usize = 16;

pub struct Context {
    pub budget: Budget,
    pub timing: bool,
}

fn dim(n: usize) -> Result<Dimension, CliError> {
    Dimension::new(n).map_err(|e| CliError::Usage(e.to_string()))
}

fn tagged(report: CheckReport, tag: &str) -> CheckReport {
    report
        .checks
        .into_iter()
        .map(|mut c| {
            c.name = format!("{} [{tag}]", c.name);
            c
        })
        .collect()
}

/// Keeps, per category, the first failing check or else the one with the
/// least slack.
struct Worst {
    category: String,
    seen: usize,
    pick: Option<Check>,
}

impl Worst {
    fn new(category: impl Into<String>) -> Self {
        Self {
            category: category.into(),
            seen: 0,
            pick: None,
        }
    }

    fn add(&mut self, report: &CheckReport) {
        for c in &report.checks {
            self.seen += 1;
            let replace = match &self.pick {
                None => true,
                Some(p) if !p.passed => false,
                Some(p) => !c.passed || c.slack < p.slack,
            };
            if replace {
                self.pick = Some(c.clone());
            }
        }
    }

    fn finish(self, into: &mut CheckReport) {
        if let Some(mut c) = self.pick {
            c.name = format!("{}: {} [worst of {}]", self.category, c.name, self.seen);
            into.push(c);
        }
    }
}

fn random_labels(rng: &mut ChaCha8Rng, n: Dimension, cells: usize) -> Vec<u32> {
    (0..n.size()).map(|_| rng.random_range(0..cells as u32)).collect()
}

fn random_set(rng: &mut ChaCha8Rng, n: Dimension, size: usize) -> Result<VertexSet, CliError> {
    let mut members: Vec<Vertex> = (0..n.size() as Vertex).collect();
    for k in 0..size {
        let j = rng.random_range(k..members.len());
        members.swap(k, j);
    }
    members.truncate(size);
    Ok(VertexSet::new(n, members)?)
}

#[derive(Debug, Clone, Serialize)]
struct SearchEntry {
    n: usize,
    alpha: f64,
    #[serde(rename = "M")]
    cells: usize,
    bound: f64,
    max_mi: f64,
    gap: f64,
    argmax: Vec<Vec<Vec<Vertex>>>,
    partitions_examined: u64,
    projection_mi: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    runtime_ms: Option<u64>,
}

const SEARCH_COLUMNS: &[&str] = &[
    "n",
    "alpha",
    "M",
    "bound",
    "max_mi",
    "gap",
    "partitions_examined",
    "projection_mi",
    "argmax_count",
    "argmax_first",
    "runtime_ms",
];

impl SearchEntry {
    fn row(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            num(self.alpha),
            self.cells.to_string(),
            num(self.bound),
            num(self.max_mi),
            num(self.gap),
            self.partitions_examined.to_string(),
            num(self.projection_mi),
            self.argmax.len().to_string(),
            self.argmax.first().map(|b| blocks_text(b)).unwrap_or_default(),
            self.runtime_ms.map(|t| t.to_string()).unwrap_or_default(),
        ]
    }
}

fn run_search(
    n: Dimension,
    alpha: f64,
    cells: usize,
    samples: Option<u64>,
    seed: u64,
    ctx: &Context,
) -> Result<(SearchEntry, CheckReport), CliError> {
    let start = Instant::now();
    let (mut entry, report) = match samples {
        None => {
            let r = exhaustive_search_with(n, alpha, cells, &ctx.budget, |_, _| {})?;
            let entry = SearchEntry {
                n: n.get(),
                alpha,
                cells,
                bound: r.bound,
                max_mi: r.max_mi,
                gap: r.gap,
                argmax: r.argmax,
                partitions_examined: r.partitions_examined,
                projection_mi: r.projection_mi,
                seed: None,
                runtime_ms: None,
            };
            (entry, r.report)
        }
        Some(samples) => {
            let r = random_search_with(n, alpha, cells, samples, seed, |_, _| {})?;
            let entry = SearchEntry {
                n: n.get(),
                alpha,
                cells,
                bound: r.bound,
                max_mi: r.max_mi,
                gap: r.gap,
                argmax: vec![r.best.blocks()],
                partitions_examined: samples + 1,
                projection_mi: r.projection_mi,
                seed: Some(seed),
                runtime_ms: None,
            };
            (entry, r.report)
        }
    };
    if ctx.timing {
        entry.runtime_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok((entry, report))
}

pub fn verify_theorem(args: &VerifyArgs, ctx: &Context) -> Result<Outcome, CliError> {
    let n = dim(args.n)?;
    let grid = args.alpha.resolve()?;
    let cells = default_cells(n);
    let mut checks = CheckReport::new();
    let mut table = Table::new(SEARCH_COLUMNS);
    let mut entries = Vec::new();
    let mut cache = HmnCache::new();
    for &alpha in &grid {
        let tag = format!("n={n}, alpha={alpha}");
        let (entry, report) = run_search(n, alpha, cells, args.samples, args.seed, ctx)?;
        checks.extend(tagged(report, &tag));

        let projection = master_inequality_trace_with(&projection_quantizer(n), alpha, &mut cache)?;
        checks.push(Check::eq(
            format!("projection H(Y|f) = H_2^n [{tag}]"),
            projection.conditional_entropy,
            projection.h2,
            CHECK_TOLERANCE,
        ));
        checks.extend(tagged(projection.report, &format!("projection, {tag}")));
        for blocks in entry.argmax.iter().take(MAX_TRACED_MAXIMIZERS) {
            let q = repair_empty_cells(&Quantizer::from_blocks(n, blocks, cells)?)?;
            let trace = master_inequality_trace_with(&q, alpha, &mut cache)?;
            checks.extend(tagged(trace.report, &format!("maximizer {}, {tag}", blocks_text(blocks))));
        }
        table.push(entry.row());
        entries.push(entry);
    }
    Ok(Outcome {
        config: json!({"n": args.n, "alpha": grid, "M": cells, "samples": args.samples, "seed": args.seed}),
        results: serde_json::to_value(entries)?,
        checks,
        table,
    })
}

pub fn search(args: &SearchArgs, ctx: &Context) -> Result<Outcome, CliError> {
    let n = dim(args.n)?;
    let grid = args.alpha.resolve()?;
    let cells = args.cells.unwrap_or_else(|| default_cells(n));
    if cells == 0 || cells > n.size() {
        return Err(CliError::Usage(format!("--cells must lie in 1..={}", n.size())));
    }
    let mut checks = CheckReport::new();
    let mut table = Table::new(SEARCH_COLUMNS);
    let mut entries = Vec::new();
    for &alpha in &grid {
        let (entry, report) = run_search(n, alpha, cells, args.samples, args.seed, ctx)?;
        checks.extend(tagged(report, &format!("n={n}, M={cells}, alpha={alpha}")));
        table.push(entry.row());
        entries.push(entry);
    }
    Ok(Outcome {
        config: json!({"n": args.n, "alpha": grid, "M": cells, "samples": args.samples, "seed": args.seed}),
        results: serde_json::to_value(entries)?,
        checks,
        table,
    })
}

#[derive(Debug, Clone, Serialize)]
struct TableEntry {
    n: usize,
    m: usize,
    alpha: f64,
    monotone: f64,
    bruteforce: Option<f64>,
    closed_form: Option<f64>,
    monotone_sets: usize,
    minimizers: Vec<Vec<String>>,
}

/// Monotone minimum for every `m` in `ms` and every alpha, with the
/// perturbation hook applied.
fn monotone_values(
    n: Dimension,
    ms: impl Iterator<Item = usize>,
    grid: &[f64],
    perturb: Option<usize>,
    budget: &Budget,
) -> Result<Vec<(usize, usize, Vec<hyperquant::HmnResult>)>, CliError> {
    ms.map(|m| {
        let family = enumerate_monotone_sets_with(n, m, budget)?;
        let mut results = hmn_over_family(&family, grid);
        if perturb == Some(m) {
            for r in &mut results {
                r.value += PERTURBATION;
            }
        }
        Ok((m, family.sets.len(), results))
    })
    .collect()
}

/// Brute force, or `None` when it would exceed the budget.
fn bruteforce_if_affordable(
    n: Dimension,
    m: usize,
    grid: &[f64],
    budget: &Budget,
) -> Result<Option<Vec<hyperquant::HmnResult>>, CliError> {
    match hmn_bruteforce_with(n, m, grid, Symmetry::Full, budget) {
        Ok(r) => Ok(Some(r)),
        Err(hyperquant::Error::Budget { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn hmn_table(args: &TableArgs, ctx: &Context) -> Result<Outcome, CliError> {
    let n = dim(args.n)?;
    let grid = args.alpha.resolve()?;
    let (lo, hi) = match &args.m {
        Some(s) => parse_m_range(s)?,
        None => (1, n.size()),
    };
    if hi > n.size() {
        return Err(CliError::Usage(format!("m = {hi} exceeds 2^n = {}", n.size())));
    }
    let mut checks = CheckReport::new();
    let mut table = Table::new(&[
        "n",
        "m",
        "alpha",
        "monotone",
        "bruteforce",
        "closed_form",
        "monotone_sets",
        "minimizers",
    ]);
    let mut entries = Vec::new();
    let mono = monotone_values(n, lo..=hi, &grid, args.perturb_hm, &ctx.budget)?;
    for (m, family_size, results) in &mono {
        let m = *m;
        let brute = bruteforce_if_affordable(n, m, &grid, &ctx.budget)?;
        for (k, r) in results.iter().enumerate() {
            let alpha = r.alpha;
            let tag = format!("n={n}, m={m}, alpha={alpha}");
            let b = brute.as_ref().map(|b| b[k].value);
            if let Some(b) = b {
                checks.push(Check::eq(
                    format!("brute-force H_m^n = monotone H_m^n [{tag}]"),
                    b,
                    r.value,
                    CHECK_TOLERANCE,
                ));
            }
            let closed = if m <= 4 { Some(hmn_closed_form(n, m, alpha)?) } else { None };
            if let Some(c) = closed {
                checks.push(Check::eq(
                    format!("closed form H_m^n = monotone H_m^n [{tag}]"),
                    c,
                    r.value,
                    CHECK_TOLERANCE,
                ));
            }
            if m == 3 {
                checks.push(Check::le(
                    format!("H_3 lower bound <= H_3^n [{tag}]"),
                    h3_lower_bound(n, alpha)?,
                    r.value,
                    CHECK_TOLERANCE,
                ));
            }
            let entry = TableEntry {
                n: n.get(),
                m,
                alpha,
                monotone: r.value,
                bruteforce: b,
                closed_form: closed,
                monotone_sets: *family_size,
                minimizers: r.minimizers.iter().map(VertexSet::words).collect(),
            };
            table.push(vec![
                entry.n.to_string(),
                m.to_string(),
                num(alpha),
                num(entry.monotone),
                opt_num(entry.bruteforce),
                opt_num(entry.closed_form),
                family_size.to_string(),
                entry
                    .minimizers
                    .iter()
                    .map(|w| w.join(" "))
                    .collect::<Vec<_>>()
                    .join("|"),
            ]);
            entries.push(entry);
        }
    }
    for (k, &alpha) in grid.iter().enumerate() {
        let values: Vec<f64> = mono.iter().map(|(_, _, r)| r[k].value).collect();
        // values[0] is H_lo, so shift the names by lo - 1
        for mut c in monotone_in_m_checks(n, alpha, &values).checks {
            if lo > 1 {
                c.name = format!("{} (offset m by {})", c.name, lo - 1);
            }
            checks.push(c);
        }
    }
    Ok(Outcome {
        config: json!({"n": args.n, "m": [lo, hi], "alpha": grid, "perturb_hm": args.perturb_hm}),
        results: serde_json::to_value(entries)?,
        checks,
        table,
    })
}

pub fn shift(args: &ShiftArgs, _ctx: &Context) -> Result<Outcome, CliError> {
    let n = dim(args.n)?;
    let grid = args.alpha.resolve()?;
    let set = match (&args.set, args.random_size) {
        (Some(words), _) => {
            let words: Vec<&str> = words.split(',').map(str::trim).filter(|w| !w.is_empty()).collect();
            VertexSet::from_words(n, &words)?
        }
        (None, Some(size)) => {
            if size == 0 || size > n.size() {
                return Err(CliError::Usage(format!("--random-size must lie in 1..={}", n.size())));
            }
            random_set(&mut ChaCha8Rng::seed_from_u64(args.seed), n, size)?
        }
        (None, None) => return Err(CliError::Usage("give --set or --random-size".into())),
    };
    let mut checks = CheckReport::new();
    let mut table = Table::new(&["alpha", "step", "coordinate", "moved", "entropy_before", "entropy_after"]);
    let mut per_alpha = Vec::new();
    let mut steps_json = Value::Null;
    for &alpha in &grid {
        let trace = check_entropy_nonincrease(&set, alpha)?;
        let tag = format!("alpha={alpha}");
        checks.extend(tagged(trace.report.clone(), &tag));
        let mut bias = Worst::new(format!("bias never decreases [{tag}]"));
        for step in &trace.steps {
            bias.add(&bias_check(&step.before, step.coordinate, alpha)?.report);
        }
        bias.finish(&mut checks);
        for (k, step) in trace.steps.iter().enumerate() {
            table.push(vec![
                num(alpha),
                (k + 1).to_string(),
                step.coordinate.to_string(),
                step.moved.words().join(" "),
                num(trace.entropies[k]),
                num(trace.entropies[k + 1]),
            ]);
        }
        if steps_json.is_null() {
            steps_json = trace
                .steps
                .iter()
                .map(|s| json!({"coordinate": s.coordinate, "moved": s.moved.words(), "after": s.after.words()}))
                .collect();
        }
        per_alpha.push(json!({"alpha": alpha, "entropies": trace.entropies}));
    }
    let (result, _) = hyperquant::shifting::shift_to_monotone(&set)?;
    Ok(Outcome {
        config: json!({"n": args.n, "set": set.words(), "alpha": grid, "seed": args.seed}),
        results: json!({
            "initial": set.words(),
            "result": result.words(),
            "steps": steps_json,
            "traces": per_alpha,
        }),
        checks,
        table,
    })
}

pub fn check_lemmas(args: &LemmaArgs, ctx: &Context) -> Result<Outcome, CliError> {
    let n = dim(args.n)?;
    let grid = args.alpha.resolve()?;
    let size = n.size();
    let mut checks = CheckReport::new();
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);

    // monotone sets suffice, closed forms
    let mono = monotone_values(n, 1..=size, &grid, args.perturb_hm, &ctx.budget)?;
    let mut skipped_bruteforce = Vec::new();
    for (m, _, results) in &mono {
        let m = *m;
        match bruteforce_if_affordable(n, m, &grid, &ctx.budget)? {
            Some(brute) => {
                for (b, r) in brute.iter().zip(results) {
                    checks.push(Check::eq(
                        format!("brute-force H_m^n = monotone H_m^n [n={n}, m={m}, alpha={}]", r.alpha),
                        b.value,
                        r.value,
                        CHECK_TOLERANCE,
                    ));
                }
            }
            None => skipped_bruteforce.push(m),
        }
        if m <= 4 {
            for r in results {
                checks.push(Check::eq(
                    format!("closed form H_m^n = monotone H_m^n [n={n}, m={m}, alpha={}]", r.alpha),
                    hmn_closed_form(n, m, r.alpha)?,
                    r.value,
                    CHECK_TOLERANCE,
                ));
            }
        }
    }
    for (k, &alpha) in grid.iter().enumerate() {
        let values: Vec<f64> = mono.iter().map(|(_, _, r)| r[k].value).collect();
        checks.extend(monotone_in_m_checks(n, alpha, &values));
        if size > 2 {
            let h1 = hmn_closed_form(n, 1, alpha)?;
            let h2 = hmn_closed_form(n, 2, alpha)?;
            for m in 3..size {
                checks.push(h2_mixture_check(n, alpha, m, h1, h2, values[m - 1]));
            }
        }
        if size >= 3 {
            checks.push(Check::le(
                format!("H_3 lower bound <= H_3^n [n={n}, alpha={alpha}]"),
                h3_lower_bound(n, alpha)?,
                values[2],
                CHECK_TOLERANCE,
            ));
        }
    }

    // g(alpha)
    checks.push(Check::eq("g(1/2) = 0", g_alpha(0.5)?, 0.0, 1e-12));
    let step = 1e-6;
    for &alpha in grid.iter().filter(|&&a| a > step && a < 0.5 - step) {
        let g = g_alpha(alpha)?;
        let mut positive = Check::le(format!("0 < g({alpha})"), 0.0, g, 0.0);
        positive.passed = g > 0.0;
        checks.push(positive);
        let d = g_alpha_derivative(alpha)?;
        let fd = (g_alpha(alpha + step)? - g_alpha(alpha - step)?) / (2.0 * step);
        checks.push(Check::eq(format!("g'({alpha}) = central difference"), d, fd, 1e-6));
        let mut negative = Check::le(format!("g'({alpha}) < 0"), d, 0.0, 0.0);
        negative.passed = d < 0.0;
        checks.push(negative);
    }

    // shifting: entropy never increases, biases never decrease
    let mut entropy = Worst::new("shifting keeps entropy from increasing");
    let mut bias = Worst::new("bias never decreases under shifting");
    for i in 0..args.samples {
        let k = rng.random_range(1..=size);
        let set = random_set(&mut rng, n, k)?;
        let alpha = grid[i as usize % grid.len()];
        let trace = check_entropy_nonincrease(&set, alpha)?;
        entropy.add(&trace.report);
        for coordinate in 1..=n.get() {
            bias.add(&bias_check(&set, coordinate, alpha)?.report);
        }
    }
    entropy.finish(&mut checks);
    bias.finish(&mut checks);

    // singleton count identity over quantizers with 2^(n-1) nonempty cells
    let cells = default_cells(n);
    let mut identity = Worst::new("lambda(1) = sum_m (m-2) lambda(m)");
    let exhaustive = partition_count(size, cells) <= ctx.budget.partitions;
    let mut examine = |q: &Quantizer| {
        if q.all_cells_nonempty() {
            let ok = size_profile(q).singleton_identity() == Some(true);
            identity.add(&std::iter::once(Check::holds(format!("{:?}", q.labels()), ok)).collect());
        }
    };
    if exhaustive {
        let mut rgs = RestrictedGrowth::new(size, cells);
        while let Some(labels) = rgs.advance() {
            examine(&Quantizer::new(n, labels.to_vec(), cells)?);
        }
    } else {
        for _ in 0..args.samples {
            let q = Quantizer::new(n, random_labels(&mut rng, n, cells), cells)?;
            examine(&repair_empty_cells(&q)?);
        }
    }
    let identity_count = identity.seen;
    identity.finish(&mut checks);

    Ok(Outcome {
        config: json!({"n": args.n, "alpha": grid, "samples": args.samples, "seed": args.seed, "perturb_hm": args.perturb_hm}),
        results: json!({
            "bruteforce_skipped_for_m": skipped_bruteforce,
            "identity_quantizers": identity_count,
            "identity_exhaustive": exhaustive,
            "shift_sets": args.samples,
        }),
        table: Table::checks(&checks),
        checks,
    })
}

fn load_channel(args: &BmsArgs) -> Result<(String, BmsChannel), CliError> {
    if let Some(path) = &args.channel {
        let file = File::open(path)?;
        let channel = serde_json::from_reader(BufReader::new(file))
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        return Ok((path.display().to_string(), channel));
    }
    if let Some(e) = args.bec {
        return Ok((format!("BEC({e})"), BmsChannel::bec(e)?));
    }
    if let Some(a) = args.bsc {
        return Ok((format!("BSC({a})"), BmsChannel::bsc(a)?));
    }
    Err(CliError::Usage("give --channel, --bec or --bsc".into()))
}

pub fn bms_verify(args: &BmsArgs, ctx: &Context) -> Result<Outcome, CliError> {
    let n = dim(args.n)?;
    let (name, channel) = load_channel(args)?;
    let cells = default_cells(n);
    let c = capacity(&channel);
    let mut checks = CheckReport::new();
    checks.push(Check::eq(
        "capacity = direct mutual information at n = 1",
        c,
        capacity_first_principles(&channel),
        CHECK_TOLERANCE,
    ));

    let projection = check_least_capable_with(&projection_quantizer(n), &channel, &ctx.budget)?;
    let target = (n.get() as f64 - 1.0) * c;
    checks.push(Check::eq("projection I(f; Y_W) = (n-1) C", projection.info_bms, target, CHECK_TOLERANCE));
    checks.extend(tagged(projection.report.clone(), "projection"));

    let mut table = Table::new(&["index", "labels", "info_bms", "info_bsc", "bound"]);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut worst = Worst::new("random quantizers");
    let mut quantizers = Vec::new();
    for i in 0..args.samples {
        let q = Quantizer::new(n, random_labels(&mut rng, n, cells), cells)?;
        let r = check_least_capable_with(&q, &channel, &ctx.budget)?;
        worst.add(&r.report);
        let labels = q.labels().iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
        table.push(vec![
            i.to_string(),
            labels,
            num(r.info_bms),
            num(r.info_bsc),
            opt_num(r.bound),
        ]);
        quantizers.push(json!({"labels": q.labels(), "info_bms": r.info_bms, "info_bsc": r.info_bsc}));
    }
    worst.finish(&mut checks);

    Ok(Outcome {
        config: json!({"n": args.n, "channel": name, "components": channel.components(), "samples": args.samples, "seed": args.seed}),
        results: json!({
            "capacity": c,
            "matched_alpha": matched_bsc(&channel).alpha(),
            "projection": projection,
            "quantizers": quantizers,
        }),
        checks,
        table,
    })
}
