use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperquant::noisy_subset::{coarse_alpha_grid, default_alpha_grid};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "hyperquant", version, about = "Verification suites for quantizers of BSC outputs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,
    /// Cap on every enumeration (subsets, down-sets, partitions, channel states).
    #[arg(long, global = true, env = "HYPERQUANT_BUDGET", value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: Option<u64>,
    /// Omit the timestamp and runtimes so reports are byte-reproducible.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximize I(f(X); Y) over quantizers with 2^(n-1) cells and compare with (n-1)(1-h(alpha)).
    VerifyTheorem(VerifyArgs),
    /// Tabulate H_m^n(alpha) by monotone search, brute force and closed form.
    HmnTable(TableArgs),
    /// Shift a set to a monotone one and trace entropies and biases.
    Shift(ShiftArgs),
    /// Search quantizers with any number of cells.
    Search(SearchArgs),
    /// Run the noisy-subset, shifting and quantizer lemma suites for one n.
    CheckLemmas(LemmaArgs),
    /// Compare a BMS mixture with its capacity-matched BSC.
    BmsVerify(BmsArgs),
}

#[derive(Debug, Clone, Args)]
pub struct AlphaArgs {
    /// Crossover probabilities, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "alpha_grid")]
    pub alpha: Vec<f64>,
    /// `default`, `coarse`, or a comma separated list.
    #[arg(long)]
    pub alpha_grid: Option<String>,
}

impl AlphaArgs {
    pub fn resolve(&self) -> Result<Vec<f64>, CliError> {
        let grid = if !self.alpha.is_empty() {
            self.alpha.clone()
        } else {
            match self.alpha_grid.as_deref() {
                None | Some("default") => default_alpha_grid(),
                Some("coarse") => coarse_alpha_grid(),
                Some(list) => list
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<f64>()
                            .map_err(|_| CliError::Usage(format!("cannot parse alpha `{s}`")))
                    })
                    .collect::<Result<_, _>>()?,
            }
        };
        if let Some(a) = grid.iter().find(|a| !(0.0..=0.5).contains(*a)) {
            return Err(CliError::Usage(format!("alpha = {a} is outside [0, 1/2]")));
        }
        Ok(grid)
    }
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[command(flatten)]
    pub alpha: AlphaArgs,
    /// Sample this many random quantizers instead of enumerating all partitions.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[command(flatten)]
    pub alpha: AlphaArgs,
    /// Number of cells M; defaults to 2^(n-1).
    #[arg(long)]
    pub cells: Option<usize>,
    /// Sample this many random quantizers instead of enumerating all partitions.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Set sizes as `a..b` (inclusive) or a single value; defaults to 1..2^n.
    #[arg(long)]
    pub m: Option<String>,
    #[command(flatten)]
    pub alpha: AlphaArgs,
    #[arg(long, hide = true)]
    pub perturb_hm: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ShiftArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Members as comma separated words x1..xn, e.g. `100,010,111`.
    #[arg(long, conflicts_with = "random_size", required_unless_present = "random_size")]
    pub set: Option<String>,
    /// Draw a uniform random set of this size from the seed.
    #[arg(long)]
    pub random_size: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub alpha: AlphaArgs,
}

#[derive(Debug, Clone, Args)]
pub struct LemmaArgs {
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[command(flatten)]
    pub alpha: AlphaArgs,
    /// Random sets for the shifting checks, and random quantizers when the
    /// partitions exceed the budget.
    #[arg(long, default_value_t = 200)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, hide = true)]
    pub perturb_hm: Option<usize>,
}

#[derive(Debug, Clone, Args)]
#[command(group(clap::ArgGroup::new("channel_source").required(true).args(["channel", "bec", "bsc"])))]
pub struct BmsArgs {
    /// JSON file `{"components": [{"w": .., "t": ..}, ..]}`.
    #[arg(long)]
    pub channel: Option<PathBuf>,
    /// Binary erasure channel with this erasure probability.
    #[arg(long)]
    pub bec: Option<f64>,
    /// Binary symmetric channel with this crossover.
    #[arg(long)]
    pub bsc: Option<f64>,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    /// Random quantizers with 2^(n-1) cells, in addition to the projection.
    #[arg(long, default_value_t = 500)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Parses `a..b` (inclusive) or `a`.
pub fn parse_m_range(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("cannot parse m range `{s}`"));
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)
        }
        None => {
            let m = s.trim().parse().map_err(|_| bad())?;
            (m, m)
        }
    };
    if lo == 0 || lo > hi {
        return Err(bad());
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m_ranges() {
        assert_eq!(parse_m_range("1..8").unwrap(), (1, 8));
        assert_eq!(parse_m_range("2..=5").unwrap(), (2, 5));
        assert_eq!(parse_m_range("3").unwrap(), (3, 3));
        assert!(parse_m_range("0..3").is_err());
        assert!(parse_m_range("5..2").is_err());
        assert!(parse_m_range("a..b").is_err());
    }

    #[test]
    fn alpha_grids() {
        let named = |g: &str| AlphaArgs {
            alpha: vec![],
            alpha_grid: Some(g.into()),
        };
        assert_eq!(named("default").resolve().unwrap(), default_alpha_grid());
        assert_eq!(named("coarse").resolve().unwrap().len(), 11);
        assert_eq!(named("0.1, 0.2").resolve().unwrap(), vec![0.1, 0.2]);
        assert!(named("0.6").resolve().is_err());
        let explicit = AlphaArgs {
            alpha: vec![0.25],
            alpha_grid: None,
        };
        assert_eq!(explicit.resolve().unwrap(), vec![0.25]);
    }

    #[test]
    fn command_line_parses() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
