use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "freqk", version, about = "Frequency K_i graphs for symmetric TSP instances")]
pub struct Cli {
    /// Worker threads; outputs do not depend on this.
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ordered frequencies of a frequency K_i and the per-vertex tour/ordinary split.
    Freqgraph(FreqgraphArgs),
    /// Per-edge F, f, p across a range of i, with class summaries against a tour.
    Trajectory(TrajectoryArgs),
    /// Smallest tour-edge frequencies and err extremes from sampled K_i's.
    Sample(SampleArgs),
    /// Model curves and solved thresholds.
    Analytics(AnalyticsArgs),
    /// Sparsified edge list by the decrement or the threshold rule.
    Sparsify(SparsifyArgs),
    /// Frequency-then-DP tour recovery.
    Solve(SolveArgs),
    /// Smallest i past which ordinary-edge probability declines.
    Idsolve(IdsolveArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "source")]
pub struct Source {
    /// TSPLIB instance file.
    #[arg(long)]
    pub instance: Option<PathBuf>,

    /// Uniform random instance `n,seed` with distances in (0,10].
    #[arg(long, value_parser = parse_random)]
    pub random: Option<(usize, u64)>,
}

#[derive(Debug, Args)]
pub struct InstanceArgs {
    #[command(flatten)]
    pub source: Source,

    /// Symmetric perturbation magnitude, or `auto` for 1e-6 of the smallest distance.
    #[arg(long)]
    pub perturb: Option<Magnitude>,

    /// Reference tour: a TSPLIB tour file, or `exact` to solve it with the DP.
    #[arg(long)]
    pub tour: Option<TourSource>,

    /// Largest vertex count solved exactly.
    #[arg(long, default_value_t = freqk::subset_dp::DEFAULT_CAP, value_parser = parse_cap)]
    pub cap: usize,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Existing directory receiving the output files.
    #[arg(long)]
    pub out: PathBuf,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SamplingArgs {
    /// Sampled K_i's per edge and i; capped at the number of distinct ones.
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,

    /// Enumerate every K_i containing each edge.
    #[arg(long)]
    pub exhaustive: bool,

    /// Independent runs with consecutive seeds, pooled.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub repeats: u64,
}

#[derive(Debug, Args)]
pub struct FreqgraphArgs {
    #[command(flatten)]
    pub inst: InstanceArgs,
    #[command(flatten)]
    pub out: OutArgs,

    /// Use the first i vertices; defaults to all of them.
    #[arg(long)]
    pub i: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    #[command(flatten)]
    pub inst: InstanceArgs,
    #[command(flatten)]
    pub out: OutArgs,
    #[command(flatten)]
    pub sampling: SamplingArgs,

    /// Inclusive range `a..b`.
    #[arg(long, value_parser = parse_range)]
    pub i_range: (usize, usize),
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub inst: InstanceArgs,
    #[command(flatten)]
    pub out: OutArgs,
    #[command(flatten)]
    pub sampling: SamplingArgs,

    #[arg(long, value_parser = parse_range, default_value = "4..8")]
    pub i_range: (usize, usize),
}

#[derive(Debug, Args)]
pub struct AnalyticsArgs {
    /// Comma-separated instance sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,

    #[arg(long)]
    pub out: PathBuf,

    /// Log-spaced size range `a..b` for the i_d curve.
    #[arg(long, value_parser = parse_range)]
    pub minid: Option<(usize, usize)>,

    /// Points on the i_d curve.
    #[arg(long, default_value_t = 41)]
    pub minid_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleKind {
    Decrement,
    Threshold,
}

#[derive(Debug, Args)]
pub struct SparsifyArgs {
    #[command(flatten)]
    pub inst: InstanceArgs,
    #[command(flatten)]
    pub out: OutArgs,
    #[command(flatten)]
    pub sampling: SamplingArgs,

    #[arg(long, value_enum, default_value_t = RuleKind::Decrement)]
    pub rule: RuleKind,

    /// Decrement rule range.
    #[arg(long, value_parser = parse_range, default_value = "4..8")]
    pub i_range: (usize, usize),

    /// Threshold rule subset size.
    #[arg(long, default_value_t = 8)]
    pub i: usize,

    /// `flb`, a number, or `kth:K` for the K-th smallest tour-edge frequency.
    #[arg(long, default_value = "flb", value_parser = parse_threshold)]
    pub threshold: freqk::ThresholdRule,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub inst: InstanceArgs,
    #[command(flatten)]
    pub out: OutArgs,

    /// Evaluation size; defaults to min(2 i_d, n).
    #[arg(long)]
    pub i: Option<usize>,

    #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u64).range(1..))]
    pub samples: u64,
}

#[derive(Debug, Args)]
pub struct IdsolveArgs {
    #[arg(long)]
    pub n: usize,

    /// Use 3/2 in place of 2 for the neglected residual.
    #[arg(long)]
    pub residual_corrected: bool,

    /// Also write `idsolve.csv` here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Magnitude {
    Auto,
    Value(f64),
}

impl std::str::FromStr for Magnitude {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Magnitude::Auto);
        }
        s.parse().map(Magnitude::Value).map_err(|_| format!("expected a number or `auto`, got `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TourSource {
    Exact,
    File(PathBuf),
}

impl std::str::FromStr for TourSource {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(if s == "exact" { TourSource::Exact } else { TourSource::File(s.into()) })
    }
}

fn parse_cap(s: &str) -> Result<usize, String> {
    let cap: usize = s.parse().map_err(|_| format!("bad cap `{s}`"))?;
    if !(4..=26).contains(&cap) {
        return Err(format!("cap must lie in [4, 26], got {cap}"));
    }
    Ok(cap)
}

fn parse_random(s: &str) -> Result<(usize, u64), String> {
    let (n, seed) = s.split_once(',').ok_or("expected `n,seed`")?;
    let n = n.trim().parse().map_err(|_| format!("bad vertex count `{n}`"))?;
    let seed = seed.trim().parse().map_err(|_| format!("bad seed `{seed}`"))?;
    Ok((n, seed))
}

pub fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").ok_or("expected `a..b`")?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad lower bound `{a}`"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad upper bound `{b}`"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

fn parse_threshold(s: &str) -> Result<freqk::ThresholdRule, String> {
    use freqk::ThresholdRule;
    if s == "flb" {
        return Ok(ThresholdRule::FLb);
    }
    if let Some(k) = s.strip_prefix("kth:") {
        let k: usize = k.parse().map_err(|_| format!("bad rank `{k}`"))?;
        if k == 0 {
            return Err("ranks start at 1".into());
        }
        return Ok(ThresholdRule::KthSmallestTour(k));
    }
    s.parse().map(ThresholdRule::Fixed).map_err(|_| format!("expected `flb`, `kth:K` or a number, got `{s}`"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("4..8"), Ok((4, 8)));
        assert_eq!(parse_range("5..5"), Ok((5, 5)));
        assert!(parse_range("8..4").is_err());
        assert!(parse_range("4-8").is_err());
    }

    #[test]
    fn thresholds() {
        assert_eq!(parse_threshold("kth:1"), Ok(freqk::ThresholdRule::KthSmallestTour(1)));
        assert_eq!(parse_threshold("2.5"), Ok(freqk::ThresholdRule::Fixed(2.5)));
        assert!(parse_threshold("kth:0").is_err());
    }

    #[test]
    fn definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
