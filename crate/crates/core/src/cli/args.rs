use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::critical::Tolerances;
use crate::foliation::SampleStrategy;

/// Parsed command line: one subcommand with its inputs, pair source, grid,
/// tolerances and output options.
#[derive(Debug, Parser)]
#[command(name = "sizefn", version, about = "Size functions of graphs and meshes")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cornerpoint series of a (reduced) measuring function.
    Corners {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        pairs: PairArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Matching distance between two inputs on each half-plane.
    Match {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        second: SecondInputArgs,
        #[command(flatten)]
        pairs: PairArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Reduced measuring function F = max_i (φ_i − b_i)/l_i per vertex.
    Reduce {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        pairs: PairArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Deterministic admissible pairs.
    SamplePairs {
        /// Arity of the pairs; inferred from --input when given.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        values: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        sample: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = StrategyArg::Grid)]
        strategy: StrategyArg,
        /// Offset range A for b; defaults to max ‖φ⃗‖∞ of --input, else 1.
        #[arg(long)]
        offset_range: Option<f64>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Half-plane or projected pseudocritical vertices of a mesh.
    Pseudocrit {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        pairs: PairArgs,
        /// Projection indices (0-based, comma separated) instead of a half-plane.
        #[arg(long, value_delimiter = ',')]
        projection: Option<Vec<usize>>,
        #[command(flatten)]
        tolerances: ToleranceArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Checks that cornerpoint coordinates sit at pseudocritical or special values.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        pairs: PairArgs,
        #[command(flatten)]
        tolerances: ToleranceArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Hausdorff distance between discontinuity clouds of two inputs.
    Dd {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        second: SecondInputArgs,
        #[command(flatten)]
        pairs: PairArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Region plot and cornerpoint diagram as SVG.
    Plot {
        #[command(flatten)]
        input: OptionalInputArgs,
        /// Plot a series JSON file instead of computing one.
        #[arg(long, conflicts_with = "input")]
        series: Option<PathBuf>,
        #[command(flatten)]
        pairs: PairArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Writes a generated test mesh with measuring values as a size-graph JSON.
    Mesh {
        #[arg(long, value_enum)]
        shape: ShapeArg,
        /// Subdivision level (icosphere) or cells per edge (cube).
        #[arg(long)]
        level: usize,
        #[arg(long, value_enum, default_value_t = MeasureArg::AbsXz)]
        measure: MeasureArg,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Size-graph JSON, or an OFF mesh together with --values.
    #[arg(long)]
    pub input: PathBuf,
    /// Headerless CSV of measuring values for an OFF --input.
    #[arg(long)]
    pub values: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OptionalInputArgs {
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub values: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SecondInputArgs {
    #[arg(long)]
    pub input2: PathBuf,
    #[arg(long)]
    pub values2: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// JSON file with one admissible pair or a list of them.
    #[arg(long, conflicts_with = "sample")]
    pub pairs: Option<PathBuf>,
    /// Number of pairs to sample.
    #[arg(long)]
    pub sample: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = StrategyArg::Grid)]
    pub strategy: StrategyArg,
    /// Offset range A for sampled b; defaults to max ‖φ⃗‖∞ of the input.
    #[arg(long)]
    pub offset_range: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Lattice points per axis.
    #[arg(long = "grid", default_value_t = 200)]
    pub n_grid: usize,
    #[arg(long, value_parser = parse_range)]
    pub s_range: Option<(f64, f64)>,
    #[arg(long, value_parser = parse_range)]
    pub t_range: Option<(f64, f64)>,
}

#[derive(Debug, Args)]
pub struct ToleranceArgs {
    #[arg(long, default_value_t = Tolerances::default().tau_match)]
    pub tau_match: f64,
    #[arg(long = "tau-0", default_value_t = Tolerances::default().tau_0)]
    pub tau_0: f64,
    #[arg(long = "tau-i", default_value_t = Tolerances::default().tau_i)]
    pub tau_i: f64,
    #[arg(long = "tau-s", default_value_t = Tolerances::default().tau_s)]
    pub tau_s: f64,
}

impl ToleranceArgs {
    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            tau_i: self.tau_i,
            tau_0: self.tau_0,
            tau_s: self.tau_s,
            tau_match: self.tau_match,
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Grid,
    Random,
}

impl From<StrategyArg> for SampleStrategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Grid => SampleStrategy::Grid,
            StrategyArg::Random => SampleStrategy::Random,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ShapeArg {
    Icosphere,
    Cube,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    AbsXz,
    Xz,
    X,
}

fn parse_range(text: &str) -> Result<(f64, f64), String> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| format!("expected a:b, got {text:?}"))?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(format!("range {text:?} must satisfy a < b"));
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("-0.5:2.5"), Ok((-0.5, 2.5)));
        assert!(parse_range("1:1").is_err());
        assert!(parse_range("1").is_err());
    }

    #[test]
    fn sources_are_exclusive() {
        let r = RunConfig::try_parse_from(["sizefn", "match", "--input", "a", "--input2", "b", "--pairs", "p", "--sample", "3"]);
        assert!(r.is_err());
    }

    #[test]
    fn command_definition_is_consistent() {
        use clap::CommandFactory;
        RunConfig::command().debug_assert();
    }
}
