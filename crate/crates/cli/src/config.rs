//! Command-line arguments and the validated run configuration.

use std::path::PathBuf;

use amalgam_core::balg::AlgebraContext;
use amalgam_core::nccomb::{MAX_COORDS, MAX_ORDER};
use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Rs,
    Dilation,
    Additivity,
    Multiplicativity,
    Lemma31,
    Domains,
    All,
}

impl Suite {
    /// The suites run by `all`, in report order.
    pub const EACH: [Suite; 6] =
        [Suite::Rs, Suite::Dilation, Suite::Additivity, Suite::Multiplicativity, Suite::Lemma31, Suite::Domains];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Rs => "rs",
            Suite::Dilation => "dilation",
            Suite::Additivity => "additivity",
            Suite::Multiplicativity => "multiplicativity",
            Suite::Lemma31 => "lemma31",
            Suite::Domains => "domains",
            Suite::All => "all",
        }
    }
}

/// Check suites for amalgamated R- and S-transforms.
#[derive(Debug, Clone, Parser)]
#[command(name = "amalgam", version)]
pub struct Cli {
    /// Which suite to run.
    #[arg(value_enum)]
    pub suite: Suite,

    /// Ambient matrix dimension M.
    #[arg(long)]
    pub dim: Option<usize>,

    /// Block-tensor subalgebra (K×K blocks) ⊗ 1_D, given as KxD.
    #[arg(long, conflicts_with = "diag")]
    pub block: Option<String>,

    /// Diagonal subalgebra of dimension D.
    #[arg(long)]
    pub diag: Option<usize>,

    #[arg(long, default_value_t = 20)]
    pub trials: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Fixed-point tolerance; identity checks pass at 10·tol.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,

    /// Truncation order N of synthetic distributions.
    #[arg(long, default_value_t = 6)]
    pub order: usize,

    /// Fraction of the certified radius at which sample points are placed.
    #[arg(long, default_value_t = 0.5)]
    pub ball_fraction: f64,

    /// Replace free pairs by correlated pairs in the additivity and
    /// multiplicativity suites.
    #[arg(long)]
    pub negative_control: bool,

    /// Write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Include wall-clock time in the report (breaks byte-identical output).
    #[arg(long)]
    pub timing: bool,
}

/// Subalgebra choice for the matrix suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContextSpec {
    BlockTensor { k: usize, d: usize },
    Diagonal { m: usize },
}

impl ContextSpec {
    pub fn context(self) -> AlgebraContext {
        match self {
            ContextSpec::BlockTensor { k, d } => AlgebraContext::block_tensor(k, d),
            ContextSpec::Diagonal { m } => AlgebraContext::diagonal(m),
        }
    }

    /// Number of diagonal coordinates used by the distribution suites.
    pub fn diagonal_dim(self) -> usize {
        match self {
            ContextSpec::Diagonal { m } if m <= MAX_COORDS => m,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub suite: Suite,
    pub ambient_dim: usize,
    pub context: ContextSpec,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    pub order: usize,
    pub ball_fraction: f64,
    pub negative_control: bool,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub timing: bool,
}

impl RunConfig {
    /// Defaults for `suite`; equivalent to passing no options.
    pub fn new(suite: Suite) -> Self {
        RunConfig {
            suite,
            ambient_dim: 4,
            context: ContextSpec::BlockTensor { k: 2, d: 2 },
            trials: 20,
            seed: 0,
            tol: 1e-10,
            order: 6,
            ball_fraction: 0.5,
            negative_control: false,
            out: None,
            timing: false,
        }
    }

    /// Pass threshold for identity residuals.
    pub fn check_tol(&self) -> f64 {
        10.0 * self.tol
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.trials == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        if !(self.ball_fraction > 0.0 && self.ball_fraction <= 1.0) {
            return Err(CliError::Usage("--ball-fraction must lie in (0, 1]".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Usage("--tol must be positive".into()));
        }
        if self.order < 2 || self.order > MAX_ORDER {
            return Err(CliError::Usage(format!("--order must lie in 2..={MAX_ORDER}")));
        }
        if self.ambient_dim == 0 || self.ambient_dim > 16 {
            return Err(CliError::Usage("--dim must lie in 1..=16".into()));
        }
        Ok(())
    }
}

fn parse_block(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("--block expects KxD, got {s:?}"));
    let (k, d) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let k: usize = k.trim().parse().map_err(|_| bad())?;
    let d: usize = d.trim().parse().map_err(|_| bad())?;
    if k == 0 || d == 0 {
        return Err(bad());
    }
    Ok((k, d))
}

impl TryFrom<Cli> for RunConfig {
    type Error = CliError;

    fn try_from(cli: Cli) -> Result<Self, CliError> {
        let context = match (&cli.block, cli.diag, cli.dim) {
            (Some(b), _, dim) => {
                let (k, d) = parse_block(b)?;
                if dim.is_some_and(|m| m != k * d) {
                    return Err(CliError::Usage(format!("--dim {} does not equal K·D = {}", dim.unwrap(), k * d)));
                }
                ContextSpec::BlockTensor { k, d }
            }
            (None, Some(d), dim) => {
                if d == 0 || dim.is_some_and(|m| m != d) {
                    return Err(CliError::Usage("--diag D requires D ≥ 1 and --dim equal to D".into()));
                }
                ContextSpec::Diagonal { m: d }
            }
            (None, None, Some(m)) => ContextSpec::Diagonal { m },
            (None, None, None) => ContextSpec::BlockTensor { k: 2, d: 2 },
        };
        let ambient_dim = match context {
            ContextSpec::BlockTensor { k, d } => k * d,
            ContextSpec::Diagonal { m } => m,
        };
        let cfg = RunConfig {
            suite: cli.suite,
            ambient_dim,
            context,
            trials: cli.trials,
            seed: cli.seed,
            tol: cli.tol,
            order: cli.order,
            ball_fraction: cli.ball_fraction,
            negative_control: cli.negative_control,
            out: cli.out,
            timing: cli.timing,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig, CliError> {
        let cli = Cli::try_parse_from(std::iter::once("amalgam").chain(args.iter().copied()))
            .map_err(|e| CliError::Usage(e.to_string()))?;
        RunConfig::try_from(cli)
    }

    #[test]
    fn defaults() {
        let cfg = parse(&["rs"]).unwrap();
        assert_eq!(cfg, RunConfig::new(Suite::Rs));
    }

    #[test]
    fn context_options() {
        let cfg = parse(&["domains", "--block", "3x2"]).unwrap();
        assert_eq!(cfg.context, ContextSpec::BlockTensor { k: 3, d: 2 });
        assert_eq!(cfg.ambient_dim, 6);
        let cfg = parse(&["domains", "--diag", "5", "--dim", "5"]).unwrap();
        assert_eq!(cfg.context, ContextSpec::Diagonal { m: 5 });
        let cfg = parse(&["domains", "--dim", "3"]).unwrap();
        assert_eq!(cfg.context, ContextSpec::Diagonal { m: 3 });
    }

    #[test]
    fn usage_errors() {
        for args in [
            &["rs", "--block", "2x2", "--dim", "5"][..],
            &["rs", "--block", "2by2"],
            &["rs", "--trials", "0"],
            &["rs", "--ball-fraction", "1.5"],
            &["rs", "--ball-fraction", "0"],
            &["rs", "--order", "9"],
            &["rs", "--block", "2x2", "--diag", "2"],
            &["nonsense"],
        ] {
            assert!(matches!(parse(args), Err(CliError::Usage(_))), "{args:?}");
        }
    }
}
