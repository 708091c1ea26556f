use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

/// A skeleton of the additive category: generators over `p` and the bound `K`
/// on total multiplicity.
#[derive(Args, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeletonArgs {
    #[arg(long, default_value_t = 2)]
    pub p: u32,
    /// Generator groups, e.g. `--gens Z/2 --gens Z/4`.
    #[arg(long = "gens", default_values_t = ["Z/2".to_string()])]
    pub gens: Vec<String>,
    /// Bound on the total multiplicity of an object.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtMode {
    Full,
    Poly,
}

/// The computations, shared by the subcommands and by `run --config`.
#[derive(Subcommand, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "task", content = "params", rename_all = "kebab-case")]
pub enum Task {
    /// Graded pieces of the augmentation filtration of F_p[V].
    Sdim {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 10)]
        dmax: usize,
    },
    /// Pol_d(V) and its stationarity along V -> V/p^i.
    Pol {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        group: String,
        #[arg(long)]
        d: usize,
        /// Quotient levels to compare; defaults to every i with p^i > d up to the torsion exponent plus one.
        #[arg(long)]
        i: Vec<u32>,
    },
    /// Homology of the truncated Koszul complexes and the vanishing range n > p^r i.
    Koszul {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        group: String,
        #[arg(long, default_value_t = 8)]
        nmax: usize,
    },
    /// Polynomial degree by cross-effects.
    Degree {
        #[command(flatten)]
        skeleton: SkeletonArgs,
        #[arg(long)]
        functor: String,
        #[arg(long, default_value_t = 2)]
        dmax: usize,
    },
    /// Dimensions of q_d F and p_d F.
    Trunc {
        #[command(flatten)]
        skeleton: SkeletonArgs,
        #[arg(long)]
        functor: String,
        #[arg(long)]
        d: usize,
    },
    /// Ext^i(F, G) in the full truncated category or among degree <= d functors.
    Ext {
        #[command(flatten)]
        skeleton: SkeletonArgs,
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        #[arg(long, value_enum, default_value_t = ExtMode::Full)]
        mode: ExtMode,
        /// Degree bound for `--mode poly`.
        #[arg(long, default_value_t = 1)]
        d: usize,
        #[arg(long, default_value_t = 3)]
        imax: usize,
    },
    /// Ext_poly(d) -> Ext comparison: iso for i <= 1, mono for i = 2.
    Compare {
        #[command(flatten)]
        skeleton: SkeletonArgs,
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 2)]
        imax: usize,
        /// Also list the dimensions for every K from d+1 up to this bound.
        #[arg(long)]
        sweep: Option<usize>,
    },
    /// The Frobenius / norm / Verschiebung 2-extension of I by I.
    Excl {
        #[command(flatten)]
        skeleton: SkeletonArgs,
    },
    /// The generalized Dold-Puppe complex D^(n) F and its dual.
    Dold {
        #[command(flatten)]
        skeleton: SkeletonArgs,
        #[arg(long)]
        functor: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        imax: usize,
    },
    /// The full acceptance grid.
    VerifyAll {
        /// Run only these criteria (1-12).
        #[arg(long, value_delimiter = ',')]
        only: Vec<usize>,
    },
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Sdim { .. } => "sdim",
            Task::Pol { .. } => "pol",
            Task::Koszul { .. } => "koszul",
            Task::Degree { .. } => "degree",
            Task::Trunc { .. } => "trunc",
            Task::Ext { .. } => "ext",
            Task::Compare { .. } => "compare",
            Task::Excl { .. } => "excl",
            Task::Dold { .. } => "dold",
            Task::VerifyAll { .. } => "verify-all",
        }
    }
}

fn default_seed() -> u64 {
    7
}

/// Everything a run needs; the subcommands build one from their flags.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub task: Task,
    /// Where the JSON report goes; the text table is written next to it with a `.txt` extension.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    /// Seeds the sampling of (F, G) pairs only.
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }
}
