//! Command-line flags. Every flag overrides the matching config-file value.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nilrig::joinings::Provenance;

use crate::config::{Command, EstimatorChoice, Format, JoiningKind, RunConfig, SystemKind};

#[derive(Debug, Parser)]
#[command(name = "nilrig", version, about = "Nilsystem joinings and seminorm experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub action: Action,
}

#[derive(Debug, Subcommand)]
pub enum Action {
    /// List the orbit of the start point.
    Orbit(Overrides),
    /// Birkhoff averages against direct Haar integrals.
    Integrate(Overrides),
    /// Uniformity seminorm estimates.
    Seminorm(Overrides),
    /// Build one self-joining and report on it.
    Joining(Overrides),
    /// Graph family versus counterexample family near the diagonal.
    RigiditySweep(Overrides),
    /// Diameters over the subnilmanifold catalog.
    SubnilProbe(Overrides),
    /// Check a config for a command without running it.
    Validate {
        #[arg(value_enum)]
        target: Command,
        #[command(flatten)]
        overrides: Overrides,
    },
}

impl Action {
    pub fn parts(&self) -> (Command, &Overrides, bool) {
        match self {
            Action::Orbit(o) => (Command::Orbit, o, false),
            Action::Integrate(o) => (Command::Integrate, o, false),
            Action::Seminorm(o) => (Command::Seminorm, o, false),
            Action::Joining(o) => (Command::Joining, o, false),
            Action::RigiditySweep(o) => (Command::RigiditySweep, o, false),
            Action::SubnilProbe(o) => (Command::SubnilProbe, o, false),
            Action::Validate { target, overrides } => (*target, overrides, true),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scheme {
    OrbitPushforward,
    DirectHaar,
}

impl From<Scheme> for Provenance {
    fn from(s: Scheme) -> Self {
        match s {
            Scheme::OrbitPushforward => Provenance::OrbitPushforward,
            Scheme::DirectHaar => Provenance::DirectHaar,
        }
    }
}

#[derive(Clone, Debug, Default, Args)]
pub struct Overrides {
    /// TOML config file.
    #[arg(long)]
    pub config: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub system: Option<SystemKind>,
    #[arg(long)]
    pub dim: Option<u8>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<String>,
    /// Orbit start, comma-separated coordinate expressions.
    #[arg(long, value_delimiter = ',')]
    pub start: Option<Vec<String>>,

    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub scheme: Option<Scheme>,
    #[arg(long)]
    pub orbit_len: Option<usize>,

    /// Observable (`char:m1,..`, `vchar`, `const:c`, `bump`); repeatable.
    #[arg(long = "f")]
    pub f: Vec<String>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long, value_enum)]
    pub estimator: Option<EstimatorChoice>,
    #[arg(long)]
    pub n_outer: Option<usize>,
    #[arg(long)]
    pub n_base: Option<usize>,
    #[arg(long)]
    pub n_side: Option<usize>,
    #[arg(long)]
    pub n_mc: Option<usize>,
    #[arg(long)]
    pub budget: Option<f64>,

    #[arg(long, value_enum)]
    pub kind: Option<JoiningKind>,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub u: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub v: Option<Vec<String>>,

    #[arg(long, value_delimiter = ',')]
    pub u_grid: Option<Vec<String>>,
    #[arg(long, value_delimiter = ',')]
    pub s_grid: Option<Vec<String>>,
    #[arg(long)]
    pub u_star: Option<String>,

    #[arg(long)]
    pub sample_count: Option<usize>,
    #[arg(long)]
    pub n_translates: Option<usize>,

    #[arg(long)]
    pub bin_size: Option<f64>,
    #[arg(long)]
    pub min_count: Option<usize>,
    #[arg(long)]
    pub max_freq: Option<i32>,
    #[arg(long)]
    pub terms: Option<usize>,
    #[arg(long)]
    pub gamma_window: Option<u32>,
    #[arg(long)]
    pub n_ref: Option<usize>,

    /// Output directory (default: $NILRIG_OUT_DIR).
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_enum, value_delimiter = ',')]
    pub format: Option<Vec<Format>>,
    #[arg(long)]
    pub name: Option<String>,
}

macro_rules! set {
    ($src:expr => $dst:expr) => {
        if let Some(v) = $src.clone() {
            $dst = v;
        }
    };
    ($src:expr => some $dst:expr) => {
        if let Some(v) = $src.clone() {
            $dst = Some(v);
        }
    };
}

impl Overrides {
    pub fn apply(&self, c: &mut RunConfig) {
        set!(self.system => c.system.kind);
        set!(self.dim => c.system.dim);
        set!(self.alpha => c.system.alpha);
        set!(self.beta => c.system.beta);
        set!(self.gamma => c.system.gamma);
        set!(self.start => some c.system.start);
        set!(self.n => c.sampling.n);
        set!(self.seed => c.sampling.seed);
        if let Some(s) = self.scheme {
            c.sampling.scheme = s.into();
        }
        set!(self.orbit_len => c.sampling.orbit_len);
        if !self.f.is_empty() {
            c.seminorm.f = self.f.clone();
        }
        set!(self.k => c.seminorm.k);
        set!(self.estimator => c.seminorm.estimator);
        set!(self.n_outer => some c.seminorm.n_outer);
        set!(self.n_base => some c.seminorm.n_base);
        set!(self.n_side => some c.seminorm.n_side);
        set!(self.n_mc => some c.seminorm.n_mc);
        set!(self.budget => c.seminorm.budget);
        set!(self.kind => c.joining.kind);
        set!(self.s => c.joining.s);
        set!(self.u => c.joining.u);
        set!(self.v => c.joining.v);
        set!(self.u_grid => c.sweep.u_grid);
        set!(self.s_grid => c.sweep.s_grid);
        set!(self.u_star => c.sweep.u_star);
        set!(self.sample_count => c.subnil.sample_count);
        set!(self.n_translates => c.subnil.n_translates);
        set!(self.bin_size => c.thresholds.bin_size);
        set!(self.min_count => c.thresholds.min_count);
        set!(self.max_freq => c.thresholds.max_freq);
        set!(self.terms => c.thresholds.terms);
        set!(self.gamma_window => c.thresholds.gamma_window);
        set!(self.n_ref => some c.thresholds.n_ref);
        set!(self.out_dir => some c.output.dir);
        set!(self.format => c.output.formats);
        set!(self.name => some c.output.name);
    }
}
