//! Run configuration: TOML sections, defaults, flag overrides, resolution of
//! parameter expressions, and validation diagnostics.

use std::path::PathBuf;

use nilrig::joinings::{AnalysisConfig, GraphnessConfig, Provenance, TestFunctionFamily, Thresholds};
use nilrig::seminorms::{CostGuard, MAX_K};
use nilrig::{Error as CoreError, MetricConfig, NilSystem, Observable, Space};
use serde::{Deserialize, Serialize};

use crate::expr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Orbit,
    Integrate,
    Seminorm,
    Joining,
    RigiditySweep,
    SubnilProbe,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Orbit => "orbit",
            Command::Integrate => "integrate",
            Command::Seminorm => "seminorm",
            Command::Joining => "joining",
            Command::RigiditySweep => "rigidity-sweep",
            Command::SubnilProbe => "subnil-probe",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    Heisenberg,
    Torus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SystemSection {
    pub kind: SystemKind,
    /// Torus dimension (1 or 2); ignored for the Heisenberg system.
    pub dim: u8,
    pub alpha: String,
    pub beta: String,
    pub gamma: String,
    /// Orbit start as three coordinate expressions; `e_X` when absent.
    pub start: Option<Vec<String>>,
}

impl Default for SystemSection {
    fn default() -> Self {
        Self {
            kind: SystemKind::Heisenberg,
            dim: 1,
            alpha: "sqrt(2)-1".into(),
            beta: "sqrt(3)-1".into(),
            gamma: "0".into(),
            start: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplingSection {
    pub n: usize,
    pub seed: u64,
    pub scheme: Provenance,
    /// Number of orbit points listed by `orbit`.
    pub orbit_len: usize,
}

impl Default for SamplingSection {
    fn default() -> Self {
        Self {
            n: 100_000,
            seed: 0,
            scheme: Provenance::DirectHaar,
            orbit_len: 1000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum EstimatorChoice {
    Recursive,
    Cube,
    Both,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SeminormSection {
    /// Observables for `seminorm` and `integrate`; the standard battery of
    /// the system when empty.
    pub f: Vec<String>,
    pub k: u32,
    pub estimator: EstimatorChoice,
    pub n_outer: Option<usize>,
    pub n_base: Option<usize>,
    pub n_side: Option<usize>,
    pub n_mc: Option<usize>,
    pub budget: f64,
}

impl Default for SeminormSection {
    fn default() -> Self {
        Self {
            f: Vec::new(),
            k: 2,
            estimator: EstimatorChoice::Both,
            n_outer: None,
            n_base: None,
            n_side: None,
            n_mc: None,
            budget: CostGuard::default().max_evals,
        }
    }
}

/// Averaging lengths used when the config leaves them unset.
pub fn default_lengths(k: u32) -> (usize, usize, usize, usize) {
    match k {
        0..=2 => (1000, 100_000, 512, 256),
        _ => (100, 20_000, 64, 200),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum JoiningKind {
    Diagonal,
    Vertical,
    Translation,
    Counterexample,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JoiningSection {
    pub kind: JoiningKind,
    pub s: String,
    pub u: String,
    /// Translation vector for `kind = "translation"` on a torus.
    pub v: Vec<String>,
}

impl Default for JoiningSection {
    fn default() -> Self {
        Self {
            kind: JoiningKind::Counterexample,
            s: "sqrt(5)-2".into(),
            u: "2^-4".into(),
            v: vec!["sqrt(2)/2".into(), "1/3".into()],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepSection {
    pub u_grid: Vec<String>,
    pub s_grid: Vec<String>,
    pub u_star: String,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            u_grid: (1..=8).map(|k| format!("2^-{k}")).collect(),
            s_grid: vec!["sqrt(5)-2".into()],
            u_star: "2^-4".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SubnilSection {
    pub sample_count: usize,
    pub n_translates: usize,
}

impl Default for SubnilSection {
    fn default() -> Self {
        Self {
            sample_count: 1000,
            n_translates: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThresholdSection {
    pub bin_size: f64,
    pub min_count: usize,
    pub max_per_bin: usize,
    pub min_bins: usize,
    /// Graph-like when graphness ≤ graph_factor·bin_size.
    pub graph_factor: f64,
    /// Non-graph when graphness ≥ nongraph_factor·diam(W).
    pub nongraph_factor: f64,
    pub max_freq: i32,
    pub terms: usize,
    pub gamma_window: u32,
    /// Haar reference cloud for marginal errors; `n` when absent.
    pub n_ref: Option<usize>,
}

impl Default for ThresholdSection {
    fn default() -> Self {
        let g = GraphnessConfig::default();
        let fam = TestFunctionFamily::default();
        Self {
            bin_size: g.bin_size,
            min_count: g.min_count,
            max_per_bin: g.max_per_bin,
            min_bins: g.min_bins,
            graph_factor: 3.0,
            nongraph_factor: 0.5,
            max_freq: fam.max_freq,
            terms: fam.terms,
            gamma_window: MetricConfig::default().gamma_window,
            n_ref: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputSection {
    /// Falls back to `$NILRIG_OUT_DIR`; no files are written when neither
    /// is set.
    pub dir: Option<PathBuf>,
    pub formats: Vec<Format>,
    /// File stem; the command name when absent.
    pub name: Option<String>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: None,
            formats: vec![Format::Json, Format::Csv, Format::Svg],
            name: None,
        }
    }
}

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "NILRIG_OUT_DIR";

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub command: Option<Command>,
    pub system: SystemSection,
    pub sampling: SamplingSection,
    pub seminorm: SeminormSection,
    pub joining: JoiningSection,
    pub sweep: SweepSection,
    pub subnil: SubnilSection,
    pub thresholds: ThresholdSection,
    pub output: OutputSection,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticKind {
    Syntax,
    UnknownField,
    Invalid,
    Certification,
    Budget,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub field: String,
    pub message: String,
}

impl Diagnostic {
    fn new(kind: DiagnosticKind, field: &str, message: impl Into<String>) -> Self {
        Self {
            kind,
            field: field.to_string(),
            message: message.into(),
        }
    }
}

/// Parses a TOML config. Unknown keys are collected as diagnostics instead
/// of aborting the parse.
pub fn parse_toml(text: &str) -> Result<(RunConfig, Vec<Diagnostic>), Diagnostic> {
    let mut unknown = Vec::new();
    let de = toml::Deserializer::parse(text)
        .map_err(|e| Diagnostic::new(DiagnosticKind::Syntax, "", e.to_string()))?;
    let cfg: RunConfig = serde_ignored::deserialize(de, |path| unknown.push(path.to_string()))
        .map_err(|e: toml::de::Error| Diagnostic::new(DiagnosticKind::Syntax, "", e.to_string()))?;
    let diags = unknown
        .into_iter()
        .map(|p| Diagnostic::new(DiagnosticKind::UnknownField, &p, format!("unknown field '{p}'")))
        .collect();
    Ok((cfg, diags))
}

/// A config with every expression evaluated and every default filled in.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub command: Command,
    pub system: NilSystem,
    pub start: nilrig::NilPoint,
    pub observables: Vec<Observable>,
    pub n_outer: usize,
    pub n_base: usize,
    pub n_side: usize,
    pub n_mc: usize,
    pub guard: CostGuard,
    pub s: f64,
    pub u: f64,
    pub v: Vec<f64>,
    pub u_grid: Vec<f64>,
    pub s_grid: Vec<f64>,
    pub u_star: f64,
    pub analysis: AnalysisConfig,
}

/// Standard observable battery for `integrate` and `seminorm`.
pub fn default_battery(space: Space) -> Vec<String> {
    match space {
        Space::Heisenberg => vec!["const:1", "char:1,0,0", "char:0,1,0", "vchar", "bump"],
        Space::Torus(1) => vec!["const:1", "char:1", "char:2", "bump"],
        Space::Torus(_) => vec!["const:1", "char:1,0", "char:0,1", "char:1,1", "bump"],
    }
    .into_iter()
    .map(String::from)
    .collect()
}

struct Checker {
    diags: Vec<Diagnostic>,
}

impl Checker {
    fn expr(&mut self, field: &str, text: &str) -> f64 {
        match expr::eval(text) {
            Ok(v) => v,
            Err(e) => {
                self.push(DiagnosticKind::Invalid, field, e.to_string());
                f64::NAN
            }
        }
    }

    fn push(&mut self, kind: DiagnosticKind, field: &str, message: impl Into<String>) {
        self.diags.push(Diagnostic::new(kind, field, message));
    }

    fn core(&mut self, field: &str, e: CoreError) {
        let kind = match e {
            CoreError::Budget(_) => DiagnosticKind::Budget,
            CoreError::Uncertified { .. } => DiagnosticKind::Certification,
            _ => DiagnosticKind::Invalid,
        };
        self.push(kind, field, e.to_string());
    }
}

/// Resolves `cfg` for `command`, returning every violation found.
pub fn resolve(cfg: &RunConfig, command: Command) -> Result<Resolved, Vec<Diagnostic>> {
    let mut ck = Checker { diags: Vec::new() };
    let sys_cfg = &cfg.system;

    let alpha = ck.expr("system.alpha", &sys_cfg.alpha);
    let beta = ck.expr("system.beta", &sys_cfg.beta);
    let gamma = ck.expr("system.gamma", &sys_cfg.gamma);
    let mut system = match sys_cfg.kind {
        SystemKind::Heisenberg => {
            let mut s = NilSystem::heisenberg(alpha, beta, gamma);
            s.certificate.labels = vec!["1".into(), sys_cfg.alpha.clone(), sys_cfg.beta.clone()];
            s
        }
        SystemKind::Torus => {
            if !(1..=2).contains(&sys_cfg.dim) {
                ck.push(DiagnosticKind::Invalid, "system.dim", format!("torus dimension must be 1 or 2, got {}", sys_cfg.dim));
            }
            let shift = [alpha, beta];
            let d = sys_cfg.dim.clamp(1, 2) as usize;
            let mut s = NilSystem::torus(&shift[..d]).expect("dimension is 1 or 2");
            for (i, label) in [&sys_cfg.alpha, &sys_cfg.beta].into_iter().take(d).enumerate() {
                s.certificate.labels[i + 1] = label.clone();
            }
            s
        }
    };
    let th = &cfg.thresholds;
    system.metric = MetricConfig {
        gamma_window: th.gamma_window,
    };
    if let Err(e) = system.metric.validate() {
        ck.core("thresholds.gamma_window", e);
    }
    if ck.diags.is_empty() {
        if let Err(e) = system.require_ergodic() {
            ck.core("system", e);
        }
    }
    let space = system.space;

    let start = match &sys_cfg.start {
        None => space.base_point(),
        Some(v) => {
            let c: Vec<f64> = v.iter().map(|t| ck.expr("system.start", t)).collect();
            match nilrig::NilPoint::new(space, &c) {
                Ok(p) => p,
                Err(e) => {
                    ck.core("system.start", e);
                    space.base_point()
                }
            }
        }
    };

    let f_src = if cfg.seminorm.f.is_empty() {
        default_battery(space)
    } else {
        cfg.seminorm.f.clone()
    };
    let mut observables = Vec::new();
    for src in &f_src {
        match Observable::parse(src).and_then(|f| f.check_space(space).map(|_| f)) {
            Ok(f) => observables.push(f),
            Err(e) => ck.core("seminorm.f", e),
        }
    }

    let sm = &cfg.seminorm;
    let (d_outer, d_base, d_side, d_mc) = default_lengths(sm.k);
    let n_outer = sm.n_outer.unwrap_or(d_outer);
    let n_base = sm.n_base.unwrap_or(d_base);
    let n_side = sm.n_side.unwrap_or(d_side);
    let n_mc = sm.n_mc.unwrap_or(d_mc);
    let guard = CostGuard { max_evals: sm.budget };
    if command == Command::Seminorm {
        if sm.k == 0 {
            ck.push(DiagnosticKind::Invalid, "seminorm.k", "k must be >= 1");
        } else if sm.k > MAX_K {
            ck.push(DiagnosticKind::Budget, "seminorm.k", format!("k = {} exceeds the ceiling k <= {MAX_K}", sm.k));
        } else if sm.k >= 2 {
            let k = sm.k as i32;
            if matches!(sm.estimator, EstimatorChoice::Recursive | EstimatorChoice::Both) {
                let cost = (n_outer as f64).powi(k - 1) * n_base as f64;
                if cost > guard.max_evals {
                    ck.push(
                        DiagnosticKind::Budget,
                        "seminorm",
                        format!("recursive estimate needs {cost:.3e} evaluations, budget is {:.3e}", guard.max_evals),
                    );
                }
            }
            if matches!(sm.estimator, EstimatorChoice::Cube | EstimatorChoice::Both) {
                let cost = (n_side as f64).powi(k) * n_mc as f64 * 2f64.powi(k);
                if cost > guard.max_evals {
                    ck.push(
                        DiagnosticKind::Budget,
                        "seminorm",
                        format!("cube estimate needs {cost:.3e} evaluations, budget is {:.3e}", guard.max_evals),
                    );
                }
            }
        }
    }

    let jn = &cfg.joining;
    let s = ck.expr("joining.s", &jn.s);
    let u = ck.expr("joining.u", &jn.u);
    let v: Vec<f64> = jn.v.iter().map(|t| ck.expr("joining.v", t)).collect();
    let sweep = &cfg.sweep;
    let u_grid: Vec<f64> = sweep.u_grid.iter().map(|t| ck.expr("sweep.u_grid", t)).collect();
    let s_grid: Vec<f64> = sweep.s_grid.iter().map(|t| ck.expr("sweep.s_grid", t)).collect();
    let u_star = ck.expr("sweep.u_star", &sweep.u_star);

    let needs_heisenberg = match command {
        Command::Joining => jn.kind != JoiningKind::Diagonal && jn.kind != JoiningKind::Translation,
        Command::RigiditySweep => true,
        _ => false,
    };
    if needs_heisenberg && !space.is_heisenberg() {
        ck.push(DiagnosticKind::Invalid, "system.kind", format!("{} needs the Heisenberg system", command.name()));
    }
    if command == Command::Joining && jn.kind == JoiningKind::Translation {
        if space.is_heisenberg() {
            ck.push(
                DiagnosticKind::Invalid,
                "joining.kind",
                "translation joinings are only offered on tori (they must commute with T)",
            );
        } else if v.len() != space.dim() {
            ck.push(DiagnosticKind::Invalid, "joining.v", format!("translation needs {} components", space.dim()));
        }
    }
    let shears: Vec<(&str, f64)> = match command {
        Command::Joining if jn.kind == JoiningKind::Counterexample => vec![("joining.s", s)],
        Command::RigiditySweep => s_grid.iter().map(|&x| ("sweep.s_grid", x)).collect(),
        _ => Vec::new(),
    };
    if space.is_heisenberg() {
        for (field, val) in shears {
            if val.is_finite() {
                if let Err(e) = nilrig::joinings::certify_shear(&system, val) {
                    ck.core(field, e);
                }
            }
        }
    }
    if command == Command::RigiditySweep && (u_grid.is_empty() || s_grid.is_empty()) {
        ck.push(DiagnosticKind::Invalid, "sweep", "u_grid and s_grid must be nonempty");
    }

    let n = cfg.sampling.n;
    if n == 0 {
        ck.push(DiagnosticKind::Invalid, "sampling.n", "n must be >= 1");
    }
    let graphness = GraphnessConfig {
        bin_size: th.bin_size,
        min_count: th.min_count,
        max_per_bin: th.max_per_bin,
        min_bins: th.min_bins,
    };
    if let Err(e) = graphness.validate() {
        ck.core("thresholds", e);
    }
    let family = match TestFunctionFamily::new(th.max_freq, th.terms) {
        Ok(f) => f,
        Err(e) => {
            ck.core("thresholds", e);
            TestFunctionFamily::default()
        }
    };
    if cfg.subnil.sample_count < 2 {
        ck.push(DiagnosticKind::Invalid, "subnil.sample_count", "sample_count must be >= 2");
    }
    if cfg.sampling.orbit_len == 0 {
        ck.push(DiagnosticKind::Invalid, "sampling.orbit_len", "orbit_len must be >= 1");
    }

    if !ck.diags.is_empty() {
        return Err(ck.diags);
    }
    let fiber = nilrig::joinings::fiber_reference(space, &system.metric);
    let analysis = AnalysisConfig {
        family,
        thresholds: Thresholds {
            graph_like_max: th.graph_factor * th.bin_size,
            non_graph_min: th.nongraph_factor * fiber,
        },
        graphness,
        n_ref: th.n_ref.unwrap_or(n),
    };
    Ok(Resolved {
        command,
        system,
        start,
        observables,
        n_outer,
        n_base,
        n_side,
        n_mc,
        guard,
        s,
        u,
        v,
        u_grid,
        s_grid,
        u_star,
        analysis,
    })
}

/// All violations in `cfg` for `command` (empty when it would run).
pub fn validate(cfg: &RunConfig, command: Command) -> Vec<Diagnostic> {
    match resolve(cfg, command) {
        Ok(_) => Vec::new(),
        Err(d) => d,
    }
}
