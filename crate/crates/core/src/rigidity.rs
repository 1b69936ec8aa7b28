//! Experiments: the graph/non-graph dichotomy near the diagonal joining and
//! the diameter probe for small subnilmanifolds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::joinings::{
    analyze, counterexample_joining, diagonal_joining, graph_joining, weakstar_dist, AnalysisConfig,
    Classification, JoiningReport, PointMap, Provenance,
};
use crate::nilgroup::{dist_canonical, frac, haar_sample, reduce, GroupElement, MetricConfig, NilPoint, Space};
use crate::par;
use crate::systems::{default_shear, vertical_rotate, NilSystem};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SubnilKind {
    /// `W = G_2·e_X`, the circle of central elements.
    CentralFiber,
    /// Closed one-parameter subgroup orbit with horizontal direction `(q1, q2)`.
    Subtorus { q1: i32, q2: i32 },
    TranslatedCentralFiber { base: NilPoint },
    Singleton { point: NilPoint },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubnilDescriptor {
    pub space: Space,
    pub kind: SubnilKind,
    pub sample_count: usize,
}

fn gcd(a: i32, b: i32) -> i32 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl SubnilDescriptor {
    pub fn central_fiber(sample_count: usize) -> Self {
        Self {
            space: Space::Heisenberg,
            kind: SubnilKind::CentralFiber,
            sample_count,
        }
    }

    pub fn subtorus(space: Space, q1: i32, q2: i32, sample_count: usize) -> Self {
        Self {
            space,
            kind: SubnilKind::Subtorus { q1, q2 },
            sample_count,
        }
    }

    pub fn translated_central_fiber(base: NilPoint, sample_count: usize) -> Self {
        Self {
            space: Space::Heisenberg,
            kind: SubnilKind::TranslatedCentralFiber { base },
            sample_count,
        }
    }

    pub fn singleton(point: NilPoint) -> Self {
        Self {
            space: point.space(),
            kind: SubnilKind::Singleton { point },
            sample_count: 1,
        }
    }

    pub fn is_singleton(&self) -> bool {
        matches!(self.kind, SubnilKind::Singleton { .. })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        match &self.kind {
            SubnilKind::Singleton { point } => {
                if point.space() != self.space {
                    return Err(Error::SpaceMismatch {
                        expected: self.space,
                        found: point.space(),
                    });
                }
                return Ok(());
            }
            SubnilKind::CentralFiber | SubnilKind::TranslatedCentralFiber { .. } if !self.space.is_heisenberg() => {
                return bad(format!("central fibers live on the Heisenberg manifold, not {}", self.space));
            }
            SubnilKind::TranslatedCentralFiber { base } if base.space() != Space::Heisenberg => {
                return bad("translation base must be a Heisenberg point".into());
            }
            SubnilKind::Subtorus { q1, q2 } => {
                if gcd(*q1, *q2) != 1 {
                    return bad(format!("subtorus ({q1}, {q2}) needs gcd(q1, q2) = 1"));
                }
                if !matches!(self.space, Space::Heisenberg | Space::Torus(2)) {
                    return bad(format!("subtorus (q1, q2) needs a 2-dimensional horizontal torus, got {}", self.space));
                }
            }
            _ => {}
        }
        if self.sample_count < 2 {
            return bad(format!("sample_count must be >= 2, got {}", self.sample_count));
        }
        Ok(())
    }

    /// Parameter period of the curve traced by [`SubnilDescriptor::point_at`].
    fn period(&self) -> f64 {
        match self.kind {
            // exp(t(q1, q2, 0)) = (t·q1, t·q2, t²·q1·q2/2) returns to Γ at
            // t = 1 only when q1·q2 is even.
            SubnilKind::Subtorus { q1, q2 } if self.space.is_heisenberg() && (q1 * q2) % 2 != 0 => 2.0,
            _ => 1.0,
        }
    }

    fn point_at(&self, t: f64) -> NilPoint {
        match &self.kind {
            SubnilKind::CentralFiber => vertical_rotate(&Space::Heisenberg.base_point(), frac(t)),
            SubnilKind::TranslatedCentralFiber { base } => vertical_rotate(base, frac(t)),
            SubnilKind::Subtorus { q1, q2 } => {
                let (a, b) = (t * *q1 as f64, t * *q2 as f64);
                match self.space {
                    Space::Heisenberg => reduce(GroupElement::new(a, b, 0.5 * t * t * (*q1 * *q2) as f64)),
                    _ => NilPoint::new(self.space, &[frac(a), frac(b)]).expect("fractional parts are canonical"),
                }
            }
            SubnilKind::Singleton { point } => *point,
        }
    }

    /// Points on a jittered uniform grid of the parameter circle.
    pub fn sample(&self, seed: u64) -> Result<Vec<NilPoint>> {
        self.validate()?;
        if let SubnilKind::Singleton { point } = &self.kind {
            return Ok(vec![*point]);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.sample_count;
        let period = self.period();
        Ok((0..n)
            .map(|j| {
                let t = (j as f64 + rng.random::<f64>()) / n as f64;
                self.point_at(t * period)
            })
            .collect())
    }
}

/// Largest pairwise distance among sampled points.
pub fn subnil_diameter(desc: &SubnilDescriptor, cfg: &MetricConfig, seed: u64) -> Result<f64> {
    cfg.validate()?;
    let pts = desc.sample(seed)?;
    let rows = par::map_indexed(pts.len(), |i| {
        pts[i + 1..]
            .iter()
            .map(|q| dist_canonical(&pts[i], q, cfg))
            .fold(0.0, f64::max)
    });
    Ok(rows.into_iter().fold(0.0, f64::max))
}

/// Minimum diameter over a family of non-trivial subnilmanifolds.
pub fn min_subnil_diameter(family: &[SubnilDescriptor], cfg: &MetricConfig, seed: u64) -> Result<f64> {
    if family.is_empty() {
        return Err(Error::InvalidArgument("empty subnilmanifold family".into()));
    }
    if family.iter().any(SubnilDescriptor::is_singleton) {
        return Err(Error::InvalidArgument(
            "the family must consist of non-trivial subnilmanifolds (singleton given)".into(),
        ));
    }
    let mut best = f64::INFINITY;
    for d in family {
        best = best.min(subnil_diameter(d, cfg, seed)?);
    }
    Ok(best)
}

/// Primitive directions with `‖q‖_∞ ≤ bound`, first nonzero entry positive.
pub fn primitive_directions(bound: i32) -> Vec<(i32, i32)> {
    let mut out = Vec::new();
    for q1 in 0..=bound {
        for q2 in -bound..=bound {
            if gcd(q1, q2) == 1 && (q1 > 0 || q2 > 0) {
                out.push((q1, q2));
            }
        }
    }
    out
}

/// Central fiber, its translates by `n_translates` Haar points, and the
/// rational subtori `‖q‖_∞ ≤ 10` of both the Heisenberg manifold and the
/// 2-torus, each sampled at `sample_count` points.
pub fn default_catalog(sample_count: usize, n_translates: usize, seed: u64) -> Vec<SubnilDescriptor> {
    let mut out = vec![SubnilDescriptor::central_fiber(sample_count)];
    for base in haar_sample(Space::Heisenberg, n_translates, seed) {
        out.push(SubnilDescriptor::translated_central_fiber(base, sample_count));
    }
    for space in [Space::Heisenberg, Space::Torus(2)] {
        for (q1, q2) in primitive_directions(10) {
            out.push(SubnilDescriptor::subtorus(space, q1, q2, sample_count));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    /// `u` for the graph family, `s` for the counterexample family.
    pub param: f64,
    pub report: JoiningReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub u_grid: Vec<f64>,
    pub s_grid: Vec<f64>,
    pub n: usize,
    pub seed: u64,
    pub scheme: Provenance,
    /// Graph-family parameters `u ≤ u_star` enter the margin comparison.
    pub u_star: f64,
    pub analysis: AnalysisConfig,
}

impl SweepConfig {
    /// `u ∈ {2^{-1}, …, 2^{-8}}`, `s = √5 − 2`, `n = 10⁵`, direct Haar sampling.
    pub fn standard(sys: &NilSystem) -> Self {
        Self {
            u_grid: (1..=8).map(|k| 0.5f64.powi(k)).collect(),
            s_grid: vec![default_shear()],
            n: 100_000,
            seed: 0,
            scheme: Provenance::DirectHaar,
            u_star: 0.0625,
            analysis: AnalysisConfig::standard(sys, 100_000),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub graph_family: Vec<SweepRecord>,
    pub nongraph_family: Vec<SweepRecord>,
    /// Minimum `dist_to_diagonal` over the joinings classified non-graph.
    pub delta_hat: Option<f64>,
    /// Largest `u` classified graph-like.
    pub neighborhood_u: Option<f64>,
    pub u_star: f64,
    /// Largest `dist_to_diagonal` over graph-like joinings with `u ≤ u_star`.
    pub max_graph_dist: Option<f64>,
    /// `delta_hat − max_graph_dist`.
    pub margin: Option<f64>,
    /// Largest weak-* distance between two seeds of the same joining.
    pub noise: f64,
    pub all_classified: bool,
    pub separated: bool,
    pub margin_exceeds_twice_noise: bool,
}

/// Builds `λ_u` for every `u` and the counterexample for every `s`, reports
/// each against the diagonal, and summarizes the gap between the families.
///
/// The dichotomy is only probed over these two families of joinings.
pub fn rigidity_sweep(sys: &NilSystem, cfg: &SweepConfig) -> Result<RigidityReport> {
    if cfg.u_grid.is_empty() || cfg.s_grid.is_empty() {
        return Err(Error::InvalidArgument("sweep grids must be nonempty".into()));
    }
    if !sys.space.is_heisenberg() {
        return Err(Error::SpaceMismatch {
            expected: Space::Heisenberg,
            found: sys.space,
        });
    }
    sys.require_ergodic()?;
    for &s in &cfg.s_grid {
        crate::joinings::certify_shear(sys, s)?;
    }
    let a = &cfg.analysis;
    let diag = diagonal_joining(sys, cfg.n, cfg.scheme, cfg.seed)?;

    let mut graph_family = Vec::with_capacity(cfg.u_grid.len());
    for &u in &cfg.u_grid {
        let m = graph_joining(sys, PointMap::VerticalRotation(u), cfg.n, cfg.scheme, cfg.seed)?;
        graph_family.push(SweepRecord {
            param: u,
            report: analyze(&m, &diag, &sys.metric, a)?,
        });
    }
    let mut nongraph_family = Vec::with_capacity(cfg.s_grid.len());
    for &s in &cfg.s_grid {
        let m = counterexample_joining(sys, s, cfg.n, cfg.scheme, cfg.seed)?;
        nongraph_family.push(SweepRecord {
            param: s,
            report: analyze(&m, &diag, &sys.metric, a)?,
        });
    }

    // Seed-to-seed fluctuation of the two reference joinings.
    let alt = cfg.seed.wrapping_add(1);
    let mut noise = weakstar_dist(&diag, &diagonal_joining(sys, cfg.n, Provenance::DirectHaar, alt)?, &a.family)?;
    let s0 = cfg.s_grid[0];
    let ce = counterexample_joining(sys, s0, cfg.n, cfg.scheme, cfg.seed)?;
    let ce_alt = counterexample_joining(sys, s0, cfg.n, Provenance::DirectHaar, alt)?;
    noise = noise.max(weakstar_dist(&ce, &ce_alt, &a.family)?);

    let delta_hat = nongraph_family
        .iter()
        .filter(|r| r.report.classification == Classification::NonGraph)
        .map(|r| r.report.dist_to_diagonal)
        .reduce(f64::min);
    let graph_like = |r: &&SweepRecord| r.report.classification == Classification::GraphLike;
    let neighborhood_u = graph_family.iter().filter(graph_like).map(|r| r.param).reduce(f64::max);
    let max_graph_dist = graph_family
        .iter()
        .filter(graph_like)
        .filter(|r| r.param <= cfg.u_star)
        .map(|r| r.report.dist_to_diagonal)
        .reduce(f64::max);
    let margin = match (delta_hat, max_graph_dist) {
        (Some(d), Some(g)) => Some(d - g),
        _ => None,
    };
    let all_classified = graph_family
        .iter()
        .chain(&nongraph_family)
        .all(|r| r.report.classification != Classification::Indeterminate);
    Ok(RigidityReport {
        delta_hat,
        neighborhood_u,
        u_star: cfg.u_star,
        max_graph_dist,
        margin,
        noise,
        all_classified,
        separated: margin.is_some_and(|m| m > 0.0),
        margin_exceeds_twice_noise: margin.is_some_and(|m| m >= 2.0 * noise),
        graph_family,
        nongraph_family,
    })
}
