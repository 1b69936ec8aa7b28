//! Self-joinings as empirical measures on `X × X`.
//!
//! A joining is stored as `n` equally weighted pairs of canonical points,
//! produced either along an orbit (unique ergodicity supplies the limit) or
//! from direct Haar samples. Measures are compared through a weighted sum
//! of character integrals, see [`TestFunctionFamily`].

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nilgroup::{dist_canonical, haar_sample, GroupElement, MetricConfig, NilPoint, Space};
use crate::par::{self, ComplexKahan};
use crate::systems::{circle_rotate, vertical_rotate, NilSystem, RELATION_HEIGHT, RELATION_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    OrbitPushforward,
    DirectHaar,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Support {
    Single(Vec<NilPoint>),
    Pairs(Vec<(NilPoint, NilPoint)>),
}

/// Uniformly weighted point cloud on `X` or `X × X`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeasure {
    pub space: Space,
    pub support: Support,
    pub provenance: Provenance,
    pub seed: Option<u64>,
}

impl EmpiricalMeasure {
    pub fn single(space: Space, points: Vec<NilPoint>, provenance: Provenance, seed: Option<u64>) -> Result<Self> {
        for p in &points {
            check_point(space, p)?;
        }
        Ok(Self {
            space,
            support: Support::Single(points),
            provenance,
            seed,
        })
    }

    pub fn pairs(
        space: Space,
        pairs: Vec<(NilPoint, NilPoint)>,
        provenance: Provenance,
        seed: Option<u64>,
    ) -> Result<Self> {
        for (p, q) in &pairs {
            check_point(space, p)?;
            check_point(space, q)?;
        }
        Ok(Self {
            space,
            support: Support::Pairs(pairs),
            provenance,
            seed,
        })
    }

    pub fn n(&self) -> usize {
        match &self.support {
            Support::Single(v) => v.len(),
            Support::Pairs(v) => v.len(),
        }
    }

    pub fn is_pairs(&self) -> bool {
        matches!(self.support, Support::Pairs(_))
    }

    /// Coordinates per sample: `dim` or `2·dim`.
    pub fn width(&self) -> usize {
        self.space.dim() * if self.is_pairs() { 2 } else { 1 }
    }

    fn row(&self, i: usize, out: &mut [f64; 6]) {
        let d = self.space.dim();
        match &self.support {
            Support::Single(v) => out[..d].copy_from_slice(v[i].coords()),
            Support::Pairs(v) => {
                out[..d].copy_from_slice(v[i].0.coords());
                out[d..2 * d].copy_from_slice(v[i].1.coords());
            }
        }
    }

    /// Projection onto the first (`which = 1`) or second coordinate.
    pub fn marginal(&self, which: u8) -> Result<EmpiricalMeasure> {
        let Support::Pairs(v) = &self.support else {
            return Err(Error::InvalidArgument("marginal of a measure on X".into()));
        };
        let pts = match which {
            1 => v.iter().map(|p| p.0).collect(),
            2 => v.iter().map(|p| p.1).collect(),
            _ => return Err(Error::InvalidArgument(format!("marginal index must be 1 or 2, got {which}"))),
        };
        Ok(EmpiricalMeasure {
            space: self.space,
            support: Support::Single(pts),
            provenance: self.provenance,
            seed: self.seed,
        })
    }

    /// `∫ f dm` as the uniform average over the support.
    pub fn integrate<F>(&self, f: F) -> Complex64
    where
        F: Fn(&[f64]) -> Complex64 + Sync + Send,
    {
        let w = self.width();
        par::complex_mean(self.n(), |i| {
            let mut row = [0.0; 6];
            self.row(i, &mut row);
            f(&row[..w])
        })
    }
}

fn check_point(space: Space, p: &NilPoint) -> Result<()> {
    if p.space() != space {
        return Err(Error::SpaceMismatch {
            expected: space,
            found: p.space(),
        });
    }
    if !p.is_canonical() {
        return Err(Error::NonCanonical {
            coords: p.coords().to_vec(),
        });
    }
    Ok(())
}

/// Characters `φ_j = e^{2πi v·c}` on the canonical coordinates `c` of one
/// or both components, with `‖v‖_∞ ≤ max_freq`, weighted by `2^{−j}`.
///
/// `φ_0 ≡ 1`. The remaining vectors are ordered by sup-norm, then (for pair
/// measures) by `‖m + m′‖₁` so that the displacement characters
/// `e(m·(p − q))` come first, then by `‖v‖₁`, then lexicographically. Only
/// the first `terms` characters are kept; the weight of the dropped tail is
/// below `2^{1−terms}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionFamily {
    pub max_freq: i32,
    pub terms: usize,
}

impl Default for TestFunctionFamily {
    fn default() -> Self {
        Self { max_freq: 3, terms: 64 }
    }
}

impl TestFunctionFamily {
    /// The frequency box `[-F, F]^6` is enumerated in full on every call, so
    /// `F` is capped at [`Self::MAX_FREQ_LIMIT`].
    pub const MAX_FREQ_LIMIT: i32 = 4;

    pub fn new(max_freq: i32, terms: usize) -> Result<Self> {
        if !(1..=Self::MAX_FREQ_LIMIT).contains(&max_freq) || terms < 2 {
            return Err(Error::InvalidArgument(format!(
                "test family needs 1 <= max_freq <= {} and terms >= 2, got {max_freq}, {terms}",
                Self::MAX_FREQ_LIMIT
            )));
        }
        Ok(Self { max_freq, terms })
    }

    /// The enumerated frequency vectors for samples of `width` coordinates
    /// (`paired` when they are `(p, q)` concatenations).
    pub fn frequencies(&self, width: usize, paired: bool) -> Vec<Vec<i32>> {
        let f = self.max_freq;
        let side = (2 * f + 1) as usize;
        let total = side.pow(width as u32);
        let mut all: Vec<Vec<i32>> = (0..total)
            .map(|mut idx| {
                (0..width)
                    .map(|_| {
                        let k = (idx % side) as i32 - f;
                        idx /= side;
                        k
                    })
                    .collect()
            })
            .collect();
        let half = width / 2;
        all.sort_by_key(|v| {
            let sup = v.iter().map(|k| k.abs()).max().unwrap_or(0);
            let diag: i32 = if paired {
                (0..half).map(|i| (v[i] + v[i + half]).abs()).sum()
            } else {
                0
            };
            let l1: i32 = v.iter().map(|k| k.abs()).sum();
            let lex: Vec<(bool, i32, bool)> = v.iter().map(|&k| (k == 0, k.abs(), k < 0)).collect();
            (sup, diag, l1, lex)
        });
        all.truncate(self.terms.min(total));
        all
    }

    pub fn weight(j: usize) -> f64 {
        0.5f64.powi(j as i32)
    }

    /// `∫ φ_j dm` for every retained `j`.
    pub fn moments(&self, m: &EmpiricalMeasure) -> Vec<Complex64> {
        let w = m.width();
        let freqs = self.frequencies(w, m.is_pairs());
        let f = self.max_freq;
        let span = (2 * f + 1) as usize;
        let n = m.n();
        if n == 0 {
            return vec![Complex64::new(0.0, 0.0); freqs.len()];
        }
        let partials = par::map_chunks(n, par::DEFAULT_CHUNK, |r| {
            let mut acc = vec![ComplexKahan::new(); freqs.len()];
            let mut row = [0.0; 6];
            // powers[i][k + F] = e(k·c_i)
            let mut powers = vec![Complex64::new(0.0, 0.0); w * span];
            for i in r {
                m.row(i, &mut row);
                for (c, chunk) in row[..w].iter().zip(powers.chunks_mut(span)) {
                    for (k, slot) in chunk.iter_mut().enumerate() {
                        *slot = Complex64::from_polar(1.0, TAU * (k as i32 - f) as f64 * c);
                    }
                }
                for (a, v) in acc.iter_mut().zip(&freqs) {
                    let mut prod = Complex64::new(1.0, 0.0);
                    for (c, &k) in v.iter().enumerate() {
                        if k != 0 {
                            prod *= powers[c * span + (k + f) as usize];
                        }
                    }
                    a.add(prod);
                }
            }
            acc.iter().map(|a| a.value()).collect::<Vec<_>>()
        });
        let mut total = vec![ComplexKahan::new(); freqs.len()];
        for part in partials {
            for (t, v) in total.iter_mut().zip(part) {
                t.add(v);
            }
        }
        total.iter().map(|t| t.value() / n as f64).collect()
    }
}

fn check_comparable(m1: &EmpiricalMeasure, m2: &EmpiricalMeasure) -> Result<()> {
    if m1.space != m2.space {
        return Err(Error::SpaceMismatch {
            expected: m1.space,
            found: m2.space,
        });
    }
    if m1.is_pairs() != m2.is_pairs() {
        return Err(Error::InvalidArgument(
            "cannot compare a measure on X with a measure on X × X".into(),
        ));
    }
    Ok(())
}

/// `Σ_j 2^{−j} |a_j − b_j|` for precomputed moment vectors.
pub fn moment_dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .enumerate()
        .map(|(j, (x, y))| TestFunctionFamily::weight(j) * (x - y).norm())
        .collect::<par::KahanSum>()
        .value()
}

/// Weak-* distance `Σ_j 2^{−j} |∫φ_j dm1 − ∫φ_j dm2|`, in `[0, 2]`.
pub fn weakstar_dist(m1: &EmpiricalMeasure, m2: &EmpiricalMeasure, fam: &TestFunctionFamily) -> Result<f64> {
    check_comparable(m1, m2)?;
    Ok(moment_dist(&fam.moments(m1), &fam.moments(m2)))
}

fn base_points(sys: &NilSystem, n: usize, scheme: Provenance, seed: u64) -> Vec<NilPoint> {
    match scheme {
        Provenance::OrbitPushforward => sys.orbit(&sys.base_point(), n),
        Provenance::DirectHaar => haar_sample(sys.space, n, seed),
    }
}

fn scheme_seed(scheme: Provenance, seed: u64) -> Option<u64> {
    match scheme {
        Provenance::OrbitPushforward => None,
        Provenance::DirectHaar => Some(seed),
    }
}

/// `(Id, Id)_* μ`.
pub fn diagonal_joining(sys: &NilSystem, n: usize, scheme: Provenance, seed: u64) -> Result<EmpiricalMeasure> {
    if n == 0 {
        return Err(Error::InvalidArgument("a joining needs n >= 1".into()));
    }
    let pairs = base_points(sys, n, scheme, seed).into_iter().map(|p| (p, p)).collect();
    Ok(EmpiricalMeasure {
        space: sys.space,
        support: Support::Pairs(pairs),
        provenance: scheme,
        seed: scheme_seed(scheme, seed),
    })
}

/// Measure-preserving maps commuting with `T`, supplied by the caller.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointMap {
    Identity,
    /// `V_u`: right multiplication by the central element `(0, 0, u)`.
    VerticalRotation(f64),
    /// Left translation by a group element (commutes with `T` on tori).
    Translation(GroupElement),
}

impl PointMap {
    pub fn apply(&self, p: &NilPoint) -> NilPoint {
        match *self {
            PointMap::Identity => *p,
            PointMap::VerticalRotation(u) => vertical_rotate(p, u),
            PointMap::Translation(v) => p.space().reduce(p.space().mul(v, p.lift())),
        }
    }
}

/// `(Id, S)_* μ`.
pub fn graph_joining(
    sys: &NilSystem,
    map: PointMap,
    n: usize,
    scheme: Provenance,
    seed: u64,
) -> Result<EmpiricalMeasure> {
    if n == 0 {
        return Err(Error::InvalidArgument("a joining needs n >= 1".into()));
    }
    if matches!(map, PointMap::VerticalRotation(_)) && !sys.space.is_heisenberg() {
        return Err(Error::SpaceMismatch {
            expected: Space::Heisenberg,
            found: sys.space,
        });
    }
    let pts = base_points(sys, n, scheme, seed);
    let pairs = par::map_indexed(pts.len(), |i| (pts[i], map.apply(&pts[i])));
    Ok(EmpiricalMeasure {
        space: sys.space,
        support: Support::Pairs(pairs),
        provenance: scheme,
        seed: scheme_seed(scheme, seed),
    })
}

/// Checks that `1, α, β, α·s` admit no small integer relation. `s = 0`
/// is accepted as the degenerate case.
pub fn certify_shear(sys: &NilSystem, s: f64) -> Result<()> {
    if !s.is_finite() {
        return Err(Error::Uncertified {
            s,
            reason: "not a finite number".into(),
        });
    }
    if s == 0.0 {
        return Ok(());
    }
    let mut cert = sys.certificate.clone();
    cert.push("alpha*s", sys.tau.x * s);
    match cert.find_relation(RELATION_HEIGHT, RELATION_TOL) {
        Some(rel) => Err(Error::Uncertified {
            s,
            reason: format!("integer relation {rel:?} among {:?}", cert.labels),
        }),
        None => Ok(()),
    }
}

/// Pairs `(gΓ, a·g·(0,0,t)Γ)` with `a = (0, s, 0)` and `(gΓ, t)` Haar on
/// `X × 𝕋`: sampled directly, or along the orbit of `T × R_{αs}` from
/// `(e_X, 0)`.
pub fn counterexample_joining(
    sys: &NilSystem,
    s: f64,
    n: usize,
    scheme: Provenance,
    seed: u64,
) -> Result<EmpiricalMeasure> {
    if !sys.space.is_heisenberg() {
        return Err(Error::SpaceMismatch {
            expected: Space::Heisenberg,
            found: sys.space,
        });
    }
    if n == 0 {
        return Err(Error::InvalidArgument("a joining needs n >= 1".into()));
    }
    certify_shear(sys, s)?;

    let pts = base_points(sys, n, scheme, seed);
    let ts: Vec<f64> = match scheme {
        Provenance::DirectHaar => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(1);
            (0..n).map(|_| rng.random::<f64>()).collect()
        }
        Provenance::OrbitPushforward => {
            let step = sys.tau.x * s;
            let mut t = 0.0;
            (0..n)
                .map(|_| {
                    let cur = t;
                    t = circle_rotate(t, step);
                    cur
                })
                .collect()
        }
    };
    let pairs = par::map_indexed(n, |i| {
        let p = pts[i];
        let q = crate::nilgroup::reduce(GroupElement::new(p.x(), p.y() + s, p.z() + ts[i]));
        (p, q)
    });
    Ok(EmpiricalMeasure {
        space: sys.space,
        support: Support::Pairs(pairs),
        provenance: scheme,
        seed: scheme_seed(scheme, seed),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphnessConfig {
    pub bin_size: f64,
    pub min_count: usize,
    /// Points per bin entering the pairwise diameter (the first ones in
    /// sample order).
    pub max_per_bin: usize,
    /// Populated bins required for a verdict.
    pub min_bins: usize,
}

impl Default for GraphnessConfig {
    fn default() -> Self {
        Self {
            bin_size: 0.05,
            min_count: 20,
            max_per_bin: 400,
            min_bins: 3,
        }
    }
}

impl GraphnessConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.bin_size > 0.0 && self.bin_size <= 0.5) {
            return Err(Error::InvalidArgument(format!(
                "bin_size must lie in (0, 0.5], got {}",
                self.bin_size
            )));
        }
        if self.min_count < 2 || self.max_per_bin < 2 || self.min_bins < 1 {
            return Err(Error::InvalidArgument(
                "min_count and max_per_bin must be >= 2, min_bins >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Relative second coordinate `g⁻¹h·Γ` of a pair.
#[inline]
fn relative(p: &NilPoint, q: &NilPoint) -> NilPoint {
    let s = p.space();
    s.reduce(s.mul(s.inv(p.lift()), q.lift()))
}

fn diameter(pts: &[NilPoint], metric: &MetricConfig) -> f64 {
    let mut best = 0.0f64;
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            best = best.max(dist_canonical(p, q, metric));
        }
    }
    best
}

/// Conditional fiber dispersion of a joining.
///
/// First coordinates are binned on the horizontal torus (`(x, y)` for the
/// Heisenberg manifold, all coordinates for tori) with periodic cells of
/// side close to `bin_size`. In each cell with at least `min_count` pairs
/// the diameter of the relative second coordinates `g⁻¹h` is measured;
/// graph joinings of maps commuting with the group action have constant
/// `g⁻¹h` along fibers. Returns the count-weighted median over cells.
pub fn graphness(m: &EmpiricalMeasure, cfg: &GraphnessConfig, metric: &MetricConfig) -> Result<f64> {
    cfg.validate()?;
    let Support::Pairs(pairs) = &m.support else {
        return Err(Error::InvalidArgument("graphness needs a measure on X × X".into()));
    };
    let axes = if m.space.is_heisenberg() { 2 } else { m.space.dim() };
    let per_axis = (1.0 / cfg.bin_size).round().max(1.0) as usize;
    let cells = per_axis.pow(axes as u32);

    let mut bins: Vec<Vec<NilPoint>> = vec![Vec::new(); cells];
    let mut counts = vec![0usize; cells];
    for (p, q) in pairs {
        let mut idx = 0;
        for &c in &p.coords()[..axes] {
            idx = idx * per_axis + ((c * per_axis as f64) as usize).min(per_axis - 1);
        }
        counts[idx] += 1;
        if bins[idx].len() < cfg.max_per_bin {
            bins[idx].push(relative(p, q));
        }
    }
    let populated: Vec<usize> = (0..cells).filter(|&i| counts[i] >= cfg.min_count).collect();
    if populated.len() < cfg.min_bins {
        return Err(Error::Indeterminate {
            populated: populated.len(),
            min_count: cfg.min_count,
            required: cfg.min_bins,
        });
    }
    let diams = par::map_indexed(populated.len(), |i| diameter(&bins[populated[i]], metric));
    let mut weighted: Vec<(f64, usize)> = diams.into_iter().zip(populated.iter().map(|&i| counts[i])).collect();
    Ok(weighted_median(&mut weighted))
}

/// Lower weighted median.
fn weighted_median(v: &mut [(f64, usize)]) -> f64 {
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: usize = v.iter().map(|e| e.1).sum();
    let mut acc = 0;
    for &(x, w) in v.iter() {
        acc += w;
        if 2 * acc >= total {
            return x;
        }
    }
    v.last().map(|e| e.0).unwrap_or(0.0)
}

/// Seed offset for the Haar reference cloud of [`marginal_error`].
pub const REFERENCE_SEED_OFFSET: u64 = 0x005e_ed0f_4aa2;

/// Weak-* distance between a marginal of `m` and an independent Haar cloud
/// of `n_ref` points.
pub fn marginal_error(m: &EmpiricalMeasure, which: u8, fam: &TestFunctionFamily, n_ref: usize) -> Result<f64> {
    let marg = m.marginal(which)?;
    let seed = m.seed.unwrap_or(0).wrapping_add(REFERENCE_SEED_OFFSET);
    let reference = EmpiricalMeasure {
        space: m.space,
        support: Support::Single(haar_sample(m.space, n_ref, seed)),
        provenance: Provenance::DirectHaar,
        seed: Some(seed),
    };
    weakstar_dist(&marg, &reference, fam)
}

/// Largest change of a test-function integral when every pair is pushed
/// forward by `T × T`.
pub fn tt_drift(m: &EmpiricalMeasure, sys: &NilSystem, fam: &TestFunctionFamily) -> Result<f64> {
    let Support::Pairs(pairs) = &m.support else {
        return Err(Error::InvalidArgument("T×T drift needs a measure on X × X".into()));
    };
    if m.space != sys.space {
        return Err(Error::SpaceMismatch {
            expected: sys.space,
            found: m.space,
        });
    }
    let pushed = par::map_indexed(pairs.len(), |i| (sys.nilrotate(&pairs[i].0), sys.nilrotate(&pairs[i].1)));
    let moved = EmpiricalMeasure {
        support: Support::Pairs(pushed),
        ..m.clone()
    };
    let a = fam.moments(m);
    let b = fam.moments(&moved);
    Ok(a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
}

/// Reference fiber size: the diameter of the central circle `W` on the
/// Heisenberg manifold, `1/2` (a coordinate circle) on tori.
pub fn fiber_reference(space: Space, metric: &MetricConfig) -> f64 {
    match space {
        Space::Heisenberg => {
            let e = space.base_point();
            (0..=1000)
                .map(|j| dist_canonical(&e, &vertical_rotate(&e, j as f64 / 1001.0), metric))
                .fold(0.0, f64::max)
        }
        Space::Torus(_) => 0.5,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    GraphLike,
    NonGraph,
    Indeterminate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Graph-like when graphness is at most this.
    pub graph_like_max: f64,
    /// Non-graph when graphness is at least this.
    pub non_graph_min: f64,
}

impl Thresholds {
    /// `3·bin_size` and `0.5·diam(W)`.
    pub fn standard(space: Space, gcfg: &GraphnessConfig, metric: &MetricConfig) -> Self {
        Self {
            graph_like_max: 3.0 * gcfg.bin_size,
            non_graph_min: 0.5 * fiber_reference(space, metric),
        }
    }

    pub fn classify(&self, graphness: Option<f64>) -> Classification {
        match graphness {
            Some(g) if g <= self.graph_like_max => Classification::GraphLike,
            Some(g) if g >= self.non_graph_min => Classification::NonGraph,
            _ => Classification::Indeterminate,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JoiningReport {
    pub dist_to_diagonal: f64,
    /// `None` when too few bins were populated.
    pub graphness: Option<f64>,
    pub marginal_error_1: f64,
    pub marginal_error_2: f64,
    pub classification: Classification,
    pub thresholds: Thresholds,
}

/// Everything needed to turn a joining into a [`JoiningReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub family: TestFunctionFamily,
    pub graphness: GraphnessConfig,
    pub thresholds: Thresholds,
    pub n_ref: usize,
}

impl AnalysisConfig {
    pub fn standard(sys: &NilSystem, n_ref: usize) -> Self {
        let graphness = GraphnessConfig::default();
        Self {
            family: TestFunctionFamily::default(),
            thresholds: Thresholds::standard(sys.space, &graphness, &sys.metric),
            graphness,
            n_ref,
        }
    }
}

/// Report for `m` against a diagonal joining built the same way.
pub fn analyze(
    m: &EmpiricalMeasure,
    diagonal: &EmpiricalMeasure,
    metric: &MetricConfig,
    cfg: &AnalysisConfig,
) -> Result<JoiningReport> {
    let graphness = match graphness(m, &cfg.graphness, metric) {
        Ok(g) => Some(g),
        Err(Error::Indeterminate { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(JoiningReport {
        dist_to_diagonal: weakstar_dist(m, diagonal, &cfg.family)?,
        graphness,
        marginal_error_1: marginal_error(m, 1, &cfg.family, cfg.n_ref)?,
        marginal_error_2: marginal_error(m, 2, &cfg.family, cfg.n_ref)?,
        classification: cfg.thresholds.classify(graphness),
        thresholds: cfg.thresholds,
    })
}
