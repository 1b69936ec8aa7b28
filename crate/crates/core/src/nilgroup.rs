//! Group law, lattice reduction, and metric on the Heisenberg nilmanifold
//! `X = G/Γ` with `G = ℝ³` in polarized coordinates and `Γ = ℤ³`, together with
//! flat tori `ℝ^d/ℤ^d` as the abelian degenerate case.
//!
//! The metric is the quotient of the right-invariant metric
//! `d_G(g, h) = N_sym(g·h⁻¹)` where
//! `N(x, y, z) = max(|x|, |y|, |z|^{1/2})` and `N_sym(w) = max(N(w), N(w⁻¹))`.
//! `N_sym` is subadditive (`N_sym(gh) ≤ N_sym(g) + N_sym(h)`), so the quotient
//! `d_X(gΓ, hΓ) = min_γ N_sym(g·γ·h⁻¹)` satisfies the triangle inequality with
//! constant 1. It is exactly symmetric and invariant under translation by the
//! center `{(0, 0, t)}`. On tori the metric is the wrap-aware sup distance.

use std::fmt;
use std::ops::Mul;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which nilmanifold a point lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Space {
    Heisenberg,
    /// Flat torus of dimension 1 to 3.
    Torus(u8),
}

impl Space {
    pub fn dim(self) -> usize {
        match self {
            Space::Heisenberg => 3,
            Space::Torus(d) => d as usize,
        }
    }

    pub fn is_heisenberg(self) -> bool {
        matches!(self, Space::Heisenberg)
    }

    pub fn validate(self) -> Result<()> {
        match self {
            Space::Torus(d) if !(1..=3).contains(&d) => Err(Error::InvalidArgument(format!(
                "torus dimension must be 1, 2 or 3, got {d}"
            ))),
            _ => Ok(()),
        }
    }

    /// Group multiplication in this space's covering group.
    #[inline]
    pub fn mul(self, g: GroupElement, h: GroupElement) -> GroupElement {
        match self {
            Space::Heisenberg => heis_mul(g, h),
            Space::Torus(_) => GroupElement::new(g.x + h.x, g.y + h.y, g.z + h.z),
        }
    }

    #[inline]
    pub fn inv(self, g: GroupElement) -> GroupElement {
        match self {
            Space::Heisenberg => heis_inv(g),
            Space::Torus(_) => GroupElement::new(-g.x, -g.y, -g.z),
        }
    }

    /// Canonical representative of `g·Γ`.
    #[inline]
    pub fn reduce(self, g: GroupElement) -> NilPoint {
        match self {
            Space::Heisenberg => reduce(g),
            Space::Torus(d) => {
                let mut c = [0.0; 3];
                let src = g.to_array();
                for i in 0..d as usize {
                    c[i] = frac(src[i]);
                }
                NilPoint { space: self, c }
            }
        }
    }

    /// The base point `e_X`.
    pub fn base_point(self) -> NilPoint {
        NilPoint {
            space: self,
            c: [0.0; 3],
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Heisenberg => write!(f, "heisenberg"),
            Space::Torus(d) => write!(f, "torus-{d}"),
        }
    }
}

/// Element of `G = ℝ³` with the polarized law
/// `(x, y, z)·(x', y', z') = (x + x', y + y', z + z' + x y')`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement {
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Central element `(0, 0, t)`.
    pub const fn central(t: f64) -> Self {
        Self::new(0.0, 0.0, t)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn max_abs_diff(&self, other: &GroupElement) -> f64 {
        (self.x - other.x)
            .abs()
            .max((self.y - other.y).abs())
            .max((self.z - other.z).abs())
    }

    /// `τ^k` under the Heisenberg law: `(kα, kβ, kγ + C(k,2)·αβ)`.
    pub fn heis_pow(self, k: u64) -> GroupElement {
        let kf = k as f64;
        let pairs = if k == 0 { 0.0 } else { kf * (kf - 1.0) / 2.0 };
        GroupElement::new(kf * self.x, kf * self.y, kf * self.z + pairs * self.x * self.y)
    }
}

impl Mul for GroupElement {
    type Output = GroupElement;

    fn mul(self, rhs: GroupElement) -> GroupElement {
        heis_mul(self, rhs)
    }
}

#[inline]
pub fn heis_mul(g: GroupElement, h: GroupElement) -> GroupElement {
    GroupElement {
        x: g.x + h.x,
        y: g.y + h.y,
        z: g.z + h.z + g.x * h.y,
    }
}

#[inline]
pub fn heis_inv(g: GroupElement) -> GroupElement {
    GroupElement {
        x: -g.x,
        y: -g.y,
        z: -g.z + g.x * g.y,
    }
}

/// Fractional part in `[0, 1)`.
#[inline]
pub fn frac(v: f64) -> f64 {
    let f = v - v.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Wrap-aware distance between two reals modulo 1, in `[0, 1/2]`.
#[inline]
pub fn circle_dist(a: f64, b: f64) -> f64 {
    let d = frac(a - b);
    d.min(1.0 - d)
}

/// A canonical coset representative: every used coordinate lies in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NilPoint {
    space: Space,
    c: [f64; 3],
}

impl NilPoint {
    /// Validates that `coords` is already canonical for `space`.
    pub fn new(space: Space, coords: &[f64]) -> Result<Self> {
        space.validate()?;
        if coords.len() != space.dim() {
            return Err(Error::InvalidArgument(format!(
                "{space} points have {} coordinates, got {}",
                space.dim(),
                coords.len()
            )));
        }
        if !coords.iter().all(|v| v.is_finite() && (0.0..1.0).contains(v)) {
            return Err(Error::NonCanonical {
                coords: coords.to_vec(),
            });
        }
        let mut c = [0.0; 3];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Self { space, c })
    }

    pub fn heisenberg(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(Space::Heisenberg, &[x, y, z])
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn coords(&self) -> &[f64] {
        &self.c[..self.space.dim()]
    }

    pub fn x(&self) -> f64 {
        self.c[0]
    }

    pub fn y(&self) -> f64 {
        self.c[1]
    }

    pub fn z(&self) -> f64 {
        self.c[2]
    }

    /// The canonical lift into the covering group (unused coordinates are 0).
    #[inline]
    pub fn lift(&self) -> GroupElement {
        GroupElement::new(self.c[0], self.c[1], self.c[2])
    }

    pub fn is_canonical(&self) -> bool {
        self.coords()
            .iter()
            .all(|v| v.is_finite() && (0.0..1.0).contains(v))
    }

    /// Smallest distance of any coordinate to the boundary of the unit box
    /// (used by randomized tests to resample near-boundary inputs).
    pub fn boundary_margin(&self) -> f64 {
        self.coords()
            .iter()
            .map(|v| v.min(1.0 - v))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Canonical representative of `gΓ` on the Heisenberg nilmanifold.
///
/// Right multiplication by `γ = (a, b, c)` with `a = -⌊x⌋`, `b = -⌊y⌋`,
/// `c = -⌊z + x·b⌋`.
#[inline]
pub fn reduce(g: GroupElement) -> NilPoint {
    let mut b = -g.y.floor();
    let mut y = g.y + b;
    if y >= 1.0 {
        y -= 1.0;
        b -= 1.0;
    }
    let z = frac(g.z + g.x * b);
    NilPoint {
        space: Space::Heisenberg,
        c: [frac(g.x), y, z],
    }
}

/// `reduce(g · lift(p))`.
#[inline]
pub fn left_translate(g: GroupElement, p: &NilPoint) -> NilPoint {
    p.space.reduce(p.space.mul(g, p.lift()))
}

/// Homogeneous quasi-norm `max(|x|, |y|, |z|^{1/2})`.
#[inline]
pub fn quasi_norm(w: GroupElement) -> f64 {
    w.x.abs().max(w.y.abs()).max(w.z.abs().sqrt())
}

/// `max(N(w), N(w⁻¹))`.
#[inline]
pub fn sym_norm(w: GroupElement) -> f64 {
    quasi_norm(w).max((w.x * w.y - w.z).abs().sqrt())
}

/// Lattice search configuration for the quotient metric.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    /// Radius of the horizontal lattice window `{-r..=r}²`. The central
    /// lattice coordinate is always optimized exactly.
    pub gamma_window: u32,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self { gamma_window: 3 }
    }
}

impl MetricConfig {
    /// Multiplicative constant in the quasi-triangle inequality of the metric.
    pub const TRIANGLE_CONSTANT: f64 = 1.0;

    pub fn validate(&self) -> Result<()> {
        if self.gamma_window == 0 {
            return Err(Error::InvalidArgument(
                "gamma_window must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Distance between two canonical points.
pub fn dist(p: &NilPoint, q: &NilPoint, cfg: &MetricConfig) -> Result<f64> {
    if p.space != q.space {
        return Err(Error::SpaceMismatch {
            expected: p.space,
            found: q.space,
        });
    }
    for pt in [p, q] {
        if !pt.is_canonical() {
            return Err(Error::NonCanonical {
                coords: pt.coords().to_vec(),
            });
        }
    }
    cfg.validate()?;
    Ok(dist_canonical(p, q, cfg))
}

/// [`dist`] without validation; inputs must be canonical points of one space.
#[inline]
pub fn dist_canonical(p: &NilPoint, q: &NilPoint, cfg: &MetricConfig) -> f64 {
    // evaluate in a fixed argument order so that symmetry holds bit for bit
    let (p, q) = if p.c > q.c { (q, p) } else { (p, q) };
    match p.space {
        Space::Heisenberg => heis_dist(p.lift(), q.lift(), cfg.gamma_window as f64),
        Space::Torus(d) => (0..d as usize)
            .map(|i| circle_dist(p.c[i], q.c[i]))
            .fold(0.0, f64::max),
    }
}

/// Horizontal lattice shifts worth trying: the two integers bracketing `-d`,
/// clipped to the window. Any other shift leaves a horizontal coordinate of
/// absolute value at least 1, while the best bracketing shift is below 1.
#[inline]
fn bracket(d: f64, window: f64) -> [Option<f64>; 2] {
    let lo = (-d).floor();
    let hi = (-d).ceil();
    let keep = |a: f64| (a.abs() <= window).then_some(a);
    if lo == hi {
        [keep(lo), None]
    } else {
        [keep(lo), keep(hi)]
    }
}

#[inline]
fn heis_dist(g: GroupElement, h: GroupElement, window: f64) -> f64 {
    let dx = g.x - h.x;
    let dy = g.y - h.y;
    let mut best = f64::INFINITY;
    for a in bracket(dx, window).into_iter().flatten() {
        let x = dx + a;
        if x.abs() >= best {
            continue;
        }
        for b in bracket(dy, window).into_iter().flatten() {
            let y = dy + b;
            let horiz = x.abs().max(y.abs());
            if horiz >= best {
                continue;
            }
            // z-coordinate of g·(a, b, 0)·h⁻¹ before the central shift
            let z0 = g.z + g.x * b - h.z + h.x * h.y - (g.x + a) * h.y;
            let xy = x * y;
            let target = 0.5 * xy - z0;
            for c in [target.floor(), target.ceil()] {
                let u = z0 + c;
                let vert = u.abs().max((u - xy).abs()).sqrt();
                best = best.min(horiz.max(vert));
            }
        }
    }
    best
}

/// Quotient metric on the torus factor `Z = G_k\X`:
/// `inf_{c ∈ center} d_X(c·p, q)`. For this metric the infimum over the
/// central coordinate is attained in closed form, so the result depends only
/// on the horizontal coordinates.
pub fn factor_quotient_dist(p: &NilPoint, q: &NilPoint, cfg: &MetricConfig) -> Result<f64> {
    dist(p, q, cfg)?;
    if !p.space.is_heisenberg() {
        return Err(Error::InvalidArgument(
            "the torus-factor quotient metric is defined on the Heisenberg nilmanifold".into(),
        ));
    }
    let (g, h) = (p.lift(), q.lift());
    let window = cfg.gamma_window as f64;
    let mut best = f64::INFINITY;
    for a in bracket(g.x - h.x, window).into_iter().flatten() {
        for b in bracket(g.y - h.y, window).into_iter().flatten() {
            let x = g.x - h.x + a;
            let y = g.y - h.y + b;
            // min over real u of max(|u|, |u - xy|) is |xy|/2
            let vert = (0.5 * (x * y).abs()).sqrt();
            best = best.min(x.abs().max(y.abs()).max(vert));
        }
    }
    Ok(best)
}

/// `n` i.i.d. Haar-distributed points: uniform on the fundamental box.
pub fn haar_sample(space: Space, n: usize, seed: u64) -> Vec<NilPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_sample_with(space, n, &mut rng)
}

pub(crate) fn haar_sample_with<R: Rng>(space: Space, n: usize, rng: &mut R) -> Vec<NilPoint> {
    let d = space.dim();
    (0..n)
        .map(|_| {
            let mut c = [0.0; 3];
            for v in c.iter_mut().take(d) {
                *v = rng.random::<f64>();
            }
            NilPoint { space, c }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(x: f64, y: f64, z: f64) -> GroupElement {
        GroupElement::new(x, y, z)
    }

    /// Exhaustive lattice search, independent of the bracketing shortcut.
    fn brute_dist(p: &NilPoint, q: &NilPoint, r: i32) -> f64 {
        let (gp, hq) = (p.lift(), q.lift());
        let hinv = heis_inv(hq);
        let mut best = f64::INFINITY;
        for a in -r..=r {
            for b in -r..=r {
                for c in -12..=12 {
                    let w = gp * g(a as f64, b as f64, c as f64) * hinv;
                    best = best.min(sym_norm(w));
                }
            }
        }
        best
    }

    #[test]
    fn group_law_examples() {
        assert_eq!(heis_mul(g(1.0, 2.0, 3.0), g(4.0, 5.0, 6.0)), g(5.0, 7.0, 14.0));
        let a = g(1.3, -0.2, 7.0);
        assert_eq!(a * GroupElement::IDENTITY, a);
        let lhs = (g(1.0, 0.0, 0.0) * g(0.0, 1.0, 0.0)) * g(0.0, 0.0, 1.0);
        let rhs = g(1.0, 0.0, 0.0) * (g(0.0, 1.0, 0.0) * g(0.0, 0.0, 1.0));
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, g(1.0, 1.0, 2.0));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(heis_inv(GroupElement::IDENTITY), GroupElement::IDENTITY);
        assert_eq!(heis_inv(g(1.0, 2.0, 3.0)), g(-1.0, -2.0, -1.0));
        assert_eq!(g(1.0, 2.0, 3.0) * heis_inv(g(1.0, 2.0, 3.0)), GroupElement::IDENTITY);
    }

    #[test]
    fn reduce_examples() {
        let p = reduce(g(1.5, 2.3, 0.7));
        assert!((p.x() - 0.5).abs() < 1e-12);
        assert!((p.y() - 0.3).abs() < 1e-12);
        assert!((p.z() - 0.7).abs() < 1e-12);
        let q = reduce(g(0.25, 0.25, 0.25));
        assert_eq!(q.coords(), &[0.25, 0.25, 0.25]);
    }

    #[test]
    fn reduce_matches_brute_force_search() {
        // the unique γ ∈ {-5..5}³ putting (1.5, 2.3, 0.7)·γ in the unit box
        let base = g(1.5, 2.3, 0.7);
        let mut hits = vec![];
        for a in -5..=5 {
            for b in -5..=5 {
                for c in -5..=5 {
                    let w = base * g(a as f64, b as f64, c as f64);
                    if [w.x, w.y, w.z].iter().all(|v| (-1e-12..1.0 - 1e-12).contains(v)) {
                        hits.push(w);
                    }
                }
            }
        }
        assert_eq!(hits.len(), 1);
        let p = reduce(base);
        assert!(hits[0].max_abs_diff(&p.lift()) < 1e-12);
    }

    #[test]
    fn reduce_handles_tiny_negative_y() {
        let p = reduce(g(0.4, -1e-18, 0.3));
        assert!(p.is_canonical());
        // (0.4, 1 - ε, 0.7) and (0.4, 0, 0.3) represent the same coset up to ε
        assert_eq!(p.y(), 0.0);
        assert!(circle_dist(p.z(), 0.3) < 1e-12);
    }

    #[test]
    fn dist_examples() {
        let cfg = MetricConfig::default();
        let o = NilPoint::heisenberg(0.0, 0.0, 0.0).unwrap();
        let h = NilPoint::heisenberg(0.5, 0.0, 0.0).unwrap();
        assert_eq!(dist(&o, &o, &cfg).unwrap(), 0.0);
        assert!((dist(&o, &h, &cfg).unwrap() - 0.5).abs() < 1e-15);
        assert!((brute_dist(&o, &h, 3) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dist_rejects_bad_inputs() {
        let cfg = MetricConfig::default();
        let p = NilPoint::heisenberg(0.1, 0.2, 0.3).unwrap();
        let t = Space::Torus(2).base_point();
        assert!(matches!(dist(&p, &t, &cfg), Err(Error::SpaceMismatch { .. })));
        assert!(NilPoint::heisenberg(1.0, 0.0, 0.0).is_err());
        assert!(NilPoint::heisenberg(f64::NAN, 0.0, 0.0).is_err());
        assert!(MetricConfig { gamma_window: 0 }.validate().is_err());
    }

    #[test]
    fn central_fiber_distance_is_sqrt_of_circle_distance() {
        let cfg = MetricConfig::default();
        let p = NilPoint::heisenberg(0.3, 0.6, 0.1).unwrap();
        let q = NilPoint::heisenberg(0.3, 0.6, 0.6).unwrap();
        assert!((dist(&p, &q, &cfg).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn non_central_left_translation_is_not_an_isometry() {
        // No compatible metric on a non-abelian nilmanifold is invariant under
        // all left translations; this pins the behaviour of ours.
        let cfg = MetricConfig::default();
        let p = NilPoint::heisenberg(0.1, 0.2, 0.3).unwrap();
        let q = NilPoint::heisenberg(0.15, 0.2, 0.3).unwrap();
        let k = g(0.0, 0.4, 0.0);
        let d0 = dist(&p, &q, &cfg).unwrap();
        let d1 = dist(&left_translate(k, &p), &left_translate(k, &q), &cfg).unwrap();
        assert!((d0 - d1).abs() > 1e-3);
    }

    #[test]
    fn factor_quotient_metric_is_flat_torus_metric() {
        let cfg = MetricConfig::default();
        let pts = haar_sample(Space::Heisenberg, 400, 11);
        for w in pts.windows(2) {
            let dz = factor_quotient_dist(&w[0], &w[1], &cfg).unwrap();
            let flat = circle_dist(w[0].x(), w[1].x()).max(circle_dist(w[0].y(), w[1].y()));
            assert!((dz - flat).abs() < 1e-12);
            assert!(dz <= dist(&w[0], &w[1], &cfg).unwrap() + 1e-15);
            // literal infimum over central translates, on a fine grid
            let grid = (0..2000)
                .map(|j| {
                    let c = GroupElement::central(j as f64 / 2000.0);
                    dist_canonical(&left_translate(c, &w[0]), &w[1], &cfg)
                })
                .fold(f64::INFINITY, f64::min);
            assert!(grid >= dz - 1e-12 && grid <= dz + 0.02);
        }
    }

    #[test]
    fn haar_sample_is_deterministic_and_canonical() {
        let a = haar_sample(Space::Heisenberg, 1000, 7);
        let b = haar_sample(Space::Heisenberg, 1000, 7);
        assert_eq!(a, b);
        assert!(a.iter().all(|p| p.is_canonical()));
        let c = haar_sample(Space::Heisenberg, 1000, 8);
        assert_ne!(a, c);
    }

    #[test]
    fn haar_sample_moments() {
        let n = 100_000;
        let pts = haar_sample(Space::Heisenberg, n, 3);
        let tol = 3.0 / (n as f64).sqrt();
        for i in 0..3 {
            let m = pts.iter().map(|p| p.coords()[i]).sum::<f64>() / n as f64;
            assert!((m - 0.5).abs() < tol, "coordinate {i} mean {m}");
        }
        let ch = pts
            .iter()
            .map(|p| num_complex::Complex64::from_polar(1.0, std::f64::consts::TAU * p.x()))
            .sum::<num_complex::Complex64>()
            / n as f64;
        assert!(ch.norm() < tol);
    }

    #[test]
    fn torus_ops_are_componentwise_mod_one() {
        let sp = Space::Torus(2);
        let a = g(0.7, 0.4, 0.0);
        let b = g(0.6, 0.9, 0.0);
        let p = sp.reduce(sp.mul(a, b));
        assert!((p.coords()[0] - 0.3).abs() < 1e-12);
        assert!((p.coords()[1] - 0.3).abs() < 1e-12);
        let q = sp.reduce(sp.inv(a));
        assert!((q.coords()[0] - 0.3).abs() < 1e-12);
        let cfg = MetricConfig::default();
        let d = dist(&Space::Torus(1).base_point(), &NilPoint::new(Space::Torus(1), &[0.9]).unwrap(), &cfg)
            .unwrap();
        assert!((d - 0.1).abs() < 1e-12);
    }

    fn elem() -> impl Strategy<Value = GroupElement> {
        (-5.0..5.0f64, -5.0..5.0f64, -5.0..5.0f64).prop_map(|(x, y, z)| g(x, y, z))
    }

    fn lattice() -> impl Strategy<Value = GroupElement> {
        (-4i32..=4, -4i32..=4, -4i32..=4).prop_map(|(a, b, c)| g(a as f64, b as f64, c as f64))
    }

    proptest! {
        #[test]
        fn associativity(a in elem(), b in elem(), c in elem()) {
            prop_assert!(((a * b) * c).max_abs_diff(&(a * (b * c))) < 1e-12);
        }

        #[test]
        fn inverse_law(a in elem()) {
            prop_assert!((a * heis_inv(a)).max_abs_diff(&GroupElement::IDENTITY) < 1e-12);
            prop_assert!(heis_inv(heis_inv(a)).max_abs_diff(&a) < 1e-12);
        }

        #[test]
        fn reduction_is_idempotent_and_coset_invariant(a in elem(), gam in lattice()) {
            let p = reduce(a);
            prop_assume!(p.boundary_margin() > 1e-9);
            prop_assert!(p.is_canonical());
            let again = reduce(p.lift());
            prop_assert!(again.lift().max_abs_diff(&p.lift()) < 1e-9);
            let shifted = reduce(a * gam);
            prop_assert!(shifted.lift().max_abs_diff(&p.lift()) < 1e-9);
        }

        #[test]
        fn metric_axioms(a in elem(), b in elem(), t in 0.0..1.0f64) {
            let cfg = MetricConfig::default();
            let (p, q) = (reduce(a), reduce(b));
            let d = dist(&p, &q, &cfg).unwrap();
            prop_assert_eq!(d, dist(&q, &p, &cfg).unwrap());
            prop_assert!(d > 0.0 || p == q);
            prop_assert_eq!(dist(&p, &p, &cfg).unwrap(), 0.0);
            prop_assert!((d - brute_dist(&p, &q, 3)).abs() < 1e-12);
            // central translations are isometries
            let c = GroupElement::central(t);
            let dc = dist(&left_translate(c, &p), &left_translate(c, &q), &cfg).unwrap();
            prop_assert!((d - dc).abs() < 1e-9);
        }

        #[test]
        fn triangle_inequality(a in elem(), b in elem(), c in elem()) {
            let cfg = MetricConfig::default();
            let (p, q, r) = (reduce(a), reduce(b), reduce(c));
            let lhs = dist_canonical(&p, &r, &cfg);
            let rhs = dist_canonical(&p, &q, &cfg) + dist_canonical(&q, &r, &cfg);
            prop_assert!(lhs <= MetricConfig::TRIANGLE_CONSTANT * rhs + 1e-12);
        }
    }
}
