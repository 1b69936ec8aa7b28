//! Nilsystems `(X, μ, T)` with `T(x) = τ·x`, orbits, Birkhoff averages, the
//! torus-factor projection, and vertical rotations by the center.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nilgroup::{frac, haar_sample_with, GroupElement, MetricConfig, NilPoint, Space};
use crate::par;

/// `√2 − 1`
pub fn default_alpha() -> f64 {
    2f64.sqrt() - 1.0
}

/// `√3 − 1`
pub fn default_beta() -> f64 {
    3f64.sqrt() - 1.0
}

/// `√5 − 2`
pub fn default_shear() -> f64 {
    5f64.sqrt() - 2.0
}

/// Real numbers whose linear independence over ℚ is assumed, with labels
/// recording where each value came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub labels: Vec<String>,
    pub values: Vec<f64>,
}

impl Certificate {
    pub fn new(entries: &[(&str, f64)]) -> Self {
        Self {
            labels: entries.iter().map(|(l, _)| l.to_string()).collect(),
            values: entries.iter().map(|(_, v)| *v).collect(),
        }
    }

    pub fn push(&mut self, label: impl Into<String>, value: f64) {
        self.labels.push(label.into());
        self.values.push(value);
    }

    /// Screens for a small integer relation among the certified values.
    pub fn find_relation(&self, height: i64, tol: f64) -> Option<Vec<i64>> {
        find_integer_relation(&self.values, height, tol)
    }
}

/// Looks for integers `c` with `max |c_i| ≤ height`, not all zero, such that
/// `|Σ c_i v_i| < tol`, where `v_0` is taken as the anchor and its coefficient
/// is solved by rounding. This is a necessary-condition screen for ℚ-linear
/// independence, not a proof of it.
pub fn find_integer_relation(values: &[f64], height: i64, tol: f64) -> Option<Vec<i64>> {
    let (&anchor, rest) = values.split_first()?;
    if rest.is_empty() {
        return (anchor.abs() < tol).then(|| vec![1]);
    }
    let m = rest.len();
    let mut coeffs = vec![-height; m];
    loop {
        if coeffs.iter().any(|&c| c != 0) {
            let partial: f64 = coeffs.iter().zip(rest).map(|(c, v)| *c as f64 * v).sum();
            if anchor != 0.0 {
                let c0 = (-partial / anchor).round();
                if c0.abs() <= height as f64 && (c0 * anchor + partial).abs() < tol {
                    let mut out = vec![c0 as i64];
                    out.extend_from_slice(&coeffs);
                    return Some(out);
                }
            } else if partial.abs() < tol {
                let mut out = vec![0];
                out.extend_from_slice(&coeffs);
                return Some(out);
            }
        }
        let mut i = 0;
        loop {
            if i == m {
                return None;
            }
            coeffs[i] += 1;
            if coeffs[i] <= height {
                break;
            }
            coeffs[i] = -height;
            i += 1;
        }
    }
}

/// Height and tolerance used when screening user-provided parameters.
pub const RELATION_HEIGHT: i64 = 12;
pub const RELATION_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NilSystem {
    pub space: Space,
    pub tau: GroupElement,
    pub metric: MetricConfig,
    pub certificate: Certificate,
}

impl NilSystem {
    pub fn heisenberg(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self {
            space: Space::Heisenberg,
            tau: GroupElement::new(alpha, beta, gamma),
            metric: MetricConfig::default(),
            certificate: Certificate::new(&[("1", 1.0), ("alpha", alpha), ("beta", beta)]),
        }
    }

    /// `τ = (√2 − 1, √3 − 1, 0)`.
    pub fn heisenberg_default() -> Self {
        let mut sys = Self::heisenberg(default_alpha(), default_beta(), 0.0);
        sys.certificate = Certificate::new(&[("1", 1.0), ("sqrt(2)-1", sys.tau.x), ("sqrt(3)-1", sys.tau.y)]);
        sys
    }

    /// Rotation of the `d`-torus by `shift` (missing entries are zero).
    pub fn torus(shift: &[f64]) -> Result<Self> {
        let d = shift.len();
        let space = Space::Torus(d as u8);
        space.validate()?;
        let mut t = [0.0; 3];
        t[..d].copy_from_slice(shift);
        let mut cert = Certificate::new(&[("1", 1.0)]);
        for (i, v) in shift.iter().enumerate() {
            cert.push(format!("shift[{i}]"), *v);
        }
        Ok(Self {
            space,
            tau: GroupElement::new(t[0], t[1], t[2]),
            metric: MetricConfig::default(),
            certificate: cert,
        })
    }

    /// Circle rotation by `√2 − 1` (`d = 1`) or 2-torus rotation by
    /// `(√2 − 1, √3 − 1)` (`d = 2`).
    pub fn torus_default(d: u8) -> Result<Self> {
        let all = [default_alpha(), default_beta()];
        if !(1..=2).contains(&d) {
            return Err(Error::InvalidArgument(format!(
                "default torus rotations exist for d = 1, 2; got {d}"
            )));
        }
        let mut sys = Self::torus(&all[..d as usize])?;
        let labels = ["sqrt(2)-1", "sqrt(3)-1"];
        for (i, label) in labels.iter().take(d as usize).enumerate() {
            sys.certificate.labels[i + 1] = label.to_string();
        }
        Ok(sys)
    }

    /// Rejects the trivial rotation and certificates with a visible integer
    /// relation.
    pub fn require_ergodic(&self) -> Result<()> {
        if self.tau.to_array()[..self.space.dim()].iter().all(|v| *v == 0.0) {
            return Err(Error::NotErgodic("the rotation is trivial".into()));
        }
        if let Some(rel) = self.certificate.find_relation(RELATION_HEIGHT, RELATION_TOL) {
            return Err(Error::NotErgodic(format!(
                "integer relation {rel:?} among {:?}",
                self.certificate.labels
            )));
        }
        Ok(())
    }

    pub fn base_point(&self) -> NilPoint {
        self.space.base_point()
    }

    #[inline]
    pub fn nilrotate(&self, p: &NilPoint) -> NilPoint {
        self.space.reduce(self.space.mul(self.tau, p.lift()))
    }

    /// `(p0, T p0, …, T^{n−1} p0)` by iterated rotation.
    pub fn orbit(&self, p0: &NilPoint, n: usize) -> Vec<NilPoint> {
        let mut out = Vec::with_capacity(n);
        let mut p = *p0;
        for _ in 0..n {
            out.push(p);
            p = self.nilrotate(&p);
        }
        out
    }

    /// `T^k p0` from the closed form of `τ^k`.
    pub fn orbit_point(&self, p0: &NilPoint, k: u64) -> NilPoint {
        let tk = match self.space {
            Space::Heisenberg => self.tau.heis_pow(k),
            Space::Torus(_) => {
                let kf = k as f64;
                GroupElement::new(kf * self.tau.x, kf * self.tau.y, kf * self.tau.z)
            }
        };
        self.space.reduce(self.space.mul(tk, p0.lift()))
    }

    /// Compensated Birkhoff average `(1/n) Σ_{k<n} f(T^k p0)`.
    pub fn birkhoff_avg(&self, f: &Observable, p0: &NilPoint, n: usize) -> Complex64 {
        if n == 0 {
            return Complex64::new(0.0, 0.0);
        }
        let values = self.orbit_values(f, p0, n);
        let sum: par::ComplexKahan = values.into_iter().collect();
        sum.value() / n as f64
    }

    /// `f` evaluated along the orbit of `p0` for `n` steps.
    pub fn orbit_values(&self, f: &Observable, p0: &NilPoint, n: usize) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(n);
        let mut p = *p0;
        for _ in 0..n {
            out.push(f.eval(&p));
            p = self.nilrotate(&p);
        }
        out
    }

    /// Rotation of the 2-torus factor induced by `T`.
    pub fn factor_rotation(&self) -> Result<NilSystem> {
        if !self.space.is_heisenberg() {
            return Err(Error::InvalidArgument("torus factor of a non-Heisenberg system".into()));
        }
        let mut z = NilSystem::torus(&[self.tau.x, self.tau.y])?;
        z.certificate = self.certificate.clone();
        Ok(z)
    }
}

/// `(x, y, z)Γ ↦ (x, y)` onto the 2-torus `G/(G_2 Γ)`.
pub fn project_torus_factor(p: &NilPoint) -> Result<NilPoint> {
    if !p.space().is_heisenberg() {
        return Err(Error::SpaceMismatch {
            expected: Space::Heisenberg,
            found: p.space(),
        });
    }
    NilPoint::new(Space::Torus(2), &[p.x(), p.y()])
}

/// `V_u p = reduce(lift(p)·(0, 0, u))`.
#[inline]
pub fn vertical_rotate(p: &NilPoint, u: f64) -> NilPoint {
    debug_assert!(p.space().is_heisenberg());
    crate::nilgroup::reduce(crate::nilgroup::heis_mul(p.lift(), GroupElement::central(u)))
}

/// `(1/grid) Σ_j f(V_{j/grid} p)`: the conditional expectation onto the
/// torus factor, discretized on a uniform grid of the fiber circle.
pub fn vertical_average(f: &Observable, p: &NilPoint, grid: usize) -> Complex64 {
    let grid = grid.max(1);
    let s: par::ComplexKahan = (0..grid)
        .map(|j| f.eval(&vertical_rotate(p, j as f64 / grid as f64)))
        .collect();
    s.value() / grid as f64
}

/// Monte Carlo Haar integral of `f`: mean and standard error (of the modulus
/// of the complex fluctuation).
pub fn haar_integral(space: Space, f: &Observable, n: usize, seed: u64) -> (Complex64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = haar_sample_with(space, n, &mut rng);
    let mean = par::complex_mean(n, |i| f.eval(&pts[i]));
    let var = pts
        .iter()
        .map(|p| (f.eval(p) - mean).norm_sqr())
        .collect::<par::KahanSum>()
        .value()
        / (n.max(2) - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Continuity {
    Continuous,
    /// Continuous off a Haar-null set (canonical-coordinate jumps).
    AlmostEverywhere,
}

/// Closed-form observable shapes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObservableKind {
    Constant,
    /// `e^{2πi m·p}` on canonical coordinates.
    Character(Vec<i32>),
    /// `Π_c (1 + cos 2π p_c)/2` over the horizontal coordinates.
    Bump,
}

/// `scale · kind(p)`, optionally conjugated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    pub kind: ObservableKind,
    pub scale: Complex64,
    pub conjugate: bool,
}

impl Observable {
    pub fn constant(c: Complex64) -> Self {
        Self {
            kind: ObservableKind::Constant,
            scale: c,
            conjugate: false,
        }
    }

    pub fn character(freq: &[i32]) -> Self {
        Self {
            kind: ObservableKind::Character(freq.to_vec()),
            scale: Complex64::new(1.0, 0.0),
            conjugate: false,
        }
    }

    /// `e^{2πi z}` on the Heisenberg nilmanifold.
    pub fn vertical_character() -> Self {
        Self::character(&[0, 0, 1])
    }

    pub fn bump() -> Self {
        Self {
            kind: ObservableKind::Bump,
            scale: Complex64::new(1.0, 0.0),
            conjugate: false,
        }
    }

    pub fn scaled(mut self, c: Complex64) -> Self {
        self.scale *= c;
        self
    }

    pub fn conj(mut self) -> Self {
        self.conjugate = !self.conjugate;
        self
    }

    /// `sup |f|`.
    pub fn bound(&self) -> f64 {
        self.scale.norm()
    }

    pub fn continuity(&self, space: Space) -> Continuity {
        match (&self.kind, space) {
            (ObservableKind::Character(m), Space::Heisenberg) if m.get(2).copied().unwrap_or(0) != 0 => {
                Continuity::AlmostEverywhere
            }
            _ => Continuity::Continuous,
        }
    }

    /// Checks that the observable is defined on `space`.
    pub fn check_space(&self, space: Space) -> Result<()> {
        if let ObservableKind::Character(m) = &self.kind {
            if m.len() != space.dim() {
                return Err(Error::InvalidArgument(format!(
                    "character {} has {} frequencies but {space} has dimension {}",
                    self.id(),
                    m.len(),
                    space.dim()
                )));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn eval(&self, p: &NilPoint) -> Complex64 {
        let raw = match &self.kind {
            ObservableKind::Constant => Complex64::new(1.0, 0.0),
            ObservableKind::Character(m) => {
                let phase: f64 = m.iter().zip(p.coords()).map(|(k, c)| *k as f64 * c).sum();
                Complex64::from_polar(1.0, TAU * phase)
            }
            ObservableKind::Bump => {
                let horiz = if p.space().is_heisenberg() { 2 } else { p.coords().len() };
                let v: f64 = p.coords()[..horiz]
                    .iter()
                    .map(|c| 0.5 * (1.0 + (TAU * c).cos()))
                    .product();
                Complex64::new(v, 0.0)
            }
        };
        let v = self.scale * raw;
        if self.conjugate {
            v.conj()
        } else {
            v
        }
    }

    /// Identifier in the `kind:args` form accepted by [`Observable::parse`].
    pub fn id(&self) -> String {
        let base = match &self.kind {
            ObservableKind::Constant => format!("const:{}", self.scale.re),
            ObservableKind::Character(m) => format!(
                "char:{}",
                m.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")
            ),
            ObservableKind::Bump => "bump".to_string(),
        };
        if self.conjugate {
            format!("conj({base})")
        } else {
            base
        }
    }

    /// Parses `char:m1,m2,…`, `vchar`, `const:c` or `bump`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("unrecognized observable '{s}'"));
        match s.split_once(':') {
            Some(("char", args)) => {
                let freq = args
                    .split(',')
                    .map(|t| t.trim().parse::<i32>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Self::character(&freq))
            }
            Some(("const", v)) => {
                let c: f64 = v.trim().parse().map_err(|_| bad())?;
                Ok(Self::constant(Complex64::new(c, 0.0)))
            }
            None if s == "vchar" => Ok(Self::vertical_character()),
            None if s == "bump" => Ok(Self::bump()),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

/// Rotation of the circle by `t` for the extra coordinate of `X × 𝕋`.
#[inline]
pub(crate) fn circle_rotate(t: f64, by: f64) -> f64 {
    frac(t + by)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nilgroup::{dist_canonical, haar_sample, reduce};

    fn heis() -> NilSystem {
        NilSystem::heisenberg_default()
    }

    #[test]
    fn nilrotate_examples() {
        let t1 = NilSystem::torus_default(1).unwrap();
        let p = t1.nilrotate(&t1.base_point());
        assert!((p.x() - default_alpha()).abs() < 1e-15);

        let id = NilSystem::heisenberg(0.0, 0.0, 0.0);
        let q = NilPoint::heisenberg(0.2, 0.4, 0.9).unwrap();
        assert_eq!(id.nilrotate(&q), q);
        assert!(id.require_ergodic().is_err());

        let h = heis();
        let (a, b) = (h.tau.x, h.tau.y);
        let two = h.nilrotate(&h.nilrotate(&h.base_point()));
        let expected = reduce(GroupElement::new(2.0 * a, 2.0 * b, a * b));
        assert!(two.lift().max_abs_diff(&expected.lift()) < 1e-12);
    }

    #[test]
    fn orbit_examples() {
        let h = heis();
        let p0 = NilPoint::heisenberg(0.1, 0.7, 0.3).unwrap();
        assert_eq!(h.orbit(&p0, 1), vec![p0]);

        let t = NilSystem::torus_default(2).unwrap();
        let q0 = NilPoint::new(Space::Torus(2), &[0.5, 0.25]).unwrap();
        for (k, p) in t.orbit(&q0, 50).iter().enumerate() {
            let x = frac(0.5 + k as f64 * t.tau.x);
            let y = frac(0.25 + k as f64 * t.tau.y);
            assert!((p.coords()[0] - x).abs() < 1e-12 && (p.coords()[1] - y).abs() < 1e-12);
        }
    }

    #[test]
    fn iterated_orbit_matches_closed_form() {
        let h = heis();
        let p0 = NilPoint::heisenberg(0.3, 0.6, 0.2).unwrap();
        let orbit = h.orbit(&p0, 1001);
        for k in [0usize, 1, 2, 17, 500, 1000] {
            let closed = h.orbit_point(&p0, k as u64);
            let dev = orbit[k].lift().max_abs_diff(&closed.lift());
            assert!(dev < 1e-8, "k={k} deviation {dev}");
        }
    }

    #[test]
    fn birkhoff_examples() {
        let t = NilSystem::torus_default(1).unwrap();
        let c = Complex64::new(0.7, -0.2);
        let avg = t.birkhoff_avg(&Observable::constant(c), &t.base_point(), 1000);
        assert!((avg - c).norm() < 1e-15);

        let f = Observable::character(&[1]);
        let alpha = t.tau.x;
        for n in [10usize, 1000, 100_000] {
            let avg = t.birkhoff_avg(&f, &t.base_point(), n);
            let bound = 2.0 / (n as f64 * (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, TAU * alpha)).norm());
            assert!(avg.norm() <= bound + 1e-12, "n={n}");
        }
    }

    #[test]
    fn heisenberg_horizontal_equidistribution() {
        let h = heis();
        let f = Observable::character(&[1, 0, 0]);
        let avg = h.birkhoff_avg(&f, &h.base_point(), 1_000_000);
        assert!(avg.norm() <= 0.02);
        let (mc, se) = haar_integral(Space::Heisenberg, &f, 100_000, 5);
        assert!((avg - mc).norm() < 3.0 * se + 0.02);
    }

    #[test]
    fn projection_examples() {
        let p = NilPoint::heisenberg(0.5, 0.3, 0.7).unwrap();
        let z = project_torus_factor(&p).unwrap();
        assert_eq!(z.coords(), &[0.5, 0.3]);
        assert!(project_torus_factor(&Space::Torus(2).base_point()).is_err());

        let h = heis();
        let s = h.factor_rotation().unwrap();
        for p in haar_sample(Space::Heisenberg, 10_000, 1) {
            let lhs = project_torus_factor(&h.nilrotate(&p)).unwrap();
            let rhs = s.nilrotate(&project_torus_factor(&p).unwrap());
            assert!(dist_canonical(&lhs, &rhs, &s.metric) < 1e-9);
        }

        let n = 100_000;
        let pts = haar_sample(Space::Heisenberg, n, 2);
        let mx = pts.iter().map(|p| p.x()).sum::<f64>() / n as f64;
        let my = pts.iter().map(|p| p.y()).sum::<f64>() / n as f64;
        let tol = 3.0 / (n as f64).sqrt();
        assert!((mx - 0.5).abs() < tol && (my - 0.5).abs() < tol);
    }

    #[test]
    fn vertical_rotation_examples() {
        let h = heis();
        let pts = haar_sample(Space::Heisenberg, 10_000, 4);
        let us = haar_sample(Space::Torus(1), 10_000, 5);
        for (p, u) in pts.iter().zip(&us) {
            let u = u.x();
            assert_eq!(vertical_rotate(p, 0.0), *p);
            let back = vertical_rotate(&vertical_rotate(p, u), 1.0 - u);
            assert!(circle_dist_3(&back, p) < 1e-9);
            let lhs = vertical_rotate(&h.nilrotate(p), u);
            let rhs = h.nilrotate(&vertical_rotate(p, u));
            assert!(circle_dist_3(&lhs, &rhs) < 1e-9);
            let pr = project_torus_factor(&vertical_rotate(p, u)).unwrap();
            assert_eq!(pr, project_torus_factor(p).unwrap());
        }
    }

    fn circle_dist_3(p: &NilPoint, q: &NilPoint) -> f64 {
        p.coords()
            .iter()
            .zip(q.coords())
            .map(|(a, b)| crate::nilgroup::circle_dist(*a, *b))
            .fold(0.0, f64::max)
    }

    #[test]
    fn vertical_average_examples() {
        let f = Observable::character(&[1, 2, 0]);
        let p = NilPoint::heisenberg(0.31, 0.77, 0.12).unwrap();
        assert!((vertical_average(&f, &p, 7) - f.eval(&p)).norm() < 1e-12);

        let v = Observable::vertical_character();
        for grid in [16usize, 17, 64] {
            assert!(vertical_average(&v, &p, grid).norm() < 1e-10);
        }

        let mixed = Observable::bump();
        let base = vertical_average(&mixed, &p, 32);
        let moved = vertical_average(&mixed, &vertical_rotate(&p, 0.013), 32);
        assert!((base - moved).norm() <= TAU / 32.0);
    }

    #[test]
    fn vertical_rotation_preserves_haar_integrals() {
        let n = 100_000;
        let pts = haar_sample(Space::Heisenberg, n, 9);
        let tol = 3.0 / (n as f64).sqrt();
        for f in [Observable::character(&[1, 0, 1]), Observable::vertical_character(), Observable::bump()] {
            let a: Complex64 = pts.iter().map(|p| f.eval(p)).sum::<Complex64>() / n as f64;
            let b: Complex64 = pts.iter().map(|p| f.eval(&vertical_rotate(p, 0.37))).sum::<Complex64>() / n as f64;
            let (exact, _) = haar_integral(Space::Heisenberg, &f, n, 10);
            assert!((b - exact).norm() < 2.0 * tol + (a - exact).norm(), "{}", f.id());
        }
    }

    #[test]
    fn certificate_screen() {
        let h = heis();
        assert!(h.require_ergodic().is_ok());
        let a = h.tau.x;
        let mut rational = h.certificate.clone();
        rational.push("alpha*s", a * 0.5);
        assert!(rational.find_relation(RELATION_HEIGHT, RELATION_TOL).is_some());
        let mut good = h.certificate.clone();
        good.push("alpha*s", a * default_shear());
        assert!(good.find_relation(RELATION_HEIGHT, RELATION_TOL).is_none());
        let rel = find_integer_relation(&[1.0, 0.25], 8, 1e-12).unwrap();
        assert!((rel[0] as f64 + rel[1] as f64 * 0.25).abs() < 1e-12);
    }

    #[test]
    fn observable_parse_roundtrip() {
        for s in ["char:1", "char:1,0,-2", "const:2.5", "bump"] {
            assert_eq!(Observable::parse(s).unwrap().id(), s);
        }
        assert_eq!(Observable::parse("vchar").unwrap(), Observable::vertical_character());
        assert!(Observable::parse("wave:3").is_err());
        assert!(Observable::character(&[1, 0]).check_space(Space::Heisenberg).is_err());
        assert_eq!(
            Observable::vertical_character().continuity(Space::Heisenberg),
            Continuity::AlmostEverywhere
        );
    }

    #[test]
    fn observable_bound_holds() {
        let f = Observable::bump().scaled(Complex64::new(0.0, 2.0)).conj();
        for p in haar_sample(Space::Heisenberg, 1000, 12) {
            assert!(f.eval(&p).norm() <= f.bound() + 1e-12);
        }
    }
}
