//! Gowers–Host–Kra seminorm estimators.
//!
//! Two finite-length stand-ins for the limit in the recursion
//! `‖f‖_{U^{k+1}}^{2^{k+1}} = lim (1/N) Σ_{n≤N} ‖f̄·Tⁿf‖_{U^k}^{2^k}`:
//!
//! * [`uk_recursive`] walks the recursion on a single orbit, with `U¹`
//!   evaluated as a Birkhoff average from the base point;
//! * [`uk_cube`] unrolls it into a `k`-dimensional cube average over
//!   `n ∈ [1, n_side]^k` and Monte Carlo base points.
//!
//! Both report the `2^k`-th root of a real average together with a
//! stability half-width derived from the standard error of that average.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nilgroup::haar_sample;
use crate::par::{self, KahanSum};
use crate::systems::{NilSystem, Observable};

/// Largest supported seminorm order.
pub const MAX_K: u32 = 3;

/// Ceiling on the number of observable products a single estimate may cost.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostGuard {
    pub max_evals: f64,
}

impl Default for CostGuard {
    fn default() -> Self {
        Self { max_evals: 1e9 }
    }
}

impl CostGuard {
    fn check(&self, k: u32, cost: f64, what: &str) -> Result<()> {
        if k > MAX_K {
            return Err(Error::Budget(format!("k = {k} exceeds the ceiling k <= {MAX_K}")));
        }
        if cost > self.max_evals {
            return Err(Error::Budget(format!(
                "{what} needs {cost:.3e} evaluations, budget is {:.3e}",
                self.max_evals
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    Recursive,
    Cube,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeminormEstimate {
    pub k: u32,
    /// `max(0, raw)^{1/2^k}`.
    pub value: f64,
    /// Averaging length per level (recursive) or per cube side (cube).
    pub n_side: usize,
    /// Orbit length of the innermost average (recursive) or number of
    /// Monte Carlo base points (cube).
    pub n_base: usize,
    pub seed: Option<u64>,
    pub estimator: Estimator,
    /// Half-width of the root interval spanned by `raw ± 2·se`.
    pub stability: f64,
    /// The `2^k`-th power before taking the root.
    pub raw: f64,
    pub raw_se: f64,
    /// Imaginary part of the cube average; zero for the recursive form.
    pub imag: f64,
}

impl SeminormEstimate {
    fn from_raw(k: u32, estimator: Estimator, raw: Complex64, se: f64) -> Self {
        let lo = root(raw.re - 2.0 * se, k);
        let hi = root(raw.re + 2.0 * se, k);
        Self {
            k,
            value: root(raw.re, k),
            n_side: 0,
            n_base: 0,
            seed: None,
            estimator,
            stability: 0.5 * (hi - lo),
            raw: raw.re,
            raw_se: se,
            imag: raw.im.abs(),
        }
    }
}

fn root(v: f64, k: u32) -> f64 {
    v.max(0.0).powf(1.0 / f64::from(1u32 << k))
}

fn prepare(sys: &NilSystem, f: &Observable) -> Result<()> {
    sys.require_ergodic()?;
    f.check_space(sys.space)
}

/// `|(1/n) Σ_{j<n} f(T^j e_X)|`.
pub fn u1(sys: &NilSystem, f: &Observable, n: usize) -> Result<SeminormEstimate> {
    prepare(sys, f)?;
    if n == 0 {
        return Err(Error::InvalidArgument("u1 needs n >= 1".into()));
    }
    let vals = sys.orbit_values(f, &sys.base_point(), n);
    let mean = vals.iter().copied().collect::<par::ComplexKahan>().value() / n as f64;
    // Spread of 16 block means of the orbit as the noise proxy.
    let blocks = 16.min(n);
    let len = n / blocks;
    let block_abs: Vec<f64> = (0..blocks)
        .map(|b| {
            let s: par::ComplexKahan = vals[b * len..(b + 1) * len].iter().copied().collect();
            (s.value() / len as f64 - mean).norm()
        })
        .collect();
    let se = if blocks > 1 {
        (block_abs.iter().map(|d| d * d).sum::<f64>() / (blocks * (blocks - 1)) as f64).sqrt()
    } else {
        0.0
    };
    let value = mean.norm();
    Ok(SeminormEstimate {
        k: 1,
        value,
        n_side: 0,
        n_base: n,
        seed: None,
        estimator: Estimator::Recursive,
        stability: 2.0 * se,
        raw: value,
        raw_se: se,
        imag: 0.0,
    })
}

/// `|Σ_{j<n_base} v[j]|² / n_base²`, or for `k > 1` the average over
/// `n = 1..=n_outer` of the same quantity one level down applied to
/// `j ↦ conj(v[j])·v[j+n]`.
fn level(v: &[Complex64], k: u32, n_outer: usize, n_base: usize) -> f64 {
    match k {
        1 => {
            let s: Complex64 = v[..n_base].iter().sum();
            (s / n_base as f64).norm_sqr()
        }
        2 => {
            let mut acc = KahanSum::new();
            for n in 1..=n_outer {
                let s: Complex64 = (0..n_base).map(|j| v[j].conj() * v[j + n]).sum();
                acc.add((s / n_base as f64).norm_sqr());
            }
            acc.value() / n_outer as f64
        }
        _ => {
            let m = v.len() - n_outer;
            let mut g = vec![Complex64::new(0.0, 0.0); m];
            let mut acc = KahanSum::new();
            for n in 1..=n_outer {
                for (j, slot) in g.iter_mut().enumerate() {
                    *slot = v[j].conj() * v[j + n];
                }
                acc.add(level(&g, k - 1, n_outer, n_base));
            }
            acc.value() / n_outer as f64
        }
    }
}

/// The recursion with every limit replaced by an average over
/// `n = 1..=n_outer`, on the orbit of the base point.
pub fn uk_recursive(
    sys: &NilSystem,
    f: &Observable,
    k: u32,
    n_outer: usize,
    n_base: usize,
    guard: &CostGuard,
) -> Result<SeminormEstimate> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("uk_recursive needs k >= 2, got {k}")));
    }
    let cost = (n_outer as f64).powi(k as i32 - 1) * n_base as f64;
    guard.check(k, cost, "recursive estimate")?;
    prepare(sys, f)?;
    if n_outer == 0 || n_base == 0 {
        return Err(Error::InvalidArgument("n_outer and n_base must be >= 1".into()));
    }

    let len = n_base + (k as usize - 1) * n_outer;
    let v = sys.orbit_values(f, &sys.base_point(), len);
    // Outer level unrolled so that its terms give a standard error.
    let terms = par::map_indexed(n_outer, |i| {
        let n = i + 1;
        let g: Vec<Complex64> = (0..len - n_outer).map(|j| v[j].conj() * v[j + n]).collect();
        level(&g, k - 1, n_outer, n_base)
    });
    let (mean, se) = par::mean_and_se(&terms);
    let mut est = SeminormEstimate::from_raw(k, Estimator::Recursive, Complex64::new(mean, 0.0), se);
    est.n_side = n_outer;
    est.n_base = n_base;
    Ok(est)
}

/// Cube average `(1/n_mc) Σ_x n_side^{−k} Σ_n Π_ε 𝒞^{|ε|} f(T^{ε·n} x)` over
/// `n_mc` Haar points drawn with `seed`.
pub fn uk_cube(
    sys: &NilSystem,
    f: &Observable,
    k: u32,
    n_side: usize,
    n_mc: usize,
    seed: u64,
    guard: &CostGuard,
) -> Result<SeminormEstimate> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("uk_cube needs k >= 2, got {k}")));
    }
    let cost = (n_side as f64).powi(k as i32) * n_mc as f64 * 2f64.powi(k as i32);
    guard.check(k, cost, "cube estimate")?;
    prepare(sys, f)?;
    if n_side == 0 || n_mc == 0 {
        return Err(Error::InvalidArgument("n_side and n_mc must be >= 1".into()));
    }

    let base = haar_sample(sys.space, n_mc, seed);
    let per_point = par::map_indexed(n_mc, |i| {
        let v = sys.orbit_values(f, &base[i], k as usize * n_side + 1);
        cube_sum(&v, k as usize, n_side) / (n_side as f64).powi(k as i32)
    });
    let mean = per_point.iter().copied().collect::<par::ComplexKahan>().value() / n_mc as f64;
    let re: Vec<f64> = per_point.iter().map(|c| c.re).collect();
    let (_, se) = par::mean_and_se(&re);
    let mut est = SeminormEstimate::from_raw(k, Estimator::Cube, mean, se);
    est.n_side = n_side;
    est.n_base = n_mc;
    est.seed = Some(seed);
    Ok(est)
}

/// Sum over `n ∈ [1, n_side]^k` of the cube product for one base point,
/// with `v[i] = f(T^i x)`. The faces with `ε_k = 0` are multiplied once per
/// prefix `(n_1, …, n_{k−1})`; the remaining faces are summed over `n_k`.
fn cube_sum(v: &[Complex64], k: usize, n_side: usize) -> Complex64 {
    let faces = 1usize << (k - 1);
    let mut offsets = vec![0usize; faces];
    let mut odd = vec![false; faces];
    for (e, o) in odd.iter_mut().enumerate() {
        *o = e.count_ones() % 2 == 1;
    }
    let mut prefix = vec![1usize; k - 1];
    let mut total = par::ComplexKahan::new();
    loop {
        let mut lower = Complex64::new(1.0, 0.0);
        for e in 0..faces {
            offsets[e] = (0..k - 1).filter(|b| e >> b & 1 == 1).map(|b| prefix[b]).sum();
            let w = v[offsets[e]];
            lower *= if odd[e] { w.conj() } else { w };
        }
        let mut inner = Complex64::new(0.0, 0.0);
        for nk in 1..=n_side {
            let mut upper = Complex64::new(1.0, 0.0);
            for e in 0..faces {
                // The ε_k = 1 face flips parity.
                let w = v[offsets[e] + nk];
                upper *= if odd[e] { w } else { w.conj() };
            }
            inner += upper;
        }
        total.add(lower * inner);

        // Odometer over the prefix.
        let mut d = 0;
        while d < k - 1 {
            prefix[d] += 1;
            if prefix[d] <= n_side {
                break;
            }
            prefix[d] = 1;
            d += 1;
        }
        if d == k - 1 {
            break;
        }
    }
    total.value()
}

/// Host–Kra monotonicity `U^k ≤ U^{k+1} + tol`.
pub fn check_monotone(lower: &SeminormEstimate, higher: &SeminormEstimate, tol: f64) -> bool {
    lower.value <= higher.value + tol
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub estimates: Vec<SeminormEstimate>,
    /// Successive differences `|v(2n) − v(n)|, |v(4n) − v(2n)|`.
    pub spreads: Vec<f64>,
    /// Whether the spreads are non-increasing (up to the tolerance).
    pub monotone_in_spread: bool,
}

/// Re-runs an estimate at `n`, `2n`, `4n` along its averaging length
/// (`n_outer` for the recursive form, `n_side` for the cube). No
/// extrapolation is applied.
pub fn convergence_study<F>(n: usize, tol: f64, mut run: F) -> Result<ConvergenceStudy>
where
    F: FnMut(usize) -> Result<SeminormEstimate>,
{
    let estimates = [n, 2 * n, 4 * n]
        .into_iter()
        .map(&mut run)
        .collect::<Result<Vec<_>>>()?;
    let spreads: Vec<f64> = estimates.windows(2).map(|w| (w[1].value - w[0].value).abs()).collect();
    let monotone_in_spread = spreads.windows(2).all(|w| w[1] <= w[0] + tol);
    Ok(ConvergenceStudy {
        estimates,
        spreads,
        monotone_in_spread,
    })
}
