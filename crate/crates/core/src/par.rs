//! Deterministic data-parallel helpers.
//!
//! Every reduction in the crate goes through [`map_chunks`] or [`map_indexed`]:
//! work is split into fixed-size chunks whose results are collected in index
//! order and then folded sequentially. The folded value therefore does not
//! depend on the number of worker threads, and a build without the `parallel`
//! feature produces bit-identical output.

use std::ops::{AddAssign, Range};

use num_complex::Complex64;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk length used by the Birkhoff and moment reductions.
pub const DEFAULT_CHUNK: usize = 4096;

/// Applies `f` to consecutive ranges of length `chunk` covering `0..len` and
/// returns the per-chunk results in order.
pub fn map_chunks<T, F>(len: usize, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    let n_chunks = len.div_ceil(chunk);
    let range = move |c: usize| c * chunk..((c + 1) * chunk).min(len);

    #[cfg(feature = "parallel")]
    {
        (0..n_chunks).into_par_iter().map(|c| f(range(c))).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n_chunks).map(|c| f(range(c))).collect()
    }
}

/// Order-preserving map over `0..len`.
pub fn map_indexed<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl AddAssign<f64> for KahanSum {
    fn add_assign(&mut self, v: f64) {
        self.add(v);
    }
}

impl FromIterator<f64> for KahanSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = KahanSum::new();
        for v in iter {
            s.add(v);
        }
        s
    }
}

/// Compensated sum of complex values (real and imaginary parts tracked separately).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ComplexKahan {
    re: KahanSum,
    im: KahanSum,
}

impl ComplexKahan {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: Complex64) {
        self.re.add(v.re);
        self.im.add(v.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl AddAssign<Complex64> for ComplexKahan {
    fn add_assign(&mut self, v: Complex64) {
        self.add(v);
    }
}

impl FromIterator<Complex64> for ComplexKahan {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut s = ComplexKahan::new();
        for v in iter {
            s.add(v);
        }
        s
    }
}

/// Compensated mean of `f(i)` for `i in 0..len`, reduced chunk by chunk in a
/// fixed order.
pub fn complex_mean<F>(len: usize, f: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync + Send,
{
    if len == 0 {
        return Complex64::new(0.0, 0.0);
    }
    let partials = map_chunks(len, DEFAULT_CHUNK, |r| r.map(&f).collect::<ComplexKahan>());
    let mut total = ComplexKahan::new();
    for p in partials {
        total.add(p.value());
    }
    total.value() / len as f64
}

/// Sample mean and standard error of the mean.
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().copied().collect::<KahanSum>().value() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss = values
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .collect::<KahanSum>()
        .value();
    let var = ss / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_beats_naive_on_cancellation() {
        let mut k = KahanSum::new();
        let mut naive = 0.0f64;
        for _ in 0..1_000_000 {
            k.add(0.1);
            naive += 0.1;
        }
        assert!((k.value() - 100_000.0).abs() < 1e-9);
        assert!((naive - 100_000.0).abs() > (k.value() - 100_000.0).abs());
    }

    #[test]
    fn neumaier_handles_large_then_small() {
        let k: KahanSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(k.value(), 2.0);
    }

    #[test]
    fn chunks_cover_range_in_order() {
        let parts = map_chunks(10, 3, |r| r.collect::<Vec<_>>());
        assert_eq!(parts.len(), 4);
        assert_eq!(parts.concat(), (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn mean_is_thread_count_independent() {
        let f = |i: usize| Complex64::from_polar(1.0, i as f64 * 0.37);
        let a = complex_mean(100_003, f);
        #[cfg(feature = "parallel")]
        {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
            let b = pool.install(|| complex_mean(100_003, f));
            assert_eq!(a, b);
        }
        let c = complex_mean(100_003, f);
        assert_eq!(a, c);
    }

    #[test]
    fn mean_and_se_of_constant() {
        let (m, se) = mean_and_se(&[2.0; 10]);
        assert_eq!(m, 2.0);
        assert_eq!(se, 0.0);
    }
}
