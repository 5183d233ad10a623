//! Compensated summation and a deterministic chunked parallel reduction.
//!
//! Every long sum in the crate goes through [`Neumaier`] (Kahan–Babuška) so
//! that results do not depend on the number of worker threads: chunk
//! boundaries are fixed and partial sums are merged by a fixed pairwise tree.

use num_complex::Complex64;
use rayon::prelude::*;

/// Number of terms handled by one worker before merging.
pub const CHUNK: usize = 1 << 14;

/// Kahan–Babuška accumulator.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &Neumaier) {
        self.add(other.sum);
        self.comp += other.comp;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Componentwise compensated complex accumulator.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ComplexSum {
    re: Neumaier,
    im: Neumaier,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn merge(&mut self, other: &ComplexSum) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Compensated sum of a real slice.
pub fn sum_f64(xs: &[f64]) -> f64 {
    let mut acc = Neumaier::new();
    xs.iter().for_each(|&x| acc.add(x));
    acc.value()
}

fn tree_merge(mut parts: Vec<ComplexSum>) -> ComplexSum {
    if parts.is_empty() {
        return ComplexSum::new();
    }
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        for pair in parts.chunks(2) {
            let mut acc = pair[0];
            if let Some(b) = pair.get(1) {
                acc.merge(b);
            }
            next.push(acc);
        }
        parts = next;
    }
    parts[0]
}

/// Sums `term(n)` for `n` in `lo..=hi`. The result is independent of the
/// rayon pool size.
pub fn par_sum_complex<F>(lo: usize, hi: usize, term: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync,
{
    if hi < lo {
        return Complex64::new(0.0, 0.0);
    }
    let len = hi - lo + 1;
    let chunks = len.div_ceil(CHUNK);
    let parts: Vec<ComplexSum> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let a = lo + c * CHUNK;
            let b = (a + CHUNK - 1).min(hi);
            let mut acc = ComplexSum::new();
            for n in a..=b {
                acc.add(term(n));
            }
            acc
        })
        .collect();
    tree_merge(parts).value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_small_terms() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(sum_f64(&xs), 2.0);
    }

    #[test]
    fn parallel_sum_matches_sequential_bits() {
        let term = |n: usize| Complex64::new((n as f64).sin(), 1.0 / n as f64);
        let a = par_sum_complex(1, 100_000, term);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| par_sum_complex(1, 100_000, term));
        assert_eq!(a, b);
    }

    #[test]
    fn empty_range_is_zero() {
        assert_eq!(par_sum_complex(5, 4, |_| Complex64::new(1.0, 0.0)), Complex64::new(0.0, 0.0));
    }
}
