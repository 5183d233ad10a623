//! Twisted exponential sums `Σ_{n≤X} w(n) e(α P(n))` with `e(x) = exp(2πix)`.
//!
//! Phases are reduced mod 1 before any trigonometric call: `α` is first
//! replaced by `α − round(α)` (an exact operation), and the product with `n`
//! is split into an exact double-double before its integer part is removed.
//! This keeps the phase accurate to about `1e-16` for every `n < 2^53` and
//! makes `S(α + 1) = S(α)` and `S(−α) = conj S(α)` hold bit for bit.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::arith::{dirichlet_convolve, r_fold, sieve, ArithTable, Kind};
use crate::summation::{par_sum_complex, ComplexSum};
use crate::{Error, Result};

/// Exact product `a·b = hi + lo` (Dekker).
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    const SPLIT: f64 = 134_217_729.0;
    let p = a * b;
    let split = |x: f64| {
        let c = SPLIT * x;
        let hi = c - (c - x);
        (hi, x - hi)
    };
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let err = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, err)
}

/// `α − round(α)`, exact in floating point.
#[inline]
pub fn reduce(alpha: f64) -> f64 {
    alpha - alpha.round()
}

/// Fractional part of `α·m` in `[−½, ½]` for `α` already reduced and
/// integral `m < 2^53`.
#[inline]
pub fn frac_mul(alpha: f64, m: f64) -> f64 {
    let (p, e) = two_prod(alpha, m);
    let r = p - p.round();
    let f = r + e;
    f - f.round()
}

/// `e(f)` for a reduced phase `f`.
#[inline]
pub fn unit(f: f64) -> Complex64 {
    let (s, c) = (TAU * f).sin_cos();
    Complex64::new(c, s)
}

/// `e(α n)` for arbitrary real `α` and integral `n < 2^53`.
#[inline]
pub fn e_mul(alpha: f64, n: f64) -> Complex64 {
    unit(frac_mul(reduce(alpha), n))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Phase {
    Linear,
    Quadratic,
    /// `α·Σ c_k n^k` with `coeffs[k] = c_k`.
    Poly(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpSumResult {
    pub value: Complex64,
    pub x: u64,
    pub alpha: f64,
    pub kind: String,
    /// Number of nonzero weights summed.
    pub n_terms: u64,
}

fn check_range(weights: &ArithTable, x: u64) -> Result<()> {
    if x as usize > weights.limit() {
        return Err(Error::InvalidArgument(format!(
            "X = {x} exceeds table limit {}",
            weights.limit()
        )));
    }
    Ok(())
}

fn weighted_sum<P>(w: &[f64], x: u64, phase: P) -> (Complex64, u64)
where
    P: Fn(usize) -> f64 + Sync,
{
    let value = par_sum_complex(1, x as usize, |n| {
        let wn = w[n - 1];
        if wn == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            unit(phase(n)) * wn
        }
    });
    let n_terms = w[..x as usize].iter().filter(|&&v| v != 0.0).count() as u64;
    (value, n_terms)
}

/// `Σ_{n≤X} w(n) e(αn)`.
pub fn exp_sum_linear(weights: &ArithTable, alpha: f64, x: u64) -> Result<ExpSumResult> {
    check_range(weights, x)?;
    let a = reduce(alpha);
    let (value, n_terms) = weighted_sum(&weights.to_f64(), x, |n| frac_mul(a, n as f64));
    Ok(ExpSumResult { value, x, alpha, kind: format!("{} e(an)", weights.kind()), n_terms })
}

/// `Σ_{n≤X} w(n) e(αn²)`.
pub fn exp_sum_quadratic(weights: &ArithTable, alpha: f64, x: u64) -> Result<ExpSumResult> {
    check_range(weights, x)?;
    if x > 94_906_265 {
        return Err(Error::InvalidArgument("n^2 must stay below 2^53".into()));
    }
    let a = reduce(alpha);
    let (value, n_terms) = weighted_sum(&weights.to_f64(), x, |n| frac_mul(a, (n * n) as f64));
    Ok(ExpSumResult { value, x, alpha, kind: format!("{} e(an^2)", weights.kind()), n_terms })
}

/// `Σ_{n≤X} w(n) e(α P(n))` with `P(n) = Σ coeffs[k] n^k`.
pub fn exp_sum_poly(weights: &ArithTable, coeffs: &[f64], alpha: f64, x: u64) -> Result<ExpSumResult> {
    check_range(weights, x)?;
    if coeffs.is_empty() {
        return Err(Error::InvalidArgument("empty polynomial".into()));
    }
    let degree = coeffs.len() - 1;
    if (x as f64).powi(degree as i32) >= 2f64.powi(53) {
        return Err(Error::InvalidArgument("n^k must stay below 2^53".into()));
    }
    // α·c_k as a double-double, reduced mod 1.
    let scaled: Vec<(f64, f64)> = coeffs
        .iter()
        .map(|&c| {
            let (h, l) = two_prod(alpha, c);
            (reduce(h), l)
        })
        .collect();
    let phase = |n: usize| {
        let mut f = 0.0;
        let mut pow = 1u64;
        for &(h, l) in &scaled {
            let m = pow as f64;
            f += frac_mul(h, m) + frac_mul(reduce(l), m);
            f -= f.round();
            pow = pow.wrapping_mul(n as u64);
        }
        f
    };
    let (value, n_terms) = weighted_sum(&weights.to_f64(), x, phase);
    Ok(ExpSumResult { value, x, alpha, kind: format!("{} e(aP(n)), deg {degree}", weights.kind()), n_terms })
}

/// `Σ_{p₁⋯p_r ≤ X} e(α p₁⋯p_r)` over ordered prime tuples.
pub fn exp_sum_primes_r(r: usize, alpha: f64, x: u64) -> Result<ExpSumResult> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    if x < 2 {
        return Err(Error::InvalidArgument("X must be at least 2".into()));
    }
    let w = r_fold(&sieve(&Kind::OneP, x as usize)?, r)?;
    let mut res = exp_sum_linear(&w, alpha, x)?;
    res.kind = format!("primes^{r}");
    Ok(res)
}

/// The four pieces of `Σ_{mn≤X} f(m) g(n) e(αmn)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperbolaPieces {
    /// `m > M, n > N`.
    pub s1: Complex64,
    /// `n ≤ N`.
    pub s2: Complex64,
    /// `m ≤ M`.
    pub s3: Complex64,
    /// `m ≤ M, n ≤ N`.
    pub s4: Complex64,
}

impl HyperbolaPieces {
    pub fn recombined(&self) -> Complex64 {
        self.s1 + self.s2 + self.s3 - self.s4
    }
}

/// Splits the sum over `mn ≤ X` of `f(m) g(n) e(αmn)` into four pieces.
pub fn hyperbola_split(
    f: &ArithTable,
    g: &ArithTable,
    alpha: f64,
    x: u64,
    m_cut: f64,
    n_cut: f64,
) -> Result<HyperbolaPieces> {
    check_range(f, x)?;
    check_range(g, x)?;
    if m_cut < 1.0 || n_cut < 1.0 || m_cut * n_cut > x as f64 {
        return Err(Error::Precondition(format!("need M, N >= 1 and MN <= X, got M = {m_cut}, N = {n_cut}")));
    }
    let a = reduce(alpha);
    let fv = f.to_f64();
    let gv = g.to_f64();
    let x = x as usize;
    let mm = m_cut.floor() as usize;
    let nn = n_cut.floor() as usize;
    let term = |m: usize, n: usize| unit(frac_mul(a, (m * n) as f64)) * (fv[m - 1] * gv[n - 1]);

    let mut s1 = ComplexSum::new();
    let mut s2 = ComplexSum::new();
    let mut s3 = ComplexSum::new();
    let mut s4 = ComplexSum::new();
    for n in 1..=nn {
        if gv[n - 1] == 0.0 {
            continue;
        }
        for m in 1..=x / n {
            if fv[m - 1] != 0.0 {
                s2.add(term(m, n));
            }
        }
    }
    for m in 1..=mm {
        if fv[m - 1] == 0.0 {
            continue;
        }
        for n in 1..=x / m {
            if gv[n - 1] != 0.0 {
                s3.add(term(m, n));
            }
        }
        for n in 1..=nn {
            if gv[n - 1] != 0.0 {
                s4.add(term(m, n));
            }
        }
    }
    for n in nn + 1..=x / (mm + 1) {
        if gv[n - 1] == 0.0 {
            continue;
        }
        for m in mm + 1..=x / n {
            if fv[m - 1] != 0.0 {
                s1.add(term(m, n));
            }
        }
    }
    Ok(HyperbolaPieces { s1: s1.value(), s2: s2.value(), s3: s3.value(), s4: s4.value() })
}

/// `Σ_{n≤X} (f*g)(n) e(αn)`, the quantity [`hyperbola_split`] decomposes.
pub fn convolution_sum(f: &ArithTable, g: &ArithTable, alpha: f64, x: u64) -> Result<Complex64> {
    let fg = dirichlet_convolve(&f.truncate(x as usize)?, &g.truncate(x as usize)?)?;
    Ok(exp_sum_linear(&fg, alpha, x)?.value)
}
