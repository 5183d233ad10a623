//! Partitions into squarefree parts (and into squares of squarefree numbers),
//! the generating function `Ψ = exp Φ` near the unit circle, and the saddle
//! point `x = ρΦ′(ρ)`.
//!
//! With `c(k) = Σ_{d|k} d·w(d)` for the part indicator `w`,
//! `Φ(ρ) = Σ_k c(k)/k ρ^k` and `Φ₍ₘ₎ = (ρ d/dρ)^m Φ = Σ_k k^{m−1} c(k) ρ^k`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::{sieve, Kind};
use crate::diophantine::{ArcDissection, ArcKind};
use crate::expsum::e_mul;
use crate::summation::{par_sum_complex, Neumaier};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PartKind {
    /// Parts `n` with `μ(n) ≠ 0`.
    Squarefree,
    /// Parts `m²` with `m` squarefree.
    SquaresOfSquarefree,
}

impl fmt::Display for PartKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PartKind::Squarefree => "squarefree",
            PartKind::SquaresOfSquarefree => "squares_of_squarefree",
        })
    }
}

impl FromStr for PartKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "squarefree" => Ok(PartKind::Squarefree),
            "squares_of_squarefree" | "squares" => Ok(PartKind::SquaresOfSquarefree),
            _ => Err(Error::InvalidArgument(format!("unknown partition kind `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PartitionSeries {
    pub kind: PartKind,
    pub n_max: usize,
    /// `counts[n] = 𝔭(n)` for `0 ≤ n ≤ n_max`.
    pub counts: Vec<BigUint>,
}

fn mu_abs_flags(n: usize) -> Vec<bool> {
    let mut flags = vec![false; n + 1];
    if n >= 1 {
        let t = sieve(&Kind::MuAbs, n).expect("n >= 1");
        for (i, &v) in t.ints().expect("integer table").iter().enumerate() {
            flags[i + 1] = v != 0;
        }
    }
    flags
}

/// Part indicator `w(d)` for `0 ≤ d ≤ n`.
pub fn part_indicator(kind: PartKind, n: usize) -> Vec<bool> {
    match kind {
        PartKind::Squarefree => mu_abs_flags(n),
        PartKind::SquaresOfSquarefree => {
            let root = n.isqrt();
            let sf = mu_abs_flags(root);
            let mut w = vec![false; n + 1];
            for m in 1..=root {
                if sf[m] {
                    w[m * m] = true;
                }
            }
            w
        }
    }
}

/// `c(k) = Σ_{d|k} d·w(d)` for `0 ≤ k ≤ n` (`c(0) = 0`).
pub fn divisor_weights(kind: PartKind, n: usize) -> Vec<u64> {
    let w = part_indicator(kind, n);
    let mut c = vec![0u64; n + 1];
    for d in 1..=n {
        if w[d] {
            for m in (d..=n).step_by(d) {
                c[m] += d as u64;
            }
        }
    }
    c
}

/// Nonzero coefficients `(k, ±1)` of `Π(1 − z^m) = Σ_j (−1)^j z^{j(3j−1)/2}`
/// with `0 < k ≤ n`.
fn pentagonal(n: usize) -> Vec<(usize, bool)> {
    let mut out = Vec::new();
    for j in 1.. {
        let a = j * (3 * j - 1) / 2;
        if a > n {
            break;
        }
        let odd = j % 2 == 1;
        out.push((a, odd));
        let b = j * (3 * j + 1) / 2;
        if b <= n {
            out.push((b, odd));
        }
    }
    out
}

/// `f ← f / E(z^k)` in place, `E(z) = Π(1 − z^m)`.
fn divide_by_euler(f: &mut [BigInt], k: usize, pent: &[(usize, bool)]) {
    for n in 1..f.len() {
        let (lo, hi) = f.split_at_mut(n);
        let cur = &mut hi[0];
        for &(p, odd) in pent {
            let s = p * k;
            if s > n {
                break;
            }
            // g[n] = f[n] − Σ e_j g[n − s], e_j = (−1)^j
            if odd {
                *cur += &lo[n - s];
            } else {
                *cur -= &lo[n - s];
            }
        }
    }
}

/// `f ← f · E(z^k)` in place.
fn multiply_by_euler(f: &mut [BigInt], k: usize, pent: &[(usize, bool)]) {
    for n in (1..f.len()).rev() {
        let (lo, hi) = f.split_at_mut(n);
        let cur = &mut hi[0];
        for &(p, odd) in pent {
            let s = p * k;
            if s > n {
                break;
            }
            if odd {
                *cur -= &lo[n - s];
            } else {
                *cur += &lo[n - s];
            }
        }
    }
}

fn into_unsigned(v: Vec<BigInt>) -> Vec<BigUint> {
    v.into_iter()
        .map(|x| x.to_biguint().expect("partition counts are nonnegative"))
        .collect()
}

/// Exact counts `𝔭(0..=n_max)`.
///
/// Squarefree parts use `Ψ(z) = Π_{d squarefree} E(z^{d²})^{−μ(d)}` with the
/// sparse pentagonal expansion of `E`, about `n^{3/2} log n` big-integer
/// additions. The other kind is a direct knapsack over its `O(√n)` parts.
pub fn partition_counts(kind: PartKind, n_max: usize) -> PartitionSeries {
    let mut f = vec![BigInt::zero(); n_max + 1];
    f[0] = BigInt::from(1);
    match kind {
        PartKind::Squarefree => {
            let root = n_max.isqrt();
            let mu = if root >= 1 { sieve(&Kind::Mu, root).expect("root >= 1").ints().unwrap().to_vec() } else { vec![] };
            let pent = pentagonal(n_max);
            for d in (1..=root).filter(|&d| mu[d - 1] == 1) {
                divide_by_euler(&mut f, d * d, &pent);
            }
            for d in (1..=root).filter(|&d| mu[d - 1] == -1) {
                multiply_by_euler(&mut f, d * d, &pent);
            }
        }
        PartKind::SquaresOfSquarefree => {
            let w = part_indicator(kind, n_max);
            for part in (1..=n_max).filter(|&p| w[p]) {
                for n in part..=n_max {
                    let (lo, hi) = f.split_at_mut(n);
                    hi[0] += &lo[n - part];
                }
            }
        }
    }
    PartitionSeries { kind, n_max, counts: into_unsigned(f) }
}

/// Exact counts from `n·𝔭(n) = Σ_{m=1}^n c(m)𝔭(n−m)`, `O(n²)` big-integer
/// operations. Fails if a division is not exact.
pub fn partition_counts_recurrence(kind: PartKind, n_max: usize) -> Result<PartitionSeries> {
    let c = divisor_weights(kind, n_max);
    let mut p: Vec<BigUint> = Vec::with_capacity(n_max + 1);
    p.push(BigUint::from(1u32));
    for n in 1..=n_max {
        let s: BigUint = (1..n + 1)
            .into_par_iter()
            .with_min_len(256)
            .filter(|&m| c[m] != 0)
            .map(|m| &p[n - m] * c[m])
            .reduce(BigUint::zero, |a, b| a + b);
        let (q, r) = s.div_rem(&BigUint::from(n));
        if !r.is_zero() {
            return Err(Error::Precondition(format!("n·p(n) not divisible by n at n = {n}")));
        }
        p.push(q);
    }
    Ok(PartitionSeries { kind, n_max, counts: p })
}

/// Natural logarithm of a big integer.
pub fn ln_biguint(n: &BigUint) -> f64 {
    if n.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    let shift = bits.saturating_sub(64);
    let top = (n >> shift).to_f64().expect("fits");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Number of series terms kept at `ρ = e^{−1/X}` for `Φ₍ₘ₎` with relative
/// tolerance `tol`: `K = ⌈X(log(1/tol) + (m+2) log max(X, e) + 10)⌉`. The
/// tail beyond `K` is below `tol` times the sum.
pub fn truncation_point(m: u32, x_param: f64, tol: f64) -> usize {
    let lx = x_param.max(std::f64::consts::E).ln();
    (x_param * ((1.0 / tol).ln() + (m as f64 + 2.0) * lx + 10.0)).ceil() as usize
}

/// `c(k)` cached for repeated evaluation of `Φ` and its derivatives.
#[derive(Clone, Debug)]
pub struct PhiSeries {
    pub kind: PartKind,
    c: Vec<u64>,
}

pub const DEFAULT_TOL: f64 = 1e-17;

impl PhiSeries {
    pub fn new(kind: PartKind, k_max: usize) -> Self {
        Self { kind, c: divisor_weights(kind, k_max) }
    }

    /// Cache large enough for `X ≤ x_max`.
    pub fn for_x(kind: PartKind, x_max: f64) -> Self {
        Self::new(kind, truncation_point(2, x_max, DEFAULT_TOL))
    }

    pub fn k_max(&self) -> usize {
        self.c.len() - 1
    }

    fn terms(&self, x_param: f64, tol: f64, m: u32) -> Result<usize> {
        if !(x_param > 0.0) {
            return Err(Error::InvalidArgument(format!("X must be positive, got {x_param}")));
        }
        let k = truncation_point(m, x_param, tol);
        if k > self.k_max() {
            return Err(Error::LimitMismatch(k, self.k_max()));
        }
        Ok(k)
    }

    /// `Φ₍ₘ₎(e^{−1/X})` for `m ∈ {0, 1, 2}`.
    pub fn phi_derivative(&self, m: u32, x_param: f64, tol: f64) -> Result<f64> {
        if m > 2 {
            return Err(Error::InvalidArgument(format!("m = {m} not supported")));
        }
        let k_top = self.terms(x_param, tol, m)?;
        let mut acc = Neumaier::new();
        for k in 1..=k_top {
            let ck = self.c[k];
            if ck == 0 {
                continue;
            }
            let kf = k as f64;
            let pw = match m {
                0 => 1.0 / kf,
                1 => 1.0,
                _ => kf,
            };
            acc.add(pw * ck as f64 * (-kf / x_param).exp());
        }
        Ok(acc.value())
    }

    /// `Φ(e^{−1/X} e(α))`.
    pub fn phi_on_circle(&self, alpha: f64, x_param: f64, tol: f64) -> Result<Complex64> {
        let k_top = self.terms(x_param, tol, 0)?;
        Ok(par_sum_complex(1, k_top, |k| {
            let ck = self.c[k];
            if ck == 0 {
                return Complex64::new(0.0, 0.0);
            }
            let kf = k as f64;
            e_mul(alpha, kf) * (ck as f64 / kf * (-kf / x_param).exp())
        }))
    }
}

pub fn phi_derivative(m: u32, x_param: f64, tol: f64) -> Result<f64> {
    PhiSeries::new(PartKind::Squarefree, truncation_point(m, x_param, tol)).phi_derivative(m, x_param, tol)
}

pub fn phi_on_circle(alpha: f64, x_param: f64, tol: f64) -> Result<Complex64> {
    PhiSeries::new(PartKind::Squarefree, truncation_point(0, x_param, tol)).phi_on_circle(alpha, x_param, tol)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SaddleState {
    pub x: f64,
    pub x_param: f64,
    pub rho: f64,
    pub phi: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl SaddleState {
    /// `X − √x`.
    pub fn gap(&self) -> f64 {
        self.x_param - self.x.sqrt()
    }

    pub fn residual(&self) -> f64 {
        (self.phi1 - self.x).abs() / self.x
    }
}

pub const SADDLE_RTOL: f64 = 1e-9;
/// Lower end of the bisection bracket; `ρΦ′(ρ) < 10^{−8}` there.
pub const SADDLE_LO: f64 = 0.05;

impl PhiSeries {
    /// Solves `ρΦ′(ρ) = x` for `X` in `[0.05, 4√x + 1]` by bisection.
    pub fn solve_saddle(&self, x: f64) -> Result<SaddleState> {
        if !(x >= 1.0) {
            return Err(Error::InvalidArgument(format!("x must be at least 1, got {x}")));
        }
        let (mut lo, mut hi) = (SADDLE_LO, 4.0 * x.sqrt() + 1.0);
        let h = |xp: f64| self.phi_derivative(1, xp, DEFAULT_TOL).map(|v| v - x);
        if !(h(lo)? < 0.0 && h(hi)? > 0.0) {
            return Err(Error::NotBracketed { lo, hi });
        }
        let mut steps = 0;
        loop {
            let mid = 0.5 * (lo + hi);
            let v = h(mid)?;
            if v.abs() <= 0.25 * SADDLE_RTOL * x || hi - lo <= 4.0 * f64::EPSILON * hi {
                return self.state(x, mid);
            }
            if v < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            steps += 1;
            if steps > 200 {
                return Err(Error::NoConvergence(200));
            }
        }
    }

    fn state(&self, x: f64, x_param: f64) -> Result<SaddleState> {
        Ok(SaddleState {
            x,
            x_param,
            rho: (-1.0 / x_param).exp(),
            phi: self.phi_derivative(0, x_param, DEFAULT_TOL)?,
            phi1: self.phi_derivative(1, x_param, DEFAULT_TOL)?,
            phi2: self.phi_derivative(2, x_param, DEFAULT_TOL)?,
        })
    }

    /// `log 𝔭(n) ≈ n/X + Φ(ρ) − ½ log(2πΦ₍₂₎(ρ))` at the saddle for `n`.
    pub fn asymptotic_count(&self, n: u64) -> Result<(f64, SaddleState)> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("n must be at least 2, got {n}")));
        }
        let s = self.solve_saddle(n as f64)?;
        let est = n as f64 / s.x_param + s.phi - 0.5 * (2.0 * PI * s.phi2).ln();
        Ok((est, s))
    }
}

pub fn solve_saddle(x: f64) -> Result<SaddleState> {
    PhiSeries::for_x(PartKind::Squarefree, 4.0 * x.max(1.0).sqrt() + 1.0).solve_saddle(x)
}

pub fn asymptotic_count(n: u64) -> Result<(f64, SaddleState)> {
    PhiSeries::for_x(PartKind::Squarefree, 4.0 * (n.max(1) as f64).sqrt() + 1.0).asymptotic_count(n)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArcPoint {
    pub alpha: f64,
    pub kind: ArcKind,
    /// Smallest `q` of a non-principal arc containing `alpha`, else 0.
    pub q: u64,
    pub abs_phi: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArcMax {
    pub count: usize,
    pub max_abs_phi: f64,
    pub argmax: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArcReport {
    pub x_param: f64,
    pub a_param: f64,
    /// `Φ(ρ)`, the value at `α = 0`.
    pub phi_rho: f64,
    pub points: Vec<ArcPoint>,
    pub principal: ArcMax,
    pub major: ArcMax,
    pub minor: ArcMax,
    /// Largest `|Φ|·q/X` over non-principal major points.
    pub major_ratio_to_x_over_q: f64,
    /// `X (log X)^{10 − A/4}`.
    pub minor_threshold: f64,
}

fn arc_max(points: &[ArcPoint], kind: ArcKind) -> ArcMax {
    points.iter().filter(|p| p.kind == kind).fold(
        ArcMax { count: 0, max_abs_phi: 0.0, argmax: f64::NAN },
        |m, p| {
            let better = m.count == 0 || p.abs_phi > m.max_abs_phi;
            ArcMax {
                count: m.count + 1,
                max_abs_phi: if better { p.abs_phi } else { m.max_abs_phi },
                argmax: if better { p.alpha } else { m.argmax },
            }
        },
    )
}

/// `|Φ(ρ e(α))|` on the grid `α = −½ + i/grid`, split by arc type of the
/// dissection with parameters `(X, A)`.
pub fn arc_diagnostics(x_param: f64, a_param: f64, grid: usize) -> Result<ArcReport> {
    if grid < 10 {
        return Err(Error::InvalidArgument(format!("grid must be at least 10, got {grid}")));
    }
    let diss = ArcDissection::new(x_param, a_param)?;
    let series = PhiSeries::new(PartKind::Squarefree, truncation_point(0, x_param, DEFAULT_TOL));
    let points = (0..grid)
        .into_par_iter()
        .map(|i| {
            let alpha = -0.5 + i as f64 / grid as f64;
            let kind = diss.arc_kind(alpha)?;
            let q = if kind == ArcKind::Major {
                diss.nonprincipal_arcs(alpha).iter().map(|&(_, q)| q).min().unwrap_or(0)
            } else {
                0
            };
            let abs_phi = series.phi_on_circle(alpha, x_param, DEFAULT_TOL)?.norm();
            Ok(ArcPoint { alpha, kind, q, abs_phi })
        })
        .collect::<Result<Vec<_>>>()?;
    let major_ratio_to_x_over_q = points
        .iter()
        .filter(|p| p.kind == ArcKind::Major)
        .map(|p| p.abs_phi * p.q as f64 / x_param)
        .fold(0.0, f64::max);
    Ok(ArcReport {
        x_param,
        a_param,
        phi_rho: series.phi_derivative(0, x_param, DEFAULT_TOL)?,
        principal: arc_max(&points, ArcKind::PrincipalMajor),
        major: arc_max(&points, ArcKind::Major),
        minor: arc_max(&points, ArcKind::Minor),
        points,
        major_ratio_to_x_over_q,
        minor_threshold: x_param * x_param.ln().powf(10.0 - a_param / 4.0),
    })
}

fn euler_phi_and_product(q: u64) -> (f64, f64) {
    let (mut phi, mut prod, mut m, mut p) = (q as f64, 1.0, q, 2u64);
    while p * p <= m {
        if m % p == 0 {
            phi *= 1.0 - 1.0 / p as f64;
            prod *= 1.0 + 1.0 / p as f64;
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        phi *= 1.0 - 1.0 / m as f64;
        prod *= 1.0 + 1.0 / m as f64;
    }
    (phi, prod)
}

/// `1/(ζ(2) φ(q) Π_{p|q}(1 + 1/p)) · 1/γ`.
pub fn u_main_term(gamma: Complex64, q: u64) -> Complex64 {
    let (phi, prod) = euler_phi_and_product(q);
    6.0 / (PI * PI * phi * prod) / gamma
}

/// `U(γ, ℓ, q) = Σ_{n ≡ ℓ (q)} |μ(n)| e^{−nγ}`, truncated where
/// `n Re γ > 50`.
pub fn u_sum(gamma: Complex64, l: u64, q: u64) -> Result<Complex64> {
    if !(gamma.re > 0.0) || q == 0 {
        return Err(Error::InvalidArgument("need Re gamma > 0 and q >= 1".into()));
    }
    let n_max = (50.0 / gamma.re).ceil() as usize;
    let w = mu_abs_flags(n_max);
    let start = match l % q {
        0 => q,
        r => r,
    } as usize;
    let mut acc = crate::summation::ComplexSum::new();
    for n in (start..=n_max).step_by(q as usize) {
        if w[n] {
            acc.add((-gamma * n as f64).exp());
        }
    }
    Ok(acc.value())
}
