//! Riemann zeta and gamma functions on the complex plane, the ingestion of
//! zero ordinates, and the explicit formula for
//! `Φ(ρ e(θ)) = Σ_n |μ(n)| Σ_j (ρ e(θ))^{jn}/j`.
//!
//! `ζ` and its first two derivatives are computed together as a [`Jet`] by
//! Euler–Maclaurin summation for `Re s ≥ −½`, and through the functional
//! equation to the left of that line.

use std::f64::consts::{LN_2, PI};
use std::path::Path;

use num_complex::Complex64;

use crate::arith::ArithTable;
use crate::expsum::e_mul;
use crate::summation::par_sum_complex;
use crate::{Error, Result};

type C = Complex64;

const fn c(re: f64) -> C {
    C::new(re, 0.0)
}

/// `B_2, B_4, …, B_40`.
const BERNOULLI: [f64; 20] = [
    0.16666666666666666,
    -0.03333333333333333,
    0.023809523809523808,
    -0.03333333333333333,
    0.07575757575757576,
    -0.2531135531135531,
    1.1666666666666667,
    -7.092156862745098,
    54.971177944862156,
    -529.1242424242424,
    6192.123188405797,
    -86580.25311355312,
    1425517.1666666667,
    -27298231.067816094,
    601580873.9006424,
    -15116315767.092157,
    429614643061.1667,
    -13711655205088.332,
    488332318973593.2,
    -1.9296579341940068e16,
];

/// Value and first two derivatives of a function at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub v: C,
    pub d1: C,
    pub d2: C,
}

impl Jet {
    pub fn constant(v: C) -> Self {
        Self { v, d1: c(0.0), d2: c(0.0) }
    }

    /// The identity function at `s`.
    pub fn var(s: C) -> Self {
        Self { v: s, d1: c(1.0), d2: c(0.0) }
    }

    pub fn add(self, o: Jet) -> Jet {
        Jet { v: self.v + o.v, d1: self.d1 + o.d1, d2: self.d2 + o.d2 }
    }

    pub fn shift(self, a: C) -> Jet {
        Jet { v: self.v + a, ..self }
    }

    pub fn scale(self, a: C) -> Jet {
        Jet { v: self.v * a, d1: self.d1 * a, d2: self.d2 * a }
    }

    pub fn mul(self, o: Jet) -> Jet {
        Jet {
            v: self.v * o.v,
            d1: self.d1 * o.v + self.v * o.d1,
            d2: self.d2 * o.v + 2.0 * self.d1 * o.d1 + self.v * o.d2,
        }
    }

    pub fn recip(self) -> Jet {
        let r = 1.0 / self.v;
        Jet { v: r, d1: -self.d1 * r * r, d2: (2.0 * self.d1 * self.d1 * r - self.d2) * r * r }
    }

    pub fn exp(self) -> Jet {
        let e = self.v.exp();
        Jet { v: e, d1: e * self.d1, d2: e * (self.d2 + self.d1 * self.d1) }
    }

    /// `f ∘ self` given `f, f′, f″` at `self.v`.
    pub fn compose(self, f: C, f1: C, f2: C) -> Jet {
        Jet { v: f, d1: f1 * self.d1, d2: f2 * self.d1 * self.d1 + f1 * self.d2 }
    }

    /// `s ↦ F(1 − s)` from the jet of `F` at `1 − s`.
    fn reflect(self) -> Jet {
        Jet { v: self.v, d1: -self.d1, d2: self.d2 }
    }
}

/// `sin(πx)` and `cos(πx)` with the argument reduced exactly, so integers
/// give exact zeros.
fn sincospi(x: f64) -> (f64, f64) {
    let n = (2.0 * x).round();
    let r = x - 0.5 * n;
    let (s, c) = (PI * r).sin_cos();
    match (n as i64).rem_euclid(4) {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

/// `sin(πz)` and `cos(πz)` for complex `z`.
fn sincospi_c(z: C) -> (C, C) {
    let (s, co) = sincospi(z.re);
    let (sh, ch) = ((PI * z.im).sinh(), (PI * z.im).cosh());
    (C::new(s * ch, co * sh), C::new(co * ch, -s * sh))
}

fn is_nonpositive_integer(z: C) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// `ln Γ`, `ψ`, `ψ′` for `Re z ≥ ½` by Stirling's series after shifting to
/// `|z| ≥ 15`. The logarithm is continuous along the shift, not principal.
fn stirling(z: C) -> (C, C, C) {
    let mut w = z;
    let (mut lg, mut dg, mut tg) = (c(0.0), c(0.0), c(0.0));
    while w.norm() < 15.0 {
        lg -= w.ln();
        dg -= 1.0 / w;
        tg += 1.0 / (w * w);
        w += 1.0;
    }
    let r = 1.0 / w;
    let r2 = r * r;
    lg += (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln();
    dg += w.ln() - 0.5 * r;
    tg += r + 0.5 * r2;
    let mut p = r;
    for (k, b) in BERNOULLI.iter().take(10).enumerate() {
        let k2 = 2.0 * (k + 1) as f64;
        lg += b / (k2 * (k2 - 1.0)) * p;
        dg -= b / k2 * p * r;
        tg += b * p * r2;
        p *= r2;
    }
    (lg, dg, tg)
}

/// `ln Γ(z)`, `ψ(z)`, `ψ′(z)`, using reflection for `Re z < ½`.
fn gamma_parts(z: C) -> Result<(C, C, C)> {
    if is_nonpositive_integer(z) {
        return Err(Error::Pole(format!("Gamma at {z}")));
    }
    if z.re >= 0.5 {
        return Ok(stirling(z));
    }
    let (lg, dg, tg) = stirling(1.0 - z);
    let (s, co) = sincospi_c(z);
    Ok((c(PI.ln()) - s.ln() - lg, dg - PI * co / s, -tg + PI * PI / (s * s)))
}

/// `ln Γ(z)` on a branch that is continuous in `Re z ≥ ½`.
pub fn ln_gamma(z: C) -> Result<C> {
    gamma_parts(z).map(|p| p.0)
}

pub fn gamma_complex(z: C) -> Result<C> {
    if is_nonpositive_integer(z) {
        return Err(Error::Pole(format!("Gamma at {z}")));
    }
    if z.re >= 0.5 {
        return Ok(stirling(z).0.exp());
    }
    let (s, _) = sincospi_c(z);
    Ok(PI / (s * stirling(1.0 - z).0.exp()))
}

pub fn digamma_complex(z: C) -> Result<C> {
    gamma_parts(z).map(|p| p.1)
}

pub fn trigamma(z: C) -> Result<C> {
    gamma_parts(z).map(|p| p.2)
}

pub fn digamma(x: f64) -> Result<f64> {
    digamma_complex(c(x)).map(|z| z.re)
}

fn gamma_jet(z: C) -> Result<Jet> {
    let (_, dg, tg) = gamma_parts(z)?;
    let g = gamma_complex(z)?;
    Ok(Jet { v: g, d1: g * dg, d2: g * (dg * dg + tg) })
}

/// Euler–Maclaurin with `n` explicit terms and 20 correction terms.
fn zeta_em(s: C) -> Jet {
    let n = 20 + (s.im.abs() / 2.0).ceil() as u64;
    let sj = Jet::var(s);
    let mut v = c(0.0);
    let mut d1 = c(0.0);
    let mut d2 = c(0.0);
    for k in 1..n {
        let l = (k as f64).ln();
        let e = (-s * l).exp();
        v += e;
        d1 -= l * e;
        d2 += l * l * e;
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    // N^{−s}
    let n_s = sj.scale(c(-ln_n)).exp();
    let tail = n_s.scale(c(nf)).mul(sj.shift(c(-1.0)).recip()).add(n_s.scale(c(0.5)));
    let mut acc = Jet { v, d1, d2 }.add(tail);
    // s(s+1)…(s+2k−2)
    let mut poch = sj;
    let mut fact = 2.0;
    let mut npow = 1.0 / nf;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let k2 = 2 * (k + 1);
        acc = acc.add(poch.mul(n_s).scale(c(b / fact * npow)));
        poch = poch.mul(sj.shift(c((k2 - 1) as f64))).mul(sj.shift(c(k2 as f64)));
        fact *= ((k2 + 1) * (k2 + 2)) as f64;
        npow /= nf * nf;
    }
    acc
}

/// `ζ, ζ′, ζ″` at `s`.
pub fn zeta_jet(s: C) -> Result<Jet> {
    if s == c(1.0) {
        return Err(Error::Pole("zeta at s = 1".into()));
    }
    if s.re >= -0.5 {
        return Ok(zeta_em(s));
    }
    // ζ(s) = (2π)^s/π · sin(πs/2) Γ(1−s) ζ(1−s)
    let sj = Jet::var(s);
    let pre = sj.scale(c(LN_2 + PI.ln())).shift(c(-PI.ln())).exp();
    let (sn, co) = sincospi_c(s / 2.0);
    let h = PI / 2.0;
    let sin = Jet { v: sn, d1: h * co, d2: -h * h * sn };
    let g = gamma_jet(1.0 - s)?.reflect();
    let z = zeta_em(1.0 - s).reflect();
    Ok(pre.mul(sin).mul(g).mul(z))
}

pub fn zeta_complex(s: C) -> Result<C> {
    zeta_jet(s).map(|j| j.v)
}

pub fn zeta_derivative(s: C, order: u32) -> Result<C> {
    let j = zeta_jet(s)?;
    match order {
        0 => Ok(j.v),
        1 => Ok(j.d1),
        2 => Ok(j.d2),
        _ => Err(Error::InvalidArgument(format!("derivative order {order} not supported"))),
    }
}

fn zeta_real(x: f64) -> Result<Jet> {
    zeta_jet(c(x))
}

/// Ordinates `t_k` of nontrivial zeros `½ + i t_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroTable {
    pub ordinates: Vec<f64>,
    pub source: String,
}

impl ZeroTable {
    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    pub fn max_ordinate(&self) -> f64 {
        *self.ordinates.last().expect("nonempty table")
    }

    pub fn zero(&self, k: usize) -> C {
        C::new(0.5, self.ordinates[k])
    }
}

pub fn parse_zeros(text: &str, source: &str) -> Result<ZeroTable> {
    let mut ordinates = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let t: f64 = line
            .parse()
            .map_err(|_| Error::ZeroTable(format!("{source}:{}: cannot parse `{line}`", i + 1)))?;
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::ZeroTable(format!("{source}:{}: ordinate must be positive", i + 1)));
        }
        if ordinates.last().is_some_and(|&p| t <= p) {
            return Err(Error::ZeroTable(format!("{source}:{}: ordinates not strictly increasing", i + 1)));
        }
        ordinates.push(t);
    }
    if ordinates.is_empty() {
        return Err(Error::ZeroTable(format!("{source}: no ordinates")));
    }
    Ok(ZeroTable { ordinates, source: source.to_string() })
}

pub fn load_zeros(path: &Path) -> Result<ZeroTable> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_zeros(&text, &path.display().to_string())
}

/// The first 100 ordinates shipped with the crate.
pub fn bundled_zeros() -> ZeroTable {
    parse_zeros(include_str!("../data/zeros100.txt"), "bundled:zeros100.txt").expect("bundled table is valid")
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Coefficients `(c₁, c₂)` of the residue `(c₁ log y + c₂) y^{−n}` of
/// `Γ(s)ζ(s+1)ζ(s)y^s/ζ(2s)` at the trivial zero `s = −n`.
///
/// Written with `P₀ = ζ(1−n)ζ(−n)` and `P₁ = (ζ(1−n)ζ(−n))′`, so a vanishing
/// factor needs no special case: `c₁ = 0` for `n ≥ 2` and `c₂` keeps the
/// surviving `ζ′` term.
pub fn trivial_coeffs(n: u32) -> Result<(f64, f64)> {
    if !(1..=20).contains(&n) {
        return Err(Error::InvalidArgument(format!("trivial_coeffs needs 1 <= n <= 20, got {n}")));
    }
    let nf = f64::from(n);
    let a = zeta_real(1.0 - nf)?;
    let b = zeta_real(-nf)?;
    let z2 = zeta_real(-2.0 * nf)?;
    let p0 = a.v.re * b.v.re;
    let p1 = a.d1.re * b.v.re + a.v.re * b.d1.re;
    let zp = z2.d1.re;
    let zpp = z2.d2.re;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let k = sign / (2.0 * factorial(n) * zp);
    let c1 = k * p0;
    let c2 = k * (p1 + p0 * (digamma(nf + 1.0)? - zpp / zp));
    Ok((c1, c2))
}

/// `y = X/(1 − 2πiXθ)`.
pub fn y_param(x: f64, theta: f64) -> C {
    c(x) / C::new(1.0, -2.0 * PI * x * theta)
}

/// Principal `log y`.
fn log_y(x: f64, theta: f64) -> C {
    c(x.ln()) - C::new(1.0, -2.0 * PI * x * theta).ln()
}

/// `θ(X) = (1/2π)√(X^{−4/3} − X^{−2})`, which makes `XΔ³ = 1`.
pub fn theta_of_x(x: f64) -> f64 {
    (x.powf(-4.0 / 3.0) - x.powi(-2)).max(0.0).sqrt() / (2.0 * PI)
}

/// `Δ = (1 + 4π²X²θ²)^{−1/2}`.
pub fn delta_param(x: f64, theta: f64) -> f64 {
    let u = 2.0 * PI * x * theta;
    1.0 / (1.0 + u * u).sqrt()
}

/// Leading term `Φ₂,₀ = y + log(y/2π)`.
pub fn phi20(x: f64, theta: f64) -> C {
    y_param(x, theta) + log_y(x, theta) - (2.0 * PI).ln()
}

/// Precomputed zero and trivial-zero constants for repeated evaluation of
/// `Φ₂`.
#[derive(Clone, Debug)]
pub struct ExplicitFormula {
    /// `(ϖ, Γ(ϖ/2)ζ(1+ϖ/2)ζ(ϖ/2)/(2ζ′(ϖ)))` for each zero in the upper half
    /// plane.
    zeros: Vec<(C, C)>,
    trivial: Vec<(f64, f64)>,
}

impl ExplicitFormula {
    pub fn new(zeros: &ZeroTable, t_count: usize, n_trivial: usize) -> Result<Self> {
        if t_count > zeros.len() {
            return Err(Error::ZeroTable(format!(
                "{t_count} zeros requested, table has {}",
                zeros.len()
            )));
        }
        let zs = (0..t_count)
            .map(|k| {
                let w = zeros.zero(k);
                let h = w / 2.0;
                let k = gamma_complex(h)? * zeta_complex(1.0 + h)? * zeta_complex(h)?
                    / (2.0 * zeta_derivative(w, 1)?);
                Ok((w, k))
            })
            .collect::<Result<Vec<_>>>()?;
        let trivial = (1..=n_trivial as u32).map(trivial_coeffs).collect::<Result<Vec<_>>>()?;
        Ok(Self { zeros: zs, trivial })
    }

    pub fn t_count(&self) -> usize {
        self.zeros.len()
    }

    pub fn n_trivial(&self) -> usize {
        self.trivial.len()
    }

    /// Contribution of the zero pairs `ϖ, ϖ̄`.
    pub fn zero_sum(&self, x: f64, theta: f64) -> C {
        let ly = log_y(x, theta);
        self.zeros
            .iter()
            .map(|&(w, k)| k * (w / 2.0 * ly).exp() + k.conj() * (w.conj() / 2.0 * ly).exp())
            .sum()
    }

    pub fn trivial_sum(&self, x: f64, theta: f64) -> C {
        let ly = log_y(x, theta);
        self.trivial
            .iter()
            .enumerate()
            .map(|(i, &(c1, c2))| (c1 * ly + c2) * (-((i + 1) as f64) * ly).exp())
            .sum()
    }

    pub fn phi2(&self, x: f64, theta: f64) -> C {
        phi20(x, theta) + self.zero_sum(x, theta) + self.trivial_sum(x, theta)
    }
}

pub fn phi2_explicit(x: f64, theta: f64, t_count: usize, n_trivial: usize, zeros: &ZeroTable) -> Result<C> {
    if !(x >= 1.0) {
        return Err(Error::InvalidArgument(format!("X must be at least 1, got {x}")));
    }
    Ok(ExplicitFormula::new(zeros, t_count, n_trivial)?.phi2(x, theta))
}

/// Terms with `jn/X` beyond this are below `e^{−60}` and are skipped.
pub const PHI1_CUTOFF: f64 = 60.0;

/// `Σ_{j≤J} Σ_{n≤N} |μ(n)|/j · exp(−jn(1/X − 2πiθ))`.
pub fn phi1_arithmetic(x: f64, theta: f64, j_max: usize, n_max: usize, mu_abs: &ArithTable) -> Result<C> {
    if n_max > mu_abs.limit() {
        return Err(Error::LimitMismatch(n_max, mu_abs.limit()));
    }
    if !(x > 0.0) {
        return Err(Error::InvalidArgument(format!("X must be positive, got {x}")));
    }
    Ok(par_sum_complex(1, n_max, |n| {
        let w = mu_abs.get(n);
        if w == 0.0 {
            return c(0.0);
        }
        let mut acc = c(0.0);
        for j in 1..=j_max {
            let m = (j * n) as f64;
            if m / x > PHI1_CUTOFF {
                break;
            }
            acc += e_mul(theta, m) * ((-m / x).exp() / j as f64);
        }
        acc * w
    }))
}

/// One abscissa of the arithmetic/analytic comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct ExplicitEval {
    pub x: f64,
    pub theta: f64,
    pub j: usize,
    pub n_arith: usize,
    pub t_count: usize,
    pub n_trivial: usize,
    pub phi1: C,
    pub phi2: C,
    pub phi20: C,
    pub delta: f64,
    /// `XΔ³ ≥ 1` (up to rounding).
    pub x_delta3_ok: bool,
}

impl ExplicitEval {
    /// `|Φ₁ − Φ₂| / |Φ₂,₀|`.
    pub fn relative_residual(&self) -> f64 {
        (self.phi1 - self.phi2).norm() / self.phi20.norm()
    }
}

pub fn explicit_eval(
    x: f64,
    theta: f64,
    j: usize,
    n_arith: usize,
    formula: &ExplicitFormula,
    mu_abs: &ArithTable,
) -> Result<ExplicitEval> {
    let delta = delta_param(x, theta);
    Ok(ExplicitEval {
        x,
        theta,
        j,
        n_arith,
        t_count: formula.t_count(),
        n_trivial: formula.n_trivial(),
        phi1: phi1_arithmetic(x, theta, j, n_arith, mu_abs)?,
        phi2: formula.phi2(x, theta),
        phi20: phi20(x, theta),
        delta,
        x_delta3_ok: x * delta.powi(3) >= 1.0 - 1e-9,
    })
}
