//! Bound envelopes for twisted exponential sums, the exponent schedule of the
//! `r`-fold prime sums, and the min–max balancing used to choose splitting
//! parameters.
//!
//! An envelope is a sum of monomials
//! `c · X^β · max{1,Υ}^γ · q^δ · (log X)^λ · (log q)^κ · (log log X)^ν`,
//! with all exponents exact rationals. Terms written `X^{β+ε}` carry a flag
//! and are evaluated at the envelope's `epsilon` (zero unless set).

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::arith::ArithTable;
use crate::diophantine::best_approx;
use crate::expsum::{exp_sum_linear, exp_sum_poly, exp_sum_quadratic, Phase};
use crate::{Error, Result};

pub type Q = Rational64;

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

fn qi(n: i64) -> Q {
    Q::from_integer(n)
}

fn f(x: Q) -> f64 {
    x.to_f64().expect("small rational")
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnvelopeTerm {
    pub beta: Q,
    /// `X^{β+ε}` rather than `X^β`.
    pub x_eps: bool,
    pub gamma: Q,
    pub delta: Q,
    pub lam: Q,
    /// Exponent of `log q`.
    pub log_q: Q,
    /// Exponent of `log log X`.
    pub loglog: Q,
    pub coeff: f64,
}

impl EnvelopeTerm {
    pub fn new(beta: Q, gamma: Q, delta: Q, lam: Q) -> Self {
        Self {
            beta,
            x_eps: false,
            gamma,
            delta,
            lam,
            log_q: Q::zero(),
            loglog: Q::zero(),
            coeff: 1.0,
        }
    }

    fn eps(mut self) -> Self {
        self.x_eps = true;
        self
    }

    fn log_q(mut self, k: Q) -> Self {
        self.log_q = k;
        self
    }

    fn loglog(mut self, k: Q) -> Self {
        self.loglog = k;
        self
    }

    pub fn value(&self, x: f64, q: f64, upsilon: f64, epsilon: f64) -> f64 {
        let lx = x.ln();
        let mut v = self.coeff * x.powf(f(self.beta) + if self.x_eps { epsilon } else { 0.0 });
        if !self.gamma.is_zero() {
            v *= upsilon.max(1.0).powf(f(self.gamma));
        }
        if !self.delta.is_zero() {
            v *= q.powf(f(self.delta));
        }
        if !self.lam.is_zero() {
            v *= lx.powf(f(self.lam));
        }
        if !self.log_q.is_zero() {
            v *= q.ln().powf(f(self.log_q));
        }
        if !self.loglog.is_zero() {
            v *= lx.ln().powf(f(self.loglog));
        }
        v
    }
}

/// Hypotheses under which an envelope is stated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Validity {
    QAtMostX,
    UpsilonAtMostOne,
    UpsilonAtLeastOne,
}

impl Validity {
    fn holds(&self, x: f64, q: f64, upsilon: f64) -> bool {
        match self {
            Validity::QAtMostX => q <= x,
            Validity::UpsilonAtMostOne => upsilon <= 1.0,
            Validity::UpsilonAtLeastOne => upsilon >= 1.0,
        }
    }

    pub fn describe(&self) -> &'static str {
        match self {
            Validity::QAtMostX => "q <= X",
            Validity::UpsilonAtMostOne => "Upsilon <= 1",
            Validity::UpsilonAtLeastOne => "Upsilon >= 1",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundEnvelope {
    pub name: String,
    pub terms: Vec<EnvelopeTerm>,
    pub validity: Vec<Validity>,
    /// Value used for `ε` in `X^{β+ε}` terms.
    pub epsilon: f64,
}

impl BoundEnvelope {
    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }
}

/// Envelope identifiers. `r` and `k` are passed separately to
/// [`envelope_for`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TheoremId {
    /// `S_r`, general `r`.
    Thm1_1,
    /// Vinogradov's bound for `S_1`.
    Thm1_2,
    /// Earlier bound for `S_1` with a global `Υ` factor, `Υ ≥ 1`.
    Thm1_3,
    /// Earlier bound for `S_2`.
    PriorS2,
    Thm1_4S2,
    Thm1_4S3,
    /// `μ * μ`.
    Thm1_5,
    /// `μ_P`.
    Thm1_6,
    /// `𝟙 * 𝟙_P`.
    Thm1_7,
    /// `|μ|`.
    Thm1_8,
    /// `|μ|` with phase `αn²`.
    Thm1_9,
    /// `f^{*r}` for `f` with growth parameter `η`.
    Thm2_4 { eta: Q },
    /// `f^{*r}` for Möbius-like `f`.
    Thm4_2,
    /// Weyl bound for degree-`k` polynomial phases, in the length `N`.
    Lemma5_1,
    /// Quadratic Weyl bound, in the length `N`.
    Lemma5_2,
    /// `|μ|` with a degree-`k` polynomial phase, `k ≥ 3`.
    Thm5_3,
    /// `S_3` via the earlier `S_1` bound.
    S3Cumbersome,
}

impl fmt::Display for TheoremId {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TheoremId::Thm1_1 => write!(out, "1.1"),
            TheoremId::Thm1_2 => write!(out, "1.2"),
            TheoremId::Thm1_3 => write!(out, "1.3"),
            TheoremId::PriorS2 => write!(out, "prior-S2"),
            TheoremId::Thm1_4S2 => write!(out, "1.4-S2"),
            TheoremId::Thm1_4S3 => write!(out, "1.4-S3"),
            TheoremId::Thm1_5 => write!(out, "1.5"),
            TheoremId::Thm1_6 => write!(out, "1.6"),
            TheoremId::Thm1_7 => write!(out, "1.7"),
            TheoremId::Thm1_8 => write!(out, "1.8"),
            TheoremId::Thm1_9 => write!(out, "1.9"),
            TheoremId::Thm2_4 { eta } => write!(out, "2.4(eta={eta})"),
            TheoremId::Thm4_2 => write!(out, "4.2"),
            TheoremId::Lemma5_1 => write!(out, "5.1"),
            TheoremId::Lemma5_2 => write!(out, "5.2"),
            TheoremId::Thm5_3 => write!(out, "5.3"),
            TheoremId::S3Cumbersome => write!(out, "S3-cumbersome"),
        }
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "1.1" => TheoremId::Thm1_1,
            "1.2" => TheoremId::Thm1_2,
            "1.3" => TheoremId::Thm1_3,
            "prior-S2" => TheoremId::PriorS2,
            "1.4-S2" => TheoremId::Thm1_4S2,
            "1.4-S3" => TheoremId::Thm1_4S3,
            "1.5" => TheoremId::Thm1_5,
            "1.6" => TheoremId::Thm1_6,
            "1.7" => TheoremId::Thm1_7,
            "1.8" => TheoremId::Thm1_8,
            "1.9" => TheoremId::Thm1_9,
            "4.2" => TheoremId::Thm4_2,
            "5.1" => TheoremId::Lemma5_1,
            "5.2" => TheoremId::Lemma5_2,
            "5.3" => TheoremId::Thm5_3,
            "S3-cumbersome" => TheoremId::S3Cumbersome,
            _ => match s.strip_prefix("2.4:").map(parse_rational) {
                Some(Ok(eta)) => TheoremId::Thm2_4 { eta },
                _ => return Err(Error::InvalidArgument(format!("unknown theorem id `{s}`"))),
            },
        })
    }
}

fn parse_rational(s: &str) -> Result<Q> {
    let bad = || Error::InvalidArgument(format!("not a rational: `{s}`"));
    match s.split_once('/') {
        Some((n, d)) => {
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Q::new(n.trim().parse().map_err(|_| bad())?, d))
        }
        None => Ok(qi(s.trim().parse().map_err(|_| bad())?)),
    }
}

/// `(β_j(r), γ_j(r), δ_j(r))` for `j = 0, 1, 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExponentSchedule {
    pub r: i64,
}

impl ExponentSchedule {
    pub fn new(r: i64) -> Result<Self> {
        if r < 1 {
            return Err(Error::InvalidArgument("r must be at least 1".into()));
        }
        Ok(Self { r })
    }

    pub fn beta(&self, j: usize) -> Q {
        let r = self.r;
        match j {
            0 => qi(1),
            1 => q(2 + 2 * r, 3 + 2 * r),
            2 => q(2 * r - 1, 2 * r),
            _ => panic!("j must be 0, 1 or 2"),
        }
    }

    pub fn gamma(&self, j: usize) -> Q {
        match j {
            0 => q(1, 2 * self.r),
            1 | 2 => Q::zero(),
            _ => panic!("j must be 0, 1 or 2"),
        }
    }

    pub fn delta(&self, j: usize) -> Q {
        match j {
            0 => q(-1, 2 * self.r),
            1 => Q::zero(),
            2 => q(1, 2 * self.r),
            _ => panic!("j must be 0, 1 or 2"),
        }
    }

    /// `(2 + 2γ_j − β_j(r)) / (3 + 2γ_j − 2β_j(r))`, which should equal
    /// `β_j(r+1)`.
    pub fn recurrence(&self, j: usize) -> Q {
        let (b, g) = (self.beta(j), self.gamma(j));
        (qi(2) + qi(2) * g - b) / (qi(3) + qi(2) * g - qi(2) * b)
    }

    /// `X^{β_j} Υ^{γ_j} q^{δ_j}` terms times `(log X)^lam`.
    pub fn terms(&self, lam: Q) -> Vec<EnvelopeTerm> {
        (0..3).map(|j| EnvelopeTerm::new(self.beta(j), self.gamma(j), self.delta(j), lam)).collect()
    }
}

fn need(param: Option<i64>, what: &str, min: i64) -> Result<i64> {
    match param {
        Some(v) if v >= min => Ok(v),
        Some(v) => Err(Error::InvalidArgument(format!("{what} must be at least {min}, got {v}"))),
        None => Err(Error::InvalidArgument(format!("{what} is required for this envelope"))),
    }
}

/// Terms of the envelope `id`. `param` is `r` for the `r`-fold bounds and the
/// degree `k` for the polynomial ones.
pub fn envelope_for(id: TheoremId, param: Option<i64>) -> Result<BoundEnvelope> {
    use Validity::*;
    let t = EnvelopeTerm::new;
    let z = Q::zero;
    let (terms, validity) = match id {
        TheoremId::Thm1_1 => {
            let r = need(param, "r", 1)?;
            (ExponentSchedule::new(r)?.terms(qi(3)), vec![QAtMostX])
        }
        TheoremId::Thm1_2 => (
            vec![
                t(qi(1), z(), q(-1, 2), qi(3)),
                t(q(4, 5), z(), z(), qi(3)),
                t(q(1, 2), z(), q(1, 2), qi(3)),
            ],
            vec![UpsilonAtMostOne],
        ),
        TheoremId::Thm1_3 => (
            vec![
                t(qi(1), qi(1), q(-1, 2), qi(3)),
                t(q(4, 5), qi(1), z(), qi(3)),
                t(q(1, 2), qi(1), q(1, 2), qi(3)),
            ],
            vec![UpsilonAtLeastOne],
        ),
        TheoremId::PriorS2 => (
            vec![
                t(qi(1), z(), q(-1, 6), q(7, 3)),
                t(q(16, 17), z(), z(), q(39, 17)),
                t(q(7, 8), z(), q(1, 8), q(9, 4)),
            ],
            vec![UpsilonAtMostOne],
        ),
        TheoremId::Thm1_4S2 | TheoremId::Thm1_7 => (
            vec![
                t(qi(1), q(1, 4), q(-1, 4), q(5, 2)),
                t(q(6, 7), z(), z(), q(19, 7)),
                t(q(3, 4), z(), q(1, 4), q(5, 2)),
            ],
            vec![],
        ),
        TheoremId::Thm1_4S3 => (
            vec![
                t(qi(1), q(1, 6), q(-1, 6), q(7, 3)),
                t(q(8, 9), z(), z(), q(23, 9)),
                t(q(5, 6), z(), q(1, 6), q(7, 3)),
            ],
            vec![],
        ),
        TheoremId::Thm1_5 | TheoremId::Thm1_6 => (
            vec![
                t(qi(1), q(1, 4), q(-1, 4), q(5, 2)),
                t(q(6, 7), z(), z(), z()).eps(),
                t(q(3, 4), z(), q(1, 4), q(5, 2)),
            ],
            vec![],
        ),
        TheoremId::Thm1_8 => (
            vec![
                t(qi(1), z(), qi(-1), qi(1)),
                t(q(8, 13), z(), z(), q(37, 13)),
                t(z(), z(), qi(1), qi(1)),
            ],
            vec![UpsilonAtMostOne],
        ),
        TheoremId::Thm1_9 => (
            vec![
                t(qi(1), z(), q(-1, 4), z()),
                t(q(1, 2), z(), z(), qi(1)).log_q(q(1, 2)),
                t(q(1, 2), z(), q(1, 4), z()).log_q(q(1, 4)),
            ],
            vec![UpsilonAtMostOne],
        ),
        TheoremId::Thm2_4 { eta } => {
            let r = need(param, "r", 1)?;
            (ExponentSchedule::new(r)?.terms(qi(3) + qi(r) * eta), vec![])
        }
        TheoremId::Thm4_2 => {
            let r = need(param, "r", 1)?;
            let lam = qi((r * r).max(3));
            let mut terms = ExponentSchedule::new(r)?.terms(lam);
            terms[1] = terms[1].clone().eps();
            (terms, vec![])
        }
        TheoremId::Lemma5_1 => {
            // N^{1+ε}(Υ/q + 1/N + N^{1-k} + q N^{-k})^θ with θ = 2^{1-k}, written
            // as the sum of the θ-th powers; the two differ by at most a
            // factor 4^{1-θ}.
            let k = need(param, "k", 1)?;
            let th = q(1, 1 << (k - 1));
            let one = qi(1);
            (
                vec![
                    t(one, th, -th, z()).eps(),
                    t(one - th, z(), z(), z()).eps(),
                    t(one - qi(k - 1) * th, z(), z(), z()).eps(),
                    t(one - qi(k) * th, z(), th, z()).eps(),
                ],
                vec![],
            )
        }
        TheoremId::Lemma5_2 => (
            vec![
                t(qi(1), q(1, 2), q(-1, 2), z()),
                t(q(1, 2), z(), z(), z()).log_q(q(1, 2)),
                t(z(), z(), q(1, 2), z()).log_q(q(1, 2)),
            ],
            vec![],
        ),
        TheoremId::Thm5_3 => {
            let k = need(param, "k", 3)?;
            let terms = if k == 3 {
                vec![t(q(1, 2), z(), q(1, 6), z()).eps(), t(qi(1), z(), q(-1, 4), z()).eps()]
            } else {
                let th = q(1, 1 << (k - 1));
                vec![
                    t(q(1, 2) + qi(2) * th, z(), -th, z()).eps(),
                    t(q(1, 2), z(), th, z()).eps(),
                ]
            };
            (terms, vec![UpsilonAtMostOne])
        }
        TheoremId::S3Cumbersome => (
            vec![
                t(q(1, 2), qi(1), q(1, 2), qi(2)),
                t(qi(1), qi(1), q(-1, 18), q(19, 9)),
                t(q(52, 53), qi(1), z(), q(111, 53)),
                t(q(25, 26), qi(1), q(1, 26), q(27, 13)),
                t(qi(1), qi(1), q(-1, 6), q(7, 3)).loglog(qi(1)),
                t(q(7, 8), qi(1), q(1, 8), q(9, 4)).loglog(qi(1)),
            ],
            vec![UpsilonAtLeastOne],
        ),
    };
    let name = match param {
        Some(p) if matches!(id, TheoremId::Thm1_1 | TheoremId::Thm2_4 { .. } | TheoremId::Thm4_2) => {
            format!("{id} r={p}")
        }
        Some(p) if matches!(id, TheoremId::Lemma5_1 | TheoremId::Thm5_3) => format!("{id} k={p}"),
        _ => id.to_string(),
    };
    Ok(BoundEnvelope { name, terms, validity, epsilon: 0.0 })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    /// Index of the largest term.
    pub dominant: usize,
    pub terms: Vec<f64>,
    /// False when a hypothesis of the envelope fails at this point.
    pub in_regime: bool,
}

pub fn evaluate(env: &BoundEnvelope, x: f64, q: u64, upsilon: f64) -> Result<Evaluation> {
    if !(x >= 2.0) || q == 0 || !(upsilon >= 0.0) {
        return Err(Error::InvalidArgument(format!("need X >= 2, q >= 1, Upsilon >= 0; got {x}, {q}, {upsilon}")));
    }
    let qf = q as f64;
    let terms: Vec<f64> = env.terms.iter().map(|t| t.value(x, qf, upsilon, env.epsilon)).collect();
    let dominant = terms
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v > terms[best] { i } else { best });
    Ok(Evaluation {
        value: crate::summation::sum_f64(&terms),
        dominant,
        in_regime: env.validity.iter().all(|v| v.holds(x, qf, upsilon)),
        terms,
    })
}

/// The two exponent gains of the new `S_2` bound over the earlier one.
pub fn improvement_deltas() -> (Q, Q) {
    let old = envelope_for(TheoremId::PriorS2, None).unwrap();
    let new = envelope_for(TheoremId::Thm1_1, Some(2)).unwrap();
    (old.terms[1].beta - new.terms[1].beta, old.terms[2].beta - new.terms[2].beta)
}

pub const BRACKET: (f64, f64) = (1e-12, 1e18);
pub const MAX_BISECTIONS: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct MinMax {
    pub x_star: f64,
    /// `max(F, G_0, …)` at `x_star`.
    pub value: f64,
    /// Crossing `F(U_i) = G_i(U_i)` for each `i`.
    pub roots: Vec<f64>,
    /// Index of the smallest root.
    pub argmin: usize,
    /// True when the smallest root exceeds `x_cap`; `x_star` is then `x_cap`.
    pub cap_binds: bool,
}

/// Root of `F − G` for decreasing `F` and increasing `G` by bisection on a
/// logarithmic scale.
pub fn crossing(fd: &dyn Fn(f64) -> f64, g: &dyn Fn(f64) -> f64) -> Result<f64> {
    let (mut lo, mut hi) = BRACKET;
    let h = |u: f64| fd(u) - g(u);
    if !(h(lo) > 0.0) || !(h(hi) < 0.0) {
        return Err(Error::NotBracketed { lo, hi });
    }
    for _ in 0..MAX_BISECTIONS {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi || hi / lo - 1.0 <= 4.0 * f64::EPSILON {
            return Ok(mid);
        }
        let v = h(mid);
        if v == 0.0 {
            return Ok(mid);
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence(MAX_BISECTIONS))
}

/// Minimises `max(F, G_0, …, G_k)` for decreasing `F` and increasing `G_i`:
/// the minimiser is the smallest crossing point of `F` with some `G_i`.
pub fn minmax_optimize(
    fd: &dyn Fn(f64) -> f64,
    gs: &[&dyn Fn(f64) -> f64],
    x_cap: f64,
) -> Result<MinMax> {
    if gs.is_empty() {
        return Err(Error::InvalidArgument("need at least one increasing function".into()));
    }
    let roots = gs.iter().map(|g| crossing(fd, *g)).collect::<Result<Vec<_>>>()?;
    let argmin = roots
        .iter()
        .enumerate()
        .fold(0, |best, (i, &v)| if v < roots[best] { i } else { best });
    let cap_binds = roots[argmin] > x_cap;
    let x_star = if cap_binds { x_cap } else { roots[argmin] };
    let value = gs.iter().map(|g| g(x_star)).fold(fd(x_star), f64::max);
    Ok(MinMax { x_star, value, roots, argmin, cap_binds })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioSample {
    pub alpha: f64,
    pub x: u64,
    pub a: i64,
    pub q: u64,
    pub upsilon: f64,
    pub abs_sum: f64,
    pub envelope: f64,
    pub dominant: usize,
    pub in_regime: bool,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioStats {
    pub samples: Vec<RatioSample>,
    pub max: f64,
    pub min: f64,
    pub mean: f64,
}

/// `|S_w(α, X)| / envelope(X, q, Υ)` for each `(α, X)`, with `(a, q, Υ)` the
/// best approximation of `α` with `q ≤ X`.
pub fn empirical_ratio(
    weights: &ArithTable,
    phase: &Phase,
    env: &BoundEnvelope,
    samples: &[(f64, u64)],
) -> Result<RatioStats> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    let out = samples
        .par_iter()
        .map(|&(alpha, x)| {
            let s = match phase {
                Phase::Linear => exp_sum_linear(weights, alpha, x)?,
                Phase::Quadratic => exp_sum_quadratic(weights, alpha, x)?,
                Phase::Poly(c) => exp_sum_poly(weights, c, alpha, x)?,
            };
            let approx = best_approx(alpha, x)?;
            let ev = evaluate(env, x as f64, approx.q, approx.upsilon)?;
            let abs_sum = s.value.norm();
            Ok(RatioSample {
                alpha,
                x,
                a: approx.a,
                q: approx.q,
                upsilon: approx.upsilon,
                abs_sum,
                envelope: ev.value,
                dominant: ev.dominant,
                in_regime: ev.in_regime,
                ratio: abs_sum / ev.value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<f64> = out.iter().map(|s| s.ratio).collect();
    Ok(RatioStats {
        max: ratios.iter().cloned().fold(f64::MIN, f64::max),
        min: ratios.iter().cloned().fold(f64::MAX, f64::min),
        mean: crate::summation::sum_f64(&ratios) / ratios.len() as f64,
        samples: out,
    })
}
