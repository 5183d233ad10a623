//! Rational approximation certificates `|α − a/q| ≤ Υ/q²`, their transport
//! under `α ↦ uα`, and the major/minor arc dissection of the circle.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Certificate `|α − a/q| ≤ upsilon/q²` with `gcd(a, q) = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RationalApprox {
    pub a: i64,
    pub q: u64,
    pub upsilon: f64,
}

fn to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64().ok_or_else(|| Error::InvalidArgument("numerator exceeds 64 bits".into()))
}

/// Last continued-fraction convergent of `alpha` with denominator at most
/// `q_max`, computed in exact integer arithmetic. Among fractions with
/// `q ≤ q_max` it minimises `|qα − a|`, which gives `Υ ≤ q/q_max`.
fn convergent(alpha: &BigRational, q_max: u64) -> Result<RationalApprox> {
    if q_max == 0 {
        return Err(Error::InvalidArgument("Q_max must be at least 1".into()));
    }
    let q_max = BigInt::from(q_max);
    let (mut n, mut d) = (alpha.numer().clone(), alpha.denom().clone());
    let (mut h1, mut h2) = (BigInt::from(1), BigInt::zero());
    let (mut k1, mut k2) = (BigInt::zero(), BigInt::from(1));
    loop {
        let (a, r) = n.div_mod_floor(&d);
        let h = &a * &h1 + &h2;
        let k = &a * &k1 + &k2;
        if k > q_max {
            break;
        }
        h2 = std::mem::replace(&mut h1, h);
        k2 = std::mem::replace(&mut k1, k);
        if r.is_zero() {
            break;
        }
        n = std::mem::replace(&mut d, r);
    }
    let approx = BigRational::new(h1.clone(), k1.clone());
    let err = (alpha - approx).abs() * BigRational::from_integer(&k1 * &k1);
    Ok(RationalApprox {
        a: to_i64(&h1)?,
        q: k1.to_u64().expect("denominator bounded by q_max"),
        upsilon: err.to_f64().unwrap_or(f64::INFINITY),
    })
}

/// Best approximation of a float `alpha` (taken as the exact dyadic rational
/// it represents) with `q ≤ q_max`.
pub fn best_approx(alpha: f64, q_max: u64) -> Result<RationalApprox> {
    let exact = BigRational::from_float(alpha)
        .ok_or_else(|| Error::InvalidArgument(format!("alpha must be finite, got {alpha}")))?;
    convergent(&exact, q_max)
}

/// Best approximation of the exact rational `num/den`.
pub fn best_approx_rational(num: i64, den: u64, q_max: u64) -> Result<RationalApprox> {
    if den == 0 {
        return Err(Error::InvalidArgument("zero denominator".into()));
    }
    convergent(&BigRational::new(num.into(), den.into()), q_max)
}

/// Certificate for `uα` built from one for `α`:
/// `a′ = u a/g`, `q′ = q/g`, `Υ′ = Υ u/g²` with `g = gcd(u, q)`.
pub fn transform_by_factor(r: &RationalApprox, u: u64) -> Result<RationalApprox> {
    if u == 0 {
        return Err(Error::InvalidArgument("u must be positive".into()));
    }
    let g = u.gcd(&r.q);
    let a = (u / g) as i128 * r.a as i128;
    Ok(RationalApprox {
        a: i64::try_from(a).map_err(|_| Error::InvalidArgument("a' exceeds 64 bits".into()))?,
        q: r.q / g,
        upsilon: r.upsilon * u as f64 / (g as f64 * g as f64),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArcKind {
    PrincipalMajor,
    Major,
    Minor,
}

impl ArcKind {
    pub fn name(&self) -> &'static str {
        match self {
            ArcKind::PrincipalMajor => "principal_major",
            ArcKind::Major => "major",
            ArcKind::Minor => "minor",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcClass {
    pub kind: ArcKind,
    /// Numerator reduced to `0 ≤ a < q`.
    pub a: i64,
    pub q: u64,
}

/// Arcs `𝔐(q, a) = {α : |α − a/q| < δ_q}` for `q ≤ Q = (log X)^A`,
/// `δ_q = (log X)^A/(qX)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcDissection {
    pub x: f64,
    pub a_param: f64,
}

impl ArcDissection {
    pub fn new(x: f64, a_param: f64) -> Result<Self> {
        if !(x >= 2.0) || !(a_param > 0.0) {
            return Err(Error::InvalidArgument(format!("need X >= 2 and A > 0, got X = {x}, A = {a_param}")));
        }
        Ok(Self { x, a_param })
    }

    fn log_power(&self) -> f64 {
        self.x.ln().powf(self.a_param)
    }

    /// `Q = (log X)^A`.
    pub fn q_bound(&self) -> f64 {
        self.log_power()
    }

    pub fn delta(&self, q: u64) -> f64 {
        self.log_power() / (q as f64 * self.x)
    }

    /// Every non-principal arc `(a mod q, q)` containing `alpha`.
    pub fn nonprincipal_arcs(&self, alpha: f64) -> Vec<(i64, u64)> {
        let mut out = Vec::new();
        let q_top = self.q_bound().floor() as u64;
        for q in 2..=q_top {
            let d = self.delta(q);
            let qf = q as f64;
            let lo = ((alpha - d) * qf).ceil() as i64;
            let hi = ((alpha + d) * qf).floor() as i64;
            for a in lo..=hi {
                if a.unsigned_abs().gcd(&q) != 1 || (alpha - a as f64 / qf).abs() >= d {
                    continue;
                }
                let arc = (a.rem_euclid(q as i64), q);
                if !out.contains(&arc) {
                    out.push(arc);
                }
            }
        }
        out
    }

    fn check_range(alpha: f64) -> Result<()> {
        if !(-0.5..0.5).contains(&alpha) {
            return Err(Error::InvalidArgument(format!("alpha = {alpha} outside [-1/2, 1/2)")));
        }
        Ok(())
    }

    /// Which of `𝔐(1,0)`, `𝔐 \ 𝔐(1,0)`, `𝔪` contains `alpha`. The three sets
    /// partition the circle even where individual arcs overlap.
    pub fn arc_kind(&self, alpha: f64) -> Result<ArcKind> {
        Self::check_range(alpha)?;
        Ok(if alpha.abs() < self.delta(1) {
            ArcKind::PrincipalMajor
        } else if self.nonprincipal_arcs(alpha).is_empty() {
            ArcKind::Minor
        } else {
            ArcKind::Major
        })
    }

    /// Classification with the arc centre. Errors when `alpha` lies on more
    /// than one non-principal arc, since the centre is then ambiguous.
    pub fn classify(&self, alpha: f64) -> Result<ArcClass> {
        Self::check_range(alpha)?;
        if alpha.abs() < self.delta(1) {
            return Ok(ArcClass { kind: ArcKind::PrincipalMajor, a: 0, q: 1 });
        }
        let arcs = self.nonprincipal_arcs(alpha);
        match arcs.as_slice() {
            [] => Ok(ArcClass { kind: ArcKind::Minor, a: 0, q: 0 }),
            [(a, q)] => Ok(ArcClass { kind: ArcKind::Major, a: *a, q: *q }),
            _ => Err(Error::ArcOverlap { alpha, arcs }),
        }
    }
}

pub fn classify(alpha: f64, d: &ArcDissection) -> Result<ArcClass> {
    d.classify(alpha)
}
