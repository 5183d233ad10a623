//! Sieved arithmetic functions on `[1, X]`, Dirichlet convolution, and the
//! exact identities between them.
//!
//! Integer-valued functions are stored exactly as `i64`; only `Λ` and `log`
//! are floating point.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use rayon::prelude::*;

use crate::{Error, Result};

/// Entries per sieve segment.
pub const SEGMENT: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Kind {
    /// Möbius function μ.
    Mu,
    /// Squarefree indicator |μ|.
    MuAbs,
    /// von Mangoldt Λ.
    Lambda,
    /// Prime indicator 𝟙_P.
    OneP,
    One,
    Log,
    /// k-fold divisor function 𝟙^{*k}.
    TauK(u32),
    /// μ_P = μ * 𝟙_P.
    MuPrime,
    /// Number of distinct prime factors, 𝟙 * 𝟙_P.
    Omega,
    Custom(String),
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Mu => write!(f, "mu"),
            Kind::MuAbs => write!(f, "mu_abs"),
            Kind::Lambda => write!(f, "lambda"),
            Kind::OneP => write!(f, "one_p"),
            Kind::One => write!(f, "one"),
            Kind::Log => write!(f, "log"),
            Kind::TauK(k) => write!(f, "tau_{k}"),
            Kind::MuPrime => write!(f, "mu_prime"),
            Kind::Omega => write!(f, "omega"),
            Kind::Custom(s) => write!(f, "{s}"),
        }
    }
}

impl FromStr for Kind {
    type Err = Error;

    /// Parses the names printed by `Display`; `tau_k` takes its order as a
    /// suffix, e.g. `tau_3`.
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "mu" => Kind::Mu,
            "mu_abs" => Kind::MuAbs,
            "lambda" => Kind::Lambda,
            "one_p" => Kind::OneP,
            "one" => Kind::One,
            "log" => Kind::Log,
            "mu_prime" => Kind::MuPrime,
            "omega" => Kind::Omega,
            _ => match s.strip_prefix("tau_").map(str::parse::<u32>) {
                Some(Ok(k)) if k >= 1 => Kind::TauK(k),
                _ => return Err(Error::UnsupportedKind(s.to_string())),
            },
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Values {
    Int(Vec<i64>),
    Real(Vec<f64>),
}

/// Values of one arithmetic function at `1..=limit`.
#[derive(Clone, Debug, PartialEq)]
pub struct ArithTable {
    kind: Kind,
    values: Values,
}

impl ArithTable {
    pub fn from_ints(kind: Kind, values: Vec<i64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyRange);
        }
        Ok(Self { kind, values: Values::Int(values) })
    }

    pub fn from_reals(kind: Kind, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyRange);
        }
        Ok(Self { kind, values: Values::Real(values) })
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    pub fn limit(&self) -> usize {
        match &self.values {
            Values::Int(v) => v.len(),
            Values::Real(v) => v.len(),
        }
    }

    pub fn values(&self) -> &Values {
        &self.values
    }

    /// Integer values, `None` for real tables. Index 0 holds `f(1)`.
    pub fn ints(&self) -> Option<&[i64]> {
        match &self.values {
            Values::Int(v) => Some(v),
            Values::Real(_) => None,
        }
    }

    pub fn reals(&self) -> Option<&[f64]> {
        match &self.values {
            Values::Real(v) => Some(v),
            Values::Int(_) => None,
        }
    }

    /// Integer value at `n` (1-based).
    pub fn int(&self, n: usize) -> Option<i64> {
        self.ints().map(|v| v[n - 1])
    }

    /// Value at `n` (1-based) as a float.
    pub fn get(&self, n: usize) -> f64 {
        match &self.values {
            Values::Int(v) => v[n - 1] as f64,
            Values::Real(v) => v[n - 1],
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match &self.values {
            Values::Int(v) => v.iter().map(|&x| x as f64).collect(),
            Values::Real(v) => v.clone(),
        }
    }

    pub fn abs_sum(&self) -> f64 {
        crate::summation::sum_f64(&self.to_f64().iter().map(|x| x.abs()).collect::<Vec<_>>())
    }

    /// Restriction to `1..=limit`.
    pub fn truncate(&self, limit: usize) -> Result<Self> {
        if limit == 0 {
            return Err(Error::EmptyRange);
        }
        if limit > self.limit() {
            return Err(Error::InvalidArgument(format!(
                "cannot truncate table of limit {} to {limit}",
                self.limit()
            )));
        }
        Ok(match &self.values {
            Values::Int(v) => Self { kind: self.kind.clone(), values: Values::Int(v[..limit].to_vec()) },
            Values::Real(v) => Self { kind: self.kind.clone(), values: Values::Real(v[..limit].to_vec()) },
        })
    }

    /// `f(n)·[n ≤ cut]`, e.g. μ_{≤V}.
    pub fn cut_above(&self, cut: usize) -> Self {
        let kind = Kind::Custom(format!("{}_le{cut}", self.kind));
        match &self.values {
            Values::Int(v) => Self {
                kind,
                values: Values::Int(v.iter().enumerate().map(|(i, &x)| if i < cut { x } else { 0 }).collect()),
            },
            Values::Real(v) => Self {
                kind,
                values: Values::Real(v.iter().enumerate().map(|(i, &x)| if i < cut { x } else { 0.0 }).collect()),
            },
        }
    }
}

/// Primes up to `n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: usize) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            out.push(p as u64);
            let mut m = p * p;
            while m <= n {
                composite[m] = true;
                m += p;
            }
        }
    }
    out
}

/// Per-integer factorization signature from one sieve segment.
#[derive(Clone, Copy, Debug, Default)]
struct Signature {
    omega: u8,
    squarefree: bool,
    /// Largest prime factor, 1 for n = 1.
    prime: u64,
}

fn sieve_segment(lo: u64, hi: u64, primes: &[u64]) -> Vec<Signature> {
    let len = (hi - lo) as usize;
    let mut rem: Vec<u64> = (lo..hi).collect();
    let mut sig = vec![Signature { omega: 0, squarefree: true, prime: 1 }; len];
    for &p in primes {
        if p * p >= hi {
            break;
        }
        let start = lo.div_ceil(p) * p;
        let mut m = start;
        while m < hi {
            let i = (m - lo) as usize;
            let s = &mut sig[i];
            s.omega += 1;
            s.prime = p;
            rem[i] /= p;
            if rem[i] % p == 0 {
                s.squarefree = false;
                while rem[i] % p == 0 {
                    rem[i] /= p;
                }
            }
            m += p;
        }
    }
    for (s, &r) in sig.iter_mut().zip(&rem) {
        if r > 1 {
            s.omega += 1;
            s.prime = r;
        }
    }
    sig
}

fn signatures(x: usize) -> Vec<Signature> {
    let primes = primes_up_to((x as f64).sqrt() as usize + 1);
    let segments = x.div_ceil(SEGMENT);
    let parts: Vec<Vec<Signature>> = (0..segments)
        .into_par_iter()
        .map(|s| {
            let lo = 1 + (s * SEGMENT) as u64;
            let hi = (lo + SEGMENT as u64).min(x as u64 + 1);
            sieve_segment(lo, hi, &primes)
        })
        .collect();
    parts.concat()
}

/// Sieves `kind` on `[1, x]`.
pub fn sieve(kind: &Kind, x: usize) -> Result<ArithTable> {
    if x == 0 {
        return Err(Error::EmptyRange);
    }
    let from_sig = |f: fn(&Signature) -> i64| -> Result<ArithTable> {
        ArithTable::from_ints(kind.clone(), signatures(x).iter().map(f).collect())
    };
    match kind {
        Kind::Mu => from_sig(|s| match (s.squarefree, s.omega % 2) {
            (false, _) => 0,
            (true, 0) => 1,
            (true, _) => -1,
        }),
        Kind::MuAbs => from_sig(|s| s.squarefree as i64),
        Kind::OneP => from_sig(|s| (s.omega == 1 && s.squarefree) as i64),
        Kind::Omega => from_sig(|s| s.omega as i64),
        Kind::Lambda => ArithTable::from_reals(
            kind.clone(),
            signatures(x).iter().map(|s| if s.omega == 1 { (s.prime as f64).ln() } else { 0.0 }).collect(),
        ),
        Kind::One => ArithTable::from_ints(kind.clone(), vec![1; x]),
        Kind::Log => ArithTable::from_reals(kind.clone(), (1..=x).map(|n| (n as f64).ln()).collect()),
        Kind::TauK(0) => Err(Error::UnsupportedKind(kind.to_string())),
        Kind::TauK(k) => {
            let mut t = r_fold(&sieve(&Kind::One, x)?, *k as usize)?;
            t.kind = kind.clone();
            Ok(t)
        }
        Kind::MuPrime => {
            let mut t = dirichlet_convolve(&sieve(&Kind::Mu, x)?, &sieve(&Kind::OneP, x)?)?;
            t.kind = kind.clone();
            Ok(t)
        }
        Kind::Custom(_) => Err(Error::UnsupportedKind(kind.to_string())),
    }
}

fn convolve_int(a: &[i64], b: &[i64]) -> Vec<i64> {
    let x = a.len();
    let mut out = vec![0i64; x];
    for d in 1..=x {
        let fd = a[d - 1];
        if fd == 0 {
            continue;
        }
        for m in 1..=x / d {
            out[d * m - 1] += fd * b[m - 1];
        }
    }
    out
}

fn convolve_real(a: &[f64], b: &[f64]) -> Vec<f64> {
    let x = a.len();
    let mut out = vec![0.0; x];
    for d in 1..=x {
        let fd = a[d - 1];
        if fd == 0.0 {
            continue;
        }
        for m in 1..=x / d {
            out[d * m - 1] += fd * b[m - 1];
        }
    }
    out
}

/// `(f * g)(n) = Σ_{d|n} f(d) g(n/d)` by iterating over multiples.
pub fn dirichlet_convolve(f: &ArithTable, g: &ArithTable) -> Result<ArithTable> {
    if f.limit() != g.limit() {
        return Err(Error::LimitMismatch(f.limit(), g.limit()));
    }
    let kind = Kind::Custom(format!("({})*({})", f.kind, g.kind));
    match (&f.values, &g.values) {
        (Values::Int(a), Values::Int(b)) => ArithTable::from_ints(kind, convolve_int(a, b)),
        _ => ArithTable::from_reals(kind, convolve_real(&f.to_f64(), &g.to_f64())),
    }
}

/// `f^{*r}`.
pub fn r_fold(f: &ArithTable, r: usize) -> Result<ArithTable> {
    if r == 0 {
        return Err(Error::InvalidArgument("r-fold convolution needs r >= 1".into()));
    }
    let mut acc = f.clone();
    for _ in 1..r {
        acc = dirichlet_convolve(&acc, f)?;
    }
    if r > 1 {
        acc.kind = Kind::Custom(format!("({})^*{r}", f.kind));
    }
    Ok(acc)
}

/// Checks `|μ(n)| = Σ_{b²|n} μ(b)` for every `n ≤ x`.
pub fn mu_squared_identity_check(x: usize) -> Result<bool> {
    let mu_abs = sieve(&Kind::MuAbs, x)?;
    let root = (x as f64).sqrt() as usize + 1;
    let mu = sieve(&Kind::Mu, root)?;
    let mut rhs = vec![0i64; x];
    for b in 1..=root {
        let sq = b * b;
        if sq > x {
            break;
        }
        let m = mu.int(b).unwrap();
        if m == 0 {
            continue;
        }
        for k in (sq..=x).step_by(sq) {
            rhs[k - 1] += m;
        }
    }
    Ok(mu_abs.ints().unwrap() == rhs.as_slice())
}

fn binomial(n: u64, k: u64) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// Checks `𝟙_P = Σ_{j=1}^{k} (−1)^{j−1} C(k,j) μ_{≤V}^{*j} * 𝟙^{*(j−1)} * ω`
/// on `[1, x]`. Requires `V^k ≥ x`.
pub fn heath_brown_identity_check(k: u32, x: usize, v: usize) -> Result<bool> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let covered = (v as u128).checked_pow(k).is_none_or(|p| p >= x as u128);
    if !covered {
        return Err(Error::Precondition(format!("V = {v} is below x^(1/{k}) for x = {x}")));
    }
    let mu_v = sieve(&Kind::Mu, x)?.cut_above(v);
    let one = sieve(&Kind::One, x)?;
    let omega = sieve(&Kind::Omega, x)?;
    let one_p = sieve(&Kind::OneP, x)?;

    let mut total = vec![0i64; x];
    let mut mu_pow = mu_v.clone();
    let mut one_pow: Option<ArithTable> = None;
    for j in 1..=k {
        if j > 1 {
            mu_pow = dirichlet_convolve(&mu_pow, &mu_v)?;
            one_pow = Some(match one_pow {
                None => one.clone(),
                Some(t) => dirichlet_convolve(&t, &one)?,
            });
        }
        let mut term = dirichlet_convolve(&mu_pow, &omega)?;
        if let Some(t) = &one_pow {
            term = dirichlet_convolve(&term, t)?;
        }
        let c = binomial(k as u64, j as u64) * if j % 2 == 1 { 1 } else { -1 };
        for (acc, &t) in total.iter_mut().zip(term.ints().unwrap()) {
            *acc += c * t;
        }
    }
    Ok(one_p.ints().unwrap() == total.as_slice())
}

/// Checks that the indicator of squares of squarefree numbers equals `g * h`,
/// with `g` the indicator of squares and `h(ℓ) = μ(ℓ^{1/4})` on fourth powers.
pub fn squares_of_squarefree_factorization_check(x: usize) -> Result<bool> {
    let root = (x as f64).sqrt() as usize + 1;
    let mu_abs = sieve(&Kind::MuAbs, root)?;
    let mu = sieve(&Kind::Mu, root)?;
    let mut lhs = vec![0i64; x];
    let mut g = vec![0i64; x];
    let mut h = vec![0i64; x];
    for m in 1..=root {
        let sq = m * m;
        if sq > x {
            break;
        }
        g[sq - 1] = 1;
        lhs[sq - 1] = mu_abs.int(m).unwrap();
        if let Some(fourth) = sq.checked_mul(sq).filter(|&f| f <= x) {
            h[fourth - 1] = mu.int(m).unwrap();
        }
    }
    Ok(convolve_int(&g, &h) == lhs)
}

/// Result of counting squarefree integers in a residue class.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApCount {
    pub count: u64,
    pub main_term: f64,
}

impl ApCount {
    pub fn relative_error(&self) -> f64 {
        (self.count as f64 - self.main_term).abs() / self.main_term
    }
}

fn distinct_prime_factors(mut q: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            out.push(p);
            while q % p == 0 {
                q /= p;
            }
        }
        p += 1;
    }
    if q > 1 {
        out.push(q);
    }
    out
}

/// Main term `X / (ζ(2) φ(q) Π_{p|q}(1 + 1/p))` for squarefree `n ≡ l (mod q)`.
pub fn ap_main_term(x: f64, q: u64) -> f64 {
    let primes = distinct_prime_factors(q);
    let phi = primes.iter().fold(q as f64, |acc, &p| acc * (1.0 - 1.0 / p as f64));
    let euler = primes.iter().fold(1.0, |acc, &p| acc * (1.0 + 1.0 / p as f64));
    let zeta2 = std::f64::consts::PI.powi(2) / 6.0;
    x / (zeta2 * phi * euler)
}

/// Counts squarefree `n ≤ table.limit()` with `n ≡ l (mod q)`.
pub fn count_in_ap_table(table: &ArithTable, q: u64, l: u64) -> Result<ApCount> {
    if table.kind() != &Kind::MuAbs {
        return Err(Error::UnsupportedKind(format!("count_in_ap needs mu_abs, got {}", table.kind())));
    }
    if q == 0 {
        return Err(Error::InvalidArgument("q must be at least 1".into()));
    }
    if l.gcd(&q) != 1 {
        return Err(Error::Precondition(format!("gcd({l}, {q}) != 1")));
    }
    let vals = table.ints().unwrap();
    let r = (l % q) as usize;
    let start = if r == 0 { q as usize } else { r };
    let count = (start..=vals.len()).step_by(q as usize).map(|n| vals[n - 1] as u64).sum();
    Ok(ApCount { count, main_term: ap_main_term(table.limit() as f64, q) })
}

pub fn count_in_ap(kind: &Kind, x: usize, q: u64, l: u64) -> Result<ApCount> {
    if kind != &Kind::MuAbs {
        return Err(Error::UnsupportedKind(format!("count_in_ap needs mu_abs, got {kind}")));
    }
    if q > 0 && l.gcd(&q) != 1 {
        return Err(Error::Precondition(format!("gcd({l}, {q}) != 1")));
    }
    count_in_ap_table(&sieve(kind, x)?, q, l)
}

/// Rows `(x, μ_P(x), Σ_{n≤x} μ_P(n))` for `x ≤ limit`.
pub fn mu_prime_partial_sums(limit: usize) -> Result<Vec<(usize, i64, i64)>> {
    let t = sieve(&Kind::MuPrime, limit)?;
    let mut acc = 0;
    Ok(t.ints()
        .unwrap()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            acc += v;
            (i + 1, v, acc)
        })
        .collect())
}
