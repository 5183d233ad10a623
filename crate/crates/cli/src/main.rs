mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use twisted_core::arith::{mu_prime_partial_sums, r_fold, sieve, ArithTable, Kind};
use twisted_core::bounds::{empirical_ratio, envelope_for, evaluate, TheoremId};
use twisted_core::diophantine::{best_approx, ArcDissection};
use twisted_core::expsum::{exp_sum_linear, exp_sum_quadratic, Phase};
use twisted_core::partitions::{
    arc_diagnostics, ln_biguint, partition_counts, partition_counts_recurrence, solve_saddle, PartKind,
};
use twisted_core::zeta::{bundled_zeros, explicit_eval, load_zeros, theta_of_x, ExplicitFormula, ZeroTable};

use output::{num, print_json, Csv};

const ZEROS_ENV: &str = "TWISTED_ZEROS";
const THREADS_ENV: &str = "TWISTED_THREADS";

#[derive(Parser, Serialize)]
#[command(name = "twisted", version, about = "Twisted exponential sums, zeta explicit formula and squarefree partitions")]
struct Cli {
    /// Worker threads (default: all cores, or $TWISTED_THREADS).
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum Command {
    /// Tabulate an arithmetic function.
    Sieve(SieveArgs),
    /// Weighted exponential sum at one frequency, or at the convergents of it.
    Expsum(ExpsumArgs),
    /// Classify a frequency into principal major, major or minor arc.
    Arcs(ArcsArgs),
    /// Evaluate a bound envelope.
    Envelope(EnvelopeArgs),
    /// Ratio of measured sums to a bound envelope at sampled frequencies.
    Verify(VerifyArgs),
    /// Arithmetic double sum against the zeta-zero explicit formula.
    Explicit(ExplicitArgs),
    /// Exact partition counts.
    Partitions(PartitionsArgs),
    /// Saddle point of the squarefree partition generating function.
    Saddle(SaddleArgs),
    /// Generating function on the circle, split by arc type.
    ArcScan(ArcScanArgs),
    /// Data behind the figures.
    Figures(FiguresArgs),
}

#[derive(Args, Serialize)]
struct SieveArgs {
    #[arg(long)]
    kind: String,
    #[arg(long)]
    limit: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct ExpsumArgs {
    #[arg(long)]
    weight: String,
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long)]
    x: f64,
    #[arg(long, default_value = "linear", value_parser = ["linear", "quadratic"])]
    phase: String,
    /// `q=LO..HI`: one row per convergent `a/q` of alpha with LO ≤ q ≤ HI,
    /// summed at `a/q`.
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct ArcsArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha: f64,
    #[arg(long)]
    x: f64,
    #[arg(long)]
    a_param: f64,
}

#[derive(Args, Serialize)]
struct EnvelopeArgs {
    #[arg(long)]
    theorem: String,
    #[arg(long)]
    x: f64,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    upsilon: f64,
    /// `r` or `k` for the families that take one.
    #[arg(long)]
    param: Option<i64>,
}

#[derive(Args, Serialize)]
struct VerifyArgs {
    #[arg(long)]
    theorem: String,
    #[arg(long)]
    weight: String,
    /// Use the r-fold Dirichlet convolution of the weight.
    #[arg(long, default_value_t = 1)]
    fold: usize,
    #[arg(long)]
    param: Option<i64>,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long)]
    x: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct ExplicitArgs {
    #[arg(long, default_value_t = 10.0)]
    xmin: f64,
    #[arg(long, default_value_t = 500.0)]
    xmax: f64,
    #[arg(long, default_value_t = 5.0)]
    step: f64,
    /// Zeros file (default: $TWISTED_ZEROS, else the bundled first 100).
    #[arg(long, env = ZEROS_ENV)]
    zeros: Option<PathBuf>,
    #[arg(long, default_value_t = 25)]
    t_count: usize,
    #[arg(long, default_value_t = 1)]
    n_trivial: usize,
    #[arg(long, default_value_t = 1500)]
    j: usize,
    #[arg(long, default_value_t = 1500)]
    n_arith: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct PartitionsArgs {
    #[arg(long, default_value = "squarefree")]
    kind: String,
    #[arg(long)]
    n: usize,
    /// Use the O(n²) divisor-sum recurrence instead of the product formula.
    #[arg(long)]
    recurrence: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct SaddleArgs {
    #[arg(long)]
    x: f64,
}

#[derive(Args, Serialize)]
struct ArcScanArgs {
    #[arg(long)]
    x_param: f64,
    #[arg(long)]
    a_param: f64,
    #[arg(long, default_value_t = 20_000)]
    grid: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct FiguresArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    which: u8,
    /// Range for the first figure.
    #[arg(long, default_value_t = 500)]
    limit: usize,
    #[arg(long, env = ZEROS_ENV)]
    zeros: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn config(cli: &Cli) -> Value {
    let mut v = serde_json::to_value(&cli.command).expect("arguments serialize");
    v["version"] = json!(env!("CARGO_PKG_VERSION"));
    v
}

fn jnum(v: f64) -> Value {
    json!(num(v).parse::<f64>().unwrap_or(v))
}

fn as_limit(x: f64) -> Result<u64> {
    if !(x >= 1.0 && x.fract() == 0.0 && x <= 1e12) {
        bail!("X must be a positive integer, got {x}");
    }
    Ok(x as u64)
}

fn weights(name: &str, limit: usize, fold: usize) -> Result<ArithTable> {
    let kind: Kind = name.parse()?;
    let t = sieve(&kind, limit)?;
    Ok(if fold > 1 { r_fold(&t, fold)? } else { t })
}

fn zeros_from(path: Option<&Path>) -> Result<ZeroTable> {
    Ok(match path {
        Some(p) => load_zeros(p)?,
        None => bundled_zeros(),
    })
}

fn run_sieve(a: &SieveArgs, cfg: &Value) -> Result<()> {
    let t = sieve(&a.kind.parse()?, a.limit)?;
    let mut csv = Csv::new(cfg, &["n", "value"]);
    for n in 1..=t.limit() {
        let v = match t.int(n) {
            Some(i) => i.to_string(),
            None => num(t.get(n)),
        };
        csv.row(&[n.to_string(), v]);
    }
    csv.emit(a.out.as_deref())
}

fn parse_sweep(s: &str) -> Result<(u64, u64)> {
    let r = s.strip_prefix("q=").context("sweep must look like q=LO..HI")?;
    let (lo, hi) = r.split_once("..").context("sweep must look like q=LO..HI")?;
    let (lo, hi): (u64, u64) = (lo.parse()?, hi.parse()?);
    if lo == 0 || lo > hi {
        bail!("sweep range must satisfy 1 <= LO <= HI");
    }
    Ok((lo, hi))
}

fn run_expsum(a: &ExpsumArgs, cfg: &Value) -> Result<()> {
    let x = as_limit(a.x)?;
    let w = weights(&a.weight, x as usize, 1)?;
    let sum = |alpha: f64| -> Result<_> {
        Ok(match a.phase.as_str() {
            "quadratic" => exp_sum_quadratic(&w, alpha, x)?.value,
            _ => exp_sum_linear(&w, alpha, x)?.value,
        })
    };
    match &a.sweep {
        None => {
            let s = sum(a.alpha)?;
            let mut csv = Csv::new(cfg, &["re", "im", "abs"]);
            csv.row(&[num(s.re), num(s.im), num(s.norm())]);
            csv.emit(a.out.as_deref())
        }
        Some(range) => {
            let (lo, hi) = parse_sweep(range)?;
            let mut csv = Csv::new(cfg, &["q", "a", "upsilon", "re", "im", "abs"]);
            let mut last = 0;
            for q_max in lo..=hi {
                let r = best_approx(a.alpha, q_max)?;
                if r.q == last || r.q < lo {
                    continue;
                }
                last = r.q;
                let s = sum(r.a as f64 / r.q as f64)?;
                csv.row(&[r.q.to_string(), r.a.to_string(), num(r.upsilon), num(s.re), num(s.im), num(s.norm())]);
            }
            csv.emit(a.out.as_deref())
        }
    }
}

fn run_arcs(a: &ArcsArgs) -> Result<()> {
    let d = ArcDissection::new(a.x, a.a_param)?;
    let c = match d.classify(a.alpha) {
        Err(twisted_core::Error::ArcOverlap { arcs, .. }) => {
            return print_json(&json!({
                "kind": "major",
                "overlap": true,
                "arcs": arcs.iter().map(|&(a, q)| json!({"a": a, "q": q, "delta_q": jnum(d.delta(q))})).collect::<Vec<_>>(),
            }));
        }
        r => r?,
    };
    print_json(&json!({
        "kind": c.kind.name(),
        "a": c.a,
        "q": c.q,
        "delta_q": if c.q > 0 { jnum(d.delta(c.q)) } else { Value::Null },
    }))
}

fn run_envelope(a: &EnvelopeArgs) -> Result<()> {
    let id: TheoremId = a.theorem.parse()?;
    let env = envelope_for(id, a.param)?;
    let e = evaluate(&env, a.x, a.q, a.upsilon)?;
    print_json(&json!({
        "theorem": id.to_string(),
        "value": jnum(e.value),
        "dominant_term": e.dominant,
        "terms": e.terms.iter().map(|&t| jnum(t)).collect::<Vec<_>>(),
        "in_regime": e.in_regime,
    }))
}

fn run_verify(a: &VerifyArgs, cfg: &Value) -> Result<()> {
    let x = as_limit(a.x)?;
    let env = envelope_for(a.theorem.parse()?, a.param)?;
    let w = weights(&a.weight, x as usize, a.fold)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let samples: Vec<(f64, u64)> = (0..a.samples).map(|_| (rng.gen::<f64>(), x)).collect();
    let st = empirical_ratio(&w, &Phase::Linear, &env, &samples)?;
    let mut csv = Csv::new(cfg, &["alpha", "x", "a", "q", "upsilon", "abs_sum", "envelope", "dominant", "in_regime", "ratio"]);
    for s in &st.samples {
        csv.row(&[
            num(s.alpha),
            s.x.to_string(),
            s.a.to_string(),
            s.q.to_string(),
            num(s.upsilon),
            num(s.abs_sum),
            num(s.envelope),
            s.dominant.to_string(),
            s.in_regime.to_string(),
            num(s.ratio),
        ]);
    }
    csv.emit(a.out.as_deref())
}

fn abscissae(xmin: f64, xmax: f64, step: f64) -> Result<Vec<f64>> {
    if !(xmin >= 1.0 && xmax >= xmin && step > 0.0) {
        bail!("need 1 <= xmin <= xmax and step > 0");
    }
    let n = ((xmax - xmin) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| xmin + step * i as f64).collect())
}

struct Comparison {
    x: f64,
    phi1: num_complex::Complex64,
    phi2: num_complex::Complex64,
    phi20: num_complex::Complex64,
}

fn compare(xs: &[f64], zeros: &ZeroTable, t_count: usize, n_trivial: usize, j: usize, n_arith: usize) -> Result<Vec<Comparison>> {
    let f = ExplicitFormula::new(zeros, t_count, n_trivial)?;
    let mu_abs = sieve(&Kind::MuAbs, n_arith.max(1))?;
    xs.iter()
        .map(|&x| {
            let e = explicit_eval(x, theta_of_x(x), j, n_arith, &f, &mu_abs)?;
            Ok(Comparison { x, phi1: e.phi1, phi2: e.phi2, phi20: e.phi20 })
        })
        .collect()
}

fn run_explicit(a: &ExplicitArgs, cfg: &Value) -> Result<()> {
    let zeros = zeros_from(a.zeros.as_deref())?;
    let rows = compare(&abscissae(a.xmin, a.xmax, a.step)?, &zeros, a.t_count, a.n_trivial, a.j, a.n_arith)?;
    let mut csv = Csv::new(cfg, &["X", "re_phi1", "im_phi1", "re_phi2", "im_phi2", "re_phi20", "im_phi20"]);
    for r in rows {
        csv.row(&[num(r.x), num(r.phi1.re), num(r.phi1.im), num(r.phi2.re), num(r.phi2.im), num(r.phi20.re), num(r.phi20.im)]);
    }
    csv.emit(a.out.as_deref())
}

fn run_partitions(a: &PartitionsArgs, cfg: &Value) -> Result<()> {
    let kind: PartKind = a.kind.parse()?;
    let s = if a.recurrence { partition_counts_recurrence(kind, a.n)? } else { partition_counts(kind, a.n) };
    let mut csv = Csv::new(cfg, &["n", "count", "log_count"]);
    for (n, c) in s.counts.iter().enumerate() {
        csv.row(&[n.to_string(), c.to_string(), num(ln_biguint(c))]);
    }
    csv.emit(a.out.as_deref())
}

fn run_saddle(a: &SaddleArgs) -> Result<()> {
    let s = solve_saddle(a.x)?;
    print_json(&json!({
        "x": jnum(s.x),
        "x_param": jnum(s.x_param),
        "rho": jnum(s.rho),
        "phi": jnum(s.phi),
        "phi1": jnum(s.phi1),
        "phi2": jnum(s.phi2),
        "residual": jnum(s.residual()),
        "gap": jnum(s.gap()),
    }))
}

fn run_arc_scan(a: &ArcScanArgs, cfg: &Value) -> Result<()> {
    let r = arc_diagnostics(a.x_param, a.a_param, a.grid)?;
    let mut csv = Csv::new(cfg, &["alpha", "kind", "q", "abs_phi"]);
    for p in &r.points {
        csv.row(&[num(p.alpha), p.kind.name().to_string(), p.q.to_string(), num(p.abs_phi)]);
    }
    csv.emit(a.out.as_deref())?;
    let summary = |m: &twisted_core::partitions::ArcMax| json!({"count": m.count, "max_abs_phi": jnum(m.max_abs_phi), "argmax": jnum(m.argmax)});
    eprintln!(
        "{}",
        json!({
            "phi_rho": jnum(r.phi_rho),
            "principal": summary(&r.principal),
            "major": summary(&r.major),
            "minor": summary(&r.minor),
            "major_ratio_to_x_over_q": jnum(r.major_ratio_to_x_over_q),
            "minor_threshold": jnum(r.minor_threshold),
        })
    );
    Ok(())
}

fn run_figures(a: &FiguresArgs, cfg: &Value) -> Result<()> {
    if a.which == 1 {
        let rows = mu_prime_partial_sums(a.limit)?;
        let mut csv = Csv::new(cfg, &["x", "mu_p", "partial_sum"]);
        for (x, v, s) in rows {
            csv.row(&[x.to_string(), v.to_string(), s.to_string()]);
        }
        return csv.emit(a.out.as_deref());
    }
    let zeros = zeros_from(a.zeros.as_deref())?;
    let rows = compare(&abscissae(10.0, 500.0, 5.0)?, &zeros, 25, 1, 1500, 1500)?;
    let mut csv = match a.which {
        2 => Csv::new(cfg, &["X", "re_phi2", "re_phi20", "re_diff", "im_phi2", "im_phi20", "im_diff"]),
        3 => Csv::new(cfg, &["X", "re_phi1", "re_phi2", "re_diff"]),
        _ => Csv::new(cfg, &["X", "im_phi1", "im_phi2", "im_diff"]),
    };
    for r in rows {
        let fields = match a.which {
            2 => {
                let d = r.phi2 - r.phi20;
                vec![num(r.x), num(r.phi2.re), num(r.phi20.re), num(d.re), num(r.phi2.im), num(r.phi20.im), num(d.im)]
            }
            3 => vec![num(r.x), num(r.phi1.re), num(r.phi2.re), num(r.phi1.re - r.phi2.re)],
            _ => vec![num(r.x), num(r.phi1.im), num(r.phi2.im), num(r.phi1.im - r.phi2.im)],
        };
        csv.row(&fields);
    }
    csv.emit(a.out.as_deref())
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring thread pool")?;
    }
    let cfg = config(cli);
    match &cli.command {
        Command::Sieve(a) => run_sieve(a, &cfg),
        Command::Expsum(a) => run_expsum(a, &cfg),
        Command::Arcs(a) => run_arcs(a),
        Command::Envelope(a) => run_envelope(a),
        Command::Verify(a) => run_verify(a, &cfg),
        Command::Explicit(a) => run_explicit(a, &cfg),
        Command::Partitions(a) => run_partitions(a, &cfg),
        Command::Saddle(a) => run_saddle(a),
        Command::ArcScan(a) => run_arc_scan(a, &cfg),
        Command::Figures(a) => run_figures(a, &cfg),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
