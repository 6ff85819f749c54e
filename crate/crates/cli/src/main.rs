//! `tautring`: command-line front end for the verification engine.

mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use tautring::algebra::cache::BasisStore;
use tautring::algebra::{CacheStats, EngineConfig, GradedRing, PairingReport, DEFAULT_SIZE_CEILING};
use tautring::fm::{self, Family, StandardMonomialFM};
use tautring::hodge::{self, HodgeQuery};
use tautring::xn;
use tautring::{linalg, rat, Error, QPoly, Rational, Subset};

use report::{Check, Report};

#[derive(Parser)]
#[command(name = "tautring", version, about = "Exact checks in tautological rings of X^n and X[n]")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    /// Directory for the on-disk basis cache.
    #[arg(long, env = "TAUTRING_CACHE_DIR", global = true)]
    cache_dir: Option<PathBuf>,
    /// Refuse to build a graded piece with more monomials than this.
    #[arg(long, default_value_t = DEFAULT_SIZE_CEILING, global = true)]
    size_ceiling: usize,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Subcommand)]
enum Command {
    /// The product X^n.
    #[command(subcommand)]
    Xn(XnCommand),
    /// The compactified configuration space X[n].
    #[command(subcommand)]
    Fm(FmCommand),
    /// Hodge integrals.
    #[command(subcommand)]
    Hodge(HodgeCommand),
    /// Compare a Hodge integral with the fiber evaluation on X[n].
    Bridge {
        #[arg(long)]
        n: usize,
        /// Comma-separated exponents; defaults to all ones.
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<usize>>,
    },
    /// Inspect or empty the basis cache.
    #[command(subcommand)]
    Cache(CacheCommand),
}

#[derive(Subcommand)]
enum XnCommand {
    /// Hilbert function of R*(X^n).
    Hilbert {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// Gorenstein check of R*(X^n).
    Check {
        #[arg(long)]
        n: usize,
    },
    /// Six-point relation vectors in standard-monomial coordinates.
    SixPoint {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        degree: usize,
    },
    /// Rebuild the six-point relation from the evaluation bundle.
    DeriveSixPoint,
    /// Pull back the codimension-two relation to X^3.
    FaberRelation,
    /// Pairing matrix of pure-b monomials on 2m points.
    MatchingGram {
        #[arg(long)]
        m: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Full,
    Blocks,
}

#[derive(Subcommand)]
enum FmCommand {
    /// Gorenstein check, by the full engine or block by block.
    Check {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = Mode::Full)]
        mode: Mode,
    },
    /// List the standard monomials of one degree.
    Standard {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        degree: usize,
    },
    /// Dual of a standard monomial given as {"A":[..],"B":[[i,j],..],"D":[[[..],e],..]}.
    Dual {
        #[arg(long)]
        monomial: String,
        /// Number of points; defaults to the largest index that occurs.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Print the presentation.
    Presentation {
        #[arg(long)]
        n: usize,
    },
}

#[derive(Subcommand)]
enum HodgeCommand {
    /// Evaluate int psi^alpha lambda_{g-1} lambda_g.
    Eval {
        #[arg(long)]
        g: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        alphas: Vec<usize>,
    },
}

#[derive(Subcommand)]
enum CacheCommand {
    Stats,
    Clear,
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(String),
    Size(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::SizeCeiling { .. } => Failure::Size(e.to_string()),
            Error::Invalid(_)
            | Error::NotStandard(_)
            | Error::NotLaminar(..)
            | Error::Cache(_) => Failure::Usage(e.to_string()),
            other => Failure::Other(other.to_string()),
        }
    }
}

type Outcome = std::result::Result<Report, Failure>;

struct Ctx {
    config: EngineConfig,
    cache: Option<CacheStats>,
}

impl Ctx {
    fn ring(&self, p: tautring::QPresentation) -> GradedRing<Rational> {
        GradedRing::with_config(p, self.config.clone())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(j) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    if let Some(dir) = &cli.global.cache_dir {
        if !dir.is_dir() {
            eprintln!("error: cache directory {} does not exist", dir.display());
            return ExitCode::from(2);
        }
    }
    let mut ctx = Ctx {
        config: EngineConfig {
            size_ceiling: cli.global.size_ceiling,
            cache_dir: cli.global.cache_dir.clone(),
        },
        cache: None,
    };
    let start = Instant::now();
    let outcome = run(&cli.command, &mut ctx);
    match outcome {
        Ok(mut report) => {
            report.finish(start.elapsed(), ctx.cache);
            match cli.global.format {
                // a closed pipe (e.g. `| head`) is not an error worth reporting
                Format::Json => {
                    let _ = writeln!(std::io::stdout(), "{}", report.to_json());
                }
                Format::Table => {
                    let _ = write!(std::io::stdout(), "{}", report.to_table());
                }
            }
            ExitCode::from(if report.passed() { 0 } else { 1 })
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Size(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Other(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn run(cmd: &Command, ctx: &mut Ctx) -> Outcome {
    match cmd {
        Command::Xn(c) => run_xn(c, ctx),
        Command::Fm(c) => run_fm(c, ctx),
        Command::Hodge(HodgeCommand::Eval { g, alphas }) => hodge_eval(*g, alphas),
        Command::Bridge { n, alphas } => bridge(*n, alphas.clone(), ctx),
        Command::Cache(c) => run_cache(c, ctx),
    }
}

fn need_points(n: usize) -> std::result::Result<(), Failure> {
    if n == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    if n > tautring::subset::MAX_POINTS {
        return Err(Failure::Usage(format!(
            "--n must be at most {}",
            tautring::subset::MAX_POINTS
        )));
    }
    Ok(())
}

fn pairing_checks(report: &mut Report, p: &PairingReport) {
    let n = p.hilbert.len() - 1;
    for d in &p.degrees {
        report.check(Check::new(format!("pairing degree {}", d.degree), d.perfect).with(json!({
            "dim": d.dim,
            "dim_complement": d.dim_complement,
            "rank": d.gram_rank,
        })));
    }
    report.check(Check::new("socle dimension 1", p.socle_dim == 1).with(json!(p.socle_dim)));
    report.check(
        Check::new(format!("vanishing in degree {}", n + 1), p.above_socle_dims.iter().all(|&x| x == 0))
            .with(json!(p.above_socle_dims)),
    );
    let symmetric = (0..=n).all(|d| p.hilbert[d] == p.hilbert[n - d]);
    report.check(Check::new("hilbert symmetry", symmetric));
    report.set("hilbert", &p.hilbert);
    report.set("verdict", if p.verdict { "pass" } else { "fail" });
}

fn run_xn(cmd: &XnCommand, ctx: &mut Ctx) -> Outcome {
    match cmd {
        XnCommand::Hilbert { n, max_degree } => {
            need_points(*n)?;
            let dmax = max_degree.unwrap_or(*n);
            let ring = ctx.ring(xn::xn_presentation(*n)?);
            let h = ring.hilbert(dmax)?;
            let mut r = Report::new("xn hilbert", json!({ "n": n, "max_degree": dmax }));
            if dmax >= *n {
                let symmetric = (0..=*n).all(|d| h[d] == h[n - d]);
                r.check(Check::new("hilbert symmetry", symmetric));
            }
            r.set("hilbert", &h);
            ctx.cache = Some(ring.cache_stats());
            Ok(r)
        }
        XnCommand::Check { n } => {
            need_points(*n)?;
            let ring = ctx.ring(xn::xn_presentation(*n)?);
            let p = ring.gorenstein_check()?;
            let mut r = Report::new("xn check", json!({ "n": n }));
            pairing_checks(&mut r, &p);
            ctx.cache = Some(ring.cache_stats());
            Ok(r)
        }
        XnCommand::SixPoint { n, degree } => {
            need_points(*n)?;
            let basis = xn::enumerate_standard_xn(*n, *degree);
            let vectors = xn::six_point_relations::<Rational>(*n, *degree)?;
            let rank = if vectors.is_empty() {
                0
            } else {
                linalg::rank(&linalg::SparseMatrix::from_dense(&vectors))
            };
            let mut r = Report::new("xn six-point", json!({ "n": n, "degree": degree }));
            r.set(
                "standard_monomials",
                basis.iter().map(|v| v.monomial().to_string()).collect::<Vec<_>>(),
            );
            r.set(
                "vectors",
                vectors
                    .iter()
                    .map(|v| {
                        v.iter()
                            .enumerate()
                            .filter(|(_, x)| **x != rat(0))
                            .map(|(i, x)| json!([i, x.to_string()]))
                            .collect::<Vec<_>>()
                    })
                    .collect::<Vec<_>>(),
            );
            r.set("count", vectors.len());
            r.set("rank", rank);
            r.set("dimension", basis.len() - rank);
            Ok(r)
        }
        XnCommand::DeriveSixPoint => {
            let got = xn::derive_six_point::<Rational>()?;
            let expected = -xn::six_point_sum::<Rational>();
            let mut r = Report::new("xn derive-six-point", json!({}));
            r.check(Check::new("equals minus the six-point sum", got == expected));
            r.set("result", got.to_string());
            r.set("terms", got.len());
            Ok(r)
        }
        XnCommand::FaberRelation => {
            use tautring::poly::build::{a, b};
            let got = xn::verify_faber_relation::<Rational>();
            let expected: QPoly = (&(&b(1, 2) * &b(1, 3)) - &(&a(1) * &b(2, 3))).scale(&rat(2));
            let mut r = Report::new("xn faber-relation", json!({}));
            r.check(Check::new("equals 2(b12 b13 - a1 b23)", got == expected));
            r.check(Check::new(
                "vanishes in R(X^3)",
                xn::quadratic_normal_form(&got).is_zero(),
            ));
            r.set("result", got.to_string());
            Ok(r)
        }
        XnCommand::MatchingGram { m } => {
            let g = xn::matching_gram::<Rational>(*m)?;
            let (rank, kernel) = linalg::rank_and_kernel(&g.matrix);
            let mut r = Report::new("xn matching-gram", json!({ "m": m }));
            let mut entries_ok = true;
            for (i, u) in g.matchings.iter().enumerate() {
                for (j, v) in g.matchings.iter().enumerate() {
                    let expected = num_traits::pow(rat(-4), cycles(u, v));
                    entries_ok &= g.matrix.get(i, j) == expected;
                }
            }
            r.check(Check::new("entries are (-4)^cycles", entries_ok));
            r.set("size", g.matchings.len());
            r.set("rank", rank);
            r.set("nullity", kernel.len());
            r.set(
                "matchings",
                g.matchings
                    .iter()
                    .map(|x| x.monomial().to_string())
                    .collect::<Vec<_>>(),
            );
            r.set(
                "kernel",
                kernel
                    .iter()
                    .map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                    .collect::<Vec<_>>(),
            );
            Ok(r)
        }
    }
}

/// Number of cycles in the union of two perfect matchings.
fn cycles(u: &xn::Matching, v: &xn::Matching) -> usize {
    let partner = |m: &xn::Matching, x: u8| {
        m.pairs()
            .iter()
            .find_map(|&(i, j)| (i == x).then_some(j).or((j == x).then_some(i)))
            .expect("perfect matching")
    };
    let mut seen = Subset::EMPTY;
    let mut count = 0;
    for &(start, _) in u.pairs() {
        if seen.contains(start as usize) {
            continue;
        }
        count += 1;
        let mut x = start;
        loop {
            seen.insert(x as usize);
            let y = partner(u, x);
            seen.insert(y as usize);
            x = partner(v, y);
            if x == start {
                break;
            }
        }
    }
    count
}

fn run_fm(cmd: &FmCommand, ctx: &mut Ctx) -> Outcome {
    match cmd {
        FmCommand::Check { n, mode } => {
            need_points(*n)?;
            match mode {
                Mode::Full => {
                    let ring = ctx.ring(fm::fm_presentation(*n)?);
                    let p = ring.gorenstein_check()?;
                    let mut r = Report::new("fm check", json!({ "n": n, "mode": "full" }));
                    pairing_checks(&mut r, &p);
                    ctx.cache = Some(ring.cache_stats());
                    Ok(r)
                }
                Mode::Blocks => fm_blocks(*n, ctx),
            }
        }
        FmCommand::Standard { n, degree } => {
            need_points(*n)?;
            let list = fm::enumerate_standard_fm_with(*n, *degree, ctx.config.size_ceiling)?;
            let mut r = Report::new("fm standard", json!({ "n": n, "degree": degree }));
            r.set("count", list.len());
            r.set("monomials", &list);
            Ok(r)
        }
        FmCommand::Dual { monomial, n } => {
            let v: StandardMonomialFM = serde_json::from_str(monomial)
                .map_err(|e| Failure::Usage(format!("cannot parse --monomial: {e}")))?;
            let top = v.monomial().factors().iter().map(|g| g.support().max().unwrap_or(0)).max().unwrap_or(0);
            let n = n.unwrap_or(top.max(1));
            need_points(n)?;
            let w = fm::dual_fm(&v, n)?;
            let back = fm::dual_fm(&w, n)?;
            let mut r = Report::new("fm dual", json!({ "n": n, "monomial": v }));
            r.check(Check::new("complementary degree", v.degree() + w.degree() == n));
            r.check(Check::new("involution", back == v));
            r.set("dual", &w);
            r.set("dual_monomial", w.to_string());
            r.set("p", fm::filtration_p(&v));
            Ok(r)
        }
        FmCommand::Presentation { n } => {
            need_points(*n)?;
            let p = fm::fm_presentation::<Rational>(*n)?;
            let mut r = Report::new("fm presentation", json!({ "n": n }));
            let families: serde_json::Map<String, Value> = Family::ALL
                .iter()
                .map(|&f| {
                    let key = serde_json::to_value(f).unwrap().as_str().unwrap().to_string();
                    (key, json!(fm::fm_family::<Rational>(*n, f).len()))
                })
                .collect();
            r.set("generators", p.generators().iter().map(|g| g.to_string()).collect::<Vec<_>>());
            r.set("family_sizes", families);
            r.set("relations", p.relations().iter().map(|q| q.to_string()).collect::<Vec<_>>());
            r.set("socle", p.socle_monomial().to_string());
            r.set("content_hash", p.content_hash());
            Ok(r)
        }
    }
}

fn fm_blocks(n: usize, ctx: &mut Ctx) -> Outcome {
    let bc = fm::block_check::<Rational>(n)?;
    let mut r = Report::new("fm check", json!({ "n": n, "mode": "blocks" }));
    let failing: Vec<&str> = bc.blocks.iter().filter(|b| !b.verdict).map(|b| b.key.as_str()).collect();
    r.check(Check::new("blocks have full X^S rank", failing.is_empty()).with(json!({
        "blocks": bc.blocks.len(),
        "failing": failing,
    })));
    r.check(Check::new("dual is an involution", bc.involution));
    r.check(Check::new("hilbert symmetry", bc.symmetric));
    r.check(Check::new("socle dimension 1", bc.socle_dim == 1).with(json!(bc.socle_dim)));
    if n <= 4 {
        let ring = ctx.ring(fm::fm_presentation(n)?);
        let x = fm::engine_cross_check(&ring)?;
        r.check(
            Check::new("triangularity", x.triangularity_failures.is_empty())
                .with(json!({ "pairs": x.triangularity_pairs, "failures": x.triangularity_failures })),
        );
        r.check(
            Check::new("sign rule", x.sign_failures.is_empty())
                .with(json!({ "pairs": x.sign_pairs, "failures": x.sign_failures })),
        );
        r.check(
            Check::new("filtration vanishing", x.filtration_failures.is_empty())
                .with(json!({ "pairs": x.filtration_pairs, "failures": x.filtration_failures })),
        );
        let engine_h = ring.hilbert(n)?;
        r.check(Check::new("hilbert agrees with full engine", engine_h == bc.hilbert).with(json!(engine_h)));
        ctx.cache = Some(ring.cache_stats());
    }
    r.set("hilbert", &bc.hilbert);
    r.set(
        "status",
        if bc.conditional_on_sign_rule {
            "conditional on sign rule"
        } else {
            "verified against full engine"
        },
    );
    r.set(
        "blocks",
        bc.blocks
            .iter()
            .map(|b| {
                json!({
                    "degree": b.degree,
                    "key": b.key,
                    "S": b.s_set,
                    "epsilon": b.epsilon,
                    "size": b.size,
                    "xs_dimension": b.xs_dimension,
                    "rank": b.rank,
                    "verdict": b.verdict,
                })
            })
            .collect::<Vec<_>>(),
    );
    Ok(r)
}

fn hodge_eval(g: usize, alphas: &[usize]) -> Outcome {
    let q = HodgeQuery::new(g, alphas.to_vec())?;
    let value = hodge::hodge_psi_integral(&q)?;
    let mut r = Report::new("hodge eval", json!({ "g": g, "alphas": alphas }));
    r.set("value", value.to_string());
    r.set("faber_constant", hodge::faber_constant(g)?.to_string());
    Ok(r)
}

fn bridge(n: usize, alphas: Option<Vec<usize>>, ctx: &mut Ctx) -> Outcome {
    need_points(n)?;
    let alphas = alphas.unwrap_or_else(|| vec![1; n]);
    if alphas.len() != n {
        return Err(Failure::Usage(format!("expected {n} exponents, got {}", alphas.len())));
    }
    let constant = hodge::BridgeConstant::calibrate()?;
    let ring = ctx.ring(fm::fm_presentation(n)?);
    let rep = hodge::bridge_check_in(&ring, &constant, &alphas)?;
    let mut r = Report::new("bridge", json!({ "n": n, "alphas": alphas }));
    r.check(Check::new("moduli side equals calibrated fiber side", rep.verdict));
    r.set("constant", constant.value.to_string());
    r.set("lhs", rep.lhs.to_string());
    r.set("fiber", rep.fiber.to_string());
    r.set("rhs", rep.rhs.to_string());
    ctx.cache = Some(ring.cache_stats());
    Ok(r)
}

fn run_cache(cmd: &CacheCommand, ctx: &mut Ctx) -> Outcome {
    let Some(dir) = ctx.config.cache_dir.clone() else {
        return Err(Failure::Usage(
            "cache commands need --cache-dir or TAUTRING_CACHE_DIR".into(),
        ));
    };
    let store = BasisStore::new(&dir);
    match cmd {
        CacheCommand::Stats => {
            let entries = store.entries()?;
            let mut r = Report::new("cache stats", json!({ "cache_dir": dir }));
            r.set("entries", entries.len());
            r.set("bytes", entries.iter().map(|e| e.bytes).sum::<u64>());
            r.set("keys", entries.iter().map(|e| e.key.clone()).collect::<Vec<_>>());
            Ok(r)
        }
        CacheCommand::Clear => {
            let removed = store.clear()?;
            let mut r = Report::new("cache clear", json!({ "cache_dir": dir }));
            r.set("removed", removed);
            Ok(r)
        }
    }
}
