//! `gibbs-occ`: command-line front end for the occupancy library.
//!
//! Exit codes: 0 on success, 1 when a verification suite fails, 2 on usage or domain
//! errors (reported as a JSON object on stderr).

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use gibbs_occ::combinat::{count_compositions, Compositions, Partitions};
use gibbs_occ::estimate::{alt_gamma, alt_n, approx_mle_n, mle_gamma, mle_n};
use gibbs_occ::occupancy::ORACLE_CAP;
use gibbs_occ::sample::{
    default_cutoff, parallel_runs, sample_subordinator, star_biased_estimate, RejectionSampler,
    SequentialSampler, StarStatistic, XiSampler,
};
use gibbs_occ::verify;
use gibbs_occ::{
    Error, Exact, LogF64, Occupancy, Param, Result, SampleSummary, Scalar, StarModel, WeightSequence,
};

#[derive(Parser)]
#[command(name = "gibbs-occ", version, about = "Gibbs–Poisson occupancy models for species sampling")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Probability mass functions.
    Pmf {
        #[arg(value_enum)]
        kind: PmfKind,
        #[command(flatten)]
        model: ModelArgs,
        /// Occupancy vector for `joint` (comma separated); all vectors when omitted.
        #[arg(long, value_delimiter = ',')]
        counts: Option<Vec<u64>>,
        /// Frequency-of-frequencies vector a₁,a₂,… for `aff`/`star-aff`; all when omitted.
        #[arg(long, value_delimiter = ',')]
        aff: Option<Vec<u64>>,
        /// Number of leading boxes for `partial`.
        #[arg(long)]
        m: Option<u64>,
    },
    /// Factorial moments.
    Moments {
        #[arg(value_enum)]
        kind: MomentKind,
        #[command(flatten)]
        model: ModelArgs,
        /// Orders r₁,r₂,… (aff/star-aff) or l₁,l₂,… per box (k).
        #[arg(long, value_delimiter = ',', required = true)]
        r: Vec<u64>,
    },
    /// Estimators of n and γ from (k, P).
    Estimate {
        #[arg(value_enum)]
        target: EstimateTarget,
        #[arg(long)]
        family: String,
        #[arg(long)]
        theta: Option<String>,
        #[arg(long)]
        k: u64,
        #[arg(long = "P")]
        p: u64,
        #[arg(long, value_enum, default_value = "mle")]
        method: EstimateMethod,
    },
    /// Seeded samplers.
    Sample {
        #[arg(value_enum)]
        kind: SampleKind,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        runs: usize,
        /// Jump cutoff t (default keeps the truncation bound under 10⁻³·γφ₁).
        #[arg(long)]
        cutoff: Option<f64>,
        /// Tilting point x for `xi` and rejection sampling.
        #[arg(long)]
        x: Option<f64>,
        #[arg(long, value_enum, default_value = "exact")]
        method: SampleMethod,
        /// `all-same` or `distinct=p`.
        #[arg(long, default_value = "all-same")]
        statistic: String,
    },
    /// Identity and Monte Carlo self-checks.
    Verify {
        #[arg(value_enum)]
        suite: VerifySuite,
        /// Restrict the identity suite to these families (repeatable).
        #[arg(long)]
        family: Vec<String>,
        #[arg(long, default_value_t = 10)]
        k_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        runs: usize,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    family: String,
    /// Finite-n weight parameter θ (decimal or p/q).
    #[arg(long)]
    theta: Option<String>,
    /// Star-limit diversity γ (decimal or p/q).
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    k: Option<usize>,
    /// Exact rational arithmetic (probabilities printed as p/q).
    #[arg(long)]
    exact: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum PmfKind {
    Joint,
    Component,
    Partial,
    Pnk,
    Aff,
    StarPnk,
    StarAff,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum MomentKind {
    Aff,
    K,
    StarAff,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimateTarget {
    N,
    Gamma,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstimateMethod {
    Mle,
    Approx,
    Ratio,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum SampleKind {
    Occupancy,
    Xi,
    Subordinator,
    StarBiased,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum SampleMethod {
    Exact,
    Rejection,
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifySuite {
    Identities,
    Montecarlo,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

/// A table cell, rendered both as CSV text and as JSON.
enum Cell {
    Int(u64),
    List(Vec<u64>),
    Num(String, Value),
}

impl Cell {
    fn prob<S: Scalar>(x: &S) -> Cell {
        if S::EXACT {
            let r = x.to_repr();
            Cell::Num(r.clone(), Value::String(r))
        } else {
            let f = x.to_f64();
            Cell::Num(format!("{f}"), json!(f))
        }
    }

    fn float(f: f64) -> Cell {
        Cell::Num(format!("{f}"), json!(f))
    }

    fn csv(&self) -> String {
        match self {
            Cell::Int(n) => n.to_string(),
            Cell::List(v) => v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";"),
            Cell::Num(s, _) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(n) => json!(n),
            Cell::List(v) => json!(v),
            Cell::Num(_, v) => v.clone(),
        }
    }
}

struct Table {
    meta: Value,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    fn emit(&self, format: Format) {
        match format {
            Format::Csv => {
                println!("{}", self.columns.join(","));
                for row in &self.rows {
                    println!("{}", row.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
                }
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let obj: serde_json::Map<String, Value> =
                            self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.json())).collect();
                        Value::Object(obj)
                    })
                    .collect();
                let mut out = self.meta.clone();
                out["columns"] = json!(self.columns);
                out["rows"] = Value::Array(rows);
                println!("{out}");
            }
        }
    }
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}

fn family(spec: &str) -> Result<WeightSequence> {
    spec.parse()
}

fn param(name: &str, v: &Option<String>) -> Result<Param> {
    v.as_deref().ok_or_else(|| usage(format!("--{name} is required")))?.parse()
}

fn need<T: Copy>(name: &str, v: Option<T>) -> Result<T> {
    v.ok_or_else(|| usage(format!("--{name} is required")))
}

impl ModelArgs {
    fn finite(&self) -> Result<(Param, u64, usize)> {
        if self.gamma.is_some() {
            return Err(usage("--gamma belongs to star-limit commands; use --theta"));
        }
        Ok((param("theta", &self.theta)?, need("n", self.n)?, need("k", self.k)?))
    }

    fn star(&self) -> Result<(Param, usize)> {
        if self.theta.is_some() || self.n.is_some() {
            return Err(usage("star-limit commands take --gamma and --k, not --theta/--n"));
        }
        Ok((param("gamma", &self.gamma)?, need("k", self.k)?))
    }

    fn meta(&self, kind: &str) -> Value {
        json!({
            "kind": kind,
            "family": self.family,
            "theta": self.theta,
            "gamma": self.gamma,
            "n": self.n,
            "k": self.k,
            "mode": if self.exact { "exact" } else { "log" },
        })
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Pmf { kind, model, counts, aff, m } => {
            let w = family(&model.family)?;
            let table = if model.exact {
                pmf_table::<Exact>(kind, &model, &w, counts, aff, m)?
            } else {
                pmf_table::<LogF64>(kind, &model, &w, counts, aff, m)?
            };
            table.emit(model.format);
            Ok(0)
        }
        Command::Moments { kind, model, r } => {
            let w = family(&model.family)?;
            let table = if model.exact {
                moment_table::<Exact>(kind, &model, &w, &r)?
            } else {
                moment_table::<LogF64>(kind, &model, &w, &r)?
            };
            table.emit(model.format);
            Ok(0)
        }
        Command::Estimate { target, family: spec, theta, k, p, method } => {
            let w = family(&spec)?;
            let s = SampleSummary::new(k, p)?;
            let est = match target {
                EstimateTarget::N => {
                    let theta = param("theta", &theta)?.value();
                    match method {
                        EstimateMethod::Mle => mle_n(&w, theta, s)?,
                        EstimateMethod::Approx => approx_mle_n(&w, theta, s)?,
                        EstimateMethod::Ratio => alt_n(&w, theta, s)?,
                    }
                }
                EstimateTarget::Gamma => {
                    if theta.is_some() {
                        return Err(usage("estimate gamma takes no --theta"));
                    }
                    match method {
                        EstimateMethod::Mle => mle_gamma(&w, s)?,
                        EstimateMethod::Ratio => alt_gamma(&w, s)?,
                        EstimateMethod::Approx => return Err(usage("--method approx applies to estimate n only")),
                    }
                }
            };
            let mut out = est.to_json();
            out["family"] = json!(w.spec());
            println!("{out}");
            Ok(0)
        }
        Command::Sample { kind, model, seed, runs, cutoff, x, method, statistic } => {
            let w = family(&model.family)?;
            run_sample(kind, &model, &w, seed, runs, cutoff, x, method, &statistic)
        }
        Command::Verify { suite, family: specs, k_max, seed, runs } => {
            let report = match suite {
                VerifySuite::Identities => {
                    let families = if specs.is_empty() {
                        verify::default_families()
                    } else {
                        specs.iter().map(|s| family(s)).collect::<Result<Vec<_>>>()?
                    };
                    verify::identities(&families, k_max)?
                }
                VerifySuite::Montecarlo => match verify::montecarlo(seed, runs) {
                    Err(Error::Diagnostic(msg)) => {
                        println!("{}", json!({ "suite": "montecarlo", "passed": false, "error": msg }));
                        return Ok(1);
                    }
                    other => other?,
                },
            };
            println!("{}", report.to_json());
            Ok(if report.passed() { 0 } else { 1 })
        }
    }
}

fn pmf_table<S: Scalar>(
    kind: PmfKind,
    model: &ModelArgs,
    w: &WeightSequence,
    counts: Option<Vec<u64>>,
    aff: Option<Vec<u64>>,
    m: Option<u64>,
) -> Result<Table> {
    let meta = model.meta(match kind {
        PmfKind::Joint => "joint",
        PmfKind::Component => "component",
        PmfKind::Partial => "partial",
        PmfKind::Pnk => "pnk",
        PmfKind::Aff => "aff",
        PmfKind::StarPnk => "star-pnk",
        PmfKind::StarAff => "star-aff",
    });
    let prob = Cell::prob::<S>;
    let (columns, rows): (Vec<&'static str>, Vec<Vec<Cell>>) = match kind {
        PmfKind::StarPnk | PmfKind::StarAff => {
            let (g, k) = model.star()?;
            let star = StarModel::new(w, S::from_param(&g)?, k)?;
            if kind == PmfKind::StarPnk {
                let pmf = star.star_pnk_pmf(k)?;
                let first = usize::from(k > 0);
                let rows = pmf.iter().enumerate().skip(first).map(|(p, x)| vec![Cell::Int(p as u64), prob(x)]);
                (vec!["p", "probability"], rows.collect())
            } else {
                let affs = match aff {
                    Some(a) => vec![a],
                    None => Partitions::new(k as u64).map(|parts| gibbs_occ::combinat::aff_of(&parts, k)).collect(),
                };
                let mut rows = Vec::new();
                for a in affs {
                    let x = star.star_aff_pmf(&a)?;
                    rows.push(vec![Cell::List(a), prob(&x)]);
                }
                (vec!["aff", "probability"], rows)
            }
        }
        _ => {
            let (theta, n, k) = model.finite()?;
            let occ = Occupancy::new(w, S::from_param(&theta)?, n, k)?;
            match kind {
                PmfKind::Joint => {
                    let all = match counts {
                        Some(c) => vec![c],
                        None => {
                            let total = count_compositions(k as u64, n as usize).unwrap_or(u128::MAX);
                            if total > ORACLE_CAP {
                                return Err(Error::TooLarge(format!("{total} occupancy vectors; pass --counts")));
                            }
                            Compositions::new(k as u64, n as usize).collect()
                        }
                    };
                    let mut rows = Vec::new();
                    for c in all {
                        let x = occ.joint_pmf(&c)?;
                        rows.push(vec![Cell::List(c), prob(&x)]);
                    }
                    (vec!["counts", "probability"], rows)
                }
                PmfKind::Component | PmfKind::Partial => {
                    let pmf = if kind == PmfKind::Component {
                        occ.component_pmf()
                    } else {
                        occ.partialsum_pmf(need("m", m)?)?
                    };
                    let rows = pmf.iter().enumerate().map(|(l, x)| vec![Cell::Int(l as u64), prob(x)]);
                    (vec!["l", "probability"], rows.collect())
                }
                PmfKind::Pnk => {
                    let pmf = occ.pnk_pmf();
                    let first = usize::from(k > 0);
                    let rows = pmf.iter().enumerate().skip(first).map(|(p, x)| vec![Cell::Int(p as u64), prob(x)]);
                    (vec!["p", "probability"], rows.collect())
                }
                PmfKind::Aff => {
                    let affs: Vec<Vec<u64>> = match aff {
                        Some(a) => vec![a],
                        None => Partitions::new(k as u64)
                            .filter(|parts| parts.len() as u64 <= n)
                            .map(|parts| gibbs_occ::combinat::aff_of(&parts, k))
                            .collect(),
                    };
                    let mut rows = Vec::new();
                    for a in affs {
                        let x = occ.aff_pmf(&a)?;
                        rows.push(vec![Cell::List(a), prob(&x)]);
                    }
                    (vec!["aff", "probability"], rows)
                }
                _ => unreachable!(),
            }
        }
    };
    Ok(Table { meta, columns, rows })
}

fn moment_table<S: Scalar>(kind: MomentKind, model: &ModelArgs, w: &WeightSequence, r: &[u64]) -> Result<Table> {
    let value = match kind {
        MomentKind::StarAff => {
            let (g, k) = model.star()?;
            StarModel::new(w, S::from_param(&g)?, k)?.star_aff_moments(k, r)?
        }
        MomentKind::Aff | MomentKind::K => {
            let (theta, n, k) = model.finite()?;
            let occ = Occupancy::new(w, S::from_param(&theta)?, n, k)?;
            if kind == MomentKind::Aff {
                occ.aff_factorial_moments(r)?
            } else {
                occ.k_factorial_moments(r)?
            }
        }
    };
    let name = match kind {
        MomentKind::Aff => "aff",
        MomentKind::K => "k",
        MomentKind::StarAff => "star-aff",
    };
    Ok(Table {
        meta: model.meta(name),
        columns: vec!["r", "moment"],
        rows: vec![vec![Cell::List(r.to_vec()), Cell::prob(&value)]],
    })
}

fn parse_statistic(s: &str) -> Result<StarStatistic> {
    if s == "all-same" {
        return Ok(StarStatistic::AllSame);
    }
    if let Some(p) = s.strip_prefix("distinct=") {
        let p = p.parse().map_err(|_| Error::Parse(format!("bad statistic `{s}`")))?;
        return Ok(StarStatistic::DistinctEquals(p));
    }
    Err(Error::Parse(format!("unknown statistic `{s}` (expected all-same or distinct=p)")))
}

#[allow(clippy::too_many_arguments)]
fn run_sample(
    kind: SampleKind,
    model: &ModelArgs,
    w: &WeightSequence,
    seed: u64,
    runs: usize,
    cutoff: Option<f64>,
    x: Option<f64>,
    method: SampleMethod,
    statistic: &str,
) -> Result<u8> {
    let meta = json!({ "kind": "sample", "family": w.spec(), "seed": seed, "runs": runs });
    let table = match kind {
        SampleKind::Occupancy => {
            let (theta, n, k) = model.finite()?;
            let theta = theta.value();
            let draws = if method == SampleMethod::Exact {
                let s = SequentialSampler::new(w, theta, n as usize, k)?;
                parallel_runs(runs, seed, |rng| Ok(s.sample(rng)))?
            } else {
                let s = RejectionSampler::new(w, theta, n as usize, k, x)?;
                parallel_runs(runs, seed, |rng| Ok(s.sample(rng)))?
            };
            let rows = draws
                .into_iter()
                .enumerate()
                .map(|(i, d)| {
                    let (p, aff) = (d.p() as u64, d.aff());
                    vec![Cell::Int(i as u64), Cell::List(d.counts), Cell::Int(p), Cell::List(aff)]
                })
                .collect();
            Table { meta, columns: vec!["run", "counts", "p", "aff"], rows }
        }
        SampleKind::Xi => {
            let theta = param("theta", &model.theta)?.value();
            let s = XiSampler::new(w, theta, need("x", x)?)?;
            let draws = parallel_runs(runs, seed, |rng| Ok(s.sample(rng)))?;
            let rows = draws.into_iter().enumerate().map(|(i, v)| vec![Cell::Int(i as u64), Cell::Int(v)]).collect();
            Table { meta, columns: vec!["run", "xi"], rows }
        }
        SampleKind::Subordinator => {
            let gamma = param("gamma", &model.gamma)?.value();
            let t = match cutoff {
                Some(t) => t,
                None => default_cutoff(w, gamma)?,
            };
            let paths = parallel_runs(runs, seed, |rng| sample_subordinator(w, gamma, t, rng))?;
            if model.format == Format::Json {
                let out: Vec<Value> = paths
                    .iter()
                    .map(|p| {
                        json!({
                            "count": p.count(), "total": p.total, "cutoff": p.cutoff,
                            "truncation_bound": p.truncation_bound, "finite_activity": p.finite_activity,
                            "jumps": p.jumps, "gamma_points": p.gamma_points,
                        })
                    })
                    .collect();
                println!("{}", json!({ "meta": meta, "paths": out }));
                return Ok(0);
            }
            let mut rows = Vec::new();
            for (i, p) in paths.iter().enumerate() {
                for (j, (d, g)) in p.jumps.iter().zip(&p.gamma_points).enumerate() {
                    rows.push(vec![Cell::Int(i as u64), Cell::Int(j as u64 + 1), Cell::float(*d), Cell::float(*g)]);
                }
            }
            Table { meta, columns: vec!["run", "rank", "jump", "gamma_point"], rows }
        }
        SampleKind::StarBiased => {
            let gamma = param("gamma", &model.gamma)?.value();
            let k = need("k", model.k)?;
            let stat = parse_statistic(statistic)?;
            let est = star_biased_estimate(w, gamma, k, stat, cutoff, runs, seed)?;
            let star = StarModel::<LogF64>::new(w, LogF64::new(gamma), k)?;
            let analytic = match stat {
                StarStatistic::AllSame => star.star_pnk_pmf(k)?[1].value(),
                StarStatistic::DistinctEquals(p) => star.star_pnk_pmf(k)?[p].value(),
            };
            let mut out = est.to_json();
            out["analytic"] = json!(analytic);
            if model.format == Format::Json {
                println!("{out}");
                return Ok(0);
            }
            let cols = ["estimate", "se", "ess", "truncation_bound", "analytic"];
            let row = cols.iter().map(|c| Cell::float(out[*c].as_f64().unwrap_or(f64::NAN))).collect();
            Table { meta, columns: cols.to_vec(), rows: vec![row] }
        }
    };
    table.emit(model.format);
    Ok(0)
}
