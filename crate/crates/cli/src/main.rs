use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use hgspec::dispersion::{bottleneck_cut, mixing_time, simulate, DispersionConfig};
use hgspec::partition::{
    cheeger_check, multi_partition, small_set_expansion, sparsest_cut_demands, sweep_cut, DemandInstance,
    DemandsConfig, KpartConfig, SseConfig,
};
use hgspec::rng::{rng_for, DEFAULT_SEED};
use hgspec::spectral::{eig_sequence, EigenPair, Method, SpectralConfig};
use hgspec::vertexexp::{
    brute_force_vertex_expansion, lambda_inf, reduce_to_hypergraph, Graph, LambdaInfConfig,
};
use hgspec::{CutResult, HgError, Hypergraph, RatioType};
use serde::Serialize;
use serde_json::{json, Value};

mod schema;

#[derive(Parser)]
#[command(name = "hgspec", version, about = "Spectral tools for hypergraphs")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "HGSPEC_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Output format; JSON by default, a text table for `verify`.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Exact,
    Iter,
    Sdp,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Exact => Method::Exact,
            MethodArg::Iter => Method::Iterative,
            MethodArg::Sdp => Method::Sdp,
        }
    }
}

#[derive(Args)]
struct Spectral {
    #[arg(long, value_enum, default_value_t = MethodArg::Iter)]
    method: MethodArg,
    /// Rounding trials for the SDP method.
    #[arg(long, default_value_t = 200)]
    trials: usize,
}

impl Spectral {
    fn config(&self, seed: u64) -> SpectralConfig {
        let mut cfg = SpectralConfig::default();
        cfg.iter.seed = seed;
        cfg.sdp.seed = seed;
        cfg.sdp.trials = self.trials;
        cfg
    }
}

#[derive(Args)]
struct Dynamics {
    #[arg(long, default_value_t = 0.01)]
    dt: f64,
    #[arg(long, default_value_t = 10.0)]
    horizon: f64,
    #[arg(long, default_value_t = 0.01)]
    delta: f64,
    /// Start from the point mass at this vertex (1-based); a seeded random
    /// measure when omitted.
    #[arg(long)]
    start: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Size, rank and degree summary.
    Info { input: PathBuf },
    /// Eigenpairs `lambda_1..lambda_k`.
    Eigs {
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[command(flatten)]
        spectral: Spectral,
        /// Also write the JSON result to this file.
        #[arg(long)]
        json_out: Option<PathBuf>,
    },
    /// Trace of the dispersion process.
    Dispersion {
        input: PathBuf,
        #[command(flatten)]
        dynamics: Dynamics,
    },
    /// Mixing time, its upper bound and the bottleneck cut.
    Mix {
        input: PathBuf,
        #[command(flatten)]
        dynamics: Dynamics,
        #[command(flatten)]
        spectral: Spectral,
    },
    /// Sweep cut of the second eigenvector with a Cheeger report.
    Cut {
        input: PathBuf,
        #[command(flatten)]
        spectral: Spectral,
        /// Rank sets by `cut / vol(S)` instead of the min-volume ratio.
        #[arg(long)]
        one_sided: bool,
    },
    /// Small set of low expansion.
    Sse {
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 48)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Iter)]
        method: MethodArg,
    },
    /// Up to k disjoint sets of low expansion.
    Kpart {
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = MethodArg::Iter)]
        method: MethodArg,
        /// Use the constants of the original analysis.
        #[arg(long)]
        paper_constants: bool,
    },
    /// Sparsest cut with demand pairs.
    Demands {
        input: PathBuf,
        /// One `s t` pair per line, 1-based.
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long, default_value_t = 32)]
        trials: usize,
    },
    /// Vertex expansion of a graph given as an edge list.
    Vertexexp {
        input: PathBuf,
        /// Write the reduction hypergraph in hMETIS format.
        #[arg(long)]
        hgr_out: Option<PathBuf>,
    },
    /// Property checks on a bundled corpus.
    Verify {
        #[arg(long, default_value = "small")]
        corpus: String,
    },
    /// The JSON schema of every command's output.
    Schema,
}

/// Errors split by exit code.
enum Failure {
    /// Bad input or configuration.
    Usage(anyhow::Error),
    /// The computation itself failed.
    Compute(anyhow::Error),
}

impl From<HgError> for Failure {
    fn from(e: HgError) -> Self {
        match e {
            HgError::Parse { .. } | HgError::InvalidHypergraph(_) | HgError::InvalidInput(_) => {
                Failure::Usage(e.into())
            }
            _ => Failure::Compute(e.into()),
        }
    }
}

type Run<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(anyhow::anyhow!(msg.into()))
}

fn read(path: &Path) -> Run<String> {
    std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Usage)
}

fn load(path: &Path) -> Run<Hypergraph<f64>> {
    Hypergraph::parse_hmetis(&read(path)?).map_err(|e| Failure::Usage(anyhow::anyhow!("{}: {e}", path.display())))
}

fn one_based(set: &[usize]) -> Vec<usize> {
    set.iter().map(|v| v + 1).collect()
}

fn cut_json(c: &CutResult<f64>) -> Value {
    json!({
        "set": one_based(&c.set),
        "expansion": c.expansion,
        "ratio_type": c.ratio_type,
        "certificate": c.certificate,
    })
}

#[derive(Serialize)]
struct PairOut<'a> {
    index: usize,
    lambda: f64,
    vector: &'a [f64],
    density: Vec<f64>,
    method: Method,
    consistency_residual: f64,
    converged: bool,
}

fn pair_out<'a>(h: &Hypergraph<f64>, i: usize, p: &'a EigenPair) -> PairOut<'a> {
    PairOut {
        index: i + 1,
        lambda: p.value,
        vector: &p.vector,
        density: p.density(h),
        method: p.method,
        consistency_residual: p.consistency_residual,
        converged: p.converged,
    }
}

fn start_measure(h: &Hypergraph<f64>, start: Option<usize>, seed: u64) -> Run<Vec<f64>> {
    let n = h.n();
    match start {
        Some(v) if v == 0 || v > n => Err(usage(format!("--start must lie in 1..={n}"))),
        Some(v) => {
            let mut mu = vec![0.0; n];
            mu[v - 1] = 1.0;
            Ok(mu)
        }
        None => {
            let mut rng = rng_for(seed, 0);
            let mut mu: Vec<f64> = (0..n).map(|_| rand::Rng::random::<f64>(&mut rng)).collect();
            let s: f64 = mu.iter().sum();
            mu.iter_mut().for_each(|x| *x /= s);
            Ok(mu)
        }
    }
}

fn dispersion_config(d: &Dynamics) -> DispersionConfig<f64> {
    DispersionConfig::default()
        .with_dt(d.dt)
        .with_horizon(d.horizon)
        .with_delta(d.delta)
}

fn csv_unsupported(name: &str) -> Failure {
    usage(format!("`{name}` has no CSV output; use --format json"))
}

/// Output text and whether the run counts as a failure (only `verify`).
fn run(cli: &Cli) -> Run<(String, bool)> {
    let seed = cli.seed;
    let format = cli.format.unwrap_or(match cli.command {
        Command::Verify { .. } => Format::Table,
        _ => Format::Json,
    });
    if format == Format::Table && !matches!(cli.command, Command::Verify { .. }) {
        return Err(usage("--format table is only available for `verify`"));
    }
    let csv = format == Format::Csv;
    let json_text = |v: &Value| -> String {
        let mut s = serde_json::to_string_pretty(v).expect("serializable");
        s.push('\n');
        s
    };
    let out = match &cli.command {
        Command::Info { input } => {
            let h = load(input)?;
            let d = h.degrees();
            let mean = d.iter().sum::<f64>() / d.len() as f64;
            let v = json!({
                "n": h.n(),
                "m": h.m(),
                "r_min": h.r_min(),
                "r_max": h.r_max(),
                "degree_min": h.min_degree(),
                "degree_max": h.max_degree(),
                "degree_mean": mean,
                "volume": h.volume(),
                "regular": h.is_regular(1e-12),
                "components": h.components().len(),
            });
            if csv {
                let mut s = String::from("key,value\n");
                for (k, val) in v.as_object().expect("object") {
                    let _ = writeln!(s, "{k},{val}");
                }
                s
            } else {
                json_text(&v)
            }
        }
        Command::Eigs { input, k, spectral, json_out } => {
            let h = load(input)?;
            if *k == 0 || *k > h.n() {
                return Err(usage(format!("--k must lie in 1..={}", h.n())));
            }
            let pairs = eig_sequence(&h, *k, spectral.method.into(), &spectral.config(seed))?;
            let rows: Vec<PairOut> = pairs.iter().enumerate().map(|(i, p)| pair_out(&h, i, p)).collect();
            let text = json_text(&serde_json::to_value(&rows).expect("serializable"));
            if let Some(path) = json_out {
                std::fs::write(path, &text)
                    .with_context(|| format!("writing {}", path.display()))
                    .map_err(Failure::Compute)?;
            }
            if csv {
                let mut s = String::from("index,lambda,consistency_residual,converged\n");
                for r in &rows {
                    let _ = writeln!(s, "{},{},{},{}", r.index, r.lambda, r.consistency_residual, r.converged);
                }
                s
            } else {
                text
            }
        }
        Command::Dispersion { input, dynamics } => {
            let h = load(input)?;
            let mu = start_measure(&h, dynamics.start, seed)?;
            let trace = simulate(&h, &mu, &dispersion_config(dynamics))?;
            if csv {
                let mut s = String::from("t,rayleigh,l2_norm,l1_dist\n");
                for x in &trace.samples {
                    let _ = writeln!(s, "{},{},{},{}", x.t, x.rayleigh, x.l2_norm, x.l1_dist);
                }
                s
            } else {
                json_text(&json!({
                    "start": mu,
                    "samples": trace.samples.iter().map(|x| json!({
                        "t": x.t,
                        "rayleigh": x.rayleigh,
                        "l2_norm": x.l2_norm,
                        "l1_dist": x.l1_dist,
                    })).collect::<Vec<_>>(),
                    "support_changes": trace.support_changes,
                }))
            }
        }
        Command::Mix { input, dynamics, spectral } => {
            if csv {
                return Err(csv_unsupported("mix"));
            }
            let h = load(input)?;
            let mu = start_measure(&h, dynamics.start, seed)?;
            let cfg = dispersion_config(dynamics);
            let l2 = if h.n() >= 2 {
                Some(eig_sequence(&h, 2, spectral.method.into(), &spectral.config(seed))?[1].value)
            } else {
                None
            };
            let report = mixing_time(&h, &mu, dynamics.delta, &cfg, l2)?;
            let cut = match bottleneck_cut(&h, &mu, &cfg) {
                Ok(c) => cut_json(&c),
                Err(_) => Value::Null,
            };
            json_text(&json!({
                "mixing_time": report.time,
                "final_distance": report.final_distance,
                "lambda2": l2,
                "bound": report.bound,
                "within_bound": report.within_bound,
                "bottleneck_cut": cut,
            }))
        }
        Command::Cut { input, spectral, one_sided } => {
            let h = load(input)?;
            if h.n() < 2 {
                return Err(usage("need at least two vertices"));
            }
            let pairs = eig_sequence(&h, 2, spectral.method.into(), &spectral.config(seed))?;
            let x = pairs[1].density(&h);
            let mut cut = sweep_cut(&h, &x)?;
            if *one_sided {
                cut = CutResult::evaluate(&h, cut.set, RatioType::OneSided, cut.certificate)?;
            }
            let cheeger = cheeger_check(&h, pairs[1].value, Some(&cut.set)).ok();
            if csv {
                let mut s = String::from("vertex,in_set,certificate\n");
                for v in 0..h.n() {
                    let _ = writeln!(s, "{},{},{}", v + 1, cut.set.contains(&v), cut.certificate[v]);
                }
                s
            } else {
                let mut v = cut_json(&cut);
                v["lambda2"] = json!(pairs[1].value);
                v["cheeger"] = match cheeger {
                    Some(c) => json!({
                        "expansion": c.expansion,
                        "set": one_based(&c.set),
                        "lower": c.lower,
                        "upper": c.upper,
                        "holds": c.holds,
                        "exact": c.exact,
                    }),
                    None => Value::Null,
                };
                json_text(&v)
            }
        }
        Command::Sse { input, k, trials, method } => {
            if csv {
                return Err(csv_unsupported("sse"));
            }
            let h = load(input)?;
            if *k == 0 || *k > h.n() {
                return Err(usage(format!("--k must lie in 1..={}", h.n())));
            }
            let mut cfg = SseConfig {
                trials: *trials,
                seed,
                method: (*method).into(),
                ..SseConfig::default()
            };
            cfg.spectral.iter.seed = seed;
            cfg.spectral.sdp.seed = seed;
            let r = small_set_expansion(&h, *k, &cfg)?;
            let mut v = cut_json(&r.cut);
            v["size"] = json!(r.size);
            v["size_bound"] = json!(r.size_bound);
            v["within_bound"] = json!(r.within_bound);
            v["trial"] = json!(r.trial);
            json_text(&v)
        }
        Command::Kpart { input, k, method, paper_constants } => {
            if csv {
                return Err(csv_unsupported("kpart"));
            }
            let h = load(input)?;
            if *k == 0 || *k > h.n() {
                return Err(usage(format!("--k must lie in 1..={}", h.n())));
            }
            let mut cfg = KpartConfig {
                seed,
                method: (*method).into(),
                ..KpartConfig::default()
            };
            cfg.spectral.iter.seed = seed;
            cfg.spectral.sdp.seed = seed;
            if *paper_constants {
                cfg = cfg.paper_constants();
            }
            let r = multi_partition(&h, *k, &cfg)?;
            json_text(&json!({
                "sets": r.partition.sets.iter().map(|s| one_based(s)).collect::<Vec<_>>(),
                "expansions": r.partition.expansions,
                "max_expansion": r.partition.max_expansion,
                "requested": r.partition.requested,
                "complete": r.partition.complete,
                "lambda_k": r.lambda_k,
                "budget": r.budget,
                "rounds": r.rounds,
            }))
        }
        Command::Demands { input, pairs, trials } => {
            if csv {
                return Err(csv_unsupported("demands"));
            }
            let h = load(input)?;
            let p = DemandInstance::parse_pairs(&read(pairs)?)?;
            let inst = DemandInstance::new(h, p)?;
            let cfg = DemandsConfig {
                trials: *trials,
                seed,
                ..DemandsConfig::default()
            };
            let r = sparsest_cut_demands(&inst, &cfg)?;
            json_text(&json!({
                "set": one_based(&r.set),
                "sparsity": r.sparsity,
                "separated": r.separated,
                "sdp_value": r.sdp_value,
                "triangle_violation": r.triangle_violation,
                "trial": r.trial,
            }))
        }
        Command::Vertexexp { input, hgr_out } => {
            if csv {
                return Err(csv_unsupported("vertexexp"));
            }
            let g = Graph::parse_edge_list(&read(input)?)?;
            let h = reduce_to_hypergraph(&g)?;
            if let Some(path) = hgr_out {
                std::fs::write(path, h.to_hmetis())
                    .with_context(|| format!("writing {}", path.display()))
                    .map_err(Failure::Compute)?;
            }
            let mut cfg = LambdaInfConfig::default();
            cfg.iter.seed = seed;
            let li = lambda_inf(&g, &cfg)?;
            let d = g.max_degree() as f64;
            let brute = brute_force_vertex_expansion(&g).ok();
            let sandwich = brute.as_ref().map(|(set, phi)| {
                json!({
                    "set": one_based(set),
                    "vertex_expansion": phi,
                    "lower": li.lambda_inf / 2.0,
                    "upper": (2.0 * li.lambda_inf).sqrt(),
                    "holds": li.lambda_inf / 2.0 <= *phi + 1e-9 && *phi <= (2.0 * li.lambda_inf).sqrt() + 1e-9,
                })
            });
            json_text(&json!({
                "n": g.n(),
                "max_degree": g.max_degree(),
                "regular": g.is_regular(),
                "lambda_inf": li.lambda_inf,
                "lambda2_mvert": li.lambda2_mvert,
                "lambda_inf_over_d": li.lambda_inf / d,
                "consistency_residual": li.consistency_residual,
                "reduction": {"n": h.n(), "m": h.m(), "r_max": h.r_max()},
                "sandwich": sandwich,
            }))
        }
        Command::Verify { corpus } => {
            let report = hgspec::verify::run(corpus, seed)?;
            let text = match format {
                Format::Table => report.to_table(),
                Format::Csv => {
                    let mut s = String::from("criterion,check,instance,passed,detail\n");
                    for r in &report.rows {
                        let _ = writeln!(s, "{},{},{},{},\"{}\"", r.criterion, r.check, r.instance, r.passed, r.detail);
                    }
                    s
                }
                Format::Json => json_text(&serde_json::to_value(&report).expect("serializable")),
            };
            return Ok((text, !report.passed()));
        }
        Command::Schema => {
            if csv {
                return Err(csv_unsupported("schema"));
            }
            schema::SCHEMA.to_string()
        }
    };
    Ok((out, false))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (text, failed) = match run(&cli) {
        Ok(x) => x,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
        Err(Failure::Compute(e)) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &text).with_context(|| format!("writing {}", path.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes()).context("writing stdout")
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    if failed {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
