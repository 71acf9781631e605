//! Command-line runner: build hopsets/spanners, verify them against their
//! claimed bounds, generate experiment graphs, sweep benchmarks, and trace
//! constructive low-hop certificates.
//!
//! Exit codes: 0 success/pass, 1 verification failure, 2 usage or input
//! error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use hopspan::gen;
use hopspan::graph::Graph;
use hopspan::hopset::{build_hopset_with_levels, hopset_size_stats, HopsetEdgeSet};
use hopspan::levels::{sample_levels, LevelAssignment};
use hopspan::lowerbound::{
    build_tower_graph, cage, cage_spec, CageName, TowerConfig,
};
use hopspan::schedule::{LevelFunction, ParamSchedule, Variant};
use hopspan::spanner::{
    build_spanner_half_with_levels, build_spanner_truncated_with_levels, spanner_size_stats,
    SpannerEdgeSet,
};
use hopspan::verify::{
    hopset_pair_rows, measure_min_hopbound, spanner_pair_rows, trace_jump_path, verify_hopset,
    verify_spanner, JumpCertificate, MinHopbound, PairSpec, VerificationReport,
};

#[derive(Parser)]
#[command(name = "hopspan", version, about = "hopset/spanner construction and verification")]
struct Cli {
    /// Worker threads (0 = all cores); results do not depend on this.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a hopset or spanner artifact from a graph file.
    Build {
        #[command(subcommand)]
        what: BuildKind,
    },
    /// Verify an artifact against its claimed bounds (or overrides).
    Verify(VerifyArgs),
    /// Generate experiment graphs.
    Gen {
        #[command(subcommand)]
        what: GenKind,
    },
    /// Sweep schedules over generated graphs and report sizes and minimal
    /// hopbounds as CSV.
    Bench(BenchArgs),
    /// Trace constructive jump-path certificates on a built hopset.
    Trace(TraceArgs),
}

#[derive(Args)]
struct ScheduleArgs {
    /// Size parameter k >= 1.
    #[arg(long)]
    k: u32,
    /// Level function: identity | linear | interleaved:C | custom:a,b,c,...
    #[arg(long, default_value = "identity")]
    f: String,
    /// Stretch parameter t > 0.
    #[arg(long, default_value_t = 1.0)]
    t: f64,
}

impl ScheduleArgs {
    fn resolve(&self, variant: Variant) -> Result<ParamSchedule> {
        let f = parse_level_function(&self.f, self.k)?;
        Ok(ParamSchedule::new(self.k, f, self.t, variant)?)
    }
}

fn parse_level_function(spec: &str, k: u32) -> Result<LevelFunction> {
    let spec = spec.trim();
    if spec.eq_ignore_ascii_case("identity") {
        return Ok(LevelFunction::Identity);
    }
    if spec.eq_ignore_ascii_case("linear") {
        return Ok(LevelFunction::Linear { k });
    }
    if let Some(c) = spec.strip_prefix("interleaved:") {
        let c: u32 = c.parse().context("interleaved block size")?;
        return Ok(LevelFunction::interleaved(c)?);
    }
    if let Some(table) = spec.strip_prefix("custom:") {
        let table: Vec<u32> = table
            .split(',')
            .map(|v| v.trim().parse().context("custom table entry"))
            .collect::<Result<_>>()?;
        return Ok(LevelFunction::custom(table)?);
    }
    bail!("unknown level function `{spec}` (identity | linear | interleaved:C | custom:...)")
}

#[derive(Subcommand)]
enum BuildKind {
    /// Weighted-graph hopset.
    Hopset(BuildArgs),
    /// Unweighted spanner with radius-truncated bunch paths (needs t).
    SpannerTrunc(BuildArgs),
    /// Unweighted spanner with half bunches (one build for every t).
    SpannerHalf(BuildArgs),
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    sched: ScheduleArgs,
    /// Input graph in edge-list format.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output artifact path (defaults next to the input).
    #[arg(long)]
    output: Option<PathBuf>,
    /// Inject an explicit level assignment (JSON) instead of sampling.
    #[arg(long)]
    levels_json: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    artifact: PathBuf,
    /// Override the claimed multiplicative stretch.
    #[arg(long)]
    alpha: Option<f64>,
    /// Override the claimed hop budget (hopsets).
    #[arg(long)]
    beta: Option<u32>,
    /// Override the claimed additive stretch (spanners).
    #[arg(long)]
    add: Option<f64>,
    /// t values for simultaneous verification of half-bunch spanners.
    #[arg(long, value_delimiter = ',', default_value = "1,4,16")]
    t_list: Vec<f64>,
    /// Verify this many sampled pairs instead of the automatic policy.
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long, default_value_t = 0x5eed)]
    pair_seed: u64,
    /// Force exhaustive all-pairs verification.
    #[arg(long, default_value_t = false)]
    exhaustive: bool,
    /// Write the full report as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Write per-pair (u, v, d, approx, ratio) rows as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum GenKind {
    /// Seeded random graph (weighted unless --unweighted).
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Integer weights are drawn from 1..=max-weight.
        #[arg(long, default_value_t = 10)]
        max_weight: u32,
        #[arg(long, default_value_t = false)]
        unweighted: bool,
        #[arg(long)]
        output: PathBuf,
    },
    /// Random regular graph with a girth floor (rejection sampling).
    Regular {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        degree: usize,
        #[arg(long, default_value_t = 3)]
        min_girth: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        max_tries: usize,
        #[arg(long)]
        output: PathBuf,
    },
    /// One of the embedded cage graphs.
    Cage {
        /// petersen | heawood | mcgee | tutte-coxeter
        #[arg(long)]
        name: String,
        #[arg(long)]
        output: PathBuf,
    },
    /// Layered tower instance (writes a JSON sidecar next to the graph).
    Tower {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value = "identity")]
        f: String,
        #[arg(long)]
        alpha: u32,
        /// n = 2^(2 k a).
        #[arg(long, default_value_t = 1)]
        a: u32,
        /// Desk-scale override of the log2(n) layer multiplier.
        #[arg(long)]
        layer_mult: Option<u64>,
        /// Desk-scale override of the tower count.
        #[arg(long)]
        towers: Option<usize>,
        /// Desk-scale override of the top-layer size.
        #[arg(long)]
        top_layer: Option<usize>,
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 128)]
    n: usize,
    #[arg(long, default_value_t = 384)]
    m: usize,
    #[arg(long)]
    k: u32,
    #[arg(long, default_value_t = 10)]
    max_weight: u32,
    /// Schedules to sweep, e.g. linear,identity,interleaved:2.
    #[arg(long, value_delimiter = ',', default_value = "linear,identity")]
    schedules: Vec<String>,
    /// Stretch values at which the minimal hopbound is measured.
    #[arg(long, value_delimiter = ',')]
    alphas: Vec<f64>,
    #[arg(long, default_value_t = 3)]
    graph_seeds: u64,
    #[arg(long, default_value_t = 2)]
    sample_seeds: u64,
    /// CSV output path (stdout when omitted).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    sched: ScheduleArgs,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trace this many random connected pairs.
    #[arg(long, default_value_t = 100)]
    pairs: usize,
    #[arg(long, default_value_t = 1)]
    pair_seed: u64,
    /// Trace a single pair instead of sampling.
    #[arg(long)]
    u: Option<u32>,
    #[arg(long)]
    v: Option<u32>,
    /// Write certificates as JSON.
    #[arg(long)]
    report: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("hopspan: failed to set thread count: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hopspan: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Build { what } => cmd_build(what),
        Command::Verify(args) => cmd_verify(args),
        Command::Gen { what } => cmd_gen(what),
        Command::Bench(args) => cmd_bench(args),
        Command::Trace(args) => cmd_trace(args),
    }
}

fn read_graph(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading graph file {}", path.display()))?;
    Ok(Graph::from_edge_list_str(&text)?)
}

fn load_levels(
    path: &Option<PathBuf>,
    g: &Graph,
    sched: &ParamSchedule,
    seed: u64,
) -> Result<LevelAssignment> {
    match path {
        None => Ok(sample_levels(g, sched, seed)),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading level assignment {}", p.display()))?;
            let la: LevelAssignment = serde_json::from_str(&text)?;
            if la.levels.len() != g.n() || la.depth != sched.levels {
                bail!("level assignment does not match the graph and schedule");
            }
            Ok(la)
        }
    }
}

fn cmd_build(what: BuildKind) -> Result<ExitCode> {
    let (args, variant) = match &what {
        BuildKind::Hopset(a) => (a, Variant::Hopset),
        BuildKind::SpannerTrunc(a) => (a, Variant::SpannerTruncated),
        BuildKind::SpannerHalf(a) => (a, Variant::SpannerHalf),
    };
    let sched = args.sched.resolve(variant)?;
    println!("{}", serde_json::to_string_pretty(&sched)?);
    let g = read_graph(&args.input)?;
    let la = load_levels(&args.levels_json, &g, &sched, args.seed)?;
    let (artifact_text, default_ext) = match what {
        BuildKind::Hopset(_) => {
            let build = build_hopset_with_levels(&g, &sched, &la)?;
            let stats = hopset_size_stats(&build.hopset);
            eprintln!(
                "hopset: {} edges ({} pivot, {} bunch)",
                stats.total, stats.pivot_edges, stats.bunch_edges
            );
            (build.hopset.to_artifact_string(), "hopset")
        }
        BuildKind::SpannerTrunc(_) => {
            let build = build_spanner_truncated_with_levels(&g, &sched, &la)?;
            let stats = spanner_size_stats(&build.spanner);
            eprintln!("spanner: {} edges", stats.total);
            (build.spanner.to_artifact_string(), "spanner")
        }
        BuildKind::SpannerHalf(_) => {
            let build = build_spanner_half_with_levels(&g, &sched, &la)?;
            let stats = spanner_size_stats(&build.spanner);
            eprintln!("spanner: {} edges", stats.total);
            (build.spanner.to_artifact_string(), "spanner")
        }
    };
    let out = args
        .output
        .clone()
        .unwrap_or_else(|| args.input.with_extension(default_ext));
    std::fs::write(&out, artifact_text).with_context(|| format!("writing {}", out.display()))?;
    eprintln!("wrote {}", out.display());
    Ok(ExitCode::SUCCESS)
}

fn pair_spec(args: &VerifyArgs) -> PairSpec {
    if args.exhaustive {
        PairSpec::Exhaustive
    } else if let Some(pairs) = args.pairs {
        PairSpec::Sample {
            pairs,
            seed: args.pair_seed,
        }
    } else {
        PairSpec::Auto
    }
}

fn report_outcome(label: &str, rep: &VerificationReport) -> bool {
    let verdict = if rep.pass { "pass" } else { "FAIL" };
    println!(
        "{label}: {verdict} (observed {:.4} vs claimed {:.4}, {} pairs checked, {} skipped)",
        rep.observed_max_stretch, rep.claimed_alpha, rep.checked_pairs, rep.skipped_pairs
    );
    if let (false, Some(w)) = (rep.pass, rep.worst.as_ref()) {
        println!(
            "  worst pair ({}, {}): d = {}, approximation = {}",
            w.u, w.v, w.dist, w.approx
        );
    }
    rep.pass
}

fn write_reports(
    report: &Option<PathBuf>,
    csv: &Option<PathBuf>,
    reports: &[VerificationReport],
    rows: Option<Vec<hopspan::verify::PairRow>>,
) -> Result<()> {
    if let Some(path) = report {
        std::fs::write(path, serde_json::to_string_pretty(reports)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if let (Some(path), Some(rows)) = (csv, rows) {
        let mut out = String::from("u,v,dist,approx,ratio\n");
        for r in rows {
            out.push_str(&format!("{},{},{},{},{}\n", r.u, r.v, r.dist, r.approx, r.ratio));
        }
        std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<ExitCode> {
    let g = read_graph(&args.graph)?;
    let text = std::fs::read_to_string(&args.artifact)
        .with_context(|| format!("reading artifact {}", args.artifact.display()))?;
    let header: serde_json::Value = serde_json::from_str(
        text.lines()
            .next()
            .ok_or_else(|| anyhow!("empty artifact file"))?,
    )
    .context("artifact header")?;
    let format = header
        .get("format")
        .and_then(|f| f.as_str())
        .ok_or_else(|| anyhow!("artifact header lacks a format field"))?;
    let spec = pair_spec(&args);
    match format {
        "hopset-v1" => {
            let h = HopsetEdgeSet::from_artifact_str(&text)?;
            h.schedule.validate()?;
            let alpha = args.alpha.unwrap_or_else(|| h.schedule.hopset_stretch());
            let beta = args.beta.unwrap_or_else(|| h.schedule.hop_budget());
            let rep = verify_hopset(&g, &h, alpha, beta, spec)?;
            let pass = report_outcome(&format!("hopset ({alpha:.3}, {beta})"), &rep);
            let rows = if args.csv.is_some() {
                Some(hopset_pair_rows(&g, &h, beta, spec)?)
            } else {
                None
            };
            write_reports(&args.report, &args.csv, &[rep], rows)?;
            Ok(if pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        "spanner-v1" => {
            let s = SpannerEdgeSet::from_artifact_str(&text)?;
            s.schedule.validate()?;
            let mut reports = Vec::new();
            let mut all_pass = true;
            match s.schedule.variant {
                Variant::SpannerHalf if args.alpha.is_none() => {
                    // one build is claimed to work for every t; check the list
                    for &t in &args.t_list {
                        let st = s.schedule.with_t(t)?;
                        let (mult, add) = st.spanner_bounds();
                        let rep = verify_spanner(&g, &s, mult, args.add.unwrap_or(add))?;
                        all_pass &= report_outcome(&format!("spanner t={t} ({mult:.3} d + {add:.1})"), &rep);
                        reports.push(rep);
                    }
                }
                _ => {
                    let (dm, da) = s.schedule.spanner_bounds();
                    let mult = args.alpha.unwrap_or(dm);
                    let add = args.add.unwrap_or(da);
                    let rep = verify_spanner(&g, &s, mult, add)?;
                    all_pass &= report_outcome(&format!("spanner ({mult:.3} d + {add:.1})"), &rep);
                    reports.push(rep);
                }
            }
            let rows = if args.csv.is_some() {
                Some(spanner_pair_rows(&g, &s)?)
            } else {
                None
            };
            write_reports(&args.report, &args.csv, &reports, rows)?;
            Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        other => bail!("unknown artifact format `{other}`"),
    }
}

fn cmd_gen(what: GenKind) -> Result<ExitCode> {
    match what {
        GenKind::Random {
            n,
            m,
            seed,
            max_weight,
            unweighted,
            output,
        } => {
            let g = if unweighted {
                gen::random_unweighted(n, m, seed)?
            } else {
                gen::random_weighted(n, m, max_weight, seed)?
            };
            std::fs::write(&output, g.to_edge_list_string())?;
            eprintln!("wrote {} ({} vertices, {} edges)", output.display(), g.n(), g.m());
        }
        GenKind::Regular {
            n,
            degree,
            min_girth,
            seed,
            max_tries,
            output,
        } => {
            let g = gen::random_regular_with_girth(n, degree, min_girth, seed, max_tries)?;
            let girth = hopspan::lowerbound::girth(&g)?.map_or("inf".to_string(), |x| x.to_string());
            std::fs::write(&output, g.to_edge_list_string())?;
            eprintln!(
                "wrote {} ({n} vertices, degree {degree}, girth {girth})",
                output.display()
            );
        }
        GenKind::Cage { name, output } => {
            let name = CageName::parse(&name)?;
            let spec = cage_spec(name);
            let g = cage(name);
            std::fs::write(&output, g.to_edge_list_string())?;
            eprintln!(
                "wrote {} ({} vertices, {} edges, degree {}, girth {})",
                output.display(),
                spec.n,
                spec.m,
                spec.degree,
                spec.girth
            );
        }
        GenKind::Tower {
            k,
            f,
            alpha,
            a,
            layer_mult,
            towers,
            top_layer,
            output,
        } => {
            let config = TowerConfig {
                k,
                f: parse_level_function(&f, k)?,
                alpha,
                a,
                layer_mult,
                towers,
                top_layer,
            };
            let tg = build_tower_graph(config)?;
            std::fs::write(&output, tg.graph.to_edge_list_string())?;
            let sidecar_path = output.with_extension("tower.json");
            std::fs::write(&sidecar_path, serde_json::to_string_pretty(&tg.sidecar())?)?;
            eprintln!(
                "wrote {} ({} vertices, {} towers x {} layers{}) and {}",
                output.display(),
                tg.graph.n(),
                tg.towers,
                tg.layers,
                if tg.non_asymptotic { ", non-asymptotic overrides" } else { "" },
                sidecar_path.display()
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode> {
    if args.alphas.is_empty() {
        bail!("--alphas needs at least one value");
    }
    let mut csv = String::from("schedule,graph_seed,sample_seed,n,m,hopset_edges,alpha,beta_star\n");
    for spec in &args.schedules {
        let f = parse_level_function(spec, args.k)?;
        let sched = ParamSchedule::new(args.k, f, 1.0, Variant::Hopset)?;
        for gseed in 0..args.graph_seeds {
            let g = gen::random_weighted(args.n, args.m, args.max_weight, gseed)?;
            for sseed in 0..args.sample_seeds {
                let la = sample_levels(&g, &sched, sseed);
                let build = build_hopset_with_levels(&g, &sched, &la)?;
                for &alpha in &args.alphas {
                    let beta = match measure_min_hopbound(&g, &build.hopset, alpha)? {
                        MinHopbound::Bounded(b) => b.to_string(),
                        MinHopbound::UnreachableAtAlpha => "unreachable".to_string(),
                    };
                    csv.push_str(&format!(
                        "{spec},{gseed},{sseed},{},{},{},{alpha},{beta}\n",
                        g.n(),
                        g.m(),
                        build.hopset.len()
                    ));
                }
            }
        }
    }
    match &args.output {
        Some(path) => std::fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_trace(args: TraceArgs) -> Result<ExitCode> {
    let sched = args.sched.resolve(Variant::Hopset)?;
    let g = read_graph(&args.graph)?;
    let la = sample_levels(&g, &sched, args.seed);
    let build = build_hopset_with_levels(&g, &sched, &la)?;
    let pairs: Vec<(u32, u32)> = match (args.u, args.v) {
        (Some(u), Some(v)) => vec![(u, v)],
        (None, None) => {
            use rand::prelude::*;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.pair_seed);
            (0..args.pairs)
                .map(|_| {
                    (
                        rng.gen_range(0..g.n() as u32),
                        rng.gen_range(0..g.n() as u32),
                    )
                })
                .collect()
        }
        _ => bail!("--u and --v must be given together"),
    };
    let mut certs: Vec<JumpCertificate> = Vec::new();
    let mut failures = 0usize;
    let mut skipped = 0usize;
    for (u, v) in pairs {
        match trace_jump_path(&g, &build.hopset, &sched, &build.assignment, &build.pivots, u, v, args.sched.t) {
            Ok(cert) => match cert.validate(&g, &build.hopset) {
                Ok(()) => certs.push(cert),
                Err(e) => {
                    failures += 1;
                    eprintln!("certificate for ({u},{v}) failed validation: {e}");
                }
            },
            Err(hopspan::Error::InvalidArgument(msg)) if msg.contains("disconnected") => {
                skipped += 1;
            }
            Err(e) => {
                failures += 1;
                eprintln!("trace for ({u},{v}) failed: {e}");
            }
        }
    }
    println!(
        "traced {} certificates, {} failures, {} disconnected pairs skipped",
        certs.len(),
        failures,
        skipped
    );
    if let Some(path) = &args.report {
        std::fs::write(path, serde_json::to_string_pretty(&certs)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
