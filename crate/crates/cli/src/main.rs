mod config;

use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gh_core::blanusa::{diagnose, BlanusaConstants};
use gh_core::geometry::{sample, ModelSpace, PointCloud, ProductSignature, Resolution, SamplingSpec};
use gh_core::gh_estimate::{
    estimate_gh, CandidateGridSpec, DistanceCache, DistanceTable, ModelPair, Provenance,
};
use gh_core::hausdorff::{hausdorff, Algorithm};
use gh_core::latent_graph::{
    build_graph, four_sig_figs, search, Evaluator, GraphFormat, SearchAlgorithm, SearchGraph,
};
use gh_core::{GhError, Result};

use config::{OutputFormat, RunConfig};

const DEFAULT_CACHE: &str = "ghspace-cache.json";

#[derive(Parser)]
#[command(name = "ghspace", version, about = "Gromov-Hausdorff distances between model spaces and signature graph search")]
struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for the parallel stages.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Distance cache file.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a unit ball of E2, S2 or H2 on a polar grid.
    Sample(SampleArgs),
    /// Compute the embedding constants and run the invariant suite.
    Diagnose(DiagnoseArgs),
    /// Exact Hausdorff distance between two point clouds.
    Hausdorff(HausdorffArgs),
    /// Upper-bound GH estimate between a model space and H2.
    Estimate(EstimateArgs),
    /// Print the pairwise distance table and the resulting edge weights.
    Table(TableArgs),
    /// Build or search the signature graph.
    #[command(subcommand)]
    Graph(GraphCommand),
}

#[derive(Args)]
struct SampleArgs {
    space: ModelSpace,
    #[arg(long, default_value = "100x100")]
    grid: Resolution,
    #[arg(long)]
    r_min: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    sup_grid: Option<usize>,
    #[arg(long)]
    pullback_grid: Option<usize>,
    #[arg(long)]
    pullback_step: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HausdorffArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, default_value = "tree", value_parser = ["naive", "earlybreak", "tree"])]
    algo: String,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    pair: ModelPair,
    #[arg(long)]
    coarse: Option<Resolution>,
    #[arg(long)]
    fine: Option<Resolution>,
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long)]
    offset_steps: Option<usize>,
    #[arg(long)]
    exhaustive: bool,
    /// Start from the reduced desk-scale grid instead of the configured one.
    #[arg(long)]
    desk: bool,
    /// Recompute even when a cached entry exists.
    #[arg(long)]
    refresh: bool,
}

#[derive(Args)]
struct TableArgs {
    /// Use the built-in table and ignore the cache.
    #[arg(long)]
    default: bool,
    /// Override one entry, e.g. `e2h2=0.7`.
    #[arg(long = "set", value_name = "PAIR=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum GraphCommand {
    Build(GraphBuildArgs),
    Search(GraphSearchArgs),
}

#[derive(Args)]
struct GraphBuildArgs {
    #[arg(long)]
    max_factors: u32,
    /// Cache file or bare table JSON supplying the distances.
    #[arg(long)]
    table: Option<PathBuf>,
    /// Output path; `.dot` writes DOT, anything else JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GraphSearchArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value = "exhaustive")]
    algo: SearchAlgorithm,
    #[arg(long)]
    start: Option<ProductSignature>,
    #[arg(long)]
    budget: Option<usize>,
    /// `table:values.csv`, `cmd:"..."` or `synthetic:NAME`.
    #[arg(long = "eval")]
    evaluator: String,
}

fn exit_code(err: &GhError) -> u8 {
    match err {
        GhError::Parameter(_) | GhError::Domain(_) | GhError::Chart(_) => 1,
        GhError::Convergence { .. } | GhError::Numerical(_) | GhError::Evaluation { .. } => 2,
        GhError::Io(_) | GhError::Json(_) | GhError::Format(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    if cli.cache.is_some() {
        cfg.cache = cli.cache.clone();
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    cfg.validate()?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| GhError::Parameter(format!("thread pool: {e}")))?;
    }

    match cli.command {
        Command::Sample(args) => cmd_sample(&cfg, args),
        Command::Diagnose(args) => cmd_diagnose(cfg, args),
        Command::Hausdorff(args) => cmd_hausdorff(&cfg, args),
        Command::Estimate(args) => cmd_estimate(cfg, args),
        Command::Table(args) => cmd_table(&cfg, args),
        Command::Graph(GraphCommand::Build(args)) => cmd_graph_build(args),
        Command::Graph(GraphCommand::Search(args)) => cmd_graph_search(args),
    }
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn read_cloud(path: &Path) -> Result<PointCloud> {
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        PointCloud::from_json(&fs::read_to_string(path)?)
    } else {
        PointCloud::read_csv(BufReader::new(fs::File::open(path)?))
    }
}

fn cmd_sample(cfg: &RunConfig, args: SampleArgs) -> Result<ExitCode> {
    let mut spec = SamplingSpec::for_space(args.space, args.grid);
    spec.r_min = args.r_min.unwrap_or(spec.r_min);
    spec.r_max = args.r_max.unwrap_or(spec.r_max);
    let cloud = sample(args.space, &spec)?;
    let is_json = match args.out.extension().and_then(|e| e.to_str()) {
        Some("json") => true,
        Some("csv") => false,
        _ => cfg.format == OutputFormat::Json,
    };
    if is_json {
        fs::write(&args.out, cloud.to_json()?)?;
    } else {
        cloud.write_csv(io::BufWriter::new(fs::File::create(&args.out)?))?;
    }
    println!("{} points, chart {}, written to {}", cloud.len(), cloud.chart(), args.out.display());
    Ok(ExitCode::SUCCESS)
}

/// Constants from the cache when they match the quadrature settings,
/// otherwise freshly computed and stored.
fn constants(cfg: &RunConfig, cache: &mut DistanceCache) -> Result<BlanusaConstants> {
    if let Some(c) = cache.constants_for(&cfg.quadrature, cfg.sup_grid_points) {
        return Ok(c.clone());
    }
    let c = BlanusaConstants::compute(cfg.quadrature, cfg.sup_grid_points)?;
    if !c.sup_refinement_ok() {
        eprintln!(
            "warning: sup-norm estimates changed by {:.2e} / {:.2e} under step halving",
            c.sup_refinement[0], c.sup_refinement[1]
        );
    }
    cache.constants = Some(c.clone());
    Ok(c)
}

fn cmd_diagnose(mut cfg: RunConfig, args: DiagnoseArgs) -> Result<ExitCode> {
    if let Some(t) = args.abs_tol {
        cfg.quadrature.abs_tol = t;
    }
    cfg.sup_grid_points = args.sup_grid.unwrap_or(cfg.sup_grid_points);
    cfg.pullback_grid = args.pullback_grid.unwrap_or(cfg.pullback_grid);
    cfg.pullback_step = args.pullback_step.unwrap_or(cfg.pullback_step);
    cfg.validate()?;

    let mut cache = match &cfg.cache {
        Some(p) => DistanceCache::load(p)?,
        None => DistanceCache::default(),
    };
    let consts = constants(&cfg, &mut cache)?;
    if let Some(p) = &cfg.cache {
        cache.save(p)?;
    }
    let report = diagnose(&consts, cfg.pullback_grid, cfg.pullback_step, cfg.seed)?;
    match &args.out {
        Some(path) => fs::write(path, serde_json::to_string_pretty(&report)?)?,
        None => print_json(&report)?,
    }
    if report.hard_invariants_hold() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("error: embedding invariants violated");
        Ok(ExitCode::from(2))
    }
}

fn cmd_hausdorff(cfg: &RunConfig, args: HausdorffArgs) -> Result<ExitCode> {
    let a = read_cloud(&args.a)?;
    let b = read_cloud(&args.b)?;
    let algo = match args.algo.as_str() {
        "naive" => Algorithm::Naive,
        "earlybreak" => Algorithm::EarlyBreak { seed: args.seed.unwrap_or(cfg.seed) },
        _ => Algorithm::Tree,
    };
    let r = hausdorff(&a, &b, algo)?;
    match cfg.format {
        OutputFormat::Json => print_json(&r)?,
        OutputFormat::Csv => {
            println!("distance,witness_a,witness_b,direction_ab,direction_ba");
            println!(
                "{:.17e},{},{},{:.17e},{:.17e}",
                r.distance, r.witness_a, r.witness_b, r.direction_ab, r.direction_ba
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_estimate(cfg: RunConfig, args: EstimateArgs) -> Result<ExitCode> {
    let mut grid = if args.desk { CandidateGridSpec::desk_scale() } else { cfg.grid.clone() };
    grid.coarse = args.coarse.unwrap_or(grid.coarse);
    grid.fine = args.fine.unwrap_or(grid.fine);
    grid.refine_top_k = args.top_k.unwrap_or(grid.refine_top_k);
    grid.offset_steps = args.offset_steps.unwrap_or(grid.offset_steps);
    grid.exhaustive |= args.exhaustive;
    grid.validate()?;

    let path = cfg.cache.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE));
    let mut cache = DistanceCache::load(&path)?;
    let key = DistanceCache::estimate_key(args.pair, &grid, &cfg.quadrature, cfg.sup_grid_points)?;
    if !args.refresh {
        if let Some(hit) = cache.lookup(&key) {
            eprintln!("served from cache {}", path.display());
            print_json(hit)?;
            return Ok(ExitCode::SUCCESS);
        }
    }
    let consts = constants(&cfg, &mut cache)?;
    let estimate = estimate_gh(args.pair, &grid, &consts)?;
    cache.insert(key, estimate.clone())?;
    cache.save(&path)?;
    eprintln!("computed over {} candidates, cached in {}", estimate.candidates_evaluated, path.display());
    print_json(&estimate)?;
    Ok(ExitCode::SUCCESS)
}

fn parse_override(s: &str) -> Result<(ModelSpace, ModelSpace, f64)> {
    let bad = || GhError::Parameter(format!("expected PAIR=VALUE such as e2h2=0.7, got {s:?}"));
    let (pair, value) = s.split_once('=').ok_or_else(bad)?;
    let pair: String = pair.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
    if pair.len() != 4 {
        return Err(bad());
    }
    let a: ModelSpace = pair[..2].parse().map_err(|_| bad())?;
    let b: ModelSpace = pair[2..].parse().map_err(|_| bad())?;
    let value: f64 = value.trim().parse().map_err(|_| bad())?;
    Ok((a, b, value))
}

/// Edge weights as printed in the published table.
const PUBLISHED_WEIGHTS: [f64; 3] = [4.35, 1.30, 1.20];

#[derive(serde::Serialize)]
struct TableRow {
    a: ModelSpace,
    b: ModelSpace,
    distance: f64,
    provenance: Provenance,
    weight: f64,
    published_weight: f64,
    matches_published: bool,
}

fn cmd_table(cfg: &RunConfig, args: TableArgs) -> Result<ExitCode> {
    let mut table = if args.default {
        DistanceTable::default()
    } else {
        let path = cfg.cache.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_CACHE));
        DistanceCache::load(&path)?.table
    };
    for o in &args.overrides {
        let (a, b, v) = parse_override(o)?;
        table = table.with_user_value(a, b, v)?;
    }
    let rows: Vec<TableRow> = table
        .entries()
        .iter()
        .zip(PUBLISHED_WEIGHTS)
        .map(|(e, published)| {
            let weight = 1.0 / e.value;
            TableRow {
                a: e.a,
                b: e.b,
                distance: e.value,
                provenance: e.provenance,
                weight,
                published_weight: published,
                matches_published: format!("{weight:.2}") == format!("{published:.2}"),
            }
        })
        .collect();
    match cfg.format {
        OutputFormat::Json => print_json(&rows)?,
        OutputFormat::Csv => {
            println!("a,b,distance,provenance,weight,published_weight");
            for r in &rows {
                let prov = serde_json::to_value(r.provenance)?;
                println!("{},{},{},{},{},{}", r.a, r.b, r.distance, prov.as_str().unwrap_or(""), r.weight, r.published_weight);
            }
        }
    }
    if cfg.format == OutputFormat::Json {
        let mut err = io::stderr().lock();
        writeln!(err, "{:<8} {:>8} {:>8} {:>8} {:>10}", "pair", "d_GH", "weight", "4 s.f.", "published")?;
        for r in &rows {
            let flag = if r.matches_published { "" } else { "  (differs from published)" };
            writeln!(
                err,
                "{:<8} {:>8.2} {:>8.2} {:>8} {:>10.2}{flag}",
                format!("{}-{}", r.a, r.b),
                r.distance,
                r.weight,
                four_sig_figs(r.weight),
                r.published_weight
            )?;
        }
        writeln!(err, "{:<8} {:>8} {:>8.2} {:>8} {:>10.2}", "extend", "-", 1.0, four_sig_figs(1.0), 1.0)?;
    }
    Ok(ExitCode::SUCCESS)
}

/// Reads a table from either a cache file or a bare table JSON.
fn read_table(path: &Path) -> Result<DistanceTable> {
    let text = fs::read_to_string(path)?;
    if let Ok(cache) = serde_json::from_str::<DistanceCache>(&text) {
        return Ok(cache.table);
    }
    Ok(serde_json::from_str::<DistanceTable>(&text)?)
}

fn cmd_graph_build(args: GraphBuildArgs) -> Result<ExitCode> {
    let table = match &args.table {
        Some(p) => read_table(p)?,
        None => DistanceTable::default(),
    };
    let graph = build_graph(args.max_factors, &table)?;
    fs::write(&args.out, graph.export(GraphFormat::from_path(&args.out))?)?;
    println!(
        "{} nodes, {} edges, written to {}",
        graph.nodes.len(),
        graph.edges.len(),
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_graph_search(args: GraphSearchArgs) -> Result<ExitCode> {
    let graph = SearchGraph::from_json(&fs::read_to_string(&args.graph)?)?;
    let evaluator = Evaluator::from_spec(&args.evaluator)?;
    let result = search(&graph, &evaluator, args.algo, args.start.as_ref(), args.budget)?;
    print_json(&result)?;
    Ok(ExitCode::SUCCESS)
}
