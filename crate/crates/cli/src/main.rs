//! `mstab`: multi-scale community detection from the command line.

mod error;
mod files;
mod manifest;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use markov_stability::{
    arenas_h, detect_plateaus, evaluate_partition, gso, gso_single_time, line_graph, lso, msgso,
    project_edge_partition, prune_leaves, ravasz_barabasi, reattach_leaves, refine_vertex_mover,
    rgso, sweep, write_edge_list, GridSpec, HParams, MarkovModel, MarkovTimeGrid, OptimizerConfig,
    Optimiser, Plateau, RBParams, SweepConfig, SweepRecord,
};
use serde_json::{json, Map, Value};

use error::CliError;
use files::InputFormat;
use manifest::{GridManifest, RefineManifest, RunManifest, Thresholds};

#[derive(Parser)]
#[command(name = "mstab", version, about = "Multi-scale community detection by Markov stability")]
struct Cli {
    /// Worker threads for sweeps (0 = one per core).
    #[arg(long, global = true, env = "MSTAB_JOBS")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimise stability once and write the partition.
    Detect(DetectArgs),
    /// Optimise at every time of a grid and report stable plateaus.
    Sweep(SweepArgs),
    /// Write the line graph of the input as an edge list.
    Linegraph(LinegraphArgs),
    /// Sweep the line graph and report overlapping node communities.
    Overlap(OverlapArgs),
    /// Generate a benchmark graph.
    Generate(GenerateArgs),
    /// Normalised mutual information between two partition files.
    Nmi(NmiArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OptimiserArg {
    Gso,
    GsoSingle,
    Rgso,
    Msgso,
    Lso,
}

impl OptimiserArg {
    fn to_lib(self) -> Optimiser {
        match self {
            OptimiserArg::Gso => Optimiser::Gso,
            OptimiserArg::GsoSingle => Optimiser::GsoSingle,
            OptimiserArg::Rgso => Optimiser::Rgso,
            OptimiserArg::Msgso => Optimiser::Msgso,
            OptimiserArg::Lso => Optimiser::Lso,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Discrete,
    Continuous,
}

impl ModelArg {
    fn to_lib(self) -> MarkovModel {
        match self {
            ModelArg::Discrete => MarkovModel::Discrete,
            ModelArg::Continuous => MarkovModel::Continuous,
        }
    }
}

#[derive(Args, Clone, Debug)]
struct InputArgs {
    /// Graph file (edge list or GML).
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    format: InputFormat,
}

/// Time grid: linear steps on `[t_min, linear_cutoff]`, then log-spaced
/// points up to `t_max`.
#[derive(Args, Clone, Debug)]
struct GridArgs {
    #[arg(long)]
    t_min: Option<f64>,
    #[arg(long)]
    t_max: Option<f64>,
    #[arg(long)]
    linear_step: Option<f64>,
    #[arg(long)]
    linear_cutoff: Option<f64>,
    #[arg(long)]
    log_points: Option<usize>,
}

impl GridArgs {
    fn spec(&self) -> GridSpec {
        let d = GridSpec::default();
        GridSpec {
            t_min: self.t_min.unwrap_or(d.t_min),
            t_max: self.t_max.unwrap_or(d.t_max),
            linear_step: self.linear_step.unwrap_or(d.linear_step),
            linear_cutoff: self.linear_cutoff.unwrap_or(d.linear_cutoff),
            log_points: self.log_points.unwrap_or(d.log_points),
        }
    }

    fn is_set(&self) -> bool {
        self.t_min.is_some()
            || self.t_max.is_some()
            || self.linear_step.is_some()
            || self.linear_cutoff.is_some()
            || self.log_points.is_some()
    }

    fn build(&self) -> Result<(MarkovTimeGrid, GridManifest), CliError> {
        let spec = self.spec();
        let grid = spec.build().map_err(|e| CliError::Usage(format!("invalid grid: {e}")))?;
        let points = grid.len();
        Ok((grid, GridManifest::Spec { spec, points }))
    }
}

#[derive(Args, Clone, Debug)]
struct OptArgs {
    /// Defaults to gso for detect and gso-single for sweeps.
    #[arg(long, value_enum)]
    optimiser: Option<OptimiserArg>,
    #[arg(long, value_enum, default_value_t = ModelArg::Discrete)]
    model: ModelArg,
    /// Seed for rgso and lso.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Pairs merged per pass by msgso.
    #[arg(short = 'k', long = "k", default_value_t = 1)]
    k: usize,
    /// Polish the result with the vertex mover.
    #[arg(long)]
    refine: bool,
    #[arg(long, default_value_t = 10)]
    refine_passes: usize,
}

impl OptArgs {
    fn resolve(&mut self, default: OptimiserArg) -> Result<OptimiserArg, CliError> {
        let o = *self.optimiser.get_or_insert(default);
        if o == OptimiserArg::Msgso && self.k == 0 {
            return Err(CliError::Usage("msgso needs --k >= 1".into()));
        }
        Ok(o)
    }

    fn optimiser(&self) -> OptimiserArg {
        self.optimiser.unwrap_or(OptimiserArg::Gso)
    }

    fn sweep_config(&self) -> SweepConfig {
        SweepConfig {
            model: self.model.to_lib(),
            seed: self.seed,
            msgso_k: self.k,
            refine: self.refine,
            refine_passes: self.refine_passes,
            ..SweepConfig::new(self.optimiser().to_lib())
        }
    }

    fn record(&self, m: &mut RunManifest) {
        m.optimiser = Some(self.optimiser().to_lib().name().to_string());
        m.model = Some(self.model.to_lib().to_string());
        m.seed = Some(self.seed);
        if self.optimiser() == OptimiserArg::Msgso {
            m.msgso_k = Some(self.k);
        }
        m.refine = Some(RefineManifest {
            enabled: self.refine,
            passes: self.refine_passes,
        });
    }
}

#[derive(Args)]
struct DetectArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Single Markov time; overrides the grid flags.
    #[arg(short = 't', long = "time")]
    time: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    opt: OptArgs,
    /// Remove degree-1 nodes before optimising and reattach them afterwards.
    #[arg(long)]
    prune_leaves: bool,
    /// Partition file (stdout if omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Summary JSON (defaults to `<output>.json`, or stderr).
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    opt: OptArgs,
    #[command(flatten)]
    plateau: PlateauArgs,
    /// Sweep CSV (stdout if omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Plateau JSON (defaults to `<output>.plateaus.json`, or stderr).
    #[arg(long)]
    plateaus: Option<PathBuf>,
}

#[derive(Args, Clone, Copy)]
struct PlateauArgs {
    /// Minimum NMI between successive points inside a plateau.
    #[arg(long, default_value_t = 0.99)]
    threshold: f64,
    #[arg(long, default_value_t = 3)]
    min_points: usize,
}

impl PlateauArgs {
    fn check(&self) -> Result<(), CliError> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(CliError::Usage("--threshold must lie in [0, 1]".into()));
        }
        Ok(())
    }

    fn record(&self, m: &mut RunManifest) {
        m.thresholds = Some(Thresholds {
            nmi: self.threshold,
            min_points: self.min_points,
        });
    }
}

#[derive(Args)]
struct LinegraphArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Edge list of L(G) (stdout if omitted); the manifest goes alongside.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct OverlapArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    opt: OptArgs,
    #[command(flatten)]
    plateau: PlateauArgs,
    /// Overlap JSON (stdout if omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also write the line-graph sweep CSV here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(subcommand)]
    family: Family,
    /// Edge list (stdout if omitted); the manifest goes to `<output>.manifest.json`.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Family {
    /// Deterministic hierarchical graph with 5^steps nodes.
    Rb {
        #[arg(long, default_value_t = 3)]
        steps: u32,
    },
    /// Two-level hierarchical random graph with fixed degree quotas.
    H {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 16)]
        group_size: usize,
        #[arg(long, default_value_t = 4)]
        groups_per_block: usize,
        #[arg(long, default_value_t = 4)]
        blocks: usize,
        #[arg(long, default_value_t = 13)]
        z_in1: usize,
        #[arg(long, default_value_t = 4)]
        z_in2: usize,
        #[arg(long, default_value_t = 1)]
        z_out: usize,
    },
}

#[derive(Args)]
struct NmiArgs {
    a: PathBuf,
    b: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mstab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Detect(a) => cmd_detect(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Linegraph(a) => cmd_linegraph(a),
        Command::Overlap(a) => cmd_overlap(a),
        Command::Generate(a) => cmd_generate(a),
        Command::Nmi(a) => cmd_nmi(a),
    }
}

fn cmd_detect(mut a: DetectArgs) -> Result<(), CliError> {
    a.opt.resolve(OptimiserArg::Gso)?;
    let input = files::read_input(&a.input.input)?;
    let g = files::load_graph(&input, a.input.format)?;

    let (grid, grid_manifest) = match a.time {
        Some(t) => {
            if a.grid.is_set() {
                return Err(CliError::Usage("-t cannot be combined with grid flags".into()));
            }
            let grid = MarkovTimeGrid::single(t).map_err(|e| CliError::Usage(format!("invalid time: {e}")))?;
            (grid, GridManifest::Single { t })
        }
        None => {
            if a.opt.optimiser().to_lib().is_single_time() {
                return Err(CliError::Usage(format!(
                    "{} optimises a single time; pass -t",
                    a.opt.optimiser().to_lib()
                )));
            }
            a.grid.build()?
        }
    };

    let mut m = RunManifest::new("detect").with_input(&input);
    m.grid = Some(grid_manifest);
    m.prune_leaves = Some(a.prune_leaves);
    a.opt.record(&mut m);

    let cfg = OptimizerConfig::new(grid.clone())
        .with_model(a.opt.model.to_lib())
        .with_seed(a.opt.seed)
        .with_msgso_k(a.opt.k);
    let (work, leaves) = if a.prune_leaves {
        let (pruned, record) = prune_leaves(&g);
        (pruned, Some(record))
    } else {
        (g.clone(), None)
    };
    let t_last = grid.last();
    let result = match a.opt.optimiser() {
        OptimiserArg::Gso => gso(&work, &cfg)?,
        OptimiserArg::GsoSingle => gso_single_time(&work, t_last, cfg.model)?,
        OptimiserArg::Rgso => rgso(&work, &cfg)?,
        OptimiserArg::Msgso => msgso(&work, &cfg)?,
        OptimiserArg::Lso => lso(&work, t_last, cfg.model, cfg.seed)?,
    };
    let mut p = match &leaves {
        Some(record) => reattach_leaves(&result.best_partition, record)?,
        None => result.best_partition.clone(),
    };
    if a.opt.refine {
        let mut rcfg = cfg.clone();
        rcfg.refine_passes = a.opt.refine_passes;
        p = refine_vertex_mover(&g, &p, &rcfg)?;
    }
    let (_, score) = evaluate_partition(&g, &p, &grid, cfg.model, grid.first(), t_last)?;

    files::write_output(a.output.as_deref(), &files::format_partition(&g, &p))?;
    let summary = json!({
        "stability": score.value,
        "communities": p.community_count(),
        "nodes": g.node_count(),
        "optimiser_stability": result.best_score.value,
        "optimiser_communities": result.communities_at_best,
        "passes": result.passes,
        "manifest": m.to_value(),
    });
    let summary_path = a
        .summary
        .or_else(|| a.output.as_deref().map(|o| files::sibling(o, ".json")));
    files::write_side_json(summary_path.as_deref(), &summary)
}

fn sweep_csv(records: &[SweepRecord]) -> String {
    let mut s = String::from("t,communities,stability,nmi_prev\n");
    for r in records {
        let nmi = r.nmi_prev.map(|x| x.to_string()).unwrap_or_default();
        let _ = writeln!(s, "{},{},{},{}", r.time, r.community_count, r.stability, nmi);
    }
    s
}

fn log_floor(records: &[SweepRecord]) -> f64 {
    records.iter().map(|r| r.time).find(|&t| t > 0.0).unwrap_or(1.0)
}

fn plateau_entry(rank: usize, p: &Plateau, floor: f64) -> Map<String, Value> {
    let mut e = Map::new();
    e.insert("rank".into(), json!(rank));
    e.insert("time_start".into(), json!(p.time_start));
    e.insert("time_end".into(), json!(p.time_end));
    e.insert("communities".into(), json!(p.community_count));
    e.insert("points".into(), json!(p.points));
    e.insert("mean_nmi".into(), json!(p.mean_nmi));
    e.insert("log_span".into(), json!(p.log_span(floor)));
    e
}

fn labelled(labels: &[String], ids: &[usize]) -> Value {
    Value::Array(
        labels
            .iter()
            .zip(ids)
            .map(|(l, c)| json!({ "label": l, "community": c }))
            .collect(),
    )
}

fn cmd_sweep(mut a: SweepArgs) -> Result<(), CliError> {
    a.opt.resolve(OptimiserArg::GsoSingle)?;
    a.plateau.check()?;
    let input = files::read_input(&a.input.input)?;
    let g = files::load_graph(&input, a.input.format)?;
    let (grid, grid_manifest) = a.grid.build()?;

    let mut m = RunManifest::new("sweep").with_input(&input);
    m.grid = Some(grid_manifest);
    a.opt.record(&mut m);
    a.plateau.record(&mut m);

    let records = sweep(&g, &grid, &a.opt.sweep_config())?;
    let plateaus = detect_plateaus(&records, a.plateau.threshold, a.plateau.min_points);
    let floor = log_floor(&records);
    let ranked: Vec<Value> = plateaus
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut e = plateau_entry(i + 1, p, floor);
            e.insert(
                "partition".into(),
                labelled(g.labels(), p.representative_partition.assignment()),
            );
            Value::Object(e)
        })
        .collect();

    files::write_output(a.output.as_deref(), &sweep_csv(&records))?;
    let doc = json!({ "plateaus": ranked, "manifest": m.to_value() });
    let path = a
        .plateaus
        .or_else(|| a.output.as_deref().map(|o| files::sibling(o, ".plateaus.json")));
    files::write_side_json(path.as_deref(), &doc)
}

fn cmd_linegraph(a: LinegraphArgs) -> Result<(), CliError> {
    let input = files::read_input(&a.input.input)?;
    let g = files::load_graph(&input, a.input.format)?;
    let (lg, _) = line_graph(&g)?;
    files::write_output(a.output.as_deref(), &write_edge_list(&lg)?)?;
    let m = RunManifest::new("linegraph").with_input(&input);
    let doc = json!({
        "nodes": lg.node_count(),
        "edges": lg.edge_count(),
        "manifest": m.to_value(),
    });
    let path = a.output.as_deref().map(|o| files::sibling(o, ".manifest.json"));
    files::write_side_json(path.as_deref(), &doc)
}

fn cmd_overlap(mut a: OverlapArgs) -> Result<(), CliError> {
    a.opt.resolve(OptimiserArg::GsoSingle)?;
    a.plateau.check()?;
    let input = files::read_input(&a.input.input)?;
    let g = files::load_graph(&input, a.input.format)?;
    let (grid, grid_manifest) = a.grid.build()?;

    let mut m = RunManifest::new("overlap").with_input(&input);
    m.grid = Some(grid_manifest);
    a.opt.record(&mut m);
    a.plateau.record(&mut m);

    let (lg, mapping) = line_graph(&g)?;
    let records = sweep(&lg, &grid, &a.opt.sweep_config())?;
    if let Some(csv) = &a.csv {
        files::write_output(Some(csv), &sweep_csv(&records))?;
    }
    let plateaus = detect_plateaus(&records, a.plateau.threshold, a.plateau.min_points);
    let floor = log_floor(&records);
    let mut ranked = Vec::with_capacity(plateaus.len());
    for (i, p) in plateaus.iter().enumerate() {
        let sets = project_edge_partition(&mapping, &p.representative_partition)?;
        let mut e = plateau_entry(i + 1, p, floor);
        e.insert(
            "nodes".into(),
            Value::Array(
                g.labels()
                    .iter()
                    .zip(&sets)
                    .map(|(l, s)| json!({ "label": l, "communities": s }))
                    .collect(),
            ),
        );
        ranked.push(Value::Object(e));
    }
    let doc = json!({
        "line_graph": { "nodes": lg.node_count(), "edges": lg.edge_count() },
        "plateaus": ranked,
        "manifest": m.to_value(),
    });
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Internal(e.to_string()))?;
    text.push('\n');
    files::write_output(a.output.as_deref(), &text)
}

fn cmd_generate(a: GenerateArgs) -> Result<(), CliError> {
    let usage = |e: markov_stability::Error| match e {
        markov_stability::Error::Domain(msg) => CliError::Usage(format!("invalid generator parameters: {msg}")),
        other => other.into(),
    };
    let mut m = RunManifest::new("generate");
    let g = match a.family {
        Family::Rb { steps } => {
            let params = RBParams { steps };
            m.generator = Some(json!({ "family": "rb", "params": params }));
            ravasz_barabasi::<f64>(params).map_err(usage)?
        }
        Family::H {
            seed,
            group_size,
            groups_per_block,
            blocks,
            z_in1,
            z_in2,
            z_out,
        } => {
            let params = HParams {
                group_size,
                groups_per_block,
                blocks,
                z_in1,
                z_in2,
                z_out,
                seed,
            };
            m.seed = Some(seed);
            m.generator = Some(json!({ "family": "h", "params": params }));
            arenas_h::<f64>(params).map_err(usage)?
        }
    };
    files::write_output(a.output.as_deref(), &write_edge_list(&g)?)?;
    let doc = json!({
        "nodes": g.node_count(),
        "edges": g.edge_count(),
        "manifest": m.to_value(),
    });
    let path = a.output.as_deref().map(|o| files::sibling(o, ".manifest.json"));
    files::write_side_json(path.as_deref(), &doc)
}

fn cmd_nmi(a: NmiArgs) -> Result<(), CliError> {
    let pa = files::read_partition(&a.a)?;
    let pb = files::read_partition(&a.b)?;
    let (x, y) = files::align(&pa, &pb)?;
    let value = markov_stability::nmi(&x, &y)?;
    files::write_output(None, &format!("{value:.6}\n"))
}
