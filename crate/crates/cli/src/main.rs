//! `prefrank`: generate graphs and preferences, rank, sweep and analyze.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use prefrank::analysis::{
    bound_report, sample_complexity, theta_bound, write_reports_csv, write_reports_json_lines, BoundReport,
    ThetaFamily, DEFAULT_MC_SAMPLES,
};
use prefrank::baselines::DEFAULT_DAMPING;
use prefrank::experiment::{
    evaluate, generate_preference, ingest_subsets, run_algorithm, run_to_csv, trial_seed, Algorithm,
    ExperimentConfig, GraphSpec,
};
use prefrank::graph::io::{read_features, write_edge_list};
use prefrank::graph::{Graph, PairIndex};
use prefrank::ranking::{sample_pairs, Embedding, PreferenceSample, PreferenceVector, Task};
use prefrank::rng::derive_seed;
use prefrank::svm::{SvmOptions, DEFAULT_TOL};

#[derive(Parser, Debug)]
#[command(name = "prefrank", version, about = "Rank graph nodes from sampled pairwise preferences")]
struct Cli {
    /// Master seed (default 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (a directory for `ingest` and `analyze`); stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// TOML file with defaults; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generated graph as an edge list.
    GenGraph(GraphArgs),
    /// Write ground-truth preferences for a graph.
    GenPref(GenPrefArgs),
    /// Cut a labelled feature file into random subsets with RBF graphs.
    Ingest(IngestArgs),
    /// Run Pref-Rank once.
    Rank(RankArgs),
    /// Run a comparison method once.
    Baseline(BaselineArgs),
    /// Sweep over sampling fractions and repeats, emitting CSV.
    Experiment(ExperimentArgs),
    /// Rademacher bounds and sample-complexity tables.
    Analyze(AnalyzeArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Complete,
    UnionCliques,
    Regular,
    ErdosRenyi,
    TwoCluster,
}

#[derive(Args, Debug, Clone, Default)]
struct GraphArgs {
    /// Generator family.
    #[arg(long, value_enum)]
    family: Option<Family>,
    /// Edge-list file, instead of a generator.
    #[arg(long, conflicts_with = "family")]
    graph: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    /// Number of cliques.
    #[arg(long)]
    k: Option<usize>,
    /// Degree of a regular graph.
    #[arg(long)]
    r: Option<usize>,
    /// Within-cluster edge probability.
    #[arg(long)]
    p: Option<f64>,
    /// Edge probability (between clusters for two-cluster).
    #[arg(long)]
    q: Option<f64>,
}

impl GraphArgs {
    fn is_set(&self) -> bool {
        self.family.is_some() || self.graph.is_some()
    }

    fn spec(&self) -> Result<GraphSpec> {
        if let Some(path) = &self.graph {
            return Ok(GraphSpec::File { path: path.clone() });
        }
        let Some(family) = self.family else {
            bail!("give --family or --graph");
        };
        let need = |v: Option<usize>, name: &str| v.with_context(|| format!("--{name} is required for this family"));
        let needf = |v: Option<f64>, name: &str| v.with_context(|| format!("--{name} is required for this family"));
        let n = need(self.n, "n")?;
        Ok(match family {
            Family::Complete => GraphSpec::Complete { n },
            Family::UnionCliques => GraphSpec::UnionCliques { n, k: need(self.k, "k")? },
            Family::Regular => GraphSpec::Regular { n, r: need(self.r, "r")? },
            Family::ErdosRenyi => GraphSpec::ErdosRenyi { n, q: needf(self.q, "q")? },
            Family::TwoCluster => GraphSpec::TwoCluster {
                n,
                p: needf(self.p, "p")?,
                q: needf(self.q, "q")?,
            },
        })
    }

    /// Same seed stream as the experiment harness.
    fn build(&self, seed: u64) -> Result<(GraphSpec, Graph)> {
        let spec = self.spec()?;
        let g = spec.build(derive_seed(seed, &[0])).with_context(|| match &spec {
            GraphSpec::File { path } => format!("reading {}", path.display()),
            _ => "generating graph".to_string(),
        })?;
        Ok((spec, g))
    }
}

#[derive(Args, Debug)]
struct GenPrefArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// BR, FR or OR(d).
    #[arg(long, default_value = "FR")]
    task: Task,
    /// P(+1) for first-cluster nodes in the two-cluster BR protocol.
    #[arg(long, default_value_t = 0.8)]
    p_first: f64,
    /// P(+1) for second-cluster nodes in the two-cluster BR protocol.
    #[arg(long, default_value_t = 0.2)]
    p_second: f64,
}

#[derive(Args, Debug)]
struct IngestArgs {
    /// Sparse `label index:value` feature file.
    #[arg(long)]
    features: PathBuf,
    #[arg(long, default_value_t = 40)]
    subset_size: usize,
    #[arg(long, default_value_t = 10)]
    subsets: usize,
    #[arg(long, default_value = "FR")]
    task: Task,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    graph: GraphArgs,
    /// Preference file (task line, then one value per node).
    #[arg(long)]
    pref: PathBuf,
    /// Labelled pairs (`k,y` CSV); drawn from the preferences when absent.
    #[arg(long)]
    sample: Option<PathBuf>,
    /// Fraction of pairs to draw when no sample file is given.
    #[arg(long, default_value_t = 0.3)]
    fraction: f64,
    /// Also write the pair scores (`i,j,score`, 1-based nodes) here.
    #[arg(long)]
    scores: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RankArgs {
    #[command(flatten)]
    input: SampleArgs,
    #[arg(long, default_value = "LS-Kron")]
    embedding: Embedding,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    /// Rank Centrality.
    Rc,
    /// Laplacian-regularized pairwise SVM.
    Gr,
}

#[derive(Args, Debug)]
struct BaselineArgs {
    #[command(flatten)]
    input: SampleArgs,
    #[arg(long, value_enum, default_value = "rc")]
    method: Method,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    damping: Option<f64>,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    task: Option<Task>,
    /// Preference file instead of generated ground truth.
    #[arg(long)]
    pref: Option<PathBuf>,
    /// Comma-separated: PR-Kron, PR-PD, PR-<embedding>, GR, RC.
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<Algorithm>>,
    /// Comma-separated fraction grid.
    #[arg(long, value_delimiter = ',')]
    fractions: Option<Vec<f64>>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    damping: Option<f64>,
    #[arg(long)]
    p_first: Option<f64>,
    #[arg(long)]
    p_second: Option<f64>,
    /// Leave the wall-time column empty so reruns are byte-identical.
    #[arg(long)]
    no_time: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    /// Graph for the bound reports; omit to print only the complexity table.
    #[command(flatten)]
    graph: GraphArgs,
    /// Comma-separated embeddings for the bound reports.
    #[arg(long, value_delimiter = ',')]
    embeddings: Option<Vec<Embedding>>,
    /// Sparsity of the Rademacher variables.
    #[arg(long = "rad-p", default_value_t = 0.25)]
    rad_p: f64,
    #[arg(long)]
    c: Option<f64>,
    /// Monte Carlo draws per report (0 disables the simulation).
    #[arg(long, default_value_t = DEFAULT_MC_SAMPLES)]
    mc: usize,
    /// Comma-separated families: complete, cliques:k, power-law, k-colorable:k, er:q, theta:v.
    #[arg(long, value_delimiter = ',')]
    families: Vec<ThetaFamily>,
    /// Node counts for the complexity table.
    #[arg(long = "sizes", value_delimiter = ',', default_value = "100")]
    sizes: Vec<usize>,
    /// Comma-separated ε values.
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.15,0.2")]
    eps: Vec<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

/// Contents of `--config`. `seed` and `out` apply to every subcommand; the
/// remaining keys are experiment settings.
struct FileConfig {
    seed: Option<u64>,
    out: Option<PathBuf>,
    experiment: toml::Table,
}

fn load_config(path: Option<&Path>) -> Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig {
            seed: None,
            out: None,
            experiment: toml::Table::new(),
        });
    };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut table: toml::Table = text.parse().with_context(|| format!("parsing {}", path.display()))?;
    let seed = match table.remove("seed") {
        Some(toml::Value::Integer(s)) if s >= 0 => Some(s as u64),
        Some(v) => bail!("seed must be a non-negative integer, got {v}"),
        None => None,
    };
    let out = match table.remove("out") {
        Some(toml::Value::String(s)) => Some(PathBuf::from(s)),
        Some(v) => bail!("out must be a string, got {v}"),
        None => None,
    };
    Ok(FileConfig {
        seed,
        out,
        experiment: table,
    })
}

/// Resolved global settings.
struct Ctx {
    seed: u64,
    out: Option<PathBuf>,
}

impl Ctx {
    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => {
                io::stdout().write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }

    fn out_dir(&self) -> Result<PathBuf> {
        let dir = self.out.clone().unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(dir)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let file = load_config(cli.config.as_deref())?;
    let ctx = Ctx {
        seed: cli.seed.or(file.seed).unwrap_or(0),
        out: cli.out.or(file.out),
    };
    match cli.command {
        Command::GenGraph(a) => {
            let (_, g) = a.build(ctx.seed)?;
            ctx.emit(&write_edge_list(&g))
        }
        Command::GenPref(a) => {
            let (spec, g) = a.graph.build(ctx.seed)?;
            let pref = generate_preference(&spec, &g, a.task, (a.p_first, a.p_second), derive_seed(ctx.seed, &[1]))?;
            ctx.emit(&pref.to_text())
        }
        Command::Ingest(a) => ingest(&ctx, &a),
        Command::Rank(a) => {
            let options = SvmOptions {
                c: a.c.unwrap_or(1.0),
                tol: a.tol.unwrap_or(DEFAULT_TOL),
                ..Default::default()
            };
            single_run(&ctx, &a.input, Algorithm::PrefRank(a.embedding), &options, DEFAULT_DAMPING)
        }
        Command::Baseline(a) => {
            let algorithm = match a.method {
                Method::Rc => Algorithm::RankCentrality,
                Method::Gr => Algorithm::GraphRank,
            };
            let options = SvmOptions::with_c(a.c.unwrap_or(1.0));
            single_run(&ctx, &a.input, algorithm, &options, a.damping.unwrap_or(DEFAULT_DAMPING))
        }
        Command::Experiment(a) => experiment(&ctx, a, file.experiment),
        Command::Analyze(a) => analyze(&ctx, &a),
    }
}

fn ingest(ctx: &Ctx, a: &IngestArgs) -> Result<()> {
    let data = read_features(&a.features).with_context(|| format!("reading {}", a.features.display()))?;
    let subsets = ingest_subsets(&data, a.task, a.subset_size, a.subsets, ctx.seed)?;
    let dir = ctx.out_dir()?;
    for (s, sub) in subsets.iter().enumerate() {
        let stem = dir.join(format!("subset_{s:03}"));
        fs::write(stem.with_extension("edges"), write_edge_list(&sub.instance.graph))?;
        fs::write(stem.with_extension("pref"), sub.instance.preference.to_text())?;
        let items: String = sub.items.iter().map(|i| format!("{}\n", i + 1)).collect();
        fs::write(stem.with_extension("items"), items)?;
    }
    eprintln!("wrote {} subsets to {}", subsets.len(), dir.display());
    Ok(())
}

fn read_preference(path: &Path) -> Result<PreferenceVector> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(PreferenceVector::parse_text(&text)?)
}

fn single_run(ctx: &Ctx, a: &SampleArgs, algorithm: Algorithm, options: &SvmOptions, damping: f64) -> Result<()> {
    let (_, g) = a.graph.build(ctx.seed)?;
    let pref = read_preference(&a.pref)?;
    if pref.n() != g.n() {
        bail!("preference file has {} nodes, graph has {}", pref.n(), g.n());
    }
    let sample = match &a.sample {
        Some(path) => PreferenceSample::from_csv(g.n(), &fs::read_to_string(path)?)?,
        None => sample_pairs(g.n(), a.fraction, &pref, trial_seed(ctx.seed, 0, 0))?,
    };
    let out = run_algorithm(algorithm, &g, &sample, options, damping)?;
    let m = evaluate(&out, &pref, &sample)?;
    if let Some(path) = &a.scores {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["i", "j", "score"])?;
        for ((i, j), s) in PairIndex::new(g.n()).iter().zip(&out.scores) {
            w.write_record([(i + 1).to_string(), (j + 1).to_string(), s.to_string()])?;
        }
        w.flush()?;
    }
    let report = format!(
        "algorithm={algorithm}\nn={}\nm={}\ner_d={}\nd_k={}\nd_s={}\ntrain_error={}\nranking={}\n",
        g.n(),
        sample.len(),
        m.er_d,
        m.d_k,
        m.d_s,
        m.train_error,
        out.ranking.to_line()
    );
    ctx.emit(&report)
}

fn experiment(ctx: &Ctx, a: ExperimentArgs, mut table: toml::Table) -> Result<()> {
    use toml::Value;
    if a.graph.is_set() {
        let spec = a.graph.spec()?;
        table.insert("graph".into(), Value::try_from(&spec)?);
    }
    if let Some(t) = a.task {
        table.insert("task".into(), Value::String(t.to_string()));
    }
    if let Some(p) = &a.pref {
        table.insert("preference".into(), Value::String(p.display().to_string()));
    }
    if let Some(algs) = &a.algorithms {
        table.insert("algorithms".into(), Value::try_from(algs)?);
    }
    if let Some(f) = &a.fractions {
        table.insert("fractions".into(), Value::try_from(f)?);
    }
    if let Some(r) = a.repeats {
        table.insert("repeats".into(), Value::Integer(i64::try_from(r)?));
    }
    for (key, v) in [("c", a.c), ("tol", a.tol), ("damping", a.damping)] {
        if let Some(v) = v {
            table.insert(key.into(), Value::Float(v));
        }
    }
    if a.p_first.is_some() || a.p_second.is_some() {
        let old: (f64, f64) = match table.get("bipartite_probs") {
            Some(v) => v.clone().try_into()?,
            None => (0.8, 0.2),
        };
        let probs = (a.p_first.unwrap_or(old.0), a.p_second.unwrap_or(old.1));
        table.insert("bipartite_probs".into(), Value::try_from(probs)?);
    }
    if a.no_time {
        table.insert("record_time".into(), Value::Boolean(false));
    }
    table.remove("seed");
    let mut config: ExperimentConfig = Value::Table(table).try_into().context("experiment settings")?;
    config.seed = ctx.seed;
    config.validate()?;
    let instance = config.build_instance()?;
    match &ctx.out {
        Some(path) => {
            let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            run_to_csv(&config, &instance, io::BufWriter::new(file))?;
        }
        None => {
            run_to_csv(&config, &instance, io::stdout().lock())?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ComplexityRow {
    family: String,
    n: usize,
    theta: f64,
    epsilon: f64,
    f_star: f64,
    m_star: usize,
    closed_form: f64,
    saturated: bool,
    admissible: bool,
}

fn analyze(ctx: &Ctx, a: &AnalyzeArgs) -> Result<()> {
    let c = a.c.unwrap_or(1.0);
    let mut reports: Vec<BoundReport> = Vec::new();
    if a.graph.is_set() {
        let (_, g) = a.graph.build(ctx.seed)?;
        let embeddings = a.embeddings.clone().unwrap_or_else(|| Embedding::ALL.to_vec());
        for (i, e) in embeddings.iter().enumerate() {
            let k = e.node_kernel(&g)?;
            let mc = (a.mc > 0).then(|| (a.mc, derive_seed(ctx.seed, &[i as u64])));
            reports.push(bound_report(e.name(), &k, e.mode(), c, a.rad_p, mc)?);
        }
    }
    let mut table = Vec::new();
    for family in &a.families {
        for &n in &a.sizes {
            let theta = theta_bound(*family, n)?;
            for &eps in &a.eps {
                let s = sample_complexity(theta, n, eps)?;
                table.push(ComplexityRow {
                    family: family.to_string(),
                    n,
                    theta: s.theta,
                    epsilon: s.epsilon,
                    f_star: s.f_star,
                    m_star: s.m_star,
                    closed_form: s.closed_form,
                    saturated: s.saturated,
                    admissible: s.admissible,
                });
            }
        }
    }
    if reports.is_empty() && table.is_empty() {
        bail!("nothing to analyze: give a graph and/or --families");
    }

    let mut bounds = Vec::new();
    let mut complexity = Vec::new();
    match a.format {
        Format::Csv => {
            if !reports.is_empty() {
                write_reports_csv(&reports, &mut bounds)?;
            }
            let mut w = csv::Writer::from_writer(&mut complexity);
            for r in &table {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            write_reports_json_lines(&reports, &mut bounds)?;
            for r in &table {
                writeln!(complexity, "{}", serde_json::to_string(r)?)?;
            }
        }
    }
    if ctx.out.is_some() {
        let dir = ctx.out_dir()?;
        let ext = if a.format == Format::Csv { "csv" } else { "jsonl" };
        if !reports.is_empty() {
            fs::write(dir.join(format!("bounds.{ext}")), &bounds)?;
        }
        if !table.is_empty() {
            fs::write(dir.join(format!("complexity.{ext}")), &complexity)?;
        }
        return Ok(());
    }
    let mut stdout = io::stdout().lock();
    stdout.write_all(&bounds)?;
    if !bounds.is_empty() && !complexity.is_empty() {
        writeln!(stdout)?;
    }
    stdout.write_all(&complexity)?;
    Ok(())
}
