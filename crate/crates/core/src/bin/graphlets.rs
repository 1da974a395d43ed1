use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use graphlets::distances::Labeling;
use graphlets::generators;
use graphlets::harness::{self, AnalyzeOptions, CertifyRequest, Metadata, WeightShape};
use graphlets::io::{load_graph, to_edge_list, to_json, GraphFormat};
use graphlets::subsets::{Mode, DEFAULT_SAMPLES};
use graphlets::{Error, Graph, GraphOptions, Result};

#[derive(Parser)]
#[command(
    name = "graphlets",
    version,
    about = "Spectral analysis of graphs and graph sequences"
)]
struct Cli {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// JSON output.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// CSV output (converge only).
    #[arg(long, global = true)]
    csv: bool,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Accept self-loops in input graphs.
    #[arg(long, global = true)]
    allow_loops: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph as an edge list (or JSON with --json).
    Generate(GenerateArgs),
    /// Spectrum, certificates and connectivity of one graph.
    Analyze {
        input: PathBuf,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// One quasirandomness certificate.
    Certify(CertifyArgs),
    /// Split a graph into two quasirandom parts.
    Decompose {
        #[arg(required_unless_present = "input_flag", conflicts_with = "input_flag")]
        input: Option<PathBuf>,
        /// Same as the positional input.
        #[arg(long = "input", id = "input_flag")]
        input_flag: Option<PathBuf>,
        #[arg(long, default_value_t = graphlets::decomp::DEFAULT_GAP_MIN)]
        gap_min: f64,
    },
    /// Distance between two graphs.
    Distance(DistanceArgs),
    /// Convergence run over a Chung–Lu size sequence.
    Converge(ConvergeArgs),
}

#[derive(Args)]
struct SearchArgs {
    /// exact or sampled; defaults to exact up to 12 elements.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
}

impl SearchArgs {
    fn mode(&self, size: usize, seed: u64) -> Result<Mode> {
        match self.mode.as_deref() {
            None => Ok(Mode::auto(size, self.samples, seed)),
            Some("exact") => Ok(Mode::Exact),
            Some("sampled") => Ok(Mode::Sampled {
                samples: self.samples,
                seed,
            }),
            Some(other) => Err(Error::InvalidArgument(format!("unknown mode '{other}'"))),
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// chung-lu, union, bipartite, complete, complete-bipartite, path, cycle,
    /// matching, blowup or product.
    #[arg(long)]
    family: String,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    a: Option<usize>,
    #[arg(long)]
    b: Option<usize>,
    /// Weight file (one weight per line); repeat for union parts.
    #[arg(long)]
    weights: Vec<PathBuf>,
    /// Weights of the second side for bipartite.
    #[arg(long)]
    weights_y: Option<PathBuf>,
    /// Weight shape instead of a file: const:C, scaled:F or linear:LO:HI.
    #[arg(long)]
    shape: Vec<String>,
    /// Blow-up factor, or clique size for product.
    #[arg(long)]
    k: Option<usize>,
    /// Base graph for blowup and product.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    input: PathBuf,
    /// spectral, disc, trace, bip-spectral or bip-disc.
    #[arg(long)]
    property: String,
    /// File listing the vertex ids of X.
    #[arg(long)]
    partition: Option<PathBuf>,
    #[arg(long, default_value_t = graphlets::quasirandom::DEFAULT_TRACE_POWER)]
    k: u32,
    /// Use factor 1 in the bipartite expectation.
    #[arg(long)]
    unit_factor: bool,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args)]
struct DistanceArgs {
    first: PathBuf,
    second: PathBuf,
    /// degree, spectral, disc, cut or disc-mu.
    #[arg(long, default_value = "spectral")]
    kind: String,
    /// degree-sorted or identity.
    #[arg(long, default_value = "degree-sorted")]
    labeling: String,
    #[command(flatten)]
    search: SearchArgs,
}

#[derive(Args)]
struct ConvergeArgs {
    /// Only chung-lu is supported.
    #[arg(long, default_value = "chung-lu")]
    family: String,
    #[arg(long, default_value = "scaled:0.25")]
    shape: String,
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,2,3")]
    seeds: Vec<u64>,
    #[arg(long, default_value_t = 2000)]
    samples: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot start {t} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(text) => match &cli.out {
            Some(path) => match std::fs::write(path, text) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    ExitCode::from(2)
                }
            },
            None => {
                print!("{text}");
                ExitCode::SUCCESS
            }
        },
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn read(cli: &Cli, path: &Path) -> Result<Graph> {
    let options = GraphOptions {
        allow_loops: cli.allow_loops,
    };
    load_graph(path, GraphFormat::from_path(path), options)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json");
    s.push('\n');
    s
}

fn run(cli: &Cli) -> Result<String> {
    let meta = Metadata::new(cli.seed);
    match &cli.command {
        Command::Generate(args) => generate(cli, args, &meta),
        Command::Analyze { input, search } => {
            let g = read(cli, input)?;
            let options = AnalyzeOptions {
                seed: cli.seed,
                samples: search.samples,
                ..AnalyzeOptions::default()
            };
            Ok(pretty(&harness::with_metadata(harness::analyze(&g, &options)?, &meta)))
        }
        Command::Certify(args) => {
            let g = read(cli, &args.input)?;
            let partition = match &args.partition {
                Some(p) => Some(read_partition(&g, p)?),
                None => None,
            };
            let req = CertifyRequest {
                property: args.property.parse()?,
                partition: partition.as_deref(),
                k: args.k,
                unit_factor: args.unit_factor,
                mode: args.search.mode(g.n(), cli.seed)?,
            };
            let cert = harness::certify(&g, &req)?;
            let v = serde_json::to_value(&cert).expect("certificate");
            Ok(pretty(&harness::with_metadata(v, &meta)))
        }
        Command::Decompose {
            input,
            input_flag,
            gap_min,
        } => {
            let path = input.as_ref().or(input_flag.as_ref()).expect("clap requires one input");
            let g = read(cli, path)?;
            let (_, _, report) = harness::decompose_report(&g, *gap_min)?;
            Ok(pretty(&harness::with_metadata(report, &meta)))
        }
        Command::Distance(args) => {
            let g1 = read(cli, &args.first)?;
            let g2 = read(cli, &args.second)?;
            let labeling = match args.labeling.as_str() {
                "degree-sorted" => Labeling::DegreeSorted,
                "identity" => Labeling::Identity,
                other => return Err(Error::InvalidArgument(format!("unknown labeling '{other}'"))),
            };
            let kind = args.kind.parse()?;
            let size = graphlets::lift::common_cells(g1.n(), g2.n()).unwrap_or(usize::MAX);
            let mode = args.search.mode(size, cli.seed)?;
            let report = harness::distance_report(&g1, &g2, kind, mode, labeling)?;
            Ok(pretty(&harness::with_metadata(report, &meta)))
        }
        Command::Converge(args) => {
            if args.family != "chung-lu" {
                return Err(Error::InvalidArgument(format!(
                    "converge supports chung-lu, not '{}'",
                    args.family
                )));
            }
            let shape: WeightShape = args.shape.parse()?;
            let result = harness::converge(&shape, &args.sizes, &args.seeds, args.samples)?;
            let meta = Metadata::new(&args.seeds);
            if cli.json {
                Ok(pretty(&harness::converge_json(&result, &meta)))
            } else {
                Ok(harness::converge_csv(&result, &meta))
            }
        }
    }
}

fn read_numbers<T: std::str::FromStr>(path: &Path) -> Result<Vec<T>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        for tok in body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
        {
            out.push(tok.parse::<T>().map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("'{tok}' is not a valid number"),
            })?);
        }
    }
    Ok(out)
}

/// Partition files list original vertex ids.
fn read_partition(g: &Graph, path: &Path) -> Result<Vec<usize>> {
    let ids: Vec<u64> = read_numbers(path)?;
    ids.iter()
        .map(|&id| {
            (0..g.n())
                .find(|&v| g.original_id(v) == id)
                .ok_or_else(|| Error::InvalidPartition(format!("vertex id {id} is not in the graph")))
        })
        .collect()
}

fn weight_list(args: &GenerateArgs, index: usize) -> Result<Vec<f64>> {
    if let Some(path) = args.weights.get(index) {
        return read_numbers(path);
    }
    if let Some(spec) = args.shape.get(index) {
        let n = args
            .n
            .ok_or_else(|| Error::InvalidArgument("--shape needs --n".into()))?;
        return Ok(spec.parse::<WeightShape>()?.weights(n));
    }
    Err(Error::InvalidArgument(format!("missing weights for part {index}")))
}

fn need(x: Option<usize>, name: &str) -> Result<usize> {
    x.ok_or_else(|| Error::InvalidArgument(format!("this family needs --{name}")))
}

fn generate(cli: &Cli, args: &GenerateArgs, meta: &Metadata) -> Result<String> {
    let seed = cli.seed;
    let g = match args.family.as_str() {
        "chung-lu" => generators::chung_lu(&weight_list(args, 0)?, seed)?,
        "union" => {
            let parts = args.weights.len().max(args.shape.len());
            if parts == 0 {
                return Err(Error::InvalidArgument(
                    "union needs --weights or --shape per part".into(),
                ));
            }
            let lists: Vec<Vec<f64>> = (0..parts).map(|j| weight_list(args, j)).collect::<Result<_>>()?;
            generators::union_quasirandom(&lists, seed)?.0
        }
        "bipartite" => {
            let wx = weight_list(args, 0)?;
            let wy = match &args.weights_y {
                Some(p) => read_numbers(p)?,
                None => weight_list(args, 1)?,
            };
            generators::bipartite_quasirandom(&wx, &wy, seed)?
        }
        "complete" => generators::complete(need(args.n, "n")?)?,
        "complete-bipartite" => generators::complete_bipartite(need(args.a, "a")?, need(args.b, "b")?)?,
        "path" => generators::path(need(args.n, "n")?)?,
        "cycle" => generators::cycle(need(args.n, "n")?)?,
        "matching" => generators::matching(need(args.n, "n")?)?,
        "blowup" | "product" => {
            let path = args
                .input
                .as_ref()
                .ok_or_else(|| Error::InvalidArgument("this family needs --input".into()))?;
            let base = read(cli, path)?;
            let k = need(args.k, "k")?;
            if args.family == "blowup" {
                generators::blowup(&base, k)?
            } else {
                generators::product_with_complete(&base, k)?
            }
        }
        other => return Err(Error::InvalidArgument(format!("unknown family '{other}'"))),
    };
    if cli.json {
        let graph: Value = serde_json::from_str(&to_json(&g)).expect("graph json");
        let mut v = json!({ "n": graph["n"], "edges": graph["edges"] });
        v = harness::with_metadata(v, meta);
        Ok(pretty(&v))
    } else {
        Ok(format!("{}{}", meta.comment_lines(), to_edge_list(&g)))
    }
}
