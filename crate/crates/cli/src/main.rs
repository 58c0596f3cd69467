use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dictatest::fourier::{flip_count, influence, low_degree_influence, wht};
use dictatest::FnSpec;
use dictatest_cli::{
    emit, gowers_rows, rows_to_csv, rows_to_json, run_experiment, thread_cap, to_csv,
    ExperimentConfig, ExperimentKind, HarnessError, Method,
};

#[derive(Parser)]
#[command(name = "dictatest", version, about = "Adaptive dictatorship tests and boolean Fourier analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the report here (atomically) instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Largest number of random bits enumerated exactly.
    #[arg(long, default_value_t = dictatest::DEFAULT_GUARD_BITS)]
    guard_bits: u32,
}

#[derive(Args, Clone)]
struct FunctionArgs {
    /// Function spec, e.g. `dict:3`, `parity:7`, `random:42`.
    #[arg(long = "fn")]
    spec: String,
    #[arg(long)]
    n: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: OptionalCommon,
        #[arg(long)]
        json: bool,
    },
    /// Fourier spectrum as `alpha_hex,weight,coeff` rows.
    Wht {
        #[command(flatten)]
        function: FunctionArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Influence of every coordinate.
    Influence {
        #[command(flatten)]
        function: FunctionArgs,
        /// Degree bound for the low-degree column (defaults to n).
        #[arg(long)]
        w: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Gowers uniformity norms for d = 1..=D.
    Gowers {
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long, default_value_t = 3)]
        d: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Acceptance probability of the Basic Test.
    Basictest {
        #[command(flatten)]
        function: FunctionArgs,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        json: bool,
    },
    /// Acceptance probability of the hypergraph test.
    Htest {
        /// JSON family file.
        #[arg(long, conflicts_with_all = ["spec", "k", "edges"])]
        family_file: Option<PathBuf>,
        /// Spec applied to every member.
        #[arg(long = "fn")]
        spec: Option<String>,
        #[arg(long)]
        n: usize,
        /// Vertex count; the hypergraph is complete unless --edges is given.
        #[arg(long)]
        k: Option<usize>,
        /// Edges as `1,2;2,3`.
        #[arg(long)]
        edges: Option<String>,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        json: bool,
    },
    /// Exact vs. Fourier acceptance of the Basic Test on random folded functions.
    Xcheck {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        json: bool,
    },
    /// Influential-pair decoder on planted families.
    Decode {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long, default_value_t = 3)]
        coordinate: usize,
        #[arg(long, default_value_t = 0.05)]
        rho: f64,
        #[arg(long, default_value_t = 0.2)]
        tau: f64,
        #[arg(long, default_value_t = 2)]
        w: usize,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        json: bool,
    },
}

/// Overrides for a config file; unset flags keep the file's values.
#[derive(Args, Clone)]
struct OptionalCommon {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    guard_bits: Option<u32>,
}

fn parse_edges(s: &str) -> Result<Vec<Vec<usize>>, HarnessError> {
    s.split(';')
        .filter(|e| !e.trim().is_empty())
        .map(|e| {
            e.split(',')
                .map(|v| {
                    v.trim()
                        .parse::<usize>()
                        .map_err(|_| HarnessError::Parse(format!("bad vertex {v:?} in --edges")))
                })
                .collect()
        })
        .collect()
}

fn build_function(f: &FunctionArgs) -> Result<dictatest::BooleanFunction, HarnessError> {
    Ok(f.spec.parse::<FnSpec>()?.build(f.n)?)
}

fn config_with(kind: ExperimentKind, n: usize, common: &Common) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(kind, n);
    cfg.seed = common.seed;
    cfg.guard_bits = common.guard_bits;
    cfg.out = common.out.clone();
    cfg
}

fn report(cfg: &ExperimentConfig, json: bool) -> Result<(), HarnessError> {
    let rows = run_experiment(cfg)?;
    let bytes = if json { rows_to_json(&rows) } else { rows_to_csv(&rows)? };
    emit(cfg.out.as_deref(), &bytes)
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Command::Run { config, common, json } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            if let Some(seed) = common.seed {
                cfg.seed = seed;
            }
            if let Some(bits) = common.guard_bits {
                cfg.guard_bits = bits;
            }
            if common.out.is_some() {
                cfg.out = common.out;
            }
            report(&cfg, json)
        }
        Command::Wht { function, common } => {
            let f = build_function(&function)?;
            let mut bytes = Vec::new();
            wht(&f).write_csv(&mut bytes)?;
            emit(common.out.as_deref(), &bytes)
        }
        Command::Influence { function, w, common } => {
            let f = build_function(&function)?;
            let s = wht(&f);
            let w = w.unwrap_or(f.n());
            let mut bytes = b"coordinate,influence,low_degree_influence,combinatorial\n".to_vec();
            for i in 1..=f.n() {
                let row = format!(
                    "{i},{:?},{:?},{:?}\n",
                    influence(&s, i)?,
                    low_degree_influence(&s, i, w)?,
                    flip_count(&f, i)? as f64 / (1u64 << f.n()) as f64
                );
                bytes.extend(row.into_bytes());
            }
            emit(common.out.as_deref(), &bytes)
        }
        Command::Gowers { function, d, trials, common } => {
            let f = build_function(&function)?;
            let rows = gowers_rows(&f, d, common.guard_bits, trials, common.seed)?;
            emit(common.out.as_deref(), &to_csv(&rows)?)
        }
        Command::Basictest { function, method, trials, common, json } => {
            let mut cfg = config_with(ExperimentKind::BasicTest, function.n, &common);
            cfg.family = Some(function.spec);
            cfg.method = method;
            cfg.trials = trials;
            report(&cfg, json)
        }
        Command::Htest { family_file, spec, n, k, edges, method, trials, common, json } => {
            let mut cfg = config_with(ExperimentKind::HTest, n, &common);
            cfg.method = method;
            cfg.trials = trials;
            match family_file {
                Some(path) => cfg.family_file = Some(path),
                None => {
                    cfg.family = Some(spec.ok_or_else(|| HarnessError::Parse("htest needs --fn or --family-file".into()))?);
                    cfg.k = Some(k.ok_or_else(|| HarnessError::Parse("htest needs --k with --fn".into()))?);
                    cfg.edges = edges.as_deref().map(parse_edges).transpose()?;
                }
            }
            report(&cfg, json)
        }
        Command::Xcheck { n, count, common, json } => {
            let mut cfg = config_with(ExperimentKind::FormulaXcheck, n, &common);
            cfg.count = count;
            report(&cfg, json)
        }
        Command::Decode { n, d, coordinate, rho, tau, w, count, common, json } => {
            let mut cfg = config_with(ExperimentKind::Decode, n, &common);
            cfg.d = Some(d);
            cfg.coordinate = Some(coordinate);
            cfg.rho = Some(rho);
            cfg.tau = Some(tau);
            cfg.w = Some(w);
            cfg.count = count;
            report(&cfg, json)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = thread_cap().and_then(|cap| {
        if let Some(threads) = cap {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global()
                .map_err(|e| HarnessError::Parse(format!("thread pool: {e}")))?;
        }
        run(cli)
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("dictatest: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
