use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use ttdmd::dmd::{exact_dmd, standard_dmd, tt_dmd, DmdResult, SnapshotMatrices, TtSnapshotPair, Variant};
use ttdmd::io::{self, Metadata};
use ttdmd::pinv::Cutoff;
use ttdmd::synth::{self, GeneratorSpec};
use ttdmd::sweep::run_sweep;
use ttdmd::tt::{tt_svd_report, DenseTensor, TensorTrain};
use ttdmd::{Result, TtError};

#[derive(Parser)]
#[command(name = "ttdmd", version, about = "Dynamic mode decomposition on tensor-train snapshot data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic snapshot series (TTDN) and its metadata sidecar.
    Synth(SynthArgs),
    /// Convert a dense tensor (TTDN) to a tensor train (TTTR).
    Decompose(DecomposeArgs),
    /// Compute DMD eigenvalues, frequencies and modes.
    Dmd(DmdArgs),
    /// Sweep the TT truncation threshold and compare against epsilon = 0.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// Two traveling waves with omega*dt of 0.3 and 0.7.
    TwoMode,
    /// One mode decaying by --rho per step.
    Decay,
    /// Waves with geometrically falling amplitudes.
    Graded,
}

#[derive(clap::Args)]
struct SynthArgs {
    #[arg(long, value_enum, default_value = "two-mode")]
    preset: Preset,
    /// State dimensions, e.g. 16x12.
    #[arg(long, default_value = "16x12")]
    dims: String,
    /// Number of snapshot pairs; the series holds one more snapshot.
    #[arg(long, default_value_t = 20)]
    snapshots: usize,
    #[arg(long, default_value_t = 0.1)]
    dt: f64,
    #[arg(long, default_value_t = 0.9)]
    rho: f64,
    /// Number of modes for the graded preset.
    #[arg(long, default_value_t = 6)]
    count: usize,
    /// Amplitude ratio between consecutive graded modes.
    #[arg(long, default_value_t = 1e-3)]
    ratio: f64,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
    #[arg(long, default_value = "series")]
    name: String,
}

#[derive(clap::Args)]
struct DecomposeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Engine {
    Dense,
    Tt,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Standard,
    Exact,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Standard => Variant::Standard,
            VariantArg::Exact => Variant::Exact,
        }
    }
}

#[derive(clap::Args)]
struct DmdArgs {
    /// Series with the time axis last (TTDN).
    #[arg(long, conflicts_with_all = ["x", "y"], required_unless_present = "x")]
    series: Option<PathBuf>,
    /// Snapshot tensor X, TTDN or TTTR, snapshot axis last.
    #[arg(long, requires = "y")]
    x: Option<PathBuf>,
    #[arg(long, requires = "x")]
    y: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "standard")]
    variant: VariantArg,
    #[arg(long, value_enum, default_value = "tt")]
    engine: Engine,
    /// Truncation threshold for converting dense input to TT-format.
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
    /// Time step; read from the metadata sidecar when omitted.
    #[arg(long)]
    dt: Option<f64>,
    /// Directory for mode files (TTMC).
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SweepArgs {
    #[arg(long)]
    series: PathBuf,
    /// Comma-separated thresholds, must include 0.
    #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "0,1e-10,1e-5,1")]
    epsilons: Vec<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, value_enum, default_value = "standard")]
    variant: VariantArg,
    /// Where to write the CSV report.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn exit_code(e: &TtError) -> u8 {
    match e {
        TtError::Argument(_) | TtError::Index { .. } => 2,
        TtError::Format { .. } => 3,
        TtError::Degenerate(_) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Decompose(a) => cmd_decompose(a),
        Command::Dmd(a) => cmd_dmd(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn parse_dims(s: &str) -> Result<Vec<usize>> {
    s.split('x')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| TtError::Argument(format!("bad dimension '{p}' in '{s}'")))
        })
        .collect()
}

fn sidecar_path(series: &Path) -> PathBuf {
    series.with_extension("meta")
}

fn cmd_synth(a: SynthArgs) -> Result<()> {
    let dims = parse_dims(&a.dims)?;
    let mut spec: GeneratorSpec = match a.preset {
        Preset::TwoMode => synth::two_mode(&dims, a.snapshots, a.dt)?,
        Preset::Decay => synth::decay(&dims, a.snapshots, a.dt, a.rho)?,
        Preset::Graded => synth::graded(&dims, a.snapshots, a.dt, a.count, a.ratio)?,
    };
    spec.noise_scale = a.noise;
    spec.seed = a.seed;
    let series = synth::generate_series(&spec)?;
    std::fs::create_dir_all(&a.output_dir)?;
    let path = a.output_dir.join(format!("{}.ttdn", a.name));
    io::write_dense(&path, &series)?;
    let mut meta = Metadata::default();
    meta.set("dims", &a.dims);
    meta.set("m", spec.snapshot_count);
    meta.set("dt", spec.dt);
    meta.set("seed", spec.seed);
    meta.set("noise", spec.noise_scale);
    let modes: Vec<String> = spec
        .modes
        .iter()
        .map(|m| format!("{}:{}", m.growth, m.frequency))
        .collect();
    meta.set("modes", modes.join(";"));
    meta.write(sidecar_path(&path))?;
    println!("wrote {} ({})", path.display(), series.shape());
    Ok(())
}

fn cmd_decompose(a: DecomposeArgs) -> Result<()> {
    if !(a.epsilon >= 0.0) {
        return Err(TtError::Argument(format!("epsilon must be nonnegative, got {}", a.epsilon)));
    }
    let x = io::read_dense(&a.input)?;
    let report = tt_svd_report(&x, a.epsilon)?;
    io::write_train(&a.output, &report.train)?;
    let total = x.norm().powi(2);
    let lost = if total > 0.0 { report.discarded_energy / total } else { 0.0 };
    println!("ranks: {}", join(&report.train.ranks()));
    println!("discarded energy: {lost:.5e}");
    Ok(())
}

fn join(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn resolve_dt(dt: Option<f64>, near: &Path) -> Result<f64> {
    if let Some(dt) = dt {
        return Ok(dt);
    }
    let side = sidecar_path(near);
    if side.exists() {
        let meta = Metadata::read(&side)?;
        if let Some(v) = meta.get("dt") {
            return v
                .parse()
                .map_err(|_| TtError::Format { offset: 0, message: format!("bad dt '{v}' in {}", side.display()) });
        }
    }
    Err(TtError::Argument("no --dt given and no dt in a metadata sidecar".into()))
}

enum Operand {
    Dense(DenseTensor),
    Train(TensorTrain),
}

fn read_operand(path: &Path) -> Result<Operand> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(io::TRAIN_MAGIC) {
        Ok(Operand::Train(io::decode_train(&bytes)?))
    } else {
        Ok(Operand::Dense(io::decode_dense(&bytes)?))
    }
}

struct Inputs {
    dense: Option<SnapshotMatrices>,
    pair: Option<TtSnapshotPair>,
}

fn load_inputs(a: &DmdArgs, dt: f64) -> Result<Inputs> {
    let want_dense = a.engine != Engine::Tt;
    let want_tt = a.engine != Engine::Dense;
    let (x, y) = match (&a.series, &a.x, &a.y) {
        (Some(s), _, _) => {
            let (x, y) = synth::split_series(&io::read_dense(s)?)?;
            (Operand::Dense(x), Operand::Dense(y))
        }
        (None, Some(x), Some(y)) => (read_operand(x)?, read_operand(y)?),
        _ => return Err(TtError::Argument("give --series or both --x and --y".into())),
    };
    let to_dense = |o: &Operand| match o {
        Operand::Dense(t) => t.clone(),
        Operand::Train(t) => t.to_dense(),
    };
    let to_train = |o: Operand| match o {
        Operand::Dense(t) => ttdmd::tt::tt_svd(&t, a.epsilon),
        Operand::Train(t) => Ok(t),
    };
    let dense = if want_dense {
        Some(SnapshotMatrices::from_tensors(&to_dense(&x), &to_dense(&y), dt)?)
    } else {
        None
    };
    let pair = if want_tt {
        Some(TtSnapshotPair::new(to_train(x)?, to_train(y)?, dt)?)
    } else {
        None
    };
    Ok(Inputs { dense, pair })
}

fn print_table(label: &str, r: &DmdResult) {
    println!("# engine: {label}, variant: {}, rank: {}", r.variant, r.rank);
    println!("{:>5} {:>13} {:>13} {:>13} {:>13}", "index", "re", "im", "abs", "omega");
    for (k, (l, w)) in r.eigenvalues.iter().zip(&r.frequencies).enumerate() {
        let w = w.map_or("-".to_string(), |w| format!("{w:.5e}"));
        println!("{k:>5} {:>13.5e} {:>13.5e} {:>13.5e} {w:>13}", l.re, l.im, l.norm());
    }
    if !r.omitted.is_empty() {
        println!("# omitted near-zero eigenvalues: {}", r.omitted.len());
    }
}

fn cmd_dmd(a: DmdArgs) -> Result<()> {
    let anchor = a.series.clone().or_else(|| a.x.clone()).expect("clap enforces an input");
    let dt = resolve_dt(a.dt, &anchor)?;
    if !(a.epsilon >= 0.0) {
        return Err(TtError::Argument(format!("epsilon must be nonnegative, got {}", a.epsilon)));
    }
    let variant: Variant = a.variant.into();
    let inputs = load_inputs(&a, dt)?;
    let mut results = Vec::new();
    if let Some(s) = &inputs.dense {
        let r = match variant {
            Variant::Standard => standard_dmd(s, Cutoff::Roundoff)?,
            Variant::Exact => exact_dmd(s, Cutoff::Roundoff)?,
        };
        results.push(("dense", r));
    }
    if let Some(p) = &inputs.pair {
        results.push(("tt", tt_dmd(p, variant, Cutoff::Roundoff)?));
    }
    for (label, r) in &results {
        print_table(label, r);
        if let Some(dir) = &a.output_dir {
            std::fs::create_dir_all(dir)?;
            let path = dir.join(format!("modes_{label}.ttmc"));
            io::write_matrix(&path, &r.dense_modes()?)?;
            println!("# modes written to {}", path.display());
        }
    }
    if let [(_, d), (_, t)] = results.as_slice() {
        let worst = ttdmd::dmd::greedy_pairing(&d.eigenvalues, &t.eigenvalues)
            .iter()
            .enumerate()
            .map(|(i, j)| j.map_or(f64::INFINITY, |j| (d.eigenvalues[i] - t.eigenvalues[j]).norm()))
            .fold(0.0_f64, f64::max);
        let worst = if d.eigenvalues.len() == t.eigenvalues.len() { worst } else { f64::INFINITY };
        println!("# max eigenvalue discrepancy: {worst:.5e}");
    }
    Ok(())
}

fn cmd_sweep(a: SweepArgs) -> Result<()> {
    let dt = resolve_dt(a.dt, &a.series)?;
    let series = io::read_dense(&a.series)?;
    let report = run_sweep(&series, &a.epsilons, dt, a.variant.into())?;
    print!("{}", report.table());
    if let Some(path) = &a.csv {
        report.write_csv(std::fs::File::create(path)?)?;
        println!("# csv written to {}", path.display());
    }
    Ok(())
}
