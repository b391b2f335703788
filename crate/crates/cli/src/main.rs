use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use eidolon::attacks::{
    recovery_experiment, run_solver, write_csv, AttackReport, ExperimentConfig, Instance,
    InstanceKind, Solver,
};
use eidolon::encoding::ceil_log2;
use eidolon::graph::{generate_er, generate_planted, pairs};
use eidolon::io::{read_graph, write_coloring, write_graph};
use eidolon::merkle::expected_shared;
use eidolon::protocol::{plant_conflicts, simulate_soundness};
use eidolon::sig::{
    keygen, sign_merkle, sign_plain, signature_size_bits, PublicKey, SecretKey, Signature,
    SizeParams, Variant,
};
use eidolon::{Error, Execution, Graph, PartitionSpec};

#[derive(Parser)]
#[command(name = "eidolon", version, about = "Graph k-coloring signatures and attack harness")]
struct Cli {
    /// Worker threads for parallel sections (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct SeedArg {
    /// RNG seed; OS entropy when absent.
    #[arg(long, env = "EIDOLON_SEED")]
    seed: Option<u64>,
}

impl SeedArg {
    fn rng(self) -> ChaCha20Rng {
        match self.seed {
            Some(s) => ChaCha20Rng::seed_from_u64(s),
            None => ChaCha20Rng::from_entropy(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair with a planted balanced coloring.
    Keygen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out_pk: PathBuf,
        #[arg(long)]
        out_sk: PathBuf,
    },
    /// Sign a message file (`-` reads standard input).
    Sign {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        sk: PathBuf,
        #[arg(long)]
        msg_file: PathBuf,
        /// Number of rounds; a cheating prover escapes with (1 - 1/m)^t.
        #[arg(long)]
        t: usize,
        #[arg(long, value_enum, default_value_t = VariantArg::Merkle)]
        variant: VariantArg,
        #[command(flatten)]
        seed: SeedArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify a signature. Exit 0 accept, 1 reject, 2 malformed.
    Verify {
        #[arg(long)]
        pk: PathBuf,
        #[arg(long)]
        msg_file: PathBuf,
        #[arg(long)]
        sig: PathBuf,
    },
    /// Signature sizes from the closed-form formulas.
    Sizes {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        t: u64,
        /// Show one variant only.
        #[arg(long, value_enum)]
        variant: Option<VariantArg>,
        /// Mean sibling hashes saved per round by shared paths
        /// (default: expected strict sharing for uniform challenges).
        #[arg(long)]
        s_bar: Option<f64>,
    },
    /// Empirical vs analytic escape rate of a cheating prover. The key graph
    /// gets `t-bad` extra edges inside color classes, and the prover commits
    /// to the planted coloring.
    Soundness {
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        /// Number of monochromatic edges seen by the cheating prover.
        #[arg(long, default_value_t = 1)]
        t_bad: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![1, 8, 36])]
        rounds: Vec<usize>,
        #[arg(long, default_value_t = 100_000)]
        trials: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Run solvers against one graph. Exit 1 when none recovers a k-coloring.
    Attack {
        #[arg(long, conflicts_with = "pk", required_unless_present = "pk")]
        graph: Option<PathBuf>,
        #[arg(long)]
        pk: Option<PathBuf>,
        /// Target color count (default: k from the input file).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = vec![SolverArg::Dsatur, SolverArg::Exact])]
        solvers: Vec<SolverArg>,
        /// Seconds.
        #[arg(long, default_value_t = 60.0)]
        time_limit: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the first recovered coloring here.
        #[arg(long)]
        coloring_out: Option<PathBuf>,
        /// Leave `wall_ms` empty in the CSV.
        #[arg(long)]
        no_timing: bool,
    },
    /// Planted-recovery experiment over a range of n; writes CSV.
    Experiment {
        #[arg(long, default_value_t = 10)]
        n_min: usize,
        #[arg(long, default_value_t = 16)]
        n_max: usize,
        #[arg(long, default_value_t = 2)]
        n_step: usize,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, value_enum, value_delimiter = ',', default_values_t = vec![SolverArg::Dsatur, SolverArg::Exact])]
        solvers: Vec<SolverArg>,
        #[arg(long, default_value_t = 60.0)]
        time_limit: f64,
        /// Experiment seed (instance seeds are derived from it).
        #[arg(long, env = "EIDOLON_SEED", default_value_t = 0)]
        seed: u64,
        /// Output path; standard output when absent.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        no_timing: bool,
    },
    /// Write a public key's graph in the text graph format.
    ExportGraph {
        #[arg(long)]
        pk: PathBuf,
        /// Output path, `-` for standard output.
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a planted or Erdős–Rényi instance in the text graph format.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, value_enum, default_value_t = KindArg::Planted)]
        kind: KindArg,
        #[command(flatten)]
        seed: SeedArg,
        /// Output path, `-` for standard output.
        #[arg(long)]
        out: PathBuf,
        /// Planted instances only: write the hidden coloring.
        #[arg(long)]
        coloring_out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Plain,
    Merkle,
    MerkleShared,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Plain => Variant::Plain,
            VariantArg::Merkle => Variant::Merkle,
            VariantArg::MerkleShared => Variant::MerkleShared,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolverArg {
    Dsatur,
    Exact,
}

impl From<SolverArg> for Solver {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Dsatur => Solver::Dsatur,
            SolverArg::Exact => Solver::Exact,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Planted,
    Er,
}

/// Failure that maps to exit code 2.
struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

type CmdResult = Result<ExitCode, Failure>;

fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    let read = if path == Path::new("-") {
        let mut buf = Vec::new();
        io::stdin().read_to_end(&mut buf).map(|_| buf)
    } else {
        fs::read(path)
    };
    read.map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, Failure> {
    String::from_utf8(read_file(path)?).map_err(|_| Failure(format!("{}: not UTF-8", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let result = if path == Path::new("-") {
        io::stdout().write_all(bytes)
    } else {
        fs::write(path, bytes)
    };
    result.map_err(|e| Failure(format!("{}: {e}", path.display())))
}

/// Owner-only permissions where the platform has them.
fn write_secret(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    let mut options = fs::OpenOptions::new();
    options.write(true).create(true).truncate(true);
    #[cfg(unix)]
    {
        use std::os::unix::fs::OpenOptionsExt;
        options.mode(0o600);
    }
    options
        .open(path)
        .and_then(|mut f| f.write_all(bytes))
        .map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn load_pk(path: &Path) -> Result<PublicKey, Failure> {
    Ok(PublicKey::from_bytes(&read_file(path)?)?)
}

fn time_limit(secs: f64) -> Result<Duration, Failure> {
    Duration::try_from_secs_f64(secs).map_err(|_| Failure(format!("invalid time limit {secs}")))
}

/// `1.57 MiB`, `144.5 KiB`: two decimals below ten, one above.
fn human_size(bytes: u64) -> String {
    const UNITS: [&str; 4] = ["KiB", "MiB", "GiB", "TiB"];
    if bytes < 1024 {
        return format!("{bytes} B");
    }
    let mut value = bytes as f64 / 1024.0;
    let mut unit = 0;
    while value >= 1024.0 && unit + 1 < UNITS.len() {
        value /= 1024.0;
        unit += 1;
    }
    if value < 10.0 {
        format!("{value:.2} {}", UNITS[unit])
    } else {
        format!("{value:.1} {}", UNITS[unit])
    }
}

fn cmd_keygen(n: usize, k: usize, density: f64, seed: SeedArg, out_pk: &Path, out_sk: &Path) -> CmdResult {
    let (pk, sk) = keygen(n, k, density, &mut seed.rng())?;
    let pk_bytes = pk.to_bytes();
    let sk_bytes = sk.to_bytes();
    write_file(out_pk, &pk_bytes)?;
    write_secret(out_sk, &sk_bytes)?;
    let sizes = PartitionSpec::balanced(n, k)?;
    let sizes: Vec<String> = sizes.sizes().iter().map(usize::to_string).collect();
    println!(
        "n={n} k={k} m={} sizes=[{}] pk_bytes={} sk_bytes={}",
        pk.graph.m(),
        sizes.join(","),
        pk_bytes.len(),
        sk_bytes.len()
    );
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_sign(pk: &Path, sk: &Path, msg: &Path, t: usize, variant: Variant, seed: SeedArg, out: &Path) -> CmdResult {
    let pk = load_pk(pk)?;
    let sk = SecretKey::from_bytes(&read_file(sk)?)?;
    let message = read_file(msg)?;
    let mut rng = seed.rng();
    let sig = match variant {
        Variant::Plain => Signature::Plain(sign_plain(&pk, &sk, &message, t, &mut rng)?),
        Variant::Merkle | Variant::MerkleShared => Signature::Merkle(sign_merkle(
            &pk,
            &sk,
            &message,
            t,
            &mut rng,
            variant == Variant::MerkleShared,
        )?),
    };
    let bytes = sig.to_bytes(pk.graph.n());
    write_file(out, &bytes)?;
    println!(
        "variant={} t={t} sig_bytes={} body_bits={}",
        variant.name(),
        bytes.len(),
        sig.body_bits()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(pk: &Path, msg: &Path, sig: &Path) -> CmdResult {
    let pk = load_pk(pk)?;
    let message = read_file(msg)?;
    let (sig, n) = Signature::from_bytes(&read_file(sig)?)?;
    if n != pk.graph.n() {
        eprintln!("reject: signature is for n={n}, key has n={}", pk.graph.n());
        return Ok(ExitCode::from(1));
    }
    match sig.verify(&pk, &message) {
        Ok(()) => {
            println!("result=accept variant={} t={}", sig.variant().name(), sig.rounds());
            Ok(ExitCode::SUCCESS)
        }
        Err(rejection) => {
            println!("result=reject");
            eprintln!("reject: {rejection}");
            Ok(ExitCode::from(1))
        }
    }
}

fn cmd_sizes(n: u64, t: u64, only: Option<VariantArg>, s_bar: Option<f64>) -> CmdResult {
    if n < 2 || t == 0 {
        return Err(Failure("need n >= 2 and t >= 1".into()));
    }
    let (strict, wire) = expected_shared(n as usize);
    let s_bar = s_bar.unwrap_or(strict);
    let depth = ceil_log2(n as usize);
    if !(0.0..=2.0 * f64::from(depth)).contains(&s_bar) {
        return Err(Failure(format!("s-bar {s_bar} outside [0, {}]", 2 * depth)));
    }
    println!("n={n} t={t} depth={depth} s_bar={s_bar} expected_s_bar_strict={strict:.4} expected_s_bar_wire={wire:.4}");
    println!("{:<14} {:>14} {:>12} {:>12}", "variant", "bits", "bytes", "size");
    let params = SizeParams::standard(n, t);
    for variant in [Variant::Plain, Variant::Merkle, Variant::MerkleShared] {
        if only.is_some_and(|v| Variant::from(v) != variant) {
            continue;
        }
        let bits = signature_size_bits(params, variant, s_bar);
        let bytes = bits.div_ceil(8);
        println!("{:<14} {bits:>14} {bytes:>12} {:>12}", variant.name(), human_size(bytes));
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_soundness(
    n: usize,
    k: usize,
    density: f64,
    t_bad: usize,
    rounds: &[usize],
    trials: usize,
    seed: SeedArg,
) -> CmdResult {
    if t_bad == 0 || trials == 0 {
        return Err(Failure("need t-bad >= 1 and trials >= 1".into()));
    }
    let mut rng = seed.rng();
    let (pk, sk) = keygen(n, k, density, &mut rng)?;
    let g = plant_conflicts(&pk.graph, &sk.coloring, t_bad)?;
    println!("n={n} k={k} m={} t_bad={t_bad} trials={trials}", g.m());
    println!("{:>6} {:>12} {:>12} {:>12}", "rounds", "empirical", "analytic", "abs_diff");
    for &r in rounds {
        let report = simulate_soundness(&g, &sk.coloring, r, trials, &mut rng, Execution::default())?;
        let (emp, ana) = (report.escape_rate(), report.analytic());
        println!("{r:>6} {emp:>12.6} {ana:>12.6} {:>12.6}", (emp - ana).abs());
    }
    Ok(ExitCode::SUCCESS)
}

fn density_of(g: &Graph) -> f64 {
    let total = pairs(g.n());
    if total == 0 {
        0.0
    } else {
        g.m() as f64 / total as f64
    }
}

fn save_csv(rows: &[(Instance, AttackReport)], path: Option<&Path>, timing: bool) -> Result<(), Failure> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf, timing)?;
    match path {
        Some(p) => write_file(p, &buf),
        None => write_file(Path::new("-"), &buf),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_attack(
    graph: Option<&Path>,
    pk: Option<&Path>,
    k: Option<usize>,
    solvers: &[SolverArg],
    limit: f64,
    csv: Option<&Path>,
    coloring_out: Option<&Path>,
    no_timing: bool,
) -> CmdResult {
    let (g, file_k) = match (graph, pk) {
        (Some(path), _) => read_graph(&read_text(path)?)?,
        (None, Some(path)) => {
            let pk = load_pk(path)?;
            (pk.graph, pk.k)
        }
        (None, None) => return Err(Failure("need --graph or --pk".into())),
    };
    let k = k.unwrap_or(file_k);
    let limit = time_limit(limit)?;
    let instance = Instance {
        n: g.n(),
        k,
        density: density_of(&g),
        seed: None,
        kind: InstanceKind::External,
    };
    let mut rows = Vec::new();
    for &s in solvers {
        let report = run_solver(&g, k, s.into(), limit);
        println!(
            "solver={} colors_used={} conflicts={} recovered={} wall_ms={:.3} timeout={}",
            report.solver.name(),
            report.colors_used.map_or("-".into(), |c| c.to_string()),
            report.conflicts,
            report.recovered,
            report.wall.as_secs_f64() * 1e3,
            report.timeout
        );
        rows.push((instance, report));
    }
    if let Some(path) = csv {
        save_csv(&rows, Some(path), !no_timing)?;
    }
    let found = rows.iter().find(|(_, r)| r.recovered);
    if let (Some(path), Some((_, r))) = (coloring_out, found) {
        write_file(path, write_coloring(r.coloring.as_ref().unwrap()).as_bytes())?;
    }
    Ok(if found.is_some() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_generate(
    n: usize,
    k: usize,
    density: f64,
    kind: KindArg,
    seed: SeedArg,
    out: &Path,
    coloring_out: Option<&Path>,
) -> CmdResult {
    let mut rng = seed.rng();
    let (g, coloring) = match kind {
        KindArg::Planted => {
            let spec = PartitionSpec::balanced(n, k)?;
            let (g, c) = generate_planted(&spec, density, &mut rng)?;
            (g, Some(c))
        }
        KindArg::Er => (generate_er(n, density, &mut rng)?, None),
    };
    write_file(out, write_graph(&g, k).as_bytes())?;
    match (coloring_out, coloring) {
        (Some(path), Some(c)) => write_file(path, write_coloring(&c).as_bytes())?,
        (Some(_), None) => return Err(Failure("--coloring-out needs --kind planted".into())),
        _ => {}
    }
    eprintln!("n={n} k={k} m={}", g.m());
    Ok(ExitCode::SUCCESS)
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::Keygen {
            n,
            k,
            density,
            seed,
            out_pk,
            out_sk,
        } => cmd_keygen(n, k, density, seed, &out_pk, &out_sk),
        Command::Sign {
            pk,
            sk,
            msg_file,
            t,
            variant,
            seed,
            out,
        } => cmd_sign(&pk, &sk, &msg_file, t, variant.into(), seed, &out),
        Command::Verify { pk, msg_file, sig } => cmd_verify(&pk, &msg_file, &sig),
        Command::Sizes { n, t, variant, s_bar } => cmd_sizes(n, t, variant, s_bar),
        Command::Soundness {
            n,
            k,
            density,
            t_bad,
            rounds,
            trials,
            seed,
        } => cmd_soundness(n, k, density, t_bad, &rounds, trials, seed),
        Command::Attack {
            graph,
            pk,
            k,
            solvers,
            time_limit,
            csv,
            coloring_out,
            no_timing,
        } => cmd_attack(
            graph.as_deref(),
            pk.as_deref(),
            k,
            &solvers,
            time_limit,
            csv.as_deref(),
            coloring_out.as_deref(),
            no_timing,
        ),
        Command::Experiment {
            n_min,
            n_max,
            n_step,
            trials,
            density,
            solvers,
            time_limit: limit,
            seed,
            csv,
            no_timing,
        } => {
            if n_min == 0 || n_min > n_max || n_step == 0 {
                return Err(Failure("need 1 <= n-min <= n-max and n-step >= 1".into()));
            }
            let config = ExperimentConfig {
                n_values: (n_min..=n_max).step_by(n_step).collect(),
                density,
                trials,
                solvers: solvers.into_iter().map(Solver::from).collect(),
                time_limit: time_limit(limit)?,
                seed,
                exec: Execution::default(),
            };
            let rows = recovery_experiment(&config)?;
            save_csv(&rows, csv.as_deref(), !no_timing)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ExportGraph { pk, out } => {
            let pk = load_pk(&pk)?;
            write_file(&out, write_graph(&pk.graph, pk.k).as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Generate {
            n,
            k,
            density,
            kind,
            seed,
            out,
            coloring_out,
        } => cmd_generate(n, k, density, kind, seed, &out, coloring_out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let jobs = cli.jobs;
    match eidolon::par::with_jobs(jobs, || run(cli.command)) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
