use std::io::Write;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::bounds::chi_power_law;
use super::dsatur::dsatur;
use super::exact::{exact_k_coloring, KColoring};
use crate::encoding::core_hash;
use crate::error::{Error, Result};
use crate::graph::{conflicts, generate_er, generate_planted, Coloring, Graph, PartitionSpec};
use crate::par::Execution;

pub const CSV_HEADER: [&str; 11] = [
    "n",
    "k",
    "density",
    "seed",
    "instance_kind",
    "solver",
    "colors_used",
    "conflicts",
    "recovered",
    "wall_ms",
    "timeout",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Solver {
    Dsatur,
    Exact,
}

impl Solver {
    pub const ALL: [Solver; 2] = [Solver::Dsatur, Solver::Exact];

    pub fn name(self) -> &'static str {
        match self {
            Solver::Dsatur => "dsatur",
            Solver::Exact => "exact",
        }
    }
}

impl FromStr for Solver {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dsatur" => Ok(Solver::Dsatur),
            "exact" => Ok(Solver::Exact),
            _ => Err(Error::ParameterRange(format!("unknown solver {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InstanceKind {
    /// Key graph with a planted k-coloring.
    Planted,
    /// `G(n, p)` at the same density, no planted structure.
    Er,
    /// Graph loaded from a file or public key.
    External,
}

impl InstanceKind {
    pub fn name(self) -> &'static str {
        match self {
            InstanceKind::Planted => "planted",
            InstanceKind::Er => "er",
            InstanceKind::External => "external",
        }
    }
}

/// Instance descriptor. Generated instances are reproducible from `seed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Instance {
    pub n: usize,
    pub k: usize,
    pub density: f64,
    pub seed: Option<u64>,
    pub kind: InstanceKind,
}

impl Instance {
    /// Build the graph. Planted instances also return the hidden coloring.
    pub fn generate(&self) -> Result<(Graph, Option<Coloring>)> {
        let seed = self
            .seed
            .filter(|_| self.kind != InstanceKind::External)
            .ok_or_else(|| Error::ParameterRange("instance is not generated from a seed".into()))?;
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        match self.kind {
            InstanceKind::Planted => {
                let spec = PartitionSpec::balanced(self.n, self.k)?;
                let (g, c) = generate_planted(&spec, self.density, &mut rng)?;
                Ok((g, Some(c)))
            }
            InstanceKind::Er => {
                rng.set_stream(1);
                Ok((generate_er(self.n, self.density, &mut rng)?, None))
            }
            InstanceKind::External => unreachable!(),
        }
    }
}

/// Outcome of one solver on one graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackReport {
    pub solver: Solver,
    pub coloring: Option<Coloring>,
    pub colors_used: Option<usize>,
    pub conflicts: usize,
    /// A proper coloring with at most `k` colors was produced.
    pub recovered: bool,
    pub wall: Duration,
    pub timeout: bool,
}

/// Run `solver` against `g` with target `k`. DSatur ignores the time limit.
pub fn run_solver(g: &Graph, k: usize, solver: Solver, time_limit: Duration) -> AttackReport {
    let start = Instant::now();
    let (coloring, timeout) = match solver {
        Solver::Dsatur => (Some(dsatur(g)), false),
        Solver::Exact => match exact_k_coloring(g, k, time_limit) {
            KColoring::Found(c) => (Some(c), false),
            KColoring::Impossible => (None, false),
            KColoring::Timeout => (None, true),
        },
    };
    let wall = start.elapsed();
    let colors_used = coloring.as_ref().map(Coloring::colors_used);
    let conflicts = coloring
        .as_ref()
        .map_or(0, |c| conflicts(g, c).map_or(usize::MAX, |e| e.len()));
    let recovered = colors_used.is_some_and(|used| used <= k) && conflicts == 0;
    AttackReport {
        solver,
        coloring,
        colors_used,
        conflicts,
        recovered,
        wall,
        timeout,
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub n_values: Vec<usize>,
    pub density: f64,
    pub trials: usize,
    pub solvers: Vec<Solver>,
    pub time_limit: Duration,
    pub seed: u64,
    pub exec: Execution,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n_values: vec![10, 12, 14, 16],
            density: 0.5,
            trials: 10,
            solvers: Solver::ALL.to_vec(),
            time_limit: Duration::from_secs(60),
            seed: 0,
            exec: Execution::default(),
        }
    }
}

/// Seed for trial `trial` at size `n`, derived from the experiment seed.
pub fn instance_seed(master: u64, n: usize, trial: usize) -> u64 {
    let h = core_hash(&[
        b"Instance-v1",
        &master.to_be_bytes(),
        &(n as u64).to_be_bytes(),
        &(trial as u64).to_be_bytes(),
    ]);
    u64::from_be_bytes(h[..8].try_into().unwrap())
}

/// For every `n` and trial, attack a planted key at `k = chi_power_law(n)`
/// and an ER graph of the same density with every configured solver.
/// Rows come back ordered by `(n, trial, kind, solver)`.
pub fn recovery_experiment(config: &ExperimentConfig) -> Result<Vec<(Instance, AttackReport)>> {
    let mut instances = Vec::new();
    for &n in &config.n_values {
        if n == 0 {
            return Err(Error::ParameterRange("n must be positive".into()));
        }
        let k = chi_power_law(n);
        for trial in 0..config.trials {
            let seed = instance_seed(config.seed, n, trial);
            for kind in [InstanceKind::Planted, InstanceKind::Er] {
                instances.push(Instance {
                    n,
                    k,
                    density: config.density,
                    seed: Some(seed),
                    kind,
                });
            }
        }
    }
    let results = config.exec.map_slice(&instances, |inst| -> Result<Vec<_>> {
        let (g, _) = inst.generate()?;
        Ok(config
            .solvers
            .iter()
            .map(|&s| (*inst, run_solver(&g, inst.k, s, config.time_limit)))
            .collect())
    });
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

/// Write rows as CSV. With `timing == false` the `wall_ms` column is left
/// empty so repeated runs produce identical bytes.
pub fn write_csv<W: Write>(rows: &[(Instance, AttackReport)], out: W, timing: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for (inst, rep) in rows {
        let wall = if timing {
            format!("{:.3}", rep.wall.as_secs_f64() * 1e3)
        } else {
            String::new()
        };
        w.write_record([
            inst.n.to_string(),
            inst.k.to_string(),
            inst.density.to_string(),
            inst.seed.map_or(String::new(), |s| s.to_string()),
            inst.kind.name().to_string(),
            rep.solver.name().to_string(),
            rep.colors_used.map_or(String::new(), |c| c.to_string()),
            rep.conflicts.to_string(),
            rep.recovered.to_string(),
            wall,
            rep.timeout.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}
