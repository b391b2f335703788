//! Key-recovery attacks: DSatur, an exact branch-and-bound solver, analytic
//! chromatic-number estimates and the recovery experiment driver.

mod bounds;
mod dsatur;
mod exact;
mod experiment;

pub use bounds::{bollobas_bounds, chi_power_law};
pub use dsatur::dsatur;
pub use exact::{exact_chromatic, exact_k_coloring, greedy_clique, Chromatic, KColoring, MAX_SEARCH_COLORS};
pub use experiment::{
    instance_seed, recovery_experiment, run_solver, write_csv, AttackReport, ExperimentConfig,
    Instance, InstanceKind, Solver, CSV_HEADER,
};
