//! Exact analysis, Monte Carlo runs, statistics and the command line.
//!
//! Serialized field names are stable. `wqsc run --format csv` writes one
//! header line and one row with the columns in [`RUN_STATS_COLUMNS`];
//! `wqsc exact --format csv` writes `scheme,attack,metric,value` rows;
//! `wqsc identities --format csv` writes one row per identity with the
//! columns in [`IDENTITY_COLUMNS`]. Floating point values carry 12
//! significant digits.

mod cli;
mod exact;
mod monte_carlo;
mod output;
mod stats;

pub use crate::protocol::Scheme;
pub use cli::cli_main;
pub use exact::{exact_analyze, ExactResult};
pub use monte_carlo::{run_monte_carlo, run_monte_carlo_serial, RunConfig, RunStats};
pub use output::{
    exact_to_csv, exact_to_json, identities_to_csv, identities_to_json, round_sig, stats_to_csv,
    stats_to_json, IDENTITY_COLUMNS, RUN_STATS_COLUMNS,
};
pub use stats::binomial_ci;
