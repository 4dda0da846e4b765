//! Error norms, convergence rates, the static energy identity probe and
//! the named invariant suites.

mod energy;
mod errors;
mod rates;
mod suites;

pub use energy::{assemble_energy_parts, energy_identity_probe, EnergyParts};
pub use errors::{compute_errors, error_norms, error_quadrature_order, ErrorNorms, ErrorQuantity, ErrorReport};
pub use rates::{convergence_rates, least_squares_rate, pair_rate, ConvergenceRates};
pub use suites::{
    calderon_history, energy_discrepancies, jump_probe_history, run_suite, suite_wavenumber, Bound, Check, Suite,
    SuiteReport, ENERGY_TRIALS, JUMP_SCHEDULE,
};
