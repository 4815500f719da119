//! Transmon and coupled-system physics.

mod alc;
mod chevron;
mod cond_osc;
mod hamiltonian;
mod params;

use thiserror::Error;

pub use alc::{
    fit_avoided_crossing, AlcDataset, AlcFit, AlcPoint, Branch, J_STARTS_GHZ, MIN_POINTS_PER_BRANCH,
};
pub use chevron::{
    chevron_map, chevron_period_ns, chevron_population, first_full_transfer_ns, swap_frequency,
    two_excitation_splitting, ChevronPoint,
};
pub use cond_osc::{conditional_phase, fit_cosine, ConditionalPhase, CosineFit, FringeData};
pub use hamiltonian::{
    build_hamiltonian, transmon_level, CoupledSystemModel, Hamiltonian, DISPERSIVE_RATIO,
};
pub use params::{
    dispersive_shift, dressed_frequencies, flux_tuned_frequency, invert_for_ej, josephson_energy,
    transmon_frequency, DeviceParams, QubitParams,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeviceError {
    #[error("{0}")]
    Argument(String),
    #[error("fit failed: {message} ({diagnostics})")]
    Fit {
        message: String,
        diagnostics: String,
    },
    #[error("line {line}: {message}")]
    Data { line: usize, message: String },
}
