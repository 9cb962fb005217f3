//! Von Neumann dispersion analysis and the Feit-Fleck spectral method: autocorrelation,
//! windowed spectral density and eigenstate filtering with non-unitary gates.

mod autocorr;
mod density;
mod dispersion;
mod filter;

pub use autocorr::{autocorrelation_classical, autocorrelation_quantum, AUTOCORR_ANCILLA};
pub use density::{find_peaks, spectral_density, Peak, SpectralDensity, Window};
pub use dispersion::{dispersion, step_symbol, DispersionResult};
pub use filter::{
    feit_fleck_classical, feit_fleck_filter, success_probability_bound, FilterOutcome, FilterPlan,
    FilterStep, MeasurementMode, FILTER_ANCILLA, REALIZATION_ANCILLA,
};
