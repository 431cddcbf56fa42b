//! Free Klein–Gordon propagation on ℝ³ for radial data, and decay fits.

pub mod bulk;
pub mod fit;
pub mod profile;
pub mod quadrature;
pub mod reports;

pub use bulk::{
    radial_besov_norm, radial_l2_plancherel, radial_lp_norm, radial_samples, radial_shells, RadialQuantity,
    RadialSamples, MIN_SHELL,
};
pub use fit::{fit_decay_exponent, fit_power_law, least_squares, log_spaced_times, FitResult, MIN_FIT_SAMPLES};
pub use profile::RadialProfile;
pub use quadrature::{kg_propagate_radial, RADIAL_CONSTANT};
pub use reports::{charge_l1, lindecay, verify_bdchi, BdChiForm, BdChiReport, BdChiRow, BdChiSup, LinDecayReport};
