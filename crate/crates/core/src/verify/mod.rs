//! Measured constants for the inequalities and identities behind the
//! stability argument.

pub mod holder;
pub mod monitors;
pub mod nf;
pub mod report;
pub mod scans;

pub use report::{ScanBuilder, ScanPoint, ScanReport, Threshold};
pub use scans::{
    phase_bound_ratio, scan_phase_lower_bound, scan_symbol_derivative_bounds, symbol_bound_rhs,
    symbol_derivative, symbol_derivative_ratio, unoriented_angle, DerivativeLattice, ScanLattice,
};
pub use holder::{
    check_holder_pseudo_product, check_holder_reduction, check_lh_bound, check_prodform, holder_ratio,
    holder_trial_ratio, holder_weight, lh_ratio, lh_trial_ratio, prodform_ratio, prodform_trial_ratio, triad_matrix, trial_rng, LhSpec,
    TrialSetup, TriadSpec, DEFAULT_EXPONENTS,
};
pub use nf::{nf_residual, NfInput, NfObserver, NfReport, NfRow, NfSpec};
pub use monitors::{check_scattering, profile_difference, BootstrapObserver, BootstrapReport, BootstrapRow, ControlDsObserver, ControlDsReport, ControlDsRow, ScatterObserver, ScatterReport};
