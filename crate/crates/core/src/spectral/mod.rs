pub mod fft;
pub mod field;
pub mod grid;
pub mod littlewood_paley;
pub mod multiplier;
pub mod norms;
pub mod snapshot;

pub use field::{Representation, SpectralField};
pub use grid::Grid3;
pub use littlewood_paley::{cutoff_chi, lp_project, Band, ShellLadder};
pub use multiplier::{apply_multiplier, Multiplier};
pub use norms::{norm, NormSpec};
