pub mod energy;
pub mod rhs;
pub mod run;
pub mod series;
pub mod split;
pub mod state;
pub mod step;

pub use energy::{energy_en, zprime_bound};
pub use rhs::{rhs_alpha, rhs_fluid, AlphaNonlinearity, FluidTendency};
pub use run::{run_experiment, wraparound_horizon, RecordedNorm, RunObserver, RunOutcome, RunSample, RunSpec};
pub use series::{DecaySeries, SeriesMeta};
pub use split::{beta_of, compute_charge, profile_of, BetaSplit};
pub use state::{from_alpha, init_perturbation, to_alpha, AlphaState, DataFamily, DataSpec, FluidState};
pub use step::{step, step_fluid, AlphaStepper, Scheme};
