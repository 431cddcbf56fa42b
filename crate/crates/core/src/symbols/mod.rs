pub mod direct;
pub mod kinds;
pub mod phase;
pub mod separable;

pub use direct::{pseudo_product_direct, PairKernel};
pub use kinds::{eval_symbol, BilinearSymbolSpec, SymbolKind};
pub use phase::{eval_phase, ConjPair, Sign};
pub use separable::{pseudo_product_separable, Expansion, SeparableTerm};
