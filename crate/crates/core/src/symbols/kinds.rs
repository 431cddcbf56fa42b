use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::phase::{eval_phase, ConjPair};
use crate::error::{EpError, Result};
use crate::spectral::grid::{add3, bracket, dot3, norm3};

type CustomFn = dyn Fn([f64; 3], [f64; 3]) -> f64 + Send + Sync;

#[derive(Clone)]
pub enum SymbolKind {
    Mp,
    Mt,
    MpSwapped,
    MtSwapped,
    One,
    Custom { name: String, symbol: Arc<CustomFn> },
}

impl SymbolKind {
    pub fn custom(
        name: impl Into<String>,
        f: impl Fn([f64; 3], [f64; 3]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        SymbolKind::Custom { name: name.into(), symbol: Arc::new(f) }
    }

    pub fn name(&self) -> &str {
        match self {
            SymbolKind::Mp => "mp",
            SymbolKind::Mt => "mt",
            SymbolKind::MpSwapped => "mp_swapped",
            SymbolKind::MtSwapped => "mt_swapped",
            SymbolKind::One => "one",
            SymbolKind::Custom { name, .. } => name,
        }
    }
}

impl fmt::Debug for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl PartialEq for SymbolKind {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (SymbolKind::Custom { symbol: a, .. }, SymbolKind::Custom { symbol: b, .. }) => {
                Arc::ptr_eq(a, b)
            }
            (SymbolKind::Custom { .. }, _) | (_, SymbolKind::Custom { .. }) => false,
            _ => self.name() == other.name(),
        }
    }
}

impl FromStr for SymbolKind {
    type Err = EpError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "mp" => SymbolKind::Mp,
            "mt" => SymbolKind::Mt,
            "mp_swapped" => SymbolKind::MpSwapped,
            "mt_swapped" => SymbolKind::MtSwapped,
            "one" => SymbolKind::One,
            other => return Err(EpError::Config(format!("unknown symbol `{other}`"))),
        })
    }
}

/// A bilinear symbol, optionally divided by the phase `φ_ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct BilinearSymbolSpec {
    pub kind: SymbolKind,
    pub divisor: Option<ConjPair>,
}

impl BilinearSymbolSpec {
    pub fn new(kind: SymbolKind) -> Self {
        Self { kind, divisor: None }
    }

    pub fn normal_form(kind: SymbolKind, eps: ConjPair) -> Self {
        Self { kind, divisor: Some(eps) }
    }

    pub fn label(&self) -> String {
        match self.divisor {
            None => self.kind.name().to_string(),
            Some(e) => format!("{}/phi{}", self.kind.name(), e),
        }
    }
}

/// `m_p(ξ₁,ξ₂) = |ξ₁| ⟨ξ₁+ξ₂⟩/⟨ξ₁⟩ · ξ₂·(ξ₁+ξ₂)/(|ξ₂||ξ₁+ξ₂|)`, zero when `ξ₂`
/// or `ξ₁+ξ₂` vanishes.
pub fn m_p(xi1: [f64; 3], xi2: [f64; 3]) -> f64 {
    let xi3 = add3(xi1, xi2);
    let (a1, a2, a3) = (norm3(xi1), norm3(xi2), norm3(xi3));
    if a2 == 0.0 || a3 == 0.0 {
        return 0.0;
    }
    a1 * bracket(xi3) / bracket(xi1) * dot3(xi2, xi3) / (a2 * a3)
}

/// `m_t(ξ₁,ξ₂) = |ξ₁| cos∠(ξ₁,ξ₁+ξ₂) cos∠(ξ₁,ξ₂)`, zero when any of the three
/// vectors vanishes.
pub fn m_t(xi1: [f64; 3], xi2: [f64; 3]) -> f64 {
    let xi3 = add3(xi1, xi2);
    let (a1, a2, a3) = (norm3(xi1), norm3(xi2), norm3(xi3));
    if a1 == 0.0 || a2 == 0.0 || a3 == 0.0 {
        return 0.0;
    }
    a1 * (dot3(xi1, xi3) / (a1 * a3)) * (dot3(xi1, xi2) / (a1 * a2))
}

/// Undivided symbol value.
pub fn eval_base(kind: &SymbolKind, xi1: [f64; 3], xi2: [f64; 3]) -> Result<f64> {
    let v = match kind {
        SymbolKind::Mp => m_p(xi1, xi2),
        SymbolKind::Mt => m_t(xi1, xi2),
        SymbolKind::MpSwapped => m_p(xi2, xi1),
        SymbolKind::MtSwapped => m_t(xi2, xi1),
        SymbolKind::One => 1.0,
        SymbolKind::Custom { name, symbol } => {
            let v = symbol(xi1, xi2);
            if !v.is_finite() {
                return Err(EpError::DegenerateSymbol(format!(
                    "`{name}` at ξ₁={xi1:?}, ξ₂={xi2:?}"
                )));
            }
            v
        }
    };
    Ok(v)
}

pub fn eval_symbol(spec: &BilinearSymbolSpec, xi1: [f64; 3], xi2: [f64; 3]) -> Result<f64> {
    let m = eval_base(&spec.kind, xi1, xi2)?;
    match spec.divisor {
        None => Ok(m),
        Some(eps) => {
            let phi = eval_phase(eps, xi1, xi2);
            if phi == 0.0 || !phi.is_finite() {
                return Err(EpError::DegenerateSymbol(format!(
                    "phase φ{eps} vanishes at ξ₁={xi1:?}, ξ₂={xi2:?}"
                )));
            }
            Ok(m / phi)
        }
    }
}
