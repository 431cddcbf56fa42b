use std::fmt;
use std::str::FromStr;

use crate::error::EpError;
use crate::spectral::grid::{add3, bracket};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Conjugation pattern `ε = (ε₁, ε₂)`: a minus sign feeds the conjugate of
/// the corresponding input into the bilinear form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ConjPair(pub Sign, pub Sign);

impl ConjPair {
    pub const PP: ConjPair = ConjPair(Sign::Plus, Sign::Plus);
    pub const PM: ConjPair = ConjPair(Sign::Plus, Sign::Minus);
    pub const MP: ConjPair = ConjPair(Sign::Minus, Sign::Plus);
    pub const MM: ConjPair = ConjPair(Sign::Minus, Sign::Minus);
    pub const ALL: [ConjPair; 4] = [Self::PP, Self::PM, Self::MP, Self::MM];

    pub fn label(&self) -> String {
        format!("{}{}", self.0.symbol(), self.1.symbol())
    }
}

impl fmt::Display for ConjPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for ConjPair {
    type Err = EpError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let sign = |c| match c {
            '+' | 'p' => Ok(Sign::Plus),
            '-' | 'm' => Ok(Sign::Minus),
            _ => Err(EpError::Config(format!("bad conjugation pair `{s}`"))),
        };
        let cs: Vec<char> = s.trim().chars().collect();
        if cs.len() != 2 {
            return Err(EpError::Config(format!("bad conjugation pair `{s}`")));
        }
        Ok(ConjPair(sign(cs[0])?, sign(cs[1])?))
    }
}

/// `φ_ε(ξ₁,ξ₂) = −⟨ξ₁+ξ₂⟩ + ε₁⟨ξ₁⟩ + ε₂⟨ξ₂⟩`
#[inline]
pub fn eval_phase(eps: ConjPair, xi1: [f64; 3], xi2: [f64; 3]) -> f64 {
    -bracket(add3(xi1, xi2)) + eps.0.value() * bracket(xi1) + eps.1.value() * bracket(xi2)
}
