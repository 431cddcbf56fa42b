//! Pointwise scans of the phase lower bound and of the symbol-derivative bounds.

use std::f64::consts::PI;

use super::report::{ScanBuilder, ScanPoint, ScanReport, Threshold};
use crate::error::{EpError, Result};
use crate::spectral::grid::{bracket_scalar, dot3, norm3, scale3, sub3};
use crate::symbols::{eval_phase, eval_symbol, BilinearSymbolSpec, ConjPair, SymbolKind};

/// Generic orthonormal pair spanning the scan plane.
const E1: [f64; 3] = [1.0 / 3.0, 2.0 / 3.0, 2.0 / 3.0];
const E2: [f64; 3] = [2.0 / 3.0, 1.0 / 3.0, -2.0 / 3.0];

/// Unoriented angle `min(∠(a,b), π - ∠(a,b))`, zero when either vector vanishes.
pub fn unoriented_angle(a: [f64; 3], b: [f64; 3]) -> f64 {
    let (na, nb) = (norm3(a), norm3(b));
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let c = (dot3(a, b) / (na * nb)).clamp(-1.0, 1.0);
    let ang = c.acos();
    ang.min(PI - ang)
}

/// `(H, L)` over `|ξ₁|, |ξ₂|, |ξ₁+ξ₂|`.
fn high_low(xi1: [f64; 3], xi2: [f64; 3]) -> (f64, f64) {
    let xi = [xi1[0] + xi2[0], xi1[1] + xi2[1], xi1[2] + xi2[2]];
    let m = [norm3(xi1), norm3(xi2), norm3(xi)];
    (m.iter().cloned().fold(0.0, f64::max), m.iter().cloned().fold(f64::INFINITY, f64::min))
}

/// `|φ_ε(ξ₁,ξ₂)| / (⟨L⟩[θ² + ⟨L⟩⁻²])` with `θ = ∠(ξ₁+ξ₂, ξ₂)`.
pub fn phase_bound_ratio(eps: ConjPair, xi1: [f64; 3], xi2: [f64; 3]) -> f64 {
    let xi = [xi1[0] + xi2[0], xi1[1] + xi2[1], xi1[2] + xi2[2]];
    let theta = unoriented_angle(xi, xi2);
    let (_, l) = high_low(xi1, xi2);
    let bl = bracket_scalar(l);
    eval_phase(eps, xi1, xi2).abs() / (bl * (theta * theta + 1.0 / (bl * bl)))
}

/// Magnitudes and angles of a scan lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanLattice {
    /// Exponents `j` of the magnitudes `2^j`.
    pub min_exp: i32,
    pub max_exp: i32,
    /// Magnitudes per octave.
    pub per_octave: usize,
    /// Angles in `[0, π]`, endpoints included.
    pub angles: usize,
}

impl Default for ScanLattice {
    fn default() -> Self {
        ScanLattice { min_exp: -6, max_exp: 8, per_octave: 2, angles: 65 }
    }
}

impl ScanLattice {
    pub fn magnitudes(&self) -> Vec<f64> {
        let steps = (self.max_exp - self.min_exp) as usize * self.per_octave.max(1);
        (0..=steps)
            .map(|i| 2f64.powf(self.min_exp as f64 + i as f64 / self.per_octave.max(1) as f64))
            .collect()
    }

    pub fn angle_values(&self) -> Vec<f64> {
        let n = self.angles.max(2);
        (0..n).map(|i| PI * i as f64 / (n - 1) as f64).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.max_exp < self.min_exp || self.angles < 2 || self.per_octave == 0 {
            return Err(EpError::Precondition(format!("degenerate scan lattice {self:?}")));
        }
        Ok(())
    }
}

/// `(ξ, η)` with `|ξ| = a`, `|η| = b` and oriented angle `t` between them.
fn lattice_pair(a: f64, b: f64, t: f64) -> ([f64; 3], [f64; 3]) {
    let xi = scale3(a, E1);
    let eta = [
        b * (t.cos() * E1[0] + t.sin() * E2[0]),
        b * (t.cos() * E1[1] + t.sin() * E2[1]),
        b * (t.cos() * E1[2] + t.sin() * E2[2]),
    ];
    (xi, eta)
}

fn vec6(a: [f64; 3], b: [f64; 3]) -> Vec<f64> {
    vec![a[0], a[1], a[2], b[0], b[1], b[2]]
}

/// Minimum over the lattice of [`phase_bound_ratio`]; the argmin stores `(ξ₁, ξ₂)`.
pub fn scan_phase_lower_bound(eps: ConjPair, lattice: &ScanLattice, threshold: f64) -> Result<ScanReport> {
    lattice.validate()?;
    let mut b = ScanBuilder::new(format!("phase_ratio{eps}"));
    let mags = lattice.magnitudes();
    for &a in &mags {
        for &c in &mags {
            for t in lattice.angle_values() {
                let (xi, eta) = lattice_pair(a, c, t);
                let xi1 = sub3(xi, eta);
                let r = phase_bound_ratio(eps, xi1, eta);
                b.observe(r, || ScanPoint::new("xi1,xi2", vec6(xi1, eta)));
            }
        }
    }
    Ok(b.finish(Threshold::AtLeast(threshold)))
}

/// One-dimensional central stencils of second order, `(offset, weight)`.
fn stencil(order: u32) -> &'static [(i32, f64)] {
    match order {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        4 => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
        _ => &[],
    }
}

pub const MAX_DERIVATIVE_ORDER: u32 = 4;

/// `F(ξ, η) = (m/φ_ε)(ξ - η, η)`.
fn nf_symbol(kind: &SymbolKind, eps: ConjPair, xi: [f64; 3], eta: [f64; 3]) -> Result<f64> {
    eval_symbol(&BilinearSymbolSpec::normal_form(kind.clone(), eps), sub3(xi, eta), eta)
}

fn difference_quotient(
    kind: &SymbolKind,
    eps: ConjPair,
    xi: [f64; 3],
    eta: [f64; 3],
    orders: [u32; 6],
    h: [f64; 2],
) -> Result<(f64, f64)> {
    // tensor product of 1D stencils over the six coordinates
    let mut terms: Vec<([f64; 6], f64)> = vec![([xi[0], xi[1], xi[2], eta[0], eta[1], eta[2]], 1.0)];
    for (axis, &k) in orders.iter().enumerate() {
        if k == 0 {
            continue;
        }
        let st = stencil(k);
        let mut next = Vec::with_capacity(terms.len() * st.len());
        for (x, w) in &terms {
            for &(off, sw) in st {
                let mut y = *x;
                y[axis] += off as f64 * h[axis / 3];
                next.push((y, w * sw));
            }
        }
        terms = next;
    }
    let (a, b): (u32, u32) = (orders[..3].iter().sum(), orders[3..].iter().sum());
    let (mut acc, mut mag) = (0.0, 0.0);
    for (x, w) in terms {
        let v = w * nf_symbol(kind, eps, [x[0], x[1], x[2]], [x[3], x[4], x[5]])?;
        acc += v;
        mag += v.abs();
    }
    let denom = h[0].powi(a as i32) * h[1].powi(b as i32);
    Ok((acc / denom, f64::EPSILON * mag / denom))
}

/// Right side of the derivative bound for `∂^α_ξ ∂^β_η (m/φ_ε)`.
pub fn symbol_bound_rhs(xi: [f64; 3], eta: [f64; 3], a: u32, b: u32) -> f64 {
    let (hh, l) = high_low(sub3(xi, eta), eta);
    let decay = norm3(xi).powi(-(a as i32)) * norm3(eta).powi(-(b as i32));
    if l >= 1.0 {
        let theta = unoriented_angle(xi, eta);
        hh / l * (theta + 1.0 / l).powi(-((a + b + 2) as i32)) * decay
    } else {
        hh * decay
    }
}

/// Lengths on which `m/φ_ε` may vary in `ξ` (with `η` fixed) and in `η`.
fn local_scales(xi: [f64; 3], eta: [f64; 3]) -> [f64; 2] {
    let (_, l) = high_low(sub3(xi, eta), eta);
    let d = norm3(sub3(xi, eta));
    let angular = if l >= 1.0 { (unoriented_angle(xi, eta) + 1.0 / l).min(1.0) } else { 1.0 };
    [norm3(xi).min(d) * angular, norm3(eta).min(d) * angular]
}

/// Step ladder `h₀·2^j`: halving first, then enlarging when round-off
/// dominates the smallest steps.
const LADDER_DOWN: i32 = 3;
const LADDER_UP: i32 = 6;

/// `∂^α_ξ ∂^β_η (m/φ_ε)(ξ-η, η)` by central differences from `h₀ = 1e-3`·local
/// scale, taken separately for the `ξ` and `η` coordinates. A quotient is accepted when it agrees with the one at the next
/// smaller step to 10% (differences below `floor` count as agreement); steps
/// `h₀/2, h₀/4, h₀/8` are tried first, then `2h₀ … 64h₀`.
pub fn symbol_derivative(
    kind: &SymbolKind,
    eps: ConjPair,
    xi: [f64; 3],
    eta: [f64; 3],
    alpha: [u32; 3],
    beta: [u32; 3],
    floor: f64,
) -> Result<f64> {
    let orders = [alpha[0], alpha[1], alpha[2], beta[0], beta[1], beta[2]];
    if orders.iter().sum::<u32>() > MAX_DERIVATIVE_ORDER {
        return Err(EpError::Precondition(format!("derivative order above {MAX_DERIVATIVE_ORDER}")));
    }
    if orders.iter().all(|&k| k == 0) {
        return nf_symbol(kind, eps, xi, eta);
    }
    let [sx, se] = local_scales(xi, eta);
    let quotient = |j: i32| {
        let f = 1e-3 * 2f64.powi(j);
        difference_quotient(kind, eps, xi, eta, orders, [f * sx, f * se])
    };
    // round-off of each quotient is estimated from the stencil magnitudes
    let agree = |(c, nc): (f64, f64), (f, nf): (f64, f64)| {
        (c - f).abs() <= 0.1 * c.abs().max(f.abs()) + floor + 10.0 * (nc + nf)
    };
    let mut coarse = quotient(0)?;
    let base = coarse;
    for j in 1..=LADDER_DOWN {
        let fine = quotient(-j)?;
        if agree(coarse, fine) {
            return Ok(fine.0);
        }
        coarse = fine;
    }
    let mut fine = base;
    for j in 1..=LADDER_UP {
        let coarse = quotient(j)?;
        if agree(coarse, fine) {
            return Ok(fine.0);
        }
        fine = coarse;
    }
    Err(EpError::FiniteDifference(format!(
        "step halving disagrees at ξ={xi:?}, η={eta:?}, α={alpha:?}, β={beta:?}"
    )))
}

/// `|∂^α_ξ ∂^β_η (m/φ_ε)| / rhs` at one point.
pub fn symbol_derivative_ratio(
    kind: &SymbolKind,
    eps: ConjPair,
    xi: [f64; 3],
    eta: [f64; 3],
    alpha: [u32; 3],
    beta: [u32; 3],
) -> Result<f64> {
    let rhs = symbol_bound_rhs(xi, eta, alpha.iter().sum(), beta.iter().sum());
    // quotients closer than 1% of the bound cannot move the ratio meaningfully
    let d = symbol_derivative(kind, eps, xi, eta, alpha, beta, 1e-2 * rhs)?;
    Ok(d.abs() / rhs)
}

fn multi_indices_up_to(order: u32) -> Vec<[u32; 6]> {
    let mut out = Vec::new();
    let mut cur = [0u32; 6];
    fn rec(pos: usize, left: u32, cur: &mut [u32; 6], out: &mut Vec<[u32; 6]>) {
        if pos == 6 {
            out.push(*cur);
            return;
        }
        for k in 0..=left {
            cur[pos] = k;
            rec(pos + 1, left - k, cur, out);
        }
        cur[pos] = 0;
    }
    rec(0, order, &mut cur, &mut out);
    out
}

/// Sample lattice for the derivative scan: fewer magnitudes and interior angles.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeLattice {
    pub min_exp: i32,
    pub max_exp: i32,
    /// Angles `π(j + 1/2)/angles`, `j < angles`.
    pub angles: usize,
    /// Skip points where `|ξ - η|` falls below `margin·max(|ξ|, |η|)`.
    pub margin: f64,
}

impl Default for DerivativeLattice {
    fn default() -> Self {
        DerivativeLattice { min_exp: -4, max_exp: 6, angles: 12, margin: 1e-2 }
    }
}

/// Maximum over lattice points and multi-indices `|α|+|β| ≤ max_order` of
/// [`symbol_derivative_ratio`]. The argmax stores `(ξ, η, α, β)`.
pub fn scan_symbol_derivative_bounds(
    kind: &SymbolKind,
    eps: ConjPair,
    max_order: u32,
    lattice: &DerivativeLattice,
    threshold: f64,
) -> Result<ScanReport> {
    if max_order > MAX_DERIVATIVE_ORDER {
        return Err(EpError::Precondition(format!("max order {max_order} above {MAX_DERIVATIVE_ORDER}")));
    }
    let mut b = ScanBuilder::new(format!("dsym_ratio[{}/phi{eps}]", kind.name()));
    let idx = multi_indices_up_to(max_order);
    for ja in lattice.min_exp..=lattice.max_exp {
        for jb in lattice.min_exp..=lattice.max_exp {
            let (a, c) = (2f64.powi(ja), 2f64.powi(jb));
            for j in 0..lattice.angles {
                let t = PI * (j as f64 + 0.5) / lattice.angles as f64;
                let (xi, eta) = lattice_pair(a, c, t);
                let d = norm3(sub3(xi, eta));
                // the bound is claimed only once |ξ-η| ≥ min(|ξ|,|η|)/2, which
                // the change of variables (ξ,η) → (ξ,ξ-η) always arranges
                if d < lattice.margin * a.max(c) || d < 0.5 * a.min(c) {
                    continue;
                }
                for o in &idx {
                    let (al, be) = ([o[0], o[1], o[2]], [o[3], o[4], o[5]]);
                    // unresolved quotients are kept as non-finite samples, which fail the scan
                    let r = match symbol_derivative_ratio(kind, eps, xi, eta, al, be) {
                        Err(EpError::FiniteDifference(_)) => f64::NAN,
                        other => other?,
                    };
                    b.observe(r, || {
                        let mut c = vec6(xi, eta);
                        c.extend(o.iter().map(|&k| k as f64));
                        ScanPoint::new("xi,eta,alpha,beta", c)
                    });
                }
            }
        }
    }
    Ok(b.finish(Threshold::AtMost(threshold)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_ratio_on_the_axis() {
        let xi = [10.0, 0.0, 0.0];
        let r = phase_bound_ratio(ConjPair::PP, xi, xi);
        let phi = eval_phase(ConjPair::PP, xi, xi);
        assert!((phi - 0.0747668).abs() < 1e-7, "{phi}");
        assert!((r - phi * 101f64.sqrt()).abs() < 1e-14);
        assert!((r - 0.7514).abs() < 1e-3);
    }

    #[test]
    fn angle_is_unoriented() {
        let a = [1.0, 0.0, 0.0];
        assert_eq!(unoriented_angle(a, [-2.0, 0.0, 0.0]), 0.0);
        assert!((unoriented_angle(a, [0.0, 3.0, 0.0]) - PI / 2.0).abs() < 1e-15);
        assert_eq!(unoriented_angle(a, [0.0; 3]), 0.0);
    }

    #[test]
    fn stencils_differentiate_polynomials() {
        // weights of order k annihilate lower powers and give k! on x^k
        for k in 1..=4u32 {
            let st = stencil(k);
            let fact: f64 = (1..=k).map(|i| i as f64).product();
            let got: f64 = st.iter().map(|&(o, w)| w * (o as f64).powi(k as i32)).sum();
            assert!((got - fact).abs() < 1e-12, "k={k}");
            for j in 0..k {
                let s: f64 = st.iter().map(|&(o, w)| w * (o as f64).powi(j as i32)).sum();
                assert!(s.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn multi_index_count() {
        // C(6 + k, 6) indices of total order ≤ k in six variables
        assert_eq!(multi_indices_up_to(0).len(), 1);
        assert_eq!(multi_indices_up_to(2).len(), 28);
        assert_eq!(multi_indices_up_to(4).len(), 210);
    }
}
