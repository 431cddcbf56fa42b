//! Pseudo-products written as sums of `outer(left f · right g)`.

use num_complex::Complex64;

use super::kinds::SymbolKind;
use crate::error::Result;
use crate::spectral::field::{Representation, SpectralField};
use crate::spectral::grid::add3;
use crate::spectral::multiplier::{apply_in_place, Multiplier};

#[derive(Debug, Clone)]
pub struct SeparableTerm {
    pub coeff: Complex64,
    pub outer: Multiplier,
    pub left: Multiplier,
    pub right: Multiplier,
}

/// Symbol `Σ coeff · outer(ξ₁+ξ₂) · left(ξ₁) · right(ξ₂)`.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub name: String,
    pub terms: Vec<SeparableTerm>,
}

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// `ξ_j/|ξ|` (equal to `-i R_j`), zero at the origin.
fn direction(j: usize) -> Multiplier {
    Multiplier::riesz(j).scaled(-I)
}

/// `ξ_j ξ_k/|ξ|`, zero at the origin.
fn quadratic_over_abs(j: usize, k: usize) -> Multiplier {
    Multiplier::new(format!("xi{j}xi{k}/|xi|"), false, move |xi| {
        let a = crate::spectral::grid::norm3(xi);
        if a == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(xi[j] * xi[k] / a, 0.0)
        }
    })
}

impl Expansion {
    /// `(Id, Id, Id)`, the plain product.
    pub fn trivial() -> Self {
        let id = Multiplier::identity();
        Expansion {
            name: "one".into(),
            terms: vec![SeparableTerm { coeff: ONE, outer: id.clone(), left: id.clone(), right: id }],
        }
    }

    /// `Σ_j R_j⟨∇⟩[(|∇|/⟨∇⟩)f · R_j g]`, whose symbol is `-m_p`; the
    /// coefficient `-1` makes the expansion equal to `m_p` itself.
    pub fn mp() -> Self {
        Self::mp_oriented(false)
    }

    pub fn mp_swapped() -> Self {
        Self::mp_oriented(true)
    }

    fn mp_oriented(swapped: bool) -> Self {
        let lift = Multiplier::abs_over_bracket();
        let terms = (0..3)
            .map(|j| {
                let rj = Multiplier::riesz(j);
                let (left, right) =
                    if swapped { (rj.clone(), lift.clone()) } else { (lift.clone(), rj.clone()) };
                SeparableTerm {
                    coeff: -ONE,
                    outer: Multiplier::bracket().then(&rj),
                    left,
                    right,
                }
            })
            .collect();
        Expansion { name: if swapped { "mp_swapped" } else { "mp" }.into(), terms }
    }

    /// Nine-term expansion of `m_t`:
    /// `Σ_{j,k} ((ξ₁+ξ₂)_j/|ξ₁+ξ₂|)(ξ₁ⱼξ₁ₖ/|ξ₁|)(ξ₂ₖ/|ξ₂|)`.
    pub fn mt() -> Self {
        Self::mt_oriented(false)
    }

    pub fn mt_swapped() -> Self {
        Self::mt_oriented(true)
    }

    fn mt_oriented(swapped: bool) -> Self {
        let dirs: Vec<Multiplier> = (0..3).map(direction).collect();
        let mut terms = Vec::with_capacity(9);
        for j in 0..3 {
            for k in 0..3 {
                let q = quadratic_over_abs(j, k);
                let (left, right) =
                    if swapped { (dirs[k].clone(), q) } else { (q, dirs[k].clone()) };
                terms.push(SeparableTerm { coeff: ONE, outer: dirs[j].clone(), left, right });
            }
        }
        Expansion { name: if swapped { "mt_swapped" } else { "mt" }.into(), terms }
    }

    pub fn for_kind(kind: &SymbolKind) -> Option<Self> {
        match kind {
            SymbolKind::Mp => Some(Self::mp()),
            SymbolKind::Mt => Some(Self::mt()),
            SymbolKind::MpSwapped => Some(Self::mp_swapped()),
            SymbolKind::MtSwapped => Some(Self::mt_swapped()),
            SymbolKind::One => Some(Self::trivial()),
            SymbolKind::Custom { .. } => None,
        }
    }

    pub fn scaled(mut self, c: Complex64) -> Self {
        for t in &mut self.terms {
            t.coeff *= c;
        }
        self
    }

    /// Assembled symbol value at `(ξ₁, ξ₂)`.
    pub fn symbol(&self, xi1: [f64; 3], xi2: [f64; 3]) -> Complex64 {
        let xi3 = add3(xi1, xi2);
        self.terms
            .iter()
            .map(|t| t.coeff * t.outer.eval(xi3) * t.left.eval(xi1) * t.right.eval(xi2))
            .sum()
    }
}

fn transformed(
    input: &SpectralField,
    m: &Multiplier,
    cache: &mut Vec<(Multiplier, SpectralField)>,
) -> Result<usize> {
    if let Some(pos) = cache.iter().position(|(k, _)| k.same_as(m)) {
        return Ok(pos);
    }
    let mut x = input.dealias();
    apply_in_place(&mut x, m)?;
    let x = x.dealias().into_physical();
    cache.push((m.clone(), x));
    Ok(cache.len() - 1)
}

/// `Σ coeff · outer(D[D(left f) · D(right g)])` with `D` the 2/3-rule mask.
///
/// Terms sharing an outer multiplier are summed in physical space before a
/// single forward transform.
pub fn pseudo_product_separable(
    expansion: &Expansion,
    f: &SpectralField,
    g: &SpectralField,
) -> Result<SpectralField> {
    let grid = f.grid();
    grid.check_same(&g.grid())?;
    let same_input = std::ptr::eq(f, g);
    let f = f.to_frequency();
    let g = if same_input { f.clone() } else { g.to_frequency() };
    let mut lcache = Vec::new();
    let mut rcache = Vec::new();
    let mut groups: Vec<(Multiplier, Vec<Complex64>)> = Vec::new();
    for term in &expansion.terms {
        let li = transformed(&f, &term.left, &mut lcache)?;
        let ri = if same_input {
            transformed(&f, &term.right, &mut lcache)?
        } else {
            transformed(&g, &term.right, &mut rcache)?
        };
        let gi = match groups.iter().position(|(m, _)| m.same_as(&term.outer)) {
            Some(p) => p,
            None => {
                groups.push((term.outer.clone(), vec![Complex64::new(0.0, 0.0); grid.len()]));
                groups.len() - 1
            }
        };
        let acc = &mut groups[gi].1;
        let l = lcache[li].1.data();
        let r = if same_input { lcache[ri].1.data() } else { rcache[ri].1.data() };
        let c = term.coeff;
        for i in 0..acc.len() {
            acc[i] += c * l[i] * r[i];
        }
    }
    let mut out = SpectralField::zeros(grid, Representation::Frequency);
    out.set_real(false);
    for (outer, acc) in groups {
        let mut p = SpectralField::from_data(grid, acc, Representation::Physical, false)?.dealias();
        apply_in_place(&mut p, &outer)?;
        out.axpy(ONE, &p);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::grid::Grid3;
    use crate::symbols::kinds::{eval_base, SymbolKind};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn assembled_symbols_match_closed_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let kinds = [SymbolKind::Mp, SymbolKind::Mt, SymbolKind::MpSwapped, SymbolKind::MtSwapped];
        for _ in 0..200 {
            let xi1: [f64; 3] = std::array::from_fn(|_| rng.random_range(-3.0..3.0));
            let xi2: [f64; 3] = std::array::from_fn(|_| rng.random_range(-3.0..3.0));
            for k in &kinds {
                let e = Expansion::for_kind(k).unwrap().symbol(xi1, xi2);
                let m = eval_base(k, xi1, xi2).unwrap();
                assert!((e.re - m).abs() < 1e-12 * (1.0 + m.abs()), "{k:?}");
                assert!(e.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn trivial_expansion_is_product() {
        let g = Grid3::new(16, 4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let a = SpectralField::random_complex(g, 2, &mut rng);
        let b = SpectralField::random_complex(g, 2, &mut rng);
        let t = pseudo_product_separable(&Expansion::trivial(), &a, &b).unwrap();
        let p = a.pointwise_mul(&b).unwrap();
        assert!(t.relative_distance(&p) < 1e-12);
    }
}
