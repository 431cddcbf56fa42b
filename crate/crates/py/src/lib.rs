use eplab_core::spectral::{norm, Grid3, NormSpec, Representation, SpectralField};
use eplab_core::symbols::{eval_phase, eval_symbol, BilinearSymbolSpec, ConjPair, SymbolKind};
use eplab_core::EpError;
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: EpError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Bilinear symbol `m(ξ, η)`, divided by the phase `φ_ε` when `eps` is given.
#[pyfunction]
#[pyo3(signature = (kind, xi, eta, eps = None))]
fn symbol(kind: &str, xi: [f64; 3], eta: [f64; 3], eps: Option<&str>) -> PyResult<f64> {
    let kind: SymbolKind = kind.parse().map_err(err)?;
    let spec = match eps {
        Some(e) => BilinearSymbolSpec::normal_form(kind, e.parse::<ConjPair>().map_err(err)?),
        None => BilinearSymbolSpec::new(kind),
    };
    eval_symbol(&spec, xi, eta).map_err(err)
}

/// Phase `φ_ε(ξ, η)` for a pair such as `"+-"`.
#[pyfunction]
fn phase(eps: &str, xi: [f64; 3], eta: [f64; 3]) -> PyResult<f64> {
    let eps: ConjPair = eps.parse().map_err(err)?;
    Ok(eval_phase(eps, xi, eta))
}

/// Besov norm of real samples on an `n³` periodic grid, flattened in C order.
#[pyfunction]
fn besov_norm(values: Vec<f64>, n: usize, box_length: f64, sigma: f64, p: f64, q: f64) -> PyResult<f64> {
    let grid = Grid3::new(n, box_length).map_err(err)?;
    let data = values.into_iter().map(|v| Complex64::new(v, 0.0)).collect();
    let field = SpectralField::from_data(grid, data, Representation::Physical, true).map_err(err)?;
    norm(&field, NormSpec::Besov { sigma, p, q }).map_err(err)
}

/// Run the command-line interface with `args` (without the program name).
#[pyfunction]
fn main(args: Vec<String>) -> i32 {
    eplab_core::cli::main_with(std::iter::once("eplab".to_string()).chain(args))
}

#[pymodule]
fn eplab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(symbol, m)?)?;
    m.add_function(wrap_pyfunction!(phase, m)?)?;
    m.add_function(wrap_pyfunction!(besov_norm, m)?)?;
    m.add_function(wrap_pyfunction!(main, m)?)?;
    Ok(())
}
