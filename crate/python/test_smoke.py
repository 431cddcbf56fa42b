import math

import numpy as np
import pytest

import eplab


def bracket(v):
    return math.sqrt(1.0 + sum(x * x for x in v))


def test_phase_matches_brackets():
    xi, eta = [0.3, -1.2, 2.0], [4.0, 0.5, -0.7]
    s = [a + b for a, b in zip(xi, eta)]
    want = -bracket(s) + bracket(xi) - bracket(eta)
    assert eplab.phase("+-", xi, eta) == pytest.approx(want, rel=1e-14)


def test_normal_form_is_the_quotient():
    xi, eta = [1.0, 2.0, -0.5], [-3.0, 0.25, 1.5]
    m = eplab.symbol("mt", xi, eta)
    assert eplab.symbol("mt", xi, eta, "--") == pytest.approx(m / eplab.phase("--", xi, eta), rel=1e-14)


def test_swapped_symbol_is_the_transpose():
    xi, eta = [0.7, 0.0, 1.1], [2.0, -1.0, 0.3]
    assert eplab.symbol("mp_swapped", xi, eta) == eplab.symbol("mp", eta, xi)


def test_besov_norm_scales_linearly():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((8, 8, 8))
    a = eplab.besov_norm(x.ravel().tolist(), 8, 6.0, 1.0, 2.0, 2.0)
    b = eplab.besov_norm((3.0 * x).ravel().tolist(), 8, 6.0, 1.0, 2.0, 2.0)
    assert a > 0.0
    assert b == pytest.approx(3.0 * a, rel=1e-12)


def test_bad_input_raises():
    with pytest.raises(ValueError):
        eplab.symbol("nope", [0, 0, 0], [0, 0, 0])
    with pytest.raises(ValueError):
        eplab.besov_norm([0.0] * 7, 8, 1.0, 0.0, 2.0, 2.0)


def test_cli_help_exits_cleanly():
    assert eplab.main(["--help"]) == 0
