import numpy as np
import pytest
import sympy
from hypothesis import assume, given, strategies as st

from tesserae.spectral import (
    IntPolynomial,
    PisotClass,
    ReducibleMatrixError,
    char_poly,
    classify_pisot,
    int_det,
    is_irreducible,
    is_primitive,
    minimal_factor,
    perron,
)
from oracles import spanning_exponent

matrices = st.integers(1, 5).flatmap(
    lambda m: st.lists(st.lists(st.integers(0, 4), min_size=m, max_size=m), min_size=m, max_size=m)
)


@given(matrices)
def test_char_poly_matches_sympy(rows):
    x = sympy.symbols("x")
    ref = sympy.Matrix(rows).charpoly(x).all_coeffs()
    assert list(char_poly(rows).coefficients) == [int(c) for c in ref]


@given(matrices)
def test_det_matches_sympy(rows):
    assert int_det(rows) == int(sympy.Matrix(rows).det())


@given(matrices)
def test_primitivity_matches_brute_force(rows):
    res = is_primitive(rows)
    n = spanning_exponent(rows)
    assert res.primitive == (n is not None)
    if n is not None:
        assert res.exponent == n


@given(matrices)
def test_perron_matches_numpy(rows):
    assume(is_irreducible(rows))
    A = np.array(rows, dtype=float)
    pd = perron(rows)
    ev = np.linalg.eigvals(A)
    assert pd.eigenvalue == pytest.approx(max(ev.real), rel=1e-8, abs=1e-9)
    left = np.array(pd.left_eigenvector)
    right = np.array(pd.right_eigenvector)
    assert np.all(left > 0) and np.all(right > 0)
    assert np.allclose(A @ right, pd.eigenvalue * right, atol=1e-8)
    assert np.allclose(A.T @ left, pd.eigenvalue * left, atol=1e-8)


def test_perron_refuses_reducible():
    with pytest.raises(ReducibleMatrixError):
        perron([[3, 0], [1, 1]])


@given(matrices)
def test_minimal_factor_matches_sympy(rows):
    assume(is_irreducible(rows))
    lam = perron(rows).eigenvalue
    p = char_poly(rows)
    f = minimal_factor(p, lam)
    x = sympy.symbols("x")
    factors = sympy.factor_list(sympy.Poly(list(p.coefficients), x))[1]
    vals = [abs(complex(sympy.Poly(g, x).eval(lam))) for g, _ in factors]
    want = factors[int(np.argmin(vals))][0]
    assert list(f.coefficients) == [int(c) for c in sympy.Poly(want, x).all_coeffs()]


def test_polynomial_printing_and_division():
    p = IntPolynomial((1, -1, 0, -1))
    assert str(p) == "x^3 - x^2 - 1"
    q, r = (IntPolynomial((1, -3, 1)) * IntPolynomial((1, -1))).divmod_monic(IntPolynomial((1, -1)))
    assert q.coefficients == (1, -3, 1) and r.coefficients == (0,)


def test_pisot_classes():
    assert classify_pisot([[1, 1], [1, 0]]).classification is PisotClass.PISOT
    rep = classify_pisot([[1, 1], [3, 0]])
    assert rep.classification is PisotClass.NON_PISOT
    assert rep.conjugate_moduli[0] == pytest.approx((np.sqrt(13) - 1) / 2)


def test_pisot_ignores_spurious_eigenvalues():
    # block-diagonal embedding adds an eigenvalue 2 outside the Perron factor
    M = [[1, 1, 0], [1, 0, 0], [0, 0, 2]]
    M[2][0] = 1
    M[0][2] = 1
    rep = classify_pisot(M)
    lam = perron(M).eigenvalue
    assert abs(rep.minimal_factor(lam)) < 1e-8


def test_fibonacci_dpv_spectrum_signs_and_moduli():
    from tesserae.combrule import fibonacci_dpv

    g = (1 + 5**0.5) / 2
    ev = np.sort(np.linalg.eigvals(fibonacci_dpv().substitution_matrix().to_numpy()).real)
    assert np.allclose(ev, [-1.0, -1.0, g**-2, g**2], atol=1e-8)
    assert np.allclose(np.sort(np.abs(ev)), np.sort([g**2, 1.0, 1.0, g**-2]), atol=1e-8)
