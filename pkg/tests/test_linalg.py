import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ostbc_relay.errors import NotHermitian, Singular
from ostbc_relay.linalg import (
    dft_unitary,
    frobenius_norm,
    herm,
    herm_inv_sqrt,
    inverse,
    kron,
    solve,
    trace,
    transpose,
    unvec,
    vec,
)

from strategies import complex_matrices


@st.composite
def _abcd(draw):
    m, n, p, q, r, s = (draw(st.integers(1, 3)) for _ in range(6))
    return (draw(complex_matrices(m, n)), draw(complex_matrices(p, q)),
            draw(complex_matrices(n, r)), draw(complex_matrices(q, s)))


@given(_abcd())
def test_kron_mixed_product(mats):
    a, b, c, d = mats
    np.testing.assert_allclose(kron(a, b) @ kron(c, d), kron(a @ c, b @ d), atol=1e-9)


@given(complex_matrices(2, 3), complex_matrices(3, 2))
def test_kron_matches_numpy(a, b):
    np.testing.assert_allclose(kron(a, b), np.kron(a, b))


def test_kron_batched():
    rng = np.random.default_rng(0)
    a, b = rng.standard_normal((5, 2, 3)), rng.standard_normal((5, 3, 2))
    out = kron(a, b)
    for i in range(5):
        np.testing.assert_allclose(out[i], np.kron(a[i], b[i]))


@given(st.data())
def test_vec_identity(data):
    r, k, m, c = (data.draw(st.integers(1, 3)) for _ in range(4))
    a, x, b = data.draw(complex_matrices(r, k)), data.draw(complex_matrices(k, m)), data.draw(complex_matrices(m, c))
    np.testing.assert_allclose(vec(a @ x @ b), kron(transpose(b), a) @ vec(x), atol=1e-8)


@given(complex_matrices(3, 2))
def test_unvec_roundtrip(a):
    np.testing.assert_array_equal(unvec(vec(a), 3, 2), a)
    assert vec(a).shape == (6, 1)
    np.testing.assert_array_equal(vec(a)[:3, 0], a[:, 0])


def test_herm_and_transpose():
    a = np.array([[1 + 2j, 3], [4j, 5 - 1j]])
    np.testing.assert_array_equal(herm(a), a.conj().T)
    np.testing.assert_array_equal(transpose(a), a.T)
    assert trace(a) == 6 + 1j
    assert np.isclose(frobenius_norm(a), np.linalg.norm(a))


@settings(max_examples=50)
@given(complex_matrices(3, 3))
def test_herm_inv_sqrt_whitens(h):
    k = h @ herm(h) + np.eye(3)
    w = herm_inv_sqrt(k)
    np.testing.assert_allclose(w @ k @ w, np.eye(3), atol=1e-8)
    np.testing.assert_allclose(w, herm(w), atol=1e-12)


def test_herm_inv_sqrt_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        herm_inv_sqrt(np.array([[1.0, 1.0], [0.0, 1.0]]))


def test_herm_inv_sqrt_clamps_singular():
    w = herm_inv_sqrt(np.zeros((2, 2)))
    assert np.all(np.isfinite(w))


def test_inverse_and_solve():
    a = np.array([[2.0, 1j], [-1j, 3.0]])
    np.testing.assert_allclose(inverse(a) @ a, np.eye(2), atol=1e-14)
    b = np.array([[1.0], [2.0]])
    np.testing.assert_allclose(a @ solve(a, b), b, atol=1e-14)
    with pytest.raises(Singular):
        inverse(np.array([[1.0, 2.0], [2.0, 4.0]]))
    with pytest.raises(Singular):
        solve(np.zeros((2, 2)), b)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 8])
def test_dft_unitary(n):
    f = dft_unitary(n)
    np.testing.assert_allclose(f @ herm(f), np.eye(n), atol=1e-14)
