"""Pointwise exterior algebra on R^4 = C^2.

A 2-form is a 4x4 antisymmetric complex matrix A over the real coframe
(dRe x, dIm x, dRe y, dIm y), meaning sum_{a<b} A[a, b] e^a ^ e^b. The wedge
of two 2-forms is reported as the coefficient of e^0 ^ e^1 ^ e^2 ^ e^3.
"""

from __future__ import annotations

import itertools

import numpy as np

PAIRS = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))

DX = np.array([1, 1j, 0, 0], dtype=complex)
DY = np.array([0, 0, 1, 1j], dtype=complex)


def _levi_civita(n: int) -> np.ndarray:
    eps = np.zeros((n,) * n)
    for perm in itertools.permutations(range(n)):
        inversions = sum(perm[i] > perm[j] for i, j in itertools.combinations(range(n), 2))
        eps[perm] = -1.0 if inversions % 2 else 1.0
    return eps


EPS4 = _levi_civita(4)

# alpha ^ beta = a @ WEDGE_PAIRING @ b on coefficient 6-vectors
WEDGE_PAIRING = np.zeros((6, 6))
for _p, (_a, _b) in enumerate(PAIRS):
    for _q, (_c, _d) in enumerate(PAIRS):
        WEDGE_PAIRING[_p, _q] = EPS4[_a, _b, _c, _d]


def wedge11(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """u ^ v for two 1-forms."""
    return np.outer(u, v) - np.outer(v, u)


def wedge(a: np.ndarray, b: np.ndarray) -> complex:
    """Volume coefficient of a ^ b for two 2-forms."""
    return complex(to_vector(a) @ WEDGE_PAIRING @ to_vector(b))


def to_vector(form: np.ndarray) -> np.ndarray:
    return np.array([form[a, b] for a, b in PAIRS])


def from_vector(vec: np.ndarray) -> np.ndarray:
    out = np.zeros((4, 4), dtype=np.result_type(vec, float))
    for (a, b), v in zip(PAIRS, vec):
        out[a, b] = v
        out[b, a] = -v
    return out


def real_jacobian(cj: np.ndarray) -> np.ndarray:
    """Real Jacobian of a holomorphic map from its complex derivative matrix."""
    n, m = cj.shape
    out = np.zeros((2 * n, 2 * m))
    for i in range(n):
        for j in range(m):
            a, b = cj[i, j].real, cj[i, j].imag
            out[2 * i:2 * i + 2, 2 * j:2 * j + 2] = [[a, -b], [b, a]]
    return out


def pullback(form: np.ndarray, jac: np.ndarray) -> np.ndarray:
    return jac.T @ form @ jac


def hodge_star(form: np.ndarray, metric: np.ndarray) -> np.ndarray:
    """Hodge star for ``metric`` with orientation e^0 ^ e^1 ^ e^2 ^ e^3."""
    ginv = np.linalg.inv(metric)
    raised = ginv @ form @ ginv
    vol = np.sqrt(np.linalg.det(metric))
    return 0.5 * vol * np.einsum("ab,abcd->cd", raised, EPS4)


def form_inner_product(metric: np.ndarray) -> np.ndarray:
    """Gram matrix of the basis 2-forms e^a ^ e^b under ``metric``."""
    ginv = np.linalg.inv(metric)
    gram = np.zeros((6, 6))
    for p, (a, b) in enumerate(PAIRS):
        for q, (c, d) in enumerate(PAIRS):
            gram[p, q] = ginv[a, c] * ginv[b, d] - ginv[a, d] * ginv[b, c]
    return gram
