"""Local gluing charts near double curves and triple points, and pointwise
SU(2)-structure linear algebra.

Near a double curve the chart is (x, y) with y the fiber coordinate of the
normal bundle; near a triple point both coordinates are fiber-like. Gluing at
parameter zeta identifies (x, y) with h(x, y).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .forms import (
    DX,
    DY,
    WEDGE_PAIRING,
    form_inner_product,
    from_vector,
    hodge_star,
    pullback,
    real_jacobian,
    to_vector,
    wedge,
    wedge11,
)

SQRT3 = math.sqrt(3.0)


class DomainError(ValueError):
    pass


class DegenerateStructure(ValueError):
    pass


class NoConvergence(RuntimeError):
    pass


@dataclass(frozen=True)
class DoubleChart:
    pass


@dataclass(frozen=True)
class TripleChart:
    sigma: int = 1

    def __post_init__(self) -> None:
        if self.sigma not in (1, -1):
            raise ValueError("sigma must be +1 or -1")


ChartKind = Union[DoubleChart, TripleChart]


@dataclass(frozen=True)
class SU2AtPoint:
    psi: np.ndarray
    kappa: np.ndarray


def _require_nonzero(**values: complex) -> None:
    for name, v in values.items():
        if v == 0:
            raise DomainError(f"{name} must be nonzero")


def eval_h(kind: ChartKind, zeta: complex, x: complex, y: complex) -> tuple[complex, complex]:
    _require_nonzero(zeta=zeta, y=y)
    if isinstance(kind, TripleChart):
        _require_nonzero(x=x)
        return x, zeta / (x * y)
    return x, zeta / y


def h_jacobian(kind: ChartKind, zeta: complex, x: complex, y: complex) -> np.ndarray:
    """Complex derivative matrix of eval_h."""
    _require_nonzero(zeta=zeta, y=y)
    if isinstance(kind, TripleChart):
        _require_nonzero(x=x)
        return np.array([[1, 0], [-zeta / (x * x * y), -zeta / (x * y * y)]], dtype=complex)
    return np.array([[1, 0], [0, -zeta / (y * y)]], dtype=complex)


def eval_t(kind: ChartKind, x: complex, y: complex) -> float:
    _require_nonzero(y=y)
    if isinstance(kind, TripleChart):
        _require_nonzero(x=x)
        return -math.log(abs(x)) - 2.0 * math.log(abs(y))
    return -2.0 * math.log(abs(y))


def neck_half_length(zeta: complex) -> float:
    _require_nonzero(zeta=zeta)
    return -math.log(abs(zeta))


def eval_su2_double(x: complex, y: complex, eps: int) -> SU2AtPoint:
    _require_nonzero(y=y)
    psi = -eps * wedge11(DX, DY) / y
    kappa = 0.5j * (wedge11(DX, DX.conj()) + wedge11(DY, DY.conj()) / abs(y) ** 2)
    return SU2AtPoint(psi, kappa.real)


def _log_forms(x: complex, y: complex) -> tuple[np.ndarray, np.ndarray]:
    _require_nonzero(x=x, y=y)
    return DX / x, DY / y


def eval_su2_triple(x: complex, y: complex, sigma: int) -> SU2AtPoint:
    a, b = _log_forms(x, y)
    psi = -sigma * wedge11(a, b)
    s = a + b
    kappa = (1j / (2 * SQRT3)) * (
        wedge11(a, a.conj()) + wedge11(b, b.conj()) + wedge11(s, s.conj())
    )
    return SU2AtPoint(psi, kappa.real)


def omega_triple_from_neck(x: complex, y: complex, sigma: int) -> np.ndarray:
    """The Kaehler form near a triple point written through the neck coordinate t.

    (i/sqrt3) ((3/4) psi_D ^ conj(psi_D) + dt' ^ conj(dt')), with psi_D the
    residue form sigma dx/x and dt' = -dx/(2x) - dy/y the (1,0) part of dt.
    """
    a, b = _log_forms(x, y)
    psi_d = sigma * a
    dt = -0.5 * a - b
    form = (1j / SQRT3) * (0.75 * wedge11(psi_d, psi_d.conj()) + wedge11(dt, dt.conj()))
    return form.real


def _c3_indices(i: int) -> tuple[int, int]:
    if i not in (1, 2, 3):
        raise ValueError("i must be 1, 2 or 3")
    j, k = (n for n in (1, 2, 3) if n != i)
    return j, k


def _sign3(i: int, j: int, k: int) -> int:
    return {(1, 2, 3): 1, (2, 3, 1): 1, (3, 1, 2): 1}.get((i, j, k), -1)


def eval_c3_model(i: int, zeta: complex, uj: complex, uk: complex, sigma123: int) -> SU2AtPoint:
    """Structure on u1 u2 u3 = zeta in the chart (u^j, u^k) that omits u^i."""
    j, k = _c3_indices(i)
    _require_nonzero(zeta=zeta, uj=uj, uk=uk)
    eta_j, eta_k = DX / uj, DY / uk
    sigma_ijk = _sign3(i, j, k) * sigma123
    psi = -sigma_ijk * wedge11(eta_j, eta_k)
    s = eta_j + eta_k
    kappa = (1j / (2 * SQRT3)) * (
        wedge11(eta_j, eta_j.conj()) + wedge11(eta_k, eta_k.conj()) + wedge11(s, s.conj())
    )
    return SU2AtPoint(psi, kappa.real)


def c3_full_coordinates(i: int, zeta: complex, uj: complex, uk: complex) -> np.ndarray:
    j, k = _c3_indices(i)
    u = np.zeros(3, dtype=complex)
    u[j - 1], u[k - 1] = uj, uk
    u[i - 1] = zeta / (uj * uk)
    return u


def c3_embedding_jacobian(i: int, zeta: complex, uj: complex, uk: complex) -> np.ndarray:
    """Complex 3x2 derivative of (u^j, u^k) -> (u^1, u^2, u^3) on the fiber."""
    j, k = _c3_indices(i)
    u = c3_full_coordinates(i, zeta, uj, uk)
    jac = np.zeros((3, 2), dtype=complex)
    jac[j - 1, 0] = 1
    jac[k - 1, 1] = 1
    jac[i - 1] = [-u[i - 1] / uj, -u[i - 1] / uk]
    return jac


def c3_eta_pullbacks(i: int, zeta: complex, uj: complex, uk: complex) -> list[np.ndarray]:
    """eta^l = du^l / u^l restricted to the fiber, l = 1, 2, 3."""
    u = c3_full_coordinates(i, zeta, uj, uk)
    jac = real_jacobian(c3_embedding_jacobian(i, zeta, uj, uk))
    out = []
    for l in range(3):
        du = np.zeros(6, dtype=complex)
        du[2 * l], du[2 * l + 1] = 1, 1j
        out.append((jac.T @ du) / u[l])
    return out


def c3_transition(
    i: int, j: int, zeta: complex, a: complex, b: complex
) -> tuple[tuple[complex, complex], np.ndarray]:
    """Chart change from the chart omitting u^j to the chart omitting u^i.

    Returns the new coordinates and the complex 2x2 derivative.
    """
    u = c3_full_coordinates(j, zeta, a, b)
    dst = [n for n in (1, 2, 3) if n != i]
    emb = c3_embedding_jacobian(j, zeta, a, b)
    jac = np.array([emb[n - 1] for n in dst])
    return (u[dst[0] - 1], u[dst[1] - 1]), jac


def omega_c3_ambient(u: np.ndarray) -> np.ndarray:
    """(i/(2 sqrt3)) sum_l eta^l ^ conj(eta^l) on C^3 at u, as a 6x6 real form."""
    out = np.zeros((6, 6), dtype=complex)
    for l in range(3):
        eta = np.zeros(6, dtype=complex)
        eta[2 * l], eta[2 * l + 1] = 1 / u[l], 1j / u[l]
        out += wedge11(eta, eta.conj())
    return ((1j / (2 * SQRT3)) * out).real


def complex_structure_from(psi: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """The complex structure I with psi of type (2,0).

    Antiholomorphic vectors are exactly the kernel of v -> i_v psi.
    """
    _, s, vh = np.linalg.svd(psi)
    if s[0] == 0 or s[1] / s[0] < tol or s[2] / s[0] > tol:
        raise DegenerateStructure(f"kernel of psi is not 2-dimensional: singular values {s}")
    return _structure_from_kernel(vh[2:].conj().T)


def _structure_from_kernel(kernel: np.ndarray) -> np.ndarray:
    basis = np.hstack([kernel.conj(), kernel])
    eig = np.diag([1j, 1j, -1j, -1j])
    structure = basis @ eig @ np.linalg.inv(basis)
    return structure.real


def metric_from(structure: SU2AtPoint) -> np.ndarray:
    """g with g(I u, v) = kappa(u, v)."""
    i_mat = complex_structure_from(structure.psi)
    return -i_mat.T @ structure.kappa


def su2_residuals(structure: SU2AtPoint) -> dict[str, float]:
    """Scale-free residuals of the defining conditions; all vanish on SU(2)-structures."""
    psi, kappa = structure.psi, structure.kappa
    vol = wedge(psi, psi.conj())
    scale = abs(vol)
    if scale == 0:
        return {name: math.inf for name in ("psi^psi", "psi^psibar", "psi^kappa", "2kappa^2", "metric")}
    out = {
        "psi^psi": abs(wedge(psi, psi)) / scale,
        "psi^psibar": max(0.0, -vol.real) / scale + abs(vol.imag) / scale,
        "psi^kappa": abs(wedge(psi, kappa)) / scale,
        "2kappa^2": abs(2 * wedge(kappa, kappa) - vol) / scale,
    }
    try:
        g = metric_from(structure)
    except DegenerateStructure:
        out["metric"] = math.inf
        return out
    norm = np.linalg.norm(g)
    eigs = np.linalg.eigvalsh(0.5 * (g + g.T))
    out["metric"] = np.linalg.norm(g - g.T) / norm + max(0.0, -eigs[0] / eigs[-1])
    return out


def sd_asd_split(form: np.ndarray, structure: SU2AtPoint) -> tuple[np.ndarray, np.ndarray]:
    g = metric_from(structure)
    g = 0.5 * (g + g.T)
    star = hodge_star(form, g)
    return 0.5 * (form + star), 0.5 * (form - star)


def _pack(psi: np.ndarray, kappa: np.ndarray) -> np.ndarray:
    p = to_vector(psi)
    return np.concatenate([p.real, p.imag, to_vector(kappa).real])


def _unpack(x: np.ndarray) -> SU2AtPoint:
    return SU2AtPoint(from_vector(x[:6] + 1j * x[6:12]), from_vector(x[12:]))


def _constraints(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    u, v, k = x[:6], x[6:12], x[12:]
    P = WEDGE_PAIRING
    Pu, Pv, Pk = P @ u, P @ v, P @ k
    c = np.array([
        u @ Pu - v @ Pv,
        2 * u @ Pv,
        u @ Pk,
        v @ Pk,
        2 * k @ Pk - (u @ Pu + v @ Pv),
    ])
    z = np.zeros(6)
    jac = np.array([
        np.concatenate([2 * Pu, -2 * Pv, z]),
        np.concatenate([2 * Pv, 2 * Pu, z]),
        np.concatenate([Pk, z, Pu]),
        np.concatenate([z, Pk, Pv]),
        np.concatenate([-2 * Pu, -2 * Pv, 4 * Pk]),
    ])
    return c, jac


def _projection_weight(psi: np.ndarray, kappa: np.ndarray) -> np.ndarray:
    """Gram matrix of the metric of the input pair, or the flat one if it has none."""
    try:
        # near-kernel of psi, so the weight varies smoothly off the constraint set
        _, sv, vh = np.linalg.svd(psi)
        if sv[1] <= 1e-8 * sv[0]:
            raise DegenerateStructure("psi has rank below 2")
        g = -_structure_from_kernel(vh[2:].conj().T).T @ kappa
        g = 0.5 * (g + g.T)
        if np.linalg.eigvalsh(g)[0] <= 0:
            raise DegenerateStructure("indefinite metric")
        gram = form_inner_product(g)
    except (DegenerateStructure, np.linalg.LinAlgError):
        gram = np.eye(6)
    w = np.zeros((18, 18))
    for b in range(3):
        w[6 * b:6 * b + 6, 6 * b:6 * b + 6] = gram
    return w


def project_theta(
    psi_pert: np.ndarray,
    kappa_pert: np.ndarray,
    max_iter: int = 200,
    tol: float = 1e-10,
) -> SU2AtPoint:
    """Nearest SU(2)-structure to (psi_pert, kappa_pert).

    Distance is measured with the metric the input itself induces. Each
    iteration solves the linearized problem min |x - x0|_W subject to
    c(x_k) + J (x - x_k) = 0, so fixed points satisfy the orthogonality
    condition of a nearest point.
    """
    x0 = _pack(np.asarray(psi_pert, dtype=complex), np.asarray(kappa_pert).real)
    w = _projection_weight(np.asarray(psi_pert, dtype=complex), np.asarray(kappa_pert).real)
    w_inv = np.linalg.inv(w)
    x = x0.copy()

    def residual(z: np.ndarray) -> float:
        c, _ = _constraints(z)
        u, v = z[:6], z[6:12]
        scale = max(abs(u @ WEDGE_PAIRING @ u + v @ WEDGE_PAIRING @ v), 1e-300)
        return float(np.max(np.abs(c)) / scale)

    res = residual(x)
    for _ in range(max_iter):
        c, jac = _constraints(x)
        rhs = c + jac @ (x0 - x)
        lam = np.linalg.solve(jac @ w_inv @ jac.T, rhs)
        target = x0 - w_inv @ jac.T @ lam
        step = target - x
        damping = 1.0
        new = x + step
        new_res = residual(new)
        while new_res > res and new_res > tol and damping > 1e-4:
            damping *= 0.5
            new = x + damping * step
            new_res = residual(new)
        x, res = new, new_res
        # a feasible point is not yet the nearest one; wait for the step to vanish
        if res < tol and np.linalg.norm(damping * step) < 1e-13 * np.linalg.norm(x):
            break
    if not res < tol:
        raise NoConvergence(f"constraint residual {res:.3e} after {max_iter} iterations")
    return _unpack(x)


FormField = Callable[[complex, complex], np.ndarray]


def numerical_d(
    field: FormField,
    point: tuple[complex, complex],
    h_step: float = 1e-4,
    nonzero: Sequence[int] = (),
) -> float:
    """Max coefficient of d(field) at ``point`` by central differences.

    ``nonzero`` lists coordinates (0 for x, 1 for y) on which the field is
    singular at 0; the stencil must stay 2 h_step away from there.
    """
    x, y = point
    for idx in nonzero:
        if abs((x, y)[idx]) < 2 * h_step:
            raise DomainError("point is within 2*h_step of the chart boundary")
    base = np.array([x.real, x.imag, y.real, y.imag])

    def at(p: np.ndarray) -> np.ndarray:
        return field(complex(p[0], p[1]), complex(p[2], p[3]))

    partials = []
    for a in range(4):
        e = np.zeros(4)
        e[a] = h_step
        partials.append((at(base + e) - at(base - e)) / (2 * h_step))
    worst = 0.0
    for a, b, c in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)):
        coeff = partials[a][b, c] - partials[b][a, c] + partials[c][a, b]
        worst = max(worst, abs(coeff))
    return worst


def flat_structure() -> SU2AtPoint:
    return SU2AtPoint(wedge11(DX, DY), (0.5j * (wedge11(DX, DX.conj()) + wedge11(DY, DY.conj()))).real)


def transformed_structure(base: SU2AtPoint, a: np.ndarray) -> SU2AtPoint:
    """Pull a structure back along a real linear map with positive determinant."""
    return SU2AtPoint(pullback(base.psi, a), pullback(base.kappa, a))


def random_gl_plus(rng: np.random.Generator, spread: float = 0.3) -> np.ndarray:
    while True:
        a = np.eye(4) + spread * rng.standard_normal((4, 4))
        if np.linalg.det(a) > 0.1:
            return a


def h_pullback_structure(
    kind: ChartKind, zeta: complex, x: complex, y: complex, sign: int
) -> tuple[SU2AtPoint, SU2AtPoint]:
    """The structure at (x, y) and the pullback through h of the glued chart's
    structure at h(x, y). The glued chart uses the opposite sign."""
    x2, y2 = eval_h(kind, zeta, x, y)
    jac = real_jacobian(h_jacobian(kind, zeta, x, y))
    if isinstance(kind, TripleChart):
        here = eval_su2_triple(x, y, sign)
        there = eval_su2_triple(x2, y2, -sign)
    else:
        here = eval_su2_double(x, y, sign)
        there = eval_su2_double(x2, y2, -sign)
    return here, SU2AtPoint(pullback(there.psi, jac), pullback(there.kappa, jac))


def max_relative_difference(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))

