"""Seeded verification suite for the chart identities."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .charts import (
    DoubleChart,
    SU2AtPoint,
    TripleChart,
    c3_embedding_jacobian,
    c3_eta_pullbacks,
    c3_full_coordinates,
    c3_transition,
    complex_structure_from,
    eval_c3_model,
    eval_h,
    eval_su2_double,
    eval_su2_triple,
    eval_t,
    flat_structure,
    h_jacobian,
    h_pullback_structure,
    max_relative_difference,
    neck_half_length,
    numerical_d,
    omega_c3_ambient,
    omega_triple_from_neck,
    project_theta,
    random_gl_plus,
    sd_asd_split,
    su2_residuals,
    transformed_structure,
)
from .forms import pullback, real_jacobian

DEFAULT_SEED = 1729
FD_TOLERANCE = 1e-6
SLOPE_TOLERANCE = 0.1
QUADRATIC_TS = tuple(10.0 ** -e for e in (1.0, 1.5, 2.0, 2.5, 3.0))


@dataclass(frozen=True)
class IdentityResult:
    name: str
    max_residual: float
    tolerance: float
    samples: int

    @property
    def passed(self) -> bool:
        return math.isfinite(self.max_residual) and self.max_residual <= self.tolerance


def sample_annulus(rng: np.random.Generator, rmin: float = 0.5, rmax: float = 1.0) -> complex:
    r = rng.uniform(rmin, rmax)
    return complex(r * np.exp(1j * rng.uniform(0, 2 * np.pi)))


def sample_zeta(rng: np.random.Generator) -> complex:
    return sample_annulus(rng, 0.01, 0.1)


def _sign(rng: np.random.Generator) -> int:
    return int(rng.choice((-1, 1)))


def _chart(rng: np.random.Generator, triple: bool):
    return TripleChart(_sign(rng)) if triple else DoubleChart()


def _su2_double(rng: np.random.Generator) -> float:
    s = eval_su2_double(sample_annulus(rng), sample_annulus(rng), _sign(rng))
    return max(su2_residuals(s).values())


def _su2_triple(rng: np.random.Generator) -> float:
    s = eval_su2_triple(sample_annulus(rng), sample_annulus(rng), _sign(rng))
    return max(su2_residuals(s).values())


def _su2_c3(rng: np.random.Generator) -> float:
    i = int(rng.integers(1, 4))
    s = eval_c3_model(i, sample_zeta(rng), sample_annulus(rng), sample_annulus(rng), _sign(rng))
    return max(su2_residuals(s).values())


def _omega_two_ways(rng: np.random.Generator) -> float:
    x, y, sigma = sample_annulus(rng), sample_annulus(rng), _sign(rng)
    return max_relative_difference(eval_su2_triple(x, y, sigma).kappa, omega_triple_from_neck(x, y, sigma))


def _t_pullback(triple: bool) -> Callable[[np.random.Generator], float]:
    def check(rng: np.random.Generator) -> float:
        kind = _chart(rng, triple)
        zeta, x, y = sample_zeta(rng), sample_annulus(rng), sample_annulus(rng)
        lhs = eval_t(kind, *eval_h(kind, zeta, x, y))
        return abs(lhs - (2 * neck_half_length(zeta) - eval_t(kind, x, y)))
    return check


def _h_composition(triple: bool) -> Callable[[np.random.Generator], float]:
    def check(rng: np.random.Generator) -> float:
        kind = _chart(rng, triple)
        zeta, xi = sample_zeta(rng), sample_zeta(rng)
        x, y = sample_annulus(rng), sample_annulus(rng)
        got = np.array(eval_h(kind, xi, *eval_h(kind, zeta, x, y)))
        want = np.array([x, xi * y / zeta])
        return max_relative_difference(got, want)
    return check


def _h_invariance(triple: bool) -> Callable[[np.random.Generator], float]:
    def check(rng: np.random.Generator) -> float:
        kind = _chart(rng, triple)
        zeta, x, y = sample_zeta(rng), sample_annulus(rng), sample_annulus(rng)
        here, pulled = h_pullback_structure(kind, zeta, x, y, _sign(rng))
        return max(
            max_relative_difference(pulled.psi, here.psi),
            max_relative_difference(pulled.kappa, here.kappa),
        )
    return check


def _eta_sum(rng: np.random.Generator) -> float:
    i = int(rng.integers(1, 4))
    etas = c3_eta_pullbacks(i, sample_zeta(rng), sample_annulus(rng), sample_annulus(rng))
    return float(np.max(np.abs(etas[0] + etas[1] + etas[2])))


def _c3_transition(rng: np.random.Generator) -> float:
    i, j = (int(v) for v in rng.choice((1, 2, 3), size=2, replace=False))
    zeta, a, b, sigma = sample_zeta(rng), sample_annulus(rng), sample_annulus(rng), _sign(rng)
    (c, d), jac = c3_transition(i, j, zeta, a, b)
    target = eval_c3_model(i, zeta, c, d, sigma)
    source = eval_c3_model(j, zeta, a, b, sigma)
    rj = real_jacobian(jac)
    return max(
        max_relative_difference(pullback(target.psi, rj), source.psi),
        max_relative_difference(pullback(target.kappa, rj), source.kappa),
    )


def _c3_restriction(rng: np.random.Generator) -> float:
    i = int(rng.integers(1, 4))
    zeta, a, b = sample_zeta(rng), sample_annulus(rng), sample_annulus(rng)
    u = c3_full_coordinates(i, zeta, a, b)
    jac = real_jacobian(c3_embedding_jacobian(i, zeta, a, b))
    restricted = pullback(omega_c3_ambient(u), jac)
    return max_relative_difference(restricted, eval_c3_model(i, zeta, a, b, 1).kappa)


def _random_structure(rng: np.random.Generator) -> SU2AtPoint:
    return transformed_structure(flat_structure(), random_gl_plus(rng))


def _complex_structure(rng: np.random.Generator) -> float:
    s = _random_structure(rng)
    i_mat = complex_structure_from(s.psi)
    square = float(np.linalg.norm(i_mat @ i_mat + np.eye(4)))
    # psi must vanish on every antiholomorphic vector v - i I v
    v = rng.standard_normal(4)
    anti = v + 1j * (i_mat @ v)
    contraction = float(np.max(np.abs(s.psi.T @ anti)) / np.max(np.abs(s.psi)))
    return max(square, contraction)


def _sd_split(rng: np.random.Generator) -> float:
    s = _random_structure(rng)
    worst = 0.0
    for form in (s.psi.real, s.psi.imag, s.kappa):
        _, asd = sd_asd_split(form, s)
        worst = max(worst, float(np.max(np.abs(asd)) / np.max(np.abs(form))))
    return worst


def _idempotence(rng: np.random.Generator) -> float:
    s = _random_structure(rng)
    noise = 0.05 * (rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4)))
    once = project_theta(s.psi + noise - noise.T, s.kappa)
    twice = project_theta(once.psi, once.kappa)
    return max(
        max_relative_difference(twice.psi, once.psi),
        max_relative_difference(twice.kappa, once.kappa),
    )


def asd_direction(structure: SU2AtPoint, rng: np.random.Generator) -> np.ndarray:
    raw = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    _, asd = sd_asd_split(raw - raw.T, structure)
    return asd / np.linalg.norm(asd)


def defect_norms(structure: SU2AtPoint, eta: np.ndarray, ts=QUADRATIC_TS) -> list[float]:
    """|Theta_1(psi + t eta, kappa) - psi - t eta| for each t."""
    out = []
    for t in ts:
        proj = project_theta(structure.psi + t * eta, structure.kappa)
        out.append(float(np.linalg.norm(proj.psi - structure.psi - t * eta)))
    return out


def loglog_slope(ts, values) -> float:
    return float(np.polyfit(np.log(ts), np.log(values), 1)[0])


def _quadratic_slope(rng: np.random.Generator) -> float:
    s = _random_structure(rng)
    eta = asd_direction(s, rng)
    return abs(loglog_slope(QUADRATIC_TS, defect_norms(s, eta)) - 2.0)


def _closedness(fd_step: float) -> Callable[[np.random.Generator], float]:
    def check(rng: np.random.Generator) -> float:
        sign, zeta = _sign(rng), sample_zeta(rng)
        i = int(rng.integers(1, 4))
        point = (sample_annulus(rng), sample_annulus(rng))
        fields = [
            (lambda x, y: eval_su2_double(x, y, sign).psi, (1,)),
            (lambda x, y: eval_su2_double(x, y, sign).kappa, (1,)),
            (lambda x, y: eval_su2_triple(x, y, sign).psi, (0, 1)),
            (lambda x, y: eval_su2_triple(x, y, sign).kappa, (0, 1)),
            (lambda a, b: eval_c3_model(i, zeta, a, b, sign).psi, (0, 1)),
            (lambda a, b: eval_c3_model(i, zeta, a, b, sign).kappa, (0, 1)),
        ]
        return max(numerical_d(f, point, fd_step, nonzero) for f, nonzero in fields)
    return check


def _jacobian_fd(rng: np.random.Generator) -> float:
    step = 1e-5
    zeta, x, y = sample_zeta(rng), sample_annulus(rng), sample_annulus(rng)
    worst = 0.0
    for kind in (DoubleChart(), TripleChart(1)):
        analytic = real_jacobian(h_jacobian(kind, zeta, x, y))
        base = np.array([x.real, x.imag, y.real, y.imag])

        def h_real(p: np.ndarray) -> np.ndarray:
            a, b = eval_h(kind, zeta, complex(p[0], p[1]), complex(p[2], p[3]))
            return np.array([a.real, a.imag, b.real, b.imag])

        numeric = np.zeros((4, 4))
        for col in range(4):
            e = np.zeros(4)
            e[col] = step
            numeric[:, col] = (h_real(base + e) - h_real(base - e)) / (2 * step)
        worst = max(worst, max_relative_difference(numeric, analytic))
    return worst


# name -> (check, default tolerance, whether --tolerance overrides it)
def _identities(fd_step: float) -> list[tuple[str, Callable, float, bool]]:
    return [
        ("su2-conditions/double", _su2_double, 1e-9, True),
        ("su2-conditions/triple", _su2_triple, 1e-9, True),
        ("su2-conditions/c3-fiber", _su2_c3, 1e-9, True),
        ("kaehler-form-two-expressions/triple", _omega_two_ways, 1e-12, True),
        ("t-pullback/double", _t_pullback(False), 1e-12, True),
        ("t-pullback/triple", _t_pullback(True), 1e-12, True),
        ("h-composition/double", _h_composition(False), 1e-12, True),
        ("h-composition/triple", _h_composition(True), 1e-12, True),
        ("h-pullback-invariance/double", _h_invariance(False), 1e-9, True),
        ("h-pullback-invariance/triple", _h_invariance(True), 1e-9, True),
        ("c3-eta-sum", _eta_sum, 1e-12, True),
        ("c3-transition-invariance", _c3_transition, 1e-9, True),
        ("c3-ambient-restriction", _c3_restriction, 1e-9, True),
        ("complex-structure", _complex_structure, 1e-9, True),
        ("sd-split", _sd_split, 1e-9, True),
        ("theta/idempotence", _idempotence, 1e-9, True),
        ("theta/quadratic-slope", _quadratic_slope, SLOPE_TOLERANCE, False),
        ("closedness-fd", _closedness(fd_step), FD_TOLERANCE, False),
        ("jacobian-fd", _jacobian_fd, FD_TOLERANCE, False),
    ]


_SLOW = {"theta/quadratic-slope": 20, "theta/idempotence": 20}


def run_identity_suite(
    samples: int = 100,
    tolerance: Optional[float] = None,
    seed: int = DEFAULT_SEED,
    fd_step: float = 1e-4,
) -> list[IdentityResult]:
    """Max residual of every identity over ``samples`` seeded points.

    ``tolerance`` replaces the exact-arithmetic tolerances; finite-difference
    checks and the slope check keep their own.
    """
    results = []
    for index, (name, check, default_tol, overridable) in enumerate(_identities(fd_step)):
        rng = np.random.default_rng([seed, index])
        n = min(samples, _SLOW.get(name, samples))
        worst = 0.0
        for _ in range(n):
            worst = max(worst, check(rng))
        tol = tolerance if (tolerance is not None and overridable) else default_tol
        results.append(IdentityResult(name, worst, tol, n))
    return results
