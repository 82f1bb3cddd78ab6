"""Reference computations that share no code with the package under test.

They read raw scenario data (class vectors, forms, mark counts) and recompute
the quantities the package derives, by the most direct method available.
"""

from __future__ import annotations

import itertools

import numpy as np

from snc_smooth.scenario import ScenarioFile

PLANE_FORM = [[1]]
QUADRIC_FORM = [[0, 1], [1, 0]]


def base_form(component) -> list[list[int]]:
    kind = component.kind.value
    if kind == "ProjectivePlane":
        return PLANE_FORM
    if kind == "Quadric":
        return QUADRIC_FORM
    if kind == "RuledElliptic":
        return [[component.degree, 0], [0, -component.degree]]
    return component.form


def raw_collective_degrees(scenario: ScenarioFile) -> dict[str, int]:
    """Degree of N0 + N1 + marks straight from the file, before its plan."""
    comps = {c.id: c for c in scenario.components}
    out = {}
    for d in scenario.double_curves:
        total = len(d.triple_marks)
        for s in d.sides:
            if s.normal is not None:
                total += s.normal.degree
            else:
                q = np.array(base_form(comps[s.component]))
                v = np.array(s.curve_class)
                total += int(v @ q @ v)
        out[d.id] = total
    return out


def plan_point_sides(scenario: ScenarioFile) -> dict[str, int]:
    """Point-side incidences per curve of the file's own plan."""
    out: dict[str, int] = {}
    for step in scenario.blowup_plan:
        k = 2 if step.mode == "BothSides" else 1
        out[step.curve] = out.get(step.curve, 0) + k * len(step.points)
    return out


def post_plan_degrees(scenario: ScenarioFile) -> dict[str, int]:
    used = plan_point_sides(scenario)
    return {k: v - used.get(k, 0) for k, v in raw_collective_degrees(scenario).items()}


def brute_force_counts(degree: int, bound: int = 16) -> tuple[int, int, int]:
    """(two-sided, side-0, side-1) counts of fewest points clearing ``degree``.

    Enumerates every triple up to ``bound``; ties prefer two-sided points,
    then side 0.
    """
    best = None
    for b, s0, s1 in itertools.product(range(bound + 1), repeat=3):
        if degree - 2 * b - s0 - s1 != 0:
            continue
        key = (b + s0 + s1, -b, s1)
        if best is None or key < best[0]:
            best = (key, (b, s0, s1))
    if best is None:
        raise ValueError(f"degree {degree} cannot be cleared")
    return best[1]


def euler_from_counts(scenario: ScenarioFile) -> int:
    """sum chi(X_i) + blow-ups - 2 sum chi(D) + 3 T from raw counts."""
    base = {"ProjectivePlane": 3, "Quadric": 4, "RuledElliptic": 0}
    chi = sum(
        c.euler_char if c.kind.value == "Declared" else base[c.kind.value]
        for c in scenario.components
    )
    chi += sum(plan_point_sides(scenario).values())
    chi -= 2 * sum(2 if d.genus == 0 else 0 for d in scenario.double_curves)
    chi += 3 * len(scenario.triple_points)
    return chi


def fujita_h0_float(ks: list[int]) -> int:
    """dim ker rho for the ruled cycle glued by z -> i^k z, numerically.

    rho_i(c) = Res_{D_i,inf}(c_i Omega) + tau_i^* Res_{D_i+1,0}(c_i+1 Omega)
             = -c_i + i^{k_i} c_{i+1}.
    """
    n = len(ks)
    m = np.zeros((n, n), dtype=complex)
    for i, k in enumerate(ks):
        m[i, i] += -1
        m[i, (i + 1) % n] += 1j ** k
    return n - int(np.linalg.matrix_rank(m, tol=1e-9))
