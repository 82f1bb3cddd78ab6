"""The three smoothing hypotheses: d-semistability, anticanonical double
locus, and compatibility of residues (the kernel of rho)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import SncSurface, incident_curve_classes
from .exact import ONE, ZERO, GaussianRational, kernel_basis, mat_vec, rank
from .pic import LineBundleClass, divisor_class, is_trivial, tensor


class MissingTwist(ValueError):
    pass


def collective_normal_class(surface: SncSurface) -> dict[str, LineBundleClass]:
    """N(side 0) + N(side 1) + [triple marks] for every double curve."""
    out = {}
    for d in surface.double_curves:
        marks = divisor_class(d.geometry, d.mark_locations())
        out[d.id] = tensor(*(s.normal_class for s in d.sides), marks)
    return out


def is_d_semistable(surface: SncSurface) -> tuple[bool, tuple[str, ...]]:
    """Whether every collective class is trivial, and the curves where it is not."""
    witnesses = tuple(
        cid for cid, c in collective_normal_class(surface).items() if not is_trivial(c)
    )
    return not witnesses, witnesses


def check_anticanonical(surface: SncSurface) -> dict[str, Optional[bool]]:
    """K + sum of incident double curves == 0, per component.

    ``None`` marks a component whose class data is not declared.
    """
    out: dict[str, Optional[bool]] = {}
    for comp in surface.components:
        if not comp.has_class_data():
            out[comp.id] = None
            continue
        total = list(comp.canonical_class)
        for cls in incident_curve_classes(surface, comp.id):
            total = [a + b for a, b in zip(total, cls)]
        out[comp.id] = all(v == 0 for v in total)
    return out


@dataclass(frozen=True)
class RhoMatrix:
    rows: tuple[tuple[GaussianRational, ...], ...]
    row_ids: tuple[str, ...]
    col_ids: tuple[str, ...]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_ids), len(self.col_ids)

    def to_numpy(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=complex)
        for i, row in enumerate(self.rows):
            for j, v in enumerate(row):
                out[i, j] = complex(v)
        return out


def build_rho_matrix(surface: SncSurface) -> RhoMatrix:
    cols = tuple(c.id for c in surface.components)
    index = {c: j for j, c in enumerate(cols)}
    rows = []
    for d in surface.double_curves:
        if d.twist is None:
            raise MissingTwist(f"double curve {d.id} has no gluing twist")
        row = [ZERO] * len(cols)
        row[index[d.sides[0].component]] += ONE
        row[index[d.sides[1].component]] += d.twist
        rows.append(tuple(row))
    return RhoMatrix(tuple(rows), tuple(d.id for d in surface.double_curves), cols)


def _rho(surface_or_rho: SncSurface | RhoMatrix) -> RhoMatrix:
    if isinstance(surface_or_rho, RhoMatrix):
        return surface_or_rho
    return build_rho_matrix(surface_or_rho)


def h0_canonical_dimension(surface: SncSurface | RhoMatrix) -> int:
    rho = _rho(surface)
    n = len(rho.col_ids)
    return n - rank(rho.rows, n)


def canonical_kernel(surface: SncSurface | RhoMatrix) -> list[list[GaussianRational]]:
    rho = _rho(surface)
    return kernel_basis(rho.rows, len(rho.col_ids))


def check_residue_matching(surface: SncSurface | RhoMatrix) -> bool:
    """True iff Omega_i = 1 on every component already satisfies rho = 0."""
    rho = _rho(surface)
    return all(not v for v in mat_vec(rho.rows, [ONE] * len(rho.col_ids)))


def float_rank(rho: RhoMatrix, tol: float = 1e-9) -> int:
    if not rho.rows:
        return 0
    return int(np.linalg.matrix_rank(rho.to_numpy(), tol=tol))

