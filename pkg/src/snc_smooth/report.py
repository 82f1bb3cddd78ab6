"""Euler number of the smoothed fiber, fiber type, and the combined verdict."""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field
from typing import Optional

from .canonical import (
    MissingTwist,
    build_rho_matrix,
    canonical_kernel,
    check_anticanonical,
    check_residue_matching,
    collective_normal_class,
    h0_canonical_dimension,
    is_d_semistable,
)
from .core import SncSurface, validate_structure


class Classification(str, enum.Enum):
    K3 = "K3"
    TORUS = "ComplexTorus"
    KODAIRA = "PrimaryKodaira"
    UNKNOWN = "Unknown"


_CURVE_EULER = {0: 2, 1: 0}


def euler_fiber(surface: SncSurface) -> int:
    """Sum chi(X_i) - 2 sum chi(D_ij) + 3 #triple points."""
    return (
        sum(c.euler_char for c in surface.components)
        - 2 * sum(_CURVE_EULER[d.geometry.genus] for d in surface.double_curves)
        + 3 * len(surface.triple_points)
    )


def classify_fiber(chi: int, b1: Optional[int] = None) -> Classification:
    if chi == 24:
        return Classification.K3
    if chi == 0 and b1 == 4:
        return Classification.TORUS
    if chi == 0 and b1 == 3:
        return Classification.KODAIRA
    return Classification.UNKNOWN


@dataclass
class SmoothingReport:
    structure_ok: bool
    anticanonical_ok: dict[str, Optional[bool]]
    d_semistable: bool
    witnesses: list[str]
    residue_ok: bool
    h0_dim: int
    chi_fiber: int
    classification: Classification
    collective: dict[str, str] = field(default_factory=dict)
    collective_degrees: dict[str, int] = field(default_factory=dict)
    component_euler: dict[str, int] = field(default_factory=dict)
    kernel_basis: list[list[list[str]]] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def hypotheses_hold(self) -> bool:
        return (
            self.structure_ok
            and self.d_semistable
            and self.residue_ok
            and all(v is True for v in self.anticanonical_ok.values())
        )

    def to_dict(self) -> dict:
        out = asdict(self)
        out["classification"] = self.classification.value
        return out


def full_report(surface: SncSurface, declared_b1: Optional[int] = None) -> SmoothingReport:
    diagnostics = validate_structure(surface)
    if diagnostics:
        return SmoothingReport(
            structure_ok=False,
            anticanonical_ok={},
            d_semistable=False,
            witnesses=[],
            residue_ok=False,
            h0_dim=0,
            chi_fiber=0,
            classification=Classification.UNKNOWN,
            diagnostics=[d.message for d in diagnostics],
            notes=["structure invalid; no further checks run"],
        )
    notes = []
    collective = collective_normal_class(surface)
    dss, witnesses = is_d_semistable(surface)
    anti = check_anticanonical(surface)
    try:
        rho = build_rho_matrix(surface)
        residue_ok = check_residue_matching(rho)
        h0 = h0_canonical_dimension(rho)
        kernel = [[v.to_pair() for v in vec] for vec in canonical_kernel(rho)]
    except MissingTwist as exc:
        residue_ok, h0, kernel = False, 0, []
        notes.append(str(exc))
    chi = euler_fiber(surface)
    report = SmoothingReport(
        structure_ok=True,
        anticanonical_ok=anti,
        d_semistable=dss,
        witnesses=list(witnesses),
        residue_ok=residue_ok,
        h0_dim=h0,
        chi_fiber=chi,
        classification=Classification.UNKNOWN,
        collective={k: str(v) for k, v in collective.items()},
        collective_degrees={k: v.degree for k, v in collective.items()},
        component_euler={c.id: c.euler_char for c in surface.components},
        kernel_basis=kernel,
        notes=notes,
    )
    if not dss:
        notes.append("not d-semistable: " + ", ".join(witnesses))
    unverifiable = [k for k, v in anti.items() if v is None]
    failed = [k for k, v in anti.items() if v is False]
    if failed:
        notes.append("double locus not anticanonical on " + ", ".join(failed))
    if unverifiable:
        notes.append("anticanonical check unverifiable on " + ", ".join(unverifiable))
    if not residue_ok:
        notes.append(f"residues do not match (h0 = {h0})")
    if report.hypotheses_hold:
        report.classification = classify_fiber(chi, declared_b1)
        if report.classification is Classification.UNKNOWN and chi == 0 and declared_b1 is None:
            notes.append("chi = 0 but b1 is not declared")
    return report
