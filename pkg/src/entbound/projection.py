"""Gauge-fixed projected-state model and its linear constraint set.

The projected state rho_P is a 4x4 Hermitian matrix over the A-major
basis |0 e0>, |0 e1>, |1 e0>, |1 e1>, where e0 is the maximal eigenstate
of the first conditional output and e1 completes the orthonormal frame
for the second one, whose maximal eigenstate is s|e0> + sqrt(1-s^2)|e1>
with s the (gauge-fixed, real non-negative) eigenstate overlap.

Block convention: rho_P carries the 1/2 prefactor of the equal-weight
preparation, so each diagonal 2x2 block integrates to at most 1/2 and
bra-kets of the unit-trace conditional states are twice the corresponding
rho_P functionals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .estimation import (
    OffDiagFloors,
    ProbeRecord,
    SubspaceEstimate,
    offdiag_floors,
    supplementary_window,
    supplementary_window_exact,
)

DEGENERATE_OVERLAP = 1.0 - 1e-9


class DegenerateSubspaceError(ValueError):
    """The two maximal eigenstates coincide; only the trivial bound 0 holds."""


@dataclass(frozen=True)
class OrthoBasis:
    """Orthonormalized subspace frame with eigenstate overlap ``s``."""

    s: float

    @property
    def t(self) -> float:
        """Orthogonal expansion coefficient sqrt(1 - s^2) of the second state."""
        return math.sqrt(1.0 - self.s * self.s)

    def lambda1_vector(self) -> np.ndarray:
        """Second maximal eigenstate expressed in the (e0, e1) frame."""
        return np.array([self.s, self.t])


@dataclass(frozen=True)
class LinearConstraint:
    """Real-linear restriction Tr(matrix @ rho_P) sense rhs.

    ``matrix`` is Hermitian so the functional is real on Hermitian
    arguments; ``sense`` is one of ">=", "<=", "==".
    """

    matrix: np.ndarray
    sense: str
    rhs: float
    label: str

    def __post_init__(self):
        if self.sense not in (">=", "<=", "=="):
            raise ValueError(f"unknown sense {self.sense!r}")
        if not np.all(np.isfinite(self.matrix.view(float))):
            raise ValueError(f"{self.label}: non-finite coefficients")

    def value(self, rho: np.ndarray) -> float:
        return float(np.trace(self.matrix @ rho).real)

    def violation(self, rho: np.ndarray) -> float:
        """Amount by which ``rho`` violates the constraint (<= 0 means satisfied)."""
        v = self.value(rho)
        if self.sense == ">=":
            return self.rhs - v
        if self.sense == "<=":
            return v - self.rhs
        return abs(v - self.rhs)


@dataclass(frozen=True)
class ConvexRegion:
    """Intersection of half-planes a*Re(z) + b*Im(z) >= d on the corner element."""

    half_planes: tuple[tuple[float, float, float], ...]

    def contains(self, z: complex, slack: float = 0.0) -> bool:
        return all(
            a * z.real + b * z.imag >= d - slack for a, b, d in self.half_planes
        )


@dataclass(frozen=True)
class ProjectedStateTemplate:
    """Constraint set of the projected-state optimization.

    ``constraints`` carries every linear row except the corner-element
    region, which is enumerated separately from ``polygon_floor``.
    """

    basis: OrthoBasis
    constraints: tuple[LinearConstraint, ...]
    gauge_floor: float
    polygon_floor: float
    trace_cap: float = 1.0
    block_trace_cap: float = 0.5


def _ket(a_index: int, mode_vector: np.ndarray) -> np.ndarray:
    v = np.zeros(4, dtype=complex)
    v[2 * a_index : 2 * a_index + 2] = mode_vector
    return v


def _braket_matrix(i: int, u: np.ndarray, j: int, w: np.ndarray) -> np.ndarray:
    """Matrix K with Tr(K rho_P) = 2 <i, u| rho_P |j, w> (the block bra-ket)."""
    return 2.0 * np.outer(_ket(j, w), _ket(i, u).conj())


def _window_rows(matrix, lo, hi, label) -> list[LinearConstraint]:
    return [
        LinearConstraint(matrix, ">=", lo, f"{label}.lo"),
        LinearConstraint(matrix, "<=", hi, f"{label}.hi"),
    ]


def fix_gauge(estimate: SubspaceEstimate) -> OrthoBasis:
    """Pin the eigenstate overlap and build the orthonormal frame.

    Uses the exact overlap when present, otherwise the upper window edge
    b_upper, where the minimum of the entanglement over the window sits.

    Raises
    ------
    DegenerateSubspaceError
        If the overlap reaches 1 within 1e-9: the eigenstates coincide and
        the only sound bound is the trivial 0.
    """
    s = estimate.exact_overlap if estimate.exact_overlap is not None else estimate.b_upper
    if s >= DEGENERATE_OVERLAP:
        raise DegenerateSubspaceError(
            f"eigenstate overlap {s:.12g} is degenerate (>= 1 - 1e-9)"
        )
    return OrthoBasis(s)


def effective_defects(
    estimate: SubspaceEstimate, mode: str
) -> tuple[float, float, float]:
    """Resolve (U0_eff, U1_eff, s) for the requested mode.

    Estimated mode uses the measured defect bounds with the overlap pinned
    at b_upper; exact mode substitutes the true defects eps_tilde and the
    true overlap everywhere they appear.
    """
    if mode == "estimated":
        return estimate.defects.U0, estimate.defects.U1, estimate.b_upper
    if mode == "exact":
        tilde = estimate.defects.exact_eps_tilde
        if tilde is None or estimate.exact_overlap is None:
            raise ValueError("exact mode requires exact defects and overlap")
        return tilde[0], tilde[1], estimate.exact_overlap
    raise ValueError(f"unknown mode {mode!r}")


def assemble_constraints(
    probe: ProbeRecord,
    estimate: SubspaceEstimate,
    mode: str = "estimated",
    s_override: float | None = None,
) -> ProjectedStateTemplate:
    """Translate an estimate into the linear constraint template.

    Emits, in the gauge-fixed frame (windows use the effective defects of
    the mode; every bra-ket is expressed through the 1/2-block convention):

    * C1/C2 eigenvalue windows on <lam_j|rho_j|lam_j>,
    * C3/C4 supplementary windows on the cross fidelities,
    * C5 gauge (corner element of the coherence block real) and its floor
      when positive,
    * trace cap and per-block trace caps.

    The second coherence floor is kept in ``polygon_floor`` for the region
    enumeration.  ``s_override`` substitutes a diagnostic overlap value in
    place of the pinned one (validation only).

    Raises
    ------
    DegenerateSubspaceError
        Propagated from :func:`fix_gauge` when the subspace collapses.
    """
    u0, u1, s = effective_defects(estimate, mode)
    if s_override is not None:
        s = s_override
    if s >= DEGENERATE_OVERLAP:
        raise DegenerateSubspaceError(
            f"eigenstate overlap {s:.12g} is degenerate (>= 1 - 1e-9)"
        )
    basis = OrthoBasis(s)
    e0 = np.array([1.0, 0.0])
    lam1 = basis.lambda1_vector()
    c = probe.input_overlap_c
    floors = offdiag_floors(c, u0, u1, s)
    # With the true overlap (exact mode) the cross-fidelity remainder
    # shrinks by 1 - s^2; with a window-pinned overlap only the plain
    # window is known to be valid.
    cross_window = supplementary_window_exact if mode == "exact" else supplementary_window

    rows: list[LinearConstraint] = []
    rows += _window_rows(_braket_matrix(0, e0, 0, e0), 1.0 - u0, 1.0, "C1")
    rows += _window_rows(_braket_matrix(1, lam1, 1, lam1), 1.0 - u1, 1.0, "C2")
    rows += _window_rows(
        _braket_matrix(0, lam1, 0, lam1), *cross_window(u0, s), "C3"
    )
    rows += _window_rows(
        _braket_matrix(1, e0, 1, e0), *cross_window(u1, s), "C4"
    )

    corner0 = _braket_matrix(0, e0, 1, e0)
    rows.append(
        LinearConstraint(
            (corner0 - corner0.conj().T) / 2j, "==", 0.0, "C5.gauge"
        )
    )
    if floors.r0 > 0.0:
        rows.append(
            LinearConstraint(
                (corner0 + corner0.conj().T) / 2.0, ">=", floors.r0, "C5.floor"
            )
        )

    eye = np.eye(4, dtype=complex)
    rows.append(LinearConstraint(eye, "<=", 1.0, "C7.trace"))
    block0 = np.diag([1.0, 1.0, 0.0, 0.0]).astype(complex)
    block1 = np.diag([0.0, 0.0, 1.0, 1.0]).astype(complex)
    rows.append(LinearConstraint(block0, "<=", 0.5, "C7.block0"))
    rows.append(LinearConstraint(block1, "<=", 0.5, "C7.block1"))

    return ProjectedStateTemplate(
        basis=basis,
        constraints=tuple(rows),
        gauge_floor=floors.r0,
        polygon_floor=floors.r1,
    )


def corner_functional(basis: OrthoBasis) -> np.ndarray:
    """Matrix K with Tr(K rho_P) = z = <lam_1|coherence block|lam_1>."""
    lam1 = basis.lambda1_vector()
    return _braket_matrix(0, lam1, 1, lam1)


def polygon_regions(r: float, sides: int = 4) -> tuple[ConvexRegion, ...]:
    """Convex cover of {|z| >= r} from a regular inscribed polygon.

    Region k is the outer half-plane of edge k of the n-gon inscribed in
    the circle of radius r with a vertex at z = r:

        cos(phi_k) Re(z) + sin(phi_k) Im(z) >= r cos(pi/n),
        phi_k = (2k + 1) pi / n.

    For r <= 0 the floor is vacuous and one unconstrained region is
    returned.  Pure outer half-planes cover the same union as quadrant
    intersections would, with one row per subproblem.
    """
    if sides not in (4, 8):
        raise ValueError(f"unsupported side count {sides}; expected 4 or 8")
    if r <= 0.0:
        return (ConvexRegion(()),)
    offset = r * math.cos(math.pi / sides)
    regions = []
    for k in range(sides):
        phi = (2 * k + 1) * math.pi / sides
        regions.append(ConvexRegion(((math.cos(phi), math.sin(phi), offset),)))
    return tuple(regions)


def constraint_violations(
    template: ProjectedStateTemplate, rho: np.ndarray, min_eig: float
) -> dict[str, float]:
    """Per-label violations of a template on a candidate state.

    Positive entries mean violated.  The corner-element floor is evaluated
    as the non-convex modulus bound |z| >= polygon_floor (membership in
    some polygon region implies it).  ``min_eig`` is the caller-computed
    smallest eigenvalue of ``rho`` (reported as PSD violation -min_eig).
    """
    out = {c.label: c.violation(rho) for c in template.constraints}
    out["psd"] = -min_eig
    if template.polygon_floor > 0.0:
        z = complex(np.trace(corner_functional(template.basis) @ rho))
        out["C6.floor"] = template.polygon_floor - abs(z)
    return out
