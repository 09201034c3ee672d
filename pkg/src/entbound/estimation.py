"""Parameter estimation from homodyne moments.

Converts the measured quadrature means and variances of the two
conditional output states into the quantities that constrain the
projected two-qubit state: the eigenvalue-defect bounds U_j, the
coherent-proxy overlap kappa, the maximal-eigenstate overlap window
[b_lower, b_upper], supplementary fidelity windows and off-diagonal
coherence floors.

All formulas require U < 1/2; for symmetric noise that limit sits at a
variance of sqrt(2) - 1/2, almost twice the vacuum value, far outside
the regime where non-trivial bounds exist.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

DEFECT_DOMAIN_LIMIT = 0.5


class EstimationDomainError(ValueError):
    """A defect bound left the U < 1/2 domain where the windows are valid."""

    def __init__(self, message: str, state_index: int | None = None):
        super().__init__(message)
        self.state_index = state_index


@dataclass(frozen=True)
class ConditionalMoments:
    """Measured quadrature means and variances of one conditional state."""

    mean_x: float
    mean_p: float
    var_x: float
    var_p: float

    def __post_init__(self):
        for name in ("mean_x", "mean_p", "var_x", "var_p"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v}")
        if self.var_x < 0 or self.var_p < 0:
            raise ValueError(
                f"variances must be non-negative, got ({self.var_x}, {self.var_p})"
            )


@dataclass(frozen=True)
class ProbeRecord:
    """Conditional moments of both probe states plus the known input overlap.

    ``input_overlap_c`` is the modulus of the overlap of the two prepared
    coherent states, taken real non-negative by phase convention.
    """

    state0: ConditionalMoments
    state1: ConditionalMoments
    input_overlap_c: float

    def __post_init__(self):
        c = self.input_overlap_c
        if not (0.0 <= c <= 1.0):
            raise ValueError(f"input_overlap_c must lie in [0, 1], got {c}")


@dataclass(frozen=True)
class DefectBounds:
    """Eigenvalue-defect bounds, optionally with exact-mode values.

    ``U0``/``U1`` bound the defect of the maximal eigenvalue of each
    conditional state.  In exact mode the true defects ``exact_eps_tilde``
    (and optionally the coherent-proxy fidelity defects ``exact_eps``)
    are also carried and must satisfy 0 <= eps_tilde <= eps <= U < 1/2.
    """

    U0: float
    U1: float
    exact_eps_tilde: tuple[float, float] | None = None
    exact_eps: tuple[float, float] | None = None

    def __post_init__(self):
        tilde = self.exact_eps_tilde
        eps = self.exact_eps if self.exact_eps is not None else tilde
        if tilde is None:
            return
        for j, (et, e, u) in enumerate(zip(tilde, eps, (self.U0, self.U1))):
            if not (0.0 <= et <= e <= u < DEFECT_DOMAIN_LIMIT):
                raise ValueError(
                    f"state {j}: need 0 <= eps_tilde <= eps <= U < 1/2, "
                    f"got eps_tilde={et}, eps={e}, U={u}"
                )


@dataclass(frozen=True)
class SubspaceEstimate:
    """Parameters locating the most-significant two-dimensional subspace."""

    defects: DefectBounds
    kappa: float
    b_lower: float
    b_upper: float
    exact_overlap: float | None = None

    def __post_init__(self):
        if not (0.0 <= self.b_lower <= self.b_upper <= 1.0):
            raise ValueError(
                f"overlap window must satisfy 0 <= b_lower <= b_upper <= 1, "
                f"got [{self.b_lower}, {self.b_upper}]"
            )


@dataclass(frozen=True)
class OffDiagFloors:
    """Lower bounds on the two off-diagonal block elements.

    Values <= 0 are vacuous: they are kept as-is so the solver drops the
    constraint instead of imposing a spurious one.
    """

    r0: float
    r1: float


def eigen_defect_bound(m: ConditionalMoments) -> float:
    """Upper bound U on the maximal-eigenvalue defect of one state.

    U = max(0, ((V(x) + 1/2)(V(p) + 1/2) - 1) / 2), computable from the
    measured variances alone.  The clamp at zero absorbs finite-sample
    variances that dip below the vacuum limit.

    Raises
    ------
    EstimationDomainError
        If U >= 1/2, outside the domain of the overlap windows.
    """
    u = 0.5 * ((m.var_x + 0.5) * (m.var_p + 0.5) - 1.0)
    u = max(0.0, u)
    if u >= DEFECT_DOMAIN_LIMIT:
        raise EstimationDomainError(
            f"defect bound U = {u:.9g} >= 1/2: variances "
            f"({m.var_x:.9g}, {m.var_p:.9g}) are outside the validity domain"
        )
    return u


def kappa_from_means(m0: ConditionalMoments, m1: ConditionalMoments) -> float:
    """Overlap of coherent states sharing the measured first moments.

    kappa = |<beta_0|beta_1>| = exp(-|beta_0 - beta_1|^2 / 2) with
    beta_j = (<x>_j + i <p>_j)/sqrt(2).
    """
    dx = m0.mean_x - m1.mean_x
    dp = m0.mean_p - m1.mean_p
    return math.exp(-(dx * dx + dp * dp) / 4.0)


def _defect_ratio(u: float) -> float:
    # sqrt(U / (1 - 2U)); requires U < 1/2.
    if u >= DEFECT_DOMAIN_LIMIT:
        raise EstimationDomainError(f"defect bound U = {u:.9g} >= 1/2")
    return math.sqrt(u / (1.0 - 2.0 * u))


def overlap_window_relaxed(U0: float, U1: float, kappa: float) -> tuple[float, float]:
    """Relaxed window [b_lower, b_upper] for the maximal-eigenstate overlap.

    Uses only kappa and the defect bounds; raw values are clamped to the
    physical range [0, 1].
    """
    g0, g1 = _defect_ratio(U0), _defect_ratio(U1)
    cross = math.sqrt(max(0.0, 1.0 - kappa * kappa))
    b_l = (
        kappa * math.sqrt(1.0 - 2.0 * U0) * math.sqrt(1.0 - 2.0 * U1)
        - cross * g0
        - cross * g1
        - g0 * g1
    )
    b_u = kappa + cross * g0 + cross * g1 + g0 * g1
    return min(max(b_l, 0.0), 1.0), min(max(b_u, 0.0), 1.0)


def overlap_window_full(
    kappa: float,
    eps0: float,
    eps1: float,
    eps_tilde0: float,
    eps_tilde1: float,
) -> tuple[float, float]:
    """Unrelaxed overlap window [c_lower, c_upper] from exact defects.

    Requires 0 <= eps_tilde_j <= eps_j and eps_tilde_j < 1/2.  Used in
    exact/synthetic mode and in the relaxation-consistency property tests;
    the relaxed window of :func:`overlap_window_relaxed` with U_j = eps_j
    always contains this one.
    """
    for j, (et, e) in enumerate(((eps_tilde0, eps0), (eps_tilde1, eps1))):
        if et < 0.0 or et > e:
            raise ValueError(
                f"state {j}: ordering 0 <= eps_tilde <= eps violated "
                f"(eps_tilde={et}, eps={e})"
            )
        if et >= DEFECT_DOMAIN_LIMIT:
            raise EstimationDomainError(f"state {j}: eps_tilde = {et} >= 1/2")

    def fid(e, et):
        return math.sqrt((1.0 - e) / (1.0 - et))

    def gap(e, et):
        return math.sqrt((e - et) / (1.0 - 2.0 * et))

    def core(e, et):
        return math.sqrt(max(0.0, 1.0 - e - et) / (1.0 - 2.0 * et))

    cross = math.sqrt(max(0.0, 1.0 - kappa * kappa))
    c_l = (
        kappa * core(eps0, eps_tilde0) * core(eps1, eps_tilde1)
        - cross * fid(eps0, eps_tilde0) * gap(eps1, eps_tilde1)
        - cross * fid(eps1, eps_tilde1) * gap(eps0, eps_tilde0)
        - gap(eps0, eps_tilde0) * gap(eps1, eps_tilde1)
    )
    c_u = (
        kappa * fid(eps0, eps_tilde0) * fid(eps1, eps_tilde1)
        + cross * fid(eps0, eps_tilde0) * gap(eps1, eps_tilde1)
        + cross * fid(eps1, eps_tilde1) * gap(eps0, eps_tilde0)
        + gap(eps0, eps_tilde0) * gap(eps1, eps_tilde1)
    )
    return c_l, c_u


def supplementary_window(U: float, s: float) -> tuple[float, float]:
    """Window for the cross fidelity <lam_i|rho_j|lam_i> (i != j).

    lo = (1 - U) s^2, hi = lo + U, for overlap s of the maximal eigenstates.
    """
    lo = (1.0 - U) * s * s
    return lo, lo + U


def supplementary_window_exact(eps_tilde: float, s: float) -> tuple[float, float]:
    """Tightened cross-fidelity window for exactly known parameters.

    When s is the true maximal-eigenstate overlap, expanding in the full
    eigenbasis gives remainder sum_{k>=1} lam_k |<lam'|lam_k>|^2 with
    lam_k <= eps_tilde and, by completeness, sum_{k>=1} |<lam'|lam_k>|^2 =
    1 - s^2.  The upper edge therefore carries eps_tilde (1 - s^2) instead
    of eps_tilde.  Not valid with a window-pinned overlap, so this is used
    in exact mode only.
    """
    lo = (1.0 - eps_tilde) * s * s
    return lo, lo + eps_tilde * (1.0 - s * s)


def offdiag_floors(c: float, U0: float, U1: float, s: float) -> OffDiagFloors:
    """Floors on the off-diagonal block elements given input overlap c.

    r_j = c - sqrt(U_j) sqrt(1 - (1 - U_{1-j}) s^2).  Negative floors are
    returned unchanged (vacuous downstream).
    """
    r0 = c - math.sqrt(U0) * math.sqrt(max(0.0, 1.0 - (1.0 - U1) * s * s))
    r1 = c - math.sqrt(U1) * math.sqrt(max(0.0, 1.0 - (1.0 - U0) * s * s))
    return OffDiagFloors(r0, r1)


def estimate(probe: ProbeRecord) -> SubspaceEstimate:
    """Full estimation pass over one probe record.

    Applies :func:`eigen_defect_bound` to each conditional state,
    :func:`kappa_from_means` and :func:`overlap_window_relaxed`; exact-mode
    fields are left absent.  Domain errors are re-raised with the index of
    the offending state.
    """
    bounds = []
    for j, state in enumerate((probe.state0, probe.state1)):
        try:
            bounds.append(eigen_defect_bound(state))
        except EstimationDomainError as err:
            raise EstimationDomainError(f"state {j}: {err}", state_index=j) from None
    u0, u1 = bounds
    kappa = kappa_from_means(probe.state0, probe.state1)
    b_l, b_u = overlap_window_relaxed(u0, u1, kappa)
    return SubspaceEstimate(DefectBounds(u0, u1), kappa, b_l, b_u)


def with_exact(
    est: SubspaceEstimate,
    lambda0: float,
    lambda1: float,
    overlap_s: float,
    eps: tuple[float, float] | None = None,
) -> SubspaceEstimate:
    """Attach exactly known subspace parameters to an estimate.

    ``lambda0``/``lambda1`` are the true maximal eigenvalues (defects
    eps_tilde_j = 1 - lambda_j), ``overlap_s`` the true maximal-eigenstate
    overlap.  The exact values must be consistent with the measured bounds.
    """
    tilde = (1.0 - lambda0, 1.0 - lambda1)
    defects = DefectBounds(est.defects.U0, est.defects.U1, tilde, eps)
    return SubspaceEstimate(
        defects, est.kappa, est.b_lower, est.b_upper, exact_overlap=overlap_s
    )
