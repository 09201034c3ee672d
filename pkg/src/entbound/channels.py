"""Synthetic channel models producing probe records.

Moment-level models only: the certification pipeline consumes first and
second quadrature moments, so no assumption is made about the physical
map beyond its effect on those moments.

Quadrature convention: x = (a' + a)/sqrt(2), so a coherent state |alpha>
with real alpha has <x> = sqrt(2) alpha and vacuum variance 1/2.  Excess
noise V in Shot Noise Units corresponds to measured variances (1 + V)/2.
A thermal state of mean photon number n has variance 1/2 + n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .estimation import ConditionalMoments, ProbeRecord


@dataclass(frozen=True)
class InputSpec:
    """Coherent probe amplitude alpha >= 0; input overlap c = exp(-2 alpha^2)."""

    alpha: float

    def __post_init__(self):
        if not (self.alpha >= 0.0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be finite and >= 0, got {self.alpha}")

    @classmethod
    def from_overlap(cls, c: float) -> "InputSpec":
        """Inverse of the alpha -> c bijection, for c in (0, 1]."""
        if not (0.0 < c <= 1.0):
            raise ValueError(f"overlap must lie in (0, 1], got {c}")
        return cls(math.sqrt(-0.5 * math.log(c)))

    @property
    def overlap_c(self) -> float:
        return input_overlap(self.alpha)


@dataclass(frozen=True)
class LossNoiseChannel:
    """Symmetric loss/excess-noise channel: transmittivity T, noise V (SNU)."""

    T: float
    V: float

    def __post_init__(self):
        if not (0.0 <= self.T <= 1.0):
            raise ValueError(f"transmittivity must lie in [0, 1], got {self.T}")
        if self.V < 0.0:
            raise ValueError(f"excess noise must be >= 0, got {self.V}")


@dataclass(frozen=True)
class ThermalSplitterChannel:
    """50:50 beam splitter mixing the probe with a thermalized vacuum."""

    n_bar: float

    def __post_init__(self):
        if self.n_bar < 0.0:
            raise ValueError(f"mean photon number must be >= 0, got {self.n_bar}")


@dataclass(frozen=True)
class ExactSubspace:
    """Exactly known maximal eigenvalues and eigenstate overlap."""

    lambda0: float
    lambda1: float
    overlap_s: float

    def __post_init__(self):
        for name in ("lambda0", "lambda1"):
            lam = getattr(self, name)
            if not (0.0 < lam <= 1.0):
                raise ValueError(f"{name} must lie in (0, 1], got {lam}")
        if not (0.0 <= self.overlap_s <= 1.0):
            raise ValueError(f"overlap_s must lie in [0, 1], got {self.overlap_s}")


def input_overlap(alpha: float) -> float:
    """Overlap c = <alpha|-alpha> = exp(-2 alpha^2) of the two probes."""
    if alpha < 0.0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    return math.exp(-2.0 * alpha * alpha)


def initial_negativity(c: float, T: float) -> float:
    """Negativity of the pure input state after loss rescaling.

    The reference curve uses the input state with alpha replaced by
    sqrt(T) alpha, i.e. branch overlap c^T: N = sqrt(1 - c^(2T)).
    """
    if not (0.0 < c <= 1.0):
        raise ValueError(f"overlap must lie in (0, 1], got {c}")
    if not (0.0 <= T <= 1.0):
        raise ValueError(f"transmittivity must lie in [0, 1], got {T}")
    return math.sqrt(max(0.0, 1.0 - c ** (2.0 * T)))


def simulate_loss_noise(inp: InputSpec, ch: LossNoiseChannel) -> ProbeRecord:
    """Probe record for the symmetric loss/excess-noise channel.

    Means scale to +-sqrt(2 T) alpha on x (0 on p); every variance equals
    (1 + V)/2.
    """
    mean = math.sqrt(2.0 * ch.T) * inp.alpha
    var = 0.5 * (1.0 + ch.V)
    return ProbeRecord(
        ConditionalMoments(mean, 0.0, var, var),
        ConditionalMoments(-mean, 0.0, var, var),
        input_overlap(inp.alpha),
    )


def simulate_thermal_splitter(
    inp: InputSpec, ch: ThermalSplitterChannel
) -> tuple[ProbeRecord, ExactSubspace]:
    """Probe record and exact subspace for the thermal beam-splitter channel.

    First moments drop by 1/sqrt(2) (T = 1/2) and each output variance is
    1/2 + n_bar/2, i.e. V = n_bar in SNU.  The outputs are displaced
    thermal states with mean photon number n_bar/2, whose maximal
    eigenvector is the coherent state at the mean: the maximal eigenvalues
    are 1/(n_bar/2 + 1) and the eigenstate overlap is exp(-alpha^2).
    """
    var = 0.5 + 0.5 * ch.n_bar
    probe = ProbeRecord(
        ConditionalMoments(inp.alpha, 0.0, var, var),
        ConditionalMoments(-inp.alpha, 0.0, var, var),
        input_overlap(inp.alpha),
    )
    lam = 1.0 / (0.5 * ch.n_bar + 1.0)
    exact = ExactSubspace(lam, lam, math.exp(-inp.alpha * inp.alpha))
    return probe, exact


def displaced_thermal_subspace(inp: InputSpec, ch: LossNoiseChannel) -> ExactSubspace:
    """Exact subspace under the displaced-thermal output assumption.

    For exact-mode sweeps of the loss/noise channel the conditional outputs
    are modeled as displaced thermal states with the simulated moments:
    thermal occupation V/2, maximal eigenvalues 1/(V/2 + 1), eigenstate
    overlap equal to the coherent overlap of the means, exp(-2 T alpha^2).
    The thermal beam-splitter channel is the T = 1/2 member of this family.
    """
    lam = 1.0 / (0.5 * ch.V + 1.0)
    s = math.exp(-2.0 * ch.T * inp.alpha * inp.alpha)
    return ExactSubspace(lam, lam, s)
