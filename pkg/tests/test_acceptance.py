"""Acceptance suite.

Each test prints one [PASS]/[FAIL] line for its criterion (run with -s to
see them live).  Sweep tables are computed once per session and shared by
the threshold and monotonicity criteria.
"""

import math
import time

import numpy as np
import pytest

from entbound.bound import min_negativity, solve_template
from entbound.channels import (
    InputSpec,
    LossNoiseChannel,
    ThermalSplitterChannel,
    simulate_loss_noise,
    simulate_thermal_splitter,
)
from entbound.estimation import estimate
from entbound.hermitian import negativity, partial_transpose_A
from entbound.projection import assemble_constraints

from _oracles import sample_feasible_states

C_GRID = [round(0.05 * k, 2) for k in range(1, 20)]
V_STEP = 0.005
ALPHA_GRID = [round(0.1 * k, 1) for k in range(2, 16)]


def report(criterion, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}")
    assert ok, f"{criterion}: {detail}"


def loss_bound(c, T, V, sides=4):
    probe = simulate_loss_noise(InputSpec.from_overlap(c), LossNoiseChannel(T, V))
    return min_negativity(probe, sides=sides).bound


@pytest.fixture(scope="session")
def loss_table():
    """bound[(T, c, V)] over the threshold grids at T = 1.0 and T = 0.5."""
    table = {}
    for T, v_max in ((1.0, 0.08), (0.5, 0.06)):
        for k in range(1, int(round(v_max / V_STEP)) + 1):
            V = round(k * V_STEP, 3)
            for c in C_GRID:
                table[(T, c, V)] = loss_bound(c, T, V)
    return table


@pytest.fixture(scope="session")
def thermal_table():
    """bound[(mode, alpha, n_bar)] over the thermal grid."""
    table = {}
    for k in range(1, 37):
        n_bar = round(k * V_STEP, 3)
        for alpha in ALPHA_GRID:
            probe, exact = simulate_thermal_splitter(
                InputSpec(alpha), ThermalSplitterChannel(n_bar)
            )
            table[("estimated", alpha, n_bar)] = min_negativity(probe).bound
            table[("exact", alpha, n_bar)] = min_negativity(
                probe, mode="exact", exact=exact
            ).bound
    return table


def largest_passing(noise_values, best_fn, floor=1e-4):
    threshold = 0.0
    for v in noise_values:
        if best_fn(v) > floor:
            threshold = v
    return threshold


class TestAcceptance:
    def test_criterion_1_zero_noise_tightness(self):
        t0 = time.time()
        worst = 0.0
        for c in [round(0.1 * k, 1) for k in range(1, 10)]:
            bound = loss_bound(c, 1.0, 0.0)
            worst = max(worst, abs(bound - math.sqrt(1.0 - c * c)))
        elapsed = time.time() - t0
        report(
            "criterion 1 (zero-noise tightness)",
            worst <= 1e-3 and elapsed < 60.0,
            f"max |bound - sqrt(1-c^2)| = {worst:.2e} (tol 1e-3), {elapsed:.1f}s",
        )

    def test_criterion_2_noise_threshold_no_loss(self, loss_table):
        vs = sorted({v for (T, _, v) in loss_table if T == 1.0})
        thresh = largest_passing(
            vs, lambda v: max(loss_table[(1.0, c, v)] for c in C_GRID)
        )
        report(
            "criterion 2 (noise threshold, T=1.0)",
            0.03 <= thresh <= 0.07,
            f"threshold = {thresh:.3f} SNU, window [0.03, 0.07]",
        )

    def test_criterion_3_noise_threshold_half_loss(self, loss_table):
        vs = sorted({v for (T, _, v) in loss_table if T == 0.5})
        thresh = largest_passing(
            vs, lambda v: max(loss_table[(0.5, c, v)] for c in C_GRID)
        )
        report(
            "criterion 3 (noise threshold, T=0.5)",
            0.015 <= thresh <= 0.045,
            f"threshold = {thresh:.3f} SNU, window [0.015, 0.045]",
        )

    def test_criterion_4_exact_mode_thermal_threshold(self, thermal_table):
        ns = sorted({n for (_, _, n) in thermal_table})
        thresh = {
            mode: largest_passing(
                ns,
                lambda n, m=mode: max(
                    thermal_table[(m, a, n)] for a in ALPHA_GRID
                ),
            )
            for mode in ("exact", "estimated")
        }
        ok = thresh["exact"] > 0.10 and thresh["estimated"] <= 0.5 * thresh["exact"]
        report(
            "criterion 4 (thermal exact-mode threshold)",
            ok,
            f"exact = {thresh['exact']:.3f} SNU (> 0.10), "
            f"estimated = {thresh['estimated']:.3f} "
            f"(<= {0.5 * thresh['exact']:.3f})",
        )

    def test_criterion_5_relaxation_ordering(self):
        # 50 grid points inside the non-trivial region (V > 0: at V = 0 the
        # corner element is pinned and the polygon plays no role).
        deltas = []
        for c in [round(0.05 + 0.1 * k, 2) for k in range(10)]:
            for V in (0.004, 0.008, 0.012, 0.016, 0.02):
                b4 = loss_bound(c, 1.0, V, sides=4)
                b8 = loss_bound(c, 1.0, V, sides=8)
                deltas.append(b8 - b4)
        worst = min(deltas)
        report(
            "criterion 5 (octagon >= square)",
            len(deltas) == 50 and worst >= -1e-8,
            f"min delta = {worst:+.2e} (>= -1e-8), "
            f"max delta = {max(deltas):+.2e} over 50 points",
        )

    def test_criterion_6_oracle_dominance(self):
        rng = np.random.default_rng(2026)
        cases = [
            (c, V)
            for c in (0.2, 0.35, 0.5, 0.65, 0.8)
            for V in (0.004, 0.01, 0.016, 0.022)
        ]
        assert len(cases) == 20
        checked = 0
        worst_margin = np.inf
        for c, V in cases:
            probe = simulate_loss_noise(
                InputSpec.from_overlap(c), LossNoiseChannel(1.0, V)
            )
            template = assemble_constraints(probe, estimate(probe))
            results = solve_template(template, sides=4)
            optimal = [o for _, o, s, _ in results if s == "optimal"]
            bound = max(0.0, min(optimal))
            samples = sample_feasible_states(template, 200, rng)
            assert len(samples) == 200, f"sampler starved at c={c}, V={V}"
            for rho in samples:
                margin = negativity(rho) - bound
                worst_margin = min(worst_margin, margin)
                checked += 1
        report(
            "criterion 6 (oracle dominance)",
            checked == 4000 and worst_margin >= -1e-6,
            f"min(negativity - bound) = {worst_margin:+.2e} over {checked} samples",
        )

    def test_criterion_7_estimation_validity(self):
        worst_window = -np.inf
        worst_defect = -np.inf
        for n_bar in np.linspace(0.0, 0.3, 13):
            for alpha in np.linspace(0.2, 1.5, 14):
                probe, exact = simulate_thermal_splitter(
                    InputSpec(float(alpha)), ThermalSplitterChannel(float(n_bar))
                )
                est = estimate(probe)
                s = exact.overlap_s
                worst_window = max(
                    worst_window, est.b_lower - s, s - est.b_upper
                )
                worst_defect = max(
                    worst_defect, (1.0 - exact.lambda0) - est.defects.U0
                )
        report(
            "criterion 7 (estimation validity on thermal grid)",
            worst_window <= 1e-9 and worst_defect <= 1e-12,
            f"window excess = {worst_window:+.2e} (<= 1e-9), "
            f"defect excess = {worst_defect:+.2e} (<= 1e-12)",
        )

    def test_criterion_8_noise_monotonicity(self, loss_table, thermal_table):
        worst = -np.inf
        for T in (1.0, 0.5):
            for c in C_GRID:
                vs = sorted({v for (t, _, v) in loss_table if t == T})
                curve = [loss_table[(T, c, v)] for v in vs]
                worst = max(
                    worst, max(b - a for a, b in zip(curve, curve[1:]))
                )
        for mode in ("estimated", "exact"):
            for alpha in ALPHA_GRID:
                ns = sorted({n for (_, _, n) in thermal_table})
                curve = [thermal_table[(mode, alpha, n)] for n in ns]
                worst = max(
                    worst, max(b - a for a, b in zip(curve, curve[1:]))
                )
        report(
            "criterion 8 (noise monotonicity)",
            worst <= 1e-6,
            f"max increase along V = {worst:+.2e} (tol 1e-6)",
        )

    def test_criterion_9_kernel_correctness(self):
        bell = np.zeros((4, 4), dtype=complex)
        bell[0, 0] = bell[0, 3] = bell[3, 0] = bell[3, 3] = 0.5
        bell_err = abs(negativity(bell) - 1.0)

        rng = np.random.default_rng(9)
        max_separable = 0.0
        for _ in range(500):
            k = int(rng.integers(1, 6))
            weights = rng.dirichlet(np.ones(k))
            rho = np.zeros((4, 4), dtype=complex)
            for w in weights:
                a = rng.normal(size=2) + 1j * rng.normal(size=2)
                b = rng.normal(size=2) + 1j * rng.normal(size=2)
                v = np.kron(a / np.linalg.norm(a), b / np.linalg.norm(b))
                rho += w * np.outer(v, v.conj())
            max_separable = max(max_separable, negativity(rho))

        rho = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho = rho @ rho.conj().T
        rho /= rho.trace().real
        involution_exact = np.array_equal(
            partial_transpose_A(partial_transpose_A(rho)), rho
        )
        trace_exact = partial_transpose_A(rho).trace() == rho.trace()

        ok = (
            bell_err <= 1e-9
            and max_separable <= 1e-9
            and involution_exact
            and trace_exact
        )
        report(
            "criterion 9 (kernel correctness)",
            ok,
            f"|N(bell)-1| = {bell_err:.1e}, max separable N = {max_separable:.1e}, "
            f"involution exact = {involution_exact}, trace exact = {trace_exact}",
        )
