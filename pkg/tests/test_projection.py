"""Tests for the projected-state template and polygon region enumeration."""

import math

import numpy as np
import pytest

from entbound.channels import InputSpec, ThermalSplitterChannel, simulate_thermal_splitter
from entbound.estimation import (
    ConditionalMoments,
    DefectBounds,
    ProbeRecord,
    SubspaceEstimate,
    estimate,
    with_exact,
)
from entbound.projection import (
    ConvexRegion,
    DegenerateSubspaceError,
    OrthoBasis,
    assemble_constraints,
    constraint_violations,
    corner_functional,
    fix_gauge,
    polygon_regions,
)

from _oracles import thermal_true_projected_state

U5 = 0.0253125  # defect bound at 5% SNU symmetric noise
B5 = 0.6854258943371928  # window lower edge for U5 pairs at kappa = 0.9


def make_estimate(b_upper, u0=0.0, u1=0.0, b_lower=None, exact=None):
    return SubspaceEstimate(
        DefectBounds(u0, u1),
        kappa=b_upper,
        b_lower=b_upper if b_lower is None else b_lower,
        b_upper=b_upper,
        exact_overlap=exact,
    )


def vacuum_probe(c=0.5):
    m0 = ConditionalMoments(1.0, 0.0, 0.5, 0.5)
    m1 = ConditionalMoments(-1.0, 0.0, 0.5, 0.5)
    return ProbeRecord(m0, m1, c)


def rows_by_label(template):
    return {c.label: c for c in template.constraints}


class TestFixGauge:
    def test_orthogonal(self):
        basis = fix_gauge(make_estimate(0.0))
        assert basis.s == 0.0
        assert basis.t == 1.0

    def test_generic_coefficients(self):
        basis = fix_gauge(make_estimate(B5))
        assert basis.s == pytest.approx(B5, abs=1e-15)
        assert basis.t == pytest.approx(0.7281424, abs=1e-6)
        assert basis.s**2 + basis.t**2 == pytest.approx(1.0, abs=1e-12)

    def test_degenerate(self):
        with pytest.raises(DegenerateSubspaceError):
            fix_gauge(make_estimate(1.0))

    def test_prefers_exact_overlap(self):
        basis = fix_gauge(make_estimate(0.9, exact=0.3))
        assert basis.s == 0.3


class TestPolygonRegions:
    def test_vacuous_floor(self):
        regions = polygon_regions(-0.4, 4)
        assert len(regions) == 1
        assert regions[0].half_planes == ()
        assert regions[0].contains(0.0 + 0.0j)

    def test_square_half_planes(self):
        regions = polygon_regions(1.0, 4)
        assert len(regions) == 4
        # Normalizing each row by cos(pi/4) must give +-Re(z) +- Im(z) >= 1.
        seen = set()
        for (a, b, d), in (r.half_planes for r in regions):
            scale = math.cos(math.pi / 4.0)
            na, nb, nd = a / scale, b / scale, d / scale
            assert abs(abs(na) - 1.0) < 1e-12 and abs(abs(nb) - 1.0) < 1e-12
            assert nd == pytest.approx(1.0, abs=1e-12)
            seen.add((round(na), round(nb)))
        assert seen == {(1, 1), (-1, 1), (-1, -1), (1, -1)}

    def test_octagon_offset(self):
        regions = polygon_regions(1.0, 8)
        assert len(regions) == 8
        for (a, b, d), in (r.half_planes for r in regions):
            assert math.hypot(a, b) == pytest.approx(1.0, abs=1e-12)
            assert d == pytest.approx(math.cos(math.pi / 8.0), abs=1e-12)

    def test_unsupported_sides(self):
        with pytest.raises(ValueError, match="side count"):
            polygon_regions(0.5, 6)

    @pytest.mark.parametrize("sides", [4, 8])
    def test_coverage_outside_circle(self, sides):
        rng = np.random.default_rng(21)
        r = 0.6
        regions = polygon_regions(r, sides)
        radii = r + rng.exponential(0.5, size=10_000)
        angles = rng.uniform(0.0, 2.0 * np.pi, size=10_000)
        for z in radii * np.exp(1j * angles):
            assert any(reg.contains(complex(z)) for reg in regions)

    def test_square_region_points_satisfy_diamond_bound(self):
        rng = np.random.default_rng(22)
        r = 0.8
        regions = polygon_regions(r, 4)
        pts = rng.uniform(-r, r, size=(4000, 2))
        hits = 0
        for x, y in pts:
            z = complex(x, y)
            if abs(z) < r and any(reg.contains(z) for reg in regions):
                hits += 1
                assert abs(z.real) + abs(z.imag) >= r - 1e-12
        assert hits > 50  # the square-circle gap is actually exercised


class TestAssemble:
    def test_zero_defect_windows_collapse(self):
        probe = vacuum_probe(c=0.5)
        template = assemble_constraints(probe, make_estimate(0.5))
        rows = rows_by_label(template)
        assert rows["C1.lo"].rhs == 1.0 and rows["C1.hi"].rhs == 1.0
        assert rows["C2.lo"].rhs == 1.0
        assert rows["C3.lo"].rhs == pytest.approx(0.25, abs=1e-15)
        assert rows["C3.hi"].rhs == pytest.approx(0.25, abs=1e-15)
        # Noiseless floors equal the input overlap.
        assert template.gauge_floor == pytest.approx(0.5, abs=1e-15)
        assert template.polygon_floor == pytest.approx(0.5, abs=1e-15)
        assert rows["C5.floor"].rhs == pytest.approx(0.5, abs=1e-15)

    def test_five_percent_floor(self):
        probe = vacuum_probe(c=0.5)
        template = assemble_constraints(probe, make_estimate(B5, u0=U5, u1=U5))
        assert template.gauge_floor == pytest.approx(0.3828612556431087, abs=1e-12)
        assert template.gauge_floor == pytest.approx(0.382864, abs=1e-4)

    def test_vacuous_polygon_floor_yields_single_region(self):
        probe = vacuum_probe(c=0.1)
        template = assemble_constraints(
            probe, make_estimate(0.0, u0=0.25, u1=0.25)
        )
        assert template.polygon_floor < 0.0
        regions = polygon_regions(template.polygon_floor, 4)
        assert len(regions) == 1 and regions[0].half_planes == ()
        assert "C5.floor" not in rows_by_label(template)

    def test_caps_present(self):
        rows = rows_by_label(assemble_constraints(vacuum_probe(), make_estimate(0.3)))
        assert rows["C7.trace"].rhs == 1.0
        assert rows["C7.block0"].rhs == 0.5
        assert rows["C7.block1"].rhs == 0.5

    def test_exact_mode_substitutes_defects_and_overlap(self):
        # Low noise so the estimated-mode window stays clear of the
        # degenerate clamp at 1.
        probe, exact = simulate_thermal_splitter(InputSpec(1.0), ThermalSplitterChannel(0.02))
        est = with_exact(estimate(probe), exact.lambda0, exact.lambda1, exact.overlap_s)
        t_est = assemble_constraints(probe, est, mode="estimated")
        t_ex = assemble_constraints(probe, est, mode="exact")
        assert t_ex.basis.s == pytest.approx(math.exp(-1.0), abs=1e-12)
        assert t_est.basis.s == pytest.approx(est.b_upper, abs=1e-15)
        eps = 1.0 - exact.lambda0
        assert rows_by_label(t_ex)["C1.lo"].rhs == pytest.approx(1.0 - eps, abs=1e-12)
        assert rows_by_label(t_est)["C1.lo"].rhs == pytest.approx(
            1.0 - est.defects.U0, abs=1e-12
        )
        # The C1 functional is frame-independent, so the exact window nests
        # inside the estimated one.
        assert rows_by_label(t_ex)["C1.lo"].rhs >= rows_by_label(t_est)["C1.lo"].rhs

    def test_exact_mode_requires_exact_fields(self):
        with pytest.raises(ValueError, match="exact mode"):
            assemble_constraints(vacuum_probe(), make_estimate(0.5), mode="exact")

    def test_degenerate_overlap_short_circuits(self):
        with pytest.raises(DegenerateSubspaceError):
            assemble_constraints(vacuum_probe(1.0), make_estimate(1.0))

    def test_constraint_linearity_exact(self):
        rng = np.random.default_rng(5)
        template = assemble_constraints(vacuum_probe(), make_estimate(0.4, 0.01, 0.02))
        a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        b = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        rho1, rho2 = a + a.conj().T, b + b.conj().T
        for row in template.constraints:
            lhs = row.value(0.25 * rho1 + 2.0 * rho2)
            rhs = 0.25 * row.value(rho1) + 2.0 * row.value(rho2)
            assert lhs == pytest.approx(rhs, abs=1e-12)


class TestGaugeSafety:
    def feasible_state(self, s):
        # Projected pure state with branch overlap s (the zero-noise point).
        t = math.sqrt(1.0 - s * s)
        lam1 = np.array([s, t])
        e0 = np.array([1.0, 0.0])
        psi = np.concatenate([e0, lam1]) / math.sqrt(2.0)
        return np.outer(psi, psi.conj())

    def test_a_phase_regauged_evaluations_match(self):
        s = 0.5
        template = assemble_constraints(vacuum_probe(0.5), make_estimate(s))
        rho = self.feasible_state(s)
        theta = 0.77
        ua = np.kron(np.diag([1.0, np.exp(1j * theta)]), np.eye(2))
        rotated = ua @ rho @ ua.conj().T
        # Re-gauge: rotate back by the phase that restores a real-positive
        # corner element of the coherence block.
        z0 = rotated[0, 2]
        phase = z0 / abs(z0)
        ug = np.kron(np.diag([1.0, phase]), np.eye(2))
        regauged = ug @ rotated @ ug.conj().T
        for row in template.constraints:
            assert row.value(regauged) == pytest.approx(row.value(rho), abs=1e-9)
        zc = corner_functional(template.basis)
        assert np.trace(zc @ regauged) == pytest.approx(
            np.trace(zc @ rho), abs=1e-9
        )

    def test_b_phase_with_rebuilt_frame_matches(self):
        from entbound.projection import _braket_matrix

        s = 0.5
        t = math.sqrt(1.0 - s * s)
        rho = self.feasible_state(s)
        phi = -1.3
        ub = np.kron(np.eye(2), np.diag([1.0, np.exp(1j * phi)]))
        rotated = ub @ rho @ ub.conj().T
        lam1 = np.array([s, t])
        lam1_rot = np.array([s, t * np.exp(1j * phi)])
        for i, j in ((0, 0), (1, 1), (0, 1)):
            orig = np.trace(_braket_matrix(i, lam1, j, lam1) @ rho)
            rot = np.trace(_braket_matrix(i, lam1_rot, j, lam1_rot) @ rotated)
            assert rot == pytest.approx(orig, abs=1e-9)


class TestExactModeFeasibility:
    @pytest.mark.parametrize("alpha,n_bar", [(0.6, 0.1), (1.0, 0.2), (1.3, 0.05)])
    def test_true_thermal_state_satisfies_own_template(self, alpha, n_bar):
        probe, exact = simulate_thermal_splitter(
            InputSpec(alpha), ThermalSplitterChannel(n_bar)
        )
        est = with_exact(estimate(probe), exact.lambda0, exact.lambda1, exact.overlap_s)
        template = assemble_constraints(probe, est, mode="exact")
        rho_true, s_oracle = thermal_true_projected_state(alpha, n_bar)
        assert s_oracle == pytest.approx(exact.overlap_s, abs=1e-12)
        min_eig = float(np.linalg.eigvalsh(rho_true)[0])
        violations = constraint_violations(template, rho_true, min_eig)
        worst = max(violations.items(), key=lambda kv: kv[1])
        assert worst[1] <= 1e-9, f"violated {worst}"
