"""Command-line front-end.

Verbs: ``estimate`` and ``bound`` operate on TOML probe files; ``sweep``
and ``thermal`` reproduce the loss/noise and thermal-splitter surfaces as
CSV; ``selftest`` runs a quick built-in check.

Exit codes: 0 success, 2 parse error, 3 estimation domain error, 4 solver
failure, 5 data inconsistent with any physical state, 6 partial sweep
failure (NaN rows present).  All numeric output uses 9 significant digits
with locale-independent decimal points.
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .bound import DataInconsistentError, SolverFailureError, min_negativity
from .channels import (
    ExactSubspace,
    InputSpec,
    LossNoiseChannel,
    ThermalSplitterChannel,
    displaced_thermal_subspace,
    initial_negativity,
    simulate_loss_noise,
    simulate_thermal_splitter,
)
from .estimation import (
    ConditionalMoments,
    EstimationDomainError,
    ProbeRecord,
    estimate,
    offdiag_floors,
)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_DOMAIN = 3
EXIT_SOLVER = 4
EXIT_INCONSISTENT = 5
EXIT_PARTIAL = 6


class ProbeFileError(ValueError):
    """Probe file failed to parse or validate."""


def _fmt(x: float) -> str:
    if isinstance(x, float) and math.isnan(x):
        return "NaN"
    return f"{x:.9g}"


def load_probe_file(path: str) -> tuple[ProbeRecord, ExactSubspace | None]:
    """Parse and validate a TOML probe file.

    Exactly one of ``input_overlap_c`` and ``alpha`` must be present at the
    top level; ``state0``/``state1`` tables carry the four conditional
    moments each; an optional ``exact`` table carries the exactly known
    subspace parameters.
    """
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as err:
        raise ProbeFileError(f"cannot read {path}: {err}") from None
    except tomllib.TOMLDecodeError as err:
        raise ProbeFileError(f"{path}: invalid TOML: {err}") from None

    known_top = {"input_overlap_c", "alpha", "state0", "state1", "exact"}
    unknown = set(doc) - known_top
    if unknown:
        raise ProbeFileError(f"{path}: unknown field(s) {sorted(unknown)}")

    has_c = "input_overlap_c" in doc
    has_alpha = "alpha" in doc
    if has_c == has_alpha:
        raise ProbeFileError(
            f"{path}: exactly one of input_overlap_c / alpha is required"
        )
    try:
        if has_alpha:
            c = InputSpec(float(doc["alpha"])).overlap_c
        else:
            c = float(doc["input_overlap_c"])

        states = []
        for name in ("state0", "state1"):
            if name not in doc:
                raise ProbeFileError(f"{path}: missing [{name}] table")
            table = doc[name]
            missing = {"mean_x", "mean_p", "var_x", "var_p"} - set(table)
            if missing:
                raise ProbeFileError(
                    f"{path}: [{name}] missing field(s) {sorted(missing)}"
                )
            extra = set(table) - {"mean_x", "mean_p", "var_x", "var_p"}
            if extra:
                raise ProbeFileError(
                    f"{path}: [{name}] unknown field(s) {sorted(extra)}"
                )
            states.append(
                ConditionalMoments(
                    float(table["mean_x"]),
                    float(table["mean_p"]),
                    float(table["var_x"]),
                    float(table["var_p"]),
                )
            )
        probe = ProbeRecord(states[0], states[1], c)

        exact = None
        if "exact" in doc:
            table = doc["exact"]
            missing = {"lambda0", "lambda1", "overlap_s"} - set(table)
            if missing:
                raise ProbeFileError(
                    f"{path}: [exact] missing field(s) {sorted(missing)}"
                )
            exact = ExactSubspace(
                float(table["lambda0"]),
                float(table["lambda1"]),
                float(table["overlap_s"]),
            )
    except (TypeError, ValueError) as err:
        if isinstance(err, ProbeFileError):
            raise
        raise ProbeFileError(f"{path}: {err}") from None
    return probe, exact


def cmd_estimate(args) -> int:
    probe, _ = load_probe_file(args.file)
    est = estimate(probe)
    floors = offdiag_floors(
        probe.input_overlap_c, est.defects.U0, est.defects.U1, est.b_upper
    )
    print(f"U0={_fmt(est.defects.U0)}")
    print(f"U1={_fmt(est.defects.U1)}")
    print(f"kappa={_fmt(est.kappa)}")
    print(f"b_lower={_fmt(est.b_lower)}")
    print(f"b_upper={_fmt(est.b_upper)}")
    print(f"r0={_fmt(floors.r0)}")
    print(f"r1={_fmt(floors.r1)}")
    return EXIT_OK


def cmd_bound(args) -> int:
    probe, exact = load_probe_file(args.file)
    if args.mode == "exact" and exact is None:
        raise ProbeFileError(f"{args.file}: --mode exact requires an [exact] table")
    result = min_negativity(probe, sides=args.sides, mode=args.mode, exact=exact)
    print(f"bound={_fmt(result.bound)}")
    print(f"mode={result.mode}")
    print(f"sides={result.polygon_sides}")
    for region_id, objective, status in result.region_minima:
        print(f"region{region_id}.objective={_fmt(objective)}")
        print(f"region{region_id}.status={status}")
    return EXIT_OK


@dataclass(frozen=True)
class _SweepPoint:
    c: float
    V: float
    T: float
    sides: int
    mode: str


def _sweep_eval(point: _SweepPoint) -> float:
    try:
        probe = simulate_loss_noise(
            InputSpec.from_overlap(point.c), LossNoiseChannel(point.T, point.V)
        )
        exact = None
        if point.mode == "exact":
            exact = displaced_thermal_subspace(
                InputSpec.from_overlap(point.c), LossNoiseChannel(point.T, point.V)
            )
        return min_negativity(
            probe, sides=point.sides, mode=point.mode, exact=exact
        ).bound
    except (EstimationDomainError, DataInconsistentError, SolverFailureError):
        return float("nan")


def _thermal_eval(point: tuple[float, float, int]) -> tuple[float, float]:
    alpha, n_bar, sides = point
    try:
        probe, exact = simulate_thermal_splitter(
            InputSpec(alpha), ThermalSplitterChannel(n_bar)
        )
        est_bound = min_negativity(probe, sides=sides).bound
        ex_bound = min_negativity(probe, sides=sides, mode="exact", exact=exact).bound
        return est_bound, ex_bound
    except (EstimationDomainError, DataInconsistentError, SolverFailureError):
        return float("nan"), float("nan")


def _parallel_map(fn, points, jobs: int):
    """Order-preserving map, parallel across grid points when jobs > 1."""
    if jobs <= 1:
        return [fn(p) for p in points]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, points))


def _parse_grid(spec: str, name: str) -> np.ndarray:
    parts = spec.split(":")
    if len(parts) != 3:
        raise ProbeFileError(f"--{name} expects min:max:steps, got {spec!r}")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ProbeFileError(f"--{name}: cannot parse {spec!r}") from None
    if steps < 1:
        raise ProbeFileError(f"--{name}: steps must be >= 1")
    if hi < lo:
        raise ProbeFileError(f"--{name}: max must be >= min")
    return np.linspace(lo, hi, steps)


def cmd_sweep(args) -> int:
    v_grid = _parse_grid(args.V, "V")
    c_grid = _parse_grid(args.c, "c")
    points = [
        _SweepPoint(float(c), float(v), args.T, args.sides, args.mode)
        for c in c_grid
        for v in v_grid
    ]
    bounds = _parallel_map(_sweep_eval, points, args.jobs)
    failed = 0
    with open(args.out, "w", newline="") as fh:
        fh.write("c,V,T,bound,initial_negativity,sides,mode\n")
        for point, bound in zip(points, bounds):
            if math.isnan(bound):
                failed += 1
            ref = initial_negativity(point.c, point.T)
            fh.write(
                f"{_fmt(point.c)},{_fmt(point.V)},{_fmt(point.T)},{_fmt(bound)},"
                f"{_fmt(ref)},{point.sides},{point.mode}\n"
            )
    print(f"wrote {len(points)} rows to {args.out} ({failed} failed)")
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_thermal(args) -> int:
    n_grid = _parse_grid(args.nbar, "nbar")
    a_grid = _parse_grid(args.alpha, "alpha")
    points = [
        (float(a), float(n), args.sides) for a in a_grid for n in n_grid
    ]
    results = _parallel_map(_thermal_eval, points, args.jobs)
    failed = 0
    with open(args.out, "w", newline="") as fh:
        fh.write("alpha,c,n_bar,V,bound_estimated,bound_exact,sides\n")
        for (alpha, n_bar, sides), (est_b, ex_b) in zip(points, results):
            if math.isnan(est_b) or math.isnan(ex_b):
                failed += 1
            c = InputSpec(alpha).overlap_c
            fh.write(
                f"{_fmt(alpha)},{_fmt(c)},{_fmt(n_bar)},{_fmt(n_bar)},"
                f"{_fmt(est_b)},{_fmt(ex_b)},{sides}\n"
            )
    print(f"wrote {len(points)} rows to {args.out} ({failed} failed)")
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_selftest(args) -> int:
    from .hermitian import negativity, partial_transpose_A

    checks = []

    bell = np.zeros((4, 4), dtype=complex)
    bell[0, 0] = bell[0, 3] = bell[3, 0] = bell[3, 3] = 0.5
    checks.append(("bell negativity = 1", abs(negativity(bell) - 1.0) <= 1e-9))
    checks.append(
        (
            "partial transpose involution",
            np.array_equal(partial_transpose_A(partial_transpose_A(bell)), bell),
        )
    )

    probe = simulate_loss_noise(InputSpec.from_overlap(0.5), LossNoiseChannel(1.0, 0.0))
    est = estimate(probe)
    checks.append(("zero-noise defect bounds", est.defects.U0 == 0.0))
    result = min_negativity(probe)
    checks.append(
        (
            "zero-noise tightness at c = 0.5",
            abs(result.bound - math.sqrt(0.75)) <= 1e-3,
        )
    )

    noisy = simulate_loss_noise(InputSpec.from_overlap(0.5), LossNoiseChannel(1.0, 0.15))
    checks.append(("noisy bound trivial", min_negativity(noisy).bound == 0.0))

    ok = True
    for name, passed in checks:
        print(f"[{'PASS' if passed else 'FAIL'}] {name}")
        ok = ok and passed
    return EXIT_OK if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entbound",
        description="Certified lower bounds on channel entanglement from homodyne moments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="print estimation parameters for a probe file")
    p.add_argument("file")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("bound", help="compute the negativity lower bound for a probe file")
    p.add_argument("file")
    p.add_argument("--sides", type=int, choices=(4, 8), default=4)
    p.add_argument("--mode", choices=("estimated", "exact"), default="estimated")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("sweep", help="loss/noise channel sweep to CSV")
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--V", required=True, metavar="MIN:MAX:STEPS")
    p.add_argument("--c", required=True, metavar="MIN:MAX:STEPS")
    p.add_argument("--sides", type=int, choices=(4, 8), default=4)
    p.add_argument("--mode", choices=("estimated", "exact"), default="estimated")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("thermal", help="thermal beam-splitter sweep to CSV")
    p.add_argument("--nbar", required=True, metavar="MIN:MAX:STEPS")
    p.add_argument("--alpha", required=True, metavar="MIN:MAX:STEPS")
    p.add_argument("--sides", type=int, choices=(4, 8), default=4)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_thermal)

    p = sub.add_parser("selftest", help="run built-in sanity checks")
    p.set_defaults(func=cmd_selftest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ProbeFileError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_PARSE
    except EstimationDomainError as err:
        print(f"error: estimation domain: {err}", file=sys.stderr)
        return EXIT_DOMAIN
    except DataInconsistentError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except SolverFailureError as err:
        print(f"error: solver failure: {err}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
