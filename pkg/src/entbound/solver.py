"""Small dense semidefinite programming solver.

Problems are stated over complex Hermitian variable blocks with real
linear equality and inequality rows.  Internally each block is mapped to
its real symmetric embedding (coefficients scaled by 1/2 so objective and
constraint values keep their complex-level meaning), inequalities gain
nonnegative slack variables, and the resulting standard-form problem

    minimize <C, X>  subject to  <A_i, X> = b_i,  X in PSD x PSD x ... x R+^k

is solved by an infeasible-start primal-dual interior-point method with
Nesterov-Todd scaling and a Mehrotra predictor-corrector step.  Fixed
step parameters; deterministic for identical inputs.

Problem sizes here are tiny (blocks <= 12x12 embedded, a few dozen rows),
so robustness comes from the method rather than from tuning.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .hermitian import from_real_embedding, real_embedding

GAP_TOL = 1e-7
FEAS_TOL = 1e-8
MAX_ITER = 200

_STEP_FRACTION = 0.98
_TARGET_GAP = 5e-11
_RAY_EIG_TOL = 1e-8
_RAY_OBJ_TOL = 1e-6
_TRACE = False


@dataclass(frozen=True)
class EqualityRow:
    """Sum of Tr(coeffs[k] @ block_k) == rhs; None coefficients are zero."""

    coeffs: tuple
    rhs: float
    label: str = ""


@dataclass(frozen=True)
class InequalityRow:
    """Sum of Tr(coeffs[k] @ block_k) (sense) rhs, sense in {'>=', '<='}."""

    coeffs: tuple
    sense: str
    rhs: float
    label: str = ""


@dataclass(frozen=True)
class SDProblem:
    """Standard-form SDP over complex Hermitian PSD blocks."""

    block_dims: tuple[int, ...]
    objective: tuple
    equalities: tuple[EqualityRow, ...]
    inequalities: tuple[InequalityRow, ...]


@dataclass(frozen=True)
class SDSolution:
    """Solver certificate.

    ``status`` is one of "optimal", "infeasible", "numerical_failure".
    ``objective`` is reported from the safe side: the dual value of the
    returned certificate, which never exceeds the true minimum when the
    dual residual is negligible; it sits within ``duality_gap`` of the
    near-feasible primal value ``primal_objective``.  ``primal_blocks``
    are the complex Hermitian blocks recovered from the embedding (only
    meaningful for optimal status).
    """

    status: str
    objective: float
    primal_blocks: tuple
    duality_gap: float
    iterations: int
    primal_objective: float = float("nan")
    message: str = ""
    residuals: dict = field(default_factory=dict)


def _sym(m):
    return 0.5 * (m + m.T)


def _embed(coeff, dim):
    if coeff is None:
        return np.zeros((2 * dim, 2 * dim))
    return 0.5 * real_embedding(np.asarray(coeff, dtype=complex))


class _StandardForm:
    """Real standard-form data: symmetric blocks plus one LP slack block."""

    def __init__(self, problem: SDProblem):
        dims = problem.block_dims
        rows = list(problem.equalities) + list(problem.inequalities)
        self.m = len(rows)
        self.n_lp = len(problem.inequalities)
        self.sym_dims = [2 * d for d in dims]
        self.C_sym = [_embed(c, d) for c, d in zip(problem.objective, dims)]
        self.A_sym = [
            np.stack([_embed(row.coeffs[k], d) for row in rows])
            for k, d in enumerate(dims)
        ]
        self.b = np.array([row.rhs for row in rows], dtype=float)
        # Slack columns: <A, X> + sign * s = rhs.
        self.A_lp = np.zeros((self.m, self.n_lp))
        n_eq = len(problem.equalities)
        for j, row in enumerate(problem.inequalities):
            self.A_lp[n_eq + j, j] = 1.0 if row.sense == "<=" else -1.0
        self.C_lp = np.zeros(self.n_lp)
        self.nu = sum(self.sym_dims) + self.n_lp

    def apply_A(self, X_sym, x_lp):
        out = np.zeros(self.m)
        for A, X in zip(self.A_sym, X_sym):
            out += np.einsum("iab,ab->i", A, X)
        if self.n_lp:
            out += self.A_lp @ x_lp
        return out

    def apply_AT(self, y):
        blocks = [np.einsum("i,iab->ab", y, A) for A in self.A_sym]
        lp = self.A_lp.T @ y if self.n_lp else np.zeros(0)
        return blocks, lp


def _nt_block(x, z):
    """NT scaling data (w, g, g_inv, v_spectrum, z_inv) for one PSD block."""
    dz, qz = np.linalg.eigh(z)
    dz = np.maximum(dz, 1e-300)
    rt_z = (qz * np.sqrt(dz)) @ qz.T
    irt_z = (qz / np.sqrt(dz)) @ qz.T
    z_inv = (qz / dz) @ qz.T
    mid = _sym(rt_z @ x @ rt_z)
    dm, qm = np.linalg.eigh(mid)
    dm = np.maximum(dm, 1e-300)
    rt_mid = (qm * np.sqrt(dm)) @ qm.T
    w = _sym(irt_z @ rt_mid @ irt_z)
    dw, qw = np.linalg.eigh(w)
    dw = np.maximum(dw, 1e-300)
    g = (qw * np.sqrt(dw)) @ qw.T
    g_inv = (qw / np.sqrt(dw)) @ qw.T
    v = _sym(g @ z @ g)
    dv, qv = np.linalg.eigh(v)
    return w, g, g_inv, (np.maximum(dv, 1e-300), qv), z_inv


def _max_step_sym(x, d):
    """Largest alpha with x + alpha*d >= 0 (x strictly PD)."""
    if not np.all(np.isfinite(d)):
        return 0.0
    try:
        L = np.linalg.cholesky(x)
    except np.linalg.LinAlgError:
        dx, qx = np.linalg.eigh(x)
        dx = np.maximum(dx, 1e-150)
        L = (qx * np.sqrt(dx)) @ qx.T
    try:
        inner = np.linalg.solve(L, np.linalg.solve(L, d).T).T
    except np.linalg.LinAlgError:
        return 0.0
    if not np.all(np.isfinite(inner)):
        return 0.0
    lam = np.linalg.eigvalsh(_sym(inner))[0]
    if lam >= -1e-14:
        return np.inf
    return -1.0 / lam


def _max_step_lp(x, d):
    neg = d < 0
    if not np.any(neg):
        return np.inf
    return float(np.min(-x[neg] / d[neg]))


def solve(
    problem: SDProblem,
    gap_tol: float = GAP_TOL,
    feas_tol: float = FEAS_TOL,
    max_iter: int = MAX_ITER,
) -> SDSolution:
    """Solve a block SDP to high accuracy.

    Declares "optimal" only when both residual norms are below ``feas_tol``
    (relative to the data scale) and the absolute duality gap is below
    ``gap_tol``; internally iterates to a tighter target so downstream
    orderings hold well inside the reported tolerance.  Infeasibility is
    declared through a dual improving-ray certificate; everything else
    that stalls becomes "numerical_failure" with a residual report.
    """
    # Endgame overflow on degenerate problems is an expected breakdown
    # signal; finiteness guards handle it, so the warnings stay quiet.
    with np.errstate(all="ignore"):
        return _solve_loop(problem, gap_tol, feas_tol, max_iter)


def _solve_loop(problem, gap_tol, feas_tol, max_iter) -> SDSolution:
    sf = _StandardForm(problem)
    X = [np.eye(d) for d in sf.sym_dims]
    x_lp = np.ones(sf.n_lp)
    Z = [np.eye(d) for d in sf.sym_dims]
    z_lp = np.ones(sf.n_lp)
    y = np.zeros(sf.m)

    b_scale = 1.0 + float(np.max(np.abs(sf.b))) if sf.m else 1.0
    c_scale = 1.0 + max(
        [float(np.max(np.abs(c))) if c.size else 0.0 for c in sf.C_sym] + [0.0]
    )

    def residuals():
        rp = sf.b - sf.apply_A(X, x_lp)
        at_blocks, at_lp = sf.apply_AT(y)
        Rd = [c - z - at for c, z, at in zip(sf.C_sym, Z, at_blocks)]
        rd_lp = sf.C_lp - z_lp - at_lp
        return rp, Rd, rd_lp

    def dual_ray_status():
        ynorm = float(np.max(np.abs(y))) if sf.m else 0.0
        if ynorm < 10.0 or not np.isfinite(ynorm):
            return None
        yr = y / ynorm
        at_blocks, at_lp = sf.apply_AT(yr)
        lam = max(
            [np.linalg.eigvalsh(_sym(a))[-1] for a in at_blocks]
            + ([float(np.max(at_lp))] if sf.n_lp else [])
        )
        if lam <= _RAY_EIG_TOL and float(sf.b @ yr) >= _RAY_OBJ_TOL:
            return "infeasible"
        return None

    status = "numerical_failure"
    message = ""
    it = 0
    gap = np.inf
    pobj = dobj = np.nan
    stall = 0
    best = None  # (gap, pobj, dobj, X, x_lp, rp_norm, rd_norm, iteration)

    for it in range(1, max_iter + 1):
        if not all(np.all(np.isfinite(v)) for v in (*X, *Z, x_lp, z_lp, y)):
            message = "iterates lost finiteness"
            break
        rp, Rd, rd_lp = residuals()
        mu = (
            sum(float(np.sum(x * z)) for x, z in zip(X, Z))
            + float(x_lp @ z_lp)
        ) / sf.nu
        if mu <= 0.0 or not np.isfinite(mu):
            message = f"complementarity measure degenerated (mu = {mu:.3e})"
            break
        if mu < 1e-13:
            message = "complementarity exhausted double precision"
            break
        pobj = sum(float(np.sum(c * x)) for c, x in zip(sf.C_sym, X))
        dobj = float(sf.b @ y)
        gap = abs(pobj - dobj)
        rp_norm = float(np.max(np.abs(rp))) if sf.m else 0.0
        rd_norm = max(
            [float(np.max(np.abs(r))) for r in Rd]
            + ([float(np.max(np.abs(rd_lp)))] if sf.n_lp else [0.0])
        )
        feasible = rp_norm <= feas_tol * b_scale and rd_norm <= feas_tol * c_scale
        if feasible and (best is None or gap < best[0]):
            best = (
                gap, pobj, dobj, [x.copy() for x in X], x_lp.copy(),
                rp_norm, rd_norm, it,
            )
        if feasible and (gap <= _TARGET_GAP or (gap <= gap_tol and stall >= 2)):
            status = "optimal"
            break
        if _TRACE:
            print(
                f"    it={it:3d} mu={mu:9.2e} gap={gap:9.2e} "
                f"rp={rp_norm:9.2e} rd={rd_norm:9.2e} |y|={np.max(np.abs(y)) if sf.m else 0:9.2e}"
            )
        ray = dual_ray_status()
        if ray is not None:
            status = ray
            message = f"dual improving ray found at iteration {it}"
            break

        # Nesterov-Todd scaling per block.
        scal = [_nt_block(x, z) for x, z in zip(X, Z)]
        w_lp2 = x_lp / z_lp if sf.n_lp else np.zeros(0)

        waw = [
            np.matmul(np.matmul(s[0][None, :, :], A), s[0][None, :, :])
            for s, A in zip(scal, sf.A_sym)
        ]
        S = sum(np.einsum("iab,jab->ij", A, w) for A, w in zip(sf.A_sym, waw))
        if sf.n_lp:
            S = S + (sf.A_lp * w_lp2) @ sf.A_lp.T
        S = 0.5 * (S + S.T)
        jitter = 0.0
        for _ in range(4):
            try:
                L_s = np.linalg.cholesky(S + jitter * np.eye(sf.m))
                break
            except np.linalg.LinAlgError:
                jitter = max(1e-13, 10.0 * jitter) * (1.0 + abs(float(np.trace(S))))
        else:
            message = "Schur complement factorization failed"
            break

        def schur_solve(rhs):
            dy = np.linalg.solve(L_s.T, np.linalg.solve(L_s, rhs))
            # Two rounds of iterative refinement; the Schur complement gets
            # severely ill-conditioned in the degenerate endgame and the
            # primal residual stalls without this.
            for _ in range(2):
                resid = rhs - S @ dy
                dy = dy + np.linalg.solve(L_s.T, np.linalg.solve(L_s, resid))
            return dy

        def newton_raw(rp_k, Rd_k, rd_lp_k, Rc_sym, rc_lp):
            t_blocks = [
                rc - s[0] @ rd @ s[0] for rc, rd, s in zip(Rc_sym, Rd_k, scal)
            ]
            t_lp = rc_lp - w_lp2 * rd_lp_k if sf.n_lp else np.zeros(0)
            rhs = rp_k - sf.apply_A(t_blocks, t_lp)
            dy = schur_solve(rhs)
            at_blocks, at_lp = sf.apply_AT(dy)
            dZ = [rd - at for rd, at in zip(Rd_k, at_blocks)]
            dz = rd_lp_k - at_lp if sf.n_lp else np.zeros(0)
            dX = [
                _sym(rc - s[0] @ d @ s[0]) for rc, d, s in zip(Rc_sym, dZ, scal)
            ]
            dx = rc_lp - w_lp2 * dz if sf.n_lp else np.zeros(0)
            return dX, dx, dy, dZ, dz

        zero_sym = [np.zeros((d, d)) for d in sf.sym_dims]
        zero_lp = np.zeros(sf.n_lp)

        def newton(Rc_sym, rc_lp):
            cur = newton_raw(rp, Rd, rd_lp, Rc_sym, rc_lp)
            # Full-direction refinement: scaling with W amplifies rounding
            # in dX, leaving a primal-equation residual that caps achievable
            # feasibility.  Keep a round only while it actually shrinks the
            # residual; near breakdown the correction solve diverges.
            res_norm = float(np.max(np.abs(rp - sf.apply_A(cur[0], cur[1]))))
            for _ in range(3):
                if res_norm <= 1e-13 * b_scale:
                    break
                res = rp - sf.apply_A(cur[0], cur[1])
                cX, cx, cy, cZ, cz = newton_raw(
                    res, zero_sym, zero_lp, zero_sym, zero_lp
                )
                cand = (
                    [a + b for a, b in zip(cur[0], cX)],
                    cur[1] + cx,
                    cur[2] + cy,
                    [a + b for a, b in zip(cur[3], cZ)],
                    cur[4] + cz,
                )
                cand_norm = float(
                    np.max(np.abs(rp - sf.apply_A(cand[0], cand[1])))
                )
                if not np.isfinite(cand_norm) or cand_norm >= 0.5 * res_norm:
                    break
                cur, res_norm = cand, cand_norm
            return cur

        # Predictor (affine scaling direction).
        dXa, dxa, dya, dZa, dza = newton([-x for x in X], -x_lp)
        ap = min(
            [1.0]
            + [_max_step_sym(x, d) for x, d in zip(X, dXa)]
            + ([_max_step_lp(x_lp, dxa)] if sf.n_lp else [])
        )
        ad = min(
            [1.0]
            + [_max_step_sym(z, d) for z, d in zip(Z, dZa)]
            + ([_max_step_lp(z_lp, dza)] if sf.n_lp else [])
        )
        mu_aff = (
            sum(
                float(np.sum((x + ap * dx) * (z + ad * dz)))
                for x, dx, z, dz in zip(X, dXa, Z, dZa)
            )
            + (float((x_lp + ap * dxa) @ (z_lp + ad * dza)) if sf.n_lp else 0.0)
        ) / sf.nu
        sigma = min(1.0, max(1e-12, (max(mu_aff, 0.0) / mu) ** 3))
        # Keep centering alive while the iterate is residual-dominated, so
        # complementarity cannot collapse faster than feasibility improves
        # (degenerate templates pin several windows to zero width).
        if rp_norm > mu * b_scale:
            sigma = max(sigma, 0.5)

        # Corrector with the second-order term solved through the
        # Lyapunov operator of the scaling point V.
        Rc_sym = []
        for (w, g, g_inv, (dv, qv), z_inv), x, dxa_b, dza_b in zip(
            scal, X, dXa, dZa
        ):
            dx_hat = g_inv @ dxa_b @ g_inv
            dz_hat = g @ dza_b @ g
            corr = _sym(dx_hat @ dz_hat)
            corr_t = qv.T @ corr @ qv
            corr_t = corr_t * (2.0 / (dv[:, None] + dv[None, :]))
            corr = g @ (qv @ corr_t @ qv.T) @ g
            Rc_sym.append(_sym(sigma * mu * z_inv - x - corr))
        rc_lp = (
            sigma * mu / z_lp - x_lp - dxa * dza / z_lp if sf.n_lp else np.zeros(0)
        )
        dX, dx, dy, dZ, dz = newton(Rc_sym, rc_lp)

        ap = _STEP_FRACTION * min(
            [1.0 / _STEP_FRACTION]
            + [_max_step_sym(x, d) for x, d in zip(X, dX)]
            + ([_max_step_lp(x_lp, dx)] if sf.n_lp else [])
        )
        ad = _STEP_FRACTION * min(
            [1.0 / _STEP_FRACTION]
            + [_max_step_sym(z, d) for z, d in zip(Z, dZ)]
            + ([_max_step_lp(z_lp, dz)] if sf.n_lp else [])
        )
        ap, ad = min(ap, 1.0), min(ad, 1.0)
        if ap < 1e-10 and ad < 1e-10:
            stall += 1
            if stall >= 3:
                message = "step lengths collapsed"
                break
        elif gap <= gap_tol:
            stall += 1
        else:
            stall = 0
        X_new = [x + ap * d for x, d in zip(X, dX)]
        x_lp_new = x_lp + ap * dx
        y_new = y + ad * dy
        Z_new = [z + ad * d for z, d in zip(Z, dZ)]
        z_lp_new = z_lp + ad * dz
        if not all(
            np.all(np.isfinite(v))
            for v in (*X_new, *Z_new, x_lp_new, z_lp_new, y_new)
        ):
            message = "step produced non-finite iterates"
            break
        X, x_lp, y, Z, z_lp = X_new, x_lp_new, y_new, Z_new, z_lp_new
    else:
        message = f"iteration cap {max_iter} reached"

    rp, Rd, rd_lp = residuals()
    rp_norm = float(np.max(np.abs(rp))) if sf.m else 0.0
    rd_norm = max(
        [float(np.max(np.abs(r))) for r in Rd]
        + ([float(np.max(np.abs(rd_lp)))] if sf.n_lp else [0.0])
    )
    if status == "numerical_failure" and not message:
        message = "no convergence"
    if status not in ("optimal", "infeasible"):
        ray = dual_ray_status()
        if ray is not None:
            status = ray
            message = message or "dual improving ray found at termination"
    if status == "numerical_failure" and best is not None and best[0] <= gap_tol:
        # The endgame drifted but an earlier iterate already certified the
        # requested accuracy; return that one.
        gap, pobj, dobj, X, x_lp, rp_norm, rd_norm, best_it = best
        status = "optimal"
        message = f"returned best iterate from iteration {best_it}"
    if status == "numerical_failure":
        message += (
            f" (max primal residual {rp_norm:.2e}, dual residual {rd_norm:.2e},"
            f" gap {gap:.2e})"
        )
    blocks = tuple(from_real_embedding(x) for x in X)
    # Safe-side objective: the dual value minus a conservative allowance
    # for the (tiny) dual infeasibility of the certificate.
    certified = dobj - 50.0 * rd_norm if np.isfinite(dobj) else pobj
    return SDSolution(
        status=status,
        objective=certified,
        primal_blocks=blocks,
        duality_gap=gap,
        iterations=it,
        primal_objective=pobj,
        message=message,
        residuals={"primal": rp_norm, "dual": rd_norm},
    )
