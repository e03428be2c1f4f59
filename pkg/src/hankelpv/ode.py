"""Adaptive high-order ODE integration (extrapolated midpoint / GBS).

The Gragg smoothed-midpoint rule has a pure h^2 error expansion, so
polynomial extrapolation over the even substep sequence {2,4,6,8,10}
yields an adaptive one-step method of order 10 whose tableau is exact
rational arithmetic at any working precision (published embedded
Runge-Kutta pairs of order >= 8 ship 16-digit coefficients, which would
cap endpoint accuracy far above what the verification pipelines need).
The error estimate is the difference of the last two extrapolation
columns, i.e. an embedded lower-order result.

Tolerance semantics are deliberately conservative: the internal per-step
error budget is tolerance^4 (clipped at the working precision floor), so
the local error is far below `tolerance` per unit step and halving the
tolerance cuts the achieved global error by roughly 16x.

Dense output: requested sample abscissae are made exact step endpoints,
so sampled values carry full integration accuracy with no interpolation.
Step sequences are deterministic functions of the problem and config.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from mpmath import mp, mpf

from .precision import NumericsError, PrecisionConfig, working_precision

SUBSTEP_SEQUENCE = (2, 4, 6, 8, 10, 12, 14, 16)
MIN_ACCEPT_COLUMN = 4  # advanced value has order 2*4 = 8, the contract minimum
TOLERANCE_EXPONENT = 4
SAFETY = mpf(9) / 10
DEFAULT_MAX_STEPS = 50000


class OdeHalt(NumericsError):
    """Integration stopped before x_end; carries the partial trajectory."""

    def __init__(self, message, x, y, samples):
        super().__init__(message)
        self.x = x
        self.y = y
        self.samples = samples


class SingularityHalt(OdeHalt):
    """The problem's singularity_guard fired."""


class StepUnderflowHalt(OdeHalt):
    """Step size collapsed below the precision floor."""


@dataclass
class OdeProblem:
    dimension: int
    rhs: Callable
    x0: object
    y0: Sequence
    x_end: object
    tolerance: object
    singularity_guard: Optional[Callable] = None
    max_steps: int = DEFAULT_MAX_STEPS


def _midpoint_pass(rhs, x, y, H, n):
    """Gragg's smoothed modified midpoint with n substeps; None on overflow."""
    h = H / n
    z_prev = list(y)
    f0 = rhs(x, z_prev)
    if f0 is None:
        return None
    z_cur = [y[i] + h * f0[i] for i in range(len(y))]
    for k in range(1, n):
        fk = rhs(x + k * h, z_cur)
        if fk is None:
            return None
        z_next = [z_prev[i] + 2 * h * fk[i] for i in range(len(y))]
        z_prev, z_cur = z_cur, z_next
    fn = rhs(x + H, z_cur)
    if fn is None:
        return None
    return [(z_cur[i] + z_prev[i] + h * fn[i]) / 2 for i in range(len(y))]


def _finite(values):
    return all(mp.isfinite(v) for v in values)


def solve_ode(problem: OdeProblem, config: PrecisionConfig, sample_points=None):
    """Integrate problem.rhs from x0 to x_end.

    Returns the trajectory as a list of (x, y_list) pairs containing x0,
    every accepted step endpoint (which includes all requested sample
    points), and x_end. Raises SingularityHalt / StepUnderflowHalt with
    the partial trajectory attached when integration cannot proceed.
    """
    with working_precision(config, extra_bits=64):
        x = mpf(problem.x0)
        x_end = mpf(problem.x_end)
        y = [mpf(v) for v in problem.y0]
        if len(y) != problem.dimension:
            raise ValueError("y0 length does not match problem dimension")
        tol = mpf(problem.tolerance)
        if tol <= 0:
            raise ValueError("tolerance must be positive")
        min_tol = mpf(10) ** (-config.target_digits)
        if tol < min_tol:
            raise ValueError(
                f"tolerance {tol} below 10^-target_digits = {min_tol}"
            )
        budget = max(tol**TOLERANCE_EXPONENT, mpf(2) ** (-(config.bits - 48)))
        span = x_end - x
        if span == 0:
            return [(x, list(y))]
        direction = 1 if span > 0 else -1

        checkpoints = []
        if sample_points is not None:
            checkpoints = sorted((mpf(p) for p in sample_points), reverse=(direction < 0))
            for p in checkpoints:
                if (p - x) * direction < 0 or (x_end - p) * direction < 0:
                    raise ValueError(f"sample point {p} outside integration range")
        checkpoints.append(x_end)

        samples = [(x, list(y))]
        h_floor_rel = mpf(2) ** (-(config.bits // 2))
        H = abs(span) / 16
        steps = 0
        guard = problem.singularity_guard

        def wrapped_rhs(xx, yy):
            vals = problem.rhs(xx, yy)
            vals = [mpf(v) for v in vals]
            if not _finite(vals):
                return None
            return vals

        for target in checkpoints:
            while (target - x) * direction > 0:
                if guard is not None and guard(x, y):
                    raise SingularityHalt(
                        f"singularity guard fired at x={mp.nstr(x, 17)}",
                        x=x, y=list(y), samples=samples,
                    )
                clamped = abs(target - x) <= H
                H = min(H, abs(target - x))
                while True:
                    steps += 1
                    if steps > problem.max_steps:
                        raise StepUnderflowHalt(
                            "step budget exhausted", x=x, y=list(y), samples=samples
                        )
                    if H < h_floor_rel * max(1, abs(x)):
                        raise StepUnderflowHalt(
                            f"step size underflow at x={mp.nstr(x, 17)}",
                            x=x, y=list(y), samples=samples,
                        )
                    Hs = direction * H
                    # Aitken-Neville rows T[j][k] in (H/n_j)^2; accept at the
                    # first column >= MIN_ACCEPT_COLUMN whose embedded error
                    # fits the budget (variable order, never below 8)
                    rows = []
                    failed = False
                    accepted = None
                    err = None
                    for j, n in enumerate(SUBSTEP_SEQUENCE):
                        entry = _midpoint_pass(wrapped_rhs, x, y, Hs, n)
                        if entry is None or not _finite(entry):
                            failed = True
                            break
                        row = [entry]
                        for k in range(1, j + 1):
                            ratio = (mpf(n) / SUBSTEP_SEQUENCE[j - k]) ** 2
                            prev = row[k - 1]
                            diag = rows[j - 1][k - 1]
                            row.append(
                                [
                                    prev[i] + (prev[i] - diag[i]) / (ratio - 1)
                                    for i in range(problem.dimension)
                                ]
                            )
                        rows.append(row)
                        if j >= MIN_ACCEPT_COLUMN:
                            # advance with row[j-1] (order 2j); the difference
                            # against row[j] estimates exactly its local error,
                            # so the realized error tracks the budget linearly
                            y_new = row[j - 1]
                            err = mpf(0)
                            for i in range(problem.dimension):
                                scale = budget * H * (1 + abs(y_new[i]))
                                err = max(err, abs(row[j][i] - y_new[i]) / scale)
                            if err <= 1 and _finite(y_new):
                                accepted = (j, y_new)
                                break
                    if failed:
                        H = H / 2
                        clamped = False
                        continue
                    if accepted is not None:
                        j, y_new = accepted
                        # land exactly on the checkpoint when H was clamped
                        x = target if clamped else x + Hs
                        y = y_new
                        samples.append((x, list(y)))
                        grow = SAFETY * (err + mpf(2) ** (-(config.bits + 64))) ** (
                            -mpf(1) / (2 * j + 1)
                        )
                        H = H * min(grow, mpf(4))
                        break
                    clamped = False
                    deepest = mpf(1) / (2 * len(SUBSTEP_SEQUENCE) - 1)
                    H = H * max(SAFETY * err ** (-deepest), mpf(1) / 4)
        return samples
