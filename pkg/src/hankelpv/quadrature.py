"""Double-exponential (tanh-sinh) quadrature.

Nodes and weights are generated once per (working precision, level) and
cached; levels refine by inserting odd multiples of the halved spacing, so
coarser-level function values are reused. Refinement stops when two
successive levels agree to the requested digits, otherwise a
ConvergenceError carrying the last two level values is raised. Summation
order is fixed (levels ascending, nodes ascending within a level), making
results bit-for-bit deterministic.

Endpoint care: a node u maps to x = tanh((pi/2) sinh u), and 1 - x is
computed directly from the exponential form so callers integrating over
(0, 1] get both endpoints at full relative precision. Integrands with the
essential singularity exp(-t/x^2) should evaluate the exponential through
`clamped_exp`, which returns exact 0 once the argument underflows the
working dynamic range instead of overflowing the tanh-sinh tails.
"""

from __future__ import annotations

import math

from mpmath import mp, mpf

from .precision import NumericsError, PrecisionConfig, working_precision

GUARD_BITS = 64
MAX_LEVEL = 12
FIRST_CHECK_LEVEL = 3

_NODE_CACHE: dict = {}


class ConvergenceError(NumericsError):
    """Successive quadrature levels failed to agree."""

    def __init__(self, message, last_two=None):
        super().__init__(message)
        self.last_two = last_two


def clamped_exp(x) -> mpf:
    """exp(x), or exact 0 once x underflows the working dynamic range."""
    if x < -0.6931471805599453 * (mp.prec + 2 * GUARD_BITS):
        return mpf(0)
    return mp.exp(x)


def _u_max(prec: int) -> float:
    # beyond u_max both the weight and the endpoint distance drop below
    # 2^-(prec+48): pi*sinh(u) = (prec+48)*ln2
    return math.asinh((prec + 48) * math.log(2.0) / math.pi)


def _level_nodes(prec: int, level: int):
    """New nodes at `level` for working precision `prec`.

    Returns a list of (x, one_minus_x, weight) for u > 0, plus the u = 0
    node first when level == 0. Entries for u < 0 follow by symmetry:
    x -> -x with the same weight, and 1 - (-x) = 1 + x is benign.
    """
    key = (prec, level)
    cached = _NODE_CACHE.get(key)
    if cached is not None:
        return cached
    nodes = []
    with working_precision(prec):
        umax = _u_max(prec)
        h = mpf(2) ** (-level)
        half_pi = mp.pi / 2
        if level == 0:
            ks = range(0, int(umax) + 1)
        else:
            ks = range(1, int(umax * 2**level) + 1, 2)
        for k in ks:
            u = k * h
            s = half_pi * mp.sinh(u)
            # x = tanh(s); 1 - x = 2 / (e^{2s} + 1) evaluated stably
            e2s = mp.exp(2 * s)
            omx = 2 / (e2s + 1)
            x = 1 - omx
            w = half_pi * mp.cosh(u) / mp.cosh(s) ** 2
            nodes.append((x, omx, w))
    _NODE_CACHE[key] = nodes
    return nodes


def _refine(eval_level, config: PrecisionConfig, target_digits, description):
    """Drive level refinement until two successive sums agree.

    Agreement is measured against the integral of |f| rather than the value
    itself, so integrals that vanish by cancellation (orthogonality inner
    products) converge once the increments settle at the attainable floor.
    """
    digits = config.target_digits if target_digits is None else target_digits
    prec = config.bits + GUARD_BITS
    with working_precision(prec):
        tol = mpf(10) ** (-(digits + 3))
        running = None
        running_abs = mpf(0)
        previous_value = None
        for level in range(0, MAX_LEVEL + 1):
            increment, increment_abs = eval_level(level, prec)
            running = increment if running is None else running + increment
            running_abs += increment_abs
            value = running * mpf(2) ** (-level)
            scale = max(abs(value), running_abs * mpf(2) ** (-level))
            if level >= FIRST_CHECK_LEVEL and previous_value is not None:
                if scale == 0 or abs(value - previous_value) <= tol * scale:
                    return value
            previous_value = value
        raise ConvergenceError(
            f"tanh-sinh failed to reach {digits} digits for {description} "
            f"within {MAX_LEVEL} levels",
            last_two=(previous_value, value),
        )


def integrate(f, interval, config: PrecisionConfig, target_digits=None) -> mpf:
    """Integral of f over a finite interval (a, b)."""
    a, b = interval
    prec = config.bits + GUARD_BITS
    with working_precision(prec):
        av, bv = mpf(a), mpf(b)
        center = (av + bv) / 2
        radius = (bv - av) / 2

    def eval_level(level, prec):
        nodes = _level_nodes(prec, level)
        total = mpf(0)
        total_abs = mpf(0)
        for x, _omx, w in nodes:
            if x == 0:
                term = w * f(center)
                total += term
                total_abs += abs(term)
            else:
                hi = center + radius * x
                lo = center - radius * x
                # nodes rounding onto an endpoint are skipped; their weight
                # is below one ulp of the level sum
                if hi < bv:
                    term = w * f(hi)
                    total += term
                    total_abs += abs(term)
                if lo > av:
                    term = w * f(lo)
                    total += term
                    total_abs += abs(term)
        return radius * total, radius * total_abs

    return _refine(eval_level, config, target_digits, f"interval ({a}, {b})")


def integrate_unit(f, config: PrecisionConfig, target_digits=None) -> mpf:
    """Integral of f over (0, 1) with both endpoints handled stably.

    The positive tanh-sinh node x maps to the pair of points
    (1+x)/2 (near 1) and (1-x)/2 (near 0); the latter uses the stored
    1-x so the distance to 0 keeps full relative precision.
    """

    def eval_level(level, prec):
        nodes = _level_nodes(prec, level)
        half = mpf(1) / 2
        total = mpf(0)
        total_abs = mpf(0)
        for x, omx, w in nodes:
            if x == 0:
                term = w * f(half)
                total += term
                total_abs += abs(term)
            else:
                hi = (1 + x) / 2
                if hi < 1:  # guard: x so close to 1 that hi rounded up
                    term = w * f(hi)
                    total += term
                    total_abs += abs(term)
                term = w * f(omx / 2)
                total += term
                total_abs += abs(term)
        return total / 2, total_abs / 2

    return _refine(eval_level, config, target_digits, "interval (0, 1)")


def integrate_even(f, config: PrecisionConfig, target_digits=None) -> mpf:
    """Integral over (-1, 1) of an even integrand, folded to (0, 1].

    Only f(x) for x in (0, 1) is ever evaluated, so integrands singular
    at 0 (tamed by clamped_exp) and at 1 are both safe.
    """

    def eval_level(level, prec):
        nodes = _level_nodes(prec, level)
        half = mpf(1) / 2
        total = mpf(0)
        total_abs = mpf(0)
        for x, omx, w in nodes:
            if x == 0:
                term = w * f(half)
                total += term
                total_abs += abs(term)
            else:
                hi = (1 + x) / 2
                if hi < 1:
                    term = w * f(hi)
                    total += term
                    total_abs += abs(term)
                term = w * f(omx / 2)
                total += term
                total_abs += abs(term)
        return total, total_abs  # 2 * (1/2) from folding and the affine map

    return _refine(eval_level, config, target_digits, "even fold of (-1, 1)")


def integrate_unit_vector(f, size, config: PrecisionConfig, target_digits=None):
    """Vector version of integrate_unit: f returns a list of `size` values.

    All components must converge; refinement stops when every component's
    successive-level agreement reaches the target.
    """
    digits = config.target_digits if target_digits is None else target_digits
    prec = config.bits + GUARD_BITS
    with working_precision(prec):
        tol = mpf(10) ** (-(digits + 3))
        running = None
        previous = None
        running_abs = [mpf(0)] * size
        for level in range(0, MAX_LEVEL + 1):
            nodes = _level_nodes(prec, level)
            half = mpf(1) / 2
            increment = [mpf(0)] * size
            for x, omx, w in nodes:
                if x == 0:
                    vals = f(half)
                    for i in range(size):
                        increment[i] += w * vals[i]
                        running_abs[i] += abs(w * vals[i])
                else:
                    hi_y = (1 + x) / 2
                    lo = f(omx / 2)
                    if hi_y < 1:
                        hi = f(hi_y)
                        for i in range(size):
                            increment[i] += w * (hi[i] + lo[i])
                            running_abs[i] += abs(w * hi[i]) + abs(w * lo[i])
                    else:
                        for i in range(size):
                            increment[i] += w * lo[i]
                            running_abs[i] += abs(w * lo[i])
            if running is None:
                running = increment
            else:
                running = [running[i] + increment[i] for i in range(size)]
            value = [running[i] * mpf(2) ** (-level) / 2 for i in range(size)]
            if level >= FIRST_CHECK_LEVEL and previous is not None:
                worst_ok = True
                for i in range(size):
                    scale = max(
                        abs(value[i]), running_abs[i] * mpf(2) ** (-level) / 2
                    )
                    if scale != 0 and abs(value[i] - previous[i]) > tol * scale:
                        worst_ok = False
                        break
                if worst_ok:
                    return value
            previous = value
        raise ConvergenceError(
            f"vector tanh-sinh failed to reach {digits} digits within "
            f"{MAX_LEVEL} levels",
            last_two=(previous, value),
        )
