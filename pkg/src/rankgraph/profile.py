"""Rank probability profiles.

The expected number of edges met when walking the ranks from 1 to x is
modelled by a rational quadratic Bezier curve through (0, 0) and (L, m), with
control point (m, m) and middle weight b. With b = 0 the curve is the chord
(Erdos-Renyi: every rank equally likely); as b grows it hugs the control
polygon (the m best-ranked pairs are edges, no others). The probability of the
pair at rank r is the increment of that curve over [r - 1, r].

Far along the curve the cumulative count is close to m and its increments are
tiny, so the tail is evaluated on the reversed curve, which measures the
remaining edges ``m - Y(x)`` directly and keeps the increments accurate.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Final

import numpy as np
import numpy.typing as npt

from rankgraph.errors import ConfigurationError, InfeasibleDensityError, NumericError, ValidationError
from rankgraph.rank import pair_arrays

if TYPE_CHECKING:
    from rankgraph.rank import RankModel

logger = logging.getLogger(__name__)

B_MAX: Final[float] = 1e8
"""Weight used for epsilon = 0 when a curve is requested anyway."""

MAX_BISECTIONS: Final[int] = 200


def _check_epsilon(epsilon: float) -> float:
    epsilon = float(epsilon)
    if not 0.0 <= epsilon <= 1.0:
        raise ValidationError(f"epsilon must lie in [0, 1], got {epsilon!r}")
    return epsilon


def _check_density(pair_count: int, m: float) -> float:
    if pair_count < 1:
        raise ValidationError(f"Need at least one node pair, got L={pair_count}")
    m = float(m)
    if not math.isfinite(m) or not 0.0 <= m <= pair_count:
        raise InfeasibleDensityError(m, pair_count)
    return m


def epsilon_to_weight(epsilon: float) -> float:
    """Map the randomness parameter to the Bezier middle weight.

    b = log(0.5) / log(1 - epsilon), so epsilon = 0.5 gives b = 1. The end
    points use the conventions b(0) = B_MAX and b(1) = 0.
    """
    epsilon = _check_epsilon(epsilon)
    if epsilon == 0.0:
        return B_MAX
    if epsilon == 1.0:
        return 0.0
    if epsilon == 0.5:
        return 1.0
    return math.log(0.5) / math.log1p(-epsilon)


def _curve(
    t: npt.NDArray[np.float64],
    b: float,
    control: tuple[float, float],
    end: tuple[float, float],
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Rational quadratic Bezier from the origin through ``control`` to ``end``."""
    s = 1.0 - t
    middle = 2.0 * b * t * s
    tt = t * t
    denominator = s * s + middle + tt
    x = (middle * control[0] + tt * end[0]) / denominator
    y = (middle * control[1] + tt * end[1]) / denominator
    return x, y


def _invert(
    target: npt.NDArray[np.float64],
    b: float,
    control: tuple[float, float],
    end: tuple[float, float],
) -> npt.NDArray[np.float64]:
    """Parameters t in [0, 0.5] with x(t) = target, by vectorized bisection.

    x(t) is strictly increasing for b > 0. Bisection runs until every bracket
    is down to one float spacing and raises NumericError if that takes more
    than MAX_BISECTIONS steps.
    """
    lo = np.zeros_like(target)
    hi = np.full_like(target, 0.5)
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (lo + hi)
        x, _y = _curve(mid, b, control, end)
        below = x < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo <= np.spacing(hi)):
            break
    else:
        raise NumericError(f"Bezier inversion did not converge in {MAX_BISECTIONS} steps (b={b:g})")
    t = 0.5 * (lo + hi)
    t[target <= 0.0] = 0.0
    return t


def _split_cumulative(
    pair_count: int, m: float, b: float, x: npt.NDArray[np.float64]
) -> tuple[npt.NDArray[np.bool_], npt.NDArray[np.float64]]:
    """Evaluate the curve at ``x``: Y on the head, m - Y on the tail."""
    length = float(pair_count)
    head_control = (m, m)
    head_end = (length, m)
    tail_control = (length - m, 0.0)

    half = np.array([0.5])
    x_mid = float(_curve(half, b, head_control, head_end)[0][0])
    head = x <= x_mid

    values = np.zeros_like(x)
    if np.any(head):
        t = _invert(x[head], b, head_control, head_end)
        values[head] = _curve(t, b, head_control, head_end)[1]
    tail = ~head
    if np.any(tail):
        s = _invert(length - x[tail], b, tail_control, head_end)
        values[tail] = _curve(s, b, tail_control, head_end)[1]
    return head, values


def cumulative_edges(
    pair_count: int, m: float, b: float, x: npt.ArrayLike
) -> npt.NDArray[np.float64]:
    """Expected number of edges among the pairs of rank at most ``x``.

    Y(0) = 0 and Y(L) = m exactly; ``x`` outside [0, L] is rejected.
    """
    m = _check_density(pair_count, m)
    if b < 0 or not math.isfinite(b):
        raise ValidationError(f"Bezier weight must be finite and non-negative, got {b!r}")
    xs = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if np.any(~np.isfinite(xs)) or np.any(xs < 0) or np.any(xs > pair_count):
        raise ValidationError(f"Rank abscissa must lie in [0, {pair_count}]")
    if b == 0.0 or m == 0.0:
        return m * xs / pair_count
    head, values = _split_cumulative(pair_count, m, b, xs)
    return np.where(head, values, m - values)


@dataclass(frozen=True, eq=False)
class ProbabilityProfile:
    """Edge probability per rank: ``probabilities[r - 1]`` is P(r)."""

    pair_count: int
    m: float
    epsilon: float
    weight: float
    probabilities: npt.NDArray[np.float64]

    def __post_init__(self) -> None:
        self.probabilities.setflags(write=False)

    @property
    def expected_edges(self) -> float:
        return expected_edges(self)

    def at(self, rank: int) -> float:
        """P(rank), 1-based."""
        if not 1 <= rank <= self.pair_count:
            raise ValidationError(f"Rank {rank} outside [1, {self.pair_count}]")
        return float(self.probabilities[rank - 1])


def probability_vector(pair_count: int, m: float, epsilon: float) -> ProbabilityProfile:
    """Build the profile P(1..L) for ``m`` expected edges and randomness ``epsilon``.

    epsilon = 0 is the exact step (a fractional m puts its remainder on rank
    ceil(m)), epsilon = 1 the exact uniform m / L. In between, P(r) is the
    increment of the Bezier cumulative curve, so the profile sums to m by
    telescoping.
    """
    epsilon = _check_epsilon(epsilon)
    m = _check_density(pair_count, m)
    b = epsilon_to_weight(epsilon)
    ranks = np.arange(pair_count, dtype=np.float64)

    if epsilon == 0.0:
        probabilities = np.clip(m - ranks, 0.0, 1.0)
    elif epsilon == 1.0:
        probabilities = np.full(pair_count, m / pair_count)
    elif m == 0.0:
        probabilities = np.zeros(pair_count)
    elif m == pair_count:
        probabilities = np.ones(pair_count)
    else:
        xs = np.arange(pair_count + 1, dtype=np.float64)
        head, values = _split_cumulative(pair_count, m, b, xs)
        cumulative = np.where(head, values, m - values)
        probabilities = np.diff(cumulative)
        # where both ends are on the tail, difference the remaining-edge
        # counts instead of the cumulative counts
        both_tail = ~head[:-1] & ~head[1:]
        probabilities[both_tail] = -np.diff(values)[both_tail]
        probabilities = np.clip(probabilities, 0.0, 1.0)
        # rounding in the saturated head can lift an increment by a few ulps of m
        probabilities = np.minimum.accumulate(probabilities)

    logger.debug("Profile L=%d m=%g epsilon=%g b=%g", pair_count, m, epsilon, b)
    return ProbabilityProfile(
        pair_count=pair_count,
        m=m,
        epsilon=epsilon,
        weight=b,
        probabilities=probabilities,
    )


def cumulative_curve(
    profile: ProbabilityProfile, samples: int = 257
) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """``samples`` evenly spaced points (x, Y(x)) of the cumulative edge curve.

    The limit profiles use their exact cumulative counts: min(x, m) for the
    step and m * x / L for the uniform profile.
    """
    if samples < 2:
        raise ValidationError(f"Need at least 2 curve samples, got {samples}")
    length = profile.pair_count
    xs = np.linspace(0.0, float(length), samples)
    if profile.epsilon == 0.0:
        return xs, np.minimum(xs, profile.m)
    return xs, cumulative_edges(length, profile.m, profile.weight, xs)


def expected_edges(profile: ProbabilityProfile) -> float:
    """m-hat, the sum of P(r) over all ranks."""
    return float(math.fsum(profile.probabilities.tolist()))


def probability_matrix(model: RankModel, profile: ProbabilityProfile) -> npt.NDArray[np.float64]:
    """Symmetric ``n x n`` matrix of edge probabilities, 0 on the diagonal."""
    if model.pair_count != profile.pair_count:
        raise ConfigurationError(
            f"Rank model has L={model.pair_count} pairs but profile has L={profile.pair_count}"
        )
    n = model.n
    matrix = np.zeros((n, n), dtype=np.float64)
    u, v = pair_arrays(n)
    values = profile.probabilities[model.ranks - 1]
    matrix[u, v] = values
    matrix[v, u] = values
    return matrix
