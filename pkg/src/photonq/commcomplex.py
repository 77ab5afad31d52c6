"""Multi-party GHZ communication complexity: bounds, protocol and noise model.

``n`` parties each hold one bit ``x_i``.  Inputs are drawn uniformly from the
even-weight strings (the ones with non-zero Bell coefficient) and the task is
to output ``f(x) = (-1)^{|x|/2}`` as the product of one broadcast sign per
party.  Party ``i`` maps to qubit ``i`` of the GHZ register.

With GHZ correlations the parties measure ``cos(phi_i) X + sin(phi_i) Y`` at
``phi_i = pi x_i / 2`` and broadcast their ±1 outcome; the product of the
outcomes equals ``cos(pi |x| / 2) = f(x)`` with certainty.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .network import ghz_state
from .statevec import expect_pauli_string, joint_distribution

MAX_PROMISE_N = 15
MAX_BRUTEFORCE_N = 7
MAX_STATEVECTOR_N = 10
MAX_PARTNER_SEARCH = 101
MC_BLOCK = 4096


@dataclass(frozen=True)
class NoiseParams:
    visibility: float
    efficiency: float

    def __post_init__(self):
        for name, value in (("visibility", self.visibility), ("efficiency", self.efficiency)):
            if not (math.isfinite(value) and 0.0 <= value <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")


@dataclass(frozen=True)
class BellFunctional:
    n: int
    g: dict
    bound: float


@dataclass(frozen=True)
class ClassicalStrategy:
    """Party ``i`` broadcasts ``signs[i][x_i]``."""

    signs: tuple[tuple[int, int], ...]

    def broadcast(self, x: Sequence[int]) -> int:
        return math.prod(self.signs[i][xi] for i, xi in enumerate(x))


@dataclass(frozen=True)
class RegionSample:
    n: int
    V: float
    eta: float
    p_quantum: float
    p_classical: float

    @property
    def advantage(self) -> bool:
        return self.p_quantum > self.p_classical


def _check_odd(n: int, lo: int, hi: int) -> None:
    if n % 2 == 0 or not lo <= n <= hi:
        raise ValueError(f"n must be odd with {lo} <= n <= {hi}, got {n}")


def g_coefficient(x: Sequence[int]) -> float:
    n = len(x)
    weight = sum(x)
    if weight % 2:
        return 0.0
    return math.sqrt(2 ** (n + 1)) * (-1) ** (weight // 2)


def bell_functional(n: int) -> BellFunctional:
    _check_odd(n, 1, MAX_PROMISE_N)
    g = {x: g_coefficient(x) for x in itertools.product((0, 1), repeat=n)}
    return BellFunctional(n, g, float(2**n))


def promise_inputs(n: int) -> list[tuple[int, ...]]:
    """Even-weight bit strings of length ``n`` in lexicographic order."""
    _check_odd(n, 3, MAX_PROMISE_N)
    return [x for x in itertools.product((0, 1), repeat=n) if sum(x) % 2 == 0]


def f_value(x: Sequence[int]) -> int:
    weight = sum(x)
    if weight % 2:
        raise ValueError(f"input {tuple(x)} has odd weight")
    return -1 if (weight // 2) % 2 else 1


def p_classical(n: int) -> float:
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return 0.5 * (1 + 1 / math.sqrt(2 ** (n - 1)))


def p_classical_fraction(n: int) -> Fraction:
    """Exact classical bound; only rational for odd ``n``."""
    _check_odd(n, 1, MAX_PARTNER_SEARCH)
    return Fraction(1, 2) * (1 + Fraction(1, 2 ** ((n - 1) // 2)))


def classical_bruteforce(n: int) -> tuple[Fraction, list[ClassicalStrategy]]:
    """Best deterministic one-sign-per-party strategy by exhaustive search.

    Strategies are enumerated in lexicographic order of the flattened sign
    vector ``(e_1(0), e_1(1), e_2(0), ...)`` with ``-1 < +1``, and the optimal
    ones are returned in that order.  Shared randomness is a convex mixture of
    these, so the maximum is the classical bound.
    """
    _check_odd(n, 3, MAX_BRUTEFORCE_N)
    return _exhaustive_search(n)


@functools.lru_cache(maxsize=None)
def _exhaustive_search(
    n: int, first_only: bool = False, chunk: int = 1 << 14
) -> tuple[Fraction, list[ClassicalStrategy]]:
    inputs = np.array(promise_inputs(n))
    target = np.array([f_value(x) for x in inputs])
    cols = 2 * np.arange(n) + inputs  # (inputs, n)
    total = 4**n
    # Bit j of the strategy index (MSB first) is 1 for a +1 sign.
    shifts = np.arange(2 * n - 1, -1, -1)

    best, rows = -1, []
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        signs = (((idx[:, None] >> shifts) & 1) * 2 - 1).astype(np.int8)
        wins = (signs[:, cols].prod(axis=2) == target).sum(axis=1)
        top = int(wins.max())
        if top > best:
            best, rows = top, []
        if top == best and not (first_only and rows):
            rows.extend(signs[wins == best][:1] if first_only else signs[wins == best])
    optimal = [
        ClassicalStrategy(tuple((int(r[2 * i]), int(r[2 * i + 1])) for i in range(n)))
        for r in rows
    ]
    return Fraction(best, len(inputs)), optimal


def success_rate(strategy: ClassicalStrategy) -> Fraction:
    inputs = promise_inputs(len(strategy.signs))
    wins = sum(strategy.broadcast(x) == f_value(x) for x in inputs)
    return Fraction(wins, len(inputs))


def quantum_correlation(n: int, x: Sequence[int], V: float) -> float:
    """Correlation ``E(x)`` of the noisy GHZ state, closed form."""
    _check_odd(n, 3, MAX_PROMISE_N)
    if len(x) != n:
        raise ValueError("input length differs from n")
    NoiseParams(V, 1.0)
    return V * f_value(x)


def quantum_correlation_statevector(n: int, x: Sequence[int], V: float) -> float:
    """Same quantity as :func:`quantum_correlation`, from GHZ expectation values.

    At ``phi = 0`` the local observable is X, at ``phi = pi/2`` it is Y.
    """
    _check_odd(n, 3, MAX_STATEVECTOR_N)
    if len(x) != n:
        raise ValueError("input length differs from n")
    NoiseParams(V, 1.0)
    return V * expect_pauli_string(ghz_state(n), ["Y" if xi else "X" for xi in x])


def bell_value(n: int, V: float) -> float:
    """``sum_x g(x) E(x)``; equals ``V 2^{(3n-1)/2}``."""
    return sum(g_coefficient(x) * quantum_correlation(n, x, V) for x in promise_inputs(n))


def bell_bound(n: int) -> float:
    return float(2**n)


def critical_visibility(n: int) -> float:
    _check_odd(n, 3, MAX_PARTNER_SEARCH)
    return 2 ** ((1 - n) / 2)


def analytic_success(n: int, V: float, eta: float) -> float:
    """Success rate with detector efficiency ``eta`` and visibility ``V``.

    All detectors fire on the GHZ component: certain success.  All fail:
    classical optimum.  Anything else: a fair coin.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    NoiseParams(V, eta)
    quantum = eta**n * V
    classical = (1 - eta) ** n
    return quantum + classical * p_classical(n) + (1 - quantum - classical) * 0.5


def has_advantage(n: int, V: float, eta: float) -> bool:
    return analytic_success(n, V, eta) > p_classical(n)


def min_partners(V: float, eta: float, odd_only: bool = False) -> Optional[int]:
    """Smallest ``n >= 3`` (odd if ``odd_only``) with a quantum advantage, up to 101."""
    NoiseParams(V, eta)
    step = 2 if odd_only else 1
    for n in range(3, MAX_PARTNER_SEARCH + 1, step):
        if has_advantage(n, V, eta):
            return n
    return None


def scan_region(
    n_list: Iterable[int], V_grid: Iterable[float], eta_grid: Iterable[float]
) -> list[RegionSample]:
    V_grid, eta_grid = sorted(V_grid), sorted(eta_grid)
    samples = []
    for n in sorted(n_list):
        if n < 3:
            raise ValueError(f"party count must be >= 3, got {n}")
        for V in V_grid:
            for eta in eta_grid:
                samples.append(RegionSample(n, V, eta, analytic_success(n, V, eta), p_classical(n)))
    return samples


@functools.lru_cache(maxsize=None)
def _ghz_outcome_cdfs(n: int) -> np.ndarray:
    """Cumulative Born distribution of all parties' outcomes, one row per promise input."""
    state = ghz_state(n)
    rows = [joint_distribution(state, [-math.pi * xi / 2 for xi in x]) for x in promise_inputs(n)]
    return np.cumsum(np.array(rows), axis=1)


def monte_carlo(n: int, V: float, eta: float, trials: int, seed: int = 0) -> tuple[float, float]:
    """Simulate the protocol trial by trial; returns ``(mean, standard error)``.

    Per trial: uniform promise input; GHZ with probability ``V`` otherwise
    white noise (independent fair bits); each detector fires with probability
    ``eta``.  Firing parties broadcast ``(-1)^s`` of their measured outcome,
    the rest fall back to the first optimal classical strategy.

    Randomness for trials ``[b*MC_BLOCK, (b+1)*MC_BLOCK)`` comes from a
    generator keyed on ``(seed, b)``, so results do not depend on evaluation
    order.
    """
    _check_odd(n, 3, MAX_STATEVECTOR_N)
    NoiseParams(V, eta)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    wins = sum(
        simulate_block(n, V, eta, seed, block, min(MC_BLOCK, trials - start))
        for block, start in enumerate(range(0, trials, MC_BLOCK))
    )
    mean = wins / trials
    return mean, math.sqrt(mean * (1 - mean) / trials)


def simulate_block(n: int, V: float, eta: float, seed: int, block: int, size: int) -> int:
    """Number of successful trials in block ``block`` (``size`` trials)."""
    inputs = np.array(promise_inputs(n))
    target = np.array([f_value(x) for x in inputs])
    cdfs = _ghz_outcome_cdfs(n)
    _, optimal = _exhaustive_search(n, first_only=True)
    fallback = np.array(optimal[0].signs)  # (n, 2)
    parties = np.arange(n)

    rng = np.random.default_rng([seed, block])
    which = rng.integers(0, len(inputs), size=size)
    pure = rng.random(size) < V
    fired = rng.random((size, n)) < eta
    u = rng.random(size)
    noise_bits = rng.integers(0, 2, size=(size, n))

    # Inverse-CDF draw from the joint Born distribution of the promise input.
    joint = np.minimum((u[:, None] > cdfs[which]).sum(axis=1), cdfs.shape[1] - 1)
    ghz_bits = (joint[:, None] >> parties) & 1
    bits = np.where(pure[:, None], ghz_bits, noise_bits)
    quantum_signs = 1 - 2 * bits
    classical_signs = fallback[parties, inputs[which]]
    broadcast = np.where(fired, quantum_signs, classical_signs).prod(axis=1)
    return int((broadcast == target[which]).sum())
