"""One-way computation on linear clusters with active feed-forward.

A pattern of ``k`` angles runs on a ``k+1`` qubit linear cluster whose first
qubit carries the input ``|+>``.  Measuring qubit ``j`` in ``B(alpha_j)``
teleports the logical qubit one site along while applying
``X^s H R_z(alpha_j)``; the random ``X^s`` is tracked in a Pauli frame
``X^a Z^b`` (the byproduct record) and undone at the end.

Frame propagation through one step, up to global phase::

    R_z(alpha) X^a Z^b = X^a Z^b R_z((-1)^a alpha)
    H X^a Z^b          = X^b Z^a H

so measuring at ``(-1)^a alpha`` and then seeing outcome ``s`` leaves the
frame ``(a', b') = (s XOR b, a)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .cluster import linear_cluster
from .statevec import (
    Forced,
    OutcomeMode,
    PureState,
    Sample,
    apply_h,
    apply_pauli,
    apply_rz,
    fidelity_up_to_phase,
    measure_b_alpha,
    plus_state,
)

SPEED_OF_LIGHT = 299_792_458.0
DEFAULT_FIBER_INDEX = 1.4990
FIDELITY_TOL = 1e-9
MAX_VERIFY_LENGTH = 10


class PatternParseError(ValueError):
    def __init__(self, line: int, message: str, source: str = "<pattern>"):
        super().__init__(f"{source}:{line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Pattern:
    """Ordered nominal measurement angles (radians); output on the last qubit."""

    angles: tuple[float, ...]

    def __post_init__(self):
        angles = tuple(float(a) for a in self.angles)
        if not angles:
            raise ValueError("pattern needs at least one angle")
        if not all(math.isfinite(a) for a in angles):
            raise ValueError("pattern angles must be finite")
        object.__setattr__(self, "angles", angles)

    def __len__(self):
        return len(self.angles)

    @classmethod
    def parse(cls, text: str, source: str = "<pattern>") -> "Pattern":
        """One angle per line; ``#`` starts a comment line, blank lines are skipped."""
        angles = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                value = float(line)
            except ValueError:
                raise PatternParseError(lineno, f"cannot parse angle {line!r}", source) from None
            if not math.isfinite(value):
                raise PatternParseError(lineno, f"angle {line!r} is not finite", source)
            angles.append(value)
        if not angles:
            raise PatternParseError(0, "pattern contains no angles", source)
        return cls(tuple(angles))

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Pattern":
        path = Path(path)
        return cls.parse(path.read_text(), source=str(path))


@dataclass(frozen=True)
class ByproductRecord:
    """Pauli frame ``X^a Z^b`` currently sitting on the logical qubit."""

    a: int = 0
    b: int = 0

    def __post_init__(self):
        if self.a not in (0, 1) or self.b not in (0, 1):
            raise ValueError("byproduct exponents must be bits")


def adapt_angle(record: ByproductRecord, nominal: float) -> float:
    return -nominal if record.a else nominal


def update_byproduct(record: ByproductRecord, s: int) -> ByproductRecord:
    return ByproductRecord(s ^ record.b, record.a)


def apply_correction(state: PureState, record: ByproductRecord, q: int = 0) -> PureState:
    """Undo ``X^a Z^b`` on qubit ``q`` (phase-insensitive, so order is irrelevant)."""
    if record.a:
        state = apply_pauli(state, q, "X")
    if record.b:
        state = apply_pauli(state, q, "Z")
    return state


def correction_label(record: ByproductRecord) -> str:
    return {(0, 0): "I", (0, 1): "Z", (1, 0): "X", (1, 1): "XZ"}[(record.a, record.b)]


@dataclass(frozen=True)
class RunResult:
    outcomes: tuple[int, ...]
    probabilities: tuple[float, ...]
    raw_output: PureState
    corrected_output: PureState
    byproduct: ByproductRecord
    adapted_angles: tuple[float, ...]

    @property
    def branch_probability(self) -> float:
        return math.prod(self.probabilities)


def _modes(choice, k: int, seed: int) -> list[OutcomeMode]:
    if choice is None:
        rng = np.random.default_rng(seed)
        return [Sample(rng)] * k
    if isinstance(choice, str):
        choice = [int(c) for c in choice]
    modes = [Forced(m) if isinstance(m, (int, np.integer)) else m for m in choice]
    if len(modes) != k:
        raise ValueError(f"got {len(modes)} outcome modes for a pattern of length {k}")
    return modes


def run_pattern(
    pattern: Pattern,
    modes: Optional[Union[str, Sequence[Union[OutcomeMode, int]]]] = None,
    seed: int = 0,
    adapt: bool = True,
) -> RunResult:
    """Execute ``pattern`` on a fresh linear cluster.

    Parameters
    ----------
    modes
        One entry per measurement: an :class:`OutcomeMode`, a bare bit
        (forced), or a bit string such as ``"10"``.  ``None`` samples every
        outcome from a generator seeded with ``seed``.
    adapt
        Disable to measure every qubit at its nominal angle; the frame is still
        tracked so the run shows what feed-forward fixes.
    """
    k = len(pattern)
    modes = _modes(modes, k, seed)
    state = linear_cluster(k + 1)
    record = ByproductRecord()
    outcomes, probs, used = [], [], []
    for alpha, mode in zip(pattern.angles, modes):
        angle = adapt_angle(record, alpha) if adapt else alpha
        result = measure_b_alpha(state, 0, angle, mode)
        state = result.posterior
        record = update_byproduct(record, result.s)
        outcomes.append(result.s)
        probs.append(result.probability)
        used.append(angle)
    return RunResult(
        outcomes=tuple(outcomes),
        probabilities=tuple(probs),
        raw_output=state,
        corrected_output=apply_correction(state, record),
        byproduct=record,
        adapted_angles=tuple(used),
    )


def circuit_oracle(pattern: Pattern) -> PureState:
    """``(H R_z(alpha_k)) ... (H R_z(alpha_1)) |+>`` by direct gate application."""
    state = plus_state(1)
    for alpha in pattern.angles:
        state = apply_h(apply_rz(state, 0, alpha), 0)
    return state


@dataclass(frozen=True)
class BranchReport:
    outcomes: tuple[int, ...]
    fidelity: float
    probability: float


@dataclass
class VerifyReport:
    pattern: Pattern
    branches: list[BranchReport] = field(default_factory=list)
    tol: float = FIDELITY_TOL

    @property
    def min_fidelity(self) -> float:
        return min(b.fidelity for b in self.branches)

    @property
    def passed(self) -> bool:
        k = len(self.pattern)
        return all(
            b.fidelity >= 1 - self.tol and abs(b.probability - 2.0**-k) <= self.tol
            for b in self.branches
        )


def verify_pattern(pattern: Pattern, tol: float = FIDELITY_TOL) -> VerifyReport:
    """Run every one of the ``2**k`` forced-outcome branches against the circuit oracle."""
    k = len(pattern)
    if k > MAX_VERIFY_LENGTH:
        raise ValueError(f"verification limited to {MAX_VERIFY_LENGTH} measurements")
    target = circuit_oracle(pattern)
    report = VerifyReport(pattern, tol=tol)
    for bits in itertools.product((0, 1), repeat=k):
        run = run_pattern(pattern, bits)
        report.branches.append(
            BranchReport(bits, fidelity_up_to_phase(run.corrected_output, target), run.branch_probability)
        )
    return report


@dataclass(frozen=True)
class LatencyBudget:
    detector_ns: float = 30.0
    logic_ns: float = 10.0
    modulator_ns: float = 110.0
    fiber_refractive_index: float = DEFAULT_FIBER_INDEX

    def __post_init__(self):
        for name in ("detector_ns", "logic_ns", "modulator_ns"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be a finite non-negative number, got {value!r}")
        n = self.fiber_refractive_index
        if not (math.isfinite(n) and 1.0 <= n <= 3.0):
            raise ValueError(f"fiber refractive index must lie in [1, 3], got {n!r}")


def feed_forward_budget(budget: LatencyBudget) -> tuple[float, float]:
    """Return ``(cycle_ns, fiber_delay_m)`` for one detect-process-switch cycle."""
    cycle_ns = budget.detector_ns + budget.logic_ns + budget.modulator_ns
    fiber_m = cycle_ns * (SPEED_OF_LIGHT / budget.fiber_refractive_index) * 1e-9
    return cycle_ns, fiber_m


def grid_patterns(k: int, density: int) -> Iterable[Pattern]:
    """All ``density**k`` patterns with angles on ``2 pi j / density``."""
    ticks = [2 * math.pi * j / density for j in range(density)]
    for angles in itertools.product(ticks, repeat=k):
        yield Pattern(angles)


def random_patterns(k: int, count: int, rng: np.random.Generator) -> Iterable[Pattern]:
    for _ in range(count):
        yield Pattern(tuple(rng.uniform(0, 2 * math.pi, size=k)))
