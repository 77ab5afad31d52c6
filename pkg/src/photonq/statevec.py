"""Dense pure-state simulator.

Basis-index convention: qubit ``q`` contributes ``2**q`` to the amplitude
index, so qubit 0 is the least significant bit.  ``|q1 q0>`` written as a
ket string therefore reads right to left.

Every operation returns a new :class:`PureState`; inputs are never mutated.
Measurements remove the measured qubit from the register and shift the
indices of all higher qubits down by one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

MAX_QUBITS = 24
NORM_TOL = 1e-12
IMPOSSIBLE_TOL = 1e-12

_SQRT2_INV = 1 / np.sqrt(2)

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT2_INV


class CapacityError(ValueError):
    """Requested register size is outside ``[1, MAX_QUBITS]``."""


class ImpossibleOutcomeError(ValueError):
    """A forced measurement outcome has (numerically) zero Born probability."""


def rz_matrix(alpha: float) -> np.ndarray:
    """``exp(-i alpha Z / 2)``."""
    return np.array([[np.exp(-0.5j * alpha), 0], [0, np.exp(0.5j * alpha)]], dtype=complex)


def rx_matrix(beta: float) -> np.ndarray:
    """``exp(-i beta X / 2)``."""
    c, s = np.cos(beta / 2), np.sin(beta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def b_alpha_basis(alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """The pair ``|alpha+>, |alpha->`` with ``|alpha±> = (|0> ± e^{-i alpha}|1>)/sqrt 2``."""
    phase = np.exp(-1j * alpha)
    plus = np.array([1, phase], dtype=complex) * _SQRT2_INV
    minus = np.array([1, -phase], dtype=complex) * _SQRT2_INV
    return plus, minus


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector over ``qubit_count`` qubits."""

    qubit_count: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 0 <= self.qubit_count <= MAX_QUBITS:
            raise CapacityError(f"qubit_count {self.qubit_count} outside [0, {MAX_QUBITS}]")
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.shape[0] != 1 << self.qubit_count:
            raise ValueError(
                f"expected {1 << self.qubit_count} amplitudes, got {amps.shape[0]}"
            )
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes: Sequence[complex], normalize: bool = False) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = int(amps.shape[0]).bit_length() - 1
        if amps.shape[0] != 1 << n:
            raise ValueError("amplitude count must be a power of two")
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(n, amps)

    @classmethod
    def basis(cls, n: int, index: int = 0) -> "PureState":
        """Computational basis state ``|index>`` on ``n`` qubits."""
        _check_capacity(n, allow_zero=True)
        amps = np.zeros(1 << n, dtype=complex)
        amps[index] = 1.0
        return cls(n, amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self, other: "PureState") -> "PureState":
        """``self ⊗ other`` with ``other`` placed on the higher qubit indices."""
        _check_capacity(self.qubit_count + other.qubit_count, allow_zero=True)
        amps = np.kron(other.amplitudes, self.amplitudes)
        return PureState(self.qubit_count + other.qubit_count, amps)

    def __repr__(self) -> str:
        return f"PureState(qubit_count={self.qubit_count}, amplitudes={np.round(self.amplitudes, 6)})"


@dataclass(frozen=True)
class Sample:
    """Draw the outcome from the Born distribution using ``rng``."""

    rng: np.random.Generator

    @classmethod
    def from_seed(cls, seed: int) -> "Sample":
        return cls(np.random.default_rng(seed))


@dataclass(frozen=True)
class Forced:
    """Post-select on ``bit``; raises if that branch is impossible."""

    bit: int

    def __post_init__(self):
        if self.bit not in (0, 1):
            raise ValueError(f"forced outcome must be 0 or 1, got {self.bit!r}")


OutcomeMode = Union[Sample, Forced]


@dataclass(frozen=True)
class MeasurementOutcome:
    s: int
    probability: float
    posterior: PureState


def _check_capacity(n: int, allow_zero: bool = False) -> None:
    lo = 0 if allow_zero else 1
    if not lo <= n <= MAX_QUBITS:
        raise CapacityError(f"qubit count {n} outside [{lo}, {MAX_QUBITS}]")


def _check_qubit(state: PureState, q: int) -> None:
    if not 0 <= q < state.qubit_count:
        raise IndexError(f"qubit {q} out of range for {state.qubit_count}-qubit state")


def _tensor_view(state: PureState) -> np.ndarray:
    # C-order reshape: axis 0 is the most significant qubit.
    return state.amplitudes.reshape((2,) * state.qubit_count)


def _axis(n: int, q: int) -> int:
    return n - 1 - q


def plus_state(n: int) -> PureState:
    """``|+>^{⊗n}``."""
    _check_capacity(n)
    return PureState(n, np.full(1 << n, 2.0 ** (-n / 2), dtype=complex))


def apply_unitary(state: PureState, q: int, matrix: np.ndarray) -> PureState:
    """Apply a 2x2 unitary to qubit ``q``."""
    _check_qubit(state, q)
    n = state.qubit_count
    ax = _axis(n, q)
    psi = np.tensordot(np.asarray(matrix, dtype=complex), _tensor_view(state), axes=([1], [ax]))
    psi = np.moveaxis(psi, 0, ax)
    return PureState(n, psi.reshape(-1))


def apply_cz(state: PureState, q1: int, q2: int) -> PureState:
    _check_qubit(state, q1)
    _check_qubit(state, q2)
    if q1 == q2:
        raise IndexError("controlled-phase needs two distinct qubits")
    idx = np.arange(1 << state.qubit_count)
    both = ((idx >> q1) & 1 & (idx >> q2)).astype(bool)
    amps = state.amplitudes.copy()
    amps[both] *= -1
    return PureState(state.qubit_count, amps)


def apply_cnot(state: PureState, control: int, target: int) -> PureState:
    _check_qubit(state, control)
    _check_qubit(state, target)
    if control == target:
        raise IndexError("CNOT needs two distinct qubits")
    idx = np.arange(1 << state.qubit_count)
    src = np.where((idx >> control) & 1, idx ^ (1 << target), idx)
    return PureState(state.qubit_count, state.amplitudes[src])


def apply_rz(state: PureState, q: int, alpha: float) -> PureState:
    return apply_unitary(state, q, rz_matrix(alpha))


def apply_rx(state: PureState, q: int, beta: float) -> PureState:
    return apply_unitary(state, q, rx_matrix(beta))


def apply_h(state: PureState, q: int) -> PureState:
    return apply_unitary(state, q, HADAMARD)


def apply_pauli(state: PureState, q: int, which: str) -> PureState:
    try:
        matrix = PAULI[which.upper()]
    except KeyError:
        raise ValueError(f"unknown Pauli {which!r}") from None
    return apply_unitary(state, q, matrix)


def _project(state: PureState, q: int, vector: np.ndarray) -> np.ndarray:
    """Contract qubit ``q`` with ``<vector|``; returns the unnormalized remainder."""
    ax = _axis(state.qubit_count, q)
    rest = np.tensordot(np.conj(vector), _tensor_view(state), axes=([0], [ax]))
    return np.asarray(rest).reshape(-1)


def _measure(state: PureState, q: int, basis: tuple[np.ndarray, np.ndarray], mode: OutcomeMode) -> MeasurementOutcome:
    _check_qubit(state, q)
    branches = [_project(state, q, v) for v in basis]
    probs = [float(np.vdot(b, b).real) for b in branches]
    if isinstance(mode, Forced):
        s = mode.bit
        if probs[s] < IMPOSSIBLE_TOL:
            raise ImpossibleOutcomeError(
                f"outcome {s} on qubit {q} has probability {probs[s]:.3e}"
            )
    elif isinstance(mode, Sample):
        p0 = probs[0] / (probs[0] + probs[1])
        s = 0 if mode.rng.random() < p0 else 1
    else:
        raise TypeError(f"unsupported outcome mode {mode!r}")
    vec = branches[s] / np.sqrt(probs[s])
    return MeasurementOutcome(s, probs[s], PureState(state.qubit_count - 1, vec))


def measure_b_alpha(state: PureState, q: int, alpha: float, mode: OutcomeMode) -> MeasurementOutcome:
    """Measure qubit ``q`` in ``B(alpha)``; ``s=0`` is the ``|alpha+>`` branch."""
    return _measure(state, q, b_alpha_basis(alpha), mode)


def measure_z(state: PureState, q: int, mode: OutcomeMode) -> MeasurementOutcome:
    zero = np.array([1, 0], dtype=complex)
    one = np.array([0, 1], dtype=complex)
    return _measure(state, q, (zero, one), mode)


def measure_two_qubit_basis(
    state: PureState, q1: int, q2: int, basis: Sequence[np.ndarray], mode: Union[Sample, int]
) -> tuple[int, float, PureState]:
    """Project qubits ``(q1, q2)`` onto one of an orthonormal 4-vector basis.

    Each basis vector is indexed as ``v[2*b1 + b2]`` where ``b1`` is the bit of
    ``q1``.  ``mode`` is either a :class:`Sample` or the forced label.
    Returns ``(label, probability, posterior)``; both qubits are removed.
    """
    _check_qubit(state, q1)
    _check_qubit(state, q2)
    if q1 == q2:
        raise IndexError("two-qubit measurement needs two distinct qubits")
    n = state.qubit_count
    psi = np.moveaxis(_tensor_view(state), (_axis(n, q1), _axis(n, q2)), (0, 1))
    psi = psi.reshape(4, -1)
    branches = [np.conj(np.asarray(v, dtype=complex)) @ psi for v in basis]
    probs = np.array([float(np.vdot(b, b).real) for b in branches])
    if isinstance(mode, Sample):
        k = int(mode.rng.choice(len(basis), p=probs / probs.sum()))
    else:
        k = int(mode)
        if not 0 <= k < len(basis):
            raise ValueError(f"forced label {k} out of range")
        if probs[k] < IMPOSSIBLE_TOL:
            raise ImpossibleOutcomeError(f"outcome {k} has probability {probs[k]:.3e}")
    vec = branches[k] / np.sqrt(probs[k])
    return k, float(probs[k]), PureState(n - 2, vec)


def joint_distribution(state: PureState, alphas: Sequence[float]) -> np.ndarray:
    """Born distribution of measuring every qubit ``q`` in ``B(alphas[q])``.

    Entry ``i`` is the probability that qubit ``q`` yields outcome
    ``(i >> q) & 1``, matching the register's bit convention.
    """
    if len(alphas) != state.qubit_count:
        raise ValueError("need one angle per qubit")
    out = state
    for q, alpha in enumerate(alphas):
        plus, minus = b_alpha_basis(alpha)
        out = apply_unitary(out, q, np.vstack([np.conj(plus), np.conj(minus)]))
    return np.abs(out.amplitudes) ** 2


def fidelity_up_to_phase(a: PureState, b: PureState) -> float:
    """``|<a|b>|^2``, clipped into ``[0, 1]``."""
    if a.qubit_count != b.qubit_count:
        raise ValueError(f"qubit counts differ: {a.qubit_count} vs {b.qubit_count}")
    f = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
    return float(min(max(f, 0.0), 1.0))


def expect_pauli_string(state: PureState, assignment: Union[str, Sequence[str]]) -> float:
    """``<psi| P_0 ⊗ P_1 ⊗ ... |psi>`` where ``assignment[q]`` acts on qubit ``q``."""
    if len(assignment) != state.qubit_count:
        raise ValueError(
            f"assignment has {len(assignment)} entries for {state.qubit_count} qubits"
        )
    phi = state
    for q, p in enumerate(assignment):
        if p.upper() != "I":
            phi = apply_pauli(phi, q, p)
    value = np.vdot(state.amplitudes, phi.amplitudes)
    if abs(value.imag) > 1e-9:
        raise ArithmeticError(f"non-Hermitian expectation residue {value.imag:.3e}")
    return float(value.real)
