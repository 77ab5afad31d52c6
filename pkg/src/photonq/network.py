"""Entanglement swapping and GHZ merging at a central node.

Bell labels: ``0 = Phi+``, ``1 = Phi-``, ``2 = Psi+``, ``3 = Psi-`` with
``Phi± = (|00> ± |11>)/sqrt 2`` and ``Psi± = (|01> ± |10>)/sqrt 2``.  In a
two-qubit Bell vector the first ket bit belongs to the first measured qubit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .statevec import (
    MAX_QUBITS,
    CapacityError,
    PureState,
    Sample,
    apply_pauli,
    fidelity_up_to_phase,
    measure_two_qubit_basis,
)

_R = 1 / np.sqrt(2)
# Indexed as v[2*b1 + b2], b1 being the bit of the first measured qubit.
BELL_BASIS = (
    np.array([_R, 0, 0, _R], dtype=complex),
    np.array([_R, 0, 0, -_R], dtype=complex),
    np.array([0, _R, _R, 0], dtype=complex),
    np.array([0, _R, -_R, 0], dtype=complex),
)
BELL_NAMES = ("Phi+", "Phi-", "Psi+", "Psi-")

# Paulis on the far qubit that restore Phi+ after a swap; the table was found by
# exhaustive search over {I, X, Y, Z} (see tests/test_network.py).
SWAP_CORRECTION = {0: "", 1: "Z", 2: "X", 3: "XZ"}

MAX_MERGE_QUBITS = 14


@dataclass(frozen=True)
class BellOutcome:
    k: int
    probability: float

    @property
    def name(self) -> str:
        return BELL_NAMES[self.k]


def bell_pair() -> PureState:
    return ghz_state(2)


def ghz_state(n: int) -> PureState:
    """``(|0...0> + |1...1>)/sqrt 2`` on ``n`` qubits."""
    if not 2 <= n <= MAX_QUBITS:
        raise CapacityError(f"GHZ size {n} outside [2, {MAX_QUBITS}]")
    amps = np.zeros(1 << n, dtype=complex)
    amps[0] = amps[-1] = _R
    return PureState(n, amps)


def bell_measure(
    state: PureState, q1: int, q2: int, mode: Union[Sample, int]
) -> tuple[BellOutcome, PureState]:
    """Project ``(q1, q2)`` onto the Bell basis; both qubits leave the register."""
    k, p, posterior = measure_two_qubit_basis(state, q1, q2, BELL_BASIS, mode)
    return BellOutcome(k, p), posterior


def bell_probabilities(state: PureState, q1: int, q2: int) -> list[float]:
    """All four branch probabilities (impossible branches report 0)."""
    n = state.qubit_count
    psi = state.amplitudes.reshape((2,) * n)
    psi = np.moveaxis(psi, (n - 1 - q1, n - 1 - q2), (0, 1)).reshape(4, -1)
    return [float(np.sum(np.abs(np.conj(v) @ psi) ** 2)) for v in BELL_BASIS]


def swap_correction(k: int) -> str:
    """Pauli string to apply to the far qubit for Bell label ``k``."""
    if k not in SWAP_CORRECTION:
        raise ValueError(f"Bell label must be 0..3, got {k!r}")
    return SWAP_CORRECTION[k]


def _apply_string(state: PureState, q: int, paulis: str) -> PureState:
    # Rightmost factor acts first; phase is irrelevant for the fidelity contract.
    for p in reversed(paulis):
        state = apply_pauli(state, q, p)
    return state


def entanglement_swap(mode: Union[Sample, int]) -> tuple[BellOutcome, PureState]:
    """Swap ``Phi+_{01} ⊗ Phi+_{23}`` into a ``Phi+`` on the outer qubits."""
    state = bell_pair().tensor(bell_pair())
    outcome, pair = bell_measure(state, 1, 2, mode)
    return outcome, _apply_string(pair, 1, swap_correction(outcome.k))


def merge_correction(k: int, n: int, m: int) -> list[tuple[int, str]]:
    """Corrections ``(qubit, pauli)`` on the merged register of ``n+m-2`` qubits.

    Survivors of the first GHZ occupy ``0..n-2``; those of the second follow.
    A phase flip needs one Z anywhere.  A bit flip has to hit every survivor
    of the second resource, since ``|0..0 1..1> + |1..1 0..0>`` differs from
    GHZ on all of them.
    """
    second = range(n - 1, n + m - 2)
    fixes = []
    if k in (2, 3):
        fixes += [(q, "X") for q in second]
    if k in (1, 3):
        fixes.append((second[0], "Z"))
    return fixes


def ghz_merge(n: int, m: int, mode: Union[Sample, int]) -> tuple[BellOutcome, PureState]:
    """Fuse ``GHZ_n`` and ``GHZ_m`` into ``GHZ_{n+m-2}`` by one Bell measurement."""
    if n < 2 or m < 2 or n + m > MAX_MERGE_QUBITS:
        raise CapacityError(f"merge sizes ({n}, {m}) need n, m >= 2 and n + m <= {MAX_MERGE_QUBITS}")
    state = ghz_state(n).tensor(ghz_state(m))
    outcome, merged = bell_measure(state, n - 1, n, mode)
    for q, p in merge_correction(outcome.k, n, m):
        merged = apply_pauli(merged, q, p)
    return outcome, merged


def merge_fidelity(n: int, m: int, k: int) -> float:
    _, merged = ghz_merge(n, m, k)
    return fidelity_up_to_phase(merged, ghz_state(n + m - 2))
