"""Dense n-qubit pure states and density matrices.

Qubit 0 is the leftmost tensor factor (most significant bit of the basis
index).  Gate application works in place on reshaped views; nothing here
allocates more than O(d) scratch for pure states or O(d^2) for mixed ones.

Desk-scale guard rails: statevectors up to PURE_QUBIT_CAP qubits, density
matrices up to MIXED_QUBIT_CAP, both overridable per call site.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .clifford import Gate

PURE_QUBIT_CAP = 14
MIXED_QUBIT_CAP = 10

_SQRT_HALF = 1.0 / math.sqrt(2.0)


class ResourceCapError(ValueError):
    """Simulation size beyond the configured dense-representation cap."""


@dataclass
class PureState:
    n: int
    amplitudes: np.ndarray

    @classmethod
    def zero(cls, n: int, cap: int = PURE_QUBIT_CAP) -> "PureState":
        if n > cap:
            raise ResourceCapError(f"pure-state cap is {cap} qubits, asked for {n}")
        amps = np.zeros(2**n, dtype=complex)
        amps[0] = 1.0
        return cls(n, amps)

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def normalize(self) -> "PureState":
        self.amplitudes /= math.sqrt(self.norm_squared)
        return self

    def copy(self) -> "PureState":
        return PureState(self.n, self.amplitudes.copy())


@dataclass
class MixedState:
    n: int
    matrix: np.ndarray

    @classmethod
    def from_pure(cls, state: PureState, cap: int = MIXED_QUBIT_CAP) -> "MixedState":
        if state.n > cap:
            raise ResourceCapError(f"mixed-state cap is {cap} qubits, asked for {state.n}")
        a = state.amplitudes
        return cls(state.n, np.outer(a, a.conj()))

    @classmethod
    def zero(cls, n: int, cap: int = MIXED_QUBIT_CAP) -> "MixedState":
        if n > cap:
            raise ResourceCapError(f"mixed-state cap is {cap} qubits, asked for {n}")
        return cls.from_pure(PureState.zero(n), cap=cap)

    def copy(self) -> "MixedState":
        return MixedState(self.n, self.matrix.copy())


@dataclass(frozen=True)
class Bipartition:
    """Subsystem split; qubits_a lists the qubit indices of the A factor."""

    n: int
    qubits_a: tuple[int, ...]

    def __post_init__(self):
        if not all(0 <= q < self.n for q in self.qubits_a):
            raise ValueError("qubits_a outside the register")
        if len(set(self.qubits_a)) != len(self.qubits_a):
            raise ValueError("duplicate qubits in bipartition")

    @classmethod
    def balanced(cls, n: int) -> "Bipartition":
        return cls(n, tuple(range(n // 2)))

    @property
    def d_a(self) -> int:
        return 2 ** len(self.qubits_a)

    @property
    def d_b(self) -> int:
        return 2 ** (self.n - len(self.qubits_a))


@dataclass(frozen=True)
class ThetaBasis:
    """Single-qubit basis (|0> + e^{i theta}|1>)/sqrt2, (|0> - e^{i theta}|1>)/sqrt2.

    The kets are normalized so the two projectors are idempotent and sum to
    the identity on the qubit; the global phase convention (first amplitude
    real positive) is irrelevant to every computed quantity.
    """

    theta: float
    qubit: int

    def kets(self) -> tuple[np.ndarray, np.ndarray]:
        e = np.exp(1j * self.theta)
        k1 = np.array([1.0, e], dtype=complex) * _SQRT_HALF
        k2 = np.array([1.0, -e], dtype=complex) * _SQRT_HALF
        return k1, k2

    def is_clifford(self, tol: float = 1e-12) -> bool:
        return min(abs(self.theta), abs(self.theta - math.pi / 2)) < tol


GATE_MATRICES = {
    "h": np.array([[_SQRT_HALF, _SQRT_HALF], [_SQRT_HALF, -_SQRT_HALF]], dtype=complex),
    "s": np.array([[1, 0], [0, 1j]], dtype=complex),
    "sdg": np.array([[1, 0], [0, -1j]], dtype=complex),
}


def _axis_view(flat: np.ndarray, qubit: int) -> np.ndarray:
    """View with the target qubit isolated as the middle axis.

    Works for statevectors and, via the trailing wildcard, for any array
    whose leading index runs over basis states (density-matrix rows).
    """
    return flat.reshape(2**qubit, 2, -1)


def _apply_2x2(flat: np.ndarray, gate: np.ndarray, qubit: int) -> None:
    view = _axis_view(flat, qubit)
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    view[:, 0, :] = gate[0, 0] * a0 + gate[0, 1] * a1
    view[:, 1, :] = gate[1, 0] * a0 + gate[1, 1] * a1


def _apply_h(flat: np.ndarray, qubit: int) -> None:
    view = _axis_view(flat, qubit)
    a0 = view[:, 0, :].copy()
    a1 = view[:, 1, :]
    view[:, 0, :] = (a0 + a1) * _SQRT_HALF
    view[:, 1, :] = (a0 - a1) * _SQRT_HALF


def _apply_s(flat: np.ndarray, qubit: int, dagger: bool = False) -> None:
    view = _axis_view(flat, qubit)
    view[:, 1, :] *= -1j if dagger else 1j


def _apply_cx(flat: np.ndarray, control: int, target: int) -> None:
    if control < target:
        view = _axis_view(flat, control)[:, 1, :]  # control = 1 block
        sub = view.reshape(view.shape[0], 2 ** (target - control - 1), 2, -1)
        tmp = sub[:, :, 0, :].copy()
        sub[:, :, 0, :] = sub[:, :, 1, :]
        sub[:, :, 1, :] = tmp
    else:
        sub = flat.reshape(2**target, 2, 2 ** (control - target - 1), 2, -1)
        tmp = sub[:, 0, :, 1, :].copy()
        sub[:, 0, :, 1, :] = sub[:, 1, :, 1, :]
        sub[:, 1, :, 1, :] = tmp


def apply_gates_statevector(flat: np.ndarray, gates: list[Gate]) -> None:
    """Apply a {h, s, sdg, cx} gate list in place to a flat statevector."""
    for g in gates:
        kind = g[0]
        if kind == "h":
            _apply_h(flat, g[1])
        elif kind == "s":
            _apply_s(flat, g[1])
        elif kind == "sdg":
            _apply_s(flat, g[1], dagger=True)
        elif kind == "cx":
            _apply_cx(flat, g[1], g[2])
        else:
            raise ValueError(f"unknown gate {g!r}")


def _conjugate_gate_list(gates: list[Gate]) -> list[Gate]:
    """Entrywise complex conjugate of the circuit; H and CX are real."""
    swap = {"s": "sdg", "sdg": "s"}
    return [(swap[g[0]], g[1]) if g[0] in swap else g for g in gates]


def apply_gates_density(rho: np.ndarray, gates: list[Gate]) -> None:
    """rho -> G rho G^dag in place for a {h, s, sdg, cx} gate list."""
    apply_gates_statevector(rho.reshape(-1), gates)  # row side, columns as batch
    rho_t = np.ascontiguousarray(rho.T)
    apply_gates_statevector(rho_t.reshape(-1), _conjugate_gate_list(gates))
    rho[...] = rho_t.T


def apply_single_qubit_gate(
    state: PureState, gate: np.ndarray, qubit: int, tol: float = 1e-10
) -> PureState:
    """Apply a 2x2 unitary in place; rejects non-unitary input."""
    if qubit >= state.n:
        raise ValueError("qubit index out of range")
    gate = np.asarray(gate, dtype=complex)
    if not np.allclose(gate.conj().T @ gate, np.eye(2), atol=tol):
        raise ValueError("gate is not unitary within tolerance")
    _apply_2x2(state.amplitudes, gate, qubit)
    return state


def conjugate_by_circuit(state, gates: list[Gate]):
    """Apply a circuit to a PureState or MixedState (C . C^dag for mixed)."""
    if isinstance(state, PureState):
        apply_gates_statevector(state.amplitudes, gates)
        return state
    if isinstance(state, MixedState):
        apply_gates_density(state.matrix, gates)
        return state
    raise TypeError(f"unsupported state type {type(state)!r}")


def unitary_from_gates(n: int, gates: list[Gate]) -> np.ndarray:
    """Dense unitary of the circuit (apply order = list order)."""
    d = 2**n
    work = np.eye(d, dtype=complex)  # row j = j-th basis column
    for j in range(d):
        apply_gates_statevector(work[j], gates)
    return work.T


# ---------------------------------------------------------------------------
# Measurements and dephasing
# ---------------------------------------------------------------------------

MEASURE_ZERO_TOL = 1e-14


class MeasureZeroBranch(RuntimeError):
    """Projection onto a branch of essentially zero Born probability."""


def project_theta(
    state: PureState, basis: ThetaBasis, outcome: int
) -> tuple[PureState, float]:
    """Project onto basis ket ``outcome`` (1 or 2); returns (P psi, prob).

    The returned state is NOT renormalized; prob is its squared norm.
    """
    if outcome not in (1, 2):
        raise ValueError("outcome must be 1 or 2")
    ket = basis.kets()[outcome - 1]
    view = _axis_view(state.amplitudes, basis.qubit)
    overlap = ket[0].conjugate() * view[:, 0, :] + ket[1].conjugate() * view[:, 1, :]
    out = state.copy()
    oview = _axis_view(out.amplitudes, basis.qubit)
    oview[:, 0, :] = ket[0] * overlap
    oview[:, 1, :] = ket[1] * overlap
    prob = float(np.vdot(overlap, overlap).real)
    return out, prob


def born_probability(state: PureState, basis: ThetaBasis, outcome: int) -> float:
    ket = basis.kets()[outcome - 1]
    view = _axis_view(state.amplitudes, basis.qubit)
    overlap = ket[0].conjugate() * view[:, 0, :] + ket[1].conjugate() * view[:, 1, :]
    return float(np.vdot(overlap, overlap).real)


def born_sample_measure(
    state: PureState, basis: ThetaBasis, rng: np.random.Generator
) -> tuple[PureState, int]:
    """Sample the outcome with Born probabilities; returns normalized state."""
    p1 = born_probability(state, basis, 1)
    outcome = 1 if rng.random() < p1 else 2
    prob = p1 if outcome == 1 else 1.0 - p1
    if prob < MEASURE_ZERO_TOL:
        raise MeasureZeroBranch(f"outcome {outcome} has probability {prob:.2e}")
    projected, _ = project_theta(state, basis, outcome)
    projected.amplitudes /= math.sqrt(prob)
    return projected, outcome


def forced_measure(state: PureState, basis: ThetaBasis, outcome: int) -> PureState:
    """Project on a fixed outcome and renormalize; raises on measure-zero."""
    projected, prob = project_theta(state, basis, outcome)
    if prob < MEASURE_ZERO_TOL:
        raise MeasureZeroBranch(f"outcome {outcome} has probability {prob:.2e}")
    projected.amplitudes /= math.sqrt(prob)
    return projected


def dephase_qubit(state: MixedState, basis: ThetaBasis) -> MixedState:
    """Kill the coherences of one qubit in the given basis, in place.

    Implemented by rotating the qubit to the computational basis, zeroing
    the off-diagonal 2x2 blocks, and rotating back; exactly trace
    preserving and idempotent.
    """
    n, q = state.n, basis.qubit
    k1, k2 = basis.kets()
    u = np.column_stack([k1, k2])
    rho = state.matrix
    _conjugate_qubit(rho, u.conj().T, q)
    lead, rest = 2**q, 2 ** (n - 1 - q)
    blocks = rho.reshape(lead, 2, rest, lead, 2, rest)
    blocks[:, 0, :, :, 1, :] = 0.0
    blocks[:, 1, :, :, 0, :] = 0.0
    _conjugate_qubit(rho, u, q)
    return state


def _conjugate_qubit(rho: np.ndarray, u: np.ndarray, q: int) -> None:
    """rho -> (u on qubit q) rho (u^dag on qubit q), in place."""
    _apply_2x2(rho.reshape(-1), u, q)  # row side
    rho_t = np.ascontiguousarray(rho.T)
    _apply_2x2(rho_t.reshape(-1), u.conj(), q)
    rho[...] = rho_t.T


# ---------------------------------------------------------------------------
# Purity
# ---------------------------------------------------------------------------

def purity_subsystem(state, bipartition: Bipartition) -> float:
    """tr of the squared reduced state on the A factor.

    Pure states go through the d_A x d_B amplitude reshaping (Gram matrix
    on the smaller side); mixed states through the partial trace.
    """
    if isinstance(state, PureState):
        if bipartition.n != state.n:
            raise ValueError("bipartition does not match the qubit count")
        order = bipartition.qubits_a + tuple(
            q for q in range(state.n) if q not in bipartition.qubits_a
        )
        m = state.amplitudes.reshape((2,) * state.n).transpose(order)
        m = m.reshape(bipartition.d_a, bipartition.d_b)
        if bipartition.d_a > bipartition.d_b:
            m = m.T
        gram = m @ m.conj().T
        return float(np.real(np.einsum("ij,ji->", gram, gram)))
    if isinstance(state, MixedState):
        rho_a = partial_trace(state, bipartition)
        return float(np.real(np.einsum("ij,ji->", rho_a, rho_a)))
    raise TypeError(f"unsupported state type {type(state)!r}")


def partial_trace(state: MixedState, bipartition: Bipartition) -> np.ndarray:
    if bipartition.n != state.n:
        raise ValueError("bipartition does not match the qubit count")
    n = state.n
    order = bipartition.qubits_a + tuple(
        q for q in range(n) if q not in bipartition.qubits_a
    )
    axes = order + tuple(n + q for q in order)
    da, db = bipartition.d_a, bipartition.d_b
    rho = state.matrix.reshape((2,) * (2 * n)).transpose(axes).reshape(da, db, da, db)
    return np.einsum("abcb->ac", rho)
