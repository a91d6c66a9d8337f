"""Dense small-dimension operators used as oracles for the coefficient
calculus: permutation operators, the Pauli fourth-power projector Q, and
dense twirl channels built directly from the Weingarten tables.

Everything here scales exponentially and is meant for d <= 4 (t = 4) or
d <= 16 (t = 2); the production paths never build these matrices.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import s4, weingarten
from .s4 import Perm


def permutation_operator(d: int, perm: Perm) -> np.ndarray:
    """Dense T_perm on (C^d)^{tensor t}, moving factor k to slot perm[k].

    Composition matches `s4.compose`: T_p @ T_q == T_{compose(p, q)}.
    """
    t = len(perm)
    dim = d**t
    source = np.arange(dim).reshape((d,) * t)
    source = source.transpose(s4.inverse(perm)).reshape(dim)
    mat = np.zeros((dim, dim))
    mat[np.arange(dim), source] = 1.0
    return mat


def bipartite_permutation_operator(
    d_a: int, d_b: int, perm_a: Perm, perm_b: Perm
) -> np.ndarray:
    """Dense T^{(A)}_{perm_a} T^{(B)}_{perm_b} on ((C^{d_a} x C^{d_b}))^{tensor t}."""
    t = len(perm_a)
    if len(perm_b) != t:
        raise ValueError("permutations must act on the same number of copies")
    dim = (d_a * d_b) ** t
    source = np.arange(dim).reshape(sum(((d_a, d_b) for _ in range(t)), ()))
    inv_a, inv_b = s4.inverse(perm_a), s4.inverse(perm_b)
    axes = [0] * (2 * t)
    for k in range(t):
        axes[2 * k] = 2 * inv_a[k]
        axes[2 * k + 1] = 2 * inv_b[k] + 1
    source = source.transpose(axes).reshape(dim)
    mat = np.zeros((dim, dim))
    mat[np.arange(dim), source] = 1.0
    return mat


PAULI_1Q = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def pauli_strings(n: int):
    """All 4**n unsigned Pauli strings on n qubits, identity first."""
    for code in range(4**n):
        mat = np.array([[1.0 + 0j]])
        c = code
        for _ in range(n):
            mat = np.kron(mat, PAULI_1Q[c % 4])
            c //= 4
        yield mat


@lru_cache(maxsize=None)
def q_matrix(d: int) -> np.ndarray:
    """Dense Q = d^-2 sum_P P^{tensor 4} over unsigned Pauli strings."""
    n = d.bit_length() - 1
    if 2**n != d:
        raise ValueError(f"d must be a power of 2, got {d}")
    dim = d**4
    out = np.zeros((dim, dim), dtype=complex)
    for p in pauli_strings(n):
        p4 = np.kron(np.kron(p, p), np.kron(p, p))
        out += p4
    return out / d**2


def symmetrizer(d: int, t: int) -> np.ndarray:
    elems = s4.elements(t)
    acc = sum(permutation_operator(d, p) for p in elems)
    return acc / len(elems)


def haar_random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via phase-fixed QR of a Ginibre matrix."""
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def haar_twirl_dense(op: np.ndarray, t: int, d: int) -> np.ndarray:
    """Twirl of ``op`` over the full unitary group, from the Weingarten table."""
    table = weingarten.weingarten_haar(t, d)
    perms = [permutation_operator(d, p) for p in s4.elements(t)]
    moments = [np.trace(op @ tp) for tp in perms]
    out = np.zeros_like(op, dtype=complex)
    for a, ta in enumerate(perms):
        coeff = sum(float(table.table[a][b]) * moments[b] for b in range(len(perms)))
        out = out + coeff * ta
    return out


def clifford_twirl_dense(op: np.ndarray, d: int) -> np.ndarray:
    """Fourth-moment Clifford twirl of ``op`` from the sector tables."""
    tables = weingarten.weingarten_clifford(d)
    q = q_matrix(d)
    qperp = np.eye(d**4) - q
    perms = [permutation_operator(d, p) for p in s4.S4_ELEMENTS]
    basis_plus = [q @ tp for tp in perms]
    basis_minus = [qperp @ tp for tp in perms]
    m_plus = [np.trace(op @ bp) for bp in basis_plus]
    m_minus = [np.trace(op @ bm) for bm in basis_minus]
    out = np.zeros_like(op, dtype=complex)
    for a in range(24):
        cp = sum(float(tables.w_plus[a][b]) * m_plus[b] for b in range(24))
        cm = sum(float(tables.w_minus[a][b]) * m_minus[b] for b in range(24))
        out = out + cp * basis_plus[a] + cm * basis_minus[a]
    return out
