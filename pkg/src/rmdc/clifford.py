"""Clifford group elements as binary-symplectic tableaus.

A tableau stores the conjugation images of the generators X_j and Z_j as
rows of a 2n x 2n GF(2) matrix (columns ordered x_0..x_{n-1}, z_0..z_{n-1})
plus a sign per row.  Row i < n is the image of X_i, row n+i the image of
Z_i.  A row (x, z) with sign bit r stands for the Hermitian Pauli
(-1)^r i^{|x & z|} X^x Z^z.

Sampling is exactly uniform: the images are drawn column pair by column
pair, picking uniform solutions of the symplectic constraints over GF(2);
the number of solutions at each step does not depend on earlier choices,
so the induced measure on the group is uniform.  The same choice decoding
doubles as a bijection from [0, group_size) onto the group, which the
small-n tests use to enumerate it exhaustively.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

Gate = tuple
# Gates are ("h", q), ("s", q) and ("cx", c, t); circuits are lists applied
# left to right, i.e. the unitary is the reversed matrix product.


# ---------------------------------------------------------------------------
# Pauli strings with exact phase tracking
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PauliString:
    """i^phase times the Hermitian string i^{|x&z|} X^x Z^z on n qubits."""

    n: int
    x: int
    z: int
    phase: int = 0  # power of i, mod 4

    def __post_init__(self):
        if self.phase not in (0, 1, 2, 3):
            raise ValueError("phase must be a power of i in {0,1,2,3}")
        if self.x >> self.n or self.z >> self.n:
            raise ValueError("bit mask exceeds qubit count")

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.n != other.n:
            raise ValueError("size mismatch")
        x3, z3 = self.x ^ other.x, self.z ^ other.z
        g = (
            (self.x & self.z).bit_count()
            + (other.x & other.z).bit_count()
            + 2 * (self.z & other.x).bit_count()
            - (x3 & z3).bit_count()
        )
        return PauliString(self.n, x3, z3, (self.phase + other.phase + g) % 4)

    def matrix(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix; qubit 0 is the leftmost tensor factor."""
        out = np.array([[1.0 + 0j]])
        for q in range(self.n):
            xb, zb = (self.x >> q) & 1, (self.z >> q) & 1
            m = np.eye(2, dtype=complex)
            if xb:
                m = np.array([[0, 1], [1, 0]], dtype=complex)
            if zb:
                m = m @ np.array([[1, 0], [0, -1]], dtype=complex)
            if xb and zb:
                m = 1j * m
            out = np.kron(out, m)
        return (1j**self.phase) * out


# ---------------------------------------------------------------------------
# Tableau
# ---------------------------------------------------------------------------

@dataclass
class CliffordTableau:
    """Symplectic matrix plus phase vector; see the module docstring."""

    n: int
    symplectic: np.ndarray  # (2n, 2n) uint8
    phases: np.ndarray      # (2n,) uint8, powers of i (always 0 or 2 here)

    def copy(self) -> "CliffordTableau":
        return CliffordTableau(self.n, self.symplectic.copy(), self.phases.copy())

    def row_pauli(self, i: int) -> PauliString:
        n = self.n
        x = _bits_to_int(self.symplectic[i, :n])
        z = _bits_to_int(self.symplectic[i, n:])
        return PauliString(n, x, z, int(self.phases[i]) % 4)

    def is_symplectic(self) -> bool:
        n = self.n
        lam = np.zeros((2 * n, 2 * n), dtype=np.uint8)
        lam[:n, n:] = np.eye(n, dtype=np.uint8)
        lam[n:, :n] = np.eye(n, dtype=np.uint8)
        m = self.symplectic.astype(np.uint8)
        return np.array_equal((m @ lam @ m.T) % 2, lam)


def identity_tableau(n: int) -> CliffordTableau:
    return CliffordTableau(n, np.eye(2 * n, dtype=np.uint8), np.zeros(2 * n, dtype=np.uint8))


def _bits_to_int(bits) -> int:
    out = 0
    for i, b in enumerate(bits):
        if b:
            out |= 1 << i
    return out


def _int_to_bits(v: int, width: int) -> np.ndarray:
    return np.array([(v >> i) & 1 for i in range(width)], dtype=np.uint8)


# ---------------------------------------------------------------------------
# Gate conjugation rules
# ---------------------------------------------------------------------------

def apply_gate_to_tableau(tab: CliffordTableau, gate: Gate) -> None:
    """Conjugate every row of ``tab`` by the gate, in place.

    If the tableau represents C, the result represents gC.
    """
    n = tab.n
    m, ph = tab.symplectic, tab.phases
    kind = gate[0]
    if kind == "h":
        q = gate[1]
        xq, zq = m[:, q].copy(), m[:, n + q].copy()
        ph += 2 * (xq & zq)
        m[:, q], m[:, n + q] = zq, xq
    elif kind == "s":
        q = gate[1]
        xq, zq = m[:, q], m[:, n + q]
        ph += 2 * (xq & zq)
        m[:, n + q] = zq ^ xq
    elif kind == "cx":
        c, t = gate[1], gate[2]
        xc, zc = m[:, c], m[:, n + c]
        xt, zt = m[:, t], m[:, n + t]
        ph += 2 * (xc & zt & (xt ^ zc ^ 1))
        m[:, t] = xt ^ xc
        m[:, n + c] = zc ^ zt
    else:
        raise ValueError(f"unknown gate {gate!r}")
    ph %= 4


def tableau_from_gates(n: int, gates: list[Gate]) -> CliffordTableau:
    tab = identity_tableau(n)
    for g in gates:
        apply_gate_to_tableau(tab, g)
    return tab


def conjugate_pauli(tab: CliffordTableau, p: PauliString) -> PauliString:
    """C P C-dagger through the tableau, with exact phase tracking."""
    n = tab.n
    if p.n != n:
        raise ValueError("size mismatch between tableau and Pauli string")
    # P = i^{phase + |x&z|} prod_{j in x} X_j prod_{j in z} Z_j; conjugate
    # factor by factor and multiply the row images (the PauliString product
    # keeps the W-normalization phases exact).
    acc = PauliString(n, 0, 0, (p.phase + (p.x & p.z).bit_count()) % 4)
    for j in range(n):
        if (p.x >> j) & 1:
            acc = acc * tab.row_pauli(j)
    for j in range(n):
        if (p.z >> j) & 1:
            acc = acc * tab.row_pauli(n + j)
    return acc


# ---------------------------------------------------------------------------
# Uniform sampling / enumeration of the group
# ---------------------------------------------------------------------------

def symplectic_group_size(n: int) -> int:
    size = 1
    for j in range(n):
        dim = 2 * n - 2 * j
        size *= (2**dim - 1) * 2 ** (dim - 1)
    return size


def clifford_group_size(n: int) -> int:
    """Group order modulo global phases: |Sp(2n, 2)| * 4^n."""
    return symplectic_group_size(n) * 4**n


def _parity(v: int) -> int:
    return v.bit_count() & 1


def _eliminate(rows: list[int]) -> dict[int, int]:
    """Row-reduce GF(2) rows (ints); returns pivot column -> row."""
    pivots: dict[int, int] = {}
    for r in rows:
        cur = r
        while cur:
            msb = cur.bit_length() - 1
            if msb in pivots:
                cur ^= pivots[msb]
            else:
                pivots[msb] = cur
                break
    return pivots


def _nullspace_basis(constraints: list[int], width: int) -> list[int]:
    pivots = _eliminate(constraints)
    basis = []
    for col in range(width):
        if col in pivots:
            continue
        v = 1 << col
        for pcol in sorted(pivots):
            if _parity(pivots[pcol] & v):
                v ^= 1 << pcol
        basis.append(v)
    return basis


def _solve_affine(constraints: list[int], rhs: list[int], width: int) -> int:
    """A particular solution of parity(row & v) = rhs_row over GF(2)."""
    mask = (1 << width) - 1
    pivots: dict[int, int] = {}
    for row, bit in zip(constraints, rhs):
        cur = row | (bit << width)
        while cur & mask:
            msb = (cur & mask).bit_length() - 1
            if msb in pivots:
                cur ^= pivots[msb]
            else:
                pivots[msb] = cur
                break
        else:
            if cur >> width:
                raise ArithmeticError("inconsistent symplectic constraint system")
    v = 0
    for pcol in sorted(pivots):
        row = pivots[pcol]
        want = (row >> width) & 1
        if _parity(row & mask & v) != want:
            v ^= 1 << pcol
    return v


def _lambda_swap(v: int, n: int) -> int:
    """Symplectic form pairing vector: swap the x and z halves."""
    mask = (1 << n) - 1
    return ((v & mask) << n) | (v >> n)


def _combine(basis: list[int], k: int) -> int:
    v = 0
    i = 0
    while k:
        if k & 1:
            v ^= basis[i]
        k >>= 1
        i += 1
    return v


def _tableau_from_choices(n: int, choices: list[int], phase_bits: int) -> CliffordTableau:
    width = 2 * n
    rows: list[int] = []  # images in the order a_0, b_0, a_1, b_1, ...
    it = iter(choices)
    for j in range(n):
        constraints = [_lambda_swap(u, n) for u in rows]
        basis = _nullspace_basis(constraints, width)
        a = _combine(basis, next(it) + 1)  # skip the zero combination
        b_part = _solve_affine(
            constraints + [_lambda_swap(a, n)], [0] * len(constraints) + [1], width
        )
        basis_b = _nullspace_basis(constraints + [_lambda_swap(a, n)], width)
        b = b_part ^ _combine(basis_b, next(it))
        rows.extend((a, b))
    ordered = [rows[2 * j] for j in range(n)] + [rows[2 * j + 1] for j in range(n)]
    shifts = np.arange(width, dtype=np.int64)
    m = ((np.array(ordered, dtype=np.int64)[:, None] >> shifts) & 1).astype(np.uint8)
    ph = (2 * ((phase_bits >> shifts) & 1)).astype(np.uint8)
    return CliffordTableau(n, m, ph)


def _choice_sizes(n: int) -> list[int]:
    sizes = []
    for j in range(n):
        dim = 2 * n - 2 * j
        sizes.extend((2**dim - 1, 2 ** (dim - 1)))
    return sizes


def clifford_from_index(n: int, index: int) -> CliffordTableau:
    """Bijection [0, clifford_group_size(n)) -> tableau."""
    if not 0 <= index < clifford_group_size(n):
        raise ValueError("index out of range")
    choices = []
    for size in _choice_sizes(n):
        index, c = divmod(index, size)
        choices.append(c)
    return _tableau_from_choices(n, choices, index)


def sample_uniform_clifford(n: int, rng: np.random.Generator) -> CliffordTableau:
    """Exactly uniform over the Clifford group modulo global phase."""
    if n < 1:
        raise ValueError("need at least one qubit")
    choices = [int(rng.integers(0, size)) for size in _choice_sizes(n)]
    phase_bits = int(rng.integers(0, 4**n))
    return _tableau_from_choices(n, choices, phase_bits)


# ---------------------------------------------------------------------------
# Synthesis into {H, S, CNOT}
# ---------------------------------------------------------------------------

def _pauli_mul_int(
    x1: int, z1: int, p1: int, x2: int, z2: int, p2: int
) -> tuple[int, int, int]:
    """Product of i^p1 W(x1,z1) and i^p2 W(x2,z2) as packed ints."""
    x3, z3 = x1 ^ x2, z1 ^ z2
    g = (
        (x1 & z1).bit_count()
        + (x2 & z2).bit_count()
        + 2 * (z1 & x2).bit_count()
        - (x3 & z3).bit_count()
    )
    return x3, z3, (p1 + p2 + g) % 4


def _rows_as_ints(tab: CliffordTableau) -> tuple[list[int], list[int], list[int]]:
    """(x, z, sign) of every row as packed ints, LSB = qubit/row 0."""
    n = tab.n
    weights = 1 << np.arange(n, dtype=np.int64)
    xs = (tab.symplectic[:, :n].astype(np.int64) * weights).sum(axis=1).tolist()
    zs = (tab.symplectic[:, n:].astype(np.int64) * weights).sum(axis=1).tolist()
    rs = (tab.phases.astype(np.int64) // 2).tolist()
    return xs, zs, rs


def _invert_rows_int(
    n: int, xs: list[int], zs: list[int], rs: list[int]
) -> tuple[list[int], list[int], list[int]]:
    """Int-packed rows of the inverse tableau (symplectic inverse + signs)."""
    rows = [xs[i] | (zs[i] << n) for i in range(2 * n)]
    inv_x, inv_z, inv_r = [], [], []
    for i in range(2 * n):
        si = (i + n) % (2 * n)
        v = 0
        for j in range(2 * n):
            sj = (j + n) % (2 * n)
            v |= ((rows[sj] >> si) & 1) << j
        ix, iz = v & ((1 << n) - 1), v >> n
        # sign: conjugating W(ix, iz) forward must give +- generator i
        px, pz, pp = 0, 0, (ix & iz).bit_count() % 4
        for j in range(n):
            if (ix >> j) & 1:
                px, pz, pp = _pauli_mul_int(px, pz, pp, xs[j], zs[j], 2 * rs[j])
        for j in range(n):
            if (iz >> j) & 1:
                px, pz, pp = _pauli_mul_int(px, pz, pp, xs[n + j], zs[n + j], 2 * rs[n + j])
        inv_x.append(ix)
        inv_z.append(iz)
        inv_r.append((pp // 2) & 1)
    return inv_x, inv_z, inv_r


class _ColumnTableau:
    """Column-packed tableau for synthesis: bit i of ``x[q]`` is the x_q bit
    of row i, so every gate is a handful of integer operations."""

    def __init__(self, n: int, xs: list[int], zs: list[int], rs: list[int]):
        self.n = n
        self.x = [0] * n
        self.z = [0] * n
        self.r = 0
        for i in range(2 * n):
            for q in range(n):
                self.x[q] |= ((xs[i] >> q) & 1) << i
                self.z[q] |= ((zs[i] >> q) & 1) << i
            self.r |= (rs[i] & 1) << i
        self.mask = (1 << (2 * n)) - 1

    def row_x(self, i: int, q: int) -> int:
        return (self.x[q] >> i) & 1

    def row_z(self, i: int, q: int) -> int:
        return (self.z[q] >> i) & 1

    def apply(self, gate: Gate) -> None:
        kind = gate[0]
        if kind == "h":
            q = gate[1]
            self.r ^= self.x[q] & self.z[q]
            self.x[q], self.z[q] = self.z[q], self.x[q]
        elif kind == "s":
            q = gate[1]
            self.r ^= self.x[q] & self.z[q]
            self.z[q] ^= self.x[q]
        elif kind == "cx":
            c, t = gate[1], gate[2]
            self.r ^= self.x[c] & self.z[t] & (self.x[t] ^ self.z[c] ^ self.mask)
            self.x[t] ^= self.x[c]
            self.z[c] ^= self.z[t]
        else:
            raise ValueError(f"unknown gate {gate!r}")


def _reduce_to_identity(work: _ColumnTableau) -> list[Gate]:
    """Gates whose sequential row conjugation maps ``work`` to the identity."""
    n = work.n
    ops: list[Gate] = []

    def do(gate: Gate):
        work.apply(gate)
        ops.append(gate)

    for j in range(n):
        # --- image of X_j -> X_j ---
        if not any(work.row_x(j, q) for q in range(j, n)):
            q = next(q for q in range(j, n) if work.row_z(j, q))
            do(("h", q))
        if not work.row_x(j, j):
            q = next(q for q in range(j + 1, n) if work.row_x(j, q))
            do(("cx", q, j))
        for q in range(j + 1, n):
            if work.row_x(j, q):
                do(("cx", j, q))
        if any(work.row_z(j, q) for q in range(j + 1, n)):
            if not work.row_z(j, j):
                do(("s", j))
            for q in range(j + 1, n):
                if work.row_z(j, q):
                    do(("cx", q, j))
        if work.row_z(j, j):
            do(("s", j))
        # --- image of Z_j -> Z_j, fixing X_j ---
        for q in range(j + 1, n):
            if work.row_x(n + j, q):
                if work.row_z(n + j, q):
                    do(("s", q))
                do(("h", q))
        if work.row_x(n + j, j):
            do(("h", j))
            do(("s", j))
            do(("h", j))
        for q in range(j + 1, n):
            if work.row_z(n + j, q):
                do(("cx", q, j))
    # Pauli layer for the signs, within the {H, S, CNOT} gate set.
    for j in range(n):
        if (work.r >> j) & 1:  # Z_j flips the sign of the X_j image
            do(("s", j))
            do(("s", j))
        if (work.r >> (n + j)) & 1:  # X_j flips the sign of the Z_j image
            do(("h", j))
            do(("s", j))
            do(("s", j))
            do(("h", j))
    return ops


def invert_tableau(tab: CliffordTableau) -> CliffordTableau:
    """Tableau of the inverse Clifford.

    The symplectic part is Lambda M^T Lambda; the sign of each inverse row
    follows from conjugating its unsigned candidate forward: if
    C W(u_i) C^dag = s g_i then C^dag g_i C = s W(u_i).
    """
    n = tab.n
    inv_x, inv_z, inv_r = _invert_rows_int(n, *_rows_as_ints(tab))
    m = np.zeros((2 * n, 2 * n), dtype=np.uint8)
    ph = np.zeros(2 * n, dtype=np.uint8)
    for i in range(2 * n):
        m[i, :n] = _int_to_bits(inv_x[i], n)
        m[i, n:] = _int_to_bits(inv_z[i], n)
        ph[i] = 2 * inv_r[i]
    return CliffordTableau(n, m, ph)


def tableau_to_gates(tab: CliffordTableau) -> list[Gate]:
    """A {H, S, CNOT} circuit (applied left to right) realizing the tableau."""
    if not tab.is_symplectic():
        raise ValueError("tableau violates the symplectic condition")
    n = tab.n
    inv = _invert_rows_int(n, *_rows_as_ints(tab))
    return _reduce_to_identity(_ColumnTableau(n, *inv))
