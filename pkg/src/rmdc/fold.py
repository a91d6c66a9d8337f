"""Iterated channel-twirl engine on two and four copies.

One iteration alternates a fixed single-qubit CPTP map (tensored with the
identity) with a uniform Clifford twirl of the whole register.  On two
copies the twirled operators live in span{1, S} and the iteration is a
2x2 matrix Xi; on four copies they live in span{Q T_rho, T_rho} and the
iteration is a 48x48 block matrix ((M, N), (O, P)) acting on the
coefficient pair (c, b).

Traces of the single-qubit factor are computed from explicit 16x16
matrices; the factor on the unmeasured qubits reduces to the exact class
functions of `weingarten`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import s4, weingarten as wg

# ---------------------------------------------------------------------------
# Scalar decay rates
# ---------------------------------------------------------------------------

def fgh(d: int) -> tuple[Fraction, Fraction, Fraction]:
    """The three rational decay rates of the dephasing fold channel."""
    den = d * d - 1
    return (
        Fraction(d * d - 8, 8 * den),
        Fraction(d * d - 4, 4 * den),
        Fraction(d * d - 2, 2 * den),
    )


def dephasing_kraus(theta: float) -> list[np.ndarray]:
    """Kraus operators of the single-qubit dephasing in the theta basis."""
    e = np.exp(1j * theta)
    k1 = np.array([1.0, e], dtype=complex) / np.sqrt(2.0)
    k2 = np.array([1.0, -e], dtype=complex) / np.sqrt(2.0)
    return [np.outer(k1, k1.conj()), np.outer(k2, k2.conj())]


def _check_cptp(kraus: list[np.ndarray], tol: float = 1e-10) -> None:
    acc = sum(k.conj().T @ k for k in kraus)
    if not np.allclose(acc, np.eye(2), atol=tol):
        raise ValueError("Kraus operators do not form a CPTP map on one qubit")


# ---------------------------------------------------------------------------
# Order 2: the 2x2 iteration matrix
# ---------------------------------------------------------------------------

def xi_matrix(d: int, kraus: list[np.ndarray]) -> np.ndarray:
    """2x2 iteration matrix on (a_e, a_swap) for a single-qubit map.

    Entry [new, old] = sum_k W[new][k] tr(M^{x2}(T_old) T_k), with the
    single-qubit factor evaluated on explicit 4x4 matrices and the rest of
    the register contributing (d/2)^cycles exactly.
    """
    _check_cptp(kraus)
    if d < 2 or d & (d - 1):
        raise ValueError("d must be a power of 2")
    half = d // 2
    w = wg.weingarten_haar(2, d)
    swap2 = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], float)
    t2 = {(0, 1): np.eye(4), (1, 0): swap2}
    perm_of = {0: (0, 1), 1: (1, 0)}
    xi = np.zeros((2, 2))
    for old in range(2):
        channel_out = _apply_product_channel(t2[perm_of[old]], kraus, copies=2)
        for new in range(2):
            total = 0.0
            for k in range(2):
                single = np.trace(channel_out @ t2[perm_of[k]]).real
                rest = half ** s4.cycle_count(
                    s4.compose(perm_of[old], perm_of[k])
                )
                total += float(w.table[new][k]) * single * rest
            xi[new, old] = total
    return xi


def xi_dephasing_exact(d: int) -> np.ndarray:
    """Closed form of the dephasing Xi: [[1, d/(2(d^2-1))], [0, h]]."""
    h = float(fgh(d)[2])
    return np.array([[1.0, d / (2.0 * (d * d - 1))], [0.0, h]])


@dataclass
class FoldState2:
    """Coefficients (a_e, a_swap) of an operator a_e 1 + a_swap S."""

    d: int
    a: np.ndarray

    @classmethod
    def pure_state(cls, d: int) -> "FoldState2":
        val = 1.0 / (d * (d + 1.0))
        return cls(d, np.array([val, val]))

    def trace(self) -> float:
        return float(self.a[0] * self.d**2 + self.a[1] * self.d)

    def purity(self, d_a: int, d_b: int) -> float:
        """Contraction with the A-factor swap."""
        return float(self.a[0] * d_a * d_b**2 + self.a[1] * d_a**2 * d_b)


def fold2_evolve(initial: FoldState2, k: int, xi: np.ndarray) -> FoldState2:
    a = initial.a.copy()
    for _ in range(k):
        a = xi @ a
    return FoldState2(initial.d, a)


def fold2_coefficients_dephasing(d: int, k: int) -> tuple[float, float]:
    """Closed form for the pure-state initial condition:
    a_e = 1/d^2 - h^k/(d^2(d+1)), a_swap = h^k/(d(d+1))."""
    h = float(fgh(d)[2])
    return 1.0 / d**2 - h**k / (d**2 * (d + 1)), h**k / (d * (d + 1))


# ---------------------------------------------------------------------------
# Order 4: single-qubit trace engine and the 48x48 block matrix
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _single_qubit_permutations() -> list[np.ndarray]:
    from .dense_ops import permutation_operator

    return [permutation_operator(2, p) for p in s4.S4_ELEMENTS]


@lru_cache(maxsize=None)
def _single_qubit_q() -> np.ndarray:
    from .dense_ops import q_matrix

    return q_matrix(2)


def _apply_product_channel(op: np.ndarray, kraus: list[np.ndarray], copies: int) -> np.ndarray:
    """(M tensor ... tensor M)(op) for a single-qubit Kraus list."""
    out = np.zeros_like(op, dtype=complex)
    idx = [0] * copies
    while True:
        k = np.array([[1.0 + 0j]])
        for i in idx:
            k = np.kron(k, kraus[i])
        out += k @ op @ k.conj().T
        for pos in range(copies):
            idx[pos] += 1
            if idx[pos] < len(kraus):
                break
            idx[pos] = 0
        else:
            break
    return out


@dataclass(frozen=True)
class TransferMatrices:
    """The four 24x24 blocks and their 48x48 assembly."""

    d: int
    theta: float
    xi: np.ndarray
    m: np.ndarray
    n: np.ndarray
    o: np.ndarray
    p: np.ndarray

    @property
    def s(self) -> np.ndarray:
        top = np.hstack([self.m, self.n])
        bottom = np.hstack([self.o, self.p])
        return np.vstack([top, bottom])


def mnop_matrices(d: int, theta: float, kraus: list[np.ndarray] | None = None) -> TransferMatrices:
    """Iteration blocks for a single-qubit map (dephasing by default)."""
    if kraus is None:
        kraus = dephasing_kraus(theta)
    _check_cptp(kraus)
    if d < 4:
        raise ValueError("the two-sector tables need d >= 4")
    half = d // 2
    tables = wg.weingarten_clifford(d)
    w_plus = np.array([[float(v) for v in row] for row in tables.w_plus])
    w_minus = np.array([[float(v) for v in row] for row in tables.w_minus])

    perms = _single_qubit_permutations()
    q2 = _single_qubit_q()
    elems = s4.S4_ELEMENTS
    n_el = len(elems)

    # class functions of the unmeasured factor
    omega = np.zeros((n_el, n_el))
    tau = np.zeros((n_el, n_el))
    for i, pi in enumerate(elems):
        for j, pj in enumerate(elems):
            prod = s4.compose(pi, pj)
            omega[i, j] = wg.q_trace(prod, half)
            tau[i, j] = half ** s4.cycle_count(prod)

    # single-qubit traces
    xqq = np.zeros((n_el, n_el))
    xq1 = np.zeros((n_el, n_el))
    yqq = np.zeros((n_el, n_el))
    y11 = np.zeros((n_el, n_el))
    q_t = [q2 @ t for t in perms]
    for i in range(n_el):
        out_q = _apply_product_channel(q_t[i], kraus, copies=4)
        out_t = _apply_product_channel(perms[i], kraus, copies=4)
        for j in range(n_el):
            xqq[i, j] = np.trace(out_q @ q_t[j]).real
            xq1[i, j] = np.trace(out_q @ perms[j]).real
            yqq[i, j] = np.trace(out_t @ q_t[j]).real
            y11[i, j] = np.trace(out_t @ perms[j]).real

    # full-register trace tables; Q factorizes across the qubit split, so
    # every Q-carrying pairing keeps the omega factor on the rest
    t_qq = xqq * omega                # tr(M(QT_rho) Q T_sigma)
    t_q_perp = (xq1 - xqq) * omega    # tr(M(QT_rho) Qperp T_sigma)
    t_tq = yqq * omega                # tr(M(T_rho) Q T_sigma)
    t_t_perp = y11 * tau - yqq * omega  # tr(M(T_rho) Qperp T_sigma)

    m = (t_qq @ w_plus - t_q_perp @ w_minus).T
    n = (t_tq @ w_plus - t_t_perp @ w_minus).T
    o = (t_q_perp @ w_minus).T
    p = (t_t_perp @ w_minus).T
    return TransferMatrices(d=d, theta=theta, xi=xi_matrix(d, kraus), m=m, n=n, o=o, p=p)


@dataclass
class FoldState4:
    """Coefficient vectors of sum_rho (c_rho Q + b_rho) T_rho."""

    d: int
    c: np.ndarray
    b: np.ndarray

    @classmethod
    def zero_state(cls, d: int) -> "FoldState4":
        """Initial twirl of |0...0><0...0| on four copies.

        The Pauli-weight moments are tr(psi^{x4} Q T_sigma) = 1/d and
        tr(psi^{x4} Qperp T_sigma) = 1 - 1/d for every sigma, which makes
        both coefficient vectors constant.
        """
        tables = wg.weingarten_clifford(d)
        m_plus = Fraction(1, d)
        m_minus = 1 - Fraction(1, d)
        c = [
            sum(tables.w_plus[r][s] * m_plus - tables.w_minus[r][s] * m_minus for s in range(24))
            for r in range(24)
        ]
        b = [sum(tables.w_minus[r][s] * m_minus for s in range(24)) for r in range(24)]
        return cls(d, np.array([float(v) for v in c]), np.array([float(v) for v in b]))

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.c, self.b])

    def trace(self) -> float:
        total = 0.0
        for i, p in enumerate(s4.S4_ELEMENTS):
            total += self.c[i] * wg.q_trace(p, self.d)
            total += self.b[i] * self.d ** s4.cycle_count(p)
        return float(total)

    def contract_a_permutation(self, pi, d_a: int, d_b: int) -> float:
        """tr(T^{(A)}_pi times the represented operator)."""
        if d_a * d_b != self.d:
            raise ValueError("bipartition does not match d")
        total = 0.0
        for i, p in enumerate(s4.S4_ELEMENTS):
            pip = s4.compose(pi, p)
            total += self.c[i] * wg.q_trace(pip, d_a) * wg.q_trace(p, d_b)
            total += self.b[i] * d_a ** s4.cycle_count(pip) * d_b ** s4.cycle_count(p)
        return float(total)

    def purity_second_moment(self, d_a: int, d_b: int) -> float:
        return self.contract_a_permutation(s4.SWAP_12_34, d_a, d_b)


def fold4_evolve(initial: FoldState4, k: int, transfer: TransferMatrices) -> FoldState4:
    """k iterations by repeated multiplication of the 48x48 block matrix."""
    vec = initial.stacked()
    s = transfer.s
    for _ in range(k):
        vec = s @ vec
    return FoldState4(initial.d, vec[:24], vec[24:])


# ---------------------------------------------------------------------------
# Closed forms for the dephasing map at theta = pi/2
# ---------------------------------------------------------------------------

def fold4_coefficients_pi2(d: int, k: int) -> FoldState4:
    """Per-element coefficients after k dephasing iterations at theta=pi/2.

    Rational closed forms per conjugacy class, valid for d >= 8.  At d = 4
    the minus sector loses its sign-irrep component (tr(Qperp Pi_4^[1^4])
    vanishes) and the coefficient flow is genuinely different; use the
    transfer-matrix engine there.  The identity-class numerators are
    (4d^2+192) on f^k and (d^4+6d^3+29d^2+126d+168) on h^k, and the
    constant of the double-transposition class is 1/(4d^4); all pinned by
    the exact dense-iteration oracle.
    """
    if d < 8:
        raise ValueError("closed forms hold for d >= 8; use fold4_evolve below that")
    f, g, h = (float(v) for v in fgh(d))
    fk, gk, hk = f**k, g**k, h**k
    dp1, dp2, dp4 = d + 1.0, d + 2.0, d + 4.0
    c_by_class = {
        (1, 1, 1, 1): (
            ((4 * d**2 + 192) * fk
             + (d**4 + 6 * d**3 + 29 * d**2 + 126 * d + 168) * hk)
            / (4 * d**4 * dp1 * dp2 * dp4)
            - 3 * (d**2 + 28) * gk / (4 * d**4 * dp1 * dp2)
            - 3 / (4 * d**4)
        ),
        (2, 1, 1): (
            (d**2 + 12) * gk / (4 * d**3 * dp1 * dp2)
            - (d**2 + 16) * fk / (2 * d**3 * dp1 * dp2 * dp4)
            - hk / (2 * d**3 * dp1)
        ),
        (3, 1): fk / (4 * dp1 * dp2 * dp4),
        (4,): (
            (d**2 - 12) * gk / (4 * d**3 * dp1 * dp2)
            - (3 * d**2 - 16) * fk / (2 * d**3 * dp1 * dp2 * dp4)
            + hk / (2 * d**3 * dp1)
        ),
        (2, 2): (
            1 / (4 * d**4)
            + (5 * d**2 - 16) * fk / (d**4 * dp1 * dp2 * dp4)
            + ((d**2 - 7) * hk - 7 * (d - 2) * gk) / (4 * d**4 * dp1)
        ),
    }
    b_by_class = {
        (1, 1, 1, 1): (
            1 / d**4
            - 7 * hk / (d**4 * dp1)
            + 28 * gk / (d**4 * dp1 * dp2)
            - 64 * fk / (d**4 * dp1 * dp2 * dp4)
        ),
        (2, 1, 1): (
            16 * fk / (d**3 * dp1 * dp2 * dp4)
            - 6 * gk / (d**3 * dp1 * dp2)
            + hk / (d**3 * dp1)
        ),
        (3, 1): gk / (d**2 * dp1 * dp2) - 4 * fk / (d**2 * dp1 * dp2 * dp4),
        (2, 2): gk / (d**2 * dp1 * dp2) - 4 * fk / (d**2 * dp1 * dp2 * dp4),
        (4,): fk / (d * dp1 * dp2 * dp4),
    }
    c = np.array([c_by_class[s4.cycle_type(p)] for p in s4.S4_ELEMENTS])
    b = np.array([b_by_class[s4.cycle_type(p)] for p in s4.S4_ELEMENTS])
    return FoldState4(d, c, b)


def asymptotic_projector(d: int) -> np.ndarray:
    """48x48 projector onto the stationary coefficient space.

    The image is the coefficient representation of the maximally mixed
    state on four copies; the k-th power of the transfer matrix converges
    to this projector geometrically for theta in {pi/4, pi/2}.
    """
    n_el = 24
    omega = np.array([float(wg.q_trace(p, d)) for p in s4.S4_ELEMENTS])
    tau = np.array([float(d ** s4.cycle_count(p)) for p in s4.S4_ELEMENTS])
    is_e = np.array([p == s4.S4_IDENTITY for p in s4.S4_ELEMENTS])
    is_double = np.array([s4.cycle_type(p) == (2, 2) for p in s4.S4_ELEMENTS])
    pa = np.zeros((n_el, n_el))
    pb = np.zeros((n_el, n_el))
    pc = np.zeros((n_el, n_el))
    pd = np.zeros((n_el, n_el))
    pa[is_e, :] = -3.0 * omega / 4.0
    pa[is_double, :] = omega / 4.0
    pb[is_e, :] = -3.0 * tau / 4.0
    pb[is_double, :] = tau / 4.0
    pc[is_e, :] = omega
    pd[is_e, :] = tau
    return np.vstack([np.hstack([pa, pb]), np.hstack([pc, pd])]) / d**4
