"""Permutation-operator traces and Weingarten tables, in exact rationals.

Conventions used throughout the package:

* pair-indexed tables are indexed by the plain product: ``G[i][j]`` is a
  function of ``p_i * p_j`` (these matrices are symmetric because the
  underlying functions are class functions);
* ``W`` is the inverse of the Gram matrix ``G`` with entries
  ``tr(T_a T_b) = d**cycles(ab)``, so that the twirl of an operator ``O``
  is ``sum_{a,b} W[a][b] tr(O T_b) T_a``;
* the commutant of the fourth Clifford tensor power is spanned by
  ``{Q T_a}`` and ``{Qperp T_a}``; the two sectors carry their own Gram
  inverses ``W+`` and ``W-`` built from per-irrep traces, degenerate
  irreps being skipped.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import s4
from .s4 import Perm

FractionMatrix = tuple[tuple[Fraction, ...], ...]


def trace_permutation(p: Perm, d: int) -> int:
    """tr of the permutation operator T_p on (C^d)^{tensor t}."""
    return d ** s4.cycle_count(p)


def q_trace(p: Perm, d: int) -> int:
    """tr(Q T_p) with Q the normalized sum of fourth powers of Pauli strings.

    A cycle of even length traces every unsigned Pauli string to d, an odd
    cycle keeps only the identity string; the d**-2 normalization of Q
    leaves ``d**cycles(p)`` when all cycles are even and ``d**(cycles(p)-2)``
    otherwise.
    """
    if len(p) != 4:
        raise ValueError("Q lives on four copies")
    if d & (d - 1) or d < 2:
        raise ValueError(f"d must be a power of 2, got {d}")
    n_cycles = s4.cycle_count(p)
    if all(length % 2 == 0 for length in s4.cycle_type(p)):
        return d**n_cycles
    return d ** (n_cycles - 2)


def q_trace_with_permutation(rho: Perm, sigma: Perm, d: int, sector: str = "plus") -> int:
    """tr(T_rho Q T_sigma) for sector "plus", tr(T_rho Qperp T_sigma) for "perp"."""
    prod = s4.compose(rho, sigma)
    if sector == "plus":
        return q_trace(prod, d)
    if sector == "perp":
        return trace_permutation(prod, d) - q_trace(prod, d)
    raise ValueError(f"unknown sector {sector!r}")


@dataclass(frozen=True)
class WeingartenTable:
    """Inverse Gram table for the Haar twirl on t copies."""

    t: int
    d: int
    table: FractionMatrix
    irrep_traces: tuple[Fraction, ...]
    skipped_irreps: tuple[int, ...]

    @property
    def degenerate(self) -> bool:
        return bool(self.skipped_irreps)


@dataclass(frozen=True)
class CliffordWeingartenTables:
    """Sector tables for the 4-fold Clifford twirl."""

    d: int
    w_plus: FractionMatrix
    w_minus: FractionMatrix
    d_plus_lambda: tuple[Fraction, ...]
    d_minus_lambda: tuple[Fraction, ...]


def _isotypic_traces(t: int, d: int, weight) -> tuple[Fraction, ...]:
    """tr(A Pi_lambda) for each irrep, A given through the class function
    ``weight(p) = tr(A T_p)``."""
    elems = s4.elements(t)
    dims = s4.irrep_dims(t)
    fact = 24 if t == 4 else 2
    out = []
    for irrep, dim in enumerate(dims):
        total = sum(s4.character(irrep, p) * weight(p) for p in elems)
        out.append(Fraction(dim * total, fact))
    return tuple(out)


def _inverse_from_traces(t: int, traces: tuple[Fraction, ...]) -> FractionMatrix:
    """Pseudo-inverse Gram table from per-irrep traces, skipping zeros.

    The class function of the table is
    ``w(g) = sum_lambda dim^3 chi(g) / (t!^2 D_lambda)`` over irreps with
    ``D_lambda != 0``; the matrix entry (a, b) is ``w(p_a p_b)``.
    """
    elems = s4.elements(t)
    dims = s4.irrep_dims(t)
    fact = 24 if t == 4 else 2
    by_class = []
    n_classes = len(s4.character_table(t)[0])
    for cls in range(n_classes):
        val = Fraction(0)
        for irrep, dim in enumerate(dims):
            if traces[irrep] == 0:
                continue
            chi = s4.character_table(t)[irrep][cls]
            val += Fraction(dim**3 * chi, fact**2) / traces[irrep]
        by_class.append(val)
    rows = []
    for a in elems:
        rows.append(tuple(by_class[s4.class_index(s4.compose(a, b))] for b in elems))
    return tuple(rows)


@lru_cache(maxsize=None)
def gram_haar(t: int, d: int) -> FractionMatrix:
    """Gram matrix tr(T_a T_b) = d**cycles(ab)."""
    elems = s4.elements(t)
    return tuple(
        tuple(Fraction(trace_permutation(s4.compose(a, b), d)) for b in elems)
        for a in elems
    )


@lru_cache(maxsize=None)
def weingarten_haar(t: int, d: int, allow_degenerate: bool = False) -> WeingartenTable:
    """Weingarten table for the unitary (and 2-copy Clifford) twirl.

    For d >= t this is the exact inverse of the Gram matrix.  For d < t the
    Gram matrix is singular; irreps with vanishing trace are skipped, which
    yields the pseudo-inverse, but only when ``allow_degenerate`` is set.
    """
    if t not in (2, 4):
        raise ValueError("only t=2 and t=4 are supported")
    traces = _isotypic_traces(t, d, lambda p: trace_permutation(p, d))
    skipped = tuple(i for i, v in enumerate(traces) if v == 0)
    if skipped and not allow_degenerate:
        raise ValueError(
            f"Gram matrix is degenerate for t={t}, d={d}; "
            "pass allow_degenerate=True for the pseudo-inverse"
        )
    table = _inverse_from_traces(t, traces)
    return WeingartenTable(t=t, d=d, table=table, irrep_traces=traces, skipped_irreps=skipped)


@lru_cache(maxsize=None)
def weingarten_clifford(d: int) -> CliffordWeingartenTables:
    """Sector tables W+ and W- of the fourth-moment Clifford twirl.

    The per-irrep weights are tr(Q Pi_lambda) and tr(Qperp Pi_lambda);
    vanishing ones are skipped (this happens for the two 3-dimensional
    irreps in the plus sector at every d, and for the sign irrep in the
    minus sector at d = 4).
    """
    if d < 4:
        raise ValueError("both sectors need d >= 4; use dense oracles below that")
    plus = _isotypic_traces(4, d, lambda p: q_trace(p, d))
    minus = _isotypic_traces(
        4, d, lambda p: trace_permutation(p, d) - q_trace(p, d)
    )
    return CliffordWeingartenTables(
        d=d,
        w_plus=_inverse_from_traces(4, plus),
        w_minus=_inverse_from_traces(4, minus),
        d_plus_lambda=plus,
        d_minus_lambda=minus,
    )


def s4_character_table() -> tuple[tuple[int, ...], ...]:
    """The validated character table of S4 (rows: irreps, columns: classes)."""
    s4.verify_character_orthogonality(4)
    return s4.S4_CHARACTER_TABLE


# ---------------------------------------------------------------------------
# Projector traces entering the closed-form moment formulas.
# ---------------------------------------------------------------------------

def tr_pi2(d: int) -> Fraction:
    """tr of the symmetrizer on two copies, d(d+1)/2."""
    return Fraction(d * (d + 1), 2)


def tr_pi4(d: int) -> Fraction:
    """tr of the symmetrizer on four copies, d(d+1)(d+2)(d+3)/24."""
    return Fraction(d * (d + 1) * (d + 2) * (d + 3), 24)


def tr_q_pi4(d: int) -> Fraction:
    """tr(Q Pi_4) = (d+1)(d+2)/6."""
    return Fraction(sum(q_trace(p, d) for p in s4.S4_ELEMENTS), 24)


def pi4_traces(d: int, d_a: int, d_b: int) -> dict[str, Fraction]:
    """Contraction constants for the four-copy moment formulas.

    Keys: D_4 = tr(Pi_4); D_plus = tr(Q Pi_4); D_Pur, the trace of Pi_4
    against the doubled-swap contraction on the A factor; D_plus_12 and
    D_4_12, the same for the single-swap contraction, with and without Q.
    All are evaluated by direct summation over S4, split between the A and
    B tensor factors.
    """
    if d_a * d_b != d:
        raise ValueError(f"d_a * d_b = {d_a * d_b} does not match d = {d}")
    v = s4.SWAP_12_34
    w = s4.SWAP_12
    d_pur = Fraction(0)
    d_plus_12 = Fraction(0)
    d_4_12 = Fraction(0)
    for p in s4.S4_ELEMENTS:
        vp = s4.compose(v, p)
        wp = s4.compose(w, p)
        d_pur += trace_permutation(vp, d_a) * trace_permutation(p, d_b)
        d_plus_12 += q_trace(wp, d_a) * q_trace(p, d_b)
        d_4_12 += trace_permutation(wp, d_a) * trace_permutation(p, d_b)
    return {
        "D_4": tr_pi4(d),
        "D_plus": tr_q_pi4(d),
        "D_Pur": d_pur / 24,
        "D_plus_12": d_plus_12 / 24,
        "D_4_12": d_4_12 / 24,
    }
