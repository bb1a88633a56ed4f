"""
Coordinator polynomials: closed forms and the dispatcher over all pipelines.

For every m the answer is h_{sqrt m} raised to the power m / sqrt m, so the
dispatcher only ever computes squarefree cases and then takes the power.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from itertools import combinations, product
from math import comb
from typing import Any, Dict, List, Optional, Tuple

from sympy import isprime

from config import Budgets, BudgetExceededError, resolve_budgets
from cyclotomic_builder import build, euler_phi, squarefree_decompose
from exact_core import IntPolynomial, poly_pow, series_coeffs, series_numerator
from growth_oracle import ShellCounts, bfs_shells
from hull_engine import (
    boundary_h_polynomial,
    build_face_lattice,
    enumerate_facets,
    pulling_triangulation,
)

logger = logging.getLogger(__name__)

H_FIFTEEN = (1, 7, 28, 79, 130, 79, 28, 7, 1)


class Provenance(str, Enum):
    PRIME = "prime"
    TWO_P = "two_p"
    FIFTEEN = "fifteen"
    TRIANGULATION = "triangulation"
    BFS_FIT = "bfs_fit"
    FACTOR_POWER = "factor_power"
    TABLE = "table"
    UNAVAILABLE = "unavailable"


class Strategy(str, Enum):
    CLOSED = "closed"
    TRIANGULATION = "triangulation"
    BFS = "bfs"
    AUTO = "auto"


@dataclass(frozen=True)
class ClosedFormResult:
    """Coordinator polynomial of Z[zeta_m] and how it was obtained."""

    m: int
    h: Optional[IntPolynomial]
    provenance: Provenance
    sqrt_m: int
    power: int
    base_provenance: Optional[Provenance] = None
    note: str = ""

    def __post_init__(self):
        if self.h is None and self.provenance is not Provenance.UNAVAILABLE:
            raise ValueError(f"Provenance {self.provenance.value} needs a polynomial")
        if self.h is not None and self.h.degree != euler_phi(self.m):
            raise ValueError(
                f"h_{self.m} must have degree phi({self.m}) = {euler_phi(self.m)}, got {self.h.degree}"
            )

    @property
    def available(self) -> bool:
        return self.h is not None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "m": self.m,
            "h": self.h.to_list() if self.h is not None else None,
            "provenance": self.provenance.value,
            "sqrt_m": self.sqrt_m,
            "power": self.power,
            "base_provenance": self.base_provenance.value if self.base_provenance else None,
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ClosedFormResult":
        h = data.get("h")
        base = data.get("base_provenance")
        return cls(
            m=int(data["m"]),
            h=IntPolynomial(tuple(h)) if h is not None else None,
            provenance=Provenance(data["provenance"]),
            sqrt_m=int(data["sqrt_m"]),
            power=int(data["power"]),
            base_provenance=Provenance(base) if base else None,
            note=data.get("note", ""),
        )


def _require_odd_prime(p: int) -> None:
    if not isprime(p) or p == 2:
        raise ValueError(f"Expected an odd prime, got {p}")


def h_prime(p: int) -> IntPolynomial:
    """1 + x + ... + x^(p-1)."""
    if not isprime(p):
        raise ValueError(f"h_prime needs a prime, got {p}")
    return IntPolynomial((1,) * p)


def h_two_p(p: int) -> IntPolynomial:
    """
    Coordinator polynomial of Z[zeta_2p] for an odd prime p.

    Coefficient j is the partial sum C(p,0) + ... + C(p,j) for
    j <= (p-1)/2, mirrored above the middle.
    """
    _require_odd_prime(p)
    half = (p - 1) // 2
    partial = [sum(comb(p, i) for i in range(j + 1)) for j in range(half + 1)]
    return IntPolynomial(tuple(partial + partial[-2::-1]))


def h_fifteen() -> IntPolynomial:
    return IntPolynomial(H_FIFTEEN)


def face_count_2p(p: int, k: int) -> int:
    """Number of (k-1)-faces of C_2p: 2^k C(p, k), valid for 1 <= k <= (p-1)/2."""
    _require_odd_prime(p)
    if not 1 <= k <= (p - 1) // 2:
        raise ValueError(f"k must lie in [1, {(p - 1) // 2}] for p = {p}, got {k}")
    return 2 ** k * comb(p, k)


def facet_count_2p(p: int) -> int:
    _require_odd_prime(p)
    return p * comb(p - 1, (p - 1) // 2)


def opposite_free_subsets(p: int, k: int) -> List[Tuple[int, ...]]:
    """
    k-subsets of the columns of A_2p containing no pair {v, -v}.

    A_2p = [A_p | -A_p], so columns j and j + p are opposite.
    """
    _require_odd_prime(p)
    subsets = []
    for pairs in combinations(range(p), k):
        for signs in product((0, 1), repeat=k):
            subsets.append(tuple(sorted(j + s * p for j, s in zip(pairs, signs))))
    return sorted(subsets)


def fit_from_shells(shells: ShellCounts, d: int) -> IntPolynomial:
    """
    Numerator h of degree <= d with sum S(n) x^n = h(x) / (1 - x)^d.

    Shells beyond the first d + 1 are used as validation.

    Raises:
        ValueError: Too few shells, or shells inconsistent with such an h
    """
    if shells.max_n < d:
        raise ValueError(f"Fitting a degree-{d} numerator needs shells up to n = {d}, got {shells.max_n}")
    h = series_numerator(shells.counts, d)
    if series_coeffs(h, d, shells.max_n) != list(shells.counts):
        raise ValueError(f"Shells of C_{shells.m} do not fit a numerator of degree <= {d}")
    return h


def _closed(s: int, budgets: Budgets) -> Tuple[Optional[IntPolynomial], Optional[Provenance], str]:
    if isprime(s):
        return h_prime(s), Provenance.PRIME, ""
    if s % 2 == 0 and isprime(s // 2):
        return h_two_p(s // 2), Provenance.TWO_P, ""
    if s == 15:
        return h_fifteen(), Provenance.FIFTEEN, ""
    return None, None, f"no closed form for m = {s}"


def _triangulated(s: int, budgets: Budgets) -> Tuple[Optional[IntPolynomial], Optional[Provenance], str]:
    odd = squarefree_decompose(s).odd_primes
    if len(odd) >= 3:
        return None, None, (
            f"m = {s} has three odd prime factors: A_{s} is not totally unimodular "
            f"and normality of C_{s} is open"
        )
    V = build(s)
    facets = enumerate_facets(V, budgets)
    tri = pulling_triangulation(build_face_lattice(facets, V, budgets))
    result = boundary_h_polynomial(tri, V.dim)
    if not result.certified:
        return None, None, f"pulling triangulation of C_{s} is not unimodular"
    return result.h, Provenance.TRIANGULATION, ""


def _bfs_fitted(s: int, budgets: Budgets) -> Tuple[Optional[IntPolynomial], Optional[Provenance], str]:
    V = build(s)
    shells = bfs_shells(V, V.dim + 1, budgets)
    return fit_from_shells(shells, V.dim), Provenance.BFS_FIT, ""


_PIPELINES = {
    Strategy.CLOSED: _closed,
    Strategy.TRIANGULATION: _triangulated,
    Strategy.BFS: _bfs_fitted,
}


def coordinator(
    m: int, strategy: str = "auto", budgets: Optional[Budgets] = None
) -> ClosedFormResult:
    """
    Coordinator polynomial of Z[zeta_m].

    Args:
        m: Integer >= 2
        strategy: "closed", "triangulation", "bfs", or "auto" (the first
            of closed, triangulation, bfs that yields a certified answer)
        budgets: Resource guards for the computing pipelines

    Returns:
        ClosedFormResult; provenance is factor_power whenever m is not squarefree

    Raises:
        BudgetExceededError: An explicitly requested pipeline ran out of budget
    """
    strategy = Strategy(strategy)
    budgets = resolve_budgets(budgets)
    decomposition = squarefree_decompose(m)
    s = decomposition.sqrt_m

    if strategy is Strategy.AUTO:
        h, provenance, notes = None, None, []
        for name in (Strategy.CLOSED, Strategy.TRIANGULATION, Strategy.BFS):
            try:
                h, provenance, note = _PIPELINES[name](s, budgets)
            except BudgetExceededError as exc:
                note = f"{name.value}: {exc}"
            if h is not None:
                break
            notes.append(note)
        note = "" if h is not None else "; ".join(notes)
    else:
        h, provenance, note = _PIPELINES[strategy](s, budgets)

    if h is None:
        logger.info("h_%d unavailable: %s", m, note)
        return ClosedFormResult(m, None, Provenance.UNAVAILABLE, s, decomposition.power, None, note)
    if decomposition.is_squarefree:
        return ClosedFormResult(m, h, provenance, s, 1)
    return ClosedFormResult(
        m, poly_pow(h, decomposition.power), Provenance.FACTOR_POWER, s, decomposition.power, provenance,
    )


def table_entry(m: int, fixtures: Dict[str, Any]) -> ClosedFormResult:
    """The published coordinator polynomial for m, as a golden value."""
    rows = fixtures.get("coordinator_table", {})
    row = rows.get(str(m))
    if row is None:
        raise ValueError(f"No table row for m = {m}; rows exist for {sorted(int(k) for k in rows)}")
    decomposition = squarefree_decompose(m)
    return ClosedFormResult(
        m, IntPolynomial(tuple(row["h"])), Provenance.TABLE, decomposition.sqrt_m,
        decomposition.power, note=row.get("source", ""),
    )
