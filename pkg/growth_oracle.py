"""
Coordination sequences by breadth-first search over word length.

Two interchangeable expansion modes exist. "packed" encodes every lattice
point as one int64 key (coordinates are bounded by the depth, so offset
fields of fixed width never carry) and works on sorted numpy arrays;
"reference" keeps a Python set of coordinate tuples and is the mode the
tests compare against.
"""
import logging
from dataclasses import dataclass
from itertools import accumulate
from math import comb
from typing import Any, Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from config import Budgets, BudgetExceededError, resolve_budgets
from cyclotomic_builder import VertexMatrix
from exact_core import IntPolynomial, IntVector, series_coeffs
from hull_engine import Facet, facet_arrays, points_inside

logger = logging.getLogger(__name__)

BFS_MODES = ("auto", "packed", "reference")

_KEY_BITS = 62
_GRID_BLOCK = 1 << 16


@dataclass(frozen=True)
class ShellCounts:
    """S(0), ..., S(max_n): number of lattice points at word length n."""

    m: int
    max_n: int
    counts: tuple

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        if len(self.counts) != self.max_n + 1:
            raise ValueError(f"Expected {self.max_n + 1} shells, got {len(self.counts)}")
        if self.counts and self.counts[0] != 1:
            raise ValueError("Shell 0 must contain exactly the origin")
        if any(c < 0 for c in self.counts):
            raise ValueError("Shell sizes must be nonnegative")

    def ball_sizes(self) -> List[int]:
        """Number of points of word length <= n, for every n."""
        return list(accumulate(self.counts))

    def to_dict(self) -> Dict[str, Any]:
        return {"m": self.m, "max_n": self.max_n, "counts": list(self.counts)}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ShellCounts":
        return cls(int(data["m"]), int(data["max_n"]), tuple(data["counts"]))


def _packing(dim: int, max_n: int):
    """Field width and offset for packed keys, or None when they do not fit in int64."""
    bits = max(1, (2 * max_n).bit_length())
    if dim * bits > _KEY_BITS:
        return None
    return bits, max_n


def _guard(budgets: Budgets, visited: int, requested: int, shells: List[int], m: int) -> None:
    if visited + requested > budgets.bfs_points:
        partial = ShellCounts(m, len(shells) - 1, tuple(shells))
        raise BudgetExceededError("bfs_points", budgets.bfs_points, visited + requested, partial)


def _bfs_packed(V: VertexMatrix, max_n: int, budgets: Budgets, bits: int, offset: int) -> List[int]:
    generators = V.matrix.to_numpy().T
    weights = np.left_shift(np.int64(1), np.arange(V.dim, dtype=np.int64) * bits)
    deltas = generators @ weights
    origin = np.int64(offset) * weights.sum()

    visited = np.array([origin], dtype=np.int64)
    frontier = visited
    shells = [1]
    for n in range(1, max_n + 1):
        _guard(budgets, len(visited), len(frontier) * len(deltas), shells, V.m)
        candidates = np.unique((frontier[:, None] + deltas[None, :]).ravel())
        fresh = candidates[~np.isin(candidates, visited, assume_unique=True)]
        shells.append(len(fresh))
        visited = np.union1d(visited, fresh)
        frontier = fresh
        logger.debug("C_%d shell %d: %d points", V.m, n, len(fresh))
    return shells


def _iter_reference_shells(
    V: VertexMatrix, max_n: int, budgets: Budgets
) -> Iterator[List[Tuple[int, ...]]]:
    generators = V.columns()
    origin = (0,) * V.dim
    visited = {origin}
    frontier = [origin]
    shells = [1]
    yield frontier
    for n in range(1, max_n + 1):
        _guard(budgets, len(visited), len(frontier) * len(generators), shells, V.m)
        fresh = []
        for point in frontier:
            for g in generators:
                nxt = tuple(a + b for a, b in zip(point, g))
                if nxt not in visited:
                    visited.add(nxt)
                    fresh.append(nxt)
        shells.append(len(fresh))
        frontier = fresh
        logger.debug("C_%d shell %d: %d points", V.m, n, len(fresh))
        yield fresh


def _bfs_reference(V: VertexMatrix, max_n: int, budgets: Budgets) -> List[int]:
    return [len(shell) for shell in _iter_reference_shells(V, max_n, budgets)]


def _check_depth(V: VertexMatrix, max_n: int, budgets: Budgets) -> None:
    if max_n < 0:
        raise ValueError(f"max_n must be nonnegative, got {max_n}")
    # d independent generators alone reach C(max_n + d, d) distinct points
    floor = comb(max_n + V.dim, V.dim)
    if floor > budgets.bfs_points:
        raise BudgetExceededError("bfs_points", budgets.bfs_points, floor)


def bfs_shells(
    V: VertexMatrix, max_n: int, budgets: Optional[Budgets] = None, mode: str = "auto"
) -> ShellCounts:
    """
    Count lattice points by minimal word length in the columns of V.

    Args:
        V: Vertex matrix supplying the generators
        max_n: Deepest shell to compute
        budgets: budgets.bfs_points bounds visited points plus pending candidates
        mode: "packed", "reference", or "auto" (packed whenever keys fit in int64)

    Returns:
        ShellCounts for shells 0..max_n

    Raises:
        BudgetExceededError: carrying the completed shells as `partial`
    """
    if mode not in BFS_MODES:
        raise ValueError(f"Unknown BFS mode '{mode}'. Use one of {BFS_MODES}")
    budgets = resolve_budgets(budgets)
    _check_depth(V, max_n, budgets)

    packing = _packing(V.dim, max_n)
    if mode == "packed" and packing is None:
        logger.info("C_%d: keys for depth %d do not fit in 64 bits, using reference mode", V.m, max_n)
    if mode != "reference" and packing is not None:
        shells = _bfs_packed(V, max_n, budgets, *packing)
    else:
        shells = _bfs_reference(V, max_n, budgets)
    return ShellCounts(V.m, max_n, tuple(shells))


def shells_match_polynomial(shells: ShellCounts, h: IntPolynomial, d: int) -> bool:
    """True iff the shells are the first coefficients of h(x) / (1 - x)^d."""
    return list(shells.counts) == series_coeffs(h, d, shells.max_n)


def shell_points(
    V: VertexMatrix, max_n: int, budgets: Optional[Budgets] = None
) -> List[FrozenSet[IntVector]]:
    """The points of every shell 0..max_n, from the reference search."""
    budgets = resolve_budgets(budgets)
    _check_depth(V, max_n, budgets)
    return [
        frozenset(IntVector(point) for point in shell)
        for shell in _iter_reference_shells(V, max_n, budgets)
    ]


def shells_negation_symmetric(shells: Sequence[FrozenSet[IntVector]]) -> bool:
    """True iff x -> -x maps every shell onto itself."""
    return all(frozenset(-x for x in shell) == shell for shell in shells)


def dilate_point_count(
    facets: Sequence[Facet], dim: int, k: int, budgets: Optional[Budgets] = None
) -> int:
    """
    Number of integer points in k * P, scanning the box [-k, k]^dim.

    The box is enumerated in mixed-radix blocks so memory stays bounded.
    """
    if k < 1:
        raise ValueError(f"Dilation factor must be positive, got {k}")
    budgets = resolve_budgets(budgets)
    base = 2 * k + 1
    total = base ** dim
    if total > budgets.dilate_points:
        raise BudgetExceededError("dilate_points", budgets.dilate_points, total)

    normals, denominators = facet_arrays(facets)
    places = base ** np.arange(dim, dtype=np.int64)
    count = 0
    for start in range(0, total, _GRID_BLOCK):
        index = np.arange(start, min(total, start + _GRID_BLOCK), dtype=np.int64)
        points = (index[:, None] // places[None, :]) % base - k
        count += int(np.count_nonzero(points_inside(points, normals, denominators, k)))
    return count


def normality_check(
    V: VertexMatrix, facets: Sequence[Facet], max_k: int, budgets: Optional[Budgets] = None
) -> bool:
    """
    Compare word-length balls with lattice points of dilates, for k = 1..max_k.

    Equality for every k is what normality of the generating monoid predicts.
    """
    if max_k < 1:
        raise ValueError(f"max_k must be positive, got {max_k}")
    balls = bfs_shells(V, max_k, budgets).ball_sizes()
    ok = True
    for k in range(1, max_k + 1):
        dilate = dilate_point_count(facets, V.dim, k, budgets)
        if dilate != balls[k]:
            logger.info("C_%d, k=%d: ball has %d points, dilate has %d", V.m, k, balls[k], dilate)
            ok = False
    return ok
