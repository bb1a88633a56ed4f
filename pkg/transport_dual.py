"""
Transportation polytopes P(p, q) and their duality with C_pq.

P(p, q) is the set of nonnegative p x q tables with row sums q and column
sums p. Its vertices are read off spanning trees of K_{p,q}: the margins
force a unique flow on every tree, and the tree is a vertex support exactly
when all of those flows are positive. A vertex table x is dual to the facet
of C_pq whose normal a satisfies a . (v_i (x) w_j) = 1 - x_ij.
"""
import logging
from collections import deque
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple

from sympy import isprime

from config import Budgets, BudgetExceededError, resolve_budgets
from cyclotomic_builder import VertexMatrix, build, build_prime, tensor
from exact_core import solve_unit_rhs
from hull_engine import Facet, enumerate_facets

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]
Table = Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class TransportVertex:
    """Vertex of P(p, q) as an integer table."""

    p: int
    q: int
    table: Table

    def __post_init__(self):
        if len(self.table) != self.p or any(len(row) != self.q for row in self.table):
            raise ValueError(f"Table must be {self.p}x{self.q}")
        if any(x < 0 for row in self.table for x in row):
            raise ValueError("Transportation tables are nonnegative")
        if any(sum(row) != self.q for row in self.table):
            raise ValueError(f"Every row must sum to {self.q}")
        if any(sum(row[j] for row in self.table) != self.p for j in range(self.q)):
            raise ValueError(f"Every column must sum to {self.p}")

    @property
    def support(self) -> Tuple[Edge, ...]:
        return tuple(
            (i, j) for i in range(self.p) for j in range(self.q) if self.table[i][j] > 0
        )

    @property
    def zeros(self) -> Tuple[Edge, ...]:
        return tuple(
            (i, j) for i in range(self.p) for j in range(self.q) if self.table[i][j] == 0
        )

    def flattened(self) -> Tuple[int, ...]:
        return tuple(x for row in self.table for x in row)

    def to_dict(self) -> Dict[str, Any]:
        return {"p": self.p, "q": self.q, "table": [list(row) for row in self.table]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TransportVertex":
        return cls(int(data["p"]), int(data["q"]), tuple(tuple(r) for r in data["table"]))


def _check_pair(p: int, q: int) -> None:
    if not (isprime(p) and isprime(q)) or p == q:
        raise ValueError(f"Expected two distinct primes, got p={p}, q={q}")


def count_spanning_trees(p: int, q: int) -> int:
    """Number of spanning trees of K_{p,q}: p^(q-1) q^(p-1)."""
    return p ** (q - 1) * q ** (p - 1)


def iter_spanning_trees(p: int, q: int) -> Iterator[Tuple[Edge, ...]]:
    """
    Spanning trees of K_{p,q} as edge tuples, in lexicographic order.

    Edges are chosen in row-major order; each include/exclude branch keeps
    its own copy of the component labels.
    """
    edges = [(i, j) for i in range(p) for j in range(q)]
    size = p + q - 1
    chosen: List[Edge] = []

    def walk(start: int, labels: List[int]) -> Iterator[Tuple[Edge, ...]]:
        if len(chosen) == size:
            yield tuple(chosen)
            return
        for e in range(start, len(edges) - (size - len(chosen)) + 1):
            i, j = edges[e]
            a, b = labels[i], labels[p + j]
            if a == b:
                continue
            merged = [a if x == b else x for x in labels]
            chosen.append(edges[e])
            yield from walk(e + 1, merged)
            chosen.pop()

    yield from walk(0, list(range(p + q)))


def solve_tree_flows(p: int, q: int, edges: Sequence[Edge]) -> Optional[Table]:
    """
    Unique edge flows meeting the margins on a spanning tree, by leaf elimination.

    Row node i needs q units, column node j needs p. Flows may come out
    zero or negative; the caller decides what to keep.

    Returns:
        The p x q flow table, or None when `edges` is not a spanning tree
    """
    if len(edges) != p + q - 1:
        return None
    need = [q] * p + [p] * q
    incident: List[set] = [set() for _ in range(p + q)]
    for i, j in edges:
        incident[i].add((i, j))
        incident[p + j].add((i, j))

    flows: Dict[Edge, int] = {}
    leaves = deque(node for node in range(p + q) if len(incident[node]) == 1)
    while leaves:
        node = leaves.popleft()
        if len(incident[node]) != 1:
            continue
        edge = incident[node].pop()
        i, j = edge
        other = p + j if node == i else i
        flows[edge] = need[node]
        need[node] = 0
        need[other] -= flows[edge]
        incident[other].discard(edge)
        if len(incident[other]) == 1:
            leaves.append(other)

    if len(flows) != len(edges) or any(need):
        return None
    return tuple(tuple(flows.get((i, j), 0) for j in range(q)) for i in range(p))


def enumerate_vertices_2d(
    p: int, q: int, budgets: Optional[Budgets] = None
) -> List[TransportVertex]:
    """
    Vertices of P(p, q) from the spanning trees of K_{p,q} with positive flows.

    Returns:
        Distinct vertices, sorted by flattened table
    """
    _check_pair(p, q)
    budgets = resolve_budgets(budgets)
    trees = count_spanning_trees(p, q)
    if trees > budgets.spanning_trees:
        raise BudgetExceededError("spanning_trees", budgets.spanning_trees, trees)

    tables = set()
    examined = 0
    for tree in iter_spanning_trees(p, q):
        examined += 1
        table = solve_tree_flows(p, q, tree)
        if table is not None and all(table[i][j] > 0 for i, j in tree):
            tables.add(table)
    logger.info("P(%d,%d): %d trees examined, %d vertices", p, q, examined, len(tables))
    vertices = [TransportVertex(p, q, t) for t in tables]
    vertices.sort(key=TransportVertex.flattened)
    return vertices


def facet_from_vertex(v: TransportVertex, Vp: VertexMatrix, Vq: VertexMatrix) -> Facet:
    """
    Facet of conv(A_p (x) A_q) dual to a vertex of P(p, q).

    Column i * q + j of the tensor product is v_i (x) w_j. The zero entries
    of the table are its incident columns; the normal solved from them must
    reproduce 1 - x_ij on every column.

    Raises:
        ValueError: The zero entries do not determine a facet
    """
    if (Vp.m, Vq.m) != (v.p, v.q):
        raise ValueError(f"Vertex of P({v.p},{v.q}) paired with A_{Vp.m} and A_{Vq.m}")
    columns = tensor(Vp, Vq).columns()
    dim = Vp.dim * Vq.dim
    incident = tuple(i * v.q + j for i, j in v.zeros)
    if len(incident) != dim:
        raise ValueError(f"A facet of C_{v.p * v.q} needs {dim} incident vertices, table has {len(incident)} zeros")
    normal = solve_unit_rhs([columns[k] for k in incident])
    if normal is None:
        raise ValueError(f"Zero entries {v.zeros} do not span a hyperplane")
    for i in range(v.p):
        for j in range(v.q):
            expected = normal.denominator * (1 - v.table[i][j])
            if normal.scaled_dot(columns[i * v.q + j]) != expected:
                raise ValueError(f"Normal from zeros {v.zeros} does not reproduce entry ({i},{j})")
    return Facet(normal, incident)


def verify_duality(p: int, q: int, budgets: Optional[Budgets] = None) -> bool:
    """
    Check that vertices of P(p, q) correspond one-to-one with facets of C_pq.

    Every dual facet must appear among the enumerated facets with the same
    incident set, no two vertices may share a facet, and every incident set
    has (p - 1)(q - 1) elements.
    """
    _check_pair(p, q)
    p, q = sorted((p, q))
    facets = enumerate_facets(build(p * q), budgets)
    vertices = enumerate_vertices_2d(p, q, budgets)
    Vp, Vq = build_prime(p), build_prime(q)

    by_normal = {f.sort_key(): f for f in facets}
    dual = [facet_from_vertex(v, Vp, Vq) for v in vertices]
    keys = {f.sort_key() for f in dual}
    size = (p - 1) * (q - 1)

    checks = {
        "bijection": len(keys) == len(dual) == len(facets) and keys == set(by_normal),
        "incidence": all(by_normal.get(f.sort_key()) == f for f in dual),
        "simplicial": all(f.size == size for f in facets),
    }
    for name, ok in checks.items():
        if not ok:
            logger.info("P(%d,%d) duality check '%s' failed", p, q, name)
    return all(checks.values())
