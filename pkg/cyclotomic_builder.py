"""
Vertex matrices A_m of the cyclotomic polytopes C_m.

Column j of A_m is the lattice vector of one m-th root of unity in the fixed
basis of Z[zeta_m]; generator_labels[j] is its exponent k (zeta_m^k).
Primes are processed in ascending order, tensor columns are ordered
lexicographically by factor index and direct-sum blocks are concatenated.
"""
import logging
from dataclasses import dataclass
from functools import reduce
from typing import Any, Dict, List, Tuple, Union

import networkx as nx
import numpy as np
from networkx.algorithms.isomorphism import categorical_edge_match, categorical_node_match
from sympy import factorint, isprime, totient

from exact_core import IntMatrix

logger = logging.getLogger(__name__)

MatrixLike = Union[IntMatrix, "VertexMatrix"]


@dataclass(frozen=True)
class SquarefreeDecomposition:
    """Prime factorisation of m with its squarefree part."""

    m: int
    sqrt_m: int
    power: int
    prime_factors: Tuple[Tuple[int, int], ...]

    @property
    def primes(self) -> Tuple[int, ...]:
        return tuple(p for p, _ in self.prime_factors)

    @property
    def odd_primes(self) -> Tuple[int, ...]:
        return tuple(p for p in self.primes if p != 2)

    @property
    def is_squarefree(self) -> bool:
        return self.power == 1


@dataclass(frozen=True)
class VertexMatrix:
    """The matrix A_m together with the root-of-unity exponent of every column."""

    m: int
    dim: int
    matrix: IntMatrix
    generator_labels: Tuple[int, ...]

    def __post_init__(self):
        if self.matrix.rows != self.dim or self.matrix.cols != self.m:
            raise ValueError(
                f"A_{self.m} must be {self.dim}x{self.m}, got {self.matrix.rows}x{self.matrix.cols}"
            )
        if len(self.generator_labels) != self.m:
            raise ValueError("One generator label per column is required")
        if any(x not in (-1, 0, 1) for x in self.matrix.entries):
            raise ValueError(f"A_{self.m} has entries outside {{-1, 0, 1}}")

    @property
    def vertex_count(self) -> int:
        return self.matrix.cols

    def columns(self) -> List[Tuple[int, ...]]:
        return self.matrix.columns()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "m": self.m,
            "dim": self.dim,
            "rows": [list(r) for r in self.matrix.to_rows()],
            "generator_labels": list(self.generator_labels),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "VertexMatrix":
        matrix = IntMatrix.from_rows(data["rows"])
        if matrix.rows == 0:
            matrix = IntMatrix(0, int(data["m"]), ())
        return cls(int(data["m"]), int(data["dim"]), matrix, tuple(data["generator_labels"]))


def _as_matrix(A: MatrixLike) -> IntMatrix:
    return A.matrix if isinstance(A, VertexMatrix) else A


def euler_phi(m: int) -> int:
    return int(totient(m))


def squarefree_decompose(m: int) -> SquarefreeDecomposition:
    """Factor m and split it into its squarefree part and the cofactor m / sqrt(m)."""
    if m < 2:
        raise ValueError(f"m must be at least 2, got {m}")
    factors = tuple(sorted((int(p), int(e)) for p, e in factorint(m).items()))
    sqrt_m = 1
    for p, _ in factors:
        sqrt_m *= p
    return SquarefreeDecomposition(m, sqrt_m, m // sqrt_m, factors)


def build_prime(p: int) -> VertexMatrix:
    """A_p = [I_{p-1} | -1]: the simplex C_p."""
    if not isprime(p):
        raise ValueError(f"build_prime needs a prime, got {p}")
    rows = [[1 if j == i else 0 for j in range(p - 1)] + [-1] for i in range(p - 1)]
    return VertexMatrix(p, p - 1, IntMatrix.from_rows(rows), tuple(range(p)))


def direct_sum(A: MatrixLike, B: MatrixLike) -> IntMatrix:
    """Block-diagonal [[A, 0], [0, B]]: A's columns padded with zeros, then B's."""
    A, B = _as_matrix(A), _as_matrix(B)
    if A.cols == 0:
        return B
    if B.cols == 0:
        return A
    columns = [c + (0,) * B.rows for c in A.columns()]
    columns += [(0,) * A.rows + c for c in B.columns()]
    return IntMatrix.from_columns(columns)


def direct_sum_power(A: MatrixLike, k: int) -> IntMatrix:
    if k < 1:
        raise ValueError(f"Direct-sum power needs k >= 1, got {k}")
    return reduce(direct_sum, [_as_matrix(A)] * k)


def tensor(A: MatrixLike, B: MatrixLike) -> IntMatrix:
    """All Kronecker products a_i (x) b_j, column index i * cols(B) + j."""
    A, B = _as_matrix(A), _as_matrix(B)
    product = np.kron(A.to_numpy(), B.to_numpy())
    return IntMatrix.from_rows(product.tolist())


def prime_power_block(p: int, alpha: int) -> Tuple[IntMatrix, Tuple[int, ...]]:
    """
    A_{p^alpha} as the direct sum of p^(alpha-1) copies of A_p.

    Block k, column j carries zeta^(k + j p^(alpha-1)), so the basis element
    zeta^(k + j p^(alpha-1)) sits at e_{k(p-1)+j}.

    Returns:
        Tuple of (matrix, labels)
    """
    if alpha < 1:
        raise ValueError(f"Exponent must be >= 1, got {alpha}")
    base = build_prime(p)
    copies = p ** (alpha - 1)
    matrix = direct_sum_power(base.matrix, copies)
    labels = tuple(k + j * copies for k in range(copies) for j in range(p))
    return matrix, labels


def build(m: int) -> VertexMatrix:
    """A_m: tensor product over ascending primes of the prime-power blocks."""
    if m < 2:
        raise ValueError(f"m must be at least 2 (got {m}); the roots of unity of m=1 do not generate Z")
    decomposition = squarefree_decompose(m)

    matrix, labels, modulus = None, None, 1
    for p, alpha in decomposition.prime_factors:
        block, block_labels = prime_power_block(p, alpha)
        block_modulus = p ** alpha
        if matrix is None:
            matrix, labels, modulus = block, block_labels, block_modulus
            continue
        # zeta_{m1}^a zeta_{m2}^b = zeta_{m1 m2}^(a m2 + b m1)
        labels = tuple(
            (a * block_modulus + b * modulus) % (modulus * block_modulus)
            for a in labels
            for b in block_labels
        )
        matrix = tensor(matrix, block)
        modulus *= block_modulus

    result = VertexMatrix(m, euler_phi(m), matrix, labels)
    logger.debug("Built A_%d: %dx%d", m, result.dim, result.vertex_count)
    return result


def permutation_equivalent(A: MatrixLike, B: MatrixLike) -> bool:
    """True iff B arises from A by permuting rows and permuting columns."""
    A, B = _as_matrix(A), _as_matrix(B)
    if A.shape != B.shape or sorted(A.entries) != sorted(B.entries):
        return False
    return nx.is_isomorphic(
        _bipartite_graph(A),
        _bipartite_graph(B),
        node_match=categorical_node_match("kind", None),
        edge_match=categorical_edge_match("sign", 0),
    )


def _bipartite_graph(M: IntMatrix) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from((("r", i) for i in range(M.rows)), kind="row")
    graph.add_nodes_from((("c", j) for j in range(M.cols)), kind="col")
    for i in range(M.rows):
        for j in range(M.cols):
            if M[i, j]:
                graph.add_edge(("r", i), ("c", j), sign=M[i, j])
    return graph
