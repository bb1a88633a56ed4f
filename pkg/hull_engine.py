"""
Exact convex-hull machinery for cyclotomic polytopes.

Facets are stored as primitive rational normals a with a . x <= 1, which is
always possible because the origin is interior to every C_m. Vertex subsets
and faces are handled as Python int bitmasks internally and exposed as
sorted index tuples.
"""
import logging
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations, islice
from math import comb
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial import ConvexHull

from config import Budgets, BudgetExceededError, resolve_budgets
from cyclotomic_builder import VertexMatrix
from exact_core import IntPolynomial, IntVector, RatVector, det_rows, rank_rows, solve_unit_rhs

logger = logging.getLogger(__name__)

FACET_METHODS = ("auto", "scan", "qhull")

_SCAN_CHUNK = 4096
_CELLS_PER_BLOCK = 4_000_000  # points x facets evaluated per numpy block
_FLOAT_SLACK = 1e-7


def _mask(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def _indices(mask: int) -> Tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


@dataclass(frozen=True)
class Facet:
    """Facet hyperplane normal . x = 1 and the vertices lying on it."""

    normal: RatVector
    incident: Tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.incident)

    def sort_key(self) -> Tuple[Tuple[int, ...], int]:
        return self.normal.numerators, self.normal.denominator

    def to_dict(self) -> Dict[str, Any]:
        return {
            "denominator": self.normal.denominator,
            "numerators": list(self.normal.numerators),
            "incident": list(self.incident),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Facet":
        return cls(
            RatVector(tuple(data["numerators"]), int(data["denominator"])),
            tuple(data["incident"]),
        )


@dataclass(frozen=True)
class FaceLattice:
    """
    All nonempty proper faces of a polytope.

    masks are vertex bitmasks sorted by (dimension, vertex indices); dims
    runs parallel to masks. sub_faces maps every non-simplex face to its
    facets, which the pulling triangulation recurses into.
    """

    vertices: VertexMatrix
    facets: Tuple[Facet, ...]
    masks: Tuple[int, ...]
    dims: Tuple[int, ...]
    sub_faces: Mapping[int, Tuple[int, ...]] = field(compare=False, repr=False)

    @property
    def dim(self) -> int:
        return self.vertices.dim

    @property
    def faces(self) -> List[Tuple[int, ...]]:
        return [_indices(m) for m in self.masks]

    def faces_of_dim(self, k: int) -> List[Tuple[int, ...]]:
        return [_indices(m) for m, dim in zip(self.masks, self.dims) if dim == k]

    def __len__(self) -> int:
        return len(self.masks)


@dataclass(frozen=True)
class FHVectors:
    """f-vector (f_{-1}, ..., f_{d-1}) and its h-polynomial."""

    f: Tuple[int, ...]
    h: IntPolynomial

    def to_dict(self) -> Dict[str, Any]:
        return {"f": list(self.f), "h": self.h.to_list()}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FHVectors":
        return cls(tuple(data["f"]), IntPolynomial(tuple(data["h"])))


@dataclass(frozen=True)
class Triangulation:
    """Cells of the boundary coned at the origin; the origin has index `apex`."""

    simplices: Tuple[Tuple[int, ...], ...]
    unimodular: bool
    apex: int
    dim: int

    def __post_init__(self):
        for simplex in self.simplices:
            if len(simplex) != self.dim + 1 or self.apex not in simplex:
                raise ValueError(f"Simplex {simplex} is not a {self.dim}-simplex through the apex")

    @property
    def boundary_cells(self) -> Tuple[Tuple[int, ...], ...]:
        return tuple(tuple(i for i in s if i != self.apex) for s in self.simplices)

    def __len__(self) -> int:
        return len(self.simplices)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dim": self.dim,
            "apex": self.apex,
            "unimodular": self.unimodular,
            "simplices": [list(s) for s in self.simplices],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Triangulation":
        return cls(
            tuple(tuple(s) for s in data["simplices"]),
            bool(data["unimodular"]),
            int(data["apex"]),
            int(data["dim"]),
        )


@dataclass(frozen=True)
class BoundaryHPolynomial:
    """h-polynomial of a pulled boundary; certified iff the triangulation is unimodular."""

    h: IntPolynomial
    certified: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"h": self.h.to_list(), "certified": self.certified}


# ---------------------------------------------------------------------------
# Facets
# ---------------------------------------------------------------------------

def _exact_facet(
    columns: Sequence[Tuple[int, ...]], V: np.ndarray, subset: Sequence[int]
) -> Optional[Facet]:
    """Facet spanned by the given vertices, or None if they span no supporting hyperplane."""
    normal = solve_unit_rhs([columns[i] for i in subset])
    if normal is None:
        return None
    values = np.array(normal.numerators, dtype=np.int64) @ V
    if np.any(values > normal.denominator):
        return None
    incident = tuple(int(j) for j in np.flatnonzero(values == normal.denominator))
    return Facet(normal, incident)


def _scan_facets(vertices: VertexMatrix) -> List[Facet]:
    """Every dim-subset is screened in floating point and survivors are solved exactly."""
    d, n = vertices.dim, vertices.vertex_count
    columns = vertices.columns()
    V = vertices.matrix.to_numpy()
    points = V.T.astype(np.float64)

    found: Dict[Tuple[Tuple[int, ...], int], Facet] = {}
    subsets = combinations(range(n), d)
    while True:
        chunk = np.array(list(islice(subsets, _SCAN_CHUNK)), dtype=np.intp)
        if not len(chunk):
            break
        systems = points[chunk]
        live = np.abs(np.linalg.det(systems)) > 0.5
        if not live.any():
            continue
        chunk, systems = chunk[live], systems[live]
        normals = np.linalg.solve(systems, np.ones((len(chunk), d, 1)))[..., 0]
        supporting = np.all(normals @ V <= 1 + _FLOAT_SLACK, axis=1)
        for subset in chunk[supporting]:
            facet = _exact_facet(columns, V, subset)
            if facet is not None:
                found.setdefault(facet.sort_key(), facet)
    return list(found.values())


def _qhull_facets(vertices: VertexMatrix) -> List[Facet]:
    """Candidate facets from Qhull's triangulated boundary, each re-derived exactly."""
    columns = vertices.columns()
    V = vertices.matrix.to_numpy()
    hull = ConvexHull(V.T.astype(np.float64))

    found: Dict[Tuple[Tuple[int, ...], int], Facet] = {}
    rejected = 0
    for simplex in hull.simplices:
        facet = _exact_facet(columns, V, sorted(int(i) for i in simplex))
        if facet is None:
            rejected += 1
            continue
        found.setdefault(facet.sort_key(), facet)

    qhull_planes = len(np.unique(np.round(hull.equations, 6), axis=0))
    if rejected:
        logger.warning("Qhull returned %d simplices that failed exact validation", rejected)
    if qhull_planes != len(found):
        logger.warning(
            "C_%d: Qhull reports %d distinct planes, exact pass kept %d facets",
            vertices.m, qhull_planes, len(found),
        )

    facets = list(found.values())
    bad = _unmatched_simplicial_ridges(facets, vertices.dim)
    if bad:
        raise RuntimeError(
            f"Facet list for C_{vertices.m} is incomplete: {bad} ridge(s) of simplicial "
            f"facets are not shared by exactly two facets"
        )
    return facets


def _unmatched_simplicial_ridges(facets: Sequence[Facet], dim: int) -> int:
    """Ridges of simplicial facets that do not lie in exactly two facets."""
    masks = [_mask(f.incident) for f in facets]
    simplicial = [m for m, f in zip(masks, facets) if f.size == dim]
    wide = [m for m, f in zip(masks, facets) if f.size > dim]
    ridges = Counter(m & ~(1 << i) for m in simplicial for i in _indices(m))
    bad = 0
    for ridge, count in ridges.items():
        count += sum(1 for w in wide if w & ridge == ridge)
        if count != 2:
            bad += 1
    return bad


def enumerate_facets(
    V: VertexMatrix, budgets: Optional[Budgets] = None, method: str = "auto"
) -> List[Facet]:
    """
    Enumerate the facets of conv(columns of V) exactly.

    Args:
        V: Vertex matrix whose hull contains the origin in its interior
        budgets: Dimension and vertex-count guards
        method: "scan" tries every dim-subset of vertices, "qhull" seeds
            candidates from scipy's Qhull, "auto" picks scan while the number
            of subsets stays within budgets.scan_subsets

    Returns:
        Facets sorted by canonical normal
    """
    budgets = resolve_budgets(budgets)
    if method not in FACET_METHODS:
        raise ValueError(f"Unknown facet method '{method}'. Use one of {FACET_METHODS}")
    d, n = V.dim, V.vertex_count
    if d > budgets.hull_max_dim:
        raise BudgetExceededError("hull_max_dim", budgets.hull_max_dim, d)
    if n > budgets.hull_max_vertices:
        raise BudgetExceededError("hull_max_vertices", budgets.hull_max_vertices, n)
    if rank_rows(V.columns()) != d:
        raise ValueError(f"Vertices of C_{V.m} do not span R^{d}; the hull is degenerate")

    if method == "auto":
        method = "scan" if d == 1 or comb(n, d) <= budgets.scan_subsets else "qhull"
    elif method == "qhull" and d == 1:
        method = "scan"

    facets = _scan_facets(V) if method == "scan" else _qhull_facets(V)
    if not facets:
        raise ValueError(f"No facets found for C_{V.m}; the origin is not interior")
    facets.sort(key=Facet.sort_key)
    logger.info("C_%d: %d facets (%s)", V.m, len(facets), method)
    return facets


def facet_arrays(facets: Sequence[Facet]) -> Tuple[np.ndarray, np.ndarray]:
    normals = np.array([f.normal.numerators for f in facets], dtype=np.int64)
    denominators = np.array([f.normal.denominator for f in facets], dtype=np.int64)
    return normals, denominators


def points_inside(
    points: np.ndarray, normals: np.ndarray, denominators: np.ndarray, k: int
) -> np.ndarray:
    """Boolean mask of the rows of `points` lying in k times the polytope."""
    block = max(1, _CELLS_PER_BLOCK // max(1, len(normals)))
    out = np.empty(len(points), dtype=bool)
    for start in range(0, len(points), block):
        values = points[start:start + block] @ normals.T
        out[start:start + block] = np.all(values <= k * denominators, axis=1)
    return out


def contains_point(
    facets: Sequence[Facet], x: Union[IntVector, Sequence[int]], dilate: int = 1
) -> bool:
    """True iff x lies in dilate * P."""
    if dilate < 1:
        raise ValueError(f"Dilation factor must be positive, got {dilate}")
    point = x if isinstance(x, IntVector) else IntVector(tuple(x))
    if facets and point.dim != facets[0].normal.dim:
        raise ValueError(f"Point has dimension {point.dim}, facets live in dimension {facets[0].normal.dim}")
    return all(f.normal.scaled_dot(point) <= dilate * f.normal.denominator for f in facets)


def verify_lattice_points(
    V: VertexMatrix, facets: Sequence[Facet], budgets: Optional[Budgets] = None
) -> bool:
    """
    Check that the only lattice points of C_m are its vertices and the origin.

    C_m lies in [-1, 1]^dim, so the 3^dim vectors with entries in {-1, 0, 1}
    are the only candidates.
    """
    budgets = resolve_budgets(budgets)
    d = V.dim
    if d > budgets.lattice_max_dim:
        raise BudgetExceededError("lattice_max_dim", budgets.lattice_max_dim, d)

    grid = np.stack(
        np.meshgrid(*([np.array([-1, 0, 1], dtype=np.int64)] * d), indexing="ij"), axis=-1
    ).reshape(-1, d)
    normals, denominators = facet_arrays(facets)
    inside = {tuple(int(x) for x in row) for row in grid[points_inside(grid, normals, denominators, 1)]}
    expected = set(V.columns()) | {(0,) * d}
    if inside != expected:
        logger.info(
            "C_%d lattice points differ: %d extra, %d missing",
            V.m, len(inside - expected), len(expected - inside),
        )
    return inside == expected


def is_simplicial(facets: Sequence[Facet], dim: int) -> bool:
    return all(f.size == dim for f in facets)


def incident_size_profile(facets: Sequence[Facet]) -> Dict[int, int]:
    """Number of facets per incident-vertex count."""
    return dict(sorted(Counter(f.size for f in facets).items()))


def is_reflexive(facets: Sequence[Facet]) -> bool:
    """True iff every facet normal is integral."""
    return bool(facets) and all(f.normal.denominator == 1 for f in facets)


# ---------------------------------------------------------------------------
# Face lattice and h-vectors
# ---------------------------------------------------------------------------

def _maximal_intersections(face: int, facet_masks: Sequence[int]) -> List[int]:
    candidates = {face & g for g in facet_masks} - {face, 0}
    ordered = sorted(candidates, key=_popcount, reverse=True)
    maximal: List[int] = []
    for c in ordered:
        if not any(c & m == c for m in maximal):
            maximal.append(c)
    return maximal


def build_face_lattice(
    facets: Sequence[Facet], vertices: VertexMatrix, budgets: Optional[Budgets] = None
) -> FaceLattice:
    """
    Generate every nonempty proper face, level by level from the facets down.

    A k-face with k+1 vertices is a simplex and its facets are its
    one-vertex-smaller subsets. Any other k-face has as facets the maximal
    proper intersections with the polytope's facets; its affine dimension is
    confirmed by an exact rank computation.

    Raises:
        BudgetExceededError: More faces than budgets.faces
    """
    budgets = resolve_budgets(budgets)
    d = vertices.dim
    columns = vertices.columns()
    facet_masks = [_mask(f.incident) for f in facets]

    levels: Dict[int, set] = {d - 1: set(facet_masks)}
    sub_faces: Dict[int, Tuple[int, ...]] = {}
    total = len(levels[d - 1])
    for k in range(d - 1, 0, -1):
        below = set()
        for face in levels[k]:
            if _popcount(face) == k + 1:
                below.update(face & ~(1 << i) for i in _indices(face))
                continue
            if rank_rows([columns[i] for i in _indices(face)]) != k + 1:
                raise ValueError(
                    f"Face {_indices(face)} does not have dimension {k}; the facet list is inconsistent"
                )
            children = _maximal_intersections(face, facet_masks)
            sub_faces[face] = tuple(sorted(children))
            below.update(children)
        total += len(below)
        if total > budgets.faces:
            raise BudgetExceededError("faces", budgets.faces, total)
        levels[k - 1] = below
        logger.debug("C_%d: %d faces of dimension %d", vertices.m, len(below), k - 1)

    ordered = sorted(
        ((k, _indices(face), face) for k, level in levels.items() for face in level)
    )
    logger.info("C_%d face lattice: %d faces", vertices.m, len(ordered))
    return FaceLattice(
        vertices=vertices,
        facets=tuple(facets),
        masks=tuple(face for _, _, face in ordered),
        dims=tuple(k for k, _, _ in ordered),
        sub_faces=sub_faces,
    )


def h_from_f(f: Sequence[int], d: int) -> IntPolynomial:
    """h_j = sum_{k <= j} (-1)^(j-k) C(d-k, j-k) f_{k-1}, with f[0] = f_{-1}."""
    if len(f) != d + 1:
        raise ValueError(f"f-vector of a {d}-polytope needs {d + 1} entries, got {len(f)}")
    return IntPolynomial(tuple(
        sum((-1) ** (j - k) * comb(d - k, j - k) * f[k] for k in range(j + 1))
        for j in range(d + 1)
    ))


def f_vector(lattice: FaceLattice, dim: Optional[int] = None) -> FHVectors:
    """Face counts per dimension with f_{-1} = 1, and the matching h-polynomial."""
    d = lattice.dim if dim is None else dim
    counts = Counter(lattice.dims)
    f = (1,) + tuple(counts.get(k, 0) for k in range(d))
    return FHVectors(f, h_from_f(f, d))


# ---------------------------------------------------------------------------
# Pulling triangulation
# ---------------------------------------------------------------------------

def pulling_triangulation(
    lattice: FaceLattice, vertex_order: Optional[Sequence[int]] = None
) -> Triangulation:
    """
    Pull the boundary vertices in the given order and cone every cell at the origin.

    A simplex face is its own triangulation. Any other face is the cone from
    its earliest vertex over the pulled triangulations of its facets that
    miss that vertex. Triangulations of shared faces are memoised, so
    neighbouring facets agree on their common boundary.

    Args:
        lattice: Face lattice of the polytope
        vertex_order: Permutation of the vertex indices (default: column order)

    Returns:
        Triangulation whose apex index is the vertex count
    """
    V = lattice.vertices
    n, d = V.vertex_count, V.dim
    order = list(range(n)) if vertex_order is None else list(vertex_order)
    if sorted(order) != list(range(n)):
        raise ValueError(f"vertex_order must be a permutation of 0..{n - 1}")
    position = {v: i for i, v in enumerate(order)}
    memo: Dict[int, Tuple[int, ...]] = {}

    def pull(face: int, k: int) -> Tuple[int, ...]:
        if _popcount(face) == k + 1:
            return (face,)
        if face in memo:
            return memo[face]
        first = min(_indices(face), key=position.__getitem__)
        bit = 1 << first
        cells = []
        for child in lattice.sub_faces[face]:
            if not child & bit:
                cells.extend(cell | bit for cell in pull(child, k - 1))
        memo[face] = tuple(cells)
        return memo[face]

    cells = set()
    for facet in lattice.facets:
        cells.update(pull(_mask(facet.incident), d - 1))

    columns = V.columns()
    dets = [det_rows([columns[i] for i in _indices(cell)]) for cell in cells]
    unimodular = all(abs(x) == 1 for x in dets)
    if not unimodular:
        logger.info(
            "C_%d pulling triangulation: %d of %d cells are not unimodular",
            V.m, sum(1 for x in dets if abs(x) != 1), len(cells),
        )
    simplices = tuple(sorted(_indices(cell) + (n,) for cell in cells))
    logger.info("C_%d pulling triangulation: %d cells", V.m, len(simplices))
    return Triangulation(simplices, unimodular, n, d)


def boundary_h_polynomial(tri: Triangulation, dim: int) -> BoundaryHPolynomial:
    """
    h-polynomial of the boundary complex of a coned triangulation.

    Faces of the boundary complex are all nonempty subsets of the boundary
    cells, generated one size at a time.
    """
    level = set()
    for cell in tri.boundary_cells:
        if len(cell) != dim:
            raise ValueError(f"Boundary cell {cell} does not have {dim} vertices")
        level.add(_mask(cell))

    f = [0] * (dim + 1)
    f[0] = 1
    for size in range(dim, 0, -1):
        f[size] = len(level)
        if size > 1:
            level = {face & ~(1 << i) for face in level for i in _indices(face)}
    return BoundaryHPolynomial(h_from_f(f, dim), tri.unimodular)
