"""
Acceptance suite replaying the published numbers, and report analysis.
"""
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from config import Budgets, resolve_budgets
from closed_forms import coordinator, face_count_2p, facet_count_2p, fit_from_shells, h_prime, opposite_free_subsets
from cyclotomic_builder import VertexMatrix, build, euler_phi, squarefree_decompose
from exact_core import IntPolynomial, is_palindromic, is_unimodal, poly_pow, series_coeffs
from growth_oracle import bfs_shells, normality_check, shell_points, shells_negation_symmetric
from hull_engine import (
    FaceLattice,
    Facet,
    Triangulation,
    build_face_lattice,
    enumerate_facets,
    f_vector,
    incident_size_profile,
    is_reflexive,
    is_simplicial,
    pulling_triangulation,
    verify_lattice_points,
)
from sympy import primerange
from transport_dual import count_spanning_trees, enumerate_vertices_2d, verify_duality
from tu_checker import certificate_verdict, check_split_criterion, is_totally_unimodular, witness_holds
from utils import load_fixtures

logger = logging.getLogger(__name__)

SCOPES = ("fast", "full")
FAMILIES = (
    "table", "pipelines", "shells", "facets", "faces",
    "tu", "structure", "duality", "normality",
)

STATUS_PASS = "pass"
STATUS_FAIL = "fail"
STATUS_ERROR = "error"


@dataclass(frozen=True)
class CheckRecord:
    check_id: str
    family: str
    m: Optional[int]
    expected: Any
    computed: Any
    status: str
    elapsed: float
    source: str

    @property
    def passed(self) -> bool:
        return self.status == STATUS_PASS

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        data = {
            "check_id": self.check_id,
            "family": self.family,
            "m": self.m,
            "expected": self.expected,
            "computed": self.computed,
            "status": self.status,
            "source": self.source,
        }
        if include_timing:
            data["elapsed"] = round(self.elapsed, 3)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CheckRecord":
        return cls(
            data["check_id"], data["family"], data.get("m"), data.get("expected"),
            data.get("computed"), data["status"], float(data.get("elapsed", 0.0)), data.get("source", ""),
        )


@dataclass(frozen=True)
class VerificationReport:
    scope: str
    records: Tuple[CheckRecord, ...]

    @property
    def passed(self) -> bool:
        return bool(self.records) and all(r.passed for r in self.records)

    @property
    def failures(self) -> List[CheckRecord]:
        return [r for r in self.records if not r.passed]

    def to_dict(self, include_timing: bool = False) -> Dict[str, Any]:
        return {
            "scope": self.scope,
            "passed": self.passed,
            "records": [r.to_dict(include_timing) for r in self.records],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "VerificationReport":
        return cls(data["scope"], tuple(CheckRecord.from_dict(r) for r in data["records"]))


@dataclass(frozen=True)
class _Check:
    family: str
    check_id: str
    m: Optional[int]
    source: str
    expected: Any
    compute: Callable[[], Any]


class _RunCache:
    """Hull objects shared by the checks of one run; nothing outlives the run."""

    def __init__(self, budgets: Budgets):
        self.budgets = budgets
        self._vertices: Dict[int, VertexMatrix] = {}
        self._facets: Dict[int, List[Facet]] = {}
        self._lattices: Dict[int, FaceLattice] = {}
        self._triangulations: Dict[int, Triangulation] = {}

    def vertices(self, m: int) -> VertexMatrix:
        if m not in self._vertices:
            self._vertices[m] = build(m)
        return self._vertices[m]

    def facets(self, m: int) -> List[Facet]:
        if m not in self._facets:
            self._facets[m] = enumerate_facets(self.vertices(m), self.budgets)
        return self._facets[m]

    def lattice(self, m: int) -> FaceLattice:
        if m not in self._lattices:
            self._lattices[m] = build_face_lattice(self.facets(m), self.vertices(m), self.budgets)
        return self._lattices[m]

    def triangulation(self, m: int) -> Triangulation:
        if m not in self._triangulations:
            self._triangulations[m] = pulling_triangulation(self.lattice(m))
        return self._triangulations[m]


def _h(result) -> Optional[List[int]]:
    return result.h.to_list() if result.h is not None else None


def _plan(fixtures: Dict[str, Any], scope: str, cache: _RunCache) -> Iterator[_Check]:
    budgets = cache.budgets
    full = scope == "full"
    heavy = set(fixtures.get("full_scope_only", []))

    def in_scope(m: int) -> bool:
        return full or m not in heavy

    table = fixtures["coordinator_table"]

    # Published table, closed-form primes and prime powers
    for key, row in table.items():
        m = int(key)
        if in_scope(m):
            yield _Check("table", f"table/{m}", m, row.get("source", ""), row["h"],
                         lambda m=m: _h(coordinator(m, "auto", budgets)))
    primes = fixtures.get("prime_rows", {})
    for p in primerange(2, primes.get("max_prime", 0) + 1):
        yield _Check("table", f"table/prime/{p}", p, primes.get("source", ""), [1] * p,
                     lambda p=p: _h(coordinator(p, "auto", budgets)))
    for m in primes.get("prime_powers", []):
        p = squarefree_decompose(m).sqrt_m
        expected = poly_pow(h_prime(p), m // p).to_list()
        yield _Check("table", f"table/prime-power/{m}", m, primes.get("source", ""), expected,
                     lambda m=m: _h(coordinator(m, "auto", budgets)))
    for key, row in table.items():
        m = int(key)
        h = IntPolynomial(tuple(row["h"]))
        shape = [is_palindromic(h), is_unimodal(h), all(c >= 0 for c in h.coeffs), h.degree == euler_phi(m)]
        yield _Check("table", f"table/shape/{m}", m, row.get("source", ""), [True] * 4, lambda s=shape: s)

    # Three pipelines on the same m
    section = fixtures.get("pipeline_agreement", {})
    for m in section.get("values", []):
        expected = table[str(m)]["h"]
        for strategy in ("closed", "triangulation", "bfs"):
            yield _Check("pipelines", f"pipelines/{strategy}/{m}", m, section["source"], expected,
                         lambda m=m, s=strategy: _h(coordinator(m, s, budgets)))
    for m in section.get("direct_bfs", []):
        def direct(m=m):
            V = cache.vertices(m)
            return fit_from_shells(bfs_shells(V, V.dim + 1, budgets), V.dim).to_list()
        yield _Check("pipelines", f"pipelines/direct-bfs/{m}", m, section["source"], table[str(m)]["h"], direct)

    # Shells against series expansions
    section = fixtures.get("bfs_shells", {})
    for m, depth in section.get("values", []):
        h = IntPolynomial(tuple(table[str(m)]["h"]))
        expected = series_coeffs(h, euler_phi(m), depth)
        yield _Check("shells", f"shells/{m}/{depth}", m, section["source"], expected,
                     lambda m=m, n=depth: list(bfs_shells(cache.vertices(m), n, budgets).counts))
        if m % 2 == 0:
            yield _Check("shells", f"shells/symmetric/{m}/{depth}", m, section["source"], True,
                         lambda m=m, n=depth: shells_negation_symmetric(shell_points(cache.vertices(m), n, budgets)))

    # Facet counts and profiles
    section = fixtures.get("facet_counts", {})
    for key, count in section.get("values", {}).items():
        m = int(key)
        if in_scope(m):
            yield _Check("facets", f"facets/count/{m}", m, section["source"], count,
                         lambda m=m: len(cache.facets(m)))
    for p in fixtures.get("face_formula", {}).get("primes", []):
        yield _Check("facets", f"facets/two-p/{2 * p}", 2 * p, section.get("source", ""), facet_count_2p(p),
                     lambda p=p: len(cache.facets(2 * p)))
    section = fixtures.get("facet_profiles", {})
    for key, profile in section.get("values", {}).items():
        m = int(key)
        yield _Check("facets", f"facets/profile/{m}", m, section["source"], profile,
                     lambda m=m: {str(k): v for k, v in incident_size_profile(cache.facets(m)).items()})

    # Low-dimensional faces of C_2p
    section = fixtures.get("face_formula", {})
    for p in section.get("primes", []):
        m = 2 * p
        for k in range(1, (p - 1) // 2 + 1):
            yield _Check("faces", f"faces/count/{m}/{k}", m, section["source"], face_count_2p(p, k),
                         lambda m=m, k=k: len(cache.lattice(m).faces_of_dim(k - 1)))
            yield _Check("faces", f"faces/opposite-free/{m}/{k}", m, section["source"], True,
                         lambda m=m, p=p, k=k: cache.lattice(m).faces_of_dim(k - 1) == opposite_free_subsets(p, k))

    # Total unimodularity
    section = fixtures.get("tu_cases", {})
    for m in section.get("values", []):
        yield _Check("tu", f"tu/{m}", m, section["source"], True,
                     lambda m=m: is_totally_unimodular(cache.vertices(m).matrix, budgets).is_tu)
    for m in section.get("unimodular_triangulations", []):
        if in_scope(m):
            yield _Check("tu", f"tu/triangulation/{m}", m, section["source"], True,
                         lambda m=m: cache.triangulation(m).unimodular)
    section = fixtures.get("tu_certificates", {})
    for p, q in section.get("values", []):
        m = 3 * p * q

        def certificate(p=p, q=q, m=m):
            verdict = certificate_verdict(p, q)
            A = cache.vertices(m).matrix
            return [verdict.is_tu, check_split_criterion(A, verdict.witness.cols, budgets) is None,
                    witness_holds(A, verdict)]
        yield _Check("tu", f"tu/certificate/{m}", m, section["source"], [False, True, True], certificate)

    # Structural properties
    section = fixtures.get("structure", {})
    facet_counts = fixtures.get("facet_counts", {}).get("values", {})
    for m in section.get("simplicial", []):
        if not in_scope(m):
            continue
        d = euler_phi(m)

        def simplicial(m=m, d=d):
            facets = cache.facets(m)
            fh = f_vector(cache.lattice(m), d)
            return {
                "simplicial": is_simplicial(facets, d),
                "palindromic": is_palindromic(fh.h),
                "h_at_1_is_facet_count": fh.h(1) == len(facets),
                "h": fh.h.to_list(),
            }
        expected = {"simplicial": True, "palindromic": True, "h_at_1_is_facet_count": True,
                    "h": table[str(m)]["h"]}
        yield _Check("structure", f"structure/simplicial/{m}", m, section["source"], expected, simplicial)
    cells = fixtures.get("pulled_cells", {})
    for key, count in cells.get("values", {}).items():
        m = int(key)
        if in_scope(m):
            yield _Check("structure", f"structure/pulled-cells/{m}", m, cells["source"], count,
                         lambda m=m: len(cache.triangulation(m)))
    for m in section.get("reflexive", []):
        if in_scope(m):
            yield _Check("structure", f"structure/reflexive/{m}", m, section["source"], True,
                         lambda m=m: is_reflexive(cache.facets(m)))
    for m in range(2, section.get("lattice_points_max_m", 0) + 1):
        if euler_phi(m) <= section.get("lattice_points_max_dim", 0) and in_scope(m):
            yield _Check("structure", f"structure/lattice-points/{m}", m, section["source"], True,
                         lambda m=m: verify_lattice_points(cache.vertices(m), cache.facets(m), budgets))

    # Transportation duality
    section = fixtures.get("duality", {})
    for p, q in section.get("pairs", []):
        yield _Check("duality", f"duality/{p}x{q}", p * q, section["source"], True,
                     lambda p=p, q=q: verify_duality(p, q, budgets))
    for key, counts in section.get("transport_counts", {}).items():
        p, q = (int(x) for x in key.split(","))
        yield _Check("duality", f"duality/counts/{p}x{q}", p * q, section["source"], counts,
                     lambda p=p, q=q: {"trees": count_spanning_trees(p, q),
                                       "vertices": len(enumerate_vertices_2d(p, q, budgets))})

    # Normality observable
    section = fixtures.get("normality", {})
    for key, max_k in section.get("values", {}).items():
        m = int(key)
        yield _Check("normality", f"normality/{m}/{max_k}", m, section["source"], True,
                     lambda m=m, k=max_k: normality_check(cache.vertices(m), cache.facets(m), k, budgets))


def _run(check: _Check) -> CheckRecord:
    start = time.perf_counter()
    try:
        computed = check.compute()
        status = STATUS_PASS if computed == check.expected else STATUS_FAIL
    except Exception as e:
        logger.exception("Check %s raised", check.check_id)
        computed = f"{type(e).__name__}: {e}"
        status = STATUS_ERROR
    elapsed = time.perf_counter() - start
    logger.info("%s: %s (%.2fs)", check.check_id, status, elapsed)
    return CheckRecord(
        check.check_id, check.family, check.m, check.expected, computed, status, elapsed, check.source,
    )


def run_verification(
    scope: str = "fast",
    fixtures_path: Union[str, Path, None] = None,
    budgets: Optional[Budgets] = None,
    families: Optional[Sequence[str]] = None,
    progress: Optional[Callable[[CheckRecord], None]] = None,
) -> VerificationReport:
    """
    Run the acceptance suite.

    Args:
        scope: "fast" skips the rows marked full_scope_only in the fixtures
        fixtures_path: Golden-value file (defaults to config.FIXTURES_FILE)
        budgets: Resource guards passed to every pipeline
        families: Restrict the run to these check families
        progress: Called with each record as it completes

    Returns:
        VerificationReport; failures are records, never exceptions
    """
    if scope not in SCOPES:
        raise ValueError(f"Unknown scope '{scope}'. Use one of {SCOPES}")
    unknown = set(families or ()) - set(FAMILIES)
    if unknown:
        raise ValueError(f"Unknown check families: {', '.join(sorted(unknown))}")
    fixtures = load_fixtures(fixtures_path)
    cache = _RunCache(resolve_budgets(budgets))

    records = []
    for check in _plan(fixtures, scope, cache):
        if families and check.family not in families:
            continue
        record = _run(check)
        records.append(record)
        if progress:
            progress(record)
    return VerificationReport(scope, tuple(records))


class ReportAnalyzer:
    """Summaries of a verification report."""

    @staticmethod
    def analyze(report: VerificationReport) -> Dict[str, Dict[str, Any]]:
        """
        Per-family counts.

        Returns:
            family -> {"total", "passed", "failed", "errors", "elapsed"}
        """
        families: Dict[str, Dict[str, Any]] = {}
        for record in report.records:
            stats = families.setdefault(
                record.family, {"total": 0, "passed": 0, "failed": 0, "errors": 0, "elapsed": 0.0}
            )
            stats["total"] += 1
            stats["elapsed"] += record.elapsed
            if record.status == STATUS_PASS:
                stats["passed"] += 1
            elif record.status == STATUS_FAIL:
                stats["failed"] += 1
            else:
                stats["errors"] += 1
        for stats in families.values():
            stats["elapsed"] = round(stats["elapsed"], 3)
        return families

    @staticmethod
    def format_failures(report: VerificationReport) -> str:
        lines = []
        for record in report.failures:
            lines.append(f"\n❌ {record.check_id} [{record.status}] (source: {record.source})")
            lines.append(f"   expected: {record.expected}")
            lines.append(f"   computed: {record.computed}")
        return "\n".join(lines)

    @staticmethod
    def get_summary(report: VerificationReport) -> str:
        if not report.records:
            return ""
        analysis = ReportAnalyzer.analyze(report)
        summary = [
            "=" * 60,
            f"VERIFICATION SUMMARY ({report.scope})",
            "=" * 60,
        ]
        for family, stats in analysis.items():
            mark = "✅" if stats["passed"] == stats["total"] else "❌"
            summary.append(
                f"{mark} {family:<10} {stats['passed']}/{stats['total']} passed"
                f"  ({stats['elapsed']:.2f}s)"
            )
        summary.append("=" * 60)
        total = len(report.records)
        passed = total - len(report.failures)
        summary.append(f"{'✅ ALL CHECKS PASSED' if report.passed else '❌ VERIFICATION FAILED'}: {passed}/{total}")
        return "\n".join(summary)
