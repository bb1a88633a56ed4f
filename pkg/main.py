"""
Main CLI entry point for the cyclotomic lattice toolkit.
"""
import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

# Fix encoding for Windows console
if sys.platform == "win32":
    os.system("chcp 65001 >nul 2>&1")
    sys.stdout.reconfigure(encoding='utf-8') if hasattr(sys.stdout, 'reconfigure') else None

from config import (
    EXIT_BUDGET_EXCEEDED,
    EXIT_INVALID_INPUT,
    EXIT_OK,
    EXIT_VERIFICATION_FAILED,
    Budgets,
    BudgetExceededError,
)
from closed_forms import Strategy, coordinator, table_entry
from csv_writer import CSVWriter
from cyclotomic_builder import build, euler_phi, squarefree_decompose
from exact_core import is_palindromic
from growth_oracle import BFS_MODES, bfs_shells
from hull_engine import FACET_METHODS, enumerate_facets
from json_saver import JSONSaver
from transport_dual import count_spanning_trees, enumerate_vertices_2d, verify_duality
from tu_checker import certificate_verdict, is_totally_unimodular, tu_failure_certificate_3pq, witness_holds
from utils import (
    format_duration,
    format_facets_text,
    format_matrix_text,
    load_fixtures,
    read_matrix_file,
    validate_m,
)
from verification import FAMILIES, SCOPES, ReportAnalyzer, run_verification


def status(message: str = "") -> None:
    """Progress lines go to stderr so stdout stays machine readable."""
    print(message, file=sys.stderr)


def emit(text: str, output: Optional[str]) -> None:
    """Write command output to --output, or to stdout."""
    if output is None:
        sys.stdout.write(text)
        return
    path = Path(output)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(text)
    status(f"✅ Output written: {path}")


def emit_frame(df, output: Optional[str]) -> None:
    if output is None:
        sys.stdout.write(CSVWriter.to_text(df))
        return
    written = CSVWriter(Path(output)).write(df)
    status(f"✅ Output written: {written}")


def _three_pq_factors(m: int) -> Optional[tuple]:
    """(p, q) when sqrt(m) = 3pq with primes 3 < p < q, else None."""
    odd = squarefree_decompose(m).odd_primes
    if len(odd) == 3 and odd[0] == 3:
        return odd[1], odd[2]
    return None


def cmd_build(args: argparse.Namespace, budgets: Budgets) -> int:
    status(f"🔧 Building A_{args.m}...")
    V = build(args.m)
    status(f"✅ A_{args.m}: {V.dim} x {V.vertex_count}")
    if args.format == "json":
        emit(JSONSaver.dumps(V.to_dict()), args.output)
    else:
        emit(format_matrix_text(V.matrix), args.output)
    return EXIT_OK


def cmd_facets(args: argparse.Namespace, budgets: Budgets) -> int:
    V = build(args.m)
    status(f"📐 Enumerating facets of C_{args.m} (dim {V.dim}, {V.vertex_count} vertices)...")
    facets = enumerate_facets(V, budgets, args.method)
    status(f"✅ {len(facets)} facets")
    if args.format == "json":
        emit(JSONSaver.dumps({"m": args.m, "facets": [f.to_dict() for f in facets]}), args.output)
    elif args.format == "csv":
        emit_frame(CSVWriter.facets_frame(facets), args.output)
    else:
        emit(format_facets_text(facets), args.output)
    return EXIT_OK


def cmd_hvector(args: argparse.Namespace, budgets: Budgets) -> int:
    status(f"🧮 Coordinator polynomial of Z[zeta_{args.m}] ({args.strategy})...")
    result = coordinator(args.m, args.strategy, budgets)
    data: Dict[str, Any] = result.to_dict()
    data["phi"] = euler_phi(args.m)
    data["palindromic"] = is_palindromic(result.h) if result.h is not None else None

    factors = _three_pq_factors(args.m)
    if not result.available and factors is not None:
        p, q = factors
        columns = tu_failure_certificate_3pq(p, q)
        data["tu_certificate"] = {"p": p, "q": q, "columns": list(columns)}
        data["note"] = (
            f"{data['note']}; columns {list(columns)} of A_{3 * p * q} admit no signed split"
        ).lstrip("; ")

    if result.available:
        status(f"✅ h_{args.m} via {result.provenance.value}")
    else:
        status(f"⚠️  h_{args.m} unavailable: {data['note']}")
    emit(JSONSaver.dumps(data), args.output)
    return EXIT_OK


def cmd_growth(args: argparse.Namespace, budgets: Budgets) -> int:
    if args.max_n is None:
        raise ValueError("growth needs --max-n")
    V = build(args.m)
    status(f"🌐 Word-length shells of C_{args.m} up to n = {args.max_n}...")
    shells = bfs_shells(V, args.max_n, budgets, args.mode)
    status(f"✅ {sum(shells.counts):,} points visited")
    if args.format == "json":
        emit(JSONSaver.dumps(shells.to_dict()), args.output)
    else:
        emit_frame(CSVWriter.shells_frame(shells), args.output)
    return EXIT_OK


def cmd_tu(args: argparse.Namespace, budgets: Budgets) -> int:
    if args.matrix is not None:
        A = read_matrix_file(args.matrix)
        label = Path(args.matrix).name
        data: Dict[str, Any] = {"matrix": str(args.matrix), "shape": list(A.shape)}
    else:
        A = build(args.m).matrix
        label = f"A_{args.m}"
        data = {"m": args.m}
    status(f"🔍 Checking total unimodularity of {label} ({A.rows} x {A.cols})...")
    try:
        verdict = is_totally_unimodular(A, budgets, exact=args.exact)
    except BudgetExceededError as e:
        factors = _three_pq_factors(args.m) if args.matrix is None else None
        if factors is None:
            raise
        status(f"⚠️  {e}; falling back to the three-column certificate")
        p, q = factors
        verdict = certificate_verdict(p, q)
        source = f"A_{3 * p * q}"
        if args.m != 3 * p * q:
            source += f", the 3*{p}*{q} factor of A_{args.m}"
        data["note"] = f"minor enumeration skipped ({e.budget_name}); witness from certificate columns of {source}"
        data["certificate_m"] = 3 * p * q
        # the first block of A_3pq keeps its row and column indices inside A_m
        data["witness_checked"] = witness_holds(A, verdict)
    data.update(verdict.to_dict())
    status("✅ Totally unimodular" if verdict.is_tu else "❌ Not totally unimodular")
    emit(JSONSaver.dumps(data), args.output)
    return EXIT_OK


def cmd_dual(args: argparse.Namespace, budgets: Budgets) -> int:
    status(f"🚚 Vertices of P({args.p},{args.q}) from {count_spanning_trees(args.p, args.q):,} spanning trees...")
    vertices = enumerate_vertices_2d(args.p, args.q, budgets)
    status(f"✅ {len(vertices)} vertices")
    verified = None
    if args.verify:
        status(f"🔗 Matching against facets of C_{args.p * args.q}...")
        verified = verify_duality(args.p, args.q, budgets)
        status("✅ Duality verified" if verified else "❌ Duality check failed")

    if args.format == "csv":
        emit_frame(CSVWriter.vertices_frame(vertices), args.output)
    else:
        data = {
            "p": args.p,
            "q": args.q,
            "spanning_trees": count_spanning_trees(args.p, args.q),
            "vertices": [v.to_dict() for v in vertices],
            "duality_verified": verified,
        }
        emit(JSONSaver.dumps(data), args.output)
    return EXIT_OK if verified is not False else EXIT_VERIFICATION_FAILED


def cmd_closed_form(args: argparse.Namespace, budgets: Budgets) -> int:
    if args.table:
        result = table_entry(args.m, load_fixtures(args.fixtures))
    else:
        result = coordinator(args.m, Strategy.CLOSED.value, budgets)
    if not result.available:
        status(f"⚠️  {result.note}")
    emit(JSONSaver.dumps(result.to_dict()), args.output)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, budgets: Budgets) -> int:
    status("=" * 60)
    status(f"🧪 Cyclotomic lattice verification ({args.scope} scope)")
    status("=" * 60)
    status()

    def progress(record) -> None:
        mark = "✅" if record.passed else "❌"
        status(f"   {mark} {record.check_id} ({format_duration(record.elapsed)})")

    report = run_verification(args.scope, args.fixtures, budgets, args.family, progress)
    status()
    status(ReportAnalyzer.get_summary(report))
    failures = ReportAnalyzer.format_failures(report)
    if failures:
        status(failures)
    status()

    if args.save:
        path = JSONSaver().save_report(report)
        status(f"📊 Report saved to: {path}")
    emit(JSONSaver.dumps(report.to_dict()), args.output)
    return EXIT_OK if report.passed else EXIT_VERIFICATION_FAILED


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", "-v", action="store_true", help="Log library progress")
    common.add_argument("--budget-points", type=int, help="Override the BFS point budget")
    common.add_argument("--output", "-o", type=str, help="Write output to this file instead of stdout")

    parser = argparse.ArgumentParser(description="Cyclotomic polytopes and coordinator polynomials")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", parents=[common], help="Vertex matrix A_m")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(handler=cmd_build)

    p = sub.add_parser("facets", parents=[common], help="Facets of C_m")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--format", choices=["text", "json", "csv"], default="text")
    p.add_argument("--method", choices=FACET_METHODS, default="auto")
    p.set_defaults(handler=cmd_facets)

    p = sub.add_parser("hvector", parents=[common], help="Coordinator polynomial h_m")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default="auto")
    p.set_defaults(handler=cmd_hvector)

    p = sub.add_parser("growth", parents=[common], help="Word-length shells")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--max-n", type=int)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--mode", choices=BFS_MODES, default="auto")
    p.set_defaults(handler=cmd_growth)

    p = sub.add_parser("tu", parents=[common], help="Total unimodularity of A_m or of a matrix file")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--m", type=int)
    source.add_argument("--matrix", type=str, help="Matrix text file: \"d n\" header, then d rows")
    p.add_argument("--exact", action="store_true", help="Certify every minor exactly")
    p.set_defaults(handler=cmd_tu)

    p = sub.add_parser("dual", parents=[common], help="Transportation polytope P(p,q)")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--verify", action="store_true", help="Match vertices with facets of C_pq")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.set_defaults(handler=cmd_dual)

    p = sub.add_parser("closed-form", parents=[common], help="Closed-form h_m, or the table row")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--table", action="store_true", help="Report the published table row")
    p.add_argument("--fixtures", type=str, help="Fixture file (default: fixtures.json)")
    p.set_defaults(handler=cmd_closed_form)

    p = sub.add_parser("verify", parents=[common], help="Run the acceptance suite")
    p.add_argument("--scope", choices=SCOPES, default="fast")
    p.add_argument("--fixtures", type=str, help="Fixture file (default: fixtures.json)")
    p.add_argument("--family", action="append", choices=FAMILIES, help="Only run this check family")
    p.add_argument("--save", action="store_true", help="Save a timestamped report with timings")
    p.set_defaults(handler=cmd_verify)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one command and return its exit code."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    handler: Callable[[argparse.Namespace, Budgets], int] = args.handler

    try:
        for name in ("m", "p", "q"):
            if getattr(args, name, None) is not None:
                validate_m(getattr(args, name))
        if args.budget_points is not None and args.budget_points <= 0:
            raise ValueError(f"--budget-points must be positive, got {args.budget_points}")
        budgets = Budgets.from_env().with_overrides(bfs_points=args.budget_points)
        return handler(args, budgets)
    except KeyboardInterrupt:
        status("\n\n❌ Operation cancelled by user.")
        return EXIT_OK
    except BudgetExceededError as e:
        status(f"\n❌ {e}")
        if e.partial is not None:
            status(f"   Partial result: {e.partial.to_dict()}")
        return EXIT_BUDGET_EXCEEDED
    except (ValueError, FileNotFoundError) as e:
        status(f"\n❌ Invalid input: {str(e)}")
        return EXIT_INVALID_INPUT
    except Exception as e:
        status(f"\n❌ Fatal error: {str(e)}")
        import traceback
        traceback.print_exc()
        return EXIT_VERIFICATION_FAILED


if __name__ == "__main__":
    sys.exit(main())
