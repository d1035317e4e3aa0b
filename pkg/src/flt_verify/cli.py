"""
Command-line front end: per-field reports, range scans and proof logs
"""

import argparse
import logging
import sys
from typing import Any, Callable, Dict, NoReturn, Optional, Sequence

from .__version__ import __version__
from .config import LOG_LEVELS, ToolkitConfig, load_config
from .constants import EXIT_CROSS_CHECK, EXIT_OK, EXIT_USAGE, FAMILY_MAX_N
from .cubic import caseII_identity, mod3_table
from .dio import SANITY_RANGE, bw_sanity, pell_images, solve, tail_check
from .errors import CrossCheckError
from .formclass import conditions_abc_direct
from .genus import classify_conditions
from .models import SCAN_KINDS, ScanRecord, ScanRequest
from .polyfam import certify_2_ramified, check_norm_form, check_totally_real, gen_fn, ingest_poly_list
from .quadring import Splitting, prime_above_2, validate_field_datum
from .scan import run_scan
from .unitsq import compcrit_test
from .utils import dumps_record, to_serializable

logger = logging.getLogger(__name__)


class UsageExitParser(argparse.ArgumentParser):
    """argparse that exits with the toolkit's usage code instead of 2"""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        print(f"Error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def emit(record: ScanRecord) -> None:
    print(dumps_record(record), flush=True)


def note(message: str) -> None:
    """Human-readable progress on stderr; stdout carries JSON only."""
    print(message, file=sys.stderr)


def cmd_quad(args: argparse.Namespace, config: ToolkitConfig) -> int:
    d = validate_field_datum(args.d)
    report = classify_conditions(d)
    payload: Dict[str, Any] = {"genus": report}
    if d >= 2:
        direct = conditions_abc_direct(d)
        payload["direct"] = direct
        if report.cond_a and (direct.cond_a, direct.cond_b, direct.cond_c) != (
            report.cond_a,
            report.cond_b,
            report.cond_c,
        ):
            raise CrossCheckError(f"genus and form class group disagree on d = {d}", stage="quad")
        if prime_above_2(d).splitting is not Splitting.SPLIT:
            payload["compcrit"] = compcrit_test(d)
    emit(ScanRecord.of("quad", d, payload))
    note(
        f"d = {d}: (a) {report.cond_a}, (b) {report.cond_b}, (c) {report.cond_c}"
        f" [{report.classification_tag.value}]"
    )
    return EXIT_OK


def cmd_scan(args: argparse.Namespace, config: ToolkitConfig) -> int:
    request = ScanRequest(
        what=args.what,
        dmax=args.dmax,
        lmax=args.lmax,
        r1max=args.r1max,
        out=args.out,
        jobs=config.jobs,
        resume=args.resume,
    )
    summary = run_scan(request)
    print(dumps_record(summary), flush=True)
    note(f"{summary.records} records written to {summary.out}, {summary.errors} errors")
    return EXIT_CROSS_CHECK if summary.cross_check_failures else EXIT_OK


def cmd_dio(args: argparse.Namespace, config: ToolkitConfig) -> int:
    report = solve(config.precision_bits, config.max_precision_bits, config.jobs)
    for entry in report.proof_log:
        note(f"[{entry.stage}] {entry.name}: {entry.value}")
    tail = tail_check()
    if not tail.holds:
        raise CrossCheckError("2^(2 s1 + 3) + 1 = l*w^2 has an admissible solution", stage="tail")
    images = pell_images(report.solutions)
    sanity = [bw_sanity(k, config.precision_bits) for k in SANITY_RANGE]
    if not all(s.holds for s in sanity):
        raise CrossCheckError("a linear form falls below the Baker-Wustholz bound", stage="bw-sanity")
    emit(
        ScanRecord.of(
            "dio",
            0,
            {"report": report, "tail": tail, "images": images, "bw_sanity": sanity},
        )
    )
    note(f"solutions: {[s.as_tuple() for s in report.solutions]} plus k = 0, eta = -1, s1 = s2")
    return EXIT_OK


def cmd_cubic(args: argparse.Namespace, config: ToolkitConfig) -> int:
    table = mod3_table()
    identity = caseII_identity()
    emit(ScanRecord.of("cubic", 0, {"table": table, "case_ii_identity": identity}))
    zeros = [case.key for case in table if case.delta_mod3 == 0]
    note(f"{len(table)} cases, discriminant divisible by 3 for {zeros}")
    return EXIT_OK


def _family_payload(n: int) -> Dict[str, Any]:
    fp = gen_fn(n)
    if not check_norm_form(fp):
        raise CrossCheckError(f"A^2 + 7B^2 != (x^2 + 7)^{n}", stage="polyfam")
    return {
        "n": n,
        "f": str(fp.f),
        "coefficients": list(fp.f.coeffs),
        "totally_real": check_totally_real(fp),
        "ramification": certify_2_ramified(fp),
    }


def cmd_polyfam(args: argparse.Namespace, config: ToolkitConfig) -> int:
    ns = [args.n] if args.n is not None else list(range(1, FAMILY_MAX_N + 1))
    inconclusive = []
    for n in ns:
        payload = _family_payload(n)
        if not payload["ramification"].certified:
            inconclusive.append(n)
        emit(ScanRecord.of("polyfam", n, payload))
        note(f"f_{n}: totally real {payload['totally_real']}, 2 {payload['ramification'].status.value}")
    if inconclusive:
        note(f"inconclusive ramification certificates: {inconclusive}")
    return EXIT_OK


def cmd_ingest(args: argparse.Namespace, config: ToolkitConfig) -> int:
    records = ingest_poly_list(args.path)
    for record in records:
        emit(ScanRecord(kind="ingest", key=record.line, payload=to_serializable(record), error=record.error))
    note(f"{len(records)} polynomials read, {sum(r.error is not None for r in records)} errors")
    return EXIT_OK


Handler = Callable[[argparse.Namespace, ToolkitConfig], int]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision-bits", type=int, default=None, help="Starting precision for rigorous reals")
    common.add_argument("--jobs", type=int, default=None, help="Worker threads for scans and brute force")
    common.add_argument("--log-level", choices=LOG_LEVELS, default=None, help="Logging level (stderr)")

    parser = UsageExitParser(prog="flt-verify", description="Verify the computations behind asymptotic FLT criteria")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=UsageExitParser)

    quad = sub.add_parser("quad", parents=[common], help="Report conditions (a)(b)(c) for Q(sqrt(d))")
    quad.add_argument("--d", type=int, required=True, help="Squarefree integer, not 0 or 1")
    quad.set_defaults(handler=cmd_quad)

    scan = sub.add_parser("scan", parents=[common], help="Scan a range into a JSON-lines file")
    scan.add_argument("--what", choices=SCAN_KINDS, required=True)
    scan.add_argument("--dmax", type=int, default=0, help="Upper bound on d (D for genus)")
    scan.add_argument("--lmax", type=int, default=0, help="Upper bound on l (kraus)")
    scan.add_argument("--r1max", type=int, default=40, help="Enumeration bound on r1 (kraus)")
    scan.add_argument("--out", required=True, help="Output file")
    scan.add_argument("--resume", action="store_true", help="Continue from the cursor file")
    scan.set_defaults(handler=cmd_scan)

    dio = sub.add_parser("dio", parents=[common], help="Solve the Pell-type exponential equation")
    dio.set_defaults(handler=cmd_dio)

    cubic = sub.add_parser("cubic", parents=[common], help="Cubic discriminant table and identity")
    cubic.set_defaults(handler=cmd_cubic)

    polyfam = sub.add_parser("polyfam", parents=[common], help="Check the family f_n")
    polyfam.add_argument("--n", type=int, default=None, help=f"Degree (default: 1..{FAMILY_MAX_N})")
    polyfam.set_defaults(handler=cmd_polyfam)

    ingest = sub.add_parser("ingest", parents=[common], help="Check polynomials listed in a file")
    ingest.add_argument("--path", required=True, help="One polynomial per line, ascending coefficients")
    ingest.set_defaults(handler=cmd_ingest)
    return parser


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level),
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, configure logging and dispatch; exceptions propagate to the caller."""
    args = build_parser().parse_args(argv)
    config = load_config(precision_bits=args.precision_bits, jobs=args.jobs, log_level=args.log_level)
    configure_logging(config.log_level)
    handler: Handler = args.handler
    logger.info("flt-verify %s: %s", __version__, args.command)
    return handler(args, config)