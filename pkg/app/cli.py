"""
SolAut Command Line
Subcommands classify | aut | out | homeo | selftest.

Exit codes: 0 success, 2 parse error, 3 matrix-domain error, 4 failed
verification, 5 invalid sapphire or non-Sol input. Reports go to stdout
only when the whole command succeeded; diagnostics go to stderr.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from . import __version__
from .config import get_settings, override_settings
from .errors import ParseError, SolAutError
from .reports import (
    KINDS,
    ReportDocument,
    aut_report,
    classify_report,
    homeo_report,
    make_report,
    out_report,
    parse_matrix,
    render_text,
)
from .selftest import run_selftest

logger = logging.getLogger("solaut")

MATRIX_EPILOG = """\
Matrices are written "a,b;c,d". A matrix whose first entry is negative looks
like an option to the parser; put it after "--" or pass it as --matrix=VALUE:

  solaut classify -- "-2,-1;-1,-1"
  solaut out torus-bundle --matrix="-2,-1;-1,-1"
  solaut homeo -- "2,1;1,1" "-1,1;1,-2"
"""


class _Parser(argparse.ArgumentParser):
    """argparse with the parse-error exit code routed through ParseError."""

    def error(self, message):
        raise ParseError(message)


def build_parser() -> argparse.ArgumentParser:
    # options accepted before or after the subcommand
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
    common.add_argument("--max-beta", type=int, default=argparse.SUPPRESS, help="cap on the primitive-root unit scan")

    parser = _Parser(
        prog="solaut",
        description="Aut and Out of Sol 3-manifold groups",
        epilog=MATRIX_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"solaut {__version__}")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--max-beta", type=int, default=None, help="cap on the primitive-root unit scan")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", parents=[common], help="Anosov verdict, primitive root, reversers, square roots",
                       epilog=MATRIX_EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("matrix", nargs="?", help='matrix "a,b;c,d"')
    p.add_argument("-m", "--matrix", dest="matrix_option", metavar="MATRIX", help="the matrix as an option value")
    p.add_argument("--file", type=Path, help="one matrix per line")

    for name, text in (("aut", "structure of Aut(E)"), ("out", "structure of Out(E)")):
        p = sub.add_parser(name, parents=[common], help=text,
                           epilog=MATRIX_EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("kind", choices=KINDS)
        p.add_argument("matrix", nargs="?", help='monodromy or gluing matrix "a,b;c,d"')
        p.add_argument("-m", "--matrix", dest="matrix_option", metavar="MATRIX", help="the matrix as an option value")
        p.add_argument("--file", type=Path, help="one matrix per line")
        p.add_argument("--verify", action="store_true", help="cross-check against the brute-force oracle")

    p = sub.add_parser("homeo", parents=[common], help="homeomorphism test for two torus bundles",
                       epilog=MATRIX_EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("A")
    p.add_argument("B")

    p = sub.add_parser("selftest", parents=[common], help="invariant suite over a box of matrices")
    p.add_argument("--bound", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=25)
    return parser


def _matrices(args) -> List[str]:
    if args.file is not None:
        try:
            lines = args.file.read_text().splitlines()
        except OSError as e:
            raise ParseError(f"cannot read {args.file}: {e}")
        items = [line.strip() for line in lines if line.strip() and not line.lstrip().startswith("#")]
        if not items:
            raise ParseError(f"{args.file} contains no matrices")
        return items
    if args.matrix and args.matrix_option:
        raise ParseError("give the matrix either positionally or with --matrix, not both")
    text = args.matrix or args.matrix_option
    if not text:
        raise ParseError("a matrix argument, --matrix or --file is required")
    return [text]


def _reports(args) -> List[ReportDocument]:
    if args.command == "classify":
        return [classify_report(parse_matrix(m)) for m in _matrices(args)]
    if args.command == "aut":
        return [aut_report(args.kind, parse_matrix(m), args.verify) for m in _matrices(args)]
    if args.command == "out":
        return [out_report(args.kind, parse_matrix(m), args.verify) for m in _matrices(args)]
    if args.command == "homeo":
        return [homeo_report(parse_matrix(args.A), parse_matrix(args.B))]
    report = run_selftest(args.bound, args.seed, args.samples)
    doc = make_report(
        "selftest",
        {"bound": args.bound, "seed": args.seed, "samples": args.samples},
        report.to_dict(),
        {"suite": {"ok": report.ok}},
    )
    return [doc]


def _emit(docs: List[ReportDocument], fmt: str) -> str:
    if fmt == "json":
        if len(docs) == 1:
            return docs[0].to_json()
        return json.dumps([d.model_dump() for d in docs], indent=2)
    return "\n\n".join(render_text(d) for d in docs)


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(
        level=get_settings().log_level,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )
    try:
        args = build_parser().parse_args(argv)
        if args.max_beta is not None:
            override_settings(max_beta=args.max_beta)
        docs = _reports(args)
    except SolAutError as e:
        print(f"solaut: {e.code}: {e}", file=sys.stderr)
        return e.exit_code

    print(_emit(docs, args.format))
    if args.command == "selftest" and not docs[0].verified:
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
