"""Command-line entry point.

Exit codes: 0 success, 1 selftest failure, 2 engine fault (biconditional
disagreement or an identity outside its certificate), 64 input/parse error,
65 precision error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from .criterion import (
    DEFAULT_K,
    DEFAULT_M,
    GRID_WIDTH,
    biconditional_check,
    default_target,
    recommended_precision,
    resolvent_contraction_check,
)
from .errors import EngineFault, InputError, PadicDomainError, PrecisionError
from .identities import summarize, verify_identities
from .io import dumps_report, encode_exponent, load_matrix, records_to_csv
from .padic import PadicContext
from .resolvent import set_truncation_fault
from .selftest import run_selftest

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_ENGINE_FAULT = 2
EXIT_USAGE = 64
EXIT_PRECISION = 65

IDENTITY_ORDER_DEFAULT = 4

log = logging.getLogger("padic_contraction")


@dataclass
class RunConfig:
    prime: int | None
    working_precision: int | None
    dim: int
    K: int
    M: int
    mu_range: tuple[int, int] | None
    target: int | None
    seed: int
    fmt: str
    out: Path | None
    jobs: int = 1

    def __post_init__(self) -> None:
        for name in ("dim", "K", "M", "jobs"):
            if getattr(self, name) < 1:
                raise InputError(f"{name} must be positive")
        if self.working_precision is not None and self.working_precision < 1:
            raise InputError("precision must be positive")
        if self.mu_range is not None and self.mu_range[0] > self.mu_range[1]:
            raise InputError("mu valuation range is empty")


def parse_mu_range(text: str) -> tuple[int, int]:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return int(lo), int(hi)
        v = int(text)
        return v, v
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo..hi, got {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=int, help="prime p (must match the matrix file)")
    common.add_argument("--precision", type=int, help="significant base-p digits per scalar (default: derived from target)")
    common.add_argument("--dim", type=int, default=3, help="largest random-matrix dimension for selftest")
    common.add_argument("--kmax", type=int, help="largest power k of R - I (identities: largest m and k)")
    common.add_argument("--mmax", type=int, default=DEFAULT_M, help="largest power m of A checked directly")
    common.add_argument("--mu-valuations", type=parse_mu_range, help="grid of v(mu) as lo..hi")
    common.add_argument("--target", type=int, help="certified exponent requested from every series")
    common.add_argument("--seed", type=int, default=1)
    common.add_argument("--format", choices=("structured", "tabular"), default="structured")
    common.add_argument("--out", type=Path, help="write the report here instead of stdout")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for independent mu valuations")
    common.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="padic-contraction", description="Verify the power-contraction resolvent criterion over Q_p.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_text in (
        ("check", "power contraction vs resolvent criterion, with witnesses"),
        ("verify-identities", "residuals of the resolvent identities"),
        ("scan", "emit (k, v_mu, lhs, rhs, pass) rows"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--matrix", type=Path, required=True, help="matrix file (JSON)")
    sub.add_parser("selftest", parents=[common], help="run the seeded invariant suites")
    return parser


def _config(args, command: str) -> RunConfig:
    K = args.kmax if args.kmax is not None else (IDENTITY_ORDER_DEFAULT if command == "verify-identities" else DEFAULT_K)
    return RunConfig(
        prime=args.prime,
        working_precision=args.precision,
        dim=args.dim,
        K=K,
        M=args.mmax,
        mu_range=args.mu_valuations,
        target=args.target,
        seed=args.seed,
        fmt=args.format,
        out=args.out,
        jobs=args.jobs,
    )


def _load(config: RunConfig, path: Path):
    doc = load_matrix(path)
    doc.matrix_id = doc.matrix_id or path.stem
    if config.prime is not None and config.prime != doc.prime:
        raise InputError(f"--prime {config.prime} does not match matrix file prime {doc.prime}")
    s = doc.norm_exponent()
    v_min = 1 if s == float("-inf") or s < 0 else s + 1
    if config.mu_range is None:
        grid = list(range(v_min, v_min + GRID_WIDTH))
    else:
        grid = list(range(config.mu_range[0], config.mu_range[1] + 1))
        if grid[0] < v_min:
            raise InputError(f"mu valuations must be >= {v_min} for this matrix (||A|| = {doc.prime}^{s})")
    target = config.target if config.target is not None else default_target(config.K, grid)
    precision = config.working_precision or recommended_precision(target, config.K, s)
    ctx = PadicContext(doc.prime, precision)
    return doc, doc.to_padic(ctx), grid, target


def _emit(config: RunConfig, text: str) -> None:
    if config.out is not None:
        config.out.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_check(config: RunConfig, path: Path) -> int:
    doc, a, grid, target = _load(config, path)
    result = biconditional_check(a, config.M, config.K, grid, target, matrix_id=doc.matrix_id, jobs=config.jobs)
    crit = result.criterion
    if result.power_check.verdict and crit.verdict:
        summary = "contraction, criterion holds"
    elif not result.power_check.verdict and not crit.verdict:
        w = result.witness
        summary = f"non-contraction, witness (k={w.k}, v={w.mu_valuation})"
    else:
        summary = "DISAGREEMENT: power check and resolvent criterion differ (engine fault)"
    if config.fmt == "tabular":
        _emit(config, records_to_csv(crit.records))
    else:
        report = crit.to_dict()
        report["power_check"] = result.power_check.to_dict()
        report["biconditional_agreement"] = result.agree
        report["summary"] = summary
        _emit(config, dumps_report(report))
    print(summary, file=sys.stderr)
    return EXIT_OK if result.agree else EXIT_ENGINE_FAULT


def cmd_verify_identities(config: RunConfig, path: Path) -> int:
    doc, a, grid, target = _load(config, path)
    residuals = []
    for v in grid:
        mu = a.ctx.p_power(v)
        residuals.extend((v, r) for r in verify_identities(a, mu, config.K, config.K, target))
    summary = summarize([r for _, r in residuals])
    ok = all(entry["ok"] for entry in summary.values())
    if config.fmt == "tabular":
        lines = ["identity,max_residual_exponent,min_certificate,ok"]
        for name, entry in summary.items():
            lines.append(
                f"{name},{encode_exponent(entry['max_residual_exponent'])},"
                f"{encode_exponent(entry['min_certificate'])},{'true' if entry['ok'] else 'false'}"
            )
        _emit(config, "\n".join(lines) + "\n")
    else:
        report = {
            "matrix_id": doc.matrix_id,
            "prime": doc.prime,
            "dim": doc.dim,
            "target": target,
            "summary": {
                name: {
                    "max_residual_exponent": encode_exponent(e["max_residual_exponent"]),
                    "min_certificate": encode_exponent(e["min_certificate"]),
                    "ok": e["ok"],
                    "count": e["count"],
                }
                for name, e in summary.items()
            },
            "residuals": [dict(r.to_dict(), mu_valuation=v) for v, r in residuals],
            "ok": ok,
        }
        _emit(config, dumps_report(report))
    print("all residuals within certificates" if ok else "identity residual exceeds its certificate", file=sys.stderr)
    return EXIT_OK if ok else EXIT_ENGINE_FAULT


def cmd_scan(config: RunConfig, path: Path) -> int:
    doc, a, grid, target = _load(config, path)
    report = resolvent_contraction_check(a, grid, config.K, target, matrix_id=doc.matrix_id, jobs=config.jobs)
    if config.fmt == "tabular":
        _emit(config, records_to_csv(report.records))
    else:
        _emit(config, dumps_report(report.to_dict()))
    return EXIT_OK


def cmd_selftest(config: RunConfig) -> int:
    suites = run_selftest(
        seed=config.seed,
        target=config.target,
        precision=config.working_precision,
        K=config.K,
        M=config.M,
    )
    lines = [s.line() for s in suites]
    for s in suites:
        lines.extend(f"    {note}" for note in s.notes[:5])
    _emit(config, "\n".join(lines) + "\n")
    if any(s.precision_errors for s in suites):
        return EXIT_PRECISION
    return EXIT_OK if all(s.ok for s in suites) else EXIT_FAILURE


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    set_truncation_fault(args.inject_fault)
    try:
        config = _config(args, args.command)
        if args.command == "selftest":
            return cmd_selftest(config)
        handler = {"check": cmd_check, "verify-identities": cmd_verify_identities, "scan": cmd_scan}[args.command]
        return handler(config, args.matrix)
    except (InputError, PadicDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PrecisionError as exc:
        print(f"precision error: {exc} (achievable exponent {exc.achievable})", file=sys.stderr)
        return EXIT_PRECISION
    except EngineFault as exc:
        print(f"engine fault: {exc}", file=sys.stderr)
        return EXIT_ENGINE_FAULT
    finally:
        set_truncation_fault(False)


if __name__ == "__main__":
    sys.exit(main())
