"""Command-line entry point: ``freediv <verb> [flags]``; every verb prints JSON."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Sequence

from . import factor as fz
from .errors import (
    ExistenceConditionViolated,
    FreeDivError,
    NotATower,
    NotSkew,
    NotSymmetric,
    ShapeError,
    SizeTooSmall,
    UnknownFamily,
)
from .saito import (
    DivisorReport,
    SaitoMatrix,
    assemble,
    classify,
    expected_classification,
    tower_step,
)
from .spaces import CLI_NAMES, MIN_M, build_family, canonical_name
from .vfields import BracketReport, verify_bracket_closure

SCHEMA = "freediv/1"

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_CONDITION = 3

# sizes exercised by ``verify --all``; matches the acceptance grid
GRID: dict[str, range] = {
    "Sym": range(1, 6),
    "GenLU": range(1, 5),
    "SkewD": range(2, 6),
    "SkewG": range(3, 6),
    "ModLU": range(2, 5),
    "ModLURect": range(2, 5),
    "SkewNonlinear": range(3, 7),
    "SymRestrict1": range(3, 6),
    "SymRestrict2": range(4, 6),
    "GenRestrict": range(3, 5),
    "GenRestrictRect": range(3, 5),
    "SymExtension": range(3, 6),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


# -- serialization ---------------------------------------------------------------------


def _frac(c: Fraction | None) -> str | None:
    if c is None:
        return None
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def saito_json(S: SaitoMatrix) -> dict:
    return {
        "rows": S.matrix.rows,
        "cols": S.matrix.cols,
        "row_labels": [str(v) for v in S.row_labels],
        "col_labels": list(S.col_labels),
        "block_sizes": list(S.block_sizes),
        "entries": [[p.to_text() for p in row] for row in S.matrix.tolist()],
    }


def report_json(r: DivisorReport) -> dict:
    return {
        "family": CLI_NAMES[r.family],
        "m": r.m,
        "determinant": r.determinant_text(),
        "blocks": [{"label": lab, "poly": b.to_text()} for lab, b in zip(r.block_labels, r.block_dets)],
        "squarefree": r.squarefree,
        "pairwise_coprime": r.pairwise_coprime,
        "classification": r.classification,
        "paper_match": r.paper_match,
        "constant": _frac(r.constant),
    }


def bracket_json(b: BracketReport) -> dict:
    return {
        "family": CLI_NAMES[b.family],
        "m": b.m,
        "closed": b.closed,
        "linear_identity": b.linear_identity,
        "pairs": [
            {"left": p.left, "right": p.right, "verdict": p.verdict, "witness": p.witness, "discrepancy": p.discrepancy}
            for p in b.pairs
        ],
        "discrepancies": len(b.discrepancies),
    }


def dump(obj: dict, pretty: bool) -> str:
    obj = {"schema": SCHEMA, **obj}
    if pretty:
        return json.dumps(obj, sort_keys=True, indent=2)
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


# -- verbs -----------------------------------------------------------------------------


def verify_one(name: str, m: int) -> dict:
    """Run every check for one family and size; ``ok`` is the conjunction of the verdicts."""
    fam = build_family(name, m)
    S = assemble(fam)
    br = verify_bracket_closure(fam)
    rep = classify(S, fam)
    expected = expected_classification(fam)
    try:
        ts = tower_step(fam.name, m)
        tower = {"ok": ts.ok, "constant": _frac(ts.constant), "new_blocks": ts.new_blocks}
    except NotATower:
        tower = None
    verdicts = {
        "bracket_closed": br.closed,
        "linear_identity": br.linear_identity,
        "paper_match": rep.paper_match,
        "full_check": rep.full_check,
        "classification_match": rep.classification == expected,
        "tower_step": True if tower is None else tower["ok"],
    }
    if rep.reduced_match is not None:
        verdicts["reduced_match"] = rep.reduced_match
    failing = sorted(k for k, v in verdicts.items() if not v)
    return {
        "family": fam.cli_name,
        "m": m,
        "classification": rep.classification,
        "expected_classification": expected,
        "verdicts": verdicts,
        "tower": tower,
        "failing": failing,
        "ok": not failing,
    }


def _verify_task(args: tuple[str, int]) -> dict:
    return verify_one(*args)


def cmd_verify(ns) -> tuple[int, dict]:
    if ns.all:
        tasks = [(name, m) for name in GRID for m in GRID[name]]
        if ns.jobs > 1:
            with ProcessPoolExecutor(max_workers=ns.jobs) as ex:
                results = list(ex.map(_verify_task, tasks))
        else:
            results = [_verify_task(t) for t in tasks]
        ok = all(r["ok"] for r in results)
        return (EXIT_OK if ok else EXIT_FAIL), {"ok": ok, "results": results}
    _need(ns, "family", "m")
    res = verify_one(ns.family, ns.m)
    return (EXIT_OK if res["ok"] else EXIT_FAIL), res


def cmd_tower_gen(ns) -> tuple[int, dict]:
    _need(ns, "family", "m")
    fam = build_family(ns.family, ns.m)
    S = assemble(fam)
    return EXIT_OK, {"saito_matrix": saito_json(S), "report": report_json(classify(S, fam))}


def cmd_bracket_table(ns) -> tuple[int, dict]:
    _need(ns, "family", "m")
    br = verify_bracket_closure(build_family(ns.family, ns.m))
    code = EXIT_OK if br.closed and br.linear_identity else EXIT_FAIL
    return code, bracket_json(br)


def _read_matrix(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    return fz.matrix_from_json(obj)


def cmd_factor(ns) -> tuple[int, dict]:
    _need(ns, "type", "input")
    A = _read_matrix(ns.input)
    tol = ns.tol if ns.tol is not None else None
    f = fz.factorize(ns.type, A, tol=tol)
    return EXIT_OK, {"factorization": fz.factorization_to_json(f)}


def cmd_conditions(ns) -> tuple[int, dict]:
    _need(ns, "type", "input")
    A = _read_matrix(ns.input)
    conds = fz.existence_conditions(ns.type, A)
    return EXIT_OK, {
        "kind": ns.type,
        "minors": [{"minor": n, "value": [v.real, v.imag]} for n, v in conds],
    }


VERBS = {
    "tower-gen": cmd_tower_gen,
    "verify": cmd_verify,
    "bracket-table": cmd_bracket_table,
    "factor": cmd_factor,
    "conditions": cmd_conditions,
}


def _need(ns, *names: str) -> None:
    missing = [n for n in names if getattr(ns, n) is None]
    if missing:
        raise UsageError(f"{ns.verb} needs " + ", ".join("--" + n for n in missing))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="freediv", description="Free divisor certificates and structured factorizations.")
    p.add_argument("verb", choices=sorted(VERBS))
    p.add_argument("--family", help="family name, e.g. sym, gen-lu, skew-nonlinear")
    p.add_argument("--m", type=int, help="size parameter")
    p.add_argument("--all", action="store_true", help="verify every family over the acceptance grid")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for verify --all")
    p.add_argument("--type", choices=fz.KINDS, help="factorization kind")
    p.add_argument("--input", help="matrix JSON file")
    p.add_argument("--output", help="write JSON here instead of stdout")
    p.add_argument("--tol", type=float, help="relative pivot tolerance (default SAITO_TOL or 1e-12)")
    p.add_argument("--pretty", action="store_true", help="indented JSON")
    return p


def run(argv: Sequence[str] | None = None) -> tuple[int, str]:
    """Execute one command; returns (exit code, JSON text)."""
    try:
        ns = build_parser().parse_args(list(argv) if argv is not None else None)
        if ns.family is not None:
            ns.family = canonical_name(ns.family)
            if ns.m is not None and ns.m < MIN_M[ns.family]:
                raise UsageError(f"{ns.family} needs m >= {MIN_M[ns.family]}")
        code, payload = VERBS[ns.verb](ns)
        pretty = ns.pretty
    except UsageError as exc:
        return EXIT_USAGE, dump({"error": "usage", "message": str(exc)}, False)
    except ExistenceConditionViolated as exc:
        val = complex(exc.value)
        return EXIT_CONDITION, dump(
            {"error": "existence-condition", "minor": exc.minor, "value": [val.real, val.imag]}, False
        )
    except (UnknownFamily, SizeTooSmall, ShapeError, NotSymmetric, NotSkew) as exc:
        return EXIT_USAGE, dump({"error": type(exc).__name__, "message": str(exc)}, False)
    except FreeDivError as exc:
        return EXIT_FAIL, dump({"error": type(exc).__name__, "message": str(exc)}, False)
    text = dump(payload, pretty)
    if ns.output:
        with open(ns.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    return code, text


def main(argv: Sequence[str] | None = None) -> int:
    code, text = run(argv)
    print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
