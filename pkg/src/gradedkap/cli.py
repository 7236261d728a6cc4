"""Command line entry point: gradedkap {check,atiyah,brackets,verify,cohomology} INPUT."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from . import examples, linfty, suites
from .connections import atiyah_cocycle
from .core import GradedKapError, InternalInconsistency, InvalidInput, NotAnLInftyStructure, SpecParseError
from .functions import check_homological, q_from_spec
from .kapranov import extract_R, r_recursion
from .report import encode

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_INCONSISTENT = 0, 1, 2, 3
DEFAULT_ARITY, DEFAULT_WEIGHT = 4, 6


@dataclass
class RunConfig:
    input: str
    command: str
    arity_cap: int | None = None
    weight_cap: int | None = None
    format: str = "json"
    output: str | None = None
    suite: str = "all"
    module: str = "trivial"
    degree: int = 0


def load_document(source: str):
    """A path, "-" for stdin, or builtin:NAME."""
    if source.startswith("builtin:"):
        name = source.split(":", 1)[1]
        try:
            return examples.document(name)
        except KeyError:
            raise SpecParseError(f"unknown builtin {name!r}; known: {', '.join(examples.names())}",
                                 source) from None
    try:
        if source == "-":
            return sys.stdin.read()
        return Path(source).read_text(encoding="utf-8")
    except OSError as e:
        raise SpecParseError(f"cannot read input: {e.strerror}", source) from None
    except UnicodeDecodeError:
        raise SpecParseError("input is not UTF-8", source) from None


def _caps(cfg: RunConfig, options: dict) -> tuple[int, int]:
    trunc = options.get("truncation") or {}
    K = cfg.arity_cap or trunc.get("arity") or DEFAULT_ARITY
    N = cfg.weight_cap or trunc.get("weight") or DEFAULT_WEIGHT
    return K, N


def _homological(spec, chart):
    try:
        Q = q_from_spec(spec, chart)
    except NotAnLInftyStructure as e:
        j, f = e.witness
        return None, {"ok": False, "witness": {"generator": spec.names[j], "defect": f}}
    ok, w = check_homological(Q)
    return Q, {"ok": ok, "witness": None if ok else {"generator": spec.names[w[0]], "defect": w[1]}}


def run(cfg: RunConfig) -> tuple[dict, int]:
    spec, options = linfty.parse_spec(load_document(cfg.input))
    chart = spec.chart()
    conn = linfty.parse_connection(spec, chart, options["connection"])
    K, N = _caps(cfg, options)
    report: dict = {"command": cfg.command, "spec": linfty.spec_document(spec),
                    "connection": options["connection"] or {"type": "trivial"}}
    if cfg.command in ("brackets", "verify") and (K < 2 or N < 2):
        raise InvalidInput("arity and weight caps must be at least 2")
    Q, hom = _homological(spec, chart)
    report["homological"] = hom
    status = EXIT_OK if hom["ok"] else EXIT_FAIL

    if cfg.command == "check" or Q is None:
        if Q is None and cfg.command == "verify":
            report["caps"] = {"arity": K, "weight": N}
            report["suites"] = suites.run_suites(spec, conn, cfg.suite, K, N)
        return report, status

    if cfg.command == "atiyah":
        at = atiyah_cocycle(Q, conn)
        cap = None if all(chart.odd) and cfg.weight_cap is None else N
        cls = linfty.atiyah_class_is_zero(spec, conn, cap)
        report["atiyah_cocycle"] = at
        report["atiyah_class"] = {"zero": cls["zero"], "exact": cls["exact"], "weight_cap": cap,
                                  "witness": cls["witness"], "certificate": _certificate(spec, cls["certificate"])}
        if cls["zero"] and cls["witness"] is not None and not cls["witness"].is_zero():
            w = linfty.witness_connection(conn, cls["witness"])
            report["atiyah_class"]["witness_cocycle_zero"] = atiyah_cocycle(Q, w).is_zero()
        return report, status

    if cfg.command == "brackets":
        tower = extract_R(Q, conn, K)
        rec = r_recursion(Q, conn, K)
        for k in range(2, K + 1):
            if tower[k] != rec[k]:
                raise InternalInconsistency(f"R_{k}: extraction and recursion disagree", tower[k], rec[k])
        report["caps"] = {"arity": K}
        report["tower"] = {str(k): tower[k] for k in range(2, K + 1)}
        report["routes_agree"] = True
        return report, status

    if cfg.command == "verify":
        results = suites.run_suites(spec, conn, cfg.suite, K, N)
        report["caps"] = {"arity": K, "weight": N}
        report["suites"] = results
        if any(r["ok"] is False for r in results):
            status = EXIT_FAIL
        return report, status

    if cfg.command == "cohomology":
        cap = cfg.weight_cap if cfg.weight_cap else (None if all(chart.odd) else N)
        res = linfty.ce_cohomology(spec, cfg.module, cfg.degree, cap)
        res["approximate"] = not res.pop("exact")
        report["cohomology"] = res
        return report, status

    raise InvalidInput(f"unknown command {cfg.command!r}")


def _certificate(spec, cert):
    if not cert:
        return None
    return {f"{spec.names[i]},{spec.names[j]} -> {spec.names[l]} [{'*'.join(spec.names[a] for a in m) or '1'}]": y
            for (i, j, l, m), y in cert.items()}


# ---------------------------------------------------------------- rendering

def render_text(report: dict) -> str:
    lines = [f"command: {report.get('command')}"]
    spec = report.get("spec")
    if spec:
        gens = ", ".join(f"{g['name']}:{g['degree']}" for g in spec["generators"])
        lines.append(f"spec: {spec.get('name') or '(unnamed)'} [{gens}]")
    if "error" in report:
        e = report["error"]
        lines.append(f"error ({e['kind']}): {e['message']}")
        if e.get("location"):
            lines.append(f"  at {e['location']}")
        if "left" in e:
            lines.append(f"  left:  {json.dumps(e['left'])}")
            lines.append(f"  right: {json.dumps(e['right'])}")
        return "\n".join(lines) + "\n"
    hom = report["homological"]
    lines.append(f"homological: {'PASS' if hom['ok'] else 'FAIL'}")
    if not hom["ok"]:
        lines.append(f"  witness: {json.dumps(hom['witness'])}")
    if "atiyah_cocycle" in report:
        at = report["atiyah_cocycle"]
        lines.append("atiyah cocycle: " + ("0" if not at else ""))
        for k, v in at.items():
            lines.append(f"  At({k}) = {_terms(v)}")
        cls = report["atiyah_class"]
        lines.append(f"atiyah class: {'zero' if cls['zero'] else 'nonzero'}"
                     + ("" if cls["exact"] else f" (weight cap {cls['weight_cap']})"))
    if "tower" in report:
        for k, R in report["tower"].items():
            lines.append(f"R_{k}:" + (" 0" if not R else ""))
            for I, v in R.items():
                lines.append(f"  R_{k}({I}) = {_terms(v)}")
    if "suites" in report:
        for r in report["suites"]:
            mark = {True: "PASS", False: "FAIL", None: "SKIP"}[r["ok"]]
            extra = f" ({r['note']})" if r.get("note") else ""
            lines.append(f"{mark} {r['suite']}: {r['check']} [{r['checked']} inputs]{extra}")
            if r["ok"] is False:
                lines.append(f"  witness: {json.dumps(r['witness'])}")
    if "cohomology" in report:
        c = report["cohomology"]
        tag = " (approximate, weight cap %d)" % c["weight_cap"] if c["approximate"] else ""
        lines.append(f"H^{c['degree']}({c['module']}) = {c['dimension']}{tag}")
        for rep in c["representatives"]:
            lines.append(f"  {_terms(rep)}")
    return "\n".join(lines) + "\n"


def _terms(d: dict) -> str:
    if not d:
        return "0"
    return " + ".join(f"({c}) {k}" for k, c in d.items())


# ---------------------------------------------------------------- argv

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gradedkap", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("input", help="spec document path, '-' for stdin, or builtin:NAME")
        sp.add_argument("--format", choices=("json", "text"), default="json")
        sp.add_argument("--output", help="write the report here instead of stdout")
        sp.add_argument("--weight-cap", type=int, dest="weight_cap")

    common(sub.add_parser("check", help="[Q,Q] = 0"))
    common(sub.add_parser("atiyah", help="Atiyah cocycle and class"))
    sp = sub.add_parser("brackets", help="R tower by extraction and by recursion")
    common(sp)
    sp.add_argument("--max-arity", type=int, dest="arity_cap")
    sp = sub.add_parser("verify", help="run verification suites")
    common(sp)
    sp.add_argument("--suite", choices=("all",) + suites.SUITES, default="all")
    sp.add_argument("--max-arity", type=int, dest="arity_cap")
    sp = sub.add_parser("cohomology", help="Chevalley-Eilenberg cohomology")
    common(sp)
    sp.add_argument("--module", choices=linfty.CEModule.TAGS, default="trivial")
    sp.add_argument("--degree", type=int, required=True)
    sub.add_parser("examples", help="list builtin documents")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "examples":
        print("\n".join(examples.names()))
        return EXIT_OK
    cfg = RunConfig(input=args.input, command=args.command, arity_cap=getattr(args, "arity_cap", None),
                    weight_cap=args.weight_cap, format=args.format, output=args.output,
                    suite=getattr(args, "suite", "all"), module=getattr(args, "module", "trivial"),
                    degree=getattr(args, "degree", 0))
    try:
        report, status = run(cfg)
    except SpecParseError as e:
        report, status = {"command": cfg.command, "error": {"kind": "parse", "message": str(e),
                                                            "location": e.location}}, EXIT_PARSE
    except InvalidInput as e:
        report, status = {"command": cfg.command, "error": {"kind": "input", "message": str(e)}}, EXIT_PARSE
    except InternalInconsistency as e:
        report, status = {"command": cfg.command, "error": {"kind": "internal-inconsistency", "message": str(e),
                                                            "left": e.left, "right": e.right}}, EXIT_INCONSISTENT
    except GradedKapError as e:
        report, status = {"command": cfg.command, "error": {"kind": "error", "message": str(e)}}, EXIT_FAIL
    data = encode(report)
    text = json.dumps(data, indent=2) + "\n" if cfg.format == "json" else render_text(data)
    if cfg.output:
        Path(cfg.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if "error" in data:
        print(f"gradedkap: {data['error']['message']}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
