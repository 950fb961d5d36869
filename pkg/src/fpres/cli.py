"""Batch command line interface with JSON I/O and run manifests.

Commands: generate, tensor, currents, extend, validate, fusion. Every
file-writing command also writes a manifest with input and output hashes
plus the convention settings, so a rerun can be checked byte for byte.
Exit codes: 0 success, 1 validation failure, 2 usage or input error,
3 resource limit.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from . import __version__
from .currents import (
    Theory,
    bundle_to_document,
    load_bundle,
)
from .errors import (
    InvalidInputError,
    ResourceLimitError,
)
from .extend import extend
from .modular import fusion_matrix, load, save, tensor
from .phases import norm1
from .validate import check_fusion_integrality, condition_report
from .wzw import ising, su2, sun


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_json(doc: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def _emit(doc: dict, out) -> list:
    if out is None:
        json.dump(doc, sys.stdout, indent=1)
        sys.stdout.write("\n")
        return []
    _write_json(doc, out)
    return [out]


def _manifest(args, inputs, outputs, anchor) -> None:
    doc = {
        "format": "run-manifest v1",
        "tool": {"name": "fpres", "version": __version__},
        "command": [args.command] + args.manifest_args,
        "conventions": {
            "tolerance": getattr(args, "tolerance", None),
            "seed": getattr(args, "seed_conventions", None),
            "floats": "shortest round-trip decimal",
            "rationals": "p/q strings",
        },
        "inputs": {p: _sha256(p) for p in inputs},
        "outputs": {p: _sha256(p) for p in outputs},
    }
    if os.path.isdir(anchor):
        path = os.path.join(anchor, "manifest.json")
    else:
        path = anchor + ".manifest.json"
    _write_json(doc, path)


def _parse_current(md, token: str) -> int:
    try:
        return int(token)
    except ValueError:
        pass
    try:
        parsed = json.loads(token)
    except json.JSONDecodeError:
        parsed = token
    if isinstance(parsed, list):
        parsed = _untuple(parsed)
    return md.index(parsed)


def _untuple(x):
    if isinstance(x, list):
        return tuple(_untuple(v) for v in x)
    return x


# --- commands -------------------------------------------------------------


def cmd_generate(args) -> int:
    cache = args.cache_dir or os.environ.get("FPRES_CACHE_DIR")
    if args.family == "su2":
        if args.k is None:
            raise InvalidInputError("su2 needs --k")
        md = su2(args.k)
    elif args.family == "suN":
        if args.n is None or args.k is None:
            raise InvalidInputError("suN needs --n and --k")
        md = sun(args.n, args.k, cache_dir=cache)
    else:
        md = ising()
    save(md, args.out)
    _manifest(args, [], [args.out], args.out)
    return 0


def cmd_tensor(args) -> int:
    mds = [load(p) for p in args.inputs]
    save(tensor(*mds), args.out)
    _manifest(args, args.inputs, [args.out], args.out)
    return 0


def cmd_currents(args) -> int:
    md = load(args.input)
    th = Theory(md, tol=args.tolerance)
    doc = {
        "format": "current-report v1",
        "name": md.name,
        "center_orders": list(th.center.orders),
        "currents": [
            {
                "id": j,
                "label": _label_json(md.labels[j]),
                "h": str(md.h[j]),
                "order": th.current_order(j),
                "integer_spin": norm1(md.h[j]) == 0,
            }
            for j in th.center.elements
        ],
    }
    outputs = _emit(doc, args.out)
    if args.out:
        _manifest(args, [args.input], outputs, args.out)
    return 0


def _label_json(lab):
    from .modular import _label_to_json

    return _label_to_json(lab)


def cmd_extend(args) -> int:
    md = load(args.input)
    extra = [load_bundle(md, p) for p in args.bundles]
    th = Theory(md, tol=args.tolerance, extra_bundles=extra)
    gens = [_parse_current(md, g) for g in args.by]
    ex = extend(th, gens, convention_seed=args.seed_conventions)

    os.makedirs(args.out, exist_ok=True)
    ext_path = os.path.join(args.out, "extended.json")
    save(ex.ext_md, ext_path)
    outputs = [ext_path]

    bundles = []
    for cls in ex.residual_classes():
        if cls.order == 1:
            continue
        res = ex.resolve(cls)
        bundles.append(res.bundle)
        path = os.path.join(args.out, f"bundle_{res.bundle.current}.json")
        _write_json(bundle_to_document(ex.ext_md, res.bundle), path)
        outputs.append(path)

    th2 = ex.extended_theory(extra_bundles=bundles)
    conditions = condition_report(th2, tol=args.tolerance)
    fus = check_fusion_integrality(ex.ext_md)
    report = {
        "format": "extension-report v1",
        "extension": ex.report(),
        "conditions": conditions,
        "fusion": fus,
    }
    report_path = os.path.join(args.out, "report.json")
    _write_json(report, report_path)
    outputs.append(report_path)
    _manifest(args, [args.input] + list(args.bundles), outputs, args.out)
    return 0 if conditions["ok"] and fus["ok"] else 1


def cmd_validate(args) -> int:
    md = load(args.input)
    extra = [load_bundle(md, p) for p in args.bundles]
    th = Theory(md, tol=args.tolerance, extra_bundles=extra)
    currents = [b.current for b in extra] or None
    doc = condition_report(th, currents=currents, tol=args.tolerance)
    outputs = _emit(doc, args.out)
    if args.out:
        _manifest(args, [args.input] + list(args.bundles), outputs, args.out)
    return 0 if doc["ok"] else 1


def cmd_fusion(args) -> int:
    md = load(args.input)
    if md.size > args.max_fields:
        raise ResourceLimitError(
            f"{md.size} fields exceeds --max-fields {args.max_fields}"
        )
    tables = [fusion_matrix(md, a).tolist() for a in range(md.size)]
    doc = {
        "format": "fusion-table v1",
        "name": md.name,
        "fields": [_label_json(lab) for lab in md.labels],
        "tables": tables,
    }
    outputs = _emit(doc, args.out)
    if args.out:
        _manifest(args, [args.input], outputs, args.out)
    return 0


# --- argument parsing -----------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="fpres",
        description="simple-current extensions and fixed-point resolution",
    )
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write modular data for a family")
    p.add_argument("family", choices=["su2", "suN", "ising"])
    p.add_argument("--N", "--n", dest="n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--cache-dir")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("tensor", help="tensor several modular data files")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tensor)

    p = sub.add_parser("currents", help="list the simple currents")
    p.add_argument("input")
    p.add_argument("--tolerance", type=float, default=1e-8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_currents)

    p = sub.add_parser("extend", help="extend by currents and resolve")
    p.add_argument("input")
    p.add_argument("--by", action="append", required=True,
                   help="generator: field id or exact label (repeatable)")
    p.add_argument("--bundles", nargs="*", default=[])
    p.add_argument("--tolerance", type=float, default=1e-8)
    p.add_argument("--seed-conventions", type=int)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("validate", help="run the condition report")
    p.add_argument("input")
    p.add_argument("--bundles", nargs="*", default=[])
    p.add_argument("--tolerance", type=float, default=1e-8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("fusion", help="full Verlinde fusion table")
    p.add_argument("input")
    p.add_argument("--max-fields", type=int, default=128)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fusion)
    return top


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    args.manifest_args = argv[1:]
    try:
        return args.func(args)
    except (InvalidInputError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceLimitError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 3
    except ArithmeticError as exc:
        print(f"validation failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
