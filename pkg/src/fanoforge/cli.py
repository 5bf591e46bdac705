"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 domain error (JSON diagnostic on stderr).
"""
import argparse
import json
import sys
from fractions import Fraction

from . import laurent, pipeline, polytope, store
from .errors import FanoForgeError, IoFailure, SchemaViolation
from .inversion import CIModel, Scaffolding, enumerate_towers, ghv_mirrors, reconstruct
from .mmlp import find_rigid_mmlps, orbit_classes
from .mutation import MutationData, mutate


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def _num(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _dump(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _read_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise IoFailure(str(exc)) from None
    except json.JSONDecodeError as exc:
        raise SchemaViolation(f"{path}: {exc}") from None


def _read_poly(path):
    obj = _read_json(path)
    try:
        if isinstance(obj, dict) and "expr" in obj:
            return laurent.parse(obj["expr"], obj.get("vars"))
        return laurent.from_json(obj)
    except (KeyError, TypeError, ValueError, SyntaxError) as exc:
        raise SchemaViolation(f"{path}: not a Laurent polynomial ({exc})") from None


def _poly_out(f):
    out = laurent.to_json(f)
    out["text"] = str(f)
    return out


def _write(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(str(exc)) from None


def cmd_period(a):
    f = _read_poly(a.input)
    for c in laurent.classical_period(f, a.terms):
        print(_num(c))


def cmd_mutate(a):
    f = _read_poly(a.input)
    obj = _read_json(a.mutation)
    try:
        m = MutationData.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaViolation(f"{a.mutation}: not mutation data ({exc})") from None
    _write(_dump(_poly_out(mutate(f, m))) + "\n", a.out)


def cmd_mmlp(a):
    obj = _read_json(a.polytope)
    try:
        p = polytope.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaViolation(f"{a.polytope}: not a polytope ({exc})") from None
    fs = find_rigid_mmlps(p)
    out = {"mmlps": [_poly_out(f) for f in fs]}
    if a.orbits:
        aut = polytope.automorphisms(p)
        pos = {f: i for i, f in enumerate(fs)}
        out["orbits"] = [[pos[g] for g in orb] for orb in orbit_classes(fs, aut)]
    print(_dump(out))


def cmd_invert(a):
    obj = _read_json(a.scaffolding)
    try:
        s = Scaffolding.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaViolation(f"{a.scaffolding}: not a scaffolding ({exc})") from None
    model = reconstruct(s)
    if a.format == "json":
        print(_dump(model.to_json()))
        return
    print("weights")
    for row in model.weights:
        print(" ".join(str(x) for x in row))
    print("rays")
    for row in model.rays:
        print(" ".join(str(x) for x in row))
    print("partition " + " | ".join(" ".join(str(j + 1) for j in p) for p in model.partition))
    for i, b in enumerate(model.bundles, 1):
        print(f"L{i} " + " ".join(str(x) for x in b))


def cmd_towers(a):
    obj = _read_json(a.model)
    try:
        model = CIModel.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaViolation(f"{a.model}: not a model ({exc})") from None
    towers = enumerate_towers(model, a.bound)
    print(_dump([[list(r) for r in t] for t in towers]))


def cmd_ghv(a):
    w = _read_json(a.weights)
    if isinstance(w, dict):
        w = w.get("weights")
    try:
        d = tuple(int(x) for x in a.bundle.split(","))
    except ValueError:
        raise UsageError(f"--bundle expects comma-separated integers, got {a.bundle!r}") from None
    if not isinstance(w, list) or len(d) != len(w):
        raise SchemaViolation("weights must be a matrix with one row per bundle coordinate")
    out = []
    for f, sc, model in ghv_mirrors(w, d, a.bound, first_only=not a.all):
        out.append({"polynomial": _poly_out(f), "scaffolding": sc.to_json(),
                    "partition": [list(p) for p in model.partition],
                    "tower": [list(r) for r in model.tower]})
    print(_dump(out))


def cmd_pipeline(a):
    cfg = pipeline.SampleConfig(seed=a.seed, count=a.samples, entry_max=a.entry_max,
                                period_depth=a.depth, tower_bound=a.tower_bound)
    lookup = store.HilbertLookup.from_file(a.hilbert_db) if a.hilbert_db else None
    jobs = a.jobs or pipeline.default_jobs()
    counts = {"samples": 0, "step2": 0, "step3": 0, "step4": 0, "step5": 0}

    def lines():
        for line in pipeline.run_lines(cfg, jobs, lookup):
            rec = json.loads(line)
            counts["samples"] += 1
            for k in ("step2", "step3", "step4", "step5"):
                if rec["verdicts"].get(k, {}).get("pass"):
                    counts[k] += 1
            yield line

    try:
        pipeline.write_records(lines(), a.out)
    except OSError as exc:
        raise IoFailure(str(exc)) from None
    print(_dump(counts))


def _load_records(path):
    return store.load(path).records


def cmd_classify(a):
    recs = _load_records(a.inp)
    classes = pipeline.classify(recs, a.depth, survivors_only=not a.all)
    for key, members in classes.items():
        print(_dump({"period": [_num(x) for x in key], "size": len(members),
                     "indices": [recs[i]["index"] for i in members]}))


def cmd_heatmap(a):
    recs = _load_records(a.inp)
    _write(pipeline.heatmap(recs, survivors_only=not a.all), a.out)


def build_parser():
    p = _Parser(prog="fanoforge", description="Laurent polynomial mirrors of Fano varieties")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    s = sub.add_parser("period", help="classical period sequence")
    s.add_argument("--input", required=True)
    s.add_argument("--terms", type=int, required=True)
    s.set_defaults(func=cmd_period)

    s = sub.add_parser("mutate", help="apply a mutation")
    s.add_argument("--input", required=True)
    s.add_argument("--mutation", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_mutate)

    s = sub.add_parser("mmlp", help="rigid maximally mutable polynomials on a polytope")
    s.add_argument("--polytope", required=True)
    s.add_argument("--orbits", action="store_true")
    s.set_defaults(func=cmd_mmlp)

    s = sub.add_parser("invert", help="toric complete intersection from a scaffolding")
    s.add_argument("--scaffolding", required=True)
    s.add_argument("--format", choices=("json", "text"), default="json")
    s.set_defaults(func=cmd_invert)

    s = sub.add_parser("towers", help="towers of bundles for a model")
    s.add_argument("--model", required=True)
    s.add_argument("--bound", type=int, default=6)
    s.set_defaults(func=cmd_towers)

    s = sub.add_parser("ghv", help="hypersurface mirrors from weights and a bundle")
    s.add_argument("--weights", required=True)
    s.add_argument("--bundle", required=True)
    s.add_argument("--bound", type=int, default=6)
    s.add_argument("--all", action="store_true", help="every tower, not only the first")
    s.set_defaults(func=cmd_ghv)

    s = sub.add_parser("pipeline", help="randomised hypersurface search")
    s.add_argument("--samples", type=int, required=True)
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--hilbert-db")
    s.add_argument("--jobs", type=int)
    s.add_argument("--entry-max", type=int, default=6)
    s.add_argument("--depth", type=int, default=10)
    s.add_argument("--tower-bound", type=int, default=6)
    s.set_defaults(func=cmd_pipeline)

    s = sub.add_parser("classify", help="bucket records by period")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--depth", type=int, default=10)
    s.add_argument("--all", action="store_true", help="include non-survivors with a period")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("heatmap", help="counts per (genus, Hilbert prefix)")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out")
    s.add_argument("--all", action="store_true")
    s.set_defaults(func=cmd_heatmap)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "jobs", None) is not None and args.jobs < 1:
            raise UsageError("--jobs must be positive")
        if getattr(args, "samples", None) is not None and args.samples < 0:
            raise UsageError("--samples must be nonnegative")
        args.func(args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except FanoForgeError as exc:
        print(_dump({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
