"""Randomised search for toric hypersurface candidates in rank-2 ambient spaces.

Each sample index is processed independently from its own counter-based
random stream, so output depends only on (seed, index) and records come out
in index order whatever the number of workers.
"""
import csv
import io
import json
import logging
import multiprocessing
import os
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from . import intlin, laurent, polytope
from .errors import FanoForgeError
from .inversion import CIModel, Scaffolding, ghv_mirrors, models_equivalent, reconstruct
from .mmlp import is_rigid_mmlp
from .mutation import MutationData, is_mutable
from .toric import (SecondaryFan, ToricModel, anticanonical, isolated_singularities,
                    singular_strata_report)

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
ROWS, COLS = 2, 6


@dataclass(frozen=True)
class SampleConfig:
    seed: int
    count: int
    entry_max: int = 6
    period_depth: int = 10
    tower_bound: int = 6
    hilbert_k: int = 5

    def __post_init__(self):
        if self.count < 0 or self.entry_max < 0:
            raise ValueError("count and entry_max must be nonnegative")


def sample(config, index):
    """(w, d) with entries uniform on 0..entry_max, from the Philox stream keyed by (seed, index)."""
    key = np.array([config.seed & (2 ** 64 - 1), index & (2 ** 64 - 1)], dtype=np.uint64)
    rng = np.random.Generator(np.random.Philox(key=key))
    vals = rng.integers(0, config.entry_max + 1, size=ROWS * COLS + ROWS).tolist()
    w = tuple(tuple(vals[i * COLS:(i + 1) * COLS]) for i in range(ROWS))
    d = tuple(vals[ROWS * COLS:])
    return w, d


def _verdict(ok, reason=None, **extra):
    out = {"pass": bool(ok)}
    if reason:
        out["reason"] = reason
    out.update(extra)
    return out


def step2_filter(w, d):
    """Q-factoriality proxy, nef bundle, ample anticanonical-minus-bundle."""
    w = intlin.as_matrix(w)
    if intlin.rank(w) != len(w):
        return _verdict(False, "weight matrix is rank deficient")
    if any(not any(col) for col in zip(*w)):
        return _verdict(False, "zero weight column: ambient space is not complete")
    fan = SecondaryFan(w)
    k = anticanonical(w)
    chamber = fan.chamber_of(k)
    if chamber is None:
        return _verdict(False, "anticanonical class not interior to a chamber (not Q-factorial)")
    # each coordinate must give a ray, i.e. avoid some chart; otherwise the rank drops
    if any(all(j in s for s in chamber) for j in range(len(w[0]))):
        return _verdict(False, "a weight column does not give a ray of the fan")
    if not fan.in_closed_chamber(chamber, d):
        return _verdict(False, "bundle is not nef")
    rest = tuple(a - b for a, b in zip(k, d))
    if not fan.in_open_chamber(chamber, rest):
        return _verdict(False, "anticanonical minus bundle is not ample")
    return _verdict(True)


def pass_through(w, d):
    return True


def period_gcd(seq):
    g = 0
    for n, c in enumerate(seq):
        if n and c:
            g = gcd(g, n)
    return g


def _json_number(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else str(x)
    return x


def step3_filter(w, d, config, lookup=None, divisibility=pass_through):
    """(verdict, extras) where extras holds the mirror, scaffolding, period and Hilbert data."""
    extras = {}
    cols = [tuple(c) for c in zip(*w)]
    if tuple(d) in cols:
        return _verdict(False, "(a) bundle class is a column of the weight matrix"), extras
    mirrors = ghv_mirrors(w, d, config.tower_bound, first_only=True)
    if not mirrors:
        return _verdict(False, "(c) no tower of bundles with a basis"), extras
    f, sc, model = mirrors[0]
    shift = -f.constant_term
    f0 = f + shift
    extras.update(mirror=f, scaffolding=sc, model=model, shift=shift)
    if not polytope.hull(f0.support()).contains_interior((0,) * f0.n_vars):
        return _verdict(False, "(c) origin not interior to the Newton polytope"), extras
    seq = laurent.classical_period(f0, config.period_depth)
    extras["period"] = seq
    g = period_gcd(seq)
    if g != 1:
        return _verdict(False, f"(b) period gcd {g} at depth {config.period_depth}",
                        depth=config.period_depth), extras
    q = polytope.dual(laurent.newton_polytope(f0))
    prefix = polytope.ehrhart_prefix(q, config.hilbert_k - 1)
    extras["hilbert"] = prefix
    extras["genus"] = polytope.genus_from_hilbert(prefix)
    if lookup is None:
        hilbert = "skipped"
    else:
        found, ids = lookup.contains(prefix)
        if not found:
            return _verdict(False, "(d) Hilbert series prefix not in the lookup table",
                            hilbert="absent"), extras
        hilbert = {"ids": ids}
    if not divisibility(w, d):
        return _verdict(False, "(e) divisibility predicate rejected the ambient"), extras
    name = getattr(divisibility, "__name__", "custom")
    return _verdict(True, depth=config.period_depth, hilbert=hilbert,
                    divisibility="pass-through" if divisibility is pass_through else name), extras


def _cert_json(cert):
    return {"mutations": [m.to_json() for m in cert["mutations"]], "rank": cert["rank"],
            "unknowns": cert["unknowns"], "dimension": cert["dimension"],
            "reason": cert["reason"]}


def step4_filter(f):
    """Rigid MMLP test after shifting the constant term to zero."""
    shift = -f.constant_term
    ok, cert = is_rigid_mmlp(f + shift)
    return _verdict(ok, cert["reason"], shift=_json_number(shift)), _cert_json(cert)


def step5_screen(w, d):
    """Toric chart screen: generic-section singularities must be isolated points."""
    model = ToricModel(w, anticanonical(w))
    report = singular_strata_report(model, d)
    iso = isolated_singularities(report)
    data = [s.to_json() for s in report]
    if iso is None:
        return _verdict(False, "positive-dimensional singular locus", method="chart screen"), data
    return _verdict(True, method="chart screen", points=iso[0], indices=iso[1]), data


def process(config, index, lookup=None, divisibility=pass_through):
    """One CandidateRecord as a plain dict."""
    w, d = sample(config, index)
    return evaluate(config, w, d, lookup, divisibility, index=index)


def evaluate(config, w, d, lookup=None, divisibility=pass_through, index=None):
    """Run steps 2-5 on a given (w, d) and return the record."""
    w = tuple(tuple(r) for r in w)
    d = tuple(d)
    rec = {"v": SCHEMA_VERSION, "seed": config.seed, "index": index,
           "w": [list(r) for r in w], "d": list(d), "verdicts": {}, "survivor": False}
    try:
        v = step2_filter(w, d)
        rec["verdicts"]["step2"] = v
        if not v["pass"]:
            return rec
        v, ex = step3_filter(w, d, config, lookup, divisibility)
        rec["verdicts"]["step3"] = v
        if "mirror" in ex:
            rec["mirror"] = laurent.to_json(ex["mirror"])
            rec["scaffolding"] = ex["scaffolding"].to_json()
            rec["model"] = ex["model"].to_json()
        if "period" in ex:
            rec["period"] = [_json_number(x) for x in ex["period"]]
        if "hilbert" in ex:
            rec["hilbert"] = list(ex["hilbert"])
            rec["genus"] = ex["genus"]
        if not v["pass"]:
            return rec
        v, cert = step4_filter(ex["mirror"])
        rec["verdicts"]["step4"] = v
        rec["certificate"] = cert
        if not v["pass"]:
            return rec
        v, report = step5_screen(w, d)
        rec["verdicts"]["step5"] = v
        rec["singularities"] = report
        rec["survivor"] = v["pass"]
    except FanoForgeError as exc:
        step = "step%d" % (len(rec["verdicts"]) + 2)
        rec["verdicts"][step] = _verdict(False, f"{type(exc).__name__}: {exc}")
    return rec


def dumps(rec):
    return json.dumps(rec, sort_keys=True, separators=(",", ":"))


class _Worker:
    def __init__(self, config, lookup, divisibility):
        self.args = (config, lookup, divisibility)

    def __call__(self, index):
        config, lookup, divisibility = self.args
        return dumps(process(config, index, lookup, divisibility))


def default_jobs():
    try:
        return max(1, int(os.environ.get("FANOFORGE_JOBS", "1")))
    except ValueError:
        return 1


def run_lines(config, jobs=None, lookup=None, divisibility=pass_through):
    """Serialised records in index order."""
    jobs = jobs or default_jobs()
    work = _Worker(config, lookup, divisibility)
    if lookup is None:
        log.warning("no Hilbert lookup table given; step 3(d) is skipped")
    if jobs == 1 or config.count < 2:
        for i in range(config.count):
            yield work(i)
        return
    chunk = max(1, min(256, config.count // (jobs * 8) or 1))
    with multiprocessing.Pool(jobs) as pool:
        # imap returns results in submission order
        yield from pool.imap(work, range(config.count), chunksize=chunk)


def run(config, jobs=None, lookup=None, divisibility=pass_through):
    for line in run_lines(config, jobs, lookup, divisibility):
        yield json.loads(line)


def write_records(lines, path):
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for line in lines:
            fh.write(line if isinstance(line, str) else dumps(line))
            fh.write("\n")
            n += 1
    return n


def _period_of(item, depth):
    if isinstance(item, laurent.LaurentPolynomial):
        f = item - item.constant_term
        return tuple(laurent.classical_period(f, depth))
    seq = item.get("period")
    if seq is None:
        return None
    seq = [Fraction(str(x)) for x in seq]
    if len(seq) < depth + 1:
        raise ValueError(f"record {item.get('index')} has a period of depth {len(seq) - 1} < {depth}")
    return tuple(seq[:depth + 1])


def classify(items, depth=10, survivors_only=True):
    """Buckets of items with equal truncated period, keyed by the period tuple.

    Items are records (dicts) or Laurent polynomials. Bucket order follows the
    first occurrence of each period.
    """
    classes = {}
    for pos, item in enumerate(items):
        if isinstance(item, dict) and survivors_only and not item.get("survivor"):
            continue
        key = _period_of(item, depth)
        if key is None:
            continue
        classes.setdefault(key, []).append(pos)
    return classes


def fingerprint(prefix):
    return ";".join(str(x) for x in prefix)


def heatmap(records, survivors_only=True):
    """CSV with counts per (genus, Hilbert prefix fingerprint)."""
    counts = {}
    for rec in records:
        if survivors_only and not rec.get("survivor"):
            continue
        if "hilbert" not in rec:
            continue
        key = (rec["genus"], fingerprint(rec["hilbert"]))
        counts[key] = counts.get(key, 0) + 1
    buf = io.StringIO()
    out = csv.writer(buf, lineterminator="\n")
    out.writerow(["genus", "fingerprint", "count"])
    for (g, fp), n in sorted(counts.items()):
        out.writerow([g, fp, n])
    return buf.getvalue()


def reverify(rec, config=None):
    """Recheck a survivor from its own fields; returns a list of failed checks."""
    bad = []
    w, d = rec["w"], rec["d"]
    if not step2_filter(w, d)["pass"]:
        bad.append("step2")
    k = anticanonical(w)
    model = ToricModel(w, k)
    if not model.is_nef(d) or not model.is_ample([a - b for a, b in zip(k, d)]):
        bad.append("nef/ample")
    sc = Scaffolding.from_json(rec["scaffolding"])
    rebuilt = reconstruct(sc)
    if any(intlin.dot(row, ray) for row in rebuilt.weights for ray in rebuilt.rays):
        bad.append("D.rho^T != 0")
    if not models_equivalent(rebuilt, CIModel.from_json(rec["model"])):
        bad.append("reconstructed model differs")
    f = laurent.from_json(rec["mirror"])
    depth = config.period_depth if config else len(rec["period"]) - 1
    if len(rec["period"]) < depth + 1:
        bad.append("period too short")
    f0 = f + rec["verdicts"]["step4"]["shift"]
    seq = [_json_number(x) for x in laurent.classical_period(f0, len(rec["period"]) - 1)]
    if seq != rec["period"]:
        bad.append("period mismatch")
    muts = [MutationData.from_json(m) for m in rec["certificate"]["mutations"]]
    if not all(is_mutable(f0, m) for m in muts):
        bad.append("certificate mutation not admitted")
    if not is_rigid_mmlp(f0)[0]:
        bad.append("not rigid")
    return bad
