"""Append-only JSONL record sets and the Hilbert series prefix lookup."""
import json
import os
import threading
from fractions import Fraction

from .errors import IoFailure, SchemaViolation

SCHEMA_VERSION = 1
REQUIRED = {"v": int, "index": int, "w": list, "d": list, "verdicts": dict}


def canonical(rec):
    return json.dumps(rec, sort_keys=True, separators=(",", ":"))


def validate(rec):
    if not isinstance(rec, dict):
        raise SchemaViolation("record is not a JSON object")
    for key, typ in REQUIRED.items():
        if key not in rec:
            raise SchemaViolation(f"record lacks field {key!r}")
        if not isinstance(rec[key], typ):
            raise SchemaViolation(f"field {key!r} has the wrong type")
    if rec["v"] != SCHEMA_VERSION:
        raise SchemaViolation(f"unsupported schema version {rec['v']}")
    if "period" in rec and not isinstance(rec["period"], list):
        raise SchemaViolation("period must be a list")
    return rec


def period_key(rec, depth):
    seq = rec.get("period")
    if seq is None:
        return None
    return tuple(Fraction(str(x)) for x in seq[:depth + 1])


class RecordSet:
    """Records of one JSONL file with an index from period fingerprint to line numbers."""

    def __init__(self, path, depth=10):
        self.path = path
        self.depth = depth
        self.records = []
        self.index = {}
        self._lock = threading.Lock()

    def _track(self, rec):
        key = period_key(rec, self.depth)
        if key is not None:
            self.index.setdefault(key, []).append(len(self.records))
        self.records.append(rec)

    def load(self):
        self.records, self.index = [], {}
        if not os.path.exists(self.path):
            return self
        try:
            with open(self.path, encoding="utf-8") as fh:
                for n, line in enumerate(fh, 1):
                    if not line.strip():
                        continue
                    try:
                        rec = json.loads(line)
                    except json.JSONDecodeError as exc:
                        raise SchemaViolation(f"line {n}: {exc}") from None
                    self._track(validate(rec))
        except OSError as exc:
            raise IoFailure(str(exc)) from None
        return self

    def append(self, rec):
        """Write one record as a single line; the write is one call under a lock."""
        validate(rec)
        line = canonical(rec) + "\n"
        with self._lock:
            try:
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(line)
                    fh.flush()
            except OSError as exc:
                raise IoFailure(str(exc)) from None
            self._track(rec)

    def extend(self, recs):
        for r in recs:
            self.append(r)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


def load(path, depth=10):
    return RecordSet(path, depth).load()


def dedupe(records, depth=10):
    """Keep the first record of every period fingerprint; records without a period are kept."""
    seen = set()
    out = []
    for rec in records:
        key = period_key(rec, depth)
        if key is not None:
            if key in seen:
                continue
            seen.add(key)
        out.append(rec)
    return out


class HilbertLookup:
    """Map from the first k Hilbert series coefficients to external identifiers."""

    def __init__(self, entries=(), k=5):
        self.k = k
        self.table = {}
        for prefix, ident in entries:
            self.add(prefix, ident)

    def add(self, prefix, ident):
        if len(prefix) < self.k:
            raise SchemaViolation(f"prefix {list(prefix)} shorter than {self.k}")
        self.table.setdefault(tuple(int(x) for x in prefix[:self.k]), []).append(str(ident))

    def contains(self, prefix):
        if len(prefix) < self.k:
            raise ValueError(f"need at least {self.k} coefficients")
        ids = self.table.get(tuple(int(x) for x in prefix[:self.k]), [])
        return bool(ids), list(ids)

    def __len__(self):
        return len(self.table)

    @classmethod
    def from_file(cls, path, k=5):
        look = cls(k=k)
        try:
            with open(path, encoding="utf-8") as fh:
                for n, line in enumerate(fh, 1):
                    if not line.strip():
                        continue
                    try:
                        obj = json.loads(line)
                        prefix, ident = obj["prefix"], obj["id"]
                    except (json.JSONDecodeError, KeyError, TypeError):
                        raise SchemaViolation(f"line {n}: expected {{\"prefix\": [...], \"id\": ...}}") from None
                    if not isinstance(prefix, list):
                        raise SchemaViolation(f"line {n}: prefix must be a list")
                    look.add(prefix, ident)
        except OSError as exc:
            raise IoFailure(str(exc)) from None
        return look


def hilbert_contains(lookup, prefix):
    """(found, ids); with no lookup table the check is unavailable and returns (None, [])."""
    if lookup is None:
        return None, []
    return lookup.contains(prefix)
