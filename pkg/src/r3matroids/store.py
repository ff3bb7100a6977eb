"""Line-delimited record store, classification and queries.

Each line of a store file is one JSON object with keys in a fixed order::

    {"schema_version":1,"n":6,"blocks":[[1,2,3],...],"mv":[3,4],
     "b2":11,"chi_roots":[2,3],"tutte":[[0,1,1],...],"flags":{...},
     "representability":{"battery":[2,3],"outcomes":["found","found"]},
     "aut_order":24}

``mv`` lists m_2 up to the largest block size.  ``blocks`` is the minimal
image under Sym(n), so ``(n, blocks)`` is a key.  Unclassified records carry
``null`` in ``tutte``, ``flags``, ``representability`` and ``aut_order``.
"""

from __future__ import annotations

import ast
import json
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Iterable, Iterator

from .core import (IFCache, NotIntegrallySplitting, TwoPartition, balancedness, characteristic_data,
                   is_divisionally_free, is_inductively_free, is_supersolvable, multiplicity_vector,
                   tutte)
from .permgroup import blocklist_stabilizer, canonical_form
from .represent import DEFAULT_BATTERY, FieldSpec, representability_summary

__all__ = [
    "SCHEMA_VERSION",
    "STORE_ENV",
    "FLAG_NAMES",
    "ParseError",
    "DuplicateKey",
    "UnknownField",
    "IncompleteClassification",
    "MatroidRecord",
    "basic_record",
    "classify",
    "seed_cache",
    "write_records",
    "read_records",
    "lookup",
    "query",
    "TeraoStages",
    "terao_pipeline",
    "tutte_unique_within",
    "default_store_path",
]

SCHEMA_VERSION = 1
STORE_ENV = "R3MATROIDS_STORE"
FLAG_NAMES = ("supersolvable", "divisionally_free", "inductively_free",
              "atom_balanced", "coatom_balanced", "strongly_balanced")


class ParseError(ValueError):
    def __init__(self, lineno: int, msg: str):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


class DuplicateKey(ValueError):
    pass


class UnknownField(KeyError):
    pass


class IncompleteClassification(RuntimeError):
    pass


def default_store_path() -> str:
    return os.environ.get(STORE_ENV, "matroids.jsonl")


@dataclass
class MatroidRecord:
    n: int
    blocks: tuple[tuple[int, ...], ...]
    mv: list[int]
    b2: int
    chi_roots: tuple[int, int] | None
    tutte: list[list[int]] | None = None
    flags: dict[str, bool | None] | None = None
    representability: dict[str, list] | None = None
    aut_order: int | None = None
    schema_version: int = SCHEMA_VERSION

    @property
    def key(self):
        return self.n, self.blocks

    @property
    def int_split(self) -> bool:
        return self.chi_roots is not None

    @property
    def classified(self) -> bool:
        return self.flags is not None

    @property
    def representable(self) -> bool | None:
        if self.representability is None:
            return None
        return "found" in self.representability["outcomes"]

    def matroid(self) -> TwoPartition:
        return TwoPartition(self.n, self.blocks)

    def to_json(self) -> str:
        d = {
            "schema_version": self.schema_version,
            "n": self.n,
            "blocks": [list(b) for b in self.blocks],
            "mv": list(self.mv),
            "b2": self.b2,
            "chi_roots": list(self.chi_roots) if self.chi_roots is not None else None,
            "tutte": self.tutte,
            "flags": None if self.flags is None else {k: self.flags[k] for k in FLAG_NAMES},
            "representability": self.representability,
            "aut_order": self.aut_order,
        }
        return json.dumps(d, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "MatroidRecord":
        d = json.loads(text)
        if not isinstance(d, dict):
            raise ValueError("record is not an object")
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {d.get('schema_version')!r}")
        roots = d["chi_roots"]
        flags = d["flags"]
        if flags is not None and set(flags) != set(FLAG_NAMES):
            raise ValueError(f"flags must be exactly {FLAG_NAMES}")
        return cls(
            n=int(d["n"]),
            blocks=tuple(tuple(int(a) for a in b) for b in d["blocks"]),
            mv=[int(x) for x in d["mv"]],
            b2=int(d["b2"]),
            chi_roots=tuple(roots) if roots is not None else None,
            tutte=d["tutte"],
            flags=flags,
            representability=d["representability"],
            aut_order=d["aut_order"],
        )


def basic_record(M: TwoPartition) -> MatroidRecord:
    """Record with the census data only; ``M`` is canonicalized first."""
    blocks = canonical_form(M.n, M.blocks)
    mv = multiplicity_vector(M)
    cd = characteristic_data(mv)
    return MatroidRecord(M.n, blocks, mv.as_list(), cd.b2, cd.split)


def seed_cache(records: Iterable[MatroidRecord], cache: IFCache | None = None) -> IFCache:
    """Preload inductive freeness of stored matroids (keys match ``is_inductively_free``)."""
    cache = cache if cache is not None else IFCache()
    for r in records:
        if r.flags is not None and r.flags["inductively_free"] is not None:
            cache.put((r.n, r.blocks, False), r.flags["inductively_free"])
    return cache


def classify(M: TwoPartition, battery: Iterable[FieldSpec] | None = DEFAULT_BATTERY,
             cache: IFCache | None = None) -> MatroidRecord:
    """All invariants of ``M``; ``battery=None`` skips representability."""
    rec = basic_record(M)
    C = rec.matroid()
    rec.tutte = tutte(C).as_list()
    try:
        atom, coatom, strong = balancedness(C)
    except NotIntegrallySplitting:
        atom = coatom = strong = None
    rec.flags = {
        "supersolvable": is_supersolvable(C),
        "divisionally_free": is_divisionally_free(C),
        "inductively_free": is_inductively_free(C, cache),
        "atom_balanced": atom,
        "coatom_balanced": coatom,
        "strongly_balanced": strong,
    }
    if battery is not None:
        battery = list(battery)
        results, _ = representability_summary(C, battery)
        rec.representability = {"battery": [f.q for f in battery],
                                "outcomes": [r.outcome for r in results]}
    rec.aut_order = blocklist_stabilizer(C.n, C.blocks).order()
    return rec


# ---------------------------------------------------------------------------
# files


def write_records(path: str, records: Iterable[MatroidRecord], append: bool = False) -> int:
    """Write one record per line; a repeated ``(n, blocks)`` raises DuplicateKey."""
    seen = {r.key for r in read_records(path)} if append and os.path.exists(path) else set()
    count = 0
    with open(path, "a" if append else "w", encoding="utf-8") as fh:
        for r in records:
            if r.key in seen:
                raise DuplicateKey(f"record n={r.n} blocks={r.blocks} already stored")
            seen.add(r.key)
            fh.write(r.to_json() + "\n")
            count += 1
    return count


def read_records(path: str) -> Iterator[MatroidRecord]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                yield MatroidRecord.from_json(line)
            except (ValueError, KeyError, TypeError) as exc:
                raise ParseError(lineno, str(exc)) from exc


def lookup(records: Iterable[MatroidRecord], M: TwoPartition) -> MatroidRecord | None:
    """Find the stored record isomorphic to ``M``."""
    key = (M.n, canonical_form(M.n, M.blocks))
    return next((r for r in records if r.key == key), None)


# ---------------------------------------------------------------------------
# queries


def _fields(r: MatroidRecord) -> dict[str, Any]:
    f = r.flags or {}
    roots = r.chi_roots
    return {
        "n": r.n,
        "blocks": [list(b) for b in r.blocks],
        "num_blocks": len(r.blocks),
        "mv": list(r.mv),
        "b2": r.b2,
        "chi_roots": list(roots) if roots else None,
        "a": roots[0] if roots else None,
        "b": roots[1] if roots else None,
        "int_split": r.int_split,
        "representable": r.representable,
        "aut_order": r.aut_order,
        "classified": r.classified,
        **{k: f.get(k) for k in FLAG_NAMES},
    }


_FIELD_NAMES = frozenset(_fields(MatroidRecord(3, ((1, 2), (1, 3), (2, 3)), [3], 3, (1, 1))))

_CMP = {
    ast.Eq: lambda x, y: x == y,
    ast.NotEq: lambda x, y: x != y,
    ast.Lt: lambda x, y: x < y,
    ast.LtE: lambda x, y: x <= y,
    ast.Gt: lambda x, y: x > y,
    ast.GtE: lambda x, y: x >= y,
    ast.In: lambda x, y: x in y,
    ast.NotIn: lambda x, y: x not in y,
}


def _compile(expr: str):
    tree = ast.parse(expr, mode="eval").body

    def check(node):
        if isinstance(node, ast.Name):
            if node.id not in _FIELD_NAMES:
                raise UnknownField(node.id)
        elif isinstance(node, (ast.BoolOp, ast.UnaryOp, ast.Compare, ast.Constant, ast.List,
                               ast.Tuple, ast.Subscript, ast.And, ast.Or, ast.Not, ast.Load,
                               ast.USub)) or type(node) in _CMP:
            pass
        else:
            raise ValueError(f"unsupported syntax in query: {type(node).__name__}")
        for child in ast.iter_child_nodes(node):
            check(child)

    check(tree)
    return tree


def _eval(node, env):
    if isinstance(node, ast.Name):
        return env[node.id]
    if isinstance(node, ast.Constant):
        return node.value
    if isinstance(node, (ast.List, ast.Tuple)):
        return [_eval(e, env) for e in node.elts]
    if isinstance(node, ast.BoolOp):
        vals = (_eval(v, env) for v in node.values)
        return all(vals) if isinstance(node.op, ast.And) else any(vals)
    if isinstance(node, ast.UnaryOp):
        v = _eval(node.operand, env)
        return (not v) if isinstance(node.op, ast.Not) else -v
    if isinstance(node, ast.Subscript):
        return _eval(node.value, env)[_eval(node.slice, env)]
    if isinstance(node, ast.Compare):
        left = _eval(node.left, env)
        for op, comp in zip(node.ops, node.comparators):
            right = _eval(comp, env)
            try:
                ok = _CMP[type(op)](left, right)
            except TypeError:  # comparisons against null fields are false
                ok = False
            if not ok:
                return False
            left = right
        return True
    raise ValueError(f"unsupported syntax in query: {type(node).__name__}")


def query(records: Iterable[MatroidRecord], where: str, count: bool = False):
    """Records satisfying a Python-style predicate over record fields.

    Example: ``n == 12 and divisionally_free and not inductively_free``.
    """
    tree = _compile(where)
    hits = (r for r in records if _eval(tree, _fields(r)))
    return sum(1 for _ in hits) if count else list(hits)


@dataclass
class TeraoStages:
    n: int
    int_split: int
    representable: int
    not_inductively_free: int
    strongly_balanced: int
    survivors: list[MatroidRecord] = field(default_factory=list)

    @property
    def counts(self) -> tuple[int, int, int, int]:
        return self.int_split, self.representable, self.not_inductively_free, self.strongly_balanced


def _split_records(records, n) -> list[MatroidRecord]:
    recs = [r for r in records if r.n == n and r.int_split]
    if not recs:
        raise IncompleteClassification(f"no integrally splitting records with n={n}")
    return recs


def terao_pipeline(records: Iterable[MatroidRecord], n: int) -> TeraoStages:
    """Int-split, then representable over the battery, then not inductively free, then strongly balanced."""
    recs = _split_records(records, n)
    missing = [r for r in recs if r.flags is None or r.representability is None]
    if missing:
        raise IncompleteClassification(f"{len(missing)} records with n={n} are not fully classified")
    rep = [r for r in recs if r.representable]
    nif = [r for r in rep if not r.flags["inductively_free"]]
    sb = [r for r in nif if r.flags["strongly_balanced"]]
    return TeraoStages(n, len(recs), len(rep), len(nif), len(sb), sb)


def tutte_unique_within(records: Iterable[MatroidRecord], n: int) -> int:
    """Int-split records of size ``n`` whose census no other stored record shares."""
    recs = _split_records(records, n)
    c = Counter(tuple(r.mv) for r in recs)
    return sum(1 for r in recs if c[tuple(r.mv)] == 1)

