"""Representability of rank-3 matroids over small finite fields.

A representation is a 3 x n matrix whose triples of columns are singular
exactly on the triples lying inside a block.  The search fixes a basis to the
identity, zeroes entries outside fundamental circuits and scales a spanning
forest of the remaining entries to 1, so an exhausted search is a proof that
no representation exists over that field.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product

import numpy as np

from .core import TwoPartition, rank

__all__ = [
    "NotABasis",
    "DimensionMismatch",
    "FieldSpec",
    "GaloisField",
    "galois_field",
    "parse_battery",
    "DEFAULT_BATTERY",
    "WIDE_BATTERY",
    "RepresentationProblem",
    "RepresentationResult",
    "projective_pattern",
    "find_representation",
    "check_representation",
    "representability_summary",
]


class NotABasis(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


def _prime_power(q: int) -> tuple[int, int] | None:
    if q < 2:
        return None
    p = next(d for d in range(2, q + 1) if q % d == 0)
    e = 0
    while q % p == 0:
        q //= p
        e += 1
    return (p, e) if q == 1 else None


@dataclass(frozen=True)
class FieldSpec:
    p: int
    e: int = 1

    def __post_init__(self):
        if _prime_power(self.p) != (self.p, 1) or self.e < 1:
            raise ValueError(f"not a prime power: {self.p}^{self.e}")
        if self.q > 256:
            raise ValueError("fields above order 256 are not tabulated")

    @property
    def q(self) -> int:
        return self.p ** self.e

    @classmethod
    def of_order(cls, q: int) -> "FieldSpec":
        pe = _prime_power(q)
        if pe is None:
            raise ValueError(f"{q} is not a prime power")
        return cls(*pe)

    def __str__(self):
        return f"GF({self.q})"


DEFAULT_BATTERY = tuple(FieldSpec.of_order(q) for q in (2, 3, 4, 5, 7, 8, 9, 11, 13))
# q <= 13 misses three int-split matroids at n=12 that need GF(16)
WIDE_BATTERY = DEFAULT_BATTERY + (FieldSpec(2, 4),)


def parse_battery(text: str) -> list[FieldSpec]:
    """``"2,3,4"`` -> field specs."""
    return [FieldSpec.of_order(int(t)) for t in text.replace(" ", "").split(",") if t]


def _poly_mulmod(a, b, mod, p):
    # coefficient lists, lowest degree first; mod is monic
    e = len(mod) - 1
    out = [0] * (2 * e)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    for d in range(len(out) - 1, e - 1, -1):
        c = out[d]
        if c:
            for k in range(e + 1):
                out[d - e + k] = (out[d - e + k] - c * mod[k]) % p
    return out[:e]


class GaloisField:
    """Table arithmetic on ``0..q-1``; element digits base ``p`` are polynomial coefficients."""

    def __init__(self, spec: FieldSpec):
        self.spec = spec
        p, e, q = spec.p, spec.e, spec.q
        self.p, self.q = p, q
        digits = [[(x // p ** i) % p for i in range(e)] for x in range(q)]
        enc = lambda c: sum(v * p ** i for i, v in enumerate(c))
        add = np.empty((q, q), dtype=np.int64)
        for x in range(q):
            for y in range(q):
                add[x, y] = enc([(a + b) % p for a, b in zip(digits[x], digits[y])])
        exp, log = self._log_tables(p, e, q, digits, enc)
        mul = np.zeros((q, q), dtype=np.int64)
        for x in range(1, q):
            for y in range(1, q):
                mul[x, y] = exp[(log[x] + log[y]) % (q - 1)]
        self.add, self.mul = add, mul
        self.neg = np.array([int(np.flatnonzero(add[x] == 0)[0]) for x in range(q)], dtype=np.int64)
        self.inv = np.zeros(q, dtype=np.int64)
        for x in range(1, q):
            self.inv[x] = exp[(-log[x]) % (q - 1)]
        self.exp, self.log = exp, log

    @staticmethod
    def _log_tables(p, e, q, digits, enc):
        if e == 1:
            for g in range(1, p):
                seen, x = [], 1
                for _ in range(p - 1):
                    seen.append(x)
                    x = x * g % p
                if len(set(seen)) == p - 1:
                    break
            exp = seen
        else:
            # first monic modulus (base-p counting) for which x is primitive
            for tail in product(range(p), repeat=e):
                mod = list(reversed(tail)) + [1]
                if mod[0] == 0:
                    continue
                x, seen = [1] + [0] * (e - 1), []
                gen = [0, 1] + [0] * (e - 2)
                for _ in range(q - 1):
                    seen.append(enc(x))
                    x = _poly_mulmod(x, gen, mod, p)
                if len(set(seen)) == q - 1:
                    break
            exp = seen
        log = [0] * q
        for i, v in enumerate(exp):
            log[v] = i
        return exp, log

    def element(self, value: int) -> int:
        """Reduce an integer: prime fields mod ``p``; extension fields need a code in range."""
        if self.spec.e == 1:
            return value % self.p
        if not 0 <= value < self.q:
            raise ValueError(f"{value} is not an element code of {self.spec}")
        return value

    def sub(self, a, b):
        return self.add[a, self.neg[b]]

    def cross(self, u, v):
        m, s = self.mul, self.sub
        return np.array([s(m[u[1], v[2]], m[u[2], v[1]]),
                         s(m[u[2], v[0]], m[u[0], v[2]]),
                         s(m[u[0], v[1]], m[u[1], v[0]])], dtype=np.int64)

    def dots(self, rows, vecs):
        """``rows`` (C,3) against ``vecs`` (P,3) -> (C,P) inner products."""
        m, a = self.mul, self.add
        r = rows[:, None, :]
        v = vecs[None, :, :]
        return a[a[m[r[..., 0], v[..., 0]], m[r[..., 1], v[..., 1]]], m[r[..., 2], v[..., 2]]]

    def det3(self, u, v, w) -> int:
        return int(self.dots(np.asarray(w)[None, :], self.cross(u, v)[None, :])[0, 0])


@lru_cache(maxsize=None)
def galois_field(spec: FieldSpec) -> GaloisField:
    return GaloisField(spec)


@dataclass(frozen=True)
class RepresentationProblem:
    """Normalized pattern: entries are 0, 1 or ``None`` (free, nonzero)."""

    n: int
    basis: tuple[int, int, int]
    pattern: tuple[tuple[int | None, int | None, int | None], ...]
    dependent: frozenset

    @property
    def free_count(self) -> int:
        return sum(x is None for col in self.pattern for x in col)

    def column(self, atom: int):
        return self.pattern[atom - 1]


@dataclass(frozen=True)
class RepresentationResult:
    field: FieldSpec
    found: bool
    matrix: tuple[tuple[int, ...], ...] | None = None

    @property
    def outcome(self) -> str:
        return "found" if self.found else "none"


def _dependent_triples(M: TwoPartition) -> frozenset:
    return frozenset(t for b in M.blocks if len(b) >= 3 for t in combinations(b, 3))


def projective_pattern(M: TwoPartition, B: tuple[int, int, int] | None = None) -> RepresentationProblem:
    dep = _dependent_triples(M)
    if B is None:
        B = next(t for t in combinations(range(1, M.n + 1), 3) if t not in dep)
    B = tuple(sorted(B))
    if len(B) != 3 or len(set(B)) != 3 or rank(M, B) != 3:
        raise NotABasis(f"{B} is not a basis")
    pair = M.pair_table()
    support = {}
    for k in range(1, M.n + 1):
        if k in B:
            continue
        rows = [0, 1, 2]
        for i, j in combinations(range(3), 2):
            blk = M.blocks[pair[B[i], B[j]]]
            if k in blk:
                rows = [i, j]
        support[k] = rows
    # forest of entries scaled to 1: first support row of each column, then
    # the first support column of each row
    ones = {(support[k][0], k) for k in support}
    for r in range(3):
        cols = [k for k in sorted(support) if r in support[k]]
        if cols:
            ones.add((r, cols[0]))
    pattern = []
    for k in range(1, M.n + 1):
        if k in B:
            col = [0, 0, 0]
            col[B.index(k)] = 1
        else:
            col = [(1 if (r, k) in ones else None) if r in support[k] else 0 for r in range(3)]
        pattern.append(tuple(col))
    return RepresentationProblem(M.n, B, tuple(pattern), dep)


def find_representation(M: TwoPartition, field: FieldSpec,
                        basis: tuple[int, int, int] | None = None) -> RepresentationResult:
    """Exhaustive backtracking over the free entries with forward checking.

    Every unplaced column keeps the candidates consistent with all placed
    pairs; the column with the fewest candidates is placed next.
    """
    F = galois_field(field)
    prob = projective_pattern(M, basis)
    pair = M.pair_table()
    block_sets = [frozenset(b) for b in M.blocks]

    def blk(i, j):
        return block_sets[pair[min(i, j), max(i, j)]]

    nz = list(range(1, F.q))
    vec = {k: np.array(prob.column(k), dtype=np.int64) for k in prob.basis}

    def restrict(dom, k, new):
        # keep candidates for k that respect every new placed pair (i, j)
        X = np.array([F.cross(vec[i], vec[j]) for i, j in new])
        dep = np.array([k in blk(i, j) for i, j in new])
        D = F.dots(dom, X)
        return dom[np.all((D == 0) == dep, axis=1)]

    basis_pairs = list(combinations(prob.basis, 2))
    domains = {}
    for k in range(1, M.n + 1):
        if k in prob.basis:
            continue
        opts = [[v] if v is not None else nz for v in prob.column(k)]
        domains[k] = restrict(np.array(list(product(*opts)), dtype=np.int64), k, basis_pairs)
        if not len(domains[k]):
            return RepresentationResult(field, False)

    def search(domains):
        if not domains:
            return True
        k = min(domains, key=lambda c: (len(domains[c]), c))
        rest = [c for c in domains if c != k]
        for cand in domains[k]:
            vec[k] = cand
            new = [(i, k) for i in vec if i != k]
            nxt = {}
            for c in rest:
                d = restrict(domains[c], c, new)
                if not len(d):
                    break
                nxt[c] = d
            else:
                if search(nxt):
                    return True
        vec.pop(k, None)
        return False

    if not search(domains):
        return RepresentationResult(field, False)
    mat = tuple(tuple(int(vec[k][r]) for k in range(1, M.n + 1)) for r in range(3))
    return RepresentationResult(field, True, mat)


def check_representation(M: TwoPartition, matrix, field: FieldSpec) -> bool:
    """True iff exactly the triples inside blocks are singular."""
    F = galois_field(field)
    rows = [list(r) for r in matrix]
    if len(rows) != 3 or any(len(r) != M.n for r in rows):
        raise DimensionMismatch(f"expected 3 x {M.n}, got {len(rows)} x {[len(r) for r in rows]}")
    A = np.array([[F.element(int(x)) for x in r] for r in rows], dtype=np.int64)
    dep = _dependent_triples(M)
    cols = A.T
    for i, j in combinations(range(M.n), 2):
        cr = F.cross(cols[i], cols[j])
        D = F.dots(cols[j + 1:], cr[None, :])[:, 0]
        for off, val in enumerate(D):
            k = j + 1 + off
            if (val == 0) != ((i + 1, j + 1, k + 1) in dep):
                return False
    return True


def representability_summary(M: TwoPartition, fields=DEFAULT_BATTERY):
    """Per-field results and whether any field in the battery succeeded.

    The flag only speaks for the battery; "none" everywhere is not a proof of
    non-representability over fields outside it.
    """
    results = [find_representation(M, f) for f in fields]
    return results, any(r.found for r in results)
